use std::f64::consts::TAU;

use rayon::prelude::*;

/// Uniform candidate angles `n * step` for all `n` with `n * step < 2pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    step: f64,
    len: usize,
}

impl AngleGrid {
    /// Spacing `min(0.01, 1/i)` used for a node born at rank `i`.
    pub fn for_rank(i: usize) -> Self {
        Self::with_step((1.0 / i.max(1) as f64).min(0.01))
    }

    pub fn with_step(step: f64) -> Self {
        assert!(step > 0.0 && step.is_finite(), "grid step must be positive");
        let mut len = (TAU / step).ceil() as usize;
        while len > 1 && (len - 1) as f64 * step >= TAU {
            len -= 1;
        }
        while (len as f64) * step < TAU {
            len += 1;
        }
        Self { step, len }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn angle(&self, n: usize) -> f64 {
        n as f64 * self.step
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.len).map(|n| self.angle(n)).collect()
    }

    /// Ascending indices of the grid angles within circular distance
    /// `half_width` of `center`.
    pub fn window(&self, center: f64, half_width: f64) -> Vec<usize> {
        if half_width >= std::f64::consts::PI {
            return (0..self.len).collect();
        }
        (0..self.len)
            .filter(|&n| {
                let d = (self.angle(n) - center).rem_euclid(TAU);
                d.min(TAU - d) <= half_width
            })
            .collect()
    }
}

/// Sampled log-likelihood and its maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodProfile {
    pub thetas: Vec<f64>,
    pub loglik: Vec<f64>,
    pub argmax_theta: f64,
    pub argmax_index: usize,
}

impl LikelihoodProfile {
    /// Assembles a profile from already evaluated scores; `thetas` must be
    /// increasing so that the first maximum is the smallest angle.
    pub fn from_scores(thetas: Vec<f64>, loglik: Vec<f64>) -> Self {
        assert_eq!(thetas.len(), loglik.len());
        assert!(!thetas.is_empty(), "empty likelihood profile");
        let argmax_index = argmax(&loglik);
        Self {
            argmax_theta: thetas[argmax_index],
            argmax_index,
            thetas,
            loglik,
        }
    }

    pub fn max(&self) -> f64 {
        self.loglik[self.argmax_index]
    }
}

/// Index of the first maximum; NaN never wins.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (n, &v) in values.iter().enumerate() {
        if v > best_v {
            best_v = v;
            best = n;
        }
    }
    best
}

/// Evaluates `score` at every grid angle and returns the profile.
pub fn maximize_profile<F>(score: F, grid: &[f64]) -> LikelihoodProfile
where
    F: Fn(f64) -> f64 + Sync,
{
    let loglik: Vec<f64> = grid.par_iter().map(|&th| score(th)).collect();
    LikelihoodProfile::from_scores(grid.to_vec(), loglik)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_circle() {
        let g = AngleGrid::for_rank(10);
        assert_eq!(g.step(), 0.01);
        assert_eq!(g.len(), 629);
        assert!(g.angle(g.len() - 1) < TAU);
        let g = AngleGrid::for_rank(1000);
        assert_eq!(g.step(), 0.001);
        assert_eq!(g.len(), 6284);
        let g = AngleGrid::with_step(TAU / 4.0);
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn window_wraps() {
        let g = AngleGrid::with_step(0.5);
        assert_eq!(g.window(0.0, 0.6), vec![0, 1, 12]);
        assert_eq!(g.window(1.0, 10.0).len(), g.len());
    }

    #[test]
    fn constant_score_picks_smallest_angle() {
        let p = maximize_profile(|_| 3.0, &[0.1, 0.2, 0.3]);
        assert_eq!(p.argmax_theta, 0.1);
    }

    #[test]
    fn quadratic_score() {
        let p = maximize_profile(|t| -(t - 1.0) * (t - 1.0), &[0.0, 0.5, 1.0, 1.5]);
        assert_eq!(p.argmax_theta, 1.0);
        assert_eq!(p.max(), 0.0);
    }

    #[test]
    fn nan_is_never_the_maximum() {
        assert_eq!(argmax(&[f64::NAN, -5.0, f64::NAN]), 1);
    }

    #[test]
    fn coarse_argmax_near_fine_argmax() {
        let score = |t: f64| (t - 2.345).cos() + 0.3 * (2.0 * (t - 2.345)).cos();
        let coarse = AngleGrid::with_step(0.05);
        let fine = AngleGrid::with_step(0.005);
        let a = maximize_profile(score, &coarse.angles()).argmax_theta;
        let b = maximize_profile(score, &fine.angles()).argmax_theta;
        assert!((a - b).abs() <= coarse.step());
    }
}
