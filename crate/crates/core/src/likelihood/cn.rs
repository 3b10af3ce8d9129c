//! Common-neighbor statistics and the normal-approximation likelihood.
//!
//! For a pair `j < i` and a third node `k`, the probability that both link to
//! `k` is the circle average of two link profiles. Every ordering of `k`
//! relative to `i` and `j` has the same form: `P_ab(u)` is the connection
//! probability of nodes `a`, `b` at angular separation `u`, taken at the time
//! `max(a, b)` with the younger node's cutoff, and
//!
//! `p_k(d) = 1/(2pi) * integral P_jk(u) P_ik(u - d) du`, with `d = theta_i - theta_j`.
//!
//! The direct path evaluates this integral with the trapezoid rule. The
//! engine path stores the cosine spectra of the profiles, so that `p_k` for
//! all offsets is a product of spectra, and sums over `k` before touching the
//! candidate angles.

use std::borrow::Cow;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{logistic, GrowthGeometry};

/// Standard deviations are floored here before use.
pub const SIGMA_MIN: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CnError {
    #[error("invalid rank ordering i={i}, j={j}, k={k}: need i > j >= 1, k outside {{i, j}} and k <= {size}")]
    Order {
        i: usize,
        j: usize,
        k: usize,
        size: usize,
    },
    #[error("quadrature needs an even number of points >= 4, got {0}")]
    Points(usize),
}

/// Trapezoid rule on a uniform grid of `points` angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub points: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { points: 256 }
    }
}

impl Quadrature {
    pub fn new(points: usize) -> Result<Self, CnError> {
        if points < 4 || points % 2 != 0 {
            return Err(CnError::Points(points));
        }
        Ok(Self { points })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CommonNeighborStats {
    pub mu: f64,
    pub sigma2: f64,
}

/// Log-density of `n` under the normal approximation, without the constant.
#[inline]
pub fn normal_log_term(n: f64, stats: CommonNeighborStats) -> f64 {
    let sigma = stats.sigma2.max(0.0).sqrt().max(SIGMA_MIN);
    let d = n - stats.mu;
    -sigma.ln() - d * d / (2.0 * sigma * sigma)
}

fn check_pair(i: usize, j: usize, size: usize) -> Result<(), CnError> {
    if j < 1 || i <= j || i > size {
        Err(CnError::Order { i, j, k: 0, size })
    } else {
        Ok(())
    }
}

fn check_triple(i: usize, j: usize, k: usize, size: usize) -> Result<(), CnError> {
    if j < 1 || i <= j || i > size || k < 1 || k > size || k == i || k == j {
        Err(CnError::Order { i, j, k, size })
    } else {
        Ok(())
    }
}

/// Probability that both `i` and `j` end up linked to `k`, given
/// `dtheta = theta_i - theta_j`, by direct quadrature.
pub fn cn_pair_prob(
    i: usize,
    j: usize,
    k: usize,
    dtheta: f64,
    geom: &GrowthGeometry,
    quad: Quadrature,
) -> Result<f64, CnError> {
    check_triple(i, j, k, geom.size())?;
    Ok(pair_prob_direct(i, j, k, dtheta, geom, quad.points))
}

fn pair_prob_direct(
    i: usize,
    j: usize,
    k: usize,
    dtheta: f64,
    geom: &GrowthGeometry,
    m: usize,
) -> f64 {
    let jk = geom.pair_shape(j, k);
    let ik = geom.pair_shape(i, k);
    let inv = geom.inv_two_t();
    let step = TAU / m as f64;
    let mut sum = 0.0;
    for n in 0..m {
        let u = n as f64 * step;
        sum += logistic(jk.logistic_arg(u, inv)) * logistic(ik.logistic_arg(u - dtheta, inv));
    }
    sum / m as f64
}

/// Mean and variance of the common-neighbor count of `i > j`, summing over
/// every other node of the final network.
pub fn cn_moments(
    i: usize,
    j: usize,
    dtheta: f64,
    geom: &GrowthGeometry,
    quad: Quadrature,
) -> Result<CommonNeighborStats, CnError> {
    check_pair(i, j, geom.size())?;
    let mut stats = CommonNeighborStats::default();
    for k in (1..=geom.size()).filter(|&k| k != i && k != j) {
        let p = pair_prob_direct(i, j, k, dtheta, geom, quad.points);
        stats.mu += p;
        stats.sigma2 += p * (1.0 - p);
    }
    Ok(stats)
}

/// Common-neighbor log-likelihood of `theta` for node `i` by direct
/// quadrature. `counts[j]` is the observed common-neighbor count with `j`.
pub fn cn_loglik(
    i: usize,
    theta: f64,
    angles: &[f64],
    counts: &[usize],
    geom: &GrowthGeometry,
    quad: Quadrature,
) -> Result<f64, CnError> {
    let mut total = 0.0;
    for j in 1..i {
        let stats = cn_moments(i, j, theta - angles[j], geom, quad)?;
        total += normal_log_term(counts[j] as f64, stats);
    }
    Ok(total)
}

/// Sum of `coef[n] cos(n x)` by Clenshaw recurrence.
#[inline]
fn cosine_series(coef: &[f64], cos_x: f64) -> f64 {
    let two_c = 2.0 * cos_x;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &a in coef[1..].iter().rev() {
        let b0 = a + two_c * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coef[0] + cos_x * b1 - b2
}

/// Spectral common-neighbor engine with a per-rank spectrum cache.
pub struct CnEngine {
    geom: GrowthGeometry,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse_double: Arc<dyn Fft<f64>>,
    forward_double: Arc<dyn Fft<f64>>,
    rows: HashMap<usize, Arc<Vec<f64>>>,
    budget: usize,
    used: usize,
}

impl std::fmt::Debug for CnEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CnEngine")
            .field("points", &self.points)
            .field("cached_rows", &self.rows.len())
            .field("used", &self.used)
            .finish()
    }
}

/// Default spectrum-cache size in bytes.
pub const DEFAULT_CACHE_BYTES: usize = 1 << 30;

impl CnEngine {
    pub fn new(geom: &GrowthGeometry, quad: Quadrature) -> Self {
        let m = quad.points;
        let mut planner = FftPlanner::new();
        Self {
            geom: geom.clone(),
            points: m,
            forward: planner.plan_fft_forward(m),
            inverse_double: planner.plan_fft_inverse(2 * m),
            forward_double: planner.plan_fft_forward(2 * m),
            rows: HashMap::new(),
            budget: DEFAULT_CACHE_BYTES,
            used: 0,
        }
    }

    pub fn with_cache_bytes(mut self, bytes: usize) -> Self {
        self.budget = bytes;
        self
    }

    fn half(&self) -> usize {
        self.points / 2 + 1
    }

    /// Cosine coefficients of `P_rk` for every `k`, laid out `k * half`.
    fn compute_row(&self, r: usize) -> Vec<f64> {
        let m = self.points;
        let h = self.half();
        let t = self.geom.size();
        let mut row = vec![0.0; (t + 1) * h];
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        let step = TAU / m as f64;
        let scale = 1.0 / m as f64;
        for k in (1..=t).filter(|&k| k != r) {
            let shape = self.geom.pair_shape(r, k);
            let inv = self.geom.inv_two_t();
            for (n, b) in buf.iter_mut().enumerate() {
                *b = Complex::new(logistic(shape.logistic_arg(n as f64 * step, inv)), 0.0);
            }
            self.forward.process_with_scratch(&mut buf, &mut scratch);
            for (c, b) in row[k * h..(k + 1) * h].iter_mut().zip(&buf) {
                *c = b.re * scale;
            }
        }
        row
    }

    fn row(&self, r: usize) -> Cow<'_, [f64]> {
        match self.rows.get(&r) {
            Some(row) => Cow::Borrowed(row.as_slice()),
            None => Cow::Owned(self.compute_row(r)),
        }
    }

    /// Caches spectra for ranks `1..=upto` while the budget allows.
    pub fn prepare(&mut self, upto: usize) {
        let bytes = (self.geom.size() + 1) * self.half() * std::mem::size_of::<f64>();
        let room = self.budget.saturating_sub(self.used) / bytes.max(1);
        let todo: Vec<usize> = (1..=upto.min(self.geom.size()))
            .filter(|r| !self.rows.contains_key(r))
            .take(room)
            .collect();
        let computed: Vec<(usize, Vec<f64>)> =
            todo.par_iter().map(|&r| (r, self.compute_row(r))).collect();
        for (r, row) in computed {
            self.used += bytes;
            self.rows.insert(r, Arc::new(row));
        }
    }

    /// `p_k` spectrum for the triple, from the cached profile spectra.
    fn product(&self, row_i: &[f64], row_j: &[f64], k: usize, out: &mut [f64]) {
        let h = self.half();
        let a = &row_j[k * h..(k + 1) * h];
        let b = &row_i[k * h..(k + 1) * h];
        for n in 0..h {
            out[n] = a[n] * b[n];
        }
    }

    /// Cosine-series weights of a degree-`M/2` spectrum.
    fn series_weights(&self, spectrum: &[f64]) -> Vec<f64> {
        let h = self.half();
        let mut w: Vec<f64> = spectrum.iter().map(|c| 2.0 * c).collect();
        w[0] = spectrum[0];
        w[h - 1] = spectrum[h - 1];
        w
    }

    /// Both-linked probability for a single triple via the spectra.
    pub fn pair_prob(&self, i: usize, j: usize, k: usize, dtheta: f64) -> Result<f64, CnError> {
        check_triple(i, j, k, self.geom.size())?;
        let mut spec = vec![0.0; self.half()];
        self.product(&self.row(i), &self.row(j), k, &mut spec);
        Ok(cosine_series(&self.series_weights(&spec), dtheta.cos()))
    }

    /// Accumulated mean and square series of the pair `(i, j)`.
    fn pair_series(
        &self,
        i: usize,
        j: usize,
        row_i: &[f64],
        row_j: &[f64],
        work: &mut Work,
    ) -> (Vec<f64>, Vec<f64>) {
        let m = self.points;
        let h = self.half();
        let two_m = 2 * m;
        let mut mu = vec![0.0; h];
        work.lattice.iter_mut().for_each(|v| *v = 0.0);
        let ks: Vec<usize> = (1..=self.geom.size())
            .filter(|&k| k != i && k != j)
            .collect();
        for pair in ks.chunks(2) {
            work.buf
                .iter_mut()
                .for_each(|b| *b = Complex::new(0.0, 0.0));
            for (lane, &k) in pair.iter().enumerate() {
                self.product(row_i, row_j, k, &mut work.spec);
                for n in 0..h {
                    mu[n] += work.spec[n];
                }
                let put = |b: &mut Complex<f64>, v: f64| {
                    if lane == 0 {
                        b.re += v
                    } else {
                        b.im += v
                    }
                };
                put(&mut work.buf[0], work.spec[0]);
                for n in 1..h - 1 {
                    put(&mut work.buf[n], work.spec[n]);
                    put(&mut work.buf[two_m - n], work.spec[n]);
                }
                let nyq = 0.5 * work.spec[h - 1];
                put(&mut work.buf[m / 2], nyq);
                put(&mut work.buf[two_m - m / 2], nyq);
            }
            self.inverse_double
                .process_with_scratch(&mut work.buf, &mut work.scratch);
            for (q, b) in work.lattice.iter_mut().zip(&work.buf) {
                *q += b.re * b.re + b.im * b.im;
            }
        }
        for (b, &q) in work.buf.iter_mut().zip(&work.lattice) {
            *b = Complex::new(q, 0.0);
        }
        self.forward_double
            .process_with_scratch(&mut work.buf, &mut work.scratch);
        let scale = 1.0 / two_m as f64;
        let mut sq = vec![0.0; m + 1];
        sq[0] = work.buf[0].re * scale;
        for n in 1..m {
            sq[n] = 2.0 * work.buf[n].re * scale;
        }
        sq[m] = work.buf[m].re * scale;
        (self.series_weights(&mu), sq)
    }

    fn work(&self) -> Work {
        let two_m = 2 * self.points;
        let scratch_len = self
            .inverse_double
            .get_inplace_scratch_len()
            .max(self.forward_double.get_inplace_scratch_len());
        Work {
            buf: vec![Complex::new(0.0, 0.0); two_m],
            scratch: vec![Complex::new(0.0, 0.0); scratch_len],
            lattice: vec![0.0; two_m],
            spec: vec![0.0; self.half()],
        }
    }

    /// Moments of the pair `(i, j)` at offset `dtheta = theta_i - theta_j`.
    pub fn moments(&self, i: usize, j: usize, dtheta: f64) -> Result<CommonNeighborStats, CnError> {
        check_pair(i, j, self.geom.size())?;
        let (row_i, row_j) = (self.row(i), self.row(j));
        let (mu_w, sq_w) = self.pair_series(i, j, &row_i, &row_j, &mut self.work());
        let c = dtheta.cos();
        let mu = cosine_series(&mu_w, c);
        Ok(CommonNeighborStats {
            mu,
            sigma2: (mu - cosine_series(&sq_w, c)).max(0.0),
        })
    }

    /// Common-neighbor log-likelihood of node `i` at every candidate angle.
    pub fn loglik_profile(
        &mut self,
        i: usize,
        angles: &[f64],
        counts: &[usize],
        thetas: &[f64],
    ) -> Vec<f64> {
        self.prepare(i);
        let this = &*self;
        let row_i = this.row(i);
        let per_j: Vec<Vec<f64>> = (1..i)
            .into_par_iter()
            .map_init(
                || this.work(),
                |work, j| {
                    let row_j = this.row(j);
                    let (mu_w, sq_w) = this.pair_series(i, j, &row_i, &row_j, work);
                    let n = counts[j] as f64;
                    thetas
                        .iter()
                        .map(|&th| {
                            let c = (th - angles[j]).cos();
                            let mu = cosine_series(&mu_w, c);
                            let sigma2 = mu - cosine_series(&sq_w, c);
                            normal_log_term(n, CommonNeighborStats { mu, sigma2 })
                        })
                        .collect()
                },
            )
            .collect();
        let mut total = vec![0.0; thetas.len()];
        for contrib in &per_j {
            for (t, c) in total.iter_mut().zip(contrib) {
                *t += c;
            }
        }
        total
    }
}

struct Work {
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
    lattice: Vec<f64>,
    spec: Vec<f64>,
}
