//! Hyperbolic-plane primitives of the growth model.
//!
//! Radii grow logarithmically with birth rank and drift outward as the network
//! ages. Every quantity that enters a likelihood depends on the curvature scale
//! `zeta` only through the product `zeta * r`, so the kernels below work with
//! these "reduced" radii and are exactly curvature independent.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Temperatures below this are rejected: likelihoods divide by `T`.
pub const MIN_TEMPERATURE: f64 = 0.01;

/// Width of the band around `beta = 1/2` and `beta = 1` inside which the
/// closed-form limits are used.
const SINGULAR_BAND: f64 = 1e-9;

/// Individual Bernoulli log-terms never drop below `ln(1e-300)`.
pub const LOG_FLOOR: f64 = -690.775_527_898_213_7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("beta must lie in (0, 1] (gamma = 1 + 1/beta >= 2), got beta = {0}")]
    Beta(f64),
    #[error("gamma must be at least 2, got {0}")]
    Gamma(f64),
    #[error(
        "temperature T must lie in (0, 1) (values below {MIN_TEMPERATURE} are rejected), got {0}"
    )]
    Temperature(f64),
    #[error("zeta must be positive, got {0}")]
    Zeta(f64),
    #[error("m must be non-negative, got {0}")]
    M(f64),
    #[error("L must be non-negative, got {0}")]
    L(f64),
    #[error("network size t must be at least {min}, got {got}")]
    Size { min: usize, got: usize },
    #[error("birth rank {rank} outside 1..={size}")]
    Rank { rank: usize, size: usize },
    #[error("rank {older} is not born before time {time}")]
    Order { older: usize, time: usize },
    #[error("expected degree formula is degenerate at beta = 1 when L > 0")]
    DegenerateBeta,
    #[error("expected number of links of node {rank} is {value}, cutoff radius undefined")]
    NonPositiveDegree { rank: usize, value: f64 },
}

/// The growth-model parameters plus the final network size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Expected number of external links per new node.
    pub m: f64,
    /// Internal-link rate.
    #[serde(rename = "L")]
    pub l: f64,
    /// Radial drift exponent; the degree exponent is `1 + 1/beta`.
    pub beta: f64,
    /// Temperature.
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Square root of minus the curvature.
    pub zeta: f64,
    /// Final network size `t`.
    #[serde(rename = "t")]
    pub size: usize,
}

impl ModelParams {
    pub fn from_gamma(
        m: f64,
        l: f64,
        gamma: f64,
        temperature: f64,
        zeta: f64,
        size: usize,
    ) -> Result<Self, ParamError> {
        if !(gamma >= 2.0) || !gamma.is_finite() {
            return Err(ParamError::Gamma(gamma));
        }
        let p = Self {
            m,
            l,
            beta: 1.0 / (gamma - 1.0),
            temperature,
            zeta,
            size,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn gamma(&self) -> f64 {
        1.0 + 1.0 / self.beta
    }

    pub fn with_size(mut self, size: usize) -> Self {
        self.size = size;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(ParamError::Beta(self.beta));
        }
        if !(self.temperature >= MIN_TEMPERATURE && self.temperature < 1.0) {
            return Err(ParamError::Temperature(self.temperature));
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return Err(ParamError::Zeta(self.zeta));
        }
        if !(self.m >= 0.0 && self.m.is_finite()) {
            return Err(ParamError::M(self.m));
        }
        if !(self.l >= 0.0 && self.l.is_finite()) {
            return Err(ParamError::L(self.l));
        }
        if self.size < 1 {
            return Err(ParamError::Size {
                min: 1,
                got: self.size,
            });
        }
        Ok(())
    }

    fn check_rank(&self, i: usize) -> Result<(), ParamError> {
        if i < 1 || i > self.size {
            Err(ParamError::Rank {
                rank: i,
                size: self.size,
            })
        } else {
            Ok(())
        }
    }
}

/// Polar coordinates in the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarCoord {
    pub r: f64,
    pub theta: f64,
}

impl PolarCoord {
    pub fn new(r: f64, theta: f64) -> Self {
        Self {
            r,
            theta: normalize_angle(theta),
        }
    }
}

/// Maps any finite angle into `[0, 2pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let a = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Angular separation `pi - |pi - |a - b||`, in `[0, pi]` for normalized inputs.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    PI - (PI - (a - b).abs()).abs()
}

/// Birth radius `(2/zeta) ln i`.
pub fn radial_initial(i: usize, p: &ModelParams) -> Result<f64, ParamError> {
    if i < 1 {
        return Err(ParamError::Rank {
            rank: i,
            size: p.size,
        });
    }
    Ok(2.0 / p.zeta * (i as f64).ln())
}

/// Radius at time `i` of the node born at `j <= i`.
pub fn radial_at(j: usize, i: usize, p: &ModelParams) -> Result<f64, ParamError> {
    if j > i {
        return Err(ParamError::Order { older: j, time: i });
    }
    let rj = radial_initial(j, p)?;
    let ri = radial_initial(i, p)?;
    Ok(p.beta * rj + (1.0 - p.beta) * ri)
}

/// Distance between two points of the hyperbolic plane of curvature `-zeta^2`.
///
/// Uses `cosh(zeta x) = cosh(zeta (r_a - r_b)) + 2 sinh(zeta r_a) sinh(zeta r_b) sin^2(dtheta/2)`,
/// which is the usual law of cosines rewritten without the cancelling
/// subtraction. The argument of `arccosh` is clamped to at least one.
pub fn hyperbolic_distance(a: PolarCoord, b: PolarCoord, zeta: f64) -> f64 {
    let dtheta = angular_distance(a.theta, b.theta);
    reduced_distance(zeta * a.r, zeta * b.r, dtheta) / zeta
}

/// `zeta * distance` for reduced radii `rho = zeta * r`.
#[inline]
pub fn reduced_distance(rho_a: f64, rho_b: f64, dtheta: f64) -> f64 {
    let s = (0.5 * dtheta).sin();
    let z = (rho_a - rho_b).cosh() + 2.0 * rho_a.sinh() * rho_b.sinh() * s * s;
    z.max(1.0).acosh()
}

/// Connection probability `1 / (1 + exp(zeta (x - R) / (2T)))`.
pub fn connection_probability(
    x: f64,
    cutoff: f64,
    temperature: f64,
    zeta: f64,
) -> Result<f64, ParamError> {
    if !(temperature > 0.0) {
        return Err(ParamError::Temperature(temperature));
    }
    Ok(logistic(zeta * (x - cutoff) / (2.0 * temperature)))
}

/// `1 / (1 + e^u)` without overflow.
#[inline]
pub fn logistic(u: f64) -> f64 {
    if u > 0.0 {
        let e = (-u).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + u.exp())
    }
}

/// `ln(1 + e^u)` without overflow.
#[inline]
pub fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

/// Log-probability of one observed pair state given the logistic argument
/// `u = zeta (x - R) / 2T`: `ln p` if linked, `ln(1 - p)` otherwise, floored.
#[inline]
pub fn bernoulli_log_term(u: f64, linked: bool) -> f64 {
    let v = if linked { -softplus(u) } else { -softplus(-u) };
    v.max(LOG_FLOOR)
}

/// `(1 - i^{-(1-beta)}) / (1 - beta)`, with its `ln i` limit at `beta = 1`.
pub fn cutoff_integral(i: usize, beta: f64) -> f64 {
    let ln_i = (i as f64).ln();
    if (beta - 1.0).abs() < SINGULAR_BAND {
        ln_i
    } else {
        -(-(1.0 - beta) * ln_i).exp_m1() / (1.0 - beta)
    }
}

/// Expected number of older nodes that node `i` links to by final time `t`.
pub fn expected_degree_mbar(i: usize, p: &ModelParams) -> Result<f64, ParamError> {
    p.check_rank(i)?;
    mbar_unchecked(i, p)
}

fn mbar_unchecked(i: usize, p: &ModelParams) -> Result<f64, ParamError> {
    if p.l == 0.0 {
        return Ok(p.m);
    }
    let beta = p.beta;
    if (beta - 1.0).abs() < SINGULAR_BAND {
        return Err(ParamError::DegenerateBeta);
    }
    let t = p.size as f64;
    let fi = i as f64;
    let ln_ratio = (t / fi).ln();
    let growth = if (2.0 * beta - 1.0).abs() < SINGULAR_BAND {
        ln_ratio
    } else {
        ((2.0 * beta - 1.0) * ln_ratio).exp_m1() / (2.0 * beta - 1.0)
    };
    let norm = -(-(1.0 - beta) * t.ln()).exp_m1();
    let young = -(-(1.0 - beta) * fi.ln()).exp_m1();
    Ok(p.m + 2.0 * p.l * (1.0 - beta) / (norm * norm) * growth * young)
}

/// Internal-link rate matching an observed average degree, `(k - 2m)/2`,
/// floored at zero.
pub fn internal_links_for_degree(average_degree: f64, m: f64) -> f64 {
    ((average_degree - 2.0 * m) / 2.0).max(0.0)
}

/// Cutoff radius `R_i` of node `i`; `f64::MIN` for `i = 1`, which never uses it.
pub fn cutoff_radius(i: usize, p: &ModelParams) -> Result<f64, ParamError> {
    p.check_rank(i)?;
    Ok(reduced_cutoff(i, p)? / p.zeta)
}

fn reduced_cutoff(i: usize, p: &ModelParams) -> Result<f64, ParamError> {
    let mbar = mbar_unchecked(i, p)?;
    if !(mbar > 0.0) {
        return Err(ParamError::NonPositiveDegree {
            rank: i,
            value: mbar,
        });
    }
    if i == 1 {
        return Ok(f64::MIN);
    }
    let t = p.temperature;
    let rho = 2.0 * (i as f64).ln();
    let ratio = 2.0 * t / (t * PI).sin() * cutoff_integral(i, p.beta) / mbar;
    Ok(rho - 2.0 * ratio.ln())
}

/// Per-rank quantities of one growth history, precomputed in reduced units.
///
/// Index `i` of every table is the 1-based birth rank; slot 0 is unused.
#[derive(Debug, Clone)]
pub struct GrowthGeometry {
    params: ModelParams,
    rho: Vec<f64>,
    cutoff: Vec<f64>,
    mbar: Vec<f64>,
}

impl GrowthGeometry {
    pub fn new(params: &ModelParams) -> Result<Self, ParamError> {
        params.validate()?;
        let t = params.size;
        let mut rho = vec![0.0; t + 1];
        let mut cutoff = vec![0.0; t + 1];
        let mut mbar = vec![0.0; t + 1];
        for i in 1..=t {
            rho[i] = 2.0 * (i as f64).ln();
            mbar[i] = mbar_unchecked(i, params)?;
            cutoff[i] = reduced_cutoff(i, params)?;
        }
        Ok(Self {
            params: *params,
            rho,
            cutoff,
            mbar,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn size(&self) -> usize {
        self.params.size
    }

    /// Reduced birth radius `zeta r_i = 2 ln i`.
    #[inline]
    pub fn rho(&self, i: usize) -> f64 {
        self.rho[i]
    }

    /// Reduced radius at time `i` of node `j <= i`.
    #[inline]
    pub fn rho_at(&self, j: usize, i: usize) -> f64 {
        self.params.beta * self.rho[j] + (1.0 - self.params.beta) * self.rho[i]
    }

    /// Reduced cutoff `zeta R_i`.
    #[inline]
    pub fn reduced_cutoff(&self, i: usize) -> f64 {
        self.cutoff[i]
    }

    #[inline]
    pub fn mbar(&self, i: usize) -> f64 {
        self.mbar[i]
    }

    #[inline]
    pub fn inv_two_t(&self) -> f64 {
        0.5 / self.params.temperature
    }

    /// Shape of the pair `(a, b)` at the time the younger of the two appeared.
    #[inline]
    pub fn pair_shape(&self, a: usize, b: usize) -> PairShape {
        let (young, old) = if a > b { (a, b) } else { (b, a) };
        self.pair_shape_at(old, young)
    }

    /// Shape of the pair (node `i`, older node `j`) at time `i`.
    #[inline]
    pub fn pair_shape_at(&self, j: usize, i: usize) -> PairShape {
        let rho_i = self.rho[i];
        let rho_j = self.rho_at(j, i);
        PairShape {
            cosh_dr: (rho_i - rho_j).cosh(),
            sinh_prod2: 2.0 * rho_i.sinh() * rho_j.sinh(),
            cutoff: self.cutoff[i],
        }
    }

    /// Final-time radius (not reduced) of the node born at rank `i`.
    pub fn final_radius(&self, i: usize) -> f64 {
        self.rho_at(i, self.params.size) / self.params.zeta
    }

    /// Smallest rank from which `mbar_i(t) < i - 1`, i.e. one past the last
    /// node expected to link to every older node.
    pub fn last_saturated_rank(&self) -> usize {
        (1..=self.size())
            .take_while(|&i| self.mbar[i] >= (i - 1) as f64)
            .last()
            .unwrap_or(0)
    }
}

/// Distance parameters of a node pair at the moment their link was decided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairShape {
    /// `cosh(rho_young - rho_old(young))`.
    pub cosh_dr: f64,
    /// `2 sinh(rho_young) sinh(rho_old(young))`.
    pub sinh_prod2: f64,
    /// Reduced cutoff of the younger node.
    pub cutoff: f64,
}

impl PairShape {
    /// Logistic argument at angular separation `dtheta`.
    #[inline]
    pub fn logistic_arg(&self, dtheta: f64, inv_two_t: f64) -> f64 {
        let s = (0.5 * dtheta).sin();
        let z = self.cosh_dr + self.sinh_prod2 * s * s;
        (z.max(1.0).acosh() - self.cutoff) * inv_two_t
    }

    #[inline]
    pub fn probability(&self, dtheta: f64, inv_two_t: f64) -> f64 {
        logistic(self.logistic_arg(dtheta, inv_two_t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::from_gamma(1.5, 2.5, 2.1, 0.4, 1.0, 5000).unwrap()
    }

    #[test]
    fn birth_radius() {
        let p = params();
        assert_eq!(radial_initial(1, &p).unwrap(), 0.0);
        let p2 = ModelParams { zeta: 2.0, ..p };
        assert!((radial_initial(10, &p2).unwrap() - 2.302585092994046).abs() < 1e-12);
        assert!((radial_initial(100, &p).unwrap() - 9.210340371976184).abs() < 1e-12);
        assert!(radial_initial(0, &p).is_err());
    }

    #[test]
    fn drifted_radius() {
        let p = params();
        let r = radial_initial(7, &p).unwrap();
        assert!((radial_at(7, 7, &p).unwrap() - r).abs() < 1e-15);
        let p1 = ModelParams { beta: 1.0, ..p };
        assert_eq!(
            radial_at(3, 9, &p1).unwrap(),
            radial_initial(3, &p1).unwrap()
        );
        let ph = ModelParams { beta: 0.5, ..p };
        assert!((radial_at(2, 8, &ph).unwrap() - 16f64.ln()).abs() < 1e-12);
        assert!(matches!(radial_at(5, 4, &p), Err(ParamError::Order { .. })));
    }

    #[test]
    fn distance_special_cases() {
        let a = PolarCoord::new(3.0, 1.0);
        let b = PolarCoord::new(5.5, 1.0);
        assert!((hyperbolic_distance(a, b, 1.0) - 2.5).abs() < 1e-12);
        assert_eq!(hyperbolic_distance(a, a, 1.0), 0.0);
        let c = PolarCoord::new(5.0, 0.0);
        let d = PolarCoord::new(5.0, PI);
        // arccosh(cosh^2 5 + sinh^2 5) = arccosh(cosh 10) = 10
        assert!((hyperbolic_distance(c, d, 1.0) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn probability_special_cases() {
        assert_eq!(connection_probability(4.0, 4.0, 0.3, 1.0).unwrap(), 0.5);
        assert_eq!(connection_probability(1e6, 0.0, 0.3, 1.0).unwrap(), 0.0);
        assert_eq!(connection_probability(-1e6, 0.0, 0.3, 1.0).unwrap(), 1.0);
        let p = connection_probability(2.0, 1.0, 0.5, 1.0).unwrap();
        assert!((p - 0.2689414213699951).abs() < 1e-15);
        assert!(connection_probability(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn mbar_at_final_time_is_m() {
        let p = params();
        assert_eq!(expected_degree_mbar(p.size, &p).unwrap(), p.m);
        let half = ModelParams { beta: 0.5, ..p };
        assert_eq!(expected_degree_mbar(p.size, &half).unwrap(), p.m);
    }

    #[test]
    fn mbar_without_internal_links() {
        let p = ModelParams { l: 0.0, ..params() };
        for i in [1, 10, 4999] {
            assert_eq!(expected_degree_mbar(i, &p).unwrap(), 1.5);
        }
    }

    #[test]
    fn mbar_rejects_degenerate_beta() {
        let p = ModelParams {
            beta: 1.0,
            ..params()
        };
        assert_eq!(
            expected_degree_mbar(10, &p),
            Err(ParamError::DegenerateBeta)
        );
    }

    #[test]
    fn mbar_half_limit_is_continuous() {
        let p = params();
        let exact = ModelParams { beta: 0.5, ..p };
        let near = ModelParams {
            beta: 0.5 + 1e-7,
            ..p
        };
        let a = expected_degree_mbar(37, &exact).unwrap();
        let b = expected_degree_mbar(37, &near).unwrap();
        assert!((a - b).abs() < 1e-5 * a);
    }

    #[test]
    fn integral_limits() {
        assert_eq!(cutoff_integral(1, 0.7), 0.0);
        assert_eq!(cutoff_integral(1, 1.0), 0.0);
        assert!((cutoff_integral(10, 1.0) - 10f64.ln()).abs() < 1e-15);
        assert!((cutoff_integral(10, 1.0 - 1e-7) - 10f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn first_node_cutoff_sentinel() {
        let p = params();
        assert_eq!(cutoff_radius(1, &p).unwrap(), f64::MIN);
        assert_eq!(
            connection_probability(0.0, f64::MIN, 0.4, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn cutoff_reference_value() {
        // 50-digit re-implementation of the cutoff and expected-degree
        // formulas, evaluated outside this crate.
        let p = params();
        let r = cutoff_radius(100, &p).unwrap();
        assert!((r - 12.561422939122223434).abs() < 1e-11, "{r}");
        let mbar = expected_degree_mbar(100, &p).unwrap();
        assert!((mbar - 16.90696189479278207).abs() < 1e-11, "{mbar}");
    }

    #[test]
    fn cutoff_rejects_zero_degree() {
        let p = ModelParams {
            m: 0.0,
            l: 0.0,
            ..params()
        };
        assert!(matches!(
            cutoff_radius(5, &p),
            Err(ParamError::NonPositiveDegree { .. })
        ));
    }

    #[test]
    fn validation() {
        let p = params();
        assert!(ModelParams {
            temperature: 0.0,
            ..p
        }
        .validate()
        .is_err());
        assert!(ModelParams {
            temperature: 0.005,
            ..p
        }
        .validate()
        .is_err());
        assert!(ModelParams {
            temperature: 1.0,
            ..p
        }
        .validate()
        .is_err());
        assert!(ModelParams { beta: 0.0, ..p }.validate().is_err());
        assert!(ModelParams { beta: 1.2, ..p }.validate().is_err());
        assert!(ModelParams { zeta: 0.0, ..p }.validate().is_err());
        assert!(ModelParams { m: -1.0, ..p }.validate().is_err());
        assert!(ModelParams { size: 0, ..p }.validate().is_err());
        assert!(ModelParams::from_gamma(1.0, 1.0, 1.5, 0.5, 1.0, 10).is_err());
        let msg = ParamError::Temperature(0.0).to_string();
        assert!(msg.contains("(0, 1)"), "{msg}");
    }

    #[test]
    fn switch_rank_for_validation_parameters() {
        let g = GrowthGeometry::new(&params()).unwrap();
        assert_eq!(g.last_saturated_rank(), 33);
    }

    #[test]
    fn mbar_average_matches_direct_summation() {
        // Direct 50-digit summation of the expected-degree formula over all
        // ranks; the finite-size value is well below the asymptotic m + L = 4.
        let p = params();
        let avg: f64 = (1..=p.size)
            .map(|i| expected_degree_mbar(i, &p).unwrap())
            .sum::<f64>()
            / p.size as f64;
        assert!((avg - 3.6101786410135193588).abs() < 1e-9, "{avg}");
    }

    #[test]
    fn internal_links_from_degree() {
        assert_eq!(internal_links_for_degree(5.0, 1.5), 1.0);
        assert_eq!(internal_links_for_degree(8.0, 1.5), 2.5);
        assert_eq!(internal_links_for_degree(2.0, 1.5), 0.0);
    }

    #[test]
    fn normalize_wraps() {
        assert_eq!(normalize_angle(TAU), 0.0);
        assert!((normalize_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!(normalize_angle(-1e-18) < TAU);
    }

    #[test]
    fn distance_matches_high_precision_reference() {
        // (r_a, theta_a, r_b, theta_b, zeta, x) with x from 50-digit arithmetic;
        // the first five pairs are nearly colinear.
        let cases: [(f64, f64, f64, f64, f64, f64); 20] = [
            (
                6.58931,
                5.980546,
                1.275397,
                5.98056534917,
                1.0,
                5.313913001106093715988719,
            ),
            (
                16.65906,
                1.608347,
                17.520393,
                1.6084692545,
                0.5,
                1.059188339798195148738357,
            ),
            (
                14.633204,
                5.429648,
                10.160677,
                5.4296481759938,
                1.0,
                4.472532181340740416262741,
            ),
            (
                17.952253,
                5.82698,
                2.218428,
                5.8270677403899995,
                1.0,
                15.73382516072057576660473,
            ),
            (
                17.514099,
                0.605607,
                10.027165,
                0.608132604,
                1.0,
                14.19364246197450372327611,
            ),
            (
                0.006932,
                1.073685,
                1.545627,
                1.395175,
                4.0,
                1.539059922431584646478591,
            ),
            (
                12.510545,
                0.202285,
                18.45403,
                1.987011,
                0.5,
                29.9633268833730534207257,
            ),
            (
                18.045688,
                4.449038,
                1.946235,
                4.6309629999999995,
                0.5,
                16.19613227936451375183725,
            ),
            (
                10.360357,
                3.083958,
                18.089175,
                5.436404,
                4.0,
                28.40955600576872793161923,
            ),
            (
                10.382695,
                3.118558,
                0.598889,
                5.371537,
                4.0,
                10.93098714262804084738636,
            ),
            (
                3.950461,
                0.741244,
                19.697908,
                1.16151,
                1.0,
                20.52170911599093652679935,
            ),
            (
                17.924919,
                2.347942,
                0.754102,
                2.372725,
                4.0,
                17.18629199413026660561842,
            ),
            (
                4.080464,
                3.905945,
                2.315328,
                5.756369,
                4.0,
                6.283437321870944645062211,
            ),
            (
                16.705307,
                3.288214,
                3.772666,
                5.209551,
                1.0,
                20.08029204772990752322622,
            ),
            (
                11.379475,
                1.10667,
                4.354417,
                2.7074,
                1.7,
                15.34350566747196177106804,
            ),
            (
                8.915767,
                2.387024,
                16.183273,
                3.193373,
                4.0,
                24.63122712701567391918374,
            ),
            (
                1.555223,
                3.225499,
                4.615527,
                3.9689240000000003,
                1.7,
                4.99849734262527067003882,
            ),
            (
                14.531,
                0.28345,
                19.030531,
                3.40653,
                1.7,
                33.56148059952396489111034,
            ),
            (
                10.680983,
                1.470008,
                8.144831,
                3.055541,
                4.0,
                18.65618435934196108966958,
            ),
            (
                2.136824,
                0.645669,
                8.926119,
                1.132222,
                1.7,
                9.394949397589947943792922,
            ),
        ];
        for (ra, ta, rb, tb, zeta, x) in cases {
            let got = hyperbolic_distance(PolarCoord::new(ra, ta), PolarCoord::new(rb, tb), zeta);
            assert!((got - x).abs() < 1e-9, "{ra} {rb} {zeta}: {got} vs {x}");
        }
    }

    #[test]
    fn mbar_rises_then_falls() {
        // The first node has no older nodes, so the sequence starts at m,
        // peaks early and is non-increasing afterwards.
        for (gamma, peak) in [(2.1, 3), (2.5, 6), (3.0, 11)] {
            let p = ModelParams::from_gamma(1.5, 2.5, gamma, 0.4, 1.0, 1000).unwrap();
            let g = GrowthGeometry::new(&p).unwrap();
            assert_eq!(g.mbar(1), 1.5);
            for i in 2..=1000 {
                if i <= peak {
                    assert!(g.mbar(i) > g.mbar(i - 1), "gamma {gamma}, rank {i}");
                } else {
                    assert!(
                        g.mbar(i) <= g.mbar(i - 1) * (1.0 + 1e-14),
                        "gamma {gamma}, rank {i}"
                    );
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn distance_scales_with_curvature(
            ra in 0.0f64..20.0,
            rb in 0.0f64..20.0,
            ta in 0.0f64..TAU,
            tb in 0.0f64..TAU,
            zi in 0usize..3,
        ) {
            let zeta = [0.5, 1.0, 4.0][zi];
            let unit = hyperbolic_distance(PolarCoord::new(ra, ta), PolarCoord::new(rb, tb), 1.0);
            let scaled = hyperbolic_distance(PolarCoord::new(ra / zeta, ta), PolarCoord::new(rb / zeta, tb), zeta);
            proptest::prop_assert!((zeta * scaled - unit).abs() < 1e-9);
        }

        #[test]
        fn distance_is_symmetric(ra in 0.0f64..20.0, rb in 0.0f64..20.0, ta in 0.0f64..TAU, tb in 0.0f64..TAU) {
            let a = PolarCoord::new(ra, ta);
            let b = PolarCoord::new(rb, tb);
            proptest::prop_assert_eq!(hyperbolic_distance(a, b, 1.0), hyperbolic_distance(b, a, 1.0));
        }

        #[test]
        fn distance_grows_with_angle(ra in 0.0f64..20.0, rb in 0.0f64..20.0, d1 in 0.0f64..PI, d2 in 0.0f64..PI) {
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let x_lo = hyperbolic_distance(PolarCoord::new(ra, 0.0), PolarCoord::new(rb, lo), 1.0);
            let x_hi = hyperbolic_distance(PolarCoord::new(ra, 0.0), PolarCoord::new(rb, hi), 1.0);
            proptest::prop_assert!(x_lo <= x_hi + 1e-12);
        }

        #[test]
        fn probability_decreases_with_distance(x1 in 0.0f64..20.0, x2 in 0.0f64..20.0, t in 0.3f64..0.99) {
            let (near, far) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
            let pn = connection_probability(near, 10.0, t, 1.0).unwrap();
            let pf = connection_probability(far, 10.0, t, 1.0).unwrap();
            proptest::prop_assert!(pn >= pf);
            if far - near > 1e-6 {
                proptest::prop_assert!(pn > pf);
            }
        }
    }
}
