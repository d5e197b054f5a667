//! The Dunkl operator, the weight `Theta(x, z)`, the generalized Taylor
//! identity and the explicit K-functional decomposition.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::measure::{lp_distance, lp_norm, Parity, SampledFunction};
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::special::{kernel_parts, AlphaParameter};
use crate::transform::{forward_default, inverse_transform, Spectrum};
use crate::translation::{AngularRule, Translator};

/// Nodes of each half of the `Theta` rule.
pub const THETA_RULE_NODES: usize = 24;
/// Below this `|x|` the difference quotient uses its limit.
const ODD_LIMIT: f64 = 1e-5;

/// `Lambda_alpha f = f' + (2 alpha + 1) / x * (f(x) - f(-x)) / 2`.
pub fn apply_dunkl_operator(f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let k = grid.alpha().weight_exponent();
    let v = f.values();
    let d = grid.differentiate(v);
    let values = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let m = grid.mirror(i);
            let diff = if x.abs() < ODD_LIMIT {
                (d[i] + d[m]) * 0.5
            } else {
                (v[i] - v[m]) / (2.0 * x)
            };
            d[i] + diff * k
        })
        .collect();
    let parity = match f.parity() {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
        Parity::None => Parity::None,
    };
    SampledFunction::from_values(grid.clone(), values)
        .expect("same grid")
        .assume_parity(parity)
}

/// `Theta(x, z) = 1 / (2 x^(2a+1)) + sgn(z) / (2 |z|^(2a+1))` for `0 < |z| <= x`.
pub fn theta_weight(alpha: &AlphaParameter, x: f64, z: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("Theta needs x > 0, got {x}"));
    }
    if z == 0.0 || z.abs() > x || z.is_nan() {
        return domain(format!("Theta needs 0 < |z| <= x, got z = {z}, x = {x}"));
    }
    let k = alpha.weight_exponent();
    Ok(0.5 / x.powf(k) + 0.5 * z.signum() / z.abs().powf(k))
}

/// Quadrature for `int_{-x}^{x} Theta(x, z) F(z) dmu_alpha(z)`:
/// `sum_J wj (F(zj) + F(-zj)) + sum_L wl (F(zl) - F(-zl))`.
#[derive(Debug, Clone)]
pub struct ThetaRule {
    pub x: f64,
    pub even: Vec<(f64, f64)>,
    pub odd: Vec<(f64, f64)>,
}

impl ThetaRule {
    pub fn new(alpha: &AlphaParameter, x: f64, n: usize) -> Result<Self> {
        if !(x > 0.0) {
            return domain(format!("Theta rule needs x > 0, got {x}"));
        }
        let k = alpha.weight_exponent();
        let half_m = 0.5 * alpha.measure_norm();
        let jac = gauss_jacobi(n, 0.0, k);
        let cj = half_m * 0.5 * x * 2f64.powf(-k);
        let even = jac.nodes.iter().zip(&jac.weights).map(|(&t, &w)| (0.5 * x * (1.0 + t), cj * w)).collect();
        let leg = gauss_legendre(n);
        let cl = half_m * 0.5 * x;
        let odd = leg.nodes.iter().zip(&leg.weights).map(|(&t, &w)| (0.5 * x * (1.0 + t), cl * w)).collect();
        Ok(Self { x, even, odd })
    }

    /// `int Theta dmu_alpha` by the rule (only the even half contributes).
    pub fn mass(&self) -> f64 {
        2.0 * self.even.iter().map(|(_, w)| w).sum::<f64>()
    }

    /// Applies the rule to a scalar function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        let e: f64 = self.even.iter().map(|&(z, w)| w * (f(z) + f(-z))).sum();
        let o: f64 = self.odd.iter().map(|&(z, w)| w * (f(z) - f(-z))).sum();
        e + o
    }
}

/// `int_{-x}^{x} Theta(x, z) dmu_alpha(z) = x / (2^(a+2) Gamma(a+2))` by quadrature.
pub fn theta_mass(alpha: &AlphaParameter, x: f64) -> Result<f64> {
    Ok(ThetaRule::new(alpha, x, THETA_RULE_NODES)?.mass())
}

/// Accumulates `int Theta(x, z) tau_z g dmu_alpha(z)` with angular translations.
fn theta_average(tr: &Translator, rule: &ThetaRule) -> Result<SampledFunction> {
    let g = tr.function();
    let grid = g.grid();
    let n = grid.len();
    // tau_{-z} g(y) = +-tau_z g(-y) when g is even or odd
    let sign = match g.parity() {
        Parity::Even => Some(1.0),
        Parity::Odd => Some(-1.0),
        Parity::None => None,
    };
    let pair = |z: f64| -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let p = tr.translate(z)?.into_values();
        let m = match sign {
            Some(s) => (0..n).map(|i| p[grid.mirror(i)] * s).collect(),
            None => tr.translate(-z)?.into_values(),
        };
        Ok((p, m))
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for &(z, w) in &rule.even {
        let (p, m) = pair(z)?;
        for (a, (u, v)) in acc.iter_mut().zip(p.iter().zip(&m)) {
            *a += (u + v) * w;
        }
    }
    for &(z, w) in &rule.odd {
        let (p, m) = pair(z)?;
        for (a, (u, v)) in acc.iter_mut().zip(p.iter().zip(&m)) {
            *a += (u - v) * w;
        }
    }
    SampledFunction::from_values(grid.clone(), acc)
}

/// Both sides of `tau_x f - f = int_{-x}^{x} Theta(x, z) tau_z(Lambda f) |z|^(2a+1) dz`
/// and the sup-norm of their difference. The measure here is `mu_alpha`
/// without its normalizing constant.
#[derive(Debug, Clone)]
pub struct TaylorCheck {
    pub lhs: SampledFunction,
    pub rhs: SampledFunction,
    pub defect: f64,
    pub lambda_sup: f64,
}

pub fn taylor_remainder_check(f: &SampledFunction, x: f64, angular: &Arc<AngularRule>) -> Result<TaylorCheck> {
    if !(x > 0.0) {
        return domain(format!("Taylor check needs x > 0, got {x}"));
    }
    let lf = apply_dunkl_operator(f);
    let lhs = Translator::new(f, angular.clone())?.translate(x)?.sub(f)?;
    let rule = ThetaRule::new(f.alpha(), x, THETA_RULE_NODES)?;
    let rhs = theta_average(&Translator::new(&lf, angular.clone())?, &rule)?
        .scale(Complex64::new(1.0 / f.alpha().measure_norm(), 0.0));
    let defect = lhs.sup_distance(&rhs)?;
    Ok(TaylorCheck { lhs, rhs, defect, lambda_sup: lf.sup_norm() })
}

/// The decomposition `f = f0 + f1_scaled` at scale `x`.
#[derive(Debug, Clone)]
pub struct KDecomposition {
    pub scale_x: f64,
    pub f0: SampledFunction,
    pub f1_scaled: SampledFunction,
    pub lambda_f1_scaled: SampledFunction,
    pub k_value: f64,
}

/// Fourier multiplier of `g -> (1/x) int Theta(x, z) tau_z g dmu(z)`.
fn theta_multiplier(alpha: f64, rule: &ThetaRule, lambda: f64) -> Complex64 {
    let a: f64 = rule.even.iter().map(|&(z, w)| 2.0 * w * kernel_parts(alpha, lambda * z).0).sum();
    let b: f64 = rule.odd.iter().map(|&(z, w)| 2.0 * w * kernel_parts(alpha, lambda * z).1).sum();
    Complex64::new(a, b) / rule.x
}

/// `f1 = (1/x) int Theta(x, z) tau_z f dmu(z)`; the translations are applied
/// through their multipliers `E_alpha(i lambda z)`.
pub fn theta_smoothing(f: &SampledFunction, x: f64) -> Result<SampledFunction> {
    let alpha = f.alpha();
    let rule = ThetaRule::new(alpha, x, THETA_RULE_NODES)?;
    let s = forward_default(f)?;
    let g = s.freq_grid().clone();
    let values =
        g.nodes().iter().zip(s.values()).map(|(&l, v)| v * theta_multiplier(alpha.alpha(), &rule, l)).collect();
    Ok(inverse_transform(&Spectrum::new(g, values)?, f.grid())?.assume_parity(f.parity()))
}

/// Same as [`theta_smoothing`] with angular translations.
pub fn theta_smoothing_angular(f: &SampledFunction, x: f64, angular: &Arc<AngularRule>) -> Result<SampledFunction> {
    let rule = ThetaRule::new(f.alpha(), x, THETA_RULE_NODES)?;
    let avg = theta_average(&Translator::new(f, angular.clone())?, &rule)?;
    Ok(avg.scale(Complex64::new(1.0 / x, 0.0)))
}

/// Builds the decomposition given `tau_x f` (angular) for reuse across `p`.
pub fn k_decomposition_with(f: &SampledFunction, x: f64, p: f64, tau_x: &SampledFunction) -> Result<KDecomposition> {
    if !(x > 0.0) {
        return domain(format!("K decomposition needs x > 0, got {x}"));
    }
    let c = f.alpha().decomposition_scale();
    // constants are not in the range of the truncated transform; their
    // smoothing is exact: f1 = f * (int Theta dmu) / x = f / c
    let constant = constant_value(f).is_some();
    let f1_scaled = if constant { f.clone() } else { theta_smoothing(f, x)?.scale(Complex64::new(c, 0.0)) };
    let f0 = f.sub(&f1_scaled)?;
    // Lambda f1 = (measure_norm / x)(tau_x f - f) by the Taylor identity, and
    // c * measure_norm = 2(alpha + 1)
    let lambda_f1_scaled = if constant {
        SampledFunction::zeros(f.grid().clone())
    } else {
        tau_x.sub(f)?.scale(Complex64::new(c * f.alpha().measure_norm() / x, 0.0))
    };
    let k_value = lp_norm(&f0, p)? + x * lp_norm(&lambda_f1_scaled, p)?;
    Ok(KDecomposition { scale_x: x, f0, f1_scaled, lambda_f1_scaled, k_value })
}

fn constant_value(f: &SampledFunction) -> Option<Complex64> {
    let v = f.values();
    let first = *v.first()?;
    let tol = 1e-14 * first.norm().max(f64::MIN_POSITIVE);
    v.iter().all(|u| (u - first).norm() <= tol).then_some(first)
}

pub fn k_decomposition(f: &SampledFunction, x: f64, p: f64, angular: &Arc<AngularRule>) -> Result<KDecomposition> {
    if !(x > 0.0) {
        return domain(format!("K decomposition needs x > 0, got {x}"));
    }
    let tau = Translator::new(f, angular.clone())?.translate(x)?;
    k_decomposition_with(f, x, p, &tau)
}

/// `||f0 + f1_scaled - f||_inf`.
pub fn reconstruction_defect(f: &SampledFunction, d: &KDecomposition) -> Result<f64> {
    d.f0.add(&d.f1_scaled)?.sup_distance(f)
}

/// `||Lambda f1_scaled (numerical) - lambda_f1_scaled (closed form)||_p`.
pub fn closed_form_defect(d: &KDecomposition, p: f64) -> Result<f64> {
    lp_distance(&apply_dunkl_operator(&d.f1_scaled), &d.lambda_f1_scaled, p)
}
