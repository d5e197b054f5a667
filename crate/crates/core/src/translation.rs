//! Dunkl translation (angular form and kernel form), the kernel `W_alpha`,
//! Dunkl convolution and the Bessel translation on even functions.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::measure::{Parity, QuadGrid, SampledFunction};
use crate::quadrature::{gauss_jacobi, Rule};
use crate::special::{kernel_parts, AlphaParameter};
use crate::transform::{forward_default, inverse_transform, Spectrum};

/// Default number of angular nodes.
pub const DEFAULT_THETA_NODES: usize = 128;
/// Step of the uniform table used for off-grid evaluation.
const TABLE_STEP: f64 = 1.0 / 512.0;
/// Samples below this fraction of the peak are treated as outside the support.
const SUPPORT_REL: f64 = 1e-17;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Quadrature for `dnu_alpha(theta)` on `(0, pi)`, in the variable
/// `t = cos(theta)`. Weights include the density constant, so they sum to
/// `nu_alpha((0, pi)) = 1/2`.
#[derive(Debug, Clone)]
pub struct AngularRule {
    alpha: AlphaParameter,
    cos_nodes: Vec<f64>,
    one_minus_cos: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularRule {
    pub fn new(alpha: AlphaParameter, n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("angular rule needs at least 2 nodes, got {n}"));
        }
        let a = alpha.alpha();
        // (1 - t)(1 - t^2)^(a - 1/2) = (1 - t)^(a + 1/2) (1 + t)^(a - 1/2)
        let rule = gauss_jacobi(n, a + 0.5, a - 0.5);
        let weights = rule.weights.iter().map(|w| w * alpha.nu_norm()).collect();
        let one_minus_cos = rule.nodes.iter().map(|t| 1.0 - t).collect();
        Ok(Self { alpha, cos_nodes: rule.nodes, one_minus_cos, weights })
    }

    pub fn alpha(&self) -> &AlphaParameter {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Angles in `(0, pi)`, decreasing with the index.
    pub fn theta_nodes(&self) -> Vec<f64> {
        self.cos_nodes.iter().map(|t| t.acos()).collect()
    }

    pub fn theta_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `int dnu_alpha` by this rule.
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Cubic Lagrange interpolation of a sampled function on a uniform table
/// covering `[-2R, 2R]`. The table is filled from the panel interpolant
/// inside `[-R, R]` and by the boundary values beyond.
#[derive(Debug, Clone)]
pub struct OffGrid {
    radius: f64,
    limit: f64,
    inv_step: f64,
    offset: usize,
    table: Vec<Complex64>,
    support: f64,
    slope0: Complex64,
}

impl OffGrid {
    pub fn new(f: &SampledFunction) -> Self {
        let grid = f.grid();
        let radius = grid.radius();
        let limit = 2.0 * radius;
        let half = (limit / TABLE_STEP).ceil() as usize + 2;
        let step = limit / (half - 2) as f64;
        let left = f.eval(-radius);
        let right = f.eval(radius);
        let table: Vec<Complex64> = (0..=2 * half)
            .into_par_iter()
            .map(|i| {
                let x = (i as f64 - half as f64) * step;
                if x < -radius {
                    left
                } else if x > radius {
                    right
                } else {
                    f.eval(x)
                }
            })
            .collect();
        let peak = f.sup_norm();
        let support = grid
            .nodes()
            .iter()
            .zip(f.values())
            .filter(|(_, v)| v.norm() > SUPPORT_REL * peak)
            .map(|(x, _)| x.abs())
            .fold(0.0, f64::max);
        // support extends to R if the boundary values are not negligible
        let support = if left.norm().max(right.norm()) > SUPPORT_REL * peak { limit } else { support };
        let slope0 = (f.eval(step) - f.eval(-step)) / (2.0 * step);
        Self { radius, limit, inv_step: 1.0 / step, offset: half, table, support, slope0 }
    }

    /// Largest `|x|` at which the function is not negligible.
    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn eval(&self, x: f64) -> Complex64 {
        let u = x * self.inv_step + self.offset as f64;
        let i = (u.floor() as isize).clamp(1, self.table.len() as isize - 3) as usize;
        let s = u - i as f64;
        let (sm1, sp1, sp2) = (s + 1.0, s - 1.0, s - 2.0);
        let w0 = -s * sp1 * sp2 / 6.0;
        let w1 = sm1 * sp1 * sp2 / 2.0;
        let w2 = -sm1 * s * sp2 / 2.0;
        let w3 = sm1 * s * sp1 / 6.0;
        self.table[i - 1] * w0 + self.table[i] * w1 + self.table[i + 1] * w2 + self.table[i + 2] * w3
    }

    fn check(&self, point: f64, x: f64, y: f64, theta: f64) -> Result<()> {
        if point.abs() > self.limit * (1.0 + 1e-12) {
            return Err(Error::Range { x, y, theta, point, limit: self.limit });
        }
        Ok(())
    }
}

/// Precomputed data for repeated angular translations of one function.
#[derive(Debug, Clone)]
pub struct Translator {
    f: SampledFunction,
    off: OffGrid,
    rule: Arc<AngularRule>,
}

impl Translator {
    pub fn new(f: &SampledFunction, rule: Arc<AngularRule>) -> Result<Self> {
        if f.alpha() != rule.alpha() {
            return domain(format!(
                "alpha mismatch: function {} vs angular rule {}",
                f.alpha().alpha(),
                rule.alpha().alpha()
            ));
        }
        Ok(Self { f: f.clone(), off: OffGrid::new(f), rule })
    }

    pub fn function(&self) -> &SampledFunction {
        &self.f
    }

    pub fn off_grid(&self) -> &OffGrid {
        &self.off
    }

    /// `tau_x f(y)` at one point.
    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        let rule = &*self.rule;
        let d2 = (x - y) * (x - y);
        let xy2 = 2.0 * x * y;
        let s = x + y;
        let mut acc = ZERO;
        for i in 0..rule.weights.len() {
            let rho2 = d2 + xy2 * rule.one_minus_cos[i];
            let rho = rho2.max(0.0).sqrt();
            let fp = self.off.eval(rho);
            let fm = self.off.eval(-rho);
            let odd = if rho > 1e-8 { (fp - fm) * (s / rho) } else { self.off.slope0 * (2.0 * s) };
            acc += ((fp + fm) + odd) * rule.weights[i];
        }
        acc
    }

    /// `tau_x f` on the grid of `f`.
    pub fn translate(&self, x: f64) -> Result<SampledFunction> {
        let grid = self.f.grid();
        if x == 0.0 {
            return Ok(self.f.clone());
        }
        if x.abs() > grid.radius() {
            let y = grid.nodes()[grid.len() - 1];
            return Err(Error::Range { x, y, theta: 0.0, point: x.abs() + y, limit: self.off.limit });
        }
        let ymax = grid.nodes()[grid.len() - 1];
        self.off.check(x.abs() + ymax, x, ymax, std::f64::consts::PI)?;
        let support = self.off.support;
        let values: Vec<Complex64> = grid
            .nodes()
            .par_iter()
            .map(|&y| if (x.abs() - y.abs()).abs() > support { ZERO } else { self.value(x, y) })
            .collect();
        SampledFunction::from_values(grid.clone(), values)
    }
}

/// `tau_x f` by the angular formula.
pub fn translate_angular(f: &SampledFunction, x: f64, rule: &Arc<AngularRule>) -> Result<SampledFunction> {
    Translator::new(f, rule.clone())?.translate(x)
}

/// `tau_x f` through the multiplier `E_alpha(i lambda x)` on the spectrum.
pub fn translate_spectral(f: &SampledFunction, x: f64) -> Result<SampledFunction> {
    let s = forward_default(f)?;
    let g = s.freq_grid().clone();
    let alpha = g.alpha().alpha();
    let i = Complex64::new(0.0, 1.0);
    let values = g
        .nodes()
        .iter()
        .zip(s.values())
        .map(|(&l, v)| {
            let (a, b) = kernel_parts(alpha, l * x);
            v * (a + i * b)
        })
        .collect();
    inverse_transform(&Spectrum::new(g, values)?, f.grid())
}

/// A point evaluation of `W_alpha` with its support interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w_value: f64,
    pub support_interval: (f64, f64),
}

fn b_coef(x: f64, y: f64, z: f64) -> f64 {
    if x != 0.0 && y != 0.0 {
        (x * x + y * y - z * z) / (2.0 * x * y)
    } else {
        0.0
    }
}

fn kernel_constant(alpha: &AlphaParameter) -> f64 {
    let a = alpha.alpha();
    let g = libm::tgamma(a + 1.0);
    g * g / (2f64.powf(a - 1.0) * std::f64::consts::PI.sqrt() * libm::tgamma(a + 0.5))
}

/// `W_alpha(x, y, z)` with its support. Zero outside the open support
/// interval and whenever `xyz = 0` (those cases belong to the Dirac branches).
pub fn kernel_eval(alpha: &AlphaParameter, x: f64, y: f64, z: f64) -> KernelEval {
    let lo = (x.abs() - y.abs()).abs();
    let hi = x.abs() + y.abs();
    let az = z.abs();
    let w_value = if x * y * z == 0.0 || az <= lo || az >= hi {
        0.0
    } else {
        let a = alpha.alpha();
        let delta = ((hi * hi - z * z) * (z * z - lo * lo)).powf(a - 0.5) / (x * y * z).abs().powf(2.0 * a);
        let bracket = 1.0 - b_coef(x, y, z) + b_coef(z, x, y) + b_coef(z, y, x);
        kernel_constant(alpha) * bracket * delta
    };
    KernelEval { x, y, z, w_value, support_interval: (lo, hi) }
}

/// `W_alpha(x, y, z)`.
#[allow(non_snake_case)]
pub fn kernel_W(alpha: &AlphaParameter, x: f64, y: f64, z: f64) -> f64 {
    kernel_eval(alpha, x, y, z).w_value
}

/// Rule in `s = z^2` over the support: `s = x^2 + y^2 + 2|xy| t` with the
/// weight `(1 - t^2)^(alpha - 1/2)`; weights include `nu_norm`.
#[derive(Debug, Clone)]
pub struct KernelRule {
    alpha: AlphaParameter,
    rule: Rule,
}

impl KernelRule {
    pub fn new(alpha: AlphaParameter, n: usize) -> Self {
        let a = alpha.alpha();
        let mut rule = gauss_jacobi(n, a - 0.5, a - 0.5);
        for w in rule.weights.iter_mut() {
            *w *= alpha.nu_norm();
        }
        Self { alpha, rule }
    }

    /// Visits `(z, w, even_coef, odd_coef)` such that
    /// `int g dgamma_{x,y} = sum w (even_coef (g(z) + g(-z)) + odd_coef (g(z) - g(-z)))`
    /// for `xy != 0`.
    fn visit(&self, x: f64, y: f64, mut f: impl FnMut(f64, f64, f64, f64)) {
        let sg = (x * y).signum();
        let axy = (x * y).abs();
        for (&t, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let z = (x * x + y * y + 2.0 * axy * t).max(0.0).sqrt();
            let odd = if z > 0.0 { b_coef(z, x, y) + b_coef(z, y, x) } else { 0.0 };
            f(z, w, 1.0 + sg * t, odd);
        }
    }

    /// `int |W_alpha(x, y, z)| dmu_alpha(z)`.
    pub fn abs_mass(&self, x: f64, y: f64) -> f64 {
        if x * y == 0.0 {
            return 1.0;
        }
        let mut total = 0.0;
        self.visit(x, y, |_, w, e, o| total += w * ((e + o).abs() + (e - o).abs()));
        total
    }

    pub fn alpha(&self) -> &AlphaParameter {
        &self.alpha
    }
}

/// `tau_x f(y) = int f dgamma_{x,y}` with the signed kernel measure.
pub fn translate_kernel(f: &SampledFunction, x: f64, rule: &KernelRule) -> Result<SampledFunction> {
    if f.alpha() != rule.alpha() {
        return domain("alpha mismatch between function and kernel rule");
    }
    let grid = f.grid();
    if x.abs() > grid.radius() {
        return Err(Error::Range { x, y: 0.0, theta: 0.0, point: x, limit: grid.radius() });
    }
    if x == 0.0 {
        return Ok(f.clone());
    }
    let off = OffGrid::new(f);
    let values: Vec<Complex64> = grid
        .nodes()
        .par_iter()
        .map(|&y| {
            if (x.abs() - y.abs()).abs() > off.support() {
                return ZERO;
            }
            let mut acc = ZERO;
            rule.visit(x, y, |z, w, e, o| {
                let (fp, fm) = (off.eval(z), off.eval(-z));
                acc += ((fp + fm) * e + (fp - fm) * o) * w;
            });
            acc
        })
        .collect();
    SampledFunction::from_values(grid.clone(), values)
}

/// Dunkl convolution `(f * g)(x) = int tau_x f(-y) g(y) dmu_alpha(y)`,
/// computed as `sum_j g_j mu_j tau_{-y_j} f`.
pub fn convolve(f: &SampledFunction, g: &SampledFunction, rule: &Arc<AngularRule>) -> Result<SampledFunction> {
    let grid = f.grid();
    if grid != g.grid() {
        return Err(Error::GridMismatch("convolution operands live on different grids".into()));
    }
    let tr = Translator::new(f, rule.clone())?;
    let mu = grid.mu_weights();
    let coef: Vec<Complex64> = g.values().iter().zip(mu).map(|(v, w)| v * w).collect();
    let peak = coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let active: Vec<usize> = (0..coef.len()).filter(|&j| coef[j].norm() > SUPPORT_REL * peak).collect();
    let nodes = grid.nodes();
    let support = tr.off.support;
    // each output sums over j in a fixed order
    let values: Vec<Complex64> = nodes
        .par_iter()
        .map(|&x| {
            let mut acc = ZERO;
            for &j in &active {
                let t = -nodes[j];
                if (t.abs() - x.abs()).abs() > support {
                    continue;
                }
                acc += tr.value(t, x) * coef[j];
            }
            acc
        })
        .collect();
    let parity = match (f.parity(), g.parity()) {
        (Parity::None, _) | (_, Parity::None) => Parity::None,
        (a, b) if a == b => Parity::Even,
        _ => Parity::Odd,
    };
    Ok(SampledFunction::from_values(grid.clone(), values)?.assume_parity(parity))
}

/// Rule for the Bessel translation: `(1 - t^2)^(alpha - 1/2)` scaled by `1/c_alpha`.
#[derive(Debug, Clone)]
pub struct BesselRule {
    alpha: AlphaParameter,
    rule: Rule,
}

impl BesselRule {
    pub fn new(alpha: AlphaParameter, n: usize) -> Self {
        let a = alpha.alpha();
        let mut rule = gauss_jacobi(n, a - 0.5, a - 0.5);
        for w in rule.weights.iter_mut() {
            *w /= alpha.c_alpha();
        }
        Self { alpha, rule }
    }
}

/// `T_y h(x) = (1/c_alpha) int_0^pi h((x, y)_theta) sin^(2 alpha) theta dtheta`
/// for even `h`, evaluated at every node `x` of the grid of `h`.
pub fn bessel_translate(h: &SampledFunction, y: f64, rule: &BesselRule) -> Result<SampledFunction> {
    if h.alpha() != &rule.alpha {
        return domain("alpha mismatch between function and Bessel rule");
    }
    if !(y >= 0.0) {
        return domain(format!("Bessel translation needs y >= 0, got {y}"));
    }
    let scale = h.sup_norm();
    if h.parity_defect(Parity::Even) > crate::measure::PARITY_TOL * scale {
        return domain("Bessel translation needs an even function");
    }
    let grid = h.grid();
    if y > grid.radius() {
        return Err(Error::Range { x: 0.0, y, theta: 0.0, point: y, limit: grid.radius() });
    }
    let off = OffGrid::new(h);
    let values: Vec<Complex64> = grid
        .nodes()
        .par_iter()
        .map(|&x| {
            let d2 = (x - y) * (x - y);
            let mut acc = ZERO;
            for (&t, &w) in rule.rule.nodes.iter().zip(&rule.rule.weights) {
                let rho = (d2 + 2.0 * x * y * (1.0 - t)).max(0.0).sqrt();
                acc += off.eval(rho) * w;
            }
            acc
        })
        .collect();
    Ok(SampledFunction::from_values(grid.clone(), values)?.assume_parity(Parity::Even))
}

/// Grid-level convenience: shared angular rule for a grid.
pub fn angular_rule(grid: &QuadGrid, n: usize) -> Result<Arc<AngularRule>> {
    Ok(Arc::new(AngularRule::new(*grid.alpha(), n)?))
}
