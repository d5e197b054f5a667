//! Dunkl transform by direct quadrature, its inverse, band-limited projection
//! and spectral tails.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::measure::{QuadGrid, SampledFunction};
use crate::quadrature::{gauss_legendre, Rule};
use crate::special::kernel_parts;

/// Leakage tolerance for a declared band limit, relative to the peak.
pub const BAND_LEAKAGE: f64 = 1e-9;
/// Widest panel used when integrating over frequency sub-intervals.
const SUB_PANEL_WIDTH: f64 = 0.7;
const PLAN_CACHE: usize = 12;

/// Dunkl-transform values on a frequency grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    freq_grid: Arc<QuadGrid>,
    values: Vec<Complex64>,
    band_limit: f64,
}

impl Spectrum {
    pub fn new(freq_grid: Arc<QuadGrid>, values: Vec<Complex64>) -> Result<Self> {
        Self::with_band_limit(freq_grid, values, f64::INFINITY)
    }

    /// Spectrum with a declared band limit; values beyond it must be below
    /// [`BAND_LEAKAGE`] of the peak.
    pub fn with_band_limit(freq_grid: Arc<QuadGrid>, values: Vec<Complex64>, band_limit: f64) -> Result<Self> {
        if values.len() != freq_grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} spectrum values for a grid of {} nodes",
                values.len(),
                freq_grid.len()
            )));
        }
        if !(band_limit > 0.0) {
            return domain(format!("band limit must be positive, got {band_limit}"));
        }
        let s = Self { freq_grid, values, band_limit };
        if band_limit.is_finite() {
            let leak = s.leakage(band_limit);
            let peak = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if leak > BAND_LEAKAGE * peak {
                return domain(format!(
                    "spectrum leaks {leak:e} beyond band limit {band_limit} (peak {peak:e})"
                ));
            }
        }
        Ok(s)
    }

    pub fn freq_grid(&self) -> &Arc<QuadGrid> {
        &self.freq_grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn band_limit(&self) -> f64 {
        self.band_limit
    }

    /// Largest magnitude at frequencies `|lambda| > b`.
    pub fn leakage(&self, b: f64) -> f64 {
        self.freq_grid
            .nodes()
            .iter()
            .zip(&self.values)
            .filter(|(l, _)| l.abs() > b)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Interpolated value at an arbitrary `|lambda| <= R_freq`.
    pub fn eval(&self, lambda: f64) -> Complex64 {
        self.freq_grid.interpolate(&self.values, lambda)
    }

    /// Spectrum as a sampled function on its frequency grid.
    pub fn as_function(&self) -> SampledFunction {
        SampledFunction::from_values(self.freq_grid.clone(), self.values.clone())
            .expect("lengths agree by construction")
    }
}

/// Even/odd kernel parts `A(lambda_j y_k)`, `B(lambda_j y_k)` on the positive
/// half of a frequency grid (rows) and a space grid (columns).
struct Plan {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Plan {
    fn build(alpha: f64, freq_pos: &[f64], space_pos: &[f64]) -> Self {
        let rows = freq_pos.len();
        let cols = space_pos.len();
        let parts: Vec<(Vec<f64>, Vec<f64>)> = freq_pos
            .par_iter()
            .map(|&l| space_pos.iter().map(|&y| kernel_parts(alpha, l * y)).unzip())
            .collect();
        let mut a = Vec::with_capacity(rows * cols);
        let mut b = Vec::with_capacity(rows * cols);
        for (ra, rb) in parts {
            a.extend(ra);
            b.extend(rb);
        }
        Self { rows, cols, a, b }
    }
}

type PlanKey = (u64, u64, usize, u64, usize);

fn grid_key(freq: &QuadGrid, space: &QuadGrid) -> PlanKey {
    (
        freq.alpha().alpha().to_bits(),
        freq.radius().to_bits(),
        freq.len(),
        space.radius().to_bits(),
        space.len(),
    )
}

fn plan_for(freq: &QuadGrid, space: &QuadGrid) -> Arc<Plan> {
    static CACHE: OnceLock<Mutex<VecDeque<(PlanKey, Arc<Plan>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = grid_key(freq, space);
    if let Some((_, p)) = cache.lock().expect("plan cache poisoned").iter().find(|(k, _)| *k == key) {
        return p.clone();
    }
    let plan = Arc::new(Plan::build(
        freq.alpha().alpha(),
        &freq.nodes()[freq.half()..],
        &space.nodes()[space.half()..],
    ));
    let mut guard = cache.lock().expect("plan cache poisoned");
    if guard.len() >= PLAN_CACHE {
        guard.pop_front();
    }
    guard.push_back((key, plan.clone()));
    plan
}

fn check_alpha(a: &QuadGrid, b: &QuadGrid) -> Result<()> {
    if a.alpha() != b.alpha() {
        return domain(format!(
            "alpha mismatch between grids: {} vs {}",
            a.alpha().alpha(),
            b.alpha().alpha()
        ));
    }
    Ok(())
}

/// `(F(lambda_j), F(-lambda_j))` for the positive frequency nodes, given
/// the sums `s_k = mu_k (f(y_k) + f(-y_k))`, `d_k = mu_k (f(y_k) - f(-y_k))`.
fn forward_half(plan: &Plan, s: &[Complex64], d: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    let i = Complex64::new(0.0, 1.0);
    (0..plan.rows)
        .into_par_iter()
        .map(|j| {
            let ra = &plan.a[j * plan.cols..(j + 1) * plan.cols];
            let rb = &plan.b[j * plan.cols..(j + 1) * plan.cols];
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = Complex64::new(0.0, 0.0);
            for k in 0..plan.cols {
                a += s[k] * ra[k];
                b += d[k] * rb[k];
            }
            (a - i * b, a + i * b)
        })
        .collect()
}

/// Values at `(x_k, -x_k)` for the positive space nodes, given
/// `s_j = mu_j (F(l_j) + F(-l_j))`, `d_j = mu_j (F(l_j) - F(-l_j))`.
fn inverse_half(plan: &Plan, s: &[Complex64], d: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    const CHUNK: usize = 64;
    let i = Complex64::new(0.0, 1.0);
    let chunks: Vec<Vec<(Complex64, Complex64)>> = (0..plan.cols.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(plan.cols);
            let mut acc_a = vec![Complex64::new(0.0, 0.0); hi - lo];
            let mut acc_b = vec![Complex64::new(0.0, 0.0); hi - lo];
            for j in 0..plan.rows {
                let ra = &plan.a[j * plan.cols + lo..j * plan.cols + hi];
                let rb = &plan.b[j * plan.cols + lo..j * plan.cols + hi];
                for k in 0..hi - lo {
                    acc_a[k] += s[j] * ra[k];
                    acc_b[k] += d[j] * rb[k];
                }
            }
            acc_a.iter().zip(&acc_b).map(|(&a, &b)| (a + i * b, a - i * b)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

fn symmetric_sums(grid: &QuadGrid, values: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let h = grid.half();
    let mu = grid.mu_weights();
    (h..grid.len())
        .map(|k| {
            let (p, m) = (values[k], values[grid.mirror(k)]);
            ((p + m) * mu[k], (p - m) * mu[k])
        })
        .unzip()
}

fn assemble(grid: &QuadGrid, half: Vec<(Complex64, Complex64)>) -> Vec<Complex64> {
    let h = grid.half();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, (p, m)) in half.into_iter().enumerate() {
        out[h + k] = p;
        out[grid.mirror(h + k)] = m;
    }
    out
}

/// `F_alpha(f)(lambda) = int E_alpha(-i lambda y) f(y) dmu_alpha(y)` at the
/// nodes of `freq_grid`.
pub fn forward_transform(f: &SampledFunction, freq_grid: &Arc<QuadGrid>) -> Result<Spectrum> {
    let space = f.grid();
    check_alpha(space, freq_grid)?;
    let plan = plan_for(freq_grid, space);
    let (s, d) = symmetric_sums(space, f.values());
    let values = assemble(freq_grid, forward_half(&plan, &s, &d));
    Ok(Spectrum { freq_grid: freq_grid.clone(), values, band_limit: f64::INFINITY })
}

/// Forward transform onto a frequency grid with the same radius and size as
/// the space grid.
pub fn forward_default(f: &SampledFunction) -> Result<Spectrum> {
    let g = f.grid().clone();
    forward_transform(f, &g)
}

/// `f(x) = int E_alpha(i lambda x) F(lambda) dmu_alpha(lambda)` at the nodes
/// of `space_grid`.
pub fn inverse_transform(s: &Spectrum, space_grid: &Arc<QuadGrid>) -> Result<SampledFunction> {
    let freq = &s.freq_grid;
    check_alpha(freq, space_grid)?;
    let plan = plan_for(freq, space_grid);
    let (sv, dv) = symmetric_sums(freq, &s.values);
    let values = assemble(space_grid, inverse_half(&plan, &sv, &dv));
    SampledFunction::from_values(space_grid.clone(), values)
}

/// Node count of the frequency grid used to integrate over `[-x, x]`.
fn band_nodes(x: f64) -> usize {
    let per_side = ((x / SUB_PANEL_WIDTH).ceil() as usize).max(2);
    2 * crate::measure::PANEL_ORDER * per_side
}

/// A frequency grid on `[-x, x]` carrying `spectrum` by interpolation.
pub fn restrict_spectrum(spectrum: &Spectrum, x: f64) -> Result<Spectrum> {
    let grid = QuadGrid::shared(*spectrum.freq_grid.alpha(), x, band_nodes(x))?;
    let values = grid.nodes().iter().map(|&l| spectrum.eval(l)).collect();
    Ok(Spectrum { freq_grid: grid, values, band_limit: x })
}

/// Inverse transform of `F_alpha(f) 1_{[-x, x]}`.
pub fn bandlimit_project(f: &SampledFunction, x: f64) -> Result<SampledFunction> {
    if !(x > 0.0) {
        return domain(format!("band radius must be positive, got {x}"));
    }
    let spectrum = forward_default(f)?;
    bandlimit_from_spectrum(&spectrum, x, f)
}

/// Band-limited projection given the spectrum of `f`.
pub fn bandlimit_from_spectrum(spectrum: &Spectrum, x: f64, f: &SampledFunction) -> Result<SampledFunction> {
    let space = f.grid();
    let g = if x >= spectrum.freq_grid.radius() {
        inverse_transform(spectrum, space)?
    } else {
        inverse_transform(&restrict_spectrum(spectrum, x)?, space)?
    };
    Ok(g.assume_parity(f.parity()))
}

/// `(int_{|lambda| > x} |F_alpha f|^2 dmu_alpha)^(1/2)`.
pub fn spectral_tail_norm(f: &SampledFunction, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("tail radius must be positive, got {x}"));
    }
    Ok(spectrum_tail(&forward_default(f)?, x))
}

/// Tail norm of a given spectrum beyond `x`, integrated on panels aligned
/// with `x`.
pub fn spectrum_tail(s: &Spectrum, x: f64) -> f64 {
    let r = s.freq_grid.radius();
    if x >= r {
        return 0.0;
    }
    let alpha = s.freq_grid.alpha();
    let rule = sub_rule();
    let panels = ((r - x) / SUB_PANEL_WIDTH).ceil().max(1.0) as usize;
    let width = (r - x) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = x + width * p as f64;
        let hi = if p + 1 == panels { r } else { lo + width };
        for (l, w) in rule.mapped(lo, hi) {
            let v = s.eval(l).norm_sqr() + s.eval(-l).norm_sqr();
            total += w * alpha.density(l) * v;
        }
    }
    total.sqrt()
}

fn sub_rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(crate::measure::PANEL_ORDER))
}
