//! Modulus of smoothness, the K-functional estimate, best approximation by
//! band-limited functions and the band-limited mollifier.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::measure::{check_exponent, integrate, lp_distance, lp_norm, Parity, QuadGrid, SampledFunction};
use crate::operator::{k_decomposition_with, KDecomposition};
use crate::special::AlphaParameter;
use crate::transform::{
    bandlimit_from_spectrum, forward_default, inverse_transform, restrict_spectrum, spectrum_tail, Spectrum,
};
use crate::translation::{AngularRule, Translator, DEFAULT_THETA_NODES};

/// Signed samples `t = x k / m` per scale in the sup defining `w`.
pub const DEFAULT_T_SAMPLES: usize = 16;

/// Scales at which smoothness functionals are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSet {
    scales: Vec<f64>,
    t_samples_per_scale: usize,
}

impl ScaleSet {
    pub fn new(scales: Vec<f64>, t_samples_per_scale: usize) -> Result<Self> {
        if scales.is_empty() {
            return domain("scale set is empty");
        }
        if scales.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return domain("scales must be positive and finite");
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return domain("scales must be strictly increasing");
        }
        if t_samples_per_scale < 8 {
            return domain(format!("need at least 8 t-samples per scale, got {t_samples_per_scale}"));
        }
        Ok(Self { scales, t_samples_per_scale })
    }

    /// `count` log-spaced scales from `2^lo` to `2^hi`.
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 || !(hi > lo) {
            return domain(format!("bad log-spaced range 2^{lo}..2^{hi} with {count} points"));
        }
        let step = (hi - lo) / (count - 1) as f64;
        Self::new((0..count).map(|j| (lo + step * j as f64).exp2()).collect(), DEFAULT_T_SAMPLES)
    }

    /// Powers of two `2^lo, ..., 2^hi`.
    pub fn dyadic(lo: i32, hi: i32) -> Result<Self> {
        if hi <= lo {
            return domain(format!("bad dyadic range {lo}..{hi}"));
        }
        Self::new((lo..=hi).map(|j| 2f64.powi(j)).collect(), DEFAULT_T_SAMPLES)
    }

    pub fn with_t_samples(mut self, m: usize) -> Result<Self> {
        if m < 8 {
            return domain(format!("need at least 8 t-samples per scale, got {m}"));
        }
        self.t_samples_per_scale = m;
        Ok(self)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn t_samples_per_scale(&self) -> usize {
        self.t_samples_per_scale
    }
}

impl Default for ScaleSet {
    fn default() -> Self {
        Self::dyadic(-6, 4).expect("valid default")
    }
}

/// Translations of one function cached by the translation parameter.
pub struct Smoothness {
    tr: Translator,
    symmetric: bool,
    cache: Mutex<HashMap<u64, Arc<SampledFunction>>>,
}

impl Smoothness {
    pub fn new(f: &SampledFunction, rule: Arc<AngularRule>) -> Result<Self> {
        Ok(Self { tr: Translator::new(f, rule)?, symmetric: f.parity() != Parity::None, cache: Mutex::default() })
    }

    pub fn function(&self) -> &SampledFunction {
        self.tr.function()
    }

    pub fn translator(&self) -> &Translator {
        &self.tr
    }

    /// `tau_t f - f`.
    pub fn difference(&self, t: f64) -> Result<Arc<SampledFunction>> {
        if let Some(d) = self.cache.lock().expect("cache").get(&t.to_bits()) {
            return Ok(d.clone());
        }
        let d = Arc::new(self.tr.translate(t)?.sub(self.function())?);
        self.cache.lock().expect("cache").insert(t.to_bits(), d.clone());
        Ok(d)
    }

    /// `tau_t f`.
    pub fn translate(&self, t: f64) -> Result<SampledFunction> {
        self.difference(t)?.add(self.function())
    }

    /// `||tau_t f - f||_p`. For even or odd `f`, `tau_{-t} f(y) = +-tau_t f(-y)`,
    /// so only `|t|` is translated.
    pub fn sample(&self, t: f64, p: f64) -> Result<f64> {
        let t = if self.symmetric { t.abs() } else { t };
        lp_norm(&*self.difference(t)?, p)
    }

    fn samples(x: f64, m: usize) -> impl Iterator<Item = f64> {
        (1..=m).flat_map(move |k| {
            let t = x * k as f64 / m as f64;
            [t, -t]
        })
    }

    fn prefetch(&self, ts: &[f64]) -> Result<()> {
        let mut todo: Vec<f64> = ts.iter().map(|&t| if self.symmetric { t.abs() } else { t }).collect();
        {
            let cache = self.cache.lock().expect("cache");
            todo.retain(|t| !cache.contains_key(&t.to_bits()));
        }
        todo.sort_by(f64::total_cmp);
        todo.dedup();
        todo.par_iter().try_for_each(|&t| self.difference(t).map(|_| ()))
    }

    /// `w_{p,alpha}(f, x)` over `{+-x k / m : k = 1..m}`.
    pub fn modulus(&self, x: f64, p: f64, m: usize) -> Result<f64> {
        check_scale(x)?;
        check_exponent(p)?;
        let ts: Vec<f64> = Self::samples(x, m).collect();
        self.prefetch(&ts)?;
        ts.iter().try_fold(0.0f64, |acc, &t| Ok(acc.max(self.sample(t, p)?)))
    }

    /// `w` at every scale, with the sup taken over the samples of all scales
    /// up to the current one so the profile is nondecreasing.
    pub fn profile(&self, scales: &ScaleSet, p: f64) -> Result<Vec<f64>> {
        check_exponent(p)?;
        let m = scales.t_samples_per_scale();
        let ts: Vec<f64> = scales.scales().iter().flat_map(|&x| Self::samples(x, m)).collect();
        self.prefetch(&ts)?;
        let mut running = 0.0f64;
        scales
            .scales()
            .iter()
            .map(|&x| {
                for t in Self::samples(x, m) {
                    running = running.max(self.sample(t, p)?);
                }
                Ok(running)
            })
            .collect()
    }

    /// K-functional estimate at scale `x` reusing the cached `tau_x f`.
    pub fn k_decomposition(&self, x: f64, p: f64) -> Result<KDecomposition> {
        let tau = self.translate(x)?;
        k_decomposition_with(self.function(), x, p, &tau)
    }
}

fn check_scale(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("scale must be positive, got {x}"));
    }
    Ok(())
}

/// `w_{p,alpha}(f, x) = sup_{|t| <= x} ||tau_t f - f||_{p,alpha}` on the default
/// t-samples and angular rule.
pub fn modulus_of_smoothness(f: &SampledFunction, x: f64, p: f64) -> Result<f64> {
    let rule = Arc::new(AngularRule::new(*f.alpha(), DEFAULT_THETA_NODES)?);
    Smoothness::new(f, rule)?.modulus(x, p, DEFAULT_T_SAMPLES)
}

/// Upper estimate of `K_{p,alpha}(f, x)` given by the explicit decomposition.
pub fn k_functional_estimate(f: &SampledFunction, x: f64, p: f64) -> Result<f64> {
    check_scale(x)?;
    check_exponent(p)?;
    let rule = Arc::new(AngularRule::new(*f.alpha(), DEFAULT_THETA_NODES)?);
    Ok(Smoothness::new(f, rule)?.k_decomposition(x, p)?.k_value)
}

/// Even real `phi` with `F_alpha(phi) = eta` supported in `[-1, 1]`.
/// `total_mass` is `F_alpha(phi)(0)`; `spatial_mass` is the integral of the
/// samples over `[-R, R]`, which misses the slowly decaying tail of `phi`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    pub phi: SampledFunction,
    pub freq_profile: Spectrum,
    pub total_mass: f64,
    pub spatial_mass: f64,
}

/// `eta(lambda) = exp(1 - 1 / (1 - lambda^2))` on `(-1, 1)`, zero outside.
pub fn bump(lambda: f64) -> f64 {
    let u = 1.0 - lambda * lambda;
    if u <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / u).exp()
    }
}

/// Nodes of a frequency grid resolving `eta(lambda / t) E(i lambda x)` for
/// `|x| <= r`.
fn bump_nodes(t: f64, r: f64) -> usize {
    64 * ((t * r / 16.0).max(4.0 * t).ceil() as usize).max(4)
}

fn bump_spectrum(alpha: AlphaParameter, t: f64, r: f64) -> Result<Spectrum> {
    let g = QuadGrid::shared(alpha, t, bump_nodes(t, r))?;
    let values = g.nodes().iter().map(|&l| Complex64::new(bump(l / t), 0.0)).collect();
    Spectrum::with_band_limit(g, values, t)
}

/// Builds `phi` frequency-first on `space_grid`.
pub fn make_mollifier(space_grid: &Arc<QuadGrid>) -> Result<Mollifier> {
    let freq_profile = bump_spectrum(*space_grid.alpha(), 1.0, space_grid.radius())?;
    let phi = real_even(inverse_transform(&freq_profile, space_grid)?);
    let total_mass = freq_profile.eval(0.0).re;
    let spatial_mass = integrate(&phi).re;
    Ok(Mollifier { phi, freq_profile, total_mass, spatial_mass })
}

fn real_even(f: SampledFunction) -> SampledFunction {
    let g = f.grid().clone();
    let v = f.values();
    let values = (0..v.len()).map(|i| Complex64::new(0.5 * (v[i].re + v[g.mirror(i)].re), 0.0)).collect();
    SampledFunction::new(g, values, Parity::Even).expect("symmetrized")
}

/// `phi_{1/t}(x) = t^(2 alpha + 2) phi(t x)`, built from `eta(lambda / t)`.
pub fn dilate_mollifier(m: &Mollifier, t: f64) -> Result<SampledFunction> {
    check_scale(t)?;
    if t == 1.0 {
        return Ok(m.phi.clone());
    }
    let s = bump_spectrum(*m.phi.alpha(), t, m.phi.grid().radius())?;
    Ok(real_even(inverse_transform(&s, m.phi.grid())?))
}

/// `f *_alpha phi_{1/t}` through the product rule `F(f * g) = F(f) F(g)`.
pub fn mollify(f: &SampledFunction, t: f64) -> Result<SampledFunction> {
    mollify_spectrum(&forward_default(f)?, t, f)
}

fn mollify_spectrum(spectrum: &Spectrum, t: f64, f: &SampledFunction) -> Result<SampledFunction> {
    check_scale(t)?;
    let r = spectrum.freq_grid().radius();
    let band = if t < r { restrict_spectrum(spectrum, t)? } else { spectrum.clone() };
    let g = band.freq_grid().clone();
    let values = g.nodes().iter().zip(band.values()).map(|(&l, v)| v * bump(l / t)).collect();
    Ok(inverse_transform(&Spectrum::new(g, values)?, f.grid())?.assume_parity(f.parity()))
}

/// `E_{p,alpha}(f, x)` or an upper bound for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestApprox {
    pub value: f64,
    pub upper_bound: bool,
}

/// Smallest `p` for which the sharp projection of a smooth function lies in
/// `L^p(mu_alpha)`: `|P_x f| ~ |y|^-(alpha + 3/2)`.
fn projection_admissible(alpha: &AlphaParameter, p: f64) -> bool {
    let a = alpha.alpha();
    p * (a + 1.5) > 2.0 * a + 2.0
}

/// Best approximation of `f` by functions with spectrum in `[-x, x]`.
/// Exact at `p = 2`; otherwise the smaller of the projection and mollifier
/// candidates.
pub fn best_approx(f: &SampledFunction, x: f64, p: f64) -> Result<BestApprox> {
    best_approx_spectrum(f, &forward_default(f)?, x, p)
}

pub fn best_approx_spectrum(f: &SampledFunction, spectrum: &Spectrum, x: f64, p: f64) -> Result<BestApprox> {
    check_scale(x)?;
    check_exponent(p)?;
    if p == 2.0 {
        return Ok(BestApprox { value: spectrum_tail(spectrum, x), upper_bound: false });
    }
    let mut value = lp_distance(f, &mollify_spectrum(spectrum, x, f)?, p)?;
    if projection_admissible(f.alpha(), p) {
        value = value.min(lp_distance(f, &bandlimit_from_spectrum(spectrum, x, f)?, p)?);
    }
    Ok(BestApprox { value, upper_bound: true })
}

/// `||f - f *_alpha phi_{1/t}||_{p,alpha}`.
pub fn mollifier_defect(f: &SampledFunction, spectrum: &Spectrum, t: f64, p: f64) -> Result<f64> {
    lp_distance(f, &mollify_spectrum(spectrum, t, f)?, p)
}

/// `||tau_{y1} h - tau_{y2} h||_p / (|y1 - y2| ||h'||_p)` for even `h`.
pub fn bernstein_ratio(s: &Smoothness, y1: f64, y2: f64, p: f64) -> Result<f64> {
    if y1 == y2 {
        return domain("Bernstein ratio needs y1 != y2");
    }
    let h = s.function();
    let d = SampledFunction::from_values(h.grid().clone(), h.grid().differentiate(h.values()))?;
    let num = lp_distance(&s.translate(y1)?, &s.translate(y2)?, p)?;
    Ok(num / ((y1 - y2).abs() * lp_norm(&d, p)?))
}

/// `||tau_{y1} g - tau_{y2} g||_p / (x |y1 - y2| ||g||_p)` for `g` with
/// spectrum in `[-x, x]`.
pub fn band_bernstein_ratio(s: &Smoothness, x: f64, y1: f64, y2: f64, p: f64) -> Result<f64> {
    if y1 == y2 {
        return domain("Bernstein ratio needs y1 != y2");
    }
    let num = lp_distance(&s.translate(y1)?, &s.translate(y2)?, p)?;
    Ok(num / (x * (y1 - y2).abs() * lp_norm(s.function(), p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{bandlimit_project, spectral_tail_norm};

    fn grid(a: f64) -> Arc<QuadGrid> {
        QuadGrid::shared(AlphaParameter::new(a).unwrap(), 20.0, 1024).unwrap()
    }

    fn gaussian(g: &Arc<QuadGrid>) -> SampledFunction {
        SampledFunction::from_real(g.clone(), Parity::Even, |x| (-0.5 * x * x).exp()).unwrap()
    }

    #[test]
    fn scale_sets() {
        let d = ScaleSet::default();
        assert_eq!(d.scales().len(), 11);
        assert_eq!(d.scales()[0], 2f64.powi(-6));
        assert!(ScaleSet::new(vec![1.0, 1.0], 16).is_err());
        assert!(ScaleSet::new(vec![1.0, 2.0], 4).is_err());
        let l = ScaleSet::log_spaced(-6.0, 4.0, 17).unwrap();
        assert_eq!(l.scales().len(), 17);
        assert!((l.scales()[16] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn modulus_basics() {
        let g = grid(0.5);
        let rule = Arc::new(AngularRule::new(*g.alpha(), DEFAULT_THETA_NODES).unwrap());
        let c = SampledFunction::from_real(g.clone(), Parity::Even, |_| 3.0).unwrap();
        assert!(Smoothness::new(&c, rule.clone()).unwrap().modulus(1.0, 2.0, 16).unwrap() < 1e-12);
        let f = gaussian(&g);
        let s = Smoothness::new(&f, rule).unwrap();
        let scales = ScaleSet::dyadic(-4, 2).unwrap();
        for p in [1.0, 2.0] {
            let w = s.profile(&scales, p).unwrap();
            assert!(w.windows(2).all(|v| v[0] <= v[1]));
            let norm = lp_norm(&f, p).unwrap();
            assert!(w.iter().all(|&v| v <= 5.0 * norm + 1e-7));
            // smooth f: w(f, x) ~ x at small scales
            assert!((w[1] / w[0] - 2.0).abs() < 0.1, "{w:?}");
        }
    }

    #[test]
    fn mollifier_construction() {
        for a in [0.0, 0.5] {
            let g = grid(a);
            let m = make_mollifier(&g).unwrap();
            assert!((m.total_mass - 1.0).abs() < 1e-12);
            assert!(m.freq_profile.leakage(1.0) == 0.0);
            // truncation of the exp(-sqrt(2|x|)) tail at R = 20
            assert!((m.spatial_mass - 1.0).abs() < 2e-2, "mass {}", m.spatial_mass);
            assert_eq!(m.phi.parity(), Parity::Even);
            assert!(m.phi.values().iter().all(|v| v.im == 0.0));
            assert_eq!(dilate_mollifier(&m, 1.0).unwrap().values(), m.phi.values());
            // phi_{1/t} decays t times faster, so the truncation error shrinks
            let d = dilate_mollifier(&m, 16.0).unwrap();
            assert!((integrate(&d).re - 1.0).abs() < 1e-6, "{}", integrate(&d).re);
            let k = 2.0 * a + 2.0;
            for t in [2.0, 16.0] {
                let d = dilate_mollifier(&m, t).unwrap();
                for (i, &x) in g.nodes().iter().enumerate() {
                    if (t * x).abs() < 19.0 {
                        let direct = t.powf(k) * m.phi.eval(t * x).re;
                        assert!((direct - d.values()[i].re).abs() < 1e-8 * t.powf(k), "x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn mollifier_wide_grid_mass() {
        // on a wide grid the sampled mass approaches F(phi)(0) = 1
        let g = QuadGrid::shared(AlphaParameter::new(0.0).unwrap(), 300.0, 6144).unwrap();
        let m = make_mollifier(&g).unwrap();
        assert!((m.spatial_mass - 1.0).abs() < 1e-7, "{}", m.spatial_mass);
    }

    #[test]
    fn best_approximation() {
        let g = grid(0.5);
        let f = gaussian(&g);
        let e = best_approx(&f, 2.0, 2.0).unwrap();
        assert!(!e.upper_bound);
        assert!((e.value - spectral_tail_norm(&f, 2.0).unwrap()).abs() < 1e-14);
        let mut last = f64::INFINITY;
        for x in [1.0, 2.0, 4.0, 8.0] {
            for p in [1.0, 2.0] {
                let v = best_approx(&f, x, p).unwrap().value;
                assert!(v.is_finite() && v >= 0.0);
            }
            let v = best_approx(&f, x, 1.0).unwrap().value;
            assert!(v <= last * (1.0 + 1e-9));
            last = v;
        }
        let b = bandlimit_project(&f, 7.0).unwrap();
        assert!(best_approx(&b, 7.5, 2.0).unwrap().value < 1e-8);
    }
}
