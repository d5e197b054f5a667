//! Besov-Dunkl seminorms from the modulus of smoothness (BD), the
//! K-functional (KD) and best approximation (ED), and their comparison.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};
use crate::measure::{lp_norm, QuadGrid, SampledFunction};
use crate::smoothness::{best_approx_spectrum, ScaleSet, Smoothness};
use crate::special::AlphaParameter;
use crate::transform::{forward_default, Spectrum};
use crate::translation::{AngularRule, DEFAULT_THETA_NODES};

/// `(p, q, beta, alpha)`; `q` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub p: f64,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    pub q: f64,
    pub beta: f64,
    pub alpha: f64,
}

fn ser_q<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if q.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*q)
    }
}

fn de_q<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Q {
        Num(f64),
        Text(String),
    }
    match Q::deserialize(d)? {
        Q::Num(v) => Ok(v),
        Q::Text(t) => parse_q(&t).map_err(serde::de::Error::custom),
    }
}

/// Parses `q`, accepting `inf`.
pub fn parse_q(text: &str) -> Result<f64> {
    match text.trim() {
        "inf" | "infinity" | "Inf" | "INF" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| crate::Error::Parse(format!("q = `{t}`: {e}"))),
    }
}

impl BesovParams {
    pub fn new(p: f64, q: f64, beta: f64, alpha: f64) -> Result<Self> {
        let params = Self { p, q, beta, alpha };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return domain(format!("need 1 <= p < inf, got {}", self.p));
        }
        if !(self.q >= 1.0) {
            return domain(format!("need q >= 1, got {}", self.q));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return domain(format!("need beta > 0, got {}", self.beta));
        }
        AlphaParameter::new(self.alpha)?;
        Ok(())
    }

    /// Hypotheses of the `w`/`K` equivalence: none beyond validity.
    pub fn w_k_equivalence(&self) -> bool {
        true
    }

    /// `ED <= c BD` requires `p <= 2`.
    pub fn ed_below_bd(&self) -> bool {
        self.p <= 2.0
    }

    /// `BD <= c (||f|| + ED)` requires `p <= 2`, `q < inf`, `0 < beta < 1`.
    pub fn bd_below_ed(&self) -> bool {
        self.p <= 2.0 && self.q.is_finite() && self.beta < 1.0
    }
}

/// Scale lattices for the three seminorms.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattices {
    /// Truncation of `(0, inf)` for BD and KD.
    pub bd: ScaleSet,
    /// Truncation of `(1, inf)` for ED.
    pub ed: ScaleSet,
    pub theta_nodes: usize,
}

impl Default for Lattices {
    fn default() -> Self {
        Self {
            bd: ScaleSet::log_spaced(-6.0, 4.0, 17).expect("valid"),
            ed: ScaleSet::log_spaced(0.0, 6.0, 13).expect("valid"),
            theta_nodes: DEFAULT_THETA_NODES,
        }
    }
}

/// `(int (g(x))^q dx/x)^(1/q)` by the trapezoid rule in `log x`, or `max g`
/// for `q = inf`.
pub fn log_trapezoid(xs: &[f64], g: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return g.iter().copied().fold(0.0, f64::max);
    }
    let integral: f64 = xs
        .windows(2)
        .zip(g.windows(2))
        .map(|(x, v)| 0.5 * (v[0].powf(q) + v[1].powf(q)) * (x[1] / x[0]).ln())
        .sum();
    integral.powf(1.0 / q)
}

/// `w(f, x) / x^beta` over the BD lattice.
fn bd_integrand(xs: &[f64], w: &[f64], beta: f64) -> Vec<f64> {
    xs.iter().zip(w).map(|(&x, &v)| v / x.powf(beta)).collect()
}

/// `x^beta E(f, x)` over the ED lattice.
fn ed_integrand(xs: &[f64], e: &[f64], beta: f64) -> Vec<f64> {
    xs.iter().zip(e).map(|(&x, &v)| x.powf(beta) * v).collect()
}

fn check_ed_lattice(scales: &ScaleSet) -> Result<()> {
    if scales.scales()[0] < 1.0 {
        return domain("the ED lattice must start at x >= 1");
    }
    Ok(())
}

fn smoothness(f: &SampledFunction, theta_nodes: usize) -> Result<Smoothness> {
    Smoothness::new(f, Arc::new(AngularRule::new(*f.alpha(), theta_nodes)?))
}

fn check_alpha(f: &SampledFunction, params: &BesovParams) -> Result<()> {
    params.validate()?;
    if f.alpha().alpha() != params.alpha {
        return domain(format!("function has alpha {} but params say {}", f.alpha().alpha(), params.alpha));
    }
    Ok(())
}

/// BD seminorm `(int_0^inf (w(f, x) / x^beta)^q dx/x)^(1/q)` on the lattice.
pub fn besov_w_seminorm(f: &SampledFunction, params: &BesovParams, scales: &ScaleSet) -> Result<f64> {
    check_alpha(f, params)?;
    let w = smoothness(f, DEFAULT_THETA_NODES)?.profile(scales, params.p)?;
    Ok(log_trapezoid(scales.scales(), &bd_integrand(scales.scales(), &w, params.beta), params.q))
}

/// KD seminorm with the K-functional estimate in place of `w`.
pub fn besov_k_seminorm(f: &SampledFunction, params: &BesovParams, scales: &ScaleSet) -> Result<f64> {
    check_alpha(f, params)?;
    let s = smoothness(f, DEFAULT_THETA_NODES)?;
    let k = scales.scales().iter().map(|&x| Ok(s.k_decomposition(x, params.p)?.k_value)).collect::<Result<Vec<_>>>()?;
    Ok(log_trapezoid(scales.scales(), &bd_integrand(scales.scales(), &k, params.beta), params.q))
}

/// ED seminorm `(int_1^inf (x^beta E(f, x))^q dx/x)^(1/q)` on the lattice.
pub fn besov_e_seminorm(f: &SampledFunction, params: &BesovParams, scales: &ScaleSet) -> Result<f64> {
    check_alpha(f, params)?;
    check_ed_lattice(scales)?;
    let spectrum = forward_default(f)?;
    let e = scales
        .scales()
        .iter()
        .map(|&x| Ok(best_approx_spectrum(f, &spectrum, x, params.p)?.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_trapezoid(scales.scales(), &ed_integrand(scales.scales(), &e, params.beta), params.q))
}

/// Ceilings against which the report's comparisons are judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ceilings {
    /// Allowed range of `k / w` at every BD scale.
    pub k_over_w: (f64, f64),
    /// `1 / c <= KD / BD <= c`.
    pub kd_bd: f64,
    /// `ED <= c BD`.
    pub ed_bd: f64,
    /// `BD <= c (||f||_p + ED)`.
    pub bd_norm_ed: f64,
}

impl Default for Ceilings {
    fn default() -> Self {
        Self { k_over_w: (0.05, 20.0), kd_bd: 20.0, ed_bd: 20.0, bd_norm_ed: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "not applicable")]
    NotApplicable,
}

impl Verdict {
    fn from(applicable: bool, ok: bool) -> Self {
        match (applicable, ok) {
            (false, _) => Verdict::NotApplicable,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Fail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub x: f64,
    pub w: Option<f64>,
    pub k: Option<f64>,
    pub e: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seminorms {
    pub bd: f64,
    pub kd: f64,
    pub ed: f64,
    pub lp_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    /// `(min, max)` of `k / w` over the BD lattice.
    pub bd_kd: (f64, f64),
    /// `(min, max)` of `E(f, t) / w(f, 1/t)` over the ED lattice.
    pub bd_ed: (f64, f64),
    pub kd_over_bd: f64,
    pub ed_over_bd: f64,
    pub bd_over_norm_ed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub degenerate: bool,
    pub e_upper_bound: bool,
    pub w_k_equivalence: Verdict,
    pub ed_below_bd: Verdict,
    pub bd_below_ed: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMeta {
    pub grid_points: usize,
    pub domain_radius: f64,
    pub theta_nodes: usize,
    pub t_samples_per_scale: usize,
    pub bd_range: (f64, f64),
    pub ed_range: (f64, f64),
    /// BD integrand `w / x^beta` at both ends of its range.
    pub bd_integrand_ends: (f64, f64),
    /// ED integrand `x^beta E` at both ends of its range.
    pub ed_integrand_ends: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub params: BesovParams,
    pub per_scale: Vec<ScaleRow>,
    pub seminorms: Seminorms,
    pub ratios: Ratios,
    pub flags: Flags,
    pub quadrature_meta: QuadratureMeta,
}

impl SeminormReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::Error::Parse(e.to_string()))
    }

    /// Per-scale plot data `x,w,k,e` with empty cells where a column is not
    /// defined.
    pub fn to_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
        let mut out = String::from("x,w,k,e\n");
        for r in &self.per_scale {
            out.push_str(&format!("{:e},{},{},{}\n", r.x, cell(r.w), cell(r.k), cell(r.e)));
        }
        out
    }
}

fn min_max(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

fn is_constant(f: &SampledFunction) -> bool {
    let v = f.values();
    v.iter().all(|u| (u - v[0]).norm() <= 1e-14 * v[0].norm())
}

/// Smoothness functionals of one function on the lattices at one `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleProfiles {
    pub p: f64,
    /// `w(f, x)` on the BD lattice.
    pub w: Vec<f64>,
    /// K-functional estimate on the BD lattice.
    pub k: Vec<f64>,
    /// `E(f, x)` (or its upper bound) on the ED lattice.
    pub e: Vec<f64>,
    /// `w(f, 1/t)` for `t` on the ED lattice.
    pub w_inv: Vec<f64>,
    pub lp_norm: f64,
    pub degenerate: bool,
}

/// Evaluates all per-scale functionals, reusing the translations cached in `s`.
pub fn scale_profiles(s: &Smoothness, spectrum: &Spectrum, p: f64, lattices: &Lattices) -> Result<ScaleProfiles> {
    check_ed_lattice(&lattices.ed)?;
    let f = s.function();
    let bd_x = lattices.bd.scales();
    let ed_x = lattices.ed.scales();
    if is_constant(f) {
        return Ok(ScaleProfiles {
            p,
            w: vec![0.0; bd_x.len()],
            k: vec![0.0; bd_x.len()],
            e: vec![0.0; ed_x.len()],
            w_inv: vec![0.0; ed_x.len()],
            lp_norm: 0.0,
            degenerate: true,
        });
    }
    let w = s.profile(&lattices.bd, p)?;
    let k = bd_x.iter().map(|&x| Ok(s.k_decomposition(x, p)?.k_value)).collect::<Result<Vec<_>>>()?;
    let e = ed_x.iter().map(|&x| Ok(best_approx_spectrum(f, spectrum, x, p)?.value)).collect::<Result<Vec<_>>>()?;
    let inv = ScaleSet::new(ed_x.iter().rev().map(|&t| 1.0 / t).collect(), lattices.bd.t_samples_per_scale())?;
    let mut w_inv = s.profile(&inv, p)?;
    w_inv.reverse();
    Ok(ScaleProfiles { p, w, k, e, w_inv, lp_norm: lp_norm(f, p)?, degenerate: false })
}

/// All three seminorms, per-scale tables, ratios and verdicts.
pub fn equivalence_report(
    f: &SampledFunction,
    params: &BesovParams,
    lattices: &Lattices,
    ceilings: &Ceilings,
) -> Result<SeminormReport> {
    check_alpha(f, params)?;
    let s = smoothness(f, lattices.theta_nodes)?;
    let spectrum = if is_constant(f) { Spectrum::new(f.grid().clone(), f.values().to_vec())? } else { forward_default(f)? };
    let profiles = scale_profiles(&s, &spectrum, params.p, lattices)?;
    report_from_profiles(f.grid(), params, lattices, ceilings, &profiles)
}

/// Assembles a report from precomputed profiles; `params.p` must match.
pub fn report_from_profiles(
    grid: &QuadGrid,
    params: &BesovParams,
    lattices: &Lattices,
    ceilings: &Ceilings,
    profiles: &ScaleProfiles,
) -> Result<SeminormReport> {
    params.validate()?;
    if profiles.p != params.p {
        return domain(format!("profiles computed at p = {} but params say p = {}", profiles.p, params.p));
    }
    let bd_x = lattices.bd.scales();
    let ed_x = lattices.ed.scales();
    let ScaleProfiles { w, k, e, w_inv, lp_norm: norm, degenerate, .. } = profiles;
    let degenerate = *degenerate;
    let norm = *norm;

    let bd_g = bd_integrand(bd_x, w, params.beta);
    let kd_g = bd_integrand(bd_x, k, params.beta);
    let ed_g = ed_integrand(ed_x, e, params.beta);
    let bd = log_trapezoid(bd_x, &bd_g, params.q);
    let kd = log_trapezoid(bd_x, &kd_g, params.q);
    let ed = log_trapezoid(ed_x, &ed_g, params.q);

    let mut per_scale: Vec<ScaleRow> =
        bd_x.iter().enumerate().map(|(i, &x)| ScaleRow { x, w: Some(w[i]), k: Some(k[i]), e: None }).collect();
    for (j, &x) in ed_x.iter().enumerate() {
        match per_scale.iter_mut().find(|r| (r.x - x).abs() <= 1e-12 * x) {
            Some(r) => r.e = Some(e[j]),
            None => per_scale.push(ScaleRow { x, w: None, k: None, e: Some(e[j]) }),
        }
    }
    per_scale.sort_by(|a, b| a.x.total_cmp(&b.x));

    let ratios = if degenerate {
        Ratios { bd_kd: (0.0, 0.0), bd_ed: (0.0, 0.0), kd_over_bd: 0.0, ed_over_bd: 0.0, bd_over_norm_ed: 0.0 }
    } else {
        Ratios {
            bd_kd: min_max(k.iter().zip(w).map(|(&k, &w)| ratio(k, w))),
            bd_ed: min_max(e.iter().zip(w_inv).map(|(&e, &w)| ratio(e, w))),
            kd_over_bd: ratio(kd, bd),
            ed_over_bd: ratio(ed, bd),
            bd_over_norm_ed: ratio(bd, norm + ed),
        }
    };

    let live = !degenerate;
    let (lo, hi) = ceilings.k_over_w;
    let t1 = ratios.bd_kd.0 >= lo
        && ratios.bd_kd.1 <= hi
        && ratios.kd_over_bd <= ceilings.kd_bd
        && ratios.kd_over_bd >= 1.0 / ceilings.kd_bd;
    let flags = Flags {
        degenerate,
        e_upper_bound: params.p != 2.0,
        w_k_equivalence: Verdict::from(live && params.w_k_equivalence(), t1),
        ed_below_bd: Verdict::from(live && params.ed_below_bd(), ratios.ed_over_bd <= ceilings.ed_bd),
        bd_below_ed: Verdict::from(live && params.bd_below_ed(), ratios.bd_over_norm_ed <= ceilings.bd_norm_ed),
    };

    let quadrature_meta = QuadratureMeta {
        grid_points: grid.len(),
        domain_radius: grid.radius(),
        theta_nodes: lattices.theta_nodes,
        t_samples_per_scale: lattices.bd.t_samples_per_scale(),
        bd_range: (bd_x[0], bd_x[bd_x.len() - 1]),
        ed_range: (ed_x[0], ed_x[ed_x.len() - 1]),
        bd_integrand_ends: (bd_g[0], bd_g[bd_g.len() - 1]),
        ed_integrand_ends: (ed_g[0], ed_g[ed_g.len() - 1]),
    };
    Ok(SeminormReport {
        params: *params,
        per_scale,
        seminorms: Seminorms { bd, kd, ed, lp_norm: norm },
        ratios,
        flags,
        quadrature_meta,
    })
}

/// `a / b`, with `0 / 0 = 0`.
pub fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::measure::QuadGrid;
    use num_complex::Complex64;

    #[test]
    fn trapezoid() {
        // int_1^e (1)^q dx/x = 1
        let xs: Vec<f64> = (0..=100).map(|i| (i as f64 / 100.0).exp()).collect();
        let g = vec![1.0; xs.len()];
        assert!((log_trapezoid(&xs, &g, 2.0) - 1.0).abs() < 1e-14);
        let g: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        // int_0^1 u^2 du = 1/3
        assert!((log_trapezoid(&xs, &g, 2.0).powi(2) - 1.0 / 3.0).abs() < 1e-4);
        assert_eq!(log_trapezoid(&xs, &g, f64::INFINITY), 1.0);
    }

    #[test]
    fn params() {
        assert!(BesovParams::new(0.5, 2.0, 0.5, 0.0).is_err());
        assert!(BesovParams::new(2.0, 2.0, 0.0, 0.0).is_err());
        assert!(BesovParams::new(2.0, 2.0, 0.5, -0.6).is_err());
        let p = BesovParams::new(2.0, f64::INFINITY, 0.5, 0.5).unwrap();
        let j = serde_json::to_string(&p).unwrap();
        assert!(j.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<BesovParams>(&j).unwrap(), p);
        assert!(!BesovParams::new(2.0, 2.0, 1.5, 0.5).unwrap().bd_below_ed());
        assert!(!p.bd_below_ed());
        assert!(!BesovParams::new(3.0, 2.0, 0.5, 0.5).unwrap().ed_below_bd());
    }

    #[test]
    fn report_gaussian_and_constant() {
        let g = QuadGrid::shared(AlphaParameter::new(0.5).unwrap(), 20.0, 1024).unwrap();
        let lat = Lattices::default();
        let params = BesovParams::new(2.0, 2.0, 0.5, 0.5).unwrap();
        let f = lookup("gaussian").unwrap().sample(&g).unwrap();
        let r = equivalence_report(&f, &params, &lat, &Ceilings::default()).unwrap();
        assert_eq!(r.flags.w_k_equivalence, Verdict::Pass, "{:?}", r.ratios);
        assert_eq!(r.flags.ed_below_bd, Verdict::Pass, "{:?}", r.ratios);
        assert_eq!(r.flags.bd_below_ed, Verdict::Pass, "{:?}", r.ratios);
        assert!(r.seminorms.bd > 0.0 && r.seminorms.kd > 0.0 && r.seminorms.ed > 0.0);

        // homogeneity and reflection
        let f3 = f.scale(Complex64::new(-3.0, 0.0));
        let b1 = besov_w_seminorm(&f, &params, &lat.bd).unwrap();
        let b3 = besov_w_seminorm(&f3, &params, &lat.bd).unwrap();
        assert!((b3 - 3.0 * b1).abs() < 1e-10 * b3);
        assert!((b1 - r.seminorms.bd).abs() < 1e-12 * b1);
        let bump = lookup("bump").unwrap().sample(&g).unwrap();
        let e1 = besov_e_seminorm(&bump, &params, &lat.ed).unwrap();
        let e2 = besov_e_seminorm(&bump.reflect(), &params, &lat.ed).unwrap();
        assert!((e1 - e2).abs() < 1e-9 * e1);

        let c = lookup("constant").unwrap().sample(&g).unwrap();
        let r = equivalence_report(&c, &params, &lat, &Ceilings::default()).unwrap();
        assert!(r.flags.degenerate);
        assert_eq!((r.seminorms.bd, r.seminorms.kd, r.seminorms.ed), (0.0, 0.0, 0.0));
        assert_eq!(r.flags.w_k_equivalence, Verdict::NotApplicable);

        let beta = BesovParams::new(2.0, 2.0, 1.5, 0.5).unwrap();
        let r = equivalence_report(&f, &beta, &lat, &Ceilings::default()).unwrap();
        assert_eq!(r.flags.bd_below_ed, Verdict::NotApplicable);
        let json = r.to_json().unwrap();
        assert!(json.contains("\"per_scale\"") && json.contains("\"not applicable\""));
        assert!(r.to_csv().starts_with("x,w,k,e\n"));
    }
}
