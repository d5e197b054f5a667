//! Verification suites: every check compares an observed quantity with a
//! ceiling taken from a versioned profile.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::besov::{parse_q, ratio, report_from_profiles, scale_profiles, BesovParams, Ceilings, Lattices, ScaleProfiles};
use crate::catalog::{catalog, CatalogEntry};
use crate::error::{Error, Result};
use crate::measure::{lp_norm, Parity, QuadGrid, SampledFunction};
use crate::operator::{apply_dunkl_operator, closed_form_defect, reconstruction_defect, taylor_remainder_check, theta_mass};
use crate::smoothness::{
    band_bernstein_ratio, bernstein_ratio, mollifier_defect, ScaleSet, Smoothness,
};
use crate::special::{dunkl_kernel, AlphaParameter};
use crate::transform::{bandlimit_project, forward_default, forward_transform, inverse_transform, Spectrum};
use crate::translation::{convolve, kernel_W, translate_angular, translate_kernel, translate_spectral, AngularRule, KernelRule};

pub const DEFAULT_PROFILE: &str = include_str!("../profiles/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Suite {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::S1, Suite::S2, Suite::S3, Suite::S4, Suite::S5, Suite::S6];

    pub fn name(self) -> &'static str {
        match self {
            Suite::S1 => "S1 kernel and transform",
            Suite::S2 => "S2 translation",
            Suite::S3 => "S3 convolution",
            Suite::S4 => "S4 Taylor, Theta and K-functional",
            Suite::S5 => "S5 Bernstein inequalities",
            Suite::S6 => "S6 Besov-Dunkl seminorms",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|s| format!("{s:?}").eq_ignore_ascii_case(text.trim()))
            .ok_or_else(|| Error::Usage(format!("unknown suite `{text}` (expected S1..S6)")))
    }
}

/// `(id, suite, anchor, acceptance criterion)`.
pub const CHECKS: &[(&str, Suite, &str, u8)] = &[
    ("s1.kernel_bound", Suite::S1, "|E_alpha(-ixy)| <= 1", 1),
    ("s1.plancherel", Suite::S1, "||F_alpha f||_{2,alpha} = ||f||_{2,alpha}", 2),
    ("s1.inversion", Suite::S1, "f(x) = int E_alpha(i lambda x) F_alpha(f)(lambda) dmu_alpha(lambda)", 3),
    ("s1.gaussian_fixed_point", Suite::S1, "F_alpha(e^{-x^2/2})(lambda) = e^{-lambda^2/2}", 4),
    ("s2.tau_zero", Suite::S2, "tau_0 f = f", 5),
    ("s2.symmetry", Suite::S2, "tau_x f(y) = tau_y f(x)", 5),
    ("s2.boundedness", Suite::S2, "||tau_x f||_{p,alpha} <= 4 ||f||_{p,alpha}", 5),
    ("s2.multiplier", Suite::S2, "F_alpha(tau_x f)(lambda) = E_alpha(i lambda x) F_alpha(f)(lambda)", 5),
    ("s2.kernel_vs_angular", Suite::S2, "tau_x f(y) = int f(z) dgamma_{x,y}(z)", 6),
    ("s2.kernel_abs_mass", Suite::S2, "int |W_alpha(x,y,z)| dmu_alpha(z) <= 4", 6),
    ("s2.kernel_scaling", Suite::S2, "W_alpha(xy,xz,xt) x^{2(alpha+1)} = W_alpha(y,z,t)", 6),
    ("s3.commutativity", Suite::S3, "f *_alpha g = g *_alpha f", 7),
    ("s3.young_111", Suite::S3, "||f *_alpha g||_{1,alpha} <= 4 ||f||_{1,alpha} ||g||_{1,alpha}", 7),
    ("s3.young_122", Suite::S3, "||f *_alpha g||_{2,alpha} <= 4 ||f||_{1,alpha} ||g||_{2,alpha}", 7),
    ("s3.young_212", Suite::S3, "||f *_alpha g||_{2,alpha} <= 4 ||f||_{2,alpha} ||g||_{1,alpha}", 7),
    ("s3.transform_product", Suite::S3, "F_alpha(f *_alpha g) = F_alpha(f) F_alpha(g)", 7),
    ("s3.translation_exchange", Suite::S3, "tau_x(f *_alpha g) = tau_x(f) *_alpha g", 7),
    ("s4.taylor_identity", Suite::S4, "tau_x f - f = int_{-x}^{x} Theta(x,z) tau_z(Lambda_alpha f) |z|^{2alpha+1} dz", 8),
    ("s4.theta_mass", Suite::S4, "int_{-x}^{x} Theta(x,z) dmu_alpha(z) = x / (2^{alpha+2} Gamma(alpha+2))", 9),
    ("s4.k_over_w", Suite::S4, "K_{p,alpha}(f,x) <= c w_{p,alpha}(f,x)", 10),
    ("s4.w_over_k", Suite::S4, "w_{p,alpha}(f,x) <= c K_{p,alpha}(f,x)", 10),
    ("s4.reconstruction", Suite::S4, "f = f_0 + 2^{alpha+2} Gamma(alpha+2) f_1", 10),
    ("s4.closed_form", Suite::S4, "Lambda_alpha(2^{alpha+2} Gamma(alpha+2) f_1) = 2(alpha+1) (tau_x f - f) / x", 10),
    ("s4.operator_parity", Suite::S4, "Lambda_alpha maps even functions to odd ones and odd to even", 10),
    ("s5.derivative_bound", Suite::S5, "||tau_{y1} h - tau_{y2} h||_{p,alpha} <= c |y1 - y2| ||h'||_{p,alpha}", 11),
    ("s5.derivative_halving", Suite::S5, "||tau_{y1} h - tau_{y2} h||_{p,alpha} <= c |y1 - y2| ||h'||_{p,alpha}", 11),
    ("s5.band_bound", Suite::S5, "||tau_{y1} g - tau_{y2} g||_{p,alpha} <= c x |y1 - y2| ||g||_{p,alpha}", 11),
    ("s5.band_halving", Suite::S5, "||tau_{y1} g - tau_{y2} g||_{p,alpha} <= c x |y1 - y2| ||g||_{p,alpha}", 11),
    ("s6.kd_bd", Suite::S6, "BD^{beta,alpha}_{p,q} = KD^{beta,alpha}_{p,q}", 10),
    ("s6.ed_bd", Suite::S6, "int_1^inf (t^beta E_{p,alpha}(f,t))^q dt/t <= c int_0^inf (w_{p,alpha}(f,t) / t^beta)^q dt/t", 12),
    ("s6.mollifier_defect", Suite::S6, "||f - f *_alpha phi_{1/t}||_{p,alpha} <= c w_{p,alpha}(f, 1/t)", 12),
    ("s6.bd_norm_ed", Suite::S6, "(int_0^inf (t^{-beta} w_{p,alpha}(f,t))^q dt/t)^{1/q} <= c (||f||_p + (int_1^inf (t^beta E_{p,alpha}(f,t))^q dt/t)^{1/q})", 13),
    ("s6.e_monotone", Suite::S6, "E_{p,alpha}(f,t) is decreasing in t", 13),
    ("s6.w_doubling", Suite::S6, "w_{p,alpha}(f,x) = sup_{|t| <= x} ||tau_t f - f||_{p,alpha}", 10),
];

/// Acceptance criterion a check belongs to.
pub fn criterion(id: &str) -> Option<u8> {
    CHECKS.iter().find(|c| c.0 == id).map(|c| c.3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub grid_points: usize,
    pub domain_radius: f64,
    pub theta_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    pub bd: LogRange,
    pub ed: LogRange,
    pub t_samples_per_scale: usize,
    /// Largest scale of the per-scale K/w sandwich.
    pub sandwich_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub kernel_evaluations: usize,
    pub kernel_argument_max: f64,
    pub translation_points: Vec<f64>,
    pub symmetry_points: usize,
    pub kernel_pairs: usize,
    pub bernstein_pairs: usize,
    pub bernstein_y_max: f64,
    pub taylor_points: Vec<f64>,
    pub theta_alphas: Vec<f64>,
    pub theta_points: Vec<f64>,
    pub band_radii: Vec<f64>,
    pub mollifier_scales: Vec<f64>,
    pub reverse_q: Vec<f64>,
    pub reverse_beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum QEntry {
    Num(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    seed: u64,
    alpha_set: Vec<f64>,
    p_set: Vec<f64>,
    q_set: Vec<QEntry>,
    beta_set: Vec<f64>,
    grid: GridConfig,
    scales: ScaleConfig,
    samples: Samples,
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyProfile {
    pub seed: u64,
    pub alpha_set: Vec<f64>,
    pub p_set: Vec<f64>,
    pub q_set: Vec<f64>,
    pub beta_set: Vec<f64>,
    pub grid: GridConfig,
    pub scales: ScaleConfig,
    pub samples: Samples,
    pub tolerances: BTreeMap<String, f64>,
    /// SHA-256 of the canonical JSON form of the profile.
    pub hash: String,
}

impl VerifyProfile {
    pub fn from_toml(text: &str) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| Error::Parse(format!("profile: {e}")))?;
        let canonical = serde_json::to_string(&value).map_err(|e| Error::Parse(e.to_string()))?;
        let hash = Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        let raw: RawProfile = value.try_into().map_err(|e: toml::de::Error| Error::Parse(format!("profile: {e}")))?;
        let q_set = raw
            .q_set
            .iter()
            .map(|q| match q {
                QEntry::Num(v) => Ok(*v),
                QEntry::Text(t) => parse_q(t),
            })
            .collect::<Result<Vec<_>>>()?;
        let profile = Self {
            seed: raw.seed,
            alpha_set: raw.alpha_set,
            p_set: raw.p_set,
            q_set,
            beta_set: raw.beta_set,
            grid: raw.grid,
            scales: raw.scales,
            samples: raw.samples,
            tolerances: raw.tolerances,
            hash,
        };
        profile.validate().map_err(|e| match e {
            Error::Usage(_) => e,
            other => Error::Usage(format!("profile: {other}")),
        })?;
        Ok(profile)
    }

    pub fn default_profile() -> Self {
        Self::from_toml(DEFAULT_PROFILE).expect("the bundled profile is valid")
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Usage(format!("profile: {m}")));
        if self.alpha_set.is_empty() {
            return bad("alpha_set is empty".into());
        }
        for &a in self.alpha_set.iter().chain(&self.samples.theta_alphas) {
            AlphaParameter::new(a)?;
        }
        for &p in &self.p_set {
            if !(p >= 1.0 && p.is_finite()) {
                return bad(format!("p = {p} outside [1, inf)"));
            }
        }
        for &q in self.q_set.iter().chain(&self.samples.reverse_q) {
            if !(q >= 1.0) {
                return bad(format!("q = {q} below 1"));
            }
        }
        for &b in self.beta_set.iter().chain(&self.samples.reverse_beta) {
            if !(b > 0.0 && b.is_finite()) {
                return bad(format!("beta = {b} must be positive"));
            }
        }
        QuadGrid::new(AlphaParameter::new(0.0)?, self.grid.domain_radius, self.grid.grid_points)?;
        if self.grid.theta_nodes < 2 {
            return bad("theta_nodes must be at least 2".into());
        }
        self.lattices()?;
        for id in self.tolerances.keys() {
            if criterion(id).is_none() {
                return bad(format!("unknown check id `{id}`"));
            }
        }
        for (id, ..) in CHECKS {
            match self.tolerances.get(*id) {
                None => return bad(format!("no ceiling for check `{id}`")),
                Some(c) if !(*c >= 0.0) => return bad(format!("ceiling of `{id}` must be nonnegative")),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn lattices(&self) -> Result<Lattices> {
        let s = &self.scales;
        Ok(Lattices {
            bd: ScaleSet::log_spaced(s.bd.lo, s.bd.hi, s.bd.count)?.with_t_samples(s.t_samples_per_scale)?,
            ed: ScaleSet::log_spaced(s.ed.lo, s.ed.hi, s.ed.count)?.with_t_samples(s.t_samples_per_scale)?,
            theta_nodes: self.grid.theta_nodes,
        })
    }

    fn ceiling(&self, id: &str) -> f64 {
        self.tolerances[id]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub anchor: String,
    pub observed: Option<f64>,
    pub ceiling: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub profile_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Seconds since the Unix epoch; the only nondeterministic field.
    pub timestamp: u64,
    pub profile_hash: String,
    pub pass: bool,
    pub failing: Vec<String>,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// JSON with the timestamp zeroed, for determinism comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.timestamp = 0;
        r.to_json()
    }

    pub fn checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.suites.iter().flat_map(|s| s.checks.iter())
    }
}

struct Entry {
    entry: CatalogEntry,
    f: SampledFunction,
    spectrum: Spectrum,
    smooth: Smoothness,
    profiles: Mutex<BTreeMap<u64, Arc<ScaleProfiles>>>,
}

impl Entry {
    fn named(&self, name: &str) -> bool {
        self.entry.name == name
    }
}

struct Context {
    alpha: AlphaParameter,
    grid: Arc<QuadGrid>,
    rule: Arc<AngularRule>,
    entries: Vec<Entry>,
}

/// Running state of one verification run.
pub struct Harness {
    profile: VerifyProfile,
    lattices: Lattices,
    contexts: Vec<OnceLock<Arc<Context>>>,
}

/// Accumulates the worst observation of one check.
struct Worst(Option<f64>);

impl Worst {
    fn new() -> Self {
        Worst(None)
    }

    fn add(&mut self, v: f64) {
        self.0 = Some(match self.0 {
            _ if v.is_nan() => f64::NAN,
            Some(w) if w.is_nan() => w,
            Some(w) => w.max(v),
            None => v,
        });
    }
}

impl Harness {
    pub fn new(profile: VerifyProfile) -> Result<Self> {
        let lattices = profile.lattices()?;
        let contexts = profile.alpha_set.iter().map(|_| OnceLock::new()).collect();
        Ok(Self { profile, lattices, contexts })
    }

    pub fn profile(&self) -> &VerifyProfile {
        &self.profile
    }

    fn context(&self, i: usize) -> Result<Arc<Context>> {
        if let Some(c) = self.contexts[i].get() {
            return Ok(c.clone());
        }
        let alpha = AlphaParameter::new(self.profile.alpha_set[i])?;
        let g = &self.profile.grid;
        let grid = QuadGrid::shared(alpha, g.domain_radius, g.grid_points)?;
        let rule = Arc::new(AngularRule::new(alpha, g.theta_nodes)?);
        let entries = catalog()
            .into_iter()
            .map(|entry| {
                let f = entry.sample(&grid)?;
                let spectrum = forward_default(&f)?;
                let smooth = Smoothness::new(&f, rule.clone())?;
                Ok(Entry { entry, f, spectrum, smooth, profiles: Mutex::default() })
            })
            .collect::<Result<Vec<_>>>()?;
        let ctx = Arc::new(Context { alpha, grid, rule, entries });
        Ok(self.contexts[i].get_or_init(|| ctx).clone())
    }

    fn contexts(&self) -> Result<Vec<Arc<Context>>> {
        (0..self.contexts.len()).map(|i| self.context(i)).collect()
    }

    fn profiles(&self, e: &Entry, p: f64) -> Result<Arc<ScaleProfiles>> {
        if let Some(v) = e.profiles.lock().expect("profiles").get(&p.to_bits()) {
            return Ok(v.clone());
        }
        let v = Arc::new(scale_profiles(&e.smooth, &e.spectrum, p, &self.lattices)?);
        e.profiles.lock().expect("profiles").insert(p.to_bits(), v.clone());
        Ok(v)
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.profile.seed ^ (suite as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn finish(&self, suite: Suite, observed: BTreeMap<&'static str, Worst>) -> SuiteReport {
        let checks = CHECKS
            .iter()
            .filter(|c| c.1 == suite)
            .map(|&(id, _, anchor, _)| {
                let ceiling = self.profile.ceiling(id);
                let obs = observed.get(id).and_then(|w| w.0);
                let pass = match obs {
                    Some(v) => v <= ceiling,
                    None => true,
                };
                CheckResult { id: id.into(), anchor: anchor.into(), observed: obs, ceiling, pass }
            })
            .collect();
        SuiteReport { suite: suite.name().into(), checks, profile_hash: self.profile.hash.clone() }
    }

    pub fn run_suite(&self, suite: Suite) -> Result<SuiteReport> {
        let observed = match suite {
            Suite::S1 => self.s1()?,
            Suite::S2 => self.s2()?,
            Suite::S3 => self.s3()?,
            Suite::S4 => self.s4()?,
            Suite::S5 => self.s5()?,
            Suite::S6 => self.s6()?,
        };
        Ok(self.finish(suite, observed))
    }

    fn s1(&self) -> Result<BTreeMap<&'static str, Worst>> {
        let mut out = BTreeMap::new();
        let mut rng = self.rng(Suite::S1);
        let s = &self.profile.samples;
        let mut bound = Worst::new();
        let alphas: Vec<AlphaParameter> =
            self.profile.alpha_set.iter().map(|&a| AlphaParameter::new(a)).collect::<Result<_>>()?;
        for i in 0..s.kernel_evaluations {
            let a = &alphas[i % alphas.len()];
            let x = rng.gen_range(-s.kernel_argument_max..=s.kernel_argument_max);
            let y = rng.gen_range(-s.kernel_argument_max..=s.kernel_argument_max);
            bound.add((dunkl_kernel(a, x, y).norm() - 1.0).max(0.0));
        }
        out.insert("s1.kernel_bound", bound);

        let (mut planch, mut inv, mut fixed) = (Worst::new(), Worst::new(), Worst::new());
        for ctx in self.contexts()? {
            for e in &ctx.entries {
                let n2 = lp_norm(&e.f, 2.0)?;
                planch.add((lp_norm(&e.spectrum.as_function(), 2.0)? / n2 - 1.0).abs());
                let back = inverse_transform(&e.spectrum, &ctx.grid)?;
                inv.add(back.sup_distance(&e.f)? / e.f.sup_norm());
            }
            let gauss = ctx.entries.iter().find(|e| e.named("gaussian")).expect("catalog has a gaussian");
            let closed = gauss
                .spectrum
                .values()
                .iter()
                .zip(ctx.grid.nodes())
                .map(|(v, &l)| (v - (-0.5 * l * l).exp()).norm())
                .fold(0.0, f64::max);
            // independent oracle: the same transform from a 4x finer space grid
            let fine = QuadGrid::shared(ctx.alpha, ctx.grid.radius(), 4 * ctx.grid.len())?;
            let gf = SampledFunction::from_real(fine, Parity::Even, |x| (-0.5 * x * x).exp())?;
            let oracle = forward_transform(&gf, &ctx.grid)?;
            let fine_err =
                gauss.spectrum.values().iter().zip(oracle.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            fixed.add(closed.max(fine_err));
        }
        out.insert("s1.plancherel", planch);
        out.insert("s1.inversion", inv);
        out.insert("s1.gaussian_fixed_point", fixed);
        Ok(out)
    }

    fn s2(&self) -> Result<BTreeMap<&'static str, Worst>> {
        let mut out = BTreeMap::new();
        let mut rng = self.rng(Suite::S2);
        let s = &self.profile.samples;
        let (mut zero, mut sym, mut bounded, mut mult, mut cross, mut mass, mut scaling) =
            (Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new());
        for ctx in self.contexts()? {
            let krule = KernelRule::new(ctx.alpha, self.profile.grid.theta_nodes);
            let nodes = ctx.grid.nodes();
            let near: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].abs() <= 6.0).collect();
            for e in &ctx.entries {
                let f = &e.f;
                let sup = f.sup_norm();
                zero.add(translate_angular(f, 0.0, &ctx.rule)?.sup_distance(f)?);

                let picks: Vec<usize> = (0..s.symmetry_points).map(|_| near[rng.gen_range(0..near.len())]).collect();
                let tr: Vec<SampledFunction> =
                    picks.iter().map(|&i| translate_spectral(f, nodes[i])).collect::<Result<_>>()?;
                for a in 0..picks.len() {
                    for b in a + 1..picks.len() {
                        let d = tr[a].values()[picks[b]] - tr[b].values()[picks[a]];
                        sym.add(d.norm() / sup);
                    }
                }

                let n1 = lp_norm(f, 1.0)?;
                for &x in &s.translation_points {
                    for sign in [1.0, -1.0] {
                        let t = e.smooth.translate(sign * x)?;
                        for &p in &self.profile.p_set {
                            bounded.add(lp_norm(&t, p)? / lp_norm(f, p)?);
                        }
                    }
                    let t = e.smooth.translate(x)?;
                    let ft = forward_default(&t)?;
                    let d = ft
                        .values()
                        .iter()
                        .zip(e.spectrum.values())
                        .zip(ctx.grid.nodes())
                        .map(|((u, v), &l)| (u - dunkl_kernel(&ctx.alpha, l, x).conj() * v).norm())
                        .fold(0.0, f64::max);
                    mult.add(d / n1);
                    cross.add(translate_kernel(f, x, &krule)?.sup_distance(&t)?);
                }
            }
            for _ in 0..s.kernel_pairs {
                let x = rng.gen_range(-10.0..10.0);
                let y = rng.gen_range(-10.0..10.0);
                mass.add(krule.abs_mass(x, y));
                let (lo, hi) = ((x.abs() - y.abs()).abs(), x.abs() + y.abs());
                let z = (lo + (hi - lo) * rng.gen_range(0.05..0.95)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let lam: f64 = rng.gen_range(0.1..10.0);
                let w = kernel_W(&ctx.alpha, x, y, z);
                let scaled = kernel_W(&ctx.alpha, lam * x, lam * y, lam * z) * lam.powf(2.0 * (ctx.alpha.alpha() + 1.0));
                if w != 0.0 {
                    scaling.add(((scaled - w) / w).abs());
                }
            }
        }
        out.insert("s2.tau_zero", zero);
        out.insert("s2.symmetry", sym);
        out.insert("s2.boundedness", bounded);
        out.insert("s2.multiplier", mult);
        out.insert("s2.kernel_vs_angular", cross);
        out.insert("s2.kernel_abs_mass", mass);
        out.insert("s2.kernel_scaling", scaling);
        Ok(out)
    }

    fn s3(&self) -> Result<BTreeMap<&'static str, Worst>> {
        let mut out = BTreeMap::new();
        let (mut comm, mut y111, mut y122, mut y212, mut prod, mut exch) =
            (Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new());
        let x = self.profile.samples.translation_points.iter().copied().fold(0.0, f64::max);
        for ctx in self.contexts()? {
            let ef = ctx.entries.iter().find(|e| e.named("gaussian")).expect("gaussian");
            let eg = ctx.entries.iter().find(|e| e.named("bump")).expect("bump");
            let (f, g) = (&ef.f, &eg.f);
            let fg = convolve(f, g, &ctx.rule)?;
            let gf = convolve(g, f, &ctx.rule)?;
            let sup = fg.sup_norm();
            comm.add(fg.sup_distance(&gf)? / sup);
            let n = |h: &SampledFunction, p: f64| lp_norm(h, p);
            y111.add(n(&fg, 1.0)? / (n(f, 1.0)? * n(g, 1.0)?));
            y122.add(n(&fg, 2.0)? / (n(f, 1.0)? * n(g, 2.0)?));
            y212.add(n(&fg, 2.0)? / (n(f, 2.0)? * n(g, 1.0)?));
            let s = forward_default(&fg)?;
            let expect: Vec<Complex64> =
                ef.spectrum.values().iter().zip(eg.spectrum.values()).map(|(a, b)| a * b).collect();
            let peak = expect.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let d = s.values().iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prod.add(d / peak);
            let lhs = translate_angular(&fg, x, &ctx.rule)?;
            let rhs = convolve(&ef.smooth.translate(x)?, g, &ctx.rule)?;
            exch.add(lhs.sup_distance(&rhs)? / sup);
        }
        out.insert("s3.commutativity", comm);
        out.insert("s3.young_111", y111);
        out.insert("s3.young_122", y122);
        out.insert("s3.young_212", y212);
        out.insert("s3.transform_product", prod);
        out.insert("s3.translation_exchange", exch);
        Ok(out)
    }

    fn s4(&self) -> Result<BTreeMap<&'static str, Worst>> {
        let mut out = BTreeMap::new();
        let s = &self.profile.samples;
        let (mut taylor, mut theta, mut kw, mut wk, mut recon, mut closed, mut parity) =
            (Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new());
        for &a in &s.theta_alphas {
            let alpha = AlphaParameter::new(a)?;
            for &x in &s.theta_points {
                let exact = x / (2f64.powf(a + 2.0) * crate::special::gamma(a + 2.0)?);
                theta.add((theta_mass(&alpha, x)? - exact).abs() / exact);
            }
        }
        let bd = self.lattices.bd.scales();
        for ctx in self.contexts()? {
            for e in &ctx.entries {
                let f = &e.f;
                let sup = f.sup_norm();
                for &x in &s.taylor_points {
                    let t = taylor_remainder_check(f, x, &ctx.rule)?;
                    taylor.add(t.defect / (1.0 + t.lambda_sup));
                    let d = e.smooth.k_decomposition(x, 2.0)?;
                    recon.add(reconstruction_defect(f, &d)? / sup);
                    closed.add(closed_form_defect(&d, 2.0)? / lp_norm(&d.lambda_f1_scaled, 2.0)?);
                }
                let lf = apply_dunkl_operator(f);
                let flipped = match f.parity() {
                    Parity::Even => Parity::Odd,
                    Parity::Odd => Parity::Even,
                    Parity::None => Parity::None,
                };
                if flipped != Parity::None {
                    parity.add(lf.parity_defect(flipped) / lf.sup_norm());
                }
                for &p in &self.profile.p_set {
                    let pr = self.profiles(e, p)?;
                    for (i, &x) in bd.iter().enumerate() {
                        if x <= self.profile.scales.sandwich_max * (1.0 + 1e-12) {
                            kw.add(ratio(pr.k[i], pr.w[i]));
                            wk.add(ratio(pr.w[i], pr.k[i]));
                        }
                    }
                }
            }
        }
        out.insert("s4.taylor_identity", taylor);
        out.insert("s4.theta_mass", theta);
        out.insert("s4.k_over_w", kw);
        out.insert("s4.w_over_k", wk);
        out.insert("s4.reconstruction", recon);
        out.insert("s4.closed_form", closed);
        out.insert("s4.operator_parity", parity);
        Ok(out)
    }

    fn s5(&self) -> Result<BTreeMap<&'static str, Worst>> {
        let mut out = BTreeMap::new();
        let mut rng = self.rng(Suite::S5);
        let s = &self.profile.samples;
        let pairs: Vec<(f64, f64)> = (0..s.bernstein_pairs)
            .map(|_| {
                let y1 = rng.gen_range(0.0..s.bernstein_y_max);
                let y2 = rng.gen_range(0.0..s.bernstein_y_max);
                // keep both in (0, y_max] and distinct
                (s.bernstein_y_max - y1, s.bernstein_y_max - y2)
            })
            .filter(|(a, b)| a != b)
            .collect();
        let (mut l1, mut l1h, mut l2, mut l2h) = (Worst::new(), Worst::new(), Worst::new(), Worst::new());
        let p_set = &self.profile.p_set;
        let sweep = |sm: &Smoothness, ratio: &dyn Fn(&Smoothness, f64, f64, f64) -> Result<f64>, full: &mut Worst, half: &mut Worst| -> Result<()> {
            for &p in p_set {
                let (mut mf, mut mh) = (0.0f64, 0.0f64);
                for &(y1, y2) in &pairs {
                    mf = mf.max(ratio(sm, y1, y2, p)?);
                    mh = mh.max(ratio(sm, y1, 0.5 * (y1 + y2), p)?);
                }
                full.add(mf);
                half.add(mh / mf);
            }
            Ok(())
        };
        for ctx in self.contexts()? {
            for e in ctx.entries.iter().filter(|e| e.f.parity() == Parity::Even) {
                sweep(&e.smooth, &|sm, a, b, p| bernstein_ratio(sm, a, b, p), &mut l1, &mut l1h)?;
            }
            for name in ["gaussian", "abs_smoothed_1"] {
                let e = ctx.entries.iter().find(|e| e.named(name)).expect("catalog entry");
                for &x in &s.band_radii {
                    let g = bandlimit_project(&e.f, x)?;
                    let sm = Smoothness::new(&g, ctx.rule.clone())?;
                    sweep(&sm, &|sm, a, b, p| band_bernstein_ratio(sm, x, a, b, p), &mut l2, &mut l2h)?;
                }
            }
        }
        out.insert("s5.derivative_bound", l1);
        out.insert("s5.derivative_halving", l1h);
        out.insert("s5.band_bound", l2);
        out.insert("s5.band_halving", l2h);
        Ok(out)
    }

    fn s6(&self) -> Result<BTreeMap<&'static str, Worst>> {
        let mut out = BTreeMap::new();
        let s = &self.profile.samples;
        let (mut kd, mut ed, mut moll, mut thm3, mut mono, mut doubling) =
            (Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new());
        let ceilings = Ceilings::default();
        let m = self.lattices.bd.t_samples_per_scale();
        let doubled = self.lattices.bd.clone().with_t_samples(2 * m)?;
        for ctx in self.contexts()? {
            for e in &ctx.entries {
                for &p in &self.profile.p_set {
                    let pr = self.profiles(e, p)?;
                    let cell = |q: f64, beta: f64| -> Result<crate::besov::SeminormReport> {
                        let params = BesovParams::new(p, q, beta, ctx.alpha.alpha())?;
                        report_from_profiles(&ctx.grid, &params, &self.lattices, &ceilings, &pr)
                    };
                    for &q in &self.profile.q_set {
                        for &beta in &self.profile.beta_set {
                            let r = cell(q, beta)?;
                            let k = r.ratios.kd_over_bd;
                            kd.add(k.max(1.0 / k));
                            if r.params.ed_below_bd() {
                                ed.add(r.ratios.ed_over_bd);
                            }
                        }
                    }
                    if p == 2.0 {
                        for &q in &s.reverse_q {
                            for &beta in &s.reverse_beta {
                                let r = cell(q, beta)?;
                                if r.params.bd_below_ed() {
                                    thm3.add(r.ratios.bd_over_norm_ed);
                                }
                            }
                        }
                        let e0 = pr.e[0];
                        for w in pr.e.windows(2) {
                            mono.add((w[1] - w[0]).max(0.0) / e0);
                        }
                    }
                    if p <= 2.0 {
                        for &t in &s.mollifier_scales {
                            let defect = mollifier_defect(&e.f, &e.spectrum, t, p)?;
                            let w = e.smooth.modulus(1.0 / t, p, m)?;
                            moll.add(ratio(defect, w));
                        }
                    }
                    let fine = e.smooth.profile(&doubled, p)?;
                    for (a, b) in fine.iter().zip(&pr.w) {
                        doubling.add(ratio((a - b).abs(), *a));
                    }
                }
            }
        }
        out.insert("s6.kd_bd", kd);
        out.insert("s6.ed_bd", ed);
        out.insert("s6.mollifier_defect", moll);
        out.insert("s6.bd_norm_ed", thm3);
        out.insert("s6.e_monotone", mono);
        out.insert("s6.w_doubling", doubling);
        Ok(out)
    }
}

/// Runs the selected suites (all when `only` is empty) and assembles the report.
pub fn run_verify(profile: &VerifyProfile, only: &[Suite]) -> Result<VerifyReport> {
    let harness = Harness::new(profile.clone())?;
    let suites: Vec<Suite> = if only.is_empty() { Suite::ALL.to_vec() } else { only.to_vec() };
    let mut reports = Vec::new();
    for suite in suites {
        let start = Instant::now();
        let r = harness.run_suite(suite)?;
        eprintln!("{}: {:.1} s", suite.name(), start.elapsed().as_secs_f64());
        reports.push(r);
    }
    let failing: Vec<String> =
        reports.iter().flat_map(|r| r.checks.iter()).filter(|c| !c.pass).map(|c| c.id.clone()).collect();
    let timestamp =
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(VerifyReport { timestamp, profile_hash: profile.hash.clone(), pass: failing.is_empty(), failing, suites: reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_parses() {
        let p = VerifyProfile::default_profile();
        assert_eq!(p.alpha_set, vec![-0.25, 0.0, 0.5, 1.5]);
        assert!(p.q_set[2].is_infinite());
        assert_eq!(p.hash.len(), 64);
        // every check belongs to exactly one suite and has a ceiling
        for (id, ..) in CHECKS {
            assert_eq!(CHECKS.iter().filter(|c| c.0 == *id).count(), 1);
            assert!(p.tolerances.contains_key(*id));
        }
    }

    #[test]
    fn bad_profiles_are_rejected() {
        let bad_alpha = DEFAULT_PROFILE.replace("alpha_set = [-0.25,", "alpha_set = [-0.6,");
        assert!(VerifyProfile::from_toml(&bad_alpha).is_err());
        let unknown = DEFAULT_PROFILE.replace("[tolerances]", "[tolerances]\n\"s9.nothing\" = 1.0");
        assert!(matches!(VerifyProfile::from_toml(&unknown), Err(Error::Usage(_))));
        let missing = DEFAULT_PROFILE.replace("\"s6.w_doubling\" = 0.01", "");
        assert!(VerifyProfile::from_toml(&missing).is_err());
        assert!(VerifyProfile::from_toml("seed = 1").is_err());
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = VerifyProfile::default_profile();
        let b = VerifyProfile::from_toml(&DEFAULT_PROFILE.replace("seed = 20240611", "seed   =   20240611")).unwrap();
        assert_eq!(a.hash, b.hash);
        let c = VerifyProfile::from_toml(&DEFAULT_PROFILE.replace("seed = 20240611", "seed = 7")).unwrap();
        assert_ne!(a.hash, c.hash);
    }

    #[test]
    fn suite_names() {
        assert_eq!(Suite::parse("s3").unwrap(), Suite::S3);
        assert!(Suite::parse("S7").is_err());
    }
}
