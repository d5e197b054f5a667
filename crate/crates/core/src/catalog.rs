//! Closed-form test functions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{Parity, QuadGrid, SampledFunction};
use crate::transform::bandlimit_project;

/// Band limit of the band-limited catalog entry.
pub const BAND_LIMIT: f64 = 7.0;
/// Smoothing width of the smoothed absolute value.
pub const ABS_EPSILON: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `exp(-x^2 / 2)`
    Gaussian,
    /// `k x^k exp(-x^2 / 2)`
    GaussianMoment(u32),
    /// `exp(-(x - 1)^2)`
    Bump,
    /// Gaussian with its spectrum cut at `b`.
    BandLimited(f64),
    /// `sqrt(x^2 + eps^2) exp(-x^2 / 2)`
    AbsSmoothed(f64),
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub generator: Generator,
    pub parity: Parity,
    pub smoothness_class: &'static str,
}

impl CatalogEntry {
    fn new(name: impl Into<String>, generator: Generator) -> Self {
        let (parity, smoothness_class) = match generator {
            Generator::Gaussian => (Parity::Even, "entire"),
            Generator::GaussianMoment(k) => (if k % 2 == 0 { Parity::Even } else { Parity::Odd }, "entire"),
            Generator::Bump => (Parity::None, "entire"),
            Generator::BandLimited(_) => (Parity::Even, "band-limited"),
            Generator::AbsSmoothed(_) => (Parity::Even, "analytic-strip"),
            Generator::Constant(_) => (Parity::Even, "constant"),
        };
        Self { name: name.into(), generator, parity, smoothness_class }
    }

    /// Closed-form value; the band-limited entry has none and returns `None`.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let g = (-0.5 * x * x).exp();
        Some(match self.generator {
            Generator::Gaussian => g,
            Generator::GaussianMoment(k) => k as f64 * x.powi(k as i32) * g,
            Generator::Bump => (-(x - 1.0) * (x - 1.0)).exp(),
            Generator::BandLimited(_) => return None,
            Generator::AbsSmoothed(e) => (x * x + e * e).sqrt() * g,
            Generator::Constant(c) => c,
        })
    }

    pub fn sample(&self, grid: &Arc<QuadGrid>) -> Result<SampledFunction> {
        match self.generator {
            Generator::BandLimited(b) => {
                let g = SampledFunction::from_real(grid.clone(), Parity::Even, |x| (-0.5 * x * x).exp())?;
                let p = bandlimit_project(&g, b)?;
                let v = p.values();
                // the projection of a real even function is real and even
                let values = (0..v.len())
                    .map(|i| num_complex::Complex64::new(0.5 * (v[i].re + v[grid.mirror(i)].re), 0.0))
                    .collect();
                SampledFunction::new(grid.clone(), values, Parity::Even)
            }
            _ => SampledFunction::from_real(grid.clone(), self.parity, |x| self.eval(x).expect("closed form")),
        }
    }
}

/// The six canonical test functions.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry::new("gaussian", Generator::Gaussian),
        CatalogEntry::new("gaussian_moment_1", Generator::GaussianMoment(1)),
        CatalogEntry::new("gaussian_moment_2", Generator::GaussianMoment(2)),
        CatalogEntry::new("bump", Generator::Bump),
        CatalogEntry::new("band_limited_7", Generator::BandLimited(BAND_LIMIT)),
        CatalogEntry::new("abs_smoothed_1", Generator::AbsSmoothed(ABS_EPSILON)),
    ]
}

/// Resolves a catalog name, including `constant` and parametrized forms such
/// as `gaussian_moment_3`, `band_limited_5` or `abs_smoothed_0.5`.
pub fn lookup(name: &str) -> Result<CatalogEntry> {
    let bad = || Error::Usage(format!("unknown catalog function `{name}`"));
    let num = |rest: &str| rest.parse::<f64>().ok().filter(|v| v.is_finite());
    let generator = match name {
        "gaussian" => Generator::Gaussian,
        "bump" => Generator::Bump,
        "constant" => Generator::Constant(1.0),
        "band_limited" => Generator::BandLimited(BAND_LIMIT),
        "abs_smoothed" => Generator::AbsSmoothed(ABS_EPSILON),
        "gaussian_moment" => Generator::GaussianMoment(1),
        _ => {
            if let Some(rest) = name.strip_prefix("gaussian_moment_") {
                Generator::GaussianMoment(rest.parse().ok().filter(|&k| k >= 1).ok_or_else(bad)?)
            } else if let Some(rest) = name.strip_prefix("band_limited_") {
                Generator::BandLimited(num(rest).filter(|&b| b > 0.0).ok_or_else(bad)?)
            } else if let Some(rest) = name.strip_prefix("abs_smoothed_") {
                Generator::AbsSmoothed(num(rest).filter(|&e| e > 0.0).ok_or_else(bad)?)
            } else if let Some(rest) = name.strip_prefix("constant_") {
                Generator::Constant(num(rest).ok_or_else(bad)?)
            } else {
                return Err(bad());
            }
        }
    };
    Ok(CatalogEntry::new(name, generator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::AlphaParameter;

    #[test]
    fn entries_decay_and_parity() {
        let g = QuadGrid::shared(AlphaParameter::new(0.5).unwrap(), 20.0, 1024).unwrap();
        let entries = catalog();
        assert_eq!(entries.len(), 6);
        for e in &entries {
            let f = e.sample(&g).unwrap();
            let v = f.values();
            assert!(v[0].norm() < 1e-12 && v[v.len() - 1].norm() < 1e-12, "{}", e.name);
            assert_eq!(f.parity(), e.parity);
            assert_eq!(lookup(&e.name).unwrap(), *e);
        }
        assert!(lookup("nope").is_err());
        assert!(lookup("gaussian_moment_0").is_err());
        assert_eq!(lookup("constant").unwrap().eval(3.0), Some(1.0));
    }

    #[test]
    fn band_limited_is_close_to_gaussian() {
        let g = QuadGrid::shared(AlphaParameter::new(0.0).unwrap(), 20.0, 1024).unwrap();
        let b = lookup("band_limited_7").unwrap().sample(&g).unwrap();
        let gauss = lookup("gaussian").unwrap().sample(&g).unwrap();
        // the Gaussian spectrum beyond 7 is below exp(-49/2)
        assert!(b.sup_distance(&gauss).unwrap() < 1e-9);
    }
}
