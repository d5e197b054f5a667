//! CSV and JSON exchange formats for sampled functions and spectra.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{QuadGrid, SampledFunction};
use crate::special::AlphaParameter;
use crate::transform::Spectrum;

/// Nodes read back from a file must match the grid to this relative precision.
const NODE_TOL: f64 = 1e-12;

#[derive(Debug, Serialize, Deserialize)]
struct FunctionJson {
    alpha: f64,
    radius: f64,
    nodes: Vec<f64>,
    values: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumJson {
    alpha: f64,
    radius: f64,
    lambda: Vec<f64>,
    values: Vec<[f64; 2]>,
    /// `null` when the spectrum carries no band limit.
    band_limit: Option<f64>,
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|v| [v.re, v.im]).collect()
}

fn complexes(values: &[[f64; 2]]) -> Vec<Complex64> {
    values.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Grid matching `nodes`, or a mismatch error.
fn grid_for(alpha: f64, radius: f64, nodes: &[f64]) -> Result<Arc<QuadGrid>> {
    let grid = QuadGrid::shared(AlphaParameter::new(alpha)?, radius, nodes.len())?;
    check_nodes(&grid, nodes)?;
    Ok(grid)
}

fn check_nodes(grid: &QuadGrid, nodes: &[f64]) -> Result<()> {
    if nodes.len() != grid.len() {
        return Err(Error::GridMismatch(format!("{} samples for a {}-node grid", nodes.len(), grid.len())));
    }
    for (i, (&a, &b)) in nodes.iter().zip(grid.nodes()).enumerate() {
        if (a - b).abs() > NODE_TOL * grid.radius() {
            return Err(Error::GridMismatch(format!("node {i} is {a}, grid has {b}")));
        }
    }
    Ok(())
}

pub fn function_to_json(f: &SampledFunction) -> Result<String> {
    let g = f.grid();
    let j = FunctionJson {
        alpha: g.alpha().alpha(),
        radius: g.radius(),
        nodes: g.nodes().to_vec(),
        values: pairs(f.values()),
    };
    serde_json::to_string(&j).map_err(json_err)
}

pub fn function_from_json(text: &str) -> Result<SampledFunction> {
    let j: FunctionJson = serde_json::from_str(text).map_err(json_err)?;
    if j.values.len() != j.nodes.len() {
        return Err(Error::Parse(format!("{} nodes but {} values", j.nodes.len(), j.values.len())));
    }
    let grid = grid_for(j.alpha, j.radius, &j.nodes)?;
    SampledFunction::from_values(grid, complexes(&j.values))
}

pub fn spectrum_to_json(s: &Spectrum) -> Result<String> {
    let g = s.freq_grid();
    let j = SpectrumJson {
        alpha: g.alpha().alpha(),
        radius: g.radius(),
        lambda: g.nodes().to_vec(),
        values: pairs(s.values()),
        band_limit: Some(s.band_limit()).filter(|b| b.is_finite()),
    };
    serde_json::to_string(&j).map_err(json_err)
}

pub fn spectrum_from_json(text: &str) -> Result<Spectrum> {
    let j: SpectrumJson = serde_json::from_str(text).map_err(json_err)?;
    if j.values.len() != j.lambda.len() {
        return Err(Error::Parse(format!("{} nodes but {} values", j.lambda.len(), j.values.len())));
    }
    let grid = grid_for(j.alpha, j.radius, &j.lambda)?;
    match j.band_limit {
        Some(b) => Spectrum::with_band_limit(grid, complexes(&j.values), b),
        None => Spectrum::new(grid, complexes(&j.values)),
    }
}

fn write_csv(head: &str, nodes: &[f64], values: &[Complex64], preamble: Option<String>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record([head, "re", "im"]).map_err(csv_err)?;
    for (x, v) in nodes.iter().zip(values) {
        w.write_record([format!("{x:e}"), format!("{:e}", v.re), format!("{:e}", v.im)]).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?)
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(match preamble {
        Some(p) => format!("{p}\n{body}"),
        None => body,
    })
}

/// Rows `(node, value)` of a headered CSV; lines starting with `#` are skipped.
fn read_csv(text: &str, head: &str) -> Result<(Vec<f64>, Vec<Complex64>, Vec<String>)> {
    let comments: Vec<String> = text.lines().filter(|l| l.starts_with('#')).map(str::to_owned).collect();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.len() != 3 || &headers[0] != head || &headers[1] != "re" || &headers[2] != "im" {
        return Err(Error::Parse(format!("expected header `{head},re,im`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let num = |s: &str, line: usize| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {line}: `{s}`: {e}")));
    let (mut nodes, mut values) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        nodes.push(num(&rec[0], i + 2)?);
        values.push(Complex64::new(num(&rec[1], i + 2)?, num(&rec[2], i + 2)?));
    }
    Ok((nodes, values, comments))
}

/// CSV with header `x,re,im`.
pub fn function_to_csv(f: &SampledFunction) -> Result<String> {
    write_csv("x", f.grid().nodes(), f.values(), None)
}

/// Reads `x,re,im` rows sampled on `grid`.
pub fn function_from_csv(text: &str, grid: &Arc<QuadGrid>) -> Result<SampledFunction> {
    let (nodes, values, _) = read_csv(text, "x")?;
    check_nodes(grid, &nodes)?;
    SampledFunction::from_values(grid.clone(), values)
}

/// CSV with header `lambda,re,im`, preceded by a `# band_limit=` line when
/// the spectrum has a finite band limit.
pub fn spectrum_to_csv(s: &Spectrum) -> Result<String> {
    let pre = Some(s.band_limit()).filter(|b| b.is_finite()).map(|b| format!("# band_limit={b:e}"));
    write_csv("lambda", s.freq_grid().nodes(), s.values(), pre)
}

pub fn spectrum_from_csv(text: &str, grid: &Arc<QuadGrid>) -> Result<Spectrum> {
    let (nodes, values, comments) = read_csv(text, "lambda")?;
    check_nodes(grid, &nodes)?;
    let band = comments.iter().find_map(|c| c.trim_start_matches('#').trim().strip_prefix("band_limit=").map(str::to_owned));
    match band {
        Some(b) => {
            let b = b.trim().parse::<f64>().map_err(|e| Error::Parse(format!("band_limit `{b}`: {e}")))?;
            Spectrum::with_band_limit(grid.clone(), values, b)
        }
        None => Spectrum::new(grid.clone(), values),
    }
}
