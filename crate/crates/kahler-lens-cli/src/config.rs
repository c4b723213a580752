//! Run configuration: immersion descriptors, grid specifications, FD scheme
//! and tolerance overrides. Everything is parsed up front so that runs are a
//! pure function of (config, seed).

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

use kahler_lens::calculus::{FdOrder, FdScheme};
use kahler_lens::catalog::{self, BuildRequest, CertifiedBuild, ParamValue};
use kahler_lens::identities::CHECK_IDS;
use kahler_lens::immersion::{Immersion, MapKind, Poly};
use kahler_lens::linalg::RVec;
use kahler_lens::AmbientSpace;
use kahler_lens::Tolerances;

/// Fully resolved inputs of one `analyze`/`verify` run.
pub struct RunConfig {
    pub immersion: Immersion,
    /// Certification results when the descriptor named a catalog entry.
    pub certification: Option<CertifiedBuild>,
    /// The descriptor exactly as given (echoed into summaries).
    pub descriptor: String,
    pub grid: Vec<RVec>,
    /// Points per axis when the grid is regular; `None` for explicit lists.
    pub grid_per_axis: Option<usize>,
    pub grid_spec: String,
    pub identities: Vec<&'static str>,
    pub scheme: FdScheme,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub out: PathBuf,
}

/// Margin (fraction of each chart half-width) kept between a regular grid
/// and the chart boundary, leaving room for FD stencils.
pub const GRID_MARGIN: f64 = 0.1;

/// Parses `--immersion`: a catalog id, inline JSON, or a path to a JSON
/// file.
pub fn parse_immersion(spec: &str) -> Result<(Immersion, Option<CertifiedBuild>)> {
    let trimmed = spec.trim();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed)
            .context("immersion descriptor is not valid JSON")?;
        return immersion_from_value(&value);
    }
    if trimmed.ends_with(".json") {
        let text = fs::read_to_string(trimmed)
            .with_context(|| format!("cannot read immersion descriptor file `{trimmed}`"))?;
        let value: Value = serde_json::from_str(&text)
            .with_context(|| format!("`{trimmed}` is not valid JSON"))?;
        return immersion_from_value(&value);
    }
    let built = catalog::build_default(trimmed)
        .with_context(|| format!("building catalog entry `{trimmed}`"))?;
    Ok((built.immersion.clone(), Some(built)))
}

fn immersion_from_value(value: &Value) -> Result<(Immersion, Option<CertifiedBuild>)> {
    let obj = value
        .as_object()
        .ok_or_else(|| anyhow!("immersion descriptor must be a JSON object"))?;
    let kind = obj.get("type").and_then(Value::as_str).unwrap_or("catalog");
    match kind {
        "catalog" => {
            let req = build_request_from_value(value)?;
            let built =
                catalog::build(&req).with_context(|| format!("building catalog entry `{}`", req.id))?;
            Ok((built.immersion.clone(), Some(built)))
        }
        "polynomial" => Ok((polynomial_from_value(obj)?, None)),
        other => bail!("unknown immersion descriptor type `{other}` (expected `catalog` or `polynomial`)"),
    }
}

/// `{"id": "...", "params": {...}}`; parameter values may be numbers, real
/// coefficient arrays, `[re, im]` pair arrays, or nested requests.
fn build_request_from_value(value: &Value) -> Result<BuildRequest> {
    let obj = value
        .as_object()
        .ok_or_else(|| anyhow!("catalog descriptor must be a JSON object"))?;
    let id = obj
        .get("id")
        .and_then(Value::as_str)
        .ok_or_else(|| anyhow!("catalog descriptor needs a string `id` field"))?;
    let mut req = BuildRequest::bare(id);
    if let Some(params) = obj.get("params") {
        let map = params
            .as_object()
            .ok_or_else(|| anyhow!("`params` of `{id}` must be a JSON object"))?;
        for (name, raw) in map {
            req = req.with(name, param_value(id, name, raw)?);
        }
    }
    Ok(req)
}

fn param_value(id: &str, name: &str, raw: &Value) -> Result<ParamValue> {
    match raw {
        Value::Number(v) => v
            .as_f64()
            .map(ParamValue::Number)
            .ok_or_else(|| anyhow!("parameter `{name}` of `{id}` is not a finite number")),
        Value::Object(_) => Ok(ParamValue::Entry(Box::new(build_request_from_value(raw)?))),
        Value::Array(items) => {
            if items.iter().all(Value::is_number) {
                let coeffs = items
                    .iter()
                    .map(|v| v.as_f64().unwrap())
                    .collect::<Vec<_>>();
                Ok(ParamValue::RealPoly(coeffs))
            } else {
                let mut pairs = Vec::with_capacity(items.len());
                for item in items {
                    let pair = item
                        .as_array()
                        .filter(|a| a.len() == 2 && a.iter().all(Value::is_number))
                        .ok_or_else(|| {
                            anyhow!("parameter `{name}` of `{id}`: expected numbers or [re, im] pairs")
                        })?;
                    pairs.push((pair[0].as_f64().unwrap(), pair[1].as_f64().unwrap()));
                }
                Ok(ParamValue::ComplexPoly(pairs))
            }
        }
        _ => bail!("parameter `{name}` of `{id}` has an unsupported JSON type"),
    }
}

/// `{"type": "polynomial", "components": [[[c, [e0, e1, ...]], ...], ...],
///   "ambient": "flat:C2" | {"factors": [["disk", 1.0], ...]},
///   "chart": [[lo, hi], ...]}`
fn polynomial_from_value(obj: &serde_json::Map<String, Value>) -> Result<Immersion> {
    let comps = obj
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("polynomial descriptor needs a `components` array"))?;
    let chart = obj
        .get("chart")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("polynomial descriptor needs a `chart` array of [lo, hi] pairs"))?;
    let mut chart_box = Vec::with_capacity(chart.len());
    for (k, pair) in chart.iter().enumerate() {
        let pair = pair
            .as_array()
            .filter(|a| a.len() == 2 && a.iter().all(Value::is_number))
            .ok_or_else(|| anyhow!("chart entry {k} must be a [lo, hi] pair"))?;
        chart_box.push([pair[0].as_f64().unwrap(), pair[1].as_f64().unwrap()]);
    }
    let vars = chart_box.len();
    if vars == 0 {
        bail!("polynomial descriptor chart is empty");
    }

    let mut components = Vec::with_capacity(comps.len());
    for (c, comp) in comps.iter().enumerate() {
        let terms_raw = comp
            .as_array()
            .ok_or_else(|| anyhow!("component {c} must be an array of [coef, exponents] terms"))?;
        let mut terms = Vec::with_capacity(terms_raw.len());
        for term in terms_raw {
            let term = term
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| anyhow!("component {c}: each term must be [coef, [exponents]]"))?;
            let coef = term[0]
                .as_f64()
                .ok_or_else(|| anyhow!("component {c}: coefficient is not a number"))?;
            let exps_raw = term[1]
                .as_array()
                .ok_or_else(|| anyhow!("component {c}: exponents must be an array"))?;
            if exps_raw.len() != vars {
                bail!(
                    "component {c}: expected {vars} exponents (one per chart variable), got {}",
                    exps_raw.len()
                );
            }
            let mut exps = Vec::with_capacity(vars);
            for e in exps_raw {
                let e = e
                    .as_u64()
                    .ok_or_else(|| anyhow!("component {c}: exponents must be nonnegative integers"))?;
                exps.push(e as u32);
            }
            terms.push((coef, exps));
        }
        components.push(Poly::new(vars, terms)?);
    }

    let ambient = match obj.get("ambient") {
        Some(Value::String(id)) => AmbientSpace::from_catalog(id)?,
        Some(Value::Object(amb)) => {
            let factors = amb
                .get("factors")
                .and_then(Value::as_array)
                .ok_or_else(|| anyhow!("custom ambient needs a `factors` array of [id, scale]"))?;
            let mut parsed: Vec<(String, f64)> = Vec::with_capacity(factors.len());
            for f in factors {
                let f = f
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| anyhow!("ambient factor must be an [id, scale] pair"))?;
                let id = f[0]
                    .as_str()
                    .ok_or_else(|| anyhow!("ambient factor id must be a string"))?;
                let scale = f[1]
                    .as_f64()
                    .ok_or_else(|| anyhow!("ambient factor scale must be a number"))?;
                parsed.push((id.to_owned(), scale));
            }
            let slices: Vec<(&str, f64)> = parsed.iter().map(|(s, v)| (s.as_str(), *v)).collect();
            AmbientSpace::product_from_ids(&slices, "custom")?
        }
        _ => bail!("polynomial descriptor needs an `ambient` id string or {{\"factors\": ...}}"),
    };
    Ok(Immersion::new(MapKind::Polynomial { components }, ambient, chart_box)?)
}

/// Parses `--grid`: `N` points per axis, `N@margin`, or an explicit JSON
/// point list `[[x, y], ...]`.
pub fn parse_grid(spec: &str, f: &Immersion) -> Result<(Vec<RVec>, Option<usize>)> {
    let trimmed = spec.trim();
    if trimmed.starts_with('[') {
        let value: Value =
            serde_json::from_str(trimmed).context("grid point list is not valid JSON")?;
        let items = value
            .as_array()
            .ok_or_else(|| anyhow!("grid point list must be a JSON array"))?;
        let mut points = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let coords = item
                .as_array()
                .filter(|a| a.iter().all(Value::is_number))
                .ok_or_else(|| anyhow!("grid point {i} must be an array of numbers"))?;
            if coords.len() != f.domain_dim() {
                bail!(
                    "grid point {i} has {} coordinates, the chart has {}",
                    coords.len(),
                    f.domain_dim()
                );
            }
            let p = RVec::from_iterator(coords.len(), coords.iter().map(|v| v.as_f64().unwrap()));
            if !f.chart_contains(&p) {
                bail!("grid point {i} lies outside the chart box");
            }
            points.push(p);
        }
        if points.is_empty() {
            bail!("grid point list is empty");
        }
        return Ok((points, None));
    }

    let (count_str, margin) = match trimmed.split_once('@') {
        Some((n, m)) => {
            let margin: f64 = m
                .parse()
                .with_context(|| format!("grid margin `{m}` is not a number"))?;
            if !(0.0..1.0).contains(&margin) {
                bail!("grid margin must lie in [0, 1), got {margin}");
            }
            (n, margin)
        }
        None => (trimmed, GRID_MARGIN),
    };
    let per_axis: usize = count_str
        .parse()
        .with_context(|| format!("grid spec `{trimmed}` is neither a count nor a point list"))?;
    if per_axis == 0 {
        bail!("grid needs at least one point per axis");
    }
    let points = kahler_lens::identities::interior_grid(f.chart_box(), per_axis, margin);
    Ok((points, Some(per_axis)))
}

/// Parses `--identities`: `all` or a comma-separated list of check ids.
pub fn parse_identities(spec: &str) -> Result<Vec<&'static str>> {
    if spec.trim() == "all" {
        return Ok(CHECK_IDS.to_vec());
    }
    let mut selected = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        match CHECK_IDS.iter().find(|id| **id == token) {
            Some(id) => {
                if !selected.contains(id) {
                    selected.push(*id);
                }
            }
            None => bail!(
                "unknown identity check `{token}`; available: {}",
                CHECK_IDS.join(", ")
            ),
        }
    }
    if selected.is_empty() {
        bail!("no identity checks selected");
    }
    Ok(selected)
}

pub fn parse_scheme(fd_step: f64, fd_order: u8, richardson: bool) -> Result<FdScheme> {
    let order = FdOrder::from_u8(fd_order)?;
    // The nested Laplacian uses a 10× coarser outer step, matching the
    // defaults the finite-difference budgets are calibrated for.
    Ok(FdScheme::new(fd_step, 10.0 * fd_step, order, richardson)?)
}

pub fn parse_tolerances(tol_alg: f64, tol_fd: f64) -> Result<Tolerances> {
    if !(tol_alg > 0.0) || !(tol_fd > 0.0) {
        bail!("tolerances must be positive");
    }
    let mut tol = Tolerances::default();
    tol.algebraic = tol_alg;
    tol.finite_diff = tol_fd;
    Ok(tol)
}
