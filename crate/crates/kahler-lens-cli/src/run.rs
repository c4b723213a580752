//! Execution of `analyze` and `verify` runs: point-level parallelism with
//! results collected in grid order, outputs written once at the end.

use std::collections::BTreeMap;

use anyhow::Result;
use rayon::prelude::*;
use serde_json::{json, Value};

use kahler_lens::angles::{classify_directions, kahler_angles, kappa_at};
use kahler_lens::identities::{self as idn, RANDOM_STRUCTURE_SAMPLES};
use kahler_lens::linalg::RVec;
use kahler_lens::{GeometryError, IdentityReport, Verdict};

use crate::config::RunConfig;
use crate::output::{self, fmt_float, SCHEMA_VERSION};

fn config_json(cfg: &RunConfig) -> Value {
    json!({
        "immersion": cfg.descriptor,
        "grid": cfg.grid_spec,
        "identities": cfg.identities,
        "seed": cfg.seed,
        "tolerances": {
            "rank": cfg.tolerances.rank,
            "complex": cfg.tolerances.complex,
            "pairing": cfg.tolerances.pairing,
            "algebraic": cfg.tolerances.algebraic,
            "finite_diff": cfg.tolerances.finite_diff,
        },
        "fd": {
            "h_grad": cfg.scheme.h_grad,
            "h_lap": cfg.scheme.h_lap,
            "order": cfg.scheme.order.as_u8(),
            "richardson": cfg.scheme.richardson,
        },
    })
}

fn certification_json(cfg: &RunConfig) -> Value {
    match &cfg.certification {
        None => Value::Null,
        Some(built) => {
            let properties: Value = built
                .properties
                .as_pairs()
                .iter()
                .map(|(name, claim)| (name.to_string(), json!(claim)))
                .collect::<serde_json::Map<_, _>>()
                .into();
            let checks: Vec<Value> = built
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "property": c.property,
                        "expected": c.expected,
                        "residual": c.residual,
                        "threshold": c.threshold,
                    })
                })
                .collect();
            json!({ "properties": properties, "checks": checks })
        }
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeRow {
    point: RVec,
    cosines: Vec<f64>,
    rank: usize,
    kappa: f64,
    minimality: f64,
    pluriminimality: f64,
    flags: Vec<&'static str>,
}

pub fn analyze(cfg: &RunConfig) -> Result<()> {
    let f = &cfg.immersion;
    let rows: Vec<AnalyzeRow> = cfg
        .grid
        .par_iter()
        .map(|p| -> Result<AnalyzeRow> {
            let spectrum = kahler_angles(f, p)?;
            let cls = classify_directions(&spectrum.cosines, f.tolerances().rank);
            // κ is undefined at complex points; the row records NaN there.
            let kappa = match kappa_at(f, p) {
                Ok(v) => v,
                Err(GeometryError::ComplexDirection { .. }) => f64::NAN,
                Err(e) => return Err(e.into()),
            };
            let probe = idn::pluriminimal_residual(f, p, RANDOM_STRUCTURE_SAMPLES, cfg.seed)?;
            let mut flags = Vec::new();
            if cls.is_complex_point {
                flags.push("complex-point");
            }
            if cls.is_lagrangian_point {
                flags.push("lagrangian-point");
            }
            if cls.has_complex {
                flags.push("has-complex");
            }
            if cls.has_lagrangian {
                flags.push("has-lagrangian");
            }
            Ok(AnalyzeRow {
                point: p.clone(),
                cosines: spectrum.cosines.clone(),
                rank: spectrum.rank_stratum,
                kappa,
                minimality: probe.minimality_residual,
                pluriminimality: probe.residual,
                flags,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let m = f.domain_dim();
    let n = m / 2;
    let mut header: Vec<String> = vec!["index".into()];
    header.extend((0..m).map(|k| format!("p{k}")));
    header.extend((1..=n).map(|a| format!("cos_{a}")));
    header.extend(
        ["rank", "kappa", "minimality_residual", "pluriminimality_residual", "flags"]
            .iter()
            .map(|s| s.to_string()),
    );
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(index, row)| {
            let mut rec = vec![index.to_string()];
            rec.extend(row.point.iter().map(|v| fmt_float(*v)));
            rec.extend(row.cosines.iter().map(|v| fmt_float(*v)));
            rec.push(row.rank.to_string());
            rec.push(fmt_float(row.kappa));
            rec.push(fmt_float(row.minimality));
            rec.push(fmt_float(row.pluriminimality));
            rec.push(row.flags.join("|"));
            rec
        })
        .collect();
    std::fs::create_dir_all(&cfg.out)?;
    output::write_csv(&cfg.out.join("spectra.csv"), &header, &csv_rows)?;

    let mut rank_histogram: BTreeMap<String, usize> = BTreeMap::new();
    for row in &rows {
        *rank_histogram.entry(row.rank.to_string()).or_insert(0) += 1;
    }
    let finite: Vec<f64> = rows.iter().map(|r| r.kappa).filter(|v| v.is_finite()).collect();
    let kappa_min = finite.iter().cloned().reduce(f64::min);
    let kappa_max = finite.iter().cloned().reduce(f64::max);
    let count = |flag: &str| rows.iter().filter(|r| r.flags.contains(&flag)).count();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "mode": "analyze",
        "config": config_json(cfg),
        "certification": certification_json(cfg),
        "points": rows.len(),
        "kappa": { "min": kappa_min, "max": kappa_max, "finite_points": finite.len() },
        "rank_histogram": rank_histogram,
        "classification": {
            "complex_points": count("complex-point"),
            "lagrangian_points": count("lagrangian-point"),
            "points_with_complex_direction": count("has-complex"),
            "points_with_lagrangian_direction": count("has-lagrangian"),
        },
    });
    output::write_json(&cfg.out.join("summary.json"), &summary)?;

    println!(
        "analyzed {} points (rank histogram: {}); wrote spectra.csv and summary.json to {}",
        rows.len(),
        rank_histogram
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect::<Vec<_>>()
            .join(" "),
        cfg.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub struct VerifyOutcome {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub by_check: BTreeMap<&'static str, [usize; 3]>,
}

fn skipped_report(id: &'static str, point: RVec, reason: &str) -> IdentityReport {
    IdentityReport {
        id,
        point,
        lhs: Vec::new(),
        rhs: Vec::new(),
        residual: 0.0,
        relative: 0.0,
        tolerance: 0.0,
        verdict: Verdict::Skipped,
        skip_reason: Some(reason.to_string()),
        notes: Vec::new(),
    }
}

/// FD stencils that step off the chart are a skip, not a run failure.
fn guard_chart(
    r: kahler_lens::Result<IdentityReport>,
    id: &'static str,
    p: &RVec,
) -> Result<IdentityReport> {
    match r {
        Ok(rep) => Ok(rep),
        Err(GeometryError::OutsideChart { what }) => {
            Ok(skipped_report(id, p.clone(), &format!("FD stencil leaves the {what}")))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn verify(cfg: &RunConfig) -> Result<VerifyOutcome> {
    let f = &cfg.immersion;
    let scheme = &cfg.scheme;
    let m = f.domain_dim();
    let mut rows: Vec<(IdentityReport, Option<usize>)> = Vec::new();

    for id in &cfg.identities {
        match *id {
            "ricci-form-pullback" => {
                rows.push((idn::check_ricci_form_pullback(f, &cfg.grid)?, None));
            }
            "constant-angle-curvature" => {
                rows.push((idn::check_constant_angle_curvature(f, &cfg.grid, cfg.seed)?, None));
            }
            "kappa-max-obstruction" => {
                let report = match cfg.grid_per_axis {
                    Some(n) if n >= 3 => idn::check_kappa_max_obstruction(f, n, cfg.seed)?,
                    _ => skipped_report(
                        "kappa-max-obstruction",
                        cfg.grid[0].clone(),
                        "the scan needs a regular grid with at least 3 points per axis",
                    ),
                };
                rows.push((report, None));
            }
            "gtilde-derivative" | "kappa-differential" => {
                let per: Vec<Vec<(IdentityReport, Option<usize>)>> = cfg
                    .grid
                    .par_iter()
                    .map(|p| -> Result<Vec<(IdentityReport, Option<usize>)>> {
                        let mut out = Vec::with_capacity(m);
                        for k in 0..m {
                            let mut z = RVec::zeros(m);
                            z[k] = 1.0;
                            let run = if *id == "gtilde-derivative" {
                                idn::check_gtilde_derivative(f, p, &z, scheme)
                            } else {
                                idn::check_kappa_differential(f, p, &z, scheme)
                            };
                            out.push((guard_chart(run, id, p)?, Some(k)));
                        }
                        Ok(out)
                    })
                    .collect::<Result<_>>()?;
                rows.extend(per.into_iter().flatten());
            }
            _ => {
                let per: Vec<(IdentityReport, Option<usize>)> = cfg
                    .grid
                    .par_iter()
                    .map(|p| -> Result<(IdentityReport, Option<usize>)> {
                        let run = match *id {
                            "ricci-from-frame" => idn::check_ricci_from_frame(f, p),
                            "kappa-laplacian-pluriminimal" => {
                                idn::check_kappa_laplacian_pluriminimal(f, p, scheme, cfg.seed)
                            }
                            "kappa-laplacian-minimal" => {
                                idn::check_kappa_laplacian_minimal(f, p, scheme)
                            }
                            "kahler-criteria" => idn::check_kahler_criteria(f, p, scheme),
                            "gauss-curvature-tradeoff" => {
                                idn::check_gauss_curvature_tradeoff(f, p, scheme)
                            }
                            other => unreachable!("unhandled check id {other}"),
                        };
                        Ok((guard_chart(run, id, p)?, None))
                    })
                    .collect::<Result<_>>()?;
                rows.extend(per);
            }
        }
    }

    std::fs::create_dir_all(&cfg.out)?;
    let jsonl: Vec<Value> = rows.iter().map(|(r, d)| output::report_to_json(r, *d)).collect();
    output::write_jsonl(&cfg.out.join("identities.jsonl"), &jsonl)?;
    let csv_rows: Vec<Vec<String>> = rows.iter().map(|(r, d)| output::report_csv_row(r, *d)).collect();
    output::write_csv(&cfg.out.join("identities.csv"), &output::report_csv_header(), &csv_rows)?;

    let mut by_check: BTreeMap<&'static str, [usize; 3]> = BTreeMap::new();
    for id in &cfg.identities {
        by_check.insert(id, [0, 0, 0]);
    }
    for (report, _) in &rows {
        let slot = by_check.entry(report.id).or_insert([0, 0, 0]);
        match report.verdict {
            Verdict::Pass => slot[0] += 1,
            Verdict::Fail => slot[1] += 1,
            Verdict::Skipped => slot[2] += 1,
        }
    }
    let sum = |k: usize| by_check.values().map(|v| v[k]).sum::<usize>();
    let outcome = VerifyOutcome { pass: sum(0), fail: sum(1), skipped: sum(2), by_check };

    let by_check_json: Value = outcome
        .by_check
        .iter()
        .map(|(id, v)| {
            (id.to_string(), json!({ "pass": v[0], "fail": v[1], "skipped": v[2] }))
        })
        .collect::<serde_json::Map<_, _>>()
        .into();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "mode": "verify",
        "config": config_json(cfg),
        "certification": certification_json(cfg),
        "reports": rows.len(),
        "counts": { "pass": outcome.pass, "fail": outcome.fail, "skipped": outcome.skipped },
        "by_check": by_check_json,
    });
    output::write_json(&cfg.out.join("summary.json"), &summary)?;
    Ok(outcome)
}
