//! Built-in immersion fixtures with self-certifying property declarations.
//!
//! Every entry declares the geometric properties it is supposed to have
//! (minimal, Lagrangian, complex, …) and [`build`] re-verifies each declared
//! property numerically at deterministic sample points before handing the
//! immersion out. A fixture that stops satisfying its own advertisement is a
//! bug, and construction fails with a [`GeometryError::Certification`]
//! naming the property.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float-math methods come from the trait in no_std builds; the inherent std
// methods shadow it under `cfg(test)`.
#[allow(unused_imports)]
use num_traits::Float;

use crate::ambient::AmbientSpace;
use crate::angles::{adapted_frame, kahler_angles, pullback_form};
use crate::immersion::{weierstrass_phi, CPoly, Immersion, MapKind, Poly};
use crate::linalg::{hermitian_norm_sq, CVec, RVec};
use crate::{GeometryError, Result};

/// One parameter value in a build request.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    /// Real polynomial in one variable, coefficients by ascending power.
    RealPoly(Vec<f64>),
    /// Complex polynomial in one variable, `(re, im)` pairs by ascending
    /// power.
    ComplexPoly(Vec<(f64, f64)>),
    /// Nested build request (product factors).
    Entry(Box<BuildRequest>),
}

/// A catalog entry id plus parameter overrides; omitted parameters take the
/// entry defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildRequest {
    pub id: String,
    pub params: BTreeMap<String, ParamValue>,
}

impl BuildRequest {
    pub fn bare(id: &str) -> Self {
        BuildRequest { id: id.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, value: ParamValue) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    fn reject_unknown_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(GeometryError::InvalidParameter {
                    name: "params",
                    reason: alloc::format!("`{}` takes no parameter `{key}`", self.id),
                });
            }
        }
        Ok(())
    }

    fn number(&self, name: &'static str, default: f64) -> Result<f64> {
        match self.params.get(name) {
            None => Ok(default),
            Some(ParamValue::Number(v)) => Ok(*v),
            Some(_) => Err(GeometryError::InvalidParameter {
                name,
                reason: "expected a number".into(),
            }),
        }
    }

    fn real_poly(&self, name: &'static str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(name) {
            None => Ok(default.to_vec()),
            Some(ParamValue::RealPoly(v)) => Ok(v.clone()),
            Some(_) => Err(GeometryError::InvalidParameter {
                name,
                reason: "expected real polynomial coefficients".into(),
            }),
        }
    }

    fn complex_poly(&self, name: &'static str, default: &[(f64, f64)]) -> Result<CPoly> {
        let pairs = match self.params.get(name) {
            None => default.to_vec(),
            Some(ParamValue::ComplexPoly(v)) => v.clone(),
            Some(ParamValue::RealPoly(v)) => v.iter().map(|&re| (re, 0.0)).collect(),
            Some(_) => {
                return Err(GeometryError::InvalidParameter {
                    name,
                    reason: "expected complex polynomial coefficients".into(),
                })
            }
        };
        Ok(CPoly::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect()))
    }

    fn entry(&self, name: &'static str) -> Result<&BuildRequest> {
        match self.params.get(name) {
            Some(ParamValue::Entry(e)) => Ok(e),
            Some(_) => Err(GeometryError::InvalidParameter {
                name,
                reason: "expected a nested catalog entry".into(),
            }),
            None => Err(GeometryError::InvalidParameter {
                name,
                reason: "product requires this factor entry".into(),
            }),
        }
    }
}

/// Declared geometric properties. `Some(true)`/`Some(false)` are claims that
/// are certified at build time; `None` means no claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Properties {
    pub minimal: Option<bool>,
    pub totally_geodesic: Option<bool>,
    pub lagrangian: Option<bool>,
    pub complex: Option<bool>,
    pub pluriminimal: Option<bool>,
    pub constant_angles: Option<bool>,
}

impl Properties {
    pub fn as_pairs(&self) -> [(&'static str, Option<bool>); 6] {
        [
            ("minimal", self.minimal),
            ("totally_geodesic", self.totally_geodesic),
            ("lagrangian", self.lagrangian),
            ("complex", self.complex),
            ("pluriminimal", self.pluriminimal),
            ("constant_angles", self.constant_angles),
        ]
    }

    /// Property of a product immersion: certain if both factors are certain
    /// or either factor definitely fails.
    fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
        match (a, b) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        }
    }

    fn product(a: &Properties, b: &Properties) -> Properties {
        Properties {
            minimal: Self::and(a.minimal, b.minimal),
            totally_geodesic: Self::and(a.totally_geodesic, b.totally_geodesic),
            lagrangian: Self::and(a.lagrangian, b.lagrangian),
            complex: Self::and(a.complex, b.complex),
            pluriminimal: Self::and(a.pluriminimal, b.pluriminimal),
            constant_angles: Self::and(a.constant_angles, b.constant_angles),
        }
    }
}

/// Metadata for `catalog list` / `catalog describe`.
#[derive(Debug, Clone, Copy)]
pub struct ParamInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub default: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct EntryInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub ambient: &'static str,
    pub parameters: &'static [ParamInfo],
}

const ENTRIES: &[EntryInfo] = &[
    EntryInfo {
        id: "lagrangian-plane",
        summary: "Totally geodesic Lagrangian plane (x, y) in flat C2; all angles right, kappa = 0.",
        ambient: "flat:C2",
        parameters: &[ParamInfo {
            name: "half-width",
            summary: "chart half-width",
            default: "5",
        }],
    },
    EntryInfo {
        id: "complex-graph",
        summary: "Holomorphic graph w -> (w, h(w)) in flat C2; a complex curve, every direction complex.",
        ambient: "flat:C2",
        parameters: &[ParamInfo {
            name: "h",
            summary: "holomorphic polynomial (ascending coefficients)",
            default: "w^2",
        }],
    },
    EntryInfo {
        id: "lambda-graph",
        summary: "Linear graph (x, y) -> (x, y, lambda*x, -lambda*y): totally geodesic with constant cos = (1-l^2)/(1+l^2).",
        ambient: "flat:C2",
        parameters: &[ParamInfo {
            name: "lambda",
            summary: "slope in [0, 1]; 0 is complex, 1 is Lagrangian",
            default: "0.5",
        }],
    },
    EntryInfo {
        id: "lambda-graph-family",
        summary: "Nonlinear graph (x, y) -> (x, y, a(x), b(y)) with position-dependent angle; generic kappa test bed.",
        ambient: "flat:C2",
        parameters: &[
            ParamInfo {
                name: "a",
                summary: "real polynomial a(x), ascending coefficients",
                default: "0.5x + 0.1x^3",
            },
            ParamInfo {
                name: "b",
                summary: "real polynomial b(y), ascending coefficients",
                default: "0.4y + 0.2y^2",
            },
        ],
    },
    EntryInfo {
        id: "weierstrass",
        summary: "Minimal surface F = Re(integral of phi) in flat C2 from null-curve data (f1, f2, g0).",
        ambient: "flat:C2",
        parameters: &[
            ParamInfo { name: "f1", summary: "complex polynomial", default: "w" },
            ParamInfo { name: "f2", summary: "complex polynomial", default: "2 + w/2" },
            ParamInfo { name: "g0", summary: "complex polynomial", default: "1" },
        ],
    },
    EntryInfo {
        id: "rotated-j-curve",
        summary: "w -> (cos(a/2) h(w), sin(a/2) conj(h(w))): minimal with constant angle cos(a).",
        ambient: "flat:C2",
        parameters: &[
            ParamInfo { name: "alpha", summary: "angle in [0, pi]", default: "pi/3" },
            ParamInfo { name: "h", summary: "holomorphic polynomial", default: "w + w^2/4" },
        ],
    },
    EntryInfo {
        id: "product",
        summary: "Product immersion of two catalog entries into the product ambient; block angle spectrum.",
        ambient: "product of factor ambients",
        parameters: &[
            ParamInfo { name: "left", summary: "nested entry", default: "(required)" },
            ParamInfo { name: "right", summary: "nested entry", default: "(required)" },
        ],
    },
    EntryInfo {
        id: "clifford-lagrangian-cp2",
        summary: "Clifford torus (u, v) -> (e^iu, e^iv) in the affine chart of CP2: minimal Lagrangian.",
        ambient: "cp2:fs",
        parameters: &[],
    },
    EntryInfo {
        id: "diagonal-disk",
        summary: "Diagonal w -> (w, w) in disk x disk: complex and totally geodesic.",
        ambient: "diskxdisk",
        parameters: &[],
    },
    EntryInfo {
        id: "antidiagonal-disk",
        summary: "Antidiagonal w -> (w, conj(w)) in disk x disk: Lagrangian and totally geodesic.",
        ambient: "diskxdisk",
        parameters: &[],
    },
    EntryInfo {
        id: "nonminimal-graph",
        summary: "Graph (x, y) -> (x, y, x^2, 0): visibly nonzero mean curvature (negative control).",
        ambient: "flat:C2",
        parameters: &[],
    },
];

/// All catalog entries, for `catalog list`.
pub fn entries() -> &'static [EntryInfo] {
    ENTRIES
}

/// Metadata for one entry, for `catalog describe`.
pub fn describe(id: &str) -> Result<&'static EntryInfo> {
    ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| GeometryError::UnknownCatalogId(id.into()))
}

/// One certified property: the measured residual against its threshold.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub property: &'static str,
    /// Declared truth value; `false` means the residual must *exceed* the
    /// threshold (negative control).
    pub expected: bool,
    pub residual: f64,
    pub threshold: f64,
}

/// A built immersion together with its certified property declarations.
#[derive(Debug, Clone)]
pub struct CertifiedBuild {
    pub immersion: Immersion,
    pub properties: Properties,
    pub checks: Vec<PropertyCheck>,
}

const CERT_MINIMAL: f64 = 1e-8;
/// Fubini–Study derivatives are finite-difference, so its fixtures certify
/// minimality at a looser threshold.
const CERT_MINIMAL_FD: f64 = 1e-6;
const CERT_NOT_MINIMAL: f64 = 0.1;
const CERT_TOTALLY_GEODESIC: f64 = 1e-8;
const CERT_LAGRANGIAN: f64 = 1e-9;
const CERT_COMPLEX: f64 = 1e-9;
const CERT_PLURIMINIMAL: f64 = 1e-8;
const CERT_ANGLE_SPREAD: f64 = 1e-9;
const CERT_NULL_CURVE: f64 = 1e-12;

/// Builds a catalog immersion and certifies every declared property at
/// deterministic sample points.
pub fn build(req: &BuildRequest) -> Result<CertifiedBuild> {
    let (immersion, properties, entry_id) = construct(req)?;
    let checks = certify(&immersion, &properties, entry_id)?;
    Ok(CertifiedBuild { immersion, properties, checks })
}

/// Convenience: build an entry with default parameters.
pub fn build_default(id: &str) -> Result<CertifiedBuild> {
    build(&BuildRequest::bare(id))
}

fn flat_c2() -> AmbientSpace {
    AmbientSpace::from_catalog("flat:C2").expect("flat:C2 is a known ambient")
}

fn construct(req: &BuildRequest) -> Result<(Immersion, Properties, &'static str)> {
    let info = describe(&req.id)?;
    match info.id {
        "lagrangian-plane" => {
            req.reject_unknown_keys(&["half-width"])?;
            let w = req.number("half-width", 5.0)?;
            if !(w > 0.0) {
                return Err(GeometryError::InvalidParameter {
                    name: "half-width",
                    reason: "must be positive".into(),
                });
            }
            let f = crate::immersion::lagrangian_plane(w)?;
            let props = Properties {
                minimal: Some(true),
                totally_geodesic: Some(true),
                lagrangian: Some(true),
                complex: None,
                pluriminimal: Some(true),
                constant_angles: Some(true),
            };
            Ok((f, props, info.id))
        }
        "complex-graph" => {
            req.reject_unknown_keys(&["h"])?;
            let h = req.complex_poly("h", &[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)])?;
            let affine = h.degree() <= 1;
            let f = Immersion::new(
                MapKind::HolomorphicGraph { h },
                flat_c2(),
                vec![[-1.0, 1.0]; 2],
            )?;
            let props = Properties {
                minimal: Some(true),
                totally_geodesic: affine.then_some(true),
                lagrangian: None,
                complex: Some(true),
                pluriminimal: Some(true),
                constant_angles: Some(true),
            };
            Ok((f, props, info.id))
        }
        "lambda-graph" => {
            req.reject_unknown_keys(&["lambda"])?;
            let lambda = req.number("lambda", 0.5)?;
            if !(0.0..=1.0).contains(&lambda) {
                return Err(GeometryError::InvalidParameter {
                    name: "lambda",
                    reason: alloc::format!("must lie in [0, 1], got {lambda}"),
                });
            }
            let components = vec![
                Poly::coordinate(2, 0),
                Poly::coordinate(2, 1),
                Poly::new(2, vec![(lambda, vec![1, 0])])?,
                Poly::new(2, vec![(-lambda, vec![0, 1])])?,
            ];
            let f = Immersion::new(
                MapKind::Polynomial { components },
                flat_c2(),
                vec![[-2.0, 2.0]; 2],
            )?;
            let props = Properties {
                minimal: Some(true),
                totally_geodesic: Some(true),
                lagrangian: (lambda == 1.0).then_some(true),
                complex: (lambda == 0.0).then_some(true),
                pluriminimal: Some(true),
                constant_angles: Some(true),
            };
            Ok((f, props, info.id))
        }
        "lambda-graph-family" => {
            req.reject_unknown_keys(&["a", "b"])?;
            let a = req.real_poly("a", &[0.0, 0.5, 0.0, 0.1])?;
            let b = req.real_poly("b", &[0.0, 0.4, 0.2])?;
            let graph_poly = |coeffs: &[f64], var: usize| -> Result<Poly> {
                let terms = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0.0)
                    .map(|(k, &c)| {
                        let mut exps = vec![0u32; 2];
                        exps[var] = k as u32;
                        (c, exps)
                    })
                    .collect();
                Poly::new(2, terms)
            };
            let components = vec![
                Poly::coordinate(2, 0),
                Poly::coordinate(2, 1),
                graph_poly(&a, 0)?,
                graph_poly(&b, 1)?,
            ];
            let f = Immersion::new(
                MapKind::Polynomial { components },
                flat_c2(),
                vec![[-1.0, 1.0]; 2],
            )?;
            Ok((f, Properties::default(), info.id))
        }
        "weierstrass" => {
            req.reject_unknown_keys(&["f1", "f2", "g0"])?;
            let f1 = req.complex_poly("f1", &[(0.0, 0.0), (1.0, 0.0)])?;
            let f2 = req.complex_poly("f2", &[(2.0, 0.0), (0.5, 0.0)])?;
            let g0 = req.complex_poly("g0", &[(1.0, 0.0)])?;
            let data_affine = f1.degree() == 0 && f2.degree() == 0;
            let f2_constant = f2.degree() == 0;
            let f2_value = f2.eval(Complex64::new(0.0, 0.0));
            let f2_zero = f2_constant && f2_value.norm() == 0.0;
            let f2_unit = f2_constant && (f2_value.norm() - 1.0).abs() < 1e-15;
            let f = Immersion::new(
                MapKind::Weierstrass { f1, f2, g0 },
                flat_c2(),
                vec![[-1.0, 1.0]; 2],
            )?;
            let props = Properties {
                minimal: Some(true),
                totally_geodesic: data_affine.then_some(true),
                lagrangian: f2_unit.then_some(true),
                complex: f2_zero.then_some(true),
                pluriminimal: Some(true),
                constant_angles: f2_constant.then_some(true),
            };
            Ok((f, props, info.id))
        }
        "rotated-j-curve" => {
            req.reject_unknown_keys(&["alpha", "h"])?;
            let alpha = req.number("alpha", core::f64::consts::FRAC_PI_3)?;
            if !(0.0..=core::f64::consts::PI).contains(&alpha) {
                return Err(GeometryError::InvalidParameter {
                    name: "alpha",
                    reason: alloc::format!("must lie in [0, pi], got {alpha}"),
                });
            }
            let h = req.complex_poly("h", &[(0.0, 0.0), (1.0, 0.0), (0.25, 0.0)])?;
            let affine = h.degree() <= 1;
            let lagrangian = (alpha - core::f64::consts::FRAC_PI_2).abs() < 1e-15;
            let f = Immersion::new(
                MapKind::RotatedJCurve { alpha, h },
                flat_c2(),
                vec![[-1.0, 1.0]; 2],
            )?;
            let props = Properties {
                minimal: Some(true),
                totally_geodesic: affine.then_some(true),
                lagrangian: lagrangian.then_some(true),
                complex: (alpha == 0.0).then_some(true),
                pluriminimal: Some(true),
                constant_angles: Some(true),
            };
            Ok((f, props, info.id))
        }
        "product" => {
            req.reject_unknown_keys(&["left", "right"])?;
            let (left, left_props, _) = construct(req.entry("left")?)?;
            let (right, right_props, _) = construct(req.entry("right")?)?;
            let ambient = AmbientSpace::product_of(left.ambient(), right.ambient());
            let mut chart: Vec<[f64; 2]> = left.chart_box().to_vec();
            chart.extend_from_slice(right.chart_box());
            let props = Properties::product(&left_props, &right_props);
            let f = Immersion::new(
                MapKind::Product { left: Box::new(left), right: Box::new(right) },
                ambient,
                chart,
            )?;
            Ok((f, props, info.id))
        }
        "clifford-lagrangian-cp2" => {
            req.reject_unknown_keys(&[])?;
            let f = Immersion::new(
                MapKind::CliffordTorus,
                AmbientSpace::from_catalog("cp2:fs")?,
                vec![[-3.2, 3.2]; 2],
            )?;
            let props = Properties {
                minimal: Some(true),
                totally_geodesic: None,
                lagrangian: Some(true),
                complex: None,
                pluriminimal: None,
                constant_angles: Some(true),
            };
            Ok((f, props, info.id))
        }
        "diagonal-disk" | "antidiagonal-disk" => {
            req.reject_unknown_keys(&[])?;
            let sign = if info.id == "diagonal-disk" { 1.0 } else { -1.0 };
            let components = vec![
                Poly::coordinate(2, 0),
                Poly::coordinate(2, 1),
                Poly::coordinate(2, 0),
                Poly::new(2, vec![(sign, vec![0, 1])])?,
            ];
            let f = Immersion::new(
                MapKind::Polynomial { components },
                AmbientSpace::from_catalog("diskxdisk")?,
                vec![[-0.6, 0.6]; 2],
            )?;
            let props = Properties {
                minimal: Some(true),
                totally_geodesic: Some(true),
                lagrangian: (sign < 0.0).then_some(true),
                complex: (sign > 0.0).then_some(true),
                pluriminimal: Some(true),
                constant_angles: Some(true),
            };
            Ok((f, props, info.id))
        }
        "nonminimal-graph" => {
            req.reject_unknown_keys(&[])?;
            let components = vec![
                Poly::coordinate(2, 0),
                Poly::coordinate(2, 1),
                Poly::new(2, vec![(1.0, vec![2, 0])])?,
                Poly::zero(2),
            ];
            let f = Immersion::new(
                MapKind::Polynomial { components },
                flat_c2(),
                vec![[-2.0, 2.0]; 2],
            )?;
            let props = Properties { minimal: Some(false), ..Properties::default() };
            Ok((f, props, info.id))
        }
        _ => unreachable!("describe() already filtered unknown ids"),
    }
}

/// Deterministic sample points inside the chart box: the center plus four
/// staggered offsets at a safe margin.
fn sample_points(chart: &[[f64; 2]]) -> Vec<RVec> {
    const OFFSETS: [f64; 5] = [0.0, 0.31, -0.22, 0.12, -0.4];
    let m = chart.len();
    (0..OFFSETS.len())
        .map(|j| {
            RVec::from_fn(m, |k, _| {
                let [lo, hi] = chart[k];
                let center = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                center + half * OFFSETS[(j + 2 * k) % OFFSETS.len()]
            })
        })
        .collect()
}

/// Max `(1,1)`-part of the second fundamental form over the adapted frame:
/// `max_{α,β} ‖Σ_{kl} Z_α^k Z̄_β^l ∇dF(∂_k, ∂_l)‖_g`.
fn pluriminimal_residual(f: &Immersion, p: &RVec) -> Result<f64> {
    let frame = adapted_frame(f, p)?;
    let ii = f.second_fundamental_form(p)?;
    let g = f.ambient().metric_at(&f.map(p)?)?;
    let n = frame.n();
    let m = f.domain_dim();
    let big_n = f.ambient().real_dim();
    let mut worst = 0.0f64;
    for a in 0..n {
        let za = frame.z(a);
        for b in 0..n {
            let zb = frame.z_bar(b);
            let mut v = CVec::zeros(big_n);
            for k in 0..m {
                for l in 0..m {
                    let w = za[k] * zb[l];
                    if w.norm_sqr() == 0.0 {
                        continue;
                    }
                    for c in 0..big_n {
                        v[c] += w * ii[k][l][c];
                    }
                }
            }
            worst = worst.max(hermitian_norm_sq(&g, &v).sqrt());
        }
    }
    Ok(worst)
}

fn certify(f: &Immersion, props: &Properties, entry: &'static str) -> Result<Vec<PropertyCheck>> {
    let points = sample_points(f.chart_box());
    let mut checks = Vec::new();
    let fd_ambient = f.ambient().has_fd_derivatives();

    let push = |property: &'static str,
                    expected: bool,
                    residual: f64,
                    threshold: f64,
                    checks: &mut Vec<PropertyCheck>|
     -> Result<()> {
        let ok = if expected { residual <= threshold } else { residual > threshold };
        if !ok {
            return Err(GeometryError::Certification { entry, property, residual });
        }
        checks.push(PropertyCheck { property, expected, residual, threshold });
        Ok(())
    };

    if let Some(expected) = props.minimal {
        let mut residual = 0.0f64;
        for p in &points {
            residual = residual.max(f.minimality_residual(p)?);
        }
        let threshold = if expected {
            if fd_ambient { CERT_MINIMAL_FD } else { CERT_MINIMAL }
        } else {
            CERT_NOT_MINIMAL
        };
        push("minimal", expected, residual, threshold, &mut checks)?;
    }

    if let Some(expected) = props.totally_geodesic {
        let mut residual = 0.0f64;
        for p in &points {
            let ii = f.second_fundamental_form(p)?;
            let g = f.ambient().metric_at(&f.map(p)?)?;
            for row in &ii {
                for v in row {
                    residual = residual.max((v.transpose() * &g * v)[(0, 0)].max(0.0).sqrt());
                }
            }
        }
        push("totally_geodesic", expected, residual, CERT_TOTALLY_GEODESIC, &mut checks)?;
    }

    if let Some(expected) = props.lagrangian {
        let mut residual = 0.0f64;
        for p in &points {
            residual = residual.max(pullback_form(f, p)?.bilinear.norm());
        }
        push("lagrangian", expected, residual, CERT_LAGRANGIAN, &mut checks)?;
    }

    if let Some(expected) = props.complex {
        let mut residual = 0.0f64;
        for p in &points {
            let spectrum = kahler_angles(f, p)?;
            for c in &spectrum.cosines {
                residual = residual.max(1.0 - c);
            }
        }
        push("complex", expected, residual, CERT_COMPLEX, &mut checks)?;
    }

    if let Some(expected) = props.pluriminimal {
        let mut residual = 0.0f64;
        for p in &points {
            residual = residual.max(pluriminimal_residual(f, p)?);
        }
        push("pluriminimal", expected, residual, CERT_PLURIMINIMAL, &mut checks)?;
    }

    if let Some(expected) = props.constant_angles {
        let reference = kahler_angles(f, &points[0])?.cosines;
        let mut residual = 0.0f64;
        for p in &points[1..] {
            let cosines = kahler_angles(f, p)?.cosines;
            for (c, r) in cosines.iter().zip(reference.iter()) {
                residual = residual.max((c - r).abs());
            }
        }
        push("constant_angles", expected, residual, CERT_ANGLE_SPREAD, &mut checks)?;
    }

    // Weierstrass data must parametrize a null curve: Σ φ_k(w)² = 0.
    if let MapKind::Weierstrass { f1, f2, g0 } = f.kind() {
        let phi = weierstrass_phi(f1, f2, g0);
        let mut residual = 0.0f64;
        for p in &points {
            let w = Complex64::new(p[0], p[1]);
            let total: Complex64 = phi.iter().map(|c| {
                let v = c.eval(w);
                v * v
            }).sum();
            residual = residual.max(total.norm());
        }
        push("null_curve_data", true, residual, CERT_NULL_CURVE, &mut checks)?;
    }

    Ok(checks)
}
