//! Immersions `F: M^{2n} → N` with 2-jet oracles.
//!
//! An [`Immersion`] couples a concrete map recipe ([`MapKind`]) with an
//! ambient space and a domain chart box. It exposes the value, first and
//! second partial derivatives, the induced metric `g_M = F*g`, domain
//! Christoffel symbols (computed from analytic derivatives of `g_M`, not
//! from an extra finite-difference layer), the second fundamental form
//! `∇dF(X,Y) = ∂²F + Γᴺ(dF,dF) − dF·Γᴹ` (normal-projected), the mean
//! curvature trace and its norm as a minimality residual.
//!
//! Jets are analytic per recipe by default; a finite-difference jet mode
//! exists so the analytic formulas can be cross-validated.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float-math methods (`sin`, `cos`, …) come from the trait in no_std builds;
// the inherent std methods shadow it under `cfg(test)`.
#[allow(unused_imports)]
use num_traits::Float;

use crate::ambient::{AmbientSpace, Christoffels};
use crate::linalg::{invert, sym_eigen_desc, RMat, RVec};
use crate::{GeometryError, Result, Tolerances};

/// A real multivariate polynomial, stored as a sum of monomial terms
/// `coefficient · Π x_k^{exponent_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    vars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Poly {
    /// Builds a polynomial in `vars` variables from `(coefficient,
    /// exponents)` terms; exponent vectors must have length `vars`.
    pub fn new(vars: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<Self> {
        for (_, exps) in &terms {
            if exps.len() != vars {
                return Err(GeometryError::InvalidParameter {
                    name: "polynomial term",
                    reason: format!("expected {vars} exponents, got {}", exps.len()),
                });
            }
        }
        Ok(Poly { vars, terms })
    }

    pub fn zero(vars: usize) -> Self {
        Poly { vars, terms: Vec::new() }
    }

    pub fn constant(vars: usize, c: f64) -> Self {
        Poly { vars, terms: vec![(c, vec![0; vars])] }
    }

    /// The coordinate function `x_k`.
    pub fn coordinate(vars: usize, k: usize) -> Self {
        let mut exps = vec![0; vars];
        exps[k] = 1;
        Poly { vars, terms: vec![(1.0, exps)] }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &[(f64, Vec<u32>)] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (xi, e) in x.iter().zip(exps) {
                t *= xi.powi(*e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Partial derivative with respect to variable `k`.
    pub fn derivative(&self, k: usize) -> Poly {
        let mut terms = Vec::new();
        for (c, exps) in &self.terms {
            if exps[k] == 0 {
                continue;
            }
            let mut d = exps.clone();
            d[k] -= 1;
            terms.push((*c * exps[k] as f64, d));
        }
        Poly { vars: self.vars, terms }
    }
}

/// A univariate complex polynomial `c₀ + c₁w + …`, evaluated by Horner's
/// rule. Used for holomorphic map data.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        CPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        CPoly::new(coeffs.iter().map(|c| Complex64::new(*c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        CPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    pub fn derivative(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly::constant(Complex64::new(0.0, 0.0));
        }
        CPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * (k as f64 + 1.0))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> CPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] = c / (k as f64 + 1.0);
        }
        CPoly::new(out)
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        CPoly::new(out)
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

/// The four components of the null holomorphic curve generated by
/// Weierstrass data `(f₁, f₂, g₀)`:
/// `φ = (g₀(1+f₁f₂)/2, ig₀(1−f₁f₂)/2, g₀(f₁−f₂)/2, ig₀(f₁+f₂)/2)`.
/// `Σφ_k² = 0` identically.
pub fn weierstrass_phi(f1: &CPoly, f2: &CPoly, g0: &CPoly) -> [CPoly; 4] {
    let one = CPoly::from_real(&[1.0]);
    let p = f1.mul(f2);
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    [
        g0.mul(&one.add(&p)).scale(half),
        g0.mul(&one.sub(&p)).scale(ihalf),
        g0.mul(&f1.sub(f2)).scale(half),
        g0.mul(&f1.add(f2)).scale(ihalf),
    ]
}

/// Recursive adaptive Simpson quadrature for a complex-valued integrand on
/// a real interval.
fn adaptive_simpson(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let refined = left + right;
    if depth == 0 || (refined - whole).norm() < 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `∫_a^b f(t) dt` for complex `f` on a real segment, adaptive to `tol`.
pub fn integrate_segment(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Quadrature tolerance for `F = Re ∫φ` (drives the adaptive subdivision).
pub const WEIERSTRASS_QUADRATURE_TOL: f64 = 1e-12;

/// Concrete map recipes. All recipes expose exact 2-jets per closed form;
/// the `Weierstrass` value is the only quantity computed by quadrature
/// (its derivatives are still closed-form).
#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// Componentwise real polynomial map.
    Polynomial { components: Vec<Poly> },
    /// `w ↦ (w, h(w))` into flat ℂ², a holomorphic graph (complex curve).
    HolomorphicGraph { h: CPoly },
    /// `w ↦ (cos(α/2)·h(w), sin(α/2)·conj(h(w)))` into flat ℂ²: a minimal
    /// surface of constant Kähler angle `α`.
    RotatedJCurve { alpha: f64, h: CPoly },
    /// Minimal surface `F = Re ∫φ` in flat ℂ² from Weierstrass data; `φ` is
    /// the null curve of [`weierstrass_phi`]. The integral runs along the
    /// axis-parallel path `(0,0) → (u,0) → (u,v)`.
    Weierstrass { f1: CPoly, f2: CPoly, g0: CPoly },
    /// `(u,v) ↦ (e^{iu}, e^{iv})` in the affine chart of ℂP²: the minimal
    /// Lagrangian Clifford torus.
    CliffordTorus,
    /// `(u,v) ↦ r(sin u cos v, sin u sin v, cos u, 0)`, the round sphere in
    /// ℝ³ ⊂ ℝ⁴ ≅ ℂ² (classical mean-curvature fixture, ‖H‖ = 2/r).
    RoundSphere { radius: f64 },
    /// Product immersion `(x, y) ↦ (F₁(x), F₂(y))` into the product ambient.
    Product { left: Box<Immersion>, right: Box<Immersion> },
}

impl MapKind {
    fn natural_domain_dim(&self) -> Option<usize> {
        match self {
            MapKind::Polynomial { components } => components.first().map(|p| p.vars()),
            MapKind::HolomorphicGraph { .. }
            | MapKind::RotatedJCurve { .. }
            | MapKind::Weierstrass { .. }
            | MapKind::CliffordTorus
            | MapKind::RoundSphere { .. } => Some(2),
            MapKind::Product { left, right } => Some(left.domain_dim() + right.domain_dim()),
        }
    }
}

/// How jets are produced: closed form, or order-4 central differences of the
/// map oracle (for cross-validation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetMode {
    Analytic,
    FiniteDiff { step: f64 },
}

/// Value and first/second partial derivatives of `F` at a domain point.
#[derive(Debug, Clone)]
pub struct ImmersionJet {
    /// `F(p)` in ambient chart coordinates.
    pub value: RVec,
    /// `N × m` matrix whose column `i` is `∂_i F`.
    pub d1: RMat,
    /// `d2[i][j] = ∂_i ∂_j F` (symmetric in `i, j`).
    pub d2: Vec<Vec<RVec>>,
}

/// An immersed submanifold presented by a map recipe, a domain chart box and
/// an ambient space. Domain dimension is half the ambient real dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Immersion {
    kind: MapKind,
    domain_dim: usize,
    chart: Vec<[f64; 2]>,
    ambient: AmbientSpace,
    jet_mode: JetMode,
    tol: Tolerances,
}

impl Immersion {
    pub fn new(kind: MapKind, ambient: AmbientSpace, chart: Vec<[f64; 2]>) -> Result<Self> {
        let domain_dim = kind.natural_domain_dim().ok_or(GeometryError::InvalidParameter {
            name: "components",
            reason: "polynomial immersion needs at least one component".into(),
        })?;
        if domain_dim == 0 || domain_dim % 2 != 0 {
            return Err(GeometryError::DimensionMismatch { expected: 2, found: domain_dim });
        }
        if ambient.real_dim() != 2 * domain_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: 2 * domain_dim,
                found: ambient.real_dim(),
            });
        }
        if chart.len() != domain_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: domain_dim,
                found: chart.len(),
            });
        }
        if let MapKind::Polynomial { components } = &kind {
            if components.len() != ambient.real_dim() {
                return Err(GeometryError::DimensionMismatch {
                    expected: ambient.real_dim(),
                    found: components.len(),
                });
            }
            if components.iter().any(|p| p.vars() != domain_dim) {
                return Err(GeometryError::InvalidParameter {
                    name: "components",
                    reason: "all components must share the domain variable count".into(),
                });
            }
        }
        Ok(Immersion {
            kind,
            domain_dim,
            chart,
            ambient,
            jet_mode: JetMode::Analytic,
            tol: Tolerances::default(),
        })
    }

    /// Product immersion; ambient is the product of the factors' ambients
    /// and the chart is the concatenation of the factor charts.
    pub fn product(left: Immersion, right: Immersion) -> Result<Self> {
        let ambient = AmbientSpace::product_of(left.ambient(), right.ambient());
        let mut chart = left.chart.clone();
        chart.extend(right.chart.iter().copied());
        Immersion::new(
            MapKind::Product { left: Box::new(left), right: Box::new(right) },
            ambient,
            chart,
        )
    }

    pub fn with_jet_mode(mut self, mode: JetMode) -> Self {
        self.jet_mode = mode;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn chart_box(&self) -> &[[f64; 2]] {
        &self.chart
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn jet_mode(&self) -> JetMode {
        self.jet_mode
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn chart_contains(&self, x: &RVec) -> bool {
        x.len() == self.domain_dim
            && x.iter().zip(&self.chart).all(|(v, r)| *v >= r[0] && *v <= r[1])
    }

    fn check_domain(&self, x: &RVec) -> Result<()> {
        if x.len() != self.domain_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.domain_dim,
                found: x.len(),
            });
        }
        if !self.chart_contains(x) {
            return Err(GeometryError::OutsideChart { what: "immersion domain" });
        }
        Ok(())
    }

    /// `F(x)` in ambient chart coordinates (checked to land in the chart).
    pub fn map(&self, x: &RVec) -> Result<RVec> {
        self.check_domain(x)?;
        let value = self.map_unchecked(x);
        if !self.ambient.chart_contains(&value) {
            return Err(GeometryError::OutsideChart { what: "ambient chart (image of F)" });
        }
        Ok(value)
    }

    fn map_unchecked(&self, x: &RVec) -> RVec {
        match &self.kind {
            MapKind::Polynomial { components } => {
                RVec::from_iterator(components.len(), components.iter().map(|p| p.eval(x.as_slice())))
            }
            MapKind::HolomorphicGraph { h } => {
                let w = Complex64::new(x[0], x[1]);
                let hw = h.eval(w);
                RVec::from_row_slice(&[w.re, w.im, hw.re, hw.im])
            }
            MapKind::RotatedJCurve { alpha, h } => {
                let w = Complex64::new(x[0], x[1]);
                rotated_components(*alpha, h.eval(w))
            }
            MapKind::Weierstrass { f1, f2, g0 } => {
                let phi = weierstrass_phi(f1, f2, g0);
                let (u, v) = (x[0], x[1]);
                let mut out = RVec::zeros(4);
                for (k, phik) in phi.iter().enumerate() {
                    // horizontal leg (0,0) → (u,0), dw = dt
                    let horiz = integrate_segment(
                        &|t| phik.eval(Complex64::new(t, 0.0)),
                        0.0,
                        u,
                        WEIERSTRASS_QUADRATURE_TOL,
                    );
                    // vertical leg (u,0) → (u,v), dw = i ds
                    let vert = integrate_segment(
                        &|s| phik.eval(Complex64::new(u, s)) * Complex64::new(0.0, 1.0),
                        0.0,
                        v,
                        WEIERSTRASS_QUADRATURE_TOL,
                    );
                    out[k] = (horiz + vert).re;
                }
                out
            }
            MapKind::CliffordTorus => {
                let (u, v) = (x[0], x[1]);
                RVec::from_row_slice(&[u.cos(), u.sin(), v.cos(), v.sin()])
            }
            MapKind::RoundSphere { radius } => {
                let (u, v) = (x[0], x[1]);
                RVec::from_row_slice(&[
                    radius * u.sin() * v.cos(),
                    radius * u.sin() * v.sin(),
                    radius * u.cos(),
                    0.0,
                ])
            }
            MapKind::Product { left, right } => {
                let (xl, xr) = split_point(x, left.domain_dim());
                let fl = left.map_unchecked(&xl);
                let fr = right.map_unchecked(&xr);
                stack_vec(&fl, &fr)
            }
        }
    }

    /// Value + first and second partials at `x`, per the active jet mode.
    pub fn jet(&self, x: &RVec) -> Result<ImmersionJet> {
        self.check_domain(x)?;
        let jet = match self.jet_mode {
            JetMode::Analytic => self.analytic_jet(x),
            JetMode::FiniteDiff { step } => self.fd_jet(x, step),
        };
        if !self.ambient.chart_contains(&jet.value) {
            return Err(GeometryError::OutsideChart { what: "ambient chart (image of F)" });
        }
        Ok(jet)
    }

    fn analytic_jet(&self, x: &RVec) -> ImmersionJet {
        let m = self.domain_dim;
        let nn = self.ambient.real_dim();
        match &self.kind {
            MapKind::Polynomial { components } => {
                let value = self.map_unchecked(x);
                let mut d1 = RMat::zeros(nn, m);
                let mut d2 = vec![vec![RVec::zeros(nn); m]; m];
                for (a, p) in components.iter().enumerate() {
                    for i in 0..m {
                        let pi = p.derivative(i);
                        d1[(a, i)] = pi.eval(x.as_slice());
                        for j in i..m {
                            let v = pi.derivative(j).eval(x.as_slice());
                            d2[i][j][a] = v;
                            if i != j {
                                d2[j][i][a] = v;
                            }
                        }
                    }
                }
                ImmersionJet { value, d1, d2 }
            }
            MapKind::HolomorphicGraph { h } => {
                let w = Complex64::new(x[0], x[1]);
                let (h1, h2) = (h.derivative().eval(w), h.derivative().derivative().eval(w));
                let value = self.map_unchecked(x);
                let mut d1 = RMat::zeros(4, 2);
                d1[(0, 0)] = 1.0;
                d1[(1, 1)] = 1.0;
                // ∂u(h∘w) = h', ∂v(h∘w) = i h'
                d1[(2, 0)] = h1.re;
                d1[(3, 0)] = h1.im;
                d1[(2, 1)] = -h1.im;
                d1[(3, 1)] = h1.re;
                let duu = RVec::from_row_slice(&[0.0, 0.0, h2.re, h2.im]);
                let duv = RVec::from_row_slice(&[0.0, 0.0, -h2.im, h2.re]);
                let dvv = RVec::from_row_slice(&[0.0, 0.0, -h2.re, -h2.im]);
                ImmersionJet { value, d1, d2: pack2(duu, duv, dvv) }
            }
            MapKind::RotatedJCurve { alpha, h } => {
                let w = Complex64::new(x[0], x[1]);
                let i = Complex64::new(0.0, 1.0);
                let h1 = h.derivative().eval(w);
                let h2 = h.derivative().derivative().eval(w);
                let value = self.map_unchecked(x);
                let cols = [h1, i * h1];
                let mut d1 = RMat::zeros(4, 2);
                for (c, dc) in cols.iter().enumerate() {
                    d1.set_column(c, &rotated_components(*alpha, *dc));
                }
                let d2 = pack2(
                    rotated_components(*alpha, h2),
                    rotated_components(*alpha, i * h2),
                    rotated_components(*alpha, -h2),
                );
                ImmersionJet { value, d1, d2 }
            }
            MapKind::Weierstrass { f1, f2, g0 } => {
                let phi = weierstrass_phi(f1, f2, g0);
                let w = Complex64::new(x[0], x[1]);
                let value = self.map_unchecked(x);
                let mut d1 = RMat::zeros(4, 2);
                let mut duu = RVec::zeros(4);
                let mut duv = RVec::zeros(4);
                let mut dvv = RVec::zeros(4);
                for (k, phik) in phi.iter().enumerate() {
                    let p = phik.eval(w);
                    let dp = phik.derivative().eval(w);
                    // F_k = Re ∫φ_k ⇒ ∂u F_k = Re φ_k, ∂v F_k = Re(iφ_k) = −Im φ_k
                    d1[(k, 0)] = p.re;
                    d1[(k, 1)] = -p.im;
                    duu[k] = dp.re;
                    duv[k] = -dp.im;
                    dvv[k] = -dp.re;
                }
                ImmersionJet { value, d1, d2: pack2(duu, duv, dvv) }
            }
            MapKind::CliffordTorus => {
                let (u, v) = (x[0], x[1]);
                let value = self.map_unchecked(x);
                let mut d1 = RMat::zeros(4, 2);
                d1[(0, 0)] = -u.sin();
                d1[(1, 0)] = u.cos();
                d1[(2, 1)] = -v.sin();
                d1[(3, 1)] = v.cos();
                let duu = RVec::from_row_slice(&[-u.cos(), -u.sin(), 0.0, 0.0]);
                let duv = RVec::zeros(4);
                let dvv = RVec::from_row_slice(&[0.0, 0.0, -v.cos(), -v.sin()]);
                ImmersionJet { value, d1, d2: pack2(duu, duv, dvv) }
            }
            MapKind::RoundSphere { radius } => {
                let (r, u, v) = (*radius, x[0], x[1]);
                let value = self.map_unchecked(x);
                let mut d1 = RMat::zeros(4, 2);
                d1[(0, 0)] = r * u.cos() * v.cos();
                d1[(1, 0)] = r * u.cos() * v.sin();
                d1[(2, 0)] = -r * u.sin();
                d1[(0, 1)] = -r * u.sin() * v.sin();
                d1[(1, 1)] = r * u.sin() * v.cos();
                let duu =
                    RVec::from_row_slice(&[-r * u.sin() * v.cos(), -r * u.sin() * v.sin(), -r * u.cos(), 0.0]);
                let duv = RVec::from_row_slice(&[-r * u.cos() * v.sin(), r * u.cos() * v.cos(), 0.0, 0.0]);
                let dvv = RVec::from_row_slice(&[-r * u.sin() * v.cos(), -r * u.sin() * v.sin(), 0.0, 0.0]);
                ImmersionJet { value, d1, d2: pack2(duu, duv, dvv) }
            }
            MapKind::Product { left, right } => {
                let ml = left.domain_dim();
                let (xl, xr) = split_point(x, ml);
                let jl = left.analytic_jet(&xl);
                let jr = right.analytic_jet(&xr);
                let nl = jl.value.len();
                let value = stack_vec(&jl.value, &jr.value);
                let mut d1 = RMat::zeros(nn, m);
                d1.view_mut((0, 0), (nl, ml)).copy_from(&jl.d1);
                d1.view_mut((nl, ml), (nn - nl, m - ml)).copy_from(&jr.d1);
                let mut d2 = vec![vec![RVec::zeros(nn); m]; m];
                for i in 0..ml {
                    for j in 0..ml {
                        d2[i][j].rows_mut(0, nl).copy_from(&jl.d2[i][j]);
                    }
                }
                for i in ml..m {
                    for j in ml..m {
                        d2[i][j].rows_mut(nl, nn - nl).copy_from(&jr.d2[i - ml][j - ml]);
                    }
                }
                ImmersionJet { value, d1, d2 }
            }
        }
    }

    /// Order-4 central-difference jet of the map oracle.
    fn fd_jet(&self, x: &RVec, h: f64) -> ImmersionJet {
        let m = self.domain_dim;
        let nn = self.ambient.real_dim();
        let value = self.map_unchecked(x);
        let fd1 = |p: &RVec, i: usize| -> RVec {
            let ev = |t: f64| {
                let mut q = p.clone();
                q[i] += t;
                self.map_unchecked(&q)
            };
            (ev(-2.0 * h) - ev(2.0 * h) + (ev(h) - ev(-h)) * 8.0) / (12.0 * h)
        };
        let mut d1 = RMat::zeros(nn, m);
        for i in 0..m {
            d1.set_column(i, &fd1(x, i));
        }
        let mut d2 = vec![vec![RVec::zeros(nn); m]; m];
        for i in 0..m {
            for j in i..m {
                let ev = |t: f64| {
                    let mut q = x.clone();
                    q[j] += t;
                    fd1(&q, i)
                };
                let v = (ev(-2.0 * h) - ev(2.0 * h) + (ev(h) - ev(-h)) * 8.0) / (12.0 * h);
                d2[i][j] = v.clone();
                d2[j][i] = v;
            }
        }
        ImmersionJet { value, d1, d2 }
    }

    /// `dF` at `x` as an `N × m` matrix.
    pub fn differential(&self, x: &RVec) -> Result<RMat> {
        Ok(self.jet(x)?.d1)
    }

    /// Induced metric `g_M = dFᵀ (g∘F) dF`, with a scale-free rank check:
    /// the singular-value ratio of `dF` must exceed the rank tolerance.
    pub fn induced_metric(&self, x: &RVec) -> Result<RMat> {
        let jet = self.jet(x)?;
        self.induced_metric_from_jet(&jet)
    }

    pub(crate) fn induced_metric_from_jet(&self, jet: &ImmersionJet) -> Result<RMat> {
        let g_ambient = self.ambient.metric_at(&jet.value)?;
        let gm = jet.d1.transpose() * g_ambient * &jet.d1;
        let (eigs, _) = sym_eigen_desc(&gm);
        let largest = eigs[0];
        let smallest = *eigs.last().unwrap();
        if !(largest > 0.0) {
            return Err(GeometryError::NotPositiveDefinite { what: "induced metric" });
        }
        let ratio = if smallest <= 0.0 { 0.0 } else { (smallest / largest).sqrt() };
        if ratio <= self.tol.rank {
            return Err(GeometryError::DegenerateDifferential { singular_value_ratio: ratio });
        }
        Ok(gm)
    }

    /// First partials of the induced metric, `out[k] = ∂_k g_M`, assembled
    /// from the analytic 2-jet and the ambient metric derivative oracle
    /// (no extra finite-difference layer).
    pub fn induced_metric_d1(&self, x: &RVec) -> Result<Vec<RMat>> {
        let jet = self.jet(x)?;
        let g = self.ambient.metric_at(&jet.value)?;
        let dg = self.ambient.metric_d1_at(&jet.value)?;
        let m = self.domain_dim;
        let mut out = vec![RMat::zeros(m, m); m];
        for k in 0..m {
            // chain rule: ∂_k [dFᵀ g dF] with ∂_k g = Σ_C ∂g/∂y^C ∂_k F^C
            let mut gk = RMat::zeros(g.nrows(), g.ncols());
            for c in 0..g.nrows() {
                gk += &dg[c] * jet.d1[(c, k)];
            }
            let dk: Vec<RVec> = (0..m).map(|i| jet.d2[k][i].clone()).collect();
            for i in 0..m {
                for j in 0..m {
                    let col_i = jet.d1.column(i);
                    let col_j = jet.d1.column(j);
                    out[k][(i, j)] = (dk[i].transpose() * &g * col_j)[(0, 0)]
                        + (col_i.transpose() * &g * &dk[j])[(0, 0)]
                        + (col_i.transpose() * &gk * col_j)[(0, 0)];
                }
            }
        }
        Ok(out)
    }

    /// Christoffel symbols of the induced metric.
    pub fn domain_christoffels(&self, x: &RVec) -> Result<Christoffels> {
        let gm = self.induced_metric(x)?;
        let d1 = self.induced_metric_d1(x)?;
        let ginv = invert(&gm, "induced metric")?;
        let m = self.domain_dim;
        let mut gamma = vec![RMat::zeros(m, m); m];
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut acc = 0.0;
                    for l in 0..m {
                        acc += ginv[(k, l)] * (d1[i][(l, j)] + d1[j][(l, i)] - d1[l][(i, j)]);
                    }
                    gamma[k][(i, j)] = 0.5 * acc;
                }
            }
        }
        Ok(Christoffels { gamma })
    }

    /// Second fundamental form before normal projection:
    /// `∂_i∂_j F + Γᴺ(∂_iF, ∂_jF) − Σ_k Γᴹ^k_{ij} ∂_kF`.
    /// Mathematically this is already normal-valued; the residual tangential
    /// part measures jet/oracle error.
    pub fn second_fundamental_form_raw(&self, x: &RVec) -> Result<Vec<Vec<RVec>>> {
        let jet = self.jet(x)?;
        let gamma_n = self.ambient.christoffel_at(&jet.value)?;
        let gamma_m = self.domain_christoffels(x)?;
        let m = self.domain_dim;
        let mut out = vec![vec![RVec::zeros(self.ambient.real_dim()); m]; m];
        for i in 0..m {
            for j in 0..m {
                let di = RVec::from(jet.d1.column(i));
                let dj = RVec::from(jet.d1.column(j));
                let mut v = jet.d2[i][j].clone() + gamma_n.contract(&di, &dj);
                for k in 0..m {
                    v -= RVec::from(jet.d1.column(k)) * gamma_m.gamma[k][(i, j)];
                }
                out[i][j] = v;
            }
        }
        Ok(out)
    }

    /// Second fundamental form `∇dF(∂_i, ∂_j)`, normal-projected.
    pub fn second_fundamental_form(&self, x: &RVec) -> Result<Vec<Vec<RVec>>> {
        let raw = self.second_fundamental_form_raw(x)?;
        let mut out = raw;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v = self.normal_projection(x, v)?;
            }
        }
        Ok(out)
    }

    /// Mean curvature vector `trace_{g_M} ∇dF = Σ g_M^{ij} ∇dF(∂_i, ∂_j)`
    /// (sum over a g_M-orthonormal basis; not averaged).
    pub fn mean_curvature(&self, x: &RVec) -> Result<RVec> {
        let ii = self.second_fundamental_form(x)?;
        let gm = self.induced_metric(x)?;
        let ginv = invert(&gm, "induced metric")?;
        let m = self.domain_dim;
        let mut h = RVec::zeros(self.ambient.real_dim());
        for i in 0..m {
            for j in 0..m {
                h += &ii[i][j] * ginv[(i, j)];
            }
        }
        Ok(h)
    }

    /// Ambient g-norm of the mean curvature vector; `< tol` iff minimal at `x`.
    pub fn minimality_residual(&self, x: &RVec) -> Result<f64> {
        let h = self.mean_curvature(x)?;
        let g = self.ambient.metric_at(&self.map(x)?)?;
        Ok((h.transpose() * g * &h)[(0, 0)].max(0.0).sqrt())
    }

    /// Projector onto `dF(T_xM)` as an `N × N` matrix acting on ambient
    /// vectors: `P = dF g_M⁻¹ dFᵀ g`. Idempotent and g-self-adjoint.
    pub fn tangent_projector(&self, x: &RVec) -> Result<RMat> {
        let jet = self.jet(x)?;
        let gm = self.induced_metric_from_jet(&jet)?;
        let g = self.ambient.metric_at(&jet.value)?;
        let ginv = invert(&gm, "induced metric")?;
        Ok(&jet.d1 * ginv * jet.d1.transpose() * g)
    }

    /// Orthogonal projection of an ambient vector at `F(x)` onto the normal
    /// space of the immersion.
    pub fn normal_projection(&self, x: &RVec, v: &RVec) -> Result<RVec> {
        let p = self.tangent_projector(x)?;
        Ok(v - p * v)
    }
}

/// Real components of `(cos(α/2)·p, sin(α/2)·conj(p))` in flat ℂ².
fn rotated_components(alpha: f64, p: Complex64) -> RVec {
    let c = (0.5 * alpha).cos();
    let s = (0.5 * alpha).sin();
    RVec::from_row_slice(&[c * p.re, c * p.im, s * p.re, -s * p.im])
}

fn pack2(duu: RVec, duv: RVec, dvv: RVec) -> Vec<Vec<RVec>> {
    vec![vec![duu, duv.clone()], vec![duv, dvv]]
}

fn split_point(x: &RVec, ml: usize) -> (RVec, RVec) {
    let xl = RVec::from_row_slice(&x.as_slice()[..ml]);
    let xr = RVec::from_row_slice(&x.as_slice()[ml..]);
    (xl, xr)
}

fn stack_vec(a: &RVec, b: &RVec) -> RVec {
    let mut out = RVec::zeros(a.len() + b.len());
    out.rows_mut(0, a.len()).copy_from(a);
    out.rows_mut(a.len(), b.len()).copy_from(b);
    out
}

/// Convenience: the linear Lagrangian plane `(x, y) ↦ (x, 0, 0, y)` in flat
/// ℂ² on the given square chart.
pub fn lagrangian_plane(half_width: f64) -> Result<Immersion> {
    let ambient = AmbientSpace::from_catalog("flat:C2")?;
    let components = vec![
        Poly::coordinate(2, 0),
        Poly::zero(2),
        Poly::zero(2),
        Poly::coordinate(2, 1),
    ];
    Immersion::new(
        MapKind::Polynomial { components },
        ambient,
        vec![[-half_width, half_width]; 2],
    )
}
