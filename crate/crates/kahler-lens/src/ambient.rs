//! Ambient Kähler(-Einstein) spaces given as metric + complex-structure
//! oracles on a single chart.
//!
//! A space is a product of scaled factors (flat ℂ^m, the Poincaré disk with
//! Gauss curvature −1, or ℂP² with Fubini–Study metric of holomorphic
//! sectional curvature 4). All factors are presented in holomorphic
//! coordinates, so the complex structure is the constant standard block
//! matrix and the Kähler form is `ω(U, V) = g(JU, V)`.
//!
//! Curvature follows the conventions
//! `R(U,V)W = −∇_U∇_V W + ∇_V∇_U W + ∇_{[U,V]}W` and
//! `R(U,V,W,Z) = g(R(U,V)W, Z)`, under which `R(X,Y,X,Y)` is the sectional
//! curvature of an orthonormal pair (the Poincaré disk yields −1; this sign
//! mapping is pinned by a test). The Ricci tensor is the Kähler contraction
//! `Ricci(U,V) = −½ trace(Z ↦ R(U, JV) J Z)`.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// Float-math methods (`powf`, `sqrt`, …) come from the trait in no_std
// builds; the inherent std methods shadow it under `cfg(test)`.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{invert, RMat, RVec};
use crate::{GeometryError, Result};
use num_complex::Complex64;

/// Finite-difference step for derivative oracles without a closed form,
/// `eps^(1/5) ≈ 7.4e-4`, balancing truncation against rounding.
fn fd_metric_step() -> f64 {
    f64::EPSILON.powf(0.2)
}

/// One Kähler factor of an ambient product space, in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// Flat ℂ^m = ℝ^{2m} with the Euclidean metric.
    FlatComplex { complex_dim: usize },
    /// Poincaré disk `{|z| < 1}` with metric `4(dx² + dy²)/(1 − |z|²)²`
    /// (Gauss curvature −1, Einstein constant −1).
    PoincareDisk,
    /// Affine chart of ℂP² with the Fubini–Study metric normalised to
    /// holomorphic sectional curvature 4 (Einstein constant 6).
    FubiniStudyCP2,
}

impl Factor {
    pub fn real_dim(&self) -> usize {
        match self {
            Factor::FlatComplex { complex_dim } => 2 * complex_dim,
            Factor::PoincareDisk => 2,
            Factor::FubiniStudyCP2 => 4,
        }
    }

    /// Einstein constant of the *unscaled* factor metric.
    pub fn einstein_constant(&self) -> f64 {
        match self {
            Factor::FlatComplex { .. } => 0.0,
            Factor::PoincareDisk => -1.0,
            // Numerically cross-checked fixture; see the curvature tests.
            Factor::FubiniStudyCP2 => 6.0,
        }
    }

    /// Whether metric derivatives come from closed forms (otherwise they are
    /// order-4 central differences of the metric oracle).
    pub fn analytic_derivatives(&self) -> bool {
        !matches!(self, Factor::FubiniStudyCP2)
    }

    fn default_chart(&self) -> Vec<[f64; 2]> {
        match self {
            Factor::FlatComplex { complex_dim } => vec![[-50.0, 50.0]; 2 * complex_dim],
            Factor::PoincareDisk => vec![[-1.0, 1.0]; 2],
            Factor::FubiniStudyCP2 => vec![[-10.0, 10.0]; 4],
        }
    }

    fn chart_contains(&self, q: &[f64], chart: &[[f64; 2]]) -> bool {
        for (v, r) in q.iter().zip(chart) {
            if !(*v >= r[0] && *v <= r[1]) {
                return false;
            }
        }
        if matches!(self, Factor::PoincareDisk) {
            // Keep a safety margin from the conformal boundary.
            return q[0] * q[0] + q[1] * q[1] < 1.0 - 1e-6;
        }
        true
    }

    /// Metric matrix at local coordinates `q`.
    pub fn metric(&self, q: &[f64]) -> RMat {
        match self {
            Factor::FlatComplex { complex_dim } => RMat::identity(2 * complex_dim, 2 * complex_dim),
            Factor::PoincareDisk => {
                let lam = disk_conformal(q);
                RMat::from_diagonal_element(2, 2, lam)
            }
            Factor::FubiniStudyCP2 => fs_metric(q),
        }
    }

    /// First derivatives of the metric: `out[k] = ∂_k g`.
    pub fn metric_d1(&self, q: &[f64]) -> Vec<RMat> {
        match self {
            Factor::FlatComplex { complex_dim } => {
                vec![RMat::zeros(2 * complex_dim, 2 * complex_dim); 2 * complex_dim]
            }
            Factor::PoincareDisk => {
                let (dx, dy) = disk_conformal_d1(q);
                vec![
                    RMat::from_diagonal_element(2, 2, dx),
                    RMat::from_diagonal_element(2, 2, dy),
                ]
            }
            Factor::FubiniStudyCP2 => {
                let h = fd_metric_step();
                (0..4).map(|k| fd1_mat(&fs_metric, q, k, h)).collect()
            }
        }
    }

    /// Second derivatives of the metric: `out[k][l] = ∂_k ∂_l g`.
    pub fn metric_d2(&self, q: &[f64]) -> Vec<Vec<RMat>> {
        match self {
            Factor::FlatComplex { complex_dim } => {
                let d = 2 * complex_dim;
                vec![vec![RMat::zeros(d, d); d]; d]
            }
            Factor::PoincareDisk => {
                let hess = disk_conformal_d2(q);
                (0..2)
                    .map(|k| {
                        (0..2)
                            .map(|l| RMat::from_diagonal_element(2, 2, hess[k][l]))
                            .collect()
                    })
                    .collect()
            }
            Factor::FubiniStudyCP2 => {
                let h = fd_metric_step();
                (0..4)
                    .map(|k| {
                        (0..4)
                            .map(|l| {
                                fd1_mat(&|p: &[f64]| fd1_mat(&fs_metric, p, l, h), q, k, h)
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// Constant standard complex structure in holomorphic chart coordinates:
    /// `J ∂x_k = ∂y_k`, `J ∂y_k = −∂x_k`.
    pub fn complex_structure(&self) -> RMat {
        let d = self.real_dim();
        let mut j = RMat::zeros(d, d);
        for a in 0..d / 2 {
            j[(2 * a + 1, 2 * a)] = 1.0;
            j[(2 * a, 2 * a + 1)] = -1.0;
        }
        j
    }
}

/// Conformal factor of the Poincaré metric, `λ = 4/(1 − r²)²`.
fn disk_conformal(q: &[f64]) -> f64 {
    let s = 1.0 - q[0] * q[0] - q[1] * q[1];
    4.0 / (s * s)
}

fn disk_conformal_d1(q: &[f64]) -> (f64, f64) {
    let s = 1.0 - q[0] * q[0] - q[1] * q[1];
    let c = 16.0 / (s * s * s);
    (c * q[0], c * q[1])
}

fn disk_conformal_d2(q: &[f64]) -> [[f64; 2]; 2] {
    let (x, y) = (q[0], q[1]);
    let s = 1.0 - x * x - y * y;
    let s3 = s * s * s;
    let s4 = s3 * s;
    let dxx = 16.0 / s3 + 96.0 * x * x / s4;
    let dyy = 16.0 / s3 + 96.0 * y * y / s4;
    let dxy = 96.0 * x * y / s4;
    [[dxx, dxy], [dxy, dyy]]
}

/// Fubini–Study real metric from the Kähler potential `½ log(1 + |z|²)`:
/// `g_{ij̄} = ½ (δ_ij d − z̄_i z_j)/d²`, `d = 1 + |z|²`, expanded into real
/// coordinates `(x₁, y₁, x₂, y₂)`.
fn fs_metric(q: &[f64]) -> RMat {
    let z = [Complex64::new(q[0], q[1]), Complex64::new(q[2], q[3])];
    let d = 1.0 + z[0].norm_sqr() + z[1].norm_sqr();
    let mut g = RMat::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            let delta = if a == b { 1.0 } else { 0.0 };
            let hab = (Complex64::new(delta * d, 0.0) - z[a].conj() * z[b]) * (0.5 / (d * d));
            g[(2 * a, 2 * b)] = 2.0 * hab.re;
            g[(2 * a + 1, 2 * b + 1)] = 2.0 * hab.re;
            g[(2 * a, 2 * b + 1)] = 2.0 * hab.im;
            g[(2 * a + 1, 2 * b)] = -2.0 * hab.im;
        }
    }
    g
}

/// Order-4 central difference of a matrix-valued function along axis `k`.
fn fd1_mat(f: &dyn Fn(&[f64]) -> RMat, q: &[f64], k: usize, h: f64) -> RMat {
    let eval = |t: f64| -> RMat {
        let mut p = q.to_owned();
        p[k] += t;
        f(&p)
    };
    (eval(-2.0 * h) - eval(2.0 * h) + (eval(h) - eval(-h)) * 8.0) / (12.0 * h)
}

/// Christoffel symbols at a point: `gamma[k][(i, j)] = Γ^k_{ij}`.
#[derive(Debug, Clone)]
pub struct Christoffels {
    pub gamma: Vec<RMat>,
}

impl Christoffels {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `Γ(u, v)` as a vector: `Σ_{ij} Γ^k_{ij} u^i v^j`.
    pub fn contract(&self, u: &RVec, v: &RVec) -> RVec {
        RVec::from_fn(self.dim(), |k, _| (u.transpose() * &self.gamma[k] * v)[(0, 0)])
    }

    /// The matrix `(Γ_k)^i_j = Γ^i_{kj}` of the directional derivative along
    /// coordinate `k`, as needed for `∇_{∂k} V = ∂_k V + Γ_k V`.
    pub fn direction_matrix(&self, k: usize) -> RMat {
        let d = self.dim();
        RMat::from_fn(d, d, |i, j| self.gamma[i][(k, j)])
    }
}

/// Fully lowered curvature tensor `R_{ijkl} = g(R(∂i, ∂j)∂k, ∂l)`.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    dim: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    fn zeros(dim: usize) -> Self {
        CurvatureTensor { dim, data: vec![0.0; dim * dim * dim * dim] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let at = self.idx(i, j, k, l);
        self.data[at] = v;
    }

    /// Multilinear evaluation on real vectors.
    pub fn apply(&self, u: &RVec, v: &RVec, w: &RVec, z: &RVec) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if v[j] == 0.0 {
                    continue;
                }
                for k in 0..d {
                    if w[k] == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        acc += u[i] * v[j] * w[k] * z[l] * self.get(i, j, k, l);
                    }
                }
            }
        }
        acc
    }

    /// Complex multilinear evaluation (the bilinear extension in each slot).
    pub fn apply_complex(
        &self,
        u: &crate::linalg::CVec,
        v: &crate::linalg::CVec,
        w: &crate::linalg::CVec,
        z: &crate::linalg::CVec,
    ) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                let uv = u[i] * v[j];
                if uv.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..d {
                    for l in 0..d {
                        acc += uv * w[k] * z[l] * self.get(i, j, k, l);
                    }
                }
            }
        }
        acc
    }

    /// Maximum absolute entry, handy for residual scales.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Part {
    factor: Factor,
    scale: f64,
    chart: Vec<[f64; 2]>,
}

/// A product of scaled Kähler factors, presented as evaluable oracles on a
/// chart. Real dimension is `4n`; immersions into it have domain dimension
/// `2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpace {
    parts: Vec<Part>,
    name: String,
    einstein_override: Option<f64>,
}

impl AmbientSpace {
    /// Builds one of the named catalog spaces:
    /// `flat:C2`, `flat:C4`, `torus:T4`, `cp2:fs`, `diskxdisk`.
    pub fn from_catalog(id: &str) -> Result<Self> {
        match id {
            "flat:C2" => Self::product(vec![(Factor::FlatComplex { complex_dim: 2 }, 1.0)], id),
            "flat:C4" => Self::product(vec![(Factor::FlatComplex { complex_dim: 4 }, 1.0)], id),
            "torus:T4" => {
                let mut space =
                    Self::product(vec![(Factor::FlatComplex { complex_dim: 2 }, 1.0)], id)?;
                // Chart-local fundamental domain with margin.
                space.parts[0].chart = vec![[-1.25, 1.25]; 4];
                Ok(space)
            }
            "cp2:fs" => Self::product(vec![(Factor::FubiniStudyCP2, 1.0)], id),
            "diskxdisk" => Self::product(
                vec![(Factor::PoincareDisk, 1.0), (Factor::PoincareDisk, 1.0)],
                id,
            ),
            other => Err(GeometryError::UnknownCatalogId(other.into())),
        }
    }

    /// Assembles a product of scaled factors. The metric of each factor is
    /// multiplied by `scale²` (so lengths scale by `scale`), and the total
    /// real dimension must be a positive multiple of 4.
    pub fn product(factors: Vec<(Factor, f64)>, name: &str) -> Result<Self> {
        let mut parts = Vec::with_capacity(factors.len());
        let mut dim = 0;
        for (factor, scale) in factors {
            if !(scale > 0.0) {
                return Err(GeometryError::InvalidParameter {
                    name: "scale",
                    reason: format!("must be positive, got {scale}"),
                });
            }
            dim += factor.real_dim();
            let chart = factor.default_chart();
            parts.push(Part { factor, scale, chart });
        }
        if dim == 0 || dim % 4 != 0 {
            return Err(GeometryError::DimensionMismatch { expected: 4 * (dim / 4 + 1), found: dim });
        }
        Ok(AmbientSpace { parts, name: name.into(), einstein_override: None })
    }

    /// Builds a product from factor id strings (`flat:C1`, `flat:C2`,
    /// `flat:C4`, `disk`, `cp2:fs`) with per-factor scales.
    pub fn product_from_ids(factors: &[(&str, f64)], name: &str) -> Result<Self> {
        let mut parsed = Vec::with_capacity(factors.len());
        for (id, scale) in factors {
            let factor = match *id {
                "flat:C1" => Factor::FlatComplex { complex_dim: 1 },
                "flat:C2" => Factor::FlatComplex { complex_dim: 2 },
                "flat:C4" => Factor::FlatComplex { complex_dim: 4 },
                "disk" => Factor::PoincareDisk,
                "cp2:fs" => Factor::FubiniStudyCP2,
                other => return Err(GeometryError::UnknownCatalogId(other.into())),
            };
            parsed.push((factor, *scale));
        }
        Self::product(parsed, name)
    }

    /// Concatenates two spaces into their Riemannian/Kähler product.
    pub fn product_of(a: &AmbientSpace, b: &AmbientSpace) -> Self {
        let mut parts = a.parts.clone();
        parts.extend(b.parts.iter().cloned());
        AmbientSpace {
            parts,
            name: format!("{} x {}", a.name, b.name),
            einstein_override: None,
        }
    }

    /// Overrides the Einstein constant *declaration* without changing the
    /// geometry. This deliberately produces an inconsistent space; it exists
    /// so tests can demonstrate obstructions (a check that must fail when the
    /// declared constant contradicts the actual curvature).
    pub fn with_declared_einstein(mut self, r: f64) -> Self {
        self.einstein_override = Some(r);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn real_dim(&self) -> usize {
        self.parts.iter().map(|p| p.factor.real_dim()).sum()
    }

    /// Complex dimension of the ambient space (`2n`).
    pub fn complex_dim(&self) -> usize {
        self.real_dim() / 2
    }

    /// `(offset, real_dim, scale)` of each factor block.
    pub fn block_layout(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.parts.len());
        let mut off = 0;
        for p in &self.parts {
            let d = p.factor.real_dim();
            out.push((off, d, p.scale));
            off += d;
        }
        out
    }

    /// Chart box of the assembled space.
    pub fn chart_box(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.real_dim());
        for p in &self.parts {
            out.extend(p.chart.iter().copied());
        }
        out
    }

    pub fn chart_contains(&self, q: &RVec) -> bool {
        if q.len() != self.real_dim() {
            return false;
        }
        let mut off = 0;
        for p in &self.parts {
            let d = p.factor.real_dim();
            let local = q.as_slice()[off..off + d].to_owned();
            if !p.factor.chart_contains(&local, &p.chart) {
                return false;
            }
            off += d;
        }
        true
    }

    fn check_chart(&self, q: &RVec) -> Result<()> {
        if q.len() != self.real_dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.real_dim(),
                found: q.len(),
            });
        }
        if !self.chart_contains(q) {
            return Err(GeometryError::OutsideChart { what: "ambient space" });
        }
        Ok(())
    }

    /// Metric oracle: block-diagonal over factors, each scaled by `scale²`.
    pub fn metric_at(&self, q: &RVec) -> Result<RMat> {
        self.check_chart(q)?;
        let dim = self.real_dim();
        let mut g = RMat::zeros(dim, dim);
        let mut off = 0;
        for p in &self.parts {
            let d = p.factor.real_dim();
            let local = q.as_slice()[off..off + d].to_owned();
            let block = p.factor.metric(&local) * (p.scale * p.scale);
            g.view_mut((off, off), (d, d)).copy_from(&block);
            off += d;
        }
        Ok(g)
    }

    /// First derivatives of the metric: `out[k] = ∂_k g` (assembled, scaled).
    pub fn metric_d1_at(&self, q: &RVec) -> Result<Vec<RMat>> {
        self.check_chart(q)?;
        let dim = self.real_dim();
        let mut out = vec![RMat::zeros(dim, dim); dim];
        let mut off = 0;
        for p in &self.parts {
            let d = p.factor.real_dim();
            let local = q.as_slice()[off..off + d].to_owned();
            let d1 = p.factor.metric_d1(&local);
            for k in 0..d {
                let block = &d1[k] * (p.scale * p.scale);
                out[off + k].view_mut((off, off), (d, d)).copy_from(&block);
            }
            off += d;
        }
        Ok(out)
    }

    /// Complex-structure oracle (constant per chart, block standard).
    pub fn complex_structure_at(&self, q: &RVec) -> Result<RMat> {
        self.check_chart(q)?;
        let dim = self.real_dim();
        let mut j = RMat::zeros(dim, dim);
        let mut off = 0;
        for p in &self.parts {
            let d = p.factor.real_dim();
            j.view_mut((off, off), (d, d)).copy_from(&p.factor.complex_structure());
            off += d;
        }
        Ok(j)
    }

    /// Kähler form as a matrix of components `ω_ij = ω(∂i, ∂j) = g(J∂i, ∂j)`.
    pub fn kahler_form_at(&self, q: &RVec) -> Result<RMat> {
        let g = self.metric_at(q)?;
        let j = self.complex_structure_at(q)?;
        Ok(j.transpose() * g)
    }

    /// Christoffel symbols `Γ^k_{ij}` of the Levi-Civita connection
    /// (block-diagonal; invariant under the constant factor scales).
    pub fn christoffel_at(&self, q: &RVec) -> Result<Christoffels> {
        self.check_chart(q)?;
        let dim = self.real_dim();
        let mut gamma = vec![RMat::zeros(dim, dim); dim];
        let mut off = 0;
        for p in &self.parts {
            let d = p.factor.real_dim();
            let local = q.as_slice()[off..off + d].to_owned();
            let g = p.factor.metric(&local);
            let d1 = p.factor.metric_d1(&local);
            let ginv = invert(&g, "factor metric")?;
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = 0.0;
                        for l in 0..d {
                            acc += ginv[(k, l)]
                                * (d1[i][(l, j)] + d1[j][(l, i)] - d1[l][(i, j)]);
                        }
                        gamma[off + k][(off + i, off + j)] = 0.5 * acc;
                    }
                }
            }
            off += d;
        }
        Ok(Christoffels { gamma })
    }

    /// Fully lowered curvature tensor at `q` (factor blocks scaled by
    /// `scale²`; mixed-factor components vanish).
    pub fn curvature_at(&self, q: &RVec) -> Result<CurvatureTensor> {
        self.check_chart(q)?;
        let dim = self.real_dim();
        let mut r = CurvatureTensor::zeros(dim);
        let mut off = 0;
        for p in &self.parts {
            let d = p.factor.real_dim();
            let local = q.as_slice()[off..off + d].to_owned();
            let block = factor_curvature(&p.factor, &local)?;
            let s2 = p.scale * p.scale;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            r.set(
                                off + i,
                                off + j,
                                off + k,
                                off + l,
                                s2 * block.get(i, j, k, l),
                            );
                        }
                    }
                }
            }
            off += d;
        }
        Ok(r)
    }

    /// Ricci tensor via the Kähler contraction
    /// `Ricci(U, V) = −½ trace(Z ↦ R(U, JV) J Z)`, evaluated on the
    /// coordinate basis.
    pub fn ricci_at(&self, q: &RVec) -> Result<RMat> {
        let r = self.curvature_at(q)?;
        let g = self.metric_at(q)?;
        let j = self.complex_structure_at(q)?;
        let ginv = invert(&g, "ambient metric")?;
        let dim = self.real_dim();
        let mut ric = RMat::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                let mut tr = 0.0;
                // trace over k of the endomorphism Z ↦ R(e_a, Je_b) J Z,
                // expanded through the lowered tensor with g⁻¹.
                for k in 0..dim {
                    for l in 0..dim {
                        if ginv[(k, l)] == 0.0 {
                            continue;
                        }
                        for jb in 0..dim {
                            if j[(jb, b)] == 0.0 {
                                continue;
                            }
                            for m in 0..dim {
                                if j[(m, k)] == 0.0 {
                                    continue;
                                }
                                tr += ginv[(k, l)] * j[(jb, b)] * j[(m, k)] * r.get(a, jb, m, l);
                            }
                        }
                    }
                }
                ric[(a, b)] = -0.5 * tr;
            }
        }
        Ok(ric)
    }

    /// Einstein constant `R` with `Ricci = R·g`, if the space is
    /// Kähler–Einstein. A declared override (synthetic fixture) wins.
    pub fn einstein_constant(&self) -> Option<f64> {
        if let Some(r) = self.einstein_override {
            return Some(r);
        }
        let mut common: Option<f64> = None;
        for p in &self.parts {
            let r = p.factor.einstein_constant() / (p.scale * p.scale);
            match common {
                None => common = Some(r),
                Some(c) if (c - r).abs() < 1e-12 => {}
                Some(_) => return None,
            }
        }
        common
    }

    /// Whether any factor resorts to finite-difference metric derivatives.
    pub fn has_fd_derivatives(&self) -> bool {
        self.parts.iter().any(|p| !p.factor.analytic_derivatives())
    }
}

/// Curvature of a single unscaled factor from `(g, ∂g, ∂²g)`:
/// `R^m_{kij} = −∂_i Γ^m_{jk} + ∂_j Γ^m_{ik} − Γ^l_{jk} Γ^m_{il}
///  + Γ^l_{ik} Γ^m_{jl}`, then lowered with `g`.
fn factor_curvature(factor: &Factor, q: &[f64]) -> Result<CurvatureTensor> {
    if matches!(factor, Factor::FlatComplex { .. }) {
        return Ok(CurvatureTensor::zeros(factor.real_dim())); // exactly flat
    }
    let g = factor.metric(q);
    let d1 = factor.metric_d1(q);
    let d2 = factor.metric_d2(q);
    curvature_from_metric_jets(&g, &d1, &d2, "factor metric")
}

/// Lowered curvature tensor assembled from a metric 2-jet: `g`,
/// `d1[i] = ∂_i g`, `d2[i][j] = ∂_i ∂_j g`. Also serves induced metrics on
/// the immersed domain, with the jet supplied by finite differences.
pub(crate) fn curvature_from_metric_jets(
    g: &RMat,
    d1: &[RMat],
    d2: &[Vec<RMat>],
    what: &'static str,
) -> Result<CurvatureTensor> {
    let d = g.nrows();
    let mut r = CurvatureTensor::zeros(d);
    let ginv = invert(g, what)?;

    // Γ^k_{ij}
    let mut gamma = vec![RMat::zeros(d, d); d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for l in 0..d {
                    acc += ginv[(k, l)] * (d1[i][(l, j)] + d1[j][(l, i)] - d1[l][(i, j)]);
                }
                gamma[k][(i, j)] = 0.5 * acc;
            }
        }
    }

    // ∂_i g⁻¹ = −g⁻¹ (∂_i g) g⁻¹
    let dginv: Vec<RMat> = (0..d).map(|i| -(&ginv * &d1[i] * &ginv)).collect();

    // ∂_i Γ^m_{jk}
    let dgamma = |i: usize, m: usize, j: usize, k: usize| -> f64 {
        let mut acc = 0.0;
        for l in 0..d {
            acc += dginv[i][(m, l)] * (d1[j][(l, k)] + d1[k][(l, j)] - d1[l][(j, k)]);
            acc += ginv[(m, l)]
                * (d2[i][j][(l, k)] + d2[i][k][(l, j)] - d2[i][l][(j, k)]);
        }
        0.5 * acc
    };

    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                // R^m_{kij}
                for m in 0..d {
                    let mut up = -dgamma(i, m, j, k) + dgamma(j, m, i, k);
                    for l in 0..d {
                        up += -gamma[l][(j, k)] * gamma[m][(i, l)]
                            + gamma[l][(i, k)] * gamma[m][(j, l)];
                    }
                    // lower: R_{ijkl'} += g_{l'm} R^m_{kij}
                    for lp in 0..d {
                        let v = r.get(i, j, k, lp) + g[(lp, m)] * up;
                        r.set(i, j, k, lp, v);
                    }
                }
            }
        }
    }
    Ok(r)
}
