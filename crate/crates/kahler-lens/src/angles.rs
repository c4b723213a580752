//! Kähler angles: the pulled-back Kähler form, its polar decomposition,
//! angle spectra, the angle functional κ, direction classification, adapted
//! frames, the dimension-4 Pfaffian sign, and frame continuation.
//!
//! Conventions. The pulled-back form is `W(X, Y) = g(J dF(X), dF(Y))`; its
//! operator `A` satisfies `g_M(AX, Y) = W(X, Y)`, i.e. `A = −g_M⁻¹ W` as
//! matrices. The polar decomposition `A = g̃ J_ω` is computed in a
//! g_M-orthonormal gauge (Cholesky of `g_M`): there `A` becomes a genuinely
//! antisymmetric matrix `B`, `g̃ = √(−B²)` is PSD, and `J_ω = g̃⁺ B` is a
//! partial isometry vanishing exactly on the kernel of `B`. Eigenvalues of
//! `−B²` come in equal pairs `cos²θ_α`; the Kähler angles are reported as
//! `n` cosines sorted descending.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float-math methods come from the trait in no_std builds; the inherent std
// methods shadow it under `cfg(test)`.
#[allow(unused_imports)]
use num_traits::Float;

use crate::immersion::Immersion;
use crate::linalg::{
    bilinear, cholesky_factor, complexify_vec, hermitian_norm_sq, invert,
    loewdin_orthonormalize, orthonormalize_against, pair, pfaffian4, real_mat_mul_cvec,
    sym_eigen_desc, CMat, CVec, RMat, RVec,
};
use crate::{GeometryError, Result, Tolerances};

/// The pulled-back Kähler form at a point, as a bilinear form and as the
/// g_M-skew operator it induces.
#[derive(Debug, Clone)]
pub struct PulledBackForm {
    /// `bilinear[(i, j)] = F*ω(∂_i, ∂_j)`, antisymmetric.
    pub bilinear: RMat,
    /// Operator `A` with `g_M(AX, Y) = F*ω(X, Y)`; g_M-skew.
    pub operator: RMat,
    /// Induced metric at the same point (kept for downstream gauge work).
    pub induced_metric: RMat,
}

/// `F*ω` at `p`: `W_ij = g(J dF(∂_i), dF(∂_j))`.
pub fn pullback_form(f: &Immersion, p: &RVec) -> Result<PulledBackForm> {
    let jet = f.jet(p)?;
    let omega = f.ambient().kahler_form_at(&jet.value)?;
    let w = jet.d1.transpose() * omega * &jet.d1;
    // Exact antisymmetrization removes floating-point dust.
    let w = (&w - w.transpose()) * 0.5;
    let g_m = f.induced_metric_from_jet(&jet)?;
    let operator = -invert(&g_m, "induced metric")? * &w;
    Ok(PulledBackForm { bilinear: w, operator, induced_metric: g_m })
}

/// Result of the polar decomposition `A = g̃ J_ω` together with the angle
/// data it determines.
#[derive(Debug, Clone)]
pub struct AngleSpectrum {
    /// `cosθ_1 ≥ … ≥ cosθ_n ≥ 0`.
    pub cosines: Vec<f64>,
    /// Number of angles with `cosθ_α` above the rank tolerance (the point
    /// lies in the stratum Ω_{2k} with `k = rank_stratum`).
    pub rank_stratum: usize,
    /// PSD part `g̃ = |F*ω|` as a chart-basis operator.
    pub g_tilde: RMat,
    /// Partial isometry `J_ω` as a chart-basis operator; vanishes on the
    /// kernel, squares to −1 on its orthogonal complement.
    pub j_omega: RMat,
    /// g_M-orthonormal basis of the kernel `K_ω` (chart basis).
    pub kernel_basis: Vec<RVec>,
    /// Largest gap between the paired eigenvalues of `−B²` (diagnostic).
    pub pairing_residual: f64,
    // Gauge data for spectral projectors and κ's determinant route.
    pub(crate) chol_l: RMat,
    pub(crate) eig_q: RMat,
    pub(crate) eig_vals: Vec<f64>,
}

impl AngleSpectrum {
    /// Half the tangent dimension (the number of Kähler angles).
    pub fn n(&self) -> usize {
        self.cosines.len()
    }

    /// `g̃` as an operator in the g_M-orthonormal gauge.
    pub(crate) fn g_tilde_gauge(&self) -> RMat {
        let dim = self.eig_vals.len();
        let d = RMat::from_fn(dim, dim, |i, j| {
            if i == j {
                self.eig_vals[i].max(0.0).sqrt()
            } else {
                0.0
            }
        });
        &self.eig_q * d * self.eig_q.transpose()
    }

    /// g_M-orthogonal projector (chart basis) onto the span of the gauge
    /// eigencolumns `cols`, as used for frame continuation.
    pub(crate) fn eigenspace_projector(&self, cols: &[usize], g_m: &RMat) -> RMat {
        let dim = self.eig_vals.len();
        let linv_t = invert(&self.chol_l, "Cholesky factor")
            .expect("triangular factor is invertible")
            .transpose();
        let mut p = RMat::zeros(dim, dim);
        for &c in cols {
            let v = &linv_t * RVec::from(self.eig_q.column(c));
            p += &v * v.transpose() * g_m;
        }
        p
    }

    /// Chart-basis vector of gauge eigencolumn `c` (g_M-orthonormal).
    pub(crate) fn eigenvector_chart(&self, c: usize) -> RVec {
        let linv_t = invert(&self.chol_l, "Cholesky factor")
            .expect("triangular factor is invertible")
            .transpose();
        &linv_t * RVec::from(self.eig_q.column(c))
    }
}

/// Relative defect allowed by internal construction guards (operator
/// skewness, Pfaffian/angle agreement). Pinned: these check facts that hold
/// in exact arithmetic, so they are not tunable identity budgets.
const CONSTRUCTION_TOL: f64 = 1e-10;

/// Polar decomposition of a g_M-skew operator. Total on such operators; the
/// zero operator yields `g̃ = 0`, `J_ω = 0` and a full kernel.
pub fn polar_decompose(operator: &RMat, g_m: &RMat, tol: &Tolerances) -> Result<AngleSpectrum> {
    let dim = operator.nrows();
    if dim % 2 != 0 || operator.ncols() != dim || g_m.nrows() != dim {
        return Err(GeometryError::DimensionMismatch { expected: dim, found: operator.ncols() });
    }
    let n = dim / 2;
    let l = cholesky_factor(g_m, "induced metric")?;
    // Gauge representative; exactly antisymmetric in exact arithmetic.
    let b_raw = l.transpose() * operator * invert(&l, "Cholesky factor")?.transpose();
    let b = (&b_raw - b_raw.transpose()) * 0.5;
    let skew_defect = (&b_raw - &b).norm();
    if skew_defect > CONSTRUCTION_TOL * (1.0 + b.norm()) {
        return Err(GeometryError::InvalidParameter {
            name: "operator",
            reason: alloc::format!("not g_M-skew (defect {skew_defect:.3e})"),
        });
    }
    let s = -(&b * &b);
    let s = (&s + s.transpose()) * 0.5;
    let (vals, q) = sym_eigen_desc(&s);
    // Eigenvalues arrive in descending pairs cos²θ_α, cos²θ_α.
    let scale = vals[0].max(1.0);
    let mut pairing_residual = 0.0f64;
    let mut cosines = Vec::with_capacity(n);
    for alpha in 0..n {
        let (a, b2) = (vals[2 * alpha], vals[2 * alpha + 1]);
        pairing_residual = pairing_residual.max((a - b2).abs());
        let mean = 0.5 * (a + b2);
        cosines.push(mean.max(0.0).sqrt().min(1.0));
    }
    if pairing_residual > tol.pairing * scale {
        return Err(GeometryError::EigenvaluePairing { residual: pairing_residual });
    }

    // g̃ = √S and J_ω = g̃⁺ B in the gauge; kernel = eigencolumns with
    // singular value at most rank_tol.
    let sqrt_vals: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    let diag = |f: &dyn Fn(usize) -> f64| RMat::from_fn(dim, dim, |i, j| if i == j { f(i) } else { 0.0 });
    let g_tilde_gauge = &q * diag(&|i| sqrt_vals[i]) * q.transpose();
    let pinv = &q * diag(&|i| if sqrt_vals[i] > tol.rank { 1.0 / sqrt_vals[i] } else { 0.0 })
        * q.transpose();
    let j_gauge = &pinv * &b;

    let linv_t = invert(&l, "Cholesky factor")?.transpose();
    let lt = l.transpose();
    let g_tilde = &linv_t * g_tilde_gauge * &lt;
    let j_omega = &linv_t * j_gauge * &lt;
    let kernel_basis: Vec<RVec> = (0..dim)
        .filter(|&c| sqrt_vals[c] <= tol.rank)
        .map(|c| &linv_t * RVec::from(q.column(c)))
        .collect();
    let rank_stratum = cosines.iter().filter(|c| **c > tol.rank).count();
    Ok(AngleSpectrum {
        cosines,
        rank_stratum,
        g_tilde,
        j_omega,
        kernel_basis,
        pairing_residual,
        chol_l: l,
        eig_q: q,
        eig_vals: vals,
    })
}

/// Kähler-angle spectrum of `F` at `p`.
pub fn kahler_angles(f: &Immersion, p: &RVec) -> Result<AngleSpectrum> {
    let form = pullback_form(f, p)?;
    polar_decompose(&form.operator, &form.induced_metric, f.tolerances())
}

/// The angle functional `κ = Σ_α log((1+cosθ_α)/(1−cosθ_α))`, equivalently
/// `½ log(det(g_M+g̃)/det(g_M−g̃))`. Undefined at complex directions.
///
/// Both routes are evaluated; their disagreement beyond 1e−10 (scaled)
/// signals a broken decomposition and is reported as an error.
pub fn kappa(spectrum: &AngleSpectrum, tol: &Tolerances) -> Result<f64> {
    let max_cos = spectrum.cosines.first().copied().unwrap_or(0.0);
    if max_cos >= 1.0 - tol.complex {
        return Err(GeometryError::ComplexDirection { cosine: max_cos });
    }
    let from_cosines: f64 = spectrum
        .cosines
        .iter()
        .map(|c| ((1.0 + c) / (1.0 - c)).ln())
        .sum();
    let from_dets = kappa_determinant_route(spectrum);
    let disagreement = (from_cosines - from_dets).abs();
    if disagreement > 1e-10 * (1.0 + from_cosines.abs()) {
        return Err(GeometryError::EigenvaluePairing { residual: disagreement });
    }
    Ok(from_cosines)
}

/// κ via `½ log(det(I+g̃)/det(I−g̃))` in the g_M-orthonormal gauge,
/// evaluated with LU determinants (independent of the cosine route).
pub fn kappa_determinant_route(spectrum: &AngleSpectrum) -> f64 {
    let gt = spectrum.g_tilde_gauge();
    let dim = gt.nrows();
    let plus = (RMat::identity(dim, dim) + &gt).determinant();
    let minus = (RMat::identity(dim, dim) - &gt).determinant();
    0.5 * (plus / minus).ln()
}

/// Spectrum + κ at a point (κ is `None` at complex directions).
pub fn kappa_at(f: &Immersion, p: &RVec) -> Result<f64> {
    let spectrum = kahler_angles(f, p)?;
    kappa(&spectrum, f.tolerances())
}

/// Per-angle direction label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionClass {
    /// `cosθ_α > 1 − tol`: `dF` of the angle plane is a complex line.
    Complex,
    /// `cosθ_α < tol`: ω vanishes on the angle plane.
    Lagrangian,
    Intermediate,
}

/// Aggregate direction classification of a spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionClassification {
    pub labels: Vec<DirectionClass>,
    pub has_complex: bool,
    pub has_lagrangian: bool,
    pub is_complex_point: bool,
    pub is_lagrangian_point: bool,
}

/// Classifies each angle as complex / Lagrangian / intermediate at the given
/// threshold.
pub fn classify_directions(cosines: &[f64], tol: f64) -> DirectionClassification {
    let labels: Vec<DirectionClass> = cosines
        .iter()
        .map(|c| {
            if *c > 1.0 - tol {
                DirectionClass::Complex
            } else if *c < tol {
                DirectionClass::Lagrangian
            } else {
                DirectionClass::Intermediate
            }
        })
        .collect();
    let has_complex = labels.iter().any(|l| *l == DirectionClass::Complex);
    let has_lagrangian = labels.iter().any(|l| *l == DirectionClass::Lagrangian);
    DirectionClassification {
        is_complex_point: labels.iter().all(|l| *l == DirectionClass::Complex),
        is_lagrangian_point: labels.iter().all(|l| *l == DirectionClass::Lagrangian),
        has_complex,
        has_lagrangian,
        labels,
    }
}

/// A frame adapted to the angle decomposition at a point:
/// g_M-orthonormal `{X_α, Y_α}` with `Y_α = J_ω X_α` on nonzero angles and
/// `F*ω(X_α, Y_β) = δ_αβ cosθ_α`, plus the complex tangent combinations
/// `Z_α = (X_α − iY_α)/2` and (absent complex directions) the normal frame
/// `U_α = (J dF(Z_α))^⊥ / sinθ_α`.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub base: RVec,
    pub cosines: Vec<f64>,
    /// Angles with `cosθ > rank_tol`; `X_α, Y_α` with `α < rank` satisfy
    /// `Y_α = J_ω X_α` exactly.
    pub rank: usize,
    pub x: Vec<RVec>,
    pub y: Vec<RVec>,
    /// Normal frame; `None` when the point has a complex direction.
    pub u: Option<Vec<CVec>>,
    /// Max disagreement between the projection route `(J dF(Z_α))^⊥/sinθ_α`
    /// and the closed form `(J dF(Z_α) − i cosθ_α dF(Z_α))/sinθ_α`.
    pub u_route_residual: f64,
    /// `|det|` of the complex-bilinear Gram matrix of
    /// `{dF(Z_α), dF(Z_ᾱ), U_α, U_ᾱ}` (spanning diagnostic); `None` without
    /// a normal frame.
    pub normal_gram_det: Option<f64>,
}

impl AdaptedFrame {
    pub fn n(&self) -> usize {
        self.cosines.len()
    }

    /// `Z_α = (X_α − iY_α)/2`.
    pub fn z(&self, alpha: usize) -> CVec {
        let x = complexify_vec(&self.x[alpha]);
        let y = complexify_vec(&self.y[alpha]);
        (x - y * Complex64::new(0.0, 1.0)) * Complex64::new(0.5, 0.0)
    }

    /// `Z_ᾱ = conj(Z_α) = (X_α + iY_α)/2`.
    pub fn z_bar(&self, alpha: usize) -> CVec {
        self.z(alpha).map(|c| c.conj())
    }
}

/// Builds an adapted frame from a computed spectrum at `p`.
///
/// Within each cluster of equal nonzero cosines the eigenvectors of `−B²`
/// are orthonormalized into `(X, Y = J_ω X)` pairs; kernel vectors are
/// paired in order. The normal frame is attached when no complex direction
/// is present.
pub fn frame_from_spectrum(
    f: &Immersion,
    p: &RVec,
    spectrum: &AngleSpectrum,
) -> Result<AdaptedFrame> {
    let tol = f.tolerances();
    let jet = f.jet(p)?;
    let g_m = f.induced_metric_from_jet(&jet)?;
    let n = spectrum.n();
    let k = spectrum.rank_stratum;

    let mut x: Vec<RVec> = Vec::with_capacity(n);
    let mut y: Vec<RVec> = Vec::with_capacity(n);

    // Nonzero angles, cluster by cluster (clusters = runs of equal cosines).
    let mut alpha = 0;
    while alpha < k {
        let mut end = alpha + 1;
        while end < k && (spectrum.cosines[alpha] - spectrum.cosines[end]).abs() <= tol.pairing {
            end += 1;
        }
        // Candidate eigenvectors of this eigenvalue cluster.
        let candidates: Vec<RVec> =
            (2 * alpha..2 * end).map(|c| spectrum.eigenvector_chart(c)).collect();
        let mut cluster_frame: Vec<RVec> = Vec::new();
        let mut cand_iter = candidates.iter();
        while cluster_frame.len() < 2 * (end - alpha) {
            let cand = cand_iter.next().ok_or(GeometryError::FrameContinuation {
                reason: String::from("eigenvector cluster exhausted before the frame closed"),
            })?;
            let Some(xa) = orthonormalize_against(&g_m, cand, &cluster_frame, 0.2) else {
                continue;
            };
            let ya = &spectrum.j_omega * &xa;
            cluster_frame.push(xa);
            cluster_frame.push(ya);
        }
        for pair_ix in 0..(end - alpha) {
            x.push(cluster_frame[2 * pair_ix].clone());
            y.push(cluster_frame[2 * pair_ix + 1].clone());
        }
        alpha = end;
    }

    // Kernel: pair the g_M-orthonormal kernel basis in order.
    for pair_ix in 0..(n - k) {
        x.push(spectrum.kernel_basis[2 * pair_ix].clone());
        y.push(spectrum.kernel_basis[2 * pair_ix + 1].clone());
    }

    attach_normal_frame(f, p, &jet.d1, spectrum.cosines.clone(), k, x, y)
}

/// Adapted frame of `F` at `p` (spectrum computed internally).
pub fn adapted_frame(f: &Immersion, p: &RVec) -> Result<AdaptedFrame> {
    let spectrum = kahler_angles(f, p)?;
    frame_from_spectrum(f, p, &spectrum)
}

/// Completes `(x, y)` into an [`AdaptedFrame`], attaching `U_α` by both
/// routes when no complex direction is present.
#[allow(clippy::too_many_arguments)]
fn attach_normal_frame(
    f: &Immersion,
    p: &RVec,
    d1: &RMat,
    cosines: Vec<f64>,
    rank: usize,
    x: Vec<RVec>,
    y: Vec<RVec>,
) -> Result<AdaptedFrame> {
    let tol = f.tolerances();
    let n = cosines.len();
    let value = f.map(p)?;
    let g_ambient = f.ambient().metric_at(&value)?;
    let j_ambient = f.ambient().complex_structure_at(&value)?;
    let p_tangent = f.tangent_projector(p)?;

    let has_complex = cosines.first().map(|c| *c >= 1.0 - tol.complex).unwrap_or(false);
    let frame = AdaptedFrame {
        base: p.clone(),
        cosines,
        rank,
        x,
        y,
        u: None,
        u_route_residual: 0.0,
        normal_gram_det: None,
    };
    if has_complex {
        return Ok(frame);
    }

    let mut u: Vec<CVec> = Vec::with_capacity(n);
    let mut residual = 0.0f64;
    let mut df_z: Vec<CVec> = Vec::with_capacity(n);
    for alpha in 0..n {
        let z = frame.z(alpha);
        let dfz = real_mat_mul_cvec(d1, &z);
        let jdfz = real_mat_mul_cvec(&j_ambient, &dfz);
        let sin = (1.0 - frame.cosines[alpha] * frame.cosines[alpha]).max(0.0).sqrt();
        // Projection route: (J dF(Z_α))^⊥ / sinθ.
        let normal_part = &jdfz - real_mat_mul_cvec(&p_tangent, &jdfz);
        let u_proj = normal_part / Complex64::new(sin, 0.0);
        // Closed form: (J dF(Z_α) − i cosθ_α dF(Z_α)) / sinθ.
        let u_formula = (&jdfz - &dfz * Complex64::new(0.0, frame.cosines[alpha]))
            / Complex64::new(sin, 0.0);
        residual = residual.max(hermitian_norm_sq(&g_ambient, &(&u_proj - &u_formula)).sqrt());
        u.push(u_proj);
        df_z.push(dfz);
    }

    // Spanning diagnostic: complex-bilinear Gram of
    // {dF(Z_α), dF(Z_ᾱ), U_α, U_ᾱ} over the complexified ambient tangent.
    let mut vectors: Vec<CVec> = Vec::with_capacity(4 * n);
    vectors.extend(df_z.iter().cloned());
    vectors.extend(df_z.iter().map(|v| v.map(|c| c.conj())));
    vectors.extend(u.iter().cloned());
    vectors.extend(u.iter().map(|v| v.map(|c| c.conj())));
    let m = vectors.len();
    let gram = CMat::from_fn(m, m, |i, j| bilinear(&g_ambient, &vectors[i], &vectors[j]));
    let gram_det = gram.determinant().norm();

    Ok(AdaptedFrame { u: Some(u), u_route_residual: residual, normal_gram_det: Some(gram_det), ..frame })
}

/// The two scalars of the dimension-4 wedge-square split: the sign `ε` with
/// `(F*ω)∧(F*ω) = ε·2cosθ₁cosθ₂·Vol` and `s₂ = ε·cosθ₂`.
#[derive(Debug, Clone, Copy)]
pub struct PfaffianSplit {
    /// Sign of the wedge square against the oriented volume (`+1.0` when the
    /// square vanishes).
    pub epsilon: f64,
    /// `s₂ = ε·cosθ₂`.
    pub s2: f64,
    /// Whether `cosθ₁ > cosθ₂` strictly at the pairing tolerance; equal
    /// angles make the pointwise split well-defined but not smoothly
    /// separable as functions.
    pub smooth_split: bool,
    /// `orientation · Pf(F*ω)/√det g_M`; equals `ε·cosθ₁cosθ₂`.
    pub wedge_ratio: f64,
}

/// Computes the wedge-square sign data for `n = 2` immersions.
/// `orientation` is the declared sign (±1) of the chart orientation.
pub fn pfaffian_split(f: &Immersion, p: &RVec, orientation: f64) -> Result<PfaffianSplit> {
    if f.domain_dim() != 4 {
        return Err(GeometryError::UnsupportedDimension {
            needs: "a 4-dimensional domain (n = 2)",
        });
    }
    let tol = f.tolerances();
    let form = pullback_form(f, p)?;
    let spectrum = polar_decompose(&form.operator, &form.induced_metric, tol)?;
    let det_g = form.induced_metric.determinant();
    let pf = pfaffian4(&form.bilinear);
    let wedge_ratio = orientation.signum() * pf / det_g.max(0.0).sqrt();
    let (c1, c2) = (spectrum.cosines[0], spectrum.cosines[1]);
    // |Pf|/√det g_M = cosθ₁cosθ₂ is enforced as an internal invariant.
    let defect = (wedge_ratio.abs() - c1 * c2).abs();
    if defect > CONSTRUCTION_TOL * (1.0 + c1 * c2) {
        return Err(GeometryError::EigenvaluePairing { residual: defect });
    }
    let epsilon = if wedge_ratio.abs() <= tol.rank { 1.0 } else { wedge_ratio.signum() };
    Ok(PfaffianSplit {
        epsilon,
        s2: epsilon * c2,
        smooth_split: c1 - c2 > tol.pairing,
        wedge_ratio,
    })
}

/// Continuation of an adapted frame from a base point to nearby points.
///
/// Nonzero-angle frame vectors are continued by projecting the base vectors
/// onto the matching eigenvalue cluster of `−B²` at the target point
/// (spectral-projector continuation); `Y_α = J_ω X_α` is then imposed
/// exactly. The kernel block is continued by projecting onto the target
/// kernel and symmetrically re-orthonormalizing, which keeps the continued
/// frame as close as possible to the base pairing. The construction is
/// smooth in the target point while the cluster structure of the spectrum
/// (and the rank) stays the one seen at the base point; violations surface
/// as `FrameContinuation`/`RankNotConstant` errors.
#[derive(Debug, Clone)]
pub struct FrameField {
    base: RVec,
    base_frame: AdaptedFrame,
    /// Cluster boundaries in angle indices: consecutive runs of equal
    /// cosines among the nonzero angles at the base point.
    clusters: Vec<(usize, usize)>,
}

impl FrameField {
    pub fn new(f: &Immersion, base: &RVec) -> Result<Self> {
        let spectrum = kahler_angles(f, base)?;
        let base_frame = frame_from_spectrum(f, base, &spectrum)?;
        let tol = f.tolerances();
        let k = spectrum.rank_stratum;
        let mut clusters = Vec::new();
        let mut alpha = 0;
        while alpha < k {
            let mut end = alpha + 1;
            while end < k
                && (spectrum.cosines[alpha] - spectrum.cosines[end]).abs() <= tol.pairing
            {
                end += 1;
            }
            clusters.push((alpha, end));
            alpha = end;
        }
        Ok(FrameField { base: base.clone(), base_frame, clusters })
    }

    pub fn base(&self) -> &RVec {
        &self.base
    }

    pub fn base_frame(&self) -> &AdaptedFrame {
        &self.base_frame
    }

    /// The continued frame at `q`.
    pub fn frame_at(&self, f: &Immersion, q: &RVec) -> Result<AdaptedFrame> {
        let tol = f.tolerances();
        let spectrum = kahler_angles(f, q)?;
        let n = spectrum.n();
        let k_base = self.base_frame.rank;
        if spectrum.rank_stratum != k_base {
            return Err(GeometryError::RankNotConstant {
                expected: k_base,
                found: spectrum.rank_stratum,
            });
        }
        let jet = f.jet(q)?;
        let g_m = f.induced_metric_from_jet(&jet)?;

        let mut x: Vec<RVec> = Vec::with_capacity(n);
        let mut y: Vec<RVec> = Vec::with_capacity(n);

        // Guard: the target spectrum must preserve the base cluster gaps.
        for (ix, (start, end)) in self.clusters.iter().enumerate() {
            let spread = spectrum.cosines[*start] - spectrum.cosines[end - 1];
            let gap_after = if ix + 1 < self.clusters.len() {
                spectrum.cosines[end - 1] - spectrum.cosines[*end]
            } else {
                spectrum.cosines[end - 1]
            };
            if spread < 0.0 || gap_after <= 4.0 * spread + tol.pairing {
                return Err(GeometryError::FrameContinuation {
                    reason: alloc::format!(
                        "angle clusters merged near the target point (spread {spread:.3e}, gap {gap_after:.3e})"
                    ),
                });
            }
        }

        for (start, end) in &self.clusters {
            let cols: Vec<usize> = (2 * start..2 * end).collect();
            let projector = spectrum.eigenspace_projector(&cols, &g_m);
            let mut cluster_frame: Vec<RVec> = Vec::new();
            for alpha in *start..*end {
                let cand = &projector * &self.base_frame.x[alpha];
                let xa = orthonormalize_against(&g_m, &cand, &cluster_frame, 0.2).ok_or(
                    GeometryError::FrameContinuation {
                        reason: String::from(
                            "projected base vector collapsed inside its eigenvalue cluster",
                        ),
                    },
                )?;
                // Keep the continuation orientation-aligned with the base.
                let xa = if pair(&g_m, &xa, &self.base_frame.x[alpha]) < 0.0 { -xa } else { xa };
                let ya = &spectrum.j_omega * &xa;
                cluster_frame.push(xa);
                cluster_frame.push(ya);
            }
            for pair_ix in 0..(end - start) {
                x.push(cluster_frame[2 * pair_ix].clone());
                y.push(cluster_frame[2 * pair_ix + 1].clone());
            }
        }

        // Kernel block: project the base kernel pairs onto the target kernel
        // and re-orthonormalize symmetrically (closest orthonormal set).
        if k_base < n {
            let mut kernel_proj = RMat::zeros(g_m.nrows(), g_m.ncols());
            for v in &spectrum.kernel_basis {
                kernel_proj += v * v.transpose() * &g_m;
            }
            let mut projected: Vec<RVec> = Vec::with_capacity(2 * (n - k_base));
            for alpha in k_base..n {
                projected.push(&kernel_proj * &self.base_frame.x[alpha]);
                projected.push(&kernel_proj * &self.base_frame.y[alpha]);
            }
            let ortho = loewdin_orthonormalize(&g_m, &projected, 1e-6).map_err(|_| {
                GeometryError::FrameContinuation {
                    reason: String::from("projected kernel frame collapsed"),
                }
            })?;
            for pair_ix in 0..(n - k_base) {
                x.push(ortho[2 * pair_ix].clone());
                y.push(ortho[2 * pair_ix + 1].clone());
            }
        }

        attach_normal_frame(f, q, &jet.d1, spectrum.cosines.clone(), k_base, x, y)
    }
}
