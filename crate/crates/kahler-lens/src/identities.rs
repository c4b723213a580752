//! Verification engine: evaluates both sides of the derivative and curvature
//! identities satisfied by the angle functional `κ` and reports residuals.
//!
//! Each check returns an [`IdentityReport`] instead of asserting, so callers
//! decide what a failure means. When a hypothesis of an identity does not
//! hold (non-minimal input, complex direction, rank change across an FD
//! stencil, …) the report is `Skipped` with a reason — never a vacuous pass.
//!
//! All complex pairings are the complex-bilinear (unconjugated) extensions of
//! the real metrics; the convention is pinned by `⟨Z_α, Z̄_α⟩ = 1/2` in the
//! tests. Reports are deterministic given (immersion, point, scheme,
//! tolerances, seed).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float-math methods come from the trait in no_std builds; the inherent std
// methods shadow it under `cfg(test)`.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ambient::curvature_from_metric_jets;
use crate::angles::{
    classify_directions, frame_from_spectrum, kahler_angles, kappa_at, pullback_form,
    AdaptedFrame, FrameField,
};
use crate::calculus::{
    contract_form_derivative, fd_directional, frame_connection_coeffs, laplace_beltrami,
    nabla_pullback_form, FdOrder, FdScheme, FrameConnection,
};
use crate::immersion::Immersion;
use crate::linalg::{
    bilinear, complexify_vec, hermitian_norm_sq, pair, real_mat_mul_cvec, CMat, CVec, RMat, RVec,
};
use crate::{GeometryError, Result, Tolerances};

/// Residual budget for identities whose left-hand side is a *first*
/// finite-difference derivative (one `h⁴` truncation, no nesting). Sits
/// between the algebraic budget and the nested-Laplacian budget.
pub const FIRST_DERIVATIVE_TOL: f64 = 1e-4;

/// Number of seeded random orthogonal complex structures sampled on the
/// kernel of `F*ω` (in addition to the canonical one and its negative) when
/// probing pluriharmonicity.
pub const RANDOM_STRUCTURE_SAMPLES: usize = 8;

/// Ids of every identity check, in the order they are usually run.
pub const CHECK_IDS: &[&str] = &[
    "ricci-from-frame",
    "ricci-form-pullback",
    "gtilde-derivative",
    "kappa-differential",
    "kappa-laplacian-pluriminimal",
    "kappa-laplacian-minimal",
    "constant-angle-curvature",
    "kahler-criteria",
    "gauss-curvature-tradeoff",
    "kappa-max-obstruction",
];

/// Outcome of a single identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// A hypothesis of the identity does not hold at this input; nothing was
    /// asserted.
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

/// Result of evaluating one identity at one input.
///
/// For decided reports (`Pass`/`Fail`) the verdict is `Pass` iff
/// `residual ≤ tolerance`, and `skip_reason` is `None`. `Skipped` reports
/// carry a nonempty reason and a zero residual.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub id: &'static str,
    /// Base point of the check (first grid point for grid-based checks).
    pub point: RVec,
    /// Scalar digest(s) of the left-hand side (check-specific).
    pub lhs: Vec<f64>,
    /// Scalar digest(s) of the right-hand side.
    pub rhs: Vec<f64>,
    /// Absolute residual the verdict is based on.
    pub residual: f64,
    /// `residual / (1 + scale)` with `scale` the largest `lhs`/`rhs` entry.
    pub relative: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub skip_reason: Option<String>,
    /// Free-form diagnostics (term breakdowns, leak magnitudes, …).
    pub notes: Vec<String>,
}

impl IdentityReport {
    fn decided(
        id: &'static str,
        point: RVec,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        residual: f64,
        tolerance: f64,
        notes: Vec<String>,
    ) -> Self {
        let scale = lhs
            .iter()
            .chain(rhs.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let verdict = if residual <= tolerance { Verdict::Pass } else { Verdict::Fail };
        IdentityReport {
            id,
            point,
            lhs,
            rhs,
            residual,
            relative: residual / (1.0 + scale),
            tolerance,
            verdict,
            skip_reason: None,
            notes,
        }
    }

    fn skipped(id: &'static str, point: RVec, tolerance: f64, reason: String) -> Self {
        IdentityReport {
            id,
            point,
            lhs: Vec::new(),
            rhs: Vec::new(),
            residual: 0.0,
            relative: 0.0,
            tolerance,
            verdict: Verdict::Skipped,
            skip_reason: Some(reason),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Uniform `per_axis^m` grid on the chart box shrunk toward its center by
/// `margin` (fraction of each half-width, leaving room for FD stencils).
/// Points are ordered with the first axis varying fastest; the linear index
/// of a multi-index `(c_0, …)` is `Σ_k c_k per_axis^k`.
pub fn interior_grid(chart: &[[f64; 2]], per_axis: usize, margin: f64) -> Vec<RVec> {
    let m = chart.len();
    let mut pts = Vec::new();
    if per_axis == 0 || m == 0 {
        return pts;
    }
    let mut idx = vec![0usize; m];
    loop {
        let p = RVec::from_fn(m, |k, _| {
            let center = 0.5 * (chart[k][0] + chart[k][1]);
            let half = 0.5 * (chart[k][1] - chart[k][0]) * (1.0 - margin);
            if per_axis == 1 {
                center
            } else {
                center - half + 2.0 * half * (idx[k] as f64) / ((per_axis - 1) as f64)
            }
        });
        pts.push(p);
        let mut k = 0;
        loop {
            if k == m {
                return pts;
            }
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Shared frame-contraction plumbing
// ---------------------------------------------------------------------------

/// Per-point bundle of everything the frame-based identities contract:
/// complex frame directions, their `dF`/`J dF` images, the second
/// fundamental form, angles. Index convention for complex frame members:
/// `c < n` is `Z_{c+1}`, `c ≥ n` is `Z̄_{c−n+1}` (matching
/// [`FrameConnection`]'s complex order).
struct FramePack {
    n: usize,
    cos: Vec<f64>,
    sin_sq: Vec<f64>,
    /// Ambient metric at `F(p)`.
    g: RMat,
    /// Projected second fundamental form, chart-indexed.
    ii: Vec<Vec<RVec>>,
    /// Chart coefficients of `(Z_1, …, Z_n, Z̄_1, …, Z̄_n)`.
    zc: Vec<CVec>,
    /// `dF` of each complex frame member (ambient vectors).
    df: Vec<CVec>,
    /// `J dF` of each complex frame member.
    jdf: Vec<CVec>,
}

impl FramePack {
    fn new(f: &Immersion, p: &RVec, frame: &AdaptedFrame) -> Result<Self> {
        let jet = f.jet(p)?;
        let g = f.ambient().metric_at(&jet.value)?;
        let jmat = f.ambient().complex_structure_at(&jet.value)?;
        let ii = f.second_fundamental_form(p)?;
        let n = frame.n();
        let mut zc: Vec<CVec> = Vec::with_capacity(2 * n);
        for a in 0..n {
            zc.push(frame.z(a));
        }
        for a in 0..n {
            zc.push(frame.z_bar(a));
        }
        let df: Vec<CVec> = zc.iter().map(|z| real_mat_mul_cvec(&jet.d1, z)).collect();
        let jdf: Vec<CVec> = df.iter().map(|v| cmat_mul_real(&jmat, v)).collect();
        let cos = frame.cosines.clone();
        let sin_sq = cos.iter().map(|c| (1.0 - c * c).max(f64::EPSILON)).collect();
        Ok(FramePack { n, cos, sin_sq, g, ii, zc, df, jdf })
    }

    /// `∇dF(A, B)` for complex chart directions (bilinear in both slots).
    fn nabla_df(&self, a: &CVec, b: &CVec) -> CVec {
        let m = a.len();
        let dim = self.g.nrows();
        let mut acc = CVec::zeros(dim);
        for k in 0..m {
            if a[k].norm_sqr() == 0.0 {
                continue;
            }
            for l in 0..m {
                let w = a[k] * b[l];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                for r in 0..dim {
                    acc[r] += w * self.ii[k][l][r];
                }
            }
        }
        acc
    }

    /// `g(∇dF(Z, w_{c1}), J dF(w_{c2}))` for an arbitrary complex first slot.
    fn gf(&self, z: &CVec, c1: usize, c2: usize) -> Complex64 {
        bilinear(&self.g, &self.nabla_df(z, &self.zc[c1]), &self.jdf[c2])
    }

    /// Same with the first slot a frame member.
    fn gf_idx(&self, c0: usize, c1: usize, c2: usize) -> Complex64 {
        self.gf(&self.zc[c0], c1, c2)
    }
}

/// Real matrix times complex vector.
fn cmat_mul_real(m: &RMat, v: &CVec) -> CVec {
    real_mat_mul_cvec(m, v)
}

fn unit_cvec(dim: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Maps a frame-continuation failure to a skip reason, propagating every
/// other error.
fn frame_or_reason<T>(r: Result<T>) -> Result<core::result::Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(GeometryError::FrameContinuation { reason }) => {
            Ok(Err(format!("frame continuation failed: {reason}")))
        }
        Err(e) => Err(e),
    }
}

/// Reason string when a complex direction is present, else `None`.
fn complex_reason(cosines: &[f64], tol: &Tolerances) -> Option<String> {
    let cls = classify_directions(cosines, tol.complex);
    if cls.has_complex {
        Some(format!("complex direction present (cos θ_1 = {:.6})", cosines[0]))
    } else {
        None
    }
}

/// Checks that the rank stratum (and absence of complex directions) is
/// stable on the outer Laplacian stencil around `p`; returns a skip reason
/// on the first violation. Inner-gradient displacements are an order of
/// magnitude smaller than `h_lap` and are treated as covered.
fn laplacian_stencil_reason(
    f: &Immersion,
    p: &RVec,
    scheme: &FdScheme,
    tol: &Tolerances,
) -> Result<Option<String>> {
    let spec0 = kahler_angles(f, p)?;
    if let Some(reason) = complex_reason(&spec0.cosines, tol) {
        return Ok(Some(reason));
    }
    let rank0 = spec0.rank_stratum;
    for k in 0..p.len() {
        for sign in [-1.0, 1.0] {
            for off in [0.5, 1.0, 2.0] {
                let mut q = p.clone();
                q[k] += sign * off * scheme.h_lap;
                let spec = kahler_angles(f, &q)?;
                if spec.rank_stratum != rank0 {
                    return Ok(Some(format!(
                        "rank stratum changes across the FD stencil ({} → {} at offset {:+.3e} e_{})",
                        rank0,
                        spec.rank_stratum,
                        sign * off * scheme.h_lap,
                        k
                    )));
                }
                if let Some(reason) = complex_reason(&spec.cosines, tol) {
                    return Ok(Some(format!("{reason} inside the FD stencil")));
                }
            }
        }
    }
    Ok(None)
}

/// FD Laplacian of `κ`, with complex-direction hits inside the stencil
/// converted to a skip reason.
fn kappa_laplacian_or_reason(
    f: &Immersion,
    p: &RVec,
    scheme: &FdScheme,
) -> Result<core::result::Result<f64, String>> {
    match laplace_beltrami(&|q| kappa_at(f, q), f, p, scheme) {
        Ok(v) => Ok(Ok(v)),
        Err(GeometryError::ComplexDirection { cosine }) => Ok(Err(format!(
            "κ undefined inside the FD stencil (complex direction, cos θ = {cosine:.6})"
        ))),
        Err(e) => Err(e),
    }
}

/// Order-`scheme.order` central difference of a matrix-valued map along
/// coordinate `k`.
fn central_mat(
    fun: &dyn Fn(&RVec) -> Result<RMat>,
    p: &RVec,
    k: usize,
    h: f64,
    order: FdOrder,
) -> Result<RMat> {
    let ev = |t: f64| -> Result<RMat> {
        let mut q = p.clone();
        q[k] += t;
        fun(&q)
    };
    match order {
        FdOrder::Two => Ok((ev(h)? - ev(-h)?) / (2.0 * h)),
        FdOrder::Four => {
            Ok((ev(-2.0 * h)? - ev(2.0 * h)? + (ev(h)? - ev(-h)?) * 8.0) / (12.0 * h))
        }
    }
}

// ---------------------------------------------------------------------------
// Ambient Ricci tensor reconstructed from an adapted frame
// ---------------------------------------------------------------------------

/// Verifies that the ambient Ricci tensor equals its reconstruction from the
/// immersion's adapted frame,
/// `Ricci(U, V) = Σ_μ (4/sin²θ_μ) R(U, JV, dF(Z_μ), J dF(Z̄_μ) + i cosθ_μ dF(Z̄_μ))`,
/// for all pairs from the (complexified) ambient coordinate basis. Requires
/// a point without complex directions.
pub fn check_ricci_from_frame(f: &Immersion, p: &RVec) -> Result<IdentityReport> {
    const ID: &str = "ricci-from-frame";
    let tol = f.tolerances();
    let tolerance = tol.algebraic;
    let spectrum = kahler_angles(f, p)?;
    if let Some(reason) = complex_reason(&spectrum.cosines, tol) {
        return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason));
    }
    let frame = frame_from_spectrum(f, p, &spectrum)?;
    let pack = FramePack::new(f, p, &frame)?;
    let q0 = f.map(p)?;
    let ricci = f.ambient().ricci_at(&q0)?;
    let curv = f.ambient().curvature_at(&q0)?;
    let jmat = f.ambient().complex_structure_at(&q0)?;
    let dim = ricci.nrows();
    let n = pack.n;

    // Fourth curvature slot per angle: J dF(Z̄_μ) + i cosθ_μ dF(Z̄_μ).
    let slot4: Vec<CVec> = (0..n)
        .map(|mu| &pack.jdf[n + mu] + &pack.df[n + mu] * Complex64::new(0.0, pack.cos[mu]))
        .collect();

    let mut residual = 0.0f64;
    let mut lhs_max = 0.0f64;
    let mut rhs_max = 0.0f64;
    for a in 0..dim {
        let ea = unit_cvec(dim, a);
        for b in 0..dim {
            let jb = complexify_vec(&RVec::from(jmat.column(b)));
            let lhs = Complex64::new(ricci[(a, b)], 0.0);
            let mut rhs = Complex64::new(0.0, 0.0);
            for mu in 0..n {
                rhs += curv.apply_complex(&ea, &jb, &pack.df[mu], &slot4[mu])
                    * (4.0 / pack.sin_sq[mu]);
            }
            residual = residual.max((lhs - rhs).norm());
            lhs_max = lhs_max.max(lhs.norm());
            rhs_max = rhs_max.max(rhs.norm());
        }
    }
    Ok(IdentityReport::decided(
        ID,
        p.clone(),
        vec![lhs_max],
        vec![rhs_max],
        residual,
        tolerance,
        vec![format!("compared all {dim}×{dim} coordinate-basis pairs")],
    ))
}

// ---------------------------------------------------------------------------
// Pullback of the Ricci form along totally geodesic immersions
// ---------------------------------------------------------------------------

/// Verifies that a totally geodesic immersion without complex directions
/// pulls the ambient Ricci form `Ψ(U, V) = Ricci(JU, V)` back to zero:
/// `max |Ψ(dF ∂_i, dF ∂_j)|` over the given points must vanish even where
/// `Ψ` itself does not. Skips when the input is not totally geodesic.
pub fn check_ricci_form_pullback(f: &Immersion, points: &[RVec]) -> Result<IdentityReport> {
    const ID: &str = "ricci-form-pullback";
    let tol = f.tolerances();
    let tolerance = tol.algebraic;
    if points.is_empty() {
        return Err(GeometryError::InvalidParameter {
            name: "points",
            reason: String::from("at least one sample point is required"),
        });
    }

    // Gates: totally geodesic and no complex directions, at every point.
    let mut tg_residual = 0.0f64;
    for p in points {
        let spectrum = kahler_angles(f, p)?;
        if let Some(reason) = complex_reason(&spectrum.cosines, tol) {
            return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason));
        }
        let ii = f.second_fundamental_form(p)?;
        let g = f.ambient().metric_at(&f.map(p)?)?;
        for row in &ii {
            for v in row {
                tg_residual = tg_residual.max(pair(&g, v, v).max(0.0).sqrt());
            }
        }
    }
    if tg_residual > tolerance {
        return Ok(IdentityReport::skipped(
            ID,
            points[0].clone(),
            tolerance,
            format!("not totally geodesic (max ‖∇dF‖ = {tg_residual:.3e})"),
        ));
    }

    let mut pulled_max = 0.0f64;
    let mut ambient_max = 0.0f64;
    for p in points {
        let q = f.map(p)?;
        let ricci = f.ambient().ricci_at(&q)?;
        let jmat = f.ambient().complex_structure_at(&q)?;
        // Ψ_{uv} = Ricci(J e_u, e_v) = (Jᵀ Ricci)_{uv}.
        let psi = jmat.transpose() * &ricci;
        ambient_max = ambient_max.max(psi.amax());
        let d1 = f.jet(p)?.d1;
        let pulled = d1.transpose() * &psi * &d1;
        pulled_max = pulled_max.max(pulled.amax());
    }
    Ok(IdentityReport::decided(
        ID,
        points[0].clone(),
        vec![pulled_max],
        vec![0.0],
        pulled_max,
        tolerance,
        vec![format!(
            "largest ambient Ricci-form entry at the sampled images: {ambient_max:.3e}"
        )],
    ))
}

// ---------------------------------------------------------------------------
// Derivative of g̃ in a continued adapted frame
// ---------------------------------------------------------------------------

/// Verifies, at `p0`, the derivative formulas for the frame components of
/// the angle operator's positive part `g̃`:
///
/// `dg̃_{μγ̄}(Z) = i gf(Z,μ,γ̄) − i gf(Z,γ̄,μ) − (cosθ_μ − cosθ_γ)⟨∇_Z Z_μ, Z̄_γ⟩`
/// and `0 = dg̃_{μγ}(Z) = −i gf(Z,μ,γ) + i gf(Z,γ,μ) + (cosθ_μ + cosθ_γ)⟨∇_Z Z_μ, Z_γ⟩`,
///
/// with `gf(X,Y,W) = g(∇dF(X,Y), J dF(W))`. The left sides are finite
/// differences of `g̃_{AB}(q) = i ε_B F*ω(A(q), B(q))` in a frame field
/// continued from `p0`; skips when no smooth continuation exists
/// (eigenvalue collisions / rank changes on the stencil).
pub fn check_gtilde_derivative(
    f: &Immersion,
    p0: &RVec,
    z: &RVec,
    scheme: &FdScheme,
) -> Result<IdentityReport> {
    const ID: &str = "gtilde-derivative";
    let tolerance = FIRST_DERIVATIVE_TOL;
    let field = match frame_or_reason(FrameField::new(f, p0))? {
        Ok(v) => v,
        Err(reason) => return Ok(IdentityReport::skipped(ID, p0.clone(), tolerance, reason)),
    };
    let frame0 = field.base_frame().clone();
    let n = frame0.n();
    let fd_frame = |q: &RVec| field.frame_at(f, q);
    let conn = match frame_or_reason(frame_connection_coeffs(f, &fd_frame, p0, scheme))? {
        Ok(v) => v,
        Err(reason) => return Ok(IdentityReport::skipped(ID, p0.clone(), tolerance, reason)),
    };
    let pack = FramePack::new(f, p0, &frame0)?;
    let zc = complexify_vec(z);

    // Frame components of g̃ near p0: g̃_{μγ̄} = −i F*ω(Z_μ, Z̄_γ) and
    // g̃_{μγ} = +i F*ω(Z_μ, Z_γ).
    let comps = |q: &RVec| -> Result<(CMat, CMat)> {
        let fr = fd_frame(q)?;
        let w = pullback_form(f, q)?.bilinear;
        let mut mixed = CMat::zeros(n, n);
        let mut plain = CMat::zeros(n, n);
        for mu in 0..n {
            let zmu = fr.z(mu);
            for ga in 0..n {
                mixed[(mu, ga)] = -Complex64::i() * bilinear(&w, &zmu, &fr.z_bar(ga));
                plain[(mu, ga)] = Complex64::i() * bilinear(&w, &zmu, &fr.z(ga));
            }
        }
        Ok((mixed, plain))
    };
    let h = scheme.h_grad;
    let fd = (|| -> Result<(CMat, CMat)> {
        let ev = |t: f64| comps(&(p0 + z * t));
        let (m_p1, p_p1) = ev(h)?;
        let (m_m1, p_m1) = ev(-h)?;
        Ok(match scheme.order {
            FdOrder::Two => {
                let s = Complex64::new(1.0 / (2.0 * h), 0.0);
                ((m_p1 - m_m1) * s, (p_p1 - p_m1) * s)
            }
            FdOrder::Four => {
                let (m_p2, p_p2) = ev(2.0 * h)?;
                let (m_m2, p_m2) = ev(-2.0 * h)?;
                let s = Complex64::new(1.0 / (12.0 * h), 0.0);
                let e8 = Complex64::new(8.0, 0.0);
                (
                    (m_m2 - m_p2 + (m_p1 - m_m1) * e8) * s,
                    (p_m2 - p_p2 + (p_p1 - p_m1) * e8) * s,
                )
            }
        })
    })();
    let (d_mixed, d_plain) = match frame_or_reason(fd)? {
        Ok(v) => v,
        Err(reason) => return Ok(IdentityReport::skipped(ID, p0.clone(), tolerance, reason)),
    };

    let mut residual = 0.0f64;
    let mut lhs_max = 0.0f64;
    let mut rhs_max = 0.0f64;
    let mut plain_lhs_max = 0.0f64;
    for mu in 0..n {
        for ga in 0..n {
            let rhs_mixed = Complex64::i() * (pack.gf(&zc, mu, n + ga) - pack.gf(&zc, n + ga, mu))
                - (pack.cos[mu] - pack.cos[ga]) * conn.along(&zc, mu, n + ga);
            let rhs_plain = -Complex64::i() * pack.gf(&zc, mu, ga)
                + Complex64::i() * pack.gf(&zc, ga, mu)
                + (pack.cos[mu] + pack.cos[ga]) * conn.along(&zc, mu, ga);
            residual = residual
                .max((d_mixed[(mu, ga)] - rhs_mixed).norm())
                .max((d_plain[(mu, ga)] - rhs_plain).norm());
            lhs_max = lhs_max.max(d_mixed[(mu, ga)].norm());
            rhs_max = rhs_max.max(rhs_mixed.norm());
            plain_lhs_max = plain_lhs_max.max(d_plain[(mu, ga)].norm());
        }
    }
    Ok(IdentityReport::decided(
        ID,
        p0.clone(),
        vec![lhs_max, plain_lhs_max],
        vec![rhs_max, 0.0],
        residual,
        tolerance,
        vec![format!(
            "unbarred family is also a vanishing test: max |dg̃_{{μγ}}| = {plain_lhs_max:.3e}"
        )],
    ))
}

// ---------------------------------------------------------------------------
// Differential of κ from the second fundamental form
// ---------------------------------------------------------------------------

/// Verifies `dκ(Z) = 4 Σ_μ (i/sin²θ_μ)(gf(Z,μ,μ̄) − gf(Z,μ̄,μ))` at `p0`
/// against a finite-difference directional derivative of `κ` along the chart
/// direction `z`. Skips at complex directions and when the rank stratum
/// changes across the FD stencil (κ is only Lipschitz there).
pub fn check_kappa_differential(
    f: &Immersion,
    p0: &RVec,
    z: &RVec,
    scheme: &FdScheme,
) -> Result<IdentityReport> {
    const ID: &str = "kappa-differential";
    let tol = f.tolerances();
    let tolerance = FIRST_DERIVATIVE_TOL;
    let spec0 = kahler_angles(f, p0)?;
    if let Some(reason) = complex_reason(&spec0.cosines, tol) {
        return Ok(IdentityReport::skipped(ID, p0.clone(), tolerance, reason));
    }
    // Stratum-interior gate at every stencil point.
    let mut offsets: Vec<f64> = vec![-1.0, 1.0];
    if scheme.order == FdOrder::Four {
        offsets.extend_from_slice(&[-2.0, 2.0]);
    }
    if scheme.richardson {
        offsets.extend_from_slice(&[-0.5, 0.5]);
    }
    for t in &offsets {
        let spec = kahler_angles(f, &(p0 + z * (t * scheme.h_grad)))?;
        if spec.rank_stratum != spec0.rank_stratum {
            return Ok(IdentityReport::skipped(
                ID,
                p0.clone(),
                tolerance,
                format!(
                    "rank stratum changes across the FD stencil ({} → {} at t = {:+})",
                    spec0.rank_stratum, spec.rank_stratum, t
                ),
            ));
        }
        if let Some(reason) = complex_reason(&spec.cosines, tol) {
            return Ok(IdentityReport::skipped(
                ID,
                p0.clone(),
                tolerance,
                format!("{reason} inside the FD stencil"),
            ));
        }
    }

    let lhs = fd_directional(&|q| kappa_at(f, q), p0, z, scheme)?;
    let frame = frame_from_spectrum(f, p0, &spec0)?;
    let pack = FramePack::new(f, p0, &frame)?;
    let zc = complexify_vec(z);
    let mut rhs = Complex64::new(0.0, 0.0);
    for mu in 0..pack.n {
        rhs += Complex64::i()
            * (pack.gf(&zc, mu, pack.n + mu) - pack.gf(&zc, pack.n + mu, mu))
            * (4.0 / pack.sin_sq[mu]);
    }
    let imag_leak = rhs.im.abs();
    let residual = (lhs - rhs.re).abs().max(imag_leak);
    Ok(IdentityReport::decided(
        ID,
        p0.clone(),
        vec![lhs],
        vec![rhs.re],
        residual,
        tolerance,
        vec![format!(
            "imaginary leak of the formula for a real direction: {imag_leak:.3e}"
        )],
    ))
}

// ---------------------------------------------------------------------------
// Pluriharmonicity probe
// ---------------------------------------------------------------------------

/// Result of sampling `‖(∇dF)^{(1,1)}‖` over complex structures
/// `J̃ = J_ω ⊕ J'`.
#[derive(Debug, Clone, Copy)]
pub struct PluriminimalProbe {
    /// Max over sampled `J̃` and chart pairs of
    /// `‖½(∇dF(∂_i, ∂_j) + ∇dF(J̃∂_i, J̃∂_j))‖_g`.
    pub residual: f64,
    /// `‖trace ∇dF‖_g` at the same point (the minimality half of the
    /// broadly-pluriminimal definition).
    pub minimality_residual: f64,
    /// Number of complex structures sampled. `0` at rank-zero points, where
    /// the pluriharmonicity requirement quantifies over an empty set of
    /// strata and the residual is vacuously zero.
    pub samples: usize,
    /// Rank stratum `k` at the point (rank of `F*ω` is `2k`).
    pub rank: usize,
}

/// Samples the pluriharmonicity residual of Eq-style `(1,1)`-parts at `p`:
/// the canonical kernel pairing `J'`, its negative, and `random_samples`
/// seeded Haar-random orthogonal complex structures on the kernel of `F*ω`.
/// On a trivial kernel the single structure `J̃ = J_ω` is used; at rank zero
/// the requirement is vacuous (see [`PluriminimalProbe::samples`]).
pub fn pluriminimal_residual(
    f: &Immersion,
    p: &RVec,
    random_samples: usize,
    seed: u64,
) -> Result<PluriminimalProbe> {
    let spectrum = kahler_angles(f, p)?;
    let minimality = f.minimality_residual(p)?;
    let k = spectrum.rank_stratum;
    let n = spectrum.n();
    if k == 0 {
        return Ok(PluriminimalProbe {
            residual: 0.0,
            minimality_residual: minimality,
            samples: 0,
            rank: 0,
        });
    }
    let m = 2 * n;
    let g_m = f.induced_metric(p)?;
    let ii = f.second_fundamental_form(p)?;
    let g = f.ambient().metric_at(&f.map(p)?)?;
    let kernel_dim = 2 * (n - k);

    let mut structures: Vec<RMat> = Vec::new();
    if kernel_dim == 0 {
        structures.push(spectrum.j_omega.clone());
    } else {
        let kmat = RMat::from_columns(&spectrum.kernel_basis);
        let j0 = canonical_block_structure(kernel_dim);
        let mut blocks = vec![j0.clone(), -j0.clone()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..random_samples {
            let q = haar_orthogonal(kernel_dim, &mut rng);
            blocks.push(&q * &j0 * q.transpose());
        }
        for b in blocks {
            structures.push(&spectrum.j_omega + &kmat * b * kmat.transpose() * &g_m);
        }
    }

    let samples = structures.len();
    let mut worst = 0.0f64;
    for jt in &structures {
        for i in 0..m {
            for j in 0..m {
                // (∇dF)^{(1,1)}(∂_i, ∂_j) = ½(∇dF(∂_i,∂_j) + ∇dF(J̃∂_i, J̃∂_j)).
                let mut v = ii[i][j].clone();
                for a in 0..m {
                    let ja = jt[(a, i)];
                    if ja == 0.0 {
                        continue;
                    }
                    for b in 0..m {
                        let w = ja * jt[(b, j)];
                        if w != 0.0 {
                            v += &ii[a][b] * w;
                        }
                    }
                }
                v *= 0.5;
                worst = worst.max(pair(&g, &v, &v).max(0.0).sqrt());
            }
        }
    }
    Ok(PluriminimalProbe { residual: worst, minimality_residual: minimality, samples, rank: k })
}

/// Block-diagonal complex structure pairing consecutive coordinates:
/// `e_{2p} ↦ e_{2p+1} ↦ −e_{2p}`.
fn canonical_block_structure(d: usize) -> RMat {
    let mut j = RMat::zeros(d, d);
    for p in 0..d / 2 {
        j[(2 * p + 1, 2 * p)] = 1.0;
        j[(2 * p, 2 * p + 1)] = -1.0;
    }
    j
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// gauge fixed by the diagonal of `R`).
fn haar_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> RMat {
    let gauss = RMat::from_fn(d, d, |_, _| {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
    });
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

// ---------------------------------------------------------------------------
// Laplacian of κ, broadly-pluriminimal collapse
// ---------------------------------------------------------------------------

/// Three-way comparison at a broadly-pluriminimal point without complex
/// directions: FD `Δκ` vs the Ricci contraction
/// `Re(4i Σ_β Ricci(J dF(Z_β), dF(Z̄_β)))` vs `−2R Σ_β cosθ_β` when the
/// ambient declares an Einstein constant. The Ricci sum must be purely
/// imaginary; its real leak is folded into the residual.
pub fn check_kappa_laplacian_pluriminimal(
    f: &Immersion,
    p: &RVec,
    scheme: &FdScheme,
    seed: u64,
) -> Result<IdentityReport> {
    const ID: &str = "kappa-laplacian-pluriminimal";
    let tol = f.tolerances();
    let tolerance = tol.finite_diff;
    let probe = pluriminimal_residual(f, p, RANDOM_STRUCTURE_SAMPLES, seed)?;
    if probe.minimality_residual > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            p.clone(),
            tolerance,
            format!("not minimal (‖trace ∇dF‖ = {:.3e})", probe.minimality_residual),
        ));
    }
    if probe.residual > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            p.clone(),
            tolerance,
            format!(
                "not pluriharmonic over the sampled structures (residual = {:.3e})",
                probe.residual
            ),
        ));
    }
    if let Some(reason) = laplacian_stencil_reason(f, p, scheme, tol)? {
        return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason));
    }
    let lhs = match kappa_laplacian_or_reason(f, p, scheme)? {
        Ok(v) => v,
        Err(reason) => return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason)),
    };

    let spectrum = kahler_angles(f, p)?;
    let frame = frame_from_spectrum(f, p, &spectrum)?;
    let pack = FramePack::new(f, p, &frame)?;
    let ricci = f.ambient().ricci_at(&f.map(p)?)?;
    let mut s = Complex64::new(0.0, 0.0);
    for b in 0..pack.n {
        s += bilinear(&ricci, &pack.jdf[b], &pack.df[pack.n + b]);
    }
    let re_leak = 4.0 * s.re.abs();
    let rhs_ricci = -4.0 * s.im; // Re(4i·s)

    let mut residual = (lhs - rhs_ricci).abs().max(re_leak);
    let mut rhs = vec![rhs_ricci];
    let mut notes = vec![
        format!("pluriharmonicity residual {:.3e} over {} structures", probe.residual, probe.samples),
        format!("real leak of the Ricci sum: {re_leak:.3e}"),
    ];
    match f.ambient().einstein_constant() {
        Some(r) => {
            let sum_cos: f64 = spectrum.cosines.iter().sum();
            let rhs_einstein = -2.0 * r * sum_cos;
            residual = residual.max((lhs - rhs_einstein).abs());
            rhs.push(rhs_einstein);
            notes.push(format!("Einstein constant R = {r}, Σ cosθ = {sum_cos:.6}"));
        }
        None => notes.push(String::from(
            "ambient is not declared Einstein; constant-curvature comparison omitted",
        )),
    }
    Ok(IdentityReport::decided(ID, p.clone(), vec![lhs], rhs, residual, tolerance, notes))
}

// ---------------------------------------------------------------------------
// Laplacian of κ, full minimal expansion
// ---------------------------------------------------------------------------

/// The five summands of the `Δκ` expansion for minimal immersions without
/// complex directions, plus the real leak of the Ricci sum.
#[derive(Debug, Clone, Copy)]
pub struct LaplacianTerms {
    /// `Re(4i Σ_β Ricci(J dF(Z_β), dF(Z̄_β)))`.
    pub ricci: f64,
    /// `Σ_{β,μ} (32/sin²θ_μ) Im R(dF(Z_β), dF(Z_μ), dF(Z̄_β), J dF(Z̄_μ) + i cosθ_μ dF(Z̄_μ))`.
    pub curvature: f64,
    /// `−Σ (64(cosθ_μ+cosθ_ρ)/(sin²θ_μ sin²θ_ρ)) Re(gf(β,μ,ρ̄) gf(β̄,ρ,μ̄))`.
    pub gf_cross: f64,
    /// `Σ (32(cosθ_ρ−cosθ_μ)/(sin²θ_μ sin²θ_ρ)) (|gf(β,μ,ρ)|² + |gf(β̄,μ,ρ)|²)`.
    pub gf_skew: f64,
    /// `Σ (32(cosθ_μ+cosθ_ρ)/sin²θ_μ) (|⟨∇_{Z_β} Z_μ, Z_ρ⟩|² + |⟨∇_{Z̄_β} Z_μ, Z_ρ⟩|²)`.
    pub frame: f64,
    /// `4·|Re Σ_β Ricci(J dF(Z_β), dF(Z̄_β))|` — should vanish.
    pub re_leak: f64,
}

impl LaplacianTerms {
    /// The assembled right-hand side.
    pub fn total(&self) -> f64 {
        self.ricci + self.curvature + self.gf_cross + self.gf_skew + self.frame
    }

    /// Everything except the Ricci term; collapses to zero for
    /// broadly-pluriminimal inputs.
    pub fn tail(&self) -> f64 {
        self.curvature + self.gf_cross + self.gf_skew + self.frame
    }
}

/// Evaluates the five-term `Δκ` right-hand side in the given adapted frame
/// with the given frame-connection coefficients. Exposed separately so that
/// basis covariance (invariance under eigenspace rotations of the frame) can
/// be tested directly.
pub fn kappa_laplacian_terms(
    f: &Immersion,
    p: &RVec,
    frame: &AdaptedFrame,
    conn: &FrameConnection,
) -> Result<LaplacianTerms> {
    let pack = FramePack::new(f, p, frame)?;
    let n = pack.n;
    let q0 = f.map(p)?;
    let ricci = f.ambient().ricci_at(&q0)?;
    let curv = f.ambient().curvature_at(&q0)?;

    let mut s = Complex64::new(0.0, 0.0);
    for b in 0..n {
        s += bilinear(&ricci, &pack.jdf[b], &pack.df[n + b]);
    }
    let t_ricci = -4.0 * s.im;
    let re_leak = 4.0 * s.re.abs();

    let slot4: Vec<CVec> = (0..n)
        .map(|mu| &pack.jdf[n + mu] + &pack.df[n + mu] * Complex64::new(0.0, pack.cos[mu]))
        .collect();
    let mut t_curv = 0.0;
    for b in 0..n {
        for mu in 0..n {
            t_curv += 32.0 / pack.sin_sq[mu]
                * curv
                    .apply_complex(&pack.df[b], &pack.df[mu], &pack.df[n + b], &slot4[mu])
                    .im;
        }
    }

    let mut t_cross = 0.0;
    let mut t_skew = 0.0;
    let mut t_frame = 0.0;
    for b in 0..n {
        for mu in 0..n {
            for rho in 0..n {
                let (c_mu, c_rho) = (pack.cos[mu], pack.cos[rho]);
                let denom = pack.sin_sq[mu] * pack.sin_sq[rho];
                t_cross += -64.0 * (c_mu + c_rho) / denom
                    * (pack.gf_idx(b, mu, n + rho) * pack.gf_idx(n + b, rho, n + mu)).re;
                t_skew += 32.0 * (c_rho - c_mu) / denom
                    * (pack.gf_idx(b, mu, rho).norm_sqr()
                        + pack.gf_idx(n + b, mu, rho).norm_sqr());
                t_frame += 32.0 * (c_mu + c_rho) / pack.sin_sq[mu]
                    * (conn.along(&pack.zc[b], mu, rho).norm_sqr()
                        + conn.along(&pack.zc[n + b], mu, rho).norm_sqr());
            }
        }
    }
    Ok(LaplacianTerms {
        ricci: t_ricci,
        curvature: t_curv,
        gf_cross: t_cross,
        gf_skew: t_skew,
        frame: t_frame,
        re_leak,
    })
}

/// Verifies the full `Δκ` expansion for minimal immersions without complex
/// directions: FD `Δκ` against [`kappa_laplacian_terms`] assembled in a
/// frame field continued from `p`. Skips on non-minimal input, complex
/// directions, failed frame continuation, or rank changes on the stencil.
pub fn check_kappa_laplacian_minimal(
    f: &Immersion,
    p: &RVec,
    scheme: &FdScheme,
) -> Result<IdentityReport> {
    const ID: &str = "kappa-laplacian-minimal";
    let tol = f.tolerances();
    let tolerance = tol.finite_diff;
    let minimality = f.minimality_residual(p)?;
    if minimality > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            p.clone(),
            tolerance,
            format!("not minimal (‖trace ∇dF‖ = {minimality:.3e})"),
        ));
    }
    if let Some(reason) = laplacian_stencil_reason(f, p, scheme, tol)? {
        return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason));
    }
    let field = match frame_or_reason(FrameField::new(f, p))? {
        Ok(v) => v,
        Err(reason) => return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason)),
    };
    let fd_frame = |q: &RVec| field.frame_at(f, q);
    let conn = match frame_or_reason(frame_connection_coeffs(f, &fd_frame, p, scheme))? {
        Ok(v) => v,
        Err(reason) => return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason)),
    };
    let terms = kappa_laplacian_terms(f, p, field.base_frame(), &conn)?;
    let lhs = match kappa_laplacian_or_reason(f, p, scheme)? {
        Ok(v) => v,
        Err(reason) => return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason)),
    };
    let rhs = terms.total();
    let residual = (lhs - rhs).abs().max(terms.re_leak);
    Ok(IdentityReport::decided(
        ID,
        p.clone(),
        vec![lhs],
        vec![rhs],
        residual,
        tolerance,
        vec![
            format!(
                "terms: ricci {:.6e}, curvature {:.6e}, gf-cross {:.6e}, gf-skew {:.6e}, frame {:.6e}",
                terms.ricci, terms.curvature, terms.gf_cross, terms.gf_skew, terms.frame
            ),
            format!("tail beyond the Ricci term: {:.6e}", terms.tail()),
            format!("real leak of the Ricci sum: {:.3e}", terms.re_leak),
        ],
    ))
}

/// Recombines the tangent frame members by an orthogonal matrix `r` over the
/// real frame order `(X_1..X_n, Y_1..Y_n)`: `v'_i = Σ_j r[(i,j)] v_j`.
/// The caller is responsible for `r` preserving the adapted structure
/// (pair mixing needs equal angle cosines; in-pair phases always work).
/// The normal frame is not remixed and is dropped.
pub fn recombine_frame(frame: &AdaptedFrame, r: &RMat) -> AdaptedFrame {
    let n = frame.cosines.len();
    let members: Vec<RVec> = frame.x.iter().chain(frame.y.iter()).cloned().collect();
    let mut out = frame.clone();
    for i in 0..2 * n {
        let mut v = RVec::zeros(members[0].len());
        for (j, m) in members.iter().enumerate() {
            v += m * r[(i, j)];
        }
        if i < n {
            out.x[i] = v;
        } else {
            out.y[i - n] = v;
        }
    }
    out.u = None;
    out.normal_gram_det = None;
    out
}

/// Rotation of angle `t` mixing pairs `a` and `b`
/// (`X'_a = cos t X_a + sin t X_b`, same for `Y`), as a recombination matrix
/// over the real frame order. Only adapted-structure preserving when the two
/// pairs share one angle cosine.
pub fn pair_rotation_matrix(n: usize, a: usize, b: usize, t: f64) -> RMat {
    let (c, s) = (t.cos(), t.sin());
    let mut r = RMat::identity(2 * n, 2 * n);
    for (i, j) in [(a, b), (n + a, n + b)] {
        r[(i, i)] = c;
        r[(i, j)] = s;
        r[(j, i)] = -s;
        r[(j, j)] = c;
    }
    r
}

/// In-pair gauge rotation of angle `t` on pair `a`
/// (`X'_a = cos t X_a + sin t Y_a`, `Y'_a = −sin t X_a + cos t Y_a`, so
/// `Y'_a = J_ω X'_a` is preserved), as a recombination matrix over the real
/// frame order. Adapted-structure preserving for any angle spectrum.
pub fn phase_rotation_matrix(n: usize, a: usize, t: f64) -> RMat {
    let (c, s) = (t.cos(), t.sin());
    let mut r = RMat::identity(2 * n, 2 * n);
    r[(a, a)] = c;
    r[(a, n + a)] = s;
    r[(n + a, a)] = -s;
    r[(n + a, n + a)] = c;
    r
}

/// Returns a copy of `frame` with pairs `a` and `b` mixed by a rotation of
/// angle `t` (`X'_a = cos t X_a + sin t X_b`, same for `Y`, orthogonal
/// combination on pair `b`). Only meaningful when the two pairs share one
/// angle cosine; used for basis-covariance experiments. The normal frame is
/// not remixed and is dropped.
pub fn rotate_frame_pairs(frame: &AdaptedFrame, a: usize, b: usize, t: f64) -> AdaptedFrame {
    recombine_frame(frame, &pair_rotation_matrix(frame.cosines.len(), a, b, t))
}

// ---------------------------------------------------------------------------
// Constant angles force flat-trace curvature
// ---------------------------------------------------------------------------

/// For broadly-pluriminimal, non-Lagrangian input with constant Kähler
/// angles and no complex directions, `Δκ = 0` forces
/// `R Σ_β cosθ_β = 0`, i.e. a declared Einstein constant must vanish.
/// Evaluates `|−2R Σ cosθ|` directly; fails when the declaration contradicts
/// the constant-angle geometry.
pub fn check_constant_angle_curvature(
    f: &Immersion,
    points: &[RVec],
    seed: u64,
) -> Result<IdentityReport> {
    const ID: &str = "constant-angle-curvature";
    let tol = f.tolerances();
    let tolerance = tol.algebraic;
    if points.is_empty() {
        return Err(GeometryError::InvalidParameter {
            name: "points",
            reason: String::from("at least one sample point is required"),
        });
    }
    let spec0 = kahler_angles(f, &points[0])?;
    if classify_directions(&spec0.cosines, tol.rank).is_lagrangian_point {
        return Ok(IdentityReport::skipped(
            ID,
            points[0].clone(),
            tolerance,
            String::from("the hypotheses exclude Lagrangian immersions"),
        ));
    }
    let mut spread = 0.0f64;
    for p in points {
        let spec = kahler_angles(f, p)?;
        if let Some(reason) = complex_reason(&spec.cosines, tol) {
            return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason));
        }
        for (c, c0) in spec.cosines.iter().zip(spec0.cosines.iter()) {
            spread = spread.max((c - c0).abs());
        }
    }
    if spread > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            points[0].clone(),
            tolerance,
            format!("Kähler angles vary over the sampled points (spread = {spread:.3e})"),
        ));
    }
    let probe = pluriminimal_residual(f, &points[0], RANDOM_STRUCTURE_SAMPLES, seed)?;
    if probe.minimality_residual > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            points[0].clone(),
            tolerance,
            format!("not minimal (‖trace ∇dF‖ = {:.3e})", probe.minimality_residual),
        ));
    }
    if probe.residual > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            points[0].clone(),
            tolerance,
            format!(
                "not pluriharmonic over the sampled structures (residual = {:.3e})",
                probe.residual
            ),
        ));
    }
    let r = match f.ambient().einstein_constant() {
        Some(r) => r,
        None => {
            return Ok(IdentityReport::skipped(
                ID,
                points[0].clone(),
                tolerance,
                String::from("ambient is not declared Einstein"),
            ))
        }
    };
    let sum_cos: f64 = spec0.cosines.iter().sum();
    let lhs = -2.0 * r * sum_cos;
    Ok(IdentityReport::decided(
        ID,
        points[0].clone(),
        vec![lhs],
        vec![0.0],
        lhs.abs(),
        tolerance,
        vec![format!("R = {r}, Σ cosθ = {sum_cos:.6}, angle spread = {spread:.3e}")],
    ))
}

// ---------------------------------------------------------------------------
// Equivalent Kähler criteria on the top stratum
// ---------------------------------------------------------------------------

/// Evaluates the three equivalent criteria for `(Ω_{2n}, J_ω, g_M)` to be
/// Kähler at a full-rank point and verifies they agree pairwise:
/// (a) the `(2,0)`-part of `∇F*ω` vanishes, (b) `(V, W) ↦ g(∇dF(Z, V), J dF(W))`
/// is symmetric on `T^{1,0}M`, (c) `⟨(∇ J_ω)(Z_α), Z_β⟩ = 0`. The verdict
/// asserts only the pairwise agreement, not the truth value itself.
pub fn check_kahler_criteria(f: &Immersion, p: &RVec, scheme: &FdScheme) -> Result<IdentityReport> {
    const ID: &str = "kahler-criteria";
    let tol = f.tolerances();
    let tolerance = 0.5; // residual is the 0/1 disagreement count
    let spectrum = kahler_angles(f, p)?;
    let n = spectrum.n();
    if spectrum.rank_stratum != n {
        return Ok(IdentityReport::skipped(
            ID,
            p.clone(),
            tolerance,
            format!(
                "rank stratum {} < n = {}: J_ω is degenerate, the induced structure is not almost complex",
                spectrum.rank_stratum, n
            ),
        ));
    }
    let frame = frame_from_spectrum(f, p, &spectrum)?;
    let pack = FramePack::new(f, p, &frame)?;
    let m = 2 * n;
    let g_m = f.induced_metric(p)?;

    // (a) (2,0)-part of ∇F*ω on the (1,0) frame.
    let tens = nabla_pullback_form(f, p)?;
    let mut res_a = 0.0f64;
    for k in 0..m {
        let ek = unit_cvec(m, k);
        for a in 0..n {
            for b in 0..n {
                res_a = res_a
                    .max(contract_form_derivative(&tens, &ek, &pack.zc[a], &pack.zc[b]).norm());
            }
        }
    }
    // (b) symmetry of gf in its two (1,0) slots.
    let mut res_b = 0.0f64;
    for k in 0..m {
        let ek = unit_cvec(m, k);
        for a in 0..n {
            for b in 0..n {
                res_b = res_b.max((pack.gf(&ek, a, b) - pack.gf(&ek, b, a)).norm());
            }
        }
    }
    // (c) covariant derivative of the J_ω tensor field (FD of the smooth
    // polar factor plus Christoffel corrections) paired with (1,0) vectors.
    let gamma = f.domain_christoffels(p)?;
    let j0 = spectrum.j_omega.clone();
    let j_field = |q: &RVec| -> Result<RMat> { Ok(kahler_angles(f, q)?.j_omega) };
    let mut res_c = 0.0f64;
    for k in 0..m {
        let dj = central_mat(&j_field, p, k, scheme.h_grad, scheme.order)?;
        let gk = gamma.direction_matrix(k);
        let nabla_j = dj + &gk * &j0 - &j0 * &gk;
        for a in 0..n {
            for b in 0..n {
                let v = cmat_mul_real(&nabla_j, &pack.zc[a]);
                res_c = res_c.max(bilinear(&g_m, &v, &pack.zc[b]).norm());
            }
        }
    }

    let hold_a = res_a <= tol.algebraic;
    let hold_b = res_b <= tol.algebraic;
    let hold_c = res_c <= FIRST_DERIVATIVE_TOL;
    let agree = hold_a == hold_b && hold_b == hold_c;
    let residual = if agree { 0.0 } else { 1.0 };
    Ok(IdentityReport::decided(
        ID,
        p.clone(),
        vec![res_a, res_b, res_c],
        vec![
            if hold_a { 1.0 } else { 0.0 },
            if hold_b { 1.0 } else { 0.0 },
            if hold_c { 1.0 } else { 0.0 },
        ],
        residual,
        tolerance,
        vec![
            format!("criterion residuals: form {res_a:.3e}, symmetry {res_b:.3e}, ∇J_ω {res_c:.3e}"),
            String::from("verdict asserts pairwise agreement of the criteria, not their truth"),
        ],
    ))
}

// ---------------------------------------------------------------------------
// Curvature/second-fundamental-form trade-off over flat targets
// ---------------------------------------------------------------------------

/// For minimal immersions into flat targets, verifies the contracted
/// Gauss-equation trade-off
/// `Σ_{α,μ} R^M(Z_μ, Z_α, Z̄_μ, Z̄_α) = −Σ_{α,μ} ‖∇dF(Z_α, Z̄_μ)‖²`,
/// with the domain curvature `R^M` assembled from a finite-difference 2-jet
/// of the induced metric. Skips on curved ambients and non-minimal input.
pub fn check_gauss_curvature_tradeoff(
    f: &Immersion,
    p: &RVec,
    scheme: &FdScheme,
) -> Result<IdentityReport> {
    const ID: &str = "gauss-curvature-tradeoff";
    let tol = f.tolerances();
    let tolerance = tol.finite_diff;
    let q0 = f.map(p)?;
    let ambient_curv = f.ambient().curvature_at(&q0)?.max_abs();
    if ambient_curv > 1e-14 {
        return Ok(IdentityReport::skipped(
            ID,
            p.clone(),
            tolerance,
            format!("ambient is not flat (max |R| = {ambient_curv:.3e})"),
        ));
    }
    let minimality = f.minimality_residual(p)?;
    if minimality > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            p.clone(),
            tolerance,
            format!("not minimal (‖trace ∇dF‖ = {minimality:.3e})"),
        ));
    }
    let spectrum = kahler_angles(f, p)?;
    let frame = frame_from_spectrum(f, p, &spectrum)?;
    let pack = FramePack::new(f, p, &frame)?;
    let n = pack.n;
    let m = 2 * n;

    // FD 2-jet of the induced metric feeds the curvature assembly.
    let h = scheme.h_grad;
    let gfun = |q: &RVec| f.induced_metric(q);
    let g0 = f.induced_metric(p)?;
    let mut d1: Vec<RMat> = Vec::with_capacity(m);
    for i in 0..m {
        d1.push(central_mat(&gfun, p, i, h, scheme.order)?);
    }
    let mut d2: Vec<Vec<RMat>> = Vec::with_capacity(m);
    for i in 0..m {
        let di = |q: &RVec| central_mat(&gfun, q, i, h, scheme.order);
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            row.push(central_mat(&di, p, j, h, scheme.order)?);
        }
        d2.push(row);
    }
    let rm = curvature_from_metric_jets(&g0, &d1, &d2, "induced metric")?;

    let mut lhs = 0.0f64;
    let mut imag_leak = 0.0f64;
    let mut rhs = 0.0f64;
    for a in 0..n {
        for mu in 0..n {
            let v = rm.apply_complex(&pack.zc[mu], &pack.zc[a], &pack.zc[n + mu], &pack.zc[n + a]);
            lhs += v.re;
            imag_leak = imag_leak.max(v.im.abs());
            rhs -= hermitian_norm_sq(&pack.g, &pack.nabla_df(&pack.zc[a], &pack.zc[n + mu]));
        }
    }
    let residual = (lhs - rhs).abs().max(imag_leak);
    Ok(IdentityReport::decided(
        ID,
        p.clone(),
        vec![lhs],
        vec![rhs],
        residual,
        tolerance,
        vec![format!("imaginary leak of the curvature sum: {imag_leak:.3e}")],
    ))
}

// ---------------------------------------------------------------------------
// κ-maximum obstruction scan over negatively curved targets
// ---------------------------------------------------------------------------

/// Observational probe: over negatively curved Einstein targets, a
/// broadly-pluriminimal non-Lagrangian immersion without complex directions
/// admits no interior κ-maximum with locally constant positive rank. Scans a
/// `per_axis`-per-side interior grid for strict discrete maxima of κ whose
/// rank matches all axis neighbors; each hit contradicts the obstruction.
/// Numerics can only fail to contradict the statement — a pass is evidence,
/// not proof.
pub fn check_kappa_max_obstruction(
    f: &Immersion,
    per_axis: usize,
    seed: u64,
) -> Result<IdentityReport> {
    const ID: &str = "kappa-max-obstruction";
    let tol = f.tolerances();
    let tolerance = 0.5; // residual is the number of contradicting grid points
    if per_axis < 3 {
        return Err(GeometryError::InvalidParameter {
            name: "per_axis",
            reason: String::from("the scan needs at least 3 points per axis"),
        });
    }
    let grid = interior_grid(f.chart_box(), per_axis, 0.1);
    let center = grid[grid.len() / 2].clone();
    let r = match f.ambient().einstein_constant() {
        Some(r) if r < 0.0 => r,
        Some(r) => {
            return Ok(IdentityReport::skipped(
                ID,
                center,
                tolerance,
                format!("ambient Einstein constant R = {r} is not negative"),
            ))
        }
        None => {
            return Ok(IdentityReport::skipped(
                ID,
                center,
                tolerance,
                String::from("ambient is not declared Einstein"),
            ))
        }
    };
    let probe = pluriminimal_residual(f, &center, RANDOM_STRUCTURE_SAMPLES, seed)?;
    if probe.minimality_residual > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            center,
            tolerance,
            format!("not minimal (‖trace ∇dF‖ = {:.3e})", probe.minimality_residual),
        ));
    }
    if probe.residual > tol.algebraic {
        return Ok(IdentityReport::skipped(
            ID,
            center,
            tolerance,
            format!(
                "not pluriharmonic over the sampled structures (residual = {:.3e})",
                probe.residual
            ),
        ));
    }

    let m = f.domain_dim();
    let mut kappas = Vec::with_capacity(grid.len());
    let mut ranks = Vec::with_capacity(grid.len());
    let mut max_rank = 0usize;
    for p in &grid {
        let spec = kahler_angles(f, p)?;
        if let Some(reason) = complex_reason(&spec.cosines, tol) {
            return Ok(IdentityReport::skipped(ID, p.clone(), tolerance, reason));
        }
        kappas.push(kappa_at(f, p)?);
        ranks.push(spec.rank_stratum);
        max_rank = max_rank.max(spec.rank_stratum);
    }
    if max_rank == 0 {
        return Ok(IdentityReport::skipped(
            ID,
            center,
            tolerance,
            String::from("Lagrangian immersion (rank zero on the whole grid)"),
        ));
    }

    // Strides of the lexicographic grid layout.
    let mut strides = vec![1usize; m];
    for k in 1..m {
        strides[k] = strides[k - 1] * per_axis;
    }
    let mut hits = 0usize;
    let mut idx = vec![0usize; m];
    for (lin, _) in grid.iter().enumerate() {
        let interior = idx.iter().all(|&c| c >= 1 && c + 1 < per_axis);
        if interior && ranks[lin] >= 1 {
            // Strictness up to a tie margin, so floating-point jitter on a
            // constant κ cannot manufacture spurious maxima.
            let tie = 1e-12 * (1.0 + kappas[lin].abs());
            let mut strict_max = true;
            let mut rank_const = true;
            for k in 0..m {
                for nb in [lin - strides[k], lin + strides[k]] {
                    if kappas[nb] + tie >= kappas[lin] {
                        strict_max = false;
                    }
                    if ranks[nb] != ranks[lin] {
                        rank_const = false;
                    }
                }
            }
            if strict_max && rank_const {
                hits += 1;
            }
        }
        // odometer
        let mut k = 0;
        while k < m {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
    let kappa_min = kappas.iter().cloned().fold(f64::INFINITY, f64::min);
    let kappa_max = kappas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(IdentityReport::decided(
        ID,
        center,
        vec![hits as f64],
        vec![0.0],
        hits as f64,
        tolerance,
        vec![
            format!("R = {r}, grid {per_axis}^{m}, κ ∈ [{kappa_min:.6}, {kappa_max:.6}]"),
            String::from("a pass means the scan failed to contradict the obstruction"),
        ],
    ))
}
