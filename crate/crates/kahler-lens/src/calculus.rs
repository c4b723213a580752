//! Finite-difference calculus on the immersed manifold: gradients, the
//! Laplace–Beltrami operator of the induced metric, connection coefficients
//! of adapted frame fields, and the covariant derivative of the pulled-back
//! Kähler form (by closed form and by finite differences, for
//! cross-validation).
//!
//! Sign convention: `Δ = trace_{g_M} Hess`, so `Δf ≤ 0` at an interior
//! maximum of `f` (pinned by a test on a flat quadratic).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float-math methods come from the trait in no_std builds; the inherent std
// methods shadow it under `cfg(test)`.
#[allow(unused_imports)]
use num_traits::Float;

use crate::angles::{pullback_form, AdaptedFrame};
use crate::immersion::Immersion;
use crate::linalg::{invert, pair, RMat, RVec};
use crate::{GeometryError, Result};

/// Central-difference order (truncation error `h²` or `h⁴`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Two,
    Four,
}

impl FdOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            FdOrder::Two => 2,
            FdOrder::Four => 4,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            2 => Ok(FdOrder::Two),
            4 => Ok(FdOrder::Four),
            other => Err(GeometryError::InvalidParameter {
                name: "fd-order",
                reason: alloc::format!("must be 2 or 4, got {other}"),
            }),
        }
    }
}

/// Finite-difference scheme: step sizes in chart units, stencil order, and
/// optional Richardson extrapolation (`h` vs `h/2`).
///
/// Two step sizes coexist because κ-like fields are only piecewise smooth:
/// first derivatives use a tight step, nested Laplacians a generous one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdScheme {
    /// Step for first derivatives.
    pub h_grad: f64,
    /// Outer step for the nested Laplacian.
    pub h_lap: f64,
    pub order: FdOrder,
    pub richardson: bool,
}

impl Default for FdScheme {
    fn default() -> Self {
        FdScheme { h_grad: 1e-3, h_lap: 1e-2, order: FdOrder::Four, richardson: false }
    }
}

impl FdScheme {
    pub fn new(h_grad: f64, h_lap: f64, order: FdOrder, richardson: bool) -> Result<Self> {
        if !(h_grad > 0.0) || !(h_lap > 0.0) {
            return Err(GeometryError::InvalidParameter {
                name: "fd-step",
                reason: alloc::format!("steps must be positive, got {h_grad} / {h_lap}"),
            });
        }
        Ok(FdScheme { h_grad, h_lap, order, richardson })
    }
}

/// Richardson extrapolation of a quantity with error `O(h^order)` from
/// values at steps `h` and `h/2`.
pub fn richardson(d_h: f64, d_half: f64, order: u8) -> f64 {
    let f = 2f64.powi(order as i32);
    (f * d_half - d_h) / (f - 1.0)
}

/// A scalar field on the immersion domain, evaluable pointwise.
pub type ScalarField<'a> = dyn Fn(&RVec) -> Result<f64> + 'a;

/// Central difference of `field` along coordinate `k` at step `h`.
fn central_scalar(field: &ScalarField, p: &RVec, k: usize, h: f64, order: FdOrder) -> Result<f64> {
    let ev = |t: f64| -> Result<f64> {
        let mut q = p.clone();
        q[k] += t;
        field(&q)
    };
    match order {
        FdOrder::Two => Ok((ev(h)? - ev(-h)?) / (2.0 * h)),
        FdOrder::Four => {
            Ok((ev(-2.0 * h)? - ev(2.0 * h)? + 8.0 * (ev(h)? - ev(-h)?)) / (12.0 * h))
        }
    }
}

/// `∂_k field(p)` per the scheme (with optional Richardson refinement).
pub fn fd_partial(field: &ScalarField, p: &RVec, k: usize, scheme: &FdScheme) -> Result<f64> {
    let d_h = central_scalar(field, p, k, scheme.h_grad, scheme.order)?;
    if !scheme.richardson {
        return Ok(d_h);
    }
    let d_half = central_scalar(field, p, k, 0.5 * scheme.h_grad, scheme.order)?;
    Ok(richardson(d_h, d_half, scheme.order.as_u8()))
}

/// Coordinate differential `(∂_1 field, …, ∂_m field)` at `p`.
pub fn fd_differential(field: &ScalarField, p: &RVec, scheme: &FdScheme) -> Result<RVec> {
    let mut out = RVec::zeros(p.len());
    for k in 0..p.len() {
        out[k] = fd_partial(field, p, k, scheme)?;
    }
    Ok(out)
}

/// Directional derivative `d field(dir)` at `p` along an arbitrary chart
/// direction, by a one-dimensional central difference on `t ↦ p + t·dir`
/// (with optional Richardson refinement). Linear in `dir`, which is not
/// normalized.
pub fn fd_directional(
    field: &ScalarField,
    p: &RVec,
    dir: &RVec,
    scheme: &FdScheme,
) -> Result<f64> {
    let once = |h: f64| -> Result<f64> {
        let ev = |t: f64| field(&(p + dir * t));
        match scheme.order {
            FdOrder::Two => Ok((ev(h)? - ev(-h)?) / (2.0 * h)),
            FdOrder::Four => {
                Ok((ev(-2.0 * h)? - ev(2.0 * h)? + 8.0 * (ev(h)? - ev(-h)?)) / (12.0 * h))
            }
        }
    };
    let d_h = once(scheme.h_grad)?;
    if !scheme.richardson {
        return Ok(d_h);
    }
    let d_half = once(0.5 * scheme.h_grad)?;
    Ok(richardson(d_h, d_half, scheme.order.as_u8()))
}

/// Laplace–Beltrami operator of the induced metric in divergence form,
/// `Δf = (det g_M)^{-1/2} ∂_i(√det g_M · g_M^{ij} ∂_j f)`, evaluated by
/// nested central differences (outer step `h_lap`, inner step `h_grad`).
pub fn laplace_beltrami(
    field: &ScalarField,
    f: &Immersion,
    p: &RVec,
    scheme: &FdScheme,
) -> Result<f64> {
    let m = f.domain_dim();
    let flux = |q: &RVec, i: usize| -> Result<f64> {
        let gm = f.induced_metric(q)?;
        let det = gm.determinant().max(0.0);
        let ginv = invert(&gm, "induced metric")?;
        let grad = fd_differential(field, q, scheme)?;
        let mut fi = 0.0;
        for j in 0..m {
            fi += ginv[(i, j)] * grad[j];
        }
        Ok(det.sqrt() * fi)
    };
    let sqrt_det_p = f.induced_metric(p)?.determinant().max(0.0).sqrt();
    let once = |h_out: f64| -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..m {
            acc += central_scalar(&|q: &RVec| flux(q, i), p, i, h_out, scheme.order)?;
        }
        Ok(acc / sqrt_det_p)
    };
    let d_h = once(scheme.h_lap)?;
    if !scheme.richardson {
        return Ok(d_h);
    }
    let d_half = once(0.5 * scheme.h_lap)?;
    Ok(richardson(d_h, d_half, scheme.order.as_u8()))
}

/// Connection coefficients `⟨∇_{∂_k} v_a, v_b⟩` of a frame field at a point,
/// for the real frame order `v = (X_1, …, X_n, Y_1, …, Y_n)`, together with
/// accessors for the complex frame `(Z_1, …, Z_n, Z̄_1, …, Z̄_n)` via the
/// complex-bilinear extension of `g_M`.
#[derive(Debug, Clone)]
pub struct FrameConnection {
    /// `real[k][(a, b)] = ⟨∇_{∂_k} v_a, v_b⟩`.
    pub real: Vec<RMat>,
    n: usize,
}

impl FrameConnection {
    /// Builds connection coefficients directly from
    /// `real[k][(a, b)] = ⟨∇_{∂_k} v_a, v_b⟩` matrices over the real frame
    /// order `(X_1..X_n, Y_1..Y_n)`. Each matrix must be square with the
    /// same even size.
    pub fn from_real(real: Vec<RMat>) -> Result<Self> {
        let dim = match real.first() {
            Some(m) => m.nrows(),
            None => {
                return Err(GeometryError::InvalidParameter {
                    name: "connection coefficients",
                    reason: String::from("need at least one direction matrix"),
                })
            }
        };
        if dim == 0 || dim % 2 != 0 || real.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(GeometryError::InvalidParameter {
                name: "connection coefficients",
                reason: alloc::format!("matrices must share one even square size, got {dim}"),
            });
        }
        Ok(FrameConnection { real, n: dim / 2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// ⟨∇_{∂_k} v_a, v_b⟩ in the real frame order (X's then Y's).
    pub fn real_pair(&self, k: usize, a: usize, b: usize) -> f64 {
        self.real[k][(a, b)]
    }

    /// Complex frame member `a` (`Z_a` for `a < n`, `Z̄_{a−n}` otherwise) as
    /// coefficients over the real frame.
    fn complex_weights(&self, a: usize) -> Vec<Complex64> {
        let n = self.n;
        let mut w = vec![Complex64::new(0.0, 0.0); 2 * n];
        if a < n {
            w[a] = Complex64::new(0.5, 0.0); // X_a / 2
            w[n + a] = Complex64::new(0.0, -0.5); // −i Y_a / 2
        } else {
            w[a - n] = Complex64::new(0.5, 0.0);
            w[a] = Complex64::new(0.0, 0.5);
        }
        w
    }

    /// `⟨∇_{∂_k} w_a, w_b⟩` in the complex frame order (Z's then Z̄'s),
    /// bilinear (unconjugated) in both slots.
    pub fn complex_pair(&self, k: usize, a: usize, b: usize) -> Complex64 {
        let wa = self.complex_weights(a);
        let wb = self.complex_weights(b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, cp) in wa.iter().enumerate() {
            if cp.norm_sqr() == 0.0 {
                continue;
            }
            for (q, cq) in wb.iter().enumerate() {
                if cq.norm_sqr() == 0.0 {
                    continue;
                }
                acc += cp * cq * self.real[k][(p, q)];
            }
        }
        acc
    }

    /// `⟨∇_Z w_a, w_b⟩` for a complex direction `Z = Σ_k dir_k ∂_k`.
    pub fn along(&self, dir: &nalgebra::DVector<Complex64>, a: usize, b: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.real.len() {
            acc += dir[k] * self.complex_pair(k, a, b);
        }
        acc
    }

    /// Connection coefficients of the frame field recombined pointwise by a
    /// constant orthogonal matrix `r` over the real frame order
    /// (`v'_i = Σ_j r[(i,j)] v_j`): since `r` is constant,
    /// `⟨∇ v'_a, v'_b⟩ = (r · real_k · rᵀ)[(a,b)]` exactly — no new finite
    /// differences are taken.
    pub fn recombined(&self, r: &RMat) -> Result<FrameConnection> {
        let dim = 2 * self.n;
        if r.nrows() != dim || r.ncols() != dim {
            return Err(GeometryError::InvalidParameter {
                name: "recombination matrix",
                reason: alloc::format!("expected {dim}x{dim}, got {}x{}", r.nrows(), r.ncols()),
            });
        }
        let real = self.real.iter().map(|mk| r * mk * r.transpose()).collect();
        Ok(FrameConnection { real, n: self.n })
    }

    /// Max violation of `⟨∇v_a, v_b⟩ = −⟨v_a, ∇v_b⟩` (consequence of frame
    /// orthonormality); a large value means the frame field is not
    /// orthonormal or not smooth at the stencil scale.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for mk in &self.real {
            for a in 0..mk.nrows() {
                for b in 0..mk.ncols() {
                    worst = worst.max((mk[(a, b)] + mk[(b, a)]).abs());
                }
            }
        }
        worst
    }
}

/// Computes `⟨∇_{∂_k} v_a, v_b⟩` for a frame field around `p0`, using
/// central differences of the frame vectors plus the Christoffel correction
/// of the induced metric.
pub fn frame_connection_coeffs(
    f: &Immersion,
    frame_field: &dyn Fn(&RVec) -> Result<AdaptedFrame>,
    p0: &RVec,
    scheme: &FdScheme,
) -> Result<FrameConnection> {
    let frame0 = frame_field(p0)?;
    let n = frame0.n();
    let m = f.domain_dim();
    let gm = f.induced_metric(p0)?;
    let gamma = f.domain_christoffels(p0)?;
    let base: Vec<RVec> = frame0.x.iter().chain(frame0.y.iter()).cloned().collect();

    let vecs_at = |q: &RVec| -> Result<Vec<RVec>> {
        let fr = frame_field(q)?;
        Ok(fr.x.iter().chain(fr.y.iter()).cloned().collect())
    };

    let h = scheme.h_grad;
    let mut real = Vec::with_capacity(m);
    for k in 0..m {
        let ev = |t: f64| -> Result<Vec<RVec>> {
            let mut q = p0.clone();
            q[k] += t;
            vecs_at(&q)
        };
        let dvecs: Vec<RVec> = match scheme.order {
            FdOrder::Two => {
                let (a, b) = (ev(h)?, ev(-h)?);
                (0..2 * n).map(|i| (&a[i] - &b[i]) / (2.0 * h)).collect()
            }
            FdOrder::Four => {
                let (a2, a1, b1, b2) = (ev(-2.0 * h)?, ev(h)?, ev(-h)?, ev(2.0 * h)?);
                (0..2 * n)
                    .map(|i| (&a2[i] - &b2[i] + (&a1[i] - &b1[i]) * 8.0) / (12.0 * h))
                    .collect()
            }
        };
        let gk = gamma.direction_matrix(k);
        let mut mk = RMat::zeros(2 * n, 2 * n);
        for a in 0..2 * n {
            let nabla_a = &dvecs[a] + &gk * &base[a];
            for b in 0..2 * n {
                mk[(a, b)] = pair(&gm, &nabla_a, &base[b]);
            }
        }
        real.push(mk);
    }
    Ok(FrameConnection { real, n })
}

/// Covariant derivative of the pulled-back form via the second fundamental
/// form: `∇_{∂_k} F*ω(∂_i, ∂_j) = −g(∇dF(∂_k, ∂_i), J dF(∂_j))
/// + g(∇dF(∂_k, ∂_j), J dF(∂_i))`. Returned as `out[k][(i, j)]`.
pub fn nabla_pullback_form(f: &Immersion, p: &RVec) -> Result<Vec<RMat>> {
    let jet = f.jet(p)?;
    let ii = f.second_fundamental_form(p)?;
    let g = f.ambient().metric_at(&jet.value)?;
    let j = f.ambient().complex_structure_at(&jet.value)?;
    let m = f.domain_dim();
    let jdf: Vec<RVec> = (0..m).map(|i| &j * RVec::from(jet.d1.column(i))).collect();
    let mut out = vec![RMat::zeros(m, m); m];
    for k in 0..m {
        for i in 0..m {
            for jj in 0..m {
                out[k][(i, jj)] = -(ii[k][i].transpose() * &g * &jdf[jj])[(0, 0)]
                    + (ii[k][jj].transpose() * &g * &jdf[i])[(0, 0)];
            }
        }
    }
    Ok(out)
}

/// Covariant derivative of the pulled-back form by finite differences of its
/// components with Christoffel corrections:
/// `∇_{∂_k} W(∂_i, ∂_j) = ∂_k W_ij − Γ^l_{ki} W_lj − Γ^l_{kj} W_il`.
pub fn nabla_pullback_form_fd(f: &Immersion, p: &RVec, scheme: &FdScheme) -> Result<Vec<RMat>> {
    let m = f.domain_dim();
    let gamma = f.domain_christoffels(p)?;
    let w_p = pullback_form(f, p)?.bilinear;
    let mut out = vec![RMat::zeros(m, m); m];
    let h = scheme.h_grad;
    for k in 0..m {
        let ev = |t: f64| -> Result<RMat> {
            let mut q = p.clone();
            q[k] += t;
            Ok(pullback_form(f, &q)?.bilinear)
        };
        let dw = match scheme.order {
            FdOrder::Two => (ev(h)? - ev(-h)?) / (2.0 * h),
            FdOrder::Four => {
                (ev(-2.0 * h)? - ev(2.0 * h)? + (ev(h)? - ev(-h)?) * 8.0) / (12.0 * h)
            }
        };
        let mut mk = dw;
        for i in 0..m {
            for jj in 0..m {
                for l in 0..m {
                    mk[(i, jj)] -=
                        gamma.gamma[l][(k, i)] * w_p[(l, jj)] + gamma.gamma[l][(k, jj)] * w_p[(i, l)];
                }
            }
        }
        out[k] = mk;
    }
    Ok(out)
}

/// Trilinear complex contraction of a `∇F*ω` tensor with complex vectors:
/// `T(Z, X, Y) = Σ_kij Z^k X^i Y^j T[k][(i, j)]`.
pub fn contract_form_derivative(
    t: &[RMat],
    z: &nalgebra::DVector<Complex64>,
    x: &nalgebra::DVector<Complex64>,
    y: &nalgebra::DVector<Complex64>,
) -> Complex64 {
    let m = t.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..m {
        if z[k].norm_sqr() == 0.0 {
            continue;
        }
        for i in 0..m {
            for j in 0..m {
                acc += z[k] * x[i] * y[j] * t[k][(i, j)];
            }
        }
    }
    acc
}
