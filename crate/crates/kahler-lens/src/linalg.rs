//! Small dense linear-algebra helpers shared by the geometry modules.
//!
//! Everything is dynamically sized (`DMatrix`/`DVector`); the matrices in this
//! crate are at most `8 × 8`. Complex vectors always use the **complex
//! bilinear** extension of real inner products (no conjugation) unless a
//! function name says otherwise — that convention is load-bearing for the
//! adapted-frame identities, e.g. `⟨Z_α, Z_ᾱ⟩ = 1/2`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
// Float-math methods (`sqrt`, …) come from the trait in no_std builds; the
// inherent std methods shadow it under `cfg(test)`.
#[allow(unused_imports)]
use num_traits::Float;

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

use crate::{GeometryError, Result};

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
///
/// Returns `(eigenvalues, eigenvectors)` where column `i` of the matrix is the
/// unit eigenvector for `eigenvalues[i]`.
pub fn sym_eigen_desc(m: &RMat) -> (Vec<f64>, RMat) {
    let eig = m.clone().symmetric_eigen();
    let dim = m.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues of a real symmetric matrix are finite")
    });
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = RMat::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Cholesky factor `L` of a symmetric positive definite matrix (`g = L Lᵀ`).
pub fn cholesky_factor(g: &RMat, what: &'static str) -> Result<RMat> {
    let sym = g.symmetric_part();
    sym.cholesky()
        .map(|c| c.l().into_owned())
        .ok_or(GeometryError::NotPositiveDefinite { what })
}

/// Solves `L x = b` and then `Lᵀ y = x`, i.e. applies `g⁻¹` given `g = L Lᵀ`.
pub fn chol_solve(l: &RMat, b: &RVec) -> RVec {
    let mut x = b.clone();
    l.solve_lower_triangular_mut(&mut x);
    l.transpose().solve_upper_triangular_mut(&mut x);
    x
}

/// Inverse of a small matrix, failing loudly instead of returning garbage.
pub fn invert(m: &RMat, what: &'static str) -> Result<RMat> {
    m.clone()
        .try_inverse()
        .ok_or(GeometryError::NotPositiveDefinite { what })
}

/// Lifts a real matrix to a complex one.
pub fn complexify_mat(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

/// Lifts a real vector to a complex one.
pub fn complexify_vec(v: &RVec) -> CVec {
    CVec::from_fn(v.len(), |i, _| Complex64::new(v[i], 0.0))
}

/// Applies a real matrix to a complex vector (componentwise real action).
pub fn real_mat_mul_cvec(m: &RMat, v: &CVec) -> CVec {
    CVec::from_fn(m.nrows(), |i, _| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m.ncols() {
            acc += v[j] * m[(i, j)];
        }
        acc
    })
}

/// Complex-bilinear pairing `uᵀ g v` (no conjugation) for a real metric `g`.
pub fn bilinear(g: &RMat, u: &CVec, v: &CVec) -> Complex64 {
    let gv = real_mat_mul_cvec(g, v);
    u.dot(&gv) // nalgebra's `dot` does not conjugate
}

/// Hermitian pairing `conj(u)ᵀ g v` for a real metric `g`.
pub fn hermitian(g: &RMat, u: &CVec, v: &CVec) -> Complex64 {
    let gv = real_mat_mul_cvec(g, v);
    u.dotc(&gv)
}

/// Hermitian squared norm `conj(v)ᵀ g v` (real and nonnegative for SPD `g`).
pub fn hermitian_norm_sq(g: &RMat, v: &CVec) -> f64 {
    hermitian(g, v, v).re
}

/// Real bilinear pairing `uᵀ g v`.
pub fn pair(g: &RMat, u: &RVec, v: &RVec) -> f64 {
    u.dot(&(g * v))
}

/// Pfaffian of a `4 × 4` antisymmetric matrix.
pub fn pfaffian4(w: &RMat) -> f64 {
    debug_assert_eq!(w.nrows(), 4);
    w[(0, 1)] * w[(2, 3)] - w[(0, 2)] * w[(1, 3)] + w[(0, 3)] * w[(1, 2)]
}

/// Gram–Schmidt step: orthogonalises `v` against `basis` w.r.t. metric `g`
/// and normalises. Returns `None` when the residual collapses below `tol`.
pub fn orthonormalize_against(g: &RMat, v: &RVec, basis: &[RVec], tol: f64) -> Option<RVec> {
    let mut u = v.clone();
    // Two passes for numerical stability (classical twice ≈ modified GS).
    for _ in 0..2 {
        for b in basis {
            let c = pair(g, &u, b);
            u -= b * c;
        }
    }
    let norm = pair(g, &u, &u).max(0.0).sqrt();
    if norm < tol {
        return None;
    }
    Some(u / norm)
}

/// Löwdin (symmetric/Procrustes-optimal) orthonormalisation of a set of
/// vectors w.r.t. the metric `g`: returns the g-orthonormal set closest to
/// the input in the least-squares sense, preserving the input order.
pub fn loewdin_orthonormalize(g: &RMat, vectors: &[RVec], tol: f64) -> Result<Vec<RVec>> {
    let m = vectors.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut gram = RMat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = pair(g, &vectors[i], &vectors[j]);
        }
    }
    let (vals, q) = sym_eigen_desc(&gram);
    if vals[m - 1] <= tol * tol {
        return Err(GeometryError::FrameContinuation {
            reason: alloc::format!(
                "projected frame degenerated (Gram eigenvalue {:.3e})",
                vals[m - 1]
            ),
        });
    }
    // gram^{-1/2} = Q diag(1/sqrt(λ)) Qᵀ
    let mut inv_sqrt = RMat::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            for k in 0..m {
                acc += q[(a, k)] * q[(b, k)] / vals[k].sqrt();
            }
            inv_sqrt[(a, b)] = acc;
        }
    }
    let dim = vectors[0].len();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut v = RVec::zeros(dim);
        for i in 0..m {
            v += &vectors[i] * inv_sqrt[(i, j)];
        }
        out.push(v);
    }
    Ok(out)
}

/// Operator (Frobenius) norm of the difference, used in residual reporting.
pub fn frob(m: &RMat) -> f64 {
    m.norm()
}
