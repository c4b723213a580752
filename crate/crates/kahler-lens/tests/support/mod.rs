//! Independent oracles for the integration tests.
//!
//! Everything in this module is derived from closed-form or brute-force
//! reasoning that does *not* share code with the library implementation, so
//! the tests compare two genuinely different routes to the same quantity.
//! Values frozen as constants below were computed by hand from the formulas
//! cited next to them.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Einstein constant of the Fubini–Study metric on ℂP² normalised to
/// holomorphic sectional curvature 4.
///
/// Derivation: with the constant-holomorphic-curvature tensor (see
/// `fs_curvature_oracle`) at the chart origin, the trace
/// `Ricci(e₁,e₁) = −½ Σ_k R(e₁, Je₁, Je_k, e_k)` evaluates to
/// `−½(−4 −4 −2 −2) = 6`.
pub const CP2_EINSTEIN: f64 = 6.0;

/// `‖mean curvature vector‖` of the graph `(x, y) ↦ (x, y, x², 0)` at the
/// point `(1, 0)`.
///
/// By hand: `g = diag(5, 1)`, the only nonzero second derivative is
/// `∂²F₃/∂x² = 2`, its normal part at `(1,0)` is `(−4/5, 0, 2/5, 0)`, and the
/// metric trace divides by `5`, so `‖H‖ = ‖(−4/25, 0, 2/25, 0)‖ = 2√5/25`.
pub const NONMINIMAL_GRAPH_RESIDUAL: f64 = 0.17888543819998318;

/// Kähler-angle cosine of the λ-graph `(x,y) ↦ (x, y, λx, −λy)`:
/// `|1 − λ²| / (1 + λ²)`.
pub fn lambda_graph_cos(lambda: f64) -> f64 {
    (1.0 - lambda * lambda).abs() / (1.0 + lambda * lambda)
}

/// Kähler-angle cosine of a Weierstrass-type minimal surface in flat ℂ².
///
/// Writing the immersion as `F = h + conj(l)` with holomorphic null data,
/// the pulled-back Kähler form is `(|h'|² − |l'|²) du∧dv` and the conformal
/// factor is `|h'|² + |l'|²`. For the null curve
/// `φ = (g₀(1+f₁f₂)/2, ig₀(1−f₁f₂)/2, g₀(f₁−f₂)/2, ig₀(f₁+f₂)/2)`
/// one finds `h' = (g₀f₁f₂, −g₀f₂)/2`, `l' = (g₀, g₀f₁)/2`, hence
/// `cos θ = | |f₂|² − 1 | / (|f₂|² + 1)` — it only depends on `f₂`.
pub fn weierstrass_cos_oracle(f2: Complex64) -> f64 {
    let m = f2.norm_sqr();
    ((m - 1.0) / (m + 1.0)).abs()
}

/// The corresponding value of `κ = log((1+cosθ)/(1−cosθ)) = |log |f₂|²|`.
pub fn weierstrass_kappa_oracle(f2: Complex64) -> f64 {
    f2.norm_sqr().ln().abs()
}

/// Polar decomposition of a 2×2 antisymmetric form against `g = c·I`,
/// solved symbolically: for `W = [[0, a], [−a, 0]]` the operator defined by
/// `W(X,Y) = g(AX, Y)` is `A = (1/c)·[[0, −a], [a, 0]]`, so
/// `cos θ = |a|/c`, `g̃ = (|a|/c)·I` and `J_ω = sign(a)·[[0, −1], [1, 0]]`.
pub struct Polar2Oracle {
    pub cos: f64,
    pub g_tilde: RMat,
    pub j_omega: RMat,
}

pub fn polar2_oracle(a: f64, c: f64) -> Polar2Oracle {
    let cos = a.abs() / c;
    let s = if a >= 0.0 { 1.0 } else { -1.0 };
    Polar2Oracle {
        cos,
        g_tilde: RMat::from_row_slice(2, 2, &[cos, 0.0, 0.0, cos]),
        j_omega: RMat::from_row_slice(2, 2, &[0.0, -s, s, 0.0]),
    }
}

/// Brute-force pullback of the ambient Kähler form: loops over pairs of
/// coordinate directions and evaluates `ω(dF e_i, dF e_j)` with
/// `ω(U, V) = g(JU, V)` expanded entrywise.
pub fn brute_pullback(df: &RMat, g_ambient: &RMat, j_ambient: &RMat) -> RMat {
    let m = df.ncols();
    let dim = df.nrows();
    let mut w = RMat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let u = df.column(i);
            let v = df.column(j);
            let mut acc = 0.0;
            for p in 0..dim {
                for q in 0..dim {
                    // (JU)^q = Σ_p J[q,p] U^p
                    for r in 0..dim {
                        acc += j_ambient[(q, p)] * u[p] * g_ambient[(q, r)] * v[r];
                    }
                }
            }
            w[(i, j)] = acc;
        }
    }
    w
}

/// Wedge square of a 2-form on a 4-dimensional space, evaluated on the
/// coordinate 4-frame by the full alternating sum over S₄ (with the
/// `1/(2!2!)` shuffle normalisation). Independent of any Pfaffian shortcut.
pub fn wedge_square_on_frame(w: &RMat) -> f64 {
    assert_eq!(w.nrows(), 4);
    let perms = permutations4();
    let mut acc = 0.0;
    for (sgn, p) in perms {
        acc += sgn * w[(p[0], p[1])] * w[(p[2], p[3])];
    }
    acc / 4.0
}

fn permutations4() -> Vec<(f64, [usize; 4])> {
    let mut out = Vec::new();
    let mut items = [0usize, 1, 2, 3];
    heap_permute(&mut items, 4, &mut out);
    out
}

fn heap_permute(items: &mut [usize; 4], k: usize, out: &mut Vec<(f64, [usize; 4])>) {
    if k == 1 {
        out.push((parity(items), *items));
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

fn parity(p: &[usize; 4]) -> f64 {
    let mut sgn = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] > p[j] {
                sgn = -sgn;
            }
        }
    }
    sgn
}

/// Denman–Beavers iteration for the principal square root of an SPD matrix.
/// Used to cross-check the eigendecomposition route to `g̃ = √(−A²)`.
pub fn denman_beavers_sqrt(a: &RMat) -> RMat {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = RMat::identity(n, n);
    for _ in 0..60 {
        let y_inv = y.clone().try_inverse().expect("iterate stays invertible");
        let z_inv = z.clone().try_inverse().expect("iterate stays invertible");
        let y_next = (&y + &z_inv) * 0.5;
        let z_next = (&z + &y_inv) * 0.5;
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta < 1e-15 {
            break;
        }
    }
    y
}

/// Fubini–Study Christoffel symbols on the affine chart of ℂP², from the
/// classical closed form in holomorphic coordinates,
/// `Γ^i_{jk} = −(δ_ij z̄_k + δ_ik z̄_j)/(1 + |z|²)`
/// (mixed holomorphic/antiholomorphic symbols vanish for a Kähler metric),
/// translated to real coordinates `(x₁, y₁, x₂, y₂)` via
/// `∂x_a = ∂z_a + ∂z̄_a`, `∂y_a = i(∂z_a − ∂z̄_a)`.
///
/// Returns `gamma[k][(i,j)] = Γ^k_{ij}`.
pub fn fs_christoffel_oracle(z1: Complex64, z2: Complex64) -> Vec<RMat> {
    let z = [z1, z2];
    let d = 1.0 + z1.norm_sqr() + z2.norm_sqr();
    // Holomorphic symbols Γ^i_{jk}.
    let holo = |i: usize, j: usize, k: usize| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        if i == j {
            s += z[k].conj();
        }
        if i == k {
            s += z[j].conj();
        }
        -s / d
    };
    // Complexified coordinate vectors expressed in the (∂z, ∂z̄) basis: for a
    // real direction e ∈ {x_a, y_a} we track its ∂z_a-coefficient `c[a]`
    // (the ∂z̄_a-coefficient is the conjugate).
    let zcoef = |e: usize| -> (usize, Complex64) {
        let a = e / 2;
        if e % 2 == 0 {
            (a, Complex64::new(1.0, 0.0)) // ∂x_a = ∂z_a + ∂z̄_a
        } else {
            (a, Complex64::new(0.0, 1.0)) // ∂y_a = i∂z_a − i∂z̄_a
        }
    };
    let mut gamma = vec![RMat::zeros(4, 4); 4];
    for ei in 0..4 {
        for ej in 0..4 {
            let (a, ca) = zcoef(ei);
            let (b, cb) = zcoef(ej);
            // ∇_{e_i} e_j = Σ_m A_m ∂z_m + conj(A_m) ∂z̄_m with
            // A_m = c_a c_b Γ^m_{ab}; real output coefficients are
            // Re(A_m) on ∂x_m and Im(A_m) on ∂y_m.
            for m in 0..2 {
                let am = ca * cb * holo(m, a, b);
                gamma[2 * m][(ei, ej)] = am.re;
                gamma[2 * m + 1][(ei, ej)] = am.im;
            }
        }
    }
    gamma
}

/// Constant-holomorphic-sectional-curvature tensor (curvature `c`) for the
/// sign conventions used throughout:
/// `R(X,Y)W = −∇_X∇_Y W + ∇_Y∇_X W + ∇_{[X,Y]}W` and
/// `R(X,Y,Z,W) = g(R(X,Y)Z, W)`, so that `R(X,Y,X,Y)` is the sectional
/// curvature of an orthonormal pair. Then
/// `R(X,Y,Z,W) = (c/4)[ g(X,Z)g(Y,W) − g(X,W)g(Y,Z) + g(JX,Z)g(JY,W)
///                      − g(JX,W)g(JY,Z) + 2 g(JX,Y)g(JZ,W) ]`.
pub fn space_form_curvature(
    c: f64,
    g: &RMat,
    j: &RMat,
    x: &RVec,
    y: &RVec,
    z: &RVec,
    w: &RVec,
) -> f64 {
    let ip = |u: &RVec, v: &RVec| -> f64 { u.dot(&(g * v)) };
    let jx = j * x;
    let jy = j * y;
    let jz = j * z;
    c / 4.0
        * (ip(x, z) * ip(y, w) - ip(x, w) * ip(y, z) + ip(&jx, z) * ip(&jy, w)
            - ip(&jx, w) * ip(&jy, z)
            + 2.0 * ip(&jx, y) * ip(&jz, w))
}

/// Fubini–Study real metric on the affine chart, derived independently from
/// the Kähler potential `½ log(1 + |z|²)`:
/// `g_{ij̄} = ½ (δ_ij d − z̄_i z_j)/d²` with `d = 1 + |z|²`, and
/// `g(∂x_a, ∂x_b) = g(∂y_a, ∂y_b) = 2 Re g_{ab̄}`,
/// `g(∂x_a, ∂y_b) = 2 Im g_{ab̄}`.
pub fn fs_metric_oracle(z1: Complex64, z2: Complex64) -> RMat {
    let z = [z1, z2];
    let d = 1.0 + z1.norm_sqr() + z2.norm_sqr();
    let h = |i: usize, j: usize| -> Complex64 {
        let delta = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        (delta * d - z[i].conj() * z[j]) * (0.5 / (d * d))
    };
    let mut g = RMat::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            let hab = h(a, b);
            g[(2 * a, 2 * b)] = 2.0 * hab.re;
            g[(2 * a + 1, 2 * b + 1)] = 2.0 * hab.re;
            g[(2 * a, 2 * b + 1)] = 2.0 * hab.im;
            g[(2 * a + 1, 2 * b)] = -2.0 * hab.im;
        }
    }
    g
}

/// Richardson extrapolation of two central-difference estimates of order `p`.
pub fn richardson(d_h: f64, d_half: f64, p: u32) -> f64 {
    let f = (2.0f64).powi(p as i32);
    (f * d_half - d_h) / (f - 1.0)
}

/// Deterministic sample points in a box `[lo, hi]^dim`, row-major grid.
pub fn grid_points(lo: f64, hi: f64, per_axis: usize, dim: usize) -> Vec<RVec> {
    let mut pts = Vec::new();
    let count = per_axis.pow(dim as u32);
    for flat in 0..count {
        let mut idx = flat;
        let mut p = RVec::zeros(dim);
        for d in 0..dim {
            let i = idx % per_axis;
            idx /= per_axis;
            p[d] = if per_axis == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * (i as f64) / ((per_axis - 1) as f64)
            };
        }
        pts.push(p);
    }
    pts
}
