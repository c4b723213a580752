//! Randomized structural invariants of the angle machinery: polar
//! reconstruction for arbitrary skew operators, Weyl stability of the angle
//! spectrum, determinant identities for synthetic spectra, and cosine bounds
//! for random graph immersions.

mod support;

use kahler_lens::ambient::AmbientSpace;
use kahler_lens::angles::{kahler_angles, kappa, kappa_determinant_route, polar_decompose};
use kahler_lens::identities::interior_grid;
use kahler_lens::immersion::{Immersion, MapKind, Poly};
use kahler_lens::linalg::{RMat, RVec};
use kahler_lens::Tolerances;

use proptest::prelude::*;

/// Operator norm via the symmetric eigenproblem of `MᵀM`.
fn op_norm(m: &RMat) -> f64 {
    (m.transpose() * m).symmetric_eigen().eigenvalues.iter().fold(0.0f64, |a, v| a.max(*v)).sqrt()
}

/// Random g-skew operator and SPD metric from flat coefficient vectors.
fn skew_and_metric(n2: usize, raw: &[f64]) -> (RMat, RMat) {
    let mut w = RMat::zeros(n2, n2);
    let mut idx = 0;
    for i in 0..n2 {
        for j in (i + 1)..n2 {
            w[(i, j)] = raw[idx];
            w[(j, i)] = -raw[idx];
            idx += 1;
        }
    }
    let mut b = RMat::zeros(n2, n2);
    for i in 0..n2 {
        for j in 0..n2 {
            b[(i, j)] = raw[idx];
            idx += 1;
        }
    }
    let g = &b * b.transpose() + RMat::identity(n2, n2);
    (w, g)
}

/// Flat coefficient count for `skew_and_metric`.
fn coeff_len(n2: usize) -> usize {
    n2 * (n2 - 1) / 2 + n2 * n2
}

proptest! {
    #[test]
    fn polar_reconstruction_roundtrip(
        half_n in 1usize..=3,
        raw in proptest::collection::vec(-1.0f64..1.0, coeff_len(6)),
    ) {
        let n2 = 2 * half_n;
        let (w, g) = skew_and_metric(n2, &raw);
        let operator = -(g.clone().try_inverse().unwrap()) * &w;
        let tol = Tolerances::default();
        let spectrum = polar_decompose(&operator, &g, &tol).unwrap();

        // A = g̃ · J_ω exactly.
        let recon = &spectrum.g_tilde * &spectrum.j_omega;
        let scale = 1.0 + op_norm(&operator);
        prop_assert!((&recon - &operator).amax() < 1e-10 * scale);

        // The factors commute and J_ω² = −1 off the kernel.
        let comm = &spectrum.g_tilde * &spectrum.j_omega - &spectrum.j_omega * &spectrum.g_tilde;
        prop_assert!(comm.amax() < 1e-10 * scale);
        let j_sq = &spectrum.j_omega * &spectrum.j_omega;
        let rank = spectrum.rank_stratum;
        // Eigen-coordinates: J² + I must kill everything except the kernel,
        // where J itself vanishes; check via J² J = −J and J²g̃ = −g̃.
        prop_assert!((&j_sq * &spectrum.j_omega + &spectrum.j_omega).amax() < 1e-9 * scale);
        prop_assert!((&j_sq * &spectrum.g_tilde + &spectrum.g_tilde).amax() < 1e-9 * scale);

        // Cosines sorted descending, kernel dimension consistent.
        for k in 1..spectrum.cosines.len() {
            prop_assert!(spectrum.cosines[k - 1] >= spectrum.cosines[k] - 1e-15);
        }
        prop_assert_eq!(spectrum.kernel_basis.len(), 2 * (half_n - rank));
    }

    #[test]
    fn angle_spectrum_is_weyl_stable(
        half_n in 1usize..=3,
        raw in proptest::collection::vec(-1.0f64..1.0, coeff_len(6)),
        raw_pert in proptest::collection::vec(-1e-3f64..1e-3, 15),
    ) {
        // For the Euclidean metric the angle cosines are paired singular
        // values, so a skew perturbation moves them by at most its operator
        // norm (Weyl/Mirsky).
        let n2 = 2 * half_n;
        let (w, _) = skew_and_metric(n2, &raw);
        let g = RMat::identity(n2, n2);
        let mut e = RMat::zeros(n2, n2);
        let mut idx = 0;
        for i in 0..n2 {
            for j in (i + 1)..n2 {
                e[(i, j)] = raw_pert[idx];
                e[(j, i)] = -raw_pert[idx];
                idx += 1;
            }
        }
        let tol = Tolerances::default();
        let base = polar_decompose(&(-w.clone()), &g, &tol).unwrap();
        let moved = polar_decompose(&(-(&w + &e)), &g, &tol).unwrap();
        let bound = op_norm(&e) + 1e-12;
        for (a, b) in base.cosines.iter().zip(&moved.cosines) {
            prop_assert!((a - b).abs() <= bound, "Δcos = {} > ‖E‖ = {bound}", (a - b).abs());
        }
    }

    #[test]
    fn synthetic_spectra_satisfy_kappa_identities(
        cosines in proptest::collection::vec(0.0f64..0.95, 1..=3),
    ) {
        // Block-diagonal W with prescribed angle blocks against g = I.
        let n = cosines.len();
        let n2 = 2 * n;
        let mut w = RMat::zeros(n2, n2);
        for (k, c) in cosines.iter().enumerate() {
            w[(2 * k, 2 * k + 1)] = *c;
            w[(2 * k + 1, 2 * k)] = -*c;
        }
        let g = RMat::identity(n2, n2);
        let tol = Tolerances::default();
        let spectrum = polar_decompose(&(-w), &g, &tol).unwrap();

        let mut sorted = cosines.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in spectrum.cosines.iter().zip(&sorted) {
            prop_assert!((got - want).abs() < 1e-12);
        }

        // κ via angles, via determinants, and via the closed form agree.
        let via_angles = kappa(&spectrum, &tol).unwrap();
        let closed: f64 = sorted.iter().map(|c| ((1.0 + c) / (1.0 - c)).ln()).sum();
        let via_det = kappa_determinant_route(&spectrum);
        prop_assert!((via_angles - closed).abs() < 1e-10 * (1.0 + closed));
        prop_assert!((via_det - closed).abs() < 1e-10 * (1.0 + closed));

        // det(I ± g̃) = Π(1 ± c)².
        let plus = (RMat::identity(n2, n2) + &spectrum.g_tilde).determinant();
        let minus = (RMat::identity(n2, n2) - &spectrum.g_tilde).determinant();
        let prod_plus: f64 = sorted.iter().map(|c| (1.0 + c) * (1.0 + c)).product();
        let prod_minus: f64 = sorted.iter().map(|c| (1.0 - c) * (1.0 - c)).product();
        prop_assert!((plus - prod_plus).abs() < 1e-10 * prod_plus.max(1.0));
        prop_assert!((minus - prod_minus).abs() < 1e-10 * prod_minus.max(1.0));
    }

    #[test]
    fn random_graph_immersions_have_unit_bounded_cosines(
        c1 in -0.8f64..0.8,
        c2 in -0.8f64..0.8,
        c3 in -0.8f64..0.8,
        c4 in -0.8f64..0.8,
        x in -0.4f64..0.4,
        y in -0.4f64..0.4,
    ) {
        // (x, y) ↦ (x, y, c₁x + c₂y + c₃xy, c₄x² − c₁y²): genuinely immersed
        // (first two components), arbitrary mixed graph on top.
        let components = vec![
            Poly::coordinate(2, 0),
            Poly::coordinate(2, 1),
            Poly::new(2, vec![(c1, vec![1, 0]), (c2, vec![0, 1]), (c3, vec![1, 1])]).unwrap(),
            Poly::new(2, vec![(c4, vec![2, 0]), (-c1, vec![0, 2])]).unwrap(),
        ];
        let f = Immersion::new(
            MapKind::Polynomial { components },
            AmbientSpace::from_catalog("flat:C2").unwrap(),
            vec![[-0.5, 0.5]; 2],
        ).unwrap();
        let p = RVec::from_vec(vec![x, y]);
        let spectrum = kahler_angles(&f, &p).unwrap();
        for c in &spectrum.cosines {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(c), "cos = {c} escapes [0, 1]");
        }
        // The projection inequality κ ≥ 0 with equality iff Lagrangian.
        let k = kappa(&spectrum, f.tolerances()).unwrap();
        prop_assert!(k >= 0.0);
    }

    #[test]
    fn interior_grid_is_ordered_and_strictly_inside(
        per_axis in 1usize..=4,
        margin in 0.01f64..0.4,
        half in 0.2f64..2.0,
    ) {
        let chart = [[-half, half], [-half, half]];
        let grid = interior_grid(&chart, per_axis, margin);
        prop_assert_eq!(grid.len(), per_axis * per_axis);
        let limit = half - margin * half + 1e-12;
        for p in &grid {
            prop_assert!(p[0].abs() <= limit && p[1].abs() <= limit);
        }
        // Axis 0 varies fastest.
        if per_axis > 1 {
            prop_assert!(grid[1][0] > grid[0][0]);
            prop_assert!((grid[1][1] - grid[0][1]).abs() < 1e-15);
        }
    }
}
