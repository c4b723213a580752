//! Angle-spectrum machinery against closed-form and brute-force oracles:
//! symbolic 2×2 polar decompositions, entrywise pullback loops, null-curve
//! angle data, determinant routes to κ, and the wedge-square sign split.

mod support;

use kahler_lens::angles::{
    classify_directions, kahler_angles, kappa, kappa_at, kappa_determinant_route, pfaffian_split,
    polar_decompose, pullback_form, DirectionClass,
};
use kahler_lens::catalog::{build, build_default, BuildRequest, ParamValue};
use kahler_lens::identities::interior_grid;
use kahler_lens::immersion::{MapKind, Poly};
use kahler_lens::linalg::{RMat, RVec};
use kahler_lens::Tolerances;

use num_complex::Complex64;

fn entry(id: &str) -> kahler_lens::Immersion {
    build_default(id).unwrap().immersion
}

fn product_of(left: BuildRequest, right: BuildRequest) -> kahler_lens::Immersion {
    let req = BuildRequest::bare("product")
        .with("left", ParamValue::Entry(Box::new(left)))
        .with("right", ParamValue::Entry(Box::new(right)));
    build(&req).unwrap().immersion
}

#[test]
fn polar_two_by_two_matches_symbolic_oracle() {
    let tol = Tolerances::default();
    for &(a, c) in &[(0.3, 1.0), (-0.44, 0.9), (0.0, 2.0), (0.999, 1.0), (-1.3, 2.6)] {
        let g = RMat::identity(2, 2) * c;
        let operator = RMat::from_row_slice(2, 2, &[0.0, -a / c, a / c, 0.0]);
        let spectrum = polar_decompose(&operator, &g, &tol).unwrap();
        let oracle = support::polar2_oracle(a, c);
        assert!((spectrum.cosines[0] - oracle.cos).abs() < 1e-14, "cos for a={a}, c={c}");
        assert!((&spectrum.g_tilde - &oracle.g_tilde).amax() < 1e-14);
        if oracle.cos > tol.rank {
            assert!((&spectrum.j_omega - &oracle.j_omega).amax() < 1e-14);
            assert!(spectrum.kernel_basis.is_empty());
        } else {
            // Lagrangian 2×2: J_ω vanishes and the kernel is everything.
            assert!(spectrum.j_omega.amax() < 1e-14);
            assert_eq!(spectrum.kernel_basis.len(), 2);
        }
    }
}

#[test]
fn pullback_matches_entrywise_brute_force() {
    for (id, p) in [
        ("weierstrass", RVec::from_vec(vec![0.3, -0.2])),
        ("antidiagonal-disk", RVec::from_vec(vec![0.25, 0.1])),
        ("clifford-lagrangian-cp2", RVec::from_vec(vec![0.8, -1.1])),
    ] {
        let f = entry(id);
        let form = pullback_form(&f, &p).unwrap();
        let jet = f.jet(&p).unwrap();
        let g = f.ambient().metric_at(&jet.value).unwrap();
        let j = f.ambient().complex_structure_at(&jet.value).unwrap();
        let brute = support::brute_pullback(&jet.d1, &g, &j);
        assert!(
            (&form.bilinear - &brute).amax() < 1e-11,
            "{id}: pullback disagrees with brute force by {}",
            (&form.bilinear - &brute).amax()
        );
    }
}

#[test]
fn g_tilde_agrees_with_denman_beavers_square_root() {
    // g̃ is the principal square root of −A² (a matrix with positive real
    // spectrum); the Denman–Beavers iteration reaches it without any
    // eigendecomposition. Requires invertible A, so only full-rank points.
    let prod = product_of(BuildRequest::bare("weierstrass"), BuildRequest::bare("lambda-graph"));
    let cases = [
        (entry("weierstrass"), RVec::from_vec(vec![0.2, 0.3])),
        (entry("lambda-graph"), RVec::from_vec(vec![0.4, -0.2])),
        (entry("lambda-graph-family"), RVec::from_vec(vec![-0.3, 0.2])),
        (prod, RVec::from_vec(vec![0.2, 0.3, 0.4, -0.2])),
    ];
    for (f, p) in cases {
        let spectrum = kahler_angles(&f, &p).unwrap();
        assert_eq!(spectrum.rank_stratum, spectrum.cosines.len(), "need full rank");
        let form = pullback_form(&f, &p).unwrap();
        let minus_a_sq = -(&form.operator * &form.operator);
        let db = support::denman_beavers_sqrt(&minus_a_sq);
        assert!(
            (&db - &spectrum.g_tilde).amax() < 1e-9,
            "g̃ vs iterative square root differ by {}",
            (&db - &spectrum.g_tilde).amax()
        );
    }
}

#[test]
fn weierstrass_spectrum_follows_null_curve_data() {
    // For Weierstrass data (f₁, f₂, g₀) the angle depends only on f₂:
    // cosθ = ||f₂|² − 1|/(|f₂|² + 1), κ = |ln |f₂|²|.
    let f = entry("weierstrass");
    let f2 = |w: Complex64| Complex64::new(2.0, 0.0) + 0.5 * w;
    for p in interior_grid(&f.chart_box(), 5, 0.05) {
        let w = Complex64::new(p[0], p[1]);
        let spectrum = kahler_angles(&f, &p).unwrap();
        let cos_oracle = support::weierstrass_cos_oracle(f2(w));
        assert!(
            (spectrum.cosines[0] - cos_oracle).abs() < 1e-12,
            "cos at {w}: {} vs {cos_oracle}",
            spectrum.cosines[0]
        );
        let kappa_oracle = support::weierstrass_kappa_oracle(f2(w));
        assert!((kappa_at(&f, &p).unwrap() - kappa_oracle).abs() < 1e-12);
    }
}

#[test]
fn family_graph_cos_follows_chain_rule() {
    // (x, y) ↦ (x, y, a(x), b(y)) has cosθ = |1 + a′b′|/√((1+a′²)(1+b′²));
    // defaults: a(x) = 0.5x + 0.1x³, b(y) = 0.4y + 0.2y².
    let f = entry("lambda-graph-family");
    for p in interior_grid(&f.chart_box(), 5, 0.05) {
        let da = 0.5 + 0.3 * p[0] * p[0];
        let db = 0.4 + 0.4 * p[1];
        let oracle = (1.0 + da * db).abs() / ((1.0 + da * da) * (1.0 + db * db)).sqrt();
        let spectrum = kahler_angles(&f, &p).unwrap();
        assert!(
            (spectrum.cosines[0] - oracle).abs() < 1e-12,
            "cos at {p:?}: {} vs {oracle}",
            spectrum.cosines[0]
        );
    }
}

#[test]
fn lambda_graph_cos_is_expected_rational_function() {
    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let req = BuildRequest::bare("lambda-graph").with("lambda", ParamValue::Number(lambda));
        let f = build(&req).unwrap().immersion;
        let spectrum = kahler_angles(&f, &RVec::from_vec(vec![0.3, 0.1])).unwrap();
        let oracle = support::lambda_graph_cos(lambda);
        assert!(
            (spectrum.cosines[0] - oracle).abs() < 1e-13,
            "λ = {lambda}: {} vs {oracle}",
            spectrum.cosines[0]
        );
    }
    // The catalog refuses slopes outside [0, 1] (they repeat the same
    // angles with reversed orientation).
    let req = BuildRequest::bare("lambda-graph").with("lambda", ParamValue::Number(2.0));
    assert!(build(&req).is_err());
}

#[test]
fn determinant_identity_and_kappa_routes_agree() {
    // det(g ± g̃♭) = det(g)·Π(1 ± cosθ_α)², and the determinant route to κ
    // matches the angle sum.
    let fixtures = [
        ("weierstrass", RVec::from_vec(vec![0.3, -0.2])),
        ("lambda-graph", RVec::from_vec(vec![0.1, 0.4])),
        ("lambda-graph-family", RVec::from_vec(vec![-0.2, 0.3])),
        ("antidiagonal-disk", RVec::from_vec(vec![0.3, 0.2])),
    ];
    for (id, p) in fixtures {
        let f = entry(id);
        let spectrum = kahler_angles(&f, &p).unwrap();
        let form = pullback_form(&f, &p).unwrap();
        let g = &form.induced_metric;
        let lowered = g * &spectrum.g_tilde;
        let det_g = g.determinant();
        let plus = (g + &lowered).determinant() / det_g;
        let minus = (g - &lowered).determinant() / det_g;
        let prod_plus: f64 = spectrum.cosines.iter().map(|c| (1.0 + c) * (1.0 + c)).product();
        let prod_minus: f64 = spectrum.cosines.iter().map(|c| (1.0 - c) * (1.0 - c)).product();
        assert!((plus - prod_plus).abs() < 1e-10 * prod_plus.max(1.0), "{id}: det(g+g̃♭)");
        assert!((minus - prod_minus).abs() < 1e-10 * prod_minus.max(1.0), "{id}: det(g−g̃♭)");

        let via_angles = kappa(&spectrum, f.tolerances()).unwrap();
        let via_det = kappa_determinant_route(&spectrum);
        assert!((via_angles - via_det).abs() < 1e-10 * (1.0 + via_angles.abs()), "{id}: κ routes");
    }
}

/// Direct sum of two planar "anti-graphs" `(u, v) ↦ (u, v, a·u, −a·v)` into
/// flat ℂ⁴: block angle spectrum with `cosθ_i = |1 − a_i²|/(1 + a_i²)` and a
/// pullback form of sign `sign(1 − a_i²)` on block `i` — slopes above 1 give
/// a negative wedge-square sign without leaving polynomial closed form.
fn anti_graph_sum(a1: f64, a2: f64) -> kahler_lens::Immersion {
    let coord = |k: usize| Poly::coordinate(4, k);
    let scaled = |c: f64, k: usize| {
        let mut exps = vec![0u32; 4];
        exps[k] = 1;
        Poly::new(4, vec![(c, exps)]).unwrap()
    };
    let components = vec![
        coord(0),
        coord(1),
        scaled(a1, 0),
        scaled(-a1, 1),
        coord(2),
        coord(3),
        scaled(a2, 2),
        scaled(-a2, 3),
    ];
    kahler_lens::Immersion::new(
        MapKind::Polynomial { components },
        kahler_lens::AmbientSpace::from_catalog("flat:C4").unwrap(),
        vec![[-1.0, 1.0]; 4],
    )
    .unwrap()
}

#[test]
fn pfaffian_split_sign_and_magnitude() {
    let p = RVec::from_vec(vec![0.3, -0.2, 0.2, 0.1]);

    // Both blocks orientation-compatible: ε = +1.
    let f_plus = anti_graph_sum(0.4, 0.5);
    // Second block with slope > 1 flips the sign of its pullback form: ε = −1.
    let f_minus = anti_graph_sum(0.4, 2.0);

    for (f, a2, expected_eps) in [(f_plus, 0.5, 1.0), (f_minus, 2.0, -1.0)] {
        let spectrum = kahler_angles(&f, &p).unwrap();
        // Sorted descending: slope 0.4 gives the larger cosine.
        assert!((spectrum.cosines[0] - support::lambda_graph_cos(0.4)).abs() < 1e-14);
        assert!((spectrum.cosines[1] - support::lambda_graph_cos(a2)).abs() < 1e-14);
        let split = pfaffian_split(&f, &p, 1.0).unwrap();
        assert_eq!(split.epsilon, expected_eps);
        assert!(split.smooth_split, "distinct angles expected at {p:?}");
        assert!((split.s2 - expected_eps * spectrum.cosines[1]).abs() < 1e-14);

        // Magnitude against the brute-force wedge square (S₄ alternating
        // sum): (F*ω ∧ F*ω)(e₁..e₄) = 2·Pf(W).
        let form = pullback_form(&f, &p).unwrap();
        let wedge = support::wedge_square_on_frame(&form.bilinear);
        let det_g = form.induced_metric.determinant();
        let ratio_oracle = wedge / (2.0 * det_g.sqrt());
        assert!(
            (split.wedge_ratio - ratio_oracle).abs() < 1e-12,
            "wedge ratio {} vs brute force {ratio_oracle}",
            split.wedge_ratio
        );
        let c1c2 = spectrum.cosines[0] * spectrum.cosines[1];
        assert!((split.wedge_ratio.abs() - c1c2).abs() < 1e-12);

        // Flipping the declared orientation flips ε and s₂.
        let flipped = pfaffian_split(&f, &p, -1.0).unwrap();
        assert_eq!(flipped.epsilon, -expected_eps);
        assert!((flipped.s2 + split.s2).abs() < 1e-14);
    }
}

#[test]
fn direction_classification_flags() {
    let tol = 1e-8;

    let complex = kahler_angles(&entry("complex-graph"), &RVec::from_vec(vec![0.3, 0.1])).unwrap();
    let cls = classify_directions(&complex.cosines, tol);
    assert!(cls.is_complex_point && cls.has_complex && !cls.has_lagrangian);
    assert!(cls.labels.iter().all(|l| *l == DirectionClass::Complex));

    let lag = kahler_angles(&entry("lagrangian-plane"), &RVec::from_vec(vec![0.4, -0.3])).unwrap();
    let cls = classify_directions(&lag.cosines, tol);
    assert!(cls.is_lagrangian_point && cls.has_lagrangian && !cls.has_complex);
    assert_eq!(lag.rank_stratum, 0);

    let mid = kahler_angles(&entry("lambda-graph"), &RVec::from_vec(vec![0.2, 0.5])).unwrap();
    let cls = classify_directions(&mid.cosines, tol);
    assert!(!cls.is_complex_point && !cls.is_lagrangian_point);
    assert!(!cls.has_complex && !cls.has_lagrangian);
    assert_eq!(cls.labels, vec![DirectionClass::Intermediate]);

    // Mixed product: one complex and one Lagrangian direction.
    let mixed = product_of(
        BuildRequest::bare("complex-graph"),
        BuildRequest::bare("lagrangian-plane"),
    );
    let spec = kahler_angles(&mixed, &RVec::from_vec(vec![0.1, 0.2, 0.3, -0.1])).unwrap();
    let cls = classify_directions(&spec.cosines, tol);
    assert!(cls.has_complex && cls.has_lagrangian);
    assert!(!cls.is_complex_point && !cls.is_lagrangian_point);
}

#[test]
fn fubini_study_ambient_matches_potential_oracles() {
    let space = kahler_lens::AmbientSpace::from_catalog("cp2:fs").unwrap();
    let q = RVec::from_vec(vec![0.4, -0.2, 0.3, 0.6]);
    let z1 = Complex64::new(q[0], q[1]);
    let z2 = Complex64::new(q[2], q[3]);

    let metric = space.metric_at(&q).unwrap();
    let metric_oracle = support::fs_metric_oracle(z1, z2);
    assert!((&metric - &metric_oracle).amax() < 1e-12);

    let gamma = space.christoffel_at(&q).unwrap();
    let gamma_oracle = support::fs_christoffel_oracle(z1, z2);
    for k in 0..4 {
        assert!(
            (&gamma.gamma[k] - &gamma_oracle[k]).amax() < 1e-6,
            "Christoffel layer {k} differs by {}",
            (&gamma.gamma[k] - &gamma_oracle[k]).amax()
        );
    }
}

#[test]
fn ambient_curvatures_match_space_form_oracle() {
    // Fubini–Study has constant holomorphic sectional curvature 4; each
    // Poincaré factor of the bidisk has −1. Compare full tensors entrywise
    // on a spanning set of argument 4-tuples.
    let fs = kahler_lens::AmbientSpace::from_catalog("cp2:fs").unwrap();
    let q = RVec::from_vec(vec![0.3, 0.1, -0.2, 0.4]);
    let g = fs.metric_at(&q).unwrap();
    let j = fs.complex_structure_at(&q).unwrap();
    let curv = fs.curvature_at(&q).unwrap();
    let basis: Vec<RVec> = (0..4).map(|k| RVec::from_fn(4, |i, _| f64::from(i == k))).collect();
    for i in 0..4 {
        for jj in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let oracle = support::space_form_curvature(
                        4.0, &g, &j, &basis[i], &basis[jj], &basis[k], &basis[l],
                    );
                    let got = curv.apply(&basis[i], &basis[jj], &basis[k], &basis[l]);
                    assert!(
                        (got - oracle).abs() < 2e-5,
                        "FS R[{i}{jj}{k}{l}] = {got} vs {oracle}"
                    );
                }
            }
        }
    }

    let bidisk = kahler_lens::AmbientSpace::from_catalog("diskxdisk").unwrap();
    let q = RVec::from_vec(vec![0.3, -0.1, 0.0, 0.0]);
    let g = bidisk.metric_at(&q).unwrap();
    let j = bidisk.complex_structure_at(&q).unwrap();
    let curv = bidisk.curvature_at(&q).unwrap();
    // Arguments supported in the first factor see a −1 space form.
    let e = |k: usize| RVec::from_fn(4, |i, _| f64::from(i == k));
    for i in 0..2 {
        for jj in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let oracle =
                        support::space_form_curvature(-1.0, &g, &j, &e(i), &e(jj), &e(k), &e(l));
                    let got = curv.apply(&e(i), &e(jj), &e(k), &e(l));
                    assert!(
                        (got - oracle).abs() < 1e-9,
                        "disk R[{i}{jj}{k}{l}] = {got} vs {oracle}"
                    );
                }
            }
        }
    }
    // Cross-factor slots vanish on a metric product.
    assert!(curv.apply(&e(0), &e(2), &e(1), &e(3)).abs() < 1e-12);
}
