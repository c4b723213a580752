//! Jet evaluation, induced metrics and second fundamental forms against
//! hand-computed derivatives and the frozen mean-curvature constant.

mod support;

use kahler_lens::ambient::AmbientSpace;
use kahler_lens::catalog::{build, build_default, BuildRequest, ParamValue};
use kahler_lens::immersion::{Immersion, JetMode, MapKind, Poly};
use kahler_lens::linalg::RVec;
use kahler_lens::GeometryError;

fn entry(id: &str) -> Immersion {
    build_default(id).unwrap().immersion
}

#[test]
fn polynomial_jet_matches_hand_derivatives() {
    // F(x, y) = (x, y, x²y, x − y³).
    let components = vec![
        Poly::coordinate(2, 0),
        Poly::coordinate(2, 1),
        Poly::new(2, vec![(1.0, vec![2, 1])]).unwrap(),
        Poly::new(2, vec![(1.0, vec![1, 0]), (-1.0, vec![0, 3])]).unwrap(),
    ];
    let f = Immersion::new(
        MapKind::Polynomial { components },
        AmbientSpace::from_catalog("flat:C2").unwrap(),
        vec![[-1.0, 1.0]; 2],
    )
    .unwrap();
    let (x, y) = (0.4, -0.3);
    let jet = f.jet(&RVec::from_vec(vec![x, y])).unwrap();

    let value = [x, y, x * x * y, x - y * y * y];
    let d1 = [
        [1.0, 0.0],
        [0.0, 1.0],
        [2.0 * x * y, x * x],
        [1.0, -3.0 * y * y],
    ];
    for c in 0..4 {
        assert!((jet.value[c] - value[c]).abs() < 1e-15);
        for k in 0..2 {
            assert!((jet.d1[(c, k)] - d1[c][k]).abs() < 1e-15, "d1[{c}][{k}]");
        }
    }
    // Only F₃ and F₄ have curvature: ∂²(x²y) = [2y, 2x; 2x, 0],
    // ∂²(x − y³) = [0, 0; 0, −6y].
    assert!((jet.d2[0][0][2] - 2.0 * y).abs() < 1e-15);
    assert!((jet.d2[0][1][2] - 2.0 * x).abs() < 1e-15);
    assert!((jet.d2[1][0][2] - 2.0 * x).abs() < 1e-15);
    assert!(jet.d2[1][1][2].abs() < 1e-15);
    assert!((jet.d2[1][1][3] + 6.0 * y).abs() < 1e-15);
    assert!(jet.d2[0][0][0].abs() < 1e-15);
}

#[test]
fn finite_difference_jets_track_analytic_jets() {
    for id in ["weierstrass", "rotated-j-curve", "clifford-lagrangian-cp2"] {
        let f = entry(id);
        let fd = f.clone().with_jet_mode(JetMode::FiniteDiff { step: 1e-4 });
        let p = RVec::from_vec(vec![0.3, -0.2]);
        let a = f.jet(&p).unwrap();
        let b = fd.jet(&p).unwrap();
        assert!((&a.value - &b.value).amax() < 1e-14, "{id}: values differ");
        assert!((&a.d1 - &b.d1).amax() < 1e-8, "{id}: d1 differ by {}", (&a.d1 - &b.d1).amax());
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((&a.d2[i][j] - &b.d2[i][j]).amax());
            }
        }
        assert!(worst < 1e-5, "{id}: d2 differ by {worst}");
    }
}

#[test]
fn induced_metric_is_first_fundamental_form() {
    // Entrywise loop: g_M[i][j] = Σ g_ambient(dF e_i, dF e_j), on a curved
    // ambient so the ambient metric actually matters.
    let f = entry("clifford-lagrangian-cp2");
    let p = RVec::from_vec(vec![0.9, -1.4]);
    let jet = f.jet(&p).unwrap();
    let g = f.ambient().metric_at(&jet.value).unwrap();
    let gm = f.induced_metric(&p).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    acc += jet.d1[(a, i)] * g[(a, b)] * jet.d1[(b, j)];
                }
            }
            assert!((gm[(i, j)] - acc).abs() < 1e-13, "g_M[{i}{j}]");
        }
    }
}

#[test]
fn second_fundamental_form_is_normal_valued() {
    for (id, p) in [
        ("weierstrass", RVec::from_vec(vec![0.3, -0.2])),
        ("clifford-lagrangian-cp2", RVec::from_vec(vec![0.7, 1.1])),
        ("nonminimal-graph", RVec::from_vec(vec![1.0, 0.0])),
    ] {
        let f = entry(id);
        let jet = f.jet(&p).unwrap();
        let g = f.ambient().metric_at(&jet.value).unwrap();
        let ii = f.second_fundamental_form(&p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let tangent = jet.d1.column(k);
                    let pairing = (ii[i][j].transpose() * &g * tangent)[(0, 0)];
                    assert!(
                        pairing.abs() < 1e-9,
                        "{id}: II({i},{j}) has tangential part {pairing} along {k}"
                    );
                }
            }
        }
    }
}

#[test]
fn mean_curvature_matches_frozen_constant_on_negative_control() {
    let f = entry("nonminimal-graph");
    let p = RVec::from_vec(vec![1.0, 0.0]);
    let residual = f.minimality_residual(&p).unwrap();
    assert!(
        (residual - support::NONMINIMAL_GRAPH_RESIDUAL).abs() < 1e-14,
        "‖trace ∇dF‖ = {residual} vs frozen {}",
        support::NONMINIMAL_GRAPH_RESIDUAL
    );
    // The mean-curvature vector itself: normal part of (2, 0, …) weighted by
    // g⁻¹ = diag(1/5, 1): (−4/5, 0, 2/5, 0)/5.
    let h = f.mean_curvature(&p).unwrap();
    let oracle = RVec::from_vec(vec![-4.0 / 25.0, 0.0, 2.0 / 25.0, 0.0]);
    assert!((&h - &oracle).amax() < 1e-14);

    // Minimal fixtures stay below the rank tolerance everywhere sampled.
    for id in ["weierstrass", "rotated-j-curve", "lambda-graph", "diagonal-disk"] {
        let f = entry(id);
        let residual = f.minimality_residual(&RVec::from_vec(vec![0.2, 0.3])).unwrap();
        assert!(residual < 1e-9, "{id}: {residual}");
    }
}

#[test]
fn tangent_projector_is_idempotent_and_fixes_tangents() {
    let f = entry("antidiagonal-disk");
    let p = RVec::from_vec(vec![0.25, -0.15]);
    let proj = f.tangent_projector(&p).unwrap();
    assert!((&proj * &proj - &proj).amax() < 1e-12, "not idempotent");
    let jet = f.jet(&p).unwrap();
    for k in 0..2 {
        let col = jet.d1.column(k).clone_owned();
        assert!((&proj * &col - &col).amax() < 1e-12, "does not fix dF(e_{k})");
    }
}

#[test]
fn product_jets_have_block_structure() {
    let req = BuildRequest::bare("product")
        .with("left", ParamValue::Entry(Box::new(BuildRequest::bare("weierstrass"))))
        .with("right", ParamValue::Entry(Box::new(BuildRequest::bare("lambda-graph"))));
    let f = build(&req).unwrap().immersion;
    let p = RVec::from_vec(vec![0.3, -0.2, 0.1, 0.4]);
    let jet = f.jet(&p).unwrap();
    // Left factor variables may not move right-factor coordinates and vice
    // versa: dF is block diagonal over (4+4) ambient × (2+2) domain.
    for row in 0..4 {
        for col in 2..4 {
            assert_eq!(jet.d1[(row, col)], 0.0);
        }
    }
    for row in 4..8 {
        for col in 0..2 {
            assert_eq!(jet.d1[(row, col)], 0.0);
        }
    }
    // Mixed second derivatives vanish as well.
    for c in 0..8 {
        assert_eq!(jet.d2[0][2][c], 0.0);
        assert_eq!(jet.d2[1][3][c], 0.0);
    }
}

#[test]
fn chart_guards_reject_outside_evaluations() {
    let f = entry("weierstrass");
    let outside = RVec::from_vec(vec![5.0, 0.0]);
    match f.map(&outside) {
        Err(GeometryError::OutsideChart { .. }) => {}
        other => panic!("expected OutsideChart, got {other:?}"),
    }
    match f.jet(&outside) {
        Err(GeometryError::OutsideChart { .. }) => {}
        other => panic!("expected OutsideChart, got {other:?}"),
    }

    // Dimension mismatches are rejected at construction time.
    let bad = Immersion::new(
        MapKind::Polynomial {
            components: vec![Poly::coordinate(2, 0); 3],
        },
        AmbientSpace::from_catalog("flat:C2").unwrap(),
        vec![[-1.0, 1.0]; 2],
    );
    assert!(bad.is_err(), "3 components cannot map into a 4-dimensional ambient");
}
