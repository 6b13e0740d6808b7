mod common;

use std::sync::Arc;

use common::*;
use slant_core::immersion::{frame_at, normal_residual, tangential_operator, MetricField};
use slant_core::numkit::maps::AffineMap;
use slant_core::numkit::{Mat, Tolerances};
use slant_core::slant::{
    cross_term, family_slant_check, induced_structure, product_check, slant_at,
    slant_function_scan, transitivity_chain_check, transitivity_check, Classification, ProductMode,
    ProductPart,
};
use slant_core::structures::presets::{example1_pair, standard_complex};
use slant_core::structures::{CoefficientFunctions, MetricSpec, TensorField11};

fn lattice(lo: f64, hi: f64, steps: usize) -> Vec<Vec<f64>> {
    let h = (hi - lo) / (steps - 1) as f64;
    let mut out = Vec::new();
    for i in 0..steps {
        for j in 0..steps {
            out.push(vec![lo + i as f64 * h, lo + j as f64 * h]);
        }
    }
    out
}

fn e1_denominator(x1: f64, x2: f64) -> f64 {
    (4.0 * x1 * x1 + 7.0) * (4.0 * x2 * x2 + 7.0)
}

fn e1_cos(x1: f64, x2: f64) -> (f64, f64) {
    let d = e1_denominator(x1, x2).sqrt();
    (2.0 * (x1 + x2).abs() / d, 2.0 * (x1 - 1.0).abs() / d)
}

fn e1_cross(x1: f64, x2: f64) -> f64 {
    4.0 * (x1 + x2) * (x1 - 1.0) / e1_denominator(x1, x2)
}

fn e3_j1() -> TensorField11 {
    TensorField11::constant(standard_complex(4))
}

#[test]
fn example1_slant_functions_on_grid() {
    let f = immersion(Example1);
    let (j1, j2) = example1_pair();
    let g = MetricSpec::euclidean(8);
    let tol = Tolerances::default();
    let grid = lattice(-2.0, 2.0, 5);
    for (j, which) in [(&j1, 0), (&j2, 1)] {
        let scan = slant_function_scan(&f, j, &g, &grid, &tol);
        assert!(scan.exclusions.is_empty());
        for r in &scan.reports {
            let (c1, c2) = e1_cos(r.param[0], r.param[1]);
            let expected = [c1, c2][which].acos();
            assert!((r.theta.unwrap() - expected).abs() <= 1e-9, "{:?}", r.param);
        }
    }
}

#[test]
fn example1_cross_term_matches_closed_form() {
    let f = immersion(Example1);
    let (j1, j2) = example1_pair();
    let g = MetricSpec::euclidean(8);
    let tol = Tolerances::default();
    for u in lattice(-2.0, 2.0, 5) {
        let fr = frame_at(&f, &u, &g).unwrap();
        let ct = cross_term(&fr, &j1, &j2, &tol).unwrap();
        assert!(ct.proportional);
        assert!((ct.scalar - e1_cross(u[0], u[1])).abs() <= 1e-9, "{u:?}");
    }
}

#[test]
fn example1_family_matches_formula() {
    let f = immersion(Example1);
    let (j1, j2) = example1_pair();
    let g = MetricSpec::euclidean(8);
    let tol = Tolerances::default();
    let grid = lattice(-2.0, 2.0, 5);
    let s = 0.5f64.sqrt();
    for (a, b) in [(s, s), (0.6, 0.8)] {
        let c = CoefficientFunctions::constants(&[a, b], 8);
        let r = family_slant_check(&f, &j1, &j2, &c, &g, &grid, &tol).unwrap();
        assert!(r.exclusions.is_empty());
        for p in &r.points {
            let (x1, x2) = (p.param[0], p.param[1]);
            let (c1, c2) = e1_cos(x1, x2);
            let cos2 = a * a * c1 * c1 + b * b * c2 * c2 + 2.0 * a * b * e1_cross(x1, x2);
            let direct = p.direct.cos_theta().unwrap();
            assert!(
                (direct - cos2.max(0.0).sqrt()).abs() <= 1e-9,
                "{:?}",
                p.param
            );
            assert!(p.cos_diff.unwrap() <= 1e-9);
        }
    }
}

#[test]
fn example2_corollary_and_anti_invariance() {
    let f = immersion(Example2);
    let (j1, j2) = example1_pair();
    let g = MetricSpec::euclidean(8);
    let tol = Tolerances::default();
    // Half-step offset keeps the lattice off the diagonal.
    let grid: Vec<Vec<f64>> = lattice(-2.0, 2.0, 5)
        .into_iter()
        .map(|u| vec![u[0] + 0.5, u[1]])
        .collect();
    for (a, b) in [(0.6, 0.8), (-0.8, 0.6), (0.28, -0.96)] {
        let c = CoefficientFunctions::constants(&[a, b], 8);
        let r = family_slant_check(&f, &j1, &j2, &c, &g, &grid, &tol).unwrap();
        assert!(r.exclusions.is_empty());
        for p in &r.points {
            let (x1, x2) = (p.param[0], p.param[1]);
            let cos1 = (4.0 * x1 * x2 + 5.0).abs()
                / ((4.0 * x1 * x1 + 5.0) * (4.0 * x2 * x2 + 5.0)).sqrt();
            let expected = (a.abs() * cos1).acos();
            assert!((p.direct.theta.unwrap() - expected).abs() <= 1e-9);
        }
    }
    for u in &grid {
        let fr = frame_at(&f, u, &g).unwrap();
        let c = tangential_operator(&fr, &j2).unwrap().c;
        assert!(c.norm() <= 1e-12);
        // Orthogonal images: the cross term vanishes.
        let ct = cross_term(&fr, &j1, &j2, &tol).unwrap();
        assert!(ct.scalar.abs() <= 1e-12 && ct.proportional);
    }
}

#[test]
fn example2_corollary_value_at_one_minus_one() {
    let f = immersion(Example2);
    let (j1, j2) = example1_pair();
    let c = CoefficientFunctions::constants(&[0.6, 0.8], 8);
    let r = family_slant_check(
        &f,
        &j1,
        &j2,
        &c,
        &MetricSpec::euclidean(8),
        &[vec![1.0, -1.0]],
        &Tolerances::default(),
    )
    .unwrap();
    let cos = r.points[0].direct.cos_theta().unwrap();
    assert!((cos - 0.6 / 9.0).abs() < 1e-14);
}

#[test]
fn example2_diagonal_is_invariant_for_first_structure() {
    let f = immersion(Example2);
    let (j1, _) = example1_pair();
    let fr = frame_at(&f, &[0.7, 0.7], &MetricSpec::euclidean(8)).unwrap();
    let r = slant_at(&fr, &j1, &Tolerances::default()).unwrap();
    assert_eq!(r.classification, Classification::Invariant);
}

#[test]
fn example3_frame_and_operator() {
    let f = immersion(Example3Outer);
    let g = MetricSpec::euclidean(8);
    let j1 = e3_j1();
    let fr = frame_at(&f, &[0.3, -1.0, 2.0, 0.5], &g).unwrap();
    assert!(fr.gram.sub(&Mat::identity(4).scale(&3.0)).norm() < 1e-14);
    let c = tangential_operator(&fr, &j1).unwrap().c;
    let third = 1.0 / 3.0;
    let mut expected = Mat::zeros(4, 4);
    expected[(1, 0)] = third;
    expected[(0, 1)] = -third;
    expected[(3, 2)] = third;
    expected[(2, 3)] = -third;
    assert!(c.sub(&expected).norm() < 1e-14);
    let n = normal_residual(&fr, &j1, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!((n - 8.0 / 3.0).abs() < 1e-13);

    let j2 = induced_structure(&f, &j1, &g, &Tolerances::default()).unwrap();
    let m = j2.at(&[0.3, -1.0, 2.0, 0.5]).unwrap();
    assert!(m.sub(&expected.scale(&3.0)).norm() < 1e-12);
}

#[test]
fn example3_transitivity() {
    let f1 = immersion(Example3Outer);
    let f2 = immersion(Example3Inner);
    let tol = Tolerances::default();
    let grid = lattice(-1.0, 1.0, 3);
    let r = transitivity_check(&f1, &f2, &e3_j1(), &MetricSpec::euclidean(8), &grid, &tol).unwrap();
    assert!(r.exclusions.is_empty());
    for p in &r.points {
        assert!((p.thetas[0] - (1.0f64 / 3.0).acos()).abs() <= 1e-12);
        assert!((p.thetas[1] - (2.0f64 / 3.0).acos()).abs() <= 1e-12);
        assert!((p.theta_tilde - (2.0f64 / 9.0).acos()).abs() <= 1e-12);
        assert!(p.identity_residual <= 1e-12);
        assert_eq!(p.composite_classification, Classification::Proper);
    }
}

#[test]
fn chain_of_length_one_is_a_plain_scan() {
    let f1 = immersion(Example3Outer);
    let tol = Tolerances::default();
    let r = transitivity_chain_check(
        &[f1],
        &e3_j1(),
        &MetricSpec::euclidean(8),
        &[vec![0.0; 4]],
        &tol,
    )
    .unwrap();
    let p = &r.points[0];
    assert_eq!(p.thetas.len(), 1);
    assert!((p.theta_tilde - p.thetas[0]).abs() < 1e-15);
}

#[test]
fn identity_inner_stage_is_invariant() {
    let f1 = immersion(Example3Outer);
    let id = slant_core::immersion::Immersion::new(Arc::new(AffineMap::identity(4)));
    let r = transitivity_check(
        &f1,
        &id,
        &e3_j1(),
        &MetricSpec::euclidean(8),
        &[vec![0.1, 0.2, 0.3, 0.4]],
        &Tolerances::default(),
    )
    .unwrap();
    let p = &r.points[0];
    assert_eq!(p.classifications[1], Classification::Invariant);
    assert!((p.theta_tilde - p.thetas[0]).abs() < 1e-12);
}

#[test]
fn length_three_chain_obeys_product_formula() {
    let fs = [
        immersion(Example3Outer),
        immersion(Example3Inner),
        immersion(ChainCurve),
    ];
    let grid: Vec<Vec<f64>> = (0..5).map(|i| vec![-1.0 + 0.5 * i as f64]).collect();
    let r = transitivity_chain_check(
        &fs,
        &e3_j1(),
        &MetricSpec::euclidean(8),
        &grid,
        &Tolerances::default(),
    )
    .unwrap();
    assert!(r.exclusions.is_empty());
    assert!(r.max_identity_residual <= 1e-6);
    for p in &r.points {
        assert_eq!(p.thetas.len(), 3);
        assert_eq!(p.classifications[2], Classification::AntiInvariant);
    }
}

#[test]
fn example4_anti_invariant_in_both() {
    let f1 = immersion(Example3Outer);
    let f2 = immersion(Example4Inner);
    let g = MetricSpec::euclidean(8);
    let tol = Tolerances::default();
    let j1 = e3_j1();
    let grid = lattice(-1.0, 1.0, 3);
    let r = transitivity_check(&f1, &f2, &j1, &g, &grid, &tol).unwrap();
    assert!(r.exclusions.is_empty());
    for p in &r.points {
        assert_eq!(p.classifications[1], Classification::AntiInvariant);
        assert_eq!(p.composite_classification, Classification::AntiInvariant);
    }

    // g(JZᵢ, Zⱼ) directly, in both ambients.
    let composite = f1.compose(&f2).unwrap();
    let j2 = induced_structure(&f1, &j1, &g, &tol).unwrap();
    let m2 = MetricField::induced(&f1, &MetricField::constant(&g)).unwrap();
    for u in &grid {
        let outer = frame_at(&composite, u, &g).unwrap();
        let jm = j1.at(&outer.ambient_point).unwrap();
        let s = outer.frame.transpose().matmul(&jm).matmul(&outer.frame);
        assert!(s.norm() <= 1e-12);

        let inner = slant_core::immersion::frame_in(&f2, u, &m2).unwrap();
        let jm = j2.at(&inner.ambient_point).unwrap();
        let s = inner
            .frame
            .transpose()
            .matmul(&inner.ambient_gram)
            .matmul(&jm)
            .matmul(&inner.frame);
        assert!(s.norm() <= 1e-12);
    }
}

#[test]
fn product_of_example3_copies() {
    let part = ProductPart {
        immersion: immersion(Example3Outer),
        structure: e3_j1(),
        metric: MetricSpec::euclidean(8),
    };
    let grid = vec![vec![0.0; 8], vec![0.5; 8]];
    let r = product_check(
        &[part.clone(), part.clone()],
        ProductMode::SameAmbient,
        &grid,
        &Tolerances::default(),
    )
    .unwrap();
    assert!(r.consistent && r.constant_and_equal && r.product_slant_everywhere);
    for p in &r.points {
        assert!((p.product.theta.unwrap() - (1.0f64 / 3.0).acos()).abs() < 1e-12);
    }

    // A totally real plane in ℝ⁴ next to M₂.
    let m = Mat::from_vec(4, 2, vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    let anti = ProductPart {
        immersion: slant_core::immersion::Immersion::new(Arc::new(AffineMap::linear(m))),
        structure: TensorField11::constant(standard_complex(2)),
        metric: MetricSpec::euclidean(4),
    };
    let r = product_check(
        &[part, anti],
        ProductMode::DistinctAmbients,
        &[vec![0.1; 6]],
        &Tolerances::default(),
    )
    .unwrap();
    assert!(r.consistent && !r.product_slant_everywhere);
    assert!((r.points[0].product.spread - 1.0 / 9.0).abs() < 1e-12);
}
