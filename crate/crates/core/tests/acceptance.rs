//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use num_complex::Complex64;
use num_rational::Ratio;
use symmin_core::catalog::{
    build, default_member, isotropic_vector, unit_vector, Params,
};
use symmin_core::fiber::{
    batch_stats, critical_gallery, fiber_point_batch, find_fiber_point, find_level_point,
    jacobian_singular_values, mean_curvature_estimate, regularity_check, DescentConfig,
    FiberError, Regularity, GALLERY_CASES,
};
use symmin_core::geometry::{
    dir_derivative, eigen_residuals, gradient_components, product_rule_residual, DerivOrder,
    DerivativeEngine,
};
use symmin_core::groups::{algebra_basis, haar_sample, stream_rng, Space};
use symmin_core::EigenfunctionSpec;
use std::time::Instant;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The full size grid of criterion 1.
fn table_grid() -> Vec<Space> {
    let mut grid = Vec::new();
    for n in 3..=6 {
        grid.push(Space::So { n });
    }
    for n in 2..=5 {
        grid.push(Space::Su { n });
    }
    for n in 1..=3 {
        grid.push(Space::Sp { n });
    }
    for n in 2..=4 {
        grid.push(Space::SuModSo { n });
    }
    for n in 1..=3 {
        grid.push(Space::SpModU { n });
    }
    for n in 2..=3 {
        grid.push(Space::So2nModUn { n });
    }
    for n in 1..=2 {
        grid.push(Space::Su2nModSpn { n });
    }
    for (m, n) in [(1, 2), (2, 2), (2, 3)] {
        grid.push(Space::GrassmannR { m, n });
        grid.push(Space::GrassmannC { m, n });
        grid.push(Space::GrassmannH { m, n });
    }
    grid
}

fn quotient_grid() -> Vec<Space> {
    table_grid().into_iter().filter(|s| s.is_quotient()).collect()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

#[test]
fn criterion_1_table_reproduction() {
    let started = Instant::now();
    let exact = DerivativeEngine::exact();
    let fd = DerivativeEngine::finite_difference();
    let mut worst_exact = 0.0f64;
    let mut worst_fd = 0.0f64;
    let mut worst_row = String::new();
    for space in table_grid() {
        let spec = default_member(space).unwrap();
        let re = eigen_residuals(&spec, 50, 2024, &exact);
        let rf = eigen_residuals(&spec, 50, 2024, &fd);
        let e = re.max_tau_residual.max(re.max_kappa_residual);
        let f = rf.max_tau_residual.max(rf.max_kappa_residual);
        if e > worst_exact {
            worst_exact = e;
            worst_row = format!("{space} (exact)");
        }
        if f > worst_fd {
            worst_fd = f;
        }
        assert!(
            e <= 1e-9,
            "{space}: exact residual {e:.3e} (tau {:.3e}, kappa {:.3e})",
            re.max_tau_residual,
            re.max_kappa_residual
        );
        assert!(
            f <= 1e-6,
            "{space}: fd residual {f:.3e} (tau {:.3e}, kappa {:.3e})",
            rf.max_tau_residual,
            rf.max_kappa_residual
        );
    }
    // Spot-check the closed-form table rows quoted in the criterion.
    assert_eq!(Space::So { n: 5 }.eigenvalues(), (Ratio::new(-2, 1), Ratio::new(-1, 2)));
    assert_eq!(
        Space::GrassmannC { m: 2, n: 3 }.eigenvalues(),
        (Ratio::new(-10, 1), Ratio::new(-2, 1))
    );
    let elapsed = started.elapsed().as_secs_f64();
    report(
        "criterion 1 (table reproduction, 30 rows x 50 samples, exact+fd)",
        elapsed < 300.0,
        &format!(
            "worst exact {worst_exact:.3e} [{worst_row}], worst fd {worst_fd:.3e}, {elapsed:.1}s"
        ),
    );
}

#[test]
fn criterion_2_eigenvalue_ordering() {
    let zero = Ratio::new(0, 1);
    for space in table_grid() {
        let (lambda, mu) = space.eigenvalues();
        assert!(
            lambda <= mu && mu <= zero,
            "{space}: lambda = {lambda}, mu = {mu}"
        );
    }
    report(
        "criterion 2 (lambda <= mu <= 0 as exact rationals)",
        true,
        "all 30 catalog rows",
    );
}

#[test]
fn criterion_3_invariance() {
    let engine = DerivativeEngine::exact();
    let mut worst_inv = 0.0f64;
    let mut worst_vert = 0.0f64;
    for space in quotient_grid() {
        let spec = default_member(space).unwrap();
        let group = spec.space.total_group;
        // Subgroup invariance at Haar points.
        for seed in 0..3u64 {
            let x = haar_sample(group, 100 + seed);
            let r = spec.invariance_residual(&x, 20, 7 + seed).unwrap();
            worst_inv = worst_inv.max(r);
            assert!(r <= 1e-12, "{space}: invariance residual {r:.3e}");
        }
        // Vertical derivatives vanish along every subgroup generator.
        let k_frame = symmin_core::groups::TangentBasis {
            elements: spec.space.subgroup_generators(),
            kind: symmin_core::groups::BasisTag::FullAlgebra,
        };
        for seed in 0..50u64 {
            let x = haar_sample(group, 500 + seed);
            let comps = gradient_components(&spec, &x, &k_frame, &engine);
            for v in comps {
                worst_vert = worst_vert.max(v.norm());
                assert!(v.norm() <= 1e-10, "{space}: vertical derivative {:.3e}", v.norm());
            }
        }
    }
    report(
        "criterion 3 (K-invariance and vertical derivatives)",
        true,
        &format!("worst invariance {worst_inv:.3e}, worst vertical {worst_vert:.3e}"),
    );
}

#[test]
fn criterion_4_regularity_positive() {
    let mut families: Vec<(Space, EigenfunctionSpec)> = Vec::new();
    for n in 3..=5 {
        families.push((Space::So { n }, default_member(Space::So { n }).unwrap()));
    }
    for n in 2..=4 {
        families.push((Space::Su { n }, default_member(Space::Su { n }).unwrap()));
    }
    for n in 1..=2 {
        families.push((Space::Sp { n }, default_member(Space::Sp { n }).unwrap()));
    }
    for n in 2..=3 {
        families.push((
            Space::SuModSo { n },
            default_member(Space::SuModSo { n }).unwrap(),
        ));
    }
    for n in 1..=2 {
        families.push((
            Space::SpModU { n },
            default_member(Space::SpModU { n }).unwrap(),
        ));
    }
    // SU(2n)/Sp(n): n = 1 is degenerate (lambda = mu = 0, constant member,
    // empty zero set); the finder must reject it, the gate runs at n = 2.
    {
        let one = default_member(Space::Su2nModSpn { n: 1 }).unwrap();
        assert!(matches!(
            find_fiber_point(&one, 0, 500, 1.0),
            Err(FiberError::DegenerateEigenvalues)
        ));
        families.push((
            Space::Su2nModSpn { n: 2 },
            default_member(Space::Su2nModSpn { n: 2 }).unwrap(),
        ));
    }
    // SO(2n)/U(n) restricted sub-family (defaults are in it by construction).
    for n in 2..=3 {
        let params = symmin_core::catalog::default_params(Space::So2nModUn { n });
        assert!(symmin_core::catalog::so2n_restricted_subfamily(&params));
        families.push((
            Space::So2nModUn { n },
            build(Space::So2nModUn { n }, params).unwrap(),
        ));
    }

    let cfg = DescentConfig::default();
    let family_count = families.len();
    let mut detail = String::new();
    for (space, spec) in &families {
        let points = fiber_point_batch(spec, 77, 20, &cfg).unwrap();
        let stats = batch_stats(&points);
        let ok = stats.converged >= 16 && stats.min_grad_norm > 1e-3;
        if !ok || detail.is_empty() {
            detail = format!(
                "{space}: {}/20 converged, min grad {:.3e}",
                stats.converged, stats.min_grad_norm
            );
        }
        assert!(
            stats.converged >= 16,
            "{space}: only {}/20 restarts converged",
            stats.converged
        );
        assert!(
            stats.min_grad_norm > 1e-3,
            "{space}: min grad_norm {:.3e}",
            stats.min_grad_norm
        );
    }
    report(
        &format!("criterion 4 (positive regularity, {family_count} families x 20 restarts)"),
        true,
        &detail,
    );
}

#[test]
fn criterion_5_regularity_negative() {
    let mut worst_phi = 0.0f64;
    let mut worst_grad = 0.0f64;
    assert!(GALLERY_CASES.len() >= 5);
    for case in GALLERY_CASES {
        let r = critical_gallery(case.id).unwrap();
        worst_phi = worst_phi.max(r.phi.norm());
        worst_grad = worst_grad.max(r.grad_norm);
        assert!(r.phi.norm() < 1e-12, "{}: |phi| {:.3e}", case.id, r.phi.norm());
        assert!(r.grad_norm < 1e-10, "{}: grad {:.3e}", case.id, r.grad_norm);
    }
    report(
        "criterion 5 (gallery critical points)",
        true,
        &format!(
            "{} cases, worst |phi| {worst_phi:.3e}, worst grad {worst_grad:.3e}",
            GALLERY_CASES.len()
        ),
    );
}

#[test]
fn criterion_6_minimality_witness() {
    let members = [
        default_member(Space::So { n: 3 }).unwrap(),
        default_member(Space::Su { n: 2 }).unwrap(),
        default_member(Space::Su { n: 3 }).unwrap(),
        default_member(Space::SuModSo { n: 3 }).unwrap(),
    ];
    let cfg = DescentConfig::default();
    let mut worst_h = 0.0f64;
    for spec in &members {
        let points = fiber_point_batch(spec, 11, 20, &cfg).unwrap();
        let mut checked = 0;
        for fp in points.iter().filter(|p| p.converged) {
            let (class, _) = regularity_check(spec, fp).unwrap();
            if class != Regularity::Regular {
                continue;
            }
            let (s1, s2) = jacobian_singular_values(spec, &fp.x);
            // The differential is a real-linear map onto R^2: rank 2 means
            // sigma2 bounded away from zero; there is no third direction.
            let sigma3 = 0.0f64;
            assert!(s2 > 1e-3, "{}: sigma2 {s2:.3e}", spec.space.space);
            assert!(s1 >= s2 && sigma3 < 1e-8);
            let h = mean_curvature_estimate(spec, fp, 1e-3).unwrap();
            worst_h = worst_h.max(h);
            assert!(h <= 1e-3, "{}: |H| = {h:.3e}", spec.space.space);
            checked += 1;
        }
        assert!(
            checked >= 10,
            "{}: only {checked} regular fibre points",
            spec.space.space
        );
    }

    // Non-eigen control level |c| = 0.3 on SO(3). A member with genuinely
    // complex p is required: for real p every level set is a coset of a
    // circle subgroup and hence minimal.
    let control = build(
        Space::So { n: 3 },
        Params::default()
            .with_a(isotropic_vector(3))
            .with_p(vec![c(1.0, 0.0), c(0.0, 0.5), c(0.0, 0.0)]),
    )
    .unwrap();
    let mut exceeded = 0;
    let mut tested = 0;
    for seed in 0..10u64 {
        let fp = find_level_point(&control, c(0.3, 0.0), seed, &cfg);
        if !fp.converged || fp.grad_norm <= 1e-3 {
            continue;
        }
        tested += 1;
        if mean_curvature_estimate(&control, &fp, 1e-3).unwrap() > 1e-2 {
            exceeded += 1;
        }
    }
    assert!(tested >= 10, "control: only {tested} points");
    report(
        "criterion 6 (minimality witness + control)",
        exceeded >= 8,
        &format!("worst fibre |H| {worst_h:.3e}; control exceeded 1e-2 at {exceeded}/{tested}"),
    );
}

#[test]
fn criterion_7_engine_agreement() {
    let exact = DerivativeEngine::exact();
    let fd = DerivativeEngine::finite_difference();
    let probe_spaces = [
        Space::So { n: 4 },
        Space::Su { n: 3 },
        Space::Sp { n: 2 },
        Space::SuModSo { n: 3 },
        Space::SpModU { n: 2 },
        Space::So2nModUn { n: 2 },
        Space::Su2nModSpn { n: 2 },
        Space::GrassmannR { m: 2, n: 2 },
        Space::GrassmannC { m: 1, n: 2 },
        Space::GrassmannH { m: 1, n: 2 },
    ];
    let mut probes = 0;
    let mut worst = 0.0f64;
    'outer: for space in probe_spaces {
        let spec = default_member(space).unwrap();
        let group = spec.space.total_group;
        let basis = algebra_basis(group);
        let mut rng = stream_rng(31, 0);
        loop {
            use rand::Rng;
            let x = symmin_core::groups::haar_sample_rng(group, &mut rng);
            let dir = &basis.elements[rng.gen_range(0..basis.len())];
            for order in [DerivOrder::First, DerivOrder::Second] {
                let de = dir_derivative(&spec, &x, dir, order, &exact);
                let df = dir_derivative(&spec, &x, dir, order, &fd);
                let rel = (de - df).norm() / (1.0 + de.norm());
                worst = worst.max(rel);
                assert!(rel <= 1e-6, "{space}: engine disagreement {rel:.3e}");
            }
            probes += 1;
            if probes % 10 == 0 {
                continue 'outer;
            }
        }
    }
    assert_eq!(probes, 100);

    // Product rules across 50 probes (pairs within the same family).
    let mut worst_pr = 0.0f64;
    let mut count = 0;
    for space in probe_spaces {
        let spec_a = default_member(space).unwrap();
        let spec_b = second_member(space);
        for seed in 0..5u64 {
            let x = haar_sample(spec_a.space.total_group, 900 + seed);
            let r = product_rule_residual(&spec_a, &spec_b, &x, &exact).unwrap();
            worst_pr = worst_pr.max(r);
            assert!(r <= 1e-6, "{space}: product rule residual {r:.3e}");
            count += 1;
        }
    }
    assert_eq!(count, 50);
    report(
        "criterion 7 (engine agreement + product rules)",
        true,
        &format!("100 derivative probes worst {worst:.3e}; 50 product-rule probes worst {worst_pr:.3e}"),
    );
}

/// A second member of each family, for the bilinear product-rule pairs.
fn second_member(space: Space) -> EigenfunctionSpec {
    let params = match space {
        Space::So { n } => Params::default()
            .with_a(isotropic_vector(n))
            .with_p(unit_vector(n, 2)),
        Space::Su { n } => Params::default()
            .with_a(unit_vector(n, 2))
            .with_v(unit_vector(n, 1)),
        Space::Sp { n } => Params::default()
            .with_a(unit_vector(n, 1))
            .with_u(unit_vector(n, 1)),
        Space::SuModSo { n } => Params::default().with_a(isotropic_vector(n)),
        Space::SpModU { n } => Params::default().with_a(isotropic_vector(2 * n)),
        Space::So2nModUn { n } => Params::default()
            .with_a(isotropic_vector(2 * n))
            .with_b(unit_vector(2 * n, 4)),
        Space::Su2nModSpn { n } => Params::default()
            .with_a(unit_vector(2 * n, 2))
            .with_b(unit_vector(2 * n, 3)),
        Space::GrassmannR { m, n } | Space::GrassmannH { m, n } => {
            let mut a = vec![c(0.0, 0.0); m + n];
            a[0] = c(0.6, 0.0);
            a[1] = c(0.0, 0.6);
            Params::default().with_a(a)
        }
        Space::GrassmannC { m, n } => Params::default()
            .with_a(unit_vector(m + n, 2))
            .with_b(unit_vector(m + n, 1)),
    };
    build(space, params).unwrap()
}
