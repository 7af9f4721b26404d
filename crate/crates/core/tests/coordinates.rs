//! Coordinate-level tension/conformality identities.
//!
//! The families only exercise tau and kappa after the parameter conditions
//! cancel all inhomogeneous terms. Here the coordinate functions themselves
//! (and the invariant pair functions) are wrapped as synthetic term shapes
//! and their full identities are checked, delta terms included.

use num_complex::Complex64;
use num_rational::Ratio;
use symmin_core::catalog::{EigenfunctionSpec, Params, TermShape};
use symmin_core::fiber::quaternionic_pair_function;
use symmin_core::geometry::{conformality, tension_field, DerivativeEngine};
use symmin_core::groups::{haar_sample, Space};
use symmin_core::matrix::{j_matrix, p_matrix, ComplexMatrix};

type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Wraps a single term as a spec on `space` (lambda/mu placeholders).
fn synthetic(space: Space, term: TermShape) -> EigenfunctionSpec {
    EigenfunctionSpec::from_term_shapes(
        space.descriptor(),
        Params::default(),
        vec![term],
        c(0.0, 0.0),
        Ratio::new(0, 1),
        Ratio::new(0, 1),
    )
}

/// The coordinate function x_{j,alpha} as a linear term (1-based indices).
fn coordinate(space: Space, j: usize, alpha: usize) -> EigenfunctionSpec {
    let d = space.total_group().embedding_dim();
    let mut cmat = ComplexMatrix::zeros(d, d);
    cmat[(j - 1, alpha - 1)] = c(1.0, 0.0);
    synthetic(space, TermShape::Linear { c: cmat })
}

#[test]
fn so_coordinate_identities() {
    // tau(x_ja) = -(n-1)/2 x_ja
    // kappa(x_ja, x_kb) = -1/2 (x_jb x_ka - delta_ab delta_jk)
    let n = 4;
    let space = Space::So { n };
    let engine = DerivativeEngine::exact();
    for seed in 0..5u64 {
        let x = haar_sample(space.total_group(), seed);
        for (j, al, k, be) in [(1, 2, 3, 4), (1, 2, 1, 2), (2, 3, 2, 4), (1, 1, 2, 2)] {
            let f = coordinate(space, j, al);
            let g = coordinate(space, k, be);
            let tau = tension_field(&f, &x, &engine);
            let want_tau = -0.5 * (n as f64 - 1.0) * x[(j - 1, al - 1)].re;
            assert!((tau - c(want_tau, 0.0)).norm() < 1e-12);
            let kappa = conformality(&f, &g, &x, &engine).unwrap();
            let delta = if al == be && j == k { 1.0 } else { 0.0 };
            let want = -0.5 * ((x[(j - 1, be - 1)] * x[(k - 1, al - 1)]).re - delta);
            assert!(
                (kappa - c(want, 0.0)).norm() < 1e-12,
                "kappa(x_{j}{al}, x_{k}{be}) = {kappa} want {want}"
            );
        }
    }
}

#[test]
fn su_and_u_coordinate_identities() {
    // SU(n): kappa(z_ja, z_kb) = -z_jb z_ka + z_ja z_kb / n,
    //        tau(z_ja) = -(n^2 - 1)/n z_ja.
    // U(n):  kappa(z_ja, z_kb) = -z_jb z_ka, tau(z_ja) = -n z_ja.
    let engine = DerivativeEngine::exact();
    let n = 3;
    for seed in 0..5u64 {
        let su = Space::Su { n };
        let z = haar_sample(su.total_group(), seed);
        for (j, al, k, be) in [(1, 2, 3, 1), (2, 2, 2, 2), (1, 3, 2, 3)] {
            let f = coordinate(su, j, al);
            let g = coordinate(su, k, be);
            let tau = tension_field(&f, &z, &engine);
            let lam = -((n * n - 1) as f64) / n as f64;
            assert!((tau - c(lam, 0.0) * z[(j - 1, al - 1)]).norm() < 1e-12);
            let kappa = conformality(&f, &g, &z, &engine).unwrap();
            let want = -z[(j - 1, be - 1)] * z[(k - 1, al - 1)]
                + z[(j - 1, al - 1)] * z[(k - 1, be - 1)] / c(n as f64, 0.0);
            assert!((kappa - want).norm() < 1e-12);
        }
    }
    // The unitary total group differs from the special one by the central
    // direction, which shifts both identities.
    let m = 2;
    let nn = m + 2;
    let gr = Space::GrassmannC { m, n: 2 };
    assert_eq!(gr.total_group().n, nn);
    for seed in 0..5u64 {
        let z = haar_sample(gr.total_group(), seed);
        for (j, al, k, be) in [(1, 2, 3, 4), (2, 2, 4, 1)] {
            let f = coordinate(gr, j, al);
            let g = coordinate(gr, k, be);
            let tau = tension_field(&f, &z, &engine);
            assert!((tau + c(nn as f64, 0.0) * z[(j - 1, al - 1)]).norm() < 1e-12);
            let kappa = conformality(&f, &g, &z, &engine).unwrap();
            let want = -z[(j - 1, be - 1)] * z[(k - 1, al - 1)];
            assert!((kappa - want).norm() < 1e-12);
        }
    }
}

#[test]
fn sp_coordinate_identities() {
    // tau(z_ja) = tau(w_ja) = -(2n+1)/2 each; kappa(z_ja, z_kb) = -z_jb z_ka / 2,
    // kappa(z_ja, w_kb) = -w_jb z_ka / 2.
    let n = 2;
    let space = Space::Sp { n };
    let engine = DerivativeEngine::exact();
    let z_coord = |j: usize, al: usize| coordinate(space, j, al);
    let w_coord = |j: usize, al: usize| coordinate(space, j, n + al);
    for seed in 0..5u64 {
        let q = haar_sample(space.total_group(), seed);
        let zval = |j: usize, al: usize| q[(j - 1, al - 1)];
        let wval = |j: usize, al: usize| q[(j - 1, n + al - 1)];
        for (j, al, k, be) in [(1, 1, 2, 2), (1, 2, 1, 2), (2, 1, 1, 1)] {
            let lam = -(2.0 * n as f64 + 1.0) / 2.0;
            let tau_z = tension_field(&z_coord(j, al), &q, &engine);
            assert!((tau_z - c(lam, 0.0) * zval(j, al)).norm() < 1e-12);
            let tau_w = tension_field(&w_coord(j, al), &q, &engine);
            assert!((tau_w - c(lam, 0.0) * wval(j, al)).norm() < 1e-12);

            let kzz = conformality(&z_coord(j, al), &z_coord(k, be), &q, &engine).unwrap();
            assert!((kzz + zval(j, be) * zval(k, al) * c(0.5, 0.0)).norm() < 1e-12);
            let kzw = conformality(&z_coord(j, al), &w_coord(k, be), &q, &engine).unwrap();
            assert!((kzw + wval(j, be) * zval(k, al) * c(0.5, 0.0)).norm() < 1e-12);
            let kww = conformality(&w_coord(j, al), &w_coord(k, be), &q, &engine).unwrap();
            assert!((kww + wval(j, be) * wval(k, al) * c(0.5, 0.0)).norm() < 1e-12);
        }
    }
}

/// The invariant pair function on SO(m+n): sum_{t <= m} x_jt x_at.
fn real_pair_function(m: usize, n: usize, j: usize, alpha: usize) -> EigenfunctionSpec {
    let nn = m + n;
    let mut a = ComplexMatrix::zeros(nn, nn);
    a[(alpha - 1, j - 1)] = c(1.0, 0.0);
    synthetic(
        Space::GrassmannR { m, n },
        TermShape::Bilinear {
            a,
            b: p_matrix(m, nn),
        },
    )
}

#[test]
fn real_grassmannian_pair_function_identities() {
    // tau(phi_ja) = -(m+n) phi_ja + m delta_ja
    // kappa(phi_ja, phi_kb) = -(phi_jb phi_ka + phi_jk phi_ab)
    //     + (d_jk phi_ab + d_ab phi_jk + d_jb phi_ka + d_ka phi_jb) / 2
    let (m, n) = (2usize, 2usize);
    let nn = m + n;
    let engine = DerivativeEngine::exact();
    let phi = |x: &ComplexMatrix, j: usize, al: usize| -> C64 {
        (0..m).map(|t| x[(j - 1, t)] * x[(al - 1, t)]).sum()
    };
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    for seed in 0..5u64 {
        let x = haar_sample(Space::GrassmannR { m, n }.total_group(), seed);
        for (j, al, k, be) in [(1, 2, 3, 4), (2, 2, 2, 2), (1, 3, 3, 1), (1, 1, 2, 3)] {
            let f = real_pair_function(m, n, j, al);
            let g = real_pair_function(m, n, k, be);
            let tau = tension_field(&f, &x, &engine);
            let want_tau = c(-(nn as f64), 0.0) * phi(&x, j, al) + c(m as f64 * d(j, al), 0.0);
            assert!((tau - want_tau).norm() < 1e-12, "tau(phi_{j}{al})");
            let kappa = conformality(&f, &g, &x, &engine).unwrap();
            let want = -(phi(&x, j, be) * phi(&x, k, al) + phi(&x, j, k) * phi(&x, al, be))
                + (c(d(j, k), 0.0) * phi(&x, al, be)
                    + c(d(al, be), 0.0) * phi(&x, j, k)
                    + c(d(j, be), 0.0) * phi(&x, k, al)
                    + c(d(k, al), 0.0) * phi(&x, j, be))
                    * c(0.5, 0.0);
            assert!(
                (kappa - want).norm() < 1e-12,
                "kappa(phi_{j}{al}, phi_{k}{be}) = {kappa} want {want}"
            );
        }
    }
}

/// Component (j, alpha) of x J x^t on SO(2n) as a bilinear term.
fn skew_component(n: usize, j: usize, alpha: usize) -> EigenfunctionSpec {
    let mut a = ComplexMatrix::zeros(2 * n, 2 * n);
    a[(alpha - 1, j - 1)] = c(1.0, 0.0);
    synthetic(
        Space::So2nModUn { n },
        TermShape::Bilinear { a, b: j_matrix(n) },
    )
}

#[test]
fn so2n_skew_component_identities() {
    // With Phi = x J x^t:
    //   tau(Phi_ja) = -2(n-1) Phi_ja
    //   kappa(Phi_ja, Phi_kb) = -(Phi_jb Phi_ka + Phi_jk Phi_ab)
    //                           - (d_ka d_jb - d_jk d_ab)
    let n = 3;
    let engine = DerivativeEngine::exact();
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    for seed in 0..4u64 {
        let x = haar_sample(Space::So2nModUn { n }.total_group(), seed);
        let jm = j_matrix(n);
        let big_phi = &(&x * &jm) * &x.transpose();
        let phi = |j: usize, al: usize| big_phi[(j - 1, al - 1)];
        for (j, al, k, be) in [(1, 2, 3, 4), (1, 2, 2, 1), (5, 6, 5, 6), (1, 4, 2, 4)] {
            let f = skew_component(n, j, al);
            let g = skew_component(n, k, be);
            let tau = tension_field(&f, &x, &engine);
            assert!(
                (tau + c(2.0 * (n as f64 - 1.0), 0.0) * phi(j, al)).norm() < 1e-12,
                "tau(Phi_{j}{al})"
            );
            let kappa = conformality(&f, &g, &x, &engine).unwrap();
            let want = -(phi(j, be) * phi(k, al) + phi(j, k) * phi(al, be))
                - c(d(k, al) * d(j, be) - d(j, k) * d(al, be), 0.0);
            assert!(
                (kappa - want).norm() < 1e-12,
                "kappa(Phi_{j}{al}, Phi_{k}{be}) = {kappa} want {want}"
            );
        }
    }
}

#[test]
fn quaternionic_pair_function_tau_constant() {
    // tau(phi_ja) = -2(m+n) phi_ja + 2m delta_ja on Sp(m+n).
    // (The diagonal constant is proportional to m, exactly as in the
    // complex case; it is invisible to the eigenfamilies because (a,a) = 0
    // multiplies it away.)
    let engine = DerivativeEngine::exact();
    for (m, n) in [(1usize, 2usize), (2, 2)] {
        let nn = m + n;
        for seed in 0..3u64 {
            let q = haar_sample(Space::GrassmannH { m, n }.total_group(), seed);
            for (j, al) in [(1, 1), (1, 2), (2, 2), (nn, nn)] {
                let f = quaternionic_pair_function(m, n, j, al);
                let phi = f.evaluate(&q).unwrap();
                let tau = tension_field(&f, &q, &engine);
                let delta = if j == al { 1.0 } else { 0.0 };
                let want = c(-2.0 * nn as f64, 0.0) * phi + c(2.0 * m as f64 * delta, 0.0);
                assert!(
                    (tau - want).norm() < 1e-12,
                    "(m,n)=({m},{n}) phi_{j}{al}: tau {tau} want {want}"
                );
            }
        }
    }
}

#[test]
fn complex_pair_function_tau_constant() {
    // tau(phi_ja) = -2(m+n) phi_ja + 2m delta_ja on U(m+n).
    let engine = DerivativeEngine::exact();
    let (m, n) = (2usize, 2usize);
    let nn = m + n;
    let space = Space::GrassmannC { m, n };
    let pair = |j: usize, al: usize| {
        let mut a = ComplexMatrix::zeros(nn, nn);
        a[(al - 1, j - 1)] = c(1.0, 0.0);
        synthetic(
            space,
            TermShape::Sesquilinear {
                a,
                b: p_matrix(m, nn),
            },
        )
    };
    for seed in 0..3u64 {
        let z = haar_sample(space.total_group(), seed);
        for (j, al) in [(1, 1), (1, 3), (3, 3), (2, 4)] {
            let f = pair(j, al);
            let phi = f.evaluate(&z).unwrap();
            let tau = tension_field(&f, &z, &engine);
            let delta = if j == al { 1.0 } else { 0.0 };
            let want = c(-2.0 * nn as f64, 0.0) * phi + c(2.0 * m as f64 * delta, 0.0);
            assert!((tau - want).norm() < 1e-12, "phi_{j}{al}");
        }
    }
}
