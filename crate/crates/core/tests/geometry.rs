mod common;

use common::params;
use proptest::prelude::*;
use rankone_core::{
    geodesic_curvature_norm, normal_split, pullback_factor, reach, sample_kostlan, tangent_basis,
    veronese, weingarten, BwPolynomial, Error, SeedSpec,
};

#[test]
fn split_examples() {
    let s = normal_split(params(2, 2));
    assert_eq!((s.w_dim(), s.p_dim()), (3, 0));
    let s = normal_split(params(2, 3));
    assert_eq!((s.tangent_dim(), s.w_dim(), s.p_dim()), (2, 3, 4));
    let s = normal_split(params(1, 5));
    assert_eq!((s.w_dim(), s.p_dim()), (1, 3));
}

#[test]
fn split_partitions_all_indices() {
    for (n, d) in [(1, 2), (2, 6), (3, 3), (4, 4)] {
        let p = params(n, d);
        let s = normal_split(p);
        let mut all: Vec<usize> = std::iter::once(s.base_idx)
            .chain(s.tangent_idx.iter().copied())
            .chain(s.w_idx.iter().copied())
            .chain(s.p_idx.iter().copied())
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..p.num_coeffs()).collect::<Vec<_>>());
        assert_eq!(s.p_dim(), p.num_coeffs() - 1 - n - n * (n + 1) / 2);
    }
}

#[test]
fn weingarten_examples() {
    for d in [2usize, 3, 5] {
        let p = params(2, d);
        let mut eta = BwPolynomial::zeros(p);
        eta.set_coeff(&[d - 2, 2, 0], 1.0).unwrap();
        let l = weingarten(p, &eta).unwrap().entries;
        let expect = (2.0 * (d as f64 - 1.0) / d as f64).sqrt();
        assert_eq!(l.get(0, 0), expect);
        assert_eq!(l.get(1, 1), 0.0);
        assert_eq!(l.get(0, 1), 0.0);
    }
    let p = params(2, 2);
    let mut eta = BwPolynomial::zeros(p);
    eta.set_coeff(&[0, 2, 0], 1.0).unwrap();
    assert_eq!(weingarten(p, &eta).unwrap().entries.get(0, 0), 1.0);

    let p = params(3, 4);
    let mut eta = BwPolynomial::zeros(p);
    eta.set_coeff(&[2, 0, 1, 1], 1.0).unwrap();
    let l = weingarten(p, &eta).unwrap().entries;
    assert_eq!(l.get(1, 2), 0.75f64.sqrt());
    assert_eq!(l.get(2, 1), 0.75f64.sqrt());
}

#[test]
fn weingarten_rejects_tangential_input() {
    let p = params(2, 3);
    let mut eta = BwPolynomial::zeros(p);
    eta.set_coeff(&[2, 1, 0], 0.5).unwrap();
    assert!(matches!(weingarten(p, &eta), Err(Error::NotNormal(_))));
    assert!(weingarten(p, &BwPolynomial::basis(p, 0)).is_err());
    assert!(weingarten(params(2, 4), &BwPolynomial::zeros(p)).is_err());
}

#[test]
fn p_block_is_flat() {
    for (n, d) in [(1, 5), (2, 4), (3, 7)] {
        let p = params(n, d);
        let mut eta = BwPolynomial::zeros(p);
        let s = normal_split(p);
        for (t, &k) in s.p_idx.iter().enumerate() {
            eta.coeffs_mut()[k] = 1.0 + t as f64;
        }
        let l = weingarten(p, &eta).unwrap();
        assert!(l.entries.rows().iter().flatten().all(|&v| v == 0.0));
    }
}

#[test]
fn tangent_frame_is_orthonormal() {
    for (n, d) in [(1, 3), (3, 2), (4, 5)] {
        let p = params(n, d);
        let basis = tangent_basis(p);
        let base = veronese(p, &{
            let mut e = vec![0.0; n + 1];
            e[0] = 1.0;
            e
        })
        .unwrap();
        assert_eq!(basis.len(), n);
        for (i, a) in basis.iter().enumerate() {
            assert_eq!(a.norm(), 1.0);
            assert_eq!(a.inner(&base).unwrap(), 0.0);
            for b in &basis[i + 1..] {
                assert_eq!(a.inner(b).unwrap(), 0.0);
            }
            // √d x₀^{d−1} x_i as a polynomial
            let mut x = vec![0.3; n + 1];
            x[0] = 0.7;
            let expect = (d as f64).sqrt() * 0.7f64.powi(d as i32 - 1) * 0.3;
            assert!((a.evaluate(&x) - expect).abs() < 1e-15);
        }
    }
}

#[test]
fn scalar_examples() {
    assert_eq!(pullback_factor(params(2, 4)), 2.0);
    assert_eq!(geodesic_curvature_norm(params(1, 2)), 1.0);
    assert!((geodesic_curvature_norm(params(1, 3)) - 1.154_700_538_379_251_5).abs() < 1e-15);
    for d in 2..=20 {
        let p = params(2, d);
        assert!((1.0 / geodesic_curvature_norm(p) - reach(p).rho1).abs() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weingarten_is_linear(
        n in 1usize..=4,
        d in 2usize..=6,
        seed in any::<u64>(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let p = params(n, d);
        let s = normal_split(p);
        let project = |q: BwPolynomial| {
            let mut out = BwPolynomial::zeros(p);
            for &k in s.w_idx.iter().chain(&s.p_idx) {
                out.coeffs_mut()[k] = q.coeffs()[k];
            }
            out
        };
        let eta = project(sample_kostlan(p, SeedSpec::new(seed, 0)));
        let xi = project(sample_kostlan(p, SeedSpec::new(seed, 1)));
        let lhs = weingarten(p, &eta.linear_combination(a, &xi, b).unwrap()).unwrap().entries;
        let le = weingarten(p, &eta).unwrap().entries;
        let lx = weingarten(p, &xi).unwrap().entries;
        for i in 0..n {
            for j in 0..n {
                let rhs = a * le.get(i, j) + b * lx.get(i, j);
                prop_assert!((lhs.get(i, j) - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
                prop_assert_eq!(lhs.get(i, j), lhs.get(j, i));
            }
        }
    }
}
