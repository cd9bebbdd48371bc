use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bergman_lab::geometry::{pseudohyperbolic, region_contains, DiskPoint, Region};
use bergman_lab::operators::{assemble_toeplitz, assemble_volterra, operator_norm, singular_values, MeasureSpec, OperatorMatrix};
use bergman_lab::series::{apply_tgnk, derivative, AnalyticFn};
use bergman_lab::Weight;

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = AnalyticFn> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_deg + 1)
        .prop_map(|c| AnalyticFn::polynomial(&c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect::<Vec<_>>()))
}

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.98, -3.2f64..3.2).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn max_diff(a: &AnalyticFn, b: &AnalyticFn) -> f64 {
    let n = a.truncation().max(b.truncation());
    (0..=n).map(|j| (a.coeff(j) - b.coeff(j)).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tgnk_recurrence(f in poly_strategy(8), g in poly_strategy(8), n in 3usize..=4, kk in 0usize..2) {
        let k = 2 + kk;
        prop_assume!(k < n);
        let lhs = apply_tgnk(&g, &f, n, k).unwrap();
        let a = apply_tgnk(&g, &f, n - 1, k - 1).unwrap();
        let b = apply_tgnk(&g, &f, n, k - 1).unwrap();
        let c0 = derivative(&f, k - 1).unwrap().coeff(0) * derivative(&g, n - k).unwrap().coeff(0) / factorial(n - 1);
        let mut corr = vec![Complex64::new(0.0, 0.0); n];
        corr[n - 1] = c0;
        let rhs = a.sub(&b).sub(&AnalyticFn::polynomial(&corr));
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn tgnk_is_linear(f1 in poly_strategy(10), f2 in poly_strategy(10), g in poly_strategy(6), a in disk_point(), n in 1usize..=3) {
        let k = n - 1;
        let lhs = apply_tgnk(&g, &f1.scale(a).add(&f2), n, k).unwrap();
        let rhs = apply_tgnk(&g, &f1, n, k).unwrap().scale(a).add(&apply_tgnk(&g, &f2, n, k).unwrap());
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn mobius_invariance(a in disk_point(), z in disk_point(), w in disk_point()) {
        let phi = |u: Complex64| (a - u) / (Complex64::new(1.0, 0.0) - a.conj() * u);
        let p = |u: Complex64| DiskPoint::new(u.re, u.im).unwrap();
        let before = pseudohyperbolic(p(z), p(w));
        let after = pseudohyperbolic(p(phi(z)), p(phi(w)));
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn tent_inside_square(ur in 0.2f64..0.999, ut in -3.2f64..3.2, zr in 0.0f64..1.0, dt in -0.6f64..0.6) {
        let u = DiskPoint::polar(ur, ut).unwrap();
        let z = DiskPoint::polar(ur + (1.0 - ur) * zr * 0.999_999, ut + dt).unwrap();
        if region_contains(&Region::tent(u), z).unwrap() {
            prop_assert!(region_contains(&Region::carleson_square(u), z).unwrap());
        }
    }

    #[test]
    fn truncation_monotone(g in poly_strategy(4), n1 in 4usize..20, extra in 1usize..20) {
        let w = Weight::standard(0.0).unwrap();
        let a = operator_norm(&assemble_volterra(&g, &w, 1, 0, n1).unwrap()).unwrap();
        let b = operator_norm(&assemble_volterra(&g, &w, 1, 0, n1 + extra).unwrap()).unwrap();
        prop_assert!(a <= b + 1e-12);
        let mu = MeasureSpec::star_density(&g, &w, 1, 0).unwrap();
        let a = operator_norm(&assemble_toeplitz(&mu, &w, 0, n1).unwrap()).unwrap();
        let b = operator_norm(&assemble_toeplitz(&mu, &w, 0, n1 + extra).unwrap()).unwrap();
        prop_assert!(a <= b + 1e-12);
    }

    #[test]
    fn toeplitz_hermitian(g in poly_strategy(4), k in 0usize..2) {
        let w = Weight::standard(1.0).unwrap();
        let t = assemble_toeplitz(&MeasureSpec::star_density(&g, &w, 2, 1).unwrap(), &w, k, 16).unwrap();
        for i in 0..t.rows {
            for j in 0..t.cols {
                prop_assert!((t.get(i, j) - t.get(j, i).conj()).norm() < 1e-12 * (1.0 + t.get(i, j).norm()));
            }
        }
    }
}

#[test]
fn svd_against_hermitian_eigen() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..10 {
        let n = 50;
        let entries: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let m = OperatorMatrix::new(entries.clone(), n, n - 1, "test".into(), "random".into()).unwrap();
        let sv = singular_values(&m).unwrap();
        let a = DMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
        let gram = a.adjoint() * &a;
        let mut eig: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).collect();
        eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (s, e) in sv.iter().zip(&eig) {
            assert_relative_eq!(*s, *e, epsilon = 1e-8, max_relative = 1e-8);
        }
    }
}
