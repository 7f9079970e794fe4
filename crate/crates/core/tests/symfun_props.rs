mod common;

use common::*;
use conflab_core::symfun::{cone_classify, newton_trace_check, sigma, sigma_all, sigma_gradient, SymMatrix};
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), dim in 3usize..=6) {
        let mut r = rng(seed);
        let a = random_sym(&mut r, dim, 1.5);
        for k in 1..=dim {
            let g = sigma_gradient(&a, k).unwrap();
            let scale = g.max_abs().max(1.0);
            for i in 0..dim {
                for j in i..dim {
                    let f = |t: f64| {
                        let mut b = a.clone();
                        b.set(i, j, a.get(i, j) + t);
                        sigma(&b, k).unwrap()
                    };
                    // a symmetric perturbation of an off-diagonal entry moves A_ij and A_ji
                    let fd = fd1(f, 0.0, 1e-3);
                    let want = if i == j { g.get(i, j) } else { 2.0 * g.get(i, j) };
                    prop_assert!(rel_close(fd, want, 1e-7, scale), "k={k} ({i},{j}): fd {fd} vs {want}");
                }
            }
        }
    }

    #[test]
    fn newton_trace_identity(seed in any::<u64>(), dim in 3usize..=6) {
        let mut r = rng(seed);
        let a = random_sym(&mut r, dim, 2.0);
        for s in 1..=dim {
            let rep = newton_trace_check(&a, s).unwrap();
            prop_assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn orthogonal_invariance(seed in any::<u64>(), dim in 3usize..=6) {
        let mut r = rng(seed);
        let a = random_sym(&mut r, dim, 1.0);
        let p = random_orthogonal(&mut r, dim);
        let b = a.congruence(&p);
        for k in 1..=dim {
            let (x, y) = (sigma(&a, k).unwrap(), sigma(&b, k).unwrap());
            // scale by the sum of |eigenvalue| products to stay meaningful near cancellation
            let ev: Vec<f64> = a.eigenvalues().iter().map(|v| v.abs()).collect();
            let scale = sigma(&SymMatrix::from_diag(&ev), k).unwrap();
            prop_assert!(rel_close(x, y, 1e-9, scale), "k={k}: {x} vs {y}");
        }
    }

    #[test]
    fn homogeneity(seed in any::<u64>(), dim in 3usize..=6, c in 0.01f64..50.0) {
        let mut r = rng(seed);
        let a = random_sym(&mut r, dim, 1.0);
        let ca = a.scaled(c);
        let ev: Vec<f64> = a.eigenvalues().iter().map(|v| v.abs()).collect();
        for k in 1..=dim {
            let want = c.powi(k as i32) * sigma(&a, k).unwrap();
            let scale = c.powi(k as i32) * sigma(&SymMatrix::from_diag(&ev), k).unwrap();
            prop_assert!(rel_close(sigma(&ca, k).unwrap(), want, 1e-12, scale));
        }
    }

    #[test]
    fn principal_minor_oracle(seed in any::<u64>(), dim in 1usize..=5) {
        let mut r = rng(seed);
        let a = random_sym(&mut r, dim, 2.0);
        let all = sigma_all(&a).unwrap();
        for k in 0..=dim {
            let want = sigma_by_minors(&a, k);
            prop_assert!((all[k] - want).abs() <= 1e-10 * want.abs().max(1.0), "k={k}: {} vs {want}", all[k]);
        }
    }

    #[test]
    fn newton_tensor_positive_in_cone(seed in any::<u64>(), dim in 3usize..=6, kk in 1usize..=6) {
        let k = kk.min(dim);
        let mut r = rng(seed);
        for a in [dominant_matrix(&mut r, dim), cone_matrix(&mut r, dim, k)] {
            let label = cone_classify(&a).unwrap();
            prop_assert!(label.max_k >= k);
            for s in 1..=k {
                prop_assert!(sigma_gradient(&a, s).unwrap().is_positive_definite(), "s={s} max_k={}", label.max_k);
            }
        }
    }
}

#[test]
fn cone_labels_of_examples() {
    assert_eq!(cone_classify(&SymMatrix::identity(4)).unwrap().max_k, 4);
    assert_eq!(cone_classify(&SymMatrix::zeros(3)).unwrap().max_k, 0);
    assert_eq!(cone_classify(&SymMatrix::from_diag(&[1.0, 1.0, -0.4])).unwrap().max_k, 2);
}
