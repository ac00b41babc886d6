use proptest::prelude::*;
use rand::Rng;
use sentitrend_core::kernel::KernelSpec;
use sentitrend_oracles::linalg::{gaussian_kernel, symmetric_eigenvalues};
use sentitrend_oracles::random::{rng, uniform_vec};

fn vectors(dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-5.0f64..5.0, dim), prop::collection::vec(-5.0f64..5.0, dim))
}

#[test]
fn closed_form_examples() {
    assert_eq!(KernelSpec::Linear.value(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    let g = KernelSpec::gaussian(1.0).unwrap();
    assert!((g.value(&[0.0], &[2.0]).unwrap() - 0.135_335_283_236_612_7).abs() < 1e-15);
    assert_eq!(g.value(&[0.3, -1.0], &[0.3, -1.0]).unwrap(), 1.0);
    let lin = KernelSpec::Linear.gram(&[vec![1.0], vec![2.0]]).unwrap();
    assert_eq!(lin.as_slice(), &[1.0, 2.0, 2.0, 4.0]);
}

#[test]
fn contract_violations() {
    assert!(KernelSpec::Linear.value(&[1.0], &[1.0, 2.0]).is_err());
    assert!(KernelSpec::gaussian(0.0).is_err());
    assert!(KernelSpec::gaussian(-1.0).is_err());
    assert!(KernelSpec::Linear.gram(&[vec![1.0], vec![1.0, 2.0]]).is_err());
}

#[test]
fn gaussian_gram_is_positive_semidefinite() {
    let mut r = rng(31);
    let mut worst = f64::INFINITY;
    for _ in 0..300 {
        let n = r.gen_range(1..=10);
        let dim = r.gen_range(1..=4);
        let h = r.gen_range(0.05..5.0);
        let points: Vec<Vec<f64>> = (0..n).map(|_| uniform_vec(&mut r, dim, -2.0, 2.0)).collect();
        let gram = KernelSpec::gaussian(h).unwrap().gram(&points).unwrap();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| gram.row(i).to_vec()).collect();
        for i in 0..n {
            assert_eq!(rows[i][i], 1.0);
            for j in 0..n {
                assert_eq!(rows[i][j], rows[j][i]);
                assert!((rows[i][j] - gaussian_kernel(&points[i], &points[j], h)).abs() <= 1e-14);
            }
        }
        let min = symmetric_eigenvalues(&rows).into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.min(min);
        assert!(min >= -1e-10, "smallest eigenvalue {min:e}");
    }
    eprintln!("smallest eigenvalue seen {worst:e}");
}

proptest! {
    #[test]
    fn kernels_are_symmetric((u, v) in vectors(3), h in 0.01f64..10.0) {
        prop_assert_eq!(KernelSpec::Linear.value(&u, &v).unwrap(), KernelSpec::Linear.value(&v, &u).unwrap());
        let g = KernelSpec::gaussian(h).unwrap();
        prop_assert_eq!(g.value(&u, &v).unwrap(), g.value(&v, &u).unwrap());
    }

    #[test]
    fn gaussian_is_bounded_and_decreasing(dir in prop::collection::vec(-1.0f64..1.0, 2), a in 0.0f64..3.0, b in 0.0f64..3.0, h in 0.1f64..5.0) {
        let g = KernelSpec::gaussian(h).unwrap();
        let origin = [0.0, 0.0];
        let at = |s: f64| g.value(&origin, &[s * dir[0], s * dir[1]]).unwrap();
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(at(near) > 0.0 && at(near) <= 1.0);
        prop_assert!(at(far) <= at(near));
    }
}
