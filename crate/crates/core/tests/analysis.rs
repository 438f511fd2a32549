use proptest::prelude::*;
use qucc::analysis::{barrier_error, mean_error, npe, oo_improvement, shift_align, ScanSeries};

fn series(exact: &[f64], method: &[f64]) -> ScanSeries {
    let coords = (0..exact.len()).map(|k| k as f64).collect();
    let mut s = ScanSeries::new("r", coords, exact.to_vec()).unwrap();
    s.insert_method("m", method.iter().map(|&e| Some(e)).collect()).unwrap();
    s
}

fn curves() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..10)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(-2.0..-1.0f64, n),
                prop::collection::vec(0.0..0.05f64, n),
            )
        })
        .prop_map(|(exact, err)| {
            let method = exact.iter().zip(&err).map(|(e, d)| e + d).collect();
            (exact, method)
        })
}

proptest! {
    #[test]
    fn npe_and_barrier_ignore_constant_shifts((exact, method) in curves(), c in -1.0..1.0f64) {
        let shifted: Vec<f64> = method.iter().map(|e| e + c).collect();
        let a = series(&exact, &method);
        let b = series(&exact, &shifted);
        prop_assert!((npe(&a, "m").unwrap() - npe(&b, "m").unwrap()).abs() < 1e-12);
        if let (Ok(x), Ok(y)) = (barrier_error(&a, "m"), barrier_error(&b, "m")) {
            prop_assert!((x - y).abs() < 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn shift_align_is_idempotent((exact, method) in curves(), anchor in 0usize..3) {
        let (aligned, shift) = shift_align(&series(&exact, &method), "m", anchor).unwrap();
        prop_assert!((aligned[anchor].unwrap() - exact[anchor]).abs() < 1e-12);
        let again: Vec<f64> = aligned.iter().map(|e| e.unwrap()).collect();
        let (_, second) = shift_align(&series(&exact, &again), "m", anchor).unwrap();
        prop_assert!(second.abs() < 1e-12);
        prop_assert!((shift - (exact[anchor] - method[anchor])).abs() < 1e-12);
    }

    #[test]
    fn npe_and_mean_error_are_permutation_invariant((exact, method) in curves(), rot in 0usize..10) {
        let k = rot % exact.len();
        let mut e2 = exact.clone();
        let mut m2 = method.clone();
        e2.rotate_left(k);
        m2.rotate_left(k);
        let (a, b) = (series(&exact, &method), series(&e2, &m2));
        prop_assert!((npe(&a, "m").unwrap() - npe(&b, "m").unwrap()).abs() < 1e-12);
        let (x, y) = (mean_error(&a, "m").unwrap(), mean_error(&b, "m").unwrap());
        prop_assert!((x.mean - y.mean).abs() < 1e-12);
        prop_assert!((x.standard_error - y.standard_error).abs() < 1e-12);
    }
}

#[test]
fn definitions_on_small_series() {
    let exact = [-1.0, -1.2, -1.1];
    let s = series(&exact, &[-0.999, -1.197, -1.098]);
    assert!((npe(&s, "m").unwrap() - 0.002).abs() < 1e-12);
    let m = mean_error(&series(&exact, &[-0.999, -1.199, -1.099]), "m").unwrap();
    assert!((m.mean - 1e-3).abs() < 1e-12 && m.standard_error.abs() < 1e-12);
    // doubled barrier
    let doubled = series(&exact, &[-1.0, -1.4, -1.2]);
    assert!((barrier_error(&doubled, "m").unwrap() - 100.0).abs() < 1e-9);
    assert!((oo_improvement(-1.0, -1.2, -1.2).unwrap() - 100.0).abs() < 1e-12);
    assert!(oo_improvement(-1.0, -1.0, -1.2).unwrap().abs() < 1e-12);
    assert!(oo_improvement(-1.2, -1.2, -1.2).is_err());
}
