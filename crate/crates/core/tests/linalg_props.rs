use nalgebra::DMatrix;
use pminor::SymMatrix;
use proptest::prelude::*;

fn sym_strategy() -> impl Strategy<Value = SymMatrix> {
    (1usize..=10).prop_flat_map(|k| {
        prop::collection::vec(-10.0f64..10.0, k * k)
            .prop_map(move |v| SymMatrix::from_fn(k, |i, j| v[i * k + j]).unwrap())
    })
}

fn max_abs_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eigh_reconstructs_and_is_orthonormal(a in sym_strategy()) {
        let s = a.eigh().unwrap();
        let k = a.dim();
        let scale = 1.0 + a.frobenius_norm();
        prop_assert!(max_abs_diff(&s.reconstruct().unwrap(), &a) < 1e-9 * scale);
        let v = s.vectors.as_ref().unwrap();
        for i in 0..k {
            for j in 0..k {
                let dot: f64 = (0..k).map(|t| v[t * k + i] * v[t * k + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() < 1e-9);
            }
        }
        let trace: f64 = s.values.iter().sum();
        prop_assert!((trace - a.trace()).abs() < 1e-9 * scale);
        prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigenvalues_match_lapack_style_reference(a in sym_strategy()) {
        let k = a.dim();
        let reference = DMatrix::from_row_slice(k, k, a.as_slice()).symmetric_eigen();
        let mut expect: Vec<f64> = reference.eigenvalues.iter().copied().collect();
        expect.sort_by(|x, y| y.total_cmp(x));
        let got = a.eigvalsh().unwrap().values;
        for (g, e) in got.iter().zip(&expect) {
            prop_assert!((g - e).abs() < 1e-9 * (1.0 + a.frobenius_norm()));
        }
    }

    #[test]
    fn principal_minors_interlace(a in sym_strategy(), pick in prop::collection::vec(any::<bool>(), 10)) {
        let k = a.dim();
        let s: Vec<usize> = (0..k).filter(|&i| pick[i]).collect();
        prop_assume!(!s.is_empty());
        let full = a.eigvalsh().unwrap();
        let sub = a.principal_minor(&s).unwrap().eigvalsh().unwrap();
        let tol = 1e-9 * (1.0 + a.frobenius_norm());
        // λ_i(A) >= λ_i(A_S) >= λ_{i + k - |S|}(A)
        for (i, mu) in sub.values.iter().enumerate() {
            prop_assert!(full.values[i] + tol >= *mu);
            prop_assert!(*mu + tol >= full.values[i + k - s.len()]);
        }
    }

    #[test]
    fn text_format_round_trips(a in sym_strategy()) {
        let back = SymMatrix::from_text(&a.to_text()).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn lambda_max_agrees_with_spectrum() {
    let a = SymMatrix::from_rows(&[[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]).unwrap();
    let s = a.eigvalsh().unwrap();
    let r2 = 2f64.sqrt();
    let expect = [2.0 + r2, 2.0, 2.0 - r2];
    for (g, e) in s.values.iter().zip(expect) {
        assert!((g - e).abs() < 1e-12);
    }
    assert_eq!(a.lambda_max().unwrap(), s.values[0]);
    assert_eq!(a.lambda_min().unwrap(), s.values[2]);
}
