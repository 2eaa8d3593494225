use pminor::csmatrix::*;
use pminor::minors::binomial;
use pminor::{RngStream, Strategy};

fn brute_delta(x: &pminor::Matrix, m: usize) -> f64 {
    let w = x.gram();
    let p = w.dim();
    let mut best: f64 = 0.0;
    let mut s: Vec<usize> = (0..m).collect();
    loop {
        let e = w.principal_minor(&s).unwrap().eigvalsh().unwrap();
        best = best.max(e.max() - 1.0).max(1.0 - e.min());
        let mut i = m;
        while i > 0 && s[i - 1] == p - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        s[i - 1] += 1;
        for j in i..m {
            s[j] = s[j - 1] + 1;
        }
    }
}

#[test]
fn exact_delta_matches_brute_force() {
    for seed in 0..12 {
        let p = 4 + (seed as usize % 9);
        let mut rng = RngStream::from_seed(seed);
        let x = sample_sensing_matrix(30, p, &mut rng).unwrap();
        let mut prev = 0.0;
        for k in 1..=p.min(4) {
            let r = exact_rip_constant(&x, k, 1.0, Strategy::BranchAndBound).unwrap();
            let d = r.delta_exact.unwrap();
            assert!((d - brute_delta(&x, k)).abs() < 1e-10, "seed={seed} k={k}");
            assert!(d + 1e-12 >= prev);
            assert_eq!(r.recovery_pass, d < r.b_star_t);
            prev = d;
        }
    }
}

#[test]
fn sparse_vectors_respect_delta() {
    let mut rng = RngStream::from_seed(31);
    let x = sample_sensing_matrix(40, 12, &mut rng).unwrap();
    let k = 3;
    let delta = exact_rip_constant(&x, k, 1.0, Strategy::BranchAndBound).unwrap().delta_exact.unwrap();
    for _ in 0..10_000 {
        let mut support = Vec::new();
        while support.len() < k {
            let i = (rng.next_u64() % 12) as usize;
            if !support.contains(&i) {
                support.push(i);
            }
        }
        let mut beta = vec![0.0; 12];
        for &i in &support {
            beta[i] = rng.next_normal();
        }
        let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        beta.iter_mut().for_each(|b| *b /= norm);
        let y = x.mul_vec(&beta);
        let energy: f64 = y.iter().map(|v| v * v).sum();
        assert!((energy - 1.0).abs() <= delta + 1e-9);
    }
}

#[test]
fn column_energy_is_one_on_average() {
    let mut rng = RngStream::from_seed(8);
    let mut total = 0.0;
    for _ in 0..500 {
        let x = sample_sensing_matrix(100, 1, &mut rng).unwrap();
        total += x.as_slice().iter().map(|v| v * v).sum::<f64>();
    }
    assert!((total / 500.0 - 1.0).abs() < 0.02);
}

#[test]
fn reference_design_subset_count() {
    assert_eq!(binomial(20, 4), 4845);
}
