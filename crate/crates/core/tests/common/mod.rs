#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;

use lattice_spectral::{LatticeKernel, Potential};

/// `J_0(x), …, J_kmax(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_table(kmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; kmax + 1];
        out[0] = 1.0;
        return out;
    }
    let start = kmax + (2.0 * x.abs()).ceil() as usize + 60;
    let start = start + start % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            vals.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let norm = vals[0] + 2.0 * (1..=start / 2).map(|k| vals[2 * k]).sum::<f64>();
    vals.truncate(kmax + 1);
    vals.iter().map(|v| v / norm).collect()
}

/// Power series `Σ (-1)^j (x/2)^{2j+k} / (j! (j+k)!)`, for moderate `x`.
pub fn bessel_j_series(k: usize, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = (0..k).fold(1.0, |acc, i| acc * half / (i + 1) as f64);
    let mut sum = term;
    for j in 1..200 {
        term *= -half * half / (j as f64 * (j + k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `e^{2it} (-i)^k J_k(2t)` for every `|k| ≤ kmax`, indexed by `|k|`.
pub fn free_propagator_table(t: f64, kmax: usize) -> Vec<Complex64> {
    let j = bessel_j_table(kmax, 2.0 * t);
    let phase = Complex64::cis(2.0 * t);
    let mut mi = Complex64::new(1.0, 0.0);
    j.iter()
        .map(|&jk| {
            let v = phase * mi * jk;
            mi *= Complex64::new(0.0, -1.0);
            v
        })
        .collect()
}

pub fn max_diff(a: &LatticeKernel, b: &LatticeKernel) -> f64 {
    a.max_abs_diff(b)
}

/// Compact potentials with support of length 1..=9 in [-6, 6] and entries in [-1, 1].
pub fn arb_potential() -> impl Strategy<Value = Potential> {
    (-6i64..=-1, prop::collection::vec(-1.0f64..=1.0, 1..=9))
        .prop_map(|(offset, values)| Potential::new(offset, values).unwrap())
}

pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn ratio_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max / min
}
