//! Seeded random compact potentials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jost::zero_energy_jost;
use crate::lattice::{LatticeWindow, Potential};

/// Longest support drawn by [`random_potential`].
pub const MAX_SUPPORT: usize = 9;

/// Support length in `1..=MAX_SUPPORT`, placed around the origin, entries
/// uniform in `[-1, 1]` with the end points nonzero.
pub fn random_potential(rng: &mut impl Rng) -> Potential {
    let len = rng.random_range(1..=MAX_SUPPORT);
    let offset = -(len as i64 / 2) + rng.random_range(-2..=2);
    let mut values: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect();
    for i in [0, len - 1] {
        if values[i] == 0.0 {
            values[i] = 0.5;
        }
    }
    Potential::new(offset, values).expect("finite values")
}

/// `count` potentials from the seed.
pub fn random_ensemble(seed: u64, count: usize) -> Vec<Potential> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_potential(&mut rng)).collect()
}

fn w0(v: &Potential) -> f64 {
    let (s, e) = v.support_or_origin();
    let window = LatticeWindow::new(s - 1, e + 1).expect("non-empty window");
    zero_energy_jost(v, window).expect("window contains support").pairing_plus
}

/// The nonzero scale `c` of smallest modulus in `[-20, 20]` for which `cV` has a
/// zero-energy resonance, found by scanning `W(0)(cV)/c` for a sign change
/// and bisecting.
pub fn resonant_scale(v: &Potential) -> Option<f64> {
    let p = |c: f64| w0(&v.scaled(c)) / c;
    let steps = 400;
    let mut best: Option<f64> = None;
    for sign in [1.0, -1.0] {
        let mut prev_c = sign * 0.05;
        let mut prev = p(prev_c);
        for k in 1..=steps {
            let c = sign * (0.05 + 19.95 * k as f64 / steps as f64);
            let cur = p(c);
            if cur.signum() != prev.signum() {
                let (mut lo, mut hi, flo) = (prev_c, c, prev);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p(mid).signum() == flo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if lo == mid && hi == mid {
                        break;
                    }
                }
                let root = 0.5 * (lo + hi);
                if best.is_none_or(|b| root.abs() < b.abs()) {
                    best = Some(root);
                }
                break;
            }
            prev_c = c;
            prev = cur;
        }
    }
    best
}

/// A random ensemble in which every fifth potential is rescaled onto a
/// zero-energy resonance.
pub fn genericity_ensemble(seed: u64, count: usize) -> Vec<Potential> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = random_potential(&mut rng);
        if out.len() % 5 == 4 {
            if let Some(c) = resonant_scale(&v) {
                out.push(v.scaled(c));
            }
        } else {
            out.push(v);
        }
    }
    out
}
