//! Bound states of `H` outside the band `[0, 4]` and the projection onto the
//! absolutely continuous subspace.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::edge::{resolve_branch, Side};
use crate::error::{Error, Result};
use crate::lattice::{LatticeKernel, LatticeWindow, Potential};
use crate::linalg::neumaier_sum;
use crate::resolvent::truncated_hamiltonian;

/// Eigenvalues within this distance of `[0, 4]` are not reported.
pub const BAND_MARGIN: f64 = 1e-9;

/// Required `|v_n|` at the window boundary for a unit eigenvector.
pub const BOUNDARY_DECAY: f64 = 1e-10;

/// Eigenvalues closer than this are orthonormalized as one block.
const CLUSTER_GAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub omega: f64,
    /// Unit `ℓ²` eigenvector over the window.
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub window: LatticeWindow,
    pub pairs: Vec<EigenPair>,
    /// `I - Σ v_j v_jᵀ`.
    pub p_ac: LatticeKernel,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.omega).collect()
    }
}

/// Window half-width at which a bound state at `omega` decays below
/// `BOUNDARY_DECAY` at the boundary.
pub fn suggested_half_width(v: &Potential, omega: f64) -> i64 {
    let pt = resolve_branch(Complex64::new(omega, 0.0), Side::OffAxis).expect("omega outside the band");
    let kappa = -pt.mu.norm().ln();
    let (s, e) = v.support_or_origin();
    let reach = s.abs().max(e.abs());
    reach + (1.2 * (1.0 / BOUNDARY_DECAY).ln() / kappa).ceil() as i64 + 10
}

/// Bisection for eigenvalues of the Dirichlet truncation outside
/// `[-BAND_MARGIN, 4 + BAND_MARGIN]`, inverse iteration for the vectors.
pub fn discrete_spectrum(v: &Potential, window: LatticeWindow) -> Result<SpectralDecomposition> {
    v.check_window(&window)?;
    let h = truncated_hamiltonian(v, window);
    let len = h.len();
    let below = h.count_below(-BAND_MARGIN);
    let above = len - h.count_below(4.0 + BAND_MARGIN);
    let indices: Vec<usize> = (0..below).chain(len - above..len).collect();

    let mut pairs: Vec<EigenPair> = Vec::with_capacity(indices.len());
    for k in indices {
        let omega = h.kth_eigenvalue(k);
        let mut vector = h.inverse_iteration(omega);
        if let Some(prev) = pairs.last() {
            if (omega - prev.omega).abs() < CLUSTER_GAP {
                orthogonalize_against(&mut vector, &pairs);
            }
        }
        let ratio = vector[0].abs().max(vector[len - 1].abs());
        if ratio > BOUNDARY_DECAY {
            return Err(Error::EnlargeWindow {
                omega,
                boundary_ratio: ratio,
                suggested_n: suggested_half_width(v, omega).max(2 * window.half_width()),
            });
        }
        pairs.push(EigenPair { omega, vector });
    }

    let mut p = DMatrix::<Complex64>::identity(len, len);
    for i in 0..len {
        for j in 0..len {
            let s = neumaier_sum(pairs.iter().map(|pr| pr.vector[i] * pr.vector[j]));
            p[(i, j)] -= Complex64::new(s, 0.0);
        }
    }
    Ok(SpectralDecomposition {
        window,
        pairs,
        p_ac: LatticeKernel::from_matrix(window, p)?,
    })
}

fn orthogonalize_against(vector: &mut [f64], pairs: &[EigenPair]) {
    for p in pairs {
        let dot = neumaier_sum(vector.iter().zip(&p.vector).map(|(a, b)| a * b));
        vector.iter_mut().zip(&p.vector).for_each(|(a, b)| *a -= dot * b);
    }
    let norm = neumaier_sum(vector.iter().map(|x| x * x)).sqrt();
    vector.iter_mut().for_each(|x| *x /= norm);
}
