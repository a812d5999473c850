//! Branch resolution `2 - 2cos θ = λ`, the free resolvent and its
//! expansion at the band edges.
//!
//! Kernels are evaluated through `μ = e^{-iθ}`, the root of
//! `μ² - (2-λ)μ + 1 = 0` with `|μ| ≤ 1`, so that `e^{-iθ|n-m|} = μ^{|n-m|}`
//! stays bounded for every separation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeKernel, LatticeSeq, LatticeWindow};

/// `|λ| < EDGE_TOL` or `|λ - 4| < EDGE_TOL` is treated as an exact band edge.
pub const EDGE_TOL: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Boundary value from the upper half plane, `ω + i0`.
    Plus,
    /// Boundary value from the lower half plane, `ω - i0`.
    Minus,
    /// `λ ∉ [0, 4]`.
    OffAxis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub side: Side,
    pub theta: Complex64,
    pub mu: Complex64,
}

impl SpectralPoint {
    /// The point with a prescribed `θ`; `λ = 2 - 2cos θ`.
    ///
    /// Real `θ ∈ (0, π)` is tagged `Minus`, every other real `θ` `Plus`;
    /// complex `θ` is `OffAxis`.
    pub fn from_theta(theta: Complex64) -> Self {
        let mu = (-I * theta).exp();
        let lambda = Complex64::new(2.0, 0.0) - (theta.cos() * 2.0);
        let side = if theta.im != 0.0 {
            Side::OffAxis
        } else if theta.re > 0.0 && theta.re < PI {
            Side::Minus
        } else {
            Side::Plus
        };
        Self {
            lambda,
            side,
            theta,
            mu,
        }
    }

    /// `sin θ = (1/μ - μ) / 2i`.
    pub fn sin_theta(&self) -> Complex64 {
        (self.mu.inv() - self.mu) / (2.0 * I)
    }

    pub fn is_edge(&self) -> bool {
        self.lambda.norm() < EDGE_TOL || (self.lambda - 4.0).norm() < EDGE_TOL
    }
}

/// Resolves `θ(λ)` on the branch selected by `side`.
pub fn resolve_branch(lambda: Complex64, side: Side) -> Result<SpectralPoint> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite lambda {lambda}")));
    }
    let real = lambda.im == 0.0;
    let at_lower = lambda.norm() < EDGE_TOL;
    let at_upper = (lambda - 4.0).norm() < EDGE_TOL;

    match side {
        Side::Plus | Side::Minus => {
            let omega = lambda.re;
            if !real || !(-EDGE_TOL..=4.0 + EDGE_TOL).contains(&omega) {
                return Err(Error::InvalidInput(format!(
                    "boundary values need real lambda in [0, 4], got {lambda}"
                )));
            }
            let sign = if side == Side::Plus { -1.0 } else { 1.0 };
            let (theta, mu) = if at_lower {
                (0.0, Complex64::new(1.0, 0.0))
            } else if at_upper {
                (sign * PI, Complex64::new(-1.0, 0.0))
            } else {
                let half_sin = (omega * (4.0 - omega)).sqrt() / 2.0;
                let theta = sign * half_sin.atan2(1.0 - omega / 2.0);
                (theta, Complex64::new(1.0 - omega / 2.0, -sign * half_sin))
            };
            Ok(SpectralPoint {
                lambda: Complex64::new(omega, 0.0),
                side,
                theta: Complex64::new(theta, 0.0),
                mu,
            })
        }
        Side::OffAxis => {
            if at_lower || at_upper {
                let (theta, mu) = if at_lower { (0.0, 1.0) } else { (-PI, -1.0) };
                return Ok(SpectralPoint {
                    lambda,
                    side,
                    theta: Complex64::new(theta, 0.0),
                    mu: Complex64::new(mu, 0.0),
                });
            }
            if real && lambda.re > 0.0 && lambda.re < 4.0 {
                return Err(Error::BranchAmbiguous(lambda.re));
            }
            let b = Complex64::new(2.0, 0.0) - lambda;
            let disc = (lambda * (lambda - 4.0)).sqrt();
            let r1 = (b + disc) / 2.0;
            let r2 = (b - disc) / 2.0;
            let big = if r1.norm() >= r2.norm() { r1 } else { r2 };
            let mu = big.inv();
            let theta = I * mu.ln();
            Ok(SpectralPoint {
                lambda,
                side,
                theta,
                mu,
            })
        }
    }
}

fn reject_edge(pt: &SpectralPoint) -> Result<()> {
    if pt.is_edge() {
        return Err(Error::EdgeSingularity {
            lambda: pt.lambda.re,
        });
    }
    Ok(())
}

/// Kernel of `R₀(λ) = (-Δ - λ)^{-1}`: `μ^{|n-m|+1} / (1 - μ²)`.
pub fn free_resolvent_kernel(pt: &SpectralPoint, window: LatticeWindow) -> Result<LatticeKernel> {
    reject_edge(pt)?;
    let scale = pt.mu / (Complex64::new(1.0, 0.0) - pt.mu * pt.mu);
    let powers: Vec<Complex64> = (0..window.len()).map(|k| pt.mu.powi(k as i32) * scale).collect();
    Ok(LatticeKernel::from_fn(window, |n, m| {
        powers[(n - m).unsigned_abs() as usize]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandEdge {
    /// `ω = 0`, `θ = 0`.
    Lower,
    /// `ω = 4`, `θ = ∓π`.
    Upper,
}

/// Leading terms of `R₀^±(ω) = ±i·singular/√d + regular + O(√d)`, with `d`
/// the distance from `ω` to the edge.
#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxTerms {
    pub singular: LatticeSeq,
    pub regular: LatticeSeq,
}

/// Lower-edge terms: `(R₋₁f)_n = ½ Σ f_m` and `(R₀f)_n = -½ Σ |n-m| f_m`.
pub fn puiseux_free_terms(f: &LatticeSeq) -> PuiseuxTerms {
    puiseux_free_terms_at(f, BandEdge::Lower)
}

/// Terms at either edge. The upper edge is reached through the reflection
/// `(Uf)_n = (-1)^n f_n`, for which `R₀^±(ω) = -U R₀^∓(4-ω) U`.
pub fn puiseux_free_terms_at(f: &LatticeSeq, edge: BandEdge) -> PuiseuxTerms {
    match edge {
        BandEdge::Lower => lower_edge_terms(f),
        BandEdge::Upper => {
            let reflected = reflect(f);
            let lower = lower_edge_terms(&reflected);
            PuiseuxTerms {
                singular: reflect(&lower.singular),
                regular: reflect(&lower.regular).scale(Complex64::new(-1.0, 0.0)),
            }
        }
    }
}

/// `(Uf)_n = (-1)^n f_n`.
pub fn reflect(f: &LatticeSeq) -> LatticeSeq {
    let window = f.window();
    LatticeSeq::from_fn(window, |n| if n.rem_euclid(2) == 0 { f.get(n) } else { -f.get(n) })
}

fn lower_edge_terms(f: &LatticeSeq) -> PuiseuxTerms {
    let window = f.window();
    let support: Vec<(i64, Complex64)> = f.iter().filter(|(_, z)| *z != Complex64::new(0.0, 0.0)).collect();
    let total: Vec<Complex64> = support.iter().map(|&(_, z)| z).collect();
    let half_sum = crate::lattice::complex_sum(&total) * 0.5;
    let singular = LatticeSeq::from_fn(window, |_| half_sum);
    let regular = LatticeSeq::from_fn(window, |n| {
        let terms: Vec<Complex64> = support
            .iter()
            .map(|&(m, z)| z * ((n - m).abs() as f64))
            .collect();
        crate::lattice::complex_sum(&terms) * -0.5
    });
    PuiseuxTerms { singular, regular }
}
