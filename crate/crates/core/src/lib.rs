//! Spectral numerics for the discrete Schrödinger operator `H = -Δ + V` on `Z`.
//!
//! Potentials are finitely supported. Infinite-lattice objects are
//! represented on a finite [`LatticeWindow`]; wherever a closed form exists
//! (Jost solutions, Green functions, spectral integrals) the window entries
//! are exact rather than truncation approximations.

pub mod edge;
pub mod ensemble;
pub mod error;
pub mod evolution;
pub mod jost;
pub mod lattice;
pub mod linalg;
pub mod oscillatory;
pub mod resolvent;
pub mod spectrum;

pub use edge::{
    free_resolvent_kernel, puiseux_free_terms, puiseux_free_terms_at, resolve_branch, BandEdge, PuiseuxTerms, Side,
    SpectralPoint,
};
pub use error::{Error, Result};
pub use evolution::{
    decay_series, evolve_ac_kernel, evolve_free_kernel, evolve_truncated_oracle, DecayNorm, DecayOptions,
    DecaySeries, EvolutionKernel,
};
pub use jost::{
    is_generic, jost_pair, scattering_coeffs, zero_energy_jost, Genericity, JostData, ScatteringData, ZeroEnergyJost,
};
pub use lattice::{
    apply_h, kernel_norm, weight, weighted_norm, KernelNorm, LatticeKernel, LatticeSeq, LatticeWindow, NormSpace,
    Potential,
};
pub use oscillatory::{
    build_cutoffs, oscillatory_integral, sup_over_a_decay, CutoffPair, OscillatoryResult, PhaseSpec,
};
pub use resolvent::{
    resolvent_at_zero, resolvent_kernel_jost, resolvent_truncated_solve, t_operators, Boundary, TOperators,
};
pub use spectrum::{discrete_spectrum, EigenPair, SpectralDecomposition};
