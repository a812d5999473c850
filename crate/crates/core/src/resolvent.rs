//! The perturbed resolvent `R(λ) = (H - λ)^{-1}`.
//!
//! Two independent routes are provided: the Jost Green function
//! `ψ⁺_{max(n,m)} ψ⁻_{min(n,m)} / W` and a direct tridiagonal solve on a
//! truncated window. The zero-energy limit `R(0)` is built from the
//! operators `T₋₁`, `T₀` and `S₀ = T₀^{-1}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::edge::{resolve_branch, Side, SpectralPoint};
use crate::error::{Error, Result};
use crate::jost::{jost_pair, zero_energy_jost, TOL_GENERIC};
use crate::lattice::{complex_sum, LatticeKernel, LatticeSeq, LatticeWindow, Potential};
use crate::linalg::{SymTridiagonal, TridiagonalLu};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `|W| ≤ WRONSKIAN_TOL · (1 + ‖V‖_{ℓ¹})` is reported as a vanishing Wronskian.
pub const WRONSKIAN_TOL: f64 = 1e-12;

/// Condition numbers of `T₀` above this are treated as a kernel of `T₀`.
pub const T0_CONDITION_MAX: f64 = 1e12;

/// Boundary value `R^±(ω)` from the Jost Green function.
pub fn resolvent_kernel_jost(v: &Potential, omega: f64, side: Side, window: LatticeWindow) -> Result<LatticeKernel> {
    if side == Side::OffAxis {
        return Err(Error::InvalidInput("boundary values need side plus or minus".into()));
    }
    let pt = resolve_branch(Complex64::new(omega, 0.0), side)?;
    resolvent_kernel_jost_at(v, &pt, window)
}

/// Jost Green function at any non-edge spectral point, evaluated as
/// `μ^{|n-m|} f⁺_{max} f⁻_{min} / W` so that off-axis entries do not overflow.
pub fn resolvent_kernel_jost_at(v: &Potential, pt: &SpectralPoint, window: LatticeWindow) -> Result<LatticeKernel> {
    let jd = jost_pair(v, pt, window)?;
    let w = jd.wronskian;
    if w.norm() <= WRONSKIAN_TOL * (1.0 + v.l1_weighted(0.0)) {
        return Err(Error::WronskianVanishes {
            theta: pt.theta.re,
            modulus: w.norm(),
        });
    }
    let powers: Vec<Complex64> = (0..window.len()).map(|k| pt.mu.powi(k as i32) / w).collect();
    let fp = jd.f_plus.values();
    let fm = jd.f_minus.values();
    let matrix = DMatrix::from_fn(window.len(), window.len(), |i, j| {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        powers[hi - lo] * fp[hi] * fm[lo]
    });
    LatticeKernel::from_matrix(window, matrix)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `x_n = 0` outside the window.
    #[default]
    Dirichlet,
    /// Outgoing condition `x_{N+1} = μ x_N`, `x_{-N-1} = μ x_{-N}`. Exact for
    /// the infinite lattice as long as the support of `V` lies in the window.
    Transparent,
}

/// `(H_N - λ)^{-1}` with Dirichlet truncation.
pub fn resolvent_truncated_solve(v: &Potential, lambda: Complex64, window: LatticeWindow) -> Result<LatticeKernel> {
    let pt = SpectralPoint {
        lambda,
        side: Side::OffAxis,
        theta: ZERO,
        mu: ZERO,
    };
    resolvent_truncated_solve_at(v, &pt, window, Boundary::Dirichlet)
}

/// Truncated solve at `pt` with the given boundary closure. The transparent
/// closure uses `pt.mu`, so boundary values `ω ± i0` are reachable directly.
pub fn resolvent_truncated_solve_at(
    v: &Potential,
    pt: &SpectralPoint,
    window: LatticeWindow,
    boundary: Boundary,
) -> Result<LatticeKernel> {
    v.check_window(&window)?;
    let len = window.len();
    let lambda = pt.lambda;
    let mut diag: Vec<Complex64> = window.sites().map(|n| Complex64::new(2.0 + v.at(n), 0.0) - lambda).collect();
    if boundary == Boundary::Transparent {
        diag[0] -= pt.mu;
        diag[len - 1] -= pt.mu;
    }
    let off = vec![-ONE; len - 1];
    let lu = TridiagonalLu::factor(&off, &diag, &off);
    let scale = diag.iter().map(|z| z.norm()).fold(2.0, f64::max);
    if lu.min_pivot() <= 1e-13 * scale {
        return Err(Error::SingularSystem {
            lambda,
            nearest_eigenvalue: nearest_truncated_eigenvalue(v, window, lambda.re),
        });
    }
    let mut matrix = DMatrix::zeros(len, len);
    let mut col = vec![ZERO; len];
    for j in 0..len {
        col.iter_mut().for_each(|z| *z = ZERO);
        col[j] = ONE;
        lu.solve_in_place(&mut col);
        matrix.column_mut(j).iter_mut().zip(&col).for_each(|(dst, src)| *dst = *src);
    }
    LatticeKernel::from_matrix(window, matrix)
}

/// Dirichlet truncation of `H` as a symmetric tridiagonal matrix.
pub fn truncated_hamiltonian(v: &Potential, window: LatticeWindow) -> SymTridiagonal {
    SymTridiagonal {
        diag: window.sites().map(|n| 2.0 + v.at(n)).collect(),
        off: vec![-1.0; window.len() - 1],
    }
}

fn nearest_truncated_eigenvalue(v: &Potential, window: LatticeWindow, x: f64) -> f64 {
    let h = truncated_hamiltonian(v, window);
    let k = h.count_below(x);
    let mut best = f64::NAN;
    for idx in [k.checked_sub(1), Some(k)].into_iter().flatten() {
        if idx < h.len() {
            let ev = h.kth_eigenvalue(idx);
            if best.is_nan() || (ev - x).abs() < (best - x).abs() {
                best = ev;
            }
        }
    }
    best
}

/// `max_n |((H - λ)K - I)_{n,m}|` over interior rows, relative to `max |K|`.
pub fn resolvent_residual(v: &Potential, lambda: Complex64, k: &LatticeKernel, margin: i64) -> f64 {
    let window = k.window();
    let scale = k.max_abs().max(1.0);
    let mut worst = 0.0f64;
    for m in window.sites() {
        let col = k.column(m);
        for n in window.interior(margin) {
            let hx = -(col.get(n + 1) + col.get(n - 1)) + col.get(n) * (2.0 + v.at(n)) - lambda * col.get(n);
            let target = if n == m { ONE } else { ZERO };
            worst = worst.max((hx - target).norm());
        }
    }
    worst / scale
}

/// `T₋₁`, `T₀` and, when `T₀` is invertible, `S₀ = T₀^{-1}`.
///
/// `T₀ = I - Q` where `Q_{n,m} = ½|n-m| V_m` is nonzero only in the columns
/// of the support, so `T₀` is inverted through the support block
/// `M = I - Q|_{supp × supp}`: `S₀ = I + Q M^{-1} P_supp`.
#[derive(Debug, Clone)]
pub struct TOperators {
    pub t_minus1: LatticeKernel,
    pub t0: LatticeKernel,
    pub s0: Option<LatticeKernel>,
    /// 2-norm condition number of the support block of `T₀`.
    pub condition: f64,
    support: Vec<(i64, f64)>,
    block_inverse: Option<DMatrix<f64>>,
}

impl TOperators {
    /// `S₀ f`, computed through the support block.
    pub fn apply_s0(&self, f: &LatticeSeq) -> Option<LatticeSeq> {
        let inv = self.block_inverse.as_ref()?;
        let w = self.support.len();
        let fs: Vec<Complex64> = self.support.iter().map(|&(m, _)| f.get(m)).collect();
        let us: Vec<Complex64> = (0..w)
            .map(|i| complex_sum(&(0..w).map(|j| fs[j] * inv[(i, j)]).collect::<Vec<_>>()))
            .collect();
        Some(LatticeSeq::from_fn(f.window(), |n| {
            let terms: Vec<Complex64> = self
                .support
                .iter()
                .zip(&us)
                .map(|(&(m, vm), u)| u * (0.5 * (n - m).abs() as f64 * vm))
                .collect();
            f.get(n) + complex_sum(&terms)
        }))
    }

    /// `u = S₀ 1`, a solution of `(-Δ + V)u = 0`.
    pub fn zero_mode(&self) -> Option<LatticeSeq> {
        self.apply_s0(&LatticeSeq::from_real(self.t0.window(), |_| 1.0))
    }
}

pub fn t_operators(v: &Potential, window: LatticeWindow) -> Result<TOperators> {
    v.check_window(&window)?;
    let support: Vec<(i64, f64)> = v.iter().filter(|(_, x)| *x != 0.0).collect();
    let t_minus1 = LatticeKernel::from_fn(window, |_, m| Complex64::new(0.5 * v.at(m), 0.0));
    let t0 = LatticeKernel::from_fn(window, |n, m| {
        let delta = if n == m { 1.0 } else { 0.0 };
        Complex64::new(delta - 0.5 * (n - m).abs() as f64 * v.at(m), 0.0)
    });
    let w = support.len();
    let block = DMatrix::from_fn(w, w, |i, j| {
        let (n, _) = support[i];
        let (m, vm) = support[j];
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - 0.5 * (n - m).abs() as f64 * vm
    });
    let condition = if w == 0 {
        1.0
    } else {
        let sv = block.clone().svd(false, false).singular_values;
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    };
    let block_inverse = if condition < T0_CONDITION_MAX {
        block.try_inverse()
    } else {
        log::warn!("T0 support block has condition number {condition:e}; treating T0 as singular");
        None
    };
    let mut ops = TOperators {
        t_minus1,
        t0,
        s0: None,
        condition,
        support,
        block_inverse,
    };
    if let Some(inv) = &ops.block_inverse {
        let sup = &ops.support;
        let idx: Vec<usize> = sup.iter().map(|&(m, _)| window.index(m).unwrap()).collect();
        let mut s0 = DMatrix::<Complex64>::identity(window.len(), window.len());
        for (jj, &col) in idx.iter().enumerate() {
            for (r, n) in window.sites().enumerate() {
                let terms: Vec<f64> = sup
                    .iter()
                    .enumerate()
                    .map(|(i, &(m, vm))| 0.5 * (n - m).abs() as f64 * vm * inv[(i, jj)])
                    .collect();
                s0[(r, col)] += Complex64::new(crate::linalg::neumaier_sum(terms), 0.0);
            }
        }
        ops.s0 = Some(LatticeKernel::from_matrix(window, s0)?);
    }
    Ok(ops)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct T0Genericity {
    pub flag: bool,
    /// `T₀` has no numerical kernel.
    pub nonsingular: bool,
    pub condition: f64,
    /// `⟨V, S₀ 1⟩`; zero when `T₀` is singular.
    pub pairing: f64,
}

/// Genericity in the sense of `T₀`: `T₀` invertible and `⟨V, T₀^{-1} 1⟩ ≠ 0`.
pub fn t0_genericity(v: &Potential) -> T0Genericity {
    let (s, e) = v.support_or_origin();
    let window = LatticeWindow::new(s - 1, e + 1).expect("non-empty window");
    let ops = t_operators(v, window).expect("window contains support");
    let pairing = ops.zero_mode().map(|u| u.pair_with(v).re).unwrap_or(0.0);
    let nonsingular = ops.block_inverse.is_some();
    T0Genericity {
        flag: nonsingular && pairing.abs() > TOL_GENERIC * (1.0 + v.l1_weighted(1.0)),
        nonsingular,
        condition: ops.condition,
        pairing,
    }
}

fn bilinear_sum(u: &LatticeSeq) -> Complex64 {
    complex_sum(u.values())
}

/// `R(0)ψ = S₀R₀ψ + (⟨1,ψ⟩ - ⟨V,S₀R₀ψ⟩) / ⟨V,S₀1⟩ · S₀1`, with `R₀` the
/// regular edge term `(R₀ψ)_n = -½ Σ |n-m| ψ_m`.
pub fn resolvent_at_zero(v: &Potential, psi: &LatticeSeq) -> Result<LatticeSeq> {
    let window = psi.window();
    let ops = t_operators(v, window)?;
    let t0g = t0_genericity(v);
    if !t0g.flag {
        return Err(Error::NonGeneric {
            w0: t0g.pairing,
            context: format!(
                "R(0) needs <V, S0 1> != 0 and invertible T0 (condition {:e})",
                t0g.condition
            ),
        });
    }
    let r0psi = crate::edge::puiseux_free_terms(psi).regular;
    let s_r0 = ops.apply_s0(&r0psi).expect("T0 invertible");
    let u = ops.zero_mode().expect("T0 invertible");
    let denom = u.pair_with(v);
    let coeff = (bilinear_sum(psi) - s_r0.pair_with(v)) / denom;
    Ok(s_r0.axpy(coeff, &u))
}

/// The kernel of `R(0)` on `window`, one column per site.
pub fn resolvent_at_zero_kernel(v: &Potential, window: LatticeWindow) -> Result<LatticeKernel> {
    let mut k = LatticeKernel::zeros(window);
    for m in window.sites() {
        let col = resolvent_at_zero(v, &LatticeSeq::delta(window, m))?;
        for (n, z) in col.iter() {
            k.set(n, m, z);
        }
    }
    Ok(k)
}

/// `R(0)` from the zero-energy Jost solutions, `ψ⁺_{max} ψ⁻_{min} / W(0)`.
pub fn zero_energy_green_kernel(v: &Potential, window: LatticeWindow) -> Result<LatticeKernel> {
    let z = zero_energy_jost(v, window)?;
    let g = crate::jost::is_generic(v);
    if !g.flag {
        return Err(Error::NonGeneric {
            w0: g.w0,
            context: "the zero-energy Green function needs W(0) != 0".into(),
        });
    }
    Ok(LatticeKernel::from_fn(window, |n, m| {
        let (hi, lo) = if n >= m { (n, m) } else { (m, n) };
        Complex64::new(z.plus(hi) * z.minus(lo) / g.w0, 0.0)
    }))
}

/// `A diag(V) B` with the sum restricted to the support of `V`.
pub fn sandwich(a: &LatticeKernel, v: &Potential, b: &LatticeKernel) -> LatticeKernel {
    let window = a.window();
    let support: Vec<(usize, f64)> = v.iter().filter_map(|(k, x)| window.index(k).map(|i| (i, x))).collect();
    let (am, bm) = (a.matrix(), b.matrix());
    let matrix = DMatrix::from_fn(window.len(), window.len(), |i, j| {
        let terms: Vec<Complex64> = support.iter().map(|&(k, x)| am[(i, k)] * x * bm[(k, j)]).collect();
        complex_sum(&terms)
    });
    LatticeKernel::from_matrix(window, matrix).expect("same window")
}
