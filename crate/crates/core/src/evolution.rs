//! The propagator `e^{itH} P_a.c.` from the spectral representation
//!
//! ```text
//! K_{n,m}(t) = (i/π) ∫_{-π}^{π} e^{it(2-2cos θ)} ψ⁺_{max(n,m)}(θ) ψ⁻_{min(n,m)}(θ) sin θ / W(θ) dθ,
//! ```
//!
//! a truncated eigendecomposition oracle, and decay-rate measurements.
//!
//! Outside the support `[s, e]` of `V` the Jost solutions are combinations
//! of `μ^{±n}`, so for `n ≥ m` every entry reduces to a few transforms
//! `E_h(k) = Σ_j q_j h(θ_j) μ_j^k`:
//!
//! ```text
//! n ≥ e, m ≤ s:   E_c(n-m)                           c = sin θ / W
//! n ≥ m ≥ e:      E_{1/2i}(n-m) + E_{ã/W}(n+m)       ã = a sin θ
//! s ≥ n ≥ m:      E_{α̃/W}(n-m) + E_{β̃/W}(-(n+m))    α̃ = α sin θ, β̃ = β sin θ
//! n ≥ e, s<m<e:   E_{ψ⁻_m c}(n)
//! s<n<e, m ≤ s:   E_{ψ⁺_n c}(-m)
//! ```
//!
//! and the remaining block inside the support is summed directly. The
//! transforms are evaluated either on Gauss–Legendre panels (direct sums)
//! or with the periodic trapezoid rule and an FFT. The integrand is smooth
//! and `2π`-periodic whenever `W(0) ≠ 0` and `W(π) ≠ 0`, so both rules
//! converge spectrally.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::edge::SpectralPoint;
use crate::error::{Error, Result};
use crate::jost::{is_generic, SupportJost, TOL_GENERIC};
use crate::lattice::{KernelNorm, LatticeKernel, LatticeWindow, Potential};
use crate::oscillatory::{base_panels, energy_cutoff, panel_rule};
use crate::resolvent::truncated_hamiltonian;
use crate::spectrum::BOUNDARY_DECAY;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Extra sites required beyond `2t` for the truncated oracle.
pub const WINDOW_MARGIN: i64 = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionKernel {
    pub t: f64,
    pub kernel: LatticeKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Gauss–Legendre panels, `max(64, ⌈8t⌉)` plus the transform range per
    /// `2π`, doubled until converged.
    Panels,
    /// Periodic trapezoid rule evaluated by FFT, doubled until converged.
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureControl {
    pub engine: Engine,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self {
            engine: Engine::Panels,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_doublings: 4,
        }
    }
}

impl QuadratureControl {
    pub fn trapezoid() -> Self {
        Self {
            engine: Engine::Trapezoid,
            ..Self::default()
        }
    }
}

/// Quadrature nodes with weights `q_j` that already include the spectral
/// factor and `e^{itω(θ_j)}`.
struct Nodes {
    theta: Vec<f64>,
    q: Vec<Complex64>,
    /// FFT length for uniform nodes starting at `-π`.
    uniform: Option<usize>,
}

impl Nodes {
    fn build(engine: Engine, level: usize, t: f64, span: i64, factor: &dyn Fn(f64) -> Complex64) -> Self {
        let mut theta = Vec::new();
        let mut w = Vec::new();
        let uniform = match engine {
            Engine::Panels => {
                let panels = base_panels(t, 2.0 * PI, span as f64) << level;
                for (x, wx) in panel_rule(-PI, PI, panels, &[-PI / 2.0, 0.0, PI / 2.0]) {
                    theta.push(x);
                    w.push(wx);
                }
                None
            }
            Engine::Trapezoid => {
                let needed = span as f64 + 2.0 * t + 60.0 * t.cbrt() + 512.0;
                let m = (needed.ceil() as usize).next_power_of_two() << level;
                for j in 0..m {
                    theta.push(-PI + 2.0 * PI * j as f64 / m as f64);
                    w.push(2.0 * PI / m as f64);
                }
                Some(m)
            }
        };
        let q = theta
            .iter()
            .zip(&w)
            .map(|(&x, &wx)| factor(x) * Complex64::cis(t * (2.0 - 2.0 * x.cos())) * wx)
            .collect();
        Self { theta, q, uniform }
    }

    /// `E_h(k) = Σ_j q_j h_j μ_j^k` for `k ∈ [kmin, kmax]`, one row per amplitude.
    fn transform(&self, amps: &[Vec<Complex64>], kmin: i64, kmax: i64) -> Vec<Vec<Complex64>> {
        let len = (kmax - kmin + 1) as usize;
        match self.uniform {
            Some(m) => {
                let fft = FftPlanner::new().plan_fft_forward(m);
                amps.iter()
                    .map(|h| {
                        let mut x: Vec<Complex64> = h.iter().zip(&self.q).map(|(a, b)| a * b).collect();
                        fft.process(&mut x);
                        (kmin..=kmax)
                            .map(|k| {
                                let v = x[k.rem_euclid(m as i64) as usize];
                                if k.rem_euclid(2) == 0 {
                                    v
                                } else {
                                    -v
                                }
                            })
                            .collect()
                    })
                    .collect()
            }
            None => {
                const RESEED: usize = 512;
                let mut out = vec![vec![ZERO; len]; amps.len()];
                let mut p = vec![ZERO; amps.len()];
                for (j, &x) in self.theta.iter().enumerate() {
                    let mu = Complex64::cis(-x);
                    for start in (0..len).step_by(RESEED) {
                        let base = Complex64::cis(-x * (kmin + start as i64) as f64) * self.q[j];
                        for (pt, h) in p.iter_mut().zip(amps) {
                            *pt = base * h[j];
                        }
                        for k in start..(start + RESEED).min(len) {
                            for (row, pt) in out.iter_mut().zip(p.iter_mut()) {
                                row[k] += *pt;
                                *pt *= mu;
                            }
                        }
                    }
                }
                out
            }
        }
    }
}

/// Kernel entries of a spectral integral `∫ q(θ) ψ⁺_{max} ψ⁻_{min} sin θ / W dθ`
/// on `|n|, |m| ≤ reach`, assembled from transform tables.
struct StructuredKernel {
    free: bool,
    s: i64,
    e: i64,
    kmin: i64,
    tables: Vec<Vec<Complex64>>,
    core: DMatrix<Complex64>,
}

const T_C: usize = 0;
const T_FREE: usize = 1;
const T_A: usize = 2;
const T_ALPHA: usize = 3;
const T_BETA: usize = 4;
const T_FIXED: usize = 5;

impl StructuredKernel {
    fn build(v: &Potential, nodes: &Nodes, reach: i64) -> Self {
        let free = v.is_zero();
        let (s, e) = v.support_or_origin();
        let w = (e - s + 1) as usize;
        let interior = w.saturating_sub(2);
        let n_tables = T_FIXED + 2 * interior;
        let n_nodes = nodes.theta.len();
        let mut amps = vec![vec![ZERO; n_nodes]; n_tables];
        let mut core_amps = vec![vec![ZERO; n_nodes]; w * w];
        for (j, &x) in nodes.theta.iter().enumerate() {
            let half_i = 1.0 / (2.0 * I);
            amps[T_FREE][j] = half_i;
            if free {
                continue;
            }
            let sj = SupportJost::new(v, &SpectralPoint::from_theta(Complex64::new(x, 0.0)));
            let c = sj.sin_theta / sj.wronskian;
            amps[T_C][j] = c;
            amps[T_A][j] = sj.a_scaled() / sj.wronskian;
            amps[T_ALPHA][j] = sj.alpha_scaled() / sj.wronskian;
            amps[T_BETA][j] = sj.beta_scaled() / sj.wronskian;
            for i in 0..interior {
                let site = s + 1 + i as i64;
                amps[T_FIXED + i][j] = sj.psi_minus_in(site) * c;
                amps[T_FIXED + interior + i][j] = sj.psi_plus_in(site) * c;
            }
            for a in 0..w {
                for b in 0..=a {
                    core_amps[a * w + b][j] =
                        sj.psi_plus_in(s + a as i64) * sj.psi_minus_in(s + b as i64) * c;
                }
            }
        }
        let kmin = -2 * (s.abs() + e.abs()) - 2;
        let kmax = 2 * reach + 2 * (s.abs() + e.abs()) + 2;
        let tables = nodes.transform(&amps, kmin, kmax);
        let core_tables = if free { Vec::new() } else { nodes.transform(&core_amps, 0, 0) };
        let core = DMatrix::from_fn(w, w, |a, b| {
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            core_tables.get(hi * w + lo).map(|row| row[0]).unwrap_or(ZERO)
        });
        Self {
            free,
            s,
            e,
            kmin,
            tables,
            core,
        }
    }

    fn table(&self, id: usize, k: i64) -> Complex64 {
        self.tables[id][(k - self.kmin) as usize]
    }

    fn entry(&self, n: i64, m: i64) -> Complex64 {
        let (n, m) = if n >= m { (n, m) } else { (m, n) };
        if self.free {
            return self.table(T_FREE, n - m);
        }
        let (s, e) = (self.s, self.e);
        let interior = (e - s + 1).max(2) as usize - 2;
        if m >= s && n <= e {
            self.core[((n - s) as usize, (m - s) as usize)]
        } else if n >= e && m <= s {
            self.table(T_C, n - m)
        } else if m >= e {
            self.table(T_FREE, n - m) + self.table(T_A, n + m)
        } else if n <= s {
            self.table(T_ALPHA, n - m) + self.table(T_BETA, -(n + m))
        } else if n > e {
            self.table(T_FIXED + (m - s - 1) as usize, n)
        } else {
            self.table(T_FIXED + interior + (n - s - 1) as usize, -m)
        }
    }

    fn max_table_diff(&self, other: &Self) -> (f64, f64) {
        let mut diff = 0.0f64;
        let mut size = 0.0f64;
        for (a, b) in self.tables.iter().zip(&other.tables) {
            for (x, y) in a.iter().zip(b) {
                diff = diff.max((x - y).norm());
                size = size.max(y.norm());
            }
        }
        for (x, y) in self.core.iter().zip(other.core.iter()) {
            diff = diff.max((x - y).norm());
            size = size.max(y.norm());
        }
        (diff, size)
    }
}

fn check_evolution_input(v: &Potential, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("time must be finite and nonnegative, got {t}")));
    }
    if v.is_zero() {
        return Ok(());
    }
    let g = is_generic(v);
    if !g.flag {
        return Err(Error::NonGeneric {
            w0: g.w0,
            context: "W(0) = 0 makes the spectral integrand singular at the lower edge".into(),
        });
    }
    let sj = SupportJost::new(v, &SpectralPoint::from_theta(Complex64::new(PI, 0.0)));
    if sj.wronskian.norm() <= TOL_GENERIC * (1.0 + v.l1_weighted(1.0)) {
        return Err(Error::NonGeneric {
            w0: sj.wronskian.norm(),
            context: "W(pi) = 0 makes the spectral integrand singular at the upper edge".into(),
        });
    }
    Ok(())
}

fn reach_of(window: LatticeWindow) -> i64 {
    window.sites().map(i64::abs).max().unwrap_or(0)
}

/// Builds the structured kernel, doubling the rule until the transform
/// tables agree.
fn converged_kernel(
    v: &Potential,
    t: f64,
    reach: i64,
    ctl: &QuadratureControl,
    factor: &dyn Fn(f64) -> Complex64,
) -> Result<StructuredKernel> {
    let span = 2 * reach + 2 * {
        let (s, e) = v.support_or_origin();
        s.abs() + e.abs()
    } + 4;
    let mut prev = StructuredKernel::build(v, &Nodes::build(ctl.engine, 0, t, span, factor), reach);
    let mut achieved = f64::INFINITY;
    for level in 1..=ctl.max_doublings as usize {
        let next = StructuredKernel::build(v, &Nodes::build(ctl.engine, level, t, span, factor), reach);
        let (diff, size) = prev.max_table_diff(&next);
        achieved = diff;
        if diff <= ctl.abs_tol.max(ctl.rel_tol * size) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged {
        achieved,
        tolerance: ctl.abs_tol,
    })
}

fn spectral_factor(theta: f64) -> Complex64 {
    let _ = theta;
    I / PI
}

/// `e^{itH₀}`: `(1/2π) ∫ e^{it(2-2cos θ)} e^{iθ(n-m)} dθ = e^{2it} (-i)^{n-m} J_{n-m}(2t)`.
pub fn evolve_free_kernel(t: f64, window: LatticeWindow) -> Result<EvolutionKernel> {
    evolve_ac_kernel_with(&Potential::zero(), t, window, &QuadratureControl::default())
}

/// `e^{itH} P_a.c.` on `window` by Gauss–Legendre panels.
pub fn evolve_ac_kernel(v: &Potential, t: f64, window: LatticeWindow) -> Result<EvolutionKernel> {
    evolve_ac_kernel_with(v, t, window, &QuadratureControl::default())
}

/// `V = 0` is accepted and yields the free propagator.
pub fn evolve_ac_kernel_with(
    v: &Potential,
    t: f64,
    window: LatticeWindow,
    ctl: &QuadratureControl,
) -> Result<EvolutionKernel> {
    v.check_window(&window)?;
    check_evolution_input(v, t)?;
    let sk = converged_kernel(v, t, reach_of(window), ctl, &spectral_factor)?;
    Ok(EvolutionKernel {
        t,
        kernel: LatticeKernel::from_fn(window, |n, m| sk.entry(n, m)),
    })
}

/// `∫₀³ e^{itω} χ₁(ω) Im R(ω) dω = i ∫_{-2π/3}^{2π/3} e^{itω} χ₁ ψ⁺ψ⁻ sin θ / W dθ`,
/// with `χ₁` the energy cutoff that removes the upper edge.
pub fn jensen_kato_kernel(v: &Potential, t: f64, window: LatticeWindow, ctl: &QuadratureControl) -> Result<LatticeKernel> {
    v.check_window(&window)?;
    check_evolution_input(v, t)?;
    let factor = |theta: f64| I * energy_cutoff(2.0 - 2.0 * theta.cos());
    let sk = converged_kernel(v, t, reach_of(window), ctl, &factor)?;
    Ok(LatticeKernel::from_fn(window, |n, m| sk.entry(n, m)))
}

/// Eigenvalues and orthonormal eigenvectors (columns) of the Dirichlet
/// truncation.
pub fn truncated_eigensystem(v: &Potential, window: LatticeWindow) -> (Vec<f64>, DMatrix<f64>) {
    let eig = truncated_hamiltonian(v, window).to_dense().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `Σ e^{itω_k} u_k u_kᵀ` over the modes of the Dirichlet truncation that are
/// not bound states. Valid away from the boundary while `N ≥ 2t + 50`.
pub fn evolve_truncated_oracle(v: &Potential, t: f64, window: LatticeWindow) -> Result<EvolutionKernel> {
    v.check_window(&window)?;
    let required = (2.0 * t).ceil() as i64 + WINDOW_MARGIN;
    if window.half_width() < required {
        return Err(Error::WindowTimeMismatch {
            n: window.half_width(),
            t,
            required,
        });
    }
    let (values, vectors) = truncated_eigensystem(v, window);
    let len = window.len();
    let kept: Vec<usize> = (0..len)
        .filter(|&k| {
            let outside = values[k] < -1e-9 || values[k] > 4.0 + 1e-9;
            let decays = vectors[(0, k)].abs().max(vectors[(len - 1, k)].abs()) <= BOUNDARY_DECAY;
            !(outside && decays)
        })
        .collect();
    let phased = DMatrix::from_fn(len, kept.len(), |i, c| {
        Complex64::cis(t * values[kept[c]]) * vectors[(i, kept[c])]
    });
    let basis = DMatrix::from_fn(len, kept.len(), |i, c| Complex64::new(vectors[(i, kept[c])], 0.0));
    let matrix = phased * basis.transpose();
    Ok(EvolutionKernel {
        t,
        kernel: LatticeKernel::from_matrix(window, matrix)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayNorm {
    /// `‖·‖_{B(σ,-σ)}` on the observation region.
    Weighted,
    /// `max |K_{n,m}|` over the whole window.
    L1ToLinf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayOptions {
    /// Half-width `N` of the window.
    pub window: i64,
    /// Weighted norms are evaluated on `|n|, |m| ≤ observation`; the weights
    /// make the remainder of the window negligible.
    pub observation: i64,
    pub fit_min: f64,
    pub fit_max: f64,
    pub quadrature: QuadratureControl,
}

impl DecayOptions {
    /// Smallest valid window for `t_max` and the default fit window `t ≥ 50`.
    pub fn for_times(t_max: f64) -> Self {
        Self {
            window: (2.0 * t_max).ceil() as i64 + WINDOW_MARGIN,
            observation: 200,
            fit_min: 50.0,
            fit_max: f64::INFINITY,
            quadrature: QuadratureControl::trapezoid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySeries {
    pub kind: DecayNorm,
    pub sigma: f64,
    pub window: i64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares slope of `log ‖·‖` against `log t` on the fit window.
    pub slope: f64,
    pub intercept: f64,
    pub fit_window: (f64, f64),
    /// RMS residual of the fit in `log` units.
    pub residual: f64,
}

impl DecaySeries {
    /// `e^{intercept}`, the fitted constant of `‖·‖ ≈ C t^{slope}`.
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Least-squares line through `(log t, log y)`; returns slope, intercept and
/// RMS residual.
pub fn loglog_fit(times: &[f64], values: &[f64]) -> (f64, f64, f64) {
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Log-spaced times `lo..=hi`, with both end points exact.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| match k {
            0 => lo,
            k if k == count - 1 => hi,
            k => (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

fn validate_times(times: &[f64], window: i64) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("times must be positive and finite".into()));
    }
    if times.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidInput("times must be strictly increasing".into()));
    }
    let t_max = *times.last().unwrap();
    let required = (2.0 * t_max).ceil() as i64 + WINDOW_MARGIN;
    if window < required {
        return Err(Error::WindowTimeMismatch { n: window, t: t_max, required });
    }
    Ok(())
}

fn structured_norm(
    sk: &StructuredKernel,
    kind: DecayNorm,
    sigma: f64,
    opts: &DecayOptions,
) -> f64 {
    match kind {
        DecayNorm::Weighted => {
            let obs = LatticeWindow::symmetric(opts.observation.min(opts.window));
            LatticeKernel::from_fn(obs, |n, m| sk.entry(n, m)).norm(KernelNorm::WeightedOperator(sigma))
        }
        DecayNorm::L1ToLinf => {
            let n_max = opts.window;
            let mut best = 0.0f64;
            for n in -n_max..=n_max {
                for m in -n_max..=n {
                    best = best.max(sk.entry(n, m).norm());
                }
            }
            best
        }
    }
}

fn fit_series(kind: DecayNorm, sigma: f64, times: &[f64], norms: Vec<f64>, opts: &DecayOptions) -> Result<DecaySeries> {
    let (ft, fv): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&norms)
        .filter(|(t, _)| **t >= opts.fit_min && **t <= opts.fit_max)
        .map(|(t, v)| (*t, *v))
        .unzip();
    if ft.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "fewer than two samples inside the fit window [{}, {}]",
            opts.fit_min, opts.fit_max
        )));
    }
    let (slope, intercept, residual) = loglog_fit(&ft, &fv);
    Ok(DecaySeries {
        kind,
        sigma,
        window: opts.window,
        times: times.to_vec(),
        norms,
        slope,
        intercept,
        fit_window: (ft[0], *ft.last().unwrap()),
        residual,
    })
}

/// `‖e^{itH} P_a.c.‖` at each time, and the fitted decay exponent.
pub fn decay_series(
    v: &Potential,
    sigma: f64,
    times: &[f64],
    kind: DecayNorm,
    opts: &DecayOptions,
) -> Result<DecaySeries> {
    validate_times(times, opts.window)?;
    if sigma < 0.0 {
        return Err(Error::InvalidInput(format!("sigma must be nonnegative, got {sigma}")));
    }
    if kind == DecayNorm::Weighted && sigma <= 2.5 {
        log::warn!("sigma = {sigma} is below the weighted decay threshold 5/2");
    }
    let window = LatticeWindow::symmetric(opts.window);
    v.check_window(&window)?;
    check_evolution_input(v, 0.0)?;
    let reach = match kind {
        DecayNorm::Weighted => opts.observation.min(opts.window),
        DecayNorm::L1ToLinf => opts.window,
    };
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let sk = converged_kernel(v, t, reach, &opts.quadrature, &spectral_factor)?;
        norms.push(structured_norm(&sk, kind, sigma, opts));
    }
    fit_series(kind, sigma, times, norms, opts)
}

/// Weighted norm of the energy-cut spectral integral `∫₀³ e^{itω} χ₁ Im R dω`
/// at each time, with its fitted decay exponent.
pub fn jensen_kato_series(v: &Potential, sigma: f64, times: &[f64], opts: &DecayOptions) -> Result<DecaySeries> {
    validate_times(times, opts.window)?;
    check_evolution_input(v, 0.0)?;
    let reach = opts.observation.min(opts.window);
    let factor = |theta: f64| I * energy_cutoff(2.0 - 2.0 * theta.cos());
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let sk = converged_kernel(v, t, reach, &opts.quadrature, &factor)?;
        norms.push(structured_norm(&sk, DecayNorm::Weighted, sigma, opts));
    }
    fit_series(DecayNorm::Weighted, sigma, times, norms, opts)
}
