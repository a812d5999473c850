//! Oscillatory integrals `∫ e^{i t h(θ)} g(θ) dθ` for the phase family
//! `h(θ) = 2 - 2cos θ - aθ`, the smooth cutoffs `χ₀`, `χ`, `χ₁`, and the
//! sup-over-`a` decay measurement.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

/// Points per Gauss–Legendre panel.
pub const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on `[lo, hi]`: `panels` equal panels, split
/// further at every point of `breaks` inside the interval.
pub fn panel_rule(lo: f64, hi: f64, panels: usize, breaks: &[f64]) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(PANEL_ORDER);
    let mut edges: Vec<f64> = (0..=panels).map(|k| lo + (hi - lo) * k as f64 / panels as f64).collect();
    edges.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (hi - lo));
    let mut rule = Vec::with_capacity((edges.len() - 1) * PANEL_ORDER);
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (xi, wi) in x.iter().zip(&w) {
            rule.push((mid + half * xi, half * wi));
        }
    }
    rule
}

/// Base panel count for time `t` over an interval of length `len`:
/// `max(64, ⌈8t⌉)` per `2π`, plus room for an extra frequency `kmax` carried
/// by the amplitude.
pub fn base_panels(t: f64, len: f64, kmax: f64) -> usize {
    let per_period = 64f64.max((8.0 * t).ceil()) + (2.0 * kmax).ceil();
    ((per_period * len / (2.0 * PI)).ceil() as usize).max(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeConvention {
    /// `h' = 2 sin θ - a`, `h'' = 2 cos θ`.
    Exact,
    /// `h' = 4 sin θ - a`, `h'' = 4 cos θ`, the normalization under which
    /// `(h')² + (h'')² = 16 - 8a sin θ + a²`.
    Doubled,
}

/// `h(θ) = 2 - 2cos θ - aθ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSpec {
    pub a: f64,
}

impl PhaseSpec {
    pub fn new(a: f64) -> Self {
        Self { a }
    }

    pub fn h(&self, theta: f64) -> f64 {
        2.0 - 2.0 * theta.cos() - self.a * theta
    }

    pub fn dh(&self, theta: f64, conv: DerivativeConvention) -> f64 {
        match conv {
            DerivativeConvention::Exact => 2.0 * theta.sin() - self.a,
            DerivativeConvention::Doubled => 4.0 * theta.sin() - self.a,
        }
    }

    pub fn d2h(&self, theta: f64, conv: DerivativeConvention) -> f64 {
        match conv {
            DerivativeConvention::Exact => 2.0 * theta.cos(),
            DerivativeConvention::Doubled => 4.0 * theta.cos(),
        }
    }

    pub fn d3h(&self, theta: f64) -> f64 {
        -2.0 * theta.sin()
    }

    /// Solutions of `2 sin θ = a` in `[-π, π]`; for `a = ±2` the single
    /// degenerate point `±π/2`.
    pub fn stationary_points(&self) -> Vec<f64> {
        let s = self.a / 2.0;
        if s.abs() > 1.0 {
            return Vec::new();
        }
        let base = s.asin();
        let mut pts = vec![base, PI.copysign(base) - base];
        if base == 0.0 {
            pts = vec![0.0, PI, -PI];
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        pts
    }
}

/// `S(x) = φ(x) / (φ(x) + φ(1-x))` with `φ(x) = e^{-1/x}` for `x > 0`:
/// `0` for `x ≤ 0`, `1` for `x ≥ 1`, smooth in between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Smooth partition `χ₀ + χ = 1` on `[-π, π]`: `χ₀ = 1` within `θ₀/2` of
/// `{0, ±π}` and vanishes beyond `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffPair {
    pub theta0: f64,
}

/// Clamps `theta0` into `(0, π/4]`.
pub fn build_cutoffs(theta0: f64) -> CutoffPair {
    let max = PI / 4.0;
    let theta0 = if theta0.is_nan() || theta0 <= 0.0 || theta0 > max {
        log::warn!("theta0 = {theta0} outside (0, pi/4]; using pi/4");
        max
    } else {
        theta0
    };
    CutoffPair { theta0 }
}

impl CutoffPair {
    /// Distance from `θ` to the nearest of `0, ±π`.
    fn edge_distance(theta: f64) -> f64 {
        let r = theta.rem_euclid(2.0 * PI);
        let r = if r > PI { 2.0 * PI - r } else { r };
        r.min(PI - r)
    }

    fn ramp(&self, theta: f64) -> f64 {
        let half = self.theta0 / 2.0;
        smooth_step((Self::edge_distance(theta) - half) / half)
    }

    pub fn chi0(&self, theta: f64) -> f64 {
        1.0 - self.ramp(theta)
    }

    pub fn chi(&self, theta: f64) -> f64 {
        self.ramp(theta)
    }

    /// Intervals of `[-π, π]` outside of which `χ₀` vanishes.
    pub fn chi0_support(&self) -> Vec<(f64, f64)> {
        let t = self.theta0;
        vec![(-PI, -PI + t), (-t, t), (PI - t, PI)]
    }

    /// Intervals of `[-π, π]` outside of which `χ` vanishes.
    pub fn chi_support(&self) -> Vec<(f64, f64)> {
        let h = self.theta0 / 2.0;
        vec![(-PI + h, -h), (h, PI - h)]
    }
}

/// Energy cutoff `χ₁(ω)`: `1` for `ω ≤ 1`, `0` for `ω ≥ 3`.
pub fn energy_cutoff(omega: f64) -> f64 {
    smooth_step((3.0 - omega) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_doublings: u32,
    /// Largest frequency `k` carried by the amplitude, e.g. `e^{ikθ}`.
    pub kmax: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_doublings: 4,
            kmax: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatoryResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
    pub panels: usize,
}

/// `∫_lo^hi e^{i t h(θ)} g(θ) dθ` with default tolerances.
pub fn oscillatory_integral(
    t: f64,
    phase: &PhaseSpec,
    g: impl Fn(f64) -> Complex64,
    interval: (f64, f64),
) -> OscillatoryResult {
    oscillatory_integral_with(t, phase, g, interval, &QuadratureOptions::default())
}

/// Panel quadrature doubled until successive values agree. Stationary
/// points of `h` are mandatory panel boundaries.
pub fn oscillatory_integral_with(
    t: f64,
    phase: &PhaseSpec,
    g: impl Fn(f64) -> Complex64,
    interval: (f64, f64),
    opts: &QuadratureOptions,
) -> OscillatoryResult {
    let (lo, hi) = interval;
    let breaks = phase.stationary_points();
    let integrate = |panels: usize| {
        let rule = panel_rule(lo, hi, panels, &breaks);
        let mut terms = Vec::with_capacity(rule.len());
        let mut magnitude = 0.0;
        for (x, w) in rule {
            let v = g(x) * Complex64::cis(t * phase.h(x)) * w;
            magnitude += v.norm();
            terms.push(v);
        }
        (crate::lattice::complex_sum(&terms), magnitude)
    };
    let mut panels = base_panels(t, hi - lo, opts.kmax);
    let (mut prev, _) = integrate(panels);
    let mut best = OscillatoryResult {
        value: prev,
        error_estimate: f64::INFINITY,
        converged: false,
        panels,
    };
    for _ in 0..opts.max_doublings {
        panels *= 2;
        let (next, magnitude) = integrate(panels);
        let diff = (next - prev).norm();
        let noise = 16.0 * f64::EPSILON * magnitude;
        best = OscillatoryResult {
            value: next,
            error_estimate: diff.max(noise),
            converged: diff <= opts.abs_tol.max(opts.rel_tol * next.norm()).max(noise),
            panels,
        };
        if best.converged {
            break;
        }
        prev = next;
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupResult {
    pub sup: f64,
    pub argmax_a: f64,
    pub error_estimate: f64,
}

/// `max_a |∫_{-π}^{π} e^{i t (2 - 2cos θ - aθ)} g(θ) dθ|` over `a_grid`.
///
/// The amplitude `g·e^{it(2-2cos θ)}` is tabulated once on the panel rule
/// (for `|a| ≤ 4`, `8t` panels leave under one oscillation per panel); the factors `e^{-itaθ}` are advanced along
/// the grid by rotation when the grid is uniform. The error estimate is the
/// change of the sup under one panel doubling.
pub fn sup_over_a_decay(t: f64, g: impl Fn(f64) -> f64, a_grid: &[f64]) -> SupResult {
    let panels = base_panels(t, 2.0 * PI, 0.0);
    let coarse = sup_on_rule(t, &g, a_grid, &panel_rule(-PI, PI, panels, &[0.0]));
    let fine = sup_on_rule(t, &g, a_grid, &panel_rule(-PI, PI, 2 * panels, &[0.0]));
    SupResult {
        sup: fine.0,
        argmax_a: fine.1,
        error_estimate: (fine.0 - coarse.0).abs(),
    }
}

fn sup_on_rule(t: f64, g: &impl Fn(f64) -> f64, a_grid: &[f64], rule: &[(f64, f64)]) -> (f64, f64) {
    let nodes: Vec<(f64, Complex64)> = rule
        .iter()
        .filter_map(|&(x, w)| {
            let gx = g(x);
            (gx != 0.0).then(|| (x, Complex64::cis(t * (2.0 - 2.0 * x.cos())) * gx * w))
        })
        .collect();
    if a_grid.is_empty() {
        return (0.0, f64::NAN);
    }
    let uniform = a_grid.len() > 2 && {
        let step = a_grid[1] - a_grid[0];
        a_grid
            .windows(2)
            .all(|p| ((p[1] - p[0]) - step).abs() <= 1e-12 * step.abs().max(1e-300))
    };
    let mut sums = vec![Complex64::new(0.0, 0.0); a_grid.len()];
    if uniform {
        let step = a_grid[1] - a_grid[0];
        const RESEED: usize = 256;
        for &(x, amp) in &nodes {
            let rot = Complex64::cis(-t * step * x);
            let mut p = Complex64::new(0.0, 0.0);
            for (k, (s, &a)) in sums.iter_mut().zip(a_grid).enumerate() {
                if k % RESEED == 0 {
                    p = amp * Complex64::cis(-t * a * x);
                }
                *s += p;
                p *= rot;
            }
        }
    } else {
        for &(x, amp) in &nodes {
            for (s, &a) in sums.iter_mut().zip(a_grid) {
                *s += amp * Complex64::cis(-t * a * x);
            }
        }
    }
    let (k, sup) = sums
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, 0.0), |best, (k, v)| if v > best.1 { (k, v) } else { best });
    (sup, a_grid[k])
}

/// The uniform grid `a_k = lo + k·step` built from integer multiples, so that
/// points like `a = 2` are represented exactly.
pub fn uniform_a_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let scale = (1.0 / step).round();
    let (k0, k1) = ((lo * scale).round() as i64, (hi * scale).round() as i64);
    (k0..=k1).map(|k| k as f64 / scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        for deg in 0..32 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn constant_integrand_at_time_zero() {
        let r = oscillatory_integral(0.0, &PhaseSpec::new(0.0), |_| Complex64::new(1.0, 0.0), (-PI, PI));
        assert!((r.value - Complex64::new(2.0 * PI, 0.0)).norm() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn cutoff_examples() {
        let c = build_cutoffs(PI / 4.0);
        assert_eq!(c.chi0(0.0), 1.0);
        assert_eq!(c.chi(0.0), 0.0);
        assert_eq!(c.chi0(PI / 2.0), 0.0);
        assert_eq!(c.chi(PI / 2.0), 1.0);
        let mut worst = 0.0f64;
        for k in 0..=10_000 {
            let th = -PI + 2.0 * PI * k as f64 / 10_000.0;
            worst = worst.max((c.chi0(th) + c.chi(th) - 1.0).abs());
            let d = th.abs().min(PI - th.abs());
            if d > PI / 4.0 {
                assert_eq!(c.chi0(th), 0.0);
            }
            if d < PI / 8.0 {
                assert_eq!(c.chi(th), 0.0);
            }
        }
        assert!(worst <= 1e-12);
        assert_eq!(build_cutoffs(1.2).theta0, PI / 4.0);
        assert_eq!(build_cutoffs(-1.0).theta0, PI / 4.0);
    }

    #[test]
    fn doubled_derivative_bound_on_chi0_support() {
        let c = build_cutoffs(PI / 4.0);
        let conv = DerivativeConvention::Doubled;
        for ai in -400..=400 {
            let p = PhaseSpec::new(ai as f64 / 50.0);
            for k in 0..=2000 {
                let th = -PI + 2.0 * PI * k as f64 / 2000.0;
                if c.chi0(th) > 0.0 {
                    let v = p.dh(th, conv).powi(2) + p.d2h(th, conv).powi(2);
                    assert!(v >= 8.0 - 1e-9, "a {} theta {th}: {v}", p.a);
                }
            }
        }
    }

    #[test]
    fn stationary_points() {
        let p = PhaseSpec::new(2.0);
        assert_eq!(p.stationary_points(), vec![PI / 2.0]);
        let p = PhaseSpec::new(1.0);
        let pts = p.stationary_points();
        assert_eq!(pts.len(), 2);
        for x in pts {
            assert!(p.dh(x, DerivativeConvention::Exact).abs() < 1e-15);
        }
        assert!(PhaseSpec::new(2.5).stationary_points().is_empty());
    }

    #[test]
    fn energy_cutoff_limits() {
        assert_eq!(energy_cutoff(0.0), 1.0);
        assert_eq!(energy_cutoff(1.0), 1.0);
        assert_eq!(energy_cutoff(3.0), 0.0);
        assert!(energy_cutoff(2.0) > 0.0 && energy_cutoff(2.0) < 1.0);
    }

    #[test]
    fn uniform_grid_hits_two_exactly() {
        let g = uniform_a_grid(-4.0, 4.0, 0.01);
        assert_eq!(g.len(), 801);
        assert!(g.contains(&2.0) && g.contains(&-2.0));
    }

    #[test]
    fn sup_at_time_zero_is_integral() {
        let c = build_cutoffs(PI / 4.0);
        let r = sup_over_a_decay(0.0, |x| c.chi0(x), &[-1.0, 0.0, 1.0]);
        let direct = oscillatory_integral(0.0, &PhaseSpec::new(0.0), |x| Complex64::new(c.chi0(x), 0.0), (-PI, PI));
        assert!((r.sup - direct.value.re).abs() < 1e-12);
    }

    #[test]
    fn sup_matches_individual_integrals() {
        let c = build_cutoffs(PI / 4.0);
        let grid = uniform_a_grid(-1.0, 1.0, 0.25);
        let r = sup_over_a_decay(30.0, |x| c.chi(x), &grid);
        let direct = grid
            .iter()
            .map(|&a| {
                oscillatory_integral(30.0, &PhaseSpec::new(a), |x| Complex64::new(c.chi(x), 0.0), (-PI, PI))
                    .value
                    .norm()
            })
            .fold(0.0, f64::max);
        assert!((r.sup - direct).abs() < 1e-10);
    }
}
