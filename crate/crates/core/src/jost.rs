//! Jost solutions of `ψ_{n+1} + ψ_{n-1} + (ω - 2)ψ_n = V_n ψ_n`.
//!
//! With `μ = e^{-iθ}` and `g_k = (1 - μ^{2k}) / (2i sin θ)`,
//!
//! ```text
//! f⁺_n = 1 + Σ_{m>n} g_{m-n} V_m f⁺_m,   ψ⁺_n = μ^n f⁺_n,
//! f⁻_n = 1 + Σ_{m<n} g_{n-m} V_m f⁻_m,   ψ⁻_n = μ^{-n} f⁻_n.
//! ```
//!
//! The `m = n` term has a zero coefficient, so for compactly supported `V`
//! both equations are explicit recursions. `g_k` is generated by
//! `g_{k+1} = (1 + μ²) g_k - μ² g_{k-1}`, which stays finite at the band
//! edges where `g_k = ±k`.

use num_complex::Complex64;
use serde::Serialize;

use crate::edge::SpectralPoint;
use crate::error::{Error, Result};
use crate::lattice::{complex_sum, LatticeSeq, LatticeWindow, Potential};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Genericity tolerance on `|W(0)|`, relative to `1 + ‖V‖_{ℓ¹₁}`.
pub const TOL_GENERIC: f64 = 1e-8;

/// Tables `g_k` and `∂_θ g_k` for `k = 0..len`.
pub(crate) fn green_tables(mu: Complex64, len: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mu2 = mu * mu;
    let c = ONE + mu2;
    let dmu2 = -2.0 * I * mu2;
    let mut g = vec![ZERO; len.max(2)];
    let mut d = vec![ZERO; len.max(2)];
    g[1] = mu;
    d[1] = -I * mu;
    for k in 1..g.len() - 1 {
        g[k + 1] = c * g[k] - mu2 * g[k - 1];
        d[k + 1] = c * d[k] - mu2 * d[k - 1] + dmu2 * (g[k] - g[k - 1]);
    }
    g.truncate(len);
    d.truncate(len);
    (g, d)
}

fn check_theta(pt: &SpectralPoint) -> Result<()> {
    if pt.is_edge() || pt.sin_theta().norm() < 1e-14 {
        return Err(Error::EdgeSingularity {
            lambda: pt.lambda.re,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct JostData {
    pub theta: Complex64,
    pub mu: Complex64,
    pub psi_plus: LatticeSeq,
    pub psi_minus: LatticeSeq,
    pub f_plus: LatticeSeq,
    pub f_minus: LatticeSeq,
    pub df_plus: LatticeSeq,
    pub df_minus: LatticeSeq,
    pub wronskian: Complex64,
}

impl JostData {
    /// `ψ⁺_n ψ⁻_{n+1} - ψ⁺_{n+1} ψ⁻_n` evaluated at `n`.
    pub fn wronskian_at(&self, n: i64) -> Complex64 {
        self.psi_plus.get(n) * self.psi_minus.get(n + 1) - self.psi_plus.get(n + 1) * self.psi_minus.get(n)
    }
}

/// Jost solutions and their `θ`-derivatives on `window`.
pub fn jost_pair(v: &Potential, pt: &SpectralPoint, window: LatticeWindow) -> Result<JostData> {
    check_theta(pt)?;
    v.check_window(&window)?;
    let mu = pt.mu;
    let (g, d) = green_tables(mu, window.len() + 1);
    let len = window.len();
    let mut f_plus = vec![ONE; len];
    let mut df_plus = vec![ZERO; len];
    let mut f_minus = vec![ONE; len];
    let mut df_minus = vec![ZERO; len];

    if let Some((s, e)) = v.support() {
        let (is, ie) = (window.index(s).unwrap(), window.index(e).unwrap());
        for i in (0..ie).rev() {
            let lo = (i + 1).max(is);
            let mut f_terms = Vec::with_capacity(ie + 1 - lo);
            let mut d_terms = Vec::with_capacity(2 * (ie + 1 - lo));
            for j in lo..=ie {
                let vm = v.at(window.site(j));
                f_terms.push(g[j - i] * vm * f_plus[j]);
                d_terms.push(d[j - i] * vm * f_plus[j]);
                d_terms.push(g[j - i] * vm * df_plus[j]);
            }
            f_plus[i] = ONE + complex_sum(&f_terms);
            df_plus[i] = complex_sum(&d_terms);
        }
        for i in is + 1..len {
            let hi = (i - 1).min(ie);
            let mut f_terms = Vec::with_capacity(hi + 1 - is);
            let mut d_terms = Vec::with_capacity(2 * (hi + 1 - is));
            for j in is..=hi {
                let vm = v.at(window.site(j));
                f_terms.push(g[i - j] * vm * f_minus[j]);
                d_terms.push(d[i - j] * vm * f_minus[j]);
                d_terms.push(g[i - j] * vm * df_minus[j]);
            }
            f_minus[i] = ONE + complex_sum(&f_terms);
            df_minus[i] = complex_sum(&d_terms);
        }
    }

    let psi_plus: Vec<Complex64> = (0..len).map(|i| mu.powi(window.site(i) as i32) * f_plus[i]).collect();
    let psi_minus: Vec<Complex64> = (0..len).map(|i| mu.powi(-(window.site(i) as i32)) * f_minus[i]).collect();

    let a_prime = complex_sum(
        &v.iter()
            .map(|(m, vm)| vm * f_minus[window.index(m).unwrap()])
            .collect::<Vec<_>>(),
    );
    let wronskian = 2.0 * I * pt.sin_theta() + a_prime;

    let seq = |values: Vec<Complex64>| LatticeSeq::from_values(window, values).expect("window length");
    Ok(JostData {
        theta: pt.theta,
        mu,
        psi_plus: seq(psi_plus),
        psi_minus: seq(psi_minus),
        f_plus: seq(f_plus),
        f_minus: seq(f_minus),
        df_plus: seq(df_plus),
        df_minus: seq(df_minus),
        wronskian,
    })
}

/// Jost data restricted to the support `[s, e]` of `V`, together with the
/// moments that determine `ψ±` outside it:
///
/// ```text
/// n ≤ s:  ψ⁺_n = α μ^n + β μ^{-n},   α = 1 + A/(2i sin θ),  β = -B/(2i sin θ)
/// n ≥ e:  ψ⁻_n = a μ^n + b μ^{-n},   a = -B'/(2i sin θ),    b = W/(2i sin θ)
/// ```
///
/// with `A = Σ V f⁺`, `B = Σ V f⁺ μ^{2m}`, `A' = Σ V f⁻`, `B' = Σ V f⁻ μ^{-2m}`
/// and `W = 2i sin θ + A'`.
#[derive(Debug, Clone)]
pub struct SupportJost {
    pub mu: Complex64,
    pub sin_theta: Complex64,
    pub s: i64,
    pub e: i64,
    pub f_plus: Vec<Complex64>,
    pub f_minus: Vec<Complex64>,
    pub a_plus: Complex64,
    pub b_plus: Complex64,
    pub a_minus: Complex64,
    pub b_minus: Complex64,
    pub wronskian: Complex64,
}

impl SupportJost {
    /// Works for any `θ`, including the band edges.
    pub fn new(v: &Potential, pt: &SpectralPoint) -> Self {
        let (s, e) = v.support_or_origin();
        let w = (e - s + 1) as usize;
        let mu = pt.mu;
        let (g, _) = green_tables(mu, w + 1);
        let vals: Vec<f64> = (s..=e).map(|n| v.at(n)).collect();
        let mut f_plus = vec![ONE; w];
        let mut f_minus = vec![ONE; w];
        for i in (0..w).rev() {
            let terms: Vec<Complex64> = (i + 1..w).map(|j| g[j - i] * vals[j] * f_plus[j]).collect();
            f_plus[i] = ONE + complex_sum(&terms);
        }
        for i in 0..w {
            let terms: Vec<Complex64> = (0..i).map(|j| g[i - j] * vals[j] * f_minus[j]).collect();
            f_minus[i] = ONE + complex_sum(&terms);
        }
        let mu2 = mu * mu;
        let mu2_s = mu2.powi(s as i32);
        let moments = |f: &[Complex64], ratio: Complex64, start: Complex64| {
            let mut p = start;
            let mut plain = Vec::with_capacity(w);
            let mut weighted = Vec::with_capacity(w);
            for j in 0..w {
                plain.push(vals[j] * f[j]);
                weighted.push(vals[j] * f[j] * p);
                p *= ratio;
            }
            (complex_sum(&plain), complex_sum(&weighted))
        };
        let (a_plus, b_plus) = moments(&f_plus, mu2, mu2_s);
        let (a_minus, b_minus) = moments(&f_minus, mu2.inv(), mu2_s.inv());
        let sin_theta = pt.sin_theta();
        Self {
            mu,
            sin_theta,
            s,
            e,
            f_plus,
            f_minus,
            a_plus,
            b_plus,
            a_minus,
            b_minus,
            wronskian: 2.0 * I * sin_theta + a_minus,
        }
    }

    /// `ψ⁺_n` for `n ∈ [s, e]`.
    pub fn psi_plus_in(&self, n: i64) -> Complex64 {
        self.mu.powi(n as i32) * self.f_plus[(n - self.s) as usize]
    }

    /// `ψ⁻_n` for `n ∈ [s, e]`.
    pub fn psi_minus_in(&self, n: i64) -> Complex64 {
        self.mu.powi(-(n as i32)) * self.f_minus[(n - self.s) as usize]
    }

    /// `α sin θ = sin θ - iA/2`.
    pub fn alpha_scaled(&self) -> Complex64 {
        self.sin_theta - I * self.a_plus / 2.0
    }

    /// `β sin θ = iB/2`.
    pub fn beta_scaled(&self) -> Complex64 {
        I * self.b_plus / 2.0
    }

    /// `a sin θ = iB'/2`.
    pub fn a_scaled(&self) -> Complex64 {
        I * self.b_minus / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroEnergyJost {
    pub window: LatticeWindow,
    pub psi_plus: Vec<f64>,
    pub psi_minus: Vec<f64>,
    /// `⟨V, ψ⁺⟩`.
    pub pairing_plus: f64,
    /// `⟨V, ψ⁻⟩`.
    pub pairing_minus: f64,
}

impl ZeroEnergyJost {
    pub fn plus(&self, n: i64) -> f64 {
        self.psi_plus[self.window.index(n).expect("site outside window")]
    }

    pub fn minus(&self, n: i64) -> f64 {
        self.psi_minus[self.window.index(n).expect("site outside window")]
    }
}

/// The bounded solutions at `θ = 0`:
/// `ψ⁺_n = 1 + Σ_{m>n} (m-n) V_m ψ⁺_m` and `ψ⁻_n = 1 + Σ_{m<n} (n-m) V_m ψ⁻_m`.
pub fn zero_energy_jost(v: &Potential, window: LatticeWindow) -> Result<ZeroEnergyJost> {
    v.check_window(&window)?;
    let len = window.len();
    let mut plus = vec![1.0; len];
    let mut minus = vec![1.0; len];
    let support: Vec<(usize, f64)> = v.iter().map(|(m, vm)| (window.index(m).unwrap(), vm)).collect();
    if let (Some(&(is, _)), Some(&(ie, _))) = (support.first(), support.last()) {
        for i in (0..ie).rev() {
            let terms = support
                .iter()
                .filter(|(j, _)| *j > i)
                .map(|&(j, vm)| (j - i) as f64 * vm * plus[j]);
            plus[i] = 1.0 + crate::linalg::neumaier_sum(terms);
        }
        for i in is + 1..len {
            let terms = support
                .iter()
                .filter(|(j, _)| *j < i)
                .map(|&(j, vm)| (i - j) as f64 * vm * minus[j]);
            minus[i] = 1.0 + crate::linalg::neumaier_sum(terms);
        }
    }
    let pair = |psi: &[f64]| crate::linalg::neumaier_sum(support.iter().map(|&(j, vm)| vm * psi[j]));
    Ok(ZeroEnergyJost {
        window,
        pairing_plus: pair(&plus),
        pairing_minus: pair(&minus),
        psi_plus: plus,
        psi_minus: minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringData {
    pub theta: f64,
    pub a: Complex64,
    pub b: Complex64,
}

/// Coefficients of `ψ⁻(θ) = a(θ) ψ⁺(θ) + b(θ) ψ⁺(-θ)`.
pub fn scattering_coeffs(v: &Potential, theta: f64) -> Result<ScatteringData> {
    let pt = SpectralPoint::from_theta(Complex64::new(theta, 0.0));
    check_theta(&pt)?;
    let sj = SupportJost::new(v, &pt);
    let two_i_sin = 2.0 * I * sj.sin_theta;
    Ok(ScatteringData {
        theta,
        a: -sj.b_minus / two_i_sin,
        b: sj.wronskian / two_i_sin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Genericity {
    pub flag: bool,
    /// `W[ψ⁺(0), ψ⁻(0)]`.
    pub w0: f64,
    /// `⟨V, ψ⁺(0)⟩`; equals `w0` for the normalization `ψ± → 1`.
    pub v_pairing: f64,
}

/// Whether `W(0) ≠ 0`, i.e. no bounded solution of `Hψ = 0` exists.
pub fn is_generic(v: &Potential) -> Genericity {
    let (s, e) = v.support_or_origin();
    let window = LatticeWindow::new(s - 1, e + 1).expect("non-empty window");
    let z = zero_energy_jost(v, window).expect("window contains support");
    let w0 = z.plus(e) * z.minus(e + 1) - z.plus(e + 1) * z.minus(e);
    Genericity {
        flag: w0.abs() > TOL_GENERIC * (1.0 + v.l1_weighted(1.0)),
        w0,
        v_pairing: z.pairing_plus,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JostBounds {
    pub f_plus: f64,
    pub f_minus: f64,
    pub df_plus: f64,
    pub df_minus: f64,
}

/// Sup over the `θ` grid of `‖f⁺‖_{ℓ∞(n ≥ 0)}`, `‖∂_θ f⁺‖_{ℓ∞(n ≥ 0)}` and the
/// mirrored quantities for `f⁻` on `n ≤ 0`.
pub fn jost_bounds(v: &Potential, thetas: &[f64], window: LatticeWindow) -> Result<JostBounds> {
    let mut b = JostBounds {
        f_plus: 0.0,
        f_minus: 0.0,
        df_plus: 0.0,
        df_minus: 0.0,
    };
    for &theta in thetas {
        let jd = jost_pair(v, &SpectralPoint::from_theta(Complex64::new(theta, 0.0)), window)?;
        for n in window.sites() {
            if n >= 0 {
                b.f_plus = b.f_plus.max(jd.f_plus.get(n).norm());
                b.df_plus = b.df_plus.max(jd.df_plus.get(n).norm());
            }
            if n <= 0 {
                b.f_minus = b.f_minus.max(jd.f_minus.get(n).norm());
                b.df_minus = b.df_minus.max(jd.df_minus.get(n).norm());
            }
        }
    }
    Ok(b)
}

/// Residual `max_n |ψ_{n+1} + ψ_{n-1} + (λ - 2 - V_n) ψ_n|` over the interior.
pub fn recurrence_residual(v: &Potential, lambda: Complex64, psi: &LatticeSeq) -> f64 {
    let window = psi.window();
    window
        .interior(1)
        .map(|n| (psi.get(n + 1) + psi.get(n - 1) + (lambda - 2.0 - v.at(n)) * psi.get(n)).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{resolve_branch, Side};
    use std::f64::consts::PI;

    fn pt(theta: f64) -> SpectralPoint {
        SpectralPoint::from_theta(Complex64::new(theta, 0.0))
    }

    #[test]
    fn green_table_matches_closed_form() {
        for theta in [-2.5, -0.3, 1.1] {
            let p = pt(theta);
            let (g, d) = green_tables(p.mu, 30);
            let h = 1e-6;
            for k in 0..30 {
                let closed = |t: f64| {
                    let m = pt(t).mu;
                    (ONE - m.powi(2 * k as i32)) / (2.0 * I * Complex64::new(t, 0.0).sin())
                };
                assert!((g[k] - closed(theta)).norm() < 1e-12 * (1.0 + k as f64));
                let fd = (closed(theta + h) - closed(theta - h)) / (2.0 * h);
                assert!((d[k] - fd).norm() < 1e-6 * (1.0 + (k * k) as f64));
            }
        }
        let (g, _) = green_tables(ONE, 10);
        assert!((g[7] - 7.0).norm() < 1e-14);
    }

    #[test]
    fn free_jost() {
        let w = LatticeWindow::symmetric(20);
        let p = pt(-0.8);
        let jd = jost_pair(&Potential::zero(), &p, w).unwrap();
        for n in w.sites() {
            assert_eq!(jd.f_plus.get(n), ONE);
            assert!((jd.psi_plus.get(n) - (-I * p.theta * n as f64).exp()).norm() < 1e-13);
        }
        assert!((jd.wronskian - 2.0 * I * p.theta.sin()).norm() < 1e-15);
    }

    #[test]
    fn single_site_hand_recursion() {
        let w = LatticeWindow::symmetric(10);
        let v = Potential::delta(0, -1.5);
        let p = resolve_branch(Complex64::new(2.0, 0.0), Side::Plus).unwrap();
        let jd = jost_pair(&v, &p, w).unwrap();
        for n in 0..=10 {
            assert_eq!(jd.f_plus.get(n), ONE);
        }
        assert!((jd.f_plus.get(-1) - Complex64::new(1.0, -1.5)).norm() < 1e-15);
    }

    #[test]
    fn recurrence_and_wronskian_constancy() {
        let w = LatticeWindow::symmetric(40);
        let v = Potential::new(-2, vec![0.4, -1.0, 0.0, 0.7, -0.3]).unwrap();
        for theta in [-3.0, -2.0, -PI / 2.0, -0.5, -0.01, 0.7] {
            let p = pt(theta);
            let jd = jost_pair(&v, &p, w).unwrap();
            let scale = jd.psi_plus.max_abs().max(jd.psi_minus.max_abs());
            assert!(recurrence_residual(&v, p.lambda, &jd.psi_plus) <= 1e-10 * scale);
            assert!(recurrence_residual(&v, p.lambda, &jd.psi_minus) <= 1e-10 * scale);
            for n in -40..40 {
                let dev = (jd.wronskian_at(n) - jd.wronskian).norm();
                assert!(dev <= 1e-10 * (1.0 + jd.wronskian.norm()), "theta {theta} n {n}: {dev}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let w = LatticeWindow::symmetric(15);
        let v = Potential::new(-1, vec![0.5, -1.2, 0.8]).unwrap();
        let h = 1e-6;
        for theta in [-2.2, -0.4] {
            let jd = jost_pair(&v, &pt(theta), w).unwrap();
            let up = jost_pair(&v, &pt(theta + h), w).unwrap();
            let dn = jost_pair(&v, &pt(theta - h), w).unwrap();
            for n in w.sites() {
                let fd = (up.f_plus.get(n) - dn.f_plus.get(n)) / (2.0 * h);
                assert!((fd - jd.df_plus.get(n)).norm() < 1e-6 * (1.0 + fd.norm()));
                let fd = (up.f_minus.get(n) - dn.f_minus.get(n)) / (2.0 * h);
                assert!((fd - jd.df_minus.get(n)).norm() < 1e-6 * (1.0 + fd.norm()));
            }
        }
    }

    #[test]
    fn support_jost_exterior_representation() {
        let w = LatticeWindow::symmetric(25);
        let v = Potential::new(-2, vec![0.4, -1.0, 0.0, 0.7, -0.3]).unwrap();
        for theta in [-2.9, -1.0, -0.05] {
            let p = pt(theta);
            let jd = jost_pair(&v, &p, w).unwrap();
            let sj = SupportJost::new(&v, &p);
            let two_i_sin = 2.0 * I * sj.sin_theta;
            let alpha = sj.alpha_scaled() / sj.sin_theta;
            let beta = sj.beta_scaled() / sj.sin_theta;
            let a = -sj.b_minus / two_i_sin;
            let b = sj.wronskian / two_i_sin;
            for n in -25..=sj.s {
                let rep = alpha * p.mu.powi(n as i32) + beta * p.mu.powi(-n as i32);
                assert!((rep - jd.psi_plus.get(n)).norm() < 1e-11 * (1.0 + rep.norm()));
            }
            for n in sj.e..=25 {
                let rep = a * p.mu.powi(n as i32) + b * p.mu.powi(-n as i32);
                assert!((rep - jd.psi_minus.get(n)).norm() < 1e-11 * (1.0 + rep.norm()));
            }
            for n in sj.s..=sj.e {
                assert!((sj.psi_plus_in(n) - jd.psi_plus.get(n)).norm() < 1e-12);
                assert!((sj.psi_minus_in(n) - jd.psi_minus.get(n)).norm() < 1e-12);
            }
            assert!((sj.wronskian - jd.wronskian).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_energy_single_site() {
        let w = LatticeWindow::symmetric(8);
        let z = zero_energy_jost(&Potential::delta(0, -1.5), w).unwrap();
        for n in -8..=8 {
            let expected = if n >= 0 { 1.0 } else { 1.0 + 1.5 * n as f64 };
            assert!((z.plus(n) - expected).abs() < 1e-15);
        }
        assert_eq!(z.pairing_plus, -1.5);
        let z = zero_energy_jost(&Potential::zero(), w).unwrap();
        assert!(z.psi_plus.iter().chain(&z.psi_minus).all(|x| *x == 1.0));
    }

    #[test]
    fn genericity_examples() {
        let g = is_generic(&Potential::zero());
        assert!(!g.flag);
        assert_eq!(g.w0, 0.0);

        let v = Potential::delta(0, -1.5);
        let g = is_generic(&v);
        assert!(g.flag);
        assert!((g.w0 + 1.5).abs() < 1e-15);
        // independent evaluation of the Wronskian at several sites
        let z = zero_energy_jost(&v, LatticeWindow::symmetric(6)).unwrap();
        for n in -5..5 {
            let w = z.plus(n) * z.minus(n + 1) - z.plus(n + 1) * z.minus(n);
            assert!((w + 1.5).abs() < 1e-13);
        }
    }

    #[test]
    fn two_site_resonance_by_root_finding() {
        let pairing = |x: f64| {
            let v = Potential::new(0, vec![x, x]).unwrap();
            zero_energy_jost(&v, LatticeWindow::symmetric(4)).unwrap().pairing_plus
        };
        let (mut lo, mut hi) = (-3.0, -1.0);
        assert!(pairing(lo).signum() != pairing(hi).signum());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pairing(mid).signum() == pairing(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v_res = 0.5 * (lo + hi);
        assert!((v_res + 2.0).abs() < 1e-12);
        assert!(!is_generic(&Potential::new(0, vec![v_res, v_res]).unwrap()).flag);
    }

    #[test]
    fn scattering_free_and_representation() {
        let s = scattering_coeffs(&Potential::zero(), -1.0).unwrap();
        assert!(s.a.norm() < 1e-15 && (s.b - ONE).norm() < 1e-15);

        let w = LatticeWindow::symmetric(20);
        let v = Potential::new(-1, vec![0.3, -1.5, 0.6]).unwrap();
        for theta in [-2.0, -PI / 2.0, -0.2] {
            let sc = scattering_coeffs(&v, theta).unwrap();
            let minus = jost_pair(&v, &pt(theta), w).unwrap();
            let plus = jost_pair(&v, &pt(theta), w).unwrap().psi_plus;
            let plus_reflected = jost_pair(&v, &pt(-theta), w).unwrap().psi_plus;
            let tol = 1e-10 * (1.0 + sc.a.norm() + sc.b.norm());
            for n in w.sites() {
                let rep = sc.a * plus.get(n) + sc.b * plus_reflected.get(n);
                assert!((minus.psi_minus.get(n) - rep).norm() <= tol);
            }
        }
        assert!(scattering_coeffs(&v, 0.0).is_err());
        assert!(scattering_coeffs(&v, -PI).is_err());
    }

    #[test]
    fn edge_theta_rejected() {
        let w = LatticeWindow::symmetric(5);
        let p = resolve_branch(Complex64::new(0.0, 0.0), Side::Plus).unwrap();
        assert!(matches!(jost_pair(&Potential::zero(), &p, w), Err(Error::EdgeSingularity { .. })));
    }

    #[test]
    fn bounds_are_finite_on_half_lines() {
        let v = Potential::new(-1, vec![0.3, -1.5, 0.6]).unwrap();
        let thetas: Vec<f64> = (1..20).map(|k| -0.7 * k as f64 / 20.0).collect();
        let b = jost_bounds(&v, &thetas, LatticeWindow::symmetric(200)).unwrap();
        assert!(b.f_plus.is_finite() && b.df_plus.is_finite());
        assert!(b.f_plus >= 1.0 && b.f_minus >= 1.0);
    }
}
