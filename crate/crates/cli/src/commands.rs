//! One function per subcommand.

use num_complex::Complex64;
use serde::Serialize;

use lattice_spectral::edge::{resolve_branch, Side, SpectralPoint};
use lattice_spectral::ensemble::random_ensemble;
use lattice_spectral::evolution::loglog_fit;
use lattice_spectral::oscillatory::uniform_a_grid;
use lattice_spectral::resolvent::{resolvent_kernel_jost_at, t0_genericity, zero_energy_green_kernel};
use lattice_spectral::{
    build_cutoffs, decay_series, discrete_spectrum, evolve_ac_kernel, free_resolvent_kernel, is_generic, jost_pair,
    scattering_coeffs, sup_over_a_decay, DecayOptions, KernelNorm, LatticeKernel, LatticeWindow,
};

use crate::config::{CutoffKind, RunConfig};
use crate::output::{num, Artifacts};
use crate::CliError;

type CmdResult = Result<(), CliError>;

/// `-0.0` prints as `-0.0` in JSON.
fn clean(x: f64) -> f64 {
    x + 0.0
}

#[derive(Serialize)]
struct GenericitySummary {
    generic: bool,
    w0: f64,
    v_pairing: f64,
    t0_generic: bool,
    t0_nonsingular: bool,
    t0_condition: f64,
    t0_pairing: f64,
    agree: bool,
}

pub fn genericity(cfg: &RunConfig, out: &mut Artifacts) -> CmdResult {
    let v = &cfg.potential;
    let g = is_generic(v);
    let t = t0_genericity(v);
    out.json(
        "genericity.json",
        &GenericitySummary {
            generic: g.flag,
            w0: clean(g.w0),
            v_pairing: clean(g.v_pairing),
            t0_generic: t.flag,
            t0_nonsingular: t.nonsingular,
            t0_condition: t.condition,
            t0_pairing: clean(t.pairing),
            agree: g.flag == t.flag,
        },
    )?;

    let (s, e) = v.support_or_origin();
    let window = LatticeWindow::new(s - 1, e + 1)?;
    let mut rows = Vec::with_capacity(cfg.thetas.len());
    for &theta in &cfg.thetas {
        let sc = scattering_coeffs(v, theta)?;
        let w = jost_pair(v, &SpectralPoint::from_theta(Complex64::new(theta, 0.0)), window)?.wronskian;
        rows.push(vec![theta, sc.a.re, sc.a.im, sc.b.re, sc.b.im, w.re, w.im]);
    }
    out.csv("scattering.csv", &["theta", "a_re", "a_im", "b_re", "b_im", "w_re", "w_im"], rows)?;

    if cfg.ensemble > 0 {
        let ens = random_ensemble(cfg.seed, cfg.ensemble);
        let rows = ens
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let (g, t) = (is_generic(v), t0_genericity(v));
                let values: Vec<String> = v.values().iter().map(|x| num(*x)).collect();
                vec![
                    k.to_string(),
                    v.offset().to_string(),
                    values.join(" "),
                    g.flag.to_string(),
                    t.flag.to_string(),
                    num(g.w0),
                ]
            });
        out.csv("ensemble.csv", &["index", "offset", "values", "generic", "t0_generic", "w0"], rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumSummary {
    eigenvalues: Vec<f64>,
    window: i64,
}

pub fn spectrum(cfg: &RunConfig, out: &mut Artifacts) -> CmdResult {
    let d = discrete_spectrum(&cfg.potential, LatticeWindow::symmetric(cfg.window))?;
    out.json(
        "spectrum.json",
        &SpectrumSummary {
            eigenvalues: d.eigenvalues(),
            window: cfg.window,
        },
    )
}

#[derive(Serialize)]
struct ResolventSummary {
    generic: bool,
    /// `R⁺(ω) - R(0)` scaled by `ω^{-1/2}` when generic, else `R⁺(ω)` scaled by `ω^{1/2}`.
    edge_mode: &'static str,
    edge_spread: f64,
    max_step_ratio: f64,
}

fn diff_norm(a: &LatticeKernel, b: &LatticeKernel, norm: KernelNorm) -> f64 {
    LatticeKernel::from_matrix(a.window(), a.matrix() - b.matrix())
        .expect("same window")
        .norm(norm)
}

pub fn resolvent(cfg: &RunConfig, out: &mut Artifacts) -> CmdResult {
    let v = &cfg.potential;
    let w = LatticeWindow::symmetric(cfg.window);
    let norm = KernelNorm::WeightedOperator(cfg.sigma);

    let mut lap = Vec::new();
    let mut max_step = 0.0f64;
    for &omega in &cfg.omegas {
        let rplus = resolvent_kernel_jost_at(v, &resolve_branch(Complex64::new(omega, 0.0), Side::Plus)?, w)?;
        let mut prev: Option<f64> = None;
        for k in cfg.eps_exponents.0..=cfg.eps_exponents.1 {
            let eps = 0.5f64.powi(k);
            let pt = resolve_branch(Complex64::new(omega, eps), Side::OffAxis)?;
            let d = diff_norm(&resolvent_kernel_jost_at(v, &pt, w)?, &rplus, norm);
            if let Some(p) = prev {
                max_step = max_step.max(d / p);
            }
            prev = Some(d);
            lap.push(vec![omega, eps, d]);
        }
    }
    out.csv("limiting_absorption.csv", &["omega", "eps", "norm"], lap)?;

    let generic = is_generic(v).flag;
    let r0 = if generic { Some(zero_energy_green_kernel(v, w)?) } else { None };
    let mut edge = Vec::new();
    for &omega in &cfg.edge_omegas {
        let pt = resolve_branch(Complex64::new(omega, 0.0), Side::Plus)?;
        let rplus = if v.is_zero() {
            free_resolvent_kernel(&pt, w)?
        } else {
            resolvent_kernel_jost_at(v, &pt, w)?
        };
        let (n, scaled) = match &r0 {
            Some(r0) => {
                let n = diff_norm(&rplus, r0, norm);
                (n, n / omega.sqrt())
            }
            None => {
                let n = rplus.norm(norm);
                (n, n * omega.sqrt())
            }
        };
        edge.push(vec![omega, n, scaled]);
    }
    let scaled: Vec<f64> = edge.iter().map(|r| r[2]).collect();
    let spread = scaled.iter().copied().fold(f64::MIN, f64::max) / scaled.iter().copied().fold(f64::MAX, f64::min);
    out.csv("puiseux.csv", &["omega", "norm", "scaled"], edge)?;

    out.json(
        "resolvent.json",
        &ResolventSummary {
            generic,
            edge_mode: if generic { "difference_over_sqrt_omega" } else { "sqrt_omega_times_norm" },
            edge_spread: spread,
            max_step_ratio: max_step,
        },
    )
}

#[derive(Serialize)]
struct EvolveSummary {
    times: Vec<f64>,
    files: Vec<String>,
    max_abs: Vec<f64>,
}

pub fn evolve(cfg: &RunConfig, out: &mut Artifacts) -> CmdResult {
    let w = LatticeWindow::symmetric(cfg.observation);
    let mut summary = EvolveSummary {
        times: cfg.times.clone(),
        files: Vec::new(),
        max_abs: Vec::new(),
    };
    for (k, &t) in cfg.times.iter().enumerate() {
        let kernel = evolve_ac_kernel(&cfg.potential, t, w)?.kernel;
        let name = format!("kernel_{k:03}.csv");
        let rows = w.sites().flat_map(|n| {
            let kernel = &kernel;
            w.sites().map(move |m| {
                let z = kernel.get(n, m);
                vec![n.to_string(), m.to_string(), num(z.re), num(z.im)]
            })
        });
        out.csv(&name, &["n", "m", "re", "im"], rows)?;
        summary.files.push(name);
        summary.max_abs.push(kernel.max_abs());
    }
    out.json("evolve.json", &summary)
}

#[derive(Serialize)]
struct DecaySummary {
    slope: f64,
    intercept: f64,
    constant: f64,
    fit_window: (f64, f64),
    residual: f64,
}

pub fn decay_fit(cfg: &RunConfig, out: &mut Artifacts) -> CmdResult {
    let opts = DecayOptions {
        window: cfg.window,
        observation: DecayOptions::for_times(0.0).observation.min(cfg.window),
        fit_min: cfg.fit_min,
        ..DecayOptions::for_times(0.0)
    };
    let s = decay_series(&cfg.potential, cfg.sigma, &cfg.times, cfg.norm, &opts)?;
    let kind = serde_json::to_value(s.kind).expect("serializable");
    let kind = kind.as_str().expect("unit variant");
    let rows = s
        .times
        .iter()
        .zip(&s.norms)
        .map(|(t, n)| vec![num(*t), num(*n), kind.to_string(), num(s.sigma)]);
    out.csv("decay.csv", &["t", "norm", "kind", "sigma"], rows)?;
    out.json(
        "decay.json",
        &DecaySummary {
            slope: s.slope,
            intercept: s.intercept,
            constant: s.constant(),
            fit_window: s.fit_window,
            residual: s.residual,
        },
    )
}

#[derive(Serialize)]
struct OscillatorySummary {
    cutoff: CutoffKind,
    slope: f64,
}

pub fn oscillatory(cfg: &RunConfig, out: &mut Artifacts) -> CmdResult {
    let cutoffs = build_cutoffs(cfg.theta0);
    let grid = uniform_a_grid(cfg.a_range.0, cfg.a_range.1, cfg.a_step);
    let mut rows = Vec::with_capacity(cfg.times.len());
    let mut sups = Vec::with_capacity(cfg.times.len());
    for &t in &cfg.times {
        let r = match cfg.cutoff {
            CutoffKind::Chi0 => sup_over_a_decay(t, |x| cutoffs.chi0(x), &grid),
            CutoffKind::Chi => sup_over_a_decay(t, |x| cutoffs.chi(x), &grid),
        };
        sups.push(r.sup);
        rows.push(vec![t, r.argmax_a, r.sup, r.error_estimate]);
    }
    out.csv("oscillatory.csv", &["t", "a", "abs_i", "err_estimate"], rows)?;
    let slope = if cfg.times.len() >= 2 && cfg.times.iter().all(|t| *t > 0.0) {
        loglog_fit(&cfg.times, &sups).0
    } else {
        f64::NAN
    };
    out.json("oscillatory.json", &OscillatorySummary { cutoff: cfg.cutoff, slope })
}
