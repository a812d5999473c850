//! Lattice sequences, the operator `H = -Δ + V`, weighted norms and kernels.
//!
//! Everything lives on a finite window `[n_min, n_max]` of the integer
//! lattice. Entries outside the window are treated as zero (Dirichlet).

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{largest_singular_value, neumaier_sum};

/// A contiguous window of lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub n_min: i64,
    pub n_max: i64,
}

impl LatticeWindow {
    pub fn new(n_min: i64, n_max: i64) -> Result<Self> {
        if n_min >= n_max {
            return Err(Error::InvalidWindow { n_min, n_max });
        }
        Ok(Self { n_min, n_max })
    }

    /// The symmetric window `[-n, n]`.
    pub fn symmetric(n: i64) -> Self {
        assert!(n > 0, "symmetric window needs n > 0");
        Self { n_min: -n, n_max: n }
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.n_min && n <= self.n_max
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.n_min) as usize)
    }

    pub fn site(&self, i: usize) -> i64 {
        self.n_min + i as i64
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.n_min..=self.n_max
    }

    /// Half-width of a symmetric window; for asymmetric windows the smaller
    /// distance from the origin to an end.
    pub fn half_width(&self) -> i64 {
        (-self.n_min).min(self.n_max)
    }

    /// Sites at distance at least `margin` from both ends.
    pub fn interior(&self, margin: i64) -> impl Iterator<Item = i64> {
        (self.n_min + margin)..=(self.n_max - margin)
    }
}

/// A compactly supported real potential.
///
/// `offset` is the site of the first nonzero entry; leading and trailing
/// zeros are trimmed on construction so that `values` spans exactly the
/// support. The zero potential has an empty `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub struct Potential {
    offset: i64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPotential {
    offset: i64,
    values: Vec<f64>,
}

impl TryFrom<RawPotential> for Potential {
    type Error = Error;

    fn try_from(raw: RawPotential) -> Result<Self> {
        Potential::new(raw.offset, raw.values)
    }
}

impl From<Potential> for RawPotential {
    fn from(v: Potential) -> Self {
        RawPotential {
            offset: v.offset,
            values: v.values,
        }
    }
}

impl Potential {
    pub fn new(offset: i64, values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "potential entries must be finite, got {bad}"
            )));
        }
        let first = values.iter().position(|&x| x != 0.0);
        let Some(first) = first else {
            return Ok(Self::zero());
        };
        let last = values.iter().rposition(|&x| x != 0.0).unwrap();
        Ok(Self {
            offset: offset + first as i64,
            values: values[first..=last].to_vec(),
        })
    }

    pub fn zero() -> Self {
        Self {
            offset: 0,
            values: Vec::new(),
        }
    }

    /// `strength · δ_site`.
    pub fn delta(site: i64, strength: f64) -> Self {
        Self::new(site, vec![strength]).expect("finite strength")
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, n: i64) -> f64 {
        let i = n - self.offset;
        if i < 0 || i as usize >= self.values.len() {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// First and last nonzero site, `None` for the zero potential.
    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.values.is_empty())
            .then(|| (self.offset, self.offset + self.values.len() as i64 - 1))
    }

    /// Support, or the single site `0` for the zero potential.
    pub fn support_or_origin(&self) -> (i64, i64) {
        self.support().unwrap_or((0, 0))
    }

    /// `(site, value)` over the support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.offset + i as i64, v))
    }

    /// `Σ (1+n²)^{σ/2} |V_n|`.
    pub fn l1_weighted(&self, sigma: f64) -> f64 {
        neumaier_sum(self.iter().map(|(n, v)| weight(n, sigma / 2.0) * v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.offset, self.values.iter().map(|v| v * factor).collect())
            .expect("finite scaling")
    }

    /// Errors unless the support lies inside `window`.
    pub fn check_window(&self, window: &LatticeWindow) -> Result<()> {
        if let Some((lo, hi)) = self.support() {
            if lo < window.n_min || hi > window.n_max {
                return Err(Error::WindowTooSmall {
                    n_min: window.n_min,
                    n_max: window.n_max,
                    support_lo: lo,
                    support_hi: hi,
                });
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("potential serializes")
    }
}

/// `(1+n²)^s`.
pub fn weight(n: i64, s: f64) -> f64 {
    let n = n as f64;
    (1.0 + n * n).powf(s)
}

/// A complex sequence stored densely over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSeq {
    window: LatticeWindow,
    values: Vec<Complex64>,
}

impl LatticeSeq {
    pub fn zeros(window: LatticeWindow) -> Self {
        Self {
            window,
            values: vec![Complex64::new(0.0, 0.0); window.len()],
        }
    }

    pub fn delta(window: LatticeWindow, site: i64) -> Self {
        let mut s = Self::zeros(window);
        s.set(site, Complex64::new(1.0, 0.0));
        s
    }

    pub fn from_fn(window: LatticeWindow, f: impl Fn(i64) -> Complex64) -> Self {
        Self {
            window,
            values: window.sites().map(f).collect(),
        }
    }

    pub fn from_real(window: LatticeWindow, f: impl Fn(i64) -> f64) -> Self {
        Self::from_fn(window, |n| Complex64::new(f(n), 0.0))
    }

    pub fn from_values(window: LatticeWindow, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidInput(format!(
                "sequence length {} does not match window length {}",
                values.len(),
                window.len()
            )));
        }
        Ok(Self { window, values })
    }

    pub fn window(&self) -> LatticeWindow {
        self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value at `n`; zero outside the window.
    pub fn get(&self, n: i64) -> Complex64 {
        self.window
            .index(n)
            .map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn set(&mut self, n: i64, value: Complex64) {
        let i = self
            .window
            .index(n)
            .unwrap_or_else(|| panic!("site {n} outside window"));
        self.values[i] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.window.sites().zip(self.values.iter().copied())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            window: self.window,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.map(|z| alpha * z)
    }

    /// `self + alpha·other` on a shared window.
    pub fn axpy(&self, alpha: Complex64, other: &Self) -> Self {
        assert_eq!(self.window, other.window, "window mismatch");
        Self {
            window: self.window,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + alpha * b)
                .collect(),
        }
    }

    /// Hermitian inner product `Σ conj(u_n) v_n`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.window, other.window, "window mismatch");
        let terms: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .collect();
        complex_sum(&terms)
    }

    /// `Σ_n V_n u_n`, the pairing with a potential.
    pub fn pair_with(&self, v: &Potential) -> Complex64 {
        let terms: Vec<Complex64> = v.iter().map(|(n, vn)| self.get(n) * vn).collect();
        complex_sum(&terms)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// CSV with columns `n,re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,re,im")?;
        for (n, z) in self.iter() {
            writeln!(out, "{n},{:e},{:e}", z.re, z.im)?;
        }
        Ok(())
    }
}

pub(crate) fn complex_sum(terms: &[Complex64]) -> Complex64 {
    Complex64::new(
        neumaier_sum(terms.iter().map(|z| z.re)),
        neumaier_sum(terms.iter().map(|z| z.im)),
    )
}

/// `(-Δ + V)u` with `u` extended by zero outside its window.
pub fn apply_h(v: &Potential, u: &LatticeSeq) -> Result<LatticeSeq> {
    let window = u.window();
    v.check_window(&window)?;
    Ok(LatticeSeq::from_fn(window, |n| {
        let c = u.get(n);
        -(u.get(n + 1) + u.get(n - 1) - c * 2.0) + c * v.at(n)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpace {
    /// `(Σ (1+n²)^σ |u_n|²)^{1/2}`
    L2Sigma,
    /// `Σ (1+n²)^{σ/2} |u_n|`
    L1Sigma,
    Linf,
}

pub fn weighted_norm(u: &LatticeSeq, sigma: f64, space: NormSpace) -> f64 {
    match space {
        NormSpace::L2Sigma => {
            neumaier_sum(u.iter().map(|(n, z)| weight(n, sigma) * z.norm_sqr())).sqrt()
        }
        NormSpace::L1Sigma => neumaier_sum(u.iter().map(|(n, z)| weight(n, sigma / 2.0) * z.norm())),
        NormSpace::Linf => u.max_abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelNorm {
    /// Operator norm `l²_σ → l²_{-σ}`: largest singular value of `D K D`
    /// with `D = diag((1+n²)^{-σ/2})`.
    WeightedOperator(f64),
    /// Operator norm `l¹ → l^∞`: `max |K_{n,m}|`.
    L1ToLinf,
    /// Hilbert–Schmidt norm of `D K D`.
    Frobenius(f64),
}

/// A dense complex kernel `K_{n,m}` over `window × window`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeKernel {
    window: LatticeWindow,
    entries: DMatrix<Complex64>,
}

impl LatticeKernel {
    pub fn zeros(window: LatticeWindow) -> Self {
        Self {
            window,
            entries: DMatrix::zeros(window.len(), window.len()),
        }
    }

    pub fn identity(window: LatticeWindow) -> Self {
        Self {
            window,
            entries: DMatrix::identity(window.len(), window.len()),
        }
    }

    pub fn from_fn(window: LatticeWindow, f: impl Fn(i64, i64) -> Complex64) -> Self {
        let len = window.len();
        Self {
            window,
            entries: DMatrix::from_fn(len, len, |i, j| f(window.site(i), window.site(j))),
        }
    }

    pub fn from_matrix(window: LatticeWindow, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != window.len() || entries.ncols() != window.len() {
            return Err(Error::InvalidInput(format!(
                "matrix {}x{} does not match window length {}",
                entries.nrows(),
                entries.ncols(),
                window.len()
            )));
        }
        Ok(Self { window, entries })
    }

    pub fn window(&self) -> LatticeWindow {
        self.window
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, n: i64, m: i64) -> Complex64 {
        match (self.window.index(n), self.window.index(m)) {
            (Some(i), Some(j)) => self.entries[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, n: i64, m: i64, value: Complex64) {
        let i = self.window.index(n).expect("row inside window");
        let j = self.window.index(m).expect("column inside window");
        self.entries[(i, j)] = value;
    }

    pub fn column(&self, m: i64) -> LatticeSeq {
        let j = self.window.index(m).expect("column inside window");
        LatticeSeq {
            window: self.window,
            values: self.entries.column(j).iter().copied().collect(),
        }
    }

    pub fn apply(&self, u: &LatticeSeq) -> LatticeSeq {
        assert_eq!(self.window, u.window(), "window mismatch");
        let x = nalgebra::DVector::from_column_slice(u.values());
        let y = &self.entries * x;
        LatticeSeq {
            window: self.window,
            values: y.iter().copied().collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            window: self.window,
            entries: self.entries.transpose(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            window: self.window,
            entries: self.entries.map(|z| z.conj()),
        }
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, sub: LatticeWindow) -> Self {
        assert!(
            self.window.contains(sub.n_min) && self.window.contains(sub.n_max),
            "sub-window outside kernel window"
        );
        Self::from_fn(sub, |n, m| self.get(n, m))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.window, other.window, "window mismatch");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn weighted(&self, sigma: f64) -> DMatrix<Complex64> {
        let w: Vec<f64> = self.window.sites().map(|n| weight(n, -sigma / 2.0)).collect();
        let len = self.window.len();
        DMatrix::from_fn(len, len, |i, j| self.entries[(i, j)] * (w[i] * w[j]))
    }

    pub fn norm(&self, kind: KernelNorm) -> f64 {
        match kind {
            KernelNorm::WeightedOperator(sigma) => largest_singular_value(&self.weighted(sigma)),
            KernelNorm::L1ToLinf => self.max_abs(),
            KernelNorm::Frobenius(sigma) => {
                neumaier_sum(self.weighted(sigma).iter().map(|z| z.norm_sqr())).sqrt()
            }
        }
    }

    /// CSV with columns `n,m,re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,m,re,im")?;
        for n in self.window.sites() {
            for m in self.window.sites() {
                let z = self.get(n, m);
                writeln!(out, "{n},{m},{:e},{:e}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Operator-norm and sup-norm evaluation for any kernel.
pub fn kernel_norm(kernel: &LatticeKernel, kind: KernelNorm) -> f64 {
    kernel.norm(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_stencil_on_delta() {
        let w = LatticeWindow::symmetric(5);
        let out = apply_h(&Potential::zero(), &LatticeSeq::delta(w, 0)).unwrap();
        assert_eq!(out.get(0), c(2.0));
        assert_eq!(out.get(1), c(-1.0));
        assert_eq!(out.get(-1), c(-1.0));
        assert_eq!(out.get(2), c(0.0));
    }

    #[test]
    fn single_site_potential_stencil() {
        let w = LatticeWindow::symmetric(5);
        let v = Potential::delta(0, -1.5);
        let out = apply_h(&v, &LatticeSeq::delta(w, 0)).unwrap();
        assert_eq!(out.get(0), c(0.5));
        assert_eq!(out.get(1), c(-1.0));
        assert_eq!(out.get(-1), c(-1.0));
    }

    #[test]
    fn constants_annihilated_in_interior() {
        let w = LatticeWindow::symmetric(50);
        let out = apply_h(&Potential::zero(), &LatticeSeq::from_real(w, |_| 1.0)).unwrap();
        for n in w.interior(1) {
            assert_eq!(out.get(n), c(0.0));
        }
        // Dirichlet boundary: the missing neighbour is zero.
        assert_eq!(out.get(50), c(1.0));
    }

    #[test]
    fn apply_h_rejects_small_window() {
        let w = LatticeWindow::symmetric(2);
        let v = Potential::new(1, vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(
            apply_h(&v, &LatticeSeq::zeros(w)),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn weighted_norm_examples() {
        let w = LatticeWindow::symmetric(4);
        for sigma in [0.0, 1.0, 3.5] {
            assert_eq!(weighted_norm(&LatticeSeq::delta(w, 0), sigma, NormSpace::L2Sigma), 1.0);
        }
        let d1 = LatticeSeq::delta(w, 1);
        assert!((weighted_norm(&d1, 1.0, NormSpace::L2Sigma) - 2f64.sqrt()).abs() < 1e-15);
        let u = LatticeSeq::delta(w, 0).axpy(c(1.0), &d1);
        assert_eq!(weighted_norm(&u, 0.0, NormSpace::L1Sigma), 2.0);
        assert_eq!(weighted_norm(&u.scale(c(-3.0)), 0.0, NormSpace::Linf), 3.0);
        // negative weights are the dual spaces
        assert!((weighted_norm(&d1, -1.0, NormSpace::L2Sigma) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kernel_norm_examples() {
        let w = LatticeWindow::symmetric(6);
        let id = LatticeKernel::identity(w);
        assert!((kernel_norm(&id, KernelNorm::WeightedOperator(0.0)) - 1.0).abs() < 1e-12);
        let ones = LatticeKernel::from_fn(w, |_, _| c(1.0));
        assert!((kernel_norm(&ones, KernelNorm::WeightedOperator(0.0)) - 13.0).abs() < 1e-10);
        assert!((kernel_norm(&ones, KernelNorm::Frobenius(0.0)) - 13.0).abs() < 1e-12);
        assert_eq!(kernel_norm(&ones, KernelNorm::L1ToLinf), 1.0);
    }

    #[test]
    fn potential_trims_and_round_trips_json() {
        let v = Potential::new(-3, vec![0.0, 0.0, 1.5, -2.0, 0.0]).unwrap();
        assert_eq!(v.support(), Some((-1, 0)));
        assert_eq!(v.at(-1), 1.5);
        assert_eq!(v.at(5), 0.0);
        let s = v.to_json_string();
        assert_eq!(s, r#"{"offset":-1,"values":[1.5,-2.0]}"#);
        assert_eq!(Potential::from_json_str(&s).unwrap(), v);
        assert!(Potential::from_json_str(r#"{"offset":0,"values":[]}"#)
            .unwrap()
            .is_zero());
        assert!(Potential::new(0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn sequence_csv_layout() {
        let w = LatticeWindow::new(-1, 1).unwrap();
        let mut buf = Vec::new();
        LatticeSeq::delta(w, 0).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("n,re,im"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn window_validation() {
        assert!(LatticeWindow::new(3, 3).is_err());
        let w = LatticeWindow::new(-2, 5).unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(w.index(-2), Some(0));
        assert_eq!(w.index(6), None);
        assert_eq!(w.half_width(), 2);
    }
}
