//! Small dense/tridiagonal linear-algebra kernels used across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Compensated (Neumaier) summation; result independent of chunking.
pub fn neumaier_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Matrices up to this order go through a full SVD.
const DENSE_SVD_MAX: usize = 160;

/// Largest singular value of a complex matrix.
///
/// Small matrices use a full SVD; larger ones use Lanczos on `A*A` with full
/// reorthogonalization and a fixed start vector, so the result is
/// deterministic.
pub fn largest_singular_value(a: &DMatrix<Complex64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.nrows().min(a.ncols()) <= DENSE_SVD_MAX {
        return a
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max);
    }
    lanczos_top_singular_value(a)
}

fn lanczos_top_singular_value(a: &DMatrix<Complex64>) -> f64 {
    let n = a.ncols();
    let ah = a.adjoint();
    let max_steps = n.min(400);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(max_steps + 1);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut q = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 1e-3 * (i % 7) as f64, 0.0));
    q /= Complex64::new(q.norm(), 0.0);
    let mut previous = f64::NAN;
    let mut stable = 0;
    let mut estimate = 0.0;

    for step in 0..max_steps {
        let mut w = &ah * (a * &q);
        let alpha = q.dotc(&w).re;
        alphas.push(alpha);
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let beta = w.norm();

        if step % 4 == 3 || beta < 1e-300 || step + 1 == max_steps {
            estimate = tridiagonal_top_eigenvalue(&alphas, &betas);
            if beta <= 1e-14 * estimate.abs().max(1e-300) {
                break;
            }
            if (estimate - previous).abs() <= 1e-14 * estimate.abs() {
                stable += 1;
                if stable >= 2 {
                    break;
                }
            } else {
                stable = 0;
            }
            previous = estimate;
        }
        betas.push(beta);
        q = w / Complex64::new(beta, 0.0);
    }
    estimate.max(0.0).sqrt()
}

fn tridiagonal_top_eigenvalue(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j || j + 1 == i {
            betas[i.min(j)]
        } else {
            0.0
        }
    });
    t.symmetric_eigenvalues().iter().copied().fold(f64::MIN, f64::max)
}

/// LU factorization of a complex tridiagonal matrix with partial pivoting
/// (the `gttrf`/`gttrs` scheme). Row interchanges introduce a second
/// superdiagonal.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    dl: Vec<Complex64>,
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// `sub[i]` is entry `(i+1, i)`, `sup[i]` is entry `(i, i+1)`.
    pub fn factor(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64]) -> Self {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(sub.len(), n - 1);
        assert_eq!(sup.len(), n - 1);
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    /// Smallest pivot modulus of the `U` factor.
    pub fn min_pivot(&self) -> f64 {
        self.d.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.d.len();
        assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let bi = b[i];
                b[i + 1] -= self.dl[i] * bi;
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Symmetric real tridiagonal matrix `diag`, `off` (length `n-1`).
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.diag.len() {
            let off2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = if i == 0 { self.diag[0] - x } else { self.diag[i] - x - off2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn kth_eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        lo -= 1e-12 * (1.0 + lo.abs());
        hi += 1e-12 * (1.0 + hi.abs());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an (accurately known) eigenvalue by inverse iteration.
    pub fn inverse_iteration(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.len();
        let scale = self.diag.iter().fold(1.0f64, |a, b| a.max(b.abs())) + 2.0;
        let shift = eigenvalue + 1e-13 * scale;
        let sub: Vec<Complex64> = self.off.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let diag: Vec<Complex64> = self
            .diag
            .iter()
            .map(|&x| Complex64::new(x - shift, 0.0))
            .collect();
        let lu = TridiagonalLu::factor(&sub, &diag, &sub);
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64 / 13.0, 0.0))
            .collect();
        for _ in 0..4 {
            lu.solve_in_place(&mut x);
            let norm = neumaier_sum(x.iter().map(|z| z.norm_sqr())).sqrt();
            for z in x.iter_mut() {
                *z /= norm;
            }
        }
        let mut v: Vec<f64> = x.iter().map(|z| z.re).collect();
        let big = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i + 1 == j || j + 1 == i {
                self.off[i.min(j)]
            } else {
                0.0
            }
        })
    }
}
