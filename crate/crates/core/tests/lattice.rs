mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use lattice_spectral::{apply_h, kernel_norm, KernelNorm, LatticeKernel, LatticeSeq, LatticeWindow, Potential};

fn arb_seq(window: LatticeWindow, radius: i64) -> impl Strategy<Value = LatticeSeq> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), (2 * radius + 1) as usize).prop_map(move |vals| {
        LatticeSeq::from_fn(window, |n| {
            if n.abs() <= radius {
                let (re, im) = vals[(n + radius) as usize];
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    })
}

fn window() -> LatticeWindow {
    LatticeWindow::symmetric(20)
}

proptest! {
    #[test]
    fn apply_h_is_linear(
        v in common::arb_potential(),
        u in arb_seq(window(), 10),
        w in arb_seq(window(), 10),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let (a, b) = (Complex64::new(a, 0.3), Complex64::new(b, -0.7));
        let lhs = apply_h(&v, &u.scale(a).axpy(b, &w)).unwrap();
        let rhs = apply_h(&v, &u).unwrap().scale(a).axpy(b, &apply_h(&v, &w).unwrap());
        for n in window().sites() {
            prop_assert!((lhs.get(n) - rhs.get(n)).norm() < 1e-13);
        }
    }

    #[test]
    fn apply_h_is_symmetric(v in common::arb_potential(), u in arb_seq(window(), 12), w in arb_seq(window(), 12)) {
        let lhs = apply_h(&v, &u).unwrap().inner(&w);
        let rhs = u.inner(&apply_h(&v, &w).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn apply_h_keeps_real_input_real(v in common::arb_potential(), u in arb_seq(window(), 12)) {
        let real = u.map(|z| Complex64::new(z.re, 0.0));
        let out = apply_h(&v, &real).unwrap();
        prop_assert!(out.values().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn laplacian_form_bound(u in arb_seq(window(), 15)) {
        let form = u.inner(&apply_h(&Potential::zero(), &u).unwrap());
        let norm2 = u.inner(&u).re;
        prop_assert!(form.im.abs() < 1e-12);
        prop_assert!(form.re >= -1e-12);
        prop_assert!(form.re <= 4.0 * norm2 + 1e-12);
    }

    #[test]
    fn l1_to_linf_norm_is_transpose_invariant(entries in prop::collection::vec(-5.0f64..5.0, 81)) {
        let w = LatticeWindow::symmetric(4);
        let k = LatticeKernel::from_fn(w, |n, m| {
            Complex64::new(entries[((n + 4) * 9 + m + 4) as usize], 0.1 * n as f64)
        });
        prop_assert_eq!(kernel_norm(&k, KernelNorm::L1ToLinf), kernel_norm(&k.transpose(), KernelNorm::L1ToLinf));
    }
}

#[test]
fn constant_is_annihilated_in_interior() {
    let w = LatticeWindow::symmetric(30);
    let one = LatticeSeq::from_real(w, |_| 1.0);
    let out = apply_h(&Potential::zero(), &one).unwrap();
    for n in w.interior(1) {
        assert_eq!(out.get(n), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn potential_outside_window_is_rejected() {
    let w = LatticeWindow::symmetric(3);
    let u = LatticeSeq::delta(w, 0);
    assert!(apply_h(&Potential::delta(5, 1.0), &u).is_err());
}
