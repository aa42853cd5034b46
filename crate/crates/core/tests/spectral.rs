mod common;

use std::f64::consts::PI;

use nhlatt_core::charpoly::CharPolyParams;
use nhlatt_core::lattice::build_hamiltonian;
use nhlatt_core::spectral::{
    bound_state, detect_pairs, locate_ep, residual, solve_charpoly, solve_dense, solve_dense_seeded, Backend,
    EpClass,
};
use nhlatt_core::{Complex64, Error, LatticeParams};
use proptest::prelude::*;

fn sorted_re(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn open_chain_levels() {
    for l in [2usize, 5, 14, 33] {
        let s = solve_dense(&LatticeParams::absorbing(l, 1, 0.0).unwrap(), false).unwrap();
        let got = sorted_re(s.eigenvalues.iter().map(|z| z.re).collect());
        let want = sorted_re((1..=l).map(|m| -2.0 * (m as f64 * PI / (l + 1) as f64).cos()).collect());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "L={l}: {g} vs {w}");
        }
        assert!(s.eigenvalues.iter().all(|z| z.im.abs() < 1e-12));
    }
}

#[test]
fn eigenvalues_are_zeros_of_the_dense_determinant() {
    for (l, q, g) in [(7, 3, 0.8), (9, 5, 3.0), (12, 1, 1.3)] {
        let h = common::chain(l, q, Complex64::new(0.0, -g));
        let s = solve_dense(&LatticeParams::absorbing(l, q, g).unwrap(), false).unwrap();
        for &lam in &s.eigenvalues {
            let d = common::charpoly(&h, lam);
            let dd = common::charpoly(&h, lam + 1e-4);
            assert!(d.norm() < 1e-8 * dd.norm().max(1e-12) * 1e4, "L={l} λ={lam}: {d}");
        }
    }
}

#[test]
fn vectors_have_small_residuals_away_from_eps() {
    for (l, q, g) in [(20, 10, 0.7), (31, 4, 5.0), (60, 30, 2.5)] {
        let p = LatticeParams::absorbing(l, q, g).unwrap();
        let s = solve_dense(&p, true).unwrap();
        assert!(s.max_residual().unwrap() < 1e-10, "L={l}");
        let op = build_hamiltonian(&p).unwrap();
        for (lam, v) in s.eigenvalues.iter().zip(s.eigenvectors.as_ref().unwrap()) {
            let h = common::chain(l, q, Complex64::new(0.0, -g));
            let hv = common::matvec(&h, v);
            let r: f64 = hv.iter().zip(v).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt();
            assert!((r - residual(&op, *lam, v)).abs() < 1e-13);
        }
    }
}

#[test]
fn real_impurity() {
    let s = solve_dense(&LatticeParams::real(9, 5, 1.5).unwrap(), false).unwrap();
    assert!(s.eigenvalues.iter().all(|z| z.im.abs() < 1e-12));
    assert!((s.sum().re - 1.5).abs() < 1e-12);
}

#[test]
fn same_seed_same_vectors() {
    let p = LatticeParams::absorbing(25, 9, 1.1).unwrap();
    let a = solve_dense_seeded(&p, true, 42).unwrap();
    let b = solve_dense_seeded(&p, true, 42).unwrap();
    assert_eq!(a.eigenvectors, b.eigenvectors);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_and_mirror(l in 2usize..=60, qf in 0.0f64..1.0, gamma in 0.0f64..10.0) {
        let q = 1 + ((l as f64 * qf) as usize).min(l - 1);
        let s = solve_dense(&LatticeParams::absorbing(l, q, gamma).unwrap(), false).unwrap();
        prop_assert!(s.trace_defect() < 1e-8 * l as f64);
        prop_assert!(s.reflection_defect() < 1e-7);
    }

    #[test]
    fn backends_agree(l in 2usize..=40, qf in 0.0f64..1.0, gamma in 0.0f64..10.0) {
        let q = 1 + ((l as f64 * qf) as usize).min(l - 1);
        let d = solve_dense(&LatticeParams::absorbing(l, q, gamma).unwrap(), false).unwrap();
        let r = solve_charpoly(&CharPolyParams::new(l, q, gamma).unwrap()).unwrap();
        prop_assert_eq!(r.backend, Backend::CharpolyRoots);
        // Near an EP both backends are only good to about sqrt(eps).
        prop_assert!(common::hausdorff(&d.eigenvalues, &r.eigenvalues) < 1e-6);
    }
}

#[test]
fn collective_ep_at_gamma_two() {
    for l in [6usize, 14, 30] {
        let s = solve_dense(&LatticeParams::absorbing(l, l / 2, 2.0).unwrap(), true).unwrap();
        let rep = detect_pairs(&s);
        assert_eq!(rep.classification, EpClass::AllPairedEp, "L={l}");
        assert_eq!(rep.ep_pairs().count(), l / 2);
        assert!(rep.ep_pairs().all(|p| p.gap < 1e-6 && p.vector_overlap.unwrap() < 1e-3));
    }
}

#[test]
fn no_ep_just_below_two() {
    let s = solve_dense(&LatticeParams::absorbing(14, 7, 1.9).unwrap(), true).unwrap();
    assert_eq!(detect_pairs(&s).ep_pairs().count(), 0);
}

#[test]
fn located_ep_is_two_for_central_impurity() {
    let loc = locate_ep(10, 5, (1.5, 2.5)).unwrap();
    assert!((loc.gamma_c - 2.0).abs() < 1e-6, "{}", loc.gamma_c);
}

#[test]
fn absorbing_bound_state_against_infinite_chain() {
    for g in [2.5f64, 4.0, 10.0] {
        let s = solve_dense(&LatticeParams::absorbing(61, 31, g).unwrap(), true).unwrap();
        let b = bound_state(&s).unwrap();
        let root = (g * g - 4.0).sqrt();
        assert!((b.eigenvalue - Complex64::new(0.0, -root)).norm() < 1e-9, "γ={g}: {}", b.eigenvalue);
        let z = (g - root) / 2.0;
        let alpha = -1.0 / z.ln();
        assert!((b.alpha() - alpha).abs() < 1e-5 * alpha, "γ={g}: α {} vs {alpha}", b.alpha());
    }
}

#[test]
fn real_bound_state_against_infinite_chain() {
    let v = -2.5f64;
    let s = solve_dense(&LatticeParams::real(61, 31, v).unwrap(), true).unwrap();
    let b = bound_state(&s).unwrap();
    let e = v.signum() * (v * v + 4.0).sqrt();
    assert!((b.eigenvalue.re - e).abs() < 1e-10);
    // decaying root of z + 1/z = |E|
    let z = (e.abs() - (e * e - 4.0).sqrt()) / 2.0;
    assert!((b.alpha() + 1.0 / z.ln()).abs() < 1e-6);
}

#[test]
fn no_bound_state_below_threshold() {
    let s = solve_dense(&LatticeParams::absorbing(30, 15, 1.5).unwrap(), true).unwrap();
    assert!(matches!(bound_state(&s), Err(Error::NoBoundState)));
}

#[test]
fn deep_state_at_large_gamma() {
    let s = solve_dense(&LatticeParams::absorbing(14, 7, 10.0).unwrap(), false).unwrap();
    let axis: Vec<_> = s.eigenvalues.iter().filter(|z| z.re.abs() < 1e-8 && z.im < -5.0).collect();
    assert_eq!(axis.len(), 1);
    assert!((axis[0].im + 96f64.sqrt()).abs() < 1e-3, "{}", axis[0]);
}

#[test]
fn charpoly_roots_at_gamma_zero() {
    let r = solve_charpoly(&CharPolyParams::new(6, 3, 0.0).unwrap()).unwrap();
    let want: Vec<Complex64> = (1..=6).map(|m| Complex64::new(-2.0 * (m as f64 * PI / 7.0).cos(), 0.0)).collect();
    assert!(common::hausdorff(&r.eigenvalues, &want) < 1e-9);
}

#[test]
fn double_roots_at_gamma_two() {
    use nhlatt_core::charpoly::{charpoly_derivative, k_eval};
    let p = CharPolyParams::new(14, 7, 2.0).unwrap();
    let r = solve_charpoly(&p).unwrap();
    for z in &r.eigenvalues {
        let f = k_eval(7, *z) + Complex64::i() * k_eval(6, *z);
        assert!(f.norm() < 1e-6, "{z}: {f}");
    }
    // every root of K_7 + iK_6 appears twice
    let d = solve_dense(&LatticeParams::absorbing(14, 7, 2.0).unwrap(), false).unwrap();
    for z in &d.eigenvalues {
        let near = r.eigenvalues.iter().filter(|w| (*w - z).norm() < 1e-6).count();
        assert_eq!(near, 2, "{z}");
    }
    // the derivative vanishes at the exact double roots: polish one with Newton on K_7 + iK_6
    let f = |z: Complex64| k_eval(7, z) + Complex64::i() * k_eval(6, z);
    for z0 in d.eigenvalues.iter().step_by(2) {
        let mut z = *z0;
        for _ in 0..20 {
            let h = 1e-7;
            let df = (f(z + h) - f(z - h)) / (2.0 * h);
            z -= f(z) / df;
        }
        assert!(charpoly_derivative(&p, z).norm() < 1e-8, "{z}");
    }
}

#[test]
fn backends_agree_at_l8() {
    let d = solve_dense(&LatticeParams::absorbing(8, 4, 3.0).unwrap(), false).unwrap();
    let r = solve_charpoly(&CharPolyParams::new(8, 4, 3.0).unwrap()).unwrap();
    assert!(common::hausdorff(&d.eigenvalues, &r.eigenvalues) < 1e-7);
}

#[test]
fn transfer_vectors() {
    use nhlatt_core::linalg::parallel_defect;
    use nhlatt_core::spectral::eigenvector_transfer;
    let op = build_hamiltonian(&LatticeParams::absorbing(10, 5, 0.0).unwrap()).unwrap();
    let lam = Complex64::new(-2.0 * (PI / 11.0).cos(), 0.0);
    let v = eigenvector_transfer(&op, lam).unwrap();
    let want: Vec<Complex64> = (1..=10).map(|j| Complex64::new((j as f64 * PI / 11.0).sin(), 0.0)).collect();
    assert!(parallel_defect(&v, &want) < 1e-10);
    assert!(residual(&op, lam, &v) < 1e-8);

    let op = build_hamiltonian(&LatticeParams::absorbing(10, 5, 1.0).unwrap()).unwrap();
    assert!(eigenvector_transfer(&op, Complex64::new(0.123, 0.456)).is_err());

    // at the collective EP the pair's QR vectors and the transfer vector coincide
    let p = LatticeParams::absorbing(14, 7, 2.0).unwrap();
    let s = solve_dense(&p, true).unwrap();
    let rep = detect_pairs(&s);
    let op = build_hamiltonian(&p).unwrap();
    let vecs = s.eigenvectors.as_ref().unwrap();
    for pair in &rep.pairs {
        let lam = (s.eigenvalues[pair.a] + s.eigenvalues[pair.b]) / 2.0;
        let t = eigenvector_transfer(&op, lam).unwrap();
        assert!(parallel_defect(&vecs[pair.a], &vecs[pair.b]) < 1e-3);
        assert!(parallel_defect(&vecs[pair.a], &t) < 1e-3);
    }
}

#[test]
fn gap_structure_away_from_two() {
    use nhlatt_core::spectral::min_pair_gap;
    let s = solve_dense(&LatticeParams::absorbing(14, 7, 0.5).unwrap(), false).unwrap();
    assert!(min_pair_gap(&s.eigenvalues) > 0.05);
    for i in 0..=60 {
        let g = 0.1 * i as f64;
        let s = solve_dense(&LatticeParams::absorbing(9, 5, g).unwrap(), true).unwrap();
        assert_eq!(detect_pairs(&s).ep_pairs().count(), 0, "L=9 γ={g}");
    }
}

#[test]
fn ep_windows() {
    use nhlatt_core::spectral::{locate_ep_with, EpClass, GapMetric};
    let c = locate_ep(14, 7, (1.5, 2.5)).unwrap();
    assert!((c.gamma_c - 2.0).abs() < 1e-3);
    // the smallest gap stays with the pairs that split at 2; the extra EP shows in the central pair
    let e = locate_ep_with(8, 4, (2.05, 3.0), GapMetric::CentralPair).unwrap();
    assert!((e.gamma_c - 2.19693).abs() < 1e-4);
    assert!(e.gamma_c > 2.0 && e.report.classification == EpClass::SingleExtraEp, "{e:?}");
    let t = locate_ep(7, 4, (1.5, 3.5)).unwrap();
    assert!(t.gamma_c > 2.0 && t.report.classification == EpClass::ThirdOrderEp, "{t:?}");
}

#[test]
fn real_bound_energy_and_threshold() {
    let s = solve_dense(&LatticeParams::real(42, 21, -2.5).unwrap(), true).unwrap();
    let b = bound_state(&s).unwrap();
    assert!((b.eigenvalue.re + 10.25f64.sqrt()).abs() < 1e-3);
    let s = solve_dense(&LatticeParams::absorbing(14, 7, 1.0).unwrap(), true).unwrap();
    assert!(matches!(bound_state(&s), Err(Error::NoBoundState)));
}

#[test]
fn ordering_puts_lower_imaginary_first() {
    use nhlatt_core::spectral::order_permutation;
    let v = [Complex64::new(1.0, 2.0), Complex64::new(1.0, -2.0), Complex64::new(0.0, 0.0)];
    assert_eq!(order_permutation(&v), vec![2, 1, 0]);
    let sorted = [v[2], v[1], v[0]];
    assert_eq!(order_permutation(&sorted), vec![0, 1, 2]);
}
