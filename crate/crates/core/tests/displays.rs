//! The printed second-derivative displays of `u_t` contain four misprints.
//! Each test pins the misprint down to exactly one term: the literal reading
//! differs from the corrected one by that term, the algebra agrees with the
//! corrected reading, and the literal reading is measurably off wherever the
//! offending term is nonzero.

mod common;

use common::*;
use num_complex::Complex64;
use schauder_core::verification::sampling::stream_rng;
use schauder_core::*;

const T: [f64; 3] = [0.05, 0.1, 0.249];
const POINTS: usize = 60;

fn mixed(n: usize, i: usize, j: usize) -> Vec<u32> {
    let mut d = vec![0; n];
    d[i] += 1;
    d[j] += 1;
    d
}

/// Points with `|x|` in the cutoff ramp, where every misprinted term is live.
fn ramp_points(seed: u64, n: usize) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, n as u64);
    (0..POINTS).map(|i| random_point(&mut rng, n, 2 * i + 1, 1e-3, 0.9)).filter(|x| x.iter().all(|v| v.abs() > 1e-3)).collect()
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    rel_err(a, b, scale) <= 1e-12
}

#[test]
fn diagonal_display_has_an_extra_two_on_the_phi_prime_term() {
    let phi = PhiProfile::log();
    let ut = build_u_t(2, 0).unwrap();
    let d11 = ut.derivative(&[2, 0]).unwrap();
    let d22 = ut.derivative(&[0, 2]).unwrap();
    let mut off = 0;
    for t in T {
        let ctx = EvalContext::new(phi, EtaProfile::default(), t, 2);
        for x in ramp_points(11, 2) {
            let a = At::new(&x, &phi, t);
            let [e0, _, _] = a.eta;
            let p1 = a.phi[1];
            let term = -2.0 * e0 * x[0] * x[1] * a.r.powf(2.0 * t - 2.0) * p1;
            let (lit, cor) = (ut_x1x1(&a, true), ut_x1x1(&a, false));
            assert!(close(lit.value - cor.value, term, cor.magnitude), "x1x1 delta at {x:?}");
            let (lit2, cor2) = (ut_x2x2(&a, true), ut_x2x2(&a, false));
            assert!(close(lit2.value - cor2.value, term, cor2.magnitude), "x2x2 delta at {x:?}");
            let alg = d11.evaluate(&ctx, &x).unwrap();
            assert!(close(alg, cor.value, cor.magnitude), "algebra vs corrected x1x1 at {x:?}");
            assert!(close(d22.evaluate(&ctx, &x).unwrap(), cor2.value, cor2.magnitude));
            if rel_err(alg, lit.value, cor.magnitude) > 1e-6 {
                off += 1;
            }
        }
    }
    assert!(off > 0, "literal reading never distinguishable from the algebra");
}

#[test]
fn mixed_display_repeats_the_eta_prime_phi_prime_term() {
    let phi = PhiProfile::power(0.9).unwrap();
    let d12 = build_u_t(3, 0).unwrap().derivative(&mixed(3, 0, 1)).unwrap();
    let mut off = 0;
    for t in T {
        let ctx = EvalContext::new(phi, EtaProfile::default(), t, 3);
        for x in ramp_points(12, 3) {
            let a = At::new(&x, &phi, t);
            let q = x[0] * x[0] * x[1] * x[1];
            let term = -4.0 * a.eta[1] * q * a.r.powf(2.0 * t - 3.0) * a.phi[1];
            let (lit, cor) = (ut_x1x2(&a, true), ut_x1x2(&a, false));
            assert!(close(lit.value - cor.value, term, cor.magnitude), "delta at {x:?}");
            let alg = d12.evaluate(&ctx, &x).unwrap();
            assert!(close(alg, cor.value, cor.magnitude), "algebra vs corrected at {x:?}");
            if rel_err(alg, lit.value, cor.magnitude) > 1e-6 {
                off += 1;
            }
        }
    }
    assert!(off > 0);
}

#[test]
fn mixed_display_is_exact_on_the_plateau() {
    // The repeated term carries eta', which vanishes for |x| <= 1/2.
    let phi = PhiProfile::log();
    let mut rng = stream_rng(13, 0);
    for i in 0..POINTS {
        let x = random_point(&mut rng, 2, 2 * i, 1e-4, 0.45);
        let a = At::new(&x, &phi, 0.1);
        assert_eq!(ut_x1x2(&a, true).value, ut_x1x2(&a, false).value);
    }
}

fn wirtinger(k: u32, second: Wirtinger) -> Expression {
    build_u_t(2, k)
        .unwrap()
        .wirtinger_differentiate(Wirtinger::Z)
        .unwrap()
        .wirtinger_differentiate(second)
        .unwrap()
}

fn cclose(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-12 * scale
}

#[test]
fn dzdz_display_doubles_one_coefficient() {
    let phi = PhiProfile::log();
    for k in [1u32, 2, 3] {
        let hzz = wirtinger(k, Wirtinger::Z);
        for t in T {
            let ctx = EvalContext::new(phi, EtaProfile::default(), t, 2);
            for x in ramp_points(14 + k as u64, 2) {
                let a = At::new(&x, &phi, t);
                let z = Complex64::new(x[0], x[1]);
                let term = (4.0 * t - 1.0) / 4.0
                    * a.eta[1]
                    * z.powu(k + 2)
                    * z.conj().powu(2)
                    * a.r.powf(2.0 * t - 3.0)
                    * a.phi[0];
                let (lit, cor) = (hut_zz(&a, k, true), hut_zz(&a, k, false));
                assert!(cclose(lit.value - cor.value, term, cor.magnitude), "k = {k}, x = {x:?}");
                let alg = hzz.evaluate_complex(&ctx, &x).unwrap();
                assert!(cclose(alg, cor.value, cor.magnitude), "algebra vs corrected, k = {k}, x = {x:?}");
            }
        }
    }
}

#[test]
fn dzbar_dz_display_swaps_two_factors() {
    let phi = PhiProfile::power(0.9).unwrap();
    for k in [1u32, 2] {
        let hzbz = wirtinger(k, Wirtinger::ZBar);
        let mut off = 0;
        for t in T {
            let ctx = EvalContext::new(phi, EtaProfile::default(), t, 2);
            for x in ramp_points(20 + k as u64, 2) {
                let a = At::new(&x, &phi, t);
                let z = Complex64::new(x[0], x[1]);
                let [e0, e1, _] = a.eta;
                let [p0, p1, _] = a.phi;
                // fourth term: eta' phi printed instead of eta' phi'; ninth: eta' phi' instead of eta phi'
                let fourth = -e1 * z.powu(k + 3) * z.conj() * a.r.powf(2.0 * t - 3.0) * (p0 - p1);
                let ninth = -(e1 - e0) * z.powu(k + 2) * a.r.powf(2.0 * t - 2.0) * p1;
                let (lit, cor) = (hut_zbz(&a, k, true), hut_zbz(&a, k, false));
                assert!(cclose(lit.value - cor.value, fourth + ninth, cor.magnitude), "k = {k}, x = {x:?}");
                let alg = hzbz.evaluate_complex(&ctx, &x).unwrap();
                assert!(cclose(alg, cor.value, cor.magnitude), "algebra vs corrected, k = {k}, x = {x:?}");
                if (alg - lit.value).norm() > 1e-6 * cor.magnitude {
                    off += 1;
                }
            }
        }
        assert!(off > 0);
    }
}

#[test]
fn dzbar_dz_ninth_term_misprint_is_visible_on_the_plateau() {
    // On the plateau eta = 1 and eta' = 0, so the printed eta' drops a live
    // eta phi' term: the literal reading is wrong even where the cutoff is flat.
    let phi = PhiProfile::log();
    let hzbz = wirtinger(1, Wirtinger::ZBar);
    let ctx = EvalContext::new(phi, EtaProfile::default(), 0.1, 2);
    let mut rng = stream_rng(30, 0);
    for i in 0..POINTS {
        let x = random_point(&mut rng, 2, 2 * i, 1e-3, 0.45);
        let a = At::new(&x, &phi, 0.1);
        let alg = hzbz.evaluate_complex(&ctx, &x).unwrap();
        let (lit, cor) = (hut_zbz(&a, 1, true), hut_zbz(&a, 1, false));
        assert!(cclose(alg, cor.value, cor.magnitude));
        assert!((alg - lit.value).norm() > 1e-3 * cor.magnitude, "x = {x:?}");
    }
}
