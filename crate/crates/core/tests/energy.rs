use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use fermigas::consts::{format_significant, ln2_rational, pi_bracket};
use fermigas::energy::{budget_report, inputs_for_choice, six_pi2_23, term_table, CorrectionRequest, Quantity};
use fermigas::{
    box_method_density, closed_form_bound, ding_zhang_curve, energy_assembled, enumerate_momenta, error_budget, optimize_exponents,
    solve_p_wave, BoxInput, BudgetInputs, JastrowProfile, KernelMode, MomentKind, MomentumSet, RadialPotential, Region,
};

fn ball(r: i64, l: f64) -> MomentumSet {
    enumerate_momenta(&Region::Ball { d: 3 }, r, 1, l).unwrap()
}

fn hard_core_profile(a: f64, b: f64) -> JastrowProfile {
    let sol = solve_p_wave(&RadialPotential::hard_core(3, a).unwrap(), 4.0 * a, 400).unwrap();
    JastrowProfile::new(&sol, b).unwrap()
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[test]
fn expansion_matches_rational_oracle() {
    // x = 1/5 and Reff/a = 5/18, evaluated in exact arithmetic with bracketed pi.
    let x = rat(1, 5);
    let (pi, _) = pi_bracket();
    let x3 = &x * &x * &x;
    let x5 = &x3 * &x * &x;
    let x6 = &x5 * &x;
    let e = rat(3, 5) + rat(2, 5) * &x3 / &pi - &x5 * rat(18, 5) / (rat(35, 1) * &pi)
        + (rat(2066, 1) - rat(312, 1) * ln2_rational()) * x6 / (rat(10395, 1) * &pi * &pi);
    let digits = format_significant(&e, 50);
    assert!(digits.starts_with("0.60100926858740"), "{digits}");
    let got = ding_zhang_curve(&[0.2], 5.0 / 18.0).unwrap()[0].e_total;
    let want: f64 = e.to_f64().unwrap();
    assert!((got / want - 1.0).abs() < 4.0 * f64::EPSILON, "{got} vs {want}");
}

#[test]
fn closed_form_correction_is_fifth_order_term() {
    for (x, a0) in [(0.05, 1.0), (0.2, 1.3), (0.4, 0.7)] {
        let kf: f64 = x;
        let rho = kf.powi(3) / (6.0 * PI * PI);
        let c = closed_form_bound(rho, 1.0, a0, 3).unwrap();
        let reff = 5.0 / (18.0 * a0 * a0);
        let row = ding_zhang_curve(&[x], reff).unwrap()[0];
        let scale = rho * kf * kf;
        assert!((c.e_correction / scale - (row.e_k5 - row.e_k3)).abs() < 1e-15);
        assert!((c.e_interaction / scale - (row.e_k3 - row.e_k2)).abs() < 1e-15);
        assert!((c.e_free / scale - 0.6).abs() < 1e-14);
    }
}

#[test]
fn closed_form_against_continuum_quartic_coefficient() {
    // rho2(r) ~ rho^2 kF^2 r^2 / 5 for the continuum Fermi sea.
    let rho: f64 = 1e-6;
    let kf2 = six_pi2_23() * rho.powf(2.0 / 3.0);
    let closed = closed_form_bound(rho, 1.0, 1.0, 3).unwrap().e_interaction;
    for b in [100.0, 300.0] {
        let m2 = hard_core_profile(1.0, b).moment_integral(2, MomentKind::EnergyForm).unwrap();
        let route = rho * rho * kf2 / 5.0 * m2;
        assert!((route / closed - 1.0).abs() < 1e-3, "b = {b}: {route} vs {closed}");
    }
}

#[test]
fn assembled_items_add_up() {
    let ms = ball(6, 400.0);
    let jp = hard_core_profile(1.0, ms.rho().powf(-1.0 / 3.0));
    for mode in [KernelMode::Quartic, KernelMode::Exact] {
        let e = energy_assembled(&ms, &jp, mode, None).unwrap();
        let sum: f64 = e.items.iter().map(|i| i.value).sum();
        assert!((e.total - sum).abs() <= 1e-12 * e.total.abs());
        assert!((e.interaction() + e.item("kinetic").unwrap() - e.total).abs() <= 1e-12 * e.total);
    }
    let req = CorrectionRequest { s: 1.0, threshold: 1.0 };
    let q = energy_assembled(&ms, &jp, KernelMode::Quartic, Some(req)).unwrap();
    let x = energy_assembled(&ms, &jp, KernelMode::Exact, None).unwrap();
    assert!((q.interaction() / x.interaction() - 1.0).abs() < 1e-8);
}

#[test]
fn free_state_has_only_kinetic_energy() {
    let ms = ball(4, 30.0);
    let sol = solve_p_wave(&RadialPotential::soft_core(3, 1.0, 0.0).unwrap(), 4.0, 400).unwrap();
    let jp = JastrowProfile::new(&sol, 2.0).unwrap();
    let e0: f64 = (0..ms.n()).map(|i| ms.momentum(i).iter().map(|k| k * k).sum::<f64>()).sum::<f64>() / 30f64.powi(3);
    for mode in [KernelMode::Quartic, KernelMode::Exact] {
        let e = energy_assembled(&ms, &jp, mode, None).unwrap();
        assert_eq!(e.interaction(), 0.0);
        assert!((e.total - e0).abs() <= 1e-14 * e0);
    }
}

#[test]
fn interaction_grows_with_scattering_length() {
    let ms = ball(6, 400.0);
    let b = ms.rho().powf(-1.0 / 3.0);
    let values: Vec<f64> = [0.25, 0.5, 1.0, 2.0]
        .iter()
        .map(|&a| energy_assembled(&ms, &hard_core_profile(a, b), KernelMode::Exact, None).unwrap().interaction())
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
}

#[test]
fn corrections_refused_outside_dilute_regime() {
    let ms = ball(6, 40.0);
    let jp = hard_core_profile(1.0, 3.0);
    let r = energy_assembled(&ms, &jp, KernelMode::Quartic, Some(CorrectionRequest { s: 1.0, threshold: 1e-6 }));
    assert!(matches!(r, Err(fermigas::Error::DiluteRegimeViolated(_))));
}

#[test]
fn box_gluing_at_reference_choice() {
    // One-dimensional choice: N = x^{-33/13}, b = x^{-9/13}, d_c = x^{-24/13}.
    let mut prev = f64::INFINITY;
    for x in [1e-3, 1e-5, 1e-7] {
        let inp = inputs_for_choice(1, x, [33.0 / 13.0, 9.0 / 13.0, 24.0 / 13.0]);
        let ell = inp.ell.unwrap();
        let e_free = closed_form_bound(x, 1.0, 1.0, 1).unwrap().e_free;
        let r =
            box_method_density(&BoxInput { d: 1, n: inp.n, ell, corridor: inp.corridor.unwrap(), b: inp.b, e_box: e_free * ell }).unwrap();
        assert!((r.rho / x - 1.0).abs() < 1e-12);
        let dilution = 1.0 - r.rho_tilde / r.rho;
        assert!(dilution > 0.0 && dilution < prev);
        prev = dilution;
    }
    assert!(box_method_density(&BoxInput { d: 3, n: 10.0, ell: 5.0, corridor: 3.0, b: 1.0, e_box: 1.0 }).is_err());
}

#[test]
fn budget_vanishes_with_scattering_length() {
    // Only the kinetic terms survive a -> 0.
    let with_a: Vec<&str> =
        term_table(3).unwrap().iter().filter(|t| t.factors.iter().any(|f| f.0 == Quantity::A)).map(|t| t.label).collect();
    assert_eq!(with_a.len(), term_table(3).unwrap().len() - 2);
    let mut prev = f64::INFINITY;
    for a in [1e-2, 1e-4, 1e-6] {
        let inp = BudgetInputs { rho: 1e-3, a, a0: a, b: 10.0, s: 1.0, n: 1e4, r0: a, ell: None, corridor: None };
        let b = error_budget(3, &inp).unwrap();
        let worst = b.terms.iter().filter(|t| with_a.contains(&t.label)).map(|t| t.value).fold(0.0, f64::max) / b.leading.e_free;
        assert!(worst < 1e-3 * prev, "a = {a}: {worst}");
        assert!(b.leading.e_interaction < 1e-3 * b.leading.e_free);
        prev = worst;
    }
    assert!(prev < 1e-40);
}

#[test]
fn budget_exponent_approaches_optimum_from_below() {
    for d in [1usize, 2, 3] {
        let o = optimize_exponents(d).unwrap();
        let target = *o.gamma.numer() as f64 / *o.gamma.denom() as f64;
        let gammas: Vec<f64> = [1e-3, 1e-5, 1e-8, 1e-10].iter().map(|&x| budget_report(d, x).unwrap().optimized.gamma).collect();
        assert!(gammas.windows(2).all(|w| w[1] > w[0]), "d = {d}: {gammas:?}");
        assert!(gammas.iter().all(|g| *g < target));
    }
}

#[test]
fn reference_exponents_are_optimal() {
    for d in [1usize, 2, 3] {
        let r = budget_report(d, 1e-4).unwrap();
        assert_eq!(r.reference_gamma, r.optimum.gamma);
        assert!(r.optimum.unique);
        assert_eq!(r.reference_choice, r.optimum.choice);
    }
}
