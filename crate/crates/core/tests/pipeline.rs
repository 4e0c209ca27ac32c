use std::f64::consts::PI;

use fermigas::ggr::set_partitions;
use fermigas::slater::Site;
use fermigas::{
    build_polyhedron, derived_lengths, direct_oracle, enumerate_momenta, kernel_l1, kinetic_sums, normalization_series, solve_p_wave,
    truncated_correlation, DiscreteTorus, FermiPolyhedron, GProfile, GgrSystem, JastrowProfile, KernelSpec, MomentumSet, OneBodyKernel,
    PolyMode, PolyhedronSpec, RadialPotential, Region,
};

#[test]
fn hard_core_lengths_equal_radius() {
    for r0 in [0.5, 1.0, 3.0] {
        let sol = solve_p_wave(&RadialPotential::hard_core(3, r0).unwrap(), 4.0 * r0, 400).unwrap();
        let dl = derived_lengths(&sol).unwrap();
        assert!((dl.a / r0 - 1.0).abs() < 1e-10);
        assert!((dl.a0 / r0 - 1.0).abs() < 1e-10);
        assert!((dl.reff.unwrap() / r0 - 5.0 / 18.0).abs() < 1e-9);
    }
}

#[test]
fn dirichlet_lebesgue_constant_by_quadrature() {
    for r in [3i64, 10, 25] {
        let spec = KernelSpec::new(1, (-r..=r).map(|j| [j, 0, 0]).collect());
        let got = kernel_l1(&spec).unwrap().value;
        // (1/2pi) int |sin((2r+1)x/2) / sin(x/2)| by composite midpoint on [0, pi].
        let steps = 400_000;
        let h = PI / steps as f64;
        let oracle: f64 = (0..steps)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                ((2 * r + 1) as f64 * x / 2.0).sin().abs() / (x / 2.0).sin()
            })
            .sum::<f64>()
            * h
            / PI;
        assert!((got / oracle - 1.0).abs() < 1e-5, "R = {r}: {got} vs {oracle}");
    }
}

#[test]
fn polyhedron_momenta_track_volume() {
    let (p, _) = build_polyhedron(&PolyhedronSpec { d: 3, s: 48, q: 1_000_000, mode: PolyMode::Rational, rng_seed: 3 }).unwrap();
    let p = FermiPolyhedron::from_json(&p.to_json()).unwrap();
    for r in [8i64, 16, 32] {
        let poly = enumerate_momenta(&Region::Polyhedron(Box::new(p.clone())), r, 1, 2.0 * PI).unwrap();
        let vol = 4.0 * PI / 3.0 * (r as f64).powi(3);
        let rel = poly.n() as f64 / vol - 1.0;
        assert!(rel.abs() < 1.0 / r as f64, "R = {r}: {} points, volume {vol}", poly.n());
        let ks = kinetic_sums(&poly).unwrap();
        assert!(ks.dev_s2.abs() < 0.1);
    }
}

#[test]
fn two_cluster_truncation_matches_reduced_densities() {
    let ms = enumerate_momenta(&Region::Ball { d: 3 }, 2, 1, 2.0).unwrap();
    let k = OneBodyKernel::new(&ms);
    let pts = [[0.1, 0.2, 0.0], [0.3, -0.1, 0.2], [-0.2, 0.05, 0.4], [0.0, 0.3, -0.3]];
    let t = truncated_correlation(&k, &[vec![0, 1], vec![2, 3]], &pts).unwrap();
    let direct = k.rho_p(&pts) - k.rho_p(&pts[..2]) * k.rho_p(&pts[2..]);
    let scale = k.rho().powi(4);
    assert!((t.two_cluster.unwrap() - direct).abs() < 1e-10 * scale);
    assert!((t.definition - direct).abs() < 1e-10 * scale);
    assert_eq!(set_partitions(4).len(), 15);
}

#[test]
fn cluster_series_normalization_without_interaction() {
    let l = 2.0 * PI;
    let torus = DiscreteTorus::new(1, l, 12).unwrap();
    let ms = MomentumSet::from_indices(1, l, vec![[-1, 0, 0], [0, 0, 0], [1, 0, 0]]).unwrap();
    let free = GgrSystem::new(&ms, torus, GProfile::zero(torus)).unwrap();
    assert!((direct_oracle(&free, &[]).unwrap().c_over_nfact - 1.0).abs() < 1e-12);
    assert!((normalization_series(&free).unwrap() - 1.0).abs() < 1e-12);
    let sol = solve_p_wave(&RadialPotential::hard_core(1, 0.2).unwrap(), 1.0, 400).unwrap();
    let gp = GProfile::from_jastrow(torus, &JastrowProfile::new(&sol, 1.0).unwrap()).unwrap();
    let sys = free.with_profile(gp);
    let c = direct_oracle(&sys, &[]).unwrap().c_over_nfact;
    assert!(c < 1.0 && c > 0.0);
    assert!((normalization_series(&sys).unwrap() - c).abs() < 1e-10);
    let rho1 = direct_oracle(&sys, &[Site::Node(5)]).unwrap().rho_jas.unwrap();
    assert!((rho1 - 3.0 / l).abs() < 1e-10);
}
