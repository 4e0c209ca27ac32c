use std::f64::consts::PI;
use std::time::{Duration, Instant};

use fermigas::energy::{closed_form_bound, energy_assembled, gamma_formula, optimize_exponents, six_pi2_23, KernelMode};
use fermigas::fermi_surface::{build_polyhedron, enumerate_momenta, kinetic_sums, symmetry_defect, PolyMode, PolyhedronSpec, Region};
use fermigas::ggr::{
    direct_oracle, jastrow_density_series, normalization_series, set_partitions, tree_graph_check, truncated_correlation, GProfile,
    GgrSystem,
};
use fermigas::lebesgue::{one_d_power_kernel_l1, scaling_study, Shape};
use fermigas::scattering::{calibrate_soft_core, effective_range, solve_p_wave, JastrowProfile, MomentKind, RadialPotential};
use fermigas::slater::{linear_fit, rho2_small_separation_fit, rho_p_marginal, DiscreteTorus, OneBodyKernel, Site, WaveTable};
use fermigas::MomentumSet;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let el = t.elapsed();
    let ok = out.pass && el <= budget;
    println!("{} {id:>2} {name}: {} [{:.2}s of {}s]", if ok { "PASS" } else { "FAIL" }, out.detail, el.as_secs_f64(), budget.as_secs());
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn hard_core_scattering() -> Outcome {
    let sol = solve_p_wave(&RadialPotential::hard_core(3, 1.0).unwrap(), 10.0, 400).unwrap();
    let worst = (0..=900).map(|i| 1.0 + 0.01 * i as f64).map(|r| (sol.eval(r).f - (1.0 - r.powi(-3)).max(0.0)).abs()).fold(0.0, f64::max);
    let a0 = sol.a0.unwrap();
    let reff_formula = effective_range(1.0, 1.0);
    let pass = worst <= 1e-8 && (sol.a - 1.0).abs() <= 1e-8 && (a0 - 1.0).abs() <= 1e-6 && reff_formula == 5.0 / 18.0;
    Outcome {
        pass,
        detail: format!("max|f0 - (1-r^-3)| = {worst:.2e}, a - 1 = {:.2e}, a0 - 1 = {:.2e}, R_eff = {reff_formula}", sol.a - 1.0, a0 - 1.0),
    }
}

fn soft_core_calibration() -> Outcome {
    let v0 = calibrate_soft_core(1.0, 2.0, 3).unwrap();
    let sol = solve_p_wave(&RadialPotential::soft_core(3, 2.0, v0).unwrap(), 8.0, 400).unwrap();
    let rel = (sol.a - 1.0).abs();
    Outcome { pass: rel <= 1e-6, detail: format!("V0 = {v0:.10}, recomputed a relative error {rel:.2e}") }
}

fn moment_integrals() -> Outcome {
    let sol = solve_p_wave(&RadialPotential::hard_core(3, 1.0).unwrap(), 4.0, 400).unwrap();
    let jp = JastrowProfile::new(&sol, 100.0).unwrap();
    let m2 = jp.moment_integral(2, MomentKind::EnergyForm).unwrap() / (12.0 * PI) - 1.0;
    let m4 = jp.moment_integral(4, MomentKind::EnergyForm).unwrap() / (36.0 * PI) - 1.0;
    Outcome { pass: m2.abs() <= 3e-4 && m4.abs() <= 1e-2, detail: format!("n=2 relative {m2:.3e}, n=4 relative {m4:.5e}") }
}

fn ggr_identities() -> Outcome {
    let l = 2.0 * PI;
    let sol = solve_p_wave(&RadialPotential::hard_core(1, 0.15).unwrap(), 1.0, 400).unwrap();
    let jp = JastrowProfile::new(&sol, 1.2).unwrap();
    let torus = DiscreteTorus::new(1, l, 16).unwrap();
    let gp = GProfile::from_jastrow(torus, &jp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut norm_err, mut rho2_err, mut rho1_spread) = (0.0f64, 0.0f64, 0.0f64);
    for n in [2i64, 3] {
        let ms = MomentumSet::from_indices(1, l, (0..n).map(|j| [j - n / 2, 0, 0]).collect()).unwrap();
        let sys = GgrSystem::new(&ms, torus, gp.clone()).unwrap();
        norm_err = norm_err.max((normalization_series(&sys).unwrap() - direct_oracle(&sys, &[]).unwrap().c_over_nfact).abs());
        for _ in 0..5 {
            let ext = [0, 1].map(|_| Site::Point([rng.gen_range(0.0..l), 0.0, 0.0]));
            let series = jastrow_density_series(&sys, &ext).unwrap();
            let direct = direct_oracle(&sys, &ext).unwrap().rho_jas.unwrap();
            rho2_err = rho2_err.max((series - direct).abs());
        }
        let r1: Vec<f64> = (0..5).map(|_| direct_oracle(&sys, &[Site::Node(rng.gen_range(0..16))]).unwrap().rho_jas.unwrap()).collect();
        let (lo, hi) = r1.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        rho1_spread = rho1_spread.max(hi - lo);
    }
    Outcome {
        pass: norm_err <= 1e-10 && rho2_err <= 1e-10 && rho1_spread <= 1e-10,
        detail: format!("normalization {norm_err:.2e}, rho2_Jas {rho2_err:.2e}, rho1_Jas spread over nodes {rho1_spread:.2e}"),
    }
}

fn wick_oracle() -> Outcome {
    let mut worst = 0.0f64;
    let mut check = |ms: &MomentumSet, torus: &DiscreteTorus, pts: &[[f64; 3]], ps: &[usize]| {
        let w = WaveTable::new(torus, ms).unwrap();
        let k = OneBodyKernel::new(ms);
        for &p in ps {
            let a = k.rho_p(&pts[..p]);
            let b = rho_p_marginal(torus, &w, &pts[..p]).unwrap();
            worst = worst.max((a - b).abs() / k.rho().powi(p as i32));
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t1 = DiscreteTorus::new(1, 1.0, 16).unwrap();
    for n in 1..=4i64 {
        let ms = MomentumSet::from_indices(1, 1.0, (0..n).map(|j| [j - n / 2, 0, 0]).collect()).unwrap();
        let pts: Vec<[f64; 3]> = (0..3).map(|_| [rng.gen_range(0.0..1.0), 0.0, 0.0]).collect();
        check(&ms, &t1, &pts, &[0, 1, 2, 3]);
    }
    let t3 = DiscreteTorus::new(3, 1.0, 8).unwrap();
    let pts: Vec<[f64; 3]> = (0..3).map(|_| [0, 1, 2].map(|_| rng.gen_range(0.0..1.0))).collect();
    let three = MomentumSet::from_indices(3, 1.0, vec![[0, 0, 0], [1, 0, 0], [0, 1, -1]]).unwrap();
    check(&three, &t3, &pts, &[1, 2, 3]);
    let four = MomentumSet::from_indices(3, 1.0, vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, -1]]).unwrap();
    check(&four, &t3, &pts, &[2, 3]);
    Outcome { pass: worst <= 1e-12, detail: format!("max |det - marginal| / rho^p = {worst:.2e} (1D N<=4 M=16, 3D N=3,4 M=8)") }
}

fn truncated_identity() -> Outcome {
    let ms = enumerate_momenta(&Region::Ball { d: 3 }, 2, 1, 2.0).unwrap();
    let k = OneBodyKernel::new(&ms);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst, mut cases) = (0.0f64, 0usize);
    for _ in 0..50 {
        let pts: Vec<[f64; 3]> = (0..6).map(|_| [0, 1, 2].map(|_| rng.gen_range(0.0..2.0))).collect();
        for n in 2..=6 {
            let scale = k.rho().powi(n as i32);
            for part in set_partitions(n) {
                let t = truncated_correlation(&k, &part, &pts[..n]).unwrap();
                worst = worst.max((t.definition - t.moebius).abs() / scale);
                if let Some(two) = t.two_cluster {
                    worst = worst.max((t.definition - two).abs() / scale);
                    cases += 1;
                }
            }
        }
    }
    Outcome { pass: worst <= 1e-12, detail: format!("{cases} two-cluster cases, max relative gap {worst:.2e}") }
}

fn tree_graph() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    let mut tightest = 0.0f64;
    for n in 2..=5 {
        for _ in 0..100 {
            let mut g = vec![vec![0.0; n]; n];
            for a in 0..n {
                for b in a + 1..n {
                    g[a][b] = -rng.gen_range(0.0..=1.0);
                    g[b][a] = g[a][b];
                }
            }
            let c = tree_graph_check(&g).unwrap();
            ok &= c.ok;
            if c.rhs > 0.0 {
                tightest = tightest.max(c.lhs / c.rhs);
            }
        }
    }
    let cayley = (2..=6).all(|n| tree_graph_check(&vec![vec![-0.5; n]; n]).unwrap().trees == n.pow(n as u32 - 2));
    Outcome { pass: ok && cayley, detail: format!("400 random matrices, max lhs/rhs = {tightest:.3}, Cayley counts n<=6 {cayley}") }
}

fn rho2_coefficients() -> Outcome {
    let ms = enumerate_momenta(&Region::Ball { d: 3 }, 12, 1, 1.0).unwrap();
    let fit = rho2_small_separation_fit(&OneBodyKernel::new(&ms)).unwrap();
    Outcome {
        pass: fit.c2_dev.abs() <= 0.02 && fit.c4_dev.abs() <= 0.1,
        detail: format!("c2 deviation {:.2e}, c4 deviation {:.2e}", fit.c2_dev, fit.c4_dev),
    }
}

fn kinetic_decay() -> Outcome {
    let (mut ns, mut devs, mut devs_kf) = (vec![], vec![], vec![]);
    for r in [10i64, 20, 40] {
        let ms = enumerate_momenta(&Region::Ball { d: 3 }, r, 1, 2.0 * PI).unwrap();
        let ks = kinetic_sums(&ms).unwrap();
        let n = ms.n() as f64;
        ns.push(n);
        devs.push(ks.dev_s2.abs());
        let kf = r as f64;
        devs_kf.push((ks.s2 / (0.6 * kf * kf * n) - 1.0).abs());
    }
    let slope = fermigas::lebesgue::loglog_slope(&ns, &devs);
    let slope_kf = fermigas::lebesgue::loglog_slope(&ns, &devs_kf);
    Outcome {
        pass: (slope + 1.0 / 3.0).abs() <= 0.15,
        detail: format!(
            "slope {slope:.3} (deviations {:.2e}, {:.2e}, {:.2e}); with kF = 2 pi R / L instead of the density: slope {slope_kf:.3}",
            devs[0], devs[1], devs[2]
        ),
    }
}

fn lebesgue_scalings() -> Outcome {
    let balls = scaling_study(&Shape::Ball { d: 3 }, &[4, 8, 16, 32], [0, 0, 0]).unwrap();
    let br: Vec<f64> = balls.iter().map(|r| r.bound_ratio).collect();
    let band = br.iter().cloned().fold(0.0, f64::max) / br.iter().cloned().fold(f64::INFINITY, f64::min);
    let (p, _) = build_polyhedron(&PolyhedronSpec { d: 3, s: 48, q: 1_000_000, mode: PolyMode::Rational, rng_seed: 7 }).unwrap();
    let poly = scaling_study(&Shape::Polyhedron(Box::new(p)), &[4, 6, 8, 12, 16], [0, 0, 0]).unwrap();
    let pmax = poly.iter().map(|r| r.bound_ratio).fold(0.0, f64::max);
    let mut b8 = vec![];
    for m in [16usize, 64, 256, 1024, 4096] {
        let mf = m as f64;
        b8.push(one_d_power_kernel_l1(m, 1).unwrap() / (mf * mf.ln()));
        b8.push(one_d_power_kernel_l1(m, 2).unwrap() / (mf * mf * mf.ln()));
    }
    let b8_band = b8.iter().cloned().fold(0.0, f64::max) / b8.iter().cloned().fold(f64::INFINITY, f64::min);
    let two = one_d_power_kernel_l1(1, 0).unwrap();
    Outcome {
        pass: band <= 10.0 && pmax <= 1.0 && b8_band <= 10.0 && (two - 8.0).abs() <= 1e-8,
        detail: format!(
            "ball L/R in [{:.3}, {:.3}]; polyhedron max L/(s log^3 R) = {pmax:.3}; power kernels ratio band {b8_band:.2}; M=1 integral {two:.12}",
            br.iter().cloned().fold(f64::INFINITY, f64::min),
            br.iter().cloned().fold(0.0, f64::max)
        ),
    }
}

fn energy_consistency() -> Outcome {
    let sol = solve_p_wave(&RadialPotential::hard_core(3, 1.0).unwrap(), 4.0, 400).unwrap();
    let n0 = enumerate_momenta(&Region::Ball { d: 3 }, 12, 1, 1.0).unwrap().n() as f64;
    let (mut xs, mut ys) = (vec![], vec![]);
    let mut routes = 0.0;
    for kfa in [3e-3, 1e-2, 3e-2] {
        let l = (6.0 * PI * PI * n0).powf(1.0 / 3.0) / kfa;
        let ms = enumerate_momenta(&Region::Ball { d: 3 }, 12, 1, l).unwrap();
        let rho = ms.rho();
        let jp = JastrowProfile::new(&sol, rho.powf(-1.0 / 3.0)).unwrap();
        let closed = closed_form_bound(rho, 1.0, 1.0, 3).unwrap().e_interaction;
        let quartic = energy_assembled(&ms, &jp, KernelMode::Quartic, None).unwrap().interaction();
        if kfa == 1e-2 {
            let exact = energy_assembled(&ms, &jp, KernelMode::Exact, None).unwrap().interaction();
            routes = (quartic / closed - 1.0).abs().max((exact / closed - 1.0).abs());
        }
        xs.push(rho.powf(2.0 / 3.0));
        ys.push(quartic / closed - 1.0);
    }
    let slope = linear_fit(&xs, &ys).1;
    let target = -9.0 / 35.0 * six_pi2_23();
    let rel = slope / target - 1.0;
    Outcome {
        pass: routes <= 0.01 && rel.abs() <= 0.1,
        detail: format!("route gap at kFa=1e-2 {routes:.2e}; residual slope {slope:.4} vs {target:.4} ({:+.2}%)", 100.0 * rel),
    }
}

fn exponent_optimization() -> Outcome {
    let r = |n, d| Rational64::new(n, d);
    let o3 = optimize_exponents(3).unwrap();
    let o1 = optimize_exponents(1).unwrap();
    let pass = o3.choice == [r(6, 7), r(1, 3), r(3, 1)]
        && o3.gamma == r(12, 7)
        && gamma_formula(3, &o3.choice) == r(12, 7)
        && o1.gamma == r(22, 13)
        && gamma_formula(1, &o1.choice) == r(22, 13);
    Outcome {
        pass,
        detail: format!(
            "3D (alpha, beta, delta) = ({}, {}, {}) gamma {} log power {}; 1D ({}, {}, {}) gamma {}",
            o3.choice[0], o3.choice[1], o3.choice[2], o3.gamma, o3.log_power, o1.choice[0], o1.choice[1], o1.choice[2], o1.gamma
        ),
    }
}

fn polyhedron_construction() -> Outcome {
    let mut pass = true;
    let mut parts = vec![];
    for q in [1_000_000u64, 100_000_000] {
        let (p, rep) = build_polyhedron(&PolyhedronSpec { d: 3, s: 48, q, mode: PolyMode::Rational, rng_seed: 7 }).unwrap();
        let vol = (rep.volume_divergence / (4.0 * PI / 3.0) - 1.0).abs();
        let flip = p.sign_flip_invariant();
        let extreme = p.all_corners_extreme().unwrap();
        let ms = enumerate_momenta(&Region::Polyhedron(Box::new(p)), 20, 1, 2.0 * PI).unwrap();
        let sd = symmetry_defect(&ms, q, (0, 1), |_| 1.0).unwrap();
        pass &= vol <= 1e-12 && flip && extreme && sd.ratio <= 1.0;
        parts.push(format!("Q={q}: volume {vol:.1e}, flips {flip}, extreme {extreme}, defect ratio {:.2e}", sd.ratio));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn main() {
    let results = [
        run(1, "hard-core scattering oracle", secs(1), hard_core_scattering),
        run(2, "soft-core calibration", secs(5), soft_core_calibration),
        run(3, "moment integrals", secs(1), moment_integrals),
        run(4, "GGR exact identities", secs(120), ggr_identities),
        run(5, "Wick determinant oracle", secs(300), wick_oracle),
        run(6, "truncated-correlation identity", secs(60), truncated_identity),
        run(7, "tree-graph inequality", secs(60), tree_graph),
        run(8, "two-point small-separation coefficients", secs(60), rho2_coefficients),
        run(9, "kinetic sums", secs(30), kinetic_decay),
        run(10, "Lebesgue scalings", secs(600), lebesgue_scalings),
        run(11, "energy consistency", secs(300), energy_consistency),
        run(12, "exponent optimization", secs(10), exponent_optimization),
        run(13, "polyhedron construction", secs(120), polyhedron_construction),
    ];
    let failed = results.iter().filter(|r| !**r).count();
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
