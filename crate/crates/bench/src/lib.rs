//! Benchmark fixtures shared by the criterion suites.

use fermigas::{enumerate_momenta, solve_p_wave, JastrowProfile, MomentumSet, RadialPotential, Region};

/// Ball momentum set of radius `r` in a box of side `l`.
pub fn ball(d: usize, r: i64, l: f64) -> MomentumSet {
    enumerate_momenta(&Region::Ball { d }, r, 1, l).expect("valid ball")
}

/// Hard core of unit radius with the Jastrow cutoff at the mean spacing of `ms`.
pub fn hard_core_profile(ms: &MomentumSet) -> JastrowProfile {
    let sol = solve_p_wave(&RadialPotential::hard_core(ms.d, 1.0).expect("valid potential"), 4.0, 400).expect("solve");
    JastrowProfile::new(&sol, ms.rho().powf(-1.0 / ms.d as f64)).expect("cutoff beyond the core")
}
