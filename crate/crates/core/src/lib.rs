//! Constructive objects for a Jastrow-Slater trial state of a dilute
//! spin-polarized Fermi gas, with independent numerical cross-checks.

pub mod consts;
pub mod energy;
pub mod error;
pub mod fermi_surface;
pub mod ggr;
pub mod hull;
pub mod lebesgue;
pub mod ode;
pub mod primes;
pub mod quad;
pub mod scattering;
pub mod slater;

pub use energy::{
    box_method_density, closed_form_bound, ding_zhang_curve, energy_assembled, error_budget, optimize_exponents, BoxInput, BudgetInputs,
    KernelMode,
};
pub use error::{Error, Result};
pub use fermi_surface::{
    build_polyhedron, enumerate_momenta, kinetic_sums, symmetry_defect, FermiPolyhedron, KineticSums, MomentumSet, PolyMode,
    PolyhedronSpec, Region,
};
pub use ggr::{
    catalog, catalog_diagrams, convergence_parameter, direct_oracle, enumerate_graphs, exp_resummation_check, jastrow_density_series,
    linked_expansion, normalization_series, small_diagram_catalog, tree_graph_check, truncated_correlation, Diagram, GGraph, GProfile,
    GgrSystem,
};
pub use lebesgue::{kernel_l1, one_d_power_kernel_l1, scaling_study, KernelSpec};
pub use scattering::{
    calibrate_soft_core, derived_lengths, odd_wave_length, solve_p_wave, DerivedLengths, JastrowProfile, MomentKind, RadialPotential,
    ScatteringSolution,
};
pub use slater::{rho2_small_separation_fit, rho3_quartic_bound_check, DiscreteTorus, OneBodyKernel};
