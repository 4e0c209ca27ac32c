//! Subcommand arguments and their implementations.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use fermigas::energy::{budget_report, CorrectionRequest};
use fermigas::lebesgue::{one_d_power_kernel_l1, Shape};
use fermigas::scattering::derived_lengths_lenient;
use fermigas::slater::{set_coefficients, Site};
use fermigas::{
    box_method_density, calibrate_soft_core, catalog, catalog_diagrams, closed_form_bound, ding_zhang_curve, direct_oracle,
    energy_assembled, enumerate_momenta, exp_resummation_check, jastrow_density_series, kinetic_sums, normalization_series,
    rho2_small_separation_fit, rho3_quartic_bound_check, scaling_study, small_diagram_catalog, solve_p_wave, BoxInput, DiscreteTorus,
    FermiPolyhedron, GProfile, GgrSystem, JastrowProfile, KernelMode, MomentKind, MomentumSet, OneBodyKernel, PolyMode, PolyhedronSpec,
    RadialPotential, Region,
};

use crate::output::{Artifact, Cell, Format};
use crate::sweep::{parse_int_sweep, parse_points, parse_ratio, parse_sweep, parse_weights};
use crate::{CliError, RunContext};

pub struct Outcome {
    pub artifact: Artifact,
    pub default_format: Format,
    /// Reported after the artifact is written.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn csv(artifact: Artifact) -> Self {
        Outcome { artifact, default_format: Format::Csv, failure: None }
    }

    fn json(artifact: Artifact) -> Self {
        Outcome { artifact, default_format: Format::Json, failure: None }
    }
}

type Res = Result<Outcome, CliError>;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))
}

fn load_polyhedron(path: &PathBuf) -> Result<FermiPolyhedron, CliError> {
    FermiPolyhedron::from_json(&read(path)?).map_err(|e| config(e.to_string()))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Maps `f` over `items` on up to `threads` scoped threads, keeping order.
fn par_map<T: Sync, U: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<U>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

// ---------------------------------------------------------------- scattering

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PotentialArg {
    Hard,
    Soft,
}

#[derive(Args, Debug)]
pub struct ScatteringArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, value_enum, default_value = "hard")]
    potential: PotentialArg,
    /// Range of the potential.
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    /// Soft-core height.
    #[arg(long)]
    v0: Option<f64>,
    /// Calibrate a soft core to this scattering length (range = radius factor times it).
    #[arg(long)]
    calibrate_a: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    radius_factor: f64,
    /// Outer radius of the solve; defaults to four ranges.
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    grid: usize,
    /// Jastrow cutoff for the moment integrals.
    #[arg(long)]
    b: Option<f64>,
}

pub fn scattering(a: &ScatteringArgs, _ctx: &RunContext) -> Res {
    let pot = match (a.potential, a.calibrate_a) {
        (_, Some(target)) => {
            let v0 = calibrate_soft_core(target, a.radius_factor, a.dim)?;
            RadialPotential::soft_core(a.dim, a.radius_factor * target, v0)?
        }
        (PotentialArg::Hard, None) => RadialPotential::hard_core(a.dim, a.r0)?,
        (PotentialArg::Soft, None) => {
            let v0 = a.v0.ok_or_else(|| config("--potential soft needs --v0 or --calibrate-a"))?;
            RadialPotential::soft_core(a.dim, a.r0, v0)?
        }
    };
    let sol = solve_p_wave(&pot, a.r_max.unwrap_or(4.0 * pot.r0), a.grid)?;
    let rows = (0..sol.r.len()).map(|i| vec![sol.r[i].into(), sol.f0[i].into(), sol.f0_prime[i].into()]).collect();
    let mut art = Artifact::table("scattering", "zero-energy p-wave solution f0(r) and f0'(r)", &["r", "f0", "f0_prime"], rows)
        .note("d", a.dim)
        .note("r0", pot.r0)
        .note("a", sol.a)
        .note("variational_a", sol.variational_length())
        .note("residual", sol.residual);
    if let Some(v0) = pot_height(&pot) {
        art = art.note("v0", v0);
    }
    if a.dim == 3 {
        let dl = derived_lengths_lenient(&sol)?;
        art = art.note("a0", dl.a0);
        if let Some(r) = dl.reff {
            art = art.note("reff", r);
        }
    }
    if let Some(ainv) = sol.a0_inv {
        art = art.note("a0_inv", ainv);
    }
    if let Some(b) = a.b {
        let jp = JastrowProfile::new(&sol, b)?;
        art = art.note("b", b);
        for n in [0, 2, 4] {
            match jp.moment_integral(n, MomentKind::EnergyForm) {
                Ok(m) => art = art.note(&format!("moment_{n}"), m),
                Err(e) => art = art.note(&format!("moment_{n}"), e.to_string()),
            }
        }
    }
    Ok(Outcome::csv(art))
}

fn pot_height(p: &RadialPotential) -> Option<f64> {
    let v = p.v(0.5 * p.r0);
    (v.is_finite() && p.hard_core_radius() == 0.0).then_some(v)
}

// ---------------------------------------------------------------- polyhedron

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Rational,
    Simple,
}

#[derive(Args, Debug)]
pub struct PolyhedronArgs {
    /// JSON spec {"d", "s", "Q", "mode", "rng_seed"}; overrides the flags.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 48)]
    s: usize,
    #[arg(long, default_value_t = 1_000_000)]
    q: u64,
    #[arg(long, value_enum, default_value = "rational")]
    mode: ModeArg,
}

pub fn polyhedron(a: &PolyhedronArgs, ctx: &RunContext) -> Res {
    let spec = match &a.spec {
        Some(p) => serde_json::from_str::<PolyhedronSpec>(&read(p)?).map_err(|e| config(format!("{}: {e}", p.display())))?,
        None => PolyhedronSpec {
            d: a.dim,
            s: a.s,
            q: a.q,
            mode: match a.mode {
                ModeArg::Rational => PolyMode::Rational,
                ModeArg::Simple => PolyMode::Simple,
            },
            rng_seed: ctx.seed,
        },
    };
    let (poly, report) = fermigas::build_polyhedron(&spec)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut v = to_json(&poly);
    v["report"] = to_json(&report);
    Ok(Outcome::json(Artifact::json("polyhedron", "Fermi polyhedron corners, faces and construction report", v)))
}

// ---------------------------------------------------------------- momenta

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegionArg {
    Ball,
    Polyhedron,
}

#[derive(Args, Debug)]
pub struct MomentaArgs {
    #[arg(long, value_enum, default_value = "ball")]
    region: RegionArg,
    /// Polyhedron JSON (from the polyhedron subcommand).
    #[arg(long)]
    poly: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// kF L / 2pi as `num` or `num/den`.
    #[arg(long, default_value = "4")]
    r: String,
    /// Box side; defaults to 2pi.
    #[arg(long)]
    l: Option<f64>,
}

fn region_of(region: RegionArg, poly: &Option<PathBuf>, dim: usize) -> Result<Region, CliError> {
    Ok(match region {
        RegionArg::Ball => Region::Ball { d: dim },
        RegionArg::Polyhedron => {
            let p = poly.as_ref().ok_or_else(|| config("--region polyhedron needs --poly"))?;
            Region::Polyhedron(Box::new(load_polyhedron(p)?))
        }
    })
}

pub fn momenta(a: &MomentaArgs, _ctx: &RunContext) -> Res {
    let region = region_of(a.region, &a.poly, a.dim)?;
    let (num, den) = parse_ratio(&a.r)?;
    let ms = enumerate_momenta(&region, num, den, a.l.unwrap_or(2.0 * PI))?;
    let ks = kinetic_sums(&ms)?;
    let rows = (0..ms.n())
        .map(|i| {
            let (j, k) = (ms.points[i], ms.momentum(i));
            vec![j[0].into(), j[1].into(), j[2].into(), k[0].into(), k[1].into(), k[2].into()]
        })
        .collect();
    let art =
        Artifact::table("momenta", "lattice momentum indices j and momenta k = 2pi j / L", &["j1", "j2", "j3", "k1", "k2", "k3"], rows)
            .note("d", ms.d)
            .note("L", ms.l)
            .note("N", ms.n())
            .note("rho", ms.rho())
            .note("kF", ms.kf())
            .note("ties", ms.ties)
            .note("s2", ks.s2)
            .note("s4", ks.s4)
            .note("s4_1", ks.s4_1)
            .note("dev_s2", ks.dev_s2)
            .note("dev_s4", ks.dev_s4)
            .note("dev_s4_1", ks.dev_s4_1);
    Ok(Outcome::csv(art))
}

// ---------------------------------------------------------------- lebesgue

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShapeArg {
    Ball,
    Polyhedron,
    Power,
}

#[derive(Args, Debug)]
pub struct LebesgueArgs {
    #[arg(long, value_enum, default_value = "ball")]
    shape: ShapeArg,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Polyhedron JSON; built from --seed with s = 48, Q = 1e6 when absent.
    #[arg(long)]
    poly: Option<PathBuf>,
    /// Radii as an integer sweep.
    #[arg(long, default_value = "4:16:3")]
    r: String,
    /// Monomial exponents of the weight, `e1,e2,e3`.
    #[arg(long, default_value = "0,0,0")]
    weights: String,
    /// Power-kernel sizes M.
    #[arg(long, default_value = "16:4096:5")]
    m: String,
    /// Power-kernel exponent.
    #[arg(long, default_value_t = 1)]
    p: u32,
}

pub fn lebesgue(a: &LebesgueArgs, ctx: &RunContext) -> Res {
    if let ShapeArg::Power = a.shape {
        let ms = parse_int_sweep(&a.m)?;
        let mut rows = vec![];
        for m in ms {
            let m = usize::try_from(m).map_err(|_| config("M must be nonnegative"))?;
            let v = one_d_power_kernel_l1(m, a.p)?;
            let mf = m as f64;
            rows.push(vec![m.into(), (a.p as usize).into(), v.into(), (v / (mf.powi(a.p as i32) * mf.max(2.0).ln())).into()]);
        }
        let art = Artifact::table(
            "lebesgue",
            "L1 norm of sum_{m<=M} m^p e^{imx} and its ratio to M^p log M",
            &["M", "p", "value", "ratio"],
            rows,
        );
        return Ok(Outcome::csv(art));
    }
    let shape = match a.shape {
        ShapeArg::Ball => Shape::Ball { d: a.dim },
        _ => Shape::Polyhedron(Box::new(match &a.poly {
            Some(p) => load_polyhedron(p)?,
            None => {
                fermigas::build_polyhedron(&PolyhedronSpec { d: a.dim, s: 48, q: 1_000_000, mode: PolyMode::Rational, rng_seed: ctx.seed })?
                    .0
            }
        })),
    };
    let rows = scaling_study(&shape, &parse_int_sweep(&a.r)?, parse_weights(&a.weights)?)?
        .into_iter()
        .map(|r| {
            vec![
                r.shape.into(),
                r.r.into(),
                r.n.into(),
                r.s.into(),
                r.weight.into(),
                r.value.into(),
                r.bound_ratio.into(),
                r.error_estimate.into(),
            ]
        })
        .collect();
    let art = Artifact::table(
        "lebesgue",
        "weighted Lebesgue constants of momentum sets and their ratio to the reference growth",
        &["shape", "R", "N", "s", "weight", "value", "bound_ratio", "error_estimate"],
        rows,
    );
    Ok(Outcome::csv(art))
}

// ---------------------------------------------------------------- densities

#[derive(Args, Debug)]
pub struct DensitiesArgs {
    #[arg(long, value_enum, default_value = "ball")]
    region: RegionArg,
    #[arg(long)]
    poly: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value = "12")]
    r: String,
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    /// Random triples for the three-point bound (3D only; 0 skips).
    #[arg(long, default_value_t = 0)]
    rho3: usize,
    /// Evaluate rho_p at `x,y,z;x,y,z;...`.
    #[arg(long)]
    points: Option<String>,
}

pub fn densities(a: &DensitiesArgs, ctx: &RunContext) -> Res {
    let region = region_of(a.region, &a.poly, a.dim)?;
    let (num, den) = parse_ratio(&a.r)?;
    let ms = enumerate_momenta(&region, num, den, a.l)?;
    let kernel = OneBodyKernel::new(&ms);
    let sc = set_coefficients(&ms);
    let mut rows: Vec<Vec<Cell>> = vec![
        vec!["rho".into(), kernel.rho().into(), Cell::S(String::new())],
        vec!["c2".into(), sc.c2.into(), Cell::S(String::new())],
        vec!["c2c4".into(), sc.c2c4.into(), Cell::S(String::new())],
    ];
    if a.dim == 3 && ms.n() >= 1000 {
        let fit = rho2_small_separation_fit(&kernel)?;
        rows.push(vec!["fit_c2".into(), fit.c2.into(), fit.c2_ref.into()]);
        rows.push(vec!["fit_c4".into(), fit.c4.into(), fit.c4_ref.into()]);
        rows.push(vec!["fit_spread".into(), fit.spread.into(), Cell::S(String::new())]);
    }
    if a.rho3 > 0 {
        let c = rho3_quartic_bound_check(&kernel, a.rho3, ctx.seed)?;
        rows.push(vec!["rho3_max_ratio".into(), c.max_ratio.into(), Cell::S(String::new())]);
        rows.push(vec!["rho3_min_value".into(), c.min_value.into(), Cell::S(String::new())]);
    }
    if let Some(p) = &a.points {
        let pts = parse_points(p)?;
        rows.push(vec![format!("rho_{}", pts.len()).into(), kernel.rho_p(&pts).into(), Cell::S(String::new())]);
    }
    let art = Artifact::table(
        "densities",
        "reduced densities of the free determinant and their small-separation coefficients",
        &["quantity", "value", "reference"],
        rows,
    )
    .note("N", ms.n())
    .note("L", ms.l);
    Ok(Outcome::csv(art))
}

// ---------------------------------------------------------------- ggr

#[derive(Args, Debug)]
pub struct GgrArgs {
    /// Compare the cluster series with brute-force grid sums (default action).
    #[arg(long)]
    verify: bool,
    /// Evaluate a catalog diagram by both routes; `all` runs every applicable one.
    #[arg(long, conflicts_with = "verify")]
    catalog: Option<String>,
    /// Linked vacuum sums up to this order, with the exponential resummation.
    #[arg(long, conflicts_with_all = ["verify", "catalog"])]
    expansion: Option<usize>,
    /// List the catalog diagrams (edges, permutations, class indices) as JSON.
    #[arg(long, conflicts_with_all = ["verify", "catalog", "expansion"])]
    list: bool,
    /// Particle number.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Grid points per axis.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Hard-core radius.
    #[arg(long, default_value_t = 0.15)]
    r0: f64,
    /// Jastrow cutoff.
    #[arg(long, default_value_t = 1.2)]
    b: f64,
    /// Box side; defaults to 2pi.
    #[arg(long)]
    l: Option<f64>,
    /// Random point pairs for the two-point check.
    #[arg(long, default_value_t = 5)]
    pairs: usize,
}

pub const VERIFY_TOL: f64 = 1e-10;

/// The `n` lattice indices of smallest norm, ties broken lexicographically.
fn lowest_indices(d: usize, n: usize) -> Vec<[i64; 3]> {
    let w = (n as f64).powf(1.0 / d as f64).ceil() as i64 + 1;
    let range = |k: usize| if k < d { -w..=w } else { 0..=0 };
    let mut all = vec![];
    for x in range(0) {
        for y in range(1) {
            for z in range(2) {
                all.push([x, y, z]);
            }
        }
    }
    all.sort_by_key(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2], *p));
    all.truncate(n);
    all
}

fn ggr_system(a: &GgrArgs) -> Result<GgrSystem, CliError> {
    let l = a.l.unwrap_or(2.0 * PI);
    let sol = solve_p_wave(&RadialPotential::hard_core(a.dim, a.r0)?, a.b.max(4.0 * a.r0), 400)?;
    let jp = JastrowProfile::new(&sol, a.b)?;
    let torus = DiscreteTorus::new(a.dim, l, a.grid)?;
    let gp = GProfile::from_jastrow(torus, &jp)?;
    let ms = MomentumSet::from_indices(a.dim, l, lowest_indices(a.dim, a.n))?;
    Ok(GgrSystem::new(&ms, torus, gp)?)
}

pub fn ggr(a: &GgrArgs, ctx: &RunContext) -> Res {
    if a.list {
        let entries = catalog()
            .into_iter()
            .map(|e| {
                let diagrams = catalog_diagrams(e.id)?;
                let mut v = to_json(&e);
                v["vertices"] = json!(e.q + e.p);
                v["diagrams"] = to_json(&diagrams);
                Ok(v)
            })
            .collect::<Result<Vec<_>, fermigas::Error>>()?;
        return Ok(Outcome::json(Artifact::json(
            "ggr_catalog_list",
            "small-diagram catalog with its diagrams",
            json!({ "entries": entries }),
        )));
    }
    let sys = ggr_system(a)?;
    if let Some(id) = &a.catalog {
        let mut rows = vec![];
        for e in catalog().into_iter().filter(|e| id == "all" || e.id == id) {
            if e.one_dimensional && a.dim != 1 && id == "all" {
                continue;
            }
            let ext: Vec<usize> = (0..e.q).map(|i| (i * sys.torus.nodes() / (e.q + 1)) % sys.torus.nodes()).collect();
            let v = small_diagram_catalog(&sys, e.id, &ext)?;
            rows.push(vec![
                e.id.into(),
                e.q.into(),
                e.p.into(),
                v.diagrams.into(),
                v.fourier.re.into(),
                v.fourier.im.into(),
                v.direct.re.into(),
                v.direct.im.into(),
                v.discrepancy().into(),
            ]);
        }
        if rows.is_empty() {
            return Err(CliError::Core(fermigas::Error::UnknownId(id.clone())));
        }
        let art = Artifact::table(
            "ggr_catalog",
            "small diagrams by momentum conservation and by direct grid summation",
            &["id", "q", "p", "diagrams", "fourier_re", "fourier_im", "direct_re", "direct_im", "discrepancy"],
            rows,
        );
        return Ok(Outcome::csv(art));
    }
    if let Some(p) = a.expansion {
        let ex = exp_resummation_check(&sys, p)?;
        let rows = ex
            .rows
            .iter()
            .zip(&ex.errors)
            .map(|(r, (_, err))| vec![r.p.into(), r.diagrams.into(), r.term.into(), r.partial_sum.into(), r.bound.into(), (*err).into()])
            .collect();
        let art = Artifact::table(
            "ggr_expansion",
            "linked vacuum sums, their bound shape, and the error of exp(partial sum) against C_N/N!",
            &["p", "diagrams", "term", "partial_sum", "bound", "exp_error"],
            rows,
        )
        .note("c_over_nfact", ex.direct);
        return Ok(Outcome::csv(art));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let l = sys.torus.l;
    let mut rows: Vec<Vec<Cell>> = vec![];
    let mut residual = 0.0f64;
    let mut check = |name: String, series: f64, direct: f64| {
        residual = residual.max((series - direct).abs());
        rows.push(vec![name.into(), series.into(), direct.into(), (series - direct).abs().into()]);
    };
    check("normalization".into(), normalization_series(&sys)?, direct_oracle(&sys, &[])?.c_over_nfact);
    if sys.n() >= 2 {
        for i in 0..a.pairs {
            let mut pt = || {
                let mut x = [0.0; 3];
                for c in x.iter_mut().take(a.dim) {
                    *c = rng.gen_range(0.0..l);
                }
                Site::Point(x)
            };
            let ext = [pt(), pt()];
            let series = jastrow_density_series(&sys, &ext)?;
            let direct = direct_oracle(&sys, &ext)?.rho_jas.expect("two external points");
            check(format!("rho2_pair_{i}"), series, direct);
        }
    }
    let first = direct_oracle(&sys, &[Site::Node(0)])?.rho_jas.expect("one external point");
    for i in 0..a.pairs {
        let node = rng.gen_range(0..sys.torus.nodes());
        let v = direct_oracle(&sys, &[Site::Node(node)])?.rho_jas.expect("one external point");
        check(format!("rho1_node_{node}_{i}"), v, first);
    }
    let art = Artifact::table(
        "ggr_verify",
        "cluster series against brute-force grid sums; rho1 rows compare against node 0",
        &["check", "series", "direct", "abs_error"],
        rows,
    )
    .note("N", sys.n())
    .note("residual", residual)
    .note("tolerance", VERIFY_TOL);
    let failure = (residual > VERIFY_TOL)
        .then(|| CliError::Core(fermigas::Error::Precondition(format!("verification residual {residual:e} above {VERIFY_TOL:e}"))));
    Ok(Outcome { artifact: art, default_format: Format::Csv, failure })
}

// ---------------------------------------------------------------- energy

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CurveArg {
    /// Hard core, Reff = 5a/18.
    Hc,
    /// Soft core calibrated to a = 1 with range 2.
    Sc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Quartic,
    Exact,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("action").required(true).args(["curve", "closed", "budget", "assembled", "box_"]))]
pub struct EnergyArgs {
    /// Low-density expansion e/(rho kF^2) against kF a.
    #[arg(long, value_enum)]
    curve: Option<CurveArg>,
    /// Closed-form upper bound over a density sweep.
    #[arg(long)]
    closed: bool,
    /// Error budgets at the reference and optimized exponent choices.
    #[arg(long)]
    budget: bool,
    /// Kinetic plus two-body energy of a finite box with a hard core of radius a.
    #[arg(long)]
    assembled: bool,
    /// Glue copies of the assembled box state with corridors.
    #[arg(long = "box")]
    box_: bool,
    #[arg(long, default_value = "0.01:0.5:40")]
    kfa: String,
    #[arg(long, default_value = "1e-6:1e-2:5")]
    rho: String,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Defaults to a.
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// a^d rho for the budget; a sweep gives one report per value.
    #[arg(long, default_value = "1e-3")]
    x: String,
    /// kF L / 2pi of the box ball.
    #[arg(long, default_value = "12")]
    r: String,
    #[arg(long, value_enum, default_value = "quartic")]
    kernel: KernelArg,
    /// Add the beyond-quartic remainder, gated by the convergence parameter.
    #[arg(long)]
    corrections: bool,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    /// Corridor width; defaults to a tenth of the box side.
    #[arg(long)]
    corridor: Option<f64>,
    /// Box energy to glue instead of the assembled one.
    #[arg(long)]
    e_box: Option<f64>,
}

fn reff_over_a(curve: CurveArg) -> Result<f64, CliError> {
    Ok(match curve {
        CurveArg::Hc => 5.0 / 18.0,
        CurveArg::Sc => {
            let v0 = calibrate_soft_core(1.0, 2.0, 3)?;
            let sol = solve_p_wave(&RadialPotential::soft_core(3, 2.0, v0)?, 8.0, 400)?;
            let dl = derived_lengths_lenient(&sol)?;
            5.0 * dl.a * dl.a / (18.0 * dl.a0 * dl.a0)
        }
    })
}

struct BoxState {
    kfa: f64,
    n: usize,
    l: f64,
    rho: f64,
    b: f64,
    items: Vec<(String, f64)>,
    total: f64,
}

fn assemble(a: &EnergyArgs, kfa: f64) -> Result<BoxState, CliError> {
    if a.dim != 3 {
        return Err(config("assembled energies are three-dimensional"));
    }
    let (num, den) = parse_ratio(&a.r)?;
    let region = Region::Ball { d: 3 };
    let n0 = enumerate_momenta(&region, num, den, 1.0)?.n() as f64;
    let l = (6.0 * PI * PI * n0).powf(1.0 / 3.0) / (kfa / a.a);
    let ms = enumerate_momenta(&region, num, den, l)?;
    let sol = solve_p_wave(&RadialPotential::hard_core(3, a.a)?, 4.0 * a.a, 400)?;
    let b = ms.rho().powf(-1.0 / 3.0);
    let jp = JastrowProfile::new(&sol, b)?;
    let mode = match a.kernel {
        KernelArg::Quartic => KernelMode::Quartic,
        KernelArg::Exact => KernelMode::Exact,
    };
    let corr = a.corrections.then_some(CorrectionRequest { s: a.s, threshold: a.threshold });
    let e = energy_assembled(&ms, &jp, mode, corr)?;
    Ok(BoxState { kfa, n: e.n, l, rho: e.rho, b, items: e.items.into_iter().map(|i| (i.label, i.value)).collect(), total: e.total })
}

pub fn energy(a: &EnergyArgs, ctx: &RunContext) -> Res {
    let a0 = a.a0.unwrap_or(a.a);
    if let Some(curve) = a.curve {
        let ratio = reff_over_a(curve)?;
        let rows = ding_zhang_curve(&parse_sweep(&a.kfa)?, ratio)?
            .into_iter()
            .map(|r| vec![r.kfa.into(), r.e_total.into(), r.e_k2.into(), r.e_k3.into(), r.e_k5.into(), r.e_k6.into()])
            .collect();
        let art = Artifact::table(
            "energy_curve",
            "e/(rho kF^2) of the low-density expansion; e_kN are partial sums through order N",
            &["kFa", "e_total", "e_k2", "e_k3", "e_k5", "e_k6"],
            rows,
        )
        .note("reff_over_a", ratio);
        return Ok(Outcome::csv(art));
    }
    if a.closed {
        let mut rows = vec![];
        for rho in parse_sweep(&a.rho)? {
            let c = closed_form_bound(rho, a.a, a0, a.dim)?;
            if c.dilute_warning {
                eprintln!("warning: a^d rho = {:e} is not dilute", a.a.powi(a.dim as i32) * rho);
            }
            rows.push(vec![rho.into(), c.e_free.into(), c.e_interaction.into(), c.e_correction.into(), c.total.into()]);
        }
        let art = Artifact::table(
            "energy_closed",
            "closed-form upper bound on the energy density",
            &["rho", "e_free", "e_interaction", "e_correction", "total"],
            rows,
        )
        .note("d", a.dim)
        .note("a", a.a)
        .note("a0", a0);
        return Ok(Outcome::csv(art));
    }
    if a.budget {
        let reports =
            parse_sweep(&a.x)?.into_iter().map(|x| budget_report(a.dim, x).map(|r| to_json(&r))).collect::<Result<Vec<_>, _>>()?;
        let art = Artifact::json(
            "energy_budget",
            "error terms with unit constants at the reference and optimized exponents",
            json!({ "d": a.dim, "reports": reports }),
        );
        return Ok(Outcome::json(art));
    }
    let kfas = parse_sweep(&a.kfa)?;
    let states = par_map(&kfas, ctx.threads, |&k| assemble(a, k)).into_iter().collect::<Result<Vec<_>, _>>()?;
    if a.assembled {
        let labels: Vec<String> = states[0].items.iter().map(|(l, _)| l.clone()).collect();
        let mut columns = vec!["kFa", "N", "L", "rho", "b"];
        columns.extend(labels.iter().map(String::as_str));
        columns.extend(["total", "closed_interaction"]);
        let mut rows = vec![];
        for s in &states {
            let mut row: Vec<Cell> = vec![s.kfa.into(), s.n.into(), s.l.into(), s.rho.into(), s.b.into()];
            row.extend(s.items.iter().map(|(_, v)| Cell::F(*v)));
            row.push(s.total.into());
            row.push(closed_form_bound(s.rho, a.a, a0, 3)?.e_interaction.into());
            rows.push(row);
        }
        return Ok(Outcome::csv(Artifact::table(
            "energy_assembled",
            "energy density of the finite-box trial state by item",
            &columns,
            rows,
        )));
    }
    if a.e_box.is_some() && states.len() != 1 {
        return Err(config("--e-box needs a single --kfa value"));
    }
    let mut rows = vec![];
    for s in &states {
        let corridor = a.corridor.unwrap_or(s.l / 10.0);
        let e_box = a.e_box.unwrap_or(s.total * s.l.powi(3));
        let r = box_method_density(&BoxInput { d: 3, n: s.n as f64, ell: s.l, corridor, b: s.b, e_box })?;
        rows.push(vec![
            s.kfa.into(),
            s.l.into(),
            corridor.into(),
            r.rho.into(),
            r.rho_tilde.into(),
            r.dirichlet_cost.into(),
            r.corridor_density_term.into(),
            r.e_bound.into(),
        ]);
    }
    let art = Artifact::table(
        "energy_box",
        "density and energy-density bound of glued box copies",
        &["kFa", "ell", "corridor", "rho", "rho_tilde", "dirichlet_cost", "corridor_density_term", "e_bound"],
        rows,
    );
    Ok(Outcome::csv(art))
}

// ---------------------------------------------------------------- compare

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// CSV with columns kFa,e ('#' lines are comments).
    #[arg(long)]
    qmc: Option<PathBuf>,
    #[arg(long, default_value = "0.01:0.5:40")]
    kfa: String,
    #[arg(long, value_enum, default_value = "hc")]
    curve: CurveArg,
    /// Overrides the curve's effective-range ratio.
    #[arg(long)]
    reff_over_a: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    a0_over_a: f64,
}

fn read_qmc(path: &PathBuf) -> Result<Vec<(f64, f64)>, CliError> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = vec![];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| config(format!("{}: {e}", path.display())))?;
        let (Some(x), Some(e)) = (rec.get(0), rec.get(1)) else {
            return Err(config(format!("{}: rows need kFa,e", path.display())));
        };
        match (x.parse::<f64>(), e.parse::<f64>()) {
            (Ok(x), Ok(e)) => out.push((x, e)),
            _ if out.is_empty() => continue,
            _ => return Err(config(format!("{}: bad row {x},{e}", path.display()))),
        }
    }
    if out.is_empty() {
        return Err(config(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

pub fn compare(a: &CompareArgs, _ctx: &RunContext) -> Res {
    let ratio = match a.reff_over_a {
        Some(r) => r,
        None => reff_over_a(a.curve)?,
    };
    let qmc = a.qmc.as_ref().map(read_qmc).transpose()?;
    let dz = ding_zhang_curve(&parse_sweep(&a.kfa)?, ratio)?;
    let mut rows = vec![];
    for r in dz {
        let x = r.kfa;
        let bound = 0.6 + 2.0 / (5.0 * PI) * x.powi(3) * (1.0 - 9.0 / 35.0 * (x * a.a0_over_a).powi(2));
        let mut row: Vec<Cell> = vec![x.into(), r.e_total.into(), bound.into()];
        if let Some(q) = &qmc {
            let near = q.iter().min_by(|p, s| (p.0 - x).abs().total_cmp(&(s.0 - x).abs())).expect("nonempty");
            row.push(near.0.into());
            row.push(near.1.into());
        }
        rows.push(row);
    }
    let mut columns = vec!["kFa", "e_dz", "e_bound"];
    if qmc.is_some() {
        columns.extend(["qmc_kFa", "e_qmc"]);
    }
    let art =
        Artifact::table("compare", "e/(rho kF^2): low-density expansion, leading upper bound, nearest external value", &columns, rows)
            .note("reff_over_a", ratio)
            .note("a0_over_a", a.a0_over_a);
    Ok(Outcome::csv(art))
}
