//! Energy of the trial state: closed forms, the assembled two-body integral,
//! error budgets with exponent optimization, and thermodynamic-limit gluing.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermi_surface::MomentumSet;
use crate::ggr::convergence_parameter;
use crate::quad::integrate_pieces;
use crate::scattering::{sphere_area, JastrowProfile, MomentKind};
use crate::slater::{lebedev26, set_coefficients, OneBodyKernel};

/// `(6 pi^2)^{2/3}`.
pub fn six_pi2_23() -> f64 {
    (6.0 * PI * PI).powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub d: usize,
    pub e_free: f64,
    pub e_interaction: f64,
    pub e_correction: f64,
    pub total: f64,
    pub dilute_warning: bool,
}

/// Leading-order energy density of the upper bound.
pub fn closed_form_bound(rho: f64, a: f64, a0: f64, d: usize) -> Result<ClosedForm> {
    if !(rho > 0.0) || a < 0.0 {
        return Err(Error::Precondition(format!("need rho > 0 and a >= 0, got rho = {rho}, a = {a}")));
    }
    let c = six_pi2_23();
    let (e_free, e_interaction, e_correction) = match d {
        3 => {
            let int = 12.0 * PI / 5.0 * c * a.powi(3) * rho.powf(8.0 / 3.0);
            (0.6 * c * rho.powf(5.0 / 3.0), int, -int * 9.0 / 35.0 * c * a0 * a0 * rho.powf(2.0 / 3.0))
        }
        2 => (2.0 * PI * rho * rho, 4.0 * PI * PI * a * a * rho.powi(3), 0.0),
        1 => (PI * PI / 3.0 * rho.powi(3), 2.0 * PI * PI / 3.0 * a * rho.powi(4), 0.0),
        _ => return Err(Error::Precondition(format!("dimension {d} not in 1..=3"))),
    };
    Ok(ClosedForm {
        d,
        e_free,
        e_interaction,
        e_correction,
        total: e_free + e_interaction + e_correction,
        dilute_warning: a.powi(d as i32) * rho > 0.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    /// `rho2 ~ c2 r^2 - c2c4 r^4` with the set's own coefficients.
    Quartic,
    /// Angular-averaged Wick kernel integrated radially.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct CorrectionRequest {
    pub s: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyItem {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyAssembly {
    pub d: usize,
    pub n: usize,
    pub l: f64,
    pub rho: f64,
    pub mode: KernelMode,
    pub items: Vec<EnergyItem>,
    pub total: f64,
}

impl EnergyAssembly {
    pub fn item(&self, label: &str) -> Option<f64> {
        self.items.iter().find(|i| i.label == label).map(|i| i.value)
    }

    /// Everything except the free kinetic energy.
    pub fn interaction(&self) -> f64 {
        self.items.iter().filter(|i| i.label != "kinetic").map(|i| i.value).sum()
    }
}

/// `int rho2(0, x) (|grad f|^2 + v f^2 / 2) dx` with the exact Wick kernel.
pub fn two_body_exact(kernel: &OneBodyKernel, profile: &JastrowProfile) -> f64 {
    let d = profile.d();
    let dirs: Vec<([f64; 3], f64)> = match d {
        3 => lebedev26(),
        2 => (0..32)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 32.0;
                ([t.cos(), t.sin(), 0.0], 1.0 / 32.0)
            })
            .collect(),
        _ => vec![([1.0, 0.0, 0.0], 0.5), ([-1.0, 0.0, 0.0], 0.5)],
    };
    let origin = [0.0; 3];
    let area = sphere_area(d);
    let mut breaks: Vec<f64> = profile.base.potential.breakpoints().into_iter().filter(|&r| r > 0.0 && r < profile.b).collect();
    breaks.insert(0, profile.base.potential.hard_core_radius());
    breaks.push(profile.b);
    let mut r = 2.0 * breaks[0].max(profile.base.potential.r0);
    while r < profile.b {
        breaks.push(r);
        r *= 2.0;
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let f = |r: f64| {
        let ang: f64 = dirs.iter().map(|(w, wt)| wt * kernel.rho2(&origin, &[r * w[0], r * w[1], r * w[2]])).sum();
        area * r.powi(d as i32 - 1) * ang * profile.energy_density(r)
    };
    integrate_pieces(f, &breaks, 1e-300, 1e-10).0
}

/// Kinetic energy plus the two-body term per unit volume.
pub fn energy_assembled(
    ms: &MomentumSet,
    profile: &JastrowProfile,
    mode: KernelMode,
    corrections: Option<CorrectionRequest>,
) -> Result<EnergyAssembly> {
    if ms.d != profile.d() {
        return Err(Error::Precondition("momentum set and profile dimensions differ".into()));
    }
    let vol = ms.l.powi(ms.d as i32);
    let rho = ms.rho();
    let e0: f64 = (0..ms.n()).map(|i| ms.momentum(i).iter().map(|k| k * k).sum::<f64>()).sum();
    let mut items = vec![EnergyItem { label: "kinetic".into(), value: e0 / vol }];
    let kernel = OneBodyKernel::new(ms);
    match mode {
        KernelMode::Quartic => {
            let sc = set_coefficients(ms);
            let m2 = profile.moment_integral(2, MomentKind::EnergyForm)?;
            let m4 = profile.moment_integral(4, MomentKind::EnergyForm)?;
            items.push(EnergyItem { label: "two_body_r2".into(), value: sc.c2 * m2 });
            items.push(EnergyItem { label: "two_body_r4".into(), value: -sc.c2c4 * m4 });
            if let Some(req) = corrections {
                let a = profile.base.a;
                let cp = convergence_parameter(req.s, a, rho, profile.b, ms.n() as f64, ms.d, req.threshold)?;
                if !cp.ok {
                    return Err(Error::DiluteRegimeViolated(cp.value));
                }
                let exact = two_body_exact(&kernel, profile);
                items.push(EnergyItem { label: "two_body_beyond_quartic".into(), value: exact - sc.c2 * m2 + sc.c2c4 * m4 });
            }
        }
        KernelMode::Exact => {
            items.push(EnergyItem { label: "two_body_exact".into(), value: two_body_exact(&kernel, profile) });
        }
    }
    let total = items.iter().map(|i| i.value).sum();
    Ok(EnergyAssembly { d: ms.d, n: ms.n(), l: ms.l, rho, mode, items, total })
}

/// Building blocks of the error terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    A,
    A0,
    B,
    S,
    N,
    Rho,
    R0,
    LogBA,
    LogN,
    Ell,
    Corridor,
}

#[derive(Debug, Clone, Copy)]
pub struct TermSpec {
    pub label: &'static str,
    pub factors: &'static [(Quantity, i64, i64)],
}

use Quantity::*;

const TERMS_3D: &[TermSpec] = &[
    TermSpec { label: "polyhedron_kinetic", factors: &[(S, -2, 1), (Rho, 5, 3)] },
    TermSpec { label: "finite_n_kinetic", factors: &[(N, -1, 3), (Rho, 5, 3)] },
    TermSpec { label: "cutoff_b", factors: &[(A, 6, 1), (B, -3, 1), (Rho, 8, 3)] },
    TermSpec { label: "cutoff_b_quartic", factors: &[(A, 6, 1), (A0, 2, 1), (B, -3, 1), (Rho, 10, 3)] },
    TermSpec { label: "potential_range", factors: &[(R0, 4, 1), (A, 3, 1), (Rho, 4, 1)] },
    TermSpec { label: "three_body_large", factors: &[(A, 13, 1), (Rho, 6, 1), (S, 3, 1), (LogBA, 4, 1), (LogN, 9, 1)] },
    TermSpec { label: "three_body_small", factors: &[(A, 7, 1), (Rho, 4, 1), (LogBA, 2, 1)] },
    TermSpec { label: "linked_large", factors: &[(A, 18, 1), (Rho, 23, 3), (S, 5, 1), (LogBA, 5, 1), (LogN, 16, 1)] },
    TermSpec { label: "linked_taylor", factors: &[(A, 6, 1), (B, 2, 1), (Rho, 13, 3)] },
    TermSpec { label: "linked_log", factors: &[(A, 6, 1), (Rho, 11, 3), (LogBA, 1, 1)] },
    TermSpec { label: "rho2_remainder", factors: &[(A, 6, 1), (B, 2, 1), (Rho, 13, 3)] },
    TermSpec { label: "three_body_tail_large", factors: &[(A, 13, 1), (Rho, 6, 1), (S, 3, 1), (LogBA, 4, 1), (LogN, 9, 1)] },
    TermSpec { label: "three_body_tail_small", factors: &[(A, 7, 1), (Rho, 4, 1), (LogBA, 1, 1)] },
];

const TERMS_2D: &[TermSpec] = &[
    TermSpec { label: "polyhedron_kinetic", factors: &[(S, -4, 1), (Rho, 2, 1)] },
    TermSpec { label: "finite_n_kinetic", factors: &[(N, -1, 2), (Rho, 2, 1)] },
    TermSpec { label: "cutoff_b", factors: &[(A, 4, 1), (B, -2, 1), (Rho, 3, 1)] },
    TermSpec { label: "two_body_log", factors: &[(A, 4, 1), (Rho, 4, 1), (LogBA, 1, 1)] },
    TermSpec { label: "potential_range", factors: &[(R0, 2, 1), (A, 2, 1), (Rho, 4, 1)] },
    TermSpec { label: "three_body_large", factors: &[(A, 8, 1), (Rho, 6, 1), (S, 3, 1), (LogBA, 4, 1), (LogN, 6, 1)] },
    TermSpec { label: "three_body_small", factors: &[(A, 4, 1), (Rho, 4, 1), (LogBA, 2, 1)] },
    TermSpec { label: "linked_large", factors: &[(A, 12, 1), (Rho, 8, 1), (S, 5, 1), (LogBA, 5, 1), (LogN, 11, 1)] },
    TermSpec { label: "linked_taylor", factors: &[(A, 4, 1), (B, 2, 1), (Rho, 5, 1)] },
    TermSpec { label: "linked_log", factors: &[(A, 4, 1), (Rho, 4, 1), (LogBA, 1, 1)] },
    TermSpec { label: "rho2_remainder", factors: &[(A, 4, 1), (B, 2, 1), (Rho, 5, 1)] },
    TermSpec { label: "three_body_tail_large", factors: &[(A, 8, 1), (Rho, 6, 1), (S, 3, 1), (LogBA, 4, 1), (LogN, 6, 1)] },
    TermSpec { label: "three_body_tail_small", factors: &[(A, 4, 1), (Rho, 4, 1), (LogBA, 1, 1)] },
];

const TERMS_1D: &[TermSpec] = &[
    TermSpec { label: "finite_n_kinetic", factors: &[(N, -1, 1), (Rho, 3, 1)] },
    TermSpec { label: "cutoff_b", factors: &[(A, 2, 1), (B, -1, 1), (Rho, 4, 1)] },
    TermSpec { label: "cutoff_b_upper", factors: &[(A, 2, 1), (B, 1, 1), (Rho, 6, 1)] },
    TermSpec { label: "odd_wave_log", factors: &[(A, 3, 1), (A0, -1, 1), (Rho, 5, 1), (LogBA, 3, 1), (LogN, 3, 1)] },
    TermSpec { label: "odd_wave_b", factors: &[(A, 2, 1), (A0, -1, 1), (B, 4, 1), (Rho, 8, 1)] },
    TermSpec { label: "linked_taylor", factors: &[(A, 2, 1), (B, 2, 1), (Rho, 7, 1)] },
    TermSpec { label: "linked_large", factors: &[(N, 1, 1), (A, 3, 1), (B, 4, 1), (Rho, 10, 1)] },
    TermSpec { label: "linked_log", factors: &[(A, 2, 1), (Rho, 5, 1), (LogBA, 1, 1)] },
    TermSpec { label: "three_body_b2", factors: &[(A, 2, 1), (B, 2, 1), (Rho, 7, 1)] },
    TermSpec { label: "three_body_log", factors: &[(A, 2, 1), (Rho, 5, 1), (LogBA, 2, 1), (LogN, 2, 1)] },
    TermSpec { label: "three_body_b3", factors: &[(A, 2, 1), (B, 3, 1), (Rho, 8, 1)] },
    TermSpec { label: "three_body_blog", factors: &[(A, 2, 1), (B, 1, 1), (Rho, 6, 1), (LogBA, 1, 1)] },
    TermSpec { label: "box_corridor", factors: &[(Corridor, 1, 1), (Ell, -1, 1), (Rho, 3, 1)] },
    TermSpec { label: "box_gap", factors: &[(B, 1, 1), (Ell, -1, 1), (Rho, 3, 1)] },
    TermSpec { label: "box_dirichlet", factors: &[(Rho, 1, 1), (Corridor, -2, 1)] },
];

pub fn term_table(d: usize) -> Result<&'static [TermSpec]> {
    match d {
        3 => Ok(TERMS_3D),
        2 => Ok(TERMS_2D),
        1 => Ok(TERMS_1D),
        _ => Err(Error::Precondition(format!("dimension {d} not in 1..=3"))),
    }
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Affine function `c + w . (alpha, beta, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub c: Rational64,
    pub w: [Rational64; 3],
}

impl Affine {
    fn zero() -> Self {
        Affine { c: Rational64::zero(), w: [Rational64::zero(); 3] }
    }

    fn konst(c: Rational64) -> Self {
        Affine { c, ..Self::zero() }
    }

    fn var(i: usize, coef: Rational64, c: Rational64) -> Self {
        let mut w = [Rational64::zero(); 3];
        w[i] = coef;
        Affine { c, w }
    }

    fn add_scaled(&mut self, o: &Affine, k: Rational64) {
        self.c += o.c * k;
        for i in 0..3 {
            self.w[i] += o.w[i] * k;
        }
    }

    pub fn eval(&self, v: &[Rational64; 3]) -> Rational64 {
        self.c + (0..3).map(|i| self.w[i] * v[i]).sum::<Rational64>()
    }

    fn render(&self, names: [&str; 3]) -> String {
        let mut s = if self.c.is_zero() { String::new() } else { self.c.to_string() };
        for i in 0..3 {
            let w = self.w[i];
            if w.is_zero() {
                continue;
            }
            let sign = if w.is_negative() {
                "-"
            } else if s.is_empty() {
                ""
            } else {
                "+"
            };
            let mag = w.abs();
            let coef = if mag == Rational64::from_integer(1) { String::new() } else { mag.to_string() };
            s.push_str(&format!("{sign}{coef}{}", names[i]));
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

/// Substitution of each quantity by powers of `x = a^d rho` and `|log x|`,
/// in units `a = 1`, as functions of `(alpha, beta, delta)`.
fn substitution(d: usize, q: Quantity) -> (Affine, Affine) {
    let one = r(1, 1);
    let zero = Affine::zero();
    match (d, q) {
        (_, A) | (_, A0) | (_, R0) => (zero, zero),
        (_, Rho) => (Affine::konst(one), zero),
        (_, B) => (Affine::var(1, -one, r(0, 1)), zero),
        (_, LogBA) | (_, LogN) => (zero, Affine::konst(one)),
        (1, N) => (Affine::var(0, -one, r(0, 1)), zero),
        (1, Ell) => (Affine::var(0, -one, -one), zero),
        (1, Corridor) => (Affine::var(2, -one, r(0, 1)), zero),
        (1, S) => (zero, zero),
        (2, N) => (Affine::konst(r(-19, 1)), zero),
        (_, N) => (Affine::konst(r(-29, 1)), zero),
        (_, S) => (Affine::var(0, -one, r(0, 1)), Affine::var(2, -one, r(0, 1))),
        (_, Ell) | (_, Corridor) => (zero, zero),
    }
}

fn lead_power(d: usize) -> Rational64 {
    match d {
        3 => r(5, 3),
        2 => r(2, 1),
        _ => r(3, 1),
    }
}

/// Exponents of `x` and `|log x|` of a term relative to the free energy.
pub fn term_signature(d: usize, t: &TermSpec) -> (Affine, Affine) {
    let mut ex = Affine::konst(-lead_power(d));
    let mut lg = Affine::zero();
    for &(q, num, den) in t.factors {
        let (sx, sl) = substitution(d, q);
        ex.add_scaled(&sx, r(num, den));
        lg.add_scaled(&sl, r(num, den));
    }
    (ex, lg)
}

fn var_names(d: usize) -> [&'static str; 3] {
    if d == 2 {
        ["α", "β", "γ"]
    } else {
        ["α", "β", "δ"]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct BudgetInputs {
    pub rho: f64,
    pub a: f64,
    pub a0: f64,
    pub b: f64,
    pub s: f64,
    pub n: f64,
    pub r0: f64,
    pub ell: Option<f64>,
    pub corridor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetTerm {
    pub label: &'static str,
    pub signature: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBudget {
    pub d: usize,
    pub inputs: BudgetInputs,
    pub leading: ClosedForm,
    pub terms: Vec<BudgetTerm>,
    /// `log(max term / e_free) / log(a^d rho)`.
    pub gamma: f64,
}

/// Every error term with unit constants.
pub fn error_budget(d: usize, inp: &BudgetInputs) -> Result<EnergyBudget> {
    let table = term_table(d)?;
    if [inp.rho, inp.a, inp.b, inp.s, inp.n].iter().any(|v| !(*v > 0.0)) || !(inp.b > inp.a) {
        return Err(Error::Precondition("budget inputs must be positive with b > a".into()));
    }
    let ell = inp.ell.unwrap_or((inp.n / inp.rho).powf(1.0 / d as f64));
    let value = |q: Quantity| -> Option<f64> {
        Some(match q {
            A => inp.a,
            A0 => inp.a0,
            B => inp.b,
            S => inp.s,
            N => inp.n,
            Rho => inp.rho,
            R0 => inp.r0,
            LogBA => (inp.b / inp.a).ln(),
            LogN => inp.n.ln(),
            Ell => ell,
            Corridor => inp.corridor?,
        })
    };
    let leading = closed_form_bound(inp.rho, inp.a, inp.a0, d)?;
    let x = inp.a.powi(d as i32) * inp.rho;
    let mut terms = Vec::new();
    for t in table {
        let Some(v) = t.factors.iter().map(|&(q, n, m)| value(q).map(|b| b.powf(n as f64 / m as f64))).product::<Option<f64>>() else {
            continue;
        };
        let (ex, lg) = term_signature(d, t);
        let names = var_names(d);
        terms.push(BudgetTerm { label: t.label, signature: format!("x^({}) |log x|^({})", ex.render(names), lg.render(names)), value: v });
    }
    let worst = terms.iter().map(|t| t.value).fold(0.0, f64::max);
    Ok(EnergyBudget { d, inputs: *inp, leading, terms, gamma: (worst / leading.e_free).ln() / x.ln() })
}

/// Inputs realizing the parameter choice `(alpha, beta, delta)` at `x = a^d rho`, with `a = a0 = R0 = 1`.
pub fn inputs_for_choice(d: usize, x: f64, choice: [f64; 3]) -> BudgetInputs {
    let [al, be, de] = choice;
    let lx = x.ln().abs();
    let b = x.powf(-be);
    match d {
        1 => {
            let n = x.powf(-al);
            BudgetInputs { rho: x, a: 1.0, a0: 1.0, b, s: 1.0, n, r0: 1.0, ell: Some(n / x), corridor: Some(x.powf(-de)) }
        }
        _ => {
            let n = x.powi(if d == 2 { -19 } else { -29 });
            BudgetInputs { rho: x, a: 1.0, a0: 1.0, b, s: x.powf(-al) * lx.powf(-de), n, r0: 1.0, ell: None, corridor: None }
        }
    }
}

/// Reference parameter choice `(alpha, beta, delta)` per dimension.
pub fn reference_choice(d: usize) -> [Rational64; 3] {
    match d {
        3 => [r(6, 7), r(1, 3), r(3, 1)],
        2 => [r(4, 7), r(1, 2), r(10, 7)],
        _ => [r(33, 13), r(9, 13), r(24, 13)],
    }
}

/// The error exponent as a minimum of affine forms in the choice.
pub fn gamma_formula(d: usize, v: &[Rational64; 3]) -> Rational64 {
    let [al, be, de] = *v;
    let list = match d {
        3 => vec![al * 2, be * 3 + 1, r(13, 3) - al * 3, r(6, 1) - al * 5, r(8, 3) - be * 2],
        2 => vec![al * 4, be * 2 + 1, r(2, 1), r(4, 1) - al * 3, r(6, 1) - al * 5, r(3, 1) - be * 2],
        _ => vec![be + 1, r(5, 1) - be * 4, r(7, 1) - al - be * 4, al + 1 - de, de * 2 - 2],
    };
    list.into_iter().min().unwrap()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentOptimum {
    pub d: usize,
    /// `(alpha, beta, delta)`; in d = 2 the third entry is the log exponent of `s`.
    pub choice: [Rational64; 3],
    pub gamma: Rational64,
    pub log_power: Rational64,
    pub unique: bool,
    pub vertices: usize,
}

fn solve(mut m: Vec<Vec<Rational64>>) -> Option<Vec<Rational64>> {
    let k = m.len();
    for col in 0..k {
        let piv = (col..k).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col];
        for j in col..=k {
            m[col][j] /= p;
        }
        for i in 0..k {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col];
                for j in col..=k {
                    let t = m[col][j] * f;
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[k]).collect())
}

fn subsets(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { return };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn leximin_cmp(a: &[Rational64], b: &[Rational64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
}

/// Leximin optimum of the exponent vector over vertices of the arrangement
/// `{e_i = e_j}` inside a box, followed by the log exponent minimizing the
/// log powers level by level.
pub fn optimize_exponents(d: usize) -> Result<ExponentOptimum> {
    let table = term_table(d)?;
    let sigs: Vec<(Affine, Affine)> = table.iter().map(|t| term_signature(d, t)).collect();
    let (vars, bounds): (Vec<usize>, Vec<(Rational64, Rational64)>) = match d {
        1 => (vec![0, 1, 2], vec![(r(1, 1), r(6, 1)), (r(0, 1), r(1, 1)), (r(0, 1), r(6, 1))]),
        _ => (vec![0, 1], vec![(r(0, 1), r(2, 1)), (r(0, 1), r(1, 1))]),
    };
    let k = vars.len();
    let mut planes: Vec<(Vec<Rational64>, Rational64)> = Vec::new();
    for i in 0..sigs.len() {
        for j in i + 1..sigs.len() {
            let w: Vec<Rational64> = vars.iter().map(|&v| sigs[i].0.w[v] - sigs[j].0.w[v]).collect();
            if w.iter().any(|x| !x.is_zero()) {
                let c = sigs[j].0.c - sigs[i].0.c;
                if !planes.contains(&(w.clone(), c)) {
                    planes.push((w, c));
                }
            }
        }
    }
    for (slot, &(lo, hi)) in bounds.iter().enumerate() {
        let w: Vec<Rational64> = (0..k).map(|i| if i == slot { r(1, 1) } else { r(0, 1) }).collect();
        planes.push((w.clone(), lo));
        planes.push((w, hi));
    }
    let mut best: Option<(Vec<Rational64>, [Rational64; 3])> = None;
    let mut ties = 0usize;
    let mut seen: Vec<[Rational64; 3]> = Vec::new();
    subsets(planes.len(), k, &mut |sel| {
        let m: Vec<Vec<Rational64>> = sel.iter().map(|&p| planes[p].0.iter().copied().chain([planes[p].1]).collect()).collect();
        let Some(sol) = solve(m) else { return };
        if sol.iter().zip(&bounds).any(|(x, (lo, hi))| x < lo || x > hi) {
            return;
        }
        let mut v = [r(0, 1); 3];
        for (i, &vi) in vars.iter().enumerate() {
            v[vi] = sol[i];
        }
        if seen.contains(&v) {
            return;
        }
        seen.push(v);
        let mut ex: Vec<Rational64> = sigs.iter().map(|s| s.0.eval(&v)).collect();
        ex.sort();
        match &best {
            None => {
                best = Some((ex, v));
                ties = 1;
            }
            Some((b, _)) => match leximin_cmp(&ex, b) {
                Ordering::Greater => {
                    best = Some((ex, v));
                    ties = 1;
                }
                Ordering::Equal => ties += 1,
                Ordering::Less => {}
            },
        }
    });
    let (ex, mut v) = best.ok_or_else(|| Error::Precondition("no feasible exponent vertex".into()))?;
    let gamma = ex[0];
    let levels = |v: &[Rational64; 3]| -> Vec<Rational64> {
        let mut lv: Vec<(Rational64, Rational64)> = sigs.iter().map(|s| (s.0.eval(v), s.1.eval(v))).collect();
        lv.sort();
        let mut out: Vec<Rational64> = Vec::new();
        let mut i = 0;
        while i < lv.len() {
            let mut j = i;
            let mut worst = lv[i].1;
            while j < lv.len() && lv[j].0 == lv[i].0 {
                worst = worst.max(lv[j].1);
                j += 1;
            }
            out.push(worst);
            i = j;
        }
        out
    };
    if d != 1 {
        let mut cands = vec![r(0, 1), r(10, 1)];
        for i in 0..sigs.len() {
            for j in i + 1..sigs.len() {
                let dw = sigs[i].1.w[2] - sigs[j].1.w[2];
                if !dw.is_zero() {
                    let c = (sigs[j].1.c - sigs[i].1.c) / dw;
                    if c > r(0, 1) && c < r(10, 1) {
                        cands.push(c);
                    }
                }
            }
        }
        cands.sort();
        cands.dedup();
        let mut best_l: Option<(Vec<Rational64>, Rational64)> = None;
        for c in cands {
            let mut t = v;
            t[2] = c;
            let l = levels(&t);
            if best_l.as_ref().map_or(true, |(b, _)| leximin_cmp(&l, b) == Ordering::Less) {
                best_l = Some((l, c));
            }
        }
        v[2] = best_l.unwrap().1;
    }
    let log_power = levels(&v)[0];
    Ok(ExponentOptimum { d, choice: v, gamma, log_power, unique: ties == 1, vertices: seen.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    pub x: f64,
    pub reference_choice: [Rational64; 3],
    pub reference_gamma: Rational64,
    pub reference: EnergyBudget,
    pub optimum: ExponentOptimum,
    pub optimized: EnergyBudget,
}

fn to_f64(v: &[Rational64; 3]) -> [f64; 3] {
    v.map(|r| *r.numer() as f64 / *r.denom() as f64)
}

/// Budgets at the reference parameter choice and at the optimizer's choice, at `x = a^d rho`.
pub fn budget_report(d: usize, x: f64) -> Result<BudgetReport> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Precondition(format!("need 0 < a^d rho < 1, got {x}")));
    }
    let reference_choice = reference_choice(d);
    let optimum = optimize_exponents(d)?;
    Ok(BudgetReport {
        x,
        reference_choice,
        reference_gamma: gamma_formula(d, &reference_choice),
        reference: error_budget(d, &inputs_for_choice(d, x, to_f64(&reference_choice)))?,
        optimized: error_budget(d, &inputs_for_choice(d, x, to_f64(&optimum.choice)))?,
        optimum,
    })
}

/// Partial sums of the expansion through the labelled order in `kF`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DzRow {
    pub kfa: f64,
    pub e_total: f64,
    pub e_k2: f64,
    pub e_k3: f64,
    pub e_k5: f64,
    pub e_k6: f64,
}

/// Low-density expansion of `e / (rho kF^2)` through sixth order in `kF a`.
pub fn ding_zhang_curve(kfa: &[f64], reff_over_a: f64) -> Result<Vec<DzRow>> {
    if reff_over_a == 0.0 || !reff_over_a.is_finite() {
        return Err(Error::Precondition(format!("effective range ratio must be finite and nonzero, got {reff_over_a}")));
    }
    let c6 = (2066.0 - 312.0 * std::f64::consts::LN_2) / (10395.0 * PI * PI);
    kfa.iter()
        .map(|&x| {
            if !(x >= 0.0) {
                return Err(Error::Precondition(format!("kFa must be nonnegative, got {x}")));
            }
            let e_k2 = 0.6;
            let e_k3 = e_k2 + 2.0 / (5.0 * PI) * x.powi(3);
            let e_k5 = e_k3 - x.powi(5) / (35.0 * PI * reff_over_a);
            let e_k6 = e_k5 + c6 * x.powi(6);
            Ok(DzRow { kfa: x, e_total: e_k6, e_k2, e_k3, e_k5, e_k6 })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct BoxInput {
    pub d: usize,
    pub n: f64,
    pub ell: f64,
    pub corridor: f64,
    pub b: f64,
    /// Energy (not density) of the periodic box state.
    pub e_box: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxResult {
    pub rho: f64,
    pub rho_tilde: f64,
    /// `2 d n / d_c^2`, the Dirichlet localization cost.
    pub dirichlet_cost: f64,
    /// `2 d rho / d_c^2`.
    pub corridor_density_term: f64,
    pub e_bound: f64,
}

/// Density and energy-density bound of copies of a box state glued with corridors.
pub fn box_method_density(inp: &BoxInput) -> Result<BoxResult> {
    let BoxInput { d, n, ell, corridor, b, e_box } = *inp;
    if !(1..=3).contains(&d) || !(ell > 0.0) || !(n > 0.0) {
        return Err(Error::GeometryInvalid("need d in 1..=3, ell > 0, n > 0".into()));
    }
    if !(corridor >= 0.0 && corridor < ell / 2.0) || !(b >= 0.0 && b < ell) {
        return Err(Error::GeometryInvalid(format!("need 0 <= d_c < ell/2 and 0 <= b < ell, got d_c = {corridor}, b = {b}")));
    }
    let di = d as i32;
    let rho = n / ell.powi(di);
    let cell = (ell + 2.0 * corridor + b).powi(di);
    let (dirichlet_cost, corridor_density_term) = if corridor == 0.0 {
        (0.0, 0.0)
    } else {
        (2.0 * d as f64 * n / (corridor * corridor), 2.0 * d as f64 * rho / (corridor * corridor))
    };
    Ok(BoxResult { rho, rho_tilde: n / cell, dirichlet_cost, corridor_density_term, e_bound: (e_box + dirichlet_cost) / cell })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_gas_closed_forms() {
        let c = closed_form_bound(1.0, 0.0, 0.0, 3).unwrap();
        assert_eq!(c.total, 0.6 * six_pi2_23());
        let one = closed_form_bound(1.0, 0.01, 0.01, 1).unwrap();
        assert!((one.total - (PI * PI / 3.0 + 2.0 * PI * PI / 3.0 * 0.01)).abs() < 1e-15);
        let unit = closed_form_bound(1.0, 1.0, 1.0, 3).unwrap();
        assert!((unit.e_interaction - 12.0 * PI * six_pi2_23() / 5.0).abs() < 1e-12);
        assert!(unit.dilute_warning);
    }

    #[test]
    fn optimizer_recovers_choices() {
        let o3 = optimize_exponents(3).unwrap();
        assert_eq!(o3.choice, reference_choice(3));
        assert_eq!((o3.gamma, o3.log_power), (r(12, 7), r(6, 1)));
        let o2 = optimize_exponents(2).unwrap();
        assert_eq!(o2.choice, reference_choice(2));
        let o1 = optimize_exponents(1).unwrap();
        assert_eq!(o1.choice, reference_choice(1));
        assert_eq!(o1.gamma, r(22, 13));
        for d in 1..=3 {
            let o = optimize_exponents(d).unwrap();
            assert!(o.unique);
            assert!(o.gamma <= gamma_formula(d, &o.choice));
        }
    }

    #[test]
    fn budget_signatures_and_limits() {
        let inp = inputs_for_choice(3, 1e-6, [6.0 / 7.0, 1.0 / 3.0, 3.0]);
        let bud = error_budget(3, &inp).unwrap();
        let t = bud.terms.iter().find(|t| t.label == "polyhedron_kinetic").unwrap();
        assert_eq!(t.signature, "x^(2α) |log x|^(2δ)");
        let small_a = BudgetInputs { a: 1e-12, ..inp };
        let bud = error_budget(3, &small_a).unwrap();
        let worst = bud.terms.iter().max_by(|a, b| a.value.partial_cmp(&b.value).unwrap()).unwrap();
        assert!(["polyhedron_kinetic", "finite_n_kinetic"].contains(&worst.label));
    }

    #[test]
    fn ding_zhang_free_and_hard_core() {
        let rows = ding_zhang_curve(&[0.0, 0.3], 5.0 / 18.0).unwrap();
        assert_eq!(rows[0].e_total, 0.6);
        let fifth = rows[1].e_k5 - rows[1].e_k3;
        assert!((fifth + 18.0 / (5.0 * 35.0 * PI) * 0.3f64.powi(5)).abs() < 1e-16);
    }

    #[test]
    fn box_degenerate_and_scaling() {
        let base = BoxInput { d: 3, n: 1000.0, ell: 10.0, corridor: 0.0, b: 0.0, e_box: 123.0 };
        let r0 = box_method_density(&base).unwrap();
        assert_eq!((r0.rho_tilde, r0.e_bound), (1.0, 0.123));
        let r1 = box_method_density(&BoxInput { corridor: 1.0, ..base }).unwrap();
        let r2 = box_method_density(&BoxInput { corridor: 2.0, ..base }).unwrap();
        assert_eq!(r1.corridor_density_term, 4.0 * r2.corridor_density_term);
        assert!(matches!(box_method_density(&BoxInput { corridor: 6.0, ..base }), Err(Error::GeometryInvalid(_))));
    }
}
