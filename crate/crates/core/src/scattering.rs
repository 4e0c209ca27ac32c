//! Zero-energy p-wave scattering in d = 1, 2, 3.
//!
//! The radial equation `-f'' - ((d+1)/r) f' + v f / 2 = 0` is integrated as a
//! first-order system in `(f, F)` with `F = r^{d+1} f'`. Moment integrals are
//! carried along as extra state components so that they inherit the step
//! control of the solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Tolerance};

/// Components of the augmented state vector.
const F: usize = 0;
const FLUX: usize = 1;
const J0: usize = 2; // J_n = int s^{n+d-1} (f'^2 + v f^2 / 2), n = 0, 2, 4, 6
const K0: usize = 6; // K_n = int s^{n+d-1} f f', n = 0, 1, 2
const NSTATE: usize = 9;

pub const ENERGY_MOMENTS: [i32; 4] = [0, 2, 4, 6];
pub const FDF_MOMENTS: [i32; 3] = [0, 1, 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialKind {
    Hardcore,
    Softcore {
        #[serde(rename = "V0")]
        v0: f64,
    },
    Tabulated {
        r: Vec<f64>,
        v: Vec<f64>,
        #[serde(default)]
        r_hc: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub dimension: usize,
    #[serde(flatten)]
    pub kind: PotentialKind,
    #[serde(rename = "R0")]
    pub r0: f64,
}

impl RadialPotential {
    pub fn hard_core(d: usize, r0: f64) -> Result<Self> {
        let p = RadialPotential { dimension: d, kind: PotentialKind::Hardcore, r0 };
        p.validate()?;
        Ok(p)
    }

    pub fn soft_core(d: usize, r0: f64, v0: f64) -> Result<Self> {
        let p = RadialPotential { dimension: d, kind: PotentialKind::Softcore { v0 }, r0 };
        p.validate()?;
        Ok(p)
    }

    /// Piecewise-linear table; the range is the last abscissa.
    pub fn tabulated(d: usize, r: Vec<f64>, v: Vec<f64>, r_hc: f64) -> Result<Self> {
        let r0 = r.last().copied().unwrap_or(0.0);
        let p = RadialPotential { dimension: d, kind: PotentialKind::Tabulated { r, v, r_hc }, r0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::InvalidPotential(format!("dimension {} not in 1..=3", self.dimension)));
        }
        if !(self.r0 > 0.0) || !self.r0.is_finite() {
            return Err(Error::NonpositiveRange(self.r0));
        }
        match &self.kind {
            PotentialKind::Hardcore => {}
            PotentialKind::Softcore { v0 } => {
                if !(*v0 >= 0.0) || !v0.is_finite() {
                    return Err(Error::InvalidPotential(format!("soft-core strength {v0} must be finite and >= 0")));
                }
            }
            PotentialKind::Tabulated { r, v, r_hc } => {
                if r.len() != v.len() || r.is_empty() {
                    return Err(Error::InvalidPotential("table columns differ in length or are empty".into()));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidPotential("table grid not strictly increasing".into()));
                }
                if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                    return Err(Error::InvalidPotential("table values must be finite and >= 0".into()));
                }
                if !(*r_hc >= 0.0) || *r_hc > r[0] {
                    return Err(Error::InvalidPotential(format!("hard-core radius {r_hc} must lie in [0, r_0]")));
                }
                if r[0] < 0.0 {
                    return Err(Error::InvalidPotential("table starts below zero".into()));
                }
                if (self.r0 - r[r.len() - 1]).abs() > 0.0 {
                    return Err(Error::InvalidPotential("range must equal the last table abscissa".into()));
                }
            }
        }
        Ok(())
    }

    pub fn hard_core_radius(&self) -> f64 {
        match &self.kind {
            PotentialKind::Hardcore => self.r0,
            PotentialKind::Softcore { .. } => 0.0,
            PotentialKind::Tabulated { r_hc, .. } => *r_hc,
        }
    }

    /// Potential value; `+inf` inside the hard core.
    pub fn v(&self, r: f64) -> f64 {
        let r = r.abs();
        if r < self.hard_core_radius() {
            return f64::INFINITY;
        }
        match &self.kind {
            PotentialKind::Hardcore => 0.0,
            PotentialKind::Softcore { v0 } => {
                if r < self.r0 {
                    *v0
                } else {
                    0.0
                }
            }
            PotentialKind::Tabulated { r: rs, v, .. } => {
                if r > self.r0 {
                    return 0.0;
                }
                if r <= rs[0] {
                    return v[0];
                }
                let i = rs.partition_point(|x| *x <= r).min(rs.len() - 1);
                let (r1, r2, v1, v2) = (rs[i - 1], rs[i], v[i - 1], v[i]);
                v1 + (v2 - v1) * (r - r1) / (r2 - r1)
            }
        }
    }

    /// Points where `v` is not smooth, all in `(0, R0]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![self.r0];
        let rhc = self.hard_core_radius();
        if rhc > 0.0 {
            out.push(rhc);
        }
        if let PotentialKind::Tabulated { r, .. } = &self.kind {
            out.extend(r.iter().copied().filter(|x| *x > 0.0));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Linear representation `v = c0 + c1 r` valid on a grid piece with no
    /// breakpoint in its interior.
    fn piece(&self, lo: f64, hi: f64) -> (f64, f64) {
        let m = 0.5 * (lo + hi);
        match &self.kind {
            PotentialKind::Hardcore => (0.0, 0.0),
            PotentialKind::Softcore { v0 } => {
                if m < self.r0 {
                    (*v0, 0.0)
                } else {
                    (0.0, 0.0)
                }
            }
            PotentialKind::Tabulated { r: rs, v, .. } => {
                if m > self.r0 {
                    (0.0, 0.0)
                } else if m <= rs[0] {
                    (v[0], 0.0)
                } else {
                    let i = rs.partition_point(|x| *x <= m).min(rs.len() - 1);
                    let slope = (v[i] - v[i - 1]) / (rs[i] - rs[i - 1]);
                    (v[i - 1] - slope * rs[i - 1], slope)
                }
            }
        }
    }
}

/// Surface measure of the unit sphere in `d` dimensions (`2` points for d = 1).
pub fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI,
    }
}

/// The constant `c_d` in `c_d a^d = int |x|^2 (|grad f0|^2 + v f0^2 / 2)`.
pub fn variational_constant(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 4.0 * std::f64::consts::PI,
        _ => 12.0 * std::f64::consts::PI,
    }
}

fn rhs(d: usize, c0: f64, c1: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    let dp1 = (d + 1) as i32;
    move |r: f64, y: &[f64], dy: &mut [f64]| {
        let v = c0 + c1 * r;
        let rd = r.powi(dp1);
        let f = y[F];
        let fp = y[FLUX] / rd;
        dy[F] = fp;
        dy[FLUX] = rd * 0.5 * v * f;
        let e = fp * fp + 0.5 * v * f * f;
        let ffp = f * fp;
        let base = r.powi(d as i32 - 1);
        dy[J0] = base * e;
        dy[J0 + 1] = base * r * r * e;
        dy[J0 + 2] = base * r.powi(4) * e;
        dy[J0 + 3] = base * r.powi(6) * e;
        dy[K0] = base * ffp;
        dy[K0 + 1] = base * r * ffp;
        dy[K0 + 2] = base * r * r * ffp;
    }
}

/// `int_x^y s^m ds`.
fn power_integral(m: i32, x: f64, y: f64) -> f64 {
    if m == -1 {
        (y / x).ln()
    } else {
        let k = (m + 1) as f64;
        (y.powf(k) - x.powf(k)) / k
    }
}

/// Pointwise data of a solution: value, derivative and cumulative moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalState {
    pub f: f64,
    pub fp: f64,
    /// `int_0^r s^{n+d-1} (f'^2 + v f^2/2) ds` for n = 0, 2, 4, 6.
    pub j: [f64; 4],
    /// `int_0^r s^{n+d-1} f f' ds` for n = 0, 1, 2.
    pub k: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub d: usize,
    pub r: Vec<f64>,
    pub f0: Vec<f64>,
    pub f0_prime: Vec<f64>,
    pub a: f64,
    /// d = 3 only.
    pub a0: Option<f64>,
    /// d = 1 only: `1/(2 a0) = int (|f'|^2 + v f^2/2)`.
    pub a0_inv: Option<f64>,
    /// d = 3 only, when `a > 0`.
    pub reff: Option<f64>,
    /// Difference between two solves at tolerances a decade apart.
    pub residual: f64,
    pub potential: RadialPotential,
    rtol: f64,
    states: Vec<[f64; NSTATE]>,
}

pub const RESIDUAL_TOL: f64 = 1e-10;

fn build_grid(v: &RadialPotential, r_max: f64, n_grid: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n_grid).map(|i| r_max * i as f64 / (n_grid - 1) as f64).collect();
    g.extend(v.breakpoints().into_iter().filter(|x| *x < r_max));
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(g.len());
    for x in g {
        match out.last() {
            Some(&l) if (x - l).abs() <= 1e-12 * r_max => {
                // keep exact breakpoints over the uniform nodes they shadow
                if v.breakpoints().contains(&x) {
                    *out.last_mut().unwrap() = x;
                }
            }
            _ => out.push(x),
        }
    }
    out
}

fn integrate_grid(v: &RadialPotential, grid: &[f64], rtol: f64) -> Vec<[f64; NSTATE]> {
    let d = v.dimension;
    let rhc = v.hard_core_radius();
    let tol = Tolerance { rtol, atol: 1e-300 };
    let mut states = vec![[0.0; NSTATE]; grid.len()];
    let start = grid.iter().position(|&r| r >= rhc && (rhc > 0.0 || r > 0.0)).unwrap_or(grid.len());
    if start >= grid.len() {
        return states;
    }
    let mut y = [0.0; NSTATE];
    let mut r_cur;
    if rhc > 0.0 {
        // f vanishes at the core edge; the flux normalization is arbitrary.
        y[FLUX] = 1.0;
        r_cur = grid[start];
        states[start] = y;
    } else {
        // Regular series start near the origin.
        let v0 = v.v(0.0);
        let c = v0 / (4.0 * (d as f64 + 2.0));
        let rs = 1e-4 * grid[start];
        let df = d as f64;
        y[F] = 1.0 + c * rs * rs;
        y[FLUX] = 2.0 * c * rs.powi(d as i32 + 2);
        for (i, n) in ENERGY_MOMENTS.iter().enumerate() {
            let n = *n as f64;
            y[J0 + i] = 0.5 * v0 * rs.powf(n + df) / (n + df);
        }
        for (i, n) in FDF_MOMENTS.iter().enumerate() {
            let n = *n as f64;
            y[K0 + i] = 2.0 * c * rs.powf(n + df + 1.0) / (n + df + 1.0);
        }
        // node at the origin carries the limiting values
        if start > 0 {
            let mut z = [0.0; NSTATE];
            z[F] = 1.0;
            states[start - 1] = z;
        }
        r_cur = rs;
    }
    let mut h = 0.0;
    let first = if rhc > 0.0 { start + 1 } else { start };
    for i in first..grid.len() {
        let lo = if i == 0 { r_cur } else { grid[i - 1].max(r_cur) };
        let (c0, c1) = v.piece(lo, grid[i]);
        let f = rhs(d, c0, c1);
        ode::integrate(&f, r_cur, grid[i], &mut y, tol, &mut h);
        r_cur = grid[i];
        states[i] = y;
    }
    states
}

/// Least-squares fit of `A - B r^{-d}` to nodes beyond the range in the last
/// decade of the grid.
fn fit_exterior(d: usize, r0: f64, grid: &[f64], f: &[f64]) -> (f64, f64) {
    let r_max = *grid.last().unwrap();
    let lo = r0.max(0.1 * r_max);
    let (mut s11, mut s1x, mut sxx, mut s1y, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (r, y) in grid.iter().zip(f) {
        if *r >= lo && *r > 0.0 {
            let x = -r.powi(-(d as i32));
            s11 += 1.0;
            s1x += x;
            sxx += x * x;
            s1y += y;
            sxy += x * y;
        }
    }
    let det = s11 * sxx - s1x * s1x;
    let a = (sxx * s1y - s1x * sxy) / det;
    let b = (s11 * sxy - s1x * s1y) / det;
    (a, b)
}

/// Solves the zero-energy scattering equation on `[0, r_max]`.
pub fn solve_p_wave(v: &RadialPotential, r_max: f64, n_grid: usize) -> Result<ScatteringSolution> {
    v.validate()?;
    if r_max < 4.0 * v.r0 {
        return Err(Error::Precondition(format!("r_max = {r_max} must be at least 4 R0 = {}", 4.0 * v.r0)));
    }
    if n_grid < 200 {
        return Err(Error::Precondition(format!("n_grid = {n_grid} must be at least 200")));
    }
    let d = v.dimension;
    let grid = build_grid(v, r_max, n_grid);
    let mut rtol = 1e-12;
    let mut states = integrate_grid(v, &grid, rtol);
    let mut residual = f64::INFINITY;
    for _ in 0..4 {
        let fine = integrate_grid(v, &grid, rtol * 1e-2);
        let scale = fine.iter().map(|s| s[F].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        residual = states.iter().zip(&fine).map(|(a, b)| (a[F] - b[F]).abs()).fold(0.0, f64::max) / scale;
        states = fine;
        rtol *= 1e-2;
        if residual <= RESIDUAL_TOL {
            break;
        }
        if rtol < 1e-15 {
            break;
        }
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::GridTooCoarse { residual, tol: RESIDUAL_TOL });
    }
    let raw_f: Vec<f64> = states.iter().map(|s| s[F]).collect();
    let (amp, b) = fit_exterior(d, v.r0, &grid, &raw_f);
    let ad = (b / amp).max(0.0);
    let ad = if ad <= 1e-14 * v.r0.powi(d as i32) { 0.0 } else { ad };
    let a = ad.powf(1.0 / d as f64);
    for s in states.iter_mut() {
        s[F] /= amp;
        s[FLUX] /= amp;
        for x in s[J0..].iter_mut() {
            *x /= amp * amp;
        }
    }
    let f0: Vec<f64> = states.iter().map(|s| s[F]).collect();
    let f0_prime: Vec<f64> = grid.iter().zip(&states).map(|(r, s)| if *r > 0.0 { s[FLUX] / r.powi(d as i32 + 1) } else { 0.0 }).collect();
    let mut sol = ScatteringSolution {
        d,
        r: grid,
        f0,
        f0_prime,
        a,
        a0: None,
        a0_inv: None,
        reff: None,
        residual,
        potential: v.clone(),
        rtol,
        states,
    };
    match d {
        3 if a > 0.0 => {
            let dl = derived_lengths(&sol)?;
            sol.a0 = Some(dl.a0);
            sol.reff = dl.reff;
        }
        1 => {
            sol.a0_inv = Some(2.0 * sol.energy_moment_total(0));
        }
        _ => {}
    }
    Ok(sol)
}

impl ScatteringSolution {
    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    fn from_state(&self, r: f64, s: &[f64; NSTATE]) -> LocalState {
        let fp = if r > 0.0 { s[FLUX] / r.powi(self.d as i32 + 1) } else { 0.0 };
        LocalState { f: s[F], fp, j: [s[J0], s[J0 + 1], s[J0 + 2], s[J0 + 3]], k: [s[K0], s[K0 + 1], s[K0 + 2]] }
    }

    /// Value, derivative and cumulative moments at radius `r`.
    pub fn eval(&self, r: f64) -> LocalState {
        let r = r.abs();
        let d = self.d;
        let rhc = self.potential.hard_core_radius();
        if r <= rhc && rhc > 0.0 {
            return LocalState { f: 0.0, fp: 0.0, j: [0.0; 4], k: [0.0; 3] };
        }
        let rn = self.r_max();
        if r >= rn {
            let last = self.from_state(rn, self.states.last().unwrap());
            let ad = self.a.powi(d as i32);
            let di = d as i32;
            let df = d as f64;
            let mut j = last.j;
            for (i, n) in ENERGY_MOMENTS.iter().enumerate() {
                j[i] += df * df * ad * ad * power_integral(n - di - 3, rn, r);
            }
            let mut k = last.k;
            for (i, n) in FDF_MOMENTS.iter().enumerate() {
                k[i] += df * ad * (power_integral(n - 2, rn, r) - ad * power_integral(n - di - 2, rn, r));
            }
            return LocalState { f: 1.0 - ad / r.powi(di), fp: df * ad / r.powi(di + 1), j, k };
        }
        let i = self.r.partition_point(|x| *x <= r).saturating_sub(1);
        let r_i = self.r[i];
        if r == r_i {
            return self.from_state(r, &self.states[i]);
        }
        let mut y = self.states[i];
        let (lo, r_start) = if r_i < rhc || (rhc == 0.0 && r_i == 0.0) {
            // below the first integrated node: restart from the series or core edge
            return self.eval_from_start(r);
        } else {
            (r_i, r_i)
        };
        let hi = self.r[(i + 1).min(self.r.len() - 1)];
        let (c0, c1) = self.potential.piece(lo, hi);
        let f = rhs(d, c0, c1);
        let mut h = 0.0;
        ode::integrate(&f, r_start, r, &mut y, Tolerance { rtol: self.rtol, atol: 1e-300 }, &mut h);
        self.from_state(r, &y)
    }

    fn eval_from_start(&self, r: f64) -> LocalState {
        // Only reached for soft potentials between the origin and the first node.
        let d = self.d;
        let v0 = self.potential.v(0.0);
        let c = v0 / (4.0 * (d as f64 + 2.0));
        let amp = {
            // normalization used in the stored states: value at origin node
            let i0 = self.r.iter().position(|x| *x == 0.0).unwrap_or(0);
            self.states[i0][F]
        };
        let df = d as f64;
        let mut y = [0.0; NSTATE];
        let rs = (1e-4 * self.r[1]).min(r);
        y[F] = amp * (1.0 + c * rs * rs);
        y[FLUX] = amp * 2.0 * c * rs.powi(d as i32 + 2);
        for (i, n) in ENERGY_MOMENTS.iter().enumerate() {
            let n = *n as f64;
            y[J0 + i] = amp * amp * 0.5 * v0 * rs.powf(n + df) / (n + df);
        }
        for (i, n) in FDF_MOMENTS.iter().enumerate() {
            let n = *n as f64;
            y[K0 + i] = amp * amp * 2.0 * c * rs.powf(n + df + 1.0) / (n + df + 1.0);
        }
        let (c0, c1) = self.potential.piece(0.0, self.r[1]);
        let f = rhs(d, c0, c1);
        let mut h = 0.0;
        ode::integrate(&f, rs, r, &mut y, Tolerance { rtol: self.rtol, atol: 1e-300 }, &mut h);
        self.from_state(r, &y)
    }

    /// `int_0^inf s^{n+d-1} (f0'^2 + v f0^2/2) ds` with the exterior tail added
    /// analytically. Diverges for `n >= d + 2`.
    pub fn energy_moment_total(&self, n: i32) -> f64 {
        let i = ENERGY_MOMENTS.iter().position(|m| *m == n).expect("moment index");
        let d = self.d as i32;
        if n >= d + 2 {
            return f64::INFINITY;
        }
        let rn = self.r_max();
        let last = self.states.last().unwrap()[J0 + i];
        let ad = self.a.powi(d);
        let df = d as f64;
        last + df * df * ad * ad * rn.powi(n - d - 2) / (d + 2 - n) as f64
    }

    /// Scattering length from the variational integral, `c_d a^d = |S| J_2`.
    pub fn variational_length(&self) -> f64 {
        let v = sphere_area(self.d) * self.energy_moment_total(2) / variational_constant(self.d);
        v.max(0.0).powf(1.0 / self.d as f64)
    }

    /// Writes `(r, f0, f0_prime)` rows.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,f0,f0_prime")?;
        for i in 0..self.r.len() {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", self.r[i], self.f0[i], self.f0_prime[i])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedLengths {
    pub a: f64,
    /// NaN when undefined.
    pub a0: f64,
    pub a0_defined: bool,
    pub reff: Option<f64>,
}

/// `3 a0^2 = (1/(12 pi a^3)) int |x|^4 (|grad f0|^2 + v f0^2/2)` and
/// `1/Reff = (18/5) a0^2 / a^3`.
pub fn derived_lengths(sol: &ScatteringSolution) -> Result<DerivedLengths> {
    if sol.d != 3 {
        return Err(Error::Precondition(format!("derived lengths need d = 3, got {}", sol.d)));
    }
    if sol.a == 0.0 {
        return Err(Error::ZeroScatteringLength);
    }
    let a = sol.a;
    let moment4 = 4.0 * std::f64::consts::PI * sol.energy_moment_total(4);
    let a0 = (moment4 / (36.0 * std::f64::consts::PI * a.powi(3))).sqrt();
    Ok(DerivedLengths { a, a0, a0_defined: true, reff: Some(effective_range(a, a0)) })
}

/// Same as [`derived_lengths`] but reports a NaN marker instead of failing at `a = 0`.
pub fn derived_lengths_lenient(sol: &ScatteringSolution) -> Result<DerivedLengths> {
    match derived_lengths(sol) {
        Err(Error::ZeroScatteringLength) => Ok(DerivedLengths { a: 0.0, a0: f64::NAN, a0_defined: false, reff: None }),
        other => other,
    }
}

pub fn effective_range(a: f64, a0: f64) -> f64 {
    5.0 * a.powi(3) / (18.0 * a0 * a0)
}

/// Root-finds the soft-core strength giving scattering length `target_a` for
/// a potential of radius `radius_factor * target_a`.
pub fn calibrate_soft_core(target_a: f64, radius_factor: f64, d: usize) -> Result<f64> {
    if !(target_a > 0.0) {
        return Err(Error::Precondition(format!("target_a = {target_a} must be positive")));
    }
    if !(radius_factor > 1.0) {
        return Err(Error::Precondition(format!("radius_factor = {radius_factor} must exceed 1")));
    }
    let r0 = radius_factor * target_a;
    let a_of = |v0: f64| -> Result<f64> {
        let p = RadialPotential::soft_core(d, r0, v0)?;
        Ok(solve_p_wave(&p, 10.0 * r0, 400)?.a)
    };
    let v_max = 1e10 / (r0 * r0);
    let mut hi = 1.0 / (r0 * r0);
    let mut lo = 0.0;
    let mut a_hi = a_of(hi)?;
    while a_hi < target_a {
        lo = hi;
        hi *= 4.0;
        if hi > v_max {
            return Err(Error::NoBracket { lo: 0.0, hi: a_hi });
        }
        a_hi = a_of(hi)?;
    }
    for _ in 0..200 {
        let mid = if lo > 0.0 && hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let am = a_of(mid)?;
        if am < target_a {
            lo = mid;
        } else {
            hi = mid;
        }
        if (am - target_a).abs() <= 1e-11 * target_a || hi - lo <= 1e-15 * hi {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    EnergyForm,
    FdfForm,
}

/// `f = f0 / (1 - a^d/b^d)` for `r <= b` and `1` beyond.
#[derive(Debug, Clone)]
pub struct JastrowProfile {
    pub b: f64,
    pub base: ScatteringSolution,
    norm: f64,
}

impl JastrowProfile {
    pub fn new(base: &ScatteringSolution, b: f64) -> Result<Self> {
        if !(b > base.potential.r0) {
            return Err(Error::Precondition(format!("cutoff b = {b} must exceed R0 = {}", base.potential.r0)));
        }
        let norm = 1.0 - (base.a / b).powi(base.d as i32);
        Ok(JastrowProfile { b, base: base.clone(), norm })
    }

    pub fn d(&self) -> usize {
        self.base.d
    }

    pub fn f(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.b {
            1.0
        } else {
            (self.base.eval(r).f / self.norm).clamp(0.0, 1.0)
        }
    }

    pub fn fp(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.b {
            0.0
        } else {
            self.base.eval(r).fp / self.norm
        }
    }

    pub fn g(&self, r: f64) -> f64 {
        let f = self.f(r);
        f * f - 1.0
    }

    /// `|grad f|^2 + v f^2 / 2` (zero inside a hard core).
    pub fn energy_density(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.b {
            return 0.0;
        }
        let v = self.base.potential.v(r);
        if !v.is_finite() {
            return 0.0;
        }
        let s = self.base.eval(r);
        (s.fp * s.fp + 0.5 * v * s.f * s.f) / (self.norm * self.norm)
    }

    /// `int (|grad f|^2 + v f^2/2)|x|^n dx` or `int |x|^n f d_r f dx` over R^d.
    pub fn moment_integral(&self, n: i32, kind: MomentKind) -> Result<f64> {
        let s = self.base.eval(self.b);
        let area = sphere_area(self.d());
        let c2 = self.norm * self.norm;
        match kind {
            MomentKind::EnergyForm => {
                let i = ENERGY_MOMENTS.iter().position(|m| *m == n).ok_or(Error::UnsupportedMoment(n))?;
                Ok(area * s.j[i] / c2)
            }
            MomentKind::FdfForm => {
                let i = FDF_MOMENTS.iter().position(|m| *m == n).ok_or(Error::UnsupportedMoment(n))?;
                Ok(area * s.k[i] / c2)
            }
        }
    }
}

/// Odd-wave length in d = 1 from the infimum
/// `4/(R - a_odd) = inf int_{-R}^{R} (2|h'|^2 + v h^2)` with `h(R) = -h(-R) = 1`.
pub fn odd_wave_length(v: &RadialPotential, big_r: f64) -> Result<f64> {
    v.validate()?;
    if v.dimension != 1 {
        return Err(Error::Precondition("odd-wave length is defined for d = 1".into()));
    }
    if !(big_r > v.r0) {
        return Err(Error::Precondition(format!("R = {big_r} must exceed R0 = {}", v.r0)));
    }
    // state: h, h', E = int_0^x (2 h'^2 + v h^2)
    let rhc = v.hard_core_radius();
    let mut nodes: Vec<f64> = v.breakpoints().into_iter().filter(|x| *x < big_r && *x > rhc).collect();
    nodes.push(big_r);
    let mut y = [0.0, 1.0, 0.0];
    let mut x = rhc;
    let mut h = 0.0;
    let tol = Tolerance { rtol: 1e-13, atol: 1e-300 };
    for &nx in &nodes {
        let (c0, c1) = v.piece(x, nx);
        let f = move |t: f64, y: &[f64], dy: &mut [f64]| {
            let vv = c0 + c1 * t;
            dy[0] = y[1];
            dy[1] = 0.5 * vv * y[0];
            dy[2] = 2.0 * y[1] * y[1] + vv * y[0] * y[0];
        };
        ode::integrate(&f, x, nx, &mut y, tol, &mut h);
        x = nx;
    }
    // both half-lines contribute equally
    let energy = 2.0 * y[2] / (y[0] * y[0]);
    Ok(big_r - 4.0 / energy)
}
