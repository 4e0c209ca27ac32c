//! Fermi polyhedron (3D), Fermi polygon (2D) and lattice momentum sets.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::consts;
use crate::error::{Error, Result};
use crate::hull;
use crate::primes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyMode {
    /// Distinct primes per axis; only sign flips are exact symmetries.
    Rational,
    /// One common denominator; the full signed-permutation group is exact.
    Simple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronSpec {
    pub d: usize,
    pub s: usize,
    #[serde(rename = "Q")]
    pub q: u64,
    pub mode: PolyMode,
    #[serde(default)]
    pub rng_seed: u64,
}

/// Orbit content of a symmetric point configuration in 3D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDecomposition {
    pub generic: usize,
    pub axes: bool,
    pub diagonals: bool,
    pub edges: bool,
}

impl OrbitDecomposition {
    pub fn count(&self) -> usize {
        48 * self.generic + 6 * self.axes as usize + 8 * self.diagonals as usize + 12 * self.edges as usize
    }
}

/// Writes `s = 48 m + (subset of {6, 8, 12})`, preferring the most generic orbits.
pub fn decompose_orbits(s: usize) -> Result<OrbitDecomposition> {
    for mask in 0..8u8 {
        let o = OrbitDecomposition { generic: 0, axes: mask & 1 != 0, diagonals: mask & 2 != 0, edges: mask & 4 != 0 };
        let rest = o.count();
        if s >= rest && (s - rest) % 48 == 0 {
            return Ok(OrbitDecomposition { generic: (s - rest) / 48, ..o });
        }
    }
    Err(Error::SymmetryOrbitMismatch(format!("s = {s} is not 48 m plus a sum of distinct orbit sizes from {{6, 8, 12}}")))
}

fn generic_orbit(r: [f64; 3], out: &mut Vec<[f64; 3]>) {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in PERMS {
        for signs in 0..8 {
            let mut v = [0.0; 3];
            for k in 0..3 {
                let sg = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                v[k] = sg * r[p[k]];
            }
            out.push(v);
        }
    }
}

fn special_orbits(o: &OrbitDecomposition) -> Vec<[f64; 3]> {
    let mut v = Vec::new();
    if o.axes {
        for k in 0..3 {
            for sg in [1.0, -1.0] {
                let mut x = [0.0; 3];
                x[k] = sg;
                v.push(x);
            }
        }
    }
    if o.diagonals {
        let c = 1.0 / 3f64.sqrt();
        for signs in 0..8 {
            v.push([0, 1, 2].map(|k| if signs >> k & 1 == 1 { -c } else { c }));
        }
    }
    if o.edges {
        let c = 1.0 / 2f64.sqrt();
        for zero in 0..3 {
            for signs in 0..4 {
                let mut x = [0.0; 3];
                let mut b = 0;
                for k in 0..3 {
                    if k != zero {
                        x[k] = if signs >> b & 1 == 1 { -c } else { c };
                        b += 1;
                    }
                }
                v.push(x);
            }
        }
    }
    v
}

fn fold_to_chamber(v: [f64; 3]) -> [f64; 3] {
    let mut a = v.map(f64::abs);
    a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    a
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / n)
}

fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Symmetric, evenly spread points on the unit sphere.
///
/// Generic orbit representatives are seeded from a Fibonacci lattice folded
/// into the fundamental chamber and relaxed by Riesz repulsion against the
/// full orbit-expanded configuration.
pub fn sphere_points(s: usize, seed: u64) -> Result<Vec<[f64; 3]>> {
    let orbits = decompose_orbits(s)?;
    let m = orbits.generic;
    let fixed = special_orbits(&orbits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fib = fibonacci_sphere((48 * m).max(1));
    let mut reps: Vec<[f64; 3]> = (0..m)
        .map(|i| {
            let f = fold_to_chamber(fib[(48 * i + 17) % fib.len()]);
            let jitter: [f64; 3] = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            normalize(fold_to_chamber([f[0] + 1e-3 * jitter[0] + 1e-2, f[1] + 1e-3 * jitter[1] + 5e-3, f[2] + 1e-3 * jitter[2] + 2e-3]))
        })
        .collect();
    let iters = 400;
    let mut step = 0.3 / (s as f64).sqrt();
    for _ in 0..iters {
        let mut all = fixed.clone();
        for r in &reps {
            generic_orbit(*r, &mut all);
        }
        let mut next = reps.clone();
        for (i, r) in reps.iter().enumerate() {
            let mut force = [0.0; 3];
            for w in &all {
                let dv = [r[0] - w[0], r[1] - w[1], r[2] - w[2]];
                let d2 = dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2];
                if d2 < 1e-24 {
                    continue;
                }
                let inv = d2.powf(-1.5);
                for k in 0..3 {
                    force[k] += dv[k] * inv;
                }
            }
            // tangential part only
            let radial = force[0] * r[0] + force[1] * r[1] + force[2] * r[2];
            let t = [force[0] - radial * r[0], force[1] - radial * r[1], force[2] - radial * r[2]];
            let tn = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt().max(1e-300);
            next[i] = fold_to_chamber(normalize([r[0] + step * t[0] / tn, r[1] + step * t[1] / tn, r[2] + step * t[2] / tn]));
        }
        reps = next;
        step *= 0.985;
    }
    for r in &reps {
        let gap = (r[0] - r[1]).min(r[1] - r[2]).min(r[2]);
        if gap < 1e-6 {
            return Err(Error::SymmetryOrbitMismatch("a generic representative collapsed onto a mirror plane".into()));
        }
    }
    let mut all = fixed;
    for r in &reps {
        generic_orbit(*r, &mut all);
    }
    Ok(all)
}

/// Circle points at angles `(2j + 1) pi / s`.
pub fn circle_points(s: usize) -> Result<Vec<[f64; 2]>> {
    if s < 4 || s % 4 != 0 {
        return Err(Error::SymmetryOrbitMismatch(format!("planar corner count s = {s} must be a positive multiple of 4")));
    }
    Ok((0..s)
        .map(|j| {
            let t = (2 * j + 1) as f64 * PI / s as f64;
            [t.cos(), t.sin()]
        })
        .collect())
}

/// Minimum pairwise distance and covering radius of a unit-sphere configuration.
pub fn evenness(points: &[[f64; 3]], samples: usize) -> (f64, f64) {
    let mut dmin = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            dmin = dmin.min(dist(points[i], points[j]));
        }
    }
    let cover =
        fibonacci_sphere(samples).iter().map(|x| points.iter().map(|p| dist(*x, *p)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    (dmin, cover)
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Exact polytope data; corners are `sigma * (p^1/Q_1, ..., p^d/Q_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermiPolyhedron {
    pub d: usize,
    pub s: usize,
    #[serde(rename = "Q")]
    pub q: u64,
    pub mode: PolyMode,
    pub seed: u64,
    pub primes: Vec<u64>,
    /// 40 significant digits, truncated.
    pub sigma: String,
    pub corners: Vec<Vec<i64>>,
    /// Outward triangles in 3D, counter-clockwise edges in 2D.
    pub faces: Vec<Vec<usize>>,
    /// `d!` times the volume of the integer hull, decimal.
    pub volume_int: String,
}

/// Construction diagnostics recorded alongside a polyhedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub all_extreme: bool,
    pub min_distance_scaled: f64,
    pub covering_radius_scaled: f64,
    pub sigma_over_q: f64,
    pub sigma_constant: f64,
    pub radial_min: f64,
    pub radial_max: f64,
    pub radial_constant: f64,
    pub volume_divergence: f64,
    pub volume_centroid: f64,
    pub warnings: Vec<String>,
}

fn sigma_exact(d: usize, primes: &[u64], vol_int: &BigInt) -> BigRational {
    // sigma^d = K pi prod(Q) / V with K = 8 (3D) or 2 (2D)
    let k: i64 = if d == 3 { 8 } else { 2 };
    let (pi_lo, _) = consts::pi_bracket();
    let prod: BigInt = primes.iter().map(|q| BigInt::from(*q)).product();
    let target = pi_lo * BigRational::from_integer(prod * k) / BigRational::from_integer(vol_int.clone());
    let digits = 60u32;
    let scale = num_traits::pow(BigInt::from(10), (digits * d as u32) as usize);
    let scaled = (target * BigRational::from_integer(scale)).to_integer();
    let root = scaled.nth_root(d as u32);
    BigRational::new(root, num_traits::pow(BigInt::from(10), digits as usize))
}

pub fn build_polyhedron(spec: &PolyhedronSpec) -> Result<(FermiPolyhedron, BuildReport)> {
    let mut warnings = Vec::new();
    if spec.q < 1000 {
        return Err(Error::Precondition(format!("Q = {} is too small", spec.q)));
    }
    let qf = spec.q as f64;
    match spec.d {
        3 => {
            let unit = sphere_points(spec.s, spec.rng_seed)?;
            let primes = match spec.mode {
                PolyMode::Rational => primes::primes_from(spec.q, 3),
                PolyMode::Simple => vec![primes::primes_from(spec.q, 1)[0]; 3],
            };
            let radius = qf.powf(-0.75);
            let ints: Vec<[i64; 3]> = unit.iter().map(|u| [0, 1, 2].map(|k| (u[k] * radius * primes[k] as f64).round() as i64)).collect();
            if qf.powf(-0.25) * spec.s as f64 > 10.0 {
                warnings.push(format!("Q^(-1/4) s = {:.3} exceeds 10", qf.powf(-0.25) * spec.s as f64));
            }
            let h = hull::hull3(&ints)?;
            let v6 = hull::volume6_origin(&ints, &h.faces);
            let v6c = hull::volume6_centroid(&ints, &h.faces);
            let vol_int = BigInt::from(v6);
            let sigma = sigma_exact(3, &primes, &vol_int);
            let poly = FermiPolyhedron {
                d: 3,
                s: spec.s,
                q: spec.q,
                mode: spec.mode,
                seed: spec.rng_seed,
                primes: primes.clone(),
                sigma: consts::format_significant(&sigma, 40),
                corners: ints.iter().map(|p| p.to_vec()).collect(),
                faces: h.faces.iter().map(|f| f.to_vec()).collect(),
                volume_int: v6.to_string(),
            };
            let sig = sigma.to_f64().unwrap();
            let prodq: f64 = primes.iter().map(|q| *q as f64).product();
            let vol = |v: i128| sig.powi(3) * v as f64 / (6.0 * prodq);
            let (dmin, cover) = evenness(&unit, 20_000);
            let geo = PolyGeometry::new(&poly)?;
            let sf = (spec.s as f64).sqrt();
            let report = BuildReport {
                all_extreme: h.extreme.iter().all(|e| *e),
                min_distance_scaled: dmin * sf,
                covering_radius_scaled: cover * sf,
                sigma_over_q: sig / qf.powf(0.75),
                sigma_constant: (sig / qf.powf(0.75) - 1.0).abs() * spec.s as f64,
                radial_min: geo.r_in,
                radial_max: geo.r_out,
                radial_constant: (1.0 - geo.r_in).max(geo.r_out - 1.0) * spec.s as f64,
                volume_divergence: vol(v6),
                volume_centroid: vol(v6c),
                warnings,
            };
            Ok((poly, report))
        }
        2 => {
            let unit = circle_points(spec.s)?;
            let primes = match spec.mode {
                PolyMode::Rational => primes::primes_from(spec.q, 2),
                PolyMode::Simple => vec![primes::primes_from(spec.q, 1)[0]; 2],
            };
            let radius = qf.powf(-0.5);
            let ints: Vec<[i64; 2]> = unit.iter().map(|u| [0, 1].map(|k| (u[k] * radius * primes[k] as f64).round() as i64)).collect();
            if qf.powf(-0.5) * (spec.s * spec.s) as f64 > 10.0 {
                warnings.push(format!("Q^(-1/2) s^2 = {:.3} exceeds 10", qf.powf(-0.5) * (spec.s * spec.s) as f64));
            }
            let cyc = hull::hull2(&ints)?;
            let a2 = hull::area2(&ints, &cyc);
            let vol_int = BigInt::from(a2);
            let sigma = sigma_exact(2, &primes, &vol_int);
            let faces: Vec<Vec<usize>> = (0..cyc.len()).map(|i| vec![cyc[i], cyc[(i + 1) % cyc.len()]]).collect();
            let poly = FermiPolyhedron {
                d: 2,
                s: spec.s,
                q: spec.q,
                mode: spec.mode,
                seed: spec.rng_seed,
                primes: primes.clone(),
                sigma: consts::format_significant(&sigma, 40),
                corners: ints.iter().map(|p| p.to_vec()).collect(),
                faces,
                volume_int: a2.to_string(),
            };
            let sig = sigma.to_f64().unwrap();
            let prodq: f64 = primes.iter().map(|q| *q as f64).product();
            let geo = PolyGeometry::new(&poly)?;
            // centroid route: fan triangles from the vertex mean
            let m = cyc.len() as f64;
            let cx = cyc.iter().map(|&i| ints[i][0] as f64).sum::<f64>() / m;
            let cy = cyc.iter().map(|&i| ints[i][1] as f64).sum::<f64>() / m;
            let fan: f64 = (0..cyc.len())
                .map(|i| {
                    let a = ints[cyc[i]];
                    let b = ints[cyc[(i + 1) % cyc.len()]];
                    (a[0] as f64 - cx) * (b[1] as f64 - cy) - (a[1] as f64 - cy) * (b[0] as f64 - cx)
                })
                .sum();
            let s2 = spec.s as f64 * spec.s as f64;
            let report = BuildReport {
                all_extreme: cyc.len() == ints.len(),
                min_distance_scaled: 2.0 * (PI / spec.s as f64).sin() * spec.s as f64,
                covering_radius_scaled: 2.0 * (PI / (2.0 * spec.s as f64)).sin() * spec.s as f64,
                sigma_over_q: sig / qf.sqrt(),
                sigma_constant: (sig / qf.sqrt() - 1.0).abs() * s2,
                radial_min: geo.r_in,
                radial_max: geo.r_out,
                radial_constant: (1.0 - geo.r_in).max(geo.r_out - 1.0) * s2,
                volume_divergence: sig * sig * a2 as f64 / (2.0 * prodq),
                volume_centroid: sig * sig * fan / (2.0 * prodq),
                warnings,
            };
            Ok((poly, report))
        }
        d => Err(Error::Precondition(format!("polyhedron dimension must be 2 or 3, got {d}"))),
    }
}

impl FermiPolyhedron {
    pub fn sigma_f64(&self) -> f64 {
        self.sigma.parse().unwrap_or(f64::NAN)
    }

    pub fn sigma_rational(&self) -> BigRational {
        consts::decimal_rational(&self.sigma)
    }

    /// Corner positions of the normalized polytope `P`.
    pub fn corner_points(&self) -> Vec<Vec<f64>> {
        let s = self.sigma_f64();
        self.corners.iter().map(|p| p.iter().zip(&self.primes).map(|(x, q)| s * *x as f64 / *q as f64).collect()).collect()
    }

    /// `sigma (1/Q_1, ..., 1/Q_d)`.
    pub fn centre(&self) -> Vec<f64> {
        let s = self.sigma_f64();
        self.primes.iter().map(|q| s / *q as f64).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: FermiPolyhedron = serde_json::from_str(s).map_err(|e| Error::InvalidPotential(format!("polyhedron JSON: {e}")))?;
        PolyGeometry::new(&p)?;
        Ok(p)
    }

    /// Exact sign-flip invariance of the integer corner set.
    pub fn sign_flip_invariant(&self) -> bool {
        let set: HashSet<Vec<i64>> = self.corners.iter().cloned().collect();
        (0..1usize << self.d).all(|mask| {
            self.corners.iter().all(|c| {
                let f: Vec<i64> = c.iter().enumerate().map(|(k, x)| if mask >> k & 1 == 1 { -x } else { *x }).collect();
                set.contains(&f)
            })
        })
    }

    /// Extremity of every corner, recomputed from scratch.
    pub fn all_corners_extreme(&self) -> Result<bool> {
        match self.d {
            3 => {
                let pts: Vec<[i64; 3]> = self.corners.iter().map(|c| [c[0], c[1], c[2]]).collect();
                Ok(hull::hull3(&pts)?.extreme.iter().all(|e| *e))
            }
            _ => {
                let pts: Vec<[i64; 2]> = self.corners.iter().map(|c| [c[0], c[1]]).collect();
                Ok(hull::hull2(&pts)?.len() == pts.len())
            }
        }
    }
}

/// Half-space description `n . y <= c` of the integer hull plus radial data.
#[derive(Debug, Clone)]
pub struct PolyGeometry {
    pub d: usize,
    pub normals: Vec<[i128; 3]>,
    pub offsets: Vec<i128>,
    pub primes: [i128; 3],
    pub sigma: f64,
    /// Inradius and circumradius of the normalized polytope about the origin.
    pub r_in: f64,
    pub r_out: f64,
    volume_int: BigInt,
    pi: (BigRational, BigRational),
}

impl PolyGeometry {
    pub fn new(p: &FermiPolyhedron) -> Result<Self> {
        if p.primes.len() != p.d || p.corners.iter().any(|c| c.len() != p.d) {
            return Err(Error::GeometryInvalid("corner or prime arity does not match dimension".into()));
        }
        let c3 = |i: usize| -> [i64; 3] {
            let c = &p.corners[i];
            [c[0], c[1], if p.d == 3 { c[2] } else { 0 }]
        };
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for f in &p.faces {
            if f.iter().any(|&i| i >= p.corners.len()) {
                return Err(Error::GeometryInvalid("face index out of range".into()));
            }
            let n: [i128; 3] = if p.d == 3 {
                hull::face_normal(&p.corners.iter().map(|c| [c[0], c[1], c[2]]).collect::<Vec<_>>(), &[f[0], f[1], f[2]])
            } else {
                let (a, b) = (c3(f[0]), c3(f[1]));
                [(b[1] - a[1]) as i128, -(b[0] - a[0]) as i128, 0]
            };
            let a = c3(f[0]);
            let c = n[0] * a[0] as i128 + n[1] * a[1] as i128 + n[2] * a[2] as i128;
            if c <= 0 {
                return Err(Error::GeometryInvalid("origin not strictly inside the polytope".into()));
            }
            normals.push(n);
            offsets.push(c);
        }
        let volume_int: BigInt = p.volume_int.parse().map_err(|_| Error::GeometryInvalid("volume is not an integer".into()))?;
        let sigma = p.sigma_f64();
        let mut primes = [1i128; 3];
        for (k, q) in p.primes.iter().enumerate() {
            primes[k] = *q as i128;
        }
        let r_in = normals
            .iter()
            .zip(&offsets)
            .map(|(n, c)| {
                let m: f64 = (0..3).map(|k| (n[k] as f64 * primes[k] as f64).powi(2)).sum::<f64>().sqrt();
                *c as f64 * sigma / m
            })
            .fold(f64::INFINITY, f64::min);
        let r_out = p.corner_points().iter().map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
        Ok(PolyGeometry { d: p.d, normals, offsets, primes, sigma, r_in, r_out, volume_int, pi: consts::pi_bracket() })
    }

    /// Membership of `j / R` in `P` with `R = r_num / r_den`; the second flag
    /// reports an unresolved tie against the pi bracket.
    pub fn contains(&self, j: [i64; 3], r_num: i64, r_den: i64) -> (bool, bool) {
        let rf = r_num as f64 / r_den as f64;
        let norm = (j[0] as f64).hypot(j[1] as f64).hypot(j[2] as f64) / rf;
        if norm < self.r_in * (1.0 - 1e-9) {
            return (true, false);
        }
        if norm > self.r_out * (1.0 + 1e-9) {
            return (false, false);
        }
        let mut tie = false;
        for (n, c) in self.normals.iter().zip(&self.offsets) {
            let t: i128 = (0..3).map(|k| n[k] * self.primes[k] * j[k] as i128).sum();
            if t <= 0 {
                continue;
            }
            // inside this half-space iff t r_den / (c r_num) <= sigma
            let u = t as f64 * r_den as f64 / (*c as f64 * r_num as f64);
            if u < self.sigma * (1.0 - 1e-10) {
                continue;
            }
            if u > self.sigma * (1.0 + 1e-10) {
                return (false, tie);
            }
            match self.exact_side(t, *c, r_num, r_den) {
                Some(true) => continue,
                Some(false) => return (false, tie),
                None => tie = true,
            }
        }
        (true, tie)
    }

    fn exact_side(&self, t: i128, c: i128, r_num: i64, r_den: i64) -> Option<bool> {
        let d = self.d;
        let k: i64 = if d == 3 { 8 } else { 2 };
        let prod: BigInt = self.primes[..d].iter().map(|q| BigInt::from(*q)).product();
        let lhs = num_traits::pow(BigInt::from(t) * BigInt::from(r_den), d) * &self.volume_int;
        let rhs = num_traits::pow(BigInt::from(c) * BigInt::from(r_num), d) * prod * k;
        let lhs = BigRational::from_integer(lhs);
        let rhs = BigRational::from_integer(rhs);
        if lhs < &self.pi.0 * &rhs {
            Some(true)
        } else if lhs > &self.pi.1 * &rhs {
            Some(false)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub enum Region {
    Ball { d: usize },
    Polyhedron(Box<FermiPolyhedron>),
}

impl Region {
    pub fn d(&self) -> usize {
        match self {
            Region::Ball { d } => *d,
            Region::Polyhedron(p) => p.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Ball,
    Polyhedron,
    Explicit,
}

/// Lattice momenta `k = (2 pi / L) j`, stored as integer index vectors
/// (unused trailing components are zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSet {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub r_num: i64,
    pub r_den: i64,
    pub region: RegionKind,
    pub points: Vec<[i64; 3]>,
    /// Points whose membership could not be separated from the boundary.
    pub ties: usize,
}

/// Enumerates `{ j : j / R in region }` with `R = kF L / (2 pi) = r_num / r_den`.
pub fn enumerate_momenta(region: &Region, r_num: i64, r_den: i64, l: f64) -> Result<MomentumSet> {
    let d = region.d();
    if !(1..=3).contains(&d) {
        return Err(Error::Precondition(format!("dimension {d} not in 1..=3")));
    }
    if r_den <= 0 || r_num < r_den {
        return Err(Error::Precondition(format!("kF L / 2pi = {r_num}/{r_den} must be at least 1")));
    }
    if !(l > 0.0) {
        return Err(Error::NonpositiveRange(l));
    }
    let rf = r_num as f64 / r_den as f64;
    let geo = match region {
        Region::Polyhedron(p) => Some(PolyGeometry::new(p)?),
        Region::Ball { .. } => None,
    };
    let reach = rf * geo.as_ref().map_or(1.0, |g| g.r_out) + 1.0;
    let bound = reach.ceil() as i64;
    let span = |k: usize| if k < d { -bound..=bound } else { 0..=0 };
    let mut points = Vec::new();
    let mut ties = 0;
    let rn2 = (r_num as i128).pow(2);
    let rd2 = (r_den as i128).pow(2);
    for x in span(0) {
        for y in span(1) {
            for z in span(2) {
                let j = [x, y, z];
                let inside = match &geo {
                    None => {
                        let n2: i128 = j.iter().map(|v| (*v as i128).pow(2)).sum();
                        n2 * rd2 <= rn2
                    }
                    Some(g) => {
                        let (ins, tie) = g.contains(j, r_num, r_den);
                        ties += tie as usize;
                        ins
                    }
                };
                if inside {
                    points.push(j);
                }
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    let kind = match region {
        Region::Ball { .. } => RegionKind::Ball,
        Region::Polyhedron(_) => RegionKind::Polyhedron,
    };
    Ok(MomentumSet { d, l, r_num, r_den, region: kind, points, ties })
}

impl MomentumSet {
    /// A set given directly by its index vectors, sorted lexicographically.
    pub fn from_indices(d: usize, l: f64, mut points: Vec<[i64; 3]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        points.sort();
        points.dedup();
        Ok(MomentumSet { d, l, r_num: 1, r_den: 1, region: RegionKind::Explicit, points, ties: 0 })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn r(&self) -> f64 {
        self.r_num as f64 / self.r_den as f64
    }

    pub fn kf(&self) -> f64 {
        2.0 * PI * self.r() / self.l
    }

    pub fn rho(&self) -> f64 {
        self.n() as f64 / self.l.powi(self.d as i32)
    }

    pub fn unit(&self) -> f64 {
        2.0 * PI / self.l
    }

    pub fn momentum(&self, i: usize) -> [f64; 3] {
        let u = self.unit();
        self.points[i].map(|x| u * x as f64)
    }

    pub fn max_index(&self) -> i64 {
        self.points.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# L={:.17e} kF={:.17e} R={}/{} N={}", self.l, self.kf(), self.r_num, self.r_den, self.n())?;
        let cols = ["j1", "j2", "j3"];
        writeln!(w, "{}", cols[..self.d].join(","))?;
        for p in &self.points {
            let row: Vec<String> = p[..self.d].iter().map(|x| x.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticSums {
    pub s2: f64,
    pub s4: f64,
    pub s4_1: f64,
    pub ref_s2: f64,
    pub ref_s4: f64,
    pub ref_s4_1: f64,
    pub dev_s2: f64,
    pub dev_s4: f64,
    pub dev_s4_1: f64,
}

/// Exact integer sums scaled by powers of `2 pi / L`, with continuum
/// references built from `kF = (6 pi^2 rho)^{1/3}` in 3D (and the analogous
/// Fermi momenta in 2D and 1D).
pub fn kinetic_sums(ms: &MomentumSet) -> Result<KineticSums> {
    if ms.points.is_empty() {
        return Err(Error::EmptySet);
    }
    let (mut a2, mut a4, mut a41) = (0i128, 0i128, 0i128);
    for p in &ms.points {
        let n2: i128 = p.iter().map(|x| (*x as i128).pow(2)).sum();
        a2 += n2;
        a4 += n2 * n2;
        a41 += (p[0] as i128).pow(4);
    }
    let u = ms.unit();
    let (s2, s4, s4_1) = (a2 as f64 * u * u, a4 as f64 * u.powi(4), a41 as f64 * u.powi(4));
    let n = ms.n() as f64;
    let rho = ms.rho();
    // reference kF and angular averages per dimension
    let (kf, c2, c4, c41) = match ms.d {
        3 => ((6.0 * PI * PI * rho).cbrt(), 3.0 / 5.0, 3.0 / 7.0, 3.0 / 35.0),
        2 => ((4.0 * PI * rho).sqrt(), 1.0 / 2.0, 1.0 / 3.0, 1.0 / 8.0),
        _ => (PI * rho, 1.0 / 3.0, 1.0 / 5.0, 1.0 / 5.0),
    };
    let (ref_s2, ref_s4, ref_s4_1) = (c2 * kf * kf * n, c4 * kf.powi(4) * n, c41 * kf.powi(4) * n);
    let dev = |x: f64, r: f64| if r > 0.0 { x / r - 1.0 } else { f64::NAN };
    Ok(KineticSums {
        s2,
        s4,
        s4_1,
        ref_s2,
        ref_s4,
        ref_s4_1,
        dev_s2: dev(s2, ref_s2),
        dev_s4: dev(s4, ref_s4),
        dev_s4_1: dev(s4_1, ref_s4_1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryDefect {
    pub defect: f64,
    /// `defect / (Q^{-1/4} N sup t)`.
    pub ratio: f64,
    pub mismatched: usize,
}

/// Weighted size of the symmetric difference between `P_F` and its image
/// under the swap of axes `mu` and `nu`.
pub fn symmetry_defect<T: Fn([f64; 3]) -> f64>(ms: &MomentumSet, q: u64, axes: (usize, usize), weight: T) -> Result<SymmetryDefect> {
    if ms.d != 3 {
        return Err(Error::Precondition("symmetry defect is defined in 3D".into()));
    }
    let (mu, nu) = axes;
    if mu > 2 || nu > 2 || mu == nu {
        return Err(Error::Precondition(format!("axes ({mu}, {nu}) must be distinct and below 3")));
    }
    let set: HashSet<[i64; 3]> = ms.points.iter().copied().collect();
    let u = ms.unit();
    let phys = |j: [i64; 3]| j.map(|x| u * x as f64);
    let mut defect = 0.0;
    let mut sup: f64 = 0.0;
    let mut mismatched = 0;
    for p in &ms.points {
        let mut sw = *p;
        sw.swap(mu, nu);
        sup = sup.max(weight(phys(*p))).max(weight(phys(sw)));
        if !set.contains(&sw) {
            // p is in P_F only, sw is in the image only
            defect += weight(phys(*p)) + weight(phys(sw));
            mismatched += 2;
        }
    }
    let scale = (q as f64).powf(-0.25) * ms.n() as f64 * sup;
    Ok(SymmetryDefect { defect, ratio: if scale > 0.0 { defect / scale } else { 0.0 }, mismatched })
}

/// Exact-rational volume of the normalized polytope, for cross-checks.
pub fn polytope_volume(p: &FermiPolyhedron) -> BigRational {
    let prod: BigInt = p.primes.iter().map(|q| BigInt::from(*q)).product();
    let fact: i64 = if p.d == 3 { 6 } else { 2 };
    let vint: BigInt = p.volume_int.parse().unwrap_or_else(|_| BigInt::zero());
    let s = p.sigma_rational();
    let sd = num_traits::pow(s, p.d);
    sd * BigRational::new(vint, prod * fact)
}

/// Number of integer points with `|j| <= r` in dimension `d`, by direct scan.
pub fn ball_count(d: usize, r: f64) -> usize {
    let b = r.floor() as i64;
    let r2 = r * r;
    let mut count = 0;
    let span = |k: usize| if k < d { -b..=b } else { 0..=0 };
    for x in span(0) {
        for y in span(1) {
            for z in span(2) {
                if ((x * x + y * y + z * z) as f64) <= r2 {
                    count += 1;
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: usize, q: u64, mode: PolyMode) -> PolyhedronSpec {
        PolyhedronSpec { d: 3, s, q, mode, rng_seed: 7 }
    }

    #[test]
    fn orbit_decomposition() {
        assert_eq!(decompose_orbits(54).unwrap(), OrbitDecomposition { generic: 1, axes: true, diagonals: false, edges: false });
        assert_eq!(decompose_orbits(74).unwrap().count(), 74);
        assert!(decompose_orbits(50).is_err());
        assert!(matches!(decompose_orbits(7), Err(Error::SymmetryOrbitMismatch(_))));
    }

    #[test]
    fn ball_counts() {
        let ms = enumerate_momenta(&Region::Ball { d: 3 }, 5, 2, 1.0).unwrap();
        assert_eq!(ms.n(), 81);
        assert_eq!(ball_count(3, 2.5), 81);
        let ms = enumerate_momenta(&Region::Ball { d: 1 }, 1, 1, 1.0).unwrap();
        assert_eq!(ms.n(), 3);
    }

    #[test]
    fn rational_polyhedron_properties() {
        let (p, rep) = build_polyhedron(&spec(54, 1_000_000, PolyMode::Rational)).unwrap();
        assert_eq!(p.primes, vec![1_000_003, 1_000_033, 1_000_037]);
        assert!(rep.all_extreme);
        assert!(p.sign_flip_invariant());
        assert!((rep.volume_divergence / (4.0 * PI / 3.0) - 1.0).abs() < 1e-12);
        assert!((rep.volume_centroid / (4.0 * PI / 3.0) - 1.0).abs() < 1e-12);
        let v = polytope_volume(&p).to_f64().unwrap();
        assert!((v / (4.0 * PI / 3.0) - 1.0).abs() < 1e-12);
        assert!(rep.radial_min < 1.0 && rep.radial_max > 1.0);
    }

    #[test]
    fn json_round_trip() {
        let (p, _) = build_polyhedron(&spec(48, 1_000_000, PolyMode::Rational)).unwrap();
        let q = FermiPolyhedron::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn deterministic_construction() {
        let a = build_polyhedron(&spec(96, 100_000_000, PolyMode::Rational)).unwrap().0;
        let b = build_polyhedron(&spec(96, 100_000_000, PolyMode::Rational)).unwrap().0;
        assert_eq!(a.corners, b.corners);
    }

    #[test]
    fn simple_mode_has_no_swap_defect() {
        let (p, _) = build_polyhedron(&spec(48, 1_000_000, PolyMode::Simple)).unwrap();
        let ms = enumerate_momenta(&Region::Polyhedron(Box::new(p)), 8, 1, 1.0).unwrap();
        for axes in [(0, 1), (0, 2), (1, 2)] {
            let sd = symmetry_defect(&ms, 1_000_000, axes, |_| 1.0).unwrap();
            assert_eq!(sd.defect, 0.0);
        }
    }

    #[test]
    fn momentum_set_symmetric_and_inside() {
        let (p, rep) = build_polyhedron(&spec(48, 1_000_000, PolyMode::Rational)).unwrap();
        let ms = enumerate_momenta(&Region::Polyhedron(Box::new(p)), 10, 1, 2.0 * PI).unwrap();
        assert_eq!(ms.ties, 0);
        let set: HashSet<[i64; 3]> = ms.points.iter().copied().collect();
        for j in &ms.points {
            for mask in 0..8 {
                let f = [0, 1, 2].map(|k| if mask >> k & 1 == 1 { -j[k] } else { j[k] });
                assert!(set.contains(&f));
            }
            let r = (j[0] as f64).hypot(j[1] as f64).hypot(j[2] as f64) / 10.0;
            assert!(r <= rep.radial_max + 1e-12);
        }
        let inner = ball_count(3, 10.0 * rep.radial_min * (1.0 - 1e-9));
        let inner_in = ms.points.iter().filter(|j| {
            let r = (j[0] as f64).hypot(j[1] as f64).hypot(j[2] as f64);
            r <= 10.0 * rep.radial_min * (1.0 - 1e-9)
        });
        assert_eq!(inner_in.count(), inner);
    }

    #[test]
    fn exact_and_float_membership_agree() {
        let (p, _) = build_polyhedron(&spec(48, 1_000_000, PolyMode::Rational)).unwrap();
        let g = PolyGeometry::new(&p).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let j = [r.gen_range(-12..=12), r.gen_range(-12..=12), r.gen_range(-12..=12)];
            let (inside, _) = g.contains(j, 10, 1);
            let mut exact = true;
            for (n, c) in g.normals.iter().zip(&g.offsets) {
                let t: i128 = (0..3).map(|k| n[k] * g.primes[k] * j[k] as i128).sum();
                if t > 0 && g.exact_side(t, *c, 10, 1) == Some(false) {
                    exact = false;
                }
            }
            assert_eq!(inside, exact);
        }
    }

    #[test]
    fn kinetic_sum_trivia() {
        let ms = MomentumSet::from_indices(3, 1.0, vec![[0, 0, 0]]).unwrap();
        let k = kinetic_sums(&ms).unwrap();
        assert_eq!((k.s2, k.s4, k.s4_1), (0.0, 0.0, 0.0));
        assert!(MomentumSet::from_indices(3, 1.0, vec![]).is_err());
    }

    #[test]
    fn polygon_properties() {
        let (p, rep) = build_polyhedron(&PolyhedronSpec { d: 2, s: 16, q: 1_000_000, mode: PolyMode::Rational, rng_seed: 0 }).unwrap();
        assert!(rep.all_extreme);
        assert!(p.sign_flip_invariant());
        assert!((rep.volume_divergence / PI - 1.0).abs() < 1e-12);
        assert!((rep.volume_centroid / PI - 1.0).abs() < 1e-12);
        let pts = p.corner_points();
        let cyc: Vec<usize> = p.faces.iter().map(|f| f[0]).collect();
        let gaps: Vec<f64> = (0..cyc.len())
            .map(|i| {
                let a = &pts[cyc[i]];
                let b = &pts[cyc[(i + 1) % cyc.len()]];
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .collect();
        let (lo, hi) = gaps.iter().fold((f64::INFINITY, 0f64), |(l, h), g| (l.min(*g), h.max(*g)));
        assert!(hi / lo < 4.0);
        assert!(circle_points(10).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]
            #[test]
            fn ball_sets_are_sign_flip_closed(num in 2i64..30, den in 1i64..4) {
                prop_assume!(num >= den);
                let ms = enumerate_momenta(&Region::Ball { d: 3 }, num, den, 1.0).unwrap();
                let set: HashSet<[i64; 3]> = ms.points.iter().copied().collect();
                for j in &ms.points {
                    prop_assert!(set.contains(&[-j[0], j[1], j[2]]));
                    prop_assert!(set.contains(&[j[1], j[0], j[2]]));
                }
                let mut sorted = ms.points.clone();
                sorted.sort();
                prop_assert_eq!(sorted, ms.points.clone());
            }
        }
    }
}
