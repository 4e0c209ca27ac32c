//! Reduced densities of the free Slater determinant and a discrete-torus oracle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermi_surface::MomentumSet;

/// `gamma(x) = L^{-d} sum_k e^{ikx}` for a fixed momentum set.
#[derive(Debug, Clone)]
pub struct OneBodyKernel {
    pub d: usize,
    pub l: f64,
    pub n: usize,
    pub k: Vec<[f64; 3]>,
    /// Closed under `k -> -k`, so `gamma` is real.
    pub symmetric: bool,
}

impl OneBodyKernel {
    pub fn new(ms: &MomentumSet) -> Self {
        let set: std::collections::HashSet<[i64; 3]> = ms.points.iter().copied().collect();
        let symmetric = ms.points.iter().all(|p| set.contains(&p.map(|x| -x)));
        OneBodyKernel { d: ms.d, l: ms.l, n: ms.n(), k: (0..ms.n()).map(|i| ms.momentum(i)).collect(), symmetric }
    }

    pub fn rho(&self) -> f64 {
        self.n as f64 / self.vol()
    }

    pub fn vol(&self) -> f64 {
        self.l.powi(self.d as i32)
    }

    fn phase(&self, k: &[f64; 3], x: &[f64; 3]) -> f64 {
        (0..self.d).map(|i| k[i] * x[i]).sum()
    }

    pub fn gamma(&self, x: &[f64; 3]) -> Complex64 {
        if self.symmetric {
            return Complex64::new(self.gamma_re(x), 0.0);
        }
        let s: Complex64 = self.k.iter().map(|k| Complex64::from_polar(1.0, self.phase(k, x))).sum();
        s / self.vol()
    }

    pub fn gamma_re(&self, x: &[f64; 3]) -> f64 {
        self.k.iter().map(|k| self.phase(k, x).cos()).sum::<f64>() / self.vol()
    }

    /// `rho - Re gamma(x)` without cancellation.
    pub fn rho_minus_gamma(&self, x: &[f64; 3]) -> f64 {
        self.k.iter().map(|k| 2.0 * (0.5 * self.phase(k, x)).sin().powi(2)).sum::<f64>() / self.vol()
    }

    /// Gradient of `gamma`, differentiated term by term.
    pub fn grad(&self, x: &[f64; 3]) -> [Complex64; 3] {
        let mut g = [Complex64::new(0.0, 0.0); 3];
        for k in &self.k {
            let e = Complex64::from_polar(1.0, self.phase(k, x)) * Complex64::i();
            for a in 0..self.d {
                g[a] += e * k[a];
            }
        }
        g.map(|z| z / self.vol())
    }

    pub fn hessian(&self, x: &[f64; 3]) -> [[Complex64; 3]; 3] {
        let mut h = [[Complex64::new(0.0, 0.0); 3]; 3];
        for k in &self.k {
            let e = -Complex64::from_polar(1.0, self.phase(k, x));
            for a in 0..self.d {
                for b in 0..self.d {
                    h[a][b] += e * (k[a] * k[b]);
                }
            }
        }
        h.map(|r| r.map(|z| z / self.vol()))
    }

    /// `det[gamma(x_i - x_j)]`; zero when more points than particles.
    pub fn rho_p(&self, pts: &[[f64; 3]]) -> f64 {
        let p = pts.len();
        if p == 0 {
            return 1.0;
        }
        if p > self.n {
            return 0.0;
        }
        let m = DMatrix::from_fn(p, p, |i, j| self.gamma(&sub(&pts[i], &pts[j])));
        m.determinant().re
    }

    /// `rho^2 - |gamma(x1 - x2)|^2`, evaluated without cancellation at short range.
    pub fn rho2(&self, x1: &[f64; 3], x2: &[f64; 3]) -> f64 {
        let x = sub(x1, x2);
        let rho = self.rho();
        if self.symmetric {
            let dm = self.rho_minus_gamma(&x);
            dm * (2.0 * rho - dm)
        } else {
            let g = self.gamma(&x).norm();
            (rho - g) * (rho + g)
        }
    }
}

pub fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Degree-7 Lebedev rule on 26 points: axes, face diagonals, body diagonals.
pub fn lebedev26() -> Vec<([f64; 3], f64)> {
    let mut out = Vec::new();
    for a in 0..3 {
        for s in [1.0, -1.0] {
            let mut v = [0.0; 3];
            v[a] = s;
            out.push((v, 1.0 / 21.0));
        }
    }
    let c = 1.0 / 2f64.sqrt();
    for zero in 0..3 {
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                let mut v = [0.0; 3];
                let idx: Vec<usize> = (0..3).filter(|k| *k != zero).collect();
                v[idx[0]] = s1 * c;
                v[idx[1]] = s2 * c;
                out.push((v, 4.0 / 105.0));
            }
        }
    }
    let c = 1.0 / 3f64.sqrt();
    for m in 0..8 {
        out.push(([0, 1, 2].map(|k| if m >> k & 1 == 1 { -c } else { c }), 9.0 / 280.0));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho2Fit {
    pub c2: f64,
    pub c4: f64,
    pub c2_ref: f64,
    pub c4_ref: f64,
    pub c2_dev: f64,
    pub c4_dev: f64,
    /// Largest relative deviation of a single direction's `c2` from the average.
    pub spread: f64,
}

pub const FIT_SPREAD_TOL: f64 = 0.05;

/// Fits `rho2 = c2 r^2 (1 - c4 r^2)` on `r in [0.01, 0.1] rho^{-1/3}`.
pub fn rho2_small_separation_fit(kernel: &OneBodyKernel) -> Result<Rho2Fit> {
    if kernel.d != 3 {
        return Err(Error::Precondition("the quartic fit is three-dimensional".into()));
    }
    if kernel.n < 1000 {
        return Err(Error::Precondition(format!("fit needs N >= 1000, got {}", kernel.n)));
    }
    let rho = kernel.rho();
    let len = rho.powf(-1.0 / 3.0);
    let radii: Vec<f64> = (0..8).map(|i| len * (0.01 + 0.09 * i as f64 / 7.0)).collect();
    let origin = [0.0; 3];
    let mut per_dir = Vec::new();
    for (e, w) in lebedev26() {
        let xs: Vec<f64> = radii.iter().map(|r| r * r).collect();
        let ys: Vec<f64> = radii.iter().map(|r| kernel.rho2(&origin, &e.map(|c| c * r)) / (r * r)).collect();
        let (a, b) = linear_fit(&xs, &ys);
        per_dir.push((a, b, w));
    }
    let a: f64 = per_dir.iter().map(|(a, _, w)| a * w).sum();
    let b: f64 = per_dir.iter().map(|(_, b, w)| b * w).sum();
    let spread = per_dir.iter().map(|(x, _, _)| ((x - a) / a).abs()).fold(0.0, f64::max);
    if spread > FIT_SPREAD_TOL {
        return Err(Error::FitIllConditioned(spread));
    }
    let c2 = a;
    let c4 = -b / a;
    let kf2 = (6.0 * PI * PI * rho).powf(2.0 / 3.0);
    let c2_ref = kf2 * rho * rho / 5.0;
    let c4_ref = 3.0 * kf2 / 35.0;
    Ok(Rho2Fit { c2, c4, c2_ref, c4_ref, c2_dev: c2 / c2_ref - 1.0, c4_dev: c4 / c4_ref - 1.0, spread })
}

/// Intercept and slope of the least-squares line through `(x, y)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Angular-averaged Taylor coefficients of `rho2` for the finite set:
/// `rho2 ~ c2 r^2 - c2c4 r^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetCoefficients {
    pub c2: f64,
    pub c2c4: f64,
}

pub fn set_coefficients(ms: &MomentumSet) -> SetCoefficients {
    let n = ms.n() as f64;
    let (mut s2, mut s4) = (0.0, 0.0);
    let mut t = [[0.0; 3]; 3];
    for i in 0..ms.n() {
        let k = ms.momentum(i);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        s2 += k2;
        s4 += k2 * k2;
        for a in 0..3 {
            for b in 0..3 {
                t[a][b] += k[a] * k[b];
            }
        }
    }
    let tt: f64 = t.iter().flatten().map(|x| x * x).sum();
    let v2 = ms.l.powi(2 * ms.d as i32);
    let d = ms.d as f64;
    SetCoefficients { c2: n * s2 / (d * v2), c2c4: (2.0 * n * s4 + 2.0 * s2 * s2 + 4.0 * tt) / (8.0 * d * (d + 2.0) * v2) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho3Check {
    pub max_ratio: f64,
    pub samples: usize,
    pub max_abs_over_rho3: f64,
    pub min_value: f64,
}

/// Samples triples with pairwise separations in `[0.05, 0.3] rho^{-1/3}` and
/// reports `max rho3 / (rho^{13/3} |x12|^2 |x13|^2)`.
pub fn rho3_quartic_bound_check(kernel: &OneBodyKernel, samples: usize, seed: u64) -> Result<Rho3Check> {
    if kernel.d != 3 {
        return Err(Error::Precondition("the triple bound is three-dimensional".into()));
    }
    let rho = kernel.rho();
    let len = rho.powf(-1.0 / 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = |rng: &mut ChaCha8Rng| -> [f64; 3] {
        loop {
            let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let n2: f64 = v.iter().map(|c| c * c).sum();
            if n2 > 1e-4 && n2 <= 1.0 {
                return v.map(|c| c / n2.sqrt());
            }
        }
    };
    let mut out = Rho3Check { max_ratio: 0.0, samples, max_abs_over_rho3: 0.0, min_value: f64::INFINITY };
    for _ in 0..samples {
        let x1 = [0, 1, 2].map(|_| rng.gen_range(0.0..kernel.l));
        let e2 = unit(&mut rng);
        let e3 = unit(&mut rng);
        let r2 = len * rng.gen_range(0.05..0.3);
        let r3 = len * rng.gen_range(0.05..0.3);
        let x2 = [0, 1, 2].map(|k| x1[k] + r2 * e2[k]);
        let x3 = [0, 1, 2].map(|k| x1[k] + r3 * e3[k]);
        let v = kernel.rho_p(&[x1, x2, x3]);
        out.max_ratio = out.max_ratio.max(v / (rho.powf(13.0 / 3.0) * r2 * r2 * r3 * r3));
        out.max_abs_over_rho3 = out.max_abs_over_rho3.max(v.abs() / rho.powi(3));
        out.min_value = out.min_value.min(v);
    }
    Ok(out)
}

/// Uniform `M^d` grid on `[0, L)^d` with quadrature weight `h^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteTorus {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub m: usize,
}

impl DiscreteTorus {
    pub fn new(d: usize, l: f64, m: usize) -> Result<Self> {
        if !(1..=3).contains(&d) || m < 2 || !(l > 0.0) {
            return Err(Error::Precondition(format!("invalid torus d={d} L={l} M={m}")));
        }
        Ok(DiscreteTorus { d, l, m })
    }

    pub fn h(&self) -> f64 {
        self.l / self.m as f64
    }

    pub fn weight(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    pub fn nodes(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn index(&self, node: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        let mut r = node;
        for k in (0..self.d).rev() {
            out[k] = (r % self.m) as i64;
            r /= self.m;
        }
        out
    }

    pub fn node(&self, node: usize) -> [f64; 3] {
        self.index(node).map(|i| i as f64 * self.h())
    }

    /// Plane waves of `ms` are exactly orthonormal on the grid iff `M` exceeds
    /// the largest index difference.
    pub fn check_alias(&self, ms: &MomentumSet) -> Result<()> {
        let need = 2 * ms.max_index() as usize + 2;
        if self.m < need || (ms.l - self.l).abs() > 1e-12 * self.l || ms.d != self.d {
            return Err(Error::GridAliased { m: self.m, need });
        }
        Ok(())
    }

    /// Minimum-image distance.
    pub fn min_image(&self, x: &[f64; 3]) -> f64 {
        (0..self.d)
            .map(|k| {
                let y = x[k] - self.l * (x[k] / self.l).round();
                y * y
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry of `|G - I|` with `G = sum_grid u_k conj(u_k') h^d`.
    pub fn orthonormality_defect(&self, ms: &MomentumSet) -> f64 {
        let n = ms.n();
        let mut worst: f64 = 0.0;
        let norm = 1.0 / self.l.powi(self.d as i32);
        for a in 0..n {
            for b in 0..n {
                let dk = ms.momentum(a);
                let dk2 = ms.momentum(b);
                let mut s = Complex64::new(0.0, 0.0);
                for node in 0..self.nodes() {
                    let x = self.node(node);
                    let ph: f64 = (0..self.d).map(|k| (dk[k] - dk2[k]) * x[k]).sum();
                    s += Complex64::from_polar(norm, ph);
                }
                s *= self.weight();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Plane-wave table `u_k(x_n) = L^{-d/2} e^{i k x_n}` on grid nodes.
#[derive(Debug, Clone)]
pub struct WaveTable {
    pub n: usize,
    pub values: Vec<Complex64>,
    pub k: Vec<[f64; 3]>,
    pub l: f64,
    pub d: usize,
}

impl WaveTable {
    pub fn new(torus: &DiscreteTorus, ms: &MomentumSet) -> Result<Self> {
        torus.check_alias(ms)?;
        let n = ms.n();
        let amp = torus.l.powf(-(torus.d as f64) / 2.0);
        let k: Vec<[f64; 3]> = (0..n).map(|i| ms.momentum(i)).collect();
        let mut values = Vec::with_capacity(torus.nodes() * n);
        for node in 0..torus.nodes() {
            let x = torus.node(node);
            for kk in &k {
                let ph: f64 = (0..torus.d).map(|a| kk[a] * x[a]).sum();
                values.push(Complex64::from_polar(amp, ph));
            }
        }
        Ok(WaveTable { n, values, k, l: torus.l, d: torus.d })
    }

    pub fn u(&self, node: usize, k: usize) -> Complex64 {
        self.values[node * self.n + k]
    }

    /// Plane wave at an off-grid point.
    pub fn u_at(&self, x: &[f64; 3], k: usize) -> Complex64 {
        let amp = self.l.powf(-(self.d as f64) / 2.0);
        let ph: f64 = (0..self.d).map(|a| self.k[k][a] * x[a]).sum();
        Complex64::from_polar(amp, ph)
    }
}

/// A particle position: a grid node or an arbitrary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Node(usize),
    Point([f64; 3]),
}

/// `|det[u_k(x_i)]|^2` for exactly `N` sites.
pub fn slater_abs2(w: &WaveTable, sites: &[Site]) -> f64 {
    let n = w.n;
    let m = DMatrix::from_fn(n, n, |i, k| match sites[i] {
        Site::Node(node) => w.u(node, k),
        Site::Point(x) => w.u_at(&x, k),
    });
    m.determinant().norm_sqr()
}

/// Iterates over all `count`-tuples of grid nodes.
pub fn for_each_tuple<F: FnMut(&[usize])>(nodes: usize, count: usize, mut f: F) {
    let mut idx = vec![0usize; count];
    if count == 0 {
        f(&idx);
        return;
    }
    loop {
        f(&idx);
        let mut pos = count;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < nodes {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Direct marginal `N!/(N-p)! int |D_N|^2 / N!` over the remaining `N - p`
/// coordinates as a grid sum.
pub fn rho_p_marginal(torus: &DiscreteTorus, w: &WaveTable, fixed: &[[f64; 3]]) -> Result<f64> {
    let n = w.n;
    let p = fixed.len();
    if p > n {
        return Ok(0.0);
    }
    let rest = n - p;
    let terms = (torus.nodes() as f64).powi(rest as i32);
    if terms > 1e9 {
        return Err(Error::BudgetExceeded { needed: terms, budget: 1e9 });
    }
    let mut sites: Vec<Site> = fixed.iter().map(|x| Site::Point(*x)).collect();
    sites.resize(n, Site::Node(0));
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for_each_tuple(torus.nodes(), rest, |t| {
        for (i, &node) in t.iter().enumerate() {
            sites[p + i] = Site::Node(node);
        }
        let v = slater_abs2(w, &sites);
        let s = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - s) + v } else { (v - s) + sum };
        sum = s;
    });
    let sum = sum + comp;
    let fact: f64 = (1..=rest).map(|k| k as f64).product();
    Ok(sum * torus.weight().powi(rest as i32) / fact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermi_surface::{enumerate_momenta, Region};

    fn ball(d: usize, r: i64, l: f64) -> MomentumSet {
        enumerate_momenta(&Region::Ball { d }, r, 1, l).unwrap()
    }

    #[test]
    fn lebedev_weights() {
        let rule = lebedev26();
        assert_eq!(rule.len(), 26);
        assert!((rule.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-15);
        // <x^4> = 1/5, <x^2 y^2> = 1/15, <x^6> = 1/7
        let avg = |f: &dyn Fn(&[f64; 3]) -> f64| rule.iter().map(|(v, w)| w * f(v)).sum::<f64>();
        assert!((avg(&|v| v[0].powi(4)) - 0.2).abs() < 1e-15);
        assert!((avg(&|v| v[0].powi(2) * v[1].powi(2)) - 1.0 / 15.0).abs() < 1e-15);
        assert!((avg(&|v| v[0].powi(6)) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn one_point_density_and_coincidence() {
        let ms = ball(3, 3, 2.0);
        let k = OneBodyKernel::new(&ms);
        assert!(k.symmetric);
        let x = [0.3, 0.1, 1.7];
        assert!((k.rho_p(&[x]) - k.rho()).abs() < 1e-12 * k.rho());
        assert!(k.rho_p(&[x, x]).abs() < 1e-12 * k.rho().powi(2));
    }

    #[test]
    fn wick_two_point_identity() {
        let ms = ball(3, 4, 3.0);
        let k = OneBodyKernel::new(&ms);
        let mut r = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = [0, 1, 2].map(|_| r.gen_range(0.0..3.0));
            let b = [0, 1, 2].map(|_| r.gen_range(0.0..3.0));
            let g = k.gamma_re(&sub(&a, &b));
            let direct = k.rho_p(&[a, b]);
            assert!((direct - (k.rho().powi(2) - g * g)).abs() < 1e-12 * k.rho().powi(2));
            assert!((k.rho2(&a, &b) - direct).abs() < 1e-12 * k.rho().powi(2));
        }
    }

    #[test]
    fn derivatives_match_series() {
        let ms = ball(2, 3, 1.5);
        let k = OneBodyKernel::new(&ms);
        let x = [0.2, -0.4, 0.0];
        let h = 1e-5;
        let g = k.grad(&x);
        let hs = k.hessian(&x);
        for a in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let fd = (k.gamma_re(&xp) - k.gamma_re(&xm)) / (2.0 * h);
            assert!((g[a].re - fd).abs() < 1e-6 * k.rho());
            let fd2 = (k.gamma_re(&xp) - 2.0 * k.gamma_re(&x) + k.gamma_re(&xm)) / (h * h);
            assert!((hs[a][a].re - fd2).abs() < 1e-3 * k.rho());
        }
    }

    #[test]
    fn too_many_points_gives_zero() {
        let ms = MomentumSet::from_indices(1, 1.0, vec![[-1, 0, 0], [1, 0, 0]]).unwrap();
        let k = OneBodyKernel::new(&ms);
        assert_eq!(k.rho_p(&[[0.1; 3], [0.2; 3], [0.3; 3]]), 0.0);
    }

    #[test]
    fn grid_orthonormality() {
        let ms = ball(1, 2, 1.0);
        let t = DiscreteTorus::new(1, 1.0, 6).unwrap();
        assert!(t.orthonormality_defect(&ms) < 1e-13);
        assert!(DiscreteTorus::new(1, 1.0, 5).unwrap().check_alias(&ms).is_err());
    }

    #[test]
    fn determinant_matches_marginal_in_one_dimension() {
        let ms = ball(1, 1, 1.0); // N = 3
        let t = DiscreteTorus::new(1, 1.0, 16).unwrap();
        let w = WaveTable::new(&t, &ms).unwrap();
        let k = OneBodyKernel::new(&ms);
        let pts = [[0.13, 0.0, 0.0], [0.71, 0.0, 0.0], [0.4, 0.0, 0.0]];
        for p in 0..=3 {
            let a = k.rho_p(&pts[..p]);
            let b = rho_p_marginal(&t, &w, &pts[..p]).unwrap();
            assert!((a - b).abs() < 1e-12 * k.rho().powi(p as i32).max(1.0), "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn set_coefficients_match_direct_taylor() {
        let ms = ball(3, 6, 1.0);
        let k = OneBodyKernel::new(&ms);
        let c = set_coefficients(&ms);
        // Lebedev average of rho2 / r^2 at tiny r approaches c2
        let r = 1e-3 / k.rho().cbrt();
        let avg: f64 = lebedev26().iter().map(|(e, w)| w * k.rho2(&[0.0; 3], &e.map(|x| x * r)) / (r * r)).sum();
        assert!((avg / c.c2 - 1.0).abs() < 1e-5);
        let quart = (c.c2 - avg) / (r * r);
        assert!((quart / c.c2c4 - 1.0).abs() < 1e-2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn determinant_bounds(xs in proptest::collection::vec(proptest::array::uniform3(0.0f64..2.0), 1..5)) {
                let ms = enumerate_momenta(&Region::Ball { d: 3 }, 2, 1, 2.0).unwrap();
                let k = OneBodyKernel::new(&ms);
                let v = k.rho_p(&xs);
                let bound = k.rho().powi(xs.len() as i32);
                prop_assert!(v >= -1e-12 * bound);
                prop_assert!(v <= bound * (1.0 + 1e-12));
                let mut rev = xs.clone();
                rev.reverse();
                prop_assert!((k.rho_p(&rev) - v).abs() <= 1e-12 * bound);
            }
        }
    }
}
