//! Lebesgue constants of lattice index sets and one-dimensional power kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermi_surface::{enumerate_momenta, FermiPolyhedron, Region};
use crate::quad;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d: usize,
    /// Integer index set; components beyond `d` are ignored.
    pub points: Vec<[i64; 3]>,
    /// Monomial exponents of the weight `t(q) = q1^e1 q2^e2 q3^e3`.
    pub weights: [u32; 3],
    /// Grid size per axis; `None` picks the default.
    pub m: Option<usize>,
    pub tol: f64,
}

impl KernelSpec {
    pub fn new(d: usize, points: Vec<[i64; 3]>) -> Self {
        KernelSpec { d, points, weights: [0; 3], m: None, tol: 1e-6 }
    }

    pub fn with_weights(mut self, w: [u32; 3]) -> Self {
        self.weights = w;
        self
    }

    pub fn alias_bound(&self) -> usize {
        let mx = self.points.iter().flat_map(|p| p[..self.d].iter()).map(|x| x.unsigned_abs()).max().unwrap_or(0);
        2 * mx as usize + 2
    }

    fn weight(&self, q: &[i64; 3]) -> f64 {
        (0..self.d).map(|k| (q[k] as f64).powi(self.weights[k] as i32)).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelL1 {
    pub value: f64,
    /// `|value(M) - value(2M)|`.
    pub error_estimate: f64,
    /// Finest grid used.
    pub m: usize,
}

/// Mean of `|sum_q t(q) e^{i q (u + delta)}|` over the `M^d` grid `u = 2 pi n / M`.
fn grid_mean(spec: &KernelSpec, m: usize, shift: [f64; 3], planner: &mut FftPlanner<f64>) -> f64 {
    let d = spec.d;
    let total = m.pow(d as u32);
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    for q in &spec.points {
        let mut idx = 0;
        let mut phase = 0.0;
        for k in 0..d {
            idx = idx * m + q[k].rem_euclid(m as i64) as usize;
            phase += q[k] as f64 * shift[k];
        }
        buf[idx] += Complex64::from_polar(spec.weight(q), phase);
    }
    let fft = planner.plan_fft_inverse(m);
    // axis k has stride m^(d-1-k)
    let mut lane = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        if stride == 1 {
            for chunk in buf.chunks_mut(m) {
                fft.process(chunk);
            }
            continue;
        }
        let block = stride * m;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                for i in 0..m {
                    lane[i] = buf[base + off + i * stride];
                }
                fft.process(&mut lane);
                for i in 0..m {
                    buf[base + off + i * stride] = lane[i];
                }
            }
        }
    }
    buf.iter().map(|z| z.norm()).sum::<f64>() / total as f64
}

/// `(2 pi)^{-d} int_{[0, 2 pi]^d} |sum_q t(q) e^{iqu}| du` with one grid
/// refinement; the refined grid is evaluated as `2^d` half-step cosets.
pub fn kernel_l1(spec: &KernelSpec) -> Result<KernelL1> {
    if !(1..=3).contains(&spec.d) {
        return Err(Error::Precondition(format!("dimension {} not in 1..=3", spec.d)));
    }
    if spec.points.is_empty() {
        return Err(Error::EmptySet);
    }
    let need = spec.alias_bound();
    let m = match spec.m {
        Some(m) if m < need => return Err(Error::GridAliased { m, need }),
        Some(m) => m,
        None => (2 * need).next_power_of_two(),
    };
    let mut planner = FftPlanner::new();
    let coarse = grid_mean(spec, m, [0.0; 3], &mut planner);
    let refine = |m: usize, coarse: f64, planner: &mut FftPlanner<f64>| -> f64 {
        let h = PI / m as f64;
        let cosets = 1usize << spec.d;
        let mut acc = coarse;
        for c in 1..cosets {
            let shift = [0, 1, 2].map(|k| if c >> k & 1 == 1 { h } else { 0.0 });
            acc += grid_mean(spec, m, shift, planner);
        }
        acc / cosets as f64
    };
    let fine = refine(m, coarse, &mut planner);
    let mut out = KernelL1 { value: fine, error_estimate: (fine - coarse).abs(), m: 2 * m };
    if spec.d == 1 {
        // cheap enough to keep doubling until the requested tolerance
        let mut mm = 2 * m;
        while out.error_estimate > spec.tol * out.value && mm < (1 << 22) {
            let next = refine(mm, out.value, &mut planner);
            out = KernelL1 { value: next, error_estimate: (next - out.value).abs(), m: 2 * mm };
            mm *= 2;
        }
    }
    Ok(out)
}

fn power_sum_direct(m: usize, p: u32, x: f64) -> Complex64 {
    (0..=m).map(|k| Complex64::from_polar((k as f64).powi(p as i32), k as f64 * x)).sum()
}

/// `sum_{k=0}^M k^p z^k` for `z = e^{ix}`, from the geometric-series closed forms.
pub fn power_sum(m: usize, p: u32, x: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, x);
    let one = Complex64::new(1.0, 0.0);
    let w = one - z;
    if w.norm() < 0.1 {
        return power_sum_direct(m, p, x);
    }
    let mf = m as f64;
    let zm = Complex64::from_polar(1.0, mf * x);
    let zm1 = zm * z;
    match p {
        0 => (one - zm1) / w,
        1 => z * (one - (mf + 1.0) * zm + mf * zm1) / (w * w),
        _ => {
            let zm2 = zm1 * z;
            z * (one + z - (mf + 1.0).powi(2) * zm + (2.0 * mf * mf + 2.0 * mf - 1.0) * zm1 - mf * mf * zm2) / (w * w * w)
        }
    }
}

/// `int_0^{2 pi} |sum_{k=0}^M k^p e^{ikx}| dx`.
pub fn one_d_power_kernel_l1(m: usize, p: u32) -> Result<f64> {
    if m < 1 {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    if p > 2 {
        return Err(Error::UnsupportedMoment(p as i32));
    }
    let pieces = 4 * (m + 1);
    let breaks: Vec<f64> = (0..=pieces).map(|i| 2.0 * PI * i as f64 / pieces as f64).collect();
    let scale = (m as f64).powi(p as i32 + 1);
    let (v, _) = quad::integrate_pieces(|x| power_sum(m, p, x).norm(), &breaks, 1e-13 * scale, 1e-11);
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub shape: String,
    #[serde(rename = "R")]
    pub r: i64,
    #[serde(rename = "N")]
    pub n: usize,
    pub s: usize,
    pub weight: String,
    pub value: f64,
    pub bound_ratio: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone)]
pub enum Shape {
    Ball { d: usize },
    Polyhedron(Box<FermiPolyhedron>),
}

/// Reference growth: `R` for balls; `s (log R)^3`, `s R (log R)^3` and
/// `s R^2 (log R)^4` for polyhedra with weights of degree 0, 1 and 2.
pub fn scaling_bound(shape: &Shape, r: f64, degree: u32) -> f64 {
    match shape {
        Shape::Ball { .. } => r.powi(degree as i32 + 1),
        Shape::Polyhedron(p) => {
            let l = r.ln();
            let s = p.s as f64;
            match degree {
                0 => s * l.powi(3),
                1 => s * r * l.powi(3),
                _ => s * r * r * l.powi(4),
            }
        }
    }
}

pub fn scaling_study(shape: &Shape, r_list: &[i64], weights: [u32; 3]) -> Result<Vec<ScalingRow>> {
    let (region, name, s) = match shape {
        Shape::Ball { d } => (Region::Ball { d: *d }, "ball".to_string(), 0),
        Shape::Polyhedron(p) => (Region::Polyhedron(p.clone()), "polyhedron".to_string(), p.s),
    };
    let degree: u32 = weights.iter().sum();
    let mut rows = Vec::new();
    for &r in r_list {
        let ms = enumerate_momenta(&region, r, 1, 2.0 * PI)?;
        let spec = KernelSpec::new(ms.d, ms.points.clone()).with_weights(weights);
        let k = kernel_l1(&spec)?;
        rows.push(ScalingRow {
            shape: name.clone(),
            r,
            n: ms.n(),
            s,
            weight: format!("{}{}{}", weights[0], weights[1], weights[2]),
            value: k.value,
            bound_ratio: k.value / scaling_bound(shape, r as f64, degree),
            error_estimate: k.error_estimate,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
