//! Exact convex hulls of integer point sets in the plane and in space.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest admissible coordinate magnitude; keeps every predicate inside `i128`.
pub const COORD_LIMIT: i64 = 1 << 16;

type V3 = [i128; 3];

fn sub(a: &[i64; 3], b: &[i64; 3]) -> V3 {
    [(a[0] - b[0]) as i128, (a[1] - b[1]) as i128, (a[2] - b[2]) as i128]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot(a: V3, b: V3) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Positive when `d` lies on the side of triangle `abc` its normal points to.
pub fn orient(a: &[i64; 3], b: &[i64; 3], c: &[i64; 3], d: &[i64; 3]) -> i128 {
    dot(cross(sub(b, a), sub(c, a)), sub(d, a))
}

pub fn face_normal(p: &[[i64; 3]], f: &[usize; 3]) -> V3 {
    cross(sub(&p[f[1]], &p[f[0]]), sub(&p[f[2]], &p[f[0]]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hull3 {
    /// Outward-oriented triangles.
    pub faces: Vec<[usize; 3]>,
    /// `extreme[i]` is true iff point `i` is not in the hull of the others.
    pub extreme: Vec<bool>,
}

fn check_input<const D: usize>(points: &[[i64; D]]) -> Result<()> {
    if points.iter().flatten().any(|c| c.abs() > COORD_LIMIT) {
        return Err(Error::GeometryInvalid(format!("hull coordinates exceed {COORD_LIMIT}")));
    }
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| points[i].cmp(&points[j]));
    for w in idx.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::DegenerateHull(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    Ok(())
}

/// Incremental hull with exact integer predicates.
pub fn hull3(p: &[[i64; 3]]) -> Result<Hull3> {
    check_input(p)?;
    let n = p.len();
    let i1 = 1;
    if n < 4 {
        return Err(Error::GeometryInvalid("need at least four points".into()));
    }
    let i2 = (2..n)
        .find(|&i| cross(sub(&p[i1], &p[0]), sub(&p[i], &p[0])) != [0, 0, 0])
        .ok_or_else(|| Error::GeometryInvalid("points are collinear".into()))?;
    let i3 =
        (2..n).find(|&i| orient(&p[0], &p[i1], &p[i2], &p[i]) != 0).ok_or_else(|| Error::GeometryInvalid("points are coplanar".into()))?;
    let tet = [0, i1, i2, i3];
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for skip in 0..4 {
        let mut f: Vec<usize> = tet.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, v)| *v).collect();
        if orient(&p[f[0]], &p[f[1]], &p[f[2]], &p[tet[skip]]) > 0 {
            f.swap(1, 2);
        }
        faces.push([f[0], f[1], f[2]]);
    }
    let mut alive = vec![true; 4];
    for (i, pt) in p.iter().enumerate() {
        if tet.contains(&i) {
            continue;
        }
        let visible: Vec<usize> =
            (0..faces.len()).filter(|&f| alive[f] && orient(&p[faces[f][0]], &p[faces[f][1]], &p[faces[f][2]], pt) > 0).collect();
        if visible.is_empty() {
            continue;
        }
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, tri) in faces.iter().enumerate() {
            if alive[f] {
                for e in 0..3 {
                    owner.insert((tri[e], tri[(e + 1) % 3]), f);
                }
            }
        }
        let mut is_vis = vec![false; faces.len()];
        for &f in &visible {
            is_vis[f] = true;
        }
        let mut new_faces = Vec::new();
        for &f in &visible {
            let tri = faces[f];
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let across = owner[&(b, a)];
                if !is_vis[across] {
                    new_faces.push([a, b, i]);
                }
            }
            alive[f] = false;
        }
        for nf in new_faces {
            faces.push(nf);
            alive.push(true);
        }
    }
    let faces: Vec<[usize; 3]> = faces.into_iter().zip(alive).filter(|(_, a)| *a).map(|(f, _)| f).collect();
    let mut normals: Vec<Vec<V3>> = vec![Vec::new(); n];
    for f in &faces {
        let nrm = face_normal(p, f);
        for &v in f {
            normals[v].push(nrm);
        }
    }
    let extreme = normals.iter().map(|ns| full_rank(ns)).collect();
    Ok(Hull3 { faces, extreme })
}

fn full_rank(ns: &[V3]) -> bool {
    for i in 0..ns.len() {
        for j in i + 1..ns.len() {
            let c = cross(ns[i], ns[j]);
            if c != [0, 0, 0] && ns.iter().any(|m| dot(c, *m) != 0) {
                return true;
            }
        }
    }
    false
}

/// Six times the enclosed volume, summed as signed tetrahedra on the origin.
pub fn volume6_origin(p: &[[i64; 3]], faces: &[[usize; 3]]) -> i128 {
    let o = [0i64; 3];
    faces.iter().map(|f| orient(&o, &p[f[0]], &p[f[1]], &p[f[2]])).sum::<i128>()
}

/// Six times the volume from tetrahedra on the vertex centroid, scaled by
/// `m^3` with `m` the vertex count so everything stays integral.
pub fn volume6_centroid(p: &[[i64; 3]], faces: &[[usize; 3]]) -> i128 {
    let mut verts: Vec<usize> = faces.iter().flatten().copied().collect();
    verts.sort_unstable();
    verts.dedup();
    let m = verts.len() as i128;
    let mut sum = [0i128; 3];
    for &v in &verts {
        for k in 0..3 {
            sum[k] += p[v][k] as i128;
        }
    }
    let lift = |v: usize| -> V3 { [m * p[v][0] as i128 - sum[0], m * p[v][1] as i128 - sum[1], m * p[v][2] as i128 - sum[2]] };
    let total: i128 = faces.iter().map(|f| dot(cross(lift(f[0]), lift(f[1])), lift(f[2]))).sum();
    total / (m * m * m)
}

/// Counter-clockwise strictly convex hull (collinear points dropped).
pub fn hull2(p: &[[i64; 2]]) -> Result<Vec<usize>> {
    check_input(p)?;
    if p.len() < 3 {
        return Err(Error::GeometryInvalid("need at least three points".into()));
    }
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&i, &j| p[i].cmp(&p[j]));
    let turn = |o: usize, a: usize, b: usize| -> i128 {
        let (ox, oy) = (p[o][0] as i128, p[o][1] as i128);
        (p[a][0] as i128 - ox) * (p[b][1] as i128 - oy) - (p[a][1] as i128 - oy) * (p[b][0] as i128 - ox)
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::GeometryInvalid("points are collinear".into()));
    }
    Ok(lower)
}

/// Twice the polygon area (shoelace), positive for counter-clockwise order.
pub fn area2(p: &[[i64; 2]], cycle: &[usize]) -> i128 {
    (0..cycle.len())
        .map(|i| {
            let a = p[cycle[i]];
            let b = p[cycle[(i + 1) % cycle.len()]];
            a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
        })
        .sum()
}
