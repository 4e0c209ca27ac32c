//! Cluster expansion of the Jastrow-Slater state: diagrams, their values on a
//! discrete torus, truncated correlations and brute-force oracles.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermi_surface::MomentumSet;
use crate::scattering::JastrowProfile;
use crate::slater::{for_each_tuple, slater_abs2, DiscreteTorus, OneBodyKernel, Site, WaveTable};

pub const VERTEX_CAP: usize = 7;
pub const PERM_CAP: usize = 8;
pub const DIRECT_P_CAP: usize = 3;
pub const ORACLE_BUDGET: f64 = 1e8;

/// Edges are 0-based pairs `(a, b)` with `a < b`; vertices `0..q` are external.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GGraph {
    pub q: usize,
    pub p: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GGraph {
    pub fn new(q: usize, p: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = q + p;
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.0 == e.1 || e.1 >= n {
                return Err(Error::Precondition(format!("bad edge {e:?} on {n} vertices")));
            }
            if e.1 < q {
                return Err(Error::Precondition(format!("edge {e:?} joins two external vertices")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let g = GGraph { q, p, edges };
        if (q..n).any(|v| g.degree(v) == 0) {
            return Err(Error::Precondition("internal vertex of degree 0".into()));
        }
        Ok(g)
    }

    /// Builds from 1-based edge labels.
    pub fn from_labels(q: usize, p: usize, labels: &[(usize, usize)]) -> Result<Self> {
        if labels.iter().any(|&(a, b)| a == 0 || b == 0) {
            return Err(Error::Precondition("vertex labels start at 1".into()));
        }
        GGraph::new(q, p, labels.iter().map(|&(a, b)| (a - 1, b - 1)).collect())
    }

    pub fn n(&self) -> usize {
        self.q + self.p
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    /// Connected components of the g-graph alone.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        uf.groups()
    }
}

/// All graphs on `q` external and `p` internal vertices with no
/// external-external edge and every internal vertex of degree at least one.
pub fn enumerate_graphs(p: usize, q: usize) -> Result<Vec<GGraph>> {
    if p + q > VERTEX_CAP {
        return Err(Error::CapExceeded(format!("p + q = {} > {VERTEX_CAP}", p + q)));
    }
    if q == 0 && p < 2 {
        return Ok(Vec::new());
    }
    let n = p + q;
    let cand: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|e| e.1 >= q).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << cand.len()) {
        let mut deg = vec![0usize; n];
        let edges: Vec<(usize, usize)> = (0..cand.len()).filter(|i| mask >> i & 1 == 1).map(|i| cand[i]).collect();
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        if deg[q..].iter().all(|&d| d > 0) {
            out.push(GGraph { q, p, edges });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = self.find(v);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(v);
        }
        out
    }
}

/// Sign of a permutation from its cycle decomposition.
pub fn perm_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Result<Vec<Vec<usize>>> {
    if n > PERM_CAP {
        return Err(Error::CapExceeded(format!("{n} vertices > {PERM_CAP}")));
    }
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    Ok(out)
}

fn linked(n: usize, edges: &[(usize, usize)], perm: &[usize]) -> bool {
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    for (j, &pj) in perm.iter().enumerate() {
        uf.union(j, pj);
    }
    (1..n).all(|v| uf.find(v) == uf.find(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagramClass {
    pub k: usize,
    pub nu: usize,
    pub nu_star: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagram {
    pub graph: GGraph,
    pub perm: Vec<usize>,
    pub sign: f64,
    pub class: DiagramClass,
    pub linked: bool,
}

impl Diagram {
    pub fn new(graph: GGraph, perm: Vec<usize>) -> Result<Self> {
        let n = graph.n();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::Precondition(format!("not a permutation of {n} vertices: {perm:?}")));
        }
        let sign = perm_sign(&perm);
        let class = Self::classify(&graph);
        let linked = linked(n, &graph.edges, &perm);
        Ok(Diagram { graph, perm, sign, class, linked })
    }

    fn classify(g: &GGraph) -> DiagramClass {
        let mut k = 0;
        let mut internal_only = 0;
        let mut nu_star = 0;
        for c in g.clusters() {
            if c.iter().any(|&v| v < g.q) {
                nu_star += c.iter().filter(|&&v| v >= g.q).count();
            } else {
                k += 1;
                internal_only += c.len();
            }
        }
        DiagramClass { k, nu: internal_only - 2 * k, nu_star }
    }

    pub fn class_consistent(&self) -> bool {
        self.class == Self::classify(&self.graph) && self.graph.p == 2 * self.class.k + self.class.nu + self.class.nu_star
    }

    /// Linked components as diagrams, together with the original external
    /// labels each one carries.
    pub fn components(&self) -> Vec<(Diagram, Vec<usize>)> {
        let n = self.graph.n();
        let q = self.graph.q;
        let mut uf = UnionFind::new(n);
        for &(a, b) in &self.graph.edges {
            uf.union(a, b);
        }
        for (j, &pj) in self.perm.iter().enumerate() {
            uf.union(j, pj);
        }
        uf.groups()
            .into_iter()
            .map(|verts| {
                let mut map = vec![usize::MAX; n];
                for (i, &v) in verts.iter().enumerate() {
                    map[v] = i;
                }
                let cq = verts.iter().filter(|&&v| v < q).count();
                let edges = self.graph.edges.iter().filter(|e| map[e.0] != usize::MAX).map(|e| (map[e.0], map[e.1])).collect();
                let perm = verts.iter().map(|&v| map[self.perm[v]]).collect();
                let graph = GGraph { q: cq, p: verts.len() - cq, edges };
                let ext = verts.iter().copied().filter(|&v| v < q).collect();
                (Diagram::new(graph, perm).expect("component of a valid diagram"), ext)
            })
            .collect()
    }
}

/// `g = f^2 - 1` sampled on a torus, with its lattice Fourier coefficients.
#[derive(Clone)]
pub struct GProfile {
    pub torus: DiscreteTorus,
    pub scale: f64,
    pub support: f64,
    radial: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    table: Vec<f64>,
    hat: Vec<f64>,
}

impl fmt::Debug for GProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GProfile").field("torus", &self.torus).field("scale", &self.scale).field("support", &self.support).finish()
    }
}

impl GProfile {
    pub fn from_jastrow(torus: DiscreteTorus, jp: &JastrowProfile) -> Result<Self> {
        if jp.d() != torus.d {
            return Err(Error::Precondition("profile and torus dimensions differ".into()));
        }
        let jp = jp.clone();
        Self::from_radial(torus, jp.b, move |r| jp.g(r))
    }

    /// `g(x) = f(|x|)` under the minimum-image metric; `f` must vanish beyond
    /// `support <= L/2`.
    pub fn from_radial(torus: DiscreteTorus, support: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if support > 0.5 * torus.l {
            return Err(Error::Precondition(format!("support {support} exceeds L/2 = {}", 0.5 * torus.l)));
        }
        let mut gp = GProfile { torus, scale: 1.0, support, radial: Arc::new(f), table: Vec::new(), hat: Vec::new() };
        gp.tabulate();
        Ok(gp)
    }

    pub fn zero(torus: DiscreteTorus) -> Self {
        let mut gp = GProfile { torus, scale: 0.0, support: 0.0, radial: Arc::new(|_| 0.0), table: Vec::new(), hat: Vec::new() };
        gp.tabulate();
        gp
    }

    pub fn scaled(&self, eps: f64) -> Self {
        let mut gp = self.clone();
        gp.scale *= eps;
        gp.tabulate();
        gp
    }

    fn tabulate(&mut self) {
        let t = self.torus;
        self.table = (0..t.nodes()).map(|n| self.g(&t.node(n))).collect();
        let m = t.m as f64;
        self.hat = (0..t.nodes())
            .map(|k| {
                let kk = t.index(k);
                let s: f64 = (0..t.nodes())
                    .map(|n| {
                        let x = t.index(n);
                        let ph: f64 = (0..t.d).map(|a| (kk[a] * x[a]) as f64).sum::<f64>() * 2.0 * PI / m;
                        self.table[n] * ph.cos()
                    })
                    .sum();
                s * t.weight()
            })
            .collect();
    }

    pub fn g(&self, x: &[f64; 3]) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        self.scale * (self.radial)(self.torus.min_image(x))
    }

    pub fn at_offset(&self, node: usize) -> f64 {
        self.table[node]
    }

    /// `g-hat(m) = h^d sum_n g(x_n) e^{-2 pi i m.n / M}` for an integer vector `m`.
    pub fn hat(&self, m: &[i64; 3]) -> f64 {
        self.hat[encode(&self.torus, m)]
    }

    pub fn hat_table(&self) -> &[f64] {
        &self.hat
    }

    pub fn integral(&self) -> f64 {
        self.hat[0]
    }

    /// `h^d sum |g(x_n)| |x_n|^n` over the grid.
    pub fn abs_moment(&self, n: i32) -> f64 {
        let t = self.torus;
        (0..t.nodes()).map(|k| self.table[k].abs() * t.min_image(&t.node(k)).powi(n)).sum::<f64>() * t.weight()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.table.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

fn encode(t: &DiscreteTorus, v: &[i64; 3]) -> usize {
    let m = t.m as i64;
    (0..t.d).fold(0usize, |acc, a| acc * t.m + v[a].rem_euclid(m) as usize)
}

/// Everything needed to evaluate diagrams for one momentum set on one grid.
#[derive(Debug, Clone)]
pub struct GgrSystem {
    pub torus: DiscreteTorus,
    pub kernel: OneBodyKernel,
    pub gp: GProfile,
    pub wave: WaveTable,
    kidx: Vec<[i64; 3]>,
    gamma_tab: Vec<Complex64>,
}

impl GgrSystem {
    pub fn new(ms: &MomentumSet, torus: DiscreteTorus, gp: GProfile) -> Result<Self> {
        if gp.torus != torus {
            return Err(Error::Precondition("g profile lives on a different torus".into()));
        }
        let wave = WaveTable::new(&torus, ms)?;
        let kernel = OneBodyKernel::new(ms);
        let gamma_tab = (0..torus.nodes()).map(|n| kernel.gamma(&torus.node(n))).collect();
        Ok(GgrSystem { torus, kernel, gp, wave, kidx: ms.points.clone(), gamma_tab })
    }

    pub fn with_profile(&self, gp: GProfile) -> Self {
        GgrSystem { gp, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.kernel.n
    }

    fn pos(&self, s: Site) -> [f64; 3] {
        match s {
            Site::Node(n) => self.torus.node(n),
            Site::Point(x) => x,
        }
    }

    fn offset(&self, a: usize, b: usize) -> usize {
        let (ia, ib) = (self.torus.index(a), self.torus.index(b));
        encode(&self.torus, &[ia[0] - ib[0], ia[1] - ib[1], ia[2] - ib[2]])
    }

    /// `gamma(x_a - x_b)`.
    pub fn gamma(&self, a: Site, b: Site) -> Complex64 {
        match (a, b) {
            (Site::Node(i), Site::Node(j)) => self.gamma_tab[self.offset(i, j)],
            _ => {
                let (x, y) = (self.pos(a), self.pos(b));
                self.kernel.gamma(&[x[0] - y[0], x[1] - y[1], x[2] - y[2]])
            }
        }
    }

    pub fn g(&self, a: Site, b: Site) -> f64 {
        match (a, b) {
            (Site::Node(i), Site::Node(j)) => self.gp.at_offset(self.offset(i, j)),
            _ => {
                let (x, y) = (self.pos(a), self.pos(b));
                self.gp.g(&[x[0] - y[0], x[1] - y[1], x[2] - y[2]])
            }
        }
    }

    fn gamma_matrix(&self, sites: &[Site]) -> Vec<Vec<Complex64>> {
        sites.iter().map(|&a| sites.iter().map(|&b| self.gamma(a, b)).collect()).collect()
    }

    /// `rho^(n)` at the given sites as a signed permutation sum.
    pub fn rho_n(&self, sites: &[Site]) -> Result<f64> {
        let perms = permutations(sites.len())?;
        let gm = self.gamma_matrix(sites);
        Ok(perms.iter().map(|p| perm_product(&gm, p) * perm_sign(p)).sum::<Complex64>().re)
    }

    fn internal_budget(&self, p: usize, per_tuple: usize) -> Result<()> {
        let terms = (self.torus.nodes() as f64).powi(p as i32) * per_tuple.max(1) as f64;
        if terms > 4.0 * ORACLE_BUDGET {
            return Err(Error::BudgetExceeded { needed: terms, budget: 4.0 * ORACLE_BUDGET });
        }
        Ok(())
    }

    /// `sum_{(pi, sign)} sign * int prod g prod gamma` over grid nodes for the internal vertices.
    fn direct_sum(&self, graph: &GGraph, perms: &[(Vec<usize>, f64)], ext: &[Site]) -> Result<Complex64> {
        let (q, p) = (graph.q, graph.p);
        if p > DIRECT_P_CAP {
            return Err(Error::CapExceeded(format!("direct mode needs p <= {DIRECT_P_CAP}, got {p}")));
        }
        if ext.len() != q {
            return Err(Error::Precondition(format!("{} external points for q = {q}", ext.len())));
        }
        self.internal_budget(p, perms.len())?;
        let mut sites: Vec<Site> = ext.to_vec();
        sites.resize(q + p, Site::Node(0));
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_tuple(self.torus.nodes(), p, |t| {
            for (i, &node) in t.iter().enumerate() {
                sites[q + i] = Site::Node(node);
            }
            let gprod: f64 = graph.edges.iter().map(|&(a, b)| self.g(sites[a], sites[b])).product();
            if gprod == 0.0 {
                return;
            }
            let gm = self.gamma_matrix(&sites);
            let s: Complex64 = perms.iter().map(|(pi, sg)| perm_product(&gm, pi) * *sg).sum();
            acc += s * gprod;
        });
        Ok(acc * self.torus.weight().powi(p as i32))
    }

    /// Momentum-space evaluation: every `gamma` and `g` expanded in plane waves,
    /// internal integrations become momentum conservation modulo `M`.
    fn fourier_sum(&self, graph: &GGraph, perms: &[(Vec<usize>, f64)], ext: &[usize]) -> Result<Complex64> {
        let (q, p) = (graph.q, graph.p);
        let n = q + p;
        if ext.len() != q {
            return Err(Error::Precondition(format!("{} external nodes for q = {q}", ext.len())));
        }
        let t = &self.torus;
        let d = t.d as i32;
        let ne = graph.edges.len() as i32;
        let norm = t.l.powi(-d * (n as i32 + ne - p as i32));
        let ext_idx: Vec<[i64; 3]> = ext.iter().map(|&e| t.index(e)).collect();
        let nk = self.kidx.len();
        let mut total = Complex64::new(0.0, 0.0);
        for (pi, sg) in perms {
            let mut inv = vec![0usize; n];
            for (j, &pj) in pi.iter().enumerate() {
                inv[pj] = j;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for_each_tuple(nk, n, |ks| {
                let base: Vec<[i64; 3]> = (0..n)
                    .map(|v| {
                        let (a, b) = (self.kidx[ks[v]], self.kidx[ks[inv[v]]]);
                        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
                    })
                    .collect();
                let mut st = EdgeWalk {
                    sys: self,
                    graph,
                    base,
                    remaining: (0..n).map(|v| graph.degree(v)).collect(),
                    assigned: vec![false; graph.edges.len()],
                    ext_idx: &ext_idx,
                };
                acc += st.walk(0);
            });
            total += acc * *sg;
        }
        Ok(total * norm)
    }

    /// Value of one diagram.
    pub fn diagram_value(&self, dg: &Diagram, ext: &[Site], mode: EvalMode) -> Result<Complex64> {
        let perms = [(dg.perm.clone(), dg.sign)];
        match mode {
            EvalMode::Direct => self.direct_sum(&dg.graph, &perms, ext),
            EvalMode::Fourier => self.fourier_sum(&dg.graph, &perms, &nodes_of(ext)?),
        }
    }
}

fn nodes_of(ext: &[Site]) -> Result<Vec<usize>> {
    ext.iter()
        .map(|s| match s {
            Site::Node(n) => Ok(*n),
            Site::Point(_) => Err(Error::Precondition("momentum-space evaluation needs grid-node externals".into())),
        })
        .collect()
}

fn perm_product(gm: &[Vec<Complex64>], perm: &[usize]) -> Complex64 {
    perm.iter().enumerate().map(|(j, &pj)| gm[j][pj]).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Direct,
    Fourier,
}

struct EdgeWalk<'a> {
    sys: &'a GgrSystem,
    graph: &'a GGraph,
    base: Vec<[i64; 3]>,
    remaining: Vec<usize>,
    assigned: Vec<bool>,
    ext_idx: &'a [[i64; 3]],
}

impl EdgeWalk<'_> {
    fn zero_mod(&self, v: &[i64; 3]) -> bool {
        let m = self.sys.torus.m as i64;
        (0..self.sys.torus.d).all(|a| v[a].rem_euclid(m) == 0)
    }

    fn forced(&self, e: usize) -> Option<[i64; 3]> {
        let q = self.graph.q;
        let (a, b) = self.graph.edges[e];
        if a >= q && self.remaining[a] == 1 {
            let k = self.base[a];
            Some([-k[0], -k[1], -k[2]])
        } else if b >= q && self.remaining[b] == 1 {
            Some(self.base[b])
        } else {
            None
        }
    }

    /// Assigns edge momenta, always taking a forced edge first when one exists.
    fn walk(&mut self, done: usize) -> Complex64 {
        let t = &self.sys.torus;
        let q = self.graph.q;
        if done == self.graph.edges.len() {
            let m = t.m as f64;
            let ph: f64 =
                (0..q).map(|v| (0..t.d).map(|a| (self.base[v][a] * self.ext_idx[v][a]) as f64).sum::<f64>()).sum::<f64>() * 2.0 * PI / m;
            return Complex64::from_polar(1.0, ph);
        }
        let open: Vec<usize> = (0..self.graph.edges.len()).filter(|&e| !self.assigned[e]).collect();
        let (e, forced) = open.iter().find_map(|&e| self.forced(e).map(|m| (e, Some(m)))).unwrap_or((open[0], None));
        let (a, b) = self.graph.edges[e];
        let mut acc = Complex64::new(0.0, 0.0);
        let mut try_m = |this: &mut Self, mv: [i64; 3]| {
            let gh = this.sys.gp.hat(&mv);
            if gh == 0.0 {
                return;
            }
            for k in 0..3 {
                this.base[a][k] += mv[k];
                this.base[b][k] -= mv[k];
            }
            this.remaining[a] -= 1;
            this.remaining[b] -= 1;
            this.assigned[e] = true;
            let ok = [a, b].iter().all(|&v| v < q || this.remaining[v] > 0 || this.zero_mod(&this.base[v]));
            if ok {
                acc += this.walk(done + 1) * gh;
            }
            this.assigned[e] = false;
            this.remaining[a] += 1;
            this.remaining[b] += 1;
            for k in 0..3 {
                this.base[a][k] -= mv[k];
                this.base[b][k] += mv[k];
            }
        };
        match forced {
            Some(mv) => try_m(self, mv),
            None => {
                for node in 0..t.nodes() {
                    let mv = t.index(node);
                    try_m(self, mv);
                }
            }
        }
        acc
    }
}

/// Sum of `Gamma` over a list of diagrams sharing one graph, two routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatalogValue {
    pub fourier: Complex64,
    pub direct: Complex64,
    pub diagrams: usize,
}

impl CatalogValue {
    pub fn discrepancy(&self) -> f64 {
        (self.fourier - self.direct).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// Every permutation making the diagram linked.
    Linked,
    /// Exactly two linked components, each holding an external vertex.
    TwoExternalComponents,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub q: usize,
    pub p: usize,
    /// 1-based vertex labels.
    pub edges: &'static [(usize, usize)],
    pub selector: Selector,
    pub one_dimensional: bool,
}

pub fn catalog() -> Vec<CatalogEntry> {
    use Selector::*;
    let e = |id, q, p, edges, selector, one_dimensional| CatalogEntry { id, q, p, edges, selector, one_dimensional };
    vec![
        e("2b-A-k1", 2, 2, &[(3, 4)][..], Linked, false),
        e("2b-B1-k0", 2, 1, &[(1, 3)][..], Linked, false),
        e("2b-B2-k0", 2, 1, &[(2, 3)][..], Linked, false),
        e("2b-C-k0", 2, 1, &[(1, 3), (2, 3)][..], Linked, false),
        e("2b-B1-k1", 2, 3, &[(1, 3), (4, 5)][..], Linked, false),
        e("2b-C-k1", 2, 3, &[(1, 3), (2, 3), (4, 5)][..], Linked, false),
        e("3b-linked-k1", 3, 2, &[(4, 5)][..], Linked, false),
        e("3b-two-comp-k1", 3, 2, &[(4, 5)][..], TwoExternalComponents, false),
        e("1d-A1", 2, 2, &[(1, 3), (1, 4), (3, 4)][..], Linked, true),
        e("1d-A2", 2, 2, &[(1, 3), (2, 4)][..], Linked, true),
        e("1d-B1", 2, 2, &[(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)][..], Linked, true),
        e("1d-B2", 2, 3, &[(1, 3), (2, 3), (4, 5)][..], Linked, true),
    ]
}

fn selected_perms(graph: &GGraph, sel: Selector) -> Result<Vec<(Vec<usize>, f64)>> {
    let n = graph.n();
    Ok(permutations(n)?
        .into_iter()
        .filter(|pi| {
            let dg = Diagram::new(graph.clone(), pi.clone()).expect("valid permutation");
            match sel {
                Selector::Linked => dg.linked,
                Selector::TwoExternalComponents => {
                    let comps = dg.components();
                    comps.len() == 2 && comps.iter().all(|(c, _)| c.graph.q > 0)
                }
            }
        })
        .map(|pi| {
            let s = perm_sign(&pi);
            (pi, s)
        })
        .collect())
}

/// The diagrams a catalog entry sums over.
pub fn catalog_diagrams(id: &str) -> Result<Vec<Diagram>> {
    let entry = catalog().into_iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownId(id.to_string()))?;
    let graph = GGraph::from_labels(entry.q, entry.p, entry.edges)?;
    selected_perms(&graph, entry.selector)?.into_iter().map(|(pi, _)| Diagram::new(graph.clone(), pi)).collect()
}

/// Small-diagram sum by momentum conservation and by direct grid summation.
pub fn small_diagram_catalog(sys: &GgrSystem, id: &str, ext: &[usize]) -> Result<CatalogValue> {
    let entry = catalog().into_iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownId(id.to_string()))?;
    if entry.one_dimensional && sys.torus.d != 1 {
        return Err(Error::Precondition(format!("{id} is a one-dimensional diagram")));
    }
    let graph = GGraph::from_labels(entry.q, entry.p, entry.edges)?;
    let perms = selected_perms(&graph, entry.selector)?;
    let sites: Vec<Site> = ext.iter().map(|&n| Site::Node(n)).collect();
    let direct = sys.direct_sum(&graph, &perms, &sites)?;
    let fourier = sys.fourier_sum(&graph, &perms, ext)?;
    Ok(CatalogValue { fourier, direct, diagrams: perms.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncated {
    /// Linked-permutation sum.
    pub definition: f64,
    /// Imaginary part of the definition sum (zero up to rounding).
    pub definition_im: f64,
    /// Partition-lattice inversion of the reduced densities.
    pub moebius: f64,
    /// `rho^(|A1|+|A2|) - rho^(|A1|) rho^(|A2|)` when there are two clusters.
    pub two_cluster: Option<f64>,
}

/// Truncated correlation of the point groups `clusters` (a partition of `0..n`).
pub fn truncated_correlation(kernel: &OneBodyKernel, clusters: &[Vec<usize>], points: &[[f64; 3]]) -> Result<Truncated> {
    let n = points.len();
    if n > PERM_CAP {
        return Err(Error::CapExceeded(format!("{n} vertices > {PERM_CAP}")));
    }
    let mut seen = vec![false; n];
    for &v in clusters.iter().flatten() {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Precondition("clusters must partition the points".into()));
        }
    }
    if seen.iter().any(|s| !s) || clusters.iter().any(|c| c.is_empty()) {
        return Err(Error::Precondition("clusters must partition the points".into()));
    }
    let edges: Vec<(usize, usize)> = clusters.iter().flat_map(|c| c.windows(2).map(|w| (w[0], w[1]))).collect();
    let gm: Vec<Vec<Complex64>> =
        points.iter().map(|x| points.iter().map(|y| kernel.gamma(&[x[0] - y[0], x[1] - y[1], x[2] - y[2]])).collect()).collect();
    let def: Complex64 = permutations(n)?.iter().filter(|pi| linked(n, &edges, pi)).map(|pi| perm_product(&gm, pi) * perm_sign(pi)).sum();
    let rho_of = |block: &[usize]| -> f64 {
        let pts: Vec<[f64; 3]> = block.iter().flat_map(|&c| clusters[c].iter().map(|&v| points[v])).collect();
        kernel.rho_p(&pts)
    };
    let k = clusters.len();
    let mut moebius = 0.0;
    for part in set_partitions(k) {
        let b = part.len();
        let coef = if b % 2 == 1 { 1.0 } else { -1.0 } * (1..b).map(|i| i as f64).product::<f64>();
        moebius += coef * part.iter().map(|blk| rho_of(blk)).product::<f64>();
    }
    let two_cluster = (k == 2).then(|| rho_of(&[0, 1]) - rho_of(&[0]) * rho_of(&[1]));
    Ok(Truncated { definition: def.re, definition_im: def.im, moebius, two_cluster })
}

/// All set partitions of `0..k` as lists of blocks.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; k];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == labels.len() {
            let mut blocks = vec![Vec::new(); max];
            for (v, &l) in labels.iter().enumerate() {
                blocks[l].push(v);
            }
            out.push(blocks);
            return;
        }
        for l in 0..=max {
            labels[i] = l;
            rec(i + 1, max.max(l + 1), labels, out);
        }
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    rec(0, 0, &mut labels, &mut out);
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Per-tuple data: g on every pair and the signed permutation products.
struct TupleEval {
    perms: Vec<Vec<usize>>,
    signs: Vec<f64>,
}

impl TupleEval {
    fn new(n: usize) -> Result<Self> {
        let perms = permutations(n)?;
        let signs = perms.iter().map(|p| perm_sign(p)).collect();
        Ok(TupleEval { perms, signs })
    }

    fn products(&self, gm: &[Vec<Complex64>]) -> Vec<Complex64> {
        self.perms.iter().zip(&self.signs).map(|(p, s)| perm_product(gm, p) * *s).collect()
    }
}

/// `sum_p (1/p!) int X^q_p(ext, y) rho^(p+q)(ext, y) dy` for `p` up to `N - q`.
fn graph_series(sys: &GgrSystem, ext: &[Site]) -> Result<f64> {
    let q = ext.len();
    let n = sys.n();
    if n > 4 {
        return Err(Error::CapExceeded(format!("N = {n} > 4")));
    }
    let mut total = 0.0;
    for p in 0..=n.saturating_sub(q) {
        let graphs = enumerate_graphs(p, q)?;
        if graphs.is_empty() {
            continue;
        }
        sys.internal_budget(p, 1)?;
        let te = TupleEval::new(p + q)?;
        let mut sites: Vec<Site> = ext.to_vec();
        sites.resize(p + q, Site::Node(0));
        let mut acc = 0.0;
        for_each_tuple(sys.torus.nodes(), p, |t| {
            for (i, &node) in t.iter().enumerate() {
                sites[q + i] = Site::Node(node);
            }
            let gmat: Vec<Vec<f64>> =
                (0..p + q).map(|a| (0..p + q).map(|b| if a == b { 0.0 } else { sys.g(sites[a], sites[b]) }).collect()).collect();
            let w: f64 = graphs.iter().map(|gr| gr.edges.iter().map(|&(a, b)| gmat[a][b]).product::<f64>()).sum();
            if w == 0.0 {
                return;
            }
            let rho: f64 = te.products(&sys.gamma_matrix(&sites)).iter().sum::<Complex64>().re;
            acc += w * rho;
        });
        total += acc * sys.torus.weight().powi(p as i32) / factorial(p);
    }
    Ok(total)
}

/// `C_N / N!` from the finite graph expansion.
pub fn normalization_series(sys: &GgrSystem) -> Result<f64> {
    Ok(1.0 + graph_series(sys, &[])?)
}

/// `rho^(q)_Jas(ext)` from the finite graph expansion.
pub fn jastrow_density_series(sys: &GgrSystem, ext: &[Site]) -> Result<f64> {
    let q = ext.len();
    if q == 0 || q > sys.n() {
        return Err(Error::Precondition(format!("need 1 <= q <= N, got {q}")));
    }
    let c = normalization_series(sys)?;
    let mut pair = 1.0;
    for i in 0..q {
        for j in i + 1..q {
            pair *= 1.0 + sys.g(ext[i], ext[j]);
        }
    }
    Ok(pair * graph_series(sys, ext)? / c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectOracle {
    pub c_over_nfact: f64,
    pub rho_jas: Option<f64>,
}

fn jastrow_weight(sys: &GgrSystem, sites: &[Site]) -> f64 {
    let mut w = 1.0;
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            w *= 1.0 + sys.g(sites[i], sites[j]);
        }
    }
    w
}

/// Brute-force grid sums of the normalization and of `rho^(q)_Jas(ext)`.
pub fn direct_oracle(sys: &GgrSystem, ext: &[Site]) -> Result<DirectOracle> {
    let n = sys.n();
    let q = ext.len();
    if q > n {
        return Err(Error::Precondition(format!("q = {q} > N = {n}")));
    }
    let terms = (sys.torus.nodes() as f64).powi(n as i32);
    if terms > ORACLE_BUDGET {
        return Err(Error::BudgetExceeded { needed: terms, budget: ORACLE_BUDGET });
    }
    let hw = sys.torus.weight();
    let mut sites = vec![Site::Node(0); n];
    let mut c = 0.0;
    for_each_tuple(sys.torus.nodes(), n, |t| {
        for (i, &node) in t.iter().enumerate() {
            sites[i] = Site::Node(node);
        }
        let w = jastrow_weight(sys, &sites);
        if w != 0.0 {
            c += w * slater_abs2(&sys.wave, &sites);
        }
    });
    let c_over_nfact = c * hw.powi(n as i32) / factorial(n);
    let rho_jas = if q == 0 {
        None
    } else {
        sites[..q].copy_from_slice(ext);
        let mut s = 0.0;
        for_each_tuple(sys.torus.nodes(), n - q, |t| {
            for (i, &node) in t.iter().enumerate() {
                sites[q + i] = Site::Node(node);
            }
            let w = jastrow_weight(sys, &sites);
            if w != 0.0 {
                s += w * slater_abs2(&sys.wave, &sites);
            }
        });
        Some(s * hw.powi((n - q) as i32) / (c_over_nfact * factorial(n - q)))
    };
    Ok(DirectOracle { c_over_nfact, rho_jas })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionRow {
    pub p: usize,
    pub diagrams: usize,
    pub term: f64,
    pub partial_sum: f64,
    /// `L^d rho (rho int|g|)^(p-1)`, the shape of the linked-sum bound with unit constants.
    pub bound: f64,
}

/// Linked vacuum sums `(1/p!) sum_linked int Gamma` for `p = 2..=p_max`.
pub fn linked_expansion(sys: &GgrSystem, p_max: usize) -> Result<Vec<ExpansionRow>> {
    if p_max > 4 {
        return Err(Error::CapExceeded(format!("linked expansion needs p <= 4, got {p_max}")));
    }
    let rho = sys.kernel.rho();
    let g1 = sys.gp.abs_moment(0);
    let mut rows = Vec::new();
    let mut partial = 0.0;
    for p in 2..=p_max {
        sys.internal_budget(p, 1)?;
        let graphs = enumerate_graphs(p, 0)?;
        let te = TupleEval::new(p)?;
        let links: Vec<Vec<usize>> =
            graphs.iter().map(|gr| (0..te.perms.len()).filter(|&i| linked(p, &gr.edges, &te.perms[i])).collect()).collect();
        let diagrams = links.iter().map(Vec::len).sum();
        let mut sites = vec![Site::Node(0); p];
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_tuple(sys.torus.nodes(), p, |t| {
            for (i, &node) in t.iter().enumerate() {
                sites[i] = Site::Node(node);
            }
            let gmat: Vec<Vec<f64>> =
                (0..p).map(|a| (0..p).map(|b| if a == b { 0.0 } else { sys.g(sites[a], sites[b]) }).collect()).collect();
            let prods = te.products(&sys.gamma_matrix(&sites));
            for (gr, lk) in graphs.iter().zip(&links) {
                let w: f64 = gr.edges.iter().map(|&(a, b)| gmat[a][b]).product();
                if w != 0.0 {
                    acc += lk.iter().map(|&i| prods[i]).sum::<Complex64>() * w;
                }
            }
        });
        let term = acc.re * sys.torus.weight().powi(p as i32) / factorial(p);
        partial += term;
        let bound = sys.kernel.vol() * rho * (rho * g1).powi(p as i32 - 1);
        rows.push(ExpansionRow { p, diagrams, term, partial_sum: partial, bound });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpResummation {
    pub direct: f64,
    /// `(P, |exp(partial sum up to P) - C_N/N!|)`.
    pub errors: Vec<(usize, f64)>,
    pub rows: Vec<ExpansionRow>,
}

pub fn exp_resummation_check(sys: &GgrSystem, p_max: usize) -> Result<ExpResummation> {
    let direct = direct_oracle(sys, &[])?.c_over_nfact;
    let rows = linked_expansion(sys, p_max)?;
    let errors = rows.iter().map(|r| (r.p, (r.partial_sum.exp() - direct).abs())).collect();
    Ok(ExpResummation { direct, errors, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceParameter {
    pub value: f64,
    pub threshold: f64,
    pub ok: bool,
}

/// Small parameter controlling absolute convergence of the linked sums.
pub fn convergence_parameter(s: f64, a: f64, rho: f64, b: f64, n: f64, d: usize, threshold: f64) -> Result<ConvergenceParameter> {
    if a < 0.0 || !(rho > 0.0) || !(s > 0.0) || !(n >= 1.0) || !(1..=3).contains(&d) {
        return Err(Error::Precondition("convergence parameter needs a >= 0, rho, s > 0, N >= 1, d in 1..=3".into()));
    }
    let value = if a == 0.0 {
        0.0
    } else {
        if !(b > a) {
            return Err(Error::Precondition(format!("need b > a, got b = {b}, a = {a}")));
        }
        let ln = (b / a).ln();
        match d {
            3 => s * a.powi(3) * rho * ln * n.ln().powi(3),
            2 => s * a * a * rho * ln * n.ln().powi(2),
            _ => a * rho * ln * n.ln(),
        }
    };
    Ok(ConvergenceParameter { value, threshold, ok: value < threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeGraphCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    pub connected: usize,
    pub trees: usize,
}

/// Connected-graph sum against the spanning-tree sum of `|g|` on `K_n`.
pub fn tree_graph_check(g: &[Vec<f64>]) -> Result<TreeGraphCheck> {
    let n = g.len();
    if n > 6 {
        return Err(Error::CapExceeded(format!("tree-graph check needs n <= 6, got {n}")));
    }
    if n < 2 {
        return Err(Error::Precondition("need at least two vertices".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let (mut connected, mut trees) = (0, 0);
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        if edges.len() + 1 < n {
            continue;
        }
        let mut uf = UnionFind::new(n);
        for &(a, b) in &edges {
            uf.union(a, b);
        }
        if (1..n).any(|v| uf.find(v) != uf.find(0)) {
            continue;
        }
        connected += 1;
        lhs += edges.iter().map(|&(a, b)| g[a][b]).product::<f64>();
        if edges.len() + 1 == n {
            trees += 1;
            rhs += edges.iter().map(|&(a, b)| g[a][b].abs()).product::<f64>();
        }
    }
    let lhs = lhs.abs();
    Ok(TreeGraphCheck { lhs, rhs, ok: lhs <= rhs * (1.0 + 1e-12) + 1e-300, connected, trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn system_1d(n: i64, m: usize, eps: f64) -> GgrSystem {
        let l = 2.0 * PI;
        let ms = MomentumSet::from_indices(1, l, (0..n).map(|j| [j - n / 2, 0, 0]).collect()).unwrap();
        let torus = DiscreteTorus::new(1, l, m).unwrap();
        let gp = GProfile::from_radial(torus, 1.2, move |x| if x < 1.2 { -eps * (1.0 - x / 1.2) } else { 0.0 }).unwrap();
        GgrSystem::new(&ms, torus, gp).unwrap()
    }

    #[test]
    fn graph_counts() {
        assert!(enumerate_graphs(0, 0).unwrap().is_empty());
        assert!(enumerate_graphs(1, 0).unwrap().is_empty());
        assert_eq!(enumerate_graphs(2, 0).unwrap().len(), 1);
        let g = enumerate_graphs(1, 2).unwrap();
        assert_eq!(g.iter().map(|g| g.edges.clone()).collect::<Vec<_>>(), vec![vec![(0, 2)], vec![(1, 2)], vec![(0, 2), (1, 2)]]);
        // edge covers of K_4 and K_3
        assert_eq!(enumerate_graphs(4, 0).unwrap().len(), 41);
        assert_eq!(enumerate_graphs(3, 0).unwrap().len(), 4);
        assert!(matches!(enumerate_graphs(5, 3), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn class_bookkeeping() {
        for (p, q) in [(2, 2), (3, 2), (4, 1), (3, 3), (5, 0)] {
            for g in enumerate_graphs(p, q).unwrap() {
                let dg = Diagram::new(g, (0..p + q).collect()).unwrap();
                assert!(dg.class_consistent());
            }
        }
    }

    #[test]
    fn signs_and_counts() {
        let ps = permutations(4).unwrap();
        assert_eq!(ps.len(), 24);
        assert_eq!(ps.iter().map(|p| perm_sign(p)).sum::<f64>(), 0.0);
        assert_eq!(perm_sign(&[1, 0, 2]), -1.0);
        assert_eq!(perm_sign(&[1, 2, 0]), 1.0);
        assert_eq!(set_partitions(4).len(), 15);
    }

    #[test]
    fn single_vertex_diagram_is_density() {
        let sys = system_1d(3, 16, 0.5);
        let dg = Diagram::new(GGraph::new(1, 0, vec![]).unwrap(), vec![0]).unwrap();
        let v = sys.diagram_value(&dg, &[Site::Point([0.37, 0.0, 0.0])], EvalMode::Direct).unwrap();
        assert!((v.re - sys.kernel.rho()).abs() < 1e-14 && v.im.abs() < 1e-14);
    }

    #[test]
    fn fourier_matches_direct_per_diagram() {
        let sys = system_1d(3, 16, 0.7);
        let g = GGraph::from_labels(2, 2, &[(1, 3), (3, 4), (2, 4)]).unwrap();
        for pi in permutations(4).unwrap().into_iter().step_by(5) {
            let dg = Diagram::new(g.clone(), pi).unwrap();
            let ext = [Site::Node(3), Site::Node(11)];
            let a = sys.diagram_value(&dg, &ext, EvalMode::Direct).unwrap();
            let b = sys.diagram_value(&dg, &ext, EvalMode::Fourier).unwrap();
            assert!((a - b).norm() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn zero_g_gives_unit_normalization() {
        let sys = system_1d(3, 16, 0.0);
        assert!((normalization_series(&sys).unwrap() - 1.0).abs() < 1e-15);
        let o = direct_oracle(&sys, &[Site::Node(0), Site::Node(5)]).unwrap();
        let rho2 = sys.rho_n(&[Site::Node(0), Site::Node(5)]).unwrap();
        assert!((o.c_over_nfact - 1.0).abs() < 1e-12);
        assert!((o.rho_jas.unwrap() - rho2).abs() < 1e-12);
    }

    #[test]
    fn two_particle_identity() {
        let sys = system_1d(2, 16, 0.6);
        let ext = [Site::Point([0.3, 0.0, 0.0]), Site::Point([1.1, 0.0, 0.0])];
        let o = direct_oracle(&sys, &ext).unwrap();
        assert!((normalization_series(&sys).unwrap() - o.c_over_nfact).abs() < 1e-12);
        assert!((jastrow_density_series(&sys, &ext).unwrap() - o.rho_jas.unwrap()).abs() < 1e-12);
        let coincident = direct_oracle(&sys, &[Site::Node(4), Site::Node(4)]).unwrap();
        assert!(coincident.rho_jas.unwrap().abs() < 1e-14);
    }

    #[test]
    fn truncated_simple_cases() {
        let sys = system_1d(4, 16, 0.0);
        let pts = [[0.2, 0.0, 0.0], [0.9, 0.0, 0.0]];
        let one = truncated_correlation(&sys.kernel, &[vec![0, 1]], &pts).unwrap();
        assert!((one.definition - sys.kernel.rho_p(&pts)).abs() < 1e-13);
        let two = truncated_correlation(&sys.kernel, &[vec![0], vec![1]], &pts).unwrap();
        let gm = sys.kernel.gamma(&[0.7, 0.0, 0.0]).norm_sqr();
        assert!((two.definition + gm).abs() < 1e-13);
        assert!((two.two_cluster.unwrap() + gm).abs() < 1e-13);
    }

    #[test]
    fn convergence_parameter_examples() {
        let a = 1e-2;
        let c = convergence_parameter(100.0, a, 1e-6 / a.powi(3), 100.0 * a, 1e6, 3, 0.1).unwrap();
        assert_eq!(format!("{:.2}", c.value), "1.21");
        assert!(!c.ok);
        let c2 = convergence_parameter(200.0, a, 1e-6 / a.powi(3), 100.0 * a, 1e6, 3, 0.1).unwrap();
        assert!((c2.value / c.value - 2.0).abs() < 1e-14);
        assert_eq!(convergence_parameter(1.0, 0.0, 1.0, 1.0, 10.0, 3, 0.1).unwrap().value, 0.0);
    }

    #[test]
    fn tree_graph_small() {
        let t = tree_graph_check(&[vec![0.0, -0.4], vec![-0.4, 0.0]]).unwrap();
        assert_eq!((t.lhs, t.rhs, t.trees), (0.4, 0.4, 1));
        let full = vec![vec![-1.0; 3]; 3];
        let t = tree_graph_check(&full).unwrap();
        assert_eq!((t.connected, t.trees), (4, 3));
        assert!(t.ok && (t.lhs - 2.0).abs() < 1e-15);
    }

    #[test]
    fn catalog_listing() {
        let counts = [12, 4, 4, 6, 80, 108, 48, 48, 18, 20, 24, 108];
        for (e, want) in catalog().iter().zip(counts) {
            let ds = catalog_diagrams(e.id).unwrap();
            assert_eq!(ds.len(), want, "{}", e.id);
            assert!(ds.iter().all(|d| d.class_consistent() && d.sign == perm_sign(&d.perm)));
        }
        assert!(matches!(catalog_diagrams("2b-A-k9"), Err(Error::UnknownId(_))));
    }

    proptest! {
        #[test]
        fn tree_graph_bound_random(vals in proptest::collection::vec(-1.0f64..=0.0, 10)) {
            let mut g = vec![vec![0.0; 5]; 5];
            let mut it = vals.into_iter();
            for a in 0..5 {
                for b in a + 1..5 {
                    let v = it.next().unwrap();
                    g[a][b] = v;
                    g[b][a] = v;
                }
            }
            let t = tree_graph_check(&g).unwrap();
            prop_assert!(t.ok);
            prop_assert_eq!(t.trees, 125);
        }
    }
}
