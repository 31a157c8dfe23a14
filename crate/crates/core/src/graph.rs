//! The level-`m` approximating graphs `G_m = (V_m, E_m)` of the Vicsek set.
//!
//! Points are stored as exact integer coordinates at scale `S_m = 2 (2n-1)^m`,
//! so that `V_0 = {0, S_m}^d` and the center `q_0` has coordinate `S_m / 2`.
//! A contraction with letter `a` sends a point `X` at scale `S_k` to
//! `X + S_k c_a` at scale `S_{k+1}`, where `c_a = 2(n-j) q_i + (j-1) 1`.
//!
//! Cells of level `m` are words `w_1 ... w_m` over the `K = 2^d(n-1) + 1`
//! letters, indexed lexicographically (first letter most significant), so the
//! subcells of the `m`-cell with index `c` are `c K + a` for `a < K`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Exec, Params, Result};

/// Default bound on the number of vertices a graph may have.
pub const DEFAULT_MAX_VERTICES: u128 = 1 << 22;

/// Default bound on the level.
pub const DEFAULT_MAX_LEVEL: u32 = 25;

/// Environment variable overriding [`DEFAULT_MAX_LEVEL`].
pub const MAX_LEVEL_ENV: &str = "VICSEK_MAX_LEVEL";

/// A cell letter: the center cell `F_{i,n}` or an arm cell `F_{i,j}` with
/// `j < n` (both indices 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Center,
    Arm { i: usize, j: usize },
}

impl Letter {
    /// Letter index in `0..K`: the center is 0, `(i, j)` is
    /// `1 + (i-1)(n-1) + (j-1)`.
    pub fn index(self, params: &Params) -> usize {
        match self {
            Letter::Center => 0,
            Letter::Arm { i, j } => 1 + (i - 1) * (params.n() as usize - 1) + (j - 1),
        }
    }

    pub fn from_index(params: &Params, a: usize) -> Letter {
        if a == 0 {
            return Letter::Center;
        }
        let arm = params.n() as usize - 1;
        Letter::Arm {
            i: 1 + (a - 1) / arm,
            j: 1 + (a - 1) % arm,
        }
    }

    /// Builds a letter from `(i, j)` with `j = n` meaning the center.
    pub fn from_pair(params: &Params, i: usize, j: usize) -> Result<Letter> {
        let n = params.n() as usize;
        if i == 0 || i > params.corners() {
            return Err(Error::InvalidRange(format!(
                "i out of range 1..{}",
                params.corners()
            )));
        }
        if j == 0 || j > n {
            return Err(Error::InvalidRange(format!("j out of range 1..{n}")));
        }
        Ok(if j == n {
            Letter::Center
        } else {
            Letter::Arm { i, j }
        })
    }

    /// Arm position `j`, with the center at `j = n`.
    pub fn j(self, params: &Params) -> usize {
        match self {
            Letter::Center => params.n() as usize,
            Letter::Arm { j, .. } => j,
        }
    }
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Letter::Center => write!(f, "0"),
            Letter::Arm { i, j } => write!(f, "({i},{j})"),
        }
    }
}

/// Corner `q_i` of the unit cube, `i` 1-based: bit `l` of `i - 1` is
/// coordinate `l`.
pub fn corner(d: u32, i: usize) -> Vec<i128> {
    (0..d).map(|l| ((i - 1) >> l & 1) as i128).collect()
}

/// Index of the corner opposite `q_i`, i.e. `2^d + 1 - i`.
pub fn opposite(params: &Params, i: usize) -> usize {
    params.corners() + 1 - i
}

/// Offset vector `c_a` of a letter.
pub fn letter_offset(params: &Params, letter: Letter) -> Vec<i128> {
    let n = params.n() as i128;
    match letter {
        Letter::Center => vec![n - 1; params.d() as usize],
        Letter::Arm { i, j } => corner(params.d(), i)
            .into_iter()
            .map(|q| 2 * (n - j as i128) * q + (j as i128 - 1))
            .collect(),
    }
}

/// `S_k = 2 (2n-1)^k`, or `None` on overflow.
pub fn scale(params: &Params, k: u32) -> Option<i128> {
    (params.ratio() as i128).checked_pow(k)?.checked_mul(2)
}

/// Applies `F_a` to a point at scale `S_k`, giving a point at scale `S_{k+1}`.
pub fn apply_map(params: &Params, letter: Letter, point: &[i128], k: u32) -> Vec<i128> {
    let s = scale(params, k).expect("scale overflow");
    point
        .iter()
        .zip(letter_offset(params, letter))
        .map(|(x, c)| x + s * c)
        .collect()
}

/// Letters of the cell with lexicographic index `idx` among words of length `m`.
pub fn word_of(params: &Params, idx: usize, m: u32) -> Vec<usize> {
    let k = params.cell_count();
    let mut word = vec![0; m as usize];
    let mut rest = idx;
    for slot in word.iter_mut().rev() {
        *slot = rest % k;
        rest /= k;
    }
    word
}

/// Offset `F_w(0)` at scale `S_m` of the cell with word `w` of length `m`,
/// so that `F_w q_i = 2 q_i + origin`.
pub fn cell_origin(params: &Params, word: &[usize]) -> Vec<i128> {
    let m = word.len();
    let mut origin = vec![0i128; params.d() as usize];
    for (pos, &a) in word.iter().enumerate() {
        let s = scale(params, (m - 1 - pos) as u32).expect("scale overflow");
        for (o, c) in origin.iter_mut().zip(letter_offset(params, Letter::from_index(params, a))) {
            *o += s * c;
        }
    }
    origin
}

pub fn index_of_word(params: &Params, word: &[usize]) -> usize {
    let k = params.cell_count();
    word.iter().fold(0, |acc, &a| acc * k + a)
}

/// Limits on graph size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    pub max_level: u32,
    pub max_vertices: u128,
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity {
            max_level: DEFAULT_MAX_LEVEL,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

impl Capacity {
    /// Default capacity with the level bound taken from `VICSEK_MAX_LEVEL`
    /// when set.
    pub fn from_env() -> Result<Self> {
        let mut cap = Capacity::default();
        if let Ok(v) = std::env::var(MAX_LEVEL_ENV) {
            cap.max_level = v.trim().parse().map_err(|_| {
                Error::InvalidParams(format!("{MAX_LEVEL_ENV} must be a nonnegative integer (got {v:?})"))
            })?;
        }
        Ok(cap)
    }

    pub fn check(&self, params: &Params, m: u32) -> Result<()> {
        let exceeded = || Error::CapacityExceeded {
            level: m,
            max_level: self.max_level,
        };
        if m > self.max_level {
            return Err(exceeded());
        }
        let v = params.vertex_count(m).ok_or_else(exceeded)?;
        if v > self.max_vertices {
            return Err(exceeded());
        }
        scale(params, m).ok_or_else(exceeded)?;
        Ok(())
    }
}

/// Boundary condition of an eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Neumann,
    Dirichlet,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Neumann => "neumann",
            Mode::Dirichlet => "dirichlet",
        })
    }
}

/// The graph `G_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct VicsekGraph {
    params: Params,
    level: u32,
    scale: i128,
    coords: Vec<i128>,
    edges: Vec<(usize, usize)>,
    degree: Vec<u32>,
    boundary: Vec<bool>,
    cells: Vec<usize>,
    adj_start: Vec<usize>,
    adj: Vec<usize>,
}

/// A function on `V_m` together with its claimed eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFunction {
    pub level: u32,
    pub lambda: f64,
    pub values: Vec<f64>,
}

pub fn build_graph(params: &Params, m: u32) -> Result<VicsekGraph> {
    VicsekGraph::build(params, m, Capacity::from_env()?, Exec::default())
}

impl VicsekGraph {
    pub fn build(params: &Params, m: u32, capacity: Capacity, exec: Exec) -> Result<Self> {
        capacity.check(params, m)?;
        let corners = params.corners();
        let cell_total = params.cell_count().pow(m);
        let unit: Vec<Vec<i128>> = (1..=corners)
            .map(|i| corner(params.d(), i).into_iter().map(|q| 2 * q).collect())
            .collect();

        let cell_points: Vec<Vec<Vec<i128>>> = exec.map_range(cell_total, |c| {
            let origin = cell_origin(params, &word_of(params, c, m));
            unit.iter()
                .map(|q| q.iter().zip(&origin).map(|(x, o)| x + o).collect())
                .collect()
        });

        let mut keys: Vec<Vec<i128>> = cell_points.iter().flatten().cloned().collect();
        exec.sort(&mut keys);
        keys.dedup();
        let coords: Vec<i128> = keys.iter().flatten().copied().collect();
        drop(keys);

        let mut graph = VicsekGraph {
            params: *params,
            level: m,
            scale: scale(params, m).expect("checked"),
            coords,
            edges: Vec::new(),
            degree: Vec::new(),
            boundary: Vec::new(),
            cells: Vec::new(),
            adj_start: Vec::new(),
            adj: Vec::new(),
        };
        let cells: Vec<Vec<usize>> = exec.map(&cell_points, |pts| {
            pts.iter()
                .map(|p| graph.index_of(p).expect("corner is a vertex"))
                .collect()
        });
        drop(cell_points);
        graph.cells = cells.into_iter().flatten().collect();

        let mut edges = Vec::with_capacity(cell_total * corners * (corners - 1) / 2);
        for cell in graph.cells.chunks(corners) {
            for a in 0..corners {
                for b in a + 1..corners {
                    edges.push((cell[a].min(cell[b]), cell[a].max(cell[b])));
                }
            }
        }
        exec.sort(&mut edges);
        let nv = graph.vertex_count();
        let mut degree = vec![0u32; nv];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut adj_start = vec![0usize; nv + 1];
        for v in 0..nv {
            adj_start[v + 1] = adj_start[v] + degree[v] as usize;
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![0usize; adj_start[nv]];
        for &(a, b) in &edges {
            adj[fill[a]] = b;
            fill[a] += 1;
            adj[fill[b]] = a;
            fill[b] += 1;
        }
        for v in 0..nv {
            adj[adj_start[v]..adj_start[v + 1]].sort_unstable();
        }
        let s = graph.scale;
        graph.boundary = (0..nv)
            .map(|v| graph.coords(v).iter().all(|&x| x == 0 || x == s))
            .collect();
        graph.edges = edges;
        graph.degree = degree;
        graph.adj_start = adj_start;
        graph.adj = adj;
        Ok(graph)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Coordinate scale `S_m`.
    pub fn scale(&self) -> i128 {
        self.scale
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len() / self.params.d() as usize
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn coords(&self, v: usize) -> &[i128] {
        let d = self.params.d() as usize;
        &self.coords[v * d..(v + 1) * d]
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.adj_start[v]..self.adj_start[v + 1]]
    }

    pub fn cell_total(&self) -> usize {
        self.cells.len() / self.params.corners()
    }

    /// Vertex indices of the corners `F_w q_1, ..., F_w q_{2^d}` of cell `c`.
    pub fn cell_corners(&self, c: usize) -> &[usize] {
        let k = self.params.corners();
        &self.cells[c * k..(c + 1) * k]
    }

    /// Boundary vertices, in the order `q_1, ..., q_{2^d}`.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        (1..=self.params.corners())
            .map(|i| {
                let p: Vec<i128> = corner(self.params.d(), i)
                    .into_iter()
                    .map(|q| q * self.scale)
                    .collect();
                self.index_of(&p).expect("corner vertex")
            })
            .collect()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Vertices at which the eigenvalue equation is imposed.
    pub fn equation_vertices(&self, mode: Mode) -> Vec<usize> {
        match mode {
            Mode::Neumann => (0..self.vertex_count()).collect(),
            Mode::Dirichlet => self.interior_vertices(),
        }
    }

    /// Vertex with the given coordinates, by binary search.
    pub fn index_of(&self, point: &[i128]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.vertex_count());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.coords(mid).cmp(point) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.vertex_count();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == nv
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: self.vertex_count(),
                got: f.len(),
            });
        }
        Ok(())
    }

    /// `(-Delta_m f)(x) = f(x) - mean of f over the neighbours of x`, at every vertex.
    pub fn apply_laplacian(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        Ok((0..self.vertex_count())
            .map(|v| {
                let nb = self.neighbors(v);
                let s: f64 = nb.iter().map(|&w| f[w]).sum();
                f[v] - s / nb.len() as f64
            })
            .collect())
    }

    /// `(2n-1)^m sum over edges of (f(x) - f(y))^2`.
    pub fn energy(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        let s: f64 = self.edges.iter().map(|&(a, b)| (f[a] - f[b]).powi(2)).sum();
        Ok((self.params.ratio() as f64).powi(self.level as i32) * s)
    }

    /// `max |(-Delta f)(x) - lambda f(x)|` over the equation vertices of `mode`.
    pub fn residual(&self, f: &[f64], lambda: f64, mode: Mode) -> Result<f64> {
        let lf = self.apply_laplacian(f)?;
        Ok(self
            .equation_vertices(mode)
            .into_iter()
            .map(|v| (lf[v] - lambda * f[v]).abs())
            .fold(0.0, f64::max))
    }

    /// The symmetric matrix `I - D^{-1/2} A D^{-1/2}`, restricted to the
    /// interior in Dirichlet mode, with the vertex index of each row.
    pub fn operator_matrix(&self, mode: Mode) -> Result<(DMatrix<f64>, Vec<usize>)> {
        let rows = self.equation_vertices(mode);
        if rows.is_empty() {
            return Err(Error::EmptyInterior);
        }
        let mut pos = vec![usize::MAX; self.vertex_count()];
        for (r, &v) in rows.iter().enumerate() {
            pos[v] = r;
        }
        let dim = rows.len();
        let mut m = DMatrix::<f64>::identity(dim, dim);
        for &(a, b) in &self.edges {
            let (ra, rb) = (pos[a], pos[b]);
            if ra == usize::MAX || rb == usize::MAX {
                continue;
            }
            let w = -1.0 / ((self.degree[a] as f64) * (self.degree[b] as f64)).sqrt();
            m[(ra, rb)] = w;
            m[(rb, ra)] = w;
        }
        Ok((m, rows))
    }

    /// Indices of the vertices of `G_m` inside this graph `G_{m+1}`.
    pub fn embed_coarse(&self, coarse: &VicsekGraph) -> Vec<usize> {
        let r = self.params.ratio() as i128;
        (0..coarse.vertex_count())
            .map(|v| {
                let p: Vec<i128> = coarse.coords(v).iter().map(|x| x * r).collect();
                self.index_of(&p).expect("nested vertex sets")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(d: u32, n: u32, m: u32) -> VicsekGraph {
        VicsekGraph::build(&Params::new(d, n).unwrap(), m, Capacity::default(), Exec::Parallel)
            .unwrap()
    }

    #[test]
    fn letters_roundtrip() {
        let p = Params::new(3, 4).unwrap();
        for a in 0..p.cell_count() {
            assert_eq!(Letter::from_index(&p, a).index(&p), a);
        }
        assert_eq!(Letter::from_pair(&p, 5, 4).unwrap(), Letter::Center);
        assert!(Letter::from_pair(&p, 9, 1).is_err());
    }

    #[test]
    fn contraction_fixes_corners_and_center() {
        let p = Params::new(2, 3).unwrap();
        for i in 1..=4 {
            let q: Vec<i128> = corner(2, i).iter().map(|x| 2 * x).collect();
            let img = apply_map(&p, Letter::Arm { i, j: 1 }, &q, 0);
            let want: Vec<i128> = corner(2, i).iter().map(|x| 10 * x).collect();
            assert_eq!(img, want);
        }
        assert_eq!(apply_map(&p, Letter::Center, &[1, 1], 0), vec![5, 5]);
        let p22 = Params::new(2, 2).unwrap();
        assert_eq!(apply_map(&p22, Letter::Arm { i: 1, j: 1 }, &[2, 2], 0), vec![2, 2]);
    }

    #[test]
    fn small_graphs() {
        let k4 = g(2, 2, 0);
        assert_eq!(k4.vertex_count(), 4);
        assert_eq!(k4.edges().len(), 6);
        assert!(k4.degrees().iter().all(|&x| x == 3));
        let g1 = g(2, 2, 1);
        assert_eq!((g1.vertex_count(), g1.edges().len()), (16, 30));
        assert_eq!(g(3, 2, 1).vertex_count(), 64);
    }

    #[test]
    fn counts_degrees_and_connectivity() {
        for d in 2..=3 {
            for n in 2..=4 {
                for m in 0..=3 {
                    let p = Params::new(d, n).unwrap();
                    if p.vertex_count(m).unwrap() > 200_000 {
                        continue;
                    }
                    let gr = g(d, n, m);
                    assert_eq!(gr.vertex_count() as u128, p.vertex_count(m).unwrap());
                    assert_eq!(gr.edges().len() as u128, p.edge_count(m).unwrap());
                    let nn = p.big_n() as u32;
                    let sum: u64 = gr.degrees().iter().map(|&x| x as u64).sum();
                    assert_eq!(sum, 2 * gr.edges().len() as u64);
                    for v in 0..gr.vertex_count() {
                        assert!(gr.degree(v) == nn || gr.degree(v) == 2 * nn);
                        if gr.is_boundary(v) {
                            assert_eq!(gr.degree(v), nn);
                        }
                    }
                    assert_eq!(gr.boundary_vertices().len(), p.corners());
                    assert!(gr.is_connected());
                }
            }
        }
    }

    #[test]
    fn nesting() {
        for (d, n) in [(2, 2), (2, 3), (3, 2)] {
            for m in 0..2 {
                let a = g(d, n, m);
                let b = g(d, n, m + 1);
                let emb = b.embed_coarse(&a);
                assert_eq!(emb.len(), a.vertex_count());
            }
        }
    }

    #[test]
    fn subcells_nest_in_parent_cells() {
        let p = Params::new(2, 3).unwrap();
        let (a, b) = (g(2, 3, 1), g(2, 3, 2));
        let k = p.cell_count();
        let emb = b.embed_coarse(&a);
        for c in 0..a.cell_total() {
            let lo: Vec<i128> = b.coords(emb[a.cell_corners(c)[0]]).to_vec();
            let hi: Vec<i128> = b.coords(emb[a.cell_corners(c)[3]]).to_vec();
            for s in 0..k {
                for &v in b.cell_corners(c * k + s) {
                    let x = b.coords(v);
                    assert!((0..2).all(|l| lo[l] <= x[l] && x[l] <= hi[l]));
                }
            }
        }
    }

    #[test]
    fn laplacian_and_energy() {
        let k4 = g(2, 2, 0);
        let f = [3.0, -1.0, -1.0, -1.0];
        let lf = k4.apply_laplacian(&f).unwrap();
        for (a, b) in lf.iter().zip(&f) {
            assert!((a - 4.0 / 3.0 * b).abs() < 1e-15);
        }
        assert_eq!(k4.apply_laplacian(&[1.0; 4]).unwrap(), vec![0.0; 4]);
        assert_eq!(k4.energy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 3.0);
        assert!(k4.energy(&[1.0; 3]).is_err());

        let g1 = g(2, 2, 1);
        let junction = (0..16).find(|&v| g1.degree(v) == 6).unwrap();
        let mut ind = vec![0.0; 16];
        ind[junction] = 1.0;
        assert_eq!(g1.energy(&ind).unwrap(), 18.0);
        let brute: f64 = g1
            .edges()
            .iter()
            .map(|&(a, b)| (ind[a] - ind[b]).powi(2))
            .sum::<f64>()
            * 3.0;
        assert_eq!(brute, 18.0);
    }

    #[test]
    fn operator_matrices() {
        let (m, rows) = g(2, 2, 0).operator_matrix(Mode::Neumann).unwrap();
        assert_eq!(rows, vec![0, 1, 2, 3]);
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { 1.0 } else { -1.0 / 3.0 };
                assert!((m[(a, b)] - want).abs() < 1e-15);
            }
        }
        let (m, rows) = g(2, 2, 1).operator_matrix(Mode::Dirichlet).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(m.trace(), 12.0);
        assert_eq!(m, m.transpose());
        assert_eq!(
            g(2, 2, 0).operator_matrix(Mode::Dirichlet).unwrap_err(),
            Error::EmptyInterior
        );
    }

    #[test]
    fn capacity_guard() {
        let p = Params::new(2, 2).unwrap();
        let cap = Capacity {
            max_level: 3,
            max_vertices: 1 << 20,
        };
        assert!(matches!(
            VicsekGraph::build(&p, 4, cap, Exec::Sequential),
            Err(Error::CapacityExceeded { level: 4, max_level: 3 })
        ));
        assert!(Capacity::default().check(&p, 12).is_err());
    }

    #[test]
    fn schedule_independent() {
        let p = Params::new(2, 3).unwrap();
        let a = VicsekGraph::build(&p, 2, Capacity::default(), Exec::Sequential).unwrap();
        let b = VicsekGraph::build(&p, 2, Capacity::default(), Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
