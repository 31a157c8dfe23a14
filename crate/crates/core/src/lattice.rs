//! Vicsek set lattices, their blow-up trees and the isomorphism test.
//!
//! A sequence `omega = omega_1 omega_2 ...` over the letters of one level
//! determines a lattice by blowing up the Vicsek set along `omega`. Up to
//! horizon `h` it is a copy of `V_h`, and the anchors `c_k` are the centers of
//! the nested cells: in the frame of `V_h`, `c_k` is the center of the unit
//! cell with word `omega_h ... omega_{k+1} 0^k`. The blow-up tree joins every
//! unit cell's center to its `2^d` corners.
//!
//! Distances between cell centers are computed from addresses alone with
//! [`CellTreeMetric`], so large horizons never need the explicit tree;
//! [`BlowupTree`] builds the tree explicitly for cross-checks at small
//! horizons.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::graph::{
    cell_origin, corner, index_of_word, opposite, word_of, Capacity, Letter, VicsekGraph,
};
use crate::{Error, Exec, Params, Result};

/// An eventually periodic sequence `prefix cycle cycle ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaSeq {
    prefix: Vec<Letter>,
    cycle: Vec<Letter>,
}

fn check_letter(params: &Params, letter: Letter) -> std::result::Result<(), String> {
    if let Letter::Arm { i, j } = letter {
        if i == 0 || i > params.corners() {
            return Err(format!("i out of range 1..{}", params.corners()));
        }
        if j == 0 || j >= params.n() as usize {
            return Err(format!("j out of range 1..{}", params.n() - 1));
        }
    }
    Ok(())
}

impl OmegaSeq {
    pub fn new(params: &Params, prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidParams("the cycle of omega must be nonempty".into()));
        }
        for &l in prefix.iter().chain(&cycle) {
            check_letter(params, l).map_err(Error::InvalidParams)?;
        }
        Ok(OmegaSeq { prefix, cycle })
    }

    /// Parses `prefix|cycle`, each a comma-separated list of `0` or `(i,j)`.
    pub fn parse(params: &Params, text: &str) -> Result<Self> {
        Parser::new(params, text).sequence()
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// `omega_m`, 1-based.
    pub fn letter(&self, m: usize) -> Letter {
        assert!(m >= 1, "omega is indexed from 1");
        if m <= self.prefix.len() {
            self.prefix[m - 1]
        } else {
            self.cycle[(m - 1 - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// `[omega]_h = omega_1 ... omega_h`.
    pub fn word(&self, h: usize) -> Vec<Letter> {
        (1..=h).map(|m| self.letter(m)).collect()
    }

    /// Address, outermost letter first, of the unit cell whose center is `c_k`
    /// in the frame of `V_h`.
    pub fn center_word(&self, params: &Params, k: usize, h: usize) -> Vec<usize> {
        let mut w: Vec<usize> = (k + 1..=h).rev().map(|m| self.letter(m).index(params)).collect();
        w.resize(h, 0);
        w
    }
}

impl fmt::Display for OmegaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ls: &[Letter]| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(&self.prefix), join(&self.cycle))
    }
}

struct Parser<'a> {
    params: &'a Params,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(params: &'a Params, text: &str) -> Self {
        Parser {
            params,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn error<T>(&self, position: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: position + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.error(self.pos, format!("expected '{c}', found '{x}'")),
            None => self.error(self.pos, format!("expected '{c}', found end of input")),
        }
    }

    fn number(&mut self) -> Result<(usize, usize)> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error(start, "expected a number");
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse() {
            Ok(v) => Ok((v, start)),
            Err(_) => self.error(start, format!("number {text} is too large")),
        }
    }

    fn letter(&mut self) -> Result<Letter> {
        match self.peek() {
            Some('0') => {
                self.pos += 1;
                if self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    return self.error(self.pos - 1, "expected '0' or '(i,j)'");
                }
                Ok(Letter::Center)
            }
            Some('(') => {
                self.pos += 1;
                let (i, pi) = self.number()?;
                self.expect(',')?;
                let (j, pj) = self.number()?;
                self.expect(')')?;
                if i == 0 || i > self.params.corners() {
                    return self.error(pi, format!("i out of range 1..{}", self.params.corners()));
                }
                if j == 0 || j >= self.params.n() as usize {
                    return self.error(pj, format!("j out of range 1..{}", self.params.n() - 1));
                }
                Ok(Letter::Arm { i, j })
            }
            Some(x) => self.error(self.pos, format!("expected '0' or '(i,j)', found '{x}'")),
            None => self.error(self.pos, "expected '0' or '(i,j)', found end of input"),
        }
    }

    fn list(&mut self) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        if matches!(self.peek(), None | Some('|')) {
            return Ok(out);
        }
        loop {
            out.push(self.letter()?);
            if self.peek() == Some(',') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn sequence(mut self) -> Result<OmegaSeq> {
        let prefix = self.list()?;
        self.expect('|')?;
        let at = self.pos;
        let cycle = self.list()?;
        if let Some(x) = self.peek() {
            return self.error(self.pos, format!("unexpected '{x}'"));
        }
        if cycle.is_empty() {
            return self.error(at, "the cycle must be nonempty");
        }
        Ok(OmegaSeq { prefix, cycle })
    }
}

/// A walk through one cell: entry and exit corner positions (0-based).
type Traversal = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
struct Route {
    exit: usize,
    via: Vec<Traversal>,
    entry: usize,
}

/// Distances in the blow-up tree computed from cell addresses.
///
/// In the tree of `V_1` every path between two centers or corners crosses a
/// fixed sequence of cells. At level `L` each crossed cell is an
/// `(L-1)`-cell and costs the corner-to-corner distance of level `L-1`, which
/// gives a recursion over the address.
#[derive(Debug, Clone)]
pub struct CellTreeMetric {
    params: Params,
    cell_route: Vec<Vec<Option<Route>>>,
    corner_route: Vec<Vec<Route>>,
    /// `corner_corner[L][i][k]`: distance between corners `i` and `k` of an `L`-cell.
    corner_corner: Vec<Vec<Vec<u64>>>,
}

fn overflow(level: usize) -> Error {
    Error::CapacityExceeded {
        level: level as u32,
        max_level: level.saturating_sub(1) as u32,
    }
}

impl CellTreeMetric {
    /// Prepares distances for horizons up to `max_level`.
    pub fn new(params: &Params, max_level: usize) -> Result<Self> {
        let g1 = VicsekGraph::build(params, 1, Capacity::default(), Exec::Sequential)?;
        let nv = g1.vertex_count();
        let k = g1.cell_total();
        let corners = params.corners();
        let mut adj = vec![Vec::new(); nv + k];
        for a in 0..k {
            for &v in g1.cell_corners(a) {
                adj[v].push(nv + a);
                adj[nv + a].push(v);
            }
        }
        let path = |from: usize, to: usize| -> Vec<usize> {
            let mut parent = vec![usize::MAX; adj.len()];
            parent[from] = from;
            let mut queue = VecDeque::from([from]);
            while let Some(u) = queue.pop_front() {
                if u == to {
                    break;
                }
                for &w in &adj[u] {
                    if parent[w] == usize::MAX {
                        parent[w] = u;
                        queue.push_back(w);
                    }
                }
            }
            let mut p = vec![to];
            while *p.last().expect("nonempty") != from {
                p.push(parent[*p.last().expect("nonempty")]);
            }
            p.reverse();
            p
        };
        let pos_in = |a: usize, v: usize| {
            g1.cell_corners(a)
                .iter()
                .position(|&x| x == v)
                .expect("corner of the cell")
        };
        let traversals = |p: &[usize], skip_first: bool, skip_last: bool| -> Vec<Traversal> {
            let lo = if skip_first { 1 } else { 0 };
            let hi = if skip_last { p.len() - 1 } else { p.len() };
            (lo..hi)
                .filter(|&s| p[s] >= nv)
                .map(|s| {
                    let a = p[s] - nv;
                    (pos_in(a, p[s - 1]), pos_in(a, p[s + 1]))
                })
                .collect()
        };
        let boundary = g1.boundary_vertices();

        let cell_route = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| {
                        (a != b).then(|| {
                            let p = path(nv + a, nv + b);
                            Route {
                                exit: pos_in(a, p[1]),
                                via: traversals(&p, true, true),
                                entry: pos_in(b, p[p.len() - 2]),
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        let corner_route = (0..k)
            .map(|a| {
                boundary
                    .iter()
                    .map(|&q| {
                        let p = path(nv + a, q);
                        Route {
                            exit: pos_in(a, p[1]),
                            via: traversals(&p, true, false),
                            entry: 0,
                        }
                    })
                    .collect()
            })
            .collect();
        let boundary_via: Vec<Vec<Vec<Traversal>>> = boundary
            .iter()
            .map(|&qi| {
                boundary
                    .iter()
                    .map(|&qk| {
                        if qi == qk {
                            Vec::new()
                        } else {
                            traversals(&path(qi, qk), false, false)
                        }
                    })
                    .collect()
            })
            .collect();

        let mut corner_corner = vec![(0..corners)
            .map(|i| (0..corners).map(|k| if i == k { 0 } else { 2 }).collect::<Vec<u64>>())
            .collect::<Vec<_>>()];
        for level in 1..=max_level {
            let prev = &corner_corner[level - 1];
            let mut next = vec![vec![0u64; corners]; corners];
            for i in 0..corners {
                for kk in 0..corners {
                    next[i][kk] = boundary_via[i][kk]
                        .iter()
                        .try_fold(0u64, |acc, &(e, x)| acc.checked_add(prev[e][x]))
                        .filter(|&v| v < u64::MAX / 4)
                        .ok_or_else(|| overflow(level))?;
                }
            }
            corner_corner.push(next);
        }
        Ok(CellTreeMetric {
            params: *params,
            cell_route,
            corner_route,
            corner_corner,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn max_level(&self) -> usize {
        self.corner_corner.len() - 1
    }

    /// Distance between corners `i` and `k` (1-based) of a cell of level `level`.
    pub fn corner_distance(&self, level: usize, i: usize, k: usize) -> u64 {
        self.corner_corner[level][i - 1][k - 1]
    }

    fn via_cost(&self, via: &[Traversal], level: usize) -> u64 {
        via.iter().map(|&(e, x)| self.corner_corner[level][e][x]).sum()
    }

    /// Distance from the center of unit cell `u` to corner `i` (0-based) of
    /// the `|u|`-cell containing it.
    fn center_to_corner(&self, u: &[usize], i: usize) -> u64 {
        match u.split_first() {
            None => 1,
            Some((&a, rest)) => {
                let r = &self.corner_route[a][i];
                self.center_to_corner(rest, r.exit) + self.via_cost(&r.via, rest.len())
            }
        }
    }

    /// Tree distance between the centers of the unit cells with addresses
    /// `u` and `v` (equal lengths, outermost letter first).
    pub fn center_distance(&self, u: &[usize], v: &[usize]) -> u64 {
        assert_eq!(u.len(), v.len(), "addresses of different levels");
        assert!(u.len() <= self.max_level() + 1, "metric prepared for lower levels");
        let common = u.iter().zip(v).take_while(|(a, b)| a == b).count();
        let (u, v) = (&u[common..], &v[common..]);
        match (u.split_first(), v.split_first()) {
            (Some((&a, ur)), Some((&b, vr))) => {
                let r = self.cell_route[a][b].as_ref().expect("distinct letters");
                self.center_to_corner(ur, r.exit)
                    + self.via_cost(&r.via, ur.len())
                    + self.center_to_corner(vr, r.entry)
            }
            _ => 0,
        }
    }
}

/// Pairwise distances `D[k][l]` between the anchors `c_k`, `c_l` for
/// `base <= k, l <= h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterMatrix {
    pub base: usize,
    pub distances: Vec<Vec<u64>>,
}

impl CenterMatrix {
    pub fn size(&self) -> usize {
        self.distances.len()
    }

    /// `D[k][l]` with absolute indices.
    pub fn get(&self, k: usize, l: usize) -> u64 {
        self.distances[k - self.base][l - self.base]
    }
}

pub fn center_matrix(metric: &CellTreeMetric, omega: &OmegaSeq, base: usize, h: usize) -> Result<CenterMatrix> {
    if base > h {
        return Err(Error::InvalidRange(format!("base index {base} exceeds horizon {h}")));
    }
    if h > metric.max_level() + 1 {
        return Err(overflow(h));
    }
    let p = metric.params();
    let words: Vec<Vec<usize>> = (base..=h).map(|k| omega.center_word(p, k, h)).collect();
    let distances = words
        .iter()
        .map(|u| words.iter().map(|v| metric.center_distance(u, v)).collect())
        .collect();
    Ok(CenterMatrix { base, distances })
}

/// Whether the anchored center trees of `omega` and `omega_prime` agree on
/// the anchors `c_{M-1}, ..., c_h`.
pub fn gamma_oracle_iso(
    metric: &CellTreeMetric,
    omega: &OmegaSeq,
    omega_prime: &OmegaSeq,
    big_m: usize,
    h: usize,
) -> Result<bool> {
    let base = big_m.saturating_sub(1).min(h);
    Ok(center_matrix(metric, omega, base, h)? == center_matrix(metric, omega_prime, base, h)?)
}

/// The three conditions of the isomorphism criterion for all `M <= m <= h`.
/// `M = 0` is read as `M = 1`; an empty range is vacuously true.
pub fn thm56_check(params: &Params, omega: &OmegaSeq, omega_prime: &OmegaSeq, big_m: usize, h: usize) -> bool {
    let big_m = big_m.max(1);
    let compatible = |l: Letter, i: usize| match l {
        Letter::Center => true,
        Letter::Arm { i: k, .. } => k == opposite(params, i),
    };
    for m in big_m..=h {
        let (a, b) = (omega.letter(m), omega_prime.letter(m));
        match (a, b) {
            (Letter::Center, Letter::Center) => continue,
            (Letter::Arm { i, j }, Letter::Arm { i: ip, j: jp }) => {
                if j != jp {
                    return false;
                }
                let (mut x, mut y) = (true, true);
                for mp in (big_m..m).rev() {
                    x &= compatible(omega.letter(mp), i);
                    y &= compatible(omega_prime.letter(mp), ip);
                    if x != y {
                        return false;
                    }
                }
            }
            _ => return false,
        }
    }
    true
}

/// Verdict of [`iso_decide_periodic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoDecision {
    pub isomorphic: bool,
    /// Smallest `M` for which the conditions hold, when they hold for some `M`.
    pub witness: Option<usize>,
}

/// Horizon sufficient to check the criterion from `M` on: past the prefixes,
/// then two full common periods.
pub fn decision_horizon(omega: &OmegaSeq, omega_prime: &OmegaSeq, big_m: usize) -> usize {
    let p = omega.prefix().len().max(omega_prime.prefix().len());
    let period = omega.cycle().len().lcm(&omega_prime.cycle().len());
    big_m.max(p + 1) + 2 * period
}

/// Decides isomorphism of the lattices of two eventually periodic sequences.
///
/// Returns the smallest witness `M`. If the lattices are isomorphic but the
/// smallest witness exceeds `search_bound`, fails with
/// [`Error::InconclusiveBound`].
pub fn iso_decide_periodic(
    params: &Params,
    omega: &OmegaSeq,
    omega_prime: &OmegaSeq,
    search_bound: usize,
) -> Result<IsoDecision> {
    let p = omega.prefix().len().max(omega_prime.prefix().len());
    let period = omega.cycle().len().lcm(&omega_prime.cycle().len());
    let last = p + 1 + 2 * period;
    let holds = |m: usize| thm56_check(params, omega, omega_prime, m, decision_horizon(omega, omega_prime, m));
    if !holds(last) {
        return Ok(IsoDecision {
            isomorphic: false,
            witness: None,
        });
    }
    let witness = (1..=last).find(|&m| holds(m)).expect("holds at the last candidate");
    if witness > search_bound {
        return Err(Error::InconclusiveBound {
            bound: search_bound,
            witness,
        });
    }
    Ok(IsoDecision {
        isomorphic: true,
        witness: Some(witness),
    })
}

/// Decides isomorphism with the center-matrix oracle instead of the criterion,
/// using the same witness search.
pub fn iso_decide_oracle(
    metric: &CellTreeMetric,
    omega: &OmegaSeq,
    omega_prime: &OmegaSeq,
    search_bound: usize,
) -> Result<IsoDecision> {
    let p = omega.prefix().len().max(omega_prime.prefix().len());
    let period = omega.cycle().len().lcm(&omega_prime.cycle().len());
    let last = p + 1 + 2 * period;
    let holds = |m: usize| {
        gamma_oracle_iso(metric, omega, omega_prime, m, decision_horizon(omega, omega_prime, m))
    };
    if !holds(last)? {
        return Ok(IsoDecision {
            isomorphic: false,
            witness: None,
        });
    }
    for m in 1..=last {
        if holds(m)? {
            if m > search_bound {
                return Err(Error::InconclusiveBound {
                    bound: search_bound,
                    witness: m,
                });
            }
            return Ok(IsoDecision {
                isomorphic: true,
                witness: Some(m),
            });
        }
    }
    unreachable!("holds at the last candidate")
}

/// The blow-up tree up to horizon `h`, built explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupTree {
    params: Params,
    horizon: usize,
    scale: i128,
    coords: Vec<Vec<i128>>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    centers: Vec<usize>,
}

pub fn build_blowup_tree(
    params: &Params,
    omega: &OmegaSeq,
    h: usize,
    capacity: Capacity,
    exec: Exec,
) -> Result<BlowupTree> {
    let exceeded = || Error::CapacityExceeded {
        level: h as u32,
        max_level: capacity.max_level,
    };
    capacity.check(params, h as u32)?;
    let cells = (params.cell_count() as u128)
        .checked_pow(h as u32)
        .ok_or_else(exceeded)?;
    if params.vertex_count(h as u32).ok_or_else(exceeded)? + cells > capacity.max_vertices {
        return Err(exceeded());
    }
    let cells = cells as usize;
    let d = params.d() as usize;
    let corners = params.corners();
    let unit: Vec<Vec<i128>> = (1..=corners)
        .map(|i| corner(params.d(), i).into_iter().map(|q| 2 * q).collect())
        .collect();
    // per cell: center first, then corners
    let per_cell: Vec<Vec<Vec<i128>>> = exec.map_range(cells, |c| {
        let origin = cell_origin(params, &word_of(params, c, h as u32));
        let mut pts = vec![origin.iter().map(|o| o + 1).collect::<Vec<i128>>()];
        pts.extend(unit.iter().map(|q| q.iter().zip(&origin).map(|(x, o)| x + o).collect()));
        pts
    });
    let mut coords: Vec<Vec<i128>> = per_cell.iter().flatten().cloned().collect();
    exec.sort(&mut coords);
    coords.dedup();
    let find = |p: &[i128]| coords.binary_search_by(|x| x.as_slice().cmp(p)).expect("tree vertex");
    let mut edges: Vec<(usize, usize)> = per_cell
        .iter()
        .flat_map(|pts| {
            let c = find(&pts[0]);
            pts[1..].iter().map(move |q| (c, q.clone())).collect::<Vec<_>>()
        })
        .map(|(c, q)| {
            let v = find(&q);
            (c.min(v), c.max(v))
        })
        .collect();
    exec.sort(&mut edges);
    let mut adj = vec![Vec::new(); coords.len()];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let centers = (0..=h)
        .map(|k| {
            let origin = cell_origin(params, &omega.center_word(params, k, h));
            let p: Vec<i128> = origin.iter().map(|o| o + 1).collect();
            find(&p)
        })
        .collect();
    debug_assert!(coords.iter().all(|x| x.len() == d));
    Ok(BlowupTree {
        params: *params,
        horizon: h,
        scale: crate::graph::scale(params, h as u32).expect("checked"),
        coords,
        edges,
        adj,
        centers,
    })
}

impl BlowupTree {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn scale(&self) -> i128 {
        self.scale
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, v: usize) -> &[i128] {
        &self.coords[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Vertex indices of `c_0, ..., c_h`.
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn index_of(&self, p: &[i128]) -> Option<usize> {
        self.coords.binary_search_by(|x| x.as_slice().cmp(p)).ok()
    }

    /// Breadth-first distances from `source`.
    pub fn bfs(&self, source: usize) -> Vec<u64> {
        let mut dist = vec![u64::MAX; self.vertex_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == u64::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count() && self.bfs(0).iter().all(|&x| x != u64::MAX)
    }

    /// Center distances by breadth-first search.
    pub fn center_matrix(&self, base: usize) -> CenterMatrix {
        let rows = &self.centers[base..];
        let distances = rows
            .iter()
            .map(|&c| {
                let dist = self.bfs(c);
                rows.iter().map(|&x| dist[x]).collect()
            })
            .collect();
        CenterMatrix { base, distances }
    }
}

/// Center distances read off the lattice graph `G_h` (complete graphs on
/// unit cells): two distinct anchor cells are `2 + 2 g` apart in the tree,
/// where `g` is the graph distance between their closest corners.
pub fn lattice_graph_center_matrix(
    params: &Params,
    omega: &OmegaSeq,
    base: usize,
    h: usize,
    capacity: Capacity,
    exec: Exec,
) -> Result<CenterMatrix> {
    let g = VicsekGraph::build(params, h as u32, capacity, exec)?;
    let cells: Vec<usize> = (base..=h)
        .map(|k| index_of_word(params, &omega.center_word(params, k, h)))
        .collect();
    let distances = exec.map(&cells, |&cu| {
        let mut dist = vec![u64::MAX; g.vertex_count()];
        let mut queue = VecDeque::new();
        for &v in g.cell_corners(cu) {
            dist[v] = 0;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == u64::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        cells
            .iter()
            .map(|&cv| {
                if cv == cu {
                    0
                } else {
                    let gap = g.cell_corners(cv).iter().map(|&v| dist[v]).min().expect("corners");
                    2 + 2 * gap
                }
            })
            .collect()
    });
    Ok(CenterMatrix { base, distances })
}
