//! Moving eigenfunctions between consecutive levels.
//!
//! Restriction takes an eigenfunction of `G_{m+1}` with eigenvalue `lambda`
//! to its values on `V_m`, which form an eigenfunction with eigenvalue
//! `R(lambda)`. Extension goes the other way: inside every `m`-cell the values
//! at the `#(V_1 \ V_0)` new vertices are the unique solution of the local
//! eigenvalue equations given the corner values, provided `lambda` is not a
//! forbidden eigenvalue. Every cell has the same local system, so it is
//! assembled once from `G_1` and solved for all `2^d` unit corner data.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cheb::eval_pq;
use crate::decim::Decimation;
use crate::graph::{opposite, Capacity, EigenFunction, Letter, Mode, VicsekGraph};
use crate::{Error, Exec, Params, Result};

/// Extension refuses eigenvalues closer than this to the forbidden set.
pub const NEAR_FORBIDDEN: f64 = 1e-7;

/// Relative residual accepted for input eigenfunctions.
pub const INPUT_TOL: f64 = 1e-8;

/// Relative residual below which a restriction passes.
pub const RESTRICT_TOL: f64 = 1e-7;

const SINGULAR_TOL: f64 = 1e-12;
const TOP_TOL: f64 = 1e-12;

/// `max |(-Delta f - lambda f)(x)| / max |f|` over the equation vertices.
pub fn relative_residual(graph: &VicsekGraph, f: &[f64], lambda: f64, mode: Mode) -> Result<f64> {
    let r = graph.residual(f, lambda, mode)?;
    let scale = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    Ok(if scale > 0.0 { r / scale } else { r })
}

/// Scales `f` so that its largest-magnitude entry is `+1`.
pub fn normalize(f: &[f64]) -> Vec<f64> {
    let pivot = f
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if pivot == 0.0 {
        return f.to_vec();
    }
    f.iter().map(|x| x / pivot).collect()
}

/// The local system of one cell, taken from `G_1`.
#[derive(Debug, Clone)]
pub struct CellTemplate {
    params: Params,
    /// `(subcell letter index, corner index)` locating each interior vertex.
    interior: Vec<(usize, usize)>,
    /// `D^{-1} A` restricted to interior rows and interior columns.
    a_ii: DMatrix<f64>,
    /// `D^{-1} A` restricted to interior rows and boundary columns `q_1..q_{2^d}`.
    a_ib: DMatrix<f64>,
}

impl CellTemplate {
    pub fn new(params: &Params) -> Result<Self> {
        let g1 = VicsekGraph::build(params, 1, Capacity::default(), Exec::Sequential)?;
        let boundary = g1.boundary_vertices();
        let interior_v = g1.interior_vertices();
        let mut locate = vec![None; g1.vertex_count()];
        for a in 0..g1.cell_total() {
            for (i, &v) in g1.cell_corners(a).iter().enumerate() {
                locate[v].get_or_insert((a, i));
            }
        }
        let mut pos_i = vec![usize::MAX; g1.vertex_count()];
        for (r, &v) in interior_v.iter().enumerate() {
            pos_i[v] = r;
        }
        let mut pos_b = vec![usize::MAX; g1.vertex_count()];
        for (r, &v) in boundary.iter().enumerate() {
            pos_b[v] = r;
        }
        let ni = interior_v.len();
        let mut a_ii = DMatrix::zeros(ni, ni);
        let mut a_ib = DMatrix::zeros(ni, boundary.len());
        for (r, &v) in interior_v.iter().enumerate() {
            let w = 1.0 / g1.degree(v) as f64;
            for &u in g1.neighbors(v) {
                if pos_i[u] != usize::MAX {
                    a_ii[(r, pos_i[u])] += w;
                } else {
                    a_ib[(r, pos_b[u])] += w;
                }
            }
        }
        Ok(CellTemplate {
            params: *params,
            interior: interior_v
                .iter()
                .map(|&v| locate[v].expect("every vertex lies in a cell"))
                .collect(),
            a_ii,
            a_ib,
        })
    }

    /// Number of unknowns per cell, `#(V_1 \ V_0)`.
    pub fn unknowns(&self) -> usize {
        self.interior.len()
    }

    /// `(1 - lambda) I - D^{-1} A` on the interior unknowns.
    pub fn system_matrix(&self, lambda: f64) -> DMatrix<f64> {
        let n = self.unknowns();
        DMatrix::identity(n, n) * (1.0 - lambda) - &self.a_ii
    }

    /// Smallest singular value of the zero-boundary local system.
    pub fn min_singular_value(&self, lambda: f64) -> f64 {
        self.system_matrix(lambda)
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Interior values as a linear map of the corner values.
    fn solve_operator(&self, lambda: f64) -> Result<DMatrix<f64>> {
        let m = self.system_matrix(lambda);
        let sigma = self.min_singular_value(lambda);
        if sigma <= SINGULAR_TOL {
            return Err(Error::SingularSystem(sigma));
        }
        m.lu()
            .solve(&self.a_ib)
            .ok_or(Error::SingularSystem(sigma))
    }

    pub fn params(&self) -> &Params {
        &self.params
    }
}

/// Graphs `G_m` and `G_{m+1}` with everything needed to move functions
/// between them.
#[derive(Debug, Clone)]
pub struct LevelPair {
    pub coarse: VicsekGraph,
    pub fine: VicsekGraph,
    /// Fine index of each coarse vertex.
    pub embed: Vec<usize>,
    template: CellTemplate,
    decimation: Decimation,
    exec: Exec,
}

/// Outcome of [`restrict_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictReport {
    pub lambda: f64,
    /// `R(lambda)`.
    pub eigenvalue: f64,
    /// Relative residual of the restriction on `G_m`.
    pub residual: f64,
    pub passed: bool,
    pub values: Vec<f64>,
}

impl LevelPair {
    pub fn new(params: &Params, m: u32, capacity: Capacity, exec: Exec) -> Result<Self> {
        let coarse = VicsekGraph::build(params, m, capacity, exec)?;
        let fine = VicsekGraph::build(params, m + 1, capacity, exec)?;
        let embed = fine.embed_coarse(&coarse);
        Ok(LevelPair {
            coarse,
            fine,
            embed,
            template: CellTemplate::new(params)?,
            decimation: Decimation::new(*params)?.with_exec(exec),
            exec,
        })
    }

    pub fn params(&self) -> &Params {
        self.coarse.params()
    }

    pub fn template(&self) -> &CellTemplate {
        &self.template
    }

    pub fn decimation(&self) -> &Decimation {
        &self.decimation
    }

    /// Extends an eigenfunction of `G_m` with eigenvalue `R(lambda)` to one
    /// of `G_{m+1}` with eigenvalue `lambda`.
    pub fn extend(&self, f_m: &[f64], lambda: f64, mode: Mode) -> Result<EigenFunction> {
        if self.decimation.is_forbidden(lambda) {
            return Err(Error::ForbiddenEigenvalue(lambda));
        }
        let distance = self.decimation.forbidden().distance(lambda);
        if distance < NEAR_FORBIDDEN {
            return Err(Error::NearForbidden { lambda, distance });
        }
        let mu = self.decimation.eval_r(lambda);
        let input = relative_residual(&self.coarse, f_m, mu, mode)?;
        if input > INPUT_TOL {
            return Err(Error::NotEigenfunction { residual: input });
        }
        let h = self.template.solve_operator(lambda)?;
        let k = self.params().cell_count();
        let corners = self.params().corners();

        let blocks: Vec<Vec<(usize, f64)>> = self.exec.map_range(self.coarse.cell_total(), |c| {
            let g: Vec<f64> = self.coarse.cell_corners(c).iter().map(|&v| f_m[v]).collect();
            self.template
                .interior
                .iter()
                .enumerate()
                .map(|(r, &(a, i))| {
                    let v = self.fine.cell_corners(c * k + a)[i];
                    let x: f64 = (0..corners).map(|b| h[(r, b)] * g[b]).sum();
                    (v, x)
                })
                .collect()
        });
        let mut values = vec![0.0; self.fine.vertex_count()];
        for (v, &e) in self.embed.iter().enumerate() {
            values[e] = f_m[v];
        }
        for (v, x) in blocks.into_iter().flatten() {
            values[v] = x;
        }
        Ok(EigenFunction {
            level: self.fine.level(),
            lambda,
            values,
        })
    }

    /// Restricts an eigenfunction of `G_{m+1}` to `V_m` and measures how well
    /// it satisfies the level-`m` equation with eigenvalue `R(lambda)`.
    pub fn restrict_check(&self, f: &[f64], lambda: f64, mode: Mode) -> Result<RestrictReport> {
        if (lambda - self.params().top_value()).abs() <= TOP_TOL {
            return Err(Error::TopValueExcluded);
        }
        let input = relative_residual(&self.fine, f, lambda, mode)?;
        if input > INPUT_TOL {
            return Err(Error::NotEigenfunction { residual: input });
        }
        let values: Vec<f64> = self.embed.iter().map(|&e| f[e]).collect();
        let eigenvalue = self.decimation.eval_r(lambda);
        let scale = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let raw = self.coarse.residual(&values, eigenvalue, mode)?;
        let residual = if scale > 0.0 { raw / scale } else { raw };
        Ok(RestrictReport {
            lambda,
            eigenvalue,
            residual,
            passed: residual <= RESTRICT_TOL,
            values,
        })
    }

    /// Arm and side values of `f` (on `G_{m+1}`) inside the `m`-cell `c`.
    pub fn cell_trace(&self, f: &[f64], c: usize, lambda: f64) -> CellTrace {
        let p = *self.params();
        let n = p.n() as usize;
        let k = p.cell_count();
        let t = p.t_of(lambda);
        let mut j_vals = vec![vec![0.0; n + 1]; p.corners()];
        let mut l_vals = BTreeMap::new();
        for i in 1..=p.corners() {
            for j in 1..=n {
                let a = Letter::from_pair(&p, i, j).expect("valid pair").index(&p);
                let sub = self.fine.cell_corners(c * k + a);
                j_vals[i - 1][j - 1] = f[sub[i - 1]];
                if j < n {
                    for kk in 1..=p.corners() {
                        if kk != i && kk != opposite(&p, i) {
                            l_vals.insert((i, j, kk), f[sub[kk - 1]]);
                        }
                    }
                }
            }
            j_vals[i - 1][n] = 2.0 * t * j_vals[i - 1][n - 1] - j_vals[i - 1][n - 2];
        }
        CellTrace {
            params: p,
            t,
            j: j_vals,
            l: l_vals,
        }
    }
}

pub fn extend_eigenfunction(pair: &LevelPair, f_m: &[f64], lambda: f64, mode: Mode) -> Result<EigenFunction> {
    pair.extend(f_m, lambda, mode)
}

pub fn restrict_check(pair: &LevelPair, f: &[f64], lambda: f64, mode: Mode) -> Result<RestrictReport> {
    pair.restrict_check(f, lambda, mode)
}

/// `J_{i,j}` from `J_{i,1}` and `J_{i,2}` by `J_{i,j} = 2t J_{i,j-1} - J_{i,j-2}`.
pub fn arm_propagate(t: f64, j1: f64, j2: f64, j: usize) -> f64 {
    assert!(j >= 1, "arm positions start at 1");
    match j {
        1 => j1,
        2 => j2,
        _ => {
            let (mut prev, mut cur) = (j1, j2);
            for _ in 3..=j {
                let next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `P_{j-1}(t) J_1 + Q_{j-1}(t) J_2`.
pub fn arm_closed_form(t: f64, j1: f64, j2: f64, j: usize) -> f64 {
    let (p, q) = eval_pq(j - 1, t);
    p * j1 + q * j2
}

/// Common value `(J_left + J_right) / (1 + t)` of the side vertices between
/// two consecutive arm vertices.
pub fn side_values(t: f64, j_left: f64, j_right: f64) -> Result<f64> {
    if (1.0 + t).abs() <= TOP_TOL {
        return Err(Error::TopValueExcluded);
    }
    Ok((j_left + j_right) / (1.0 + t))
}

/// Values of an eigenfunction inside one `m`-cell `K_w`:
/// `J_{i,j} = f(F_w p_{i,j})` for `j <= n` plus the ghost `J_{i,n+1}`, and
/// `L_{i,j,k} = f(F_w F_{i,j} q_k)` for `j < n`, `k` not `i` or its opposite.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTrace {
    pub params: Params,
    pub t: f64,
    /// `j[i-1][j-1]`, `j` up to `n + 1`.
    pub j: Vec<Vec<f64>>,
    pub l: BTreeMap<(usize, usize, usize), f64>,
}

impl CellTrace {
    pub fn jv(&self, i: usize, j: usize) -> f64 {
        self.j[i - 1][j - 1]
    }

    /// Residual of `sum_{i' != i} J_{i',n} = (t+N)/(t+1) J_{i,n+1} + (N-1)/(t+1) J_{i,n}`.
    pub fn center_sum_residual(&self, i: usize) -> f64 {
        let n = self.params.n() as usize;
        let big_n = self.params.big_n() as f64;
        let t = self.t;
        let lhs: f64 = (1..=self.params.corners())
            .filter(|&k| k != i)
            .map(|k| self.jv(k, n))
            .sum();
        lhs - (t + big_n) / (t + 1.0) * self.jv(i, n + 1) - (big_n - 1.0) / (t + 1.0) * self.jv(i, n)
    }

    /// Residual of `sum_{i != 1} J_{i,n+1} = (Nt-t)/(t+1) J_{1,n+1} + (Nt+1)/(t+1) J_{1,n}`.
    pub fn ghost_sum_residual(&self) -> f64 {
        let n = self.params.n() as usize;
        let big_n = self.params.big_n() as f64;
        let t = self.t;
        let lhs: f64 = (2..=self.params.corners()).map(|k| self.jv(k, n + 1)).sum();
        lhs - (big_n * t - t) / (t + 1.0) * self.jv(1, n + 1)
            - (big_n * t + 1.0) / (t + 1.0) * self.jv(1, n)
    }

    /// Largest deviation of the side values from [`side_values`].
    pub fn side_residual(&self) -> f64 {
        self.l
            .iter()
            .map(|(&(i, j, _), &v)| {
                let want = side_values(self.t, self.jv(i, j), self.jv(i, j + 1)).unwrap_or(f64::NAN);
                (v - want).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the arm values from [`arm_propagate`].
    pub fn arm_residual(&self) -> f64 {
        let n = self.params.n() as usize;
        let mut worst: f64 = 0.0;
        for i in 1..=self.params.corners() {
            for j in 1..=n + 1 {
                let want = arm_propagate(self.t, self.jv(i, 1), self.jv(i, 2), j);
                worst = worst.max((self.jv(i, j) - want).abs());
            }
        }
        worst
    }
}
