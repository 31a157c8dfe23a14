//! Dense symmetric eigensolver and multiplicity clustering, used as an
//! independent check on the decimation spectra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::graph::{Mode, VicsekGraph};
use crate::{Error, Result};

/// Default clustering tolerance.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Largest asymmetry `max |M - M^T|` accepted.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSpectrum {
    pub values: Vec<f64>,
    pub dimension: usize,
}

/// Eigenpairs, ascending by value; `vectors` has the eigenvector of
/// `values[k]` in column `k`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Largest `||M v - lambda v||` over the returned pairs.
    pub fn max_residual(&self, matrix: &DMatrix<f64>) -> f64 {
        (0..self.values.len())
            .map(|k| {
                let v = self.vectors.column(k);
                (matrix * v - v * self.values[k]).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }
}

fn check_symmetric(matrix: &DMatrix<f64>) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::NotSymmetric(f64::INFINITY));
    }
    let asym = (matrix - matrix.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

pub fn dense_spectrum(matrix: &DMatrix<f64>) -> Result<DenseSpectrum> {
    check_symmetric(matrix)?;
    let mut values: Vec<f64> = matrix.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(DenseSpectrum {
        dimension: values.len(),
        values,
    })
}

pub fn dense_eigen(matrix: &DMatrix<f64>) -> Result<EigenDecomposition> {
    check_symmetric(matrix)?;
    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok(EigenDecomposition { values, vectors })
}

/// Spectrum of `-Delta_m` on `graph` under `mode`.
pub fn graph_spectrum(graph: &VicsekGraph, mode: Mode) -> Result<DenseSpectrum> {
    let (m, _) = graph.operator_matrix(mode)?;
    dense_spectrum(&m)
}

/// Turns an eigenvector of the symmetrized matrix back into a function on
/// the vertices (`f = D^{-1/2} v`), zero off the rows.
pub fn eigenfunction_values(graph: &VicsekGraph, rows: &[usize], v: &DVector<f64>) -> Vec<f64> {
    let mut f = vec![0.0; graph.vertex_count()];
    for (r, &x) in rows.iter().enumerate() {
        f[x] = v[r] / (graph.degree(x) as f64).sqrt();
    }
    f
}

/// Merges runs of consecutive values closer than `tol`; each cluster is
/// represented by its mean.
pub fn cluster_multiplicities(values: &[f64], tol: f64) -> Vec<(f64, u64)> {
    let mut clusters: Vec<(f64, u64)> = Vec::new();
    let mut last = f64::NAN;
    let mut sum = 0.0;
    for &x in values {
        match clusters.last_mut() {
            Some(c) if x - last <= tol => {
                c.1 += 1;
                sum += x;
                c.0 = sum / c.1 as f64;
            }
            _ => {
                clusters.push((x, 1));
                sum = x;
            }
        }
        last = x;
    }
    clusters
}

/// Clusters together with the gap diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub clusters: Vec<(f64, u64)>,
    pub tol: f64,
    /// Smallest distance between the last member of one cluster and the first
    /// of the next.
    pub min_gap: f64,
    /// Whether `min_gap > 10 tol`.
    pub gap_ok: bool,
}

pub fn cluster_report(values: &[f64], tol: f64) -> ClusterReport {
    let clusters = cluster_multiplicities(values, tol);
    let min_gap = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > tol)
        .fold(f64::INFINITY, f64::min);
    if min_gap <= 10.0 * tol {
        log::warn!("cluster gap {min_gap:e} is within 10x the tolerance {tol:e}");
    }
    ClusterReport {
        clusters,
        tol,
        min_gap,
        gap_ok: min_gap > 10.0 * tol,
    }
}

/// Outcome of comparing a predicted spectrum with a clustered dense one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComparison {
    pub matches: bool,
    /// Largest value deviation between matched clusters, when the cluster
    /// counts agree.
    pub max_deviation: Option<f64>,
    pub predicted_total: u64,
    pub oracle_total: u64,
    /// First mismatching position, as `(predicted, oracle)`.
    pub first_mismatch: Option<((f64, u64), (f64, u64))>,
}

/// Values must agree to `value_tol` and multiplicities exactly.
pub fn compare_spectra(
    predicted: &[(f64, u64)],
    oracle: &[(f64, u64)],
    value_tol: f64,
) -> SpectrumComparison {
    let total = |s: &[(f64, u64)]| s.iter().map(|e| e.1).sum();
    let mut first_mismatch = None;
    let mut dev: f64 = 0.0;
    for (p, o) in predicted.iter().zip(oracle) {
        dev = dev.max((p.0 - o.0).abs());
        if first_mismatch.is_none() && ((p.0 - o.0).abs() > value_tol || p.1 != o.1) {
            first_mismatch = Some((*p, *o));
        }
    }
    let same_len = predicted.len() == oracle.len();
    if first_mismatch.is_none() && !same_len {
        let k = predicted.len().min(oracle.len());
        let pad = (f64::NAN, 0);
        first_mismatch = Some((
            predicted.get(k).copied().unwrap_or(pad),
            oracle.get(k).copied().unwrap_or(pad),
        ));
    }
    SpectrumComparison {
        matches: same_len && first_mismatch.is_none(),
        max_deviation: same_len.then_some(dev),
        predicted_total: total(predicted),
        oracle_total: total(oracle),
        first_mismatch,
    }
}
