//! Serializable output records and their text forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use vicsek::decim::Spectrum;
use vicsek::eigoracle::SpectrumComparison;
use vicsek::graph::{Mode, VicsekGraph};
use vicsek::lattice::{BlowupTree, IsoDecision, OmegaSeq};
use vicsek::rational;
use vicsek::suite::SuiteReport;
use vicsek::{Error, Params};

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.14e}").parse().expect("formatted float")
}

pub fn fmt_float(x: f64) -> String {
    round15(x).to_string()
}

pub fn print_json<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    println!("{text}");
}

#[derive(Serialize)]
pub struct EntryOut {
    pub value: f64,
    pub exact: Option<String>,
    pub multiplicity: u64,
    pub seed: Option<String>,
    pub word: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonOut {
    pub matches: bool,
    pub max_deviation: Option<f64>,
    pub multiplicities_equal: bool,
    pub predicted_total: u64,
    pub oracle_total: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumOut {
    pub d: u32,
    pub n: u32,
    pub m: u32,
    pub mode: String,
    pub method: String,
    pub total_multiplicity: u64,
    pub entries: Vec<EntryOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense: Option<Vec<EntryOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonOut>,
}

fn dense_entries(clusters: &[(f64, u64)]) -> Vec<EntryOut> {
    clusters
        .iter()
        .map(|&(v, k)| EntryOut {
            value: round15(v),
            exact: None,
            multiplicity: k,
            seed: None,
            word: None,
        })
        .collect()
}

impl SpectrumOut {
    pub fn new(
        p: &Params,
        m: u32,
        mode: Mode,
        method: &str,
        decimated: Option<&Spectrum>,
        dense: Option<&[(f64, u64)]>,
        comparison: Option<SpectrumComparison>,
    ) -> Self {
        let decimated_entries = decimated.map(|s| {
            s.entries()
                .iter()
                .map(|e| EntryOut {
                    value: round15(e.value),
                    exact: e.exact.as_ref().map(rational::format),
                    multiplicity: e.multiplicity,
                    seed: Some(e.genealogy.seed.to_string()),
                    word: Some(e.genealogy.word_string()),
                })
                .collect::<Vec<_>>()
        });
        let (entries, dense) = match decimated_entries {
            Some(e) => (e, dense.map(dense_entries)),
            None => (dense_entries(dense.unwrap_or_default()), None),
        };
        let comparison = comparison.map(|c| ComparisonOut {
            matches: c.matches,
            max_deviation: c.max_deviation.map(round15),
            multiplicities_equal: c.max_deviation.is_some()
                && decimated.zip(dense.as_ref()).is_some_and(|(s, d)| {
                    s.entries().iter().zip(d).all(|(a, b)| a.multiplicity == b.multiplicity)
                }),
            predicted_total: c.predicted_total,
            oracle_total: c.oracle_total,
        });
        SpectrumOut {
            d: p.d(),
            n: p.n(),
            m,
            mode: mode.to_string(),
            method: method.to_string(),
            total_multiplicity: entries.iter().map(|e| e.multiplicity).sum(),
            entries,
            dense,
            comparison,
        }
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("value,multiplicity,seed,word\n");
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                e.value,
                e.multiplicity,
                e.seed.as_deref().unwrap_or(""),
                e.word.as_deref().unwrap_or("")
            );
        }
        s
    }
}

#[derive(Serialize)]
pub struct CheckOut {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

#[derive(Serialize)]
pub struct SuiteOut {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<CheckOut>,
}

#[derive(Serialize)]
pub struct VerifyOut {
    pub passed: bool,
    pub suites: Vec<SuiteOut>,
}

impl VerifyOut {
    pub fn new(reports: &[SuiteReport]) -> Self {
        let suites: Vec<SuiteOut> = reports
            .iter()
            .map(|r| SuiteOut {
                suite: r.suite.to_string(),
                passed: r.passed(),
                seconds: (r.seconds * 1000.0).round() / 1000.0,
                checks: r
                    .checks
                    .iter()
                    .map(|c| CheckOut {
                        suite: c.suite.to_string(),
                        name: c.name.clone(),
                        passed: c.passed,
                        value: c.value.filter(|x| x.is_finite()).map(round15),
                        threshold: c.threshold,
                        detail: c.detail.clone(),
                    })
                    .collect(),
            })
            .collect();
        VerifyOut {
            passed: suites.iter().all(|s| s.passed),
            suites,
        }
    }
}

pub fn verify_text(reports: &[SuiteReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(s, "== {} ({:.2} s)", r.suite, r.seconds);
        for c in &r.checks {
            let _ = write!(s, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
            match (c.value, c.threshold) {
                (Some(v), Some(t)) => {
                    let _ = write!(s, "  [{v:.3e} <= {t:.0e}]");
                }
                (Some(v), None) => {
                    let _ = write!(s, "  [{}]", fmt_float(v));
                }
                _ => {}
            }
            if !c.detail.is_empty() {
                let _ = write!(s, "  {}", c.detail);
            }
            s.push('\n');
        }
    }
    let failed: usize = reports.iter().map(|r| r.checks.iter().filter(|c| !c.passed).count()).sum();
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let _ = writeln!(s, "{} of {total} checks passed", total - failed);
    s
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtendOut {
    pub d: u32,
    pub n: u32,
    pub m: u32,
    pub mode: String,
    pub parent_eigenvalue: f64,
    pub branch: usize,
    pub lambda: f64,
    pub extension_residual: f64,
    pub restriction_residual: f64,
    pub restricted_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphOut {
    pub d: u32,
    pub n: u32,
    pub m: u32,
    pub vertices: usize,
    pub edges: usize,
    pub expected_vertices: String,
    pub expected_edges: String,
    pub degree_counts: BTreeMap<u32, usize>,
    pub connected: bool,
    pub boundary: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_list: Option<Vec<(usize, usize)>>,
}

fn coords_i64(c: &[i128]) -> Vec<i64> {
    c.iter().map(|&x| i64::try_from(x).expect("coordinates within the capacity policy")).collect()
}

impl GraphOut {
    pub fn new(p: &Params, g: &VicsekGraph, full: bool) -> Self {
        let mut degree_counts = BTreeMap::new();
        for &k in g.degrees() {
            *degree_counts.entry(k).or_insert(0) += 1;
        }
        let m = g.level();
        GraphOut {
            d: p.d(),
            n: p.n(),
            m,
            vertices: g.vertex_count(),
            edges: g.edges().len(),
            expected_vertices: p.vertex_count(m).map_or("overflow".into(), |v| v.to_string()),
            expected_edges: p.edge_count(m).map_or("overflow".into(), |v| v.to_string()),
            degree_counts,
            connected: g.is_connected(),
            boundary: g.boundary_vertices(),
            coords: full.then(|| (0..g.vertex_count()).map(|v| coords_i64(g.coords(v))).collect()),
            edge_list: full.then(|| g.edges().to_vec()),
        }
    }
}

pub fn edge_csv(edges: &[(usize, usize)]) -> String {
    let mut s = String::from("u,v\n");
    for (a, b) in edges {
        let _ = writeln!(s, "{a},{b}");
    }
    s
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Inconclusive {
    pub bound: usize,
    pub minimal_witness: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IsoOut {
    pub isomorphic: Option<bool>,
    #[serde(rename = "witnessM")]
    pub witness_m: Option<usize>,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<Inconclusive>,
}

impl IsoOut {
    pub fn from_result(method: &str, r: &Result<IsoDecision, Error>) -> Self {
        match r {
            Ok(d) => IsoOut {
                isomorphic: Some(d.isomorphic),
                witness_m: d.witness,
                method: method.into(),
                inconclusive: None,
            },
            Err(Error::InconclusiveBound { bound, witness }) => IsoOut {
                isomorphic: None,
                witness_m: None,
                method: method.into(),
                inconclusive: Some(Inconclusive {
                    bound: *bound,
                    minimal_witness: *witness,
                }),
            },
            Err(_) => IsoOut {
                isomorphic: None,
                witness_m: None,
                method: method.into(),
                inconclusive: None,
            },
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeOut {
    pub d: u32,
    pub n: u32,
    pub omega: String,
    pub horizon: usize,
    pub scale: i64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub is_tree: bool,
    pub centers: Vec<usize>,
    pub coords: Vec<Vec<i64>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeOut {
    pub fn new(p: &Params, w: &OmegaSeq, t: &BlowupTree) -> Self {
        TreeOut {
            d: p.d(),
            n: p.n(),
            omega: w.to_string(),
            horizon: t.horizon(),
            scale: i64::try_from(t.scale()).expect("scale within the capacity policy"),
            vertex_count: t.vertex_count(),
            edge_count: t.edges().len(),
            is_tree: t.is_tree(),
            centers: t.centers().to_vec(),
            coords: (0..t.vertex_count()).map(|v| coords_i64(t.coords(v))).collect(),
            edges: t.edges().to_vec(),
        }
    }
}

#[derive(Serialize)]
pub struct GammaOut {
    pub d: u32,
    pub n: u32,
    pub omega: String,
    pub base: usize,
    pub horizon: usize,
    pub size: usize,
    pub distances: Vec<Vec<u64>>,
}

impl GammaOut {
    pub fn csv(&self) -> String {
        let mut s = String::from("k,l,distance\n");
        for (a, row) in self.distances.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                let _ = writeln!(s, "{},{},{x}", a + self.base, b + self.base);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round15(1.0 / 3.0).to_string(), "0.333333333333333");
        assert_eq!(round15(-0.0).to_string(), "0");
        assert_eq!(round15(4.0 / 3.0), 1.33333333333333);
        assert_eq!(fmt_float(0.5), "0.5");
    }
}
