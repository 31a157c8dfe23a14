//! Property suites behind the `verify` command.
//!
//! Each suite returns a list of [`Check`]s; a suite passes when every check
//! does.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cheb::eval_u;
use crate::decim::{eval_a, eval_s, scaled_a, scaled_s, Decimation};
use crate::eigmap::{relative_residual, CellTemplate, LevelPair};
use crate::eigoracle::{cluster_multiplicities, compare_spectra, dense_eigen, eigenfunction_values, graph_spectrum};
use crate::graph::{Capacity, Letter, Mode, VicsekGraph};
use crate::lattice::{gamma_oracle_iso, iso_decide_periodic, thm56_check, CellTreeMetric, IsoDecision, OmegaSeq};
use crate::{Error, Exec, Params, Result};

/// `(d, n)` pairs for the polynomial identities and the forbidden set.
pub const IDENTITY_GRID: [(u32, u32); 6] = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2)];

/// `(d, n, m)` configurations compared against the dense solver.
pub const SPECTRA_CONFIGS: [(u32, u32, u32); 7] =
    [(2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 3, 1), (2, 3, 2), (3, 2, 1), (3, 2, 2)];

pub const EIGENMAP_GRID: [(u32, u32); 2] = [(2, 2), (2, 3)];

pub const LATTICE_GRID: [(u32, u32); 3] = [(2, 2), (2, 3), (3, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Identities,
    Spectra,
    Eigenmaps,
    Lattice,
    All,
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteName::Identities => "identities",
            SuiteName::Spectra => "spectra",
            SuiteName::Eigenmaps => "eigenmaps",
            SuiteName::Lattice => "lattice",
            SuiteName::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    /// Restricts the suites to one `(d, n)`; `None` runs the default grids.
    pub params: Option<Params>,
    pub samples: usize,
    pub seed: u64,
    pub cluster_tol: f64,
    pub value_tol: f64,
    pub residual_tol: f64,
    pub pairs: usize,
    pub horizon: usize,
    pub exec: Exec,
    pub capacity: Capacity,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            params: None,
            samples: 10_000,
            seed: 0x5eed,
            cluster_tol: crate::eigoracle::CLUSTER_TOL,
            value_tol: 1e-8,
            residual_tol: 1e-8,
            pairs: 200,
            horizon: 8,
            exec: Exec::default(),
            capacity: Capacity::default(),
        }
    }
}

/// One named check with its measured value and threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: SuiteName,
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Check {
    fn bound(suite: SuiteName, name: String, value: f64, threshold: f64) -> Self {
        Check {
            suite,
            name,
            passed: value <= threshold,
            value: Some(value),
            threshold: Some(threshold),
            detail: String::new(),
        }
    }

    fn flag(suite: SuiteName, name: String, passed: bool, detail: String) -> Self {
        Check {
            suite,
            name,
            passed,
            value: None,
            threshold: None,
            detail,
        }
    }

    fn failed(suite: SuiteName, name: String, err: &Error) -> Self {
        Check::flag(suite, name, false, err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn grid(cfg: &SuiteConfig, default: &[(u32, u32)]) -> Vec<Params> {
    match cfg.params {
        Some(p) => vec![p],
        None => default.iter().map(|&(d, n)| Params::new(d, n).expect("valid grid")).collect(),
    }
}

pub fn run(suite: SuiteName, cfg: &SuiteConfig) -> Vec<SuiteReport> {
    let timed = |name: SuiteName, f: fn(&SuiteConfig) -> Vec<Check>| {
        let start = Instant::now();
        let checks = f(cfg);
        SuiteReport {
            suite: name,
            checks,
            seconds: start.elapsed().as_secs_f64(),
        }
    };
    let all = [
        (SuiteName::Identities, identities as fn(&SuiteConfig) -> Vec<Check>),
        (SuiteName::Spectra, spectra),
        (SuiteName::Eigenmaps, eigenmaps),
        (SuiteName::Lattice, lattice),
    ];
    all.into_iter()
        .filter(|(name, _)| suite == SuiteName::All || suite == *name)
        .map(|(name, f)| timed(name, f))
        .collect()
}

/// Largest relative residuals of the two factorizations of `R` over
/// `samples` uniform points of `[0, 2^d/(2^d-1)]`.
pub fn factorization_residuals(params: &Params, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n() as usize;
    let big_n = params.big_n() as f64;
    let corners = params.corners() as f64;
    let (mut ra, mut rb) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let lambda = rng.random_range(0.0..=params.top_value());
        let t = params.t_of(lambda);
        let (u1, u2) = (eval_u(n - 1, t), eval_u(n - 2, t));
        let r = crate::decim::eval_r(params, lambda);
        let a = lambda * eval_a(params, lambda) * (u1 + big_n * u2);
        ra = ra.max((r - a).abs() / (1.0 + r.abs()));
        let b = eval_s(params, lambda) * (u2 - u1);
        rb = rb.max((big_n * r - corners - b).abs() / (1.0 + (big_n * r).abs()));
    }
    (ra, rb)
}

pub fn identities(cfg: &SuiteConfig) -> Vec<Check> {
    const S: SuiteName = SuiteName::Identities;
    let mut out = Vec::new();
    for p in grid(cfg, &IDENTITY_GRID) {
        let tag = format!("({},{})", p.d(), p.n());
        let r = crate::decim::r_coeffs(&p);
        let degree_ok = r.degree() == Some(2 * p.n() as usize - 1);
        let zero_const = r.coeffs().first().is_some_and(|c| *c == 0.into());
        out.push(Check::flag(
            S,
            format!("{tag} R has degree 2n-1 and vanishes at 0"),
            degree_ok && zero_const,
            String::new(),
        ));
        let (ra, rb) = factorization_residuals(&p, cfg.samples, cfg.seed);
        out.push(Check::bound(S, format!("{tag} R = lambda A (U_(n-1) + N U_(n-2))"), ra, 1e-9));
        out.push(Check::bound(S, format!("{tag} N R - 2^d = S (U_(n-2) - U_(n-1))"), rb, 1e-9));

        let dec = match Decimation::new(p).map(|d| d.with_exec(cfg.exec)) {
            Ok(d) => d,
            Err(e) => {
                out.push(Check::failed(S, format!("{tag} forbidden set"), &e));
                continue;
            }
        };
        let f = dec.forbidden();
        let mut distinct = f.values();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out.push(Check::flag(
            S,
            format!("{tag} forbidden set has 2n distinct values"),
            f.len() == 2 * p.n() as usize && distinct.len() == f.len(),
            format!("{} values", f.len()),
        ));
        let vanish = f
            .alphas
            .iter()
            .map(|&x| scaled_s(&p, x).abs())
            .chain(f.betas.iter().map(|&x| scaled_a(&p, x).abs()))
            .fold(0.0, f64::max);
        out.push(Check::bound(S, format!("{tag} S and A vanish on the forbidden set"), vanish, 1e-10));

        let top = p.top_value();
        let mut branch = 0.0f64;
        let mut count_ok = true;
        for k in 0..=99 {
            let target = top * k as f64 / 99.0;
            match dec.inverse_branches(target) {
                Ok(psi) => {
                    count_ok &= psi.len() == 2 * p.n() as usize - 1;
                    for x in psi {
                        branch = branch.max((dec.eval_r(x) - target).abs());
                    }
                }
                Err(_) => count_ok = false,
            }
        }
        out.push(Check::bound(
            S,
            format!("{tag} R(psi_l(x)) = x on a 100-point grid"),
            if count_ok { branch } else { f64::INFINITY },
            1e-10,
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1);
        let mut hits = 0;
        let trials = cfg.samples.clamp(1, 200);
        for _ in 0..trials {
            let x = rng.random_range(1e-9..top - 1e-9);
            if let Ok(psi) = dec.inverse_branches(x) {
                hits += psi.iter().filter(|&&y| dec.is_forbidden(y)).count();
            }
        }
        out.push(Check::flag(
            S,
            format!("{tag} preimages of interior points avoid the forbidden set"),
            hits == 0,
            format!("{trials} samples, {hits} hits"),
        ));
    }
    out
}

/// Decimation versus dense comparison for one configuration and mode.
pub fn spectrum_checks(p: &Params, m: u32, mode: Mode, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const S: SuiteName = SuiteName::Spectra;
    let tag = format!("({},{},{}) {mode}", p.d(), p.n(), m);
    let dec = Decimation::new(*p)?.with_exec(cfg.exec);
    let spec = match mode {
        Mode::Neumann => dec.neumann_spectrum(m)?,
        Mode::Dirichlet => dec.dirichlet_spectrum(m)?,
    };
    let g = VicsekGraph::build(p, m, cfg.capacity, cfg.exec)?;
    let dense = if mode == Mode::Dirichlet && m == 0 {
        Vec::new()
    } else {
        graph_spectrum(&g, mode)?.values
    };
    let clusters = cluster_multiplicities(&dense, cfg.cluster_tol);
    let cmp = compare_spectra(&spec.pairs(), &clusters, cfg.value_tol);
    let mut out = vec![Check {
        suite: S,
        name: format!("{tag} decimation matches dense"),
        passed: cmp.matches,
        value: cmp.max_deviation,
        threshold: Some(cfg.value_tol),
        detail: match cmp.first_mismatch {
            Some((a, b)) => format!("first mismatch {a:?} vs {b:?}"),
            None => format!("{} distinct values", spec.len()),
        },
    }];
    let expected = match mode {
        Mode::Neumann => p.vertex_count(m),
        Mode::Dirichlet => p.interior_count(m),
    }
    .ok_or_else(|| Error::InvalidRange("vertex count overflows".into()))?;
    out.push(Check::flag(
        S,
        format!("{tag} total multiplicity"),
        spec.total_multiplicity() as u128 == expected,
        format!("{} vs {expected}", spec.total_multiplicity()),
    ));
    let trace = spec.trace();
    let rel = if expected == 0 {
        trace.abs()
    } else {
        (trace - expected as f64).abs() / expected as f64
    };
    out.push(Check::bound(S, format!("{tag} trace"), rel, 1e-6));
    Ok(out)
}

pub fn spectra(cfg: &SuiteConfig) -> Vec<Check> {
    let configs: Vec<(Params, u32)> = match cfg.params {
        None => SPECTRA_CONFIGS
            .iter()
            .map(|&(d, n, m)| (Params::new(d, n).expect("valid"), m))
            .collect(),
        Some(p) => (0..=3)
            .take_while(|&m| m <= 1 || p.vertex_count(m).is_some_and(|v| v <= 2500))
            .map(|m| (p, m))
            .collect(),
    };
    let mut out = Vec::new();
    for (p, m) in configs {
        for mode in [Mode::Neumann, Mode::Dirichlet] {
            match spectrum_checks(&p, m, mode, cfg) {
                Ok(c) => out.extend(c),
                Err(e) => out.push(Check::failed(
                    SuiteName::Spectra,
                    format!("({},{},{}) {mode}", p.d(), p.n(), m),
                    &e,
                )),
            }
        }
    }
    out
}

/// Round trip statistics for [`roundtrip`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub extended: usize,
    pub rejected_forbidden: usize,
    pub max_extension_residual: f64,
    pub max_restriction_residual: f64,
    pub max_value_error: f64,
}

/// Extends one eigenfunction of each level-`m` eigenvalue through every
/// preimage branch, then restricts back.
pub fn roundtrip(p: &Params, m: u32, mode: Mode, cfg: &SuiteConfig) -> Result<RoundTrip> {
    let lp = LevelPair::new(p, m, cfg.capacity, cfg.exec)?;
    let mut stats = RoundTrip::default();
    if mode == Mode::Dirichlet && m == 0 {
        return Ok(stats);
    }
    let (mat, rows) = lp.coarse.operator_matrix(mode)?;
    let eig = dense_eigen(&mat)?;
    let mut start = 0;
    for (mu, mult) in cluster_multiplicities(&eig.values, cfg.cluster_tol) {
        let f = eigenfunction_values(&lp.coarse, &rows, &eig.vector(start));
        start += mult as usize;
        let mu = mu.clamp(0.0, p.top_value());
        for lambda in lp.decimation().inverse_branches(mu)? {
            match lp.extend(&f, lambda, mode) {
                Ok(ext) => {
                    let res = relative_residual(&lp.fine, &ext.values, lambda, mode)?;
                    stats.max_extension_residual = stats.max_extension_residual.max(res);
                    let back = lp.restrict_check(&ext.values, lambda, mode)?;
                    stats.max_restriction_residual = stats.max_restriction_residual.max(back.residual);
                    stats.max_value_error = stats.max_value_error.max((back.eigenvalue - mu).abs());
                    stats.extended += 1;
                }
                Err(Error::ForbiddenEigenvalue(_)) | Err(Error::NearForbidden { .. }) => {
                    stats.rejected_forbidden += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(stats)
}

/// Extension at each forbidden value must fail with `ForbiddenEigenvalue`,
/// and the local system must be singular exactly there.
pub fn forbidden_extension_checks(p: &Params, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const S: SuiteName = SuiteName::Eigenmaps;
    let tag = format!("({},{})", p.d(), p.n());
    let lp = LevelPair::new(p, 0, cfg.capacity, cfg.exec)?;
    let ones = vec![1.0; lp.coarse.vertex_count()];
    let forbidden = lp.decimation().forbidden().values();
    let raised = forbidden
        .iter()
        .filter(|&&x| matches!(lp.extend(&ones, x, Mode::Neumann), Err(Error::ForbiddenEigenvalue(_))))
        .count();
    let tpl = CellTemplate::new(p)?;
    let at = forbidden.iter().map(|&x| tpl.min_singular_value(x)).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x2);
    let mut away = f64::INFINITY;
    let mut taken = 0;
    while taken < 50 {
        let x = rng.random_range(0.0..p.top_value());
        if lp.decimation().forbidden().distance(x) < 1e-3 {
            continue;
        }
        away = away.min(tpl.min_singular_value(x));
        taken += 1;
    }
    Ok(vec![
        Check::flag(
            S,
            format!("{tag} extension rejects every forbidden value"),
            raised == forbidden.len(),
            format!("{raised} of {}", forbidden.len()),
        ),
        Check::bound(S, format!("{tag} local system singular at forbidden values"), at, 1e-8),
        Check {
            suite: S,
            name: format!("{tag} local system regular away from them"),
            passed: away > 1e-8,
            value: Some(away),
            threshold: None,
            detail: "smallest singular value over 50 samples, must exceed 1e-8".into(),
        },
    ])
}

pub fn eigenmaps(cfg: &SuiteConfig) -> Vec<Check> {
    const S: SuiteName = SuiteName::Eigenmaps;
    let mut out = Vec::new();
    for p in grid(cfg, &EIGENMAP_GRID) {
        for m in 0..=2 {
            if p.vertex_count(m + 1).is_none_or(|v| v > 20_000) || p.vertex_count(m).is_none_or(|v| v > 2500) {
                break;
            }
            for mode in [Mode::Neumann, Mode::Dirichlet] {
                if mode == Mode::Dirichlet && m == 0 {
                    continue;
                }
                let tag = format!("({},{},{}) {mode}", p.d(), p.n(), m);
                match roundtrip(&p, m, mode, cfg) {
                    Ok(rt) => {
                        let mut ext = Check::bound(
                            S,
                            format!("{tag} extension residual"),
                            rt.max_extension_residual,
                            cfg.residual_tol,
                        );
                        ext.passed &= rt.extended > 0;
                        ext.detail = format!("{} extended, {} forbidden", rt.extended, rt.rejected_forbidden);
                        out.push(ext);
                        out.push(Check::bound(
                            S,
                            format!("{tag} restriction residual"),
                            rt.max_restriction_residual,
                            crate::eigmap::RESTRICT_TOL,
                        ));
                        out.push(Check::bound(
                            S,
                            format!("{tag} restriction recovers R(lambda)"),
                            rt.max_value_error,
                            1e-7,
                        ));
                    }
                    Err(e) => out.push(Check::failed(S, tag, &e)),
                }
            }
        }
        match forbidden_extension_checks(&p, cfg) {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::failed(S, format!("({},{}) forbidden values", p.d(), p.n()), &e)),
        }
    }
    out
}

pub fn random_omega<R: Rng>(params: &Params, rng: &mut R, max_prefix: usize, max_cycle: usize) -> OmegaSeq {
    let k = params.cell_count();
    let plen = rng.random_range(0..=max_prefix);
    let clen = rng.random_range(1..=max_cycle.max(1));
    let mut letters: Vec<Letter> = (0..plen + clen)
        .map(|_| Letter::from_index(params, rng.random_range(0..k)))
        .collect();
    let cycle = letters.split_off(plen);
    OmegaSeq::new(params, letters, cycle).expect("letters drawn from the alphabet")
}

/// A random pair with a good share of isomorphic ones: the second sequence
/// is a corner relabeling of the first (possibly with one letter changed) or
/// independent.
pub fn random_omega_pair<R: Rng>(
    params: &Params,
    rng: &mut R,
    max_prefix: usize,
    max_cycle: usize,
) -> (OmegaSeq, OmegaSeq) {
    let w = random_omega(params, rng, max_prefix, max_cycle);
    if !rng.random_bool(0.6) {
        let wp = random_omega(params, rng, max_prefix, max_cycle);
        return (w, wp);
    }
    let mut perm: Vec<usize> = (1..=params.corners()).collect();
    for s in (1..perm.len()).rev() {
        perm.swap(s, rng.random_range(0..=s));
    }
    let relabel = |l: &Letter| match *l {
        Letter::Center => Letter::Center,
        Letter::Arm { i, j } => Letter::Arm { i: perm[i - 1], j },
    };
    let mut prefix: Vec<Letter> = w.prefix().iter().map(relabel).collect();
    let mut cycle: Vec<Letter> = w.cycle().iter().map(relabel).collect();
    if rng.random_bool(0.5) {
        let total = prefix.len() + cycle.len();
        let at = rng.random_range(0..total);
        let letter = Letter::from_index(params, rng.random_range(0..params.cell_count()));
        if at < prefix.len() {
            prefix[at] = letter;
        } else {
            cycle[at - prefix.len()] = letter;
        }
    }
    let wp = OmegaSeq::new(params, prefix, cycle).expect("letters drawn from the alphabet");
    (w, wp)
}

/// Agreement counts between the criterion and the oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub pairs: usize,
    pub agree: usize,
    pub isomorphic: usize,
}

pub fn lattice_agreement(p: &Params, pairs: usize, horizon: usize, seed: u64) -> Result<Agreement> {
    let metric = CellTreeMetric::new(p, horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Agreement {
        pairs,
        ..Agreement::default()
    };
    for _ in 0..pairs {
        let (w, wp) = random_omega_pair(p, &mut rng, 3, 3);
        let big_m = rng.random_range(1..=3usize).min(horizon.max(1));
        let t = thm56_check(p, &w, &wp, big_m, horizon);
        let g = gamma_oracle_iso(&metric, &w, &wp, big_m, horizon)?;
        out.agree += (t == g) as usize;
        out.isomorphic += t as usize;
    }
    Ok(out)
}

/// A pair of sequences with the expected decision.
#[derive(Debug, Clone, PartialEq)]
pub struct HandPair {
    pub name: &'static str,
    pub params: Params,
    pub omega: OmegaSeq,
    pub omega_prime: OmegaSeq,
    pub expected: IsoDecision,
}

pub fn hand_pairs() -> Vec<HandPair> {
    let p22 = Params::new(2, 2).expect("valid");
    let p23 = Params::new(2, 3).expect("valid");
    let parse = |p: &Params, s: &str| OmegaSeq::parse(p, s).expect("valid literal");
    vec![
        HandPair {
            name: "prefix-perturbed",
            params: p23,
            omega: parse(&p23, "(1,1)|(2,1)"),
            omega_prime: parse(&p23, "(1,2)|(2,1)"),
            expected: IsoDecision {
                isomorphic: true,
                witness: Some(2),
            },
        },
        HandPair {
            name: "j-mismatch",
            params: p23,
            omega: parse(&p23, "|(1,1)"),
            omega_prime: parse(&p23, "|(1,2)"),
            expected: IsoDecision {
                isomorphic: false,
                witness: None,
            },
        },
        HandPair {
            name: "opposite-corner chaining",
            params: p22,
            omega: parse(&p22, "|(1,1),(4,1)"),
            omega_prime: parse(&p22, "|(1,1),(2,1)"),
            expected: IsoDecision {
                isomorphic: false,
                witness: None,
            },
        },
    ]
}

pub fn lattice(cfg: &SuiteConfig) -> Vec<Check> {
    const S: SuiteName = SuiteName::Lattice;
    let mut out = Vec::new();
    for p in grid(cfg, &LATTICE_GRID) {
        let tag = format!("({},{})", p.d(), p.n());
        match lattice_agreement(&p, cfg.pairs, cfg.horizon, cfg.seed) {
            Ok(a) => out.push(Check {
                suite: S,
                name: format!("{tag} criterion agrees with oracle at horizon {}", cfg.horizon),
                passed: a.agree == a.pairs,
                value: Some(if a.pairs == 0 { 1.0 } else { a.agree as f64 / a.pairs as f64 }),
                threshold: None,
                detail: format!("{}/{} agree, {} isomorphic", a.agree, a.pairs, a.isomorphic),
            }),
            Err(e) => out.push(Check::failed(S, format!("{tag} agreement"), &e)),
        }
    }
    for hp in hand_pairs() {
        if cfg.params.is_some_and(|p| p != hp.params) {
            continue;
        }
        let got = iso_decide_periodic(&hp.params, &hp.omega, &hp.omega_prime, 64);
        out.push(Check::flag(
            S,
            format!("{} pair {} vs {}", hp.name, hp.omega, hp.omega_prime),
            got.as_ref() == Ok(&hp.expected),
            format!("{got:?}"),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteConfig {
        SuiteConfig {
            samples: 500,
            pairs: 40,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn identities_pass_on_small_grid() {
        let cfg = SuiteConfig {
            params: Some(Params::new(2, 3).unwrap()),
            ..quick()
        };
        let checks = identities(&cfg);
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
        assert_eq!(checks.len(), 7);
    }

    #[test]
    fn spectra_single_config() {
        let p = Params::new(2, 2).unwrap();
        for mode in [Mode::Neumann, Mode::Dirichlet] {
            let c = spectrum_checks(&p, 1, mode, &quick()).unwrap();
            assert!(c.iter().all(|c| c.passed), "{c:#?}");
        }
        let empty = spectrum_checks(&p, 0, Mode::Dirichlet, &quick()).unwrap();
        assert!(empty.iter().all(|c| c.passed));
    }

    #[test]
    fn roundtrip_small() {
        let rt = roundtrip(&Params::new(2, 2).unwrap(), 1, Mode::Neumann, &quick()).unwrap();
        assert!(rt.extended > 0 && rt.rejected_forbidden > 0);
        assert!(rt.max_extension_residual <= 1e-8);
        let c = forbidden_extension_checks(&Params::new(2, 2).unwrap(), &quick()).unwrap();
        assert!(c.iter().all(|c| c.passed), "{c:#?}");
    }

    #[test]
    fn pairs_are_deterministic_and_mixed() {
        let p = Params::new(2, 2).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(random_omega_pair(&p, &mut a, 3, 3), random_omega_pair(&p, &mut b, 3, 3));
        }
        let ag = lattice_agreement(&p, 100, 8, 3).unwrap();
        assert_eq!(ag.agree, 100);
        assert!(ag.isomorphic > 5 && ag.isomorphic < 95, "{ag:?}");
    }

    #[test]
    fn lattice_suite_passes() {
        let checks = lattice(&quick());
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
        assert_eq!(checks.len(), 6);
    }

    #[test]
    fn run_selects_suites() {
        let cfg = SuiteConfig {
            params: Some(Params::new(2, 2).unwrap()),
            ..quick()
        };
        let r = run(SuiteName::Lattice, &cfg);
        assert_eq!(r.len(), 1);
        assert!(r[0].passed());
    }
}
