//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero when any
//! criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vicsek::decim::{eval_a, eval_s, r_coeffs, scaled_a, scaled_s, Decimation, Seed};
use vicsek::eigmap::CellTemplate;
use vicsek::eigoracle::{cluster_multiplicities, compare_spectra, graph_spectrum, CLUSTER_TOL};
use vicsek::graph::{Capacity, Mode, VicsekGraph};
use vicsek::lattice::{gamma_oracle_iso, iso_decide_periodic, thm56_check, CellTreeMetric};
use vicsek::suite::{self, SuiteConfig};
use vicsek::{Error, Exec, Params};

const SPECTRA: [(u32, u32, u32); 7] = [(2, 2, 1), (2, 2, 2), (2, 2, 3), (2, 3, 1), (2, 3, 2), (3, 2, 1), (3, 2, 2)];
const GRID: [(u32, u32); 6] = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2)];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn params(d: u32, n: u32) -> Params {
    Params::new(d, n).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(2^d n - 2^d + 1)^m (2^d - 1) + 1`.
fn vertices(d: u32, n: u32, m: u32) -> u128 {
    let c = 1u128 << d;
    (c * n as u128 - c + 1).pow(m) * (c - 1) + 1
}

fn spectra(d: u32, n: u32, m: u32, mode: Mode) -> (vicsek::decim::Spectrum, Vec<(f64, u64)>) {
    let p = params(d, n);
    let dec = Decimation::new(p).unwrap();
    let s = match mode {
        Mode::Neumann => dec.neumann_spectrum(m).unwrap(),
        Mode::Dirichlet => dec.dirichlet_spectrum(m).unwrap(),
    };
    let g = VicsekGraph::build(&p, m, Capacity::default(), Exec::Parallel).unwrap();
    let dense = graph_spectrum(&g, mode).unwrap().values;
    (s, cluster_multiplicities(&dense, CLUSTER_TOL))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (d, n, m) in SPECTRA {
        for mode in [Mode::Neumann, Mode::Dirichlet] {
            let (s, dense) = spectra(d, n, m, mode);
            let c = compare_spectra(&s.pairs(), &dense, 1e-8);
            ensure(c.matches, || format!("({d},{n},{m}) {mode}: first mismatch {:?}", c.first_mismatch))?;
            worst = worst.max(c.max_deviation.unwrap_or(0.0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("14 spectra agree, max deviation {worst:.1e}, {secs:.1} s"))
}

fn counting_identities() -> Outcome {
    for (d, n, m) in SPECTRA {
        let p = params(d, n);
        let dec = Decimation::new(p).unwrap();
        let total_n = dec.neumann_spectrum(m).unwrap().total_multiplicity() as u128;
        let total_d = dec.dirichlet_spectrum(m).unwrap().total_multiplicity() as u128;
        let v = vertices(d, n, m);
        ensure(total_n == v, || format!("({d},{n},{m}) neumann {total_n} vs {v}"))?;
        ensure(total_d == v - (1 << d), || format!("({d},{n},{m}) dirichlet {total_d} vs {}", v - (1 << d)))?;
    }
    Ok("neumann and dirichlet totals equal #V_m and #V_m - 2^d on all 7 configurations".into())
}

/// Sum of the roots of `S` by Vieta's formula.
fn alpha_sum(p: &Params) -> BigRational {
    let dec = Decimation::new(*p).unwrap();
    let c = dec.polys().s.coeffs().to_vec();
    let k = c.len() - 1;
    -BigRational::new(c[k - 1].clone(), c[k].clone())
}

fn trace_identities() -> Outcome {
    for (d, n, m) in SPECTRA {
        for mode in [Mode::Neumann, Mode::Dirichlet] {
            let dec = Decimation::new(params(d, n)).unwrap();
            let s = match mode {
                Mode::Neumann => dec.neumann_spectrum(m).unwrap(),
                Mode::Dirichlet => dec.dirichlet_spectrum(m).unwrap(),
            };
            let want = (vertices(d, n, m) - if mode == Mode::Dirichlet { 1 << d } else { 0 }) as f64;
            let rel = (s.trace() - want).abs() / want;
            ensure(rel <= 1e-6, || format!("({d},{n},{m}) {mode}: relative error {rel:e}"))?;
        }
    }
    let p = params(2, 2);
    let dec = Decimation::new(p).unwrap();
    let neumann = dec.neumann_spectrum(1).unwrap().exact_trace();
    ensure(neumann == Some(BigRational::from_integer(16.into())), || format!("exact neumann trace {neumann:?}"))?;

    let dir = dec.dirichlet_spectrum(1).unwrap();
    let mut exact = BigRational::zero();
    for e in dir.entries() {
        match (&e.exact, e.genealogy.seed) {
            (Some(v), _) => exact += v * BigRational::from_integer(BigInt::from(e.multiplicity)),
            (None, Seed::Alpha(_)) if e.multiplicity == 1 => {}
            _ => return Err(format!("unexpected irrational entry {:?}", e.genealogy)),
        }
    }
    exact += alpha_sum(&p);
    ensure(exact == BigRational::from_integer(12.into()), || format!("exact dirichlet trace {exact}"))?;
    Ok("traces within 1e-6; exact traces 16 and 12 at (2,2,1)".into())
}

fn decimation_polynomial() -> Outcome {
    let r = r_coeffs(&params(2, 2)).to_i64s();
    ensure(r == Some(vec![0, 15, -48, 36]), || format!("r_coeffs(2,2) = {r:?}"))?;
    let mut worst = (0.0f64, 0.0f64);
    for (k, (d, n)) in GRID.into_iter().enumerate() {
        let (a, b) = suite::factorization_residuals(&params(d, n), 10_000, 1000 + k as u64);
        ensure(a <= 1e-9 && b <= 1e-9, || format!("({d},{n}) residuals {a:e} {b:e}"))?;
        worst = (worst.0.max(a), worst.1.max(b));
    }
    Ok(format!("R(2,2) = [0,15,-48,36]; factorization residuals {:.1e}, {:.1e}", worst.0, worst.1))
}

fn forbidden_set() -> Outcome {
    let mut raw = 0.0f64;
    let mut scaled = 0.0f64;
    for (d, n) in GRID {
        let p = params(d, n);
        let dec = Decimation::new(p).unwrap();
        let f = dec.forbidden();
        let values: BTreeSet<u64> = f.values().iter().map(|x| x.to_bits()).collect();
        ensure(f.len() == 2 * n as usize && values.len() == f.len(), || format!("({d},{n}) has {} values", f.len()))?;
        for &x in &f.alphas {
            raw = raw.max(eval_s(&p, x).abs());
            scaled = scaled.max(scaled_s(&p, x).abs());
        }
        for &x in &f.betas {
            raw = raw.max(eval_a(&p, x).abs());
            scaled = scaled.max(scaled_a(&p, x).abs());
        }
    }
    ensure(raw <= 1e-10, || format!("|S|, |A| up to {raw:e}"))?;
    ensure(scaled <= 1e-10, || format!("normalized |S|, |A| up to {scaled:e}"))?;
    let f = Decimation::new(params(2, 2)).unwrap().forbidden().clone();
    let s17 = 17f64.sqrt();
    let want = [(7.0 - s17) / 12.0, 0.5, (7.0 + s17) / 12.0, 4.0 / 3.0];
    let mut got = f.values();
    got.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(want) {
        ensure((g - w).abs() <= 1e-10, || format!("(2,2) value {g} vs {w}"))?;
    }
    Ok(format!(
        "2n values on the grid; |S|, |A| <= {raw:.1e} (normalized {scaled:.1e}); (2,2) values exact to 1e-10"
    ))
}

fn round_trip() -> Outcome {
    let cfg = SuiteConfig::default();
    let mut extended = 0;
    let mut worst = (0.0f64, 0.0f64);
    for (d, n) in [(2, 2), (2, 3)] {
        let p = params(d, n);
        for m in 0..=2 {
            for mode in [Mode::Neumann, Mode::Dirichlet] {
                if mode == Mode::Dirichlet && m == 0 {
                    continue;
                }
                let rt = suite::roundtrip(&p, m, mode, &cfg).map_err(|e| e.to_string())?;
                ensure(rt.max_extension_residual <= 1e-8, || {
                    format!("({d},{n},{m}) {mode} extension residual {:e}", rt.max_extension_residual)
                })?;
                ensure(rt.max_restriction_residual <= 1e-7 && rt.max_value_error <= 1e-7, || {
                    format!("({d},{n},{m}) {mode} restriction {rt:?}")
                })?;
                extended += rt.extended;
                worst = (worst.0.max(rt.max_extension_residual), worst.1.max(rt.max_restriction_residual));
            }
        }
        let lp = vicsek::eigmap::LevelPair::new(&p, 0, Capacity::default(), Exec::Parallel).unwrap();
        let ones = vec![1.0; lp.coarse.vertex_count()];
        let tpl = CellTemplate::new(&p).unwrap();
        let forbidden = lp.decimation().forbidden().values();
        for &x in &forbidden {
            let r = lp.extend(&ones, x, Mode::Neumann);
            ensure(matches!(r, Err(Error::ForbiddenEigenvalue(_))), || format!("({d},{n}) extend at {x}: {r:?}"))?;
            let s = tpl.min_singular_value(x);
            ensure(s <= 1e-8, || format!("({d},{n}) singular value {s:e} at forbidden {x}"))?;
        }
        let top = p.top_value();
        for k in 0..=2000 {
            let x = top * k as f64 / 2000.0;
            if lp.decimation().forbidden().distance(x) < 1e-6 {
                continue;
            }
            let s = tpl.min_singular_value(x);
            ensure(s > 1e-8, || format!("({d},{n}) singular value {s:e} at non-forbidden {x}"))?;
        }
    }
    Ok(format!(
        "{extended} extensions, residuals {:.1e} / {:.1e}; forbidden values rejected; singular only on the forbidden set",
        worst.0, worst.1
    ))
}

fn lattice_decision() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = 0;
    for (d, n) in [(2, 2), (2, 3), (3, 2)] {
        let p = params(d, n);
        let metric = CellTreeMetric::new(&p, 8).map_err(|e| e.to_string())?;
        for _ in 0..200 {
            let (w, wp) = suite::random_omega_pair(&p, &mut rng, 3, 3);
            let big_m = rng.random_range(1..=3);
            let t = thm56_check(&p, &w, &wp, big_m, 8);
            let g = gamma_oracle_iso(&metric, &w, &wp, big_m, 8).map_err(|e| e.to_string())?;
            ensure(t == g, || format!("({d},{n}) {w} vs {wp} at M = {big_m}: criterion {t}, oracle {g}"))?;
            total += 1;
        }
    }
    for hp in suite::hand_pairs() {
        let got = iso_decide_periodic(&hp.params, &hp.omega, &hp.omega_prime, 64).map_err(|e| e.to_string())?;
        ensure(got == hp.expected, || format!("{}: {got:?}", hp.name))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{total}/{total} random pairs agree; 3 hand-constructed pairs correct; {secs:.2} s"))
}

fn graph_construction() -> Outcome {
    for d in 2..=3 {
        for n in 2..=4 {
            let p = params(d, n);
            let c = 1u128 << d;
            let allowed = [(1u32 << d) - 1, 2 * ((1u32 << d) - 1)];
            for m in 0..=3 {
                let g = VicsekGraph::build(&p, m, Capacity::default(), Exec::Parallel).map_err(|e| e.to_string())?;
                let edges = c * (c - 1) / 2 * (c * n as u128 - c + 1).pow(m);
                ensure(g.vertex_count() as u128 == vertices(d, n, m), || format!("({d},{n},{m}) vertices"))?;
                ensure(g.edges().len() as u128 == edges, || format!("({d},{n},{m}) edges"))?;
                ensure(g.degrees().iter().all(|k| allowed.contains(k)), || format!("({d},{n},{m}) degrees"))?;
                ensure(g.is_connected(), || format!("({d},{n},{m}) disconnected"))?;
            }
        }
    }
    Ok("24 graphs: counts, degree set and connectivity".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("counting identities", counting_identities),
        ("trace identities", trace_identities),
        ("decimation polynomial", decimation_polynomial),
        ("forbidden set", forbidden_set),
        ("extension/restriction round trip", round_trip),
        ("lattice decision", lattice_decision),
        ("graph construction", graph_construction),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
