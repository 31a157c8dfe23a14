mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vicsek::decim::Decimation;
use vicsek::eigmap::{relative_residual, LevelPair};
use vicsek::eigoracle::{cluster_multiplicities, compare_spectra, dense_eigen, eigenfunction_values, graph_spectrum};
use vicsek::graph::{Capacity, Mode, VicsekGraph, DEFAULT_MAX_LEVEL, DEFAULT_MAX_VERTICES};
use vicsek::lattice::{
    build_blowup_tree, center_matrix, decision_horizon, iso_decide_oracle, iso_decide_periodic, CellTreeMetric,
    IsoDecision, OmegaSeq,
};
use vicsek::suite::{self, SuiteConfig, SuiteName};
use vicsek::{Error, Exec, Params};

use output::*;

/// Largest matrix the dense solver is asked to diagonalize.
const DENSE_LIMIT: u128 = 6000;

#[derive(Parser)]
#[command(
    name = "vicsek",
    version,
    about = "Vicsek set graphs, Laplacian spectra by spectral decimation, and lattice isomorphism",
    after_help = "Exit codes: 0 ok, 1 usage, 2 comparison mismatch, 3 numeric failure, 4 verification failure."
)]
struct Cli {
    /// Worker threads for data-parallel loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Run every loop sequentially.
    #[arg(long, global = true)]
    sequential: bool,

    /// Largest graph level accepted.
    #[arg(long, global = true, env = "VICSEK_MAX_LEVEL", default_value_t = DEFAULT_MAX_LEVEL)]
    max_level: u32,

    /// Largest vertex count accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VERTICES as u64)]
    max_vertices: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Laplacian spectrum of G_m by decimation, dense diagonalization, or both.
    Spectrum(SpectrumArgs),
    /// Run a property suite and report each check.
    Verify(VerifyArgs),
    /// Extend an eigenfunction of G_m to G_(m+1) and restrict it back.
    Extend(ExtendArgs),
    /// Build G_m and report its counts, degrees and connectivity.
    Graph(GraphArgs),
    /// Vicsek set lattices: isomorphism, blow-up trees and center matrices.
    #[command(subcommand)]
    Lattice(LatticeCommand),
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Dimension d >= 2.
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Branch length n >= 2.
    #[arg(long, default_value_t = 2)]
    n: u32,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, Failure> {
        Ok(Params::new(self.d, self.n)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Neumann,
    Dirichlet,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Neumann => Mode::Neumann,
            ModeArg::Dirichlet => Mode::Dirichlet,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Decimation,
    Dense,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Graph level m >= 0.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Neumann)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Method::Decimation)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Dense eigenvalues closer than this are merged into one cluster.
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,
    /// Largest value deviation accepted when comparing methods.
    #[arg(long, default_value_t = 1e-8)]
    value_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Spectra,
    Eigenmaps,
    Lattice,
    All,
}

impl From<SuiteArg> for SuiteName {
    fn from(s: SuiteArg) -> SuiteName {
        match s {
            SuiteArg::Identities => SuiteName::Identities,
            SuiteArg::Spectra => SuiteName::Spectra,
            SuiteArg::Eigenmaps => SuiteName::Eigenmaps,
            SuiteArg::Lattice => SuiteName::Lattice,
            SuiteArg::All => SuiteName::All,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Restrict to this dimension (requires --n).
    #[arg(long, requires = "n")]
    d: Option<u32>,
    /// Restrict to this branch length (requires --d).
    #[arg(long, requires = "d")]
    n: Option<u32>,
    /// Random samples for the polynomial identities.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Seed of the randomized checks.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Random sequence pairs per (d, n) in the lattice suite.
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Lattice horizon h.
    #[arg(long, default_value_t = 8)]
    horizon: usize,
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,
    /// Eigen-equation residual accepted after extension.
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Level of the eigenfunction to extend.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Neumann)]
    mode: ModeArg,
    /// Position of the eigenvector in the ascending dense spectrum of G_m.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Preimage branch l in 0..=2n-2.
    #[arg(long, default_value_t = 0)]
    branch: usize,
    /// Include the extended function values.
    #[arg(long)]
    values: bool,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Include coordinates and the edge list.
    #[arg(long)]
    full: bool,
    /// json: summary; csv: edge list.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IsoMethod {
    Thm56,
    Oracle,
    Both,
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Decide isomorphism of two eventually periodic lattices.
    Iso {
        #[command(flatten)]
        params: ParamArgs,
        /// Sequence as prefix|cycle, e.g. "0,(1,1)|(2,1),(4,1)".
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, allow_hyphen_values = true)]
        omega_prime: String,
        /// Largest witness M searched.
        #[arg(long, default_value_t = 64)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = IsoMethod::Thm56)]
        method: IsoMethod,
    },
    /// Export the blow-up tree up to horizon h.
    Tree {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, default_value_t = 2)]
        h: usize,
        /// json: full tree; csv: edge list.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Export the center distance matrix D[k][l], M <= k, l <= h.
    Gamma {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long = "M", default_value_t = 0)]
        big_m: usize,
        #[arg(long, default_value_t = 4)]
        h: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// A failed command: message for stderr and exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_)
            | Error::Parse { .. }
            | Error::InvalidRange(_)
            | Error::DomainError { .. }
            | Error::CapacityExceeded { .. }
            | Error::LengthMismatch { .. }
            | Error::TopValueExcluded => 1,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Context {
    exec: Exec,
    capacity: Capacity,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure threads: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = Context {
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
        capacity: Capacity {
            max_level: cli.max_level,
            max_vertices: cli.max_vertices as u128,
        },
    };
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(&ctx, a),
        Command::Verify(a) => cmd_verify(&ctx, a),
        Command::Extend(a) => cmd_extend(&ctx, a),
        Command::Graph(a) => cmd_graph(&ctx, a),
        Command::Lattice(c) => cmd_lattice(&ctx, c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dense_clusters(ctx: &Context, p: &Params, m: u32, mode: Mode, tol: f64) -> Result<Vec<(f64, u64)>, Failure> {
    let dim = match mode {
        Mode::Neumann => p.vertex_count(m),
        Mode::Dirichlet => p.interior_count(m),
    }
    .unwrap_or(u128::MAX);
    if dim == 0 {
        return Ok(Vec::new());
    }
    if dim > DENSE_LIMIT {
        return Err(Failure::usage(format!(
            "dense method limited to dimension {DENSE_LIMIT} (level {m} has {dim}); use --method decimation"
        )));
    }
    let g = VicsekGraph::build(p, m, ctx.capacity, ctx.exec)?;
    let values = graph_spectrum(&g, mode)?.values;
    Ok(cluster_multiplicities(&values, tol))
}

fn cmd_spectrum(ctx: &Context, a: SpectrumArgs) -> Result<u8, Failure> {
    let p = a.params.params()?;
    ctx.capacity.check(&p, a.m)?;
    let mode: Mode = a.mode.into();
    let decimated = if a.method == Method::Dense {
        None
    } else {
        let dec = Decimation::new(p)?.with_exec(ctx.exec);
        Some(match mode {
            Mode::Neumann => dec.neumann_spectrum(a.m)?,
            Mode::Dirichlet => dec.dirichlet_spectrum(a.m)?,
        })
    };
    let dense = if a.method == Method::Decimation {
        None
    } else {
        Some(dense_clusters(ctx, &p, a.m, mode, a.cluster_tol)?)
    };
    let comparison = match (&decimated, &dense) {
        (Some(s), Some(d)) => Some(compare_spectra(&s.pairs(), d, a.value_tol)),
        _ => None,
    };
    let out = SpectrumOut::new(&p, a.m, mode, method_name(a.method), decimated.as_ref(), dense.as_deref(), comparison);
    match a.format {
        Format::Json => print_json(&out),
        Format::Csv => {
            print!("{}", out.csv());
            if let Some(c) = &out.comparison {
                eprintln!(
                    "comparison: matches={} maxDeviation={}",
                    c.matches,
                    c.max_deviation.map_or("null".into(), fmt_float)
                );
            }
        }
    }
    Ok(match out.comparison {
        Some(c) if !c.matches => 2,
        _ => 0,
    })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Decimation => "decimation",
        Method::Dense => "dense",
        Method::Both => "both",
    }
}

fn cmd_verify(ctx: &Context, a: VerifyArgs) -> Result<u8, Failure> {
    let params = match (a.d, a.n) {
        (Some(d), Some(n)) => Some(Params::new(d, n)?),
        _ => None,
    };
    let cfg = SuiteConfig {
        params,
        samples: a.samples,
        seed: a.seed,
        cluster_tol: a.cluster_tol,
        residual_tol: a.residual_tol,
        pairs: a.pairs,
        horizon: a.horizon,
        exec: ctx.exec,
        capacity: ctx.capacity,
        ..SuiteConfig::default()
    };
    let reports = suite::run(a.suite.into(), &cfg);
    let passed = reports.iter().all(|r| r.passed());
    match a.format {
        ReportFormat::Json => print_json(&VerifyOut::new(&reports)),
        ReportFormat::Text => print!("{}", verify_text(&reports)),
    }
    Ok(if passed { 0 } else { 4 })
}

fn cmd_extend(ctx: &Context, a: ExtendArgs) -> Result<u8, Failure> {
    let p = a.params.params()?;
    let mode: Mode = a.mode.into();
    ctx.capacity.check(&p, a.m + 1)?;
    let dim = match mode {
        Mode::Neumann => p.vertex_count(a.m),
        Mode::Dirichlet => p.interior_count(a.m),
    }
    .unwrap_or(u128::MAX);
    if dim == 0 {
        return Err(Failure::usage("the dirichlet problem at level 0 has no eigenfunctions"));
    }
    if dim > DENSE_LIMIT {
        return Err(Failure::usage(format!("level {} is too large for the dense eigensolver", a.m)));
    }
    if a.index as u128 >= dim {
        return Err(Failure::usage(format!("--index must be below {dim}")));
    }
    let branches = 2 * p.n() as usize - 1;
    if a.branch >= branches {
        return Err(Failure::usage(format!("--branch must be below {branches}")));
    }
    let lp = LevelPair::new(&p, a.m, ctx.capacity, ctx.exec)?;
    let (mat, rows) = lp.coarse.operator_matrix(mode)?;
    let eig = dense_eigen(&mat)?;
    let f = eigenfunction_values(&lp.coarse, &rows, &eig.vector(a.index));
    let mu = eig.values[a.index].clamp(0.0, p.top_value());
    let lambda = lp.decimation().inverse_branches(mu)?[a.branch];
    let ext = lp.extend(&f, lambda, mode)?;
    let residual = relative_residual(&lp.fine, &ext.values, lambda, mode)?;
    let back = lp.restrict_check(&ext.values, lambda, mode)?;
    let out = ExtendOut {
        d: p.d(),
        n: p.n(),
        m: a.m,
        mode: mode.to_string(),
        parent_eigenvalue: round15(mu),
        branch: a.branch,
        lambda: round15(lambda),
        extension_residual: round15(residual),
        restriction_residual: round15(back.residual),
        restricted_eigenvalue: round15(back.eigenvalue),
        values: a.values.then(|| ext.values.iter().map(|&x| round15(x)).collect()),
    };
    print_json(&out);
    Ok(0)
}

fn cmd_graph(ctx: &Context, a: GraphArgs) -> Result<u8, Failure> {
    let p = a.params.params()?;
    let g = VicsekGraph::build(&p, a.m, ctx.capacity, ctx.exec)?;
    match a.format {
        Format::Json => print_json(&GraphOut::new(&p, &g, a.full)),
        Format::Csv => print!("{}", edge_csv(g.edges())),
    }
    Ok(0)
}

fn cmd_lattice(ctx: &Context, c: LatticeCommand) -> Result<u8, Failure> {
    match c {
        LatticeCommand::Iso {
            params,
            omega,
            omega_prime,
            bound,
            method,
        } => {
            let p = params.params()?;
            let w = OmegaSeq::parse(&p, &omega)?;
            let wp = OmegaSeq::parse(&p, &omega_prime)?;
            let need = decision_horizon(&w, &wp, decision_horizon(&w, &wp, 1));
            let oracle = || -> Result<Result<IsoDecision, Error>, Failure> {
                let metric = CellTreeMetric::new(&p, need)?;
                Ok(iso_decide_oracle(&metric, &w, &wp, bound))
            };
            let (name, result) = match method {
                IsoMethod::Thm56 => ("thm56", iso_decide_periodic(&p, &w, &wp, bound)),
                IsoMethod::Oracle => ("oracle", oracle()?),
                IsoMethod::Both => {
                    let a = iso_decide_periodic(&p, &w, &wp, bound);
                    let b = oracle()?;
                    if a != b {
                        print_json(&IsoOut::from_result("both", &a));
                        eprintln!("error: criterion and oracle disagree: {a:?} vs {b:?}");
                        return Ok(2);
                    }
                    ("both", a)
                }
            };
            if let Err(e) = &result {
                if !matches!(e, Error::InconclusiveBound { .. }) {
                    return Err(e.clone().into());
                }
            }
            print_json(&IsoOut::from_result(name, &result));
            Ok(0)
        }
        LatticeCommand::Tree { params, omega, h, format } => {
            let p = params.params()?;
            let w = OmegaSeq::parse(&p, &omega)?;
            let t = build_blowup_tree(&p, &w, h, ctx.capacity, ctx.exec)?;
            match format {
                Format::Json => print_json(&TreeOut::new(&p, &w, &t)),
                Format::Csv => print!("{}", edge_csv(t.edges())),
            }
            Ok(0)
        }
        LatticeCommand::Gamma {
            params,
            omega,
            big_m,
            h,
            format,
        } => {
            let p = params.params()?;
            let w = OmegaSeq::parse(&p, &omega)?;
            if big_m > h {
                return Err(Failure::usage(format!("--M {big_m} exceeds --h {h}")));
            }
            if h as u32 > ctx.capacity.max_level {
                return Err(Error::CapacityExceeded {
                    level: h as u32,
                    max_level: ctx.capacity.max_level,
                }
                .into());
            }
            let metric = CellTreeMetric::new(&p, h)?;
            let cm = center_matrix(&metric, &w, big_m, h)?;
            let out = GammaOut {
                d: p.d(),
                n: p.n(),
                omega: w.to_string(),
                base: cm.base,
                horizon: h,
                size: cm.size(),
                distances: cm.distances,
            };
            match format {
                Format::Json => print_json(&out),
                Format::Csv => print!("{}", out.csv()),
            }
            Ok(0)
        }
    }
}
