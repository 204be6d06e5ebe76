//! `ctw`: construct, verify, catalog and search solutions of the basic system.
//!
//! Exit codes: `0` success, `1` a semantic failure (not a solution, no
//! solution found, oracle mismatch), `2` an input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ctw_core::catalog::{self, FamilySpec, FLOAT_TOL};
use ctw_core::curvature::{self, einstein_decompose, fixed_point_residual, solution_to_tensor, ConstantBranch};
use ctw_core::graphs::srg_params_of;
use ctw_core::group_ring::phi_to_matrix;
use ctw_core::io::{self, AnySolution, SolutionFile};
use ctw_core::search::{self, SearchConfig, SearchMode};
use ctw_core::{verify_basic, Scalar};

#[derive(Parser)]
#[command(name = "ctw", version, about = "Solutions of S⊙S + S² = θS + D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    DisjointComplete,
    Kneser2,
    Rook,
    Paley,
    GqSymplectic,
    Pds,
    Composite,
    Cubic,
    Quartic,
    Octic,
    SphereProduct,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Direct,
    Chars,
}

#[derive(Subcommand)]
enum Command {
    /// Build a solution from a family and write it as JSON.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        variant: Option<u8>,
        /// Emit the graph instead of the solution (graph families only).
        #[arg(long)]
        graph: bool,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file.
    Verify {
        path: PathBuf,
        /// Tolerance for float files; exact files are checked exactly.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// One verified solution per dimension plus every applicable family.
    Catalog {
        #[arg(long, default_value_t = 30)]
        max_n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Numerical search for solutions of the Hopf equations on (GF(q), +).
    Search {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Direct)]
        mode: Mode,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        target: f64,
        /// Restrict the character basis to these orders (comma separated).
        #[arg(long, value_delimiter = ',')]
        char_orders: Option<Vec<u64>>,
        /// Where to write the solution on success.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the Jordan formula for # with the trace formula.
    SharpCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Turn a solution file into its diagonal curvature tensor.
    Tensor {
        #[arg(long)]
        from: PathBuf,
        /// Use the r = 0 constant instead of r = θ/(n-1).
        #[arg(long)]
        zero_branch: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Semantic(anyhow::Error),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<ctw_core::Error> for Failure {
    fn from(e: ctw_core::Error) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn need(v: Option<u64>, name: &str) -> anyhow::Result<u64> {
    v.ok_or_else(|| anyhow!("--{name} is required for this family"))
}

fn spec_of(family: Family, m: Option<u64>, l: Option<u64>, q: Option<u64>, k: Option<u64>, variant: Option<u8>) -> anyhow::Result<FamilySpec> {
    Ok(match family {
        Family::DisjointComplete => FamilySpec::DisjointComplete {
            m: need(m, "m")? as usize,
            l: need(l, "l")? as usize,
        },
        Family::Kneser2 => FamilySpec::Kneser2 { m: need(m, "m")? as usize },
        Family::Rook => FamilySpec::Rook { m: need(m, "m")? as usize },
        Family::Paley => FamilySpec::Paley { q: need(q, "q")? },
        Family::GqSymplectic => FamilySpec::GqSymplectic { q: need(q, "q")? },
        Family::Pds => FamilySpec::Pds {
            q: need(q, "q")?,
            l: need(l, "l")? as usize,
        },
        Family::Composite => FamilySpec::Composite {
            l: need(l, "l")?,
            m: need(m, "m")?,
            variant: variant.ok_or_else(|| anyhow!("--variant is required for this family"))?,
        },
        Family::Cubic => FamilySpec::Cubic { q: need(q, "q")? },
        Family::Quartic => FamilySpec::Quartic { q: need(q, "q")? },
        Family::Octic => FamilySpec::Octic { q: need(q, "q")? },
        Family::SphereProduct => FamilySpec::SphereProduct {
            k: need(k, "k")? as usize,
            l: need(l, "l")? as usize,
        },
    })
}

fn emit(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => print_stdout(&(text + "\n")),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn print_stdout(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn file_tolerance(sol: &AnySolution, tol: Option<f64>) -> f64 {
    match sol {
        AnySolution::Rational(_) => 0.0,
        AnySolution::Float(_) => tol.unwrap_or(FLOAT_TOL),
    }
}

fn check_file<T: Scalar>(f: &SolutionFile<T>, tol: f64) -> ctw_core::Result<(Value, bool)> {
    let rep = verify_basic(&f.matrix, tol)?;
    let theta_matches = f.matrix.is_zero()
        || rep
            .theta
            .as_ref()
            .is_some_and(|t| t.approx_eq(&f.theta, tol * (1.0 + f.theta.abs().to_f64_lossy())));
    let mut value = io::report_to_json(&rep);
    value["theta_matches_file"] = json!(theta_matches);
    Ok((value, rep.is_solution))
}

fn check_any(sol: &AnySolution, tol: Option<f64>) -> ctw_core::Result<(Value, bool)> {
    let tol = file_tolerance(sol, tol);
    match sol {
        AnySolution::Rational(f) => check_file(f, tol),
        AnySolution::Float(f) => check_file(f, tol),
    }
}

fn read_solution(path: &Path) -> anyhow::Result<AnySolution> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_solution(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_graph(spec: FamilySpec, out: Option<PathBuf>) -> Outcome {
    let g = spec
        .graph()
        .ok_or_else(|| anyhow!("{} is not a graph family", spec.name()))??;
    srg_params_of(&g).map_err(|e| Failure::Semantic(anyhow!("{} is not strongly regular: {e:?}", spec.name())))?;
    emit(&io::graph_to_json(&g), out.as_deref())?;
    Ok(())
}

fn cmd_construct(spec: FamilySpec, out: Option<PathBuf>) -> Outcome {
    let sol = catalog::construct(&spec)?;
    let value = sol.to_json();
    // Round trip through the serialized form before handing it out.
    let back = io::parse_solution(&value.to_string())?;
    let (_, ok) = check_any(&back, None)?;
    if !ok {
        return Err(Failure::Semantic(anyhow!("{} did not re-verify after serialization", spec.name())));
    }
    log::info!("{} n = {} verified", spec.name(), sol.n());
    emit(&value, out.as_deref())?;
    Ok(())
}

fn cmd_verify(path: &Path, tol: Option<f64>) -> Outcome {
    let sol = read_solution(path)?;
    if matches!(sol, AnySolution::Rational(_)) && tol.is_some() {
        log::warn!("ignoring --tol for an exact file");
    }
    let (report, ok) = check_any(&sol, tol)?;
    emit(&report, None)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Semantic(anyhow!("not a solution")))
    }
}

fn cmd_catalog(max_n: u64, as_json: bool) -> Outcome {
    if max_n < 4 {
        return Err(Failure::Input(anyhow!("--max-n must be at least 4")));
    }
    let rows = catalog::catalog(max_n)?;
    if as_json {
        emit(&catalog::catalog_json(&rows), None)?;
    } else {
        print_stdout(&catalog::catalog_text(&rows))?;
    }
    let missing = catalog::uncovered_dimensions(&rows, max_n);
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Semantic(anyhow!("no verified row with nonzero θ̂ for n in {missing:?}")))
    }
}

fn cmd_search(cfg: SearchConfig, out: Option<PathBuf>) -> Outcome {
    let result = search::search_hopf(&cfg)?;
    emit(&result.to_json(), None)?;
    if !result.succeeded {
        return Err(Failure::Semantic(anyhow!("no solution found for q = {}", cfg.q)));
    }
    if let Some(path) = out {
        let matrix = phi_to_matrix(&result.best_phi)?;
        let file = SolutionFile {
            matrix,
            theta: result.best_theta,
            metadata: Some(json!({
                "family": "search",
                "params": { "q": cfg.q, "seed": cfg.seed, "starts": cfg.starts },
                "mode": cfg.mode.as_str(),
                "residual": result.residual,
            })),
        };
        emit(&io::solution_to_json(&file), Some(&path))?;
    }
    Ok(())
}

fn cmd_sharp_check(n: usize, trials: usize, seed: u64) -> Outcome {
    let check = curvature::sharp_check(n, trials, seed)?;
    let ok = check.identity_ok && check.max_deviation < 1e-10;
    emit(
        &json!({
            "n": check.n,
            "trials": check.trials,
            "seed": seed,
            "max_deviation": check.max_deviation,
            "identity_ok": check.identity_ok,
            "passed": ok,
        }),
        None,
    )?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Semantic(anyhow!("Jordan and trace formulas disagree")))
    }
}

fn tensor_json<T: Scalar>(f: &SolutionFile<T>, branch: ConstantBranch) -> ctw_core::Result<Value> {
    let r = solution_to_tensor(&f.matrix, &f.theta, branch)?;
    let residual = fixed_point_residual(&r, &f.theta).max_abs();
    let einstein = einstein_decompose(&r, T::default_tolerance()).is_einstein;
    log::info!("fixed-point residual {residual:e}, einstein = {einstein}");
    Ok(io::tensor_to_json(&r))
}

fn cmd_tensor(from: &Path, zero_branch: bool, out: Option<PathBuf>) -> Outcome {
    let sol = read_solution(from)?;
    let branch = if zero_branch {
        ConstantBranch::Zero
    } else {
        ConstantBranch::Sphere
    };
    let value = match &sol {
        AnySolution::Rational(f) => tensor_json(f, branch),
        AnySolution::Float(f) => tensor_json(f, branch),
    };
    let value = value.map_err(|e| match e {
        ctw_core::Error::NotASolution => Failure::Semantic(e.into()),
        other => other.into(),
    })?;
    emit(&value, out.as_deref())?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Construct {
            family,
            m,
            l,
            q,
            k,
            variant,
            graph,
            out,
        } => {
            let spec = spec_of(family, m, l, q, k, variant)?;
            if graph {
                cmd_graph(spec, out)
            } else {
                cmd_construct(spec, out)
            }
        }
        Command::Verify { path, tol } => cmd_verify(&path, tol),
        Command::Catalog { max_n, json } => cmd_catalog(max_n, json),
        Command::Search {
            q,
            starts,
            seed,
            mode,
            max_iters,
            target,
            char_orders,
            out,
        } => {
            if !(target > 0.0) {
                return Err(Failure::Input(anyhow!("--target must be positive")));
            }
            let mut cfg = SearchConfig::new(q);
            cfg.starts = starts;
            cfg.seed = seed;
            cfg.max_iters = max_iters;
            cfg.residual_target = target;
            cfg.mode = match mode {
                Mode::Direct => SearchMode::Direct,
                Mode::Chars => SearchMode::CharacterBasis,
            };
            if char_orders.is_some() && cfg.mode == SearchMode::Direct {
                return Err(Failure::Input(anyhow!("--char-orders needs --mode chars")));
            }
            cfg.char_orders = char_orders;
            cmd_search(cfg, out)
        }
        Command::SharpCheck { n, trials, seed } => cmd_sharp_check(n, trials, seed),
        Command::Tensor { from, zero_branch, out } => cmd_tensor(&from, zero_branch, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CTW_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Semantic(e)) => {
            eprintln!("ctw: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("ctw: error: {e:#}");
            ExitCode::from(2)
        }
    }
}
