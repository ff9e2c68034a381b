//! The `dg` command line. Every subcommand reads one JSON document (stdin or
//! `--in`) and writes one JSON or CSV document (stdout or `--out`); logs and
//! usage errors go to stderr only.
//!
//! Exit codes: 0 on success, including well-posed negative answers such as an
//! empty BP solution set; 1 on errors; 2 on usage errors.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::bp::{bp_solve, BpOptions};
use crate::embed::{self, FiniteMetric};
use crate::error::{Error, Result};
use crate::io::{self, to_json};
use crate::linalg::{self, GramMatrix, SquaredEdm, RANK_TOL_FACTOR};
use crate::model::{self, Framework, DEFAULT_TOL};
use crate::percolation::{self, LatticePatch};
use crate::rigidity::{self, PebbleVerdict, RigidityStatus, DEFAULT_TRIALS};
use crate::udgp::{self, DistanceList, TribondOutcome, TRIBOND_TOL};

#[derive(Debug, Parser)]
#[command(name = "dg", version, about = "Distance geometry toolkit")]
pub struct Cli {
    /// Input file; stdin when absent.
    #[arg(long = "in", global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for BP and percolation; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a realization into an instance, squared EDM, Gram matrix or distance list.
    Convert {
        #[arg(long, value_enum)]
        to: ConvertTarget,
    },
    /// Check a realization (`--x`) against an instance.
    Validate {
        #[arg(long, value_name = "PATH")]
        x: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Squared EDM to its centered Gram matrix.
    Edm2gram,
    /// Gram matrix to a realization; `--dim` defaults to the numerical rank.
    Gram2x {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Numerical rank of a matrix.
    Rank {
        #[arg(long, default_value_t = RANK_TOL_FACTOR)]
        tol_factor: f64,
    },
    Rigidity(RigidityArgs),
    /// Branch-and-prune enumeration of the realizations of an instance.
    SolveBp(SolveBpArgs),
    /// Realize an unassigned distance list.
    UdgpTribond {
        #[arg(long, default_value_t = TRIBOND_TOL)]
        tol: f64,
        #[arg(long)]
        timeout_seconds: Option<f64>,
    },
    /// Integer list to the cycle instance of its Partition reduction.
    ReducePartition,
    /// Fréchet embedding of a finite metric into l∞.
    EmbedFrechet,
    /// Random projection of `{"points": [...]}`.
    Jll {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = embed::JLL_C)]
        c: f64,
    },
    Percolate(PercolateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConvertTarget {
    Instance,
    Sqedm,
    Gram,
    Distances,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RigidityMode {
    Framework,
    Generic,
    Laman,
    Pebble,
    Global,
}

/// Rigidity of an instance's graph (or framework, with `--x`).
#[derive(Debug, Args)]
pub struct RigidityArgs {
    #[arg(long, value_enum, default_value = "generic")]
    mode: RigidityMode,
    /// Dimension; the instance's K when absent.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Realization for `--mode framework`.
    #[arg(long, value_name = "PATH")]
    x: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
pub struct SolveBpArgs {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    max_solutions: Option<usize>,
    /// Stop at the first solution.
    #[arg(long, conflicts_with_all = ["all", "max_solutions"])]
    first: bool,
    /// Explore the whole tree (the default).
    #[arg(long)]
    all: bool,
    /// Keep both mirror images instead of fixing the global reflection.
    #[arg(long)]
    no_fix_reflection: bool,
    /// Include per-level node counts.
    #[arg(long)]
    stats: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PatchKind {
    Triangular,
}

#[derive(Debug, Args)]
pub struct PercolateArgs {
    #[arg(long, value_enum, requires_all = ["rows", "cols"], conflicts_with = "gnp")]
    patch: Option<PatchKind>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Dilute the complete graph on N vertices instead of a lattice.
    #[arg(long, value_name = "N")]
    gnp: Option<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn dispatch<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors and belong on stdout.
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 2;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    match run(&cli, stdin).and_then(|out| emit(&cli, stdout, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "dg: {e}");
            1
        }
    }
}

fn emit(cli: &Cli, stdout: &mut dyn Write, mut out: String) -> Result<()> {
    if !out.ends_with('\n') {
        out.push('\n');
    }
    match &cli.output {
        Some(path) => fs::write(path, out)?,
        None => stdout.write_all(out.as_bytes())?,
    }
    Ok(())
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> Result<String> {
    match &cli.input {
        Some(path) => read_file(path),
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct PointsJson {
    points: Vec<Vec<f64>>,
}

fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<String> {
    let text = read_input(cli, stdin)?;
    match &cli.command {
        Command::Convert { to } => {
            let x = io::load_realization(&text)?;
            Ok(match to {
                ConvertTarget::Instance => {
                    io::instance_to_json(&model::DgpInstance::complete_from(&x)?)
                }
                ConvertTarget::Sqedm => {
                    io::matrix_to_json(linalg::sqedm_from_realization(&x).matrix())
                }
                ConvertTarget::Gram => {
                    io::matrix_to_json(GramMatrix::from_realization(&x).matrix())
                }
                ConvertTarget::Distances => {
                    io::distance_list_to_json(&DistanceList::from_realization(&x))
                }
            })
        }
        Command::Validate { x, tol } => {
            let inst = io::load_instance(&text)?;
            let x = io::load_realization(&read_file(x)?)?;
            let r = model::validate(&inst, &x, *tol)?;
            let violated: Vec<_> = r
                .violated_edges
                .iter()
                .map(|e| json!({"u": e.u + 1, "v": e.v + 1, "realized": e.realized}))
                .collect();
            Ok(to_json(&json!({
                "max_abs_error": r.max_abs_error,
                "mean_sq_error": r.mean_sq_error,
                "violated_edges": violated,
            })))
        }
        Command::Edm2gram => {
            let d = SquaredEdm::new(io::load_matrix(&text)?)?;
            Ok(io::matrix_to_json(linalg::gram_from_sqedm(&d).matrix()))
        }
        Command::Gram2x { dim, tol } => {
            let b = GramMatrix::new(io::load_matrix(&text)?)?;
            let k = match dim {
                Some(k) => *k,
                None => {
                    let eig = linalg::eigen_sym(&b, linalg::JACOBI_TOL)?;
                    eig.values.iter().filter(|&&l| l > *tol).count().max(1)
                }
            };
            Ok(io::realization_to_json(&linalg::realize_from_gram(
                &b, k, *tol,
            )?))
        }
        Command::Rank { tol_factor } => {
            let m = io::load_matrix(&text)?;
            Ok(to_json(
                &json!({"rank": linalg::numerical_rank(&m, *tol_factor)}),
            ))
        }
        Command::Rigidity(args) => rigidity_cmd(cli, args, &text),
        Command::SolveBp(args) => {
            let inst = io::load_instance(&text)?;
            let opts = BpOptions {
                tol: args.tol,
                max_solutions: if args.first {
                    Some(1)
                } else {
                    args.max_solutions
                },
                fix_reflection: !args.no_fix_reflection,
                seed: cli.seed,
                jobs: cli.jobs,
            };
            let set = bp_solve(&inst, &opts)?;
            Ok(io::solution_set_to_json(&set, args.stats))
        }
        Command::UdgpTribond {
            tol,
            timeout_seconds,
        } => {
            let list = io::load_distance_list(&text)?;
            let timeout = match timeout_seconds {
                Some(s) if s.is_finite() && *s >= 0.0 => Some(Duration::from_secs_f64(*s)),
                Some(s) => return Err(Error::Invariant(format!("bad timeout {s}"))),
                None => None,
            };
            Ok(match udgp::tribond(&list, *tol, timeout)? {
                TribondOutcome::Realized(x) => {
                    let (_, cost) = udgp::best_assignment(&x, &list);
                    let x: serde_json::Value = serde_json::from_str(&io::realization_to_json(&x))?;
                    to_json(&json!({"status": "realized", "cost": cost, "realization": x}))
                }
                TribondOutcome::Infeasible { best_depth } => {
                    to_json(&json!({"status": "infeasible", "best_depth": best_depth}))
                }
                TribondOutcome::TimedOut { best_depth } => {
                    to_json(&json!({"status": "timed_out", "best_depth": best_depth}))
                }
            })
        }
        Command::ReducePartition => {
            let a: Vec<u64> = serde_json::from_str(&text)?;
            Ok(io::instance_to_json(&embed::partition_to_edgp1(&a)?))
        }
        Command::EmbedFrechet => {
            let metric = FiniteMetric::new(io::load_matrix(&text)?)?;
            Ok(io::realization_to_json(&embed::frechet_embed(&metric)))
        }
        Command::Jll { epsilon, c } => {
            let input: PointsJson = serde_json::from_str(&text)?;
            let (points, report) = embed::jll_project_with(&input.points, *epsilon, *c, cli.seed)?;
            Ok(to_json(&json!({"points": points, "report": report})))
        }
        Command::Percolate(args) => {
            let patch = match (args.patch, args.gnp) {
                (Some(PatchKind::Triangular), None) => LatticePatch::Triangular {
                    rows: args.rows.unwrap_or(0),
                    cols: args.cols.unwrap_or(0),
                },
                (None, Some(n)) => LatticePatch::ErdosRenyi { n },
                _ => {
                    return Err(Error::Invariant(
                        "give either --patch triangular --rows R --cols C or --gnp N".into(),
                    ))
                }
            };
            if args.trials == 0 || args.p_list.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Invariant(
                    "need --trials >= 1 and every p in [0,1]".into(),
                ));
            }
            let rows = percolation::sweep(&patch, &args.p_list, args.trials, cli.seed, cli.jobs);
            Ok(percolation::sweep_to_csv(&rows))
        }
    }
}

fn rigidity_cmd(cli: &Cli, args: &RigidityArgs, text: &str) -> Result<String> {
    let inst = io::load_instance(text)?;
    let k = args.dim.unwrap_or(inst.k());
    let graph = inst.graph();
    let verdict = |v: rigidity::RigidityVerdict, label: &str| {
        let status = match v.status {
            RigidityStatus::Rigid => "rigid",
            RigidityStatus::Flexible => "flexible",
            RigidityStatus::DegenerateAffineHull => "degenerate_affine_hull",
        };
        to_json(&json!({"mode": label, "status": status, "rank": v.rank, "dof": v.dof}))
    };
    Ok(match args.mode {
        RigidityMode::Framework => {
            let path = args
                .x
                .as_ref()
                .ok_or_else(|| Error::Invariant("--mode framework needs --x".into()))?;
            let x = io::load_realization(&read_file(path)?)?;
            let fw = Framework::new(inst.with_dimension(x.k())?, x)?;
            verdict(rigidity::infinitesimal_rigidity(&fw, args.tol), "framework")
        }
        RigidityMode::Generic => verdict(
            rigidity::generic_rigidity(&graph, k, args.trials.max(1), cli.seed),
            "generic (probabilistic)",
        ),
        RigidityMode::Laman => to_json(&json!({"laman": rigidity::laman_bruteforce(&graph)?})),
        RigidityMode::Pebble => {
            let out = rigidity::pebble_game_2_3(&graph);
            let v = match out.verdict {
                PebbleVerdict::MinimallyRigid => "minimally_rigid",
                PebbleVerdict::RigidWithRedundancy => "rigid_with_redundancy",
                PebbleVerdict::Flexible => "flexible",
            };
            let components: Vec<Vec<usize>> = out
                .components
                .iter()
                .map(|c| c.iter().map(|v| v + 1).collect())
                .collect();
            to_json(&json!({"verdict": v, "components": components}))
        }
        RigidityMode::Global => to_json(&json!({
            "globally_rigid": rigidity::globally_rigid(&graph, k, args.trials.max(1), cli.seed)?
        })),
    })
}
