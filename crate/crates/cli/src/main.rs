use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ndcolor::finisher::{finish, Fallback, FinisherConfig};
use ndcolor::format::{ColoringDoc, HypergraphDoc, InstanceDoc};
use ndcolor::hypergraph::Hypergraph;
use ndcolor::instance::max_member_color_degree;
use ndcolor::lab::chromatic::{chromatic_number, exhaustive_list_colorable, Colorability};
use ndcolor::lab::constructions::{construct_thm15ii, random_linear_hypergraph};
use ndcolor::lab::exact::{exact_expectations, DEFAULT_BUDGET};
use ndcolor::lab::monte_carlo::{monte_carlo, McOptions};
use ndcolor::nibble::{nibble_round, RoundMode};
use ndcolor::normalizer::{normalize, pad_lists, NormalizeOptions, DEFAULT_VERTEX_CAP};
use ndcolor::pipeline::{edge_color_hypergraph, run_pipeline, PipelineConfig, PipelineRun};
use ndcolor::schedule::{build_schedule, NibbleParams};
use ndcolor::{Assignment, Mode, UnionInstance};

#[derive(Parser)]
#[command(name = "ndcolor", version, about = "Coloring nearly disjoint graph unions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the (Λ_i, D_i) schedule as CSV.
    Schedule {
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        c: usize,
        /// Activation probability; defaults to 1 / ln D.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one nibble round and print the outcome as JSON.
    Nibble {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, value_enum, default_value_t = RoundArg::Practical)]
        mode: RoundArg,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        max_resamples: usize,
        /// Λ for the strict checks; defaults to the smallest list.
        #[arg(long)]
        lambda: Option<f64>,
        /// D for the strict checks; defaults to the largest color degree.
        #[arg(long)]
        d: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Write per-(vertex, color, graph) statistics to this CSV file.
        #[arg(long)]
        emit_stats: Option<PathBuf>,
    },
    /// Complete a coloring by resampling with a backtracking fallback.
    Finish {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8.0)]
        factor: f64,
        #[arg(long, default_value_t = 1000)]
        max_passes: usize,
        #[arg(long, value_enum, default_value_t = FallbackArg::Backtracking)]
        fallback: FallbackArg,
        /// Skip the list-ratio precondition.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed an instance into one with exact membership, list sizes and color degrees.
    Normalize {
        instance: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        dp: bool,
        /// Pad short lists with fresh colors first.
        #[arg(long)]
        pad: bool,
        #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
        vertex_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the relabeling maps to this JSON file.
        #[arg(long)]
        relabeling: Option<PathBuf>,
    },
    /// Color an instance end to end.
    Color {
        instance: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Color the edges of a linear hypergraph.
    EdgeColor {
        hypergraph: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Oracles and experiments.
    #[command(subcommand)]
    Lab(Lab),
}

#[derive(Subcommand)]
enum Lab {
    /// Exact expectations by full enumeration, as CSV.
    Exact {
        instance: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        dp: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimates with standard errors, as CSV.
    Mc {
        instance: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
        /// D for the exceptional-outcome measurement.
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one row per trial to this CSV file.
        #[arg(long)]
        trials_csv: Option<PathBuf>,
    },
    /// Chromatic number of the union, or with --lists whether the instance's lists admit a coloring.
    Chi {
        instance: PathBuf,
        #[arg(long)]
        lists: bool,
        #[arg(long)]
        dp: bool,
    },
    /// The three-graph family whose union needs n + 1 colors.
    ConstructT15ii {
        #[arg(long)]
        n: usize,
        /// List size for every vertex; defaults to n + 1.
        #[arg(long)]
        colors: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random linear hypergraph with bounded degree.
    GenHypergraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Correspondence mode.
    #[arg(long)]
    dp: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Follow the schedule instead of practical rounds.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 200)]
    round_cap: usize,
    /// Write the coloring JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the full run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundArg {
    Strict,
    Practical,
}

#[derive(Clone, Copy, ValueEnum)]
enum FallbackArg {
    None,
    Backtracking,
}

fn mode(dp: bool) -> Mode {
    if dp {
        Mode::Dp
    } else {
        Mode::List
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path, dp: bool) -> Result<(UnionInstance, Assignment)> {
    let doc = InstanceDoc::from_json(&read(path)?)?;
    let (inst, asg) = doc.build()?;
    if dp && doc.matchings.is_none() {
        let asg = Assignment::identity_matchings(&inst, asg.lists().to_vec())?;
        return Ok((inst, asg));
    }
    Ok((inst, asg))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn pretty(value: serde_json::Value) -> String {
    serde_json::to_string_pretty(&value).expect("reports serialize")
}

fn summary(run: &PipelineRun, vertices: usize) {
    let fin = run.finisher.as_ref();
    let rows = [
        ("status", if run.succeeded() { "verified".to_string() } else { format!("{:?}", run.status) }),
        ("vertices", vertices.to_string()),
        ("max color degree D", run.d.to_string()),
        ("nibble rounds", run.rounds.len().to_string()),
        ("colored by rounds", run.rounds.iter().map(|r| r.colored).sum::<usize>().to_string()),
        ("round cap hit", run.capped.to_string()),
        ("rounds stalled", run.stalled.to_string()),
        ("finisher", fin.map_or("not needed".into(), |f| format!("{:?}", f.status))),
        ("resample passes", fin.map_or(0, |f| f.conflicts_per_pass.len()).to_string()),
        ("rounds ms", format!("{:.1}", run.timings.rounds_ms)),
        ("finisher ms", format!("{:.1}", run.timings.finisher_ms)),
        ("verify ms", format!("{:.1}", run.timings.verify_ms)),
    ];
    for (k, v) in rows {
        eprintln!("{k:<20} {v}");
    }
    if let Some(reason) = &run.downgrade {
        eprintln!("{:<20} {reason}", "downgrade");
    }
}

fn pipeline_config(a: &RunArgs) -> PipelineConfig {
    PipelineConfig {
        eps: a.eps,
        round_mode: if a.strict { RoundMode::Strict } else { RoundMode::Practical },
        mode: mode(a.common.dp),
        seed: a.common.seed,
        p: a.p,
        round_cap: a.round_cap,
        ..PipelineConfig::default()
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Schedule { d, eps, c, p, out } => {
            let s = build_schedule(d, eps, c, p)?;
            emit(&out, &s.to_csv())?;
        }
        Command::Nibble { instance, p, mode: round, common, max_resamples, lambda, d, eps, emit_stats } => {
            let (inst, asg) = load_instance(&instance, common.dp)?;
            let m = mode(common.dp);
            let lambda = lambda.unwrap_or_else(|| asg.lists().iter().map(Vec::len).min().unwrap_or(1) as f64);
            let d = d.unwrap_or_else(|| max_member_color_degree(&inst, &asg, m).max(1) as f64);
            let params = NibbleParams::new(lambda, d, inst.c_bound(), p, eps)?;
            let round = match round {
                RoundArg::Strict => RoundMode::Strict,
                RoundArg::Practical => RoundMode::Practical,
            };
            let out = nibble_round(&inst, &asg, m, &params, round, common.seed, max_resamples)?;
            if let Some(path) = emit_stats {
                fs::write(&path, out.stats.to_csv(&inst)).with_context(|| format!("writing {}", path.display()))?;
            }
            let lists: serde_json::Map<String, serde_json::Value> = (0..inst.num_vertices())
                .filter(|&v| !out.in_x[v])
                .map(|v| (inst.vertex_id(v).to_string(), json!(out.new_lists[v])))
                .collect();
            let doc = json!({
                "colored": ColoringDoc::new(&inst, &out.phi).coloring,
                "lists": lists,
                "activated": out.sample.activated_vertices().map(|v| inst.vertex_id(v)).collect::<Vec<_>>(),
                "resamples": out.resample_count,
                "gated_by_events": out.gated_by_events,
            });
            println!("{}", pretty(doc));
        }
        Command::Finish { instance, common, factor, max_passes, fallback, force, out } => {
            let (inst, asg) = load_instance(&instance, common.dp)?;
            let cfg = FinisherConfig {
                factor_required: factor,
                max_resample_passes: max_passes,
                fallback: match fallback {
                    FallbackArg::None => Fallback::None,
                    FallbackArg::Backtracking => Fallback::Backtracking,
                },
                force,
                ..FinisherConfig::default()
            };
            let rep = finish(&inst, &asg, mode(common.dp), &cfg, common.seed)?;
            let doc = json!({
                "status": rep.status,
                "coloring": rep.coloring.as_ref().map(|c| ColoringDoc::new(&inst, c).coloring),
                "conflicts_per_pass": rep.conflicts_per_pass,
                "conflict_histogram": rep.conflict_histogram,
                "backtrack_nodes": rep.backtrack_nodes,
                "ratio": rep.ratio,
            });
            emit(&out, &pretty(doc))?;
            return Ok(status(rep.succeeded()));
        }
        Command::Normalize { instance, d, lambda, dp, pad, vertex_cap, out, relabeling } => {
            let (inst, mut asg) = load_instance(&instance, dp)?;
            if pad {
                asg = pad_lists(&inst, &asg, lambda)?;
            }
            let n = normalize(&inst, &asg, d, lambda, &NormalizeOptions { mode: mode(dp), vertex_cap })?;
            emit(&out, &InstanceDoc::from_instance(&n.instance, &n.assignment, dp).to_json())?;
            if let Some(path) = relabeling {
                fs::write(&path, pretty(json!(n.relabeling))).with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("{} vertices, {} graphs, {} blow-up iterations", n.instance.num_vertices(), n.instance.num_graphs(), n.iterations.len());
        }
        Command::Color { instance, run } => {
            let (inst, asg) = load_instance(&instance, run.common.dp)?;
            let r = run_pipeline(&inst, &asg, &pipeline_config(&run))?;
            summary(&r, inst.num_vertices());
            if let Some(path) = &run.report {
                fs::write(path, pretty(json!(r))).with_context(|| format!("writing {}", path.display()))?;
            }
            if r.succeeded() {
                emit(&run.out, &pretty(json!(ColoringDoc::new(&inst, &r.coloring))))?;
            }
            return Ok(status(r.succeeded()));
        }
        Command::EdgeColor { hypergraph, run } => {
            let doc: HypergraphDoc = serde_json::from_str(&read(&hypergraph)?).context("parsing hypergraph")?;
            let h = Hypergraph::from_doc(&doc)?;
            let r = edge_color_hypergraph(&h, &pipeline_config(&run))?;
            summary(&r.run, h.num_edges());
            eprintln!("{:<20} {} of {}", "colors used", r.colors_used, r.palette);
            if let Some(path) = &run.report {
                fs::write(path, pretty(json!(r))).with_context(|| format!("writing {}", path.display()))?;
            }
            if r.run.succeeded() {
                let edges: Vec<_> = h
                    .edges()
                    .iter()
                    .zip(&r.colors)
                    .map(|(e, c)| json!({"edge": e.iter().map(|&x| &h.vertices()[x]).collect::<Vec<_>>(), "color": c}))
                    .collect();
                emit(&run.out, &pretty(json!({ "edges": edges })))?;
            }
            return Ok(status(r.run.succeeded()));
        }
        Command::Lab(lab) => return run_lab(lab),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_lab(lab: Lab) -> Result<ExitCode> {
    match lab {
        Lab::Exact { instance, p, dp, budget, out } => {
            let (inst, asg) = load_instance(&instance, dp)?;
            let r = exact_expectations(&inst, &asg, mode(dp), p, budget)?;
            emit(&out, &r.to_csv())?;
            eprintln!(
                "{} outcomes, weight sum {:.15}, normalized {:?}, max |exact - formula| {:?}",
                r.outcomes, r.weight_sum, r.normalized, r.max_abs_diff
            );
        }
        Lab::Mc { instance, p, trials, common, d, out, trials_csv } => {
            if trials < 1000 {
                bail!("at least 1000 trials are required, got {trials}");
            }
            let (inst, asg) = load_instance(&instance, common.dp)?;
            let opts = McOptions { trials, seed: common.seed, d_param: d, record_trials: trials_csv.is_some() };
            let r = monte_carlo(&inst, &asg, mode(common.dp), p, &opts)?;
            emit(&out, &r.to_csv())?;
            if let Some(path) = trials_csv {
                let mut csv = String::from("trial,activated,colored,mean_ell,d_exceeds_a_plus_k,omega_star\n");
                for t in &r.rows {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        t.trial, t.activated, t.colored, t.mean_ell, t.d_exceeds_a_plus_k, t.omega_star
                    ));
                }
                fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("{} trials; d > a + k in {} trials", r.trials, r.d_exceeds_a_plus_k_trials);
        }
        Lab::Chi { instance, lists, dp } => {
            let (inst, asg) = load_instance(&instance, dp)?;
            if lists {
                let v = exhaustive_list_colorable(&inst, &asg, mode(dp))?;
                let doc = match &v {
                    Colorability::Colorable { coloring, nodes } => {
                        json!({"colorable": true, "coloring": ColoringDoc::new(&inst, coloring).coloring, "nodes": nodes})
                    }
                    Colorability::NotColorable { nodes } => json!({"colorable": false, "nodes": nodes}),
                };
                println!("{}", pretty(doc));
                return Ok(status(v.is_colorable()));
            }
            let w = chromatic_number(&inst)?;
            let doc = json!({"chi": w.chi, "coloring": ColoringDoc::new(&inst, &w.coloring).coloring, "nodes": w.nodes});
            println!("{}", pretty(doc));
        }
        Lab::ConstructT15ii { n, colors, out } => {
            let inst = construct_thm15ii(n)?;
            let asg = Assignment::uniform(&inst, 1, colors.unwrap_or(n + 1));
            emit(&out, &InstanceDoc::from_instance(&inst, &asg, false).to_json())?;
        }
        Lab::GenHypergraph { n, k, d, seed, out } => {
            let g = random_linear_hypergraph(n, k, d, seed)?;
            emit(&out, &pretty(json!(g.hypergraph.to_doc())))?;
            eprintln!(
                "{} edges of target {}, max degree {}, {} attempts",
                g.hypergraph.num_edges(),
                g.target_edges,
                g.hypergraph.max_degree(),
                g.attempts
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
