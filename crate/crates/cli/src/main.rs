//! Command-line front end: graph measures, loss-table generation, single
//! simulations, config-driven sweeps, guarantee checks, and plots.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use banditsim::adversary::{
    bernoulli_adversary, gaussian_walk_adversary, meta_json, read_table_csv, split_adversary,
    write_table_csv,
};
use banditsim::engine::{run_game_config, write_trace_csv};
use banditsim::graphs::{parse_graph, GraphSequence, SequenceSpec};
use banditsim::harness::{
    check_bounds, emit_plots, load_config, read_sweep_csv, render_bounds_text, run_sweep,
    write_bounds_csv, write_sweep_csv, write_timing_csv,
};
use banditsim::measures::{greedy_sequence_split, measure_report, ExactOptions};

#[derive(Parser)]
#[command(
    name = "banditsim",
    about = "Online learning with graph feedback and switching costs: \
             graph measures, adversaries, simulations, sweeps, and bound checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute graph measures for one or more graph files (or generator specs).
    Measure {
        /// Graph files or generator specs like "cliques:k=25,alpha=5".
        inputs: Vec<String>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Raise the exact-measure action limit (default 24, capped at 64).
        #[arg(long)]
        exact_limit: Option<usize>,
        /// Also compute the greedy contiguous split for this cost scale.
        #[arg(long)]
        split_cost: Option<f64>,
    },
    /// Generate a loss table and write it as CSV (plus a meta JSON sidecar).
    Adversary {
        /// Table kind: walk, split, bernoulli, or file (re-validates a CSV).
        #[arg(long)]
        kind: String,
        /// Graph file or generator spec.
        #[arg(long)]
        graphs: String,
        /// Number of rounds.
        #[arg(long = "T", default_value_t = 1000)]
        rounds: usize,
        /// Switching-cost scale for the walk construction.
        #[arg(long, default_value_t = 0.35)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Input CSV for --kind file.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run each experiment of a config once and export traces.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override every experiment's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print per-run summaries as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the full sweep of a config and write results CSVs.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Override every experiment's seed count.
        #[arg(long)]
        seeds: Option<usize>,
        /// Also render the SVG plots.
        #[arg(long)]
        plots: bool,
    },
    /// Evaluate the theoretical guarantees for a config.
    ///
    /// Exits with status 2 when any check fails.
    CheckBounds {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Render SVG plots from a sweep results CSV.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn load_sequence(input: &str, rounds: usize) -> Result<GraphSequence> {
    let spec = if Path::new(input).exists() {
        let text = fs::read_to_string(input)?;
        let parsed = parse_graph(&text)?;
        for w in &parsed.warnings {
            eprintln!("warning: {input}: {w}");
        }
        SequenceSpec::Fixed {
            graph: std::sync::Arc::new(parsed.graph),
        }
    } else {
        SequenceSpec::parse(input)
            .with_context(|| format!("{input:?} is neither a file nor a generator spec"))?
    };
    Ok(spec.materialize(rounds)?)
}

fn cmd_measure(
    inputs: &[String],
    json: bool,
    exact_limit: Option<usize>,
    split_cost: Option<f64>,
) -> Result<()> {
    if inputs.is_empty() {
        bail!("measure needs at least one graph file or generator spec");
    }
    let mut graphs = Vec::new();
    for input in inputs {
        if Path::new(input).exists() {
            let text =
                fs::read_to_string(input).with_context(|| format!("reading {input:?}"))?;
            let parsed = parse_graph(&text)?;
            for w in &parsed.warnings {
                eprintln!("warning: {input}: {w}");
            }
            graphs.push(parsed.graph);
        } else if input.contains(':') {
            let (kind, k, seed) = banditsim::graphs::parse_generator_spec(input)?;
            graphs.push(banditsim::graphs::generate_graph(&kind, k, seed)?);
        } else {
            bail!("{input:?} is neither a file nor a generator spec");
        }
    }
    let sequence = if graphs.len() == 1 {
        GraphSequence::fixed(graphs.pop().expect("one graph"), 1)?
    } else {
        GraphSequence::varying(graphs)?
    };
    let mut opts = ExactOptions::default();
    if let Some(limit) = exact_limit {
        opts.max_k = limit;
    }
    let report = measure_report(&sequence, &opts)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.render_text());
    }
    if let Some(c) = split_cost {
        let split = greedy_sequence_split(&sequence, c, &opts)?;
        if json {
            let blocks: Vec<(usize, usize)> =
                split.blocks.iter().map(|r| (r.start, r.end)).collect();
            println!(
                "{}",
                serde_json::json!({
                    "blocks": blocks,
                    "betas": split.betas,
                    "objective": split.objective,
                })
            );
        } else {
            println!(
                "greedy split:             {} block(s), objective {:.4}",
                split.blocks.len(),
                split.objective
            );
            for (range, beta) in split.blocks.iter().zip(&split.betas) {
                println!("  rounds {}..{}  beta = {beta}", range.start + 1, range.end);
            }
        }
    }
    Ok(())
}

fn cmd_adversary(
    kind: &str,
    graphs: &str,
    rounds: usize,
    c: f64,
    seed: u64,
    input: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let table = match kind {
        "walk" => {
            let seq = load_sequence(graphs, rounds)?;
            gaussian_walk_adversary(&seq, c, seed)?
        }
        "split" => {
            let seq = load_sequence(graphs, rounds)?;
            let split = greedy_sequence_split(&seq, c, &ExactOptions::wide())?;
            split_adversary(&seq, c, seed, &split.block_indices())?
        }
        "bernoulli" => {
            let seq = load_sequence(graphs, rounds)?;
            bernoulli_adversary(&seq, seed)?
        }
        "file" => {
            let path = input.context("--kind file requires --input <csv>")?;
            let file = fs::File::open(path)?;
            read_table_csv(&mut BufReader::new(file))?
        }
        other => bail!("unknown adversary kind {other:?} (walk, split, bernoulli, file)"),
    };
    fs::create_dir_all(out)?;
    let csv_path = out.join("losses.csv");
    let mut file = fs::File::create(&csv_path)?;
    write_table_csv(&table, &mut file)?;
    println!(
        "wrote {} ({} rounds x {} actions)",
        csv_path.display(),
        table.rounds(),
        table.num_actions()
    );
    if let Some(json) = meta_json(&table) {
        let meta_path = out.join("losses.meta.json");
        fs::write(&meta_path, json)?;
        println!("wrote {}", meta_path.display());
    }
    Ok(())
}

fn cmd_simulate(config: &Path, out: &Path, seed: Option<u64>, json: bool) -> Result<()> {
    let config = load_config(config)?.with_overrides(seed, None);
    fs::create_dir_all(out)?;
    for exp in &config.experiments {
        for policy in &exp.policies {
            for &rounds in &exp.rounds_grid {
                let game = exp.game_config(policy, rounds)?;
                let trace = run_game_config(&game)?;
                let name = format!("{}_{}_T{}.csv", exp.name, policy.name(), rounds);
                let path = out.join(&name);
                let mut file = fs::File::create(&path)?;
                write_trace_csv(&trace, &mut file)?;
                if json {
                    println!(
                        "{}",
                        serde_json::json!({
                            "experiment": exp.name,
                            "policy": policy.name(),
                            "rounds": rounds,
                            "regret": trace.realized_regret,
                            "switches": trace.switch_count,
                            "loss": trace.realized_loss_sum,
                            "best_fixed_loss": trace.best_fixed_loss,
                            "trace": path.display().to_string(),
                        })
                    );
                } else {
                    println!(
                        "{:<14} {:<15} T={:<7} regret={:<10.3} switches={:<6} -> {}",
                        exp.name,
                        policy.name(),
                        rounds,
                        trace.realized_regret,
                        trace.switch_count,
                        path.display()
                    );
                }
            }
        }
    }
    Ok(())
}

fn cmd_sweep(
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    seeds: Option<usize>,
    plots: bool,
) -> Result<()> {
    let config = load_config(config)?.with_overrides(seed, seeds);
    let rows = run_sweep(&config)?;
    fs::create_dir_all(out)?;
    let results = out.join("results.csv");
    let mut file = fs::File::create(&results)?;
    write_sweep_csv(&rows, &mut file)?;
    let timing = out.join("timing.csv");
    let mut file = fs::File::create(&timing)?;
    write_timing_csv(&rows, &mut file)?;
    println!("wrote {} and {}", results.display(), timing.display());
    for row in rows.iter().filter(|r| r.status != "ok") {
        eprintln!(
            "warning: {} / {} / T={} failed: {}",
            row.experiment, row.policy, row.rounds, row.status
        );
    }
    if plots {
        for path in emit_plots(&rows, out)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_check_bounds(
    config: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
    seeds: Option<usize>,
    json: bool,
) -> Result<bool> {
    let config = load_config(config)?.with_overrides(seed, seeds);
    let report = check_bounds(&config)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", render_bounds_text(&report));
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let path = dir.join("bounds.csv");
        let mut file = fs::File::create(&path)?;
        write_bounds_csv(&report, &mut file)?;
        println!("wrote {}", path.display());
    }
    Ok(report.all_pass())
}

fn cmd_plot(csv: &Path, out: &Path) -> Result<()> {
    let rows = read_sweep_csv(csv)?;
    for path in emit_plots(&rows, out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Measure {
            inputs,
            json,
            exact_limit,
            split_cost,
        } => cmd_measure(&inputs, json, exact_limit, split_cost)?,
        Command::Adversary {
            kind,
            graphs,
            rounds,
            c,
            seed,
            input,
            out,
        } => cmd_adversary(&kind, &graphs, rounds, c, seed, input.as_deref(), &out)?,
        Command::Simulate {
            config,
            out,
            seed,
            json,
        } => cmd_simulate(&config, &out, seed, json)?,
        Command::Sweep {
            config,
            out,
            seed,
            seeds,
            plots,
        } => cmd_sweep(&config, &out, seed, seeds, plots)?,
        Command::CheckBounds {
            config,
            out,
            seed,
            seeds,
            json,
        } => {
            let all_pass = cmd_check_bounds(&config, out.as_deref(), seed, seeds, json)?;
            if !all_pass {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Plot { csv, out } => cmd_plot(&csv, &out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::init();
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
