use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use selfplay::harness::{
    ablate, evaluate_checkpoint, format_ablation_table, inspect_checkpoint, standard_variants, train, ExperimentConfig,
    TrainOptions,
};
use selfplay::opponents::{cfr_solve, expected_values, GameTree, OpponentSpec};
use selfplay::GameId;

#[derive(Parser)]
#[command(name = "selfplay", version, about = "Turn-level self-play training for two-player text games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train from a TOML config.
    Train {
        config: PathBuf,
        /// Continue from the checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
        /// Overwrite an existing run or ignore a config mismatch on resume.
        #[arg(long)]
        force: bool,
    },
    /// Evaluate a checkpoint against an opponent.
    Evaluate {
        checkpoint: PathBuf,
        #[arg(long)]
        game: GameId,
        /// mcts:N, kuhn_nash:ALPHA, cfr:PATH, uniform or self.
        #[arg(long)]
        opponent: String,
        #[arg(long, default_value_t = 1000)]
        n_games: usize,
        #[arg(long, default_value_t = 0, env = "SELFPLAY_SEED")]
        seed: u64,
        /// Run config supplying the sampling settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Train the ablation matrix over several seeds.
    Ablate {
        config: PathBuf,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Defaults to the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve Kuhn or Leduc with CFR and write the average strategy table.
    Solve {
        #[arg(long)]
        game: GameId,
        #[arg(long, default_value_t = 100_000)]
        iterations: u64,
        #[arg(long)]
        out: PathBuf,
        /// Report exploitability every this many iterations.
        #[arg(long, default_value_t = 0)]
        trace_every: u64,
    },
    /// Pretty-print a trajectory log or summarize a checkpoint.
    Inspect {
        path: PathBuf,
        /// Print at most this many turns.
        #[arg(long, default_value_t = 50)]
        limit: usize,
    },
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config, resume, force } => {
            let cfg = load_config(&config)?;
            let summary = train(&cfg, &TrainOptions { resume, force, stop_after: None })?;
            println!("trained {} steps, {} decision points", summary.steps, summary.decision_points);
            for row in &summary.final_eval {
                println!(
                    "  {:<14} vs {:<22} mean {:+.4} ± {:.4}{}",
                    row.game.name(),
                    row.opponent,
                    row.mean,
                    row.ci95,
                    row.exact_mean.map(|v| format!("  exact {v:+.4}")).unwrap_or_default()
                );
            }
            println!("artifacts in {}", cfg.output_dir.display());
        }
        Command::Evaluate { checkpoint, game, opponent, n_games, seed, config, json } => {
            let cfg = match config {
                Some(p) => load_config(&p)?,
                None => ExperimentConfig::default(),
            };
            let spec: OpponentSpec = opponent.parse()?;
            let row = evaluate_checkpoint(&checkpoint, &cfg, game, &spec, n_games, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&row)?);
            } else {
                println!("{} vs {} over {} games (checkpoint step {})", game, row.opponent, row.n_games, row.step);
                println!("  seat 0 mean   {:+.4}", row.seat0);
                println!("  seat 1 mean   {:+.4}", row.seat1);
                println!("  mean          {:+.4} ± {:.4} (95%)", row.mean, row.ci95);
                println!("  normalized    {:+.4}", row.normalized);
                println!("  violations    {}", row.violations);
                if let Some(v) = row.exact_mean {
                    println!("  exact mean    {v:+.6}");
                }
            }
        }
        Command::Ablate { config, seeds, out } => {
            let cfg = load_config(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            let rows = ablate(&cfg, &standard_variants(), seeds, &out)?;
            print!("{}", format_ablation_table(&rows));
            println!("table written to {}", out.join("ablation.csv").display());
        }
        Command::Solve { game, iterations, out, trace_every } => {
            let result = cfr_solve(game, iterations, trace_every)?;
            for (it, expl) in &result.trace {
                println!("iteration {it:>9}  exploitability {expl:.6}");
            }
            let tree = GameTree::build(game)?;
            let values = expected_values(&tree, &result.average);
            println!("value to seat 0: {:+.6}", values[0]);
            let mut w = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            result.profile.write_table(&mut w)?;
            w.flush()?;
            println!("strategy written to {}", out.display());
        }
        Command::Inspect { path, limit } => {
            if path.extension().is_some_and(|e| e == "jsonl") {
                print_log(&path, limit)?;
            } else {
                let s = inspect_checkpoint(&path)?;
                println!("step            {}", s.step);
                println!("config digest   {}", s.config_digest);
                println!("decision points {}", s.decision_points);
                println!("parameters      {}", s.parameters);
                println!("max |logit|     {:.4}", s.max_abs_logit);
            }
        }
    }
    Ok(())
}

fn print_log(path: &Path, limit: usize) -> Result<()> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    println!(
        "{:>20} {:<12} {:>4} {:>3}  {:<28} {:>8} {:>7} {:>7} {:>8}",
        "episode", "game", "seat", "k", "action", "game", "format", "length", "total"
    );
    for (n, line) in BufReader::new(file).lines().enumerate() {
        if n >= limit {
            break;
        }
        let line = line?;
        let v: serde_json::Value =
            serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), n + 1))?;
        let Some(obj) = v.as_object() else {
            bail!("{}:{}: expected a JSON object", path.display(), n + 1);
        };
        let num = |k: &str| obj.get(k).and_then(|x| x.as_f64()).unwrap_or(f64::NAN);
        let text =
            |k: &str| obj.get(k).map(|x| x.as_str().map(String::from).unwrap_or(x.to_string())).unwrap_or_default();
        let end = if obj.get("terminal").and_then(|x| x.as_bool()).unwrap_or(false) { " *" } else { "" };
        println!(
            "{:>20} {:<12} {:>4} {:>3}  {:<28} {:>8.3} {:>7.3} {:>7.3} {:>8.3}{end}",
            text("episode_id"),
            text("game"),
            text("player"),
            text("k"),
            text("action"),
            num("reward_game"),
            num("reward_format"),
            num("reward_length"),
            num("reward_total"),
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
