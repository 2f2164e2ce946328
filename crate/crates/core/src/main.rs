use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wirehead::analysis::{condition_report, oracle_sweep, ConditionInputs};
use wirehead::harness::{
    builtin_experiments, emit_charts, emit_csv, emit_qtables, replay, run_experiment, stats, ExperimentConfig,
    Trajectory,
};
use wirehead::qlearn::{load_snapshot, run_episode_recorded};
use wirehead::rng::{derive_seed, label, rng_from_seed};
use wirehead::tdrl::{simulate_trials, ChainMdp, TdVariant, TdrlModel};
use wirehead::{Error, Result};

const OUT_ENV: &str = "WIREHEAD_OUT";

#[derive(Parser)]
#[command(name = "wirehead", version, about = "Addictive-behaviour experiments with Q-learning agents in Snake")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate built-in experiments or a config file.
    Train {
        /// Built-in experiment: 1, 2, 3 or all.
        #[arg(long, default_value = "all", conflicts_with = "config")]
        experiment: String,
        /// Experiment config JSON (same format as the emitted config.json).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: $WIREHEAD_OUT or ./results).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        episodes: Option<u64>,
        #[arg(long)]
        repeats: Option<u32>,
        #[arg(long = "test-episodes")]
        test_episodes: Option<u32>,
        /// Skip SVG charts.
        #[arg(long)]
        no_charts: bool,
    },
    /// Run greedy test episodes with a saved Q-table.
    Evaluate {
        /// Q-table snapshot.
        #[arg(long)]
        qtable: PathBuf,
        /// Game settings: built-in experiment 1, 2 or 3.
        #[arg(long, default_value = "1", conflicts_with = "config")]
        experiment: String,
        /// Game settings from an experiment config JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        episodes: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Save the first episode as a replayable trajectory.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Report the closed-form addiction conditions.
    AnalyzeConditions {
        #[arg(long)]
        k: f64,
        #[arg(long)]
        u: f64,
        #[arg(long = "r_c", alias = "r-c", default_value_t = 20.0)]
        r_c: f64,
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        #[arg(long, default_value_t = 8)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        l0: u32,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Compare the value-iteration oracle with the closed-form preference rule.
    Oracle {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Animate a recorded trajectory in the terminal.
    Replay {
        trajectory: PathBuf,
        /// Frames per second; 0 prints without pausing.
        #[arg(long, default_value_t = 8.0)]
        fps: f64,
    },
    /// Chain-MDP TD simulation with a drug surge at the last state.
    Tdrl {
        #[arg(long = "drug-surge", default_value_t = 0.5)]
        drug_surge: f64,
        #[arg(long, default_value_t = 5000)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 0.1)]
        nu: f64,
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        /// Reward on entering the last state.
        #[arg(long, default_value_t = 1.0)]
        reward: f64,
        #[arg(long, value_enum, default_value_t = Variant::Verbatim)]
        variant: Variant,
        /// Write the value history CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Verbatim,
    Standard,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train {
            experiment,
            config,
            seed,
            out,
            episodes,
            repeats,
            test_episodes,
            no_charts,
        } => {
            let mut configs = match config {
                Some(path) => vec![read_config(&path)?],
                None => select_builtin(&experiment, seed.unwrap_or(0), true)?,
            };
            for c in &mut configs {
                if let Some(s) = seed {
                    c.master_seed = s;
                }
                if let Some(e) = episodes {
                    c.episodes = e;
                }
                if let Some(r) = repeats {
                    c.repeats = r;
                }
                if let Some(t) = test_episodes {
                    c.test_episodes = t;
                }
                c.validate()?;
            }
            train(&configs, &output_dir(out), !no_charts)
        }
        Command::Evaluate {
            qtable,
            experiment,
            config,
            episodes,
            seed,
            record,
        } => {
            let cfg = match config {
                Some(path) => read_config(&path)?,
                None => select_builtin(&experiment, 0, false)?.remove(0),
            };
            evaluate(&cfg, &qtable, episodes, seed, record.as_deref())
        }
        Command::AnalyzeConditions {
            k,
            u,
            r_c,
            gamma,
            n,
            l0,
            json,
        } => {
            let report = condition_report(ConditionInputs { k, u, r_c, gamma, n, l0 })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                println!("{report}");
            }
            Ok(())
        }
        Command::Oracle { samples, seed } => {
            let r = oracle_sweep(samples, seed)?;
            println!(
                "samples {} | premise held {} | agreements {} | drug optimal {} | disagreements {}",
                r.samples,
                r.premise_held,
                r.agreements,
                r.drug_optimal,
                r.disagreements.len()
            );
            for d in &r.disagreements {
                println!("disagreement: {d:?}");
            }
            if r.all_agree() {
                Ok(())
            } else {
                Err(Error::Domain("oracle and closed form disagree".into()))
            }
        }
        Command::Replay { trajectory, fps } => {
            let traj = Trajectory::load(&trajectory)?;
            let stdout = std::io::stdout();
            replay(&traj, fps, &mut stdout.lock())
        }
        Command::Tdrl {
            drug_surge,
            trials,
            states,
            nu,
            gamma,
            reward,
            variant,
            out,
        } => {
            if states < 2 {
                return Err(Error::Config("--states must be >= 2".into()));
            }
            let mut rewards = vec![0.0; states];
            rewards[states - 1] = reward;
            let chain = ChainMdp::linear(rewards, [states - 1])?;
            let variant = match variant {
                Variant::Verbatim => TdVariant::Verbatim,
                Variant::Standard => TdVariant::Standard,
            };
            let mut model = TdrlModel::new(states, nu, gamma, drug_surge)?.with_variant(variant);
            let history = simulate_trials(&chain, &mut model, trials)?;
            println!("trials {trials} | drug surge D = {drug_surge} | nu = {nu} | gamma = {gamma}");
            for (s, v) in model.values().iter().enumerate() {
                println!("V({s}) = {v}");
            }
            println!("max |delta| in final trial = {}", history.final_max_abs_delta());
            if let Some(path) = out {
                history.write_csv(&path)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn output_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentConfig::from_json(&text)
}

fn select_builtin(which: &str, seed: u64, allow_all: bool) -> Result<Vec<ExperimentConfig>> {
    let all = builtin_experiments(seed);
    match which {
        "1" | "2" | "3" => Ok(vec![all[which.parse::<usize>().unwrap() - 1].clone()]),
        "all" if allow_all => Ok(all.to_vec()),
        other => Err(Error::Usage(format!(
            "unknown experiment `{other}` (expected 1, 2, 3{})",
            if allow_all { " or all" } else { "" }
        ))),
    }
}

fn train(configs: &[ExperimentConfig], out: &Path, charts: bool) -> Result<()> {
    let mut results = Vec::with_capacity(configs.len());
    for cfg in configs {
        let started = std::time::Instant::now();
        let art = run_experiment(cfg)?;
        let dir = out.join(&cfg.label);
        emit_csv(&art, &dir)?;
        emit_qtables(&art, &dir.join("qtables"))?;
        let means = art.per_repeat_mean_test_return();
        let consumption = art.per_repeat_mean_consumption();
        let seeds: Vec<f64> = consumption.iter().map(|c| c.0).collect();
        let drugs: Vec<f64> = consumption.iter().map(|c| c.1).collect();
        eprintln!(
            "{}: test return {:.1} ± {:.1} | seeds/ep {:.2} | drugs/ep {:.2} | {:.1}s -> {}",
            cfg.label,
            stats::mean(&means),
            stats::sample_std(&means),
            stats::mean(&seeds),
            stats::mean(&drugs),
            started.elapsed().as_secs_f64(),
            dir.display()
        );
        results.push(art);
    }
    if charts {
        let refs: Vec<_> = results.iter().collect();
        emit_charts(&refs, out)?;
    }
    std::io::stderr().flush().ok();
    Ok(())
}

fn evaluate(cfg: &ExperimentConfig, qtable: &Path, episodes: u32, seed: u64, record: Option<&Path>) -> Result<()> {
    if episodes < 1 {
        return Err(Error::Config("--episodes must be >= 1".into()));
    }
    let mut table = load_snapshot(qtable)?;
    let mut rng = rng_from_seed(derive_seed(seed, label::TEST_AGENT, 0));
    println!("episode,return,steps,seeds,drugs,length");
    let mut returns = Vec::with_capacity(episodes as usize);
    for ep in 0..episodes as u64 {
        let game = cfg.game.with_seed(derive_seed(seed, label::TEST_ENV, ep));
        let (s, actions) = run_episode_recorded(&game, &mut table, &cfg.learn, 0.0, &mut rng, false)?;
        if ep == 0 {
            if let Some(path) = record {
                Trajectory { game, actions }.save(path)?;
            }
        }
        println!("{ep},{},{},{},{},{}", s.ret, s.steps, s.seeds_eaten, s.drugs_eaten, s.final_length);
        returns.push(s.ret);
    }
    eprintln!(
        "mean return {} ± {} over {episodes} episodes",
        stats::mean(&returns),
        stats::sample_std(&returns)
    );
    Ok(())
}
