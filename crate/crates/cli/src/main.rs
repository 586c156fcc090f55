use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use log::info;

use snlu::datagen::{generate, write_outputs, GenSpec, DEFAULT_ENTITY_TYPO_RATE};
use snlu::eval::{ablation_run, bias_sweep, evaluate, significance, Evaluation, Variant};
use snlu::pipeline::{load_bundle, prepare, save_bundle, train_pipeline, Engine, PipelineConfig};

#[derive(Parser)]
#[command(name = "snlu", version, about = "Staged intent classification and slot tagging")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset, gazetteer, taxonomy, rules and config.
    GenData(GenDataArgs),
    /// Train both models and write a bundle.
    Train(TrainArgs),
    /// Score a bundle on the test split of its dataset.
    Eval(EvalArgs),
    /// Run one query and print the result as JSON.
    Predict(PredictArgs),
    /// Read queries from stdin, one per line, and print one JSON object each.
    Repl(ReplArgs),
    /// Test accuracy for several bias percentages and seeds.
    BiasSweep(SweepArgs),
    /// Train and score the single-tier, no-substitution and final variants.
    Ablate(AblateArgs),
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Number of queries.
    #[arg(long)]
    total: Option<usize>,
    /// Misspell or truncate some entity mentions.
    #[arg(long)]
    entity_typos: bool,
    /// Entity typo probability; implies --entity-typos.
    #[arg(long)]
    entity_typo_rate: Option<f64>,
}

#[derive(Args)]
struct RunOverrides {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Caps the training split.
    #[arg(long)]
    limit: Option<usize>,
}

impl RunOverrides {
    fn load(&self) -> snlu::Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.limit.is_some() {
            cfg.limit = self.limit;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    run: RunOverrides,
    /// Bundle path. Per-epoch logs are written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Config naming the dataset; the split follows the bundle's seed and limit.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    text: String,
    /// Accepted for symmetry with the other commands; the bundle is self-contained.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReplArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunOverrides,
    #[arg(long, default_value = "0,0.05,0.1,0.15,0.2", value_parser = parse_list::<f64>)]
    bias_values: std::vec::Vec<f64>,
    #[arg(long, default_value = "0,1,2", value_parser = parse_list::<u64>)]
    seeds: std::vec::Vec<u64>,
    /// Output directory for bias_sweep.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    run: RunOverrides,
    #[arg(long, default_value = "0,1,2", value_parser = parse_list::<u64>)]
    seeds: std::vec::Vec<u64>,
    /// Output directory for ablation.csv and ablation_runs.csv.
    #[arg(long)]
    out: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> snlu::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> snlu::Error {
    snlu::Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn print_json(engine: &Engine, out: &snlu::pipeline::PipelineOutput) -> snlu::Result<String> {
    Ok(serde_json::to_string(&engine.to_record(out))?)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn run(cmd: Command) -> snlu::Result<()> {
    match cmd {
        Command::GenData(a) => {
            let rate = match (a.entity_typo_rate, a.entity_typos) {
                (Some(r), _) => r,
                (None, true) => DEFAULT_ENTITY_TYPO_RATE,
                (None, false) => 0.0,
            };
            let mut spec = GenSpec::default().with_seed(a.seed).with_entity_typos(rate);
            if let Some(t) = a.total {
                spec.total = t;
            }
            let g = generate(&spec)?;
            write_outputs(&g, &a.out, a.seed)?;
            info!("wrote {} queries to {}", g.dataset.len(), a.out.display());
        }
        Command::Train(a) => {
            let cfg = a.run.load()?;
            let trained = train_pipeline(&cfg)?;
            save_bundle(&trained.engine, &a.out)?;
            write_file(&sibling(&a.out, "category.csv"), &trained.category_log.to_csv())?;
            write_file(&sibling(&a.out, "subcategory.csv"), &trained.subcategory.log.to_csv())?;
            info!("wrote {}", a.out.display());
        }
        Command::Eval(a) => {
            let engine = load_bundle(&a.bundle)?;
            let mut cfg = PipelineConfig::load(&a.config)?;
            cfg.seed = engine.meta.seed;
            cfg.limit = engine.meta.limit;
            let prepared = prepare(&cfg)?;
            let e = evaluate(&engine, &prepared.split.test)?;
            println!("{}", Evaluation::CSV_HEADER);
            println!("{}", e.csv_fields());
        }
        Command::Predict(a) => {
            let engine = load_bundle(&a.bundle)?;
            let out = engine.run_text(&a.text)?;
            println!("{}", print_json(&engine, &out)?);
        }
        Command::Repl(a) => {
            let engine = load_bundle(&a.bundle)?;
            let stdin = std::io::stdin();
            let mut stdout = std::io::stdout().lock();
            for line in stdin.lock().lines() {
                let line = line.map_err(|e| io_error(Path::new("<stdin>"), e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let text = match engine.run_text(&line) {
                    Ok(out) => print_json(&engine, &out)?,
                    Err(e) => serde_json::json!({ "error": e.to_string() }).to_string(),
                };
                writeln!(stdout, "{text}").map_err(|e| io_error(Path::new("<stdout>"), e))?;
                stdout.flush().map_err(|e| io_error(Path::new("<stdout>"), e))?;
            }
        }
        Command::BiasSweep(a) => {
            let cfg = a.run.load()?;
            let sweep = bias_sweep(&cfg, &a.bias_values, &a.seeds)?;
            write_file(&a.out.join("bias_sweep.csv"), &sweep.to_csv())?;
            println!("bias,mean_accuracy,sd");
            for (b, m, s) in sweep.summary() {
                println!("{b},{m},{s}");
            }
            let base = sweep.accuracies(0.0);
            for (b, _, _) in sweep.summary() {
                if b == 0.0 {
                    continue;
                }
                match significance(&sweep.accuracies(b), &base) {
                    Ok(p) => println!("# bias {b} > 0: one-sided p = {p}"),
                    Err(e) => info!("no significance for bias {b}: {e}"),
                }
            }
        }
        Command::Ablate(a) => {
            let cfg = a.run.load()?;
            let table = ablation_run(&cfg, &Variant::ALL, &a.seeds)?;
            let mut runs = format!("variant,seed,{}\n", Evaluation::CSV_HEADER);
            for c in &table.cells {
                runs.push_str(&format!("{},{},{}\n", c.variant.name(), c.seed, c.evaluation.csv_fields()));
            }
            write_file(&a.out.join("ablation_runs.csv"), &runs)?;
            let medians = table.to_csv();
            write_file(&a.out.join("ablation.csv"), &medians)?;
            print!("{medians}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SNLU_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
