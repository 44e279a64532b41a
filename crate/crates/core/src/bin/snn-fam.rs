use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use snn_fam::fam::{build_plan, Strategy};
use snn_fam::fault::{generate_fault_map, CrossbarGeometry, FaultMap, NeuronGranularity};
use snn_fam::harness::{
    self, analyze_neuron_faults, eval_row, load_datasets, run_sweep, test_accuracy, train_model,
    write_csv, ExperimentConfig, TrainedModel, NEURON_COLUMNS, ROW_COLUMNS,
};
use snn_fam::io::{dump_fault_map, load_fault_map, load_model, save_fault_map, save_model, save_plan};
use snn_fam::{Error, Result};

/// Fault injection, fault-aware mapping and accuracy/cost evaluation for SNN
/// crossbar accelerators.
///
/// Exit codes: 0 success, 2 configuration error, 3 data or artifact error,
/// 4 unmappable plan, 1 other failure.
#[derive(Parser)]
#[command(name = "snn-fam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a fault-free model, label its neurons and save it.
    Train(Common),
    /// Generate a random fault map.
    Inject(InjectArgs),
    /// Build a mapping plan for a fault map.
    Map(MapArgs),
    /// Evaluate a model on a faulty chip under one or more strategies.
    Eval(EvalArgs),
    /// Run the strategy x rate x seed sweep and write row and aggregate reports.
    Sweep(ModelArgs),
    /// Accuracy under each single kind of neuron fault.
    AnalyzeNeurons(ModelArgs),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed relevant to the command.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file or directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FaultSource {
    /// Saved fault map. Without it a map is generated from --rate and --seed.
    #[arg(long, conflicts_with = "rate")]
    faultmap: Option<PathBuf>,
    /// Fault rate for a generated map.
    #[arg(long)]
    rate: Option<f64>,
}

#[derive(Args)]
struct InjectArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    rate: f64,
    /// per_neuron or per_operation.
    #[arg(long)]
    granularity: Option<String>,
    /// Also write a text listing of every fault ("-" for stdout).
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    faults: FaultSource,
    #[arg(long)]
    strategy: Strategy,
    /// Take network dimensions from a saved model instead of the config.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    faults: FaultSource,
    #[arg(long)]
    model: PathBuf,
    /// Repeatable. Defaults to the config's strategy list.
    #[arg(long)]
    strategy: Vec<Strategy>,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    common: Common,
    /// Trained model. Without it a model is trained first.
    #[arg(long)]
    model: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train(c) => train(c),
        Command::Inject(a) => inject(a),
        Command::Map(a) => map(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::AnalyzeNeurons(a) => analyze(a),
    }
}

fn config(common: &Common) -> Result<ExperimentConfig> {
    match &common.config {
        Some(path) => ExperimentConfig::load(path),
        None => {
            let mut cfg = ExperimentConfig::default();
            cfg.resolve_paths(Path::new("."));
            Ok(cfg)
        }
    }
}

fn out_path(common: &Common, cfg: &ExperimentConfig, default: &str) -> Result<PathBuf> {
    let path = common.out.clone().unwrap_or_else(|| cfg.output_dir.join(default));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(path)
}

fn fault_map(cfg: &ExperimentConfig, faults: &FaultSource, seed: Option<u64>) -> Result<FaultMap> {
    match (&faults.faultmap, faults.rate) {
        (Some(path), _) => load_fault_map(path),
        (None, Some(rate)) => generate_fault_map(
            cfg.geometry()?,
            rate,
            seed.unwrap_or(0),
            cfg.crossbar.granularity,
        ),
        (None, None) => Err(Error::Config("give --faultmap or --rate".into())),
    }
}

fn train(c: Common) -> Result<()> {
    let cfg = config(&c)?;
    let data = load_datasets(&cfg)?;
    let seed = c.seed.unwrap_or(cfg.training.seed);
    let trained = train_model(&cfg, &data, seed)?;
    let path = out_path(&c, &cfg, "model.snnm")?;
    let fp = save_model(&trained.model, &path)?;
    let report = serde_json::json!({
        "config_fingerprint": cfg.fingerprint().to_string(),
        "model_fingerprint": fp.to_string(),
        "training_seed": seed,
        "train_images": data.train.len(),
        "test_images": data.test.len(),
        "fault_free_accuracy": trained.fault_free_accuracy,
    });
    fs::write(
        path.with_extension("json"),
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
    )?;
    println!(
        "fault-free accuracy {:.4}  model {}  -> {}",
        trained.fault_free_accuracy,
        fp.short(),
        path.display()
    );
    Ok(())
}

fn inject(a: InjectArgs) -> Result<()> {
    let cfg = config(&a.common)?;
    let geometry = CrossbarGeometry::new(
        a.rows.unwrap_or(cfg.crossbar.rows),
        a.cols.unwrap_or(cfg.crossbar.cols),
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let granularity = match a.granularity.as_deref() {
        None => cfg.crossbar.granularity,
        Some("per_neuron" | "per-neuron") => NeuronGranularity::PerNeuron,
        Some("per_operation" | "per-operation") => NeuronGranularity::PerOperation,
        Some(other) => return Err(Error::Config(format!("unknown granularity {other:?}"))),
    };
    if !(0.0..=1.0).contains(&a.rate) {
        return Err(Error::Config(format!("fault rate {} outside [0, 1]", a.rate)));
    }
    let map = generate_fault_map(geometry, a.rate, a.common.seed.unwrap_or(0), granularity)?;
    let path = out_path(&a.common, &cfg, "faultmap.snfm")?;
    let fp = save_fault_map(&map, &path)?;
    match a.dump.as_deref() {
        Some(p) if p == Path::new("-") => print!("{}", dump_fault_map(&map)),
        Some(p) => fs::write(p, dump_fault_map(&map))?,
        None => {}
    }
    println!(
        "{} faults ({} stuck bits, {} neuron ops) of {} locations  map {}  -> {}",
        map.fault_count(),
        map.stuck_bit_count(),
        map.faulty_neuron_op_count(),
        map.total_locations(),
        fp.short(),
        path.display()
    );
    Ok(())
}

fn map(a: MapArgs) -> Result<()> {
    let cfg = config(&a.common)?;
    let faults = fault_map(&cfg, &a.faults, a.common.seed)?;
    let (n_inputs, n_neurons) = match &a.model {
        Some(p) => {
            let m = load_model(p)?;
            (m.n_inputs(), m.n_neurons())
        }
        None => (harness::N_PIXELS, cfg.model.n_neurons),
    };
    let plan = build_plan(a.strategy, &faults, n_inputs, n_neurons)?;
    let path = out_path(&a.common, &cfg, "plan.snmp")?;
    let fp = save_plan(&plan, &path)?;
    println!(
        "{}: {} usable columns, {} excluded, {} passes, utilization {:.4}  plan {}  -> {}",
        plan.strategy(),
        plan.usable_cols(),
        plan.excluded().len(),
        plan.passes(),
        plan.utilization(),
        fp.short(),
        path.display()
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let cfg = config(&a.common)?;
    let model = load_model(&a.model)?;
    let faults = fault_map(&cfg, &a.faults, a.common.seed)?;
    let data = load_datasets(&cfg)?;
    let strategies = if a.strategy.is_empty() { cfg.sweep.strategies.clone() } else { a.strategy };
    let rows: Vec<_> = strategies
        .iter()
        .map(|&s| eval_row(&cfg, &model, &faults, s, &data.test))
        .collect();
    let ff = test_accuracy(&cfg, &model, &data.test)?;
    let path = out_path(&a.common, &cfg, "eval.csv")?;
    let header = [
        ("config_fingerprint", cfg.fingerprint().to_string()),
        ("model_fingerprint", model.fingerprint().to_string()),
        ("fault_map_fingerprint", faults.fingerprint().to_string()),
        ("fault_free_accuracy", ff.to_string()),
    ];
    write_csv(&path, &header, &ROW_COLUMNS, &rows)?;
    for r in &rows {
        match r.accuracy {
            Some(acc) => println!("{:<8} accuracy {:.4}  passes {}", r.strategy, acc, r.passes.unwrap_or(0)),
            None => println!("{:<8} {}", r.strategy, r.status),
        }
    }
    if rows.iter().any(|r| r.status == harness::ReportRow::UNMAPPABLE) {
        return Err(Error::Unmappable { cols: faults.geometry().cols });
    }
    Ok(())
}

fn trained_model(cfg: &ExperimentConfig, data: &harness::Datasets, model: Option<&Path>, out_dir: &Path) -> Result<TrainedModel> {
    match model {
        Some(p) => {
            let model = load_model(p)?;
            let fault_free_accuracy = test_accuracy(cfg, &model, &data.test)?;
            Ok(TrainedModel { model, fault_free_accuracy })
        }
        None => {
            let trained = train_model(cfg, data, cfg.training.seed)?;
            fs::create_dir_all(out_dir)?;
            save_model(&trained.model, out_dir.join("model.snnm"))?;
            Ok(trained)
        }
    }
}

fn sweep(a: ModelArgs) -> Result<()> {
    let mut cfg = config(&a.common)?;
    if let Some(seed) = a.common.seed {
        cfg.sweep.seeds = vec![seed];
    }
    let out_dir = a.common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let data = load_datasets(&cfg)?;
    let trained = trained_model(&cfg, &data, a.model.as_deref(), &out_dir)?;
    let outcome = run_sweep(&cfg, &trained, &data.test, &out_dir)?;
    println!(
        "fault-free accuracy {:.4}; {} rows ({} resumed) -> {}",
        trained.fault_free_accuracy,
        outcome.rows.len(),
        outcome.resumed,
        outcome.rows_path.display()
    );
    for c in &outcome.aggregate.cells {
        println!(
            "{:<8} rate {:<5} accuracy {:.4} +- {:.4}  throughput {:.1}  failed {}",
            c.strategy, c.rate, c.accuracy_mean, c.accuracy_std, c.throughput_mean, c.failed
        );
    }
    Ok(())
}

fn analyze(a: ModelArgs) -> Result<()> {
    let mut cfg = config(&a.common)?;
    if let Some(seed) = a.common.seed {
        cfg.sweep.seeds = vec![seed];
    }
    let data = load_datasets(&cfg)?;
    let trained = trained_model(&cfg, &data, a.model.as_deref(), &cfg.output_dir)?;
    let rows = analyze_neuron_faults(&cfg, &trained, &data.test)?;
    let path = out_path(&a.common, &cfg, "neuron_faults.csv")?;
    let header = [
        ("config_fingerprint", cfg.fingerprint().to_string()),
        ("model_fingerprint", trained.fingerprint().to_string()),
        ("fault_free_accuracy", trained.fault_free_accuracy.to_string()),
    ];
    write_csv(&path, &header, &NEURON_COLUMNS, &rows)?;
    for r in &rows {
        println!("{:<16} rate {:<5} seed {:<3} accuracy {:.4}", r.kind.name(), r.rate, r.seed, r.accuracy);
    }
    Ok(())
}
