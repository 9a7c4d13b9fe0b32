use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use wsplab::bounds::{self, BoundIngredients, BoundKind};
use wsplab::experiments::{self, ExperimentConfig};
use wsplab::filters::{apply_graph_filter, estimate_spectral_profile, PROFILE_GRID};
use wsplab::gnn::{gnn_forward, train_adam, Checkpoint, Dataset, TrainHyper, TrainSample};
use wsplab::graph::{read_features_csv, write_features_csv};
use wsplab::homdensity::{hom_density_graph, hom_density_graphon, Motif};
use wsplab::sampling::{sample, SampleMode, SampleSpec};
use wsplab::spectral::{eigendecompose, graph_spectrum};
use wsplab::{CoefficientTensor, FilterCoeffs, GnnConfig, Graph, GraphSignal, Graphon, Scale};

/// Graphon signal processing: sampling, spectra, filters, GNNs,
/// transferability bounds and experiment sweeps.
#[derive(Parser)]
#[command(name = "wsplab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from a graphon and write it as an edge list.
    Sample(SampleArgs),
    /// Eigendecomposition of a graph's shift operator.
    Spectrum(SpectrumArgs),
    /// Apply a polynomial graph filter to node signals.
    Filter(FilterArgs),
    /// Train or evaluate a GNN.
    Gnn {
        #[command(subcommand)]
        command: GnnCommand,
    },
    /// Evaluate a transferability bound from an ingredients file.
    Bounds(BoundsArgs),
    /// Homomorphism density of a motif in a graph or graphon.
    Homdensity(HomArgs),
    /// Run a transfer sweep (and the training experiment when configured).
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// `builtin:NAME`, a builtin name, or a graphon JSON file.
    #[arg(long)]
    graphon: String,
    #[arg(long, default_value = "stochastic")]
    mode: SampleMode,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[arg(long)]
    no_self_loops: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Eigenvalues of `S/n` instead of `S`.
    #[arg(long)]
    normalized: bool,
    /// Include eigenvectors.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FilterArgs {
    /// Comma-separated taps `h_0,h_1,...`.
    #[arg(long, allow_hyphen_values = true)]
    taps: String,
    #[arg(long)]
    graph: PathBuf,
    /// Node-major CSV, one column per signal.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the spectral profile on the band `|lambda| >= c` to this file.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    c: f64,
}

#[derive(Subcommand)]
enum GnnCommand {
    /// Train on `DIR/graph.csv` with samples `DIR/x_K.csv`, `DIR/y_K.csv`.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a checkpoint on one graph and signal.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Contents of `gnn train --config`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainJob {
    model: GnnConfig,
    #[serde(default)]
    init_seed: u64,
    #[serde(default)]
    hyper: TrainHyper,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    which: BoundKind,
    #[arg(long)]
    ingredients: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HomArgs {
    /// `edge`, `path2`, `triangle`, `node` or a motif JSON file.
    #[arg(long)]
    motif: String,
    /// Graph edge-list CSV or graphon JSON (`builtin:NAME` also accepted).
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to WSPLAB_THREADS, then the core count.
    #[arg(long)]
    threads: Option<usize>,
    /// Skip the training experiment even when the config has one.
    #[arg(long)]
    no_train: bool,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Sample(a) => sample_cmd(a),
        Command::Spectrum(a) => spectrum_cmd(a),
        Command::Filter(a) => filter_cmd(a),
        Command::Gnn { command } => gnn_cmd(command),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Homdensity(a) => hom_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    }
}

fn load_graphon(spec: &str) -> Result<Graphon> {
    let name = spec.strip_prefix("builtin:").unwrap_or(spec);
    let path = Path::new(spec);
    if spec.starts_with("builtin:") || !path.exists() {
        return Graphon::builtin(name).with_context(|| format!("unknown graphon {spec:?}"));
    }
    let w: Graphon = serde_json::from_str(&fs::read_to_string(path)?)
        .with_context(|| format!("parsing graphon {}", path.display()))?;
    w.validate()?;
    Ok(w)
}

fn load_graph(path: &Path) -> Result<Graph> {
    Graph::load_csv(path, None).with_context(|| format!("reading graph {}", path.display()))
}

fn emit_json(value: &impl Serialize, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_features(features: &[Vec<f64>], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_features_csv(p, features)?,
        None => {
            let n = features.first().map_or(0, Vec::len);
            for i in 0..n {
                let row: Vec<String> = features.iter().map(|f| f[i].to_string()).collect();
                println!("{}", row.join(","));
            }
        }
    }
    Ok(())
}

fn scale(normalized: bool) -> Scale {
    if normalized {
        Scale::Normalized
    } else {
        Scale::Raw
    }
}

fn sample_cmd(a: SampleArgs) -> Result<()> {
    let w = load_graphon(&a.graphon)?;
    let spec = SampleSpec {
        n: a.n,
        mode: a.mode,
        seed: a.seed,
        trial: a.trial,
        self_loops: !a.no_self_loops,
    };
    let g = sample(&w, &spec)?;
    g.save_csv(&a.out)?;
    log::info!("wrote {} nodes to {}", g.n(), a.out.display());
    Ok(())
}

fn spectrum_cmd(a: SpectrumArgs) -> Result<()> {
    let g = load_graph(&a.input)?;
    let scale = scale(a.normalized);
    let value = if a.full {
        let d = eigendecompose(&g, scale)?;
        json!({ "scale": scale, "eigenvalues": d.spectrum, "vectors": d.vectors })
    } else {
        json!({ "scale": scale, "eigenvalues": graph_spectrum(&g, scale)? })
    };
    emit_json(&value, a.out.as_deref())
}

fn filter_cmd(a: FilterArgs) -> Result<()> {
    let h = FilterCoeffs::parse(&a.taps)?;
    let g = load_graph(&a.graph)?;
    let scale = scale(a.normalized);
    let y = read_features_csv(&a.signal)?
        .into_iter()
        .map(|x| Ok(apply_graph_filter(&h, &g, &GraphSignal::new(x), scale)?.into_values()))
        .collect::<Result<Vec<_>>>()?;
    emit_features(&y, a.out.as_deref())?;
    if let Some(p) = a.profile {
        emit_json(&estimate_spectral_profile(&h, a.c, PROFILE_GRID)?, Some(&p))?;
    }
    Ok(())
}

fn read_dataset(dir: &Path) -> Result<Dataset> {
    let graph = load_graph(&dir.join("graph.csv"))?;
    let mut samples = Vec::new();
    for k in 0.. {
        let (x, y) = (
            dir.join(format!("x_{k}.csv")),
            dir.join(format!("y_{k}.csv")),
        );
        if !x.exists() {
            break;
        }
        samples.push(TrainSample {
            graph: 0,
            x: read_features_csv(&x)?,
            y: read_features_csv(&y)?,
        });
    }
    if samples.is_empty() {
        bail!("no training samples x_0.csv/y_0.csv in {}", dir.display());
    }
    Ok(Dataset {
        graphs: vec![graph],
        samples,
    })
}

fn gnn_cmd(c: GnnCommand) -> Result<()> {
    match c {
        GnnCommand::Train { config, data, out } => {
            let job: TrainJob = serde_json::from_str(&fs::read_to_string(&config)?)
                .with_context(|| format!("parsing {}", config.display()))?;
            job.model.validate()?;
            let dataset = read_dataset(&data)?;
            let h0 = CoefficientTensor::random(&job.model, job.init_seed, false);
            let outcome = train_adam(&h0, &job.model, &dataset, &job.hyper)?;
            if let Some(last) = outcome.losses.last() {
                log::info!(
                    "final minibatch loss {last:.6e} after {} steps",
                    outcome.losses.len()
                );
            }
            Checkpoint::new(&job.model, &outcome.tensor).save(&out)?;
        }
        GnnCommand::Eval {
            model,
            graph,
            signal,
            out,
        } => {
            let ck = Checkpoint::load(&model)?;
            let g = load_graph(&graph)?;
            let y = gnn_forward(&ck.tensor()?, &ck.config, &g, &read_features_csv(&signal)?)?;
            emit_features(&y, out.as_deref())?;
        }
    }
    Ok(())
}

fn bounds_cmd(a: BoundsArgs) -> Result<()> {
    let ing: BoundIngredients = serde_json::from_str(&fs::read_to_string(&a.ingredients)?)
        .with_context(|| format!("parsing {}", a.ingredients.display()))?;
    emit_json(&bounds::evaluate(a.which, &ing)?, a.out.as_deref())
}

fn hom_cmd(a: HomArgs) -> Result<()> {
    let motif = if Path::new(&a.motif).exists() {
        serde_json::from_str::<Motif>(&fs::read_to_string(&a.motif)?)?
    } else {
        Motif::builtin(&a.motif)?
    };
    let target = Path::new(&a.target);
    let value = if target.extension().is_some_and(|e| e == "csv") {
        let g = load_graph(target)?;
        json!({ "target": "graph", "n": g.n(), "density": hom_density_graph(&motif, &g)? })
    } else {
        let w = load_graphon(&a.target)?;
        let est = hom_density_graphon(&motif, &w, a.samples, a.seed)?;
        json!({ "target": "graphon", "density": est.value, "std_error": est.std_error, "samples": a.samples })
    };
    emit_json(&value, a.out.as_deref())
}

fn sweep_cmd(a: SweepArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&a.config)
        .with_context(|| format!("loading {}", a.config.display()))?;
    let report = experiments::run_transfer_sweep_with(&cfg, a.threads)?;
    let files = experiments::emit_report(&report, &a.out)?;
    let check = report.violation_check();
    println!(
        "transfer: {} rows, bound {:?}, violations {}/{} (limit {:.4}), mean error non-increasing: {}",
        report.rows.len(),
        report.bound_kind,
        check.violations,
        check.rows,
        check.limit,
        report.mean_error_non_increasing()
    );
    println!("wrote {}", files.csv.display());
    if cfg.train.is_some() && !a.no_train {
        let train = experiments::run_train_transfer_with(&cfg, a.threads)?;
        let files = experiments::emit_train_report(&train, &a.out)?;
        for s in &train.summary {
            println!(
                "train: {:<12} n = {:<5} relative difference {:.4} +- {:.4}",
                s.student, s.n, s.mean_relative_difference, s.std_error
            );
        }
        println!("wrote {}", files.csv.display());
    }
    Ok(())
}
