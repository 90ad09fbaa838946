use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use nodedp::bounds::{lb_packing_solve, lb_pure, lb_stable, LowerBoundQuery};
use nodedp::graph::{parse_edge_list, sample_sbm, sample_weighted_sbm, AnyGraph};
use nodedp::metrics::{loss_overall, loss_worst_case};
use nodedp::rng::derive;
use nodedp::{LabelAssignment, NoiseMode, SbmParams};
use nodedp_harness::registry::{run_estimator, RunSpec, TrialGraph};
use nodedp_harness::{config::ExperimentConfig, io, run_sweep, summarize};

#[derive(Parser)]
#[command(name = "nodedp", version, about = "Node-private community estimation experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed; falls back to NODEDP_SEED.
    #[arg(long, global = true, env = "NODEDP_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Disable all privacy noise. Test mode only; outputs are watermarked.
    #[arg(long, global = true)]
    noise_off: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an SBM graph and write it as an edge list plus labels.
    Generate {
        /// Take the SBM from an experiment config instead of the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.3)]
        p_in: f64,
        #[arg(long, default_value_t = 0.05)]
        p_out: f64,
    },
    /// Run the configured estimator once and print a JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Edge-list file; sampled from the config when absent.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// One label per line, for computing losses on a supplied graph.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Overrides the first ε of the grid.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run a config-driven grid and write records, timings and a summary.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Also write tidy long-format CSV for plotting.
        #[arg(long)]
        emit_plotdata: bool,
    },
    /// Tabulate the lower-bound calculators over a grid.
    Bounds {
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        xi: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1")]
        eta: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Quick property checks of the core library.
    Selftest,
}

fn warn_noise_off(on: bool) {
    if on {
        eprintln!("warning: --noise-off is set; no privacy noise is applied and outputs are marked noise_off");
    }
}

fn noise_mode(g: &Global) -> NoiseMode {
    if g.noise_off {
        NoiseMode::Off
    } else {
        NoiseMode::On
    }
}

fn read_labels(path: &Path, k: usize) -> Result<LabelAssignment> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let labels = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<usize>().with_context(|| format!("bad label {l:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabelAssignment::new(labels, k)?)
}

fn write_labels(path: &Path, labels: &LabelAssignment) -> Result<()> {
    let mut s = String::new();
    for l in labels.labels() {
        s.push_str(&format!("{l}\n"));
    }
    fs::write(path, s)?;
    Ok(())
}

fn generate(g: &Global, config: Option<PathBuf>, n: usize, k: usize, p_in: f64, p_out: f64) -> Result<()> {
    let params = match config {
        Some(p) => ExperimentConfig::load(&p)?.sbm.params()?,
        None => SbmParams::planted(n, k, p_in, p_out)?,
    };
    for w in params.assumption_warnings() {
        eprintln!("warning: {w}");
    }
    let seed = g.seed.unwrap_or(0);
    let mut rng = derive(seed, 0);
    let text = if params.weight_model.is_some() {
        sample_weighted_sbm(&params, &mut rng)?.to_edge_list()
    } else {
        sample_sbm(&params, &mut rng)?.to_edge_list()
    };
    fs::create_dir_all(&g.out)?;
    fs::write(g.out.join("graph.txt"), text)?;
    write_labels(&g.out.join("labels.txt"), &params.theta)?;
    println!("wrote {} and {}", g.out.join("graph.txt").display(), g.out.join("labels.txt").display());
    Ok(())
}

fn run(
    g: &Global,
    config: &Path,
    graph: Option<PathBuf>,
    labels: Option<PathBuf>,
    eps: Option<f64>,
    delta: Option<f64>,
) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let params = cfg.sbm.params()?;
    let seed = g.seed.unwrap_or(cfg.seeds[0]);
    let (input, truth) = match graph {
        Some(path) => {
            let parsed = parse_edge_list(&fs::read_to_string(&path)?)?;
            let tg = match parsed {
                AnyGraph::Plain(p) => TrialGraph::Plain(p),
                AnyGraph::Weighted(w) => TrialGraph::Weighted(w),
            };
            let truth = labels.map(|l| read_labels(&l, params.k)).transpose()?;
            (tg, truth)
        }
        None => {
            let mut rng = derive(seed, 0);
            let tg = if params.weight_model.is_some() {
                TrialGraph::Weighted(sample_weighted_sbm(&params, &mut rng)?)
            } else {
                TrialGraph::Plain(sample_sbm(&params, &mut rng)?)
            };
            (tg, Some(params.theta.clone()))
        }
    };
    let noise = noise_mode(g);
    warn_noise_off(noise.is_off());
    let spec = RunSpec {
        cfg: &cfg,
        sbm: &params,
        eps: eps.unwrap_or(cfg.eps[0]),
        delta: delta.unwrap_or(cfg.delta[0]),
        degree: cfg.degree.map(|r| r.resolve(&params)),
        noise,
    };
    let out = run_estimator(&spec, &input, &mut derive(cfg.master_seed, seed))?;
    let losses = match &truth {
        Some(t) => Some((loss_overall(&out.labels, t)?, loss_worst_case(&out.labels, t)?)),
        None => None,
    };
    let report = serde_json::json!({
        "scenario": cfg.scenario,
        "estimator": cfg.estimator.id,
        "seed": seed,
        "eps": spec.eps,
        "delta": spec.delta,
        "degree": spec.degree,
        "noise_off": out.diagnostics.noise_off,
        "loss_overall": losses.map(|l| l.0),
        "loss_worst_case": losses.map(|l| l.1),
        "budget": out.budget,
        "diagnostics": out.diagnostics,
        "labels": out.labels.labels(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn sweep(g: &Global, config: &Path, emit_plotdata: bool) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = g.seed {
        cfg.master_seed = s;
    }
    let noise = noise_mode(g);
    warn_noise_off(noise.is_off());
    let records = run_sweep(&cfg, noise, g.threads)?;
    fs::create_dir_all(&g.out)?;
    let o = &cfg.outputs;
    io::write_records(&g.out.join(&o.records), &records)?;
    io::write_timings(&g.out.join(&o.timings), &records)?;
    let groups = summarize(&records);
    io::write_summary(&g.out.join(&o.summary), &cfg.scenario, &cfg.estimator.id, &groups)?;
    if emit_plotdata {
        io::write_plotdata(&g.out.join(&o.plotdata), &records)?;
    }
    let failed = records.iter().filter(|r| r.loss_overall.is_none()).count();
    eprintln!("{} trials, {} failed; output in {}", records.len(), failed, g.out.display());
    Ok(())
}

fn cell(r: nodedp::Result<f64>) -> String {
    match r {
        Ok(v) if v == f64::NEG_INFINITY => "vacuous".into(),
        Ok(v) => format!("{v}"),
        Err(_) => String::new(),
    }
}

fn bounds(g: &Global, ns: &[usize], k: usize, xis: &[f64], etas: &[f64], delta: f64) -> Result<()> {
    fs::create_dir_all(&g.out)?;
    let path = g.out.join("bounds.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["n", "k", "xi", "eta", "delta", "lb_packing", "lb_pure", "lb_stable"])?;
    for &n in ns {
        for &xi in xis {
            for &eta in etas {
                let q = LowerBoundQuery { n, k, xi, eta, delta };
                w.write_record([
                    n.to_string(),
                    k.to_string(),
                    xi.to_string(),
                    eta.to_string(),
                    delta.to_string(),
                    cell(lb_packing_solve(&q)),
                    cell(lb_pure(&q)),
                    cell(lb_stable(&q)),
                ])?;
            }
        }
    }
    w.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Generate { config, n, k, p_in, p_out } => generate(g, config, n, k, p_in, p_out),
        Command::Run { config, graph, labels, eps, delta } => run(g, &config, graph, labels, eps, delta),
        Command::Sweep { config, emit_plotdata } => sweep(g, &config, emit_plotdata),
        Command::Bounds { n, k, xi, eta, delta } => bounds(g, &n, k, &xi, &eta, delta),
        Command::Selftest => {
            let results = nodedp_harness::selftest::run_all();
            for (name, ok, detail) in &results {
                println!("{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
            }
            if results.iter().all(|r| r.1) {
                Ok(())
            } else {
                Err(anyhow::anyhow!("selftest failed"))
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
