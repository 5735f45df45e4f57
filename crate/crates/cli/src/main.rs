use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qdsmds::sim::{
    calibration_table, emit_plots, load_trials, run_experiment, save_tables, single_trial,
    summarize, ExperimentConfig, PointSummary, SimError,
};
use qdsmds::solver::EstimateResult;

#[derive(Parser)]
#[command(name = "qdsmds", version, about = "SMDS vs quaternion-domain SMDS localization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over σ_d and ε; writes trials.csv, summary.csv and SVG plots.
    Simulate(SimulateArgs),
    /// One trial at one noise point, with coordinates and diagnostics.
    SingleTrial(SingleArgs),
    /// Tikhonov concentration for each bounding angle.
    CalibrateRho(CalibrateArgs),
    /// Plots from an existing trials.csv.
    Plot(PlotArgs),
}

#[derive(Args)]
struct Common {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    scenario: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    /// Similarity alignment on the anchors after recovery.
    #[arg(long)]
    procrustes: bool,
    /// Fresh distance draws for every kernel entry.
    #[arg(long)]
    distance_redraw_per_pair: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.scenario {
            cfg.scenario = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.procrustes |= self.procrustes;
        cfg.distance_redraw_per_pair |= self.distance_redraw_per_pair;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated σ_d values in meters.
    #[arg(long, value_delimiter = ',')]
    sigma_d: Option<Vec<f64>>,
    /// Comma-separated bounding angles in degrees.
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_plots: bool,
}

#[derive(Args)]
struct SingleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1.0)]
    sigma_d: f64,
    #[arg(long, default_value_t = 40.0)]
    epsilon: f64,
    /// Trial index; selects the target layout and the noise draws.
    #[arg(long, default_value_t = 0)]
    trial: usize,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 20.0, 30.0, 40.0, 50.0])]
    epsilon: Vec<f64>,
}

#[derive(Args)]
struct PlotArgs {
    /// trials.csv written by `simulate`, or the directory holding it.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::SingleTrial(a) => single(a),
        Command::CalibrateRho(a) => {
            println!("epsilon_deg,rho");
            for (e, r) in calibration_table(&a.epsilon)? {
                println!("{e},{r}");
            }
            Ok(())
        }
        Command::Plot(a) => plot(a),
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}

fn print_summary(summary: &[PointSummary]) {
    println!(
        "{:>3} {:>7} {:>7} {:>10} {:>10} {:>9} {:>7}",
        "sc", "eps", "sigma", "SMDS", "QD-SMDS", "gap", "failed"
    );
    for s in summary {
        println!(
            "{:>3} {:>7} {:>7} {:>10} {:>10} {:>9} {:>7}",
            s.scenario,
            s.epsilon,
            s.sigma_d,
            fmt_opt(s.mean_smds),
            fmt_opt(s.mean_qdsmds),
            fmt_opt(s.gap()),
            s.failed_smds.max(s.failed_qdsmds)
        );
    }
}

fn write_plots(summary: &[PointSummary], dir: &std::path::Path) -> Result<()> {
    match emit_plots(summary, dir) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
        Err(SimError::EmptyDataset) => {
            eprintln!("no plottable points");
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = a.common.config()?;
    if let Some(v) = a.sigma_d {
        cfg.sigma_d = v;
    }
    if let Some(v) = a.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.workers {
        cfg.workers = v;
    }
    if let Some(v) = a.out {
        cfg.out_dir = v;
    }
    cfg.validate()?;
    let start = std::time::Instant::now();
    let out = run_experiment(&cfg)?;
    eprintln!(
        "{} trials in {:.1} s",
        out.records.len(),
        start.elapsed().as_secs_f64()
    );
    for p in save_tables(&cfg.out_dir, &out.records, &out.summary)? {
        eprintln!("wrote {}", p.display());
    }
    std::fs::write(cfg.out_dir.join("config.toml"), cfg.to_toml_string())?;
    if !a.no_plots {
        write_plots(&out.summary, &cfg.out_dir)?;
    }
    print_summary(&out.summary);
    Ok(())
}

fn print_estimate(name: &str, r: &Result<EstimateResult<f64>, qdsmds::solver::SolverError>) {
    match r {
        Ok(e) => {
            println!("{name}: xi = {:.6} m", e.xi);
            let spec: Vec<String> = e.diagnostics.spectrum.iter().take(4).map(|v| format!("{v:.4e}")).collect();
            println!("  leading spectrum: {}", spec.join(", "));
            println!("  gauge residual:   {:.4e}", e.diagnostics.gauge_residual);
            if let Some(k) = e.diagnostics.k_energy {
                println!("  k energy share:   {k:.4e}");
            }
        }
        Err(err) => println!("{name}: failed ({err})"),
    }
}

fn single(a: SingleArgs) -> Result<()> {
    let cfg = a.common.config()?;
    let (layout, outcome) = single_trial(&cfg, a.sigma_d, a.epsilon, a.trial)?;
    println!(
        "scenario {}, sigma_d = {} m, epsilon = {} deg, trial {}",
        cfg.scenario, a.sigma_d, a.epsilon, a.trial
    );
    print_estimate("SMDS", &outcome.smds);
    print_estimate("QD-SMDS", &outcome.qdsmds);
    println!("target,x,y,z,smds_x,smds_y,smds_z,qd_x,qd_y,qd_z");
    for (t, p) in layout.targets().iter().enumerate() {
        let est = |r: &Result<EstimateResult<f64>, _>| match r {
            Ok(e) => (0..3).map(|c| format!("{:.4}", e.x_hat[(t, c)])).collect::<Vec<_>>().join(","),
            Err(_) => ",,".into(),
        };
        println!(
            "{t},{:.4},{:.4},{:.4},{},{}",
            p[0],
            p[1],
            p[2],
            est(&outcome.smds),
            est(&outcome.qdsmds)
        );
    }
    Ok(())
}

fn plot(a: PlotArgs) -> Result<()> {
    let path = if a.input.is_dir() {
        a.input.join("trials.csv")
    } else {
        a.input.clone()
    };
    let records = load_trials(&path).with_context(|| format!("reading {}", path.display()))?;
    if records.is_empty() {
        bail!("{} holds no trials", path.display());
    }
    let summary = summarize(&records);
    let dir = a
        .out
        .unwrap_or_else(|| path.parent().map(PathBuf::from).unwrap_or_default());
    write_plots(&summary, &dir)
}
