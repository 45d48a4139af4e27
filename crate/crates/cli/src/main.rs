// SPDX-License-Identifier: Apache-2.0

//! `dcq`: slice, run, route and tabulate depth-controlled experiments.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dc_core::config::{env_seed, ExperimentConfig, RunMode};
use dc_core::experiment::{
    bench_routing, bench_table, load_circuit, load_coupling_map, load_noise, metrics_from_report,
    run_experiment, BenchOptions, Comparison, RoutingFamily,
};
use dc_core::mapper::{route_plan, LayoutPolicy, RouterPolicy};
use dc_core::qasm::serialize_qasm;
use dc_core::synth::benchmark_corpus;
use dc_core::{slice_dynamic, slice_static, Error, SlicePlan};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dcq", version, about = "Depth control for quantum-classical circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Slice a QASM circuit and print the plan manifest.
    Slice {
        circuit: PathBuf,
        /// baseline, sdc:<d> or ddc:<threshold>
        #[arg(long)]
        mode: String,
        /// Noise file used by ddc fidelity estimates.
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Execute an experiment config and print its report.
    Run {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Route a circuit or plan manifest onto a coupling map.
    Route {
        /// QASM circuit or JSON plan manifest.
        input: PathBuf,
        /// linear-N, grid-RxC, heavy-hex-27 or a map file.
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "trivial")]
        layout: String,
        #[arg(long, default_value = "basic")]
        router: String,
        /// Include wall-clock routing time (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Tabulate run reports by circuit and mode.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
    /// Route SDC plans of growing block count and print the cost curve.
    BenchRouting {
        #[arg(long, default_value = "random-cx")]
        family: String,
        /// Block counts, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![10, 50, 100, 200, 300, 400, 500])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        budget: usize,
        #[arg(long, default_value = "heavy-hex-27")]
        map: String,
        #[arg(long, default_value = "greedy")]
        layout: String,
        #[arg(long, default_value = "lookahead")]
        router: String,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include route times and the linear fit (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Write the synthetic benchmark corpus as QASM files plus their inputs.
    Corpus { dir: PathBuf },
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn slice(circuit: &Path, mode: &str, noise: Option<&Path>, output: Option<&Path>) -> Result<()> {
    let c = load_circuit(circuit)?;
    let plan = match mode.parse::<RunMode>()? {
        RunMode::Baseline => SlicePlan::whole(&c)?,
        RunMode::Sdc(d) => slice_static(&c, d)?,
        RunMode::Ddc(t) => {
            let nm = match noise {
                Some(p) => load_noise(p)?,
                None => bail!(Error::Config("ddc slicing needs --noise".into())),
            };
            slice_dynamic(&c, t, &nm)?
        }
        RunMode::Measure(_) => bail!(Error::Config("measure mode is a run mode, not a slicing".into())),
    };
    if plan.floor_hit() {
        eprintln!("warning: a single-gate block misses the fidelity threshold");
    }
    emit(output, &plan.to_manifest())
}

fn run(config: &Path, output: Option<&Path>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let report = run_experiment(&cfg, env_seed().as_deref())?;
    for w in &report.run.warnings {
        eprintln!("warning: {w}");
    }
    let m = &report.metrics;
    eprintln!(
        "{} {} {}: PST {:.1}% E-Max(F) {:.1}% jobs {}",
        m.name, m.mode, m.input, m.pst, m.e_max_f, m.job_count
    );
    emit(output, &report.to_json())
}

fn load_plan(input: &Path) -> Result<SlicePlan> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    if text.trim_start().starts_with('{') {
        Ok(SlicePlan::from_manifest(&text)?)
    } else {
        Ok(SlicePlan::whole(&load_circuit(input)?)?)
    }
}

fn route(input: &Path, map: &str, layout: &str, router: &str, timing: bool) -> Result<()> {
    let plan = load_plan(input)?;
    let cm = load_coupling_map(map)?;
    let layout: LayoutPolicy = layout.parse()?;
    let router: RouterPolicy = router.parse()?;
    let routed = route_plan(&plan, &cm, layout, router)?;
    let mut out = json!({
        "source": plan.name(),
        "mode": plan.mode().to_string(),
        "map": map,
        "layout": layout.to_string(),
        "router": router.to_string(),
        "blocks": routed.blocks.len(),
        "swap_count": routed.swap_count,
        "max_block_swaps": routed.max_block_swaps(),
        "block_swaps": routed.blocks.iter().map(|b| b.swap_count).collect::<Vec<_>>(),
        "routed_weight": routed.blocks.iter().map(|b| b.circuit.weight()).sum::<usize>(),
        "layout_initial": routed.blocks.first().map(|b| b.layout_initial.as_slice().to_vec()),
    });
    if timing {
        out["route_time_us"] = json!(routed.route_time.as_secs_f64() * 1e6);
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn report(paths: &[PathBuf], csv: bool) -> Result<()> {
    let rows = paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            metrics_from_report(&text).with_context(|| p.display().to_string())
        })
        .collect::<Result<Vec<_>>>()?;
    let table = Comparison::from_rows(&rows);
    print!("{}", if csv { table.to_csv() } else { table.to_text() });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    family: &str,
    sizes: Vec<usize>,
    budget: usize,
    map: &str,
    layout: &str,
    router: &str,
    reps: usize,
    seed: u64,
    timing: bool,
) -> Result<()> {
    let family: RoutingFamily = family.parse()?;
    let opts = BenchOptions {
        family,
        sizes,
        budget,
        coupling_map: load_coupling_map(map)?,
        layout: layout.parse()?,
        router: router.parse()?,
        reps: if timing { reps } else { 0 },
        seed,
    };
    let points = bench_routing(&opts)?;
    print!("{}", bench_table(family, &points, timing));
    Ok(())
}

fn corpus(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut inputs = String::from("# circuit input (qubit 0 rightmost)\n");
    for e in benchmark_corpus() {
        let path = dir.join(format!("{}.qasm", e.circuit.name()));
        fs::write(&path, serialize_qasm(&e.circuit)).with_context(|| format!("writing {}", path.display()))?;
        let _ = writeln!(inputs, "{} {}", e.circuit.name(), e.input);
    }
    fs::write(dir.join("inputs.txt"), inputs).context("writing inputs.txt")?;
    Ok(())
}

/// 2 for configuration problems, 3 for circuit problems, 4 when routing is
/// infeasible, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    let Some(e) = err.chain().find_map(|c| c.downcast_ref::<Error>()) else {
        return 1;
    };
    match e {
        Error::Syntax { .. }
        | Error::UnknownGate { .. }
        | Error::QubitOutOfRange { .. }
        | Error::InvalidGate(_)
        | Error::WidthMismatch { .. }
        | Error::EmptyCircuit
        | Error::InsufficientAncillas { .. }
        | Error::NonClassical(_) => 3,
        Error::InsufficientQubits { .. } | Error::Disconnected { .. } => 4,
        Error::ZeroShots
        | Error::EmptyCounts
        | Error::EmptyPlan
        | Error::InvalidBudget(_)
        | Error::InvalidThreshold(_)
        | Error::InvalidNoise(_)
        | Error::InvalidCouplingMap(_)
        | Error::InvalidBitString(_)
        | Error::Config(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Slice { circuit, mode, noise, output } => {
            slice(&circuit, &mode, noise.as_deref(), output.as_deref())
        }
        Command::Run { config, output } => run(&config, output.as_deref()),
        Command::Route { input, map, layout, router, timing } => route(&input, &map, &layout, &router, timing),
        Command::Report { reports, csv } => report(&reports, csv),
        Command::BenchRouting { family, sizes, budget, map, layout, router, reps, seed, timing } => {
            bench(&family, sizes, budget, &map, &layout, &router, reps, seed, timing)
        }
        Command::Corpus { dir } => corpus(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
