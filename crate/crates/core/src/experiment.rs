// SPDX-License-Identifier: Apache-2.0

//! End-to-end runs from an [`ExperimentConfig`], report aggregation and the
//! routing-cost benchmark.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::config::{looks_like_named_map, resolve_seed, ExperimentConfig, InputSpec, RunMode};
use crate::error::{Error, Result};
use crate::executor::{
    run_dc_with, run_superposition_with, with_boundary_measures, DcRunReport, SuperpositionSpec,
};
use crate::mapper::{route_plan, CouplingMap, LayoutPolicy, RouterPolicy, RoutingOptions};
use crate::metrics::{e_max_f, pst, pst_superposed, round1, MetricsRow};
use crate::qasm::parse_qasm_named;
use crate::sim::{derive_seed, simulate_ideal, simulate_noisy, BitString, Counts, NoiseModel};
use crate::slicer::{slice_dynamic, slice_static, SlicePlan};
use crate::synth::{random_circuit, GateMix};

/// Reads and parses a QASM file, naming the circuit after the file stem.
pub fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "circuit".into());
    parse_qasm_named(&text, &name)
}

pub fn load_noise(path: &Path) -> Result<NoiseModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    NoiseModel::from_config(&text)
}

/// A named map (`linear-N`, `grid-RxC`, `heavy-hex-27`) or a map file.
pub fn load_coupling_map(spec: &str) -> Result<CouplingMap> {
    if looks_like_named_map(spec) {
        return CouplingMap::named(spec);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::Config(format!("{spec}: {e}")))?;
    CouplingMap::parse(&text)
}

/// `NoiseModel` with the infinite decay constant written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSummary {
    pub eps_1q: f64,
    pub eps_2q: f64,
    pub eps_meas: f64,
    pub t1_layers: Option<f64>,
    pub seed: u64,
}

impl From<&NoiseModel> for NoiseSummary {
    fn from(nm: &NoiseModel) -> Self {
        Self {
            eps_1q: nm.eps_1q,
            eps_2q: nm.eps_2q,
            eps_meas: nm.eps_meas,
            t1_layers: nm.t1_layers.is_finite().then_some(nm.t1_layers),
            seed: nm.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub mode: String,
    pub input: String,
    pub shots: u64,
    pub noise: NoiseSummary,
    pub coupling_map: Option<String>,
    pub layout: Option<String>,
    pub router: Option<String>,
    /// Ideal outputs the metrics are scored against.
    pub expected: Vec<BitString>,
    pub metrics: MetricsRow,
    pub swap_count: usize,
    pub run: DcRunReport,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn build_plan(mode: RunMode, circuit: &Circuit, nm: &NoiseModel) -> Result<SlicePlan> {
    match mode {
        RunMode::Baseline => SlicePlan::whole(circuit),
        RunMode::Sdc(d) => slice_static(circuit, d),
        RunMode::Ddc(t) => slice_dynamic(circuit, t, nm),
        RunMode::Measure(d) => SlicePlan::whole(&with_boundary_measures(&slice_static(circuit, d)?)),
    }
}

/// Top-`k` outcomes of a noiseless run of the preparation circuit.
fn oracle_inputs(init: &Circuit, k: usize, shots: u64, seed: u64) -> Result<Vec<BitString>> {
    let counts = simulate_noisy(init, &BitString::zeros(init.width()), shots, &NoiseModel::noiseless(seed))?;
    let mut inputs: Vec<BitString> = counts.ranked().into_iter().take(k).map(|(b, _)| b.clone()).collect();
    inputs.sort();
    Ok(inputs)
}

/// Share of shots inside `expected` minus the largest outcome outside it.
fn e_max_f_set(counts: &Counts, expected: &[BitString]) -> Result<f64> {
    if counts.total_shots() == 0 {
        return Err(Error::EmptyCounts);
    }
    let total = counts.total_shots() as f64;
    let hit: u64 = expected.iter().map(|e| counts.get(e)).sum();
    let false_max = counts
        .iter()
        .filter(|(b, _)| !expected.contains(b))
        .map(|(_, n)| n)
        .max()
        .unwrap_or(0);
    Ok(100.0 * (hit as f64 - false_max as f64) / total)
}

/// Runs one configured experiment. `env_seed` is the `DC_SEED` value, if any.
pub fn run_experiment(cfg: &ExperimentConfig, env_seed: Option<&str>) -> Result<ExperimentReport> {
    let circuit = load_circuit(&cfg.circuit)?;
    let mut nm = match &cfg.noise {
        Some(p) => load_noise(p)?,
        None => NoiseModel::noiseless(0),
    };
    nm.seed = resolve_seed(env_seed, cfg.seed, nm.seed)?;
    let routing = match &cfg.coupling_map {
        Some(m) => Some(RoutingOptions {
            coupling_map: load_coupling_map(m)?,
            layout: cfg.layout,
            router: cfg.router,
        }),
        None => None,
    };
    let plan = build_plan(cfg.mode, &circuit, &nm)?;
    let width = circuit.width();
    let sliced = matches!(cfg.mode, RunMode::Sdc(_) | RunMode::Ddc(_));

    let (run, expected, p, e) = match &cfg.input {
        InputSpec::Bits(_) | InputSpec::Zeros => {
            let input = match &cfg.input {
                InputSpec::Bits(b) => b.clone(),
                _ => BitString::zeros(width),
            };
            if input.width() != width {
                return Err(Error::WidthMismatch { expected: width, found: input.width() });
            }
            let expected = simulate_ideal(plan.circuit(), &input.padded(plan.width())?)?;
            let run = run_dc_with(&plan, &input, cfg.shots, &nm, routing.as_ref())?;
            let p = pst(&run.final_counts, &expected)?;
            let e = e_max_f(&run.final_counts, &expected)?;
            (run, vec![expected], p, e)
        }
        InputSpec::Ghz | InputSpec::Init { .. } => {
            let spec = match &cfg.input {
                InputSpec::Init { path, k } => SuperpositionSpec {
                    init_circuit: load_circuit(path)?,
                    k: *k,
                    total_shots: cfg.shots,
                },
                _ => SuperpositionSpec::ghz(width, cfg.shots),
            };
            let init = spec.init_circuit.widened(plan.width())?;
            let inputs = oracle_inputs(&init, spec.k, cfg.shots, derive_seed(nm.seed, 0x0AC1E))?;
            let ideal = |x: &BitString| simulate_ideal(plan.circuit(), x);
            let expected = inputs.iter().map(ideal).collect::<Result<Vec<_>>>()?;
            if sliced {
                let run = run_superposition_with(&spec, &plan, &nm, routing.as_ref())?;
                // Shot-weighted mean of per-chain PSTs. A chain whose input the
                // oracle never produces scores zero.
                let scored = run
                    .chains
                    .iter()
                    .filter(|ch| inputs.contains(&ch.input))
                    .map(|ch| Ok((ch.final_counts.clone(), ideal(&ch.input)?)))
                    .collect::<Result<Vec<_>>>()?;
                let scored_shots: u64 = scored.iter().map(|(c, _)| c.total_shots()).sum();
                let p = if scored.is_empty() {
                    0.0
                } else {
                    pst_superposed(&scored)? * scored_shots as f64 / cfg.shots as f64
                };
                let e = e_max_f_set(&run.final_counts, &expected)?;
                (run, expected, p, e)
            } else {
                // One job: preparation followed by the (measure-marked) circuit.
                let mut joined = init.clone();
                joined.extend(plan.circuit().gates().iter().cloned());
                joined.set_name(plan.name());
                let whole = SlicePlan::whole(&joined)?;
                let run = run_dc_with(&whole, &BitString::zeros(plan.width()), cfg.shots, &nm, routing.as_ref())?;
                let hit: u64 = expected.iter().map(|x| run.final_counts.get(x)).sum();
                let p = 100.0 * hit as f64 / run.final_counts.total_shots() as f64;
                let e = e_max_f_set(&run.final_counts, &expected)?;
                (run, expected, p, e)
            }
        }
    };

    let mut metrics = MetricsRow::new(&cfg.name, &cfg.mode.to_string(), cfg.input.kind(), p, e, run.job_count);
    metrics.worst_case = routing.as_ref().is_some_and(RoutingOptions::is_worst_case);
    Ok(ExperimentReport {
        name: cfg.name.clone(),
        mode: cfg.mode.to_string(),
        input: cfg.input.kind().to_string(),
        shots: cfg.shots,
        noise: NoiseSummary::from(&nm),
        coupling_map: cfg.coupling_map.clone(),
        layout: routing.as_ref().map(|r| r.layout.to_string()),
        router: routing.as_ref().map(|r| r.router.to_string()),
        expected,
        metrics,
        swap_count: run.jobs.iter().map(|j| j.swaps).sum::<usize>()
            + run.init_job.as_ref().map_or(0, |j| j.swaps),
        run,
    })
}

/// Table column for a metrics row, e.g. `sdc`, `sdc-ghz`, `sdc-worst`.
pub fn column_of(row: &MetricsRow) -> String {
    let base = row.mode.split(':').next().unwrap_or(&row.mode);
    let mut col = base.to_string();
    if row.worst_case {
        col.push_str("-worst");
    }
    if row.input != "classical" {
        col.push('-');
        col.push_str(&row.input);
    }
    col
}

const COLUMN_ORDER: [&str; 8] = [
    "baseline",
    "baseline-ghz",
    "sdc",
    "sdc-ghz",
    "ddc",
    "ddc-ghz",
    "sdc-worst",
    "measure",
];

/// Metrics rows pivoted into one line per circuit and one column group per
/// mode, with the SDC/baseline PST ratio.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Comparison {
    pub columns: Vec<String>,
    /// Circuit name and one cell per column, in column order.
    pub rows: Vec<(String, Vec<Option<MetricsRow>>)>,
}

impl Comparison {
    pub fn from_rows(metrics: &[MetricsRow]) -> Self {
        let present: BTreeSet<String> = metrics.iter().map(column_of).collect();
        let mut columns: Vec<String> = COLUMN_ORDER
            .iter()
            .filter(|c| present.contains(**c))
            .map(|c| c.to_string())
            .collect();
        columns.extend(present.iter().filter(|c| !COLUMN_ORDER.contains(&c.as_str())).cloned());

        let mut rows: Vec<(String, Vec<Option<MetricsRow>>)> = Vec::new();
        for m in metrics {
            let col = columns.iter().position(|c| *c == column_of(m)).expect("column exists");
            let idx = match rows.iter().position(|(n, _)| *n == m.name) {
                Some(i) => i,
                None => {
                    rows.push((m.name.clone(), vec![None; columns.len()]));
                    rows.len() - 1
                }
            };
            rows[idx].1[col] = Some(m.clone());
        }
        Self { columns, rows }
    }

    fn cell(&self, row: &[Option<MetricsRow>], col: &str) -> Option<MetricsRow> {
        let i = self.columns.iter().position(|c| c == col)?;
        row[i].clone()
    }

    fn ratio(&self, row: &[Option<MetricsRow>]) -> Option<f64> {
        let sdc = self.cell(row, "sdc")?;
        let base = self.cell(row, "baseline")?;
        Some(sdc.pst / base.pst)
    }

    pub fn has_ratio(&self) -> bool {
        self.columns.iter().any(|c| c == "sdc") && self.columns.iter().any(|c| c == "baseline")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("circuit");
        for c in &self.columns {
            let _ = write!(out, ",{c}_pst,{c}_emax,{c}_jobs");
        }
        if self.has_ratio() {
            out.push_str(",pst_sdc_over_baseline");
        }
        out.push('\n');
        for (name, cells) in &self.rows {
            out.push_str(name);
            for cell in cells {
                match cell {
                    Some(m) => {
                        let _ = write!(out, ",{:.1},{:.1},{}", m.pst, m.e_max_f, m.job_count);
                    }
                    None => out.push_str(",,,"),
                }
            }
            if self.has_ratio() {
                out.push(',');
                out.push_str(&fmt_ratio(self.ratio(cells)));
            }
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let mut header = vec!["circuit".to_string()];
        for c in &self.columns {
            header.extend([format!("{c} PST"), format!("{c} E-Max"), format!("{c} jobs")]);
        }
        if self.has_ratio() {
            header.push("PST sdc/baseline".into());
        }
        let mut table = vec![header];
        for (name, cells) in &self.rows {
            let mut line = vec![name.clone()];
            for cell in cells {
                match cell {
                    Some(m) => line.extend([
                        format!("{:.1}%", m.pst),
                        format!("{:.1}%", m.e_max_f),
                        m.job_count.to_string(),
                    ]),
                    None => line.extend(["-".to_string(), "-".to_string(), "-".to_string()]),
                }
            }
            if self.has_ratio() {
                line.push(fmt_ratio(self.ratio(cells)));
            }
            table.push(line);
        }
        let widths: Vec<usize> = (0..table[0].len())
            .map(|i| table.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &table {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (s, w))| if i == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn fmt_ratio(r: Option<f64>) -> String {
    match r {
        None => String::new(),
        Some(r) if r.is_finite() => format!("{:.1}x", round1(r)),
        Some(_) => "inf".into(),
    }
}

/// Extracts the metrics row from a report file's JSON.
pub fn metrics_from_report(json: &str) -> Result<MetricsRow> {
    let value: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::Config(format!("bad report: {e}")))?;
    let metrics = value
        .get("metrics")
        .ok_or_else(|| Error::Config("report has no `metrics`".into()))?;
    serde_json::from_value(metrics.clone()).map_err(|e| Error::Config(format!("bad metrics row: {e}")))
}

/// Synthetic circuit families for the routing-cost benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoutingFamily {
    /// CNOTs on 8 qubits.
    RandomCx,
    /// CNOTs and Toffolis on 8 qubits.
    Mixed,
}

impl std::str::FromStr for RoutingFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-cx" => Ok(Self::RandomCx),
            "mixed" => Ok(Self::Mixed),
            _ => Err(Error::Config(format!("unknown family `{s}`; expected random-cx or mixed"))),
        }
    }
}

impl std::fmt::Display for RoutingFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::RandomCx => "random-cx",
            Self::Mixed => "mixed",
        })
    }
}

impl RoutingFamily {
    pub const WIDTH: usize = 8;

    /// A circuit of weight `blocks * budget`.
    pub fn circuit(self, blocks: usize, budget: usize, seed: u64) -> Circuit {
        let mix = match self {
            Self::RandomCx => GateMix::CNOT_ONLY,
            Self::Mixed => GateMix { x: 0, cnot: 2, toffoli: 1, mct: 0, max_controls: 3 },
        };
        random_circuit(seed, &format!("{self}-{blocks}"), Self::WIDTH, blocks * budget, mix)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPoint {
    pub blocks: usize,
    pub weight: usize,
    pub swaps: usize,
    /// Best of the timed repetitions.
    pub route_time: Duration,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub family: RoutingFamily,
    pub sizes: Vec<usize>,
    pub budget: usize,
    pub coupling_map: CouplingMap,
    pub layout: LayoutPolicy,
    pub router: RouterPolicy,
    pub reps: usize,
    pub seed: u64,
}

/// Routes SDC plans of growing block count; one untimed warm-up per size.
pub fn bench_routing(opts: &BenchOptions) -> Result<Vec<BenchPoint>> {
    let mut points = Vec::with_capacity(opts.sizes.len());
    for &blocks in &opts.sizes {
        let circuit = opts.family.circuit(blocks, opts.budget, derive_seed(opts.seed, blocks as u64));
        let plan = slice_static(&circuit, opts.budget)?;
        let warm = route_plan(&plan, &opts.coupling_map, opts.layout, opts.router)?;
        let mut best = Duration::MAX;
        for _ in 0..opts.reps.max(1) {
            let r = route_plan(&plan, &opts.coupling_map, opts.layout, opts.router)?;
            best = best.min(r.route_time);
        }
        points.push(BenchPoint {
            blocks: plan.blocks().len(),
            weight: circuit.weight(),
            swaps: warm.swap_count,
            route_time: best,
        });
    }
    Ok(points)
}

/// Coefficient of determination of the least-squares line through the points.
pub fn linear_r2(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 1.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    if sxx == 0.0 {
        return 0.0;
    }
    sxy * sxy / (sxx * syy)
}

pub fn bench_table(family: RoutingFamily, points: &[BenchPoint], timing: bool) -> String {
    let mut out = String::from("family,blocks,weight,swaps");
    if timing {
        out.push_str(",route_time_us");
    }
    out.push('\n');
    for p in points {
        let _ = write!(out, "{family},{},{},{}", p.blocks, p.weight, p.swaps);
        if timing {
            let _ = write!(out, ",{:.1}", p.route_time.as_secs_f64() * 1e6);
        }
        out.push('\n');
    }
    if timing {
        let xs: Vec<f64> = points.iter().map(|p| p.blocks as f64).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.route_time.as_secs_f64()).collect();
        let _ = writeln!(out, "# linear fit r2 = {:.4}", linear_r2(&xs, &ys));
    }
    out
}
