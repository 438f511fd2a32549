//! Batch scans: configuration, validation and artifact emission.

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{EncodingConfig, FcidumpPoint, MethodSpec, PointSource, RunConfig, ScanPoint, SystemConfig};

use crate::analysis::{method_metrics, scan_csv, MethodMetrics, ScanSeries, CHEMICAL_ACCURACY};
use crate::ansatz::{build_ansatz, ActiveSpace, AnsatzKind};
use crate::encoding::{EncodingPlan, PauliOperator};
use crate::error::{Error, Result};
use crate::exact::{exact_ground, sector_dimension, MAX_SECTOR_DIM};
use crate::hamiltonian::{build_hamiltonian, MolecularIntegrals};
use crate::state::{
    compile_ansatz, configuration_weights, estimate_resources, weights_csv, CompiledAnsatz, ResourceEstimate,
    EXACT_MAX_QUBITS, MAX_QUBITS,
};
use crate::vqe::{oo_vqe_minimize, vqe_minimize_with, Evolution, VqeResult};

/// Energies below `exact − VARIATIONAL_TOL` are reported as failures.
pub const VARIATIONAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

impl Finding {
    fn error(message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

fn register_width(modes: usize, enc: &EncodingConfig) -> usize {
    if enc.two_qubit_reduction {
        modes.saturating_sub(2)
    } else {
        modes
    }
}

/// Static checks; reads fixtures but writes nothing.
pub fn validate(config: &RunConfig) -> Vec<Finding> {
    let mut out = Vec::new();
    let methods: Vec<MethodSpec> = if config.methods.is_empty() {
        out.push(Finding::error("no methods requested"));
        Vec::new()
    } else {
        config
            .methods
            .iter()
            .filter_map(|m| match m.parse::<MethodSpec>() {
                Ok(s) => Some(s),
                Err(e) => {
                    out.push(Finding::error(e.to_string()));
                    None
                }
            })
            .collect()
    };
    let mut seen = std::collections::BTreeSet::new();
    for m in &methods {
        if !seen.insert(*m) {
            out.push(Finding::error(format!("method {m} listed twice")));
        }
        if m.orbital_optimized && m.kind == AnsatzKind::Uccsd {
            out.push(Finding::warning(format!(
                "{m}: orbital optimization of UCCSD is redundant with its singles"
            )));
        }
        if m.orbital_optimized && config.encoding.taper {
            out.push(Finding::error(format!(
                "{m}: orbital rotation is incompatible with tapering"
            )));
        }
    }
    if config.encoding.two_qubit_reduction && config.encoding.mapping != crate::encoding::Mapping::Parity {
        out.push(Finding::error("two-qubit reduction requires the parity mapping"));
    }
    if let Err(e) = config.optimizer.validate() {
        out.push(Finding::error(e.to_string()));
    }
    let points = config.points();
    if points.is_empty() {
        out.push(Finding::error("the scan has no points"));
    }
    if points
        .windows(2)
        .any(|w| w[0].coordinate.partial_cmp(&w[1].coordinate) != Some(std::cmp::Ordering::Less))
    {
        out.push(Finding::error("scan coordinates must be strictly increasing"));
    }
    if let Some(a) = config.anchor {
        if a >= points.len() {
            out.push(Finding::error(format!("anchor {a} outside {} points", points.len())));
        }
    }
    if let SystemConfig::Hubbard { sites, filling, .. } = &config.system {
        if filling.0 > *sites || filling.1 > *sites {
            out.push(Finding::error(format!("filling {filling:?} exceeds {sites} sites")));
        }
        if *sites < 2 {
            out.push(Finding::error("a Hubbard chain needs at least 2 sites"));
        }
        if !out.is_empty() {
            return out;
        }
    }
    for p in &points {
        if let PointSource::File(path) = &p.source {
            if !path.is_file() {
                out.push(Finding::error(format!("{}: file not found", path.display())));
                continue;
            }
        }
        let ints = match config.load_point(p) {
            Ok(i) => i,
            Err(e) => {
                out.push(Finding::error(format!("point {}: {e}", p.label)));
                continue;
            }
        };
        out.extend(check_point(config, &p.label, &ints, &methods));
    }
    out
}

fn check_point(config: &RunConfig, label: &str, ints: &MolecularIntegrals, methods: &[MethodSpec]) -> Vec<Finding> {
    let mut out = Vec::new();
    if ints.n_alpha != ints.n_beta {
        out.push(Finding::error(format!(
            "point {label}: the ansatze need a closed-shell reference, got {}/{} electrons",
            ints.n_alpha, ints.n_beta
        )));
    } else if ActiveSpace::new(ints.n_orbitals, ints.n_alpha).is_err() {
        out.push(Finding::error(format!(
            "point {label}: no occupied/virtual split for {} electrons in {} orbitals",
            ints.n_electrons(),
            ints.n_orbitals
        )));
    }
    let width = register_width(2 * ints.n_orbitals, &config.encoding);
    if width > MAX_QUBITS {
        out.push(Finding::error(format!(
            "point {label}: {width} qubits exceed the {MAX_QUBITS}-qubit cap"
        )));
    }
    if config.exact_ucc && width > EXACT_MAX_QUBITS && methods.iter().any(|m| !m.orbital_optimized) {
        out.push(Finding::error(format!(
            "point {label}: exact UCC comparison limited to {EXACT_MAX_QUBITS} qubits, need {width}"
        )));
    }
    if sector_dimension(ints.n_orbitals, ints.n_alpha, ints.n_beta) > MAX_SECTOR_DIM {
        out.push(Finding::error(format!(
            "point {label}: sector too large for exact diagonalization"
        )));
    }
    out
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub output: Option<PathBuf>,
    pub methods: Option<Vec<String>>,
    /// Indices into the configured point list.
    pub points: Option<Vec<usize>>,
}

/// Parses `0,2,4-6` into sorted unique indices.
pub fn parse_point_range(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::Config(format!("invalid point range {part:?}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty point range".into()));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellFailure {
    pub point: String,
    pub method: String,
    pub message: String,
}

/// Outcome of one (point, method) cell.
#[derive(Clone, Debug)]
pub struct CellResult {
    pub energy: f64,
    pub n_parameters: usize,
    pub n_kappa: usize,
    pub n_energy_evaluations: usize,
    pub n_iterations: usize,
    pub converged: bool,
    pub resources: ResourceEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodSummary {
    #[serde(flatten)]
    pub metrics: MethodMetrics,
    pub n_parameters: Option<usize>,
    pub n_kappa: Option<usize>,
    pub mean_energy_evaluations: Option<f64>,
    pub mean_iterations: Option<f64>,
    pub all_converged: bool,
    pub resources: Option<ResourceEstimate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub coordinate: String,
    pub chemical_accuracy_mha: f64,
    pub anchor_index: Option<usize>,
    pub anchor_coordinate: Option<f64>,
    pub points: Vec<String>,
    pub coordinates: Vec<f64>,
    pub exact: Vec<f64>,
    pub methods: Vec<MethodSummary>,
    pub failures: Vec<CellFailure>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub summary: Summary,
    /// Energies per method label, `None` where the cell failed.
    pub energies: BTreeMap<String, Vec<Option<f64>>>,
    pub failures: Vec<CellFailure>,
}

impl RunReport {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

fn file_token(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

struct PointContext {
    ints: MolecularIntegrals,
    exact: f64,
    plan: EncodingPlan,
    hamiltonian: PauliOperator,
    space: ActiveSpace,
}

fn prepare_point(config: &RunConfig, point: &ScanPoint) -> Result<PointContext> {
    let ints = config.load_point(point)?;
    if ints.n_alpha != ints.n_beta {
        return Err(Error::domain("the ansatze need a closed-shell reference"));
    }
    let space = ActiveSpace::new(ints.n_orbitals, ints.n_alpha)?;
    let exact = exact_ground(&ints)?.energy;
    let fermion = build_hamiltonian(&ints);
    let enc = &config.encoding;
    let mut plan = EncodingPlan::new(
        enc.mapping,
        enc.two_qubit_reduction,
        2 * ints.n_orbitals,
        ints.n_alpha,
        ints.n_beta,
    )?;
    if enc.taper {
        plan = plan.with_tapering(&fermion)?;
    }
    let hamiltonian = plan.encode(&fermion)?;
    Ok(PointContext {
        ints,
        exact,
        plan,
        hamiltonian,
        space,
    })
}

fn run_cell(
    config: &RunConfig,
    ctx: &PointContext,
    method: MethodSpec,
    evolution: Evolution,
) -> Result<(CellResult, VqeResult, CompiledAnsatz)> {
    let spec = build_ansatz(method.kind, &ctx.space, method.include_singles)?;
    let ansatz = compile_ansatz(&spec, &ctx.plan)?;
    let result = if method.orbital_optimized {
        oo_vqe_minimize(&ctx.ints, &ansatz, &ctx.plan, &config.optimizer)?
    } else {
        vqe_minimize_with(&ctx.hamiltonian, &ansatz, &config.optimizer, evolution, None)?
    };
    if result.energy < ctx.exact - VARIATIONAL_TOL {
        return Err(Error::Internal(format!(
            "energy {} lies below the exact ground state {}",
            result.energy, ctx.exact
        )));
    }
    let cell = CellResult {
        energy: result.energy,
        n_parameters: spec.n_parameters,
        n_kappa: result.kappa.len(),
        n_energy_evaluations: result.n_energy_evaluations,
        n_iterations: result.n_iterations,
        converged: result.converged,
        resources: estimate_resources(&ansatz),
    };
    Ok((cell, result, ansatz))
}

fn write_cell_artifacts(
    dir: &Path,
    column: &str,
    point: &str,
    result: &VqeResult,
    ansatz: &CompiledAnsatz,
    plan: &EncodingPlan,
    evolution: Evolution,
) -> Result<()> {
    let stem = format!("{}_{}", file_token(column), file_token(point));
    fs::write(dir.join(format!("trace_{stem}.csv")), result.trace_csv())?;
    let state = match evolution {
        Evolution::Trotter => ansatz.prepare(&result.theta)?,
        Evolution::Exact => ansatz.prepare_exact(&result.theta)?,
    };
    fs::write(
        dir.join(format!("weights_{stem}.csv")),
        weights_csv(&configuration_weights(&state, plan)),
    )?;
    Ok(())
}

fn exact_column(m: &MethodSpec) -> String {
    format!("{m}_exact_ucc")
}

/// Runs every selected (point, method) cell and writes the reports.
///
/// Cell failures are collected, not propagated; `Err` is returned only for an
/// invalid configuration or an unwritable output directory.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunReport> {
    let mut config = config.clone();
    if let Some(m) = &options.methods {
        config.methods = m.clone();
    }
    let findings = validate(&config);
    let errors: Vec<&str> = findings
        .iter()
        .filter(|f| f.severity == Severity::Error)
        .map(|f| f.message.as_str())
        .collect();
    if !errors.is_empty() {
        return Err(Error::Config(errors.join("; ")));
    }
    let all_points = config.points();
    let selected: Vec<ScanPoint> = match &options.points {
        Some(idx) => {
            if let Some(&bad) = idx.iter().find(|&&k| k >= all_points.len()) {
                return Err(Error::Config(format!(
                    "point {bad} outside {} points",
                    all_points.len()
                )));
            }
            idx.iter().map(|&k| all_points[k].clone()).collect()
        }
        None => all_points,
    };
    let methods = config.methods()?;
    let out_dir = options.output.clone().unwrap_or_else(|| config.output_dir());
    fs::create_dir_all(&out_dir)?;

    let mut columns: Vec<(String, MethodSpec, Evolution)> = Vec::new();
    for m in &methods {
        columns.push((m.to_string(), *m, Evolution::Trotter));
        if config.exact_ucc && !m.orbital_optimized {
            columns.push((exact_column(m), *m, Evolution::Exact));
        }
    }
    let mut failures = Vec::new();
    let mut cells: BTreeMap<String, Vec<Option<CellResult>>> = BTreeMap::new();
    let mut done: Vec<(ScanPoint, f64)> = Vec::new();

    for point in &selected {
        let ctx = match prepare_point(&config, point) {
            Ok(c) => c,
            Err(e) => {
                for (name, _, _) in &columns {
                    failures.push(CellFailure {
                        point: point.label.clone(),
                        method: name.clone(),
                        message: e.to_string(),
                    });
                }
                continue;
            }
        };
        done.push((point.clone(), ctx.exact));
        for (name, method, evolution) in &columns {
            let outcome = run_cell(&config, &ctx, *method, *evolution).and_then(|(cell, result, ansatz)| {
                write_cell_artifacts(&out_dir, name, &point.label, &result, &ansatz, &ctx.plan, *evolution)?;
                Ok(cell)
            });
            let slot = match outcome {
                Ok(c) => Some(c),
                Err(e) => {
                    failures.push(CellFailure {
                        point: point.label.clone(),
                        method: name.clone(),
                        message: e.to_string(),
                    });
                    None
                }
            };
            cells.entry(name.clone()).or_default().push(slot);
        }
        // flush partial results after every point
        write_reports(&config, &out_dir, &done, &columns, &cells, &failures)?;
    }
    let summary = write_reports(&config, &out_dir, &done, &columns, &cells, &failures)?;
    let energies = cells
        .iter()
        .map(|(k, v)| (k.clone(), v.iter().map(|c| c.as_ref().map(|c| c.energy)).collect()))
        .collect();
    Ok(RunReport {
        output_dir: out_dir,
        summary,
        energies,
        failures,
    })
}

fn write_reports(
    config: &RunConfig,
    dir: &Path,
    done: &[(ScanPoint, f64)],
    columns: &[(String, MethodSpec, Evolution)],
    cells: &BTreeMap<String, Vec<Option<CellResult>>>,
    failures: &[CellFailure],
) -> Result<Summary> {
    let coordinates: Vec<f64> = done.iter().map(|(p, _)| p.coordinate).collect();
    let exact: Vec<f64> = done.iter().map(|(_, e)| *e).collect();
    let mut series = ScanSeries::new(config.coordinate_name(), coordinates.clone(), exact.clone())?;
    for (name, _, _) in columns {
        if let Some(col) = cells.get(name) {
            series.insert_method(name.clone(), col.iter().map(|c| c.as_ref().map(|c| c.energy)).collect())?;
        }
    }
    let anchor = match config.anchor {
        Some(a) => {
            // anchor refers to the configured list; map it into the completed points
            let label = &config.points()[a].label;
            done.iter().position(|(p, _)| &p.label == label)
        }
        None => series.minimum_index(),
    };
    let mut methods = Vec::new();
    if let Some(anchor) = anchor {
        for (name, spec, _) in columns {
            let Some(col) = cells.get(name) else { continue };
            let base = spec.orbital_optimized.then(|| spec.base().to_string());
            let base = base.filter(|b| cells.contains_key(b));
            let metrics = method_metrics(&series, name, anchor, base.as_deref())?;
            let ok: Vec<&CellResult> = col.iter().flatten().collect();
            let mean = |f: fn(&CellResult) -> usize| {
                (!ok.is_empty()).then(|| ok.iter().map(|c| f(c) as f64).sum::<f64>() / ok.len() as f64)
            };
            methods.push(MethodSummary {
                metrics,
                n_parameters: ok.first().map(|c| c.n_parameters),
                n_kappa: ok.first().map(|c| c.n_kappa),
                mean_energy_evaluations: mean(|c| c.n_energy_evaluations),
                mean_iterations: mean(|c| c.n_iterations),
                all_converged: !ok.is_empty() && ok.len() == col.len() && ok.iter().all(|c| c.converged),
                resources: ok.first().map(|c| c.resources),
            });
        }
        fs::write(dir.join("scan.csv"), scan_csv(&series, anchor))?;
    }
    let summary = Summary {
        coordinate: config.coordinate_name().to_string(),
        chemical_accuracy_mha: CHEMICAL_ACCURACY * 1e3,
        anchor_index: anchor,
        anchor_coordinate: anchor.map(|a| coordinates[a]),
        points: done.iter().map(|(p, _)| p.label.clone()).collect(),
        coordinates,
        exact,
        methods,
        failures: failures.to_vec(),
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}
