//! Subcommand implementations.

use std::cell::RefCell;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use greenvqs::dimer::{symmetry_report, SymmetryPropagator};
use greenvqs::exact::{exact_greens, SpectralDecomposition};
use greenvqs::greens::{
    cf_greens, cf_training_state, compare_series, os_greens, Algorithm, BraketMode, CfExact, CfVqs, EvolvedState,
    ExactPropagator, ExtendedPropagator, GreensKind, GreensProblem, GreensResult, Propagator, SeriesComparison,
    TrotterPropagator, VqsPropagator,
};
use greenvqs::hubbard::{qubit_hamiltonian, HubbardModel, LadderOperatorExpansion};
use greenvqs::resources::{
    advantage_threshold, average_weight, cf_count, os_count, published_table, benchmark_table, table_models,
};
use greenvqs::spectral::{energy_shift, find_poles, transform, Pole, Spectrum};
use greenvqs::vqs::{EvolveOptions, ExponentConvention, SolverSettings, VhaAnsatz, VqsTrajectory};
use greenvqs::{PauliString, PauliSum, QubitState, TimeGrid};
use serde::Serialize;

use crate::bundle::{read_poles, read_series, reference_file, series_file, Bundle};
use crate::config::{apply_overrides, load_table, Config, E0Source};

const KINDS: [GreensKind; 3] = [GreensKind::Lesser, GreensKind::Greater, GreensKind::Retarded];

/// `$GREENVQS_OUT`, or the working directory.
pub fn output_root() -> PathBuf {
    std::env::var_os("GREENVQS_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

pub struct Request {
    pub config: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub out: Option<PathBuf>,
}

impl Request {
    fn load(&self) -> anyhow::Result<(Config, PathBuf)> {
        let mut table = load_table(self.config.as_deref())?;
        apply_overrides(&mut table, &self.overrides)?;
        let config = Config::from_table(&table).map_err(|errors| {
            anyhow::anyhow!("invalid configuration:\n  - {}", errors.join("\n  - "))
        })?;
        let dir = output_root().join(self.out.as_ref().unwrap_or(&config.output));
        Ok((config, dir))
    }
}

/// Model, reference solution and operators shared by the pipelines.
struct Prepared {
    config: Config,
    model: HubbardModel,
    h: PauliSum,
    decomposition: SpectralDecomposition,
    e0_exact: f64,
    ground: QubitState,
    annihilation: LadderOperatorExpansion,
    creation: LadderOperatorExpansion,
    grid: TimeGrid,
}

impl Prepared {
    fn new(config: Config) -> anyhow::Result<Self> {
        let model = config.model()?;
        let h = qubit_hamiltonian(&model)?;
        let decomposition = SpectralDecomposition::new(&h)?;
        let (e0_exact, ground) = decomposition.ground_state(config.selector())?;
        let annihilation = config.annihilation(&model)?;
        let creation = annihilation.adjoint();
        let grid = TimeGrid::with_steps(config.dt, (config.t_max / config.dt - 1e-9).ceil() as usize)?;
        Ok(Self { config, model, h, decomposition, e0_exact, ground, annihilation, creation, grid })
    }

    fn e0(&self) -> f64 {
        match self.config.e0 {
            E0Source::Exact => self.e0_exact,
            E0Source::Value(v) => v,
        }
    }

    fn problem(&self) -> GreensProblem<'_> {
        GreensProblem {
            ground: &self.ground,
            annihilation: &self.annihilation,
            creation: &self.creation,
            e0: self.e0(),
            grid: self.grid,
            mode: self.config.shots.map_or(BraketMode::Exact, BraketMode::Shots),
            seed: self.config.seed,
        }
    }

    fn ansatz(&self) -> anyhow::Result<VhaAnsatz> {
        let convention =
            if self.config.convention == "plus_i" { ExponentConvention::PlusI } else { ExponentConvention::MinusI };
        Ok(VhaAnsatz::from_hamiltonian(&self.h, self.config.depth)?.with_convention(convention))
    }

    fn options(&self) -> EvolveOptions {
        EvolveOptions { integrator: self.config.integrator, solver: SolverSettings::default() }
    }
}

/// Keeps every McLachlan trajectory it integrates.
struct RecordingOs<'a> {
    inner: VqsPropagator<'a>,
    trajectories: RefCell<Vec<(PauliString, VqsTrajectory)>>,
}

impl Propagator for RecordingOs<'_> {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Os
    }

    fn propagate(&self, right: &PauliString, s0: &QubitState, grid: &TimeGrid) -> greenvqs::Result<Vec<EvolvedState>> {
        let traj = self.inner.trajectory(right, s0, grid)?;
        let states = (0..traj.len())
            .map(|k| Ok(EvolvedState { phase: traj.theta0[k], state: traj.variational_state(k)? }))
            .collect();
        self.trajectories.borrow_mut().push((right.clone(), traj));
        states
    }
}

struct RecordingCf<'a> {
    inner: CfVqs<'a>,
    trajectories: RefCell<Vec<VqsTrajectory>>,
}

impl ExtendedPropagator for RecordingCf<'_> {
    fn propagate_extended(&self, start: &QubitState, grid: &TimeGrid) -> greenvqs::Result<Vec<QubitState>> {
        let traj = self.inner.trajectory(start, grid)?;
        let states = (0..traj.len()).map(|k| traj.variational_state(k)).collect();
        self.trajectories.borrow_mut().push(traj);
        states
    }
}

fn trajectory_name(algorithm: &str, k: usize, p: &PauliString) -> String {
    format!("trajectory_{algorithm}_{}_{p}.csv", k + 1)
}

#[derive(Serialize)]
struct HamiltonianSummary {
    n_qubits: usize,
    n_terms: usize,
    identity_coefficient: f64,
    average_weight: f64,
    ground_energy: f64,
    ground_degeneracy: usize,
    lowest_eigenvalues: Vec<f64>,
}

pub fn hamiltonian(request: &Request) -> anyhow::Result<()> {
    let (config, dir) = request.load()?;
    let p = Prepared::new(config)?;
    let w = average_weight(&p.h)?;
    let summary = HamiltonianSummary {
        n_qubits: p.h.n_qubits(),
        n_terms: p.h.len(),
        identity_coefficient: p.h.identity_coefficient(),
        average_weight: *w.numer() as f64 / *w.denom() as f64,
        ground_energy: p.e0_exact,
        ground_degeneracy: p.decomposition.ground_degeneracy(),
        lowest_eigenvalues: p.decomposition.eigenvalues().iter().take(8).copied().collect(),
    };
    let mut bundle = Bundle::create(&dir)?;
    bundle.write_text("hamiltonian.txt", &p.h.to_text())?;
    bundle.write_json("hamiltonian.json", &summary)?;
    let dir = bundle.finish("hamiltonian", p.config.to_json())?;
    println!(
        "{} qubits, {} terms, E0 = {}, degeneracy {} -> {}",
        summary.n_qubits,
        summary.n_terms,
        summary.ground_energy,
        summary.ground_degeneracy,
        dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct TrajectorySummary {
    file: String,
    right: String,
    max_residual: f64,
    min_fidelity: f64,
}

pub fn evolve(request: &Request) -> anyhow::Result<()> {
    let (config, dir) = request.load()?;
    let p = Prepared::new(config)?;
    let ansatz = p.ansatz()?;
    let mut bundle = Bundle::create(&dir)?;
    let mut summaries = Vec::new();
    for (k, (_, pj)) in p.creation.terms().iter().enumerate() {
        let (traj, reference): (VqsTrajectory, Vec<QubitState>) = match p.config.algorithm {
            Algorithm::Os => {
                let vqs = VqsPropagator { hamiltonian: &p.h, ansatz: &ansatz, options: p.options() };
                let exact = ExactPropagator { decomposition: &p.decomposition }.propagate(pj, &p.ground, &p.grid)?;
                (vqs.trajectory(pj, &p.ground, &p.grid)?, exact.iter().map(EvolvedState::full).collect())
            }
            Algorithm::Cf => {
                let start = cf_training_state(&p.ground, pj)?;
                let vqs = CfVqs { hamiltonian: &p.h, ansatz: &ansatz, options: p.options() };
                let exact = CfExact { decomposition: &p.decomposition }.propagate_extended(&start, &p.grid)?;
                (vqs.trajectory(&start, &p.grid)?, exact)
            }
            other => bail!("evolve integrates variational trajectories; algorithm {other} has none"),
        };
        let mut min_fidelity = f64::INFINITY;
        for (i, exact) in reference.iter().enumerate() {
            let state = match p.config.algorithm {
                Algorithm::Os => traj.state(i)?,
                _ => traj.variational_state(i)?,
            };
            min_fidelity = min_fidelity.min(exact.inner(&state)?.norm_sqr());
        }
        let file = trajectory_name(p.config.algorithm.name(), k, pj);
        bundle.write_trajectory(&file, &traj)?;
        summaries.push(TrajectorySummary { file, right: pj.to_string(), max_residual: traj.max_residual, min_fidelity });
    }
    bundle.write_json("evolve.json", &summaries)?;
    let dir = bundle.finish("evolve", p.config.to_json())?;
    for s in &summaries {
        println!("{}: min fidelity {:.6}, max residual {:.2e}", s.right, s.min_fidelity, s.max_residual);
    }
    println!("-> {}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct Comparison {
    kind: &'static str,
    max_abs: f64,
    rms: f64,
}

fn default_window(series_len: usize, dt: f64) -> f64 {
    series_len as f64 * dt
}

fn relative_poles(s: &Spectrum, fraction: f64) -> Vec<Pole> {
    let peak = s.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    find_poles(s, fraction * peak)
}

pub fn greens(request: &Request) -> anyhow::Result<()> {
    let (config, dir) = request.load()?;
    let p = Prepared::new(config)?;
    let problem = p.problem();
    let reference = exact_greens(&p.decomposition, &p.ground, &p.annihilation, &p.creation, &p.grid)?;
    let mut bundle = Bundle::create(&dir)?;
    let ansatz = p.ansatz()?;

    let result: GreensResult = match (p.config.algorithm, &p.config.symmetry_generator) {
        (Algorithm::Exact, _) if p.config.shots.is_none() && p.config.e0 == E0Source::Exact => GreensResult {
            lesser: reference.lesser.clone(),
            greater: reference.greater.clone(),
            retarded: reference.retarded.clone(),
        },
        (Algorithm::Exact, _) => os_greens(&ExactPropagator { decomposition: &p.decomposition }, &problem)?,
        (Algorithm::Os, Some(generator)) => {
            let generator: PauliString = generator.parse()?;
            os_greens(&SymmetryPropagator { hamiltonian: &p.h, generator }, &problem)?
        }
        (Algorithm::Os, None) => {
            let recording = RecordingOs {
                inner: VqsPropagator { hamiltonian: &p.h, ansatz: &ansatz, options: p.options() },
                trajectories: RefCell::new(Vec::new()),
            };
            let result = os_greens(&recording, &problem)?;
            for (k, (pj, traj)) in recording.trajectories.into_inner().iter().enumerate() {
                bundle.write_trajectory(&trajectory_name("os", k, pj), traj)?;
            }
            result
        }
        (Algorithm::Cf, _) => {
            let recording = RecordingCf {
                inner: CfVqs { hamiltonian: &p.h, ansatz: &ansatz, options: p.options() },
                trajectories: RefCell::new(Vec::new()),
            };
            let result = cf_greens(&recording, &problem)?;
            let strings: Vec<&PauliString> = p.creation.strings().collect();
            for (k, traj) in recording.trajectories.into_inner().iter().enumerate() {
                bundle.write_trajectory(&trajectory_name("cf", k, strings[k]), traj)?;
            }
            result
        }
        (Algorithm::Trotter, _) => {
            os_greens(&TrotterPropagator { hamiltonian: &p.h, substeps: p.config.trotter_steps }, &problem)?
        }
    };

    let mut comparisons = Vec::new();
    for kind in KINDS {
        bundle.write_series(&series_file(kind), result.get(kind))?;
        bundle.write_series(&reference_file(kind), reference.get(kind))?;
        let SeriesComparison { max_abs, rms } = compare_series(result.get(kind), reference.get(kind))?;
        comparisons.push(Comparison { kind: kind.name(), max_abs, rms });
    }
    bundle.write_json("comparison.json", &comparisons)?;

    let window = p.config.window.unwrap_or_else(|| default_window(p.grid.len(), p.grid.dt()));
    let spectrum = transform(&result.retarded, window, p.config.damping)?;
    let poles = relative_poles(&spectrum, p.config.pole_threshold);
    bundle.write_spectrum("spectrum.csv", &spectrum)?;
    bundle.write_json("poles.json", &poles)?;
    let reference_spectrum = transform(&reference.retarded, window, p.config.damping)?;
    bundle.write_json("reference_poles.json", &relative_poles(&reference_spectrum, p.config.pole_threshold))?;

    bundle.write_json("resources.json", &resource_summary(&p.h, p.config.depth as u64)?)?;
    if p.model.n_sites() == 2 {
        bundle.write_json("symmetry.json", &symmetry_report(&p.h, &p.ground)?)?;
    }
    let mut manifest = p.config.to_json();
    manifest["e0_exact"] = p.e0_exact.into();
    manifest["e0_used"] = p.e0().into();
    let dir = bundle.finish("greens", manifest)?;
    let retarded = &comparisons[2];
    println!(
        "{} G^R: max |Δ| {:.3e}, RMS {:.3e}; {} poles -> {}",
        p.config.algorithm,
        retarded.max_abs,
        retarded.rms,
        poles.len(),
        dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ResourceSummary {
    average_weight: f64,
    advantage_threshold: f64,
    os: greenvqs::GateCountReport,
    cf: greenvqs::GateCountReport,
}

fn resource_summary(h: &PauliSum, depth: u64) -> anyhow::Result<ResourceSummary> {
    let w = average_weight(h)?;
    Ok(ResourceSummary {
        average_weight: *w.numer() as f64 / *w.denom() as f64,
        advantage_threshold: advantage_threshold(h)?,
        os: os_count(h, depth)?,
        cf: cf_count(h, depth)?,
    })
}

pub struct SpectrumRequest {
    pub input: PathBuf,
    pub kind: String,
    pub window: Option<f64>,
    pub damping: f64,
    pub threshold: f64,
    pub shift: Option<(f64, f64)>,
    pub out: Option<PathBuf>,
}

pub fn spectrum(request: &SpectrumRequest) -> anyhow::Result<()> {
    let kind = KINDS
        .into_iter()
        .find(|k| k.name() == request.kind)
        .with_context(|| format!("unknown series kind {:?}", request.kind))?;
    let series = read_series(&request.input.join(series_file(kind)), kind)?;
    let window = request.window.unwrap_or_else(|| default_window(series.len(), series.grid().dt()));
    let mut s = transform(&series, window, request.damping)?;
    if let Some((e0, e0_tilde)) = request.shift {
        s = energy_shift(&s, e0, e0_tilde)?;
    }
    let poles = relative_poles(&s, request.threshold);
    let dir = request.out.clone().unwrap_or_else(|| request.input.clone());
    let mut bundle = Bundle::create(&dir)?;
    let stem = format!("spectrum_{}", kind.name());
    bundle.write_spectrum(&format!("{stem}.csv"), &s)?;
    bundle.write_json(&format!("{stem}_poles.json"), &poles)?;
    for pole in &poles {
        println!("{:.6}\t{:.6}", pole.omega, pole.height);
    }
    Ok(())
}

#[derive(Serialize)]
struct ResourceTable {
    computed: Vec<greenvqs::resources::TableRow>,
    published: Vec<greenvqs::resources::TableRow>,
    mismatches: Vec<String>,
    models: Vec<ModelWeights>,
}

#[derive(Serialize)]
struct ModelWeights {
    model: String,
    n_terms: usize,
    average_weight: String,
    advantage_threshold: f64,
}

pub fn resources(dir: &Path) -> anyhow::Result<()> {
    let computed = benchmark_table()?;
    let published = published_table();
    let mismatches = computed
        .iter()
        .zip(&published)
        .filter(|(c, p)| c != p)
        .map(|(c, p)| {
            format!(
                "{} {} d={}: computed ({}, {}, {}), published ({}, {}, {})",
                p.model,
                p.algorithm.name(),
                p.depth,
                c.one_qubit,
                c.two_qubit,
                c.total_depth,
                p.one_qubit,
                p.two_qubit,
                p.total_depth
            )
        })
        .collect::<Vec<_>>();
    let models = table_models()?
        .into_iter()
        .map(|(model, h)| {
            Ok(ModelWeights {
                n_terms: h.non_identity_terms().count(),
                average_weight: average_weight(&h)?.to_string(),
                advantage_threshold: advantage_threshold(&h)?,
                model,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    for row in &computed {
        println!(
            "{:7} {:3} d={} {:5} {:5} {:5}",
            row.model,
            row.algorithm.name(),
            row.depth,
            row.one_qubit,
            row.two_qubit,
            row.total_depth
        );
    }
    for m in &mismatches {
        println!("differs from published: {m}");
    }
    let mut bundle = Bundle::create(dir)?;
    bundle.write_json("gate_counts.json", &ResourceTable { computed, published, mismatches, models })?;
    bundle.finish("resources", serde_json::Value::Null)?;
    Ok(())
}

pub fn symmetry(request: &Request) -> anyhow::Result<()> {
    let (config, dir) = request.load()?;
    if config.n_sites != 2 {
        bail!("the symmetry analysis covers the two-site model only");
    }
    let p = Prepared::new(config)?;
    let report = symmetry_report(&p.h, &p.ground)?;
    let holds = report.propositions.holds();
    let mut bundle = Bundle::create(&dir)?;
    bundle.write_json("symmetry.json", &report)?;
    bundle.finish("symmetry", p.config.to_json())?;
    println!("propositions hold: {holds}; S1 column sums {:?}", report.s1_column_sums);
    if !holds {
        bail!("proposition check failed (max residual {:e})", report.propositions.max_residual);
    }
    Ok(())
}

#[derive(Serialize)]
struct PoleShift {
    reference: f64,
    candidate: f64,
    shift: f64,
}

#[derive(Serialize)]
struct CompareReport {
    series: Vec<Comparison>,
    pole_shifts: Vec<PoleShift>,
    unmatched_poles: usize,
}

pub fn compare(reference: &Path, candidate: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let mut series = Vec::new();
    for kind in KINDS {
        let (a, b) = (reference.join(series_file(kind)), candidate.join(series_file(kind)));
        if !a.exists() && !b.exists() {
            continue;
        }
        let a = read_series(&a, kind)?;
        let b = read_series(&b, kind)?;
        let c = compare_series(&b, &a).with_context(|| format!("comparing {} series", kind.name()))?;
        series.push(Comparison { kind: kind.name(), max_abs: c.max_abs, rms: c.rms });
    }
    if series.is_empty() {
        bail!("no Green's-function series found in either bundle");
    }
    let (mut pole_shifts, mut unmatched_poles) = (Vec::new(), 0);
    let (pa, pb) = (reference.join("poles.json"), candidate.join("poles.json"));
    if pa.exists() && pb.exists() {
        let (ref_poles, cand_poles) = (read_poles(&pa)?, read_poles(&pb)?);
        unmatched_poles = ref_poles.len().abs_diff(cand_poles.len());
        for r in &ref_poles {
            if let Some(c) = cand_poles
                .iter()
                .min_by(|x, y| (x.omega - r.omega).abs().total_cmp(&(y.omega - r.omega).abs()))
            {
                pole_shifts.push(PoleShift { reference: r.omega, candidate: c.omega, shift: c.omega - r.omega });
            }
        }
    }
    let report = CompareReport { series, pole_shifts, unmatched_poles };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    print!("{text}");
    if let Some(path) = out {
        let path = output_root().join(path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
