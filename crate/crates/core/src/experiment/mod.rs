//! Experiment harness behind the `antibp` binary: seeded runs of every method,
//! summary rows, and the sweep/ablation/compare commands.

mod commands;
pub mod config;
mod output;

use std::fmt;
use std::path::PathBuf;

pub use commands::{
    cmd_ablation, cmd_compare, cmd_export, cmd_gradvar, cmd_run, cmd_sweep_depth,
    gradient_variance, gradient_variance_of, AblationRow, ExportKind, GradVarRow, SweepRow,
};
pub use config::{ExperimentConfig, Method};
pub use output::{render_svg, Artifact};

use crate::ansatz::{antibp_encode, identity_block, init_angles, random_layered, random_prune};
use crate::antibp::{prune, stage1, stage2, vanilla_vqe, RunTrace};
use crate::hamiltonian::{Hamiltonian, DENSE_QUBIT_LIMIT};
use crate::noise::noisy_expectation;
use crate::seeding::{self, tag};
use crate::sim::{expectation, run, Circuit};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(crate::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    /// 2 for configuration problems, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Core(_) => 2,
            ExperimentError::Numerical(_) => 3,
            ExperimentError::Io { .. } | ExperimentError::Csv(_) => 1,
        }
    }
}

impl From<crate::Error> for ExperimentError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Diverged { .. } => ExperimentError::Numerical(e.to_string()),
            other => ExperimentError::Core(other),
        }
    }
}

pub type ExpResult<T> = std::result::Result<T, ExperimentError>;

/// A Hamiltonian with its label and exact ground energy.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub hamiltonian: Hamiltonian,
    pub reference: f64,
}

impl Problem {
    pub fn load(cfg: &ExperimentConfig) -> ExpResult<Problem> {
        let hamiltonian = cfg.load_hamiltonian()?;
        let reference = match cfg.reference_energy {
            Some(e) => e,
            None if hamiltonian.n_qubits() > DENSE_QUBIT_LIMIT => {
                return Err(ExperimentError::Config(format!(
                    "{} qubits is above the exact-diagonalization limit of {DENSE_QUBIT_LIMIT}; \
                     set reference_energy",
                    hamiltonian.n_qubits()
                )))
            }
            None => hamiltonian.exact_ground_energy()?,
        };
        Ok(Problem {
            name: cfg.display_name(),
            hamiltonian,
            reference,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }
}

/// Everything one (method, depth, seed) run produced.
#[derive(Clone, Debug)]
pub struct MethodOutcome {
    pub method: Method,
    pub depth: usize,
    pub seed: u64,
    /// Gate counts of the random layered circuit the method started from.
    pub original_counts: (usize, usize),
    /// The circuit whose angles were optimized last.
    pub circuit: Circuit,
    pub angles: Vec<f64>,
    /// Exact energy when noiseless, otherwise a fresh trajectory estimate.
    pub energy: f64,
    pub traces: Vec<(&'static str, RunTrace)>,
}

impl MethodOutcome {
    pub fn counts(&self) -> (usize, usize) {
        self.circuit.gate_counts()
    }
}

/// Energy reported for final angles: exact when noiseless, else averaged over
/// `eval_trajectories` trajectories on a stream separate from training.
pub fn evaluate(
    cfg: &ExperimentConfig,
    h: &Hamiltonian,
    c: &Circuit,
    angles: &[f64],
    seed: u64,
) -> ExpResult<f64> {
    let e = match cfg.noise_model()? {
        None => expectation(&run(c, angles)?, h)?,
        Some(nm) => {
            let s = seeding::derive(seed, tag::EVAL_NOISE);
            noisy_expectation(c, angles, h, &nm, cfg.eval_trajectories, s)?.mean
        }
    };
    if !e.is_finite() {
        return Err(ExperimentError::Numerical(format!(
            "non-finite final energy {e}"
        )));
    }
    Ok(e)
}

/// Runs `method` on the seeded random layered circuit of the given depth.
///
/// `keep` fixes the random-pruning gate counts; without it (and without
/// `randomprune.keep_*` in the config) an AntiBP run on the same seed supplies them.
pub fn run_method(
    cfg: &ExperimentConfig,
    problem: &Problem,
    method: Method,
    depth: usize,
    seed: u64,
    keep: Option<(usize, usize)>,
) -> ExpResult<MethodOutcome> {
    let h = &problem.hamiltonian;
    let source = random_layered(problem.n_qubits(), depth, seed)?;
    let opt = cfg.optimizer(seed, cfg.epochs)?;
    let (circuit, angles, traces) = match method {
        Method::Vanilla => {
            let r = vanilla_vqe(&source, h, &opt)?;
            (source.clone(), r.angles, vec![("vqe", r.trace)])
        }
        Method::IdBlock => {
            let theta = init_angles(source.n_slots(), seed);
            let (c, x0) = identity_block(&source, &theta)?;
            let r = stage2(&c, &x0, h, &opt)?;
            (c, r.angles, vec![("vqe", r.trace)])
        }
        Method::AntiBp => {
            let gc = antibp_encode(&source)?.with_steepness(cfg.steepness);
            let (p, t1) = stage1(&gc, h, &cfg.optimizer(seed, cfg.stage1_epochs)?)?;
            let pruned = prune(&gc, &p, cfg.prune_threshold)?;
            let r = stage2(
                &pruned.circuit,
                &pruned.theta0,
                h,
                &cfg.optimizer(seed, cfg.stage2_epochs)?,
            )?;
            (pruned.circuit, r.angles, vec![("stage1", t1), ("stage2", r.trace)])
        }
        Method::RandomPrune => {
            let (k1, k2) = match keep.or(cfg.keep_1q.zip(cfg.keep_2q)) {
                Some(k) => k,
                None => run_method(cfg, problem, Method::AntiBp, depth, seed, None)?.counts(),
            };
            let c = random_prune(&source, k1, k2, seed)?;
            let r = vanilla_vqe(&c, h, &opt)?;
            (c, r.angles, vec![("vqe", r.trace)])
        }
    };
    let energy = evaluate(cfg, h, &circuit, &angles, seed)?;
    Ok(MethodOutcome {
        method,
        depth,
        seed,
        original_counts: source.gate_counts(),
        circuit,
        angles,
        energy,
        traces,
    })
}

/// Runs `methods` in order for one (depth, seed). Random pruning reuses the
/// AntiBP gate counts when AntiBP ran earlier in the list.
pub fn run_methods(
    cfg: &ExperimentConfig,
    problem: &Problem,
    methods: &[Method],
    depth: usize,
    seed: u64,
) -> ExpResult<Vec<MethodOutcome>> {
    let mut out: Vec<MethodOutcome> = Vec::with_capacity(methods.len());
    for &m in methods {
        let keep = out
            .iter()
            .find(|o| o.method == Method::AntiBp)
            .map(MethodOutcome::counts);
        out.push(run_method(cfg, problem, m, depth, seed, keep)?);
    }
    Ok(out)
}

/// `100 (gap_baseline - gap_method) / gap_baseline`; negative when the method is worse.
pub fn improvement_percent(gap_baseline: f64, gap_method: f64) -> f64 {
    100.0 * (gap_baseline - gap_method) / gap_baseline
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Lower median, so counts stay integral.
fn median_count(values: &[usize]) -> usize {
    let mut v = values.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// One line of a gate-count/energy comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub qubits: usize,
    pub depth: usize,
    pub method: Method,
    pub n_1q: usize,
    pub n_2q: usize,
    pub reference: f64,
    pub energy: f64,
    pub gap: f64,
    /// Percent improvement over the baseline row; `None` on the baseline itself.
    pub improvement: Option<f64>,
    pub original_1q: usize,
    pub original_2q: usize,
}

impl SummaryRow {
    pub const CSV_HEADER: [&'static str; 12] = [
        "name",
        "qubits",
        "depth",
        "method",
        "n_1q",
        "n_2q",
        "reference_energy",
        "energy",
        "gap",
        "improvement_pct",
        "original_1q",
        "original_2q",
    ];

    pub fn new(
        problem: &Problem,
        depth: usize,
        method: Method,
        counts: (usize, usize),
        original: (usize, usize),
        energy: f64,
    ) -> SummaryRow {
        SummaryRow {
            name: problem.name.clone(),
            qubits: problem.n_qubits(),
            depth,
            method,
            n_1q: counts.0,
            n_2q: counts.1,
            reference: problem.reference,
            energy,
            gap: energy - problem.reference,
            improvement: None,
            original_1q: original.0,
            original_2q: original.1,
        }
    }

    pub fn from_outcome(problem: &Problem, o: &MethodOutcome) -> SummaryRow {
        SummaryRow::new(problem, o.depth, o.method, o.counts(), o.original_counts, o.energy)
    }

    /// Median energy and gate counts over seeds of one method.
    pub fn median_of(problem: &Problem, outcomes: &[&MethodOutcome]) -> SummaryRow {
        let first = outcomes[0];
        let energies: Vec<f64> = outcomes.iter().map(|o| o.energy).collect();
        let n1: Vec<usize> = outcomes.iter().map(|o| o.counts().0).collect();
        let n2: Vec<usize> = outcomes.iter().map(|o| o.counts().1).collect();
        SummaryRow::new(
            problem,
            first.depth,
            first.method,
            (median_count(&n1), median_count(&n2)),
            first.original_counts,
            median(&energies),
        )
    }

    pub fn with_baseline(mut self, baseline_gap: f64) -> SummaryRow {
        self.improvement = Some(improvement_percent(baseline_gap, self.gap));
        self
    }

    pub fn improvement_label(&self) -> String {
        match self.improvement {
            None => "baseline".into(),
            Some(p) => format!("{p:.2}%"),
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.qubits.to_string(),
            self.depth.to_string(),
            self.method.to_string(),
            self.n_1q.to_string(),
            self.n_2q.to_string(),
            format!("{:?}", self.reference),
            format!("{:?}", self.energy),
            format!("{:?}", self.gap),
            self.improvement.map_or(String::new(), |p| format!("{p:?}")),
            self.original_1q.to_string(),
            self.original_2q.to_string(),
        ]
    }
}

/// Fixed-width text rendering of summary rows.
pub struct SummaryTable<'a>(pub &'a [SummaryRow]);

impl fmt::Display for SummaryTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:>6} {:>6} {:<12} {:>7} {:>7} {:>12} {:>12} {:>10} {:>10}",
            "Name", "Qubits", "Depth", "Method", "#1q", "#2q", "Ref.Energy", "Energy", "Gap", "Improv."
        )?;
        for r in self.0 {
            writeln!(
                f,
                "{:<14} {:>6} {:>6} {:<12} {:>7} {:>7} {:>12.4} {:>12.4} {:>10.4} {:>10}",
                r.name,
                r.qubits,
                r.depth,
                r.method.name(),
                r.n_1q,
                r.n_2q,
                r.reference,
                r.energy,
                r.gap,
                r.improvement_label()
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::from_text(
            "hamiltonian = tfim:3:1:1\ndepth = 3\nseeds = 1\noptimizer.epochs = 5\n\
             antibp.stage1_epochs = 5\nantibp.stage2_epochs = 5",
        )
        .unwrap();
        cfg.validate().unwrap();
        cfg.name = Some("tfim3".into());
        cfg
    }

    #[test]
    fn improvement_matches_worked_example() {
        let p = improvement_percent(11.7543, 6.9085);
        assert_eq!(format!("{p:.2}"), "41.23");
        assert!(improvement_percent(1.0, 2.0) < 0.0);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median_count(&[4, 1, 2, 3]), 2);
    }

    #[test]
    fn idblock_doubles_counts_and_rows_recompute() {
        let cfg = tiny();
        let problem = Problem::load(&cfg).unwrap();
        let outs = run_methods(&cfg, &problem, &Method::ALL, 3, 1).unwrap();
        let (v, i, a, r) = (&outs[0], &outs[1], &outs[2], &outs[3]);
        assert_eq!(i.counts(), (2 * v.counts().0, 2 * v.counts().1));
        assert_eq!(r.counts(), a.counts());
        for o in &outs {
            let row = SummaryRow::from_outcome(&problem, o).with_baseline(0.5);
            assert!(row.gap >= -1e-9);
            assert!((row.gap - (row.energy - row.reference)).abs() < 1e-12);
            assert_eq!(row.original_1q, v.counts().0);
        }
        let table = SummaryTable(&[SummaryRow::from_outcome(&problem, v)]).to_string();
        assert!(table.contains("baseline"));
    }

    #[test]
    fn divergence_maps_to_exit_3() {
        let e: ExperimentError = crate::Error::Diverged {
            epoch: 3,
            energy: f64::NAN,
        }
        .into();
        assert_eq!(e.exit_code(), 3);
        assert_eq!(ExperimentError::Config("x".into()).exit_code(), 2);
    }
}
