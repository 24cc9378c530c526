use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::output::{read_csv_records, write_atomic, Artifact};
use super::{
    median, run_method, run_methods, ExpResult, ExperimentConfig, ExperimentError, Method,
    MethodOutcome, Problem, SummaryRow, SummaryTable,
};
use crate::ansatz::{init_angles, random_layered};
use crate::antibp::RunTrace;
use crate::gradients::adjoint_gradient;
use crate::hamiltonian::Hamiltonian;
use crate::seeding;
use crate::sim::Circuit;

fn write_traces(cfg: &ExperimentConfig, command: &str, o: &MethodOutcome) -> ExpResult<()> {
    let dir = cfg.out_dir.join("traces");
    for (stage, trace) in &o.traces {
        let mut a = Artifact::new(command, cfg, &RunTrace::CSV_HEADER.split(',').collect::<Vec<_>>())?
            .meta("method", o.method)
            .meta("depth", o.depth)
            .meta("seed", o.seed)
            .meta("stage", stage);
        for r in &trace.records {
            a.row([
                r.epoch.to_string(),
                format!("{:?}", r.energy),
                format!("{:?}", r.grad_norm),
                r.active_1q.to_string(),
                r.active_2q.to_string(),
            ])?;
        }
        a.write(
            &dir,
            &format!("{}_d{}_s{}_{stage}.csv", o.method, o.depth, o.seed),
        )?;
    }
    Ok(())
}

fn summary_header(with_seed: bool) -> Vec<&'static str> {
    let mut h = Vec::new();
    if with_seed {
        h.push("seed");
    }
    h.extend_from_slice(&SummaryRow::CSV_HEADER);
    h
}

/// Runs `cfg.method` at `cfg.depth` for every seed. Writes one trace CSV per
/// stage and `run_summary.csv`; returns one row per seed.
pub fn cmd_run(cfg: &ExperimentConfig) -> ExpResult<Vec<SummaryRow>> {
    cfg.validate()?;
    let problem = Problem::load(cfg)?;
    let outcomes: Vec<MethodOutcome> = cfg
        .seeds
        .par_iter()
        .map(|&s| run_method(cfg, &problem, cfg.method, cfg.depth, s, None))
        .collect::<ExpResult<_>>()?;
    let mut art = Artifact::new("run", cfg, &summary_header(true))?;
    let mut rows = Vec::new();
    for o in &outcomes {
        write_traces(cfg, "run", o)?;
        let row = SummaryRow::from_outcome(&problem, o);
        art.row(std::iter::once(o.seed.to_string()).chain(row.csv_record()))?;
        rows.push(row);
    }
    art.write(&cfg.out_dir, "run_summary.csv")?;
    Ok(rows)
}

/// Per-(depth, method) medians over seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub depth: usize,
    pub method: Method,
    pub median_energy: f64,
    pub median_gap: f64,
    pub n_seeds: usize,
}

/// Every method in `cfg.methods` at every depth in `cfg.depths` and every seed.
/// Writes `sweep_runs.csv` and the median table `sweep_depth.csv`.
pub fn cmd_sweep_depth(cfg: &ExperimentConfig) -> ExpResult<Vec<SweepRow>> {
    if cfg.depths.len() < 2 {
        return Err(ExperimentError::Config(format!(
            "sweep-depth needs at least two depths, got {:?}",
            cfg.depths
        )));
    }
    if cfg.methods.is_empty() {
        return Err(ExperimentError::Config("no methods to sweep".into()));
    }
    if cfg.depths.contains(&0) {
        return Err(ExperimentError::Config("depths must be positive".into()));
    }
    cfg.validate()?;
    let problem = Problem::load(cfg)?;
    let jobs: Vec<(usize, u64)> = cfg
        .depths
        .iter()
        .flat_map(|&d| cfg.seeds.iter().map(move |&s| (d, s)))
        .collect();
    let outcomes: Vec<MethodOutcome> = jobs
        .par_iter()
        .map(|&(d, s)| run_methods(cfg, &problem, &cfg.methods, d, s))
        .collect::<ExpResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut runs = Artifact::new(
        "sweep-depth",
        cfg,
        &["depth", "method", "seed", "n_1q", "n_2q", "energy", "gap"],
    )?;
    for o in &outcomes {
        write_traces(cfg, "sweep-depth", o)?;
        let (n1, n2) = o.counts();
        runs.row([
            o.depth.to_string(),
            o.method.to_string(),
            o.seed.to_string(),
            n1.to_string(),
            n2.to_string(),
            format!("{:?}", o.energy),
            format!("{:?}", o.energy - problem.reference),
        ])?;
    }
    runs.write(&cfg.out_dir, "sweep_runs.csv")?;

    let mut groups: BTreeMap<(usize, Method), Vec<f64>> = BTreeMap::new();
    for o in &outcomes {
        groups.entry((o.depth, o.method)).or_default().push(o.energy);
    }
    let mut art = Artifact::new(
        "sweep-depth",
        cfg,
        &["depth", "method", "median_energy", "median_gap", "reference_energy", "n_seeds"],
    )?;
    let mut rows = Vec::new();
    for ((depth, method), energies) in groups {
        let e = median(&energies);
        let row = SweepRow {
            depth,
            method,
            median_energy: e,
            median_gap: e - problem.reference,
            n_seeds: energies.len(),
        };
        art.row([
            depth.to_string(),
            method.to_string(),
            format!("{:?}", row.median_energy),
            format!("{:?}", row.median_gap),
            format!("{:?}", problem.reference),
            row.n_seeds.to_string(),
        ])?;
        rows.push(row);
    }
    art.write(&cfg.out_dir, "sweep_depth.csv")?;
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradVarRow {
    pub depth: usize,
    pub mean: f64,
    pub variance: f64,
    pub n_samples: usize,
}

/// Sample mean and unbiased variance of `dE/d(angle param_index)` over the
/// circuits and angles produced by `family(0..n_samples)`.
pub fn gradient_variance_of<F>(
    h: &Hamiltonian,
    n_samples: usize,
    param_index: usize,
    family: F,
) -> ExpResult<(f64, f64)>
where
    F: Fn(usize) -> crate::Result<(Circuit, Vec<f64>)> + Sync,
{
    if n_samples < 2 {
        return Err(ExperimentError::Config(format!(
            "gradient variance needs at least 2 samples, got {n_samples}"
        )));
    }
    let grads: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let (c, angles) = family(i)?;
            let g = adjoint_gradient(&c, h, &angles)?;
            g.get(param_index).copied().ok_or(crate::Error::LengthError {
                expected: param_index + 1,
                found: g.len(),
            })
        })
        .collect::<crate::Result<_>>()?;
    let n = n_samples as f64;
    let mean = grads.iter().sum::<f64>() / n;
    let var = grads.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var))
}

/// Gradient variance over the random layered family: sample `i` draws both its
/// circuit and its angles from `derive(seed, i)`.
pub fn gradient_variance(
    h: &Hamiltonian,
    depth: usize,
    n_samples: usize,
    seed: u64,
    param_index: usize,
) -> ExpResult<(f64, f64)> {
    gradient_variance_of(h, n_samples, param_index, |i| {
        let s = seeding::derive(seed, i as u64);
        let c = random_layered(h.n_qubits(), depth, s)?;
        let angles = init_angles(c.n_slots(), s);
        Ok((c, angles))
    })
}

/// Writes `gradvar.csv` with one row per depth in `cfg.depths`.
pub fn cmd_gradvar(cfg: &ExperimentConfig) -> ExpResult<Vec<GradVarRow>> {
    if cfg.depths.is_empty() {
        return Err(ExperimentError::Config("no depths given".into()));
    }
    let h = cfg.load_hamiltonian()?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let mut art = Artifact::new("gradvar", cfg, &["depth", "mean", "variance", "n_samples"])?
        .meta("param_index", cfg.param_index);
    let mut rows = Vec::new();
    for &depth in &cfg.depths {
        let (mean, variance) =
            gradient_variance(&h, depth, cfg.samples, seed, cfg.param_index)?;
        art.row([
            depth.to_string(),
            format!("{mean:?}"),
            format!("{variance:?}"),
            cfg.samples.to_string(),
        ])?;
        rows.push(GradVarRow {
            depth,
            mean,
            variance,
            n_samples: cfg.samples,
        });
    }
    art.write(&cfg.out_dir, "gradvar.csv")?;
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AblationRow {
    pub seed: u64,
    pub n_1q: usize,
    pub n_2q: usize,
    pub antibp_energy: f64,
    pub randomprune_energy: f64,
}

/// AntiBP against random pruning to the same gate counts, per seed.
/// Writes `ablation.csv` with per-seed rows followed by median rows.
pub fn cmd_ablation(cfg: &ExperimentConfig) -> ExpResult<Vec<AblationRow>> {
    cfg.validate()?;
    if cfg.seeds.len() < 5 {
        log::warn!("ablation over {} seeds; at least 5 recommended", cfg.seeds.len());
    }
    let problem = Problem::load(cfg)?;
    let methods = [Method::AntiBp, Method::RandomPrune];
    let per_seed: Vec<Vec<MethodOutcome>> = cfg
        .seeds
        .par_iter()
        .map(|&s| run_methods(cfg, &problem, &methods, cfg.depth, s))
        .collect::<ExpResult<_>>()?;

    let mut art = Artifact::new(
        "ablation",
        cfg,
        &["seed", "method", "n_1q", "n_2q", "energy", "gap"],
    )?
    .meta("depth", cfg.depth);
    let mut rows = Vec::new();
    for outs in &per_seed {
        let (a, r) = (&outs[0], &outs[1]);
        assert_eq!(a.counts(), r.counts(), "ablation arms must match gate counts");
        for o in outs {
            write_traces(cfg, "ablation", o)?;
            let (n1, n2) = o.counts();
            art.row([
                o.seed.to_string(),
                o.method.to_string(),
                n1.to_string(),
                n2.to_string(),
                format!("{:?}", o.energy),
                format!("{:?}", o.energy - problem.reference),
            ])?;
        }
        rows.push(AblationRow {
            seed: a.seed,
            n_1q: a.counts().0,
            n_2q: a.counts().1,
            antibp_energy: a.energy,
            randomprune_energy: r.energy,
        });
    }
    for (i, m) in methods.iter().enumerate() {
        let e: Vec<f64> = per_seed.iter().map(|o| o[i].energy).collect();
        let med = median(&e);
        art.row([
            "median".to_string(),
            m.to_string(),
            String::new(),
            String::new(),
            format!("{med:?}"),
            format!("{:?}", med - problem.reference),
        ])?;
    }
    art.write(&cfg.out_dir, "ablation.csv")?;
    Ok(rows)
}

/// Every method in `cfg.methods` (vanilla always first, as the baseline) under
/// one noise setting. Writes `compare_runs.csv`, `compare_summary.csv` and
/// `compare_table.txt`; returns the median rows.
pub fn cmd_compare(cfg: &ExperimentConfig) -> ExpResult<Vec<SummaryRow>> {
    cfg.validate()?;
    let problem = Problem::load(cfg)?;
    let mut methods = vec![Method::Vanilla];
    methods.extend(cfg.methods.iter().filter(|&&m| m != Method::Vanilla));
    let per_seed: Vec<Vec<MethodOutcome>> = cfg
        .seeds
        .par_iter()
        .map(|&s| run_methods(cfg, &problem, &methods, cfg.depth, s))
        .collect::<ExpResult<_>>()?;

    let mut runs = Artifact::new("compare", cfg, &summary_header(true))?;
    for outs in &per_seed {
        let baseline_gap = outs[0].energy - problem.reference;
        for o in outs {
            write_traces(cfg, "compare", o)?;
            let mut row = SummaryRow::from_outcome(&problem, o);
            if o.method != Method::Vanilla {
                row = row.with_baseline(baseline_gap);
            }
            runs.row(std::iter::once(o.seed.to_string()).chain(row.csv_record()))?;
        }
    }
    runs.write(&cfg.out_dir, "compare_runs.csv")?;

    let mut rows: Vec<SummaryRow> = (0..methods.len())
        .map(|i| {
            let outs: Vec<&MethodOutcome> = per_seed.iter().map(|o| &o[i]).collect();
            SummaryRow::median_of(&problem, &outs)
        })
        .collect();
    let baseline_gap = rows[0].gap;
    for r in rows.iter_mut().skip(1) {
        *r = r.clone().with_baseline(baseline_gap);
    }
    let mut art = Artifact::new("compare", cfg, &summary_header(false))?
        .meta("noise", format!("p1q={:?} p2q={:?}", cfg.p1q, cfg.p2q));
    for r in &rows {
        art.row(r.csv_record())?;
    }
    art.write(&cfg.out_dir, "compare_summary.csv")?;
    write_atomic(
        &cfg.out_dir,
        "compare_table.txt",
        &SummaryTable(&rows).to_string(),
    )?;
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportKind {
    /// The final circuit and angles of `cfg.method` on the first seed.
    Circuit,
    /// The ingested Hamiltonian in Pauli-sum text form.
    Hamiltonian,
    /// Median energy against depth from a `sweep_depth.csv`.
    Svg,
}

/// Returns the paths written.
pub fn cmd_export(
    cfg: &ExperimentConfig,
    kind: ExportKind,
    input: Option<&Path>,
) -> ExpResult<Vec<PathBuf>> {
    match kind {
        ExportKind::Hamiltonian => {
            let h = cfg.load_hamiltonian()?;
            Ok(vec![write_atomic(&cfg.out_dir, "hamiltonian.txt", &h.to_text())?])
        }
        ExportKind::Circuit => {
            cfg.validate()?;
            let problem = Problem::load(cfg)?;
            let seed = cfg.seeds[0];
            let o = run_method(cfg, &problem, cfg.method, cfg.depth, seed, None)?;
            let stem = format!("{}_d{}_s{seed}", o.method, o.depth);
            let circuit = write_atomic(
                &cfg.out_dir,
                &format!("circuit_{stem}.txt"),
                &o.circuit.to_text(),
            )?;
            let mut a = Artifact::new("export", cfg, &["slot", "angle"])?
                .meta("energy", format!("{:?}", o.energy));
            for (i, x) in o.angles.iter().enumerate() {
                a.row([i.to_string(), format!("{x:?}")])?;
            }
            let angles = a.write(&cfg.out_dir, &format!("angles_{stem}.csv"))?;
            Ok(vec![circuit, angles])
        }
        ExportKind::Svg => {
            let default = cfg.out_dir.join("sweep_depth.csv");
            let path = input.unwrap_or(&default);
            let (header, records) = read_csv_records(path)?;
            let col = |name: &str| {
                header.iter().position(|h| h == name).ok_or_else(|| {
                    ExperimentError::Config(format!("{}: missing column {name}", path.display()))
                })
            };
            let (cd, cm, ce, cr) = (
                col("depth")?,
                col("method")?,
                col("median_energy")?,
                col("reference_energy")?,
            );
            let num = |s: &str| -> ExpResult<f64> {
                s.parse()
                    .map_err(|_| ExperimentError::Config(format!("bad number {s:?} in {}", path.display())))
            };
            let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
            let mut reference = None;
            for r in &records {
                series
                    .entry(r[cm].clone())
                    .or_default()
                    .push((num(&r[cd])?, num(&r[ce])?));
                reference = Some(num(&r[cr])?);
            }
            let mut series: Vec<(String, Vec<(f64, f64)>)> = series.into_iter().collect();
            for (_, pts) in &mut series {
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
            let svg = super::render_svg(
                "Median final energy vs circuit depth",
                "depth",
                "energy",
                &series,
                reference,
            );
            Ok(vec![write_atomic(&cfg.out_dir, "sweep_depth.svg", &svg)?])
        }
    }
}
