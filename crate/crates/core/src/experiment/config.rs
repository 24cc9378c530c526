//! Flat `key = value` experiment configuration with dotted keys.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use super::ExperimentError;
use crate::antibp::{NoisyTraining, OptimizerConfig};
use crate::hamiltonian::{parse_hamiltonian, tfim, Hamiltonian};
use crate::noise::NoiseModel;

const H2_FIXTURE: &str = include_str!("../../fixtures/h2_sto3g.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Vanilla,
    IdBlock,
    AntiBp,
    RandomPrune,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Vanilla,
        Method::IdBlock,
        Method::AntiBp,
        Method::RandomPrune,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Vanilla => "vanilla",
            Method::IdBlock => "idblock",
            Method::AntiBp => "antibp",
            Method::RandomPrune => "randomprune",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ExperimentError::Config(format!("unknown method {s:?}")))
    }
}

/// Every knob of an experiment. Built from defaults, then a config file, then
/// command-line overrides, all through [`ExperimentConfig::set`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// `tfim:<n>:<J>:<h>`, `h2`, or a path to a Pauli-sum file.
    pub hamiltonian: String,
    /// Label used in summary tables; defaults to the Hamiltonian source.
    pub name: Option<String>,
    /// Overrides the exact ground energy; required above the dense-diagonalization limit.
    pub reference_energy: Option<f64>,
    pub n_qubits: Option<usize>,
    pub depth: usize,
    pub method: Method,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,

    pub learning_rate: f64,
    pub epochs: usize,
    pub stage1_epochs: usize,
    pub stage2_epochs: usize,
    pub prune_threshold: f64,
    pub steepness: f64,

    pub p1q: f64,
    pub p2q: f64,
    pub trajectories: usize,
    pub eval_trajectories: usize,

    pub keep_1q: Option<usize>,
    pub keep_2q: Option<usize>,

    pub depths: Vec<usize>,
    pub methods: Vec<Method>,
    pub samples: usize,
    pub param_index: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            hamiltonian: "h2".into(),
            name: None,
            reference_energy: None,
            n_qubits: None,
            depth: 60,
            method: Method::AntiBp,
            seeds: (0..5).collect(),
            out_dir: PathBuf::from("out"),
            learning_rate: 0.01,
            epochs: 300,
            stage1_epochs: 200,
            stage2_epochs: 300,
            prune_threshold: 0.5,
            steepness: crate::ansatz::DEFAULT_STEEPNESS,
            p1q: 0.0,
            p2q: 0.0,
            trajectories: 200,
            eval_trajectories: 2000,
            keep_1q: None,
            keep_2q: None,
            depths: vec![5, 20, 60, 100],
            methods: vec![Method::Vanilla, Method::IdBlock, Method::AntiBp],
            samples: 200,
            param_index: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ExperimentError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| ExperimentError::Config(format!("{key} = {value:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ExperimentError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ExperimentError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        match key {
            "hamiltonian" => self.hamiltonian = value.to_string(),
            "name" => self.name = Some(value.to_string()),
            "reference_energy" => self.reference_energy = Some(parse_value(key, value)?),
            "n_qubits" | "qubits" => self.n_qubits = Some(parse_value(key, value)?),
            "depth" => self.depth = parse_value(key, value)?,
            "method" => self.method = value.parse()?,
            "seed" => self.seeds = vec![parse_value(key, value)?],
            "seeds" => self.seeds = parse_list(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "optimizer.lr" | "optimizer.learning_rate" => {
                self.learning_rate = parse_value(key, value)?
            }
            "optimizer.epochs" => self.epochs = parse_value(key, value)?,
            "antibp.stage1_epochs" => self.stage1_epochs = parse_value(key, value)?,
            "antibp.stage2_epochs" => self.stage2_epochs = parse_value(key, value)?,
            "antibp.threshold" | "prune.threshold" => {
                self.prune_threshold = parse_value(key, value)?
            }
            "antibp.k" | "antibp.steepness" => self.steepness = parse_value(key, value)?,
            "noise.p" => {
                let p = parse_value(key, value)?;
                self.p1q = p;
                self.p2q = p;
            }
            "noise.p1q" => self.p1q = parse_value(key, value)?,
            "noise.p2q" => self.p2q = parse_value(key, value)?,
            "noise.trajectories" => self.trajectories = parse_value(key, value)?,
            "noise.eval_trajectories" => self.eval_trajectories = parse_value(key, value)?,
            "randomprune.keep_1q" => self.keep_1q = Some(parse_value(key, value)?),
            "randomprune.keep_2q" => self.keep_2q = Some(parse_value(key, value)?),
            "sweep.depths" | "depths" => self.depths = parse_list(key, value)?,
            "methods" | "compare.methods" | "sweep.methods" => {
                self.methods = parse_list(key, value)?
            }
            "gradvar.samples" | "samples" => self.samples = parse_value(key, value)?,
            "gradvar.param_index" => self.param_index = parse_value(key, value)?,
            _ => return Err(ExperimentError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Every key except `out_dir`, sorted, one `key=value` per line.
    pub fn canonical(&self) -> String {
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        m.insert("hamiltonian", self.hamiltonian.clone());
        m.insert("name", self.display_name());
        m.insert(
            "reference_energy",
            self.reference_energy.map_or("exact".into(), |e| format!("{e:?}")),
        );
        m.insert(
            "n_qubits",
            self.n_qubits.map_or("auto".into(), |n| n.to_string()),
        );
        m.insert("depth", self.depth.to_string());
        m.insert("method", self.method.to_string());
        m.insert("seeds", join(&self.seeds));
        m.insert("optimizer.lr", format!("{:?}", self.learning_rate));
        m.insert("optimizer.epochs", self.epochs.to_string());
        m.insert("antibp.stage1_epochs", self.stage1_epochs.to_string());
        m.insert("antibp.stage2_epochs", self.stage2_epochs.to_string());
        m.insert("antibp.threshold", format!("{:?}", self.prune_threshold));
        m.insert("antibp.k", format!("{:?}", self.steepness));
        m.insert("noise.p1q", format!("{:?}", self.p1q));
        m.insert("noise.p2q", format!("{:?}", self.p2q));
        m.insert("noise.trajectories", self.trajectories.to_string());
        m.insert("noise.eval_trajectories", self.eval_trajectories.to_string());
        let opt = |v: Option<usize>| v.map_or("auto".to_string(), |x| x.to_string());
        m.insert("randomprune.keep_1q", opt(self.keep_1q));
        m.insert("randomprune.keep_2q", opt(self.keep_2q));
        m.insert("sweep.depths", join(&self.depths));
        m.insert("methods", join(&self.methods));
        m.insert("gradvar.samples", self.samples.to_string());
        m.insert("gradvar.param_index", self.param_index.to_string());
        m.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        format!("{digest:x}")[..16].to_string()
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.hamiltonian.clone())
    }

    pub fn load_hamiltonian(&self) -> Result<Hamiltonian, ExperimentError> {
        let src = self.hamiltonian.trim();
        let h = if src.eq_ignore_ascii_case("h2") {
            parse_hamiltonian(H2_FIXTURE)?
        } else if let Some(rest) = src.strip_prefix("tfim:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(ExperimentError::Config(format!(
                    "expected tfim:<n>:<J>:<h>, got {src:?}"
                )));
            }
            tfim(
                parse_value("tfim n", parts[0])?,
                parse_value("tfim J", parts[1])?,
                parse_value("tfim h", parts[2])?,
            )?
        } else {
            let text = std::fs::read_to_string(src)
                .map_err(|e| ExperimentError::Config(format!("reading {src}: {e}")))?;
            parse_hamiltonian(&text)?
        };
        if let Some(n) = self.n_qubits {
            if n != h.n_qubits() {
                return Err(ExperimentError::Config(format!(
                    "n_qubits = {n} but the Hamiltonian acts on {} qubits",
                    h.n_qubits()
                )));
            }
        }
        Ok(h)
    }

    pub fn noise_model(&self) -> Result<Option<NoiseModel>, ExperimentError> {
        let nm = NoiseModel::new(self.p1q, self.p2q)?;
        Ok((!nm.is_noiseless()).then_some(nm))
    }

    pub fn optimizer(&self, seed: u64, epochs: usize) -> Result<OptimizerConfig, ExperimentError> {
        let noise = self.noise_model()?.map(|model| NoisyTraining {
            model,
            trajectories: self.trajectories,
        });
        let cfg = OptimizerConfig {
            learning_rate: self.learning_rate,
            epochs,
            seed,
            prune_threshold: self.prune_threshold,
            noise,
            ..OptimizerConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.seeds.is_empty() {
            return Err(ExperimentError::Config("no seeds given".into()));
        }
        if self.depth == 0 {
            return Err(ExperimentError::Config("depth must be at least 1".into()));
        }
        if !(self.steepness > 0.0) {
            return Err(ExperimentError::Config("antibp.k must be positive".into()));
        }
        if self.eval_trajectories == 0 || self.trajectories == 0 {
            return Err(ExperimentError::Config(
                "trajectory counts must be positive".into(),
            ));
        }
        if self.keep_1q.is_some() != self.keep_2q.is_some() {
            return Err(ExperimentError::Config(
                "randomprune.keep_1q and randomprune.keep_2q must be given together".into(),
            ));
        }
        self.noise_model()?;
        self.optimizer(0, 1)?;
        Ok(())
    }
}
