//! Experiment configuration: one flat key/value namespace shared by all
//! subcommands, resolved from defaults, then an optional config file, then
//! command-line flags. Every artifact embeds the resolved values, so a run
//! can be reproduced from its own header.

use std::path::PathBuf;

use crate::failure::{CliResult, Failure};

/// PES method selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hf,
    Vqe,
    IqpeOverVqe,
    Fci,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Hf, Method::Vqe, Method::IqpeOverVqe, Method::Fci];

    pub fn key(self) -> &'static str {
        match self {
            Method::Hf => "hf",
            Method::Vqe => "vqe",
            Method::IqpeOverVqe => "iqpe-over-vqe",
            Method::Fci => "fci",
        }
    }

    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "hf" => Ok(Method::Hf),
            "vqe" => Ok(Method::Vqe),
            "iqpe-over-vqe" => Ok(Method::IqpeOverVqe),
            "fci" => Ok(Method::Fci),
            other => Err(Failure::Config(format!(
                "unknown method '{other}' (valid: hf, vqe, iqpe-over-vqe, fci)"
            ))),
        }
    }
}

/// VQE initial-guess flavors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessKind {
    Zero,
    Mp2,
}

impl GuessKind {
    pub fn key(self) -> &'static str {
        match self {
            GuessKind::Zero => "zero",
            GuessKind::Mp2 => "mp2",
        }
    }

    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "zero" => Ok(GuessKind::Zero),
            "mp2" => Ok(GuessKind::Mp2),
            other => Err(Failure::Config(format!(
                "unknown guess '{other}' (valid: zero, mp2)"
            ))),
        }
    }
}

/// Shot-statistics state preparations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepKind {
    Hf,
    UccdFull,
    UccdMin,
}

impl PrepKind {
    pub fn key(self) -> &'static str {
        match self {
            PrepKind::Hf => "hf",
            PrepKind::UccdFull => "uccd-full",
            PrepKind::UccdMin => "uccd-min",
        }
    }

    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "hf" => Ok(PrepKind::Hf),
            "uccd-full" => Ok(PrepKind::UccdFull),
            "uccd-min" => Ok(PrepKind::UccdMin),
            other => Err(Failure::Config(format!(
                "unknown preparation '{other}' (valid: hf, uccd-full, uccd-min)"
            ))),
        }
    }
}

const VALID_KEYS: &str = "radius, beta, beta_start, beta_end, beta_step, betas, methods, \
guesses, checkpoints, preps, shots, repetitions, bits, min_bits, max_bits, vqe_budget, \
vqe_guess, uccd_full_evals, uccd_min_evals, seed, threads, out";

/// The flat, fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub radius: f64,
    pub beta: f64,
    pub beta_start: f64,
    pub beta_end: f64,
    pub beta_step: f64,
    pub betas: Vec<f64>,
    pub methods: Vec<Method>,
    pub guesses: Vec<GuessKind>,
    pub checkpoints: Vec<usize>,
    pub preps: Vec<PrepKind>,
    pub shots: Vec<usize>,
    pub repetitions: usize,
    /// IQPE bit count; `None` resolves per command (16 for PES readout,
    /// 14 for shot statistics).
    pub bits: Option<usize>,
    pub min_bits: usize,
    pub max_bits: usize,
    pub vqe_budget: usize,
    pub vqe_guess: GuessKind,
    pub uccd_full_evals: usize,
    pub uccd_min_evals: usize,
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            radius: 1.738,
            beta: 89.8,
            beta_start: 80.0,
            beta_end: 100.0,
            beta_step: 1.0,
            betas: vec![80.0, 85.0, 89.8],
            methods: Method::ALL.to_vec(),
            guesses: vec![GuessKind::Zero, GuessKind::Mp2],
            checkpoints: vec![0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 3000],
            preps: vec![PrepKind::Hf, PrepKind::UccdFull, PrepKind::UccdMin],
            shots: vec![25, 50, 100, 10_000],
            repetitions: 40,
            bits: None,
            min_bits: 4,
            max_bits: 16,
            vqe_budget: 1000,
            vqe_guess: GuessKind::Mp2,
            uccd_full_evals: 200,
            uccd_min_evals: 24,
            seed: 0,
            threads: 0,
            out: PathBuf::from("artifacts"),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Failure::Config(format!("key '{key}': '{v}' is not a finite number")))
}

fn parse_usize(key: &str, v: &str) -> CliResult<usize> {
    v.parse::<usize>()
        .map_err(|_| Failure::Config(format!("key '{key}': '{v}' is not a non-negative integer")))
}

fn parse_u64(key: &str, v: &str) -> CliResult<u64> {
    v.parse::<u64>()
        .map_err(|_| Failure::Config(format!("key '{key}': '{v}' is not a non-negative integer")))
}

fn split_list<'a>(key: &str, v: &'a str) -> CliResult<Vec<&'a str>> {
    let items: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Failure::Config(format!("key '{key}': empty list")));
    }
    Ok(items)
}

impl ExperimentConfig {
    /// Applies a single `key = value` assignment.
    pub fn apply_key(&mut self, key: &str, value: &str) -> CliResult<()> {
        let v = value.trim();
        match key {
            "radius" => {
                self.radius = parse_f64(key, v)?;
                if self.radius <= 0.0 {
                    return Err(Failure::Config("radius must be positive".into()));
                }
            }
            "beta" => self.beta = parse_f64(key, v)?,
            "beta_start" => self.beta_start = parse_f64(key, v)?,
            "beta_end" => self.beta_end = parse_f64(key, v)?,
            "beta_step" => {
                self.beta_step = parse_f64(key, v)?;
                if self.beta_step <= 0.0 {
                    return Err(Failure::Config("beta_step must be positive".into()));
                }
            }
            "betas" => {
                self.betas = split_list(key, v)?
                    .iter()
                    .map(|s| parse_f64(key, s))
                    .collect::<CliResult<_>>()?;
            }
            "methods" => {
                self.methods = split_list(key, v)?
                    .iter()
                    .map(|s| Method::parse(s))
                    .collect::<CliResult<_>>()?;
            }
            "guesses" => {
                self.guesses = split_list(key, v)?
                    .iter()
                    .map(|s| GuessKind::parse(s))
                    .collect::<CliResult<_>>()?;
            }
            "checkpoints" => {
                self.checkpoints = split_list(key, v)?
                    .iter()
                    .map(|s| parse_usize(key, s))
                    .collect::<CliResult<_>>()?;
            }
            "preps" => {
                self.preps = split_list(key, v)?
                    .iter()
                    .map(|s| PrepKind::parse(s))
                    .collect::<CliResult<_>>()?;
            }
            "shots" => {
                self.shots = split_list(key, v)?
                    .iter()
                    .map(|s| parse_usize(key, s))
                    .collect::<CliResult<_>>()?;
                if self.shots.iter().any(|&s| s == 0) {
                    return Err(Failure::Config("shots must be at least 1".into()));
                }
            }
            "repetitions" => {
                self.repetitions = parse_usize(key, v)?;
                if self.repetitions == 0 {
                    return Err(Failure::Config("repetitions must be at least 1".into()));
                }
            }
            "bits" => {
                let bits = parse_usize(key, v)?;
                if bits == 0 || bits > h4sim::iqpe::MAX_BITS {
                    return Err(Failure::Config(format!(
                        "bits must be in 1..={}",
                        h4sim::iqpe::MAX_BITS
                    )));
                }
                self.bits = Some(bits);
            }
            "min_bits" => self.min_bits = parse_usize(key, v)?,
            "max_bits" => self.max_bits = parse_usize(key, v)?,
            "vqe_budget" => self.vqe_budget = parse_usize(key, v)?,
            "vqe_guess" => self.vqe_guess = GuessKind::parse(v)?,
            "uccd_full_evals" => self.uccd_full_evals = parse_usize(key, v)?,
            "uccd_min_evals" => self.uccd_min_evals = parse_usize(key, v)?,
            "seed" => self.seed = parse_u64(key, v)?,
            "threads" => self.threads = parse_usize(key, v)?,
            "out" => self.out = PathBuf::from(v),
            other => {
                return Err(Failure::Config(format!(
                    "unknown config key '{other}' (valid keys: {VALID_KEYS})"
                )))
            }
        }
        Ok(())
    }

    /// Applies a flat `key = value` config file; `#` starts a comment.
    /// Returns the keys that were set.
    pub fn apply_file(&mut self, text: &str, origin: &str) -> CliResult<Vec<String>> {
        let mut keys = Vec::new();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::Config(format!("{origin}:{}: expected 'key = value'", number + 1))
            })?;
            let key = key.trim();
            self.apply_key(key, value)
                .map_err(|e| match e {
                    Failure::Config(msg) => {
                        Failure::Config(format!("{origin}:{}: {msg}", number + 1))
                    }
                    other => other,
                })?;
            keys.push(key.to_string());
        }
        Ok(keys)
    }

    /// Resolved IQPE bit count, falling back to the per-command default.
    pub fn bits_for(&self, command_default: usize) -> usize {
        self.bits.unwrap_or(command_default)
    }

    /// The full resolved configuration as `(key, value)` pairs, with `bits`
    /// already resolved for the calling command. This is what artifacts
    /// embed.
    pub fn entries(&self, bits: usize) -> Vec<(&'static str, String)> {
        fn join<T: ToString>(items: &[T]) -> String {
            items
                .iter()
                .map(T::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
        vec![
            ("radius", self.radius.to_string()),
            ("beta", self.beta.to_string()),
            ("beta_start", self.beta_start.to_string()),
            ("beta_end", self.beta_end.to_string()),
            ("beta_step", self.beta_step.to_string()),
            ("betas", join(&self.betas)),
            (
                "methods",
                self.methods
                    .iter()
                    .map(|m| m.key())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "guesses",
                self.guesses
                    .iter()
                    .map(|g| g.key())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("checkpoints", join(&self.checkpoints)),
            (
                "preps",
                self.preps.iter().map(|p| p.key()).collect::<Vec<_>>().join(","),
            ),
            ("shots", join(&self.shots)),
            ("repetitions", self.repetitions.to_string()),
            ("bits", bits.to_string()),
            ("min_bits", self.min_bits.to_string()),
            ("max_bits", self.max_bits.to_string()),
            ("vqe_budget", self.vqe_budget.to_string()),
            ("vqe_guess", self.vqe_guess.key().to_string()),
            ("uccd_full_evals", self.uccd_full_evals.to_string()),
            ("uccd_min_evals", self.uccd_min_evals.to_string()),
            ("seed", self.seed.to_string()),
            ("threads", self.threads.to_string()),
            ("out", self.out.display().to_string()),
        ]
    }
}
