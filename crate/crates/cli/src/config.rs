//! Run configuration: defaults, key=value config files, flag overrides.

use recordlab_core::boundaries::{Epoch, OmegaRule};
use std::path::PathBuf;

#[derive(Clone, Debug, PartialEq)]
pub enum AGrid {
    /// Resolve {-a_n, 0, +a_n} per epoch.
    Auto,
    List(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub d: usize,
    pub n_grid: Vec<Epoch>,
    pub a_grid: AGrid,
    pub trials: u64,
    pub seed: u64,
    pub omega: OmegaRule,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub raw: bool,
    /// Point budget per command: effective trials at epoch n are capped at
    /// budget / n so no single command outgrows desk scale.
    pub point_budget: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            d: 2,
            n_grid: vec![Epoch::N(10_000)],
            a_grid: AGrid::Auto,
            trials: 10_000,
            seed: 727,
            omega: OmegaRule::default(),
            workers: std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1),
            out_dir: PathBuf::from("out"),
            raw: false,
            point_budget: 10_000_000_000,
        }
    }
}

impl SimConfig {
    /// Requested trials capped by the per-command point budget.
    pub fn effective_trials(&self, n: Epoch) -> u64 {
        match n.sim_n() {
            Some(nn) if nn > 0 => self.trials.min((self.point_budget / nn).max(1)),
            _ => self.trials,
        }
    }
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn parse_epoch(tok: &str) -> Result<Epoch, UsageError> {
    let t = tok.trim();
    if let Ok(n) = t.parse::<u64>() {
        return Ok(Epoch::N(n));
    }
    let lower = t.to_ascii_lowercase();
    if let Some(exp) = lower.strip_prefix("1e") {
        if let Ok(k) = exp.parse::<u32>() {
            return if k <= 19 { Ok(Epoch::N(10u64.pow(k))) } else { Ok(Epoch::PowTen(k)) };
        }
    }
    Err(UsageError(format!("cannot parse epoch '{tok}' (use an integer or 1eK)")))
}

fn parse_omega(tok: &str) -> Result<OmegaRule, UsageError> {
    let t = tok.trim().to_ascii_lowercase();
    if t == "calibrated" || t == "default" {
        return Ok(OmegaRule::Calibrated);
    }
    if t == "sqrt3" {
        return Ok(OmegaRule::SqrtL3);
    }
    if t == "dimexp" {
        return Ok(OmegaRule::DimExpSqrtL3);
    }
    if let Some(c) = t.strip_prefix("l4:") {
        return c
            .parse::<f64>()
            .map(OmegaRule::ScaledL4)
            .map_err(|_| UsageError(format!("bad omega scale '{tok}'")));
    }
    if let Some(w) = t.strip_prefix("fixed:") {
        return w
            .parse::<f64>()
            .map(OmegaRule::Fixed)
            .map_err(|_| UsageError(format!("bad omega value '{tok}'")));
    }
    Err(UsageError(format!(
        "unknown omega rule '{tok}' (calibrated | sqrt3 | dimexp | l4:C | fixed:W)"
    )))
}

fn apply_kv(cfg: &mut SimConfig, key: &str, value: &str) -> Result<(), UsageError> {
    let bad = |what: &str| UsageError(format!("cannot parse {what} '{value}'"));
    match key {
        "d" => cfg.d = value.parse().map_err(|_| bad("d"))?,
        "n" => {
            cfg.n_grid = value.split(',').map(parse_epoch).collect::<Result<_, _>>()?;
            if cfg.n_grid.is_empty() {
                return Err(UsageError("empty n grid".into()));
            }
        }
        "a" => {
            cfg.a_grid = if value.eq_ignore_ascii_case("auto") {
                AGrid::Auto
            } else {
                AGrid::List(
                    value
                        .split(',')
                        .map(|s| s.trim().parse::<f64>().map_err(|_| bad("a")))
                        .collect::<Result<_, _>>()?,
                )
            }
        }
        "trials" => cfg.trials = value.parse().map_err(|_| bad("trials"))?,
        "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
        "omega" => cfg.omega = parse_omega(value)?,
        "workers" => cfg.workers = value.parse().map_err(|_| bad("workers"))?,
        "out" => cfg.out_dir = PathBuf::from(value),
        "budget" => cfg.point_budget = value.parse().map_err(|_| bad("budget"))?,
        "raw" => cfg.raw = value.parse().map_err(|_| bad("raw"))?,
        other => return Err(UsageError(format!("unknown key '{other}'"))),
    }
    Ok(())
}

fn load_config_file(cfg: &mut SimConfig, path: &str) -> Result<(), UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config '{path}': {e}")))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("{path}:{}: expected key=value", lineno + 1)))?;
        apply_kv(cfg, key.trim(), value.trim())?;
    }
    Ok(())
}

/// Parse `<subcommand> [flags]`. The config file (if any) loads first, then
/// flags override it, and RECORDLAB_SEED overrides the seed last.
pub fn parse_args(args: &[String]) -> Result<(String, SimConfig), UsageError> {
    let sub = args
        .first()
        .ok_or_else(|| UsageError("missing subcommand".into()))?
        .clone();
    let mut cfg = SimConfig::default();
    // first pass: config file
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            let path = args
                .get(i + 1)
                .ok_or_else(|| UsageError("--config needs a path".into()))?;
            load_config_file(&mut cfg, path)?;
        }
        i += 1;
    }
    // second pass: flag overrides
    let mut i = 1;
    while i < args.len() {
        let flag = &args[i];
        if flag == "--raw" {
            cfg.raw = true;
            i += 1;
            continue;
        }
        if flag == "--config" {
            i += 2;
            continue;
        }
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| UsageError(format!("unexpected argument '{flag}'")))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| UsageError(format!("flag '{flag}' needs a value")))?;
        apply_kv(&mut cfg, key, value)?;
        i += 2;
    }
    if let Ok(seed) = std::env::var("RECORDLAB_SEED") {
        cfg.seed = seed
            .parse()
            .map_err(|_| UsageError(format!("RECORDLAB_SEED '{seed}' is not a u64")))?;
    }
    if cfg.trials == 0 {
        return Err(UsageError("trials must be at least 1".into()));
    }
    if cfg.d < 2 {
        return Err(UsageError("d must be at least 2".into()));
    }
    Ok((sub, cfg))
}
