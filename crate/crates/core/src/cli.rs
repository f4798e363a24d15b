//! Command-line surface: batch parameter scans, fits and the self-test.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audit;
use crate::causal::Direction;
use crate::decoder::DecoderConfig;
use crate::experiment::output::{read_csv, write_csv, write_jsonl};
use crate::experiment::{
    find_crossing, fit_sustainable, run_trials, summarize, Curve, ExperimentError, PointResult,
    ProtocolConfig, Setup,
};
use crate::lattice::{write_text, Family};
use crate::noise::{Adjacency, NoiseKind, NoiseModel};
use crate::sweep::Variant;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Parse `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}' in '{s}'"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, st] = parts.as_slice() else {
            return Err(format!("range '{s}' must be start:stop:step"));
        };
        let (a, b, st) = (num(a)?, num(b)?, num(st)?);
        if !(st > 0.0) || b < a {
            return Err(format!("range '{s}' needs step > 0 and stop >= start"));
        }
        let n = ((b - a) / st + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| a + i as f64 * st).map(|x| (x * 1e12).round() / 1e12).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

#[derive(Debug, Parser)]
#[command(name = "sweep", version, about = "Sweep-rule decoder simulations for 3D toric codes")]
pub struct Cli {
    /// rhombic-periodic, rhombic-open, cubic-periodic or cubic-open
    #[arg(long, default_value = "rhombic-periodic")]
    pub lattice: Family,
    /// Lattice sizes, comma separated
    #[arg(short = 'L', long = "sizes", value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Qubit error rates: start:stop:step or a comma list
    #[arg(short = 'p', long = "p")]
    pub p: Option<String>,
    /// Measurement error rate as a multiple of p
    #[arg(long, conflicts_with = "q")]
    pub alpha: Option<f64>,
    /// Fixed measurement error rate
    #[arg(short = 'q', long = "q")]
    pub q: Option<f64>,
    #[arg(long, default_value = "iid")]
    pub noise: NoiseKind,
    /// Neighbour relation for correlated noise
    #[arg(long, default_value = "edge-sharing")]
    pub adjacency: Adjacency,
    /// Numbers of noisy cycles, comma separated
    #[arg(short = 'N', long = "cycles", value_delimiter = ',', default_value = "1")]
    pub cycles: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub sweeps_per_measurement: usize,
    /// Sweeps between direction changes while noisy [default: ceil(log2 L)]
    #[arg(long)]
    pub noisy_period: Option<usize>,
    /// Steps between direction changes in the final decode [default: L]
    #[arg(long)]
    pub perfect_period: Option<usize>,
    /// Steps per direction in the final decode [default: 2L]
    #[arg(long)]
    pub t_max: Option<usize>,
    /// Passes over all directions in the final decode
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, default_value = "regular")]
    pub variant: Variant,
    /// Direction order, e.g. +++,---,+--,-++,-+-,+-+,--+,++-
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<Direction>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Aggregate CSV path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trial JSON-lines path
    #[arg(long)]
    pub trials_out: Option<PathBuf>,
    /// Load the run from a JSON spec instead of flags
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Print the resolved JSON spec and exit
    #[arg(long)]
    pub dump_spec: bool,
    /// Fit the sustainable threshold to aggregate CSVs
    #[arg(long, num_args = 1.., value_name = "CSV")]
    pub fit_sustainable: Vec<PathBuf>,
    /// Run the property self-test
    #[arg(long)]
    pub selftest: bool,
    /// Write the lattice of the first size as text and exit
    #[arg(long, value_name = "PATH")]
    pub export_lattice: Option<PathBuf>,
    /// Per-step trace on stderr
    #[arg(long)]
    pub trace: bool,
}

/// A fully resolved batch run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub lattice: Family,
    pub sizes: Vec<usize>,
    pub ps: Vec<f64>,
    /// `q = alpha * p` unless `q` is set.
    pub alpha: f64,
    pub q: Option<f64>,
    pub noise: NoiseKind,
    pub adjacency: Adjacency,
    pub cycles: Vec<usize>,
    pub trials: usize,
    pub sweeps_per_measurement: usize,
    pub noisy_period: Option<usize>,
    pub perfect_period: Option<usize>,
    pub t_max: Option<usize>,
    pub repeats: usize,
    pub variant: Variant,
    pub order: Vec<Direction>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub trials_out: Option<PathBuf>,
}

impl RunSpec {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        if let Some(path) = &cli.spec {
            let spec: RunSpec = serde_json::from_reader(File::open(path)?)?;
            spec.validate()?;
            return Ok(spec);
        }
        let ps = match &cli.p {
            Some(s) => parse_grid(s).map_err(CliError::Config)?,
            None => return Err(CliError::Config("missing -p".into())),
        };
        let spec = RunSpec {
            lattice: cli.lattice,
            sizes: cli.sizes.clone(),
            ps,
            alpha: cli.alpha.unwrap_or(0.0),
            q: cli.q,
            noise: cli.noise,
            adjacency: cli.adjacency,
            cycles: cli.cycles.clone(),
            trials: cli.trials,
            sweeps_per_measurement: cli.sweeps_per_measurement,
            noisy_period: cli.noisy_period,
            perfect_period: cli.perfect_period,
            t_max: cli.t_max,
            repeats: cli.repeats,
            variant: cli.variant,
            order: cli.order.clone().unwrap_or_else(|| Direction::ALL.to_vec()),
            seed: cli.seed,
            out: cli.out.clone(),
            trials_out: cli.trials_out.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.sizes.is_empty() {
            return bad("-L needs at least one size".into());
        }
        if self.ps.is_empty() || self.cycles.is_empty() {
            return bad("-p and -N need at least one value".into());
        }
        if let Some(p) = self.ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("p = {p} is outside [0, 1]"));
        }
        if !(self.alpha >= 0.0) {
            return bad(format!("alpha = {} must be non-negative", self.alpha));
        }
        if let Some(q) = self.q.filter(|q| !(0.0..=1.0).contains(q)) {
            return bad(format!("q = {q} is outside [0, 1]"));
        }
        if self.cycles.contains(&0) || self.trials == 0 {
            return bad("N and --trials must be at least 1".into());
        }
        for &l in &self.sizes {
            self.decoder(l)
                .validate()
                .map_err(|e| CliError::Config(format!("L={l}: {e}")))?;
        }
        Ok(())
    }

    pub fn decoder(&self, l: usize) -> DecoderConfig {
        let mut d = DecoderConfig::for_size(l);
        d.order = self.order.clone();
        d.sweeps_per_measurement = self.sweeps_per_measurement;
        d.repeats = self.repeats;
        d.variant = self.variant;
        if let Some(v) = self.noisy_period {
            d.noisy_period = v;
        }
        if let Some(v) = self.perfect_period {
            d.perfect_period = v;
        }
        if let Some(v) = self.t_max {
            d.t_max = v;
        }
        d
    }

    pub fn noise(&self, p: f64) -> Result<NoiseModel, CliError> {
        let r = match self.q {
            Some(q) => NoiseModel::new(self.noise, p, q),
            None => NoiseModel::with_alpha(self.noise, p, self.alpha),
        };
        r.map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Crossing per N, and the sustainable fit when enough N values are present.
pub fn summaries(rows: &[PointResult]) -> Vec<String> {
    let mut out = Vec::new();
    let mut by_n: BTreeMap<usize, BTreeMap<usize, Vec<(f64, f64)>>> = BTreeMap::new();
    for r in rows {
        by_n.entry(r.cycles).or_default().entry(r.size).or_default().push((r.p, r.p_l));
    }
    let mut pts = Vec::new();
    for (n, by_l) in &by_n {
        if by_l.len() < 2 {
            continue;
        }
        let curves: Vec<Curve> = by_l
            .iter()
            .map(|(&size, points)| Curve {
                size,
                points: points.clone(),
            })
            .collect();
        match find_crossing(&curves) {
            Ok(c) => {
                out.push(format!("N={n} crossing p_th={:.5} spread={:.5}", c.p_th, c.spread));
                pts.push((*n as f64, c.p_th));
            }
            Err(e) => out.push(format!("N={n} crossing: {e}")),
        }
    }
    if pts.len() >= 4 {
        match fit_sustainable(&pts) {
            Ok(f) => out.push(format!(
                "fit p_sus={:.5} gamma={:.4} p_th(1)={:.5} accepted={}",
                f.p_sus, f.gamma, f.p_th1, f.accepted
            )),
            Err(e) => out.push(format!("fit: {e}")),
        }
    }
    out
}

/// Execute a batch run; returns the aggregate rows in (L, N, p) order.
pub fn run(spec: &RunSpec) -> Result<Vec<PointResult>, CliError> {
    spec.validate()?;
    let mut jsonl = match &spec.trials_out {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    };
    let mut rows = Vec::new();
    for &l in &spec.sizes {
        let setup = Setup::new(spec.lattice, l, spec.adjacency)?;
        for &n in &spec.cycles {
            for &p in &spec.ps {
                let cfg = ProtocolConfig {
                    noise: spec.noise(p)?,
                    cycles: n,
                    decoder: spec.decoder(l),
                    trials: spec.trials,
                    seed: spec.seed,
                };
                let trials = run_trials(&setup, &cfg)?;
                let row = summarize(&setup, &cfg, &trials);
                if let Some(w) = jsonl.as_mut() {
                    write_jsonl(&mut *w, &row, &trials)?;
                }
                rows.push(row);
            }
        }
    }
    if let Some(w) = jsonl.as_mut() {
        w.flush()?;
    }
    match &spec.out {
        Some(path) => write_csv(File::create(path)?, &rows)?,
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    Ok(rows)
}

/// Entry point behind `main`; returns the process exit code.
pub fn main_with(cli: Cli) -> Result<i32, CliError> {
    if cli.selftest {
        let checks = audit::selftest(cli.seed);
        let mut failed = 0;
        for c in &checks {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            failed += !c.passed as usize;
        }
        println!("{} checks, {failed} failed", checks.len());
        return Ok(if failed == 0 { 0 } else { 1 });
    }
    if let Some(path) = &cli.export_lattice {
        let l = *cli
            .sizes
            .first()
            .ok_or_else(|| CliError::Config("--export-lattice needs -L".into()))?;
        let lat = cli.lattice.build(l).map_err(|e| CliError::Config(e.to_string()))?;
        write_text(&lat, BufWriter::new(File::create(path)?))?;
        return Ok(0);
    }
    if !cli.fit_sustainable.is_empty() {
        let mut rows = Vec::new();
        for p in &cli.fit_sustainable {
            rows.extend(read_csv(File::open(p)?)?);
        }
        for line in summaries(&rows) {
            println!("{line}");
        }
        return Ok(0);
    }
    let spec = RunSpec::from_cli(&cli)?;
    if cli.dump_spec {
        println!("{}", serde_json::to_string_pretty(&spec)?);
        return Ok(0);
    }
    let rows = run(&spec)?;
    let lines = summaries(&rows);
    if spec.out.is_some() {
        lines.iter().for_each(|l| println!("{l}"));
    } else {
        lines.iter().for_each(|l| eprintln!("{l}"));
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("0.01,0.02").unwrap(), vec![0.01, 0.02]);
        assert!(parse_grid("0.3:0.1:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
        assert_eq!(parse_grid("0.18:0.24:0.005").unwrap().len(), 13);
    }

    #[test]
    fn spec_round_trip() {
        let cli = Cli::try_parse_from([
            "sweep", "--lattice", "rhombic-open", "-L", "6,8,10", "-p", "0.18:0.24:0.005", "--alpha", "1",
            "-N", "1", "--trials", "1000", "--seed", "7",
        ])
        .unwrap();
        let spec = RunSpec::from_cli(&cli).unwrap();
        assert_eq!(spec.sizes, vec![6, 8, 10]);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<RunSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn rejects_bad_values() {
        let cli = Cli::try_parse_from(["sweep", "-L", "4", "-p", "1.5"]).unwrap();
        assert!(matches!(RunSpec::from_cli(&cli), Err(CliError::Config(_))));
        let cli = Cli::try_parse_from(["sweep", "-p", "0.1"]).unwrap();
        assert!(RunSpec::from_cli(&cli).is_err());
        assert!(Cli::try_parse_from(["sweep", "--lattice", "hex", "-L", "4", "-p", "0.1"]).is_err());
    }
}
