//! Run configuration: a flat key-value file plus command-line overrides.
//! Only the output directory may come from the environment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use symsum::{Limits, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub j: u32,
    pub x: u64,
    /// Bound for the exact verification sweeps.
    pub n_exact: u64,
    pub prime_cutoff: u64,
    /// Empty means the dyadic default (powers of two plus the final x).
    pub checkpoints: Vec<u64>,
    /// 0 means one worker per available core.
    pub threads: usize,
    pub output_dir: PathBuf,
    pub tolerance_overrides: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            j: 2,
            x: 1_000_000,
            n_exact: 10_000,
            prime_cutoff: 10_000,
            checkpoints: Vec::new(),
            threads: 0,
            output_dir: PathBuf::from("out"),
            tolerance_overrides: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    /// Flat `key = value` rendering; `parse` inverts it exactly.
    pub fn print(&self) -> String {
        let mut s = String::new();
        if !self.checkpoints.is_empty() {
            let list: Vec<String> = self.checkpoints.iter().map(u64::to_string).collect();
            writeln!(s, "checkpoints = {}", list.join(",")).unwrap();
        }
        writeln!(s, "j = {}", self.j).unwrap();
        writeln!(s, "n_exact = {}", self.n_exact).unwrap();
        writeln!(s, "output_dir = {}", self.output_dir.display()).unwrap();
        writeln!(s, "prime_cutoff = {}", self.prime_cutoff).unwrap();
        writeln!(s, "threads = {}", self.threads).unwrap();
        for (k, v) in &self.tolerance_overrides {
            writeln!(s, "tolerance.{k} = {v:e}").unwrap();
        }
        writeln!(s, "x = {}", self.x).unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| format!("line {}: bad {what}: {value}", lineno + 1);
            match key {
                "j" => cfg.j = value.parse().map_err(|_| bad("integer"))?,
                "x" => cfg.x = value.parse().map_err(|_| bad("integer"))?,
                "n_exact" => cfg.n_exact = value.parse().map_err(|_| bad("integer"))?,
                "prime_cutoff" => cfg.prime_cutoff = value.parse().map_err(|_| bad("integer"))?,
                "threads" => cfg.threads = value.parse().map_err(|_| bad("integer"))?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "checkpoints" => {
                    cfg.checkpoints = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| s.trim().parse().map_err(|_| bad("checkpoint list")))
                        .collect::<Result<_, _>>()?;
                }
                _ => {
                    if let Some(name) = key.strip_prefix("tolerance.") {
                        let v: f64 = value.parse().map_err(|_| bad("float"))?;
                        let mut probe = Tolerances::default();
                        if !probe.set_by_name(name, v) {
                            return Err(format!(
                                "line {}: unknown tolerance `{name}`",
                                lineno + 1
                            ));
                        }
                        cfg.tolerance_overrides.insert(name.to_string(), v);
                    } else {
                        return Err(format!("line {}: unknown key `{key}`", lineno + 1));
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_exact > self.x {
            return Err(format!(
                "n_exact = {} must not exceed x = {}",
                self.n_exact, self.x
            ));
        }
        let limits = Limits::default();
        if self.x > limits.qexpansion_max || self.x > limits.weight_sieve_max {
            return Err(format!(
                "x = {} exceeds the documented cap {}",
                self.x,
                limits.qexpansion_max.min(limits.weight_sieve_max)
            ));
        }
        Ok(())
    }

    /// Tolerances with the configured overrides applied.
    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        for (k, v) in &self.tolerance_overrides {
            t.set_by_name(k, *v);
        }
        t
    }

    /// Worker count, resolving 0 to the machine's parallelism.
    pub fn resolved_threads(&self) -> usize {
        if self.threads > 0 {
            self.threads
        } else {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_default() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::parse(&cfg.print()).unwrap(), cfg);
    }

    #[test]
    fn round_trip_full() {
        let mut cfg = RunConfig {
            j: 3,
            x: 50_000,
            n_exact: 4_000,
            prime_cutoff: 2_000,
            checkpoints: vec![16, 256, 50_000],
            threads: 4,
            output_dir: PathBuf::from("/tmp/runs"),
            tolerance_overrides: BTreeMap::new(),
        };
        cfg.tolerance_overrides
            .insert("factorization_rel".into(), 5e-9);
        assert_eq!(RunConfig::parse(&cfg.print()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_invariants() {
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("tolerance.nope = 1e-3").is_err());
        assert!(RunConfig::parse("x = 100\nn_exact = 200").is_err());
        assert!(RunConfig::parse("x = 99000000").is_err());
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = RunConfig::parse("# comment\n\nj = 4\n").unwrap();
        assert_eq!(cfg.j, 4);
    }

    #[test]
    fn overrides_apply() {
        let cfg = RunConfig::parse("tolerance.lambda_rel = 1e-7").unwrap();
        assert_eq!(cfg.tolerances().lambda_rel, 1e-7);
    }
}
