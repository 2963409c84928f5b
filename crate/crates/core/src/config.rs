//! Flat `key=value` run configuration.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::horoball::HoroParams;
use crate::teich::TeichParams;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub base_b: u32,
    pub epsilon0: f64,
    pub k_threshold: u64,
    pub formula_k: u64,
    pub bfs_cap: u32,
    pub d_cap_slack: u32,
    pub seed: u64,
    pub metric_scale: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            base_b: 2,
            epsilon0: 0.25,
            k_threshold: 12,
            formula_k: 2,
            bfs_cap: 14,
            d_cap_slack: 4,
            seed: 1,
            metric_scale: 0.5,
        }
    }
}

impl Config {
    pub const KEYS: [&'static str; 8] = [
        "base_b",
        "epsilon0",
        "K_threshold",
        "formula_k",
        "bfs_cap",
        "d_cap_slack",
        "seed",
        "metric_scale",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: String| Error::InvalidConfig(format!("{key}={value}: {e}"));
        match key {
            "base_b" => self.base_b = value.parse().map_err(|e| bad(format!("{e}")))?,
            "epsilon0" => self.epsilon0 = value.parse().map_err(|e| bad(format!("{e}")))?,
            "K_threshold" | "k_threshold" => self.k_threshold = value.parse().map_err(|e| bad(format!("{e}")))?,
            "formula_k" => self.formula_k = value.parse().map_err(|e| bad(format!("{e}")))?,
            "bfs_cap" => self.bfs_cap = value.parse().map_err(|e| bad(format!("{e}")))?,
            "d_cap_slack" => self.d_cap_slack = value.parse().map_err(|e| bad(format!("{e}")))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(format!("{e}")))?,
            "metric_scale" => self.metric_scale = value.parse().map_err(|e| bad(format!("{e}")))?,
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut c = Config::default();
        c.apply_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        HoroParams::new(self.base_b)?;
        TeichParams::new(self.epsilon0, self.metric_scale)?;
        if self.k_threshold == 0 || self.formula_k == 0 || self.bfs_cap == 0 || self.seed == 0 {
            return Err(Error::InvalidConfig("K_threshold, formula_k, bfs_cap and seed must be positive".into()));
        }
        Ok(())
    }

    pub fn horo(&self) -> HoroParams {
        HoroParams { base_b: self.base_b }
    }

    pub fn teich(&self) -> TeichParams {
        TeichParams {
            epsilon0: self.epsilon0,
            metric_scale: self.metric_scale,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.pairs() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// The configuration as comment lines with the given prefix.
    pub fn header(&self, prefix: &str) -> String {
        self.to_text().lines().map(|l| format!("{prefix} {l}\n")).collect()
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("base_b", self.base_b.to_string()),
            ("epsilon0", crate::format::float(self.epsilon0)),
            ("K_threshold", self.k_threshold.to_string()),
            ("formula_k", self.formula_k.to_string()),
            ("bfs_cap", self.bfs_cap.to_string()),
            ("d_cap_slack", self.d_cap_slack.to_string()),
            ("seed", self.seed.to_string()),
            ("metric_scale", crate::format::float(self.metric_scale)),
        ]
    }
}
