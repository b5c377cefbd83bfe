//! Flat `key = value` run configuration with optional `[case]` sections.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::cases::{CaseSpec, RunOptions};
use crate::dgsolver::parallel::default_threads;
use crate::dgsolver::SlopeKind;
use crate::error::{Error, Result};
use crate::timeint::{CflRule, RkScheme, StepControl, DEFAULT_CFL, DEFAULT_SOURCE_CFL};

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: String,
    /// Polynomial degree k; the scheme is of order k + 1.
    pub order: Option<usize>,
    /// Runge-Kutta order override. Defaults to k + 1.
    pub rk_order: Option<usize>,
    pub cells: Option<usize>,
    pub cells_y: Option<usize>,
    pub cfl: f64,
    pub cfl_rule: CflRule,
    /// Bound on `omega * dt` for the Lorentz coupling; zero disables it.
    pub source_cfl: f64,
    pub t_final: Option<f64>,
    pub tvb: Option<f64>,
    pub slope_limiter: Option<bool>,
    pub slope_kind: Option<SlopeKind>,
    pub out: PathBuf,
    pub snapshots: usize,
    pub seed: u64,
    pub serial: bool,
    pub max_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: String::new(),
            order: None,
            rk_order: None,
            cells: None,
            cells_y: None,
            cfl: DEFAULT_CFL,
            cfl_rule: StepControl::default().rule,
            source_cfl: DEFAULT_SOURCE_CFL,
            t_final: None,
            tvb: None,
            slope_limiter: None,
            slope_kind: None,
            out: PathBuf::from("out"),
            snapshots: 10,
            seed: 2024,
            serial: false,
            max_steps: StepControl::default().max_steps,
        }
    }
}

/// Parse `key = value` lines. `[name]` opens a section; only the section
/// matching `case` (after the keys outside any section) is applied.
pub fn parse_config(text: &str, case: Option<&str>) -> Result<BTreeMap<String, String>> {
    let mut global = BTreeMap::new();
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        match &current {
            None => global.insert(k, v),
            Some(s) => sections.entry(s.clone()).or_default().insert(k, v),
        };
    }
    let case = case.map(str::to_string).or_else(|| global.get("case").cloned());
    if let Some(sec) = case.and_then(|c| sections.remove(&c)) {
        global.extend(sec);
    }
    Ok(global)
}

fn value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::config(format!("invalid value `{v}` for `{key}`")))
}

impl RunConfig {
    /// Overlay parsed key/value pairs. Unknown keys are rejected.
    pub fn apply(&mut self, kv: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in kv {
            match k.as_str() {
                "case" => self.case = v.clone(),
                "order" => self.order = Some(value(k, v)?),
                "rk_order" => self.rk_order = Some(value(k, v)?),
                "cells" => self.cells = Some(value(k, v)?),
                "cells_y" => self.cells_y = Some(value(k, v)?),
                "cfl" => self.cfl = value(k, v)?,
                "cfl_rule" => self.cfl_rule = CflRule::parse(v)?,
                "source_cfl" => self.source_cfl = value(k, v)?,
                "t_final" => self.t_final = Some(value(k, v)?),
                "tvb" => self.tvb = Some(value(k, v)?),
                "slope_limiter" => self.slope_limiter = Some(value(k, v)?),
                "slope_kind" => self.slope_kind = Some(SlopeKind::parse(v)?),
                "out" => self.out = PathBuf::from(v),
                "snapshots" => self.snapshots = value(k, v)?,
                "seed" => self.seed = value(k, v)?,
                "serial" => self.serial = value(k, v)?,
                "max_steps" => self.max_steps = value(k, v)?,
                _ => return Err(Error::config(format!("unknown configuration key `{k}`"))),
            }
        }
        Ok(())
    }

    pub fn load(path: &Path, case: Option<&str>) -> Result<BTreeMap<String, String>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        parse_config(&text, case)
    }

    /// Validate against the case and build solver options.
    pub fn resolve(&self) -> Result<(CaseSpec, RunOptions)> {
        let case = CaseSpec::by_name(&self.case)?;
        let mut opts = case.default_options();
        if let Some(k) = self.order {
            if !(1..=3).contains(&k) {
                return Err(Error::config(format!("order (polynomial degree) must be 1, 2 or 3, got {k}")));
            }
            opts.k = k;
        }
        opts.scheme = RkScheme::for_degree(opts.k)?;
        if let Some(r) = self.rk_order {
            let scheme = RkScheme::from_order(r)?;
            if scheme != opts.scheme {
                log::warn!("RK order {r} overrides the paired order {} for k={}", opts.scheme.order(), opts.k);
            }
            opts.scheme = scheme;
        }
        for (name, n) in [("cells", self.cells), ("cells_y", self.cells_y)] {
            if n == Some(0) {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        if let Some(n) = self.cells {
            opts.cells = n;
        }
        if case.y.is_some() {
            opts.cells_y = self.cells_y.or(opts.cells_y);
        } else if self.cells_y.is_some() {
            return Err(Error::config(format!("case {} is one-dimensional; cells_y is not allowed", case.name)));
        }
        opts.control = StepControl {
            cfl: self.cfl,
            t_final: self.t_final.unwrap_or(case.t_final),
            max_steps: self.max_steps,
            rule: self.cfl_rule,
            source_cfl: self.source_cfl,
        };
        opts.control.validate()?;
        if opts.control.t_final < case.t0 {
            return Err(Error::config(format!("t_final {} precedes the start time {}", opts.control.t_final, case.t0)));
        }
        if let Some(m) = self.tvb {
            if !(m >= 0.0) {
                return Err(Error::config("tvb must be nonnegative"));
            }
            opts.limiter.tvb_m = m;
        }
        if let Some(s) = self.slope_limiter {
            opts.limiter.slope = s;
        }
        if let Some(kind) = self.slope_kind {
            opts.limiter.kind = kind;
        }
        opts.threads = if self.serial { 1 } else { default_threads() };
        Ok((case, opts))
    }

    /// Key/value lines that reproduce this configuration when loaded.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("case", self.case.clone());
        if let Some(v) = self.order {
            kv("order", v.to_string());
        }
        if let Some(v) = self.rk_order {
            kv("rk_order", v.to_string());
        }
        if let Some(v) = self.cells {
            kv("cells", v.to_string());
        }
        if let Some(v) = self.cells_y {
            kv("cells_y", v.to_string());
        }
        kv("cfl", format!("{:e}", self.cfl));
        kv("cfl_rule", self.cfl_rule.name().to_string());
        kv("source_cfl", format!("{:e}", self.source_cfl));
        if let Some(v) = self.t_final {
            kv("t_final", format!("{v:e}"));
        }
        if let Some(v) = self.tvb {
            kv("tvb", format!("{v:e}"));
        }
        if let Some(v) = self.slope_limiter {
            kv("slope_limiter", v.to_string());
        }
        if let Some(v) = self.slope_kind {
            kv("slope_kind", v.name().to_string());
        }
        kv("out", self.out.display().to_string());
        kv("snapshots", self.snapshots.to_string());
        kv("seed", self.seed.to_string());
        kv("serial", self.serial.to_string());
        kv("max_steps", self.max_steps.to_string());
        s
    }
}
