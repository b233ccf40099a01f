//! `key = value` configuration with optional `[section]` headers.
//!
//! Keys are unique across sections, so a key may also appear before any
//! header. `#` starts a comment. `mode` may repeat; the first `mode` line
//! replaces the default perturbation.

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler2d::{Envelope, FanData, Flux, Integrator, Mode, ModeKind, PerturbationSpec, Reconstruction, SolverConfig};
use crate::gas::PolytropicGas;
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Spacing of the analysis times after `delta`.
    pub step: f64,
    /// Offset of the neighbouring snapshots used for time derivatives, in
    /// units of `dx1`, so the time stencil refines with the grid.
    pub lag_cells: f64,
    /// Lower edge of the analysed band in `u`.
    pub u_lo: f64,
    /// Extra width of the band above `u*`.
    pub band_pad: f64,
    /// Number of energy levels in `(u_lo, u*]`.
    pub levels: usize,
    pub max_order: usize,
    pub predicate_cap: f64,
    pub predicate_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub gamma: f64,
    pub k0: f64,
    pub c0: f64,
    pub v0: f64,
    pub n1: usize,
    pub n2: usize,
    pub x1_min: f64,
    pub x1_max: f64,
    pub delta: f64,
    pub t_star: f64,
    pub u_star: f64,
    pub u_left: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub random_phases: bool,
    pub modes: Vec<Mode>,
    pub envelope: Envelope,
    pub solver: SolverConfig,
    pub analysis: AnalysisConfig,
    pub output: Option<PathBuf>,
    pub write_snapshots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            k0: 0.5,
            c0: 1.0,
            v0: 0.0,
            n1: 1024,
            n2: 128,
            x1_min: -2.0,
            x1_max: 3.2,
            delta: 0.05,
            t_star: 1.0,
            u_star: 1.5,
            u_left: 2.25,
            epsilon: 0.01,
            seed: 1,
            random_phases: false,
            modes: vec![
                Mode { kind: ModeKind::Front, k1: 0.0, k2: 1, amplitude: 1.0, phase: 0.0 },
                Mode { kind: ModeKind::Potential, k1: 0.0, k2: 2, amplitude: 0.5, phase: 0.0 },
            ],
            envelope: Envelope { lo: -0.5, hi: 2.0, ramp: 0.5 },
            solver: SolverConfig { reconstruction: Reconstruction::Muscl, ..SolverConfig::default() },
            analysis: AnalysisConfig {
                step: 0.05,
                lag_cells: 0.5,
                u_lo: 0.5,
                band_pad: 0.25,
                levels: 6,
                max_order: 2,
                predicate_cap: 20.0,
                predicate_floor: 0.1,
            },
            output: None,
            write_snapshots: false,
        }
    }
}

impl RunConfig {
    pub fn gas(&self) -> Result<PolytropicGas> {
        PolytropicGas::new(self.gamma, self.k0)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n1, self.n2, self.x1_min, self.x1_max)
    }

    pub fn fan(&self) -> FanData {
        FanData { v0: self.v0, c0: self.c0, u_left: self.u_left }
    }

    /// The perturbation with phases drawn from `seed` when requested.
    pub fn perturbation(&self) -> PerturbationSpec {
        let mut modes = self.modes.clone();
        if self.random_phases {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for m in &mut modes {
                m.phase = rng.gen_range(0.0..std::f64::consts::TAU);
            }
        }
        PerturbationSpec { epsilon: self.epsilon, modes, envelope: self.envelope }
    }

    /// Energy levels, evenly spaced in `(u_lo, u*]`.
    pub fn levels(&self) -> Vec<f64> {
        let (lo, n) = (self.analysis.u_lo, self.analysis.levels);
        (1..=n).map(|k| lo + (self.u_star - lo) * k as f64 / n as f64).collect()
    }

    /// Time offset of the window snapshots.
    pub fn lag(&self) -> f64 {
        self.analysis.lag_cells * (self.x1_max - self.x1_min) / self.n1 as f64
    }

    /// `delta`, then the multiples of `step` beyond it, then `t*`.
    pub fn analysis_times(&self) -> Vec<f64> {
        let a = &self.analysis;
        let lag = self.lag();
        let mut t = vec![self.delta];
        let mut k = 1usize;
        loop {
            let s = k as f64 * a.step;
            k += 1;
            if s >= self.t_star - 1e-12 {
                break;
            }
            if s > self.delta + 2.0 * lag + 1e-12 {
                t.push(s);
            }
        }
        if self.t_star > t[t.len() - 1] + 2.0 * lag {
            t.push(self.t_star);
        }
        t
    }

    /// Snapshot times of the window at `t` and the index of `t` in it.
    /// Windows look forward at `delta` and backward at `t*`.
    pub fn window_times(&self, t: f64) -> ([f64; 3], usize) {
        let h = self.lag();
        if t <= self.delta + 1e-12 {
            ([t, t + h, t + 2.0 * h], 0)
        } else if t >= self.t_star - 1e-12 {
            ([t - 2.0 * h, t - h, t], 2)
        } else {
            ([t - h, t, t + h], 1)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.check(&HashMap::new())
    }

    fn check(&self, lines: &HashMap<&'static str, usize>) -> Result<()> {
        let fail = |key: &'static str, msg: String| match lines.get(key) {
            Some(&line) => Error::ConfigLine { line, msg },
            None => Error::Config(msg),
        };
        if !(self.gamma > 1.0 && self.gamma < 3.0) {
            return Err(fail("gamma", format!("gamma = {} must lie in (1, 3)", self.gamma)));
        }
        if !(self.k0 > 0.0) {
            return Err(fail("k0", format!("k0 = {} must be positive", self.k0)));
        }
        if !(self.c0 > 0.0) {
            return Err(fail("c0", format!("c0 = {} must be positive", self.c0)));
        }
        if !(self.v0 + self.c0 > 0.0) {
            return Err(fail("v0", "v0 + c0 must be positive so the fan head moves right".into()));
        }
        let grid = self.grid().map_err(|e| fail("n1", e.to_string()))?;
        if !(self.delta > 0.0) {
            return Err(fail("delta", format!("delta = {} must be positive", self.delta)));
        }
        let min_delta = 4.0 * grid.dx1() / (self.v0 + self.c0);
        if self.delta < min_delta {
            return Err(fail("delta", format!("delta = {} under-resolves the fan; need at least {min_delta}", self.delta)));
        }
        if !(self.t_star > self.delta && self.t_star <= 1.0) {
            return Err(fail("t_star", format!("t_star = {} must lie in (delta, 1]", self.t_star)));
        }
        let gas = self.gas()?;
        let vac = gas.vacuum_width(self.c0);
        if !(self.u_star > 0.0 && self.u_star <= vac) {
            return Err(fail("u_star", format!("u_star = {} must lie in (0, {vac}] (vacuum bound)", self.u_star)));
        }
        if !(self.u_left > self.u_star && self.u_left < vac) {
            return Err(fail("u_left", format!("u_left = {} must lie in (u_star, {vac})", self.u_left)));
        }
        if !(self.epsilon >= 0.0) {
            return Err(fail("epsilon", format!("epsilon = {} must be non-negative", self.epsilon)));
        }
        if !(self.envelope.ramp > 0.0 && self.envelope.lo < self.envelope.hi) {
            return Err(fail("envelope_ramp", "envelope needs lo < hi and a positive ramp".into()));
        }
        self.solver.validate().map_err(|e| fail("cfl", e.to_string()))?;
        let a = &self.analysis;
        let lag = self.lag();
        if !(a.step > 0.0 && a.lag_cells > 0.0 && 2.0 * lag < a.step) {
            return Err(fail("lag_cells", format!("need 0 < 2 lag < step, got lag = {lag}, step = {}", a.step)));
        }
        if !(a.u_lo >= 0.0 && a.u_lo < self.u_star) {
            return Err(fail("u_lo", format!("u_lo = {} must lie in [0, u_star)", a.u_lo)));
        }
        if !(a.band_pad >= 0.0 && self.u_star + a.band_pad < self.u_left) {
            return Err(fail("band_pad", format!("band_pad = {} must keep the band below u_left", a.band_pad)));
        }
        if a.levels < 2 {
            return Err(fail("levels", "need at least two energy levels".into()));
        }
        if a.max_order > crate::energy::ORDER_CAP {
            return Err(fail("max_order", format!("max_order = {} exceeds {}", a.max_order, crate::energy::ORDER_CAP)));
        }
        if !(a.predicate_cap > 0.0 && a.predicate_floor >= 0.0) {
            return Err(fail("predicate_cap", "predicate cap must be positive and floor non-negative".into()));
        }
        Ok(())
    }
}

const KEYS: &[(&str, &str)] = &[
    ("gas", "gamma"),
    ("gas", "k0"),
    ("gas", "c0"),
    ("gas", "v0"),
    ("grid", "n1"),
    ("grid", "n2"),
    ("grid", "x1_min"),
    ("grid", "x1_max"),
    ("run", "delta"),
    ("run", "t_star"),
    ("run", "u_star"),
    ("run", "u_left"),
    ("run", "output"),
    ("run", "write_snapshots"),
    ("perturbation", "epsilon"),
    ("perturbation", "seed"),
    ("perturbation", "random_phases"),
    ("perturbation", "mode"),
    ("perturbation", "envelope_lo"),
    ("perturbation", "envelope_hi"),
    ("perturbation", "envelope_ramp"),
    ("solver", "cfl"),
    ("solver", "flux"),
    ("solver", "integrator"),
    ("solver", "reconstruction"),
    ("analysis", "step"),
    ("analysis", "lag_cells"),
    ("analysis", "u_lo"),
    ("analysis", "band_pad"),
    ("analysis", "levels"),
    ("analysis", "max_order"),
    ("analysis", "predicate_cap"),
    ("analysis", "predicate_floor"),
];

fn parse<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::ConfigLine { line, msg: format!("cannot parse '{v}' for {key}") })
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::ConfigLine { line, msg: format!("cannot parse '{v}' for {key}; expected true or false") }),
    }
}

fn parse_enum<T: serde::de::DeserializeOwned>(line: usize, key: &str, v: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(v.to_lowercase()))
        .map_err(|_| Error::ConfigLine { line, msg: format!("unknown value '{v}' for {key}") })
}

/// `kind, k1, k2, amplitude, phase`.
fn parse_mode(line: usize, v: &str) -> Result<Mode> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(Error::ConfigLine { line, msg: "mode takes kind, k1, k2, amplitude, phase".into() });
    }
    Ok(Mode {
        kind: parse_enum(line, "mode kind", parts[0])?,
        k1: parse(line, "mode k1", parts[1])?,
        k2: parse(line, "mode k2", parts[2])?,
        amplitude: parse(line, "mode amplitude", parts[3])?,
        phase: parse(line, "mode phase", parts[4])?,
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;
    let mut lines: HashMap<&'static str, usize> = HashMap::new();
    let mut custom_modes = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::ConfigLine { line, msg: format!("malformed section header '{body}'") })?
                .trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(Error::ConfigLine { line, msg: format!("unknown section [{name}]") });
            }
            section = Some(name.to_string());
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| Error::ConfigLine { line, msg: format!("expected key = value, got '{body}'") })?;
        let (k, v) = (k.trim(), v.trim());
        let &(home, key) = KEYS
            .iter()
            .find(|(_, name)| *name == k)
            .ok_or_else(|| Error::ConfigLine { line, msg: format!("unknown key '{k}'") })?;
        if let Some(s) = &section {
            if s != home {
                return Err(Error::ConfigLine { line, msg: format!("key '{k}' belongs in [{home}], not [{s}]") });
            }
        }
        if key != "mode" && lines.insert(key, line).is_some() {
            return Err(Error::ConfigLine { line, msg: format!("duplicate key '{k}'") });
        }
        match key {
            "gamma" => cfg.gamma = parse(line, key, v)?,
            "k0" => cfg.k0 = parse(line, key, v)?,
            "c0" => cfg.c0 = parse(line, key, v)?,
            "v0" => cfg.v0 = parse(line, key, v)?,
            "n1" => cfg.n1 = parse(line, key, v)?,
            "n2" => cfg.n2 = parse(line, key, v)?,
            "x1_min" => cfg.x1_min = parse(line, key, v)?,
            "x1_max" => cfg.x1_max = parse(line, key, v)?,
            "delta" => cfg.delta = parse(line, key, v)?,
            "t_star" => cfg.t_star = parse(line, key, v)?,
            "u_star" => cfg.u_star = parse(line, key, v)?,
            "u_left" => cfg.u_left = parse(line, key, v)?,
            "output" => cfg.output = Some(PathBuf::from(v)),
            "write_snapshots" => cfg.write_snapshots = parse_bool(line, key, v)?,
            "epsilon" => cfg.epsilon = parse(line, key, v)?,
            "seed" => cfg.seed = parse(line, key, v)?,
            "random_phases" => cfg.random_phases = parse_bool(line, key, v)?,
            "mode" => {
                if !custom_modes {
                    cfg.modes.clear();
                    custom_modes = true;
                }
                cfg.modes.push(parse_mode(line, v)?);
                lines.insert("mode", line);
            }
            "envelope_lo" => cfg.envelope.lo = parse(line, key, v)?,
            "envelope_hi" => cfg.envelope.hi = parse(line, key, v)?,
            "envelope_ramp" => cfg.envelope.ramp = parse(line, key, v)?,
            "cfl" => cfg.solver.cfl = parse(line, key, v)?,
            "flux" => cfg.solver.flux = parse_enum::<Flux>(line, key, v)?,
            "integrator" => cfg.solver.integrator = parse_enum::<Integrator>(line, key, v)?,
            "reconstruction" => cfg.solver.reconstruction = parse_enum::<Reconstruction>(line, key, v)?,
            "step" => cfg.analysis.step = parse(line, key, v)?,
            "lag_cells" => cfg.analysis.lag_cells = parse(line, key, v)?,
            "u_lo" => cfg.analysis.u_lo = parse(line, key, v)?,
            "band_pad" => cfg.analysis.band_pad = parse(line, key, v)?,
            "levels" => cfg.analysis.levels = parse(line, key, v)?,
            "max_order" => cfg.analysis.max_order = parse(line, key, v)?,
            "predicate_cap" => cfg.analysis.predicate_cap = parse(line, key, v)?,
            "predicate_floor" => cfg.analysis.predicate_floor = parse(line, key, v)?,
            _ => unreachable!("key table and match agree"),
        }
    }
    // u* defaults to half the vacuum width; the fan is cut halfway between
    // u* and vacuum unless set.
    if let Ok(gas) = cfg.gas() {
        if !lines.contains_key("u_star") {
            cfg.u_star = gas.data_width(cfg.c0);
        }
        if !lines.contains_key("u_left") {
            cfg.u_left = cfg.u_star + 0.5 * (gas.vacuum_width(cfg.c0) - cfg.u_star);
        }
    }
    cfg.check(&lines)?;
    if cfg.epsilon > 0.05 {
        eprintln!("warning: epsilon = {} is outside the small-perturbation regime", cfg.epsilon);
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn line_numbers_in_errors() {
        match parse_config("# header\n\ngamma=5\n") {
            Err(Error::ConfigLine { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_config("[gas]\nbogus = 1\n") {
            Err(Error::ConfigLine { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn u_star_beyond_vacuum() {
        assert!(matches!(parse_config("u_star=3.5"), Err(Error::ConfigLine { line: 1, .. })));
    }
}
