//! Run configuration: a TOML file with `[model]`, `[solver]` and `[output]`
//! sections plus `section.key=value` overrides.

use std::path::{Path, PathBuf};

use qdmft::dmft::{DmftConfig, DosGrid};
use qdmft::model::TwoSiteParams;
use qdmft::sim::{EvalMode, ReadoutError, ShotConfig, SpamModel};
use qdmft::verify::Fault;
use qdmft::vqe::{AnsatzKind, Method, SpectrumOptions, VqeOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub u: f64,
    /// Defaults to `u / 2`.
    pub mu: Option<f64>,
    /// Bath level; the starting value for the off-half-filling loop.
    pub eps2: f64,
    /// Hybridization; the starting value for the loops.
    pub v: f64,
    /// Defaults to true exactly when `mu = u/2` and `eps2 = 0`.
    pub ph_symmetric: Option<bool>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { u: 4.0, mu: None, eps2: 0.0, v: 1.0, ph_symmetric: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Shots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzName {
    Pt4,
    Pt4x,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub method: Method,
    /// Full-register ansatz used by `method = "pt"`.
    pub ansatz: AnsatzName,
    pub mode: ModeName,
    /// Measurements per Pauli term in shots mode.
    pub shots: u64,
    /// Root seed; mandatory in shots mode.
    pub seed: Option<u64>,
    pub restarts: usize,
    pub regularize: bool,
    pub eta: Option<f64>,
    pub occ_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub damping: f64,
    pub grouping: bool,
    /// Per-qubit readout flip probabilities (0 to 1 read as 1, 1 as 0).
    pub spam_p01: f64,
    pub spam_p10: f64,
    pub correct_spam: bool,
    /// Shots for the fixed-angle column of the `solve` report.
    pub table_shots: u64,
    /// Extra half-filled loops for a z(U) scan (`dmft`).
    pub u_sweep: Vec<f64>,
    /// Random parameter sets for `verify`.
    pub draws: usize,
    pub fault: Fault,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            method: Method::Cr,
            ansatz: AnsatzName::Pt4x,
            mode: ModeName::Exact,
            shots: 10_000,
            seed: None,
            restarts: 5,
            regularize: true,
            eta: None,
            occ_tol: None,
            max_iters: None,
            damping: 1.0,
            grouping: false,
            spam_p01: 0.0,
            spam_p10: 0.0,
            correct_spam: false,
            table_shots: 5000,
            u_sweep: Vec::new(),
            draws: 20,
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub dos_lo: f64,
    pub dos_hi: f64,
    pub dos_points: usize,
    pub dos_delta: f64,
    /// Report energies with the constant of the fermionic Hamiltonian added.
    pub fermionic_energies: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        let g = DosGrid::default();
        OutputSection { dir: PathBuf::from("out"), dos_lo: g.lo, dos_hi: g.hi, dos_points: g.points, dos_delta: g.delta, fermionic_energies: false }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// `key=value` with a dotted `section.key`; the value is read as TOML and
/// falls back to a bare string.
fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| bad(format!("override `{assignment}` is not key=value")))?;
    let (section, field) = key.trim().split_once('.').ok_or_else(|| bad(format!("override key `{key}` needs a section, e.g. model.u")))?;
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let sub = entry.as_table_mut().ok_or_else(|| bad(format!("`{section}` is not a section")))?;
    sub.insert(field.to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &[String], out: Option<&Path>) -> Result<RunConfig, ConfigError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| bad(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<toml::Table>().map_err(|e| bad(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let mut cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| bad(e.to_string()))?;
        if let Some(o) = out {
            cfg.output.dir = o.to_path_buf();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.solver;
        if s.mode == ModeName::Shots && s.seed.is_none() {
            return Err(bad("solver.seed is required when solver.mode = \"shots\""));
        }
        if s.shots == 0 || s.table_shots == 0 {
            return Err(bad("shot counts must be positive"));
        }
        if s.restarts == 0 {
            return Err(bad("solver.restarts must be positive"));
        }
        for p in [s.spam_p01, s.spam_p10] {
            if !(0.0..0.5).contains(&p) {
                return Err(bad("readout flip probabilities must lie in [0, 0.5)"));
            }
        }
        if self.has_spam() && s.method != Method::Pt {
            return Err(bad("readout noise needs solver.method = \"pt\" (a fixed four-qubit register)"));
        }
        let o = &self.output;
        if !(o.dos_hi > o.dos_lo) || o.dos_points < 2 || o.dos_delta <= 0.0 {
            return Err(bad("output DOS grid needs dos_hi > dos_lo, dos_points >= 2, dos_delta > 0"));
        }
        Ok(())
    }

    fn has_spam(&self) -> bool {
        self.solver.spam_p01 > 0.0 || self.solver.spam_p10 > 0.0
    }

    pub fn seed(&self) -> u64 {
        self.solver.seed.unwrap_or(0)
    }

    pub fn params(&self) -> TwoSiteParams {
        let m = &self.model;
        TwoSiteParams::new(m.u, m.mu.unwrap_or(m.u / 2.0), m.eps2, m.v)
    }

    pub fn ph_symmetric(&self) -> bool {
        let m = &self.model;
        m.ph_symmetric.unwrap_or_else(|| m.mu.is_none_or(|mu| mu == m.u / 2.0) && m.eps2 == 0.0)
    }

    pub fn ansatz(&self) -> AnsatzKind {
        match self.solver.ansatz {
            AnsatzName::Pt4 => AnsatzKind::Pt4,
            AnsatzName::Pt4x => AnsatzKind::Pt4x,
        }
    }

    /// Shot settings with `shots` measurements per term.
    pub fn shot_config(&self, shots: u64) -> ShotConfig {
        let s = &self.solver;
        let spam = self.has_spam().then(|| SpamModel::Factorized(vec![ReadoutError { p01: s.spam_p01, p10: s.spam_p10 }; 4]));
        ShotConfig { grouping: s.grouping, spam, correct_spam: s.correct_spam, ..ShotConfig::new(shots, self.seed()) }
    }

    pub fn mode(&self) -> EvalMode {
        match self.solver.mode {
            ModeName::Exact => EvalMode::Exact,
            ModeName::Shots => EvalMode::Shots(self.shot_config(self.solver.shots)),
        }
    }

    pub fn vqe(&self) -> VqeOptions {
        VqeOptions { restarts: self.solver.restarts, seed: self.seed(), ..VqeOptions::default() }
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        let mut o = SpectrumOptions::new(self.solver.method, self.mode());
        o.vqe = self.vqe();
        o.full_ansatz = self.ansatz();
        o
    }

    pub fn dos_grid(&self) -> DosGrid {
        let o = &self.output;
        DosGrid { lo: o.dos_lo, hi: o.dos_hi, points: o.dos_points, delta: o.dos_delta }
    }

    pub fn dmft(&self) -> DmftConfig {
        let p = self.params();
        let s = &self.solver;
        let base = if self.ph_symmetric() { DmftConfig::ph(p.u) } else { DmftConfig::general(p.u, p.mu) };
        DmftConfig {
            v0: p.v,
            eps2_0: if self.ph_symmetric() { 0.0 } else { p.eps2 },
            eta: s.eta.unwrap_or(base.eta),
            occ_tol: s.occ_tol.unwrap_or(base.occ_tol),
            max_iters: s.max_iters.unwrap_or(base.max_iters),
            mode: self.mode(),
            method: s.method,
            full_ansatz: self.ansatz(),
            damping: s.damping,
            regularize: s.regularize,
            vqe: self.vqe(),
            dos: self.dos_grid(),
            ..base
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, sets: &[&str]) -> Result<RunConfig, ConfigError> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        std::fs::write(&p, text).unwrap();
        RunConfig::load(Some(&p), &sets.iter().map(|s| s.to_string()).collect::<Vec<_>>(), None)
    }

    #[test]
    fn defaults_and_overrides() {
        let c = parse("[model]\nu = 3.0\n", &["model.v=0.5", "solver.method=pt", "output.dir=res"]).unwrap();
        assert_eq!(c.params(), TwoSiteParams::new(3.0, 1.5, 0.0, 0.5));
        assert!(c.ph_symmetric());
        assert_eq!(c.solver.method, Method::Pt);
        assert_eq!(c.output.dir, PathBuf::from("res"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse("[model]\nuu = 3.0\n", &[]).is_err());
        assert!(parse("[extra]\nx = 1\n", &[]).is_err());
        assert!(parse("", &["solver.nope=1"]).is_err());
        assert!(parse("", &["novalue"]).is_err());
    }

    #[test]
    fn shots_need_a_seed() {
        assert!(parse("[solver]\nmode = \"shots\"\n", &[]).is_err());
        let c = parse("[solver]\nmode = \"shots\"\nseed = 4\nshots = 100\n", &[]).unwrap();
        assert!(matches!(c.mode(), EvalMode::Shots(ref s) if s.seed == 4 && s.shots == 100));
    }

    #[test]
    fn general_point_is_detected() {
        let c = parse("[model]\nu = 4.0\nmu = -0.16016\n", &[]).unwrap();
        assert!(!c.ph_symmetric());
        assert_eq!(c.dmft().eta, 1e-4);
    }

    #[test]
    fn readout_noise_needs_full_register() {
        assert!(parse("[solver]\nspam_p01 = 0.02\n", &[]).is_err());
        assert!(parse("[solver]\nspam_p01 = 0.02\nmethod = \"pt\"\n", &[]).is_ok());
    }
}
