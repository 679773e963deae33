//! Scenario files: one `key = value` pair per line, `#` starts a comment.
//!
//! Keys starting with `manifest.` are written by runs and skipped here, so a
//! manifest can be fed back in as a config.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use nlheat::wells::DEFAULT_CLASSIFY_TOL;
use nlheat::{DomainSpec, FlowConfig, FlowParams, Scheme, SobolevConfig};

/// Problems found while reading a config. All of them are collected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Sobolev,
    Shoot,
    Evolve,
    GroundState,
    Classify,
    GnConstant,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Sobolev,
        Task::Shoot,
        Task::Evolve,
        Task::GroundState,
        Task::Classify,
        Task::GnConstant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Task::Evolve => "evolve",
            Task::GroundState => "ground_state",
            Task::Classify => "classify",
            Task::Sobolev => "sobolev",
            Task::GnConstant => "gn_constant",
            Task::Shoot => "shoot",
        }
    }

    fn needs_time_stepping(&self) -> bool {
        matches!(self, Task::Evolve | Task::GroundState)
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Eigenfunction { mode: usize, mass: f64 },
    Gaussian { center: f64, width: f64, mass: f64 },
    Soliton { center: f64, mass: f64 },
    /// Nodal values from a `coord,value` CSV, rescaled to `mass` if given.
    File { path: PathBuf, mass: Option<f64> },
}

impl InitialData {
    pub fn mass(&self) -> Option<f64> {
        match *self {
            InitialData::Eigenfunction { mass, .. }
            | InitialData::Gaussian { mass, .. }
            | InitialData::Soliton { mass, .. } => Some(mass),
            InitialData::File { mass, .. } => mass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    Multiplier,
    Projected,
    MuAlpha,
}

impl SchemeChoice {
    fn name(&self) -> &'static str {
        match self {
            SchemeChoice::Multiplier => "multiplier",
            SchemeChoice::Projected => "projected",
            SchemeChoice::MuAlpha => "mu_alpha",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootSettings {
    /// Defaults to the domain extent on whole-space domains, else 20.
    pub r_max: Option<f64>,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    /// Defaults to the scenario's `grid_n`.
    pub grid_n: Option<usize>,
    pub ode_steps: usize,
}

impl Default for ShootSettings {
    fn default() -> Self {
        Self {
            r_max: None,
            lo: 1.001,
            hi: 8.0,
            tol: 1e-14,
            grid_n: None,
            ode_steps: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub step_factor: f64,
}

impl Default for SobolevSettings {
    fn default() -> Self {
        let d = SobolevConfig::new(3);
        Self {
            tol: d.tol,
            max_iter: d.max_iter,
            step_factor: d.step_factor,
        }
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub domain: DomainSpec,
    pub grid_n: usize,
    pub params: FlowParams,
    pub initial: InitialData,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub scheme: SchemeChoice,
    pub alpha: Option<f64>,
    pub stationarity_tol: f64,
    pub growup_factor: f64,
    pub max_steps: Option<usize>,
    pub snapshot_every: usize,
    pub tasks: Vec<Task>,
    pub output_dir: Option<PathBuf>,
    pub shoot: ShootSettings,
    pub sobolev: SobolevSettings,
    pub classify_tol: f64,
}

pub const KEYS: &[&str] = &[
    "domain",
    "length",
    "radius",
    "dimension",
    "whole_space",
    "halfwidth",
    "grid_n",
    "g",
    "sigma",
    "initial",
    "mode",
    "mass",
    "center",
    "width",
    "seed_file",
    "dt",
    "t_final",
    "scheme",
    "alpha",
    "stationarity_tol",
    "growup_factor",
    "max_steps",
    "snapshot_every",
    "tasks",
    "output_dir",
    "shoot_r_max",
    "shoot_lo",
    "shoot_hi",
    "shoot_tol",
    "shoot_grid_n",
    "shoot_ode_steps",
    "sobolev_tol",
    "sobolev_max_iter",
    "sobolev_step_factor",
    "classify_tol",
];

/// Keys a sweep may vary.
pub const SWEEPABLE: &[&str] = &["dt", "grid_n", "g", "sigma", "mass"];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    issues: Vec<ConfigIssue>,
}

impl Entries {
    fn issue(&mut self, key: &str, message: impl Into<String>) {
        let line = self.map.get(key).map(|e| e.0);
        self.issues.push(ConfigIssue {
            line,
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|e| e.1.as_str())
    }

    fn get<T: FromStr>(&mut self, key: &str, what: &str) -> Option<T> {
        let raw = self.raw(key)?.to_string();
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.issue(key, format!("expected {what}, got `{raw}`"));
                None
            }
        }
    }

    fn required<T: FromStr>(&mut self, key: &str, what: &str, context: &str) -> Option<T> {
        if self.raw(key).is_none() {
            self.issues.push(ConfigIssue {
                line: None,
                key: key.to_string(),
                message: format!("missing, required {context}"),
            });
            return None;
        }
        self.get(key, what)
    }

    fn positive(&mut self, key: &str, v: Option<f64>) -> Option<f64> {
        match v {
            Some(x) if x.is_finite() && x > 0.0 => Some(x),
            Some(x) => {
                self.issue(key, format!("must be positive, got {x}"));
                None
            }
            None => None,
        }
    }

    fn forbid(&mut self, key: &str, context: &str) {
        if self.raw(key).is_some() {
            self.issue(key, format!("not used {context}"));
        }
    }
}

fn tokenize(text: &str) -> Entries {
    let mut entries = Entries {
        map: BTreeMap::new(),
        issues: Vec::new(),
    };
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            entries.issues.push(ConfigIssue {
                line: Some(line_no),
                key: line.to_string(),
                message: "expected `key = value`".into(),
            });
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if k.starts_with("manifest.") {
            continue;
        }
        if !KEYS.contains(&k) {
            entries.issues.push(ConfigIssue {
                line: Some(line_no),
                key: k.to_string(),
                message: "unknown key".into(),
            });
            continue;
        }
        if let Some((first, _)) = entries.map.get(k) {
            entries.issues.push(ConfigIssue {
                line: Some(line_no),
                key: k.to_string(),
                message: format!("duplicate key (first set on line {first})"),
            });
            continue;
        }
        entries.map.insert(k.to_string(), (line_no, v.to_string()));
    }
    entries
}

/// Parse and validate a scenario. Every problem found is reported.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<ConfigIssue>> {
    let mut e = tokenize(text);

    let domain_kind: Option<String> = e.required("domain", "a domain name", "always");
    let mut dim = 1;
    let domain = match domain_kind.as_deref() {
        Some("interval") => {
            for k in ["radius", "dimension", "whole_space", "halfwidth"] {
                e.forbid(k, "for an interval");
            }
            let l = e.required("length", "a number", "for an interval");
            e.positive("length", l).and_then(|l| DomainSpec::interval(l).ok())
        }
        Some("ball") => {
            e.forbid("length", "for a ball");
            e.forbid("halfwidth", "for a ball");
            let r = e.required("radius", "a number", "for a ball");
            let r = e.positive("radius", r);
            let d: Option<usize> = e.required("dimension", "an integer", "for a ball");
            let whole: bool = e.get("whole_space", "true or false").unwrap_or(false);
            if let Some(d) = d {
                if d < 2 {
                    e.issue("dimension", "balls need dimension >= 2; use interval or truncated_line");
                } else {
                    dim = d;
                }
            }
            match (r, d) {
                (Some(r), Some(d)) if d >= 2 => Some(if whole {
                    DomainSpec::ball_whole_space(r, d).expect("validated")
                } else {
                    DomainSpec::ball(r, d).expect("validated")
                }),
                _ => None,
            }
        }
        Some("truncated_line") => {
            for k in ["length", "radius", "dimension", "whole_space"] {
                e.forbid(k, "for a truncated line");
            }
            let a = e.required("halfwidth", "a number", "for a truncated line");
            e.positive("halfwidth", a).and_then(|a| DomainSpec::truncated_line(a).ok())
        }
        Some(other) => {
            e.issue("domain", format!("expected interval, ball or truncated_line, got `{other}`"));
            None
        }
        None => None,
    };

    let grid_n: Option<usize> = e.required("grid_n", "an integer", "always");
    if let Some(n) = grid_n {
        if n < 3 {
            e.issue("grid_n", format!("must be at least 3, got {n}"));
        }
    }
    let g: Option<f64> = e.required("g", "a number", "always");
    if matches!(g, Some(x) if !x.is_finite()) {
        e.issue("g", "must be finite");
    }
    let sigma = e.required("sigma", "a number", "always");
    let sigma = e.positive("sigma", sigma);
    let params = match (g, sigma) {
        (Some(g), Some(s)) if g.is_finite() => FlowParams::new(g, s, dim).ok(),
        _ => None,
    };

    let tasks: Vec<Task> = match e.raw("tasks").map(str::to_string) {
        None => Vec::new(),
        Some(list) => {
            let mut tasks = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match item.parse::<Task>() {
                    Ok(t) if tasks.contains(&t) => e.issue("tasks", format!("task `{item}` listed twice")),
                    Ok(t) => tasks.push(t),
                    Err(msg) => e.issue("tasks", msg),
                }
            }
            tasks
        }
    };

    let mass: Option<f64> = e.get("mass", "a number");
    let mass = e.positive("mass", mass);
    let center: f64 = e.get("center", "a number").unwrap_or(0.0);
    let initial_kind: Option<String> = e.required("initial", "an initial-data name", "always");
    let need_mass = |e: &mut Entries, what: &str| {
        if e.raw("mass").is_none() {
            e.issues.push(ConfigIssue {
                line: None,
                key: "mass".into(),
                message: format!("missing, required for {what} initial data"),
            });
        }
    };
    let initial = match initial_kind.as_deref() {
        Some("eigenfunction") => {
            need_mass(&mut e, "eigenfunction");
            let mode: usize = e.get("mode", "an integer").unwrap_or(1);
            if mode == 0 {
                e.issue("mode", "must be at least 1");
            }
            mass.map(|mass| InitialData::Eigenfunction { mode, mass })
        }
        Some("gaussian") => {
            need_mass(&mut e, "gaussian");
            let width = e.get("width", "a number").or(Some(1.0));
            let width = e.positive("width", width);
            match (mass, width) {
                (Some(mass), Some(width)) => Some(InitialData::Gaussian { center, width, mass }),
                _ => None,
            }
        }
        Some("soliton") => {
            need_mass(&mut e, "soliton");
            if dim != 1 {
                e.issue("initial", "soliton initial data needs a one-dimensional domain");
            }
            mass.map(|mass| InitialData::Soliton { center, mass })
        }
        Some("file") => {
            let path: Option<String> = e.required("seed_file", "a path", "for file initial data");
            path.map(|p| InitialData::File {
                path: PathBuf::from(p),
                mass,
            })
        }
        Some(other) => {
            e.issue(
                "initial",
                format!("expected eigenfunction, gaussian, soliton or file, got `{other}`"),
            );
            None
        }
        None => None,
    };

    let dt: Option<f64> = e.get("dt", "a number");
    let dt = e.positive("dt", dt);
    let t_final: Option<f64> = e.get("t_final", "a number");
    let t_final = e.positive("t_final", t_final);
    let scheme = match e.raw("scheme").map(str::to_string).as_deref() {
        None | Some("multiplier") => SchemeChoice::Multiplier,
        Some("projected") => SchemeChoice::Projected,
        Some("mu_alpha") => SchemeChoice::MuAlpha,
        Some(other) => {
            e.issue("scheme", format!("expected multiplier, projected or mu_alpha, got `{other}`"));
            SchemeChoice::Multiplier
        }
    };
    let alpha: Option<f64> = e.get("alpha", "a number");
    let alpha = e.positive("alpha", alpha);
    if scheme == SchemeChoice::MuAlpha && e.raw("alpha").is_none() {
        e.issues.push(ConfigIssue {
            line: None,
            key: "alpha".into(),
            message: "missing, required for the mu_alpha scheme".into(),
        });
    }
    let defaults = FlowConfig::new(1.0, 2.0, Scheme::MultiplierSemiImplicit);
    let stationarity_tol: f64 = e.get("stationarity_tol", "a number").unwrap_or(defaults.stationarity_tol);
    if !(stationarity_tol >= 0.0) {
        e.issue("stationarity_tol", "must be nonnegative");
    }
    let growup_factor: f64 = e.get("growup_factor", "a number").unwrap_or(defaults.growup_factor);
    if !(growup_factor > 1.0) {
        e.issue("growup_factor", "must exceed 1");
    }
    let max_steps: Option<usize> = e.get("max_steps", "an integer");
    if max_steps == Some(0) {
        e.issue("max_steps", "must be positive");
    }
    let snapshot_every: usize = e.get("snapshot_every", "an integer").unwrap_or(1);
    if snapshot_every == 0 {
        e.issue("snapshot_every", "must be positive");
    }
    if let (Some(dt), Some(t)) = (dt, t_final) {
        if t <= dt {
            e.issue("t_final", format!("must exceed dt = {dt}"));
        }
    }

    let output_dir = e.raw("output_dir").map(PathBuf::from);

    let sd = ShootSettings::default();
    let shoot_r_max = e.get("shoot_r_max", "a number");
    let shoot = ShootSettings {
        r_max: e.positive("shoot_r_max", shoot_r_max),
        lo: e.get("shoot_lo", "a number").unwrap_or(sd.lo),
        hi: e.get("shoot_hi", "a number").unwrap_or(sd.hi),
        tol: e.get("shoot_tol", "a number").unwrap_or(sd.tol),
        grid_n: e.get("shoot_grid_n", "an integer").or(sd.grid_n),
        ode_steps: e.get("shoot_ode_steps", "an integer").unwrap_or(sd.ode_steps),
    };
    if !(shoot.lo < shoot.hi) {
        e.issue("shoot_lo", "must be below shoot_hi");
    }
    let so = SobolevSettings::default();
    let sobolev = SobolevSettings {
        tol: e.get("sobolev_tol", "a number").unwrap_or(so.tol),
        max_iter: e.get("sobolev_max_iter", "an integer").unwrap_or(so.max_iter),
        step_factor: e.get("sobolev_step_factor", "a number").unwrap_or(so.step_factor),
    };
    let classify_tol: f64 = e.get("classify_tol", "a number").unwrap_or(DEFAULT_CLASSIFY_TOL);

    let issues = e.issues;
    if !issues.is_empty() {
        return Err(issues);
    }
    let config = ScenarioConfig {
        domain: domain.expect("validated"),
        grid_n: grid_n.expect("validated"),
        params: params.expect("validated"),
        initial: initial.expect("validated"),
        dt,
        t_final,
        scheme,
        alpha,
        stationarity_tol,
        growup_factor,
        max_steps,
        snapshot_every,
        tasks,
        output_dir,
        shoot,
        sobolev,
        classify_tol,
    };
    config.check_tasks()?;
    Ok(config)
}

impl ScenarioConfig {
    /// Replace the task list and re-check task requirements.
    pub fn with_tasks(mut self, tasks: Vec<Task>) -> Result<Self, Vec<ConfigIssue>> {
        self.tasks = tasks;
        self.check_tasks()?;
        Ok(self)
    }

    /// Requirements that depend on the task list.
    pub fn check_tasks(&self) -> Result<(), Vec<ConfigIssue>> {
        let mut issues = Vec::new();
        if self.tasks.iter().any(Task::needs_time_stepping) {
            for (key, v) in [("dt", self.dt), ("t_final", self.t_final)] {
                if v.is_none() {
                    issues.push(ConfigIssue {
                        line: None,
                        key: key.into(),
                        message: "missing, required by evolve and ground_state".into(),
                    });
                }
            }
        }
        if self.tasks.contains(&Task::GroundState) && self.initial.mass().is_none() {
            issues.push(ConfigIssue {
                line: None,
                key: "mass".into(),
                message: "missing, required by ground_state".into(),
            });
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    pub fn flow_config(&self) -> Option<FlowConfig> {
        let scheme = match self.scheme {
            SchemeChoice::Multiplier => Scheme::MultiplierSemiImplicit,
            SchemeChoice::Projected => Scheme::ProjectedSemiImplicit,
            SchemeChoice::MuAlpha => Scheme::MuAlphaSemiImplicit { alpha: self.alpha? },
        };
        let mut cfg = FlowConfig::new(self.dt?, self.t_final?, scheme)
            .with_stationarity_tol(self.stationarity_tol)
            .with_growup_factor(self.growup_factor)
            .with_snapshot_every(self.snapshot_every);
        if let Some(m) = self.max_steps {
            cfg = cfg.with_max_steps(m);
        }
        Some(cfg)
    }

    pub fn sobolev_config(&self) -> SobolevConfig {
        SobolevConfig {
            tol: self.sobolev.tol,
            max_iter: self.sobolev.max_iter,
            step_factor: self.sobolev.step_factor,
            ..SobolevConfig::new(self.grid_n)
        }
    }

    /// Canonical text form. Parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        match self.domain {
            DomainSpec::Interval { length } => {
                put("domain", "interval".into());
                put("length", length.to_string());
            }
            DomainSpec::Ball {
                radius,
                dim,
                whole_space,
            } => {
                put("domain", "ball".into());
                put("radius", radius.to_string());
                put("dimension", dim.to_string());
                put("whole_space", whole_space.to_string());
            }
            DomainSpec::TruncatedLine { halfwidth } => {
                put("domain", "truncated_line".into());
                put("halfwidth", halfwidth.to_string());
            }
        }
        put("grid_n", self.grid_n.to_string());
        put("g", self.params.g.to_string());
        put("sigma", self.params.sigma.to_string());
        match &self.initial {
            InitialData::Eigenfunction { mode, mass } => {
                put("initial", "eigenfunction".into());
                put("mode", mode.to_string());
                put("mass", mass.to_string());
            }
            InitialData::Gaussian { center, width, mass } => {
                put("initial", "gaussian".into());
                put("center", center.to_string());
                put("width", width.to_string());
                put("mass", mass.to_string());
            }
            InitialData::Soliton { center, mass } => {
                put("initial", "soliton".into());
                put("center", center.to_string());
                put("mass", mass.to_string());
            }
            InitialData::File { path, mass } => {
                put("initial", "file".into());
                put("seed_file", path.display().to_string());
                if let Some(m) = mass {
                    put("mass", m.to_string());
                }
            }
        }
        if let Some(dt) = self.dt {
            put("dt", dt.to_string());
        }
        if let Some(t) = self.t_final {
            put("t_final", t.to_string());
        }
        put("scheme", self.scheme.name().into());
        if let Some(a) = self.alpha {
            put("alpha", a.to_string());
        }
        put("stationarity_tol", self.stationarity_tol.to_string());
        put("growup_factor", self.growup_factor.to_string());
        if let Some(m) = self.max_steps {
            put("max_steps", m.to_string());
        }
        put("snapshot_every", self.snapshot_every.to_string());
        if !self.tasks.is_empty() {
            let names: Vec<&str> = self.tasks.iter().map(Task::name).collect();
            put("tasks", names.join(","));
        }
        if let Some(d) = &self.output_dir {
            put("output_dir", d.display().to_string());
        }
        if let Some(r) = self.shoot.r_max {
            put("shoot_r_max", r.to_string());
        }
        put("shoot_lo", self.shoot.lo.to_string());
        put("shoot_hi", self.shoot.hi.to_string());
        put("shoot_tol", self.shoot.tol.to_string());
        if let Some(n) = self.shoot.grid_n {
            put("shoot_grid_n", n.to_string());
        }
        put("shoot_ode_steps", self.shoot.ode_steps.to_string());
        put("sobolev_tol", self.sobolev.tol.to_string());
        put("sobolev_max_iter", self.sobolev.max_iter.to_string());
        put("sobolev_step_factor", self.sobolev.step_factor.to_string());
        put("classify_tol", self.classify_tol.to_string());
        out
    }
}

/// Replace (or add) one key in config text, keeping everything else.
pub fn override_key(text: &str, key: &str, value: &str) -> String {
    let mut out = String::new();
    let mut replaced = false;
    for line in text.lines() {
        let k = line.split('#').next().unwrap_or("").split_once('=').map(|(k, _)| k.trim());
        if k == Some(key) {
            if !replaced {
                let _ = writeln!(out, "{key} = {value}");
                replaced = true;
            }
        } else {
            out.push_str(line);
            out.push('\n');
        }
    }
    if !replaced {
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "domain = interval\nlength = 3.14\ngrid_n = 63\ng = 1\nsigma = 1\ninitial = eigenfunction\nmass = 1\ntasks = sobolev\n";

    #[test]
    fn minimal_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.grid_n, 63);
        assert_eq!(c.tasks, vec![Task::Sobolev]);
        assert_eq!(c.initial, InitialData::Eigenfunction { mode: 1, mass: 1.0 });
    }

    #[test]
    fn negative_sigma_is_named() {
        let text = MINIMAL.replace("sigma = 1", "sigma = -1");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.key == "sigma" && e.line == Some(5)));
    }

    #[test]
    fn duplicates_and_unknowns_all_reported() {
        let text = format!("{MINIMAL}g = 2\nbogus = 1\ngrid_n = x\n");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.key == "g" && e.message.contains("duplicate")));
        assert!(errs.iter().any(|e| e.key == "bogus"));
        assert!(errs.iter().any(|e| e.key == "grid_n"));
    }

    #[test]
    fn evolve_needs_time_settings() {
        let text = MINIMAL.replace("tasks = sobolev", "tasks = evolve");
        let errs = parse_config(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.key == "dt"));
        assert!(errs.iter().any(|e| e.key == "t_final"));
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = "domain = ball\nradius = 2.5\ndimension = 3\ngrid_n = 100\ng = -0.3\nsigma = 0.7\ninitial = gaussian\nwidth = 0.4\nmass = 2\ndt = 0.001\nt_final = 0.1\nscheme = mu_alpha\nalpha = 3\ntasks = evolve,classify\n";
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.to_text()).unwrap();
        assert_eq!(c, again);
        let with_manifest = format!("{}manifest.status = ok\nmanifest.status = ok\n", c.to_text());
        assert_eq!(parse_config(&with_manifest).unwrap(), c);
    }

    #[test]
    fn override_replaces_value() {
        let t = override_key(MINIMAL, "g", "-1");
        assert_eq!(parse_config(&t).unwrap().params.g, -1.0);
        let t = override_key(MINIMAL, "dt", "0.1");
        assert_eq!(parse_config(&t).unwrap().dt, Some(0.1));
    }
}
