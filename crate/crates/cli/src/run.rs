//! Scenario execution and run manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nlheat::stationary::{check_k_regime, default_seed};
use nlheat::wells::{classify_with_thresholds, InvarianceReport};
use nlheat::{
    check_dissipation, classify_bounded, energy, evolve, gn_from_profile, ground_state_from_seed,
    mass_formula_check, mass_norm, monitor_invariance, residuals_with_multiplier, shoot_radial,
    sobolev_constant, Classifier, DomainSpec, Field, Grid, GroundState, KThresholds, RadialProfile,
    RunResult, ShootingConfig, Termination, WellConstants,
};
use sha2::{Digest, Sha256};

use crate::config::{InitialData, ScenarioConfig, Task};
use crate::csvio::{field_csv, fmt_float, read_field, trace_csv};
use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const DEFAULT_OUTPUT_DIR: &str = "nlheat-out";

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok,
    Failed {
        task: Option<&'static str>,
        message: String,
        exit_code: i32,
    },
}

/// Echo of the config plus everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_text: String,
    pub output_dir: PathBuf,
    pub tasks_run: Vec<Task>,
    pub notes: Vec<String>,
    pub caveats: Vec<String>,
    /// `(file name, sha256 hex)` in write order.
    pub artifacts: Vec<(String, String)>,
    pub termination: Option<String>,
    pub scalars: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
    pub status: RunStatus,
}

impl RunManifest {
    fn new(config: &ScenarioConfig, output_dir: PathBuf) -> Self {
        Self {
            config_text: config.to_text(),
            output_dir,
            tasks_run: Vec::new(),
            notes: Vec::new(),
            caveats: Vec::new(),
            artifacts: Vec::new(),
            termination: None,
            scalars: BTreeMap::new(),
            labels: BTreeMap::new(),
            status: RunStatus::Ok,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Ok => 0,
            RunStatus::Failed { exit_code, .. } => exit_code,
        }
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        self.scalars.get(key).copied()
    }

    /// The manifest file. Parsing it as a config reproduces the run.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# nlheat run manifest\n");
        out.push_str(&self.config_text);
        let mut put = |k: &str, v: &str| {
            let _ = writeln!(out, "manifest.{k} = {v}");
        };
        match &self.status {
            RunStatus::Ok => put("status", "ok"),
            RunStatus::Failed {
                task,
                message,
                exit_code,
            } => {
                put("status", "failed");
                put("exit_code", &exit_code.to_string());
                if let Some(t) = task {
                    put("failed_task", t);
                }
                put("error", &message.replace('\n', " | "));
            }
        }
        let names: Vec<&str> = self.tasks_run.iter().map(Task::name).collect();
        put("tasks_run", &names.join(","));
        for n in &self.notes {
            put("note", n);
        }
        for c in &self.caveats {
            put("caveat", c);
        }
        if let Some(t) = &self.termination {
            put("termination", t);
        }
        for (k, v) in &self.scalars {
            put(&format!("scalar.{k}"), &fmt_float(*v));
        }
        for (k, v) in &self.labels {
            put(&format!("label.{k}"), v);
        }
        for (name, sum) in &self.artifacts {
            put(&format!("artifact.{name}"), &format!("sha256:{sum}"));
        }
        out
    }
}

/// A run that stopped on an error. The partial manifest has been written.
#[derive(Debug)]
pub struct RunFailure {
    pub manifest: RunManifest,
    pub error: CliError,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Requested tasks plus their prerequisites, in execution order.
pub fn plan_tasks(config: &ScenarioConfig) -> (Vec<Task>, Vec<String>) {
    let mut tasks = config.tasks.clone();
    let mut notes = Vec::new();
    let whole = config.domain.is_whole_space();
    let mut require = |tasks: &mut Vec<Task>, need: Task, by: Task| {
        if tasks.contains(&by) && !tasks.contains(&need) {
            tasks.push(need);
            notes.push(format!("{} inserted before {}", need.name(), by.name()));
        }
    };
    if whole {
        require(&mut tasks, Task::Shoot, Task::Classify);
    } else {
        require(&mut tasks, Task::Sobolev, Task::Classify);
    }
    require(&mut tasks, Task::Shoot, Task::GnConstant);
    tasks.sort();
    (tasks, notes)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Run<'a> {
    config: &'a ScenarioConfig,
    dir: PathBuf,
    manifest: RunManifest,
    grid: Arc<Grid>,
    initial: Option<Field>,
    evolution: Option<RunResult>,
    wells: Option<WellConstants>,
    profile: Option<RadialProfile>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(CliError::io(&path))?;
        self.manifest.artifacts.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    fn scalar(&mut self, key: &str, v: f64) {
        self.manifest.scalars.insert(key.to_string(), v);
    }

    fn label(&mut self, key: &str, v: impl Into<String>) {
        self.manifest.labels.insert(key.to_string(), v.into());
    }

    fn initial(&mut self) -> Result<Field, CliError> {
        if let Some(f) = &self.initial {
            return Ok(f.clone());
        }
        let f = build_initial(self.config, &self.grid, &mut self.manifest)?;
        self.write("initial.csv", &field_csv(&f))?;
        self.initial = Some(f.clone());
        Ok(f)
    }

    fn run_task(&mut self, task: Task) -> Result<(), CliError> {
        let params = self.config.params;
        let fail = |source: nlheat::Error| CliError::Task {
            task: task.name(),
            source,
        };
        match task {
            Task::Sobolev => {
                let wc = sobolev_constant(self.config.domain, params.sigma, &self.config.sobolev_config())
                    .map_err(fail)?;
                self.scalar("lambda", wc.lambda);
                self.scalar("p", wc.p);
                self.scalar("lambda_refined", wc.lambda_refined);
                self.scalar("lambda_extrapolated", wc.lambda_extrapolated);
                self.scalar("sobolev_residual", wc.residual);
                self.scalar("sobolev_iterations", wc.iterations as f64);
                self.wells = Some(wc);
            }
            Task::Shoot => {
                let s = &self.config.shoot;
                let r_max = s.r_max.unwrap_or(match self.config.domain {
                    DomainSpec::TruncatedLine { halfwidth } => halfwidth,
                    DomainSpec::Ball {
                        radius,
                        whole_space: true,
                        ..
                    } => radius,
                    _ => 20.0,
                });
                let cfg = ShootingConfig {
                    r_max,
                    bracket: (s.lo, s.hi),
                    tol: s.tol,
                    grid_n: s.grid_n.unwrap_or(self.config.grid_n),
                    ode_steps: s.ode_steps,
                };
                let prof = shoot_radial(&params.normalized(), &cfg).map_err(fail)?;
                let res = residuals_with_multiplier(&prof.field, &params.normalized(), -1.0).map_err(fail)?;
                self.write("shoot_profile.csv", &field_csv(&prof.field))?;
                self.scalar("shoot_amplitude", prof.amplitude);
                self.scalar("shoot_bisections", prof.bisections as f64);
                self.scalar("shoot_pde_sup", res.pde_sup);
                self.scalar("shoot_pohozaev1", res.pohozaev1);
                if let Some(v) = res.pohozaev2 {
                    self.scalar("shoot_pohozaev2", v);
                }
                if let Some(v) = res.energy_relation {
                    self.scalar("shoot_energy_relation", v);
                }
                self.profile = Some(prof);
            }
            Task::Evolve => {
                let u0 = self.initial()?;
                let cfg = self.config.flow_config().expect("checked by config validation");
                let run = evolve(&u0, &params, &cfg).map_err(fail)?;
                self.record_evolution(&run, &u0)?;
                let diverged = run.termination == Termination::Diverged;
                let t = run.last().t;
                self.evolution = Some(run);
                if diverged {
                    return Err(CliError::Numerical {
                        task: task.name(),
                        message: format!("evolution diverged after t = {t}"),
                    });
                }
            }
            Task::GroundState => {
                let u0 = self.initial()?;
                let mass = self.config.initial.mass().expect("checked by config validation");
                let cfg = self.config.flow_config().expect("checked by config validation");
                if self.config.domain.is_whole_space() && params.g > 0.0 && params.sigma < params.mass_critical_sigma() {
                    self.manifest.caveats.push(
                        "whole-space surrogate: uniqueness of the positive minimizer on the truncated domain is assumed"
                            .into(),
                    );
                }
                match ground_state_from_seed(&u0, &params, mass, &cfg) {
                    Ok(gs) => {
                        self.write("ground_state.csv", &field_csv(&gs.profile))?;
                        self.write("ground_state_trace.csv", &trace_csv(&gs.trace))?;
                        self.scalar("gs_mu", gs.mu_value);
                        self.scalar("gs_energy", energy(&gs.profile, &params));
                        self.scalar("gs_mass", mass_norm(&gs.profile));
                        self.scalar("gs_pde_sup", gs.residuals.pde_sup);
                        self.scalar("gs_pohozaev1", gs.residuals.pohozaev1);
                        if let Some(v) = gs.residuals.pohozaev2 {
                            self.scalar("gs_pohozaev2", v);
                        }
                        if let Some(v) = gs.residuals.energy_relation {
                            self.scalar("gs_energy_relation", v);
                        }
                    }
                    Err(nlheat::Error::NotConverged {
                        iterations,
                        residual,
                        trace,
                    }) => {
                        if let Some(run) = trace {
                            self.write("ground_state_trace.csv", &trace_csv(&run.trace))?;
                        }
                        return Err(fail(nlheat::Error::NotConverged {
                            iterations,
                            residual,
                            trace: None,
                        }));
                    }
                    Err(e) => return Err(fail(e)),
                }
            }
            Task::GnConstant => {
                let prof = self.profile.clone().expect("shoot runs first");
                let gn = gn_from_profile(prof, &params).map_err(fail)?;
                self.scalar("c_gn", gn.from_quotient);
                self.scalar("c_gn_pohozaev", gn.from_pohozaev);
                self.scalar("c_gn_relative_gap", gn.relative_gap());
            }
            Task::Classify => self.classify().map_err(|e| match e {
                CliError::Task { source, .. } => fail(source),
                other => other,
            })?,
        }
        Ok(())
    }

    fn record_evolution(&mut self, run: &RunResult, u0: &Field) -> Result<(), CliError> {
        let params = self.config.params;
        self.write("trace.csv", &trace_csv(&run.trace))?;
        self.write("final.csv", &field_csv(&run.final_field))?;
        self.manifest.termination = Some(run.termination.name().to_string());
        let last = *run.last();
        self.scalar("steps", last.step as f64);
        self.scalar("final_t", last.t);
        self.scalar("final_mass", last.mass);
        self.scalar("mass_drift", run.mass_drift());
        self.scalar("final_energy", last.energy);
        self.scalar("final_mu", last.mu);
        self.scalar("final_grad_l2", last.grad_l2);
        self.scalar("max_energy_increase", run.max_energy_increase());
        if let Ok(defect) = check_dissipation(&run.trace, energy(u0, &params)) {
            self.scalar("dissipation_defect", defect);
        }
        if let Ok(defect) = mass_formula_check(run) {
            self.scalar("mass_formula_defect", defect);
        }
        if run.termination == Termination::GrowUpTriggered {
            self.manifest.caveats.push(format!(
                "growth trigger: grad_l2 exceeded {} times its initial value; grow-up and finite-time blow-up are not distinguished",
                self.config.growup_factor
            ));
        }
        Ok(())
    }

    fn classify(&mut self) -> Result<(), CliError> {
        let params = self.config.params;
        let task = Task::Classify.name();
        let fail = |source: nlheat::Error| CliError::Task { task, source };
        let u0 = self.initial()?;
        if self.config.domain.is_whole_space() {
            check_k_regime(&params).map_err(fail)?;
            let prof = self.profile.clone().expect("shoot runs first");
            let qref = GroundState::certify(prof.field, &params.normalized()).map_err(fail)?;
            let th = KThresholds::from_ground_state(&qref, &params).map_err(fail)?;
            let k = classify_with_thresholds(&u0, &params, &th).map_err(fail)?;
            self.label("k_member_initial", k.member.to_string());
            self.scalar("k_energy_product", k.energy_product);
            self.scalar("k_grad_product", k.grad_product);
            self.scalar("k_energy_threshold", th.energy);
            self.scalar("k_grad_threshold", th.grad);
            if let Some(run) = self.evolution.take() {
                let rep = monitor_invariance(&run, &params, Classifier::WholeSpace { thresholds: &th });
                self.record_invariance(&rep);
                self.evolution = Some(run);
            }
        } else {
            let wc = self.wells.clone().expect("sobolev runs first");
            let c = classify_bounded(&u0, &params, &wc, self.config.classify_tol).map_err(fail)?;
            self.label("well_initial", c.label.name());
            self.label("well_initial_small", c.small.to_string());
            self.scalar("well_initial_energy", c.energy);
            self.scalar("well_initial_nehari", c.nehari);
            self.scalar("well_initial_margin", c.margin);
            if let Some(run) = self.evolution.take() {
                let f = classify_bounded(&run.final_field, &params, &wc, self.config.classify_tol).map_err(fail)?;
                self.label("well_final", f.label.name());
                let rep = monitor_invariance(
                    &run,
                    &params,
                    Classifier::Bounded {
                        wc: &wc,
                        tol: self.config.classify_tol,
                    },
                );
                self.record_invariance(&rep);
                self.evolution = Some(run);
            }
        }
        Ok(())
    }

    fn record_invariance(&mut self, rep: &InvarianceReport) {
        match rep {
            InvarianceReport::NotApplicable(why) => {
                self.label("invariance", "not_applicable");
                self.manifest.notes.push(format!("invariance monitor not applicable: {why}"));
            }
            InvarianceReport::Checked(s) => {
                self.label("invariance", "checked");
                self.scalar("invariance_snapshots", s.labels.len() as f64);
                self.scalar("invariance_violations", s.violations as f64);
                self.scalar("invariance_bound_violations", s.bound_violations as f64);
                if let Some(t) = s.first_violation_t {
                    self.scalar("invariance_first_violation_t", t);
                }
            }
        }
    }
}

fn build_initial(config: &ScenarioConfig, grid: &Arc<Grid>, manifest: &mut RunManifest) -> Result<Field, CliError> {
    let ball = matches!(config.domain, DomainSpec::Ball { .. });
    let usage = |m: String| CliError::Usage(m);
    let shaped = |f: Field, mass: f64| -> Result<Field, CliError> {
        let m = mass_norm(&f);
        if m == 0.0 {
            return Err(usage("initial data vanishes on the grid".into()));
        }
        Ok(f.scaled(mass / m))
    };
    let field = |f: &dyn Fn(f64) -> f64| Field::from_fn(Arc::clone(grid), f).map_err(|e| usage(format!("initial data: {e}")));
    match &config.initial {
        InitialData::Eigenfunction { mode, mass } => {
            if ball && *mode != 1 {
                return Err(usage("ball domains support the first eigenfunction only (mode = 1)".into()));
            }
            let f = if *mode == 1 {
                default_seed(grid, 1.0)
            } else {
                Field::new(Arc::clone(grid), grid.dirichlet_mode(*mode)).map_err(|e| usage(e.to_string()))?
            };
            shaped(f, *mass)
        }
        InitialData::Gaussian { center, width, mass } => {
            if ball && *center != 0.0 {
                return Err(usage("gaussian data on a ball must be centred (center = 0)".into()));
            }
            let (c, w) = (*center, *width);
            shaped(field(&|x| (-(x - c) * (x - c) / (2.0 * w * w)).exp())?, *mass)
        }
        InitialData::Soliton { center, mass } => {
            let s = config.params.sigma;
            let c = *center;
            let q = move |x: f64| {
                let sech = 1.0 / (s * (x - c)).cosh();
                ((s + 1.0) * sech * sech).powf(1.0 / (2.0 * s))
            };
            shaped(field(&q)?, *mass)
        }
        InitialData::File { path, mass } => {
            let bytes = fs::read(path).map_err(CliError::io(path))?;
            manifest
                .labels
                .insert("seed_sha256".into(), sha256_hex(&bytes));
            let f = read_field(path, grid)?;
            match mass {
                Some(m) => shaped(f, *m),
                None => Ok(f),
            }
        }
    }
}

/// Run every planned task, writing artifacts and `manifest.txt` into the
/// config's output directory.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunManifest, RunFailure> {
    let dir = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let mut manifest = RunManifest::new(config, dir.clone());
    let early = |manifest: RunManifest, error: CliError| RunFailure { manifest, error };

    if config.tasks.is_empty() {
        return Err(early(manifest, CliError::Usage("no tasks requested".into())));
    }
    if let Err(e) = config.check_tasks() {
        return Err(early(manifest, CliError::Config(e)));
    }
    if let Err(e) = fs::create_dir_all(&dir) {
        return Err(early(manifest, CliError::Io { path: dir, source: e }));
    }
    let grid = match Grid::new(config.domain, config.grid_n) {
        Ok(g) => g,
        Err(e) => {
            let err = CliError::Task { task: "setup", source: e };
            return finish(manifest, &dir, Some((None, err)));
        }
    };
    let (tasks, notes) = plan_tasks(config);
    manifest.notes = notes;

    let mut run = Run {
        config,
        dir: dir.clone(),
        manifest,
        grid,
        initial: None,
        evolution: None,
        wells: None,
        profile: None,
    };
    let mut failure = None;
    for task in tasks {
        run.manifest.tasks_run.push(task);
        if let Err(e) = run.run_task(task) {
            failure = Some((Some(task.name()), e));
            break;
        }
    }
    finish(run.manifest, &dir, failure)
}

fn finish(
    mut manifest: RunManifest,
    dir: &Path,
    failure: Option<(Option<&'static str>, CliError)>,
) -> Result<RunManifest, RunFailure> {
    if let Some((task, e)) = &failure {
        manifest.status = RunStatus::Failed {
            task: *task,
            message: e.to_string(),
            exit_code: e.exit_code(),
        };
    }
    let path = dir.join(MANIFEST_FILE);
    let written = fs::write(&path, manifest.to_text()).map_err(CliError::io(&path));
    match (failure, written) {
        (Some((_, error)), _) => Err(RunFailure { manifest, error }),
        (None, Err(error)) => Err(RunFailure { manifest, error }),
        (None, Ok(())) => Ok(manifest),
    }
}
