//! Job configuration, dispatch and machine-readable reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    int, is_prime, rat_from_str, rat_to_string, DiffVar, ExactError, Matrix, QFrac, QRoot, QVar, Rat, RatFunc, Ring,
    TSeries, UPoly,
};
use crate::experiments::{
    denom_analysis_arith, denom_analysis_q, ratio_report, run_arith, run_qdef, ExperimentError, Route,
};
use crate::opalg::{NormalOp, TorusCoeff, VAR_A, VAR_B, VAR_LAMBDA, VAR_Q};
use crate::oplang::{elaborate_diff, elaborate_q, elaborate_torus, parse, Dialect, OpLangError};
use crate::repmat::{
    check_rnr1, lemma_suite, rho_p_symbolic, verify_det_thm22, verify_q_det, verify_q_trace, verify_trace_thm21,
    Mode, RepError, Status, VerifyReport,
};
use crate::shiftcalc::w_poly;
use crate::solver::{
    bn_factorization_check, q_solutions_and_w, solve_monodromy, split_operator, w_via_r_exp, w_via_shift_exp,
    MonodromyPoly, SolverError, SplitOperator,
};
use crate::torus::{
    at_q_one, comp_inverse, example61, g_series, theorem61_operator, verify_determinant_formula, verify_theorem61,
    TorusError, TorusReport,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("operator `{src}`: {err}")]
    Parse { src: String, err: OpLangError },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl JobError {
    /// Exit code: `2` for configuration and parse errors, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Config(_) | JobError::Parse { .. } => 2,
            JobError::Experiment(ExperimentError::Parse(_) | ExperimentError::TooSmall(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    Diff,
    Qdiff,
    Torus,
    ExperimentArith,
    ExperimentQ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Symbolic,
    Random,
    Auto,
}

/// `"auto"` or a fixed half-width of the `x`-window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XWindow {
    Fixed(usize),
    Named(String),
}

/// One job, read from a TOML file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub kind: JobKind,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    /// Factors `D_1..D_N` of the trace check.
    #[serde(rename = "D", default, skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<String>,
    #[serde(rename = "L", default = "default_l")]
    pub l: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_window: Option<XWindow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<u64>,
    #[serde(default = "default_mode")]
    pub mode: ModeName,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Largest dimension handled symbolically in `auto` mode.
    #[serde(default = "default_cap")]
    pub symbolic_cap: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Parameters of the two-parameter torus family, as `"a/b"` strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    /// Prime and window for the ratio analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_window: Option<[u32; 2]>,
    #[serde(default = "default_digits")]
    pub digits: usize,
}

fn default_l() -> u32 {
    1
}
fn default_mode() -> ModeName {
    ModeName::Symbolic
}
fn default_trials() -> usize {
    20
}
fn default_cap() -> u64 {
    7
}
fn default_digits() -> usize {
    8
}

impl JobConfig {
    pub fn new(kind: JobKind) -> Self {
        JobConfig {
            kind,
            p: None,
            q: None,
            d: Vec::new(),
            l: 1,
            t_order: None,
            x_window: None,
            primes: Vec::new(),
            levels: Vec::new(),
            mode: ModeName::Symbolic,
            trials: default_trials(),
            seed: 0,
            symbolic_cap: default_cap(),
            depth: None,
            a: None,
            b: None,
            max_n: None,
            max_k: None,
            route: None,
            ratio_p: None,
            ratio_window: None,
            digits: default_digits(),
        }
    }

    pub fn from_toml(src: &str) -> Result<Self, JobError> {
        let cfg: JobConfig = toml::from_str(src).map_err(|e| JobError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), JobError> {
        if self.l == 0 {
            return Err(JobError::Config("L must be at least 1".into()));
        }
        if self.t_order == Some(0) {
            return Err(JobError::Config("t_order must be at least 1".into()));
        }
        if let Some(p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(JobError::Config(format!("{p} is not prime")));
        }
        if let Some(n) = self.levels.iter().find(|&&n| n < 1) {
            return Err(JobError::Config(format!("level {n} must be positive")));
        }
        if let Some(XWindow::Named(s)) = &self.x_window {
            if s != "auto" {
                return Err(JobError::Config(format!("x_window must be \"auto\" or an integer, got {s:?}")));
            }
        }
        for s in [&self.a, &self.b].into_iter().flatten() {
            rat_from_str(s).map_err(|e| JobError::Config(format!("parameter {s:?}: {e}")))?;
        }
        Ok(())
    }

    fn mode(&self) -> Mode {
        match self.mode {
            ModeName::Symbolic => Mode::Symbolic,
            ModeName::Random => Mode::Random { trials: self.trials, seed: self.seed },
            ModeName::Auto => Mode::Auto { cap: self.symbolic_cap, trials: self.trials, seed: self.seed },
        }
    }

    fn u_order(&self) -> usize {
        self.t_order.unwrap_or(3) * self.l as usize
    }

    fn operator_src(&self) -> Result<String, JobError> {
        let p = self.p.as_deref().ok_or_else(|| JobError::Config("missing P".into()))?;
        Ok(match &self.q {
            Some(q) => format!("({p}) + ({q})"),
            None => p.to_string(),
        })
    }
}

/// Which part of a job to run; `All` runs everything the kind supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    All,
    VerifyTrace,
    VerifyDet,
    Monodromy,
    QVerify,
    QMonodromy,
    Torus,
    ExperimentArith,
    ExperimentQ,
}

impl Task {
    fn kind(self) -> Option<JobKind> {
        match self {
            Task::All | Task::VerifyTrace => None,
            Task::VerifyDet | Task::Monodromy => Some(JobKind::Diff),
            Task::QVerify | Task::QMonodromy => Some(JobKind::Qdiff),
            Task::Torus => Some(JobKind::Torus),
            Task::ExperimentArith => Some(JobKind::ExperimentArith),
            Task::ExperimentQ => Some(JobKind::ExperimentQ),
        }
    }
}

/// One compared value.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Record {
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub expected: String,
    pub computed: String,
    #[serde(rename = "match")]
    pub matched: bool,
    pub anchor: String,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: &str, expected: impl Into<String>, computed: impl Into<String>) -> Self {
        let (expected, computed) = (expected.into(), computed.into());
        Record { name: name.into(), inputs: BTreeMap::new(), matched: expected == computed, expected, computed, anchor: anchor.into() }
    }

    pub fn flag(name: impl Into<String>, anchor: &str, ok: bool) -> Self {
        Self::new(name, anchor, "true", ok.to_string())
    }

    pub fn input(mut self, k: &str, v: impl ToString) -> Self {
        self.inputs.insert(k.into(), v.to_string());
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Threshold {
    pub check: String,
    pub threshold: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub engine_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub job: Option<JobConfig>,
    pub seed: u64,
    pub records: Vec<Record>,
    pub thresholds: Vec<Threshold>,
    /// Full per-check data.
    pub details: BTreeMap<String, serde_json::Value>,
    pub warnings: Vec<String>,
    /// Milliseconds per stage; only filled in verbose runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, u64>>,
    pub ok: bool,
}

impl Report {
    fn new(job: Option<JobConfig>, seed: u64, verbose: bool) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            engine_version: env!("CARGO_PKG_VERSION").into(),
            job,
            seed,
            records: Vec::new(),
            thresholds: Vec::new(),
            details: BTreeMap::new(),
            warnings: Vec::new(),
            timings: verbose.then(BTreeMap::new),
            ok: true,
        }
    }

    fn push(&mut self, r: Record) {
        self.ok &= r.matched;
        self.records.push(r);
    }

    fn detail(&mut self, key: &str, v: &impl Serialize) {
        let v = serde_json::to_value(v).expect("report data serializes");
        self.details.insert(key.into(), v);
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        if let Some(t) = self.timings.as_mut() {
            t.insert(stage.into(), start.elapsed().as_millis() as u64);
        }
        out
    }

    fn add_verify(&mut self, key: &str, anchor: &str, v: &VerifyReport) {
        for c in &v.cases {
            let computed = match (c.status, c.first_mismatch) {
                (Status::Fail | Status::BelowThreshold, Some(m)) => format!("{} at u^{m}", status_name(c.status)),
                (s, _) => status_name(s).to_string(),
            };
            let expected = match c.status {
                Status::BelowThreshold | Status::Skipped | Status::OutOfRange => computed.clone(),
                _ => "pass".into(),
            };
            self.push(
                Record::new(format!("{} [{}]", v.check, c.level), anchor, expected, computed)
                    .input("level", c.level)
                    .input("mode", &c.mode),
            );
        }
        self.push(Record::flag(format!("{} (at least one pass)", v.check), anchor, v.ok));
        self.thresholds.push(Threshold { check: v.check.clone(), threshold: v.threshold });
        self.detail(key, v);
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::BelowThreshold => "below threshold",
        Status::Skipped => "skipped",
        Status::OutOfRange => "out of range",
    }
}

/// Coefficient array of a truncated series, as strings.
pub fn series_strings<K: Ring>(s: &TSeries<K>, f: impl Fn(&K) -> String) -> Vec<String> {
    let n = s.order().unwrap_or(s.coeffs().len());
    (0..n).map(|i| f(&s.coeff(i))).collect()
}

fn w_strings<K: Ring>(w: &MonodromyPoly<K>, f: impl Fn(&K) -> String + Copy) -> Vec<Vec<String>> {
    w.coeffs()
        .iter()
        .map(|c| {
            let mut v = series_strings(c, f);
            while v.last().is_some_and(|x| x == "0") {
                v.pop();
            }
            v
        })
        .collect()
}

/// Human-readable Laurent polynomial in `q, a, b, lambda`.
pub fn torus_coeff_string(c: &TorusCoeff) -> String {
    if c.is_zero() {
        return "0".into();
    }
    let names = [(VAR_Q, "q"), (VAR_A, "a"), (VAR_B, "b"), (VAR_LAMBDA, "lambda")];
    let parts: Vec<String> = c
        .terms()
        .map(|(e, k)| {
            let mut s = rat_to_string(k);
            for &(v, name) in &names {
                match e[v] {
                    0 => {}
                    1 => s.push_str(&format!("*{name}")),
                    m => s.push_str(&format!("*{name}^{m}")),
                }
            }
            s
        })
        .collect();
    parts.join(" + ")
}

fn parse_err(src: &str) -> impl Fn(OpLangError) -> JobError + '_ {
    move |err| JobError::Parse { src: src.into(), err }
}

fn diff_operator(src: &str, l: u32, order: usize) -> Result<SplitOperator<DiffVar>, JobError> {
    let d = elaborate_diff(&parse(src, Dialect::Diff, l).map_err(parse_err(src))?, l).map_err(parse_err(src))?;
    Ok(split_operator(&d, order)?.0)
}

fn q_operator(src: &str, l: u32, order: usize) -> Result<SplitOperator<QVar>, JobError> {
    let d = elaborate_q(&parse(src, Dialect::QDiff, l).map_err(parse_err(src))?, l).map_err(parse_err(src))?;
    Ok(split_operator(&d, order)?.0)
}

fn diff_factor(src: &str) -> Result<NormalOp<DiffVar>, JobError> {
    let d = elaborate_diff(&parse(src, Dialect::Diff, 1).map_err(parse_err(src))?, 1).map_err(parse_err(src))?;
    Ok(d.coeff(0))
}

fn q_factor(src: &str) -> Result<NormalOp<QVar>, JobError> {
    let d = elaborate_q(&parse(src, Dialect::QDiff, 1).map_err(parse_err(src))?, 1).map_err(parse_err(src))?;
    Ok(d.coeff(0))
}

/// Runs a job; the seed override replaces the configured seed.
pub fn run_job(cfg: &JobConfig, task: Task, seed: Option<u64>, verbose: bool) -> Result<Report, JobError> {
    let mut cfg = cfg.clone();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if let Some(k) = task.kind() {
        if k != cfg.kind {
            return Err(JobError::Config(format!("subcommand needs kind {k:?}, config has {:?}", cfg.kind)));
        }
    }
    let mut rep = Report::new(Some(cfg.clone()), cfg.seed, verbose);
    match cfg.kind {
        JobKind::Diff => run_diff(&cfg, task, &mut rep)?,
        JobKind::Qdiff => run_qdiff(&cfg, task, &mut rep)?,
        JobKind::Torus => run_torus(&cfg, &mut rep)?,
        JobKind::ExperimentArith => run_experiment_arith(&cfg, &mut rep)?,
        JobKind::ExperimentQ => run_experiment_q(&cfg, &mut rep)?,
    }
    Ok(rep)
}

fn run_diff(cfg: &JobConfig, task: Task, rep: &mut Report) -> Result<(), JobError> {
    let all = task == Task::All;
    if task == Task::VerifyTrace || (all && !cfg.d.is_empty()) {
        let p = cfg.p.as_deref().ok_or_else(|| JobError::Config("missing P".into()))?;
        let roots = diff_operator(p, 1, 1)?.roots;
        let factors = if cfg.d.is_empty() { cfg.q.iter().cloned().collect() } else { cfg.d.clone() };
        let ds: Vec<NormalOp<DiffVar>> = factors.iter().map(|s| diff_factor(s)).collect::<Result<_, _>>()?;
        let v = rep.time("trace", |_| verify_trace_thm21(&roots, &ds, &cfg.primes, &cfg.mode()));
        rep.add_verify("trace", "trace-formula", &v);
    }
    if task == Task::VerifyTrace {
        return Ok(());
    }
    let op = diff_operator(&cfg.operator_src()?, cfg.l, cfg.u_order())?;
    if all || task == Task::Monodromy {
        let (a, b) = rep.time("monodromy", |_| -> Result<_, JobError> {
            Ok((solve_monodromy(&op)?.w, w_via_shift_exp(&op)?))
        })?;
        let (sa, sb) = (w_strings(&a, rat_to_string), w_strings(&b, rat_to_string));
        rep.push(
            Record::new("monodromy polynomial (solver vs shift-exp)", "monodromy-dual-route", format!("{sb:?}"), format!("{sa:?}"))
                .input("u_order", cfg.u_order()),
        );
        rep.detail("monodromy_w", &sa);
        if let Some(w) = &cfg.x_window {
            let window = match w {
                XWindow::Fixed(n) => *n,
                XWindow::Named(_) => op.roots.len() + 2,
            };
            let bn = rep.time("window", |_| bn_factorization_check(&op, window))?;
            rep.push(Record::flag("window determinant factorization", "window-determinant", bn.ok).input("window", window));
        }
    }
    if (all || task == Task::VerifyDet) && !cfg.primes.is_empty() {
        let v = rep.time("det", |_| verify_det_thm22(&op, &cfg.primes, &cfg.mode()))?;
        rep.add_verify("det", "det-closed-form", &v);
    }
    Ok(())
}

fn run_qdiff(cfg: &JobConfig, task: Task, rep: &mut Report) -> Result<(), JobError> {
    let all = task == Task::All;
    let levels = &cfg.levels;
    if task == Task::VerifyTrace || ((all || task == Task::QVerify) && !cfg.d.is_empty()) {
        let p = cfg.p.as_deref().ok_or_else(|| JobError::Config("missing P".into()))?;
        let roots = q_operator(p, 1, 1)?.roots;
        let factors = if cfg.d.is_empty() { cfg.q.iter().cloned().collect() } else { cfg.d.clone() };
        let ds: Vec<NormalOp<QVar>> = factors.iter().map(|s| q_factor(s)).collect::<Result<_, _>>()?;
        let v = rep.time("q trace", |_| verify_q_trace(&roots, &ds, levels, &cfg.mode()));
        rep.add_verify("q_trace", "q-trace-formula", &v);
    }
    if task == Task::VerifyTrace {
        return Ok(());
    }
    let op = q_operator(&cfg.operator_src()?, cfg.l, cfg.u_order())?;
    if all || task == Task::QMonodromy {
        let (m, (w, _)) = rep.time("q monodromy", |_| -> Result<_, JobError> {
            Ok((q_solutions_and_w(&op)?, w_via_r_exp(&op)?))
        })?;
        let (sa, sb) = (w_strings(&m.w, QFrac::to_string), w_strings(&w, QFrac::to_string));
        rep.push(
            Record::new("q monodromy polynomial (solver vs R-exp)", "q-monodromy-dual-route", format!("{sb:?}"), format!("{sa:?}"))
                .input("u_order", cfg.u_order()),
        );
        rep.detail("q_monodromy_w", &sa);
    }
    if (all || task == Task::QVerify) && !levels.is_empty() {
        let v = rep.time("q det", |_| verify_q_det(&op, levels, &cfg.mode()))?;
        rep.add_verify("q_det", "q-det-closed-form", &v);
    }
    Ok(())
}

fn torus_records(rep: &mut Report, r: &TorusReport) {
    for l in &r.levels {
        let computed = match l.first_mismatch {
            Some(m) if !l.ok => format!("mismatch at lambda^(n-{m})"),
            _ if !l.ok => "boundary mismatch".into(),
            _ => "pass".into(),
        };
        rep.push(
            Record::new(format!("torus determinant [{}]", l.n), "torus-det-formula", "pass", computed)
                .input("depth", l.depth)
                .input("operator", &r.operator),
        );
    }
    rep.detail("torus", r);
}

fn run_torus(cfg: &JobConfig, rep: &mut Report) -> Result<(), JobError> {
    let levels: Vec<usize> = if cfg.levels.is_empty() { vec![1, 2, 3] } else { cfg.levels.iter().map(|&n| n as usize).collect() };
    let parse_param = |s: &Option<String>| s.as_deref().map(rat_from_str).transpose();
    let r = rep.time("torus", |_| -> Result<_, JobError> {
        Ok(match &cfg.p {
            Some(src) => {
                let d = elaborate_torus(&parse(src, Dialect::Torus, 1).map_err(parse_err(src))?)
                    .map_err(parse_err(src))?;
                if d == theorem61_operator() {
                    verify_theorem61(&levels, cfg.depth)?
                } else {
                    verify_determinant_formula(&d, &[], &levels, cfg.depth, None)?
                }
            }
            None if cfg.a.is_some() || cfg.b.is_some() => {
                example61(parse_param(&cfg.a)?, parse_param(&cfg.b)?, &levels, cfg.depth)?
            }
            None => verify_theorem61(&levels, cfg.depth)?,
        })
    })?;
    torus_records(rep, &r);
    Ok(())
}

fn run_experiment_arith(cfg: &JobConfig, rep: &mut Report) -> Result<(), JobError> {
    let max_n = cfg.max_n.unwrap_or(60);
    let route = cfg.route.unwrap_or(Route::Solver);
    let r = rep.time("coefficients", |_| run_arith(max_n, route))?;
    let golden = [(2, "-1/4"), (3, "-1/24"), (4, "-101/576")];
    rep.push(Record::new("c_1", "arith-series", "0", rat_to_string(r.c(1).expect("computed"))));
    for (n, v) in golden {
        rep.push(Record::new(format!("c_{n}"), "arith-series", v, rat_to_string(r.c(n).expect("computed"))));
    }
    let d = denom_analysis_arith(&r, max_n)?;
    rep.push(Record::new("denominator law mismatches", "arith-denominators", "0", d.mismatches.len().to_string()));
    rep.push(Record::new("non-smooth denominators", "arith-denominators", "0", d.flagged.len().to_string()));
    rep.warnings.extend(d.warnings.iter().cloned());
    let coeffs: BTreeMap<String, String> = r.coeffs.iter().map(|(n, c)| (format!("c_{n}"), c.clone())).collect();
    rep.detail("coefficients", &coeffs);
    rep.detail("denominators", &d);
    if let Some(p) = cfg.ratio_p {
        let [lo, hi] = cfg.ratio_window.unwrap_or([p as u32 + 1, max_n - 1]);
        let rr = ratio_report(&r, p, lo..=hi, cfg.digits)?;
        rep.push(Record::flag("ratio digit prefix >= 3", "ratio-stability", rr.common_prefix >= 3).input("p", p));
        rep.push(Record::flag("ratio matches g(p) in >= 3 digits", "ratio-stability", rr.g_prefix >= 3).input("p", p));
        rep.warnings.extend(rr.warnings.iter().cloned());
        rep.detail("ratio", &rr);
    }
    Ok(())
}

fn run_experiment_q(cfg: &JobConfig, rep: &mut Report) -> Result<(), JobError> {
    let max_k = cfg.max_k.unwrap_or(8);
    let r = rep.time("q coefficients", |_| run_qdef(max_k))?;
    let arith = rep.time("coefficients", |_| run_arith(max_k.max(4), Route::Solver))?;
    rep.push(Record::new("C_1", "q-series", "0", r.c(1).expect("computed").to_string()));
    let d = denom_analysis_q(&r, Some(&arith));
    for row in &d.rows {
        if row.k >= 2 {
            rep.push(Record::new(
                format!("C_{} denominator", row.k),
                "q-denominators",
                format!("{:?}", row.predicted),
                format!("{:?}", row.observed),
            ));
        }
        if let Some(ok) = row.q1_ok {
            rep.push(
                Record::new(
                    format!("C_{}/(q-1)^2 at q=1", row.k),
                    "q-to-one",
                    row.c_k.clone().unwrap_or_default(),
                    row.at_one.clone().unwrap_or_else(|| "pole".into()),
                )
                .input("ok", ok),
            );
        }
    }
    let coeffs: BTreeMap<String, String> = r.coeffs.iter().map(|(k, c)| (format!("C_{k}"), c.clone())).collect();
    rep.detail("coefficients", &coeffs);
    rep.detail("denominators", &d);
    Ok(())
}

/// Built-in identity corpus.
pub fn selftest(verbose: bool) -> Report {
    let mut rep = Report::new(None, 0, verbose);
    rep.time("lemma", |rep| {
        for p in [3u64, 5, 7] {
            match lemma_suite(p) {
                Ok(l) => {
                    rep.push(Record::flag(format!("det(theta - lambda) identity, p={p}"), "theta-det", l.det_identity));
                    rep.push(Record::flag(format!("zero traces, p={p}"), "zero-traces", l.zero_traces));
                    rep.push(Record::flag(format!("pole traces, p={p}"), "pole-traces", l.pole_traces));
                }
                Err(e) => rep.push(Record::new(format!("lemma suite, p={p}"), "theta-det", "ok", e.to_string())),
            }
        }
    });
    rep.time("rnr1", |rep| {
        let f = RatFunc::<QVar>::inv_roots(&[QRoot::Pow(0), QRoot::Pow(0), QRoot::Pow(1)])
            .add(&RatFunc::constant(QFrac::from_i64(3)).mul(&RatFunc::var()));
        for n in 2..=6 {
            let ok = check_rnr1(&f, n).unwrap_or(false);
            rep.push(Record::flag(format!("root-of-unity pole collapse, n={n}"), "rn-identity", ok));
        }
    });
    rep.time("w table", |rep| {
        for (j, want) in w_table().into_iter().enumerate() {
            let got = w_poly(j as u32 + 1);
            rep.push(Record::new(format!("W_{}", j + 1), "w-table", fmt_w(&want), fmt_w(&got)));
        }
    });
    rep.time("weyl", |rep| {
        let theta = NormalOp::from_func(RatFunc::<DiffVar>::var());
        let x = NormalOp::<DiffVar>::x_pow(1);
        let lhs = theta.mul(&x);
        let rhs = x.mul(&theta).add(&x);
        rep.push(Record::flag("theta x = x (theta + 1)", "weyl", lhs == rhs));
        let ok = rho_p_symbolic(5).is_ok_and(|r| {
            let comm = r.dx().mul(r.x()).sub(&r.x().mul(r.dx()));
            comm == Matrix::identity(5)
        });
        rep.push(Record::flag("[d, x] = 1 in the p-dimensional representation, p=5", "weyl", ok));
    });
    rep.time("torus", |rep| {
        let Ok(g) = g_series(&theorem61_operator(), 12) else {
            rep.push(Record::flag("G series", "torus-g", false));
            return;
        };
        let q = |terms: &[(i32, i64)]| TorusCoeff::from_terms(terms.iter().map(|&(e, c)| ([e, 0, 0, 0], int(c))));
        for (e, want) in [(-2, q(&[(-1, 1), (0, 1)])), (-5, q(&[(-3, -1), (-2, -3), (-1, -5), (0, -3), (1, -1)]))] {
            rep.push(Record::new(
                format!("G_q coefficient of lambda^{e}"),
                "torus-g",
                torus_coeff_string(&want),
                torus_coeff_string(&g.coeff_of(e)),
            ));
        }
        match comp_inverse(&at_q_one(&g)) {
            Ok(f) => {
                for (e, c) in [(1, 1), (-2, -2), (-5, 5), (-8, -32), (-11, 286)] {
                    rep.push(Record::new(
                        format!("F coefficient of u^{e}"),
                        "torus-f",
                        c.to_string(),
                        torus_coeff_string(&f.coeff_of(e)),
                    ));
                }
            }
            Err(e) => rep.push(Record::new("F series", "torus-f", "ok", e.to_string())),
        }
    });
    rep
}

/// `W_1..W_4` with coefficients polynomial in `n`, ascending in both variables.
fn w_table() -> Vec<UPoly<UPoly<Rat>>> {
    let p = |c: &[(i64, i64)]| UPoly::new(c.iter().map(|&(a, b)| Rat::new(a.into(), b.into())).collect());
    vec![
        UPoly::new(vec![p(&[(1, 1)])]),
        UPoly::new(vec![p(&[(1, 1)]), p(&[(-1, 1), (1, 1)])]),
        // (n-1)(n+4)/2, (n-1)(n-2)/2
        UPoly::new(vec![p(&[(1, 1)]), p(&[(-2, 1), (3, 2), (1, 2)]), p(&[(1, 1), (-3, 2), (1, 2)])]),
        // (n-1)(n^2+7n+18)/6, (n-1)(2n^2+2n-9)/3, (n-1)(n-2)(n-3)/6
        UPoly::new(vec![
            p(&[(1, 1)]),
            p(&[(-3, 1), (11, 6), (1, 1), (1, 6)]),
            p(&[(3, 1), (-11, 3), (0, 1), (2, 3)]),
            p(&[(-1, 1), (11, 6), (-1, 1), (1, 6)]),
        ]),
    ]
}

fn fmt_w(w: &UPoly<UPoly<Rat>>) -> String {
    let rows: Vec<Vec<String>> = w.coeffs().iter().map(|c| c.coeffs().iter().map(rat_to_string).collect()).collect();
    format!("{rows:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip_and_errors() {
        let cfg = JobConfig::from_toml("kind = \"diff\"\nP = \"theta\"\nQ = \"t*3\"\nprimes = [5, 7]\nt_order = 3\n").unwrap();
        assert_eq!(cfg.kind, JobKind::Diff);
        assert_eq!(cfg.primes, vec![5, 7]);
        let back = JobConfig::from_toml(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back.p, cfg.p);
        assert!(matches!(JobConfig::from_toml("kind = \"diff\"\nprimes = [4]\n"), Err(JobError::Config(_))));
        assert!(matches!(JobConfig::from_toml("kind = \"nope\"\n"), Err(JobError::Config(_))));
        assert!(matches!(JobConfig::from_toml("kind = \"diff\"\nx_window = \"wide\"\n"), Err(JobError::Config(_))));
        assert!(JobConfig::from_toml("kind = \"diff\"\nx_window = \"auto\"\n").is_ok());
        assert!(JobConfig::from_toml("kind = \"diff\"\nx_window = 3\n").is_ok());
    }

    #[test]
    fn diff_job_matches() {
        let cfg = JobConfig::from_toml("kind = \"diff\"\nP = \"theta\"\nQ = \"t*3\"\nprimes = [5, 7]\nt_order = 3\n").unwrap();
        let rep = run_job(&cfg, Task::All, None, false).unwrap();
        assert!(rep.ok, "{}", rep.to_json());
        assert_eq!(rep.exit_code(), 0);
        assert!(rep.records.iter().any(|r| r.name.starts_with("det")));
        assert_eq!(rep.to_json(), run_job(&cfg, Task::All, None, false).unwrap().to_json());
    }

    #[test]
    fn parse_error_exit_code() {
        let mut cfg = JobConfig::new(JobKind::Diff);
        cfg.p = Some("theta + (".into());
        let err = run_job(&cfg, Task::All, None, false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("offset"), "{err}");
    }

    #[test]
    fn experiment_job_reports_c4() {
        let mut cfg = JobConfig::new(JobKind::ExperimentArith);
        cfg.max_n = Some(6);
        let rep = run_job(&cfg, Task::All, None, false).unwrap();
        assert!(rep.ok, "{}", rep.to_json());
        assert!(rep.to_json().contains("\"c_4\": \"-101/576\""));
    }

    #[test]
    fn subcommand_kind_mismatch() {
        let cfg = JobConfig::new(JobKind::Torus);
        assert!(matches!(run_job(&cfg, Task::Monodromy, None, false), Err(JobError::Config(_))));
    }

    #[test]
    fn selftest_passes() {
        let r = selftest(false);
        assert!(r.ok, "{}", r.to_json());
        assert!(r.timings.is_none());
        assert!(r.records.len() >= 20);
    }

    #[test]
    fn w_table_literal() {
        for (j, w) in w_table().into_iter().enumerate() {
            assert_eq!(w_poly(j as u32 + 1), w);
        }
    }
}
