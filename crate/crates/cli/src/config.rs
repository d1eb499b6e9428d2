//! Run configuration: flat INI-like sections with typed values, one level
//! deep, hand-editable and diff-able. Parsing validates everything it can
//! and reports every violation, not just the first; unknown keys and
//! sections are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Which elliptic operator the run solves.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSpec {
    PucciPlus,
    PucciMinus,
    LinearTrace { matrix: Vec<f64> },
    SmoothBellman { matrices: Vec<Vec<f64>>, theta: f64 },
}

/// Boundary data: a catalog member with parameters, or a grid dump file.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySpec {
    /// `a·x + b`: params `[a0, (a1,) b]`.
    Linear(Vec<f64>),
    /// Caloric member: params `[qxx, (qxy, qyy,) a0, (a1,) b]`; the time
    /// slope is derived from the run's operator.
    Caloric(Vec<f64>),
    /// Degenerate profile: params `[c, offset]`; γ comes from the equation.
    DegenerateProfile(Vec<f64>),
    File(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquationBlock {
    pub gamma: f64,
    pub epsilon: Option<f64>,
    pub cascade: Option<Vec<f64>>,
    pub theta_schedule: Option<Vec<f64>>,
    pub operator: OperatorSpec,
    pub lambda: f64,
    pub big_lambda: f64,
    /// Constant source value; zero means no source term.
    pub source: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainBlock {
    pub dim: usize,
    pub extent_x: (f64, f64),
    pub extent_y: (f64, f64),
    pub h: f64,
    pub t0: f64,
    pub t_final: f64,
    /// Stored steps; `None` means auto (derived from the default slice count).
    pub steps: Option<usize>,
    pub mask: Option<(f64, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeBlock {
    pub stencil: String,
    pub gradient: String,
    pub cfl_safety: f64,
    pub max_grad_guess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChecksBlock {
    pub max_principle: bool,
    pub gradient_max: bool,
    pub compatibility: bool,
    pub operator_sandwich: bool,
    pub tolerance: f64,
    pub gradient_tol_coef: f64,
    pub compat_tol: f64,
    // regularity measurement
    pub fit_center: (f64, f64),
    pub fit_r0: f64,
    pub fit_radii: usize,
    pub time_base_lag: f64,
    pub time_lags: usize,
    pub edge_anchor: Option<(f64, f64)>,
    // dichotomy
    pub dichotomy: bool,
    pub tau: f64,
    pub delta: f64,
    pub l: f64,
    pub mu: f64,
    pub eps0: f64,
    pub eps1_fraction: f64,
    pub eta: f64,
    pub directions: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputBlock {
    pub dir: String,
    pub grid_dumps: bool,
    pub csv: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub equation: EquationBlock,
    pub domain: DomainBlock,
    pub scheme: SchemeBlock,
    pub boundary: BoundarySpec,
    pub checks: ChecksBlock,
    pub output: OutputBlock,
}

pub fn default_config() -> RunConfig {
    RunConfig {
        equation: EquationBlock {
            gamma: 0.0,
            epsilon: Some(0.0),
            cascade: None,
            theta_schedule: None,
            operator: OperatorSpec::LinearTrace { matrix: vec![1.0] },
            lambda: 1.0,
            big_lambda: 1.0,
            source: 0.0,
        },
        domain: DomainBlock {
            dim: 1,
            extent_x: (-1.0, 1.0),
            extent_y: (-1.0, 1.0),
            h: 0.0625,
            t0: -1.0,
            t_final: 0.0,
            steps: None,
            mask: None,
        },
        scheme: SchemeBlock {
            stencil: "wide".into(),
            gradient: "centered".into(),
            cfl_safety: 0.9,
            max_grad_guess: 1.0,
        },
        boundary: BoundarySpec::Linear(vec![0.0, 0.0]),
        checks: ChecksBlock {
            max_principle: false,
            gradient_max: false,
            compatibility: true,
            operator_sandwich: false,
            tolerance: 1e-12,
            gradient_tol_coef: 1.0,
            compat_tol: 1e-8,
            fit_center: (0.0, 0.0),
            fit_r0: 0.4,
            fit_radii: 6,
            time_base_lag: 0.12,
            time_lags: 5,
            edge_anchor: None,
            dichotomy: false,
            tau: 0.25,
            delta: 0.1,
            l: 0.995,
            mu: 0.01,
            eps0: 0.1,
            eps1_fraction: 0.01,
            eta: 0.05,
            directions: 16,
        },
        output: OutputBlock { dir: "out".into(), grid_dumps: false, csv: true },
    }
}

struct Raw {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn parse_raw(text: &str, errors: &mut Vec<String>) -> Raw {
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                errors.push(format!("line {}: duplicate section [{name}]", lineno + 1));
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected `key = value`, got {line:?}", lineno + 1));
            continue;
        };
        let Some(section) = &current else {
            errors.push(format!("line {}: key outside any [section]", lineno + 1));
            continue;
        };
        let section_map = sections.get_mut(section).expect("created above");
        let key = key.trim().to_string();
        if section_map.contains_key(&key) {
            errors.push(format!("line {}: duplicate key {key:?} in [{section}]", lineno + 1));
        }
        section_map.insert(key, value.trim().to_string());
    }
    Raw { sections }
}

struct Section<'a> {
    name: &'a str,
    map: BTreeMap<String, String>,
    errors: &'a mut Vec<String>,
}

impl<'a> Section<'a> {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn f64(&mut self, key: &str, default: f64) -> f64 {
        match self.take(key) {
            None => default,
            Some(v) => v.parse().unwrap_or_else(|_| {
                self.errors.push(format!("[{}] {key}: not a number: {v:?}", self.name));
                default
            }),
        }
    }

    fn f64_list(&mut self, key: &str) -> Option<Vec<f64>> {
        let v = self.take(key)?;
        let mut out = Vec::new();
        for tok in v.split_whitespace() {
            match tok.parse() {
                Ok(x) => out.push(x),
                Err(_) => {
                    self.errors.push(format!("[{}] {key}: bad number {tok:?}", self.name));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn usize(&mut self, key: &str, default: usize) -> usize {
        match self.take(key) {
            None => default,
            Some(v) => v.parse().unwrap_or_else(|_| {
                self.errors.push(format!("[{}] {key}: not an integer: {v:?}", self.name));
                default
            }),
        }
    }

    fn bool(&mut self, key: &str, default: bool) -> bool {
        match self.take(key) {
            None => default,
            Some(v) => match v.as_str() {
                "true" | "yes" | "on" => true,
                "false" | "no" | "off" => false,
                other => {
                    self.errors.push(format!("[{}] {key}: not a boolean: {other:?}", self.name));
                    default
                }
            },
        }
    }

    fn finish(self) {
        for key in self.map.keys() {
            self.errors.push(format!("[{}] unknown key {key:?}", self.name));
        }
    }
}

/// Parse and validate a configuration, reporting every violation found.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<String>> {
    let mut errors = Vec::new();
    let mut raw = parse_raw(text, &mut errors);
    let mut cfg = default_config();

    let known = ["equation", "domain", "scheme", "boundary", "checks", "output"];
    let present: Vec<String> = raw.sections.keys().cloned().collect();
    for name in &present {
        if !known.contains(&name.as_str()) {
            errors.push(format!("unknown section [{name}]"));
        }
    }

    if let Some(map) = raw.sections.remove("equation") {
        let mut s = Section { name: "equation", map, errors: &mut errors };
        cfg.equation.gamma = s.f64("gamma", cfg.equation.gamma);
        cfg.equation.epsilon = s.take("epsilon").map(|v| {
            v.parse().unwrap_or_else(|_| {
                s.errors.push(format!("[equation] epsilon: not a number: {v:?}"));
                0.0
            })
        });
        cfg.equation.cascade = s.f64_list("cascade");
        cfg.equation.theta_schedule = s.f64_list("theta_schedule");
        cfg.equation.lambda = s.f64("lambda", cfg.equation.lambda);
        cfg.equation.big_lambda = s.f64("Lambda", cfg.equation.big_lambda);
        cfg.equation.source = s.f64("f", 0.0);
        let kind = s.take("operator").unwrap_or_else(|| "linear_trace".into());
        let matrices = s.take("matrices");
        let theta = s.f64("theta", 0.1);
        cfg.equation.operator = match kind.as_str() {
            "pucci_plus" => OperatorSpec::PucciPlus,
            "pucci_minus" => OperatorSpec::PucciMinus,
            "linear_trace" => {
                let matrix = parse_matrix_list(matrices.as_deref().unwrap_or("1"), &mut s)
                    .into_iter()
                    .next()
                    .unwrap_or_else(|| vec![1.0]);
                OperatorSpec::LinearTrace { matrix }
            }
            "smooth_bellman" => {
                let mats = parse_matrix_list(matrices.as_deref().unwrap_or("1"), &mut s);
                OperatorSpec::SmoothBellman { matrices: mats, theta }
            }
            other => {
                s.errors.push(format!("[equation] operator: unknown kind {other:?}"));
                OperatorSpec::LinearTrace { matrix: vec![1.0] }
            }
        };
        s.finish();
    }

    if let Some(map) = raw.sections.remove("domain") {
        let mut s = Section { name: "domain", map, errors: &mut errors };
        cfg.domain.dim = s.usize("dim", 1);
        if let Some(e) = s.f64_list("extent_x") {
            if e.len() == 2 {
                cfg.domain.extent_x = (e[0], e[1]);
            } else {
                s.errors.push("[domain] extent_x: expected two numbers".into());
            }
        }
        if let Some(e) = s.f64_list("extent_y") {
            if e.len() == 2 {
                cfg.domain.extent_y = (e[0], e[1]);
            } else {
                s.errors.push("[domain] extent_y: expected two numbers".into());
            }
        }
        cfg.domain.h = s.f64("h", cfg.domain.h);
        cfg.domain.t0 = s.f64("t0", cfg.domain.t0);
        cfg.domain.t_final = s.f64("t_final", cfg.domain.t_final);
        match s.take("steps").as_deref() {
            None | Some("auto") => cfg.domain.steps = None,
            Some(v) => match v.parse() {
                Ok(n) => cfg.domain.steps = Some(n),
                Err(_) => s.errors.push(format!("[domain] steps: expected integer or auto, got {v:?}")),
            },
        }
        match s.take("mask") {
            None => {}
            Some(v) if v == "none" => cfg.domain.mask = None,
            Some(v) => {
                let parts: Vec<f64> = v
                    .strip_prefix("ball")
                    .unwrap_or("")
                    .split_whitespace()
                    .filter_map(|t| t.parse().ok())
                    .collect();
                if v.starts_with("ball") && parts.len() == 3 {
                    cfg.domain.mask = Some((parts[0], parts[1], parts[2]));
                } else {
                    s.errors.push(format!("[domain] mask: expected `none` or `ball cx cy r`, got {v:?}"));
                }
            }
        }
        s.finish();
    }

    if let Some(map) = raw.sections.remove("scheme") {
        let mut s = Section { name: "scheme", map, errors: &mut errors };
        cfg.scheme.stencil = s.take("stencil").unwrap_or_else(|| cfg.scheme.stencil.clone());
        cfg.scheme.gradient = s.take("gradient").unwrap_or_else(|| cfg.scheme.gradient.clone());
        cfg.scheme.cfl_safety = s.f64("cfl_safety", cfg.scheme.cfl_safety);
        cfg.scheme.max_grad_guess = s.f64("max_grad_guess", cfg.scheme.max_grad_guess);
        s.finish();
    }

    if let Some(map) = raw.sections.remove("boundary") {
        let mut s = Section { name: "boundary", map, errors: &mut errors };
        if let Some(v) = s.take("phi") {
            let mut toks = v.split_whitespace();
            let name = toks.next().unwrap_or("");
            let params: Vec<f64> = toks.clone().filter_map(|t| t.parse().ok()).collect();
            cfg.boundary = match name {
                "linear" => BoundarySpec::Linear(params),
                "caloric" => BoundarySpec::Caloric(params),
                "degenerate_profile" => BoundarySpec::DegenerateProfile(params),
                "file" => BoundarySpec::File(toks.next().unwrap_or("").to_string()),
                other => {
                    s.errors.push(format!(
                        "[boundary] phi: no catalog member named {other:?} \
                         (known: linear, caloric, degenerate_profile, file)"
                    ));
                    cfg.boundary.clone()
                }
            };
        }
        s.finish();
    }

    if let Some(map) = raw.sections.remove("checks") {
        let mut s = Section { name: "checks", map, errors: &mut errors };
        cfg.checks.max_principle = s.bool("max_principle", cfg.checks.max_principle);
        cfg.checks.gradient_max = s.bool("gradient_max", cfg.checks.gradient_max);
        cfg.checks.compatibility = s.bool("compatibility", cfg.checks.compatibility);
        cfg.checks.operator_sandwich = s.bool("operator_sandwich", cfg.checks.operator_sandwich);
        cfg.checks.tolerance = s.f64("tolerance", cfg.checks.tolerance);
        cfg.checks.gradient_tol_coef = s.f64("gradient_tol_coef", cfg.checks.gradient_tol_coef);
        cfg.checks.compat_tol = s.f64("compat_tol", cfg.checks.compat_tol);
        if let Some(c) = s.f64_list("fit_center") {
            if c.len() == 2 {
                cfg.checks.fit_center = (c[0], c[1]);
            } else if c.len() == 1 {
                cfg.checks.fit_center = (c[0], 0.0);
            } else {
                s.errors.push("[checks] fit_center: expected one or two numbers".into());
            }
        }
        cfg.checks.fit_r0 = s.f64("fit_r0", cfg.checks.fit_r0);
        cfg.checks.fit_radii = s.usize("fit_radii", cfg.checks.fit_radii);
        cfg.checks.time_base_lag = s.f64("time_base_lag", cfg.checks.time_base_lag);
        cfg.checks.time_lags = s.usize("time_lags", cfg.checks.time_lags);
        match s.take("edge_anchor") {
            None => {}
            Some(v) if v == "none" => cfg.checks.edge_anchor = None,
            Some(v) => {
                let parts: Vec<f64> = v.split_whitespace().filter_map(|t| t.parse().ok()).collect();
                match parts.len() {
                    1 => cfg.checks.edge_anchor = Some((parts[0], 0.0)),
                    2 => cfg.checks.edge_anchor = Some((parts[0], parts[1])),
                    _ => s.errors.push(format!("[checks] edge_anchor: expected `none` or coordinates, got {v:?}")),
                }
            }
        }
        cfg.checks.dichotomy = s.bool("dichotomy", cfg.checks.dichotomy);
        cfg.checks.tau = s.f64("tau", cfg.checks.tau);
        cfg.checks.delta = s.f64("delta", cfg.checks.delta);
        cfg.checks.l = s.f64("l", cfg.checks.l);
        cfg.checks.mu = s.f64("mu", cfg.checks.mu);
        cfg.checks.eps0 = s.f64("eps0", cfg.checks.eps0);
        cfg.checks.eps1_fraction = s.f64("eps1_fraction", cfg.checks.eps1_fraction);
        cfg.checks.eta = s.f64("eta", cfg.checks.eta);
        cfg.checks.directions = s.usize("directions", cfg.checks.directions);
        s.finish();
    }

    if let Some(map) = raw.sections.remove("output") {
        let mut s = Section { name: "output", map, errors: &mut errors };
        cfg.output.dir = s.take("dir").unwrap_or_else(|| cfg.output.dir.clone());
        cfg.output.grid_dumps = s.bool("grid_dumps", cfg.output.grid_dumps);
        cfg.output.csv = s.bool("csv", cfg.output.csv);
        s.finish();
    }

    validate(&cfg, &mut errors);
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(errors)
    }
}

fn parse_matrix_list(text: &str, s: &mut Section) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for chunk in text.split(';') {
        let vals: Vec<f64> = chunk.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        if vals.is_empty() || (vals.len() != 1 && vals.len() != 3) {
            s.errors.push(format!(
                "[{}] matrices: each matrix needs 1 (1D: xx) or 3 (2D: xx xy yy) entries, got {chunk:?}",
                s.name
            ));
        } else {
            out.push(vals);
        }
    }
    out
}

fn validate(cfg: &RunConfig, errors: &mut Vec<String>) {
    let eq = &cfg.equation;
    if eq.gamma <= -2.0 {
        errors.push(format!("[equation] gamma = {} violates the solvability range gamma > -2", eq.gamma));
    }
    match (&eq.epsilon, &eq.cascade) {
        (None, None) => errors.push("[equation] either epsilon or cascade must be set".into()),
        (Some(_), Some(_)) => {
            errors.push("[equation] epsilon and cascade are mutually exclusive".into())
        }
        (Some(e), None) => {
            if *e < 0.0 {
                errors.push("[equation] epsilon must be nonnegative".into());
            }
            if eq.gamma < 0.0 && *e == 0.0 {
                errors.push(
                    "[equation] a direct solve with gamma < 0 needs epsilon > 0 \
                     (the regularized profile invariant)"
                        .into(),
                );
            }
        }
        (None, Some(list)) => {
            if list.is_empty() || list.windows(2).any(|w| w[1] >= w[0]) || list.iter().any(|&e| e <= 0.0)
            {
                errors.push("[equation] cascade must be a strictly decreasing positive list".into());
            }
        }
    }
    if let Some(th) = &eq.theta_schedule {
        if !matches!(eq.operator, OperatorSpec::SmoothBellman { .. }) {
            errors.push("[equation] theta_schedule needs operator = smooth_bellman".into());
        }
        if let Some(c) = &eq.cascade {
            if th.len() != c.len() {
                errors.push("[equation] theta_schedule length must match cascade".into());
            }
        }
    }
    if !(eq.lambda > 0.0) || eq.big_lambda < eq.lambda {
        errors.push("[equation] need 0 < lambda <= Lambda".into());
    }
    let matrix_dim_ok = |m: &Vec<f64>| match cfg.domain.dim {
        1 => m.len() == 1,
        _ => m.len() == 3,
    };
    match &eq.operator {
        OperatorSpec::LinearTrace { matrix } => {
            if !matrix_dim_ok(matrix) {
                errors.push("[equation] matrices arity does not match the domain dim".into());
            }
        }
        OperatorSpec::SmoothBellman { matrices, theta } => {
            if matrices.iter().any(|m| !matrix_dim_ok(m)) {
                errors.push("[equation] matrices arity does not match the domain dim".into());
            }
            if !(*theta > 0.0) {
                errors.push("[equation] theta must be positive".into());
            }
        }
        _ => {}
    }

    let dom = &cfg.domain;
    if dom.dim != 1 && dom.dim != 2 {
        errors.push(format!("[domain] dim must be 1 or 2, got {}", dom.dim));
    }
    if !(dom.h > 0.0) {
        errors.push("[domain] h must be positive".into());
    }
    if dom.t_final <= dom.t0 {
        errors.push("[domain] t_final must exceed t0".into());
    }
    if dom.mask.is_some() && dom.dim != 2 {
        errors.push("[domain] ball masks need dim = 2".into());
    }

    match cfg.scheme.stencil.as_str() {
        "wide" | "centered" => {}
        other => errors.push(format!("[scheme] stencil: expected wide or centered, got {other:?}")),
    }
    match cfg.scheme.gradient.as_str() {
        "centered" | "forward" => {}
        other => errors.push(format!("[scheme] gradient: expected centered or forward, got {other:?}")),
    }
    if !(cfg.scheme.cfl_safety > 0.0 && cfg.scheme.cfl_safety < 1.0) {
        errors.push("[scheme] cfl_safety must lie in (0, 1)".into());
    }

    let arity = |p: &Vec<f64>, want1: usize, want2: usize| -> bool {
        p.len() == if dom.dim == 1 { want1 } else { want2 }
    };
    match &cfg.boundary {
        BoundarySpec::Linear(p) => {
            if !arity(p, 2, 3) {
                errors.push("[boundary] linear wants `a0 (a1) b`".into());
            }
        }
        BoundarySpec::Caloric(p) => {
            if !arity(p, 3, 6) {
                errors.push("[boundary] caloric wants `qxx (qxy qyy) a0 (a1) b`".into());
            }
        }
        BoundarySpec::DegenerateProfile(p) => {
            if p.len() != 2 {
                errors.push("[boundary] degenerate_profile wants `c offset`".into());
            } else if !(p[0] > 0.0) {
                errors.push("[boundary] degenerate_profile needs a positive time slope c".into());
            }
            if eq.gamma <= -1.0 {
                errors.push("[boundary] degenerate_profile needs gamma > -1".into());
            }
        }
        BoundarySpec::File(path) => {
            if path.is_empty() {
                errors.push("[boundary] file wants a path".into());
            }
        }
    }

    let ch = &cfg.checks;
    for (name, v) in [
        ("tolerance", ch.tolerance),
        ("gradient_tol_coef", ch.gradient_tol_coef),
        ("compat_tol", ch.compat_tol),
        ("fit_r0", ch.fit_r0),
        ("time_base_lag", ch.time_base_lag),
    ] {
        if !(v > 0.0) {
            errors.push(format!("[checks] {name} must be positive"));
        }
    }
    if ch.dichotomy {
        let shrink = 1.0 - ch.delta;
        let cap = shrink.min(shrink.powf(1.0 + eq.gamma));
        if !(ch.tau > 0.0 && ch.tau < cap) {
            errors.push(format!(
                "[checks] cond:tau violated: tau = {} must be below min{{1-delta, (1-delta)^(1+gamma)}} = {cap}",
                ch.tau
            ));
        }
        if !(ch.l > 0.5 && ch.l < 1.0) {
            errors.push("[checks] l must lie in (1/2, 1)".into());
        }
        for (name, v) in [("mu", ch.mu), ("eps0", ch.eps0), ("eps1_fraction", ch.eps1_fraction), ("eta", ch.eta)] {
            if !(v > 0.0) {
                errors.push(format!("[checks] {name} must be positive"));
            }
        }
    }
}

/// Render a configuration in the same format `parse_config` reads; the
/// round trip is exact.
pub fn render(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let eq = &cfg.equation;
    writeln!(out, "[equation]").unwrap();
    writeln!(out, "gamma = {}", eq.gamma).unwrap();
    if let Some(e) = eq.epsilon {
        writeln!(out, "epsilon = {e}").unwrap();
    }
    if let Some(c) = &eq.cascade {
        writeln!(out, "cascade = {}", join(c)).unwrap();
    }
    if let Some(t) = &eq.theta_schedule {
        writeln!(out, "theta_schedule = {}", join(t)).unwrap();
    }
    match &eq.operator {
        OperatorSpec::PucciPlus => writeln!(out, "operator = pucci_plus").unwrap(),
        OperatorSpec::PucciMinus => writeln!(out, "operator = pucci_minus").unwrap(),
        OperatorSpec::LinearTrace { matrix } => {
            writeln!(out, "operator = linear_trace").unwrap();
            writeln!(out, "matrices = {}", join(matrix)).unwrap();
        }
        OperatorSpec::SmoothBellman { matrices, theta } => {
            writeln!(out, "operator = smooth_bellman").unwrap();
            let mats: Vec<String> = matrices.iter().map(|m| join(m)).collect();
            writeln!(out, "matrices = {}", mats.join(" ; ")).unwrap();
            writeln!(out, "theta = {theta}").unwrap();
        }
    }
    writeln!(out, "lambda = {}", eq.lambda).unwrap();
    writeln!(out, "Lambda = {}", eq.big_lambda).unwrap();
    writeln!(out, "f = {}", eq.source).unwrap();

    let dom = &cfg.domain;
    writeln!(out, "\n[domain]").unwrap();
    writeln!(out, "dim = {}", dom.dim).unwrap();
    writeln!(out, "extent_x = {} {}", dom.extent_x.0, dom.extent_x.1).unwrap();
    if dom.dim == 2 {
        writeln!(out, "extent_y = {} {}", dom.extent_y.0, dom.extent_y.1).unwrap();
    }
    writeln!(out, "h = {}", dom.h).unwrap();
    writeln!(out, "t0 = {}", dom.t0).unwrap();
    writeln!(out, "t_final = {}", dom.t_final).unwrap();
    match dom.steps {
        Some(n) => writeln!(out, "steps = {n}").unwrap(),
        None => writeln!(out, "steps = auto").unwrap(),
    }
    match dom.mask {
        Some((cx, cy, r)) => writeln!(out, "mask = ball {cx} {cy} {r}").unwrap(),
        None => writeln!(out, "mask = none").unwrap(),
    }

    writeln!(out, "\n[scheme]").unwrap();
    writeln!(out, "stencil = {}", cfg.scheme.stencil).unwrap();
    writeln!(out, "gradient = {}", cfg.scheme.gradient).unwrap();
    writeln!(out, "cfl_safety = {}", cfg.scheme.cfl_safety).unwrap();
    writeln!(out, "max_grad_guess = {}", cfg.scheme.max_grad_guess).unwrap();

    writeln!(out, "\n[boundary]").unwrap();
    match &cfg.boundary {
        BoundarySpec::Linear(p) => writeln!(out, "phi = linear {}", join(p)).unwrap(),
        BoundarySpec::Caloric(p) => writeln!(out, "phi = caloric {}", join(p)).unwrap(),
        BoundarySpec::DegenerateProfile(p) => {
            writeln!(out, "phi = degenerate_profile {}", join(p)).unwrap()
        }
        BoundarySpec::File(path) => writeln!(out, "phi = file {path}").unwrap(),
    }

    let ch = &cfg.checks;
    writeln!(out, "\n[checks]").unwrap();
    writeln!(out, "max_principle = {}", ch.max_principle).unwrap();
    writeln!(out, "gradient_max = {}", ch.gradient_max).unwrap();
    writeln!(out, "compatibility = {}", ch.compatibility).unwrap();
    writeln!(out, "operator_sandwich = {}", ch.operator_sandwich).unwrap();
    writeln!(out, "tolerance = {}", ch.tolerance).unwrap();
    writeln!(out, "gradient_tol_coef = {}", ch.gradient_tol_coef).unwrap();
    writeln!(out, "compat_tol = {}", ch.compat_tol).unwrap();
    writeln!(out, "fit_center = {} {}", ch.fit_center.0, ch.fit_center.1).unwrap();
    writeln!(out, "fit_r0 = {}", ch.fit_r0).unwrap();
    writeln!(out, "fit_radii = {}", ch.fit_radii).unwrap();
    writeln!(out, "time_base_lag = {}", ch.time_base_lag).unwrap();
    writeln!(out, "time_lags = {}", ch.time_lags).unwrap();
    match ch.edge_anchor {
        Some((x, y)) => writeln!(out, "edge_anchor = {x} {y}").unwrap(),
        None => writeln!(out, "edge_anchor = none").unwrap(),
    }
    writeln!(out, "dichotomy = {}", ch.dichotomy).unwrap();
    writeln!(out, "tau = {}", ch.tau).unwrap();
    writeln!(out, "delta = {}", ch.delta).unwrap();
    writeln!(out, "l = {}", ch.l).unwrap();
    writeln!(out, "mu = {}", ch.mu).unwrap();
    writeln!(out, "eps0 = {}", ch.eps0).unwrap();
    writeln!(out, "eps1_fraction = {}", ch.eps1_fraction).unwrap();
    writeln!(out, "eta = {}", ch.eta).unwrap();
    writeln!(out, "directions = {}", ch.directions).unwrap();

    writeln!(out, "\n[output]").unwrap();
    writeln!(out, "dir = {}", cfg.output.dir).unwrap();
    writeln!(out, "grid_dumps = {}", cfg.output.grid_dumps).unwrap();
    writeln!(out, "csv = {}", cfg.output.csv).unwrap();
    out
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
