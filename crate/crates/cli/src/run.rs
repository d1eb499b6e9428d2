//! Subcommand pipelines: build the problem from a parsed config, execute,
//! and assemble report text plus CSV/grid-dump artifacts.
//!
//! Reports are deterministic given the config (wall times go to stdout,
//! not into artifacts). Output files are written to a temp name and
//! renamed on success so aborted runs leave no partial artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vispar_core::error::Error;
use vispar_core::estimates::{assert_gradient_max, assert_max_principle, ExactSolution};
use vispar_core::geometry::{
    oscillation_over, read_grid_dump, write_grid_dump, Cylinder, Grid, Point, SpaceTimeField,
};
use vispar_core::operators::{
    pucci_minus, pucci_plus, DegeneracyProfile, EllipticOperator, SymmetricMatrix,
};
use vispar_core::regularity::{
    self, DichotomyParams, DichotomyTrace, FitSpec, OscFit, TimeFit, VectorField,
};
use vispar_core::scheme::{GradientMode, SchemeConfig, StepController, Stencil};
use vispar_core::solver::{self, CascadeResult, DirichletProblem, SolveReport};

use crate::config::{BoundarySpec, OperatorSpec, RunConfig};

/// Exit status contract: 0 success, 1 assertion failure, 2 solve abort,
/// 3 config error (the latter is produced before a run starts).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    AssertionFailed,
    SolveAborted,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Success => 0,
            RunStatus::AssertionFailed => 1,
            RunStatus::SolveAborted => 2,
        }
    }
}

pub struct RunOutcome {
    pub status: RunStatus,
    /// (file name, contents) pairs to be written into the output directory.
    pub artifacts: Vec<(String, Vec<u8>)>,
    /// One-line summaries for stdout.
    pub summary: Vec<String>,
}

pub fn build_grid(cfg: &RunConfig) -> Result<Arc<Grid<f64>>, Error> {
    let d = &cfg.domain;
    let span = d.t_final - d.t0;
    let steps = d.steps.unwrap_or(128).max(1);
    let dt = span / steps as f64;
    let grid = match d.dim {
        1 => Grid::new_1d(d.extent_x, d.h, dt, steps, d.t0)?,
        _ => {
            let g = Grid::new_2d(d.extent_x, d.extent_y, d.h, dt, steps, d.t0)?;
            match d.mask {
                Some((cx, cy, r)) => g.with_ball_mask([cx, cy], r)?,
                None => g,
            }
        }
    };
    Ok(Arc::new(grid))
}

fn matrix_from(vals: &[f64], dim: usize) -> SymmetricMatrix<f64> {
    if dim == 1 {
        SymmetricMatrix::new_1d(vals[0])
    } else {
        SymmetricMatrix::new_2d(vals[0], vals[1], vals[2])
    }
}

pub fn build_operator(cfg: &RunConfig) -> Result<EllipticOperator<f64>, Error> {
    let eq = &cfg.equation;
    let dim = cfg.domain.dim;
    match &eq.operator {
        OperatorSpec::PucciPlus => EllipticOperator::pucci_plus_op(eq.lambda, eq.big_lambda),
        OperatorSpec::PucciMinus => EllipticOperator::pucci_minus_op(eq.lambda, eq.big_lambda),
        OperatorSpec::LinearTrace { matrix } => {
            EllipticOperator::linear_trace(matrix_from(matrix, dim), eq.lambda, eq.big_lambda)
        }
        OperatorSpec::SmoothBellman { matrices, theta } => EllipticOperator::smooth_bellman(
            matrices.iter().map(|m| matrix_from(m, dim)).collect(),
            *theta,
            eq.lambda,
            eq.big_lambda,
        ),
    }
}

fn build_boundary(
    cfg: &RunConfig,
    grid: &Arc<Grid<f64>>,
    op: &EllipticOperator<f64>,
) -> Result<SpaceTimeField<f64>, Error> {
    let dim = cfg.domain.dim;
    let sol = match &cfg.boundary {
        BoundarySpec::Linear(p) => {
            let (a, b) = if dim == 1 { ([p[0], 0.0], p[1]) } else { ([p[0], p[1]], p[2]) };
            ExactSolution::linear(a, b)
        }
        BoundarySpec::Caloric(p) => {
            let (q, a, b) = if dim == 1 {
                (SymmetricMatrix::new_1d(p[0]), [p[1], 0.0], p[2])
            } else {
                (SymmetricMatrix::new_2d(p[0], p[1], p[2]), [p[3], p[4]], p[5])
            };
            ExactSolution::caloric(q, a, b, op)
        }
        BoundarySpec::DegenerateProfile(p) => {
            ExactSolution::degenerate_profile(cfg.equation.gamma, p[0], p[1])?
        }
        BoundarySpec::File(path) => {
            let file = fs::File::open(path)?;
            let mut reader = std::io::BufReader::new(file);
            let (header, values) = read_grid_dump(&mut reader)?;
            if header.dim != grid.dim()
                || header.nx != grid.nx()
                || header.ny != grid.ny()
                || header.nt != grid.n_slices()
                || (header.h - grid.h()).abs() > 1e-9 * grid.h()
                || (header.dt - grid.dt()).abs() > 1e-9 * grid.dt()
            {
                return Err(Error::Domain(format!(
                    "boundary file {path} does not match the configured grid"
                )));
            }
            return SpaceTimeField::from_values(grid.clone(), values);
        }
    };
    sol.as_field(grid.clone())
}

pub fn build_problem(cfg: &RunConfig, epsilon: f64) -> Result<DirichletProblem<f64>, Error> {
    let grid = build_grid(cfg)?;
    let operator = build_operator(cfg)?;
    let boundary = build_boundary(cfg, &grid, &operator)?;
    let profile = DegeneracyProfile::regularized(cfg.equation.gamma, epsilon)?;
    let source = if cfg.equation.source != 0.0 {
        let v = cfg.equation.source;
        Some(SpaceTimeField::from_fn(grid.clone(), |_| v))
    } else {
        None
    };
    let stencil = match cfg.scheme.stencil.as_str() {
        "centered" => Stencil::centered(),
        _ => Stencil::wide(grid.dim()),
    };
    let gradient = match cfg.scheme.gradient.as_str() {
        "forward" => GradientMode::Forward,
        _ => GradientMode::Centered,
    };
    let controller = StepController::new(cfg.scheme.cfl_safety, cfg.scheme.max_grad_guess)?;
    let span = cfg.domain.t_final - cfg.domain.t0;
    let (center, radius) = domain_ball(cfg);
    let cylinder = Cylinder::stretched([center.0, center.1], cfg.domain.t_final, radius, span / (radius * radius))?;
    Ok(DirichletProblem {
        grid,
        cylinder,
        operator,
        profile,
        boundary,
        source,
        scheme: SchemeConfig { stencil, gradient, controller },
    })
}

fn domain_ball(cfg: &RunConfig) -> ((f64, f64), f64) {
    if let Some((cx, cy, r)) = cfg.domain.mask {
        return ((cx, cy), r);
    }
    let (x0, x1) = cfg.domain.extent_x;
    let rx = (x1 - x0) / 2.0;
    if cfg.domain.dim == 1 {
        (((x0 + x1) / 2.0, 0.0), rx)
    } else {
        let (y0, y1) = cfg.domain.extent_y;
        let ry = (y1 - y0) / 2.0;
        (((x0 + x1) / 2.0, (y0 + y1) / 2.0), rx.min(ry))
    }
}

fn fit_spec(cfg: &RunConfig) -> FitSpec<f64> {
    let ch = &cfg.checks;
    FitSpec {
        center_space: [ch.fit_center.0, ch.fit_center.1],
        top_time: cfg.domain.t_final,
        r0: ch.fit_r0,
        n_radii: ch.fit_radii,
        time_base_lag: ch.time_base_lag,
        n_time_lags: ch.time_lags,
        gamma: cfg.equation.gamma,
    }
}

fn dichotomy_params(cfg: &RunConfig) -> DichotomyParams<f64> {
    let ch = &cfg.checks;
    DichotomyParams {
        l: ch.l,
        mu: ch.mu,
        delta: ch.delta,
        tau: ch.tau,
        eps0: ch.eps0,
        eps1_fraction: ch.eps1_fraction,
        eta: ch.eta,
    }
}

struct ReportBuilder {
    text: String,
    summary: Vec<String>,
    failed: bool,
}

impl ReportBuilder {
    fn new(cfg: &RunConfig, subcommand: &str) -> Self {
        let mut text = String::new();
        writeln!(text, "vispar report").unwrap();
        writeln!(text, "subcommand = {subcommand}").unwrap();
        writeln!(text, "\n# config echo (defaults resolved)\n").unwrap();
        text.push_str(&crate::config::render(cfg));
        ReportBuilder { text, summary: Vec::new(), failed: false }
    }

    fn section(&mut self, name: &str) {
        writeln!(self.text, "\n# {name}\n").unwrap();
    }

    fn line(&mut self, line: impl AsRef<str>) {
        writeln!(self.text, "{}", line.as_ref()).unwrap();
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        let verdict = if pass { "pass" } else { "FAIL" };
        writeln!(self.text, "{name} = {verdict} ({detail})").unwrap();
        self.summary.push(format!("{name}: {verdict} ({detail})"));
        if !pass {
            self.failed = true;
        }
    }

    fn solve_summary(&mut self, report: &SolveReport<f64>) {
        self.section("solve");
        self.line(format!("sup_norm = {}", report.sup_norm));
        self.line(format!("sup_gradient = {}", report.sup_gradient));
        self.line(format!(
            "compatibility_residual = {} (tol {}, {})",
            report.compatibility.residual,
            report.compatibility.tol,
            if report.compatibility.pass { "pass" } else { "violated" }
        ));
        let s = &report.stats;
        self.line(format!(
            "controller: substeps = {}, max_per_slice = {}, min_substep_dt = {}, g_max = {}, \
             coupling_max = {}, rejected = {}",
            s.total_substeps,
            s.max_substeps_per_slice,
            s.min_substep_dt,
            s.g_max,
            s.coupling_max,
            s.rejected_steps
        ));
        for w in &report.warnings {
            self.line(format!("warning: {w}"));
        }
    }
}

fn osc_fit_lines(rb: &mut ReportBuilder, label: &str, fit: &OscFit<f64>) {
    rb.line(format!(
        "{label}: alpha = {}, raw_slope = {}, constant = {}, residual = {}",
        fit.alpha, fit.slope, fit.constant, fit.residual
    ));
    for (r, o) in fit.radii.iter().zip(&fit.oscillations) {
        rb.line(format!("{label}: scale {r} oscillation {o}"));
    }
}

fn regularity_csv(
    du: &VectorField<f64>,
    fit: &OscFit<f64>,
    time_fit: Option<&TimeFit<f64>>,
    center: Point<f64>,
) -> Vec<u8> {
    let mut csv = String::from("kind,scale,component,oscillation,alpha,constant,residual\r\n");
    for &r in &fit.radii {
        let region = Cylinder::standard(center.x, center.t, r).expect("fit radius positive");
        for c in 0..du.dim() {
            let osc = oscillation_over(du.grid(), &region, |si, k| {
                du.is_valid(si).then(|| du.component(c, si, k))
            })
            .unwrap_or(f64::NAN);
            writeln!(csv, "oscillation,{r},{c},{osc},,,\r").unwrap();
        }
    }
    writeln!(csv, "fit,,,,{},{},{}\r", fit.alpha, fit.constant, fit.residual).unwrap();
    if let Some(tf) = time_fit {
        writeln!(csv, "time_fit,,,,{},{},\r", tf.fitted, tf.predicted).unwrap();
    }
    csv.into_bytes()
}

fn dichotomy_csv(trace: &DichotomyTrace<f64>) -> Vec<u8> {
    let mut csv = String::from("level,direction_index,fraction,condition_held,sup_grad_next\r\n");
    for lvl in &trace.levels {
        let sup = lvl
            .sup_grad_next
            .map(|v| v.to_string())
            .unwrap_or_default();
        for (di, f) in lvl.fractions.iter().enumerate() {
            writeln!(csv, "{},{di},{f},{},{sup}\r", lvl.level, lvl.condition_held).unwrap();
        }
    }
    csv.into_bytes()
}

fn solution_dump(report: &SolveReport<f64>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_grid_dump(&report.solution, &mut buf).expect("in-memory write");
    buf
}

pub fn run_solve(cfg: &RunConfig) -> RunOutcome {
    let mut rb = ReportBuilder::new(cfg, "solve");
    let eps = cfg.equation.epsilon.unwrap_or(1.0);
    let outcome = build_problem(cfg, eps).and_then(|p| solver::solve(&p));
    match outcome {
        Ok(report) => {
            rb.solve_summary(&report);
            rb.summary.push(format!(
                "solve: sup |u| = {:.6}, sup |Du| = {:.6}",
                report.sup_norm, report.sup_gradient
            ));
            let mut artifacts = vec![("report.txt".to_string(), rb.text.into_bytes())];
            if cfg.output.grid_dumps {
                artifacts.push(("solution.grid".to_string(), solution_dump(&report)));
            }
            RunOutcome { status: RunStatus::Success, artifacts, summary: rb.summary }
        }
        Err(e) => aborted(rb, e),
    }
}

fn aborted(mut rb: ReportBuilder, e: Error) -> RunOutcome {
    rb.section("abort");
    rb.line(format!("error: {e}"));
    rb.summary.push(format!("solve aborted: {e}"));
    RunOutcome {
        status: RunStatus::SolveAborted,
        artifacts: vec![("report.txt".to_string(), rb.text.into_bytes())],
        summary: rb.summary,
    }
}

pub fn run_verify(cfg: &RunConfig, seed: u64) -> RunOutcome {
    let mut rb = ReportBuilder::new(cfg, "verify");
    let eps = cfg.equation.epsilon.unwrap_or(1.0);
    let problem = match build_problem(cfg, eps) {
        Ok(p) => p,
        Err(e) => return aborted(rb, e),
    };
    let report = match solver::solve(&problem) {
        Ok(r) => r,
        Err(e) => return aborted(rb, e),
    };
    rb.solve_summary(&report);
    rb.section("checks");
    let ch = &cfg.checks;
    if ch.compatibility {
        let c = &report.compatibility;
        rb.check(
            "compatibility",
            c.residual <= ch.compat_tol,
            format!("residual {} vs tol {}", c.residual, ch.compat_tol),
        );
    }
    if ch.max_principle {
        match assert_max_principle(&problem, &report, ch.tolerance) {
            Ok(c) => rb.check(
                "max_principle",
                c.pass,
                format!("interior {} vs boundary {}", c.interior_sup, c.boundary_sup),
            ),
            Err(e) => rb.check("max_principle", false, e.to_string()),
        }
    }
    if ch.gradient_max {
        match assert_gradient_max(&problem, &report, ch.gradient_tol_coef) {
            Ok(c) => rb.check(
                "gradient_max",
                c.pass,
                format!("excess {} vs tol {}", c.excess, c.tol),
            ),
            Err(e) => rb.check("gradient_max", false, e.to_string()),
        }
    }
    if ch.operator_sandwich {
        let (worst, pass) = sandwich_probe(&problem.operator, cfg.domain.dim, seed);
        rb.check("operator_sandwich", pass, format!("worst violation {worst:.3e} (seed {seed})"));
    }
    let status = if rb.failed { RunStatus::AssertionFailed } else { RunStatus::Success };
    let mut artifacts = vec![("report.txt".to_string(), rb.text.into_bytes())];
    if cfg.output.grid_dumps {
        artifacts.push(("solution.grid".to_string(), solution_dump(&report)));
    }
    RunOutcome { status, artifacts, summary: rb.summary }
}

/// Seeded spot check of the uniform-ellipticity sandwich for the configured
/// operator.
fn sandwich_probe(op: &EllipticOperator<f64>, dim: usize, seed: u64) -> (f64, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |rng: &mut ChaCha8Rng| {
        if dim == 1 {
            SymmetricMatrix::new_1d(rng.gen_range(-3.0..3.0))
        } else {
            SymmetricMatrix::new_2d(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            )
        }
    };
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = random(&mut rng);
        let n = random(&mut rng);
        let d = m.sub(&n);
        let diff = op.evaluate(&m) - op.evaluate(&n);
        let lo = pucci_minus(&d, op.lambda(), op.big_lambda());
        let hi = pucci_plus(&d, op.lambda(), op.big_lambda());
        worst = worst.max(lo - diff).max(diff - hi);
    }
    (worst, worst <= 1e-12)
}

pub fn run_cascade(cfg: &RunConfig) -> RunOutcome {
    let mut rb = ReportBuilder::new(cfg, "cascade");
    let Some(epsilons) = cfg.equation.cascade.clone() else {
        return aborted(rb, Error::Domain("cascade subcommand needs [equation] cascade".into()));
    };
    let template = match build_problem(cfg, epsilons[0]) {
        Ok(p) => p,
        Err(e) => return aborted(rb, e),
    };
    let spec = fit_spec(cfg);
    let thetas = cfg.equation.theta_schedule.clone();
    let cascade: CascadeResult<f64> =
        match solver::solve_cascade(&template, &epsilons, thetas.as_deref(), Some(&spec)) {
            Ok(c) => c,
            Err(e) => return aborted(rb, e),
        };
    rb.section("cascade");
    if cascade.outside_main_hypothesis {
        rb.line("note: gamma <= -1 is outside the main-estimate hypothesis; measurements are descriptive");
    }
    let mut any_failed = false;
    for member in &cascade.members {
        match &member.outcome {
            Ok(r) => {
                rb.line(format!(
                    "epsilon {} (theta {:?}): sup_norm = {}, lipschitz = {:?}",
                    member.epsilon, member.theta, r.sup_norm, member.lipschitz
                ));
                if let Some(fit) = &member.holder {
                    osc_fit_lines(&mut rb, &format!("epsilon {}", member.epsilon), fit);
                }
            }
            Err(e) => {
                any_failed = true;
                rb.line(format!("epsilon {}: solve failed: {e}", member.epsilon));
            }
        }
    }
    rb.section("pairwise sup distances");
    let mut csv = String::from("i,j,epsilon_i,epsilon_j,sup_distance\r\n");
    for i in 0..cascade.members.len() {
        for j in i + 1..cascade.members.len() {
            if let Some(d) = cascade.pairwise_sup[i][j] {
                rb.line(format!("d(eps_{i}, eps_{j}) = {d}"));
                writeln!(
                    csv,
                    "{i},{j},{},{},{d}\r",
                    cascade.members[i].epsilon, cascade.members[j].epsilon
                )
                .unwrap();
            }
        }
    }
    if let Ok(uniform) = regularity::measure_uniform_holder(&cascade, &spec) {
        rb.section("uniformity verdict");
        rb.line(format!("alpha_spread = {:?}", uniform.alpha_spread));
        rb.line(format!("constant_spread = {:?}", uniform.constant_spread));
    }
    let status = if any_failed { RunStatus::SolveAborted } else { RunStatus::Success };
    rb.summary.push(format!("cascade: {} members", cascade.members.len()));
    let mut artifacts = vec![("report.txt".to_string(), rb.text.into_bytes())];
    if cfg.output.csv {
        artifacts.push(("cascade.csv".to_string(), csv.into_bytes()));
    }
    RunOutcome { status, artifacts, summary: rb.summary }
}

pub fn run_regularity(cfg: &RunConfig) -> RunOutcome {
    let mut rb = ReportBuilder::new(cfg, "regularity");
    let eps = cfg.equation.epsilon.unwrap_or(1.0);
    let problem = match build_problem(cfg, eps) {
        Ok(p) => p,
        Err(e) => return aborted(rb, e),
    };
    let report = match solver::solve(&problem) {
        Ok(r) => r,
        Err(e) => return aborted(rb, e),
    };
    rb.solve_summary(&report);
    let spec = fit_spec(cfg);
    rb.section("regularity");

    let mut artifacts: Vec<(String, Vec<u8>)> = Vec::new();
    let mut alpha_for_time = None;
    let du = regularity::difference_quotient_field(&report.solution, problem.grid.h());
    let fit = regularity::holder_fit(&report.solution, &spec);
    match &fit {
        Ok(f) => {
            osc_fit_lines(&mut rb, "holder_fit", f);
            alpha_for_time = Some(f.alpha);
        }
        Err(e) => rb.line(format!("holder_fit: {e}")),
    }
    if let Some((x, y)) = cfg.checks.edge_anchor {
        let radii = spec.dyadic_radii();
        match regularity::fit_edge_exponent(
            &report.solution,
            Point { x: [x, y], t: cfg.domain.t_final },
            &radii,
            0.01,
        ) {
            Ok(f) => {
                osc_fit_lines(&mut rb, "edge_fit", &f);
                alpha_for_time = Some(f.alpha);
            }
            Err(e) => rb.line(format!("edge_fit: {e}")),
        }
    }
    let mut time_fit = None;
    if let Some(alpha) = alpha_for_time {
        match regularity::time_modulus_fit(&report.solution, &spec, alpha) {
            Ok(tf) => {
                rb.line(format!(
                    "time_modulus: fitted = {}, predicted = {} ((1+a)/(2-a*gamma))",
                    tf.fitted, tf.predicted
                ));
                time_fit = Some(tf);
            }
            Err(e) => rb.line(format!("time_modulus: {e}")),
        }
    }
    if let Ok(agg) = regularity::regularity_report(&report.solution, &spec, None) {
        match agg.time_gradient {
            Some(tg) => rb.line(format!(
                "gradient_time_modulus: fitted = {}, predicted = {} (a/(2-a*gamma))",
                tg.fitted, tg.predicted
            )),
            None => rb.line("gradient_time_modulus: flat in time"),
        }
    }
    if cfg.output.csv {
        if let (Ok(du), Ok(f)) = (&du, &fit) {
            let center = Point { x: spec.center_space, t: spec.top_time };
            artifacts.push((
                "oscillation.csv".to_string(),
                regularity_csv(du, f, time_fit.as_ref(), center),
            ));
        }
    }

    if cfg.checks.dichotomy {
        rb.section("dichotomy");
        let params = dichotomy_params(cfg);
        let forward_sup = regularity::forward_gradient_sup(&report.solution);
        let run = forward_sup.and_then(|fs| {
            regularity::rescale_to_unit_gradient(
                &report.solution,
                report.sup_gradient.max(fs),
                cfg.equation.gamma,
                eps,
            )
        });
        match run {
            Ok(run) => {
                rb.line(format!("rescale: K = {}, epsilon -> {}", run.scale, run.epsilon));
                let tol = 2.0 * problem.grid.h();
                let trace = regularity::difference_quotient_field(&run.field, run.field.grid().h())
                    .and_then(|du| {
                        regularity::dichotomy_iterate(
                            &du,
                            &params,
                            cfg.equation.gamma,
                            run.epsilon,
                            [cfg.checks.fit_center.0, cfg.checks.fit_center.1],
                            run.field.grid().t_final(),
                            cfg.checks.directions,
                            tol,
                        )
                    });
                match trace {
                    Ok(trace) => {
                        for lvl in &trace.levels {
                            rb.line(format!(
                                "level {}: radius = {}, bound = {}, held = {}, sup_next = {:?}, shrinkage_ok = {:?}",
                                lvl.level,
                                lvl.radius,
                                lvl.grad_bound,
                                lvl.condition_held,
                                lvl.sup_grad_next,
                                lvl.shrinkage_ok
                            ));
                        }
                        rb.line(format!("stop = {:?}, m1 = {}", trace.stop, trace.m1));
                        let consistent = trace
                            .levels
                            .iter()
                            .filter(|l| l.condition_held)
                            .all(|l| l.shrinkage_ok == Some(true));
                        rb.check(
                            "dichotomy_consistency",
                            consistent,
                            format!("{} levels traced", trace.levels.len()),
                        );
                        if cfg.output.csv {
                            artifacts.push(("dichotomy.csv".to_string(), dichotomy_csv(&trace)));
                        }
                    }
                    Err(e) => rb.check("dichotomy_consistency", false, e.to_string()),
                }
            }
            Err(e) => rb.check("dichotomy_consistency", false, e.to_string()),
        }
    }

    if cfg.output.grid_dumps {
        artifacts.push(("solution.grid".to_string(), solution_dump(&report)));
    }
    artifacts.insert(0, ("report.txt".to_string(), rb.text.into_bytes()));
    let status = if rb.failed { RunStatus::AssertionFailed } else { RunStatus::Success };
    RunOutcome { status, artifacts, summary: rb.summary }
}

/// Write artifacts into `dir`: each file goes to a temp name first and is
/// renamed into place, so no artifact is ever partially written.
pub fn write_artifacts(dir: &Path, artifacts: &[(String, Vec<u8>)]) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, data) in artifacts {
        let target = dir.join(name);
        let tmp = dir.join(format!(".tmp-{name}"));
        fs::write(&tmp, data)?;
        fs::rename(&tmp, &target)?;
        written.push(target);
    }
    Ok(written)
}
