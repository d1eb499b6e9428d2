//! Spatial discretization and explicit time stepping.
//!
//! Two Hessian modes coexist. `CenteredHessian` uses standard centered
//! second differences plus four-point cross terms: exact on quadratics,
//! second-order accurate, not provably monotone. `WideStencil` evaluates
//! directional second differences over a direction set and combines them in
//! the standard monotone form `Λ·(positive part) + λ·(negative part)`,
//! maximized over orthogonal frames so the operator stays exact on
//! quadratics diagonal in stencil directions. Comparison and maximum
//! principle checks run in monotone mode; convergence-rate measurements run
//! in centered mode.
//!
//! The degeneracy factor `g(Du)` multiplies the whole elliptic term, so the
//! update is genuinely monotone in neighbor values only while the gradient
//! coupling is dominated by the diffusion weights. Each step therefore
//! reports the certificate ratio `|F_h| · |∇g| · h / (2λ·g)`; a committed
//! step with ratio below one is a certified monotone step.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::operators::{DegeneracyProfile, EllipticOperator, OperatorKind, SymmetricMatrix};
use crate::scalar::{real, to_f64, Real};

/// Hessian discretization mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilKind {
    CenteredHessian,
    WideStencil,
}

/// Discretization stencil. Directions are integer offsets, used with both
/// signs by the directional second differences.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    kind: StencilKind,
    directions: Vec<[i32; 2]>,
}

impl Stencil {
    pub fn centered() -> Self {
        Stencil { kind: StencilKind::CenteredHessian, directions: Vec::new() }
    }

    /// Default monotone direction set: the axes, plus both diagonals in 2D.
    pub fn wide(dim: usize) -> Self {
        let directions = if dim == 1 {
            vec![[1, 0]]
        } else {
            vec![[1, 0], [0, 1], [1, 1], [1, -1]]
        };
        Stencil { kind: StencilKind::WideStencil, directions }
    }

    pub fn wide_with(dim: usize, directions: Vec<[i32; 2]>) -> Result<Self> {
        if !directions.iter().any(|d| d[0].abs() == 1 && d[1] == 0) {
            return Err(Error::Domain("wide stencil must contain the x axis direction".into()));
        }
        if dim == 2 && !directions.iter().any(|d| d[0] == 0 && d[1].abs() == 1) {
            return Err(Error::Domain("wide stencil must contain the y axis direction".into()));
        }
        Ok(Stencil { kind: StencilKind::WideStencil, directions })
    }

    pub fn kind(&self) -> StencilKind {
        self.kind
    }

    pub fn directions(&self) -> &[[i32; 2]] {
        &self.directions
    }

    /// Orthogonal frames of the direction set. In 1D every direction is its
    /// own frame; in 2D the frames are the orthogonal pairs.
    pub fn frames(&self, dim: usize) -> Vec<Vec<[i32; 2]>> {
        if dim == 1 {
            return self.directions.iter().map(|&d| vec![d]).collect();
        }
        let mut frames = Vec::new();
        for (a, &da) in self.directions.iter().enumerate() {
            for &db in self.directions.iter().skip(a + 1) {
                if da[0] * db[0] + da[1] * db[1] == 0 {
                    frames.push(vec![da, db]);
                }
            }
        }
        frames
    }

    /// Chebyshev reach of the stencil in cells.
    pub fn reach(&self) -> i64 {
        match self.kind {
            StencilKind::CenteredHessian => 1,
            StencilKind::WideStencil => self
                .directions
                .iter()
                .map(|d| d[0].abs().max(d[1].abs()) as i64)
                .max()
                .unwrap_or(1),
        }
    }
}

/// How the gradient entering the degeneracy factor is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientMode {
    /// Centered difference quotients (default; symmetric, second order).
    Centered,
    /// Forward difference quotients `(u(x+he_k) − u(x))/h`, the
    /// measurement-faithful mode.
    Forward,
}

/// Stability control for the explicit march: the accepted substep satisfies
/// `dt ≤ cfl_safety · h² / (2n·Λ·g_max)` with `g_max` the largest observed
/// degeneracy factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepController<T> {
    pub cfl_safety: T,
    /// Initial guess for the running sup of the discrete gradient.
    pub max_grad_guess: T,
}

impl<T: Real> StepController<T> {
    pub fn new(cfl_safety: T, max_grad_guess: T) -> Result<Self> {
        if !(cfl_safety > T::zero() && cfl_safety < T::one()) {
            return Err(Error::Domain(format!("cfl_safety must lie in (0,1), got {cfl_safety}")));
        }
        if !(max_grad_guess > T::zero()) {
            return Err(Error::Domain("max_grad_guess must be positive".into()));
        }
        Ok(StepController { cfl_safety, max_grad_guess })
    }

    /// Largest admissible dt for the observed degeneracy factor.
    pub fn max_dt(&self, h: T, dim: usize, big_lambda: T, g_max: T) -> T {
        if !(g_max > T::zero()) {
            return T::infinity();
        }
        let two_n = T::from_usize(2 * dim).unwrap();
        self.cfl_safety * h * h / (two_n * big_lambda * g_max)
    }
}

impl<T: Real> Default for StepController<T> {
    fn default() -> Self {
        StepController { cfl_safety: real(0.9), max_grad_guess: T::one() }
    }
}

/// Full scheme configuration carried by a Dirichlet problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConfig<T> {
    pub stencil: Stencil,
    pub gradient: GradientMode,
    pub controller: StepController<T>,
}

impl<T: Real> SchemeConfig<T> {
    pub fn monotone(dim: usize) -> Self {
        SchemeConfig {
            stencil: Stencil::wide(dim),
            gradient: GradientMode::Centered,
            controller: StepController::default(),
        }
    }

    pub fn accurate(_dim: usize) -> Self {
        SchemeConfig {
            stencil: Stencil::centered(),
            gradient: GradientMode::Centered,
            controller: StepController::default(),
        }
    }
}

/// Discrete gradient at an interior or boundary point.
///
/// Returns the gradient and a flag that is set when a missing neighbor
/// forced a one-sided quotient.
pub fn discrete_gradient<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    mode: GradientMode,
) -> ([T; 2], bool) {
    let h = grid.h();
    let mut p = [T::zero(), T::zero()];
    let mut one_sided = false;
    let axes: [(i64, i64); 2] = [(1, 0), (0, 1)];
    for (axis, &(dx, dy)) in axes.iter().enumerate().take(grid.dim()) {
        let plus = grid.neighbor(si, dx, dy);
        let minus = grid.neighbor(si, -dx, -dy);
        p[axis] = match (mode, plus, minus) {
            (GradientMode::Forward, Some(pi), _) => (values[pi] - values[si]) / h,
            (GradientMode::Centered, Some(pi), Some(mi)) => (values[pi] - values[mi]) / (h + h),
            (_, Some(pi), None) => {
                one_sided = true;
                (values[pi] - values[si]) / h
            }
            (_, None, Some(mi)) => {
                one_sided = true;
                (values[si] - values[mi]) / h
            }
            (_, None, None) => T::zero(),
        };
    }
    (p, one_sided)
}

/// Directional second difference `δ²_e u = (u(x+he) − 2u(x) + u(x−he)) / (h²|e|²)`.
pub fn directional_second_difference<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    dir: [i32; 2],
) -> Result<T> {
    let plus = grid.neighbor(si, dir[0] as i64, dir[1] as i64);
    let minus = grid.neighbor(si, -(dir[0] as i64), -(dir[1] as i64));
    let (Some(pi), Some(mi)) = (plus, minus) else {
        return Err(Error::Domain(format!(
            "directional difference {dir:?} leaves the grid at point {si}"
        )));
    };
    let e2 = T::from_i32(dir[0] * dir[0] + dir[1] * dir[1]).unwrap();
    let h2 = grid.h() * grid.h();
    Ok((values[pi] - values[si] - values[si] + values[mi]) / (h2 * e2))
}

/// Discrete Hessian at an interior point.
///
/// Centered mode: centered second differences on the diagonal, four-point
/// cross differences off the diagonal. Wide mode: the Hessian reconstructed
/// from the directional second differences (exact on quadratics).
pub fn discrete_hessian<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    stencil: &Stencil,
) -> Result<SymmetricMatrix<T>> {
    let dxx = directional_second_difference(grid, values, si, [1, 0])?;
    if grid.dim() == 1 {
        return Ok(SymmetricMatrix::new_1d(dxx));
    }
    let dyy = directional_second_difference(grid, values, si, [0, 1])?;
    let dxy = match stencil.kind() {
        StencilKind::CenteredHessian => {
            let h2 = grid.h() * grid.h();
            let four = real::<T>(4.0);
            let pp = grid.neighbor(si, 1, 1);
            let mm = grid.neighbor(si, -1, -1);
            let pm = grid.neighbor(si, 1, -1);
            let mp = grid.neighbor(si, -1, 1);
            let (Some(pp), Some(mm), Some(pm), Some(mp)) = (pp, mm, pm, mp) else {
                return Err(Error::Domain(format!(
                    "cross difference leaves the grid at point {si}"
                )));
            };
            (values[pp] + values[mm] - values[pm] - values[mp]) / (four * h2)
        }
        StencilKind::WideStencil => {
            // δ²_{(1,1)} − δ²_{(1,−1)} = 2·D_12 on quadratics
            let dpp = directional_second_difference(grid, values, si, [1, 1])?;
            let dpm = directional_second_difference(grid, values, si, [1, -1])?;
            (dpp - dpm) * real::<T>(0.5)
        }
    };
    Ok(SymmetricMatrix::new_2d(dxx, dxy, dyy))
}

/// Monotone discrete `M^+`: over each orthogonal frame, sum
/// `Λ·(δ²_e)^+ + λ·(δ²_e)^−`, then take the largest frame value. Monotone in
/// every neighbor value and exact on quadratics diagonal in a stencil frame.
pub fn monotone_pucci_plus<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    stencil: &Stencil,
    lambda: T,
    big_lambda: T,
) -> Result<T> {
    monotone_pucci(grid, values, si, stencil, lambda, big_lambda, true)
}

/// Monotone discrete `M^−` (frame minimum of `λ·(δ²)^+ + Λ·(δ²)^−`).
pub fn monotone_pucci_minus<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    stencil: &Stencil,
    lambda: T,
    big_lambda: T,
) -> Result<T> {
    monotone_pucci(grid, values, si, stencil, lambda, big_lambda, false)
}

fn monotone_pucci<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    stencil: &Stencil,
    lambda: T,
    big_lambda: T,
    plus: bool,
) -> Result<T> {
    let frames = stencil.frames(grid.dim());
    if frames.is_empty() {
        return Err(Error::Domain("wide stencil has no orthogonal frame".into()));
    }
    let mut best = if plus { T::neg_infinity() } else { T::infinity() };
    for frame in &frames {
        let mut acc = T::zero();
        for &dir in frame {
            let d2 = directional_second_difference(grid, values, si, dir)?;
            let w = if (d2 > T::zero()) == plus { big_lambda } else { lambda };
            acc = acc + w * d2;
        }
        best = if plus { best.max(acc) } else { best.min(acc) };
    }
    Ok(best)
}

/// Evaluate the elliptic term `F(D²u)` at a point in the configured mode.
pub fn elliptic_value<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    op: &EllipticOperator<T>,
    stencil: &Stencil,
) -> Result<T> {
    match stencil.kind() {
        StencilKind::CenteredHessian => {
            let m = discrete_hessian(grid, values, si, stencil)?;
            Ok(op.evaluate(&m))
        }
        StencilKind::WideStencil => match op.kind() {
            OperatorKind::PucciPlus => {
                monotone_pucci_plus(grid, values, si, stencil, op.lambda(), op.big_lambda())
            }
            OperatorKind::PucciMinus => {
                monotone_pucci_minus(grid, values, si, stencil, op.lambda(), op.big_lambda())
            }
            OperatorKind::LinearTrace(a) => monotone_trace(grid, values, si, a),
            OperatorKind::SmoothBellman { mats, theta } => {
                let mut m = T::neg_infinity();
                let mut traces = [T::zero(); 8];
                if mats.len() > traces.len() {
                    return Err(Error::Domain("monotone Bellman supports at most 8 matrices".into()));
                }
                for (slot, a) in traces.iter_mut().zip(mats.iter()) {
                    *slot = monotone_trace(grid, values, si, a)?;
                    m = m.max(*slot);
                }
                let mut acc = T::zero();
                for &t in traces.iter().take(mats.len()) {
                    acc = acc + ((t - m) / *theta).exp();
                }
                let k = T::from_usize(mats.len()).unwrap();
                Ok(m + *theta * acc.ln() - *theta * k.ln())
            }
        },
    }
}

fn monotone_trace<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
    a: &SymmetricMatrix<T>,
) -> Result<T> {
    if grid.dim() == 2 && a.entry(0, 1).abs() > real::<T>(1e-14) {
        return Err(Error::Domain(
            "monotone mode requires an axis-diagonal coefficient matrix".into(),
        ));
    }
    let mut acc = a.entry(0, 0) * directional_second_difference(grid, values, si, [1, 0])?;
    if grid.dim() == 2 {
        acc = acc + a.entry(1, 1) * directional_second_difference(grid, values, si, [0, 1])?;
    }
    Ok(acc)
}

/// Statistics gathered while evaluating one explicit step.
#[derive(Clone, Copy, Debug)]
pub struct StepStats<T> {
    /// Largest degeneracy factor over interior points.
    pub g_max: T,
    /// Largest discrete gradient magnitude over interior points.
    pub grad_max: T,
    /// Monotonicity certificate: max of `|F_h|·|∇g|·h/(2λ·g)`. Below one,
    /// the committed update is nondecreasing in every neighbor value.
    pub coupling_max: T,
}

impl<T: Real> StepStats<T> {
    fn zero() -> Self {
        StepStats { g_max: T::zero(), grad_max: T::zero(), coupling_max: T::zero() }
    }

    fn merge(self, other: Self) -> Self {
        StepStats {
            g_max: self.g_max.max(other.g_max),
            grad_max: self.grad_max.max(other.grad_max),
            coupling_max: self.coupling_max.max(other.coupling_max),
        }
    }
}

/// Precomputed interior-loop dispatch: interior points always carry their
/// full Chebyshev-1 neighborhood inside the array, so neighbor lookups
/// reduce to fixed strides. Expressions mirror the generic helpers exactly,
/// so the fast path is bitwise identical to them.
enum OpPlan<'a, T> {
    WideTrace { a00: T, a11: T },
    WidePucci { frames: Vec<Vec<(i64, T)>>, plus: bool },
    WideBellman { coeffs: Vec<(T, T)>, theta: T, ln_k: T },
    Centered { op: &'a EllipticOperator<T> },
}

struct EvalPlan<'a, T> {
    sx: i64,
    sy: i64,
    h: T,
    two_h: T,
    four_h2: T,
    denom_x: T,
    denom_y: T,
    lambda: T,
    big_lambda: T,
    op_plan: OpPlan<'a, T>,
}

impl<'a, T: Real> EvalPlan<'a, T> {
    fn build(
        grid: &Grid<T>,
        op: &'a EllipticOperator<T>,
        stencil: &Stencil,
    ) -> Result<Option<Self>> {
        if stencil.reach() > 1 {
            return Ok(None);
        }
        let h = grid.h();
        let h2 = h * h;
        let sx = 1i64;
        let sy = grid.nx() as i64;
        let op_plan = match stencil.kind() {
            StencilKind::CenteredHessian => OpPlan::Centered { op },
            StencilKind::WideStencil => match op.kind() {
                OperatorKind::LinearTrace(a) => {
                    if grid.dim() == 2 && a.entry(0, 1).abs() > real::<T>(1e-14) {
                        return Err(Error::Domain(
                            "monotone mode requires an axis-diagonal coefficient matrix".into(),
                        ));
                    }
                    OpPlan::WideTrace { a00: a.entry(0, 0), a11: a.entry(1, 1) }
                }
                OperatorKind::PucciPlus | OperatorKind::PucciMinus => {
                    let frames = stencil
                        .frames(grid.dim())
                        .into_iter()
                        .map(|frame| {
                            frame
                                .into_iter()
                                .map(|d| {
                                    let stride = d[0] as i64 * sx + d[1] as i64 * sy;
                                    let e2 = T::from_i32(d[0] * d[0] + d[1] * d[1]).unwrap();
                                    (stride, h2 * e2)
                                })
                                .collect()
                        })
                        .collect();
                    OpPlan::WidePucci {
                        frames,
                        plus: matches!(op.kind(), OperatorKind::PucciPlus),
                    }
                }
                OperatorKind::SmoothBellman { mats, theta } => {
                    if mats.len() > 8 {
                        return Err(Error::Domain(
                            "monotone Bellman supports at most 8 matrices".into(),
                        ));
                    }
                    let mut coeffs = Vec::with_capacity(mats.len());
                    for a in mats {
                        if grid.dim() == 2 && a.entry(0, 1).abs() > real::<T>(1e-14) {
                            return Err(Error::Domain(
                                "monotone mode requires an axis-diagonal coefficient matrix"
                                    .into(),
                            ));
                        }
                        coeffs.push((a.entry(0, 0), a.entry(1, 1)));
                    }
                    let ln_k = T::from_usize(mats.len()).unwrap().ln();
                    OpPlan::WideBellman { coeffs, theta: *theta, ln_k }
                }
            },
        };
        Ok(Some(EvalPlan {
            sx,
            sy,
            h,
            two_h: h + h,
            four_h2: real::<T>(4.0) * h2,
            denom_x: h2 * T::one(),
            denom_y: h2 * T::one(),
            lambda: op.lambda(),
            big_lambda: op.big_lambda(),
            op_plan,
        }))
    }

    #[inline]
    fn dsd(prev: &[T], si: usize, stride: i64, denom: T) -> T {
        let p = prev[(si as i64 + stride) as usize];
        let m = prev[(si as i64 - stride) as usize];
        let c = prev[si];
        (p - c - c + m) / denom
    }

    #[inline]
    fn gradient(&self, prev: &[T], si: usize, dim: usize, mode: GradientMode) -> [T; 2] {
        let mut p = [T::zero(), T::zero()];
        let strides = [self.sx, self.sy];
        for (axis, &s) in strides.iter().enumerate().take(dim) {
            let plus = prev[(si as i64 + s) as usize];
            p[axis] = match mode {
                GradientMode::Centered => (plus - prev[(si as i64 - s) as usize]) / self.two_h,
                GradientMode::Forward => (plus - prev[si]) / self.h,
            };
        }
        p
    }

    #[inline]
    fn elliptic(&self, prev: &[T], si: usize, dim: usize) -> T {
        match &self.op_plan {
            OpPlan::WideTrace { a00, a11 } => {
                let mut acc = *a00 * Self::dsd(prev, si, self.sx, self.denom_x);
                if dim == 2 {
                    acc = acc + *a11 * Self::dsd(prev, si, self.sy, self.denom_y);
                }
                acc
            }
            OpPlan::WidePucci { frames, plus } => {
                let (lambda, big) = (self.lambda, self.big_lambda);
                let mut best = if *plus { T::neg_infinity() } else { T::infinity() };
                for frame in frames {
                    let mut acc = T::zero();
                    for &(stride, denom) in frame {
                        let d2 = Self::dsd(prev, si, stride, denom);
                        let w = if (d2 > T::zero()) == *plus { big } else { lambda };
                        acc = acc + w * d2;
                    }
                    best = if *plus { best.max(acc) } else { best.min(acc) };
                }
                best
            }
            OpPlan::WideBellman { coeffs, theta, ln_k } => {
                let dxx = Self::dsd(prev, si, self.sx, self.denom_x);
                let dyy = if dim == 2 {
                    Self::dsd(prev, si, self.sy, self.denom_y)
                } else {
                    T::zero()
                };
                let mut m = T::neg_infinity();
                let mut traces = [T::zero(); 8];
                for (slot, &(a00, a11)) in traces.iter_mut().zip(coeffs.iter()) {
                    let mut t = a00 * dxx;
                    if dim == 2 {
                        t = t + a11 * dyy;
                    }
                    *slot = t;
                    m = m.max(t);
                }
                let mut acc = T::zero();
                for &t in traces.iter().take(coeffs.len()) {
                    acc = acc + ((t - m) / *theta).exp();
                }
                m + *theta * acc.ln() - *theta * *ln_k
            }
            OpPlan::Centered { op } => {
                let dxx = Self::dsd(prev, si, self.sx, self.denom_x);
                let m = if dim == 1 {
                    SymmetricMatrix::new_1d(dxx)
                } else {
                    let dyy = Self::dsd(prev, si, self.sy, self.denom_y);
                    let pp = prev[(si as i64 + self.sx + self.sy) as usize];
                    let mm = prev[(si as i64 - self.sx - self.sy) as usize];
                    let pm = prev[(si as i64 + self.sx - self.sy) as usize];
                    let mp = prev[(si as i64 - self.sx + self.sy) as usize];
                    let dxy = (pp + mm - pm - mp) / self.four_h2;
                    SymmetricMatrix::new_2d(dxx, dxy, dyy)
                };
                op.evaluate(&m)
            }
        }
    }
}

/// One explicit Euler step `u ← u + dt·(g(Du_h)·F(D²_h u) + f)` on the
/// interior, with Dirichlet values for time `t + dt` written at boundary
/// points.
///
/// The step is evaluated first and committed only if the controller accepts
/// the dt against the degeneracy factor actually observed; otherwise it
/// returns [`Error::StepRejected`] with a suggested dt.
///
/// The interior update is a parallel map over rows of the immutable previous
/// slice; the result is bitwise independent of the thread count.
#[allow(clippy::too_many_arguments)]
pub fn step<T: Real>(
    grid: &Grid<T>,
    prev: &[T],
    boundary_next: &[(usize, T)],
    op: &EllipticOperator<T>,
    profile: &DegeneracyProfile<T>,
    source: Option<&[T]>,
    dt: T,
    cfg: &SchemeConfig<T>,
    out: &mut [T],
) -> Result<StepStats<T>> {
    debug_assert_eq!(prev.len(), grid.n_space());
    debug_assert_eq!(out.len(), grid.n_space());
    out.copy_from_slice(prev);
    for &(si, v) in boundary_next {
        out[si] = v;
    }

    let nx = grid.nx();
    let dim = grid.dim();
    let lambda = op.lambda();
    let mask = grid.mask();
    let plan = EvalPlan::build(grid, op, &cfg.stencil)?;

    // γ = 0 has no gradient coupling; skip the certificate arithmetic there.
    let track_coupling = profile.gamma != T::zero();

    // Tight kernel for unmasked 1D grids with an axis stencil: slice windows
    // let the compiler drop bounds checks in the innermost loop. Expressions
    // match the generic path bitwise.
    if dim == 1 && mask.is_none() && source.is_none() && nx >= 3 {
        if let Some(plan) = &plan {
            let kernel = match &plan.op_plan {
                OpPlan::WideTrace { a00, .. } => Some((*a00, None)),
                OpPlan::WidePucci { plus, .. } => Some((T::zero(), Some(*plus))),
                _ => None,
            };
            if let Some((a00, pucci)) = kernel {
                let mut stats: StepStats<T> = StepStats::zero();
                let mut grad_sq_max = T::zero();
                let (two_h, h_step, denom) = (plan.two_h, plan.h, plan.denom_x);
                let (lam, big) = (plan.lambda, plan.big_lambda);
                let forward = cfg.gradient == GradientMode::Forward;
                let mut bad = false;
                for (w, slot) in prev.windows(3).zip(out[1..nx - 1].iter_mut()) {
                    let (l, c, r) = (w[0], w[1], w[2]);
                    let p0 = if forward { (r - c) / h_step } else { (r - l) / two_h };
                    let g = profile.evaluate([p0, T::zero()])?;
                    let d2 = (r - c - c + l) / denom;
                    let ell = match pucci {
                        None => a00 * d2,
                        Some(plus) => {
                            let wgt = if (d2 > T::zero()) == plus { big } else { lam };
                            wgt * d2
                        }
                    };
                    let next = c + dt * (g * ell);
                    bad |= !next.is_finite();
                    *slot = next;
                    grad_sq_max = grad_sq_max.max(p0 * p0);
                    stats.g_max = stats.g_max.max(g);
                    if track_coupling && g > T::zero() {
                        let coupling = ell.abs() * profile.gradient_magnitude([p0, T::zero()])
                            * h_step
                            / ((lambda + lambda) * g);
                        stats.coupling_max = stats.coupling_max.max(coupling);
                    }
                }
                if bad {
                    return Err(Error::NonFinite("update produced a non-finite value".into()));
                }
                stats.grad_max = grad_sq_max.sqrt();
                let bound =
                    cfg.controller.max_dt(grid.h(), grid.dim(), op.big_lambda(), stats.g_max);
                if dt > bound {
                    return Err(Error::StepRejected { dt: to_f64(dt), suggested: to_f64(bound) });
                }
                return Ok(stats);
            }
        }
    }

    let process_row = |j: usize, row: &mut [T]| -> Result<StepStats<T>> {
        let mut stats: StepStats<T> = StepStats::zero();
        let mut grad_sq_max = T::zero();
        let row_inner = mask.is_some() || dim == 1 || (j > 0 && j + 1 < grid.ny());
        for i in 0..nx {
            let si = j * nx + i;
            let interior = match mask {
                Some(m) => m[si],
                None => row_inner && i > 0 && i + 1 < nx,
            };
            if !interior {
                continue;
            }
            let (p, g, ell) = match &plan {
                Some(plan) => {
                    let p = plan.gradient(prev, si, dim, cfg.gradient);
                    let g = profile.evaluate(p)?;
                    (p, g, plan.elliptic(prev, si, dim))
                }
                None => {
                    let (p, _) = discrete_gradient(grid, prev, si, cfg.gradient);
                    let g = profile.evaluate(p)?;
                    (p, g, elliptic_value(grid, prev, si, op, &cfg.stencil)?)
                }
            };
            let f = source.map_or(T::zero(), |f| f[si]);
            let next = prev[si] + dt * (g * ell + f);
            if !next.is_finite() {
                return Err(Error::NonFinite(format!(
                    "update at space index {si} produced {next}"
                )));
            }
            row[i] = next;
            grad_sq_max = grad_sq_max.max(p[0] * p[0] + p[1] * p[1]);
            stats.g_max = stats.g_max.max(g);
            if track_coupling && g > T::zero() {
                let coupling = ell.abs() * profile.gradient_magnitude(p) * grid.h()
                    / ((lambda + lambda) * g);
                stats.coupling_max = stats.coupling_max.max(coupling);
            }
        }
        // sqrt commutes with max, so one root per row suffices
        stats.grad_max = grad_sq_max.sqrt();
        Ok(stats)
    };

    let parallel = grid.ny() >= 8 && grid.n_space() >= 1 << 14 && rayon::current_num_threads() > 1;
    let stats = if parallel {
        out.par_chunks_mut(nx)
            .enumerate()
            .map(|(j, row)| process_row(j, row))
            .try_reduce(StepStats::zero, |a, b| Ok(a.merge(b)))?
    } else {
        let mut acc = StepStats::zero();
        for (j, row) in out.chunks_mut(nx).enumerate() {
            acc = acc.merge(process_row(j, row)?);
        }
        acc
    };

    let bound = cfg.controller.max_dt(grid.h(), grid.dim(), op.big_lambda(), stats.g_max);
    if dt > bound {
        return Err(Error::StepRejected { dt: to_f64(dt), suggested: to_f64(bound) });
    }
    Ok(stats)
}

/// Gradient with interior-sided quotients at array edges, for corner
/// compatibility checks: centered where possible, one-sided toward the
/// interior otherwise.
pub fn interior_sided_gradient<T: Real>(grid: &Grid<T>, values: &[T], si: usize) -> [T; 2] {
    discrete_gradient(grid, values, si, GradientMode::Centered).0
}

/// Hessian with interior-sided differences at array edges; exact on
/// quadratics. Used where the centered stencil does not fit.
pub fn interior_sided_hessian<T: Real>(
    grid: &Grid<T>,
    values: &[T],
    si: usize,
) -> SymmetricMatrix<T> {
    let h2 = grid.h() * grid.h();
    let (i, j) = grid.split(si);
    let two = real::<T>(2.0);

    // one-sided 3-point second difference toward the interior
    let second = |axis: usize| -> T {
        let (n, pos) = if axis == 0 { (grid.nx(), i) } else { (grid.ny(), j) };
        let dir: i64 = if pos == 0 {
            1
        } else if pos + 1 == n {
            -1
        } else {
            0
        };
        let at = |steps: i64| {
            let (dx, dy) = if axis == 0 { (steps, 0) } else { (0, steps) };
            values[grid.neighbor(si, dx, dy).expect("validated offset")]
        };
        if dir == 0 {
            (at(1) - two * at(0) + at(-1)) / h2
        } else {
            (at(0) - two * at(dir) + at(2 * dir)) / h2
        }
    };

    let dxx = second(0);
    if grid.dim() == 1 {
        return SymmetricMatrix::new_1d(dxx);
    }
    let dyy = second(1);

    let sx: i64 = if i + 1 == grid.nx() { -1 } else { 1 };
    let sy: i64 = if j + 1 == grid.ny() { -1 } else { 1 };
    let centered_x = i > 0 && i + 1 < grid.nx();
    let centered_y = j > 0 && j + 1 < grid.ny();
    let v = |dx: i64, dy: i64| values[grid.neighbor(si, dx, dy).expect("validated offset")];
    let dxy = match (centered_x, centered_y) {
        (true, true) => (v(1, 1) + v(-1, -1) - v(1, -1) - v(-1, 1)) / (real::<T>(4.0) * h2),
        (false, true) => {
            let sxt = T::from_i64(sx).unwrap();
            sxt * (v(sx, 1) - v(sx, -1) - v(0, 1) + v(0, -1)) / (two * h2)
        }
        (true, false) => {
            let syt = T::from_i64(sy).unwrap();
            syt * (v(1, sy) - v(-1, sy) - v(1, 0) + v(-1, 0)) / (two * h2)
        }
        (false, false) => {
            let st = T::from_i64(sx * sy).unwrap();
            st * (v(sx, sy) - v(sx, 0) - v(0, sy) + v(0, 0)) / h2
        }
    };
    SymmetricMatrix::new_2d(dxx, dxy, dyy)
}
