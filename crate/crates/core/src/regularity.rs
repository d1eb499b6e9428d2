//! Measurement of regularity structure: difference-quotient fields,
//! oscillation-decay and Hölder exponent fitting, intrinsic cylinders, the
//! density dichotomy, and the time modulus.
//!
//! Exponent fits are least squares in log-log space over dyadic radii,
//! matching the dyadic iteration the oscillation estimates run on. Flat or
//! near-flat fields short-circuit with [`Error::FlatField`]: the Hölder
//! invariants hold vacuously there and a log fit would be meaningless.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{oscillation_over, Cylinder, Grid, Point, SpaceTimeField};
use crate::scalar::{real, to_f64, Real};

/// A vector field sampled on a grid, with a per-point validity mask (forward
/// quotients are undefined where the offset neighbor leaves the domain).
#[derive(Clone, Debug)]
pub struct VectorField<T> {
    grid: Arc<Grid<T>>,
    dim: usize,
    comps: Vec<Vec<T>>,
    valid: Vec<bool>,
}

impl<T: Real> VectorField<T> {
    /// Sample a closed-form vector field everywhere (oracle construction).
    pub fn synthetic(grid: Arc<Grid<T>>, f: impl Fn(Point<T>) -> [T; 2]) -> Self {
        let dim = grid.dim();
        let n = grid.n_space();
        let mut comps = vec![vec![T::zero(); n * grid.n_slices()]; dim];
        for k in 0..grid.n_slices() {
            for si in 0..n {
                let v = f(grid.point(si, k));
                for (c, comp) in comps.iter_mut().enumerate() {
                    comp[k * n + si] = v[c];
                }
            }
        }
        let valid = (0..n).map(|si| grid.is_active(si)).collect();
        VectorField { grid, dim, comps, valid }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_valid(&self, si: usize) -> bool {
        self.valid[si]
    }

    pub fn component(&self, c: usize, si: usize, k: usize) -> T {
        self.comps[c][k * self.grid.n_space() + si]
    }

    pub fn vector_at(&self, si: usize, k: usize) -> [T; 2] {
        let mut v = [T::zero(), T::zero()];
        for (c, slot) in v.iter_mut().enumerate().take(self.dim) {
            *slot = self.component(c, si, k);
        }
        v
    }

    /// `v^h = Σ_k (u_k^h)²`, the squared magnitude companion field.
    pub fn squared_magnitude(&self, si: usize, k: usize) -> T {
        let v = self.vector_at(si, k);
        v[0] * v[0] + v[1] * v[1]
    }

    pub fn magnitude(&self, si: usize, k: usize) -> T {
        self.squared_magnitude(si, k).sqrt()
    }

    /// Sup of `|Du|` over valid points of a region.
    pub fn sup_magnitude_in(&self, region: &Cylinder<T>) -> Result<T> {
        let pts = self.grid.space_points_in(region);
        let slices = self.grid.slices_in(region);
        let mut sup = T::zero();
        let mut any = false;
        for &k in &slices {
            for &si in &pts {
                if self.valid[si] {
                    sup = sup.max(self.magnitude(si, k));
                    any = true;
                }
            }
        }
        if !any {
            return Err(Error::EmptyRegion("no valid point in region".into()));
        }
        Ok(sup)
    }

    /// Number of valid spatial points inside the region's ball.
    pub fn valid_points_in(&self, region: &Cylinder<T>) -> usize {
        self.grid
            .space_points_in(region)
            .iter()
            .filter(|&&si| self.valid[si])
            .count()
    }
}

/// Per-axis forward difference quotients `u_k^h = (u(x+he_k,t) − u(x,t))/h`,
/// for `h` a multiple of the grid step. The squared-magnitude companion
/// `v^h` is available through [`VectorField::squared_magnitude`].
pub fn difference_quotient_field<T: Real>(
    u: &SpaceTimeField<T>,
    h: T,
) -> Result<VectorField<T>> {
    let grid = u.grid().clone();
    let ratio = to_f64(h / grid.h());
    let w = ratio.round();
    if w < 1.0 || (ratio - w).abs() > 1e-6 * w {
        return Err(Error::Domain(format!(
            "quotient step {h} is not a positive multiple of the grid step {}",
            grid.h()
        )));
    }
    let w = w as i64;
    let dim = grid.dim();
    let n = grid.n_space();
    let step = T::from_i64(w).unwrap() * grid.h();
    let mut comps = vec![vec![T::zero(); n * grid.n_slices()]; dim];
    let mut valid = vec![false; n];
    let offsets: [(i64, i64); 2] = [(w, 0), (0, w)];
    for si in 0..n {
        let mut ok = u.grid().is_active(si);
        for &(dx, dy) in offsets.iter().take(dim) {
            match grid.neighbor(si, dx, dy) {
                Some(ni) if grid.is_active(ni) => {}
                _ => ok = false,
            }
        }
        valid[si] = ok;
        if !ok {
            continue;
        }
        for k in 0..grid.n_slices() {
            for (axis, &(dx, dy)) in offsets.iter().enumerate().take(dim) {
                let ni = grid.neighbor(si, dx, dy).expect("validated");
                comps[axis][k * n + si] = (u.at(ni, k) - u.at(si, k)) / step;
            }
        }
    }
    Ok(VectorField { grid, dim, comps, valid })
}

/// Least-squares line through `(x_i, y_i)`: returns (slope, intercept,
/// max absolute residual).
pub(crate) fn log_log_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n = T::from_usize(xs.len()).unwrap();
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sx = sx + x;
        sy = sy + y;
        sxx = sxx + x * x;
        sxy = sxy + x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mut resid = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        resid = resid.max((y - (slope * x + intercept)).abs());
    }
    (slope, intercept, resid)
}

/// Result of an oscillation-decay fit `Σ_k osc_{Q_r} D_k u ≈ C·r^α`.
#[derive(Clone, Debug)]
pub struct OscFit<T> {
    /// Fitted exponent, capped at 1 (a slope above one means the field is at
    /// least Lipschitz at these scales; `slope` keeps the raw value).
    pub alpha: T,
    pub slope: T,
    pub constant: T,
    pub residual: T,
    pub radii: Vec<T>,
    pub oscillations: Vec<T>,
}

/// Fit the oscillation decay of a gradient field over dyadic cylinders
/// centered at `center`. Radii whose cylinder holds fewer than two valid
/// grid points are dropped; at least four must survive.
pub fn fit_oscillation_decay<T: Real>(
    du: &VectorField<T>,
    center: Point<T>,
    radii: &[T],
) -> Result<OscFit<T>> {
    if radii.len() < 4 {
        return Err(Error::Domain("oscillation fit needs at least 4 radii".into()));
    }
    let grid = du.grid();
    let mut used_r = Vec::new();
    let mut oscs = Vec::new();
    for &r in radii {
        let region = Cylinder::standard(center.x, center.t, r)?;
        if du.valid_points_in(&region) < 2 {
            continue;
        }
        let mut total = T::zero();
        let mut ok = true;
        for c in 0..du.dim() {
            match oscillation_over(grid, &region, |si, k| {
                du.is_valid(si).then(|| du.component(c, si, k))
            }) {
                Ok(o) => total = total + o,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            used_r.push(r);
            oscs.push(total);
        }
    }
    if used_r.len() < 4 {
        return Err(Error::Domain(format!(
            "only {} of {} radii are resolvable on this grid",
            used_r.len(),
            radii.len()
        )));
    }
    let floor = real::<T>(10.0) * T::epsilon();
    if oscs.iter().any(|&o| o < floor) {
        return Err(Error::FlatField);
    }
    let xs: Vec<T> = used_r.iter().map(|&r| r.ln()).collect();
    let ys: Vec<T> = oscs.iter().map(|&o| o.ln()).collect();
    let (slope, intercept, residual) = log_log_fit(&xs, &ys);
    Ok(OscFit {
        alpha: slope.min(T::one()),
        slope,
        constant: intercept.exp(),
        residual,
        radii: used_r,
        oscillations: oscs,
    })
}

/// The time-modulus exponent `(1+α)/(2−αγ)` predicted by the uniform
/// Hölder estimate.
pub fn predicted_time_exponent<T: Real>(alpha: T, gamma: T) -> T {
    (T::one() + alpha) / (real::<T>(2.0) - alpha * gamma)
}

/// Hölder exponent of `Du` at a gradient-vanishing anchor, measured through
/// the solution itself: where `Du(anchor) = 0`, the oscillation of `u` over
/// `B_r` around the anchor decays like `r^{1+α}`, so `α = slope − 1`.
///
/// Sampling a difference-quotient field near a degenerate point floors its
/// oscillation at the quotient scale `h^α`, which inflates fitted slopes;
/// the values of `u` carry no such floor, so this estimator stays unbiased
/// down to grid scale. `time_stretch` sets the cylinder's time window;
/// keep it small so the spatial decay dominates the measurement.
pub fn fit_edge_exponent<T: Real>(
    u: &SpaceTimeField<T>,
    anchor: Point<T>,
    radii: &[T],
    time_stretch: T,
) -> Result<OscFit<T>> {
    if radii.len() < 4 {
        return Err(Error::Domain("edge exponent fit needs at least 4 radii".into()));
    }
    let grid = u.grid();
    let mut used_r = Vec::new();
    let mut oscs = Vec::new();
    for &r in radii {
        let region = Cylinder::stretched(anchor.x, anchor.t, r, time_stretch)?;
        if grid.space_points_in(&region).len() < 2 {
            continue;
        }
        if let Ok(o) = u.oscillation(&region) {
            used_r.push(r);
            oscs.push(o);
        }
    }
    if used_r.len() < 4 {
        return Err(Error::Domain(format!(
            "only {} of {} radii are resolvable on this grid",
            used_r.len(),
            radii.len()
        )));
    }
    let floor = real::<T>(10.0) * T::epsilon();
    if oscs.iter().any(|&o| o < floor) {
        return Err(Error::FlatField);
    }
    let xs: Vec<T> = used_r.iter().map(|&r| r.ln()).collect();
    let ys: Vec<T> = oscs.iter().map(|&o| o.ln()).collect();
    let (slope, intercept, residual) = log_log_fit(&xs, &ys);
    let alpha_raw = slope - T::one();
    Ok(OscFit {
        alpha: alpha_raw.min(T::one()),
        slope: alpha_raw,
        constant: intercept.exp(),
        residual,
        radii: used_r,
        oscillations: oscs,
    })
}

/// Result of a time-modulus fit at a fixed spatial point.
#[derive(Clone, Debug)]
pub struct TimeFit<T> {
    pub fitted: T,
    pub predicted: T,
    pub lags: Vec<T>,
    pub increments: Vec<T>,
}

/// Fit `sup_t |u(x,t) − u(x,t−τ)| ≈ C·τ^β` over dyadic lags and compare the
/// fitted exponent with `(1+α)/(2−αγ)`.
pub fn fit_time_modulus<T: Real>(
    u: &SpaceTimeField<T>,
    si: usize,
    gamma: T,
    alpha_space: T,
    base_lag: T,
    n_lags: usize,
) -> Result<TimeFit<T>> {
    let grid = u.grid();
    if !grid.is_interior(si) {
        return Err(Error::Domain("time modulus wants an interior spatial point".into()));
    }
    let mut lag_steps: Vec<usize> = Vec::new();
    for i in 0..n_lags {
        let tau = base_lag * real::<T>(0.5).powi(i as i32);
        let steps = to_f64(tau / grid.dt()).round().max(1.0) as usize;
        if steps <= grid.steps() && !lag_steps.contains(&steps) {
            lag_steps.push(steps);
        }
    }
    if lag_steps.len() < 4 {
        return Err(Error::Domain(format!(
            "only {} distinct dyadic lags are representable; need 4",
            lag_steps.len()
        )));
    }
    let mut lags = Vec::new();
    let mut incs = Vec::new();
    for &steps in &lag_steps {
        let mut inc = T::zero();
        for k in steps..grid.n_slices() {
            inc = inc.max((u.at(si, k) - u.at(si, k - steps)).abs());
        }
        lags.push(T::from_usize(steps).unwrap() * grid.dt());
        incs.push(inc);
    }
    let floor = real::<T>(10.0) * T::epsilon();
    if incs.iter().any(|&v| v < floor) {
        return Err(Error::FlatField);
    }
    let xs: Vec<T> = lags.iter().map(|&v| v.ln()).collect();
    let ys: Vec<T> = incs.iter().map(|&v| v.ln()).collect();
    let (slope, _, _) = log_log_fit(&xs, &ys);
    Ok(TimeFit {
        fitted: slope,
        predicted: predicted_time_exponent(alpha_space, gamma),
        lags,
        increments: incs,
    })
}

/// The gradient's own time-modulus exponent `α/(2−αγ)` from the uniform
/// Hölder estimate.
pub fn predicted_gradient_time_exponent<T: Real>(alpha: T, gamma: T) -> T {
    alpha / (real::<T>(2.0) - alpha * gamma)
}

/// Fit the time modulus of the quotient-gradient magnitude `|Du_h|(x, ·)`
/// at a valid spatial point, against the predicted `α/(2−αγ)`.
pub fn fit_gradient_time_modulus<T: Real>(
    du: &VectorField<T>,
    si: usize,
    gamma: T,
    alpha_space: T,
    base_lag: T,
    n_lags: usize,
) -> Result<TimeFit<T>> {
    if !du.is_valid(si) {
        return Err(Error::Domain("gradient time modulus wants a valid quotient point".into()));
    }
    let grid = du.grid().clone();
    let mut lag_steps: Vec<usize> = Vec::new();
    for i in 0..n_lags {
        let tau = base_lag * real::<T>(0.5).powi(i as i32);
        let steps = to_f64(tau / grid.dt()).round().max(1.0) as usize;
        if steps <= grid.steps() && !lag_steps.contains(&steps) {
            lag_steps.push(steps);
        }
    }
    if lag_steps.len() < 4 {
        return Err(Error::Domain(format!(
            "only {} distinct dyadic lags are representable; need 4",
            lag_steps.len()
        )));
    }
    let mut lags = Vec::new();
    let mut incs = Vec::new();
    for &steps in &lag_steps {
        let mut inc = T::zero();
        for k in steps..grid.n_slices() {
            inc = inc.max((du.magnitude(si, k) - du.magnitude(si, k - steps)).abs());
        }
        lags.push(T::from_usize(steps).unwrap() * grid.dt());
        incs.push(inc);
    }
    let floor = real::<T>(10.0) * T::epsilon();
    if incs.iter().any(|&v| v < floor) {
        return Err(Error::FlatField);
    }
    let xs: Vec<T> = lags.iter().map(|&v| v.ln()).collect();
    let ys: Vec<T> = incs.iter().map(|&v| v.ln()).collect();
    let (slope, _, _) = log_log_fit(&xs, &ys);
    Ok(TimeFit {
        fitted: slope,
        predicted: predicted_gradient_time_exponent(alpha_space, gamma),
        lags,
        increments: incs,
    })
}

/// Fraction of valid grid points in the region with `Du·e ≤ level`
/// (grid-cell measure).
pub fn density_check<T: Real>(
    du: &VectorField<T>,
    e: [T; 2],
    level: T,
    region: &Cylinder<T>,
) -> Result<T> {
    let norm = (e[0] * e[0] + e[1] * e[1]).sqrt();
    if (norm - T::one()).abs() > real::<T>(1e-9) {
        return Err(Error::Domain(format!("direction must be a unit vector, |e| = {norm}")));
    }
    let grid = du.grid();
    let pts = grid.space_points_in(region);
    let slices = grid.slices_in(region);
    let mut total = 0usize;
    let mut below = 0usize;
    for &k in &slices {
        for &si in &pts {
            if !du.is_valid(si) {
                continue;
            }
            total += 1;
            let v = du.vector_at(si, k);
            if v[0] * e[0] + v[1] * e[1] <= level {
                below += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyRegion("density check region holds no valid point".into()));
    }
    Ok(T::from_usize(below).unwrap() / T::from_usize(total).unwrap())
}

/// Parameters of the density dichotomy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DichotomyParams<T> {
    /// Density level `l ∈ (1/2, 1)`.
    pub l: T,
    /// Measure fraction threshold `μ > 0`.
    pub mu: T,
    /// Gradient shrink factor per level, `1 − δ`.
    pub delta: T,
    /// Spatial shrink factor per level.
    pub tau: T,
    /// Closeness threshold ε₀ (descriptive; the defaults wire `l = 1 − ε₀²/2`).
    pub eps0: T,
    /// Measure threshold ε₁ as a fraction of `|Q₁|` (descriptive; `μ = ε₁/|Q₁|`).
    pub eps1_fraction: T,
    /// Perturbation threshold η (descriptive only).
    pub eta: T,
}

impl<T: Real> Default for DichotomyParams<T> {
    fn default() -> Self {
        Self::standard()
    }
}

impl<T: Real> DichotomyParams<T> {
    /// Standard parameters: `l = 1 − ε₀²/2` and `μ = ε₁/|Q₁|` with
    /// thresholds `(ε₀, ε₁/|Q₁|, η) = (0.1, 0.01, 0.05)`, and
    /// `(τ, δ) = (0.25, 0.1)`.
    pub fn standard() -> Self {
        let eps0 = real::<T>(0.1);
        DichotomyParams {
            l: T::one() - eps0 * eps0 * real(0.5),
            mu: real(0.01),
            delta: real(0.1),
            tau: real(0.25),
            eps0,
            eps1_fraction: real(0.01),
            eta: real(0.05),
        }
    }

    /// Check the structural constraints, including the time-scale condition
    /// `τ < min{1−δ, (1−δ)^{1+γ}}`.
    pub fn validate(&self, gamma: T) -> Result<()> {
        let half = real::<T>(0.5);
        if !(self.l > half && self.l < T::one()) {
            return Err(Error::Domain(format!("l must lie in (1/2, 1), got {}", self.l)));
        }
        if !(self.mu > T::zero()) {
            return Err(Error::Domain("mu must be positive".into()));
        }
        if !(self.delta > T::zero() && self.delta < T::one()) {
            return Err(Error::Domain(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        let shrink = T::one() - self.delta;
        let cap = shrink.min(shrink.powf(T::one() + gamma));
        if !(self.tau > T::zero() && self.tau < cap) {
            return Err(Error::Domain(format!(
                "cond:tau violated: tau = {} must be below min{{1−δ, (1−δ)^(1+γ)}} = {cap}",
                self.tau
            )));
        }
        if !(self.eps0 > T::zero()) || !(self.eps1_fraction > T::zero()) || !(self.eta > T::zero())
        {
            return Err(Error::Domain("eps0, eps1, eta must be positive".into()));
        }
        Ok(())
    }
}

/// Unit directions sampled for the dichotomy: all ±axis directions plus
/// `extra` uniformly spaced planar angles in 2D.
pub fn sample_directions<T: Real>(dim: usize, extra: usize) -> Vec<[T; 2]> {
    let mut dirs = vec![[T::one(), T::zero()], [-T::one(), T::zero()]];
    if dim == 2 {
        dirs.push([T::zero(), T::one()]);
        dirs.push([T::zero(), -T::one()]);
        for k in 0..extra {
            let angle = real::<T>(2.0 * std::f64::consts::PI) * T::from_usize(k).unwrap()
                / T::from_usize(extra).unwrap();
            dirs.push([angle.cos(), angle.sin()]);
        }
    }
    dirs
}

/// Why the dichotomy iteration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DichotomyStop {
    /// The measure condition failed at this level.
    MeasureConditionFailed(usize),
    /// The level budget `m₁ = ⌊log ε / log(1−δ)⌋` ran out.
    EpsilonBudget(usize),
    /// The next cylinder has too few grid points to keep measuring.
    Resolution(usize),
}

/// One level of the dichotomy trace.
#[derive(Clone, Debug)]
pub struct DichotomyLevel<T> {
    pub level: usize,
    pub radius: T,
    pub grad_bound: T,
    pub fractions: Vec<T>,
    pub condition_held: bool,
    /// Sup of |Du| over the next intrinsic cylinder.
    pub sup_grad_next: Option<T>,
    /// When the condition held: whether `sup |Du| < (1−δ)^{i+1} + tol` on the
    /// next intrinsic cylinder.
    pub shrinkage_ok: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct DichotomyTrace<T> {
    pub levels: Vec<DichotomyLevel<T>>,
    pub m1: usize,
    pub stop: DichotomyStop,
    pub directions: Vec<[T; 2]>,
    pub tol: T,
}

/// Iterate the density dichotomy over intrinsic cylinders
/// `Q_{τ^i}^{(1−δ)^i}` anchored at `(center, top_time)`.
///
/// Precondition: `sup |Du| ≤ 1` on the starting cylinder (rescale first).
/// At every level where the measure condition held for all sampled
/// directions, the trace records whether the measured sup of `|Du|` over the
/// next intrinsic cylinder stayed below `(1−δ)^{i+1} + tol`.
#[allow(clippy::too_many_arguments)]
pub fn dichotomy_iterate<T: Real>(
    du: &VectorField<T>,
    params: &DichotomyParams<T>,
    gamma: T,
    epsilon: T,
    center: [T; 2],
    top_time: T,
    extra_directions: usize,
    tol: T,
) -> Result<DichotomyTrace<T>> {
    params.validate(gamma)?;
    let start = Cylinder::stretched(center, top_time, T::one(), T::one())?;
    let sup0 = du.sup_magnitude_in(&start)?;
    if sup0 > T::one() + real(1e-9) {
        return Err(Error::Domain(format!(
            "dichotomy precondition violated: sup |Du| = {sup0} > 1 on the starting cylinder; \
             rescale the run first"
        )));
    }
    let m1 = if epsilon > T::zero() && epsilon < T::one() {
        to_f64(epsilon.ln() / (T::one() - params.delta).ln()).floor() as usize
    } else {
        usize::MAX / 2
    };
    let directions = sample_directions::<T>(du.dim(), extra_directions);
    let shrink = T::one() - params.delta;
    let mut levels = Vec::new();
    let mut stop = DichotomyStop::EpsilonBudget(m1);
    for i in 0..=m1 {
        let radius = params.tau.powi(i as i32);
        let grad_bound = shrink.powi(i as i32);
        let cyl = Cylinder::intrinsic(center, top_time, radius, grad_bound, gamma)?;
        if du.valid_points_in(&cyl) < 4 {
            stop = DichotomyStop::Resolution(i);
            break;
        }
        let level_cut = params.l * grad_bound;
        let mut fractions = Vec::with_capacity(directions.len());
        for &e in &directions {
            fractions.push(density_check(du, e, level_cut, &cyl)?);
        }
        let condition_held = fractions.iter().all(|&f| f > params.mu);

        let next_radius = radius * params.tau;
        let next_bound = grad_bound * shrink;
        let next_cyl = Cylinder::intrinsic(center, top_time, next_radius, next_bound, gamma)?;
        let sup_grad_next = du.sup_magnitude_in(&next_cyl).ok();
        let shrinkage_ok = if condition_held {
            sup_grad_next.map(|s| s < next_bound + tol)
        } else {
            None
        };
        levels.push(DichotomyLevel {
            level: i,
            radius,
            grad_bound,
            fractions,
            condition_held,
            sup_grad_next,
            shrinkage_ok,
        });
        if !condition_held {
            stop = DichotomyStop::MeasureConditionFailed(i);
            break;
        }
        if i == m1 {
            stop = DichotomyStop::EpsilonBudget(m1);
            break;
        }
    }
    Ok(DichotomyTrace { levels, m1, stop, directions, tol })
}

/// Rescaling of a solved run so that `sup |Du| ≤ 1`: values shrink by `K`
/// and the stored time step stretches by `K^γ` (the parabolic scaling that
/// keeps the equation form, with `ε → ε/K` and `F → F(K·)/K`).
#[derive(Clone, Debug)]
pub struct RescaledRun<T> {
    pub field: SpaceTimeField<T>,
    pub epsilon: T,
    /// The gradient scale `K` that was divided out (1 when no rescale was
    /// needed).
    pub scale: T,
}

/// Sup of the forward difference-quotient magnitude over valid points: the
/// gradient notion the dichotomy measures, and therefore the scale a
/// rescale must divide out.
pub fn forward_gradient_sup<T: Real>(u: &SpaceTimeField<T>) -> Result<T> {
    let du = difference_quotient_field(u, u.grid().h())?;
    let grid = u.grid();
    let mut sup = T::zero();
    for k in 0..grid.n_slices() {
        for si in 0..grid.n_space() {
            if du.is_valid(si) {
                sup = sup.max(du.magnitude(si, k));
            }
        }
    }
    Ok(sup)
}

pub fn rescale_to_unit_gradient<T: Real>(
    u: &SpaceTimeField<T>,
    sup_grad: T,
    gamma: T,
    epsilon: T,
) -> Result<RescaledRun<T>> {
    if sup_grad <= T::one() {
        return Ok(RescaledRun { field: u.clone(), epsilon, scale: T::one() });
    }
    let k = sup_grad;
    let grid = u.grid();
    let new_dt = grid.dt() * k.powf(gamma);
    let new_t0 = grid.t0() * k.powf(gamma);
    let new_grid = if grid.dim() == 1 {
        Grid::new_1d(grid.extent(0), grid.h(), new_dt, grid.steps(), new_t0)?
    } else {
        Grid::new_2d(grid.extent(0), grid.extent(1), grid.h(), new_dt, grid.steps(), new_t0)?
    };
    let new_grid = match grid.mask() {
        Some(_) => {
            return Err(Error::Domain("rescaling masked runs is not supported".into()));
        }
        None => Arc::new(new_grid),
    };
    let values: Vec<T> = u.values().iter().map(|&v| v / k).collect();
    let field = SpaceTimeField::from_values(new_grid, values)?;
    Ok(RescaledRun { field, epsilon: epsilon / k, scale: k })
}

/// What a Hölder measurement of one solution needs: the fit anchor, the
/// dyadic radii, and the time-lag ladder.
#[derive(Clone, Debug)]
pub struct FitSpec<T> {
    pub center_space: [T; 2],
    pub top_time: T,
    pub r0: T,
    pub n_radii: usize,
    pub time_base_lag: T,
    pub n_time_lags: usize,
    pub gamma: T,
}

impl<T: Real> FitSpec<T> {
    pub fn dyadic_radii(&self) -> Vec<T> {
        (0..self.n_radii)
            .map(|i| self.r0 * real::<T>(0.5).powi(i as i32))
            .collect()
    }
}

/// Forward-quotient gradient of `u` at the grid step, then an
/// oscillation-decay fit at the configured anchor.
pub fn holder_fit<T: Real>(u: &SpaceTimeField<T>, spec: &FitSpec<T>) -> Result<OscFit<T>> {
    let du = difference_quotient_field(u, u.grid().h())?;
    let center = Point { x: spec.center_space, t: spec.top_time };
    fit_oscillation_decay(&du, center, &spec.dyadic_radii())
}

/// Time-modulus fit of `u` at the grid point nearest the configured anchor,
/// using `alpha_space` for the predicted exponent.
pub fn time_modulus_fit<T: Real>(
    u: &SpaceTimeField<T>,
    spec: &FitSpec<T>,
    alpha_space: T,
) -> Result<TimeFit<T>> {
    let grid = u.grid();
    let mut best = None;
    let mut best_d = T::infinity();
    for si in 0..grid.n_space() {
        if !grid.is_interior(si) {
            continue;
        }
        let x = grid.coords(si);
        let dx = x[0] - spec.center_space[0];
        let dy = x[1] - spec.center_space[1];
        let d = dx * dx + dy * dy;
        if d < best_d {
            best_d = d;
            best = Some(si);
        }
    }
    let si = best.ok_or_else(|| Error::Domain("grid has no interior point".into()))?;
    fit_time_modulus(u, si, spec.gamma, alpha_space, spec.time_base_lag, spec.n_time_lags)
}

/// Aggregated regularity measurement of one solved run: the spatial
/// exponent fit with its oscillation table, the time moduli of `u` and of
/// the quotient gradient, and the dichotomy trace when one was run. Flat
/// fields leave entries empty rather than failing the whole report.
#[derive(Clone, Debug)]
pub struct RegularityReport<T> {
    pub spatial: Option<OscFit<T>>,
    pub time_u: Option<TimeFit<T>>,
    pub time_gradient: Option<TimeFit<T>>,
    pub dichotomy: Option<DichotomyTrace<T>>,
    pub gamma: T,
}

/// Measure a solution against a fit spec; the dichotomy trace is attached
/// by the caller when one was produced.
pub fn regularity_report<T: Real>(
    u: &SpaceTimeField<T>,
    spec: &FitSpec<T>,
    dichotomy: Option<DichotomyTrace<T>>,
) -> Result<RegularityReport<T>> {
    let spatial = holder_fit(u, spec).ok();
    let alpha = spatial.as_ref().map(|f| f.alpha).unwrap_or(T::one());
    let time_u = time_modulus_fit(u, spec, alpha).ok();
    let time_gradient = difference_quotient_field(u, u.grid().h()).ok().and_then(|du| {
        let grid = u.grid();
        let mut best = None;
        let mut best_d = T::infinity();
        for si in 0..grid.n_space() {
            if !du.is_valid(si) || !grid.is_interior(si) {
                continue;
            }
            let x = grid.coords(si);
            let dx = x[0] - spec.center_space[0];
            let dy = x[1] - spec.center_space[1];
            let d = dx * dx + dy * dy;
            if d < best_d {
                best_d = d;
                best = Some(si);
            }
        }
        best.and_then(|si| {
            fit_gradient_time_modulus(&du, si, spec.gamma, alpha, spec.time_base_lag, spec.n_time_lags)
                .ok()
        })
    });
    Ok(RegularityReport { spatial, time_u, time_gradient, dichotomy, gamma: spec.gamma })
}

/// Per-member Hölder measurements of a cascade plus the uniformity verdict:
/// the relative spread of fitted exponents and constants across members.
#[derive(Clone, Debug)]
pub struct UniformHolderReport<T> {
    pub fits: Vec<Option<OscFit<T>>>,
    pub time_fits: Vec<Option<TimeFit<T>>>,
    pub alpha_spread: Option<T>,
    pub constant_spread: Option<T>,
    /// Set when the cascade ran at `γ ≤ −1`.
    pub outside_main_hypothesis: bool,
}

fn relative_spread<T: Real>(values: &[T]) -> Option<T> {
    if values.len() < 2 {
        return None;
    }
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let mid = (lo.abs() + hi.abs()) * real(0.5);
    if mid == T::zero() {
        return Some(T::zero());
    }
    Some((hi - lo) / mid)
}

/// Measure every cascade member over the same fit spec and report the
/// spread of the fitted `(α, C)` across members.
pub fn measure_uniform_holder<T: Real>(
    cascade: &crate::solver::CascadeResult<T>,
    spec: &FitSpec<T>,
) -> Result<UniformHolderReport<T>> {
    if cascade.members.len() < 2 {
        return Err(Error::Domain("uniformity verdict needs at least 2 cascade members".into()));
    }
    let mut fits = Vec::new();
    let mut time_fits = Vec::new();
    for member in &cascade.members {
        match &member.outcome {
            Ok(report) => {
                let fit = holder_fit(&report.solution, spec).ok();
                let tf = fit.as_ref().and_then(|f| {
                    time_modulus_fit(&report.solution, spec, f.alpha).ok()
                });
                fits.push(fit);
                time_fits.push(tf);
            }
            Err(_) => {
                fits.push(None);
                time_fits.push(None);
            }
        }
    }
    let alphas: Vec<T> = fits.iter().flatten().map(|f| f.alpha).collect();
    let constants: Vec<T> = fits.iter().flatten().map(|f| f.constant).collect();
    Ok(UniformHolderReport {
        alpha_spread: relative_spread(&alphas),
        constant_spread: relative_spread(&constants),
        fits,
        time_fits,
        outside_main_hypothesis: cascade.outside_main_hypothesis,
    })
}
