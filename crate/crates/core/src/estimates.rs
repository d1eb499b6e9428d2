//! Analytic oracles and the a-priori-estimate harness: boundary-gradient
//! barriers, the exact-solution catalog, oscillation barriers, and the
//! numeric assertions for the maximum principle and the gradient bound.
//!
//! The barrier machinery follows an explicit construction: around an
//! exterior tangent ball anchored at `y`, the functions
//! `w± = φ ± f(d(x))` with `f(r) = log(1 + (A/B)r)/A` and
//! `d(x) = |x−y| − r_ball` dominate the solution in a thin shell, once `A`
//! is large enough and `B⁻¹ = 2·e^{(2+2/(γ+2))Am}·‖φ‖_{C²}` with
//! `m = sup|u−φ|`. Both the domination and the one-step discrete
//! super/subsolution property are checked numerically.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{spatial_distance, Grid, Point, SpaceTimeField};
use crate::operators::{DegeneracyProfile, EllipticOperator, SymmetricMatrix};
use crate::scalar::{real, Real};
use crate::scheme::{self, GradientMode, SchemeConfig, StencilKind};
use crate::solver::{boundary_sup, DirichletProblem, SolveReport};

/// Closed-form solutions used as boundary data and as oracles.
#[derive(Clone, Debug)]
pub enum ExactSolution<T> {
    /// `u = a·x + b`: stationary for every operator and profile.
    Linear { a: [T; 2], b: T },
    /// `u = xᵀQx + a·x + b + s·t` with `s = F(2Q)`: solves `u_t = F(D²u)`
    /// (the γ = 0 equation) for the operator it was built against.
    Caloric { q: SymmetricMatrix<T>, a: [T; 2], b: T, slope: T },
    /// `u = c·t + k·(x−offset)^β` on `x ≥ offset` (1D), with
    /// `β = (2+γ)/(1+γ)` and `k = ((1+γ)c)^{1/(1+γ)}·(1+γ)/(2+γ)`:
    /// solves `u_t = |u_x|^γ·u_xx` identically for `x > offset`.
    DegenerateProfile { gamma: T, c: T, offset: T },
}

/// `β = (2+γ)/(1+γ)`, the degenerate profile's spatial power.
pub fn beta_exponent<T: Real>(gamma: T) -> T {
    (real::<T>(2.0) + gamma) / (T::one() + gamma)
}

impl<T: Real> ExactSolution<T> {
    pub fn linear(a: [T; 2], b: T) -> Self {
        ExactSolution::Linear { a, b }
    }

    /// Caloric member for a given operator: the time slope is `F(2Q)`.
    pub fn caloric(q: SymmetricMatrix<T>, a: [T; 2], b: T, op: &EllipticOperator<T>) -> Self {
        let slope = op.evaluate(&q.scale(real(2.0)));
        ExactSolution::Caloric { q, a, b, slope }
    }

    pub fn degenerate_profile(gamma: T, c: T, offset: T) -> Result<Self> {
        if gamma <= -T::one() {
            return Err(Error::Domain("degenerate profile needs gamma > -1".into()));
        }
        if !(c > T::zero()) {
            return Err(Error::Domain("degenerate profile needs a positive time slope".into()));
        }
        Ok(ExactSolution::DegenerateProfile { gamma, c, offset })
    }

    fn profile_coefficient(gamma: T, c: T) -> T {
        let gp1 = T::one() + gamma;
        ((gp1 * c).powf(gp1.recip())) * gp1 / (real::<T>(2.0) + gamma)
    }

    pub fn eval(&self, p: &Point<T>) -> Result<T> {
        match self {
            ExactSolution::Linear { a, b } => Ok(a[0] * p.x[0] + a[1] * p.x[1] + *b),
            ExactSolution::Caloric { q, a, b, slope } => {
                let x = p.x;
                let quad = q.entry(0, 0) * x[0] * x[0]
                    + (q.entry(0, 1) + q.entry(0, 1)) * x[0] * x[1]
                    + q.entry(1, 1) * x[1] * x[1];
                Ok(quad + a[0] * x[0] + a[1] * x[1] + *b + *slope * p.t)
            }
            ExactSolution::DegenerateProfile { gamma, c, offset } => {
                let s = p.x[0] - *offset;
                if s < T::zero() {
                    return Err(Error::Domain("degenerate profile is defined for x ≥ offset".into()));
                }
                let k = Self::profile_coefficient(*gamma, *c);
                Ok(*c * p.t + k * s.powf(beta_exponent(*gamma)))
            }
        }
    }

    pub fn gradient(&self, p: &Point<T>) -> Result<[T; 2]> {
        match self {
            ExactSolution::Linear { a, .. } => Ok(*a),
            ExactSolution::Caloric { q, a, .. } => {
                let two = real::<T>(2.0);
                Ok([
                    two * (q.entry(0, 0) * p.x[0] + q.entry(0, 1) * p.x[1]) + a[0],
                    two * (q.entry(0, 1) * p.x[0] + q.entry(1, 1) * p.x[1]) + a[1],
                ])
            }
            ExactSolution::DegenerateProfile { gamma, c, offset } => {
                let s = p.x[0] - *offset;
                if s < T::zero() {
                    return Err(Error::Domain("degenerate profile is defined for x ≥ offset".into()));
                }
                // u_x = ((1+γ)c)^{1/(1+γ)} · s^{1/(1+γ)}
                let gp1 = T::one() + *gamma;
                let ux = ((gp1 * *c).powf(gp1.recip())) * s.powf(gp1.recip());
                Ok([ux, T::zero()])
            }
        }
    }

    pub fn hessian(&self, p: &Point<T>) -> Result<SymmetricMatrix<T>> {
        match self {
            ExactSolution::Linear { .. } => Ok(SymmetricMatrix::zero(2)),
            ExactSolution::Caloric { q, .. } => Ok(q.scale(real(2.0))),
            ExactSolution::DegenerateProfile { gamma, c, offset } => {
                let s = p.x[0] - *offset;
                if s <= T::zero() {
                    return Err(Error::Domain(
                        "degenerate profile hessian needs x > offset".into(),
                    ));
                }
                let beta = beta_exponent(*gamma);
                let k = Self::profile_coefficient(*gamma, *c);
                let uxx = k * beta * (beta - T::one()) * s.powf(beta - real(2.0));
                Ok(SymmetricMatrix::new_1d(uxx))
            }
        }
    }

    pub fn time_derivative(&self) -> T {
        match self {
            ExactSolution::Linear { .. } => T::zero(),
            ExactSolution::Caloric { slope, .. } => *slope,
            ExactSolution::DegenerateProfile { c, .. } => *c,
        }
    }

    /// Evaluate the member at every grid point (boundary-data construction).
    pub fn as_field(&self, grid: Arc<Grid<T>>) -> Result<SpaceTimeField<T>> {
        let mut field = SpaceTimeField::zeros(grid.clone());
        for k in 0..grid.n_slices() {
            for si in 0..grid.n_space() {
                let v = self.eval(&grid.point(si, k))?;
                field.set(si, k, v);
            }
        }
        Ok(field)
    }
}

/// Sign of a boundary barrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarrierSign {
    Upper,
    Lower,
}

/// The boundary-gradient barrier `w± = φ ± f(d(x))` around an exterior
/// tangent ball.
#[derive(Clone, Debug)]
pub struct BarrierSpec<T> {
    /// Slope-control constant `A > 0`.
    pub a_coef: T,
    /// Offset constant `B > 0` (`f'(0) = 1/B`); `B ≤ √5` is required on the
    /// singular side `γ ∈ (−2, 0)`.
    pub b_coef: T,
    /// Center `y` of the exterior tangent ball, at distance `2·r_ball` from
    /// the domain-ball center.
    pub anchor: [T; 2],
    pub ball_radius: T,
    /// Shell width `B(e^{Am} − 1)/A`.
    pub shell_width: T,
}

impl<T: Real> BarrierSpec<T> {
    pub fn new(a_coef: T, b_coef: T, anchor: [T; 2], ball_radius: T, m: T, gamma: T) -> Result<Self> {
        if !(a_coef > T::zero()) || !(b_coef > T::zero()) {
            return Err(Error::Domain("barrier needs A > 0 and B > 0".into()));
        }
        if gamma < T::zero() && b_coef > real::<T>(5.0).sqrt() {
            return Err(Error::Domain("the singular-side barrier needs B ≤ sqrt(5)".into()));
        }
        let shell_width = b_coef * ((a_coef * m).exp() - T::one()) / a_coef;
        Ok(BarrierSpec { a_coef, b_coef, anchor, ball_radius, shell_width })
    }

    /// `f(r) = log(1 + (A/B)·r) / A`, increasing and concave on `r ≥ 0`.
    pub fn f(&self, r: T) -> T {
        (T::one() + self.a_coef / self.b_coef * r).ln() / self.a_coef
    }

    /// `f'(r) = 1/(B + A·r)`.
    pub fn f_prime(&self, r: T) -> T {
        (self.b_coef + self.a_coef * r).recip()
    }

    /// Distance from the exterior ball, `d(x) = |x − y| − r_ball`.
    pub fn d(&self, x: [T; 2]) -> T {
        spatial_distance(x, self.anchor) - self.ball_radius
    }

    /// `w±(X) = φ(X) ± f(d(x))`. The point must lie in the shell
    /// `0 ≤ d(x) ≤ width` (up to a small slack on the inner side where the
    /// formula continues smoothly).
    pub fn value(&self, sign: BarrierSign, phi_value: T, x: [T; 2]) -> Result<T> {
        let d = self.d(x);
        if d < -real::<T>(0.5) * self.b_coef / self.a_coef || d > self.shell_width * (T::one() + real(1e-9)) {
            return Err(Error::Domain(format!(
                "point with d = {d} lies outside the barrier shell [0, {}]",
                self.shell_width
            )));
        }
        Ok(match sign {
            BarrierSign::Upper => phi_value + self.f(d),
            BarrierSign::Lower => phi_value - self.f(d),
        })
    }

    /// Constants from the constructive recipe: `B⁻¹ = 2e^{(2+2/(γ+2))Am}·P`
    /// with `P = ‖φ‖_{C²}` and `m = sup|u−φ|`, and the smallest `A` (on a
    /// geometric grid) for which the supersolution margin is positive.
    #[allow(clippy::too_many_arguments)]
    pub fn from_recipe(
        gamma: T,
        epsilon: T,
        lambda: T,
        big_lambda: T,
        dim: usize,
        phi_c2: T,
        m: T,
        anchor: [T; 2],
        ball_radius: T,
    ) -> Result<Self> {
        if !(phi_c2 > T::zero()) || !(m > T::zero()) {
            return Err(Error::Domain("recipe needs positive ‖φ‖_C² and m".into()));
        }
        let mut a = real::<T>(0.0625);
        for _ in 0..48 {
            let b = Self::recipe_b(gamma, a, m, phi_c2);
            if gamma >= T::zero() || b <= real::<T>(5.0).sqrt() {
                let margin =
                    supersolution_margin(gamma, epsilon, lambda, big_lambda, dim, phi_c2, m, a, b, ball_radius);
                if margin > T::zero() {
                    return Self::new(a, b, anchor, ball_radius, m, gamma);
                }
            }
            a = a * real(2.0);
        }
        Err(Error::Domain("no barrier constant A satisfies the margin inequality".into()))
    }

    fn recipe_b(gamma: T, a: T, m: T, phi_c2: T) -> T {
        let two = real::<T>(2.0);
        let expo = (two + two / (gamma + two)) * a * m;
        (two * expo.exp() * phi_c2).recip()
    }
}

/// Analytic lower bound for `w⁺_t − g(Dw⁺)·F(D²w⁺)` in the shell: positive
/// means `w⁺` is a strict supersolution there (and `w⁻` a subsolution).
#[allow(clippy::too_many_arguments)]
fn supersolution_margin<T: Real>(
    gamma: T,
    epsilon: T,
    lambda: T,
    big_lambda: T,
    dim: usize,
    phi_c2: T,
    m: T,
    a: T,
    b: T,
    ball_radius: T,
) -> T {
    let n = T::from_usize(dim).unwrap();
    let two = real::<T>(2.0);
    let exp2am = (two * a * m).exp();
    // F(D²w⁺) ≤ nΛP + (n−1)Λ/(r·B) − λA/(B²e^{2Am}) = −R
    let r_term = lambda * a / (b * b * exp2am)
        - n * big_lambda * phi_c2
        - (n - T::one()) * big_lambda / (ball_radius * b);
    if r_term <= T::zero() {
        return -T::infinity();
    }
    // |Dw| ranges over [q_min, 2/B] in the shell
    let q_min = ((b * (a * m).exp()).recip() - phi_c2).max(T::zero());
    let q_max = two / b;
    let half = real::<T>(0.5);
    let g_low = if gamma >= T::zero() {
        (epsilon * epsilon + q_min * q_min).powf(gamma * half)
    } else {
        (epsilon * epsilon + q_max * q_max).powf(gamma * half)
    };
    g_low * r_term - phi_c2
}

/// Outcome of the numeric barrier verification.
#[derive(Clone, Debug)]
pub struct BarrierCheck<T> {
    /// Max of `u − w⁺` over shell points and slices (≤ tol passes).
    pub upper_violation: T,
    /// Max of `w⁻ − u` over shell points and slices.
    pub lower_violation: T,
    /// Max of `marched − analytic` for the one-step supersolution check of `w⁺`.
    pub super_excess: T,
    /// Max of `analytic − marched` for the one-step subsolution check of `w⁻`.
    pub sub_excess: T,
    pub shell_points: usize,
    pub shell_interior_points: usize,
    pub pass: bool,
}

/// Check `w⁻ − tol ≤ u ≤ w⁺ + tol` on all grid points of the shell, and that
/// one explicit march step of `w⁺` (resp. `w⁻`) does not rise above (resp.
/// fall below) its analytic continuation.
pub fn verify_barrier_domination<T: Real>(
    problem: &DirichletProblem<T>,
    report: &SolveReport<T>,
    spec: &BarrierSpec<T>,
    tol: T,
) -> Result<BarrierCheck<T>> {
    let grid = &problem.grid;
    let phi = &problem.boundary;
    let u = &report.solution;
    let slack = -real::<T>(0.5) * spec.b_coef / spec.a_coef;

    let in_shell = |si: usize| -> bool {
        let d = spec.d(grid.coords(si));
        grid.is_active(si) && d >= T::zero() && d <= spec.shell_width
    };

    let shell: Vec<usize> = (0..grid.n_space()).filter(|&si| in_shell(si)).collect();
    if shell.is_empty() {
        return Err(Error::Domain(
            "the barrier shell contains no grid point; geometry mismatch".into(),
        ));
    }
    for &si in &shell {
        if spec.d(grid.coords(si)) < slack {
            return Err(Error::Domain("shell point below the formula's slack bound".into()));
        }
    }

    let mut upper = T::neg_infinity();
    let mut lower = T::neg_infinity();
    for &si in &shell {
        let x = grid.coords(si);
        let f_d = spec.f(spec.d(x));
        for k in 0..grid.n_slices() {
            let w_plus = phi.at(si, k) + f_d;
            let w_minus = phi.at(si, k) - f_d;
            upper = upper.max(u.at(si, k) - w_plus);
            lower = lower.max(w_minus - u.at(si, k));
        }
    }

    // One-step super/subsolution check at shell interior points whose full
    // neighborhood stays where the formula is valid.
    let checkable: Vec<usize> = shell
        .iter()
        .copied()
        .filter(|&si| {
            grid.is_interior(si)
                && neighborhood(grid, si).into_iter().all(|ni| spec.d(grid.coords(ni)) >= slack)
        })
        .collect();
    let mut super_excess = T::neg_infinity();
    let mut sub_excess = T::neg_infinity();
    if !checkable.is_empty() {
        let k_mid = grid.n_slices() / 2;
        let t = grid.time(k_mid);
        let q_max = real::<T>(2.0) / spec.b_coef;
        let g_hat = problem.profile.max_factor(q_max);
        let dt = problem
            .scheme
            .controller
            .max_dt(grid.h(), grid.dim(), problem.operator.big_lambda(), g_hat)
            * real(0.5);
        for (sign, excess) in
            [(BarrierSign::Upper, &mut super_excess), (BarrierSign::Lower, &mut sub_excess)]
        {
            let w_at = |si: usize, tt: T| -> T {
                let x = grid.coords(si);
                // analytic continuation of f below d = 0, valid down to the
                // slack bound the checkable filter enforces for neighbors
                let d = spec.d(x).max(slack);
                let f_d = spec.f(d);
                // φ between stored slices, linearly in time
                let kf = crate::scalar::to_f64((tt - grid.t0()) / grid.dt());
                let k0 = (kf.floor().max(0.0) as usize).min(grid.steps());
                let k1 = (k0 + 1).min(grid.steps());
                let theta = T::from_f64(kf - k0 as f64).unwrap().max(T::zero()).min(T::one());
                let pv = phi.at(si, k0) + theta * (phi.at(si, k1) - phi.at(si, k0));
                match sign {
                    BarrierSign::Upper => pv + f_d,
                    BarrierSign::Lower => pv - f_d,
                }
            };
            let slice: Vec<T> = (0..grid.n_space()).map(|si| w_at(si, t)).collect();
            let bc: Vec<(usize, T)> = grid
                .boundary_points()
                .iter()
                .map(|&si| (si, w_at(si, t + dt)))
                .collect();
            let mut out = vec![T::zero(); grid.n_space()];
            scheme::step(
                grid,
                &slice,
                &bc,
                &problem.operator,
                &problem.profile,
                None,
                dt,
                &problem.scheme,
                &mut out,
            )?;
            for &si in &checkable {
                let analytic = w_at(si, t + dt);
                let diff = match sign {
                    BarrierSign::Upper => out[si] - analytic,
                    BarrierSign::Lower => analytic - out[si],
                };
                *excess = (*excess).max(diff);
            }
        }
    }

    let pass = upper <= tol
        && lower <= tol
        && (checkable.is_empty() || (super_excess <= tol && sub_excess <= tol));
    Ok(BarrierCheck {
        upper_violation: upper,
        lower_violation: lower,
        super_excess,
        sub_excess,
        shell_points: shell.len(),
        shell_interior_points: checkable.len(),
        pass,
    })
}

fn neighborhood<T: Real>(grid: &Grid<T>, si: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(8);
    for dj in -1..=1i64 {
        for di in -1..=1i64 {
            if di == 0 && dj == 0 {
                continue;
            }
            if let Some(ni) = grid.neighbor(si, di, dj) {
                out.push(ni);
            }
        }
    }
    out
}

/// Outcome of the discrete maximum-principle assertion.
#[derive(Clone, Copy, Debug)]
pub struct MaxPrincipleCheck<T> {
    pub interior_sup: T,
    pub boundary_sup: T,
    pub pass: bool,
}

/// `sup_Q |u| ≤ sup_{∂_p} |φ| + tol`, for source-free monotone runs.
pub fn assert_max_principle<T: Real>(
    problem: &DirichletProblem<T>,
    report: &SolveReport<T>,
    tol: T,
) -> Result<MaxPrincipleCheck<T>> {
    if problem.source.is_some() {
        return Err(Error::Domain("the maximum principle assertion needs f = 0".into()));
    }
    if problem.scheme.stencil.kind() != StencilKind::WideStencil {
        return Err(Error::Domain("the maximum principle assertion needs monotone mode".into()));
    }
    let grid = &problem.grid;
    let mut interior_sup = T::zero();
    for k in 0..grid.n_slices() {
        let s = report.solution.slice(k);
        for si in 0..grid.n_space() {
            if grid.is_interior(si) {
                interior_sup = interior_sup.max(s[si].abs());
            }
        }
    }
    let bsup = boundary_sup(problem);
    Ok(MaxPrincipleCheck { interior_sup, boundary_sup: bsup, pass: interior_sup <= bsup + tol })
}

/// Outcome of the gradient maximum assertion.
#[derive(Clone, Copy, Debug)]
pub struct GradientMaxCheck<T> {
    pub interior_sup: T,
    pub ring_sup: T,
    /// `max(0, interior − ring)`; the continuous statement is equality of
    /// sups, which discretely survives as an excess of order `h^{1/2}`.
    pub excess: T,
    pub tol: T,
    pub pass: bool,
}

/// Interior gradient sup against the parabolic-boundary-adjacent gradient
/// sup with tolerance `tol_coef·h^{1/2}`. The boundary side collects the
/// spatial ring at every slice plus the whole bottom slice (the bottom face
/// is part of `∂_p`).
pub fn assert_gradient_max<T: Real>(
    problem: &DirichletProblem<T>,
    report: &SolveReport<T>,
    tol_coef: T,
) -> Result<GradientMaxCheck<T>> {
    let grid = &problem.grid;
    let mut interior_sup = T::zero();
    let mut ring_sup = T::zero();
    let mut any_ring = false;
    for k in 0..grid.n_slices() {
        let s = report.solution.slice(k);
        for si in 0..grid.n_space() {
            if !grid.is_interior(si) {
                continue;
            }
            let (p, _) = scheme::discrete_gradient(grid, s, si, GradientMode::Centered);
            let mag = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let near_side = neighborhood(grid, si).into_iter().any(|ni| grid.is_boundary(ni));
            if near_side || k == 0 {
                ring_sup = ring_sup.max(mag);
                any_ring = true;
            } else {
                interior_sup = interior_sup.max(mag);
            }
        }
    }
    if !any_ring {
        return Err(Error::Domain("grid has no boundary-adjacent interior point".into()));
    }
    let excess = (interior_sup - ring_sup).max(T::zero());
    let tol = tol_coef * grid.h().sqrt();
    Ok(GradientMaxCheck { interior_sup, ring_sup, excess, tol, pass: excess <= tol })
}

/// Which side of the γ case split an oscillation barrier uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OscBarrierBranch {
    /// Quadratic barrier `2A|x|² + 5nA(1+16A²)^{γ/2}Λ·t`.
    NonnegativeGamma,
    /// Power barrier `2A|x|^β + (Λ(n+β−2)(2β)^{γ+1}+1)A^{1+γ}·t` with
    /// `β = (2+γ)/(1+γ)`.
    NegativeGamma,
}

/// The oscillation-in-time barrier, branch selected by the sign of γ.
#[derive(Clone, Copy, Debug)]
pub struct OscBarrier<T> {
    pub amplitude: T,
    pub gamma: T,
    pub dim: usize,
    pub big_lambda: T,
}

impl<T: Real> OscBarrier<T> {
    pub fn new(amplitude: T, gamma: T, dim: usize, big_lambda: T) -> Result<Self> {
        if !(amplitude > T::zero()) {
            return Err(Error::Domain("oscillation barrier needs A > 0".into()));
        }
        if gamma <= -T::one() {
            return Err(Error::Domain("oscillation barrier needs gamma > -1".into()));
        }
        Ok(OscBarrier { amplitude, gamma, dim, big_lambda })
    }

    pub fn branch(&self) -> OscBarrierBranch {
        if self.gamma >= T::zero() {
            OscBarrierBranch::NonnegativeGamma
        } else {
            OscBarrierBranch::NegativeGamma
        }
    }

    /// Coefficient of `t` in the barrier.
    pub fn time_slope(&self) -> T {
        let a = self.amplitude;
        let n = T::from_usize(self.dim).unwrap();
        match self.branch() {
            OscBarrierBranch::NonnegativeGamma => {
                let half = real::<T>(0.5);
                real::<T>(5.0)
                    * n
                    * a
                    * (T::one() + real::<T>(16.0) * a * a).powf(self.gamma * half)
                    * self.big_lambda
            }
            OscBarrierBranch::NegativeGamma => {
                let beta = beta_exponent(self.gamma);
                let two = real::<T>(2.0);
                (self.big_lambda
                    * (n + beta - two)
                    * (two * beta).powf(self.gamma + T::one())
                    + T::one())
                    * a.powf(T::one() + self.gamma)
            }
        }
    }

    pub fn value(&self, x: [T; 2], t: T) -> T {
        let a = self.amplitude;
        let r2 = x[0] * x[0] + x[1] * x[1];
        match self.branch() {
            OscBarrierBranch::NonnegativeGamma => real::<T>(2.0) * a * r2 + self.time_slope() * t,
            OscBarrierBranch::NegativeGamma => {
                let beta = beta_exponent(self.gamma);
                let half = real::<T>(0.5);
                real::<T>(2.0) * a * r2.powf(beta * half) + self.time_slope() * t
            }
        }
    }

    /// One explicit march step applied to the barrier must not rise above
    /// its analytic continuation (discrete supersolution check). The barrier
    /// is a supersolution on the unit ball, so only interior points with
    /// `|x| ≤ 1` enter the comparison.
    pub fn one_step_excess(
        &self,
        grid: &Grid<T>,
        op: &EllipticOperator<T>,
        profile: &DegeneracyProfile<T>,
        cfg: &SchemeConfig<T>,
        t: T,
    ) -> Result<T> {
        let q_max = real::<T>(4.0) * self.amplitude * real::<T>(2.0); // |Dw| ≤ 4A|x|^{β−1}, |x| ≤ 2
        let g_hat = profile.max_factor(q_max);
        let dt = cfg.controller.max_dt(grid.h(), grid.dim(), op.big_lambda(), g_hat) * real(0.5);
        let slice: Vec<T> = (0..grid.n_space()).map(|si| self.value(grid.coords(si), t)).collect();
        let bc: Vec<(usize, T)> = grid
            .boundary_points()
            .iter()
            .map(|&si| (si, self.value(grid.coords(si), t + dt)))
            .collect();
        let mut out = vec![T::zero(); grid.n_space()];
        scheme::step(grid, &slice, &bc, op, profile, None, dt, cfg, &mut out)?;
        let mut excess = T::neg_infinity();
        for si in 0..grid.n_space() {
            let x = grid.coords(si);
            if grid.is_interior(si) && x[0] * x[0] + x[1] * x[1] <= T::one() {
                let analytic = self.value(x, t + dt);
                excess = excess.max(out[si] - analytic);
            }
        }
        Ok(excess)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cylinder;
    use crate::operators::DegeneracyProfile;
    use crate::solver;

    #[test]
    fn linear_member_evaluates_with_derivatives() {
        let sol = ExactSolution::linear([1.5, -0.5], 2.0);
        let p = Point::new_2d(2.0, 1.0, -0.3);
        assert_eq!(sol.eval(&p).unwrap(), 1.5 * 2.0 - 0.5 + 2.0);
        assert_eq!(sol.gradient(&p).unwrap(), [1.5, -0.5]);
        assert_eq!(sol.hessian(&p).unwrap().trace(), 0.0);
    }

    #[test]
    fn caloric_member_matches_x_squared_plus_two_t() {
        let op = EllipticOperator::laplacian(1);
        let sol = ExactSolution::caloric(SymmetricMatrix::new_1d(1.0), [0.0, 0.0], 0.0, &op);
        // slope = F(2·1) = 2, so u = x² + 2t and u(1, 0.5) = 1 + 1 = 2
        let p = Point::new_1d(1.0, 0.5);
        assert_eq!(sol.eval(&p).unwrap(), 2.0);
        assert_eq!(sol.time_derivative(), 2.0);
    }

    #[test]
    fn degenerate_profile_matches_the_closed_form_for_gamma_one() {
        // γ = 1, c = 1: u = t + 2^{1/2}·(2/3)·x^{3/2}, u_x = (2x)^{1/2}
        let sol = ExactSolution::degenerate_profile(1.0, 1.0, 0.0).unwrap();
        let p = Point::new_1d(1.0, 0.0);
        let k = 2.0f64.sqrt() * 2.0 / 3.0;
        assert!((sol.eval(&p).unwrap() - k).abs() < 1e-14);
        let g = sol.gradient(&p).unwrap();
        assert!((g[0] - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn degenerate_profile_has_zero_equation_residual() {
        // |u_x|^γ·u_xx − u_t = 0 on x ∈ [0.1, 10] for several γ
        for gamma in [0.5, 1.0, 2.0, 3.0] {
            let sol = ExactSolution::degenerate_profile(gamma, 1.0, 0.0).unwrap();
            let profile = DegeneracyProfile::singular(gamma);
            for i in 0..40 {
                let x = 0.1 + 9.9 * i as f64 / 39.0;
                let p = Point::new_1d(x, -0.2);
                let grad = sol.gradient(&p).unwrap();
                let hess = sol.hessian(&p).unwrap();
                let residual =
                    profile.evaluate(grad).unwrap() * hess.entry(0, 0) - sol.time_derivative();
                assert!(
                    residual.abs() < 1e-12,
                    "γ = {gamma}, x = {x}: residual {residual}"
                );
            }
        }
    }

    #[test]
    fn degenerate_profile_derivatives_match_finite_differences() {
        let sol: ExactSolution<f64> = ExactSolution::degenerate_profile(1.0, 1.0, 0.0).unwrap();
        let h = 1e-6;
        for x in [0.3, 1.0, 2.5] {
            let up = sol.eval(&Point::new_1d(x + h, 0.0)).unwrap();
            let um = sol.eval(&Point::new_1d(x - h, 0.0)).unwrap();
            let grad = sol.gradient(&Point::new_1d(x, 0.0)).unwrap()[0];
            assert!(((up - um) / (2.0 * h) - grad).abs() < 1e-6);
        }
    }

    #[test]
    fn barrier_f_values_and_slope() {
        let spec: BarrierSpec<f64> = BarrierSpec::new(1.0, 1.0, [2.0, 0.0], 1.0, 3.0, 1.0).unwrap();
        assert_eq!(spec.f(0.0), 0.0);
        // A = B = 1: f(e − 1) = log(e) = 1
        assert!((spec.f(std::f64::consts::E - 1.0) - 1.0).abs() < 1e-14);
        // f'(0) = 1/B, cross-checked by a finite difference
        let h = 1e-7;
        let fd = (spec.f(h) - spec.f(0.0)) / h;
        assert!((spec.f_prime(0.0) - 1.0).abs() < 1e-14);
        assert!((fd - spec.f_prime(0.0)).abs() < 1e-6);
    }

    #[test]
    fn barrier_f_satisfies_the_derivative_identities() {
        // f' = 1/(B + Ar) and f'' = −A·(f')², checked by finite differences
        let spec: BarrierSpec<f64> = BarrierSpec::new(2.0, 0.5, [2.0, 0.0], 1.0, 1.0, 1.0).unwrap();
        let h = 1e-6;
        for r in [0.0, 0.1, 0.5, 1.0] {
            let fd1 = (spec.f(r + h) - spec.f(r - h)) / (2.0 * h);
            let rel1 = (fd1 - spec.f_prime(r)).abs() / spec.f_prime(r).abs();
            assert!(rel1 < 1e-6, "f' mismatch at r = {r}");
            let fd2 = (spec.f(r + h) - 2.0 * spec.f(r) + spec.f(r - h)) / (h * h);
            let expect = -spec.a_coef * spec.f_prime(r) * spec.f_prime(r);
            assert!((fd2 - expect).abs() / expect.abs() < 1e-3, "f'' mismatch at r = {r}");
        }
    }

    #[test]
    fn barrier_value_respects_the_shell() {
        let spec: BarrierSpec<f64> = BarrierSpec::new(1.0, 1.0, [2.0, 0.0], 1.0, 0.5, 1.0).unwrap();
        // on the tangent sphere d = 0 and w± = φ
        assert_eq!(spec.value(BarrierSign::Upper, 0.7, [1.0, 0.0]).unwrap(), 0.7);
        assert_eq!(spec.value(BarrierSign::Lower, 0.7, [1.0, 0.0]).unwrap(), 0.7);
        // far outside the shell is rejected
        assert!(spec.value(BarrierSign::Upper, 0.0, [-4.0, 0.0]).is_err());
    }

    #[test]
    fn recipe_produces_positive_margin_constants() {
        let spec = BarrierSpec::<f64>::from_recipe(
            1.0, 1.0, 1.0, 1.0, 2, 2.0, 0.4, [1.6, 0.0], 0.8,
        )
        .unwrap();
        assert!(spec.a_coef > 0.0 && spec.b_coef > 0.0);
        assert!(spec.shell_width > 0.0);
        // the recipe's B honors f'(0) = 1/B ≥ 2‖φ‖_{C²}
        assert!(spec.f_prime(0.0) >= 2.0 * 2.0);
    }

    #[test]
    fn max_principle_assertion_accepts_caloric_runs() {
        let grid = Arc::new(Grid::<f64>::new_1d((-1.0, 1.0), 0.125, 0.125, 8, -1.0).unwrap());
        let op = EllipticOperator::laplacian(1);
        let sol = ExactSolution::caloric(SymmetricMatrix::new_1d(1.0), [0.0, 0.0], 0.0, &op);
        let problem = DirichletProblem {
            cylinder: Cylinder::standard([0.0, 0.0], 0.0, 1.0).unwrap(),
            operator: op,
            profile: DegeneracyProfile::regularized(0.0, 0.0).unwrap(),
            boundary: sol.as_field(grid.clone()).unwrap(),
            source: None,
            scheme: SchemeConfig::monotone(1),
            grid,
        };
        let report = solver::solve(&problem).unwrap();
        let check = assert_max_principle(&problem, &report, 1e-12).unwrap();
        assert!(check.pass, "interior {} vs boundary {}", check.interior_sup, check.boundary_sup);
        // the caloric extremum sup |x² + 2t| = 2 is attained on the boundary
        assert!((check.boundary_sup - 2.0).abs() < 1e-12);
    }

    #[test]
    fn max_principle_assertion_rejects_centered_mode() {
        let grid = Arc::new(Grid::<f64>::new_1d((-1.0, 1.0), 0.25, 0.25, 4, -1.0).unwrap());
        let op = EllipticOperator::laplacian(1);
        let boundary = SpaceTimeField::from_fn(grid.clone(), |p| p.x[0]);
        let mut problem = DirichletProblem {
            cylinder: Cylinder::standard([0.0, 0.0], 0.0, 1.0).unwrap(),
            operator: op,
            profile: DegeneracyProfile::regularized(0.0, 0.0).unwrap(),
            boundary,
            source: None,
            scheme: SchemeConfig::monotone(1),
            grid,
        };
        let report = solver::solve(&problem).unwrap();
        problem.scheme = SchemeConfig::accurate(1);
        assert!(assert_max_principle(&problem, &report, 1e-12).is_err());
    }

    #[test]
    fn gradient_max_is_exact_for_linear_solutions() {
        let grid = Arc::new(Grid::<f64>::new_1d((-1.0, 1.0), 0.125, 0.125, 8, -1.0).unwrap());
        let boundary = SpaceTimeField::from_fn(grid.clone(), |p| 0.8 * p.x[0]);
        let problem = DirichletProblem {
            cylinder: Cylinder::standard([0.0, 0.0], 0.0, 1.0).unwrap(),
            operator: EllipticOperator::laplacian(1),
            profile: DegeneracyProfile::regularized(1.0, 0.1).unwrap(),
            boundary,
            source: None,
            scheme: SchemeConfig::monotone(1),
            grid,
        };
        let report = solver::solve(&problem).unwrap();
        let check = assert_gradient_max(&problem, &report, 1.0).unwrap();
        assert!(check.pass);
        assert!(check.excess < 1e-13, "linear gradients are equal everywhere");
    }

    #[test]
    fn gradient_max_holds_for_the_caloric_run() {
        let grid = Arc::new(Grid::<f64>::new_1d((-1.0, 1.0), 2.0 / 64.0, 0.05, 20, -1.0).unwrap());
        let op = EllipticOperator::laplacian(1);
        let sol = ExactSolution::caloric(SymmetricMatrix::new_1d(1.0), [0.0, 0.0], 0.0, &op);
        let problem = DirichletProblem {
            cylinder: Cylinder::standard([0.0, 0.0], 0.0, 1.0).unwrap(),
            operator: op,
            profile: DegeneracyProfile::regularized(0.0, 0.0).unwrap(),
            boundary: sol.as_field(grid.clone()).unwrap(),
            source: None,
            scheme: SchemeConfig::monotone(1),
            grid,
        };
        let report = solver::solve(&problem).unwrap();
        let check = assert_gradient_max(&problem, &report, 1.0).unwrap();
        // |Du| = |2x| peaks at the boundary ring
        assert!(check.pass);
        assert!(check.ring_sup > check.interior_sup);
    }

    #[test]
    fn osc_barrier_nonnegative_branch_slope_and_value() {
        let b: OscBarrier<f64> = OscBarrier::new(0.5, 1.0, 2, 2.0).unwrap();
        assert_eq!(b.branch(), OscBarrierBranch::NonnegativeGamma);
        // 5nA(1+16A²)^{1/2}Λ = 5·2·0.5·sqrt(5)·2
        let expect = 5.0 * 2.0 * 0.5 * 5.0f64.sqrt() * 2.0;
        assert!((b.time_slope() - expect).abs() < 1e-12);
        assert!((b.value([1.0, 0.0], 0.0) - 1.0).abs() < 1e-12, "2A|x|² at |x| = 1");
    }

    #[test]
    fn osc_barrier_negative_branch_uses_the_beta_power() {
        let b: OscBarrier<f64> = OscBarrier::new(0.5, -0.5, 2, 2.0).unwrap();
        assert_eq!(b.branch(), OscBarrierBranch::NegativeGamma);
        let beta: f64 = beta_exponent(-0.5);
        assert!((beta - 3.0).abs() < 1e-14, "β = (2+γ)/(1+γ) = 1.5/0.5");
        let expect = (2.0 * (2.0 + beta - 2.0) * (2.0 * beta).powf(0.5) + 1.0) * 0.5f64.powf(0.5);
        assert!((b.time_slope() - expect).abs() < 1e-12);
        // 2A|x|^β at |x| = 0.5
        assert!((b.value([0.5, 0.0], 0.0) - 2.0 * 0.5 * 0.5f64.powf(beta)).abs() < 1e-14);
    }

    #[test]
    fn osc_barrier_is_a_discrete_supersolution_on_the_nonnegative_branch() {
        let grid = Grid::<f64>::new_2d((-1.0, 1.0), (-1.0, 1.0), 0.125, 0.1, 2, -1.0).unwrap();
        let op = EllipticOperator::pucci_plus_op(1.0, 2.0).unwrap();
        let cfg = SchemeConfig::monotone(2);
        for gamma in [0.0, 1.0, 2.0] {
            let profile = DegeneracyProfile::regularized(gamma, 0.5).unwrap();
            let barrier = OscBarrier::new(0.7, gamma, 2, 2.0).unwrap();
            let excess = barrier.one_step_excess(&grid, &op, &profile, &cfg, -1.0).unwrap();
            assert!(
                excess <= 1e-12,
                "γ = {gamma}: marched barrier rose {excess} above its continuation"
            );
        }
    }
}
