//! The uniformly elliptic operator library and gradient degeneracy profiles.
//!
//! Every operator `F` here satisfies the sandwich
//! `M^−(M−N) ≤ F(M) − F(N) ≤ M^+(M−N)` with constants `(λ, Λ)` and is
//! normalized to `F(0) = 0`. The smoothed Bellman family plays the role of a
//! mollified operator: it is C^∞, convex, uniformly elliptic with unchanged
//! constants, and converges uniformly to the max-type Bellman operator as the
//! temperature drops to zero.

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Small dense n×n symmetric matrix, n ≤ 2. Eigenvalues are closed-form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    dim: usize,
    xx: T,
    xy: T,
    yy: T,
}

impl<T: Real> SymmetricMatrix<T> {
    pub fn new_1d(xx: T) -> Self {
        SymmetricMatrix { dim: 1, xx, xy: T::zero(), yy: T::zero() }
    }

    pub fn new_2d(xx: T, xy: T, yy: T) -> Self {
        SymmetricMatrix { dim: 2, xx, xy, yy }
    }

    pub fn zero(dim: usize) -> Self {
        SymmetricMatrix { dim, xx: T::zero(), xy: T::zero(), yy: T::zero() }
    }

    pub fn identity(dim: usize) -> Self {
        let one = T::one();
        match dim {
            1 => Self::new_1d(one),
            _ => Self::new_2d(one, T::zero(), one),
        }
    }

    pub fn diag(dim: usize, a: T, b: T) -> Self {
        match dim {
            1 => Self::new_1d(a),
            _ => Self::new_2d(a, T::zero(), b),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        match (i, j) {
            (0, 0) => self.xx,
            (1, 1) => self.yy,
            _ => self.xy,
        }
    }

    pub fn trace(&self) -> T {
        if self.dim == 1 {
            self.xx
        } else {
            self.xx + self.yy
        }
    }

    pub fn scale(&self, s: T) -> Self {
        SymmetricMatrix { dim: self.dim, xx: self.xx * s, xy: self.xy * s, yy: self.yy * s }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        SymmetricMatrix {
            dim: self.dim,
            xx: self.xx + other.xx,
            xy: self.xy + other.xy,
            yy: self.yy + other.yy,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    /// Eigenvalues in ascending order; only the first `dim` entries are
    /// meaningful.
    pub fn eigenvalues(&self) -> [T; 2] {
        if self.dim == 1 {
            return [self.xx, T::zero()];
        }
        let half = real::<T>(0.5);
        let mean = (self.xx + self.yy) * half;
        let d = (self.xx - self.yy) * half;
        let disc = (d * d + self.xy * self.xy).sqrt();
        [mean - disc, mean + disc]
    }

    /// Frobenius inner product `tr(A M)`.
    pub fn inner(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim, other.dim);
        if self.dim == 1 {
            self.xx * other.xx
        } else {
            self.xx * other.xx + self.yy * other.yy + (self.xy * other.xy + self.xy * other.xy)
        }
    }

    /// Whether `λI ≤ A ≤ ΛI` up to a small tolerance.
    pub fn within_band(&self, lambda: T, big_lambda: T) -> bool {
        let tol = real::<T>(1e-9) * (T::one() + big_lambda.abs());
        let eig = self.eigenvalues();
        (0..self.dim).all(|i| eig[i] >= lambda - tol && eig[i] <= big_lambda + tol)
    }
}

/// `M^+(M) = sup { tr(AM) : λI ≤ A ≤ ΛI } = Λ·Σ e_i^+ + λ·Σ e_i^−`.
pub fn pucci_plus<T: Real>(m: &SymmetricMatrix<T>, lambda: T, big_lambda: T) -> T {
    let eig = m.eigenvalues();
    let mut acc = T::zero();
    for e in eig.iter().take(m.dim()) {
        acc = acc + if *e > T::zero() { big_lambda * *e } else { lambda * *e };
    }
    acc
}

/// `M^−(M) = inf { tr(AM) } = −M^+(−M)`.
pub fn pucci_minus<T: Real>(m: &SymmetricMatrix<T>, lambda: T, big_lambda: T) -> T {
    let eig = m.eigenvalues();
    let mut acc = T::zero();
    for e in eig.iter().take(m.dim()) {
        acc = acc + if *e > T::zero() { lambda * *e } else { big_lambda * *e };
    }
    acc
}

/// The operator families selectable as `F`.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorKind<T> {
    /// The extremal operator `M^+`; convex, positively 1-homogeneous.
    PucciPlus,
    /// The extremal operator `M^−`; concave. Provided for comparison tooling
    /// only, never as the solved operator when convexity matters.
    PucciMinus,
    /// `F(M) = tr(AM)` for a fixed `λI ≤ A ≤ ΛI`.
    LinearTrace(SymmetricMatrix<T>),
    /// `F(M) = θ·log Σ_k exp(tr(A_k M)/θ) − θ·log K`: a smooth convex
    /// surrogate for `max_k tr(A_k M)`, exact as `θ → 0`.
    SmoothBellman { mats: Vec<SymmetricMatrix<T>>, theta: T },
}

/// A uniformly elliptic operator with constants `0 < λ ≤ Λ` and `F(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticOperator<T> {
    lambda: T,
    big_lambda: T,
    kind: OperatorKind<T>,
}

impl<T: Real> EllipticOperator<T> {
    pub fn new(lambda: T, big_lambda: T, kind: OperatorKind<T>) -> Result<Self> {
        if !(lambda > T::zero()) || big_lambda < lambda {
            return Err(Error::Domain(format!(
                "ellipticity constants need 0 < λ ≤ Λ, got λ = {lambda}, Λ = {big_lambda}"
            )));
        }
        match &kind {
            OperatorKind::LinearTrace(a) => {
                if !a.within_band(lambda, big_lambda) {
                    return Err(Error::Domain(
                        "LinearTrace coefficient matrix violates λI ≤ A ≤ ΛI".into(),
                    ));
                }
            }
            OperatorKind::SmoothBellman { mats, theta } => {
                if mats.is_empty() {
                    return Err(Error::Domain("SmoothBellman needs at least one matrix".into()));
                }
                if !(*theta > T::zero()) {
                    return Err(Error::Domain("SmoothBellman temperature must be positive".into()));
                }
                if mats.iter().any(|a| !a.within_band(lambda, big_lambda)) {
                    return Err(Error::Domain(
                        "SmoothBellman coefficient matrices violate λI ≤ A ≤ ΛI".into(),
                    ));
                }
                let dim = mats[0].dim();
                if mats.iter().any(|a| a.dim() != dim) {
                    return Err(Error::Domain("SmoothBellman matrices must share a dimension".into()));
                }
            }
            _ => {}
        }
        Ok(EllipticOperator { lambda, big_lambda, kind })
    }

    pub fn pucci_plus_op(lambda: T, big_lambda: T) -> Result<Self> {
        Self::new(lambda, big_lambda, OperatorKind::PucciPlus)
    }

    pub fn pucci_minus_op(lambda: T, big_lambda: T) -> Result<Self> {
        Self::new(lambda, big_lambda, OperatorKind::PucciMinus)
    }

    pub fn linear_trace(a: SymmetricMatrix<T>, lambda: T, big_lambda: T) -> Result<Self> {
        Self::new(lambda, big_lambda, OperatorKind::LinearTrace(a))
    }

    /// The Laplacian, `tr(M)`, with λ = Λ = 1.
    pub fn laplacian(dim: usize) -> Self {
        Self::linear_trace(SymmetricMatrix::identity(dim), T::one(), T::one()).unwrap()
    }

    pub fn smooth_bellman(mats: Vec<SymmetricMatrix<T>>, theta: T, lambda: T, big_lambda: T) -> Result<Self> {
        Self::new(lambda, big_lambda, OperatorKind::SmoothBellman { mats, theta })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn big_lambda(&self) -> T {
        self.big_lambda
    }

    pub fn kind(&self) -> &OperatorKind<T> {
        &self.kind
    }

    /// Convex in `M`? True for every kind except `M^−`.
    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, OperatorKind::PucciMinus)
    }

    /// `C^{1,1}` in `M`? The Pucci operators are Lipschitz but kink across
    /// eigenvalue sign changes; they serve as bounds, not as the solved `F`.
    pub fn is_c11(&self) -> bool {
        matches!(
            self.kind,
            OperatorKind::LinearTrace(_) | OperatorKind::SmoothBellman { .. }
        )
    }

    /// Evaluate `F(M)`.
    pub fn evaluate(&self, m: &SymmetricMatrix<T>) -> T {
        match &self.kind {
            OperatorKind::PucciPlus => pucci_plus(m, self.lambda, self.big_lambda),
            OperatorKind::PucciMinus => pucci_minus(m, self.lambda, self.big_lambda),
            OperatorKind::LinearTrace(a) => a.inner(m),
            OperatorKind::SmoothBellman { mats, theta } => {
                let traces: Vec<T> = mats.iter().map(|a| a.inner(m)).collect();
                log_sum_exp(&traces, *theta) - log_sum_exp(&vec![T::zero(); traces.len()], *theta)
            }
        }
    }

    /// The rescaled operator `M ↦ (1/s)·F(s·M)`, with the same `(λ, Λ)`.
    ///
    /// Pucci and linear operators are positively 1-homogeneous, so they come
    /// back unchanged; the Bellman family rescales its temperature to `θ/s`,
    /// which reproduces `(1/s)·F(sM)` exactly, normalization included.
    pub fn scaled(&self, s: T) -> Result<Self> {
        if !(s > T::zero()) {
            return Err(Error::Domain(format!("operator scale must be positive, got {s}")));
        }
        let kind = match &self.kind {
            OperatorKind::SmoothBellman { mats, theta } => OperatorKind::SmoothBellman {
                mats: mats.clone(),
                theta: *theta / s,
            },
            other => other.clone(),
        };
        Self::new(self.lambda, self.big_lambda, kind)
    }
}

/// `base^{γ/2}` with exact fast paths for the common exponents; `sqrt` is
/// correctly rounded where `powf` need not be.
#[inline]
pub(crate) fn half_power<T: Real>(base: T, gamma: T) -> T {
    if gamma == T::one() {
        base.sqrt()
    } else if gamma == real::<T>(2.0) {
        base
    } else if gamma == real::<T>(3.0) {
        base * base.sqrt()
    } else if gamma == -T::one() {
        base.sqrt().recip()
    } else {
        base.powf(gamma * real(0.5))
    }
}

/// `θ · log Σ exp(x_k / θ)`, max-shifted for stability.
fn log_sum_exp<T: Real>(xs: &[T], theta: T) -> T {
    let m = xs.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let mut acc = T::zero();
    for &x in xs {
        acc = acc + ((x - m) / theta).exp();
    }
    m + theta * acc.ln()
}

/// Whether the gradient factor is `(ε² + |p|²)^{γ/2}` or the singular `|p|^γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyMode {
    Regularized,
    Singular,
}

/// The pair `(γ, ε)` defining the gradient factor `g(p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegeneracyProfile<T> {
    pub gamma: T,
    pub epsilon: T,
    pub mode: DegeneracyMode,
}

impl<T: Real> DegeneracyProfile<T> {
    /// Regularized profile `g(p) = (ε² + |p|²)^{γ/2}`. Requires `ε > 0` when
    /// `γ < 0` (otherwise g blows up at p = 0).
    pub fn regularized(gamma: T, epsilon: T) -> Result<Self> {
        if epsilon < T::zero() {
            return Err(Error::Domain("epsilon must be nonnegative".into()));
        }
        if gamma < T::zero() && !(epsilon > T::zero()) {
            return Err(Error::Domain(
                "regularized profile with gamma < 0 requires epsilon > 0".into(),
            ));
        }
        Ok(DegeneracyProfile { gamma, epsilon, mode: DegeneracyMode::Regularized })
    }

    /// Singular profile `g(p) = |p|^γ`. Evaluation at `p = 0` with `γ < 0`
    /// is rejected; such problems go through the regularized cascade.
    pub fn singular(gamma: T) -> Self {
        DegeneracyProfile { gamma, epsilon: T::zero(), mode: DegeneracyMode::Singular }
    }

    /// `g(p)`.
    #[inline]
    pub fn evaluate(&self, p: [T; 2]) -> Result<T> {
        if self.gamma == T::zero() {
            return Ok(T::one());
        }
        let q2 = p[0] * p[0] + p[1] * p[1];
        match self.mode {
            DegeneracyMode::Regularized => {
                Ok(half_power(self.epsilon * self.epsilon + q2, self.gamma))
            }
            DegeneracyMode::Singular => {
                if q2 == T::zero() {
                    if self.gamma > T::zero() {
                        Ok(T::zero())
                    } else {
                        Err(Error::SingularEvaluation)
                    }
                } else {
                    Ok(half_power(q2, self.gamma))
                }
            }
        }
    }

    /// `|∇_p g(p)| = |γ| · |p| · (ε² + |p|²)^{γ/2 − 1}` for the regularized
    /// profile (and the same expression with ε = 0 for the singular one away
    /// from the origin). Used by the scheme's monotonicity certificate.
    pub fn gradient_magnitude(&self, p: [T; 2]) -> T {
        if self.gamma == T::zero() {
            return T::zero();
        }
        let q2 = p[0] * p[0] + p[1] * p[1];
        let base = self.epsilon * self.epsilon + q2;
        if base == T::zero() {
            return T::zero();
        }
        self.gamma.abs() * q2.sqrt() * base.powf(self.gamma * real::<T>(0.5) - T::one())
    }

    /// A Lipschitz constant of `g` on `{|p| ≤ bound}`, by dense sampling of
    /// the closed-form `|dg/d|p||`.
    pub fn lipschitz_on_ball(&self, bound: T) -> T {
        let samples = 4096;
        let mut worst = T::zero();
        for i in 0..=samples {
            let q = bound * T::from_usize(i).unwrap() / T::from_usize(samples).unwrap();
            worst = worst.max(self.gradient_magnitude([q, T::zero()]));
        }
        worst
    }

    /// Upper bound for `g` over gradients of magnitude at most `k`, used by
    /// the step controller. For `γ ≥ 0` the factor grows with the gradient;
    /// for `γ < 0` it peaks at `ε^γ`.
    pub fn max_factor(&self, k: T) -> T {
        if self.gamma >= T::zero() {
            self.evaluate([k, T::zero()]).unwrap_or(T::one())
        } else {
            match self.mode {
                DegeneracyMode::Regularized => {
                    self.epsilon.powf(self.gamma)
                }
                DegeneracyMode::Singular => T::infinity(),
            }
        }
    }
}

/// The pointwise right-hand side `g(p)·F(M) + f`.
pub fn rhs<T: Real>(
    op: &EllipticOperator<T>,
    profile: &DegeneracyProfile<T>,
    p: [T; 2],
    m: &SymmetricMatrix<T>,
    f_value: T,
) -> Result<T> {
    Ok(profile.evaluate(p)? * op.evaluate(m) + f_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: maximize tr(AM) over diagonal A in M's eigenbasis,
    /// entries sampled densely in [λ, Λ].
    fn pucci_plus_oracle(m: &SymmetricMatrix<f64>, lambda: f64, big: f64) -> f64 {
        let eig = m.eigenvalues();
        let steps = 400;
        let grid: Vec<f64> = (0..=steps)
            .map(|i| lambda + (big - lambda) * i as f64 / steps as f64)
            .collect();
        let mut best = f64::NEG_INFINITY;
        match m.dim() {
            1 => {
                for &a in &grid {
                    best = best.max(a * eig[0]);
                }
            }
            _ => {
                for &a in &grid {
                    for &b in &grid {
                        best = best.max(a * eig[0] + b * eig[1]);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn pucci_plus_matches_brute_force_oracle() {
        assert_eq!(pucci_plus(&SymmetricMatrix::zero(2), 1.0, 2.0), 0.0);
        let m = SymmetricMatrix::diag(2, 1.0, -1.0);
        // frozen from the oracle: Λ·1 + λ·(−1) = 1
        assert_eq!(pucci_plus(&m, 1.0, 2.0), 1.0);
        assert!((pucci_plus_oracle(&m, 1.0, 2.0) - 1.0).abs() < 1e-12);
        let neg = SymmetricMatrix::diag(2, -1.0, -1.0);
        // frozen from the oracle: λ·(−2) = −2
        assert_eq!(pucci_plus(&neg, 1.0, 2.0), -2.0);
        assert!((pucci_plus_oracle(&neg, 1.0, 2.0) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn pucci_minus_matches_duality_and_oracle() {
        assert_eq!(pucci_minus(&SymmetricMatrix::zero(2), 1.0, 2.0), 0.0);
        let m = SymmetricMatrix::diag(2, 1.0, -1.0);
        assert_eq!(pucci_minus(&m, 1.0, 2.0), -1.0);
    }

    fn random_sym(dim: usize, r: &mut impl rand::Rng) -> SymmetricMatrix<f64> {
        if dim == 1 {
            SymmetricMatrix::new_1d(r.gen_range(-3.0..3.0))
        } else {
            SymmetricMatrix::new_2d(
                r.gen_range(-3.0..3.0),
                r.gen_range(-3.0..3.0),
                r.gen_range(-3.0..3.0),
            )
        }
    }

    #[test]
    fn pucci_duality_on_random_matrices() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let m = random_sym(2, &mut rng);
            let lhs = pucci_minus(&m, 1.0, 2.5);
            let rhs = -pucci_plus(&m.scale(-1.0), 1.0, 2.5);
            assert!((lhs - rhs).abs() < 1e-12, "M^−(M) = −M^+(−M)");
        }
    }

    #[test]
    fn all_kinds_vanish_at_zero() {
        let ops: Vec<EllipticOperator<f64>> = vec![
            EllipticOperator::pucci_plus_op(1.0, 2.0).unwrap(),
            EllipticOperator::pucci_minus_op(1.0, 2.0).unwrap(),
            EllipticOperator::laplacian(2),
            EllipticOperator::smooth_bellman(
                vec![SymmetricMatrix::identity(2), SymmetricMatrix::diag(2, 1.0, 2.0)],
                0.3,
                1.0,
                2.0,
            )
            .unwrap(),
        ];
        for op in &ops {
            assert_eq!(op.evaluate(&SymmetricMatrix::zero(2)), 0.0);
        }
    }

    #[test]
    fn linear_trace_evaluates_the_trace() {
        let op = EllipticOperator::linear_trace(SymmetricMatrix::identity(2), 1.0, 1.0).unwrap();
        let m = SymmetricMatrix::diag(2, 2.0, 3.0);
        assert_eq!(op.evaluate(&m), 5.0);
    }

    #[test]
    fn smooth_bellman_converges_monotonically_to_the_max() {
        // family {tr(M), 2·tr(M)} at M = I (n = 1): exact max is 2
        let mats = vec![SymmetricMatrix::new_1d(1.0), SymmetricMatrix::new_1d(2.0)];
        let m = SymmetricMatrix::new_1d(1.0);
        let mut previous = f64::NEG_INFINITY;
        for theta in [1.0, 0.1, 0.01] {
            let op = EllipticOperator::smooth_bellman(mats.clone(), theta, 1.0, 2.0).unwrap();
            let v = op.evaluate(&m);
            assert!(v >= previous - 1e-13, "values should increase as θ drops");
            assert!(v <= 2.0 + 1e-12, "smoothed max never exceeds the max after normalization");
            previous = v;
        }
        assert!((previous - 2.0).abs() < 0.02, "θ = 0.01 is within 2% of the exact max");
    }

    #[test]
    fn sandwich_property_holds_exactly_for_all_kinds() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (lam, big) = (1.0, 2.0);
        let ops: Vec<EllipticOperator<f64>> = vec![
            EllipticOperator::pucci_plus_op(lam, big).unwrap(),
            EllipticOperator::pucci_minus_op(lam, big).unwrap(),
            EllipticOperator::linear_trace(SymmetricMatrix::diag(2, 1.0, 2.0), lam, big).unwrap(),
            EllipticOperator::smooth_bellman(
                vec![SymmetricMatrix::identity(2), SymmetricMatrix::diag(2, 1.0, 2.0)],
                0.25,
                lam,
                big,
            )
            .unwrap(),
        ];
        for _ in 0..1000 {
            let m = random_sym(2, &mut rng);
            let n = random_sym(2, &mut rng);
            let d = m.sub(&n);
            let lo = pucci_minus(&d, lam, big);
            let hi = pucci_plus(&d, lam, big);
            for op in &ops {
                let diff = op.evaluate(&m) - op.evaluate(&n);
                assert!(
                    lo - 1e-12 <= diff && diff <= hi + 1e-12,
                    "sandwich violated: {lo} ≤ {diff} ≤ {hi}"
                );
            }
        }
    }

    #[test]
    fn pucci_operators_envelope_linear_operators() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let (lam, big) = (1.0, 2.0);
        for _ in 0..500 {
            // random A = R diag(a,b) Rᵀ with a, b in [λ, Λ]
            let a: f64 = rng.gen_range(lam..=big);
            let b: f64 = rng.gen_range(lam..=big);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let (c, s) = (th.cos(), th.sin());
            let axx = a * c * c + b * s * s;
            let ayy = a * s * s + b * c * c;
            let axy = (a - b) * c * s;
            let mat = SymmetricMatrix::new_2d(axx, axy, ayy);
            let op = EllipticOperator::linear_trace(mat, lam, big).unwrap();
            let m = random_sym(2, &mut rng);
            let v = op.evaluate(&m);
            assert!(pucci_minus(&m, lam, big) - 1e-12 <= v);
            assert!(v <= pucci_plus(&m, lam, big) + 1e-12);
        }
    }

    #[test]
    fn convexity_of_convex_kinds_on_random_pairs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let ops: Vec<EllipticOperator<f64>> = vec![
            EllipticOperator::pucci_plus_op(1.0, 2.0).unwrap(),
            EllipticOperator::linear_trace(SymmetricMatrix::diag(2, 1.5, 2.0), 1.0, 2.0).unwrap(),
            EllipticOperator::smooth_bellman(
                vec![SymmetricMatrix::identity(2), SymmetricMatrix::diag(2, 2.0, 1.0)],
                0.2,
                1.0,
                2.0,
            )
            .unwrap(),
        ];
        for _ in 0..500 {
            let m = random_sym(2, &mut rng);
            let n = random_sym(2, &mut rng);
            let mid = m.add(&n).scale(0.5);
            for op in &ops {
                let lhs = op.evaluate(&mid);
                let rhs = 0.5 * (op.evaluate(&m) + op.evaluate(&n));
                assert!(lhs <= rhs + 1e-12, "midpoint convexity");
            }
        }
        assert!(!EllipticOperator::<f64>::pucci_minus_op(1.0, 2.0).unwrap().is_convex());
    }

    proptest! {
        #[test]
        fn pucci_is_positively_homogeneous(
            xx in -3.0f64..3.0, xy in -3.0f64..3.0, yy in -3.0f64..3.0, t in 0.01f64..10.0
        ) {
            let m = SymmetricMatrix::new_2d(xx, xy, yy);
            let scaled = m.scale(t);
            prop_assert!((pucci_plus(&scaled, 1.0, 2.0) - t * pucci_plus(&m, 1.0, 2.0)).abs() < 1e-10);
            prop_assert!((pucci_minus(&scaled, 1.0, 2.0) - t * pucci_minus(&m, 1.0, 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn degeneracy_hand_values() {
        let gamma0 = DegeneracyProfile::regularized(0.0, 0.0).unwrap();
        assert_eq!(gamma0.evaluate([4.2, -1.0]).unwrap(), 1.0);
        let sq = DegeneracyProfile::regularized(2.0, 0.0).unwrap();
        assert_eq!(sq.evaluate([3.0, 4.0]).unwrap(), 25.0);
        let inv = DegeneracyProfile::regularized(-1.0, 1.0).unwrap();
        assert_eq!(inv.evaluate([0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn singular_profile_rejects_the_origin_for_negative_gamma() {
        let p = DegeneracyProfile::singular(-1.0);
        assert!(matches!(p.evaluate([0.0, 0.0]), Err(Error::SingularEvaluation)));
        let degen = DegeneracyProfile::singular(1.0);
        assert_eq!(degen.evaluate([0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn regularized_profile_with_negative_gamma_needs_epsilon() {
        assert!(DegeneracyProfile::<f64>::regularized(-0.5, 0.0).is_err());
        assert!(DegeneracyProfile::<f64>::regularized(-0.5, 0.2).is_ok());
        assert!(DegeneracyProfile::<f64>::regularized(1.0, 0.0).is_ok());
    }

    #[test]
    fn degeneracy_is_lipschitz_on_bounded_balls() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for &(gamma, eps) in &[(1.0, 0.1), (2.0, 0.0), (-0.5, 0.2), (3.0, 0.05)] {
            let prof = DegeneracyProfile::regularized(gamma, eps).unwrap();
            let k = 2.0;
            let lip = prof.lipschitz_on_ball(k);
            for _ in 0..300 {
                let p: [f64; 2] = [rng.gen_range(-k..k) * 0.7, rng.gen_range(-k..k) * 0.7];
                let q: [f64; 2] = [rng.gen_range(-k..k) * 0.7, rng.gen_range(-k..k) * 0.7];
                let dp = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                let dg = (prof.evaluate(p).unwrap() - prof.evaluate(q).unwrap()).abs();
                assert!(dg <= lip * dp + 1e-9, "γ = {gamma}: |g(p)−g(q)| ≤ L·|p−q|");
            }
        }
    }

    #[test]
    fn rhs_hand_values() {
        let lap = EllipticOperator::laplacian(1);
        let gamma0 = DegeneracyProfile::regularized(0.0, 0.0).unwrap();
        // F(0) = 0 makes the rhs vanish
        assert_eq!(
            rhs(&lap, &gamma0, [9.0, 0.0], &SymmetricMatrix::zero(1), 0.0).unwrap(),
            0.0
        );
        // γ = 0: 1·tr(diag(2)) + 1 = 3
        assert_eq!(
            rhs(&lap, &gamma0, [0.3, 0.0], &SymmetricMatrix::new_1d(2.0), 1.0).unwrap(),
            3.0
        );
        // γ = 1 singular: |0.5|·4 = 2
        let sing = DegeneracyProfile::singular(1.0);
        assert_eq!(
            rhs(&lap, &sing, [0.5, 0.0], &SymmetricMatrix::new_1d(4.0), 0.0).unwrap(),
            2.0
        );
    }

    #[test]
    fn scaled_operator_fixes_linear_and_pucci() {
        let lin = EllipticOperator::linear_trace(SymmetricMatrix::diag(2, 1.0, 2.0), 1.0, 2.0).unwrap();
        let scaled = lin.scaled(3.7).unwrap();
        let m = SymmetricMatrix::new_2d(0.3, -1.1, 0.9);
        assert_eq!(lin.evaluate(&m), scaled.evaluate(&m));
        let pp = EllipticOperator::pucci_plus_op(1.0, 2.0).unwrap();
        let m2 = SymmetricMatrix::diag(2, 1.0, -1.0);
        assert_eq!(pp.scaled(2.0).unwrap().evaluate(&m2), 1.0);
    }

    #[test]
    fn scaled_bellman_matches_pointwise_definition() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let op = EllipticOperator::smooth_bellman(
            vec![SymmetricMatrix::identity(2), SymmetricMatrix::diag(2, 1.0, 2.0)],
            0.3,
            1.0,
            2.0,
        )
        .unwrap();
        let s = 2.0;
        let scaled = op.scaled(s).unwrap();
        for _ in 0..200 {
            let m = random_sym(2, &mut rng);
            let direct = op.evaluate(&m.scale(s)) / s;
            assert!((scaled.evaluate(&m) - direct).abs() < 1e-12, "(1/s)·F(sM) pointwise");
        }
    }

    #[test]
    fn eigenvalues_of_2x2_are_exact_on_known_matrices() {
        let m: SymmetricMatrix<f64> = SymmetricMatrix::new_2d(0.0, 1.0, 0.0); // eigenvalues ∓1
        let e = m.eigenvalues();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }
}
