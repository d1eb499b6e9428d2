//! Geometric and field primitives: parabolic cylinders, boundary
//! decomposition, parabolic distance, uniform space-time grids, and scalar
//! fields on them.
//!
//! A cylinder with center `(y, s)`, radius `r`, and time stretch `sigma`
//! is the set `B_r(y) × (s − sigma·r², s]`. The standard cylinder `Q_r(Y)`
//! has `sigma = 1`; intrinsic cylinders `Q_τ^{(1−δ)}` carry
//! `sigma = (1−δ)^{−γ}` so the time depth matches the equation's scaling.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Real};

/// Maximum spatial dimension handled by the grid machinery.
pub const MAX_DIM: usize = 2;

/// A space-time point. The second spatial component is zero in 1D.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    pub x: [T; 2],
    pub t: T,
}

impl<T: Real> Point<T> {
    pub fn new_1d(x: T, t: T) -> Self {
        Point { x: [x, T::zero()], t }
    }

    pub fn new_2d(x: T, y: T, t: T) -> Self {
        Point { x: [x, y], t }
    }
}

/// Euclidean distance between two spatial positions.
#[inline]
pub fn spatial_distance<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Parabolic distance `d(X, Y) = max{ |x−y|, sqrt(|t−s|) }`.
pub fn parabolic_distance<T: Real>(a: &Point<T>, b: &Point<T>) -> T {
    spatial_distance(a.x, b.x).max((a.t - b.t).abs().sqrt())
}

/// Orientation of a cylinder's half-open time window.
///
/// `Backward` is the standard convention `(s − sigma·r², s]`. `Forward` is
/// the boundary-anchored reinterpretation `[s, s + sigma·r²)` used when the
/// anchor sits on the bottom or corner of a larger cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeWindow {
    Backward,
    Forward,
}

/// A parabolic cylinder `B_r(y) × (s − sigma·r², s]` (backward window).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cylinder<T> {
    /// Spatial center `y`.
    pub center: [T; 2],
    /// Anchor time `s`: the top for backward windows, the bottom for forward.
    pub anchor_time: T,
    /// Spatial radius `r > 0`.
    pub radius: T,
    /// Time stretch `sigma > 0`; the window spans `sigma·r²`.
    pub time_stretch: T,
    pub window: TimeWindow,
}

impl<T: Real> Cylinder<T> {
    /// Standard cylinder `Q_r(y, s)` with `sigma = 1`.
    pub fn standard(center: [T; 2], top_time: T, radius: T) -> Result<Self> {
        Self::stretched(center, top_time, radius, T::one())
    }

    /// Cylinder with an explicit time stretch.
    pub fn stretched(center: [T; 2], top_time: T, radius: T, time_stretch: T) -> Result<Self> {
        if !(radius > T::zero()) || !(time_stretch > T::zero()) {
            return Err(Error::Domain(format!(
                "cylinder needs r > 0 and sigma > 0, got r = {radius}, sigma = {time_stretch}"
            )));
        }
        Ok(Cylinder {
            center,
            anchor_time: top_time,
            radius,
            time_stretch,
            window: TimeWindow::Backward,
        })
    }

    /// Intrinsic cylinder `Q_r^{g}` with `sigma = g^{−γ}`, where `g` is the
    /// current gradient bound (a power of `1−δ` in the dichotomy iteration).
    pub fn intrinsic(center: [T; 2], top_time: T, radius: T, grad_bound: T, gamma: T) -> Result<Self> {
        if !(grad_bound > T::zero()) {
            return Err(Error::Domain("intrinsic cylinder needs a positive gradient bound".into()));
        }
        Self::stretched(center, top_time, radius, grad_bound.powf(-gamma))
    }

    /// Forward-in-time window anchored at the bottom, `B_r(y) × [s, s + sigma·r²)`.
    pub fn anchored_forward(center: [T; 2], bottom_time: T, radius: T) -> Result<Self> {
        let mut c = Self::standard(center, bottom_time, radius)?;
        c.window = TimeWindow::Forward;
        Ok(c)
    }

    /// Length of the time window, `sigma·r²`.
    pub fn duration(&self) -> T {
        self.time_stretch * self.radius * self.radius
    }

    pub fn bottom_time(&self) -> T {
        match self.window {
            TimeWindow::Backward => self.anchor_time - self.duration(),
            TimeWindow::Forward => self.anchor_time,
        }
    }

    pub fn top_time(&self) -> T {
        match self.window {
            TimeWindow::Backward => self.anchor_time,
            TimeWindow::Forward => self.anchor_time + self.duration(),
        }
    }

    fn tol_space(&self) -> T {
        real::<T>(1e-9) * (T::one() + self.radius)
    }

    fn tol_time(&self) -> T {
        real::<T>(1e-9) * (T::one() + self.duration())
    }

    /// Membership in the closed cylinder, up to a relative tolerance.
    /// Measurement regions are taken closed so grid points landing exactly on
    /// the boundary are counted.
    pub fn contains_closed(&self, p: &Point<T>) -> bool {
        spatial_distance(p.x, self.center) <= self.radius + self.tol_space()
            && p.t >= self.bottom_time() - self.tol_time()
            && p.t <= self.top_time() + self.tol_time()
    }
}

/// The parts of the parabolic boundary `∂_p = ∂_b ∪ ∂_c ∪ ∂_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParabolicBoundaryPart {
    /// Open bottom disc `B_r × {s − sigma·r²}`.
    Bottom,
    /// Corner sphere `∂B_r × {s − sigma·r²}`.
    Corner,
    /// Lateral side `∂B_r × (s − sigma·r², s]`.
    Side,
    /// The whole parabolic boundary.
    Full,
}

impl ParabolicBoundaryPart {
    /// Whether `self`, viewed as a point set, contains the given part.
    pub fn contains(&self, part: ParabolicBoundaryPart) -> bool {
        matches!(
            (self, part),
            (ParabolicBoundaryPart::Full, _)
                | (ParabolicBoundaryPart::Bottom, ParabolicBoundaryPart::Bottom)
                | (ParabolicBoundaryPart::Corner, ParabolicBoundaryPart::Corner)
                | (ParabolicBoundaryPart::Side, ParabolicBoundaryPart::Side)
        )
    }
}

/// Classification of a grid point relative to a cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Boundary(ParabolicBoundaryPart),
}

/// Uniform space grid × uniform time steps.
///
/// The spatial domain is an axis-aligned box; a ball domain is realized by
/// the optional interior mask. Stored time slices are spaced `dt` apart; the
/// march may take finer substeps internally.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    origin: [T; 2],
    h: T,
    nx: usize,
    ny: usize,
    t0: T,
    dt: T,
    steps: usize,
    mask: Option<Vec<bool>>,
}

fn cells_for<T: Real>(lo: T, hi: T, h: T) -> Result<usize> {
    if !(hi > lo) {
        return Err(Error::Domain(format!("extent must be increasing, got [{lo}, {hi}]")));
    }
    let cells = to_f64((hi - lo) / h);
    let rounded = cells.round();
    if (cells - rounded).abs() > 1e-6 * rounded.max(1.0) {
        return Err(Error::Domain(format!(
            "spatial step {h} does not divide the extent [{lo}, {hi}]"
        )));
    }
    Ok(rounded as usize)
}

impl<T: Real> Grid<T> {
    pub fn new_1d(extent: (T, T), h: T, dt: T, steps: usize, t0: T) -> Result<Self> {
        Self::validate_steps(h, dt, steps)?;
        let nx = cells_for(extent.0, extent.1, h)? + 1;
        Ok(Grid {
            dim: 1,
            origin: [extent.0, T::zero()],
            h,
            nx,
            ny: 1,
            t0,
            dt,
            steps,
            mask: None,
        })
    }

    pub fn new_2d(extent_x: (T, T), extent_y: (T, T), h: T, dt: T, steps: usize, t0: T) -> Result<Self> {
        Self::validate_steps(h, dt, steps)?;
        let nx = cells_for(extent_x.0, extent_x.1, h)? + 1;
        let ny = cells_for(extent_y.0, extent_y.1, h)? + 1;
        Ok(Grid {
            dim: 2,
            origin: [extent_x.0, extent_y.0],
            h,
            nx,
            ny,
            t0,
            dt,
            steps,
            mask: None,
        })
    }

    // steps = 0 (a single stored slice) is allowed for synthetic
    // measurement fields.
    fn validate_steps(h: T, dt: T, _steps: usize) -> Result<()> {
        if !(h > T::zero()) || !(dt > T::zero()) {
            return Err(Error::Domain(format!("h and dt must be positive, got h = {h}, dt = {dt}")));
        }
        Ok(())
    }

    /// Mark grid points strictly inside the ball `B_r(center)` as interior.
    ///
    /// Points outside the ball that touch an interior point (Chebyshev
    /// distance 1) become the Dirichlet ring; remaining points are inactive.
    pub fn with_ball_mask(mut self, center: [T; 2], r: T) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::Domain("ball masks are only meaningful in 2D".into()));
        }
        let mut mask = vec![false; self.nx * self.ny];
        for si in 0..self.nx * self.ny {
            let x = self.coords(si);
            mask[si] = spatial_distance(x, center) < r;
        }
        // Every interior point needs its full 8-neighborhood inside the array.
        for si in 0..mask.len() {
            if !mask[si] {
                continue;
            }
            let (i, j) = self.split(si);
            if i == 0 || j == 0 || i + 1 >= self.nx || j + 1 >= self.ny {
                return Err(Error::Domain(
                    "ball mask touches the box edge; enlarge the box or shrink the ball".into(),
                ));
            }
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::Domain("ball mask marks no interior point".into()));
        }
        if !connected(&mask, self.nx, self.ny) {
            return Err(Error::Domain("masked interior is disconnected".into()));
        }
        self.mask = Some(mask);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of stored time slices, `steps + 1`.
    pub fn n_slices(&self) -> usize {
        self.steps + 1
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn t_final(&self) -> T {
        self.time(self.steps)
    }

    pub fn time(&self, k: usize) -> T {
        self.t0 + T::from_usize(k).unwrap() * self.dt
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_space(&self) -> usize {
        self.nx * self.ny
    }

    pub fn origin(&self) -> [T; 2] {
        self.origin
    }

    pub fn extent(&self, axis: usize) -> (T, T) {
        let n = if axis == 0 { self.nx } else { self.ny };
        (
            self.origin[axis],
            self.origin[axis] + T::from_usize(n - 1).unwrap() * self.h,
        )
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn split(&self, si: usize) -> (usize, usize) {
        (si % self.nx, si / self.nx)
    }

    pub fn coords(&self, si: usize) -> [T; 2] {
        let (i, j) = self.split(si);
        [
            self.origin[0] + T::from_usize(i).unwrap() * self.h,
            if self.dim == 2 {
                self.origin[1] + T::from_usize(j).unwrap() * self.h
            } else {
                T::zero()
            },
        ]
    }

    pub fn point(&self, si: usize, k: usize) -> Point<T> {
        Point { x: self.coords(si), t: self.time(k) }
    }

    /// Neighbor index offset by `(di, dj)` cells, if it stays in the array.
    #[inline]
    pub fn neighbor(&self, si: usize, di: i64, dj: i64) -> Option<usize> {
        let (i, j) = self.split(si);
        let ni = i as i64 + di;
        let nj = j as i64 + dj;
        if ni < 0 || nj < 0 || ni >= self.nx as i64 || nj >= self.ny as i64 {
            return None;
        }
        Some(self.index(ni as usize, nj as usize))
    }

    /// Interior points are updated by the march; for box domains these are
    /// the points off every face, for masked domains the masked points.
    pub fn is_interior(&self, si: usize) -> bool {
        match &self.mask {
            Some(mask) => mask[si],
            None => {
                let (i, j) = self.split(si);
                let x_inner = i > 0 && i + 1 < self.nx;
                if self.dim == 1 {
                    x_inner
                } else {
                    x_inner && j > 0 && j + 1 < self.ny
                }
            }
        }
    }

    /// Dirichlet points: box faces, or the ring of unmasked points touching
    /// the masked interior.
    pub fn is_boundary(&self, si: usize) -> bool {
        match &self.mask {
            Some(mask) => {
                if mask[si] {
                    return false;
                }
                for dj in -1..=1i64 {
                    for di in -1..=1i64 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        if let Some(ni) = self.neighbor(si, di, dj) {
                            if mask[ni] {
                                return true;
                            }
                        }
                    }
                }
                false
            }
            None => !self.is_interior(si),
        }
    }

    /// Points the solve touches: interior plus the Dirichlet set.
    pub fn is_active(&self, si: usize) -> bool {
        self.is_interior(si) || self.is_boundary(si)
    }

    pub fn interior_points(&self) -> Vec<usize> {
        (0..self.n_space()).filter(|&si| self.is_interior(si)).collect()
    }

    pub fn boundary_points(&self) -> Vec<usize> {
        (0..self.n_space()).filter(|&si| self.is_boundary(si)).collect()
    }

    /// Active space points inside the closed ball slice of `region`.
    pub fn space_points_in(&self, region: &Cylinder<T>) -> Vec<usize> {
        let tol = real::<T>(1e-9) * (T::one() + region.radius);
        (0..self.n_space())
            .filter(|&si| {
                self.is_active(si)
                    && spatial_distance(self.coords(si), region.center) <= region.radius + tol
            })
            .collect()
    }

    /// Stored slices whose time falls in the cylinder's window (taken closed
    /// at both ends, up to tolerance).
    pub fn slices_in(&self, region: &Cylinder<T>) -> Vec<usize> {
        let tol = real::<T>(1e-6) * self.dt;
        (0..self.n_slices())
            .filter(|&k| {
                let t = self.time(k);
                t >= region.bottom_time() - tol && t <= region.top_time() + tol
            })
            .collect()
    }
}

fn connected(mask: &[bool], nx: usize, ny: usize) -> bool {
    let total = mask.iter().filter(|&&m| m).count();
    let Some(start) = mask.iter().position(|&m| m) else {
        return false;
    };
    let mut seen = vec![false; mask.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 0usize;
    while let Some(si) = stack.pop() {
        reached += 1;
        let (i, j) = (si % nx, si / nx);
        let mut push = |ni: usize| {
            if mask[ni] && !seen[ni] {
                seen[ni] = true;
                stack.push(ni);
            }
        };
        if i > 0 {
            push(si - 1);
        }
        if i + 1 < nx {
            push(si + 1);
        }
        if j > 0 {
            push(si - nx);
        }
        if j + 1 < ny {
            push(si + nx);
        }
    }
    reached == total
}

/// Classify a grid point of the closed cylinder as interior, bottom, corner,
/// or side. Interior means `|x − y| < r` and `t > s − sigma·r²`; the final
/// time slice is interior, the initial slice carries the bottom/corner labels.
pub fn classify_boundary<T: Real>(
    grid: &Grid<T>,
    cylinder: &Cylinder<T>,
    si: usize,
    k: usize,
) -> Result<PointClass> {
    let p = grid.point(si, k);
    let dist = spatial_distance(p.x, cylinder.center);
    let tol_r = cylinder.tol_space();
    let tol_t = cylinder.tol_time();
    let bottom = cylinder.bottom_time();
    let top = cylinder.top_time();
    if dist > cylinder.radius + tol_r || p.t < bottom - tol_t || p.t > top + tol_t {
        return Err(Error::OutsideCylinder(format!(
            "|x − y| = {dist}, t = {} vs r = {}, window [{bottom}, {top}]",
            p.t, cylinder.radius
        )));
    }
    let on_sphere = dist >= cylinder.radius - tol_r;
    let on_bottom = (p.t - bottom).abs() <= tol_t;
    Ok(match (on_bottom, on_sphere) {
        (true, true) => PointClass::Boundary(ParabolicBoundaryPart::Corner),
        (true, false) => PointClass::Boundary(ParabolicBoundaryPart::Bottom),
        (false, true) => PointClass::Boundary(ParabolicBoundaryPart::Side),
        (false, false) => PointClass::Interior,
    })
}

/// Scalar values on a grid: one value per (space index, stored slice).
#[derive(Clone, Debug)]
pub struct SpaceTimeField<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Real> SpaceTimeField<T> {
    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let n = grid.n_space() * grid.n_slices();
        SpaceTimeField { grid, values: vec![T::zero(); n] }
    }

    /// Evaluate `f(x, t)` at every grid point.
    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn(Point<T>) -> T) -> Self {
        let mut field = Self::zeros(grid);
        let grid = field.grid.clone();
        for k in 0..grid.n_slices() {
            for si in 0..grid.n_space() {
                let v = f(grid.point(si, k));
                field.set(si, k, v);
            }
        }
        field
    }

    pub fn from_values(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        let n = grid.n_space() * grid.n_slices();
        if values.len() != n {
            return Err(Error::Domain(format!(
                "field length {} does not match grid ({} points × {} slices)",
                values.len(),
                grid.n_space(),
                grid.n_slices()
            )));
        }
        Ok(SpaceTimeField { grid, values })
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    #[inline]
    pub fn at(&self, si: usize, k: usize) -> T {
        self.values[k * self.grid.n_space() + si]
    }

    #[inline]
    pub fn set(&mut self, si: usize, k: usize, v: T) {
        self.values[k * self.grid.n_space() + si] = v;
    }

    pub fn slice(&self, k: usize) -> &[T] {
        let n = self.grid.n_space();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut [T] {
        let n = self.grid.n_space();
        &mut self.values[k * n..(k + 1) * n]
    }

    /// Both slices `k` and `k + 1`, the second mutably (for the march).
    pub fn slice_pair_mut(&mut self, k: usize) -> (&[T], &mut [T]) {
        let n = self.grid.n_space();
        let (a, b) = self.values.split_at_mut((k + 1) * n);
        (&a[k * n..], &mut b[..n])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Sup norm over active points and all slices.
    pub fn sup_norm(&self) -> T {
        let mut m = T::zero();
        for k in 0..self.grid.n_slices() {
            let s = self.slice(k);
            for si in 0..self.grid.n_space() {
                if self.grid.is_active(si) {
                    m = m.max(s[si].abs());
                }
            }
        }
        m
    }

    pub fn all_finite(&self) -> bool {
        let grid = &self.grid;
        (0..grid.n_slices()).all(|k| {
            let s = self.slice(k);
            (0..grid.n_space()).all(|si| !grid.is_active(si) || s[si].is_finite())
        })
    }

    /// Max − min over active grid points inside the region.
    pub fn oscillation(&self, region: &Cylinder<T>) -> Result<T> {
        oscillation_over(&self.grid, region, |si, k| Some(self.at(si, k)))
    }
}

/// Oscillation of a sampled quantity over a cylinder region; `sample` may
/// decline points (e.g. where a difference quotient is not defined).
pub fn oscillation_over<T: Real>(
    grid: &Grid<T>,
    region: &Cylinder<T>,
    sample: impl Fn(usize, usize) -> Option<T>,
) -> Result<T> {
    let pts = grid.space_points_in(region);
    let slices = grid.slices_in(region);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut any = false;
    for &k in &slices {
        for &si in &pts {
            if let Some(v) = sample(si, k) {
                lo = lo.min(v);
                hi = hi.max(v);
                any = true;
            }
        }
    }
    if !any {
        return Err(Error::EmptyRegion(format!(
            "cylinder r = {} at t = {} contains no sampled grid point",
            region.radius,
            region.top_time()
        )));
    }
    Ok(hi - lo)
}

/// Free-function form of [`SpaceTimeField::oscillation`].
pub fn oscillation<T: Real>(field: &SpaceTimeField<T>, region: &Cylinder<T>) -> Result<T> {
    field.oscillation(region)
}

/// Write a field in the `vispar-grid v1` plain-text format: a header line,
/// then one block of row-major float64 values per time slice, blocks
/// separated by blank lines.
pub fn write_grid_dump<T: Real>(field: &SpaceTimeField<T>, out: &mut dyn Write) -> Result<()> {
    let g = field.grid();
    if g.dim() == 1 {
        writeln!(
            out,
            "vispar-grid v1 dim=1 nx={} nt={} h={} dt={}",
            g.nx(),
            g.n_slices(),
            to_f64(g.h()),
            to_f64(g.dt())
        )?;
    } else {
        writeln!(
            out,
            "vispar-grid v1 dim=2 nx={} ny={} nt={} h={} dt={}",
            g.nx(),
            g.ny(),
            g.n_slices(),
            to_f64(g.h()),
            to_f64(g.dt())
        )?;
    }
    for k in 0..g.n_slices() {
        let s = field.slice(k);
        for j in 0..g.ny() {
            let row: Vec<String> = (0..g.nx())
                .map(|i| format!("{}", to_f64(s[g.index(i, j)])))
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        if k + 1 < g.n_slices() {
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Header of a `vispar-grid v1` dump. The format does not carry the grid
/// origin or initial time; the consumer supplies those.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDumpHeader {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub h: f64,
    pub dt: f64,
}

/// Parse a `vispar-grid v1` dump into its header and raw values.
pub fn read_grid_dump(input: &mut dyn BufRead) -> Result<(GridDumpHeader, Vec<f64>)> {
    let mut header_line = String::new();
    input.read_line(&mut header_line)?;
    let header = parse_header(header_line.trim_end())?;
    let mut values = Vec::with_capacity(header.nx * header.ny * header.nt);
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Format(format!("bad float in grid dump: {tok:?}")))?;
            values.push(v);
        }
    }
    let expect = header.nx * header.ny * header.nt;
    if values.len() != expect {
        return Err(Error::Format(format!(
            "grid dump has {} values, header promises {expect}",
            values.len()
        )));
    }
    Ok((header, values))
}

fn parse_header(line: &str) -> Result<GridDumpHeader> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("vispar-grid") || parts.next() != Some("v1") {
        return Err(Error::Format(format!("not a vispar-grid v1 header: {line:?}")));
    }
    let mut dim = None;
    let mut nx = None;
    let mut ny = None;
    let mut nt = None;
    let mut h = None;
    let mut dt = None;
    for kv in parts {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header token {kv:?}")))?;
        let bad = |k: &str| Error::Format(format!("bad header value for {k}"));
        match key {
            "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad("dim"))?),
            "nx" => nx = Some(value.parse::<usize>().map_err(|_| bad("nx"))?),
            "ny" => ny = Some(value.parse::<usize>().map_err(|_| bad("ny"))?),
            "nt" => nt = Some(value.parse::<usize>().map_err(|_| bad("nt"))?),
            "h" => h = Some(value.parse::<f64>().map_err(|_| bad("h"))?),
            "dt" => dt = Some(value.parse::<f64>().map_err(|_| bad("dt"))?),
            other => return Err(Error::Format(format!("unknown header key {other:?}"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::Format("header missing dim".into()))?;
    if dim != 1 && dim != 2 {
        return Err(Error::Format(format!("unsupported dim {dim}")));
    }
    Ok(GridDumpHeader {
        dim,
        nx: nx.ok_or_else(|| Error::Format("header missing nx".into()))?,
        ny: if dim == 2 {
            ny.ok_or_else(|| Error::Format("header missing ny".into()))?
        } else {
            1
        },
        nt: nt.ok_or_else(|| Error::Format("header missing nt".into()))?,
        h: h.ok_or_else(|| Error::Format("header missing h".into()))?,
        dt: dt.ok_or_else(|| Error::Format("header missing dt".into()))?,
    })
}
