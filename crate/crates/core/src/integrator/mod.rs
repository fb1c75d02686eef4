//! Adaptive outward integration of the radial system
//!
//! ```text
//! u' = p,   p' = v - (n-1) p / r,   v' = q,   q' = u^alpha - (n-1) q / r
//! ```
//!
//! started from the origin series and stepped with an embedded 6(5)
//! Runge-Kutta pair with dense output.

pub mod tableau;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{OriginData, Problem};
use crate::scalar::Real;
use crate::series::{taylor_coeffs, OriginSeries, DEFAULT_ORDER};
pub use crate::series::StateVector;
use tableau::{Tableau, DENSE_STAGES, ORDER, STAGES};

/// Positivity floor relative to `u(0)`.
pub const U_FLOOR_RELATIVE: f64 = 1e-12;
/// Steps smaller than this fraction of `r` count as underflow.
pub const MIN_STEP_RELATIVE: f64 = 1e-14;
/// Relative accuracy, in `r`, of the located positivity event.
pub const EVENT_TOLERANCE: f64 = 1e-10;

const EVENT_PROBES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// How the integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination<T> {
    ReachedRmax,
    PositivityLost { r_cross: T },
    Overflow { r_stop: T },
    StepUnderflow { r_stop: T },
    StepLimit { r_stop: T },
}

impl<T: Real> Termination<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::ReachedRmax => "reached_rmax",
            Termination::PositivityLost { .. } => "positivity_lost",
            Termination::Overflow { .. } => "overflow",
            Termination::StepUnderflow { .. } => "step_underflow",
            Termination::StepLimit { .. } => "step_limit",
        }
    }

    /// Radius at which integration stopped early, if it did.
    pub fn stop_radius(&self) -> Option<T> {
        match *self {
            Termination::ReachedRmax => None,
            Termination::PositivityLost { r_cross } => Some(r_cross),
            Termination::Overflow { r_stop }
            | Termination::StepUnderflow { r_stop }
            | Termination::StepLimit { r_stop } => Some(r_stop),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorControls<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub rmax: T,
    pub max_steps: usize,
    pub output_points_per_decade: usize,
    /// Radii sampled in addition to the geometric grid.
    pub extra_output_radii: Vec<T>,
    pub series_order: usize,
}

impl<T: Real> IntegratorControls<T> {
    pub fn new(rmax: T) -> Self {
        let rel_tol = T::lit(1e-12).max(T::lit(100.0) * T::epsilon());
        Self {
            rel_tol,
            abs_tol: rel_tol * T::lit(1e-3),
            rmax,
            max_steps: 2_000_000,
            output_points_per_decade: 32,
            extra_output_radii: Vec::new(),
            series_order: DEFAULT_ORDER,
        }
    }

    pub fn with_tolerances(mut self, rel_tol: T, abs_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_extra_radii(mut self, radii: Vec<T>) -> Self {
        self.extra_output_radii = radii;
        self
    }

    fn validate(&self, handoff: T) -> Result<()> {
        let positive = |x: T| x > T::zero() && x.is_finite();
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::Controls(format!("tolerances must be positive (rel {}, abs {})", self.rel_tol, self.abs_tol)));
        }
        if !(self.rmax > handoff) || !self.rmax.is_finite() {
            return Err(Error::Controls(format!("rmax = {} must exceed the series handoff radius {}", self.rmax, handoff)));
        }
        if self.max_steps == 0 || self.output_points_per_decade == 0 {
            return Err(Error::Controls("max_steps and output_points_per_decade must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

/// Integrated radial solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub problem: Problem<T>,
    pub origin: OriginData<T>,
    pub series: OriginSeries<T>,
    pub controls: IntegratorControls<T>,
    /// Samples from the handoff radius outward; radii strictly increase.
    pub samples: Vec<StateVector<T>>,
    /// Natural-log scale of each sample: the true state is `e^{scale}` times
    /// the stored one. All zero off the renormalized path.
    pub sample_log_scales: Vec<T>,
    /// Scale at the end of the integration.
    pub log_scale: T,
    pub termination: Termination<T>,
    pub stats: StepStats,
    /// Sum of local relative error estimates for `u`; a crude bound for the
    /// relative global error at the last sample.
    pub u_rel_error_estimate: T,
}

impl<T: Real> Trajectory<T> {
    pub fn handoff_radius(&self) -> T {
        self.samples[0].r
    }

    pub fn reached_rmax(&self) -> bool {
        self.termination == Termination::ReachedRmax
    }

    pub fn last(&self) -> &StateVector<T> {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// `ln u` at sample `i`, including the renormalization scale.
    pub fn ln_u(&self, i: usize) -> T {
        self.samples[i].u.ln() + self.sample_log_scales[i]
    }

    /// Sample whose radius matches `r` to relative `1e-12`.
    pub fn sample_at(&self, r: T) -> Option<(usize, &StateVector<T>)> {
        let tol = T::lit(1e-12) * r.abs().max(T::min_positive_value());
        let i = self.samples.partition_point(|s| s.r < r - tol);
        self.samples.get(i).filter(|s| (s.r - r).abs() <= tol).map(|s| (i, s))
    }
}

/// `(p, v - (n-1) p / r, q, u^alpha - (n-1) q / r)` at a sample.
pub fn ode_rhs<T: Real>(problem: &Problem<T>, s: &StateVector<T>) -> Result<[T; 4]> {
    if !(s.r > T::zero()) {
        return Err(Error::Domain { what: "ode_rhs radius", value: s.r.as_f64() });
    }
    if !(s.u > T::zero()) {
        return Err(Error::Domain { what: "ode_rhs requires u > 0", value: s.u.as_f64() });
    }
    let sys = System::new(problem);
    sys.eval(s.r, &s.to_array()).ok_or(Error::Domain { what: "ode_rhs forcing", value: s.u.as_f64() })
}

/// Radii at which samples are emitted: a geometric grid aligned to powers of
/// ten, `rmax`, and any extra radii, all inside `(r0, rmax]`.
pub fn output_grid<T: Real>(r0: T, rmax: T, per_decade: usize, extra: &[T]) -> Vec<T> {
    let ppd = T::from_usize_lossy(per_decade);
    let ten = T::lit(10.0);
    let first = (r0.log10() * ppd).floor().to_i64().unwrap_or(0) + 1;
    let mut grid = Vec::new();
    let mut j = first;
    loop {
        let r = ten.powf(T::from_i64(j).expect("grid index") / ppd);
        if r >= rmax {
            break;
        }
        if r > r0 {
            grid.push(r);
        }
        j += 1;
    }
    grid.push(rmax);
    grid.extend(extra.iter().copied().filter(|&r| r > r0 && r <= rmax));
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    let close = |a: T, b: T| (a - b).abs() <= T::lit(1e-13) * b;
    grid.dedup_by(|b, a| close(*a, *b));
    grid
}

struct System<T> {
    nm1: T,
    alpha: T,
    kind: Forcing,
}

#[derive(Clone, Copy, PartialEq)]
enum Forcing {
    Constant,
    Linear,
    Reciprocal,
    General,
}

impl<T: Real> System<T> {
    fn new(problem: &Problem<T>) -> Self {
        let a = problem.alpha;
        let kind = if a == T::zero() {
            Forcing::Constant
        } else if a == T::one() {
            Forcing::Linear
        } else if a == -T::one() {
            Forcing::Reciprocal
        } else {
            Forcing::General
        };
        Self { nm1: T::from_usize_lossy(problem.n) - T::one(), alpha: a, kind }
    }

    /// `None` when `u <= 0` makes `u^alpha` undefined.
    #[inline]
    fn eval(&self, r: T, y: &[T; 4]) -> Option<[T; 4]> {
        let u = y[0];
        let src = match self.kind {
            Forcing::Constant => T::one(),
            Forcing::Linear => u,
            _ if !(u > T::zero()) => return None,
            Forcing::Reciprocal => u.recip(),
            Forcing::General => u.powf(self.alpha),
        };
        let inv_r = r.recip();
        Some([y[1], y[2] - self.nm1 * y[1] * inv_r, y[3], src - self.nm1 * y[3] * inv_r])
    }
}

fn axpy<T: Real>(y: &[T; 4], h: T, ks: &[[T; 4]], w: &[T]) -> [T; 4] {
    std::array::from_fn(|c| {
        let mut acc = T::zero();
        for (k, &wi) in ks.iter().zip(w) {
            if wi != T::zero() {
                acc = acc + wi * k[c];
            }
        }
        y[c] + h * acc
    })
}

struct Step<T> {
    y_new: [T; 4],
    err: [T; 4],
    k: [[T; 4]; DENSE_STAGES],
}

struct Stepper<'a, T> {
    sys: &'a System<T>,
    tab: Tableau<T>,
    evals: usize,
}

impl<'a, T: Real> Stepper<'a, T> {
    /// One trial step; `None` if a stage leaves the domain of `u^alpha`.
    fn attempt(&mut self, r: T, y: &[T; 4], k1: &[T; 4], h: T) -> Option<Step<T>> {
        let mut k = [[T::zero(); 4]; DENSE_STAGES];
        k[0] = *k1;
        for i in 1..STAGES {
            let yi = axpy(y, h, &k[..i], &self.tab.a[i][..i]);
            self.evals += 1;
            k[i] = self.sys.eval(r + self.tab.c[i] * h, &yi)?;
        }
        // FSAL: the last stage is evaluated at the propagated solution
        let y_new = axpy(y, h, &k[..STAGES - 1], &self.tab.a[STAGES - 1][..STAGES - 1]);
        let err = axpy(&[T::zero(); 4], h, &k[..STAGES], &self.tab.b_err);
        Some(Step { y_new, err, k })
    }

    fn add_dense_stage(&mut self, r: T, y: &[T; 4], h: T, step: &mut Step<T>) -> Option<()> {
        let yd = axpy(y, h, &step.k[..DENSE_STAGES - 1], &self.tab.a_dense[..DENSE_STAGES - 1]);
        self.evals += 1;
        step.k[DENSE_STAGES - 1] = self.sys.eval(r + self.tab.c_dense * h, &yd)?;
        Some(())
    }

    fn dense(&self, y: &[T; 4], h: T, step: &Step<T>, theta: T) -> [T; 4] {
        let w = self.tab.dense_weights(theta);
        axpy(y, h, &step.k, &w)
    }
}

fn error_norm<T: Real>(y: &[T; 4], step: &Step<T>, rel: T, abs: T) -> T {
    let mut worst = T::zero();
    for c in 0..4 {
        let scale = abs + rel * y[c].abs().max(step.y_new[c].abs());
        worst = worst.max(step.err[c].abs() / scale);
    }
    worst
}

/// Integrates the smooth radial solution from the origin to `controls.rmax`.
pub fn integrate<T: Real>(
    problem: &Problem<T>,
    origin: &OriginData<T>,
    controls: &IntegratorControls<T>,
) -> Result<Trajectory<T>> {
    run(problem, origin, controls, false)
}

/// `alpha = 1` only: rescales the state by powers of two whenever its
/// max-norm passes [`Real::renorm_threshold`], accumulating the logarithm
/// of the scale.
pub fn integrate_linear_renormalized<T: Real>(
    n: usize,
    origin: &OriginData<T>,
    controls: &IntegratorControls<T>,
) -> Result<Trajectory<T>> {
    let problem = Problem::new(n, T::one())?;
    run(&problem, origin, controls, true)
}

fn run<T: Real>(
    problem: &Problem<T>,
    origin: &OriginData<T>,
    controls: &IntegratorControls<T>,
    renormalize: bool,
) -> Result<Trajectory<T>> {
    if problem.n == 0 {
        return Err(Error::Dimension(0));
    }
    if !(problem.alpha <= T::one()) {
        return Err(Error::Domain { what: "integration exponent (alpha <= 1 required)", value: problem.alpha.as_f64() });
    }
    if !(origin.u0 > T::zero()) {
        return Err(Error::NonPositiveOrigin(origin.u0.as_f64()));
    }
    let series = taylor_coeffs(problem, origin, controls.series_order)?;
    let r0 = series.handoff_radius();
    controls.validate(r0)?;
    let grid = output_grid(r0, controls.rmax, controls.output_points_per_decade, &controls.extra_output_radii);

    let sys = System::new(problem);
    let mut stepper = Stepper { sys: &sys, tab: Tableau::verner65(), evals: 0 };
    let u_floor = T::lit(U_FLOOR_RELATIVE) * origin.u0;
    let rel = controls.rel_tol;
    let abs = controls.abs_tol;
    let ln2 = T::LN_2();

    let start = series.eval_unchecked(r0);
    let mut samples = vec![start];
    let mut scales = vec![T::zero()];
    let mut log_scale = T::zero();
    let mut stats = StepStats::default();
    let mut err_sum = T::zero();

    let mut r = r0;
    let mut y = start.to_array();
    let mut k1 = sys.eval(r, &y).ok_or(Error::NonPositiveOrigin(origin.u0.as_f64()))?;
    stepper.evals += 1;
    let mut h = T::lit(0.5) * r0;
    let mut next = 0usize;
    let inv_order = T::one() / T::from_usize_lossy(ORDER);

    let termination = loop {
        if next >= grid.len() {
            break Termination::ReachedRmax;
        }
        if stats.accepted + stats.rejected >= controls.max_steps {
            break Termination::StepLimit { r_stop: r };
        }
        if h < T::lit(MIN_STEP_RELATIVE) * r {
            break Termination::StepUnderflow { r_stop: r };
        }
        let remaining = controls.rmax - r;
        if h * T::lit(1.01) >= remaining {
            h = remaining;
        }

        let Some(mut step) = stepper.attempt(r, &y, &k1, h) else {
            stats.rejected += 1;
            h = h * T::lit(0.5);
            continue;
        };
        let err = error_norm(&y, &step, rel, abs);
        if !(err <= T::one()) {
            stats.rejected += 1;
            let factor = if err.is_finite() { T::lit(0.9) * err.powf(-inv_order) } else { T::lit(0.2) };
            h = h * factor.max(T::lit(0.2)).min(T::one());
            continue;
        }
        if stepper.add_dense_stage(r, &y, h, &mut step).is_none() {
            stats.rejected += 1;
            h = h * T::lit(0.5);
            continue;
        }
        stats.accepted += 1;
        let r_new = if h == remaining { controls.rmax } else { r + h };

        // positivity event inside the step
        let mut event = None;
        let mut theta_lo = T::zero();
        for &p in &EVENT_PROBES {
            let theta = T::lit(p);
            let u = if p == 1.0 { step.y_new[0] } else { stepper.dense(&y, h, &step, theta)[0] };
            if !(u > u_floor) {
                let mut lo = theta_lo;
                let mut hi = theta;
                while (hi - lo) * h > T::lit(EVENT_TOLERANCE) * (r + lo * h) {
                    let mid = T::lit(0.5) * (lo + hi);
                    if stepper.dense(&y, h, &step, mid)[0] > u_floor {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                event = Some(r + T::lit(0.5) * (lo + hi) * h);
                break;
            }
            theta_lo = theta;
        }
        let r_limit = event.unwrap_or(r_new);

        while next < grid.len() && grid[next] <= r_limit {
            let ro = grid[next];
            if event.is_some() && ro >= r_limit {
                break;
            }
            let yo = if ro == r_new { step.y_new } else { stepper.dense(&y, h, &step, (ro - r) / h) };
            samples.push(StateVector::from_array(ro, yo));
            scales.push(log_scale);
            next += 1;
        }
        if let Some(r_cross) = event {
            break Termination::PositivityLost { r_cross };
        }

        err_sum = err_sum + step.err[0].abs() / step.y_new[0].abs().max(u_floor);
        let norm = step.y_new.iter().fold(T::zero(), |m, c| m.max(c.abs()));
        if !norm.is_finite() || (!renormalize && norm > T::overflow_limit()) {
            break Termination::Overflow { r_stop: r_new };
        }

        r = r_new;
        y = step.y_new;
        k1 = step.k[STAGES - 1];
        if renormalize && norm > T::renorm_threshold() {
            let k = norm.log2().floor();
            let factor = T::lit(2.0).powf(-k);
            y = y.map(|c| c * factor);
            k1 = k1.map(|c| c * factor);
            log_scale = log_scale + k * ln2;
        }

        let factor = if err == T::zero() { T::lit(5.0) } else { T::lit(0.9) * err.powf(-inv_order) };
        h = h * factor.max(T::lit(0.2)).min(T::lit(5.0));
    };
    stats.rhs_evaluations = stepper.evals;

    Ok(Trajectory {
        problem: *problem,
        origin: *origin,
        series,
        controls: controls.clone(),
        samples,
        sample_log_scales: scales,
        log_scale,
        termination,
        stats,
        u_rel_error_estimate: err_sum,
    })
}
