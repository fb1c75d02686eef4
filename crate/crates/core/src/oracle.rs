//! Independent solver: Picard iteration on the integral representation
//!
//! `v(r) = v(r0) + ∫_{r0}^r s^{1-n} ∫_0^s t^{n-1} Δv(t) dt ds`
//!
//! applied to `u` and to `Δu`, on a uniform grid. The quadrature
//! (product-cubic inner rule, composite Simpson outer rule) is a
//! different discretization family from the Runge-Kutta integrator, so the
//! two solvers do not share error modes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::problem::{OriginData, Problem};
use crate::scalar::Real;
use crate::series::StateVector;

/// Largest supported interval end.
pub const MAX_RADIUS: f64 = 10.0;
pub const MIN_GRID_POINTS: usize = 64;
/// How many times `R` is halved before giving up.
pub const MAX_HALVINGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardConfig<T> {
    /// Interval end `R`.
    pub radius: T,
    /// Number of grid intervals (even).
    pub grid_points: usize,
    pub max_iterations: usize,
    /// Stop once `sup |u_{k+1} - u_k| <= tol (1 + sup |u_k|)`.
    pub tol: T,
}

impl<T: Real> PicardConfig<T> {
    pub fn new(radius: T) -> Self {
        Self { radius, grid_points: 2048, max_iterations: 200, tol: T::lit(1e-14).max(T::epsilon() * T::lit(10.0)) }
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > T::zero()) || self.radius > T::lit(MAX_RADIUS) {
            return Err(Error::PicardConfig(format!("R = {} outside (0, {MAX_RADIUS}]", self.radius)));
        }
        if self.grid_points < MIN_GRID_POINTS || self.grid_points % 2 == 1 {
            return Err(Error::PicardConfig(format!(
                "grid_points = {} must be even and at least {MIN_GRID_POINTS}",
                self.grid_points
            )));
        }
        if self.max_iterations == 0 || !(self.tol > T::zero()) {
            return Err(Error::PicardConfig("max_iterations and tol must be positive".into()));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); m];
    let mut weights = vec![T::zero(); m];
    let mf = T::from_usize_lossy(m);
    for i in 0..m {
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (mf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, p_prev) = legendre(m, x);
            dp = mf * (x * p - p_prev) / (x * x - T::one());
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() {
                break;
            }
        }
        let (p, p_prev) = legendre(m, x);
        dp = if (x * x - T::one()).abs() > T::zero() { mf * (x * p - p_prev) / (x * x - T::one()) } else { dp };
        nodes[i] = x;
        weights[i] = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(P_m(x), P_{m-1}(x))`.
fn legendre<T: Real>(m: usize, x: T) -> (T, T) {
    let (mut p0, mut p1) = (T::one(), x);
    if m == 0 {
        return (p0, T::zero());
    }
    for k in 2..=m {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Cumulative composite Simpson integral of uniformly spaced `f` starting
/// at node `from`; entries before `from` are zero. Odd offsets use the
/// four-point partial-panel rule `h/24 (9, 19, -5, 1)` (or its mirror).
pub fn cumulative_simpson<T: Real>(f: &[T], h: T, from: usize) -> Vec<T> {
    let last = f.len() - 1;
    let mut out = vec![T::zero(); f.len()];
    let third = h / T::lit(3.0);
    let mut k = from;
    while k + 2 <= last {
        out[k + 1] = out[k] + partial(f, h, k);
        out[k + 2] = out[k] + third * (f[k] + T::lit(4.0) * f[k + 1] + f[k + 2]);
        k += 2;
    }
    if k < last {
        out[last] = out[k] + partial(f, h, k);
    }
    out
}

/// `∫_{x_k}^{x_{k+1}} f` from the cubic through four neighbouring nodes.
fn partial<T: Real>(f: &[T], h: T, k: usize) -> T {
    let c = |a: f64, b: f64, c: f64, d: f64| [T::lit(a), T::lit(b), T::lit(c), T::lit(d)];
    let (start, w) = if k + 3 < f.len() {
        (k, c(9.0, 19.0, -5.0, 1.0))
    } else if k >= 1 && k + 2 < f.len() {
        (k - 1, c(-1.0, 13.0, 13.0, -1.0))
    } else if k >= 2 {
        (k - 2, c(1.0, -5.0, 19.0, 9.0))
    } else {
        return h / T::lit(2.0) * (f[k] + f[k + 1]);
    };
    (0..4).fold(T::zero(), |acc, i| acc + w[i] * f[start + i]) * h / T::lit(24.0)
}

/// One application of the radial representation on a fixed uniform grid.
#[derive(Debug, Clone)]
pub struct Lift<T> {
    n: usize,
    h: T,
    radii: Vec<T>,
    /// `r^{1-n}`, zero at the origin.
    inv_weight: Vec<T>,
    /// For the interval `[r_j, r_{j+1}]`: first node of the cubic stencil
    /// and the weights of `∫ t^{n-1} f` against its four values.
    interval_weights: Vec<(usize, [T; 4])>,
}

/// Output of [`Lift::apply`].
#[derive(Debug, Clone, PartialEq)]
pub struct Lifted<T> {
    /// `∫_0^r t^{n-1} f dt`
    pub inner: Vec<T>,
    /// `r^{1-n}` times `inner`: the radial derivative of `value`.
    pub flux: Vec<T>,
    /// `∫_0^r s^{1-n} ∫_0^s t^{n-1} f dt ds`
    pub value: Vec<T>,
}

impl<T: Real> Lift<T> {
    pub fn new(n: usize, radius: T, intervals: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension(0));
        }
        if intervals < 4 || intervals % 2 == 1 || !(radius > T::zero()) {
            return Err(Error::PicardConfig(format!("lift needs an even interval count >= 4 and R > 0, got {intervals}, {radius}")));
        }
        let h = radius / T::from_usize_lossy(intervals);
        let radii: Vec<T> = (0..=intervals).map(|j| T::from_usize_lossy(j) * h).collect();
        let inv_weight = radii
            .iter()
            .map(|&r| if r > T::zero() { r.powi(1 - n as i32) } else { T::zero() })
            .collect();
        // t^{n-1} times a cubic has degree n + 2.
        let (gx, gw) = gauss_legendre::<T>(n / 2 + 2);
        let half = T::lit(0.5);
        let interval_weights = (0..intervals)
            .map(|j| {
                let p = j.saturating_sub(1).min(intervals - 3);
                let mut w = [T::zero(); 4];
                for (&x, &wi) in gx.iter().zip(&gw) {
                    let t = radii[j] + h * half * (T::one() + x);
                    let xi = (t - radii[p]) / h;
                    let tw = h * half * wi * t.powi(n as i32 - 1);
                    for k in 0..4 {
                        let kf = T::from_usize_lossy(k);
                        let basis = (0..4).filter(|&m| m != k).fold(T::one(), |b, m| {
                            let mf = T::from_usize_lossy(m);
                            b * (xi - mf) / (kf - mf)
                        });
                        w[k] = w[k] + tw * basis;
                    }
                }
                (p, w)
            })
            .collect();
        Ok(Self { n, h, radii, inv_weight, interval_weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> T {
        self.h
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    /// `∫_{r_from}^{r_k} t^{n-1} f dt` for `k >= from`, zero before.
    pub fn inner(&self, f: &[T], from: usize) -> Vec<T> {
        assert_eq!(f.len(), self.radii.len(), "samples must match the grid");
        let mut out = vec![T::zero(); f.len()];
        for j in from..self.interval_weights.len() {
            let (p, w) = &self.interval_weights[j];
            out[j + 1] = out[j] + (0..4).fold(T::zero(), |acc, i| acc + w[i] * f[p + i]);
        }
        out
    }

    pub fn apply(&self, f: &[T]) -> Lifted<T> {
        let inner = self.inner(f, 0);
        let flux: Vec<T> = inner.iter().zip(&self.inv_weight).map(|(&i, &w)| i * w).collect();
        let value = cumulative_simpson(&flux, self.h, 0);
        Lifted { inner, flux, value }
    }
}

/// `g(r) = ∫_0^r s^{1-n} ∫_0^s t^{n-1} f(t) dt ds` for `f` sampled at
/// `radius * j / (f.len() - 1)`.
pub fn repr_lift<T: Real>(f: &[T], n: usize, radius: T) -> Result<Vec<T>> {
    Ok(Lift::new(n, radius, f.len().saturating_sub(1))?.apply(f).value)
}

/// `∫_{r0}^r s^{1-n} ds`.
pub fn radial_kernel<T: Real>(n: usize, r0: T, r: T) -> T {
    match n {
        1 => r - r0,
        2 => (r / r0).ln(),
        _ => {
            let e = 2 - n as i32;
            (r0.powi(e) - r.powi(e)) / T::from_usize_lossy(n - 2)
        }
    }
}

/// Rebuilds `u` on `[r_{k0}, R]` from `u(r_{k0})` and samples of `Δu` via
/// the anchored identity
///
/// `u(r) = u(r0) + ∫_0^{r0} t^{n-1} Δu dt ∫_{r0}^r s^{1-n} ds
///        + ∫_{r0}^r s^{1-n} ∫_{r0}^s t^{n-1} Δu dt ds`.
///
/// Returns values at nodes `k0..`.
pub fn anchored_reconstruction<T: Real>(lift: &Lift<T>, lap: &[T], k0: usize, u_r0: T) -> Result<Vec<T>> {
    let radii = lift.radii();
    if k0 >= radii.len() {
        return Err(Error::PicardConfig(format!("anchor index {k0} outside the grid")));
    }
    let n = lift.n();
    let r0 = radii[k0];
    let mass = lift.inner(lap, 0)[k0];
    let near = lift.inner(lap, k0);
    let flux: Vec<T> = near.iter().zip(&lift.inv_weight).map(|(&i, &w)| i * w).collect();
    let far = cumulative_simpson(&flux, lift.step(), k0);
    Ok((k0..radii.len())
        .map(|k| {
            let carried = if k == k0 || mass == T::zero() { T::zero() } else { mass * radial_kernel(n, r0, radii[k]) };
            u_r0 + carried + far[k]
        })
        .collect())
}

/// Fixed point of the representation map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardSolution<T> {
    pub problem: Problem<T>,
    pub origin: OriginData<T>,
    /// Final interval end after any halvings.
    pub radius: T,
    pub halvings: usize,
    pub iterations: usize,
    /// Sup-norm update of every iteration at the final radius.
    pub update_history: Vec<T>,
    /// States on the uniform grid, starting at `r = 0`.
    pub samples: Vec<StateVector<T>>,
}

impl<T: Real> PicardSolution<T> {
    pub fn radii(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.r).collect()
    }

    pub fn last_update(&self) -> T {
        self.update_history.last().copied().unwrap_or_else(T::zero)
    }

    /// Whether the last `k` updates decrease with every ratio below one.
    pub fn contraction_witness(&self, k: usize) -> bool {
        let h = &self.update_history;
        h.len() >= k && h[h.len() - k..].windows(2).all(|w| w[1] < w[0])
    }
}

enum Attempt<T> {
    Done(Vec<StateVector<T>>, Vec<T>),
    Positivity,
    Stalled(usize, T),
}

/// Picard iteration `Δu_k = lap0 + lift(u_k^alpha)`, `u_{k+1} = u0 + lift(Δu_k)`
/// from `u0 + lap0 r^2/(2n)`. Halves `R` on positivity loss or
/// non-convergence, at most [`MAX_HALVINGS`] times.
pub fn picard_solve<T: Real>(problem: &Problem<T>, origin: &OriginData<T>, config: &PicardConfig<T>) -> Result<PicardSolution<T>> {
    config.validate()?;
    if problem.n == 0 {
        return Err(Error::Dimension(0));
    }
    if !(problem.alpha <= T::one()) {
        return Err(Error::PicardConfig(format!("alpha = {} > 1 is not supported", problem.alpha)));
    }
    if !(origin.u0 > T::zero()) {
        return Err(Error::NonPositiveOrigin(origin.u0.as_f64()));
    }
    let mut radius = config.radius;
    for halvings in 0..=MAX_HALVINGS {
        let lift = Lift::new(problem.n, radius, config.grid_points)?;
        let last = halvings == MAX_HALVINGS;
        match attempt(problem, origin, config, &lift) {
            Attempt::Done(samples, update_history) => {
                return Ok(PicardSolution {
                    problem: *problem,
                    origin: *origin,
                    radius,
                    halvings,
                    iterations: update_history.len(),
                    update_history,
                    samples,
                })
            }
            Attempt::Positivity if last => return Err(Error::PicardPositivity { radius: radius.as_f64() }),
            Attempt::Stalled(iterations, u) if last => {
                return Err(Error::PicardNonConvergence { iterations, last_update: u.as_f64() })
            }
            _ => radius = radius * T::lit(0.5),
        }
    }
    unreachable!("loop returns on the last halving")
}

fn attempt<T: Real>(problem: &Problem<T>, origin: &OriginData<T>, config: &PicardConfig<T>, lift: &Lift<T>) -> Attempt<T> {
    let n2 = T::lit(2.0) * T::from_usize_lossy(problem.n);
    let alpha = problem.alpha;
    let mut u: Vec<T> = lift.radii().iter().map(|&r| origin.u0 + origin.lap0 * r * r / n2).collect();
    let mut history = Vec::new();
    for _ in 0..config.max_iterations {
        if u.iter().any(|&x| !(x > T::zero())) {
            return Attempt::Positivity;
        }
        let force: Vec<T> = u.iter().map(|&x| if alpha == T::zero() { T::one() } else { x.powf(alpha) }).collect();
        let lap_lift = lift.apply(&force);
        let lap: Vec<T> = lap_lift.value.iter().map(|&g| origin.lap0 + g).collect();
        let u_lift = lift.apply(&lap);
        let next: Vec<T> = u_lift.value.iter().map(|&g| origin.u0 + g).collect();
        let update = u.iter().zip(&next).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        let scale = T::one() + u.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        history.push(update);
        u = next;
        if !update.is_finite() {
            return Attempt::Stalled(history.len(), update);
        }
        if update <= config.tol * scale {
            let samples = lift
                .radii()
                .iter()
                .enumerate()
                .map(|(k, &r)| StateVector { r, u: u[k], du: u_lift.flux[k], v: lap[k], dv: lap_lift.flux[k] })
                .collect();
            return Attempt::Done(samples, history);
        }
    }
    Attempt::Stalled(history.len(), history.last().copied().unwrap_or_else(T::zero))
}

/// Oracle/integrator comparison on `[0, upto]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleAgreement<T> {
    pub radius: T,
    pub halvings: usize,
    pub iterations: usize,
    pub sup_difference: T,
    pub sup_u: T,
    /// `sup_difference / (1 + sup_u)`
    pub scaled_difference: T,
}

/// Trajectory states at the given radii, from the origin series inside the
/// handoff radius and from output samples beyond it. The trajectory must
/// have been integrated with these radii as extra output radii.
pub fn trajectory_at<T: Real>(traj: &Trajectory<T>, radii: &[T]) -> Result<Vec<StateVector<T>>> {
    radii
        .iter()
        .map(|&r| {
            if r <= traj.handoff_radius() {
                return traj.series.eval_state(r);
            }
            let (i, s) = traj
                .sample_at(r)
                .ok_or_else(|| Error::Controls(format!("trajectory has no sample at r = {r}")))?;
            let scale = traj.sample_log_scales[i].exp();
            Ok(StateVector { r, u: s.u * scale, du: s.du * scale, v: s.v * scale, dv: s.dv * scale })
        })
        .collect()
}

/// Sup-norm difference in `u` between the oracle and a trajectory on
/// `[0, min(R, upto)]`.
pub fn compare<T: Real>(solution: &PicardSolution<T>, traj: &Trajectory<T>, upto: T) -> Result<OracleAgreement<T>> {
    let radii: Vec<T> = solution.radii().into_iter().filter(|&r| r <= upto).collect();
    let states = trajectory_at(traj, &radii)?;
    let (mut diff, mut sup) = (T::zero(), T::zero());
    for (a, b) in solution.samples.iter().zip(&states) {
        diff = diff.max((a.u - b.u).abs());
        sup = sup.max(a.u.abs());
    }
    Ok(OracleAgreement {
        radius: solution.radius,
        halvings: solution.halvings,
        iterations: solution.iterations,
        sup_difference: diff,
        sup_u: sup,
        scaled_difference: diff / (T::one() + sup),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(radius: f64, intervals: usize) -> Vec<f64> {
        (0..=intervals).map(|j| radius * j as f64 / intervals as f64).collect()
    }

    #[test]
    fn gauss_legendre_is_exact_for_its_degree() {
        for m in 1..=12usize {
            let (x, w) = gauss_legendre::<f64>(m);
            for k in 0..2 * m {
                let q: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "m = {m}, k = {k}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn cumulative_simpson_handles_odd_offsets() {
        let r = uniform(1.0, 10);
        let f: Vec<f64> = r.iter().map(|x| x * x).collect();
        for from in [0, 1, 3] {
            let c = cumulative_simpson(&f, 0.1, from);
            for k in from..=10 {
                let exact = (r[k].powi(3) - r[from].powi(3)) / 3.0;
                assert!((c[k] - exact).abs() < 1e-15, "from {from}, k {k}");
            }
        }
    }

    #[test]
    fn lift_examples() {
        let r = uniform(2.0, 64);
        for n in 1..=6usize {
            let c = repr_lift(&vec![3.0; 65], n, 2.0).unwrap();
            let sq: Vec<f64> = r.iter().map(|t| t * t).collect();
            let q = repr_lift(&sq, n, 2.0).unwrap();
            let z = repr_lift(&vec![0.0; 65], n, 2.0).unwrap();
            for k in 0..=64 {
                let nf = n as f64;
                assert!((c[k] - 3.0 * r[k] * r[k] / (2.0 * nf)).abs() < 1e-13, "n = {n}");
                assert!((q[k] - r[k].powi(4) / (4.0 * (nf + 2.0))).abs() < 1e-12, "n = {n}, {} vs {}", q[k], r[k].powi(4) / (4.0 * (nf + 2.0)));
                assert_eq!(z[k], 0.0);
            }
        }
    }

    #[test]
    fn alpha_zero_is_reached_immediately() {
        let p = Problem::new(3, 0.0f64).unwrap();
        let o = OriginData::new(1.0, 0.0).unwrap();
        let s = picard_solve(&p, &o, &PicardConfig::new(2.0)).unwrap();
        assert_eq!(s.iterations, 2);
        for x in &s.samples {
            assert!((x.u - (1.0 + x.r.powi(4) / 120.0)).abs() < 1e-13);
            assert!((x.v - x.r * x.r / 6.0).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_closed_forms() {
        let o = OriginData::new(1.0, 1.0).unwrap();
        let s = picard_solve(&Problem::new(3, 1.0f64).unwrap(), &o, &PicardConfig::new(5.0)).unwrap();
        let err = s.samples.iter().skip(1).fold(0.0f64, |m, x| m.max((x.u - x.r.sinh() / x.r).abs()));
        assert!(err < 1e-8, "{err}");
        assert!(s.contraction_witness(5));
        let s = picard_solve(&Problem::new(1, 1.0f64).unwrap(), &o, &PicardConfig::new(3.0)).unwrap();
        let err = s.samples.iter().fold(0.0f64, |m, x| m.max((x.u - x.r.cosh()).abs()));
        assert!(err < 1e-8, "{err}");
        let err = s.samples.iter().fold(0.0f64, |m, x| m.max((x.du - x.r.sinh()).abs()));
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn refinement_changes_little() {
        let o = OriginData::new(1.0, 0.5).unwrap();
        for (n, alpha) in [(1usize, 1.0f64), (2, 0.5), (3, -2.0), (4, -1.0), (5, 0.0)] {
            let p = Problem::new(n, alpha).unwrap();
            let coarse = picard_solve(&p, &o, &PicardConfig::new(5.0).with_grid_points(1024)).unwrap();
            let fine = picard_solve(&p, &o, &PicardConfig::new(5.0).with_grid_points(2048)).unwrap();
            let d = coarse
                .samples
                .iter()
                .zip(fine.samples.iter().step_by(2))
                .fold(0.0f64, |m, (a, b)| m.max((a.u - b.u).abs()));
            assert!(d < 1e-9, "n = {n}, alpha = {alpha}: {d}");
            if alpha != 0.0 {
                assert!(fine.contraction_witness(5), "n = {n}: {:?}", fine.update_history);
            }
        }
    }

    #[test]
    fn positivity_loss_halves_the_radius() {
        let p = Problem::new(3, -2.0).unwrap();
        let s = picard_solve(&p, &OriginData::new(1.0, -10.0).unwrap(), &PicardConfig::new(5.0)).unwrap();
        assert_eq!(s.halvings, 3);
        assert_eq!(s.radius, 0.625);
        let e = picard_solve(&p, &OriginData::new(1.0, -100.0).unwrap(), &PicardConfig::new(5.0)).unwrap_err();
        assert_eq!(e, Error::PicardPositivity { radius: 0.625 });
    }

    #[test]
    fn bad_configurations_are_refused() {
        let p = Problem::new(3, 0.5).unwrap();
        let o = OriginData::new(1.0, 0.0).unwrap();
        for c in [PicardConfig::new(11.0), PicardConfig::new(1.0).with_grid_points(32), PicardConfig::new(1.0).with_grid_points(101)] {
            assert!(matches!(picard_solve(&p, &o, &c), Err(Error::PicardConfig(_))));
        }
    }

    #[test]
    fn anchored_identity_on_closed_forms() {
        let lift = Lift::new(1, 4.0f64, 512).unwrap();
        let cosh: Vec<f64> = lift.radii().iter().map(|r| r.cosh()).collect();
        let sinhc = |r: f64| if r == 0.0 { 1.0 } else { r.sinh() / r };
        for r0 in [1.0f64, 2.0] {
            let k0 = (r0 / lift.step()).round() as usize;
            let u = anchored_reconstruction(&lift, &cosh, k0, r0.cosh()).unwrap();
            for (k, val) in (k0..).zip(u) {
                assert!((val - cosh[k]).abs() < 1e-9 * cosh[k], "n = 1, r0 = {r0}");
            }
            let lift3 = Lift::new(3, 4.0, 512).unwrap();
            let v: Vec<f64> = lift3.radii().iter().map(|&r| sinhc(r)).collect();
            let u = anchored_reconstruction(&lift3, &v, k0, sinhc(r0)).unwrap();
            for (k, val) in (k0..).zip(u) {
                assert!((val - v[k]).abs() < 1e-9 * v[k], "n = 3, r0 = {r0}");
            }
            let lift2 = Lift::new(2, 4.0, 512).unwrap();
            let v: Vec<f64> = lift2.radii().iter().map(|&r| 16.0 * r * r).collect();
            let u = anchored_reconstruction(&lift2, &v, k0, 1.0 + r0.powi(4)).unwrap();
            for (k, val) in (k0..).zip(u) {
                let exact = 1.0 + lift2.radii()[k].powi(4);
                assert!((val - exact).abs() < 1e-9 * exact, "n = 2, r0 = {r0}: {}", (val - exact).abs() / exact);
            }
        }
    }

    #[test]
    fn radial_kernel_branches() {
        assert_eq!(radial_kernel(1, 1.0, 3.0), 2.0);
        assert!((radial_kernel(2, 1.0, std::f64::consts::E) - 1.0).abs() < 1e-15);
        assert!((radial_kernel(4, 1.0f64, 2.0) - (1.0 - 0.25) / 2.0).abs() < 1e-15);
    }
}
