//! Conformable delay equation `t^{1−α} y'(t) + a y(t − T) = b(t)`.
//!
//! The reference solution is the epoch-by-epoch series
//!
//! ```text
//! y(t) = Σ_{j=0}^{⌊t/T⌋} (−a)^j [ y0 Δ^{αj} / (α^j j!)
//!        + Σ_k b_k k! Δ^{α(j+k+1)} / (α^{j+k+1} (j+k+1)!) ],   Δ = t − jT.
//! ```
//!
//! On `[0, T]` it is the exact solution. For later epochs it is exact only at
//! `α = 1`; for `α < 1` it is the conventional reference against which the
//! steppers are measured, so errors there grow with the epoch.

use crate::mesh::{build_mesh, floor_lookup, interp_lookup, steps_per_delay, DelayIndexing, Mesh, Trajectory};
use crate::series::{DelaySeries, Flavour, SeriesInput};
use crate::{Error, ForcingSeries, Result, Scalar};

/// Which fractional derivative the problem uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Family {
    #[default]
    Conformable,
    Caputo,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Conformable => "conformable",
            Family::Caputo => "caputo",
        }
    }
}

/// A delay problem together with its discretisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig<T> {
    pub alpha: T,
    pub a: T,
    pub delay: T,
    pub y0: T,
    pub forcing: ForcingSeries<T>,
    pub h: T,
    pub t_max: T,
    pub family: Family,
    pub indexing: DelayIndexing,
}

impl<T: Scalar> ProblemConfig<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(family: Family, alpha: T, a: T, delay: T, y0: T, forcing: ForcingSeries<T>, h: T, t_max: T) -> Result<Self> {
        let cfg = Self { alpha, a, delay, y0, forcing, h, t_max, family, indexing: DelayIndexing::Guarded };
        let problems = cfg.problems();
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn with_indexing(mut self, indexing: DelayIndexing) -> Self {
        self.indexing = indexing;
        self
    }

    /// Every violated constraint, in a fixed order.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.alpha > T::zero() && self.alpha <= T::one()) {
            out.push(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if !self.a.is_finite() {
            out.push(format!("a must be finite, got {}", self.a));
        }
        if !self.y0.is_finite() {
            out.push(format!("y0 must be finite, got {}", self.y0));
        }
        let delay_ok = self.delay > T::zero() && self.delay.is_finite();
        if !delay_ok {
            out.push(format!("delay must be positive, got {}", self.delay));
        }
        let h_ok = self.h > T::zero() && self.h.is_finite();
        if !h_ok {
            out.push(format!("h must be positive, got {}", self.h));
        }
        if delay_ok && h_ok && steps_per_delay(self.delay, self.h).is_err() {
            out.push(format!("delay/h must be an integer, got {}", self.delay / self.h));
        }
        if !(self.t_max.is_finite() && (!delay_ok || self.t_max >= self.delay)) {
            out.push(format!("t_max must be at least the delay, got {}", self.t_max));
        }
        out
    }

    pub fn steps_per_delay(&self) -> Result<usize> {
        steps_per_delay(self.delay, self.h)
    }

    pub fn mesh(&self) -> Result<Mesh<T>> {
        build_mesh(self.delay, self.steps_per_delay()?, self.t_max)
    }

    pub(crate) fn series_input(&self) -> SeriesInput<'_, T> {
        SeriesInput { alpha: self.alpha, a: self.a, delay: self.delay, y0: self.y0, coeffs: self.forcing.coeffs() }
    }

    pub(crate) fn b(&self, t: T) -> T {
        self.forcing.eval(self.alpha, t)
    }
}

/// `y0 exp(λ t^α/α)`, solution of `T_α y = λ y`.
pub fn conformable_linear_ivp<T: Scalar>(alpha: T, lambda: T, y0: T, t: T) -> T {
    y0 * crate::specfun::conformable_exp(lambda, alpha, t)
}

/// Prepared conformable series, reusable across many `t`.
#[derive(Debug, Clone)]
pub struct ConformableSeries<T>(DelaySeries<T>);

impl<T: Scalar> ConformableSeries<T> {
    /// Valid for `0 ≤ t ≤ t_max`.
    pub fn new(cfg: &ProblemConfig<T>, t_max: T) -> Self {
        let j_max = DelaySeries::epochs_for(cfg.delay, t_max);
        Self(DelaySeries::new(Flavour::Conformable, &cfg.series_input(), j_max))
    }

    pub fn eval(&self, t: T) -> Result<T> {
        self.0.eval(t)
    }
}

/// Conformable delay series at a single `t ≥ 0`.
pub fn series_solution_conformable<T: Scalar>(cfg: &ProblemConfig<T>, t: T) -> Result<T> {
    ConformableSeries::new(cfg, t).eval(t)
}

/// Conformable series sampled on the problem mesh.
pub fn series_trajectory_conformable<T: Scalar>(cfg: &ProblemConfig<T>) -> Result<Trajectory<T>> {
    let mesh = cfg.mesh()?;
    ConformableSeries::new(cfg, mesh.node(mesh.n_steps)).0.sample(mesh, "series")
}

/// `t_n^{1−α} (y_n − y_{n−1})/h` for `n = 1..=N`.
pub fn conformable_derivative_mesh<T: Scalar>(traj: &Trajectory<T>, alpha: T) -> Vec<T> {
    let h = traj.mesh.h;
    traj.values
        .windows(2)
        .enumerate()
        .map(|(i, w)| traj.mesh.node(i + 1).powf(T::one() - alpha) * (w[1] - w[0]) / h)
        .collect()
}

/// Explicit Euler: `y_n = y_{n−1} + h (b(t_n) − a y(t_n − T)) / t_n^{1−α}`.
pub fn solve_euler_conformable<T: Scalar>(cfg: &ProblemConfig<T>) -> Result<Trajectory<T>> {
    let mesh = cfg.mesh()?;
    let h = mesh.h;
    let one_minus = T::one() - cfg.alpha;
    let mut traj = Trajectory::new(mesh, "euler");
    traj.push(cfg.y0);
    for n in 1..mesh.len() {
        let t = mesh.node(n);
        let yd = floor_lookup(&traj.values, h, n, cfg.delay, cfg.indexing);
        let y = traj.values[n - 1] + h * (cfg.b(t) - cfg.a * yd) / t.powf(one_minus);
        if !traj.push(y) {
            break;
        }
    }
    Ok(traj)
}

/// Classical RK4 with the delayed value frozen across the four stages.
///
/// The step producing `y_n` samples the right-hand side at `t_n`,
/// `t_n + h/2` and `t_n + h`, which keeps every stage away from the
/// `t^{α−1}` singularity at the origin.
///
/// With `interp`, `y(t_n − T)` is linearly interpolated between mesh nodes
/// instead of taken at the floor node.
pub fn solve_rk4_conformable<T: Scalar>(cfg: &ProblemConfig<T>, interp: bool) -> Result<Trajectory<T>> {
    let mesh = cfg.mesh()?;
    let h = mesh.h;
    let half = T::c(0.5);
    let two = T::c(2.0);
    let six = T::c(6.0);
    let one_minus = T::one() - cfg.alpha;
    let mut traj = Trajectory::new(mesh, if interp { "rk4-interp" } else { "rk4" });
    traj.push(cfg.y0);
    for n in 1..mesh.len() {
        let t = mesh.node(n);
        let yd = if interp {
            match interp_lookup(&traj.values, h, n, cfg.delay, cfg.indexing) {
                Ok(v) => v,
                Err(Error::OutOfRange { .. }) => {
                    traj.interp_fallbacks += 1;
                    floor_lookup(&traj.values, h, n, cfg.delay, cfg.indexing)
                }
                Err(e) => return Err(e),
            }
        } else {
            floor_lookup(&traj.values, h, n, cfg.delay, cfg.indexing)
        };
        let slope = |s: T| (cfg.b(s) - cfg.a * yd) / s.powf(one_minus);
        let k1 = h * slope(t);
        let k2 = h * slope(t + h * half);
        let k3 = h * slope(t + h * half);
        let k4 = h * slope(t + h);
        let y = traj.values[n - 1] + (k1 + two * k2 + two * k3 + k4) / six;
        if !traj.push(y) {
            break;
        }
    }
    Ok(traj)
}

/// `∫_a^t τ^{α−1} f(τ) dτ` by the product trapezoid rule on `panels` panels:
/// `f` is interpolated linearly and the weight `τ^{α−1}` integrated exactly,
/// which keeps the rule finite at `τ = 0`.
pub fn conformable_integral_numeric<T: Scalar, F: Fn(T) -> T>(f: F, alpha: T, a: T, t: T, panels: usize) -> Result<T> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::Domain(format!("alpha must be in (0, 1], got {alpha}")));
    }
    if !(a >= T::zero()) || !(t >= a) || panels == 0 {
        return Err(Error::InvalidArgument(format!("need 0 <= a <= t and panels > 0 (a={a}, t={t}, panels={panels})")));
    }
    if t == a {
        return Ok(T::zero());
    }
    let ap1 = alpha + T::one();
    let dx = (t - a) / T::of(panels);
    let mut acc = T::zero();
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=panels {
        let x1 = if i == panels { t } else { a + T::of(i) * dx };
        let f1 = f(x1);
        let m0 = (x1.powf(alpha) - x0.powf(alpha)) / alpha;
        let m1 = (x1.powf(ap1) - x0.powf(ap1)) / ap1;
        let w = x1 - x0;
        acc += f0 * (x1 * m0 - m1) / w + f1 * (m1 - x0 * m0) / w;
        x0 = x1;
        f0 = f1;
    }
    Ok(acc)
}
