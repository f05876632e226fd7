//! Caputo delay equation `ᶜD^α y(t) + a y(t − T) = b(t)`, `0 < α ≤ 1`.
//!
//! The series
//!
//! ```text
//! y(t) = Σ_j (−a)^j θ(t − jT) [ y0 Δ^{αj} / Γ(αj+1)
//!        + Σ_k Γ(αk+1) α^{−k} b_k Δ^{α(j+k+1)} / Γ(α(j+k+1)+1) ],   Δ = t − jT,
//! ```
//!
//! is the exact solution. All steppers take the first delay interval from
//! the series and then march with full-memory discretisations of the
//! Caputo operator, so each costs `O(N²)`.

use crate::mesh::{Mesh, Trajectory};
use crate::series::{DelaySeries, Flavour};
use crate::specfun::{gamma, mittag_leffler, MLParams};
use crate::{Error, ProblemConfig, Result, Scalar};

/// Prepared Caputo series.
#[derive(Debug, Clone)]
pub struct CaputoSeries<T>(DelaySeries<T>);

impl<T: Scalar> CaputoSeries<T> {
    /// Valid for `0 ≤ t ≤ t_max`.
    pub fn new(cfg: &ProblemConfig<T>, t_max: T) -> Self {
        let j_max = DelaySeries::epochs_for(cfg.delay, t_max);
        Self(DelaySeries::new(Flavour::Caputo, &cfg.series_input(), j_max))
    }

    pub fn eval(&self, t: T) -> Result<T> {
        self.0.eval(t)
    }
}

/// Caputo delay series at a single `t ≥ 0`.
pub fn series_solution_caputo<T: Scalar>(cfg: &ProblemConfig<T>, t: T) -> Result<T> {
    CaputoSeries::new(cfg, t).eval(t)
}

/// Caputo series sampled on the problem mesh.
pub fn series_trajectory_caputo<T: Scalar>(cfg: &ProblemConfig<T>) -> Result<Trajectory<T>> {
    let mesh = cfg.mesh()?;
    CaputoSeries::new(cfg, mesh.node(mesh.n_steps)).0.sample(mesh, "caputo-series")
}

/// Solution of `ᶜD^α y + a y = b0` (no delay): `y0 E + (b0/a)(1 − E)`, `E = E_α(−a t^α)`.
pub fn caputo_constant_forcing<T: Scalar>(alpha: T, a: T, b0: T, y0: T, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    if a == T::zero() {
        return Ok(y0 + b0 * t.powf(alpha) / gamma(alpha + T::one()));
    }
    let e = mittag_leffler(MLParams::new(alpha, -a * t.powf(alpha)))?;
    Ok(y0 * e + b0 / a * (T::one() - e))
}

fn l1_weights<T: Scalar>(alpha: T, n: usize) -> Vec<T> {
    // w[k] = k^{1−α} − (k−1)^{1−α}, with w[1] = 1 even at α = 1
    let p = T::one() - alpha;
    let mut w = vec![T::zero(); n + 1];
    if n >= 1 {
        w[1] = T::one();
    }
    for (k, wk) in w.iter_mut().enumerate().skip(2) {
        *wk = T::of(k).powf(p) - T::of(k - 1).powf(p);
    }
    w
}

/// L1 approximation `δ^α y_n = h^{−α}/Γ(2−α) Σ_{i<n} w_{n−i} (y_{i+1} − y_i)` for `n = 1..=N`.
pub fn discrete_caputo_l1<T: Scalar>(values: &[T], h: T, alpha: T) -> Vec<T> {
    let n_max = values.len().saturating_sub(1);
    let w = l1_weights(alpha, n_max);
    let scale = h.powf(-alpha) / gamma(T::c(2.0) - alpha);
    (1..=n_max)
        .map(|n| {
            let s: T = (0..n).map(|i| w[n - i] * (values[i + 1] - values[i])).sum();
            s * scale
        })
        .collect()
}

/// Update rule for the fractional Euler stepper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EulerKernel {
    /// L1 discretisation with the full memory sum.
    #[default]
    L1,
    /// Memoryless `y_{i+1} = y_i + h^α/Γ(α+1) (b(t_i) − a y_{i−m})`.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerOptions {
    pub kernel: EulerKernel,
    /// Take the series on `n ≤ m` instead of `n < m`.
    pub fill_through_delay: bool,
}

impl Default for EulerOptions {
    fn default() -> Self {
        Self { kernel: EulerKernel::L1, fill_through_delay: true }
    }
}

struct Prepared<T> {
    mesh: Mesh<T>,
    series: CaputoSeries<T>,
    traj: Trajectory<T>,
    start: usize,
}

fn prepare<T: Scalar>(cfg: &ProblemConfig<T>, label: &str, fill_through_delay: bool) -> Result<Prepared<T>> {
    let mesh = cfg.mesh()?;
    let series = CaputoSeries::new(cfg, mesh.node(mesh.n_steps));
    let mut traj = Trajectory::new(mesh, label);
    let start = if fill_through_delay { mesh.m + 1 } else { mesh.m }.min(mesh.len());
    for n in 0..start {
        traj.push(series.eval(mesh.node(n))?);
    }
    Ok(Prepared { mesh, series, traj, start })
}

fn delayed<T: Scalar>(values: &[T], n: usize, m: usize) -> T {
    if n >= m {
        values[n - m]
    } else {
        T::zero()
    }
}

/// `y_n − y_{n−1}` from the L1 relation with forcing `f` at `t_n`.
fn l1_increment<T: Scalar>(values: &[T], w: &[T], g: T, f: T, n: usize) -> T {
    let mut memory = T::zero();
    for i in 0..n - 1 {
        memory += w[n - i] * (values[i + 1] - values[i]);
    }
    g * f - memory
}

/// Fractional Euler for the Caputo problem with default options.
pub fn solve_l1_euler_caputo<T: Scalar>(cfg: &ProblemConfig<T>) -> Result<Trajectory<T>> {
    solve_l1_euler_caputo_with(cfg, EulerOptions::default())
}

pub fn solve_l1_euler_caputo_with<T: Scalar>(cfg: &ProblemConfig<T>, opts: EulerOptions) -> Result<Trajectory<T>> {
    let Prepared { mesh, mut traj, start, .. } = prepare(cfg, "caputo-l1", opts.fill_through_delay)?;
    let m = mesh.m;
    match opts.kernel {
        EulerKernel::L1 => {
            let w = l1_weights(cfg.alpha, mesh.n_steps);
            let g = mesh.h.powf(cfg.alpha) * gamma(T::c(2.0) - cfg.alpha);
            for n in start..mesh.len() {
                let f = cfg.b(mesh.node(n)) - cfg.a * delayed(&traj.values, n, m);
                let y = traj.values[n - 1] + l1_increment(&traj.values, &w, g, f, n);
                if !traj.push(y) {
                    break;
                }
            }
        }
        EulerKernel::Local => {
            let c = mesh.h.powf(cfg.alpha) / gamma(cfg.alpha + T::one());
            for n in start..mesh.len() {
                let f = cfg.b(mesh.node(n - 1)) - cfg.a * delayed(&traj.values, n - 1, m);
                let y = traj.values[n - 1] + c * f;
                if !traj.push(y) {
                    break;
                }
            }
        }
    }
    Ok(traj)
}

/// Whether the L2-1σ correction on top of the L1 step is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrectionMode {
    #[default]
    Full,
    /// Drops the correction; the result is bitwise the L1 trajectory.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2SigmaParams<T> {
    /// Offset of the collocation point inside each step, `0 < σ ≤ 1`.
    pub sigma: T,
    pub correction: CorrectionMode,
    pub fill_through_delay: bool,
}

impl<T: Scalar> L2SigmaParams<T> {
    /// `σ = 1 − α/2`, the choice that gives order `3 − α` on smooth solutions.
    pub fn for_alpha(alpha: T) -> Self {
        Self { sigma: T::one() - alpha * T::c(0.5), correction: CorrectionMode::Full, fill_through_delay: true }
    }
}

/// L2-1σ (Alikhanov) scheme with default parameters.
pub fn solve_l2_1sigma_caputo<T: Scalar>(cfg: &ProblemConfig<T>) -> Result<Trajectory<T>> {
    solve_l2_1sigma_caputo_with(cfg, L2SigmaParams::for_alpha(cfg.alpha))
}

pub fn solve_l2_1sigma_caputo_with<T: Scalar>(cfg: &ProblemConfig<T>, params: L2SigmaParams<T>) -> Result<Trajectory<T>> {
    let sigma = params.sigma;
    if !(sigma > T::zero() && sigma <= T::one()) {
        return Err(Error::InvalidArgument(format!("sigma must be in (0, 1], got {sigma}")));
    }
    let Prepared { mesh, mut traj, start, .. } = prepare(cfg, "caputo-l21sigma", params.fill_through_delay)?;
    let alpha = cfg.alpha;
    let m = mesh.m;
    let n_max = mesh.n_steps;
    let p1 = T::one() - alpha;
    let p2 = T::c(2.0) - alpha;
    let half = T::c(0.5);

    // a_l, b_l as in Alikhanov's construction
    let mut al = vec![T::zero(); n_max + 2];
    let mut bl = vec![T::zero(); n_max + 2];
    al[0] = sigma.powf(p1);
    for l in 1..n_max + 2 {
        let hi = T::of(l) + sigma;
        let lo = T::of(l - 1) + sigma;
        al[l] = hi.powf(p1) - lo.powf(p1);
        bl[l] = (hi.powf(p2) - lo.powf(p2)) / p2 - half * (hi.powf(p1) + lo.powf(p1));
    }
    let mid: Vec<T> = (0..n_max + 1).map(|l| if l == 0 { T::zero() } else { al[l] + bl[l + 1] - bl[l] }).collect();

    let w = l1_weights(alpha, n_max);
    let g = mesh.h.powf(alpha) * gamma(p2);
    for n in start..mesh.len() {
        let s = n - 1;
        let y_prev = traj.values[s];
        let l1 = {
            let f = cfg.b(mesh.node(n)) - cfg.a * delayed(&traj.values, n, m);
            l1_increment(&traj.values, &w, g, f, n)
        };
        let correction = match params.correction {
            CorrectionMode::Zero => T::zero(),
            CorrectionMode::Full => {
                let t_sigma = mesh.node(s) + sigma * mesh.h;
                let yd = if s >= m {
                    (T::one() - sigma) * traj.values[s - m] + sigma * traj.values[s - m + 1]
                } else {
                    T::zero()
                };
                let f = cfg.b(t_sigma) - cfg.a * yd;
                let c0 = if s == 0 { al[0] } else { al[0] + bl[1] };
                let mut memory = T::zero();
                for l in 1..s {
                    memory += mid[l] * (traj.values[s - l + 1] - traj.values[s - l]);
                }
                if s >= 1 {
                    memory += (al[s] - bl[s]) * (traj.values[1] - traj.values[0]);
                }
                (g * f - memory) / c0 - l1
            }
        };
        if !traj.push(y_prev + l1 + correction) {
            break;
        }
    }
    Ok(traj)
}

/// Corrector used by the predictor–corrector stepper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrectorKind {
    /// Product trapezoid rule for `y0 + I^α f` over the whole history.
    #[default]
    ProductTrapezoid,
    /// `y_{n−1} + h^α/Γ(α+1) (f_{n−1} + f_n)/2`.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcOptions<T> {
    pub corrector: CorrectorKind,
    /// Weight of the corrector; the series predictor gets `1 − blend`.
    pub blend: T,
}

impl<T: Scalar> Default for PcOptions<T> {
    fn default() -> Self {
        Self { corrector: CorrectorKind::ProductTrapezoid, blend: T::c(0.5) }
    }
}

/// Predictor–corrector with default options.
pub fn solve_predictor_corrector_caputo<T: Scalar>(cfg: &ProblemConfig<T>) -> Result<Trajectory<T>> {
    solve_predictor_corrector_caputo_with(cfg, PcOptions::default())
}

/// Nodes up to `t_n = T` come from the series. After that the series
/// value is the predictor and `y_n = blend · corrector + (1 − blend) · predictor`.
///
/// `f = b − a y(t − T)` jumps at `t = T`; the product trapezoid uses the
/// left limit on the panel ending there and the right limit after.
pub fn solve_predictor_corrector_caputo_with<T: Scalar>(cfg: &ProblemConfig<T>, opts: PcOptions<T>) -> Result<Trajectory<T>> {
    let Prepared { mesh, series, mut traj, start } = prepare(cfg, "caputo-pc", true)?;
    let alpha = cfg.alpha;
    let m = mesh.m;
    let n_max = mesh.n_steps;
    let blend = opts.blend;
    let b: Vec<T> = (0..mesh.len()).map(|n| cfg.b(mesh.node(n))).collect();
    // right and left values of f at node j
    let mut f_right: Vec<T> = Vec::with_capacity(mesh.len());
    let mut f_left: Vec<T> = Vec::with_capacity(mesh.len());
    let f_at = |values: &[T], j: usize, left: bool| -> T {
        let active = if left { j > m } else { j >= m };
        if active {
            b[j] - cfg.a * values[j - m]
        } else {
            b[j]
        }
    };
    for j in 0..start {
        f_right.push(f_at(&traj.values, j, false));
        f_left.push(f_at(&traj.values, j, true));
    }

    match opts.corrector {
        CorrectorKind::ProductTrapezoid => {
            let ap1 = alpha + T::one();
            let mut wl = vec![T::zero(); n_max + 1];
            let mut wr = vec![T::zero(); n_max + 1];
            for k in 1..=n_max {
                let kk = T::of(k);
                let km = T::of(k - 1);
                let p = (kk.powf(ap1) - km.powf(ap1)) / ap1;
                let q = (kk.powf(alpha) - km.powf(alpha)) / alpha;
                wl[k] = p - km * q;
                wr[k] = kk * q - p;
            }
            let scale = mesh.h.powf(alpha) / gamma(alpha);
            for n in start..mesh.len() {
                f_right.push(f_at(&traj.values, n, false));
                f_left.push(f_at(&traj.values, n, true));
                let mut acc = T::zero();
                for j in 0..n {
                    acc += wl[n - j] * f_right[j] + wr[n - j] * f_left[j + 1];
                }
                let corrector = cfg.y0 + scale * acc;
                let predictor = series.eval(mesh.node(n))?;
                if !traj.push(blend * corrector + (T::one() - blend) * predictor) {
                    break;
                }
            }
        }
        CorrectorKind::Local => {
            let c = mesh.h.powf(alpha) / gamma(alpha + T::one());
            let half = T::c(0.5);
            for n in start..mesh.len() {
                let f_prev = f_at(&traj.values, n - 1, false);
                let f_now = f_at(&traj.values, n, false);
                let corrector = traj.values[n - 1] + c * half * (f_prev + f_now);
                let predictor = series.eval(mesh.node(n))?;
                if !traj.push(blend * corrector + (T::one() - blend) * predictor) {
                    break;
                }
            }
        }
    }
    Ok(traj)
}
