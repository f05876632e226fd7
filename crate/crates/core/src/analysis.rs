//! Error metrics against the series reference, stability margin and
//! step-halving convergence studies.

use std::fmt;
use std::str::FromStr;

use crate::caputo::{self, series_trajectory_caputo};
use crate::conformable::{self, series_trajectory_conformable, Family};
use crate::specfun::gamma;
use crate::{Error, ProblemConfig, Result, Scalar, Trajectory};

const REL_FLOOR: f64 = 1e-14;

/// Pointwise and aggregate errors of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport<T> {
    pub max_rel: T,
    pub rms_rel: T,
    pub max_abs: T,
    /// `|y_n − s_n|` over the compared window.
    pub pointwise_abs: Vec<T>,
    /// `|y_n − s_n| / (|s_n| + 1e-14)` over the compared window.
    pub pointwise_rel: Vec<T>,
    pub n_points: usize,
    /// Mesh index of the first non-finite value in either input.
    pub diverged_at: Option<usize>,
}

impl<T: Scalar> ErrorReport<T> {
    /// Aggregates from pointwise errors.
    pub fn from_pointwise(pointwise_abs: Vec<T>, pointwise_rel: Vec<T>, diverged_at: Option<usize>) -> Self {
        let max_abs = pointwise_abs.iter().fold(T::zero(), |m, &v| m.max(v));
        let max_rel = pointwise_rel.iter().fold(T::zero(), |m, &v| m.max(v));
        let n = pointwise_rel.len();
        let rms_rel = if n == 0 {
            T::zero()
        } else {
            let sq: T = pointwise_rel.iter().map(|&r| r * r).sum();
            (sq / T::of(n)).sqrt()
        };
        Self { max_rel, rms_rel, max_abs, pointwise_abs, pointwise_rel, n_points: n, diverged_at }
    }
}

/// Errors over every node.
pub fn compare<T: Scalar>(traj: &Trajectory<T>, reference: &Trajectory<T>) -> Result<ErrorReport<T>> {
    compare_from(traj, reference, 0)
}

/// Errors over nodes `start..` (e.g. `start = m` for the window `t ≥ T`),
/// cut at the first divergence of either trajectory.
pub fn compare_from<T: Scalar>(traj: &Trajectory<T>, reference: &Trajectory<T>, start: usize) -> Result<ErrorReport<T>> {
    if !traj.mesh.matches(&reference.mesh) || traj.values.len() != reference.values.len() {
        return Err(Error::MeshMismatch(format!(
            "{} has {} nodes at h={}, {} has {} nodes at h={}",
            traj.scheme,
            traj.values.len(),
            traj.mesh.h,
            reference.scheme,
            reference.values.len(),
            reference.mesh.h
        )));
    }
    let diverged_at = match (traj.diverged_at, reference.diverged_at) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let end = diverged_at.unwrap_or(traj.values.len());
    let start = start.min(end);
    let floor = T::c(REL_FLOOR);
    let (abs, rel): (Vec<T>, Vec<T>) = traj.values[start..end]
        .iter()
        .zip(&reference.values[start..end])
        .map(|(&y, &s)| {
            let e = (y - s).abs();
            (e, e / (s.abs() + floor))
        })
        .unzip();
    Ok(ErrorReport::from_pointwise(abs, rel, diverged_at))
}

/// `a h^α / Γ(α+1)`, the size of one fractional-Euler delay kick.
pub fn stability_margin<T: Scalar>(cfg: &ProblemConfig<T>) -> T {
    cfg.a * cfg.h.powf(cfg.alpha) / gamma(cfg.alpha + T::one())
}

/// Every solver the crate provides, by output label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Series,
    Euler,
    Rk4,
    Rk4Interp,
    CaputoSeries,
    CaputoL1,
    CaputoL21Sigma,
    CaputoPc,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Series,
        Scheme::Euler,
        Scheme::Rk4,
        Scheme::Rk4Interp,
        Scheme::CaputoSeries,
        Scheme::CaputoL1,
        Scheme::CaputoL21Sigma,
        Scheme::CaputoPc,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Series => "series",
            Scheme::Euler => "euler",
            Scheme::Rk4 => "rk4",
            Scheme::Rk4Interp => "rk4-interp",
            Scheme::CaputoSeries => "caputo-series",
            Scheme::CaputoL1 => "caputo-l1",
            Scheme::CaputoL21Sigma => "caputo-l21sigma",
            Scheme::CaputoPc => "caputo-pc",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Scheme::Series | Scheme::Euler | Scheme::Rk4 | Scheme::Rk4Interp => Family::Conformable,
            _ => Family::Caputo,
        }
    }

    pub fn is_reference(self) -> bool {
        matches!(self, Scheme::Series | Scheme::CaputoSeries)
    }

    /// The series scheme of a family.
    pub fn reference_for(family: Family) -> Scheme {
        match family {
            Family::Conformable => Scheme::Series,
            Family::Caputo => Scheme::CaputoSeries,
        }
    }

    pub fn defaults_for(family: Family) -> Vec<Scheme> {
        Scheme::ALL.into_iter().filter(|s| s.family() == family).collect()
    }

    pub fn run<T: Scalar>(self, cfg: &ProblemConfig<T>) -> Result<Trajectory<T>> {
        match self {
            Scheme::Series => series_trajectory_conformable(cfg),
            Scheme::Euler => conformable::solve_euler_conformable(cfg),
            Scheme::Rk4 => conformable::solve_rk4_conformable(cfg, false),
            Scheme::Rk4Interp => conformable::solve_rk4_conformable(cfg, true),
            Scheme::CaputoSeries => series_trajectory_caputo(cfg),
            Scheme::CaputoL1 => caputo::solve_l1_euler_caputo(cfg),
            Scheme::CaputoL21Sigma => caputo::solve_l2_1sigma_caputo(cfg),
            Scheme::CaputoPc => caputo::solve_predictor_corrector_caputo(cfg),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme '{s}'")))
    }
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel<T> {
    pub h: T,
    /// RMS absolute error on the coarsest mesh nodes; `None` if the run diverged.
    pub error: Option<T>,
    /// `log2(e_{i−1}/e_i)`, when both errors exist.
    pub slope: Option<T>,
}

/// Runs `scheme` at `h, h/2, …, h/2^{levels−1}` and measures the RMS absolute
/// error against the family series on the nodes of the coarsest mesh.
pub fn convergence_study<T: Scalar>(cfg: &ProblemConfig<T>, scheme: Scheme, levels: usize) -> Result<Vec<ConvergenceLevel<T>>> {
    if levels == 0 {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    let reference = Scheme::reference_for(scheme.family());
    let coarse_n = cfg.mesh()?.n_steps;
    let mut out: Vec<ConvergenceLevel<T>> = Vec::with_capacity(levels);
    for level in 0..levels {
        let stride = 1usize << level;
        let mut fine = cfg.clone();
        fine.h = cfg.h / T::of(stride);
        let traj = scheme.run(&fine)?;
        let exact = reference.run(&fine)?;
        let error = if traj.diverged_at.is_some() {
            None
        } else {
            let sq: T = (0..=coarse_n)
                .map(|i| {
                    let e = traj.values[i * stride] - exact.values[i * stride];
                    e * e
                })
                .sum();
            Some((sq / T::of(coarse_n + 1)).sqrt())
        };
        let slope = match (out.last().and_then(|l| l.error), error) {
            (Some(prev), Some(cur)) => Some((prev / cur).log2()),
            _ => None,
        };
        out.push(ConvergenceLevel { h: fine.h, error, slope });
    }
    Ok(out)
}
