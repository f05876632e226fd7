//! Uniform meshes aligned with the delay, trajectories, and delayed lookups.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result, Scalar};

const GUARD: f64 = 1e-12;

/// `t_n = n h`, `h = T/m`, `n = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh<T> {
    pub delay: T,
    pub m: usize,
    pub h: T,
    pub n_steps: usize,
    pub t_max: T,
}

/// How `t_n − T` is rounded onto the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayIndexing {
    /// `floor((t_n − T)/h + 1e-12)`, so aligned nodes never round down.
    #[default]
    Guarded,
    /// Plain `floor((t_n − T)/h)` in floating point.
    Raw,
}

/// Builds the mesh with `h = T/m` and `N = floor(t_max/h)`.
pub fn build_mesh<T: Scalar>(delay: T, m: usize, t_max: T) -> Result<Mesh<T>> {
    if !(delay > T::zero()) || !delay.is_finite() {
        return Err(Error::InvalidArgument(format!("delay must be positive, got {delay}")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("steps per delay m must be at least 1".into()));
    }
    if !(t_max >= delay) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!("t_max ({t_max}) must be at least the delay ({delay})")));
    }
    let h = delay / T::of(m);
    let ratio = t_max / h;
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= T::c(1e-9) * ratio.max(T::one()) { nearest } else { ratio.floor() };
    let n_steps = n.to_usize().ok_or_else(|| Error::InvalidArgument("too many mesh nodes".into()))?;
    Ok(Mesh { delay, m, h, n_steps, t_max })
}

/// Number of steps per delay for step `h`, if `T/h` is an integer to 1e-12 relative.
pub fn steps_per_delay<T: Scalar>(delay: T, h: T) -> Result<usize> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step h must be positive, got {h}")));
    }
    let ratio = delay / h;
    let m = ratio.round();
    if m < T::one() || (ratio - m).abs() > T::c(1e-12) * ratio.max(T::one()) {
        return Err(Error::InvalidArgument(format!("delay/h = {ratio} is not a positive integer")));
    }
    m.to_usize().ok_or_else(|| Error::InvalidArgument("delay/h too large".into()))
}

impl<T: Scalar> Mesh<T> {
    pub fn node(&self, n: usize) -> T {
        T::of(n) * self.h
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|n| self.node(n)).collect()
    }

    /// Same step count and spacing.
    pub fn matches(&self, other: &Mesh<T>) -> bool {
        self.n_steps == other.n_steps && self.h == other.h
    }

    /// First node with `t_n ≥ T`.
    pub fn first_delayed_node(&self) -> usize {
        self.m.min(self.n_steps)
    }
}

/// `y(t_n − T)` from stored values, zero when `t_n − T < 0`.
pub fn floor_lookup<T: Scalar>(values: &[T], h: T, n: usize, delay: T, mode: DelayIndexing) -> T {
    let tau = T::of(n) * h - delay;
    let idx = match mode {
        DelayIndexing::Guarded => {
            if tau < -T::c(GUARD) * h {
                return T::zero();
            }
            (tau / h + T::c(GUARD)).floor().max(T::zero())
        }
        DelayIndexing::Raw => {
            if tau < T::zero() {
                return T::zero();
            }
            (tau / h).floor()
        }
    };
    let i = idx.to_usize().unwrap_or(usize::MAX);
    values.get(i).copied().unwrap_or(T::zero())
}

/// Linear interpolation of `y(t_n − T)` between neighbouring nodes, zero when `t_n − T ≤ 0`.
///
/// Fails with `OutOfRange` if the right neighbour is not in `values` yet.
pub fn interp_lookup<T: Scalar>(values: &[T], h: T, n: usize, delay: T, mode: DelayIndexing) -> Result<T> {
    let tau = T::of(n) * h - delay;
    let q = tau / h;
    let (i, theta) = match mode {
        DelayIndexing::Guarded => {
            if tau <= T::c(GUARD) * h {
                return Ok(T::zero());
            }
            let i = (q + T::c(GUARD)).floor();
            let theta = q - i;
            (i, if theta <= T::c(GUARD) { T::zero() } else { theta })
        }
        DelayIndexing::Raw => {
            if tau <= T::zero() {
                return Ok(T::zero());
            }
            let i = q.floor();
            (i, q - i)
        }
    };
    let i = i.to_usize().unwrap_or(usize::MAX);
    let filled = values.len().saturating_sub(1);
    if i >= values.len() {
        return Err(Error::OutOfRange { index: i, filled });
    }
    if theta == T::zero() {
        return Ok(values[i]);
    }
    if i + 1 >= values.len() {
        return Err(Error::OutOfRange { index: i + 1, filled });
    }
    Ok((T::one() - theta) * values[i] + theta * values[i + 1])
}

/// Solution values on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub mesh: Mesh<T>,
    pub values: Vec<T>,
    pub scheme: String,
    /// First node whose value was not finite; later values are NaN.
    pub diverged_at: Option<usize>,
    /// Interpolated delay lookups that fell back to the floor value.
    pub interp_fallbacks: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(mesh: Mesh<T>, scheme: impl Into<String>) -> Self {
        Self { mesh, values: Vec::with_capacity(mesh.len()), scheme: scheme.into(), diverged_at: None, interp_fallbacks: 0 }
    }

    /// Appends `y`, marking divergence on the first non-finite value.
    /// Returns `false` once diverged.
    pub(crate) fn push(&mut self, y: T) -> bool {
        if self.diverged_at.is_some() {
            return false;
        }
        if !y.is_finite() {
            self.diverged_at = Some(self.values.len());
            self.values.resize(self.mesh.len(), T::nan());
            return false;
        }
        self.values.push(y);
        true
    }

    pub fn times(&self) -> Vec<T> {
        self.mesh.times()
    }

    pub fn delayed_floor(&self, n: usize, delay: T, mode: DelayIndexing) -> T {
        floor_lookup(&self.values, self.mesh.h, n, delay, mode)
    }

    pub fn delayed_interp(&self, n: usize, delay: T, mode: DelayIndexing) -> Result<T> {
        interp_lookup(&self.values, self.mesh.h, n, delay, mode)
    }

    /// `t,y` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,y\n");
        for (n, y) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.mesh.node(n), y);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

/// Guarded floor lookup of `y(t_n − T)`.
pub fn delayed_value_floor<T: Scalar>(traj: &Trajectory<T>, n: usize, delay: T) -> T {
    traj.delayed_floor(n, delay, DelayIndexing::Guarded)
}

/// Guarded interpolated lookup of `y(t_n − T)`.
pub fn delayed_value_interp<T: Scalar>(traj: &Trajectory<T>, n: usize, delay: T) -> Result<T> {
    traj.delayed_interp(n, delay, DelayIndexing::Guarded)
}
