// Log-space evaluation of the delay series shared by both derivative flavours:
// y(t) = Σ_j Σ_terms ± exp(log_coef + exponent · ln(t − jT)),  t − jT ≥ 0.

use crate::mesh::{Mesh, Trajectory};
use crate::specfun::ln_gamma;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy)]
struct Term<T> {
    exponent: T,
    log_coef: T,
    negative: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct DelaySeries<T> {
    delay: T,
    epochs: Vec<Vec<Term<T>>>,
    log_max: T,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Flavour {
    Conformable,
    Caputo,
}

pub(crate) struct SeriesInput<'a, T> {
    pub alpha: T,
    pub a: T,
    pub delay: T,
    pub y0: T,
    pub coeffs: &'a [T],
}

impl<T: Scalar> DelaySeries<T> {
    /// Precomputes epochs `0..=j_max`.
    pub(crate) fn new(flavour: Flavour, p: &SeriesInput<'_, T>, j_max: usize) -> Self {
        let SeriesInput { alpha, a, delay, y0, coeffs } = *p;
        let ln_alpha = alpha.ln();
        let ln_a = a.abs().ln();
        let epochs_needed = if a == T::zero() { 0 } else { j_max };
        let mut epochs = Vec::with_capacity(epochs_needed + 1);
        for j in 0..=epochs_needed {
            let jj = T::of(j);
            let base = if j == 0 { T::zero() } else { jj * ln_a };
            let base_negative = a > T::zero() && j % 2 == 1;
            let mut terms = Vec::with_capacity(coeffs.len() + 1);
            if y0 != T::zero() {
                let log_coef = base
                    + y0.abs().ln()
                    + match flavour {
                        Flavour::Conformable => -jj * ln_alpha - ln_gamma(jj + T::one()),
                        Flavour::Caputo => -ln_gamma(alpha * jj + T::one()),
                    };
                terms.push(Term { exponent: alpha * jj, log_coef, negative: base_negative ^ (y0 < T::zero()) });
            }
            for (k, &b) in coeffs.iter().enumerate() {
                if b == T::zero() {
                    continue;
                }
                let kk = T::of(k);
                let order = jj + kk + T::one();
                let log_coef = base
                    + b.abs().ln()
                    + match flavour {
                        Flavour::Conformable => {
                            ln_gamma(kk + T::one()) - order * ln_alpha - ln_gamma(order + T::one())
                        }
                        Flavour::Caputo => {
                            ln_gamma(alpha * kk + T::one()) - kk * ln_alpha - ln_gamma(alpha * order + T::one())
                        }
                    };
                terms.push(Term { exponent: alpha * order, log_coef, negative: base_negative ^ (b < T::zero()) });
            }
            epochs.push(terms);
        }
        Self { delay, epochs, log_max: T::max_value().ln() }
    }

    /// Last epoch needed on `[0, t_max]`.
    pub(crate) fn epochs_for(delay: T, t_max: T) -> usize {
        (t_max / delay).floor().to_usize().unwrap_or(0) + 1
    }

    /// Samples every node of `mesh`; an overflowing epoch counts as divergence.
    pub(crate) fn sample(&self, mesh: Mesh<T>, label: &str) -> Result<Trajectory<T>> {
        let mut traj = Trajectory::new(mesh, label);
        for n in 0..mesh.len() {
            let y = match self.eval(mesh.node(n)) {
                Err(Error::Overflow { .. }) => T::infinity(),
                other => other?,
            };
            if !traj.push(y) {
                break;
            }
        }
        Ok(traj)
    }

    pub(crate) fn eval(&self, t: T) -> Result<T> {
        if t < T::zero() {
            return Ok(T::zero());
        }
        let j_top = (t / self.delay).floor().to_usize().unwrap_or(usize::MAX);
        if j_top >= self.epochs.len() && self.epochs.len() > 1 {
            return Err(Error::InvalidArgument(format!("series prepared only up to t = {}", T::of(self.epochs.len()) * self.delay)));
        }
        let mut total = T::zero();
        for (j, terms) in self.epochs.iter().enumerate().take(j_top.saturating_add(1)) {
            let dt = t - T::of(j) * self.delay;
            if dt < T::zero() {
                continue;
            }
            let ln_dt = dt.ln();
            let mut epoch_sum = T::zero();
            for term in terms {
                let mag = if dt == T::zero() {
                    if term.exponent == T::zero() {
                        term.log_coef.exp()
                    } else {
                        continue;
                    }
                } else {
                    let e = term.log_coef + term.exponent * ln_dt;
                    if e > self.log_max {
                        return Err(Error::Overflow { epoch: j });
                    }
                    e.exp()
                };
                epoch_sum += if term.negative { -mag } else { mag };
            }
            total += epoch_sum;
        }
        Ok(total)
    }
}
