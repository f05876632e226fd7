//! Forcing terms expanded in the conformable variable `u = t^α / α`:
//! `b(t) = Σ_{k=0}^{K} b_k u^k`.

use crate::{Error, Result, Scalar};

/// Polynomial forcing in `u = t^α / α`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSeries<T> {
    coeffs: Vec<T>,
}

/// Closed-form forcings with known expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingKind {
    /// `exp(λu)`
    Exp,
    /// `sin(λu)`
    Sin,
    /// `cos(λu)`
    Cos,
}

impl<T: Scalar> ForcingSeries<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("forcing needs at least one coefficient".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("forcing coefficient b_{i} is not finite")));
        }
        Ok(Self { coeffs })
    }

    /// Constant forcing `b(t) = b0`.
    pub fn constant(b0: T) -> Self {
        Self { coeffs: vec![b0] }
    }

    /// Truncated Taylor coefficients of `exp`, `sin` or `cos` of `λu`, up to degree `k_max`.
    pub fn named(kind: ForcingKind, lambda: T, k_max: usize) -> Self {
        let mut coeffs = Vec::with_capacity(k_max + 1);
        let mut scale = T::one(); // λ^k / k!
        for k in 0..=k_max {
            if k > 0 {
                scale = scale * lambda / T::of(k);
            }
            let c = match kind {
                ForcingKind::Exp => scale,
                ForcingKind::Sin if k % 2 == 1 => if (k / 2) % 2 == 0 { scale } else { -scale },
                ForcingKind::Cos if k % 2 == 0 => if (k / 2) % 2 == 0 { scale } else { -scale },
                _ => T::zero(),
            };
            coeffs.push(c);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Highest power `K`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Cuts or zero-pads to degree `k_max`.
    pub fn with_truncation(&self, k_max: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(k_max + 1, T::zero());
        Self { coeffs }
    }

    /// `Σ b_k u^k` by Horner.
    pub fn eval_u(&self, u: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * u + c)
    }

    /// `b(t)` for `t ≥ 0`; `b(0) = b_0`.
    pub fn eval(&self, alpha: T, t: T) -> T {
        let u = if t == T::zero() { T::zero() } else { t.powf(alpha) / alpha };
        self.eval_u(u)
    }
}

/// `b(t) = Σ b_k (t^α/α)^k`.
pub fn eval_forcing<T: Scalar>(forcing: &ForcingSeries<T>, alpha: T, t: T) -> T {
    forcing.eval(alpha, t)
}

/// See [`ForcingSeries::named`].
pub fn named_forcing<T: Scalar>(kind: ForcingKind, lambda: T, k_max: usize) -> ForcingSeries<T> {
    ForcingSeries::named(kind, lambda, k_max)
}
