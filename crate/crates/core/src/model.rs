//! SIS parameters, derived quantities and the classical (α = 1) oracles.
//!
//! With a constant population the infected fraction obeys
//! `D^α I = βcI − βI²`, a fractional logistic equation with carrying
//! capacity `c = (σ − 1)/σ` and growth rate `b = βc`.

use crate::coeffs::radius_theorem1;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::specfn::{mittag_leffler, EvalPolicy};

/// Epidemiological rates plus the fractional order.
///
/// `lambda` (birth rate) only enters [`population_nt`]; the
/// constant-population model assumes it equals `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    pub beta: T,
    pub gamma: T,
    pub mu: T,
    pub lambda: T,
    pub alpha: T,
    pub i0: T,
}

impl<T: Real> ModelParams<T> {
    /// Builds a validated parameter set with `lambda = mu`.
    pub fn new(beta: T, gamma: T, mu: T, alpha: T, i0: T) -> Result<Self> {
        let p = ModelParams {
            beta,
            gamma,
            mu,
            lambda: mu,
            alpha,
            i0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lambda(mut self, lambda: T) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: T) -> Result<Self> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn with_i0(mut self, i0: T) -> Result<Self> {
        self.i0 = i0;
        self.validate()?;
        Ok(self)
    }

    /// Susceptible fraction at `t = 0`.
    pub fn s0(&self) -> T {
        T::one() - self.i0
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.beta,
            self.gamma,
            self.mu,
            self.lambda,
            self.alpha,
            self.i0,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("model parameters must be finite".into()));
        }
        if self.beta <= T::zero() {
            return Err(Error::Parameter(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        if self.gamma < T::zero() || self.mu < T::zero() || self.lambda < T::zero() {
            return Err(Error::Parameter(
                "gamma, mu and lambda must be non-negative".into(),
            ));
        }
        if self.gamma + self.mu <= T::zero() {
            return Err(Error::Parameter("gamma + mu must be > 0".into()));
        }
        if !(self.alpha > T::zero() && self.alpha <= T::one()) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if self.i0 < T::zero() || self.i0 > T::one() {
            return Err(Error::Parameter(format!(
                "i0 must lie in [0, 1], got {}",
                self.i0
            )));
        }
        Ok(())
    }
}

/// Quantities that follow from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams<T> {
    /// Basic reproduction number β/(γ+μ).
    pub sigma: T,
    /// Carrying capacity (σ − 1)/σ.
    pub c: T,
    /// Logistic growth rate βc.
    pub b: T,
    /// `b^{-1/α}`, present when the carrying-capacity series applies.
    pub m: Option<T>,
    /// Guaranteed radius of the carrying-capacity series.
    pub r_alpha: Option<T>,
}

pub fn derive<T: Real>(params: &ModelParams<T>) -> Result<DerivedParams<T>> {
    params.validate()?;
    let sigma = params.beta / (params.gamma + params.mu);
    let c = (sigma - T::one()) / sigma;
    let b = params.beta * c;
    let (m, r_alpha) = if c > T::zero() && b.powf(params.alpha.recip()) < T::one() {
        let m = b.powf(-params.alpha.recip());
        (Some(m), Some(radius_theorem1(params.alpha, b)?))
    } else {
        (None, None)
    };
    Ok(DerivedParams {
        sigma,
        c,
        b,
        m,
        r_alpha,
    })
}

/// Below this |c| the model is treated as the c = 0 (σ = 1) case.
pub const ZERO_CAPACITY_TOL: f64 = 1e-12;

/// Closed-form solution of the classical SIS model, returned as `(I, S)`.
///
/// The order stored in `params` is ignored.
pub fn classical_sis<T: Real>(params: &ModelParams<T>, t: T) -> Result<(T, T)> {
    if !(t >= T::zero()) {
        return Err(Error::Domain {
            func: "classical_sis",
            value: crate::scalar::report(t),
            reason: "time must be non-negative",
        });
    }
    let d = derive(params)?;
    let i0 = params.i0;
    let i = if i0 == T::zero() {
        T::zero()
    } else if d.c.abs() <= lit(ZERO_CAPACITY_TOL) {
        i0 / (T::one() + params.beta * i0 * t)
    } else {
        d.c / (T::one() + (d.c / i0 - T::one()) * (-d.b * t).exp())
    };
    Ok((i, T::one() - i))
}

/// Total population `N0 E_α((Λ − μ) t^α)` for the varying-population variant.
pub fn population_nt<T: Real>(params: &ModelParams<T>, n0: T, t: T) -> Result<T> {
    population_nt_with(params, n0, t, &EvalPolicy::default())
}

pub fn population_nt_with<T: Real>(
    params: &ModelParams<T>,
    n0: T,
    t: T,
    policy: &EvalPolicy<T>,
) -> Result<T> {
    params.validate()?;
    if !(n0 > T::zero()) || !n0.is_finite() {
        return Err(Error::Parameter(format!("N0 must be > 0, got {n0}")));
    }
    if !(t >= T::zero()) {
        return Err(Error::Domain {
            func: "population_nt",
            value: crate::scalar::report(t),
            reason: "time must be non-negative",
        });
    }
    let z = (params.lambda - params.mu) * t.powf(params.alpha);
    Ok(n0 * mittag_leffler(params.alpha, z, policy)?)
}

/// Right-hand side `f(I) = βcI − βI²` of the reduced equation.
pub fn logistic_rhs<T: Real>(
    params: &ModelParams<T>,
    derived: &DerivedParams<T>,
) -> impl Fn(T) -> T + Copy + Send + Sync {
    let beta = params.beta;
    let bc = derived.b;
    move |i: T| bc * i - beta * i * i
}
