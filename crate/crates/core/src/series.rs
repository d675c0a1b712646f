//! Truncated fractional power-series solutions.
//!
//! Both closed forms share the shape
//!
//! ```text
//! I(t) = scale · Σ_k ψ_k · arg^k · t^{αk} / Γ(αk+1)
//! ```
//!
//! with `(scale, arg, ψ) = (c, b, E)` in the carrying-capacity case and
//! `(1/β, 1, A)` in the zero-capacity case. Terms are accumulated in
//! increasing `k` from log-magnitudes, so the partial sums stay finite well
//! past the point where `t^{αk}` or `Γ(αk+1)` alone would overflow.

use crate::coeffs::{
    empirical_radius, radius_theorem1, radius_theorem2, CoeffKind, CoeffTable, RadiusEstimate,
};
use crate::error::{Error, Result};
use crate::model::{DerivedParams, ZERO_CAPACITY_TOL};
use crate::scalar::{from_usize, lit, report, Real};
use crate::solvers::{Method, NodeStatus, TimeGrid, Trajectory};
use crate::specfn::{log_gamma, EvalPolicy};

/// Number of consecutive small terms that ends a summation.
const SMALL_RUN: usize = 3;
/// Consecutive growing nonzero terms taken as divergence.
const GROWTH_RUN: usize = 5;
/// Index from which growth is monitored.
const GROWTH_FROM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// `c ≠ 0`, α-Euler coefficients, `I(0) = c/2`.
    CarryingCapacity,
    /// `c = 0`, A-coefficients, `I(0) = A_0/β`.
    ZeroCapacity,
}

/// An immutable, ready-to-evaluate series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution<T> {
    alpha: T,
    kind: SeriesKind,
    coeffs: CoeffTable<T>,
    scale_c: T,
    arg_scale: T,
    radius: RadiusEstimate<T>,
    // lnΓ(αk+1) for every table index
    ln_gammas: Vec<T>,
}

/// Value of a series at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult<T> {
    pub value_i: T,
    /// Always `1 − value_i`.
    pub value_s: T,
    pub terms_used: usize,
    pub converged: bool,
    pub beyond_theoretical_radius: bool,
}

impl<T: Real> SeriesSolution<T> {
    fn assemble(
        alpha: T,
        kind: SeriesKind,
        coeffs: CoeffTable<T>,
        scale_c: T,
        arg_scale: T,
        theoretical: T,
    ) -> Result<Self> {
        if coeffs.alpha() != alpha {
            return Err(Error::Parameter(format!(
                "coefficient table built for alpha = {}, series requested at {}",
                report(coeffs.alpha()),
                report(alpha)
            )));
        }
        let expected = match kind {
            SeriesKind::CarryingCapacity => CoeffKind::EulerAlpha,
            SeriesKind::ZeroCapacity => CoeffKind::ACoeff,
        };
        if coeffs.kind() != expected {
            return Err(Error::Parameter(format!(
                "{kind:?} series needs {expected:?} coefficients, got {:?}",
                coeffs.kind()
            )));
        }
        let radius = match empirical_radius(&coeffs, arg_scale) {
            Ok(r) => RadiusEstimate { theoretical, ..r },
            Err(Error::InsufficientData { .. }) => RadiusEstimate {
                theoretical,
                empirical: None,
                k_used: coeffs.order(),
            },
            Err(e) => return Err(e),
        };
        let ln_gammas = (0..coeffs.values().len())
            .map(|k| log_gamma(alpha * from_usize::<T>(k) + T::one()))
            .collect::<Result<Vec<T>>>()?;
        Ok(SeriesSolution {
            alpha,
            kind,
            coeffs,
            scale_c,
            arg_scale,
            radius,
            ln_gammas,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn coeffs(&self) -> &CoeffTable<T> {
        &self.coeffs
    }

    pub fn scale_c(&self) -> T {
        self.scale_c
    }

    pub fn arg_scale(&self) -> T {
        self.arg_scale
    }

    pub fn radius(&self) -> &RadiusEstimate<T> {
        &self.radius
    }

    /// Value at `t = 0`.
    pub fn initial(&self) -> T {
        self.scale_c * self.coeffs.initial()
    }
}

fn check_table_start<T: Real>(table: &CoeffTable<T>) -> Result<()> {
    if table.initial() != lit(0.5) {
        return Err(Error::Hypothesis(format!(
            "series needs a table starting at 1/2, got {}",
            report(table.initial())
        )));
    }
    Ok(())
}

/// Carrying-capacity series with `I(0) = c/2`:
/// `I(t) = c Σ E_k b^k t^{αk} / Γ(αk+1)`.
pub fn build_series_thm1<T: Real>(
    derived: &DerivedParams<T>,
    alpha: T,
    table: CoeffTable<T>,
) -> Result<SeriesSolution<T>> {
    if derived.c.abs() <= lit(ZERO_CAPACITY_TOL) {
        return Err(Error::Hypothesis(
            "carrying-capacity series needs c != 0".into(),
        ));
    }
    if derived.c < T::zero() {
        return Err(Error::Hypothesis(format!(
            "carrying-capacity series needs c > 0, got {}",
            report(derived.c)
        )));
    }
    let theoretical = radius_theorem1(alpha, derived.b)?;
    check_table_start(&table)?;
    SeriesSolution::assemble(
        alpha,
        SeriesKind::CarryingCapacity,
        table,
        derived.c,
        derived.b,
        theoretical,
    )
}

/// Zero-capacity series with `I(0) = 1/(2β)`:
/// `I(t) = (1/β) Σ A_k t^{αk} / Γ(αk+1)`.
pub fn build_series_thm2<T: Real>(
    beta: T,
    derived: &DerivedParams<T>,
    alpha: T,
    table: CoeffTable<T>,
) -> Result<SeriesSolution<T>> {
    if !(beta > T::zero()) {
        return Err(Error::Parameter(format!(
            "beta must be > 0, got {}",
            report(beta)
        )));
    }
    if derived.c.abs() > lit(ZERO_CAPACITY_TOL) {
        return Err(Error::Hypothesis(format!(
            "zero-capacity series needs sigma = 1, got sigma = {}",
            report(derived.sigma)
        )));
    }
    let theoretical = radius_theorem2(alpha)?;
    check_table_start(&table)?;
    SeriesSolution::assemble(
        alpha,
        SeriesKind::ZeroCapacity,
        table,
        beta.recip(),
        T::one(),
        theoretical,
    )
}

/// Time-rescaled solution `v(t) = u(t/2^q)` of `D^α u = −u²`, `u(0) = a0`.
///
/// `v` solves `D^α v = −2^{−qα} v²` and its guaranteed radius is
/// `2^q a0^{1/α}`, with `q = 1/a0` for `a0 < 1/2` and `q = 4 + (1/a0 − 4)/2`
/// otherwise. The table must come from
/// [`a_coeffs_from_initial`](crate::coeffs::a_coeffs_from_initial) with the same `a0`.
pub fn rescaled_c0_solution<T: Real>(
    a0: T,
    alpha: T,
    table: CoeffTable<T>,
) -> Result<SeriesSolution<T>> {
    if !(a0 > T::zero() && a0 < T::one()) {
        return Err(Error::Domain {
            func: "rescaled_c0_solution",
            value: report(a0),
            reason: "initial value must lie in (0, 1)",
        });
    }
    if table.initial() != a0 {
        return Err(Error::Parameter(format!(
            "table starts at {}, expected {}",
            report(table.initial()),
            report(a0)
        )));
    }
    let q = rescale_exponent(a0);
    let two = lit::<T>(2.0);
    let arg_scale = two.powf(-q * alpha);
    let theoretical = two.powf(q) * a0.powf(alpha.recip());
    SeriesSolution::assemble(
        alpha,
        SeriesKind::ZeroCapacity,
        table,
        T::one(),
        arg_scale,
        theoretical,
    )
}

/// The exponent `q` of the time rescaling used by [`rescaled_c0_solution`].
pub fn rescale_exponent<T: Real>(a0: T) -> T {
    if a0 < lit(0.5) {
        a0.recip()
    } else {
        lit::<T>(4.0) + lit::<T>(0.5) * (a0.recip() - lit(4.0))
    }
}

/// Evaluates a series at `t ≥ 0`.
///
/// Summation stops after three consecutive terms below `policy.abs_tol`
/// (zero coefficients count). Five consecutive growing nonzero terms past
/// `k = 10`, a non-finite term, an exhausted table or `policy.max_terms`
/// all end the sum with `converged = false` and the last finite partial sum.
pub fn eval<T: Real>(
    series: &SeriesSolution<T>,
    t: T,
    policy: &EvalPolicy<T>,
) -> Result<EvalResult<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Domain {
            func: "series::eval",
            value: report(t),
            reason: "time must be finite and non-negative",
        });
    }
    let beyond = t > series.radius.theoretical;
    if t == T::zero() {
        return Ok(finish(series.initial(), 1, true, beyond));
    }
    let values = series.coeffs.values();
    let ln_x = series.arg_scale.ln() + series.alpha * t.ln();
    let limit = values.len().min(policy.max_terms);

    let mut sum = T::zero();
    let mut small = 0;
    let mut growing = 0;
    let mut last_nonzero: Option<T> = None;
    for (k, &psi) in values.iter().enumerate().take(limit) {
        let term = if psi == T::zero() {
            T::zero()
        } else {
            let ln_mag = from_usize::<T>(k) * ln_x - series.ln_gammas[k];
            series.scale_c * psi * ln_mag.exp()
        };
        if !term.is_finite() || !(sum + term).is_finite() {
            return Ok(finish(sum, k, false, beyond));
        }
        sum = sum + term;
        let mag = term.abs();
        if mag < policy.abs_tol {
            small += 1;
            if small == SMALL_RUN {
                return Ok(finish(sum, k + 1, true, beyond));
            }
        } else {
            small = 0;
        }
        if term != T::zero() {
            if let Some(prev) = last_nonzero {
                if k >= GROWTH_FROM && mag > prev {
                    growing += 1;
                    if growing == GROWTH_RUN {
                        return Ok(finish(sum, k + 1, false, beyond));
                    }
                } else {
                    growing = 0;
                }
            }
            last_nonzero = Some(mag);
        }
    }
    Ok(finish(sum, limit, false, beyond))
}

fn finish<T: Real>(value_i: T, terms_used: usize, converged: bool, beyond: bool) -> EvalResult<T> {
    EvalResult {
        value_i,
        value_s: T::one() - value_i,
        terms_used,
        converged,
        beyond_theoretical_radius: beyond,
    }
}

/// Evaluates the series on every grid node.
pub fn sample_trajectory<T: Real>(
    series: &SeriesSolution<T>,
    grid: &TimeGrid<T>,
    policy: &EvalPolicy<T>,
) -> Result<Trajectory<T>> {
    let mut values = Vec::with_capacity(grid.len());
    let mut status = Vec::with_capacity(grid.len());
    for t in grid.nodes() {
        let r = eval(series, t, policy)?;
        values.push(r.value_i);
        status.push(NodeStatus {
            converged: r.converged,
            beyond_radius: r.beyond_theoretical_radius,
            terms_used: r.terms_used,
        });
    }
    let mut tr = Trajectory::new(*grid, values, Method::Series, series.alpha)?;
    tr.status = status;
    Ok(tr)
}
