//! Coefficient sequences of the fractional power-series solutions and their
//! convergence radii.
//!
//! Both sequences come from the same convolution recursion. Writing
//! `w(k, i) = Γ(αk+1) / (Γ(αi+1) Γ(α(k−i)+1)) = 1 / ((αk+1) B(αi+1, α(k−i)+1))`,
//!
//! ```text
//! α-Euler (logistic, c ≠ 0):   E_{k+1} = E_k − Σ_{i=0..k} w(k, i) E_i E_{k−i},   E_0 = 1/2
//! A-coefficients (c = 0):      A_{k+1} =     − Σ_{i=0..k} w(k, i) A_i A_{k−i},   A_0 = 1/2
//! ```
//!
//! With `E_0 = 1/2` the `i = 0` and `i = k` terms cancel `E_k` exactly, so every
//! even-indexed α-Euler number past `E_0` is an exact zero. The endpoint
//! weights are pinned to 1 (`Γ(1) = 1`) to keep that cancellation exact in
//! floating point.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, report, Real};
use crate::specfn::{beta, gamma, log_gamma};

/// Largest coefficient index a table may be built to.
pub const MAX_ORDER: usize = 200;

/// Minimum number of nonzero coefficients (past the constant term) an
/// empirical radius estimate is derived from.
pub const MIN_RADIUS_TERMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffKind {
    /// α-Euler numbers of the fractional logistic series.
    EulerAlpha,
    /// Coefficients of the `D^α u = −u²` series.
    ACoeff,
}

/// Which algebraic form of the recursion weight is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecursionForm {
    /// `1 / ((αk+1) B(αi+1, α(k−i)+1))`
    #[default]
    Beta,
    /// `exp(lnΓ(αk+1) − lnΓ(αi+1) − lnΓ(α(k−i)+1))`
    GammaRatio,
}

/// Finite prefix `c_0 ..= c_K` of a coefficient sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable<T> {
    alpha: T,
    kind: CoeffKind,
    values: Vec<T>,
}

impl<T: Real> CoeffTable<T> {
    /// Wraps externally produced coefficients, checking finiteness and, for
    /// α-Euler tables, the even-index zeros.
    pub fn from_values(alpha: T, kind: CoeffKind, values: Vec<T>) -> Result<Self> {
        check_order(alpha)?;
        if values.is_empty() {
            return Err(Error::Parameter("coefficient table is empty".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::CoefficientOverflow { index });
        }
        if kind == CoeffKind::EulerAlpha {
            let tol = lit::<T>(1e-10);
            if let Some(k) = (2..values.len())
                .step_by(2)
                .find(|&k| values[k].abs() >= tol)
            {
                return Err(Error::Parameter(format!(
                    "alpha-Euler coefficient {k} should vanish, got {}",
                    report(values[k])
                )));
            }
        }
        Ok(Self {
            alpha,
            kind,
            values,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn kind(&self) -> CoeffKind {
        self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Highest index `K` stored.
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> Option<T> {
        self.values.get(k).copied()
    }

    /// The constant term `c_0`.
    pub fn initial(&self) -> T {
        self.values[0]
    }

    /// Number of nonzero coefficients with index ≥ 1.
    pub fn nonzero_tail(&self) -> usize {
        self.values
            .iter()
            .skip(1)
            .filter(|v| **v != T::zero())
            .count()
    }
}

/// Lower bound and root-test estimate of a series' convergence radius,
/// both in time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate<T> {
    pub theoretical: T,
    pub empirical: Option<T>,
    pub k_used: usize,
}

fn check_order<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain {
            func: "coeffs",
            value: report(alpha),
            reason: "order must lie in (0, 1]",
        })
    }
}

fn check_table_size(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Parameter(format!(
            "requested order {order} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Recursion weights `w(k, i)`.
struct Weights<T> {
    alpha: T,
    form: RecursionForm,
    // Γ(αi + 1) and lnΓ(αi + 1) for i = 0..=order; Γ is None past overflow
    gammas: Vec<Option<T>>,
    log_gammas: Vec<T>,
}

impl<T: Real> Weights<T> {
    fn new(alpha: T, order: usize, form: RecursionForm) -> Result<Self> {
        let (gammas, log_gammas) = match form {
            RecursionForm::Beta => (Vec::new(), Vec::new()),
            RecursionForm::GammaRatio => {
                let args: Vec<T> = (0..=order)
                    .map(|i| alpha * from_usize(i) + T::one())
                    .collect();
                let gammas = args.iter().map(|&x| gamma(x).ok()).collect();
                let log_gammas = args.iter().map(|&x| log_gamma(x)).collect::<Result<_>>()?;
                (gammas, log_gammas)
            }
        };
        Ok(Self {
            alpha,
            form,
            gammas,
            log_gammas,
        })
    }

    fn get(&self, k: usize, i: usize) -> Result<T> {
        if i == 0 || i == k {
            return Ok(T::one());
        }
        let j = k - i;
        Ok(match self.form {
            RecursionForm::Beta => {
                let one = T::one();
                let a = self.alpha;
                let b = beta(a * from_usize(i) + one, a * from_usize(j) + one)?;
                one / ((a * from_usize(k) + one) * b)
            }
            RecursionForm::GammaRatio => match (self.gammas[k], self.gammas[i], self.gammas[j]) {
                (Some(gk), Some(gi), Some(gj)) => gk / (gi * gj),
                _ => (self.log_gammas[k] - self.log_gammas[i] - self.log_gammas[j]).exp(),
            },
        })
    }
}

fn recurse<T: Real>(
    alpha: T,
    initial: T,
    order: usize,
    form: RecursionForm,
    kind: CoeffKind,
) -> Result<CoeffTable<T>> {
    check_order(alpha)?;
    check_table_size(order)?;
    let weights = Weights::new(alpha, order, form)?;
    let mut values = Vec::with_capacity(order + 1);
    values.push(initial);
    for k in 0..order {
        let mut conv = T::zero();
        for i in 0..=k {
            let product = values[i] * values[k - i];
            if product != T::zero() {
                conv = conv + weights.get(k, i)? * product;
            }
        }
        let next = match kind {
            CoeffKind::EulerAlpha => values[k] - conv,
            CoeffKind::ACoeff => -conv,
        };
        if !next.is_finite() {
            return Err(Error::CoefficientOverflow { index: k + 1 });
        }
        values.push(next);
    }
    Ok(CoeffTable {
        alpha,
        kind,
        values,
    })
}

/// α-Euler numbers `E^α_0 ..= E^α_K`.
pub fn euler_alpha<T: Real>(alpha: T, order: usize) -> Result<CoeffTable<T>> {
    euler_alpha_with(alpha, order, RecursionForm::Beta)
}

pub fn euler_alpha_with<T: Real>(
    alpha: T,
    order: usize,
    form: RecursionForm,
) -> Result<CoeffTable<T>> {
    recurse(alpha, lit(0.5), order, form, CoeffKind::EulerAlpha)
}

/// Coefficients `A^α_0 ..= A^α_K` of the zero-capacity series, `A_0 = 1/2`.
pub fn a_coeffs<T: Real>(alpha: T, order: usize) -> Result<CoeffTable<T>> {
    a_coeffs_with(alpha, order, RecursionForm::Beta)
}

pub fn a_coeffs_with<T: Real>(
    alpha: T,
    order: usize,
    form: RecursionForm,
) -> Result<CoeffTable<T>> {
    recurse(alpha, lit(0.5), order, form, CoeffKind::ACoeff)
}

/// A-coefficients started from an arbitrary `A_0 ∈ (0, 1)`.
pub fn a_coeffs_from_initial<T: Real>(alpha: T, a0: T, order: usize) -> Result<CoeffTable<T>> {
    if !(a0 > T::zero() && a0 < T::one()) {
        return Err(Error::Domain {
            func: "a_coeffs_from_initial",
            value: report(a0),
            reason: "initial coefficient must lie in (0, 1)",
        });
    }
    recurse(alpha, a0, order, RecursionForm::Beta, CoeffKind::ACoeff)
}

pub(crate) fn capacity_radius_formula<T: Real>(alpha: T, b: T) -> Result<T> {
    let one = T::one();
    let gammas = gamma(alpha + one)? * gamma(lit::<T>(3.0) * alpha + one)?
        / gamma(lit::<T>(2.0) * alpha + one)?;
    Ok(gammas.powf(one / (lit::<T>(2.0) * alpha)) / b.powf(one / alpha))
}

/// Guaranteed convergence radius of the α-Euler series with argument scale `b`:
/// `b^{−1/α} (Γ(α+1)Γ(3α+1)/Γ(2α+1))^{1/(2α)}`, valid when `b^{1/α} < 1`.
pub fn radius_theorem1<T: Real>(alpha: T, b: T) -> Result<T> {
    check_order(alpha)?;
    if !(b > T::zero()) {
        return Err(Error::Hypothesis(format!(
            "radius requires b > 0, got {}",
            report(b)
        )));
    }
    if b.powf(T::one() / alpha) >= T::one() {
        return Err(Error::Hypothesis(format!(
            "radius requires b^(1/alpha) < 1, got b = {} at alpha = {}",
            report(b),
            report(alpha)
        )));
    }
    capacity_radius_formula(alpha, b)
}

/// Guaranteed convergence radius `(1/2)^{1/α}` of the zero-capacity series.
pub fn radius_theorem2<T: Real>(alpha: T) -> Result<T> {
    check_order(alpha)?;
    Ok(lit::<T>(0.5).powf(T::one() / alpha))
}

/// Root-test estimate of the radius of `Σ ψ_k b^k t^{αk} / Γ(αk+1)`.
///
/// The lim sup is approximated by the maximum of
/// `|ψ_k b^k / Γ(αk+1)|^{1/k}` over the upper half of the table (zero
/// coefficients skipped), then raised to `−1/α`.
pub fn empirical_radius<T: Real>(table: &CoeffTable<T>, b_scale: T) -> Result<RadiusEstimate<T>> {
    if !(b_scale > T::zero()) || !b_scale.is_finite() {
        return Err(Error::Parameter(format!(
            "b_scale must be positive, got {}",
            report(b_scale)
        )));
    }
    let available = table.nonzero_tail();
    if available < MIN_RADIUS_TERMS {
        return Err(Error::InsufficientData {
            needed: MIN_RADIUS_TERMS,
            available,
        });
    }
    let alpha = table.alpha();
    let order = table.order();
    let ln_b = b_scale.ln();
    let mut peak = T::zero();
    for k in (order / 2).max(1)..=order {
        let psi = table.values()[k];
        if psi == T::zero() {
            continue;
        }
        let kf = from_usize::<T>(k);
        let ln_mag = psi.abs().ln() + kf * ln_b - log_gamma(alpha * kf + T::one())?;
        peak = peak.max((ln_mag / kf).exp());
    }
    let empirical = if peak > T::zero() {
        Some(peak.powf(-T::one() / alpha))
    } else {
        None
    };
    let theoretical = match table.kind() {
        CoeffKind::EulerAlpha => capacity_radius_formula(alpha, b_scale)?,
        CoeffKind::ACoeff => (table.initial().abs() / b_scale).powf(T::one() / alpha),
    };
    Ok(RadiusEstimate {
        theoretical,
        empirical,
        k_used: order,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn radius_theorem1(alpha: f64, b: f64) -> Result<f64> {
        super::radius_theorem1(alpha, b)
    }
    fn radius_theorem2(alpha: f64) -> Result<f64> {
        super::radius_theorem2(alpha)
    }
    fn a_coeffs_with(alpha: f64, order: usize, form: RecursionForm) -> Result<CoeffTable<f64>> {
        super::a_coeffs_with(alpha, order, form)
    }
    fn euler_alpha_with(alpha: f64, order: usize, form: RecursionForm) -> Result<CoeffTable<f64>> {
        super::euler_alpha_with(alpha, order, form)
    }
    fn a_coeffs_from_initial(alpha: f64, a0: f64, order: usize) -> Result<CoeffTable<f64>> {
        super::a_coeffs_from_initial(alpha, a0, order)
    }

    fn euler(alpha: f64, order: usize) -> CoeffTable<f64> {
        euler_alpha(alpha, order).unwrap()
    }

    fn acoef(alpha: f64, order: usize) -> CoeffTable<f64> {
        a_coeffs(alpha, order).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn first_coefficients() {
        for alpha in [0.2, 0.5, 0.9, 1.0] {
            let e = euler(alpha, 1);
            assert_eq!(e.values(), &[0.5, 0.25]);
            let a = acoef(alpha, 1);
            assert_eq!(a.values(), &[0.5, -0.25]);
            assert_eq!(acoef(alpha, 0).values(), &[0.5]);
            let e4 = euler(alpha, 4);
            assert_eq!(e4.get(2), Some(0.0));
            assert_eq!(e4.get(4), Some(0.0));
        }
    }

    #[test]
    fn order_one_euler_is_sigmoid() {
        // k! [t^k] 1/(1 + e^{-t}), from a symbolic expansion
        let sigmoid = [
            0.5,
            0.25,
            0.0,
            -0.125,
            0.0,
            0.25,
            0.0,
            -17.0 / 16.0,
            0.0,
            31.0 / 4.0,
            0.0,
            -691.0 / 8.0,
        ];
        let e = euler(1.0, 11);
        for (k, (&got, &want)) in e.values().iter().zip(sigmoid.iter()).enumerate() {
            assert!(close(got, want, 1e-12), "E_{k}: {got} vs {want}");
        }
    }

    #[test]
    fn even_alpha_euler_numbers_vanish() {
        for alpha in [0.3, 0.5, 0.7, 0.99, 1.0] {
            let e = euler(alpha, 21);
            for k in 1..=10 {
                assert!(e.values()[2 * k].abs() < 1e-10, "alpha {alpha}, k {k}");
            }
        }
    }

    #[test]
    fn third_euler_number_closed_form() {
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.99, 1.0] {
            let g = |x: f64| crate::specfn::gamma(x).unwrap();
            let closed = -(1.0 / 16.0) * g(2.0 * alpha + 1.0) / g(alpha + 1.0).powi(2);
            assert!(
                close(euler(alpha, 3).values()[3], closed, 1e-10),
                "alpha {alpha}"
            );
        }
    }

    // recursion evaluated at 40 digits with mpmath
    #[test]
    fn frozen_high_precision_tables() {
        let euler_07 = [
            0.5,
            0.25,
            0.0,
            -0.094032575866428908468,
            0.0,
            0.11052579324466044208,
            0.0,
            -0.22998823921841782525,
            0.0,
            0.71106821295067641462,
            0.0,
            -2.9856396989129801598,
        ];
        let a_05 = [
            0.5,
            -0.25,
            0.25,
            -0.32957747154594766788,
            0.51707747154594766788,
            -0.92183151809669996321,
            1.8185634871034604867,
            -3.9019520936293320395,
            8.9953605638909617908,
            -22.079925129846566291,
            57.301763722341524167,
        ];
        let a_03 = [
            0.5,
            -0.25,
            0.25,
            -0.31933323758601525872,
            0.46925237076513200056,
            -0.75931776670711937971,
            1.3217271197276471798,
            -2.4396032731992860949,
            4.7288256171664539446,
            -9.5593762040494586787,
            20.048537159435322685,
        ];
        for (got, want) in euler(0.7, 11).values().iter().zip(euler_07) {
            assert!(close(*got, want, 1e-12), "{got} vs {want}");
        }
        for (got, want) in acoef(0.5, 10).values().iter().zip(a_05) {
            assert!(close(*got, want, 1e-12), "{got} vs {want}");
        }
        for (got, want) in acoef(0.3, 10).values().iter().zip(a_03) {
            assert!(close(*got, want, 1e-12), "{got} vs {want}");
        }
    }

    #[test]
    fn recursion_forms_agree() {
        // round-off compounds through the recursion, so near alpha = 1 the
        // check is limited to the first 60 coefficients
        for (alpha, order) in [(0.3, 120), (0.5, 120), (0.7, 120), (0.95, 60), (0.99, 60)] {
            let beta_form = a_coeffs_with(alpha, order, RecursionForm::Beta).unwrap();
            let ratio_form = a_coeffs_with(alpha, order, RecursionForm::GammaRatio).unwrap();
            for (k, (x, y)) in beta_form
                .values()
                .iter()
                .zip(ratio_form.values())
                .enumerate()
            {
                assert!(
                    ((x - y) / y).abs() <= 1e-12,
                    "alpha {alpha}, k {k}: {x} vs {y}"
                );
            }
            let e_beta = euler_alpha_with(alpha, order, RecursionForm::Beta).unwrap();
            let e_ratio = euler_alpha_with(alpha, order, RecursionForm::GammaRatio).unwrap();
            for (x, y) in e_beta.values().iter().zip(e_ratio.values()) {
                assert!(
                    (x - y).abs() <= 1e-12 * y.abs(),
                    "alpha {alpha}: {x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn long_tables_stay_accurate() {
        // mpmath at 50 digits, alpha = 0.95
        let truth = [
            (40, 8.481418840788816708460281e33),
            (80, 1.217297835504842442858874e90),
            (120, 6.631230908515278862949867e154),
        ];
        for form in [RecursionForm::Beta, RecursionForm::GammaRatio] {
            let table = a_coeffs_with(0.95, 120, form).unwrap();
            for (k, want) in truth {
                let got = table.values()[k];
                assert!(((got - want) / want).abs() < 1e-11, "{form:?} k {k}");
            }
        }
    }

    fn factorial(k: u32) -> f64 {
        (1..=k).map(f64::from).product()
    }

    #[test]
    fn order_one_a_coefficients_match_reciprocal_series() {
        // w(t) = 1/(t + 2) solves w' = −w², w(0) = 1/2
        for alpha in [1.0, 1.0 - 1e-12] {
            let a = acoef(alpha, 8);
            for k in 0..=8u32 {
                let want = (-1f64).powi(k as i32) * factorial(k) / 2f64.powi(k as i32 + 1);
                assert!(close(a.values()[k as usize], want, 1e-8), "k {k}");
            }
        }
        let a = acoef(1.0, 4);
        assert_eq!(a.values(), &[0.5, -0.25, 0.25, -0.375, 0.75]);
    }

    #[test]
    fn a_coefficients_approach_order_one_limit() {
        let limit = acoef(1.0, 8);
        let mut prev = f64::INFINITY;
        for alpha in [0.9, 0.99, 0.999, 0.9999] {
            let a = acoef(alpha, 8);
            let err = a
                .values()
                .iter()
                .zip(limit.values())
                .map(|(x, y)| ((x - y) / y).abs())
                .fold(0.0, f64::max);
            assert!(err < prev, "alpha {alpha}");
            prev = err;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn overflow_and_size_limits() {
        assert!(matches!(
            a_coeffs::<f64>(0.99, 200),
            Err(Error::CoefficientOverflow { .. })
        ));
        assert!(matches!(
            euler_alpha::<f64>(0.5, 201),
            Err(Error::Parameter(_))
        ));
        assert!(euler_alpha::<f64>(0.0, 5).is_err());
        assert!(a_coeffs::<f64>(1.2, 5).is_err());
        // full-size tables are representable where the series are used
        assert!(euler_alpha::<f64>(1.0, 200).is_ok());
        assert!(a_coeffs::<f64>(0.5, 200).is_ok());
    }

    #[test]
    fn radius_formulas() {
        let r = radius_theorem1(1.0, 0.525).unwrap();
        assert!((r - 3f64.sqrt() / 0.525).abs() < 1e-12);
        assert!((r - 3.2991443953692900829).abs() < 1e-12);
        let eps = 1e-9;
        let r = radius_theorem1(1.0, 1.0 - eps).unwrap();
        assert!((r - 3f64.sqrt() / (1.0 - eps)).abs() < 1e-12);
        // mpmath, 40 digits
        let r = radius_theorem1(0.7, 0.525).unwrap();
        assert!((r - 3.5239665344815135355).abs() < 1e-10);
        assert!(matches!(
            radius_theorem1(0.5, 1.0),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            radius_theorem1(0.5, 1.3),
            Err(Error::Hypothesis(_))
        ));

        assert_eq!(radius_theorem2(0.5).unwrap(), 0.25);
        assert_eq!(radius_theorem2(1.0).unwrap(), 0.5);
        assert_eq!(radius_theorem2(0.25).unwrap(), 0.0625);
        assert!(radius_theorem2(0.0).is_err());
    }

    #[test]
    fn empirical_radius_of_sigmoid() {
        let b = 0.525;
        let est = empirical_radius(&euler(1.0, 200), b).unwrap();
        let target = std::f64::consts::PI / b;
        let emp = est.empirical.unwrap();
        assert!((emp / target - 1.0).abs() < 0.1, "{emp} vs {target}");
        assert!((est.theoretical - 3f64.sqrt() / b).abs() < 1e-12);
        assert_eq!(est.k_used, 200);
    }

    #[test]
    fn empirical_radius_of_geometric_table() {
        let q: f64 = 0.4;
        let values: Vec<f64> = (0..=200)
            .map(|k| 0.5 * q.powi(k) * crate::specfn::gamma(k as f64 + 1.0).unwrap_or(f64::NAN))
            .take_while(|v| v.is_finite())
            .collect();
        let table = CoeffTable::from_values(1.0, CoeffKind::ACoeff, values).unwrap();
        let emp = empirical_radius(&table, 1.0).unwrap().empirical.unwrap();
        assert!((emp * q - 1.0).abs() < 0.01, "{emp}");
    }

    #[test]
    fn empirical_radius_dominates_guaranteed_bound() {
        for alpha in [0.3, 0.5, 0.7] {
            let est = empirical_radius(&acoef(alpha, 200), 1.0).unwrap();
            let guaranteed = radius_theorem2(alpha).unwrap();
            assert!(est.empirical.unwrap() >= 0.95 * guaranteed, "alpha {alpha}");
            assert!((est.theoretical - guaranteed).abs() < 1e-15);
        }
        assert!(
            empirical_radius(&acoef(0.5, 200), 1.0)
                .unwrap()
                .empirical
                .unwrap()
                >= 0.25
        );
    }

    #[test]
    fn empirical_radius_needs_enough_terms() {
        assert!(matches!(
            empirical_radius(&euler(0.5, 30), 1.0),
            Err(Error::InsufficientData {
                needed: 20,
                available: 15
            })
        ));
        assert!(empirical_radius(&acoef(0.5, 20), 1.0).is_ok());
        assert!(empirical_radius(&acoef(0.5, 20), 0.0).is_err());
    }

    #[test]
    fn from_values_checks() {
        assert!(CoeffTable::from_values(0.5, CoeffKind::EulerAlpha, vec![0.5, 0.25, 0.1]).is_err());
        assert!(CoeffTable::from_values(0.5, CoeffKind::ACoeff, vec![0.5, f64::INFINITY]).is_err());
        assert!(CoeffTable::<f64>::from_values(0.5, CoeffKind::ACoeff, vec![]).is_err());
    }

    #[test]
    fn initial_datum_variant() {
        let t = a_coeffs_from_initial(0.5, 0.25, 3).unwrap();
        assert_eq!(t.values()[..2], [0.25, -0.0625]);
        assert!(a_coeffs_from_initial(0.5, 1.0, 3).is_err());
    }
}
