//! Time stepping for scalar Caputo problems `D^α u = f(u)`, `u(0) = u0`.
//!
//! Two explicit schemes on a uniform grid: the fractional
//! Adams–Bashforth–Moulton predictor–corrector ([`solve_pece`]) and an L1
//! discretisation of the Caputo derivative ([`solve_l1`]). Both keep the
//! full history, so a run over `N` steps costs `O(N²)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, report, Real};
use crate::specfn::gamma;

/// Uniform grid `t_n = n·dt`, `n = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    t_final: T,
    dt: T,
    steps: usize,
}

impl<T: Real> TimeGrid<T> {
    /// `N = round(T/dt)`; fails when `N = 0` or when `N·dt` misses `T` by
    /// more than half a step.
    pub fn new(t_final: T, dt: T) -> Result<Self> {
        if !(t_final > T::zero()) || !t_final.is_finite() {
            return Err(Error::Grid(format!(
                "final time must be > 0, got {t_final}"
            )));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::Grid(format!("step must be > 0, got {dt}")));
        }
        let ratio = (t_final / dt).round();
        let steps = ratio
            .to_usize()
            .ok_or_else(|| Error::Grid(format!("T/dt = {} is not a usable step count", ratio)))?;
        if steps == 0 {
            return Err(Error::Grid(format!(
                "dt = {dt} exceeds twice the final time {t_final}"
            )));
        }
        if (from_usize::<T>(steps) * dt - t_final).abs() > dt / lit(2.0) {
            return Err(Error::Grid("final time is not a multiple of dt".into()));
        }
        Ok(TimeGrid { t_final, dt, steps })
    }

    /// Grid with `steps` intervals of length `dt`.
    pub fn from_steps(dt: T, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Grid("a grid needs at least one step".into()));
        }
        Self::new(from_usize::<T>(steps) * dt, dt)
    }

    pub fn t_final(&self) -> T {
        self.t_final
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, n: usize) -> T {
        from_usize::<T>(n) * self.dt
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.steps).map(move |n| self.node(n))
    }
}

/// Where a trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Series,
    Pece,
    L1,
    Classical,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Series, Method::Pece, Method::L1, Method::Classical];

    pub fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Pece => "pece",
            Method::L1 => "l1",
            Method::Classical => "classical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "series" => Ok(Method::Series),
            "pece" => Ok(Method::Pece),
            "l1" => Ok(Method::L1),
            "classical" => Ok(Method::Classical),
            other => Err(Error::Parameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Per-node status of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeStatus {
    pub converged: bool,
    pub beyond_radius: bool,
    pub terms_used: usize,
}

/// Sampled solution `u_n ≈ I(t_n)`; `S` is always derived as `1 − u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub grid: TimeGrid<T>,
    pub values: Vec<T>,
    pub method: Method,
    pub alpha: T,
    /// Filled by series sampling only; empty for the schemes.
    pub status: Vec<NodeStatus>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(grid: TimeGrid<T>, values: Vec<T>, method: Method, alpha: T) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Trajectory {
            grid,
            values,
            method,
            alpha,
            status: Vec::new(),
        })
    }

    pub fn s(&self, n: usize) -> T {
        T::one() - self.values[n]
    }

    /// `(t, I, S)` rows in grid order.
    pub fn rows(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(n, &u)| (self.grid.node(n), u, T::one() - u))
    }

    pub fn all_converged(&self) -> bool {
        self.status.iter().all(|s| s.converged)
    }

    /// First node flagged as not converged.
    pub fn first_divergence(&self) -> Option<T> {
        self.status
            .iter()
            .position(|s| !s.converged)
            .map(|n| self.grid.node(n))
    }

    pub fn within_unit_interval(&self) -> bool {
        self.values.iter().all(|&u| u >= T::zero() && u <= T::one())
    }
}

fn check_alpha<T: Real>(func: &'static str, alpha: T, allow_one: bool) -> Result<()> {
    let upper_ok = if allow_one {
        alpha <= T::one()
    } else {
        alpha < T::one()
    };
    if alpha > T::zero() && upper_ok {
        Ok(())
    } else {
        Err(Error::Domain {
            func,
            value: report(alpha),
            reason: if allow_one {
                "order must lie in (0, 1]"
            } else {
                "order must lie in (0, 1); the extreme values are excluded"
            },
        })
    }
}

/// `(m+1)^p − m^p`, without cancellation for large `m`.
fn forward_diff_pow<T: Real>(m: usize, p: T) -> T {
    if m == 0 {
        return T::one();
    }
    let mt = from_usize::<T>(m);
    mt.powf(p) * (p * mt.recip().ln_1p()).exp_m1()
}

/// Predictor weights `b_{j,n+1}` for `j = 0..=n`.
pub fn pece_weights_b<T: Real>(alpha: T, n: usize, dt: T) -> Result<Vec<T>> {
    check_alpha("pece_weights_b", alpha, true)?;
    let scale = dt.powf(alpha) / alpha;
    Ok((0..=n)
        .map(|j| scale * forward_diff_pow(n - j, alpha))
        .collect())
}

fn pece_interior<T: Real>(alpha: T, m: usize) -> T {
    let p = alpha + T::one();
    let m0 = from_usize::<T>(m);
    let m1 = m0 + T::one();
    let m2 = m1 + T::one();
    m2.powf(p) - lit::<T>(2.0) * m1.powf(p) + m0.powf(p)
}

fn pece_first<T: Real>(alpha: T, n: usize) -> T {
    let nt = from_usize::<T>(n);
    nt.powf(alpha + T::one()) - (nt - alpha) * (nt + T::one()).powf(alpha)
}

/// Corrector weights `a_{j,n+1}` for `j = 0..=n+1`.
pub fn pece_weights_a<T: Real>(alpha: T, n: usize, dt: T) -> Result<Vec<T>> {
    check_alpha("pece_weights_a", alpha, true)?;
    let scale = dt.powf(alpha) / (alpha * (alpha + T::one()));
    let mut w = Vec::with_capacity(n + 2);
    w.push(scale * pece_first(alpha, n));
    for j in 1..=n {
        w.push(scale * pece_interior(alpha, n - j));
    }
    w.push(scale);
    Ok(w)
}

fn step_overflow<T: Real>(step: usize, value: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::StepOverflow { step })
    }
}

/// Fractional Adams–Bashforth–Moulton method, one corrector pass per step.
pub fn solve_pece<T, F>(f: F, u0: T, grid: &TimeGrid<T>, alpha: T) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    check_alpha("solve_pece", alpha, true)?;
    let steps = grid.steps();
    let h_a = grid.dt().powf(alpha);
    let inv_gamma = gamma(alpha)?.recip();
    let b_scale = h_a / alpha;
    let a_scale = h_a / (alpha * (alpha + T::one()));
    // weights depending only on n - j
    let bw: Vec<T> = (0..steps)
        .map(|m| b_scale * forward_diff_pow(m, alpha))
        .collect();
    let aw: Vec<T> = (0..steps)
        .map(|m| a_scale * pece_interior(alpha, m))
        .collect();

    let mut u = Vec::with_capacity(steps + 1);
    let mut fu = Vec::with_capacity(steps + 1);
    u.push(u0);
    fu.push(step_overflow(0, f(u0))?);
    for n in 0..steps {
        let mut pred = T::zero();
        for j in 0..=n {
            pred = pred + bw[n - j] * fu[j];
        }
        let pred = step_overflow(n + 1, u0 + inv_gamma * pred)?;

        let mut corr = a_scale * pece_first(alpha, n) * fu[0];
        for j in 1..=n {
            corr = corr + aw[n - j] * fu[j];
        }
        corr = corr + a_scale * f(pred);
        let next = step_overflow(n + 1, u0 + inv_gamma * corr)?;
        u.push(next);
        fu.push(step_overflow(n + 1, f(next))?);
    }
    Trajectory::new(*grid, u, Method::Pece, alpha)
}

/// `g(r) = r^{1−α} − (r−1)^{1−α}` for `r ≥ 1`.
fn l1_g<T: Real>(alpha: T, r: usize) -> T {
    debug_assert!(r >= 1);
    forward_diff_pow(r - 1, T::one() - alpha)
}

/// L1 history coefficients `C_{n,j}`, `j = 0..n`.
pub fn l1_coeffs<T: Real>(alpha: T, n: usize) -> Result<Vec<T>> {
    check_alpha("l1_coeffs", alpha, false)?;
    if n == 0 {
        return Err(Error::InsufficientData {
            needed: 1,
            available: 0,
        });
    }
    let mut c = Vec::with_capacity(n);
    c.push(l1_g(alpha, n));
    for j in 1..n {
        c.push(l1_g(alpha, n - j) - l1_g(alpha, n - j + 1));
    }
    Ok(c)
}

/// Explicit L1 scheme
/// `u_{n+1} = Σ_{j≤n} C_{n+1,j} u_j + Γ(2−α) dt^α f(u_n)`.
///
/// Evaluated in increment form, which keeps constants exact:
/// `u_{n+1} = u_n − Σ_{l<n} g(n−l+1)(u_{l+1} − u_l) + Γ(2−α) dt^α f(u_n)`.
pub fn solve_l1<T, F>(f: F, u0: T, grid: &TimeGrid<T>, alpha: T) -> Result<Trajectory<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    check_alpha("solve_l1", alpha, false)?;
    let steps = grid.steps();
    let k = gamma(lit::<T>(2.0) - alpha)? * grid.dt().powf(alpha);
    // g[r] for r = 0..=steps, g[0] unused
    let g: Vec<T> = (0..=steps)
        .map(|r| if r == 0 { T::zero() } else { l1_g(alpha, r) })
        .collect();

    let mut u = Vec::with_capacity(steps + 1);
    let mut du: Vec<T> = Vec::with_capacity(steps);
    u.push(u0);
    for n in 0..steps {
        let mut memory = T::zero();
        for l in 0..n {
            memory = memory + g[n - l + 1] * du[l];
        }
        let forcing = step_overflow(n, f(u[n]))?;
        let next = step_overflow(n + 1, u[n] - memory + k * forcing)?;
        du.push(next - u[n]);
        u.push(next);
    }
    Trajectory::new(*grid, u, Method::L1, alpha)
}

/// Discrete Caputo derivative of a sampled sequence, for `n = 1..len`.
pub fn discrete_caputo_l1<T: Real>(u: &[T], alpha: T, dt: T) -> Result<Vec<T>> {
    check_alpha("discrete_caputo_l1", alpha, false)?;
    if u.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: u.len(),
        });
    }
    let k = gamma(lit::<T>(2.0) - alpha)? * dt.powf(alpha);
    let mut out = Vec::with_capacity(u.len() - 1);
    for n in 1..u.len() {
        let c = l1_coeffs(alpha, n)?;
        let hist: T = c.iter().zip(u).map(|(&cj, &uj)| cj * uj).sum();
        out.push((u[n] - hist) / k);
    }
    Ok(out)
}
