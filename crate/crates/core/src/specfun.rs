//! Self-contained special functions and numerical primitives.
//!
//! Associated Laguerre polynomials with real upper index, the polynomial
//! (terminating) case of Kummer's confluent hypergeometric function, log-gamma,
//! adaptive half-line quadrature for exponentially decaying integrands, and a
//! central second-difference stencil.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Pochhammer pole: (c2)_k vanishes for c2 = {c2}, term k = {k}")]
    PochhammerPole { c2: f64, k: usize },
    #[error("quadrature did not converge: estimated error {error:.3e} exceeds budget {budget:.3e}")]
    NonConvergence { error: f64, budget: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

/// Associated Laguerre polynomial L_n^α(y) for real α > −1, y ≥ 0.
///
/// Three-term recurrence: L₀ = 1, L₁ = 1 + α − y,
/// (k+1) L_{k+1} = (2k + 1 + α − y) L_k − (k + α) L_{k−1}.
pub fn laguerre(n: u32, alpha: f64, y: f64) -> Result<f64, SpecFunError> {
    if !(alpha > -1.0) {
        return Err(SpecFunError::Domain(format!("laguerre needs alpha > -1, got {alpha}")));
    }
    if !(y >= 0.0) {
        return Err(SpecFunError::Domain(format!("laguerre needs y >= 0, got {y}")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - y;
    for k in 1..n as u64 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - y) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Derivative dL_n^α/dy = −L_{n−1}^{α+1}(y).
pub fn laguerre_deriv(n: u32, alpha: f64, y: f64) -> Result<f64, SpecFunError> {
    if n == 0 {
        // Keep the domain checks of `laguerre`.
        laguerre(0, alpha, y)?;
        return Ok(0.0);
    }
    Ok(-laguerre(n - 1, alpha + 1.0, y)?)
}

/// Polynomial case of the confluent hypergeometric function,
/// ₁F₁(−n; c₂; y) = Σ_{k=0..n} (−n)_k / ((c₂)_k k!) · y^k.
///
/// Defined whenever no denominator Pochhammer factor vanishes, i.e. c₂ is not
/// one of 0, −1, …, −(n−1).
pub fn kummer_polynomial(n: u32, c2: f64, y: f64) -> Result<f64, SpecFunError> {
    if n > 0 && c2 <= 0.0 && c2.fract() == 0.0 && c2 > -(n as f64) {
        return Err(SpecFunError::PochhammerPole { c2, k: (-c2) as usize + 1 });
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..n as u64 {
        let kf = k as f64;
        term *= (kf - n as f64) * y / ((c2 + kf) * (kf + 1.0));
        sum += term;
    }
    Ok(sum)
}

/// ln Γ(x) for x > 0 by upward recursion into the Stirling series.
///
/// ln Γ(x) = ln Γ(x + k) − Σ ln(x + i), with the asymptotic series applied at
/// x + k ≥ 12; six Bernoulli terms leave a truncation error below 1e-15 there.
pub fn log_gamma(x: f64) -> Result<f64, SpecFunError> {
    if !(x > 0.0) {
        return Err(SpecFunError::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut z = x;
    while z < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    // Stirling: (z - 1/2) ln z - z + ln(2π)/2 + Σ B_{2j} / (2j(2j-1) z^{2j-1}).
    const COEFFS: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
    ];
    let ln_sqrt_2pi = 0.918_938_533_204_672_74;
    let inv2 = 1.0 / (z * z);
    let mut series = 0.0;
    let mut power = 1.0 / z;
    for c in COEFFS {
        series += c * power;
        power *= inv2;
    }
    Ok((z - 0.5) * z.ln() - z + ln_sqrt_2pi + series - shift)
}

/// Generalized binomial coefficient C(x, n) = Γ(x+1) / (Γ(x−n+1) n!).
///
/// Needs x − n > −1 so all gamma arguments stay positive; that covers the
/// Laguerre normalizer C(n + α, n) for α > −1.
pub fn binomial_real(x: f64, n: u32) -> Result<f64, SpecFunError> {
    let ln = log_gamma(x + 1.0)? - log_gamma(x - n as f64 + 1.0)? - log_gamma(n as f64 + 1.0)?;
    Ok(ln.exp())
}

/// Controls for the adaptive half-line quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute floor: the infinite tail is cut where the integrand falls
    /// below `abs_floor` times its running maximum.
    pub abs_floor: f64,
    /// Maximum interval-bisection depth.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_floor: 1e-14, max_depth: 30 }
    }
}

/// Result of [`integrate_halfline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineIntegral {
    pub value: f64,
    /// Where the infinite tail was cut, when the upper limit was +∞.
    pub truncated_at: Option<f64>,
    /// Accumulated local error estimate of the accepted panels.
    pub error_estimate: f64,
}

/// Adaptive composite Simpson quadrature on [x_lo, x_hi] or [x_lo, +∞).
///
/// An infinite upper limit requires an exponentially decaying integrand; the
/// tail is truncated where |f| drops below `abs_floor` times the running
/// maximum. Power-law behavior at the lower endpoint is resolved by interval
/// bisection; panels still above tolerance at `max_depth` are accepted with
/// their error recorded, and the whole call fails with `NonConvergence` only
/// if the accumulated estimate exceeds the tolerance budget.
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    f: F,
    x_lo: f64,
    x_hi: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<HalfLineIntegral, SpecFunError> {
    if !(x_lo >= 0.0) || !x_lo.is_finite() {
        return Err(SpecFunError::Domain(format!("x_lo must be finite and >= 0, got {x_lo}")));
    }
    if spec.rel_tol <= 0.0 || spec.max_depth == 0 {
        return Err(SpecFunError::Domain("quadrature spec: rel_tol > 0, depth >= 1".into()));
    }

    let (hi, truncated_at) = match x_hi {
        Some(h) => {
            if !(h > x_lo) {
                return Err(SpecFunError::Domain(format!("x_hi = {h} must exceed x_lo = {x_lo}")));
            }
            (h, None)
        }
        None => {
            let cut = find_tail_cut(&f, x_lo, spec.abs_floor)?;
            (cut, Some(cut))
        }
    };

    // A fixed base partition keeps the adaptive pass from accepting a wide
    // interval whose few probe points all miss the integrand's support; it
    // also supplies the scale that turns rel_tol into an error budget.
    const BASE_PANELS: usize = 64;
    let hb = (hi - x_lo) / BASE_PANELS as f64;
    let mut scale = 0.0;
    for i in 0..BASE_PANELS {
        let a = x_lo + i as f64 * hb;
        scale += simpson(&f, a, a + hb).abs();
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    let panel_budget = spec.rel_tol * scale / BASE_PANELS as f64;

    let mut ledger = 0.0;
    let mut value = 0.0;
    for i in 0..BASE_PANELS {
        let a = x_lo + i as f64 * hb;
        let b = if i == BASE_PANELS - 1 { hi } else { a + hb };
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let s = simpson_from(fa, fm, fb, b - a);
        value += adapt(&f, a, b, fa, fm, fb, s, panel_budget, spec.max_depth, &mut ledger);
    }

    let tol = spec.rel_tol * value.abs().max(scale);
    if ledger > tol {
        return Err(SpecFunError::NonConvergence { error: ledger, budget: tol });
    }
    Ok(HalfLineIntegral { value, truncated_at, error_estimate: ledger })
}

fn simpson_from(fa: f64, fm: f64, fb: f64, len: f64) -> f64 {
    len / 6.0 * (fa + 4.0 * fm + fb)
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    simpson_from(f(a), f(0.5 * (a + b)), f(b), b - a)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    budget: f64,
    depth: u32,
    ledger: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let fl = f(0.5 * (a + m));
    let fr = f(0.5 * (m + b));
    let left = simpson_from(fa, fl, fm, m - a);
    let right = simpson_from(fm, fr, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * budget || depth == 0 {
        if depth == 0 {
            *ledger += delta.abs() / 15.0;
        }
        return left + right + delta / 15.0;
    }
    adapt(f, a, m, fa, fl, fm, left, 0.5 * budget, depth - 1, ledger)
        + adapt(f, m, b, fm, fr, fb, right, 0.5 * budget, depth - 1, ledger)
}

/// Walk outward geometrically until |f| stays below `floor` times its running
/// maximum, doubling the step each probe.
fn find_tail_cut<F: Fn(f64) -> f64>(f: &F, x_lo: f64, floor: f64) -> Result<f64, SpecFunError> {
    let mut running_max = f(x_lo).abs();
    let mut step = 1.0f64.max(x_lo * 1e-3);
    let mut x = x_lo;
    let mut below = 0;
    for _ in 0..200 {
        x += step;
        step *= 2.0;
        let v = f(x).abs();
        if !v.is_finite() {
            return Err(SpecFunError::Domain(format!("integrand not finite at x = {x}")));
        }
        running_max = running_max.max(v);
        if running_max > 0.0 && v <= floor * running_max {
            below += 1;
            if below >= 2 {
                return Ok(x);
            }
        } else if running_max == 0.0 {
            // Identically zero so far; any cut works.
            below += 1;
            if below >= 2 {
                return Ok(x);
            }
        } else {
            below = 0;
        }
    }
    Err(SpecFunError::NonConvergence { error: f64::INFINITY, budget: floor })
}

/// Central second differences (f_{i−1} − 2 f_i + f_{i+1})/h² on the interior
/// points; the returned slice is two entries shorter than the input.
pub fn second_derivative(samples: &[f64], h: f64) -> Result<Vec<f64>, SpecFunError> {
    if samples.len() < 3 {
        return Err(SpecFunError::TooFewSamples { needed: 3, got: samples.len() });
    }
    if !(h > 0.0) {
        return Err(SpecFunError::Domain(format!("step must be positive, got {h}")));
    }
    let inv_h2 = 1.0 / (h * h);
    Ok(samples
        .windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]) * inv_h2)
        .collect())
}
