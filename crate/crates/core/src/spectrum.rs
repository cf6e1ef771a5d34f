//! Analytical energy levels of the four regimes.
//!
//! Closed forms where they exist (Coulomb, scalar-only, non-relativistic);
//! the full Kratzer case couples the level equation to the energy through the
//! inverse-square strength, so it is solved by bracketed scan-and-bisect.

use thiserror::Error;

use crate::model::{
    decay_constant, Component, EnergyLevel, ModelError, PotentialParams, Regime, ValidatedProblem,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("1 + 4ξ = {radicand} < 0: configuration does not bind")]
    NegativeRadicand { radicand: f64 },
    #[error("level equation has {} sign changes; candidate energies {candidates:?}", candidates.len())]
    MultipleRoots { candidates: Vec<f64> },
    #[error("no root of the level equation found on (-M, M); input was mis-validated")]
    NoRootFound,
    #[error("no bound state at n = {n}: 2Da = {coupling} exceeds n + 1 + b = {threshold}")]
    NoBoundState { n: u32, coupling: f64, threshold: f64 },
    #[error("solver for regime `{expected}` called on a `{got}` problem")]
    RegimeMismatch { expected: Regime, got: Regime },
}

/// Sign branch of the scalar-only spectrum E = ±M√(1 − 4D²a²/(n+1+b)²).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Scan-and-bisect controls for the implicit Kratzer level equation.
///
/// Tolerances are relative to the mass: the bisection stops at
/// `energy_tol * M` and the scan window keeps `bracket_margin * M` away from
/// the E = ±M endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolveConfig {
    pub scan_points: usize,
    pub energy_tol: f64,
    pub bracket_margin: f64,
}

impl Default for RootSolveConfig {
    fn default() -> Self {
        Self { scan_points: 2000, energy_tol: 1e-12, bracket_margin: 1e-10 }
    }
}

impl RootSolveConfig {
    fn checked(&self) -> Result<(), SpectrumError> {
        if self.scan_points < 16 || self.energy_tol <= 0.0 || self.bracket_margin <= 0.0 {
            return Err(SpectrumError::Model(ModelError::NonPositiveParameter {
                name: "root-solve config",
                value: self.scan_points as f64,
                requirement: "scan_points >= 16, tolerances > 0",
            }));
        }
        Ok(())
    }
}

/// Inverse-square strength of the second-order equation:
/// ξ⁺ = D(E+M)qa² + b(b+1) for the upper component,
/// ξ⁻ = D(E+M)qa² + b(b−1) for the lower one.
pub fn xi(params: &PotentialParams, component: Component, e: f64) -> f64 {
    let b = params.pseudoscalar;
    let centrifugal = match component {
        Component::Upper => b * (b + 1.0),
        Component::Lower => b * (b - 1.0),
    };
    params.depth * (e + params.mass) * params.shape * params.range * params.range + centrifugal
}

/// Leading exponent from the indicial equation p(p−1) = ξ; only the positive
/// branch p = (1 + √(1+4ξ))/2 gives a normalizable state.
///
/// ξ = −1/4 sits on the boundary (p = 1/2) and is returned as-is; callers
/// decide whether to flag it.
pub fn exponent_p(xi_value: f64) -> Result<f64, SpectrumError> {
    let radicand = 1.0 + 4.0 * xi_value;
    if radicand < 0.0 {
        return Err(SpectrumError::NegativeRadicand { radicand });
    }
    Ok(0.5 * (1.0 + radicand.sqrt()))
}

/// Coulomb-plus-inverse-square shape of the effective potential,
/// U(x) = −coulomb/x + inverse_square/x².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveForm {
    /// Coefficient of the attractive −1/x term.
    pub coulomb: f64,
    /// Coefficient of the 1/x² term (may be negative for the lower component).
    pub inverse_square: f64,
}

impl EffectiveForm {
    pub fn eval(&self, x: f64) -> f64 {
        (-self.coulomb + self.inverse_square / x) / x
    }
}

/// Effective potential of the second-order equation at a fixed energy.
///
/// Relativistic regimes: U = (E+M)Σ + V_P² ± V_P′, which collapses to
/// −2Da(E+M)/x + ξ^±(E)/x². Scalar-only replaces (E+M)Σ by 2M·V_S; the
/// non-relativistic reduction uses 2M·Σ. Both keep the V_P² + V_P′ bracket of
/// the upper component.
pub fn effective_form(
    params: &PotentialParams,
    regime: Regime,
    component: Component,
    e: f64,
) -> EffectiveForm {
    let (m, d, a, b) = (params.mass, params.depth, params.range, params.pseudoscalar);
    match regime {
        Regime::SpinSymmetricKratzer | Regime::CoulombLimit => EffectiveForm {
            coulomb: 2.0 * d * a * (e + m),
            inverse_square: xi(params, component, e),
        },
        Regime::ScalarOnly => EffectiveForm {
            coulomb: 4.0 * m * d * a,
            inverse_square: b * (b + 1.0),
        },
        Regime::NonRelativistic => EffectiveForm {
            coulomb: 4.0 * m * d * a,
            inverse_square: 2.0 * m * d * params.shape * a * a + b * (b + 1.0),
        },
    }
}

/// Eigenvalue of the second-order form at energy `e`: E² − M² relativistic,
/// 2M(E − M) non-relativistic.
pub fn energy_to_epsilon(regime: Regime, mass: f64, e: f64) -> f64 {
    if regime.is_relativistic() {
        (e - mass) * (e + mass)
    } else {
        2.0 * mass * (e - mass)
    }
}

fn make_level(
    problem: &ValidatedProblem,
    n: u32,
    e: f64,
) -> Result<EnergyLevel, SpectrumError> {
    let params = problem.params();
    let p = exponent_p(xi(params, problem.component(), e))?;
    let kappa = decay_constant(params, problem.regime(), e)?;
    Ok(EnergyLevel {
        n,
        e,
        regime: problem.regime(),
        component: problem.component(),
        p,
        alpha: 2.0 * p - 1.0,
        kappa,
    })
}

/// Residual of the Kratzer level equation,
/// F(E) = Da·√((M+E)/(M−E)) − (n + 1/2 + √(1/4 + ξ^±(E))).
///
/// F(−M⁺) < 0 and F(M⁻) → +∞, so at least one root exists on (−M, M).
fn kratzer_residual(params: &PotentialParams, component: Component, n: u32, e: f64) -> f64 {
    let m = params.mass;
    let lhs = params.coulomb_coupling() * ((m + e) / (m - e)).sqrt();
    let rhs = n as f64 + 0.5 + (0.25 + xi(params, component, e)).sqrt();
    lhs - rhs
}

/// Solve the implicit level equation of the full Kratzer regime.
///
/// Scans (−M+ε, M−ε) for sign changes and bisects each bracket; monotonicity
/// of the residual is not assumed, so more than one sign change is reported
/// as [`SpectrumError::MultipleRoots`] instead of silently picking one.
pub fn solve_level_kratzer(
    problem: &ValidatedProblem,
    n: u32,
    cfg: &RootSolveConfig,
) -> Result<EnergyLevel, SpectrumError> {
    if problem.regime() != Regime::SpinSymmetricKratzer {
        return Err(SpectrumError::RegimeMismatch {
            expected: Regime::SpinSymmetricKratzer,
            got: problem.regime(),
        });
    }
    cfg.checked()?;

    let params = problem.params();
    let component = problem.component();
    let m = params.mass;
    let lo = -m + cfg.bracket_margin * m;
    let hi = m - cfg.bracket_margin * m;
    let f = |e: f64| kratzer_residual(params, component, n, e);

    let mut roots = Vec::new();
    let step = (hi - lo) / (cfg.scan_points - 1) as f64;
    let mut prev_e = lo;
    let mut prev_f = f(lo);
    if prev_f == 0.0 {
        roots.push(lo);
    }
    for i in 1..cfg.scan_points {
        let e = if i == cfg.scan_points - 1 { hi } else { lo + i as f64 * step };
        let fe = f(e);
        if fe == 0.0 {
            roots.push(e);
        } else if prev_f != 0.0 && (prev_f < 0.0) != (fe < 0.0) {
            roots.push(bisect(&f, prev_e, e, prev_f, cfg.energy_tol * m));
        }
        prev_e = e;
        prev_f = fe;
    }

    match roots.len() {
        0 => Err(SpectrumError::NoRootFound),
        1 => make_level(problem, n, roots[0]),
        _ => Err(SpectrumError::MultipleRoots { candidates: roots }),
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> f64 {
    let mut neg_left = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= tol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == neg_left {
            lo = mid;
            neg_left = fm < 0.0;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form Coulomb-limit level (q = 0):
/// E_n = M[(k² − D²a²)/(k² + D²a²)] with k = n + 1 + b for the upper
/// component and k = n + b for the lower one.
pub fn level_coulomb(problem: &ValidatedProblem, n: u32) -> Result<EnergyLevel, SpectrumError> {
    if problem.regime() != Regime::CoulombLimit {
        return Err(SpectrumError::RegimeMismatch {
            expected: Regime::CoulombLimit,
            got: problem.regime(),
        });
    }
    let params = problem.params();
    let b = params.pseudoscalar;
    let m = params.mass;
    let k = match problem.component() {
        Component::Upper => n as f64 + 1.0 + b,
        Component::Lower => n as f64 + b,
    };
    let da = params.coulomb_coupling();
    let e = m * (k * k - da * da) / (k * k + da * da);
    let p = match problem.component() {
        Component::Upper => 1.0 + b,
        Component::Lower => b,
    };
    Ok(EnergyLevel {
        n,
        e,
        regime: problem.regime(),
        component: problem.component(),
        p,
        alpha: 2.0 * p - 1.0,
        kappa: decay_constant(params, problem.regime(), e)?,
    })
}

/// Scalar-only level (q = 0): E_n = ±M√(1 − 4D²a²/(n+1+b)²), present only
/// while 2Da ≤ n + 1 + b.
pub fn level_scalar_only(
    problem: &ValidatedProblem,
    n: u32,
    sign: Sign,
) -> Result<EnergyLevel, SpectrumError> {
    if problem.regime() != Regime::ScalarOnly {
        return Err(SpectrumError::RegimeMismatch {
            expected: Regime::ScalarOnly,
            got: problem.regime(),
        });
    }
    let params = problem.params();
    let m = params.mass;
    let b = params.pseudoscalar;
    let k = n as f64 + 1.0 + b;
    let coupling = 2.0 * params.coulomb_coupling();
    if coupling > k {
        return Err(SpectrumError::NoBoundState { n, coupling, threshold: k });
    }
    // The radicand vanishes exactly on the 2Da = n+1+b boundary.
    let ratio = coupling / k;
    let radicand = (1.0 - ratio * ratio).max(0.0);
    let e = sign.factor() * m * radicand.sqrt();
    // κ = √(M²−E²) collapses to 2DMa/k, exact at the E = 0 boundary.
    let kappa = m * ratio;
    Ok(EnergyLevel {
        n,
        e,
        regime: problem.regime(),
        component: problem.component(),
        p: 1.0 + b,
        alpha: 2.0 * b + 1.0,
        kappa,
    })
}

/// Non-relativistic level, always defined:
/// E_n = M[1 − 2(2Da/(2n + 1 + S))²] with S = √((2b+1)² + 8MDqa²).
pub fn level_nonrel(problem: &ValidatedProblem, n: u32) -> Result<EnergyLevel, SpectrumError> {
    if problem.regime() != Regime::NonRelativistic {
        return Err(SpectrumError::RegimeMismatch {
            expected: Regime::NonRelativistic,
            got: problem.regime(),
        });
    }
    let params = problem.params();
    let (m, d, a, b, q) = (
        params.mass,
        params.depth,
        params.range,
        params.pseudoscalar,
        params.shape,
    );
    let s = ((2.0 * b + 1.0) * (2.0 * b + 1.0) + 8.0 * m * d * q * a * a).sqrt();
    let kappa = 4.0 * m * d * a / (2.0 * n as f64 + 1.0 + s);
    let e = m - kappa * kappa / (2.0 * m);
    Ok(EnergyLevel {
        n,
        e,
        regime: problem.regime(),
        component: problem.component(),
        p: 0.5 * (1.0 + s),
        alpha: s,
        kappa,
    })
}

/// Dispatch to the regime's solver. `sign` is only consulted by the
/// scalar-only branch.
pub fn solve_level(
    problem: &ValidatedProblem,
    n: u32,
    cfg: &RootSolveConfig,
    sign: Sign,
) -> Result<EnergyLevel, SpectrumError> {
    match problem.regime() {
        Regime::SpinSymmetricKratzer => solve_level_kratzer(problem, n, cfg),
        Regime::CoulombLimit => level_coulomb(problem, n),
        Regime::ScalarOnly => level_scalar_only(problem, n, sign),
        Regime::NonRelativistic => level_nonrel(problem, n),
    }
}

/// Outcome of one entry of a spectrum sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelOutcome {
    Bound(EnergyLevel),
    /// Marker for an absent level (scalar-only radicand below zero).
    Missing { n: u32, coupling: f64, threshold: f64 },
}

/// Levels n = 0..=n_max; absent scalar-only levels become markers instead of
/// aborting the sweep.
pub fn spectrum_range(
    problem: &ValidatedProblem,
    n_max: u32,
    cfg: &RootSolveConfig,
    sign: Sign,
) -> Result<Vec<LevelOutcome>, SpectrumError> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        match solve_level(problem, n, cfg, sign) {
            Ok(level) => out.push(LevelOutcome::Bound(level)),
            Err(SpectrumError::NoBoundState { n, coupling, threshold }) => {
                out.push(LevelOutcome::Missing { n, coupling, threshold })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
