//! Domain types, unit conventions, and parameter validation.
//!
//! Natural units ħ = c = 1 throughout: masses and energies share one unit,
//! lengths carry the inverse unit. The problem is posed on the half line
//! x > 0; whole-line extension by parity is out of scope.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Physical inputs of the potential model.
///
/// The scalar-plus-vector combination is a generalized Kratzer well,
/// Σ(x) = −2D(a/x − q·a²/(2x²)), and the pseudoscalar interaction is an
/// attractive Coulomb term V_P(x) = −b/x. `shape = 1` gives the standard
/// Kratzer well, `shape = 0` the pure Coulomb limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    /// Fermion mass M > 0 (energy units).
    pub mass: f64,
    /// Dissociation energy D > 0: depth scale of the well.
    pub depth: f64,
    /// Length parameter a > 0 (inverse energy units).
    pub range: f64,
    /// Pseudoscalar Coulomb strength b ≥ 0 (dimensionless).
    pub pseudoscalar: f64,
    /// Kratzer shape parameter q ≥ 0 (dimensionless).
    pub shape: f64,
}

impl PotentialParams {
    pub fn new(mass: f64, depth: f64, range: f64, pseudoscalar: f64, shape: f64) -> Self {
        Self { mass, depth, range, pseudoscalar, shape }
    }

    /// Scalar-plus-vector sum Σ(x) = −2D(a/x − q·a²/(2x²)) on x > 0.
    pub fn sigma(&self, x: f64) -> f64 {
        let a = self.range;
        -2.0 * self.depth * (a / x - 0.5 * self.shape * a * a / (x * x))
    }

    /// Pseudoscalar Coulomb term V_P(x) = −b/x.
    pub fn pseudoscalar_at(&self, x: f64) -> f64 {
        -self.pseudoscalar / x
    }

    /// Coulomb coupling D·a of the well.
    pub fn coulomb_coupling(&self) -> f64 {
        self.depth * self.range
    }
}

/// Which of the four solvable cases is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Full scalar+vector Kratzer well with the pseudoscalar Coulomb term,
    /// under spin symmetry (Δ = 0). Any q ≥ 0.
    SpinSymmetricKratzer,
    /// q = 0: Dirac-Coulomb problem with the pseudoscalar term; closed-form
    /// spectrum.
    CoulombLimit,
    /// Vanishing vector potential, q = 0; the spectrum carries both signs.
    ScalarOnly,
    /// Non-relativistic reduction; closed-form spectrum, upper component only.
    NonRelativistic,
}

impl Regime {
    /// Relativistic regimes bound the energy to −M < E < M and use
    /// κ = √(M² − E²); the non-relativistic one uses κ = √(2M(M − E)).
    pub fn is_relativistic(self) -> bool {
        !matches!(self, Regime::NonRelativistic)
    }

    /// Regimes defined only at q = 0.
    pub fn requires_zero_shape(self) -> bool {
        matches!(self, Regime::CoulombLimit | Regime::ScalarOnly)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::SpinSymmetricKratzer => "kratzer",
            Regime::CoulombLimit => "coulomb",
            Regime::ScalarOnly => "scalar",
            Regime::NonRelativistic => "nonrel",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kratzer" => Ok(Regime::SpinSymmetricKratzer),
            "coulomb" => Ok(Regime::CoulombLimit),
            "scalar" => Ok(Regime::ScalarOnly),
            "nonrel" => Ok(Regime::NonRelativistic),
            other => Err(format!(
                "unknown regime `{other}` (expected kratzer|coulomb|scalar|nonrel)"
            )),
        }
    }
}

/// Spinor component being quantized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Upper,
    Lower,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::Upper => "upper",
            Component::Lower => "lower",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "upper" => Ok(Component::Upper),
            "lower" => Ok(Component::Lower),
            other => Err(format!("unknown component `{other}` (expected upper|lower)")),
        }
    }
}

/// Policy for the lower-component strength restriction in the Coulomb limit.
///
/// Strict keeps b > 1/2 so the Laguerre index 2b − 1 of the lower Coulomb
/// eigenfunctions is non-negative. Permissive accepts any b > 0 (the
/// eigenfunctions stay normalizable down to index −1) and attaches a warning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BPolicy {
    #[default]
    Strict,
    Permissive,
}

/// Warning attached by permissive validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidationWarning {
    /// Lower Coulomb component accepted with b ≤ 1/2; the Laguerre index
    /// 2b − 1 is negative (still > −1, so the state is normalizable).
    PermissiveLowerB { b: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} = {value} out of range: {requirement}")]
    NonPositiveParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("regime `{regime}` requires q = 0, got q = {q}")]
    RegimeParamMismatch { regime: Regime, q: f64 },
    #[error("lower Coulomb component requires b > 1/2 under the strict policy, got b = {b}")]
    RestrictedParameterB { b: f64 },
    #[error("regime `{regime}` does not define a quantized {component} component")]
    UnsupportedCombination { regime: Regime, component: Component },
    #[error("energy E = {e} outside the bound-state window of regime `{regime}` (M = {m})")]
    OutOfBoundRange { e: f64, m: f64, regime: Regime },
}

/// A (params, regime, component) triple that passed validation.
///
/// Solvers take this type as input so that invalid combinations are
/// unrepresentable downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedProblem {
    params: PotentialParams,
    regime: Regime,
    component: Component,
    policy: BPolicy,
    warning: Option<ValidationWarning>,
}

impl ValidatedProblem {
    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn component(&self) -> Component {
        self.component
    }

    pub fn policy(&self) -> BPolicy {
        self.policy
    }

    pub fn warning(&self) -> Option<ValidationWarning> {
        self.warning
    }
}

/// Check a parameter set against the model invariants.
///
/// Pure and idempotent: the triple comes back unchanged when it is valid.
/// Under [`BPolicy::Strict`] the lower Coulomb component is rejected for
/// b ≤ 1/2; under [`BPolicy::Permissive`] any b > 0 passes with a warning
/// attached.
///
/// b = 0 is accepted for the upper component (the pseudoscalar term simply
/// drops out); the quantized lower Coulomb component needs b > 0 for a
/// positive leading exponent.
pub fn validate(
    params: PotentialParams,
    regime: Regime,
    component: Component,
    policy: BPolicy,
) -> Result<ValidatedProblem, ModelError> {
    fn require(name: &'static str, value: f64, ok: bool, requirement: &'static str)
        -> Result<(), ModelError>
    {
        if ok && value.is_finite() {
            Ok(())
        } else {
            Err(ModelError::NonPositiveParameter { name, value, requirement })
        }
    }

    require("M", params.mass, params.mass > 0.0, "M > 0")?;
    require("D", params.depth, params.depth > 0.0, "D > 0")?;
    require("a", params.range, params.range > 0.0, "a > 0")?;
    require("b", params.pseudoscalar, params.pseudoscalar >= 0.0, "b >= 0")?;
    require("q", params.shape, params.shape >= 0.0, "q >= 0")?;

    if regime.requires_zero_shape() && params.shape != 0.0 {
        return Err(ModelError::RegimeParamMismatch { regime, q: params.shape });
    }

    if component == Component::Lower
        && matches!(regime, Regime::NonRelativistic | Regime::ScalarOnly)
    {
        return Err(ModelError::UnsupportedCombination { regime, component });
    }

    let mut warning = None;
    if component == Component::Lower && regime == Regime::CoulombLimit {
        let b = params.pseudoscalar;
        match policy {
            BPolicy::Strict => {
                if b <= 0.5 {
                    return Err(ModelError::RestrictedParameterB { b });
                }
            }
            BPolicy::Permissive => {
                if b <= 0.0 {
                    return Err(ModelError::RestrictedParameterB { b });
                }
                if b <= 0.5 {
                    warning = Some(ValidationWarning::PermissiveLowerB { b });
                }
            }
        }
    }

    Ok(ValidatedProblem { params, regime, component, policy, warning })
}

/// Decay constant κ of the bound-state envelope e^{−κx}.
///
/// Relativistic regimes: κ = √(M² − E²) on −M < E < M; non-relativistic:
/// κ = √(2M(M − E)) on E < M. The coordinate map of the hypergeometric
/// reduction is y = 2κ|x| in both cases.
pub fn decay_constant(params: &PotentialParams, regime: Regime, e: f64) -> Result<f64, ModelError> {
    let m = params.mass;
    if regime.is_relativistic() {
        if e.abs() >= m {
            return Err(ModelError::OutOfBoundRange { e, m, regime });
        }
        Ok(((m - e) * (m + e)).sqrt())
    } else {
        if e >= m {
            return Err(ModelError::OutOfBoundRange { e, m, regime });
        }
        Ok((2.0 * m * (m - e)).sqrt())
    }
}

/// One solved bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    /// Quantum number (node count of the quantized component).
    pub n: u32,
    /// Energy, same units as the mass.
    pub e: f64,
    pub regime: Regime,
    pub component: Component,
    /// Leading exponent of the eigenfunction, φ ~ y^p as y → 0.
    pub p: f64,
    /// Laguerre upper index α = 2p − 1.
    pub alpha: f64,
    /// Decay constant of the e^{−κx} envelope.
    pub kappa: f64,
}

impl EnergyLevel {
    /// Eigenvalue of the second-order (Schrödinger-like) form: ε = E² − M²
    /// relativistic, ε = 2M(E − M) non-relativistic. Both equal −κ².
    pub fn epsilon(&self) -> f64 {
        -self.kappa * self.kappa
    }

    /// View of this level with the component flipped, for residual checks of
    /// samples produced by the first-order partner relation (same energy and
    /// regime; `p`/`alpha` keep the quantized component's values).
    pub fn as_partner(&self) -> EnergyLevel {
        EnergyLevel {
            component: match self.component {
                Component::Upper => Component::Lower,
                Component::Lower => Component::Upper,
            },
            ..*self
        }
    }
}
