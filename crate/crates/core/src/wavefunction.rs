//! Eigenfunction evaluation on grids, spinor partner construction,
//! normalization, node counting, and ODE residual diagnostics.
//!
//! All amplitudes are stored real: the imaginary factor the first-order
//! relations carry between the spinor components is a constant phase, and
//! densities and norms are phase-blind.

use thiserror::Error;

use crate::model::{Component, EnergyLevel, PotentialParams, Regime, ValidatedProblem};
use crate::specfun::{
    integrate_halfline, laguerre, laguerre_deriv, second_derivative, QuadratureSpec, SpecFunError,
};
use crate::spectrum::{effective_form, energy_to_epsilon};

/// Note attached to emitted tables about the spinor phase convention.
pub const PHASE_NOTE: &str =
    "real amplitudes; the constant i between spinor components is dropped";

/// The near-origin power behavior y^p makes the fourth derivative of the
/// eigenfunctions unbounded at the origin for non-integer p, so the
/// second-difference residual is not O(h²) there. The residual norm is
/// restricted to y = 2kx at or above this value, where the stencil error
/// budget applies.
const RESIDUAL_BULK_Y_MIN: f64 = 2.0;

/// Points dropped at each end of the interior before taking residual norms.
const RESIDUAL_EDGE_BUFFER: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WavefunctionError {
    #[error("bad grid: {0}")]
    Grid(String),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("level does not match the supplied parameters: {0}")]
    LevelMismatch(String),
    #[error("partner relation is defined from the upper component only")]
    PartnerFromLower,
    #[error("partner denominator vanishes at {} grid points (first indices {:?})",
            indices.len(), &indices[..indices.len().min(8)])]
    SingularDenominator { indices: Vec<usize> },
    #[error("E + M = 0: the first-order partner relation is singular")]
    EplusMZero,
    #[error("grid tail holds {tail:.3e} of the norm, above the {budget:.3e} budget")]
    TailTooLarge { tail: f64, budget: f64 },
    #[error("cannot normalize samples with vanishing norm")]
    ZeroNorm,
    #[error("residual window is empty; grid too short for the bulk norm")]
    WindowEmpty,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Uniform half-line grid, strictly inside (0, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    h: f64,
    len: usize,
}

impl Grid {
    pub fn uniform(x_min: f64, x_max: f64, count: usize) -> Result<Grid, WavefunctionError> {
        if !(x_min > 0.0) || !x_min.is_finite() {
            return Err(WavefunctionError::Grid(format!("x_min = {x_min} must be > 0")));
        }
        if !(x_max > x_min) || !x_max.is_finite() {
            return Err(WavefunctionError::Grid(format!(
                "x_max = {x_max} must exceed x_min = {x_min}"
            )));
        }
        if count < 3 {
            return Err(WavefunctionError::Grid(format!("need >= 3 points, got {count}")));
        }
        Ok(Grid { x_min, h: (x_max - x_min) / (count - 1) as f64, len: count })
    }

    /// Default table grid for a level with decay constant κ:
    /// [1e-6/κ, 40/κ] with 16384 points. The omitted tail is below e^{−80}
    /// of the peak and the x^p behavior makes the tiny-x truncation harmless.
    pub fn default_table(kappa: f64) -> Grid {
        Grid::uniform(1e-6 / kappa, 40.0 / kappa, 16384).expect("kappa > 0")
    }

    /// Denser grid for residual diagnostics, κ·h ≤ 1e-3.
    pub fn residual_default(kappa: f64) -> Grid {
        Grid::uniform(1e-6 / kappa, 40.0 / kappa, 65536).expect("kappa > 0")
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len - 1)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.x(i)).collect()
    }
}

fn check_level(level: &EnergyLevel, params: &PotentialParams) -> Result<(), WavefunctionError> {
    // Both indicial branches satisfy p(p−1) = ξ, so this accepts the
    // permissive lower-Coulomb branch as well as the solver's + branch.
    let xi_value =
        effective_form(params, level.regime, level.component, level.e).inverse_square;
    let residual = (level.p * (level.p - 1.0) - xi_value).abs();
    if residual > 1e-8 * (1.0 + xi_value.abs()) {
        return Err(WavefunctionError::LevelMismatch(format!(
            "indicial residual p(p-1) - xi = {residual:.3e} at E = {}",
            level.e
        )));
    }
    Ok(())
}

/// Unnormalized quantized component at one point: e^{−y/2} y^p L_n^α(y),
/// y = 2κx.
pub fn eval_component_at(level: &EnergyLevel, x: f64) -> Result<f64, WavefunctionError> {
    let y = 2.0 * level.kappa * x;
    let poly = laguerre(level.n, level.alpha, y)?;
    Ok((-0.5 * y).exp() * y.powf(level.p) * poly)
}

/// Sample the quantized component over a grid (unnormalized).
pub fn eval_component(
    level: &EnergyLevel,
    params: &PotentialParams,
    grid: &Grid,
) -> Result<Vec<f64>, WavefunctionError> {
    check_level(level, params)?;
    (0..grid.len()).map(|i| eval_component_at(level, grid.x(i))).collect()
}

/// Whether the first-order partner relation has a constant, nonvanishing
/// denominator for this level (upper component in the Kratzer, Coulomb, or
/// non-relativistic regime). Everywhere else the denominator crosses zero on
/// the half line and the partner is not a globally regular function.
pub fn partner_supported(level: &EnergyLevel) -> bool {
    level.component == Component::Upper
        && matches!(
            level.regime,
            Regime::SpinSymmetricKratzer | Regime::CoulombLimit | Regime::NonRelativistic
        )
}

/// Partner (lower) component from sampled φ₁ by the first-order relation
/// φ₂ = (φ₁′ − V_P φ₁)/(E + M), with the scalar-only denominator replaced by
/// E + M + V_S(x) and the non-relativistic partner reduced to φ₁′/(2M).
///
/// The derivative is taken by central differences (one-sided, second order at
/// the grid ends); the i factor is dropped.
pub fn partner_component(
    level: &EnergyLevel,
    phi1: &[f64],
    params: &PotentialParams,
    grid: &Grid,
) -> Result<Vec<f64>, WavefunctionError> {
    if level.component != Component::Upper {
        return Err(WavefunctionError::PartnerFromLower);
    }
    if phi1.len() != grid.len() {
        return Err(WavefunctionError::LengthMismatch { expected: grid.len(), got: phi1.len() });
    }
    check_level(level, params)?;

    let n = grid.len();
    let h = grid.h();
    let mut deriv = vec![0.0; n];
    deriv[0] = (-3.0 * phi1[0] + 4.0 * phi1[1] - phi1[2]) / (2.0 * h);
    deriv[n - 1] = (3.0 * phi1[n - 1] - 4.0 * phi1[n - 2] + phi1[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        deriv[i] = (phi1[i + 1] - phi1[i - 1]) / (2.0 * h);
    }

    let m = params.mass;
    let e = level.e;
    match level.regime {
        Regime::SpinSymmetricKratzer | Regime::CoulombLimit => {
            let den = e + m;
            if den.abs() <= 1e-14 * m {
                return Err(WavefunctionError::EplusMZero);
            }
            Ok((0..n)
                .map(|i| (deriv[i] - params.pseudoscalar_at(grid.x(i)) * phi1[i]) / den)
                .collect())
        }
        Regime::ScalarOnly => {
            let den: Vec<f64> = (0..n).map(|i| e + m + params.sigma(grid.x(i))).collect();
            // A sign change between neighbors means E + M + V_S crosses zero
            // inside the grid; flag both flanking points.
            let mut singular = Vec::new();
            for i in 0..n {
                let scale = e.abs() + m + params.sigma(grid.x(i)).abs();
                let near_zero = den[i].abs() <= 1e-10 * scale;
                let crosses = i + 1 < n && den[i] * den[i + 1] < 0.0;
                if near_zero || crosses || (i > 0 && den[i - 1] * den[i] < 0.0) {
                    singular.push(i);
                }
            }
            if !singular.is_empty() {
                return Err(WavefunctionError::SingularDenominator { indices: singular });
            }
            Ok((0..n)
                .map(|i| (deriv[i] - params.pseudoscalar_at(grid.x(i)) * phi1[i]) / den[i])
                .collect())
        }
        // The momentum-operator reading of the non-relativistic partner:
        // φ₂ = φ₁′/(2M), no pseudoscalar term.
        Regime::NonRelativistic => Ok(deriv.iter().map(|d| d / (2.0 * m)).collect()),
    }
}

/// Partner component in closed form, for levels where the relation is
/// globally regular ([`partner_supported`]). Uses dL_n^α/dy = −L_{n−1}^{α+1}.
pub fn partner_component_at(
    level: &EnergyLevel,
    params: &PotentialParams,
    x: f64,
) -> Result<f64, WavefunctionError> {
    if !partner_supported(level) {
        return Err(WavefunctionError::PartnerFromLower);
    }
    let m = params.mass;
    let kappa = level.kappa;
    let y = 2.0 * kappa * x;
    let l = laguerre(level.n, level.alpha, y)?;
    let dl = laguerre_deriv(level.n, level.alpha, y)?;
    let (den, b_shift) = match level.regime {
        Regime::NonRelativistic => (2.0 * m, 0.0),
        _ => (level.e + m, params.pseudoscalar),
    };
    if den.abs() <= 1e-14 * m {
        return Err(WavefunctionError::EplusMZero);
    }
    // (φ₁′ + (b/x)φ₁)/den = (2κ/den) e^{−y/2} y^{p−1} [(p + b − y/2) L + y L′].
    let bracket = (level.p + b_shift - 0.5 * y) * l + y * dl;
    Ok(2.0 * kappa / den * (-0.5 * y).exp() * y.powf(level.p - 1.0) * bracket)
}

/// Origin of the second column of a [`WavefunctionTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi2Origin {
    /// No partner: the column is identically zero.
    None,
    /// Closed-form first-order partner at the quantized component's energy.
    FirstOrderPartner,
    /// Samples supplied by the caller.
    Caller,
}

/// Sampled spinor table with its normalization constant.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionTable {
    pub grid: Grid,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    /// Pointwise φ₁² + φ₂².
    pub density: Vec<f64>,
    pub norm_constant: f64,
    pub level: EnergyLevel,
    /// Estimated norm fraction beyond the grid, after normalization.
    pub tail_estimate: f64,
    pub phi2_origin: Phi2Origin,
}

/// Composite Simpson over uniform samples; an odd panel count is finished
/// with the 3/8 rule.
fn integrate_samples(d: &[f64], h: f64) -> f64 {
    let n = d.len();
    if n < 2 {
        return 0.0;
    }
    let panels = n - 1;
    if panels == 1 {
        return 0.5 * h * (d[0] + d[1]);
    }
    let (simpson_end, mut acc) = if panels % 2 == 0 {
        (n - 1, 0.0)
    } else {
        (n - 4, 3.0 * h / 8.0 * (d[n - 4] + 3.0 * d[n - 3] + 3.0 * d[n - 2] + d[n - 1]))
    };
    let mut i = 0;
    while i + 2 <= simpson_end {
        acc += h / 3.0 * (d[i] + 4.0 * d[i + 1] + d[i + 2]);
        i += 2;
    }
    acc
}

/// Normalize sampled spinor components so the half-line density integral is
/// one: grid Simpson integral plus a power-law head estimate below x_min and
/// an exponential tail bound beyond x_max.
///
/// The tail bound must stay below 1e-10 of the integral; grids that stop
/// inside the support fail with [`WavefunctionError::TailTooLarge`].
pub fn normalize(
    level: &EnergyLevel,
    phi1: &[f64],
    phi2: &[f64],
    grid: &Grid,
) -> Result<(f64, WavefunctionTable), WavefunctionError> {
    if phi1.len() != grid.len() {
        return Err(WavefunctionError::LengthMismatch { expected: grid.len(), got: phi1.len() });
    }
    if phi2.len() != grid.len() {
        return Err(WavefunctionError::LengthMismatch { expected: grid.len(), got: phi2.len() });
    }
    let n = grid.len();
    let density: Vec<f64> = (0..n).map(|i| phi1[i] * phi1[i] + phi2[i] * phi2[i]).collect();

    let body = integrate_samples(&density, grid.h());

    // Head: fit d ~ c x^s on the first two samples and integrate below x_min.
    let head = if density[0] > 0.0 && density[1] > 0.0 {
        let s = (density[1] / density[0]).ln() / (grid.x(1) / grid.x(0)).ln();
        let s = s.max(-0.9);
        if s.is_finite() {
            density[0] * grid.x(0) / (s + 1.0)
        } else {
            0.0
        }
    } else {
        0.0
    };

    // Tail: exponential-envelope bound from the last two samples.
    let d_last = density[n - 1];
    let tail = if d_last == 0.0 {
        0.0
    } else {
        let prev = density[n - 2];
        if !(prev > d_last) {
            return Err(WavefunctionError::TailTooLarge { tail: d_last, budget: 0.0 });
        }
        let rate = (prev / d_last).ln() / grid.h();
        d_last / rate
    };

    let total = body + head + tail;
    if !(total > 0.0) || !total.is_finite() {
        return Err(WavefunctionError::ZeroNorm);
    }
    let budget = 1e-10 * total;
    if tail > budget {
        return Err(WavefunctionError::TailTooLarge { tail, budget });
    }

    let norm = 1.0 / total.sqrt();
    let n2 = norm * norm;
    let table = WavefunctionTable {
        grid: *grid,
        phi1: phi1.iter().map(|v| v * norm).collect(),
        phi2: phi2.iter().map(|v| v * norm).collect(),
        density: density.iter().map(|v| v * n2).collect(),
        norm_constant: norm,
        level: *level,
        tail_estimate: tail * n2,
        phi2_origin: Phi2Origin::Caller,
    };
    Ok((norm, table))
}

/// Quadrature spec used when normalizing analytic densities.
pub fn table_quadrature() -> QuadratureSpec {
    QuadratureSpec { rel_tol: 1e-11, abs_floor: 1e-15, max_depth: 40 }
}

/// Build the production spinor table for a solved level: the quantized
/// component in closed form, the first-order partner where it is globally
/// regular (zeros otherwise), normalized by adaptive quadrature of the
/// analytic density over the whole half line.
pub fn spinor_table(
    problem: &ValidatedProblem,
    level: &EnergyLevel,
    grid: Option<Grid>,
) -> Result<WavefunctionTable, WavefunctionError> {
    let params = problem.params();
    check_level(level, params)?;
    let grid = grid.unwrap_or_else(|| Grid::default_table(level.kappa));

    let quantized: Vec<f64> =
        (0..grid.len()).map(|i| eval_component_at(level, grid.x(i))).collect::<Result<_, _>>()?;
    let with_partner = partner_supported(level);
    let partner: Vec<f64> = if with_partner {
        (0..grid.len())
            .map(|i| partner_component_at(level, params, grid.x(i)))
            .collect::<Result<_, _>>()?
    } else {
        vec![0.0; grid.len()]
    };

    let density_at = |x: f64| -> f64 {
        let q = eval_component_at(level, x).unwrap_or(0.0);
        let p = if with_partner {
            partner_component_at(level, params, x).unwrap_or(0.0)
        } else {
            0.0
        };
        q * q + p * p
    };
    let body = integrate_halfline(density_at, 0.0, None, &table_quadrature())?;
    if !(body.value > 0.0) {
        return Err(WavefunctionError::ZeroNorm);
    }
    let norm = 1.0 / body.value.sqrt();
    let n2 = norm * norm;

    let tail = integrate_halfline(
        density_at,
        grid.x_max(),
        None,
        &QuadratureSpec { rel_tol: 1e-6, abs_floor: 1e-15, max_depth: 30 },
    )
    .map(|r| r.value)
    .unwrap_or(0.0);

    let (phi1, phi2) = match level.component {
        Component::Upper => (quantized, partner),
        Component::Lower => (partner, quantized),
    };
    let density: Vec<f64> =
        phi1.iter().zip(&phi2).map(|(a, b)| (a * a + b * b) * n2).collect();
    Ok(WavefunctionTable {
        grid,
        phi1: phi1.iter().map(|v| v * norm).collect(),
        phi2: phi2.iter().map(|v| v * norm).collect(),
        density,
        norm_constant: norm,
        level: *level,
        tail_estimate: tail * n2,
        phi2_origin: if with_partner { Phi2Origin::FirstOrderPartner } else { Phi2Origin::None },
    })
}

/// Count strict sign changes, ignoring entries below 1e-12 of the peak
/// amplitude (floating-point jitter at the origin and in the tail).
pub fn count_nodes(samples: &[f64]) -> usize {
    let max_abs = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return 0;
    }
    let dead_band = 1e-12 * max_abs;
    let mut nodes = 0;
    let mut last_sign = 0i8;
    for &v in samples {
        if v.abs() <= dead_band {
            continue;
        }
        let sign = if v > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            nodes += 1;
        }
        last_sign = sign;
    }
    nodes
}

/// Relative L2 residual of the second-order equation, with its degenerate
/// (all-zero input) flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    pub value: f64,
    pub degenerate: bool,
}

/// Relative L2 norm of [−φ″ + U(x)φ − εφ] over the bulk of the grid, divided
/// by the L2 norm of εφ. U and ε follow the level's regime and component; the
/// second derivative is the central stencil.
///
/// The norm skips a 5-point buffer at each grid end and the near-origin
/// region y < 2 (see [`RESIDUAL_BULK_Y_MIN`]).
pub fn ode_residual(
    level: &EnergyLevel,
    samples: &[f64],
    params: &PotentialParams,
    grid: &Grid,
) -> Result<OdeResidual, WavefunctionError> {
    if samples.len() != grid.len() {
        return Err(WavefunctionError::LengthMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    if samples.len() < 2 * RESIDUAL_EDGE_BUFFER + 3 {
        return Err(SpecFunError::TooFewSamples {
            needed: 2 * RESIDUAL_EDGE_BUFFER + 3,
            got: samples.len(),
        }
        .into());
    }
    let max_abs = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return Ok(OdeResidual { value: 0.0, degenerate: true });
    }

    let second = second_derivative(samples, grid.h())?;
    let form = effective_form(params, level.regime, level.component, level.e);
    let eps = energy_to_epsilon(level.regime, params.mass, level.e);

    let mut num = 0.0;
    let mut den = 0.0;
    let mut used = 0usize;
    for (j, dd) in second.iter().enumerate() {
        let i = j + 1;
        if i < RESIDUAL_EDGE_BUFFER + 1 || i + RESIDUAL_EDGE_BUFFER + 1 >= grid.len() {
            continue;
        }
        let x = grid.x(i);
        if 2.0 * level.kappa * x < RESIDUAL_BULK_Y_MIN {
            continue;
        }
        let u = form.eval(x);
        let r = -dd + (u - eps) * samples[i];
        num += r * r;
        let scale = eps * samples[i];
        den += scale * scale;
        used += 1;
    }
    if used == 0 {
        return Err(WavefunctionError::WindowEmpty);
    }
    if den == 0.0 {
        return Ok(OdeResidual { value: 0.0, degenerate: true });
    }
    Ok(OdeResidual { value: (num / den).sqrt(), degenerate: false })
}

/// Residual of the exact second-order identity obeyed by the first-order
/// partner of an upper level.
///
/// Eliminating φ₁ from the coupled system differentiates the Σ-dependent
/// denominator, so the partner φ₂ does not obey the homogeneous
/// lower-component equation; it obeys it with a source:
/// −φ₂″ + (U₋ − ε)φ₂ = −Σ′φ₁ (relativistic), and for the non-relativistic
/// partner φ₂ = φ₁′/(2M): −φ₂″ + (U − ε)φ₂ = −U′φ₁/(2M). The independently
/// quantized lower family obeys the homogeneous equation instead; the two
/// are distinct functions at distinct energies and are never mixed.
pub fn partner_ode_residual(
    level: &EnergyLevel,
    phi1: &[f64],
    phi2: &[f64],
    params: &PotentialParams,
    grid: &Grid,
) -> Result<OdeResidual, WavefunctionError> {
    if level.component != Component::Upper {
        return Err(WavefunctionError::PartnerFromLower);
    }
    if phi1.len() != grid.len() || phi2.len() != grid.len() {
        return Err(WavefunctionError::LengthMismatch { expected: grid.len(), got: phi1.len() });
    }
    if phi2.len() < 2 * RESIDUAL_EDGE_BUFFER + 3 {
        return Err(SpecFunError::TooFewSamples {
            needed: 2 * RESIDUAL_EDGE_BUFFER + 3,
            got: phi2.len(),
        }
        .into());
    }
    let max_abs = phi2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return Ok(OdeResidual { value: 0.0, degenerate: true });
    }

    let second = second_derivative(phi2, grid.h())?;
    let partner_view = level.as_partner();
    let form = effective_form(params, partner_view.regime, partner_view.component, level.e);
    let eps = energy_to_epsilon(level.regime, params.mass, level.e);
    let (d, a, q, m) = (params.depth, params.range, params.shape, params.mass);

    let source = |x: f64| -> f64 {
        match level.regime {
            // Σ′ for Σ = −2Da/x + Dqa²/x².
            Regime::SpinSymmetricKratzer | Regime::CoulombLimit => {
                2.0 * d * a / (x * x) - 2.0 * d * q * a * a / (x * x * x)
            }
            // U′/(2M) for U = −4MDa/x + ξ/x².
            Regime::NonRelativistic => {
                let xi_nr = form.inverse_square;
                (4.0 * m * d * a / (x * x) - 2.0 * xi_nr / (x * x * x)) / (2.0 * m)
            }
            Regime::ScalarOnly => 0.0,
        }
    };

    let mut num = 0.0;
    let mut den = 0.0;
    let mut used = 0usize;
    for (j, dd) in second.iter().enumerate() {
        let i = j + 1;
        if i < RESIDUAL_EDGE_BUFFER + 1 || i + RESIDUAL_EDGE_BUFFER + 1 >= grid.len() {
            continue;
        }
        let x = grid.x(i);
        if 2.0 * level.kappa * x < RESIDUAL_BULK_Y_MIN {
            continue;
        }
        let u = form.eval(x);
        let r = -dd + (u - eps) * phi2[i] + source(x) * phi1[i];
        num += r * r;
        let scale = eps * phi2[i];
        den += scale * scale;
        used += 1;
    }
    if used == 0 {
        return Err(WavefunctionError::WindowEmpty);
    }
    if den == 0.0 {
        return Ok(OdeResidual { value: 0.0, degenerate: true });
    }
    Ok(OdeResidual { value: (num / den).sqrt(), degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, BPolicy};
    use crate::spectrum::{level_coulomb, level_nonrel, solve_level_kratzer, RootSolveConfig};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn coulomb_upper(b: f64) -> (ValidatedProblem, EnergyLevel) {
        let pr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, b, 0.0),
            Regime::CoulombLimit,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        let level = level_coulomb(&pr, 0).unwrap();
        (pr, level)
    }

    #[test]
    fn grid_construction_checks() {
        assert!(Grid::uniform(0.0, 1.0, 8).is_err());
        assert!(Grid::uniform(1.0, 1.0, 8).is_err());
        assert!(Grid::uniform(0.5, 1.0, 2).is_err());
        let g = Grid::uniform(0.5, 1.5, 11).unwrap();
        assert_relative_eq!(g.h(), 0.1, max_relative = 1e-14);
        assert_relative_eq!(g.x_max(), 1.5, max_relative = 1e-14);
        let table = Grid::default_table(2.0);
        assert_eq!(table.len(), 16384);
        assert_relative_eq!(table.x_max(), 20.0, max_relative = 1e-12);
    }

    #[test]
    fn ground_state_has_no_interior_zero() {
        let (pr, level) = coulomb_upper(0.1);
        let grid = Grid::uniform(1e-4, 30.0, 4001).unwrap();
        let phi = eval_component(&level, pr.params(), &grid).unwrap();
        assert_eq!(count_nodes(&phi), 0);
        assert!(phi.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn leading_power_near_origin() {
        let (_, level) = coulomb_upper(0.1);
        let x = 1e-7;
        let ratio = eval_component_at(&level, 2.0 * x).unwrap()
            / eval_component_at(&level, x).unwrap();
        assert_relative_eq!(ratio, 2.0f64.powf(level.p), max_relative = 1e-5);
    }

    #[test]
    fn first_excited_vanishes_at_laguerre_zero() {
        let (pr, level1) = {
            let pr = validate(
                PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.0),
                Regime::CoulombLimit,
                Component::Upper,
                BPolicy::Strict,
            )
            .unwrap();
            let l = level_coulomb(&pr, 1).unwrap();
            (pr, l)
        };
        let grid = Grid::uniform(1e-5, 40.0 / level1.kappa, 20001).unwrap();
        let phi = eval_component(&level1, pr.params(), &grid).unwrap();
        assert_eq!(count_nodes(&phi), 1);
        // The single zero of L₁^α sits at y = 1 + α.
        let y_zero = 1.0 + level1.alpha;
        let x_zero = y_zero / (2.0 * level1.kappa);
        let idx = ((x_zero - grid.x_min()) / grid.h()).round() as usize;
        assert!(phi[idx].abs() < 1e-3 * phi.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }

    #[test]
    fn partner_collapses_to_derivative_at_zero_b() {
        let (pr, level) = coulomb_upper(0.0);
        let grid = Grid::uniform(1e-3, 30.0, 30001).unwrap();
        let phi1 = eval_component(&level, pr.params(), &grid).unwrap();
        let phi2 = partner_component(&level, &phi1, pr.params(), &grid).unwrap();
        let h = grid.h();
        for i in (100..grid.len() - 100).step_by(977) {
            let d = (phi1[i + 1] - phi1[i - 1]) / (2.0 * h) / (level.e + 1.0);
            assert_abs_diff_eq!(phi2[i], d, epsilon = 1e-12);
        }
    }

    #[test]
    fn partner_analytic_matches_finite_difference() {
        let pr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.01),
            Regime::SpinSymmetricKratzer,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        let level = solve_level_kratzer(&pr, 1, &RootSolveConfig::default()).unwrap();
        let grid = Grid::residual_default(level.kappa);
        let phi1 = eval_component(&level, pr.params(), &grid).unwrap();
        let fd = partner_component(&level, &phi1, pr.params(), &grid).unwrap();
        let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in (50..grid.len() - 50).step_by(1231) {
            let exact = partner_component_at(&level, pr.params(), grid.x(i)).unwrap();
            assert_abs_diff_eq!(fd[i], exact, epsilon = 1e-5 * scale);
        }
    }

    #[test]
    fn partner_satisfies_sourced_lower_equation() {
        let (pr, level) = coulomb_upper(0.1);
        let grid = Grid::residual_default(level.kappa);
        let phi1 = eval_component(&level, pr.params(), &grid).unwrap();
        let phi2 = partner_component(&level, &phi1, pr.params(), &grid).unwrap();
        let r = partner_ode_residual(&level, &phi1, &phi2, pr.params(), &grid).unwrap();
        assert!(!r.degenerate);
        assert!(r.value <= 1e-5, "sourced partner residual {}", r.value);
        // Without the Σ′ source the homogeneous lower equation is violated at
        // O(1): the partner and the independently quantized lower family are
        // different functions.
        let homog = ode_residual(&level.as_partner(), &phi2, pr.params(), &grid).unwrap();
        assert!(homog.value > 1e-1, "homogeneous residual {}", homog.value);
    }

    #[test]
    fn partner_sourced_identity_kratzer_and_nonrel() {
        let kr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.01),
            Regime::SpinSymmetricKratzer,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        let level = solve_level_kratzer(&kr, 1, &RootSolveConfig::default()).unwrap();
        let grid = Grid::residual_default(level.kappa);
        let phi1 = eval_component(&level, kr.params(), &grid).unwrap();
        let phi2 = partner_component(&level, &phi1, kr.params(), &grid).unwrap();
        let r = partner_ode_residual(&level, &phi1, &phi2, kr.params(), &grid).unwrap();
        assert!(r.value <= 1e-5, "kratzer partner residual {}", r.value);

        let nr = validate(
            PotentialParams::new(1.0, 0.4, 1.0, 0.3, 0.05),
            Regime::NonRelativistic,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        let level = level_nonrel(&nr, 0).unwrap();
        let grid = Grid::residual_default(level.kappa);
        let phi1 = eval_component(&level, nr.params(), &grid).unwrap();
        let phi2 = partner_component(&level, &phi1, nr.params(), &grid).unwrap();
        let r = partner_ode_residual(&level, &phi1, &phi2, nr.params(), &grid).unwrap();
        assert!(r.value <= 1e-5, "nonrel partner residual {}", r.value);
    }

    #[test]
    fn partner_coulomb_shape_fit() {
        // For the Coulomb ground state the partner must be e^{−y/2} y^b (c₁ + c₂ y).
        let (pr, level) = coulomb_upper(0.1);
        let grid = Grid::residual_default(level.kappa);
        let phi1 = eval_component(&level, pr.params(), &grid).unwrap();
        let phi2 = partner_component(&level, &phi1, pr.params(), &grid).unwrap();
        let b = pr.params().pseudoscalar;
        let kappa = level.kappa;
        // Least-squares fit of phi2 / (e^{−y/2} y^b) against (1, y) on the bulk.
        let (mut s11, mut s1y, mut syy, mut s1g, mut syg) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut idx = Vec::new();
        for i in 0..grid.len() {
            let y = 2.0 * kappa * grid.x(i);
            if !(0.5..=30.0).contains(&y) {
                continue;
            }
            let basis = (-0.5 * y).exp() * y.powf(b);
            let g = phi2[i] / basis;
            s11 += 1.0;
            s1y += y;
            syy += y * y;
            s1g += g;
            syg += y * g;
            idx.push((i, y, basis));
        }
        let det = s11 * syy - s1y * s1y;
        let c1 = (syy * s1g - s1y * syg) / det;
        let c2 = (s11 * syg - s1y * s1g) / det;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, y, basis) in idx {
            let fit = basis * (c1 + c2 * y);
            num += (phi2[i] - fit) * (phi2[i] - fit);
            den += phi2[i] * phi2[i];
        }
        assert!((num / den).sqrt() <= 1e-6, "fit residual {}", (num / den).sqrt());
    }

    #[test]
    fn partner_rejects_lower_level_input() {
        let pr = validate(
            PotentialParams::new(1.0, 1.0, 1.0, 0.8, 0.0),
            Regime::CoulombLimit,
            Component::Lower,
            BPolicy::Strict,
        )
        .unwrap();
        let level = level_coulomb(&pr, 0).unwrap();
        let grid = Grid::uniform(1e-3, 10.0, 64).unwrap();
        let phi = eval_component(&level, pr.params(), &grid).unwrap();
        assert!(matches!(
            partner_component(&level, &phi, pr.params(), &grid),
            Err(WavefunctionError::PartnerFromLower)
        ));
    }

    #[test]
    fn scalar_partner_reports_singular_indices() {
        let pr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.0),
            Regime::ScalarOnly,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        let level = crate::spectrum::level_scalar_only(&pr, 10, crate::spectrum::Sign::Plus)
            .unwrap();
        // E + M − 2Da/x crosses zero at x = 2Da/(E+M) ≈ 7.06, inside this grid.
        let grid = Grid::uniform(0.5, 20.0, 4001).unwrap();
        let phi = eval_component(&level, pr.params(), &grid).unwrap();
        match partner_component(&level, &phi, pr.params(), &grid) {
            Err(WavefunctionError::SingularDenominator { indices }) => {
                let x_star = 2.0 * 5.0 / (level.e + 1.0);
                for i in indices {
                    assert_abs_diff_eq!(grid.x(i), x_star, epsilon = 0.05);
                }
            }
            other => panic!("expected singular denominator, got {other:?}"),
        }
    }

    #[test]
    fn normalize_scales_by_inverse_root_of_integral() {
        // density 4 e^{-x} integrates to 4; N must be 1/2.
        let level = coulomb_upper(0.1).1;
        let grid = Grid::uniform(1e-8, 60.0, 48001).unwrap();
        let phi1: Vec<f64> = grid.values().iter().map(|x| 2.0 * (-0.5 * x).exp()).collect();
        let phi2 = vec![0.0; grid.len()];
        let (n, table) = normalize(&level, &phi1, &phi2, &grid).unwrap();
        assert_relative_eq!(n, 0.5, max_relative = 1e-7);
        for (d, (a, b)) in table.density.iter().zip(table.phi1.iter().zip(&table.phi2)) {
            assert_abs_diff_eq!(*d, a * a + b * b, epsilon = 1e-15);
        }
    }

    #[test]
    fn normalize_is_idempotent_and_homogeneous() {
        let level = coulomb_upper(0.1).1;
        let grid = Grid::uniform(1e-8, 70.0, 30001).unwrap();
        let phi1: Vec<f64> =
            grid.values().iter().map(|x| (-0.4 * x).exp() * x.powf(1.3)).collect();
        let phi2: Vec<f64> = grid.values().iter().map(|x| 0.3 * (-0.5 * x).exp() * x).collect();
        let (n1, t1) = normalize(&level, &phi1, &phi2, &grid).unwrap();
        let (n2, _) = normalize(&level, &t1.phi1, &t1.phi2, &grid).unwrap();
        assert_abs_diff_eq!(n2, 1.0, epsilon = 1e-10);
        // Scaling the input by c scales N by 1/c.
        let scaled: Vec<f64> = phi1.iter().map(|v| 4.0 * v).collect();
        let scaled2: Vec<f64> = phi2.iter().map(|v| 4.0 * v).collect();
        let (n4, _) = normalize(&level, &scaled, &scaled2, &grid).unwrap();
        assert_relative_eq!(n4, n1 / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn normalize_rejects_short_tails_and_zero_input() {
        let level = coulomb_upper(0.1).1;
        let grid = Grid::uniform(1e-3, 2.0, 801).unwrap();
        let phi1: Vec<f64> = grid.values().iter().map(|x| (-0.5 * x).exp()).collect();
        let phi2 = vec![0.0; grid.len()];
        assert!(matches!(
            normalize(&level, &phi1, &phi2, &grid),
            Err(WavefunctionError::TailTooLarge { .. })
        ));
        let zeros = vec![0.0; grid.len()];
        assert!(matches!(
            normalize(&level, &zeros, &zeros, &grid),
            Err(WavefunctionError::ZeroNorm)
        ));
    }

    #[test]
    fn spinor_table_is_normalized() {
        let pr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.01),
            Regime::SpinSymmetricKratzer,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        let level = solve_level_kratzer(&pr, 0, &RootSolveConfig::default()).unwrap();
        let table = spinor_table(&pr, &level, None).unwrap();
        assert_eq!(table.phi2_origin, Phi2Origin::FirstOrderPartner);
        assert!(table.tail_estimate < 1e-12);
        // Re-integrate the normalized analytic density independently.
        let params = pr.params();
        let n = table.norm_constant;
        let check = integrate_halfline(
            |x| {
                let q = eval_component_at(&level, x).unwrap();
                let p = partner_component_at(&level, params, x).unwrap();
                n * n * (q * q + p * p)
            },
            0.0,
            None,
            &table_quadrature(),
        )
        .unwrap();
        assert_abs_diff_eq!(check.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn lower_table_has_single_component() {
        let pr = validate(
            PotentialParams::new(1.0, 1.0, 1.0, 0.8, 0.0),
            Regime::CoulombLimit,
            Component::Lower,
            BPolicy::Strict,
        )
        .unwrap();
        let level = level_coulomb(&pr, 1).unwrap();
        let table = spinor_table(&pr, &level, None).unwrap();
        assert_eq!(table.phi2_origin, Phi2Origin::None);
        assert!(table.phi1.iter().all(|v| *v == 0.0));
        assert_eq!(count_nodes(&table.phi2), 1);
    }

    #[test]
    fn node_counts_match_quantum_number() {
        let pr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.0),
            Regime::CoulombLimit,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        for n in 0..=6 {
            let level = level_coulomb(&pr, n).unwrap();
            let grid = Grid::default_table(level.kappa);
            let phi = eval_component(&level, pr.params(), &grid).unwrap();
            assert_eq!(count_nodes(&phi), n as usize, "nodes at n = {n}");
        }
    }

    #[test]
    fn count_nodes_ignores_jitter() {
        assert_eq!(count_nodes(&[0.0, 1e-20, 1.0, 2.0, -1e-25, 3.0]), 0);
        assert_eq!(count_nodes(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(count_nodes(&[]), 0);
    }

    #[test]
    fn residual_small_for_eigenfunction_large_for_perturbed() {
        let (pr, level) = coulomb_upper(0.1);
        let grid = Grid::residual_default(level.kappa);
        let phi = eval_component(&level, pr.params(), &grid).unwrap();
        let ok = ode_residual(&level, &phi, pr.params(), &grid).unwrap();
        assert!(ok.value <= 1e-5, "residual {}", ok.value);

        let mut tampered = level;
        tampered.e += 0.05;
        let bad = ode_residual(&tampered, &phi, pr.params(), &grid).unwrap();
        assert!(bad.value > 1e-2, "tampered residual {}", bad.value);
    }

    #[test]
    fn residual_nonrelativistic_regime() {
        let pr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.01),
            Regime::NonRelativistic,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        let level = level_nonrel(&pr, 1).unwrap();
        let grid = Grid::residual_default(level.kappa);
        let phi = eval_component(&level, pr.params(), &grid).unwrap();
        let r = ode_residual(&level, &phi, pr.params(), &grid).unwrap();
        assert!(r.value <= 1e-5, "nonrel residual {}", r.value);
    }

    #[test]
    fn residual_degenerate_on_zero_samples() {
        let (pr, level) = coulomb_upper(0.1);
        let grid = Grid::uniform(0.1, 30.0, 301).unwrap();
        let zeros = vec![0.0; grid.len()];
        let r = ode_residual(&level, &zeros, pr.params(), &grid).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn tail_is_unimodal_after_last_node() {
        let pr = validate(
            PotentialParams::new(1.0, 5.0, 1.0, 0.1, 0.0),
            Regime::CoulombLimit,
            Component::Upper,
            BPolicy::Strict,
        )
        .unwrap();
        for n in [0u32, 2, 4] {
            let level = level_coulomb(&pr, n).unwrap();
            let grid = Grid::default_table(level.kappa);
            let phi = eval_component(&level, pr.params(), &grid).unwrap();
            let abs: Vec<f64> = phi.iter().map(|v| v.abs()).collect();
            // Find the last sign change, then require |φ| to rise to a single
            // peak and decay strictly after it.
            let max_abs = abs.iter().fold(0.0f64, |m, v| m.max(*v));
            let mut last_node = 0;
            let mut last_sign = 0i8;
            for (i, &v) in phi.iter().enumerate() {
                if v.abs() <= 1e-12 * max_abs {
                    continue;
                }
                let s = if v > 0.0 { 1 } else { -1 };
                if last_sign != 0 && s != last_sign {
                    last_node = i;
                }
                last_sign = s;
            }
            let peak = last_node
                + abs[last_node..]
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap()
                    .0;
            for i in peak..grid.len() - 1 {
                if abs[i + 1] == 0.0 && abs[i] == 0.0 {
                    break;
                }
                assert!(
                    abs[i + 1] < abs[i] || abs[i + 1] == 0.0,
                    "tail not decreasing at i = {i} for n = {n}"
                );
            }
        }
    }
}
