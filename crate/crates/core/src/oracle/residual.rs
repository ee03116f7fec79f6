use crate::error::Result;
use crate::quat::{Complex, Quaternion};
use crate::scattering::{solve_step, ScatteringSolution};
use crate::step::StepPotential;
use crate::wavefield::{region1_derivative, region2_derivative};

/// Bound on the jump of `Φ` and `Φ′` across `x = 0` for a matched solution.
pub const MATCHING_TOLERANCE: f64 = 1e-12;

/// Step used by the time-reversal check.
const TIME_REVERSAL_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub descriptor: String,
    pub converged: bool,
}

/// `i·Φ″ − V·Φ + Φ·i·E` at `x`, with `Φ″` from a central second difference
/// of step `h` and `V` the (constant) potential quaternion on that side.
pub fn schrodinger_residual<F>(
    field: F,
    potential: Quaternion,
    energy: f64,
    x: f64,
    h: f64,
) -> Quaternion
where
    F: Fn(f64) -> Quaternion,
{
    let centre = field(x);
    let second = (field(x + h) - centre * 2.0 + field(x - h)) * (1.0 / (h * h));
    Quaternion::I * second - potential * centre + centre * Quaternion::I * energy
}

fn side_of(sol: &ScatteringSolution, x: f64) -> (Quaternion, bool) {
    if x < 0.0 {
        (Quaternion::ZERO, true)
    } else {
        (sol.potential.as_quaternion(), false)
    }
}

/// Finite-difference residual of the stationary equation for `sol` at `x ≠ 0`.
///
/// The stencil uses the analytic expression of the side containing `x`.
pub fn ode_residual(sol: &ScatteringSolution, x: f64, h: f64) -> Quaternion {
    let (potential, left) = side_of(sol, x);
    if left {
        schrodinger_residual(
            |y| region1_derivative(sol, y, 0),
            potential,
            sol.energy,
            x,
            h,
        )
    } else {
        schrodinger_residual(
            |y| region2_derivative(sol, y, 0),
            potential,
            sol.energy,
            x,
            h,
        )
    }
}

/// `|residual(h)| / |residual(h/2)|`; close to 4 for a true solution.
pub fn richardson_ratio(sol: &ScatteringSolution, x: f64, h: f64) -> f64 {
    ode_residual(sol, x, h).norm() / ode_residual(sol, x, h / 2.0).norm()
}

/// Jump of `Φ` and of `Φ′` across the step, from the analytic expressions.
pub fn matching_residual(sol: &ScatteringSolution) -> ResidualReport {
    let value = (region1_derivative(sol, 0.0, 0) - region2_derivative(sol, 0.0, 0)).norm();
    let slope = (region1_derivative(sol, 0.0, 1) - region2_derivative(sol, 0.0, 1)).norm();
    let max_abs = value.max(slope);
    ResidualReport {
        max_abs,
        descriptor: format!(
            "x = 0, zone {}: |ΔΦ| = {value:.3e}, |ΔΦ′| = {slope:.3e}",
            sol.zone
        ),
        converged: max_abs < MATCHING_TOLERANCE,
    }
}

/// `u = k·e^{iθ}` with `θ = arg(v2 − i·v3)` (zero for a complex step).
pub fn time_reversal_unit(pot: &StepPotential) -> Quaternion {
    let w = pot.w();
    let theta = if w.norm() > 0.0 { w.arg() } else { 0.0 };
    Quaternion::K * Quaternion::from_complex(Complex::from_polar(1.0, theta))
}

fn grid() -> impl Iterator<Item = f64> {
    // 21 points, none closer to the step than 0.05
    (0..21).map(|k| -2.05 + 0.2 * k as f64)
}

/// Residual of the stationary equation for `χ(x) = u·Φ(x)·ū`, compared
/// point by point against the leading truncation term `(h²/12)|Φ⁗(x)|`.
pub fn transformed_residual(sol: &ScatteringSolution, u: Quaternion, h: f64) -> ResidualReport {
    let ubar = u.conj();
    let mut max_abs: f64 = 0.0;
    let mut max_bound: f64 = 0.0;
    let mut within = true;
    for x in grid() {
        let (potential, left) = side_of(sol, x);
        let branch = |y: f64, order: u32| {
            if left {
                region1_derivative(sol, y, order)
            } else {
                region2_derivative(sol, y, order)
            }
        };
        let res =
            schrodinger_residual(|y| u * branch(y, 0) * ubar, potential, sol.energy, x, h).norm();
        let fourth = branch(x, 4).norm();
        // leading term plus room for the h⁴ term and rounding
        let bound = 1.05 * h * h / 12.0 * fourth + 1e-11 * (1.0 + branch(x, 0).norm());
        within &= res <= bound;
        max_abs = max_abs.max(res);
        max_bound = max_bound.max(bound);
    }
    ResidualReport {
        max_abs,
        descriptor: format!(
            "21-point grid on [-2.05, 1.95], h = {h}, truncation bound {max_bound:.3e}"
        ),
        converged: within,
    }
}

/// Checks that `Ψ_T = u·Ψ·ū`, `u = k·e^{iθ}`, solves the time-reversed
/// equation for the step solution at `energy`.
///
/// With `Ψ = Φ·e^{−iEt}` the reversed evolution reduces to the same
/// stationary operator acting on `u·Φ·ū`, which is what gets evaluated here.
pub fn time_reversal_residual(pot: &StepPotential, energy: f64) -> Result<ResidualReport> {
    let sol = solve_step(pot, energy)?;
    Ok(transformed_residual(
        &sol,
        time_reversal_unit(pot),
        TIME_REVERSAL_STEP,
    ))
}
