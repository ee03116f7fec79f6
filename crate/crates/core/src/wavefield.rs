//! Stationary wavefunction, density and current on either side of the step.
//!
//! Evaluation functions take the physical coordinate `x`. Grids are given in
//! the adimensional coordinate `ξ = √V0·x` used for plotting.

use crate::error::{Error, Result};
use crate::quat::{Complex, Quaternion};
use crate::scattering::ScatteringSolution;
use crate::step::EnergyZone;

/// Default plotting window and resolution in `ξ`.
pub const DEFAULT_GRID: (f64, f64, usize) = (-6.0, 6.0, 1201);

/// One grid point: `ξ`, the four real components of `Φ`, `ρ = |Φ|²` and `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub x: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub rho: f64,
    pub j: f64,
}

/// `n`-th derivative of the region-I field `e^{iεx} + r·e^{−iεx} + j·r̃·e^{εx}`.
pub fn region1_derivative(sol: &ScatteringSolution, x: f64, order: u32) -> Quaternion {
    let eps = sol.params.epsilon;
    let ik = Complex::new(0.0, eps);
    let n = order as i32;
    let a = ik.powi(n) * (ik * x).exp() + sol.r * (-ik).powi(n) * (-ik * x).exp();
    let b = sol.r_tilde * eps.powi(n) * (eps * x).exp();
    Quaternion::from_symplectic(a, b)
}

/// `n`-th derivative of the region-II field
/// `(1 + j·w)·t·e^{λ₁x} + (z + j)·t̃·e^{λ₂x}`.
pub fn region2_derivative(sol: &ScatteringSolution, x: f64, order: u32) -> Quaternion {
    let p = &sol.params;
    let (l1, l2) = p.exponents();
    let n = order as i32;
    let f = sol.t * l1.powi(n) * (l1 * x).exp();
    let g = sol.t_tilde * l2.powi(n) * (l2 * x).exp();
    Quaternion::from_symplectic(f + p.z * g, p.w * f + g)
}

/// `Φ_I(x)`; meant for `x ≤ 0` but evaluates the formula anywhere.
pub fn eval_region1(sol: &ScatteringSolution, x: f64) -> Quaternion {
    region1_derivative(sol, x, 0)
}

/// `Φ_II(x)`; meant for `x ≥ 0` but evaluates the formula anywhere.
pub fn eval_region2(sol: &ScatteringSolution, x: f64) -> Quaternion {
    region2_derivative(sol, x, 0)
}

/// `n`-th derivative of `Φ`, choosing the region from the sign of `x`.
pub fn derivative(sol: &ScatteringSolution, x: f64, order: u32) -> Quaternion {
    if x < 0.0 {
        region1_derivative(sol, x, order)
    } else {
        region2_derivative(sol, x, order)
    }
}

pub fn eval(sol: &ScatteringSolution, x: f64) -> Quaternion {
    derivative(sol, x, 0)
}

/// `J = (ħ/2m)·[(∂Φ̄)·i·Φ − Φ̄·i·∂Φ]`, real by construction; `ħ/2m = 1`.
pub fn current_density(sol: &ScatteringSolution, x: f64) -> f64 {
    let phi = eval(sol, x);
    let dphi = derivative(sol, x, 1);
    let i = Quaternion::I;
    (dphi.conj() * i * phi - phi.conj() * i * dphi).scalar()
}

/// Current on each side from the closed expressions `J_I = 2ε(1 − |r|²)` and
/// `J_II = 2ρ₋(1 − |w|²)|t|²` (zone A) or zero (zones B, C).
pub fn closed_form_currents(sol: &ScatteringSolution) -> (f64, f64) {
    let p = &sol.params;
    let j1 = 2.0 * p.epsilon * (1.0 - sol.r.norm_sqr());
    let j2 = match sol.zone {
        EnergyZone::A => 2.0 * p.rho_minus * (1.0 - p.w.norm_sqr()) * sol.t.norm_sqr(),
        EnergyZone::B | EnergyZone::C => 0.0,
    };
    (j1, j2)
}

/// `√V0`, the factor mapping physical `x` to the plotting coordinate.
pub fn length_scale(sol: &ScatteringSolution) -> f64 {
    let v0 = sol.potential.v0();
    if v0 > 0.0 {
        v0.sqrt()
    } else {
        1.0
    }
}

pub fn sample(sol: &ScatteringSolution, xi: f64) -> WaveSample {
    let x = xi / length_scale(sol);
    let phi = eval(sol, x);
    WaveSample {
        x: xi,
        phi0: phi.q0,
        phi1: phi.q1,
        phi2: phi.q2,
        phi3: phi.q3,
        rho: phi.norm_sqr(),
        j: current_density(sol, x),
    }
}

/// `n` evenly spaced samples over `[x_min, x_max]` in the plotting coordinate.
pub fn sample_grid(
    sol: &ScatteringSolution,
    x_min: f64,
    x_max: f64,
    n: usize,
) -> Result<Vec<WaveSample>> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 points (got {n})"
        )));
    }
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "need x_min < x_max (got {x_min}, {x_max})"
        )));
    }
    let step = (x_max - x_min) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            let xi = if k == n - 1 {
                x_max
            } else {
                x_min + k as f64 * step
            };
            sample(sol, xi)
        })
        .collect())
}
