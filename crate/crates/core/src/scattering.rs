//! Closed-form plane-wave coefficients, probabilities, phases and
//! stationary-phase delay times for each energy zone.
//!
//! Region I carries `e^{iεx} + r·e^{−iεx} + j·r̃·e^{εx}`; region II carries
//! `(1 + j·w)·t·e^{λ₁x} + (z + j)·t̃·e^{λ₂x}` with the exponents from
//! [`ZoneParams::exponents`].

use crate::error::{Error, Result};
use crate::quat::Complex;
use crate::step::{classify_zone, zone_params, EnergyZone, StepPotential, ZoneParams};

/// Default finite-difference step (in `ε`) for phase derivatives.
pub const DEFAULT_PHASE_STEP: f64 = 1e-5;

/// Zone-A solutions with `ρ₋` below this are flagged as ill-conditioned.
pub const ILL_CONDITIONED_RHO: f64 = 1e-6;

const TINY_DENOMINATOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSolution {
    pub potential: StepPotential,
    pub energy: f64,
    pub zone: EnergyZone,
    pub r: Complex,
    pub t: Complex,
    pub r_tilde: Complex,
    pub t_tilde: Complex,
    /// `R = |r|²`.
    pub reflectance: f64,
    /// `T = (ρ₋/ε)(1 − |w|²)|t|²` in zone A, zero otherwise.
    pub transmittance: f64,
    pub params: ZoneParams,
}

impl ScatteringSolution {
    /// Assembles a solution from raw coefficients, filling in `R` and `T`.
    pub fn from_coefficients(
        potential: StepPotential,
        energy: f64,
        params: ZoneParams,
        r: Complex,
        t: Complex,
        r_tilde: Complex,
        t_tilde: Complex,
    ) -> Self {
        let mut sol = ScatteringSolution {
            potential,
            energy,
            zone: params.zone,
            r,
            t,
            r_tilde,
            t_tilde,
            reflectance: 0.0,
            transmittance: 0.0,
            params,
        };
        let (big_r, big_t) = probabilities(&sol);
        sol.reflectance = big_r;
        sol.transmittance = big_t;
        sol
    }

    /// Coefficients in the order `(r, r̃, t, t̃)`.
    pub fn coefficients(&self) -> [Complex; 4] {
        [self.r, self.r_tilde, self.t, self.t_tilde]
    }

    /// Zone-A states just above `V0` where the phases stiffen.
    pub fn is_ill_conditioned(&self) -> bool {
        self.zone == EnergyZone::A && self.params.rho_minus.abs() < ILL_CONDITIONED_RHO
    }
}

fn checked_div(num: Complex, den: Complex, what: &'static str) -> Result<Complex> {
    if den.norm() < TINY_DENOMINATOR {
        return Err(Error::InternalDegeneracy(what));
    }
    Ok(num / den)
}

pub fn solve_step(pot: &StepPotential, energy: f64) -> Result<ScatteringSolution> {
    let p = zone_params(pot, energy)?;
    let i = Complex::i();
    let one = Complex::new(1.0, 0.0);
    let e = Complex::new(p.epsilon, 0.0);
    let two_e = 2.0 * e;
    let (w, zw) = (p.w, p.zw);

    let (r, t, r_tilde, t_tilde) = match p.zone {
        EnergyZone::A => {
            let rho = p.rho_minus;
            let nu = p.nu_plus;
            let bracket = one
                - zw * checked_div(
                    (e + i * nu) * (e - i * rho),
                    (e + nu) * (e + rho),
                    "zone-A t",
                )?;
            let t = checked_div(two_e, (e + rho) * bracket, "zone-A t")?;
            let r = ((e - rho)
                - zw * checked_div((e - i * nu) * (e - i * rho), e + nu, "zone-A r")?)
                / two_e
                * t;
            let t_tilde = -(e - i * rho) / (e + nu) * w * t;
            let r_tilde = (nu + i * rho) / (e + nu) * w * t;
            (r, t, r_tilde, t_tilde)
        }
        EnergyZone::B => {
            let (nm, np) = (p.nu_minus, p.nu_plus);
            let bracket = one
                - zw * checked_div((e + nm) * (e + i * np), (e + i * nm) * (e + np), "zone-B t")?;
            let t = checked_div(two_e, (e + i * nm) * bracket, "zone-B t")?;
            let r = ((e - i * nm) - zw * checked_div((e + nm) * (e - i * np), e + np, "zone-B r")?)
                / two_e
                * t;
            let t_tilde = -(e + nm) / (e + np) * w * t;
            let r_tilde = (np - nm) / (e + np) * w * t;
            (r, t, r_tilde, t_tilde)
        }
        EnergyZone::C => {
            let (sp, sm) = (p.sigma_plus, p.sigma_minus);
            let d1 = e + sm + i * sp;
            let d2 = e + sp + i * sm;
            let a1 = e + sp - i * sm;
            let c1 = e - sm + i * sp;
            let bracket = one - zw * checked_div(a1 * c1, d1 * d2, "zone-C t")?;
            let t = checked_div(two_e, d1 * bracket, "zone-C t")?;
            let r = ((e - sm - i * sp) - zw * checked_div(a1 * (e + sm - i * sp), d2, "zone-C r")?)
                / two_e
                * t;
            let t_tilde = -a1 / d2 * w * t;
            let r_tilde = 2.0 * i * sm / d2 * w * t;
            (r, t, r_tilde, t_tilde)
        }
    };

    Ok(ScatteringSolution::from_coefficients(
        *pot, energy, p, r, t, r_tilde, t_tilde,
    ))
}

/// `(R, T)` from the coefficients of `sol`.
pub fn probabilities(sol: &ScatteringSolution) -> (f64, f64) {
    let big_r = sol.r.norm_sqr();
    let big_t = match sol.zone {
        EnergyZone::A => {
            let p = &sol.params;
            p.rho_minus / p.epsilon * (1.0 - p.w.norm_sqr()) * sol.t.norm_sqr()
        }
        EnergyZone::B | EnergyZone::C => 0.0,
    };
    (big_r, big_t)
}

/// Phase decomposition of the reflection and transmission amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseData {
    /// Zone A: `r = |r|·e^{i(θn − θd)}`, `t = |t|·e^{−iθd}`.
    Partial { theta_n: f64, theta_d: f64 },
    /// Zones B and C: `r = e^{2iθ}`.
    Total { zone: EnergyZone, theta: f64 },
}

impl PhaseData {
    pub fn zone(&self) -> EnergyZone {
        match *self {
            PhaseData::Partial { .. } => EnergyZone::A,
            PhaseData::Total { zone, .. } => zone,
        }
    }

    /// Phase of `r`.
    pub fn reflection_phase(&self) -> f64 {
        match *self {
            PhaseData::Partial { theta_n, theta_d } => theta_n - theta_d,
            PhaseData::Total { theta, .. } => 2.0 * theta,
        }
    }

    /// Phase of `t` (zone A only).
    pub fn transmission_phase(&self) -> Option<f64> {
        match *self {
            PhaseData::Partial { theta_d, .. } => Some(-theta_d),
            PhaseData::Total { .. } => None,
        }
    }
}

pub fn phase_data(sol: &ScatteringSolution) -> PhaseData {
    let p = &sol.params;
    let e = p.epsilon;
    match sol.zone {
        EnergyZone::A => {
            let (rho, nu, zw) = (p.rho_minus, p.nu_plus.re, p.zw.re);
            let theta_n =
                (zw * e * (rho + nu)).atan2((e - rho) * (e + nu) - zw * (e * e - rho * nu));
            let theta_d =
                (zw * e * (rho - nu)).atan2((e + rho) * (e + nu) - zw * (e * e + rho * nu));
            PhaseData::Partial { theta_n, theta_d }
        }
        EnergyZone::B => {
            let (nm, np, zw) = (p.nu_minus.re, p.nu_plus.re, p.zw.re);
            let num = zw * np * (e + nm) - nm * (e + np);
            let den = e * (e + np) - zw * e * (e + nm);
            PhaseData::Total {
                zone: EnergyZone::B,
                theta: num.atan2(den),
            }
        }
        EnergyZone::C => {
            let i = Complex::i();
            let ec = Complex::new(e, 0.0);
            let (sp, sm) = (p.sigma_plus, p.sigma_minus);
            let ph = Complex::from_polar(1.0, p.phi);
            // r = −N/N̄, so r = e^{2iθ} with θ = arg(i·N)
            let n = (ec - sm - i * sp) * (ec + sp + i * sm) * ph
                - (ec + sp - i * sm) * (ec + sm - i * sp) * ph.conj();
            PhaseData::Total {
                zone: EnergyZone::C,
                theta: n.re.atan2(-n.im),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayTimes {
    pub tau_r: f64,
    /// Zone A only.
    pub tau_t: Option<f64>,
    pub ill_conditioned: bool,
}

/// Wraps an angle difference into `(−period/2, period/2]`.
fn wrap(delta: f64, period: f64) -> f64 {
    let half = period / 2.0;
    let mut d = delta % period;
    if d > half {
        d -= period;
    } else if d <= -half {
        d += period;
    }
    d
}

/// Stationary-phase reflection and transmission times at central energy `e0`,
/// with `θ'(ε)` from a central difference of step `h` in `ε`.
pub fn delay_times(pot: &StepPotential, e0: f64, h: f64) -> Result<DelayTimes> {
    let zone = classify_zone(pot, e0)?;
    let eps0 = e0.sqrt();
    if !(h > 0.0) || h >= eps0 {
        return Err(Error::ZoneCrossing {
            zone,
            lo: (eps0 - h).max(0.0).powi(2),
            hi: (eps0 + h).powi(2),
        });
    }
    let (lo, hi) = ((eps0 - h).powi(2), (eps0 + h).powi(2));
    let crossing = Error::ZoneCrossing { zone, lo, hi };
    let below = solve_step(pot, lo).map_err(|_| crossing.clone())?;
    let above = solve_step(pot, hi).map_err(|_| crossing.clone())?;
    if below.zone != zone || above.zone != zone {
        return Err(crossing);
    }
    let centre = solve_step(pot, e0)?;

    // m/ħ = 1/2 in these units
    let m_over_hbar = 0.5;
    match (phase_data(&below), phase_data(&above)) {
        (
            PhaseData::Partial {
                theta_n: n0,
                theta_d: d0,
            },
            PhaseData::Partial {
                theta_n: n1,
                theta_d: d1,
            },
        ) => {
            let tau = std::f64::consts::TAU;
            let dn = wrap(n1 - n0, tau) / (2.0 * h);
            let dd = wrap(d1 - d0, tau) / (2.0 * h);
            Ok(DelayTimes {
                tau_r: m_over_hbar * (dn - dd) / eps0,
                tau_t: Some(-m_over_hbar * dd / eps0),
                ill_conditioned: centre.is_ill_conditioned(),
            })
        }
        (PhaseData::Total { theta: t0, .. }, PhaseData::Total { theta: t1, .. }) => {
            let dtheta = wrap(t1 - t0, std::f64::consts::PI) / (2.0 * h);
            Ok(DelayTimes {
                tau_r: 2.0 * m_over_hbar * dtheta / eps0,
                tau_t: None,
                ill_conditioned: false,
            })
        }
        _ => unreachable!("zones checked above"),
    }
}

/// Standard complex-step coefficients (`v2 = v3 = 0`) with `r̃ = t̃ = 0`.
pub fn complex_limit_solution(v1: f64, energy: f64) -> Result<ScatteringSolution> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::NonPositiveEnergy(energy));
    }
    if !(v1 >= 0.0) || !v1.is_finite() {
        return Err(Error::InvalidPotential(format!(
            "v1 must be non-negative (got {v1})"
        )));
    }
    if (energy - v1).abs() < crate::step::BOUNDARY_TOLERANCE * v1.max(energy) {
        return Err(Error::DegenerateEnergy {
            energy,
            boundary: v1,
        });
    }
    let i = Complex::i();
    let zero = Complex::new(0.0, 0.0);
    let eps = energy.sqrt();
    let e = Complex::new(eps, 0.0);
    let nu_plus = Complex::new((energy + v1).sqrt(), 0.0);
    let (params, r, t) = if energy > v1 {
        let rho = (energy - v1).sqrt();
        let params = ZoneParams {
            zone: EnergyZone::A,
            epsilon: eps,
            nu_plus,
            nu_minus: Complex::new(0.0, rho),
            rho_minus: rho,
            sigma_plus: 0.0,
            sigma_minus: 0.0,
            z: zero,
            w: zero,
            zw: zero,
            phi: 0.0,
        };
        (
            params,
            Complex::new((eps - rho) / (eps + rho), 0.0),
            Complex::new(2.0 * eps / (eps + rho), 0.0),
        )
    } else {
        let kappa = (v1 - energy).sqrt();
        let params = ZoneParams {
            zone: EnergyZone::B,
            epsilon: eps,
            nu_plus,
            nu_minus: Complex::new(kappa, 0.0),
            rho_minus: 0.0,
            sigma_plus: 0.0,
            sigma_minus: 0.0,
            z: zero,
            w: zero,
            zw: zero,
            phi: 0.0,
        };
        (
            params,
            (e - i * kappa) / (e + i * kappa),
            2.0 * e / (e + i * kappa),
        )
    };
    Ok(ScatteringSolution::from_coefficients(
        StepPotential::unchecked(v1, 0.0, 0.0),
        energy,
        params,
        r,
        t,
        zero,
        zero,
    ))
}
