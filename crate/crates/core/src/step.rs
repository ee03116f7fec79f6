//! The potential step and the spectral data of region II.
//!
//! Natural units are used throughout: `ħ = 1` and `m = 1/2`, so the kinetic
//! prefactor `ħ²/2m` is one, the free wavenumber is `ε = √E` and `ħ/m = 2`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quat::{Complex, Quaternion};

/// Relative width (in units of `V0`) of the excluded band around each zone boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Constant anti-hermitian potential `i·v1 + j·v2 + k·v3` occupying `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepPotential {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl StepPotential {
    pub fn new(v1: f64, v2: f64, v3: f64) -> Result<Self> {
        if !(v1.is_finite() && v2.is_finite() && v3.is_finite()) {
            return Err(Error::InvalidPotential("components must be finite".into()));
        }
        if v1 < 0.0 {
            return Err(Error::InvalidPotential(format!(
                "v1 must be non-negative (got {v1})"
            )));
        }
        if v1 == 0.0 && v2 == 0.0 && v3 == 0.0 {
            return Err(Error::InvalidPotential("potential must not vanish".into()));
        }
        Ok(StepPotential { v1, v2, v3 })
    }

    /// Skips validation; used for the free-particle complex limit.
    pub(crate) fn unchecked(v1: f64, v2: f64, v3: f64) -> Self {
        StepPotential { v1, v2, v3 }
    }

    /// `√(v1² + v2² + v3²)`, the top of the zone-B band.
    pub fn v0(&self) -> f64 {
        self.v1.hypot(self.w_modulus())
    }

    /// `|W| = √(v2² + v3²)`, the top of the zone-C band.
    pub fn w_modulus(&self) -> f64 {
        self.v2.hypot(self.v3)
    }

    /// `W = v2 − i·v3`; the pure-quaternionic part of the potential equals `j·W`.
    pub fn w(&self) -> Complex {
        Complex::new(self.v2, -self.v3)
    }

    /// The potential as the quaternion `i·v1 + j·v2 + k·v3`.
    pub fn as_quaternion(&self) -> Quaternion {
        Quaternion::new(0.0, self.v1, self.v2, self.v3)
    }

    /// Rotates `(v2, v3)` by `angle`, keeping `|W|` and `v1` fixed.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        StepPotential {
            v1: self.v1,
            v2: self.v2 * c - self.v3 * s,
            v3: self.v2 * s + self.v3 * c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EnergyZone {
    /// `E > V0`: partial reflection.
    A,
    /// `|W| < E < V0`: total reflection, evanescent region II.
    B,
    /// `E < |W|`: total reflection, damped oscillation in region II.
    C,
}

impl EnergyZone {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyZone::A => "A",
            EnergyZone::B => "B",
            EnergyZone::C => "C",
        }
    }
}

impl fmt::Display for EnergyZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spectral parameters of region II at a given energy.
///
/// Zone-specific fields hold zero outside their zone: `rho_minus` (A),
/// `sigma_plus`, `sigma_minus`, `phi` (C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneParams {
    pub zone: EnergyZone,
    pub epsilon: f64,
    pub nu_plus: Complex,
    pub nu_minus: Complex,
    pub rho_minus: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub z: Complex,
    pub w: Complex,
    /// `z·w`: real in `[0, 1)` for zones A and B, `e^{−2iφ}` in zone C.
    pub zw: Complex,
    pub phi: f64,
}

impl ZoneParams {
    /// Exponents `(λ₁, λ₂)` of the bounded region-II modes: the `(1 + j·w)·t`
    /// mode goes as `e^{λ₁x}` and the `(z + j)·t̃` mode as `e^{λ₂x}`.
    pub fn exponents(&self) -> (Complex, Complex) {
        let first = match self.zone {
            EnergyZone::A => self.nu_minus,
            EnergyZone::B | EnergyZone::C => -self.nu_minus,
        };
        (first, -self.nu_plus)
    }
}

pub fn classify_zone(pot: &StepPotential, energy: f64) -> Result<EnergyZone> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let v0 = pot.v0();
    let wm = pot.w_modulus();
    let tol = BOUNDARY_TOLERANCE * v0;
    for boundary in [v0, wm] {
        if (energy - boundary).abs() < tol {
            return Err(Error::DegenerateEnergy { energy, boundary });
        }
    }
    Ok(if energy > v0 {
        EnergyZone::A
    } else if energy > wm {
        EnergyZone::B
    } else {
        EnergyZone::C
    })
}

pub fn zone_params(pot: &StepPotential, energy: f64) -> Result<ZoneParams> {
    let zone = classify_zone(pot, energy)?;
    let v1 = pot.v1;
    let v0 = pot.v0();
    let wm = pot.w_modulus();
    let w_pot = pot.w();
    let epsilon = energy.sqrt();
    let i = Complex::i();

    let params = match zone {
        EnergyZone::A | EnergyZone::B => {
            let root = ((energy - wm) * (energy + wm)).sqrt();
            let denom = energy + root;
            let z = i * w_pot.conj() / denom;
            let w = -i * w_pot / denom;
            let zw = Complex::new((wm / denom).powi(2), 0.0);
            let nu_plus = (v1 + root).sqrt();
            // differences of nearly equal terms rewritten via E² − V0²
            let gap = (energy - v0) * (energy + v0) / (root + v1);
            if zone == EnergyZone::A {
                let rho_minus = gap.sqrt();
                ZoneParams {
                    zone,
                    epsilon,
                    nu_plus: Complex::new(nu_plus, 0.0),
                    nu_minus: Complex::new(0.0, rho_minus),
                    rho_minus,
                    sigma_plus: 0.0,
                    sigma_minus: 0.0,
                    z,
                    w,
                    zw,
                    phi: 0.0,
                }
            } else {
                ZoneParams {
                    zone,
                    epsilon,
                    nu_plus: Complex::new(nu_plus, 0.0),
                    nu_minus: Complex::new((-gap).sqrt(), 0.0),
                    rho_minus: 0.0,
                    sigma_plus: 0.0,
                    sigma_minus: 0.0,
                    z,
                    w,
                    zw,
                    phi: 0.0,
                }
            }
        }
        EnergyZone::C => {
            let b = ((wm - energy) * (wm + energy)).sqrt();
            let phi = b.atan2(energy);
            let modulus = ((v0 - energy) * (v0 + energy)).sqrt();
            let sigma_plus = ((modulus + v1) / 2.0).sqrt();
            let sigma_minus = (b * b / (2.0 * (modulus + v1))).sqrt();
            let rot = Complex::from_polar(1.0, -phi);
            let z = i * w_pot.conj() / wm * rot;
            let w = -i * w_pot / wm * rot;
            ZoneParams {
                zone,
                epsilon,
                nu_plus: Complex::new(sigma_plus, sigma_minus),
                nu_minus: Complex::new(sigma_plus, -sigma_minus),
                rho_minus: 0.0,
                sigma_plus,
                sigma_minus,
                z,
                w,
                zw: Complex::from_polar(1.0, -2.0 * phi),
                phi,
            }
        }
    };
    Ok(params)
}
