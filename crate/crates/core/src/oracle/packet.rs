use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quat::Complex;
use crate::scattering::{delay_times, solve_step, DEFAULT_PHASE_STEP};
use crate::step::{classify_zone, EnergyZone, StepPotential};

pub const DEFAULT_QUADRATURE_POINTS: usize = 4001;
pub const DEFAULT_SCAN_POINTS: usize = 2001;

/// Half-width of the quadrature support in units of `sigma_eps`.
const SUPPORT_WIDTHS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScan {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

impl TimeScan {
    pub fn times(&self) -> Vec<f64> {
        let step = (self.t_max - self.t_min) / (self.n_t - 1) as f64;
        (0..self.n_t)
            .map(|k| self.t_min + step * k as f64)
            .collect()
    }
}

/// Gaussian packet `g(ε) = exp(−(ε − ε0)²/2σ²)` with `ε0 = √e0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    /// Central energy `E0`.
    pub e0: f64,
    /// Width in `ε`.
    pub sigma_eps: f64,
    pub n_quad: usize,
    /// `None` centres a default window on the stationary-phase prediction.
    pub t_scan: Option<TimeScan>,
}

impl PacketSpec {
    pub fn new(e0: f64, sigma_eps: f64) -> Self {
        PacketSpec {
            e0,
            sigma_eps,
            n_quad: DEFAULT_QUADRATURE_POINTS,
            t_scan: None,
        }
    }

    pub fn eps0(&self) -> f64 {
        self.e0.sqrt()
    }

    /// Checks the packet against `pot` and returns the zone of the support.
    pub fn validate(&self, pot: &StepPotential) -> Result<EnergyZone> {
        if !(self.e0 > 0.0) || !self.e0.is_finite() {
            return Err(Error::NonPositiveEnergy(self.e0));
        }
        if !(self.sigma_eps > 0.0) || !self.sigma_eps.is_finite() {
            return Err(Error::InvalidPacket(format!(
                "sigma_eps must be positive (got {})",
                self.sigma_eps
            )));
        }
        if self.n_quad < 3 || self.n_quad.is_multiple_of(2) {
            return Err(Error::InvalidPacket(format!(
                "n_quad must be odd and at least 3 (got {})",
                self.n_quad
            )));
        }
        if let Some(scan) = self.t_scan {
            if scan.n_t < 3
                || !(scan.t_max > scan.t_min)
                || !scan.t_min.is_finite()
                || !scan.t_max.is_finite()
            {
                return Err(Error::InvalidPacket(format!(
                    "time scan needs t_min < t_max and at least 3 points (got {} .. {}, {})",
                    scan.t_min, scan.t_max, scan.n_t
                )));
            }
        }
        let zone = classify_zone(pot, self.e0)?;
        let (lo, hi) = self.support();
        let crossing = Error::ZoneCrossing {
            zone,
            lo: lo.max(0.0).powi(2),
            hi: hi.powi(2),
        };
        if lo <= 0.0 {
            return Err(crossing);
        }
        for eps in [lo, hi] {
            match classify_zone(pot, eps * eps) {
                Ok(z) if z == zone => {}
                _ => return Err(crossing),
            }
        }
        Ok(zone)
    }

    /// `(ε0 − 5σ, ε0 + 5σ)`.
    fn support(&self) -> (f64, f64) {
        let eps0 = self.eps0();
        (
            eps0 - SUPPORT_WIDTHS * self.sigma_eps,
            eps0 + SUPPORT_WIDTHS * self.sigma_eps,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Reflected,
    Transmitted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketArrival {
    pub tau_r: f64,
    /// Zone A only.
    pub tau_t: Option<f64>,
}

/// Trapezoid nodes `ε_k` with weights `w_k·g(ε_k)·c(ε_k)`, where `c` is the
/// channel amplitude.
fn weighted_nodes(
    pot: &StepPotential,
    spec: &PacketSpec,
    channel: Channel,
) -> Result<Vec<(f64, Complex)>> {
    let zone = spec.validate(pot)?;
    if channel == Channel::Transmitted && zone != EnergyZone::A {
        return Err(Error::InvalidPacket(format!(
            "no transmitted packet in zone {zone}"
        )));
    }
    let (lo, hi) = spec.support();
    let n = spec.n_quad;
    let step = (hi - lo) / (n - 1) as f64;
    let eps0 = spec.eps0();
    let sigma = spec.sigma_eps;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let eps = if k == n - 1 { hi } else { lo + step * k as f64 };
            let sol = solve_step(pot, eps * eps)?;
            let amplitude = match channel {
                Channel::Reflected => sol.r,
                Channel::Transmitted => sol.t,
            };
            let end = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            let g = (-0.5 * ((eps - eps0) / sigma).powi(2)).exp();
            Ok((eps, amplitude * (end * step * g)))
        })
        .collect()
}

fn amplitude_at(nodes: &[(f64, Complex)], t: f64) -> f64 {
    nodes
        .iter()
        .map(|&(eps, c)| c * Complex::from_polar(1.0, -eps * eps * t))
        .sum::<Complex>()
        .norm()
}

/// `|ψ(0, t)|` for each `t`, where `ψ(0, t) = Σ_k w_k·g(ε_k)·c(ε_k)·e^{−iε_k²t}`.
pub fn arrival_amplitude(
    pot: &StepPotential,
    spec: &PacketSpec,
    channel: Channel,
    times: &[f64],
) -> Result<Vec<f64>> {
    let nodes = weighted_nodes(pot, spec, channel)?;
    Ok(times.par_iter().map(|&t| amplitude_at(&nodes, t)).collect())
}

/// The scan used by [`packet_arrival`] around the predicted time.
fn scan_for(spec: &PacketSpec, predicted: f64) -> TimeScan {
    spec.t_scan.unwrap_or_else(|| {
        let half = 10f64.max(5.0 * predicted.abs());
        TimeScan {
            t_min: predicted - half,
            t_max: predicted + half,
            n_t: DEFAULT_SCAN_POINTS,
        }
    })
}

/// `(t, |ψ_refl(0, t)|)` over the scan that [`packet_arrival`] would use.
pub fn reflected_series(pot: &StepPotential, spec: &PacketSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate(pot)?;
    let predicted = delay_times(pot, spec.e0, DEFAULT_PHASE_STEP)?;
    let times = scan_for(spec, predicted.tau_r).times();
    let amps = arrival_amplitude(pot, spec, Channel::Reflected, &times)?;
    Ok(times.into_iter().zip(amps).collect())
}

/// Argmax of `|ψ|` with a parabola through the three samples around it.
fn refined_peak(times: &[f64], amps: &[f64]) -> Result<f64> {
    let (k, _) = amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("scan has at least 3 points");
    if k == 0 || k == amps.len() - 1 {
        return Err(Error::UnresolvedPeak(times[k]));
    }
    let (ym, y0, yp) = (amps[k - 1], amps[k], amps[k + 1]);
    let curvature = ym - 2.0 * y0 + yp;
    let dt = times[k + 1] - times[k];
    if curvature >= 0.0 {
        return Ok(times[k]);
    }
    Ok(times[k] + 0.5 * dt * (ym - yp) / curvature)
}

fn measure(
    pot: &StepPotential,
    spec: &PacketSpec,
    channel: Channel,
    predicted: f64,
) -> Result<f64> {
    let times = scan_for(spec, predicted).times();
    let amps = arrival_amplitude(pot, spec, channel, &times)?;
    refined_peak(&times, &amps)
}

/// Arrival times of the reflected (and in zone A transmitted) packet maxima at `x = 0`.
pub fn packet_arrival(pot: &StepPotential, spec: &PacketSpec) -> Result<PacketArrival> {
    let zone = spec.validate(pot)?;
    let predicted = delay_times(pot, spec.e0, DEFAULT_PHASE_STEP)?;
    let tau_r = measure(pot, spec, Channel::Reflected, predicted.tau_r)?;
    let tau_t = match (zone, predicted.tau_t) {
        (EnergyZone::A, Some(tau)) => Some(measure(pot, spec, Channel::Transmitted, tau)?),
        _ => None,
    };
    log::debug!(
        "packet at E0 = {}, σ = {}: τ_r = {tau_r}, τ_t = {tau_t:?}",
        spec.e0,
        spec.sigma_eps
    );
    Ok(PacketArrival { tau_r, tau_t })
}
