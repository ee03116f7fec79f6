//! Seeded random cases and the property suite behind `qstep verify`.
//!
//! Cases come from a SplitMix64 stream (`rand_xoshiro::SplitMix64`), so a
//! given seed yields the same potentials and energies on every platform.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::error::Result;
use crate::oracle::{
    linear_matching_solve, matching_residual, ode_residual, time_reversal_residual,
};
use crate::scattering::{solve_step, ScatteringSolution};
use crate::step::{EnergyZone, StepPotential};
use crate::wavefield::{sample_grid, DEFAULT_GRID};

pub const CONSERVATION_TOLERANCE: f64 = 1e-12;
pub const ORACLE_TOLERANCE: f64 = 1e-12;
pub const CURRENT_TOLERANCE: f64 = 1e-10;
pub const RICHARDSON_RANGE: (f64, f64) = (3.6, 4.4);

/// Cases used by the grid-based properties (current, ODE order, time reversal).
const GRID_CASES: usize = 100;
const TIME_REVERSAL_CASES: usize = 20;
const RICHARDSON_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCase {
    pub potential: StepPotential,
    pub energy: f64,
    pub zone: EnergyZone,
}

fn draw_potential(rng: &mut SplitMix64) -> StepPotential {
    loop {
        let v1 = rng.random_range(0.0..2.0);
        let v2 = rng.random_range(-2.0..2.0);
        let v3 = rng.random_range(-2.0..2.0);
        if let Ok(p) = StepPotential::new(v1, v2, v3) {
            if p.v0() > 0.05 {
                return p;
            }
        }
    }
}

/// One case in `zone`, with the energy kept at least 1% of the zone width
/// away from either boundary.
pub fn draw_case(rng: &mut SplitMix64, zone: EnergyZone) -> RandomCase {
    loop {
        let potential = draw_potential(rng);
        let (v0, w) = (potential.v0(), potential.w_modulus());
        let energy = match zone {
            EnergyZone::A => v0 * (1.0 + rng.random_range(0.01..2.0)),
            EnergyZone::B if v0 - w > 0.01 * v0 => w + (v0 - w) * rng.random_range(0.01..0.99),
            EnergyZone::C if w > 0.05 * v0 => w * rng.random_range(0.01..0.99),
            _ => continue,
        };
        return RandomCase {
            potential,
            energy,
            zone,
        };
    }
}

/// `n` cases cycling through zones A, B, C.
pub fn random_cases(seed: u64, n: usize) -> Vec<RandomCase> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let zones = [EnergyZone::A, EnergyZone::B, EnergyZone::C];
    (0..n).map(|k| draw_case(&mut rng, zones[k % 3])).collect()
}

/// Interior points with `0.2 ≤ |x| ≤ 3`, alternating sides of the step.
pub fn random_interior_points(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let x = rng.random_range(0.2..3.0);
            if k % 2 == 0 {
                -x
            } else {
                x
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// Largest deviation seen (for the Richardson check, the ratio furthest from 4).
    pub worst: f64,
    pub tolerance: String,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }

    fn from_values(name: &'static str, tolerance: String, values: &[(f64, bool)]) -> Self {
        PropertyOutcome {
            name,
            checked: values.len(),
            failures: values.iter().filter(|v| !v.1).count(),
            worst: values.iter().map(|v| v.0).fold(0.0, f64::max),
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub cases: usize,
    pub properties: Vec<PropertyOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(PropertyOutcome::passed)
    }
}

/// `|R + T − 1|`.
pub fn conservation_error(sol: &ScatteringSolution) -> f64 {
    (sol.reflectance + sol.transmittance - 1.0).abs()
}

/// Largest componentwise difference between the closed forms and the linear solve.
pub fn oracle_difference(sol: &ScatteringSolution) -> Result<f64> {
    let lin = linear_matching_solve(&sol.potential, sol.energy)?;
    Ok(lin
        .as_array()
        .iter()
        .zip(sol.coefficients())
        .flat_map(|(a, b)| [(a.re - b.re).abs(), (a.im - b.im).abs()])
        .fold(0.0, f64::max))
}

/// Spread `max j − min j` of the current over the default grid.
pub fn current_spread(sol: &ScatteringSolution) -> Result<f64> {
    let (lo, hi, n) = DEFAULT_GRID;
    let samples = sample_grid(sol, lo, hi, n)?;
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| {
            (a.min(s.j), b.max(s.j))
        });
    Ok(max - min)
}

/// `|residual(h)| / |residual(h/2)|` at `x`, or `None` if the residual is
/// already below 1e−9 (pure rounding).
pub fn richardson(sol: &ScatteringSolution, x: f64, h: f64) -> Option<f64> {
    let coarse = ode_residual(sol, x, h).norm();
    if coarse <= 1e-9 {
        return None;
    }
    Some(coarse / ode_residual(sol, x, h / 2.0).norm())
}

/// Runs every property over `cases` seeded cases.
pub fn verify_suite(seed: u64, cases: usize) -> Result<VerifyReport> {
    let sample = random_cases(seed, cases);
    let solutions: Vec<ScatteringSolution> = sample
        .par_iter()
        .map(|c| solve_step(&c.potential, c.energy))
        .collect::<Result<_>>()?;
    let grid_count = cases.min(GRID_CASES);
    let mut properties = Vec::new();

    let conservation: Vec<(f64, bool)> = solutions
        .iter()
        .map(|s| {
            let e = conservation_error(s);
            (e, e <= CONSERVATION_TOLERANCE)
        })
        .collect();
    properties.push(PropertyOutcome::from_values(
        "conservation |R+T-1|",
        format!("{CONSERVATION_TOLERANCE:e}"),
        &conservation,
    ));

    let total: Vec<(f64, bool)> = solutions
        .iter()
        .filter(|s| s.zone != EnergyZone::A)
        .map(|s| {
            let e = (s.r.norm() - 1.0).abs();
            (e, e <= CONSERVATION_TOLERANCE)
        })
        .collect();
    properties.push(PropertyOutcome::from_values(
        "total reflection ||r|-1| (zones B, C)",
        format!("{CONSERVATION_TOLERANCE:e}"),
        &total,
    ));

    let oracle: Vec<(f64, bool)> = solutions
        .par_iter()
        .map(|s| oracle_difference(s).map(|d| (d, d <= ORACLE_TOLERANCE)))
        .collect::<Result<_>>()?;
    properties.push(PropertyOutcome::from_values(
        "oracle equivalence (closed form vs linear solve)",
        format!("{ORACLE_TOLERANCE:e}"),
        &oracle,
    ));

    let matching: Vec<(f64, bool)> = solutions
        .iter()
        .map(|s| {
            let rep = matching_residual(s);
            (rep.max_abs, rep.converged)
        })
        .collect();
    properties.push(PropertyOutcome::from_values(
        "matching residual at x = 0",
        format!("{:e}", crate::oracle::MATCHING_TOLERANCE),
        &matching,
    ));

    let current: Vec<(f64, bool)> = solutions[..grid_count]
        .par_iter()
        .map(|s| current_spread(s).map(|d| (d, d <= CURRENT_TOLERANCE)))
        .collect::<Result<_>>()?;
    properties.push(PropertyOutcome::from_values(
        "current constancy over 1201 points",
        format!("{CURRENT_TOLERANCE:e}"),
        &current,
    ));

    let points = random_interior_points(seed ^ 0x5eed, grid_count);
    let (lo, hi) = RICHARDSON_RANGE;
    let order: Vec<(f64, bool)> = solutions[..grid_count]
        .iter()
        .zip(&points)
        .filter_map(|(s, &x)| richardson(s, x, RICHARDSON_STEP))
        .map(|ratio| ((ratio - 4.0).abs(), (lo..=hi).contains(&ratio)))
        .collect();
    properties.push(PropertyOutcome::from_values(
        "ODE residual Richardson ratio",
        format!("[{lo}, {hi}]"),
        &order,
    ));

    let reversal: Vec<(f64, bool)> = sample[..cases.min(TIME_REVERSAL_CASES)]
        .par_iter()
        .map(|c| {
            time_reversal_residual(&c.potential, c.energy).map(|rep| (rep.max_abs, rep.converged))
        })
        .collect::<Result<_>>()?;
    properties.push(PropertyOutcome::from_values(
        "time-reversal residual",
        "FD truncation".to_string(),
        &reversal,
    ));

    Ok(VerifyReport {
        seed,
        cases,
        properties,
    })
}
