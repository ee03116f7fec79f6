use thiserror::Error;

use crate::step::EnergyZone;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy must be positive (got {0})")]
    NonPositiveEnergy(f64),

    #[error("energy {energy} sits on a zone boundary at {boundary}")]
    DegenerateEnergy { energy: f64, boundary: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("near-zero denominator in the {0} closed form")]
    InternalDegeneracy(&'static str),

    #[error("energy window [{lo}, {hi}] leaves zone {zone:?}")]
    ZoneCrossing { zone: EnergyZone, lo: f64, hi: f64 },

    #[error("matching system is singular (pivot {pivot:e} in column {column})")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("packet peak at the scan boundary t = {0}; widen the time window")]
    UnresolvedPeak(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid packet: {0}")]
    InvalidPacket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
