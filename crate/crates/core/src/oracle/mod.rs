//! Numerical cross-checks that do not go through the closed-form algebra:
//! a direct solve of the matching equations, finite-difference residuals of
//! the stationary equation (plain and time-reversed), and a wave-packet
//! arrival-time measurement.

mod linear;
mod packet;
mod residual;

pub use linear::{gauss_solve, linear_matching_solve, matching_system, MatchingCoefficients};
pub use packet::{
    arrival_amplitude, packet_arrival, reflected_series, Channel, PacketArrival, PacketSpec,
    TimeScan, DEFAULT_QUADRATURE_POINTS, DEFAULT_SCAN_POINTS,
};
pub use residual::{
    matching_residual, ode_residual, richardson_ratio, schrodinger_residual,
    time_reversal_residual, time_reversal_unit, transformed_residual, ResidualReport,
    MATCHING_TOLERANCE,
};
