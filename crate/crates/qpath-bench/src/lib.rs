//! Shared fixtures for the criterion benchmarks.

use qpath_core::circuit::{CircuitIr, Gate};

/// A fixed three-wire circuit over d = 7 with several Fourier gates, so
/// both amplitude strategies have real work to do.
pub fn dense_workload() -> CircuitIr {
    CircuitIr::new(
        7,
        3,
        vec![
            Gate::F(0),
            Gate::R(1),
            Gate::Sum(0, 1),
            Gate::F(1),
            Gate::Sum(1, 2),
            Gate::F(2),
            Gate::R(0),
            Gate::F(0),
        ],
    )
    .expect("fixed benchmark circuit is valid")
}

/// A two-wire circuit over d = 5 small enough for the dense oracle.
pub fn oracle_workload() -> CircuitIr {
    CircuitIr::new(
        5,
        2,
        vec![
            Gate::F(0),
            Gate::Sum(0, 1),
            Gate::R(1),
            Gate::F(1),
            Gate::Sum(1, 0),
            Gate::F(0),
        ],
    )
    .expect("fixed benchmark circuit is valid")
}
