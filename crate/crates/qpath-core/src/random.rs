//! Deterministic randomness for the verification campaigns.
//!
//! Every campaign case draws from its own ChaCha stream: the campaign seed
//! selects the key and the case index selects the stream, so cases are
//! independent, reproducible in isolation, and safe to run in parallel.
//! Sampling goes through `next_u64` only, keeping the draws stable across
//! library versions.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Rat;
use crate::circuit::{CircuitIr, Gate};
use crate::cv::{CvCircuit, CvGate};
use crate::densesim::DenseMatrix;

pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// Uniform draw from 0..bound by rejection.
pub fn rand_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    // 2^64 mod bound, computed without overflow; draws at or above the
    // last full multiple of `bound` are rejected.
    let rem = (u64::MAX % bound + 1) % bound;
    if rem == 0 {
        return rng.next_u64() % bound;
    }
    loop {
        let x = rng.next_u64();
        if x <= u64::MAX - rem {
            return x % bound;
        }
    }
}

fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> Gate {
    let wire = |rng: &mut ChaCha8Rng| rand_below(rng, n as u64) as usize;
    if n == 1 {
        return match rand_below(rng, 7) {
            0..=2 => Gate::F(0),
            3..=5 => Gate::R(0),
            _ => Gate::Id(0),
        };
    }
    match rand_below(rng, 9) {
        0..=2 => Gate::F(wire(rng)),
        3..=5 => Gate::R(wire(rng)),
        6 | 7 => {
            let c = wire(rng);
            let mut t = rand_below(rng, n as u64 - 1) as usize;
            if t >= c {
                t += 1;
            }
            Gate::Sum(c, t)
        }
        _ => Gate::Id(wire(rng)),
    }
}

/// A valid random circuit with 1..=max_gates gates.
pub fn random_circuit(rng: &mut ChaCha8Rng, d: u64, n: usize, max_gates: usize) -> CircuitIr {
    let count = 1 + rand_below(rng, max_gates as u64) as usize;
    let gates = (0..count).map(|_| random_gate(rng, n)).collect();
    CircuitIr::new(d, n, gates).expect("construction keeps the invariants")
}

/// Small nonzero-denominator rational in [-3, 3] with denominator <= 4.
pub fn small_rational(rng: &mut ChaCha8Rng) -> Rat {
    let numer = rand_below(rng, 7) as i64 - 3;
    let denom = 1 + rand_below(rng, 4) as i64;
    Rat::new(numer.into(), denom.into())
}

fn random_cv_gate(rng: &mut ChaCha8Rng, n: usize) -> CvGate {
    let wire = |rng: &mut ChaCha8Rng| rand_below(rng, n as u64) as usize;
    let pick = if n == 1 {
        rand_below(rng, 9)
    } else {
        rand_below(rng, 11)
    };
    match pick {
        0 | 1 => CvGate::F(wire(rng)),
        2 | 3 => CvGate::FDag(wire(rng)),
        4 | 5 => CvGate::Phase { wire: wire(rng), eta: Some(small_rational(rng)) },
        6 | 7 => CvGate::Shift { wire: wire(rng), tau: Some(small_rational(rng)) },
        8 if n == 1 => CvGate::Id(0),
        8 | 9 => {
            let c = wire(rng);
            let mut t = rand_below(rng, n as u64 - 1) as usize;
            if t >= c {
                t += 1;
            }
            if pick == 8 {
                CvGate::Sum(c, t)
            } else {
                CvGate::SumDag(c, t)
            }
        }
        _ => CvGate::Id(wire(rng)),
    }
}

/// A valid random continuous-variable circuit with numeric parameters.
pub fn random_cv_circuit(rng: &mut ChaCha8Rng, n: usize, max_gates: usize) -> CvCircuit {
    let count = 1 + rand_below(rng, max_gates as u64) as usize;
    let gates = (0..count).map(|_| random_cv_gate(rng, n)).collect();
    CvCircuit::new(n, gates).expect("construction keeps the invariants")
}

/// Uniform point of Z_d^n.
pub fn random_point(rng: &mut ChaCha8Rng, d: u64, n: usize) -> Vec<u64> {
    (0..n).map(|_| rand_below(rng, d)).collect()
}

fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1]: 53 uniform bits shifted off zero so the logarithm is finite.
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via the Box-Muller transform.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = unit_open(rng);
    let u2 = unit_open(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Random density operator: rho = A A^dag / tr(A A^dag) with Gaussian A.
/// Hermitian and positive by construction, trace exactly normalized.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            a.set(i, j, Complex64::new(standard_normal(rng), standard_normal(rng)));
        }
    }
    let mut rho = a.mul(&a.dagger());
    let tr = rho.trace().re;
    assert!(tr > 0.0, "Gram matrix trace is positive");
    for i in 0..dim {
        for j in 0..dim {
            rho.set(i, j, rho.get(i, j) / tr);
        }
    }
    rho
}
