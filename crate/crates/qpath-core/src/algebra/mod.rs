//! Exact arithmetic: prime fields, cyclotomic amplitudes, multivariate
//! polynomials and the differential-form calculus built on top of them.

pub mod amplitude;
pub mod field;
pub mod forms;
pub mod matrix;
pub mod poly;

pub use amplitude::CyclotomicAmplitude;
pub use field::{chi, is_odd_prime, mod_inverse, Fp};
pub use forms::{DifferentialForm, Gen};
pub use matrix::MatFp;
pub use poly::{Coeff, Monomial, Polynomial, Rat, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("division by zero in Z_{0}")]
    DivisionByZero(u64),
    #[error("modulus {0} is not an odd prime")]
    NonPrimeModulus(u64),
    #[error("half-power mismatch: {0} vs {1}")]
    HalfPowerMismatch(i64, i64),
    #[error("one-form is not closed")]
    NotClosed,
    #[error("one-form is closed but not exact: antiderivative of exponent {exponent} needs division by {divisor} = 0 mod {modulus}")]
    NotExact {
        exponent: u32,
        divisor: u64,
        modulus: u64,
    },
    #[error("polynomial evaluation is missing a value for {0}")]
    MissingVariable(String),
}
