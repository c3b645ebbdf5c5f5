//! The prime field Z_d for odd prime d, and the character chi.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::AlgebraError;

/// Trial division is plenty: every modulus in this crate is tiny.
pub fn is_odd_prime(d: u64) -> bool {
    if d < 3 || d % 2 == 0 {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Multiplicative inverse of `a` mod prime `d`, by Fermat exponentiation.
pub fn mod_inverse(a: u64, d: u64) -> Result<u64, AlgebraError> {
    let a = a % d;
    if a == 0 {
        return Err(AlgebraError::DivisionByZero(d));
    }
    Ok(pow_mod(a, d - 2, d))
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, d: u64) -> u64 {
    let mut acc = 1 % d;
    base %= d;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % d;
        }
        base = base * base % d;
        exp >>= 1;
    }
    acc
}

/// chi(s) = exp(2*pi*i*s/d), the fundamental character of Z_d.
pub fn chi(s: i64, d: u64) -> Complex64 {
    let r = s.rem_euclid(d as i64) as f64;
    let angle = std::f64::consts::TAU * r / d as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// A residue in Z_d. The modulus rides along so mixed-modulus arithmetic
/// is caught immediately instead of corrupting a result.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: i64, modulus: u64) -> Self {
        debug_assert!(modulus >= 2);
        Fp {
            value: value.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    pub fn from_u64(value: u64, modulus: u64) -> Self {
        Fp {
            value: value % modulus,
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Fp { value: 0, modulus }
    }

    pub fn one(modulus: u64) -> Self {
        Fp::from_u64(1, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Result<Fp, AlgebraError> {
        Ok(Fp {
            value: mod_inverse(self.value, self.modulus)?,
            modulus: self.modulus,
        })
    }

    pub fn pow(self, exp: u64) -> Fp {
        Fp {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    /// 2^{-1}, which exists because the modulus is odd.
    pub fn half(modulus: u64) -> Fp {
        Fp {
            value: mod_inverse(2, modulus).expect("odd modulus"),
            modulus,
        }
    }

    fn same_field(self, rhs: Fp) -> u64 {
        assert_eq!(
            self.modulus, rhs.modulus,
            "arithmetic across different prime fields"
        );
        self.modulus
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let d = self.same_field(rhs);
        Fp {
            value: (self.value + rhs.value) % d,
            modulus: d,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        let d = self.same_field(rhs);
        Fp {
            value: (self.value + d - rhs.value) % d,
            modulus: d,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        let d = self.same_field(rhs);
        Fp {
            value: self.value * rhs.value % d,
            modulus: d,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
