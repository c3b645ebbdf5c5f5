//! Exact amplitudes in Z[chi] * d^{-k/2}.
//!
//! An amplitude is stored as integer multiplicities over the d powers of
//! the primitive root chi, together with one global power of d^{-1/2}.
//! All engine arithmetic happens here; floating point enters only when a
//! caller asks for a concrete complex value.

use std::fmt;

use num_complex::Complex64;

use super::field::chi;
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CyclotomicAmplitude {
    d: u64,
    /// counts[s] multiplies chi(s).
    counts: Vec<i64>,
    /// The amplitude carries an overall d^{-half_power/2}.
    half_power: i64,
}

impl CyclotomicAmplitude {
    pub fn zero(d: u64, half_power: i64) -> Self {
        CyclotomicAmplitude {
            d,
            counts: vec![0; d as usize],
            half_power,
        }
    }

    pub fn one(d: u64) -> Self {
        CyclotomicAmplitude::root_of_unity(d, 0)
    }

    /// chi(s) as an exact amplitude.
    pub fn root_of_unity(d: u64, s: i64) -> Self {
        let mut a = CyclotomicAmplitude::zero(d, 0);
        a.counts[s.rem_euclid(d as i64) as usize] = 1;
        a
    }

    pub fn from_counts(d: u64, counts: Vec<i64>, half_power: i64) -> Self {
        assert_eq!(counts.len(), d as usize);
        CyclotomicAmplitude {
            d,
            counts,
            half_power,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn half_power(&self) -> i64 {
        self.half_power
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Record one more path with phase chi(s).
    pub fn tally(&mut self, s: u64) {
        self.counts[(s % self.d) as usize] += 1;
    }

    /// Addition is only defined against a matching normalization; callers
    /// arrange equal half powers first.
    pub fn add(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        assert_eq!(self.d, rhs.d, "amplitudes over different roots of unity");
        if self.half_power != rhs.half_power {
            return Err(AlgebraError::HalfPowerMismatch(
                self.half_power,
                rhs.half_power,
            ));
        }
        let counts = self
            .counts
            .iter()
            .zip(&rhs.counts)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CyclotomicAmplitude {
            d: self.d,
            counts,
            half_power: self.half_power,
        })
    }

    /// Group-ring product: convolution of counts mod d; half powers add.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.d, rhs.d, "amplitudes over different roots of unity");
        let d = self.d as usize;
        let mut counts = vec![0i64; d];
        for (i, &a) in self.counts.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.counts.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                counts[(i + j) % d] += a * b;
            }
        }
        CyclotomicAmplitude {
            d: self.d,
            counts,
            half_power: self.half_power + rhs.half_power,
        }
    }

    /// Complex conjugation sends chi(s) to chi(-s).
    pub fn conj(&self) -> Self {
        let d = self.d as usize;
        let mut counts = vec![0i64; d];
        for (s, &c) in self.counts.iter().enumerate() {
            counts[(d - s) % d] = c;
        }
        CyclotomicAmplitude {
            d: self.d,
            counts,
            half_power: self.half_power,
        }
    }

    /// Multiply by chi(t): a cyclic shift of the multiplicities.
    pub fn shift_chi(&self, t: i64) -> Self {
        let d = self.d as usize;
        let t = t.rem_euclid(self.d as i64) as usize;
        let mut counts = vec![0i64; d];
        for (s, &c) in self.counts.iter().enumerate() {
            counts[(s + t) % d] = c;
        }
        CyclotomicAmplitude {
            d: self.d,
            counts,
            half_power: self.half_power,
        }
    }

    pub fn scale_counts(&self, k: i64) -> Self {
        CyclotomicAmplitude {
            d: self.d,
            counts: self.counts.iter().map(|c| c * k).collect(),
            half_power: self.half_power,
        }
    }

    /// |self|^2 as an exact amplitude (half power doubles).
    pub fn abs_squared(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Reduce to coordinates over the basis 1, chi, ..., chi^{d-2} using
    /// 1 + chi + ... + chi^{d-1} = 0. Equal slices mean equal values.
    pub fn normal_form(&self) -> Vec<i64> {
        let last = *self.counts.last().expect("d >= 3");
        self.counts[..self.d as usize - 1]
            .iter()
            .map(|c| c - last)
            .collect()
    }

    /// Exact test against an ordinary integer (same half power scale is the
    /// caller's business; this compares only the cyclotomic part).
    pub fn cyclotomic_part_equals_integer(&self, n: i64) -> bool {
        let nf = self.normal_form();
        nf[0] == n && nf[1..].iter().all(|&c| c == 0)
    }

    /// Floating-point value: the defining sum, evaluated term by term.
    pub fn to_complex(&self) -> Complex64 {
        let scale = (self.d as f64).powf(-(self.half_power as f64) / 2.0);
        let mut total = Complex64::new(0.0, 0.0);
        for (s, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                total += chi(s as i64, self.d) * c as f64;
            }
        }
        total * scale
    }
}

impl fmt::Display for CyclotomicAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} * {}^(-{}/2)",
            self.counts, self.d, self.half_power
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_sum_example() {
        // counts [1,2,0] at half power 0 over d=3 is 1 + 2 chi(1) = i sqrt(3).
        let a = CyclotomicAmplitude::from_counts(3, vec![1, 2, 0], 0);
        let z = a.to_complex();
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(z.im, 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn normalized_root() {
        // counts [0,0,1] with one half power of 3: chi(2)/sqrt(3).
        let a = CyclotomicAmplitude::from_counts(3, vec![0, 0, 1], 1);
        let z = a.to_complex();
        assert_abs_diff_eq!(z.re, -0.5 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(z.im, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn add_requires_matching_half_power() {
        let a = CyclotomicAmplitude::one(5);
        let b = CyclotomicAmplitude::zero(5, 2);
        assert_eq!(
            a.add(&b),
            Err(AlgebraError::HalfPowerMismatch(0, 2))
        );
    }

    #[test]
    fn shift_is_multiplication_by_chi() {
        let a = CyclotomicAmplitude::from_counts(5, vec![3, 1, 0, 0, 2], 0);
        let shifted = a.shift_chi(2);
        let by_mul = a.mul(&CyclotomicAmplitude::root_of_unity(5, 2));
        assert_eq!(shifted, by_mul);
        assert_abs_diff_eq!(
            (shifted.to_complex() - a.to_complex() * chi(2, 5)).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn conjugation_matches_complex_conjugate() {
        let a = CyclotomicAmplitude::from_counts(7, vec![1, -2, 0, 4, 0, 0, 1], 3);
        assert_abs_diff_eq!(
            (a.conj().to_complex() - a.to_complex().conj()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn full_orbit_sums_to_zero() {
        // 1 + chi + ... + chi^{d-1} = 0, the cyclotomic identity.
        let d = 7;
        let all = CyclotomicAmplitude::from_counts(d, vec![1; d as usize], 0);
        assert!(all.cyclotomic_part_equals_integer(0));
        assert_abs_diff_eq!(all.to_complex().norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn integer_recognition_sees_through_the_relation() {
        // [4,1,1,1,1] = 3 + (1+chi+...+chi^4) = 3 over d=5.
        let a = CyclotomicAmplitude::from_counts(5, vec![4, 1, 1, 1, 1], 0);
        assert!(a.cyclotomic_part_equals_integer(3));
        assert!(!a.cyclotomic_part_equals_integer(4));
    }

    #[test]
    fn product_agrees_with_complex_product() {
        let a = CyclotomicAmplitude::from_counts(5, vec![1, 2, 0, 0, 1], 1);
        let b = CyclotomicAmplitude::from_counts(5, vec![0, 1, 1, 0, 0], 2);
        let p = a.mul(&b);
        assert_eq!(p.half_power(), 3);
        assert_abs_diff_eq!(
            (p.to_complex() - a.to_complex() * b.to_complex()).norm(),
            0.0,
            epsilon = 1e-12
        );
    }
}
