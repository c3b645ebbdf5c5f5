//! Sparse multivariate polynomials over an exact coefficient ring.
//!
//! Variables are drawn from one shared, typed symbol set so that boundary
//! symbols, path-sum free parameters, trajectory symbols and gate-local
//! coordinates can all appear in a single expression. Exponents are kept
//! as written: there is no x^d = x collapse, because formal differentiation
//! and antidifferentiation live on the free algebra. Reduction mod d only
//! happens to coefficients, and to values on evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::field::Fp;
use super::AlgebraError;

pub type Rat = num_rational::BigRational;

/// The shared symbol set.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Initial boundary value on a wire.
    Q0(usize),
    /// Free path parameter x_l introduced by a Fourier-type gate.
    Free(usize),
    /// Internal substitution variable used by quadratic-sum elimination.
    Aux(usize),
    /// Trajectory symbol: wire value after `step` gates.
    Path { step: usize, wire: usize },
    /// Gate-local position input.
    In(usize),
    /// Gate-local position output.
    Out(usize),
    /// Gate-local momentum input.
    PIn(usize),
    /// Symbolic phase-gate strength of gate `0` (by gate index).
    Eta(usize),
    /// Symbolic shift-gate amount of gate `0` (by gate index).
    Tau(usize),
}

impl Var {
    pub fn default_name(&self) -> String {
        match *self {
            Var::Q0(i) => format!("q0_{}", i + 1),
            Var::Free(l) => format!("x{}", l + 1),
            Var::Aux(j) => format!("u{}", j + 1),
            Var::Path { step, wire } => format!("q{}_{}", step, wire + 1),
            Var::In(i) => format!("q{}", i + 1),
            Var::Out(i) => format!("Q{}", i + 1),
            Var::PIn(i) => format!("p{}", i + 1),
            Var::Eta(j) => format!("eta{}", j + 1),
            Var::Tau(j) => format!("tau{}", j + 1),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.default_name())
    }
}

/// Sorted (variable, exponent>=1) pairs; the empty product is the constant.
pub type Monomial = Vec<(Var, u32)>;

/// Exact coefficient ring. Implemented for Z_d residues and big rationals.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    /// The 1 of the same ring as `self` (carries the modulus for Z_d).
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiply by a small non-negative integer (power-rule factors).
    fn mul_uint(&self, k: u64) -> Self;
    /// Divide by a small positive integer; fails in Z_d when d divides k.
    fn div_uint(&self, k: u64) -> Result<Self, AlgebraError>;
}

impl Coeff for Fp {
    fn is_zero(&self) -> bool {
        Fp::is_zero(*self)
    }
    fn is_one(&self) -> bool {
        self.value() == 1
    }
    fn one_like(&self) -> Self {
        Fp::one(self.modulus())
    }
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul_uint(&self, k: u64) -> Self {
        *self * Fp::from_u64(k % self.modulus(), self.modulus())
    }
    fn div_uint(&self, k: u64) -> Result<Self, AlgebraError> {
        let inv = Fp::from_u64(k % self.modulus(), self.modulus()).inverse()?;
        Ok(*self * inv)
    }
}

impl Coeff for Rat {
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }
    fn one_like(&self) -> Self {
        num_traits::One::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_uint(&self, k: u64) -> Self {
        self * Rat::from_integer(k.into())
    }
    fn div_uint(&self, k: u64) -> Result<Self, AlgebraError> {
        Ok(self / Rat::from_integer(k.into()))
    }
}

fn coeff_pow<C: Coeff>(c: &C, e: u32) -> C {
    debug_assert!(e >= 1);
    let mut acc = c.clone();
    for _ in 1..e {
        acc = acc.mul(c);
    }
    acc
}

/// Invariant: no stored zero coefficients, monomials sorted with
/// exponents >= 1. Equality is therefore structural equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Polynomial { terms }
    }

    pub fn linear(v: Var, c: C) -> Self {
        Polynomial::monomial(&[(v, 1)], c)
    }

    pub fn monomial(pairs: &[(Var, u32)], c: C) -> Self {
        let mut poly = Polynomial::zero();
        poly.add_term(pairs.to_vec(), c);
        poly
    }

    fn add_term(&mut self, pairs: Vec<(Var, u32)>, c: C) {
        if c.is_zero() {
            return;
        }
        let mut mono: Monomial = Vec::with_capacity(pairs.len());
        let mut pairs = pairs;
        pairs.sort_by_key(|&(v, _)| v);
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            match mono.last_mut() {
                Some((last, le)) if *last == v => *le += e,
                _ => mono.push((v, e)),
            }
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_of(&self, mono: &Monomial) -> Option<&C> {
        self.terms.get(mono)
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.terms.get(&Vec::new())
    }

    /// Strip the degree-0 term; generating polynomials are kept
    /// constant-free by convention.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Vec::new());
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(k));
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut pairs = ma.clone();
                pairs.extend_from_slice(mb);
                out.add_term(pairs, ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        debug_assert!(e >= 1, "pow(0) needs a ring context; handle 0 upstream");
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.iter().any(|&(w, _)| w == v))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_affine(&self) -> bool {
        self.total_degree() <= 1
    }

    /// d/dv by the power rule on the free algebra; coefficients may
    /// vanish mod d (for instance d/dq of q^3 over Z_3 is 0).
    pub fn partial_derivative(&self, v: Var) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|&(w, _)| w == v) {
                let e = m[pos].1;
                let mut reduced = m.clone();
                if e == 1 {
                    reduced.remove(pos);
                } else {
                    reduced[pos].1 = e - 1;
                }
                out.add_term(reduced, c.mul_uint(e as u64));
            }
        }
        out
    }

    /// Simultaneous substitution: every variable hit by the map is replaced
    /// in one pass, so the images may freely mention the replaced names.
    pub fn substitute_map(&self, map: &BTreeMap<Var, Polynomial<C>>) -> Self {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            for &(v, e) in m {
                let factor = match map.get(&v) {
                    Some(image) => image.pow_or_one(e, c),
                    None => Polynomial::monomial(&[(v, e)], c.one_like()),
                };
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        out
    }

    fn pow_or_one(&self, e: u32, ctx: &C) -> Self {
        if e == 0 {
            Polynomial::constant(ctx.one_like())
        } else {
            self.pow(e)
        }
    }

    pub fn substitute(&self, v: Var, image: &Polynomial<C>) -> Self {
        let mut map = BTreeMap::new();
        map.insert(v, image.clone());
        self.substitute_map(&map)
    }

    /// Full evaluation; every variable present must get a value.
    pub fn eval(&self, values: &BTreeMap<Var, C>) -> Result<C, AlgebraError>
    where
        C: Coeff,
    {
        let mut acc: Option<C> = None;
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in m {
                let val = values
                    .get(&v)
                    .ok_or_else(|| AlgebraError::MissingVariable(v.default_name()))?;
                term = term.mul(&coeff_pow(val, e));
            }
            acc = Some(match acc {
                Some(a) => a.add(&term),
                None => term,
            });
        }
        match acc {
            Some(a) => Ok(a),
            // A zero polynomial evaluates to zero; synthesize it from any
            // supplied value, or fail if the caller gave no context at all.
            None => values
                .values()
                .next()
                .map(|v| v.sub(v))
                .ok_or_else(|| AlgebraError::MissingVariable("(empty context)".into())),
        }
    }

    /// Render with a caller-chosen variable namer (the CLI drops wire
    /// subscripts for single-wire gates).
    pub fn render_with(&self, namer: impl Fn(&Var) -> String) -> String
    where
        C: fmt::Display,
    {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in &self.terms {
            let mut body = String::new();
            for &(v, e) in m {
                if !body.is_empty() {
                    body.push('*');
                }
                body.push_str(&namer(&v));
                if e > 1 {
                    body.push_str(&format!("^{e}"));
                }
            }
            let coeff_str = c.to_string();
            let (neg, coeff_abs) = match coeff_str.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, coeff_str),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if body.is_empty() {
                out.push_str(&coeff_abs);
            } else if c.is_one() || (neg && coeff_abs == "1") {
                out.push_str(&body);
            } else {
                out.push_str(&coeff_abs);
                out.push('*');
                out.push_str(&body);
            }
        }
        out
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(|v| v.default_name()))
    }
}

/// Convenience constructors for the Z_d case.
impl Polynomial<Fp> {
    pub fn var_mod(v: Var, d: u64) -> Self {
        Polynomial::linear(v, Fp::one(d))
    }

    pub fn const_mod(value: i64, d: u64) -> Self {
        Polynomial::constant(Fp::new(value, d))
    }
}

/// Convenience constructors for the rational case.
impl Polynomial<Rat> {
    pub fn var_rat(v: Var) -> Self {
        Polynomial::linear(v, num_traits::One::one())
    }

    pub fn const_int(value: i64) -> Self {
        Polynomial::constant(Rat::from_integer(value.into()))
    }

    pub fn const_ratio(num: i64, den: i64) -> Self {
        Polynomial::constant(Rat::new(num.into(), den.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: u64) -> Polynomial<Fp> {
        Polynomial::var_mod(Var::In(0), d)
    }

    #[test]
    fn derivative_power_rule() {
        // q^2 + 2q over Z_5 -> 2q + 2.
        let d = 5;
        let p = q(d).pow(2).add(&q(d).scale(&Fp::new(2, d)));
        let expect = q(d)
            .scale(&Fp::new(2, d))
            .add(&Polynomial::const_mod(2, d));
        assert_eq!(p.partial_derivative(Var::In(0)), expect);
    }

    #[test]
    fn derivative_can_vanish_mod_d() {
        // d/dq of q^3 over Z_3 is 3q^2 = 0.
        let p = q(3).pow(3);
        assert!(p.partial_derivative(Var::In(0)).is_zero());
    }

    #[test]
    fn exponents_are_not_collapsed() {
        // q^3 and q stay distinct monomials over Z_3 even though they agree
        // pointwise on the field.
        let p = q(3).pow(3).sub(&q(3));
        assert!(!p.is_zero());
        for x in 0..3 {
            let mut vals = BTreeMap::new();
            vals.insert(Var::In(0), Fp::new(x, 3));
            assert!(p.eval(&vals).unwrap().is_zero());
        }
    }

    #[test]
    fn simultaneous_substitution() {
        // Swap two variables in x*y + x; sequential substitution would not.
        let d = 7;
        let x = Polynomial::var_mod(Var::Free(0), d);
        let y = Polynomial::var_mod(Var::Free(1), d);
        let p = x.mul(&y).add(&x);
        let mut map = BTreeMap::new();
        map.insert(Var::Free(0), y.clone());
        map.insert(Var::Free(1), x.clone());
        let expect = x.mul(&y).add(&y);
        assert_eq!(p.substitute_map(&map), expect);
    }

    #[test]
    fn rational_arithmetic_and_display() {
        let p = Polynomial::var_rat(Var::In(0))
            .pow(2)
            .scale(&Rat::new((-1).into(), 2.into()))
            .add(&Polynomial::var_rat(Var::Out(0)));
        // Terms render in the fixed monomial order: inputs before outputs.
        assert_eq!(p.to_string(), "-1/2*q1^2 + Q1");
    }

    #[test]
    fn display_matches_expected_shapes() {
        let d = 5;
        let g = Polynomial::monomial(&[(Var::In(0), 1), (Var::Out(0), 1)], Fp::one(d));
        assert_eq!(g.to_string(), "q1*Q1");
        let r = q(d)
            .pow(2)
            .scale(&Fp::new(3, d))
            .add(&q(d).scale(&Fp::new(2, d)));
        assert_eq!(r.to_string(), "2*q1 + 3*q1^2");
        assert_eq!(Polynomial::<Fp>::zero().to_string(), "0");
    }

    #[test]
    fn eval_reports_missing_variables() {
        let p = q(5);
        let vals = BTreeMap::new();
        assert!(matches!(
            p.eval(&vals),
            Err(AlgebraError::MissingVariable(_))
        ));
    }
}
