//! Formal differential calculus over the polynomial algebra in the
//! phase-space coordinates q^(i), p^(i).
//!
//! Everything is computable content: forms are finite sums of polynomial
//! coefficients times strictly increasing wedge products of the generators
//! dq^(1..n), dp^(1..n). The exterior derivative uses formal partial
//! derivatives, so d respects the Leibniz rule, kills scalars, and squares
//! to zero. Symbols other than q^(i), p^(i) (gate parameters, boundary
//! names) are treated as scalars.

use std::collections::BTreeMap;
use std::fmt;

use super::poly::{Coeff, Polynomial, Var};
use super::AlgebraError;

/// One generator of the exterior algebra. The derived order puts every
/// dq before every dp, matching the fixed generator ordering.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Gen {
    Dq(usize),
    Dp(usize),
}

impl Gen {
    pub fn base_var(self) -> Var {
        match self {
            Gen::Dq(i) => Var::In(i),
            Gen::Dp(i) => Var::PIn(i),
        }
    }

    fn from_var(v: Var) -> Option<Gen> {
        match v {
            Var::In(i) => Some(Gen::Dq(i)),
            Var::PIn(i) => Some(Gen::Dp(i)),
            _ => None,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Dq(i) => write!(f, "dq{}", i + 1),
            Gen::Dp(i) => write!(f, "dp{}", i + 1),
        }
    }
}

/// Invariant: keys are strictly increasing generator lists (a repeated
/// generator annihilates the term) and no coefficient polynomial is zero.
/// Signs from reordering are absorbed into the coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DifferentialForm<C: Coeff> {
    terms: BTreeMap<Vec<Gen>, Polynomial<C>>,
}

impl<C: Coeff> DifferentialForm<C> {
    pub fn zero() -> Self {
        DifferentialForm {
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn from_poly(poly: Polynomial<C>) -> Self {
        let mut form = DifferentialForm::zero();
        form.add_term(Vec::new(), poly);
        form
    }

    /// poly * (single generator), the building block for 1-forms.
    pub fn one_form_term(gen: Gen, poly: Polynomial<C>) -> Self {
        let mut form = DifferentialForm::zero();
        form.add_term(vec![gen], poly);
        form
    }

    fn add_term(&mut self, gens: Vec<Gen>, poly: Polynomial<C>) {
        if poly.is_zero() {
            return;
        }
        let Some((sorted, sign_flip)) = sort_generators(gens) else {
            return; // repeated generator: term vanishes
        };
        let poly = if sign_flip { poly.neg() } else { poly };
        match self.terms.get_mut(&sorted) {
            Some(existing) => {
                let sum = existing.add(&poly);
                if sum.is_zero() {
                    self.terms.remove(&sorted);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(sorted, poly);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Gen>, &Polynomial<C>)> {
        self.terms.iter()
    }

    /// The coefficient polynomial carried by a single generator.
    pub fn component(&self, gen: Gen) -> Polynomial<C> {
        self.terms
            .get(&vec![gen])
            .cloned()
            .unwrap_or_else(Polynomial::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (g, p) in &rhs.terms {
            out.add_term(g.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        DifferentialForm {
            terms: self
                .terms
                .iter()
                .map(|(g, p)| (g.clone(), p.neg()))
                .collect(),
        }
    }

    pub fn wedge(&self, rhs: &Self) -> Self {
        let mut out = DifferentialForm::zero();
        for (ga, pa) in &self.terms {
            for (gb, pb) in &rhs.terms {
                let mut gens = ga.clone();
                gens.extend_from_slice(gb);
                out.add_term(gens, pa.mul(pb));
            }
        }
        out
    }

    /// Exterior derivative. Antisymmetry and d(scalar) = 0 are built in;
    /// together with the formal power rule this gives d(d(.)) = 0.
    pub fn exterior_derivative(&self) -> Self {
        let mut out = DifferentialForm::zero();
        for (gens, poly) in &self.terms {
            for v in poly.vars() {
                let Some(g) = Gen::from_var(v) else {
                    continue; // parameters and boundary symbols are scalars
                };
                let partial = poly.partial_derivative(v);
                if partial.is_zero() {
                    continue;
                }
                let mut new_gens = vec![g];
                new_gens.extend_from_slice(gens);
                out.add_term(new_gens, partial);
            }
        }
        out
    }

    /// True degree-1 form: every term a single generator.
    pub fn is_one_form(&self) -> bool {
        self.terms.keys().all(|g| g.len() == 1)
    }
}

/// d of a 0-form as a 1-form.
pub fn d_of_poly<C: Coeff>(poly: &Polynomial<C>) -> DifferentialForm<C> {
    DifferentialForm::from_poly(poly.clone()).exterior_derivative()
}

/// Sort a generator word, tracking the permutation sign.
/// None when a generator repeats.
fn sort_generators(mut gens: Vec<Gen>) -> Option<(Vec<Gen>, bool)> {
    let mut swaps = 0usize;
    // Insertion sort; words are tiny and we need the exact inversion count.
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j - 1] > gens[j] {
            gens.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if gens.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((gens, swaps % 2 == 1))
}

/// The tautological 1-form sum_i p_i dq_i over n wires.
pub fn theta<C: Coeff>(n: usize, one: &C) -> DifferentialForm<C> {
    let mut form = DifferentialForm::zero();
    for i in 0..n {
        form = form.add(&DifferentialForm::one_form_term(
            Gen::Dq(i),
            Polynomial::linear(Var::PIn(i), one.clone()),
        ));
    }
    form
}

/// The symplectic 2-form sum_i dq_i ^ dp_i.
pub fn omega<C: Coeff>(n: usize, one: &C) -> DifferentialForm<C> {
    let mut form = DifferentialForm::zero();
    for i in 0..n {
        let dq = DifferentialForm::one_form_term(
            Gen::Dq(i),
            Polynomial::constant(one.clone()),
        );
        let dp = DifferentialForm::one_form_term(
            Gen::Dp(i),
            Polynomial::constant(one.clone()),
        );
        form = form.add(&dq.wedge(&dp));
    }
    form
}

/// Antiderivative of a closed 1-form, normalized to have no constant term.
///
/// Works one generator at a time: integrate the lowest surviving component,
/// subtract its differential, repeat. Closedness guarantees the remainder
/// sheds each variable as it goes. Over Z_d the antiderivative can hit a
/// division by the exponent d; such forms are closed but not exact and are
/// reported as errors, never silently mangled.
pub fn integrate_exact_one_form<C: Coeff>(
    form: &DifferentialForm<C>,
) -> Result<Polynomial<C>, AlgebraError> {
    if !form.is_one_form() {
        return Err(AlgebraError::NotClosed);
    }
    if !form.exterior_derivative().is_zero() {
        return Err(AlgebraError::NotClosed);
    }
    let mut remaining = form.clone();
    let mut result = Polynomial::zero();
    // Each pass eliminates the lowest remaining generator; 4n passes is
    // already generous, so a stuck loop means the form was not closed.
    let mut guard = 0;
    while !remaining.is_zero() {
        guard += 1;
        if guard > 4096 {
            return Err(AlgebraError::NotClosed);
        }
        let (gens, poly) = remaining.terms().next().expect("nonzero form");
        let gen = gens[0];
        let piece = antiderivative(poly, gen.base_var())?;
        result = result.add(&piece);
        remaining = remaining.sub(&d_of_poly(&piece));
    }
    Ok(result)
}

/// Term-wise antiderivative in a single variable.
fn antiderivative<C: Coeff>(poly: &Polynomial<C>, v: Var) -> Result<Polynomial<C>, AlgebraError> {
    let mut out = Polynomial::zero();
    for (mono, coeff) in poly.terms() {
        let e = mono
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0);
        let scaled = coeff.div_uint((e + 1) as u64).map_err(|err| match err {
            AlgebraError::DivisionByZero(d) => AlgebraError::NotExact {
                exponent: e + 1,
                divisor: (e as u64 + 1) % d,
                modulus: d,
            },
            other => other,
        })?;
        let mut pairs: Vec<(Var, u32)> = mono.clone();
        match pairs.iter_mut().find(|(w, _)| *w == v) {
            Some(pair) => pair.1 += 1,
            None => pairs.push((v, 1)),
        }
        out = out.add(&Polynomial::monomial(&pairs, scaled));
    }
    Ok(out)
}
