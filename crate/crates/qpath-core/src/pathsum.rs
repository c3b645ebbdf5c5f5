//! The sum-over-paths engine.
//!
//! A circuit is rewritten (via `circuit::label_wires`) into boundary
//! constraints over free parameters x_l, one per Fourier gate, plus a
//! quadratic phase polynomial. A transition amplitude is then the exact
//! cyclotomic sum of chi(phase) over the affine solution set of the
//! constraints, carrying the normalization d^{-(#F)/2}.
//!
//! Two evaluation strategies are provided and must agree bit for bit:
//! full enumeration of the solution set, and a quadratic-sum fast path
//! that eliminates one variable at a time by completing the square. Both
//! compute the same element of the group ring Z[Z_d]: every step of the
//! fast path (affine change of variables, factoring an independent
//! variable out of the sum) is a bijection-preserving identity on the
//! histogram of phase values, so not just the value but the entire count
//! vector matches enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::algebra::{matrix::AffineSolution, CyclotomicAmplitude, Fp, MatFp, Polynomial, Var};
use crate::circuit::{label_wires, CircuitIr, Gate, WireLabeling};

/// Default ceiling on enumerated points.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Environment variable that overrides the enumeration cap.
pub const CAP_ENV_VAR: &str = "QPATH_CAP";

/// Resolve the enumeration cap: explicit argument, then QPATH_CAP, then
/// the built-in default.
pub fn effective_cap(explicit: Option<u64>) -> u64 {
    if let Some(cap) = explicit {
        return cap;
    }
    if let Ok(text) = std::env::var(CAP_ENV_VAR) {
        if let Ok(cap) = text.trim().parse::<u64>() {
            return cap;
        }
    }
    DEFAULT_ENUM_CAP
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum PathSumError {
    #[error(
        "enumeration needs {points} points, above the cap of {cap}; \
         use the quadratic-sum method (gauss) or raise the cap"
    )]
    EnumerationCap { points: u128, cap: u64 },
}

/// The symbolic path-sum form of a circuit.
#[derive(Clone, Debug)]
pub struct PathSumForm {
    pub d: u64,
    pub n: usize,
    pub labeling: WireLabeling,
    /// Quadratic phase polynomial over boundary symbols q0_i and free
    /// parameters x_l.
    pub phase: Polynomial<Fp>,
    /// Number of Fourier gates: the free-parameter count and the
    /// normalization half power.
    pub fourier_count: usize,
}

/// Phase functional from the gate matrix elements: each Fourier gate
/// contributes in*out, each quadratic phase gate 2^{-1} q (q - 1); sums
/// and identities only constrain, never dephase.
pub fn build_phase(ir: &CircuitIr) -> PathSumForm {
    let d = ir.d;
    let labeling = label_wires(ir);
    let half = Fp::half(d);
    let one = Fp::one(d);
    let mut phase = Polynomial::zero();
    for (gate, (ins, outs)) in ir.gates.iter().zip(&labeling.gate_io) {
        match gate {
            Gate::F(_) => {
                phase = phase.add(&ins[0].mul(&outs[0]));
            }
            Gate::R(_) => {
                let q = &ins[0];
                let quad = q.mul(&q.sub(&Polynomial::constant(one))).scale(&half);
                phase = phase.add(&quad);
            }
            Gate::Sum(..) | Gate::Id(_) => {}
        }
    }
    debug_assert!(phase.total_degree() <= 2, "phase must stay quadratic");
    PathSumForm {
        d,
        n: ir.n,
        fourier_count: labeling.free_count,
        labeling,
        phase,
    }
}

/// Solution set of the boundary constraints B(x) = qf given q0, as a
/// particular point plus kernel basis over the free parameters.
/// `None` means the boundary pair is unreachable and the amplitude is 0.
pub fn solve_constraints(
    form: &PathSumForm,
    q0: &[u64],
    qf: &[u64],
) -> Option<AffineSolution> {
    assert_eq!(q0.len(), form.n);
    assert_eq!(qf.len(), form.n);
    let d = form.d;
    let cols = form.labeling.free_count;
    let mut mat = MatFp::zeros(form.n, cols, d);
    let mut rhs = vec![0u64; form.n];
    let q0_map = boundary_values(q0, d);
    for (i, expr) in form.labeling.boundary().iter().enumerate() {
        let at_q0 = expr.substitute_map(&q0_map);
        let mut constant = Fp::zero(d);
        for (mono, coeff) in at_q0.terms() {
            match mono.as_slice() {
                [] => constant = *coeff,
                [(Var::Free(l), 1)] => mat.set(i, *l, coeff.value()),
                other => unreachable!("boundary expressions are affine, got {other:?}"),
            }
        }
        rhs[i] = (Fp::from_u64(qf[i], d) - constant).value();
    }
    mat.solve_affine(&rhs)
}

fn boundary_values(q0: &[u64], d: u64) -> BTreeMap<Var, Polynomial<Fp>> {
    q0.iter()
        .enumerate()
        .map(|(i, &v)| (Var::Q0(i), Polynomial::constant(Fp::from_u64(v, d))))
        .collect()
}

/// Phase with q0 plugged in: a quadratic polynomial in the free parameters.
fn phase_at_q0(form: &PathSumForm, q0: &[u64]) -> Polynomial<Fp> {
    form.phase.substitute_map(&boundary_values(q0, form.d))
}

/// Compiled evaluator over the free parameters, for the enumeration loop.
struct CompiledPhase {
    d: u64,
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl CompiledPhase {
    fn new(poly: &Polynomial<Fp>, d: u64) -> Self {
        let terms = poly
            .terms()
            .map(|(mono, coeff)| {
                let factors = mono
                    .iter()
                    .map(|&(v, e)| match v {
                        Var::Free(l) => (l, e),
                        other => unreachable!("phase must be over free parameters, got {other}"),
                    })
                    .collect();
                (coeff.value(), factors)
            })
            .collect();
        CompiledPhase { d, terms }
    }

    fn eval(&self, x: &[u64]) -> u64 {
        let d = self.d;
        let mut total = 0u64;
        for (coeff, factors) in &self.terms {
            let mut term = *coeff;
            for &(l, e) in factors {
                for _ in 0..e {
                    term = term * x[l] % d;
                }
            }
            total = (total + term) % d;
        }
        total
    }
}

/// Exact amplitude by enumerating the whole solution set.
pub fn amplitude_enumerate(
    form: &PathSumForm,
    q0: &[u64],
    qf: &[u64],
    cap: u64,
) -> Result<CyclotomicAmplitude, PathSumError> {
    let d = form.d;
    let half_power = form.fourier_count as i64;
    let Some(sol) = solve_constraints(form, q0, qf) else {
        return Ok(CyclotomicAmplitude::zero(d, half_power));
    };
    let dim = sol.basis.len();
    let points = (d as u128)
        .checked_pow(dim as u32)
        .unwrap_or(u128::MAX);
    if points > cap as u128 {
        return Err(PathSumError::EnumerationCap { points, cap });
    }
    let compiled = CompiledPhase::new(&phase_at_q0(form, q0), d);
    let cols = form.labeling.free_count;
    let mut amp = CyclotomicAmplitude::zero(d, half_power);

    // Walk t in mixed-radix order, updating x = particular + B t
    // incrementally: when digit k is the one that steps (all lower digits
    // wrapping d-1 -> 0), x gains b_k + sum_{i<k} b_i, because each wrapped
    // digit contributes -(d-1) = +1 times its basis vector.
    let mut prefix: Vec<Vec<u64>> = Vec::with_capacity(dim);
    let mut acc = vec![0u64; cols];
    for b in &sol.basis {
        for (a, &v) in acc.iter_mut().zip(b) {
            *a = (*a + v) % d;
        }
        prefix.push(acc.clone());
    }
    let mut x = sol.particular.clone();
    let mut t = vec![0u64; dim];
    loop {
        amp.tally(compiled.eval(&x));
        let mut k = 0;
        while k < dim {
            t[k] += 1;
            if t[k] < d {
                break;
            }
            t[k] = 0;
            k += 1;
        }
        if k == dim {
            break;
        }
        for (xi, &pi) in x.iter_mut().zip(&prefix[k]) {
            *xi = (*xi + pi) % d;
        }
    }
    Ok(amp)
}

/// Histogram of a*x^2 over x in Z_d, cached per residue class.
fn gauss_histogram(a: u64, d: u64) -> CyclotomicAmplitude {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let counts = {
        let mut guard = cache.lock().expect("gauss cache");
        guard
            .entry((a % d, d))
            .or_insert_with(|| {
                let mut counts = vec![0i64; d as usize];
                for x in 0..d {
                    counts[(a * x % d * x % d) as usize] += 1;
                }
                counts
            })
            .clone()
    };
    CyclotomicAmplitude::from_counts(d, counts, 0)
}

/// Exact amplitude by completing the square, one variable at a time.
///
/// No enumeration and no cap: each quadratic variable is absorbed into a
/// quadratic Gauss-sum factor, mixed products with all-zero diagonal are
/// split hyperbolically, and leftover linear variables contribute their
/// full character orbit. The result equals `amplitude_enumerate` exactly.
pub fn amplitude_gauss_sum(
    form: &PathSumForm,
    q0: &[u64],
    qf: &[u64],
) -> Result<CyclotomicAmplitude, PathSumError> {
    let d = form.d;
    let half_power = form.fourier_count as i64;
    let Some(sol) = solve_constraints(form, q0, qf) else {
        return Ok(CyclotomicAmplitude::zero(d, half_power));
    };
    let dim = sol.basis.len();

    // Restrict the phase to the solution set: x_l = particular_l +
    // sum_i t_i basis_i[l], with fresh summation variables t_i.
    let mut images: BTreeMap<Var, Polynomial<Fp>> = BTreeMap::new();
    for l in 0..form.labeling.free_count {
        let mut expr = Polynomial::constant(Fp::from_u64(sol.particular[l], d));
        for (i, basis) in sol.basis.iter().enumerate() {
            let coeff = Fp::from_u64(basis[l], d);
            expr = expr.add(&Polynomial::linear(Var::Aux(i), coeff));
        }
        images.insert(Var::Free(l), expr);
    }
    let mut poly = phase_at_q0(form, q0).substitute_map(&images);

    let mut active: BTreeSet<Var> = (0..dim).map(Var::Aux).collect();
    let mut fresh = dim;
    let mut amp = CyclotomicAmplitude::from_counts(
        d,
        {
            let mut c = vec![0i64; d as usize];
            c[0] = 1;
            c
        },
        half_power,
    );

    loop {
        // Prefer a variable with a live diagonal term.
        let square = active.iter().copied().find_map(|v| {
            poly.coeff_of(&vec![(v, 2)])
                .copied()
                .filter(|a| !a.is_zero())
                .map(|a| (v, a))
        });
        if let Some((v, a)) = square {
            // phase = a v^2 + v L(rest) + rest; substituting the bijection
            // v -> v - (2a)^{-1} L leaves a v'^2 + rest - (4a)^{-1} L^2.
            let two = Fp::new(2, d);
            let lv = poly
                .partial_derivative(v)
                .sub(&Polynomial::linear(v, two * a));
            let quarter =
                (two * two * a).inverse().expect("4a nonzero in odd prime field");
            poly = poly
                .substitute(v, &Polynomial::zero())
                .sub(&lv.pow(2).scale(&quarter));
            active.remove(&v);
            amp = amp.mul(&gauss_histogram(a.value(), d));
            continue;
        }
        // All-zero diagonal: split the first surviving cross term
        // t_i t_j via t_i = u + w, t_j = u - w (a bijection since 2
        // is invertible), which creates diagonal entries.
        let cross = poly.terms().find_map(|(mono, coeff)| match mono.as_slice() {
            [(vi, 1), (vj, 1)] if !coeff.is_zero() => Some((*vi, *vj)),
            _ => None,
        });
        let Some((vi, vj)) = cross else {
            break;
        };
        let u = Var::Aux(fresh);
        let w = Var::Aux(fresh + 1);
        fresh += 2;
        let one = Fp::one(d);
        let mut split = BTreeMap::new();
        split.insert(
            vi,
            Polynomial::linear(u, one).add(&Polynomial::linear(w, one)),
        );
        split.insert(
            vj,
            Polynomial::linear(u, one).sub(&Polynomial::linear(w, one)),
        );
        poly = poly.substitute_map(&split);
        active.remove(&vi);
        active.remove(&vj);
        active.insert(u);
        active.insert(w);
    }

    debug_assert!(poly.total_degree() <= 1, "all quadratics eliminated");

    // Remaining variables are decoupled and linear: an absent variable
    // contributes a full factor d at phase 0, a present one contributes
    // its character orbit, one hit per residue.
    for v in active {
        let coeff = poly
            .coeff_of(&vec![(v, 1)])
            .copied()
            .unwrap_or_else(|| Fp::zero(d));
        if coeff.is_zero() {
            amp = amp.scale_counts(d as i64);
        } else {
            amp = amp.mul(&CyclotomicAmplitude::from_counts(
                d,
                vec![1; d as usize],
                0,
            ));
            poly = poly.substitute(v, &Polynomial::zero());
        }
    }
    let shift = poly
        .constant_term()
        .map(|c| c.value() as i64)
        .unwrap_or(0);
    Ok(amp.shift_chi(shift))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    Enumerate,
    Gauss,
}

pub fn amplitude(
    form: &PathSumForm,
    q0: &[u64],
    qf: &[u64],
    method: Method,
    cap: u64,
) -> Result<CyclotomicAmplitude, PathSumError> {
    match method {
        Method::Enumerate => amplitude_enumerate(form, q0, qf, cap),
        Method::Gauss => amplitude_gauss_sum(form, q0, qf),
    }
}

/// All transition amplitudes out of q0, in mixed-radix order of qf.
pub fn amplitude_row(
    form: &PathSumForm,
    q0: &[u64],
    method: Method,
    cap: u64,
) -> Result<Vec<(Vec<u64>, CyclotomicAmplitude)>, PathSumError> {
    let d = form.d;
    let total = (d as usize).pow(form.n as u32);
    let mut row = Vec::with_capacity(total);
    for idx in 0..total {
        let qf = crate::densesim::unpack(idx, d, form.n);
        let amp = amplitude(form, q0, &qf, method, cap)?;
        row.push((qf, amp));
    }
    Ok(row)
}

/// Exact unitarity of one row: sum over qf of |A|^2 must equal 1, checked
/// in cyclotomic integer arithmetic, no floats involved.
pub fn row_is_unit_norm(
    form: &PathSumForm,
    q0: &[u64],
    method: Method,
    cap: u64,
) -> Result<bool, PathSumError> {
    let row = amplitude_row(form, q0, method, cap)?;
    let d = form.d;
    let mut total = CyclotomicAmplitude::zero(d, 2 * form.fourier_count as i64);
    for (_, amp) in &row {
        total = total
            .add(&amp.abs_squared())
            .expect("all row amplitudes share one normalization");
    }
    let full_power = (d as i64)
        .checked_pow(form.fourier_count as u32)
        .expect("normalization fits in i64");
    Ok(total.cyclotomic_part_equals_integer(full_power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use approx::assert_abs_diff_eq;

    fn form(text: &str) -> PathSumForm {
        build_phase(&parse_circuit(text).unwrap())
    }

    #[test]
    fn phase_of_double_fourier() {
        // [F, F] over Z_3: phase = q0_1 x1 + x1 x2.
        let f = form("d 3\nn 1\nF 0\nF 0\n");
        let d = 3;
        let q01 = Polynomial::var_mod(Var::Q0(0), d);
        let x1 = Polynomial::var_mod(Var::Free(0), d);
        let x2 = Polynomial::var_mod(Var::Free(1), d);
        assert_eq!(f.phase, q01.mul(&x1).add(&x1.mul(&x2)));
        assert_eq!(f.fourier_count, 2);
    }

    #[test]
    fn sums_and_identities_add_no_phase() {
        let f = form("d 3\nn 2\nF 0\nSUM 0 1\nID 1\n");
        let q01 = Polynomial::var_mod(Var::Q0(0), 3);
        let x1 = Polynomial::var_mod(Var::Free(0), 3);
        assert_eq!(f.phase, q01.mul(&x1));
    }

    #[test]
    fn solve_pins_the_last_parameter() {
        // [F, F] with q0 = 1, qf = 2: constraint x2 = 2, x1 free.
        let f = form("d 3\nn 1\nF 0\nF 0\n");
        let sol = solve_constraints(&f, &[1], &[2]).unwrap();
        assert_eq!(sol.particular, vec![0, 2]);
        assert_eq!(sol.basis, vec![vec![1, 0]]);
    }

    #[test]
    fn solve_detects_unreachable_boundaries() {
        // A bare SUM is a permutation: only one qf is reachable.
        let f = form("d 3\nn 2\nSUM 0 1\n");
        assert!(solve_constraints(&f, &[1, 1], &[1, 2]).is_some());
        assert!(solve_constraints(&f, &[1, 1], &[1, 0]).is_none());
        let amp = amplitude_enumerate(&f, &[1, 1], &[1, 0], DEFAULT_ENUM_CAP).unwrap();
        assert!(amp.is_zero());
        assert_eq!(amp.half_power(), 0);
    }

    #[test]
    fn single_fourier_amplitude() {
        // <2| F |1> = chi(2)/sqrt(3).
        let f = form("d 3\nn 1\nF 0\n");
        let amp = amplitude_enumerate(&f, &[1], &[2], DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(amp.counts(), &[0, 0, 1]);
        assert_eq!(amp.half_power(), 1);
        let z = amp.to_complex();
        assert_abs_diff_eq!(z.re, -0.5 / 3f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(z.im, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn double_fourier_is_parity() {
        // F^2 |1> = |-1> = |2> over Z_3.
        let f = form("d 3\nn 1\nF 0\nF 0\n");
        for qf in 0..3u64 {
            let amp = amplitude_enumerate(&f, &[1], &[qf], DEFAULT_ENUM_CAP).unwrap();
            let z = amp.to_complex();
            let expect = if qf == 2 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(z.re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn phase_gate_amplitude_is_a_pure_phase() {
        // <2| R |2> = chi(2^{-1} * 2 * 1) = chi(1) over Z_3.
        let f = form("d 3\nn 1\nR 0\n");
        let amp = amplitude_enumerate(&f, &[2], &[2], DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(amp.counts(), &[0, 1, 0]);
        assert_eq!(amp.half_power(), 0);
        assert!(amplitude_enumerate(&f, &[2], &[1], DEFAULT_ENUM_CAP)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn gauss_path_matches_enumeration_bit_for_bit() {
        // Includes a case whose value is zero but whose histogram is the
        // full orbit [1,1,1], which the fast path must reproduce exactly.
        let f = form("d 3\nn 1\nF 0\nF 0\n");
        for q0 in 0..3u64 {
            for qf in 0..3u64 {
                let slow = amplitude_enumerate(&f, &[q0], &[qf], DEFAULT_ENUM_CAP).unwrap();
                let fast = amplitude_gauss_sum(&f, &[q0], &[qf]).unwrap();
                assert_eq!(slow, fast, "q0={q0} qf={qf}");
            }
        }
        let zero_case = amplitude_gauss_sum(&f, &[1], &[0]).unwrap();
        assert_eq!(zero_case.counts(), &[1, 1, 1]);
    }

    #[test]
    fn gauss_path_handles_quadratic_phases() {
        // F R F produces a genuine quadratic in the free parameters.
        let f = form("d 5\nn 1\nF 0\nR 0\nF 0\n");
        for q0 in 0..5u64 {
            for qf in 0..5u64 {
                let slow = amplitude_enumerate(&f, &[q0], &[qf], DEFAULT_ENUM_CAP).unwrap();
                let fast = amplitude_gauss_sum(&f, &[q0], &[qf]).unwrap();
                assert_eq!(slow, fast, "q0={q0} qf={qf}");
            }
        }
    }

    #[test]
    fn gauss_path_handles_hyperbolic_cross_terms() {
        // Two Fourier gates coupled through a SUM leave a pure cross term
        // x1 x2 when the diagonal vanishes.
        let f = form("d 5\nn 2\nF 0\nF 1\nSUM 0 1\nF 0\nF 1\n");
        for q0 in [[0u64, 0], [1, 2], [4, 3]] {
            for qf in [[0u64, 0], [2, 2], [3, 1]] {
                let slow = amplitude_enumerate(&f, &q0, &qf, DEFAULT_ENUM_CAP).unwrap();
                let fast = amplitude_gauss_sum(&f, &q0, &qf).unwrap();
                assert_eq!(slow, fast, "q0={q0:?} qf={qf:?}");
            }
        }
    }

    #[test]
    fn enumeration_cap_points_at_the_fast_path() {
        let f = form("d 3\nn 1\nF 0\nF 0\nF 0\nF 0\n");
        let err = amplitude_enumerate(&f, &[0], &[0], 2).unwrap_err();
        match &err {
            PathSumError::EnumerationCap { points, cap } => {
                assert!(*points > 2);
                assert_eq!(*cap, 2);
            }
        }
        assert!(err.to_string().contains("gauss"));
    }

    #[test]
    fn cap_resolution_order() {
        assert_eq!(effective_cap(Some(42)), 42);
        // No env var set in tests: default applies.
        if std::env::var(CAP_ENV_VAR).is_err() {
            assert_eq!(effective_cap(None), DEFAULT_ENUM_CAP);
        }
    }

    #[test]
    fn sum_row_is_a_permutation_row() {
        let f = form("d 3\nn 2\nSUM 0 1\n");
        let row = amplitude_row(&f, &[1, 1], Method::Enumerate, DEFAULT_ENUM_CAP).unwrap();
        for (qf, amp) in row {
            let expect = qf == vec![1, 2];
            assert_eq!(!amp.is_zero(), expect, "qf={qf:?}");
        }
    }

    #[test]
    fn rows_have_exact_unit_norm() {
        for text in [
            "d 3\nn 1\nF 0\nR 0\nF 0\n",
            "d 5\nn 2\nF 0\nSUM 0 1\nR 1\nF 1\n",
            "d 7\nn 1\nF 0\nF 0\nR 0\n",
        ] {
            let f = form(text);
            let q0: Vec<u64> = vec![1; f.n];
            assert!(row_is_unit_norm(&f, &q0, Method::Gauss, DEFAULT_ENUM_CAP).unwrap());
        }
    }
}
