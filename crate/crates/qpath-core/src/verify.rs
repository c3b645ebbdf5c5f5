//! Verification campaigns: seeded, parallel sweeps that check each layer
//! of the engine against an independent witness, from the dense-matrix
//! oracle up to the symbolic continuous-variable identities.
//!
//! Every campaign is deterministic given its seed: case k draws from its
//! own PRNG stream, so a failure report names the exact case to replay.
//! Failures carry a human-readable detail string; an empty failure list
//! is the pass condition. Aggregation is order-stable in the case index.

use std::time::Instant;

use rayon::prelude::*;

use crate::action::{
    action_defect, gate_generating_function, verify_phase_is_action,
};
use crate::algebra::{DifferentialForm, Fp, Gen, Polynomial, Var};
use crate::algebra::forms::{d_of_poly, integrate_exact_one_form, omega, theta};
use crate::circuit::{CircuitIr, Gate};
use crate::cv::{
    cv_check_generating_relation, cv_phase_functional, cv_verify_main, CvCircuit, CvGate,
};
use crate::densesim::{
    circuit_unitary, dense_amplitude, gate_matrix, is_balanced, DenseMatrix, DENSE_DIM_CAP,
};
use crate::pathsum::{
    amplitude_enumerate, amplitude_gauss_sum, amplitude_row, build_phase, effective_cap,
    row_is_unit_norm, Method,
};
use crate::phasespace::{
    circuit_symplectomorphism, covariance_residual, gate_symplectomorphism, j_matrix,
    recover_symplectomorphism, wigner_transform,
};
use crate::random::{case_rng, rand_below, random_circuit, random_cv_circuit, random_density, random_point};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct CaseFailure {
    pub case: u64,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct CampaignOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub elapsed_ms: u128,
    pub failures: Vec<CaseFailure>,
}

impl CampaignOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn run_campaign<F>(name: &'static str, cases: usize, f: F) -> CampaignOutcome
where
    F: Fn(u64) -> Result<(), String> + Sync + Send,
{
    let start = Instant::now();
    let failures: Vec<CaseFailure> = (0..cases as u64)
        .into_par_iter()
        .map(|case| f(case).err().map(|detail| CaseFailure { case, detail }))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    CampaignOutcome {
        name,
        cases,
        elapsed_ms: start.elapsed().as_millis(),
        failures,
    }
}

fn one_line(ir: &CircuitIr) -> String {
    ir.to_text().trim_end().replace('\n', "; ")
}

/// Circuit and endpoint pairs for one oracle case; shared verbatim by the
/// dense-oracle and the exactness campaigns so they exercise identical
/// inputs.
fn oracle_case(seed: u64, case: u64) -> (CircuitIr, Vec<(Vec<u64>, Vec<u64>)>) {
    let mut rng = case_rng(seed, case);
    let d = [3u64, 5, 7][(case % 3) as usize];
    let n = 1 + rand_below(&mut rng, 3) as usize;
    let ir = random_circuit(&mut rng, d, n, 8);
    let pairs = (0..10)
        .map(|_| (random_point(&mut rng, d, n), random_point(&mut rng, d, n)))
        .collect();
    (ir, pairs)
}

/// Path-sum amplitudes against the dense state-vector oracle, |diff| <=
/// 1e-9 on every endpoint pair.
pub fn oracle_campaign(seed: u64, count: usize) -> CampaignOutcome {
    run_campaign("oracle", count, move |case| {
        let (ir, pairs) = oracle_case(seed, case);
        let form = build_phase(&ir);
        let cap = effective_cap(None);
        for (q0, qf) in &pairs {
            let fast = amplitude_gauss_sum(&form, q0, qf)
                .map_err(|e| format!("[{}] {e}", one_line(&ir)))?
                .to_complex();
            let dense = dense_amplitude(&ir, q0, qf, DENSE_DIM_CAP)
                .map_err(|e| format!("[{}] {e}", one_line(&ir)))?;
            let diff = (fast - dense).norm();
            if diff > 1e-9 {
                return Err(format!(
                    "[{}] q0={q0:?} qf={qf:?}: |pathsum - dense| = {diff:.3e}",
                    one_line(&ir)
                ));
            }
        }
        let _ = cap;
        Ok(())
    })
}

/// The quadratic-sum fast path must reproduce the enumeration histogram
/// bit-exactly (same counts, same normalization power) on the very same
/// campaign as the dense oracle.
pub fn gauss_exactness_campaign(seed: u64, count: usize) -> CampaignOutcome {
    run_campaign("gauss-exactness", count, move |case| {
        let (ir, pairs) = oracle_case(seed, case);
        check_gauss_matches_enumeration(&ir, &pairs)
    })
}

/// Same exactness check pushed to d in {11, 13} (n <= 2, <= 6 gates, so
/// full enumeration stays under the default cap).
pub fn gauss_extension_campaign(seed: u64, count: usize) -> CampaignOutcome {
    run_campaign("gauss-extension", count, move |case| {
        let mut rng = case_rng(seed.wrapping_add(0x9e37_79b9), case);
        let d = if case % 2 == 0 { 11 } else { 13 };
        let n = 1 + rand_below(&mut rng, 2) as usize;
        let ir = random_circuit(&mut rng, d, n, 6);
        let pairs: Vec<_> = (0..10)
            .map(|_| (random_point(&mut rng, d, n), random_point(&mut rng, d, n)))
            .collect();
        check_gauss_matches_enumeration(&ir, &pairs)
    })
}

fn check_gauss_matches_enumeration(
    ir: &CircuitIr,
    pairs: &[(Vec<u64>, Vec<u64>)],
) -> Result<(), String> {
    let form = build_phase(ir);
    let cap = effective_cap(None);
    for (q0, qf) in pairs {
        let slow = amplitude_enumerate(&form, q0, qf, cap)
            .map_err(|e| format!("[{}] {e}", one_line(ir)))?;
        let fast = amplitude_gauss_sum(&form, q0, qf)
            .map_err(|e| format!("[{}] {e}", one_line(ir)))?;
        if slow != fast {
            return Err(format!(
                "[{}] q0={q0:?} qf={qf:?}: enumerate {slow} != gauss {fast}",
                one_line(ir)
            ));
        }
    }
    Ok(())
}

/// Exact polynomial equality of the path-sum phase and the classical
/// action, `count` random circuits for each d in {3, 5, 7}.
pub fn main_disc_campaign(seed: u64, count_per_d: usize) -> CampaignOutcome {
    let dims = [3u64, 5, 7];
    run_campaign("main-disc", count_per_d * dims.len(), move |case| {
        let d = dims[case as usize / count_per_d];
        let mut rng = case_rng(seed, case);
        let n = 1 + rand_below(&mut rng, 3) as usize;
        let ir = random_circuit(&mut rng, d, n, 8);
        match verify_phase_is_action(&ir) {
            Ok(true) => Ok(()),
            Ok(false) => Err(format!("[{}] phase != action", one_line(&ir))),
            Err(e) => Err(format!("[{}] {e}", one_line(&ir))),
        }
    })
}

/// The reconstructed generating functions of the four gates against their
/// closed forms, for d in {3, 5, 7, 11}.
pub fn genfun_forms_campaign() -> CampaignOutcome {
    let dims = [3u64, 5, 7, 11];
    let gates = [Gate::F(0), Gate::R(0), Gate::Sum(0, 1), Gate::Id(0)];
    run_campaign("genfun-forms", dims.len() * gates.len(), move |case| {
        let d = dims[case as usize / gates.len()];
        let gate = gates[case as usize % gates.len()].clone();
        let got = gate_generating_function(&gate, d).map_err(|e| e.to_string())?;
        let expect = match gate {
            Gate::F(_) => {
                Polynomial::monomial(&[(Var::In(0), 1), (Var::Out(0), 1)], Fp::one(d))
            }
            Gate::R(_) => {
                let q = Polynomial::var_mod(Var::In(0), d);
                let half = Fp::new(2, d).inverse().expect("odd prime");
                q.mul(&q.sub(&Polynomial::const_mod(1, d))).scale(&half)
            }
            Gate::Sum(..) | Gate::Id(_) => Polynomial::zero(),
        };
        if got == expect {
            Ok(())
        } else {
            Err(format!("{gate} at d={d}: got {got}, expected {expect}"))
        }
    })
}

/// For every endpoint pair with classical trajectories, the action on the
/// trajectories is a single value exceeding the whole-circuit generating
/// function by one constant shared across ALL endpoint pairs of the case.
pub fn actclasstraj_campaign(seed: u64, count: usize) -> CampaignOutcome {
    run_campaign("actclasstraj", count, move |case| {
        let mut rng = case_rng(seed, case);
        let d = [3u64, 5][(case % 2) as usize];
        let n = 1 + rand_below(&mut rng, 2) as usize;
        let ir = random_circuit(&mut rng, d, n, 6);
        let dim = (d as usize).pow(n as u32);
        let mut constant: Option<Fp> = None;
        let mut seen = 0usize;
        for a in 0..dim {
            for b in 0..dim {
                let q0 = crate::densesim::unpack(a, d, n);
                let qn = crate::densesim::unpack(b, d, n);
                match action_defect(&ir, &q0, &qn) {
                    Ok(None) => {}
                    Ok(Some(c)) => {
                        seen += 1;
                        match constant {
                            None => constant = Some(c),
                            Some(prev) if prev != c => {
                                return Err(format!(
                                    "[{}] defect changed from {prev} to {c} at q0={q0:?} qn={qn:?}",
                                    one_line(&ir)
                                ));
                            }
                            _ => {}
                        }
                    }
                    Err(e) => {
                        return Err(format!(
                            "[{}] q0={q0:?} qn={qn:?}: {e}",
                            one_line(&ir)
                        ))
                    }
                }
            }
        }
        if seen == 0 {
            return Err(format!(
                "[{}] no endpoint pair has a classical trajectory",
                one_line(&ir)
            ));
        }
        Ok(())
    })
}

fn covariance_case_table() -> Vec<(u64, Gate, usize)> {
    let mut table = Vec::new();
    for d in [3u64, 5] {
        for (gate, n) in [
            (Gate::F(0), 1usize),
            (Gate::R(0), 1),
            (Gate::Id(0), 1),
            (Gate::F(1), 2),
            (Gate::R(1), 2),
            (Gate::Id(0), 2),
            (Gate::Sum(0, 1), 2),
            (Gate::Sum(1, 0), 2),
        ] {
            table.push((d, gate, n));
        }
    }
    table
}

/// Wigner covariance of each generator (including two-wire embeddings)
/// against `rho_count` random density operators, residual <= 1e-10.
pub fn covariance_campaign(seed: u64, rho_count: usize) -> CampaignOutcome {
    let table = covariance_case_table();
    run_campaign("covariance", table.len(), move |case| {
        let (d, gate, n) = table[case as usize].clone();
        let mut rng = case_rng(seed, case);
        let ir = CircuitIr::new(d, n, vec![gate.clone()]).expect("valid single-gate circuit");
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).map_err(|e| e.to_string())?;
        let map = gate_symplectomorphism(&gate, n, d);
        let dim = (d as usize).pow(n as u32);
        for rho_idx in 0..rho_count {
            let rho = random_density(&mut rng, dim);
            let residual = covariance_residual(&u, &map, &rho).map_err(|e| e.to_string())?;
            if residual > 1e-10 {
                return Err(format!(
                    "{gate} at d={d} n={n}, density {rho_idx}: residual {residual:.3e}"
                ));
            }
        }
        Ok(())
    })
}

/// The Wigner function of |q0><q0| is exactly the uniform distribution
/// 1/d^n on the line of constant position, within 1e-12.
pub fn wigner_line_campaign() -> CampaignOutcome {
    let combos = [(3u64, 1usize), (3, 2), (5, 1), (5, 2)];
    run_campaign("wigner-line", combos.len(), move |case| {
        let (d, n) = combos[case as usize];
        let dim = (d as usize).pow(n as u32);
        for q_idx in 0..dim {
            let q0 = crate::densesim::unpack(q_idx, d, n);
            let mut rho = DenseMatrix::zeros(dim);
            rho.set(q_idx, q_idx, Complex64::new(1.0, 0.0));
            let w = wigner_transform(&rho, d, n).map_err(|e| e.to_string())?;
            for idx in 0..w.len() {
                let v = crate::densesim::unpack(idx, d, 2 * n);
                let expect = if v[..n] == q0[..] { 1.0 / dim as f64 } else { 0.0 };
                let got = w.values[idx];
                if (got - expect).abs() > 1e-12 {
                    return Err(format!(
                        "d={d} n={n} q0={q0:?} at {v:?}: {got} != {expect}"
                    ));
                }
            }
        }
        Ok(())
    })
}

/// Recovery of (S, a) from the circuit unitary equals the composition of
/// the per-gate maps, exactly.
pub fn recovery_campaign(seed: u64, count: usize) -> CampaignOutcome {
    run_campaign("recovery", count, move |case| {
        let mut rng = case_rng(seed, case);
        let d = 3u64;
        let n = 1 + rand_below(&mut rng, 2) as usize;
        let ir = random_circuit(&mut rng, d, n, 6);
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).map_err(|e| e.to_string())?;
        let recovered = recover_symplectomorphism(&u, d, n)
            .map_err(|e| format!("[{}] {e}", one_line(&ir)))?;
        let composed = circuit_symplectomorphism(&ir);
        if recovered == composed {
            Ok(())
        } else {
            Err(format!(
                "[{}] recovered {:?} a={:?}, composed {:?} a={:?}",
                one_line(&ir),
                recovered.s,
                recovered.a,
                composed.s,
                composed.a
            ))
        }
    })
}

const BALANCE_TOL: f64 = 1e-8;

/// Balancedness of the generators (with the exact per-gate magnitudes,
/// 1/sqrt(d) for the Fourier gate and 1 for the rest) and of random
/// generator products, whose uniform magnitude must satisfy the unitary
/// consistency support * magnitude^2 = 1 and sit on the d^{-m/2} ladder.
pub fn balanced_campaign(seed: u64, count: usize) -> CampaignOutcome {
    let dims = [3u64, 5, 7];
    let generator_cases = dims.len() * 4;
    run_campaign("balanced", generator_cases + count, move |case| {
        if (case as usize) < generator_cases {
            let d = dims[case as usize / 4];
            let gate = [Gate::F(0), Gate::R(0), Gate::Sum(0, 1), Gate::Id(0)]
                [case as usize % 4]
                .clone();
            let m = gate_matrix(&gate, d);
            let report = is_balanced(&m, BALANCE_TOL);
            if !report.balanced {
                return Err(format!("{gate} at d={d} is not balanced"));
            }
            let expect = match gate {
                Gate::F(_) => 1.0 / (d as f64).sqrt(),
                _ => 1.0,
            };
            if (report.magnitude - expect).abs() > BALANCE_TOL {
                return Err(format!(
                    "{gate} at d={d}: magnitude {} != {expect}",
                    report.magnitude
                ));
            }
            return Ok(());
        }
        let mut rng = case_rng(seed, case);
        let d = dims[(case % 3) as usize];
        let n = 1 + rand_below(&mut rng, 2) as usize;
        let ir = random_circuit(&mut rng, d, n, 6);
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).map_err(|e| e.to_string())?;
        let report = is_balanced(&u, BALANCE_TOL);
        if !report.balanced {
            return Err(format!("[{}] product is not balanced", one_line(&ir)));
        }
        let dim = (d as usize).pow(n as u32) as f64;
        let per_column = report.support as f64 / dim;
        let consistency = per_column * report.magnitude * report.magnitude;
        if (consistency - 1.0).abs() > 1e-6 {
            return Err(format!(
                "[{}] support {} and magnitude {} are not unitary-consistent",
                one_line(&ir),
                report.support,
                report.magnitude
            ));
        }
        // magnitude = d^{-m/2} for an integer m (m <= #F by construction).
        let m = -2.0 * report.magnitude.ln() / (d as f64).ln();
        if (m - m.round()).abs() > 1e-6 || m.round() < -0.1 {
            return Err(format!(
                "[{}] magnitude {} is off the d^(-m/2) ladder",
                one_line(&ir),
                report.magnitude
            ));
        }
        if (m.round() as usize) > ir.fourier_count() {
            return Err(format!(
                "[{}] magnitude exponent {} exceeds the Fourier count {}",
                one_line(&ir),
                m.round(),
                ir.fourier_count()
            ));
        }
        Ok(())
    })
}

const KAHLER_DIMS: [u64; 5] = [3, 5, 7, 11, 13];

fn random_kahler_poly(rng: &mut ChaCha8Rng, d: u64, n: usize) -> Polynomial<Fp> {
    let mut poly = Polynomial::zero();
    let terms = 1 + rand_below(rng, 3);
    for _ in 0..terms {
        let var_count = 1 + rand_below(rng, 2) as usize;
        let mut pairs: Vec<(Var, u32)> = Vec::new();
        for _ in 0..var_count {
            let idx = rand_below(rng, n as u64) as usize;
            let v = if rand_below(rng, 2) == 0 {
                Var::In(idx)
            } else {
                Var::PIn(idx)
            };
            if pairs.iter().any(|(existing, _)| *existing == v) {
                continue;
            }
            // Exponents stay below every supported modulus, so formal
            // derivatives never vanish and antiderivatives always exist.
            pairs.push((v, 1 + rand_below(rng, 2) as u32));
        }
        let coeff = Fp::from_u64(1 + rand_below(rng, d - 1), d);
        poly = poly.add(&Polynomial::monomial(&pairs, coeff));
    }
    poly
}

fn random_form(rng: &mut ChaCha8Rng, d: u64, n: usize) -> DifferentialForm<Fp> {
    let degree = rand_below(rng, 3);
    let mut form = DifferentialForm::zero();
    let terms = 1 + rand_below(rng, 3);
    for _ in 0..terms {
        let mut term = DifferentialForm::from_poly(random_kahler_poly(rng, d, n));
        let mut used: Vec<Gen> = Vec::new();
        while (used.len() as u64) < degree {
            let idx = rand_below(rng, n as u64) as usize;
            let g = if rand_below(rng, 2) == 0 {
                Gen::Dq(idx)
            } else {
                Gen::Dp(idx)
            };
            if used.contains(&g) {
                continue;
            }
            used.push(g);
            term = term.wedge(&DifferentialForm::one_form_term(
                g,
                Polynomial::constant(Fp::one(d)),
            ));
        }
        form = form.add(&term);
    }
    form
}

const KAHLER_DD_CASES: usize = 1000;
const KAHLER_ROUNDTRIP_CASES: usize = 500;

/// Structural laws of the exterior calculus: d(d(anything)) = 0 on random
/// forms, the symplectic form is closed and its matrix invertible over
/// every supported modulus, and integration inverts differentiation on
/// constant-free polynomials.
pub fn kahler_campaign(seed: u64) -> CampaignOutcome {
    let fixed = KAHLER_DIMS.len() * 3;
    let cases = KAHLER_DD_CASES + KAHLER_ROUNDTRIP_CASES + fixed;
    run_campaign("kahler", cases, move |case| {
        let mut rng = case_rng(seed, case);
        if (case as usize) < KAHLER_DD_CASES {
            let d = KAHLER_DIMS[(case % 5) as usize];
            let n = 1 + rand_below(&mut rng, 3) as usize;
            let form = random_form(&mut rng, d, n);
            let dd = form.exterior_derivative().exterior_derivative();
            if dd.is_zero() {
                Ok(())
            } else {
                Err(format!("d(d(form)) != 0 at d={d} n={n} case {case}"))
            }
        } else if (case as usize) < KAHLER_DD_CASES + KAHLER_ROUNDTRIP_CASES {
            let d = KAHLER_DIMS[(case % 5) as usize];
            let n = 1 + rand_below(&mut rng, 3) as usize;
            let poly = random_kahler_poly(&mut rng, d, n);
            let back = integrate_exact_one_form(&d_of_poly(&poly))
                .map_err(|e| format!("integrate failed at d={d} n={n}: {e}"))?;
            if back == poly.without_constant() {
                Ok(())
            } else {
                Err(format!(
                    "round-trip mismatch at d={d} n={n}: {back} != {poly}"
                ))
            }
        } else {
            let slot = case as usize - KAHLER_DD_CASES - KAHLER_ROUNDTRIP_CASES;
            let d = KAHLER_DIMS[slot / 3];
            let n = 1 + slot % 3;
            let one = Fp::one(d);
            let w = omega(n, &one);
            if !w.exterior_derivative().is_zero() {
                return Err(format!("omega is not closed at d={d} n={n}"));
            }
            if theta(n, &one).exterior_derivative() != w.neg() {
                return Err(format!("d(theta) != -omega at d={d} n={n}"));
            }
            if j_matrix(n, d).inverse().is_none() {
                return Err(format!("J is singular at d={d} n={n}"));
            }
            Ok(())
        }
    })
}

/// Symbolic continuous-variable identities: the generating relation for
/// all six generators with symbolic parameters, the worked three-wire
/// example verbatim, and the phase/action identity on random circuits.
pub fn cv_campaign(seed: u64, count: usize) -> CampaignOutcome {
    run_campaign("main-cv", count + 2, move |case| match case {
        0 => {
            for gate in [
                CvGate::F(0),
                CvGate::FDag(0),
                CvGate::Phase { wire: 0, eta: None },
                CvGate::Shift { wire: 0, tau: None },
                CvGate::Sum(0, 1),
                CvGate::SumDag(0, 1),
            ] {
                if !cv_check_generating_relation(&gate) {
                    return Err(format!("generating relation fails for {gate}"));
                }
            }
            Ok(())
        }
        1 => worked_cv_example(),
        _ => {
            let mut rng = case_rng(seed, case);
            let n = 1 + rand_below(&mut rng, 3) as usize;
            let circuit = random_cv_circuit(&mut rng, n, 8);
            if cv_verify_main(&circuit) {
                Ok(())
            } else {
                Err(format!("phase != action for {:?}", circuit.gates))
            }
        }
    })
}

fn worked_cv_example() -> Result<(), String> {
    let circuit = CvCircuit::new(
        3,
        vec![
            CvGate::F(0),
            CvGate::Phase { wire: 1, eta: None },
            CvGate::Sum(1, 2),
            CvGate::SumDag(0, 1),
            CvGate::Shift { wire: 0, tau: None },
            CvGate::FDag(2),
        ],
    )
    .expect("valid circuit");
    let out = cv_phase_functional(&circuit);
    let x1 = Polynomial::var_rat(Var::Free(0));
    let x2 = Polynomial::var_rat(Var::Free(1));
    let q01 = Polynomial::var_rat(Var::Q0(0));
    let q02 = Polynomial::var_rat(Var::Q0(1));
    let q03 = Polynomial::var_rat(Var::Q0(2));
    let tau = Polynomial::var_rat(Var::Tau(4));
    let eta = Polynomial::var_rat(Var::Eta(1));
    let expect_b = [x1.add(&tau), q02.sub(&x1), x2.clone()];
    for (i, expect) in expect_b.iter().enumerate() {
        if &out.constraints[i] != expect {
            return Err(format!(
                "B^({}) = {}, expected {}",
                i + 1,
                out.constraints[i],
                expect
            ));
        }
    }
    let expect_phase = q01
        .mul(&x1)
        .neg()
        .add(&q02.add(&q03).mul(&x2))
        .sub(&Polynomial::const_ratio(1, 2).mul(&eta).mul(&q02.pow(2)));
    if out.phase != expect_phase {
        return Err(format!("S = {}, expected {}", out.phase, expect_phase));
    }
    if !cv_verify_main(&circuit) {
        return Err("phase != action on the worked example".into());
    }
    Ok(())
}

/// Each amplitude row is exactly unit norm in cyclotomic arithmetic and
/// numerically within 1e-9 of 1.
pub fn unitarity_campaign(seed: u64, count: usize) -> CampaignOutcome {
    run_campaign("unitarity", count, move |case| {
        let mut rng = case_rng(seed, case);
        let d = [3u64, 5, 7][(case % 3) as usize];
        let n = 1 + rand_below(&mut rng, 3) as usize;
        let ir = random_circuit(&mut rng, d, n, 8);
        let q0 = random_point(&mut rng, d, n);
        let form = build_phase(&ir);
        let cap = effective_cap(None);
        let exact = row_is_unit_norm(&form, &q0, Method::Gauss, cap)
            .map_err(|e| format!("[{}] {e}", one_line(&ir)))?;
        if !exact {
            return Err(format!(
                "[{}] q0={q0:?}: cyclotomic norm is not exactly 1",
                one_line(&ir)
            ));
        }
        let row = amplitude_row(&form, &q0, Method::Gauss, cap)
            .map_err(|e| format!("[{}] {e}", one_line(&ir)))?;
        let total: f64 = row.iter().map(|(_, a)| a.to_complex().norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(format!(
                "[{}] q0={q0:?}: row norm {total} != 1",
                one_line(&ir)
            ));
        }
        Ok(())
    })
}

pub const SUITES: [&str; 6] = [
    "oracle",
    "main-disc",
    "main-cv",
    "covariance",
    "actclasstraj",
    "balanced",
];

/// Named suites exposed by the command-line driver. `count` scales the
/// random portion of each suite; fixed sub-checks always run.
pub fn run_suite(suite: &str, seed: u64, count: usize) -> Option<Vec<CampaignOutcome>> {
    match suite {
        "oracle" => Some(vec![
            oracle_campaign(seed, count),
            gauss_exactness_campaign(seed, count),
            gauss_extension_campaign(seed, count / 2),
        ]),
        "main-disc" => Some(vec![main_disc_campaign(seed, count)]),
        "main-cv" => Some(vec![cv_campaign(seed, count)]),
        "covariance" => Some(vec![
            covariance_campaign(seed, count),
            wigner_line_campaign(),
        ]),
        "actclasstraj" => Some(vec![actclasstraj_campaign(seed, count)]),
        "balanced" => Some(vec![balanced_campaign(seed, count)]),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_oracle_campaign_passes() {
        let outcome = oracle_campaign(2024, 12);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn small_exactness_campaign_passes() {
        let outcome = gauss_exactness_campaign(2024, 9);
        assert!(outcome.passed(), "{:?}", outcome.failures);
        let ext = gauss_extension_campaign(2024, 4);
        assert!(ext.passed(), "{:?}", ext.failures);
    }

    #[test]
    fn small_main_disc_campaign_passes() {
        let outcome = main_disc_campaign(2024, 6);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn genfun_forms_all_match() {
        let outcome = genfun_forms_campaign();
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn small_actclasstraj_campaign_passes() {
        let outcome = actclasstraj_campaign(2024, 6);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn small_covariance_campaign_passes() {
        let outcome = covariance_campaign(2024, 3);
        assert!(outcome.passed(), "{:?}", outcome.failures);
        let lines = wigner_line_campaign();
        assert!(lines.passed(), "{:?}", lines.failures);
    }

    #[test]
    fn small_recovery_campaign_passes() {
        let outcome = recovery_campaign(2024, 8);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn small_balanced_campaign_passes() {
        let outcome = balanced_campaign(2024, 8);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn small_kahler_checks_pass() {
        // The fixed tail of the campaign plus a slice of the random cases.
        let outcome = kahler_campaign(2024);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn small_cv_campaign_passes() {
        let outcome = cv_campaign(2024, 10);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn small_unitarity_campaign_passes() {
        let outcome = unitarity_campaign(2024, 6);
        assert!(outcome.passed(), "{:?}", outcome.failures);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 1, 1).is_none());
        for suite in SUITES {
            assert!(run_suite(suite, 7, 2).is_some());
        }
    }
}
