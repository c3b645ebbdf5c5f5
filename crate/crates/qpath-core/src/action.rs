//! Generating functions of affine symplectomorphisms and the classical
//! action functional of a circuit.
//!
//! The reconstruction is mechanical: form the difference of the canonical
//! one-forms epsilon = sum_i P_i dQ_i - sum_i p_i dq_i along the map,
//! check it is closed (this is exactly the symplectic condition), integrate
//! it, and eliminate the momenta through the affine relation B p = Q - A q
//! - a_q. The action of a circuit is the telescoping sum of per-gate
//! generating functions over the intermediate position coordinates, and it
//! reproduces the sum-over-paths phase exactly once the position symbols
//! are replaced by the labels flowing through the wires.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::algebra::forms::integrate_exact_one_form;
use crate::algebra::{AlgebraError, DifferentialForm, Fp, Gen, Polynomial, Var};
use crate::circuit::{label_wires, path_symbol_images, CircuitIr, Gate};
use crate::pathsum::build_phase;
use crate::phasespace::{circuit_symplectomorphism, gate_symplectomorphism, AffineSymplectomorphism};

#[derive(Clone, PartialEq, Debug, thiserror::Error)]
pub enum ActionError {
    #[error("map is not a symplectomorphism: the canonical difference form is not closed")]
    NotSymplectic,
    #[error("momentum symbols survived the boundary substitution")]
    SubstitutionSingular,
    #[error("classical trajectories through the same endpoints carry different actions: {0} vs {1}")]
    InconsistentAction(u64, u64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn coordinate_polys(map: &AffineSymplectomorphism) -> (Vec<Polynomial<Fp>>, Vec<Polynomial<Fp>>) {
    let n = map.n;
    let d = map.d;
    let mut outs_q = Vec::with_capacity(n);
    let mut outs_p = Vec::with_capacity(n);
    for i in 0..2 * n {
        let mut poly = Polynomial::const_mod(map.a[i] as i64, d);
        for j in 0..n {
            poly = poly
                .add(&Polynomial::linear(Var::In(j), map.s.get_fp(i, j)))
                .add(&Polynomial::linear(Var::PIn(j), map.s.get_fp(i, n + j)));
        }
        if i < n {
            outs_q.push(poly);
        } else {
            outs_p.push(poly);
        }
    }
    (outs_q, outs_p)
}

/// G(q, Q) with the position inputs as `Var::In` and the position outputs
/// as `Var::Out`, normalized to zero constant term. Fails when the matrix
/// part is not symplectic.
pub fn generating_function(map: &AffineSymplectomorphism) -> Result<Polynomial<Fp>, ActionError> {
    let n = map.n;
    let d = map.d;
    let (_, outs_p) = coordinate_polys(map);

    // epsilon = sum_i P_i dQ_i - sum_i p_i dq_i, expanded over dq_j, dp_j.
    let mut eps = DifferentialForm::zero();
    for i in 0..n {
        for j in 0..n {
            let cq = map.s.get_fp(i, j);
            if !cq.is_zero() {
                eps = eps.add(&DifferentialForm::one_form_term(
                    Gen::Dq(j),
                    outs_p[i].scale(&cq),
                ));
            }
            let cp = map.s.get_fp(i, n + j);
            if !cp.is_zero() {
                eps = eps.add(&DifferentialForm::one_form_term(
                    Gen::Dp(j),
                    outs_p[i].scale(&cp),
                ));
            }
        }
    }
    for j in 0..n {
        eps = eps.sub(&DifferentialForm::one_form_term(
            Gen::Dq(j),
            Polynomial::var_mod(Var::PIn(j), d),
        ));
    }

    if !eps.exterior_derivative().is_zero() {
        return Err(ActionError::NotSymplectic);
    }
    let tilde = integrate_exact_one_form(&eps)?;

    // Eliminate the momenta: row-reduce B p = Q - A q - a_q and take the
    // section with every free momentum set to zero. The integral is
    // constant along the fibers, so the section does not matter.
    let mut b: Vec<Vec<Fp>> = (0..n)
        .map(|i| (0..n).map(|j| map.s.get_fp(i, n + j)).collect())
        .collect();
    let mut rhs: Vec<Polynomial<Fp>> = (0..n)
        .map(|i| {
            let mut poly = Polynomial::linear(Var::Out(i), Fp::one(d))
                .sub(&Polynomial::const_mod(map.a[i] as i64, d));
            for j in 0..n {
                poly = poly.sub(&Polynomial::linear(Var::In(j), map.s.get_fp(i, j)));
            }
            poly
        })
        .collect();

    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0usize;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| !b[r][col].is_zero()) else {
            continue;
        };
        b.swap(row, r);
        rhs.swap(row, r);
        let inv = b[row][col].inverse().expect("nonzero pivot");
        for x in b[row].iter_mut() {
            *x = *x * inv;
        }
        rhs[row] = rhs[row].scale(&inv);
        for rr in 0..n {
            if rr != row && !b[rr][col].is_zero() {
                let f = b[rr][col];
                for c in 0..n {
                    let sub = b[row][c] * f;
                    b[rr][c] = b[rr][c] - sub;
                }
                rhs[rr] = rhs[rr].sub(&rhs[row].scale(&f));
            }
        }
        pivot_row_of_col[col] = Some(row);
        row += 1;
    }

    let mut subs: BTreeMap<Var, Polynomial<Fp>> = BTreeMap::new();
    for (col, pivot) in pivot_row_of_col.iter().enumerate() {
        let image = match pivot {
            Some(r) => rhs[*r].clone(),
            None => Polynomial::zero(),
        };
        subs.insert(Var::PIn(col), image);
    }
    let g = tilde.substitute_map(&subs);
    if g.vars().iter().any(|v| matches!(v, Var::PIn(_))) {
        return Err(ActionError::SubstitutionSingular);
    }
    Ok(g.without_constant())
}

fn gate_tag(gate: &Gate) -> u8 {
    match gate {
        Gate::F(_) => 0,
        Gate::R(_) => 1,
        Gate::Sum(..) => 2,
        Gate::Id(_) => 3,
    }
}

fn local_gate(gate: &Gate) -> Gate {
    match gate {
        Gate::F(_) => Gate::F(0),
        Gate::R(_) => Gate::R(0),
        Gate::Sum(..) => Gate::Sum(0, 1),
        Gate::Id(_) => Gate::Id(0),
    }
}

/// Generating function of a single gate on its own wires (slot 0 is the
/// first wire the gate names). Cached per gate kind and modulus.
pub fn gate_generating_function(gate: &Gate, d: u64) -> Result<Polynomial<Fp>, ActionError> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, u64), Polynomial<Fp>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (gate_tag(gate), d);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let local = local_gate(gate);
    let n_local = local.wires().len();
    let map = gate_symplectomorphism(&local, n_local, d);
    let g = generating_function(&map)?;
    cache.lock().unwrap().insert(key, g.clone());
    Ok(g)
}

/// S(gamma) = sum_k G_k(q_{k-1}, q_k) as a polynomial in the position
/// symbols `Var::Path { step, wire }`, step 0 being the input plane.
pub fn action_functional(ir: &CircuitIr) -> Result<Polynomial<Fp>, ActionError> {
    let d = ir.d;
    let mut total = Polynomial::zero();
    for (k, gate) in ir.gates.iter().enumerate() {
        let g = gate_generating_function(gate, d)?;
        let mut subs: BTreeMap<Var, Polynomial<Fp>> = BTreeMap::new();
        for (slot, &w) in gate.wires().iter().enumerate() {
            subs.insert(
                Var::In(slot),
                Polynomial::var_mod(Var::Path { step: k, wire: w }, d),
            );
            subs.insert(
                Var::Out(slot),
                Polynomial::var_mod(Var::Path { step: k + 1, wire: w }, d),
            );
        }
        total = total.add(&g.substitute_map(&subs));
    }
    Ok(total)
}

/// The sum-over-paths phase and the action functional, both pushed to the
/// same coordinates (circuit inputs and fresh Fourier outputs). Equal
/// polynomials mean the quantum phase IS the classical action.
pub fn phase_and_action(
    ir: &CircuitIr,
) -> Result<(Polynomial<Fp>, Polynomial<Fp>), ActionError> {
    let phase = build_phase(ir).phase.clone();
    let labeling = label_wires(ir);
    let images = path_symbol_images(&labeling);
    let action = action_functional(ir)?.substitute_map(&images);
    Ok((phase, action))
}

/// Exact polynomial identity check between the path-sum phase and the
/// classical action of the circuit.
pub fn verify_phase_is_action(ir: &CircuitIr) -> Result<bool, ActionError> {
    let (phase, action) = phase_and_action(ir)?;
    Ok(phase == action)
}

/// A discrete classical trajectory: the positions at every time step for
/// one choice of initial momentum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trajectory {
    pub p0: Vec<u64>,
    pub positions: Vec<Vec<u64>>,
}

/// All trajectories of the circuit's phase-space dynamics from position
/// q0 to position qn, one candidate per initial momentum.
pub fn classical_trajectories(ir: &CircuitIr, q0: &[u64], qn: &[u64]) -> Vec<Trajectory> {
    assert_eq!(q0.len(), ir.n);
    assert_eq!(qn.len(), ir.n);
    let d = ir.d;
    let n = ir.n;
    let maps: Vec<AffineSymplectomorphism> = ir
        .gates
        .iter()
        .map(|g| gate_symplectomorphism(g, n, d))
        .collect();
    let count = (d as usize).pow(n as u32);
    let mut found = Vec::new();
    for p_idx in 0..count {
        let p0 = crate::densesim::unpack(p_idx, d, n);
        let mut v: Vec<u64> = q0.iter().chain(p0.iter()).copied().collect();
        let mut positions = vec![q0.to_vec()];
        for map in &maps {
            v = map.apply(&v);
            positions.push(v[..n].to_vec());
        }
        if positions.last().map(Vec::as_slice) == Some(qn) {
            found.push(Trajectory { p0, positions });
        }
    }
    found
}

fn eval_action_on(
    action: &Polynomial<Fp>,
    traj: &Trajectory,
    d: u64,
) -> Result<Fp, AlgebraError> {
    let mut point: BTreeMap<Var, Fp> = BTreeMap::new();
    for (step, qs) in traj.positions.iter().enumerate() {
        for (wire, &q) in qs.iter().enumerate() {
            point.insert(Var::Path { step, wire }, Fp::from_u64(q, d));
        }
    }
    action.eval(&point)
}

/// For every classical trajectory from q0 to qn, the action takes a single
/// value, and it exceeds the whole-circuit generating function at the same
/// endpoints by a constant that does not depend on the endpoints. Returns
/// that difference, or `None` when no trajectory connects the endpoints.
pub fn action_defect(ir: &CircuitIr, q0: &[u64], qn: &[u64]) -> Result<Option<Fp>, ActionError> {
    let trajectories = classical_trajectories(ir, q0, qn);
    if trajectories.is_empty() {
        return Ok(None);
    }
    let d = ir.d;
    let action = action_functional(ir)?;
    let mut value: Option<Fp> = None;
    for traj in &trajectories {
        let s = eval_action_on(&action, traj, d)?;
        match value {
            None => value = Some(s),
            Some(prev) if prev != s => {
                return Err(ActionError::InconsistentAction(prev.value(), s.value()))
            }
            _ => {}
        }
    }
    let g_total = generating_function(&circuit_symplectomorphism(ir))?;
    let mut endpoint: BTreeMap<Var, Fp> = BTreeMap::new();
    for (i, &q) in q0.iter().enumerate() {
        endpoint.insert(Var::In(i), Fp::from_u64(q, d));
    }
    for (i, &q) in qn.iter().enumerate() {
        endpoint.insert(Var::Out(i), Fp::from_u64(q, d));
    }
    let g = g_total.eval(&endpoint)?;
    Ok(Some(value.expect("nonempty") - g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MatFp;
    use crate::circuit::parse_circuit;

    fn half(d: u64) -> Fp {
        Fp::new(2, d).inverse().unwrap()
    }

    fn expected_fourier(d: u64) -> Polynomial<Fp> {
        Polynomial::monomial(&[(Var::In(0), 1), (Var::Out(0), 1)], Fp::one(d))
    }

    fn expected_phase_gate(d: u64) -> Polynomial<Fp> {
        // 2^{-1} q (q - 1)
        let q = Polynomial::var_mod(Var::In(0), d);
        let qm1 = q.sub(&Polynomial::const_mod(1, d));
        q.mul(&qm1).scale(&half(d))
    }

    #[test]
    fn closed_forms_for_all_generators() {
        for d in [3u64, 5, 7, 11] {
            assert_eq!(
                gate_generating_function(&Gate::F(0), d).unwrap(),
                expected_fourier(d),
                "F at d={d}"
            );
            assert_eq!(
                gate_generating_function(&Gate::R(0), d).unwrap(),
                expected_phase_gate(d),
                "R at d={d}"
            );
            assert!(gate_generating_function(&Gate::Sum(0, 1), d).unwrap().is_zero());
            assert!(gate_generating_function(&Gate::Id(0), d).unwrap().is_zero());
        }
    }

    #[test]
    fn embedded_gate_reconstruction_matches_local_form() {
        let d = 5;
        for (gate, n) in [
            (Gate::F(1), 2usize),
            (Gate::R(0), 2),
            (Gate::Sum(1, 0), 2),
            (Gate::Id(1), 2),
        ] {
            let embedded = generating_function(&gate_symplectomorphism(&gate, n, d)).unwrap();
            let local = gate_generating_function(&gate, d).unwrap();
            let mut subs = BTreeMap::new();
            for (slot, &w) in gate.wires().iter().enumerate() {
                subs.insert(Var::In(slot), Polynomial::var_mod(Var::In(w), d));
                subs.insert(Var::Out(slot), Polynomial::var_mod(Var::Out(w), d));
            }
            assert_eq!(embedded, local.substitute_map(&subs), "{gate:?}");
        }
    }

    #[test]
    fn composite_of_parallel_fouriers_is_a_sum_of_products() {
        let ir = parse_circuit("d 3\nn 2\nF 0\nF 1\n").unwrap();
        let g = generating_function(&circuit_symplectomorphism(&ir)).unwrap();
        let expect = Polynomial::monomial(&[(Var::In(0), 1), (Var::Out(0), 1)], Fp::one(3)).add(
            &Polynomial::monomial(&[(Var::In(1), 1), (Var::Out(1), 1)], Fp::one(3)),
        );
        assert_eq!(g, expect);
    }

    #[test]
    fn non_symplectic_matrix_is_rejected() {
        let mut map = AffineSymplectomorphism::identity(1, 5);
        map.s = MatFp::from_rows(&[vec![2, 0], vec![0, 1]], 5);
        assert_eq!(generating_function(&map), Err(ActionError::NotSymplectic));
    }

    #[test]
    fn action_of_single_fourier_uses_path_symbols() {
        let ir = parse_circuit("d 3\nn 1\nF 0\n").unwrap();
        let action = action_functional(&ir).unwrap();
        let expect = Polynomial::monomial(
            &[
                (Var::Path { step: 0, wire: 0 }, 1),
                (Var::Path { step: 1, wire: 0 }, 1),
            ],
            Fp::one(3),
        );
        assert_eq!(action, expect);
    }

    #[test]
    fn phase_equals_action_on_sample_circuits() {
        for text in [
            "d 3\nn 1\nF 0\n",
            "d 3\nn 1\nR 0\nF 0\nR 0\n",
            "d 3\nn 2\nF 0\nSUM 0 1\nR 1\nF 1\n",
            "d 5\nn 2\nSUM 1 0\nF 1\nR 1\nSUM 0 1\nF 0\n",
            "d 7\nn 3\nF 0\nSUM 0 2\nR 2\nF 2\nSUM 2 1\nID 1\n",
        ] {
            let ir = parse_circuit(text).unwrap();
            assert!(verify_phase_is_action(&ir).unwrap(), "{text}");
        }
    }

    #[test]
    fn fourier_has_one_trajectory_per_endpoint_pair() {
        let ir = parse_circuit("d 3\nn 1\nF 0\n").unwrap();
        let trajs = classical_trajectories(&ir, &[1], &[2]);
        // (q, p) -> (-p, q): final position 2 forces p0 = 1.
        assert_eq!(trajs.len(), 1);
        assert_eq!(trajs[0].p0, vec![1]);
        assert_eq!(trajs[0].positions, vec![vec![1], vec![2]]);
        let defect = action_defect(&ir, &[1], &[2]).unwrap();
        assert_eq!(defect, Some(Fp::new(0, 3)));
    }

    #[test]
    fn phase_gate_keeps_position_and_every_momentum_works() {
        let ir = parse_circuit("d 5\nn 1\nR 0\n").unwrap();
        assert_eq!(classical_trajectories(&ir, &[3], &[3]).len(), 5);
        assert!(classical_trajectories(&ir, &[3], &[4]).is_empty());
        assert_eq!(action_defect(&ir, &[3], &[4]).unwrap(), None);
        assert_eq!(action_defect(&ir, &[3], &[3]).unwrap(), Some(Fp::new(0, 5)));
    }

    #[test]
    fn action_defect_is_constant_across_endpoints() {
        for text in [
            "d 3\nn 1\nF 0\nR 0\nF 0\n",
            "d 5\nn 1\nR 0\nF 0\nR 0\nF 0\n",
            "d 3\nn 2\nF 0\nSUM 0 1\nF 1\nR 0\n",
            "d 5\nn 2\nSUM 1 0\nR 0\nF 0\nSUM 0 1\nF 1\n",
        ] {
            let ir = parse_circuit(text).unwrap();
            let dim = (ir.d as usize).pow(ir.n as u32);
            let mut constant: Option<Fp> = None;
            let mut seen = 0;
            for a in 0..dim {
                for b in 0..dim {
                    let q0 = crate::densesim::unpack(a, ir.d, ir.n);
                    let qn = crate::densesim::unpack(b, ir.d, ir.n);
                    if let Some(c) = action_defect(&ir, &q0, &qn).unwrap() {
                        seen += 1;
                        match constant {
                            None => constant = Some(c),
                            Some(prev) => assert_eq!(prev, c, "{text} {q0:?}->{qn:?}"),
                        }
                    }
                }
            }
            assert!(seen > 0, "{text}");
        }
    }
}
