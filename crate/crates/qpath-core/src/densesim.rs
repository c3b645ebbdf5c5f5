//! Dense matrix simulator: the brute-force oracle the path-sum engine is
//! checked against. Basis states pack little-endian, wire 0 fastest:
//! index = sum_i q_i d^i.

use num_complex::Complex64;

use crate::algebra::{chi, Fp};
use crate::circuit::{CircuitIr, Gate};

/// Default guard on d^n for dense work.
pub const DENSE_DIM_CAP: u64 = 6561;

#[derive(Clone, PartialEq, Debug, thiserror::Error)]
pub enum DenseError {
    #[error("dense dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: u64, cap: u64 },
}

pub fn pack(digits: &[u64], d: u64) -> usize {
    let mut idx = 0u64;
    for &q in digits.iter().rev() {
        idx = idx * d + (q % d);
    }
    idx as usize
}

pub fn unpack(mut idx: usize, d: u64, n: usize) -> Vec<u64> {
    let mut digits = Vec::with_capacity(n);
    for _ in 0..n {
        digits.push((idx as u64) % d);
        idx /= d as usize;
    }
    digits
}

/// Row-major complex matrix.
#[derive(Clone, Debug)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = DenseMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * rhs.get(k, j));
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> DenseMatrix {
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, rhs: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |(U^dag U - I)_{jk}|.
    pub fn unitarity_residual(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_abs_diff(&DenseMatrix::identity(self.dim))
    }

    /// Conjugate rho -> U rho U^dag.
    pub fn conjugate(&self, rho: &DenseMatrix) -> DenseMatrix {
        self.mul(rho).mul(&self.dagger())
    }
}

/// Balance report: do all entries above the threshold share one magnitude?
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceReport {
    pub balanced: bool,
    pub magnitude: f64,
    pub support: usize,
}

pub fn is_balanced(m: &DenseMatrix, tol: f64) -> BalanceReport {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut support = 0usize;
    for row in 0..m.dim() {
        for col in 0..m.dim() {
            let mag = m.get(row, col).norm();
            if mag > tol {
                lo = lo.min(mag);
                hi = hi.max(mag);
                support += 1;
            }
        }
    }
    if support == 0 {
        return BalanceReport {
            balanced: false,
            magnitude: 0.0,
            support,
        };
    }
    BalanceReport {
        balanced: hi - lo <= tol,
        magnitude: hi,
        support,
    }
}

/// The matrix of one gate on its own wires, packed little-endian in the
/// gate's wire order (control fastest for the two-wire sum).
pub fn gate_matrix(gate: &Gate, d: u64) -> DenseMatrix {
    let root = 1.0 / (d as f64).sqrt();
    match *gate {
        Gate::F(_) => {
            let dim = d as usize;
            let mut m = DenseMatrix::zeros(dim);
            for big_q in 0..d {
                for q in 0..d {
                    m.set(
                        big_q as usize,
                        q as usize,
                        chi((q * big_q) as i64, d) * root,
                    );
                }
            }
            m
        }
        Gate::R(_) => {
            let dim = d as usize;
            let half = Fp::half(d);
            let mut m = DenseMatrix::zeros(dim);
            for q in 0..d {
                let qf = Fp::from_u64(q, d);
                let phase = half * qf * (qf - Fp::one(d));
                m.set(q as usize, q as usize, chi(phase.value() as i64, d));
            }
            m
        }
        Gate::Sum(..) => {
            let dim = (d * d) as usize;
            let mut m = DenseMatrix::zeros(dim);
            for qc in 0..d {
                for qt in 0..d {
                    let col = (qc + d * qt) as usize;
                    let row = (qc + d * ((qc + qt) % d)) as usize;
                    m.set(row, col, Complex64::new(1.0, 0.0));
                }
            }
            m
        }
        Gate::Id(_) => DenseMatrix::identity(d as usize),
    }
}

/// Apply one gate in place to a full state vector.
pub fn apply_gate(gate: &Gate, d: u64, n: usize, state: &mut Vec<Complex64>) {
    let dim = state.len();
    debug_assert_eq!(dim, (d as usize).pow(n as u32));
    match *gate {
        Gate::F(w) => {
            let stride = (d as usize).pow(w as u32);
            let root = 1.0 / (d as f64).sqrt();
            let mut scratch = vec![Complex64::new(0.0, 0.0); d as usize];
            let mut base = 0usize;
            while base < dim {
                for offset in 0..stride {
                    let start = base + offset;
                    for (big_q, slot) in scratch.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for q in 0..d as usize {
                            acc += chi((q * big_q) as i64, d) * state[start + q * stride];
                        }
                        *slot = acc * root;
                    }
                    for (big_q, slot) in scratch.iter().enumerate() {
                        state[start + big_q * stride] = *slot;
                    }
                }
                base += stride * d as usize;
            }
        }
        Gate::R(w) => {
            let stride = (d as usize).pow(w as u32);
            let half = Fp::half(d);
            let phases: Vec<Complex64> = (0..d)
                .map(|q| {
                    let qf = Fp::from_u64(q, d);
                    chi((half * qf * (qf - Fp::one(d))).value() as i64, d)
                })
                .collect();
            for (idx, amp) in state.iter_mut().enumerate() {
                let digit = idx / stride % d as usize;
                *amp *= phases[digit];
            }
        }
        Gate::Sum(c, t) => {
            let stride_c = (d as usize).pow(c as u32);
            let stride_t = (d as usize).pow(t as u32);
            let mut next = vec![Complex64::new(0.0, 0.0); dim];
            for (idx, &amp) in state.iter().enumerate() {
                let qc = idx / stride_c % d as usize;
                let qt = idx / stride_t % d as usize;
                let target = (qc + qt) % d as usize;
                next[idx - qt * stride_t + target * stride_t] = amp;
            }
            *state = next;
        }
        Gate::Id(_) => {}
    }
}

/// The circuit's full unitary: gates applied in program order to the
/// columns of the identity, so U = M(g_N) ... M(g_1).
pub fn circuit_unitary(ir: &CircuitIr, cap: u64) -> Result<DenseMatrix, DenseError> {
    let dim = checked_dim(ir, cap)?;
    let mut u = DenseMatrix::zeros(dim);
    for col in 0..dim {
        let mut state = vec![Complex64::new(0.0, 0.0); dim];
        state[col] = Complex64::new(1.0, 0.0);
        for gate in &ir.gates {
            apply_gate(gate, ir.d, ir.n, &mut state);
        }
        for (row, amp) in state.iter().enumerate() {
            u.set(row, col, *amp);
        }
    }
    Ok(u)
}

/// One transition amplitude <qf| U |q0> without materializing U.
pub fn dense_amplitude(
    ir: &CircuitIr,
    q0: &[u64],
    qf: &[u64],
    cap: u64,
) -> Result<Complex64, DenseError> {
    let dim = checked_dim(ir, cap)?;
    assert_eq!(q0.len(), ir.n);
    assert_eq!(qf.len(), ir.n);
    let mut state = vec![Complex64::new(0.0, 0.0); dim];
    state[pack(q0, ir.d)] = Complex64::new(1.0, 0.0);
    for gate in &ir.gates {
        apply_gate(gate, ir.d, ir.n, &mut state);
    }
    Ok(state[pack(qf, ir.d)])
}

fn checked_dim(ir: &CircuitIr, cap: u64) -> Result<usize, DenseError> {
    let mut dim = 1u64;
    for _ in 0..ir.n {
        dim = dim.saturating_mul(ir.d);
        if dim > cap {
            return Err(DenseError::DimensionCap { dim, cap });
        }
    }
    Ok(dim as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn packing_is_little_endian() {
        // (q1, q2, q3) = (2, 0, 1) over d=3: 2 + 0*3 + 1*9 = 11.
        assert_eq!(pack(&[2, 0, 1], 3), 11);
        assert_eq!(unpack(11, 3, 3), vec![2, 0, 1]);
    }

    #[test]
    fn phase_gate_is_the_expected_diagonal() {
        let m = gate_matrix(&Gate::R(0), 3);
        assert_abs_diff_eq!((m.get(0, 0) - chi(0, 3)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.get(1, 1) - chi(0, 3)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.get(2, 2) - chi(1, 3)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(0, 1).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fourier_entry_sign_convention() {
        // <Q|F|q> = chi(qQ)/sqrt(d), checked at d=5, q=2, Q=3: chi(6)=chi(1).
        let m = gate_matrix(&Gate::F(0), 5);
        let expect = chi(1, 5) / 5f64.sqrt();
        assert_abs_diff_eq!((m.get(3, 2) - expect).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fourier_fourth_power_is_identity() {
        for d in [3u64, 5, 7] {
            let ir = CircuitIr::new(d, 1, vec![Gate::F(0); 4]).unwrap();
            let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
            assert!(u.max_abs_diff(&DenseMatrix::identity(d as usize)) < 1e-12);
        }
    }

    #[test]
    fn fourier_squared_is_parity() {
        let ir = CircuitIr::new(3, 1, vec![Gate::F(0), Gate::F(0)]).unwrap();
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
        // F^2 |q> = |-q>.
        for q in 0..3usize {
            for big_q in 0..3usize {
                let expect = if big_q == (3 - q) % 3 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(u.get(big_q, q).norm(), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sum_gate_adds_control_into_target() {
        let ir = CircuitIr::new(3, 2, vec![Gate::Sum(0, 1)]).unwrap();
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
        for qc in 0..3u64 {
            for qt in 0..3u64 {
                let col = pack(&[qc, qt], 3);
                let row = pack(&[qc, (qc + qt) % 3], 3);
                assert_abs_diff_eq!(u.get(row, col).norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sum_respects_wire_order_when_reversed() {
        // SUM with control above target in the packing order.
        let ir = CircuitIr::new(3, 2, vec![Gate::Sum(1, 0)]).unwrap();
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
        for qc in 0..3u64 {
            for qt in 0..3u64 {
                let col = pack(&[qt, qc], 3);
                let row = pack(&[(qc + qt) % 3, qc], 3);
                assert_abs_diff_eq!(u.get(row, col).norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gates_compose_in_program_order() {
        // [F(0), R(0)] must give R * F, not F * R.
        let ir = CircuitIr::new(5, 1, vec![Gate::F(0), Gate::R(0)]).unwrap();
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
        let rf = gate_matrix(&Gate::R(0), 5).mul(&gate_matrix(&Gate::F(0), 5));
        assert!(u.max_abs_diff(&rf) < 1e-12);
    }

    #[test]
    fn amplitude_matches_unitary_entry() {
        let ir = CircuitIr::new(3, 2, vec![Gate::F(0), Gate::Sum(0, 1), Gate::R(1)]).unwrap();
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
        for q0 in 0..9usize {
            for qf in 0..9usize {
                let a = dense_amplitude(
                    &ir,
                    &unpack(q0, 3, 2),
                    &unpack(qf, 3, 2),
                    DENSE_DIM_CAP,
                )
                .unwrap();
                assert_abs_diff_eq!((a - u.get(qf, q0)).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn circuit_unitaries_are_unitary() {
        let ir = CircuitIr::new(
            5,
            2,
            vec![Gate::F(0), Gate::Sum(1, 0), Gate::R(1), Gate::F(1)],
        )
        .unwrap();
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn balance_detection() {
        let ir = CircuitIr::new(3, 1, vec![Gate::F(0)]).unwrap();
        let u = circuit_unitary(&ir, DENSE_DIM_CAP).unwrap();
        let report = is_balanced(&u, 1e-8);
        assert!(report.balanced);
        assert_abs_diff_eq!(report.magnitude, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_eq!(report.support, 9);

        let mut skew = DenseMatrix::identity(2);
        skew.set(1, 1, Complex64::new(0.5, 0.0));
        assert!(!is_balanced(&skew, 1e-8).balanced);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let ir = CircuitIr::new(7, 3, vec![Gate::F(0)]).unwrap();
        assert!(matches!(
            circuit_unitary(&ir, 100),
            Err(DenseError::DimensionCap { .. })
        ));
    }
}
