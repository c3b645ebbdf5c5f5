//! Discrete phase space over Z_d^{2n}: affine symplectomorphisms attached
//! to the gates, the discrete Wigner transform, covariance checking, and
//! recovery of the symplectic data from a unitary.
//!
//! Phase-space points are ordered (q1..qn, p1..pn); tables over phase
//! space index little-endian in that coordinate order.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{chi, mod_inverse, MatFp};
use crate::circuit::{CircuitIr, Gate};
use crate::densesim::{gate_matrix, pack, unpack, DenseMatrix};

#[derive(Clone, PartialEq, Debug, thiserror::Error)]
pub enum PhaseSpaceError {
    #[error("density operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("Wigner values kept an imaginary residual of {0:.3e}")]
    ImaginaryResidual(f64),
    #[error("unitary is not a Clifford operation: {0}")]
    NotClifford(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// v -> S v + a on Z_d^{2n}, with S symplectic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineSymplectomorphism {
    pub d: u64,
    pub n: usize,
    pub s: MatFp,
    pub a: Vec<u64>,
}

/// The standard symplectic form [[0, I], [-I, 0]].
pub fn j_matrix(n: usize, d: u64) -> MatFp {
    let mut j = MatFp::zeros(2 * n, 2 * n, d);
    for i in 0..n {
        j.set(i, n + i, 1);
        j.set(n + i, i, d - 1);
    }
    j
}

impl AffineSymplectomorphism {
    pub fn identity(n: usize, d: u64) -> Self {
        AffineSymplectomorphism {
            d,
            n,
            s: MatFp::identity(2 * n, d),
            a: vec![0; 2 * n],
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), 2 * self.n);
        self.s
            .mul_vec(v)
            .iter()
            .zip(&self.a)
            .map(|(&sv, &av)| (sv + av) % self.d)
            .collect()
    }

    /// [u, v] = u^T J v is preserved iff S^T J S = J.
    pub fn is_symplectic(&self) -> bool {
        let j = j_matrix(self.n, self.d);
        self.s.transpose().mul(&j).mul(&self.s) == j
    }
}

/// compose(g, f) = g after f: S = S_g S_f, a = S_g a_f + a_g.
pub fn compose(
    g: &AffineSymplectomorphism,
    f: &AffineSymplectomorphism,
) -> AffineSymplectomorphism {
    assert_eq!(g.d, f.d);
    assert_eq!(g.n, f.n);
    let s = g.s.mul(&f.s);
    let a = g
        .s
        .mul_vec(&f.a)
        .iter()
        .zip(&g.a)
        .map(|(&sv, &av)| (sv + av) % g.d)
        .collect();
    AffineSymplectomorphism { d: g.d, n: g.n, s, a }
}

/// The phase-space action of one gate, embedded on n wires.
///
/// Fourier rotates (q, p) -> (-p, q); the quadratic phase gate shears
/// p -> p + q - 2^{-1}; the controlled sum adds in position and
/// back-subtracts in momentum on the control.
pub fn gate_symplectomorphism(gate: &Gate, n: usize, d: u64) -> AffineSymplectomorphism {
    let mut map = AffineSymplectomorphism::identity(n, d);
    match *gate {
        Gate::F(w) => {
            map.s.set(w, w, 0);
            map.s.set(w, n + w, d - 1);
            map.s.set(n + w, n + w, 0);
            map.s.set(n + w, w, 1);
        }
        Gate::R(w) => {
            map.s.set(n + w, w, 1);
            map.a[n + w] = d - mod_inverse(2, d).expect("odd prime");
        }
        Gate::Sum(c, t) => {
            map.s.set(t, c, 1);
            map.s.set(n + c, n + t, d - 1);
        }
        Gate::Id(_) => {}
    }
    map
}

/// Phi_N = phi_N o ... o phi_1 for the whole circuit.
pub fn circuit_symplectomorphism(ir: &CircuitIr) -> AffineSymplectomorphism {
    let mut acc = AffineSymplectomorphism::identity(ir.n, ir.d);
    for gate in &ir.gates {
        acc = compose(&gate_symplectomorphism(gate, ir.n, ir.d), &acc);
    }
    acc
}

/// Real table over phase space, indexed little-endian in (q1..qn, p1..pn).
#[derive(Clone, Debug)]
pub struct WignerFunction {
    pub d: u64,
    pub n: usize,
    pub values: Vec<f64>,
}

impl WignerFunction {
    pub fn value(&self, v: &[u64]) -> f64 {
        self.values[pack(v, self.d)]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Points where the quasi-distribution is materially nonzero.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &w)| w.abs() > tol)
            .map(|(i, _)| i)
            .collect()
    }
}

const HERMITICITY_TOL: f64 = 1e-10;
const IMAGINARY_TOL: f64 = 1e-10;

/// W(q, p) = d^{-n} sum_x chi(-x.p) <q + 2^{-1}x| rho |q - 2^{-1}x>.
///
/// Demands a Hermitian input and discards only a vanishing imaginary
/// residual; anything larger is an error, not a silent truncation.
pub fn wigner_transform(
    rho: &DenseMatrix,
    d: u64,
    n: usize,
) -> Result<WignerFunction, PhaseSpaceError> {
    let dim = (d as usize).pow(n as u32);
    if rho.dim() != dim {
        return Err(PhaseSpaceError::DimensionMismatch {
            expected: dim,
            got: rho.dim(),
        });
    }
    let herm = rho.max_abs_diff(&rho.dagger());
    if herm > HERMITICITY_TOL {
        return Err(PhaseSpaceError::NotHermitian(herm));
    }
    let half = mod_inverse(2, d).expect("odd prime");
    let scale = 1.0 / dim as f64;
    let points = dim * dim;
    let mut values = vec![0.0f64; points];
    let mut worst_imag = 0.0f64;
    for (idx, slot) in values.iter_mut().enumerate() {
        let digits = unpack(idx, d, 2 * n);
        let (q, p) = digits.split_at(n);
        let mut total = Complex64::new(0.0, 0.0);
        for x_idx in 0..dim {
            let x = unpack(x_idx, d, n);
            let mut dot = 0u64;
            let mut bra = Vec::with_capacity(n);
            let mut ket = Vec::with_capacity(n);
            for i in 0..n {
                dot = (dot + x[i] * p[i]) % d;
                bra.push((q[i] + half * x[i]) % d); // q + 2^{-1} x
                ket.push((q[i] + d - half * x[i] % d) % d); // q - 2^{-1} x
            }
            let elem = rho.get(pack(&bra, d), pack(&ket, d));
            total += chi(-(dot as i64), d) * elem;
        }
        total *= scale;
        worst_imag = worst_imag.max(total.im.abs());
        *slot = total.re;
    }
    if worst_imag > IMAGINARY_TOL {
        return Err(PhaseSpaceError::ImaginaryResidual(worst_imag));
    }
    Ok(WignerFunction { d, n, values })
}

/// max_v |W_{U rho U^dag}(S v + a) - W_rho(v)|.
pub fn covariance_residual(
    u: &DenseMatrix,
    map: &AffineSymplectomorphism,
    rho: &DenseMatrix,
) -> Result<f64, PhaseSpaceError> {
    let d = map.d;
    let n = map.n;
    let w_in = wigner_transform(rho, d, n)?;
    let w_out = wigner_transform(&u.conjugate(rho), d, n)?;
    let mut worst = 0.0f64;
    for idx in 0..w_in.len() {
        let v = unpack(idx, d, 2 * n);
        let image = map.apply(&v);
        worst = worst.max((w_out.value(&image) - w_in.value(&v)).abs());
    }
    Ok(worst)
}

/// Covariance of a single gate against its own phase-space action,
/// with rho living on the gate's wires (control fastest for the sum).
pub fn check_covariance(
    gate: &Gate,
    d: u64,
    rho: &DenseMatrix,
) -> Result<f64, PhaseSpaceError> {
    let n_local = gate.wires().len();
    let local = local_gate(gate);
    let u = gate_matrix(&local, d);
    let map = gate_symplectomorphism(&local, n_local, d);
    covariance_residual(&u, &map, rho)
}

fn local_gate(gate: &Gate) -> Gate {
    match *gate {
        Gate::F(_) => Gate::F(0),
        Gate::R(_) => Gate::R(0),
        Gate::Sum(..) => Gate::Sum(0, 1),
        Gate::Id(_) => Gate::Id(0),
    }
}

/// The momentum basis state with label p0: <q|p0> = chi(p0.q) / sqrt(d^n).
/// Its Wigner function is uniform on the line {(q, p0)}.
pub fn momentum_state(p0: &[u64], d: u64) -> Vec<Complex64> {
    let n = p0.len();
    let dim = (d as usize).pow(n as u32);
    let scale = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|idx| {
            let q = unpack(idx, d, n);
            let dot: u64 = q.iter().zip(p0).map(|(&qi, &pi)| qi * pi % d).sum();
            chi((dot % d) as i64, d) * scale
        })
        .collect()
}

fn projector(state: &[Complex64]) -> DenseMatrix {
    let dim = state.len();
    let mut rho = DenseMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            rho.set(i, j, state[i] * state[j].conj());
        }
    }
    rho
}

fn column(u: &DenseMatrix, col: usize) -> Vec<Complex64> {
    (0..u.dim()).map(|row| u.get(row, col)).collect()
}

fn apply_matrix(u: &DenseMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..u.dim())
        .map(|row| (0..u.dim()).map(|k| u.get(row, k) * v[k]).sum())
        .collect()
}

/// Recover (S, a) from a unitary that is promised to be proportional to a
/// Clifford operation, using only Wigner-function line supports: evolved
/// position states give images of the lines {q = const}, evolved momentum
/// states images of {p = const}, and pairwise intersections locate the
/// images of single phase-space points.
pub fn recover_symplectomorphism(
    u: &DenseMatrix,
    d: u64,
    n: usize,
) -> Result<AffineSymplectomorphism, PhaseSpaceError> {
    let dim = (d as usize).pow(n as u32);
    if u.dim() != dim {
        return Err(PhaseSpaceError::DimensionMismatch {
            expected: dim,
            got: u.dim(),
        });
    }
    let support_tol = 0.5 / dim as f64;
    let line_of_position = |q0: &[u64]| -> Result<Vec<usize>, PhaseSpaceError> {
        let state = column(u, pack(q0, d));
        let w = wigner_transform(&projector(&state), d, n)?;
        let support = w.support(support_tol);
        if support.len() != dim {
            return Err(PhaseSpaceError::NotClifford(format!(
                "position state maps to {} support points, expected {dim}",
                support.len()
            )));
        }
        Ok(support)
    };
    let line_of_momentum = |p0: &[u64]| -> Result<Vec<usize>, PhaseSpaceError> {
        let state = apply_matrix(u, &momentum_state(p0, d));
        let w = wigner_transform(&projector(&state), d, n)?;
        let support = w.support(support_tol);
        if support.len() != dim {
            return Err(PhaseSpaceError::NotClifford(format!(
                "momentum state maps to {} support points, expected {dim}",
                support.len()
            )));
        }
        Ok(support)
    };
    let intersect_point = |a: &[usize], b: &[usize]| -> Result<Vec<u64>, PhaseSpaceError> {
        let common: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
        if common.len() != 1 {
            return Err(PhaseSpaceError::NotClifford(format!(
                "line images intersect in {} points, expected 1",
                common.len()
            )));
        }
        Ok(unpack(common[0], d, 2 * n))
    };

    let zero = vec![0u64; n];
    let q_zero_line = line_of_position(&zero)?;
    let p_zero_line = line_of_momentum(&zero)?;
    // T(0) is the common point of the images of the two coordinate lines.
    let a = intersect_point(&q_zero_line, &p_zero_line)?;

    let mut s = MatFp::zeros(2 * n, 2 * n, d);
    // Column j of S is T(e_j) - a. Unit position vectors sit on the p = 0
    // line and on their own q = e_j line; unit momentum vectors dually.
    for j in 0..n {
        let mut e = vec![0u64; n];
        e[j] = 1;
        let here = line_of_position(&e)?;
        let point = intersect_point(&here, &p_zero_line)?;
        for (row, (&pt, &av)) in point.iter().zip(&a).enumerate() {
            s.set(row, j, (pt + d - av) % d);
        }
        let here = line_of_momentum(&e)?;
        let point = intersect_point(&q_zero_line, &here)?;
        for (row, (&pt, &av)) in point.iter().zip(&a).enumerate() {
            s.set(row, n + j, (pt + d - av) % d);
        }
    }

    let map = AffineSymplectomorphism { d, n, s, a };
    if !map.is_symplectic() {
        return Err(PhaseSpaceError::NotClifford(
            "recovered matrix is not symplectic".into(),
        ));
    }
    // Confirm covariance on a few seeded random mixed states.
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    for _ in 0..3 {
        let rho = crate::random::random_density(&mut rng, dim);
        let residual = covariance_residual(u, &map, &rho)?;
        if residual > 1e-8 {
            return Err(PhaseSpaceError::NotClifford(format!(
                "covariance residual {residual:.3e} on a random state"
            )));
        }
    }
    Ok(map)
}
