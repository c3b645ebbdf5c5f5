//! Continuous-variable circuits handled purely symbolically in exact
//! rational arithmetic.
//!
//! The gate set is the Fourier transform and its inverse, the quadratic
//! phase gate P(eta), the position shift X(tau), the controlled sum and
//! its inverse, and the identity. No amplitude is ever evaluated: the
//! engine manipulates the phase polynomial of the path decomposition, the
//! affine boundary constraints, the rational symplectomorphisms of the
//! gates, and their generating functions, and decides every identity by
//! exact polynomial equality. Gate parameters may be left symbolic, in
//! which case they appear as dedicated variables indexed by gate position.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::algebra::forms::{d_of_poly, integrate_exact_one_form, theta};
use crate::algebra::{AlgebraError, DifferentialForm, Polynomial, Rat, Var};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CvGate {
    F(usize),
    FDag(usize),
    Phase { wire: usize, eta: Option<Rat> },
    Shift { wire: usize, tau: Option<Rat> },
    Sum(usize, usize),
    SumDag(usize, usize),
    Id(usize),
}

impl CvGate {
    pub fn wires(&self) -> Vec<usize> {
        match self {
            CvGate::F(w) | CvGate::FDag(w) | CvGate::Id(w) => vec![*w],
            CvGate::Phase { wire, .. } | CvGate::Shift { wire, .. } => vec![*wire],
            CvGate::Sum(c, t) | CvGate::SumDag(c, t) => vec![*c, *t],
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            CvGate::F(_) => "F",
            CvGate::FDag(_) => "FDAG",
            CvGate::Phase { .. } => "P",
            CvGate::Shift { .. } => "X",
            CvGate::Sum(..) => "SUM",
            CvGate::SumDag(..) => "SUMDAG",
            CvGate::Id(_) => "ID",
        }
    }

    /// True when every parameter the gate carries is a concrete rational.
    pub fn is_numeric(&self) -> bool {
        !matches!(
            self,
            CvGate::Phase { eta: None, .. } | CvGate::Shift { tau: None, .. }
        )
    }
}

fn render_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CvGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CvGate::Phase { wire, eta: Some(e) } => {
                write!(f, "P {} {}", wire, render_rat(e))
            }
            CvGate::Phase { wire, eta: None } => write!(f, "P {wire} ?"),
            CvGate::Shift { wire, tau: Some(t) } => {
                write!(f, "X {} {}", wire, render_rat(t))
            }
            CvGate::Shift { wire, tau: None } => write!(f, "X {wire} ?"),
            other => {
                write!(f, "{}", other.mnemonic())?;
                for w in other.wires() {
                    write!(f, " {w}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CvCircuit {
    pub n: usize,
    pub gates: Vec<CvGate>,
}

impl CvCircuit {
    pub fn new(n: usize, gates: Vec<CvGate>) -> Result<Self, CvError> {
        if n == 0 {
            return Err(CvError::at_line(0, CvErrorKind::NoWires));
        }
        let circuit = CvCircuit { n, gates };
        for (idx, gate) in circuit.gates.iter().enumerate() {
            circuit
                .check_gate(gate)
                .map_err(|kind| CvError::at_line(idx + 1, kind))?;
        }
        Ok(circuit)
    }

    fn check_gate(&self, gate: &CvGate) -> Result<(), CvErrorKind> {
        for w in gate.wires() {
            if w >= self.n {
                return Err(CvErrorKind::WireOutOfRange { wire: w, n: self.n });
            }
        }
        if let CvGate::Sum(c, t) | CvGate::SumDag(c, t) = gate {
            if c == t {
                return Err(CvErrorKind::SumNeedsTwoWires(*c));
            }
        }
        Ok(())
    }

    pub fn is_numeric(&self) -> bool {
        self.gates.iter().all(CvGate::is_numeric)
    }

    pub fn fourier_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, CvGate::F(_)))
            .count()
    }

    pub fn fourier_dag_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, CvGate::FDag(_)))
            .count()
    }

    /// Canonical text form; defined only for fully numeric circuits.
    pub fn to_text(&self) -> Option<String> {
        if !self.is_numeric() {
            return None;
        }
        let mut out = format!("cv\nn {}\n", self.n);
        for gate in &self.gates {
            out.push_str(&gate.to_string());
            out.push('\n');
        }
        Some(out)
    }
}

#[derive(Clone, PartialEq, Debug, thiserror::Error)]
pub enum CvError {
    #[error("line {line}: {kind}")]
    Text { line: usize, kind: CvErrorKind },
    #[error("gate {gate} carries a symbolic parameter; this operation needs numbers")]
    SymbolicParameter { gate: usize },
    #[error("map is not a symplectomorphism: the canonical difference form is not closed")]
    NotSymplectic,
    #[error("momentum symbols survived the boundary substitution")]
    SubstitutionSingular,
    #[error("classical trajectories through the same endpoints carry different actions")]
    InconsistentAction,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl CvError {
    fn at_line(line: usize, kind: CvErrorKind) -> Self {
        CvError::Text { line, kind }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum CvErrorKind {
    #[error("circuit needs at least one wire")]
    NoWires,
    #[error("wire {wire} out of range for {n} wires")]
    WireOutOfRange { wire: usize, n: usize },
    #[error("SUM needs two distinct wires, got {0} twice")]
    SumNeedsTwoWires(usize),
    #[error("unknown mnemonic '{0}'")]
    UnknownMnemonic(String),
    #[error("malformed line: expected {expected}")]
    Malformed { expected: &'static str },
    #[error("bad integer '{0}'")]
    BadInteger(String),
    #[error("bad rational '{0}'")]
    BadRational(String),
    #[error("duplicate '{0}' header")]
    DuplicateHeader(&'static str),
    #[error("missing '{0}' header before first gate")]
    MissingHeader(&'static str),
}

fn parse_rational(tok: &str) -> Option<Rat> {
    use num_bigint::BigInt;
    let (numer, denom) = match tok.split_once('/') {
        Some((a, b)) => (a, b),
        None => (tok, "1"),
    };
    let numer: BigInt = numer.parse().ok()?;
    let denom: BigInt = denom.parse().ok()?;
    if denom == BigInt::from(0) {
        return None;
    }
    Some(Rat::new(numer, denom))
}

/// Parse the line-oriented continuous-variable format:
///
/// ```text
/// cv
/// n 2
/// F 0
/// P 1 -1/2
/// X 0 3
/// SUM 0 1
/// ```
///
/// The `cv` header and one `n` line must appear before any gate. Gate
/// parameters are exact rationals written as `a/b` or as integers.
pub fn parse_cv_circuit(text: &str) -> Result<CvCircuit, CvError> {
    let mut saw_cv = false;
    let mut n: Option<usize> = None;
    let mut gates: Vec<CvGate> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let fail = |kind| Err(CvError::at_line(line_no, kind));
        match toks[0] {
            "cv" => {
                if saw_cv {
                    return fail(CvErrorKind::DuplicateHeader("cv"));
                }
                if toks.len() != 1 {
                    return fail(CvErrorKind::Malformed { expected: "cv" });
                }
                saw_cv = true;
            }
            "n" => {
                if n.is_some() {
                    return fail(CvErrorKind::DuplicateHeader("n"));
                }
                if toks.len() != 2 {
                    return fail(CvErrorKind::Malformed { expected: "n <wires>" });
                }
                match toks[1].parse::<usize>() {
                    Ok(v) => n = Some(v),
                    Err(_) => return fail(CvErrorKind::BadInteger(toks[1].into())),
                }
            }
            mnemonic => {
                if !saw_cv {
                    return fail(CvErrorKind::MissingHeader("cv"));
                }
                if n.is_none() {
                    return fail(CvErrorKind::MissingHeader("n"));
                }
                let wire = |tok: &str| -> Result<usize, CvError> {
                    tok.parse::<usize>()
                        .map_err(|_| CvError::at_line(line_no, CvErrorKind::BadInteger(tok.into())))
                };
                let gate = match (mnemonic, toks.len()) {
                    ("F", 2) => CvGate::F(wire(toks[1])?),
                    ("FDAG", 2) => CvGate::FDag(wire(toks[1])?),
                    ("ID", 2) => CvGate::Id(wire(toks[1])?),
                    ("P", 3) => match parse_rational(toks[2]) {
                        Some(eta) => CvGate::Phase { wire: wire(toks[1])?, eta: Some(eta) },
                        None => return fail(CvErrorKind::BadRational(toks[2].into())),
                    },
                    ("X", 3) => match parse_rational(toks[2]) {
                        Some(tau) => CvGate::Shift { wire: wire(toks[1])?, tau: Some(tau) },
                        None => return fail(CvErrorKind::BadRational(toks[2].into())),
                    },
                    ("SUM", 3) => CvGate::Sum(wire(toks[1])?, wire(toks[2])?),
                    ("SUMDAG", 3) => CvGate::SumDag(wire(toks[1])?, wire(toks[2])?),
                    ("F" | "FDAG" | "ID", _) => {
                        return fail(CvErrorKind::Malformed { expected: "<gate> <wire>" })
                    }
                    ("P", _) => return fail(CvErrorKind::Malformed { expected: "P <wire> <a/b>" }),
                    ("X", _) => return fail(CvErrorKind::Malformed { expected: "X <wire> <a/b>" }),
                    ("SUM" | "SUMDAG", _) => {
                        return fail(CvErrorKind::Malformed {
                            expected: "<gate> <control> <target>",
                        })
                    }
                    _ => return fail(CvErrorKind::UnknownMnemonic(mnemonic.into())),
                };
                // Validate here so the error names the source line, not
                // the gate index.
                let n_val = n.expect("header checked above");
                if let Some(w) = gate.wires().into_iter().find(|&w| w >= n_val) {
                    return fail(CvErrorKind::WireOutOfRange { wire: w, n: n_val });
                }
                if let CvGate::Sum(c, t) | CvGate::SumDag(c, t) = &gate {
                    if c == t {
                        return fail(CvErrorKind::SumNeedsTwoWires(*c));
                    }
                }
                gates.push(gate);
            }
        }
    }
    if !saw_cv {
        return Err(CvError::at_line(0, CvErrorKind::MissingHeader("cv")));
    }
    let Some(n) = n else {
        return Err(CvError::at_line(0, CvErrorKind::MissingHeader("n")));
    };
    CvCircuit::new(n, gates)
}

fn rat_poly(r: &Rat) -> Polynomial<Rat> {
    Polynomial::constant(r.clone())
}

fn eta_poly(gate_idx: usize, eta: &Option<Rat>) -> Polynomial<Rat> {
    match eta {
        Some(e) => rat_poly(e),
        None => Polynomial::var_rat(Var::Eta(gate_idx)),
    }
}

fn tau_poly(gate_idx: usize, tau: &Option<Rat>) -> Polynomial<Rat> {
    match tau {
        Some(t) => rat_poly(t),
        None => Polynomial::var_rat(Var::Tau(gate_idx)),
    }
}

/// v -> S v + a with exact rational entries; symbolic gate parameters are
/// carried inside the entries as scalar variables.
#[derive(Clone, PartialEq, Debug)]
pub struct CvMap {
    pub n: usize,
    pub s: Vec<Vec<Polynomial<Rat>>>,
    pub a: Vec<Polynomial<Rat>>,
}

fn poly_mat_identity(m: usize) -> Vec<Vec<Polynomial<Rat>>> {
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        Polynomial::constant(Rat::one())
                    } else {
                        Polynomial::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn poly_mat_mul(
    a: &[Vec<Polynomial<Rat>>],
    b: &[Vec<Polynomial<Rat>>],
) -> Vec<Vec<Polynomial<Rat>>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = Polynomial::zero();
                    for (k, b_row) in b.iter().enumerate().take(inner) {
                        acc = acc.add(&a[i][k].mul(&b_row[j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn poly_mat_transpose(a: &[Vec<Polynomial<Rat>>]) -> Vec<Vec<Polynomial<Rat>>> {
    let rows = a.len();
    let cols = a[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j].clone()).collect())
        .collect()
}

fn poly_j_matrix(n: usize) -> Vec<Vec<Polynomial<Rat>>> {
    let mut j = vec![vec![Polynomial::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        j[i][n + i] = Polynomial::constant(Rat::one());
        j[n + i][i] = Polynomial::constant(-Rat::one());
    }
    j
}

impl CvMap {
    pub fn identity(n: usize) -> Self {
        CvMap {
            n,
            s: poly_mat_identity(2 * n),
            a: vec![Polynomial::zero(); 2 * n],
        }
    }

    pub fn apply(&self, v: &[Polynomial<Rat>]) -> Vec<Polynomial<Rat>> {
        assert_eq!(v.len(), 2 * self.n);
        self.s
            .iter()
            .zip(&self.a)
            .map(|(row, av)| {
                let mut acc = av.clone();
                for (entry, coord) in row.iter().zip(v) {
                    acc = acc.add(&entry.mul(coord));
                }
                acc
            })
            .collect()
    }

    /// Image of the phase-space coordinate symbols themselves.
    pub fn coordinate_images(&self) -> Vec<Polynomial<Rat>> {
        let coords: Vec<Polynomial<Rat>> = (0..self.n)
            .map(|i| Polynomial::var_rat(Var::In(i)))
            .chain((0..self.n).map(|i| Polynomial::var_rat(Var::PIn(i))))
            .collect();
        self.apply(&coords)
    }

    /// S^T J S = J, exactly, with symbolic entries allowed.
    pub fn is_symplectic(&self) -> bool {
        let j = poly_j_matrix(self.n);
        let lhs = poly_mat_mul(&poly_mat_mul(&poly_mat_transpose(&self.s), &j), &self.s);
        lhs == j
    }

    /// True when every matrix and translation entry is a plain rational.
    pub fn is_numeric(&self) -> bool {
        self.s
            .iter()
            .flatten()
            .chain(self.a.iter())
            .all(|p| p.total_degree() == 0)
    }

    fn numeric_entries(&self) -> Option<(Vec<Vec<Rat>>, Vec<Rat>)> {
        let scalar = |p: &Polynomial<Rat>| -> Option<Rat> {
            if p.is_zero() {
                Some(Rat::new(0.into(), 1.into()))
            } else if p.total_degree() == 0 {
                p.constant_term().cloned()
            } else {
                None
            }
        };
        let mut s = Vec::with_capacity(2 * self.n);
        for row in &self.s {
            let mut out = Vec::with_capacity(2 * self.n);
            for entry in row {
                out.push(scalar(entry)?);
            }
            s.push(out);
        }
        let mut a = Vec::with_capacity(2 * self.n);
        for entry in &self.a {
            a.push(scalar(entry)?);
        }
        Some((s, a))
    }

    /// Numeric application to a rational phase-space point.
    pub fn apply_point(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let (s, a) = self.numeric_entries()?;
        Some(
            s.iter()
                .zip(&a)
                .map(|(row, av)| {
                    row.iter()
                        .zip(v)
                        .fold(av.clone(), |acc, (c, x)| acc + c * x)
                })
                .collect(),
        )
    }
}

/// compose(g, f) = g after f.
pub fn cv_compose(g: &CvMap, f: &CvMap) -> CvMap {
    assert_eq!(g.n, f.n);
    let s = poly_mat_mul(&g.s, &f.s);
    let a = g
        .s
        .iter()
        .zip(&g.a)
        .map(|(row, gav)| {
            let mut acc = gav.clone();
            for (entry, fav) in row.iter().zip(&f.a) {
                acc = acc.add(&entry.mul(fav));
            }
            acc
        })
        .collect();
    CvMap { n: g.n, s, a }
}

/// The phase-space action of one gate, embedded on n wires. Symbolic
/// parameters are named after the gate's position in the circuit.
pub fn cv_symplectomorphism(gate: &CvGate, gate_idx: usize, n: usize) -> CvMap {
    let mut map = CvMap::identity(n);
    let one = Polynomial::constant(Rat::one());
    match gate {
        CvGate::F(w) => {
            // (q, p) -> (p, -q)
            map.s[*w][*w] = Polynomial::zero();
            map.s[*w][n + w] = one.clone();
            map.s[n + w][n + w] = Polynomial::zero();
            map.s[n + w][*w] = one.neg();
        }
        CvGate::FDag(w) => {
            // (q, p) -> (-p, q)
            map.s[*w][*w] = Polynomial::zero();
            map.s[*w][n + w] = one.neg();
            map.s[n + w][n + w] = Polynomial::zero();
            map.s[n + w][*w] = one;
        }
        CvGate::Phase { wire, eta } => {
            // (q, p) -> (q, p - eta q)
            map.s[n + wire][*wire] = eta_poly(gate_idx, eta).neg();
        }
        CvGate::Shift { wire, tau } => {
            // (q, p) -> (q + tau, p)
            map.a[*wire] = tau_poly(gate_idx, tau);
        }
        CvGate::Sum(c, t) => {
            // (q_c, q_t, p_c, p_t) -> (q_c, q_t + q_c, p_c - p_t, p_t)
            map.s[*t][*c] = one.clone();
            map.s[n + c][n + t] = one.neg();
        }
        CvGate::SumDag(c, t) => {
            map.s[*t][*c] = one.neg();
            map.s[n + c][n + t] = one;
        }
        CvGate::Id(_) => {}
    }
    map
}

/// The composite map of the whole circuit, last gate outermost.
pub fn cv_circuit_symplectomorphism(circuit: &CvCircuit) -> CvMap {
    let mut acc = CvMap::identity(circuit.n);
    for (idx, gate) in circuit.gates.iter().enumerate() {
        acc = cv_compose(&cv_symplectomorphism(gate, idx, circuit.n), &acc);
    }
    acc
}

fn local_cv_gate(gate: &CvGate) -> CvGate {
    match gate {
        CvGate::F(_) => CvGate::F(0),
        CvGate::FDag(_) => CvGate::FDag(0),
        CvGate::Phase { eta, .. } => CvGate::Phase { wire: 0, eta: eta.clone() },
        CvGate::Shift { tau, .. } => CvGate::Shift { wire: 0, tau: tau.clone() },
        CvGate::Sum(..) => CvGate::Sum(0, 1),
        CvGate::SumDag(..) => CvGate::SumDag(0, 1),
        CvGate::Id(_) => CvGate::Id(0),
    }
}

/// Closed-form generating function of one gate over its own wires, with
/// position inputs as `Var::In` and position outputs as `Var::Out`:
/// -qQ for the Fourier gate, qQ for its inverse, -(eta/2) q^2 for the
/// quadratic phase gate, zero for the rest.
pub fn cv_generating_function(gate: &CvGate, gate_idx: usize) -> Polynomial<Rat> {
    let q = Polynomial::var_rat(Var::In(0));
    let qq = Polynomial::monomial(&[(Var::In(0), 1), (Var::Out(0), 1)], Rat::one());
    match gate {
        CvGate::F(_) => qq.neg(),
        CvGate::FDag(_) => qq,
        CvGate::Phase { eta, .. } => {
            let minus_half = Polynomial::const_ratio(-1, 2);
            minus_half.mul(&eta_poly(gate_idx, eta)).mul(&q.pow(2))
        }
        CvGate::Shift { .. } | CvGate::Sum(..) | CvGate::SumDag(..) | CvGate::Id(_) => {
            Polynomial::zero()
        }
    }
}

/// sum_i P_i dQ_i - sum_i p_i dq_i for the map, as a rational one-form.
pub fn cv_one_form_difference(map: &CvMap) -> DifferentialForm<Rat> {
    let n = map.n;
    let images = map.coordinate_images();
    let mut eps = DifferentialForm::zero();
    for i in 0..n {
        let p_out = DifferentialForm::from_poly(images[n + i].clone());
        eps = eps.add(&p_out.wedge(&d_of_poly(&images[i])));
    }
    eps.sub(&theta(n, &Rat::one()))
}

fn substitute_outputs(
    g: &Polynomial<Rat>,
    images: &[Polynomial<Rat>],
    n: usize,
) -> Polynomial<Rat> {
    let mut subs: BTreeMap<Var, Polynomial<Rat>> = BTreeMap::new();
    for (i, image) in images.iter().take(n).enumerate() {
        subs.insert(Var::Out(i), image.clone());
    }
    g.substitute_map(&subs)
}

/// The defining relation of a generating function, decided symbolically:
/// sum P_i dQ_i - sum p_i dq_i = d(G(q, Q(q, p))). For the two Fourier
/// gates, where (q, Q) are independent coordinates on the graph of the
/// map, the partial-derivative relations p = -dG/dq and P = dG/dQ are
/// checked as well.
pub fn cv_check_generating_relation(gate: &CvGate) -> bool {
    let local = local_cv_gate(gate);
    let arity = local.wires().len();
    let map = cv_symplectomorphism(&local, 0, arity);
    let g = cv_generating_function(&local, 0);
    let images = map.coordinate_images();
    let gtilde = substitute_outputs(&g, &images, arity);
    if cv_one_form_difference(&map) != d_of_poly(&gtilde) {
        return false;
    }
    if matches!(gate, CvGate::F(_) | CvGate::FDag(_)) {
        return graph_relations_hold(&map, &g);
    }
    true
}

fn graph_relations_hold(map: &CvMap, g: &Polynomial<Rat>) -> bool {
    let n = map.n;
    let images = map.coordinate_images();
    for i in 0..n {
        let dg_dq = substitute_outputs(&g.partial_derivative(Var::In(i)), &images, n);
        if dg_dq.neg() != Polynomial::var_rat(Var::PIn(i)) {
            return false;
        }
        let dg_dq_out = substitute_outputs(&g.partial_derivative(Var::Out(i)), &images, n);
        if dg_dq_out != images[n + i] {
            return false;
        }
    }
    true
}

/// Strict check that a claimed G(q, Q) generates the map as a graph over
/// (q, Q): the one-form identity must hold AND the partial-derivative
/// relations p = -dG/dq, P = dG/dQ must hold identically. Maps that are
/// not graphs over (q, Q) (for instance pure momentum shifts) fail the
/// derivative relations for every claimed G, which is the point: no
/// function of (q, Q) generates them in this sense.
pub fn cv_check_generating_pair(map: &CvMap, claimed: &Polynomial<Rat>) -> bool {
    let images = map.coordinate_images();
    let gtilde = substitute_outputs(claimed, &images, map.n);
    if cv_one_form_difference(map) != d_of_poly(&gtilde) {
        return false;
    }
    graph_relations_hold(map, claimed)
}

/// Wire labels, phase polynomial, and free-parameter count of a circuit.
#[derive(Clone, Debug)]
pub struct CvLabeling {
    pub n: usize,
    /// states[k][i] is the configuration of wire i after the first k gates,
    /// as a polynomial in the inputs, the free parameters, and any
    /// symbolic gate parameters.
    pub states: Vec<Vec<Polynomial<Rat>>>,
    pub phase: Polynomial<Rat>,
    pub free_count: usize,
}

impl CvLabeling {
    /// B^(i): the output configuration of each wire.
    pub fn boundary(&self) -> &[Polynomial<Rat>] {
        self.states.last().expect("at least the input row")
    }
}

/// Walk the circuit once, labelling each wire with its configuration: the
/// two Fourier gates mint a fresh free parameter for their output and add
/// -+ (input * output) to the phase, the quadratic phase gate adds
/// -(eta/2) input^2, the shifts and sums rewrite labels without any phase.
pub fn cv_label_wires(circuit: &CvCircuit) -> CvLabeling {
    let n = circuit.n;
    let mut current: Vec<Polynomial<Rat>> = (0..n)
        .map(|i| Polynomial::var_rat(Var::Q0(i)))
        .collect();
    let mut states = vec![current.clone()];
    let mut phase = Polynomial::zero();
    let mut free = 0usize;
    for (idx, gate) in circuit.gates.iter().enumerate() {
        match gate {
            CvGate::F(w) => {
                let fresh = Polynomial::var_rat(Var::Free(free));
                free += 1;
                phase = phase.sub(&current[*w].mul(&fresh));
                current[*w] = fresh;
            }
            CvGate::FDag(w) => {
                let fresh = Polynomial::var_rat(Var::Free(free));
                free += 1;
                phase = phase.add(&current[*w].mul(&fresh));
                current[*w] = fresh;
            }
            CvGate::Phase { wire, eta } => {
                let minus_half = Polynomial::const_ratio(-1, 2);
                phase = phase.add(
                    &minus_half
                        .mul(&eta_poly(idx, eta))
                        .mul(&current[*wire].pow(2)),
                );
            }
            CvGate::Shift { wire, tau } => {
                current[*wire] = current[*wire].add(&tau_poly(idx, tau));
            }
            CvGate::Sum(c, t) => {
                current[*t] = current[*t].add(&current[*c].clone());
            }
            CvGate::SumDag(c, t) => {
                current[*t] = current[*t].sub(&current[*c].clone());
            }
            CvGate::Id(_) => {}
        }
        states.push(current.clone());
    }
    CvLabeling {
        n,
        states,
        phase,
        free_count: free,
    }
}

/// The phase polynomial, the boundary constraints B^(i), and the counts
/// behind the normalization constant ((1-i)/2 sqrt pi)^#F ((1+i)/2 sqrt
/// pi)^#Fdag, reported symbolically as the two exponents.
pub struct CvPhaseFunctional {
    pub phase: Polynomial<Rat>,
    pub constraints: Vec<Polynomial<Rat>>,
    pub fourier_count: usize,
    pub fourier_dag_count: usize,
    pub free_count: usize,
}

pub fn cv_phase_functional(circuit: &CvCircuit) -> CvPhaseFunctional {
    let labeling = cv_label_wires(circuit);
    CvPhaseFunctional {
        phase: labeling.phase.clone(),
        constraints: labeling.boundary().to_vec(),
        fourier_count: circuit.fourier_count(),
        fourier_dag_count: circuit.fourier_dag_count(),
        free_count: labeling.free_count,
    }
}

/// S(gamma) = sum_k G_k(q_{k-1}, q_k) over the position symbols
/// `Var::Path { step, wire }`.
pub fn cv_action_functional(circuit: &CvCircuit) -> Polynomial<Rat> {
    let mut total = Polynomial::zero();
    for (k, gate) in circuit.gates.iter().enumerate() {
        let g = cv_generating_function(&local_cv_gate(gate), k);
        let mut subs: BTreeMap<Var, Polynomial<Rat>> = BTreeMap::new();
        for (slot, &w) in gate.wires().iter().enumerate() {
            subs.insert(
                Var::In(slot),
                Polynomial::var_rat(Var::Path { step: k, wire: w }),
            );
            subs.insert(
                Var::Out(slot),
                Polynomial::var_rat(Var::Path { step: k + 1, wire: w }),
            );
        }
        total = total.add(&g.substitute_map(&subs));
    }
    total
}

/// Position symbols -> labelled wire expressions.
pub fn cv_path_symbol_images(lab: &CvLabeling) -> BTreeMap<Var, Polynomial<Rat>> {
    let mut map = BTreeMap::new();
    for (step, row) in lab.states.iter().enumerate() {
        for (wire, poly) in row.iter().enumerate() {
            map.insert(Var::Path { step, wire }, poly.clone());
        }
    }
    map
}

/// The action functional, pushed through the wire labels, must equal the
/// phase functional identically over the rationals, symbolic parameters
/// included.
pub fn cv_verify_main(circuit: &CvCircuit) -> bool {
    let labeling = cv_label_wires(circuit);
    let images = cv_path_symbol_images(&labeling);
    let action = cv_action_functional(circuit).substitute_map(&images);
    action == labeling.phase
}

/// Reconstruct G(q, Q) for a numeric rational affine symplectomorphism by
/// integrating the canonical one-form difference and eliminating the
/// momenta through B p = Q - A q - a_q (free momenta pinned to zero).
pub fn cv_generating_from_map(map: &CvMap) -> Result<Polynomial<Rat>, CvError> {
    let Some((s, a)) = map.numeric_entries() else {
        return Err(CvError::SymbolicParameter { gate: 0 });
    };
    let n = map.n;
    let eps = cv_one_form_difference(map);
    if !eps.exterior_derivative().is_zero() {
        return Err(CvError::NotSymplectic);
    }
    let tilde = integrate_exact_one_form(&eps)?;

    let mut b: Vec<Vec<Rat>> = (0..n).map(|i| s[i][n..2 * n].to_vec()).collect();
    let mut rhs: Vec<Polynomial<Rat>> = (0..n)
        .map(|i| {
            let mut poly =
                Polynomial::linear(Var::Out(i), Rat::one()).sub(&rat_poly(&a[i]));
            for j in 0..n {
                poly = poly.sub(&Polynomial::linear(Var::In(j), s[i][j].clone()));
            }
            poly
        })
        .collect();

    use num_traits::Zero;
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; n];
    let mut row = 0usize;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| !b[r][col].is_zero()) else {
            continue;
        };
        b.swap(row, r);
        rhs.swap(row, r);
        let inv = Rat::one() / b[row][col].clone();
        for x in b[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        rhs[row] = rhs[row].scale(&inv);
        for rr in 0..n {
            if rr != row && !b[rr][col].is_zero() {
                let f = b[rr][col].clone();
                for c in 0..n {
                    let sub = b[row][c].clone() * f.clone();
                    b[rr][c] = b[rr][c].clone() - sub;
                }
                rhs[rr] = rhs[rr].sub(&rhs[row].scale(&f));
            }
        }
        pivot_row_of_col[col] = Some(row);
        row += 1;
    }

    let mut subs: BTreeMap<Var, Polynomial<Rat>> = BTreeMap::new();
    for (col, pivot) in pivot_row_of_col.iter().enumerate() {
        let image = match pivot {
            Some(r) => rhs[*r].clone(),
            None => Polynomial::zero(),
        };
        subs.insert(Var::PIn(col), image);
    }
    let g = tilde.substitute_map(&subs);
    if g.vars().iter().any(|v| matches!(v, Var::PIn(_))) {
        return Err(CvError::SubstitutionSingular);
    }
    Ok(g.without_constant())
}

/// A rational classical trajectory: positions at every time step for one
/// initial momentum solving the boundary problem.
#[derive(Clone, PartialEq, Debug)]
pub struct CvTrajectory {
    pub p0: Vec<Rat>,
    pub positions: Vec<Vec<Rat>>,
}

/// Representative classical trajectories from q0 to qn: the particular
/// solution of the affine boundary system plus one representative per
/// kernel direction. `None` when no trajectory connects the endpoints.
pub fn cv_classical_trajectories(
    circuit: &CvCircuit,
    q0: &[Rat],
    qn: &[Rat],
) -> Result<Option<Vec<CvTrajectory>>, CvError> {
    assert_eq!(q0.len(), circuit.n);
    assert_eq!(qn.len(), circuit.n);
    if let Some(idx) = circuit.gates.iter().position(|g| !g.is_numeric()) {
        return Err(CvError::SymbolicParameter { gate: idx + 1 });
    }
    let n = circuit.n;
    let composite = cv_circuit_symplectomorphism(circuit);
    let (s, a) = composite.numeric_entries().expect("numeric circuit");

    use num_traits::Zero;
    // Solve B p0 = qn - A q0 - a_q exactly over the rationals.
    let mut b: Vec<Vec<Rat>> = (0..n).map(|i| s[i][n..2 * n].to_vec()).collect();
    let mut rhs: Vec<Rat> = (0..n)
        .map(|i| {
            let mut v = qn[i].clone() - a[i].clone();
            for j in 0..n {
                v = v - s[i][j].clone() * q0[j].clone();
            }
            v
        })
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        let Some(r) = (row..n).find(|&r| !b[r][col].is_zero()) else {
            continue;
        };
        b.swap(row, r);
        rhs.swap(row, r);
        let inv = Rat::one() / b[row][col].clone();
        for x in b[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        rhs[row] = rhs[row].clone() * inv;
        for rr in 0..n {
            if rr != row && !b[rr][col].is_zero() {
                let f = b[rr][col].clone();
                for c in 0..n {
                    let sub = b[row][c].clone() * f.clone();
                    b[rr][c] = b[rr][c].clone() - sub;
                }
                rhs[rr] = rhs[rr].clone() - rhs[row].clone() * f;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    for r in row..n {
        if !rhs[r].is_zero() {
            return Ok(None);
        }
    }
    let zero = Rat::zero();
    let mut particular = vec![zero.clone(); n];
    for (r, &col) in pivot_cols.iter().enumerate() {
        particular[col] = rhs[r].clone();
    }
    let mut momenta = vec![particular.clone()];
    for free_col in (0..n).filter(|c| !pivot_cols.contains(c)) {
        let mut kernel = vec![zero.clone(); n];
        kernel[free_col] = Rat::one();
        for (r, &col) in pivot_cols.iter().enumerate() {
            kernel[col] = -b[r][free_col].clone();
        }
        let shifted: Vec<Rat> = particular
            .iter()
            .zip(&kernel)
            .map(|(p, k)| p.clone() + k.clone())
            .collect();
        momenta.push(shifted);
    }

    let gate_maps: Vec<CvMap> = circuit
        .gates
        .iter()
        .enumerate()
        .map(|(idx, g)| cv_symplectomorphism(g, idx, n))
        .collect();
    let mut found = Vec::new();
    for p0 in momenta {
        let mut v: Vec<Rat> = q0.iter().chain(p0.iter()).cloned().collect();
        let mut positions = vec![q0.to_vec()];
        for map in &gate_maps {
            v = map.apply_point(&v).expect("numeric circuit");
            positions.push(v[..n].to_vec());
        }
        debug_assert_eq!(&positions[circuit.gates.len()][..], qn);
        found.push(CvTrajectory { p0, positions });
    }
    Ok(Some(found))
}

fn eval_cv_action(
    action: &Polynomial<Rat>,
    traj: &CvTrajectory,
) -> Result<Rat, AlgebraError> {
    let mut point: BTreeMap<Var, Rat> = BTreeMap::new();
    for (step, qs) in traj.positions.iter().enumerate() {
        for (wire, q) in qs.iter().enumerate() {
            point.insert(Var::Path { step, wire }, q.clone());
        }
    }
    action.eval(&point)
}

/// Every representative trajectory carries the same action, equal to the
/// whole-circuit generating function at the endpoints up to a single
/// rational constant; the constant is returned. `None` means no classical
/// trajectory connects the endpoints, which is a legitimate outcome, not
/// a failure.
pub fn cv_action_defect(
    circuit: &CvCircuit,
    q0: &[Rat],
    qn: &[Rat],
) -> Result<Option<Rat>, CvError> {
    let Some(trajectories) = cv_classical_trajectories(circuit, q0, qn)? else {
        return Ok(None);
    };
    let action = cv_action_functional(circuit);
    let mut value: Option<Rat> = None;
    for traj in &trajectories {
        let s = eval_cv_action(&action, traj)?;
        match &value {
            None => value = Some(s),
            Some(prev) if *prev != s => return Err(CvError::InconsistentAction),
            _ => {}
        }
    }
    let g_total = cv_generating_from_map(&cv_circuit_symplectomorphism(circuit))?;
    let mut endpoint: BTreeMap<Var, Rat> = BTreeMap::new();
    for (i, q) in q0.iter().enumerate() {
        endpoint.insert(Var::In(i), q.clone());
    }
    for (i, q) in qn.iter().enumerate() {
        endpoint.insert(Var::Out(i), q.clone());
    }
    let g = g_total.eval(&endpoint)?;
    Ok(Some(value.expect("nonempty") - g))
}
