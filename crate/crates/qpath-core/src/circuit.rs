//! Circuit representation, text format, and the wire-labeling pass that
//! rewrites a circuit as affine boundary expressions over free parameters.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{is_odd_prime, Fp, Polynomial, Var};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Gate {
    /// Fourier gate on one wire.
    F(usize),
    /// Quadratic phase gate on one wire.
    R(usize),
    /// Controlled sum: control, target.
    Sum(usize, usize),
    /// Explicit identity step on one wire.
    Id(usize),
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::F(w) | Gate::R(w) | Gate::Id(w) => vec![w],
            Gate::Sum(c, t) => vec![c, t],
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Gate::F(_) => "F",
            Gate::R(_) => "R",
            Gate::Sum(..) => "SUM",
            Gate::Id(_) => "ID",
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::F(w) => write!(f, "F {w}"),
            Gate::R(w) => write!(f, "R {w}"),
            Gate::Sum(c, t) => write!(f, "SUM {c} {t}"),
            Gate::Id(w) => write!(f, "ID {w}"),
        }
    }
}

/// A validated circuit: odd prime dimension, in-range wires.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CircuitIr {
    pub d: u64,
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl CircuitIr {
    pub fn new(d: u64, n: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        if !is_odd_prime(d) {
            return Err(CircuitError::at_line(0, ErrorKind::NotOddPrime(d)));
        }
        if n == 0 {
            return Err(CircuitError::at_line(0, ErrorKind::NoWires));
        }
        let ir = CircuitIr { d, n, gates };
        for (idx, gate) in ir.gates.iter().enumerate() {
            ir.check_gate(gate)
                .map_err(|kind| CircuitError::at_line(idx + 1, kind))?;
        }
        Ok(ir)
    }

    fn check_gate(&self, gate: &Gate) -> Result<(), ErrorKind> {
        for w in gate.wires() {
            if w >= self.n {
                return Err(ErrorKind::WireOutOfRange { wire: w, n: self.n });
            }
        }
        if let Gate::Sum(c, t) = gate {
            if c == t {
                return Err(ErrorKind::SumNeedsTwoWires(*c));
            }
        }
        Ok(())
    }

    pub fn fourier_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::F(_)))
            .count()
    }

    /// Canonical text form; `parse_circuit` inverts it exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("d {}\nn {}\n", self.d, self.n);
        for gate in &self.gates {
            out.push_str(&gate.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct CircuitError {
    pub line: usize,
    pub kind: ErrorKind,
}

impl CircuitError {
    fn at_line(line: usize, kind: ErrorKind) -> Self {
        CircuitError { line, kind }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ErrorKind {
    #[error("dimension {0} is not an odd prime")]
    NotOddPrime(u64),
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
    #[error("duplicate '{0}' header")]
    DuplicateHeader(&'static str),
    #[error("missing '{0}' header before first gate")]
    MissingHeader(&'static str),
}

/// Parse the line-oriented text format:
///
/// ```text
/// # comment
/// d 3
/// n 2
/// F 0
/// SUM 0 1
/// ```
///
/// Exactly one `d` line and one `n` line must appear before any gate.
pub fn parse_circuit(text: &str) -> Result<CircuitIr, CircuitError> {
    let mut d: Option<u64> = None;
    let mut n: Option<usize> = None;
    let mut gates: Vec<Gate> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let head = tok.next().expect("nonempty line");
        let fail = |kind| Err(CircuitError::at_line(line_no, kind));
        match head {
            "d" => {
                if d.is_some() {
                    return fail(ErrorKind::DuplicateHeader("d"));
                }
                if !gates.is_empty() {
                    return fail(ErrorKind::MissingHeader("d"));
                }
                let value = parse_uint(tok.next(), line_no, "d <odd prime>")?;
                if !is_odd_prime(value) {
                    return fail(ErrorKind::NotOddPrime(value));
                }
                expect_end(tok, line_no, "d <odd prime>")?;
                d = Some(value);
            }
            "n" => {
                if n.is_some() {
                    return fail(ErrorKind::DuplicateHeader("n"));
                }
                if !gates.is_empty() {
                    return fail(ErrorKind::MissingHeader("n"));
                }
                let value = parse_uint(tok.next(), line_no, "n <positive wires>")? as usize;
                if value == 0 {
                    return fail(ErrorKind::NoWires);
                }
                expect_end(tok, line_no, "n <positive wires>")?;
                n = Some(value);
            }
            "F" | "R" | "ID" => {
                let w = parse_uint(tok.next(), line_no, "<gate> <wire>")? as usize;
                expect_end(tok, line_no, "<gate> <wire>")?;
                gates.push(match head {
                    "F" => Gate::F(w),
                    "R" => Gate::R(w),
                    _ => Gate::Id(w),
                });
            }
            "SUM" => {
                let c = parse_uint(tok.next(), line_no, "SUM <control> <target>")? as usize;
                let t = parse_uint(tok.next(), line_no, "SUM <control> <target>")? as usize;
                expect_end(tok, line_no, "SUM <control> <target>")?;
                gates.push(Gate::Sum(c, t));
            }
            other => return fail(ErrorKind::UnknownMnemonic(other.to_string())),
        }
        if (head == "F" || head == "R" || head == "ID" || head == "SUM")
            && (d.is_none() || n.is_none())
        {
            let which = if d.is_none() { "d" } else { "n" };
            return Err(CircuitError::at_line(line_no, ErrorKind::MissingHeader(which)));
        }
    }

    let d = d.ok_or(CircuitError::at_line(0, ErrorKind::MissingHeader("d")))?;
    let n = n.ok_or(CircuitError::at_line(0, ErrorKind::MissingHeader("n")))?;
    // Re-validate wires with line numbers for good messages.
    let ir = CircuitIr { d, n, gates };
    let mut gate_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with('d') || line.starts_with('n') {
            continue;
        }
        let gate = &ir.gates[gate_line];
        ir.check_gate(gate)
            .map_err(|kind| CircuitError::at_line(idx + 1, kind))?;
        gate_line += 1;
    }
    Ok(ir)
}

fn parse_uint(tok: Option<&str>, line: usize, expected: &'static str) -> Result<u64, CircuitError> {
    let tok = tok.ok_or(CircuitError::at_line(line, ErrorKind::Malformed { expected }))?;
    tok.parse::<u64>()
        .map_err(|_| CircuitError::at_line(line, ErrorKind::BadInteger(tok.to_string())))
}

fn expect_end<'a>(
    mut tok: impl Iterator<Item = &'a str>,
    line: usize,
    expected: &'static str,
) -> Result<(), CircuitError> {
    if tok.next().is_some() {
        return Err(CircuitError::at_line(line, ErrorKind::Malformed { expected }));
    }
    Ok(())
}

/// The affine rewriting of a circuit over boundary symbols and free
/// parameters: wire states after each gate, the per-gate input/output
/// expressions, and the final boundary row.
#[derive(Clone, Debug)]
pub struct WireLabeling {
    pub d: u64,
    pub n: usize,
    /// states[k][i]: wire i after the first k gates; states[0] is the
    /// initial boundary row of q0 symbols.
    pub states: Vec<Vec<Polynomial<Fp>>>,
    /// Per gate: (inputs, outputs) in the gate's own wire order.
    pub gate_io: Vec<(Vec<Polynomial<Fp>>, Vec<Polynomial<Fp>>)>,
    /// Number of free parameters introduced (one per Fourier gate).
    pub free_count: usize,
}

impl WireLabeling {
    /// Final boundary expressions B^(i).
    pub fn boundary(&self) -> &[Polynomial<Fp>] {
        self.states.last().expect("at least the initial row")
    }
}

/// Forward pass: Fourier outputs mint a fresh free symbol, the phase gate
/// and identity pass values through, and the controlled sum adds the
/// control into the target. Every expression stays affine.
pub fn label_wires(ir: &CircuitIr) -> WireLabeling {
    let d = ir.d;
    let mut states: Vec<Vec<Polynomial<Fp>>> = Vec::with_capacity(ir.gates.len() + 1);
    states.push(
        (0..ir.n)
            .map(|i| Polynomial::var_mod(Var::Q0(i), d))
            .collect(),
    );
    let mut gate_io = Vec::with_capacity(ir.gates.len());
    let mut free_count = 0usize;

    for gate in &ir.gates {
        let prev = states.last().expect("initial row").clone();
        let mut next = prev.clone();
        let (ins, outs) = match *gate {
            Gate::F(w) => {
                let input = prev[w].clone();
                let fresh = Polynomial::var_mod(Var::Free(free_count), d);
                free_count += 1;
                next[w] = fresh.clone();
                (vec![input], vec![fresh])
            }
            Gate::R(w) | Gate::Id(w) => {
                let input = prev[w].clone();
                (vec![input.clone()], vec![input])
            }
            Gate::Sum(c, t) => {
                let control = prev[c].clone();
                let target = prev[t].clone();
                let sum = control.add(&target);
                next[t] = sum.clone();
                (vec![control.clone(), target], vec![control, sum])
            }
        };
        gate_io.push((ins, outs));
        states.push(next);
    }

    WireLabeling {
        d,
        n: ir.n,
        states,
        gate_io,
        free_count,
    }
}

/// Substitution map sending each trajectory symbol q_k^(i) to its labeled
/// affine expression; step 0 maps to the plain boundary symbols.
pub fn path_symbol_images(lab: &WireLabeling) -> BTreeMap<Var, Polynomial<Fp>> {
    let mut map = BTreeMap::new();
    for (step, row) in lab.states.iter().enumerate() {
        for (wire, expr) in row.iter().enumerate() {
            map.insert(Var::Path { step, wire }, expr.clone());
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let text = "# two-wire example\nd 3\nn 2\n\nF 0   # fourier\nSUM 0 1\nR 1\nID 0\n";
        let ir = parse_circuit(text).unwrap();
        assert_eq!(ir.d, 3);
        assert_eq!(ir.n, 2);
        assert_eq!(
            ir.gates,
            vec![Gate::F(0), Gate::Sum(0, 1), Gate::R(1), Gate::Id(0)]
        );
        let printed = ir.to_text();
        assert_eq!(parse_circuit(&printed).unwrap(), ir);
    }

    #[test]
    fn rejects_even_or_composite_dimension() {
        for bad in ["d 2\nn 1\nF 0\n", "d 9\nn 1\nF 0\n", "d 1\nn 1\nF 0\n"] {
            let err = parse_circuit(bad).unwrap_err();
            assert!(matches!(err.kind, ErrorKind::NotOddPrime(_)), "{bad}");
            assert_eq!(err.line, 1);
        }
    }

    #[test]
    fn rejects_structural_errors() {
        let err = parse_circuit("d 3\nn 2\nF 5\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::WireOutOfRange { wire: 5, n: 2 }));
        assert_eq!(err.line, 3);

        let err = parse_circuit("d 3\nn 2\nSUM 1 1\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::SumNeedsTwoWires(1)));

        let err = parse_circuit("d 3\nn 1\nQ 0\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::UnknownMnemonic(_)));

        let err = parse_circuit("d 3\nd 5\nn 1\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::DuplicateHeader("d")));

        let err = parse_circuit("d 3\nF 0\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::MissingHeader("n")));

        let err = parse_circuit("n 1\nF 0\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::MissingHeader("d")));

        let err = parse_circuit("d 3\nn 1\nF x\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::BadInteger(_)));

        let err = parse_circuit("d 3\nn 1\nF 0 7\n").unwrap_err();
        assert!(matches!(err.kind, ErrorKind::Malformed { .. }));
    }

    #[test]
    fn labeling_fourier_then_sum() {
        // F on wire 0 then SUM(0,1): one free symbol, boundary (x1, q0_2 + x1).
        let ir = CircuitIr::new(3, 2, vec![Gate::F(0), Gate::Sum(0, 1)]).unwrap();
        let lab = label_wires(&ir);
        assert_eq!(lab.free_count, 1);
        let x1 = Polynomial::var_mod(Var::Free(0), 3);
        let q02 = Polynomial::var_mod(Var::Q0(1), 3);
        assert_eq!(lab.boundary()[0], x1);
        assert_eq!(lab.boundary()[1], q02.add(&x1));
        // The Fourier gate consumed the initial symbol and minted x1.
        assert_eq!(lab.gate_io[0].0[0], Polynomial::var_mod(Var::Q0(0), 3));
        assert_eq!(lab.gate_io[0].1[0], x1);
    }

    #[test]
    fn labeling_stays_affine() {
        let ir = CircuitIr::new(
            5,
            3,
            vec![
                Gate::F(0),
                Gate::Sum(0, 2),
                Gate::R(2),
                Gate::Sum(2, 1),
                Gate::F(1),
                Gate::Id(0),
            ],
        )
        .unwrap();
        let lab = label_wires(&ir);
        for row in &lab.states {
            for expr in row {
                assert!(expr.is_affine());
            }
        }
        assert_eq!(lab.free_count, 2);
    }

    #[test]
    fn identity_and_phase_do_not_mint_symbols() {
        let ir = CircuitIr::new(7, 1, vec![Gate::R(0), Gate::Id(0), Gate::R(0)]).unwrap();
        let lab = label_wires(&ir);
        assert_eq!(lab.free_count, 0);
        assert_eq!(lab.boundary()[0], Polynomial::var_mod(Var::Q0(0), 7));
    }
}
