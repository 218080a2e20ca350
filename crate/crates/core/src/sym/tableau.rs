//! Binary symplectic matrices and the primitive gates acting on them.
//!
//! An n-qubit Clifford element (modulo Paulis and phases) is a 2n x 2n matrix
//! M over F2 with M^T Omega M = Omega. Gates act by column operations, and a
//! circuit read left to right is the matrix product of its gates.

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const MAX_QUBITS: usize = 6;

/// A full 2n x 2n binary symplectic matrix, stored row-major as bit rows.
///
/// Row i (0-based) is `rows[i]`; column c (0-based) is bit c of a row.
/// Rows 0..n are the X half, rows n..2n the Z half.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: u8,
    rows: [u16; 2 * MAX_QUBITS],
}

/// A primitive gate with 1-based qubit indices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Gate {
    H(u8),
    P(u8),
    Cnot(u8, u8),
}

impl Gate {
    pub fn validate(self, n: u8) -> Result<(), GateError> {
        match self {
            Gate::H(q) | Gate::P(q) => {
                if q == 0 || q > n {
                    return Err(GateError::QubitOutOfRange { qubit: q, n });
                }
            }
            Gate::Cnot(c, t) => {
                if c == 0 || c > n {
                    return Err(GateError::QubitOutOfRange { qubit: c, n });
                }
                if t == 0 || t > n {
                    return Err(GateError::QubitOutOfRange { qubit: t, n });
                }
                if c == t {
                    return Err(GateError::ControlEqualsTarget { qubit: c });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateError {
    QubitOutOfRange { qubit: u8, n: u8 },
    ControlEqualsTarget { qubit: u8 },
}

impl fmt::Display for GateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateError::QubitOutOfRange { qubit, n } => {
                write!(f, "qubit index {qubit} out of range 1..={n}")
            }
            GateError::ControlEqualsTarget { qubit } => {
                write!(f, "cnot control equals target ({qubit})")
            }
        }
    }
}

impl std::error::Error for GateError {}

impl Tableau {
    pub fn identity(n: u8) -> Tableau {
        assert!(n >= 1 && n as usize <= MAX_QUBITS, "qubit count {n} out of range");
        let mut rows = [0u16; 2 * MAX_QUBITS];
        for (i, row) in rows.iter_mut().enumerate().take(2 * n as usize) {
            *row = 1 << i;
        }
        Tableau { n, rows }
    }

    /// The symplectic form: off-diagonal identity blocks.
    pub fn omega(n: u8) -> Tableau {
        let mut t = Tableau::identity(n);
        let n = n as usize;
        for i in 0..n {
            t.rows.swap(i, n + i);
        }
        t
    }

    pub fn from_rows(n: u8, row_bits: &[u16]) -> Tableau {
        assert_eq!(row_bits.len(), 2 * n as usize);
        let mut rows = [0u16; 2 * MAX_QUBITS];
        rows[..row_bits.len()].copy_from_slice(row_bits);
        let mask = Tableau::row_mask(n);
        for r in rows.iter_mut() {
            *r &= mask;
        }
        Tableau { n, rows }
    }

    #[inline]
    pub fn n(&self) -> u8 {
        self.n
    }

    #[inline]
    pub fn two_n(&self) -> usize {
        2 * self.n as usize
    }

    #[inline]
    pub fn row(&self, i: usize) -> u16 {
        self.rows[i]
    }

    #[inline]
    pub fn set_row(&mut self, i: usize, bits: u16) {
        self.rows[i] = bits;
    }

    #[inline]
    pub fn bit(&self, row: usize, col: usize) -> bool {
        self.rows[row] >> col & 1 != 0
    }

    #[inline]
    fn row_mask(n: u8) -> u16 {
        (1u16 << (2 * n)) - 1
    }

    /// Column c as a bitmask over rows (bit r = entry at row r).
    pub fn col(&self, c: usize) -> u16 {
        let mut out = 0u16;
        for r in 0..self.two_n() {
            out |= ((self.rows[r] >> c) & 1) << r;
        }
        out
    }

    /// Applies a gate on the right (column operations).
    ///
    /// H(k) swaps columns k and n+k; P(k) adds column k into column n+k;
    /// CNOT(k,j) adds column k into column j and column n+j into column n+k.
    pub fn apply_gate(&mut self, g: Gate) {
        let n = self.n as usize;
        match g {
            Gate::H(q) => {
                let a = q as usize - 1;
                let b = a + n;
                for r in self.rows.iter_mut().take(2 * n) {
                    let d = ((*r >> a) ^ (*r >> b)) & 1;
                    *r ^= (d << a) | (d << b);
                }
            }
            Gate::P(q) => {
                let a = q as usize - 1;
                let b = a + n;
                for r in self.rows.iter_mut().take(2 * n) {
                    *r ^= ((*r >> a) & 1) << b;
                }
            }
            Gate::Cnot(c, t) => {
                let cc = c as usize - 1;
                let tt = t as usize - 1;
                for r in self.rows.iter_mut().take(2 * n) {
                    *r ^= ((*r >> cc) & 1) << tt;
                    *r ^= ((*r >> (n + tt)) & 1) << (n + cc);
                }
            }
        }
    }

    pub fn with_gate(&self, g: Gate) -> Tableau {
        let mut t = *self;
        t.apply_gate(g);
        t
    }

    /// Matrix product `self * other` over F2.
    pub fn multiply(&self, other: &Tableau) -> Tableau {
        debug_assert_eq!(self.n, other.n);
        let two_n = self.two_n();
        let mut out = [0u16; 2 * MAX_QUBITS];
        for i in 0..two_n {
            let mut acc = 0u16;
            let mut bits = self.rows[i];
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc ^= other.rows[k];
                bits &= bits - 1;
            }
            out[i] = acc;
        }
        Tableau { n: self.n, rows: out }
    }

    pub fn transpose(&self) -> Tableau {
        let two_n = self.two_n();
        let mut out = [0u16; 2 * MAX_QUBITS];
        for i in 0..two_n {
            for j in 0..two_n {
                out[j] |= ((self.rows[i] >> j) & 1) << i;
            }
        }
        Tableau { n: self.n, rows: out }
    }

    /// Inverse of a symplectic matrix via U^{-1} = Omega U^T Omega.
    pub fn inverse(&self) -> Tableau {
        let omega = Tableau::omega(self.n);
        omega.multiply(&self.transpose()).multiply(&omega)
    }

    /// Symplectic inner product of two row vectors: u Omega v^T.
    #[inline]
    pub fn sym_inner(u: u16, v: u16, n: u8) -> bool {
        let swapped = ((v >> n) | (v << n)) & Tableau::row_mask(n);
        (u & swapped).count_ones() & 1 != 0
    }

    /// True iff the defining identity M^T Omega M = Omega holds.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        let two_n = self.two_n();
        for i in 0..two_n {
            for j in i..two_n {
                let expect = j == i + n as usize;
                if Tableau::sym_inner(self.rows[i], self.rows[j], n) != expect {
                    return false;
                }
            }
        }
        true
    }
}

/// Reads a row as a 2n-bit string with column 1 most significant, so that
/// string comparison ("00 < 01 < 10 < 11") is plain integer comparison.
#[inline]
pub fn row_key(row: u16, two_n: usize) -> u16 {
    row.reverse_bits() >> (16 - two_n)
}

/// |Sp(2n, F2)| = 2^{n^2} * prod_{j=1..n} (2^{2j} - 1).
pub fn group_order(n: u8) -> u128 {
    assert!(n >= 1 && n as usize <= MAX_QUBITS);
    let mut order: u128 = 1 << (n as u32 * n as u32);
    for j in 1..=n as u32 {
        order *= (1u128 << (2 * j)) - 1;
    }
    order
}

/// The fixed primitive gate enumeration used by `random_clifford`:
/// H(1..n), P(1..n), then CNOT over ordered pairs in lexicographic order.
pub fn primitive_gates(n: u8) -> Vec<Gate> {
    let mut gates = Vec::new();
    for q in 1..=n {
        gates.push(Gate::H(q));
    }
    for q in 1..=n {
        gates.push(Gate::P(q));
    }
    for c in 1..=n {
        for t in 1..=n {
            if c != t {
                gates.push(Gate::Cnot(c, t));
            }
        }
    }
    gates
}

/// Product of `word_length` uniformly random primitive gates; deterministic
/// for a fixed seed.
pub fn random_clifford(n: u8, word_length: usize, seed: u64) -> Tableau {
    let gates = primitive_gates(n);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut t = Tableau::identity(n);
    for _ in 0..word_length {
        t.apply_gate(gates[rng.random_range(0..gates.len())]);
    }
    t
}

/// An ordered list of gates over a fixed qubit count.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Circuit {
    pub n: u8,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: u8, gates: Vec<Gate>) -> Circuit {
        Circuit { n, gates }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot(..)))
            .count()
    }

    /// Left-to-right application of the gates to the identity.
    pub fn replay(&self) -> Tableau {
        let mut t = Tableau::identity(self.n);
        for g in &self.gates {
            t.apply_gate(*g);
        }
        t
    }

    pub fn validate(&self) -> Result<(), GateError> {
        for g in &self.gates {
            g.validate(self.n)?;
        }
        Ok(())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            match g {
                Gate::H(q) => writeln!(f, "h {q}")?,
                Gate::P(q) => writeln!(f, "p {q}")?,
                Gate::Cnot(c, t) => writeln!(f, "cx {c} {t}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum ParseError {
    BadLine(String),
    BadDimensions { expected: usize, got: usize },
    BadChar(char),
    Gate(GateError),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::BadLine(l) => write!(f, "unrecognized line: {l:?}"),
            ParseError::BadDimensions { expected, got } => {
                write!(f, "expected {expected} rows/columns, got {got}")
            }
            ParseError::BadChar(c) => write!(f, "expected '0' or '1', got {c:?}"),
            ParseError::Gate(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses the circuit text format: one gate per line, "h q" / "p q" / "cx c t".
pub fn parse_circuit(n: u8, text: &str) -> Result<Circuit, ParseError> {
    let mut gates = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let op = parts.next().unwrap();
        let args: Vec<&str> = parts.collect();
        let gate = match (op, args.as_slice()) {
            ("h", [q]) => Gate::H(q.parse().map_err(|_| ParseError::BadLine(line.into()))?),
            ("p", [q]) => Gate::P(q.parse().map_err(|_| ParseError::BadLine(line.into()))?),
            ("cx", [c, t]) => Gate::Cnot(
                c.parse().map_err(|_| ParseError::BadLine(line.into()))?,
                t.parse().map_err(|_| ParseError::BadLine(line.into()))?,
            ),
            _ => return Err(ParseError::BadLine(line.into())),
        };
        gate.validate(n).map_err(ParseError::Gate)?;
        gates.push(gate);
    }
    Ok(Circuit::new(n, gates))
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.two_n() {
            for c in 0..self.two_n() {
                write!(f, "{}", if self.bit(i, c) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tableau(n={})", self.n)?;
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Tableau {
    type Err = ParseError;

    /// Parses the tableau text format: 2n lines of 2n characters '0'/'1'.
    fn from_str(s: &str) -> Result<Tableau, ParseError> {
        let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let two_n = lines.len();
        if two_n == 0 || two_n % 2 != 0 || two_n > 2 * MAX_QUBITS {
            return Err(ParseError::BadDimensions { expected: 0, got: two_n });
        }
        let n = (two_n / 2) as u8;
        let mut rows = Vec::with_capacity(two_n);
        for line in lines {
            if line.len() != two_n {
                return Err(ParseError::BadDimensions { expected: two_n, got: line.len() });
            }
            let mut row = 0u16;
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => row |= 1 << c,
                    other => return Err(ParseError::BadChar(other)),
                }
            }
            rows.push(row);
        }
        Ok(Tableau::from_rows(n, &rows))
    }
}
