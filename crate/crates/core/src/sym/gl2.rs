//! Invertible 2x2 matrices over F2: the single-qubit gate group modulo Paulis.
//!
//! A single-qubit Clifford element acts on the (x, z) bit pair of one qubit as
//! an invertible linear map, so the six elements of GL(2, F2) are exactly the
//! single-qubit gates once Pauli factors are dropped.

use crate::sym::tableau::Gate;

/// One of the six invertible 2x2 binary matrices.
///
/// Bit layout of `bits`: bit 0 = m00, bit 1 = m01, bit 2 = m10, bit 3 = m11,
/// for the matrix [[m00, m01], [m10, m11]].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Gl2 {
    bits: u8,
}

impl Gl2 {
    /// Identity.
    pub const I: Gl2 = Gl2 { bits: 0b1001 };
    /// Phase gate: [[1,1],[0,1]].
    pub const P: Gl2 = Gl2 { bits: 0b1011 };
    /// Hadamard gate: [[0,1],[1,0]].
    pub const H: Gl2 = Gl2 { bits: 0b0110 };
    /// Matrix product H*P ([h, p] in circuit order): [[0,1],[1,1]].
    pub const HP: Gl2 = Gl2 { bits: 0b1110 };
    /// Matrix product P*H ([p, h] in circuit order): [[1,1],[1,0]].
    pub const PH: Gl2 = Gl2 { bits: 0b0111 };
    /// Matrix product P*H*P ([p, h, p] in circuit order): [[1,0],[1,1]].
    pub const PHP: Gl2 = Gl2 { bits: 0b1101 };

    /// All six elements in a fixed enumeration order.
    pub const ALL: [Gl2; 6] = [Gl2::I, Gl2::P, Gl2::H, Gl2::HP, Gl2::PH, Gl2::PHP];

    /// Builds an element from raw entry bits, rejecting singular matrices.
    pub fn from_bits(bits: u8) -> Option<Gl2> {
        let g = Gl2 { bits: bits & 0xF };
        if g.det() {
            Some(g)
        } else {
            None
        }
    }

    pub fn from_entries(m00: bool, m01: bool, m10: bool, m11: bool) -> Option<Gl2> {
        Gl2::from_bits(m00 as u8 | (m01 as u8) << 1 | (m10 as u8) << 2 | (m11 as u8) << 3)
    }

    #[inline]
    pub fn m00(self) -> bool {
        self.bits & 1 != 0
    }
    #[inline]
    pub fn m01(self) -> bool {
        self.bits & 2 != 0
    }
    #[inline]
    pub fn m10(self) -> bool {
        self.bits & 4 != 0
    }
    #[inline]
    pub fn m11(self) -> bool {
        self.bits & 8 != 0
    }

    fn det(self) -> bool {
        (self.m00() & self.m11()) ^ (self.m01() & self.m10())
    }

    /// Inverse; for 2x2 over F2 with det 1 this is the adjugate.
    pub fn inv(self) -> Gl2 {
        Gl2::from_entries(self.m11(), self.m01(), self.m10(), self.m00())
            .expect("inverse of invertible matrix")
    }

    /// Action on a column pair (x, z).
    #[inline]
    pub fn apply(self, x: bool, z: bool) -> (bool, bool) {
        (
            (self.m00() & x) ^ (self.m01() & z),
            (self.m10() & x) ^ (self.m11() & z),
        )
    }

    /// Minimal primitive-gate word realizing the matrix on qubit `q`
    /// (1-based), in circuit order.
    pub fn gate_word(self, q: u8) -> Vec<Gate> {
        match self {
            Gl2::I => vec![],
            Gl2::P => vec![Gate::P(q)],
            Gl2::H => vec![Gate::H(q)],
            Gl2::HP => vec![Gate::H(q), Gate::P(q)],
            Gl2::PH => vec![Gate::P(q), Gate::H(q)],
            Gl2::PHP => vec![Gate::P(q), Gate::H(q), Gate::P(q)],
            _ => unreachable!(),
        }
    }
}

impl std::ops::Mul for Gl2 {
    type Output = Gl2;

    /// Matrix product over F2.
    fn mul(self, other: Gl2) -> Gl2 {
        let m00 = (self.m00() & other.m00()) ^ (self.m01() & other.m10());
        let m01 = (self.m00() & other.m01()) ^ (self.m01() & other.m11());
        let m10 = (self.m10() & other.m00()) ^ (self.m11() & other.m10());
        let m11 = (self.m10() & other.m01()) ^ (self.m11() & other.m11());
        Gl2::from_entries(m00, m01, m10, m11).expect("product of invertible matrices")
    }
}
