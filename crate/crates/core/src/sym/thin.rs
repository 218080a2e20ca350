//! Packed thin-matrix representation: a tableau with rows n and 2n removed,
//! spread over two 64-bit words.
//!
//! Bit layout: payload row r (1-based, r = 1..n-1) occupies bits
//! `[(r-1)*2n, r*2n)` of its word; within a row, column c sits at bit offset
//! c-1 (column 1 is least significant). `word1` holds the X rows 1..n-1,
//! `word2` the Z rows n+1..2n-1. The dropped row pair is recoverable up to a
//! single-qubit gate on qubit n; `expand` pins that freedom by restoring the
//! unique completion whose qubit-n rows are in left-reduced order.

use std::fmt;

use crate::sym::tableau::{row_key, Tableau, MAX_QUBITS};

/// Payload words of a packed tableau; augmentation bits always zero here.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ThinMatrix {
    n: u8,
    word1: u64,
    word2: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpandError {
    /// Payload rows are not linearly independent or violate the pairwise
    /// symplectic relations, so no symplectic completion exists.
    InconsistentPayload,
}

impl fmt::Display for ExpandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpandError::InconsistentPayload => {
                write!(f, "payload is not extendable to a symplectic matrix")
            }
        }
    }
}

impl std::error::Error for ExpandError {}

/// Payload mask: the low 2n(n-1) bits.
pub fn payload_mask(n: u8) -> u64 {
    let bits = 2 * n as u32 * (n as u32 - 1);
    if bits == 0 {
        0
    } else if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl ThinMatrix {
    pub fn from_words(n: u8, word1: u64, word2: u64) -> ThinMatrix {
        let m = payload_mask(n);
        ThinMatrix { n, word1: word1 & m, word2: word2 & m }
    }

    #[inline]
    pub fn n(&self) -> u8 {
        self.n
    }

    #[inline]
    pub fn words(&self) -> (u64, u64) {
        (self.word1, self.word2)
    }

    /// Payload row r (1-based, r in 1..n-1) of the given word.
    #[inline]
    fn get_row(word: u64, r: usize, two_n: usize) -> u16 {
        ((word >> ((r - 1) * two_n)) & ((1u64 << two_n) - 1)) as u16
    }

    #[inline]
    fn put_row(word: &mut u64, r: usize, two_n: usize, bits: u16) {
        let shift = (r - 1) * two_n;
        *word &= !(((1u64 << two_n) - 1) << shift);
        *word |= (bits as u64) << shift;
    }

    /// Drops rows n and 2n of a tableau.
    pub fn pack(t: &Tableau) -> ThinMatrix {
        let n = t.n() as usize;
        let two_n = 2 * n;
        let mut word1 = 0u64;
        let mut word2 = 0u64;
        for r in 1..n {
            ThinMatrix::put_row(&mut word1, r, two_n, t.row(r - 1));
            ThinMatrix::put_row(&mut word2, r, two_n, t.row(n + r - 1));
        }
        ThinMatrix { n: t.n(), word1, word2 }
    }

    /// Reconstructs the full symplectic matrix.
    ///
    /// The two missing rows span the symplectic orthogonal complement of the
    /// payload rows; among the six valid completions the one with the qubit-n
    /// row triple in sorted order is returned, making expansion exact on
    /// left-reduced inputs.
    pub fn expand(&self) -> Result<Tableau, ExpandError> {
        let n = self.n as usize;
        let two_n = 2 * n;
        let mut rows = [0u16; 2 * MAX_QUBITS];
        for r in 1..n {
            rows[r - 1] = ThinMatrix::get_row(self.word1, r, two_n);
            rows[n + r - 1] = ThinMatrix::get_row(self.word2, r, two_n);
        }

        // Pairwise symplectic relations among the known rows.
        let known: Vec<usize> = (0..two_n).filter(|&i| i != n - 1 && i != two_n - 1).collect();
        for (a, &i) in known.iter().enumerate() {
            for &j in &known[a..] {
                let expect = j == i + n;
                if Tableau::sym_inner(rows[i], rows[j], self.n) != expect {
                    return Err(ExpandError::InconsistentPayload);
                }
            }
        }

        // Solve <r, v> = 0 for all known rows r: the nullspace of the matrix
        // with rows r*Omega. Gaussian elimination over F2.
        let mut mat: Vec<u16> = known
            .iter()
            .map(|&i| {
                let v = rows[i];
                ((v >> n) | (v << n)) & ((1u16 << two_n) - 1)
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for col in 0..two_n {
            if let Some(p) = (rank..mat.len()).find(|&r| mat[r] >> col & 1 != 0) {
                mat.swap(rank, p);
                for r in 0..mat.len() {
                    if r != rank && mat[r] >> col & 1 != 0 {
                        mat[r] ^= mat[rank];
                    }
                }
                pivot_cols.push(col);
                rank += 1;
            }
        }
        if rank != two_n - 2 {
            return Err(ExpandError::InconsistentPayload);
        }

        let free_cols: Vec<usize> = (0..two_n).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = [0u16; 2];
        for (bi, &fc) in free_cols.iter().enumerate() {
            let mut v = 1u16 << fc;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                if mat[r] >> fc & 1 != 0 {
                    v |= 1 << pc;
                }
            }
            basis[bi] = v;
        }
        let (u, w) = (basis[0], basis[1]);
        if !Tableau::sym_inner(u, w, self.n) {
            return Err(ExpandError::InconsistentPayload);
        }

        // Deterministic completion: sort the three nonzero complement vectors.
        let mut triple = [u, w, u ^ w];
        triple.sort_by_key(|&r| row_key(r, two_n));
        rows[n - 1] = triple[0];
        rows[two_n - 1] = triple[1];

        let t = Tableau::from_rows(self.n, &rows[..two_n]);
        debug_assert!(t.is_symplectic());
        Ok(t)
    }

    /// Same column operations as on the full tableau, restricted to the
    /// stored rows; a handful of word-wide bit operations per gate.
    pub fn apply_gate(&mut self, g: crate::sym::tableau::Gate) {
        use crate::sym::tableau::Gate;
        let n = self.n as usize;
        let two_n = 2 * n;
        // ones at the start bit of the column-c slot in every stored row
        let stride: u64 = {
            let mut s = 0u64;
            for r in 0..n - 1 {
                s |= 1u64 << (r * two_n);
            }
            s
        };
        let apply = |word: &mut u64, op: &dyn Fn(u64) -> u64| *word = op(*word);
        match g {
            Gate::H(q) => {
                let a = q as usize - 1;
                let b = a + n;
                for w in [&mut self.word1, &mut self.word2] {
                    apply(w, &|v| {
                        let d = ((v >> a) ^ (v >> b)) & stride;
                        v ^ ((d << a) | (d << b))
                    });
                }
            }
            Gate::P(q) => {
                let a = q as usize - 1;
                for w in [&mut self.word1, &mut self.word2] {
                    apply(w, &|v| v ^ (((v >> a) & stride) << (a + n)));
                }
            }
            Gate::Cnot(c, t) => {
                let cc = c as usize - 1;
                let tt = t as usize - 1;
                for w in [&mut self.word1, &mut self.word2] {
                    apply(w, &|v| {
                        let v = v ^ (((v >> cc) & stride) << tt);
                        v ^ (((v >> (n + tt)) & stride) << (n + cc))
                    });
                }
            }
        }
    }

    /// Left multiplication by a single-qubit element on qubit j (1-based).
    /// For j = n this is a no-op: those rows are not stored.
    pub fn apply_local_left(&mut self, j: u8, g: crate::sym::gl2::Gl2) {
        let n = self.n as usize;
        let r = j as usize;
        if r == n {
            return;
        }
        let two_n = 2 * n;
        let x = ThinMatrix::get_row(self.word1, r, two_n);
        let z = ThinMatrix::get_row(self.word2, r, two_n);
        let nx = if g.m00() { x } else { 0 } ^ if g.m01() { z } else { 0 };
        let nz = if g.m10() { x } else { 0 } ^ if g.m11() { z } else { 0 };
        ThinMatrix::put_row(&mut self.word1, r, two_n, nx);
        ThinMatrix::put_row(&mut self.word2, r, two_n, nz);
    }
}
