//! Elements of the local subgroup: one GL(2,F2) block per qubit.

use crate::sym::gl2::Gl2;
use crate::sym::perm::QubitPermutation;
use crate::sym::tableau::{Gate, Tableau, MAX_QUBITS};

/// A product of single-qubit gates, block-diagonal in the (x_j, z_j) pairs.
/// The local subgroup has 6^n elements.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LocalElement {
    n: u8,
    blocks: [Gl2; MAX_QUBITS],
}

impl LocalElement {
    pub fn identity(n: u8) -> LocalElement {
        LocalElement { n, blocks: [Gl2::I; MAX_QUBITS] }
    }

    pub fn from_blocks(n: u8, blocks: &[Gl2]) -> LocalElement {
        assert_eq!(blocks.len(), n as usize);
        let mut full = [Gl2::I; MAX_QUBITS];
        full[..blocks.len()].copy_from_slice(blocks);
        LocalElement { n, blocks: full }
    }

    #[inline]
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Block on 0-based qubit j.
    #[inline]
    pub fn block(&self, j: usize) -> Gl2 {
        self.blocks[j]
    }

    pub fn set_block(&mut self, j: usize, g: Gl2) {
        self.blocks[j] = g;
    }

    pub fn inv(&self) -> LocalElement {
        let mut out = *self;
        for b in out.blocks.iter_mut().take(self.n as usize) {
            *b = b.inv();
        }
        out
    }

    /// Blockwise product `self * other`.
    pub fn mul(&self, other: &LocalElement) -> LocalElement {
        let mut out = *self;
        for j in 0..self.n as usize {
            out.blocks[j] = self.blocks[j] * other.blocks[j];
        }
        out
    }

    pub fn to_tableau(&self) -> Tableau {
        let n = self.n as usize;
        let mut rows = [0u16; 2 * MAX_QUBITS];
        for j in 0..n {
            let g = self.blocks[j];
            // column j is (m00, m10), column n+j is (m01, m11) in rows (j, n+j)
            rows[j] = (g.m00() as u16) << j | (g.m01() as u16) << (n + j);
            rows[n + j] = (g.m10() as u16) << j | (g.m11() as u16) << (n + j);
        }
        Tableau::from_rows(self.n, &rows[..2 * n])
    }

    /// Left multiplication: replaces the row pair of each qubit by the
    /// invertible combination given by its block.
    pub fn apply_left(&self, t: &mut Tableau) {
        let n = self.n as usize;
        for j in 0..n {
            let g = self.blocks[j];
            if g == Gl2::I {
                continue;
            }
            let x = t.row(j);
            let z = t.row(n + j);
            t.set_row(j, sel(g.m00(), x) ^ sel(g.m01(), z));
            t.set_row(n + j, sel(g.m10(), x) ^ sel(g.m11(), z));
        }
    }

    /// Right multiplication: column operations on each qubit's column pair.
    pub fn apply_right(&self, t: &mut Tableau) {
        let n = self.n as usize;
        for j in 0..n {
            let g = self.blocks[j];
            if g == Gl2::I {
                continue;
            }
            for r in 0..2 * n {
                let row = t.row(r);
                let cj = row >> j & 1 != 0;
                let cnj = row >> (n + j) & 1 != 0;
                let nj = (g.m00() & cj) ^ (g.m10() & cnj);
                let nnj = (g.m01() & cj) ^ (g.m11() & cnj);
                let cleared = row & !((1 << j) | (1 << (n + j)));
                t.set_row(r, cleared | (nj as u16) << j | (nnj as u16) << (n + j));
            }
        }
    }

    /// W^{-1} L W: the blocks get relabeled by the permutation.
    pub fn conjugated_by(&self, w: &QubitPermutation) -> LocalElement {
        let mut out = LocalElement::identity(self.n);
        for j in 0..self.n as usize {
            out.blocks[j] = self.blocks[w.image(j)];
        }
        out
    }

    /// Extracts a local element from a tableau, or `None` if the matrix is
    /// not block-diagonal in the qubit pairs.
    pub fn from_tableau(t: &Tableau) -> Option<LocalElement> {
        let n = t.n() as usize;
        let mut out = LocalElement::identity(t.n());
        for j in 0..n {
            let allowed: u16 = (1 << j) | (1 << (n + j));
            let rx = t.row(j);
            let rz = t.row(n + j);
            if rx & !allowed != 0 || rz & !allowed != 0 {
                return None;
            }
            let g = Gl2::from_entries(
                rx >> j & 1 != 0,
                rx >> (n + j) & 1 != 0,
                rz >> j & 1 != 0,
                rz >> (n + j) & 1 != 0,
            )?;
            out.blocks[j] = g;
        }
        Some(out)
    }

    /// Primitive-gate word realizing the element (per-qubit minimal words).
    pub fn gate_circuit(&self) -> Vec<Gate> {
        let mut gates = Vec::new();
        for j in 0..self.n as usize {
            gates.extend(self.blocks[j].gate_word(j as u8 + 1));
        }
        gates
    }

    /// All 6^n elements, in odometer order over `Gl2::ALL`.
    pub fn all(n: u8) -> impl Iterator<Item = LocalElement> {
        let total = 6usize.pow(n as u32);
        (0..total).map(move |mut idx| {
            let mut e = LocalElement::identity(n);
            for j in 0..n as usize {
                e.blocks[j] = Gl2::ALL[idx % 6];
                idx /= 6;
            }
            e
        })
    }

    pub fn random(n: u8, rng: &mut impl rand::Rng) -> LocalElement {
        let mut e = LocalElement::identity(n);
        for j in 0..n as usize {
            e.blocks[j] = Gl2::ALL[rng.random_range(0..6)];
        }
        e
    }
}

#[inline]
fn sel(cond: bool, v: u16) -> u16 {
    if cond {
        v
    } else {
        0
    }
}
