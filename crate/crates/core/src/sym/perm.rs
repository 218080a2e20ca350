//! Qubit permutations as symplectic matrices.

use crate::sym::tableau::{Tableau, MAX_QUBITS};

/// A bijection w on {1..n}, stored 0-based: `map[i]` is the image of qubit i.
///
/// The induced matrix W satisfies W e^j = e^{w(j)} and W e^{n+j} = e^{n+w(j)}.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct QubitPermutation {
    n: u8,
    map: [u8; MAX_QUBITS],
}

impl QubitPermutation {
    pub fn identity(n: u8) -> QubitPermutation {
        let mut map = [0u8; MAX_QUBITS];
        for (i, m) in map.iter_mut().enumerate() {
            *m = i as u8;
        }
        QubitPermutation { n, map }
    }

    /// Builds from a 0-based image array; `None` if not a bijection.
    pub fn from_map(n: u8, map: &[u8]) -> Option<QubitPermutation> {
        if map.len() != n as usize {
            return None;
        }
        let mut seen = [false; MAX_QUBITS];
        for &m in map {
            if m as usize >= n as usize || seen[m as usize] {
                return None;
            }
            seen[m as usize] = true;
        }
        let mut full = [0u8; MAX_QUBITS];
        full[..map.len()].copy_from_slice(map);
        Some(QubitPermutation { n, map: full })
    }

    #[inline]
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Image of 0-based qubit i.
    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn inverse(&self) -> QubitPermutation {
        let mut map = [0u8; MAX_QUBITS];
        for i in 0..self.n as usize {
            map[self.map[i] as usize] = i as u8;
        }
        QubitPermutation { n: self.n, map }
    }

    pub fn to_tableau(&self) -> Tableau {
        let n = self.n as usize;
        // W e^j = e^{w(j)}: column j has its 1 in row w(j)
        let mut rows = [0u16; 2 * MAX_QUBITS];
        for j in 0..n {
            let w = self.map[j] as usize;
            rows[w] = 1 << j;
            rows[n + w] = 1 << (n + j);
        }
        Tableau::from_rows(self.n, &rows[..2 * n])
    }

    /// Conjugation W^{-1} U W: relabels both row and column qubit blocks,
    /// (W^{-1} U W)_{i,j} = U_{w(i), w(j)} within each block.
    pub fn conjugate(&self, u: &Tableau) -> Tableau {
        let n = self.n as usize;
        let mut rows = [0u16; 2 * MAX_QUBITS];
        for i in 0..n {
            let src_x = u.row(self.map[i] as usize);
            let src_z = u.row(n + self.map[i] as usize);
            let mut rx = 0u16;
            let mut rz = 0u16;
            for j in 0..n {
                let w = self.map[j] as usize;
                rx |= ((src_x >> w) & 1) << j;
                rx |= ((src_x >> (n + w)) & 1) << (n + j);
                rz |= ((src_z >> w) & 1) << j;
                rz |= ((src_z >> (n + w)) & 1) << (n + j);
            }
            rows[i] = rx;
            rows[n + i] = rz;
        }
        Tableau::from_rows(self.n, &rows[..2 * n])
    }
}

/// All n! permutations of {0..n} in lexicographic order of the image array,
/// from a per-n cache (the reduction hot path iterates this constantly).
pub fn all_permutations(n: u8) -> &'static [QubitPermutation] {
    static TABLES: std::sync::OnceLock<Vec<Vec<QubitPermutation>>> = std::sync::OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_QUBITS as u8)
            .map(|n| {
                if n == 0 {
                    return Vec::new();
                }
                let mut current: Vec<u8> = (0..n).collect();
                let mut out = Vec::new();
                loop {
                    out.push(QubitPermutation::from_map(n, &current).unwrap());
                    if !next_permutation(&mut current) {
                        break;
                    }
                }
                out
            })
            .collect()
    });
    &tables[n as usize]
}

fn next_permutation(arr: &mut [u8]) -> bool {
    if arr.len() < 2 {
        return false;
    }
    let mut i = arr.len() - 1;
    while i > 0 && arr[i - 1] >= arr[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = arr.len() - 1;
    while arr[j] <= arr[i - 1] {
        j -= 1;
    }
    arr.swap(i - 1, j);
    arr[i..].reverse();
    true
}
