//! Exact CNOT-count BFS over GL(n, F2) and the Clifford-advantage scan:
//! linear reversible functions whose optimal Clifford implementation needs
//! fewer entangling gates than any CNOT-only circuit.

use crate::db::files::DbHandle;
use crate::db::DbError;
use crate::sym::tableau::{Circuit, Gate, Tableau};
use crate::synth;

/// Cost levels over invertible n x n binary matrices, keyed row-major into a
/// u64 (row i occupies bits [i*n, (i+1)*n)).
pub struct LinearDatabase {
    pub n: u8,
    pub levels: Vec<Vec<u64>>,
}

pub fn identity_key(n: u8) -> u64 {
    let mut key = 0u64;
    for i in 0..n as u64 {
        key |= 1 << (i * (n as u64 + 1));
    }
    key
}

/// Right multiplication by CNOT(c, t): column t += column c, 0-based.
#[inline]
fn apply_cnot(key: u64, n: u8, c: usize, t: usize) -> u64 {
    let stride: u64 = {
        let mut s = 0u64;
        for i in 0..n as u64 {
            s |= 1 << (i * n as u64);
        }
        s
    };
    key ^ (((key >> c) & stride) << t)
}

impl LinearDatabase {
    pub fn cost(&self, key: u64) -> Option<usize> {
        self.levels
            .iter()
            .position(|level| level.binary_search(&key).is_ok())
    }

    pub fn total(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn k_max(&self) -> usize {
        self.levels.len() - 1
    }

    /// An optimal CNOT word for an element, by greedy cost descent.
    pub fn cnot_word(&self, mut key: u64) -> Option<Vec<(u8, u8)>> {
        let n = self.n;
        let mut k = self.cost(key)?;
        let mut word = Vec::with_capacity(k);
        'outer: while k > 0 {
            for c in 0..n as usize {
                for t in 0..n as usize {
                    if c == t {
                        continue;
                    }
                    let next = apply_cnot(key, n, c, t);
                    if self.cost(next) == Some(k - 1) {
                        // the word is read left to right; appending on the right
                        // of the matrix product means the gate comes last
                        word.push((c as u8 + 1, t as u8 + 1));
                        key = next;
                        k -= 1;
                        continue 'outer;
                    }
                }
            }
            return None; // unreachable for a consistent BFS
        }
        word.reverse();
        Some(word)
    }
}

/// |GL(n,2)| = prod_{i=0..n-1} (2^n - 2^i).
pub fn gl_order(n: u8) -> u64 {
    (0..n as u32).map(|i| (1u64 << n) - (1u64 << i)).product()
}

/// Exact CNOT-cost BFS over GL(n, F2) from the identity; no reduction.
pub fn gl_bfs(n: u8) -> LinearDatabase {
    assert!((2..=5).contains(&n), "GL BFS is desk-scale for 2..=5 qubits");
    let mut levels: Vec<Vec<u64>> = vec![vec![identity_key(n)]];
    loop {
        let prev = &levels[levels.len() - 1];
        let prev2: &[u64] = if levels.len() >= 2 { &levels[levels.len() - 2] } else { &[] };
        let mut next: Vec<u64> = Vec::new();
        for &key in prev {
            for c in 0..n as usize {
                for t in 0..n as usize {
                    if c == t {
                        continue;
                    }
                    let cand = apply_cnot(key, n, c, t);
                    if prev.binary_search(&cand).is_err() && prev2.binary_search(&cand).is_err() {
                        next.push(cand);
                    }
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    LinearDatabase { n, levels }
}

/// Replays a CNOT word in the symplectic representation; this is the pinned
/// (operational) embedding of GL(n,2) into the Clifford group.
pub fn replay_cnot_word(n: u8, word: &[(u8, u8)]) -> Tableau {
    let mut t = Tableau::identity(n);
    for &(c, tq) in word {
        t.apply_gate(Gate::Cnot(c, tq));
    }
    t
}

#[derive(Clone, Debug)]
pub struct AdvantageHit {
    pub matrix_key: u64,
    pub cnot_cost: usize,
    pub clifford_cost: usize,
    pub circuit: Circuit,
}

/// Scans every GL element, comparing its CNOT-only cost against the Clifford
/// cost of its symplectic embedding; every reported hit carries a
/// replay-verified optimal Clifford circuit.
pub fn advantage_scan(lin: &LinearDatabase, db: &DbHandle) -> Result<Vec<AdvantageHit>, DbError> {
    let n = lin.n;
    let mut hits = Vec::new();
    for (ck, level) in lin.levels.iter().enumerate() {
        for &key in level {
            let word = lin
                .cnot_word(key)
                .ok_or_else(|| DbError::Corrupt("linear database has a gap".into()))?;
            debug_assert_eq!(word.len(), ck);
            let tab = replay_cnot_word(n, &word);
            let cc = synth::cost(&tab, db)?;
            if cc < ck {
                let circuit = synth::synthesize(&tab, db)?;
                if circuit.replay() != tab || circuit.cnot_count() != cc {
                    return Err(DbError::Corrupt("advantage hit failed replay verification".into()));
                }
                hits.push(AdvantageHit { matrix_key: key, cnot_cost: ck, clifford_cost: cc, circuit });
            }
        }
    }
    Ok(hits)
}

/// Renders a GL matrix key as rows of '0'/'1'.
pub fn render_matrix(n: u8, key: u64) -> String {
    let mut s = String::new();
    for i in 0..n as usize {
        for j in 0..n as usize {
            s.push(if key >> (i * n as usize + j) & 1 != 0 { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::{augment, bfs_generate};

    #[test]
    fn gl2_has_six_elements() {
        let lin = gl_bfs(2);
        assert_eq!(lin.total(), 6);
        assert_eq!(lin.total() as u64, gl_order(2));
        assert_eq!(lin.cost(identity_key(2)), Some(0));
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(3), 168);
        assert_eq!(gl_order(4), 20_160);
        assert_eq!(gl_order(5), 9_999_360);
        let lin = gl_bfs(3);
        assert_eq!(lin.total() as u64, gl_order(3));
    }

    #[test]
    fn swap_matrix_costs_three() {
        let lin = gl_bfs(2);
        // exchange matrix: rows (01), (10)
        let swap_key = 0b01_10u64; // row0 = 10 (bit1), row1 = 01 (bit2)... explicit below
        let key = {
            // row 0 = e2 -> bit 1; row 1 = e1 -> bit 2
            (1u64 << 1) | (1u64 << 2)
        };
        let _ = swap_key;
        assert_eq!(lin.cost(key), Some(3));
    }

    #[test]
    fn single_cnot_neighbors_differ_by_at_most_one() {
        let lin = gl_bfs(3);
        for (k, level) in lin.levels.iter().enumerate() {
            for &key in level {
                for c in 0..3usize {
                    for t in 0..3usize {
                        if c != t {
                            let next = apply_cnot(key, 3, c, t);
                            let nk = lin.cost(next).unwrap();
                            assert!(k.abs_diff(nk) <= 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cnot_words_replay_to_their_matrix() {
        let lin = gl_bfs(3);
        for (k, level) in lin.levels.iter().enumerate() {
            for &key in level {
                let word = lin.cnot_word(key).unwrap();
                assert_eq!(word.len(), k);
                // replay over GL keys
                let mut m = identity_key(3);
                for &(c, t) in &word {
                    m = apply_cnot(m, 3, c as usize - 1, t as usize - 1);
                }
                assert_eq!(m, key);
            }
        }
    }

    #[test]
    fn advantage_scan_self_consistent_n2_n3() {
        for n in 2..=3u8 {
            let mut db = bfs_generate(n, 0, false).unwrap();
            augment(&mut db, 0).unwrap();
            let handle = DbHandle::Ram(db);
            let lin = gl_bfs(n);
            let hits = advantage_scan(&lin, &handle).unwrap();
            for h in &hits {
                assert!(h.clifford_cost < h.cnot_cost);
                assert_ne!(h.matrix_key, identity_key(n));
            }
        }
    }
}
