//! Class sizes via automorphism counting and the exact group-count
//! self-consistency check.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::db::{Database, DbError};
use crate::sym::local::LocalElement;
use crate::sym::perm::all_permutations;
use crate::sym::tableau::{group_order, Tableau};

/// Size data for one equivalence class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassStats {
    /// |Aut(U)|: triples (K, L, W) with U = K W^{-1} U W L.
    pub aut_size: u64,
    /// |[U]| = 6^{2n} n! / |Aut(U)|.
    pub class_size: u64,
}

fn factorial(n: u8) -> u64 {
    (1..=n as u64).product()
}

/// Counts Aut(U) by iterating (W, L) and solving K = U L^{-1} W^{-1} U^{-1} W,
/// testing K for block-local membership. 6^n n! iterations per class.
pub fn class_stats(u: &Tableau) -> Result<ClassStats, DbError> {
    let n = u.n();
    let u_inv = u.inverse();
    let mut aut = 0u64;
    for w in all_permutations(n) {
        let conj_inv = w.conjugate(&u_inv); // W^{-1} U^{-1} W
        for l in LocalElement::all(n) {
            let mut rhs = conj_inv;
            l.inv().apply_left(&mut rhs); // L^{-1} W^{-1} U^{-1} W
            if local_product(u, &rhs) {
                aut += 1;
            }
        }
    }
    let order: u64 = 6u64.pow(2 * n as u32) * factorial(n);
    if order % aut != 0 {
        return Err(DbError::Corrupt(format!(
            "automorphism count {aut} does not divide 6^{{2n}} n! = {order}"
        )));
    }
    let class_size = order / aut;
    let lo = 6u64.pow(n as u32);
    if class_size < lo || class_size > order {
        return Err(DbError::Corrupt(format!("class size {class_size} out of bounds")));
    }
    Ok(ClassStats { aut_size: aut, class_size })
}

/// True iff U * C is block-local, computed row by row with early exit.
fn local_product(u: &Tableau, c: &Tableau) -> bool {
    let nn = u.n() as usize;
    let two_n = 2 * nn;
    for i in 0..two_n {
        let mut acc = 0u16;
        let mut bits = u.row(i);
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            acc ^= c.row(k);
            bits &= bits - 1;
        }
        let q = if i < nn { i } else { i - nn };
        let allowed: u16 = (1 << q) | (1 << (nn + q));
        if acc & !allowed != 0 {
            return false;
        }
    }
    true
}

/// Per-cost element counts inferred from class sizes.
#[derive(Clone, Debug)]
pub struct CountReport {
    pub n: u8,
    /// |C_n^k| for each cost level.
    pub per_cost: Vec<u128>,
    /// Class sizes per shard, aligned with the shard record order.
    pub class_sizes: Vec<Vec<u64>>,
    pub total: u128,
    pub group_order: u128,
}

impl CountReport {
    pub fn is_consistent(&self) -> bool {
        self.total == self.group_order
    }
}

/// Computes |C_n^k| = sum over shard-k classes of |[U]| and checks that the
/// grand total matches the group order formula. Hard error on mismatch.
pub fn verify_counts(db: &Database, threads: usize) -> Result<CountReport, DbError> {
    let n = db.n();
    let threads = if threads > 0 {
        threads
    } else {
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
    };
    let mut per_cost = Vec::new();
    let mut class_sizes = Vec::new();
    for k in 0..=db.k_max() {
        let shard = db.shard(k);
        let sizes: Mutex<Vec<(usize, u64)>> = Mutex::new(Vec::with_capacity(shard.len()));
        let cursor = AtomicUsize::new(0);
        let err: Mutex<Option<DbError>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..threads.min(shard.len().max(1)) {
                scope.spawn(|| loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= shard.len() || err.lock().unwrap().is_some() {
                        break;
                    }
                    let u = shard[i]
                        .thin(n)
                        .expand()
                        .expect("database records are valid reduced elements");
                    match class_stats(&u) {
                        Ok(stats) => sizes.lock().unwrap().push((i, stats.class_size)),
                        Err(e) => *err.lock().unwrap() = Some(e),
                    }
                });
            }
        });
        if let Some(e) = err.into_inner().unwrap() {
            return Err(e);
        }
        let mut sizes = sizes.into_inner().unwrap();
        sizes.sort_unstable();
        let sizes: Vec<u64> = sizes.into_iter().map(|(_, s)| s).collect();
        per_cost.push(sizes.iter().map(|&s| s as u128).sum());
        class_sizes.push(sizes);
    }
    let total: u128 = per_cost.iter().sum();
    let expected = group_order(n);
    let report = CountReport { n, per_cost, class_sizes, total, group_order: expected };
    if !report.is_consistent() {
        let bad = (0..report.per_cost.len())
            .map(|k| format!("k={k}: {}", report.per_cost[k]))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(DbError::Corrupt(format!(
            "count self-consistency failed: total {total} != |Sp(2n,F2)| {expected} ({bad})"
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db::bfs_generate;
    use crate::reduce::reduce_full;
    use crate::sym::tableau::Gate;

    #[test]
    fn identity_class_size_is_6_to_n() {
        for n in 2..=3u8 {
            let red = reduce_full(&Tableau::identity(n));
            let stats = class_stats(&red.reduced).unwrap();
            assert_eq!(stats.class_size, 6u64.pow(n as u32));
        }
    }

    #[test]
    fn cnot_class_size() {
        let red = reduce_full(&Tableau::identity(2).with_gate(Gate::Cnot(1, 2)));
        let stats = class_stats(&red.reduced).unwrap();
        assert_eq!(stats.class_size, 324);
        assert_eq!(stats.aut_size, 8);
    }

    #[test]
    fn n2_counts_match_group_order() {
        let db = bfs_generate(2, 0, false).unwrap();
        let report = verify_counts(&db, 0).unwrap();
        assert_eq!(report.per_cost, vec![36, 324, 324, 36]);
        assert_eq!(report.total, 720);
        assert!(report.is_consistent());
    }

    #[test]
    fn n3_counts_match_group_order() {
        let db = bfs_generate(3, 0, false).unwrap();
        let report = verify_counts(&db, 0).unwrap();
        assert_eq!(report.total, 1_451_520);
        assert_eq!(report.per_cost[0], 216);
        // class sizes bounded by 6^n .. 6^{2n} n!
        for sizes in &report.class_sizes {
            for &s in sizes {
                assert!(s >= 216 && s <= 279_936);
            }
        }
    }
}
