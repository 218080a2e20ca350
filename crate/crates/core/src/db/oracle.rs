//! Reduction-free cost enumeration of whole symplectic groups.
//!
//! For small n the entire group fits in memory, so the CNOT cost of every
//! element can be computed directly: cost levels are built by closing each
//! frontier under the single-qubit gates and stepping once through every
//! CNOT. No canonical forms are involved, which makes this an independent
//! check of the reduced-database pipeline.

use std::collections::HashSet;

use crate::sym::tableau::{Gate, Tableau};

/// Packs a full tableau into a single integer key; needs 4n^2 <= 64 bits,
/// so n <= 4.
pub fn tableau_key(t: &Tableau) -> u64 {
    let two_n = t.two_n();
    let mut key = 0u64;
    for i in 0..two_n {
        key |= (t.row(i) as u64) << (i * two_n);
    }
    key
}

/// Exact per-element CNOT costs for the whole group; level k is sorted.
pub struct FullGroupCosts {
    pub n: u8,
    pub levels: Vec<Vec<u64>>,
}

impl FullGroupCosts {
    pub fn cost(&self, t: &Tableau) -> Option<usize> {
        let key = tableau_key(t);
        self.levels
            .iter()
            .position(|level| level.binary_search(&key).is_ok())
    }

    pub fn total(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

/// Closes a set of elements under right multiplication by H and P gates.
fn local_closure(n: u8, seeds: Vec<Tableau>, seen: &HashSet<u64>) -> Vec<Tableau> {
    let mut level: HashSet<u64> = HashSet::new();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in seeds {
        let key = tableau_key(&s);
        if !seen.contains(&key) && level.insert(key) {
            stack.push(s);
            out.push(s);
        }
    }
    while let Some(t) = stack.pop() {
        for q in 1..=n {
            for g in [Gate::H(q), Gate::P(q)] {
                let next = t.with_gate(g);
                let key = tableau_key(&next);
                if !seen.contains(&key) && level.insert(key) {
                    stack.push(next);
                    out.push(next);
                }
            }
        }
    }
    out
}

/// Enumerates Sp(2n, F2) by cost level; practical for n <= 3.
pub fn enumerate_costs(n: u8) -> FullGroupCosts {
    assert!((1..=3).contains(&n), "full-group enumeration is desk-scale only for n <= 3");
    let mut seen: HashSet<u64> = HashSet::new();
    let mut levels: Vec<Vec<u64>> = Vec::new();
    let mut frontier = local_closure(n, vec![Tableau::identity(n)], &seen);
    while !frontier.is_empty() {
        let mut keys: Vec<u64> = frontier.iter().map(tableau_key).collect();
        keys.sort_unstable();
        seen.extend(&keys);
        levels.push(keys);

        let mut seeds = Vec::new();
        for t in &frontier {
            for c in 1..=n {
                for tq in 1..=n {
                    if c != tq {
                        seeds.push(t.with_gate(Gate::Cnot(c, tq)));
                    }
                }
            }
        }
        frontier = local_closure(n, seeds, &seen);
    }
    FullGroupCosts { n, levels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym::tableau::group_order;

    #[test]
    fn n1_is_all_local() {
        let costs = enumerate_costs(1);
        assert_eq!(costs.level_sizes(), vec![6]);
    }

    #[test]
    fn n2_level_sizes() {
        let costs = enumerate_costs(2);
        assert_eq!(costs.total() as u128, group_order(2));
        // |C_2^0| is the local subgroup
        assert_eq!(costs.levels[0].len(), 36);
        assert_eq!(costs.level_sizes(), vec![36, 324, 324, 36]);
    }

    #[test]
    fn swap_costs_three() {
        let swap = Tableau::identity(2)
            .with_gate(Gate::Cnot(1, 2))
            .with_gate(Gate::Cnot(2, 1))
            .with_gate(Gate::Cnot(1, 2));
        assert_eq!(enumerate_costs(2).cost(&swap), Some(3));
    }
}
