//! Canonical forms under local multiplication and qubit relabeling.
//!
//! Three nested forms are computed here:
//! - `left_reduce`: the unique coset representative of C_n^0 * U whose
//!   per-qubit row triples (x_j, z_j, y_j) are sorted;
//! - `local_reduce`: the smallest left-reduced element of the double coset
//!   C_n^0 * U * C_n^0, found by enumerating the per-qubit right multipliers
//!   that sort the column support triples;
//! - `reduce_full`: the smallest `local_reduce` image over the qubit
//!   relabelings minimizing the kappa invariant. This is the canonical class
//!   representative used by the database.
//!
//! Matrix-level minima are taken in the fixed packed-word order; row and
//! support strings compare with position 1 most significant.

use crate::sym::gl2::Gl2;
use crate::sym::local::LocalElement;
use crate::sym::perm::{all_permutations, QubitPermutation};
use crate::sym::tableau::{row_key, Tableau, MAX_QUBITS};
use crate::sym::thin::ThinMatrix;

/// Per-qubit OR of the X and Z components of a length-2n vector.
#[inline]
pub fn chi(v: u16, n: u8) -> u16 {
    (v | (v >> n)) & ((1 << n) - 1)
}

/// n-bit support strings compare with qubit 1 most significant.
#[inline]
pub fn chi_key(c: u16, n: u8) -> u16 {
    c.reverse_bits() >> (16 - n as u32)
}

/// The witness transforming U into its reduced form:
/// `reduced = left * W^{-1} * U * W * right`.
#[derive(Clone, Copy, Debug)]
pub struct ReductionWitness {
    pub left: LocalElement,
    pub perm: QubitPermutation,
    pub right: LocalElement,
}

impl ReductionWitness {
    pub fn identity(n: u8) -> ReductionWitness {
        ReductionWitness {
            left: LocalElement::identity(n),
            perm: QubitPermutation::identity(n),
            right: LocalElement::identity(n),
        }
    }

    /// Replays the witness on a matrix.
    pub fn apply(&self, u: &Tableau) -> Tableau {
        let mut t = self.perm.conjugate(u);
        self.right.apply_right(&mut t);
        self.left.apply_left(&mut t);
        t
    }
}

/// Instrumentation counters for one `reduce_full` call.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReduceInfo {
    /// Size of the permutation candidate set S(U).
    pub perm_candidates: usize,
    /// Largest right-multiplier product count M = |S_1|...|S_n| seen across
    /// the local reductions performed.
    pub combo_product: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct Reduction {
    pub reduced: Tableau,
    pub thin: ThinMatrix,
    pub witness: ReductionWitness,
    pub info: ReduceInfo,
}

/// Options selecting the streamlined candidate filters. The base definitions
/// are the reference; the streamlined variants skip multipliers and
/// relabelings that only reproduce a left-multiplication, and are verified to
/// produce identical representatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    pub streamlined: bool,
}

/// Unique left-reduced element of C_n^0 * U: for every qubit the rows satisfy
/// x_j < z_j < y_j. Returns it with the left factor L such that V = L * U.
pub fn left_reduce(u: &Tableau) -> (Tableau, LocalElement) {
    let n = u.n();
    let nn = n as usize;
    let two_n = 2 * nn;
    let mut v = *u;
    let mut l = LocalElement::identity(n);
    for j in 0..nn {
        let x = v.row(j);
        let z = v.row(nn + j);
        let kx = row_key(x, two_n);
        let kz = row_key(z, two_n);
        let ky = row_key(x ^ z, two_n);
        // smallest two of the three distinct strings become (x, z)
        let g = if kx < kz && kz < ky {
            Gl2::I
        } else {
            let mut best = None;
            for g in Gl2::ALL {
                let (a, b) = apply_block_left(g, x, z);
                let (ka, kb) = (row_key(a, two_n), row_key(b, two_n));
                if ka < kb && kb < row_key(a ^ b, two_n) {
                    best = Some(g);
                    break;
                }
            }
            best.expect("rows of a symplectic matrix are independent")
        };
        if g != Gl2::I {
            let (a, b) = apply_block_left(g, x, z);
            v.set_row(j, a);
            v.set_row(nn + j, b);
            l.set_block(j, g);
        }
        debug_assert!({
            let kx = row_key(v.row(j), two_n);
            let kz = row_key(v.row(nn + j), two_n);
            kx < kz && kz < row_key(v.row(j) ^ v.row(nn + j), two_n)
        });
    }
    (v, l)
}

#[inline]
fn apply_block_left(g: Gl2, x: u16, z: u16) -> (u16, u16) {
    let a = if g.m00() { x } else { 0 } ^ if g.m01() { z } else { 0 };
    let b = if g.m10() { x } else { 0 } ^ if g.m11() { z } else { 0 };
    (a, b)
}

/// True iff U is already left-reduced.
pub fn is_left_reduced(u: &Tableau) -> bool {
    let nn = u.n() as usize;
    let two_n = 2 * nn;
    (0..nn).all(|j| {
        let kx = row_key(u.row(j), two_n);
        let kz = row_key(u.row(nn + j), two_n);
        kx < kz && kz < row_key(u.row(j) ^ u.row(nn + j), two_n)
    })
}

/// The n x n matrix of F2 ranks of the per-qubit-pair 2x2 submatrices.
/// Invariant under left and right local multiplication.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KappaMatrix {
    n: u8,
    entries: [[u8; MAX_QUBITS]; MAX_QUBITS],
}

impl KappaMatrix {
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.entries[i][j]
    }

    /// Row-major flattening, for lexicographic comparison.
    pub fn flatten(&self) -> Vec<u8> {
        let nn = self.n as usize;
        let mut out = Vec::with_capacity(nn * nn);
        for i in 0..nn {
            out.extend_from_slice(&self.entries[i][..nn]);
        }
        out
    }
}

pub fn kappa(u: &Tableau) -> KappaMatrix {
    let nn = u.n() as usize;
    let mut entries = [[0u8; MAX_QUBITS]; MAX_QUBITS];
    for i in 0..nn {
        for j in 0..nn {
            let a = u.bit(i, j);
            let b = u.bit(i, nn + j);
            let c = u.bit(nn + i, j);
            let d = u.bit(nn + i, nn + j);
            entries[i][j] = if !(a | b | c | d) {
                0
            } else if (a & d) ^ (b & c) {
                2
            } else {
                1
            };
        }
    }
    KappaMatrix { n: u.n(), entries }
}

/// Compares kappa conjugated by w against conjugation by best, entry by entry
/// in row-major order. kappa(W^{-1} U W)_{i,j} = kappa(U)_{w(i), w(j)}.
fn perm_kappa_cmp(k: &KappaMatrix, w: &QubitPermutation, best: &QubitPermutation) -> std::cmp::Ordering {
    let nn = k.n as usize;
    for i in 0..nn {
        for j in 0..nn {
            let a = k.entries[w.image(i)][w.image(j)];
            let b = k.entries[best.image(i)][best.image(j)];
            if a != b {
                return a.cmp(&b);
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// The lexicographically smallest kappa(W^{-1} U W) and every permutation
/// achieving it.
pub fn perm_candidates(u: &Tableau) -> (KappaMatrix, Vec<QubitPermutation>) {
    let k = kappa(u);
    let perms = all_permutations(u.n());
    let mut best = perms[0];
    let mut arg = vec![perms[0]];
    for w in &perms[1..] {
        match perm_kappa_cmp(&k, w, &best) {
            std::cmp::Ordering::Less => {
                best = *w;
                arg.clear();
                arg.push(*w);
            }
            std::cmp::Ordering::Equal => arg.push(*w),
            std::cmp::Ordering::Greater => {}
        }
    }
    let nn = u.n() as usize;
    let mut entries = [[0u8; MAX_QUBITS]; MAX_QUBITS];
    for i in 0..nn {
        for j in 0..nn {
            entries[i][j] = k.entries[best.image(i)][best.image(j)];
        }
    }
    (KappaMatrix { n: u.n(), entries }, arg)
}

pub fn kappa_min(u: &Tableau) -> KappaMatrix {
    perm_candidates(u).0
}

/// Per-qubit sets S_j of right multipliers sorting the column support triple
/// non-decreasingly; fixed-capacity, no allocation.
struct MultiplierSets {
    sets: [[Gl2; 6]; MAX_QUBITS],
    lens: [usize; MAX_QUBITS],
}

fn right_multiplier_sets(u: &Tableau, opts: ReduceOptions) -> (MultiplierSets, usize) {
    let n = u.n();
    let nn = n as usize;
    let mut out = MultiplierSets { sets: [[Gl2::I; 6]; MAX_QUBITS], lens: [0; MAX_QUBITS] };
    let base_reduced = if opts.streamlined { Some(left_reduce(u).0) } else { None };
    let mut product = 1usize;
    for j in 0..nn {
        let cj = u.col(j);
        let cnj = u.col(nn + j);
        let mut set = [Gl2::I; 6];
        let mut len = 0;
        for g in Gl2::ALL {
            // right action: col_j' = m00 c_j + m10 c_{n+j}, col_{n+j}' = m01 c_j + m11 c_{n+j}
            let a = if g.m00() { cj } else { 0 } ^ if g.m10() { cnj } else { 0 };
            let b = if g.m01() { cj } else { 0 } ^ if g.m11() { cnj } else { 0 };
            let t1 = chi_key(chi(a, n), n);
            let t2 = chi_key(chi(b, n), n);
            let t3 = chi_key(chi(a ^ b, n), n);
            if t1 <= t2 && t2 <= t3 {
                set[len] = g;
                len += 1;
            }
        }
        if let Some(base) = &base_reduced {
            // Drop multipliers equivalent to a left multiplication; they all
            // reproduce the coset of U itself, which the identity covers.
            let mut kept = [Gl2::I; 6];
            let mut kept_len = 0;
            for &g in &set[..len] {
                let mut t = *u;
                let mut r = LocalElement::identity(n);
                r.set_block(j, g);
                r.apply_right(&mut t);
                if left_reduce(&t).0 != *base {
                    kept[kept_len] = g;
                    kept_len += 1;
                }
            }
            if kept_len != len {
                if !kept[..kept_len].contains(&Gl2::I) {
                    kept[kept_len] = Gl2::I;
                    kept_len += 1;
                }
                set = kept;
                len = kept_len;
            }
        }
        product *= len;
        out.sets[j] = set;
        out.lens[j] = len;
    }
    (out, product)
}

/// Unique locally reduced element of the double coset C_n^0 * U * C_n^0,
/// with witness factors: returns (V, L, R, M) where V = L * U * R and M is
/// the number of multiplier combinations enumerated.
pub fn local_reduce_with(
    u: &Tableau,
    opts: ReduceOptions,
) -> (Tableau, LocalElement, LocalElement, usize) {
    let n = u.n();
    let nn = n as usize;
    let (sets, product) = right_multiplier_sets(u, opts);

    let mut best: Option<(ThinMatrix, Tableau, LocalElement, LocalElement)> = None;
    let mut indices = [0usize; MAX_QUBITS];
    loop {
        let mut r = LocalElement::identity(n);
        for j in 0..nn {
            r.set_block(j, sets.sets[j][indices[j]]);
        }
        let mut t = *u;
        r.apply_right(&mut t);
        let (v, l) = left_reduce(&t);
        let key = ThinMatrix::pack(&v);
        let better = match &best {
            None => true,
            Some((bk, ..)) => key < *bk,
        };
        if better {
            best = Some((key, v, l, r));
        }
        // odometer over the per-qubit sets
        let mut j = 0;
        loop {
            if j == nn {
                let (_, v, l, r) = best.unwrap();
                return (v, l, r, product);
            }
            indices[j] += 1;
            if indices[j] < sets.lens[j] {
                break;
            }
            indices[j] = 0;
            j += 1;
        }
    }
}

pub fn local_reduce(u: &Tableau) -> (Tableau, LocalElement, LocalElement) {
    let (v, l, r, _) = local_reduce_with(u, ReduceOptions::default());
    (v, l, r)
}

/// The canonical class representative: smallest locally reduced element over
/// the kappa-minimizing relabelings, with a full transformation witness.
pub fn reduce_full_with(u: &Tableau, opts: ReduceOptions) -> Reduction {
    let n = u.n();
    let k = kappa(u);
    let perms = all_permutations(n);
    let mut best_perm = perms[0];
    let mut candidates: Vec<QubitPermutation> = vec![perms[0]];
    for w in &perms[1..] {
        match perm_kappa_cmp(&k, w, &best_perm) {
            std::cmp::Ordering::Less => {
                best_perm = *w;
                candidates.clear();
                candidates.push(*w);
            }
            std::cmp::Ordering::Equal => candidates.push(*w),
            std::cmp::Ordering::Greater => {}
        }
    }
    let perm_candidates_count = candidates.len();

    // Streamlined filter: skip relabelings equivalent to a left
    // multiplication; the identity contribution localReduce(U) covers them
    // and is present exactly when kappa(U) is already minimal.
    let mut include_plain = false;
    if opts.streamlined {
        let base = left_reduce(u).0;
        let kappa_is_min =
            perm_kappa_cmp(&k, &QubitPermutation::identity(n), &best_perm) == std::cmp::Ordering::Equal;
        candidates.retain(|w| left_reduce(&w.conjugate(u)).0 != base);
        include_plain = kappa_is_min;
    }

    let mut info = ReduceInfo { perm_candidates: perm_candidates_count, combo_product: 0 };
    let mut best: Option<(ThinMatrix, Tableau, ReductionWitness)> = None;
    let mut consider = |w: QubitPermutation, u: &Tableau, info: &mut ReduceInfo| {
        let conj = w.conjugate(u);
        let (v, l, r, m) = local_reduce_with(&conj, opts);
        info.combo_product = info.combo_product.max(m);
        let key = ThinMatrix::pack(&v);
        let better = match &best {
            None => true,
            Some((bk, ..)) => key < *bk,
        };
        if better {
            best = Some((key, v, ReductionWitness { left: l, perm: w, right: r }));
        }
    };
    if include_plain {
        consider(QubitPermutation::identity(n), u, &mut info);
    }
    for w in candidates {
        consider(w, u, &mut info);
    }

    let (thin, reduced, witness) = best.expect("candidate set is never empty");
    debug_assert_eq!(witness.apply(u), reduced);
    Reduction { reduced, thin, witness, info }
}

pub fn reduce_full(u: &Tableau) -> Reduction {
    reduce_full_with(u, ReduceOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym::tableau::{random_clifford, Gate, Tableau};
    use rand::{Rng, SeedableRng};

    fn random_class_move(
        u: &Tableau,
        rng: &mut impl Rng,
    ) -> Tableau {
        let n = u.n();
        let perms = all_permutations(n);
        let w = perms[rng.random_range(0..perms.len())];
        let l = LocalElement::random(n, rng);
        let r = LocalElement::random(n, rng);
        let mut t = w.conjugate(u);
        l.apply_left(&mut t);
        r.apply_right(&mut t);
        t
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(0, 3), 0);
        // n=2, v = (1,0,0,1): components 1 and 4 set
        let v: u16 = 0b1001;
        assert_eq!(chi(v, 2), 0b11);
    }

    #[test]
    fn chi_invariant_under_left_locals() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        for _ in 0..1000 {
            let n = 2 + rng.random_range(0..4) as u8;
            let v: u16 = rng.random_range(0..1u32 << (2 * n)) as u16;
            let l = LocalElement::random(n, &mut rng);
            // column vector transform: component pair (j, n+j) maps by block
            let lt = l.to_tableau();
            let mut lv = 0u16;
            for r in 0..2 * n as usize {
                let bits = lt.row(r) & v;
                if bits.count_ones() & 1 == 1 {
                    lv |= 1 << r;
                }
            }
            assert_eq!(chi(lv, n), chi(v, n));
        }
    }

    #[test]
    fn left_reduce_n1_identity_gives_omega() {
        // the only element of C_1 with rows 01 < 10 is Omega_1
        let (v, l) = left_reduce(&Tableau::identity(1));
        assert_eq!(v, Tableau::omega(1));
        // enumeration: exactly one of the six left multiples is left-reduced
        let mut hits = 0;
        for g in Gl2::ALL {
            let mut t = Tableau::identity(1);
            let mut le = LocalElement::identity(1);
            le.set_block(0, g);
            le.apply_left(&mut t);
            if is_left_reduced(&t) {
                hits += 1;
                assert_eq!(t, v);
            }
        }
        assert_eq!(hits, 1);
        let mut check = Tableau::identity(1);
        l.apply_left(&mut check);
        assert_eq!(check, v);
    }

    #[test]
    fn left_reduce_idempotent_and_coset_invariant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..500 {
            let n = 2 + rng.random_range(0..4) as u8;
            let u = random_clifford(n, 60, rng.random_range(0..1 << 30));
            let (v, l) = left_reduce(&u);
            let mut check = u;
            l.apply_left(&mut check);
            assert_eq!(check, v);
            assert_eq!(left_reduce(&v).0, v);
            let lm = LocalElement::random(n, &mut rng);
            let mut lu = u;
            lm.apply_left(&mut lu);
            assert_eq!(left_reduce(&lu).0, v);
        }
    }

    #[test]
    fn kappa_examples() {
        let k = kappa(&Tableau::identity(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(k.entry(i, j), if i == j { 2 } else { 0 });
            }
        }
        let cnot = Tableau::identity(2).with_gate(Gate::Cnot(1, 2));
        let k = kappa(&cnot);
        assert_eq!(k.flatten(), vec![2, 1, 1, 2]);
    }

    #[test]
    fn kappa_invariant_under_locals() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        for _ in 0..1000 {
            let n = 2 + rng.random_range(0..4) as u8;
            let u = random_clifford(n, 60, rng.random_range(0..1 << 30));
            let l = LocalElement::random(n, &mut rng);
            let r = LocalElement::random(n, &mut rng);
            let mut t = u;
            l.apply_left(&mut t);
            r.apply_right(&mut t);
            assert_eq!(kappa(&t), kappa(&u));
        }
    }

    #[test]
    fn local_reduce_double_coset_invariant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..300 {
            let n = 2 + rng.random_range(0..3) as u8;
            let u = random_clifford(n, 60, rng.random_range(0..1 << 30));
            let (v, l, r) = local_reduce(&u);
            let mut check = u;
            r.apply_right(&mut check);
            l.apply_left(&mut check);
            assert_eq!(check, v);
            let lm = LocalElement::random(n, &mut rng);
            let rm = LocalElement::random(n, &mut rng);
            let mut moved = u;
            lm.apply_left(&mut moved);
            rm.apply_right(&mut moved);
            assert_eq!(local_reduce(&moved).0, v);
        }
    }

    #[test]
    fn reduce_full_invariance_idempotence_witness() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(6);
        for _ in 0..300 {
            let n = 2 + rng.random_range(0..3) as u8;
            let u = random_clifford(n, 60, rng.random_range(0..1 << 30));
            let red = reduce_full(&u);
            assert_eq!(red.witness.apply(&u), red.reduced);
            let again = reduce_full(&red.reduced);
            assert_eq!(again.reduced, red.reduced);
            let moved = random_class_move(&u, &mut rng);
            assert_eq!(reduce_full(&moved).reduced, red.reduced);
        }
    }

    #[test]
    fn cnot_both_directions_reduce_identically() {
        let a = Tableau::identity(2).with_gate(Gate::Cnot(1, 2));
        let b = Tableau::identity(2).with_gate(Gate::Cnot(2, 1));
        assert_eq!(reduce_full(&a).reduced, reduce_full(&b).reduced);
    }

    #[test]
    fn n2_has_exactly_four_classes() {
        // exhaustive sweep of Sp(4, F2)
        let mut classes = std::collections::HashSet::new();
        let mut count = 0u32;
        for bits in 0..1u32 << 16 {
            let rows = [
                (bits & 0xF) as u16,
                (bits >> 4 & 0xF) as u16,
                (bits >> 8 & 0xF) as u16,
                (bits >> 12 & 0xF) as u16,
            ];
            let t = Tableau::from_rows(2, &rows);
            if t.is_symplectic() {
                count += 1;
                classes.insert(reduce_full(&t).thin);
            }
        }
        assert_eq!(count, 720);
        assert_eq!(classes.len(), 4);
    }

    #[test]
    fn streamlined_matches_base_exhaustively_n2() {
        let opts = ReduceOptions { streamlined: true };
        for bits in 0..1u32 << 16 {
            let rows = [
                (bits & 0xF) as u16,
                (bits >> 4 & 0xF) as u16,
                (bits >> 8 & 0xF) as u16,
                (bits >> 12 & 0xF) as u16,
            ];
            let t = Tableau::from_rows(2, &rows);
            if t.is_symplectic() {
                assert_eq!(reduce_full_with(&t, opts).reduced, reduce_full(&t).reduced);
                assert_eq!(
                    local_reduce_with(&t, opts).0,
                    local_reduce_with(&t, ReduceOptions::default()).0
                );
            }
        }
    }

    #[test]
    fn streamlined_matches_base_random_n_up_to_6() {
        let opts = ReduceOptions { streamlined: true };
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let n = 2 + rng.random_range(0..5) as u8;
            let u = random_clifford(n, 80, rng.random_range(0..1 << 30));
            assert_eq!(reduce_full_with(&u, opts).reduced, reduce_full(&u).reduced);
        }
    }

    #[test]
    fn n2_double_cosets_partition_into_four_classes() {
        // Group all 720 elements by local_reduce image; verify each group is
        // a full double coset and that reduce_full merges them into 4 classes.
        use std::collections::HashMap;
        let mut by_local: HashMap<ThinMatrix, Vec<Tableau>> = HashMap::new();
        for bits in 0..1u32 << 16 {
            let rows = [
                (bits & 0xF) as u16,
                (bits >> 4 & 0xF) as u16,
                (bits >> 8 & 0xF) as u16,
                (bits >> 12 & 0xF) as u16,
            ];
            let t = Tableau::from_rows(2, &rows);
            if t.is_symplectic() {
                let (v, _, _) = local_reduce(&t);
                by_local.entry(ThinMatrix::pack(&v)).or_default().push(t);
            }
        }
        // each group must be closed under two-sided local multiplication
        for members in by_local.values() {
            let rep = members[0];
            let mut orbit = std::collections::HashSet::new();
            for l in LocalElement::all(2) {
                for r in LocalElement::all(2) {
                    let mut t = rep;
                    l.apply_left(&mut t);
                    r.apply_right(&mut t);
                    orbit.insert(t);
                }
            }
            assert_eq!(orbit.len(), members.len());
            for m in members {
                assert!(orbit.contains(m));
            }
        }
        // at n=2 the relabeling quotient is trivial: 4 double cosets of
        // sizes {36, 36, 324, 324} map onto the 4 classes
        let mut coset_sizes: Vec<usize> = by_local.values().map(Vec::len).collect();
        coset_sizes.sort_unstable();
        assert_eq!(coset_sizes, vec![36, 36, 324, 324]);
        let full: std::collections::HashSet<ThinMatrix> = by_local
            .values()
            .map(|ms| reduce_full(&ms[0]).thin)
            .collect();
        assert_eq!(full.len(), 4);
    }

    #[test]
    fn reduced_elements_are_left_reduced_and_expandable() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(8);
        for _ in 0..200 {
            let n = 2 + rng.random_range(0..4) as u8;
            let u = random_clifford(n, 60, rng.random_range(0..1 << 30));
            let red = reduce_full(&u);
            assert!(is_left_reduced(&red.reduced));
            assert_eq!(red.thin.expand().unwrap(), red.reduced);
        }
    }
}
