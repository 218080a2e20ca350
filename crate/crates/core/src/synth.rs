//! Cost queries and optimal circuit extraction.
//!
//! Synthesis unwinds the stored cost-reducing generators: reduce the input
//! with a witness (K, W, L), look up the canonical element's generator G_a,
//! transport it through W and L to a cost-reducing generator G_b for the
//! input itself, multiply it on and recurse. At cost zero the residue is a
//! local element; decomposing everything into self-inverse primitive gates
//! and reversing yields an optimal circuit for the input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::db::files::DbHandle;
use crate::db::stats::CountReport;
use crate::db::DbError;
use crate::reduce::{reduce_full, reduce_full_with, ReduceOptions};
use crate::sym::gl2::Gl2;
use crate::sym::local::LocalElement;
use crate::sym::perm::QubitPermutation;
use crate::sym::tableau::{Circuit, Gate, Tableau};
use crate::sym::GeneratorSet;

// The streamlined candidate filters are representative-identical to the base
// definitions (verified exhaustively for n = 2, 3) and avoid the near-6^n
// blowup on the local and near-local elements every synthesis walk visits.
const QUERY_OPTS: ReduceOptions = ReduceOptions { streamlined: true };

/// CNOT cost of an element: the shard level holding its reduced form.
pub fn cost(u: &Tableau, db: &DbHandle) -> Result<usize, DbError> {
    if u.n() != db.n() {
        return Err(DbError::UnsupportedQubits(u.n()));
    }
    // cost zero is exactly block-locality
    if LocalElement::from_tableau(u).is_some() {
        return Ok(0);
    }
    let red = reduce_full(u);
    match db.find(&red.thin)? {
        Some((k, _)) => Ok(k),
        None => Err(DbError::Incomplete),
    }
}

/// Solves W L G_a = G_b W M for (b, M): computes T = W L G_a W^{-1} and
/// locates the unique generator with G_b^{-1} T local.
pub fn commute_generator(
    gens: &GeneratorSet,
    w: &QubitPermutation,
    l: &LocalElement,
    a: usize,
) -> Result<(usize, LocalElement), DbError> {
    let w_inv = w.inverse();
    // T = W (L G_a) W^{-1}; conjugation by W^{-1} relabels with w itself
    let mut lga = gens.get(a).tableau;
    l.apply_left(&mut lga);
    let t = w_inv.conjugate(&lga);
    for b in 0..gens.len() {
        let m_prime = gens.get(b).inverse.multiply(&t);
        if let Some(local) = LocalElement::from_tableau(&m_prime) {
            let m = local.conjugated_by(w);
            return Ok((b, m));
        }
    }
    Err(DbError::Corrupt(format!(
        "no generator commutes with (W, L) past generator {a}"
    )))
}

/// Multiplies cost-reducing generators onto U until the residue is local:
/// returns the indices b_1..b_k and the local M with U G_{b_1}...G_{b_k} = M,
/// where k is the cost of U.
fn unwind(
    u: &Tableau,
    db: &DbHandle,
    gens: &GeneratorSet,
) -> Result<(Vec<usize>, LocalElement), DbError> {
    if !db.is_augmented() {
        return Err(DbError::NotAugmented);
    }
    if u.n() != db.n() {
        return Err(DbError::UnsupportedQubits(u.n()));
    }
    let n = u.n();
    let k_max = db.k_max();
    let mut cur = *u;
    let mut indices = Vec::new();
    let mut expected_level: Option<usize> = None;
    loop {
        // cost zero is exactly block-locality
        if let Some(m) = LocalElement::from_tableau(&cur) {
            if expected_level.is_some_and(|level| level != 0) {
                return Err(DbError::Corrupt("cost did not decrease by one".into()));
            }
            return Ok((indices, m));
        }
        let red = reduce_full_with(&cur, QUERY_OPTS);
        let (k, rec) = match expected_level {
            None => db.find(&red.thin)?.ok_or(DbError::Incomplete)?,
            Some(level) => {
                let rec = db
                    .lookup(level, &red.thin)?
                    .ok_or_else(|| DbError::Corrupt("cost did not decrease by one".into()))?;
                (level, rec)
            }
        };
        if k == 0 {
            return Err(DbError::Corrupt("non-local element filed at cost zero".into()));
        }
        let a = rec.generator_index(n) as usize;
        let (b, _m) = commute_generator(gens, &red.witness.perm, &red.witness.right, a)?;
        gens.apply(&mut cur, b);
        indices.push(b);
        expected_level = Some(k - 1);
        if indices.len() > k_max + 1 {
            return Err(DbError::Corrupt("generator unwinding did not terminate".into()));
        }
    }
}

/// Extracts a CNOT-count-optimal circuit implementing U.
pub fn synthesize(u: &Tableau, db: &DbHandle) -> Result<Circuit, DbError> {
    let gens = GeneratorSet::new(u.n());
    let (indices, m) = unwind(u, db, &gens)?;
    // U G_{b_1}...G_{b_k} = M, so the gate list of the b's followed by M^{-1}
    // implements U^{-1}; reversing the self-inverse primitives gives U
    let mut inv_gates: Vec<Gate> = Vec::new();
    for b in indices {
        inv_gates.extend_from_slice(&gens.get(b).circuit.gates);
    }
    inv_gates.extend(m.inv().gate_circuit());
    inv_gates.reverse();
    Ok(Circuit::new(u.n(), inv_gates))
}

/// Writes U as the generator word G_{a_1} ... G_{a_k} L with L local and
/// k = cost(U), by unwinding U^{-1}.
pub fn generator_decomposition(
    u: &Tableau,
    db: &DbHandle,
) -> Result<(Vec<usize>, LocalElement), DbError> {
    let gens = GeneratorSet::new(u.n());
    // U^{-1} G_{b_1}...G_{b_k} = M  =>  U = G_{b_1}...G_{b_k} M^{-1}
    let (indices, m) = unwind(&u.inverse(), db, &gens)?;
    Ok((indices, m.inv()))
}

/// Replays a circuit into its tableau.
pub fn replay(c: &Circuit) -> Tableau {
    c.replay()
}

/// Best-effort single-qubit cleanup: accumulates single-qubit gates per wire
/// between the entangling gates and re-emits each accumulated element as its
/// minimal word. Never changes the replayed tableau or the CNOT count.
pub fn tidy_circuit(c: &Circuit) -> Circuit {
    let n = c.n;
    let mut pending: Vec<Gl2> = vec![Gl2::I; n as usize + 1];
    let mut out: Vec<Gate> = Vec::new();
    let flush = |q: u8, pending: &mut Vec<Gl2>, out: &mut Vec<Gate>| {
        let g = pending[q as usize];
        if g != Gl2::I {
            out.extend(g.gate_word(q));
            pending[q as usize] = Gl2::I;
        }
    };
    for gate in &c.gates {
        match *gate {
            Gate::H(q) => pending[q as usize] = pending[q as usize] * Gl2::H,
            Gate::P(q) => pending[q as usize] = pending[q as usize] * Gl2::P,
            Gate::Cnot(cq, t) => {
                flush(cq, &mut pending, &mut out);
                flush(t, &mut pending, &mut out);
                out.push(Gate::Cnot(cq, t));
            }
        }
    }
    for q in 1..=n {
        flush(q, &mut pending, &mut out);
    }
    Circuit::new(n, out)
}

/// Exact average CNOT cost of the whole group from verified counts.
pub fn average_cost(report: &CountReport) -> (BigRational, f64) {
    let mut num = BigInt::from(0u8);
    for (k, &count) in report.per_cost.iter().enumerate() {
        num += BigInt::from(k as u64) * BigInt::from(count);
    }
    let avg = BigRational::new(num, BigInt::from(report.group_order));
    let dec = avg.to_f64().unwrap();
    (avg, dec)
}
