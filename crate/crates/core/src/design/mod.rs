//! Minimum-average-cost Clifford unitary 2-designs.
//!
//! A distribution over the group is a 2-design exactly when it is Pauli
//! mixing: a random element maps every fixed nonzero vector to a uniformly
//! random nonzero vector. Sampling class representatives with uniformly
//! random local dressings and qubit relabelings reduces the problem to a
//! linear program over the canonical classes: minimize the average cost
//! subject to normalization and one mixing row per restricted vector pair.

pub mod simplex;

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::db::files::DbHandle;
use crate::db::{Database, DbError};
use crate::reduce::chi;
use crate::sym::local::LocalElement;
use crate::sym::perm::all_permutations;
use crate::sym::tableau::{Circuit, Tableau};
use crate::synth;
use simplex::{solve, LpNum, SimplexProblem, SimplexStatus};

#[derive(Debug)]
pub enum DesignError {
    /// The LP is infeasible, which signals wrong mixing coefficients: the
    /// uniform distribution over the whole group is always feasible.
    Infeasible,
    Unbounded,
    Db(DbError),
}

impl fmt::Display for DesignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignError::Infeasible => {
                write!(f, "mixing LP infeasible: coefficient computation is inconsistent")
            }
            DesignError::Unbounded => write!(f, "mixing LP unbounded"),
            DesignError::Db(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DesignError {}

impl From<DbError> for DesignError {
    fn from(e: DbError) -> DesignError {
        DesignError::Db(e)
    }
}

/// One canonical class as an LP variable.
#[derive(Clone, Copy, Debug)]
pub struct ClassInfo {
    pub tableau: Tableau,
    pub cost: usize,
}

/// Flattens the database into the fixed variable order: shards ascending,
/// records in shard order.
pub fn collect_classes(db: &Database) -> Vec<ClassInfo> {
    let n = db.n();
    let mut out = Vec::with_capacity(db.total_classes());
    for k in 0..=db.k_max() {
        for rec in db.shard(k) {
            let tableau = rec
                .thin(n)
                .expand()
                .expect("database records are valid reduced elements");
            out.push(ClassInfo { tableau, cost: k });
        }
    }
    out
}

/// Matrix-vector product over F2; vectors are component bitmasks.
#[inline]
fn mat_vec(t: &Tableau, v: u16) -> u16 {
    let mut out = 0u16;
    for r in 0..t.two_n() {
        out |= (((t.row(r) & v).count_ones() & 1) as u16) << r;
    }
    out
}

/// All vectors with a given support, i.e. chi(x') = support: three choices
/// of (x, z) bits per support qubit.
fn support_orbit(n: u8, support: u16) -> Vec<u16> {
    let qubits: Vec<usize> = (0..n as usize).filter(|&j| support >> j & 1 != 0).collect();
    let mut out = Vec::with_capacity(3usize.pow(qubits.len() as u32));
    let mut idx = vec![0usize; qubits.len()];
    loop {
        let mut v = 0u16;
        for (pos, &j) in qubits.iter().enumerate() {
            let (xb, zb) = [(1u16, 0u16), (0, 1), (1, 1)][idx[pos]];
            v |= xb << j | zb << (n as usize + j);
        }
        out.push(v);
        let mut p = 0;
        loop {
            if p == qubits.len() {
                return out;
            }
            idx[p] += 1;
            if idx[p] < 3 {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

fn factorial(n: u8) -> i64 {
    (1..=n as i64).product()
}

/// Probability that a uniform element of the class of U maps x to y,
/// computed by averaging over relabelings and local orbits:
/// g = (1/n!) sum_W 3^{-|chi(x)|} 3^{-|chi(y)|}
///     #{x': chi(x') = chi(x), chi(W^{-1} U W x') = chi(y)}.
pub fn g_coeff(u: &Tableau, x: u16, y: u16) -> Rational64 {
    let n = u.n();
    assert!(x != 0 && y != 0, "mixing coefficients need nonzero vectors");
    let cx = chi(x, n);
    let cy = chi(y, n);
    let orbit = support_orbit(n, cx);
    let mut count: i64 = 0;
    for w in all_permutations(n) {
        let v = w.conjugate(u);
        for &xp in &orbit {
            if chi(mat_vec(&v, xp), n) == cy {
                count += 1;
            }
        }
    }
    let denom = factorial(n)
        * 3i64.pow(cx.count_ones())
        * 3i64.pow(cy.count_ones());
    Rational64::new(count, denom)
}

/// The mixing LP: normalization row plus one row per restricted pair
/// (x, y) = (0^n zx, 0^n zy), in lexicographic (zx, zy) order.
pub struct DesignLp {
    pub n: u8,
    pub costs: Vec<usize>,
    /// rows[0] is the normalization row; rows[1 + r] the mixing rows.
    pub rows: Vec<Vec<Rational64>>,
    pub rhs: Vec<Rational64>,
}

impl DesignLp {
    pub fn variables(&self) -> usize {
        self.costs.len()
    }

    pub fn constraints(&self) -> usize {
        self.rows.len()
    }
}

/// Assembles the constraint matrix; one column per class, parallel over
/// classes.
pub fn build_lp(n: u8, classes: &[ClassInfo], threads: usize) -> DesignLp {
    let side = (1usize << n) - 1;
    let num_rows = 1 + side * side;
    let threads = if threads > 0 {
        threads
    } else {
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
    };

    // per class: counts[zx-1][zy-1] summed over permutations
    let columns: Vec<Vec<Rational64>> = {
        let mut columns: Vec<Vec<Rational64>> = vec![Vec::new(); classes.len()];
        let cursor = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<Vec<Rational64>>> =
            (0..classes.len()).map(|_| std::sync::Mutex::new(Vec::new())).collect();
        std::thread::scope(|scope| {
            for _ in 0..threads.min(classes.len()) {
                let cursor = &cursor;
                let slots = &slots;
                scope.spawn(move || loop {
                    let i = cursor.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= classes.len() {
                        break;
                    }
                    *slots[i].lock().unwrap() = class_column(n, &classes[i].tableau);
                });
            }
        });
        for (i, slot) in slots.into_iter().enumerate() {
            columns[i] = slot.into_inner().unwrap();
        }
        columns
    };

    let mut rows = Vec::with_capacity(num_rows);
    rows.push(vec![Rational64::new(1, 1); classes.len()]);
    for r in 0..side * side {
        rows.push(columns.iter().map(|col| col[r]).collect());
    }
    let mut rhs = vec![Rational64::new(1, 1)];
    let target = Rational64::new(1, (1i64 << (2 * n)) - 1);
    rhs.extend(std::iter::repeat_n(target, side * side));
    DesignLp { n, costs: classes.iter().map(|c| c.cost).collect(), rows, rhs }
}

/// Mixing coefficients of one class for every restricted row, in
/// lexicographic (zx, zy) order.
fn class_column(n: u8, u: &Tableau) -> Vec<Rational64> {
    let side = (1usize << n) - 1;
    let nf = factorial(n);
    let mut counts = vec![vec![0i64; side]; side];
    for w in all_permutations(n) {
        let v = w.conjugate(u);
        for zx in 1..=side as u16 {
            for &xp in &support_orbit(n, zx) {
                let cy = chi(mat_vec(&v, xp), n);
                debug_assert_ne!(cy, 0);
                counts[zx as usize - 1][cy as usize - 1] += 1;
            }
        }
    }
    let mut out = Vec::with_capacity(side * side);
    for zx in 1..=side as u16 {
        for zy in 1..=side as u16 {
            let denom = nf * 3i64.pow(zx.count_ones()) * 3i64.pow(zy.count_ones());
            out.push(Rational64::new(counts[zx as usize - 1][zy as usize - 1], denom));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpMode {
    Exact,
    Float,
}

/// An optimal basic solution of the mixing LP.
pub struct DesignSolution {
    pub mode: LpMode,
    pub probabilities: Vec<f64>,
    pub probabilities_exact: Option<Vec<BigRational>>,
    pub average_cost: f64,
    pub average_cost_exact: Option<BigRational>,
}

pub fn solve_lp(lp: &DesignLp, mode: LpMode) -> Result<DesignSolution, DesignError> {
    match mode {
        LpMode::Exact => {
            let p = SimplexProblem::<BigRational> {
                a: lp
                    .rows
                    .iter()
                    .map(|row| row.iter().map(BigRational::from_ratio).collect())
                    .collect(),
                b: lp.rhs.iter().map(BigRational::from_ratio).collect(),
                c: lp
                    .costs
                    .iter()
                    .map(|&k| BigRational::from_integer(BigInt::from(k)))
                    .collect(),
            };
            let s = solve(&p);
            match s.status {
                SimplexStatus::Optimal => Ok(DesignSolution {
                    mode,
                    probabilities: s.x.iter().map(|v| v.to_f64().unwrap()).collect(),
                    average_cost: s.objective.to_f64().unwrap(),
                    probabilities_exact: Some(s.x),
                    average_cost_exact: Some(s.objective),
                }),
                SimplexStatus::Infeasible => Err(DesignError::Infeasible),
                SimplexStatus::Unbounded => Err(DesignError::Unbounded),
            }
        }
        LpMode::Float => {
            let p = SimplexProblem::<f64> {
                a: lp
                    .rows
                    .iter()
                    .map(|row| row.iter().map(f64::from_ratio).collect())
                    .collect(),
                b: lp.rhs.iter().map(f64::from_ratio).collect(),
                c: lp.costs.iter().map(|&k| k as f64).collect(),
            };
            let s = solve(&p);
            match s.status {
                SimplexStatus::Optimal => Ok(DesignSolution {
                    mode,
                    probabilities: s.x,
                    probabilities_exact: None,
                    average_cost: s.objective,
                    average_cost_exact: None,
                }),
                SimplexStatus::Infeasible => Err(DesignError::Infeasible),
                SimplexStatus::Unbounded => Err(DesignError::Unbounded),
            }
        }
    }
}

/// Maximum mixing residual of a distribution over the classes: the largest
/// deviation of sum_U eta(U) g(U, x, y) from 1/(4^n - 1). Checks every
/// restricted row and a seeded sample of unrestricted nonzero pairs.
pub struct MixingResidual {
    pub max_abs: f64,
    pub max_abs_exact: Option<BigRational>,
}

pub fn verify_pauli_mixing(
    n: u8,
    classes: &[ClassInfo],
    probabilities: &[f64],
    probabilities_exact: Option<&[BigRational]>,
    unrestricted_samples: usize,
) -> MixingResidual {
    let side = (1u16 << n) - 1;
    let mut pairs: Vec<(u16, u16)> = Vec::new();
    for zx in 1..=side {
        for zy in 1..=side {
            pairs.push((zx << n, zy << n));
        }
    }
    let mut rng = StdRng::seed_from_u64(0x2de51);
    let full = (1u16 << (2 * n)) - 1;
    for _ in 0..unrestricted_samples {
        let x = rng.random_range(1..=full);
        let y = rng.random_range(1..=full);
        pairs.push((x, y));
    }

    let target = Rational64::new(1, (1i64 << (2 * n)) - 1);
    let mut max_f = 0.0f64;
    let mut max_exact: Option<BigRational> = probabilities_exact.map(|_| <BigRational as Zero>::zero());
    for (x, y) in pairs {
        let gs: Vec<Rational64> = classes.iter().map(|c| g_coeff(&c.tableau, x, y)).collect();
        match probabilities_exact {
            Some(pe) => {
                let mut acc = <BigRational as Zero>::zero();
                for (g, p) in gs.iter().zip(pe) {
                    acc += BigRational::from_ratio(g) * p;
                }
                let dev = (acc - BigRational::from_ratio(&target)).abs();
                max_f = max_f.max(dev.to_f64().unwrap());
                if let Some(me) = &mut max_exact {
                    if dev > *me {
                        *me = dev;
                    }
                }
            }
            None => {
                let mut acc = 0.0f64;
                for (g, p) in gs.iter().zip(probabilities) {
                    acc += f64::from_ratio(g) * p;
                }
                max_f = max_f.max((acc - f64::from_ratio(&target)).abs());
            }
        }
    }
    MixingResidual { max_abs: max_f, max_abs_exact: max_exact }
}

/// One supported class of the optimized design.
pub struct DesignEntry {
    pub class_index: usize,
    pub tableau: Tableau,
    pub cost: usize,
    pub probability: f64,
    pub probability_exact: Option<BigRational>,
    pub circuit: Circuit,
}

/// The solved design: supported classes with optimal circuits, the average
/// cost, and the verified mixing residual.
pub struct DesignDistribution {
    pub n: u8,
    pub mode: LpMode,
    pub entries: Vec<DesignEntry>,
    pub average_cost: f64,
    pub average_cost_exact: Option<BigRational>,
    pub residual: f64,
    pub residual_exact: Option<BigRational>,
}

const SUPPORT_EPS: f64 = 1e-12;

/// Solves the LP and packages the result with synthesized circuits.
pub fn optimize_design(
    db_ram: &Database,
    db: &DbHandle,
    mode: LpMode,
    threads: usize,
    unrestricted_samples: usize,
) -> Result<DesignDistribution, DesignError> {
    let n = db_ram.n();
    let classes = collect_classes(db_ram);
    let lp = build_lp(n, &classes, threads);
    let sol = solve_lp(&lp, mode)?;
    let residual = verify_pauli_mixing(
        n,
        &classes,
        &sol.probabilities,
        sol.probabilities_exact.as_deref(),
        unrestricted_samples,
    );
    let mut entries = Vec::new();
    for (i, &p) in sol.probabilities.iter().enumerate() {
        let supported = match &sol.probabilities_exact {
            Some(pe) => !pe[i].is_zero(),
            None => p > SUPPORT_EPS,
        };
        if supported {
            let circuit = synth::synthesize(&classes[i].tableau, db)?;
            entries.push(DesignEntry {
                class_index: i,
                tableau: classes[i].tableau,
                cost: classes[i].cost,
                probability: p,
                probability_exact: sol.probabilities_exact.as_ref().map(|pe| pe[i].clone()),
                circuit,
            });
        }
    }
    Ok(DesignDistribution {
        n,
        mode,
        entries,
        average_cost: sol.average_cost,
        average_cost_exact: sol.average_cost_exact,
        residual: residual.max_abs,
        residual_exact: residual.max_abs_exact,
    })
}

/// Seeded i.i.d. sampler of the actual design: L W^{-1} U_j W R with j drawn
/// from the optimized distribution and the dressings uniform.
pub struct DesignSampler<'a> {
    dist: &'a DesignDistribution,
    cumulative: Vec<f64>,
    rng: StdRng,
}

impl<'a> DesignSampler<'a> {
    pub fn new(dist: &'a DesignDistribution, seed: u64) -> DesignSampler<'a> {
        let mut acc = 0.0;
        let cumulative = dist
            .entries
            .iter()
            .map(|e| {
                acc += e.probability;
                acc
            })
            .collect();
        DesignSampler { dist, cumulative, rng: StdRng::seed_from_u64(seed) }
    }

    /// Index of the class the next draw comes from, plus the dressed element.
    pub fn draw(&mut self) -> (usize, Tableau) {
        let n = self.dist.n;
        let u: f64 = self.rng.random_range(0.0..*self.cumulative.last().unwrap());
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.dist.entries.len() - 1);
        let entry = &self.dist.entries[idx];

        // uniform permutation via Fisher-Yates
        let mut map: Vec<u8> = (0..n).collect();
        for i in (1..map.len()).rev() {
            let j = self.rng.random_range(0..=i);
            map.swap(i, j);
        }
        let w = crate::sym::perm::QubitPermutation::from_map(n, &map).unwrap();
        let l = LocalElement::random(n, &mut self.rng);
        let r = LocalElement::random(n, &mut self.rng);
        let mut t = w.conjugate(&entry.tableau);
        l.apply_left(&mut t);
        r.apply_right(&mut t);
        (idx, t)
    }
}

impl Iterator for DesignSampler<'_> {
    type Item = Tableau;

    fn next(&mut self) -> Option<Tableau> {
        Some(self.draw().1)
    }
}
