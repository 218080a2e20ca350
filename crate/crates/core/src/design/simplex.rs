//! Self-contained dense two-phase simplex over a generic scalar, used with
//! exact rationals for small instances and doubles for the larger ones.
//!
//! Pricing is most-negative reduced cost; after a run of degenerate pivots
//! the solver switches permanently to Bland's rule, which cannot cycle.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};

pub trait LpNum: Clone + PartialOrd + std::fmt::Debug {
    fn lp_zero() -> Self;
    fn lp_one() -> Self;
    fn from_ratio(r: &Rational64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Zero up to the scalar's tolerance.
    fn is_zero_tol(&self) -> bool;
    fn is_negative_tol(&self) -> bool {
        !self.is_zero_tol() && *self < Self::lp_zero()
    }
    fn is_positive_tol(&self) -> bool {
        !self.is_zero_tol() && *self > Self::lp_zero()
    }
}

impl LpNum for f64 {
    fn lp_zero() -> f64 {
        0.0
    }
    fn lp_one() -> f64 {
        1.0
    }
    fn from_ratio(r: &Rational64) -> f64 {
        *r.numer() as f64 / *r.denom() as f64
    }
    fn add(&self, other: &f64) -> f64 {
        self + other
    }
    fn sub(&self, other: &f64) -> f64 {
        self - other
    }
    fn mul(&self, other: &f64) -> f64 {
        self * other
    }
    fn div(&self, other: &f64) -> f64 {
        self / other
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn is_zero_tol(&self) -> bool {
        self.abs() < 1e-9
    }
}

impl LpNum for BigRational {
    fn lp_zero() -> BigRational {
        <BigRational as Zero>::zero()
    }
    fn lp_one() -> BigRational {
        BigRational::from_integer(BigInt::from(1))
    }
    fn from_ratio(r: &Rational64) -> BigRational {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }
    fn add(&self, other: &BigRational) -> BigRational {
        self + other
    }
    fn sub(&self, other: &BigRational) -> BigRational {
        self - other
    }
    fn mul(&self, other: &BigRational) -> BigRational {
        self * other
    }
    fn div(&self, other: &BigRational) -> BigRational {
        self / other
    }
    fn neg(&self) -> BigRational {
        -self
    }
    fn is_zero_tol(&self) -> bool {
        self.is_zero()
    }
}

/// min c^T x subject to A x = b, x >= 0.
pub struct SimplexProblem<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

pub struct SimplexSolution<T> {
    pub status: SimplexStatus,
    pub x: Vec<T>,
    pub objective: T,
}

const DEGENERATE_STALL_LIMIT: usize = 64;

struct Dict<T> {
    rows: usize,
    cols: usize, // structural + artificial variables
    mat: Vec<Vec<T>>, // rows x (cols + 1); last column is b
    cost: Vec<T>, // cols + 1; last entry is -objective
    basis: Vec<usize>,
    bland: bool,
    stall: usize,
}

impl<T: LpNum> Dict<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.mat[r][c].clone();
        for v in self.mat[r].iter_mut() {
            *v = v.div(&piv);
        }
        for i in 0..self.rows {
            if i != r && !self.mat[i][c].is_zero_tol() {
                let factor = self.mat[i][c].clone();
                for j in 0..=self.cols {
                    let delta = factor.mul(&self.mat[r][j]);
                    self.mat[i][j] = self.mat[i][j].sub(&delta);
                }
            }
        }
        if !self.cost[c].is_zero_tol() {
            let factor = self.cost[c].clone();
            for j in 0..=self.cols {
                let delta = factor.mul(&self.mat[r][j]);
                self.cost[j] = self.cost[j].sub(&delta);
            }
        }
        self.basis[r] = c;
    }

    fn entering(&self, allowed: &dyn Fn(usize) -> bool) -> Option<usize> {
        if self.bland {
            (0..self.cols).find(|&j| allowed(j) && self.cost[j].is_negative_tol())
        } else {
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.cols {
                if allowed(j) && self.cost[j].is_negative_tol() {
                    match &best {
                        Some((_, v)) if self.cost[j] >= *v => {}
                        _ => best = Some((j, self.cost[j].clone())),
                    }
                }
            }
            best.map(|(j, _)| j)
        }
    }

    fn leaving(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for r in 0..self.rows {
            if self.mat[r][c].is_positive_tol() {
                let ratio = self.mat[r][self.cols].div(&self.mat[r][c]);
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio <= *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        best.map(|(r, _)| r)
    }

    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> SimplexStatus {
        loop {
            let Some(c) = self.entering(allowed) else {
                return SimplexStatus::Optimal;
            };
            let Some(r) = self.leaving(c) else {
                return SimplexStatus::Unbounded;
            };
            let degenerate = self.mat[r][self.cols].is_zero_tol();
            self.pivot(r, c);
            if degenerate {
                self.stall += 1;
                if self.stall >= DEGENERATE_STALL_LIMIT {
                    self.bland = true;
                }
            } else {
                self.stall = 0;
            }
        }
    }
}

pub fn solve<T: LpNum>(p: &SimplexProblem<T>) -> SimplexSolution<T> {
    let m = p.a.len();
    let n = p.c.len();
    let cols = n + m; // structural + one artificial per row
    let mut mat: Vec<Vec<T>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<T> = Vec::with_capacity(cols + 1);
        let flip = p.b[i] < T::lp_zero();
        for j in 0..n {
            let v = p.a[i][j].clone();
            row.push(if flip { v.neg() } else { v });
        }
        for k in 0..m {
            row.push(if k == i { T::lp_one() } else { T::lp_zero() });
        }
        row.push(if flip { p.b[i].neg() } else { p.b[i].clone() });
        mat.push(row);
    }

    // phase 1: minimize the sum of artificials; its cost row is the negated
    // column sums of the constraint rows
    let mut cost: Vec<T> = vec![T::lp_zero(); cols + 1];
    for j in 0..=cols {
        let mut s = T::lp_zero();
        for row in mat.iter() {
            s = s.add(&row[j]);
        }
        cost[j] = s.neg();
    }
    for (k, c) in cost.iter_mut().enumerate().take(cols).skip(n) {
        debug_assert!(k >= n);
        *c = T::lp_zero();
    }

    let mut dict = Dict {
        rows: m,
        cols,
        mat,
        cost,
        basis: (n..n + m).collect(),
        bland: false,
        stall: 0,
    };
    let status = dict.run(&|_| true);
    debug_assert_ne!(status, SimplexStatus::Unbounded, "phase 1 is bounded below by 0");
    let phase1_obj = dict.cost[cols].neg();
    if phase1_obj.is_positive_tol() {
        return SimplexSolution { status: SimplexStatus::Infeasible, x: vec![], objective: T::lp_zero() };
    }

    // drive remaining artificials out of the basis; drop redundant rows
    let mut drop_rows = Vec::new();
    for r in 0..dict.rows {
        if dict.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| !dict.mat[r][j].is_zero_tol()) {
                dict.pivot(r, c);
            } else {
                drop_rows.push(r);
            }
        }
    }
    for &r in drop_rows.iter().rev() {
        dict.mat.remove(r);
        dict.basis.remove(r);
        dict.rows -= 1;
    }

    // phase 2: rebuild the cost row from the true objective
    let mut cost: Vec<T> = p.c.to_vec();
    cost.extend(std::iter::repeat_with(T::lp_zero).take(m + 1));
    dict.cost = cost;
    for r in 0..dict.rows {
        let b = dict.basis[r];
        if !dict.cost[b].is_zero_tol() {
            let factor = dict.cost[b].clone();
            for j in 0..=dict.cols {
                let delta = factor.mul(&dict.mat[r][j]);
                dict.cost[j] = dict.cost[j].sub(&delta);
            }
        }
    }
    dict.bland = false;
    dict.stall = 0;
    let status = dict.run(&|j| j < n); // artificials may not re-enter
    if status == SimplexStatus::Unbounded {
        return SimplexSolution { status, x: vec![], objective: T::lp_zero() };
    }

    let mut x = vec![T::lp_zero(); n];
    for r in 0..dict.rows {
        if dict.basis[r] < n {
            x[dict.basis[r]] = dict.mat[r][dict.cols].clone();
        }
    }
    let objective = dict.cost[dict.cols].neg();
    SimplexSolution { status: SimplexStatus::Optimal, x, objective }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tiny_lp_float() {
        // min -x - y st x + y = 1, x,y >= 0  -> objective -1
        let p = SimplexProblem {
            a: vec![vec![1.0, 1.0]],
            b: vec![1.0],
            c: vec![-1.0, -1.0],
        };
        let s = solve(&p);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn tiny_lp_exact() {
        // min x1 + 2 x2 st x1 + x2 = 1  -> x = (1, 0), obj 1
        let p = SimplexProblem {
            a: vec![vec![rat(1, 1), rat(1, 1)]],
            b: vec![rat(1, 1)],
            c: vec![rat(1, 1), rat(2, 1)],
        };
        let s = solve(&p);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert_eq!(s.objective, rat(1, 1));
        assert_eq!(s.x, vec![rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn infeasible_detected() {
        // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold
        let p = SimplexProblem {
            a: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            b: vec![1.0, 2.0],
            c: vec![1.0, 1.0],
        };
        assert_eq!(solve(&p).status, SimplexStatus::Infeasible);
    }

    #[test]
    fn redundant_rows_handled() {
        // duplicated constraint
        let p = SimplexProblem {
            a: vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]],
            b: vec![rat(1, 1), rat(1, 1)],
            c: vec![rat(3, 1), rat(1, 1)],
        };
        let s = solve(&p);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert_eq!(s.objective, rat(1, 1));
    }

    #[test]
    fn unbounded_detected() {
        // min -x st x - y = 0: x can grow without bound
        let p = SimplexProblem {
            a: vec![vec![1.0, -1.0]],
            b: vec![0.0],
            c: vec![-1.0, 0.0],
        };
        assert_eq!(solve(&p).status, SimplexStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_normalized() {
        // -x1 - x2 = -1 with min x1 -> x2 = 1
        let p = SimplexProblem {
            a: vec![vec![rat(-1, 1), rat(-1, 1)]],
            b: vec![rat(-1, 1)],
            c: vec![rat(1, 1), rat(0, 1)],
        };
        let s = solve(&p);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert_eq!(s.objective, rat(0, 1));
        assert_eq!(s.x[1], rat(1, 1));
    }
}
