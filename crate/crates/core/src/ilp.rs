//! Exact integer feasibility for small systems `A y = b`, `y >= lower`.
//!
//! A lattice test rejects systems without any integer solution. Variables
//! are then split into free ones, which some nonnegative solution of
//! `A y = 0` makes positive, and bounded ones. A best-first branch and bound
//! over an exact rational simplex (minimising the sum of the variables)
//! branches on bounded variables only; once they are integral, the free
//! variables are solved over the integers and lifted by the kernel solution.
//! The bounded variables range over a finite box, so the search is finite. Sizes are small (tens of variables), so dense
//! tableaux over big rationals are fast enough.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `A y = b` with `y >= lower`, componentwise, over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSystem {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
    pub lower: Vec<i64>,
}

impl IntSystem {
    pub fn new(a: Vec<Vec<i64>>, b: Vec<i64>, lower: Vec<i64>) -> Self {
        debug_assert_eq!(a.len(), b.len());
        debug_assert!(a.iter().all(|row| row.len() == lower.len()));
        IntSystem { a, b, lower }
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn satisfied_by(&self, y: &[i64]) -> bool {
        y.len() == self.num_vars()
            && y.iter().zip(&self.lower).all(|(v, l)| v >= l)
            && self.a.iter().zip(&self.b).all(|(row, &rhs)| {
                row.iter().zip(y).map(|(&c, &v)| i128::from(c) * i128::from(v)).sum::<i128>() == i128::from(rhs)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<i64>),
    Infeasible,
}

/// Decides the system, exploring at most `node_limit` branch-and-bound nodes.
pub fn solve(sys: &IntSystem, node_limit: usize) -> Result<Feasibility> {
    let n = sys.num_vars();
    // Shift to z = y - lower >= 0.
    let rhs: Vec<BigInt> = sys
        .a
        .iter()
        .zip(&sys.b)
        .map(|(row, &b)| {
            BigInt::from(b) - row.iter().zip(&sys.lower).map(|(&c, &l)| BigInt::from(c) * l).sum::<BigInt>()
        })
        .collect();
    let a: Vec<Vec<BigInt>> = sys.a.iter().map(|row| row.iter().map(|&c| BigInt::from(c)).collect()).collect();
    if lattice_solution(&a, &rhs, n).is_none() {
        return Ok(Feasibility::Infeasible);
    }
    let kernel = positive_kernel(&a, n);
    let free: Vec<usize> = (0..n).filter(|&i| kernel[i].is_positive()).collect();
    let cap = BigRational::from_integer(BigInt::from(n) * small_solution_bound(&a, &rhs, n));
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let root = (vec![BigInt::zero(); n], vec![None::<BigInt>; n]);
    if let Some(x) = lp_min_sum(&a, &rhs, &root.0, &root.1) {
        heap.push(Node { objective: x.iter().sum(), seq, x, lo: root.0, hi: root.1 });
    }
    let mut nodes = 0usize;
    while let Some(Node { objective, x, lo, hi, .. }) = heap.pop() {
        if objective > cap {
            break;
        }
        nodes += 1;
        if nodes > node_limit {
            return Err(Error::ResourceLimit(format!("integer feasibility exceeded {node_limit} nodes")));
        }
        let bounded = |i: &usize| !kernel[*i].is_positive();
        let mut children = Vec::new();
        if let Some(i) = (0..n).filter(bounded).find(|&i| !x[i].is_integer()) {
            let fl = x[i].floor().to_integer();
            let mut down_hi = hi.clone();
            down_hi[i] = Some(fl.clone());
            let mut up_lo = lo.clone();
            up_lo[i] = &fl + 1;
            children.push((lo, down_hi));
            children.push((up_lo, hi));
        } else {
            if let Some(z) = complete_free_part(&a, &rhs, &x, &free, &kernel) {
                return unshift(sys, z.into_iter().map(BigRational::from_integer).collect()).map(Feasibility::Feasible);
            }
            // The bounded part is integral but admits no completion: split off its value.
            let Some(i) = (0..n).filter(bounded).find(|&i| hi[i].as_ref() != Some(&lo[i])) else { continue };
            let v = x[i].to_integer();
            let (mut below, mut at, mut above) = ((lo.clone(), hi.clone()), (lo.clone(), hi.clone()), (lo, hi));
            below.1[i] = Some(&v - 1);
            at.0[i] = v.clone();
            at.1[i] = Some(v.clone());
            above.0[i] = v + 1;
            children.extend([below, at, above]);
        }
        for (lo, hi) in children {
            if let Some(x) = lp_min_sum(&a, &rhs, &lo, &hi) {
                seq += 1;
                heap.push(Node { objective: x.iter().sum(), seq, x, lo, hi });
            }
        }
    }
    Ok(Feasibility::Infeasible)
}

/// Undoes the shift by `lower` on an integral point.
fn unshift(sys: &IntSystem, x: Vec<BigRational>) -> Result<Vec<i64>> {
    let mut y = Vec::with_capacity(x.len());
    for (v, &l) in x.iter().zip(&sys.lower) {
        let v = v.to_integer().to_i64().ok_or_else(Error::overflow)?;
        y.push(v.checked_add(l).ok_or_else(Error::overflow)?);
    }
    debug_assert!(sys.satisfied_by(&y));
    Ok(y)
}

/// An integral `w >= 0` with `A w = 0` whose support is every variable that
/// is unbounded on `A z = c, z >= 0`. The other variables are bounded there.
fn positive_kernel(a: &[Vec<BigInt>], n: usize) -> Vec<BigInt> {
    let zero = vec![BigInt::zero(); a.len()];
    let mut w = vec![BigInt::zero(); n];
    for i in 0..n {
        if w[i].is_positive() {
            continue;
        }
        let mut lo = vec![BigInt::zero(); n];
        lo[i] = BigInt::one();
        if let Some(u) = lp_min_sum(a, &zero, &lo, &vec![None; n]) {
            let scale = u.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            for (wj, uj) in w.iter_mut().zip(&u) {
                *wj += (uj * BigRational::from_integer(scale.clone())).to_integer();
            }
        }
    }
    w
}

/// Keeps the integral bounded entries of `x` and solves for the free entries
/// over the integers, then adds multiples of `kernel` until they are
/// nonnegative. `None` if the free columns cannot reach the residual.
fn complete_free_part(
    a: &[Vec<BigInt>],
    c: &[BigInt],
    x: &[BigRational],
    free: &[usize],
    kernel: &[BigInt],
) -> Option<Vec<BigInt>> {
    let n = x.len();
    let fixed: Vec<BigInt> = (0..n)
        .map(|i| if free.contains(&i) { BigInt::zero() } else { x[i].to_integer() })
        .collect();
    let residual: Vec<BigInt> = a
        .iter()
        .zip(c)
        .map(|(row, ci)| ci - row.iter().zip(&fixed).map(|(r, f)| r * f).sum::<BigInt>())
        .collect();
    let sub: Vec<Vec<BigInt>> = a.iter().map(|row| free.iter().map(|&j| row[j].clone()).collect()).collect();
    let z = lattice_solution(&sub, &residual, free.len())?;
    let k = free
        .iter()
        .zip(&z)
        .filter(|(_, zi)| zi.is_negative())
        .map(|(&j, zi)| (-zi).div_ceil(&kernel[j]))
        .max()
        .unwrap_or_else(BigInt::zero);
    let mut out = fixed;
    for (&j, zi) in free.iter().zip(&z) {
        out[j] = zi + &k * &kernel[j];
    }
    Some(out)
}

/// Branch-and-bound node, ordered so the heap pops the smallest LP bound first.
struct Node {
    objective: BigRational,
    seq: usize,
    x: Vec<BigRational>,
    lo: Vec<BigInt>,
    hi: Vec<Option<BigInt>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        (&other.objective, other.seq).cmp(&(&self.objective, self.seq))
    }
}

/// If `A z = c` has a solution in the naturals it has one with every entry at
/// most `n (m a)^(2m+1)`, where `a` bounds the absolute entries of `A` and `c`.
fn small_solution_bound(a: &[Vec<BigInt>], c: &[BigInt], n: usize) -> BigInt {
    let m = a.len();
    let big_a = a.iter().flatten().chain(c).map(|v| v.abs()).max().unwrap_or_else(BigInt::zero).max(BigInt::one());
    BigInt::from(n.max(1)) * num_traits::pow(BigInt::from(m.max(1)) * big_a, 2 * m + 1)
}

/// Some integer solution of `A z = c`, via column Hermite reduction. The
/// column operations are tracked in `n` extra rows below `A`.
fn lattice_solution(a: &[Vec<BigInt>], c: &[BigInt], n: usize) -> Option<Vec<BigInt>> {
    let m = a.len();
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    h.extend((0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()));
    let mut pivot_col = Vec::with_capacity(m);
    let mut k = 0;
    for r in 0..m {
        if k < n {
            for j in k + 1..n {
                if h[r][j].is_zero() {
                    continue;
                }
                if h[r][k].is_zero() {
                    for row in h.iter_mut() {
                        row.swap(k, j);
                    }
                    continue;
                }
                let (p, q) = (h[r][k].clone(), h[r][j].clone());
                let e = p.extended_gcd(&q);
                let (g, s, t) = (e.gcd, e.x, e.y);
                let (pg, qg) = (&p / &g, &q / &g);
                for row in h.iter_mut() {
                    let (ck, cj) = (row[k].clone(), row[j].clone());
                    row[k] = &s * &ck + &t * &cj;
                    row[j] = &pg * &cj - &qg * &ck;
                }
            }
        }
        if k < n && !h[r][k].is_zero() {
            pivot_col.push(Some(k));
            k += 1;
        } else {
            pivot_col.push(None);
        }
    }
    // Forward substitution on the lower-echelon form.
    let mut w: Vec<BigInt> = vec![BigInt::zero(); n];
    for r in 0..m {
        let mut residual = c[r].clone();
        for j in 0..k {
            if !h[r][j].is_zero() && pivot_col[r] != Some(j) {
                residual -= &h[r][j] * &w[j];
            }
        }
        match pivot_col[r] {
            Some(j) => {
                let (q, rem) = residual.div_rem(&h[r][j]);
                if !rem.is_zero() {
                    return None;
                }
                w[j] = q;
            }
            None if !residual.is_zero() => return None,
            None => {}
        }
    }
    Some(h[m..].iter().map(|u| u.iter().zip(&w).map(|(x, y)| x * y).sum()).collect())
}

/// Minimises `sum z` subject to `A z = c`, `lo <= z <= hi`. `None` if infeasible.
fn lp_min_sum(a: &[Vec<BigInt>], c: &[BigInt], lo: &[BigInt], hi: &[Option<BigInt>]) -> Option<Vec<BigRational>> {
    let n = lo.len();
    let m = a.len();
    for (l, h) in lo.iter().zip(hi) {
        if matches!(h, Some(h) if h < l) {
            return None;
        }
    }
    // Substitute z = lo + u, u >= 0; upper bounds become rows u_i + s_i = hi_i - lo_i.
    let bounded: Vec<usize> = (0..n).filter(|&i| hi[i].is_some()).collect();
    let cols = n + bounded.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(m + bounded.len());
    let mut rhs: Vec<BigRational> = Vec::with_capacity(m + bounded.len());
    for r in 0..m {
        let mut row: Vec<BigRational> = a[r].iter().map(|v| BigRational::from_integer(v.clone())).collect();
        row.resize(cols, BigRational::zero());
        let shift: BigInt = a[r].iter().zip(lo).map(|(x, l)| x * l).sum();
        rows.push(row);
        rhs.push(BigRational::from_integer(&c[r] - shift));
    }
    for (k, &i) in bounded.iter().enumerate() {
        let mut row = vec![BigRational::zero(); cols];
        row[i] = BigRational::one();
        row[n + k] = BigRational::one();
        rows.push(row);
        rhs.push(BigRational::from_integer(hi[i].clone().expect("bounded") - &lo[i]));
    }
    let mut cost = vec![BigRational::zero(); cols];
    for v in cost.iter_mut().take(n) {
        *v = BigRational::one();
    }
    let u = Simplex::new(rows, rhs).solve(&cost)?;
    Some((0..n).map(|i| BigRational::from_integer(lo[i].clone()) + &u[i]).collect())
}

/// Dense two-phase simplex for `min c x`, `A x = b`, `x >= 0`, Bland's rule.
struct Simplex {
    t: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    cols: usize,
}

impl Simplex {
    fn new(mut rows: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Self {
        let m = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        for (row, b) in rows.iter_mut().zip(rhs.iter_mut()) {
            if b.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                *b = -b.clone();
            }
        }
        // Artificial columns cols..cols+m.
        for (r, row) in rows.iter_mut().enumerate() {
            row.extend((0..m).map(|k| if k == r { BigRational::one() } else { BigRational::zero() }));
        }
        Simplex { t: rows, rhs, basis: (cols..cols + m).collect(), cols }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let prow = self.t[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (v, pv) in self.t[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations minimising `cost` over columns `< allowed`.
    /// Returns false if unbounded.
    fn optimise(&mut self, cost: &[BigRational], allowed: usize) -> bool {
        loop {
            // Reduced costs: c_j - c_B B^-1 A_j; the tableau already holds B^-1 A.
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &bj) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() && !cost[bj].is_zero() {
                        rc -= &cost[bj] * &self.t[i][j];
                    }
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.t.len() {
                if self.t[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.t[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn solve(mut self, cost: &[BigRational]) -> Option<Vec<BigRational>> {
        let m = self.t.len();
        let total = self.cols + m;
        let phase1: Vec<BigRational> =
            (0..total).map(|j| if j >= self.cols { BigRational::one() } else { BigRational::zero() }).collect();
        self.optimise(&phase1, total);
        let infeasibility: BigRational = (0..m).filter(|&i| self.basis[i] >= self.cols).map(|i| self.rhs[i].clone()).sum();
        if infeasibility.is_positive() {
            return None;
        }
        // Drive zero-level artificials out of the basis where possible.
        let mut redundant = Vec::new();
        for i in 0..m {
            if self.basis[i] >= self.cols {
                match (0..self.cols).find(|&j| !self.t[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => redundant.push(i),
                }
            }
        }
        for &i in redundant.iter().rev() {
            self.t.remove(i);
            self.rhs.remove(i);
            self.basis.remove(i);
        }
        let mut full_cost = cost.to_vec();
        full_cost.resize(total, BigRational::zero());
        if !self.optimise(&full_cost, self.cols) {
            // Costs are nonnegative on nonnegative variables, so this cannot happen.
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < self.cols {
                x[bj] = self.rhs[i].clone();
            }
        }
        Some(x)
    }
}
