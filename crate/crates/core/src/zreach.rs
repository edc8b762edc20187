//! Integer reachability: runs whose intermediate vectors may go negative.
//!
//! A Z-run from `q(v)` to `p(w)` exists iff some multiset of transitions
//! (a Parikh image) has total effect `w - v`, satisfies flow conservation for a
//! walk from `q` to `p`, and has a support that is connected and contains `q`.
//! The classical argument splits such a multiset into a simple path, covering
//! cycles, and an integer-cone combination of cycle effects; here the same
//! condition is posed directly as one integer system per connected edge set.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ilp::{self, Feasibility, IntSystem};
use crate::vass::{Config, Instance, Run, RunMode, StateGraph, StateId, Transition, TransitionSet};

/// Occurrence counts of transitions; zero counts are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParikhImage {
    pub counts: Vec<(Transition, u64)>,
}

impl ParikhImage {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|(_, c)| c).sum()
    }

    pub fn effect(&self, dim: usize) -> Result<Vec<i64>> {
        let mut acc = vec![0i64; dim];
        for (t, c) in &self.counts {
            let c = i64::try_from(*c).map_err(|_| Error::overflow())?;
            acc = crate::error::add_scaled(&acc, c, &t.effect)?;
        }
        Ok(acc)
    }

    /// Orders the multiset into a walk from `start.state` to `end_state`
    /// (Hierholzer). Failure means the image violates the Euler conditions.
    pub fn materialize(&self, start: &Config, end_state: StateId) -> Result<Run> {
        let total = usize::try_from(self.total()).map_err(|_| Error::overflow())?;
        let num_states = self
            .counts
            .iter()
            .map(|(t, _)| t.src.max(t.dst) + 1)
            .max()
            .unwrap_or(0)
            .max(start.state + 1)
            .max(end_state + 1);
        let mut out: Vec<Vec<(usize, u64)>> = vec![Vec::new(); num_states];
        for (i, (t, c)) in self.counts.iter().enumerate() {
            out[t.src].push((i, *c));
        }
        let mut cursor = vec![0usize; num_states];
        let mut stack: Vec<(StateId, Option<usize>)> = vec![(start.state, None)];
        let mut trail = Vec::with_capacity(total);
        while let Some(&(v, via)) = stack.last() {
            let mut next = None;
            while cursor[v] < out[v].len() {
                let slot = &mut out[v][cursor[v]];
                if slot.1 > 0 {
                    slot.1 -= 1;
                    next = Some(slot.0);
                    break;
                }
                cursor[v] += 1;
            }
            match next {
                Some(i) => stack.push((self.counts[i].0.dst, Some(i))),
                None => {
                    stack.pop();
                    if let Some(i) = via {
                        trail.push(i);
                    }
                }
            }
        }
        trail.reverse();
        let steps: Vec<Transition> = trail.iter().map(|&i| self.counts[i].0.clone()).collect();
        let run = Run::new(start.clone(), steps, RunMode::Integer);
        let chained = run.replay(|_| true).ok().map(|c| c.state);
        if trail.len() != total || chained != Some(end_state) {
            return Err(Error::Internal(format!(
                "feasible Parikh image with {total} steps could not be ordered into a walk"
            )));
        }
        Ok(run)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZReach {
    Yes(ParikhImage),
    No,
}

/// Knobs bounding the work of [`zreachable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZLimits {
    /// Branch-and-bound nodes per integer system.
    pub node_limit: usize,
    /// Edge subsets examined before giving up.
    pub subset_limit: usize,
}

impl Default for ZLimits {
    fn default() -> Self {
        ZLimits { node_limit: 20_000, subset_limit: 1 << 16 }
    }
}

/// Decides whether an integer run from the source to the target exists.
pub fn zreachable(inst: &Instance, ts: &TransitionSet, limits: ZLimits) -> Result<ZReach> {
    let (q, p) = (inst.source.state, inst.target.state);
    if inst.source == inst.target {
        return Ok(ZReach::Yes(ParikhImage { counts: Vec::new() }));
    }
    let d = inst.dim();
    let goal: Vec<i64> = inst
        .target
        .vec
        .iter()
        .zip(&inst.source.vec)
        .map(|(w, v)| w.checked_sub(*v).ok_or_else(Error::overflow))
        .collect::<Result<_>>()?;

    // Only transitions on some q -> p walk can occur.
    let graph = StateGraph::from_transitions(ts.num_states(), ts.all());
    let fwd = graph.reachable_from(q);
    let bwd = StateGraph::from_transitions(ts.num_states(), &ts.all().iter().map(Transition::reversed).collect::<Vec<_>>())
        .reachable_from(p);
    if !fwd[p] {
        return Ok(ZReach::No);
    }
    let usable: Vec<&Transition> =
        ts.all().iter().filter(|t| fwd[t.src] && bwd[t.src] && fwd[t.dst] && bwd[t.dst]).collect();

    // Without the connectivity requirement: infeasible means no Z-run at all.
    let root = build_system(&usable, &[], ts.num_states(), q, p, &goal, d);
    let x = match ilp::solve(&root, limits.node_limit)? {
        Feasibility::Infeasible => return Ok(ZReach::No),
        Feasibility::Feasible(x) => x,
    };
    let support: Vec<(&Transition, u64)> =
        usable.iter().zip(&x).filter(|(_, &c)| c > 0).map(|(t, &c)| (*t, c as u64)).collect();
    if support_connected(&support.iter().map(|(t, _)| *t).collect::<Vec<_>>(), q, p) {
        return Ok(ZReach::Yes(image(support)));
    }

    // Edge subsets by increasing size, then lexicographically.
    let edges: Vec<(StateId, StateId)> = usable.iter().map(|t| (t.src, t.dst)).collect::<BTreeSet<_>>().into_iter().collect();
    let mut examined = 0usize;
    for size in 1..=edges.len() {
        for subset in Combinations::new(edges.len(), size) {
            let chosen: Vec<(StateId, StateId)> = subset.iter().map(|&i| edges[i]).collect();
            if !edges_connected(&chosen, q, p) {
                continue;
            }
            examined += 1;
            if examined > limits.subset_limit {
                return Err(Error::ResourceLimit(format!(
                    "integer reachability examined more than {} edge subsets",
                    limits.subset_limit
                )));
            }
            let vars: Vec<&Transition> = usable.iter().copied().filter(|t| chosen.contains(&(t.src, t.dst))).collect();
            let sys = build_system(&vars, &chosen, ts.num_states(), q, p, &goal, d);
            if let Feasibility::Feasible(x) = ilp::solve(&sys, limits.node_limit)? {
                let support = vars.iter().zip(&x).filter(|(_, &c)| c > 0).map(|(t, &c)| (*t, c as u64)).collect();
                return Ok(ZReach::Yes(image(support)));
            }
        }
    }
    Ok(ZReach::No)
}

fn image(support: Vec<(&Transition, u64)>) -> ParikhImage {
    let mut counts: Vec<(Transition, u64)> = support.into_iter().map(|(t, c)| (t.clone(), c)).collect();
    counts.sort();
    ParikhImage { counts }
}

/// Flow conservation (+1 out of `q`, +1 into `p`), total effect `goal`, and
/// for each edge in `cover` at least one use (via a slack variable).
fn build_system(
    vars: &[&Transition],
    cover: &[(StateId, StateId)],
    num_states: usize,
    q: StateId,
    p: StateId,
    goal: &[i64],
    d: usize,
) -> IntSystem {
    let n = vars.len() + cover.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for r in 0..num_states {
        let mut row = vec![0i64; n];
        for (j, t) in vars.iter().enumerate() {
            if t.dst == r {
                row[j] += 1;
            }
            if t.src == r {
                row[j] -= 1;
            }
        }
        a.push(row);
        b.push(i64::from(r == p) - i64::from(r == q));
    }
    for (i, &g) in goal.iter().enumerate().take(d) {
        let mut row = vec![0i64; n];
        for (j, t) in vars.iter().enumerate() {
            row[j] = t.effect[i];
        }
        a.push(row);
        b.push(g);
    }
    for (k, e) in cover.iter().enumerate() {
        let mut row = vec![0i64; n];
        for (j, t) in vars.iter().enumerate() {
            if (t.src, t.dst) == *e {
                row[j] = 1;
            }
        }
        row[vars.len() + k] = -1;
        a.push(row);
        b.push(1);
    }
    IntSystem::new(a, b, vec![0; n])
}

fn support_connected(ts: &[&Transition], q: StateId, p: StateId) -> bool {
    let edges: Vec<(StateId, StateId)> = ts.iter().map(|t| (t.src, t.dst)).collect();
    edges_connected(&edges, q, p)
}

/// Whether the edges form one weakly connected piece touching `q` and `p`.
fn edges_connected(edges: &[(StateId, StateId)], q: StateId, p: StateId) -> bool {
    if edges.is_empty() {
        return false;
    }
    let mut nodes: Vec<StateId> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.binary_search(&q).is_err() || nodes.binary_search(&p).is_err() {
        return false;
    }
    let mut seen = vec![q];
    let mut frontier = vec![q];
    while let Some(v) = frontier.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen.contains(&y) {
                    seen.push(y);
                    frontier.push(y);
                }
            }
        }
    }
    seen.len() == nodes.len()
}

/// `k`-element subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, cur: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().expect("checked above");
        let k = cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// A nonnegative integer combination `sum lambda_i * x_i` with every `lambda_i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeWitness {
    pub basis: Vec<(Vec<i64>, u64)>,
}

impl ConeWitness {
    pub fn value(&self, dim: usize) -> Result<Vec<i64>> {
        let mut acc = vec![0i64; dim];
        for (x, l) in &self.basis {
            let l = i64::try_from(*l).map_err(|_| Error::overflow())?;
            acc = crate::error::add_scaled(&acc, l, x)?;
        }
        Ok(acc)
    }
}

/// `ceil(2d * log2(4d * norm))`: the support size that always suffices for
/// integer-cone membership in dimension `d` with generators of norm `norm`.
pub fn sparse_support_bound(d: usize, norm: i64) -> usize {
    if d == 0 || norm <= 0 {
        return 0;
    }
    let base = BigInt::from(4 * d as u64) * BigInt::from(norm);
    let y: BigInt = num_traits::pow(base, 2 * d);
    // ceil(log2 y) for y >= 1.
    (y - BigInt::one()).bits() as usize
}

/// Decides `b ∈ intcone(X)` and returns a witness whose support respects
/// [`sparse_support_bound`].
pub fn intcone_member(xs: &[Vec<i64>], b: &[i64], node_limit: usize) -> Result<Option<ConeWitness>> {
    let d = b.len();
    if let Some(bad) = xs.iter().find(|x| x.len() != d) {
        return Err(Error::Dimension { expected: d, got: bad.len() });
    }
    if b.iter().all(|&v| v == 0) {
        return Ok(Some(ConeWitness { basis: Vec::new() }));
    }
    let xs: Vec<Vec<i64>> = xs.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let norm = xs.iter().map(|x| crate::vass::norm(x)).max().unwrap_or(0);
    let bound = sparse_support_bound(d, norm);
    let system = |cols: &[usize], lower: i64| {
        let a = (0..d).map(|i| cols.iter().map(|&j| xs[j][i]).collect()).collect();
        IntSystem::new(a, b.to_vec(), vec![lower; cols.len()])
    };
    let all: Vec<usize> = (0..xs.len()).collect();
    let Feasibility::Feasible(mu) = ilp::solve(&system(&all, 0), node_limit)? else {
        return Ok(None);
    };
    let witness = |cols: &[usize], coeffs: &[i64]| ConeWitness {
        basis: cols
            .iter()
            .zip(coeffs)
            .filter(|(_, &c)| c > 0)
            .map(|(&j, &c)| (xs[j].clone(), c as u64))
            .collect(),
    };
    let full = witness(&all, &mu);
    if full.basis.len() <= bound {
        return Ok(Some(full));
    }
    for size in 1..=bound.min(xs.len()) {
        for cols in Combinations::new(xs.len(), size) {
            if let Feasibility::Feasible(lambda) = ilp::solve(&system(&cols, 1), node_limit)? {
                return Ok(Some(witness(&cols, &lambda)));
            }
        }
    }
    Err(Error::Internal(format!("no integer-cone witness with at most {bound} generators")))
}
