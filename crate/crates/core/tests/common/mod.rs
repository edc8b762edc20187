//! Brute-force oracles shared by the integration tests. They deliberately
//! avoid the library's own search and orbit code.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

pub mod checks;

use symvass::{Config, Group, Instance, Transition};

/// All permutations of `0..d` as image arrays.
pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..d {
            let mut q: Vec<usize> = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out
}

pub fn is_even(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Group elements for the flat group kinds.
pub fn group_elements(g: &Group) -> Vec<Vec<usize>> {
    match g {
        Group::Trivial(d) => vec![(0..*d).collect()],
        Group::Symmetric(d) => permutations(*d),
        Group::Alternating(d) => permutations(*d).into_iter().filter(|p| is_even(p)).collect(),
        Group::Cyclic(d) => (0..*d).map(|k| (0..*d).map(|i| (i + k) % d).collect()).collect(),
        Group::Wreath(inner, outer) => {
            let (gi, go) = (group_elements(inner), group_elements(outer));
            let (a, h) = (inner.degree(), outer.degree());
            let mut out = Vec::new();
            for delta in &go {
                let mut tuples: Vec<Vec<&Vec<usize>>> = vec![Vec::new()];
                for _ in 0..h {
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| gi.iter().map(move |s| {
                            let mut t = t.clone();
                            t.push(s);
                            t
                        }))
                        .collect();
                }
                for sigmas in tuples {
                    let mut img = vec![0; a * h];
                    for j in 0..h {
                        for i in 0..a {
                            img[a * j + i] = a * delta[j] + sigmas[j][i];
                        }
                    }
                    out.push(img);
                }
            }
            out
        }
    }
}

pub fn act(p: &[usize], v: &[i64]) -> Vec<i64> {
    let mut out = vec![0; v.len()];
    for (i, &x) in v.iter().enumerate() {
        out[p[i]] = x;
    }
    out
}

/// The full transition set, computed independently of the library.
pub fn expand(inst: &Instance) -> Vec<Transition> {
    let elems = group_elements(inst.vass.group());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in inst.vass.reps() {
        for p in &elems {
            let u = Transition::new(t.src, act(p, &t.effect), t.dst);
            if seen.insert(u.clone()) {
                out.push(u);
            }
        }
    }
    out
}

pub enum Bounded {
    Found,
    /// Exhausted without ever leaving the bound.
    Closed,
    /// Some configuration above the bound was skipped.
    Cut,
}

/// Breadth-first search over configurations of norm at most `bound`.
pub fn bounded_search(ts: &[Transition], s: &Config, t: &Config, bound: i64, max_configs: usize) -> Option<Bounded> {
    if s == t {
        return Some(Bounded::Found);
    }
    let mut seen = HashSet::from([s.clone()]);
    let mut queue = VecDeque::from([s.clone()]);
    let mut cut = false;
    while let Some(c) = queue.pop_front() {
        for tr in ts.iter().filter(|tr| tr.src == c.state) {
            let v: Vec<i64> = c.vec.iter().zip(&tr.effect).map(|(a, b)| a + b).collect();
            if v.iter().any(|&x| x < 0) {
                continue;
            }
            if v.iter().any(|&x| x > bound) {
                cut = true;
                continue;
            }
            let n = Config::new(tr.dst, v);
            if n == *t {
                return Some(Bounded::Found);
            }
            if seen.insert(n.clone()) {
                if seen.len() > max_configs {
                    return None;
                }
                queue.push_back(n);
            }
        }
    }
    Some(if cut { Bounded::Cut } else { Bounded::Closed })
}

/// Reachability by bounded search with a doubling bound; `None` if no round
/// closes within `max_bound`.
pub fn oracle(inst: &Instance, max_bound: i64, max_configs: usize) -> Option<bool> {
    let ts = expand(inst);
    let s_norm = inst
        .source
        .vec
        .iter()
        .chain(&inst.target.vec)
        .chain(ts.iter().flat_map(|t| t.effect.iter()))
        .map(|x| x.abs())
        .max()
        .unwrap_or(0);
    let mut bound = s_norm + 1;
    while bound <= max_bound {
        match bounded_search(&ts, &inst.source, &inst.target, bound, max_configs)? {
            Bounded::Found => return Some(true),
            Bounded::Closed => return Some(false),
            Bounded::Cut => bound *= 2,
        }
    }
    None
}

/// Whether an integer run of at most `max_len` steps leads from `s` to `t`.
/// Every Parikh vector of total at most `max_len` that some ordering realizes
/// shows up as one of these runs.
pub fn short_zrun(ts: &[Transition], s: &Config, t: &Config, max_len: usize) -> bool {
    let mut layer = HashSet::from([s.clone()]);
    let mut seen = layer.clone();
    for _ in 0..=max_len {
        if layer.contains(t) {
            return true;
        }
        let mut next = HashSet::new();
        for c in &layer {
            for tr in ts.iter().filter(|tr| tr.src == c.state) {
                let v: Vec<i64> = c.vec.iter().zip(&tr.effect).map(|(a, b)| a + b).collect();
                let n = Config::new(tr.dst, v);
                if seen.insert(n.clone()) {
                    next.insert(n);
                }
            }
        }
        layer = next;
    }
    false
}

/// Membership of `b` in the integer cone of `xs` by enumerating every
/// coefficient vector with entries at most `cap`.
pub fn intcone_brute(xs: &[Vec<i64>], b: &[i64], cap: u64) -> bool {
    fn go(xs: &[Vec<i64>], rest: &[i64], cap: u64) -> bool {
        let Some((x, more)) = xs.split_first() else {
            return rest.iter().all(|&r| r == 0);
        };
        let mut r = rest.to_vec();
        for _ in 0..=cap {
            if go(more, &r, cap) {
                return true;
            }
            for (ri, xi) in r.iter_mut().zip(x) {
                *ri -= xi;
            }
        }
        false
    }
    go(xs, b, cap)
}

/// Smallest `k` with `2^k >= (4 d norm)^(2d)`.
pub fn support_bound(d: usize, norm: i64) -> usize {
    if d == 0 || norm <= 0 {
        return 0;
    }
    let base = 4 * d as u128 * norm as u128;
    let mut y = 1u128;
    for _ in 0..2 * d {
        y *= base;
    }
    let mut k = 0;
    while (1u128 << k) < y {
        k += 1;
    }
    k
}
