//! Pumps, lifting integer runs to runs, and run surgery that makes every
//! counter large for symmetric and alternating groups.

use std::collections::{HashSet, VecDeque};

use crate::error::{add, add_vec, mul, Error, Result};
use crate::limits::Budget;
use crate::perm::{Group, Permutation};
use crate::vass::{Config, Instance, Run, RunMode, Transition, TransitionSet, Vass};

/// A forward pump at the source and a backward pump at the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpPair {
    /// `q(w) -> q(w + e)` with `e >= 1`, where `q(w)` is the source.
    pub forward: Run,
    /// `q'(w' + e') -> q'(w')` with `e' >= 1`, where `q'(w')` is the target.
    pub backward: Run,
}

/// Breadth-first search for a run of at most `max_len` steps from `start`
/// back to its state with every counter strictly larger.
pub fn find_forward_pump(start: &Config, ts: &TransitionSet, max_len: usize, budget: &Budget) -> Result<Option<Run>> {
    let limit = budget.limits.max_configs;
    let mut nodes: Vec<(Config, Option<(usize, Transition)>)> = vec![(start.clone(), None)];
    let mut seen: HashSet<Config> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((id, depth)) = queue.pop_front() {
        if depth == max_len {
            continue;
        }
        if id % 4096 == 0 {
            budget.check_time("pump search")?;
        }
        let cur = nodes[id].0.clone();
        for t in ts.from_state(cur.state) {
            let v = add_vec(&cur.vec, &t.effect)?;
            if v.iter().any(|&x| x < 0) {
                continue;
            }
            let c = Config::new(t.dst, v);
            if !seen.insert(c.clone()) {
                continue;
            }
            let pumped = c.state == start.state && c.vec.iter().zip(&start.vec).all(|(a, b)| a > b);
            nodes.push((c, Some((id, t.clone()))));
            if pumped {
                return Ok(Some(tree_run(start, &nodes, nodes.len() - 1)));
            }
            if nodes.len() > limit {
                return Err(Error::ResourceLimit(format!("pump search explored more than {limit} configurations")));
            }
            queue.push_back((nodes.len() - 1, depth + 1));
        }
    }
    Ok(None)
}

fn tree_run(start: &Config, nodes: &[(Config, Option<(usize, Transition)>)], mut id: usize) -> Run {
    let mut steps = Vec::new();
    while let Some((parent, t)) = &nodes[id].1 {
        steps.push(t.clone());
        id = *parent;
    }
    steps.reverse();
    Run::new(start.clone(), steps, RunMode::Nonneg)
}

/// A backward pump at `end`: a forward pump of the reversed system, read backwards.
pub fn find_backward_pump(end: &Config, ts: &TransitionSet, max_len: usize, budget: &Budget) -> Result<Option<Run>> {
    let rev = TransitionSet::from_transitions(ts.num_states(), ts.dim(), ts.all().iter().map(Transition::reversed));
    match find_forward_pump(end, &rev, max_len, budget)? {
        Some(run) => Ok(Some(run.reversed()?)),
        None => Ok(None),
    }
}

/// Smallest `n >= 1` with `base + n * e` above `max(base)` in every coordinate.
fn repetitions_to_dominate(base: &[i64], e: &[i64]) -> Result<i64> {
    let top = base.iter().copied().max().unwrap_or(0);
    let mut n = 1;
    for (&b, &x) in base.iter().zip(e) {
        let need = top - b + 1;
        n = n.max((need + x - 1) / x);
    }
    Ok(n)
}

fn step_limit(len: i64, budget: &Budget) -> Result<usize> {
    let max = budget.limits.max_configs;
    match usize::try_from(len) {
        Ok(n) if n <= max => Ok(n),
        _ => Err(Error::ResourceLimit(format!("lifted run would exceed {max} steps"))),
    }
}

/// The concatenation `sigma_1(run); ...; sigma_m(run)` over the listed
/// permutations, and its effect, which must be constant.
fn symmetrize(run: &Run, elements: &[Permutation], e: &[i64], budget: &Budget) -> Result<(Vec<Transition>, i64)> {
    let d = e.len();
    let mut delta = vec![0; d];
    for p in elements {
        delta = add_vec(&delta, &p.apply(e)?)?;
    }
    let c = delta.first().copied().unwrap_or(0);
    if delta.iter().any(|&x| x != c) {
        return Err(Error::Internal(format!("symmetrized pump effect {delta:?} is not constant")));
    }
    step_limit(mul(run.len() as i64, elements.len() as i64)?, budget)?;
    let mut steps = Vec::new();
    for p in elements {
        steps.extend(run.steps.iter().map(|t| t.permuted(p)));
    }
    Ok((steps, c))
}

fn repeated(steps: &[Transition], n: i64, budget: &Budget) -> Result<Vec<Transition>> {
    let total = step_limit(mul(steps.len() as i64, n)?, budget)?;
    let mut out = Vec::with_capacity(total);
    for _ in 0..n {
        out.extend_from_slice(steps);
    }
    Ok(out)
}

/// Turns an integer run `gamma` from source to target into a run, using the
/// pumps to lift it above zero. The group must be transitive.
pub fn lift_zrun(inst: &Instance, ts: &TransitionSet, pumps: &PumpPair, gamma: &Run, budget: &Budget) -> Result<Run> {
    let group = inst.vass.group();
    if !group.is_transitive() {
        return Err(Error::Precondition(format!("group {group} is not transitive")));
    }
    let (s, t) = (&inst.source, &inst.target);
    if gamma.start != *s {
        return Err(Error::Precondition("integer run does not start at the source".into()));
    }
    if gamma.clone().with_mode(RunMode::Integer).replay(|x| ts.contains(x))? != *t {
        return Err(Error::Precondition("integer run does not end at the target".into()));
    }

    // Least m: every prefix of gamma shifted up by m * c stays nonnegative.
    let mut deficit = 0i64;
    for c in gamma.configs()? {
        deficit = deficit.max(-c.vec.iter().copied().min().unwrap_or(0));
    }
    if deficit == 0 {
        return Ok(gamma.clone().with_mode(RunMode::Nonneg));
    }

    let (fwd, bwd) = (&pumps.forward, &pumps.backward);
    if fwd.start != *s || ts.validate(fwd)?.state != s.state {
        return Err(Error::Precondition("forward pump must be a cycle at the source".into()));
    }
    let e = fwd.effect()?;
    let bwd_end = ts.validate(bwd)?;
    let e_back: Vec<i64> = bwd.start.vec.iter().zip(&t.vec).map(|(a, b)| a - b).collect();
    if bwd_end != *t || bwd.start.state != t.state {
        return Err(Error::Precondition("backward pump must be a cycle ending at the target".into()));
    }
    if e.iter().chain(&e_back).any(|&x| x < 1) {
        return Err(Error::Precondition("pump effects must be at least 1 in every coordinate".into()));
    }

    let elements = group.elements(budget.limits.max_orbit)?;
    let n_fwd = repetitions_to_dominate(&s.vec, &e)?;
    let alpha = Run::new(s.clone(), repeated(&fwd.steps, n_fwd, budget)?, RunMode::Nonneg);
    let e_fwd: Vec<i64> = e.iter().map(|&x| mul(x, n_fwd)).collect::<Result<_>>()?;
    let (alpha_sym, n) = symmetrize(&alpha, &elements, &e_fwd, budget)?;

    let n_bwd = repetitions_to_dominate(&t.vec, &e_back)?;
    let e_bwd: Vec<i64> = e_back.iter().map(|&x| mul(x, n_bwd)).collect::<Result<_>>()?;
    let alpha_back = Run::new(
        Config::new(t.state, add_vec(&t.vec, &e_bwd)?),
        repeated(&bwd.steps, n_bwd, budget)?,
        RunMode::Nonneg,
    );
    // Reverse order of the group elements so that the identity copy comes last.
    let rev_elements: Vec<Permutation> = elements.iter().rev().cloned().collect();
    let (alpha_back_sym, n_prime) = symmetrize(&alpha_back, &rev_elements, &e_bwd, budget)?;

    let beta = repeated(&alpha_sym, n_prime, budget)?;
    let beta_back = repeated(&alpha_back_sym, n, budget)?;
    let c = mul(n, n_prime)?;
    let m = (deficit + c - 1) / c;

    let total = add(mul(m, add(beta.len() as i64, beta_back.len() as i64)?)?, gamma.len() as i64)?;
    let mut steps = Vec::with_capacity(step_limit(total, budget)?);
    for _ in 0..m {
        steps.extend_from_slice(&beta);
    }
    steps.extend_from_slice(&gamma.steps);
    for _ in 0..m {
        steps.extend_from_slice(&beta_back);
    }
    let run = Run::new(s.clone(), steps, RunMode::Nonneg);
    match ts.validate(&run) {
        Ok(end) if end == *t => Ok(run),
        Ok(end) => Err(Error::Internal(format!("lifted run ends at {end:?}, not at the target"))),
        Err(e) => Err(Error::Internal(format!("lifted run is invalid: {e}"))),
    }
}

/// Smallest `k` such that `ok` holds at every configuration from index `k` on.
fn longest_suffix(configs: &[Config], ok: impl Fn(&Config) -> bool) -> usize {
    let mut k = configs.len();
    while k > 0 && ok(&configs[k - 1]) {
        k -= 1;
    }
    k
}

/// Indices of a minimal set of steps in `from..` on which coordinate `big`
/// grows faster than `small`, jointly by at least `need`. Chosen greedily from
/// the end, then pruned.
fn select_steps(steps: &[Transition], from: usize, big: usize, small: usize, need: i64) -> Result<Vec<usize>> {
    let gain = |k: usize| steps[k].effect[big] - steps[k].effect[small];
    let mut chosen = Vec::new();
    let mut total = 0i64;
    for k in (from..steps.len()).rev() {
        if total >= need {
            break;
        }
        if gain(k) > 0 {
            chosen.push(k);
            total += gain(k);
        }
    }
    if total < need {
        return Err(Error::Internal(format!(
            "suffix gains only {total} on coordinate {} over {}, need {need}",
            big + 1,
            small + 1
        )));
    }
    let mut keep = Vec::with_capacity(chosen.len());
    for k in chosen {
        if total - gain(k) >= need {
            total -= gain(k);
        } else {
            keep.push(k);
        }
    }
    keep.sort_unstable();
    Ok(keep)
}

fn permute_steps(run: &mut Run, at: &[usize], p: &Permutation) {
    for &k in at {
        run.steps[k] = run.steps[k].permuted(p);
    }
}

fn argmax(v: &[i64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn check_repaired(ts: &TransitionSet, run: &Run, floor: i64) -> Result<Run> {
    let end = ts.validate(run).map_err(|e| Error::Internal(format!("repaired run is invalid: {e}")))?;
    if end.vec.iter().any(|&x| x < floor) {
        return Err(Error::Internal(format!("repaired run ends at {:?}, below {floor}", end.vec)));
    }
    Ok(run.clone())
}

/// `S = max(N, |start|)` for a run of `vass`.
fn start_norm(vass: &Vass, run: &Run) -> i64 {
    vass.norm().max(run.start.norm())
}

/// Rewrites a run of a symmetric-group VASS whose final vector has a
/// coordinate above `(3S + 2R) * d` into a run from the same start whose
/// final vector is at least `S + R + 1` everywhere.
pub fn repair_symmetric(vass: &Vass, ts: &TransitionSet, pi: &Run, r: i64) -> Result<Run> {
    let d = match vass.group() {
        Group::Symmetric(d) => *d,
        g => return Err(Error::UnsupportedGroup(format!("symmetric repair needs a symmetric group, got {g}"))),
    };
    let end = ts.validate(pi)?;
    let s = start_norm(vass, pi);
    let floor = add(add(s, r)?, 1)?;
    if end.vec.iter().all(|&x| x >= floor) {
        return Ok(pi.clone());
    }
    let b = add(mul(3, s)?, mul(2, r)?)?;
    let big = argmax(&end.vec);
    if end.vec[big] <= mul(b, d as i64)? {
        return Err(Error::Precondition(format!(
            "norm too small to repair: {} <= {}",
            end.vec[big],
            mul(b, d as i64)?
        )));
    }
    let mut run = pi.clone();
    let others = (0..d).filter(|&i| i != big);
    for (rank, i) in others.enumerate().map(|(k, i)| (k as i64 + 1, i)) {
        let configs = run.configs()?;
        let last = configs.last().expect("runs have a start");
        if last.vec[i] >= floor {
            continue;
        }
        let threshold = mul(b, d as i64 - rank)?;
        let from = longest_suffix(&configs, |c| c.vec[big] >= threshold);
        let at = select_steps(&run.steps, from, big, i, floor)?;
        permute_steps(&mut run, &at, &Permutation::transposition(d, i, big));
    }
    check_repaired(ts, &run, floor)
}

/// Rewrites a run of an alternating-group VASS (degree at least 3) whose
/// final vector has a coordinate above `3d * B + N`, `B = 2(N+1)(S+R)`, into a
/// run from the same start whose final vector is at least `S + R + 1` everywhere.
pub fn repair_alternating(vass: &Vass, ts: &TransitionSet, pi: &Run, r: i64) -> Result<Run> {
    let d = match vass.group() {
        Group::Alternating(d) if *d >= 3 => *d,
        g => {
            return Err(Error::UnsupportedGroup(format!(
                "alternating repair needs an alternating group of degree at least 3, got {g}"
            )))
        }
    };
    let end = ts.validate(pi)?;
    let n = vass.norm();
    let s = start_norm(vass, pi);
    let floor = add(add(s, r)?, 1)?;
    if end.vec.iter().all(|&x| x >= floor) {
        return Ok(pi.clone());
    }
    let b = mul(mul(2, add(n, 1)?)?, add(s, r)?)?;
    let bd = mul(b, d as i64)?;
    let big = argmax(&end.vec);
    let needed = add(mul(bd, 3)?, n)?;
    if end.vec[big] <= needed {
        return Err(Error::Precondition(format!("norm too small to repair: {} <= {needed}", end.vec[big])));
    }

    // First make a second coordinate exceed B * d.
    let mut run = pi.clone();
    let second = match (0..d).filter(|&i| i != big).find(|&i| end.vec[i] > bd) {
        Some(j) => j,
        None => {
            let configs = run.configs()?;
            let two_bd = mul(bd, 2)?;
            let top = longest_suffix(&configs, |c| c.vec[big] > two_bd);
            let mut k = top;
            for (idx, c) in configs.iter().enumerate().skip(top) {
                if c.vec[big] < configs[k].vec[big] {
                    k = idx;
                }
            }
            let v = &configs[k].vec;
            let mut rest: Vec<usize> = (0..d).filter(|&i| i != big).collect();
            rest.sort_by_key(|&i| (v[i], i));
            let (i, j) = (rest[0], *rest.last().expect("d >= 3"));
            if v[j] > bd {
                run = run.prefix(k);
                j
            } else {
                let at: Vec<usize> = (k..run.len()).collect();
                permute_steps(&mut run, &at, &Permutation::three_cycle(d, i, j, big));
                i
            }
        }
    };

    // Then raise the remaining coordinates one at a time.
    let others = (0..d).filter(|&i| i != big && i != second);
    for (rank, i) in others.enumerate().map(|(k, i)| (k as i64 + 1, i)) {
        let configs = run.configs()?;
        let last = configs.last().expect("runs have a start");
        if last.vec[i] >= floor {
            continue;
        }
        let threshold = mul(b, d as i64 - rank)?;
        let from = longest_suffix(&configs, |c| c.vec[big] > threshold && c.vec[second] > threshold);
        let u = &configs[from].vec;
        let (low, high) = if u[big] <= u[second] { (big, second) } else { (second, big) };
        let at = select_steps(&run.steps, from, low, i, floor)?;
        permute_steps(&mut run, &at, &Permutation::three_cycle(d, i, high, low));
    }
    check_repaired(ts, &run, floor)
}

/// The polynomial bounding how large one coordinate must get before every
/// coordinate can be made large.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairnessPolicy {
    /// `P(x) = 3d`.
    Symmetric { d: usize },
    /// `P(x) = 3d * 2(x + 1) + 1`, `d >= 3`.
    Alternating { d: usize },
}

impl FairnessPolicy {
    pub fn for_group(g: &Group) -> Option<Self> {
        match g {
            Group::Symmetric(d) if *d >= 1 => Some(FairnessPolicy::Symmetric { d: *d }),
            Group::Alternating(d) if *d >= 3 => Some(FairnessPolicy::Alternating { d: *d }),
            _ => None,
        }
    }

    pub fn eval(&self, x: i64) -> Result<i64> {
        match *self {
            FairnessPolicy::Symmetric { d } => mul(3, d as i64),
            FairnessPolicy::Alternating { d } => add(mul(mul(3, d as i64)?, mul(2, add(x, 1)?)?)?, 1),
        }
    }

    /// The matching run surgery.
    pub fn repair(&self, vass: &Vass, ts: &TransitionSet, pi: &Run, r: i64) -> Result<Run> {
        match self {
            FairnessPolicy::Symmetric { .. } => repair_symmetric(vass, ts, pi, r),
            FairnessPolicy::Alternating { .. } => repair_alternating(vass, ts, pi, r),
        }
    }
}
