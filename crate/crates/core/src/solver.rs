//! Top-level reachability decision.
//!
//! For symmetric and alternating groups the instance is split into sequential
//! decompositions. Bounded end components are explored exhaustively and
//! peeled off; once both end components are unbounded the instance is
//! pumpable, and reachability coincides with integer reachability. Other
//! groups fall back to bounded search with a doubling bound.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{add, mul, Error, Result};
use crate::explore::{component_bounded, escalating_oracle, Boundedness};
use crate::fairness::{find_forward_pump, lift_zrun, FairnessPolicy, PumpPair};
use crate::limits::{Budget, Limits};
use crate::vass::{
    orbit_of_transition, sequential_decompositions, Config, Instance, Run, RunMode, SequentialVass, StateId,
    Transition, TransitionSet, Vass,
};
use crate::zreach::{zreachable, ZLimits, ZReach};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Reachable(Run),
    Unreachable,
    ResourceLimit(String),
}

/// Which procedure produced the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Source equals target.
    Trivial,
    /// Decomposition, bounded peeling, pumping and integer reachability.
    FairGroup,
    /// Bounded search with a doubling bound.
    EscalatingSearch,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Trivial => "trivial",
            Method::FairGroup => "fair-group",
            Method::EscalatingSearch => "escalating-search",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    /// Configurations stored by all searches.
    pub explored: usize,
    /// Sequential decompositions examined.
    pub decompositions: usize,
    /// Integer-reachability queries issued.
    pub zreach_calls: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub method: Method,
    pub stats: Stats,
}

/// Decides whether the target is reachable from the source.
pub fn solve(inst: &Instance, limits: &Limits) -> Result<Verdict> {
    let started = Instant::now();
    let budget = limits.budget();
    let mut stats = Stats::default();
    if inst.source == inst.target {
        stats.elapsed = started.elapsed();
        let run = Run::empty(inst.source.clone(), RunMode::Nonneg);
        return Ok(Verdict { answer: Answer::Reachable(run), method: Method::Trivial, stats });
    }
    let (method, outcome) = match FairnessPolicy::for_group(inst.vass.group()) {
        Some(policy) => {
            let mut fair = Fair::new(inst, policy, &budget);
            let out = fair.run();
            stats = fair.stats;
            (Method::FairGroup, out)
        }
        None => {
            let out = inst.vass.expand(limits.max_orbit).and_then(|ts| escalating_oracle(inst, &ts, &budget));
            let out = out.map(|o| {
                stats.explored = o.explored;
                o.witness
            });
            (Method::EscalatingSearch, out)
        }
    };
    stats.elapsed = started.elapsed();
    let answer = match outcome {
        Ok(Some(run)) => {
            let ts = inst.vass.expand(limits.max_orbit)?;
            match ts.validate(&run) {
                Ok(end) if end == inst.target => Answer::Reachable(run),
                Ok(end) => return Err(Error::Internal(format!("witness ends at {end:?}, not at the target"))),
                Err(e) => return Err(Error::Internal(format!("witness does not validate: {e}"))),
            }
        }
        Ok(None) => Answer::Unreachable,
        Err(Error::ResourceLimit(why)) => Answer::ResourceLimit(why),
        Err(e) => return Err(e),
    };
    Ok(Verdict { answer, method, stats })
}

struct Fair<'a> {
    inst: &'a Instance,
    policy: FairnessPolicy,
    budget: &'a Budget,
    /// `|Q| * N`: enough to connect any two states of a component.
    r: i64,
    stats: Stats,
}

/// A window `lo..hi` of the components of a sequential decomposition.
struct Window<'s> {
    seq: &'s SequentialVass,
    lo: usize,
    hi: usize,
}

impl Window<'_> {
    fn reps(&self) -> Vec<Transition> {
        let mut reps: Vec<Transition> = (self.lo..self.hi).flat_map(|i| self.seq.component_reps(i)).collect();
        reps.extend(self.seq.bridges[self.lo..self.hi - 1].iter().cloned());
        reps
    }

    fn states(&self, i: usize) -> &[StateId] {
        &self.seq.components[i]
    }
}

fn inside(ts: &TransitionSet, states: &[StateId]) -> TransitionSet {
    ts.filtered(|t| states.contains(&t.src) && states.contains(&t.dst))
}

fn reversed_set(ts: &TransitionSet) -> TransitionSet {
    TransitionSet::from_transitions(ts.num_states(), ts.dim(), ts.all().iter().map(Transition::reversed))
}

/// Shortest state path from `from` to `to` using `ts`, as transitions.
fn state_path(ts: &TransitionSet, from: StateId, to: StateId) -> Option<Vec<Transition>> {
    let mut prev: BTreeMap<StateId, Option<&Transition>> = BTreeMap::from([(from, None)]);
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut path = Vec::new();
            let mut cur = to;
            while let Some(Some(t)) = prev.get(&cur) {
                path.push((*t).clone());
                cur = t.src;
            }
            path.reverse();
            return Some(path);
        }
        for t in ts.from_state(q) {
            if let Entry::Vacant(slot) = prev.entry(t.dst) {
                slot.insert(Some(t));
                queue.push_back(t.dst);
            }
        }
    }
    None
}

/// `|Q| * (M + 1)^d`, saturating.
fn config_cutoff(states: usize, m: i64, d: usize) -> u128 {
    let side = (m as u128).saturating_add(1);
    (0..d).fold(states as u128, |acc, _| acc.saturating_mul(side))
}

fn sorted_configs<'g>(configs: impl Iterator<Item = &'g Config>) -> Vec<Config> {
    let mut out: Vec<Config> = configs.cloned().collect();
    out.sort_by(|a, b| a.vec.cmp(&b.vec).then(a.state.cmp(&b.state)));
    out
}

impl<'a> Fair<'a> {
    fn new(inst: &'a Instance, policy: FairnessPolicy, budget: &'a Budget) -> Self {
        let r = (inst.vass.num_states() as i64).saturating_mul(inst.big_n());
        Fair { inst, policy, budget, r, stats: Stats::default() }
    }

    fn run(&mut self) -> Result<Option<Run>> {
        for seq in sequential_decompositions(self.inst) {
            self.stats.decompositions += 1;
            self.budget.check_time("decomposition")?;
            let hi = seq.components.len();
            let window = Window { seq: &seq, lo: 0, hi };
            if let Some(run) = self.decide(&window, &self.inst.source, &self.inst.target)? {
                return Ok(Some(run));
            }
        }
        Ok(None)
    }

    fn orbit_cap(&self) -> usize {
        self.budget.limits.max_orbit
    }

    /// Reachability from `s` to `t` in the window, with `s` in its first
    /// component and `t` in its last.
    fn decide(&mut self, w: &Window<'_>, s: &Config, t: &Config) -> Result<Option<Run>> {
        if s == t {
            return Ok(Some(Run::empty(s.clone(), RunMode::Nonneg)));
        }
        let vass = self.inst.vass.with_reps(w.reps())?;
        let ts = vass.expand(self.orbit_cap())?;
        let inst = Instance::new(vass, s.clone(), t.clone())?;
        let n = inst.big_n();
        let big_s = inst.big_s();
        let m = mul(self.policy.eval(n)?, add(big_s, self.r)?)?;
        let single = w.hi - w.lo == 1;

        let first_ts = inside(&ts, w.states(w.lo));
        let first = component_bounded(s, &first_ts, m, self.budget)?;
        if let Boundedness::BoundedBy { graph, .. } = &first {
            self.stats.explored += graph.len();
            if single {
                let cutoff = config_cutoff(inst.vass.num_states(), m, inst.dim());
                if graph.len() as u128 > cutoff {
                    return Err(Error::Internal(format!("bounded component holds {} > {cutoff} configurations", graph.len())));
                }
                return Ok(graph.run_to(t));
            }
            let bridge = &w.seq.bridges[w.lo];
            let orbit = orbit_of_transition(inst.vass.group(), bridge, self.orbit_cap())?;
            let limit = add(m, n)?;
            let mut tried = std::collections::HashSet::new();
            for c in sorted_configs(graph.configs()).into_iter().filter(|c| c.state == bridge.src) {
                for u in &orbit {
                    let vec = match crate::error::add_vec(&c.vec, &u.effect) {
                        Ok(v) if v.iter().all(|&x| x >= 0) => v,
                        _ => continue,
                    };
                    let next = Config::new(u.dst, vec);
                    if next.norm() > limit {
                        return Err(Error::Internal(format!("new source norm {} exceeds {limit}", next.norm())));
                    }
                    if !tried.insert(next.clone()) {
                        continue;
                    }
                    let rest = Window { seq: w.seq, lo: w.lo + 1, hi: w.hi };
                    if let Some(tail) = self.decide(&rest, &next, t)? {
                        let mut steps = graph.run_to(&c).expect("listed config").steps;
                        steps.push(u.clone());
                        steps.extend(tail.steps);
                        return Ok(Some(Run::new(s.clone(), steps, RunMode::Nonneg)));
                    }
                }
            }
            return Ok(None);
        }
        let Boundedness::Witness(first_witness) = first else { unreachable!() };

        let last_states = w.states(w.hi - 1);
        let last_rev = reversed_set(&inside(&ts, last_states));
        self.check_reverse_orbits(&inst.vass, &last_rev)?;
        let last = component_bounded(t, &last_rev, m, self.budget)?;
        if let Boundedness::BoundedBy { graph, .. } = &last {
            self.stats.explored += graph.len();
            if single {
                return match graph.run_to(s) {
                    Some(run) => Ok(Some(run.reversed()?.with_mode(RunMode::Nonneg))),
                    None => Ok(None),
                };
            }
            let bridge = &w.seq.bridges[w.hi - 2];
            let orbit = orbit_of_transition(inst.vass.group(), bridge, self.orbit_cap())?;
            let limit = add(m, n)?;
            let mut tried = std::collections::HashSet::new();
            for c in sorted_configs(graph.configs()).into_iter().filter(|c| c.state == bridge.dst) {
                for u in &orbit {
                    let vec: Vec<i64> = match c.vec.iter().zip(&u.effect).map(|(a, b)| a.checked_sub(*b)).collect() {
                        Some(v) => v,
                        None => return Err(Error::overflow()),
                    };
                    if vec.iter().any(|&x| x < 0) {
                        continue;
                    }
                    let prev = Config::new(u.src, vec);
                    if prev.norm() > limit {
                        return Err(Error::Internal(format!("new target norm {} exceeds {limit}", prev.norm())));
                    }
                    if !tried.insert(prev.clone()) {
                        continue;
                    }
                    let rest = Window { seq: w.seq, lo: w.lo, hi: w.hi - 1 };
                    if let Some(head) = self.decide(&rest, s, &prev)? {
                        let tail = graph.run_to(&c).expect("listed config").reversed()?;
                        let mut steps = head.steps;
                        steps.push(u.clone());
                        steps.extend(tail.steps);
                        return Ok(Some(Run::new(s.clone(), steps, RunMode::Nonneg)));
                    }
                }
            }
            return Ok(None);
        }
        let Boundedness::Witness(last_witness) = last else { unreachable!() };

        // Both ends unbounded: the window is pumpable.
        self.stats.zreach_calls += 1;
        let zlimits = ZLimits { node_limit: self.budget.limits.ilp_nodes, ..ZLimits::default() };
        let image = match zreachable(&inst, &ts, zlimits)? {
            ZReach::No => return Ok(None),
            ZReach::Yes(image) => image,
        };
        let gamma = image.materialize(s, t.state)?;
        let first_vass = inst.vass.with_reps(w.seq.component_reps(w.lo))?;
        let last_vass = inst.vass.with_reps(w.seq.component_reps(w.hi - 1))?.reverse();
        let forward = self.pump(&first_vass, &first_ts, s, &first_witness)?;
        let backward = self.pump(&last_vass, &last_rev, t, &last_witness)?.reversed()?;
        let pumps = PumpPair { forward, backward };
        lift_zrun(&inst, &ts, &pumps, &gamma, self.budget).map(Some)
    }

    /// The reversed transition set must again be closed under the group.
    fn check_reverse_orbits(&self, vass: &Vass, rev: &TransitionSet) -> Result<()> {
        for t in rev.all() {
            for u in orbit_of_transition(vass.group(), t, self.orbit_cap())? {
                if !rev.contains(&u) {
                    return Err(Error::Internal("reversed component is not closed under the group".into()));
                }
            }
        }
        Ok(())
    }

    /// A run from `start` back to its state with every counter larger, inside
    /// one strongly connected component. A short direct search is tried first;
    /// otherwise the unboundedness witness is repaired so that every counter
    /// exceeds `S + R`, and a short state path returns to the start state.
    fn pump(&mut self, comp: &Vass, ts: &TransitionSet, start: &Config, witness: &Run) -> Result<Run> {
        let quick_budget = self.budget.with_max_configs(self.budget.limits.max_configs.min(20_000));
        let max_len = 4 * comp.num_states() + 4;
        match find_forward_pump(start, ts, max_len, &quick_budget) {
            Ok(Some(run)) => return Ok(run),
            Ok(None) | Err(Error::ResourceLimit(_)) => {}
            Err(e) => return Err(e),
        }
        let repaired = self.policy.repair(comp, ts, witness, self.r)?;
        let end = repaired.end()?;
        let path = state_path(ts, end.state, start.state)
            .ok_or_else(|| Error::Internal("component is not strongly connected".into()))?;
        let mut steps = repaired.steps;
        steps.extend(path);
        let run = Run::new(start.clone(), steps, RunMode::Nonneg);
        match ts.validate(&run) {
            Ok(c) if c.state == start.state && c.vec.iter().zip(&start.vec).all(|(a, b)| a > b) => Ok(run),
            Ok(c) => Err(Error::Internal(format!("pump ends at {c:?}, which does not dominate the start"))),
            Err(e) => Err(Error::Internal(format!("pump does not validate: {e}"))),
        }
    }
}
