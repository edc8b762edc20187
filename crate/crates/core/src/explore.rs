//! Exhaustive exploration of bounded configuration spaces.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::error::{add_vec, Error, Result};
use crate::limits::Budget;
use crate::vass::{Config, Instance, Run, RunMode, Transition, TransitionSet};

/// Configurations discovered by a search, each with the step that first reached it.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    nodes: Vec<(Config, Option<(usize, Transition)>)>,
    index: HashMap<Config, usize>,
}

impl ReachGraph {
    fn new(start: Config) -> Self {
        let mut index = HashMap::new();
        index.insert(start.clone(), 0);
        ReachGraph { nodes: vec![(start, None)], index }
    }

    fn push(&mut self, c: Config, parent: usize, t: Transition) -> Option<usize> {
        if self.index.contains_key(&c) {
            return None;
        }
        let id = self.nodes.len();
        self.index.insert(c.clone(), id);
        self.nodes.push((c, Some((parent, t))));
        Some(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start(&self) -> &Config {
        &self.nodes[0].0
    }

    pub fn configs(&self) -> impl Iterator<Item = &Config> + '_ {
        self.nodes.iter().map(|(c, _)| c)
    }

    pub fn contains(&self, c: &Config) -> bool {
        self.index.contains_key(c)
    }

    /// Largest norm among the discovered configurations.
    pub fn max_norm(&self) -> i64 {
        self.configs().map(Config::norm).max().unwrap_or(0)
    }

    /// The tree path from the start to `c`, if `c` was discovered.
    pub fn run_to(&self, c: &Config) -> Option<Run> {
        let mut id = *self.index.get(c)?;
        let mut steps = Vec::new();
        while let Some((parent, t)) = &self.nodes[id].1 {
            steps.push(t.clone());
            id = *parent;
        }
        steps.reverse();
        Some(Run::new(self.start().clone(), steps, RunMode::Nonneg))
    }
}

fn successors<'a>(ts: &'a TransitionSet, c: &'a Config) -> impl Iterator<Item = Result<(Config, &'a Transition)>> + 'a {
    ts.from_state(c.state).filter_map(move |t| match add_vec(&c.vec, &t.effect) {
        Ok(v) if v.iter().all(|&x| x >= 0) => Some(Ok((Config::new(t.dst, v), t))),
        Ok(_) => None,
        Err(e) => Some(Err(e)),
    })
}

fn too_many(limit: usize, stage: &str) -> Error {
    Error::ResourceLimit(format!("{stage} explored more than {limit} configurations"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    /// A shortest run to the target.
    Reachable(Run),
    /// The target is not reachable through configurations of norm at most the bound.
    UnreachableWithin(i64),
    /// The target was not found, and the bounded search was cut at `config`,
    /// the first configuration discovered with norm above the bound.
    Exceeds { config: Config, run: Run },
}

/// Breadth-first search from the source over configurations of norm at most
/// `bound`. Returns the answer and the number of configurations explored.
pub fn bfs_oracle(inst: &Instance, ts: &TransitionSet, bound: i64, budget: &Budget) -> Result<(OracleAnswer, usize)> {
    let limit = budget.limits.max_configs;
    if inst.source == inst.target {
        return Ok((OracleAnswer::Reachable(Run::empty(inst.source.clone(), RunMode::Nonneg)), 1));
    }
    if inst.source.norm() > bound {
        let run = Run::empty(inst.source.clone(), RunMode::Nonneg);
        return Ok((OracleAnswer::Exceeds { config: inst.source.clone(), run }, 1));
    }
    let mut graph = ReachGraph::new(inst.source.clone());
    let mut queue = VecDeque::from([0usize]);
    let mut exceeded: Option<(Config, usize, Transition)> = None;
    while let Some(id) = queue.pop_front() {
        if id % 4096 == 0 {
            budget.check_time("bounded search")?;
        }
        let cur = graph.nodes[id].0.clone();
        for next in successors(ts, &cur) {
            let (c, t) = next?;
            if c.norm() > bound {
                if exceeded.is_none() {
                    exceeded = Some((c, id, t.clone()));
                }
                continue;
            }
            let hit = c == inst.target;
            if let Some(new) = graph.push(c, id, t.clone()) {
                if hit {
                    let run = graph.run_to(&inst.target).expect("just inserted");
                    return Ok((OracleAnswer::Reachable(run), graph.len()));
                }
                if graph.len() > limit {
                    return Err(too_many(limit, "bounded search"));
                }
                queue.push_back(new);
            }
        }
    }
    let explored = graph.len();
    Ok(match exceeded {
        None => (OracleAnswer::UnreachableWithin(bound), explored),
        Some((config, parent, t)) => {
            let parent_config = graph.nodes[parent].0.clone();
            let mut run = graph.run_to(&parent_config).expect("parent was discovered");
            run.steps.push(t);
            (OracleAnswer::Exceeds { config, run }, explored)
        }
    })
}

#[derive(Debug, Clone)]
pub enum Boundedness {
    /// Every configuration reachable from the start has norm at most
    /// `max_norm`; `graph` holds all of them.
    BoundedBy { max_norm: i64, graph: ReachGraph },
    /// A run from the start to a configuration of norm above the bound.
    Witness(Run),
}

/// Decides whether every configuration reachable from `start` using `ts`
/// has norm at most `bound`. Larger configurations are expanded first so that
/// unbounded components are detected early.
pub fn component_bounded(start: &Config, ts: &TransitionSet, bound: i64, budget: &Budget) -> Result<Boundedness> {
    let limit = budget.limits.max_configs;
    if start.norm() > bound {
        return Ok(Boundedness::Witness(Run::empty(start.clone(), RunMode::Nonneg)));
    }
    let mut graph = ReachGraph::new(start.clone());
    let mut heap = BinaryHeap::from([(start.norm(), Reverse(0usize))]);
    let mut popped = 0usize;
    while let Some((_, Reverse(id))) = heap.pop() {
        popped += 1;
        if popped.is_multiple_of(4096) {
            budget.check_time("boundedness check")?;
        }
        let cur = graph.nodes[id].0.clone();
        for next in successors(ts, &cur) {
            let (c, t) = next?;
            if c.norm() > bound {
                let mut run = graph.run_to(&cur).expect("current node was discovered");
                run.steps.push(t.clone());
                return Ok(Boundedness::Witness(run));
            }
            let norm = c.norm();
            if let Some(new) = graph.push(c, id, t.clone()) {
                if graph.len() > limit {
                    return Err(too_many(limit, "boundedness check"));
                }
                heap.push((norm, Reverse(new)));
            }
        }
    }
    Ok(Boundedness::BoundedBy { max_norm: graph.max_norm(), graph })
}

/// Result of an escalating search that closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRun {
    /// `Some` iff the target is reachable.
    pub witness: Option<Run>,
    /// Configurations explored over all rounds.
    pub explored: usize,
    /// The bound of the final round.
    pub bound: i64,
}

/// Repeats [`bfs_oracle`] with bounds `S+1, 2(S+1), ...` until a round finds
/// the target or explores its whole reachable set without hitting the bound.
pub fn escalating_oracle(inst: &Instance, ts: &TransitionSet, budget: &Budget) -> Result<OracleRun> {
    let mut bound = inst.big_s().checked_add(1).ok_or_else(Error::overflow)?;
    let mut explored = 0usize;
    loop {
        if bound > budget.limits.max_vector_norm {
            return Err(Error::ResourceLimit(format!(
                "escalating search passed the norm limit {}",
                budget.limits.max_vector_norm
            )));
        }
        let (answer, n) = bfs_oracle(inst, ts, bound, budget)?;
        explored = explored.saturating_add(n);
        match answer {
            OracleAnswer::Reachable(run) => return Ok(OracleRun { witness: Some(run), explored, bound }),
            OracleAnswer::UnreachableWithin(_) => return Ok(OracleRun { witness: None, explored, bound }),
            OracleAnswer::Exceeds { .. } => bound = bound.checked_mul(2).ok_or_else(Error::overflow)?,
        }
    }
}
