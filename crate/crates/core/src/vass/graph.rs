//! State graph, strongly connected components and sequential decompositions.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{Instance, StateId, Transition, Vass};

/// Directed graph on states; edge `(q, q')` iff some transition goes from `q` to `q'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateGraph {
    pub num_states: usize,
    pub edges: BTreeSet<(StateId, StateId)>,
}

impl StateGraph {
    pub fn from_transitions<'a>(num_states: usize, ts: impl IntoIterator<Item = &'a Transition>) -> Self {
        StateGraph { num_states, edges: ts.into_iter().map(|t| (t.src, t.dst)).collect() }
    }

    pub fn successors(&self, q: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.edges.range((q, 0)..=(q, usize::MAX)).map(|&(_, b)| b)
    }

    /// Strongly connected components; `comp[q]` is the index of `q`'s
    /// component, and components are numbered in topological order.
    pub fn sccs(&self) -> (Vec<Vec<StateId>>, Vec<usize>) {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<NodeIndex> = (0..self.num_states).map(|_| g.add_node(())).collect();
        for &(a, b) in &self.edges {
            g.add_edge(nodes[a], nodes[b], ());
        }
        // tarjan_scc yields components in reverse topological order.
        let mut comps: Vec<Vec<StateId>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<StateId> = c.into_iter().map(NodeIndex::index).collect();
                c.sort_unstable();
                c
            })
            .collect();
        comps.reverse();
        let mut comp = vec![0; self.num_states];
        for (i, c) in comps.iter().enumerate() {
            for &q in c {
                comp[q] = i;
            }
        }
        (comps, comp)
    }

    /// States reachable from `q` (including `q`).
    pub fn reachable_from(&self, q: StateId) -> Vec<bool> {
        let mut seen = vec![false; self.num_states];
        let mut stack = vec![q];
        seen[q] = true;
        while let Some(a) = stack.pop() {
            for b in self.successors(a) {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }
}

/// The state graph of a VASS. Orbits fix states, so the representatives suffice.
pub fn state_graph(v: &Vass) -> StateGraph {
    StateGraph::from_transitions(v.num_states(), v.reps())
}

/// A chain of strongly connected components joined by one bridge orbit each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialVass {
    /// Same states and group as the input; only the transitions inside the
    /// chain's components plus the chosen bridge representatives remain.
    pub instance: Instance,
    /// Components in chain order; the source lies in the first, the target in the last.
    pub components: Vec<Vec<StateId>>,
    /// `bridges[i]` joins `components[i]` to `components[i + 1]`.
    pub bridges: Vec<Transition>,
}

impl SequentialVass {
    /// Index into `components` of the component holding `q`, if any.
    pub fn component_of(&self, q: StateId) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&q))
    }

    /// Representatives inside component `i`.
    pub fn component_reps(&self, i: usize) -> Vec<Transition> {
        let c = &self.components[i];
        self.instance
            .vass
            .reps()
            .iter()
            .filter(|t| c.contains(&t.src) && c.contains(&t.dst))
            .cloned()
            .collect()
    }
}

/// Lazily enumerates the sequential decompositions of an instance: one per
/// path of the condensation from the source's component to the target's and
/// per choice of bridge representative along it.
pub fn sequential_decompositions(inst: &Instance) -> impl Iterator<Item = SequentialVass> + '_ {
    let graph = state_graph(&inst.vass);
    let (comps, comp) = graph.sccs();
    let reps: Vec<Transition> = {
        let mut seen = BTreeSet::new();
        inst.vass.reps().iter().filter(|t| seen.insert((*t).clone())).cloned().collect()
    };
    let from = comp[inst.source.state];
    let to = comp[inst.target.state];

    // Bridge representatives between each ordered pair of components.
    let k = comps.len();
    let mut between: Vec<Vec<Vec<Transition>>> = vec![vec![Vec::new(); k]; k];
    for t in &reps {
        let (a, b) = (comp[t.src], comp[t.dst]);
        if a != b {
            between[a][b].push(t.clone());
        }
    }

    let mut paths = Vec::new();
    let mut stack = vec![vec![from]];
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("paths are nonempty");
        if last == to {
            paths.push(path);
            continue;
        }
        // Push successors in reverse so that smaller component ids come out first.
        for next in (last + 1..k).rev() {
            if !between[last][next].is_empty() {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }

    paths.into_iter().flat_map(move |path| {
        let choices: Vec<Vec<Transition>> = path.windows(2).map(|w| between[w[0]][w[1]].clone()).collect();
        let components: Vec<Vec<StateId>> = path.iter().map(|&c| comps[c].clone()).collect();
        let inner: Vec<Transition> = reps
            .iter()
            .filter(|t| comp[t.src] == comp[t.dst] && path.contains(&comp[t.src]))
            .cloned()
            .collect();
        let vass = inst.vass.clone();
        let (source, target) = (inst.source.clone(), inst.target.clone());
        Odometer::new(choices.iter().map(Vec::len).collect()).map(move |digits| {
            let bridges: Vec<Transition> =
                digits.iter().zip(&choices).map(|(&i, opts)| opts[i].clone()).collect();
            let mut all = inner.clone();
            all.extend(bridges.iter().cloned());
            let vass = vass.with_reps(all).expect("subset of valid representatives");
            SequentialVass {
                instance: Instance { vass, source: source.clone(), target: target.clone() },
                components: components.clone(),
                bridges,
            }
        })
    })
}

/// Mixed-radix counter over `0..radix[i]`, last digit fastest.
struct Odometer {
    radix: Vec<usize>,
    cur: Option<Vec<usize>>,
}

impl Odometer {
    fn new(radix: Vec<usize>) -> Self {
        let cur = if radix.contains(&0) { None } else { Some(vec![0; radix.len()]) };
        Odometer { radix, cur }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().expect("checked above");
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.cur = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < self.radix[pos] {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}
