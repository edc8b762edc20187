//! The VASS model: transitions given by orbit representatives, configurations,
//! instances and runs.

mod graph;
mod run;

use std::collections::{HashMap, HashSet};

pub use graph::{sequential_decompositions, state_graph, SequentialVass, StateGraph};
pub use run::{Run, RunMode};

use crate::error::{Error, Result};
use crate::perm::{Group, Permutation};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: StateId,
    pub effect: Vec<i64>,
    pub dst: StateId,
}

impl Transition {
    pub fn new(src: StateId, effect: Vec<i64>, dst: StateId) -> Self {
        Transition { src, effect, dst }
    }

    /// Largest absolute entry of the effect.
    pub fn norm(&self) -> i64 {
        norm(&self.effect)
    }

    /// `(dst, -effect, src)`.
    pub fn reversed(&self) -> Self {
        Transition { src: self.dst, effect: self.effect.iter().map(|x| -x).collect(), dst: self.src }
    }

    /// Same states, effect moved by `p`.
    pub fn permuted(&self, p: &Permutation) -> Self {
        Transition { src: self.src, effect: p.apply_unchecked(&self.effect), dst: self.dst }
    }
}

/// Largest absolute entry, 0 for the empty vector.
pub fn norm(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub state: StateId,
    pub vec: Vec<i64>,
}

impl Config {
    pub fn new(state: StateId, vec: Vec<i64>) -> Self {
        Config { state, vec }
    }

    pub fn norm(&self) -> i64 {
        norm(&self.vec)
    }

    pub fn is_nonneg(&self) -> bool {
        self.vec.iter().all(|&x| x >= 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vass {
    states: Vec<String>,
    group: Group,
    reps: Vec<Transition>,
}

impl Vass {
    pub fn new(states: Vec<String>, group: Group, reps: Vec<Transition>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::Input(format!("duplicate state {s:?}")));
            }
        }
        let d = group.degree();
        for t in &reps {
            if t.src >= states.len() || t.dst >= states.len() {
                return Err(Error::Input(format!("transition refers to unknown state id in {t:?}")));
            }
            if t.effect.len() != d {
                return Err(Error::Dimension { expected: d, got: t.effect.len() });
            }
        }
        Ok(Vass { states, group, reps })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.group.degree()
    }

    /// Orbit representatives.
    pub fn reps(&self) -> &[Transition] {
        &self.reps
    }

    /// Largest norm of a transition.
    pub fn norm(&self) -> i64 {
        self.reps.iter().map(Transition::norm).max().unwrap_or(0)
    }

    /// Representation size `|T~| * (2|Q| + d * floor(log2(2N+1)))`.
    pub fn size_metric(&self) -> u64 {
        let n = self.norm() as u64;
        let bits = u64::from((2 * n + 1).ilog2());
        self.reps.len() as u64 * (2 * self.states.len() as u64 + self.dim() as u64 * bits)
    }

    /// Same states and group, different representatives.
    pub fn with_reps(&self, reps: Vec<Transition>) -> Result<Self> {
        Vass::new(self.states.clone(), self.group.clone(), reps)
    }

    /// Every transition `(q, v, q')` becomes `(q', -v, q)`.
    pub fn reverse(&self) -> Self {
        Vass {
            states: self.states.clone(),
            group: self.group.clone(),
            reps: self.reps.iter().map(Transition::reversed).collect(),
        }
    }

    /// The full transition set: the union of the orbits of the representatives.
    pub fn expand(&self, cap: usize) -> Result<TransitionSet> {
        let mut all = Vec::new();
        let mut index = HashSet::new();
        for rep in &self.reps {
            for effect in self.group.orbit_of_vector(&rep.effect, cap)? {
                let t = Transition::new(rep.src, effect, rep.dst);
                if index.insert(t.clone()) {
                    all.push(t);
                    if all.len() > cap {
                        return Err(Error::ResourceLimit(format!(
                            "expanded transition set exceeds {cap} transitions"
                        )));
                    }
                }
            }
        }
        Ok(TransitionSet::from_parts(self.states.len(), self.dim(), all, index))
    }
}

/// The orbit of one transition under a group.
pub fn orbit_of_transition(group: &Group, t: &Transition, cap: usize) -> Result<Vec<Transition>> {
    Ok(group
        .orbit_of_vector(&t.effect, cap)?
        .into_iter()
        .map(|effect| Transition::new(t.src, effect, t.dst))
        .collect())
}

/// A fully expanded transition set with lookup by source state.
#[derive(Debug, Clone)]
pub struct TransitionSet {
    dim: usize,
    all: Vec<Transition>,
    by_src: Vec<Vec<usize>>,
    index: HashSet<Transition>,
}

impl TransitionSet {
    fn from_parts(num_states: usize, dim: usize, all: Vec<Transition>, index: HashSet<Transition>) -> Self {
        let mut by_src = vec![Vec::new(); num_states];
        for (i, t) in all.iter().enumerate() {
            by_src[t.src].push(i);
        }
        TransitionSet { dim, all, by_src, index }
    }

    /// A set holding exactly the given transitions (duplicates dropped).
    pub fn from_transitions(num_states: usize, dim: usize, transitions: impl IntoIterator<Item = Transition>) -> Self {
        let mut all = Vec::new();
        let mut index = HashSet::new();
        for t in transitions {
            if index.insert(t.clone()) {
                all.push(t);
            }
        }
        Self::from_parts(num_states, dim, all, index)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_states(&self) -> usize {
        self.by_src.len()
    }

    pub fn all(&self) -> &[Transition] {
        &self.all
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn contains(&self, t: &Transition) -> bool {
        self.index.contains(t)
    }

    pub fn from_state(&self, q: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.by_src[q].iter().map(move |&i| &self.all[i])
    }

    /// Keeps only the transitions satisfying `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&Transition) -> bool) -> Self {
        Self::from_transitions(self.num_states(), self.dim, self.all.iter().filter(|t| keep(t)).cloned())
    }

    /// Checks that `run` uses only these transitions, chains states, and (in
    /// nonnegative mode) stays nonnegative. Returns the final configuration.
    pub fn validate(&self, run: &Run) -> Result<Config> {
        run.replay(|t| self.contains(t))
    }
}

/// A VASS together with source and target configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub vass: Vass,
    pub source: Config,
    pub target: Config,
}

impl Instance {
    pub fn new(vass: Vass, source: Config, target: Config) -> Result<Self> {
        let d = vass.dim();
        for c in [&source, &target] {
            if c.vec.len() != d {
                return Err(Error::Dimension { expected: d, got: c.vec.len() });
            }
            if c.state >= vass.num_states() {
                return Err(Error::Input(format!("unknown state id {}", c.state)));
            }
            if !c.is_nonneg() {
                return Err(Error::Input("configurations must be nonnegative".into()));
            }
        }
        Ok(Instance { vass, source, target })
    }

    pub fn dim(&self) -> usize {
        self.vass.dim()
    }

    /// `N`: the norm of the VASS.
    pub fn big_n(&self) -> i64 {
        self.vass.norm()
    }

    /// `S`: the maximum of the VASS, source and target norms.
    pub fn big_s(&self) -> i64 {
        self.big_n().max(self.source.norm()).max(self.target.norm())
    }

    /// Source and target swapped, transitions reversed.
    pub fn reversed(&self) -> Self {
        Instance { vass: self.vass.reverse(), source: self.target.clone(), target: self.source.clone() }
    }
}

/// Interns state names in first-seen order.
#[derive(Debug, Default, Clone)]
pub struct StateNames {
    names: Vec<String>,
    ids: HashMap<String, StateId>,
}

impl StateNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<StateId> {
        self.ids.get(name).copied()
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }
}
