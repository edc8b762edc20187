//! Counting abstraction: a bounded data configuration becomes, for every
//! dimension `i` and value `b` in `1..=B`, the number of data holding `b` in
//! dimension `i`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::{Binding, DataConfig, DataInstance, DataRun, DataStep, Datum, Symmetry};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::perm::Group;
use crate::reductions::balance_bound;
use crate::vass::{Config, Instance, Run, StateId, Transition, Vass};

/// `8N^3 + 4N^2 + 2N` for `N` the instance norm.
pub fn counting_bound(inst: &DataInstance) -> Result<i64> {
    balance_bound(inst.norm())
}

fn coord(bound: i64, dim: usize, value: i64) -> usize {
    dim * bound as usize + value as usize - 1
}

/// Counts per `(dim, value)` at coordinate `dim * B + value - 1`.
pub fn abstract_config(c: &DataConfig, dims: usize, bound: i64) -> Result<Config> {
    let mut v = vec![0; dims * bound as usize];
    for ((d, _), x) in c.vec.entries() {
        if x > bound {
            return Err(Error::Input(format!("entry {x} exceeds the bound {bound}")));
        }
        v[coord(bound, d, x)] += 1;
    }
    Ok(Config::new(c.state, v))
}

/// Old value of every `(dim, var)` a template updates, in delta order.
type Olds = Vec<i64>;

#[derive(Debug, Clone)]
pub struct CountingOutput {
    pub instance: Instance,
    pub bound: i64,
    source: DataInstance,
    /// Single transitions whose negative part already lists every old value.
    direct: HashMap<Transition, (usize, Olds)>,
    /// Intermediate states of transitions split into a take and a give step.
    split: HashMap<StateId, (usize, Olds)>,
}

/// Builds the counting VASS for a per-dimension instance with zero source
/// and target vectors. A template under given old values takes one count at
/// each old value and gives one at each new value. When the taken and given
/// counters overlap the transition is split through an intermediate state,
/// so that the take is checked before the give.
pub fn reduce_counting(inst: &DataInstance, bound: Option<i64>, limits: &Limits) -> Result<CountingOutput> {
    if inst.symmetry != Symmetry::PerDimension {
        return Err(Error::UnsupportedGroup("counting needs per-dimension symmetry".into()));
    }
    if !inst.source.vec.is_zero() || !inst.target.vec.is_zero() {
        return Err(Error::Input("counting supports only zero source and target vectors".into()));
    }
    let big_b = match bound {
        Some(b) => b,
        None => counting_bound(inst)?,
    };
    if big_b < 1 || inst.dims == 0 {
        return Err(Error::Input("counting needs a positive bound and dimension".into()));
    }
    let dim = inst
        .dims
        .checked_mul(big_b as usize)
        .filter(|&d| d <= limits.max_configs)
        .ok_or_else(|| Error::ResourceLimit(format!("counting dimension exceeds {}", limits.max_configs)))?;
    let mut names = inst.states.clone();
    let mut reps = Vec::new();
    let mut direct = HashMap::new();
    let mut split = HashMap::new();
    for (k, t) in inst.templates.iter().enumerate() {
        let ranges: Vec<Vec<i64>> =
            t.deltas.iter().map(|&(_, _, x)| (0..=big_b).filter(|o| (0..=big_b).contains(&(o + x))).collect()).collect();
        let total = ranges.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len()));
        if total.is_none_or(|n| n > limits.max_configs) {
            return Err(Error::ResourceLimit(format!("template {} has too many counting instances", k + 1)));
        }
        let mut olds: Vec<Olds> = vec![Vec::new()];
        for r in &ranges {
            olds = olds.iter().flat_map(|p| r.iter().map(move |&o| [p.clone(), vec![o]].concat())).collect();
        }
        for (ci, combo) in olds.into_iter().enumerate() {
            let mut take = vec![0i64; dim];
            let mut give = vec![0i64; dim];
            for (&(d, _, x), &o) in t.deltas.iter().zip(&combo) {
                if o >= 1 {
                    take[coord(big_b, d, o)] -= 1;
                }
                if o + x >= 1 {
                    give[coord(big_b, d, o + x)] += 1;
                }
            }
            let overlap = take.iter().zip(&give).any(|(a, b)| *a < 0 && *b > 0);
            if overlap {
                let mid = names.len();
                names.push(format!("{}~{}~{ci}", inst.states[t.src], k + 1));
                reps.push(Transition::new(t.src, take, mid));
                reps.push(Transition::new(mid, give, t.dst));
                split.insert(mid, (k, combo));
            } else {
                let effect = take.iter().zip(&give).map(|(a, b)| a + b).collect();
                let tr = Transition::new(t.src, effect, t.dst);
                if let Entry::Vacant(slot) = direct.entry(tr) {
                    reps.push(slot.key().clone());
                    slot.insert((k, combo));
                }
            }
            if reps.len() > limits.max_configs {
                return Err(Error::ResourceLimit(format!("counting VASS exceeds {} transitions", limits.max_configs)));
            }
        }
    }
    let vass = Vass::new(names, Group::Trivial(dim), reps)?;
    let zero = |c: &DataConfig| Config::new(c.state, vec![0; dim]);
    let instance = Instance::new(vass, zero(&inst.source), zero(&inst.target))?;
    Ok(CountingOutput { instance, bound: big_b, source: inst.clone(), direct, split })
}

impl CountingOutput {
    /// Rebuilds a data run from a run of the counting VASS, picking a datum
    /// never used before for old value 0 and any datum holding the old value
    /// otherwise.
    pub fn back_translate(&self, run: &Run) -> Result<DataRun> {
        if run.start != self.instance.source {
            return Err(Error::Input("run does not start at the counting source".into()));
        }
        let inst = &self.source;
        let mut cur = inst.source.clone();
        let mut fresh: Datum = 0;
        let mut steps = Vec::new();
        let mut i = 0;
        while i < run.steps.len() {
            let step = &run.steps[i];
            let (k, olds) = if let Some(entry) = self.split.get(&step.dst) {
                i += 2;
                entry
            } else {
                i += 1;
                self.direct
                    .get(step)
                    .ok_or_else(|| Error::Input(format!("step {} is not a counting transition", i - 1)))?
            };
            let t = &inst.templates[*k];
            let mut rows: Vec<Vec<Datum>> = vec![vec![0; t.vars]; inst.dims];
            let mut taken: Vec<Vec<Datum>> = vec![Vec::new(); inst.dims];
            for (&(d, v, _), &o) in t.deltas.iter().zip(olds) {
                let datum = if o == 0 {
                    fresh += 1;
                    fresh - 1
                } else {
                    cur.vec
                        .entries()
                        .find(|&((dd, a), x)| dd == d && x == o && !taken[d].contains(&a))
                        .map(|((_, a), _)| a)
                        .ok_or_else(|| Error::Input(format!("no datum holds {o} in dimension {}", d + 1)))?
                };
                taken[d].push(datum);
                rows[d][v] = datum;
            }
            let binding = Binding::PerDim(rows);
            cur = inst.step(&cur, *k, &binding)?;
            steps.push(DataStep { template: *k, binding });
        }
        Ok(DataRun { start: inst.source.clone(), steps })
    }

    pub fn abstract_config(&self, c: &DataConfig) -> Result<Config> {
        abstract_config(c, self.source.dims, self.bound)
    }
}
