//! Bounded search over data configurations, and sum invariants as
//! unreachability certificates.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Binding, DataConfig, DataInstance, DataRun, DataStep, DataTemplate, Datum, data_step};
use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataAnswer {
    /// A shortest run to the target.
    Reachable(DataRun),
    /// No run through configurations with entries at most `bound` that only
    /// uses data from `domain`. Runs using further data were not explored, so
    /// this is not a proof of unreachability.
    UnreachableWithin { bound: i64, domain: Vec<Datum> },
}

/// Injective maps from `vars` to `domain`, in lexicographic order.
fn injections(vars: &[usize], domain: &[Datum]) -> Vec<Vec<(usize, Datum)>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(vars.len());
    fn go(vars: &[usize], domain: &[Datum], cur: &mut Vec<(usize, Datum)>, out: &mut Vec<Vec<(usize, Datum)>>) {
        let Some((&v, rest)) = vars.split_first() else {
            out.push(cur.clone());
            return;
        };
        for &a in domain {
            if cur.iter().all(|&(_, b)| b != a) {
                cur.push((v, a));
                go(rest, domain, cur, out);
                cur.pop();
            }
        }
    }
    go(vars, domain, &mut cur, &mut out);
    out
}

/// Every admissible binding of `tmpl` with values in `domain`.
pub fn bindings(inst: &DataInstance, tmpl: &DataTemplate, domain: &[Datum]) -> Vec<Binding> {
    let fill = domain.first().copied().unwrap_or(0);
    match inst.symmetry {
        super::Symmetry::Diagonal => {
            let all: Vec<usize> = (0..tmpl.vars).collect();
            injections(&all, domain)
                .into_iter()
                .map(|m| Binding::Shared(m.into_iter().map(|(_, a)| a).collect()))
                .collect()
        }
        super::Symmetry::PerDimension => {
            let mut rows_so_far: Vec<Vec<Vec<Datum>>> = vec![Vec::new()];
            for d in 0..inst.dims {
                let used = tmpl.vars_in(d);
                let mut next = Vec::new();
                for prefix in &rows_so_far {
                    for m in injections(&used, domain) {
                        let mut row = vec![fill; tmpl.vars];
                        for (v, a) in m {
                            row[v] = a;
                        }
                        let mut rows = prefix.clone();
                        rows.push(row);
                        next.push(rows);
                    }
                }
                rows_so_far = next;
            }
            rows_so_far.into_iter().map(Binding::PerDim).collect()
        }
    }
}

/// Breadth-first search over configurations with entries at most `bound`,
/// using the data of the source and target plus `fresh` further values.
pub fn data_oracle(inst: &DataInstance, bound: i64, fresh: usize, limits: &Limits) -> Result<DataAnswer> {
    let budget = limits.budget();
    let mut used: BTreeSet<Datum> = inst.source.vec.data();
    used.extend(inst.target.vec.data());
    let mut domain: Vec<Datum> = used.iter().copied().collect();
    let mut next = 0;
    while domain.len() < used.len() + fresh {
        if !used.contains(&next) {
            domain.push(next);
        }
        next += 1;
    }
    domain.sort_unstable();
    let start = inst.source.clone();
    let empty = DataRun { start: start.clone(), steps: Vec::new() };
    if start == inst.target {
        return Ok(DataAnswer::Reachable(empty));
    }
    let unreachable = DataAnswer::UnreachableWithin { bound, domain: domain.clone() };
    if start.vec.norm() > bound {
        return Ok(unreachable);
    }
    let per_template: Vec<Vec<Binding>> = inst.templates.iter().map(|t| bindings(inst, t, &domain)).collect();
    let mut nodes: Vec<(DataConfig, Option<(usize, DataStep)>)> = vec![(start.clone(), None)];
    let mut index: HashMap<DataConfig, usize> = HashMap::from([(start, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        if id % 1024 == 0 {
            budget.check_time("data search")?;
        }
        let cur = nodes[id].0.clone();
        for (k, tmpl) in inst.templates.iter().enumerate() {
            if tmpl.src != cur.state {
                continue;
            }
            for binding in &per_template[k] {
                let Ok(c) = data_step(&cur, tmpl, binding) else { continue };
                if c.vec.norm() > bound || index.contains_key(&c) {
                    continue;
                }
                let new = nodes.len();
                index.insert(c.clone(), new);
                let hit = c == inst.target;
                nodes.push((c, Some((id, DataStep { template: k, binding: binding.clone() }))));
                if hit {
                    let mut steps = Vec::new();
                    let mut at = new;
                    while let Some((parent, step)) = &nodes[at].1 {
                        steps.push(step.clone());
                        at = *parent;
                    }
                    steps.reverse();
                    return Ok(DataAnswer::Reachable(DataRun { start: inst.source.clone(), steps }));
                }
                if nodes.len() > limits.max_configs {
                    return Err(Error::ResourceLimit(format!(
                        "data search explored more than {} configurations",
                        limits.max_configs
                    )));
                }
                queue.push_back(new);
            }
        }
    }
    Ok(unreachable)
}

/// For one dimension, the sum of its entries at each control state, valid
/// for every configuration reachable from the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumInvariant {
    pub dim: usize,
    /// `None` for control states unreachable from the source.
    pub value: Vec<Option<i64>>,
}

/// Per dimension, a potential on control states such that every template
/// changes the dimension's sum by the potential difference of its endpoints.
/// Dimensions without such a potential are omitted.
pub fn sum_invariants(inst: &DataInstance) -> Vec<SumInvariant> {
    let n = inst.states.len();
    let mut out = Vec::new();
    'dims: for dim in 0..inst.dims {
        let net = |t: &DataTemplate| -> i64 { t.deltas.iter().filter(|(d, _, _)| *d == dim).map(|(_, _, x)| x).sum() };
        let mut value: Vec<Option<i64>> = vec![None; n];
        value[inst.source.state] = Some(inst.source.vec.sum(dim));
        let mut queue = VecDeque::from([inst.source.state]);
        while let Some(p) = queue.pop_front() {
            let vp = value[p].expect("queued states have values");
            for t in inst.templates.iter().filter(|t| t.src == p) {
                let vq = vp + net(t);
                match value[t.dst] {
                    None => {
                        value[t.dst] = Some(vq);
                        queue.push_back(t.dst);
                    }
                    Some(old) if old != vq => continue 'dims,
                    Some(_) => {}
                }
            }
        }
        out.push(SumInvariant { dim, value });
    }
    out
}

/// A sum invariant the target violates, if any.
pub fn certify_unreachable(inst: &DataInstance) -> Option<SumInvariant> {
    sum_invariants(inst)
        .into_iter()
        .find(|inv| inv.value[inst.target.state] != Some(inst.target.vec.sum(inv.dim)))
}
