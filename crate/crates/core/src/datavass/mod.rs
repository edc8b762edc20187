//! VASS whose counters are indexed by a dimension and a datum from an
//! infinite domain. Transitions are templates over data variables and fire
//! under any binding of the variables to distinct data.
//!
//! Two symmetries are supported: `Diagonal`, where one binding is shared by
//! all dimensions, and `PerDimension`, where every dimension binds its
//! variables independently.

mod counting;
mod oracle;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use counting::{abstract_config, counting_bound, reduce_counting, CountingOutput};
pub use oracle::{bindings, certify_unreachable, data_oracle, sum_invariants, DataAnswer, SumInvariant};
pub use text::{parse_data_instance, print_data_instance, print_data_run};

use crate::error::{add, Error, Result, Violation, ViolationReason};
use crate::vass::StateId;

pub type Datum = u64;

/// Finite-support vector over `dimension x datum`; zero entries are absent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataVector {
    entries: BTreeMap<(usize, Datum), i64>,
}

impl DataVector {
    pub fn new() -> Self {
        DataVector::default()
    }

    /// Vector with the given `(dim, datum, value)` entries.
    pub fn from_entries(entries: &[(usize, Datum, i64)]) -> Self {
        let mut v = DataVector::new();
        for &(d, a, x) in entries {
            v.set(d, a, x);
        }
        v
    }

    pub fn get(&self, dim: usize, datum: Datum) -> i64 {
        self.entries.get(&(dim, datum)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, dim: usize, datum: Datum, value: i64) {
        if value == 0 {
            self.entries.remove(&(dim, datum));
        } else {
            self.entries.insert((dim, datum), value);
        }
    }

    pub fn add(&mut self, dim: usize, datum: Datum, delta: i64) -> Result<()> {
        let v = add(self.get(dim, datum), delta)?;
        self.set(dim, datum, v);
        Ok(())
    }

    /// Nonzero entries in `(dim, datum)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, Datum), i64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Data carrying a nonzero entry in some dimension.
    pub fn data(&self) -> BTreeSet<Datum> {
        self.entries.keys().map(|&(_, a)| a).collect()
    }

    pub fn norm(&self) -> i64 {
        self.entries.values().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn sum(&self, dim: usize) -> i64 {
        self.entries.iter().filter(|((d, _), _)| *d == dim).map(|(_, v)| v).sum()
    }

    /// Applies an injective renaming of data.
    pub fn rename(&self, f: impl Fn(Datum) -> Datum) -> DataVector {
        DataVector { entries: self.entries.iter().map(|(&(d, a), &v)| ((d, f(a)), v)).collect() }
    }
}

impl fmt::Display for DataVector {
    /// `(dim,datum)=value` with 1-based dimensions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((d, a), v) in self.entries() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "({},{a})={v}", d + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataConfig {
    pub state: StateId,
    pub vec: DataVector,
}

impl DataConfig {
    pub fn new(state: StateId, vec: DataVector) -> Self {
        DataConfig { state, vec }
    }
}

/// A transition template: `deltas` lists `(dim, var, delta)`, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DataTemplate {
    pub src: StateId,
    pub dst: StateId,
    pub vars: usize,
    pub deltas: Vec<(usize, usize, i64)>,
}

impl DataTemplate {
    /// Variables used in dimension `dim`.
    pub fn vars_in(&self, dim: usize) -> Vec<usize> {
        let mut vs: Vec<usize> = self.deltas.iter().filter(|(d, _, _)| *d == dim).map(|&(_, v, _)| v).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn norm(&self) -> i64 {
        self.deltas.iter().map(|(_, _, x)| x.abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    /// One permutation of data shared by all dimensions.
    Diagonal,
    /// An independent permutation of data per dimension.
    PerDimension,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::Diagonal => "diagonal",
            Symmetry::PerDimension => "per-dimension",
        })
    }
}

/// Values for the variables of one template.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Binding {
    /// The same datum for a variable in every dimension.
    Shared(Vec<Datum>),
    /// `rows[dim][var]`.
    PerDim(Vec<Vec<Datum>>),
}

impl Binding {
    pub fn datum(&self, dim: usize, var: usize) -> Datum {
        match self {
            Binding::Shared(v) => v[var],
            Binding::PerDim(rows) => rows[dim][var],
        }
    }

    pub fn rename(&self, f: impl Fn(Datum) -> Datum) -> Binding {
        match self {
            Binding::Shared(v) => Binding::Shared(v.iter().map(|&a| f(a)).collect()),
            Binding::PerDim(rows) => Binding::PerDim(rows.iter().map(|r| r.iter().map(|&a| f(a)).collect()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataStep {
    pub template: usize,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataRun {
    pub start: DataConfig,
    pub steps: Vec<DataStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataInstance {
    pub dims: usize,
    pub states: Vec<String>,
    pub templates: Vec<DataTemplate>,
    pub symmetry: Symmetry,
    pub source: DataConfig,
    pub target: DataConfig,
}

impl DataInstance {
    pub fn new(
        dims: usize,
        states: Vec<String>,
        templates: Vec<DataTemplate>,
        symmetry: Symmetry,
        source: DataConfig,
        target: DataConfig,
    ) -> Result<Self> {
        for (k, t) in templates.iter().enumerate() {
            if t.src >= states.len() || t.dst >= states.len() {
                return Err(Error::Input(format!("template {} refers to an unknown state", k + 1)));
            }
            let mut seen = BTreeSet::new();
            for &(d, v, _) in &t.deltas {
                if d >= dims || v >= t.vars {
                    return Err(Error::Input(format!("template {} has an out-of-range dimension or variable", k + 1)));
                }
                if !seen.insert((d, v)) {
                    return Err(Error::Input(format!(
                        "template {} updates dimension {} of variable {} twice",
                        k + 1,
                        d + 1,
                        v + 1
                    )));
                }
            }
        }
        for c in [&source, &target] {
            if c.state >= states.len() {
                return Err(Error::Input("configuration refers to an unknown state".into()));
            }
            if c.vec.entries().any(|((d, _), v)| d >= dims || v < 0) {
                return Err(Error::Input("configuration entries must be nonnegative and within the dimensions".into()));
            }
        }
        Ok(DataInstance { dims, states, templates, symmetry, source, target })
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    /// Largest absolute delta or endpoint entry.
    pub fn norm(&self) -> i64 {
        let t = self.templates.iter().map(DataTemplate::norm).max().unwrap_or(0);
        t.max(self.source.vec.norm()).max(self.target.vec.norm())
    }

    /// Checks that `binding` is admissible for `tmpl` under the symmetry.
    pub fn check_binding(&self, tmpl: &DataTemplate, binding: &Binding) -> Result<()> {
        match binding {
            Binding::Shared(v) => {
                if v.len() != tmpl.vars {
                    return Err(Error::Input(format!("expected {} data values, got {}", tmpl.vars, v.len())));
                }
                let distinct: BTreeSet<_> = v.iter().collect();
                if distinct.len() != v.len() {
                    return Err(Error::Input("data values of a binding must be distinct".into()));
                }
            }
            Binding::PerDim(rows) => {
                if rows.len() != self.dims || rows.iter().any(|r| r.len() != tmpl.vars) {
                    return Err(Error::Input("per-dimension binding has the wrong shape".into()));
                }
                if self.symmetry == Symmetry::Diagonal && rows.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::Input("diagonal symmetry needs the same binding in every dimension".into()));
                }
                for (d, row) in rows.iter().enumerate() {
                    let used = tmpl.vars_in(d);
                    let distinct: BTreeSet<_> = used.iter().map(|&v| row[v]).collect();
                    if distinct.len() != used.len() {
                        return Err(Error::Input(format!("data values in dimension {} must be distinct", d + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Fires template `k` under `binding`.
    pub fn step(&self, c: &DataConfig, k: usize, binding: &Binding) -> Result<DataConfig> {
        let tmpl = self.templates.get(k).ok_or_else(|| Error::Input(format!("no template {}", k + 1)))?;
        self.check_binding(tmpl, binding)?;
        data_step(c, tmpl, binding)
    }

    /// Replays a run, reporting the first failing step.
    pub fn replay(&self, run: &DataRun) -> Result<DataConfig> {
        let mut cur = run.start.clone();
        for (index, s) in run.steps.iter().enumerate() {
            cur = self.step(&cur, s.template, &s.binding).map_err(|e| match e {
                Error::Violation(v) => Error::Violation(Violation { index, ..v }),
                other => other,
            })?;
        }
        Ok(cur)
    }
}

/// Applies each delta at `(dim, binding(dim, var))`. Refuses steps from the
/// wrong state, with repeated data, or producing a negative entry.
pub fn data_step(c: &DataConfig, tmpl: &DataTemplate, binding: &Binding) -> Result<DataConfig> {
    if c.state != tmpl.src {
        return Err(Error::Violation(Violation { index: 0, reason: ViolationReason::StateMismatch }));
    }
    if let Binding::Shared(v) = binding {
        let distinct: BTreeSet<_> = v.iter().collect();
        if distinct.len() != v.len() || v.len() < tmpl.vars {
            return Err(Error::Input("binding needs one distinct datum per variable".into()));
        }
    }
    let mut vec = c.vec.clone();
    for &(d, v, delta) in &tmpl.deltas {
        vec.add(d, binding.datum(d, v), delta)?;
    }
    if vec.entries().any(|(_, v)| v < 0) {
        return Err(Error::Violation(Violation { index: 0, reason: ViolationReason::Negative }));
    }
    Ok(DataConfig::new(tmpl.dst, vec))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_dim_example(symmetry: Symmetry) -> DataInstance {
        let text = format!(
            "datavass 2 symmetry={symmetry}\n\
             states p q r\n\
             init p\n\
             target r (1,0)=3 (1,1)=1 (2,0)=2\n\
             dtrans p q vars 1 : 1 1 +2 ; 2 1 +3\n\
             dtrans q r vars 2 : 1 1 +1 ; 1 2 +1 ; 2 2 -1\n\
             dtrans r q vars 2 : 1 1 -2 ; 2 2 +1\n"
        );
        parse_data_instance(&text).unwrap()
    }

    #[test]
    fn two_dim_example_firing() {
        let inst = two_dim_example(Symmetry::Diagonal);
        let (a, b) = (0, 1);
        let c1 = inst.step(&inst.source, 0, &Binding::Shared(vec![a])).unwrap();
        assert_eq!(c1.state, 1);
        assert_eq!((c1.vec.get(0, a), c1.vec.get(1, a)), (2, 3));
        // u_{ba}: first variable b, second a.
        let c2 = inst.step(&c1, 1, &Binding::Shared(vec![b, a])).unwrap();
        assert_eq!(c2, inst.target);
    }

    #[test]
    fn zero_delta_and_refusals() {
        let inst = two_dim_example(Symmetry::Diagonal);
        let noop = DataTemplate { src: 0, dst: 2, vars: 0, deltas: vec![] };
        let c = data_step(&inst.source, &noop, &Binding::Shared(vec![])).unwrap();
        assert_eq!((c.state, c.vec.is_zero()), (2, true));
        assert!(matches!(inst.step(&inst.source, 1, &Binding::Shared(vec![0, 1])), Err(Error::Violation(_))));
        let c1 = inst.step(&inst.source, 0, &Binding::Shared(vec![0])).unwrap();
        assert!(matches!(inst.step(&c1, 1, &Binding::Shared(vec![4, 4])), Err(Error::Input(_))));
        // (2, 5) is zero, so u_{0,5} would make it negative.
        let refused = inst.step(&c1, 1, &Binding::Shared(vec![0, 5]));
        assert_eq!(refused, Err(Error::Violation(Violation { index: 0, reason: ViolationReason::Negative })));
    }

    #[test]
    fn per_dimension_bindings() {
        let inst = two_dim_example(Symmetry::PerDimension);
        let c1 = inst.step(&inst.source, 0, &Binding::PerDim(vec![vec![0], vec![7]])).unwrap();
        assert_eq!((c1.vec.get(0, 0), c1.vec.get(1, 7)), (2, 3));
        let diag = two_dim_example(Symmetry::Diagonal);
        assert!(diag.step(&diag.source, 0, &Binding::PerDim(vec![vec![0], vec![7]])).is_err());
    }
}
