//! Compilers from one reachability instance to another, each paired with a
//! back-translation that turns a witness of the output into a witness of the
//! source.
//!
//! Every compiler embeds source configurations into output configurations and
//! simulates one source step by a fixed-length segment of output steps. The
//! back-translation cuts an output run into such segments and looks each one
//! up.

mod bounded;
mod cyclic;
mod wreath;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use bounded::reduce_bounded_1vass;
pub use cyclic::reduce_to_cyclic;
pub use wreath::{balance_bound, balance_run, reduce_sd_wr_tn, reduce_to_tn_wr_g, Balanced};

use crate::error::{Error, Result};
use crate::vass::{Config, Instance, Run, RunMode, Transition, Vass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Bounded1,
    TnWrG,
    SdWrTn,
    Cyclic,
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::Bounded1 => "bounded1",
            ReductionKind::TnWrG => "tn-wr-g",
            ReductionKind::SdWrTn => "sd-wr-tn",
            ReductionKind::Cyclic => "cyclic",
        })
    }
}

impl FromStr for ReductionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bounded1" => Ok(ReductionKind::Bounded1),
            "tn-wr-g" => Ok(ReductionKind::TnWrG),
            "sd-wr-tn" => Ok(ReductionKind::SdWrTn),
            "cyclic" => Ok(ReductionKind::Cyclic),
            other => Err(Error::Input(format!("unknown reduction kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub kind: ReductionKind,
    pub instance: Instance,
    /// One line per fact about the configuration embedding.
    pub embedding: Vec<String>,
    source: Instance,
    segment: usize,
    table: HashMap<Vec<Transition>, Transition>,
}

impl ReductionOutput {
    /// Output steps simulating one source step.
    pub fn segment_len(&self) -> usize {
        self.segment
    }

    /// The mapping sidecar: kind, embedding rule, and the images of source
    /// and target.
    pub fn mapping_text(&self) -> String {
        let mut out = format!("reduction {}\n", self.kind);
        for line in &self.embedding {
            out.push_str(&format!("embedding {line}\n"));
        }
        out.push_str(&format!("segment {}\n", self.segment));
        for (label, from, to) in [
            ("source", &self.source.source, &self.instance.source),
            ("target", &self.source.target, &self.instance.target),
        ] {
            out.push_str(&format!(
                "{label} {} -> {}\n",
                show_config(&self.source.vass, from),
                show_config(&self.instance.vass, to)
            ));
        }
        out
    }

    /// Maps a run of the output instance from its source back to a run of the
    /// source instance. Fails if the run does not split into simulation
    /// segments.
    pub fn back_translate(&self, run: &Run) -> Result<Run> {
        if run.start != self.instance.source {
            return Err(Error::Input("run does not start at the output source".into()));
        }
        if !run.steps.len().is_multiple_of(self.segment) {
            return Err(Error::Input(format!(
                "run of length {} does not split into segments of length {}",
                run.steps.len(),
                self.segment
            )));
        }
        let steps = run
            .steps
            .chunks(self.segment)
            .enumerate()
            .map(|(k, seg)| {
                self.table
                    .get(seg)
                    .cloned()
                    .ok_or_else(|| Error::Input(format!("segment {k} does not simulate a source transition")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Run::new(self.source.source.clone(), steps, RunMode::Nonneg))
    }

    pub fn source(&self) -> &Instance {
        &self.source
    }
}

pub(crate) fn show_config(vass: &Vass, c: &Config) -> String {
    let mut s = vass.state_name(c.state).to_string();
    for x in &c.vec {
        s.push_str(&format!(" {x}"));
    }
    s
}

/// Collects output states and representatives under fresh names.
pub(crate) struct Builder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    reps: Vec<Transition>,
    table: HashMap<Vec<Transition>, Transition>,
}

impl Builder {
    pub(crate) fn new(base: &[String]) -> Self {
        let mut b = Builder { names: Vec::new(), index: HashMap::new(), reps: Vec::new(), table: HashMap::new() };
        for name in base {
            b.state(name);
        }
        b
    }

    /// Id of `name`, interning it if new.
    pub(crate) fn state(&mut self, name: &str) -> usize {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub(crate) fn fresh(&mut self, name: String) -> Result<usize> {
        if self.index.contains_key(&name) {
            return Err(Error::Input(format!("auxiliary state name {name:?} clashes with an existing state")));
        }
        Ok(self.state(&name))
    }

    pub(crate) fn num_states(&self) -> usize {
        self.names.len()
    }

    /// Adds the segment as representatives and records its source step.
    pub(crate) fn segment(&mut self, steps: Vec<Transition>, source: Transition) {
        self.reps.extend(steps.iter().cloned());
        self.table.insert(steps, source);
    }

    pub(crate) fn finish(
        self,
        kind: ReductionKind,
        group: crate::perm::Group,
        source: &Instance,
        (out_source, out_target): (Config, Config),
        segment: usize,
        embedding: Vec<String>,
    ) -> Result<ReductionOutput> {
        let mut reps = self.reps;
        reps.sort();
        reps.dedup();
        let vass = Vass::new(self.names, group, reps)?;
        let instance = Instance::new(vass, out_source, out_target)?;
        Ok(ReductionOutput { kind, instance, embedding, source: source.clone(), segment, table: self.table })
    }
}
