use crate::error::{add_vec, Error, Result, Violation, ViolationReason};
use crate::perm::Permutation;

use super::{Config, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunMode {
    /// Every intermediate vector must be nonnegative.
    Nonneg,
    /// Vectors may go negative.
    Integer,
}

/// A start configuration and a sequence of transitions fired from it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Run {
    pub start: Config,
    pub steps: Vec<Transition>,
    pub mode: RunMode,
}

impl Run {
    pub fn new(start: Config, steps: Vec<Transition>, mode: RunMode) -> Self {
        Run { start, steps, mode }
    }

    pub fn empty(start: Config, mode: RunMode) -> Self {
        Run { start, steps: Vec::new(), mode }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn with_mode(mut self, mode: RunMode) -> Self {
        self.mode = mode;
        self
    }

    /// Sum of the step effects.
    pub fn effect(&self) -> Result<Vec<i64>> {
        let mut acc = vec![0; self.start.vec.len()];
        for t in &self.steps {
            acc = add_vec(&acc, &t.effect)?;
        }
        Ok(acc)
    }

    /// Replays the run, checking chaining, dimensions, membership via
    /// `is_transition` and (in nonnegative mode) nonnegativity.
    pub fn replay(&self, mut is_transition: impl FnMut(&Transition) -> bool) -> Result<Config> {
        let d = self.start.vec.len();
        let violation = |index, reason| Error::Violation(Violation { index, reason });
        if self.mode == RunMode::Nonneg && !self.start.is_nonneg() {
            return Err(violation(0, ViolationReason::Negative));
        }
        let mut cur = self.start.clone();
        for (index, t) in self.steps.iter().enumerate() {
            if t.effect.len() != d {
                return Err(violation(index, ViolationReason::Dimension));
            }
            if t.src != cur.state {
                return Err(violation(index, ViolationReason::StateMismatch));
            }
            if !is_transition(t) {
                return Err(violation(index, ViolationReason::NotATransition));
            }
            cur.vec = add_vec(&cur.vec, &t.effect)?;
            cur.state = t.dst;
            if self.mode == RunMode::Nonneg && !cur.is_nonneg() {
                return Err(violation(index, ViolationReason::Negative));
            }
        }
        Ok(cur)
    }

    /// Final configuration, ignoring membership and sign constraints.
    pub fn end(&self) -> Result<Config> {
        let mut cur = self.start.clone();
        for t in &self.steps {
            cur.vec = add_vec(&cur.vec, &t.effect)?;
            cur.state = t.dst;
        }
        Ok(cur)
    }

    /// All configurations visited, including the start and end.
    pub fn configs(&self) -> Result<Vec<Config>> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut cur = self.start.clone();
        out.push(cur.clone());
        for t in &self.steps {
            cur.vec = add_vec(&cur.vec, &t.effect)?;
            cur.state = t.dst;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// `self` followed by `other`, with `other` shifted to start where `self`
    /// ends. In nonnegative mode the shifted part must stay nonnegative.
    pub fn concat(&self, other: &Run) -> Result<Run> {
        let end = self.end()?;
        if end.state != other.start.state {
            return Err(Error::Precondition(format!(
                "cannot concatenate: run ends in state {} but next run starts in state {}",
                end.state, other.start.state
            )));
        }
        if self.mode == RunMode::Nonneg {
            let mut cur = end.vec.clone();
            for (k, t) in other.steps.iter().enumerate() {
                cur = add_vec(&cur, &t.effect)?;
                if cur.iter().any(|&x| x < 0) {
                    return Err(Error::Violation(Violation {
                        index: self.len() + k,
                        reason: ViolationReason::Negative,
                    }));
                }
            }
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Ok(Run { start: self.start.clone(), steps, mode: self.mode })
    }

    /// The `n`-fold concatenation of a cycle (a run ending in its start state).
    pub fn repeat(&self, n: usize) -> Result<Run> {
        let end = self.end()?;
        if end.state != self.start.state && n > 1 {
            return Err(Error::Precondition("only cycles can be repeated".into()));
        }
        let total = self.steps.len().checked_mul(n).ok_or_else(Error::overflow)?;
        let mut steps = Vec::with_capacity(total);
        for _ in 0..n {
            steps.extend(self.steps.iter().cloned());
        }
        Ok(Run { start: self.start.clone(), steps, mode: self.mode })
    }

    /// The same run read backwards in the reversed VASS.
    pub fn reversed(&self) -> Result<Run> {
        let end = self.end()?;
        let steps = self.steps.iter().rev().map(Transition::reversed).collect();
        Ok(Run { start: end, steps, mode: self.mode })
    }

    /// Every configuration and step moved by `p`.
    pub fn permuted(&self, p: &Permutation) -> Run {
        Run {
            start: Config::new(self.start.state, p.apply_unchecked(&self.start.vec)),
            steps: self.steps.iter().map(|t| t.permuted(p)).collect(),
            mode: self.mode,
        }
    }

    /// The first `k` steps.
    pub fn prefix(&self, k: usize) -> Run {
        Run { start: self.start.clone(), steps: self.steps[..k].to_vec(), mode: self.mode }
    }
}
