//! Resource limits shared by the search procedures.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Configurations a single exhaustive search may visit.
    pub max_configs: usize,
    /// Group elements or expanded transitions that may be materialised.
    pub max_orbit: usize,
    /// Largest bound an escalating search may try.
    pub max_vector_norm: i64,
    /// Wall-clock budget for one top-level call.
    pub wall_time: Option<Duration>,
    /// Branch-and-bound nodes per integer system.
    pub ilp_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_configs: 2_000_000,
            max_orbit: 100_000,
            max_vector_norm: 1 << 20,
            wall_time: None,
            ilp_nodes: 20_000,
        }
    }
}

impl Limits {
    /// Parses `max-configs=N,max-orbit=N,wall-ms=N` (any subset, any order).
    pub fn parse_overrides(&self, list: &str) -> Result<Limits> {
        let mut out = *self;
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected key=value in limits, got {part:?}")))?;
            let n: u64 = value
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Input(format!("limit {key} must be a positive integer")))?;
            match key {
                "max-configs" => out.max_configs = n as usize,
                "max-orbit" => out.max_orbit = n as usize,
                "max-norm" => out.max_vector_norm = n as i64,
                "wall-ms" => out.wall_time = Some(Duration::from_millis(n)),
                "ilp-nodes" => out.ilp_nodes = n as usize,
                other => return Err(Error::Input(format!("unknown limit {other:?}"))),
            }
        }
        Ok(out)
    }

    pub fn budget(&self) -> Budget {
        Budget { limits: *self, deadline: self.wall_time.map(|d| Instant::now() + d) }
    }
}

/// Limits plus an absolute deadline, fixed when a top-level call starts.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub limits: Limits,
    deadline: Option<Instant>,
}

impl Budget {
    /// The same deadline with a smaller configuration limit.
    pub fn with_max_configs(&self, max_configs: usize) -> Budget {
        Budget { limits: Limits { max_configs, ..self.limits }, deadline: self.deadline }
    }

    pub fn check_time(&self, stage: &str) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::ResourceLimit(format!("wall-time budget exhausted during {stage}"))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        let l = Limits::default().parse_overrides("max-configs=10, wall-ms=5").unwrap();
        assert_eq!(l.max_configs, 10);
        assert_eq!(l.wall_time, Some(Duration::from_millis(5)));
        assert_eq!(l.max_orbit, Limits::default().max_orbit);
        assert!(Limits::default().parse_overrides("max-configs=0").is_err());
        assert!(Limits::default().parse_overrides("speed=3").is_err());
        assert!(Limits::default().parse_overrides("max-configs").is_err());
    }
}
