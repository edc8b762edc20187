//! Line-oriented text formats for instances and runs.
//!
//! ```text
//! vass
//! group symmetric(2)
//! states q p
//! init q 0 0
//! target p 3 1
//! trans q p : 1 -1
//! ```
//!
//! Runs:
//!
//! ```text
//! run
//! from q 0 0
//! step q p : 1 -1
//! ```
//!
//! `run integer` marks a run whose vectors may go negative. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::perm::Group;
use crate::vass::{Config, Instance, Run, RunMode, StateId, Transition, Vass};

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub(crate) fn parse_ints(line: usize, words: &[&str]) -> Result<Vec<i64>> {
    words
        .iter()
        .map(|w| w.trim_start_matches('+').parse::<i64>().map_err(|_| Error::parse(line, format!("bad integer {w:?}"))))
        .collect()
}

fn lookup(vass_states: &[String], line: usize, name: &str) -> Result<StateId> {
    vass_states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::parse(line, format!("unknown state {name:?}")))
}

fn parse_config(states: &[String], dim: usize, line: usize, words: &[&str]) -> Result<Config> {
    let (name, rest) = words.split_first().ok_or_else(|| Error::parse(line, "missing state"))?;
    let state = lookup(states, line, name)?;
    let vec = parse_ints(line, rest)?;
    if vec.len() != dim {
        return Err(Error::parse(line, format!("expected {dim} integers, got {}", vec.len())));
    }
    Ok(Config::new(state, vec))
}

fn parse_step(states: &[String], dim: usize, line: usize, words: &[&str]) -> Result<Transition> {
    if words.len() < 3 || words[2] != ":" {
        return Err(Error::parse(line, "expected `<src> <dst> : <ints>`"));
    }
    let src = lookup(states, line, words[0])?;
    let dst = lookup(states, line, words[1])?;
    let effect = parse_ints(line, &words[3..])?;
    if effect.len() != dim {
        return Err(Error::parse(line, format!("expected {dim} integers, got {}", effect.len())));
    }
    Ok(Transition::new(src, effect, dst))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "vass")) => {}
        Some((line, _)) => return Err(Error::parse(line, "expected header `vass`")),
        None => return Err(Error::parse(0, "empty input")),
    }
    let mut group: Option<Group> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init = None;
    let mut target = None;
    let mut reps = Vec::new();
    for (line, content) in lines {
        let words: Vec<&str> = content.split_whitespace().collect();
        let (kw, rest) = words.split_first().expect("content lines are nonempty");
        match *kw {
            "group" => {
                if group.is_some() {
                    return Err(Error::parse(line, "duplicate `group`"));
                }
                let g = content["group".len()..]
                    .parse::<Group>()
                    .map_err(|e| Error::parse(line, e.to_string()))?;
                group = Some(g);
            }
            "states" => {
                if states.is_some() {
                    return Err(Error::parse(line, "duplicate `states`"));
                }
                if rest.is_empty() {
                    return Err(Error::parse(line, "no states listed"));
                }
                let names: Vec<String> = rest.iter().map(|s| s.to_string()).collect();
                for (i, n) in names.iter().enumerate() {
                    if names[..i].contains(n) {
                        return Err(Error::parse(line, format!("duplicate state {n:?}")));
                    }
                }
                states = Some(names);
            }
            "init" | "target" | "trans" => {
                let (Some(g), Some(st)) = (&group, &states) else {
                    return Err(Error::parse(line, "`group` and `states` must come first"));
                };
                let d = g.degree();
                match *kw {
                    "init" if init.is_some() => return Err(Error::parse(line, "duplicate `init`")),
                    "target" if target.is_some() => return Err(Error::parse(line, "duplicate `target`")),
                    "init" => init = Some((line, parse_config(st, d, line, rest)?)),
                    "target" => target = Some((line, parse_config(st, d, line, rest)?)),
                    _ => reps.push(parse_step(st, d, line, rest)?),
                }
            }
            other => return Err(Error::parse(line, format!("unknown keyword {other:?}"))),
        }
    }
    let group = group.ok_or_else(|| Error::parse(0, "missing `group`"))?;
    let states = states.ok_or_else(|| Error::parse(0, "missing `states`"))?;
    let (init_line, init) = init.ok_or_else(|| Error::parse(0, "missing `init`"))?;
    let (target_line, target) = target.ok_or_else(|| Error::parse(0, "missing `target`"))?;
    for (line, c) in [(init_line, &init), (target_line, &target)] {
        if !c.is_nonneg() {
            return Err(Error::parse(line, "configuration vectors must be nonnegative"));
        }
    }
    let vass = Vass::new(states, group, reps)?;
    Instance::new(vass, init, target)
}

fn write_ints(out: &mut String, v: &[i64]) {
    for x in v {
        let _ = write!(out, " {x}");
    }
}

pub fn print_instance(inst: &Instance) -> String {
    let v = &inst.vass;
    let mut out = String::from("vass\n");
    let _ = writeln!(out, "group {}", v.group());
    let _ = writeln!(out, "states {}", v.states().join(" "));
    let _ = write!(out, "init {}", v.state_name(inst.source.state));
    write_ints(&mut out, &inst.source.vec);
    let _ = write!(out, "\ntarget {}", v.state_name(inst.target.state));
    write_ints(&mut out, &inst.target.vec);
    out.push('\n');
    for t in v.reps() {
        let _ = write!(out, "trans {} {} :", v.state_name(t.src), v.state_name(t.dst));
        write_ints(&mut out, &t.effect);
        out.push('\n');
    }
    out
}

/// Parses a run whose state names refer to `vass`.
pub fn parse_run(text: &str, vass: &Vass) -> Result<Run> {
    let mut lines = content_lines(text);
    let mode = match lines.next() {
        Some((_, "run")) => RunMode::Nonneg,
        Some((_, "run integer")) => RunMode::Integer,
        Some((line, _)) => return Err(Error::parse(line, "expected header `run` or `run integer`")),
        None => return Err(Error::parse(0, "empty input")),
    };
    let d = vass.dim();
    let mut start = None;
    let mut steps = Vec::new();
    for (line, content) in lines {
        let words: Vec<&str> = content.split_whitespace().collect();
        let (kw, rest) = words.split_first().expect("content lines are nonempty");
        match *kw {
            "from" if start.is_some() => return Err(Error::parse(line, "duplicate `from`")),
            "from" => start = Some(parse_config(vass.states(), d, line, rest)?),
            "step" if start.is_none() => return Err(Error::parse(line, "`from` must come first")),
            "step" => steps.push(parse_step(vass.states(), d, line, rest)?),
            other => return Err(Error::parse(line, format!("unknown keyword {other:?}"))),
        }
    }
    let start = start.ok_or_else(|| Error::parse(0, "missing `from`"))?;
    Ok(Run::new(start, steps, mode))
}

pub fn print_run(run: &Run, vass: &Vass) -> String {
    let mut out = String::from(match run.mode {
        RunMode::Nonneg => "run\n",
        RunMode::Integer => "run integer\n",
    });
    let _ = write!(out, "from {}", vass.state_name(run.start.state));
    write_ints(&mut out, &run.start.vec);
    out.push('\n');
    for t in &run.steps {
        let _ = write!(out, "step {} {} :", vass.state_name(t.src), vass.state_name(t.dst));
        write_ints(&mut out, &t.effect);
        out.push('\n');
    }
    out
}
