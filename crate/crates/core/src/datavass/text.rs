//! Text format for data instances.
//!
//! ```text
//! datavass 2 symmetry=per-dimension
//! states p q r
//! init p
//! target r (1,0)=3 (1,1)=1 (2,0)=2
//! dtrans p q vars 1 : 1 1 +2 ; 2 1 +3
//! ```
//!
//! Entries are `(dim,datum)=value` with 1-based dimensions; a template lists
//! `dim var delta` triples with 1-based dimensions and variables.

use std::fmt::Write as _;

use super::{Binding, DataConfig, DataInstance, DataRun, DataTemplate, DataVector, Symmetry};
use crate::error::{Error, Result};
use crate::text::{content_lines, parse_ints};

fn parse_entry(line: usize, word: &str, dims: usize) -> Result<(usize, u64, i64)> {
    let bad = || Error::parse(line, format!("expected (dim,datum)=value, got {word:?}"));
    let (key, value) = word.split_once('=').ok_or_else(bad)?;
    let inner = key.strip_prefix('(').and_then(|k| k.strip_suffix(')')).ok_or_else(bad)?;
    let (d, a) = inner.split_once(',').ok_or_else(bad)?;
    let d: usize = d.trim().parse().map_err(|_| bad())?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let v: i64 = value.trim_start_matches('+').parse().map_err(|_| bad())?;
    if d == 0 || d > dims {
        return Err(Error::parse(line, format!("dimension {d} out of range 1..={dims}")));
    }
    if v < 0 {
        return Err(Error::parse(line, "configuration entries must be nonnegative"));
    }
    Ok((d - 1, a, v))
}

fn parse_config(line: usize, words: &[&str], states: &[String], dims: usize) -> Result<DataConfig> {
    let (name, rest) = words.split_first().ok_or_else(|| Error::parse(line, "missing state"))?;
    let state = states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::parse(line, format!("unknown state {name:?}")))?;
    let mut vec = DataVector::new();
    for w in rest {
        let (d, a, v) = parse_entry(line, w, dims)?;
        if vec.get(d, a) != 0 {
            return Err(Error::parse(line, format!("entry {w:?} given twice")));
        }
        vec.set(d, a, v);
    }
    Ok(DataConfig::new(state, vec))
}

fn parse_template(line: usize, words: &[&str], states: &[String]) -> Result<DataTemplate> {
    let shape = || Error::parse(line, "expected `dtrans <src> <dst> vars <k> : dim var delta ; ...`");
    if words.len() < 5 || words[2] != "vars" || words[4] != ":" {
        return Err(shape());
    }
    let state = |name: &str| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::parse(line, format!("unknown state {name:?}")))
    };
    let src = state(words[0])?;
    let dst = state(words[1])?;
    let vars: usize = words[3].parse().map_err(|_| shape())?;
    let mut deltas = Vec::new();
    for group in words[5..].split(|w| *w == ";") {
        if group.is_empty() {
            continue;
        }
        let nums = parse_ints(line, group)?;
        let [d, v, delta] = nums[..] else {
            return Err(Error::parse(line, "each delta is `dim var delta`"));
        };
        if d < 1 || v < 1 || v as usize > vars {
            return Err(Error::parse(line, format!("variable {v} or dimension {d} out of range")));
        }
        deltas.push((d as usize - 1, v as usize - 1, delta));
    }
    Ok(DataTemplate { src, dst, vars, deltas })
}

pub fn parse_data_instance(text: &str) -> Result<DataInstance> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| Error::parse(0, "empty input"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let (dims, symmetry) = match words[..] {
        ["datavass", d, sym] => {
            let dims: usize = d.parse().map_err(|_| Error::parse(line, format!("bad dimension {d:?}")))?;
            let symmetry = match sym {
                "symmetry=per-dimension" => Symmetry::PerDimension,
                "symmetry=diagonal" => Symmetry::Diagonal,
                other => return Err(Error::parse(line, format!("unknown symmetry {other:?}"))),
            };
            (dims, symmetry)
        }
        _ => return Err(Error::parse(line, "expected header `datavass <dims> symmetry=<kind>`")),
    };
    let mut states: Option<Vec<String>> = None;
    let mut init = None;
    let mut target = None;
    let mut templates = Vec::new();
    for (line, content) in lines {
        let words: Vec<&str> = content.split_whitespace().collect();
        let (kw, rest) = words.split_first().expect("content lines are nonempty");
        match *kw {
            "states" => {
                if states.is_some() {
                    return Err(Error::parse(line, "duplicate `states`"));
                }
                states = Some(rest.iter().map(|s| s.to_string()).collect());
            }
            "init" | "target" | "dtrans" => {
                let Some(st) = &states else {
                    return Err(Error::parse(line, "`states` must come first"));
                };
                match *kw {
                    "init" if init.is_some() => return Err(Error::parse(line, "duplicate `init`")),
                    "target" if target.is_some() => return Err(Error::parse(line, "duplicate `target`")),
                    "init" => init = Some(parse_config(line, rest, st, dims)?),
                    "target" => target = Some(parse_config(line, rest, st, dims)?),
                    _ => templates.push(parse_template(line, rest, st)?),
                }
            }
            other => return Err(Error::parse(line, format!("unknown keyword {other:?}"))),
        }
    }
    let states = states.ok_or_else(|| Error::parse(0, "missing `states`"))?;
    let init = init.ok_or_else(|| Error::parse(0, "missing `init`"))?;
    let target = target.ok_or_else(|| Error::parse(0, "missing `target`"))?;
    DataInstance::new(dims, states, templates, symmetry, init, target)
}

fn write_config(out: &mut String, inst: &DataInstance, c: &DataConfig) {
    out.push_str(&inst.states[c.state]);
    if !c.vec.is_zero() {
        let _ = write!(out, " {}", c.vec);
    }
    out.push('\n');
}

pub fn print_data_instance(inst: &DataInstance) -> String {
    let mut out = format!("datavass {} symmetry={}\n", inst.dims, inst.symmetry);
    out.push_str(&format!("states {}\n", inst.states.join(" ")));
    out.push_str("init ");
    write_config(&mut out, inst, &inst.source);
    out.push_str("target ");
    write_config(&mut out, inst, &inst.target);
    for t in &inst.templates {
        let deltas: Vec<String> = t.deltas.iter().map(|(d, v, x)| format!("{} {} {x:+}", d + 1, v + 1)).collect();
        let _ = writeln!(
            out,
            "dtrans {} {} vars {} : {}",
            inst.states[t.src],
            inst.states[t.dst],
            t.vars,
            deltas.join(" ; ")
        );
    }
    out
}

/// `datarun`, `from <config>`, then `fire <template> : <data>` per step, with
/// per-dimension bindings separated by `/`. Templates are 1-based.
pub fn print_data_run(inst: &DataInstance, run: &DataRun) -> String {
    let mut out = String::from("datarun\nfrom ");
    write_config(&mut out, inst, &run.start);
    for s in &run.steps {
        let data = match &s.binding {
            Binding::Shared(v) => v.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
            Binding::PerDim(rows) => rows
                .iter()
                .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(" / "),
        };
        let _ = writeln!(out, "fire {} : {data}", s.template + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "datavass 2 symmetry=per-dimension\n\
                          states p q r\n\
                          init p\n\
                          target r (1,0)=3 (1,1)=1 (2,0)=2\n\
                          dtrans p q vars 1 : 1 1 +2 ; 2 1 +3\n\
                          dtrans q r vars 2 : 1 1 +1 ; 1 2 +1 ; 2 2 -1\n";

    #[test]
    fn parses_and_round_trips() {
        let inst = parse_data_instance(SAMPLE).unwrap();
        assert_eq!(inst.dims, 2);
        assert_eq!(inst.symmetry, Symmetry::PerDimension);
        assert!(inst.source.vec.is_zero());
        assert_eq!(inst.target.vec.get(0, 0), 3);
        assert_eq!(inst.templates[1].deltas, vec![(0, 0, 1), (0, 1, 1), (1, 1, -1)]);
        assert_eq!(parse_data_instance(&print_data_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_data_instance("datavass 2\nstates p\ninit p\ntarget p\n").is_err());
        assert!(parse_data_instance("datavass 1 symmetry=diagonal\nstates p\ninit p (2,0)=1\ntarget p\n").is_err());
        assert!(parse_data_instance("datavass 1 symmetry=diagonal\nstates p\ninit p\ntarget p\ndtrans p p vars 1 : 1 2 +1\n").is_err());
        assert!(parse_data_instance("datavass 1 symmetry=diagonal\nstates p\ninit p\ntarget p\ndtrans p p vars 1 : 1 1 +1 ; 1 1 -1\n").is_err());
    }
}
