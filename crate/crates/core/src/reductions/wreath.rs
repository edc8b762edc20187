//! Reductions into and out of wreath products, and the balancing of runs
//! under `S_d wr H`.

use std::collections::{HashMap, VecDeque};

use crate::error::{add, mul, Error, Result};
use crate::limits::Limits;
use crate::perm::{Group, Permutation};
use crate::vass::{Config, Instance, Run, Transition, TransitionSet};

use super::{Builder, ReductionKind, ReductionOutput};

/// Reachability in dimension `(n-1)d` as reachability under `T_n wr G`, where
/// `G` has degree `d`. Block `j` of the output holds block `j` of the source
/// in its first `n-1` coordinates and the marker `j` (0-based) in its last.
/// One source step becomes `d` output steps that update blocks `d-1, ..., 0`
/// in turn; the markers force that order.
pub fn reduce_to_tn_wr_g(inst: &Instance, n: usize, group: &Group, limits: &Limits) -> Result<ReductionOutput> {
    let d = group.degree();
    if n < 2 {
        return Err(Error::Input("block size must be at least 2".into()));
    }
    if inst.dim() != (n - 1) * d {
        return Err(Error::Input(format!(
            "source dimension {} is not (n-1)*d = {}",
            inst.dim(),
            (n - 1) * d
        )));
    }
    let ts = inst.vass.expand(limits.max_orbit)?;
    let embed = |c: &Config| {
        let mut v = vec![0; n * d];
        for j in 0..d {
            v[n * j..n * j + n - 1].copy_from_slice(&c.vec[(n - 1) * j..(n - 1) * (j + 1)]);
            v[n * j + n - 1] = j as i64;
        }
        Config::new(c.state, v)
    };
    let names = inst.vass.states();
    let mut b = Builder::new(names);
    let dd = i64::try_from(d).map_err(|_| Error::overflow())?;
    for (k, t) in ts.all().iter().enumerate() {
        // Effect updating block `kb`.
        let block = |kb: usize| {
            let mut v = vec![0; n * d];
            for j in 0..d {
                v[n * j + n - 1] = if j == kb { 1 - dd } else { 1 };
            }
            v[n * kb..n * kb + n - 1].copy_from_slice(&t.effect[(n - 1) * kb..(n - 1) * (kb + 1)]);
            v
        };
        // aux[i] for i in 1..d is the state after the update of block i.
        let mut aux = vec![t.dst; d];
        for (i, slot) in aux.iter_mut().enumerate().skip(1) {
            *slot = b.fresh(format!("{}~{k}~{i}", names[t.dst]))?;
        }
        let mut seg = Vec::with_capacity(d);
        let mut from = t.src;
        for kb in (0..d).rev() {
            let to = if kb == 0 { t.dst } else { aux[kb] };
            seg.push(Transition::new(from, block(kb), to));
            from = to;
        }
        b.segment(seg, t.clone());
    }
    let embedding = vec![format!(
        "block j (0-based) of size {n}: source coordinates (n-1)j..(n-1)(j+1) then marker j; {d} blocks"
    )];
    let ends = (embed(&inst.source), embed(&inst.target));
    b.finish(ReductionKind::TnWrG, Group::wreath(Group::Trivial(n), group.clone()), inst, ends, d, embedding)
}

/// `8N^3 + 4N^2 + 2N`.
pub fn balance_bound(n: i64) -> Result<i64> {
    let n2 = mul(n, n)?;
    add(add(mul(8, mul(n2, n)?)?, mul(4, n2)?)?, mul(2, n)?)
}

/// `(inner degree, number of blocks)` of `S_d wr H`.
fn symmetric_blocks(g: &Group) -> Result<(usize, usize)> {
    match g {
        Group::Wreath(inner, outer) if matches!(**inner, Group::Symmetric(_)) => Ok((inner.degree(), outer.degree())),
        other => Err(Error::UnsupportedGroup(format!("expected wreath(symmetric(d), H), got {other}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Balanced {
    pub run: Run,
    /// The rank before the first microstage and after each one.
    pub ranks: Vec<u128>,
}

/// Sum over configurations, blocks and pairs within a block of the absolute
/// difference of values.
fn rank(configs: &[Config], g: usize, blocks: usize) -> u128 {
    let mut total = 0u128;
    for c in configs {
        for j in 0..blocks {
            let block = &c.vec[g * j..g * (j + 1)];
            for (x, a) in block.iter().enumerate() {
                for b in &block[x + 1..] {
                    total += (i128::from(*a) - i128::from(*b)).unsigned_abs();
                }
            }
        }
    }
    total
}

/// Rewrites a run from source to target of an `S_d wr H` instance into one
/// whose configurations differ by at most [`balance_bound`]`(N)` within each
/// block, `N` being the maximum of the instance norms.
///
/// A microstage takes a configuration where coordinates `i, i'` of block `j`
/// differ by more than the bound, and the longest infix around it where they
/// differ by at least `4N^2`. Before the configuration it picks `b` steps
/// raising the difference by the same `a`, after it `a` steps lowering it by
/// the same `b`, and swaps `i, i'` in all of them. The rank strictly drops.
pub fn balance_run(inst: &Instance, ts: &TransitionSet, pi: &Run) -> Result<Balanced> {
    let (g, blocks) = symmetric_blocks(inst.vass.group())?;
    if pi.start != inst.source {
        return Err(Error::Precondition("run does not start at the source".into()));
    }
    if ts.validate(pi)? != inst.target {
        return Err(Error::Precondition("run does not end at the target".into()));
    }
    let n = inst.big_s();
    let b0 = mul(4, mul(n, n)?)?;
    let bound = balance_bound(n)?;
    let mut run = pi.clone();
    let mut configs = run.configs()?;
    let mut ranks = vec![rank(&configs, g, blocks)];
    let two_n = usize::try_from(mul(2, n)?).map_err(|_| Error::overflow())?;
    for j in 0..blocks {
        let coord = |i: usize| g * j + i;
        loop {
            // First configuration unbalanced in block j, with its extreme pair.
            let hit = configs.iter().enumerate().find_map(|(pos, c)| {
                let block = &c.vec[g * j..g * (j + 1)];
                let hi = (0..g).max_by_key(|&i| (block[i], std::cmp::Reverse(i)))?;
                let lo = (0..g).min_by_key(|&i| (block[i], i))?;
                (block[hi] - block[lo] > bound).then_some((pos, hi, lo))
            });
            let Some((pos, i, i2)) = hit else { break };
            let diff = |c: &Config| c.vec[coord(i)] - c.vec[coord(i2)];
            let mut start = pos;
            while start > 0 && diff(&configs[start - 1]) >= b0 {
                start -= 1;
            }
            let mut end = pos;
            while end + 1 < configs.len() && diff(&configs[end + 1]) >= b0 {
                end += 1;
            }
            let change = |t: &Transition| t.effect[coord(i)] - t.effect[coord(i2)];
            let mut rising: HashMap<i64, Vec<usize>> = HashMap::new();
            for k in start..pos {
                let c = change(&run.steps[k]);
                if c > 0 {
                    rising.entry(c).or_default().push(k);
                }
            }
            let mut falling: HashMap<i64, Vec<usize>> = HashMap::new();
            for k in pos..end {
                let c = -change(&run.steps[k]);
                if c > 0 {
                    falling.entry(c).or_default().push(k);
                }
            }
            let pick = (1..=two_n as i64)
                .flat_map(|a| (1..=two_n as i64).map(move |b| (a, b)))
                .find(|(a, b)| {
                    rising.get(a).is_some_and(|v| v.len() as i64 >= *b)
                        && falling.get(b).is_some_and(|v| v.len() as i64 >= *a)
                });
            let Some((a, b)) = pick else {
                return Err(Error::Internal(format!(
                    "no matching steps for an unbalanced configuration at position {pos}"
                )));
            };
            let swap = Permutation::transposition(inst.dim(), coord(i), coord(i2));
            let ups = &rising[&a];
            let downs = &falling[&b];
            for &k in ups[ups.len() - b as usize..].iter().chain(&downs[..a as usize]) {
                run.steps[k] = run.steps[k].permuted(&swap);
            }
            configs = run.configs()?;
            let r = rank(&configs, g, blocks);
            if r >= *ranks.last().expect("nonempty") {
                return Err(Error::Internal("balancing rank did not decrease".into()));
            }
            ranks.push(r);
        }
    }
    if ts.validate(&run)? != inst.target {
        return Err(Error::Internal("balanced run does not end at the target".into()));
    }
    Ok(Balanced { run, ranks })
}

/// Offsets of a configuration above its block minima, and the minima.
fn split(c: &Config, g: usize, blocks: usize) -> (Vec<i64>, Vec<i64>) {
    let mut offsets = Vec::with_capacity(g * blocks);
    let mut mins = Vec::with_capacity(blocks);
    for j in 0..blocks {
        let block = &c.vec[g * j..g * (j + 1)];
        let m = block.iter().copied().min().unwrap_or(0);
        mins.push(m);
        offsets.extend(block.iter().map(|x| x - m));
    }
    (offsets, mins)
}

fn offset_name(state: &str, offsets: &[i64], g: usize) -> String {
    let blocks: Vec<String> = offsets
        .chunks(g.max(1))
        .map(|b| b.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect();
    format!("{state}[{}]", blocks.join(";"))
}

/// Reachability under `S_d wr T_n` as plain reachability in dimension `n`.
/// Coordinate `j` of the output holds the minimum of block `j`; states carry
/// the offsets of every coordinate above its block minimum, each at most `B`.
/// `B` defaults to [`balance_bound`] of the instance norm. Only control
/// states reachable from the source are built.
pub fn reduce_sd_wr_tn(inst: &Instance, bound: Option<i64>, limits: &Limits) -> Result<ReductionOutput> {
    let (g, blocks) = symmetric_blocks(inst.vass.group())?;
    if !matches!(inst.vass.group(), Group::Wreath(_, outer) if matches!(**outer, Group::Trivial(_))) {
        return Err(Error::UnsupportedGroup(format!("expected wreath(symmetric(d), trivial(n)), got {}", inst.vass.group())));
    }
    let big_b = match bound {
        Some(b) => b,
        None => balance_bound(inst.big_s())?,
    };
    let ts = inst.vass.expand(limits.max_orbit)?;
    let names = inst.vass.states();
    let (s_off, s_min) = split(&inst.source, g, blocks);
    let (t_off, t_min) = split(&inst.target, g, blocks);
    for (label, off) in [("source", &s_off), ("target", &t_off)] {
        if off.iter().any(|&x| x > big_b) {
            return Err(Error::Input(format!("{label} configuration is not {big_b}-balanced")));
        }
    }
    let mut b = Builder::new(&[]);
    let mut seen: HashMap<(usize, Vec<i64>), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |b: &mut Builder, q: usize, off: Vec<i64>, queue: &mut VecDeque<(usize, Vec<i64>)>| {
        *seen.entry((q, off.clone())).or_insert_with(|| {
            queue.push_back((q, off.clone()));
            b.state(&offset_name(&names[q], &off, g))
        })
    };
    let s_id = intern(&mut b, inst.source.state, s_off, &mut queue);
    let mut transitions = 0usize;
    while let Some((p, off)) = queue.pop_front() {
        let from = intern(&mut b, p, off.clone(), &mut VecDeque::new());
        for t in ts.from_state(p) {
            let mut next = Vec::with_capacity(g * blocks);
            let mut effect = Vec::with_capacity(blocks);
            for j in 0..blocks {
                let raw: Vec<i64> = (0..g).map(|i| off[g * j + i] + t.effect[g * j + i]).collect();
                let m = raw.iter().copied().min().unwrap_or(0);
                effect.push(m);
                next.extend(raw.iter().map(|x| x - m));
            }
            if next.iter().any(|&x| x > big_b) {
                continue;
            }
            let to = intern(&mut b, t.dst, next, &mut queue);
            b.segment(vec![Transition::new(from, effect, to)], t.clone());
            transitions += 1;
            if transitions > limits.max_configs || b.num_states() > limits.max_configs {
                return Err(Error::ResourceLimit(format!(
                    "balanced-offset reduction exceeds {} states or transitions",
                    limits.max_configs
                )));
            }
        }
    }
    let t_id = intern(&mut b, inst.target.state, t_off, &mut queue);
    let embedding = vec![
        format!("q(w) -> (q, offsets)(block minima) with {blocks} blocks of size {g}, offsets at most B={big_b}"),
        "state name q[o;...] lists offsets block by block".to_string(),
    ];
    let ends = (Config::new(s_id, s_min), Config::new(t_id, t_min));
    b.finish(ReductionKind::SdWrTn, Group::Trivial(blocks), inst, ends, 1, embedding)
}
