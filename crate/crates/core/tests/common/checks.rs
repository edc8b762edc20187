//! Differential checks of the reductions: verdicts on both sides come from
//! the brute-force oracle, witnesses from the library search, and every
//! back-translated witness is replayed on the source.

use rand::Rng;
use symvass::datavass::{
    data_oracle, reduce_counting, DataAnswer, DataConfig, DataInstance, DataTemplate, DataVector, Symmetry,
};
use symvass::explore::escalating_oracle;
use symvass::gen::{random_instance, Shape};
use symvass::reductions::{reduce_bounded_1vass, reduce_sd_wr_tn, reduce_to_cyclic, reduce_to_tn_wr_g, ReductionOutput};
use symvass::{Group, Instance, Limits, Run};

use super::{bounded_search, expand, oracle, Bounded};

/// Outcome counts of one suite.
#[derive(Debug, Default, Clone, Copy)]
pub struct Tally {
    pub cases: usize,
    /// Cases where both verdicts were conclusive and compared.
    pub compared: usize,
    /// Back-translated witnesses replayed on the source.
    pub witnesses: usize,
}

impl Tally {
    fn add(&mut self, compared: bool, witness: bool) {
        self.cases += 1;
        self.compared += usize::from(compared);
        self.witnesses += usize::from(witness);
    }
}

const MAX_BOUND: i64 = 64;
const MAX_CONFIGS: usize = 100_000;

fn limits() -> Limits {
    Limits { max_configs: MAX_CONFIGS, ..Limits::default() }
}

/// Replays `run` on the source after back-translation.
fn replay_back(out: &ReductionOutput, run: &Run) -> Result<(), String> {
    let back = out.back_translate(run).map_err(|e| format!("back-translation failed: {e}"))?;
    let src = out.source();
    let end = src.vass.expand(100_000).unwrap().validate(&back).map_err(|e| format!("source replay failed: {e}"))?;
    if end != src.target {
        return Err(format!("back-translated run ends at {end:?}"));
    }
    Ok(())
}

/// Compares verdicts on source and output, and back-translates an output
/// witness when the output is reachable. Returns (compared, witness).
fn compare(source_verdict: Option<bool>, out: &ReductionOutput) -> Result<(bool, bool), String> {
    let out_verdict = oracle(&out.instance, MAX_BOUND, MAX_CONFIGS);
    let compared = match (source_verdict, out_verdict) {
        (Some(a), Some(b)) if a != b => return Err(format!("source says {a}, output says {b}")),
        (Some(_), Some(_)) => true,
        _ => false,
    };
    if out_verdict != Some(true) {
        return Ok((compared, false));
    }
    let ts = out.instance.vass.expand(100_000).unwrap();
    let Ok(found) = escalating_oracle(&out.instance, &ts, &limits().budget()) else { return Ok((compared, false)) };
    let run = found.witness.ok_or("library search misses a reachable output target")?;
    replay_back(out, &run)?;
    Ok((compared, true))
}

fn plain_shape(d: usize, norm: i64) -> Shape {
    Shape { group: Group::Trivial(d), max_states: 3, max_reps: 3, max_norm: norm }
}

pub fn bounded1(rng: &mut impl Rng, count: usize) -> Result<Tally, String> {
    let groups = [Group::Symmetric(2), Group::Symmetric(3), Group::Cyclic(3), Group::Alternating(3)];
    let mut tally = Tally::default();
    while tally.cases < count {
        let m = rng.random_range(2..=3);
        let inst = random_instance(rng, &plain_shape(1, 2));
        if inst.source.vec[0] > m || inst.target.vec[0] > m {
            continue;
        }
        if inst.vass.reps().iter().any(|t| t.effect[0] == 0 || t.effect[0].abs() > m) {
            continue;
        }
        let group = &groups[rng.random_range(0..groups.len())];
        let out = reduce_bounded_1vass(&inst, m, group, &limits()).map_err(|e| e.to_string())?;
        // Bounded reachability is decided exactly by the search capped at `m`.
        let source = match bounded_search(&expand(&inst), &inst.source, &inst.target, m, MAX_CONFIGS) {
            Some(Bounded::Found) => Some(true),
            Some(_) => Some(false),
            None => None,
        };
        let (c, w) = compare(source, &out).map_err(|e| format!("bounded1 M={m} {group}: {e}\n{inst:?}"))?;
        tally.add(c, w);
    }
    Ok(tally)
}

pub fn tn_wr_g(rng: &mut impl Rng, count: usize) -> Result<Tally, String> {
    let groups = [Group::Symmetric(2), Group::Cyclic(2), Group::Trivial(1), Group::Cyclic(3)];
    let mut tally = Tally::default();
    while tally.cases < count {
        let group = &groups[rng.random_range(0..groups.len())];
        let inst = random_instance(rng, &plain_shape(group.degree(), 2));
        let out = reduce_to_tn_wr_g(&inst, 2, group, &limits()).map_err(|e| e.to_string())?;
        if out.instance.dim() != 2 * group.degree() {
            return Err(format!("tn-wr-g degree {} for d={}", out.instance.dim(), group.degree()));
        }
        let source = oracle(&inst, MAX_BOUND, MAX_CONFIGS);
        let (c, w) = compare(source, &out).map_err(|e| format!("tn-wr-g {group}: {e}\n{inst:?}"))?;
        tally.add(c, w);
    }
    Ok(tally)
}

pub fn sd_wr_tn(rng: &mut impl Rng, count: usize) -> Result<Tally, String> {
    let mut tally = Tally::default();
    while tally.cases < count {
        let blocks = rng.random_range(1..=2);
        let group = Group::wreath(Group::Symmetric(2), Group::Trivial(blocks));
        let shape = Shape { group, max_states: 2, max_reps: 3, max_norm: 1 };
        let inst = random_instance(rng, &shape);
        let out = reduce_sd_wr_tn(&inst, None, &limits()).map_err(|e| e.to_string())?;
        let source = oracle(&inst, MAX_BOUND, MAX_CONFIGS);
        let (c, w) = compare(source, &out).map_err(|e| format!("sd-wr-tn: {e}\n{inst:?}"))?;
        tally.add(c, w);
    }
    Ok(tally)
}

pub fn cyclic(rng: &mut impl Rng, count: usize) -> Result<Tally, String> {
    let mut tally = Tally::default();
    while tally.cases < count {
        let n = rng.random_range(1..=2);
        let inst = random_instance(rng, &plain_shape(n, 2));
        let out = reduce_to_cyclic(&inst, &limits()).map_err(|e| e.to_string())?;
        if out.instance.vass.group() != &Group::Cyclic(2 * n + 8) {
            return Err(format!("cyclic output group {}", out.instance.vass.group()));
        }
        let source = oracle(&inst, MAX_BOUND, MAX_CONFIGS);
        let (c, w) = compare(source, &out).map_err(|e| format!("cyclic: {e}\n{inst:?}"))?;
        tally.add(c, w);
    }
    Ok(tally)
}

/// A per-dimension data instance with zero source and target.
pub fn random_counting_source(rng: &mut impl Rng) -> DataInstance {
    let dims = rng.random_range(1..=2);
    let n = rng.random_range(1..=2);
    let k = rng.random_range(1..=3);
    let templates = (0..k)
        .map(|_| {
            let vars = rng.random_range(1..=2);
            let mut deltas = Vec::new();
            for d in 0..dims {
                for v in 0..vars {
                    let x = rng.random_range(-1..=1);
                    if x != 0 {
                        deltas.push((d, v, x));
                    }
                }
            }
            DataTemplate { src: rng.random_range(0..n), dst: rng.random_range(0..n), vars, deltas }
        })
        .collect();
    let names = (0..n).map(|i| format!("p{i}")).collect();
    let s = DataConfig::new(0, DataVector::new());
    let t = DataConfig::new(rng.random_range(0..n), DataVector::new());
    DataInstance::new(dims, names, templates, Symmetry::PerDimension, s, t).unwrap()
}

/// Counting with a forced small bound `B`: the output verdict is compared
/// with the data search at entry bound `B`, which is conclusive when it
/// finds a run. Output witnesses are translated to data runs and replayed.
pub fn counting(rng: &mut impl Rng, count: usize) -> Result<Tally, String> {
    let mut tally = Tally::default();
    while tally.cases < count {
        let inst = random_counting_source(rng);
        let big_b = 2;
        let out = reduce_counting(&inst, Some(big_b), &limits()).map_err(|e| e.to_string())?;
        let out_verdict = oracle(&out.instance, MAX_BOUND, MAX_CONFIGS);
        let data = data_oracle(&inst, big_b, 4, &limits()).map_err(|e| e.to_string())?;
        let data_found = matches!(data, DataAnswer::Reachable(_));
        if data_found && out_verdict == Some(false) {
            return Err(format!("counting says unreachable, data search found a run\n{inst:?}"));
        }
        let mut witness = false;
        if out_verdict == Some(true) {
            let ts = out.instance.vass.expand(100_000).unwrap();
            if let Ok(found) = escalating_oracle(&out.instance, &ts, &limits().budget()) {
                let run = found.witness.ok_or("library search misses a reachable counting target")?;
                let back = out.back_translate(&run).map_err(|e| format!("counting back-translation: {e}\n{inst:?}"))?;
                let mut cur = inst.source.clone();
                for step in &back.steps {
                    cur = inst.step(&cur, step.template, &step.binding).map_err(|e| format!("replay: {e}"))?;
                    if cur.vec.norm() > big_b {
                        return Err(format!("translated run leaves the bound {big_b}\n{inst:?}"));
                    }
                }
                if cur != inst.target {
                    return Err(format!("translated run ends at {cur:?}\n{inst:?}"));
                }
                witness = true;
            }
        }
        tally.add(out_verdict.is_some() && (data_found || out_verdict == Some(false)), witness);
    }
    Ok(tally)
}

/// Source instances for the balancing checks: `S_2 wr T_n` runs.
pub fn wreath_instance(rng: &mut impl Rng, blocks: usize) -> Instance {
    let group = Group::wreath(Group::Symmetric(2), Group::Trivial(blocks));
    random_instance(rng, &Shape { group, max_states: 2, max_reps: 3, max_norm: 2 })
}
