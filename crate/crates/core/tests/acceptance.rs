mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symvass::datavass::{certify_unreachable, data_oracle, parse_data_instance, DataAnswer};
use symvass::fairness::{find_backward_pump, find_forward_pump, lift_zrun, FairnessPolicy, PumpPair};
use symvass::gen::{random_instance, random_vector, Shape};
use symvass::reductions::{balance_bound, balance_run, reduce_sd_wr_tn, reduce_to_cyclic, reduce_to_tn_wr_g};
use symvass::solver::{solve, Answer};
use symvass::zreach::{intcone_member, zreachable, ZLimits, ZReach};
use symvass::{Config, Group, Instance, Limits, Run, RunMode, Transition, TransitionSet, Vass};

use common::checks;

type Outcome = Result<String, String>;
type Suite = fn(&mut ChaCha8Rng, usize) -> Result<checks::Tally, String>;
type Criterion = (&'static str, fn() -> Outcome);

const TWO_DIM_REACH: &str = "datavass 2 symmetry=diagonal\n\
                          states p q r\n\
                          init p\n\
                          target r (1,0)=3 (1,1)=1 (2,0)=2\n\
                          dtrans p q vars 1 : 1 1 +2 ; 2 1 +3\n\
                          dtrans q r vars 2 : 1 1 +1 ; 1 2 +1 ; 2 2 -1\n\
                          dtrans r q vars 2 : 1 1 -2 ; 2 2 +1\n";

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:.2?}, limit {limit:?}"));
    }
    Ok(took)
}

fn expand(inst: &Instance) -> TransitionSet {
    inst.vass.expand(100_000).expect("small groups expand")
}

fn two_dimensional_example() -> Outcome {
    let start = Instant::now();
    let reach = parse_data_instance(TWO_DIM_REACH).map_err(|e| e.to_string())?;
    let run = match data_oracle(&reach, 3, 2, &Limits::default()).map_err(|e| e.to_string())? {
        DataAnswer::Reachable(run) => run,
        other => return Err(format!("r(x) not found: {other:?}")),
    };
    if run.steps.len() != 2 {
        return Err(format!("witness has {} steps", run.steps.len()));
    }
    if reach.replay(&run).map_err(|e| e.to_string())? != reach.target {
        return Err("witness does not end at the target".into());
    }
    let q_text = TWO_DIM_REACH.replace("target r (1,0)=3 (1,1)=1 (2,0)=2", "target q (1,1)=1 (2,0)=3");
    let unreach = parse_data_instance(&q_text).map_err(|e| e.to_string())?;
    let inv = certify_unreachable(&unreach).ok_or("q(y) has no certificate")?;
    if let DataAnswer::Reachable(_) = data_oracle(&unreach, 4, 2, &Limits::default()).map_err(|e| e.to_string())? {
        return Err("certified target was reached".into());
    }
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("2-step witness; q(y) refuted by the dimension {} sum; {took:.2?}", inv.dim + 1))
}

fn solver_against_oracle() -> Outcome {
    let start = Instant::now();
    let limits = Limits::default();
    let mut summary = Vec::new();
    for (group, seed) in [(Group::Symmetric(2), 101), (Group::Symmetric(3), 102), (Group::Alternating(3), 103)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = Shape::new(group.clone());
        let (mut compared, mut witnesses) = (0, 0);
        for k in 0..500 {
            let inst = random_instance(&mut rng, &shape);
            let verdict = solve(&inst, &limits).map_err(|e| format!("{group} #{k}: {e}"))?;
            let expected = common::oracle(&inst, 64, 200_000);
            let got = match &verdict.answer {
                Answer::Reachable(run) => {
                    let end = expand(&inst).validate(run).map_err(|e| format!("{group} #{k}: witness {e}"))?;
                    if end != inst.target || run.start != inst.source || run.mode != RunMode::Nonneg {
                        return Err(format!("{group} #{k}: witness ends at {end:?}"));
                    }
                    witnesses += 1;
                    Some(true)
                }
                Answer::Unreachable => Some(false),
                Answer::ResourceLimit(_) => None,
            };
            match (expected, got) {
                (Some(a), Some(b)) if a != b => return Err(format!("{group} #{k}: oracle {a}, solver {b}\n{inst:?}")),
                (Some(_), None) => return Err(format!("{group} #{k}: solver hit a limit where the oracle closed")),
                (Some(_), Some(_)) => compared += 1,
                _ => {}
            }
        }
        summary.push(format!("{group}: 500 run, {compared} compared, {witnesses} witnesses"));
    }
    let took = within(start, Duration::from_secs(600))?;
    Ok(format!("{}; {took:.1?}", summary.join("; ")))
}

const K: usize = 6;

fn zreach_against_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let groups = [
        Group::Trivial(1),
        Group::Trivial(2),
        Group::Symmetric(2),
        Group::Symmetric(3),
        Group::Alternating(3),
        Group::Cyclic(3),
        Group::Trivial(3),
    ];
    let mut yes = 0;
    for k in 0..700 {
        let group = &groups[k % groups.len()];
        let inst = random_instance(&mut rng, &Shape::new(group.clone()));
        let ts = expand(&inst);
        let brute = common::short_zrun(&common::expand(&inst), &inst.source, &inst.target, K);
        match zreachable(&inst, &ts, ZLimits::default()).map_err(|e| format!("#{k}: {e}"))? {
            ZReach::Yes(image) => {
                yes += 1;
                let run = image.materialize(&inst.source, inst.target.state).map_err(|e| e.to_string())?;
                if ts.validate(&run).map_err(|e| format!("#{k}: {e}"))? != inst.target {
                    return Err(format!("#{k}: Parikh image misses the target"));
                }
                if image.total() <= K as u64 && !brute {
                    return Err(format!("#{k}: short image not found by brute force\n{inst:?}"));
                }
            }
            ZReach::No if brute => return Err(format!("#{k}: brute force found a run\n{inst:?}")),
            ZReach::No => {}
        }
    }
    let mut witnesses = 0;
    for k in 0..500 {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=4);
        let xs: Vec<Vec<i64>> = (0..n).map(|_| random_vector(&mut rng, d, -3, 3)).collect();
        let b = random_vector(&mut rng, d, -8, 8);
        let norm_x = xs.iter().flatten().map(|x| x.abs()).max().unwrap_or(0).max(1);
        let cap = (8 + n as i64 * 3) as u64;
        let brute = common::intcone_brute(&xs, &b, cap);
        let got = intcone_member(&xs, &b, 20_000).map_err(|e| format!("cone #{k}: {e}"))?;
        if brute && got.is_none() {
            return Err(format!("cone #{k}: missed X={xs:?} b={b:?}"));
        }
        if let Some(w) = got {
            witnesses += 1;
            if w.value(d).map_err(|e| e.to_string())? != b {
                return Err(format!("cone #{k}: witness sums elsewhere"));
            }
            let bound = common::support_bound(d, norm_x);
            if w.basis.len() > bound {
                return Err(format!("cone #{k}: support {} above {bound}", w.basis.len()));
            }
        }
    }
    Ok(format!("700 instances, {yes} integer-reachable; {witnesses} cone witnesses within the support bound"))
}

fn config_after(c: &Config, t: &Transition) -> Config {
    Config::new(t.dst, c.vec.iter().zip(&t.effect).map(|(a, b)| a + b).collect())
}

fn lifting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let groups = [Group::Symmetric(2), Group::Symmetric(3), Group::Cyclic(3), Group::Alternating(3)];
    let limits = Limits::default();
    let (mut done, mut tries) = (0, 0);
    while done < 100 {
        tries += 1;
        if tries > 10_000 {
            return Err(format!("only {done} pumpable instances generated"));
        }
        let group = groups[rng.random_range(0..groups.len())].clone();
        let d = group.degree();
        let n = rng.random_range(1..=2);
        let mut reps: Vec<Transition> = (0..rng.random_range(1..=3))
            .map(|_| Transition::new(rng.random_range(0..n), random_vector(&mut rng, d, -2, 2), rng.random_range(0..n)))
            .collect();
        let (s_state, t_state) = (rng.random_range(0..n), rng.random_range(0..n));
        reps.push(Transition::new(s_state, random_vector(&mut rng, d, 1, 2), s_state));
        reps.push(Transition::new(t_state, random_vector(&mut rng, d, -2, -1), t_state));
        if n == 2 {
            reps.push(Transition::new(s_state, random_vector(&mut rng, d, -1, 1), t_state));
        }
        let names = (0..n).map(|i| format!("q{i}")).collect();
        let vass = Vass::new(names, group, reps).map_err(|e| e.to_string())?;
        let ts = vass.expand(10_000).map_err(|e| e.to_string())?;
        let source = Config::new(s_state, random_vector(&mut rng, d, 0, 2));
        let mut cur = source.clone();
        let mut steps = Vec::new();
        for _ in 0..rng.random_range(1..=8) {
            let options: Vec<&Transition> = ts.from_state(cur.state).collect();
            if options.is_empty() {
                break;
            }
            let t = options[rng.random_range(0..options.len())];
            cur = config_after(&cur, t);
            steps.push(t.clone());
        }
        if cur.state != t_state || !cur.is_nonneg() {
            continue;
        }
        let gamma = Run::new(source.clone(), steps, RunMode::Integer);
        let inst = Instance::new(vass, source.clone(), cur).map_err(|e| e.to_string())?;
        if ts.validate(&gamma).map_err(|e| e.to_string())? != inst.target {
            return Err("generated integer run is inconsistent".into());
        }
        let budget = limits.budget();
        let forward = find_forward_pump(&inst.source, &ts, 16, &budget).map_err(|e| e.to_string())?;
        let backward = find_backward_pump(&inst.target, &ts, 16, &budget).map_err(|e| e.to_string())?;
        let (Some(forward), Some(backward)) = (forward, backward) else {
            return Err(format!("instance with pump loops has no pump\n{inst:?}"));
        };
        let run = lift_zrun(&inst, &ts, &PumpPair { forward, backward }, &gamma, &budget)
            .map_err(|e| format!("lift failed: {e}\n{inst:?}"))?;
        if run.mode != RunMode::Nonneg || run.start != inst.source {
            return Err("lifted run has the wrong mode or start".into());
        }
        let end = ts.validate(&run).map_err(|e| format!("lifted run invalid: {e}"))?;
        if end != inst.target {
            return Err(format!("lifted run ends at {end:?}"));
        }
        done += 1;
    }
    Ok(format!("{done} lifted runs validated ({tries} generated)"))
}

/// A nonnegative random walk biased towards raising coordinate 0, until
/// some coordinate exceeds `threshold`.
fn growing_walk(rng: &mut impl Rng, ts: &TransitionSet, start: &Config, threshold: i64) -> Option<Run> {
    let mut cur = start.clone();
    let mut steps = Vec::new();
    for _ in 0..20_000 {
        if cur.vec.iter().any(|&x| x > threshold) {
            return Some(Run::new(start.clone(), steps, RunMode::Nonneg));
        }
        let options: Vec<&Transition> = ts.from_state(cur.state).filter(|t| config_after(&cur, t).is_nonneg()).collect();
        if options.is_empty() {
            return None;
        }
        let t = if rng.random_bool(0.6) {
            options.iter().max_by_key(|t| (t.effect[0], t.effect.iter().sum::<i64>())).unwrap()
        } else {
            options[rng.random_range(0..options.len())]
        };
        cur = config_after(&cur, t);
        steps.push(t.clone());
    }
    None
}

/// Generates runs above the group's repair threshold and checks the repaired runs.
fn repair_suite(rng: &mut impl Rng, groups: &[Group], threshold: impl Fn(&Group, i64, i64, i64) -> i64) -> Outcome {
    let (mut done, mut surgery, mut tries) = (0, 0, 0);
    while done < 100 {
        tries += 1;
        if tries > 20_000 {
            return Err(format!("only {done} runs generated"));
        }
        let group = groups[rng.random_range(0..groups.len())].clone();
        let d = group.degree();
        let n = rng.random_range(1..=2);
        let mut reps: Vec<Transition> = (0..rng.random_range(1..=3))
            .map(|_| Transition::new(rng.random_range(0..n), random_vector(rng, d, -2, 2), rng.random_range(0..n)))
            .collect();
        let mut grow = vec![0; d];
        grow[0] = rng.random_range(1..=2);
        reps.push(Transition::new(0, grow, 0));
        let names = (0..n).map(|i| format!("q{i}")).collect();
        let vass = Vass::new(names, group.clone(), reps).map_err(|e| e.to_string())?;
        let ts = vass.expand(10_000).map_err(|e| e.to_string())?;
        let start = Config::new(0, random_vector(rng, d, 0, 2));
        let r = rng.random_range(0..=2);
        let big_n = vass.norm();
        let s = big_n.max(start.norm());
        let th = threshold(&group, big_n, s, r);
        let Some(pi) = growing_walk(rng, &ts, &start, th) else { continue };
        let end = ts.validate(&pi).map_err(|e| e.to_string())?;
        let floor = s + r + 1;
        let policy = FairnessPolicy::for_group(&group).ok_or("no fairness policy")?;
        let out = policy.repair(&vass, &ts, &pi, r).map_err(|e| format!("{group} repair failed: {e}\n{pi:?}"))?;
        let got = ts.validate(&out).map_err(|e| format!("{group}: repaired run invalid: {e}"))?;
        if out.start != pi.start || got.state != end.state || got.vec.iter().any(|&x| x < floor) {
            return Err(format!("{group}: repaired run ends at {got:?}, floor {floor}"));
        }
        surgery += usize::from(end.vec.iter().any(|&x| x < floor));
        done += 1;
    }
    Ok(format!("{done} runs, {surgery} needed surgery"))
}

fn repair() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let sym = repair_suite(&mut rng, &[Group::Symmetric(2), Group::Symmetric(3)], |g, _, s, r| {
        3 * g.degree() as i64 * (s + r)
    })?;
    let alt = repair_suite(&mut rng, &[Group::Alternating(3)], |g, n, s, r| {
        2 * (n + 1) * (s + r) * 3 * g.degree() as i64 + n
    })?;
    Ok(format!("S_d: {sym}; A_3: {alt}"))
}

fn transitive_groups() -> Vec<Group> {
    let mut gs = Vec::new();
    for d in 1..=5 {
        gs.push(Group::Symmetric(d));
        gs.push(Group::Cyclic(d));
    }
    for d in 3..=5 {
        gs.push(Group::Alternating(d));
    }
    gs.push(Group::Trivial(1));
    for (g, h) in [
        (Group::Symmetric(2), Group::Symmetric(2)),
        (Group::Symmetric(2), Group::Cyclic(2)),
        (Group::Cyclic(2), Group::Cyclic(2)),
        (Group::Symmetric(2), Group::Trivial(1)),
        (Group::Trivial(1), Group::Symmetric(5)),
        (Group::Cyclic(2), Group::Symmetric(2)),
    ] {
        gs.push(Group::wreath(g, h));
    }
    gs
}

fn equal_fibres() -> Outcome {
    let gs = transitive_groups();
    for g in &gs {
        let elems = common::group_elements(g);
        let d = g.degree();
        let transitive = (0..d).all(|j| elems.iter().any(|p| p[0] == j));
        if !transitive {
            return Err(format!("{g} is not transitive"));
        }
        for i in 0..d {
            for j in 0..d {
                let hits = elems.iter().filter(|p| p[i] == j).count();
                if hits * d != elems.len() {
                    return Err(format!("{g}: {hits} elements map {i} to {j}, order {}", elems.len()));
                }
            }
        }
        let lib = g.elements(10_000).map_err(|e| e.to_string())?;
        if lib.len() != elems.len() {
            return Err(format!("{g}: library lists {} elements, brute force {}", lib.len(), elems.len()));
        }
    }
    Ok(format!("{} transitive groups of degree at most 5", gs.len()))
}

/// A run of `S_2 wr T_blocks` whose blocks drift apart by 16 or more and
/// come back, over unit transitions.
fn drifting_run(rng: &mut impl Rng, blocks: usize) -> Result<(Instance, Run), String> {
    let d = 2 * blocks;
    let unit = |k: usize, x: i64| {
        let mut e = vec![0; d];
        e[k] = x;
        Transition::new(0, e, 0)
    };
    let reps: Vec<Transition> = (0..blocks).flat_map(|j| [unit(2 * j, 1), unit(2 * j, -1)]).collect();
    let group = Group::wreath(Group::Symmetric(2), Group::Trivial(blocks));
    let vass = Vass::new(vec!["q".into()], group, reps).map_err(|e| e.to_string())?;
    let mut lanes: Vec<Vec<Transition>> = Vec::new();
    for j in 0..blocks {
        let (x, y) = if rng.random_bool(0.5) { (2 * j, 2 * j + 1) } else { (2 * j + 1, 2 * j) };
        let a = rng.random_range(20..=28);
        let c = rng.random_range(0..=4);
        let back = c - rng.random_range(0..=c.min(1));
        let mut rise: Vec<Transition> = (0..a).map(|_| unit(x, 1)).chain((0..c).map(|_| unit(y, 1))).collect();
        let mut fall: Vec<Transition> = (0..a).map(|_| unit(x, -1)).chain((0..back).map(|_| unit(y, -1))).collect();
        rise.shuffle(rng);
        fall.shuffle(rng);
        rise.extend(fall);
        lanes.push(rise);
    }
    let mut steps = Vec::new();
    let mut pos = vec![0; blocks];
    while let Some(j) = {
        let open: Vec<usize> = (0..blocks).filter(|&j| pos[j] < lanes[j].len()).collect();
        (!open.is_empty()).then(|| open[rng.random_range(0..open.len())])
    } {
        steps.push(lanes[j][pos[j]].clone());
        pos[j] += 1;
    }
    let source = Config::new(0, vec![0; d]);
    let run = Run::new(source.clone(), steps, RunMode::Nonneg);
    let target = run.end().map_err(|e| e.to_string())?;
    Ok((Instance::new(vass, source, target).map_err(|e| e.to_string())?, run))
}

fn balancing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut summary = Vec::new();
    for blocks in [1, 2] {
        let mut stages = 0;
        for k in 0..100 {
            let (inst, pi) = drifting_run(&mut rng, blocks)?;
            let ts = expand(&inst);
            let out = balance_run(&inst, &ts, &pi).map_err(|e| format!("T_{blocks} #{k}: {e}"))?;
            let end = ts.validate(&out.run).map_err(|e| format!("T_{blocks} #{k}: balanced run invalid: {e}"))?;
            if out.run.start != inst.source || end != inst.target {
                return Err(format!("T_{blocks} #{k}: endpoints moved"));
            }
            let bound = balance_bound(inst.big_s()).map_err(|e| e.to_string())?;
            for c in out.run.configs().map_err(|e| e.to_string())? {
                for block in c.vec.chunks(2) {
                    let spread = block.iter().max().unwrap() - block.iter().min().unwrap();
                    if spread > bound {
                        return Err(format!("T_{blocks} #{k}: block spread {spread} above {bound}"));
                    }
                }
            }
            if out.ranks.len() < 2 || out.ranks.windows(2).any(|w| w[1] >= w[0]) {
                return Err(format!("T_{blocks} #{k}: ranks {:?}", out.ranks));
            }
            stages += out.ranks.len() - 1;
        }
        summary.push(format!("S_2 wr T_{blocks}: 100 runs, {stages} microstages"));
    }
    Ok(summary.join("; "))
}

fn reduction_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let mut summary = Vec::new();
    let suites: [(&str, Suite); 5] = [
        ("bounded1", checks::bounded1),
        ("tn-wr-g", checks::tn_wr_g),
        ("sd-wr-tn", checks::sd_wr_tn),
        ("cyclic", checks::cyclic),
        ("counting", checks::counting),
    ];
    for (name, suite) in suites {
        let t = suite(&mut rng, 100).map_err(|e| format!("{name}: {e}"))?;
        summary.push(format!("{name} {}/{}/{}", t.cases, t.compared, t.witnesses));
    }
    let took = within(start, Duration::from_secs(900))?;
    Ok(format!("cases/compared/witnesses: {}; {took:.1?}", summary.join(", ")))
}

fn spot_checks() -> Outcome {
    let limits = Limits::default();
    let one = Instance::new(
        Vass::new(vec!["q".into(), "p".into()], Group::Trivial(1), vec![Transition::new(0, vec![1], 1)])
            .map_err(|e| e.to_string())?,
        Config::new(0, vec![0]),
        Config::new(1, vec![1]),
    )
    .map_err(|e| e.to_string())?;
    let cyc = reduce_to_cyclic(&one, &limits).map_err(|e| e.to_string())?;
    if cyc.instance.vass.group() != &Group::Cyclic(10) {
        return Err(format!("cyclic gave {}", cyc.instance.vass.group()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(901);
    for (n, g) in [(2, Group::Symmetric(2)), (3, Group::Cyclic(3)), (2, Group::Alternating(3)), (3, Group::Symmetric(2))] {
        let d = g.degree();
        let inst = random_instance(&mut rng, &Shape { group: Group::Trivial((n - 1) * d), max_states: 2, max_reps: 2, max_norm: 1 });
        let out = reduce_to_tn_wr_g(&inst, n, &g, &limits).map_err(|e| e.to_string())?;
        if out.instance.dim() != n * d {
            return Err(format!("tn-wr-g n={n} {g}: degree {}", out.instance.dim()));
        }
    }

    for (d, blocks) in [(2, 1), (2, 2), (3, 1)] {
        let group = Group::wreath(Group::Symmetric(d), Group::Trivial(blocks));
        let inst = random_instance(&mut rng, &Shape { group, max_states: 2, max_reps: 2, max_norm: 1 });
        let out = reduce_sd_wr_tn(&inst, None, &limits).map_err(|e| e.to_string())?;
        let b = balance_bound(inst.big_s()).map_err(|e| e.to_string())?;
        let cap = inst.vass.num_states() as u128 * ((b + 1) as u128).pow((blocks * d) as u32);
        if out.instance.dim() != blocks {
            return Err(format!("sd-wr-tn d={d} n={blocks}: dimension {}", out.instance.dim()));
        }
        if out.instance.vass.num_states() as u128 > cap {
            return Err(format!("sd-wr-tn d={d} n={blocks}: {} states above {cap}", out.instance.vass.num_states()));
        }
    }
    Ok("cyclic(10); tn-wr-g degree n*d; sd-wr-tn dimension n within the state bound".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("two-dimensional data example", two_dimensional_example),
        ("solver against escalating search", solver_against_oracle),
        ("integer reachability against brute force", zreach_against_brute_force),
        ("lifting integer runs", lifting),
        ("run repair", repair),
        ("equal stabilizer cosets", equal_fibres),
        ("block balancing", balancing),
        ("reduction soundness", reduction_soundness),
        ("reduction shapes", spot_checks),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {name}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
