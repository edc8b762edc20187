mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symvass::gen::{random_instance, Shape};
use symvass::solver::{solve, Answer};
use symvass::{Group, Limits};

fn agree_with_oracle(group: Group, seed: u64, count: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::new(group);
    let limits = Limits::default();
    let mut closed = 0;
    for k in 0..count {
        let inst = random_instance(&mut rng, &shape);
        let verdict = solve(&inst, &limits).unwrap_or_else(|e| panic!("instance {k}: {e}\n{inst:?}"));
        if let Answer::Reachable(run) = &verdict.answer {
            let ts = inst.vass.expand(1000).unwrap();
            assert_eq!(ts.validate(run).unwrap(), inst.target, "instance {k}");
        }
        let Some(expected) = common::oracle(&inst, 64, 200_000) else { continue };
        closed += 1;
        match verdict.answer {
            Answer::Reachable(_) => assert!(expected, "instance {k}: solver says reachable\n{inst:?}"),
            Answer::Unreachable => assert!(!expected, "instance {k}: solver says unreachable\n{inst:?}"),
            Answer::ResourceLimit(why) => panic!("instance {k}: resource limit {why}\n{inst:?}"),
        }
    }
    assert!(closed * 2 >= count, "oracle closed on only {closed} of {count}");
}

#[test]
fn symmetric_two_agrees_with_oracle() {
    agree_with_oracle(Group::Symmetric(2), 11, 150);
}

#[test]
fn symmetric_three_agrees_with_oracle() {
    agree_with_oracle(Group::Symmetric(3), 12, 100);
}

#[test]
fn alternating_three_agrees_with_oracle() {
    agree_with_oracle(Group::Alternating(3), 13, 100);
}
