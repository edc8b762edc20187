//! Seeded random instances for differential testing.

use rand::Rng;

use crate::perm::Group;
use crate::vass::{Config, Instance, Transition, Vass};

/// Shape of generated instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub group: Group,
    pub max_states: usize,
    pub max_reps: usize,
    /// Bound on every effect entry and every source/target entry.
    pub max_norm: i64,
}

impl Shape {
    pub fn new(group: Group) -> Self {
        Shape { group, max_states: 3, max_reps: 4, max_norm: 2 }
    }
}

pub fn random_vector(rng: &mut impl Rng, d: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..d).map(|_| rng.random_range(lo..=hi)).collect()
}

/// A VASS with `1..=max_states` states and `1..=max_reps` representatives.
pub fn random_vass(rng: &mut impl Rng, shape: &Shape) -> Vass {
    let d = shape.group.degree();
    let n = rng.random_range(1..=shape.max_states);
    let k = rng.random_range(1..=shape.max_reps);
    let reps = (0..k)
        .map(|_| {
            let src = rng.random_range(0..n);
            let dst = rng.random_range(0..n);
            Transition::new(src, random_vector(rng, d, -shape.max_norm, shape.max_norm), dst)
        })
        .collect();
    let names = (0..n).map(|i| format!("q{i}")).collect();
    Vass::new(names, shape.group.clone(), reps).expect("generated representatives are well formed")
}

pub fn random_instance(rng: &mut impl Rng, shape: &Shape) -> Instance {
    let vass = random_vass(rng, shape);
    let d = vass.dim();
    let n = vass.num_states();
    let s = Config::new(rng.random_range(0..n), random_vector(rng, d, 0, shape.max_norm));
    let t = Config::new(rng.random_range(0..n), random_vector(rng, d, 0, shape.max_norm));
    Instance::new(vass, s, t).expect("generated configurations are well formed")
}
