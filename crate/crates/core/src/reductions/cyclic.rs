//! Plain reachability in dimension `n` as reachability under the cyclic group
//! of degree `2n+8`.

use crate::error::Result;
use crate::limits::Limits;
use crate::perm::Group;
use crate::vass::{Config, Instance, Transition};

use super::{Builder, ReductionKind, ReductionOutput};

/// Coordinates are 1-based in this description. `q(v)` becomes `q(v')` with
/// `v'(2) = v'(n+3) = 1`, `v'(i+2) = v(i)` and zero elsewhere. A transition
/// `(p, v, q)` becomes `(p, t', q')` followed by `(q', u, q)`: `t'` moves the
/// two markers at `2, n+3` to `1, n+4` and adds `v` to the payload, `u` moves
/// them back. No rotation of either effect is enabled at an embedded
/// configuration, so runs of the output are exactly images of source runs.
pub fn reduce_to_cyclic(inst: &Instance, limits: &Limits) -> Result<ReductionOutput> {
    let n = inst.dim();
    let d = 2 * n + 8;
    let ts = inst.vass.expand(limits.max_orbit)?;
    let embed = |c: &Config| {
        let mut v = vec![0; d];
        v[1] = 1;
        v[n + 2] = 1;
        v[2..n + 2].copy_from_slice(&c.vec);
        Config::new(c.state, v)
    };
    let names = inst.vass.states();
    let mut b = Builder::new(names);
    let primed = names.iter().map(|q| b.fresh(format!("{q}'"))).collect::<Result<Vec<_>>>()?;
    let mut back = vec![0; d];
    back[1] = 1;
    back[n + 2] = 1;
    back[0] = -1;
    back[n + 3] = -1;
    for t in ts.all() {
        let mut fwd = vec![0; d];
        fwd[1] = -1;
        fwd[n + 2] = -1;
        fwd[0] = 1;
        fwd[n + 3] = 1;
        fwd[2..n + 2].copy_from_slice(&t.effect);
        let first = Transition::new(t.src, fwd, primed[t.dst]);
        let second = Transition::new(primed[t.dst], back.clone(), t.dst);
        b.segment(vec![first, second], t.clone());
    }
    let embedding = vec![format!(
        "q(v) -> q(0,1,v1,...,v{n},1,0,...,0) in dimension {d}; q' are intermediate states"
    )];
    let ends = (embed(&inst.source), embed(&inst.target));
    b.finish(ReductionKind::Cyclic, Group::Cyclic(d), inst, ends, 2, embedding)
}
