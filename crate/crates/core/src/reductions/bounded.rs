//! Bounded reachability in one dimension as reachability under any group of
//! degree at least two.

use crate::error::{add, mul, Error, Result};
use crate::limits::Limits;
use crate::perm::Group;
use crate::vass::{Config, Instance, Transition};

use super::{Builder, ReductionKind, ReductionOutput};

/// `q(n)` becomes `q(n, ..., n, 2M - n)`. A step by `z > 0` is simulated by
/// adding `(M+z, ..., M+z, -M-z)` then `(-M, ..., -M, M)`; a step by `-z` by
/// adding `(M, ..., M, -M)` then `(-M-z, ..., -M-z, M+z)`. Runs of the output
/// correspond to runs of the source whose counter stays within `0..=M`.
pub fn reduce_bounded_1vass(inst: &Instance, bound: i64, group: &Group, limits: &Limits) -> Result<ReductionOutput> {
    if inst.dim() != 1 {
        return Err(Error::Input(format!("expected a 1-dimensional VASS, got dimension {}", inst.dim())));
    }
    let d = group.degree();
    if d < 2 {
        return Err(Error::Input("target group must have degree at least 2".into()));
    }
    if bound < 1 {
        return Err(Error::Input("bound must be positive".into()));
    }
    let m = bound;
    for c in [&inst.source, &inst.target] {
        if c.vec[0] > m {
            return Err(Error::Input(format!("configuration value {} exceeds the bound {m}", c.vec[0])));
        }
    }
    let ts = inst.vass.expand(limits.max_orbit)?;
    let flat = |big: i64, last: i64| {
        let mut v = vec![big; d];
        v[d - 1] = last;
        v
    };
    let embed = |c: &Config| -> Result<Config> {
        let n = c.vec[0];
        Ok(Config::new(c.state, flat(n, add(mul(2, m)?, -n)?)))
    };
    let names = inst.vass.states();
    let mut b = Builder::new(names);
    for (k, t) in ts.all().iter().enumerate() {
        let z = t.effect[0];
        if z == 0 || z.abs() > m {
            return Err(Error::Input(format!("effect {z} must be nonzero and at most {m} in absolute value")));
        }
        let big = add(m, z.abs())?;
        let (first, second) = if z > 0 {
            let aux = b.fresh(format!("{}~{k}", names[t.dst]))?;
            (Transition::new(t.src, flat(big, -big), aux), Transition::new(aux, flat(-m, m), t.dst))
        } else {
            let aux = b.fresh(format!("{}~{k}", names[t.src]))?;
            (Transition::new(t.src, flat(m, -m), aux), Transition::new(aux, flat(-big, big), t.dst))
        };
        b.segment(vec![first, second], t.clone());
    }
    let embedding = vec![format!("q(n) -> q(n,...,n,2M-n) with M={m}, dimension {d}")];
    let ends = (embed(&inst.source)?, embed(&inst.target)?);
    b.finish(ReductionKind::Bounded1, group.clone(), inst, ends, 2, embedding)
}
