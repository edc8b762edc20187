//! Finite permutation groups acting on coordinates.
//!
//! Indices are 0-based internally; the text syntax and user-facing docs count
//! from 1. A permutation `p` acts on a vector `v` by moving the value at
//! position `i` to position `p(i)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation { image: (0..d).collect() }
    }

    /// Builds a permutation from its 0-based image array.
    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let d = image.len();
        let mut seen = vec![false; d];
        for &x in &image {
            if x >= d || seen[x] {
                return Err(Error::Input(format!("{image:?} is not a bijection on 0..{d}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { image })
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::Input("one-based image contains 0".into()));
        }
        Self::from_image(image.iter().map(|x| x - 1).collect())
    }

    /// Swaps `i` and `j` (0-based).
    pub fn transposition(d: usize, i: usize, j: usize) -> Self {
        let mut image: Vec<usize> = (0..d).collect();
        image.swap(i, j);
        Permutation { image }
    }

    /// The 3-cycle `i -> j -> k -> i` (0-based, pairwise distinct).
    pub fn three_cycle(d: usize, i: usize, j: usize, k: usize) -> Self {
        let mut image: Vec<usize> = (0..d).collect();
        image[i] = j;
        image[j] = k;
        image[k] = i;
        Permutation { image }
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `p(i)`.
    pub fn at(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.degree()];
        for (i, &x) in self.image.iter().enumerate() {
            image[x] = i;
        }
        Permutation { image }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation { image: other.image.iter().map(|&x| self.image[x]).collect() }
    }

    /// True for permutations with an even number of inversions.
    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.degree()];
        let mut transpositions = 0;
        for start in 0..self.degree() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.image[i];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 0
    }

    /// Action on vectors: `result[p(i)] = v[i]`.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.degree() {
            return Err(Error::Dimension { expected: self.degree(), got: v.len() });
        }
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.image[i]] = x;
        }
        Ok(out)
    }

    pub(crate) fn apply_unchecked(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.image[i]] = x;
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", x + 1)?;
        }
        write!(f, "]")
    }
}

/// The wreath-product element that applies `sigmas[j]` inside block `j` and
/// moves block `j` to block `delta(j)`. Coordinate `(i, j)` is `g * j + i`.
pub fn wreath_element(sigmas: &[Permutation], delta: &Permutation) -> Result<Permutation> {
    let h = delta.degree();
    if sigmas.len() != h {
        return Err(Error::Dimension { expected: h, got: sigmas.len() });
    }
    let g = sigmas.first().map_or(0, Permutation::degree);
    if let Some(bad) = sigmas.iter().find(|s| s.degree() != g) {
        return Err(Error::Dimension { expected: g, got: bad.degree() });
    }
    let mut image = vec![0; g * h];
    for (j, sigma) in sigmas.iter().enumerate() {
        for i in 0..g {
            image[g * j + i] = g * delta.at(j) + sigma.at(i);
        }
    }
    Ok(Permutation { image })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Group {
    Trivial(usize),
    Symmetric(usize),
    Alternating(usize),
    Cyclic(usize),
    /// `Wreath(inner, outer)`: `outer.degree()` blocks of size `inner.degree()`.
    Wreath(Box<Group>, Box<Group>),
}

impl Group {
    pub fn wreath(inner: Group, outer: Group) -> Self {
        Group::Wreath(Box::new(inner), Box::new(outer))
    }

    pub fn degree(&self) -> usize {
        match self {
            Group::Trivial(n) | Group::Symmetric(n) | Group::Alternating(n) | Group::Cyclic(n) => *n,
            Group::Wreath(g, h) => g.degree() * h.degree(),
        }
    }

    /// Number of elements, or `None` if it does not fit in a `u128`.
    pub fn order(&self) -> Option<u128> {
        fn factorial(n: usize) -> Option<u128> {
            (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
        }
        match self {
            Group::Trivial(_) => Some(1),
            Group::Symmetric(n) => factorial(*n),
            Group::Alternating(n) => factorial(*n).map(|f| (f / 2).max(1)),
            Group::Cyclic(n) => Some((*n).max(1) as u128),
            Group::Wreath(g, h) => {
                let inner = g.order()?;
                let blocks = u32::try_from(h.degree()).ok()?;
                inner.checked_pow(blocks)?.checked_mul(h.order()?)
            }
        }
    }

    /// True iff the action on coordinates has a single orbit.
    pub fn is_transitive(&self) -> bool {
        match self {
            Group::Trivial(n) => *n == 1,
            Group::Symmetric(n) | Group::Cyclic(n) => *n >= 1,
            Group::Alternating(n) => *n == 1 || *n >= 3,
            Group::Wreath(g, h) => g.is_transitive() && h.is_transitive(),
        }
    }

    /// Whether `p` belongs to the group.
    pub fn contains(&self, p: &Permutation) -> bool {
        if p.degree() != self.degree() {
            return false;
        }
        match self {
            Group::Trivial(_) => p.is_identity(),
            Group::Symmetric(_) => true,
            Group::Alternating(_) => p.is_even(),
            Group::Cyclic(n) => {
                let shift = if *n == 0 { 0 } else { p.at(0) };
                (0..*n).all(|i| p.at(i) == (i + shift) % n)
            }
            Group::Wreath(g, h) => {
                let (gd, hd) = (g.degree(), h.degree());
                if gd == 0 {
                    return true;
                }
                let mut delta = Vec::with_capacity(hd);
                for j in 0..hd {
                    let block = p.at(gd * j) / gd;
                    let mut sigma = Vec::with_capacity(gd);
                    for i in 0..gd {
                        let x = p.at(gd * j + i);
                        if x / gd != block {
                            return false;
                        }
                        sigma.push(x % gd);
                    }
                    match Permutation::from_image(sigma) {
                        Ok(s) if g.contains(&s) => {}
                        _ => return false,
                    }
                    delta.push(block);
                }
                matches!(Permutation::from_image(delta), Ok(d) if h.contains(&d))
            }
        }
    }

    /// All elements, identity first, without duplicates.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        match self.order() {
            Some(k) if k <= cap as u128 => {}
            Some(k) => {
                return Err(Error::ResourceLimit(format!("group {self} has {k} elements, cap is {cap}")))
            }
            None => return Err(Error::ResourceLimit(format!("group {self} is too large to enumerate"))),
        }
        Ok(self.elements_unchecked())
    }

    fn elements_unchecked(&self) -> Vec<Permutation> {
        match self {
            Group::Trivial(n) => vec![Permutation::identity(*n)],
            Group::Symmetric(n) => all_permutations(*n),
            Group::Alternating(n) => all_permutations(*n).into_iter().filter(Permutation::is_even).collect(),
            Group::Cyclic(n) => {
                let n = *n;
                if n == 0 {
                    return vec![Permutation::identity(0)];
                }
                (0..n).map(|k| Permutation { image: (0..n).map(|i| (i + k) % n).collect() }).collect()
            }
            Group::Wreath(g, h) => {
                let inner = g.elements_unchecked();
                let outer = h.elements_unchecked();
                let blocks = h.degree();
                let mut out = Vec::new();
                for delta in &outer {
                    // Odometer over `inner^blocks`, first digit fastest.
                    let mut digits = vec![0usize; blocks];
                    loop {
                        let sigmas: Vec<Permutation> = digits.iter().map(|&k| inner[k].clone()).collect();
                        out.push(wreath_element(&sigmas, delta).expect("degrees agree by construction"));
                        let mut pos = 0;
                        while pos < blocks {
                            digits[pos] += 1;
                            if digits[pos] < inner.len() {
                                break;
                            }
                            digits[pos] = 0;
                            pos += 1;
                        }
                        if pos == blocks {
                            break;
                        }
                    }
                }
                out
            }
        }
    }

    /// Distinct images of `v` under the group, sorted.
    pub fn orbit_of_vector(&self, v: &[i64], cap: usize) -> Result<Vec<Vec<i64>>> {
        if v.len() != self.degree() {
            return Err(Error::Dimension { expected: self.degree(), got: v.len() });
        }
        if let Group::Symmetric(_) = self {
            return Ok(distinct_rearrangements(v));
        }
        let orbit: BTreeSet<Vec<i64>> =
            self.elements(cap)?.iter().map(|p| p.apply_unchecked(v)).collect();
        Ok(orbit.into_iter().collect())
    }
}

/// All permutations of `0..n` in lexicographic order of their images.
fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![Permutation { image: cur.clone() }];
    while next_permutation(&mut cur) {
        out.push(Permutation { image: cur.clone() });
    }
    out
}

fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn distinct_rearrangements(v: &[i64]) -> Vec<Vec<i64>> {
    let mut cur = v.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Trivial(n) => write!(f, "trivial({n})"),
            Group::Symmetric(n) => write!(f, "symmetric({n})"),
            Group::Alternating(n) => write!(f, "alternating({n})"),
            Group::Cyclic(n) => write!(f, "cyclic({n})"),
            Group::Wreath(g, h) => write!(f, "wreath({g},{h})"),
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (group, rest) = parse_group(&compact)?;
        if !rest.is_empty() {
            return Err(Error::Input(format!("trailing text after group: {rest:?}")));
        }
        Ok(group)
    }
}

fn parse_group(s: &str) -> Result<(Group, &str)> {
    let open = s.find('(').ok_or_else(|| Error::Input(format!("expected '(' in group {s:?}")))?;
    let name = &s[..open];
    let rest = &s[open + 1..];
    if name == "wreath" {
        let (inner, rest) = parse_group(rest)?;
        let rest = rest.strip_prefix(',').ok_or_else(|| Error::Input("expected ',' in wreath".into()))?;
        let (outer, rest) = parse_group(rest)?;
        let rest = rest.strip_prefix(')').ok_or_else(|| Error::Input("expected ')' after wreath".into()))?;
        return Ok((Group::wreath(inner, outer), rest));
    }
    let close = rest.find(')').ok_or_else(|| Error::Input(format!("expected ')' in group {s:?}")))?;
    let n: usize = rest[..close]
        .parse()
        .map_err(|_| Error::Input(format!("bad degree {:?}", &rest[..close])))?;
    if n == 0 {
        return Err(Error::Input("group degree must be positive".into()));
    }
    let group = match name {
        "trivial" => Group::Trivial(n),
        "symmetric" => Group::Symmetric(n),
        "alternating" => Group::Alternating(n),
        "cyclic" => Group::Cyclic(n),
        other => return Err(Error::Input(format!("unknown group kind {other:?}"))),
    };
    Ok((group, &rest[close + 1..]))
}
