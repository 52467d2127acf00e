use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A name drawn from the countably infinite set of data values.
///
/// Only equality between atoms is meaningful. The numeric order exists so
/// that canonical forms can be chosen deterministically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Atom(pub u32);

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            n @ 1..=26 => write!(f, "{}", (b'a' + (n - 1) as u8) as char),
            n => write!(f, "n{n}"),
        }
    }
}

pub type AtomSet = BTreeSet<Atom>;

/// Convenience constructor for small atom sets in tests and builders.
pub fn atoms<I: IntoIterator<Item = u32>>(ids: I) -> AtomSet {
    ids.into_iter().map(Atom).collect()
}

/// The `count` smallest positive atoms not contained in `avoid`, ascending.
pub fn fresh_atoms<'a, I>(avoid: I, count: usize) -> Vec<Atom>
where
    I: IntoIterator<Item = &'a Atom>,
{
    let avoid: BTreeSet<Atom> = avoid.into_iter().copied().collect();
    let mut out = Vec::with_capacity(count);
    let mut next = 1u32;
    while out.len() < count {
        if !avoid.contains(&Atom(next)) {
            out.push(Atom(next));
        }
        next += 1;
    }
    out
}

/// A finite permutation of atoms: identity outside `moved`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Permutation {
    moved: BTreeMap<Atom, Atom>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    pub fn transposition(a: Atom, b: Atom) -> Self {
        let mut moved = BTreeMap::new();
        if a != b {
            moved.insert(a, b);
            moved.insert(b, a);
        }
        Permutation { moved }
    }

    /// Builds a permutation from an explicit finite mapping. The mapping must
    /// be a bijection of its domain onto itself.
    pub fn from_mapping<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Result<Self> {
        let mut moved = BTreeMap::new();
        for (a, b) in pairs {
            if let Some(prev) = moved.insert(a, b) {
                if prev != b {
                    return Err(Error::Invalid(format!("atom {a} mapped twice")));
                }
            }
        }
        let domain: BTreeSet<Atom> = moved.keys().copied().collect();
        let image: BTreeSet<Atom> = moved.values().copied().collect();
        if domain != image || image.len() != moved.len() {
            return Err(Error::Invalid("mapping is not a permutation of its domain".into()));
        }
        moved.retain(|a, b| a != b);
        Ok(Permutation { moved })
    }

    /// Extends an injective partial map to a finite permutation by closing
    /// every open chain back onto its start.
    pub fn extending<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Result<Self> {
        let mut forward: BTreeMap<Atom, Atom> = BTreeMap::new();
        for (a, b) in pairs {
            if let Some(prev) = forward.insert(a, b) {
                if prev != b {
                    return Err(Error::Invalid(format!("atom {a} mapped twice")));
                }
            }
        }
        let image: BTreeSet<Atom> = forward.values().copied().collect();
        if image.len() != forward.len() {
            return Err(Error::Invalid("partial map is not injective".into()));
        }
        let starts: Vec<Atom> = forward.keys().filter(|a| !image.contains(a)).copied().collect();
        for start in starts {
            let mut end = start;
            while let Some(&next) = forward.get(&end) {
                end = next;
            }
            forward.insert(end, start);
        }
        forward.retain(|a, b| a != b);
        Ok(Permutation { moved: forward })
    }

    pub fn apply(&self, a: Atom) -> Atom {
        self.moved.get(&a).copied().unwrap_or(a)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut moved = BTreeMap::new();
        for &a in self.moved.keys().chain(other.moved.keys()) {
            let b = self.apply(other.apply(a));
            if a != b {
                moved.insert(a, b);
            }
        }
        Permutation { moved }
    }

    pub fn inverse(&self) -> Permutation {
        Permutation { moved: self.moved.iter().map(|(&a, &b)| (b, a)).collect() }
    }

    pub fn domain(&self) -> impl Iterator<Item = Atom> + '_ {
        self.moved.keys().copied()
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn fixes_all(&self, set: &AtomSet) -> bool {
        set.iter().all(|&a| self.apply(a) == a)
    }

    pub fn apply_set(&self, set: &AtomSet) -> AtomSet {
        set.iter().map(|&a| self.apply(a)).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moved.is_empty() {
            return write!(f, "id");
        }
        let mut seen = BTreeSet::new();
        for &start in self.moved.keys() {
            if !seen.insert(start) {
                continue;
            }
            write!(f, "({start}")?;
            let mut cur = self.apply(start);
            while cur != start {
                seen.insert(cur);
                write!(f, " {cur}")?;
                cur = self.apply(cur);
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extending_closes_chains() {
        let p = Permutation::extending([(Atom(1), Atom(2)), (Atom(2), Atom(3))]).unwrap();
        assert_eq!(p.apply(Atom(1)), Atom(2));
        assert_eq!(p.apply(Atom(2)), Atom(3));
        assert_eq!(p.apply(Atom(3)), Atom(1));
        assert_eq!(p.apply(Atom(9)), Atom(9));
    }

    #[test]
    fn from_mapping_rejects_non_bijection() {
        assert!(Permutation::from_mapping([(Atom(1), Atom(2))]).is_err());
        assert!(Permutation::from_mapping([(Atom(1), Atom(2)), (Atom(2), Atom(1))]).is_ok());
    }

    #[test]
    fn compose_and_inverse() {
        let p = Permutation::transposition(Atom(1), Atom(2));
        let q = Permutation::transposition(Atom(2), Atom(3));
        let pq = p.compose(&q);
        assert_eq!(pq.apply(Atom(3)), Atom(1));
        assert!(pq.compose(&pq.inverse()).is_identity());
        assert_eq!(format!("{}", Permutation::transposition(Atom(1), Atom(2))), "(a b)");
    }

    #[test]
    fn fresh_skips_avoided() {
        assert_eq!(fresh_atoms(&atoms([1, 3]), 3), vec![Atom(2), Atom(4), Atom(5)]);
    }
}
