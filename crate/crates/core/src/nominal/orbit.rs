use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nominal::atom::{Atom, AtomSet};

/// Default cap on the order of a positional symmetry group (`|S_6|`).
pub const DEFAULT_GROUP_CAP: usize = 720;

/// A position permutation of `0..n`, stored as its image list.
pub type PositionPerm = Vec<usize>;

/// One orbit `𝔸^{#n} / G`: distinct `n`-tuples of atoms modulo a group `G`
/// of position permutations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitDescriptor {
    label: String,
    dim: usize,
    generators: Vec<PositionPerm>,
    /// Every element of the generated group, sorted; always contains the identity.
    #[serde(skip)]
    group: Vec<PositionPerm>,
}

fn check_position_perm(dim: usize, p: &[usize]) -> Result<()> {
    if p.len() != dim {
        return Err(Error::InvalidPermutation(format!(
            "generator {p:?} has length {}, expected {dim}",
            p.len()
        )));
    }
    let mut seen = vec![false; dim];
    for &i in p {
        if i >= dim || seen[i] {
            return Err(Error::InvalidPermutation(format!("{p:?} is not a permutation of 0..{dim}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// `(p ∘ q)[i] = p[q[i]]`.
pub(crate) fn compose_positions(p: &[usize], q: &[usize]) -> PositionPerm {
    q.iter().map(|&i| p[i]).collect()
}

pub(crate) fn invert_positions(p: &[usize]) -> PositionPerm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

fn close_group(dim: usize, generators: &[PositionPerm], cap: usize) -> Result<Vec<PositionPerm>> {
    let identity: PositionPerm = (0..dim).collect();
    let mut group: BTreeSet<PositionPerm> = BTreeSet::new();
    group.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(p) = frontier.pop() {
        for g in generators {
            let q = compose_positions(&p, g);
            if group.insert(q.clone()) {
                if group.len() > cap {
                    return Err(Error::GroupCap { cap });
                }
                frontier.push(q);
            }
        }
    }
    Ok(group.into_iter().collect())
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn all_position_perms(n: usize) -> Vec<PositionPerm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<PositionPerm>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

impl OrbitDescriptor {
    pub fn new(label: impl Into<String>, dim: usize, generators: Vec<PositionPerm>) -> Result<Self> {
        Self::with_cap(label, dim, generators, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(
        label: impl Into<String>,
        dim: usize,
        generators: Vec<PositionPerm>,
        cap: usize,
    ) -> Result<Self> {
        for g in &generators {
            check_position_perm(dim, g)?;
        }
        let group = close_group(dim, &generators, cap)?;
        let identity: PositionPerm = (0..dim).collect();
        let generators = generators.into_iter().filter(|g| *g != identity).collect();
        Ok(OrbitDescriptor { label: label.into(), dim, generators, group })
    }

    /// The strong orbit `𝔸^{#n}` (trivial positional group).
    pub fn strong(label: impl Into<String>, dim: usize) -> Self {
        OrbitDescriptor {
            label: label.into(),
            dim,
            generators: Vec::new(),
            group: vec![(0..dim).collect()],
        }
    }

    /// Builds a descriptor from a complete list of group elements, picking a
    /// small generating set greedily.
    pub(crate) fn from_group_elements(
        label: impl Into<String>,
        dim: usize,
        mut elements: Vec<PositionPerm>,
        cap: usize,
    ) -> Result<Self> {
        elements.sort();
        elements.dedup();
        if elements.len() > cap {
            return Err(Error::GroupCap { cap });
        }
        let identity: PositionPerm = (0..dim).collect();
        let mut generators: Vec<PositionPerm> = Vec::new();
        let mut generated: BTreeSet<PositionPerm> = BTreeSet::from([identity]);
        for e in &elements {
            if !generated.contains(e) {
                generators.push(e.clone());
                generated = close_group(dim, &generators, cap)?.into_iter().collect();
            }
        }
        Ok(OrbitDescriptor { label: label.into(), dim, generators, group: elements })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn set_label(&mut self, label: String) {
        self.label = label;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[PositionPerm] {
        &self.generators
    }

    pub fn group(&self) -> &[PositionPerm] {
        &self.group
    }

    pub fn group_order(&self) -> usize {
        self.group.len()
    }

    pub fn contains_perm(&self, p: &[usize]) -> bool {
        self.group.binary_search_by(|g| g.as_slice().cmp(p)).is_ok()
    }

    /// Same dimension and the same positional group.
    pub fn same_shape(&self, other: &OrbitDescriptor) -> bool {
        self.dim == other.dim && self.group == other.group
    }

    /// Lexicographically least member of `{ tuple ∘ g : g ∈ G }`.
    pub fn canonical_tuple(&self, tuple: &[Atom]) -> Vec<Atom> {
        let mut best: Option<Vec<Atom>> = None;
        for g in &self.group {
            let cand: Vec<Atom> = g.iter().map(|&i| tuple[i]).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        best.unwrap_or_default()
    }

    pub fn check_tuple(&self, tuple: &[Atom]) -> Result<()> {
        if tuple.len() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, got: tuple.len() });
        }
        let mut seen = AtomSet::new();
        for &a in tuple {
            if !seen.insert(a) {
                return Err(Error::DuplicateAtom(a));
            }
        }
        Ok(())
    }
}

/// A point of an orbit-finite set: orbit index plus the canonical tuple.
///
/// The atoms of the tuple are exactly the least support of the point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Element {
    pub(crate) orbit: usize,
    pub(crate) atoms: Vec<Atom>,
}

impl Element {
    pub fn orbit(&self) -> usize {
        self.orbit
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support(&self) -> AtomSet {
        self.atoms.iter().copied().collect()
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}(", self.orbit)?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_closure_of_swap() {
        let o = OrbitDescriptor::new("S", 2, vec![vec![1, 0]]).unwrap();
        assert_eq!(o.group_order(), 2);
        let o3 = OrbitDescriptor::new("T", 3, vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(o3.group_order(), 6);
    }

    #[test]
    fn group_cap_enforced() {
        let err = OrbitDescriptor::with_cap("T", 3, vec![vec![1, 0, 2], vec![1, 2, 0]], 5);
        assert_eq!(err.unwrap_err(), Error::GroupCap { cap: 5 });
    }

    #[test]
    fn rejects_bad_generator() {
        assert!(OrbitDescriptor::new("X", 2, vec![vec![0, 0]]).is_err());
        assert!(OrbitDescriptor::new("X", 2, vec![vec![0]]).is_err());
    }

    #[test]
    fn generating_set_is_small() {
        let all = all_position_perms(3);
        let o = OrbitDescriptor::from_group_elements("T", 3, all, 720).unwrap();
        assert_eq!(o.group_order(), 6);
        assert!(o.generators().len() <= 2);
    }
}
