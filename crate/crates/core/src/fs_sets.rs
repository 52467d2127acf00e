//! Finitely supported subsets of orbit-finite sets.
//!
//! A subset is stored as a support `S` together with one canonical
//! representative per `Perm_S`-orbit it contains. Every constructor
//! normalizes `S` down to the least support, so structural equality is
//! set equality.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nominal::{fresh_atoms, AtomSet, Element, OrbitFiniteSet, Permutation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsSubset {
    carrier: Arc<OrbitFiniteSet>,
    support: AtomSet,
    reps: BTreeSet<Element>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Difference,
    SymmetricDifference,
}

fn same_carrier(a: &Arc<OrbitFiniteSet>, b: &Arc<OrbitFiniteSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FsSubset {
    pub fn empty(carrier: Arc<OrbitFiniteSet>) -> Self {
        FsSubset { carrier, support: AtomSet::new(), reps: BTreeSet::new() }
    }

    pub fn full(carrier: Arc<OrbitFiniteSet>) -> Self {
        let orbits: Vec<usize> = (0..carrier.orbit_count()).collect();
        FsSubset::of_orbits(carrier, &orbits)
    }

    /// The equivariant subset made of whole orbits.
    pub fn of_orbits(carrier: Arc<OrbitFiniteSet>, orbits: &[usize]) -> Self {
        let reps = orbits.iter().map(|&o| carrier.rep(o)).collect();
        FsSubset { carrier, support: AtomSet::new(), reps }
    }

    /// `{x}`.
    pub fn singleton(carrier: Arc<OrbitFiniteSet>, x: &Element) -> Result<Self> {
        if !carrier.contains(x) {
            return Err(Error::CarrierMismatch);
        }
        Ok(FsSubset { support: x.support(), reps: BTreeSet::from([x.clone()]), carrier })
    }

    /// `hull_S` of the given elements: the union of their `Perm_S`-orbits.
    pub fn from_elements(
        carrier: Arc<OrbitFiniteSet>,
        support: AtomSet,
        elements: &[Element],
    ) -> Result<Self> {
        let mut reps = BTreeSet::new();
        for x in elements {
            if !carrier.contains(x) {
                return Err(Error::CarrierMismatch);
            }
            reps.insert(carrier.s_key(x, &support));
        }
        Ok(FsSubset { carrier, support, reps }.normalized())
    }

    pub fn carrier(&self) -> &Arc<OrbitFiniteSet> {
        &self.carrier
    }

    /// The least support.
    pub fn support(&self) -> &AtomSet {
        &self.support
    }

    /// Canonical `Perm_S`-orbit representatives, `S` the least support.
    pub fn reps(&self) -> impl Iterator<Item = &Element> {
        self.reps.iter()
    }

    pub fn rep_count(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn is_equivariant(&self) -> bool {
        self.support.is_empty()
    }

    /// Carrier orbits meeting the subset.
    pub fn orbits(&self) -> BTreeSet<usize> {
        self.reps.iter().map(Element::orbit).collect()
    }

    pub fn member(&self, x: &Element) -> Result<bool> {
        if !self.carrier.contains(x) {
            return Err(Error::CarrierMismatch);
        }
        Ok(self.reps.contains(&self.carrier.s_key(x, &self.support)))
    }

    /// Representatives relative to a larger support `t ⊇ supp`.
    pub fn reps_over(&self, t: &AtomSet) -> BTreeSet<Element> {
        debug_assert!(self.support.is_subset(t));
        if *t == self.support {
            return self.reps.clone();
        }
        let mut out = BTreeSet::new();
        for orbit in self.orbits() {
            for r in self.carrier.s_orbit_reps_of(orbit, t) {
                if self.reps.contains(&self.carrier.s_key(&r, &self.support)) {
                    out.insert(r);
                }
            }
        }
        out
    }

    pub fn act(&self, pi: &Permutation) -> FsSubset {
        let support = pi.apply_set(&self.support);
        let reps = self
            .reps
            .iter()
            .map(|r| self.carrier.s_key(&self.carrier.act(pi, r), &support))
            .collect();
        FsSubset { carrier: self.carrier.clone(), support, reps }
    }

    pub fn boolean(&self, op: BoolOp, other: &FsSubset) -> Result<FsSubset> {
        if !same_carrier(&self.carrier, &other.carrier) {
            return Err(Error::CarrierMismatch);
        }
        let t: AtomSet = self.support.union(&other.support).copied().collect();
        let a = self.reps_over(&t);
        let b = other.reps_over(&t);
        let reps: BTreeSet<Element> = match op {
            BoolOp::Union => a.union(&b).cloned().collect(),
            BoolOp::Intersect => a.intersection(&b).cloned().collect(),
            BoolOp::Difference => a.difference(&b).cloned().collect(),
            BoolOp::SymmetricDifference => a.symmetric_difference(&b).cloned().collect(),
        };
        Ok(FsSubset { carrier: self.carrier.clone(), support: t, reps }.normalized())
    }

    pub fn union(&self, other: &FsSubset) -> Result<FsSubset> {
        self.boolean(BoolOp::Union, other)
    }

    pub fn intersect(&self, other: &FsSubset) -> Result<FsSubset> {
        self.boolean(BoolOp::Intersect, other)
    }

    pub fn complement(&self) -> FsSubset {
        let reps = self
            .carrier
            .s_orbit_reps(&self.support)
            .into_iter()
            .filter(|r| !self.reps.contains(r))
            .collect();
        FsSubset { carrier: self.carrier.clone(), support: self.support.clone(), reps }
    }

    pub fn is_subset(&self, other: &FsSubset) -> Result<bool> {
        Ok(self.boolean(BoolOp::Difference, other)?.is_empty())
    }

    /// `hull_S(U)`: the smallest `S`-supported superset, i.e. the union of
    /// all `π·U` with `π` fixing `S`.
    pub fn hull(&self, s: &AtomSet) -> FsSubset {
        let t: AtomSet = self.support.union(s).copied().collect();
        let reps = self.reps_over(&t).iter().map(|r| self.carrier.s_key(r, s)).collect();
        FsSubset { carrier: self.carrier.clone(), support: s.clone(), reps }.normalized()
    }

    /// Elements of the subset whose atoms lie in `pool`.
    pub fn elements_over(&self, pool: &AtomSet) -> Vec<Element> {
        self.carrier
            .elements_over(pool)
            .into_iter()
            .filter(|x| self.reps.contains(&self.carrier.s_key(x, &self.support)))
            .collect()
    }

    /// Structural equality after refining both sides to a common support.
    fn denotes_same(&self, other: &FsSubset) -> bool {
        let t: AtomSet = self.support.union(&other.support).copied().collect();
        self.reps_over(&t) == other.reps_over(&t)
    }

    /// Shrinks the stored support to the least support: `a` is kept iff
    /// swapping it with a fresh atom changes the subset.
    fn normalized(self) -> FsSubset {
        let fresh = fresh_atoms(&self.support, 1)[0];
        let least: AtomSet = self
            .support
            .iter()
            .copied()
            .filter(|&a| !self.act(&Permutation::transposition(a, fresh)).denotes_same(&self))
            .collect();
        if least == self.support {
            return self;
        }
        let reps = self.reps.iter().map(|r| self.carrier.s_key(r, &least)).collect();
        FsSubset { carrier: self.carrier, support: least, reps }
    }
}

impl fmt::Display for FsSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{support")?;
        for a in &self.support {
            write!(f, " {a}")?;
        }
        write!(f, ";")?;
        for r in &self.reps {
            write!(f, " {r}")?;
        }
        write!(f, "}}")
    }
}

/// The atoms of the boolean algebra `P_fs X`: the singletons `{x}`.
#[derive(Clone, Debug)]
pub struct PowersetAtoms {
    carrier: Arc<OrbitFiniteSet>,
}

pub fn powerset_atoms(carrier: Arc<OrbitFiniteSet>) -> PowersetAtoms {
    PowersetAtoms { carrier }
}

impl PowersetAtoms {
    pub fn atom_of(&self, x: &Element) -> Result<FsSubset> {
        FsSubset::singleton(self.carrier.clone(), x)
    }

    /// The point `x` with `U = {x}`, if `U` is an atom.
    pub fn element_of(&self, u: &FsSubset) -> Option<Element> {
        if u.rep_count() != 1 {
            return None;
        }
        let r = u.reps().next()?;
        r.atoms().iter().all(|a| u.support().contains(a)).then(|| r.clone())
    }

    /// `U` is an atom iff it is non-empty and has no non-empty proper
    /// finitely supported subset.
    pub fn is_atom(&self, u: &FsSubset) -> bool {
        self.element_of(u).is_some()
    }

    /// The atoms as a nominal set: one orbit per carrier orbit, its
    /// dimension the least support size of the representative singleton.
    pub fn atom_set_dims(&self) -> Vec<usize> {
        self.carrier
            .reps()
            .iter()
            .map(|x| FsSubset::singleton(self.carrier.clone(), x).map(|u| u.support().len()).unwrap_or(0))
            .collect()
    }

    /// Checks `x ↦ {x}` is a bijection onto the atoms on every element over
    /// `pool`, and that supports are preserved.
    pub fn verify_bijection(&self, pool: &AtomSet) -> bool {
        let elements = self.carrier.elements_over(pool);
        let mut seen = BTreeSet::new();
        for x in &elements {
            let Ok(u) = self.atom_of(x) else { return false };
            if !self.is_atom(&u) || self.element_of(&u).as_ref() != Some(x) {
                return false;
            }
            if *u.support() != x.support() || !seen.insert(u.reps().next().cloned()) {
                return false;
            }
        }
        let dims: Vec<usize> = self.carrier.orbits().iter().map(|o| o.dim()).collect();
        dims == self.atom_set_dims()
    }

    /// `U` is the supremum of the `S`-hulls of the atoms it contains, `S`
    /// its least support.
    pub fn is_supremum_of_atoms(&self, u: &FsSubset) -> Result<bool> {
        let mut acc = FsSubset::empty(self.carrier.clone());
        for r in u.reps() {
            acc = acc.union(&self.atom_of(r)?.hull(u.support()))?;
        }
        Ok(acc == *u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nominal::{atoms, Atom};

    fn a() -> Arc<OrbitFiniteSet> {
        Arc::new(OrbitFiniteSet::atoms())
    }

    fn el(x: &Arc<OrbitFiniteSet>, orbit: usize, ids: &[u32]) -> Element {
        let t: Vec<Atom> = ids.iter().map(|&i| Atom(i)).collect();
        x.element(orbit, &t).unwrap()
    }

    #[test]
    fn singleton_and_cofinite() {
        let x = a();
        let sa = FsSubset::singleton(x.clone(), &el(&x, 0, &[1])).unwrap();
        let cof = sa.complement();
        assert!(sa.intersect(&cof).unwrap().is_empty());
        assert_eq!(sa.union(&cof).unwrap(), FsSubset::full(x.clone()));
        assert!(cof.member(&el(&x, 0, &[5])).unwrap());
        assert!(!cof.member(&el(&x, 0, &[1])).unwrap());
        assert_eq!(*cof.support(), atoms([1]));
    }

    #[test]
    fn hull_examples() {
        let sq = Arc::new(OrbitFiniteSet::strong(&[2]));
        let ab = FsSubset::singleton(sq.clone(), &el(&sq, 0, &[1, 2])).unwrap();
        let h = ab.hull(&atoms([1]));
        assert_eq!(*h.support(), atoms([1]));
        assert!(h.member(&el(&sq, 0, &[1, 7])).unwrap());
        assert!(!h.member(&el(&sq, 0, &[7, 1])).unwrap());
        assert_eq!(ab.hull(&atoms([1, 2])), ab);
        assert_eq!(ab.hull(&AtomSet::new()), FsSubset::full(sq));
    }

    #[test]
    fn least_support_of_s_orbit() {
        let sq = Arc::new(OrbitFiniteSet::strong(&[2]));
        let u = FsSubset::from_elements(sq.clone(), atoms([1, 3]), &[el(&sq, 0, &[1, 2]), el(&sq, 0, &[1, 3])])
            .unwrap();
        assert_eq!(*u.support(), atoms([1]));
        assert!(FsSubset::empty(sq).support().is_empty());
    }

    #[test]
    fn atoms_of_powerset() {
        let x = a();
        let p = powerset_atoms(x.clone());
        assert!(p.verify_bijection(&atoms([1, 2, 3])));
        let two = FsSubset::from_elements(x.clone(), atoms([1, 2]), &[el(&x, 0, &[1]), el(&x, 0, &[2])]).unwrap();
        assert!(!p.is_atom(&two));
        assert!(p.is_supremum_of_atoms(&two).unwrap());
    }
}
