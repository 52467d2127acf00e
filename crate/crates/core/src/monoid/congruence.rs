use std::collections::BTreeSet;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fs_sets::FsSubset;
use crate::monoid::{MonoidMorphism, NominalMonoid};
use crate::nominal::{
    all_position_perms, fresh_atoms, orbit_pair_reps, Atom, Element, EquivariantMap, OrbitDescriptor,
    OrbitFiniteSet, OrbitImage, Permutation, ProductSet, DEFAULT_GROUP_CAP,
};

/// An equivariant monoid congruence, stored as a union of orbits of
/// `M × M`.
#[derive(Clone, Debug)]
pub struct Congruence {
    monoid: Arc<NominalMonoid>,
    square: Arc<ProductSet>,
    inside: Vec<bool>,
}

impl Congruence {
    /// The equality relation.
    pub fn identity(m: &Arc<NominalMonoid>) -> Result<Self> {
        congruence_generated(m, &[], &Budget::unlimited())
    }

    /// Wraps a set of `M × M` orbits, checking the congruence laws.
    pub fn from_orbits(m: &Arc<NominalMonoid>, orbits: &BTreeSet<usize>) -> Result<Self> {
        let square = m.square()?.clone();
        let mut inside = vec![false; square.set().orbit_count()];
        for &o in orbits {
            *inside.get_mut(o).ok_or(Error::NoSuchOrbit { index: o, count: square.set().orbit_count() })? = true;
        }
        let c = Congruence { monoid: m.clone(), square, inside };
        match c.check().first() {
            Some(problem) => Err(Error::Invalid(problem.clone())),
            None => Ok(c),
        }
    }

    pub fn monoid(&self) -> &Arc<NominalMonoid> {
        &self.monoid
    }

    pub fn contains(&self, x: &Element, y: &Element) -> bool {
        self.inside[self.square.pair(x, y).orbit()]
    }

    pub fn pair_orbits(&self) -> BTreeSet<usize> {
        (0..self.inside.len()).filter(|&o| self.inside[o]).collect()
    }

    /// The relation as a finitely supported subset of `M × M`.
    pub fn pairs(&self) -> FsSubset {
        let orbits: Vec<usize> = self.pair_orbits().into_iter().collect();
        FsSubset::of_orbits(self.square.set().clone(), &orbits)
    }

    pub fn is_identity(&self) -> bool {
        self.square.rep_pairs().iter().enumerate().all(|(o, (x, y))| self.inside[o] == (x == y))
    }

    /// Violations of reflexivity, symmetry, transitivity and compatibility,
    /// each checked on orbit representatives.
    pub fn check(&self) -> Vec<String> {
        let m = &self.monoid;
        let mut out = Vec::new();
        for x in m.carrier().reps() {
            if !self.contains(&x, &x) {
                out.push(format!("not reflexive at {}", m.show(&x)));
            }
        }
        for (o, (x, y)) in self.square.rep_pairs().into_iter().enumerate() {
            if !self.inside[o] {
                continue;
            }
            if !self.contains(&y, &x) {
                out.push(format!("not symmetric at ({}, {})", m.show(&x), m.show(&y)));
            }
            for j in 0..m.orbit_count() {
                for (c, z) in orbit_pair_reps(self.square.set(), o, m.carrier(), j) {
                    let (x, y) = self.square.unpair(&c);
                    if self.contains(&y, &z) && !self.contains(&x, &z) {
                        out.push(format!(
                            "not transitive at ({}, {}, {})",
                            m.show(&x),
                            m.show(&y),
                            m.show(&z)
                        ));
                    }
                    if !self.contains(&m.mul(&x, &z), &m.mul(&y, &z))
                        || !self.contains(&m.mul(&z, &x), &m.mul(&z, &y))
                    {
                        out.push(format!(
                            "not compatible at ({}, {}) with {}",
                            m.show(&x),
                            m.show(&y),
                            m.show(&z)
                        ));
                    }
                }
            }
        }
        out
    }
}

/// The least equivariant monoid congruence containing the seed pairs.
///
/// Closure runs over orbit representatives of `(M × M) × M`, which cover
/// every multiplier and every middle element up to renaming.
pub fn congruence_generated(
    m: &Arc<NominalMonoid>,
    seeds: &[(Element, Element)],
    budget: &Budget,
) -> Result<Congruence> {
    let square = m.square()?.clone();
    let mut inside = vec![false; square.set().orbit_count()];
    let mut queue: Vec<usize> = Vec::new();
    let add = |o: usize, inside: &mut Vec<bool>, queue: &mut Vec<usize>| {
        if !inside[o] {
            inside[o] = true;
            queue.push(o);
        }
    };
    for x in m.carrier().reps() {
        add(square.pair(&x, &x).orbit(), &mut inside, &mut queue);
    }
    for (x, y) in seeds {
        if !m.carrier().contains(x) || !m.carrier().contains(y) {
            return Err(Error::CarrierMismatch);
        }
        add(square.pair(x, y).orbit(), &mut inside, &mut queue);
    }
    while let Some(o) = queue.pop() {
        let (x, y) = square.unpair(&square.set().rep(o));
        add(square.pair(&y, &x).orbit(), &mut inside, &mut queue);
        for j in 0..m.orbit_count() {
            for (c, z) in orbit_pair_reps(square.set(), o, m.carrier(), j) {
                budget.charge(1)?;
                let (x, y) = square.unpair(&c);
                add(square.pair(&m.mul(&x, &z), &m.mul(&y, &z)).orbit(), &mut inside, &mut queue);
                add(square.pair(&m.mul(&z, &x), &m.mul(&z, &y)).orbit(), &mut inside, &mut queue);
                if inside[square.pair(&y, &z).orbit()] {
                    add(square.pair(&x, &z).orbit(), &mut inside, &mut queue);
                }
            }
        }
    }
    Ok(Congruence { monoid: m.clone(), square, inside })
}

/// `M / C` with its projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub monoid: Arc<NominalMonoid>,
    pub projection: MonoidMorphism,
    pub congruence: Congruence,
}

struct ClassOrbit {
    /// Representative `m*` of the chosen source orbit.
    rep: Element,
    /// Least support of the class of `m*`, ascending.
    support: Vec<Atom>,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut i = i;
    while parent[i] != r {
        let next = parent[i];
        parent[i] = r;
        i = next;
    }
    r
}

pub fn quotient(c: &Congruence, budget: &Budget) -> Result<Quotient> {
    let m = &c.monoid;
    let square = &c.square;
    let n = m.orbit_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for o in c.pair_orbits() {
        let (i, j) = square.components(o);
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    // Quotient orbits, keyed by the least source orbit of each class.
    let roots: Vec<usize> = (0..n).filter(|&i| find(&mut parent, i) == i).collect();
    let q_index = |parent: &mut [usize], i: usize| roots.binary_search(&find(parent, i)).expect("root");

    let mut classes: Vec<ClassOrbit> = Vec::with_capacity(roots.len());
    let mut descriptors: Vec<OrbitDescriptor> = Vec::with_capacity(roots.len());
    for &root in &roots {
        let rep = m.carrier().rep(root);
        let fresh = fresh_atoms(rep.atoms(), 1)[0];
        let support: Vec<Atom> = rep
            .atoms()
            .iter()
            .copied()
            .filter(|&a| !c.contains(&m.carrier().act(&Permutation::transposition(a, fresh), &rep), &rep))
            .collect();
        let mut group = Vec::new();
        for sigma in all_position_perms(support.len()) {
            budget.charge(1)?;
            let pi = Permutation::from_mapping(support.iter().enumerate().map(|(i, &a)| (a, support[sigma[i]])))?;
            if c.contains(&m.carrier().act(&pi, &rep), &rep) {
                group.push(sigma);
            }
        }
        let label = m.carrier().orbits()[root].label().to_string();
        descriptors.push(OrbitDescriptor::from_group_elements(label, support.len(), group, DEFAULT_GROUP_CAP)?);
        classes.push(ClassOrbit { rep, support });
    }
    let q_carrier = Arc::new(OrbitFiniteSet::new(descriptors));

    let mut assignment = Vec::with_capacity(n);
    for i in 0..n {
        let qi = q_index(&mut parent, i);
        let target = roots[qi];
        let o = square
            .orbits_over(i, target)
            .into_iter()
            .find(|&o| c.inside[o])
            .ok_or_else(|| Error::Invalid("congruence is not transitive".into()))?;
        let (x, y) = square.unpair(&square.set().rep(o));
        debug_assert_eq!(x, m.carrier().rep(i));
        let positions = classes[qi]
            .support
            .iter()
            .map(|a| {
                let image = y.atoms()[a.0 as usize - 1];
                x.atoms()
                    .iter()
                    .position(|&b| b == image)
                    .ok_or_else(|| Error::Invalid("class support escapes its representative".into()))
            })
            .collect::<Result<Vec<usize>>>()?;
        assignment.push(OrbitImage::new(qi, positions));
    }
    let projection_map = EquivariantMap::new(m.carrier().clone(), q_carrier.clone(), assignment)?;

    // A preimage of a quotient element, with atoms outside its support fresh
    // for `avoid`.
    let section = |u: &Element, avoid: &[Atom]| -> Element {
        let class = &classes[u.orbit()];
        let extra: Vec<Atom> = class.rep.atoms().iter().copied().filter(|a| !class.support.contains(a)).collect();
        let mut taken: Vec<Atom> = avoid.to_vec();
        taken.extend_from_slice(u.atoms());
        let fresh = fresh_atoms(&taken, extra.len());
        let rename = |a: Atom| -> Atom {
            match class.support.iter().position(|&b| b == a) {
                Some(i) => u.atoms()[i],
                None => fresh[extra.iter().position(|&b| b == a).expect("extra atom")],
            }
        };
        let tuple: Vec<Atom> = class.rep.atoms().iter().map(|&a| rename(a)).collect();
        m.carrier().element_unchecked(class.rep.orbit(), &tuple)
    };
    let unit = projection_map.apply_unchecked(m.unit());
    let q = NominalMonoid::from_fn(format!("{}/~", m.name()), q_carrier, unit, |u, v| {
        let mut avoid: Vec<Atom> = u.atoms().to_vec();
        avoid.extend_from_slice(v.atoms());
        let su = section(u, &avoid);
        avoid.extend_from_slice(su.atoms());
        let sv = section(v, &avoid);
        Ok(projection_map.apply_unchecked(&m.mul(&su, &sv)))
    })?;
    let q = Arc::new(q);
    let projection = MonoidMorphism::from_parts(m.clone(), q.clone(), projection_map)?;
    Ok(Quotient { monoid: q, projection, congruence: c.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{builder, isomorphic};

    #[test]
    fn empty_seed_gives_identity() {
        let m = Arc::new(builder("l0").unwrap());
        let b = Budget::default();
        let c = congruence_generated(&m, &[], &b).unwrap();
        assert!(c.is_identity());
        let q = quotient(&c, &b).unwrap();
        assert!(isomorphic(&q.monoid, &m, &b).unwrap());
    }

    #[test]
    fn collapsing_atoms_in_first_proj() {
        let m = Arc::new(builder("first-proj").unwrap());
        let b = Budget::default();
        let a = m.carrier().element(1, &[Atom(1)]).unwrap();
        let bb = m.carrier().element(1, &[Atom(2)]).unwrap();
        let c = congruence_generated(&m, &[(a, bb)], &b).unwrap();
        assert!(c.check().is_empty());
        let q = quotient(&c, &b).unwrap();
        assert_eq!(q.monoid.orbit_count(), 2);
        assert_eq!(q.monoid.carrier().bound(), 0);
        assert!(q.monoid.validate().is_valid());
        assert!(q.projection.validate().is_valid());
    }

    #[test]
    fn pair_zero_collapse_gives_zero_adjoined() {
        let m = Arc::new(builder("pair-zero").unwrap());
        let b = Budget::default();
        let ab = m.carrier().rep(2);
        let zero = m.carrier().rep(3);
        let c = congruence_generated(&m, &[(ab, zero)], &b).unwrap();
        let q = quotient(&c, &b).unwrap();
        assert!(isomorphic(&q.monoid, &builder("zero-adjoined").unwrap(), &b).unwrap());
    }
}
