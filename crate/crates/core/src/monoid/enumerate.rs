use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::monoid::construct::Submonoid;
use crate::monoid::{isomorphic, MonoidMorphism, NominalMonoid};
use crate::nominal::{
    all_position_perms, compose_positions, Atom, AtomSet, Element, EquivariantMap, OrbitDescriptor,
    OrbitFiniteSet, OrbitImage, Permutation, PositionPerm, ProductSet,
};

/// An equivariant map `h0 : Σ → M`, standing for its free extension
/// `h : Σ* → M`.
#[derive(Clone, Debug)]
pub struct GeneratorMap {
    alphabet: Arc<OrbitFiniteSet>,
    monoid: Arc<NominalMonoid>,
    map: EquivariantMap,
}

impl GeneratorMap {
    pub fn new(alphabet: Arc<OrbitFiniteSet>, monoid: Arc<NominalMonoid>, map: EquivariantMap) -> Result<Self> {
        if **map.source() != *alphabet || **map.target() != **monoid.carrier() {
            return Err(Error::CarrierMismatch);
        }
        let report = map.check_well_defined();
        if !report.is_valid() {
            return Err(Error::NotEquivariant(report.to_string().trim_end().to_string()));
        }
        Ok(GeneratorMap { alphabet, monoid, map })
    }

    pub fn from_fn(
        alphabet: Arc<OrbitFiniteSet>,
        monoid: Arc<NominalMonoid>,
        f: impl Fn(&Element) -> Result<Element>,
    ) -> Result<Self> {
        let map = EquivariantMap::tabulate(alphabet.clone(), monoid.carrier().clone(), f)?;
        Ok(GeneratorMap { alphabet, monoid, map })
    }

    pub fn alphabet(&self) -> &Arc<OrbitFiniteSet> {
        &self.alphabet
    }

    pub fn monoid(&self) -> &Arc<NominalMonoid> {
        &self.monoid
    }

    pub fn map(&self) -> &EquivariantMap {
        &self.map
    }

    pub(crate) fn letter(&self, x: &Element) -> Element {
        self.map.apply_unchecked(x)
    }

    pub fn apply(&self, letter: &Element) -> Result<Element> {
        self.map.apply(letter)
    }

    /// `h(w)`: the product of the letter images, the unit on the empty word.
    pub fn eval(&self, word: &[Element]) -> Result<Element> {
        let mut acc = self.monoid.unit().clone();
        for x in word {
            acc = self.monoid.mul(&acc, &self.apply(x)?);
        }
        Ok(acc)
    }

    /// `e ∘ h`.
    pub fn then(&self, e: &MonoidMorphism) -> Result<GeneratorMap> {
        Ok(GeneratorMap {
            alphabet: self.alphabet.clone(),
            monoid: e.cod().clone(),
            map: self.map.then(e.map())?,
        })
    }

    /// The same map into a submonoid containing its image.
    pub fn corestrict(&self, sub: &Submonoid) -> Result<GeneratorMap> {
        let assignment = self
            .map
            .assignment()
            .iter()
            .map(|img| {
                sub.orbits
                    .binary_search(&img.target_orbit)
                    .map(|o| OrbitImage::new(o, img.positions.clone()))
                    .map_err(|_| Error::InvalidMorphism("image leaves the submonoid".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratorMap {
            alphabet: self.alphabet.clone(),
            monoid: sub.monoid.clone(),
            map: EquivariantMap::from_parts(self.alphabet.clone(), sub.monoid.carrier().clone(), assignment),
        })
    }

    /// Whether two maps agree on every letter orbit representative.
    pub fn agrees_with(&self, other: &GeneratorMap) -> bool {
        self.map.agrees_with(&other.map)
    }
}

impl fmt::Display for GeneratorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .alphabet
            .reps()
            .iter()
            .map(|x| format!("{} ↦ {}", self.alphabet.show(x), self.monoid.show(&self.letter(x))))
            .collect();
        write!(f, "{}: {}", self.monoid.name(), parts.join(", "))
    }
}

/// Elements with atoms among `1..=dim` fixed by the permutations induced by
/// the given position generators.
pub fn fixed_elements(carrier: &OrbitFiniteSet, dim: usize, generators: &[PositionPerm]) -> Vec<Element> {
    let pool: AtomSet = (1..=dim as u32).map(Atom).collect();
    let perms: Vec<Permutation> = generators
        .iter()
        .map(|g| {
            Permutation::from_mapping(g.iter().enumerate().map(|(i, &j)| (Atom(i as u32 + 1), Atom(j as u32 + 1))))
                .expect("position permutations are bijections")
        })
        .collect();
    carrier
        .elements_with_support(&pool)
        .into_iter()
        .filter(|m| perms.iter().all(|p| carrier.act(p, m) == *m))
        .collect()
}

fn image_of(target: &Element) -> OrbitImage {
    OrbitImage::new(target.orbit(), target.atoms().iter().map(|a| a.0 as usize - 1).collect())
}

/// Every equivariant `h0 : Σ → M`.
pub fn enumerate_monoid_maps(
    alphabet: &Arc<OrbitFiniteSet>,
    monoid: &Arc<NominalMonoid>,
    budget: &Budget,
) -> Result<Vec<GeneratorMap>> {
    let choices: Vec<Vec<OrbitImage>> = alphabet
        .orbits()
        .iter()
        .map(|o| fixed_elements(monoid.carrier(), o.dim(), o.generators()).iter().map(image_of).collect())
        .collect();
    let mut out = Vec::new();
    for assignment in cartesian(&choices, budget)? {
        let map = EquivariantMap::from_parts(alphabet.clone(), monoid.carrier().clone(), assignment);
        out.push(GeneratorMap { alphabet: alphabet.clone(), monoid: monoid.clone(), map });
    }
    Ok(out)
}

fn cartesian<T: Clone>(choices: &[Vec<T>], budget: &Budget) -> Result<Vec<Vec<T>>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for o in options {
                budget.charge(1)?;
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Positional groups of dimension `dim`, one per conjugacy class.
fn groups_up_to_conjugacy(dim: usize) -> Vec<Vec<PositionPerm>> {
    let all = all_position_perms(dim);
    let mut groups: BTreeSet<Vec<PositionPerm>> = BTreeSet::new();
    for a in &all {
        for b in &all {
            if let Ok(o) = OrbitDescriptor::new("", dim, vec![a.clone(), b.clone()]) {
                groups.insert(o.group().to_vec());
            }
        }
    }
    let mut reps: Vec<Vec<PositionPerm>> = Vec::new();
    for g in groups {
        let conjugate = reps.iter().any(|r| {
            r.len() == g.len()
                && all.iter().any(|p| {
                    let p_inv = crate::nominal::invert_positions(p);
                    let mut c: Vec<PositionPerm> =
                        g.iter().map(|x| compose_positions(&compose_positions(p, x), &p_inv)).collect();
                    c.sort();
                    c == *r
                })
        });
        if !conjugate {
            reps.push(g);
        }
    }
    reps
}

/// All orbit-finite monoids with at most `max_orbits` orbits of dimension at
/// most `max_dim`, up to isomorphism.
pub fn enumerate_small_monoids(max_orbits: usize, max_dim: usize, budget: &Budget) -> Result<Vec<NominalMonoid>> {
    if max_dim > 3 {
        return Err(Error::Invalid(format!("max_dim {max_dim} exceeds the supported 3")));
    }
    let mut shapes: Vec<(usize, Vec<PositionPerm>)> = Vec::new();
    for d in 0..=max_dim {
        for g in groups_up_to_conjugacy(d) {
            shapes.push((d, g));
        }
    }
    let mut found: Vec<NominalMonoid> = Vec::new();
    if max_orbits == 0 {
        return Ok(found);
    }
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(extra) = stack.pop() {
        budget.charge(1)?;
        if extra.len() + 1 < max_orbits {
            let from = extra.last().copied().unwrap_or(0);
            for s in from..shapes.len() {
                let mut e = extra.clone();
                e.push(s);
                stack.push(e);
            }
        }
        let mut orbits = vec![OrbitDescriptor::strong("1", 0)];
        for (i, &s) in extra.iter().enumerate() {
            let (d, g) = &shapes[s];
            let label = format!("O{}", i + 1);
            orbits.push(OrbitDescriptor::from_group_elements(label, *d, g.clone(), usize::MAX)?);
        }
        for m in tables_on(Arc::new(OrbitFiniteSet::new(orbits)), budget)? {
            let mut is_new = true;
            for f in &found {
                if isomorphic(f, &m, budget)? {
                    is_new = false;
                    break;
                }
            }
            if is_new {
                found.push(m.with_name(format!("small{}", found.len())));
            }
        }
    }
    found.sort_by_key(|m| m.orbit_count());
    Ok(found)
}

/// Valid multiplication tables with unit orbit 0 on a fixed carrier.
fn tables_on(carrier: Arc<OrbitFiniteSet>, budget: &Budget) -> Result<Vec<NominalMonoid>> {
    let square = ProductSet::square(carrier.clone())?;
    let choices: Vec<Vec<OrbitImage>> = (0..square.set().orbit_count())
        .map(|o| {
            let (i, j) = square.components(o);
            let desc = &square.set().orbits()[o];
            if i == 0 {
                vec![OrbitImage::new(j, square.right_positions(o).to_vec())]
            } else if j == 0 {
                vec![OrbitImage::new(i, (0..square.left_dim(o)).collect())]
            } else {
                fixed_elements(&carrier, desc.dim(), desc.generators()).iter().map(image_of).collect()
            }
        })
        .collect();
    let unit = carrier.rep(0);
    let mut out = Vec::new();
    for assignment in cartesian(&choices, budget)? {
        let table = EquivariantMap::from_parts(square.set().clone(), carrier.clone(), assignment);
        let m = NominalMonoid::from_table("candidate", carrier.clone(), unit.clone(), table)?;
        budget.charge(1)?;
        if m.validate().is_valid() {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::builder;

    #[test]
    fn maps_into_small_monoids() {
        let a = Arc::new(OrbitFiniteSet::atoms());
        let b = Budget::default();
        let count = |name: &str| enumerate_monoid_maps(&a, &Arc::new(builder(name).unwrap()), &b).unwrap().len();
        assert_eq!(count("trivial"), 1);
        assert_eq!(count("first-proj"), 2);
        assert_eq!(count("zero-adjoined"), 3);
    }

    #[test]
    fn small_monoid_counts() {
        let b = Budget::default();
        assert_eq!(enumerate_small_monoids(1, 1, &b).unwrap().len(), 1);
        assert_eq!(enumerate_small_monoids(2, 1, &b).unwrap().len(), 5);
    }

    #[test]
    fn conjugacy_classes_of_subgroups() {
        assert_eq!(groups_up_to_conjugacy(2).len(), 2);
        assert_eq!(groups_up_to_conjugacy(3).len(), 4);
    }
}
