use std::collections::BTreeSet;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::monoid::{GeneratorMap, MonoidMorphism, NominalMonoid};
use crate::nominal::{Element, EquivariantMap, OrbitImage, ProductSet, DEFAULT_ORBIT_CAP};

/// `M × N` with its projections. Multiplication is computed componentwise;
/// the full table is only tabulated when asked for.
#[derive(Clone, Debug)]
pub struct ProductMonoid {
    pub monoid: Arc<NominalMonoid>,
    pub pairing: Arc<ProductSet>,
    pub left: MonoidMorphism,
    pub right: MonoidMorphism,
}

impl ProductMonoid {
    pub fn pair(&self, x: &Element, y: &Element) -> Element {
        self.pairing.pair(x, y)
    }

    pub fn unpair(&self, z: &Element) -> (Element, Element) {
        self.pairing.unpair(z)
    }
}

pub fn product_monoid(m: &Arc<NominalMonoid>, n: &Arc<NominalMonoid>) -> Result<ProductMonoid> {
    let pairing = Arc::new(ProductSet::new(m.carrier().clone(), n.carrier().clone())?);
    let unit = pairing.pair(m.unit(), n.unit());
    let (pm, pn, pp) = (m.clone(), n.clone(), pairing.clone());
    let mul = Arc::new(move |x: &Element, y: &Element| {
        let (a, b) = pp.unpair(x);
        let (c, d) = pp.unpair(y);
        pp.pair(&pm.mul(&a, &c), &pn.mul(&b, &d))
    });
    let monoid = Arc::new(NominalMonoid::derived(
        format!("{}×{}", m.name(), n.name()),
        pairing.set().clone(),
        unit,
        mul,
    ));
    let left = MonoidMorphism::from_parts(monoid.clone(), m.clone(), pairing.left_projection())?;
    let right = MonoidMorphism::from_parts(monoid.clone(), n.clone(), pairing.right_projection())?;
    Ok(ProductMonoid { monoid, pairing, left, right })
}

/// `⟨h1, h2⟩ : D → M × N` for morphisms with a common domain.
pub fn pair_morphisms(h1: &MonoidMorphism, h2: &MonoidMorphism) -> Result<(ProductMonoid, MonoidMorphism)> {
    if !Arc::ptr_eq(h1.dom(), h2.dom()) && h1.dom().carrier() != h2.dom().carrier() {
        return Err(Error::CarrierMismatch);
    }
    let p = product_monoid(h1.cod(), h2.cod())?;
    let h = MonoidMorphism::from_fn(h1.dom().clone(), p.monoid.clone(), |x| {
        Ok(p.pair(&h1.at(x), &h2.at(x)))
    })?;
    Ok((p, h))
}

/// `⟨h1, h2⟩ : Σ → M × N` for generator maps on a common alphabet.
pub fn pair_generator_maps(h1: &GeneratorMap, h2: &GeneratorMap) -> Result<(ProductMonoid, GeneratorMap)> {
    if h1.alphabet() != h2.alphabet() {
        return Err(Error::CarrierMismatch);
    }
    let p = product_monoid(h1.monoid(), h2.monoid())?;
    let h = GeneratorMap::from_fn(h1.alphabet().clone(), p.monoid.clone(), |x| {
        Ok(p.pair(&h1.letter(x), &h2.letter(x)))
    })?;
    Ok((p, h))
}

/// An equivariant submonoid, i.e. a multiplicatively closed union of
/// orbits containing the unit, with its inclusion.
#[derive(Clone, Debug)]
pub struct Submonoid {
    pub monoid: Arc<NominalMonoid>,
    /// Parent orbit of each orbit of the submonoid, ascending.
    pub orbits: Vec<usize>,
    pub inclusion: MonoidMorphism,
}

impl Submonoid {
    /// The submonoid element corresponding to a parent element.
    pub fn restrict(&self, x: &Element) -> Option<Element> {
        let i = self.orbits.binary_search(&x.orbit()).ok()?;
        Some(Element { orbit: i, atoms: x.atoms.clone() })
    }

    pub fn lift(&self, x: &Element) -> Element {
        Element { orbit: self.orbits[x.orbit], atoms: x.atoms.clone() }
    }
}

/// Orbits of the least equivariant submonoid containing the given orbits.
pub fn closure_orbits(m: &NominalMonoid, seeds: &[usize], budget: &Budget) -> Result<Vec<usize>> {
    let mut inside = vec![false; m.orbit_count()];
    let mut members: Vec<usize> = Vec::new();
    let mut queue: Vec<usize> = Vec::new();
    for &o in std::iter::once(&m.unit().orbit()).chain(seeds) {
        if !inside[o] {
            inside[o] = true;
            members.push(o);
            queue.push(o);
        }
    }
    while let Some(i) = queue.pop() {
        let current = members.clone();
        for &j in &current {
            for (a, b) in [(i, j), (j, i)] {
                for (x, y) in m.pair_reps(a, b) {
                    budget.charge(1)?;
                    let o = m.mul(&x, &y).orbit();
                    if !inside[o] {
                        inside[o] = true;
                        members.push(o);
                        queue.push(o);
                        if members.len() > DEFAULT_ORBIT_CAP {
                            return Err(Error::OrbitCap { cap: DEFAULT_ORBIT_CAP });
                        }
                    }
                }
            }
        }
    }
    members.sort_unstable();
    Ok(members)
}

/// The submonoid on a set of orbits already known to be closed.
pub fn submonoid_on(m: &Arc<NominalMonoid>, orbits: Vec<usize>) -> Result<Submonoid> {
    let carrier = Arc::new(m.carrier().restrict(&orbits));
    let index = |o: usize| orbits.binary_search(&o).ok();
    let unit = Element { orbit: index(m.unit().orbit()).ok_or_else(|| Error::InvalidMonoid("submonoid misses the unit".into()))?, atoms: Vec::new() };
    let sub = NominalMonoid::from_fn(format!("{}|sub", m.name()), carrier.clone(), unit, |x, y| {
        let z = m.mul(&Element { orbit: orbits[x.orbit], atoms: x.atoms.clone() }, &Element { orbit: orbits[y.orbit], atoms: y.atoms.clone() });
        let o = index(z.orbit).ok_or_else(|| Error::InvalidMonoid("orbit set is not multiplicatively closed".into()))?;
        Ok(Element { orbit: o, atoms: z.atoms })
    })?;
    let sub = Arc::new(sub);
    let assignment = orbits
        .iter()
        .map(|&o| OrbitImage::new(o, (0..m.carrier().orbits()[o].dim()).collect()))
        .collect();
    let map = EquivariantMap::from_parts(carrier, m.carrier().clone(), assignment);
    let inclusion = MonoidMorphism::from_parts(sub.clone(), m.clone(), map)?;
    Ok(Submonoid { monoid: sub, orbits, inclusion })
}

/// The least equivariant submonoid containing `gens`.
pub fn submonoid_generated(m: &Arc<NominalMonoid>, gens: &[Element], budget: &Budget) -> Result<Submonoid> {
    for g in gens {
        if !m.carrier().contains(g) {
            return Err(Error::CarrierMismatch);
        }
    }
    let seeds: Vec<usize> = gens.iter().map(Element::orbit).collect::<BTreeSet<_>>().into_iter().collect();
    let orbits = closure_orbits(m, &seeds, budget)?;
    submonoid_on(m, orbits)
}

/// `h = inclusion ∘ coimage` with `coimage` surjective and `inclusion`
/// injective.
#[derive(Clone, Debug)]
pub struct ImageFactorization {
    pub image: Submonoid,
    pub coimage: MonoidMorphism,
}

pub fn image_factorization(h: &MonoidMorphism, budget: &Budget) -> Result<ImageFactorization> {
    let gens: Vec<Element> = h.dom().carrier().reps().iter().map(|x| h.at(x)).collect();
    let image = submonoid_generated(h.cod(), &gens, budget)?;
    let assignment = h
        .map()
        .assignment()
        .iter()
        .map(|img| {
            let o = image.orbits.binary_search(&img.target_orbit).expect("image orbit");
            OrbitImage::new(o, img.positions.clone())
        })
        .collect();
    let map = EquivariantMap::from_parts(h.dom().carrier().clone(), image.monoid.carrier().clone(), assignment);
    let coimage = MonoidMorphism::from_parts(h.dom().clone(), image.monoid.clone(), map)?;
    Ok(ImageFactorization { image, coimage })
}

/// The image of the free extension of `h0`, and `h0` corestricted to it.
pub fn generated_image(h0: &GeneratorMap, budget: &Budget) -> Result<(Submonoid, GeneratorMap)> {
    let gens: Vec<Element> = h0.alphabet().reps().iter().map(|x| h0.letter(x)).collect();
    let image = submonoid_generated(h0.monoid(), &gens, budget)?;
    let onto = h0.corestrict(&image)?;
    Ok((image, onto))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::builder;
    use crate::nominal::Atom;

    #[test]
    fn p1_times_p2_has_five_orbits() {
        let p1 = Arc::new(builder("first-proj").unwrap());
        let p2 = Arc::new(builder("last-proj").unwrap());
        let p = product_monoid(&p1, &p2).unwrap();
        assert_eq!(p.monoid.orbit_count(), 5);
        assert!(p.monoid.validate().is_valid());
        assert!(p.left.validate().is_valid());
        assert!(p.right.validate().is_valid());
    }

    #[test]
    fn submonoid_examples() {
        let m = Arc::new(builder("barred").unwrap());
        let b = Budget::default();
        assert_eq!(submonoid_generated(&m, &[], &b).unwrap().orbits, vec![0]);
        let a = m.carrier().element(1, &[Atom(1)]).unwrap();
        let s = submonoid_generated(&m, &[a], &b).unwrap();
        assert_eq!(s.orbits, vec![0, 1, 3]);
        assert!(s.monoid.validate().is_valid());
        assert!(s.inclusion.validate().is_valid());
    }

    #[test]
    fn identity_image() {
        let m = Arc::new(builder("l0").unwrap());
        let f = image_factorization(&MonoidMorphism::identity(m.clone()), &Budget::default()).unwrap();
        assert_eq!(f.image.orbits.len(), m.orbit_count());
        assert!(f.coimage.is_surjective());
    }
}
