use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nominal::atom::Atom;
use crate::nominal::orbit::{Element, PositionPerm};
use crate::nominal::set::OrbitFiniteSet;

/// Where one source orbit goes: the target orbit, and for each target
/// position the source position supplying its atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitImage {
    pub target_orbit: usize,
    pub positions: Vec<usize>,
}

impl OrbitImage {
    pub fn new(target_orbit: usize, positions: Vec<usize>) -> Self {
        OrbitImage { target_orbit, positions }
    }
}

/// A source-group generator that moves the assigned target tuple out of its
/// coset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapViolation {
    pub orbit: usize,
    pub generator: PositionPerm,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MapReport {
    pub shape_errors: Vec<String>,
    pub violations: Vec<MapViolation>,
}

impl MapReport {
    pub fn is_valid(&self) -> bool {
        self.shape_errors.is_empty() && self.violations.is_empty()
    }
}

impl fmt::Display for MapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "well-defined");
        }
        for e in &self.shape_errors {
            writeln!(f, "{e}")?;
        }
        for v in &self.violations {
            writeln!(f, "orbit {} breaks under generator {:?}", v.orbit, v.generator)?;
        }
        Ok(())
    }
}

/// An equivariant map between orbit-finite sets, given orbitwise.
///
/// The image of a point only uses atoms of the point, so
/// `supp f(x) ⊆ supp x` by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantMap {
    source: Arc<OrbitFiniteSet>,
    target: Arc<OrbitFiniteSet>,
    assignment: Vec<OrbitImage>,
}

impl EquivariantMap {
    /// Builds the map and rejects it unless it is well-defined.
    pub fn new(
        source: Arc<OrbitFiniteSet>,
        target: Arc<OrbitFiniteSet>,
        assignment: Vec<OrbitImage>,
    ) -> Result<Self> {
        let map = EquivariantMap { source, target, assignment };
        let report = map.check_well_defined();
        if report.is_valid() {
            Ok(map)
        } else {
            Err(Error::NotEquivariant(report.to_string().trim_end().to_string()))
        }
    }

    /// Builds the map without checking; use [`EquivariantMap::check_well_defined`].
    pub fn from_parts(
        source: Arc<OrbitFiniteSet>,
        target: Arc<OrbitFiniteSet>,
        assignment: Vec<OrbitImage>,
    ) -> Self {
        EquivariantMap { source, target, assignment }
    }

    pub fn identity(set: Arc<OrbitFiniteSet>) -> Self {
        let assignment = set
            .orbits()
            .iter()
            .enumerate()
            .map(|(i, o)| OrbitImage::new(i, (0..o.dim()).collect()))
            .collect();
        EquivariantMap { source: set.clone(), target: set, assignment }
    }

    /// Tabulates `f` on orbit representatives. `f` must be equivariant; its
    /// value on each representative must be supported by the representative.
    pub fn tabulate(
        source: Arc<OrbitFiniteSet>,
        target: Arc<OrbitFiniteSet>,
        f: impl Fn(&Element) -> Result<Element>,
    ) -> Result<Self> {
        let mut assignment = Vec::with_capacity(source.orbit_count());
        for orbit in 0..source.orbit_count() {
            let x = source.rep(orbit);
            let y = f(&x)?;
            if !target.contains(&y) {
                return Err(Error::InvalidMorphism(format!(
                    "value {y} on orbit {orbit} is not an element of the target"
                )));
            }
            let positions = y
                .atoms()
                .iter()
                .map(|a| {
                    x.atoms().iter().position(|b| b == a).ok_or_else(|| {
                        Error::NotEquivariant(format!(
                            "value {y} on {x} uses atom {a} outside the support of its argument"
                        ))
                    })
                })
                .collect::<Result<Vec<usize>>>()?;
            assignment.push(OrbitImage::new(y.orbit(), positions));
        }
        EquivariantMap::new(source, target, assignment)
    }

    pub fn source(&self) -> &Arc<OrbitFiniteSet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<OrbitFiniteSet> {
        &self.target
    }

    pub fn assignment(&self) -> &[OrbitImage] {
        &self.assignment
    }

    pub fn check_well_defined(&self) -> MapReport {
        let mut report = MapReport::default();
        if self.assignment.len() != self.source.orbit_count() {
            report.shape_errors.push(format!(
                "assignment covers {} orbits, source has {}",
                self.assignment.len(),
                self.source.orbit_count()
            ));
            return report;
        }
        for (orbit, img) in self.assignment.iter().enumerate() {
            let src = &self.source.orbits()[orbit];
            let Some(tgt) = self.target.orbits().get(img.target_orbit) else {
                report
                    .shape_errors
                    .push(format!("orbit {orbit} maps to missing target orbit {}", img.target_orbit));
                continue;
            };
            if img.positions.len() != tgt.dim() {
                report.shape_errors.push(format!(
                    "orbit {orbit}: {} positions for a target orbit of dimension {}",
                    img.positions.len(),
                    tgt.dim()
                ));
                continue;
            }
            let mut seen = vec![false; src.dim()];
            let mut injective = true;
            for &p in &img.positions {
                if p >= src.dim() || seen[p] {
                    injective = false;
                    break;
                }
                seen[p] = true;
            }
            if !injective {
                report
                    .shape_errors
                    .push(format!("orbit {orbit}: positions {:?} are not injective", img.positions));
                continue;
            }
            let base: Vec<Atom> = img.positions.iter().map(|&p| Atom(p as u32 + 1)).collect();
            let base = tgt.canonical_tuple(&base);
            for g in src.generators() {
                let moved: Vec<Atom> =
                    img.positions.iter().map(|&p| Atom(g[p] as u32 + 1)).collect();
                if tgt.canonical_tuple(&moved) != base {
                    report.violations.push(MapViolation { orbit, generator: g.clone() });
                }
            }
        }
        report
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if !self.source.contains(x) {
            return Err(Error::NoSuchOrbit { index: x.orbit(), count: self.source.orbit_count() });
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Element) -> Element {
        let img = &self.assignment[x.orbit];
        let tuple: Vec<Atom> = img.positions.iter().map(|&p| x.atoms[p]).collect();
        self.target.element_unchecked(img.target_orbit, &tuple)
    }

    /// Target orbit of each source orbit.
    pub fn orbit_map(&self) -> Vec<usize> {
        self.assignment.iter().map(|i| i.target_orbit).collect()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &EquivariantMap) -> Result<EquivariantMap> {
        if *self.target != *next.source {
            return Err(Error::CarrierMismatch);
        }
        let assignment = self
            .assignment
            .iter()
            .map(|img| {
                let second = &next.assignment[img.target_orbit];
                // The intermediate tuple is canonical, so positions of `next`
                // refer to its sorted atoms rather than to `img.positions`.
                let mid_tuple: Vec<Atom> = img.positions.iter().map(|&p| Atom(p as u32 + 1)).collect();
                let mid = self.target.element_unchecked(img.target_orbit, &mid_tuple);
                let positions =
                    second.positions.iter().map(|&q| mid.atoms[q].0 as usize - 1).collect();
                OrbitImage::new(second.target_orbit, positions)
            })
            .collect();
        Ok(EquivariantMap {
            source: self.source.clone(),
            target: next.target.clone(),
            assignment,
        })
    }

    /// Surjective on orbits.
    pub fn is_orbit_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.orbit_count()];
        for img in &self.assignment {
            hit[img.target_orbit] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Whether two maps agree on every source orbit representative.
    pub fn agrees_with(&self, other: &EquivariantMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && self
                .source
                .reps()
                .iter()
                .all(|x| self.apply_unchecked(x) == other.apply_unchecked(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nominal::atom::Permutation;
    use crate::nominal::orbit::OrbitDescriptor;

    fn sym_pairs() -> Arc<OrbitFiniteSet> {
        Arc::new(OrbitFiniteSet::new(vec![OrbitDescriptor::new("P", 2, vec![vec![1, 0]]).unwrap()]))
    }

    #[test]
    fn identity_is_valid() {
        let x = sym_pairs();
        assert!(EquivariantMap::identity(x).check_well_defined().is_valid());
    }

    #[test]
    fn first_of_unordered_pair_is_invalid() {
        let f = EquivariantMap::from_parts(
            sym_pairs(),
            Arc::new(OrbitFiniteSet::atoms()),
            vec![OrbitImage::new(0, vec![0])],
        );
        let report = f.check_well_defined();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].generator, vec![1, 0]);
    }

    #[test]
    fn first_of_ordered_pair() {
        let a = Arc::new(OrbitFiniteSet::atoms());
        let a2 = Arc::new(OrbitFiniteSet::strong(&[2]));
        let f = EquivariantMap::new(a2.clone(), a.clone(), vec![OrbitImage::new(0, vec![0])]).unwrap();
        let x = a2.element(0, &[Atom(5), Atom(2)]).unwrap();
        assert_eq!(f.apply(&x).unwrap().atoms(), &[Atom(5)]);
        let pi = Permutation::transposition(Atom(5), Atom(9));
        assert_eq!(f.apply(&a2.act(&pi, &x)).unwrap(), a.act(&pi, &f.apply(&x).unwrap()));
    }

    #[test]
    fn composition_with_identity() {
        let a2 = Arc::new(OrbitFiniteSet::strong(&[2]));
        let a = Arc::new(OrbitFiniteSet::atoms());
        let f = EquivariantMap::new(a2.clone(), a.clone(), vec![OrbitImage::new(0, vec![1])]).unwrap();
        let id = EquivariantMap::identity(a2.clone());
        assert!(id.then(&f).unwrap().agrees_with(&f));
        assert!(f.then(&EquivariantMap::identity(a)).unwrap().agrees_with(&f));
    }

    #[test]
    fn tabulate_rejects_foreign_atoms() {
        let a = Arc::new(OrbitFiniteSet::atoms());
        let r = EquivariantMap::tabulate(a.clone(), a.clone(), |_| Ok(a.element(0, &[Atom(7)]).unwrap()));
        assert!(r.is_err());
    }
}
