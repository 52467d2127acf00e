//! Orbit-finite nominal monoids and their morphisms.

mod catalog;
mod congruence;
mod construct;
mod enumerate;
mod iso;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nominal::{
    orbit_pair_reps, Element, EquivariantMap, MapReport, OrbitFiniteSet, OrbitImage,
    ProductSet,
};

pub use catalog::{builder, catalog, catalog_names, catalog_quotient, cutoff, cyclic, quotient_names};
pub use congruence::{congruence_generated, quotient, Congruence, Quotient};
pub use construct::{
    closure_orbits, generated_image, image_factorization, pair_generator_maps, pair_morphisms, product_monoid,
    submonoid_generated, submonoid_on, ImageFactorization, ProductMonoid, Submonoid,
};
pub use enumerate::{enumerate_monoid_maps, enumerate_small_monoids, fixed_elements, GeneratorMap};
pub use iso::{find_isomorphism, isomorphic};

type MulFn = dyn Fn(&Element, &Element) -> Element + Send + Sync;

#[derive(Clone)]
enum Mult {
    Table(EquivariantMap),
    /// Computed pointwise, e.g. componentwise in a product. The table is
    /// tabulated on demand.
    Derived(Arc<MulFn>),
}

/// An orbit-finite nominal monoid.
///
/// The multiplication is an equivariant map `M × M → M` stored on the
/// canonical orbit representatives of `M × M`.
#[derive(Clone)]
pub struct NominalMonoid {
    name: String,
    carrier: Arc<OrbitFiniteSet>,
    unit: Element,
    mult: Mult,
    square: OnceLock<Arc<ProductSet>>,
    table: OnceLock<EquivariantMap>,
}

impl fmt::Debug for NominalMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NominalMonoid")
            .field("name", &self.name)
            .field("carrier", &self.carrier.to_string())
            .field("unit", &self.unit)
            .finish()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MonoidReport {
    pub table: MapReport,
    pub unit_issues: Vec<String>,
    pub unit_failures: Vec<String>,
    pub assoc_failures: Vec<String>,
}

impl MonoidReport {
    pub fn is_valid(&self) -> bool {
        self.table.is_valid()
            && self.unit_issues.is_empty()
            && self.unit_failures.is_empty()
            && self.assoc_failures.is_empty()
    }

    /// First failure, printed with concrete elements.
    pub fn witness(&self) -> Option<String> {
        self.table
            .shape_errors
            .first()
            .cloned()
            .or_else(|| self.table.violations.first().map(|v| format!("product orbit {} is not well-defined under {:?}", v.orbit, v.generator)))
            .or_else(|| self.unit_issues.first().cloned())
            .or_else(|| self.unit_failures.first().cloned())
            .or_else(|| self.assoc_failures.first().cloned())
    }
}

impl fmt::Display for MonoidReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        if !self.table.is_valid() {
            write!(f, "{}", self.table)?;
        }
        for line in self.unit_issues.iter().chain(&self.unit_failures).chain(&self.assoc_failures) {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// The power sequence `x^0, x^1, …` up to its first repetition
/// `x^start = x^(start + period)`.
#[derive(Clone, Debug)]
pub struct PowerCycle {
    pub powers: Vec<Element>,
    pub start: usize,
    pub period: usize,
}

impl PowerCycle {
    pub fn get(&self, exponent: &BigUint) -> Element {
        if let Some(e) = exponent.to_usize() {
            if e < self.powers.len() {
                return self.powers[e].clone();
            }
        }
        let offset = (exponent - BigUint::from(self.start)) % BigUint::from(self.period);
        let offset = offset.to_usize().expect("offset is below the period");
        self.powers[self.start + offset].clone()
    }

    /// `x^(n!)` without expanding `n!`.
    pub fn get_factorial(&self, n: u64) -> Element {
        // n! >= start as soon as the running product passes it.
        let mut value: u128 = 1;
        for i in 2..=n {
            value = value.saturating_mul(i as u128);
            if value >= self.powers.len() as u128 {
                break;
            }
        }
        if value < self.powers.len() as u128 {
            return self.powers[value as usize].clone();
        }
        let p = self.period as u64;
        let residue = if n >= p {
            0
        } else {
            (2..=n).fold(1u64, |acc, i| acc * i % p)
        };
        // Pick the exponent in [start, start + period) congruent to n!.
        let start = self.start as u64;
        let shift = (residue + p - start % p) % p;
        self.powers[(start + shift) as usize].clone()
    }

    /// The unique idempotent among the positive powers.
    pub fn idempotent(&self) -> Element {
        let p = self.period;
        let m = self.start.max(1).div_ceil(p) * p;
        let idx = self.start + (m - self.start) % p;
        self.powers[idx].clone()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaFormulaReport {
    pub holds: bool,
    pub orbit_count: usize,
    pub bound: usize,
    /// `n · k!`, whose factorial is the exponent.
    pub factorial_argument: u64,
    pub failures: Vec<String>,
}

impl NominalMonoid {
    /// Tabulates `f` on the orbit representatives of `carrier × carrier`.
    pub fn from_fn(
        name: impl Into<String>,
        carrier: Arc<OrbitFiniteSet>,
        unit: Element,
        f: impl Fn(&Element, &Element) -> Result<Element>,
    ) -> Result<Self> {
        let square = Arc::new(ProductSet::square(carrier.clone())?);
        let table = EquivariantMap::tabulate(square.set().clone(), carrier.clone(), |z| {
            let (x, y) = square.unpair(z);
            f(&x, &y)
        })?;
        let m = NominalMonoid::assemble(name.into(), carrier, unit, Mult::Table(table.clone()));
        let _ = m.square.set(square);
        let _ = m.table.set(table);
        Ok(m)
    }

    /// Builds a monoid from an explicit table over `carrier × carrier`
    /// without checking the monoid laws; see [`NominalMonoid::validate`].
    pub fn from_table(
        name: impl Into<String>,
        carrier: Arc<OrbitFiniteSet>,
        unit: Element,
        table: EquivariantMap,
    ) -> Result<Self> {
        let square = Arc::new(ProductSet::square(carrier.clone())?);
        if **table.source() != **square.set() || **table.target() != *carrier {
            return Err(Error::CarrierMismatch);
        }
        let m = NominalMonoid::assemble(name.into(), carrier, unit, Mult::Table(table.clone()));
        let _ = m.square.set(square);
        let _ = m.table.set(table);
        Ok(m)
    }

    pub(crate) fn derived(
        name: String,
        carrier: Arc<OrbitFiniteSet>,
        unit: Element,
        f: Arc<MulFn>,
    ) -> Self {
        NominalMonoid::assemble(name, carrier, unit, Mult::Derived(f))
    }

    fn assemble(name: String, carrier: Arc<OrbitFiniteSet>, unit: Element, mult: Mult) -> Self {
        NominalMonoid {
            name,
            carrier,
            unit,
            mult,
            square: OnceLock::new(),
            table: OnceLock::new(),
        }
    }

    /// Validated construction from a closure.
    pub fn build(
        name: impl Into<String>,
        carrier: Arc<OrbitFiniteSet>,
        unit: Element,
        f: impl Fn(&Element, &Element) -> Result<Element>,
    ) -> Result<Self> {
        let m = NominalMonoid::from_fn(name, carrier, unit, f)?;
        let report = m.validate();
        if report.is_valid() {
            Ok(m)
        } else {
            Err(Error::InvalidMonoid(report.witness().unwrap_or_default()))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn carrier(&self) -> &Arc<OrbitFiniteSet> {
        &self.carrier
    }

    pub fn unit(&self) -> &Element {
        &self.unit
    }

    pub fn orbit_count(&self) -> usize {
        self.carrier.orbit_count()
    }

    pub fn square(&self) -> Result<&Arc<ProductSet>> {
        if let Some(s) = self.square.get() {
            return Ok(s);
        }
        let s = Arc::new(ProductSet::square(self.carrier.clone())?);
        Ok(self.square.get_or_init(|| s))
    }

    /// The multiplication as an equivariant map `M × M → M`.
    pub fn table(&self) -> Result<&EquivariantMap> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let square = self.square()?.clone();
        let table = EquivariantMap::tabulate(square.set().clone(), self.carrier.clone(), |z| {
            let (x, y) = square.unpair(z);
            Ok(self.mul(&x, &y))
        })?;
        Ok(self.table.get_or_init(|| table))
    }

    /// A copy with one table entry replaced.
    pub fn with_table_entry(&self, square_orbit: usize, image: OrbitImage) -> Result<Self> {
        let table = self.table()?;
        let mut assignment = table.assignment().to_vec();
        let slot = assignment
            .get_mut(square_orbit)
            .ok_or(Error::NoSuchOrbit { index: square_orbit, count: table.assignment().len() })?;
        *slot = image;
        let table = EquivariantMap::from_parts(table.source().clone(), table.target().clone(), assignment);
        let m = NominalMonoid::assemble(self.name.clone(), self.carrier.clone(), self.unit.clone(), Mult::Table(table.clone()));
        let _ = m.square.set(self.square()?.clone());
        let _ = m.table.set(table);
        Ok(m)
    }

    pub fn show(&self, x: &Element) -> String {
        self.carrier.show(x)
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        if !self.carrier.contains(x) || !self.carrier.contains(y) {
            return Err(Error::CarrierMismatch);
        }
        Ok(self.mul(x, y))
    }

    pub(crate) fn mul(&self, x: &Element, y: &Element) -> Element {
        match &self.mult {
            Mult::Table(table) => {
                let square = self.square.get().expect("tabled monoids carry their square");
                table.apply_unchecked(&square.pair(x, y))
            }
            Mult::Derived(f) => f(x, y),
        }
    }

    pub fn product_of(&self, xs: &[Element]) -> Element {
        xs.iter().fold(self.unit.clone(), |acc, x| self.mul(&acc, x))
    }

    /// Representatives `(x, y)` of every orbit of `orbit i × orbit j`.
    pub fn pair_reps(&self, i: usize, j: usize) -> Vec<(Element, Element)> {
        orbit_pair_reps(&self.carrier, i, &self.carrier, j)
    }

    /// Checks the table is well-defined and total, the unit laws on orbit
    /// representatives and associativity on representatives of `M³`.
    pub fn validate(&self) -> MonoidReport {
        let mut report = MonoidReport::default();
        let table = match self.table() {
            Ok(t) => t,
            Err(e) => {
                report.table.shape_errors.push(e.to_string());
                return report;
            }
        };
        report.table = table.check_well_defined();
        if !report.table.shape_errors.is_empty() {
            return report;
        }
        if !self.carrier.contains(&self.unit) {
            report.unit_issues.push("unit is not an element of the carrier".into());
            return report;
        }
        if !self.unit.atoms().is_empty() {
            report.unit_issues.push(format!("unit {} is not equivariant", self.show(&self.unit)));
        }
        for x in self.carrier.reps() {
            let l = self.mul(&self.unit, &x);
            let r = self.mul(&x, &self.unit);
            if l != x || r != x {
                report.unit_failures.push(format!(
                    "unit law fails at {}: 1·x = {}, x·1 = {}",
                    self.show(&x),
                    self.show(&l),
                    self.show(&r)
                ));
            }
        }
        let square = self.square.get().expect("table forces the square");
        for o in 0..square.set().orbit_count() {
            for j in 0..self.carrier.orbit_count() {
                for (c, z) in orbit_pair_reps(square.set(), o, &self.carrier, j) {
                    let (x, y) = square.unpair(&c);
                    let left = self.mul(&self.mul(&x, &y), &z);
                    let right = self.mul(&x, &self.mul(&y, &z));
                    if left != right {
                        report.assoc_failures.push(format!(
                            "associativity fails at ({}, {}, {}): (xy)z = {}, x(yz) = {}",
                            self.show(&x),
                            self.show(&y),
                            self.show(&z),
                            self.show(&left),
                            self.show(&right)
                        ));
                    }
                }
            }
        }
        report
    }

    pub fn power_cycle(&self, x: &Element) -> PowerCycle {
        let mut powers = vec![self.unit.clone()];
        let mut seen: HashMap<Element, usize> = HashMap::from([(self.unit.clone(), 0)]);
        loop {
            let next = self.mul(powers.last().expect("non-empty"), x);
            if let Some(&start) = seen.get(&next) {
                let period = powers.len() - start;
                return PowerCycle { powers, start, period };
            }
            seen.insert(next.clone(), powers.len());
            powers.push(next);
        }
    }

    pub fn power(&self, x: &Element, exponent: &BigUint) -> Element {
        if exponent.is_zero() {
            return self.unit.clone();
        }
        self.power_cycle(x).get(exponent)
    }

    /// The unique idempotent power of `x`.
    pub fn omega_power(&self, x: &Element) -> Element {
        self.power_cycle(x).idempotent()
    }

    /// Checks `m^ω = m^((n·k!)!)` on every orbit representative, with `n`
    /// the orbit count and `k` the support bound.
    pub fn check_omega_formula(&self) -> OmegaFormulaReport {
        let n = self.carrier.orbit_count() as u64;
        let k = self.carrier.bound() as u64;
        let arg = n.saturating_mul((1..=k).product::<u64>().max(1));
        let mut failures = Vec::new();
        for m in self.carrier.reps() {
            let cycle = self.power_cycle(&m);
            let lhs = cycle.get_factorial(arg);
            let rhs = cycle.idempotent();
            if lhs != rhs {
                failures.push(format!(
                    "{}: m^(({n}·{k}!)!) = {} but m^ω = {}",
                    self.show(&m),
                    self.show(&lhs),
                    self.show(&rhs)
                ));
            }
        }
        OmegaFormulaReport {
            holds: failures.is_empty(),
            orbit_count: n as usize,
            bound: k as usize,
            factorial_argument: arg,
            failures,
        }
    }

    /// An orbit representative with `m^ω · m ≠ m^ω`, if any.
    pub fn aperiodicity_witness(&self) -> Option<Element> {
        self.carrier.reps().into_iter().find(|m| {
            let w = self.omega_power(m);
            self.mul(&w, m) != w
        })
    }

    pub fn is_aperiodic(&self) -> bool {
        self.aperiodicity_witness().is_none()
    }

    /// Whether `S ⊆ orbits` (as a union of orbits) is closed under
    /// multiplication.
    pub fn orbits_closed(&self, orbits: &[usize]) -> bool {
        let mut inside = vec![false; self.orbit_count()];
        for &o in orbits {
            inside[o] = true;
        }
        orbits.iter().all(|&i| {
            orbits.iter().all(|&j| self.pair_reps(i, j).iter().all(|(x, y)| inside[self.mul(x, y).orbit()]))
        })
    }
}

/// An equivariant monoid homomorphism.
#[derive(Clone, Debug)]
pub struct MonoidMorphism {
    dom: Arc<NominalMonoid>,
    cod: Arc<NominalMonoid>,
    map: EquivariantMap,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MorphismReport {
    pub map: MapReport,
    pub unit_preserved: bool,
    pub failures: Vec<String>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.map.is_valid() && self.unit_preserved && self.failures.is_empty()
    }
}

impl MonoidMorphism {
    pub fn new(dom: Arc<NominalMonoid>, cod: Arc<NominalMonoid>, map: EquivariantMap) -> Result<Self> {
        let h = MonoidMorphism::from_parts(dom, cod, map)?;
        let report = h.validate();
        if report.is_valid() {
            Ok(h)
        } else {
            let why = report
                .failures
                .first()
                .cloned()
                .unwrap_or_else(|| if report.unit_preserved { report.map.to_string() } else { "unit not preserved".into() });
            Err(Error::InvalidMorphism(why))
        }
    }

    pub fn from_parts(dom: Arc<NominalMonoid>, cod: Arc<NominalMonoid>, map: EquivariantMap) -> Result<Self> {
        if **map.source() != **dom.carrier() || **map.target() != **cod.carrier() {
            return Err(Error::CarrierMismatch);
        }
        Ok(MonoidMorphism { dom, cod, map })
    }

    /// Tabulates `f` on orbit representatives and validates.
    pub fn from_fn(
        dom: Arc<NominalMonoid>,
        cod: Arc<NominalMonoid>,
        f: impl Fn(&Element) -> Result<Element>,
    ) -> Result<Self> {
        let map = EquivariantMap::tabulate(dom.carrier().clone(), cod.carrier().clone(), f)?;
        MonoidMorphism::new(dom, cod, map)
    }

    pub fn identity(m: Arc<NominalMonoid>) -> Self {
        let map = EquivariantMap::identity(m.carrier().clone());
        MonoidMorphism { dom: m.clone(), cod: m, map }
    }

    pub fn dom(&self) -> &Arc<NominalMonoid> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<NominalMonoid> {
        &self.cod
    }

    pub fn map(&self) -> &EquivariantMap {
        &self.map
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.map.apply(x)
    }

    pub(crate) fn at(&self, x: &Element) -> Element {
        self.map.apply_unchecked(x)
    }

    pub fn validate(&self) -> MorphismReport {
        let mut report = MorphismReport { map: self.map.check_well_defined(), ..Default::default() };
        if !report.map.is_valid() {
            return report;
        }
        report.unit_preserved = self.at(self.dom.unit()) == *self.cod.unit();
        let n = self.dom.orbit_count();
        for i in 0..n {
            for j in 0..n {
                for (x, y) in self.dom.pair_reps(i, j) {
                    let lhs = self.at(&self.dom.mul(&x, &y));
                    let rhs = self.cod.mul(&self.at(&x), &self.at(&y));
                    if lhs != rhs {
                        report.failures.push(format!(
                            "h({}·{}) = {} but h(x)·h(y) = {}",
                            self.dom.show(&x),
                            self.dom.show(&y),
                            self.cod.show(&lhs),
                            self.cod.show(&rhs)
                        ));
                    }
                }
            }
        }
        report
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MonoidMorphism) -> Result<MonoidMorphism> {
        Ok(MonoidMorphism { dom: self.dom.clone(), cod: next.cod.clone(), map: self.map.then(&next.map)? })
    }

    pub fn is_surjective(&self) -> bool {
        self.map.is_orbit_surjective()
    }

    /// Injective iff distinct orbits go to distinct orbits and each orbit
    /// maps bijectively onto its image orbit.
    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.orbit_count()];
        for (o, img) in self.map.assignment().iter().enumerate() {
            let src = &self.dom.carrier().orbits()[o];
            let tgt = &self.cod.carrier().orbits()[img.target_orbit];
            if seen[img.target_orbit] || src.dim() != tgt.dim() || src.group_order() != tgt.group_order() {
                return false;
            }
            seen[img.target_orbit] = true;
        }
        true
    }

    /// Whether two morphisms agree on every orbit representative.
    pub fn agrees_with(&self, other: &MonoidMorphism) -> bool {
        self.map.agrees_with(&other.map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_cycle_reduction() {
        let z3 = cyclic(3).unwrap();
        let g = z3.carrier().rep(1);
        let c = z3.power_cycle(&g);
        assert_eq!((c.start, c.period), (0, 3));
        assert_eq!(z3.power(&g, &BigUint::from(4u32)), g);
        assert_eq!(c.get_factorial(3), z3.unit().clone());
        assert_eq!(c.idempotent(), z3.unit().clone());
    }

    #[test]
    fn factorial_power_matches_expansion() {
        let m = cutoff(2).unwrap();
        let a = m.carrier().rep(1);
        let c = m.power_cycle(&a);
        for n in 0..8u64 {
            let f: u64 = (1..=n).product();
            assert_eq!(c.get_factorial(n), m.power(&a, &BigUint::from(f)));
        }
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let p1 = builder("first-proj").unwrap();
        let sq = p1.square().unwrap().clone();
        // a·b = 1 for a != b breaks associativity: (a·b)·c = c but a·(b·c) = a
        let o = (0..sq.set().orbit_count())
            .find(|&o| sq.set().orbits()[o].dim() == 2)
            .unwrap();
        let bad = p1.with_table_entry(o, OrbitImage::new(0, vec![])).unwrap();
        let report = bad.validate();
        assert!(!report.is_valid());
        assert!(report.witness().is_some());
    }
}
