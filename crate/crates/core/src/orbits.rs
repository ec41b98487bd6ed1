//! Closed Reeb orbit records and the deterministic constructions from orbit
//! data to chain complexes.
//!
//! Orbits carry a Conley-Zehnder index, a period, a multiplicity and an
//! augmentation value; indices and geometric differentials are input data,
//! never derived here. What the module does derive: the good/bad
//! classification, the contact complex over the good orbits, the two
//! generators per orbit circle of a Morse-Bott complex with its canonical
//! shift-zero differential, the filtration levels, and the multiplicity
//! rescaling used to compare the two pictures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{
    AlgebraError, ChainComplex, ChainComplexBuilder, Generator, HomologyClass, ValidationReport,
};
use crate::filtration::{FilteredComplex, FiltrationError};
use crate::rational::Rational;

#[derive(Debug, Clone, thiserror::Error)]
pub enum OrbitError {
    #[error("orbit {0:?} is an even iterate without parity evidence or eigenvalue count")]
    MissingEvidence(String),
    #[error("unknown orbit {0:?}")]
    UnknownOrbit(String),
    #[error("multiplicity unknown for orbit {0:?}")]
    UnknownMultiplicity(String),
    #[error("orbit {0:?} is bad and cannot generate the contact complex")]
    BadOrbitGenerator(String),
    #[error("differential entry {from:?} -> {to:?} does not decrease the action")]
    ActionIncrease { from: String, to: String },
    #[error("differential entry {from:?} -> {to:?} must drop the degree by 1 (from {from_degree} to {to_degree})")]
    DegreeMismatch { from: String, to: String, from_degree: i64, to_degree: i64 },
    #[error("user differential entry {from:?} -> {to:?} has filtration shift {shift}; only 1 and 2 are geometric")]
    UserShift { from: String, to: String, shift: i64 },
    #[error("orbit {0:?} declared twice")]
    DuplicateOrbit(String),
    #[error("orbit {orbit:?} violates the action bound or hits it exactly")]
    ActionBound { orbit: String },
    #[error("orbit {orbit:?} has nonpositive action or multiplicity")]
    InvalidOrbitData { orbit: String },
    #[error("orbit {orbit:?} is inconsistent with its underlying simple orbit")]
    IterateInconsistent { orbit: String },
    #[error("invalid Novikov class set: {0}")]
    InvalidClassSet(String),
    #[error("orbit {0:?} has a nonzero augmentation but no declared class admits a rigid-plane degree")]
    AugmentationDegree(String),
    #[error("augmentation does not vanish on the boundary of {generator:?}")]
    AugmentationViolation { generator: String },
    #[error("rotation amount {0} is degenerate for the requested convention")]
    DegeneratePath(Rational),
    #[error("constructed complex failed validation: {0}")]
    InvalidComplex(ValidationReport),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
}

impl From<AlgebraError> for OrbitError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::InvalidComplex(r) => OrbitError::InvalidComplex(r),
            AlgebraError::UnknownGenerator(n) => OrbitError::UnknownOrbit(n),
            AlgebraError::DuplicateGenerator(n) => OrbitError::DuplicateOrbit(n),
            AlgebraError::WindowLeak { from, .. } => OrbitError::UnknownOrbit(from),
        }
    }
}

/// A closed Reeb orbit record. `mu` is the Conley-Zehnder index with
/// respect to the chosen capping; `augmentation` is the supplied count of
/// rigid planes bounding the orbit, zero by default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReebOrbit {
    pub name: String,
    pub action: Rational,
    pub mu: i64,
    pub multiplicity: i64,
    pub class_label: String,
    /// `(simple orbit name, iterate count)` when this orbit is an iterate.
    pub underlying_simple: Option<(String, i64)>,
    /// `(mu of the simple orbit, mu of its square)`.
    pub parity_evidence: Option<(i64, i64)>,
    /// Number of real eigenvalues of the return map strictly below -1.
    pub neg_eigencount: Option<i64>,
    pub augmentation: Rational,
}

impl ReebOrbit {
    pub fn new(name: impl Into<String>, action: Rational, mu: i64) -> Self {
        ReebOrbit {
            name: name.into(),
            action,
            mu,
            multiplicity: 1,
            class_label: "0".into(),
            underlying_simple: None,
            parity_evidence: None,
            neg_eigencount: None,
            augmentation: Rational::zero(),
        }
    }

    pub fn with_multiplicity(mut self, kappa: i64) -> Self {
        self.multiplicity = kappa;
        self
    }

    pub fn with_class_label(mut self, label: impl Into<String>) -> Self {
        self.class_label = label.into();
        self
    }

    pub fn iterate_of(mut self, simple: impl Into<String>, count: i64) -> Self {
        self.underlying_simple = Some((simple.into(), count));
        self
    }

    pub fn with_parity_evidence(mut self, mu_simple: i64, mu_square: i64) -> Self {
        self.parity_evidence = Some((mu_simple, mu_square));
        self
    }

    pub fn with_neg_eigencount(mut self, count: i64) -> Self {
        self.neg_eigencount = Some(count);
        self
    }

    pub fn with_augmentation(mut self, value: Rational) -> Self {
        self.augmentation = value;
        self
    }

    fn iterate_count(&self) -> i64 {
        self.underlying_simple.as_ref().map_or(1, |(_, k)| *k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitClass {
    Good,
    Bad,
}

/// Bad orbits are the even iterates whose index parity differs from the
/// underlying simple orbit's, equivalently whose return map has an odd
/// number of real eigenvalues strictly below -1. Simple orbits and odd
/// iterates are always good.
pub fn classify(orbit: &ReebOrbit) -> Result<OrbitClass, OrbitError> {
    if orbit.iterate_count() % 2 != 0 {
        return Ok(OrbitClass::Good);
    }
    if let Some((mu_simple, mu_square)) = orbit.parity_evidence {
        let differ = mu_simple.rem_euclid(2) != mu_square.rem_euclid(2);
        return Ok(if differ { OrbitClass::Bad } else { OrbitClass::Good });
    }
    if let Some(count) = orbit.neg_eigencount {
        return Ok(if count.rem_euclid(2) == 1 { OrbitClass::Bad } else { OrbitClass::Good });
    }
    Err(OrbitError::MissingEvidence(orbit.name.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Parity of the Conley-Zehnder index of the k-th iterate, predicted from
/// the parity evidence of the underlying simple orbit.
pub fn iterate_grading(base: &ReebOrbit, k: i64) -> Result<Parity, OrbitError> {
    let (mu_simple, mu_square) =
        base.parity_evidence.ok_or_else(|| OrbitError::MissingEvidence(base.name.clone()))?;
    let mu = if k.rem_euclid(2) == 1 { mu_simple } else { mu_square };
    Ok(if mu.rem_euclid(2) == 0 { Parity::Even } else { Parity::Odd })
}

/// A constant-orbit generator: a critical point of the Hamiltonian,
/// contributing in degree `index - n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub name: String,
    pub index: i64,
}

/// A finite set of closed Reeb orbits below an action bound, with the
/// declared Novikov class fragment.
#[derive(Clone, Debug)]
pub struct OrbitSet {
    orbits: Vec<ReebOrbit>,
    n: i64,
    action_bound: Rational,
    classes: Vec<HomologyClass>,
    critical_points: Vec<CriticalPoint>,
}

impl OrbitSet {
    pub fn new(n: i64, action_bound: Rational, orbits: Vec<ReebOrbit>) -> Result<Self, OrbitError> {
        let set = OrbitSet {
            orbits,
            n,
            action_bound,
            classes: vec![HomologyClass::zero()],
            critical_points: Vec::new(),
        };
        set.check()?;
        Ok(set)
    }

    pub fn with_classes(mut self, classes: Vec<HomologyClass>) -> Result<Self, OrbitError> {
        if classes.is_empty() {
            return Err(OrbitError::InvalidClassSet("class set must be nonempty".into()));
        }
        let mut labels: Vec<&str> = classes.iter().map(|c| c.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != classes.len() {
            return Err(OrbitError::InvalidClassSet("duplicate class label".into()));
        }
        for c in &classes {
            if c.omega_energy.is_negative() {
                return Err(OrbitError::InvalidClassSet(format!(
                    "class {:?} has negative energy",
                    c.label
                )));
            }
            if c.label == "0" && !c.is_zero_class() {
                return Err(OrbitError::InvalidClassSet(
                    "the class labelled \"0\" must pair to zero".into(),
                ));
            }
        }
        self.classes = classes;
        self.check()?;
        Ok(self)
    }

    pub fn with_critical_points(mut self, points: Vec<CriticalPoint>) -> Self {
        self.critical_points = points;
        self
    }

    fn check(&self) -> Result<(), OrbitError> {
        let mut seen = BTreeMap::new();
        for o in &self.orbits {
            if seen.insert(o.name.clone(), o).is_some() {
                return Err(OrbitError::DuplicateOrbit(o.name.clone()));
            }
        }
        for o in &self.orbits {
            if o.action.is_negative() || o.action.is_zero() || o.multiplicity < 1 {
                return Err(OrbitError::InvalidOrbitData { orbit: o.name.clone() });
            }
            if o.action >= self.action_bound {
                return Err(OrbitError::ActionBound { orbit: o.name.clone() });
            }
            if let Some((base, k)) = &o.underlying_simple {
                if *k < 1 {
                    return Err(OrbitError::IterateInconsistent { orbit: o.name.clone() });
                }
                let base_kappa = seen.get(base).map_or(1, |b| b.multiplicity);
                if o.multiplicity != k * base_kappa {
                    return Err(OrbitError::IterateInconsistent { orbit: o.name.clone() });
                }
            }
            if !o.augmentation.is_zero() {
                let reduced = o.mu + self.n - 3;
                let admissible =
                    self.classes.iter().any(|c| reduced + 2 * c.c1_pairing == 0);
                if !admissible {
                    return Err(OrbitError::AugmentationDegree(o.name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn orbits(&self) -> &[ReebOrbit] {
        &self.orbits
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn action_bound(&self) -> &Rational {
        &self.action_bound
    }

    pub fn classes(&self) -> &[HomologyClass] {
        &self.classes
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.critical_points
    }

    pub fn orbit(&self, name: &str) -> Option<&ReebOrbit> {
        self.orbits.iter().find(|o| o.name == name)
    }

    pub fn kappa(&self, name: &str) -> Result<i64, OrbitError> {
        self.orbit(name)
            .map(|o| o.multiplicity)
            .ok_or_else(|| OrbitError::UnknownMultiplicity(name.to_owned()))
    }

    /// The free homotopy class labels present, sorted.
    pub fn class_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self.orbits.iter().map(|o| o.class_label.clone()).collect();
        labels.sort();
        labels.dedup();
        labels
    }
}

/// Name of the generator carried by `(orbit, Novikov class)` in the contact
/// complex.
pub fn contact_generator_name(orbit: &str, class_label: &str) -> String {
    if class_label == "0" {
        orbit.to_owned()
    } else {
        format!("{orbit}.e[{class_label}]")
    }
}

/// The two critical points of the perfect Morse function on an orbit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum S1Crit {
    /// The minimum, degree contribution +1.
    Min,
    /// The maximum, degree contribution 0.
    Max,
}

impl S1Crit {
    pub fn index(self) -> i64 {
        match self {
            S1Crit::Min => 1,
            S1Crit::Max => 0,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            S1Crit::Min => "m",
            S1Crit::Max => "M",
        }
    }
}

/// Name of the Morse-Bott generator for `(orbit, critical point, class)`.
pub fn mb_generator_name(orbit: &str, point: S1Crit, class_label: &str) -> String {
    if class_label == "0" {
        format!("{orbit}.{}", point.suffix())
    } else {
        format!("{orbit}.{}.e[{class_label}]", point.suffix())
    }
}

/// One entry of a supplied contact differential, between
/// `(orbit, Novikov class)` generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactEntry {
    pub from_orbit: String,
    pub from_class: String,
    pub to_orbit: String,
    pub to_class: String,
    pub coeff: Rational,
}

impl ContactEntry {
    pub fn simple(from: impl Into<String>, to: impl Into<String>, coeff: Rational) -> Self {
        ContactEntry {
            from_orbit: from.into(),
            from_class: "0".into(),
            to_orbit: to.into(),
            to_class: "0".into(),
            coeff,
        }
    }
}

/// One entry of supplied Morse-Bott differential data (the shift-1 and
/// shift-2 pieces; the shift-0 piece is canonical and never supplied).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MbEntry {
    pub from_orbit: String,
    pub from_point: S1Crit,
    pub from_class: String,
    pub to_orbit: String,
    pub to_point: S1Crit,
    pub to_class: String,
    pub coeff: Rational,
}

impl MbEntry {
    pub fn simple(
        from: impl Into<String>,
        from_point: S1Crit,
        to: impl Into<String>,
        to_point: S1Crit,
        coeff: Rational,
    ) -> Self {
        MbEntry {
            from_orbit: from.into(),
            from_point,
            from_class: "0".into(),
            to_orbit: to.into(),
            to_point,
            to_class: "0".into(),
            coeff,
        }
    }
}

/// Which grading offset the Morse-Bott complex carries: the symplectic side
/// grades by `mu + ind`, the parametrized contact side adds `n - 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorseBottSide {
    Symplectic,
    ContactS1,
}

fn resolve_class<'a>(os: &'a OrbitSet, label: &str) -> Result<&'a HomologyClass, OrbitError> {
    os.classes()
        .iter()
        .find(|c| c.label == label)
        .ok_or_else(|| OrbitError::InvalidClassSet(format!("class {label:?} not declared")))
}

fn check_action_decrease(
    os: &OrbitSet,
    from_orbit: &str,
    to_orbit: &str,
) -> Result<(), OrbitError> {
    let from = os.orbit(from_orbit).ok_or_else(|| OrbitError::UnknownOrbit(from_orbit.into()))?;
    let to = os.orbit(to_orbit).ok_or_else(|| OrbitError::UnknownOrbit(to_orbit.into()))?;
    if from.action <= to.action {
        return Err(OrbitError::ActionIncrease {
            from: from_orbit.to_owned(),
            to: to_orbit.to_owned(),
        });
    }
    Ok(())
}

/// Builds the contact complex: one generator per good orbit and declared
/// Novikov class, graded by `mu - 2<c1, A> + n - 3`, with the supplied
/// differential validated and installed.
pub fn build_contact_complex(
    os: &OrbitSet,
    class_filter: Option<&str>,
    differential: &[ContactEntry],
) -> Result<ChainComplex, OrbitError> {
    let mut good = BTreeMap::new();
    for orbit in os.orbits() {
        if let Some(filter) = class_filter {
            if orbit.class_label != filter {
                continue;
            }
        }
        if classify(orbit)? == OrbitClass::Good {
            good.insert(orbit.name.clone(), orbit);
        }
    }
    let mut builder = ChainComplexBuilder::new();
    for orbit in good.values() {
        for class in os.classes() {
            let degree = orbit.mu + class.degree_shift() + os.n() - 3;
            let filtration = orbit.mu + class.degree_shift();
            builder.add_generator(
                Generator::new(contact_generator_name(&orbit.name, &class.label), degree)
                    .with_filtration(filtration)
                    .with_class_label(orbit.class_label.clone())
                    .with_novikov(class.clone()),
            );
        }
    }
    // Augmentation must vanish on boundaries: group the supplied entries by
    // source generator and target class and sum coeff * e(target orbit).
    let mut aug_sums: BTreeMap<(String, String), Rational> = BTreeMap::new();
    for entry in differential {
        for orbit_name in [&entry.from_orbit, &entry.to_orbit] {
            let orbit =
                os.orbit(orbit_name).ok_or_else(|| OrbitError::UnknownOrbit(orbit_name.clone()))?;
            if classify(orbit)? == OrbitClass::Bad {
                return Err(OrbitError::BadOrbitGenerator(orbit_name.clone()));
            }
        }
        if class_filter.is_some_and(|f| {
            os.orbit(&entry.from_orbit).map(|o| o.class_label.as_str()) != Some(f)
                || os.orbit(&entry.to_orbit).map(|o| o.class_label.as_str()) != Some(f)
        }) {
            continue;
        }
        check_action_decrease(os, &entry.from_orbit, &entry.to_orbit)?;
        resolve_class(os, &entry.from_class)?;
        resolve_class(os, &entry.to_class)?;
        let from = contact_generator_name(&entry.from_orbit, &entry.from_class);
        let to = contact_generator_name(&entry.to_orbit, &entry.to_class);
        let aug = &os.orbit(&entry.to_orbit).expect("resolved above").augmentation;
        if !aug.is_zero() {
            let key = (from.clone(), entry.to_class.clone());
            let slot = aug_sums.entry(key).or_insert_with(Rational::zero);
            *slot += &entry.coeff * aug;
        }
        builder.add_entry(from, to, entry.coeff.clone());
    }
    for ((source, _), sum) in aug_sums {
        if !sum.is_zero() {
            return Err(OrbitError::AugmentationViolation { generator: source });
        }
    }
    let complex = builder.build()?;
    let report = complex.validate();
    if !report.is_valid() {
        return Err(OrbitError::InvalidComplex(report));
    }
    Ok(complex)
}

/// Builds the Morse-Bott complex of an orbit set: two generators per orbit
/// circle and class, the canonical shift-zero differential (`+2 gamma_M` on
/// the minimum of every bad orbit, zero otherwise), and the supplied
/// shift-1/shift-2 data merged in.
pub fn build_morse_bott_complex(
    os: &OrbitSet,
    side: MorseBottSide,
    differential: &[MbEntry],
) -> Result<FilteredComplex, OrbitError> {
    let offset = match side {
        MorseBottSide::Symplectic => 0,
        MorseBottSide::ContactS1 => os.n() - 3,
    };
    let mut builder = ChainComplexBuilder::new();
    let mut max_level: Option<i64> = None;
    for orbit in os.orbits() {
        let class_of = classify(orbit)?;
        for class in os.classes() {
            let level = orbit.mu + class.degree_shift();
            let base = level + offset;
            max_level = Some(max_level.map_or(level, |m| m.max(level)));
            for point in [S1Crit::Max, S1Crit::Min] {
                builder.add_generator(
                    Generator::new(
                        mb_generator_name(&orbit.name, point, &class.label),
                        base + point.index(),
                    )
                    .with_filtration(level)
                    .with_class_label(orbit.class_label.clone())
                    .with_novikov(class.clone()),
                );
            }
            if class_of == OrbitClass::Bad {
                builder.add_entry(
                    mb_generator_name(&orbit.name, S1Crit::Min, &class.label),
                    mb_generator_name(&orbit.name, S1Crit::Max, &class.label),
                    Rational::from_int(2),
                );
            }
        }
    }
    for entry in differential {
        let from = os
            .orbit(&entry.from_orbit)
            .ok_or_else(|| OrbitError::UnknownOrbit(entry.from_orbit.clone()))?;
        let to = os
            .orbit(&entry.to_orbit)
            .ok_or_else(|| OrbitError::UnknownOrbit(entry.to_orbit.clone()))?;
        let from_class = resolve_class(os, &entry.from_class)?;
        let to_class = resolve_class(os, &entry.to_class)?;
        let from_level = from.mu + from_class.degree_shift();
        let to_level = to.mu + to_class.degree_shift();
        let shift = from_level - to_level;
        let from_name = mb_generator_name(&entry.from_orbit, entry.from_point, &entry.from_class);
        let to_name = mb_generator_name(&entry.to_orbit, entry.to_point, &entry.to_class);
        if !(1..=2).contains(&shift) {
            return Err(OrbitError::UserShift { from: from_name, to: to_name, shift });
        }
        let from_degree = from_level + offset + entry.from_point.index();
        let to_degree = to_level + offset + entry.to_point.index();
        if from_degree - 1 != to_degree {
            return Err(OrbitError::DegreeMismatch {
                from: from_name,
                to: to_name,
                from_degree,
                to_degree,
            });
        }
        check_action_decrease(os, &entry.from_orbit, &entry.to_orbit)?;
        builder.add_entry(from_name, to_name, entry.coeff.clone());
    }
    let complex = builder.build()?;
    let report = complex.validate();
    if !report.is_valid() {
        return Err(OrbitError::InvalidComplex(report));
    }
    let fc = FilteredComplex::new(complex, 2)?;
    Ok(match max_level {
        Some(level) => fc.with_complete_filtration_max(level),
        None => fc,
    })
}

/// The subcomplex of constant orbits: one generator per critical point in
/// degree `index - n`, with supplied Morse data as differential.
pub fn build_minus_complex(
    os: &OrbitSet,
    morse_data: &[(String, String, Rational)],
) -> Result<ChainComplex, OrbitError> {
    let mut builder = ChainComplexBuilder::new();
    for point in os.critical_points() {
        builder.add_generator(Generator::new(point.name.clone(), point.index - os.n()));
    }
    for (from, to, coeff) in morse_data {
        builder.add_entry(from.clone(), to.clone(), coeff.clone());
    }
    let complex = builder.build()?;
    let report = complex.validate();
    if !report.is_valid() {
        return Err(OrbitError::InvalidComplex(report));
    }
    Ok(complex)
}

/// An element of the contact-homology-tensor-circle presentation: a finite
/// combination of `orbit (x) {m, M}` terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TensorChain(pub BTreeMap<(String, S1Crit), Rational>);

impl TensorChain {
    pub fn term(orbit: impl Into<String>, point: S1Crit, coeff: Rational) -> Self {
        let mut map = BTreeMap::new();
        map.insert((orbit.into(), point), coeff);
        TensorChain(map)
    }

    pub fn insert(&mut self, orbit: impl Into<String>, point: S1Crit, coeff: Rational) {
        self.0.insert((orbit.into(), point), coeff);
    }
}

/// The multiplicity rescaling: fixes every maximum term and divides every
/// minimum term by the multiplicity of its orbit.
pub fn theta(v: &TensorChain, os: &OrbitSet) -> Result<TensorChain, OrbitError> {
    theta_scaled(v, os, true)
}

/// Inverse rescaling: multiplies minimum terms by the multiplicity.
pub fn theta_inv(v: &TensorChain, os: &OrbitSet) -> Result<TensorChain, OrbitError> {
    theta_scaled(v, os, false)
}

fn theta_scaled(v: &TensorChain, os: &OrbitSet, divide: bool) -> Result<TensorChain, OrbitError> {
    let mut out = BTreeMap::new();
    for ((orbit, point), coeff) in &v.0 {
        let scaled = match point {
            S1Crit::Max => coeff.clone(),
            S1Crit::Min => {
                let kappa = Rational::from_int(os.kappa(orbit)?);
                if divide {
                    coeff / &kappa
                } else {
                    coeff * &kappa
                }
            }
        };
        out.insert((orbit.clone(), *point), scaled);
    }
    Ok(TensorChain(out))
}

/// Index convention for rotation paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CzConvention {
    /// Path of rotations by angle `2 pi a t`, `t` in `[0, 1]`, with
    /// nondegenerate endpoint (`a` not an integer): index `2 floor(a) + 1`.
    Standard,
    /// The linearized return map of the circle Reeb flow covering the fiber
    /// `b` times: index `2b`.
    CircleReeb,
}

/// Conley-Zehnder index of a rotation path in the plane.
pub fn cz_rotation_path(amount: &Rational, convention: CzConvention) -> Result<i64, OrbitError> {
    match convention {
        CzConvention::Standard => {
            if amount.is_integer() {
                return Err(OrbitError::DegeneratePath(amount.clone()));
            }
            let floor: i64 = amount
                .floor_int()
                .try_into()
                .map_err(|_| OrbitError::DegeneratePath(amount.clone()))?;
            Ok(2 * floor + 1)
        }
        CzConvention::CircleReeb => {
            if !amount.is_integer() || amount.is_negative() || amount.is_zero() {
                return Err(OrbitError::DegeneratePath(amount.clone()));
            }
            let b: i64 = amount
                .floor_int()
                .try_into()
                .map_err(|_| OrbitError::DegeneratePath(amount.clone()))?;
            Ok(2 * b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Window;

    fn orbit(name: &str, action: i64, mu: i64) -> ReebOrbit {
        ReebOrbit::new(name, Rational::from_int(action), mu)
    }

    fn simple_set(orbits: Vec<ReebOrbit>) -> OrbitSet {
        OrbitSet::new(1, Rational::from_int(1000), orbits).unwrap()
    }

    #[test]
    fn simple_orbits_are_good() {
        assert_eq!(classify(&orbit("g", 1, 3)).unwrap(), OrbitClass::Good);
        assert_eq!(classify(&orbit("g", 1, 4)).unwrap(), OrbitClass::Good);
    }

    #[test]
    fn odd_iterates_are_good_without_evidence() {
        let o = orbit("g3", 3, 5).iterate_of("g", 3).with_multiplicity(3);
        assert_eq!(classify(&o).unwrap(), OrbitClass::Good);
    }

    #[test]
    fn even_iterate_with_differing_parities_is_bad() {
        let o = orbit("g2", 2, 2).iterate_of("g", 2).with_multiplicity(2).with_parity_evidence(1, 2);
        assert_eq!(classify(&o).unwrap(), OrbitClass::Bad);
    }

    #[test]
    fn even_iterate_with_even_eigencount_is_good() {
        let o = orbit("g2", 2, 2).iterate_of("g", 2).with_multiplicity(2).with_neg_eigencount(2);
        assert_eq!(classify(&o).unwrap(), OrbitClass::Good);
        let bad = orbit("h2", 2, 2).iterate_of("h", 2).with_multiplicity(2).with_neg_eigencount(1);
        assert_eq!(classify(&bad).unwrap(), OrbitClass::Bad);
    }

    #[test]
    fn even_iterate_without_evidence_is_an_error() {
        let o = orbit("g2", 2, 2).iterate_of("g", 2).with_multiplicity(2);
        assert!(matches!(classify(&o), Err(OrbitError::MissingEvidence(_))));
    }

    #[test]
    fn iterate_grading_follows_the_evidence() {
        let base = orbit("g", 1, 2).with_parity_evidence(2, 4);
        assert_eq!(iterate_grading(&base, 5).unwrap(), Parity::Even);
        let base = orbit("h", 1, 1).with_parity_evidence(1, 2);
        assert_eq!(iterate_grading(&base, 2).unwrap(), Parity::Even);
        let base = orbit("k", 1, 1).with_parity_evidence(1, 1);
        assert_eq!(iterate_grading(&base, 7).unwrap(), Parity::Odd);
        assert!(matches!(iterate_grading(&orbit("x", 1, 1), 2), Err(OrbitError::MissingEvidence(_))));
    }

    #[test]
    fn disc_contact_degrees() {
        // Orbits gamma_b with mu = 2b and n = 1 generate in degrees 2b - 2.
        let orbits = (1..=3)
            .map(|b| {
                let mut o = orbit(&format!("g{b}"), b, 2 * b).with_multiplicity(b);
                if b > 1 {
                    o = o.iterate_of("g1", b).with_parity_evidence(2, 4);
                }
                o
            })
            .collect();
        let os = simple_set(orbits);
        let complex = build_contact_complex(&os, None, &[]).unwrap();
        let dims = complex.chain_dims();
        for b in 1..=3 {
            assert_eq!(dims.dim(2 * b - 2), 1);
        }
    }

    #[test]
    fn bad_iterates_are_excluded_from_the_contact_complex() {
        let os = simple_set(vec![
            orbit("g", 1, 1),
            orbit("g2", 2, 2).iterate_of("g", 2).with_multiplicity(2).with_parity_evidence(1, 2),
        ]);
        let complex = build_contact_complex(&os, None, &[]).unwrap();
        assert_eq!(complex.len(), 1);
        assert_eq!(complex.generators()[0].name, "g");
    }

    #[test]
    fn empty_orbit_set_gives_zero_complex() {
        let os = simple_set(vec![]);
        let complex = build_contact_complex(&os, None, &[]).unwrap();
        assert!(complex.is_empty());
    }

    #[test]
    fn action_increase_is_rejected() {
        // b -> a drops both the degree and the action: accepted.
        let os = simple_set(vec![orbit("a", 1, 2), orbit("b", 2, 3)]);
        let entries = vec![ContactEntry::simple("b", "a", Rational::one())];
        assert!(build_contact_complex(&os, None, &entries).is_ok());
        // x -> y drops the degree but raises the action: rejected.
        let os = simple_set(vec![orbit("x", 1, 3), orbit("y", 2, 2)]);
        let entries = vec![ContactEntry::simple("x", "y", Rational::one())];
        assert!(matches!(
            build_contact_complex(&os, None, &entries),
            Err(OrbitError::ActionIncrease { .. })
        ));
    }

    #[test]
    fn augmentation_must_vanish_on_boundaries() {
        // e(target) = 1 and a single entry: e(d(source)) = coeff != 0.
        let os = simple_set(vec![
            orbit("p", 1, 2).with_augmentation(Rational::one()),
            orbit("q", 2, 3),
        ]);
        let entries = vec![ContactEntry::simple("q", "p", Rational::one())];
        assert!(matches!(
            build_contact_complex(&os, None, &entries),
            Err(OrbitError::AugmentationViolation { .. })
        ));
        // Two entries with cancelling augmentation pairing pass.
        let os = simple_set(vec![
            orbit("p", 1, 2).with_augmentation(Rational::one()),
            orbit("p'", 1, 2).with_augmentation(Rational::one()),
            orbit("q", 2, 3),
        ]);
        let entries = vec![
            ContactEntry::simple("q", "p", Rational::one()),
            ContactEntry::simple("q", "p'", -Rational::one()),
        ];
        assert!(build_contact_complex(&os, None, &entries).is_ok());
    }

    #[test]
    fn augmentation_degree_is_screened() {
        // mu = 3, n = 1: reduced index 1, no declared class cancels it.
        let bad = OrbitSet::new(
            1,
            Rational::from_int(10),
            vec![orbit("g", 1, 3).with_augmentation(Rational::one())],
        );
        assert!(matches!(bad, Err(OrbitError::AugmentationDegree(_))));
        // mu = 2, n = 1: reduced index 0, the zero class is admissible.
        let ok = OrbitSet::new(
            1,
            Rational::from_int(10),
            vec![orbit("g", 1, 2).with_augmentation(Rational::one())],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn good_orbit_alone_builds_zero_differential() {
        let os = simple_set(vec![orbit("g", 1, 4)]);
        let fc = build_morse_bott_complex(&os, MorseBottSide::Symplectic, &[]).unwrap();
        assert_eq!(fc.complex().len(), 2);
        assert_eq!(fc.complex().entries().count(), 0);
        let pages = fc.pages(1).unwrap();
        assert_eq!(pages[1].slot_dim(4, 0), 1);
        assert_eq!(pages[1].slot_dim(4, 1), 1);
    }

    #[test]
    fn bad_orbit_cancels_at_e1() {
        let os = simple_set(vec![
            orbit("g", 1, 1),
            orbit("g2", 2, 4).iterate_of("g", 2).with_multiplicity(2).with_parity_evidence(1, 4),
        ]);
        let fc = build_morse_bott_complex(&os, MorseBottSide::Symplectic, &[]).unwrap();
        let pages = fc.pages(1).unwrap();
        // The bad orbit's two generators die; the good orbit's survive.
        assert_eq!(pages[1].slot_dim(4, 0), 0);
        assert_eq!(pages[1].slot_dim(4, 1), 0);
        assert_eq!(pages[1].slot_dim(1, 0), 1);
        assert_eq!(pages[1].slot_dim(1, 1), 1);
    }

    #[test]
    fn grading_offset_distinguishes_the_sides() {
        let os = simple_set(vec![orbit("g", 1, 4)]);
        let symp = build_morse_bott_complex(&os, MorseBottSide::Symplectic, &[]).unwrap();
        let contact = build_morse_bott_complex(&os, MorseBottSide::ContactS1, &[]).unwrap();
        // n = 1: the parametrized contact side sits two degrees lower.
        let symp_m = symp.complex().index_of("g.M").unwrap();
        let contact_m = contact.complex().index_of("g.M").unwrap();
        assert_eq!(symp.complex().generator(symp_m).degree, 4);
        assert_eq!(contact.complex().generator(contact_m).degree, 2);
        // Both sides share the filtration level mu.
        assert_eq!(symp.complex().generator(symp_m).filtration, 4);
        assert_eq!(contact.complex().generator(contact_m).filtration, 4);
    }

    #[test]
    fn morse_bott_gradings_are_consistent() {
        let os = simple_set(vec![orbit("g", 1, 4)]);
        let fc = build_morse_bott_complex(&os, MorseBottSide::Symplectic, &[]).unwrap();
        let c = fc.complex();
        let m = c.generator(c.index_of("g.m").unwrap());
        let big_m = c.generator(c.index_of("g.M").unwrap());
        assert_eq!(m.degree, big_m.degree + 1);
        assert_eq!(m.filtration, big_m.filtration);
    }

    #[test]
    fn user_entries_are_shift_checked() {
        let os = simple_set(vec![orbit("a", 2, 4), orbit("b", 1, 4)]);
        // Shift 0 between distinct orbits is not geometric data.
        let entry = MbEntry::simple("a", S1Crit::Min, "b", S1Crit::Max, Rational::one());
        assert!(matches!(
            build_morse_bott_complex(&os, MorseBottSide::Symplectic, &[entry]),
            Err(OrbitError::UserShift { shift: 0, .. })
        ));
        let os = simple_set(vec![orbit("a", 2, 7), orbit("b", 1, 4)]);
        let entry = MbEntry::simple("a", S1Crit::Min, "b", S1Crit::Min, Rational::one());
        assert!(matches!(
            build_morse_bott_complex(&os, MorseBottSide::Symplectic, &[entry]),
            Err(OrbitError::UserShift { shift: 3, .. })
        ));
    }

    #[test]
    fn degree_mismatch_is_caught() {
        let os = simple_set(vec![orbit("a", 2, 6), orbit("b", 1, 4)]);
        // Shift 2 but M -> M does not drop the degree by one.
        let entry = MbEntry::simple("a", S1Crit::Max, "b", S1Crit::Max, Rational::one());
        assert!(matches!(
            build_morse_bott_complex(&os, MorseBottSide::Symplectic, &[entry]),
            Err(OrbitError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn theta_rescales_minima_only() {
        let os = simple_set(vec![orbit("g", 1, 2).with_multiplicity(4)]);
        let v = TensorChain::term("g", S1Crit::Min, Rational::one());
        let image = theta(&v, &os).unwrap();
        assert_eq!(image.0[&("g".into(), S1Crit::Min)], Rational::new(1, 4));
        let m = TensorChain::term("g", S1Crit::Max, Rational::from_int(7));
        assert_eq!(theta(&m, &os).unwrap(), m);
        // kappa = 1 everywhere: identity.
        let os1 = simple_set(vec![orbit("h", 1, 2)]);
        let w = TensorChain::term("h", S1Crit::Min, Rational::from_int(3));
        assert_eq!(theta(&w, &os1).unwrap(), w);
    }

    #[test]
    fn theta_round_trips() {
        let os = simple_set(vec![
            orbit("g", 1, 2).with_multiplicity(3),
            orbit("h", 2, 4).with_multiplicity(5),
        ]);
        let mut v = TensorChain::default();
        v.insert("g", S1Crit::Min, Rational::new(7, 2));
        v.insert("g", S1Crit::Max, Rational::from_int(-1));
        v.insert("h", S1Crit::Min, Rational::new(-4, 9));
        assert_eq!(theta_inv(&theta(&v, &os).unwrap(), &os).unwrap(), v);
        let unknown = TensorChain::term("zz", S1Crit::Min, Rational::one());
        assert!(matches!(theta(&unknown, &os), Err(OrbitError::UnknownMultiplicity(_))));
    }

    #[test]
    fn rotation_path_indices() {
        let cz = |n: i64, d: i64| cz_rotation_path(&Rational::new(n, d), CzConvention::Standard);
        assert_eq!(cz(1, 2).unwrap(), 1);
        assert_eq!(cz(-1, 2).unwrap(), -1);
        assert_eq!(cz(3, 2).unwrap(), 3);
        assert!(matches!(cz(2, 1), Err(OrbitError::DegeneratePath(_))));
        assert_eq!(
            cz_rotation_path(&Rational::from_int(3), CzConvention::CircleReeb).unwrap(),
            6
        );
        assert!(cz_rotation_path(&Rational::new(1, 2), CzConvention::CircleReeb).is_err());
    }

    #[test]
    fn classification_ignores_action_rescaling() {
        let mk = |action: i64| {
            orbit("g2", action, 2)
                .iterate_of("g", 2)
                .with_multiplicity(2)
                .with_parity_evidence(1, 2)
        };
        assert_eq!(classify(&mk(1)).unwrap(), classify(&mk(500)).unwrap());
    }

    #[test]
    fn minus_complex_from_critical_points() {
        let os = simple_set(vec![]).with_critical_points(vec![
            CriticalPoint { name: "p0".into(), index: 0 },
            CriticalPoint { name: "p1".into(), index: 1 },
        ]);
        let c = build_minus_complex(&os, &[("p1".into(), "p0".into(), Rational::from_int(2))])
            .unwrap();
        // n = 1: degrees index - 1.
        let h = c.homology(Window::new(-1, 0)).unwrap();
        assert!(h.dims.is_empty());
    }
}
