//! Graded chain complexes over the rationals and their homology.
//!
//! A [`ChainComplex`] is a finite set of named generators, each carrying a
//! degree, a filtration level, a free homotopy class label and a Novikov
//! class, together with a sparse differential. Homology is computed by exact
//! sparse elimination; representatives come out in the reduced echelon basis
//! of the cycle space so that identical inputs always produce identical
//! output.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::matrix::{Rref, SparseMatrix, SparseVec, Subquotient};
use crate::rational::Rational;

/// A second-homology class used to realize Novikov coefficients: the grading
/// contribution of `e^A` is `-2 * c1_pairing` and `omega_energy` is the
/// symplectic area, kept only to enforce the finiteness bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyClass {
    pub label: String,
    pub c1_pairing: i64,
    pub omega_energy: Rational,
}

impl HomologyClass {
    pub fn zero() -> Self {
        HomologyClass { label: "0".into(), c1_pairing: 0, omega_energy: Rational::zero() }
    }

    pub fn is_zero_class(&self) -> bool {
        self.c1_pairing == 0 && self.omega_energy.is_zero()
    }

    pub fn degree_shift(&self) -> i64 {
        -2 * self.c1_pairing
    }
}

/// One generator of a chain complex. `degree` already includes the
/// `-2<c1, A>` shift of its Novikov class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub filtration: i64,
    pub class_label: String,
    pub novikov: HomologyClass,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Generator {
            name: name.into(),
            degree,
            filtration: degree,
            class_label: "0".into(),
            novikov: HomologyClass::zero(),
        }
    }

    pub fn with_filtration(mut self, filtration: i64) -> Self {
        self.filtration = filtration;
        self
    }

    pub fn with_class_label(mut self, label: impl Into<String>) -> Self {
        self.class_label = label.into();
        self
    }

    pub fn with_novikov(mut self, novikov: HomologyClass) -> Self {
        self.novikov = novikov;
        self
    }
}

/// Degree -> dimension, finitely supported; zero entries are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDims(pub BTreeMap<i64, usize>);

impl GradedDims {
    pub fn new() -> Self {
        GradedDims(BTreeMap::new())
    }

    pub fn set(&mut self, degree: i64, dim: usize) {
        if dim == 0 {
            self.0.remove(&degree);
        } else {
            self.0.insert(degree, dim);
        }
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.0.iter().map(|(&d, &n)| (d, n))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn alternating_sum(&self, window: Window) -> i64 {
        self.support()
            .filter(|(d, _)| window.contains(*d))
            .map(|(d, n)| if d.rem_euclid(2) == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }
}

impl fmt::Display for GradedDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (d, n)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "deg {d}: Q^{n}")?;
        }
        Ok(())
    }
}

/// Inclusive degree window `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty window");
        Window { lo, hi }
    }

    pub fn contains(&self, degree: i64) -> bool {
        self.lo <= degree && degree <= self.hi
    }

    pub fn degrees(&self) -> impl DoubleEndedIterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// A single rule violation found by [`ChainComplex::validate`]. Violations
/// are data, not errors: the report lists all of them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Violation {
    /// Differential entry does not drop the degree by exactly one.
    DegreeRule { from: String, to: String, from_degree: i64, to_degree: i64 },
    /// Some composite d(d(gen)) has a nonzero coefficient on `to`.
    NonzeroSquare { from: String, to: String, coeff: Rational },
    /// Differential entry connects different free homotopy classes.
    ClassCross { from: String, to: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeRule { from, to, from_degree, to_degree } => write!(
                f,
                "entry {from} -> {to} connects degree {from_degree} to {to_degree} (must drop by 1)"
            ),
            Violation::NonzeroSquare { from, to, coeff } => {
                write!(f, "d(d({from})) has coefficient {coeff} on {to}")
            }
            Violation::ClassCross { from, to } => {
                write!(f, "entry {from} -> {to} crosses free homotopy classes")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum AlgebraError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("complex failed validation: {0}")]
    InvalidComplex(ValidationReport),
    #[error("differential crosses the window boundary at entry {from:?} -> {to:?}")]
    WindowLeak { from: String, to: String },
}

/// A finitely generated chain complex with exact rational coefficients.
///
/// Generators are canonically ordered by (degree, name) at build time, so
/// every downstream matrix, basis and report is reproducible no matter the
/// order in which the data arrived.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    gens: Vec<Generator>,
    index: BTreeMap<String, usize>,
    /// (from, to) -> coefficient, over canonical generator indices.
    entries: BTreeMap<(usize, usize), Rational>,
    /// degree -> canonical indices of that degree, in order.
    by_degree: BTreeMap<i64, Vec<usize>>,
}

pub struct ChainComplexBuilder {
    gens: Vec<Generator>,
    entries: Vec<(String, String, Rational)>,
}

impl ChainComplexBuilder {
    pub fn new() -> Self {
        ChainComplexBuilder { gens: Vec::new(), entries: Vec::new() }
    }

    pub fn generator(mut self, gen: Generator) -> Self {
        self.gens.push(gen);
        self
    }

    pub fn entry(mut self, from: impl Into<String>, to: impl Into<String>, coeff: Rational) -> Self {
        self.entries.push((from.into(), to.into(), coeff));
        self
    }

    pub fn add_generator(&mut self, gen: Generator) {
        self.gens.push(gen);
    }

    pub fn add_entry(&mut self, from: impl Into<String>, to: impl Into<String>, coeff: Rational) {
        self.entries.push((from.into(), to.into(), coeff));
    }

    pub fn build(self) -> Result<ChainComplex, AlgebraError> {
        let mut gens = self.gens;
        gens.sort_by(|a, b| (a.degree, &a.name).cmp(&(b.degree, &b.name)));
        let mut index = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        let mut entries: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (from, to, coeff) in self.entries {
            let &fi = index.get(&from).ok_or(AlgebraError::UnknownGenerator(from))?;
            let &ti = index.get(&to).ok_or(AlgebraError::UnknownGenerator(to))?;
            let slot = entries.entry((fi, ti)).or_insert_with(Rational::zero);
            *slot += coeff;
        }
        entries.retain(|_, c| !c.is_zero());
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            by_degree.entry(g.degree).or_default().push(i);
        }
        Ok(ChainComplex { gens, index, entries, by_degree })
    }
}

impl Default for ChainComplexBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ChainComplex {
    pub fn builder() -> ChainComplexBuilder {
        ChainComplexBuilder::new()
    }

    /// The empty complex: valid, with zero homology everywhere.
    pub fn empty() -> Self {
        ChainComplexBuilder::new().build().expect("empty complex always builds")
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, idx: usize) -> &Generator {
        &self.gens[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(f, t), c)| (f, t, c))
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_degree.keys().copied()
    }

    pub fn degree_range(&self) -> Option<Window> {
        let lo = self.by_degree.keys().next()?;
        let hi = self.by_degree.keys().next_back()?;
        Some(Window::new(*lo, *hi))
    }

    pub fn generators_in_degree(&self, degree: i64) -> &[usize] {
        self.by_degree.get(&degree).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn chain_dims(&self) -> GradedDims {
        let mut dims = GradedDims::new();
        for (&d, idxs) in &self.by_degree {
            dims.set(d, idxs.len());
        }
        dims
    }

    /// Image of the basis chain `e_idx` under the differential, as a sparse
    /// vector over global generator indices.
    pub fn differential_of(&self, idx: usize) -> SparseVec {
        SparseVec::from_entries(
            self.entries
                .range((idx, 0)..(idx + 1, 0))
                .map(|(&(_, t), c)| (t, c.clone())),
        )
    }

    /// Applies the differential to an arbitrary chain over global indices.
    pub fn apply_differential(&self, chain: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        for (i, c) in chain.iter() {
            acc = acc.add_scaled(&self.differential_of(*i), c);
        }
        acc
    }

    /// Checks the degree rule, d, d = 0 and class-label preservation,
    /// returning every violation found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for &(f, t) in self.entries.keys() {
            let (gf, gt) = (&self.gens[f], &self.gens[t]);
            if gf.degree - 1 != gt.degree {
                violations.push(Violation::DegreeRule {
                    from: gf.name.clone(),
                    to: gt.name.clone(),
                    from_degree: gf.degree,
                    to_degree: gt.degree,
                });
            }
            if gf.class_label != gt.class_label {
                violations.push(Violation::ClassCross { from: gf.name.clone(), to: gt.name.clone() });
            }
        }
        for from in 0..self.gens.len() {
            let once = self.differential_of(from);
            let twice = self.apply_differential(&once);
            for (t, c) in twice.iter() {
                violations.push(Violation::NonzeroSquare {
                    from: self.gens[from].name.clone(),
                    to: self.gens[*t].name.clone(),
                    coeff: c.clone(),
                });
            }
        }
        ValidationReport { violations }
    }

    /// Matrix of `d : C_k -> C_{k-1}` in the canonical degree bases.
    /// Rows index degree `k-1` generators, columns degree `k` generators.
    pub fn differential_matrix(&self, degree: i64) -> SparseMatrix {
        let sources = self.generators_in_degree(degree);
        let targets = self.generators_in_degree(degree - 1);
        let target_pos: BTreeMap<usize, usize> =
            targets.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let columns: Vec<SparseVec> = sources
            .iter()
            .map(|&s| {
                SparseVec::from_entries(self.differential_of(s).iter().filter_map(|(t, c)| {
                    target_pos.get(t).map(|&p| (p, c.clone()))
                }))
            })
            .collect();
        SparseMatrix::from_columns(&columns, targets.len())
    }

    /// Homology over the window by exact sparse elimination.
    ///
    /// Fails with `InvalidComplex` when [`validate`](Self::validate) reports
    /// violations.
    pub fn homology(&self, window: Window) -> Result<HomologyResult, AlgebraError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(AlgebraError::InvalidComplex(report));
        }
        let mut dims = GradedDims::new();
        let mut representatives = BTreeMap::new();
        for k in window.degrees() {
            let local = self.generators_in_degree(k);
            if local.is_empty() {
                continue;
            }
            let cycles = self.differential_matrix(k).kernel_basis();
            let boundaries = self.differential_matrix(k + 1).transpose().rref();
            let z = Rref::from_rows(local.len(), cycles);
            let sq = Subquotient::new(z, boundaries);
            if sq.dim() == 0 {
                continue;
            }
            dims.set(k, sq.dim());
            let named: Vec<Vec<(String, Rational)>> = sq
                .reps()
                .iter()
                .map(|rep| {
                    rep.iter()
                        .map(|(p, c)| (self.gens[local[*p]].name.clone(), c.clone()))
                        .collect()
                })
                .collect();
            representatives.insert(k, named);
        }
        Ok(HomologyResult { dims, representatives })
    }

    /// Euler characteristic of the window, after checking the differential
    /// does not cross the window boundary.
    pub fn euler_characteristic(&self, window: Window) -> Result<i64, AlgebraError> {
        for &(f, t) in self.entries.keys() {
            let (df, dt) = (self.gens[f].degree, self.gens[t].degree);
            let crosses = (window.contains(df) && !window.contains(dt))
                || (!window.contains(df) && window.contains(dt));
            if crosses {
                return Err(AlgebraError::WindowLeak {
                    from: self.gens[f].name.clone(),
                    to: self.gens[t].name.clone(),
                });
            }
        }
        Ok(self.chain_dims().alternating_sum(window))
    }

    /// Renders a chain over global indices with generator names.
    pub fn render_chain(&self, chain: &SparseVec) -> String {
        if chain.is_zero() {
            return "0".into();
        }
        chain
            .iter()
            .map(|(i, c)| format!("{c}*{}", self.gens[*i].name))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Graded homology dimensions plus explicit cycle representatives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomologyResult {
    pub dims: GradedDims,
    /// degree -> one named cycle per basis class, in echelon order.
    pub representatives: BTreeMap<i64, Vec<Vec<(String, Rational)>>>,
}
