//! Increasing filtrations, the shift splitting of the differential, and the
//! spectral sequence pages of a filtered complex.
//!
//! Conventions: the filtration level of a generator is `p`, the
//! complementary degree is `q = degree - p`, and the page differential
//! `d^r` maps slot `(p, q)` to `(p - r, q + r - 1)`. Slots store explicit
//! bases of cycle representatives lifted to the original complex, so induced
//! differentials are evaluated by applying the differential and projecting
//! into the target subquotient.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{AlgebraError, ChainComplex, GradedDims, ValidationReport, Window};
use crate::matrix::{Rref, SparseMatrix, SparseVec, Subquotient};
use crate::rational::Rational;

#[derive(Debug, Clone, thiserror::Error)]
pub enum FiltrationError {
    #[error(
        "differential entry {from:?} -> {to:?} has filtration shift {shift}, outside 0..={max_shift}"
    )]
    FiltrationViolation { from: String, to: String, shift: i64, max_shift: i64 },
    #[error("complex failed validation: {0}")]
    InvalidComplex(ValidationReport),
    #[error("page is not supported in the two lines q = 0, 1")]
    NotTwoLine,
}

/// A chain complex whose differential respects an increasing filtration
/// with shifts in `0..=max_shift` (2 for all Morse-Bott data here).
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    complex: ChainComplex,
    max_shift: i64,
    /// Largest filtration level certified complete by the data source.
    /// Slots within `max_shift` of it can be starved of incoming
    /// differentials by the truncation and are flagged contaminated.
    complete_filtration_max: Option<i64>,
}

impl FilteredComplex {
    pub fn new(complex: ChainComplex, max_shift: i64) -> Result<Self, FiltrationError> {
        for (f, t, _) in complex.entries() {
            let shift = complex.generator(f).filtration - complex.generator(t).filtration;
            if shift < 0 || shift > max_shift {
                return Err(FiltrationError::FiltrationViolation {
                    from: complex.generator(f).name.clone(),
                    to: complex.generator(t).name.clone(),
                    shift,
                    max_shift,
                });
            }
        }
        Ok(FilteredComplex { complex, max_shift, complete_filtration_max: None })
    }

    /// Declares the truncation boundary: every orbit with filtration level
    /// at most `level` is present in the data.
    pub fn with_complete_filtration_max(mut self, level: i64) -> Self {
        self.complete_filtration_max = Some(level);
        self
    }

    /// Declares the data complete: no truncation, nothing contaminated.
    pub fn assume_complete(mut self) -> Self {
        self.complete_filtration_max = None;
        self
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn max_shift(&self) -> i64 {
        self.max_shift
    }

    pub fn complete_filtration_max(&self) -> Option<i64> {
        self.complete_filtration_max
    }

    /// Whether slot column `p` sits close enough to the truncation boundary
    /// for missing differentials to affect it.
    pub fn is_contaminated_level(&self, p: i64) -> bool {
        match self.complete_filtration_max {
            Some(phi) => p + self.max_shift > phi,
            None => false,
        }
    }

    /// Total degrees whose page slots touch a contaminated level; expected
    /// values are never asserted on these.
    pub fn contaminated_degrees(&self) -> BTreeSet<i64> {
        self.complex
            .generators()
            .iter()
            .filter(|g| self.is_contaminated_level(g.filtration))
            .map(|g| g.degree)
            .collect()
    }

    /// Routes every differential entry by its filtration shift.
    pub fn split_differential(&self) -> DifferentialSplitting {
        let mut split = DifferentialSplitting::empty(self.max_shift);
        for (f, t, c) in self.complex.entries() {
            let (gf, gt) = (self.complex.generator(f), self.complex.generator(t));
            let shift = gf.filtration - gt.filtration;
            split.components[shift as usize].push((gf.name.clone(), gt.name.clone(), c.clone()));
        }
        split
    }

    /// Generators of degree `n` and filtration at most `p`.
    fn filtered_indices(&self, n: i64, p: i64) -> Vec<usize> {
        self.complex
            .generators_in_degree(n)
            .iter()
            .copied()
            .filter(|&i| self.complex.generator(i).filtration <= p)
            .collect()
    }

    /// Basis of `Z^r_{p,q} = { x in F_p C_{p+q} : d x in F_{p-r} }` as
    /// global sparse vectors. For `r < 0` the boundary condition is vacuous.
    fn z_basis(&self, p: i64, q: i64, r: i64) -> Vec<SparseVec> {
        let n = p + q;
        let support = self.filtered_indices(n, p);
        if support.is_empty() {
            return Vec::new();
        }
        if r < 0 {
            return support.into_iter().map(SparseVec::unit).collect();
        }
        let forbidden: Vec<usize> = self
            .complex
            .generators_in_degree(n - 1)
            .iter()
            .copied()
            .filter(|&i| self.complex.generator(i).filtration > p - r)
            .collect();
        let forbidden_pos: BTreeMap<usize, usize> =
            forbidden.iter().enumerate().map(|(pos, &i)| (i, pos)).collect();
        let columns: Vec<SparseVec> = support
            .iter()
            .map(|&s| {
                SparseVec::from_entries(self.complex.differential_of(s).iter().filter_map(
                    |(t, c)| forbidden_pos.get(t).map(|&pos| (pos, c.clone())),
                ))
            })
            .collect();
        SparseMatrix::from_columns(&columns, forbidden.len())
            .kernel_basis()
            .into_iter()
            .map(|local| local.reindexed(|i| support[i]))
            .collect()
    }

    /// The subquotient `E^r_{p,q}` with representatives lifted to the
    /// original complex.
    fn page_slot(&self, p: i64, q: i64, r: i64) -> Subquotient {
        let ambient = self.complex.len();
        let num = Rref::from_rows(ambient, self.z_basis(p, q, r));
        let mut den_rows = self.z_basis(p - 1, q + 1, r - 1);
        for w in self.z_basis(p + r - 1, q - r + 2, r - 1) {
            let dw = self.complex.apply_differential(&w);
            if !dw.is_zero() {
                den_rows.push(dw);
            }
        }
        Subquotient::new(num, Rref::from_rows(ambient, den_rows))
    }

    /// The slots `(p, q)` where the associated graded is nonzero; every
    /// later page is supported inside this set.
    pub fn support(&self) -> BTreeSet<(i64, i64)> {
        self.complex
            .generators()
            .iter()
            .map(|g| (g.filtration, g.degree - g.filtration))
            .collect()
    }

    /// Computes pages `E^0, ..., E^up_to_r`.
    pub fn pages(&self, up_to_r: usize) -> Result<Vec<Page>, FiltrationError> {
        let report = self.complex.validate();
        if !report.is_valid() {
            return Err(FiltrationError::InvalidComplex(report));
        }
        let support = self.support();
        let mut out = Vec::with_capacity(up_to_r + 1);
        for r in 0..=up_to_r {
            let page = self.page(r as i64, &support);
            if let Some(prev) = out.last() {
                page.check_is_homology_of(prev);
            }
            out.push(page);
        }
        Ok(out)
    }

    fn page(&self, r: i64, support: &BTreeSet<(i64, i64)>) -> Page {
        let mut slots = BTreeMap::new();
        for &(p, q) in support {
            let sq = self.page_slot(p, q, r);
            if sq.dim() > 0 {
                slots.insert((p, q), sq);
            }
        }
        let mut diffs = BTreeMap::new();
        for (&(p, q), sq) in &slots {
            let target_key = (p - r, q + r - 1);
            let Some(target) = slots.get(&target_key) else {
                continue;
            };
            let columns: Vec<SparseVec> = sq
                .reps()
                .iter()
                .map(|x| {
                    let dx = self.complex.apply_differential(x);
                    let coords = target
                        .coords_of(&dx)
                        .expect("page differential must land in the target slot");
                    SparseVec::from_entries(coords.into_iter().enumerate())
                })
                .collect();
            let matrix = SparseMatrix::from_columns(&columns, target.dim());
            if matrix.rows().iter().any(|row| !row.is_zero()) {
                diffs.insert((p, q), matrix);
            }
        }
        let contaminated = slots
            .keys()
            .copied()
            .filter(|&(p, _)| self.is_contaminated_level(p))
            .collect();
        Page { r, slots, diffs, contaminated }
    }

    /// Total homology together with the stabilized page and the convergence
    /// certificate comparing the two routes.
    pub fn e_infinity(&self) -> Result<EInfinity, FiltrationError> {
        let pages = self.pages(3)?;
        if !pages[2].is_two_line() {
            return Err(FiltrationError::NotTwoLine);
        }
        // Two-line support at E^2 kills every d^r, r >= 3, so E^3 = E^inf.
        let e3 = pages.into_iter().nth(3).expect("four pages requested");
        let window = match self.complex.degree_range() {
            Some(w) => w,
            None => Window::new(0, 0),
        };
        let homology = match self.complex.homology(window) {
            Ok(h) => h.dims,
            Err(AlgebraError::InvalidComplex(r)) => return Err(FiltrationError::InvalidComplex(r)),
            Err(_) => unreachable!("homology only fails on invalid complexes"),
        };
        let contaminated_degrees = self.contaminated_degrees();
        let mut degrees: BTreeSet<i64> = homology.support().map(|(d, _)| d).collect();
        for &(p, q) in e3.slots.keys() {
            degrees.insert(p + q);
        }
        let rows: Vec<ConvergenceRow> = degrees
            .into_iter()
            .map(|degree| {
                let e_infinity_sum = e3.anti_diagonal_dim(degree);
                let homology_dim = homology.dim(degree);
                ConvergenceRow {
                    degree,
                    homology_dim,
                    e_infinity_sum,
                    contaminated: contaminated_degrees.contains(&degree),
                    matches: e_infinity_sum == homology_dim,
                }
            })
            .collect();
        let verdict = rows.iter().filter(|r| !r.contaminated).all(|r| r.matches);
        Ok(EInfinity { page: e3, homology, certificate: ConvergenceCertificate { rows, verdict } })
    }
}

/// The total differential routed by filtration shift: component `i` holds
/// the entries of shift `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialSplitting {
    components: Vec<Vec<(String, String, Rational)>>,
}

impl DifferentialSplitting {
    fn empty(max_shift: i64) -> Self {
        DifferentialSplitting { components: vec![Vec::new(); (max_shift + 1) as usize] }
    }

    pub fn component(&self, shift: usize) -> &[(String, String, Rational)] {
        &self.components[shift]
    }

    pub fn d0(&self) -> &[(String, String, Rational)] {
        self.component(0)
    }

    pub fn d1(&self) -> &[(String, String, Rational)] {
        self.component(1)
    }

    pub fn d2(&self) -> &[(String, String, Rational)] {
        self.component(2)
    }

    /// All entries back in one map; equals the original differential.
    pub fn total(&self) -> Vec<(String, String, Rational)> {
        let mut all: Vec<_> = self.components.iter().flatten().cloned().collect();
        all.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        all
    }
}

/// One page of the spectral sequence. Slot bases are cycle representatives
/// lifted to the original complex.
#[derive(Clone, Debug)]
pub struct Page {
    r: i64,
    slots: BTreeMap<(i64, i64), Subquotient>,
    diffs: BTreeMap<(i64, i64), SparseMatrix>,
    contaminated: BTreeSet<(i64, i64)>,
}

impl Page {
    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn slot(&self, p: i64, q: i64) -> Option<&Subquotient> {
        self.slots.get(&(p, q))
    }

    pub fn slot_dim(&self, p: i64, q: i64) -> usize {
        self.slots.get(&(p, q)).map_or(0, Subquotient::dim)
    }

    pub fn slots(&self) -> impl Iterator<Item = ((i64, i64), &Subquotient)> {
        self.slots.iter().map(|(&k, v)| (k, v))
    }

    pub fn slot_dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.slots.iter().map(|(&k, v)| (k, v.dim())).collect()
    }

    /// The `d^r` matrix out of slot `(p, q)`, if nonzero.
    pub fn differential_from(&self, p: i64, q: i64) -> Option<&SparseMatrix> {
        self.diffs.get(&(p, q))
    }

    pub fn differentials(&self) -> impl Iterator<Item = ((i64, i64), &SparseMatrix)> {
        self.diffs.iter().map(|(&k, v)| (k, v))
    }

    pub fn is_contaminated(&self, p: i64, q: i64) -> bool {
        self.contaminated.contains(&(p, q))
    }

    pub fn contaminated_slots(&self) -> &BTreeSet<(i64, i64)> {
        &self.contaminated
    }

    /// True iff every nonzero slot has complementary degree 0 or 1.
    pub fn is_two_line(&self) -> bool {
        self.slots.keys().all(|&(_, q)| q == 0 || q == 1)
    }

    /// Sum of slot dimensions over the anti-diagonal `p + q = degree`.
    pub fn anti_diagonal_dim(&self, degree: i64) -> usize {
        self.slots
            .iter()
            .filter(|(&(p, q), _)| p + q == degree)
            .map(|(_, sq)| sq.dim())
            .sum()
    }

    /// Rank of `d^r` out of a slot.
    fn rank_from(&self, p: i64, q: i64) -> usize {
        self.diffs.get(&(p, q)).map_or(0, SparseMatrix::rank)
    }

    /// Every slot of this page must have the dimension of the homology of
    /// the previous page at that slot. Violations are construction bugs.
    fn check_is_homology_of(&self, prev: &Page) {
        let r = prev.r;
        let mut keys: BTreeSet<(i64, i64)> = prev.slots.keys().copied().collect();
        keys.extend(self.slots.keys().copied());
        for (p, q) in keys {
            let rank_out = prev.rank_from(p, q);
            let rank_in = prev.rank_from(p + r, q - r + 1);
            let expected = prev.slot_dim(p, q) - rank_out - rank_in;
            assert_eq!(
                self.slot_dim(p, q),
                expected,
                "page {} slot ({p},{q}) dimension disagrees with homology of page {r}",
                self.r,
            );
        }
    }
}

/// Per-degree comparison of the stabilized page with total homology.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub degree: i64,
    pub homology_dim: usize,
    pub e_infinity_sum: usize,
    pub contaminated: bool,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceCertificate {
    pub rows: Vec<ConvergenceRow>,
    /// True when every uncontaminated degree matches.
    pub verdict: bool,
}

/// Result of running the spectral sequence to its stable page.
#[derive(Clone, Debug)]
pub struct EInfinity {
    pub page: Page,
    pub homology: GradedDims,
    pub certificate: ConvergenceCertificate,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Generator;

    fn filtered(gens: Vec<Generator>, entries: Vec<(&str, &str, i64)>) -> FilteredComplex {
        let mut b = ChainComplex::builder();
        for g in gens {
            b.add_generator(g);
        }
        for (f, t, c) in entries {
            b.add_entry(f, t, Rational::from_int(c));
        }
        FilteredComplex::new(b.build().unwrap(), 2).unwrap()
    }

    /// Disc-type data: orbits g_b with two generators at filtration 2b and a
    /// shift-2 differential g_b.M -> g_{b-1}.m.
    fn disc_like(b_max: i64) -> FilteredComplex {
        let mut b = ChainComplex::builder();
        for k in 1..=b_max {
            b.add_generator(Generator::new(format!("g{k}.M"), 2 * k).with_filtration(2 * k));
            b.add_generator(Generator::new(format!("g{k}.m"), 2 * k + 1).with_filtration(2 * k));
        }
        for k in 2..=b_max {
            b.add_entry(
                format!("g{k}.M"),
                format!("g{}.m", k - 1),
                Rational::from_int(k - 1),
            );
        }
        FilteredComplex::new(b.build().unwrap(), 2)
            .unwrap()
            .with_complete_filtration_max(2 * b_max)
    }

    #[test]
    fn zero_differential_splits_to_zero() {
        let fc = filtered(
            vec![Generator::new("a", 0), Generator::new("b", 1)],
            vec![],
        );
        let split = fc.split_differential();
        assert!(split.d0().is_empty() && split.d1().is_empty() && split.d2().is_empty());
    }

    #[test]
    fn shift_two_entry_lands_in_d2() {
        let fc = disc_like(3);
        let split = fc.split_differential();
        assert!(split.d0().is_empty());
        assert!(split.d1().is_empty());
        assert_eq!(split.d2().len(), 2);
        assert_eq!(split.d2()[0].0, "g2.M");
    }

    #[test]
    fn shift_three_is_rejected() {
        let c = ChainComplex::builder()
            .generator(Generator::new("a", 1).with_filtration(3))
            .generator(Generator::new("b", 0).with_filtration(0))
            .entry("a", "b", Rational::one())
            .build()
            .unwrap();
        assert!(matches!(
            FilteredComplex::new(c, 2),
            Err(FiltrationError::FiltrationViolation { shift: 3, .. })
        ));
    }

    #[test]
    fn negative_shift_is_rejected() {
        let c = ChainComplex::builder()
            .generator(Generator::new("a", 1).with_filtration(0))
            .generator(Generator::new("b", 0).with_filtration(1))
            .entry("a", "b", Rational::one())
            .build()
            .unwrap();
        assert!(matches!(
            FilteredComplex::new(c, 2),
            Err(FiltrationError::FiltrationViolation { shift: -1, .. })
        ));
    }

    #[test]
    fn split_resums_to_original_differential() {
        let fc = disc_like(4);
        let resummed = fc.split_differential().total();
        let mut original: Vec<(String, String, Rational)> = fc
            .complex()
            .entries()
            .map(|(f, t, c)| {
                (
                    fc.complex().generator(f).name.clone(),
                    fc.complex().generator(t).name.clone(),
                    c.clone(),
                )
            })
            .collect();
        original.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        assert_eq!(resummed, original);
    }

    #[test]
    fn trivial_filtration_gives_homology_at_e1() {
        // Single filtration level: everything at p = 0.
        let fc = filtered(
            vec![
                Generator::new("x", 1).with_filtration(0),
                Generator::new("y", 0).with_filtration(0),
                Generator::new("z", 0).with_filtration(0),
            ],
            vec![("x", "y", 2)],
        );
        let pages = fc.pages(3).unwrap();
        assert_eq!(pages[0].slot_dim(0, 1), 1);
        assert_eq!(pages[0].slot_dim(0, 0), 2);
        // E^1 = homology: x dies against y, z survives.
        assert_eq!(pages[1].slot_dim(0, 1), 0);
        assert_eq!(pages[1].slot_dim(0, 0), 1);
        for r in 2..=3 {
            assert_eq!(pages[r].slot_dims(), pages[1].slot_dims());
        }
    }

    #[test]
    fn bad_orbit_pair_dies_at_e1() {
        // Both generators share the filtration level, so the 2 gamma_M entry
        // is the shift-zero differential and kills the slot pair at E^1.
        let fc = filtered(
            vec![
                Generator::new("g.M", 4).with_filtration(4),
                Generator::new("g.m", 5).with_filtration(4),
            ],
            vec![("g.m", "g.M", 2)],
        );
        let pages = fc.pages(1).unwrap();
        assert_eq!(pages[0].slot_dim(4, 0), 1);
        assert_eq!(pages[0].slot_dim(4, 1), 1);
        assert_eq!(pages[1].slot_dim(4, 0), 0);
        assert_eq!(pages[1].slot_dim(4, 1), 0);
    }

    #[test]
    fn disc_pages_match_hand_computation() {
        let fc = disc_like(3);
        let pages = fc.pages(3).unwrap();
        let e2 = &pages[2];
        for p in [2, 4, 6] {
            assert_eq!(e2.slot_dim(p, 0), 1, "E2_({p},0)");
            assert_eq!(e2.slot_dim(p, 1), 1, "E2_({p},1)");
        }
        // d^2 is an isomorphism E^2_{p,0} -> E^2_{p-2,1} for p = 4, 6.
        for p in [4, 6] {
            assert_eq!(e2.differential_from(p, 0).unwrap().rank(), 1);
        }
        assert!(e2.differential_from(2, 0).is_none());
        let e3 = &pages[3];
        assert_eq!(e3.slot_dim(2, 0), 1);
        assert_eq!(e3.slot_dim(4, 0), 0);
        assert_eq!(e3.slot_dim(6, 0), 0);
        assert_eq!(e3.slot_dim(2, 1), 0);
        assert_eq!(e3.slot_dim(4, 1), 0);
        assert_eq!(e3.slot_dim(6, 1), 1);
    }

    #[test]
    fn two_line_check_on_disc_and_counterexample() {
        let fc = disc_like(3);
        assert!(fc.pages(2).unwrap()[2].is_two_line());
        // Three-line support under the trivial filtration: q = degree.
        let three_line = filtered(
            vec![
                Generator::new("a", 0).with_filtration(0),
                Generator::new("b", 1).with_filtration(0),
                Generator::new("c", 2).with_filtration(0),
            ],
            vec![],
        );
        assert!(!three_line.pages(2).unwrap()[2].is_two_line());
        let empty = FilteredComplex::new(ChainComplex::empty(), 2).unwrap();
        assert!(empty.pages(2).unwrap()[2].is_two_line());
    }

    #[test]
    fn disc_e_infinity_certificate() {
        let fc = disc_like(5);
        let einf = fc.e_infinity().unwrap();
        assert!(einf.certificate.verdict);
        // Row q = 1 vanishes strictly below the truncation boundary.
        for p in [2, 4, 6, 8] {
            assert_eq!(einf.page.slot_dim(p, 1), 0);
        }
        assert_eq!(einf.page.slot_dim(10, 1), 1);
        assert!(einf.page.is_contaminated(10, 1));
        // Total degree 2 carries exactly one class.
        assert_eq!(einf.page.anti_diagonal_dim(2), 1);
        assert_eq!(einf.homology.dim(2), 1);
        let contaminated = fc.contaminated_degrees();
        assert!(contaminated.contains(&10) && contaminated.contains(&11));
        assert!(!contaminated.contains(&2));
    }

    #[test]
    fn zero_differential_e3_equals_chain_dims() {
        let fc = filtered(
            vec![
                Generator::new("a", 0).with_filtration(0),
                Generator::new("b", 1).with_filtration(0),
            ],
            vec![],
        );
        let einf = fc.e_infinity().unwrap();
        assert_eq!(einf.page.anti_diagonal_dim(0), 1);
        assert_eq!(einf.page.anti_diagonal_dim(1), 1);
        assert!(einf.certificate.verdict);
    }

    #[test]
    fn e_infinity_requires_two_lines() {
        let three_line = filtered(
            vec![
                Generator::new("a", 0).with_filtration(0),
                Generator::new("b", 1).with_filtration(0),
                Generator::new("c", 2).with_filtration(0),
            ],
            vec![],
        );
        assert!(matches!(three_line.e_infinity(), Err(FiltrationError::NotTwoLine)));
    }

    #[test]
    fn page_dims_are_monotone_nonincreasing() {
        let fc = disc_like(4);
        let pages = fc.pages(3).unwrap();
        for window in pages.windows(2) {
            for ((p, q), _) in window[0].slots() {
                assert!(window[1].slot_dim(p, q) <= window[0].slot_dim(p, q));
            }
        }
    }
}
