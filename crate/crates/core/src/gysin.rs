//! Extraction of the long exact sequence tying symplectic homology to
//! linearized contact homology, and exactness certification.
//!
//! A two-line spectral sequence degenerates at its third page, which splices
//! into a long exact sequence
//!
//! ```text
//! ... -> E2_{k-1,1} -> H_k -> E2_{k,0} --d2--> E2_{k-2,1} -> H_{k-1} -> ...
//! ```
//!
//! with the maps through `H` given by the convergence filtration. The `d2`
//! arrow, conjugated by the multiplicity rescaling of the orbit circles,
//! is the degree `-2` connecting map on contact homology.

use std::fmt;

use serde::Serialize;

use crate::complex::{GradedDims, ValidationReport, Window};
use crate::filtration::{FilteredComplex, FiltrationError, Page};
use crate::matrix::{solve_combination, Rref, SparseMatrix, SparseVec, Subquotient};
use crate::rational::Rational;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GysinError {
    #[error("E2 page is not supported in the two lines q = 0, 1")]
    NotTwoLine,
    #[error("anti-diagonal page sums disagree with total homology at degree {degree}")]
    ConvergenceMismatch { degree: i64 },
    #[error("no multiplicity known for basis row {row}")]
    UnknownMultiplicity { row: usize },
    #[error("complex failed validation: {0}")]
    InvalidComplex(ValidationReport),
}

impl From<FiltrationError> for GysinError {
    fn from(e: FiltrationError) -> Self {
        match e {
            FiltrationError::NotTwoLine => GysinError::NotTwoLine,
            FiltrationError::InvalidComplex(r) => GysinError::InvalidComplex(r),
            FiltrationError::FiltrationViolation { .. } => {
                unreachable!("filtered complexes are shift-checked at construction")
            }
        }
    }
}

/// The four degrees of one segment
/// `SH_{k-(n-3)} -> HC_k -> HC_{k-2} -> SH_{k-1-(n-3)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSegment {
    pub sh_upper: i64,
    pub hc_upper: i64,
    pub hc_lower: i64,
    pub sh_lower: i64,
}

/// Degree bookkeeping for half-dimension `n` at contact degree `k`.
pub fn degree_bookkeeping(n: i64, k: i64) -> DegreeSegment {
    DegreeSegment { sh_upper: k - (n - 3), hc_upper: k, hc_lower: k - 2, sh_lower: k - 1 - (n - 3) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LesNodeKind {
    /// Total homology of the filtered complex in one degree.
    Sh { degree: i64 },
    /// A page slot, annotated with the contact-homology degree it carries.
    Hc { p: i64, q: i64, hc_degree: i64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct LesNode {
    pub label: String,
    pub kind: LesNodeKind,
    pub dim: usize,
    pub contaminated: bool,
}

/// An alternating sequence of graded pieces and rational matrices; the map
/// at index `i` sends node `i` to node `i + 1`.
#[derive(Clone, Debug)]
pub struct LongExactSequence {
    pub nodes: Vec<LesNode>,
    pub maps: Vec<SparseMatrix>,
}

/// Per-node rank data for the exactness verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessRow {
    pub node: String,
    pub rank_in: usize,
    pub dim: usize,
    pub rank_out: usize,
    pub composite_zero: bool,
    pub contaminated: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessCertificate {
    pub rows: Vec<ExactnessRow>,
    /// True when every uncontaminated interior node is exact.
    pub verdict: bool,
}

impl fmt::Display for ExactnessCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(
                f,
                "{}: in {} + out {} vs dim {} -> {}{}",
                row.node,
                row.rank_in,
                row.rank_out,
                row.dim,
                if row.exact { "exact" } else { "NOT exact" },
                if row.contaminated { " (contaminated, not counted)" } else { "" },
            )?;
        }
        write!(f, "verdict: {}", if self.verdict { "exact" } else { "failed" })
    }
}

/// Checks `im(f_i) = ker(f_{i+1})` at every interior node by exact rank
/// computation, and that consecutive composites vanish.
pub fn verify_exactness(seq: &LongExactSequence) -> ExactnessCertificate {
    let mut rows = Vec::new();
    for i in 1..seq.nodes.len().saturating_sub(1) {
        let incoming = &seq.maps[i - 1];
        let outgoing = &seq.maps[i];
        let rank_in = incoming.rank();
        let rank_out = outgoing.rank();
        let dim = seq.nodes[i].dim;
        let composite_zero = outgoing.multiply(incoming).is_zero();
        rows.push(ExactnessRow {
            node: seq.nodes[i].label.clone(),
            rank_in,
            dim,
            rank_out,
            composite_zero,
            contaminated: seq.nodes[i].contaminated,
            exact: composite_zero && rank_in + rank_out == dim,
        });
    }
    let verdict = rows.iter().filter(|r| !r.contaminated).all(|r| r.exact);
    ExactnessCertificate { rows, verdict }
}

/// Conjugates a `d2` matrix by the diagonal multiplicity rescaling: the
/// entry landing on an orbit of multiplicity `kappa` is divided by `kappa`.
/// `target_multiplicities` gives `kappa` per matrix row.
pub fn apply_theta_conjugation(
    d2: &SparseMatrix,
    target_multiplicities: &[i64],
) -> Result<SparseMatrix, GysinError> {
    scale_rows(d2, target_multiplicities, true)
}

/// Inverse of [`apply_theta_conjugation`].
pub fn apply_theta_conjugation_inverse(
    d2: &SparseMatrix,
    target_multiplicities: &[i64],
) -> Result<SparseMatrix, GysinError> {
    scale_rows(d2, target_multiplicities, false)
}

fn scale_rows(
    m: &SparseMatrix,
    kappas: &[i64],
    divide: bool,
) -> Result<SparseMatrix, GysinError> {
    if kappas.len() != m.nrows() {
        return Err(GysinError::UnknownMultiplicity { row: kappas.len().min(m.nrows()) });
    }
    let mut rows = Vec::with_capacity(m.nrows());
    for (i, row) in m.rows().iter().enumerate() {
        if kappas[i] < 1 {
            return Err(GysinError::UnknownMultiplicity { row: i });
        }
        let kappa = Rational::from_int(kappas[i]);
        let factor = if divide { kappa.recip() } else { kappa };
        rows.push(row.scaled(&factor));
    }
    Ok(SparseMatrix::from_rows(rows, m.ncols()))
}

/// Cycles of total degree `n` lying in filtration level at most `p`, as
/// global vectors.
fn cycles_in_filtration(fc: &FilteredComplex, n: i64, p: i64) -> Vec<SparseVec> {
    let complex = fc.complex();
    let support: Vec<usize> = complex
        .generators_in_degree(n)
        .iter()
        .copied()
        .filter(|&i| complex.generator(i).filtration <= p)
        .collect();
    if support.is_empty() {
        return Vec::new();
    }
    let targets: Vec<usize> = complex.generators_in_degree(n - 1).to_vec();
    let target_pos: std::collections::BTreeMap<usize, usize> =
        targets.iter().enumerate().map(|(pos, &i)| (i, pos)).collect();
    let columns: Vec<SparseVec> = support
        .iter()
        .map(|&s| {
            SparseVec::from_entries(
                complex
                    .differential_of(s)
                    .iter()
                    .map(|(t, c)| (target_pos[t], c.clone())),
            )
        })
        .collect();
    SparseMatrix::from_columns(&columns, targets.len())
        .kernel_basis()
        .into_iter()
        .map(|local| local.reindexed(|i| support[i]))
        .collect()
}

/// Homology of the filtered complex in degree `n` as a subquotient with
/// global representatives.
fn homology_subquotient(fc: &FilteredComplex, n: i64) -> Subquotient {
    let complex = fc.complex();
    let ambient = complex.len();
    let cycles = cycles_in_filtration(fc, n, i64::MAX);
    let boundaries: Vec<SparseVec> = complex
        .generators_in_degree(n + 1)
        .iter()
        .map(|&s| complex.differential_of(s))
        .filter(|v| !v.is_zero())
        .collect();
    Subquotient::new(Rref::from_rows(ambient, cycles), Rref::from_rows(ambient, boundaries))
}

/// Splits `v = y + z` with `y` in the span of `num_rows` and `z` in the span
/// of `den_rows`, returning `y`.
fn express_in(
    v: &SparseVec,
    num_rows: &[SparseVec],
    den_rows: &[SparseVec],
) -> Option<SparseVec> {
    let mut rows: Vec<SparseVec> = Vec::with_capacity(num_rows.len() + den_rows.len());
    rows.extend_from_slice(num_rows);
    rows.extend_from_slice(den_rows);
    let coeffs = solve_combination(&rows, v)?;
    let mut y = SparseVec::new();
    for (c, row) in coeffs.iter().zip(num_rows) {
        y = y.add_scaled(row, c);
    }
    Some(y)
}

/// Extracts the spliced long exact sequence from the spectral sequence of a
/// two-line filtered complex, over the total-degree window `[lo, hi]`.
///
/// `hc_degree_offset` is `n - 3`: slot `(p, q)` carries contact homology in
/// degree `p + hc_degree_offset`. When `total_homology` is supplied it is
/// screened against the engine's own homology before splicing.
pub fn extract_les(
    fc: &FilteredComplex,
    hc_degree_offset: i64,
    window: Window,
    total_homology: Option<&GradedDims>,
) -> Result<LongExactSequence, GysinError> {
    let einf = fc.e_infinity()?;
    if !einf.certificate.verdict {
        let degree = einf
            .certificate
            .rows
            .iter()
            .find(|r| !r.contaminated && !r.matches)
            .map(|r| r.degree)
            .unwrap_or_default();
        return Err(GysinError::ConvergenceMismatch { degree });
    }
    if let Some(expected) = total_homology {
        let contaminated = fc.contaminated_degrees();
        for k in window.degrees() {
            if !contaminated.contains(&k) && expected.dim(k) != einf.homology.dim(k) {
                return Err(GysinError::ConvergenceMismatch { degree: k });
            }
        }
    }
    let pages = fc.pages(2)?;
    let e2 = &pages[2];

    let contaminated_degrees = fc.contaminated_degrees();
    let slot_node = |p: i64, q: i64| -> LesNode {
        LesNode {
            label: format!("E2({p},{q})~HC_{}", p + hc_degree_offset),
            kind: LesNodeKind::Hc { p, q, hc_degree: p + hc_degree_offset },
            dim: e2.slot_dim(p, q),
            contaminated: fc.is_contaminated_level(p),
        }
    };
    let sh_node = |k: i64| -> LesNode {
        LesNode {
            label: format!("SH_{k}"),
            kind: LesNodeKind::Sh { degree: k },
            dim: einf.homology.dim(k),
            contaminated: contaminated_degrees.contains(&k),
        }
    };

    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    for k in window.degrees().rev() {
        // SH_k -> E2_{k,0}: project a homology class to its top graded piece.
        nodes.push(sh_node(k));
        maps.push(sh_to_slot(fc, e2, k)?);
        nodes.push(slot_node(k, 0));
        // E2_{k,0} -> E2_{k-2,1}: the page differential.
        maps.push(match e2.differential_from(k, 0) {
            Some(m) => m.clone(),
            None => SparseMatrix::zero(e2.slot_dim(k - 2, 1), e2.slot_dim(k, 0)),
        });
        nodes.push(slot_node(k - 2, 1));
        // E2_{k-2,1} -> SH_{k-1}: surviving classes include into homology.
        maps.push(slot_to_sh(fc, e2, k - 2)?);
    }
    nodes.push(sh_node(window.lo - 1));
    Ok(LongExactSequence { nodes, maps })
}

/// Matrix of `SH_k -> E2_{k,0}` in the canonical bases.
fn sh_to_slot(fc: &FilteredComplex, e2: &Page, k: i64) -> Result<SparseMatrix, GysinError> {
    let h = homology_subquotient(fc, k);
    let slot = e2.slot(k, 0);
    let slot_dim = slot.map_or(0, Subquotient::dim);
    let f_k_units: Vec<SparseVec> = fc
        .complex()
        .generators_in_degree(k)
        .iter()
        .copied()
        .filter(|&i| fc.complex().generator(i).filtration <= k)
        .map(SparseVec::unit)
        .collect();
    let boundaries: Vec<SparseVec> = fc
        .complex()
        .generators_in_degree(k + 1)
        .iter()
        .map(|&s| fc.complex().differential_of(s))
        .filter(|v| !v.is_zero())
        .collect();
    let columns: Vec<SparseVec> = h
        .reps()
        .iter()
        .map(|z| {
            // Adjust z by a boundary into filtration <= k, then read off its
            // class in the slot.
            let y = express_in(z, &f_k_units, &boundaries)
                .ok_or(GysinError::ConvergenceMismatch { degree: k })?;
            let coords = match slot {
                Some(sq) => sq
                    .coords_of(&y)
                    .ok_or(GysinError::ConvergenceMismatch { degree: k })?,
                None => Vec::new(),
            };
            Ok(SparseVec::from_entries(coords.into_iter().enumerate()))
        })
        .collect::<Result<_, GysinError>>()?;
    Ok(SparseMatrix::from_columns(&columns, slot_dim))
}

/// Matrix of `E2_{p,1} -> SH_{p+1}` in the canonical bases.
fn slot_to_sh(fc: &FilteredComplex, e2: &Page, p: i64) -> Result<SparseMatrix, GysinError> {
    let n = p + 1;
    let h = homology_subquotient(fc, n);
    let Some(slot) = e2.slot(p, 1) else {
        return Ok(SparseMatrix::zero(h.dim(), 0));
    };
    let cycles = cycles_in_filtration(fc, n, p);
    let den = slot.denominator().rows().to_vec();
    let columns: Vec<SparseVec> = slot
        .reps()
        .iter()
        .map(|x| {
            // Split x into an honest cycle plus a piece that is invisible on
            // this page; the cycle's homology class is the image.
            let y = express_in(x, &cycles, &den)
                .ok_or(GysinError::ConvergenceMismatch { degree: n })?;
            let coords = h
                .coords_of(&y)
                .ok_or(GysinError::ConvergenceMismatch { degree: n })?;
            Ok(SparseVec::from_entries(coords.into_iter().enumerate()))
        })
        .collect::<Result<_, GysinError>>()?;
    Ok(SparseMatrix::from_columns(&columns, h.dim()))
}
