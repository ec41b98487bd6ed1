//! Sparse exact linear algebra over the rationals.
//!
//! Everything downstream (homology, spectral sequence pages, exactness
//! certificates) reduces to a handful of primitives implemented here:
//! reduced row echelon form, rank, kernel bases, and membership tests for
//! subquotient spaces. Two elimination routines coexist on purpose:
//! [`SparseMatrix::rref`] pivots on the leftmost column and produces the
//! canonical echelon basis of the row space, while [`SparseMatrix::rank`]
//! picks pivots Markowitz-style (fewest nonzeros in row plus column) to
//! limit fill-in when only the rank is needed.

use std::fmt;

use crate::rational::Rational;

/// A sparse vector: entries sorted by coordinate index, no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// Builds from arbitrary (index, coeff) pairs, summing duplicates and
    /// dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut v: Vec<(usize, Rational)> = entries.into_iter().collect();
        v.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(v.len());
        for (i, c) in v {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        SparseVec { entries: out }
    }

    pub fn unit(index: usize) -> Self {
        SparseVec { entries: vec![(index, Rational::one())] }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Rational)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> Rational {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// First (lowest-index) nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn scaled(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    /// `self + c * other`, merging sorted entry lists.
    pub fn add_scaled(&self, other: &SparseVec, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let sum = x.clone() + y * c;
                        if !sum.is_zero() {
                            out.push((*i, sum));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    /// Re-indexes entries through `map`; indices mapped to `None` must not
    /// carry nonzero coefficients (callers embed into larger spaces).
    pub fn reindexed(&self, map: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_entries(self.entries.iter().map(|(i, c)| (map(*i), c.clone())))
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*e{i}")?;
        }
        Ok(())
    }
}

/// A sparse matrix stored by rows.
///
/// When the matrix represents a linear map, rows index the target basis and
/// columns the source basis; `kernel_basis` then returns the cycles of the
/// map and `rref` of the transpose spans its image.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { ncols, rows: vec![SparseVec::new(); nrows] }
    }

    pub fn from_rows(rows: Vec<SparseVec>, ncols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.leading().is_none_or(|_| {
            r.iter().all(|(i, _)| *i < ncols)
        })));
        SparseMatrix { ncols, rows }
    }

    /// Builds the matrix of a linear map from its action on source basis
    /// vectors: `columns[j]` is the image of basis vector `j` expressed in
    /// target coordinates.
    pub fn from_columns(columns: &[SparseVec], nrows: usize) -> Self {
        let mut rows = vec![Vec::new(); nrows];
        for (j, col) in columns.iter().enumerate() {
            for (i, c) in col.iter() {
                rows[*i].push((j, c.clone()));
            }
        }
        SparseMatrix {
            ncols: columns.len(),
            rows: rows.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn set(&mut self, i: usize, j: usize, c: Rational) {
        assert!(j < self.ncols);
        let row = std::mem::take(&mut self.rows[i]);
        let mut entries: Vec<(usize, Rational)> =
            row.entries.into_iter().filter(|(k, _)| *k != j).collect();
        if !c.is_zero() {
            entries.push((j, c));
        }
        self.rows[i] = SparseVec::from_entries(entries);
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.rows[i].get(j)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, c) in row.iter() {
                rows[*j].push((i, c.clone()));
            }
        }
        SparseMatrix {
            ncols: self.rows.len(),
            rows: rows.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    /// Matrix-vector product, `x` over the column space.
    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        let entries = self.rows.iter().enumerate().filter_map(|(i, row)| {
            let mut acc = Rational::zero();
            for (j, c) in row.iter() {
                let xj = x.get(*j);
                if !xj.is_zero() {
                    acc += c * &xj;
                }
            }
            (!acc.is_zero()).then_some((i, acc))
        });
        SparseVec::from_entries(entries)
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn multiply(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, rhs.nrows(), "dimension mismatch in product");
        let columns: Vec<SparseVec> = rhs
            .transpose()
            .rows
            .iter()
            .map(|col| self.apply(col))
            .collect();
        SparseMatrix::from_columns(&columns, self.nrows())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(SparseVec::is_zero)
    }

    /// Canonical reduced row echelon form of the row space.
    ///
    /// The result depends only on the row span, not on row order, which is
    /// what makes downstream bases reproducible.
    pub fn rref(&self) -> Rref {
        let mut rref = Rref::empty(self.ncols);
        for row in &self.rows {
            rref.insert(row.clone());
        }
        rref
    }

    /// Rank via fraction-free-ish sparse elimination with Markowitz pivoting:
    /// among nonzero candidates, pick the entry minimizing
    /// nnz(row) + nnz(col), ties broken by (col, row) for determinism.
    pub fn rank(&self) -> usize {
        let mut work: Vec<SparseVec> = self.rows.iter().filter(|r| !r.is_zero()).cloned().collect();
        let mut rank = 0;
        loop {
            work.retain(|r| !r.is_zero());
            if work.is_empty() {
                return rank;
            }
            let mut col_count = vec![0usize; self.ncols];
            for row in &work {
                for (j, _) in row.iter() {
                    col_count[*j] += 1;
                }
            }
            let mut best: Option<(usize, usize, usize)> = None; // (score, col, row)
            for (i, row) in work.iter().enumerate() {
                for (j, _) in row.iter() {
                    let score = row.nnz() + col_count[*j];
                    let cand = (score, *j, i);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
            let (_, pj, pi) = best.expect("nonzero work rows must yield a pivot");
            let pivot_row = work.swap_remove(pi);
            let pivot_val = pivot_row.get(pj);
            for row in work.iter_mut() {
                let c = row.get(pj);
                if !c.is_zero() {
                    let factor = -(c / pivot_val.clone());
                    *row = row.add_scaled(&pivot_row, &factor);
                }
            }
            rank += 1;
        }
    }

    /// Basis of `{ x : M x = 0 }`, one vector per free column, in canonical
    /// form (free coordinate set to 1, pivot coordinates solved from rref).
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let rref = self.rref();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for (free, _) in is_pivot.iter().enumerate().filter(|(_, &p)| !p) {
            let mut entries = vec![(free, Rational::one())];
            for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
                let c = row.get(free);
                if !c.is_zero() {
                    entries.push((p, -c));
                }
            }
            basis.push(SparseVec::from_entries(entries));
        }
        basis
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.to_dense(self.ncols)).collect()
    }
}

/// A row space in reduced echelon form: unit pivots, pivot columns cleared
/// in every other row, rows ordered by pivot column.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    ambient: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn empty(ambient: usize) -> Self {
        Rref { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows(ambient: usize, rows: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut rref = Rref::empty(ambient);
        for row in rows {
            rref.insert(row);
        }
        rref
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Adds a vector to the span, restoring reduced echelon shape. Returns
    /// true if the span grew.
    pub fn insert(&mut self, row: SparseVec) -> bool {
        let reduced = self.reduce(&row);
        let Some((pivot, lead)) = reduced.leading().map(|(i, c)| (i, c.clone())) else {
            return false;
        };
        let normalized = reduced.scaled(&lead.recip());
        for r in self.rows.iter_mut() {
            let c = r.get(pivot);
            if !c.is_zero() {
                *r = r.add_scaled(&normalized, &-c);
            }
        }
        let pos = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(pos, pivot);
        self.rows.insert(pos, normalized);
        true
    }

    /// Eliminates the pivot coordinates of `v`; the result is the canonical
    /// representative of `v` modulo this row space.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out.get(p);
            if !c.is_zero() {
                out = out.add_scaled(row, &-c);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Expresses `target` as a linear combination of `rows`, if possible.
/// Returns the coefficient of each row in order.
pub fn solve_combination(rows: &[SparseVec], target: &SparseVec) -> Option<Vec<Rational>> {
    // Echelonize while tracking each echelon row as a combination of the
    // original rows, then peel the target against the echelon rows.
    let mut echelon: Vec<(SparseVec, SparseVec)> = Vec::new(); // (row, combo over row indices)
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        let mut combo = SparseVec::unit(idx);
        for (e, c) in &echelon {
            if let Some((p, _)) = e.leading() {
                let coeff = r.get(p);
                if !coeff.is_zero() {
                    r = r.add_scaled(e, &-coeff.clone());
                    combo = combo.add_scaled(c, &-coeff);
                }
            }
        }
        if let Some((_, lead)) = r.leading() {
            let inv = lead.recip();
            echelon.push((r.scaled(&inv), combo.scaled(&inv)));
            echelon.sort_by_key(|(e, _)| e.leading().map(|(p, _)| p).unwrap_or(usize::MAX));
        }
    }
    let mut rem = target.clone();
    let mut combo = SparseVec::new();
    for (e, c) in &echelon {
        if let Some((p, _)) = e.leading() {
            let coeff = rem.get(p);
            if !coeff.is_zero() {
                rem = rem.add_scaled(e, &-coeff.clone());
                combo = combo.add_scaled(c, &coeff);
            }
        }
    }
    if !rem.is_zero() {
        return None;
    }
    Some((0..rows.len()).map(|i| combo.get(i)).collect())
}

/// A subquotient `num / den` of a coordinate space, with canonical
/// representatives (the reduced echelon basis of `num` reduced modulo `den`).
#[derive(Clone, Debug)]
pub struct Subquotient {
    num: Rref,
    den: Rref,
    reps: Vec<SparseVec>,
}

impl Subquotient {
    /// `den` must be contained in `num`; asserted because a violation is
    /// always a construction bug, not bad input.
    pub fn new(num: Rref, den: Rref) -> Self {
        for row in den.rows() {
            assert!(num.contains(row), "denominator not contained in numerator");
        }
        let reduced = num.rows().iter().map(|r| den.reduce(r));
        let reps_rref = Rref::from_rows(num.ambient(), reduced);
        let reps = reps_rref.rows().to_vec();
        Subquotient { num, den, reps }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient(&self) -> usize {
        self.num.ambient()
    }

    /// Canonical representatives, one per quotient basis vector.
    pub fn reps(&self) -> &[SparseVec] {
        &self.reps
    }

    pub fn numerator(&self) -> &Rref {
        &self.num
    }

    pub fn denominator(&self) -> &Rref {
        &self.den
    }

    /// Coordinates of `v`'s class in the representative basis. `None` when
    /// `v` does not lie in the numerator space.
    pub fn coords_of(&self, v: &SparseVec) -> Option<Vec<Rational>> {
        let mut rem = self.den.reduce(v);
        let mut coords = vec![Rational::zero(); self.reps.len()];
        for (k, rep) in self.reps.iter().enumerate() {
            let (p, _) = rep.leading().expect("representatives are nonzero");
            let c = rem.get(p);
            if !c.is_zero() {
                rem = rem.add_scaled(rep, &-c.clone());
                coords[k] = c;
            }
        }
        rem.is_zero().then_some(coords)
    }

    /// Whether `v` represents the zero class.
    pub fn is_zero_class(&self, v: &SparseVec) -> bool {
        self.coords_of(v).is_some_and(|c| c.iter().all(Rational::is_zero))
    }
}
