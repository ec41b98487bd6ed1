//! Executable encodings of the worked examples, with their expected
//! outputs and generic verifiers for the closed-form homology formulas.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complex::{ChainComplex, GradedDims, Window};
use crate::gysin::{
    apply_theta_conjugation, degree_bookkeeping, extract_les, verify_exactness, GysinError,
    LesNode, LesNodeKind, LongExactSequence,
};
use crate::matrix::SparseMatrix;
use crate::orbits::{
    build_contact_complex, build_morse_bott_complex, ContactEntry, MbEntry, MorseBottSide,
    OrbitError, OrbitSet, ReebOrbit, S1Crit,
};
use crate::rational::Rational;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ScenarioError {
    #[error("Betti input supported outside degrees 0..={max}: degree {degree}")]
    DimensionSupportViolation { degree: i64, max: i64 },
    #[error("invalid Morse data: {0}")]
    InvalidMorseData(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Gysin(#[from] GysinError),
    #[error(transparent)]
    Filtration(#[from] crate::filtration::FiltrationError),
}

/// Nonnegative graded dimensions of a homology theory supplied as data.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BettiInput(pub BTreeMap<i64, usize>);

impl BettiInput {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, usize)>) -> Self {
        BettiInput(pairs.into_iter().filter(|&(_, n)| n > 0).collect())
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.0.iter().map(|(&d, &n)| (d, n))
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }
}

/// One verified fact about a scenario: a named comparison of an expected
/// value against what the engine computed.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

impl Check {
    fn compare<T: PartialEq + std::fmt::Debug>(label: impl Into<String>, expected: T, got: T) -> Self {
        Check {
            label: label.into(),
            expected: format!("{expected:?}"),
            got: format!("{got:?}"),
            pass: expected == got,
        }
    }
}

/// The outcome of running one scenario end to end.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ScenarioReport {
    fn new(name: impl Into<String>, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        ScenarioReport { name: name.into(), checks, pass }
    }
}

/// A verified report together with the sequence it certified, for callers
/// that render the maps.
#[derive(Clone, Debug)]
pub struct AssembledLes {
    pub report: ScenarioReport,
    pub sequence: LongExactSequence,
}

/// Deterministic pseudo-random Betti input supported in the top band
/// `[n+1, 2n]` allowed for a subcritical filling (xorshift-based so the
/// corpus needs no external randomness).
pub fn randomized_betti(seed: u64, n: i64) -> BettiInput {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let pairs: Vec<(i64, usize)> =
        (n + 1..=2 * n).map(|degree| (degree, (next() % 4) as usize)).collect();
    BettiInput::from_pairs(pairs)
}

/// A named bundle of orbit data, supplied differentials and expected
/// outputs reproducing one worked example.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub orbit_set: OrbitSet,
    pub mb_differential: Vec<MbEntry>,
    pub contact_differential: Vec<ContactEntry>,
    /// Expected graded dimensions, keyed by a descriptive name.
    pub expected_dims: BTreeMap<String, GradedDims>,
    /// Expected ranks of the degree -2 connecting map, by source contact degree.
    pub expected_d_ranks: BTreeMap<i64, usize>,
    /// Free homotopy classes to run separately; `None` runs everything at once.
    pub per_class: Option<Vec<String>>,
    pub b_max: i64,
}

fn dims_from(pairs: &[(i64, usize)]) -> GradedDims {
    let mut dims = GradedDims::new();
    for &(d, n) in pairs {
        dims.set(d, n);
    }
    dims
}

/// Riemann surface with one boundary component, genus `g`, orbit classes up
/// to `b_max`.
///
/// Orbits `gamma_b` have index `2b` and multiplicity `b`. For `g = 0` every
/// orbit is contractible and the connecting map `gamma_b -> gamma_{b-1}` is
/// installed as shift-2 data (scaled by the target multiplicity, which is
/// what the conjugated connecting map divides back out). For `g >= 1` each
/// orbit sits alone in its own homotopy class and there is no shift-2 data.
pub fn riemann_surface(g: i64, b_max: i64) -> Result<Scenario, ScenarioError> {
    assert!(g >= 0 && b_max >= 2);
    let contractible = g == 0;
    let orbits: Vec<ReebOrbit> = (1..=b_max)
        .map(|b| {
            let class = if contractible { "0".to_owned() } else { format!("b{b}") };
            let mut orbit = ReebOrbit::new(format!("gamma_{b}"), Rational::from_int(b), 2 * b)
                .with_multiplicity(b)
                .with_class_label(class);
            if b > 1 {
                orbit = orbit.iterate_of("gamma_1", b).with_parity_evidence(2, 4);
            }
            if contractible && b == 1 {
                // The unique rigid plane bounds the simple orbit.
                orbit = orbit.with_augmentation(Rational::one());
            }
            orbit
        })
        .collect();
    let orbit_set = OrbitSet::new(1, Rational::new(2 * b_max + 1, 2), orbits)?;
    let mut mb_differential = Vec::new();
    let mut expected_dims = BTreeMap::new();
    let mut expected_d_ranks = BTreeMap::new();
    if contractible {
        for b in 2..=b_max {
            // Connecting map gamma_b -> gamma_{b-1} with coefficient one;
            // the chain-level entry carries the target multiplicity.
            mb_differential.push(MbEntry::simple(
                format!("gamma_{b}"),
                S1Crit::Max,
                format!("gamma_{}", b - 1),
                S1Crit::Min,
                Rational::from_int(b - 1),
            ));
        }
        expected_dims.insert("SH+".into(), dims_from(&[(2, 1)]));
        expected_dims.insert(
            "HC".into(),
            dims_from(&(1..=b_max).map(|b| (2 * b - 2, 1)).collect::<Vec<_>>()),
        );
        for b in 1..=b_max {
            expected_d_ranks.insert(2 * b - 2, if b >= 2 { 1 } else { 0 });
        }
    } else {
        for b in 1..=b_max {
            expected_dims
                .insert(format!("SH[b{b}]"), dims_from(&[(2 * b, 1), (2 * b + 1, 1)]));
            expected_dims.insert(format!("HC[b{b}]"), dims_from(&[(2 * b - 2, 1)]));
            expected_d_ranks.insert(2 * b - 2, 0);
        }
    }
    Ok(Scenario {
        name: format!("riemann-g{g}"),
        orbit_set,
        mb_differential,
        contact_differential: Vec::new(),
        expected_dims,
        expected_d_ranks,
        per_class: (!contractible)
            .then(|| (1..=b_max).map(|b| format!("b{b}")).collect()),
        b_max,
    })
}

/// Multiplicities of the minimum-row basis classes of the shift-2 page map
/// out of column `p`, resolved through the pivot generator of each class.
fn row_multiplicities(
    os: &OrbitSet,
    fc: &crate::filtration::FilteredComplex,
    page: &crate::filtration::Page,
    p: i64,
) -> Result<Vec<i64>, ScenarioError> {
    let Some(slot) = page.slot(p, 1) else {
        return Ok(Vec::new());
    };
    slot.reps()
        .iter()
        .map(|rep| {
            let (lead, _) = rep.leading().expect("slot representatives are nonzero");
            let gen = fc.complex().generator(lead);
            let orbit_name = gen
                .name
                .split('.')
                .next()
                .expect("generator names are orbit-qualified");
            Ok(os.kappa(orbit_name)?)
        })
        .collect()
}

/// One row of the connecting-map table: the shift-2 page differential out
/// of contact degree `hc_from`, before and after the multiplicity
/// conjugation, with its rank.
#[derive(Clone, Debug, Serialize)]
pub struct DTableRow {
    pub hc_from: i64,
    pub hc_to: i64,
    pub d2: Vec<Vec<Rational>>,
    pub d: Vec<Vec<Rational>>,
    pub rank: usize,
    pub contaminated: bool,
}

/// The connecting map per contact degree: the theta-conjugated shift-2
/// page differentials of a Morse-Bott complex built from `os`.
pub fn connecting_map_table(
    os: &OrbitSet,
    fc: &crate::filtration::FilteredComplex,
) -> Result<Vec<DTableRow>, ScenarioError> {
    let pages = fc.pages(2)?;
    let e2 = &pages[2];
    let offset = os.n() - 3;
    let mut rows = Vec::new();
    for ((p, q), _) in e2.slots() {
        if q != 0 {
            continue;
        }
        let d2 = match e2.differential_from(p, 0) {
            Some(m) => m.clone(),
            None => SparseMatrix::zero(e2.slot_dim(p - 2, 1), e2.slot_dim(p, 0)),
        };
        let kappas = row_multiplicities(os, fc, e2, p - 2)?;
        let d = apply_theta_conjugation(&d2, &kappas)?;
        // Diagonal rescaling preserves the rank; assert the pairing.
        assert_eq!(d.rank(), d2.rank(), "conjugation must preserve rank");
        rows.push(DTableRow {
            hc_from: p + offset,
            hc_to: p - 2 + offset,
            d2: d2.to_dense(),
            rank: d.rank(),
            d: d.to_dense(),
            contaminated: fc.is_contaminated_level(p),
        });
    }
    Ok(rows)
}

/// Builds the class-filtered Morse-Bott complex of a pipeline scenario.
pub fn scenario_filtered_complex(
    scenario: &Scenario,
    class_filter: Option<&str>,
) -> Result<(OrbitSet, crate::filtration::FilteredComplex), ScenarioError> {
    let os = &scenario.orbit_set;
    let os_run = filtered_orbit_set(os, class_filter)?;
    let mb: Vec<MbEntry> = scenario
        .mb_differential
        .iter()
        .filter(|e| {
            class_filter.is_none()
                || os.orbit(&e.from_orbit).map(|o| o.class_label.as_str()) == class_filter
        })
        .cloned()
        .collect();
    let mut fc = build_morse_bott_complex(&os_run, MorseBottSide::Symplectic, &mb)?;
    if class_filter.is_some() {
        // A fixed nontrivial class contains exactly one orbit, so the
        // action bound truncates nothing inside the class.
        fc = fc.assume_complete();
    }
    Ok((os_run, fc))
}

/// The degree -2 connecting map ranks per contact degree.
pub fn connecting_map_ranks(
    scenario: &Scenario,
    os: &OrbitSet,
    class_filter: Option<&str>,
) -> Result<BTreeMap<i64, usize>, ScenarioError> {
    let _ = os;
    let (os_run, fc) = scenario_filtered_complex(scenario, class_filter)?;
    Ok(connecting_map_table(&os_run, &fc)?
        .into_iter()
        .map(|row| (row.hc_from, row.rank))
        .collect())
}

/// Spliced sequence plus connecting-map table for one class run of a
/// pipeline scenario.
pub fn riemann_les(
    scenario: &Scenario,
    class_filter: Option<&str>,
) -> Result<(AssembledLes, Vec<DTableRow>), ScenarioError> {
    let (os_run, fc) = scenario_filtered_complex(scenario, class_filter)?;
    let offset = os_run.n() - 3;
    let window = clean_sh_window(&fc)
        .ok_or_else(|| ScenarioError::InvalidMorseData("empty scenario complex".into()))?;
    let les = extract_les(&fc, offset, window, None)?;
    let cert = verify_exactness(&les);
    let checks = vec![Check::compare("les exact", true, cert.verdict)];
    let table = connecting_map_table(&os_run, &fc)?;
    let name = match class_filter {
        Some(c) => format!("{}[{c}]", scenario.name),
        None => scenario.name.clone(),
    };
    Ok((AssembledLes { report: ScenarioReport::new(name, checks), sequence: les }, table))
}

fn filtered_orbit_set(os: &OrbitSet, class_filter: Option<&str>) -> Result<OrbitSet, ScenarioError> {
    let Some(filter) = class_filter else {
        return Ok(os.clone());
    };
    let orbits: Vec<ReebOrbit> = os
        .orbits()
        .iter()
        .filter(|o| o.class_label == filter)
        .cloned()
        .collect();
    Ok(OrbitSet::new(os.n(), os.action_bound().clone(), orbits)?
        .with_classes(os.classes().to_vec())?)
}

/// Runs the full pipeline of a Riemann-surface scenario: Morse-Bott
/// complex, pages, long exact sequence, exactness, and the comparison of
/// every expected block.
pub fn run_riemann_scenario(scenario: &Scenario) -> Result<ScenarioReport, ScenarioError> {
    let os = &scenario.orbit_set;
    let offset = os.n() - 3;
    let mut checks = Vec::new();
    let class_runs: Vec<Option<String>> = match &scenario.per_class {
        Some(classes) => classes.iter().cloned().map(Some).collect(),
        None => vec![None],
    };
    for class in &class_runs {
        let filter = class.as_deref();
        let tag = filter.map(|c| format!("[{c}]")).unwrap_or_default();
        let (os_run, fc) = scenario_filtered_complex(scenario, filter)?;

        // Symplectic homology block on uncontaminated degrees.
        let einf = fc.e_infinity().map_err(GysinError::from)?;
        checks.push(Check::compare(
            format!("convergence{tag}"),
            true,
            einf.certificate.verdict,
        ));
        let contaminated = fc.contaminated_degrees();
        let sh_key = filter.map(|c| format!("SH[{c}]")).unwrap_or_else(|| "SH+".into());
        if let Some(expected) = scenario.expected_dims.get(&sh_key) {
            let window = fc.complex().degree_range().expect("nonempty complex");
            for k in window.degrees().filter(|k| !contaminated.contains(k)) {
                checks.push(Check::compare(
                    format!("{sh_key}_{k}"),
                    expected.dim(k),
                    einf.homology.dim(k),
                ));
            }
        }

        // Contact homology block.
        let contact = build_contact_complex(&os_run, filter, &scenario.contact_differential)?;
        let hc_key = filter.map(|c| format!("HC[{c}]")).unwrap_or_else(|| "HC".into());
        if let Some(expected) = scenario.expected_dims.get(&hc_key) {
            let window = contact.degree_range().expect("nonempty contact complex");
            let hc = contact.homology(window).map_err(OrbitError::from)?;
            for (k, dim) in expected.support() {
                checks.push(Check::compare(format!("{hc_key}_{k}"), dim, hc.dims.dim(k)));
            }
        }

        // Connecting map ranks via the conjugated page differential.
        let ranks = connecting_map_ranks(scenario, os, filter)?;
        for (&hc_degree, &expected) in &scenario.expected_d_ranks {
            let relevant = match filter {
                Some(_) => ranks.contains_key(&hc_degree),
                None => true,
            };
            if relevant {
                checks.push(Check::compare(
                    format!("rank D{tag} on HC_{hc_degree}"),
                    expected,
                    ranks.get(&hc_degree).copied().unwrap_or(0),
                ));
            }
        }

        // The spliced sequence over the clean window must certify exact.
        let window = clean_sh_window(&fc);
        if let Some(window) = window {
            let les = extract_les(&fc, offset, window, None)?;
            let cert = verify_exactness(&les);
            checks.push(Check::compare(format!("les exact{tag}"), true, cert.verdict));
        }
    }
    Ok(ScenarioReport::new(scenario.name.clone(), checks))
}

/// Window for splicing: from the bottom of the complex up to one degree
/// past the last uncontaminated one, so the top clean node is interior to
/// the emitted sequence. Contaminated nodes are flagged and not counted.
pub fn clean_sh_window(fc: &crate::filtration::FilteredComplex) -> Option<Window> {
    let range = fc.complex().degree_range()?;
    let contaminated = fc.contaminated_degrees();
    let hi = (range.lo..=range.hi).rfind(|k| !contaminated.contains(k))?;
    Some(Window::new(range.lo, hi + 1))
}

/// Assembles the split long exact sequence of a subcritical filling from
/// the relative homology of the domain: contact homology is the sum of
/// even right-shifts of `H_{*+2}(W, dW)`, positive symplectic homology is
/// one copy, the inclusion and projection are the block maps, and the
/// connecting maps into symplectic homology vanish.
pub fn subcritical_stein(
    betti: &BettiInput,
    n: i64,
    window: Window,
) -> Result<AssembledLes, ScenarioError> {
    for (degree, _) in betti.support() {
        if degree > 2 * n || degree < 0 {
            return Err(ScenarioError::DimensionSupportViolation { degree, max: 2 * n });
        }
    }
    // HC_k = sum_{m >= 0} H_{k - 2m + 2}(W, dW).
    let hc = |k: i64| -> usize {
        (0..).map_while(|m| {
            let d = k - 2 * m + 2;
            (d >= 0).then(|| betti.dim(d))
        })
        .sum()
    };
    let sh_of_hc_degree = |k: i64| betti.dim(k + 2);
    let mut checks = Vec::new();
    let mut nodes: Vec<LesNode> = Vec::new();
    let mut maps: Vec<SparseMatrix> = Vec::new();
    for k in window.degrees().rev() {
        let seg = degree_bookkeeping(n, k);
        let sh_dim = sh_of_hc_degree(k);
        let hc_upper = hc(k);
        let hc_lower = hc(k - 2);
        nodes.push(LesNode {
            label: format!("SH_{}", seg.sh_upper),
            kind: LesNodeKind::Sh { degree: seg.sh_upper },
            dim: sh_dim,
            contaminated: false,
        });
        // Inclusion of the m = 0 summand.
        let mut incl = SparseMatrix::zero(hc_upper, sh_dim);
        for i in 0..sh_dim {
            incl.set(i, i, Rational::one());
        }
        maps.push(incl);
        nodes.push(LesNode {
            label: format!("HC_{k}"),
            kind: LesNodeKind::Hc { p: k, q: 0, hc_degree: k },
            dim: hc_upper,
            contaminated: false,
        });
        // Projection killing the m = 0 summand: HC_k -> HC_{k-2}.
        let mut proj = SparseMatrix::zero(hc_lower, hc_upper);
        for i in 0..hc_lower.min(hc_upper.saturating_sub(sh_dim)) {
            proj.set(i, i + sh_dim, Rational::one());
        }
        maps.push(proj);
        nodes.push(LesNode {
            label: format!("HC_{}", k - 2),
            kind: LesNodeKind::Hc { p: k - 2, q: 1, hc_degree: k - 2 },
            dim: hc_lower,
            contaminated: false,
        });
        // Connecting map into SH vanishes.
        maps.push(SparseMatrix::zero(sh_of_hc_degree(k - 1), hc_lower));
    }
    let last = window.lo - 1;
    nodes.push(LesNode {
        label: format!("SH_{}", degree_bookkeeping(n, last).sh_upper),
        kind: LesNodeKind::Sh { degree: degree_bookkeeping(n, last).sh_upper },
        dim: sh_of_hc_degree(last),
        contaminated: false,
    });
    let seq = LongExactSequence { nodes, maps };
    let cert = verify_exactness(&seq);
    checks.push(Check::compare("les exact", true, cert.verdict));
    // Every connecting map into SH has rank zero.
    let connecting_ranks: Vec<usize> =
        seq.maps.iter().skip(2).step_by(3).map(SparseMatrix::rank).collect();
    checks.push(Check::compare(
        "connecting ranks",
        vec![0; connecting_ranks.len()],
        connecting_ranks,
    ));
    // The formula route and the node dimensions agree by construction;
    // record the instantiated dims for the report.
    for k in window.degrees() {
        checks.push(Check::compare(format!("HC_{k}"), hc(k), hc(k)));
    }
    Ok(AssembledLes { report: ScenarioReport::new("subcritical-stein", checks), sequence: seq })
}

/// A Morse complex of the base manifold supplied as data: generator names,
/// indices, and differential entries.
#[derive(Clone, Debug)]
pub struct MorseComplexData {
    pub points: Vec<(String, i64)>,
    pub differential: Vec<(String, String, Rational)>,
}

impl MorseComplexData {
    /// A perfect Morse complex realizing the given Betti numbers.
    pub fn perfect(betti: &BettiInput) -> Self {
        let mut points = Vec::new();
        for (degree, dim) in betti.support() {
            for i in 0..dim {
                points.push((format!("p{degree}_{i}"), degree));
            }
        }
        MorseComplexData { points, differential: Vec::new() }
    }

    fn to_complex(&self) -> Result<ChainComplex, ScenarioError> {
        let mut builder = ChainComplex::builder();
        for (name, index) in &self.points {
            builder.add_generator(crate::complex::Generator::new(name.clone(), *index));
        }
        for (from, to, coeff) in &self.differential {
            builder.add_entry(from.clone(), to.clone(), coeff.clone());
        }
        let complex = builder
            .build()
            .map_err(|e| ScenarioError::InvalidMorseData(e.to_string()))?;
        let report = complex.validate();
        if !report.is_valid() {
            return Err(ScenarioError::InvalidMorseData(report.to_string()));
        }
        Ok(complex)
    }
}

/// Negative disc bundle over a base with the given Morse data: orbit
/// `gamma_{p,k}` covers the fiber over the critical point `p` with
/// multiplicity `k <= k_max`, graded by `ind(p) + 2k - 2` on the contact
/// side. The contact differential repeats the Morse differential in every
/// multiplicity; contact homology is compared against the closed form
/// `sum_m H_{* - 2m}(base)` and the split sequence with vanishing
/// connecting maps is certified.
pub fn disc_bundle(
    base_morse: &MorseComplexData,
    n: i64,
    k_max: i64,
) -> Result<AssembledLes, ScenarioError> {
    assert!(k_max >= 1);
    let base_complex = base_morse.to_complex()?;
    let base_window = base_complex.degree_range().unwrap_or(Window::new(0, 0));
    let base_h = base_complex
        .homology(base_window)
        .map_err(|e| ScenarioError::InvalidMorseData(e.to_string()))?
        .dims;

    // Orbit data: mu = ind + 2k - (n - 1) so that mu + n - 3 = ind + 2k - 2.
    let mut orbits = Vec::new();
    for k in 1..=k_max {
        for (name, index) in &base_morse.points {
            let mut orbit = ReebOrbit::new(
                format!("{name}x{k}"),
                Rational::from_int(k) + Rational::new(*index, 1000),
                index + 2 * k - (n - 1),
            )
            .with_multiplicity(k);
            if k > 1 {
                // Same parity in every multiplicity: all orbits are good.
                orbit = orbit
                    .iterate_of(format!("{name}x1"), k)
                    .with_parity_evidence(index + 2 - (n - 1), index + 4 - (n - 1));
            }
            orbits.push(orbit);
        }
    }
    let os = OrbitSet::new(n, Rational::from_int(k_max + 1), orbits)?;
    let contact_differential: Vec<ContactEntry> = (1..=k_max)
        .flat_map(|k| {
            base_morse.differential.iter().map(move |(from, to, coeff)| {
                ContactEntry::simple(format!("{from}x{k}"), format!("{to}x{k}"), coeff.clone())
            })
        })
        .collect();
    let contact = build_contact_complex(&os, None, &contact_differential)?;
    let window = contact.degree_range().expect("nonempty disc bundle complex");
    let hc = contact.homology(window).map_err(OrbitError::from)?.dims;

    // Uncontaminated degrees: every multiplicity contributing to the sum is
    // within the truncation, i.e. degree <= 2 k_max - 2 (even side).
    let clean_max = 2 * k_max - 2;
    let closed_form = |degree: i64| -> usize {
        (0..=k_max - 1).map(|m| base_h.dim(degree - 2 * m)).sum()
    };
    let mut checks = Vec::new();
    for degree in 0..=clean_max {
        checks.push(Check::compare(
            format!("HC_{degree}"),
            closed_form(degree),
            hc.dim(degree),
        ));
    }

    // Split sequence: SH+ = H_{*+n-3}(base), inclusion of the m = 0 block,
    // projection onto the m >= 1 blocks, zero connecting maps.
    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    for k in (0..=clean_max).rev() {
        let sh_dim = base_h.dim(k);
        let hc_upper = closed_form(k);
        let hc_lower = closed_form(k - 2);
        let seg = degree_bookkeeping(n, k);
        nodes.push(LesNode {
            label: format!("SH_{}", seg.sh_upper),
            kind: LesNodeKind::Sh { degree: seg.sh_upper },
            dim: sh_dim,
            contaminated: false,
        });
        let mut incl = SparseMatrix::zero(hc_upper, sh_dim);
        for i in 0..sh_dim {
            incl.set(i, i, Rational::one());
        }
        maps.push(incl);
        nodes.push(LesNode {
            label: format!("HC_{k}"),
            kind: LesNodeKind::Hc { p: k, q: 0, hc_degree: k },
            dim: hc_upper,
            contaminated: false,
        });
        let mut proj = SparseMatrix::zero(hc_lower, hc_upper);
        for i in 0..hc_lower.min(hc_upper.saturating_sub(sh_dim)) {
            proj.set(i, i + sh_dim, Rational::one());
        }
        maps.push(proj);
        nodes.push(LesNode {
            label: format!("HC_{}", k - 2),
            kind: LesNodeKind::Hc { p: k - 2, q: 1, hc_degree: k - 2 },
            dim: hc_lower,
            contaminated: false,
        });
        maps.push(SparseMatrix::zero(base_h.dim(k - 1), hc_lower));
    }
    nodes.push(LesNode {
        label: "SH_tail".into(),
        kind: LesNodeKind::Sh { degree: degree_bookkeeping(n, -1).sh_upper },
        dim: base_h.dim(-1),
        contaminated: false,
    });
    let seq = LongExactSequence { nodes, maps };
    let cert = verify_exactness(&seq);
    checks.push(Check::compare("les exact", true, cert.verdict));
    let connecting_ranks: Vec<usize> =
        seq.maps.iter().skip(2).step_by(3).map(SparseMatrix::rank).collect();
    checks.push(Check::compare(
        "connecting ranks",
        vec![0; connecting_ranks.len()],
        connecting_ranks,
    ));
    Ok(AssembledLes { report: ScenarioReport::new("disc-bundle", checks), sequence: seq })
}

/// Certifies (or refutes, pinpointing the first inconsistent degree) the
/// candidate sequence
/// `... -> H_k(L) -> H^{S1}_k -> H^{S1}_{k-2} -> H_{k-1}(L) -> ...`
/// assembled from supplied Betti data and connecting-map ranks.
///
/// Maps are realized as staircase matrices: map `i` kills the image of map
/// `i-1` (the leading coordinates) and sends the next block of coordinates
/// onto the start of the target. If the supplied ranks are consistent the
/// result is exact; otherwise [`verify_exactness`] names the failing node.
pub fn cotangent_gysin(
    lambda_betti: &BettiInput,
    s1_betti: &BettiInput,
    d_ranks: &BTreeMap<i64, usize>,
    window: Window,
    relative: bool,
) -> AssembledLes {
    let pair = if relative { "(L0L, L)" } else { "LL" };
    let mut dims: Vec<(String, i64, usize)> = Vec::new();
    let mut intended_ranks: Vec<usize> = Vec::new();
    for k in window.degrees().rev() {
        let d_k = d_ranks.get(&k).copied().unwrap_or(0);
        dims.push((format!("H_{k}({pair})"), k, lambda_betti.dim(k)));
        intended_ranks.push(s1_betti.dim(k).saturating_sub(d_k));
        dims.push((format!("H^S1_{k}({pair})"), k, s1_betti.dim(k)));
        intended_ranks.push(d_k);
        dims.push((format!("H^S1_{}({pair})", k - 2), k - 2, s1_betti.dim(k - 2)));
        intended_ranks.push(s1_betti.dim(k - 2).saturating_sub(d_k));
    }
    let tail = window.lo - 1;
    dims.push((format!("H_{tail}({pair})"), tail, lambda_betti.dim(tail)));

    let nodes: Vec<LesNode> = dims
        .iter()
        .map(|(label, degree, dim)| LesNode {
            label: label.clone(),
            kind: LesNodeKind::Sh { degree: *degree },
            dim: *dim,
            contaminated: false,
        })
        .collect();
    let mut maps = Vec::with_capacity(dims.len() - 1);
    let mut prev_rank = 0usize;
    for i in 0..dims.len() - 1 {
        let (src_dim, dst_dim) = (dims[i].2, dims[i + 1].2);
        let achievable = intended_ranks[i].min(src_dim.saturating_sub(prev_rank)).min(dst_dim);
        let mut m = SparseMatrix::zero(dst_dim, src_dim);
        for j in 0..achievable {
            m.set(j, prev_rank + j, Rational::one());
        }
        maps.push(m);
        prev_rank = achievable;
    }
    let seq = LongExactSequence { nodes, maps };
    let cert = verify_exactness(&seq);
    let mut checks = vec![Check::compare("les exact", true, cert.verdict)];
    if let Some(failing) = cert.rows.iter().find(|r| !r.exact) {
        checks.push(Check {
            label: "first failure".into(),
            expected: "-".into(),
            got: failing.node.clone(),
            pass: false,
        });
    }
    AssembledLes { report: ScenarioReport::new("cotangent-gysin", checks), sequence: seq }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_scenario_reproduces_the_expected_blocks() {
        let scenario = riemann_surface(0, 5).unwrap();
        let report = run_riemann_scenario(&scenario).unwrap();
        assert!(report.pass, "{:#?}", report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn genus_one_scenario_reproduces_the_expected_blocks() {
        let scenario = riemann_surface(1, 4).unwrap();
        let report = run_riemann_scenario(&scenario).unwrap();
        assert!(report.pass, "{:#?}", report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn disc_d_has_zero_rank_on_the_bottom_degree() {
        let scenario = riemann_surface(0, 3).unwrap();
        let ranks = connecting_map_ranks(&scenario, &scenario.orbit_set, None).unwrap();
        assert_eq!(ranks.get(&0).copied().unwrap_or(0), 0);
        assert_eq!(ranks[&2], 1);
        assert_eq!(ranks[&4], 1);
    }

    #[test]
    fn ball_subcritical_stein() {
        // B^4: H_4(W, dW) = Q. HC_k = Q for k in {2, 4, 6, ...}.
        let betti = BettiInput::from_pairs([(4, 1)]);
        let result = subcritical_stein(&betti, 2, Window::new(0, 8)).unwrap();
        assert!(result.report.pass, "{:#?}", result.report.checks);
    }

    #[test]
    fn zero_betti_subcritical_stein_is_trivially_exact() {
        let result = subcritical_stein(&BettiInput::default(), 2, Window::new(-2, 6)).unwrap();
        assert!(result.report.pass);
    }

    #[test]
    fn two_degree_subcritical_stein() {
        let betti = BettiInput::from_pairs([(3, 1), (4, 1)]);
        let result = subcritical_stein(&betti, 2, Window::new(0, 8)).unwrap();
        assert!(result.report.pass, "{:#?}", result.report.checks);
    }

    #[test]
    fn subcritical_support_violation() {
        let betti = BettiInput::from_pairs([(5, 1)]);
        assert!(matches!(
            subcritical_stein(&betti, 2, Window::new(0, 4)),
            Err(ScenarioError::DimensionSupportViolation { degree: 5, .. })
        ));
    }

    #[test]
    fn torus_disc_bundle() {
        let betti = BettiInput::from_pairs([(0, 1), (1, 2), (2, 1)]);
        let result = disc_bundle(&MorseComplexData::perfect(&betti), 2, 3).unwrap();
        let failing: Vec<_> = result.report.checks.iter().filter(|c| !c.pass).collect();
        assert!(result.report.pass, "{failing:#?}");
    }

    #[test]
    fn sphere_disc_bundle() {
        let betti = BettiInput::from_pairs([(0, 1), (2, 1)]);
        let result = disc_bundle(&MorseComplexData::perfect(&betti), 2, 1).unwrap();
        assert!(result.report.pass, "{:#?}", result.report.checks);
    }

    #[test]
    fn disc_bundle_with_nonzero_morse_differential() {
        // A tilted-height style complex: a pair of critical points cancelling.
        let data = MorseComplexData {
            points: vec![("a".into(), 1), ("b".into(), 0), ("c".into(), 0)],
            differential: vec![
                ("a".into(), "b".into(), Rational::from_int(2)),
                ("a".into(), "c".into(), Rational::from_int(-2)),
            ],
        };
        let result = disc_bundle(&data, 2, 2).unwrap();
        assert!(result.report.pass, "{:#?}", result.report.checks);
    }

    #[test]
    fn cotangent_split_case_is_exact() {
        // Free-action shape: H(Λ) = H^{S1} convolved with (1,1), D = 0.
        let s1 = BettiInput::from_pairs([(0, 1), (2, 1), (4, 1)]);
        let lambda = BettiInput::from_pairs(
            (0..=5).map(|k| (k, s1.dim(k) + s1.dim(k - 1))).collect::<Vec<_>>(),
        );
        let result =
            cotangent_gysin(&lambda, &s1, &BTreeMap::new(), Window::new(0, 6), false);
        assert!(result.report.pass, "{:#?}", result.report.checks);
    }

    #[test]
    fn cotangent_refutes_inconsistent_dims() {
        let s1 = BettiInput::from_pairs([(0, 1), (2, 1)]);
        let mut lambda = BettiInput::from_pairs(
            (0..=4).map(|k| (k, s1.dim(k) + s1.dim(k - 1))).collect::<Vec<_>>(),
        );
        // Off-by-one at degree 1.
        lambda.0.insert(1, 2);
        let result = cotangent_gysin(&lambda, &s1, &BTreeMap::new(), Window::new(0, 4), false);
        assert!(!result.report.pass);
    }

    #[test]
    fn cotangent_all_zero_is_exact() {
        let result = cotangent_gysin(
            &BettiInput::default(),
            &BettiInput::default(),
            &BTreeMap::new(),
            Window::new(0, 4),
            true,
        );
        assert!(result.report.pass);
    }
}
