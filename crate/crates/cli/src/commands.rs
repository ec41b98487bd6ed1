//! Command implementations. Every command renders either JSON or text and
//! classifies its outcome: `Pass` exits 0, `Fail` exits 1 (a certificate or
//! validation failure), and `Err` exits 2 (unreadable or malformed input).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use gysin_core::complex::{ChainComplex, Window};
use gysin_core::filtration::FilteredComplex;
use gysin_core::gysin::{degree_bookkeeping, extract_les, verify_exactness, LesNodeKind};
use gysin_core::matrix::SparseMatrix;
use gysin_core::oracle;
use gysin_core::orbits::OrbitError;
use gysin_core::scenarios::{clean_sh_window, connecting_map_table, DTableRow, ScenarioReport};
use serde::Serialize;

use crate::format::{CliBuildError, ComplexFile, FileMode};
use crate::registry;
use crate::report::*;

pub enum Outcome {
    Pass(String),
    Fail(String),
}

impl Outcome {
    fn of(pass: bool, rendered: String) -> Self {
        if pass {
            Outcome::Pass(rendered)
        } else {
            Outcome::Fail(rendered)
        }
    }
}

fn render<T: Serialize>(value: &T, text: String, json: bool) -> Result<String> {
    if json {
        Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
    } else {
        Ok(text)
    }
}

fn load(path: &Path) -> Result<ComplexFile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    ComplexFile::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn parse_window(spec: &str) -> Result<Window> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("window must be of the form a:b, got {spec:?}"))?;
    let lo: i64 = lo.trim().parse().context("window start")?;
    let hi: i64 = hi.trim().parse().context("window end")?;
    if lo > hi {
        return Err(anyhow!("window {spec:?} is empty"));
    }
    Ok(Window::new(lo, hi))
}

/// The complex a file denotes, for homology-style commands: the plain
/// complex in explicit mode, the Morse-Bott complex in orbit mode.
/// The `Err` side of the inner result is a validation failure (exit 1),
/// the outer one an input error (exit 2).
fn file_complex(file: &ComplexFile) -> Result<std::result::Result<ChainComplex, String>> {
    match file.mode()? {
        FileMode::Explicit | FileMode::Empty => Ok(Ok(file.to_plain_complex()?)),
        FileMode::Orbits => match file.to_filtered_complex() {
            Ok(fc) => Ok(Ok(fc.complex().clone())),
            Err(CliBuildError::Format(e)) => Err(e.into()),
            Err(CliBuildError::Orbit(e)) => Ok(Err(orbit_error_class(e)?)),
            Err(CliBuildError::Filtration(e)) => Ok(Err(e.to_string())),
        },
    }
}

/// Splits orbit errors into data-validation failures (returned) and
/// malformed-input errors (raised).
fn orbit_error_class(e: OrbitError) -> Result<String> {
    match e {
        OrbitError::UnknownOrbit(_)
        | OrbitError::DuplicateOrbit(_)
        | OrbitError::UnknownMultiplicity(_)
        | OrbitError::InvalidClassSet(_) => Err(anyhow!(e)),
        other => Ok(other.to_string()),
    }
}

pub fn cmd_validate(path: &Path, json: bool) -> Result<Outcome> {
    let file = load(path)?;
    let report = match file.mode()? {
        FileMode::Explicit | FileMode::Empty => {
            let complex = file.to_plain_complex()?;
            let validation = complex.validate();
            ValidateReport {
                valid: validation.is_valid(),
                violations: validation.violations.iter().map(|v| v.to_string()).collect(),
            }
        }
        FileMode::Orbits => match file.to_filtered_complex() {
            Ok(_) => ValidateReport { valid: true, violations: Vec::new() },
            Err(CliBuildError::Format(e)) => return Err(e.into()),
            Err(CliBuildError::Orbit(e)) => {
                let violations = match &e {
                    OrbitError::InvalidComplex(report) => {
                        report.violations.iter().map(|v| v.to_string()).collect()
                    }
                    _ => vec![orbit_error_class(e)?],
                };
                ValidateReport { valid: false, violations }
            }
            Err(CliBuildError::Filtration(e)) => {
                ValidateReport { valid: false, violations: vec![e.to_string()] }
            }
        },
    };
    let text = validate_text(&report);
    Ok(Outcome::of(report.valid, render(&report, text, json)?))
}

pub fn cmd_homology(
    path: &Path,
    window: Option<&str>,
    with_oracle: bool,
    json: bool,
) -> Result<Outcome> {
    let file = load(path)?;
    let complex = match file_complex(&file)? {
        Ok(c) => c,
        Err(msg) => return Ok(Outcome::Fail(format!("validation failed: {msg}\n"))),
    };
    let window = match window {
        Some(spec) => parse_window(spec)?,
        None => complex.degree_range().unwrap_or(Window::new(0, 0)),
    };
    let result = match complex.homology(window) {
        Ok(h) => h,
        Err(e) => return Ok(Outcome::Fail(format!("validation failed: {e}\n"))),
    };
    let dims: Vec<DimRow> = window
        .degrees()
        .map(|degree| DimRow { degree, dim: result.dims.dim(degree) })
        .collect();
    let representatives: Vec<RepRow> = result
        .representatives
        .iter()
        .map(|(&degree, classes)| RepRow {
            degree,
            classes: classes
                .iter()
                .map(|chain| {
                    chain
                        .iter()
                        .map(|(name, coeff)| format!("{coeff}*{name}"))
                        .collect::<Vec<_>>()
                        .join(" + ")
                })
                .collect(),
        })
        .collect();
    let oracle = with_oracle.then(|| {
        let dims = oracle::homology_dims(&complex, window);
        OracleBlock {
            dims: window
                .degrees()
                .map(|degree| DimRow { degree, dim: dims.dim(degree) })
                .collect(),
            matches: dims == result.dims,
        }
    });
    let pass = oracle.as_ref().is_none_or(|o| o.matches);
    let report = HomologyReport { dims, representatives, oracle };
    let text = homology_text(&report);
    Ok(Outcome::of(pass, render(&report, text, json)?))
}

fn filtered_from_file(file: &ComplexFile) -> Result<std::result::Result<FilteredComplex, String>> {
    match file.to_filtered_complex() {
        Ok(fc) => Ok(Ok(fc)),
        Err(CliBuildError::Format(e)) => Err(e.into()),
        Err(CliBuildError::Orbit(e)) => Ok(Err(orbit_error_class(e)?)),
        Err(CliBuildError::Filtration(e)) => Ok(Err(e.to_string())),
    }
}

pub fn cmd_pages(path: &Path, window: Option<&str>, json: bool) -> Result<Outcome> {
    let file = load(path)?;
    let fc = match filtered_from_file(&file)? {
        Ok(fc) => fc,
        Err(msg) => return Ok(Outcome::Fail(format!("validation failed: {msg}\n"))),
    };
    let window = window.map(parse_window).transpose()?;
    let pages = match fc.pages(3) {
        Ok(pages) => pages,
        Err(e) => return Ok(Outcome::Fail(format!("validation failed: {e}\n"))),
    };
    let in_window = |p: i64, q: i64| window.is_none_or(|w| w.contains(p + q));
    let tables: Vec<PageTable> = pages
        .iter()
        .map(|page| PageTable {
            r: page.r(),
            slots: page
                .slots()
                .filter(|((p, q), _)| in_window(*p, *q))
                .map(|((p, q), sq)| SlotRow {
                    p,
                    q,
                    dim: sq.dim(),
                    contaminated: page.is_contaminated(p, q),
                })
                .collect(),
            differentials: page
                .differentials()
                .filter(|((p, q), _)| in_window(*p, *q))
                .map(|((p, q), m)| PageDiffRow {
                    from: (p, q),
                    to: (p - page.r(), q + page.r() - 1),
                    rank: m.rank(),
                    matrix: m.to_dense(),
                })
                .collect(),
        })
        .collect();
    let report = PagesReport { pages: tables, two_line_at_e2: pages[2].is_two_line() };
    let text = pages_text(&report);
    Ok(Outcome::of(true, render(&report, text, json)?))
}

fn section_from_sequence(
    name: String,
    les: &gysin_core::scenarios::AssembledLes,
    d_table: Vec<DTableRow>,
    n: i64,
) -> GysinSection {
    let cert = verify_exactness(&les.sequence);
    let nodes: Vec<NodeRow> = les
        .sequence
        .nodes
        .iter()
        .map(|node| NodeRow {
            label: node.label.clone(),
            dim: node.dim,
            contaminated: node.contaminated,
        })
        .collect();
    let maps: Vec<MapRow> = les
        .sequence
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| MapRow {
            from: les.sequence.nodes[i].label.clone(),
            to: les.sequence.nodes[i + 1].label.clone(),
            rank: m.rank(),
            matrix: m.to_dense(),
        })
        .collect();
    let degree_annotations = les
        .sequence
        .nodes
        .iter()
        .filter_map(|node| match node.kind {
            LesNodeKind::Hc { q: 0, hc_degree, .. } => Some(degree_bookkeeping(n, hc_degree)),
            _ => None,
        })
        .collect();
    GysinSection { name, nodes, maps, d_table, degree_annotations, exactness: cert }
}

/// Connecting-map table for explicit-mode files: no orbit multiplicities
/// are known, so the conjugation is the identity.
fn d_table_identity_kappa(fc: &FilteredComplex, offset: i64) -> Result<Vec<DTableRow>> {
    let pages = fc.pages(2).map_err(|e| anyhow!(e.to_string()))?;
    let e2 = &pages[2];
    let mut rows = Vec::new();
    for ((p, q), _) in e2.slots() {
        if q != 0 {
            continue;
        }
        let d2 = match e2.differential_from(p, 0) {
            Some(m) => m.clone(),
            None => SparseMatrix::zero(e2.slot_dim(p - 2, 1), e2.slot_dim(p, 0)),
        };
        rows.push(DTableRow {
            hc_from: p + offset,
            hc_to: p - 2 + offset,
            d2: d2.to_dense(),
            rank: d2.rank(),
            d: d2.to_dense(),
            contaminated: fc.is_contaminated_level(p),
        });
    }
    Ok(rows)
}

pub fn cmd_gysin(
    path: Option<&Path>,
    scenario: Option<&str>,
    window: Option<&str>,
    json: bool,
) -> Result<Outcome> {
    let mut sections = Vec::new();
    let mut notes = Vec::new();
    match (path, scenario) {
        (Some(_), Some(_)) => return Err(anyhow!("pass a file or --scenario, not both")),
        (None, None) => return Err(anyhow!("pass a file or --scenario <name>")),
        (None, Some(name)) => {
            for (i, (les, table, n)) in registry::scenario_sequences(name)?.into_iter().enumerate()
            {
                let section_name = if les.report.name.is_empty() {
                    format!("{name}#{i}")
                } else {
                    les.report.name.clone()
                };
                sections.push(section_from_sequence(section_name, &les, table, n));
            }
        }
        (Some(path), None) => {
            let file = load(path)?;
            let fc = match filtered_from_file(&file)? {
                Ok(fc) => fc,
                Err(msg) => return Ok(Outcome::Fail(format!("validation failed: {msg}\n"))),
            };
            let offset = file.n - 3;
            let window = match window {
                Some(spec) => parse_window(spec)?,
                None => match clean_sh_window(&fc) {
                    Some(w) => w,
                    None => return Ok(Outcome::Fail("no uncontaminated degrees\n".into())),
                },
            };
            let les = match extract_les(&fc, offset, window, None) {
                Ok(les) => les,
                Err(e) => return Ok(Outcome::Fail(format!("extraction failed: {e}\n"))),
            };
            let d_table = match file.mode()? {
                FileMode::Orbits => {
                    let os = file.to_orbit_set()?;
                    connecting_map_table(&os, &fc).map_err(|e| anyhow!(e.to_string()))?
                }
                _ => {
                    notes.push(
                        "no orbit data: multiplicities taken as 1, D equals the page map".into(),
                    );
                    d_table_identity_kappa(&fc, offset)?
                }
            };
            let assembled = gysin_core::scenarios::AssembledLes {
                report: ScenarioReport {
                    name: path.display().to_string(),
                    checks: Vec::new(),
                    pass: true,
                },
                sequence: les,
            };
            sections.push(section_from_sequence(
                path.display().to_string(),
                &assembled,
                d_table,
                file.n,
            ));
        }
    }
    let pass = sections.iter().all(|s| s.exactness.verdict);
    let report = GysinReport { sections, pass, notes };
    let text = gysin_text(&report);
    Ok(Outcome::of(pass, render(&report, text, json)?))
}

pub fn cmd_verify_all(json: bool) -> Result<Outcome> {
    // Scenarios fan out across threads; results merge by name order.
    let mut scenario_results: BTreeMap<String, Result<ScenarioReport>> = BTreeMap::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = registry::SCENARIO_NAMES
            .iter()
            .map(|&name| (name, scope.spawn(move || registry::run_scenario(name))))
            .collect();
        for (name, handle) in handles {
            let result = handle
                .join()
                .unwrap_or_else(|_| Err(anyhow!("scenario {name} panicked")));
            scenario_results.insert(name.to_owned(), result);
        }
    });
    let mut scenarios = Vec::new();
    let mut pass = true;
    for (name, result) in scenario_results {
        match result {
            Ok(report) => {
                pass &= report.pass;
                scenarios.push(report);
            }
            Err(e) => {
                pass = false;
                scenarios.push(ScenarioReport {
                    name: name.clone(),
                    checks: vec![],
                    pass: false,
                });
                eprintln!("scenario {name} failed to run: {e}");
            }
        }
    }

    let mut warnings = Vec::new();
    let mut corpus = Vec::new();
    let dir = std::env::var("GYSIN_CORPUS_DIR").unwrap_or_else(|_| "corpus".into());
    let dir = Path::new(&dir);
    if !dir.is_dir() {
        warnings.push(format!(
            "corpus directory {} not found; ran built-in scenarios only",
            dir.display()
        ));
    } else {
        let mut files: Vec<_> = fs::read_dir(dir)
            .with_context(|| format!("cannot read corpus dir {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            warnings.push(format!("corpus directory {} is empty", dir.display()));
        }
        for file in files {
            let display = file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let row = if display.ends_with(".golden.json") {
                let scenario = display.trim_end_matches(".golden.json").to_owned();
                check_golden(&file, &scenario)
            } else {
                check_corpus_input(&file)
            };
            let row = row.unwrap_or_else(|e| CorpusRow {
                file: display.clone(),
                status: format!("error: {e}"),
                pass: false,
            });
            pass &= row.pass;
            corpus.push(row);
        }
    }

    let report = VerifyAllReport { scenarios, corpus, warnings, pass };
    let text = verify_all_text(&report);
    Ok(Outcome::of(report.pass, render(&report, text, json)?))
}

/// Recomputes the named scenario and byte-compares its JSON report with the
/// golden file.
fn check_golden(path: &Path, scenario: &str) -> Result<CorpusRow> {
    let display = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let golden = fs::read_to_string(path)?;
    let report = registry::run_scenario(scenario)?;
    let fresh = format!("{}\n", serde_json::to_string_pretty(&report)?);
    if fresh == golden {
        Ok(CorpusRow { file: display, status: "golden matches".into(), pass: true })
    } else {
        Ok(CorpusRow {
            file: display,
            status: "golden MISMATCH (recomputed report differs)".into(),
            pass: false,
        })
    }
}

/// Schema-validates a corpus input file and runs the complex validator.
fn check_corpus_input(path: &Path) -> Result<CorpusRow> {
    let display = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    match cmd_validate(path, true)? {
        Outcome::Pass(_) => Ok(CorpusRow { file: display, status: "valid".into(), pass: true }),
        Outcome::Fail(_) => {
            Ok(CorpusRow { file: display, status: "validation failed".into(), pass: false })
        }
    }
}
