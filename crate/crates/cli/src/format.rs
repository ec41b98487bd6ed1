//! The on-disk complex format: strict UTF-8 JSON, exact rationals as
//! `"p"`/`"p/q"` strings, unknown fields rejected.
//!
//! A file either lists explicit `generators` (a plain complex) or `orbits`
//! (a Morse-Bott pipeline input); listing both is ambiguous and rejected.
//! In orbit mode, differential entries address the per-orbit generators as
//! `<orbit>.m` / `<orbit>.M`, optionally suffixed `.e[<class>]`.

use gysin_core::complex::{ChainComplex, Generator, HomologyClass};
use gysin_core::filtration::FilteredComplex;
use gysin_core::orbits::{
    build_morse_bott_complex, MbEntry, MorseBottSide, OrbitSet, ReebOrbit, S1Crit,
};
use gysin_core::rational::Rational;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("file does not parse: {0}")]
    Parse(String),
    #[error("file declares both generators and orbits; pick one mode")]
    AmbiguousMode,
    #[error("orbit name {0:?} must not contain '.'")]
    DottedOrbitName(String),
    #[error("differential endpoint {0:?} is not of the form <orbit>.m or <orbit>.M")]
    BadEndpoint(String),
    #[error("unknown Novikov class {0:?}")]
    UnknownClass(String),
    #[error("{0}")]
    Data(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub n: i64,
    #[serde(default)]
    pub classes: Vec<ClassRecord>,
    #[serde(default)]
    pub orbits: Vec<OrbitRecord>,
    #[serde(default)]
    pub generators: Vec<GeneratorRecord>,
    #[serde(default)]
    pub differential: Vec<EntryRecord>,
    #[serde(default)]
    pub truncation: Option<TruncationRecord>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRecord {
    pub label: String,
    pub c1_pairing: i64,
    pub omega_energy: Rational,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitRecord {
    pub name: String,
    pub action: Rational,
    pub mu: i64,
    #[serde(default = "default_kappa")]
    pub kappa: i64,
    #[serde(default = "default_class")]
    pub class: String,
    #[serde(default)]
    pub simple: Option<String>,
    #[serde(default)]
    pub iterate: Option<i64>,
    #[serde(default)]
    pub parity_evidence: Option<(i64, i64)>,
    #[serde(default)]
    pub neg_eigencount: Option<i64>,
    #[serde(default)]
    pub augmentation: Option<Rational>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub name: String,
    pub degree: i64,
    #[serde(default)]
    pub filtration: Option<i64>,
    #[serde(default = "default_class")]
    pub class: String,
    #[serde(default)]
    pub novikov: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub from: String,
    pub to: String,
    pub coeff: Rational,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationRecord {
    #[serde(default)]
    pub b_max: Option<i64>,
    #[serde(default)]
    pub alpha: Option<Rational>,
    #[serde(default)]
    pub complete_filtration_max: Option<i64>,
}

fn default_kappa() -> i64 {
    1
}

fn default_class() -> String {
    "0".into()
}

pub enum FileMode {
    Explicit,
    Orbits,
    Empty,
}

impl ComplexFile {
    pub fn from_str(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))
    }

    pub fn mode(&self) -> Result<FileMode, FormatError> {
        match (self.generators.is_empty(), self.orbits.is_empty()) {
            (false, false) => Err(FormatError::AmbiguousMode),
            (false, true) => Ok(FileMode::Explicit),
            (true, false) => Ok(FileMode::Orbits),
            (true, true) => Ok(FileMode::Empty),
        }
    }

    fn declared_classes(&self) -> Vec<HomologyClass> {
        if self.classes.is_empty() {
            return vec![HomologyClass::zero()];
        }
        self.classes
            .iter()
            .map(|c| HomologyClass {
                label: c.label.clone(),
                c1_pairing: c.c1_pairing,
                omega_energy: c.omega_energy.clone(),
            })
            .collect()
    }

    fn resolve_novikov(&self, label: &str) -> Result<HomologyClass, FormatError> {
        self.declared_classes()
            .into_iter()
            .find(|c| c.label == label)
            .ok_or_else(|| FormatError::UnknownClass(label.to_owned()))
    }

    /// Explicit-mode complex (also handles the empty file).
    pub fn to_plain_complex(&self) -> Result<ChainComplex, FormatError> {
        let mut builder = ChainComplex::builder();
        for g in &self.generators {
            let novikov = match &g.novikov {
                Some(label) => self.resolve_novikov(label)?,
                None => HomologyClass::zero(),
            };
            builder.add_generator(
                Generator::new(g.name.clone(), g.degree)
                    .with_filtration(g.filtration.unwrap_or(g.degree))
                    .with_class_label(g.class.clone())
                    .with_novikov(novikov),
            );
        }
        for e in &self.differential {
            builder.add_entry(e.from.clone(), e.to.clone(), e.coeff.clone());
        }
        builder.build().map_err(|e| FormatError::Data(e.to_string()))
    }

    pub fn to_orbit_set(&self) -> Result<OrbitSet, FormatError> {
        let orbits: Vec<ReebOrbit> = self
            .orbits
            .iter()
            .map(|o| {
                if o.name.contains('.') {
                    return Err(FormatError::DottedOrbitName(o.name.clone()));
                }
                let mut orbit = ReebOrbit::new(o.name.clone(), o.action.clone(), o.mu)
                    .with_multiplicity(o.kappa)
                    .with_class_label(o.class.clone());
                if let (Some(simple), Some(iterate)) = (&o.simple, o.iterate) {
                    orbit = orbit.iterate_of(simple.clone(), iterate);
                }
                if let Some((a, b)) = o.parity_evidence {
                    orbit = orbit.with_parity_evidence(a, b);
                }
                if let Some(c) = o.neg_eigencount {
                    orbit = orbit.with_neg_eigencount(c);
                }
                if let Some(a) = &o.augmentation {
                    orbit = orbit.with_augmentation(a.clone());
                }
                Ok(orbit)
            })
            .collect::<Result<_, _>>()?;
        let alpha = match self.truncation.as_ref().and_then(|t| t.alpha.clone()) {
            Some(alpha) => alpha,
            None => {
                let max = orbits
                    .iter()
                    .map(|o| o.action.clone())
                    .max()
                    .unwrap_or_else(Rational::zero);
                max + Rational::new(1, 2)
            }
        };
        OrbitSet::new(self.n, alpha, orbits)
            .and_then(|os| os.with_classes(self.declared_classes()))
            .map_err(|e| FormatError::Data(e.to_string()))
    }

    /// Orbit-mode differential entries, parsed from generator names.
    pub fn to_mb_entries(&self) -> Result<Vec<MbEntry>, FormatError> {
        self.differential
            .iter()
            .map(|e| {
                let (from_orbit, from_point, from_class) = parse_endpoint(&e.from)?;
                let (to_orbit, to_point, to_class) = parse_endpoint(&e.to)?;
                Ok(MbEntry {
                    from_orbit,
                    from_point,
                    from_class,
                    to_orbit,
                    to_point,
                    to_class,
                    coeff: e.coeff.clone(),
                })
            })
            .collect()
    }

    /// The filtered Morse-Bott complex in orbit mode, or the explicit
    /// complex wrapped with its declared truncation in explicit mode.
    pub fn to_filtered_complex(&self) -> Result<FilteredComplex, CliBuildError> {
        match self.mode()? {
            FileMode::Orbits => {
                let os = self.to_orbit_set()?;
                let entries = self.to_mb_entries()?;
                let fc = build_morse_bott_complex(&os, MorseBottSide::Symplectic, &entries)
                    .map_err(CliBuildError::Orbit)?;
                Ok(self.apply_truncation(fc))
            }
            FileMode::Explicit | FileMode::Empty => {
                let complex = self.to_plain_complex()?;
                let fc = FilteredComplex::new(complex, 2).map_err(CliBuildError::Filtration)?;
                Ok(self.apply_truncation(fc))
            }
        }
    }

    fn apply_truncation(&self, fc: FilteredComplex) -> FilteredComplex {
        let Some(t) = &self.truncation else {
            return fc;
        };
        if let Some(level) = t.complete_filtration_max {
            fc.with_complete_filtration_max(level)
        } else if let Some(b_max) = t.b_max {
            fc.with_complete_filtration_max(2 * b_max)
        } else {
            fc
        }
    }
}

/// Errors from turning a parsed file into engine objects. `Orbit` carries
/// validation failures that the commands report with exit code 1; the rest
/// are input errors.
#[derive(Debug, thiserror::Error)]
pub enum CliBuildError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Orbit(gysin_core::orbits::OrbitError),
    #[error(transparent)]
    Filtration(gysin_core::filtration::FiltrationError),
}

fn parse_endpoint(name: &str) -> Result<(String, S1Crit, String), FormatError> {
    let bad = || FormatError::BadEndpoint(name.to_owned());
    let (stem, class) = match name.strip_suffix(']') {
        Some(prefix) => {
            let (stem, label) = prefix.rsplit_once(".e[").ok_or_else(bad)?;
            (stem, label.to_owned())
        }
        None => (name, "0".to_owned()),
    };
    let (orbit, point) = stem.rsplit_once('.').ok_or_else(bad)?;
    let point = match point {
        "m" => S1Crit::Min,
        "M" => S1Crit::Max,
        _ => return Err(bad()),
    };
    if orbit.is_empty() || orbit.contains('.') {
        return Err(bad());
    }
    Ok((orbit.to_owned(), point, class))
}
