//! Text formats: group-algebra elements, `Z^r` and Klein elements, tower
//! files and certificates.
//!
//! Tower files are TOML:
//!
//! ```toml
//! base = ["a", "b"]
//!
//! [[level]]
//! u = "a b a^-1 b^-1"
//! t = "t"
//! # a = "a b a^-1 b^-1"   (optional twist element, a power of u)
//!
//! [subgroup]
//! gens = ["a", "b", "t a t^-1", "t b t^-1"]
//! names = ["a1", "b1", "a2", "b2"]   # optional
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::Path;

use num_complex::Complex64;
use residua_core::algebra::{AlgebraElement, AlgebraError, Context};
use residua_core::pipeline::{CsrfCertificate, SLACK_NOTE};
use residua_core::torus::{KleinElement, KleinKey, TorusError, ZrElement};
use residua_core::tower::{LevelSpec, SubgroupDescriptor, TowerDescriptor, TowerError};
use residua_core::words::{Basis, WordError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("tower file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("unknown preset {0:?} (known: genus2, z2)")]
    Preset(String),
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), FormatError> {
    std::fs::write(path, contents).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Several elements in one file, separated by lines consisting of `---`.
pub fn parse_elements(context: &Context, text: &str) -> Result<Vec<AlgebraElement>, FormatError> {
    let mut out = Vec::new();
    let mut chunk = String::new();
    let mut first_line = 1;
    let mut flush = |chunk: &mut String, first_line: usize| -> Result<(), FormatError> {
        if chunk.lines().any(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        }) {
            let e = AlgebraElement::parse_text(context.clone(), chunk).map_err(|e| match e {
                AlgebraError::Parse { line, message } => FormatError::Syntax {
                    line: line + first_line - 1,
                    message,
                },
                other => other.into(),
            })?;
            out.push(e);
        }
        chunk.clear();
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            flush(&mut chunk, first_line)?;
            first_line = i + 2;
        } else {
            chunk.push_str(line);
            chunk.push('\n');
        }
    }
    flush(&mut chunk, first_line)?;
    Ok(out)
}

fn coefficient(tokens: &[&str], line: usize) -> Result<Complex64, FormatError> {
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| FormatError::Syntax {
                line,
                message: format!("bad number {s:?}"),
            })
    };
    match tokens {
        [re, im, ..] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(FormatError::Syntax {
            line,
            message: "expected RE IM followed by a key".into(),
        }),
    }
}

fn int_keys(tokens: &[&str], line: usize) -> Result<Vec<i64>, FormatError> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<i64>().map_err(|_| FormatError::Syntax {
                line,
                message: format!("bad integer {t:?}"),
            })
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

/// `RE IM k_1 … k_r` per line; the rank is fixed by the first term.
pub fn parse_zr(text: &str) -> Result<ZrElement, FormatError> {
    let mut terms = Vec::new();
    let mut rank = None;
    for (line, tokens) in content_lines(text) {
        let c = coefficient(&tokens, line)?;
        let v = int_keys(&tokens[2..], line)?;
        match rank {
            None if v.is_empty() => {
                return Err(FormatError::Syntax {
                    line,
                    message: "a Z^r key needs at least one coordinate".into(),
                })
            }
            None => rank = Some(v.len()),
            Some(r) if r != v.len() => {
                return Err(FormatError::Syntax {
                    line,
                    message: format!("expected {r} coordinates, found {}", v.len()),
                })
            }
            _ => {}
        }
        terms.push((v, c));
    }
    let rank = rank.ok_or(FormatError::Syntax {
        line: 0,
        message: "no terms".into(),
    })?;
    Ok(ZrElement::from_terms(rank, terms)?)
}

/// `RE IM p q` per line, the key standing for `a^p t^q`.
pub fn parse_klein(text: &str) -> Result<KleinElement, FormatError> {
    let mut terms: Vec<(KleinKey, Complex64)> = Vec::new();
    for (line, tokens) in content_lines(text) {
        let c = coefficient(&tokens, line)?;
        match int_keys(&tokens[2..], line)?.as_slice() {
            [p, q] => terms.push(((*p, *q), c)),
            _ => {
                return Err(FormatError::Syntax {
                    line,
                    message: "expected a (p, q) key".into(),
                })
            }
        }
    }
    Ok(KleinElement::from_terms(terms))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub base: Vec<String>,
    #[serde(default)]
    pub level: Vec<LevelEntry>,
    pub subgroup: Option<SubgroupEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelEntry {
    pub u: String,
    pub t: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupEntry {
    pub gens: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// Parses a tower file. Without a `[subgroup]` block the subgroup is the
/// whole group, generated by the base generators and stable letters.
pub fn parse_tower(text: &str) -> Result<(TowerDescriptor, SubgroupDescriptor), FormatError> {
    let file: TowerFile = toml::from_str(text)?;
    let base = Basis::new(file.base.iter().map(String::as_str))?;
    let levels: Vec<LevelSpec> = file
        .level
        .iter()
        .map(|l| LevelSpec {
            u: l.u.clone(),
            t: l.t.clone(),
            a: l.a.clone(),
        })
        .collect();
    let tower = TowerDescriptor::new(base, &levels)?;
    let (gens, names) = match file.subgroup {
        Some(s) => (s.gens, s.names),
        None => {
            let all: Vec<String> = tower.full_basis().names().to_vec();
            (all.clone(), Some(all))
        }
    };
    let y = SubgroupDescriptor::new(&tower, &gens, names.as_deref())?;
    Ok((tower, y))
}

/// Reads a tower from `path`, or a preset when `path` is `preset:NAME`.
pub fn load_tower(source: &str) -> Result<(TowerDescriptor, SubgroupDescriptor), FormatError> {
    if let Some(name) = source.strip_prefix("preset:") {
        return residua_core::tower::preset(name).ok_or_else(|| FormatError::Preset(name.to_string()));
    }
    parse_tower(&read_file(Path::new(source))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateFile {
    pub note: String,
    pub radius: usize,
    pub epsilon: f64,
    pub m: u64,
    pub degree: u32,
    pub c_meas: f64,
    pub m_choice_lhs_ln: f64,
    pub m_choice_rhs_ln: f64,
    pub m_minus_one_fails: bool,
    pub stretch: Vec<StretchEntry>,
    pub phi: PhiEntry,
    pub row: Vec<RowEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchEntry {
    pub radius: usize,
    pub stretch: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiEntry {
    pub certified_radius: usize,
    pub injectivity_verified_radius: usize,
    pub level_exponents: Vec<u64>,
    pub max_image_len: usize,
    pub image_lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowEntry {
    pub l1: f64,
    pub l2: f64,
    pub proxy: f64,
    pub proxy_level: u32,
    pub proxy_schedule: Vec<f64>,
    pub l2_power_lower: f64,
    pub l2_power_upper: f64,
    pub image_radius: usize,
    pub image_l1: f64,
    pub haagerup_factor: f64,
    pub chain_factor: f64,
    pub norm_upper_free: f64,
    pub chain_slack: f64,
    pub final_slack: f64,
    pub transfer_checked: u32,
}

impl From<&CsrfCertificate> for CertificateFile {
    fn from(c: &CsrfCertificate) -> Self {
        CertificateFile {
            note: SLACK_NOTE.to_string(),
            radius: c.radius,
            epsilon: c.epsilon,
            m: c.m,
            degree: c.degree,
            c_meas: c.c_meas,
            m_choice_lhs_ln: c.m_choice.0,
            m_choice_rhs_ln: c.m_choice.1,
            m_minus_one_fails: c.m_minus_one_fails,
            stretch: c
                .stretch_measurements
                .iter()
                .map(|&(radius, stretch)| StretchEntry { radius, stretch })
                .collect(),
            phi: PhiEntry {
                certified_radius: c.certified_radius,
                injectivity_verified_radius: c.injectivity_verified_radius,
                level_exponents: c.phi_exponents.clone(),
                max_image_len: c.phi_max_image_len,
                image_lengths: c.phi.images().iter().map(|w| w.len()).collect(),
            },
            row: c
                .rows
                .iter()
                .map(|r| RowEntry {
                    l1: r.l1,
                    l2: r.l2,
                    proxy: r.proxy,
                    proxy_level: r.proxy_level,
                    proxy_schedule: r.proxy_schedule.clone(),
                    l2_power_lower: r.l2_power_lower,
                    l2_power_upper: r.l2_power_upper,
                    image_radius: r.image_radius,
                    image_l1: r.image_l1,
                    haagerup_factor: r.haagerup_factor,
                    chain_factor: r.chain_factor,
                    norm_upper_free: r.norm_upper_free,
                    chain_slack: r.chain_slack,
                    final_slack: r.final_slack,
                    transfer_checked: r.transfer_checked,
                })
                .collect(),
        }
    }
}

pub fn certificate_toml(c: &CsrfCertificate) -> String {
    toml::to_string(&CertificateFile::from(c)).expect("certificate fields serialize")
}
