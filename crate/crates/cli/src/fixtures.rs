//! Loading lattices, genus fixtures, expansions and divisors from disk.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Signed;
use serde::Deserialize;
use weilbasis::arith::parse_rat;
use weilbasis::fqm::Fqm;
use weilbasis::intmat::IMat;
use weilbasis::lattice::{named, EvenLattice, LatticeJson};
use weilbasis::vvmf::{ExpansionJson, GenusFixture, GenusJson, VVQExpansion};

use crate::CliError;

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_value(path: &Path) -> Result<serde_json::Value, CliError> {
    let s = read_text(path)?;
    serde_json::from_str(&s).map_err(|e| CliError::parse(path, e.to_string()))
}

pub fn read_as<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let s = read_text(path)?;
    serde_json::from_str(&s).map_err(|e| CliError::parse(path, e.to_string()))
}

pub fn parse_precision(s: &str) -> Result<BigRational, CliError> {
    let q = parse_rat(s).map_err(|e| CliError::usage(e.to_string()))?;
    if !q.is_positive() {
        return Err(CliError::usage(format!("precision must be positive, got {s}")));
    }
    Ok(q)
}

/// Built-in root lattices: A<n>, D<n>, D<n>+, E8.
pub fn builtin(name: &str) -> Option<EvenLattice> {
    let upper = name.to_ascii_uppercase();
    if upper == "E8" {
        return Some(named::e8());
    }
    let (head, rest) = upper.split_at(1);
    let plus = rest.ends_with('+');
    let n: usize = rest.trim_end_matches('+').parse().ok()?;
    match (head, plus) {
        ("A", false) if n >= 1 => Some(named::a_n(n)),
        ("D", false) if n >= 2 => Some(named::d_n(n)),
        ("D", true) if n >= 8 && n % 8 == 0 => Some(named::d_n_plus(n)),
        _ => None,
    }
}

/// A lattice argument: an existing file, a built-in name, or `<fixtures>/lattices/<name>.json`.
pub fn load_lattice(arg: &str, fixtures: &Path) -> Result<EvenLattice, CliError> {
    let p = PathBuf::from(arg);
    if p.is_file() {
        let j: LatticeJson = read_as(&p)?;
        return EvenLattice::from_json(&j).map_err(|e| CliError::parse(&p, e.to_string()));
    }
    if let Some(l) = builtin(arg) {
        return Ok(l);
    }
    let p = fixtures.join("lattices").join(format!("{arg}.json"));
    if p.is_file() {
        let j: LatticeJson = read_as(&p)?;
        return EvenLattice::from_json(&j).map_err(|e| CliError::parse(&p, e.to_string()));
    }
    Err(CliError::usage(format!("unknown lattice '{arg}'")))
}

/// A Gram matrix of any signature, with the optional declarations carried by indefinite fixtures.
#[derive(Clone, Debug, Deserialize)]
pub struct IndefiniteLatticeJson {
    pub name: String,
    pub gram: IMat,
    #[serde(default)]
    pub signature: Option<(usize, usize)>,
    #[serde(default)]
    pub splits_two_hyperbolic_planes: Option<bool>,
}

/// A discriminant module from a file holding either an fqm ({"orders",...}) or a lattice ({"gram"}).
pub fn load_module(path: &Path) -> Result<(String, Arc<Fqm>, Option<i64>), CliError> {
    let v = read_value(path)?;
    if v.get("orders").is_some() {
        let j = serde_json::from_value(v).map_err(|e| CliError::parse(path, e.to_string()))?;
        let d = Fqm::from_json(&j).map_err(|e| CliError::parse(path, e.to_string()))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok((name, Arc::new(d), None));
    }
    let j: IndefiniteLatticeJson = serde_json::from_value(v).map_err(|e| CliError::parse(path, e.to_string()))?;
    let (d, _) = Fqm::from_even_lattice(&j.gram).map_err(|e| CliError::parse(path, e.to_string()))?;
    let sig = match j.signature {
        Some((p, n)) => Some(p as i64 - n as i64),
        None => EvenLattice::new(&j.name, j.gram.clone()).ok().map(|l| l.rank() as i64),
    };
    Ok((j.name, Arc::new(d), sig))
}

pub fn load_genus(path: &Path) -> Result<GenusFixture, CliError> {
    let j: GenusJson = read_as(path)?;
    GenusFixture::from_json(&j).map_err(|e| CliError::parse(path, e.to_string()))
}

pub fn load_expansion(path: &Path) -> Result<VVQExpansion, CliError> {
    let j: ExpansionJson = read_as(path)?;
    VVQExpansion::from_json(&j).map_err(|e| CliError::parse(path, e.to_string()))
}

/// Where the shipped fixtures live: `--fixtures`, else the working directory when it has
/// `lattices/`, else the source checkout.
pub fn fixtures_root(arg: Option<&Path>) -> PathBuf {
    if let Some(p) = arg {
        return p.to_path_buf();
    }
    if Path::new("lattices").is_dir() {
        return PathBuf::from(".");
    }
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}
