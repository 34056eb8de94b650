mod fixtures;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde_json::{json, Value};
use weilbasis::arith::{fmt_rat, rat_int};
use weilbasis::fqm::Fqm;
use weilbasis::hecke::{hecke_t, hecke_t_tilde};
use weilbasis::io::CycJson;
use weilbasis::lattice::{EvenLattice, LatticeJson};
use weilbasis::obstruction::{check_theorem_hypotheses, obstruction_check_span, DivisorJson, HeegnerDivisor, Verdict};
use weilbasis::poly::{HarmonicJson, HarmonicPolynomial};
use weilbasis::vvmf::{theta_series, theta_span, SpanMethod, VVQExpansion};
use weilbasis::CycScalar;

#[derive(Parser, Debug)]
#[command(name = "weilbasis", version, about = "Discriminant forms, Weil representations and theta spans")]
struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized checks; echoed in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory holding lattices/, genus/, divisors/ and forms/.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Invariants of a discriminant form given as a lattice or fqm file.
    FqmAnalyze { input: PathBuf },
    /// Vector-valued theta series of a positive-definite even lattice.
    Theta {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        precision: String,
        /// Harmonic polynomial file; defaults to P = 1.
        #[arg(long)]
        poly: Option<PathBuf>,
    },
    /// Apply T(l^2) (or the renormalized variant) to an expansion file.
    HeckeApply {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        l: i64,
        #[arg(long)]
        tilde: bool,
    },
    /// Rank of the theta span of a genus fixture and membership of reference cusp forms.
    BasisCheck {
        #[arg(long)]
        genus: PathBuf,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        precision: String,
        #[arg(long, num_args = 1..)]
        reference: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Kernel)]
        method: Method,
    },
    /// Obstruction check for a Heegner divisor on a lattice of signature (l, 2).
    BorcherdsCheck {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        genus: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        precision: Option<String>,
    },
    /// Run the invariant suites on the shipped fixtures.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Kernel,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Fqm,
    Weil,
    Theta,
    Hecke,
    Analytic,
    Obstruction,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: msg.into() }
    }

    pub fn parse(path: &Path, msg: impl Into<String>) -> Self {
        CliError { code: 2, msg: format!("{}: {}", path.display(), msg.into()) }
    }
}

impl From<weilbasis::Error> for CliError {
    fn from(e: weilbasis::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// A finished report and the exit code it implies.
struct Outcome {
    report: Value,
    code: u8,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fx = fixtures::fixtures_root(cli.fixtures.as_deref());
    let result = run(&cli, &fx);
    let (mut report, code) = match result {
        Ok(o) => (o.report, o.code),
        Err(e) => (json!({"error": e.msg}), e.code),
    };
    if let Value::Object(m) = &mut report {
        m.insert("seed".into(), json!(cli.seed));
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if code == 2 {
        if let Some(msg) = report.get("error").and_then(|v| v.as_str()) {
            eprintln!("error: {msg}");
        }
    }
    ExitCode::from(code)
}

fn run(cli: &Cli, fx: &Path) -> Result<Outcome, CliError> {
    match &cli.cmd {
        Cmd::FqmAnalyze { input } => fqm_analyze(input),
        Cmd::Theta { lattice, precision, poly } => theta(lattice, precision, poly.as_deref(), fx),
        Cmd::HeckeApply { input, l, tilde } => hecke_apply(input, *l, *tilde),
        Cmd::BasisCheck { genus, weight, precision, reference, method } => {
            basis_check(genus, weight, precision, reference, *method)
        }
        Cmd::BorcherdsCheck { lattice, genus, divisor, precision } => {
            borcherds_check(lattice, genus, divisor, precision.as_deref())
        }
        Cmd::Verify { suite } => {
            let report = verify::run(*suite, cli.seed, fx)?;
            let pass = report.get("pass").and_then(|v| v.as_bool()).unwrap_or(false);
            Ok(Outcome { report, code: if pass { 0 } else { 1 } })
        }
    }
}

pub fn cyc_json(c: &CycScalar) -> Value {
    serde_json::to_value(CycJson::from_scalar(c)).expect("cyclotomic scalar serializes")
}

fn fqm_report(d: &Fqm) -> Value {
    let p_ranks: serde_json::Map<String, Value> = weilbasis::arith::factorize(d.size() as u64)
        .into_iter()
        .map(|(p, _)| (p.to_string(), json!(d.p_rank(p as i64))))
        .collect();
    json!({
        "fqm": d.to_json(),
        "orders": d.orders(),
        "size": d.size(),
        "level": d.level(),
        "signature": d.signature().ok(),
        "oddity": d.oddity().ok(),
        "p_ranks": p_ranks,
        "nondegenerate": d.is_nondegenerate(),
    })
}

fn fqm_analyze(input: &Path) -> Result<Outcome, CliError> {
    let v = fixtures::read_value(input)?;
    let d = if v.get("gram").is_none() && v.get("generators").is_some() {
        let j: LatticeJson = serde_json::from_value(v).map_err(|e| CliError::parse(input, e.to_string()))?;
        EvenLattice::from_json(&j).map_err(|e| CliError::parse(input, e.to_string()))?.discriminant().clone()
    } else {
        fixtures::load_module(input)?.1
    };
    Ok(Outcome::ok(fqm_report(&d)))
}

fn theta(lattice: &str, precision: &str, poly: Option<&Path>, fx: &Path) -> Result<Outcome, CliError> {
    let l = fixtures::load_lattice(lattice, fx)?;
    let q = fixtures::parse_precision(precision)?;
    let p = match poly {
        None => HarmonicPolynomial::one(l.rank()),
        Some(path) => {
            let j: HarmonicJson = fixtures::read_as(path)?;
            let metric = l.poly_metric();
            HarmonicPolynomial::from_json(&j, metric.as_deref()).map_err(|e| CliError::parse(path, e.to_string()))?
        }
    };
    let t = theta_series(&l, None, &p, &q)?;
    Ok(Outcome::ok(json!({
        "lattice": l.name,
        "degree": p.h,
        "expansion": t.to_json(),
    })))
}

/// lambda with g = lambda f on the common truncation, if any.
fn eigenvalue(f: &VVQExpansion, g: &VVQExpansion) -> Option<CycScalar> {
    let base = f.truncate(&g.prec);
    let (gam, e, c) = base.iter().next()?;
    let lambda = &g.get_e(gam, e) * &c.inverse()?;
    base.scale(&lambda).agrees_with(g).then(|| lambda.shrink())
}

fn hecke_apply(input: &Path, l: i64, tilde: bool) -> Result<Outcome, CliError> {
    if l < 1 {
        return Err(CliError::usage("--l must be positive"));
    }
    let f = fixtures::load_expansion(input)?;
    let g = if tilde { hecke_t_tilde(&f, l)? } else { hecke_t(&f, l)? };
    let eig = eigenvalue(&f, &g).map(|lam| json!({"l": l, "lambda": cyc_json(&lam)}));
    Ok(Outcome::ok(json!({
        "l": l,
        "operator": if tilde { "T~(l^2)" } else { "T(l^2)" },
        "expansion": g.to_json(),
        "eigenvalue": eig,
    })))
}

fn basis_check(genus: &Path, weight: &str, precision: &str, refs: &[PathBuf], method: Method) -> Result<Outcome, CliError> {
    let fixture = fixtures::load_genus(genus)?;
    let k = weilbasis::arith::parse_rat(weight).map_err(|e| CliError::usage(e.to_string()))?;
    let q = fixtures::parse_precision(precision)?;
    let m = fixture.rank();
    let mut forms = Vec::new();
    for r in refs {
        let f = fixtures::load_expansion(r)?;
        if f.weight != k {
            return Err(CliError::usage(format!("{}: weight {} does not match --weight {}", r.display(), fmt_rat(&f.weight), weight)));
        }
        if *f.module != *fixture.module {
            return Err(CliError::usage(format!("{}: reference lives on a different discriminant form", r.display())));
        }
        if f.iter().any(|(_, e, c)| e == 0 && !c.is_zero()) {
            return Err(CliError::usage(format!("{}: reference has a nonzero q^0 term and is not a cusp form", r.display())));
        }
        if f.prec < q {
            return Err(CliError::usage(format!("{}: reference precision {} is below {}", r.display(), fmt_rat(&f.prec), precision)));
        }
        forms.push((r, f.truncate(&q)));
    }
    let how = match method {
        Method::Kernel => SpanMethod::Kernel,
        Method::Explicit => SpanMethod::Explicit,
    };
    let span = theta_span(&fixture.module, m, &k, &fixture, &q, how)?;
    let members: Vec<Value> = forms
        .iter()
        .map(|(r, f)| json!({"reference": r.display().to_string(), "member": span.contains(f)}))
        .collect();
    Ok(Outcome::ok(json!({
        "m": m,
        "weight": fmt_rat(&k),
        "precision": fmt_rat(&q),
        "genus_classes": fixture.classes.len(),
        "span_rank": span.rank,
        "references": members,
        "warnings": span.warnings,
    })))
}

fn borcherds_check(lattice: &Path, genus: &Path, divisor: &Path, precision: Option<&str>) -> Result<Outcome, CliError> {
    let lj: fixtures::IndefiniteLatticeJson = fixtures::read_as(lattice)?;
    let (dl, _) = Fqm::from_even_lattice(&lj.gram).map_err(|e| CliError::parse(lattice, e.to_string()))?;
    let dl = Arc::new(dl);
    let (pos, neg) = lj.signature.ok_or_else(|| CliError::parse(lattice, "missing \"signature\" [l, 2]"))?;
    if neg != 2 || pos + neg != lj.gram.len() {
        return Err(CliError::parse(lattice, format!("signature ({pos}, {neg}) is not (l, 2) for a rank-{} Gram matrix", lj.gram.len())));
    }
    let fixture = fixtures::load_genus(genus)?;
    let m = fixture.rank();
    if m + 2 != pos {
        return Err(CliError::usage(format!("genus fixture has rank {m}, expected l - 2 = {}", pos as i64 - 2)));
    }
    let sigma = dl
        .isometries(&fixture.module)?
        .into_iter()
        .next()
        .ok_or_else(|| CliError::usage("lattice discriminant form is not isometric to the genus module"))?;
    let dj: DivisorJson = fixtures::read_as(divisor)?;
    let div = HeegnerDivisor::from_json(dl.clone(), &dj).map_err(|e| CliError::parse(divisor, e.to_string()))?;
    let div = div.pushforward(&sigma);
    let q = match precision {
        Some(s) => fixtures::parse_precision(s)?,
        None => {
            let n = div.max_n();
            if n.is_positive() { n } else { rat_int(1) }
        }
    };
    if div.max_n() > q {
        return Err(CliError::usage(format!("divisor reaches n = {}, above the precision {}", fmt_rat(&div.max_n()), fmt_rat(&q))));
    }
    let k = rat_int(m as i64 / 2 + 2);
    let span = theta_span(&fixture.module, m, &k, &fixture, &q, SpanMethod::Kernel)?;
    let hyp = check_theorem_hypotheses(&fixture.module, m);
    let mut rep = obstruction_check_span(&div, &span, hyp, fixture.classes.len())?;
    let declared = lj.splits_two_hyperbolic_planes.unwrap_or(false);
    if pos % 2 == 1 || pos <= 8 {
        rep.notes.push(format!("l = {pos} is outside the range even l > 8"));
        if rep.verdict == Verdict::Unobstructed {
            rep.verdict = Verdict::Inconclusive;
        }
    }
    if !declared && rep.verdict == Verdict::Unobstructed {
        rep.verdict = Verdict::Inconclusive;
        rep.notes.push("splitting of two hyperbolic planes not declared; unobstructed downgraded".into());
    }
    let code = if rep.verdict == Verdict::Obstructed { 1 } else { 0 };
    let verdict = serde_json::to_value(rep.verdict).expect("verdict serializes");
    let certificate = rep.certificate.as_ref().map(|c| {
        json!({
            "basis_index": c.basis_index,
            "pairing": cyc_json(&c.pairing),
            "form": c.form.to_json(),
        })
    });
    Ok(Outcome {
        report: json!({
            "lattice": lj.name,
            "signature": [pos, neg],
            "splits_two_hyperbolic_planes": lj.splits_two_hyperbolic_planes,
            "m": m,
            "weight": fmt_rat(&k),
            "precision": fmt_rat(&q),
            "divisor": div.to_json(),
            "obstruction_rank": rep.obstruction_rank,
            "pairings": rep.pairings.iter().map(cyc_json).collect::<Vec<_>>(),
            "verdict": verdict,
            "certificate": certificate,
            "hypotheses": rep.hypotheses,
            "genus_classes": rep.genus_classes,
            "notes": rep.notes,
        }),
        code,
    })
}
