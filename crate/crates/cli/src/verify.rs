//! Invariant suites behind `weilbasis verify`.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use weilbasis::analytic::{diagonal_factorization_check, lipschitz_check, modularity_residual, omega_l_eval, omega_norm, ComplexPoint};
use weilbasis::arith::{ext_gcd, gcd, rat_int};
use weilbasis::cyclotomic::CycInt;
use weilbasis::fqm::{sqrt_int, Fqm};
use weilbasis::hecke::hecke_t;
use weilbasis::intmat::{m2_mul, M2};
use weilbasis::lattice::{named, EvenLattice};
use weilbasis::obstruction::{check_theorem_hypotheses, obstruction_check_span, HeegnerDivisor, Status, Verdict};
use weilbasis::poly::HarmonicPolynomial;
use weilbasis::vvmf::{lattice_theta, theta_series, theta_span, Enumerator, SpanMethod, VVQExpansion};
use weilbasis::weilrep::{rho1, WeilCtx};
use weilbasis::CycScalar;

use crate::fixtures;
use crate::{CliError, Suite};

const S: M2 = [[0, -1], [1, 0]];

struct Check {
    check: String,
    params: Value,
    residual: f64,
    bound: f64,
}

impl Check {
    fn exact(check: impl Into<String>, params: Value, ok: bool) -> Self {
        Check { check: check.into(), params, residual: if ok { 0.0 } else { 1.0 }, bound: 0.0 }
    }

    fn float(check: impl Into<String>, params: Value, residual: f64, bound: f64) -> Self {
        Check { check: check.into(), params, residual, bound }
    }

    fn pass(&self) -> bool {
        if self.bound == 0.0 {
            self.residual == 0.0
        } else {
            self.residual < self.bound
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "params": self.params,
            "residual": self.residual,
            "bound": self.bound,
            "pass": self.pass(),
        })
    }
}

type Lib<T> = weilbasis::Result<T>;

fn one_theta(l: &EvenLattice, prec: i64) -> Lib<VVQExpansion> {
    theta_series(l, None, &HarmonicPolynomial::one(l.rank()), &rat_int(prec))
}

fn sum(a: &EvenLattice, b: &EvenLattice) -> Lib<EvenLattice> {
    a.direct_sum(b)
}

/// Random element of SL2(Z) with entries bounded by `bound`.
fn random_sl2(rng: &mut ChaCha8Rng, bound: i64) -> M2 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        let d = rng.gen_range(-bound..=bound);
        if gcd(c, d) != 1 {
            continue;
        }
        let (_, x, y) = ext_gcd(d, c);
        let (mut a, mut b) = (x, -y);
        let t = if c != 0 { -(a as f64 / c as f64).round() as i64 } else { -(b as f64 / d as f64).round() as i64 };
        a += t * c;
        b += t * d;
        if [a, b, c, d].iter().all(|x| x.abs() <= bound) {
            return [[a, b], [c, d]];
        }
    }
}

/// Modules with known signature: positive-definite lattices (rank mod 8) and hyperbolic planes (0).
fn module_corpus(fx: &Path) -> Lib<Vec<(String, Arc<Fqm>, i64)>> {
    let mut out = Vec::new();
    let mut lats = vec![
        named::a1(),
        named::a2(),
        named::a_n(3),
        named::a_n(4),
        named::d_n(4),
        named::d_n(5),
        named::e8(),
        named::diagonal(&[2, 4]),
        named::diagonal(&[6]),
        named::diagonal(&[2, 2, 2]),
        sum(&named::a1(), &named::a2())?,
        sum(&named::a2(), &named::a2())?,
        sum(&named::a2(), &named::e8())?,
        sum(&named::a1(), &named::d_n(4))?,
    ];
    for name in ["A1", "A2", "D4", "E8", "A2E8"] {
        if let Ok(l) = fixtures::load_lattice(name, fx) {
            lats.push(l);
        }
    }
    for l in lats {
        let sign = l.rank() as i64 % 8;
        out.push((l.name.clone(), l.discriminant().clone(), sign));
    }
    for n in 1..=6 {
        out.push((format!("hyperbolic({n})"), Arc::new(Fqm::hyperbolic(n)), 0));
    }
    let a2 = named::a2().discriminant().clone();
    out.push(("A2+hyperbolic(3)".into(), Arc::new(Fqm::direct_sum(&a2, &Fqm::hyperbolic(3)).module), 2));
    Ok(out)
}

fn fqm_suite(rng: &mut ChaCha8Rng, fx: &Path) -> Lib<Vec<Check>> {
    let mut out = Vec::new();
    let corpus = module_corpus(fx)?;
    for (name, d, sign) in &corpus {
        let lhs = d.gauss_sum();
        let rhs = &CycInt::root(8, *sign) * &sqrt_int(d.size() as u64);
        out.push(Check::exact("fqm.milgram", json!({"module": name, "signature": sign}), lhs == rhs));
    }
    let mut bad = 0usize;
    let mut trials = 0usize;
    for (_, d, _) in &corpus {
        if d.size() == 1 {
            continue;
        }
        for _ in 0..20 {
            let x = rng.gen_range(0..d.size());
            let y = rng.gen_range(0..d.size());
            let n = rng.gen_range(-5i64..=5);
            let polar = d.q(d.add(x, y)) - d.q(x) - d.q(y) - d.bil(x, y);
            let scaled = d.q(d.scale(x, n)) - d.q(x) * rat_int(n * n);
            trials += 1;
            if !polar.is_integer() || !scaled.is_integer() {
                bad += 1;
            }
        }
    }
    out.push(Check::float("fqm.quadratic_form_axioms", json!({"trials": trials}), bad as f64, 0.5));
    Ok(out)
}

fn weil_suite(rng: &mut ChaCha8Rng, fx: &Path) -> Lib<Vec<Check>> {
    let mods: Vec<_> = module_corpus(fx)?
        .into_iter()
        .filter(|(_, d, s)| d.size() <= 36 && s % 2 == 0)
        .collect();
    let mut out = Vec::new();
    let pairs = 100usize;
    let mut hom_fail = 0usize;
    let mut unit_fail = 0usize;
    for i in 0..pairs {
        let (_, d, _) = &mods[i % mods.len()];
        let ctx = WeilCtx::new(d.clone())?;
        let m1 = random_sl2(rng, 50);
        let m2 = random_sl2(rng, 50);
        let r1 = rho1(&ctx, &m1)?;
        let r2 = rho1(&ctx, &m2)?;
        let r12 = rho1(&ctx, &m2_mul(&m1, &m2))?;
        if r12 != r1.compose(&r2) {
            hom_fail += 1;
        }
        if !r1.is_unitary() {
            unit_fail += 1;
        }
    }
    let params = json!({"pairs": pairs, "modules": mods.iter().map(|m| m.0.clone()).collect::<Vec<_>>(), "entry_bound": 50});
    out.push(Check::exact("weil.homomorphism", params.clone(), hom_fail == 0));
    out.push(Check::exact("weil.unitarity", params, unit_fail == 0));
    Ok(out)
}

fn theta_suite(fx: &Path) -> Lib<Vec<Check>> {
    let mut out = Vec::new();
    let e8 = fixtures::load_lattice("E8", fx).unwrap_or_else(|_| named::e8());
    let one = HarmonicPolynomial::one(8);
    let q3 = rat_int(3);
    let fp = lattice_theta(&e8, &one, &q3, Enumerator::FinckePohst)?;
    let bx = lattice_theta(&e8, &one, &q3, Enumerator::Box)?;
    let want = [1i64, 240, 2160, 6720];
    let ok = (0..4).all(|n| fp.get(0, &rat_int(n)) == CycScalar::rational(1, rat_int(want[n as usize])));
    out.push(Check::exact("theta.e8_coefficients", json!({"precision": 3, "expected": want}), ok && fp == bx));

    let basis = e8.harmonic_basis(2);
    let mut nonzero = 0usize;
    for p in &basis {
        if !theta_series(&e8, None, p, &q3)?.is_zero() {
            nonzero += 1;
        }
    }
    out.push(Check::exact("theta.e8_degree2_vanish", json!({"precision": 3, "polynomials": basis.len()}), nonzero == 0));

    let ee = sum(&e8, &e8)?;
    let d16 = named::d_n_plus(16);
    let a = one_theta(&ee, 4)?;
    let b = one_theta(&d16, 4)?;
    out.push(Check::exact("theta.e8e8_equals_d16plus", json!({"precision": 4}), a == b));
    Ok(out)
}

/// Mass of the rank-16 unimodular fixture against the Siegel value.
fn genus_mass(fx: &Path) -> Result<Check, CliError> {
    let g = fixtures::load_genus(&fx.join("genus").join("II16.json"))?;
    let want = BigRational::new(691.into(), "277667181515243520000".parse::<num_bigint::BigInt>().expect("literal"));
    Ok(Check::exact("theta.ii16_mass", json!({"classes": g.classes.len(), "mass": "691/277667181515243520000"}), g.mass() == want))
}

fn delta_fixture(fx: &Path) -> Result<VVQExpansion, CliError> {
    fixtures::load_expansion(&fx.join("forms").join("delta.json"))
}

fn hecke_suite(fx: &Path) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let delta = delta_fixture(fx)?.truncate(&rat_int(144));
    let t4 = hecke_t(&delta, 2)?;
    let want = delta.truncate(&t4.prec).scale(&CycScalar::rational(1, rat_int(-2496)));
    out.push(Check::exact("hecke.t4_delta", json!({"precision": 144, "lambda": -2496}), t4 == want && !t4.is_zero()));
    let lhs = hecke_t(&hecke_t(&delta, 3)?, 2)?;
    let rhs = hecke_t(&delta, 6)?;
    let ok = lhs.truncate(&rhs.prec) == rhs.truncate(&lhs.prec) && !rhs.is_zero();
    out.push(Check::exact("hecke.multiplicativity_delta", json!({"l": 2, "m": 3, "precision": 144}), ok));

    let a2 = named::a2();
    let p3 = a2.harmonic_basis(3).into_iter().next().expect("degree-3 harmonics exist");
    let f = theta_series(&a2, None, &p3, &rat_int(72))?;
    let lhs = hecke_t(&hecke_t(&f, 3)?, 2)?;
    let rhs = hecke_t(&f, 6)?;
    let ok = lhs.truncate(&rhs.prec) == rhs.truncate(&lhs.prec);
    out.push(Check::exact("hecke.multiplicativity_a2", json!({"l": 2, "m": 3, "precision": 72, "degree": 3}), ok));
    Ok(out)
}

fn analytic_suite() -> Lib<Vec<Check>> {
    let mut out = Vec::new();
    let e8 = one_theta(&named::e8(), 8)?;
    let r = modularity_residual(&e8, &S, ComplexPoint::new(0.3, 0.8)?, 1e-10)?;
    out.push(Check::float("analytic.modularity_e8", json!({"matrix": S, "tau": [0.3, 0.8], "precision": 8}), r, 1e-8));
    let a2e8 = sum(&named::a2(), &named::e8())?;
    let f = one_theta(&a2e8, 10)?;
    let r = modularity_residual(&f, &S, ComplexPoint::new(0.0, 1.0)?, 1e-10)?;
    out.push(Check::float("analytic.modularity_a2e8", json!({"matrix": S, "tau": [0.0, 1.0], "precision": 10}), r, 1e-8));
    let l = lipschitz_check(4, 1.0 / 3.0, Complex64::new(0.0, 1.0), 4000)?;
    out.push(Check::float("analytic.lipschitz", json!({"k": 4, "x": "1/3", "z": [0.0, 1.0], "terms": 4000}), l.diff, 1e-10));
    let r = diagonal_factorization_check(&named::a2(), ComplexPoint::new(0.0, 2.0)?, ComplexPoint::new(0.0, 1.0)?, 10, 1e-10)?;
    out.push(Check::float("analytic.diagonal_factorization_a2", json!({"z": [0.0, 2.0], "z'": [0.0, 1.0], "precision": 10}), r, 1e-8));
    let z = Complex64::new(0.0, 2.0);
    let d = Arc::new(Fqm::trivial());
    let w20 = omega_l_eval(&d, 4, 1, z, z, 20)?;
    let w40 = omega_l_eval(&d, 4, 1, z, z, 40)?;
    let (n20, n40) = (omega_norm(&w20), omega_norm(&w40));
    let decreasing = if n40 < n20 { 0.0 } else { 1.0 };
    out.push(Check::float("analytic.omega1_decreases", json!({"k": 4, "z": [0.0, 2.0], "entry_bounds": [20, 40], "norms": [n20, n40]}), decreasing, 0.5));
    out.push(Check::float("analytic.omega1_small", json!({"k": 4, "z": [0.0, 2.0], "entry_bound": 40}), n40, 1e-2));
    Ok(out)
}

fn obstruction_suite(rng: &mut ChaCha8Rng, fx: &Path) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let r = check_theorem_hypotheses(&Fqm::trivial(), 8);
    out.push(Check::exact("obstruction.hypotheses_trivial", json!({"m": 8}), r.overall == Status::Pass));

    let e8 = fixtures::load_genus(&fx.join("genus").join("E8.json"))?;
    let q = rat_int(3);
    let span = theta_span(&e8.module, 8, &rat_int(6), &e8, &q, SpanMethod::Kernel)?;
    let mut all_unobstructed = span.rank == 0;
    let batch = 10;
    for _ in 0..batch {
        let entries: Vec<(usize, BigRational, i64)> =
            (0..4).map(|_| (0usize, rat_int(rng.gen_range(1..=3)), rng.gen_range(-9..=9))).collect();
        let div = HeegnerDivisor::new(e8.module.clone(), &entries)?;
        let rep = obstruction_check_span(&div, &span, check_theorem_hypotheses(&e8.module, 8), 1)?;
        all_unobstructed &= rep.verdict == Verdict::Unobstructed;
    }
    out.push(Check::exact("obstruction.e8_random_batch", json!({"precision": 3, "batch": batch, "span_rank": span.rank}), all_unobstructed));

    let fixture = fixtures::load_genus(&fx.join("genus").join("A2E8.json"))?;
    let q = rat_int(2);
    let span = theta_span(&fixture.module, 10, &rat_int(7), &fixture, &q, SpanMethod::Kernel)?;
    let hyp = check_theorem_hypotheses(&fixture.module, 10);
    let mut ok = span.rank > 0;
    for f in span.basis_expansions() {
        let div = HeegnerDivisor::from_expansion(&f)?;
        let rep = obstruction_check_span(&div, &span, hyp.clone(), fixture.classes.len())?;
        let selfp = div.pair(&f).to_rational().map(|r| r.is_positive()).unwrap_or(false);
        ok &= rep.verdict == Verdict::Obstructed && rep.certificate.is_some() && selfp;
    }
    out.push(Check::exact("obstruction.self_pairing_certificate", json!({"precision": 2, "span_rank": span.rank}), ok));
    let rep = obstruction_check_span(&HeegnerDivisor::zero(fixture.module.clone()), &span, hyp, 1)?;
    out.push(Check::exact("obstruction.zero_divisor", json!({"precision": 2}), rep.verdict == Verdict::Unobstructed));
    Ok(out)
}

/// Runs the selected suites with one generator seeded from `seed`; suites draw from it in a fixed order.
pub fn run(suite: Suite, seed: u64, fx: &Path) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut checks = Vec::new();
    if want(Suite::Fqm) {
        checks.extend(fqm_suite(&mut rng, fx)?);
    }
    if want(Suite::Weil) {
        checks.extend(weil_suite(&mut rng, fx)?);
    }
    if want(Suite::Theta) {
        checks.extend(theta_suite(fx)?);
        checks.push(genus_mass(fx)?);
    }
    if want(Suite::Hecke) {
        checks.extend(hecke_suite(fx)?);
    }
    if want(Suite::Analytic) {
        checks.extend(analytic_suite()?);
    }
    if want(Suite::Obstruction) {
        checks.extend(obstruction_suite(&mut rng, fx)?);
    }
    let pass = checks.iter().all(|c| c.pass());
    let failed = checks.iter().filter(|c| !c.pass()).count();
    Ok(json!({
        "suite": format!("{suite:?}").to_lowercase(),
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "failed": failed,
        "pass": pass,
    }))
}
