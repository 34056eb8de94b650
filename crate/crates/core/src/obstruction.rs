//! Borcherds-product obstructions: pairing Heegner divisors against the degree-2 harmonic theta span.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, fmt_rat, parse_rat, rat_int};
use crate::cyclotomic::CycScalar;
use crate::error::{Error, Result};
use crate::fqm::{Fqm, FqmIsometry};
use crate::vvmf::{theta_span, GenusFixture, SpanMethod, ThetaSpan, VVQExpansion};

/// 1/2 sum c(beta, n) H(beta, n), stored symmetrized under beta -> -beta.
#[derive(Clone, Debug, PartialEq)]
pub struct HeegnerDivisor {
    pub module: Arc<Fqm>,
    pub coeffs: BTreeMap<(usize, BigRational), BigRational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivisorEntryJson {
    pub beta: Vec<i64>,
    pub n: String,
    pub c: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivisorJson {
    pub entries: Vec<DivisorEntryJson>,
}

impl HeegnerDivisor {
    /// Entries (beta, n, c) with n > 0 and n = q(beta) mod 1; symmetrized on construction.
    pub fn new(module: Arc<Fqm>, entries: &[(usize, BigRational, i64)]) -> Result<Self> {
        let mut raw: BTreeMap<(usize, BigRational), BigRational> = BTreeMap::new();
        for (b, n, c) in entries {
            if *b >= module.size() {
                return Err(Error::Invalid(format!("element index {b} out of range")));
            }
            if !n.is_positive() {
                return Err(Error::Invalid(format!("Heegner divisor needs n > 0, got {n}")));
            }
            if !(n - module.q(*b)).is_integer() {
                return Err(Error::Invalid(format!("n = {n} is not in q(beta) + Z for beta = {b}")));
            }
            *raw.entry((*b, n.clone())).or_insert_with(BigRational::zero) += rat_int(*c);
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut coeffs = BTreeMap::new();
        for ((b, n), c) in &raw {
            for g in [*b, module.neg(*b)] {
                *coeffs.entry((g, n.clone())).or_insert_with(BigRational::zero) += c * &half;
            }
        }
        coeffs.retain(|_, c: &mut BigRational| !c.is_zero());
        Ok(HeegnerDivisor { module, coeffs })
    }

    /// The coefficient vector of a rational expansion, cleared of denominators, as a divisor.
    /// The q^0 terms are dropped.
    pub fn from_expansion(f: &VVQExpansion) -> Result<Self> {
        let mut rats = Vec::new();
        let mut den = BigInt::one();
        for (g, e, c) in f.iter() {
            if e == 0 {
                continue;
            }
            let r = c.shrink().to_rational().ok_or_else(|| Error::Invalid("expansion has irrational coefficients".into()))?;
            den = num_integer::Integer::lcm(&den, r.denom());
            rats.push((g, f.exponent(e), r));
        }
        let mut entries = Vec::new();
        for (g, n, r) in rats {
            let c = (r * BigRational::from_integer(den.clone())).to_integer();
            let c = c.to_i64().ok_or_else(|| Error::TooLarge("divisor coefficient exceeds i64".into()))?;
            entries.push((g, n, c));
        }
        Self::new(f.module.clone(), &entries)
    }

    pub fn zero(module: Arc<Fqm>) -> Self {
        HeegnerDivisor { module, coeffs: BTreeMap::new() }
    }

    pub fn max_n(&self) -> BigRational {
        self.coeffs.keys().map(|(_, n)| n.clone()).max().unwrap_or_else(BigRational::zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|((b, n), c)| self.coeffs.get(&(self.module.neg(*b), n.clone())) == Some(c))
    }

    /// Transport along an isometry sigma: D -> D', so that pairings against sigma-pulled forms agree.
    pub fn pushforward(&self, sigma: &FqmIsometry) -> Self {
        let coeffs = self.coeffs.iter().map(|((b, n), c)| ((sigma.apply(*b), n.clone()), c.clone())).collect();
        HeegnerDivisor { module: sigma.codomain.clone(), coeffs }
    }

    pub fn from_json(module: Arc<Fqm>, j: &DivisorJson) -> Result<Self> {
        let mut entries = Vec::new();
        for e in &j.entries {
            if e.beta.len() != module.rank() {
                return Err(Error::Parse(format!("beta {:?} has the wrong length for orders {:?}", e.beta, module.orders())));
            }
            let coords: Vec<i64> = e.beta.iter().zip(module.orders()).map(|(x, o)| x.rem_euclid(*o)).collect();
            entries.push((module.index(&coords), parse_rat(&e.n)?, e.c));
        }
        Self::new(module, &entries)
    }

    /// One entry per pair {beta, -beta}; `from_json` of the result gives back the same divisor.
    pub fn to_json(&self) -> DivisorJson {
        let mut entries = Vec::new();
        for ((b, n), c) in &self.coeffs {
            let nb = self.module.neg(*b);
            if nb < *b {
                continue;
            }
            let c = if nb == *b { c.clone() } else { c * rat_int(2) };
            entries.push(DivisorEntryJson {
                beta: self.module.coords(*b).to_vec(),
                n: fmt_rat(n),
                c: c.to_integer().to_i64().unwrap_or(0),
            });
        }
        DivisorJson { entries }
    }

    /// sum c(beta, n) a(beta, n) against an expansion.
    pub fn pair(&self, f: &VVQExpansion) -> CycScalar {
        let mut acc = CycScalar::zero(1);
        for ((b, n), c) in &self.coeffs {
            let a = f.get(*b, n);
            if !a.is_zero() {
                acc = &acc + &a.scale(c);
            }
        }
        acc.shrink()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub p: i64,
    pub p_rank: usize,
    pub status: Status,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub m: usize,
    pub signature_ok: bool,
    pub primes: Vec<PrimeCheck>,
    pub overall: Status,
}

/// Product of the unit parts u_i over an orthogonal splitting of the odd p-part into cyclic
/// pieces <x_i> with b(x_i, x_i) = u_i / ord(x_i).
pub fn odd_jordan_unit_product(d: &Fqm, p: i64) -> Result<i64> {
    if p == 2 {
        return Err(Error::Invalid("p must be odd".into()));
    }
    let mut current: Vec<usize> = d.elements().filter(|&x| d.p_part(x, p) == x).collect();
    let mut prod = 1i64;
    let den_of = |x: &BigRational| x.denom().to_i64().unwrap();
    while current.len() > 1 {
        let pj = current.iter().map(|&x| d.element_order(x)).max().unwrap();
        let mut pick = current.iter().copied().find(|&x| den_of(&d.bil(x, x)) == pj);
        if pick.is_none() {
            'outer: for &x in &current {
                for &y in &current {
                    if den_of(&d.bil(x, y)) == pj {
                        pick = Some(d.add(x, y));
                        break 'outer;
                    }
                }
            }
        }
        let x = pick.ok_or_else(|| Error::DegenerateForm("p-part has no anisotropic splitting".into()))?;
        let bxx = d.bil(x, x);
        debug_assert_eq!(den_of(&bxx), pj);
        let u = (bxx * rat_int(pj)).to_integer().to_i64().unwrap();
        prod = (prod * u).rem_euclid(p);
        current.retain(|&y| d.bil(x, y).is_integer());
    }
    Ok(prod)
}

/// Local hyperbolic-splitting criterion at every prime dividing |D|, for lattices of rank m.
pub fn check_theorem_hypotheses(d: &Fqm, m: usize) -> HypothesisReport {
    let signature_ok = d.signature().map(|s| (m as i64 - s).rem_euclid(8) == 0).unwrap_or(false) && m % 2 == 0;
    let mut primes = Vec::new();
    let size = d.size() as u64;
    for (p, _) in arith::factorize(size) {
        let p = p as i64;
        let r = d.p_rank(p);
        let bound = m as i64 - 2;
        let (status, reason) = if (r as i64) < bound {
            (Status::Pass, format!("{p}-rank {r} < m-2 = {bound}"))
        } else if r as i64 > bound {
            (Status::Fail, format!("{p}-rank {r} > m-2 = {bound}"))
        } else if p == 2 {
            (Status::Unknown, format!("2-rank {r} = m-2; the 2-adic criterion is not evaluated"))
        } else {
            let mut a = size as i64;
            while a % p == 0 {
                a /= p;
            }
            match odd_jordan_unit_product(d, p) {
                Ok(u) => {
                    let eps = arith::kronecker(u, p);
                    let want = arith::kronecker(-a, p);
                    if eps == want {
                        (Status::Pass, format!("{p}-rank {r} = m-2 and prod eps_q = {eps} = (-{a}|{p})"))
                    } else {
                        (Status::Fail, format!("{p}-rank {r} = m-2 and prod eps_q = {eps} != (-{a}|{p}) = {want}"))
                    }
                }
                Err(e) => (Status::Unknown, e.to_string()),
            }
        };
        primes.push(PrimeCheck { p, p_rank: r, status, reason });
    }
    let overall = if !signature_ok || primes.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else if primes.iter().any(|c| c.status == Status::Unknown) {
        Status::Unknown
    } else {
        Status::Pass
    };
    HypothesisReport { m, signature_ok, primes, overall }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Unobstructed,
    Obstructed,
    Inconclusive,
}

/// A span element with nonzero pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub basis_index: usize,
    pub pairing: CycScalar,
    pub form: VVQExpansion,
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub obstruction_rank: usize,
    pub pairings: Vec<CycScalar>,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub hypotheses: HypothesisReport,
    pub genus_classes: usize,
    pub notes: Vec<String>,
}

/// Pairs the divisor against the degree-2 harmonic theta span of the genus fixture (rank m = l-2,
/// weight k = m/2 + 2).
pub fn obstruction_check(divisor: &HeegnerDivisor, fixture: &GenusFixture, prec: &BigRational) -> Result<ObstructionReport> {
    if divisor.max_n() > *prec {
        return Err(Error::BadPrecision(format!("divisor reaches n = {}, above Q = {prec}", divisor.max_n())));
    }
    if *divisor.module != *fixture.module {
        return Err(Error::ModuleMismatch("divisor and genus fixture live on different modules".into()));
    }
    let m = fixture.rank();
    let k = rat_int(m as i64 / 2 + 2) + if m % 2 == 1 { BigRational::new(1.into(), 2.into()) } else { BigRational::zero() };
    let span = theta_span(&fixture.module, m, &k, fixture, prec, SpanMethod::Kernel)?;
    obstruction_check_span(divisor, &span, check_theorem_hypotheses(&fixture.module, m), fixture.classes.len())
}

/// Same as `obstruction_check` with a precomputed span.
pub fn obstruction_check_span(
    divisor: &HeegnerDivisor,
    span: &ThetaSpan,
    hypotheses: HypothesisReport,
    genus_classes: usize,
) -> Result<ObstructionReport> {
    let basis = span.basis_expansions();
    let pairings: Vec<CycScalar> = basis.iter().map(|f| divisor.pair(f)).collect();
    let certificate = pairings.iter().position(|c| !c.is_zero()).map(|i| Certificate {
        basis_index: i,
        pairing: pairings[i].clone(),
        form: basis[i].clone(),
    });
    let verdict = if certificate.is_some() {
        Verdict::Obstructed
    } else if hypotheses.overall == Status::Pass {
        Verdict::Unobstructed
    } else {
        Verdict::Inconclusive
    };
    let mut notes = vec![format!("genus fixture lists {genus_classes} class(es); completeness is not checked")];
    notes.extend(span.warnings.iter().cloned());
    Ok(ObstructionReport { obstruction_rank: span.rank, pairings, verdict, certificate, hypotheses, genus_classes, notes })
}
