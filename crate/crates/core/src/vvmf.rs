//! Truncated vector-valued q-expansions, theta series, genus thetas and theta spans.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, PrimInt, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, parse_rat, rat, rat_int};
use crate::cyclotomic::CycScalar;
use crate::error::{Error, Result};
use crate::fqm::{Fqm, FqmIsometry, FqmJson, Quotient};
use crate::io::CycJson;
use crate::lattice::{EvenLattice, LatticeJson};
use crate::linalg;
use crate::poly::{self, HarmonicPolynomial, Poly};
use crate::weilrep::{GroupAlgebraVector, WeilCtx};

// ---------------------------------------------------------------- scalar series

/// A scalar q-series sum c(n) q^n with rational exponents 0 <= n <= prec.
#[derive(Clone, Debug)]
pub struct ScalarSeries {
    pub prec: BigRational,
    pub coeffs: BTreeMap<BigRational, CycScalar>,
}

impl ScalarSeries {
    pub fn new(prec: BigRational) -> Self {
        ScalarSeries { prec, coeffs: BTreeMap::new() }
    }

    pub fn get(&self, n: &BigRational) -> CycScalar {
        self.coeffs.get(n).cloned().unwrap_or_else(|| CycScalar::zero(1))
    }

    pub fn add_to(&mut self, n: BigRational, c: &CycScalar) {
        if c.is_zero() || n > self.prec {
            return;
        }
        let e = self.coeffs.entry(n).or_insert_with(|| CycScalar::zero(1));
        *e = &*e + c;
    }

    fn cleaned(&self, prec: &BigRational) -> BTreeMap<BigRational, CycScalar> {
        self.coeffs
            .iter()
            .filter(|(n, c)| *n <= prec && !c.is_zero())
            .map(|(n, c)| (n.clone(), c.shrink()))
            .collect()
    }

    /// Equality up to the smaller of the two precisions.
    pub fn agrees_with(&self, o: &ScalarSeries) -> bool {
        let p = if self.prec < o.prec { self.prec.clone() } else { o.prec.clone() };
        self.cleaned(&p) == o.cleaned(&p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }
}

// ---------------------------------------------------------------- vector-valued expansions

/// Truncated expansion sum_g sum_n c(g, n) q^n e^g. Exponents are stored as e = N n, N the level.
#[derive(Clone, Debug)]
pub struct VVQExpansion {
    pub module: Arc<Fqm>,
    pub weight: BigRational,
    pub prec: BigRational,
    pub cusp: bool,
    coeffs: BTreeMap<(usize, i64), CycScalar>,
}

impl PartialEq for VVQExpansion {
    fn eq(&self, o: &Self) -> bool {
        *self.module == *o.module && self.weight == o.weight && self.prec == o.prec && self.sub(o).is_zero()
    }
}

impl VVQExpansion {
    pub fn new(module: Arc<Fqm>, weight: BigRational, prec: BigRational) -> Result<Self> {
        if prec.is_negative() {
            return Err(Error::BadPrecision(format!("precision {} is negative", fmt_rat(&prec))));
        }
        Ok(VVQExpansion { module, weight, prec, cusp: false, coeffs: BTreeMap::new() })
    }

    pub fn level(&self) -> i64 {
        self.module.level()
    }

    /// Largest stored exponent index floor(N prec).
    pub fn max_e(&self) -> i64 {
        (&self.prec * rat_int(self.level())).floor().to_integer().to_i64().unwrap()
    }

    pub fn exponent(&self, e: i64) -> BigRational {
        rat(e, self.level())
    }

    pub fn e_of(&self, n: &BigRational) -> Option<i64> {
        let x = n * rat_int(self.level());
        if x.is_integer() {
            x.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Whether (g, e) is an admissible position: e = N q(g) mod N and 0 <= e <= N prec.
    pub fn admissible(&self, g: usize, e: i64) -> bool {
        let n = self.level();
        e >= 0 && e <= self.max_e() && (e - self.module.q_num(g)).rem_euclid(n) == 0
    }

    pub fn get_e(&self, g: usize, e: i64) -> CycScalar {
        self.coeffs.get(&(g, e)).cloned().unwrap_or_else(|| CycScalar::zero(1))
    }

    pub fn get(&self, g: usize, n: &BigRational) -> CycScalar {
        match self.e_of(n) {
            Some(e) => self.get_e(g, e),
            None => CycScalar::zero(1),
        }
    }

    pub fn set_e(&mut self, g: usize, e: i64, c: CycScalar) -> Result<()> {
        if !self.admissible(g, e) {
            if c.is_zero() {
                return Ok(());
            }
            return Err(Error::Invalid(format!(
                "exponent {} is not admissible for component {g}",
                fmt_rat(&self.exponent(e))
            )));
        }
        if c.is_zero() {
            self.coeffs.remove(&(g, e));
        } else {
            self.coeffs.insert((g, e), c);
        }
        Ok(())
    }

    pub fn add_e(&mut self, g: usize, e: i64, c: &CycScalar) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let cur = self.get_e(g, e);
        self.set_e(g, e, &cur + c)
    }

    /// Nonzero coefficients in (g, e) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, &CycScalar)> {
        self.coeffs.iter().filter(|(_, c)| !c.is_zero()).map(|(&(g, e), c)| (g, e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    pub fn zero_like(&self) -> Self {
        VVQExpansion { module: self.module.clone(), weight: self.weight.clone(), prec: self.prec.clone(), cusp: self.cusp, coeffs: BTreeMap::new() }
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if *self.module != *o.module {
            return Err(Error::ModuleMismatch("expansions live on different modules".into()));
        }
        if self.weight != o.weight {
            return Err(Error::ModuleMismatch("expansions have different weights".into()));
        }
        Ok(())
    }

    /// Sum, aligned to the smaller precision.
    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let prec = if self.prec < o.prec { self.prec.clone() } else { o.prec.clone() };
        let mut out = self.truncate(&prec);
        for (g, e, c) in o.iter() {
            if e <= out.max_e() {
                out.add_e(g, e, c)?;
            }
        }
        out.cusp = self.cusp && o.cusp;
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("incompatible expansions")
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &CycScalar) -> Self {
        let mut out = self.zero_like();
        if s.is_zero() {
            return out;
        }
        for (g, e, c) in self.iter() {
            out.coeffs.insert((g, e), c * s);
        }
        out
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        self.scale(&CycScalar::rational(1, r.clone()))
    }

    pub fn truncate(&self, prec: &BigRational) -> Self {
        let mut out = self.zero_like();
        out.prec = if prec < &self.prec { prec.clone() } else { self.prec.clone() };
        let me = out.max_e();
        out.coeffs = self.coeffs.iter().filter(|(k, c)| k.1 <= me && !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect();
        out
    }

    /// Equality after aligning both to the smaller precision.
    pub fn agrees_with(&self, o: &Self) -> bool {
        if *self.module != *o.module {
            return false;
        }
        let p = if self.prec < o.prec { self.prec.clone() } else { o.prec.clone() };
        let a = self.truncate(&p);
        let b = o.truncate(&p);
        a.iter().count() == b.iter().count() && a.iter().all(|(g, e, c)| b.get_e(g, e) == *c)
    }

    /// All admissible positions (g, e), g-major.
    pub fn index_set(module: &Fqm, prec: &BigRational) -> Vec<(usize, i64)> {
        let n = module.level();
        let me = (prec * rat_int(n)).floor().to_integer().to_i64().unwrap();
        let mut out = Vec::new();
        for g in module.elements() {
            let mut e = module.q_num(g).rem_euclid(n);
            while e <= me {
                out.push((g, e));
                e += n;
            }
        }
        out
    }

    pub fn to_vector(&self, index: &[(usize, i64)]) -> Vec<CycScalar> {
        index.iter().map(|&(g, e)| self.get_e(g, e)).collect()
    }

    pub fn from_vector(
        module: Arc<Fqm>,
        weight: BigRational,
        prec: BigRational,
        index: &[(usize, i64)],
        v: &[CycScalar],
    ) -> Result<Self> {
        let mut out = Self::new(module, weight, prec)?;
        for (&(g, e), c) in index.iter().zip(v) {
            out.set_e(g, e, c.clone())?;
        }
        Ok(out)
    }

    /// The component <f, e^g> as a scalar series.
    pub fn component(&self, g: usize) -> ScalarSeries {
        let mut s = ScalarSeries::new(self.prec.clone());
        for (h, e, c) in self.iter() {
            if h == g {
                s.add_to(self.exponent(e), c);
            }
        }
        s
    }

    /// Coefficients at a fixed exponent as a group algebra vector.
    pub fn slice(&self, ctx: &Arc<WeilCtx>, e: i64) -> Result<GroupAlgebraVector> {
        let entries: Vec<CycScalar> = self.module.elements().map(|g| self.get_e(g, e)).collect();
        GroupAlgebraVector::from_entries(ctx, 1, &entries)
    }

    /// Distinct exponent indices carrying a nonzero coefficient.
    pub fn exponents(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.iter().map(|(_, e, _)| e).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Checks that the n = 0 part vanishes when the cusp flag is set.
    pub fn check_cusp(&self) -> Result<()> {
        if self.cusp && self.iter().any(|(_, e, _)| e == 0) {
            return Err(Error::Invalid("cusp form with nonzero constant term".into()));
        }
        Ok(())
    }

    pub fn is_rational(&self) -> bool {
        self.iter().all(|(_, _, c)| c.shrink().to_rational().is_some())
    }

    /// Integer weight k, if the weight is integral.
    pub fn integral_weight(&self) -> Result<i64> {
        if self.weight.is_integer() {
            Ok(self.weight.to_integer().to_i64().unwrap())
        } else {
            Err(Error::Invalid(format!("weight {} is not integral", fmt_rat(&self.weight))))
        }
    }

    pub fn to_json(&self) -> ExpansionJson {
        ExpansionJson {
            fqm: self.module.to_json(),
            weight: if self.weight.is_integer() {
                serde_json::Value::from(self.weight.to_integer().to_i64().unwrap())
            } else {
                serde_json::Value::from(fmt_rat(&self.weight))
            },
            precision: fmt_rat(&self.prec),
            coeffs: self
                .iter()
                .map(|(g, e, c)| CoeffJson {
                    gamma: self.module.coords(g).to_vec(),
                    n: fmt_rat(&self.exponent(e)),
                    value: CycJson::from_scalar(c),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ExpansionJson) -> Result<Self> {
        let module = Arc::new(Fqm::from_json(&j.fqm)?);
        let weight = match &j.weight {
            serde_json::Value::Number(n) => rat_int(n.as_i64().ok_or_else(|| Error::Parse("weight".into()))?),
            serde_json::Value::String(s) => parse_rat(s)?,
            _ => return Err(Error::Parse("weight must be an integer or a rational string".into())),
        };
        let mut out = Self::new(module.clone(), weight, parse_rat(&j.precision)?)?;
        for c in &j.coeffs {
            let g = module.index(&c.gamma);
            let n = parse_rat(&c.n)?;
            let e = out.e_of(&n).ok_or_else(|| Error::Parse(format!("exponent {} is off the level grid", c.n)))?;
            out.add_e(g, e, &c.value.to_scalar()?)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub fqm: FqmJson,
    pub weight: serde_json::Value,
    pub precision: String,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffJson {
    pub gamma: Vec<i64>,
    pub n: String,
    pub value: CycJson,
}

fn convert_e(e: i64, from: i64, to: i64) -> Option<i64> {
    let x = e * to;
    if x % from == 0 {
        Some(x / from)
    } else {
        None
    }
}

// ---------------------------------------------------------------- maps between modules

/// sigma^* f for sigma in Iso(D, D'): (sigma^* f)_g = f_{sigma(g)}.
pub fn pullback_expansion(sigma: &FqmIsometry, f: &VVQExpansion) -> Result<VVQExpansion> {
    if *f.module != *sigma.codomain {
        return Err(Error::ModuleMismatch("expansion is not on the isometry's codomain".into()));
    }
    let inv = sigma.inverse_table();
    let mut out = VVQExpansion::new(sigma.domain.clone(), f.weight.clone(), f.prec.clone())?;
    out.cusp = f.cusp;
    for (g, e, c) in f.iter() {
        out.set_e(inv[g], e, c.clone())?;
    }
    Ok(out)
}

/// sigma_* f for sigma in Iso(D, D'): (sigma_* f)_{sigma(g)} = f_g.
pub fn pushforward_expansion(sigma: &FqmIsometry, f: &VVQExpansion) -> Result<VVQExpansion> {
    if *f.module != *sigma.domain {
        return Err(Error::ModuleMismatch("expansion is not on the isometry's domain".into()));
    }
    let mut out = VVQExpansion::new(sigma.codomain.clone(), f.weight.clone(), f.prec.clone())?;
    out.cusp = f.cusp;
    for (g, e, c) in f.iter() {
        out.set_e(sigma.apply(g), e, c.clone())?;
    }
    Ok(out)
}

/// Isotropic descent applied to every exponent slice.
pub fn descend_expansion(quotient: &Quotient, f: &VVQExpansion) -> Result<VVQExpansion> {
    let nd = f.level();
    let nq = quotient.module.level();
    if quotient.proj.len() != f.module.size() {
        return Err(Error::ModuleMismatch("quotient does not come from this module".into()));
    }
    let mut out = VVQExpansion::new(quotient.module.clone(), f.weight.clone(), f.prec.clone())?;
    out.cusp = f.cusp;
    for (g, e, c) in f.iter() {
        if let Some(cls) = quotient.proj[g] {
            let e2 = convert_e(e, nd, nq).ok_or_else(|| Error::Invalid("exponent not on the quotient grid".into()))?;
            out.add_e(cls, e2, c)?;
        }
    }
    Ok(out)
}

/// Isotropic lift applied to every exponent slice.
pub fn lift_expansion(target: &Arc<Fqm>, quotient: &Quotient, f: &VVQExpansion) -> Result<VVQExpansion> {
    if *f.module != *quotient.module || quotient.proj.len() != target.size() {
        return Err(Error::ModuleMismatch("expansion does not live on H^perp/H of the target".into()));
    }
    let nd = target.level();
    let nq = f.level();
    let mut out = VVQExpansion::new(target.clone(), f.weight.clone(), f.prec.clone())?;
    out.cusp = f.cusp;
    for g in target.elements() {
        if let Some(cls) = quotient.proj[g] {
            for (h, e, c) in f.iter() {
                if h == cls {
                    out.add_e(g, convert_e(e, nq, nd).unwrap(), c)?;
                }
            }
        }
    }
    Ok(out)
}

/// f (x) g on D + D' with exponents added: the theta series of an orthogonal sum.
pub fn tensor_product(f: &VVQExpansion, g: &VVQExpansion) -> Result<(VVQExpansion, crate::fqm::DirectSum)> {
    let ds = Fqm::direct_sum(&f.module, &g.module);
    let module = Arc::new(ds.module.clone());
    let n = module.level();
    let prec = if f.prec < g.prec { f.prec.clone() } else { g.prec.clone() };
    let mut out = VVQExpansion::new(module, &f.weight + &g.weight, prec)?;
    out.cusp = f.cusp || g.cusp;
    let me = out.max_e();
    let (nf, ng) = (f.level(), g.level());
    for (a, e1, c1) in f.iter() {
        let e1 = convert_e(e1, nf, n).unwrap();
        if e1 > me {
            continue;
        }
        for (b, e2, c2) in g.iter() {
            let e2 = convert_e(e2, ng, n).unwrap();
            if e1 + e2 > me {
                continue;
            }
            let idx = out.module.add(ds.embed_a[a], ds.embed_b[b]);
            out.add_e(idx, e1 + e2, &(c1 * c2))?;
        }
    }
    Ok((out, ds))
}

// ---------------------------------------------------------------- theta series

/// A polynomial with integer numerators over a common denominator.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    pub terms: Vec<(Vec<u32>, i128)>,
    pub den: BigInt,
    pub h: u32,
}

impl CompiledPoly {
    pub fn new(p: &Poly, h: u32) -> Result<Self> {
        let mut den = BigInt::one();
        for c in p.terms.values() {
            den = den.lcm(c.denom());
        }
        let terms = p
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| {
                let v = (c * BigRational::from_integer(den.clone())).to_integer();
                v.to_i128().map(|x| (e.clone(), x)).ok_or_else(|| Error::TooLarge("polynomial coefficient".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledPoly { terms, den, h })
    }

    pub fn eval(&self, u: &[i128]) -> i128 {
        let mut s = 0i128;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (x, &k) in u.iter().zip(e) {
                for _ in 0..k {
                    t *= *x;
                }
            }
            s += t;
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumerator {
    FinckePohst,
    Box,
}

/// theta_{L,P} on L'/L, with P in the lattice's ambient coordinates.
pub fn lattice_theta(l: &EvenLattice, p: &HarmonicPolynomial, prec: &BigRational, how: Enumerator) -> Result<VVQExpansion> {
    if prec.is_negative() {
        return Err(Error::BadPrecision("precision must be non-negative".into()));
    }
    l.check_harmonic(p)?;
    let d = l.discriminant().clone();
    let (w, s) = l.ambient_integer_map();
    let m = l.rank();
    let cp = CompiledPoly::new(&p.poly, p.h)?;
    let constant = p.h == 0;
    let mut acc: HashMap<(usize, i64), i128> = HashMap::new();
    let mut u = vec![0i128; m];
    let mut visit = |z: &[i64], _nn: i128| {
        let key = (l.coset(z), l.exponent_index(z));
        let val = if constant {
            cp.terms.first().map(|t| t.1).unwrap_or(0)
        } else {
            for k in 0..m {
                u[k] = (0..m).map(|i| z[i] as i128 * w[i][k]).sum();
            }
            cp.eval(&u)
        };
        *acc.entry(key).or_insert(0) += val;
    };
    match how {
        Enumerator::FinckePohst => l.for_each_dual_vector(prec, &mut visit)?,
        Enumerator::Box => l.for_each_dual_vector_box(prec, &mut visit)?,
    }
    let den = BigRational::from_integer(cp.den.clone() * BigInt::from(s).pow(p.h));
    let mut out = VVQExpansion::new(d, rat(m as i64, 2) + rat_int(p.h as i64), prec.clone())?;
    out.cusp = p.h > 0;
    let mut keys: Vec<_> = acc.into_iter().collect();
    keys.sort();
    for ((g, e), v) in keys {
        if v != 0 {
            out.set_e(g, e, CycScalar::rational(1, BigRational::from_integer(BigInt::from(v)) / &den))?;
        }
    }
    if p.h > 0 && out.iter().any(|(_, e, _)| e == 0) {
        return Err(Error::Invalid("harmonic theta series has a nonzero constant term".into()));
    }
    Ok(out)
}

/// sigma^* theta_{L,P} for sigma in Iso(D, L'/L); sigma = None means D = L'/L.
pub fn theta_series(
    l: &EvenLattice,
    sigma: Option<&FqmIsometry>,
    p: &HarmonicPolynomial,
    prec: &BigRational,
) -> Result<VVQExpansion> {
    if !prec.is_positive() {
        return Err(Error::BadPrecision("precision must be positive".into()));
    }
    let t = lattice_theta(l, p, prec, Enumerator::FinckePohst)?;
    match sigma {
        None => Ok(t),
        Some(s) => pullback_expansion(s, &t),
    }
}

// ---------------------------------------------------------------- genus fixtures

#[derive(Clone, Debug)]
pub struct GenusClass {
    pub lattice: EvenLattice,
    pub aut_order: BigInt,
    /// Declared isometry D -> L'/L.
    pub iso: FqmIsometry,
}

/// Representatives of a genus II_{m,0}(D) with externally supplied automorphism orders.
#[derive(Clone, Debug)]
pub struct GenusFixture {
    pub module: Arc<Fqm>,
    pub classes: Vec<GenusClass>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenusClassJson {
    pub lattice: LatticeJson,
    pub aut_order: serde_json::Value,
    #[serde(default)]
    pub iso: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenusJson {
    pub fqm: FqmJson,
    pub classes: Vec<GenusClassJson>,
}

impl GenusFixture {
    /// `iso` lists the images of the generators of D as coordinate vectors in L'/L;
    /// when absent the first isometry found is used.
    pub fn new(module: Arc<Fqm>, classes: Vec<(EvenLattice, BigInt, Option<Vec<Vec<i64>>>)>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::EmptyGenus);
        }
        let m = classes[0].0.rank();
        let mut out = Vec::new();
        for (l, aut, iso) in classes {
            if l.rank() != m {
                return Err(Error::Invalid("genus classes have different ranks".into()));
            }
            if !aut.is_positive() {
                return Err(Error::Invalid("automorphism order must be positive".into()));
            }
            let disc = l.discriminant().clone();
            let iso = match iso {
                Some(imgs) => {
                    let idx: Vec<usize> = imgs.iter().map(|c| disc.index(c)).collect();
                    FqmIsometry::from_images(module.clone(), disc, &idx)
                        .ok_or_else(|| Error::Invalid(format!("declared map is not an isometry onto {}'/{}", l.name, l.name)))?
                }
                None => module
                    .isometries(&disc)?
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::Invalid(format!("{} does not have discriminant form D", l.name)))?,
            };
            out.push(GenusClass { lattice: l, aut_order: aut, iso });
        }
        Ok(GenusFixture { module, classes: out })
    }

    /// One-class fixture with D = L'/L.
    pub fn single(l: EvenLattice, aut_order: BigInt) -> Result<Self> {
        let d = l.discriminant().clone();
        Self::new(d, vec![(l, aut_order, None)])
    }

    pub fn rank(&self) -> usize {
        self.classes[0].lattice.rank()
    }

    pub fn mass(&self) -> BigRational {
        self.classes.iter().map(|c| BigRational::new(BigInt::one(), c.aut_order.clone())).sum()
    }

    pub fn from_json(j: &GenusJson) -> Result<Self> {
        let module = Arc::new(Fqm::from_json(&j.fqm)?);
        let mut classes = Vec::new();
        for c in &j.classes {
            let l = EvenLattice::from_json(&c.lattice)?;
            let aut = match &c.aut_order {
                serde_json::Value::Number(n) => BigInt::from(n.as_u64().ok_or_else(|| Error::Parse("aut_order".into()))?),
                serde_json::Value::String(s) => s.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))?,
                _ => return Err(Error::Parse("aut_order must be an integer".into())),
            };
            classes.push((l, aut, c.iso.clone()));
        }
        Self::new(module, classes)
    }

    pub fn to_json(&self) -> GenusJson {
        GenusJson {
            fqm: self.module.to_json(),
            classes: self
                .classes
                .iter()
                .map(|c| GenusClassJson {
                    lattice: c.lattice.to_json(),
                    aut_order: serde_json::Value::from(c.aut_order.to_string()),
                    iso: Some(c.iso.images.iter().map(|e| e.coords.clone()).collect()),
                })
                .collect(),
        }
    }

    /// Iso(D, L'/L) for one class.
    pub fn isometries(&self, class: usize) -> Result<Vec<FqmIsometry>> {
        let disc = self.classes[class].lattice.discriminant().clone();
        self.module.isometries(&disc)
    }
}

/// Mass- and Iso-averaged genus theta series with harmonic weight P.
pub fn genus_theta(fixture: &GenusFixture, p: &HarmonicPolynomial, prec: &BigRational) -> Result<VVQExpansion> {
    let o_d = fixture.module.orthogonal_group()?.len();
    let mut total: Option<VVQExpansion> = None;
    for (i, class) in fixture.classes.iter().enumerate() {
        let t = theta_series(&class.lattice, None, p, prec)?;
        let w = BigRational::new(BigInt::one(), class.aut_order.clone());
        for sigma in fixture.isometries(i)? {
            let term = pullback_expansion(&sigma, &t)?.scale_rat(&w);
            total = Some(match total {
                None => term,
                Some(acc) => acc.add(&term),
            });
        }
    }
    let total = total.ok_or(Error::EmptyGenus)?;
    let norm = fixture.mass() * rat_int(o_d as i64);
    Ok(total.scale_rat(&norm.recip()))
}

pub fn eisenstein(fixture: &GenusFixture, prec: &BigRational) -> Result<VVQExpansion> {
    genus_theta(fixture, &HarmonicPolynomial::one(fixture.rank()), prec)
}

// ---------------------------------------------------------------- spans

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanMethod {
    /// Column space of the kernel matrix sum P_m^h(lambda, mu) over shell pairs.
    Kernel,
    /// One theta series per harmonic basis polynomial.
    Explicit,
}

/// A subspace of truncated expansions, stored as reduced row-echelon rows over an index set.
#[derive(Clone, Debug)]
pub struct ThetaSpan {
    pub module: Arc<Fqm>,
    pub weight: BigRational,
    pub prec: BigRational,
    pub index: Vec<(usize, i64)>,
    pub basis: Vec<Vec<CycScalar>>,
    pub pivots: Vec<usize>,
    pub rank: usize,
    pub warnings: Vec<String>,
}

impl ThetaSpan {
    pub fn from_generators(module: Arc<Fqm>, weight: BigRational, prec: BigRational, gens: &[VVQExpansion]) -> Result<Self> {
        let index = VVQExpansion::index_set(&module, &prec);
        let mut rows = Vec::new();
        for g in gens {
            if *g.module != *module {
                return Err(Error::ModuleMismatch("generator on a different module".into()));
            }
            rows.push(g.truncate(&prec).to_vector(&index));
        }
        let (basis, pivots) = row_reduce(&rows);
        let rank = pivots.len();
        let mut warnings = Vec::new();
        if rank == index.len() && gens.len() > rank {
            warnings.push(format!(
                "rank {rank} saturates the {} coefficient positions; precision may be too small to separate",
                index.len()
            ));
        }
        Ok(ThetaSpan { module, weight, prec, index, basis, pivots, rank, warnings })
    }

    pub fn contains(&self, f: &VVQExpansion) -> bool {
        let v = f.truncate(&self.prec).to_vector(&self.index);
        let r = linalg::reduce_against(&self.basis, &self.pivots, &v);
        r.iter().all(|x| x.is_zero())
    }

    pub fn basis_expansions(&self) -> Vec<VVQExpansion> {
        self.basis
            .iter()
            .map(|r| VVQExpansion::from_vector(self.module.clone(), self.weight.clone(), self.prec.clone(), &self.index, r).unwrap())
            .collect()
    }

    /// Same row space.
    pub fn same_space(&self, o: &ThetaSpan) -> bool {
        self.index == o.index && self.rank == o.rank && o.basis_expansions().iter().all(|f| self.contains(f))
    }
}

/// Row reduction over Q when all entries are rational, else over Q(zeta).
pub fn row_reduce(rows: &[Vec<CycScalar>]) -> (Vec<Vec<CycScalar>>, Vec<usize>) {
    let rational: Option<Vec<Vec<BigRational>>> =
        rows.iter().map(|r| r.iter().map(|c| c.shrink().to_rational()).collect::<Option<Vec<_>>>()).collect();
    match rational {
        Some(q) => {
            let (b, p) = linalg::rref(&q);
            (b.into_iter().map(|r| r.into_iter().map(|x| CycScalar::rational(1, x)).collect()).collect(), p)
        }
        None => linalg::rref(rows),
    }
}

/// Monomials of degree <= h in m variables as a tree: entry i = parent * x_var.
struct MonoTree {
    parent: Vec<usize>,
    var: Vec<usize>,
    exps: Vec<Vec<u32>>,
    degree: Vec<u32>,
}

impl MonoTree {
    fn new(m: usize, h: u32) -> Self {
        let mut t = MonoTree { parent: vec![0], var: vec![0], exps: vec![vec![0; m]], degree: vec![0] };
        let mut last_var = vec![0usize];
        let mut frontier = vec![0usize];
        for d in 1..=h {
            let mut next = Vec::new();
            for &p in &frontier {
                for v in last_var[p]..m {
                    let mut e = t.exps[p].clone();
                    e[v] += 1;
                    t.parent.push(p);
                    t.var.push(v);
                    t.exps.push(e);
                    t.degree.push(d);
                    last_var.push(v);
                    next.push(t.exps.len() - 1);
                }
            }
            frontier = next;
        }
        t
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn multinomial(&self, i: usize) -> BigInt {
        let d = self.degree[i] as u64;
        let mut r = crate::arith::factorial(d);
        for &k in &self.exps[i] {
            r /= crate::arith::factorial(k as u64);
        }
        r
    }
}

/// Accumulates shell moments sum_lambda x(lambda)^alpha for the monomials in `keep`.
fn accumulate_moments<T: PrimInt + std::ops::AddAssign + std::ops::SubAssign>(
    l: &EvenLattice,
    prec: &BigRational,
    tree: &MonoTree,
    keep: &[usize],
    coords: &dyn Fn(&[i64], &mut [i128]),
    shell_of: &dyn Fn(usize, i64) -> Option<usize>,
    nshells: usize,
) -> Result<Vec<Vec<T>>> {
    let m = l.rank();
    let k = keep.len();
    let mut acc: Vec<T> = vec![T::zero(); nshells * k];
    let mut vals: Vec<T> = vec![T::zero(); tree.len()];
    let mut x = vec![0i128; m];
    let mut xt = vec![T::zero(); m];
    let odd: Vec<bool> = keep.iter().map(|&i| tree.degree[i] % 2 == 1).collect();
    let d = l.discriminant().clone();
    l.for_each_dual_vector(prec, |z, _| {
        // lambda and -lambda are handled together
        let first = z.iter().find(|&&v| v != 0);
        let is_zero = first.is_none();
        if let Some(&f) = first {
            if f < 0 {
                return;
            }
        }
        let c = l.coset(z);
        let e = l.exponent_index(z);
        coords(z, &mut x);
        for i in 0..m {
            xt[i] = T::from(x[i]).expect("coordinate fits");
        }
        vals[0] = T::one();
        for i in 1..tree.len() {
            vals[i] = vals[tree.parent[i]] * xt[tree.var[i]];
        }
        let s1 = shell_of(c, e).expect("shell");
        let base = s1 * k;
        for (j, &i) in keep.iter().enumerate() {
            acc[base + j] += vals[i];
        }
        if !is_zero {
            let s2 = shell_of(d.neg(c), e).expect("shell");
            let base = s2 * k;
            for (j, &i) in keep.iter().enumerate() {
                if odd[j] {
                    acc[base + j] -= vals[i];
                } else {
                    acc[base + j] += vals[i];
                }
            }
        }
    })?;
    Ok(acc.chunks(k).map(|c| c.to_vec()).collect())
}

/// Columns of the kernel matrix A(s, s') = sum_{lambda in s, mu in s'} P_m^h(lambda, mu) on L'/L.
/// Their span equals span{theta_{L,P} : P in H_m^h} truncated at `prec`.
pub fn kernel_theta_generators(l: &EvenLattice, h: u32, prec: &BigRational) -> Result<Vec<VVQExpansion>> {
    let m = l.rank();
    let d = l.discriminant().clone();
    let n = d.level();
    let index = VVQExpansion::index_set(&d, prec);
    let mut shell_pos: HashMap<(usize, i64), usize> = HashMap::new();
    for (i, &k) in index.iter().enumerate() {
        shell_pos.insert(k, i);
    }
    let ns = index.len();
    let tree = MonoTree::new(m, h);
    let keep: Vec<usize> = (0..tree.len()).filter(|&i| tree.degree[i] % 2 == h % 2).collect();
    let shell_of = |c: usize, e: i64| shell_pos.get(&(c, e)).copied();

    // (lambda, mu) = a(lambda) . b(mu) / d0
    let embedded = l.embedding().is_some();
    let (w, s) = l.ambient_integer_map();
    let adj: Vec<Vec<i128>> = l.adjugate().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let coords_u = |z: &[i64], out: &mut [i128]| {
        for k in 0..m {
            out[k] = (0..m).map(|i| z[i] as i128 * w[i][k]).sum();
        }
    };
    let coords_z = |z: &[i64], out: &mut [i128]| {
        for k in 0..m {
            out[k] = z[k] as i128;
        }
    };
    let coords_y = |z: &[i64], out: &mut [i128]| {
        for k in 0..m {
            out[k] = (0..m).map(|i| adj[k][i] * z[i] as i128).sum();
        }
    };
    let d0: BigInt = if embedded { BigInt::from(s) * BigInt::from(s) } else { BigInt::from(l.det()) };
    // crude coordinate bound to choose the accumulator width
    let q = prec.to_f64().unwrap_or(0.0);
    let bound = |scale: f64| -> f64 { scale * (2.0 * q + 1.0).sqrt() };
    let coord_bound = if embedded {
        bound(s as f64)
    } else {
        let gmax = l.gram().iter().flatten().map(|x| x.abs()).max().unwrap_or(1) as f64;
        let amax = adj.iter().flatten().map(|x| x.abs()).max().unwrap_or(1) as f64;
        bound((gmax * m as f64).max(amax * m as f64 * gmax.sqrt()))
    };
    let est_count = 1e8f64;
    let small = coord_bound.powi(h as i32) * est_count < 4e18;

    type Moments = Vec<Vec<BigInt>>;
    let run = |coords: &dyn Fn(&[i64], &mut [i128])| -> Result<Moments> {
        if small {
            let a: Vec<Vec<i64>> = accumulate_moments::<i64>(l, prec, &tree, &keep, coords, &shell_of, ns)?;
            Ok(a.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
        } else {
            let a: Vec<Vec<i128>> = accumulate_moments::<i128>(l, prec, &tree, &keep, coords, &shell_of, ns)?;
            Ok(a.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
        }
    };
    let (ma, mb) = if embedded {
        let a = run(&coords_u)?;
        (a.clone(), a)
    } else {
        (run(&coords_z)?, run(&coords_y)?)
    };
    let multi: Vec<BigInt> = keep.iter().map(|&i| tree.multinomial(i)).collect();
    let geg = poly::gegenbauer(m.max(2), h);
    let nval: Vec<BigRational> = index.iter().map(|&(_, e)| rat(e, n)).collect();
    // S_t(s1, s2) for t = h - 2i
    let mut a = vec![vec![BigRational::zero(); ns]; ns];
    for s1 in 0..ns {
        if ma[s1].iter().all(|x| x.is_zero()) {
            continue;
        }
        for s2 in s1..ns {
            if mb[s2].iter().all(|x| x.is_zero()) {
                continue;
            }
            let mut st: HashMap<u32, BigInt> = HashMap::new();
            for (j, &i) in keep.iter().enumerate() {
                if ma[s1][j].is_zero() || mb[s2][j].is_zero() {
                    continue;
                }
                *st.entry(tree.degree[i]).or_insert_with(BigInt::zero) += &multi[j] * &ma[s1][j] * &mb[s2][j];
            }
            let mut v = BigRational::zero();
            for (i, c) in geg.coeffs.iter().enumerate() {
                let t = h - 2 * i as u32;
                if let Some(sv) = st.get(&t) {
                    let nn = rat_int(4) * &nval[s1] * &nval[s2];
                    v += c * num_traits::pow(nn, i) * BigRational::new(sv.clone(), d0.pow(t));
                }
            }
            a[s1][s2] = v.clone();
            a[s2][s1] = v;
        }
    }
    let weight = rat(m as i64, 2) + rat_int(h as i64);
    let mut out = Vec::new();
    for s2 in 0..ns {
        if a.iter().all(|r| r[s2].is_zero()) {
            continue;
        }
        let col: Vec<CycScalar> = (0..ns).map(|s1| CycScalar::rational(1, a[s1][s2].clone())).collect();
        let mut f = VVQExpansion::from_vector(d.clone(), weight.clone(), prec.clone(), &index, &col)?;
        f.cusp = h > 0;
        out.push(f);
    }
    Ok(out)
}

/// Generators of span{theta_{L,P} : P in H_m^h} on L'/L.
pub fn lattice_theta_generators(l: &EvenLattice, h: u32, prec: &BigRational, method: SpanMethod) -> Result<Vec<VVQExpansion>> {
    match method {
        SpanMethod::Kernel => kernel_theta_generators(l, h, prec),
        SpanMethod::Explicit => l
            .harmonic_basis(h)
            .iter()
            .map(|p| lattice_theta(l, p, prec, Enumerator::FinckePohst))
            .collect(),
    }
}

/// Theta_{m,k}(D) truncated at Q: span of sigma^* theta_{L,P} over the fixture classes,
/// sigma in Iso(D, L'/L) and P in H_m^{k - m/2}.
pub fn theta_span(
    d: &Arc<Fqm>,
    m: usize,
    k: &BigRational,
    fixture: &GenusFixture,
    prec: &BigRational,
    method: SpanMethod,
) -> Result<ThetaSpan> {
    if !prec.is_positive() {
        return Err(Error::BadPrecision("precision must be positive".into()));
    }
    if *fixture.module != **d {
        return Err(Error::ModuleMismatch("fixture is for a different module".into()));
    }
    if fixture.rank() != m {
        return Err(Error::Invalid(format!("fixture lattices have rank {}, expected {m}", fixture.rank())));
    }
    let h2 = (k - rat(m as i64, 2)) * rat_int(1);
    if h2.is_negative() || !h2.is_integer() {
        return Err(Error::Invalid("k - m/2 must be a non-negative integer".into()));
    }
    let h = h2.to_integer().to_u32().unwrap();
    let mut gens = Vec::new();
    for (i, class) in fixture.classes.iter().enumerate() {
        let local = lattice_theta_generators(&class.lattice, h, prec, method)?;
        // reduce on L'/L first so the pullbacks stay few
        let disc = class.lattice.discriminant().clone();
        let local_span = ThetaSpan::from_generators(disc, k.clone(), prec.clone(), &local)?;
        let local_basis = local_span.basis_expansions();
        for sigma in fixture.isometries(i)? {
            for f in &local_basis {
                gens.push(pullback_expansion(&sigma, f)?);
            }
        }
    }
    let mut span = ThetaSpan::from_generators(d.clone(), k.clone(), prec.clone(), &gens)?;
    for g in &gens {
        if h > 0 && g.iter().any(|(_, e, _)| e == 0) {
            span.warnings.push("harmonic theta generator with nonzero constant term".into());
        }
    }
    Ok(span)
}

// ---------------------------------------------------------------- genus 2 on the diagonal

/// Jets in z2 of theta^{(2)}_L restricted to z2 = 0: entry j of the coefficient at
/// (g, b, e1, e2) is sum_{lambda, mu} (lambda, mu)^j.
#[derive(Clone, Debug)]
pub struct Genus2Slice {
    pub module: Arc<Fqm>,
    pub m: usize,
    pub prec: BigRational,
    pub max_jet: u32,
    pub coeffs: BTreeMap<(usize, usize, i64, i64), Vec<BigRational>>,
}

/// A bivariate expansion sum c(g, b, n1, n2) q1^n1 q2^n2 e^g (x) e^b, times (pi i)^pi_i_power.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateExpansion {
    pub module: Arc<Fqm>,
    pub weight: BigRational,
    pub prec: BigRational,
    pub pi_i_power: u32,
    pub coeffs: BTreeMap<(usize, usize, i64, i64), BigRational>,
}

impl BivariateExpansion {
    /// The first-variable expansion at fixed (b, e2).
    pub fn first_variable(&self, b: usize, e2: i64) -> Result<VVQExpansion> {
        let mut f = VVQExpansion::new(self.module.clone(), self.weight.clone(), self.prec.clone())?;
        for (&(g, bb, e1, ee2), c) in &self.coeffs {
            if bb == b && ee2 == e2 {
                f.add_e(g, e1, &CycScalar::rational(1, c.clone()))?;
            }
        }
        Ok(f)
    }

    /// (g, n1) <-> (b, n2).
    pub fn is_swap_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&(g, b, e1, e2), c)| self.coeffs.get(&(b, g, e2, e1)) == Some(c))
    }

    pub fn positions(&self) -> Vec<(usize, i64)> {
        let mut v: Vec<(usize, i64)> = self.coeffs.keys().map(|&(_, b, _, e2)| (b, e2)).collect();
        v.sort();
        v.dedup();
        v
    }
}

fn grouped_vectors(l: &EvenLattice, prec: &BigRational) -> Result<BTreeMap<(usize, i64), Vec<Vec<i64>>>> {
    let mut out: BTreeMap<(usize, i64), Vec<Vec<i64>>> = BTreeMap::new();
    l.for_each_dual_vector(prec, |z, _| {
        out.entry((l.coset(z), l.exponent_index(z))).or_default().push(z.to_vec());
    })?;
    Ok(out)
}

/// (lambda, mu) for dual coordinate vectors.
fn pairing(l: &EvenLattice, a: &[i64], b: &[i64]) -> BigRational {
    let m = l.rank();
    let adj = l.adjugate();
    let mut s: i128 = 0;
    for i in 0..m {
        for j in 0..m {
            s += a[i] as i128 * adj[i][j] as i128 * b[j] as i128;
        }
    }
    BigRational::new(BigInt::from(s), BigInt::from(l.det()))
}

pub fn genus2_theta_slice(l: &EvenLattice, prec: &BigRational, max_jet: u32) -> Result<Genus2Slice> {
    let groups = grouped_vectors(l, prec)?;
    let mut coeffs = BTreeMap::new();
    for (&(g, e1), v1) in &groups {
        for (&(b, e2), v2) in &groups {
            let mut jets = vec![BigRational::zero(); max_jet as usize + 1];
            if max_jet == 0 {
                jets[0] = rat_int((v1.len() * v2.len()) as i64);
                coeffs.insert((g, b, e1, e2), jets);
                continue;
            }
            for x in v1 {
                for y in v2 {
                    let p = pairing(l, x, y);
                    let mut pw = BigRational::one();
                    for j in jets.iter_mut() {
                        *j += &pw;
                        pw *= &p;
                    }
                }
            }
            coeffs.insert((g, b, e1, e2), jets);
        }
    }
    Ok(Genus2Slice { module: l.discriminant().clone(), m: l.rank(), prec: prec.clone(), max_jet, coeffs })
}

/// G_m^h(1/2 d/dz2, d^2/dz1 dz4) on the slice, with the (pi i)^h factor kept symbolic:
/// a monomial (1/2 d/dz2)^a (d^2/dz1dz4)^b contributes (lambda,mu)^a (4 n1 n2)^b.
pub fn apply_partial_h(slice: &Genus2Slice, h: u32) -> Result<BivariateExpansion> {
    if h > slice.max_jet {
        return Err(Error::Invalid(format!("slice carries jets up to order {}, need {h}", slice.max_jet)));
    }
    let geg = poly::gegenbauer(slice.m.max(2), h);
    let n = slice.module.level();
    let mut coeffs = BTreeMap::new();
    for (&(g, b, e1, e2), jets) in &slice.coeffs {
        let nn = rat_int(4) * rat(e1, n) * rat(e2, n);
        let mut v = BigRational::zero();
        for (i, c) in geg.coeffs.iter().enumerate() {
            v += c * num_traits::pow(nn.clone(), i) * &jets[(h - 2 * i as u32) as usize];
        }
        if !v.is_zero() {
            coeffs.insert((g, b, e1, e2), v);
        }
    }
    Ok(BivariateExpansion {
        module: slice.module.clone(),
        weight: rat(slice.m as i64, 2) + rat_int(h as i64),
        prec: slice.prec.clone(),
        pi_i_power: h,
        coeffs,
    })
}

/// sum_{lambda, mu} P_m^h(lambda, mu) by evaluating the bivariate harmonic polynomial.
pub fn partial_h_direct(l: &EvenLattice, h: u32, prec: &BigRational) -> Result<BivariateExpansion> {
    let groups = grouped_vectors(l, prec)?;
    let m = l.rank();
    let gram = l.ambient_gram();
    let mut coeffs = BTreeMap::new();
    for (&(b, e2), v2) in &groups {
        for y in v2 {
            let yv = l.ambient_coords(y);
            let p = poly::bivariate_harmonic(m.max(2), h, &yv, Some(&gram));
            for (&(g, e1), v1) in &groups {
                let mut s = BigRational::zero();
                for x in v1 {
                    s += p.eval(&l.ambient_coords(x));
                }
                if !s.is_zero() {
                    let e = coeffs.entry((g, b, e1, e2)).or_insert_with(BigRational::zero);
                    *e += s;
                }
            }
        }
    }
    coeffs.retain(|_, v: &mut BigRational| !v.is_zero());
    Ok(BivariateExpansion {
        module: l.discriminant().clone(),
        weight: rat(m as i64, 2) + rat_int(h as i64),
        prec: prec.clone(),
        pi_i_power: h,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;

    #[test]
    fn e8_theta() {
        let e8 = named::e8();
        let t = theta_series(&e8, None, &HarmonicPolynomial::one(8), &rat_int(3)).unwrap();
        let want = [1, 240, 2160, 6720];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(t.get_e(0, n as i64), CycScalar::rational(1, rat_int(*w)));
        }
    }

    #[test]
    fn a2_minimal_dual_vectors() {
        let a2 = named::a2();
        let t = theta_series(&a2, None, &HarmonicPolynomial::one(2), &rat_int(1)).unwrap();
        let d = a2.discriminant();
        let g = d.elements().find(|&g| g != 0).unwrap();
        assert_eq!(t.get(g, &rat(1, 3)), CycScalar::rational(1, rat_int(3)));
        // both nonzero cosets together carry the 6 minimal dual vectors
        let total: BigRational =
            d.elements().filter(|&g| g != 0).map(|g| t.get(g, &rat(1, 3)).to_rational().unwrap()).sum();
        assert_eq!(total, rat_int(6));
    }

    #[test]
    fn kernel_matches_explicit_small() {
        for (l, h) in [(named::a2(), 2u32), (named::a2(), 3), (named::d_n(4), 2), (named::a_n(3), 4)] {
            let q = rat_int(4);
            let k = kernel_theta_generators(&l, h, &q).unwrap();
            let e = lattice_theta_generators(&l, h, &q, SpanMethod::Explicit).unwrap();
            let w = rat(l.rank() as i64, 2) + rat_int(h as i64);
            let sk = ThetaSpan::from_generators(l.discriminant().clone(), w.clone(), q.clone(), &k).unwrap();
            let se = ThetaSpan::from_generators(l.discriminant().clone(), w, q.clone(), &e).unwrap();
            assert!(sk.same_space(&se), "{} h={h}: {} vs {}", l.name, sk.rank, se.rank);
        }
    }

    #[test]
    fn json_roundtrip() {
        let a2 = named::a2();
        let t = theta_series(&a2, None, &HarmonicPolynomial::one(2), &rat_int(2)).unwrap();
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back = VVQExpansion::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
