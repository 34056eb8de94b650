//! Multivariate rational polynomials, Gegenbauer polynomials and harmonic bases.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, fmt_rat, parse_rat, rat, rat_int};
use crate::error::{Error, Result};
use crate::linalg;

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigRational::one());
        p
    }

    /// Linear form sum_i c_i x_i.
    pub fn linear(c: &[BigRational]) -> Self {
        let mut p = Self::zero(c.len());
        for (i, ci) in c.iter().enumerate() {
            let mut e = vec![0; c.len()];
            e[i] = 1;
            p.add_term(e, ci.clone());
        }
        p
    }

    /// Quadratic form x^T A x.
    pub fn quadratic(a: &[Vec<BigRational>]) -> Self {
        let n = a.len();
        let mut p = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                p.add_term(e, a[i][j].clone());
            }
        }
        p
    }

    pub fn add_term(&mut self, e: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, h: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == h)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Poly {
        let mut p = Poly::zero(self.nvars);
        if s.is_zero() {
            return p;
        }
        for (e, c) in &self.terms {
            p.terms.insert(e.clone(), c * s);
        }
        p
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero(self.nvars);
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigRational::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        p.terms = acc;
        p
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::constant(self.nvars, BigRational::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &ei) in x.iter().zip(e) {
                if ei > 0 {
                    t *= num_traits::pow(xi.clone(), ei as usize);
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap() * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                p.add_term(e2, c * rat_int(e[i] as i64));
            }
        }
        p
    }

    /// sum_{ij} A_ij d_i d_j.
    pub fn laplacian_metric(&self, a: &[Vec<BigRational>]) -> Poly {
        let n = self.nvars;
        let mut p = Poly::zero(n);
        let firsts: Vec<Poly> = (0..n).map(|i| self.partial(i)).collect();
        for i in 0..n {
            for j in 0..n {
                if !a[i][j].is_zero() {
                    p = p.add(&firsts[i].partial(j).scale(&a[i][j]));
                }
            }
        }
        p
    }

    pub fn laplacian(&self) -> Poly {
        let n = self.nvars;
        let mut p = Poly::zero(n);
        for i in 0..n {
            p = p.add(&self.partial(i).partial(i));
        }
        p
    }

    /// Substitutes x_i -> sum_j s[i][j] y_j.
    pub fn substitute_linear(&self, s: &[Vec<BigRational>]) -> Poly {
        let nv = s.first().map(|r| r.len()).unwrap_or(0);
        let lins: Vec<Poly> = s.iter().map(|r| Poly::linear(r)).collect();
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&lins[i].pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Embeds into a polynomial ring with more variables, placing ours at `offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Poly {
        let mut p = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            e2[offset..offset + self.nvars].copy_from_slice(e);
            p.terms.insert(e2, c.clone());
        }
        p
    }
}

/// All exponent vectors of total degree h in n variables, in lexicographic order.
pub fn monomials(n: usize, h: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let n = cur.len();
        if i + 1 == n {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        if h == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(0, h, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicPolynomial {
    pub m: usize,
    pub h: u32,
    pub poly: Poly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicJson {
    pub m: usize,
    pub h: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coef: String,
}

impl HarmonicPolynomial {
    /// Wraps a polynomial after checking homogeneity and harmonicity for the metric
    /// (None means the Euclidean Laplacian).
    pub fn new(poly: Poly, h: u32, metric: Option<&[Vec<BigRational>]>) -> Result<Self> {
        if !poly.is_homogeneous(h) {
            return Err(Error::Invalid(format!("polynomial is not homogeneous of degree {h}")));
        }
        let lap = match metric {
            Some(a) => poly.laplacian_metric(a),
            None => poly.laplacian(),
        };
        if !lap.is_zero() {
            return Err(Error::Invalid("polynomial is not harmonic".into()));
        }
        Ok(HarmonicPolynomial { m: poly.nvars, h, poly })
    }

    pub fn one(m: usize) -> Self {
        HarmonicPolynomial { m, h: 0, poly: Poly::constant(m, BigRational::one()) }
    }

    pub fn to_json(&self) -> HarmonicJson {
        HarmonicJson {
            m: self.m,
            h: self.h,
            terms: self.poly.terms.iter().map(|(e, c)| TermJson { exps: e.clone(), coef: fmt_rat(c) }).collect(),
        }
    }

    pub fn from_json(j: &HarmonicJson, metric: Option<&[Vec<BigRational>]>) -> Result<Self> {
        let mut p = Poly::zero(j.m);
        for t in &j.terms {
            if t.exps.len() != j.m {
                return Err(Error::Parse("monomial has the wrong number of exponents".into()));
            }
            p.add_term(t.exps.clone(), parse_rat(&t.coef)?);
        }
        Self::new(p, j.h, metric)
    }
}

/// G_m^h(s, n) = sum_i coeffs[i] s^{h-2i} n^i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GegenbauerPoly {
    pub m: usize,
    pub h: u32,
    pub coeffs: Vec<BigRational>,
}

impl GegenbauerPoly {
    pub fn eval(&self, s: &BigRational, n: &BigRational) -> BigRational {
        let h = self.h as usize;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * num_traits::pow(s.clone(), h - 2 * i) * num_traits::pow(n.clone(), i))
            .sum()
    }

    /// Coefficients as integers; G_m^h has integer coefficients for even m.
    pub fn int_coeffs(&self) -> Vec<i128> {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .map(|c| {
                assert!(c.is_integer(), "Gegenbauer coefficient not integral");
                c.to_integer().to_i128().expect("Gegenbauer coefficient fits i128")
            })
            .collect()
    }
}

/// Coefficient of X^h in (1 - 2sX + nX^2)^{1 - m/2}. For m = 2 and h > 0 this vanishes, and the
/// limit divided by alpha = m/2 - 1 is returned instead; it is still harmonic of degree h.
pub fn gegenbauer(m: usize, h: u32) -> GegenbauerPoly {
    assert!(m >= 2);
    // alpha = m/2 - 1, possibly half-integral
    let alpha = rat(m as i64 - 2, 2);
    let poch = |j: u32| -> BigRational {
        let mut p = BigRational::one();
        // (alpha)_j / alpha at alpha = 0
        let start = if m == 2 && h > 0 { 1 } else { 0 };
        for t in start..j {
            p *= &alpha + rat_int(t as i64);
        }
        p
    };
    let mut coeffs = Vec::new();
    for i in 0..=(h / 2) {
        let j = h - i;
        let mut c = poch(j) / BigRational::from_integer(crate::arith::factorial(j as u64));
        c *= rat_int(binomial(j as i64, i as i64) as i64);
        c *= BigRational::from_integer(BigInt::from(2).pow(h - 2 * i));
        if i % 2 == 1 {
            c = -c;
        }
        coeffs.push(c);
    }
    GegenbauerPoly { m, h, coeffs }
}

/// P_m^h(x, y) = G_m^h((x,y), |x|^2 |y|^2) as a polynomial in x, for the bilinear form `gram`
/// (identity when None).
pub fn bivariate_harmonic(m: usize, h: u32, y: &[BigRational], gram: Option<&[Vec<BigRational>]>) -> Poly {
    let id: Vec<Vec<BigRational>>;
    let g: &[Vec<BigRational>] = match gram {
        Some(g) => g,
        None => {
            id = identity_q(y.len());
            &id
        }
    };
    let n = y.len();
    let gy: Vec<BigRational> = (0..n).map(|i| (0..n).map(|j| &g[i][j] * &y[j]).sum()).collect();
    let yy: BigRational = y.iter().zip(&gy).map(|(a, b)| a * b).sum();
    if yy.is_zero() && h > 0 {
        return Poly::zero(n);
    }
    let s = Poly::linear(&gy);
    let xx = Poly::quadratic(g).scale(&yy);
    let geg = gegenbauer(m, h);
    let mut out = Poly::zero(n);
    for (i, c) in geg.coeffs.iter().enumerate() {
        let t = s.pow(h - 2 * i as u32).mul(&xx.pow(i as u32)).scale(c);
        out = out.add(&t);
    }
    out
}

/// P_m^h(x, y) as a polynomial in 2m variables (x first), Euclidean form.
pub fn bivariate_harmonic_full(m: usize, h: u32) -> Poly {
    let nv = 2 * m;
    let mut s = Poly::zero(nv);
    let mut xx = Poly::zero(nv);
    let mut yy = Poly::zero(nv);
    for i in 0..m {
        let mut e = vec![0; nv];
        e[i] = 1;
        e[m + i] = 1;
        s.add_term(e, BigRational::one());
        let mut e = vec![0; nv];
        e[i] = 2;
        xx.add_term(e, BigRational::one());
        let mut e = vec![0; nv];
        e[m + i] = 2;
        yy.add_term(e, BigRational::one());
    }
    let nn = xx.mul(&yy);
    let geg = gegenbauer(m, h);
    let mut out = Poly::zero(nv);
    for (i, c) in geg.coeffs.iter().enumerate() {
        out = out.add(&s.pow(h - 2 * i as u32).mul(&nn.pow(i as u32)).scale(c));
    }
    out
}

pub fn identity_q(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn harmonic_dim(m: usize, h: u32) -> i128 {
    let (m, h) = (m as i64, h as i64);
    binomial(m + h - 1, h) - if h >= 2 { binomial(m + h - 3, h - 2) } else { 0 }
}

/// Basis of the kernel of the (metric) Laplacian on degree-h forms in m variables.
pub fn harmonic_basis_metric(m: usize, h: u32, metric: Option<&[Vec<BigRational>]>) -> Vec<HarmonicPolynomial> {
    let src = monomials(m, h);
    if h < 2 {
        return src
            .into_iter()
            .map(|e| {
                let mut p = Poly::zero(m);
                p.add_term(e, BigRational::one());
                HarmonicPolynomial { m, h, poly: p }
            })
            .collect();
    }
    let tgt = monomials(m, h - 2);
    let tindex: BTreeMap<Monomial, usize> = tgt.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let mut mat = vec![vec![BigRational::zero(); src.len()]; tgt.len()];
    for (col, e) in src.iter().enumerate() {
        let mut p = Poly::zero(m);
        p.add_term(e.clone(), BigRational::one());
        let lap = match metric {
            Some(a) => p.laplacian_metric(a),
            None => p.laplacian(),
        };
        for (te, c) in lap.terms {
            mat[tindex[&te]][col] = c;
        }
    }
    let ns = linalg::nullspace(&mat, src.len());
    ns.into_iter()
        .map(|v| {
            let mut p = Poly::zero(m);
            for (e, c) in src.iter().zip(v) {
                p.add_term(e.clone(), c);
            }
            HarmonicPolynomial { m, h, poly: p }
        })
        .collect()
}

pub fn harmonic_basis(m: usize, h: u32) -> Vec<HarmonicPolynomial> {
    harmonic_basis_metric(m, h, None)
}

/// Integral of x^e over the unit ball, with the common factor pi^{m/2} / Gamma(|e|/2 + m/2 + 1) dropped.
fn ball_moment(e: &[u32]) -> BigRational {
    if e.iter().any(|&k| k % 2 == 1) {
        return BigRational::zero();
    }
    let mut r = BigRational::one();
    for &k in e {
        // Gamma(b + 1/2) / sqrt(pi) = (2b)! / (4^b b!)
        let b = (k / 2) as u64;
        r *= BigRational::new(
            crate::arith::factorial(2 * b),
            BigInt::from(4).pow(b as u32) * crate::arith::factorial(b),
        );
    }
    r
}

fn ball_integral(p: &Poly) -> BigRational {
    p.terms.iter().map(|(e, c)| c * ball_moment(e)).sum()
}

/// Dirichlet pairing int_{B_1} grad p . grad q up to one positive constant depending on (m, h).
pub fn harmonic_gram(m: usize, h: u32, basis: &[HarmonicPolynomial]) -> Vec<Vec<BigRational>> {
    let n = basis.len();
    if h == 0 {
        // gradients vanish; use the L2 pairing on the ball for the constant
        return (0..n)
            .map(|i| (0..n).map(|j| ball_integral(&basis[i].poly.mul(&basis[j].poly))).collect())
            .collect();
    }
    let grads: Vec<Vec<Poly>> = basis.iter().map(|b| (0..m).map(|i| b.poly.partial(i)).collect()).collect();
    let mut g = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let mut s = Poly::zero(m);
            for k in 0..m {
                s = s.add(&grads[i][k].mul(&grads[j][k]));
            }
            let v = ball_integral(&s);
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    g
}

/// sum_i P_i(x) P_i(y) for a basis orthonormalized against `gram`, as a polynomial in 2m variables.
pub fn reproducing_kernel(m: usize, basis: &[HarmonicPolynomial], gram: &[Vec<BigRational>]) -> Result<Poly> {
    let inv = crate::intmat::inverse_q(gram).ok_or_else(|| Error::Invalid("harmonic Gram matrix is singular".into()))?;
    let xs: Vec<Poly> = basis.iter().map(|b| b.poly.embed(2 * m, 0)).collect();
    let ys: Vec<Poly> = basis.iter().map(|b| b.poly.embed(2 * m, m)).collect();
    let mut out = Poly::zero(2 * m);
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            if !inv[a][b].is_zero() {
                out = out.add(&xs[a].mul(&ys[b]).scale(&inv[a][b]));
            }
        }
    }
    Ok(out)
}

/// Finds c with p = c * q, checking every monomial.
pub fn proportionality(p: &Poly, q: &Poly) -> Option<BigRational> {
    let (e, qc) = q.terms.iter().next()?;
    let c = p.terms.get(e).cloned().unwrap_or_else(BigRational::zero) / qc;
    if p == &q.scale(&c) {
        Some(c)
    } else {
        None
    }
}

pub fn is_positive_definite(a: &[Vec<BigRational>]) -> bool {
    let n = a.len();
    (1..=n).all(|k| {
        let sub: Vec<Vec<BigRational>> = a[..k].iter().map(|r| r[..k].to_vec()).collect();
        det_q(&sub).is_positive()
    })
}

pub fn det_q(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            if !m[r][c].is_zero() {
                let f = &m[r][c] / &m[c][c];
                for k in c..n {
                    let t = &f * &m[c][k];
                    m[r][k] -= t;
                }
            }
        }
    }
    det
}
