//! Even positive-definite lattices and dual-vector enumeration.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{lcm, parse_rat};
use crate::error::{Error, Result};
use crate::fqm::{DualProjection, Fqm};
use crate::intmat::{self, IMat};
use crate::poly::{self, HarmonicPolynomial};

/// Even lattice given by its Gram matrix, optionally with a rational embedding in Q^m
/// (basis rows b_i with B B^T = G).
#[derive(Clone, Debug)]
pub struct EvenLattice {
    pub name: String,
    gram: IMat,
    det: i128,
    adj: IMat,
    embedding: Option<Vec<Vec<BigRational>>>,
    fqm: Arc<Fqm>,
    proj: DualProjection,
}

/// A dual vector in dual coordinates z (lambda = sum_i z_i b_i^*), with q(lambda).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DualVector {
    pub norm: BigRational,
    pub z: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<IMat>,
    /// Rational generator rows; when present the lattice is the Z-span of these rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<String>>>,
}

fn ri(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl EvenLattice {
    pub fn new(name: &str, gram: IMat) -> Result<Self> {
        let (fqm, proj) = Fqm::from_even_lattice(&gram)?;
        let g = intmat::to_rat(&gram);
        if !poly::is_positive_definite(&g) {
            return Err(Error::NotDefinite);
        }
        let det = intmat::det(&gram);
        let adj = intmat::adjugate(&gram);
        Ok(EvenLattice { name: name.to_string(), gram, det, adj, embedding: None, fqm: Arc::new(fqm), proj })
    }

    /// Attaches an embedding; the rows must reproduce the Gram matrix.
    pub fn with_embedding(mut self, rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let m = self.rank();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Invalid("embedding must be a square basis matrix".into()));
        }
        for i in 0..m {
            for j in 0..m {
                let ip: BigRational = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                if ip != ri(self.gram[i][j]) {
                    return Err(Error::Invalid("embedding does not reproduce the Gram matrix".into()));
                }
            }
        }
        self.embedding = Some(rows);
        Ok(self)
    }

    /// Lattice spanned by rational vectors of Q^m with the standard inner product.
    pub fn from_generators(name: &str, rows: &[Vec<BigRational>]) -> Result<Self> {
        let mut den = BigInt::one();
        for x in rows.iter().flatten() {
            den = num_integer::Integer::lcm(&den, x.denom());
        }
        let d = den.to_i64().ok_or_else(|| Error::TooLarge("generator denominators".into()))?;
        let int_rows: IMat = rows
            .iter()
            .map(|r| r.iter().map(|x| (x * ri(d)).to_integer().to_i64().unwrap()).collect())
            .collect();
        let basis = intmat::row_lattice_basis(&int_rows);
        let b: Vec<Vec<BigRational>> = basis.iter().map(|r| r.iter().map(|&x| BigRational::new(x.into(), d.into())).collect()).collect();
        let m = b.len();
        if m != rows.first().map_or(0, |r| r.len()) {
            return Err(Error::DegenerateLattice);
        }
        let mut gram = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in 0..m {
                let ip: BigRational = b[i].iter().zip(&b[j]).map(|(a, c)| a * c).sum();
                if !ip.is_integer() {
                    return Err(Error::Invalid("generators do not span an integral lattice".into()));
                }
                gram[i][j] = ip.to_integer().to_i64().unwrap();
            }
        }
        Self::new(name, gram)?.with_embedding(b)
    }

    pub fn from_json(j: &LatticeJson) -> Result<Self> {
        match (&j.gram, &j.generators) {
            (_, Some(gens)) => {
                let rows = gens
                    .iter()
                    .map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let l = Self::from_generators(&j.name, &rows)?;
                if let Some(g) = &j.gram {
                    if g != &l.gram {
                        return Err(Error::Parse("gram does not match the generators' basis".into()));
                    }
                }
                Ok(l)
            }
            (Some(g), None) => Self::new(&j.name, g.clone()),
            (None, None) => Err(Error::Parse("lattice needs \"gram\" or \"generators\"".into())),
        }
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson { name: self.name.clone(), gram: Some(self.gram.clone()), generators: None }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    pub fn det(&self) -> i128 {
        self.det
    }

    pub fn adjugate(&self) -> &IMat {
        &self.adj
    }

    pub fn embedding(&self) -> Option<&Vec<Vec<BigRational>>> {
        self.embedding.as_ref()
    }

    pub fn discriminant(&self) -> &Arc<Fqm> {
        &self.fqm
    }

    /// Coset of a dual vector in L'/L.
    pub fn coset(&self, z: &[i64]) -> usize {
        self.fqm.index(&self.proj.project(z))
    }

    /// z^T adj(G) z; q(lambda) = norm_num / (2 det).
    pub fn norm_num(&self, z: &[i64]) -> i128 {
        let m = self.rank();
        let mut s: i128 = 0;
        for i in 0..m {
            if z[i] == 0 {
                continue;
            }
            let mut t: i128 = 0;
            for j in 0..m {
                t += self.adj[i][j] as i128 * z[j] as i128;
            }
            s += t * z[i] as i128;
        }
        s
    }

    pub fn norm(&self, z: &[i64]) -> BigRational {
        BigRational::new(BigInt::from(self.norm_num(z)), BigInt::from(2 * self.det))
    }

    /// q(lambda) * N as an integer, N the level of L'/L.
    pub fn exponent_index(&self, z: &[i64]) -> i64 {
        let num = self.norm_num(z) * self.fqm.level() as i128;
        let den = 2 * self.det;
        debug_assert_eq!(num % den, 0);
        (num / den) as i64
    }

    /// Lattice coordinates x = G^{-1} z.
    pub fn lattice_coords(&self, z: &[i64]) -> Vec<BigRational> {
        let d = BigInt::from(self.det);
        (0..self.rank())
            .map(|i| {
                let s: i128 = (0..self.rank()).map(|j| self.adj[i][j] as i128 * z[j] as i128).sum();
                BigRational::new(BigInt::from(s), d.clone())
            })
            .collect()
    }

    /// Coordinates in which harmonic polynomials are evaluated: Euclidean if embedded,
    /// lattice coordinates otherwise.
    pub fn ambient_coords(&self, z: &[i64]) -> Vec<BigRational> {
        let x = self.lattice_coords(z);
        match &self.embedding {
            None => x,
            Some(b) => (0..self.rank()).map(|k| x.iter().zip(b).map(|(xi, row)| xi * &row[k]).sum()).collect(),
        }
    }

    /// Integer matrix W and scale s with ambient_coords(z) = (z^T W) / s.
    pub fn ambient_integer_map(&self) -> (Vec<Vec<i128>>, i128) {
        let m = self.rank();
        match &self.embedding {
            None => (self.adj.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect(), self.det),
            Some(b) => {
                let mut den = 1i64;
                for x in b.iter().flatten() {
                    den = lcm(den, x.denom().to_i64().unwrap());
                }
                // W = adj * B * den
                let w: Vec<Vec<i128>> = (0..m)
                    .map(|i| {
                        (0..m)
                            .map(|k| {
                                let s: BigRational = (0..m).map(|j| ri(self.adj[i][j]) * &b[j][k]).sum::<BigRational>() * ri(den);
                                s.to_integer().to_i128().unwrap()
                            })
                            .collect()
                    })
                    .collect();
                (w, self.det * den as i128)
            }
        }
    }

    /// Metric for the Laplacian in ambient coordinates (None = Euclidean).
    pub fn poly_metric(&self) -> Option<Vec<Vec<BigRational>>> {
        match &self.embedding {
            Some(_) => None,
            None => intmat::inverse_q(&intmat::to_rat(&self.gram)),
        }
    }

    /// Inner product matrix in ambient coordinates.
    pub fn ambient_gram(&self) -> Vec<Vec<BigRational>> {
        match &self.embedding {
            Some(_) => poly::identity_q(self.rank()),
            None => intmat::to_rat(&self.gram),
        }
    }

    pub fn harmonic_basis(&self, h: u32) -> Vec<HarmonicPolynomial> {
        let metric = self.poly_metric();
        poly::harmonic_basis_metric(self.rank(), h, metric.as_deref())
    }

    /// Zonal harmonic P_m^h(., y) for an ambient vector y.
    pub fn zonal_harmonic(&self, h: u32, y: &[BigRational]) -> Result<HarmonicPolynomial> {
        let g = self.ambient_gram();
        let p = poly::bivariate_harmonic(self.rank(), h, y, Some(&g));
        let metric = self.poly_metric();
        HarmonicPolynomial::new(p, h, metric.as_deref())
    }

    pub fn check_harmonic(&self, p: &HarmonicPolynomial) -> Result<()> {
        if p.m != self.rank() {
            return Err(Error::Invalid("polynomial has the wrong number of variables".into()));
        }
        let metric = self.poly_metric();
        HarmonicPolynomial::new(p.poly.clone(), p.h, metric.as_deref()).map(|_| ())
    }

    /// Orthogonal direct sum; embeddings are kept if both summands have one.
    pub fn direct_sum(&self, other: &EvenLattice) -> Result<EvenLattice> {
        let (a, b) = (self.rank(), other.rank());
        let n = a + b;
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..a {
            g[i][..a].copy_from_slice(&self.gram[i]);
        }
        for i in 0..b {
            g[a + i][a..].copy_from_slice(&other.gram[i]);
        }
        let l = EvenLattice::new(&format!("{}+{}", self.name, other.name), g)?;
        match (&self.embedding, &other.embedding) {
            (Some(e1), Some(e2)) => {
                let mut rows = vec![vec![BigRational::zero(); n]; n];
                for i in 0..a {
                    rows[i][..a].clone_from_slice(&e1[i]);
                }
                for i in 0..b {
                    rows[a + i][a..].clone_from_slice(&e2[i]);
                }
                l.with_embedding(rows)
            }
            _ => Ok(l),
        }
    }

    fn bound_test(&self, bound: &BigRational) -> Result<(i128, i128)> {
        if bound < &BigRational::zero() {
            return Err(Error::BadPrecision("negative norm bound".into()));
        }
        let a = bound.numer().to_i128().ok_or_else(|| Error::TooLarge("bound".into()))?;
        let b = bound.denom().to_i128().unwrap();
        Ok((b, 2 * self.det * a))
    }

    /// Cholesky-pruned depth-first enumeration of dual vectors with q <= bound.
    /// Calls f(z, norm_num) for each; the norm test is exact.
    pub fn for_each_dual_vector(&self, bound: &BigRational, mut f: impl FnMut(&[i64], i128)) -> Result<()> {
        let (bd, lim) = self.bound_test(bound)?;
        let m = self.rank();
        if m == 0 {
            f(&[], 0);
            return Ok(());
        }
        // quadratic form A = G^{-1} in z; q-form decomposition (Cohen 2.7.6)
        let det = self.det as f64;
        let a: Vec<Vec<f64>> = self.adj.iter().map(|r| r.iter().map(|&x| x as f64 / det).collect()).collect();
        let mut qm = a.clone();
        for i in 0..m {
            for j in i + 1..m {
                qm[j][i] = qm[i][j];
                qm[i][j] /= qm[i][i];
            }
            for k in i + 1..m {
                for l in k..m {
                    qm[k][l] -= qm[k][i] * qm[i][l];
                }
            }
        }
        let c = 2.0 * bound.to_f64().unwrap_or(f64::MAX);
        let eps = 1e-7 * (1.0 + c);
        let mut z = vec![0i64; m];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            i: usize,
            rem: f64,
            z: &mut Vec<i64>,
            qm: &[Vec<f64>],
            eps: f64,
            l: &EvenLattice,
            bd: i128,
            lim: i128,
            f: &mut dyn FnMut(&[i64], i128),
        ) {
            let m = z.len();
            let center: f64 = -(i + 1..m).map(|j| qm[i][j] * z[j] as f64).sum::<f64>();
            let r = ((rem.max(0.0) + eps) / qm[i][i]).sqrt();
            let lo = (center - r).ceil() as i64;
            let hi = (center + r).floor() as i64;
            for v in lo..=hi {
                z[i] = v;
                let d = v as f64 - center;
                let t = rem - qm[i][i] * d * d;
                if t < -eps {
                    continue;
                }
                if i == 0 {
                    let nn = l.norm_num(z);
                    if nn * bd <= lim {
                        f(z, nn);
                    }
                } else {
                    rec(i - 1, t, z, qm, eps, l, bd, lim, f);
                }
            }
            z[i] = 0;
        }
        rec(m - 1, c, &mut z, &qm, eps, self, bd, lim, &mut f);
        Ok(())
    }

    /// Independent enumerator: full coordinate box |z_i| <= sqrt(2 Q G_ii).
    pub fn for_each_dual_vector_box(&self, bound: &BigRational, mut f: impl FnMut(&[i64], i128)) -> Result<()> {
        let (bd, lim) = self.bound_test(bound)?;
        let m = self.rank();
        // |z_i| = |(lambda, b_i)| <= sqrt(2q(lambda) G_ii)
        let radii: Vec<i64> = (0..m)
            .map(|i| {
                let t = (2 * bound.numer().to_i128().unwrap() * self.gram[i][i] as i128) / bound.denom().to_i128().unwrap();
                let mut r = (t as f64).sqrt() as i64;
                while (r as i128 + 1) * (r as i128 + 1) <= t {
                    r += 1;
                }
                while r as i128 * r as i128 > t {
                    r -= 1;
                }
                r
            })
            .collect();
        let total: f64 = radii.iter().map(|&r| (2 * r + 1) as f64).product();
        if total > 5e7 {
            return Err(Error::TooLarge(format!("box enumeration of {total:.0} points")));
        }
        let mut z: Vec<i64> = radii.iter().map(|&r| -r).collect();
        // w = adj(G) z and nn = z^T w, updated along the odometer
        let adj = |i: usize, j: usize| self.adj[i][j] as i128;
        let mut w: Vec<i128> = (0..m).map(|i| (0..m).map(|j| adj(i, j) * z[j] as i128).sum()).collect();
        let mut nn = self.norm_num(&z);
        loop {
            if nn * bd <= lim {
                f(&z, nn);
            }
            let mut i = 0;
            loop {
                if i == m {
                    return Ok(());
                }
                let step: i64 = if z[i] < radii[i] { 1 } else { -2 * radii[i] };
                let t = step as i128;
                nn += 2 * t * w[i] + t * t * adj(i, i);
                for (j, wj) in w.iter_mut().enumerate() {
                    *wj += t * adj(j, i);
                }
                z[i] += step;
                if step == 1 {
                    break;
                }
                i += 1;
            }
        }
    }

    fn collect(&self, bound: &BigRational, use_box: bool) -> Result<BTreeMap<usize, Vec<DualVector>>> {
        let mut out: BTreeMap<usize, Vec<DualVector>> = BTreeMap::new();
        let two_det = BigInt::from(2 * self.det);
        let mut push = |z: &[i64], nn: i128| {
            out.entry(self.coset(z))
                .or_default()
                .push(DualVector { norm: BigRational::new(BigInt::from(nn), two_det.clone()), z: z.to_vec() });
        };
        if use_box {
            self.for_each_dual_vector_box(bound, &mut push)?;
        } else {
            self.for_each_dual_vector(bound, &mut push)?;
        }
        for v in out.values_mut() {
            v.sort();
        }
        Ok(out)
    }

    /// Dual vectors with q <= bound grouped by coset, each list sorted by (norm, z).
    pub fn enumerate_dual_by_norm(&self, bound: &BigRational) -> Result<BTreeMap<usize, Vec<DualVector>>> {
        self.collect(bound, false)
    }

    pub fn enumerate_dual_by_norm_box(&self, bound: &BigRational) -> Result<BTreeMap<usize, Vec<DualVector>>> {
        self.collect(bound, true)
    }
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Named lattices used throughout the tests and fixtures.
pub mod named {
    use super::*;

    pub fn a1() -> EvenLattice {
        EvenLattice::new("A1", vec![vec![2]]).unwrap()
    }

    pub fn a2() -> EvenLattice {
        EvenLattice::new("A2", vec![vec![2, 1], vec![1, 2]]).unwrap()
    }

    /// A_n in the standard Cartan basis.
    pub fn a_n(n: usize) -> EvenLattice {
        let g: IMat = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect())
            .collect();
        EvenLattice::new(&format!("A{n}"), g).unwrap()
    }

    /// D_n as {x in Z^n : sum x even} with its standard embedding.
    pub fn d_n(n: usize) -> EvenLattice {
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for i in 0..n - 1 {
            let mut r = vec![BigRational::zero(); n];
            r[i] = ri(1);
            r[i + 1] = ri(-1);
            rows.push(r);
        }
        let mut r = vec![BigRational::zero(); n];
        r[n - 2] = ri(1);
        r[n - 1] = ri(1);
        rows.push(r);
        EvenLattice::from_generators(&format!("D{n}"), &rows).unwrap()
    }

    /// D_n^+ = D_n + (1/2,...,1/2) for n divisible by 8.
    pub fn d_n_plus(n: usize) -> EvenLattice {
        assert!(n % 8 == 0);
        let base = d_n(n);
        let mut rows = base.embedding().unwrap().clone();
        rows.push(vec![half(); n]);
        let name = if n == 8 { "E8".to_string() } else { format!("D{n}+") };
        EvenLattice::from_generators(&name, &rows).unwrap()
    }

    pub fn e8() -> EvenLattice {
        d_n_plus(8)
    }

    /// Hyperbolic-free scaled lattice: diagonal 2a_i.
    pub fn diagonal(entries: &[i64]) -> EvenLattice {
        let n = entries.len();
        let g: IMat = (0..n).map(|i| (0..n).map(|j| if i == j { 2 * entries[i] } else { 0 }).collect()).collect();
        EvenLattice::new(&format!("diag{entries:?}"), g).unwrap()
    }
}
