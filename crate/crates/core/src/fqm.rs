//! Finite quadratic modules (discriminant forms).

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, fmt_rat, gcd, lcm, parse_rat};
use crate::cyclotomic::{CycAcc, CycInt};
use crate::error::{Error, Result};
use crate::intmat::{self, IMat};

const TABLE_LIMIT: usize = 1 << 22;

/// Enumeration cap for subgroup and isometry searches; `WEILBASIS_MAX_ENUM` overrides it.
pub fn enum_cap() -> usize {
    std::env::var("WEILBASIS_MAX_ENUM")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FqmElement {
    pub coords: Vec<i64>,
}

impl FqmElement {
    pub fn new(coords: Vec<i64>) -> Self {
        FqmElement { coords }
    }
}

/// A finite abelian group with a non-degenerate Q/Z-valued quadratic form.
///
/// Values are stored as integers over the level `n`: q(e_i) = q_num[i]/n and
/// (e_i, e_j) = b_num[i][j]/n, both mod 1.
#[derive(Clone)]
pub struct FiniteQuadraticModule {
    orders: Vec<i64>,
    n: i64,
    q_num: Vec<i64>,
    b_num: Vec<Vec<i64>>,
    size: usize,
    strides: Vec<usize>,
    coords_tab: Vec<i64>,
    q_tab: Vec<u32>,
}

pub type Fqm = FiniteQuadraticModule;

impl PartialEq for FiniteQuadraticModule {
    fn eq(&self, o: &Self) -> bool {
        self.orders == o.orders && self.n == o.n && self.q_num == o.q_num && self.b_num == o.b_num
    }
}

impl Eq for FiniteQuadraticModule {}

impl fmt::Debug for FiniteQuadraticModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fqm(orders={:?}, q={:?}/{}, b={:?}/{})", self.orders, self.q_num, self.n, self.b_num, self.n)
    }
}

fn frac_num(r: &BigRational, n: i64) -> i64 {
    // r mod 1 written over n
    let v = r * BigRational::from_integer(BigInt::from(n));
    assert!(v.is_integer(), "denominator does not divide level");
    v.to_integer().to_i64().unwrap().rem_euclid(n)
}

fn den_i64(r: &BigRational) -> i64 {
    r.denom().to_i64().expect("denominator fits i64")
}

/// Result of presenting a group Z^k / R with quadratic data in Smith form.
pub struct Presentation {
    pub module: Fqm,
    /// k x r: old coefficient row vector times `to_new` gives new coordinates.
    pub to_new: IMat,
    /// r x k: new generators in old coefficients.
    pub new_gens: IMat,
}

impl FiniteQuadraticModule {
    /// Builds a module from generator orders and rational quadratic data (values mod 1).
    pub fn new(orders: Vec<i64>, gram: Vec<Vec<BigRational>>, q: Vec<BigRational>) -> Result<Fqm> {
        let r = orders.len();
        if gram.len() != r || q.len() != r || gram.iter().any(|row| row.len() != r) {
            return Err(Error::Invalid("fqm data has inconsistent dimensions".into()));
        }
        if orders.iter().any(|&d| d < 2) {
            return Err(Error::Invalid("generator orders must be at least 2".into()));
        }
        for i in 0..r {
            for j in 0..r {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::DegenerateForm("bilinear form not symmetric".into()));
                }
            }
        }
        let mut n = 1i64;
        for x in q.iter().chain(gram.iter().flatten()) {
            n = lcm(n, den_i64(x));
        }
        let q_num: Vec<i64> = q.iter().map(|x| frac_num(x, n)).collect();
        let b_num: Vec<Vec<i64>> = gram.iter().map(|row| row.iter().map(|x| frac_num(x, n)).collect()).collect();
        Self::from_nums(orders, n, q_num, b_num)
    }

    fn from_nums(orders: Vec<i64>, n: i64, q_num: Vec<i64>, b_num: Vec<Vec<i64>>) -> Result<Fqm> {
        let r = orders.len();
        for i in 0..r {
            if (2 * q_num[i] - b_num[i][i]).rem_euclid(n) != 0 {
                return Err(Error::DegenerateForm(format!("2q(e_{i}) != (e_{i},e_{i})")));
            }
            if (orders[i] * orders[i] * q_num[i]).rem_euclid(n) != 0 {
                return Err(Error::DegenerateForm(format!("q not well defined on generator {i}")));
            }
            for j in 0..r {
                if (orders[i] * b_num[i][j]).rem_euclid(n) != 0 {
                    return Err(Error::DegenerateForm(format!("bilinear form not well defined at ({i},{j})")));
                }
            }
        }
        let size = orders.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d as usize));
        let size = match size {
            Some(s) if s <= TABLE_LIMIT => s,
            _ => return Err(Error::TooLarge(format!("module of order {:?}", orders))),
        };
        let mut strides = vec![1usize; r];
        for i in (0..r.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1] as usize;
        }
        let mut m = FiniteQuadraticModule {
            orders,
            n,
            q_num,
            b_num,
            size,
            strides,
            coords_tab: Vec::new(),
            q_tab: Vec::new(),
        };
        let mut coords_tab = Vec::with_capacity(size * r);
        let mut q_tab = Vec::with_capacity(size);
        for idx in 0..size {
            let c: Vec<i64> = (0..r).map(|i| (idx / m.strides[i]) as i64 % m.orders[i]).collect();
            q_tab.push(m.q_of_coords(&c) as u32);
            coords_tab.extend(c);
        }
        m.coords_tab = coords_tab;
        m.q_tab = q_tab;
        m.normalize_level();
        if !m.is_nondegenerate() {
            return Err(Error::DegenerateForm("bilinear form has a nontrivial radical".into()));
        }
        Ok(m)
    }

    /// Reduces the common denominator to the actual level.
    fn normalize_level(&mut self) {
        let mut g = self.n;
        for &x in self.q_num.iter().chain(self.b_num.iter().flatten()) {
            g = gcd(g, x);
        }
        if g > 1 {
            self.n /= g;
            for x in self.q_num.iter_mut() {
                *x /= g;
            }
            for x in self.b_num.iter_mut().flatten() {
                *x /= g;
            }
            for x in self.q_tab.iter_mut() {
                *x /= g as u32;
            }
        }
    }

    pub fn trivial() -> Fqm {
        Self::from_nums(vec![], 1, vec![], vec![]).unwrap()
    }

    /// Presents Z^k / (row lattice of `relations`) with quadratic data on the k generators.
    pub fn from_presentation(
        k: usize,
        relations: &IMat,
        q: &[BigRational],
        gram: &[Vec<BigRational>],
    ) -> Result<Presentation> {
        if k == 0 {
            return Ok(Presentation { module: Self::trivial(), to_new: vec![], new_gens: vec![] });
        }
        let (_, d, v) = intmat::smith(relations);
        let diag: Vec<i64> = (0..k).map(|i| if i < relations.len() { d[i][i] } else { 0 }).collect();
        if diag.iter().any(|&x| x == 0) {
            return Err(Error::Invalid("presentation defines an infinite group".into()));
        }
        let vinv = intmat::inverse_unimodular(&v);
        let keep: Vec<usize> = (0..k).filter(|&i| diag[i] > 1).collect();
        let orders: Vec<i64> = keep.iter().map(|&i| diag[i]).collect();
        let new_gens: IMat = keep.iter().map(|&i| vinv[i].clone()).collect();
        let to_new: IMat = (0..k).map(|row| keep.iter().map(|&i| v[row][i]).collect()).collect();
        let ri = |x: i64| BigRational::from_integer(BigInt::from(x));
        let bil = |a: &[i64], b: &[i64]| {
            let mut s = BigRational::zero();
            for j in 0..k {
                for l in 0..k {
                    if a[j] != 0 && b[l] != 0 {
                        s += &gram[j][l] * ri(a[j] * b[l]);
                    }
                }
            }
            s
        };
        let quad = |a: &[i64]| {
            let mut s = BigRational::zero();
            for j in 0..k {
                s += &q[j] * ri(a[j] * a[j]);
                for l in j + 1..k {
                    s += &gram[j][l] * ri(a[j] * a[l]);
                }
            }
            s
        };
        let qs: Vec<BigRational> = new_gens.iter().map(|g| arith::frac(&quad(g))).collect();
        let gs: Vec<Vec<BigRational>> = new_gens
            .iter()
            .map(|a| new_gens.iter().map(|b| arith::frac(&bil(a, b))).collect())
            .collect();
        let module = if orders.is_empty() { Self::trivial() } else { Self::new(orders, gs, qs)? };
        Ok(Presentation { module, to_new, new_gens })
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn level(&self) -> i64 {
        self.n
    }

    /// Order M = lcm(8, N) of the cyclotomic field carrying the Weil representation.
    pub fn cyc_order(&self) -> u32 {
        lcm(8, self.n) as u32
    }

    pub fn q_num_gen(&self) -> &[i64] {
        &self.q_num
    }

    pub fn b_num_gen(&self) -> &[Vec<i64>] {
        &self.b_num
    }

    pub fn coords(&self, idx: usize) -> &[i64] {
        let r = self.rank();
        &self.coords_tab[idx * r..(idx + 1) * r]
    }

    pub fn element(&self, idx: usize) -> FqmElement {
        FqmElement::new(self.coords(idx).to_vec())
    }

    pub fn index(&self, coords: &[i64]) -> usize {
        assert_eq!(coords.len(), self.rank(), "element has wrong number of coordinates");
        coords
            .iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((&c, &d), &s)| c.rem_euclid(d) as usize * s)
            .sum()
    }

    pub fn index_of(&self, e: &FqmElement) -> usize {
        self.index(&e.coords)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let c: Vec<i64> = self.coords(a).iter().zip(self.coords(b)).map(|(x, y)| x + y).collect();
        self.index(&c)
    }

    pub fn neg(&self, a: usize) -> usize {
        let c: Vec<i64> = self.coords(a).iter().map(|x| -x).collect();
        self.index(&c)
    }

    pub fn scale(&self, a: usize, k: i64) -> usize {
        let c: Vec<i64> = self.coords(a).iter().map(|x| x * k).collect();
        self.index(&c)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    fn q_of_coords(&self, c: &[i64]) -> i64 {
        let r = self.rank();
        let n = self.n as i128;
        let mut s: i128 = 0;
        for i in 0..r {
            s += (c[i] as i128 * c[i] as i128 % n) * self.q_num[i] as i128;
            for j in i + 1..r {
                s += (c[i] as i128 * c[j] as i128 % n) * self.b_num[i][j] as i128;
            }
            s %= n;
        }
        s.rem_euclid(n) as i64
    }

    /// q(x) as an integer numerator over the level.
    pub fn q_num(&self, idx: usize) -> i64 {
        self.q_tab[idx] as i64
    }

    pub fn q(&self, idx: usize) -> BigRational {
        BigRational::new(BigInt::from(self.q_num(idx)), BigInt::from(self.n))
    }

    /// (x, y) as an integer numerator over the level.
    pub fn b_num(&self, a: usize, b: usize) -> i64 {
        let (x, y) = (self.coords(a), self.coords(b));
        let r = self.rank();
        let n = self.n as i128;
        let mut s: i128 = 0;
        for i in 0..r {
            if x[i] == 0 {
                continue;
            }
            for j in 0..r {
                s += (x[i] as i128 * y[j] as i128 % n) * self.b_num[i][j] as i128;
            }
            s %= n;
        }
        s.rem_euclid(n) as i64
    }

    pub fn bil(&self, a: usize, b: usize) -> BigRational {
        BigRational::new(BigInt::from(self.b_num(a, b)), BigInt::from(self.n))
    }

    pub fn element_order(&self, idx: usize) -> i64 {
        self.coords(idx)
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&c, &d)| lcm(acc, d / gcd(c, d)))
    }

    pub fn exponent(&self) -> i64 {
        self.orders.last().copied().unwrap_or(1)
    }

    pub fn is_nondegenerate(&self) -> bool {
        (1..self.size).all(|x| (0..self.rank()).any(|i| {
            let gi = self.gen_index(i);
            self.b_num(x, gi) != 0
        }))
    }

    pub fn gen_index(&self, i: usize) -> usize {
        self.strides[i]
    }

    /// Gauss sum sum_x e(q(x)) in Z[zeta_N].
    pub fn gauss_sum(&self) -> CycInt {
        let mut acc = CycAcc::new(self.n as u32);
        for x in self.elements() {
            acc.add_root(1, self.q_num(x));
        }
        acc.finish()
    }

    /// Signature mod 8 from Milgram's formula.
    pub fn signature(&self) -> Result<i64> {
        let g = self.gauss_sum();
        let root = sqrt_int(self.size as u64);
        for s in 0..8 {
            let rhs = &CycInt::root(8, s) * &root;
            if g == rhs {
                return Ok(s);
            }
        }
        Err(Error::DegenerateForm("Gauss sum has the wrong absolute value".into()))
    }

    pub fn require_even_signature(&self) -> Result<i64> {
        let s = self.signature()?;
        if s % 2 != 0 {
            return Err(Error::OddSignature(s));
        }
        Ok(s)
    }

    pub fn p_rank(&self, p: i64) -> usize {
        self.orders.iter().filter(|&&d| d % p == 0).count()
    }

    /// CRT idempotent projecting onto the p-part.
    fn p_idempotent(&self, p: i64) -> i64 {
        let e = self.exponent();
        let mut pa = 1;
        while e % (pa * p) == 0 {
            pa *= p;
        }
        let rest = e / pa;
        if pa == 1 {
            return 0;
        }
        if rest == 1 {
            return 1;
        }
        // u = rest * (rest^-1 mod pa)
        let inv = arith::mod_inv(rest, pa).expect("coprime");
        (rest * inv).rem_euclid(e)
    }

    /// p-adic component of an element.
    pub fn p_part(&self, idx: usize, p: i64) -> usize {
        self.scale(idx, self.p_idempotent(p))
    }

    /// The p-part D_{p^nu} as a module with its embedding into D.
    pub fn p_component(&self, p: i64) -> Result<(Fqm, Vec<usize>)> {
        let elems: Vec<usize> = self.elements().filter(|&x| self.p_part(x, p) == x).collect();
        self.subgroup_module(&elems)
    }

    /// Module structure on a subgroup given by its full element list, plus embedding table.
    pub fn subgroup_module(&self, elems: &[usize]) -> Result<(Fqm, Vec<usize>)> {
        let sg = Subgroup::generate(self, elems);
        let pres = self.presentation_of(&sg.gens, &[])?;
        let module = pres.module;
        let mut emb = vec![0usize; module.size()];
        for y in module.elements() {
            let c = module.coords(y);
            let mut acc = 0usize;
            for (i, &ci) in c.iter().enumerate() {
                let img = self.lin_comb(&sg.gens, &pres.new_gens[i]);
                acc = self.add(acc, self.scale(img, ci));
            }
            emb[y] = acc;
        }
        Ok((module, emb))
    }

    fn lin_comb(&self, gens: &[usize], coeffs: &[i64]) -> usize {
        gens.iter().zip(coeffs).fold(0, |acc, (&g, &c)| self.add(acc, self.scale(g, c)))
    }

    /// Presentation of <gens> / <killed> with the induced quadratic data.
    fn presentation_of(&self, gens: &[usize], killed: &[usize]) -> Result<Presentation> {
        let k = gens.len();
        let r = self.rank();
        // kernel of [gens | killed | diag(orders)]
        let cols: Vec<Vec<i64>> = gens
            .iter()
            .chain(killed)
            .map(|&g| self.coords(g).to_vec())
            .chain((0..r).map(|i| (0..r).map(|j| if i == j { self.orders[i] } else { 0 }).collect()))
            .collect();
        let total = cols.len();
        let a: IMat = (0..r).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        let ker = if r == 0 { intmat::identity(total) } else { intmat::kernel(&a, total) };
        let relations: IMat = ker.iter().map(|row| row[..k].to_vec()).collect();
        let relations = if relations.is_empty() { vec![vec![0; k]] } else { relations };
        let q: Vec<BigRational> = gens.iter().map(|&g| self.q(g)).collect();
        let gram: Vec<Vec<BigRational>> = gens.iter().map(|&a| gens.iter().map(|&b| self.bil(a, b)).collect()).collect();
        Self::from_presentation(k, &relations, &q, &gram)
    }

    /// D_c, D^c and D^{c*}.
    pub fn torsion_sets(&self, c: i64) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let dc: Vec<usize> = self.elements().filter(|&x| self.scale(x, c) == 0).collect();
        let mut img: Vec<usize> = self.elements().map(|x| self.scale(x, c)).collect();
        img.sort_unstable();
        img.dedup();
        let n = self.n;
        let dcs: Vec<usize> = self
            .elements()
            .filter(|&g| dc.iter().all(|&a| (c * self.q_num(a) + self.b_num(a, g)).rem_euclid(n) == 0))
            .collect();
        (dc, img, dcs)
    }

    /// The representative x_c in D^{c*} with 2 x_c = 0, first in lexicographic order.
    pub fn x_c(&self, c: i64) -> Result<usize> {
        let (_, _, dcs) = self.torsion_sets(c);
        dcs.into_iter()
            .find(|&x| self.scale(x, 2) == 0)
            .ok_or(Error::CanonicalRepUnavailable(c))
    }

    /// q_c on D^{c*}, as numerators over the level; checked for well-definedness.
    pub fn q_c(&self, c: i64, gamma: usize) -> Result<BigRational> {
        let xc = self.x_c(c)?;
        let mut val: Option<i64> = None;
        for mu in self.elements() {
            if self.add(xc, self.scale(mu, c)) != gamma {
                continue;
            }
            let v = (c * self.q_num(mu) + self.b_num(xc, mu)).rem_euclid(self.n);
            match val {
                None => val = Some(v),
                Some(w) if w != v => return Err(Error::CanonicalRepUnavailable(c)),
                _ => {}
            }
        }
        let v = val.ok_or_else(|| Error::Invalid("element not in D^{c*}".into()))?;
        Ok(BigRational::new(BigInt::from(v), BigInt::from(self.n)))
    }

    /// Gauss-sum argument of the 2-component, in eighths.
    pub fn oddity(&self) -> Result<i64> {
        if self.size % 2 != 0 {
            return Ok(0);
        }
        let (d2, _) = self.p_component(2)?;
        d2.signature()
    }

    /// chi_D(l) = (l | |D|) e((l-1) oddity / 4).
    pub fn chi(&self, l: i64) -> Result<CycInt> {
        if gcd(l, self.n) != 1 {
            return Err(Error::NotCoprime(l, self.n));
        }
        let j = arith::kronecker(l, self.size as i64);
        let o = self.oddity()?;
        Ok(CycInt::root(4, (l - 1) * o).scale(&(j as i128)))
    }

    pub fn is_isotropic_set(&self, elems: &[usize]) -> bool {
        elems.iter().all(|&x| self.q_num(x) == 0)
    }

    /// All isotropic subgroups, by breadth-first extension.
    pub fn isotropic_subgroups(self: &Arc<Self>) -> Result<Vec<IsotropicSubgroup>> {
        if self.size > enum_cap() {
            return Err(Error::TooLarge(format!("|D| = {} exceeds the enumeration cap", self.size)));
        }
        let iso: Vec<usize> = self.elements().filter(|&x| x != 0 && self.q_num(x) == 0).collect();
        let start = Subgroup::generate(self, &[]);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        seen.insert(start.elements.clone());
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        while let Some(h) = queue.pop_front() {
            for &x in &iso {
                if h.contains(x) || h.gens.iter().any(|&g| self.b_num(x, g) != 0) {
                    continue;
                }
                let ext = h.extend(self, x);
                if seen.insert(ext.elements.clone()) {
                    queue.push_back(ext);
                }
            }
            out.push(IsotropicSubgroup::from_subgroup(self.clone(), h));
            if out.len() > enum_cap() {
                return Err(Error::TooLarge("too many isotropic subgroups".into()));
            }
        }
        out.sort_by(|a, b| (a.elements.len(), &a.elements).cmp(&(b.elements.len(), &b.elements)));
        Ok(out)
    }

    /// H^perp / H with the projection from D (None outside H^perp).
    pub fn quotient(&self, h: &IsotropicSubgroup) -> Result<Quotient> {
        if !self.is_isotropic_set(&h.elements) {
            return Err(Error::NotIsotropic);
        }
        let perp: Vec<usize> = self
            .elements()
            .filter(|&x| h.gens.iter().all(|&g| self.b_num(x, g) == 0))
            .collect();
        let sg = Subgroup::generate(self, &perp);
        let pres = self.presentation_of(&sg.gens, &h.gens)?;
        let module = pres.module;
        let mut proj = vec![None; self.size];
        for (&x, coeffs) in sg.elements.iter().zip(&sg.coeffs) {
            let c: Vec<i64> = (0..module.rank())
                .map(|j| coeffs.iter().zip(&pres.to_new).map(|(a, row)| a * row[j]).sum())
                .collect();
            proj[x] = Some(module.index(&c));
        }
        Ok(Quotient { module: Arc::new(module), proj })
    }

    /// (Z/n)^2 with q(gamma) = q(mu) = 0 and (gamma, mu) = 1/n.
    pub fn hyperbolic(n: i64) -> Fqm {
        assert!(n >= 1);
        if n == 1 {
            return Self::trivial();
        }
        let z = BigRational::zero();
        let b = BigRational::new(BigInt::one(), BigInt::from(n));
        Self::new(vec![n, n], vec![vec![z.clone(), b.clone()], vec![b, z.clone()]], vec![z.clone(), z]).unwrap()
    }

    /// Orthogonal direct sum, with embeddings of both summands.
    pub fn direct_sum(a: &Fqm, b: &Fqm) -> DirectSum {
        let (ra, rb) = (a.rank(), b.rank());
        let k = ra + rb;
        let orders: Vec<i64> = a.orders.iter().chain(&b.orders).copied().collect();
        let relations: IMat = (0..k).map(|i| (0..k).map(|j| if i == j { orders[i] } else { 0 }).collect()).collect();
        let q: Vec<BigRational> = (0..ra)
            .map(|i| a.q(a.gen_index(i)))
            .chain((0..rb).map(|i| b.q(b.gen_index(i))))
            .collect();
        let gram: Vec<Vec<BigRational>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i < ra && j < ra {
                            a.bil(a.gen_index(i), a.gen_index(j))
                        } else if i >= ra && j >= ra {
                            b.bil(b.gen_index(i - ra), b.gen_index(j - ra))
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let pres = Self::from_presentation(k, &relations, &q, &gram).expect("direct sum of valid modules");
        let m = pres.module;
        let embed = |src: &Fqm, offset: usize| -> Vec<usize> {
            src.elements()
                .map(|x| {
                    let c: Vec<i64> = (0..m.rank())
                        .map(|j| src.coords(x).iter().enumerate().map(|(i, &ci)| ci * pres.to_new[offset + i][j]).sum())
                        .collect();
                    m.index(&c)
                })
                .collect()
        };
        let ea = embed(a, 0);
        let eb = embed(b, ra);
        DirectSum { module: m, embed_a: ea, embed_b: eb }
    }

    /// All isometries self -> other.
    pub fn isometries(self: &Arc<Self>, other: &Arc<Fqm>) -> Result<Vec<FqmIsometry>> {
        if self.size > enum_cap() || other.size > enum_cap() {
            return Err(Error::TooLarge("isometry search exceeds the enumeration cap".into()));
        }
        if self.size != other.size {
            return Ok(vec![]);
        }
        let r = self.rank();
        let gens: Vec<usize> = (0..r).map(|i| self.gen_index(i)).collect();
        let qs: Vec<BigRational> = gens.iter().map(|&g| self.q(g)).collect();
        let cands: Vec<Vec<usize>> = gens
            .iter()
            .zip(&qs)
            .zip(&self.orders)
            .map(|((_, qv), &d)| {
                other.elements().filter(|&y| other.scale(y, d) == 0 && other.q(y) == *qv).collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(r);
        self.iso_search(other, &gens, &cands, &mut chosen, &mut out);
        Ok(out)
    }

    fn iso_search(
        self: &Arc<Self>,
        other: &Arc<Fqm>,
        gens: &[usize],
        cands: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        out: &mut Vec<FqmIsometry>,
    ) {
        let i = chosen.len();
        if i == gens.len() {
            if let Some(iso) = FqmIsometry::from_images(self.clone(), other.clone(), chosen) {
                out.push(iso);
            }
            return;
        }
        for &y in &cands[i] {
            let ok = (0..i).all(|j| other.bil(y, chosen[j]) == self.bil(gens[i], gens[j]));
            if ok {
                chosen.push(y);
                self.iso_search(other, gens, cands, chosen, out);
                chosen.pop();
            }
        }
    }

    pub fn orthogonal_group(self: &Arc<Self>) -> Result<Vec<FqmIsometry>> {
        self.isometries(self)
    }

    /// Discriminant module of an even lattice and the projection from dual coordinates.
    pub fn from_even_lattice(gram: &IMat) -> Result<(Fqm, DualProjection)> {
        let m = gram.len();
        if gram.iter().any(|r| r.len() != m) {
            return Err(Error::Invalid("Gram matrix is not square".into()));
        }
        for i in 0..m {
            for j in 0..m {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Invalid("Gram matrix is not symmetric".into()));
                }
            }
            if gram[i][i] % 2 != 0 {
                return Err(Error::NotEven);
            }
        }
        if intmat::det(gram) == 0 {
            return Err(Error::DegenerateLattice);
        }
        let ginv = intmat::inverse_q(&intmat::to_rat(gram)).ok_or(Error::DegenerateLattice)?;
        let q: Vec<BigRational> = (0..m).map(|i| &ginv[i][i] / BigRational::from_integer(2.into())).collect();
        let pres = Self::from_presentation(m, gram, &q, &ginv)?;
        let rows: IMat = (0..pres.module.rank()).map(|j| (0..m).map(|i| pres.to_new[i][j]).collect()).collect();
        let moduli = pres.module.orders().to_vec();
        Ok((pres.module, DualProjection { rows, moduli }))
    }

    pub fn to_json(&self) -> FqmJson {
        let r = self.rank();
        FqmJson {
            orders: self.orders.clone(),
            gram: (0..r)
                .map(|i| (0..r).map(|j| fmt_rat(&self.bil(self.gen_index(i), self.gen_index(j)))).collect())
                .collect(),
            q: (0..r).map(|i| fmt_rat(&self.q(self.gen_index(i)))).collect(),
        }
    }

    pub fn from_json(j: &FqmJson) -> Result<Fqm> {
        if j.orders.is_empty() {
            return Ok(Self::trivial());
        }
        let gram = j.gram.iter().map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        let q = j.q.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
        let r = j.orders.len();
        let orders_chain = j.orders.windows(2).all(|w| w[1] % w[0] == 0);
        if orders_chain {
            return Self::new(j.orders.clone(), gram, q);
        }
        let relations: IMat = (0..r).map(|i| (0..r).map(|k| if i == k { j.orders[i] } else { 0 }).collect()).collect();
        Ok(Self::from_presentation(r, &relations, &q, &gram)?.module)
    }
}

/// sqrt(n) in Z[zeta_M] via quadratic Gauss sums, M = lcm(8, 4 * squarefree part).
pub fn sqrt_int(n: u64) -> CycInt {
    let mut sq = 1i128;
    let mut out = CycInt::one(1);
    for (p, e) in arith::factorize(n) {
        sq *= (p as i128).pow(e / 2);
        if e % 2 == 1 {
            out = &out * &sqrt_prime(p);
        }
    }
    out.scale(&sq)
}

fn sqrt_prime(p: u64) -> CycInt {
    if p == 2 {
        return CycInt::root(8, 1) + CycInt::root(8, -1);
    }
    let pi = p as i64;
    let mut acc = CycAcc::new(p as u32);
    for x in 0..pi {
        acc.add_root(1, x * x);
    }
    let g = acc.finish();
    if p % 4 == 1 {
        g
    } else {
        // g = i sqrt(p)
        &g * &CycInt::root(4, -1)
    }
}

/// Map from dual coordinates z (lambda = G^-1 z) to discriminant coordinates.
#[derive(Clone, Debug)]
pub struct DualProjection {
    pub rows: IMat,
    pub moduli: Vec<i64>,
}

impl DualProjection {
    pub fn project(&self, z: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .zip(&self.moduli)
            .map(|(r, &d)| r.iter().zip(z).map(|(a, b)| a * b).sum::<i64>().rem_euclid(d))
            .collect()
    }
}

pub struct DirectSum {
    pub module: Fqm,
    pub embed_a: Vec<usize>,
    pub embed_b: Vec<usize>,
}

pub struct Quotient {
    pub module: Arc<Fqm>,
    /// For each element of D, its class in H^perp/H, or None outside H^perp.
    pub proj: Vec<Option<usize>>,
}

/// A subgroup with a small generating set and coefficient vectors of its elements.
#[derive(Clone, Debug)]
struct Subgroup {
    gens: Vec<usize>,
    elements: Vec<usize>,
    coeffs: Vec<Vec<i64>>,
    member: HashSet<usize>,
}

impl Subgroup {
    /// Greedy generating set for the subgroup generated by `elems`.
    fn generate(d: &Fqm, elems: &[usize]) -> Subgroup {
        let mut sg = Subgroup { gens: vec![], elements: vec![0], coeffs: vec![vec![]], member: HashSet::from([0]) };
        for &x in elems {
            if !sg.contains(x) {
                sg = sg.extend(d, x);
            }
        }
        sg
    }

    fn contains(&self, x: usize) -> bool {
        self.member.contains(&x)
    }

    fn extend(&self, d: &Fqm, x: usize) -> Subgroup {
        let mut gens = self.gens.clone();
        gens.push(x);
        let mut elements = Vec::new();
        let mut coeffs = Vec::new();
        let mut member = HashSet::new();
        let ord = d.element_order(x);
        for j in 0..ord {
            let t = d.scale(x, j);
            for (e, c) in self.elements.iter().zip(&self.coeffs) {
                let y = d.add(*e, t);
                if member.insert(y) {
                    elements.push(y);
                    let mut cc = c.clone();
                    cc.push(j);
                    coeffs.push(cc);
                }
            }
        }
        let mut idx: Vec<usize> = (0..elements.len()).collect();
        idx.sort_by_key(|&i| elements[i]);
        Subgroup {
            gens,
            elements: idx.iter().map(|&i| elements[i]).collect(),
            coeffs: idx.iter().map(|&i| coeffs[i].clone()).collect(),
            member,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IsotropicSubgroup {
    pub parent: Arc<Fqm>,
    pub gens: Vec<usize>,
    pub elements: Vec<usize>,
}

impl IsotropicSubgroup {
    fn from_subgroup(parent: Arc<Fqm>, s: Subgroup) -> Self {
        IsotropicSubgroup { parent, gens: s.gens, elements: s.elements }
    }

    /// Subgroup generated by the given elements; fails unless isotropic.
    pub fn generated_by(parent: Arc<Fqm>, gens: &[usize]) -> Result<Self> {
        let s = Subgroup::generate(&parent, gens);
        if !parent.is_isotropic_set(&s.elements) {
            return Err(Error::NotIsotropic);
        }
        Ok(Self::from_subgroup(parent, s))
    }

    pub fn trivial(parent: Arc<Fqm>) -> Self {
        IsotropicSubgroup { parent, gens: vec![], elements: vec![0] }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> Vec<FqmElement> {
        self.gens.iter().map(|&g| self.parent.element(g)).collect()
    }
}

/// A q-preserving group isomorphism, stored as a full element table.
#[derive(Clone, Debug)]
pub struct FqmIsometry {
    pub domain: Arc<Fqm>,
    pub codomain: Arc<Fqm>,
    pub images: Vec<FqmElement>,
    table: Vec<usize>,
}

impl FqmIsometry {
    /// Builds the map from generator images; None unless it is a q-preserving bijection.
    pub fn from_images(domain: Arc<Fqm>, codomain: Arc<Fqm>, imgs: &[usize]) -> Option<Self> {
        if domain.size() != codomain.size() || imgs.len() != domain.rank() {
            return None;
        }
        for (i, &y) in imgs.iter().enumerate() {
            if codomain.scale(y, domain.orders()[i]) != 0 {
                return None;
            }
        }
        let table: Vec<usize> = domain
            .elements()
            .map(|x| {
                domain.coords(x).iter().zip(imgs).fold(0, |acc, (&c, &y)| codomain.add(acc, codomain.scale(y, c)))
            })
            .collect();
        let mut seen = vec![false; codomain.size()];
        for &t in &table {
            if seen[t] {
                return None;
            }
            seen[t] = true;
        }
        if domain.elements().any(|x| domain.q(x) != codomain.q(table[x])) {
            return None;
        }
        let images = imgs.iter().map(|&y| codomain.element(y)).collect();
        Some(FqmIsometry { domain, codomain, images, table })
    }

    pub fn identity(d: Arc<Fqm>) -> Self {
        let imgs: Vec<usize> = (0..d.rank()).map(|i| d.gen_index(i)).collect();
        Self::from_images(d.clone(), d, &imgs).unwrap()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn inverse_table(&self) -> Vec<usize> {
        let mut inv = vec![0; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y] = x;
        }
        inv
    }

    pub fn compose(&self, first: &FqmIsometry) -> Option<FqmIsometry> {
        // self after first
        let imgs: Vec<usize> = (0..first.domain.rank()).map(|i| self.apply(first.apply(first.domain.gen_index(i)))).collect();
        Self::from_images(first.domain.clone(), self.codomain.clone(), &imgs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FqmJson {
    pub orders: Vec<i64>,
    pub gram: Vec<Vec<String>>,
    pub q: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn a1() -> Fqm {
        Fqm::from_even_lattice(&vec![vec![2]]).unwrap().0
    }

    fn a2() -> Fqm {
        Fqm::from_even_lattice(&vec![vec![2, 1], vec![1, 2]]).unwrap().0
    }

    #[test]
    fn lattice_modules() {
        let d = a1();
        assert_eq!(d.orders(), &[2]);
        assert_eq!(d.q(1), rat(1, 4));
        assert_eq!(d.signature().unwrap(), 1);
        let d = a2();
        assert_eq!(d.orders(), &[3]);
        assert_eq!(d.q(1), rat(1, 3));
        assert_eq!(d.level(), 3);
        assert_eq!(d.signature().unwrap(), 2);
        assert_eq!(d.p_rank(3), 1);
        assert_eq!(d.p_rank(2), 0);
        assert_eq!(d.oddity().unwrap(), 0);
        assert_eq!(d.chi(2).unwrap(), CycInt::from_i64(1, -1));
        assert!(matches!(d.chi(3), Err(Error::NotCoprime(3, 3))));
    }

    #[test]
    fn trivial_module() {
        let t = Fqm::trivial();
        assert_eq!(t.size(), 1);
        assert_eq!(t.level(), 1);
        assert_eq!(t.signature().unwrap(), 0);
        assert_eq!(t.oddity().unwrap(), 0);
        assert!(t.chi(7).unwrap().is_one());
        let t = Arc::new(t);
        assert_eq!(t.isotropic_subgroups().unwrap().len(), 1);
        assert_eq!(t.orthogonal_group().unwrap().len(), 1);
    }

    #[test]
    fn hyperbolic_and_quotient() {
        let h2 = Fqm::hyperbolic(2);
        assert_eq!(h2.signature().unwrap(), 0);
        let h3 = Arc::new(Fqm::hyperbolic(3));
        let gamma = h3.index(&[1, 0]);
        let h = IsotropicSubgroup::generated_by(h3.clone(), &[gamma]).unwrap();
        let q = h3.quotient(&h).unwrap();
        assert_eq!(q.module.size(), 1);
        assert!(Fqm::hyperbolic(1).size() == 1);
    }

    #[test]
    fn torsion_sets_a1() {
        let d = a1();
        let (dc, img, dcs) = d.torsion_sets(2);
        assert_eq!(dc, vec![0, 1]);
        assert_eq!(img, vec![0]);
        assert_eq!(dcs, vec![1]);
        let z9 = Fqm::new(vec![9], vec![vec![rat(2, 9)]], vec![rat(1, 9)]).unwrap();
        let (dc, img, _) = z9.torsion_sets(3);
        assert_eq!(dc, vec![0, 3, 6]);
        assert_eq!(img, vec![0, 3, 6]);
    }

    #[test]
    fn orthogonal_group_a2() {
        let d = Arc::new(a2());
        assert_eq!(d.orthogonal_group().unwrap().len(), 2);
        let a1 = Arc::new(a1());
        assert!(d.isometries(&a1).unwrap().is_empty());
    }
}
