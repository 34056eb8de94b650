//! Weil representations of SL2(Z) and Sp4(Z) on C[D^n] via generator words.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::arith::{ext_gcd, gcd, gcd128};
use crate::cyclotomic::{CycCtx, CycScalar};
use crate::error::{Error, Result};
use crate::fqm::{Fqm, FqmIsometry, Quotient};
use crate::intmat::{self, M2};

/// Tables shared by all vectors over one module.
pub struct WeilCtx {
    pub module: Arc<Fqm>,
    pub sign: i64,
    /// Cyclotomic order M = lcm(8, N).
    pub m: u32,
    pub cyc: Arc<CycCtx>,
    /// q(x) as an exponent of zeta_M.
    pub q: Vec<i64>,
    /// (x, y) as an exponent of zeta_M.
    pub b: Vec<i64>,
    pub neg: Vec<usize>,
    gauss: Vec<i128>,
    gauss_conj: Vec<i128>,
}

impl fmt::Debug for WeilCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeilCtx({:?}, sign {})", self.module, self.sign)
    }
}

impl WeilCtx {
    pub fn new(module: Arc<Fqm>) -> Result<Arc<WeilCtx>> {
        let sign = module.signature()?;
        let m = module.cyc_order();
        let n = module.level();
        let mult = m as i64 / n;
        let size = module.size();
        let q: Vec<i64> = module.elements().map(|x| module.q_num(x) * mult).collect();
        let mut b = vec![0i64; size * size];
        for x in module.elements() {
            for y in x..size {
                let v = module.b_num(x, y) * mult;
                b[x * size + y] = v;
                b[y * size + x] = v;
            }
        }
        let neg = module.elements().map(|x| module.neg(x)).collect();
        let g = module.gauss_sum().lift(m);
        let gc = g.conj();
        Ok(Arc::new(WeilCtx {
            cyc: CycCtx::get(m),
            module,
            sign,
            m,
            q,
            b,
            neg,
            gauss: g.coords().to_vec(),
            gauss_conj: gc.coords().to_vec(),
        }))
    }

    pub fn size(&self) -> usize {
        self.module.size()
    }

    pub fn phi(&self) -> usize {
        self.cyc.phi
    }

    pub fn require_even(&self) -> Result<()> {
        if self.sign % 2 != 0 {
            return Err(Error::OddSignature(self.sign));
        }
        Ok(())
    }

    fn mul_root(&self, c: &[i128], k: i64) -> Vec<i128> {
        let m = self.m as usize;
        let k = k.rem_euclid(m as i64) as usize;
        if k == 0 {
            return c.to_vec();
        }
        let mut buf = vec![0i128; m];
        for (i, &a) in c.iter().enumerate() {
            if a != 0 {
                buf[(i + k) % m] = a;
            }
        }
        self.cyc.reduce_i128(&mut buf);
        buf.truncate(self.phi());
        buf
    }

    fn cmul(&self, a: &[i128], b: &[i128]) -> Vec<i128> {
        let phi = self.phi();
        let mut buf = vec![0i128; 2 * phi];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    buf[i + j] += x * y;
                }
            }
        }
        self.cyc.reduce_i128(&mut buf);
        buf.truncate(phi);
        buf
    }
}

/// Element of C[D^n] with entries in (1/den) Z[zeta_M], dense.
#[derive(Clone)]
pub struct GroupAlgebraVector {
    pub ctx: Arc<WeilCtx>,
    pub arity: usize,
    den: i128,
    data: Vec<i128>,
}

impl fmt::Debug for GroupAlgebraVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz: Vec<(usize, CycScalar)> = (0..self.dim()).map(|i| (i, self.entry(i))).filter(|(_, c)| !c.is_zero()).collect();
        write!(f, "GAV(arity {}, {:?})", self.arity, nz)
    }
}

impl PartialEq for GroupAlgebraVector {
    fn eq(&self, o: &Self) -> bool {
        if self.arity != o.arity || *self.ctx.module != *o.ctx.module {
            return false;
        }
        // a/da == b/db  <=>  a*db == b*da
        self.data.iter().zip(&o.data).all(|(&x, &y)| x * o.den == y * self.den)
    }
}

impl GroupAlgebraVector {
    pub fn zero(ctx: &Arc<WeilCtx>, arity: usize) -> Self {
        let dim = ctx.size().pow(arity as u32);
        GroupAlgebraVector { ctx: ctx.clone(), arity, den: 1, data: vec![0; dim * ctx.phi()] }
    }

    /// e^{(g_1, ..., g_n)}.
    pub fn basis(ctx: &Arc<WeilCtx>, idx: &[usize]) -> Self {
        let mut v = Self::zero(ctx, idx.len());
        let i = v.index(idx);
        let phi = ctx.phi();
        v.data[i * phi] = 1;
        v
    }

    pub fn from_entries(ctx: &Arc<WeilCtx>, arity: usize, entries: &[CycScalar]) -> Result<Self> {
        let dim = ctx.size().pow(arity as u32);
        if entries.len() != dim {
            return Err(Error::Invalid("wrong number of group algebra entries".into()));
        }
        let phi = ctx.phi();
        let mut lifted = Vec::with_capacity(dim);
        let mut den = BigInt::one();
        for e in entries {
            let e = fit_order(e, ctx.m)?;
            for c in e.coords() {
                den = num_integer::Integer::lcm(&den, c.denom());
            }
            lifted.push(e);
        }
        let den_i = den.to_i128().ok_or_else(|| Error::TooLarge("denominator".into()))?;
        let mut data = vec![0i128; dim * phi];
        for (i, e) in lifted.iter().enumerate() {
            for (j, c) in e.coords().iter().enumerate() {
                let v = c * BigRational::from_integer(den.clone());
                data[i * phi + j] = v.to_integer().to_i128().ok_or_else(|| Error::TooLarge("coefficient".into()))?;
            }
        }
        let mut v = GroupAlgebraVector { ctx: ctx.clone(), arity, den: den_i, data };
        v.normalize();
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.data.len() / self.ctx.phi()
    }

    pub fn module(&self) -> &Arc<Fqm> {
        &self.ctx.module
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.arity);
        idx.iter().fold(0, |acc, &g| acc * self.ctx.size() + g)
    }

    pub fn tuple(&self, i: usize) -> Vec<usize> {
        let s = self.ctx.size();
        let mut out = vec![0; self.arity];
        let mut r = i;
        for k in (0..self.arity).rev() {
            out[k] = r % s;
            r /= s;
        }
        out
    }

    fn slot(&self, i: usize) -> &[i128] {
        let phi = self.ctx.phi();
        &self.data[i * phi..(i + 1) * phi]
    }

    pub fn entry(&self, i: usize) -> CycScalar {
        let d = BigInt::from(self.den);
        CycScalar::from_coords(
            self.ctx.m,
            self.slot(i).iter().map(|&a| BigRational::new(BigInt::from(a), d.clone())).collect(),
        )
    }

    pub fn entries(&self) -> Vec<CycScalar> {
        (0..self.dim()).map(|i| self.entry(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.slot(i).iter().any(|&x| x != 0)).collect()
    }

    /// Divides out the common content of numerators and denominator.
    fn normalize(&mut self) {
        if self.den < 0 {
            self.den = -self.den;
            for x in self.data.iter_mut() {
                *x = -*x;
            }
        }
        let mut g = self.den;
        for &x in &self.data {
            if g == 1 {
                break;
            }
            if x != 0 {
                g = gcd128(g, x);
            }
        }
        if self.data.iter().all(|&x| x == 0) {
            self.den = 1;
            return;
        }
        if g > 1 {
            self.den /= g;
            for x in self.data.iter_mut() {
                *x /= g;
            }
        }
    }

    fn same_shape(&self, o: &Self) {
        assert_eq!(self.arity, o.arity, "arity mismatch");
        assert!(*self.ctx.module == *o.ctx.module, "module mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_shape(o);
        let g = gcd128(self.den, o.den);
        let (fa, fb) = (o.den / g, self.den / g);
        let data = self.data.iter().zip(&o.data).map(|(&x, &y)| x * fa + y * fb).collect();
        let mut v = GroupAlgebraVector { ctx: self.ctx.clone(), arity: self.arity, den: self.den * fa, data };
        v.normalize();
        v
    }

    pub fn neg(&self) -> Self {
        let mut v = self.clone();
        for x in v.data.iter_mut() {
            *x = -*x;
        }
        v
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale_rational(&self, num: i128, den: i128) -> Self {
        assert!(den != 0);
        let mut v = self.clone();
        for x in v.data.iter_mut() {
            *x *= num;
        }
        v.den *= den;
        v.normalize();
        v
    }

    /// Multiplies by an element of Q(zeta_M') with M' | M.
    pub fn scale(&self, c: &CycScalar) -> Result<Self> {
        let c = fit_order(c, self.ctx.m)?;
        let mut den = BigInt::one();
        for x in c.coords() {
            den = num_integer::Integer::lcm(&den, x.denom());
        }
        let cd = den.to_i128().ok_or_else(|| Error::TooLarge("denominator".into()))?;
        let ci: Vec<i128> = c
            .coords()
            .iter()
            .map(|x| (x * BigRational::from_integer(den.clone())).to_integer().to_i128().unwrap())
            .collect();
        let phi = self.ctx.phi();
        let mut data = vec![0i128; self.data.len()];
        for i in 0..self.dim() {
            let s = self.slot(i);
            if s.iter().all(|&x| x == 0) {
                continue;
            }
            let p = self.ctx.cmul(s, &ci);
            data[i * phi..(i + 1) * phi].copy_from_slice(&p);
        }
        let mut v = GroupAlgebraVector { ctx: self.ctx.clone(), arity: self.arity, den: self.den * cd, data };
        v.normalize();
        Ok(v)
    }

    /// Hermitian inner product, linear in the first argument.
    pub fn inner(&self, o: &Self) -> CycScalar {
        self.same_shape(o);
        let phi = self.ctx.phi();
        let mut acc = vec![0i128; phi];
        for i in 0..self.dim() {
            let a = self.slot(i);
            let b = o.slot(i);
            if a.iter().all(|&x| x == 0) || b.iter().all(|&x| x == 0) {
                continue;
            }
            let bc = conj_coords(&self.ctx, b);
            let p = self.ctx.cmul(a, &bc);
            for (s, t) in acc.iter_mut().zip(p) {
                *s += t;
            }
        }
        let d = BigInt::from(self.den) * BigInt::from(o.den);
        CycScalar::from_coords(self.ctx.m, acc.into_iter().map(|a| BigRational::new(BigInt::from(a), d.clone())).collect())
    }

    /// Rebuilds the vector by sending basis index i to `f(i)` (a permutation or many-to-one map).
    pub fn map_indices(&self, target: &Arc<WeilCtx>, f: impl Fn(usize) -> Option<usize>) -> Result<Self> {
        let mut out = Self::zero(target, self.arity);
        if target.m != self.ctx.m {
            // go through exact scalars when the cyclotomic orders differ
            let mut entries = vec![CycScalar::zero(1); out.dim()];
            for i in self.support() {
                if let Some(j) = f(i) {
                    entries[j] = &entries[j] + &self.entry(i);
                }
            }
            return Self::from_entries(target, self.arity, &entries);
        }
        let phi = self.ctx.phi();
        for i in self.support() {
            if let Some(j) = f(i) {
                for k in 0..phi {
                    out.data[j * phi + k] += self.data[i * phi + k];
                }
            }
        }
        out.den = self.den;
        out.normalize();
        Ok(out)
    }

    // ---- generator actions ----

    /// Diagonal phase e^{x} -> zeta_M^{phase(x)} e^{x}.
    fn apply_phase(&mut self, phase: impl Fn(usize) -> i64) {
        let phi = self.ctx.phi();
        for i in 0..self.dim() {
            let k = phase(i);
            if k.rem_euclid(self.ctx.m as i64) == 0 {
                continue;
            }
            let s = &self.data[i * phi..(i + 1) * phi];
            if s.iter().all(|&x| x == 0) {
                continue;
            }
            let r = self.ctx.mul_root(s, k);
            self.data[i * phi..(i + 1) * phi].copy_from_slice(&r);
        }
    }

    /// n(S): phase e(S11 q(g1) + S22 q(g2) + S12 (g1, g2)); for arity 1 S is [[k]].
    pub fn apply_n(&mut self, s: &[Vec<i64>]) {
        let ctx = self.ctx.clone();
        let size = ctx.size();
        let ar = self.arity;
        self.apply_phase(|i| {
            let t = tuple_of(i, size, ar);
            let mut k = 0i64;
            for a in 0..ar {
                k += s[a][a] * ctx.q[t[a]];
                for b in a + 1..ar {
                    k += s[a][b] * ctx.b[t[a] * size + t[b]];
                }
            }
            k
        });
    }

    pub fn apply_t(&mut self, k: i64) {
        self.apply_n(&[vec![k]]);
    }

    /// Fourier transform along one tensor factor: e^g -> sum_b e(+-(g,b)) e^b (unnormalized).
    fn fourier(&mut self, factor: usize, inverse: bool) {
        let ctx = self.ctx.clone();
        let size = ctx.size();
        let phi = ctx.phi();
        let m = ctx.m as usize;
        let ar = self.arity;
        let stride = size.pow((ar - 1 - factor) as u32);
        let mut out = vec![0i128; self.data.len()];
        let mut buf = vec![0i128; m];
        let sgn: i64 = if inverse { -1 } else { 1 };
        let outer = self.dim() / size;
        for o in 0..outer {
            // base index with this factor's digit set to 0
            let hi = o / stride;
            let lo = o % stride;
            let base = hi * stride * size + lo;
            for beta in 0..size {
                buf.iter_mut().for_each(|x| *x = 0);
                let mut any = false;
                for g in 0..size {
                    let i = base + g * stride;
                    let s = &self.data[i * phi..(i + 1) * phi];
                    if s.iter().all(|&x| x == 0) {
                        continue;
                    }
                    any = true;
                    let k = (sgn * ctx.b[g * size + beta]).rem_euclid(m as i64) as usize;
                    for (t, &a) in s.iter().enumerate() {
                        if a != 0 {
                            buf[(t + k) % m] += a;
                        }
                    }
                }
                if !any {
                    continue;
                }
                ctx.cyc.reduce_i128(&mut buf);
                let j = base + beta * stride;
                out[j * phi..(j + 1) * phi].copy_from_slice(&buf[..phi]);
            }
        }
        self.data = out;
    }

    /// J_n (or its inverse) acting on all factors.
    pub fn apply_j(&mut self, inverse: bool) {
        let ctx = self.ctx.clone();
        for f in 0..self.arity {
            self.fourier(f, inverse);
            let g = if inverse { &ctx.gauss_conj } else { &ctx.gauss };
            let phi = ctx.phi();
            for i in 0..self.dim() {
                let s = &self.data[i * phi..(i + 1) * phi];
                if s.iter().all(|&x| x == 0) {
                    continue;
                }
                let p = ctx.cmul(s, g);
                self.data[i * phi..(i + 1) * phi].copy_from_slice(&p);
            }
            self.den *= ctx.size() as i128;
            self.normalize();
        }
    }

    /// a(U): e^g -> det(U)^{sign/2} e^{g U^{-1}} (g a row of group elements).
    pub fn apply_a(&mut self, u: &[Vec<i64>]) {
        let ar = self.arity;
        let det = intmat::det(&u.to_vec()) as i64;
        assert!(det == 1 || det == -1, "a(U) needs U in GL_n(Z)");
        let uinv = intmat::inverse_unimodular(&u.to_vec());
        let module = self.ctx.module.clone();
        let size = module.size();
        let mut out = Self::zero(&self.ctx, ar);
        let phi = self.ctx.phi();
        for i in self.support() {
            let t = tuple_of(i, size, ar);
            let nt: Vec<usize> = (0..ar)
                .map(|j| (0..ar).fold(0, |acc, k| module.add(acc, module.scale(t[k], uinv[k][j]))))
                .collect();
            let j = out.index(&nt);
            out.data[j * phi..(j + 1) * phi].copy_from_slice(&self.data[i * phi..(i + 1) * phi]);
        }
        out.den = self.den;
        if det == -1 && (self.ctx.sign / 2) % 2 != 0 {
            out = out.neg();
        }
        *self = out;
    }

    pub fn apply_neg_identity(&mut self) {
        let u: Vec<Vec<i64>> = (0..self.arity).map(|i| (0..self.arity).map(|j| if i == j { -1 } else { 0 }).collect()).collect();
        self.apply_a(&u);
    }

    /// e^g -> e^{l g} on every factor (the alpha action for det l^2).
    pub fn apply_mult(&self, l: i64) -> Self {
        let module = self.ctx.module.clone();
        let size = module.size();
        let ar = self.arity;
        self.map_indices(&self.ctx, |i| {
            let t = tuple_of(i, size, ar);
            let nt: Vec<usize> = t.iter().map(|&g| module.scale(g, l)).collect();
            Some(nt.iter().fold(0, |acc, &g| acc * size + g))
        })
        .expect("same context")
    }

    pub fn apply_word1(&mut self, w: &Word1) {
        for t in w.tokens.iter().rev() {
            match *t {
                Tok1::T(k) => self.apply_t(k),
                Tok1::J => self.apply_j(false),
                Tok1::JInv => self.apply_j(true),
                Tok1::NegI => self.apply_neg_identity(),
            }
        }
    }

    pub fn apply_word2(&mut self, w: &Word2) {
        assert_eq!(self.arity, 2);
        for t in w.tokens.iter().rev() {
            match t {
                Tok2::J2 => self.apply_j(false),
                Tok2::J2Inv => self.apply_j(true),
                Tok2::N(s) => self.apply_n(&[vec![s[0][0], s[0][1]], vec![s[1][0], s[1][1]]]),
                Tok2::A(u) => self.apply_a(&[vec![u[0][0], u[0][1]], vec![u[1][0], u[1][1]]]),
            }
        }
    }

    /// Tensor product of two arity-1 vectors.
    pub fn tensor(&self, o: &Self) -> Self {
        assert_eq!(self.arity, 1);
        assert_eq!(o.arity, 1);
        self.same_shape(o);
        let size = self.ctx.size();
        let phi = self.ctx.phi();
        let mut out = Self::zero(&self.ctx, 2);
        for i in self.support() {
            for j in o.support() {
                let p = self.ctx.cmul(self.slot(i), o.slot(j));
                let k = i * size + j;
                out.data[k * phi..(k + 1) * phi].copy_from_slice(&p);
            }
        }
        out.den = self.den * o.den;
        out.normalize();
        out
    }
}

fn tuple_of(i: usize, size: usize, ar: usize) -> Vec<usize> {
    let mut out = vec![0; ar];
    let mut r = i;
    for k in (0..ar).rev() {
        out[k] = r % size;
        r /= size;
    }
    out
}

fn conj_coords(ctx: &WeilCtx, c: &[i128]) -> Vec<i128> {
    let m = ctx.m as usize;
    let mut buf = vec![0i128; m];
    for (i, &a) in c.iter().enumerate() {
        if a != 0 {
            buf[(m - i) % m] += a;
        }
    }
    ctx.cyc.reduce_i128(&mut buf);
    buf.truncate(ctx.phi());
    buf
}

/// Brings a scalar into Q(zeta_m): lift if its order divides m, otherwise descend first.
pub fn fit_order(c: &CycScalar, m: u32) -> Result<CycScalar> {
    if m % c.order() == 0 {
        return Ok(c.lift(m));
    }
    let s = c.shrink();
    if m % s.order() == 0 {
        Ok(s.lift(m))
    } else {
        Err(Error::Invalid(format!("scalar of order {} does not lie in Q(zeta_{m})", s.order())))
    }
}

// ---------------------------------------------------------------- words

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tok1 {
    T(i64),
    J,
    JInv,
    NegI,
}

impl Tok1 {
    pub fn matrix(&self) -> M2 {
        match *self {
            Tok1::T(k) => intmat::m2_t(k),
            Tok1::J => intmat::M2_S,
            Tok1::JInv => intmat::m2_inv(&intmat::M2_S),
            Tok1::NegI => intmat::m2_neg(&intmat::M2_ID),
        }
    }

    fn inverse(&self) -> Tok1 {
        match *self {
            Tok1::T(k) => Tok1::T(-k),
            Tok1::J => Tok1::JInv,
            Tok1::JInv => Tok1::J,
            Tok1::NegI => Tok1::NegI,
        }
    }
}

/// A word in J, T and -I representing an element of SL2(Z); the product is left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word1 {
    pub tokens: Vec<Tok1>,
}

impl Word1 {
    pub fn matrix(&self) -> M2 {
        self.tokens.iter().fold(intmat::M2_ID, |acc, t| intmat::m2_mul(&acc, &t.matrix()))
    }

    pub fn inverse(&self) -> Word1 {
        Word1 { tokens: self.tokens.iter().rev().map(|t| t.inverse()).collect() }
    }

    pub fn concat(&self, o: &Word1) -> Word1 {
        Word1 { tokens: self.tokens.iter().chain(&o.tokens).copied().collect() }
    }
}

/// Factors M in SL2(Z) by the Euclidean algorithm on the bottom row.
pub fn sl2_word(m: &M2) -> Result<Word1> {
    if intmat::m2_det(m) != 1 {
        return Err(Error::MalformedWord(format!("{m:?} is not in SL2(Z)")));
    }
    let mut cur = *m;
    let mut w: Vec<Tok1> = Vec::new();
    while cur[1][0] != 0 {
        let (c, d) = (cur[1][0], cur[1][1]);
        // d' = d + k c with |d'| <= |c|/2
        let k = -((2 * d + c.abs() * c.signum()) as f64 / (2 * c) as f64).floor() as i64;
        let k = {
            let mut best = k;
            for cand in [k - 1, k, k + 1] {
                if (d + cand * c).abs() < (d + best * c).abs() {
                    best = cand;
                }
            }
            best
        };
        if k != 0 {
            cur = intmat::m2_mul(&cur, &intmat::m2_t(k));
            w.push(Tok1::T(k));
        }
        if cur[1][0] == 0 {
            break;
        }
        cur = intmat::m2_mul(&cur, &intmat::M2_S);
        w.push(Tok1::J);
    }
    // cur = +-T^x, and M = cur * W^{-1}
    let mut tokens = Vec::new();
    if cur[0][0] == 1 {
        tokens.push(Tok1::T(cur[0][1]));
    } else {
        tokens.push(Tok1::NegI);
        tokens.push(Tok1::T(-cur[0][1]));
    }
    tokens.extend(w.iter().rev().map(|t| t.inverse()));
    tokens.retain(|t| *t != Tok1::T(0));
    let word = Word1 { tokens };
    assert_eq!(word.matrix(), *m, "SL2 factorization failed");
    Ok(word)
}

pub type M4 = [[i64; 4]; 4];

pub fn m4_mul(a: &M4, b: &M4) -> M4 {
    let mut c = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn m4_id() -> M4 {
    let mut c = [[0i64; 4]; 4];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 1;
    }
    c
}

pub fn is_symplectic(m: &M4) -> bool {
    let j = j2_matrix();
    let mut mt = [[0i64; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            mt[i][k] = m[k][i];
        }
    }
    m4_mul(&m4_mul(&mt, &j), m) == j
}

fn j2_matrix() -> M4 {
    [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok2 {
    J2,
    J2Inv,
    /// n(S), S symmetric.
    N([[i64; 2]; 2]),
    /// a(U), U in GL2(Z).
    A([[i64; 2]; 2]),
}

impl Tok2 {
    pub fn validate(&self) -> Result<()> {
        match self {
            Tok2::N(s) if s[0][1] != s[1][0] => Err(Error::MalformedWord("n(S) needs symmetric S".into())),
            Tok2::A(u) if (u[0][0] * u[1][1] - u[0][1] * u[1][0]).abs() != 1 => {
                Err(Error::MalformedWord("a(U) needs U in GL2(Z)".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn matrix(&self) -> M4 {
        match self {
            Tok2::J2 => j2_matrix(),
            Tok2::J2Inv => {
                let mut j = j2_matrix();
                for r in j.iter_mut() {
                    for x in r.iter_mut() {
                        *x = -*x;
                    }
                }
                j
            }
            Tok2::N(s) => {
                let mut m = m4_id();
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][2 + j] = s[i][j];
                    }
                }
                m
            }
            Tok2::A(u) => {
                let d = u[0][0] * u[1][1] - u[0][1] * u[1][0];
                // (U^T)^{-1} = adj(U)^T / det
                let uit = [[u[1][1] * d, -u[1][0] * d], [-u[0][1] * d, u[0][0] * d]];
                let mut m = [[0i64; 4]; 4];
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] = u[i][j];
                        m[2 + i][2 + j] = uit[i][j];
                    }
                }
                m
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word2 {
    pub tokens: Vec<Tok2>,
}

impl Word2 {
    pub fn new(tokens: Vec<Tok2>) -> Result<Self> {
        for t in &tokens {
            t.validate()?;
        }
        Ok(Word2 { tokens })
    }

    pub fn matrix(&self) -> M4 {
        self.tokens.iter().fold(m4_id(), |acc, t| m4_mul(&acc, &t.matrix()))
    }

    pub fn concat(&self, o: &Word2) -> Word2 {
        Word2 { tokens: self.tokens.iter().chain(&o.tokens).cloned().collect() }
    }

    pub fn inverse(&self) -> Word2 {
        let tokens = self
            .tokens
            .iter()
            .rev()
            .map(|t| match t {
                Tok2::J2 => Tok2::J2Inv,
                Tok2::J2Inv => Tok2::J2,
                Tok2::N(s) => Tok2::N([[-s[0][0], -s[0][1]], [-s[1][0], -s[1][1]]]),
                Tok2::A(u) => {
                    let d = u[0][0] * u[1][1] - u[0][1] * u[1][0];
                    Tok2::A([[u[1][1] * d, -u[0][1] * d], [-u[1][0] * d, u[0][0] * d]])
                }
            })
            .collect();
        Word2 { tokens }
    }
}

const NEG_I4: Tok2 = Tok2::A([[-1, 0], [0, -1]]);

fn nd(a: i64, b: i64) -> Tok2 {
    Tok2::N([[a, 0], [0, b]])
}

/// u(J_1) = -n(diag(1,-1)) J2 n(diag(1,0)) J2 n(I).
fn u_j() -> Vec<Tok2> {
    vec![NEG_I4, nd(1, -1), Tok2::J2, nd(1, 0), Tok2::J2, nd(1, 1)]
}

/// d(J_1) = -n(diag(-1,1)) J2 n(diag(0,1)) J2 n(I).
fn d_j() -> Vec<Tok2> {
    vec![NEG_I4, nd(-1, 1), Tok2::J2, nd(0, 1), Tok2::J2, nd(1, 1)]
}

pub fn u_matrix(m: &M2) -> M4 {
    [[m[0][0], 0, m[0][1], 0], [0, 1, 0, 0], [m[1][0], 0, m[1][1], 0], [0, 0, 0, 1]]
}

pub fn d_matrix(m: &M2) -> M4 {
    [[1, 0, 0, 0], [0, m[0][0], 0, m[0][1]], [0, 0, 1, 0], [0, m[1][0], 0, m[1][1]]]
}

fn embed_word(w: &Word1, upper: bool) -> Word2 {
    let mut toks = Vec::new();
    for t in &w.tokens {
        match *t {
            Tok1::T(k) => toks.push(if upper { nd(k, 0) } else { nd(0, k) }),
            Tok1::J => toks.extend(if upper { u_j() } else { d_j() }),
            Tok1::JInv => {
                // J^{-1} = J (-I)
                toks.extend(if upper { u_j() } else { d_j() });
                toks.push(if upper { Tok2::A([[-1, 0], [0, 1]]) } else { Tok2::A([[1, 0], [0, -1]]) });
            }
            Tok1::NegI => toks.push(if upper { Tok2::A([[-1, 0], [0, 1]]) } else { Tok2::A([[1, 0], [0, -1]]) }),
        }
    }
    Word2 { tokens: toks }
}

pub fn u_word(m: &M2) -> Result<Word2> {
    let w = embed_word(&sl2_word(m)?, true);
    assert_eq!(w.matrix(), u_matrix(m), "u-word does not reproduce u(M)");
    Ok(w)
}

pub fn d_word(m: &M2) -> Result<Word2> {
    let w = embed_word(&sl2_word(m)?, false);
    assert_eq!(w.matrix(), d_matrix(m), "d-word does not reproduce d(M)");
    Ok(w)
}

pub fn a_l_matrix(l: i64) -> M4 {
    [[l * l + l, -l - 1, -1, -l - 1], [-l - 1, 1, 0, 0], [-l, 1, 0, 0], [0, 0, -1, -l]]
}

/// A_l = J2 n(S1) J2 n(S2) J2 n(S3).
pub fn a_l_word(l: i64) -> Word2 {
    let w = Word2 {
        tokens: vec![
            Tok2::J2,
            Tok2::N([[0, -1], [-1, -l]]),
            Tok2::J2,
            Tok2::N([[l * l + l, -l - 1], [-l - 1, 1]]),
            Tok2::J2,
            Tok2::N([[0, 0], [0, 1]]),
        ],
    };
    assert_eq!(w.matrix(), a_l_matrix(l), "A_l word does not reproduce A_l");
    w
}

/// (phi(M), nu(M)) from the 2x2 minors of (C D).
pub fn phi_nu(m: &M4) -> Result<(M2, i64)> {
    if !is_symplectic(m) {
        return Err(Error::NotSymplectic);
    }
    let (c1, c2, c3, c4) = (m[2][0], m[2][1], m[3][0], m[3][1]);
    let (d1, d2, d3, d4) = (m[2][2], m[2][3], m[3][2], m[3][3]);
    let phi = [[c1 * d4 - d2 * c3, d1 * d4 - d2 * d3], [c1 * c4 - c2 * c3, d1 * c4 - c2 * d3]];
    let nu = c1 * d3 - d1 * c3;
    Ok((phi, nu))
}

/// psi(A, B) = ((r u, s u), (r t, s t)) for bottom rows (r, s) of A and (t, u) of B.
pub fn psi(a: &M2, b: &M2) -> M2 {
    let (r, s) = (a[1][0], a[1][1]);
    let (t, u) = (b[1][0], b[1][1]);
    [[r * u, s * u], [r * t, s * t]]
}

/// (a b; c d)' = (d b; c a).
pub fn prime(m: &M2) -> M2 {
    [[m[1][1], m[0][1]], [m[1][0], m[0][0]]]
}

// ---------------------------------------------------------------- operators

/// A linear map on C[D^n], stored by columns (images of basis vectors).
#[derive(Clone, Debug)]
pub struct WeilOperator {
    pub ctx: Arc<WeilCtx>,
    pub arity: usize,
    pub cols: Vec<GroupAlgebraVector>,
    /// The SL2 or Sp4 matrix represented, when known.
    pub represents: Option<Vec<Vec<i64>>>,
}

impl PartialEq for WeilOperator {
    fn eq(&self, o: &Self) -> bool {
        self.arity == o.arity && self.cols == o.cols
    }
}

impl WeilOperator {
    pub fn from_fn(ctx: &Arc<WeilCtx>, arity: usize, f: impl Fn(&GroupAlgebraVector) -> GroupAlgebraVector) -> Self {
        let dim = ctx.size().pow(arity as u32);
        let cols = (0..dim)
            .map(|i| {
                let e = GroupAlgebraVector::basis(ctx, &tuple_of(i, ctx.size(), arity));
                f(&e)
            })
            .collect();
        WeilOperator { ctx: ctx.clone(), arity, cols, represents: None }
    }

    pub fn with_matrix(mut self, m: Vec<Vec<i64>>) -> Self {
        self.represents = Some(m);
        self
    }

    pub fn identity(ctx: &Arc<WeilCtx>, arity: usize) -> Self {
        Self::from_fn(ctx, arity, |v| v.clone())
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, v: &GroupAlgebraVector) -> GroupAlgebraVector {
        let mut acc = GroupAlgebraVector::zero(&self.ctx, self.arity);
        for i in v.support() {
            let term = self.cols[i].scale(&v.entry(i)).expect("same field");
            acc = acc.add(&term);
        }
        acc
    }

    /// self * other.
    pub fn compose(&self, other: &WeilOperator) -> WeilOperator {
        let represents = match (&self.represents, &other.represents) {
            (Some(a), Some(b)) => Some(
                (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect(),
            ),
            _ => None,
        };
        WeilOperator { ctx: self.ctx.clone(), arity: self.arity, cols: other.cols.iter().map(|c| self.apply(c)).collect(), represents }
    }

    pub fn entry(&self, row: usize, col: usize) -> CycScalar {
        self.cols[col].entry(row)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> WeilOperator {
        let n = self.dim();
        let cols = (0..n)
            .map(|j| {
                let entries: Vec<CycScalar> = (0..n).map(|i| self.entry(j, i).conj()).collect();
                GroupAlgebraVector::from_entries(&self.ctx, self.arity, &entries).expect("same field")
            })
            .collect();
        WeilOperator { ctx: self.ctx.clone(), arity: self.arity, cols, represents: None }
    }

    /// Checks that the columns are orthonormal.
    pub fn is_unitary(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let ip = self.cols[i].inner(&self.cols[j]);
                let want = if i == j { CycScalar::one(1) } else { CycScalar::zero(1) };
                if ip != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.ctx, self.arity)
    }
}

/// rho_D(M) for M in SL2(Z).
pub fn rho1(ctx: &Arc<WeilCtx>, m: &M2) -> Result<WeilOperator> {
    ctx.require_even()?;
    let w = sl2_word(m)?;
    Ok(WeilOperator::from_fn(ctx, 1, |v| {
        let mut x = v.clone();
        x.apply_word1(&w);
        x
    })
    .with_matrix(m.iter().map(|r| r.to_vec()).collect()))
}

/// rho_D^{(2)} of an explicit word.
pub fn rho2_word(ctx: &Arc<WeilCtx>, w: &Word2) -> Result<WeilOperator> {
    ctx.require_even()?;
    for t in &w.tokens {
        t.validate()?;
    }
    let m = w.matrix();
    Ok(WeilOperator::from_fn(ctx, 2, |v| {
        let mut x = v.clone();
        x.apply_word2(w);
        x
    })
    .with_matrix(m.iter().map(|r| r.to_vec()).collect()))
}

/// Applies rho(M)^{-1} = rho(M^{-1}) for M in SL2(Z) to a vector.
pub fn apply_rho_inverse(v: &GroupAlgebraVector, m: &M2) -> Result<GroupAlgebraVector> {
    let w = sl2_word(&intmat::m2_inv(m))?;
    let mut x = v.clone();
    x.apply_word1(&w);
    Ok(x)
}

pub fn apply_rho(v: &GroupAlgebraVector, m: &M2) -> Result<GroupAlgebraVector> {
    let w = sl2_word(m)?;
    let mut x = v.clone();
    x.apply_word1(&w);
    Ok(x)
}

/// Decomposes a primitive delta with det l^2 >= 0 as A diag(l^2, 1) B with A, B in SL2(Z).
pub fn double_coset_decomposition(delta: &M2) -> Result<(M2, i64, M2)> {
    let det = intmat::m2_det(delta);
    let g = gcd(gcd(delta[0][0], delta[0][1]), gcd(delta[1][0], delta[1][1]));
    if g != 1 {
        return Err(Error::NotInDoubleCoset(format!("{delta:?} is not primitive")));
    }
    if det < 0 {
        return Err(Error::NotInDoubleCoset(format!("{delta:?} has negative determinant")));
    }
    let l = (det as f64).sqrt().round() as i64;
    if l * l != det {
        return Err(Error::NotInDoubleCoset(format!("determinant {det} is not a square")));
    }
    let dm: Vec<Vec<i64>> = delta.iter().map(|r| r.to_vec()).collect();
    let (u, _d, v) = intmat::smith(&dm);
    let to2 = |x: &Vec<Vec<i64>>| -> M2 { [[x[0][0], x[0][1]], [x[1][0], x[1][1]]] };
    // delta = P diag(1, l^2) Q
    let mut p = intmat::m2_inv(&to2(&u));
    let mut q = intmat::m2_inv(&to2(&v));
    let e: M2 = [[1, 0], [0, -1]];
    if l != 0 {
        if intmat::m2_det(&p) == -1 {
            p = intmat::m2_mul(&p, &e);
            q = intmat::m2_mul(&e, &q);
        }
    } else {
        if intmat::m2_det(&p) == -1 {
            p = intmat::m2_mul(&p, &e);
        }
        if intmat::m2_det(&q) == -1 {
            q = intmat::m2_mul(&e, &q);
        }
    }
    debug_assert_eq!(intmat::m2_mul(&intmat::m2_mul(&p, &[[1, 0], [0, det]]), &q), *delta);
    // diag(1, l^2) = J diag(l^2, 1) J^{-1}
    let a = intmat::m2_mul(&p, &intmat::M2_S);
    let b = intmat::m2_mul(&intmat::m2_inv(&intmat::M2_S), &q);
    let alpha = [[det, 0], [0, 1]];
    if intmat::m2_mul(&intmat::m2_mul(&a, &alpha), &b) != *delta {
        return Err(Error::NotInDoubleCoset(format!("decomposition of {delta:?} failed")));
    }
    Ok((a, l, b))
}

/// rho(delta)^{-1} v for delta = A diag(l^2,1) B, computed from the given decomposition.
pub fn apply_coset_inverse_with(v: &GroupAlgebraVector, a: &M2, l: i64, b: &M2) -> Result<GroupAlgebraVector> {
    let x = apply_rho(v, &intmat::m2_inv(a))?;
    let x = x.apply_mult(l);
    apply_rho(&x, &intmat::m2_inv(b))
}

pub fn apply_coset_inverse(v: &GroupAlgebraVector, delta: &M2) -> Result<GroupAlgebraVector> {
    v.ctx.require_even()?;
    let (a, l, b) = double_coset_decomposition(delta)?;
    apply_coset_inverse_with(v, &a, l, &b)
}

/// The linear map rho_D(delta)^{-1} on C[D].
pub fn rho_coset_inverse(ctx: &Arc<WeilCtx>, delta: &M2) -> Result<WeilOperator> {
    ctx.require_even()?;
    let (a, l, b) = double_coset_decomposition(delta)?;
    let wa = sl2_word(&intmat::m2_inv(&a))?;
    let wb = sl2_word(&intmat::m2_inv(&b))?;
    Ok(WeilOperator::from_fn(ctx, 1, |v| {
        let mut x = v.clone();
        x.apply_word1(&wa);
        let mut y = x.apply_mult(l);
        y.apply_word1(&wb);
        y
    }))
}

/// Lifts M mod N with det 1 (mod N) to SL2(Z), keeping residues.
pub fn lift_sl2_mod(m: &M2, n: i64) -> M2 {
    if n == 1 {
        return intmat::M2_ID;
    }
    let r = |x: i64| x.rem_euclid(n);
    let (at, bt, ct, dt) = (r(m[0][0]), r(m[0][1]), r(m[1][0]), r(m[1][1]));
    assert_eq!(r(at * dt - bt * ct), 1 % n, "matrix is not in SL2(Z/N)");
    let c = if ct == 0 { n } else { ct };
    let mut d = dt;
    while gcd(c, d) != 1 {
        d += n;
    }
    let (_, x0, y0) = ext_gcd(d, c);
    // a0 d - b0 c = 1 with a0 = x0, b0 = -y0
    let (a0, b0) = (x0, -y0);
    let (_, x, y) = ext_gcd(c, d);
    let s = r((at - a0) * x + (bt - b0) * y);
    let out = [[a0 + s * c, b0 + s * d], [c, d]];
    debug_assert_eq!(intmat::m2_det(&out), 1);
    out
}

/// rho(delta)^{-1} for (l, N) = 1 via chi_D(l) rho(delta~^{-1}), delta~ = l^{-1} delta mod N.
pub fn apply_coprime_inverse(v: &GroupAlgebraVector, delta: &M2, l: i64) -> Result<GroupAlgebraVector> {
    let module = v.ctx.module.clone();
    let n = module.level();
    let chi = module.chi(l)?;
    let linv = crate::arith::mod_inv(l.rem_euclid(n.max(1)), n.max(1)).unwrap_or(0);
    let red = [[delta[0][0] * linv, delta[0][1] * linv], [delta[1][0] * linv, delta[1][1] * linv]];
    let t = lift_sl2_mod(&red, n);
    let x = apply_rho_inverse(v, &t)?;
    x.scale(&CycScalar::from_int_elem(&chi))
}

// ---------------------------------------------------------------- lift, descent, pullback

/// Isotropic lift C[(H^perp/H)^n] -> C[D^n].
pub fn lift(
    target: &Arc<WeilCtx>,
    quotient: &Quotient,
    v: &GroupAlgebraVector,
) -> Result<GroupAlgebraVector> {
    if *v.ctx.module != *quotient.module {
        return Err(Error::ModuleMismatch("vector does not live on H^perp/H".into()));
    }
    let size = target.size();
    let qsize = quotient.module.size();
    let ar = v.arity;
    let dim = size.pow(ar as u32);
    let mut entries = vec![CycScalar::zero(1); dim];
    for (i, e) in entries.iter_mut().enumerate() {
        let t = tuple_of(i, size, ar);
        let mut ok = true;
        let mut qi = 0usize;
        for &g in &t {
            match quotient.proj[g] {
                Some(c) => qi = qi * qsize + c,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            *e = v.entry(qi);
        }
    }
    GroupAlgebraVector::from_entries(target, ar, &entries)
}

/// Isotropic descent C[D^n] -> C[(H^perp/H)^n].
pub fn descend(
    target: &Arc<WeilCtx>,
    quotient: &Quotient,
    v: &GroupAlgebraVector,
) -> Result<GroupAlgebraVector> {
    if *target.module != *quotient.module {
        return Err(Error::ModuleMismatch("target is not H^perp/H".into()));
    }
    let size = v.ctx.size();
    let qsize = quotient.module.size();
    let ar = v.arity;
    v.map_indices(target, |i| {
        let t = tuple_of(i, size, ar);
        let mut qi = 0usize;
        for &g in &t {
            qi = qi * qsize + quotient.proj[g]?;
        }
        Some(qi)
    })
}

/// sigma_*: e^{g} -> e^{sigma g}.
pub fn pushforward(target: &Arc<WeilCtx>, sigma: &FqmIsometry, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    if *v.ctx.module != *sigma.domain || *target.module != *sigma.codomain {
        return Err(Error::ModuleMismatch("isometry does not match the vector's module".into()));
    }
    let size = v.ctx.size();
    let ar = v.arity;
    v.map_indices(target, |i| {
        let t = tuple_of(i, size, ar);
        Some(t.iter().fold(0, |acc, &g| acc * size + sigma.apply(g)))
    })
}

/// sigma^*: C[D'^n] -> C[D^n], e^{g'} -> e^{sigma^{-1} g'}.
pub fn pullback(target: &Arc<WeilCtx>, sigma: &FqmIsometry, v: &GroupAlgebraVector) -> Result<GroupAlgebraVector> {
    if *v.ctx.module != *sigma.codomain || *target.module != *sigma.domain {
        return Err(Error::ModuleMismatch("isometry does not match the vector's module".into()));
    }
    let inv = sigma.inverse_table();
    let size = v.ctx.size();
    let ar = v.arity;
    v.map_indices(target, |i| {
        let t = tuple_of(i, size, ar);
        Some(t.iter().fold(0, |acc, &g| acc * size + inv[g]))
    })
}

/// e(sign/8)/sqrt|D| = g/|D| as an exact scalar.
pub fn milgram_factor(ctx: &WeilCtx) -> CycScalar {
    let g = CycScalar::from_coords(
        ctx.m,
        ctx.gauss.iter().map(|&a| BigRational::new(BigInt::from(a), BigInt::from(ctx.size() as i64))).collect(),
    );
    g
}

/// Closed form e(sign/8)/sqrt|D| sum_g e^{-l g} (x) e^g.
pub fn a_l_closed_form(ctx: &Arc<WeilCtx>, l: i64) -> Result<GroupAlgebraVector> {
    let module = &ctx.module;
    let mut v = GroupAlgebraVector::zero(ctx, 2);
    for g in module.elements() {
        v = v.add(&GroupAlgebraVector::basis(ctx, &[module.scale(g, -l), g]));
    }
    v.scale(&milgram_factor(ctx))
}

/// Helper for tests and reports: the rational value of a real scalar, if any.
pub fn as_rational(c: &CycScalar) -> Option<BigRational> {
    c.shrink().to_rational()
}

impl From<&GroupAlgebraVector> for Vec<CycScalar> {
    fn from(v: &GroupAlgebraVector) -> Self {
        v.entries()
    }
}
