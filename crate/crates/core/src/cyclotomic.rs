//! Exact arithmetic in cyclotomic fields Q(zeta_M), generic over the coefficient ring.
//!
//! Elements are stored in the power basis 1, x, ..., x^(phi(M)-1) with x = zeta_M,
//! reduced modulo the M-th cyclotomic polynomial. Elements of different orders are
//! compared and combined inside Q(zeta_lcm).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, NumAssign, One, ToPrimitive, Zero};

use crate::arith::{gcd, lcm, prime_divisors};

/// Coefficient ring for cyclotomic elements.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + NumAssign + Neg<Output = Self> + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Coeff for T where
    T: Clone + PartialEq + fmt::Debug + NumAssign + Neg<Output = Self> + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Precomputed data for one order M.
#[derive(Debug)]
pub struct CycCtx {
    pub m: u32,
    pub phi: usize,
    /// Phi_M(x) = x^phi + sum of (index, coefficient) over `low`.
    low: Vec<(usize, i64)>,
}

fn poly_mul_binom(p: &[i64], d: usize) -> Vec<i64> {
    // p * (x^d - 1)
    let mut out = vec![0i64; p.len() + d];
    for (i, &a) in p.iter().enumerate() {
        out[i + d] += a;
        out[i] -= a;
    }
    out
}

fn poly_div_binom(p: &[i64], d: usize) -> Vec<i64> {
    // exact division by (x^d - 1)
    let n = p.len() - d;
    let mut rem = p.to_vec();
    let mut q = vec![0i64; n];
    for i in (0..n).rev() {
        let c = rem[i + d];
        q[i] = c;
        rem[i + d] -= c;
        rem[i] += c;
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

fn mobius(n: u64) -> i64 {
    let f = crate::arith::factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn cyclotomic_poly(m: u32) -> Vec<i64> {
    let r = crate::arith::radical(m as u64) as u32;
    let divs = crate::arith::divisors(r as u64);
    let mut p = vec![1i64];
    for &d in &divs {
        if mobius(r as u64 / d) == 1 {
            p = poly_mul_binom(&p, d as usize);
        }
    }
    for &d in &divs {
        if mobius(r as u64 / d) == -1 {
            p = poly_div_binom(&p, d as usize);
        }
    }
    // Phi_m(x) = Phi_r(x^(m/r))
    let s = (m / r) as usize;
    let mut out = vec![0i64; (p.len() - 1) * s + 1];
    for (i, a) in p.into_iter().enumerate() {
        out[i * s] = a;
    }
    out
}

impl CycCtx {
    fn build(m: u32) -> CycCtx {
        assert!(m >= 1);
        let poly = cyclotomic_poly(m);
        let phi = poly.len() - 1;
        assert_eq!(poly[phi], 1);
        let low = poly[..phi]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(i, &a)| (i, a))
            .collect();
        CycCtx { m, phi, low }
    }

    pub fn get(m: u32) -> Arc<CycCtx> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycCtx>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("cyclotomic cache poisoned");
        guard.entry(m).or_insert_with(|| Arc::new(CycCtx::build(m))).clone()
    }

    /// Reduces a polynomial of arbitrary length modulo Phi_M in place, leaving phi coefficients.
    pub fn reduce<T: Coeff>(&self, buf: &mut Vec<T>) {
        let phi = self.phi;
        if buf.len() < phi {
            buf.resize(phi, T::zero());
            return;
        }
        for j in (phi..buf.len()).rev() {
            if buf[j].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut buf[j], T::zero());
            let base = j - phi;
            for &(i, a) in &self.low {
                let slot = &mut buf[base + i];
                match a {
                    1 => *slot -= c.clone(),
                    -1 => *slot += c.clone(),
                    _ => *slot -= c.clone() * T::from_i64(a).expect("coefficient conversion"),
                }
            }
        }
        buf.truncate(phi);
    }

    /// Reduction for i128 buffers, the hot path of the Weil representation.
    pub fn reduce_i128(&self, buf: &mut [i128]) {
        let phi = self.phi;
        for j in (phi..buf.len()).rev() {
            let c = buf[j];
            if c == 0 {
                continue;
            }
            buf[j] = 0;
            let base = j - phi;
            for &(i, a) in &self.low {
                buf[base + i] -= c * a as i128;
            }
        }
    }
}

/// An element of Q(zeta_M) (or Z[zeta_M]) with coefficients in `T`.
#[derive(Clone)]
pub struct Cyclotomic<T> {
    ctx: Arc<CycCtx>,
    c: Vec<T>,
}

impl<T: Coeff> Cyclotomic<T> {
    pub fn zero(m: u32) -> Self {
        let ctx = CycCtx::get(m);
        let c = vec![T::zero(); ctx.phi];
        Cyclotomic { ctx, c }
    }

    pub fn one(m: u32) -> Self {
        Self::from_coeff(m, T::one())
    }

    pub fn from_coeff(m: u32, a: T) -> Self {
        let mut z = Self::zero(m);
        z.c[0] = a;
        z
    }

    pub fn from_i64(m: u32, a: i64) -> Self {
        Self::from_coeff(m, T::from_i64(a).expect("integer conversion"))
    }

    /// zeta_m^k.
    pub fn root(m: u32, k: i64) -> Self {
        let ctx = CycCtx::get(m);
        let mut buf = vec![T::zero(); m as usize];
        buf[k.rem_euclid(m as i64) as usize] = T::one();
        ctx.reduce(&mut buf);
        Cyclotomic { ctx, c: buf }
    }

    /// e(num/den) as an element of order lcm(den, 1) (or of order `m` if given and divisible).
    pub fn e(num: i64, den: i64) -> Self {
        assert!(den > 0);
        let g = gcd(num, den).max(1);
        let (n, d) = (num / g, den / g);
        Self::root(d as u32, n)
    }

    pub fn from_coords(m: u32, coords: Vec<T>) -> Self {
        let ctx = CycCtx::get(m);
        assert_eq!(coords.len(), ctx.phi, "coordinate vector length must be phi(M)");
        Cyclotomic { ctx, c: coords }
    }

    /// Builds an element from an unreduced polynomial in zeta_m of any length.
    pub fn from_poly(m: u32, mut poly: Vec<T>) -> Self {
        let ctx = CycCtx::get(m);
        ctx.reduce(&mut poly);
        Cyclotomic { ctx, c: poly }
    }

    pub fn order(&self) -> u32 {
        self.ctx.m
    }

    pub fn phi(&self) -> usize {
        self.ctx.phi
    }

    pub fn coords(&self) -> &[T] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|a| a.is_zero())
    }

    /// Rational value if the element lies in Q.
    pub fn to_rational(&self) -> Option<T> {
        if self.c[1..].iter().all(|a| a.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Embeds into Q(zeta_m2); m2 must be a multiple of the current order.
    pub fn lift(&self, m2: u32) -> Self {
        let m = self.order();
        if m == m2 {
            return self.clone();
        }
        assert!(m2 % m == 0, "cannot embed order {m} into {m2}");
        let s = (m2 / m) as usize;
        let mut buf = vec![T::zero(); (self.c.len().max(1) - 1) * s + 1];
        for (i, a) in self.c.iter().enumerate() {
            buf[i * s] = a.clone();
        }
        Self::from_poly(m2, buf)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.order() == other.order() {
            return (self.clone(), other.clone());
        }
        let m = lcm(self.order() as i64, other.order() as i64) as u32;
        (self.lift(m), other.lift(m))
    }

    pub fn scale(&self, a: &T) -> Self {
        Cyclotomic {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|x| x.clone() * a.clone()).collect(),
        }
    }

    /// Multiplies by zeta_M^k with M the current order.
    pub fn mul_root(&self, k: i64) -> Self {
        let m = self.order() as usize;
        let k = k.rem_euclid(m as i64) as usize;
        if k == 0 {
            return self.clone();
        }
        let mut buf = vec![T::zero(); m];
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                buf[(i + k) % m] = a.clone();
            }
        }
        self.ctx.reduce(&mut buf);
        Cyclotomic { ctx: self.ctx.clone(), c: buf }
    }

    /// Galois automorphism zeta -> zeta^u (u coprime to the order).
    pub fn galois(&self, u: i64) -> Self {
        let m = self.order() as usize;
        let mut buf = vec![T::zero(); m];
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                let j = ((i as i64 * u).rem_euclid(m as i64)) as usize;
                buf[j] += a.clone();
            }
        }
        self.ctx.reduce(&mut buf);
        Cyclotomic { ctx: self.ctx.clone(), c: buf }
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Cyclotomic<U> {
        Cyclotomic { ctx: self.ctx.clone(), c: self.c.iter().map(f).collect() }
    }

    pub fn to_complex<F: Float>(&self) -> Complex<F> {
        let m = self.order() as f64;
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for (i, a) in self.c.iter().enumerate() {
            let v = a.to_f64().expect("coefficient to float");
            if v == 0.0 {
                continue;
            }
            let t = 2.0 * std::f64::consts::PI * i as f64 / m;
            re += v * t.cos();
            im += v * t.sin();
        }
        Complex::new(F::from(re).unwrap(), F::from(im).unwrap())
    }

    fn mul_same(&self, other: &Self) -> Self {
        let phi = self.ctx.phi;
        let mut buf = vec![T::zero(); 2 * phi - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if !b.is_zero() {
                    buf[i + j] += a.clone() * b.clone();
                }
            }
        }
        self.ctx.reduce(&mut buf);
        Cyclotomic { ctx: self.ctx.clone(), c: buf }
    }
}

impl<T: Coeff> PartialEq for Cyclotomic<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.order() == other.order() {
            return self.c == other.c;
        }
        let (a, b) = self.common(other);
        a.c == b.c
    }
}

impl<T: Coeff> fmt::Debug for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc{}{:?}", self.order(), self.c)
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "({a})*z{}", self.order())?,
                _ => write!(f, "({a})*z{}^{i}", self.order())?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, T: Coeff> $tr<&'a Cyclotomic<T>> for &'a Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: &'a Cyclotomic<T>) -> Cyclotomic<T> {
                let f: fn(&Cyclotomic<T>, &Cyclotomic<T>) -> Cyclotomic<T> = $body;
                if self.order() == rhs.order() {
                    f(self, rhs)
                } else {
                    let (a, b) = self.common(rhs);
                    f(&a, &b)
                }
            }
        }
        impl<T: Coeff> $tr<Cyclotomic<T>> for Cyclotomic<T> {
            type Output = Cyclotomic<T>;
            fn $method(self, rhs: Cyclotomic<T>) -> Cyclotomic<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Cyclotomic {
    ctx: a.ctx.clone(),
    c: a.c.iter().zip(&b.c).map(|(x, y)| x.clone() + y.clone()).collect(),
});
binop!(Sub, sub, |a, b| Cyclotomic {
    ctx: a.ctx.clone(),
    c: a.c.iter().zip(&b.c).map(|(x, y)| x.clone() - y.clone()).collect(),
});
binop!(Mul, mul, |a, b| a.mul_same(b));

impl<T: Coeff> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        Cyclotomic { ctx: self.ctx.clone(), c: self.c.iter().map(|x| -x.clone()).collect() }
    }
}

impl<T: Coeff> Neg for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        -&self
    }
}

/// Accumulates sums of root-of-unity multiples in the group ring of Z/M before a
/// single reduction modulo Phi_M.
pub struct CycAcc<T> {
    m: u32,
    buf: Vec<T>,
}

impl<T: Coeff> CycAcc<T> {
    pub fn new(m: u32) -> Self {
        CycAcc { m, buf: vec![T::zero(); m as usize] }
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    /// Adds x * zeta_M^k where the order of x divides M.
    pub fn add_scaled_root(&mut self, x: &Cyclotomic<T>, k: i64) {
        let mo = x.order();
        assert!(self.m % mo == 0, "accumulator order {} not divisible by {}", self.m, mo);
        let s = (self.m / mo) as i64;
        let m = self.m as i64;
        for (i, a) in x.c.iter().enumerate() {
            if !a.is_zero() {
                self.buf[((i as i64 * s + k).rem_euclid(m)) as usize] += a.clone();
            }
        }
    }

    pub fn add_root(&mut self, a: T, k: i64) {
        let m = self.m as i64;
        self.buf[k.rem_euclid(m) as usize] += a;
    }

    pub fn finish(self) -> Cyclotomic<T> {
        Cyclotomic::from_poly(self.m, self.buf)
    }
}

/// Exact scalar type used for all representation data.
pub type CycScalar = Cyclotomic<BigRational>;
/// Integral workhorse type for Z[zeta_M].
pub type CycInt = Cyclotomic<i128>;

fn rpoly_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|a| a.is_zero()) {
        p.pop();
    }
}

fn rpoly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    rpoly_trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap().clone() / lead.clone();
        for (i, bi) in b.iter().enumerate() {
            r[k + i] -= c.clone() * bi.clone();
        }
        q[k] = c;
        rpoly_trim(&mut r);
    }
    (q, r)
}

fn rpoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x.clone() * y.clone();
        }
    }
    out
}

fn rpoly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y.clone();
    }
    rpoly_trim(&mut out);
    out
}

impl CycScalar {
    pub fn rational(m: u32, r: BigRational) -> Self {
        Self::from_coeff(m, r)
    }

    pub fn from_int_elem(x: &CycInt) -> Self {
        x.map(|a| BigRational::from_integer(BigInt::from(*a)))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm modulo Phi_M.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let m = self.order();
        if let Some(r) = self.to_rational() {
            return Some(Self::from_coeff(m, r.recip()));
        }
        let modulus: Vec<BigRational> = {
            let p = cyclotomic_poly(m);
            p.into_iter().map(|a| BigRational::from_integer(BigInt::from(a))).collect()
        };
        let mut a = self.c.clone();
        rpoly_trim(&mut a);
        // Invariant: s_i * a == r_i (mod modulus)
        let (mut r0, mut r1) = (modulus.clone(), a);
        let (mut s0, mut s1): (Vec<BigRational>, Vec<BigRational>) = (vec![], vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = rpoly_divmod(&r0, &r1);
            let s2 = rpoly_sub(&s0, &rpoly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r1.is_empty() {
            return None;
        }
        let c = r1[0].recip();
        let inv: Vec<BigRational> = s1.into_iter().map(|x| x * c.clone()).collect();
        let out = Self::from_poly(m, inv);
        debug_assert!((&out * self).is_one());
        Some(out)
    }

    /// Re-expresses the element in the smallest cyclotomic subfield Q(zeta_d) that contains it,
    /// searching d over divisors of the current order.
    pub fn shrink(&self) -> Self {
        let mut cur = self.clone();
        if let Some(r) = cur.to_rational() {
            return Self::from_coeff(1, r);
        }
        loop {
            let m = cur.order();
            let mut changed = false;
            for p in prime_divisors(m as u64) {
                let sub = m / p as u32;
                if let Some(x) = cur.descend_to(sub) {
                    cur = x;
                    changed = true;
                    break;
                }
            }
            if !changed {
                return cur;
            }
        }
    }

    /// The element as a member of Q(zeta_sub), if it lies there.
    pub fn descend_to(&self, sub: u32) -> Option<Self> {
        let m = self.order();
        assert!(m % sub == 0);
        if sub == m {
            return Some(self.clone());
        }
        let target = CycCtx::get(sub);
        let s = (m / sub) as usize;
        if CycCtx::get(m).phi == target.phi * s {
            // power basis of the subfield sits inside the big basis without reduction
            if self.c.iter().enumerate().any(|(i, a)| i % s != 0 && !a.is_zero()) {
                return None;
            }
            let coords = (0..target.phi).map(|i| self.c[i * s].clone()).collect();
            return Some(Self::from_coords(sub, coords));
        }
        // general case: solve the linear embedding system
        let cols: Vec<Vec<BigRational>> = (0..target.phi)
            .map(|i| Self::root(sub, i as i64).lift(m).c)
            .collect();
        let sol = crate::linalg::solve_columns(&cols, &self.c)?;
        let cand = Self::from_coords(sub, sol);
        if cand.lift(m) == *self {
            Some(cand)
        } else {
            None
        }
    }

    /// Real part if the element is real (fixed by conjugation).
    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }
}

impl From<&CycInt> for CycScalar {
    fn from(x: &CycInt) -> Self {
        CycScalar::from_int_elem(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(CycCtx::get(105).phi, 48);
    }

    #[test]
    fn roots_and_sums() {
        // 1 + zeta_3 + zeta_3^2 = 0
        let s = CycInt::root(3, 0) + CycInt::root(3, 1) + CycInt::root(3, 2);
        assert!(s.is_zero());
        // zeta_8^2 = i = zeta_4
        assert_eq!(CycInt::root(8, 2), CycInt::root(4, 1));
        // (zeta_8 + zeta_8^-1)^2 = 2
        let r2 = CycInt::root(8, 1) + CycInt::root(8, -1);
        assert_eq!(&r2 * &r2, CycInt::from_i64(1, 2));
    }

    #[test]
    fn inverse_and_shrink() {
        let x = CycScalar::root(12, 1) + CycScalar::rational(12, rat(3, 2));
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
        let i = CycScalar::root(24, 6);
        assert_eq!(i.shrink().order(), 4);
        let r = CycScalar::root(24, 12).shrink();
        assert_eq!(r.order(), 1);
        assert_eq!(r.to_rational().unwrap(), rat(-1, 1));
        // zeta_6 lives in Q(zeta_3)
        let z6 = CycScalar::root(6, 1).shrink();
        assert_eq!(z6.order(), 3);
        assert_eq!(z6, CycScalar::root(6, 1));
    }

    #[test]
    fn accumulator_matches_direct_sum() {
        let x = CycScalar::root(3, 1) + CycScalar::rational(3, rat(1, 2));
        let mut acc = CycAcc::new(12);
        acc.add_scaled_root(&x, 5);
        acc.add_scaled_root(&x, 7);
        let direct = &x.lift(12).mul_root(5) + &x.lift(12).mul_root(7);
        assert_eq!(acc.finish(), direct);
    }
}
