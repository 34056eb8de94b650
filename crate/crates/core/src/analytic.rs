//! Double-precision evaluation and numeric checks of the analytic identities.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fqm::Fqm;
use crate::intmat::M2;
use crate::lattice::EvenLattice;
use crate::vvmf::{genus2_theta_slice, theta_series, VVQExpansion};
use crate::weilrep::{apply_rho, rho_coset_inverse, GroupAlgebraVector, WeilCtx};

pub type CVec = Vec<Complex64>;
pub type CMat = Vec<Vec<Complex64>>;

/// A point of the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPoint(pub Complex64);

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) {
            return Err(Error::Invalid(format!("Im tau = {im} is not positive")));
        }
        Ok(ComplexPoint(Complex64::new(re, im)))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }
}

/// e(x) = exp(2 pi i x) for complex x.
pub fn e_c(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * x).exp()
}

pub fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn mat_sup(m: &CMat) -> f64 {
    m.iter().map(|r| sup_norm(r)).fold(0.0, f64::max)
}

/// Value of f at tau plus a bound on the truncation tail.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: CVec,
    pub tail: f64,
}

/// Tail of sum_{j > j0} C (j/N)^k exp(-2 pi y j / N), summed until the terms fall
/// geometrically, then bounded by the geometric remainder.
fn geometric_tail(c: f64, k: f64, n: f64, y: f64, j0: i64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let term = |j: i64| c * (j as f64 / n).powf(k) * (-2.0 * PI * y * j as f64 / n).exp();
    let mut total = 0.0;
    let mut j = j0 + 1;
    loop {
        let t = term(j);
        let ratio = term(j + 1) / t;
        total += t;
        if ratio < 0.5 && t < 1e-300_f64.max(total * 1e-18) {
            break;
        }
        if ratio < 0.9 {
            // remaining terms decrease at least as fast as ratio^i
            total += term(j + 1) / (1.0 - ratio);
            break;
        }
        j += 1;
    }
    total
}

/// Growth constant max |c(g, n)| / n^w over the stored positive exponents.
fn growth_constant(f: &VVQExpansion, w: f64) -> f64 {
    let n = f.level() as f64;
    let mut c: f64 = 0.0;
    for (_, e, v) in f.iter() {
        if e > 0 {
            let x = e as f64 / n;
            c = c.max(v.to_complex::<f64>().norm() / x.powf(w));
        }
    }
    c
}

/// sum c(g, n) e(n tau) per component, with a geometric estimate of the tail beyond the precision.
pub fn eval_expansion(f: &VVQExpansion, tau: ComplexPoint, tol: f64) -> Result<Evaluation> {
    let z = tau.z();
    let size = f.module.size();
    let n = f.level();
    let mut value = vec![Complex64::zero(); size];
    for (g, e, c) in f.iter() {
        value[g] += c.to_complex::<f64>() * e_c(z * (e as f64 / n as f64));
    }
    let w = f.weight.to_f64().unwrap_or(1.0).max(1.0);
    let cst = growth_constant(f, w);
    let j0 = (&f.prec * num_rational::BigRational::from_integer(n.into())).floor().to_integer().to_i64().unwrap_or(i64::MAX / 2);
    let tail = size as f64 * geometric_tail(cst, w, n as f64, z.im, j0);
    if tail > tol {
        return Err(Error::TailTooLarge { tail, tol });
    }
    Ok(Evaluation { value, tail })
}

/// Complex matrix of rho(M) in the standard basis (column beta is rho(M) e^beta).
pub fn rho_complex(ctx: &Arc<WeilCtx>, m: &M2) -> Result<CMat> {
    let size = ctx.size();
    let mut out = vec![vec![Complex64::zero(); size]; size];
    for b in 0..size {
        let v = apply_rho(&GroupAlgebraVector::basis(ctx, &[b]), m)?;
        for (a, row) in out.iter_mut().enumerate() {
            row[b] = v.entry(a).to_complex();
        }
    }
    Ok(out)
}

fn mat_vec(m: &CMat, v: &[Complex64]) -> CVec {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// (c tau + d)^k on the principal branch.
fn automorphy(m: &M2, tau: Complex64, k: f64) -> Complex64 {
    let j = Complex64::new(m[1][0] as f64, 0.0) * tau + m[1][1] as f64;
    (j.ln() * k).exp()
}

fn moebius(m: &M2, tau: Complex64) -> Complex64 {
    (tau * m[0][0] as f64 + m[0][1] as f64) / (tau * m[1][0] as f64 + m[1][1] as f64)
}

/// ||f(M tau) - (c tau + d)^k rho(M) f(tau)||_inf. Non-integral weights use the principal branch.
pub fn modularity_residual(f: &VVQExpansion, m: &M2, tau: ComplexPoint, tol: f64) -> Result<f64> {
    if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1 {
        return Err(Error::Invalid("matrix is not in SL2(Z)".into()));
    }
    let ctx = WeilCtx::new(f.module.clone())?;
    let mt = ComplexPoint::new(moebius(m, tau.z()).re, moebius(m, tau.z()).im)?;
    let lhs = eval_expansion(f, mt, tol)?;
    let rhs = eval_expansion(f, tau, tol)?;
    let k = f.weight.to_f64().unwrap();
    let j = automorphy(m, tau.z(), k);
    let rv = mat_vec(&rho_complex(&ctx, m)?, &rhs.value);
    Ok(lhs.value.iter().zip(&rv).map(|(a, b)| (a - j * b).norm()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug)]
pub struct LipschitzResult {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub diff: f64,
    pub bound: f64,
}

/// sum_n e(nx)(z+n)^{-k} against ((-2 pi i)^k/(k-1)!) sum_{r in Z-x, r>0} r^{k-1} e(rz).
pub fn lipschitz_check(k: u32, x: f64, z: Complex64, n_terms: i64) -> Result<LipschitzResult> {
    if k < 2 || z.im <= 0.0 {
        return Err(Error::Invalid("need k >= 2 and Im z > 0".into()));
    }
    let kf = k as f64;
    let xr = x - x.floor();
    // pair n and -n so the partial sums stay balanced
    let mut lhs = (z).powi(-(k as i32));
    for n in 1..=n_terms {
        let nf = n as f64;
        lhs += e_c(Complex64::new(nf * xr, 0.0)) * (z + nf).powi(-(k as i32));
        lhs += e_c(Complex64::new(-nf * xr, 0.0)) * (z - nf).powi(-(k as i32));
    }
    let nt = n_terms as f64;
    let lhs_tail = 2.0 * (nt - z.re.abs()).max(1.0).powf(1.0 - kf) / (kf - 1.0);

    let fact: f64 = (1..k).map(|i| i as f64).product();
    let pref = Complex64::new(0.0, -2.0 * PI).powi(k as i32) / fact;
    let r0 = if xr == 0.0 { 1.0 } else { 1.0 - xr };
    let mut rhs = Complex64::zero();
    let mut i = 0;
    let decay = (-2.0 * PI * z.im).exp();
    let rhs_tail;
    loop {
        let r = r0 + i as f64;
        let t = r.powf(kf - 1.0) * e_c(z * r);
        rhs += t;
        let next = (r + 1.0).powf(kf - 1.0) * decay.powf(r + 1.0);
        let ratio = ((r + 1.0) / r).powf(kf - 1.0) * decay;
        if ratio < 0.5 && next < 1e-18 * rhs.norm().max(1e-300) {
            rhs_tail = pref.norm() * next / (1.0 - ratio);
            break;
        }
        i += 1;
    }
    let rhs = pref * rhs;
    Ok(LipschitzResult { lhs, rhs, diff: (lhs - rhs).norm(), bound: lhs_tail + rhs_tail })
}

/// Partial sum of omega_l and the size of its outermost shell.
#[derive(Clone, Debug)]
pub struct OmegaEval {
    /// value[beta][gamma]: coefficient of e^beta (x) e^gamma.
    pub value: CMat,
    pub last_shell: f64,
    pub terms: usize,
}

fn gcd4(a: i64, b: i64, c: i64, d: i64) -> i64 {
    crate::arith::gcd(crate::arith::gcd(a, b), crate::arith::gcd(c, d))
}

/// Sum over (a b; c d) of determinant l^2 with coprime entries and max |entry| <= entry_bound of
/// (c z z' + a z + d z' + b)^{-k} rho(M)^{-1} e^gamma (x) e^gamma.
/// M and -M are combined through rho(-I).
pub fn omega_l_eval(d: &Arc<Fqm>, k: u32, l: i64, z: Complex64, zp: Complex64, entry_bound: i64) -> Result<OmegaEval> {
    if k <= 3 {
        return Err(Error::Invalid("omega_l partial sums need k > 3".into()));
    }
    if entry_bound < 10 || l < 1 {
        return Err(Error::Invalid("need entry_bound >= 10 and l >= 1".into()));
    }
    let ctx = WeilCtx::new(d.clone())?;
    ctx.require_even()?;
    let size = ctx.size();
    let det = l * l;
    let modulus = d.level() * det;
    let mut cache: HashMap<[i64; 4], CMat> = HashMap::new();
    let mut total = vec![vec![Complex64::zero(); size]; size];
    let mut shell = vec![vec![Complex64::zero(); size]; size];
    let mut terms = 0usize;
    let bnd = entry_bound;
    for a in -bnd..=bnd {
        for b in -bnd..=bnd {
            for c in -bnd..=bnd {
                let ds: Vec<i64> = if a != 0 {
                    let num = det + b * c;
                    if num % a != 0 {
                        continue;
                    }
                    vec![num / a]
                } else if -b * c == det {
                    (-bnd..=bnd).collect()
                } else {
                    continue;
                };
                for dd in ds {
                    if dd.abs() > bnd || gcd4(a, b, c, dd) != 1 {
                        continue;
                    }
                    // keep the representative whose first nonzero entry is positive
                    let first = [a, b, c, dd].into_iter().find(|&x| x != 0).unwrap();
                    if first < 0 {
                        continue;
                    }
                    let m: M2 = [[a, b], [c, dd]];
                    let key = [a.rem_euclid(modulus), b.rem_euclid(modulus), c.rem_euclid(modulus), dd.rem_euclid(modulus)];
                    let rinv = match cache.get(&key) {
                        Some(r) => r,
                        None => {
                            let op = rho_coset_inverse(&ctx, &m)?;
                            let mut r = vec![vec![Complex64::zero(); size]; size];
                            for (g, col) in op.cols.iter().enumerate() {
                                for (bta, row) in r.iter_mut().enumerate() {
                                    row[g] = col.entry(bta).to_complex();
                                }
                            }
                            cache.entry(key).or_insert(r)
                        }
                    };
                    let w = (z * zp * c as f64 + z * a as f64 + zp * dd as f64 + b as f64).powi(-(k as i32));
                    let on_shell = [a, b, c, dd].iter().map(|x| x.abs()).max().unwrap() == bnd;
                    for bta in 0..size {
                        for g in 0..size {
                            let t = w * rinv[bta][g];
                            total[bta][g] += t;
                            if on_shell {
                                shell[bta][g] += t;
                            }
                        }
                    }
                    terms += 2;
                }
            }
        }
    }
    // -M contributes (-1)^k rho(-I)^{-1} times the term of M
    let neg = rho_complex(&ctx, &[[-1, 0], [0, -1]])?;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let fold = |s: &CMat| -> CMat {
        let mut out = s.clone();
        for (i, row) in out.iter_mut().enumerate() {
            for (g, x) in row.iter_mut().enumerate() {
                // rho(-I)^{-1} = conj transpose of rho(-I)
                let mut acc = Complex64::zero();
                for (j, sj) in s.iter().enumerate() {
                    acc += neg[j][i].conj() * sj[g];
                }
                *x += acc * sign;
            }
        }
        out
    };
    let value = fold(&total);
    let last_shell = mat_sup(&fold(&shell));
    Ok(OmegaEval { value, last_shell, terms })
}

pub fn omega_norm(w: &OmegaEval) -> f64 {
    mat_sup(&w.value)
}

/// Residual of theta^{(2)}_L(diag(z, z')) against theta_L(z) (x) theta_L(z') at precision prec.
pub fn diagonal_factorization_check(l: &EvenLattice, z: ComplexPoint, zp: ComplexPoint, prec: i64, tol: f64) -> Result<f64> {
    let q = num_rational::BigRational::from_integer(prec.into());
    let slice = genus2_theta_slice(l, &q, 0)?;
    let n = l.discriminant().level() as f64;
    let size = slice.module.size();
    let mut diag = vec![vec![Complex64::zero(); size]; size];
    for (&(g, b, e1, e2), jets) in &slice.coeffs {
        let c = jets[0].to_f64().unwrap();
        diag[g][b] += e_c(z.z() * (e1 as f64 / n) + zp.z() * (e2 as f64 / n)) * c;
    }
    let th = theta_series(l, None, &crate::poly::HarmonicPolynomial::one(l.rank()), &q)?;
    let a = eval_expansion(&th, z, tol)?;
    let b = eval_expansion(&th, zp, tol)?;
    let mut r: f64 = 0.0;
    for g in 0..size {
        for h in 0..size {
            r = r.max((diag[g][h] - a.value[g] * b.value[h]).norm());
        }
    }
    Ok(r)
}
