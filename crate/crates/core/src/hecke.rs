//! Hecke operators T(l^2) on truncated expansions, scalar companions, symmetry vectors and Phi.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factorize, fmt_rat, gcd, is_prime, lcm, rat, rat_int};
use crate::cyclotomic::{CycAcc, CycScalar};
use crate::error::{Error, Result};
use crate::fqm::{sqrt_int, Fqm};
use crate::intmat::{m2_det, M2};
use crate::linalg;
use crate::poly;
use crate::vvmf::{ScalarSeries, ThetaSpan, VVQExpansion};
use crate::weilrep::{apply_coprime_inverse, rho_coset_inverse, GroupAlgebraVector, WeilCtx};

/// Right coset representatives Gamma \ M_l.
#[derive(Clone, Debug)]
pub struct CosetRepSet {
    pub l: i64,
    pub reps: Vec<M2>,
}

impl CosetRepSet {
    /// Pairwise inequivalence under left multiplication by SL2(Z).
    pub fn pairwise_inequivalent(&self) -> bool {
        for i in 0..self.reps.len() {
            for j in 0..i {
                if left_equivalent(&self.reps[i], &self.reps[j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// a b^{-1} in SL2(Z).
pub fn left_equivalent(a: &M2, b: &M2) -> bool {
    let d = m2_det(b);
    if d == 0 || m2_det(a) != d {
        return false;
    }
    let adj = crate::intmat::m2_adj(b);
    let p = crate::intmat::m2_mul(a, &adj);
    p.iter().flatten().all(|x| x % d == 0)
}

/// delta_{s,b} = (p^s b; 0 p^{2r-s}).
pub fn coset_reps(p: i64, r: u32) -> Result<CosetRepSet> {
    if !is_prime(p as u64) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    let mut reps = Vec::new();
    for s in 0..=2 * r {
        let a = p.pow(s);
        let d = p.pow(2 * r - s);
        for b in 0..d {
            if s > 0 && s < 2 * r && b % p == 0 {
                continue;
            }
            reps.push([[a, b], [0, d]]);
        }
    }
    Ok(CosetRepSet { l: p.pow(r), reps })
}

/// Products of prime-power representatives over the factorization of l.
pub fn coset_reps_general(l: i64) -> Result<CosetRepSet> {
    if l < 1 {
        return Err(Error::Invalid("l must be positive".into()));
    }
    let mut reps: Vec<M2> = vec![crate::intmat::M2_ID];
    for (p, e) in factorize(l as u64) {
        let local = coset_reps(p as i64, e)?;
        let mut next = Vec::with_capacity(reps.len() * local.reps.len());
        for a in &reps {
            for b in &local.reps {
                next.push(crate::intmat::m2_mul(a, b));
            }
        }
        reps = next;
    }
    Ok(CosetRepSet { l, reps })
}

/// Upper-triangular representatives of Gamma \ {M : det M = l^2}.
pub fn all_upper_reps(l: i64) -> Vec<M2> {
    let n = l * l;
    let mut out = Vec::new();
    for a in 1..=n {
        if n % a != 0 {
            continue;
        }
        let d = n / a;
        for b in 0..d {
            out.push([[a, b], [0, d]]);
        }
    }
    out
}

fn rho_matrix(ctx: &Arc<WeilCtx>, apply: impl Fn(&GroupAlgebraVector) -> Result<GroupAlgebraVector>) -> Result<Vec<Vec<(usize, CycScalar)>>> {
    // column j = image of e^j; stored as rows[out] = [(in, entry)]
    let n = ctx.size();
    let mut rows: Vec<Vec<(usize, CycScalar)>> = vec![Vec::new(); n];
    for j in 0..n {
        let img = apply(&GroupAlgebraVector::basis(ctx, &[j]))?;
        for i in img.support() {
            rows[i].push((j, img.entry(i).shrink()));
        }
    }
    Ok(rows)
}

fn coeff_order(f: &VVQExpansion) -> u32 {
    f.iter().fold(1u32, |acc, (_, _, c)| lcm(acc as i64, c.shrink().order() as i64) as u32)
}

/// l^{k-2} sum_delta rho(delta)^{-1} f|_k[delta] for upper-triangular delta of determinant l^2.
fn hecke_sum(
    f: &VVQExpansion,
    l: i64,
    reps: &[M2],
    action: &dyn Fn(&M2) -> Result<Vec<Vec<(usize, CycScalar)>>>,
) -> Result<VVQExpansion> {
    let k = f.integral_weight()?;
    let n = f.level();
    let l2 = l * l;
    let prec_out = rat_int((&f.prec / rat_int(l2)).floor().to_integer().to_i64().unwrap());
    if prec_out < BigRational::one() {
        return Err(Error::PrecisionExhausted(format!(
            "precision {} is too small for T({l2}): need at least {l2}",
            fmt_rat(&f.prec)
        )));
    }
    let t_max = (&prec_out * rat_int(n * l2)).to_integer().to_i64().unwrap();
    let ctx = WeilCtx::new(f.module.clone())?;
    let big = lcm(lcm(ctx.m as i64, coeff_order(f) as i64), n * l2) as u32;

    let mut slices: BTreeMap<i64, Vec<(usize, CycScalar)>> = BTreeMap::new();
    for (g, e, c) in f.iter() {
        slices.entry(e).or_default().push((g, c.shrink()));
    }
    let mut acc: HashMap<(i64, usize), CycAcc<BigRational>> = HashMap::new();
    for delta in reps {
        let (a, b, c, d) = (delta[0][0], delta[0][1], delta[1][0], delta[1][1]);
        assert!(c == 0 && a * d == l2 && a > 0, "representative must be upper triangular with det l^2");
        let r = action(delta)?;
        // l^{k-2} det^{k/2} d^{-k}
        let scale = num_traits::pow(rat_int(l), (2 * k - 2) as usize) / num_traits::pow(rat_int(d), k as usize);
        for (&e, slice) in &slices {
            // output exponent (e/N)(a/d) on the grid 1/(N l^2)
            let t = e * a * a;
            if t > t_max {
                continue;
            }
            let mut by_in: HashMap<usize, &CycScalar> = HashMap::new();
            for (g, c) in slice {
                by_in.insert(*g, c);
            }
            let root = (e * b).rem_euclid(n * d) * (big as i64 / (n * d));
            for (g_out, row) in r.iter().enumerate() {
                let mut w = CycScalar::zero(1);
                for (g_in, entry) in row {
                    if let Some(c) = by_in.get(g_in) {
                        w = &w + &(entry * *c);
                    }
                }
                if w.is_zero() {
                    continue;
                }
                let w = w.scale(&scale);
                acc.entry((t, g_out)).or_insert_with(|| CycAcc::new(big)).add_scaled_root(&w, root);
            }
        }
    }
    let mut out = VVQExpansion::new(f.module.clone(), f.weight.clone(), prec_out)?;
    out.cusp = f.cusp;
    let mut keys: Vec<(i64, usize)> = acc.keys().copied().collect();
    keys.sort();
    for key in keys {
        let v = acc.remove(&key).unwrap().finish().shrink();
        if v.is_zero() {
            continue;
        }
        let (t, g) = key;
        if t % l2 != 0 || !out.admissible(g, t / l2) {
            return Err(Error::Invalid(format!(
                "Hecke sum left a nonzero coefficient at exponent {} in component {g}",
                fmt_rat(&rat(t, n * l2))
            )));
        }
        out.set_e(g, t / l2, v)?;
    }
    Ok(out)
}

/// T(l^2) f with precision floor(Q / l^2).
pub fn hecke_t(f: &VVQExpansion, l: i64) -> Result<VVQExpansion> {
    if l < 1 {
        return Err(Error::Invalid("l must be positive".into()));
    }
    if l == 1 {
        return Ok(f.clone());
    }
    f.module.require_even_signature()?;
    let ctx = WeilCtx::new(f.module.clone())?;
    let reps = coset_reps_general(l)?;
    hecke_sum(f, l, &reps.reps, &|delta| {
        let op = rho_coset_inverse(&ctx, delta)?;
        rho_matrix(&ctx, |v| Ok(op.apply(v)))
    })
}

/// T~(l^2) for (l, N) = 1: all matrices of determinant l^2 acting by chi(l) rho(delta~^{-1}).
pub fn hecke_t_tilde(f: &VVQExpansion, l: i64) -> Result<VVQExpansion> {
    let n = f.level();
    if gcd(l, n) != 1 {
        return Err(Error::NotCoprime(l, n));
    }
    if l == 1 {
        return Ok(f.clone());
    }
    f.module.require_even_signature()?;
    let ctx = WeilCtx::new(f.module.clone())?;
    let reps = all_upper_reps(l);
    hecke_sum(f, l, &reps, &|delta| rho_matrix(&ctx, |v| apply_coprime_inverse(v, delta, l)))
}

/// T^x(p^{2r}) g = p^{rk-2r} sum_b e(-bx) g|_k[(1 b; 0 p^{2r})].
pub fn hecke_tx(g: &ScalarSeries, k: i64, x: &BigRational, p: i64, r: u32) -> Result<ScalarSeries> {
    let pp = p.pow(2 * r);
    let prec = &g.prec / rat_int(pp);
    let mut out = ScalarSeries::new(prec.clone());
    if r == 0 {
        for (n, c) in &g.coeffs {
            out.add_to(n.clone(), c);
        }
        return Ok(out);
    }
    // p^{rk-2r} times the slash factor det^{k/2} d^{-k} = p^{rk} p^{-2rk}
    let pw = |e: i64| -> BigRational {
        if e >= 0 {
            num_traits::pow(rat_int(p), e as usize)
        } else {
            num_traits::pow(rat(1, p), (-e) as usize)
        }
    };
    let r_ = r as i64;
    let scale = pw(r_ * k - 2 * r_) * pw(r_ * k) * pw(-2 * r_ * k);
    let mut acc: BTreeMap<BigRational, CycScalar> = BTreeMap::new();
    for (n, c) in &g.coeffs {
        let m = n / rat_int(pp);
        if m > prec || c.is_zero() {
            continue;
        }
        let mut s = CycScalar::zero(1);
        for b in 0..pp {
            // e(-b x) e(n b / P)
            let th = (n / rat_int(pp) - x) * rat_int(b);
            let (num, den) = crate::arith::rat_to_i64_pair(&th);
            s = &s + &CycScalar::e(num, den);
        }
        let term = (c * &s).scale(&scale);
        let e = acc.entry(m).or_insert_with(|| CycScalar::zero(1));
        *e = &*e + &term;
    }
    for (m, v) in acc {
        let v = v.shrink();
        if v.is_zero() {
            continue;
        }
        if !(&m - x).is_integer() {
            return Err(Error::Invalid(format!("T^x left a coefficient at exponent {} off the class of x", fmt_rat(&m))));
        }
        out.add_to(m, &v);
    }
    Ok(out)
}

/// gamma not in D^p, and for p = 2 also not in D^{2*}.
pub fn component_hypothesis(d: &Fqm, gamma: usize, p: i64) -> bool {
    let (_, dp, _) = d.torsion_sets(p);
    if dp.contains(&gamma) {
        return false;
    }
    if p == 2 {
        let (_, _, d2s) = d.torsion_sets(2);
        if d2s.contains(&gamma) {
            return false;
        }
    }
    true
}

/// <T(p^{2r}) f, e^gamma> = T^{q(gamma)}(p^{2r}) <f, e^{p^r gamma}>.
pub fn check_component_identity(f: &VVQExpansion, gamma: usize, p: i64, r: u32) -> Result<bool> {
    let d = &f.module;
    if !component_hypothesis(d, gamma, p) {
        return Err(Error::HypothesisNotMet(format!("element {:?} lies in D^{p} or D^{{2*}}", d.coords(gamma))));
    }
    let l = p.pow(r);
    let lhs = hecke_t(f, l)?.component(gamma);
    let rhs = hecke_tx(&f.component(d.scale(gamma, l)), f.integral_weight()?, &d.q(gamma), p, r)?;
    Ok(lhs.agrees_with(&rhs))
}

/// v_{gamma, mu, P} = sum_{S subset P} (-1)^{|S|} e^{gamma_S^mu}.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryVector {
    pub module: Arc<Fqm>,
    pub gamma: usize,
    pub mu: usize,
    pub primes: Vec<i64>,
    pub coeffs: BTreeMap<usize, i64>,
}

/// gamma with its p-components replaced by those of mu for p in S.
pub fn mix_components(d: &Fqm, gamma: usize, mu: usize, s: &[i64]) -> usize {
    let mut x = gamma;
    for &p in s {
        x = d.add(x, d.neg(d.p_part(gamma, p)));
        x = d.add(x, d.p_part(mu, p));
    }
    x
}

impl SymmetryVector {
    pub fn to_vector(&self, ctx: &Arc<WeilCtx>) -> Result<GroupAlgebraVector> {
        let mut e = vec![CycScalar::zero(1); self.module.size()];
        for (&g, &c) in &self.coeffs {
            e[g] = CycScalar::rational(1, rat_int(c));
        }
        GroupAlgebraVector::from_entries(ctx, 1, &e)
    }

    /// <f, v> as a scalar series.
    pub fn pair(&self, f: &VVQExpansion) -> ScalarSeries {
        let mut s = ScalarSeries::new(f.prec.clone());
        for (g, e, c) in f.iter() {
            if let Some(&v) = self.coeffs.get(&g) {
                s.add_to(f.exponent(e), &c.scale(&rat_int(v)));
            }
        }
        s
    }
}

fn symmetry_vector_unchecked(d: &Arc<Fqm>, gamma: usize, mu: usize, primes: &[i64]) -> SymmetryVector {
    let mut coeffs: BTreeMap<usize, i64> = BTreeMap::new();
    for mask in 0u32..(1 << primes.len()) {
        let s: Vec<i64> = (0..primes.len()).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).collect();
        let sign = if s.len() % 2 == 0 { 1 } else { -1 };
        *coeffs.entry(mix_components(d, gamma, mu, &s)).or_insert(0) += sign;
    }
    coeffs.retain(|_, c| *c != 0);
    SymmetryVector { module: d.clone(), gamma, mu, primes: primes.to_vec(), coeffs }
}

/// Checks the hypotheses of the symmetry corollary.
pub fn symmetry_hypotheses(d: &Fqm, gamma: usize, mu: usize, primes: &[i64]) -> Result<()> {
    let prod: i64 = primes.iter().product();
    if d.scale(d.add(gamma, d.neg(mu)), prod) != 0 {
        return Err(Error::HypothesisNotMet("(prod p)(gamma - mu) != 0".into()));
    }
    if d.q_num(gamma) != d.q_num(mu) {
        return Err(Error::HypothesisNotMet("q(gamma) != q(mu)".into()));
    }
    for &p in primes {
        if !component_hypothesis(d, gamma, p) || !component_hypothesis(d, mu, p) {
            return Err(Error::HypothesisNotMet(format!("gamma or mu lies in D^{p} (or D^{{2*}})")));
        }
    }
    Ok(())
}

pub fn symmetry_vector(d: &Arc<Fqm>, gamma: usize, mu: usize, primes: &[i64]) -> Result<SymmetryVector> {
    let set: BTreeSet<i64> = primes.iter().copied().collect();
    if set.len() != primes.len() || primes.iter().any(|&p| !is_prime(p as u64)) {
        return Err(Error::Invalid("P must be a set of primes".into()));
    }
    symmetry_hypotheses(d, gamma, mu, primes)?;
    Ok(symmetry_vector_unchecked(d, gamma, mu, primes))
}

/// <T(p^{2r}) f, v_{gamma, mu^gamma_p, P\p} - v_{gamma^mu_p, mu, P\p}> = 0 for r >= 1.
pub fn check_symmetry_step(f: &VVQExpansion, gamma: usize, mu: usize, primes: &[i64], p: i64, r: u32) -> Result<bool> {
    if r == 0 || !primes.contains(&p) {
        return Err(Error::Invalid("need r >= 1 and p in P".into()));
    }
    let d = &f.module;
    symmetry_hypotheses(d, gamma, mu, primes)?;
    let rest: Vec<i64> = primes.iter().copied().filter(|&q| q != p).collect();
    let mu_g = mix_components(d, mu, gamma, &[p]);
    let g_mu = mix_components(d, gamma, mu, &[p]);
    let v1 = symmetry_vector_unchecked(d, gamma, mu_g, &rest);
    let v2 = symmetry_vector_unchecked(d, g_mu, mu, &rest);
    let t = hecke_t(f, p.pow(r))?;
    let a = v1.pair(&t);
    let b = v2.pair(&t);
    Ok(a.agrees_with(&b))
}

// ---------------------------------------------------------------- Phi

/// C(k) = i^k pi / (2^{k-3} (k-1)) without the factor pi.
pub fn c_k(k: i64) -> CycScalar {
    let r = BigRational::new(BigInt::one(), BigInt::from(2).pow((k - 3).max(0) as u32) * BigInt::from(k - 1))
        * if k < 3 { rat_int(1i64 << (3 - k)) } else { rat_int(1) };
    CycScalar::rational(4, r).mul_root(k.rem_euclid(4))
}

/// C(m, k) = G_m^h(1,1) (k-1)! / (m/2-1)! C(k), without pi.
pub fn c_mk(m: usize, k: i64) -> Result<CycScalar> {
    let h = k - m as i64 / 2;
    if h < 0 || m % 2 != 0 || m < 2 {
        return Err(Error::Invalid("need even m and k >= m/2".into()));
    }
    let g: BigRational = poly::gegenbauer(m, h as u32).coeffs.iter().sum();
    let f = BigRational::from_integer(crate::arith::factorial((k - 1) as u64))
        / BigRational::from_integer(crate::arith::factorial((m / 2 - 1) as u64));
    Ok(c_k(k).scale(&(g * f)))
}

/// Phi f truncated at l <= l_max, stored as a multiple of pi.
#[derive(Clone, Debug)]
pub struct PhiImage {
    pub expansion: VVQExpansion,
    pub pi_power: u32,
    pub l_max: i64,
    pub warnings: Vec<String>,
}

/// C(m,k) e(-sign/8) / sqrt|D| sum_{l <= l_max} T(l^2) f / l^{2k-2-h}.
pub fn phi_operator(f: &VVQExpansion, m: usize, l_max: i64, allow_small_m: bool) -> Result<PhiImage> {
    let k = f.integral_weight()?;
    let mut warnings = Vec::new();
    if m <= 6 {
        if !allow_small_m {
            return Err(Error::HypothesisNotMet(format!("m = {m} but the Hecke series form of Phi needs m > 6")));
        }
        warnings.push(format!("m = {m} <= 6: outside the hypothesis of the Hecke series identity"));
    }
    if !f.cusp {
        warnings.push("input is not flagged cuspidal".into());
    }
    let d = &f.module;
    let sign = d.require_even_signature()?;
    let h = k - m as i64 / 2;
    let size = d.size() as u64;
    let sqrt = CycScalar::from_int_elem(&sqrt_int(size)).scale(&rat(1, size as i64));
    let pre = &(&c_mk(m, k)? * &CycScalar::e(-sign, 8)) * &sqrt;
    let mut total: Option<VVQExpansion> = None;
    for l in 1..=l_max {
        let t = hecke_t(f, l)?;
        let w = BigRational::new(BigInt::one(), BigInt::from(l).pow((2 * k - 2 - h) as u32));
        let t = t.scale_rat(&w);
        total = Some(match total {
            None => t,
            Some(acc) => acc.try_add(&t)?,
        });
    }
    let total = total.ok_or_else(|| Error::Invalid("l_max must be positive".into()))?;
    Ok(PhiImage { expansion: total.scale(&pre), pi_power: 1, l_max, warnings })
}

/// If the truncated Phi kills f on H^perp/H, whether it also kills the lift of f on D.
/// None when the premise fails.
pub fn kernel_inheritance_check(
    f: &VVQExpansion,
    target: &Arc<Fqm>,
    quotient: &crate::fqm::Quotient,
    m: usize,
    l_max: i64,
    allow_small_m: bool,
) -> Result<Option<bool>> {
    let down = phi_operator(f, m, l_max, allow_small_m)?;
    if !down.expansion.is_zero() {
        return Ok(None);
    }
    let up = crate::vvmf::lift_expansion(target, quotient, f)?;
    let image = phi_operator(&up, m, l_max, allow_small_m)?;
    Ok(Some(image.expansion.is_zero()))
}

// ---------------------------------------------------------------- eigenvalues and matrices

/// lambda with T(l^2) f = lambda f (to the output precision), if f is an eigenform.
pub fn hecke_eigenvalue(f: &VVQExpansion, l: i64) -> Result<Option<CycScalar>> {
    let t = hecke_t(f, l)?;
    let base = f.truncate(&t.prec);
    let Some((g, e, c)) = base.iter().next() else {
        return Err(Error::PrecisionExhausted("no nonzero coefficient survives truncation".into()));
    };
    let lambda = &t.get_e(g, e) * &c.inverse().unwrap();
    Ok(if base.scale(&lambda).agrees_with(&t) { Some(lambda.shrink()) } else { None })
}

/// Matrix of T(l^2) on a span (columns are images of basis elements in basis coordinates),
/// computed on the truncation to floor(Q/l^2).
pub fn hecke_matrix(span: &ThetaSpan, l: i64) -> Result<Vec<Vec<CycScalar>>> {
    let basis = span.basis_expansions();
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let images: Vec<VVQExpansion> = basis.iter().map(|f| hecke_t(f, l)).collect::<Result<_>>()?;
    let prec = images[0].prec.clone();
    let index = VVQExpansion::index_set(&span.module, &prec);
    let cols: Vec<Vec<CycScalar>> = basis.iter().map(|f| f.truncate(&prec).to_vector(&index)).collect();
    if linalg::rank(&cols) < cols.len() {
        return Err(Error::PrecisionExhausted(format!(
            "basis is not independent at precision {}; increase Q",
            fmt_rat(&prec)
        )));
    }
    let mut mat = vec![vec![CycScalar::zero(1); basis.len()]; basis.len()];
    for (j, img) in images.iter().enumerate() {
        let rhs = img.to_vector(&index);
        let x = linalg::solve_columns(&cols, &rhs)
            .ok_or_else(|| Error::Invalid("T(l^2) image is not in the span at this precision".into()))?;
        for i in 0..basis.len() {
            mat[i][j] = x[i].shrink();
        }
    }
    Ok(mat)
}

/// Characteristic polynomial of T(l^2) on a span, coefficients low degree first.
pub fn hecke_charpoly(span: &ThetaSpan, l: i64) -> Result<Vec<CycScalar>> {
    let m = hecke_matrix(span, l)?;
    Ok(linalg::charpoly(&m).into_iter().map(|c| c.shrink()).collect())
}

/// Partial sums sum_{l <= L} lambda(l^2) / l^s for s = 2k - 2 - h.
pub fn eigenvalue_partial_sums(f: &VVQExpansion, m: usize, l_max: i64) -> Result<Vec<(i64, BigRational)>> {
    let k = f.integral_weight()?;
    let h = k - m as i64 / 2;
    let mut out = Vec::new();
    let mut s = BigRational::zero();
    for l in 1..=l_max {
        let lam = hecke_eigenvalue(f, l)?
            .ok_or_else(|| Error::Invalid(format!("not an eigenform of T({})", l * l)))?
            .to_rational()
            .ok_or_else(|| Error::Invalid("eigenvalue is not rational".into()))?;
        s += lam / BigRational::from_integer(BigInt::from(l).pow((2 * k - 2 - h) as u32));
        out.push((l, s.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rep_counts() {
        assert_eq!(coset_reps(2, 1).unwrap().len(), 6);
        assert_eq!(coset_reps(3, 1).unwrap().len(), 12);
        assert_eq!(coset_reps(2, 2).unwrap().len(), 24);
        let r = coset_reps(3, 1).unwrap();
        assert!(r.reps.contains(&[[9, 0], [0, 1]]));
        assert!(r.pairwise_inequivalent());
        let g = coset_reps_general(6).unwrap();
        assert_eq!(g.len(), 72);
        assert!(g.pairwise_inequivalent());
        assert!(g.reps.iter().all(|m| m2_det(m) == 36));
    }

    #[test]
    fn c12() {
        assert_eq!(c_k(12), CycScalar::rational(1, rat(1, 5632)));
    }
}
