#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use weilbasis::fqm::Fqm;
use weilbasis::intmat::M2;
use weilbasis::lattice::{named, EvenLattice};

pub fn sum(a: &EvenLattice, b: &EvenLattice) -> EvenLattice {
    a.direct_sum(b).unwrap()
}

/// Discriminant forms from Gram fixtures, hyperbolic modules and direct sums.
pub fn module_corpus() -> Vec<(String, Arc<Fqm>)> {
    let mut out: Vec<(String, Arc<Fqm>)> = Vec::new();
    let lats = vec![
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
        sum(&named::a1(), &named::a2()),
        sum(&named::a2(), &named::a2()),
        sum(&named::a2(), &named::e8()),
        sum(&named::a1(), &named::d_n(4)),
    ];
    for l in lats {
        out.push((l.name.clone(), l.discriminant().clone()));
    }
    for n in 1..=6 {
        out.push((format!("hyperbolic({n})"), Arc::new(Fqm::hyperbolic(n))));
    }
    let a2 = named::a2().discriminant().clone();
    let h3 = Fqm::hyperbolic(3);
    out.push(("A2+hyperbolic(3)".into(), Arc::new(Fqm::direct_sum(&a2, &h3).module)));
    let a1 = named::a1().discriminant().clone();
    out.push(("A1+hyperbolic(2)".into(), Arc::new(Fqm::direct_sum(&a1, &Fqm::hyperbolic(2)).module)));
    out
}

/// Even-signature modules of order at most 36.
pub fn small_even_modules() -> Vec<(String, Arc<Fqm>)> {
    module_corpus()
        .into_iter()
        .filter(|(_, d)| d.size() <= 36 && d.signature().map(|s| s % 2 == 0).unwrap_or(false))
        .collect()
}

/// Random element of SL2(Z) with entries bounded by `bound`.
pub fn random_sl2<R: Rng>(rng: &mut R, bound: i64) -> M2 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        let d = rng.gen_range(-bound..=bound);
        if weilbasis::arith::gcd(c, d) != 1 {
            continue;
        }
        let (_, x, y) = weilbasis::arith::ext_gcd(d, c);
        // a d - b c = 1 with a = x, b = -y; shift by multiples of (c, d)
        let (mut a, mut b) = (x, -y);
        let t = if c != 0 { -((a as f64) / c as f64).round() as i64 } else { -((b as f64) / d as f64).round() as i64 };
        a += t * c;
        b += t * d;
        let m = [[a, b], [c, d]];
        if m.iter().flatten().all(|x| x.abs() <= bound) {
            assert_eq!(a * d - b * c, 1);
            return m;
        }
    }
}

/// Coefficients tau(0..=q) of Delta = q prod (1 - q^n)^24, via the pentagonal number series.
pub fn delta_coeffs(q: usize) -> Vec<i128> {
    let mut pent: Vec<(usize, i128)> = Vec::new();
    let mut k: i64 = 0;
    loop {
        let mut added = false;
        for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
            let e = (kk * (3 * kk - 1) / 2) as usize;
            if e <= q {
                pent.push((e, if kk % 2 == 0 { 1 } else { -1 }));
                added = true;
            }
        }
        if !added {
            break;
        }
        k += 1;
    }
    let mut cur = vec![0i128; q + 1];
    cur[0] = 1;
    for _ in 0..24 {
        let mut next = vec![0i128; q + 1];
        for (i, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(e, s) in &pent {
                if i + e <= q {
                    next[i + e] += s * c;
                }
            }
        }
        cur = next;
    }
    let mut out = vec![0i128; q + 1];
    out[1..].copy_from_slice(&cur[..q]);
    out
}

/// Same series from eta^3 = q^{1/8} sum (-1)^k (2k+1) q^{k(k+1)/2}, raised to the 8th power.
pub fn delta_coeffs_jacobi(q: usize) -> Vec<i128> {
    let mut e3 = vec![0i128; q + 1];
    let mut k = 0usize;
    while k * (k + 1) / 2 <= q {
        e3[k * (k + 1) / 2] += if k % 2 == 0 { 1 } else { -1 } * (2 * k as i128 + 1);
        k += 1;
    }
    let mut cur = vec![0i128; q + 1];
    cur[0] = 1;
    for _ in 0..8 {
        let mut next = vec![0i128; q + 1];
        for (i, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, &d) in e3.iter().enumerate() {
                if d != 0 && i + j <= q {
                    next[i + j] += c * d;
                }
            }
        }
        cur = next;
    }
    let mut out = vec![0i128; q + 1];
    out[1..].copy_from_slice(&cur[..q]);
    out
}


/// Delta on the trivial module as a weight-12 expansion.
pub fn delta_expansion(q: usize) -> weilbasis::vvmf::VVQExpansion {
    use num_rational::BigRational;
    let tau = delta_coeffs(q);
    let mut f = weilbasis::vvmf::VVQExpansion::new(
        Arc::new(Fqm::trivial()),
        weilbasis::arith::rat_int(12),
        weilbasis::arith::rat_int(q as i64),
    )
    .unwrap();
    f.cusp = true;
    for (n, t) in tau.iter().enumerate() {
        if *t != 0 {
            f.set_e(0, n as i64, weilbasis::CycScalar::rational(1, BigRational::from_integer((*t).into()))).unwrap();
        }
    }
    f
}
