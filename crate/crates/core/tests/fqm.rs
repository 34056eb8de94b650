mod common;

use std::sync::Arc;

use proptest::prelude::*;
use weilbasis::arith::{rat, rat_int};
use weilbasis::fqm::{sqrt_int, Fqm, IsotropicSubgroup};
use weilbasis::lattice::named;
use weilbasis::{CycInt, Error};

/// Signature from the realizing data: rank for positive-definite lattices, 0 for hyperbolic planes.
fn corpus_with_signatures() -> Vec<(String, Arc<Fqm>, i64)> {
    let mut out = Vec::new();
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
        common::sum(&named::a1(), &named::a2()),
        common::sum(&named::a2(), &named::a2()),
        common::sum(&named::a2(), &named::e8()),
        common::sum(&named::a1(), &named::d_n(4)),
    ];
    for l in lats {
        out.push((l.name.clone(), l.discriminant().clone(), l.rank() as i64 % 8));
    }
    for n in 1..=6 {
        out.push((format!("hyperbolic({n})"), Arc::new(Fqm::hyperbolic(n)), 0));
    }
    let a2 = named::a2().discriminant().clone();
    out.push(("A2+hyperbolic(3)".into(), Arc::new(Fqm::direct_sum(&a2, &Fqm::hyperbolic(3)).module), 2));
    let a1 = named::a1().discriminant().clone();
    out.push(("A1+hyperbolic(2)".into(), Arc::new(Fqm::direct_sum(&a1, &Fqm::hyperbolic(2)).module), 1));
    out
}

#[test]
fn milgram_suite() {
    let corpus = corpus_with_signatures();
    assert!(corpus.len() >= 20);
    for (name, d, sign) in &corpus {
        let lhs = d.gauss_sum();
        let rhs = &CycInt::root(8, *sign) * &sqrt_int(d.size() as u64);
        assert_eq!(lhs, rhs, "{name}");
        assert_eq!(d.signature().unwrap(), *sign, "{name}");
    }
}

#[test]
fn sqrt_is_a_square_root() {
    for n in 1..=60u64 {
        let r = sqrt_int(n);
        assert_eq!(&r * &r, CycInt::from_i64(1, n as i64));
    }
}

#[test]
fn lattice_examples() {
    let d = named::a1().discriminant().clone();
    assert_eq!(d.orders(), &[2]);
    assert_eq!(d.q(1), rat(1, 4));
    let e8 = named::e8().discriminant().clone();
    assert_eq!(e8.size(), 1);
    assert!(matches!(Fqm::from_even_lattice(&vec![vec![2, 2], vec![2, 2]]), Err(Error::DegenerateLattice)));
    assert!(matches!(Fqm::from_even_lattice(&vec![vec![1]]), Err(Error::NotEven)));
    // |D| = |det|
    for l in [named::a_n(4), named::d_n(5), named::diagonal(&[2, 4])] {
        assert_eq!(l.discriminant().size() as i128, l.det().abs());
    }
}

#[test]
fn gauss_sum_examples() {
    let a2 = named::a2().discriminant().clone();
    // 1 + 2 e(1/3) = i sqrt 3
    let g = a2.gauss_sum();
    assert_eq!(g, &CycInt::root(4, 1) * &sqrt_int(3));
    let a1 = named::a1().discriminant().clone();
    assert_eq!(a1.gauss_sum(), &CycInt::one(1) + &CycInt::root(4, 1));
    assert_eq!(Fqm::hyperbolic(2).gauss_sum(), CycInt::from_i64(1, 2));
    assert_eq!(Fqm::trivial().signature().unwrap(), 0);
}

#[test]
fn levels_and_ranks() {
    let a2 = named::a2().discriminant().clone();
    assert_eq!((a2.level(), a2.p_rank(3), a2.p_rank(2)), (3, 1, 0));
    let h2 = Fqm::hyperbolic(2);
    assert_eq!(h2.p_rank(2), 2);
    let t = Fqm::trivial();
    assert_eq!(t.level(), 1);
    assert!((2..20).all(|p| t.p_rank(p) == 0));
    for (name, d, _) in corpus_with_signatures() {
        // level is the least N with N q = 0
        let n = d.level();
        assert!(d.elements().all(|x| (d.q(x) * rat_int(n)).is_integer()), "{name}");
        for m in 1..n {
            assert!(d.elements().any(|x| !(d.q(x) * rat_int(m)).is_integer()), "{name}");
        }
    }
}

#[test]
fn p_decomposition_is_orthogonal_and_complete() {
    for (name, d, _) in corpus_with_signatures() {
        let mut parts: Vec<Arc<Fqm>> = Vec::new();
        let mut embeds: Vec<Vec<usize>> = Vec::new();
        for (p, _) in weilbasis::arith::factorize(d.size() as u64) {
            let (m, e) = d.p_component(p as i64).unwrap();
            parts.push(Arc::new(m));
            embeds.push(e);
        }
        if parts.is_empty() {
            continue;
        }
        // pieces are mutually orthogonal and their product covers D
        for i in 0..embeds.len() {
            for j in i + 1..embeds.len() {
                for &x in &embeds[i] {
                    for &y in &embeds[j] {
                        assert!(d.bil(x, y).is_integer(), "{name}");
                    }
                }
            }
        }
        let mut sum = parts[0].as_ref().clone();
        for p in &parts[1..] {
            sum = Fqm::direct_sum(&sum, p).module;
        }
        let sum = Arc::new(sum);
        assert!(!sum.isometries(&d).unwrap().is_empty(), "{name}");
    }
}

#[test]
fn torsion_examples() {
    let z9 = Fqm::new(vec![9], vec![vec![rat(2, 9)]], vec![rat(1, 9)]).unwrap();
    let (dc, img, _) = z9.torsion_sets(3);
    assert_eq!(dc, vec![0, 3, 6]);
    assert_eq!(img, vec![0, 3, 6]);
    let a1 = named::a1().discriminant().clone();
    let (dc, img, dcs) = a1.torsion_sets(2);
    assert_eq!((dc, img, dcs), (vec![0, 1], vec![0], vec![1]));
    for (name, d, _) in corpus_with_signatures() {
        for c in [1, 3, 5] {
            let (_, img, dcs) = d.torsion_sets(c);
            if d.level() % c != 0 || c == 1 {
                assert_eq!(img, dcs, "{name}");
            }
            if c % 2 == 1 {
                assert_eq!(d.x_c(c).unwrap(), 0);
                for mu in d.elements() {
                    let g = d.scale(mu, c);
                    let want = d.q(mu) * rat_int(c);
                    assert!((d.q_c(c, g).unwrap() - want).is_integer(), "{name}");
                }
            }
        }
        // D^c is the orthogonal complement of D_c
        for c in [2, 3, 4, 6] {
            let (dc, img, _) = d.torsion_sets(c);
            for g in d.elements() {
                let orth = dc.iter().all(|&a| d.bil(a, g).is_integer());
                assert_eq!(orth, img.contains(&g), "{name} c={c}");
            }
        }
    }
}

#[test]
fn chi_examples_and_multiplicativity() {
    let a2 = named::a2().discriminant().clone();
    assert_eq!(a2.oddity().unwrap(), 0);
    assert_eq!(a2.chi(2).unwrap(), CycInt::from_i64(1, -1));
    for (name, d, _) in corpus_with_signatures() {
        let n = d.level();
        assert!(d.chi(1).unwrap().is_one(), "{name}");
        let units: Vec<i64> = (1..40).filter(|&l| weilbasis::arith::gcd(l, n) == 1).collect();
        for &l in &units {
            for &m in &units {
                if l * m < 60 {
                    assert_eq!(d.chi(l * m).unwrap(), &d.chi(l).unwrap() * &d.chi(m).unwrap(), "{name}");
                }
            }
        }
        if n > 1 {
            assert!(matches!(d.chi(n), Err(Error::NotCoprime(..))));
        }
    }
}

#[test]
fn isotropic_subgroups_and_quotients() {
    let t = Arc::new(Fqm::trivial());
    assert_eq!(t.isotropic_subgroups().unwrap().len(), 1);
    let a2 = named::a2().discriminant().clone();
    assert_eq!(a2.isotropic_subgroups().unwrap().len(), 1);
    for (name, d, sign) in corpus_with_signatures() {
        for h in d.isotropic_subgroups().unwrap() {
            let q = d.quotient(&h).unwrap();
            assert_eq!(q.module.size() * h.order() * h.order(), d.size(), "{name}");
            assert_eq!(q.module.signature().unwrap(), sign, "{name}");
        }
    }
    let h3 = Arc::new(Fqm::hyperbolic(3));
    let h = IsotropicSubgroup::generated_by(h3.clone(), &[h3.index(&[1, 0])]).unwrap();
    assert_eq!(h3.quotient(&h).unwrap().module.size(), 1);
    let not_iso = IsotropicSubgroup::generated_by(h3.clone(), &[h3.index(&[1, 1])]);
    assert!(matches!(not_iso, Err(Error::NotIsotropic)));
}

#[test]
fn isometry_examples() {
    let t = Arc::new(Fqm::trivial());
    assert_eq!(t.orthogonal_group().unwrap().len(), 1);
    let a2 = named::a2().discriminant().clone();
    assert_eq!(a2.orthogonal_group().unwrap().len(), 2);
    let a1 = named::a1().discriminant().clone();
    assert!(a2.isometries(&a1).unwrap().is_empty());
    for (name, d, _) in corpus_with_signatures().into_iter().filter(|(_, d, _)| d.size() <= 64) {
        let og = d.orthogonal_group().unwrap();
        for s in &og {
            assert!(d.elements().all(|x| d.q(x) == d.q(s.apply(x))), "{name}");
            for t in &og {
                let st = s.compose(t).unwrap();
                assert!(og.iter().any(|u| (0..d.size()).all(|x| u.apply(x) == st.apply(x))), "{name}");
            }
        }
    }
}

#[test]
fn enumeration_cap() {
    let big = Arc::new(Fqm::hyperbolic(101));
    assert!(matches!(big.isotropic_subgroups(), Err(Error::TooLarge(_))));
}

#[test]
fn json_roundtrip() {
    for (name, d, _) in corpus_with_signatures() {
        let j = d.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back = Fqm::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, *d, "{name}");
    }
}

fn corpus_index() -> impl Strategy<Value = (usize, usize)> {
    let n = corpus_with_signatures().len();
    (0..n, 0..n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quadratic_form_axioms((i, _j) in corpus_index()) {
        let (_, d, _) = &corpus_with_signatures()[i];
        for x in d.elements() {
            prop_assert_eq!((d.q(x) * rat_int(2) - d.bil(x, x)).is_integer(), true);
            for y in d.elements().step_by(3) {
                let lhs = d.q(d.add(x, y)) - d.q(x) - d.q(y) - d.bil(x, y);
                prop_assert!(lhs.is_integer());
            }
        }
    }

    #[test]
    fn signature_is_additive((i, j) in corpus_index(), n in 1i64..=6) {
        let c = corpus_with_signatures();
        let (_, a, sa) = &c[i];
        let (_, b, sb) = &c[j];
        if a.size() * b.size() <= 2000 {
            let s = Fqm::direct_sum(a, b).module;
            prop_assert_eq!(s.signature().unwrap(), (sa + sb) % 8);
        }
        let h = Fqm::direct_sum(a, &Fqm::hyperbolic(n)).module;
        prop_assert_eq!(h.signature().unwrap(), *sa);
    }
}
