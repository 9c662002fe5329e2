use std::sync::OnceLock;

use k3bps::invariants::{self, Convention};
use k3bps::mukai::{self, Isometry, MukaiVector, NSLattice, SearchBox};
use k3bps::rational::{self, Rational};
use k3bps::stability::{self, StabilityParam};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn lattice() -> NSLattice {
    NSLattice::k3(vec![vec![2, 1], vec![1, -2]]).unwrap()
}

fn hilb() -> &'static invariants::HilbSeries {
    static H: OnceLock<invariants::HilbSeries> = OnceLock::new();
    H.get_or_init(|| invariants::hilb_euler_series(60))
}

fn rat() -> impl Strategy<Value = Rational> {
    (-7i64..=7, 1i64..=5).prop_map(|(p, q)| rational::ratio(p, q))
}

fn int_vec() -> impl Strategy<Value = MukaiVector> {
    (-4i64..=4, -4i64..=4, -4i64..=4, -6i64..=6).prop_map(|(r, a, b, s)| MukaiVector::integral(r, &[a, b], s))
}

fn rat_vec() -> impl Strategy<Value = MukaiVector> {
    (rat(), rat(), rat(), rat()).prop_map(|(r, a, b, s)| MukaiVector::new(r, vec![a, b], s))
}

fn class() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rat(), 2)
}

/// Ample: `ω²` positive on the lattice.
fn param() -> impl Strategy<Value = StabilityParam> {
    (class(), class(), 1i64..=9, 1i64..=4).prop_filter_map("not ample", |(b, w, kp, kq)| {
        StabilityParam::new(b, w, rational::ratio(kp, kq), rational::ratio(1, 3), &lattice()).ok()
    })
}

fn spherical(l: [i64; 2]) -> MukaiVector {
    let ll = lattice().dot_int(&l, &l);
    MukaiVector::integral(1, &l, (ll + 2) / 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn pairing_symmetric_and_even(v in int_vec(), w in int_vec()) {
        let l = lattice();
        prop_assert_eq!(mukai::pairing(&v, &w, &l).unwrap(), mukai::pairing(&w, &v, &l).unwrap());
        let vv = rational::as_integer(&mukai::pairing(&v, &v, &l).unwrap()).unwrap();
        prop_assert!(vv.is_even());
    }

    #[test]
    fn twist_is_an_isometry_and_a_group_action(v in rat_vec(), w in rat_vec(), d in class(), e in class()) {
        let l = lattice();
        let tv = mukai::divisor_twist(&v, &d, &l).unwrap();
        let tw = mukai::divisor_twist(&w, &d, &l).unwrap();
        prop_assert_eq!(mukai::pairing(&tv, &tw, &l).unwrap(), mukai::pairing(&v, &w, &l).unwrap());
        let de: Vec<Rational> = d.iter().zip(&e).map(|(a, b)| a + b).collect();
        let twice = mukai::divisor_twist(&tv, &e, &l).unwrap();
        prop_assert_eq!(twice, mukai::divisor_twist(&v, &de, &l).unwrap());
        let zero = vec![Rational::zero(); 2];
        prop_assert_eq!(mukai::divisor_twist(&v, &zero, &l).unwrap(), v);
    }

    #[test]
    fn sqrt_squares_back(a in class(), b in rat()) {
        let l = lattice();
        let c = MukaiVector::new(Rational::one(), a, b);
        let root = mukai::sqrt_unit_class(&c, &l).unwrap();
        prop_assert_eq!(mukai::ring_mul(&root, &root, &l).unwrap(), c.clone());
        let inv = mukai::unit_inverse(&c, &l).unwrap();
        prop_assert_eq!(mukai::ring_mul(&c, &inv, &l).unwrap(), MukaiVector::unit(2));
    }

    #[test]
    fn reflections_preserve_pairing(a in -2i64..=2, b in -2i64..=2, v in int_vec(), w in int_vec()) {
        let l = lattice();
        let g = Isometry::reflection(&spherical([a, b]), &l).unwrap();
        let gv = g.apply(&v, &l).unwrap();
        let gw = g.apply(&w, &l).unwrap();
        prop_assert!(gv.is_integral());
        prop_assert_eq!(mukai::pairing(&gv, &gw, &l).unwrap(), mukai::pairing(&v, &w, &l).unwrap());
        prop_assert_eq!(g.apply(&gv, &l).unwrap(), v);
    }

    #[test]
    fn multiple_cover_isometry_invariant(a in -2i64..=2, b in -2i64..=2, v in int_vec()) {
        prop_assume!(!v.is_zero());
        let l = lattice();
        let hilb = hilb();
        let vv = rational::as_integer(&mukai::pairing(&v, &v, &l).unwrap()).unwrap();
        prop_assume!(Convention::Half.exponent(&vv).unwrap() <= 60);
        let g = Isometry::reflection(&spherical([a, b]), &l).unwrap();
        prop_assert!(invariants::isometry_invariance_check(&g, &v, &l, hilb, Convention::Half).unwrap());
    }

    #[test]
    fn rank_zero_j_equals_n(n in -6i64..=6, a in 0i64..=4, b in 0i64..=4) {
        prop_assume!(a + b > 0);
        let l = NSLattice::k3(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let hilb = hilb();
        let v = MukaiVector::integral(0, &[a, b], n);
        let j = invariants::multiple_cover_j(&v, &l, hilb, Convention::Half).unwrap();
        prop_assert_eq!(j, invariants::multiple_cover_n(n, &[a, b], &l, hilb).unwrap());
    }

    #[test]
    fn central_charge_is_the_exp_pairing(v in rat_vec(), p in param()) {
        let l = lattice();
        let z = stability::central_charge(&v, &p, &l).unwrap();
        let (re, im) = mukai::exp_pairing(&v, &p.b, &p.scaled_omega(), &l).unwrap();
        prop_assert_eq!((z.re, z.im), (re, im));
    }

    #[test]
    fn skyscraper_charge_is_minus_one(p in param()) {
        let z = stability::central_charge(&MukaiVector::integral(0, &[0, 0], 1), &p, &lattice()).unwrap();
        prop_assert_eq!(z.re, rational::int(-1));
        prop_assert!(z.im.is_zero());
    }

    #[test]
    fn rank_zero_imaginary_part_linear_in_k(v in rat_vec(), p in param(), k in 1i64..=12) {
        let l = lattice();
        let v = MukaiVector::new(Rational::zero(), v.l, v.s);
        let k = rational::int(k);
        let a = stability::central_charge(&v, &p, &l).unwrap();
        let b = stability::central_charge(&v, &p.with_k(&p.k * &k), &l).unwrap();
        prop_assert_eq!(b.im, a.im * k);
        prop_assert_eq!(b.re, a.re);
    }

    #[test]
    fn reduced_hilbert_homogeneous(v in rat_vec(), p in param(), c in 1i64..=6, r in 1u32..=4) {
        prop_assume!(!v.rk.is_zero());
        let l = lattice();
        let c = rational::int(c);
        let w = p.scaled_omega();
        let base = stability::reduced_hilbert(&v, &p.b, &w, r, &l).unwrap();
        let scaled = stability::reduced_hilbert(&v.scale(&c), &p.b, &w, r, &l).unwrap();
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn rank_zero_hilbert_matches_charge(v in rat_vec(), p in param()) {
        let l = lattice();
        let v = MukaiVector::new(Rational::zero(), v.l, v.s);
        prop_assume!(!l.dot(&v.l, &p.omega).unwrap().is_zero());
        prop_assert!(stability::lemma46_check(&v, &p, &l).unwrap());
    }

    #[test]
    fn equal_hilbert_means_aligned(a in -3i64..=3, b in -3i64..=3, s in -5i64..=5, t in -5i64..=5, p in param()) {
        // for rank zero, equal reduced polynomials force Re/Im to agree
        let l = lattice();
        let v = MukaiVector::integral(0, &[a, b], s);
        prop_assume!(!l.dot(&v.l, &p.omega).unwrap().is_zero());
        let v2 = v.scale(&rational::int(2)).add(&MukaiVector::integral(0, &[0, 0], t - s));
        let same = stability::reduced_hilbert(&v, &p.b, &p.scaled_omega(), 1, &l).unwrap().monic()
            == stability::reduced_hilbert(&v2, &p.b, &p.scaled_omega(), 1, &l).unwrap().monic();
        let aligned = stability::alignment(&v, &v2, &p, &l).unwrap().is_zero();
        prop_assert_eq!(same, aligned);
    }
}

#[test]
fn enumeration_monotone_in_the_box() {
    let l = lattice();
    let b = vec![rational::ratio(1, 3), Rational::zero()];
    let w = vec![Rational::one(), Rational::zero()];
    let m = rational::int(4);
    let small = mukai::enumerate_bounded(&l, &b, &w, &m, SearchBox { rk: 1, l: 2, s: 2 }).unwrap();
    let big = mukai::enumerate_bounded(&l, &b, &w, &m, SearchBox { rk: 2, l: 3, s: 4 }).unwrap();
    assert!(!small.is_empty());
    for v in &small {
        assert!(big.contains(v));
        let (re, im) = mukai::exp_pairing(v, &b, &w, &l).unwrap();
        assert!(re.clone() * re + im.clone() * im <= m.clone() * &m);
    }
    // entries inside the small box are exactly the small enumeration
    let inside: Vec<_> = big
        .iter()
        .filter(|v| {
            let ints = v.to_integers().unwrap();
            ints[0].abs() <= 1.into() && ints[1].abs() <= 2.into() && ints[2].abs() <= 2.into() && ints[3].abs() <= 2.into()
        })
        .cloned()
        .collect();
    assert_eq!(inside, small);
}
