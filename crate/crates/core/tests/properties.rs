use proptest::prelude::*;

use suslin_forge::composition::{
    alg_mul, alg_norm, compose_recursive, z_matrix, AlgElement, Algebra,
};
use suslin_forge::epin::{act_closed_form, act_on_point, EpinGenerator};
use suslin_forge::ring::Ring;
use suslin_forge::suslin::{decode_suslin, suslin, suslin_pair, SpherePoint, UnitKind};
use suslin_forge::vaserstein::vaserstein_matrix;

const M: u64 = 12;

fn ring() -> Ring {
    Ring::zmod(M).unwrap()
}

fn point(n: usize) -> impl Strategy<Value = SpherePoint> {
    (
        prop::collection::vec(0..M as i64, n),
        prop::collection::vec(0..M as i64, n),
    )
        .prop_map(|(v, w)| SpherePoint::from_i64(&ring(), &v, &w).unwrap())
}

fn any_point() -> impl Strategy<Value = SpherePoint> {
    (2usize..=5).prop_flat_map(point)
}

fn element(alg: Algebra) -> impl Strategy<Value = AlgElement> {
    prop::collection::vec(0..M as i64, alg.rank())
        .prop_map(move |c| AlgElement::from_i64(&ring(), alg, &c).unwrap())
}

fn algebra() -> impl Strategy<Value = Algebra> {
    prop_oneof![Just(Algebra::SplitQuaternion), Just(Algebra::SplitOctonion)]
}

fn kind() -> impl Strategy<Value = UnitKind> {
    prop_oneof![Just(UnitKind::E), Just(UnitKind::F)]
}

proptest! {
    #[test]
    fn suslin_times_bar_is_q(p in any_point()) {
        let (s, s_bar) = suslin_pair(&p);
        prop_assert!((&s * &s_bar).is_scalar(&p.q()));
        prop_assert!((&s_bar * &s).is_scalar(&p.q()));
    }

    #[test]
    fn suslin_is_linear(p in point(4), q in point(4)) {
        let sum = suslin(&p.add(&q).unwrap());
        prop_assert_eq!(sum.body().clone(), suslin(&p).body() + suslin(&q).body());
    }

    #[test]
    fn decode_inverts_suslin(p in any_point()) {
        prop_assert_eq!(decode_suslin(suslin(&p).body()).unwrap(), p);
    }

    #[test]
    fn epin_action_preserves_q(p in point(4), first in kind(), second in kind(), i in 2usize..=4, l in 0..M as i64) {
        let r = ring();
        let g = EpinGenerator::new(&r, first, second, i, r.from_i64(l), 4).unwrap();
        let moved = act_on_point(&g, &p).unwrap();
        prop_assert_eq!(moved.q(), p.q());
        prop_assert_eq!(&moved, &act_closed_form(&g, &p).unwrap());
        prop_assert_eq!(act_on_point(&g.inverse(), &moved).unwrap(), p);
    }

    #[test]
    fn pfaffian_is_q(p in point(3)) {
        prop_assert_eq!(vaserstein_matrix(&p).unwrap().pfaffian().elem, p.q());
    }

    #[test]
    fn norm_is_multiplicative(alg in algebra(), seed in any::<[i64; 16]>()) {
        let r = ring();
        let rank = alg.rank();
        let a = AlgElement::from_i64(&r, alg, &seed[..rank]).unwrap();
        let b = AlgElement::from_i64(&r, alg, &seed[8..8 + rank]).unwrap();
        let lhs = alg_norm(&alg_mul(&a, &b).unwrap());
        prop_assert_eq!(lhs, alg_norm(&a).mul(&alg_norm(&b)).unwrap());
    }

    #[test]
    fn compose_multiplies_q(
        a in element(Algebra::SplitQuaternion),
        b in element(Algebra::SplitQuaternion),
        v in prop::collection::vec(0..M as i64, 2),
        w1 in prop::collection::vec(0..M as i64, 2),
        w2 in prop::collection::vec(0..M as i64, 2),
    ) {
        let r = ring();
        let row = |xs: &[i64]| xs.iter().map(|&x| r.from_i64(x)).collect::<Vec<_>>();
        let x = z_matrix(&a, &row(&v), &row(&w1)).unwrap();
        let y = z_matrix(&b, &row(&v), &row(&w2)).unwrap();
        let xy = compose_recursive(&x, &y).unwrap();
        prop_assert_eq!(xy.q().clone(), r.mul(x.q(), y.q()));
    }
}
