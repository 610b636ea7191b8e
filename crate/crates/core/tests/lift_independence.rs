//! The sphere class of a lift `(v, w)` does not depend on the choice of `w`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use suslin_forge::epin::transitive_witness;
use suslin_forge::orbit::{sphere_partition, SphereAction, DEFAULT_BUDGET};
use suslin_forge::ring::Ring;
use suslin_forge::sampling::random_unit_point;
use suslin_forge::suslin::SpherePoint;
use suslin_forge::verify::random_second_lift;

#[test]
fn witnesses_join_fifty_random_lifts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for r in [
        Ring::integers(),
        Ring::zmod(8).unwrap(),
        Ring::parse("poly:zmod:3:2").unwrap(),
    ] {
        for k in 0..50 {
            let n = 3 + k % 3;
            let p = random_unit_point(&r, n, &mut rng);
            let w2 = random_second_lift(&p, &mut rng);
            let target = SpherePoint::new(&r, p.v().to_vec(), w2.clone()).unwrap();
            assert!(target.is_unit());
            let wit = transitive_witness(p.v(), p.w(), &w2, &r).unwrap();
            assert_eq!(wit.orthogonal.act(&p).unwrap(), target, "{}", p.describe());
            assert_eq!(wit.epsilon.body().row_times(p.w()).unwrap(), w2);
        }
    }
}

#[test]
fn lifts_share_a_class_over_small_rings() {
    for m in [2, 3, 4] {
        let r = Ring::zmod(m).unwrap();
        for action in [SphereAction::Epin, SphereAction::Orthogonal] {
            let (sphere, part) = sphere_partition(&r, 3, DEFAULT_BUDGET, action).unwrap();
            let class_of = part.class_of();
            let mut first: std::collections::HashMap<Vec<u8>, usize> = Default::default();
            for (i, p) in sphere.iter().enumerate() {
                let key: Vec<u8> = p.v().iter().flat_map(|e| r.canonical_bytes(e)).collect();
                let c = *first.entry(key).or_insert(class_of[i]);
                assert_eq!(c, class_of[i], "Z/{m}: {}", p.describe());
            }
        }
    }
}

#[test]
fn mismatched_products_are_rejected() {
    let r = Ring::zmod(5).unwrap();
    let v = [r.one(), r.zero(), r.zero()];
    let w1 = [r.one(), r.zero(), r.zero()];
    let w2 = [r.from_i64(2), r.zero(), r.zero()];
    assert!(transitive_witness(&v, &w1, &w2, &r).is_err());
}
