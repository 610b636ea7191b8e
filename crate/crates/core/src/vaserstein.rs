//! Vaserstein symbols: the alternating matrix `V(v, w) = beta S_2(v, w) J_2
//! beta^T` attached to a point of `H(R^3)`, Pfaffians, orthogonal sums of
//! alternating forms, and the transport of the `Spin_6` action
//! `g . S = g S g*` to the congruence action `V -> g' V g'^T`.

use serde_json::{json, Value};

use crate::epin::{epin_blocks, EpinGenerator};
use crate::error::{Error, Result};
use crate::matrix::MatrixR;
use crate::ring::{Ring, RingValue};
use crate::suslin::{decode_suslin, j_matrix, star, suslin_pair, SpherePoint};

/// `[[1,0,0,0],[0,-1,0,0],[0,0,0,1],[0,0,-1,0]]`
pub fn beta_matrix(ring: &Ring) -> MatrixR {
    MatrixR::from_i64(
        ring,
        &[&[1, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 0, 1], &[0, 0, -1, 0]],
    )
    .expect("square literal")
}

/// `A^T = -A` with zero diagonal.
pub fn is_alternating(m: &MatrixR) -> bool {
    let r = m.ring();
    (0..m.dim()).all(|i| {
        r.is_zero(m.get(i, i)) && (0..i).all(|j| r.is_zero(&r.add(m.get(i, j), m.get(j, i))))
    })
}

fn require_alternating(m: &MatrixR) -> Result<()> {
    if !is_alternating(m) {
        return Err(Error::NotAlternating(format!("{m}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingMatrix4 {
    body: MatrixR,
}

impl AlternatingMatrix4 {
    pub fn new(body: MatrixR) -> Result<Self> {
        if body.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: body.dim(),
            });
        }
        require_alternating(&body)?;
        Ok(AlternatingMatrix4 { body })
    }

    pub fn body(&self) -> &MatrixR {
        &self.body
    }

    pub fn into_body(self) -> MatrixR {
        self.body
    }

    pub fn pfaffian(&self) -> RingValue {
        pfaffian4(self)
    }

    pub fn to_json(&self) -> Value {
        self.body.to_json()
    }
}

/// `pf = a_12 a_34 - a_13 a_24 + a_14 a_23`
pub fn pfaffian4(a: &AlternatingMatrix4) -> RingValue {
    let m = &a.body;
    let r = m.ring();
    let t1 = r.mul(m.get(0, 1), m.get(2, 3));
    let t2 = r.mul(m.get(0, 2), m.get(1, 3));
    let t3 = r.mul(m.get(0, 3), m.get(1, 2));
    r.value(r.add(&r.sub(&t1, &t2), &t3))
}

fn require_n3(p: &SpherePoint) -> Result<()> {
    if p.n() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: p.n(),
        });
    }
    Ok(())
}

/// `V(v, w) = beta S_2(v, w) J_2 beta^T`.
pub fn vaserstein_matrix(p: &SpherePoint) -> Result<AlternatingMatrix4> {
    require_n3(p)?;
    let r = p.ring();
    let beta = beta_matrix(r);
    let s = suslin_pair(p).0;
    let v = &(&(&beta * &s) * &j_matrix(r, 2)?) * &beta.transpose();
    AlternatingMatrix4::new(v)
}

/// The same matrix written out entrywise:
///
/// ```text
/// [  0  -a1 -a2 -a3 ]
/// [ a1    0 -b3  b2 ]
/// [ a2   b3   0 -b1 ]
/// [ a3  -b2  b1   0 ]
/// ```
pub fn vaserstein_display(p: &SpherePoint) -> Result<MatrixR> {
    require_n3(p)?;
    let r = p.ring();
    let (a, b) = (p.v(), p.w());
    let z = r.zero();
    let n = |x| r.neg(x);
    MatrixR::from_rows(
        r,
        vec![
            vec![z.clone(), n(&a[0]), n(&a[1]), n(&a[2])],
            vec![a[0].clone(), z.clone(), n(&b[2]), b[1].clone()],
            vec![a[1].clone(), b[2].clone(), z.clone(), n(&b[0])],
            vec![a[2].clone(), n(&b[1]), b[0].clone(), z],
        ],
    )
}

/// `A perp B = diag(A, B)`.
pub fn perp(a: &MatrixR, b: &MatrixR) -> Result<MatrixR> {
    require_alternating(a)?;
    require_alternating(b)?;
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch {
            left: a.ring().to_string(),
            right: b.ring().to_string(),
        });
    }
    let r = a.ring();
    let n = a.dim() + b.dim();
    Ok(MatrixR::from_fn(r, n, |i, j| {
        if i < a.dim() && j < a.dim() {
            a.get(i, j).clone()
        } else if i >= a.dim() && j >= a.dim() {
            b.get(i - a.dim(), j - a.dim()).clone()
        } else {
            r.zero()
        }
    }))
}

/// `psi_1 = [[0, 1], [-1, 0]]`, `psi_r = psi_{r-1} perp psi_1`.
pub fn psi(ring: &Ring, r: usize) -> MatrixR {
    let psi1 = MatrixR::from_i64(ring, &[&[0, 1], &[-1, 0]]).expect("square literal");
    let mut out = psi1.clone();
    for _ in 1..r.max(1) {
        out = perp(&out, &psi1).expect("psi blocks are alternating");
    }
    out
}

/// A raw representative of a class in `W_E(R)`: a `4 x 4` alternating
/// matrix with Pfaffian one. Stable equivalence is not decided here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittElementRaw {
    body: AlternatingMatrix4,
}

impl WittElementRaw {
    pub fn new(body: AlternatingMatrix4) -> Result<Self> {
        let pf = body.pfaffian();
        if !pf.owner.is_one(&pf.elem) {
            return Err(Error::Precondition(format!("Pfaffian is {pf}, not 1")));
        }
        Ok(WittElementRaw { body })
    }

    pub fn body(&self) -> &AlternatingMatrix4 {
        &self.body
    }
}

/// `p'` with `S(p') = g S(p) g*`.
pub fn spin6_act(g: &MatrixR, p: &SpherePoint) -> Result<SpherePoint> {
    require_n3(p)?;
    if g.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: g.dim(),
        });
    }
    let s = suslin_pair(p).0;
    decode_suslin(&(&(g * &s) * &star(g, 2)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transport {
    /// `g' = beta g beta^T`
    pub g_prime: MatrixR,
    /// `g' V(p) g'^T`, equal to `V(moved)`.
    pub v_prime: AlternatingMatrix4,
    pub moved: SpherePoint,
}

impl Transport {
    pub fn to_json(&self) -> Value {
        json!({
            "g_prime": self.g_prime.to_json(),
            "v_prime": self.v_prime.to_json(),
            "moved": self.moved.to_json(),
        })
    }
}

/// Moves `p` by `g . S = g S g*` and checks that `V` of the result is
/// `g' V(p) g'^T`. `g` must have determinant one and send `S(p)` to a
/// Suslin matrix.
pub fn transport_action(g: &MatrixR, p: &SpherePoint) -> Result<Transport> {
    let r = p.ring();
    if g.dim() == 4 && !r.is_one(&g.det()) {
        return Err(Error::Precondition(format!(
            "det g = {}, expected 1",
            r.format(&g.det())
        )));
    }
    let moved = spin6_act(g, p)?;
    let beta = beta_matrix(r);
    let g_prime = &(&beta * g) * &beta.transpose();
    let v = vaserstein_matrix(p)?;
    let v_prime = AlternatingMatrix4::new(&(&g_prime * v.body()) * &g_prime.transpose())?;
    if v_prime != vaserstein_matrix(&moved)? {
        return Err(Error::Inconsistency(format!(
            "g' V g'^T differs from V of the moved point {}",
            moved.describe()
        )));
    }
    Ok(Transport {
        g_prime,
        v_prime,
        moved,
    })
}

/// `g J g^T = J`.
pub fn sp4_fixer_check(g: &MatrixR) -> bool {
    if g.dim() != 4 {
        return false;
    }
    let j = j_matrix(g.ring(), 2).expect("level 2 is supported");
    &(g * &j) * &g.transpose() == j
}

/// `g g* = 1`, i.e. `g` fixes `S(e_1, f_1) = I`.
pub fn fixes_base_point(g: &MatrixR) -> bool {
    g.dim() == 4 && star(g, 2).is_ok_and(|s| (g * &s).is_identity())
}

/// The `4 x 4` top block of an Epin word in `Epin_6`, acting on Suslin
/// matrices by `S -> g S g*`. Generators act left to right on points, so
/// the first generator is the rightmost matrix factor.
pub fn spin6_block(ring: &Ring, word: &[EpinGenerator]) -> Result<MatrixR> {
    let mut g = MatrixR::identity(ring, 4);
    for gen in word {
        if gen.n() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: gen.n(),
            });
        }
        g = &epin_blocks(gen)?.0 * &g;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epin::act_on_point;
    use crate::sampling::{random_matrix, random_point};
    use crate::suslin::UnitKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_generator(r: &Ring, rng: &mut ChaCha8Rng) -> EpinGenerator {
        EpinGenerator::new(
            r,
            UnitKind::BOTH[rng.gen_range(0..2)],
            UnitKind::BOTH[rng.gen_range(0..2)],
            rng.gen_range(2..=3),
            r.random(rng),
            3,
        )
        .unwrap()
    }

    #[test]
    fn beta_examples() {
        let r = Ring::integers();
        let b = beta_matrix(&r);
        assert!((&b * &b.transpose()).is_identity());
        // 1 * (-1) * det [[0, 1], [-1, 0]]
        assert_eq!(b.det_cofactor().unwrap(), r.from_i64(-1));
        assert_eq!(*b.get(1, 1), r.from_i64(-1));
        assert_eq!(*b.get(2, 3), r.one());
        assert_eq!(*b.get(3, 2), r.from_i64(-1));
    }

    #[test]
    fn vaserstein_examples() {
        let r = Ring::integers();
        let p = SpherePoint::from_i64(&r, &[1, 0, 0], &[1, 0, 0]).unwrap();
        assert_eq!(vaserstein_matrix(&p).unwrap().pfaffian().elem, r.one());
        let p = SpherePoint::from_i64(&r, &[2, 3, 5], &[7, 11, 13]).unwrap();
        let v = vaserstein_matrix(&p).unwrap();
        assert_eq!(*v.body(), vaserstein_display(&p).unwrap());
        assert_eq!(v.pfaffian().elem, r.from_i64(14 + 33 + 65));
        assert!(vaserstein_matrix(&SpherePoint::base(&r, 2)).is_err());
    }

    #[test]
    fn product_form_matches_display_mod7() {
        let r = Ring::zmod(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..100 {
            let p = random_point(&r, 3, &mut rng);
            assert_eq!(
                *vaserstein_matrix(&p).unwrap().body(),
                vaserstein_display(&p).unwrap()
            );
        }
    }

    #[test]
    fn pfaffian_squares_to_det() {
        let r = Ring::zmod(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let m = random_matrix(&r, 4, &mut rng);
            let a = AlternatingMatrix4::new(&m - &m.transpose()).unwrap();
            let pf = a.pfaffian().elem;
            assert_eq!(a.body().det(), r.mul(&pf, &pf));
        }
    }

    #[test]
    fn alternating_checks() {
        let r = Ring::integers();
        assert!(AlternatingMatrix4::new(MatrixR::identity(&r, 4)).is_err());
        assert!(AlternatingMatrix4::new(psi(&r, 1)).is_err());
        // symmetric but with a nonzero diagonal over Z/2
        let r2 = Ring::zmod(2).unwrap();
        let m = MatrixR::from_i64(&r2, &[&[1, 0], &[0, 0]]).unwrap();
        assert!(!is_alternating(&m));
    }

    #[test]
    fn psi_and_perp() {
        let r = Ring::integers();
        assert_eq!(
            psi(&r, 1),
            MatrixR::from_i64(&r, &[&[0, 1], &[-1, 0]]).unwrap()
        );
        let p2 = psi(&r, 2);
        assert_eq!(p2, perp(&psi(&r, 1), &psi(&r, 1)).unwrap());
        let a = AlternatingMatrix4::new(p2).unwrap();
        assert_eq!(a.pfaffian().elem, r.one());
        assert!(WittElementRaw::new(a).is_ok());
        assert_eq!(psi(&r, 3).dim(), 6);
        assert!(perp(&MatrixR::identity(&r, 2), &psi(&r, 1)).is_err());
    }

    #[test]
    fn identity_transport() {
        let r = Ring::zmod(5).unwrap();
        let p = SpherePoint::from_i64(&r, &[1, 2, 3], &[4, 0, 1]).unwrap();
        let t = transport_action(&MatrixR::identity(&r, 4), &p).unwrap();
        assert_eq!(t.moved, p);
        assert_eq!(t.v_prime, vaserstein_matrix(&p).unwrap());
    }

    #[test]
    fn top_block_star_is_inverse_of_bottom_block() {
        let r = Ring::zmod(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..40 {
            let g = random_generator(&r, &mut rng);
            let (top, _) = epin_blocks(&g).unwrap();
            let (_, bottom_inv) = epin_blocks(&g.inverse()).unwrap();
            assert_eq!(star(&top, 2).unwrap(), bottom_inv);
            assert_eq!(top.det(), r.one());
        }
    }

    #[test]
    fn transport_for_epin_words() {
        let r = Ring::zmod(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let word: Vec<_> = (0..3).map(|_| random_generator(&r, &mut rng)).collect();
            let g = spin6_block(&r, &word).unwrap();
            let p = random_point(&r, 3, &mut rng);
            let t = transport_action(&g, &p).unwrap();
            let expected = word
                .iter()
                .try_fold(p.clone(), |acc, gen| act_on_point(gen, &acc))
                .unwrap();
            assert_eq!(t.moved, expected);
            assert_eq!(
                t.v_prime.pfaffian(),
                vaserstein_matrix(&p).unwrap().pfaffian()
            );
        }
    }

    #[test]
    fn transport_covers_all_of_sl4() {
        // every determinant-one g sends Suslin matrices to Suslin matrices
        let r = Ring::zmod(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..30 {
            let mut g = MatrixR::identity(&r, 4);
            for _ in 0..5 {
                let i = rng.gen_range(0..4);
                let j = (i + rng.gen_range(1..4)) % 4;
                let mut e = MatrixR::identity(&r, 4);
                e.set(i, j, r.random(&mut rng));
                g = &g * &e;
            }
            let p = random_point(&r, 3, &mut rng);
            let t = transport_action(&g, &p).unwrap();
            assert_eq!(t.moved.q(), p.q());
        }
    }

    #[test]
    fn transport_rejects_wrong_determinant() {
        let r = Ring::zmod(5).unwrap();
        let p = SpherePoint::from_i64(&r, &[1, 2, 3], &[4, 0, 1]).unwrap();
        let mut g = MatrixR::identity(&r, 4);
        g.set(0, 0, r.from_i64(2));
        assert!(matches!(
            transport_action(&g, &p),
            Err(Error::Precondition(_))
        ));
        assert!(transport_action(&MatrixR::identity(&r, 2), &p).is_err());
    }

    #[test]
    fn sp4_examples() {
        let r = Ring::zmod(3).unwrap();
        assert!(sp4_fixer_check(&MatrixR::identity(&r, 4)));
        // E_12(1) stays inside the first hyperbolic plane of J, so it is
        // symplectic and fixes S(e_1, f_1)
        let mut e12 = MatrixR::identity(&r, 4);
        e12.set(0, 1, r.one());
        assert!(sp4_fixer_check(&e12));
        assert!(fixes_base_point(&e12));
        let mut e13 = MatrixR::identity(&r, 4);
        e13.set(0, 2, r.one());
        assert!(!sp4_fixer_check(&e13));
        assert!(!fixes_base_point(&e13));
    }

    #[test]
    fn commutator_words_fix_the_base_point() {
        let r = Ring::zmod(3).unwrap();
        let base = SpherePoint::from_i64(&r, &[1, 0, 0], &[1, 0, 0]).unwrap();
        let lam = r.from_i64(2);
        for k1 in UnitKind::BOTH {
            let kbar = if k1 == UnitKind::E {
                UnitKind::F
            } else {
                UnitKind::E
            };
            for ki in UnitKind::BOTH {
                for kj in UnitKind::BOTH {
                    // [1 + l X_2 X_1, 1 + X_1 X_3] with X_2 X_1 = bar X_1 X_2
                    let x = EpinGenerator::new(&r, kbar, ki, 2, lam.clone(), 3).unwrap();
                    let y = EpinGenerator::new(&r, k1, kj, 3, r.one(), 3).unwrap();
                    let word = [y.inverse(), x.inverse(), y, x];
                    let g = spin6_block(&r, &word).unwrap();
                    assert!(fixes_base_point(&g));
                    assert!(!g.is_identity());
                    assert!(sp4_fixer_check(&g));
                    assert_eq!(spin6_act(&g, &base).unwrap(), base);
                }
            }
        }
    }
}
