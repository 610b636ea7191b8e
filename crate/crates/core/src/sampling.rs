//! Random inputs for the property sweeps.

use rand::Rng;

use crate::matrix::MatrixR;
use crate::ring::{Elem, Ring};
use crate::suslin::SpherePoint;

pub fn random_row<R: Rng + ?Sized>(ring: &Ring, n: usize, rng: &mut R) -> Vec<Elem> {
    (0..n).map(|_| ring.random(rng)).collect()
}

pub fn random_point<R: Rng + ?Sized>(ring: &Ring, n: usize, rng: &mut R) -> SpherePoint {
    SpherePoint::new(ring, random_row(ring, n, rng), random_row(ring, n, rng))
        .expect("rows have equal length")
}

pub fn random_matrix<R: Rng + ?Sized>(ring: &Ring, dim: usize, rng: &mut R) -> MatrixR {
    MatrixR::from_fn(ring, dim, |_, _| ring.random(rng))
}

/// A point with `v . w = 1`.
///
/// Over `Z/m` this is rejection sampling. Elsewhere (and as a fallback) the
/// base point `(e_1, f_1)` is pushed through a random elementary word, which
/// keeps `v . w = 1` since `(v, w) -> (v E, w E^{-T})` preserves the product.
pub fn random_unit_point<R: Rng + ?Sized>(ring: &Ring, n: usize, rng: &mut R) -> SpherePoint {
    if ring.modulus().is_some() {
        for _ in 0..20_000 {
            let p = random_point(ring, n, rng);
            if p.is_unit() {
                return p;
            }
        }
    }
    let (mut v, mut w) = SpherePoint::base(ring, n).into_parts();
    if n == 1 {
        return SpherePoint::new(ring, v, w).expect("length one");
    }
    for _ in 0..(2 * n + 2) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let lambda = ring.random(rng);
        // v E_ij(l): v_j += l v_i ; w E_ji(-l): w_i -= l w_j
        v[j] = ring.add(&v[j], &ring.mul(&lambda, &v[i]));
        w[i] = ring.sub(&w[i], &ring.mul(&lambda, &w[j]));
    }
    SpherePoint::new(ring, v, w).expect("rows have equal length")
}

/// A point with `v . w = 0` built from an `R`-linear combination of basis
/// vectors that keeps the pairing zero: `lambda e_k + mu e_m` against
/// `nu f_l` with `l` outside `{k, m}`. Needs `n >= 2`.
pub fn random_isotropic_point<R: Rng + ?Sized>(ring: &Ring, n: usize, rng: &mut R) -> SpherePoint {
    assert!(n >= 2, "isotropic sampling needs n >= 2");
    let l = rng.gen_range(0..n);
    let others: Vec<usize> = (0..n).filter(|&x| x != l).collect();
    let (mut v, mut w) = SpherePoint::zero(ring, n).into_parts();
    for &k in &others {
        if rng.gen_bool(0.6) {
            v[k] = ring.random(rng);
        }
    }
    w[l] = ring.random(rng);
    // sometimes also pair a second w-slot against a cleared v-slot
    if rng.gen_bool(0.3) {
        let k = others[rng.gen_range(0..others.len())];
        w[k] = ring.random(rng);
        v[k] = ring.zero();
    }
    let p = SpherePoint::new(ring, v, w).expect("rows have equal length");
    debug_assert!(ring.is_zero(&p.q()));
    p
}
