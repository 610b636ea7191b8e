//! The hyperbolic space `H(R^n)` and its Clifford embedding
//! `phi(v, w) = [[0, S(v, w)], [bar S(v, w), 0]]`.

use crate::error::Result;
use crate::matrix::MatrixR;
use crate::ring::RingValue;
use crate::suslin::{suslin_pair, SpherePoint};

/// `q(v, w) = v . w`
pub fn q_form(p: &SpherePoint) -> RingValue {
    p.ring().value(p.q())
}

/// `<p1, p2> = v1 . w2 + v2 . w1`
pub fn bilinear(p1: &SpherePoint, p2: &SpherePoint) -> Result<RingValue> {
    p1.check_same_shape(p2)?;
    let r = p1.ring();
    let val = r.add(&r.dot(p1.v(), p2.w()), &r.dot(p2.v(), p1.w()));
    Ok(r.value(val))
}

/// Image of a point of `H(R^n)` in `M_{2^n}(R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordImage {
    n: usize,
    body: MatrixR,
}

impl CliffordImage {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn body(&self) -> &MatrixR {
        &self.body
    }

    pub fn into_body(self) -> MatrixR {
        self.body
    }
}

pub fn phi_embed(p: &SpherePoint) -> CliffordImage {
    let (s, s_bar) = suslin_pair(p);
    let z = MatrixR::zero(p.ring(), s.dim());
    CliffordImage {
        n: p.n(),
        body: MatrixR::from_blocks(&z, &s, &s_bar, &z),
    }
}

/// Even elements: both off-diagonal half blocks vanish.
pub fn is_even(m: &MatrixR) -> bool {
    let h = m.dim() / 2;
    m.dim().is_multiple_of(2) && m.block(0, h, h).is_zero() && m.block(h, 0, h).is_zero()
}

/// Odd elements: both diagonal half blocks vanish.
pub fn is_odd(m: &MatrixR) -> bool {
    let h = m.dim() / 2;
    m.dim().is_multiple_of(2) && m.block(0, 0, h).is_zero() && m.block(h, h, h).is_zero()
}
