//! Suslin matrices, the bar involution, the `J_n` matrices and the star
//! involution, plus the basis units `E_i = S(e_i, 0)` and `F_i = S(0, f_i)`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::MatrixR;
use crate::ring::{Elem, Ring, RingDescriptor};

/// A pair `(v, w)` of equal-length rows, i.e. an element of the hyperbolic
/// space `H(R^n)`. It lies on the unit sphere when `v . w = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpherePoint {
    ring: Ring,
    v: Vec<Elem>,
    w: Vec<Elem>,
}

impl SpherePoint {
    pub fn new(ring: &Ring, v: Vec<Elem>, w: Vec<Elem>) -> Result<Self> {
        if v.len() != w.len() {
            return Err(Error::LengthMismatch {
                v: v.len(),
                w: w.len(),
            });
        }
        if v.is_empty() {
            return Err(Error::Precondition("points need length at least 1".into()));
        }
        Ok(SpherePoint {
            ring: ring.clone(),
            v,
            w,
        })
    }

    pub fn from_i64(ring: &Ring, v: &[i64], w: &[i64]) -> Result<Self> {
        Self::new(
            ring,
            v.iter().map(|&x| ring.from_i64(x)).collect(),
            w.iter().map(|&x| ring.from_i64(x)).collect(),
        )
    }

    pub fn zero(ring: &Ring, n: usize) -> Self {
        SpherePoint {
            ring: ring.clone(),
            v: vec![ring.zero(); n],
            w: vec![ring.zero(); n],
        }
    }

    /// `(e_i, 0)` with a one-based index.
    pub fn e(ring: &Ring, n: usize, i: usize) -> Self {
        let mut p = Self::zero(ring, n);
        p.v[i - 1] = ring.one();
        p
    }

    /// `(0, f_i)` with a one-based index.
    pub fn f(ring: &Ring, n: usize, i: usize) -> Self {
        let mut p = Self::zero(ring, n);
        p.w[i - 1] = ring.one();
        p
    }

    /// The base point `(e_1, f_1)` of the unit sphere.
    pub fn base(ring: &Ring, n: usize) -> Self {
        let mut p = Self::e(ring, n, 1);
        p.w[0] = ring.one();
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self) -> &[Elem] {
        &self.v
    }

    pub fn w(&self) -> &[Elem] {
        &self.w
    }

    pub fn into_parts(self) -> (Vec<Elem>, Vec<Elem>) {
        (self.v, self.w)
    }

    /// `q(v, w) = v . w`
    pub fn q(&self) -> Elem {
        self.ring.dot(&self.v, &self.w)
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_one(&self.q())
    }

    pub fn swapped(&self) -> Self {
        SpherePoint {
            ring: self.ring.clone(),
            v: self.w.clone(),
            w: self.v.clone(),
        }
    }

    pub fn add(&self, other: &SpherePoint) -> Result<SpherePoint> {
        self.check_same_shape(other)?;
        let r = &self.ring;
        Ok(SpherePoint {
            ring: r.clone(),
            v: self
                .v
                .iter()
                .zip(&other.v)
                .map(|(a, b)| r.add(a, b))
                .collect(),
            w: self
                .w
                .iter()
                .zip(&other.w)
                .map(|(a, b)| r.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &Elem) -> SpherePoint {
        let r = &self.ring;
        SpherePoint {
            ring: r.clone(),
            v: self.v.iter().map(|a| r.mul(c, a)).collect(),
            w: self.w.iter().map(|a| r.mul(c, a)).collect(),
        }
    }

    pub(crate) fn check_same_shape(&self, other: &SpherePoint) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            });
        }
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(())
    }

    /// Concatenation `(v | w)` as a row of length `2n`.
    pub fn as_row(&self) -> Vec<Elem> {
        self.v.iter().chain(&self.w).cloned().collect()
    }

    pub fn from_row(ring: &Ring, row: &[Elem]) -> Result<Self> {
        if !row.len().is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "a point row needs even length, got {}",
                row.len()
            )));
        }
        let n = row.len() / 2;
        Self::new(ring, row[..n].to_vec(), row[n..].to_vec())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.descriptor(),
            "v": self.v.iter().map(|e| self.ring.to_json(e)).collect::<Vec<_>>(),
            "w": self.w.iter().map(|e| self.ring.to_json(e)).collect::<Vec<_>>(),
        })
    }

    /// Reads `{ring, v, w}`. When `ring` is absent, `default_ring` is used.
    pub fn from_json(value: &Value, default_ring: Option<&Ring>) -> Result<Self> {
        let ring = match value.get("ring") {
            Some(Value::String(s)) => Ring::parse(s)?,
            Some(desc) => Ring::new(
                serde_json::from_value::<RingDescriptor>(desc.clone())
                    .map_err(|e| Error::Parse(e.to_string()))?,
            )?,
            None => default_ring
                .cloned()
                .ok_or_else(|| Error::Parse("point has no ring".into()))?,
        };
        let row = |key: &str| -> Result<Vec<Elem>> {
            value
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("point needs an array '{key}'")))?
                .iter()
                .map(|e| ring.from_json(e))
                .collect()
        };
        let (v, w) = (row("v")?, row("w")?);
        Self::new(&ring, v, w)
    }

    pub fn describe(&self) -> String {
        let f = |xs: &[Elem]| {
            xs.iter()
                .map(|e| self.ring.format(e))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("(({}), ({}))", f(&self.v), f(&self.w))
    }
}

/// One step of the block recursion shared by Suslin matrices and the
/// composition-algebra Z-matrices:
/// `M = [[a, N], [-bar N, b]]`, `bar M = [[b, -N], [bar N, a]]`.
pub(crate) fn grow_block(
    inner: &MatrixR,
    inner_bar: &MatrixR,
    a: &Elem,
    b: &Elem,
) -> (MatrixR, MatrixR) {
    let r = inner.ring();
    let h = inner.dim();
    let a_id = MatrixR::scalar(r, h, a);
    let b_id = MatrixR::scalar(r, h, b);
    let m = MatrixR::from_blocks(&a_id, inner, &-inner_bar, &b_id);
    let m_bar = MatrixR::from_blocks(&b_id, &-inner, inner_bar, &a_id);
    (m, m_bar)
}

/// `(S(v, w), bar S(v, w))` for a point of length `n`, of size `2^{n-1}`.
pub fn suslin_pair(p: &SpherePoint) -> (MatrixR, MatrixR) {
    let r = p.ring();
    let n = p.n();
    let mut s = MatrixR::scalar(r, 1, &p.v[n - 1]);
    let mut s_bar = MatrixR::scalar(r, 1, &p.w[n - 1]);
    for k in (0..n - 1).rev() {
        let (m, m_bar) = grow_block(&s, &s_bar, &p.v[k], &p.w[k]);
        s = m;
        s_bar = m_bar;
    }
    (s, s_bar)
}

/// A Suslin matrix together with the point it was built from. `barred`
/// records whether the body is `S(v, w)` or its bar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuslinMatrix {
    source: SpherePoint,
    barred: bool,
    body: MatrixR,
}

impl SuslinMatrix {
    pub fn n(&self) -> usize {
        self.source.n()
    }

    pub fn body(&self) -> &MatrixR {
        &self.body
    }

    pub fn source(&self) -> &SpherePoint {
        &self.source
    }

    pub fn is_barred(&self) -> bool {
        self.barred
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n(),
            "barred": self.barred,
            "matrix": self.body.to_json(),
        })
    }
}

/// `S_{n-1}(v, w)`. A length-one point gives the `1 x 1` matrix `(a_1)`.
pub fn suslin(p: &SpherePoint) -> SuslinMatrix {
    SuslinMatrix {
        source: p.clone(),
        barred: false,
        body: suslin_pair(p).0,
    }
}

pub fn suslin_bar(s: &SuslinMatrix) -> SuslinMatrix {
    let (m, m_bar) = suslin_pair(&s.source);
    let barred = !s.barred;
    SuslinMatrix {
        source: s.source.clone(),
        barred,
        body: if barred { m_bar } else { m },
    }
}

/// Recovers `(v, w)` from `S(v, w)`, failing when the matrix is not a
/// Suslin matrix. Needs size at least 2.
pub fn decode_suslin(m: &MatrixR) -> Result<SpherePoint> {
    let dim = m.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotSuslin(format!(
            "size {dim} is not a power of two at least 2"
        )));
    }
    let p = decode_rec(m)?;
    if suslin_pair(&p).0 != *m {
        return Err(Error::NotSuslin(format!(
            "entries do not follow the Suslin pattern of {}",
            p.describe()
        )));
    }
    Ok(p)
}

fn decode_rec(m: &MatrixR) -> Result<SpherePoint> {
    let r = m.ring();
    let h = m.dim() / 2;
    let a = m.get(0, 0).clone();
    let b = m.get(h, h).clone();
    if h == 1 {
        let v = vec![a, m.get(0, 1).clone()];
        let w = vec![b, r.neg(m.get(1, 0))];
        return SpherePoint::new(r, v, w);
    }
    let inner = decode_rec(&m.block(0, h, h))?;
    let (iv, iw) = inner.into_parts();
    let v = std::iter::once(a).chain(iv).collect();
    let w = std::iter::once(b).chain(iw).collect();
    SpherePoint::new(r, v, w)
}

pub const MAX_J_LEVEL: usize = 7;

/// `J_0 = (1)`, `J_n = diag(J_{n-1}, -J_{n-1})` for even `n` and
/// `[[0, J_{n-1}], [-J_{n-1}, 0]]` for odd `n`.
pub fn j_matrix(ring: &Ring, n: usize) -> Result<MatrixR> {
    if n > MAX_J_LEVEL {
        return Err(Error::IndexOutOfRange(format!(
            "J_{n} exceeds the supported level {MAX_J_LEVEL}"
        )));
    }
    let mut j = MatrixR::identity(ring, 1);
    for level in 1..=n {
        let z = MatrixR::zero(ring, j.dim());
        j = if level % 2 == 0 {
            MatrixR::from_blocks(&j, &z, &z, &-&j)
        } else {
            MatrixR::from_blocks(&z, &j, &-&j, &z)
        };
    }
    Ok(j)
}

/// `M* = J_n M^T J_n^T` on matrices of size `2^n`.
pub fn star(m: &MatrixR, n: usize) -> Result<MatrixR> {
    if m.dim() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: m.dim(),
        });
    }
    let j = j_matrix(m.ring(), n)?;
    Ok(&(&j * &m.transpose()) * &j.transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnitKind {
    E,
    F,
}

impl UnitKind {
    pub const BOTH: [UnitKind; 2] = [UnitKind::E, UnitKind::F];

    pub fn label(self) -> &'static str {
        match self {
            UnitKind::E => "e",
            UnitKind::F => "f",
        }
    }
}

/// `E_i = S(e_i, 0)` or `F_i = S(0, f_i)` in ambient length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisUnit {
    kind: UnitKind,
    index: usize,
    suslin: SuslinMatrix,
}

impl BasisUnit {
    pub fn kind(&self) -> UnitKind {
        self.kind
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn n(&self) -> usize {
        self.suslin.n()
    }

    pub fn body(&self) -> &MatrixR {
        self.suslin.body()
    }

    pub fn bar(&self) -> MatrixR {
        suslin_bar(&self.suslin).body
    }

    pub fn point(&self) -> &SpherePoint {
        self.suslin.source()
    }
}

pub fn basis_unit(ring: &Ring, kind: UnitKind, i: usize, n: usize) -> Result<BasisUnit> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange(format!(
            "basis index {i} outside 1..={n}"
        )));
    }
    let p = match kind {
        UnitKind::E => SpherePoint::e(ring, n, i),
        UnitKind::F => SpherePoint::f(ring, n, i),
    };
    Ok(BasisUnit {
        kind,
        index: i,
        suslin: suslin(&p),
    })
}

/// `[x, y] = x y x^{-1} y^{-1}` for `x = 1 + lambda X_i X_1` and
/// `y = 1 + X_1 X_j`, with the explicit inverses `1 - lambda X_i X_1` and
/// `1 - X_1 X_j`. Returns `(lhs, rhs)` where `lhs = 1 + lambda X_i X_j`.
pub fn commutator_sides(
    x1: &BasisUnit,
    xi: &BasisUnit,
    xj: &BasisUnit,
    lambda: &Elem,
) -> Result<(MatrixR, MatrixR)> {
    if x1.index != 1 || xi.index < 2 || xj.index < 2 || xi.index == xj.index {
        return Err(Error::IndexOutOfRange(format!(
            "commutator needs X_1 and distinct X_i, X_j with i, j > 1 (got {}, {}, {})",
            x1.index, xi.index, xj.index
        )));
    }
    let r = x1.body().ring();
    let dim = x1.body().dim();
    let id = MatrixR::identity(r, dim);
    let xi_x1 = xi.body() * x1.body();
    let x1_xj = x1.body() * xj.body();
    let a = &id + &xi_x1.scale(lambda);
    let a_inv = &id - &xi_x1.scale(lambda);
    let b = &id + &x1_xj;
    let b_inv = &id - &x1_xj;
    if !(&a * &a_inv).is_identity() || !(&b * &b_inv).is_identity() {
        return Err(Error::Inconsistency(
            "commutator factors are not inverted by the sign flip".into(),
        ));
    }
    let rhs = &(&(&a * &b) * &a_inv) * &b_inv;
    let lhs = &id + &(xi.body() * xj.body()).scale(lambda);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z() -> Ring {
        Ring::integers()
    }

    #[test]
    fn s1_matches_closed_form() {
        let r = z();
        let p = SpherePoint::from_i64(&r, &[2, 3], &[5, 7]).unwrap();
        let (s, s_bar) = suslin_pair(&p);
        assert_eq!(s, MatrixR::from_i64(&r, &[&[2, 3], &[-7, 5]]).unwrap());
        assert_eq!(s_bar, MatrixR::from_i64(&r, &[&[5, -3], &[7, 2]]).unwrap());
    }

    #[test]
    fn s2_worked_example() {
        let r = z();
        let p = SpherePoint::from_i64(&r, &[1, 2, 3], &[4, 5, 6]).unwrap();
        let s = suslin(&p);
        let expected = MatrixR::from_i64(
            &r,
            &[
                &[1, 0, 2, 3],
                &[0, 1, -6, 5],
                &[-5, 3, 4, 0],
                &[-6, -2, 0, 4],
            ],
        )
        .unwrap();
        assert_eq!(*s.body(), expected);
        let prod = s.body() * suslin_bar(&s).body();
        assert!(prod.is_scalar(&r.from_i64(32)));
    }

    #[test]
    fn base_point_is_orthogonal() {
        let r = z();
        let s = suslin(&SpherePoint::base(&r, 3));
        assert!((s.body() * suslin_bar(&s).body()).is_identity());
    }

    #[test]
    fn length_one_convention() {
        let r = z();
        let p = SpherePoint::from_i64(&r, &[4], &[9]).unwrap();
        let s = suslin(&p);
        assert_eq!(*s.body(), MatrixR::from_i64(&r, &[&[4]]).unwrap());
        assert_eq!(
            *suslin_bar(&s).body(),
            MatrixR::from_i64(&r, &[&[9]]).unwrap()
        );
    }

    #[test]
    fn length_mismatch_rejected() {
        let r = z();
        assert!(matches!(
            SpherePoint::from_i64(&r, &[1, 2], &[1]),
            Err(Error::LengthMismatch { v: 2, w: 1 })
        ));
    }

    #[test]
    fn bar_is_an_involution_and_transpose_of_swap() {
        let r = Ring::zmod(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=5 {
            for _ in 0..20 {
                let p = random_point(&r, n, &mut rng);
                let s = suslin(&p);
                assert_eq!(suslin_bar(&suslin_bar(&s)), s);
                let swapped = suslin(&p.swapped());
                assert_eq!(*suslin_bar(&s).body(), swapped.body().transpose());
            }
        }
    }

    #[test]
    fn decode_inverts_construction() {
        let r = Ring::zmod(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 2..=5 {
            let p = random_point(&r, n, &mut rng);
            assert_eq!(decode_suslin(suslin(&p).body()).unwrap(), p);
        }
        let mut bad = suslin(&SpherePoint::base(&r, 3)).body().clone();
        bad.set(0, 1, r.one());
        assert!(matches!(decode_suslin(&bad), Err(Error::NotSuslin(_))));
    }

    #[test]
    fn j_matrices() {
        let r = z();
        assert_eq!(j_matrix(&r, 0).unwrap(), MatrixR::identity(&r, 1));
        assert_eq!(
            j_matrix(&r, 1).unwrap(),
            MatrixR::from_i64(&r, &[&[0, 1], &[-1, 0]]).unwrap()
        );
        assert_eq!(
            j_matrix(&r, 2).unwrap(),
            MatrixR::from_i64(
                &r,
                &[&[0, 1, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]
            )
            .unwrap()
        );
        for n in 0..=MAX_J_LEVEL {
            let j = j_matrix(&r, n).unwrap();
            assert!((&j * &j.transpose()).is_identity(), "J_{n}");
        }
        assert!(j_matrix(&r, 8).is_err());
    }

    #[test]
    fn star_rejects_wrong_size() {
        let r = z();
        assert!(star(&MatrixR::identity(&r, 3), 2).is_err());
        assert!(star(&MatrixR::identity(&r, 4), 2).unwrap().is_identity());
    }

    #[test]
    fn basis_units_small_cases() {
        let r = z();
        let e1 = basis_unit(&r, UnitKind::E, 1, 2).unwrap();
        assert_eq!(
            *e1.body(),
            MatrixR::from_i64(&r, &[&[1, 0], &[0, 0]]).unwrap()
        );
        let f1 = basis_unit(&r, UnitKind::F, 1, 2).unwrap();
        assert_eq!(
            *f1.body(),
            MatrixR::from_i64(&r, &[&[0, 0], &[0, 1]]).unwrap()
        );
        let e2 = basis_unit(&r, UnitKind::E, 2, 3).unwrap();
        assert!((e2.body() * &e2.bar()).is_zero());
        assert!(basis_unit(&r, UnitKind::E, 0, 3).is_err());
        assert!(basis_unit(&r, UnitKind::F, 4, 3).is_err());
    }

    pub(crate) fn random_point(r: &Ring, n: usize, rng: &mut ChaCha8Rng) -> SpherePoint {
        SpherePoint::new(
            r,
            (0..n).map(|_| r.random(rng)).collect(),
            (0..n).map(|_| r.random(rng)).collect(),
        )
        .unwrap()
    }
}
