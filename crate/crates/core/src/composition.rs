//! Split composition algebras and the composition law on Z-matrices.
//!
//! Split quaternions are `M_2(R)` (conjugate = adjugate, norm = det). Split
//! octonions are Zorn vector matrices `(a, x; y, b)` with `x, y in R^3`,
//!
//! ```text
//! (a, x; y, b)(a', x'; y', b') =
//!     (aa' + x.y',  a x' + b' x - y * y';  a' y + b y' + x * x',  bb' + y.x')
//! ```
//!
//! with norm `ab - x.y` and conjugate `(b, -x; -y, a)`. A point `(v, w)` of
//! `H(R^4)` is identified with `(v_1, (v_2, v_3, v_4); -(w_2, w_3, w_4), w_1)`,
//! which makes the norm equal to `v . w`.
//!
//! Over a quaternion algebra the Z-matrices are Suslin matrices. Over the
//! octonions `alpha` is replaced by its left-multiplication matrix `L_alpha`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::MatrixR;
use crate::ring::{Elem, Ring, RingValue};
use crate::suslin::{decode_suslin, grow_block, SpherePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algebra {
    SplitQuaternion,
    SplitOctonion,
}

impl Algebra {
    /// Rank over the base ring.
    pub fn rank(self) -> usize {
        match self {
            Algebra::SplitQuaternion => 4,
            Algebra::SplitOctonion => 8,
        }
    }

    /// Side length of the block standing in for `alpha` inside a Z-matrix.
    pub fn block_size(self) -> usize {
        match self {
            Algebra::SplitQuaternion => 2,
            Algebra::SplitOctonion => 8,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quaternion" | "split_quaternion" => Ok(Algebra::SplitQuaternion),
            "octonion" | "split_octonion" => Ok(Algebra::SplitOctonion),
            _ => Err(Error::Parse(format!("unknown algebra '{s}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algebra::SplitQuaternion => "quaternion",
            Algebra::SplitOctonion => "octonion",
        }
    }
}

/// An element of a split composition algebra.
///
/// Coordinates: quaternions `(m00, m01, m10, m11)`; octonions
/// `(a, x1, x2, x3, y1, y2, y3, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgElement {
    ring: Ring,
    algebra: Algebra,
    coords: Vec<Elem>,
}

impl AlgElement {
    pub fn from_coords(ring: &Ring, algebra: Algebra, coords: Vec<Elem>) -> Result<Self> {
        if coords.len() != algebra.rank() {
            return Err(Error::DimensionMismatch {
                expected: algebra.rank(),
                found: coords.len(),
            });
        }
        Ok(AlgElement {
            ring: ring.clone(),
            algebra,
            coords,
        })
    }

    pub fn quaternion(m: &MatrixR) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.dim(),
            });
        }
        Self::from_coords(m.ring(), Algebra::SplitQuaternion, m.entries().to_vec())
    }

    pub fn octonion(ring: &Ring, a: Elem, x: [Elem; 3], y: [Elem; 3], b: Elem) -> Self {
        let coords = std::iter::once(a)
            .chain(x)
            .chain(y)
            .chain(std::iter::once(b))
            .collect();
        AlgElement {
            ring: ring.clone(),
            algebra: Algebra::SplitOctonion,
            coords,
        }
    }

    pub fn from_i64(ring: &Ring, algebra: Algebra, coords: &[i64]) -> Result<Self> {
        Self::from_coords(
            ring,
            algebra,
            coords.iter().map(|&c| ring.from_i64(c)).collect(),
        )
    }

    pub fn zero(ring: &Ring, algebra: Algebra) -> Self {
        AlgElement {
            ring: ring.clone(),
            algebra,
            coords: vec![ring.zero(); algebra.rank()],
        }
    }

    pub fn one(ring: &Ring, algebra: Algebra) -> Self {
        let mut out = Self::zero(ring, algebra);
        let last = algebra.rank() - 1;
        out.coords[0] = ring.one();
        out.coords[last] = ring.one();
        out
    }

    pub fn random<R: rand::Rng + ?Sized>(ring: &Ring, algebra: Algebra, rng: &mut R) -> Self {
        AlgElement {
            ring: ring.clone(),
            algebra,
            coords: (0..algebra.rank()).map(|_| ring.random(rng)).collect(),
        }
    }

    /// The octonion attached to a point of `H(R^4)`.
    pub fn from_h4(p: &SpherePoint) -> Result<Self> {
        if p.n() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: p.n(),
            });
        }
        let r = p.ring();
        let (v, w) = (p.v(), p.w());
        Ok(Self::octonion(
            r,
            v[0].clone(),
            [v[1].clone(), v[2].clone(), v[3].clone()],
            [r.neg(&w[1]), r.neg(&w[2]), r.neg(&w[3])],
            w[0].clone(),
        ))
    }

    /// Inverse of [`AlgElement::from_h4`].
    pub fn to_h4(&self) -> Result<SpherePoint> {
        self.require(Algebra::SplitOctonion)?;
        let r = &self.ring;
        let c = &self.coords;
        SpherePoint::new(
            r,
            vec![c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()],
            vec![c[7].clone(), r.neg(&c[4]), r.neg(&c[5]), r.neg(&c[6])],
        )
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    /// The `2 x 2` matrix of a quaternion.
    pub fn as_matrix(&self) -> Result<MatrixR> {
        self.require(Algebra::SplitQuaternion)?;
        MatrixR::from_rows(
            &self.ring,
            vec![self.coords[0..2].to_vec(), self.coords[2..4].to_vec()],
        )
    }

    fn require(&self, algebra: Algebra) -> Result<()> {
        if self.algebra != algebra {
            return Err(Error::Precondition(format!(
                "expected a {} element, got a {}",
                algebra.name(),
                self.algebra.name()
            )));
        }
        Ok(())
    }

    fn check_compatible(&self, other: &AlgElement) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            });
        }
        other.require(self.algebra)
    }

    pub fn add(&self, other: &AlgElement) -> Result<AlgElement> {
        self.check_compatible(other)?;
        let r = &self.ring;
        Ok(AlgElement {
            ring: r.clone(),
            algebra: self.algebra,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| r.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &Elem) -> AlgElement {
        AlgElement {
            ring: self.ring.clone(),
            algebra: self.algebra,
            coords: self.coords.iter().map(|a| self.ring.mul(c, a)).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let r = &self.ring;
        let j = |e: &Elem| r.to_json(e);
        let c = &self.coords;
        match self.algebra {
            Algebra::SplitQuaternion => json!({
                "algebra": "quaternion",
                "matrix": [[j(&c[0]), j(&c[1])], [j(&c[2]), j(&c[3])]],
            }),
            Algebra::SplitOctonion => json!({
                "algebra": "octonion",
                "a": j(&c[0]),
                "x": [j(&c[1]), j(&c[2]), j(&c[3])],
                "y": [j(&c[4]), j(&c[5]), j(&c[6])],
                "b": j(&c[7]),
            }),
        }
    }

    /// Reads the format written by [`AlgElement::to_json`]. `algebra` is
    /// used when the object does not name one.
    pub fn from_json(ring: &Ring, algebra: Option<Algebra>, v: &Value) -> Result<Self> {
        let algebra = match v.get("algebra").and_then(Value::as_str) {
            Some(s) => Algebra::parse(s)?,
            None => {
                algebra.ok_or_else(|| Error::Parse("element does not name its algebra".into()))?
            }
        };
        let bad = |what: &str| Error::Parse(format!("{} element needs '{what}'", algebra.name()));
        let elems = |val: Option<&Value>, len: usize, what: &str| -> Result<Vec<Elem>> {
            let arr = val
                .and_then(Value::as_array)
                .filter(|a| a.len() == len)
                .ok_or_else(|| bad(what))?;
            arr.iter().map(|e| ring.from_json(e)).collect()
        };
        match algebra {
            Algebra::SplitQuaternion => {
                let m = MatrixR::from_json(ring, v.get("matrix").ok_or_else(|| bad("matrix"))?)?;
                Self::quaternion(&m)
            }
            Algebra::SplitOctonion => {
                let a = ring.from_json(v.get("a").ok_or_else(|| bad("a"))?)?;
                let b = ring.from_json(v.get("b").ok_or_else(|| bad("b"))?)?;
                let x = elems(v.get("x"), 3, "x")?;
                let y = elems(v.get("y"), 3, "y")?;
                let mut coords = vec![a];
                coords.extend(x);
                coords.extend(y);
                coords.push(b);
                Self::from_coords(ring, algebra, coords)
            }
        }
    }
}

fn cross(r: &Ring, x: &[Elem], y: &[Elem]) -> [Elem; 3] {
    let c = |i: usize, j: usize| r.sub(&r.mul(&x[i], &y[j]), &r.mul(&x[j], &y[i]));
    [c(1, 2), c(2, 0), c(0, 1)]
}

pub fn alg_mul(a: &AlgElement, b: &AlgElement) -> Result<AlgElement> {
    a.check_compatible(b)?;
    let r = &a.ring;
    match a.algebra {
        Algebra::SplitQuaternion => {
            AlgElement::quaternion(&a.as_matrix()?.try_mul(&b.as_matrix()?)?)
        }
        Algebra::SplitOctonion => {
            let (p, q) = (&a.coords, &b.coords);
            let (a1, x1, y1, b1) = (&p[0], &p[1..4], &p[4..7], &p[7]);
            let (a2, x2, y2, b2) = (&q[0], &q[1..4], &q[4..7], &q[7]);
            let yy = cross(r, y1, y2);
            let xx = cross(r, x1, x2);
            let new_a = r.add(&r.mul(a1, a2), &r.dot(x1, y2));
            let new_b = r.add(&r.mul(b1, b2), &r.dot(y1, x2));
            let new_x: [Elem; 3] = std::array::from_fn(|k| {
                r.sub(&r.add(&r.mul(a1, &x2[k]), &r.mul(b2, &x1[k])), &yy[k])
            });
            let new_y: [Elem; 3] = std::array::from_fn(|k| {
                r.add(&r.add(&r.mul(a2, &y1[k]), &r.mul(b1, &y2[k])), &xx[k])
            });
            Ok(AlgElement::octonion(r, new_a, new_x, new_y, new_b))
        }
    }
}

pub fn alg_conj(a: &AlgElement) -> AlgElement {
    let r = &a.ring;
    let c = &a.coords;
    let coords = match a.algebra {
        // adjugate
        Algebra::SplitQuaternion => vec![c[3].clone(), r.neg(&c[1]), r.neg(&c[2]), c[0].clone()],
        Algebra::SplitOctonion => std::iter::once(c[7].clone())
            .chain(c[1..7].iter().map(|e| r.neg(e)))
            .chain(std::iter::once(c[0].clone()))
            .collect(),
    };
    AlgElement {
        ring: r.clone(),
        algebra: a.algebra,
        coords,
    }
}

pub fn alg_norm(a: &AlgElement) -> RingValue {
    a.ring.value(norm_elem(a))
}

fn norm_elem(a: &AlgElement) -> Elem {
    let r = &a.ring;
    let c = &a.coords;
    match a.algebra {
        Algebra::SplitQuaternion => r.sub(&r.mul(&c[0], &c[3]), &r.mul(&c[1], &c[2])),
        Algebra::SplitOctonion => r.sub(&r.mul(&c[0], &c[7]), &r.dot(&c[1..4], &c[4..7])),
    }
}

/// Matrix of `x -> alpha x` on coordinate columns: column `k` holds the
/// coordinates of `alpha e_k`.
pub fn left_mult_matrix(alpha: &AlgElement) -> MatrixR {
    let r = &alpha.ring;
    let rank = alpha.algebra.rank();
    let columns: Vec<Vec<Elem>> = (0..rank)
        .map(|k| {
            let mut e = AlgElement::zero(r, alpha.algebra);
            e.coords[k] = r.one();
            alg_mul(alpha, &e).expect("same algebra").coords
        })
        .collect();
    MatrixR::from_fn(r, rank, |i, j| columns[j][i].clone())
}

/// `L_alpha` for an octonion.
pub fn octonion_l(alpha: &AlgElement) -> Result<MatrixR> {
    alpha.require(Algebra::SplitOctonion)?;
    Ok(left_mult_matrix(alpha))
}

/// The block standing in for `alpha` inside a Z-matrix.
fn alpha_block(alpha: &AlgElement) -> MatrixR {
    match alpha.algebra {
        Algebra::SplitQuaternion => alpha.as_matrix().expect("quaternion"),
        Algebra::SplitOctonion => left_mult_matrix(alpha),
    }
}

/// `Z_n(alpha, v, w)`: `Z_1 = [[a_1, alpha], [-bar alpha, b_1]]` and
/// `Z_i = [[a_i, Z_{i-1}], [-bar Z_{i-1}, b_i]]`, as a matrix over the base
/// ring. `q_levels[i - 1]` caches `q(Z_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    alpha: AlgElement,
    v: Vec<Elem>,
    w: Vec<Elem>,
    q_levels: Vec<Elem>,
    body: MatrixR,
    body_bar: MatrixR,
}

pub fn z_matrix(alpha: &AlgElement, v: &[Elem], w: &[Elem]) -> Result<ZMatrix> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch {
            v: v.len(),
            w: w.len(),
        });
    }
    if v.is_empty() {
        return Err(Error::Precondition(
            "a Z-matrix needs at least one level".into(),
        ));
    }
    let r = &alpha.ring;
    let mut body = alpha_block(alpha);
    let mut body_bar = alpha_block(&alg_conj(alpha));
    let mut q = norm_elem(alpha);
    let mut q_levels = Vec::with_capacity(v.len());
    for (a, b) in v.iter().zip(w) {
        (body, body_bar) = grow_block(&body, &body_bar, a, b);
        q = r.add(&q, &r.mul(a, b));
        q_levels.push(q.clone());
    }
    Ok(ZMatrix {
        alpha: alpha.clone(),
        v: v.to_vec(),
        w: w.to_vec(),
        q_levels,
        body,
        body_bar,
    })
}

impl ZMatrix {
    pub fn level(&self) -> usize {
        self.v.len()
    }

    pub fn algebra(&self) -> Algebra {
        self.alpha.algebra
    }

    pub fn ring(&self) -> &Ring {
        &self.alpha.ring
    }

    pub fn alpha(&self) -> &AlgElement {
        &self.alpha
    }

    pub fn v(&self) -> &[Elem] {
        &self.v
    }

    pub fn w(&self) -> &[Elem] {
        &self.w
    }

    pub fn body(&self) -> &MatrixR {
        &self.body
    }

    pub fn bar(&self) -> &MatrixR {
        &self.body_bar
    }

    /// `q(Z_n) = norm(alpha) + a_1 b_1 + ... + a_n b_n`
    pub fn q(&self) -> &Elem {
        self.q_levels.last().expect("at least one level")
    }

    /// `q(Z_i)` for `1 <= i <= n`.
    pub fn q_at(&self, i: usize) -> Option<&Elem> {
        i.checked_sub(1).and_then(|k| self.q_levels.get(k))
    }

    pub fn to_json(&self) -> Value {
        let r = self.ring();
        json!({
            "alpha": self.alpha.to_json(),
            "v": self.v.iter().map(|e| r.to_json(e)).collect::<Vec<_>>(),
            "w": self.w.iter().map(|e| r.to_json(e)).collect::<Vec<_>>(),
            "q": r.to_json(self.q()),
        })
    }

    /// Reads `{alpha, v, w}`.
    pub fn from_json(ring: &Ring, algebra: Option<Algebra>, value: &Value) -> Result<Self> {
        let alpha = AlgElement::from_json(
            ring,
            algebra,
            value
                .get("alpha")
                .ok_or_else(|| Error::Parse("Z-matrix needs 'alpha'".into()))?,
        )?;
        let row = |key: &str| -> Result<Vec<Elem>> {
            value
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("Z-matrix needs an array '{key}'")))?
                .iter()
                .map(|e| ring.from_json(e))
                .collect()
        };
        z_matrix(&alpha, &row("v")?, &row("w")?)
    }
}

/// `X ⊙ Y` for level-one matrices sharing the corner `a`:
/// `(a, alpha beta; -bar(alpha beta), b q_Y + b' q_X - a b b')`.
pub fn compose_plane(x: &ZMatrix, y: &ZMatrix) -> Result<ZMatrix> {
    if x.level() != 1 || y.level() != 1 {
        return Err(Error::Precondition(format!(
            "plane composition needs level-one matrices, got {} and {}",
            x.level(),
            y.level()
        )));
    }
    compose_recursive(x, y)
}

/// `X_n ⊙ Y_n` for matrices sharing `v`: the `alpha` slot multiplies and
/// level `i` gets `b''_i = b_i q_{Y_i} + b'_i q_{X_i} - a_i b_i b'_i`.
pub fn compose_recursive(x: &ZMatrix, y: &ZMatrix) -> Result<ZMatrix> {
    x.alpha.check_compatible(&y.alpha)?;
    if x.v != y.v {
        return Err(Error::Precondition(
            "composition needs the same v-row (same a-coordinates) on both sides".into(),
        ));
    }
    let r = x.ring();
    let alpha = alg_mul(&x.alpha, &y.alpha)?;
    let w: Vec<Elem> = (0..x.level())
        .map(|k| {
            let (a, b, b2) = (&x.v[k], &x.w[k], &y.w[k]);
            let t1 = r.mul(b, &y.q_levels[k]);
            let t2 = r.mul(b2, &x.q_levels[k]);
            let t3 = r.mul(&r.mul(a, b), b2);
            r.sub(&r.add(&t1, &t2), &t3)
        })
        .collect();
    z_matrix(&alpha, &x.v, &w)
}

/// `(a, 1; -1, 0)` at every level, the two-sided identity for `⊙` over an
/// associative algebra.
pub fn compose_identity(ring: &Ring, algebra: Algebra, v: &[Elem]) -> Result<ZMatrix> {
    z_matrix(
        &AlgElement::one(ring, algebra),
        v,
        &vec![ring.zero(); v.len()],
    )
}

/// `S_1((x_1, x_2), (y_1, y_2)) = [[x_1, x_2], [-y_2, y_1]]` as a quaternion.
pub fn quaternion_from_pair(ring: &Ring, x: [&Elem; 2], y: [&Elem; 2]) -> AlgElement {
    AlgElement::from_coords(
        ring,
        Algebra::SplitQuaternion,
        vec![x[0].clone(), x[1].clone(), ring.neg(y[1]), y[0].clone()],
    )
    .expect("four coordinates")
}

#[derive(Clone, Debug)]
pub struct VdkComposition {
    /// `v_3` read off the product Suslin matrix.
    pub v3: Vec<Elem>,
    /// `((a_1, a_2) beta, a_3, ..., a_n)` with `beta = [[c_1, c_2], [-d_2, d_1]]`.
    pub closed_form: Vec<Elem>,
    pub w3: Vec<Elem>,
    pub product: ZMatrix,
}

/// Composes `p_1 = (v_1, w_1)` and `p_2 = (v_2, w_2)` with
/// `v_1 = (a_1, a_2, a_3, ..., a_n)`, `v_2 = (c_1, c_2, a_3, ..., a_n)`. The
/// first two coordinates go into the quaternion slot and `a_3..a_n` become
/// the shared Z-levels; `v_3` is decoded from the product matrix.
pub fn vdk_compose(p1: &SpherePoint, p2: &SpherePoint) -> Result<VdkComposition> {
    p1.check_same_shape(p2)?;
    let r = p1.ring();
    let n = p1.n();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "composition of rows needs n >= 3, got {n}"
        )));
    }
    for p in [p1, p2] {
        if !p.is_unit() {
            return Err(Error::NotUnitSphere(r.format(&p.q())));
        }
    }
    if p1.v()[2..] != p2.v()[2..] {
        return Err(Error::Precondition(
            "v_1 and v_2 must agree from the third coordinate on".into(),
        ));
    }
    let (v1, w1, v2, w2) = (p1.v(), p1.w(), p2.v(), p2.w());
    let alpha = quaternion_from_pair(r, [&v1[0], &v1[1]], [&w1[0], &w1[1]]);
    let beta = quaternion_from_pair(r, [&v2[0], &v2[1]], [&w2[0], &w2[1]]);
    // Z-levels run innermost first, so a_3 sits next to the quaternion slot
    let levels_v: Vec<Elem> = v1[2..].to_vec();
    let x = z_matrix(&alpha, &levels_v, &w1[2..])?;
    let y = z_matrix(&beta, &levels_v, &w2[2..])?;
    let product = compose_recursive(&x, &y)?;

    // the product is S(u, u') with u = (a_n, ..., a_3, p, q)
    let decoded = decode_suslin(product.body())?;
    let unreverse = |row: &[Elem]| -> Vec<Elem> {
        let k = row.len();
        let mut out = vec![row[k - 2].clone(), row[k - 1].clone()];
        out.extend(row[..k - 2].iter().rev().cloned());
        out
    };
    let v3 = unreverse(decoded.v());
    let w3 = unreverse(decoded.w());

    let beta_m = beta.as_matrix()?;
    let mut closed_form = beta_m.row_times(&v1[..2])?;
    closed_form.extend(v1[2..].iter().cloned());
    Ok(VdkComposition {
        v3,
        closed_form,
        w3,
        product,
    })
}

/// `phi(alpha, v, w) = [[0, Z], [bar Z, 0]]`
pub fn clifford_phi(z: &ZMatrix) -> MatrixR {
    let zero = MatrixR::zero(z.ring(), z.body.dim());
    MatrixR::from_blocks(&zero, &z.body, &z.body_bar, &zero)
}

/// `phi(x)^2 = q(x) I`.
pub fn clifford_embed_check(alpha: &AlgElement, v: &[Elem], w: &[Elem]) -> Result<bool> {
    let z = z_matrix(alpha, v, w)?;
    let phi = clifford_phi(&z);
    Ok((&phi * &phi).is_scalar(z.q()))
}

/// `phi(x) phi(y) + phi(y) phi(x) = <x, y> I` with
/// `<x, y> = q(x + y) - q(x) - q(y)`.
pub fn polarized_check(x: &ZMatrix, y: &ZMatrix) -> Result<bool> {
    x.alpha.check_compatible(&y.alpha)?;
    if x.level() != y.level() {
        return Err(Error::DimensionMismatch {
            expected: x.level(),
            found: y.level(),
        });
    }
    let r = x.ring();
    let sum = |a: &[Elem], b: &[Elem]| -> Vec<Elem> {
        a.iter().zip(b).map(|(p, q)| r.add(p, q)).collect()
    };
    let xy = z_matrix(&x.alpha.add(&y.alpha)?, &sum(&x.v, &y.v), &sum(&x.w, &y.w))?;
    let pairing = r.sub(&r.sub(xy.q(), x.q()), y.q());
    let (px, py) = (clifford_phi(x), clifford_phi(y));
    Ok((&(&px * &py) + &(&py * &px)).is_scalar(&pairing))
}

/// `(log2 rank Cl(V), log2 rank of the target matrix algebra)` for
/// `V = A + H(R^n)`. The target is `M_{2^{n+1}}(A)` resp.
/// `M_{2^{n+1}}(End O)`, i.e. full matrices of the size of `phi`.
pub fn clifford_rank_exponents(algebra: Algebra, n: usize) -> (u32, u32) {
    let rank_v = (algebra.rank() + 2 * n) as u32;
    let phi_dim = (1usize << (n + 1)) * algebra.block_size();
    let target = 2 * phi_dim.trailing_zeros();
    (rank_v, target)
}

/// `X ⊙ Y` for points of `H(R^5)` with a shared first coordinate `a`: the
/// tails become octonions `O_1, O_2` and the result is the point with
/// first coordinates `(a, b'')` and tail `O_1 O_2`.
pub fn octonion_sphere_compose(p1: &SpherePoint, p2: &SpherePoint) -> Result<SpherePoint> {
    let (x, y) = (octonion_plane(p1)?, octonion_plane(p2)?);
    for p in [p1, p2] {
        if !p.is_unit() {
            return Err(Error::NotUnitSphere(p.ring().format(&p.q())));
        }
    }
    point_from_octonion_plane(&compose_plane(&x, &y)?)
}

/// The level-one octonion Z-matrix of a point of `H(R^5)`.
pub fn octonion_plane(p: &SpherePoint) -> Result<ZMatrix> {
    if p.n() != 5 {
        return Err(Error::DimensionMismatch {
            expected: 5,
            found: p.n(),
        });
    }
    let tail = SpherePoint::new(p.ring(), p.v()[1..].to_vec(), p.w()[1..].to_vec())?;
    z_matrix(&AlgElement::from_h4(&tail)?, &p.v()[..1], &p.w()[..1])
}

pub fn point_from_octonion_plane(z: &ZMatrix) -> Result<SpherePoint> {
    if z.level() != 1 {
        return Err(Error::Precondition("expected a level-one Z-matrix".into()));
    }
    let tail = z.alpha.to_h4()?;
    let v = std::iter::once(z.v[0].clone())
        .chain(tail.v().iter().cloned())
        .collect();
    let w = std::iter::once(z.w[0].clone())
        .chain(tail.w().iter().cloned())
        .collect();
    SpherePoint::new(z.ring(), v, w)
}

/// Octonions of norm one over `ring`, in enumeration order.
fn unit_octonions(ring: &Ring) -> Result<Vec<AlgElement>> {
    let elements: Vec<Elem> = ring.elements()?.collect();
    let mut out = Vec::new();
    let mut idx = [0usize; 8];
    loop {
        let coords = idx.iter().map(|&i| elements[i].clone()).collect();
        let o = AlgElement::from_coords(ring, Algebra::SplitOctonion, coords)?;
        if ring.is_one(&norm_elem(&o)) {
            out.push(o);
        }
        let mut pos = 8;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < elements.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// First triple of unit points of `H(R^5)` (with `a = b = 0`, so the
/// octonion part has norm one) for which `⊙` does not associate, searching
/// unit octonions in enumeration order.
pub fn nonassociativity_witness(ring: &Ring) -> Result<Option<[SpherePoint; 3]>> {
    let units = unit_octonions(ring)?;
    let zero = [ring.zero()];
    let plane = |o: &AlgElement| z_matrix(o, &zero, &zero);
    for o1 in &units {
        let x = plane(o1)?;
        for o2 in &units {
            let y = plane(o2)?;
            let xy = compose_plane(&x, &y)?;
            for o3 in &units {
                let w = plane(o3)?;
                let left = compose_plane(&xy, &w)?;
                let right = compose_plane(&x, &compose_plane(&y, &w)?)?;
                if left != right {
                    return Ok(Some([
                        point_from_octonion_plane(&x)?,
                        point_from_octonion_plane(&y)?,
                        point_from_octonion_plane(&w)?,
                    ]));
                }
            }
        }
    }
    Ok(None)
}
