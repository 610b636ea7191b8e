//! Elementary generators of `E_n(R)`, `EO_{2n}(R)` and the elementary Spin
//! group, their actions on points of `H(R^n)`, and the extraction of an
//! `E_n(R)` word that reproduces the action of an Epin word on a unit point.
//!
//! Indices in the public API are one-based, matching the usual matrix-unit
//! notation `E_{ij}(lambda) = I + lambda e_{ij}`. Rows act on the right:
//! an `n x n` matrix `sigma` sends `(v, w)` to `(v sigma, w sigma^{-T})`.

use serde_json::{json, Value};

use crate::clifford::{is_odd, phi_embed};
use crate::error::{Error, Result};
use crate::matrix::MatrixR;
use crate::ring::{Elem, Ring};
use crate::suslin::{basis_unit, decode_suslin, grow_block, suslin_pair, SpherePoint, UnitKind};

/// Provenance note attached to factors of the form `I + u^T x` with
/// `x . u = 0`. Their membership in `E_n(R)` for `n >= 3` is a cited fact;
/// the action equations are checked here.
pub const SUSLIN_WITNESS_PROVENANCE: &str =
    "I + u^T x with x.u = 0 and a unimodular partner row; elementary for n >= 3 by Suslin's theorem (cited, not decomposed)";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `E_{ij}(lambda)`, one-based.
    Elementary { i: usize, j: usize, lambda: Elem },
    /// An opaque block factor together with its inverse transpose.
    SuslinWitness {
        matrix: MatrixR,
        inverse_transpose: MatrixR,
    },
}

impl Factor {
    fn matrix(&self, ring: &Ring, n: usize) -> MatrixR {
        match self {
            Factor::Elementary { i, j, lambda } => elementary_body(ring, n, *i, *j, lambda),
            Factor::SuslinWitness { matrix, .. } => matrix.clone(),
        }
    }

    fn inverse_transpose(&self, ring: &Ring, n: usize) -> MatrixR {
        match self {
            Factor::Elementary { i, j, lambda } => {
                elementary_body(ring, n, *j, *i, &ring.neg(lambda))
            }
            Factor::SuslinWitness {
                inverse_transpose, ..
            } => inverse_transpose.clone(),
        }
    }

    fn to_json(&self, ring: &Ring) -> Value {
        match self {
            Factor::Elementary { i, j, lambda } => {
                json!({"i": i, "j": j, "lambda": ring.to_json(lambda)})
            }
            Factor::SuslinWitness { matrix, .. } => json!({
                "block": matrix.to_json(),
                "provenance": SUSLIN_WITNESS_PROVENANCE,
            }),
        }
    }
}

fn elementary_body(ring: &Ring, n: usize, i: usize, j: usize, lambda: &Elem) -> MatrixR {
    let mut m = MatrixR::identity(ring, n);
    m.set(i - 1, j - 1, ring.add(m.get(i - 1, j - 1), lambda));
    m
}

/// `I + u^T x` as an `n x n` matrix.
fn rank_one_update(ring: &Ring, u: &[Elem], x: &[Elem], sign_negative: bool) -> MatrixR {
    let n = u.len();
    MatrixR::from_fn(ring, n, |r, c| {
        let prod = ring.mul(&u[r], &x[c]);
        let prod = if sign_negative { ring.neg(&prod) } else { prod };
        if r == c {
            ring.add(&ring.one(), &prod)
        } else {
            prod
        }
    })
}

fn row_sub(ring: &Ring, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    a.iter().zip(b).map(|(x, y)| ring.sub(x, y)).collect()
}

/// An element of `E_n(R)` kept together with the word it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemMatrix {
    ring: Ring,
    n: usize,
    body: MatrixR,
    word: Vec<Factor>,
}

impl ElemMatrix {
    pub fn identity(ring: &Ring, n: usize) -> Self {
        ElemMatrix {
            ring: ring.clone(),
            n,
            body: MatrixR::identity(ring, n),
            word: Vec::new(),
        }
    }

    pub fn from_word(ring: &Ring, n: usize, word: Vec<Factor>) -> Result<Self> {
        let mut out = Self::identity(ring, n);
        for f in word {
            out.push(f)?;
        }
        Ok(out)
    }

    /// Right-multiply by one more factor.
    pub fn push(&mut self, factor: Factor) -> Result<()> {
        if let Factor::Elementary { i, j, .. } = &factor {
            check_elementary_indices(*i, *j, self.n)?;
        }
        let m = factor.matrix(&self.ring, self.n);
        if m.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: m.dim(),
            });
        }
        self.body = &self.body * &m;
        self.word.push(factor);
        Ok(())
    }

    /// `self * other`, concatenating words.
    pub fn then(&self, other: &ElemMatrix) -> Result<ElemMatrix> {
        let mut out = self.clone();
        for f in &other.word {
            out.push(f.clone())?;
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn body(&self) -> &MatrixR {
        &self.body
    }

    pub fn word(&self) -> &[Factor] {
        &self.word
    }

    /// `(body^T)^{-1}`, assembled from the factors' known inverse transposes.
    pub fn inverse_transpose(&self) -> MatrixR {
        self.word
            .iter()
            .fold(MatrixR::identity(&self.ring, self.n), |acc, f| {
                &acc * &f.inverse_transpose(&self.ring, self.n)
            })
    }

    /// `(v sigma, w sigma^{-T})`
    pub fn act(&self, p: &SpherePoint) -> Result<SpherePoint> {
        let v = self.body.row_times(p.v())?;
        let w = self.inverse_transpose().row_times(p.w())?;
        SpherePoint::new(&self.ring, v, w)
    }

    pub fn to_json(&self) -> Value {
        let provenance: Vec<&str> = self
            .word
            .iter()
            .filter(|f| matches!(f, Factor::SuslinWitness { .. }))
            .map(|_| SUSLIN_WITNESS_PROVENANCE)
            .collect();
        json!({
            "matrix": self.body.to_json(),
            "word": self.word.iter().map(|f| f.to_json(&self.ring)).collect::<Vec<_>>(),
            "provenance": provenance,
        })
    }
}

fn check_elementary_indices(i: usize, j: usize, n: usize) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::IndexOutOfRange(format!(
            "E_({i},{j}) needs distinct indices in 1..={n}"
        )));
    }
    Ok(())
}

/// `E_{ij}(lambda)` in `E_n(R)`.
pub fn elem_generator(
    ring: &Ring,
    i: usize,
    j: usize,
    lambda: Elem,
    n: usize,
) -> Result<ElemMatrix> {
    check_elementary_indices(i, j, n)?;
    ElemMatrix::from_word(ring, n, vec![Factor::Elementary { i, j, lambda }])
}

/// The involution `(1 n+1)(2 n+2)...(n 2n)` on one-based indices `1..=2n`.
pub fn partner(k: usize, n: usize) -> usize {
    if k <= n {
        k + n
    } else {
        k - n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EoFactor {
    /// `E°_{ij}(lambda) = I + lambda (e_{ij} - e_{partner(j) partner(i)})`
    Orthogonal { i: usize, j: usize, lambda: Elem },
    /// `diag(sigma, sigma^{-T})` for an opaque `sigma`.
    HyperbolicBlock { matrix: MatrixR },
}

/// An element of `EO_{2n}(R)` acting on rows `(v | w)` of length `2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EOMatrix {
    ring: Ring,
    n: usize,
    body: MatrixR,
    word: Vec<EoFactor>,
}

fn eo_body(ring: &Ring, n: usize, i: usize, j: usize, lambda: &Elem) -> MatrixR {
    let mut m = MatrixR::identity(ring, 2 * n);
    let (pi, pj) = (partner(i, n), partner(j, n));
    m.set(i - 1, j - 1, ring.add(m.get(i - 1, j - 1), lambda));
    m.set(pj - 1, pi - 1, ring.sub(m.get(pj - 1, pi - 1), lambda));
    m
}

impl EOMatrix {
    pub fn identity(ring: &Ring, n: usize) -> Self {
        EOMatrix {
            ring: ring.clone(),
            n,
            body: MatrixR::identity(ring, 2 * n),
            word: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn body(&self) -> &MatrixR {
        &self.body
    }

    pub fn word(&self) -> &[EoFactor] {
        &self.word
    }

    pub fn then(&self, other: &EOMatrix) -> Result<EOMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        Ok(EOMatrix {
            ring: self.ring.clone(),
            n: self.n,
            body: self.body.try_mul(&other.body)?,
            word,
        })
    }

    pub fn act(&self, p: &SpherePoint) -> Result<SpherePoint> {
        let row = self.body.row_times(&p.as_row())?;
        SpherePoint::from_row(&self.ring, &row)
    }

    pub fn preserves_form_at(&self, p: &SpherePoint) -> Result<bool> {
        Ok(self.act(p)?.q() == p.q())
    }
}

/// `E°_{ij}(lambda)` in `EO_{2n}(R)`. Pairs with `j = partner(i)` are
/// accepted; for them the two matrix units cancel and the generator is the
/// identity.
pub fn eo_generator(ring: &Ring, i: usize, j: usize, lambda: Elem, n: usize) -> Result<EOMatrix> {
    if i == j || i == 0 || j == 0 || i > 2 * n || j > 2 * n {
        return Err(Error::IndexOutOfRange(format!(
            "E°_({i},{j}) needs distinct indices in 1..={}",
            2 * n
        )));
    }
    Ok(EOMatrix {
        ring: ring.clone(),
        n,
        body: eo_body(ring, n, i, j, &lambda),
        word: vec![EoFactor::Orthogonal { i, j, lambda }],
    })
}

/// `eps -> diag(eps, eps^{-T})`, sending `E_{ij}(lambda)` to `E°_{ij}(lambda)`.
pub fn hyperbolic_embed(eps: &ElemMatrix) -> EOMatrix {
    let word = eps
        .word
        .iter()
        .map(|f| match f {
            Factor::Elementary { i, j, lambda } => EoFactor::Orthogonal {
                i: *i,
                j: *j,
                lambda: lambda.clone(),
            },
            Factor::SuslinWitness { matrix, .. } => EoFactor::HyperbolicBlock {
                matrix: matrix.clone(),
            },
        })
        .collect();
    EOMatrix {
        ring: eps.ring.clone(),
        n: eps.n,
        body: MatrixR::block_diag(&eps.body, &eps.inverse_transpose()),
        word,
    }
}

/// One of the generators `1 + lambda x_1 x_i` with `x_1 in {e_1, f_1}`,
/// `x_i in {e_i, f_i}` and `1 < i <= n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpinGenerator {
    ring: Ring,
    first: UnitKind,
    second_kind: UnitKind,
    second_index: usize,
    lambda: Elem,
    n: usize,
}

impl EpinGenerator {
    pub fn new(
        ring: &Ring,
        first: UnitKind,
        second_kind: UnitKind,
        second_index: usize,
        lambda: Elem,
        n: usize,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::Precondition(format!(
                "Epin generators need n >= 3, got {n}"
            )));
        }
        if second_index < 2 || second_index > n {
            return Err(Error::IndexOutOfRange(format!(
                "second index {second_index} outside 2..={n}"
            )));
        }
        Ok(EpinGenerator {
            ring: ring.clone(),
            first,
            second_kind,
            second_index,
            lambda,
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first(&self) -> UnitKind {
        self.first
    }

    pub fn second_kind(&self) -> UnitKind {
        self.second_kind
    }

    pub fn second_index(&self) -> usize {
        self.second_index
    }

    pub fn lambda(&self) -> &Elem {
        &self.lambda
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// The generator with `lambda` negated, which is its inverse.
    pub fn inverse(&self) -> Self {
        EpinGenerator {
            lambda: self.ring.neg(&self.lambda),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "first": format!("{}1", self.first.label()),
            "kind": self.second_kind.label(),
            "index": self.second_index,
            "lambda": self.ring.to_json(&self.lambda),
        })
    }

    pub fn from_json(ring: &Ring, n: usize, v: &Value) -> Result<Self> {
        let bad = |what: &str| {
            Error::Parse(format!(
                "generator field '{what}' missing or invalid in {v}"
            ))
        };
        let first = match v.get("first").and_then(Value::as_str) {
            Some("e1") | Some("e") => UnitKind::E,
            Some("f1") | Some("f") => UnitKind::F,
            _ => return Err(bad("first")),
        };
        let kind = match v.get("kind").and_then(Value::as_str) {
            Some("e") => UnitKind::E,
            Some("f") => UnitKind::F,
            _ => return Err(bad("kind")),
        };
        let index = v
            .get("index")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("index"))? as usize;
        let lambda = ring.from_json(v.get("lambda").ok_or_else(|| bad("lambda"))?)?;
        Self::new(ring, first, kind, index, lambda, n)
    }

    pub fn describe(&self) -> String {
        format!(
            "1 + ({}) {}1 {}{}",
            self.ring.format(&self.lambda),
            self.first.label(),
            self.second_kind.label(),
            self.second_index
        )
    }
}

/// The two diagonal blocks `(1 - lambda X_1 X_i, 1 - lambda bar X_1 bar X_i)`.
pub fn epin_blocks(g: &EpinGenerator) -> Result<(MatrixR, MatrixR)> {
    let r = &g.ring;
    let x1 = basis_unit(r, g.first, 1, g.n)?;
    let xi = basis_unit(r, g.second_kind, g.second_index, g.n)?;
    let id = MatrixR::identity(r, x1.body().dim());
    let top = &id - &(x1.body() * xi.body()).scale(&g.lambda);
    let bottom = &id - &(&x1.bar() * &xi.bar()).scale(&g.lambda);
    Ok((top, bottom))
}

/// Block-diagonal image of the generator in `M_{2^n}(R)`.
pub fn epin_matrix(g: &EpinGenerator) -> Result<MatrixR> {
    let (top, bottom) = epin_blocks(g)?;
    Ok(MatrixR::block_diag(&top, &bottom))
}

/// `p' ` with `phi(p') = g phi(p) g^{-1}`.
pub fn act_on_point(g: &EpinGenerator, p: &SpherePoint) -> Result<SpherePoint> {
    if p.n() != g.n {
        return Err(Error::DimensionMismatch {
            expected: g.n,
            found: p.n(),
        });
    }
    let gm = epin_matrix(g)?;
    let g_inv = epin_matrix(&g.inverse())?;
    if !(&gm * &g_inv).is_identity() {
        return Err(Error::Inconsistency(format!(
            "{} is not inverted by negating lambda",
            g.describe()
        )));
    }
    let conj = &(&gm * phi_embed(p).body()) * &g_inv;
    if !is_odd(&conj) {
        return Err(Error::NotSuslin(
            "conjugate has nonzero diagonal blocks".into(),
        ));
    }
    let h = conj.dim() / 2;
    let moved = decode_suslin(&conj.block(0, h, h))?;
    if suslin_pair(&moved).1 != conj.block(h, 0, h) {
        return Err(Error::NotSuslin(
            "lower block of the conjugate is not the bar of the upper block".into(),
        ));
    }
    Ok(moved)
}

/// Closed-form row update for one generator (zero-based `k = i - 1`):
///
/// | generator    | update                                  |
/// |--------------|-----------------------------------------|
/// | `e_1 e_i`    | `a_1 += l b_i`, `a_i -= l b_1`          |
/// | `e_1 f_i`    | `a_1 += l a_i`, `b_i -= l b_1`          |
/// | `f_1 e_i`    | `a_i -= l a_1`, `b_1 += l b_i`          |
/// | `f_1 f_i`    | `b_i -= l a_1`, `b_1 += l a_i`          |
pub fn act_closed_form(g: &EpinGenerator, p: &SpherePoint) -> Result<SpherePoint> {
    if p.n() != g.n {
        return Err(Error::DimensionMismatch {
            expected: g.n,
            found: p.n(),
        });
    }
    let r = &g.ring;
    let l = &g.lambda;
    let k = g.second_index - 1;
    let (mut v, mut w) = p.clone().into_parts();
    let (a1, ak, b1, bk) = (v[0].clone(), v[k].clone(), w[0].clone(), w[k].clone());
    match (g.first, g.second_kind) {
        (UnitKind::E, UnitKind::E) => {
            v[0] = r.add(&a1, &r.mul(l, &bk));
            v[k] = r.sub(&ak, &r.mul(l, &b1));
        }
        (UnitKind::E, UnitKind::F) => {
            v[0] = r.add(&a1, &r.mul(l, &ak));
            w[k] = r.sub(&bk, &r.mul(l, &b1));
        }
        (UnitKind::F, UnitKind::E) => {
            v[k] = r.sub(&ak, &r.mul(l, &a1));
            w[0] = r.add(&b1, &r.mul(l, &bk));
        }
        (UnitKind::F, UnitKind::F) => {
            w[k] = r.sub(&bk, &r.mul(l, &a1));
            w[0] = r.add(&b1, &r.mul(l, &ak));
        }
    }
    SpherePoint::new(r, v, w)
}

/// The `E_n(R)` factor reproducing one generator's action at `p`.
///
/// `e_1 f_i` and `f_1 e_i` give single elementary factors. `e_1 e_i` moves
/// only `v` and `f_1 f_i` moves only `w`; both keep `v . w` fixed, and for a
/// unit point the moved row is reached by a Suslin witness
/// `I + w^T (v' - v)` (resp. `I - (w' - w)^T v`).
pub fn sigma_for_generator(g: &EpinGenerator, p: &SpherePoint) -> Result<(SpherePoint, Factor)> {
    let moved = act_closed_form(g, p)?;
    let r = &g.ring;
    let i = g.second_index;
    let factor = match (g.first, g.second_kind) {
        (UnitKind::E, UnitKind::F) => Factor::Elementary {
            i,
            j: 1,
            lambda: g.lambda.clone(),
        },
        (UnitKind::F, UnitKind::E) => Factor::Elementary {
            i: 1,
            j: i,
            lambda: r.neg(&g.lambda),
        },
        (UnitKind::E, UnitKind::E) => {
            require_unit(p)?;
            let dv = row_sub(r, moved.v(), p.v());
            Factor::SuslinWitness {
                matrix: rank_one_update(r, p.w(), &dv, false),
                inverse_transpose: rank_one_update(r, &dv, p.w(), true),
            }
        }
        (UnitKind::F, UnitKind::F) => {
            require_unit(p)?;
            let dw = row_sub(r, moved.w(), p.w());
            Factor::SuslinWitness {
                matrix: rank_one_update(r, &dw, p.v(), true),
                inverse_transpose: rank_one_update(r, p.v(), &dw, false),
            }
        }
    };
    Ok((moved, factor))
}

fn require_unit(p: &SpherePoint) -> Result<()> {
    if !p.is_unit() {
        return Err(Error::NotUnitSphere(p.ring().format(&p.q())));
    }
    Ok(())
}

/// Applies `word` to `p` (first generator first) by conjugation and builds
/// `sigma` with `(v sigma, w sigma^{-T})` equal to the result. `sigma`
/// depends on the point, so the current point is threaded through the fold.
pub fn extract_sigma(word: &[EpinGenerator], p: &SpherePoint) -> Result<(SpherePoint, ElemMatrix)> {
    require_unit(p)?;
    if p.n() < 3 {
        return Err(Error::Precondition(format!(
            "sigma extraction needs n >= 3, got {}",
            p.n()
        )));
    }
    let mut current = p.clone();
    let mut sigma = ElemMatrix::identity(p.ring(), p.n());
    for g in word {
        let conj = act_on_point(g, &current)?;
        let (closed, factor) = sigma_for_generator(g, &current)?;
        if conj != closed {
            return Err(Error::Inconsistency(format!(
                "closed form disagrees with conjugation for {} at {}",
                g.describe(),
                current.describe()
            )));
        }
        sigma.push(factor)?;
        current = conj;
    }
    if sigma.act(p)? != current {
        return Err(Error::Inconsistency(
            "accumulated sigma does not reproduce the word action".into(),
        ));
    }
    Ok((current, sigma))
}

/// The same-orbit witness for `(v, w1)` and `(v, w2)`.
#[derive(Clone, Debug)]
pub struct TransitiveWitness {
    /// `eps = I + v^T (w2 - w1)`, with `w1 eps = w2`.
    pub epsilon: ElemMatrix,
    /// `H(eps^{-T}) = diag(eps^{-T}, eps)`, sending `(v, w1)` to `(v, w2)`.
    pub orthogonal: EOMatrix,
}

pub fn transitive_witness(
    v: &[Elem],
    w1: &[Elem],
    w2: &[Elem],
    ring: &Ring,
) -> Result<TransitiveWitness> {
    let n = v.len();
    if w1.len() != n || w2.len() != n {
        return Err(Error::LengthMismatch {
            v: n,
            w: w1.len().max(w2.len()),
        });
    }
    if n < 3 {
        return Err(Error::Precondition(format!(
            "witness needs n >= 3, got {n}"
        )));
    }
    for w in [w1, w2] {
        let q = ring.dot(v, w);
        if !ring.is_one(&q) {
            return Err(Error::Precondition(format!(
                "v . w must be 1, got {}",
                ring.format(&q)
            )));
        }
    }
    let dw = row_sub(ring, w2, w1);
    let eps_body = rank_one_update(ring, v, &dw, false);
    let eps_inv_t = rank_one_update(ring, &dw, v, true);
    let epsilon = ElemMatrix::from_word(
        ring,
        n,
        vec![Factor::SuslinWitness {
            matrix: eps_body,
            inverse_transpose: eps_inv_t.clone(),
        }],
    )?;
    // eps^{-T} is itself a witness factor whose inverse transpose is eps
    let eps_inv_t_elem = ElemMatrix::from_word(
        ring,
        n,
        vec![Factor::SuslinWitness {
            matrix: eps_inv_t,
            inverse_transpose: epsilon.body.clone(),
        }],
    )?;
    Ok(TransitiveWitness {
        orthogonal: hyperbolic_embed(&eps_inv_t_elem),
        epsilon,
    })
}

/// `pi(g)`: the `2n x 2n` matrix of the linear map `p -> g p g^{-1}` on
/// rows `(v | w)`, read off from the images of the basis points.
pub fn orthogonal_image(g: &EpinGenerator) -> Result<MatrixR> {
    let r = &g.ring;
    let n = g.n;
    let mut rows = Vec::with_capacity(2 * n);
    for k in 1..=n {
        rows.push(act_on_point(g, &SpherePoint::e(r, n, k))?.as_row());
    }
    for k in 1..=n {
        rows.push(act_on_point(g, &SpherePoint::f(r, n, k))?.as_row());
    }
    MatrixR::from_rows(r, rows)
}

/// Both sides of the two block-conjugation identities for a Suslin matrix
/// `S = [[a, T], [-bar T, b]]` and an isotropic Suslin matrix `X = S(x)`.
/// Returns `[(computed, expected); 2]`.
pub fn block_conjugation_sides(
    x: &SpherePoint,
    t: &SpherePoint,
    a: &Elem,
    b: &Elem,
) -> Result<[(MatrixR, MatrixR); 2]> {
    x.check_same_shape(t)?;
    let r = x.ring();
    if !r.is_zero(&x.q()) {
        return Err(Error::Precondition("X must satisfy X bar X = 0".into()));
    }
    let (xm, x_bar) = suslin_pair(x);
    let (tm, t_bar) = suslin_pair(t);
    let h = xm.dim();
    let id = MatrixR::identity(r, h);
    let zero = MatrixR::zero(r, h);
    let (s, _) = grow_block(&tm, &t_bar, a, b);
    let pairing = r.add(&r.dot(x.v(), t.w()), &r.dot(t.v(), x.w()));

    let upper = MatrixR::from_blocks(&id, &xm, &zero, &id);
    let lower = MatrixR::from_blocks(&id, &zero, &-&x_bar, &id);

    let first = &(&upper * &s) * &lower;
    let first_expected = MatrixR::from_blocks(
        &MatrixR::scalar(r, h, &r.sub(a, &pairing)),
        &(&tm + &xm.scale(b)),
        &(&-&t_bar - &x_bar.scale(b)),
        &MatrixR::scalar(r, h, b),
    );
    let second = &(&lower * &s) * &upper;
    let second_expected = MatrixR::from_blocks(
        &MatrixR::scalar(r, h, a),
        &(&tm + &xm.scale(a)),
        &(&-&t_bar - &x_bar.scale(a)),
        &MatrixR::scalar(r, h, &r.sub(b, &pairing)),
    );
    Ok([(first, first_expected), (second, second_expected)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_point, random_unit_point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_generator(r: &Ring, n: usize, rng: &mut ChaCha8Rng) -> EpinGenerator {
        let first = UnitKind::BOTH[rng.gen_range(0..2)];
        let kind = UnitKind::BOTH[rng.gen_range(0..2)];
        let idx = rng.gen_range(2..=n);
        EpinGenerator::new(r, first, kind, idx, r.random(rng), n).unwrap()
    }

    #[test]
    fn elementary_generator_basics() {
        let r = Ring::zmod(7).unwrap();
        let e = elem_generator(&r, 1, 2, r.from_i64(5), 3).unwrap();
        let mut expected = MatrixR::identity(&r, 3);
        expected.set(0, 1, r.from_i64(5));
        assert_eq!(*e.body(), expected);
        let inv = elem_generator(&r, 1, 2, r.from_i64(-5), 3).unwrap();
        assert!((e.body() * inv.body()).is_identity());
        let e13 = elem_generator(&r, 1, 3, r.from_i64(4), 3).unwrap();
        assert_eq!(e13.body().det(), r.one());
        assert!(elem_generator(&r, 2, 2, r.one(), 3).is_err());
        assert!(elem_generator(&r, 1, 4, r.one(), 3).is_err());
    }

    #[test]
    fn eo_generator_definition_and_inverse() {
        let r = Ring::integers();
        let lam = r.from_i64(3);
        let g = eo_generator(&r, 1, 2, lam.clone(), 3).unwrap();
        let mut expected = MatrixR::identity(&r, 6);
        expected.set(0, 1, lam.clone());
        expected.set(4, 3, r.neg(&lam));
        assert_eq!(*g.body(), expected);
        let inv = eo_generator(&r, 1, 2, r.neg(&lam), 3).unwrap();
        assert!((g.body() * inv.body()).is_identity());
        // long-root pair collapses to the identity
        assert!(eo_generator(&r, 1, 4, lam, 3).unwrap().body().is_identity());
        assert!(eo_generator(&r, 1, 1, r.one(), 3).is_err());
        assert!(eo_generator(&r, 1, 7, r.one(), 3).is_err());
    }

    #[test]
    fn eo_generators_preserve_the_form() {
        let r = Ring::zmod(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let i = rng.gen_range(1..=6);
            let mut j = rng.gen_range(1..=5);
            if j >= i {
                j += 1;
            }
            let g = eo_generator(&r, i, j, r.random(&mut rng), 3).unwrap();
            let p = random_point(&r, 3, &mut rng);
            assert!(g.preserves_form_at(&p).unwrap());
        }
    }

    #[test]
    fn hyperbolic_embedding_is_a_homomorphism() {
        let r = Ring::integers();
        assert!(hyperbolic_embed(&ElemMatrix::identity(&r, 3))
            .body()
            .is_identity());
        let lam = r.from_i64(4);
        let e12 = elem_generator(&r, 1, 2, lam.clone(), 3).unwrap();
        assert_eq!(
            hyperbolic_embed(&e12).body(),
            eo_generator(&r, 1, 2, lam, 3).unwrap().body()
        );
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = elem_generator(&r, rng.gen_range(1..=2), 3, r.random(&mut rng), 3).unwrap();
            let b = elem_generator(&r, 3, rng.gen_range(1..=2), r.random(&mut rng), 3).unwrap();
            let ab = a.then(&b).unwrap();
            assert_eq!(
                *hyperbolic_embed(&ab).body(),
                hyperbolic_embed(&a).body() * hyperbolic_embed(&b).body()
            );
        }
    }

    #[test]
    fn epin_matrix_shapes() {
        let r = Ring::zmod(5).unwrap();
        let zero = EpinGenerator::new(&r, UnitKind::E, UnitKind::F, 2, r.zero(), 3).unwrap();
        assert!(epin_matrix(&zero).unwrap().is_identity());
        assert!(EpinGenerator::new(&r, UnitKind::E, UnitKind::E, 1, r.one(), 3).is_err());
        assert!(EpinGenerator::new(&r, UnitKind::E, UnitKind::E, 2, r.one(), 2).is_err());

        // first = e_1: the top block is [[1, -l X], [0, 1]]
        let lam = r.from_i64(2);
        for kind in UnitKind::BOTH {
            let g = EpinGenerator::new(&r, UnitKind::E, kind, 3, lam.clone(), 3).unwrap();
            let (top, _) = epin_blocks(&g).unwrap();
            let xi = basis_unit(&r, kind, 3, 3).unwrap();
            let h = top.dim() / 2;
            let x = xi.body().block(0, h, h);
            assert!(top.block(0, 0, h).is_identity());
            assert!(top.block(h, h, h).is_identity());
            assert!(top.block(h, 0, h).is_zero());
            assert_eq!(top.block(0, h, h), x.scale(&r.neg(&lam)));
        }
    }

    #[test]
    fn conjugation_keeps_points_odd() {
        let r = Ring::zmod(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let g = random_generator(&r, 3, &mut rng);
            let p = random_point(&r, 3, &mut rng);
            let gm = epin_matrix(&g).unwrap();
            let conj = &(&gm * phi_embed(&p).body()) * &epin_matrix(&g.inverse()).unwrap();
            assert!(is_odd(&conj));
        }
    }

    #[test]
    fn zero_lambda_fixes_points() {
        let r = Ring::zmod(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_point(&r, 4, &mut rng);
        for first in UnitKind::BOTH {
            for kind in UnitKind::BOTH {
                let g = EpinGenerator::new(&r, first, kind, 3, r.zero(), 4).unwrap();
                assert_eq!(act_on_point(&g, &p).unwrap(), p);
            }
        }
    }

    #[test]
    fn f1_ek_moves_rows_as_displayed() {
        let r = Ring::integers();
        let p = SpherePoint::from_i64(&r, &[2, 3, 5], &[1, 0, 0]).unwrap();
        let lam = r.from_i64(7);
        let g = EpinGenerator::new(&r, UnitKind::F, UnitKind::E, 3, lam, 3).unwrap();
        let moved = act_on_point(&g, &p).unwrap();
        // a_3 -> a_3 - 7 a_1, b_1 -> b_1 + 7 b_3
        assert_eq!(
            moved,
            SpherePoint::from_i64(&r, &[2, 3, 5 - 14], &[1, 0, 0]).unwrap()
        );
        let (_, factor) = sigma_for_generator(&g, &p).unwrap();
        assert_eq!(
            factor,
            Factor::Elementary {
                i: 1,
                j: 3,
                lambda: r.from_i64(-7)
            }
        );
    }

    #[test]
    fn closed_form_matches_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for r in [
            Ring::zmod(6).unwrap(),
            Ring::integers(),
            Ring::parse("poly:zmod:5:2").unwrap(),
        ] {
            for n in 3..=4 {
                for _ in 0..40 {
                    let g = random_generator(&r, n, &mut rng);
                    let p = random_point(&r, n, &mut rng);
                    let moved = act_on_point(&g, &p).unwrap();
                    assert_eq!(moved, act_closed_form(&g, &p).unwrap(), "{}", g.describe());
                    assert_eq!(moved.q(), p.q());
                }
            }
        }
    }

    #[test]
    fn extract_sigma_empty_word() {
        let r = Ring::zmod(5).unwrap();
        let p = SpherePoint::base(&r, 3);
        let (q, sigma) = extract_sigma(&[], &p).unwrap();
        assert_eq!(q, p);
        assert!(sigma.body().is_identity());
    }

    #[test]
    fn extract_sigma_requires_unit_point() {
        let r = Ring::zmod(5).unwrap();
        let p = SpherePoint::from_i64(&r, &[1, 0, 0], &[2, 0, 0]).unwrap();
        let g = EpinGenerator::new(&r, UnitKind::E, UnitKind::E, 2, r.one(), 3).unwrap();
        assert!(matches!(
            extract_sigma(&[g], &p),
            Err(Error::NotUnitSphere(_))
        ));
    }

    #[test]
    fn extract_sigma_random_words() {
        let r = Ring::zmod(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let p = random_unit_point(&r, 3, &mut rng);
            let word: Vec<_> = (0..4).map(|_| random_generator(&r, 3, &mut rng)).collect();
            let (moved, sigma) = extract_sigma(&word, &p).unwrap();
            assert_eq!(sigma.act(&p).unwrap(), moved);
            assert_eq!(sigma.body().det(), r.one());
            // the stored inverse transpose really is one
            assert!((sigma.body() * &sigma.inverse_transpose().transpose()).is_identity());
        }
    }

    #[test]
    fn transitive_witness_examples() {
        let r = Ring::integers();
        let v = [r.one(), r.zero(), r.zero()];
        let w1 = [r.one(), r.zero(), r.zero()];
        let w2 = [r.one(), r.one(), r.zero()];
        let same = transitive_witness(&v, &w1, &w1, &r).unwrap();
        assert!(same.epsilon.body().is_identity());
        let t = transitive_witness(&v, &w1, &w2, &r).unwrap();
        assert_eq!(
            *t.epsilon.body(),
            MatrixR::from_i64(&r, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap()
        );
        assert_eq!(t.epsilon.body().row_times(&w1).unwrap(), w2.to_vec());
        assert_eq!(
            t.epsilon.inverse_transpose().row_times(&v).unwrap(),
            v.to_vec()
        );
        let p1 = SpherePoint::new(&r, v.to_vec(), w1.to_vec()).unwrap();
        let p2 = SpherePoint::new(&r, v.to_vec(), w2.to_vec()).unwrap();
        assert_eq!(t.orthogonal.act(&p1).unwrap(), p2);
        assert!(transitive_witness(&v, &w1, &[r.zero(), r.one(), r.zero()], &r).is_err());
    }

    #[test]
    fn orthogonal_image_agrees_with_conjugation() {
        let r = Ring::zmod(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let g = random_generator(&r, 3, &mut rng);
            let pi = orthogonal_image(&g).unwrap();
            for _ in 0..10 {
                let p = random_point(&r, 3, &mut rng);
                let via_matrix =
                    SpherePoint::from_row(&r, &pi.row_times(&p.as_row()).unwrap()).unwrap();
                assert_eq!(via_matrix, act_on_point(&g, &p).unwrap());
            }
        }
    }

    #[test]
    fn block_conjugation_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for r in [Ring::zmod(6).unwrap(), Ring::integers()] {
            for n in 2..=4 {
                for _ in 0..20 {
                    let x = crate::sampling::random_isotropic_point(&r, n, &mut rng);
                    let t = random_point(&r, n, &mut rng);
                    let (a, b) = (r.random(&mut rng), r.random(&mut rng));
                    for (got, want) in block_conjugation_sides(&x, &t, &a, &b).unwrap() {
                        assert_eq!(got, want);
                    }
                }
            }
        }
    }
}
