//! Dense square matrices over a [`Ring`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::ring::{Elem, Ring, RingValue};

/// Square matrix with row-major entries, all owned by `ring`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixR {
    ring: Ring,
    dim: usize,
    entries: Vec<Elem>,
}

impl MatrixR {
    pub fn zero(ring: &Ring, dim: usize) -> Self {
        MatrixR {
            ring: ring.clone(),
            dim,
            entries: vec![ring.zero(); dim * dim],
        }
    }

    pub fn identity(ring: &Ring, dim: usize) -> Self {
        Self::scalar(ring, dim, &ring.one())
    }

    /// `c * I`
    pub fn scalar(ring: &Ring, dim: usize, c: &Elem) -> Self {
        let mut m = Self::zero(ring, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = c.clone();
        }
        m
    }

    pub fn from_fn(ring: &Ring, dim: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        MatrixR {
            ring: ring.clone(),
            dim,
            entries,
        }
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<Elem>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(MatrixR {
            ring: ring.clone(),
            dim,
            entries,
        })
    }

    pub fn from_i64(ring: &Ring, rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|&x| ring.from_i64(x)).collect())
                .collect(),
        )
    }

    /// Matrix unit `e_{ij}` (zero-based indices).
    pub fn unit(ring: &Ring, dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(ring, dim);
        m.entries[i * dim + j] = ring.one();
        m
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.dim + j]
    }

    pub fn value(&self, i: usize, j: usize) -> RingValue {
        self.ring.value(self.get(i, j).clone())
    }

    pub fn set(&mut self, i: usize, j: usize, e: Elem) {
        self.entries[i * self.dim + j] = e;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    fn check_compatible(&self, other: &MatrixR) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &MatrixR) -> Result<MatrixR> {
        self.check_compatible(other)?;
        let n = self.dim;
        let r = &self.ring;
        let mut out = vec![r.zero(); n * n];
        // Suslin-type matrices are sparse, so skip zero left factors.
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if r.is_zero(b) {
                        continue;
                    }
                    let slot = &mut out[i * n + j];
                    *slot = r.add(slot, &r.mul(a, b));
                }
            }
        }
        Ok(MatrixR {
            ring: r.clone(),
            dim: n,
            entries: out,
        })
    }

    pub fn try_add(&self, other: &MatrixR) -> Result<MatrixR> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |r, a, b| r.add(a, b)))
    }

    pub fn try_sub(&self, other: &MatrixR) -> Result<MatrixR> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |r, a, b| r.sub(a, b)))
    }

    fn zip_with(&self, other: &MatrixR, f: impl Fn(&Ring, &Elem, &Elem) -> Elem) -> MatrixR {
        MatrixR {
            ring: self.ring.clone(),
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(&self.ring, a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Ring, &Elem) -> Elem) -> MatrixR {
        MatrixR {
            ring: self.ring.clone(),
            dim: self.dim,
            entries: self.entries.iter().map(|a| f(&self.ring, a)).collect(),
        }
    }

    pub fn scale(&self, c: &Elem) -> MatrixR {
        self.map(|r, a| r.mul(c, a))
    }

    pub fn transpose(&self) -> MatrixR {
        MatrixR::from_fn(&self.ring, self.dim, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|a| self.ring.is_zero(a))
    }

    pub fn is_identity(&self) -> bool {
        *self == MatrixR::identity(&self.ring, self.dim)
    }

    /// True when this equals `c * I`.
    pub fn is_scalar(&self, c: &Elem) -> bool {
        *self == MatrixR::scalar(&self.ring, self.dim, c)
    }

    /// Assemble `[[tl, tr], [bl, br]]` from four equal-size blocks.
    pub fn from_blocks(tl: &MatrixR, tr: &MatrixR, bl: &MatrixR, br: &MatrixR) -> MatrixR {
        let h = tl.dim;
        assert!(
            tr.dim == h && bl.dim == h && br.dim == h,
            "blocks must share a dimension"
        );
        MatrixR::from_fn(&tl.ring, 2 * h, |i, j| {
            let block = match (i < h, j < h) {
                (true, true) => tl,
                (true, false) => tr,
                (false, true) => bl,
                (false, false) => br,
            };
            block.get(i % h, j % h).clone()
        })
    }

    /// Square sub-block of size `size` starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> MatrixR {
        MatrixR::from_fn(&self.ring, size, |i, j| self.get(row + i, col + j).clone())
    }

    /// `[[a, 0], [0, b]]`
    pub fn block_diag(a: &MatrixR, b: &MatrixR) -> MatrixR {
        let n = a.dim + b.dim;
        MatrixR::from_fn(&a.ring, n, |i, j| {
            if i < a.dim && j < a.dim {
                a.get(i, j).clone()
            } else if i >= a.dim && j >= a.dim {
                b.get(i - a.dim, j - a.dim).clone()
            } else {
                a.ring.zero()
            }
        })
    }

    /// Row vector times matrix, `v * M`.
    pub fn row_times(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let r = &self.ring;
        Ok((0..self.dim)
            .map(|j| {
                (0..self.dim).fold(r.zero(), |acc, i| {
                    if r.is_zero(&v[i]) {
                        acc
                    } else {
                        r.add(&acc, &r.mul(&v[i], self.get(i, j)))
                    }
                })
            })
            .collect())
    }

    /// Matrix times column vector, `M * x`.
    pub fn times_column(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| self.ring.dot(self.row(i), x))
            .collect())
    }

    /// Determinant by the Berkowitz algorithm. Uses no division, so it is
    /// valid over rings with zero divisors.
    pub fn det(&self) -> Elem {
        let charpoly = self.berkowitz();
        let c = charpoly[self.dim].clone();
        if self.dim.is_multiple_of(2) {
            c
        } else {
            self.ring.neg(&c)
        }
    }

    /// Coefficients `[1, c_1, ..., c_n]` of `det(x I - A)`, highest degree
    /// first.
    pub fn berkowitz(&self) -> Vec<Elem> {
        let r = &self.ring;
        let n = self.dim;
        if n == 0 {
            return vec![r.one()];
        }
        // vector for the trailing 1x1 principal submatrix
        let last = self.get(n - 1, n - 1);
        let mut vec = vec![r.one(), r.neg(last)];
        // grow the principal submatrix from the bottom-right corner
        for k in (0..n - 1).rev() {
            let size = n - k; // current submatrix A[k.., k..]
            let a = self.get(k, k);
            let row: Vec<&Elem> = (k + 1..n).map(|j| self.get(k, j)).collect();
            let col: Vec<Elem> = (k + 1..n).map(|i| self.get(i, k).clone()).collect();
            // diags[t] = -R A^t C for t = 0..size-2
            let mut diags = vec![r.one(), r.neg(a)];
            let mut cur = col;
            for t in 0..size - 1 {
                let rc = row
                    .iter()
                    .zip(&cur)
                    .fold(r.zero(), |acc, (x, y)| r.add(&acc, &r.mul(x, y)));
                diags.push(r.neg(&rc));
                if t + 1 < size - 1 {
                    cur = (k + 1..n)
                        .map(|i| {
                            (k + 1..n).zip(&cur).fold(r.zero(), |acc, (j, y)| {
                                r.add(&acc, &r.mul(self.get(i, j), y))
                            })
                        })
                        .collect();
                }
            }
            // Toeplitz (size+1) x size lower-triangular matrix times vec
            let mut next = Vec::with_capacity(size + 1);
            for i in 0..=size {
                let mut acc = r.zero();
                for (j, vj) in vec.iter().enumerate().take(size) {
                    if j <= i {
                        acc = r.add(&acc, &r.mul(&diags[i - j], vj));
                    }
                }
                next.push(acc);
            }
            vec = next;
        }
        vec
    }

    /// Determinant by first-row Laplace expansion; limited to `dim <= 8`.
    pub fn det_cofactor(&self) -> Result<Elem> {
        if self.dim > 8 {
            return Err(Error::Precondition(format!(
                "cofactor expansion is limited to dimension 8, got {}",
                self.dim
            )));
        }
        let idx: Vec<usize> = (0..self.dim).collect();
        Ok(self.laplace(0, &idx))
    }

    fn laplace(&self, row: usize, cols: &[usize]) -> Elem {
        let r = &self.ring;
        if cols.is_empty() {
            return r.one();
        }
        let mut acc = r.zero();
        for (pos, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if r.is_zero(a) {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = r.mul(a, &self.laplace(row + 1, &rest));
            acc = if pos % 2 == 0 {
                r.add(&acc, &term)
            } else {
                r.sub(&acc, &term)
            };
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.dim)
                .map(|i| Value::Array(self.row(i).iter().map(|e| self.ring.to_json(e)).collect()))
                .collect(),
        )
    }

    pub fn from_json(ring: &Ring, v: &Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
        let rows = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                    .iter()
                    .map(|e| ring.from_json(e))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ring, rows)
    }
}

impl fmt::Display for MatrixR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|e| self.ring.format(e)).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// Operator forms panic on ring or dimension mismatch; use the `try_*`
// methods where the operands are not known to be compatible.
impl Mul for &MatrixR {
    type Output = MatrixR;

    fn mul(self, rhs: &MatrixR) -> MatrixR {
        self.try_mul(rhs)
            .expect("matrix product of incompatible operands")
    }
}

impl Add for &MatrixR {
    type Output = MatrixR;

    fn add(self, rhs: &MatrixR) -> MatrixR {
        self.try_add(rhs)
            .expect("matrix sum of incompatible operands")
    }
}

impl Sub for &MatrixR {
    type Output = MatrixR;

    fn sub(self, rhs: &MatrixR) -> MatrixR {
        self.try_sub(rhs)
            .expect("matrix difference of incompatible operands")
    }
}

impl Neg for &MatrixR {
    type Output = MatrixR;

    fn neg(self) -> MatrixR {
        self.map(|r, a| r.neg(a))
    }
}

pub fn mat_mul(a: &MatrixR, b: &MatrixR) -> Result<MatrixR> {
    a.try_mul(b)
}

pub fn mat_det(a: &MatrixR) -> RingValue {
    a.ring().value(a.det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(ring: &Ring, dim: usize, rng: &mut ChaCha8Rng) -> MatrixR {
        MatrixR::from_fn(ring, dim, |_, _| ring.random(rng))
    }

    /// Leibniz formula, an independent determinant oracle.
    fn leibniz(m: &MatrixR) -> Elem {
        let r = m.ring();
        let n = m.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = r.zero();
        fn rec(k: usize, perm: &mut Vec<usize>, sign: bool, m: &MatrixR, total: &mut Elem) {
            let r = m.ring();
            let n = perm.len();
            if k == n {
                let mut prod = r.one();
                for (i, &p) in perm.iter().enumerate() {
                    prod = r.mul(&prod, m.get(i, p));
                }
                *total = if sign {
                    r.sub(total, &prod)
                } else {
                    r.add(total, &prod)
                };
                return;
            }
            for i in k..n {
                perm.swap(k, i);
                rec(k + 1, perm, sign ^ (i != k), m, total);
                perm.swap(k, i);
            }
        }
        rec(0, &mut perm, false, m, &mut total);
        total
    }

    #[test]
    fn identity_is_a_unit() {
        let r = Ring::zmod(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_matrix(&r, 4, &mut rng);
            let id = MatrixR::identity(&r, 4);
            assert_eq!(mat_mul(&a, &id).unwrap(), a);
            assert_eq!(mat_mul(&id, &a).unwrap(), a);
        }
    }

    #[test]
    fn matrix_units_compose() {
        let r = Ring::integers();
        let e12 = MatrixR::unit(&r, 3, 0, 1);
        let e23 = MatrixR::unit(&r, 3, 1, 2);
        assert_eq!(&e12 * &e23, MatrixR::unit(&r, 3, 0, 2));
    }

    #[test]
    fn mismatch_errors() {
        let a = MatrixR::identity(&Ring::integers(), 2);
        let b = MatrixR::identity(&Ring::integers(), 3);
        let c = MatrixR::identity(&Ring::zmod(3).unwrap(), 2);
        assert!(matches!(
            mat_mul(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(mat_mul(&a, &c), Err(Error::RingMismatch { .. })));
    }

    #[test]
    fn determinant_small_cases() {
        let z = Ring::integers();
        assert_eq!(MatrixR::identity(&z, 4).det(), z.one());
        let z6 = Ring::zmod(6).unwrap();
        let mut e12 = MatrixR::identity(&z6, 3);
        e12.set(0, 1, z6.from_i64(5));
        assert_eq!(e12.det(), z6.one());
        let m = MatrixR::from_i64(&z, &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(m.det(), z.from_i64(-2));
        assert_eq!(MatrixR::zero(&z, 0).det(), z.one());
    }

    #[test]
    fn berkowitz_matches_leibniz_and_cofactor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for ring in [
            Ring::integers(),
            Ring::zmod(6).unwrap(),
            Ring::parse("poly:zmod:5:2").unwrap(),
        ] {
            for dim in 1..=5 {
                for _ in 0..6 {
                    let m = random_matrix(&ring, dim, &mut rng);
                    let oracle = leibniz(&m);
                    assert_eq!(m.det(), oracle, "Berkowitz over {ring}, dim {dim}");
                    assert_eq!(m.det_cofactor().unwrap(), oracle);
                }
            }
        }
    }

    #[test]
    fn det_is_multiplicative_over_zero_divisors() {
        let r = Ring::zmod(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_matrix(&r, 4, &mut rng);
            let b = random_matrix(&r, 4, &mut rng);
            assert_eq!((&a * &b).det(), r.mul(&a.det(), &b.det()));
        }
    }

    #[test]
    fn cofactor_path_is_capped() {
        let r = Ring::integers();
        assert!(MatrixR::identity(&r, 9).det_cofactor().is_err());
        assert_eq!(MatrixR::identity(&r, 9).det(), r.one());
    }

    #[test]
    fn json_round_trip() {
        let r = Ring::integers();
        let m = MatrixR::from_i64(&r, &[&[1, -2], &[0, 7]]).unwrap();
        assert_eq!(MatrixR::from_json(&r, &m.to_json()).unwrap(), m);
        assert!(MatrixR::from_json(&r, &serde_json::json!([[1, 2], [3]])).is_err());
    }
}
