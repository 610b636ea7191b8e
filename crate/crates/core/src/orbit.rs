//! Brute-force orbits over finite rings: `Um_n(R)` under `E_n(R)`, the unit
//! sphere under `EO_{2n}(R)` (or the Epin generators directly), and the
//! induced map between the two orbit sets.
//!
//! Orbits are computed as connected components of the graph with edges
//! `x -- g(x)` (union-find), so the partition does not depend on the
//! generator order or on how the image computation is scheduled.

use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::epin::{act_closed_form, partner, transitive_witness, EpinGenerator};
use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};
use crate::suslin::{SpherePoint, UnitKind};

pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// A partition of a finite universe into orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    /// Canonical byte serialization of each point, in universe order.
    pub universe: Vec<Vec<u8>>,
    /// Sorted index sets, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    pub generator_set: String,
}

impl OrbitPartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// `class_of[i]` is the class index containing universe point `i`.
    pub fn class_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.universe.len()];
        for (c, members) in self.classes.iter().enumerate() {
            for &i in members {
                out[i] = c;
            }
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller index wins so roots are stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Orbits of `universe` under the generators. `key` must be injective on
/// the universe; `action` must map the universe into itself.
pub fn orbit_partition<T, G, K, A>(
    universe: &[T],
    generators: &[G],
    key: K,
    action: A,
    generator_set: &str,
) -> Result<OrbitPartition>
where
    T: Sync,
    G: Sync,
    K: Fn(&T) -> Vec<u8> + Sync,
    A: Fn(&G, &T) -> Result<T> + Sync,
{
    let keys: Vec<Vec<u8>> = universe.par_iter().map(&key).collect();
    let mut index = HashMap::with_capacity(keys.len());
    for (i, k) in keys.iter().enumerate() {
        if index.insert(k.clone(), i).is_some() {
            return Err(Error::Inconsistency(format!(
                "universe point {i} repeats an earlier point"
            )));
        }
    }
    let images: Vec<Vec<usize>> = universe
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            generators
                .iter()
                .map(|g| {
                    let image = action(g, x)?;
                    index
                        .get(&key(&image))
                        .copied()
                        .ok_or_else(|| Error::LeftUniverse(format!("image of universe point {i}")))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;

    let mut uf = UnionFind::new(universe.len());
    for (i, targets) in images.iter().enumerate() {
        for &j in targets {
            uf.union(i, j);
        }
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..universe.len() {
        let r = uf.find(i);
        by_root.entry(r).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = by_root.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    Ok(OrbitPartition {
        universe: keys,
        classes,
        generator_set: generator_set.to_string(),
    })
}

fn row_key(ring: &Ring, row: &[Elem]) -> Vec<u8> {
    row.iter().flat_map(|e| ring.canonical_bytes(e)).collect()
}

fn point_key(p: &SpherePoint) -> Vec<u8> {
    row_key(p.ring(), &p.as_row())
}

fn check_budget(ring: &Ring, len: usize, budget: u128) -> Result<Vec<Elem>> {
    let elements: Vec<Elem> = ring.elements()?.collect();
    let needed = (elements.len() as u128)
        .checked_pow(len as u32)
        .unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(elements)
}

/// All rows of length `len` over `elements`, last coordinate fastest.
fn all_rows(elements: &[Elem], len: usize) -> Vec<Vec<Elem>> {
    let mut rows = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                elements.iter().map(move |e| {
                    let mut next = r.clone();
                    next.push(e.clone());
                    next
                })
            })
            .collect();
    }
    rows
}

/// Over `Z/m` a row is unimodular iff its entries generate the unit ideal,
/// i.e. `gcd(v_1, ..., v_n, m) = 1`.
pub fn is_unimodular_mod(residues: &[u64], modulus: u64) -> bool {
    residues.iter().fold(modulus, |g, &x| g.gcd(&x)) == 1
}

fn is_unimodular(ring: &Ring, elements: &[Elem], row: &[Elem]) -> bool {
    if let Some(m) = ring.modulus() {
        let residues: Vec<u64> = row.iter().map(|e| ring.residue(e).unwrap_or(0)).collect();
        return is_unimodular_mod(&residues, m);
    }
    solutions(ring, elements, row).next().is_some()
}

/// Every `w` with `v . w = 1`, by exhaustive search.
fn solutions<'a>(
    ring: &'a Ring,
    elements: &'a [Elem],
    v: &'a [Elem],
) -> impl Iterator<Item = Vec<Elem>> + 'a {
    all_rows(elements, v.len())
        .into_iter()
        .filter(move |w| ring.is_one(&ring.dot(v, w)))
}

/// `Um_n(R)`, in enumeration order.
pub fn enumerate_um(ring: &Ring, n: usize, budget: u128) -> Result<Vec<Vec<Elem>>> {
    let elements = check_budget(ring, n, budget)?;
    Ok(all_rows(&elements, n)
        .into_par_iter()
        .filter(|v| is_unimodular(ring, &elements, v))
        .collect())
}

/// The unit sphere `{(v, w) : v . w = 1}` in `H(R^n)`.
pub fn enumerate_sphere(ring: &Ring, n: usize, budget: u128) -> Result<Vec<SpherePoint>> {
    let elements = check_budget(ring, 2 * n, budget)?;
    let rows = all_rows(&elements, n);
    let per_v: Vec<Vec<SpherePoint>> = rows
        .par_iter()
        .map(|v| {
            rows.iter()
                .filter(|w| ring.is_one(&ring.dot(v, w)))
                .map(|w| SpherePoint::new(ring, v.clone(), w.clone()).expect("equal lengths"))
                .collect()
        })
        .collect();
    Ok(per_v.into_iter().flatten().collect())
}

fn nonzero_elements(ring: &Ring) -> Result<Vec<Elem>> {
    Ok(ring.elements()?.filter(|e| !ring.is_zero(e)).collect())
}

/// `(i, j, lambda)`, zero-based, for every `E_{ij}(lambda)` with `lambda != 0`.
pub fn elementary_generators(ring: &Ring, n: usize) -> Result<Vec<(usize, usize, Elem)>> {
    let lambdas = nonzero_elements(ring)?;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.extend(lambdas.iter().map(|l| (i, j, l.clone())));
            }
        }
    }
    Ok(out)
}

/// `(i, j, lambda)`, zero-based in `0..2n`, for every `E°_{ij}(lambda)` with
/// `lambda != 0`, skipping the pairs `j = partner(i)` that give the identity.
pub fn orthogonal_generators(ring: &Ring, n: usize) -> Result<Vec<(usize, usize, Elem)>> {
    let lambdas = nonzero_elements(ring)?;
    let mut out = Vec::new();
    for i in 0..2 * n {
        for j in 0..2 * n {
            if i != j && j + 1 != partner(i + 1, n) {
                out.extend(lambdas.iter().map(|l| (i, j, l.clone())));
            }
        }
    }
    Ok(out)
}

/// Every Epin generator `1 + lambda x_1 x_i` with `lambda != 0`.
pub fn epin_generators(ring: &Ring, n: usize) -> Result<Vec<EpinGenerator>> {
    let lambdas = nonzero_elements(ring)?;
    let mut out = Vec::new();
    for first in UnitKind::BOTH {
        for kind in UnitKind::BOTH {
            for i in 2..=n {
                for l in &lambdas {
                    out.push(EpinGenerator::new(ring, first, kind, i, l.clone(), n)?);
                }
            }
        }
    }
    Ok(out)
}

/// `v E_{ij}(lambda)`: `v_j += lambda v_i`.
pub fn apply_elementary(ring: &Ring, (i, j, l): &(usize, usize, Elem), v: &[Elem]) -> Vec<Elem> {
    let mut out = v.to_vec();
    out[*j] = ring.add(&v[*j], &ring.mul(l, &v[*i]));
    out
}

/// `x E°_{ij}(lambda)` on a row of length `2n`:
/// `x_j += lambda x_i`, `x_{partner(i)} -= lambda x_{partner(j)}`.
pub fn apply_orthogonal(ring: &Ring, (i, j, l): &(usize, usize, Elem), x: &[Elem]) -> Vec<Elem> {
    let n = x.len() / 2;
    let (pi, pj) = (partner(i + 1, n) - 1, partner(j + 1, n) - 1);
    let mut out = x.to_vec();
    out[*j] = ring.add(&out[*j], &ring.mul(l, &x[*i]));
    out[pi] = ring.sub(&out[pi], &ring.mul(l, &x[pj]));
    out
}

pub fn um_partition(
    ring: &Ring,
    n: usize,
    budget: u128,
) -> Result<(Vec<Vec<Elem>>, OrbitPartition)> {
    let um = enumerate_um(ring, n, budget)?;
    let gens = elementary_generators(ring, n)?;
    let part = orbit_partition(
        &um,
        &gens,
        |v| row_key(ring, v),
        |g, v| Ok(apply_elementary(ring, g, v)),
        &format!("E_{n}: all E_ij(lambda), lambda != 0"),
    )?;
    Ok((um, part))
}

/// Which generators act on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereAction {
    Orthogonal,
    Epin,
}

pub fn sphere_partition(
    ring: &Ring,
    n: usize,
    budget: u128,
    action: SphereAction,
) -> Result<(Vec<SpherePoint>, OrbitPartition)> {
    let sphere = enumerate_sphere(ring, n, budget)?;
    let part = match action {
        SphereAction::Orthogonal => {
            let gens = orthogonal_generators(ring, n)?;
            orbit_partition(
                &sphere,
                &gens,
                point_key,
                |g, p| SpherePoint::from_row(ring, &apply_orthogonal(ring, g, &p.as_row())),
                &format!("EO_{}: all E°_ij(lambda), lambda != 0", 2 * n),
            )?
        }
        SphereAction::Epin => {
            let gens = epin_generators(ring, n)?;
            orbit_partition(
                &sphere,
                &gens,
                point_key,
                act_closed_form,
                &format!("Epin_{}: all 1 + lambda x_1 x_i, lambda != 0", 2 * n),
            )?
        }
    };
    Ok((sphere, part))
}

#[derive(Clone, Debug, Serialize)]
pub struct BijectionReport {
    pub ring: String,
    pub n: usize,
    pub um_size: usize,
    pub sphere_size: usize,
    pub um_orbit_count: usize,
    pub sphere_orbit_count: usize,
    /// `witness_map[c]` is the sphere class reached by lifting class `c`.
    pub witness_map: Vec<usize>,
    pub well_defined: bool,
    pub injective: bool,
    pub surjective: bool,
    /// Pairs `(v, w1), (v, w2)` joined by an explicit `H(eps^{-T})` witness.
    pub lift_witnesses_checked: usize,
    pub ok: bool,
}

/// Builds both partitions and the map `[v] -> [(v, w)]`. A lift landing in
/// two different sphere classes, or a same-`v` witness that fails, is a
/// fatal inconsistency.
pub fn bijection_check(
    ring: &Ring,
    n: usize,
    budget: u128,
    action: SphereAction,
) -> Result<BijectionReport> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "bijection check needs n >= 3, got {n}"
        )));
    }
    let (um, um_part) = um_partition(ring, n, budget)?;
    let (sphere, sphere_part) = sphere_partition(ring, n, budget, action)?;
    let um_class = um_part.class_of();
    let sphere_class = sphere_part.class_of();
    let um_index: HashMap<Vec<u8>, usize> = um_part
        .universe
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();

    let mut map: Vec<Option<usize>> = vec![None; um_part.class_count()];
    let mut first_lift: HashMap<usize, usize> = HashMap::new();
    let mut lift_checks = 0;
    for (s, p) in sphere.iter().enumerate() {
        let u = *um_index.get(&row_key(ring, p.v())).ok_or_else(|| {
            Error::Inconsistency(format!(
                "sphere point {} has a non-unimodular v",
                p.describe()
            ))
        })?;
        let c = um_class[u];
        match map[c] {
            None => map[c] = Some(sphere_class[s]),
            Some(t) if t != sphere_class[s] => {
                return Err(Error::Inconsistency(format!(
                    "lifts of one E_n-orbit land in sphere classes {t} and {}",
                    sphere_class[s]
                )))
            }
            Some(_) => {}
        }
        match first_lift.get(&u) {
            None => {
                first_lift.insert(u, s);
            }
            Some(&s0) => {
                let q = &sphere[s0];
                let witness = transitive_witness(p.v(), q.w(), p.w(), ring)?;
                if witness.orthogonal.act(q)? != *p || sphere_class[s0] != sphere_class[s] {
                    return Err(Error::Inconsistency(format!(
                        "same-v witness fails between {} and {}",
                        q.describe(),
                        p.describe()
                    )));
                }
                lift_checks += 1;
            }
        }
    }
    let well_defined = map.iter().all(Option::is_some);
    let witness_map: Vec<usize> = map.into_iter().map(|m| m.unwrap_or(usize::MAX)).collect();
    let mut hit = vec![false; sphere_part.class_count()];
    let mut injective = true;
    for &t in &witness_map {
        if t == usize::MAX {
            continue;
        }
        if hit[t] {
            injective = false;
        }
        hit[t] = true;
    }
    let surjective = hit.iter().all(|&h| h);
    Ok(BijectionReport {
        ring: ring.to_string(),
        n,
        um_size: um.len(),
        sphere_size: sphere.len(),
        um_orbit_count: um_part.class_count(),
        sphere_orbit_count: sphere_part.class_count(),
        witness_map,
        well_defined,
        injective,
        surjective,
        lift_witnesses_checked: lift_checks,
        ok: well_defined && injective && surjective,
    })
}
