//! Randomised verification suites and the report they produce.
//!
//! Every suite owns a ChaCha8 stream derived from the seed, samples all of
//! its inputs up front and then checks them in parallel. Results are
//! collected in input order, so a report depends only on the configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::phi_embed;
use crate::composition::{
    alg_conj, alg_mul, alg_norm, clifford_embed_check, clifford_rank_exponents, compose_identity,
    compose_recursive, nonassociativity_witness, octonion_sphere_compose, polarized_check,
    quaternion_from_pair, vdk_compose, z_matrix, AlgElement, Algebra, ZMatrix,
};
use crate::epin::{
    act_closed_form, act_on_point, block_conjugation_sides, elem_generator, eo_generator,
    extract_sigma, hyperbolic_embed, transitive_witness, EpinGenerator,
};
use crate::error::{Error, Result};
use crate::matrix::MatrixR;
use crate::ring::{Elem, Ring};
use crate::sampling::{random_isotropic_point, random_point, random_row, random_unit_point};
use crate::suslin::{
    basis_unit, commutator_sides, decode_suslin, j_matrix, star, suslin, suslin_bar, suslin_pair,
    SpherePoint, UnitKind, MAX_J_LEVEL,
};
use crate::vaserstein::{
    beta_matrix, fixes_base_point, is_alternating, sp4_fixer_check, spin6_act, spin6_block,
    transport_action, vaserstein_display, vaserstein_matrix, WittElementRaw,
};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

/// Random multipliers per (n, i, j, kinds) case of the commutator check.
const COMMUTATOR_LAMBDAS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Suslin,
    Epin,
    Vaserstein,
    Composition,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Suslin,
        Suite::Epin,
        Suite::Vaserstein,
        Suite::Composition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Suslin => "suslin",
            Suite::Epin => "epin",
            Suite::Vaserstein => "vaserstein",
            Suite::Composition => "composition",
        }
    }

    /// `all` expands to every suite.
    pub fn parse_selection(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .map(|suite| vec![suite])
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }

    fn stream(self) -> u64 {
        match self {
            Suite::Suslin => 1,
            Suite::Epin => 2,
            Suite::Vaserstein => 3,
            Suite::Composition => 4,
        }
    }

    pub fn rng(self, seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self.stream());
        rng
    }
}

/// Outcome of one named identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub cases: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Check {
    fn from_cases(name: &str, anchor: &str, cases: usize, failure: Option<Value>) -> Check {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            cases,
            pass: failure.is_none(),
            counterexample: failure,
        }
    }
}

/// Runs `f` over `cases` in parallel. `f` returns `Ok(None)` on success and
/// `Ok(Some(witness))` on failure; errors count as failures. The first
/// failure in input order is kept.
fn run_cases<T, F>(name: &str, anchor: &str, cases: Vec<T>, f: F) -> Check
where
    T: Sync,
    F: Fn(&T) -> Result<Option<Value>> + Sync,
{
    let outcomes: Vec<Option<Value>> = cases
        .par_iter()
        .map(|c| match f(c) {
            Ok(x) => x,
            Err(e) => Some(json!({ "error": e.to_string() })),
        })
        .collect();
    let failure = outcomes.into_iter().flatten().next();
    Check::from_cases(name, anchor, cases.len(), failure)
}

fn fail_if(ok: bool, witness: impl FnOnce() -> Value) -> Result<Option<Value>> {
    Ok(if ok { None } else { Some(witness()) })
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    pub suites: Vec<SuiteReport>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.suites.iter().flat_map(|s| &s.checks)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub selection: String,
    pub ring: Ring,
    pub seed: u64,
    pub trials: usize,
}

pub fn run_suite(suite: Suite, ring: &Ring, seed: u64, trials: usize) -> SuiteReport {
    let mut rng = suite.rng(seed);
    let checks = match suite {
        Suite::Suslin => suslin_suite(ring, trials, &mut rng),
        Suite::Epin => epin_suite(ring, trials, &mut rng),
        Suite::Vaserstein => vaserstein_suite(ring, trials, &mut rng),
        Suite::Composition => composition_suite(ring, trials, &mut rng),
    };
    SuiteReport { suite, checks }
}

/// Runs the selected suites in parallel and assembles the report.
pub fn run_verify(config: &VerifyConfig) -> RunReport {
    let suites: Vec<SuiteReport> = config
        .suites
        .par_iter()
        .map(|&s| run_suite(s, &config.ring, config.seed, config.trials))
        .collect();
    let checks = suites.iter().map(|s| s.checks.len()).sum();
    let passed = suites
        .iter()
        .flat_map(|s| &s.checks)
        .filter(|c| c.pass)
        .count();
    RunReport {
        command: "verify".into(),
        config: json!({
            "suite": config.selection,
            "ring": config.ring.to_string(),
            "seed": config.seed,
            "trials": config.trials,
        }),
        suites,
        summary: Summary {
            checks,
            passed,
            failed: checks - passed,
        },
        wall_time_ms: None,
    }
}

fn random_points(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<SpherePoint> {
    let mut out = Vec::new();
    for n in ns {
        out.extend((0..trials).map(|_| random_point(r, n, rng)));
    }
    out
}

fn point_pairs(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(SpherePoint, SpherePoint)> {
    let mut out = Vec::new();
    for n in ns {
        out.extend((0..trials).map(|_| (random_point(r, n, rng), random_point(r, n, rng))));
    }
    out
}

// ---------------------------------------------------------------- suslin

fn suslin_suite(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Vec<Check> {
    vec![
        check_suslin_product(r, 2..=6, trials, rng),
        check_bar_transpose(r, 2..=6, trials, rng),
        check_bilinear_form(r, 2..=6, trials, rng),
        check_j_orthogonal(r),
        check_star_parity(r, 1..=6, trials, rng),
        check_basis_units(r, 2..=6),
        check_commutators(r, 3..=5, rng),
        check_clifford_relation(r, 2..=4, trials, rng),
        check_decode_roundtrip(r, 2..=6, trials, rng),
    ]
}

pub fn check_suslin_product(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    run_cases(
        "suslin_product",
        "S bar S = bar S S = (v.w) I",
        random_points(r, ns, trials, rng),
        |p| {
            let (s, s_bar) = suslin_pair(p);
            let q = p.q();
            fail_if(
                (&s * &s_bar).is_scalar(&q) && (&s_bar * &s).is_scalar(&q),
                || p.to_json(),
            )
        },
    )
}

pub fn check_bar_transpose(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    run_cases(
        "bar_is_swapped_transpose",
        "bar S(v, w) = S(w, v)^T",
        random_points(r, ns, trials, rng),
        |p| {
            let bar = suslin_bar(&suslin(p));
            fail_if(
                *bar.body() == suslin(&p.swapped()).body().transpose(),
                || p.to_json(),
            )
        },
    )
}

pub fn check_bilinear_form(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    run_cases(
        "bilinear_form",
        "S_1 bar S_2 + S_2 bar S_1 = (v_1.w_2 + v_2.w_1) I",
        point_pairs(r, ns, trials, rng),
        |(p1, p2)| {
            let (s1, b1) = suslin_pair(p1);
            let (s2, b2) = suslin_pair(p2);
            let pairing = r.add(&r.dot(p1.v(), p2.w()), &r.dot(p2.v(), p1.w()));
            fail_if(
                (&(&s1 * &b2) + &(&s2 * &b1)).is_scalar(&pairing),
                || json!({ "p1": p1.to_json(), "p2": p2.to_json() }),
            )
        },
    )
}

pub fn check_j_orthogonal(r: &Ring) -> Check {
    run_cases(
        "j_orthogonal",
        "J_n J_n^T = I",
        (0..=MAX_J_LEVEL).collect(),
        |&n| {
            let j = j_matrix(r, n)?;
            fail_if(
                (&j * &j.transpose()).is_identity(),
                || json!({ "level": n }),
            )
        },
    )
}

/// `S^* = S` for odd vector length and `bar S` for even length.
pub fn check_star_parity(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    run_cases(
        "star_parity",
        "S^* = S for odd length, bar S for even length",
        random_points(r, ns, trials, rng),
        |p| {
            let (s, s_bar) = suslin_pair(p);
            let expected = if p.n() % 2 == 1 { s.clone() } else { s_bar };
            fail_if(star(&s, p.n() - 1)? == expected, || p.to_json())
        },
    )
}

/// For every `n` and both kinds: `X_1^2 = X_1`, `X_1 + bar X_1 = I`; for
/// `i > 1`: `bar X_i = -X_i`, `X_i^2 = 0`, and `X_i X_1 = bar X_1 X_i` for
/// all four kind pairs.
pub fn check_basis_units(r: &Ring, ns: impl IntoIterator<Item = usize>) -> Check {
    let mut cases = Vec::new();
    for n in ns {
        for k1 in UnitKind::BOTH {
            for i in 2..=n {
                for ki in UnitKind::BOTH {
                    cases.push((n, k1, i, ki));
                }
            }
        }
    }
    run_cases(
        "basis_unit_properties",
        "X_1^2 = X_1, X_1 + bar X_1 = 1, bar X_i = -X_i, X_i^2 = 0, X_i X_1 = bar X_1 X_i",
        cases,
        |&(n, k1, i, ki)| {
            let x1 = basis_unit(r, k1, 1, n)?;
            let xi = basis_unit(r, ki, i, n)?;
            let id = MatrixR::identity(r, x1.body().dim());
            let ok = (x1.body() * x1.body()) == *x1.body()
                && (x1.body() + &x1.bar()) == id
                && xi.bar() == -xi.body()
                && (xi.body() * xi.body()).is_zero()
                && (xi.body() * x1.body()) == (&x1.bar() * xi.body());
            fail_if(
                ok,
                || json!({ "n": n, "x1": k1.label(), "i": i, "xi": ki.label() }),
            )
        },
    )
}

/// `1 + lambda X_i X_j = [1 + lambda X_i X_1, 1 + X_1 X_j]` for all
/// `i != j` in `2..=n` and every kind assignment of `X_1, X_i, X_j`.
pub fn check_commutators(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    rng: &mut ChaCha8Rng,
) -> Check {
    let mut cases = Vec::new();
    for n in ns {
        for i in 2..=n {
            for j in 2..=n {
                if i == j {
                    continue;
                }
                for k1 in UnitKind::BOTH {
                    for ki in UnitKind::BOTH {
                        for kj in UnitKind::BOTH {
                            for _ in 0..COMMUTATOR_LAMBDAS {
                                cases.push((n, i, j, [k1, ki, kj], r.random(rng)));
                            }
                        }
                    }
                }
            }
        }
    }
    run_cases(
        "commutator_relation",
        "1 + l X_i X_j = [1 + l X_i X_1, 1 + X_1 X_j]",
        cases,
        |(n, i, j, kinds, lambda)| {
            let x1 = basis_unit(r, kinds[0], 1, *n)?;
            let xi = basis_unit(r, kinds[1], *i, *n)?;
            let xj = basis_unit(r, kinds[2], *j, *n)?;
            let (lhs, rhs) = commutator_sides(&x1, &xi, &xj, lambda)?;
            fail_if(lhs == rhs, || {
                json!({
                    "n": n, "i": i, "j": j,
                    "kinds": kinds.iter().map(|k| k.label()).collect::<Vec<_>>(),
                    "lambda": r.to_json(lambda),
                })
            })
        },
    )
}

pub fn check_clifford_relation(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    run_cases(
        "clifford_relation",
        "phi(v, w)^2 = q(v, w) I",
        random_points(r, ns, trials, rng),
        |p| {
            let phi = phi_embed(p);
            fail_if((phi.body() * phi.body()).is_scalar(&p.q()), || p.to_json())
        },
    )
}

fn check_decode_roundtrip(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    run_cases(
        "decode_roundtrip",
        "(v, w) is recovered from S(v, w)",
        random_points(r, ns, trials, rng),
        |p| fail_if(decode_suslin(suslin(p).body())? == *p, || p.to_json()),
    )
}

// ------------------------------------------------------------------ epin

fn epin_suite(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Vec<Check> {
    vec![
        check_epin_actions(r, 3, trials, rng),
        check_epin_actions(r, 4, trials, rng),
        check_sigma_words(r, 3, 4, trials, rng),
        check_eo_generators(r, 3, trials, rng),
        check_transitive_witness(r, 3, trials, rng),
        check_block_conjugation(r, 2..=4, trials, rng),
    ]
}

pub fn random_generator(r: &Ring, n: usize, rng: &mut ChaCha8Rng) -> EpinGenerator {
    EpinGenerator::new(
        r,
        UnitKind::BOTH[rng.gen_range(0..2)],
        UnitKind::BOTH[rng.gen_range(0..2)],
        rng.gen_range(2..=n),
        r.random(rng),
        n,
    )
    .expect("indices drawn in range")
}

/// For random generators and unit points: conjugation equals the closed
/// row updates, `q` is preserved, and the extracted `sigma` reproduces the
/// moved point as `(v sigma, w sigma^{-T})`.
pub fn check_epin_actions(r: &Ring, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<(EpinGenerator, SpherePoint)> = (0..trials)
        .map(|_| (random_generator(r, n, rng), random_unit_point(r, n, rng)))
        .collect();
    run_cases(
        &format!("epin_action_n{n}"),
        "conjugation by 1 + l x_1 x_i equals the row update and (v sigma, w sigma^{-T})",
        cases,
        |(g, p)| {
            let conj = act_on_point(g, p)?;
            let closed = act_closed_form(g, p)?;
            let (via_sigma, sigma) = extract_sigma(std::slice::from_ref(g), p)?;
            let ok =
                conj == closed && conj.q() == p.q() && via_sigma == conj && sigma.act(p)? == conj;
            fail_if(
                ok,
                || json!({ "generator": g.to_json(), "point": p.to_json() }),
            )
        },
    )
}

pub fn check_sigma_words(
    r: &Ring,
    n: usize,
    len: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    let cases: Vec<(Vec<EpinGenerator>, SpherePoint)> = (0..trials)
        .map(|_| {
            let word = (0..len).map(|_| random_generator(r, n, rng)).collect();
            (word, random_unit_point(r, n, rng))
        })
        .collect();
    run_cases(
        "sigma_for_words",
        "a word acts as (v sigma, w sigma^{-T}) with sigma elementary",
        cases,
        |(word, p)| {
            let mut current = p.clone();
            for g in word {
                current = act_on_point(g, &current)?;
            }
            let (moved, sigma) = extract_sigma(word, p)?;
            fail_if(moved == current && sigma.act(p)? == current, || {
                json!({
                    "word": word.iter().map(EpinGenerator::to_json).collect::<Vec<_>>(),
                    "point": p.to_json(),
                })
            })
        },
    )
}

/// Orthogonal generators and hyperbolic images of elementary generators
/// preserve `q`.
pub fn check_eo_generators(r: &Ring, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<(usize, usize, Elem, SpherePoint)> = (0..trials)
        .map(|_| {
            let i = rng.gen_range(1..=2 * n);
            let mut j = rng.gen_range(1..2 * n);
            if j >= i {
                j += 1;
            }
            (i, j, r.random(rng), random_point(r, n, rng))
        })
        .collect();
    run_cases(
        "orthogonal_generators",
        "E°_ij(l) and H(E_ij(l)) preserve q",
        cases,
        |(i, j, lambda, p)| {
            let eo = eo_generator(r, *i, *j, lambda.clone(), n)?;
            let mut ok = eo.preserves_form_at(p)?;
            if *i <= n && *j <= n {
                let h = hyperbolic_embed(&elem_generator(r, *i, *j, lambda.clone(), n)?);
                ok &= h.act(p)?.q() == p.q() && h.body() == eo.body();
            }
            fail_if(
                ok,
                || json!({ "i": i, "j": j, "lambda": r.to_json(lambda), "point": p.to_json() }),
            )
        },
    )
}

/// `w_2 = w_1 + u - (v.u) w_1` keeps `v . w_2 = 1`.
pub fn random_second_lift(p: &SpherePoint, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    let r = p.ring();
    let u = random_row(r, p.n(), rng);
    let c = r.dot(p.v(), &u);
    p.w()
        .iter()
        .zip(&u)
        .map(|(w, u)| r.sub(&r.add(w, u), &r.mul(&c, w)))
        .collect()
}

/// `eps = I + v^T (w_2 - w_1)` satisfies `w_1 eps = w_2`, `v eps^{-T} = v`,
/// and its hyperbolic image moves `(v, w_1)` to `(v, w_2)`.
pub fn check_transitive_witness(r: &Ring, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<(SpherePoint, Vec<Elem>)> = (0..trials)
        .map(|_| {
            let p = random_unit_point(r, n, rng);
            let w2 = random_second_lift(&p, rng);
            (p, w2)
        })
        .collect();
    run_cases(
        "transitive_witness",
        "w_1 eps = w_2 and v eps^{-T} = v for eps = I + v^T (w_2 - w_1)",
        cases,
        |(p, w2)| {
            let wit = transitive_witness(p.v(), p.w(), w2, r)?;
            let eps = wit.epsilon.body();
            let target = SpherePoint::new(r, p.v().to_vec(), w2.clone())?;
            let ok = eps.row_times(p.w())? == *w2
                && wit.epsilon.inverse_transpose().row_times(p.v())? == p.v()
                && wit.orthogonal.act(p)? == target;
            fail_if(
                ok,
                || json!({ "point": p.to_json(), "w2": w2.iter().map(|e| r.to_json(e)).collect::<Vec<_>>() }),
            )
        },
    )
}

pub fn check_block_conjugation(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    let mut cases = Vec::new();
    for n in ns {
        for _ in 0..trials {
            cases.push((
                random_isotropic_point(r, n, rng),
                random_point(r, n, rng),
                r.random(rng),
                r.random(rng),
            ));
        }
    }
    run_cases(
        "block_conjugation",
        "[[1, X], [0, 1]] S [[1, 0], [-bar X, 1]] and its mirror in closed form",
        cases,
        |(x, t, a, b)| {
            let sides = block_conjugation_sides(x, t, a, b)?;
            fail_if(
                sides.iter().all(|(got, want)| got == want),
                || json!({ "x": x.to_json(), "t": t.to_json(), "a": r.to_json(a), "b": r.to_json(b) }),
            )
        },
    )
}

// ------------------------------------------------------------ vaserstein

fn vaserstein_suite(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Vec<Check> {
    vec![
        check_pfaffian(r, trials, rng),
        check_display(r, trials, rng),
        check_beta(r),
        check_transport(r, 4, trials, rng),
        check_sp4_fixers(r, trials, rng),
    ]
}

/// `V(v, w)` is alternating with `pf V = v.w` and `det V = pf^2`; unit
/// points give Pfaffian-one representatives.
pub fn check_pfaffian(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let mut cases = random_points(r, [3], trials, rng);
    cases.extend((0..trials).map(|_| random_unit_point(r, 3, rng)));
    run_cases(
        "pfaffian",
        "pf V(v, w) = v.w and det V = pf^2",
        cases,
        |p| {
            let v = vaserstein_matrix(p)?;
            let pf = v.pfaffian().elem;
            let mut ok =
                is_alternating(v.body()) && pf == p.q() && v.body().det() == r.mul(&pf, &pf);
            if p.is_unit() {
                ok &= WittElementRaw::new(v).is_ok();
            }
            fail_if(ok, || p.to_json())
        },
    )
}

pub fn check_display(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    run_cases(
        "vaserstein_display",
        "beta S_2 J_2 beta^T equals the explicit alternating matrix",
        random_points(r, [3], trials, rng),
        |p| {
            fail_if(
                *vaserstein_matrix(p)?.body() == vaserstein_display(p)?,
                || p.to_json(),
            )
        },
    )
}

pub fn check_beta(r: &Ring) -> Check {
    let beta = beta_matrix(r);
    let ok = (&beta * &beta.transpose()).is_identity() && beta.det() == r.from_i64(-1);
    Check::from_cases(
        "beta_orthogonal",
        "beta^T = beta^{-1}",
        1,
        (!ok).then(|| json!({ "beta": beta.to_json() })),
    )
}

/// For random Epin words `g` in `Epin_6`: `g S g^*` is the Suslin matrix of
/// the conjugated point and `V(g . S) = g' V g'^T`.
pub fn check_transport(r: &Ring, len: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<(Vec<EpinGenerator>, SpherePoint)> = (0..trials)
        .map(|_| {
            let word = (0..len).map(|_| random_generator(r, 3, rng)).collect();
            (word, random_point(r, 3, rng))
        })
        .collect();
    run_cases(
        "transport",
        "V(g . S) = g' V g'^T with g' = beta g beta^T",
        cases,
        |(word, p)| {
            let g = spin6_block(r, word)?;
            let mut current = p.clone();
            for gen in word {
                current = act_on_point(gen, &current)?;
            }
            let t = transport_action(&g, p)?;
            fail_if(t.moved == current, || {
                json!({
                    "word": word.iter().map(EpinGenerator::to_json).collect::<Vec<_>>(),
                    "point": p.to_json(),
                })
            })
        },
    )
}

/// The fixer words `[1 + l X_2 X_1, 1 + X_1 X_3]` and every random word
/// that happens to fix `S(e_1, f_1)` satisfy `g J g^T = J`.
pub fn check_sp4_fixers(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let base = SpherePoint::base(r, 3);
    let mut cases: Vec<Vec<EpinGenerator>> = Vec::new();
    for _ in 0..trials.max(1) {
        let k1 = UnitKind::BOTH[rng.gen_range(0..2)];
        let kbar = if k1 == UnitKind::E {
            UnitKind::F
        } else {
            UnitKind::E
        };
        let ki = UnitKind::BOTH[rng.gen_range(0..2)];
        let kj = UnitKind::BOTH[rng.gen_range(0..2)];
        let (i, j) = if rng.gen_bool(0.5) { (2, 3) } else { (3, 2) };
        // X_i X_1 = bar X_1 X_i turns 1 + l X_i X_1 into a generator
        let x = EpinGenerator::new(r, kbar, ki, i, r.random(rng), 3).expect("valid indices");
        let y = EpinGenerator::new(r, k1, kj, j, r.random(rng), 3).expect("valid indices");
        cases.push(vec![y.inverse(), x.inverse(), y, x]);
        let word: Vec<EpinGenerator> = (0..3).map(|_| random_generator(r, 3, rng)).collect();
        cases.push(word);
    }
    run_cases(
        "sp4_fixers",
        "g g^* = 1 implies g J g^T = J",
        cases,
        |word| {
            let g = spin6_block(r, word)?;
            if !fixes_base_point(&g) {
                return Ok(None);
            }
            let ok = sp4_fixer_check(&g) && spin6_act(&g, &base)? == base;
            fail_if(
                ok,
                || json!({ "word": word.iter().map(EpinGenerator::to_json).collect::<Vec<_>>() }),
            )
        },
    )
}

// ----------------------------------------------------------- composition

fn composition_suite(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Vec<Check> {
    vec![
        check_norm_multiplicative(r, trials, rng),
        check_zorn_identification(r, trials, rng),
        check_compose_multiplicative(r, Algebra::SplitQuaternion, 1..=3, trials, rng),
        check_compose_multiplicative(r, Algebra::SplitOctonion, 1..=2, trials, rng),
        check_compose_identity(r, trials, rng),
        check_quaternion_associative(r, trials, rng),
        check_octonion_witness(),
        check_quaternion_suslin(r, trials, rng),
        check_vdk(r, [3, 4], trials, rng),
        check_octonion_sphere(r, trials, rng),
        check_clifford_square(r, 2, trials, rng),
        check_clifford_polarized(r, 2, trials, rng),
        check_clifford_ranks(1..=6),
    ]
}

pub fn check_norm_multiplicative(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let mut cases = Vec::new();
    for alg in [Algebra::SplitQuaternion, Algebra::SplitOctonion] {
        for _ in 0..trials {
            cases.push((
                AlgElement::random(r, alg, rng),
                AlgElement::random(r, alg, rng),
            ));
        }
    }
    run_cases(
        "norm_multiplicative",
        "N(xy) = N(x) N(y), x bar x = N(x)",
        cases,
        |(a, b)| {
            let n = |x: &AlgElement| alg_norm(x).elem;
            let one = AlgElement::one(r, a.algebra());
            let ok = n(&alg_mul(a, b)?) == r.mul(&n(a), &n(b))
                && alg_mul(a, &alg_conj(a))? == one.scale(&n(a));
            fail_if(ok, || json!({ "x": a.to_json(), "y": b.to_json() }))
        },
    )
}

pub fn check_zorn_identification(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    run_cases(
        "zorn_identification",
        "N(O(v, w)) = v.w on H(R^4)",
        random_points(r, [4], trials, rng),
        |p| {
            let o = AlgElement::from_h4(p)?;
            fail_if(alg_norm(&o).elem == p.q() && o.to_h4()? == *p, || {
                p.to_json()
            })
        },
    )
}

fn random_z(r: &Ring, alg: Algebra, v: &[Elem], rng: &mut ChaCha8Rng) -> ZMatrix {
    let w = random_row(r, v.len(), rng);
    z_matrix(&AlgElement::random(r, alg, rng), v, &w).expect("rows have equal length")
}

/// `q(X ⊙ Y) = q(X) q(Y)` at every level of the recursion.
pub fn check_compose_multiplicative(
    r: &Ring,
    alg: Algebra,
    levels: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    let mut cases = Vec::new();
    for n in levels {
        for _ in 0..trials {
            let v = random_row(r, n, rng);
            cases.push((random_z(r, alg, &v, rng), random_z(r, alg, &v, rng)));
        }
    }
    run_cases(
        &format!("compose_multiplicative_{}", alg.name()),
        "q(X ⊙ Y) = q(X) q(Y) at each level",
        cases,
        |(x, y)| {
            let xy = compose_recursive(x, y)?;
            let ok = (1..=x.level()).all(|i| {
                xy.q_at(i) == Some(&r.mul(x.q_at(i).expect("level"), y.q_at(i).expect("level")))
            });
            let ok = ok && (xy.body() * xy.bar()).is_scalar(xy.q());
            fail_if(ok, || json!({ "x": x.to_json(), "y": y.to_json() }))
        },
    )
}

pub fn check_compose_identity(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<ZMatrix> = (0..trials)
        .map(|i| {
            let v = random_row(r, 1 + i % 3, rng);
            random_z(r, Algebra::SplitQuaternion, &v, rng)
        })
        .collect();
    run_cases(
        "compose_identity",
        "(a, 1; -1, 0) is a two-sided identity for ⊙",
        cases,
        |x| {
            let id = compose_identity(r, Algebra::SplitQuaternion, x.v())?;
            fail_if(
                compose_recursive(x, &id)? == *x && compose_recursive(&id, x)? == *x,
                || x.to_json(),
            )
        },
    )
}

pub fn check_quaternion_associative(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<[ZMatrix; 3]> = (0..trials)
        .map(|i| {
            let v = random_row(r, 1 + i % 2, rng);
            std::array::from_fn(|_| random_z(r, Algebra::SplitQuaternion, &v, rng))
        })
        .collect();
    run_cases(
        "quaternion_associative",
        "(X ⊙ Y) ⊙ W = X ⊙ (Y ⊙ W) over split quaternions",
        cases,
        |[x, y, w]| {
            let left = compose_recursive(&compose_recursive(x, y)?, w)?;
            let right = compose_recursive(x, &compose_recursive(y, w)?)?;
            fail_if(left == right, || {
                json!([x.to_json(), y.to_json(), w.to_json()])
            })
        },
    )
}

/// Searches `Z/3` for a triple with `(X ⊙ Y) ⊙ W != X ⊙ (Y ⊙ W)` over the
/// octonions. Passes when a witness is found; the witness is attached.
pub fn check_octonion_witness() -> Check {
    let r = Ring::zmod(3).expect("3 >= 2");
    let (failure, witness) = match nonassociativity_witness(&r) {
        Ok(Some(triple)) => {
            let check = || -> Result<bool> {
                let [p, q, s] = &triple;
                let left = octonion_sphere_compose(&octonion_sphere_compose(p, q)?, s)?;
                let right = octonion_sphere_compose(p, &octonion_sphere_compose(q, s)?)?;
                Ok(left != right)
            };
            let found = json!(triple.iter().map(SpherePoint::to_json).collect::<Vec<_>>());
            match check() {
                Ok(true) => (None, Some(found)),
                Ok(false) => (
                    Some(json!({ "error": "reported witness associates", "triple": found })),
                    None,
                ),
                Err(e) => (Some(json!({ "error": e.to_string() })), None),
            }
        }
        Ok(None) => (Some(json!({ "error": "no witness over Z/3" })), None),
        Err(e) => (Some(json!({ "error": e.to_string() })), None),
    };
    let mut check = Check::from_cases(
        "octonion_nonassociative",
        "⊙ over split octonions is not associative",
        1,
        failure,
    );
    if check.pass {
        check.counterexample = witness;
    }
    check
}

/// `Z_1([[a_2, a_3], [-b_3, b_2]], a_1, b_1) = S_2(v, w)`.
pub fn check_quaternion_suslin(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    run_cases(
        "quaternion_z_is_suslin",
        "Z_1(alpha, a_1, b_1) = S_2(v, w) for alpha = S_1((a_2, a_3), (b_2, b_3))",
        random_points(r, [3], trials, rng),
        |p| {
            let (v, w) = (p.v(), p.w());
            let alpha = quaternion_from_pair(r, [&v[1], &v[2]], [&w[1], &w[2]]);
            let z = z_matrix(&alpha, &v[..1], &w[..1])?;
            let (s, s_bar) = suslin_pair(p);
            fail_if(*z.body() == s && *z.bar() == s_bar, || p.to_json())
        },
    )
}

/// A unit point sharing `v_3..v_n` with `p`: `((c_1, c_2, a_3, ...), (d_1, d_2, 0, ...))`
/// with `c . d = 1`.
pub fn random_vdk_partner(p: &SpherePoint, rng: &mut ChaCha8Rng) -> SpherePoint {
    let r = p.ring();
    let head = random_unit_point(r, 2, rng);
    let v = head.v().iter().chain(&p.v()[2..]).cloned().collect();
    let w = head
        .w()
        .iter()
        .cloned()
        .chain((2..p.n()).map(|_| r.zero()))
        .collect();
    SpherePoint::new(r, v, w).expect("equal lengths")
}

pub fn check_vdk(
    r: &Ring,
    ns: impl IntoIterator<Item = usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Check {
    let mut cases = Vec::new();
    for n in ns {
        for _ in 0..trials {
            let p1 = random_unit_point(r, n, rng);
            let p2 = random_vdk_partner(&p1, rng);
            cases.push((p1, p2));
        }
    }
    run_cases(
        "vdk_composition",
        "v_3 = ((a_1, a_2) beta, a_3, ..., a_n) on a unit point",
        cases,
        |(p1, p2)| {
            let c = vdk_compose(p1, p2)?;
            let unit = r.is_one(&r.dot(&c.v3, &c.w3));
            fail_if(
                c.v3 == c.closed_form && unit,
                || json!({ "p1": p1.to_json(), "p2": p2.to_json() }),
            )
        },
    )
}

/// Unit points of `H(R^5)` with a shared first coordinate compose to a
/// unit point.
pub fn check_octonion_sphere(r: &Ring, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<(SpherePoint, SpherePoint)> = (0..trials)
        .map(|_| {
            let p = random_unit_point(r, 5, rng);
            let tail = random_unit_point(r, 4, rng);
            let v = std::iter::once(p.v()[0].clone())
                .chain(tail.v().iter().cloned())
                .collect();
            let w = std::iter::once(r.zero())
                .chain(tail.w().iter().cloned())
                .collect();
            (p, SpherePoint::new(r, v, w).expect("equal lengths"))
        })
        .collect();
    run_cases(
        "octonion_sphere_composition",
        "unit points of H(R^5) with equal a compose to a unit point",
        cases,
        |(p, q)| {
            fail_if(
                octonion_sphere_compose(p, q)?.is_unit(),
                || json!({ "p": p.to_json(), "q": q.to_json() }),
            )
        },
    )
}

fn random_z_pair(
    r: &Ring,
    n: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(ZMatrix, ZMatrix)> {
    let mut cases = Vec::new();
    for alg in [Algebra::SplitQuaternion, Algebra::SplitOctonion] {
        for _ in 0..trials {
            let x = random_z(r, alg, &random_row(r, n, rng), rng);
            let y = random_z(r, alg, &random_row(r, n, rng), rng);
            cases.push((x, y));
        }
    }
    cases
}

pub fn check_clifford_square(r: &Ring, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    run_cases(
        "clifford_square",
        "phi(x)^2 = q(x) I on A + H(R^n)",
        random_z_pair(r, n, trials, rng),
        |(x, _)| {
            fail_if(clifford_embed_check(x.alpha(), x.v(), x.w())?, || {
                x.to_json()
            })
        },
    )
}

pub fn check_clifford_polarized(r: &Ring, n: usize, trials: usize, rng: &mut ChaCha8Rng) -> Check {
    run_cases(
        "clifford_polarized",
        "phi(x) phi(y) + phi(y) phi(x) = <x, y> I",
        random_z_pair(r, n, trials, rng),
        |(x, y)| {
            fail_if(
                polarized_check(x, y)?,
                || json!({ "x": x.to_json(), "y": y.to_json() }),
            )
        },
    )
}

/// `rank Cl(A + H(R^n)) = 2^{2n+4}` resp. `2^{2n+8}` equals the rank of the
/// matrix algebra `phi` lands in.
pub fn check_clifford_ranks(ns: impl IntoIterator<Item = usize>) -> Check {
    let cases: Vec<(Algebra, usize)> = ns
        .into_iter()
        .flat_map(|n| [(Algebra::SplitQuaternion, n), (Algebra::SplitOctonion, n)])
        .collect();
    run_cases(
        "clifford_rank",
        "2^{2n+4} and 2^{2n+8}",
        cases,
        |&(alg, n)| {
            let (cl, target) = clifford_rank_exponents(alg, n);
            let expected = 2 * n as u32 + alg.rank() as u32;
            fail_if(
                cl == expected && target == expected,
                || json!({ "algebra": alg.name(), "n": n }),
            )
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failures(report: &RunReport) -> Vec<&Check> {
        report.checks().filter(|c| !c.pass).collect()
    }

    #[test]
    fn all_suites_pass_over_zmod6() {
        let config = VerifyConfig {
            suites: Suite::ALL.to_vec(),
            selection: "all".into(),
            ring: Ring::zmod(6).unwrap(),
            seed: 3,
            trials: 10,
        };
        let report = run_verify(&config);
        assert!(report.all_pass(), "{:#?}", failures(&report));
    }

    #[test]
    fn all_suites_pass_over_integers() {
        let config = VerifyConfig {
            suites: Suite::ALL.to_vec(),
            selection: "all".into(),
            ring: Ring::integers(),
            seed: 7,
            trials: 5,
        };
        let report = run_verify(&config);
        assert!(report.all_pass(), "{:#?}", failures(&report));
    }

    #[test]
    fn reports_are_deterministic() {
        let config = VerifyConfig {
            suites: vec![Suite::Suslin, Suite::Epin],
            selection: "suslin,epin".into(),
            ring: Ring::zmod(5).unwrap(),
            seed: 11,
            trials: 4,
        };
        let a = serde_json::to_string(&run_verify(&config)).unwrap();
        let b = serde_json::to_string(&run_verify(&config)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn suite_selection() {
        assert_eq!(Suite::parse_selection("all").unwrap().len(), 4);
        assert_eq!(Suite::parse_selection("epin").unwrap(), vec![Suite::Epin]);
        assert!(Suite::parse_selection("nope").is_err());
    }

    #[test]
    fn failing_case_is_reported() {
        let check = run_cases("demo", "x = x", vec![1, 2, 3], |&k| {
            fail_if(k != 2, || json!(k))
        });
        assert!(!check.pass);
        assert_eq!(check.counterexample, Some(json!(2)));
        let check = run_cases("demo", "x = x", vec![1], |_| {
            Err(Error::Parse("boom".into()))
        });
        assert_eq!(
            check.counterexample.unwrap()["error"],
            json!("parse error: boom")
        );
    }
}
