//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are visible under a plain `cargo test`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use suslin_forge::composition::Algebra;
use suslin_forge::orbit::{bijection_check, SphereAction, DEFAULT_BUDGET};
use suslin_forge::ring::Ring;
use suslin_forge::suslin::SpherePoint;
use suslin_forge::vaserstein::vaserstein_display;
use suslin_forge::verify::*;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_checks(checks: &[Check], started: Instant, limit: Option<Duration>) -> Outcome {
    let elapsed = started.elapsed();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| {
            format!(
                "{} {}",
                c.name,
                c.counterexample
                    .as_ref()
                    .map(|v| v.to_string())
                    .unwrap_or_default()
            )
        })
        .collect();
    let cases: usize = checks.iter().map(|c| c.cases).sum();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let mut detail = format!(
        "{} checks, {cases} cases, {:.2}s",
        checks.len(),
        elapsed.as_secs_f64()
    );
    if let Some(l) = limit {
        detail += &format!(" (limit {}s)", l.as_secs());
    }
    if !failed.is_empty() {
        detail += &format!("; failed: {}", failed.join("; "));
    }
    Outcome {
        pass: failed.is_empty() && in_time,
        detail,
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rings_1() -> Vec<Ring> {
    vec![
        Ring::integers(),
        Ring::zmod(6).unwrap(),
        Ring::parse("poly:zmod:5:2").unwrap(),
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (k, r) in rings_1().iter().enumerate() {
        let mut g = rng(100 + k as u64);
        checks.push(check_suslin_product(r, 2..=6, 100, &mut g));
        checks.push(check_bar_transpose(r, 2..=6, 100, &mut g));
    }
    from_checks(&checks, start, Some(Duration::from_secs(10)))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (k, r) in rings_1().iter().enumerate() {
        checks.push(check_j_orthogonal(r));
        checks.push(check_star_parity(r, 1..=6, 20, &mut rng(200 + k as u64)));
    }
    from_checks(&checks, start, None)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (k, r) in rings_1().iter().enumerate() {
        checks.push(check_basis_units(r, 2..=6));
        checks.push(check_commutators(r, 3..=5, &mut rng(300 + k as u64)));
    }
    from_checks(&checks, start, None)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let r = Ring::zmod(6).unwrap();
    let checks = [check_epin_actions(&r, 3, 500, &mut rng(400))];
    from_checks(&checks, start, None)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let r = Ring::zmod(4).unwrap();
    let checks = [check_transitive_witness(&r, 3, 100, &mut rng(500))];
    from_checks(&checks, start, None)
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (m, limit) in [(2, 5), (3, 600), (4, 600)] {
        let start = Instant::now();
        let r = Ring::zmod(m).unwrap();
        match bijection_check(&r, 3, DEFAULT_BUDGET, SphereAction::Epin) {
            Ok(rep) => {
                let elapsed = start.elapsed();
                let ok = rep.ok
                    && rep.um_orbit_count == rep.sphere_orbit_count
                    && rep.injective
                    && rep.surjective
                    && rep.lift_witnesses_checked > 0
                    && elapsed < Duration::from_secs(limit);
                pass &= ok;
                parts.push(format!(
                    "Z/{m}: {} = {} orbits, {} lift witnesses, {:.2}s",
                    rep.um_orbit_count,
                    rep.sphere_orbit_count,
                    rep.lift_witnesses_checked,
                    elapsed.as_secs_f64()
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("Z/{m}: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let r = Ring::zmod(5).unwrap();
    let mut g = rng(700);
    let mut checks = vec![
        check_pfaffian(&r, 100, &mut g),
        check_display(&r, 100, &mut g),
        check_beta(&r),
        check_transport(&r, 4, 100, &mut g),
        check_sp4_fixers(&r, 100, &mut g),
    ];
    // the worked display point over the integers
    let z = Ring::integers();
    let p = SpherePoint::from_i64(&z, &[1, 2, 3], &[4, 5, 6]).unwrap();
    let display_ok = vaserstein_display(&p).unwrap()
        == suslin_forge::matrix::MatrixR::from_i64(
            &z,
            &[
                &[0, -1, -2, -3],
                &[1, 0, -6, 5],
                &[2, 6, 0, -4],
                &[3, -5, 4, 0],
            ],
        )
        .unwrap();
    checks.push(Check {
        name: "display_literal".into(),
        anchor: "explicit V(v, w)".into(),
        cases: 1,
        pass: display_ok,
        counterexample: None,
    });
    from_checks(&checks, start, Some(Duration::from_secs(30)))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (k, r) in [Ring::integers(), Ring::zmod(7).unwrap()]
        .iter()
        .enumerate()
    {
        let mut g = rng(800 + k as u64);
        checks.push(check_norm_multiplicative(r, 500, &mut g));
        checks.push(check_compose_multiplicative(
            r,
            Algebra::SplitQuaternion,
            1..=3,
            100,
            &mut g,
        ));
        checks.push(check_compose_multiplicative(
            r,
            Algebra::SplitOctonion,
            1..=1,
            100,
            &mut g,
        ));
        checks.push(check_quaternion_associative(r, 100, &mut g));
    }
    checks.push(check_octonion_witness());
    let r5 = Ring::zmod(5).unwrap();
    checks.push(check_vdk(&r5, [3, 4], 100, &mut rng(810)));
    checks.push(check_quaternion_suslin(
        &Ring::integers(),
        100,
        &mut rng(811),
    ));
    from_checks(&checks, start, None)
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (k, r) in [Ring::integers(), Ring::zmod(6).unwrap()]
        .iter()
        .enumerate()
    {
        let mut g = rng(900 + k as u64);
        checks.push(check_clifford_square(r, 2, 200, &mut g));
        checks.push(check_clifford_polarized(r, 2, 200, &mut g));
    }
    checks.push(check_clifford_ranks(1..=8));
    from_checks(&checks, start, None)
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_suslin-forge");
    let run = |threads: &str| {
        Command::new(bin)
            .args([
                "verify", "all", "--ring", "zmod:6", "--seed", "7", "--trials", "20",
            ])
            .env("SUSLIN_FORGE_THREADS", threads)
            .output()
    };
    match (run("4"), run("4"), run("1")) {
        (Ok(a), Ok(b), Ok(c)) => {
            let same = a.stdout == b.stdout && a.stdout == c.stdout;
            let ok = same && a.status.success() && !a.stdout.is_empty();
            Outcome {
                pass: ok,
                detail: format!(
                    "{} bytes, identical across runs and thread counts: {same}, exit {:?}",
                    a.stdout.len(),
                    a.status.code()
                ),
            }
        }
        (a, b, c) => Outcome {
            pass: false,
            detail: format!(
                "could not run binary: {:?} {:?} {:?}",
                a.err(),
                b.err(),
                c.err()
            ),
        },
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Suslin identities over Z, Z/6, Z/5[x1,x2]", criterion_1),
        ("star parity law and J J^T = I", criterion_2),
        (
            "basis unit properties and commutator relations",
            criterion_3,
        ),
        ("Epin actions, closed forms and sigma over Z/6", criterion_4),
        ("same-orbit witness over Z/4", criterion_5),
        ("orbit bijection over Z/2, Z/3, Z/4", criterion_6),
        (
            "Vaserstein symbol, transport and Sp4 fixers over Z/5",
            criterion_7,
        ),
        ("composition laws", criterion_8),
        ("Clifford embeddings and rank bookkeeping", criterion_9),
        ("deterministic verify reports", criterion_10),
    ];
    let mut failures = 0;
    for (k, (title, f)) in criteria.iter().enumerate() {
        let out = f();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {title} ({})", k + 1, out.detail);
        failures += usize::from(!out.pass);
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
