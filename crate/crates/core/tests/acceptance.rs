//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact equality in the field; runtime limits are
//! listed with each criterion. Criteria in `KNOWN_FAILURES` are reported
//! but do not fail the run.

use std::process::Command;
use std::time::{Duration, Instant};

use cdalg::brown::{
    brown_tower, parity_certificate, prescribed_level_algebra, zero_divisor_search,
};
use cdalg::level::{
    algebra_level, algebra_sublevel, brute_level_oracle, compose_squares, field_level, isotropy,
    verify_propositions, AlphaSweep, Certificate, CheckStatus, IsotropyResult, SearchBudget,
};
use cdalg::{Algebra, AlgebraElement, DiagonalForm, Elem, Field};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The printed octonion table contradicts the doubling product it is
/// meant to illustrate; see `golden_table`.
const KNOWN_FAILURES: &[u32] = &[1];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(pass: bool, detail: String, elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed > limit {
        outcome(
            false,
            format!("{detail}; took {elapsed:.1?}, limit {limit:?}"),
        )
    } else {
        outcome(pass, detail)
    }
}

fn f7() -> Field {
    Field::prime(7).unwrap()
}

fn random_nonzero(f: &Field, rng: &mut ChaCha8Rng, height: i64) -> Elem {
    f.random_nonzero(rng, height, 0, true)
}

/// Algebras for the identity checks: `t ∈ 1..=4` over `F_7` and `Q`, with
/// random nonzero parameters.
fn identity_configs() -> Vec<Algebra> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = Vec::new();
    for f in [f7(), Field::rationals()] {
        for t in 1..=4 {
            let alphas = (0..t).map(|_| random_nonzero(&f, &mut rng, 5)).collect();
            out.push(Algebra::new(&f, alphas).unwrap());
        }
    }
    out
}

fn random_element(alg: &Algebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
    alg.random(rng, 10, 0, true)
}

// ---- 1 ----

/// Rows of the printed table for `O(a, b, g)`.
const PRINTED: [[&str; 8]; 8] = [
    ["1", "f2", "f3", "f4", "f5", "f6", "f7", "f8"],
    ["f2", "a", "f4", "-a*f3", "f6", "-a*f5", "-f8", "a*f7"],
    ["f3", "-f4", "b", "b*f2", "f7", "f8", "-b*f5", "-b*f6"],
    [
        "f4", "a*f3", "-b*f2", "-a*b", "f8", "-a*f7", "b*f6", "-a*b*f5",
    ],
    ["f5", "-f6", "-f7", "-f8", "g", "g*f2", "g*f3", "g*f4"],
    [
        "f6", "a*f5", "-f8", "a*f7", "-g*f2", "-a*g", "-g*f4", "a*g*f3",
    ],
    [
        "f7", "f8", "b*f5", "-b*f6", "-g*f3", "g*f4", "-b*g", "-b*g*f2",
    ],
    [
        "f8", "-a*f7", "b*f6", "a*b*f5", "-g*f4", "-a*g*f3", "b*g*f2", "a*b*g",
    ],
];

fn golden_table() -> Outcome {
    let start = Instant::now();
    let f = Field::parse_descriptor("ratfunc(q;a,b,g)").unwrap();
    let alg = Algebra::parse(&f, "a,b,g").unwrap();
    let table = alg.full_table();
    let mut mismatches = Vec::new();
    for (i, row) in PRINTED.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let got = alg.format_product(&table[i][j]);
            if got != *want {
                mismatches.push(format!(
                    "{}·{}: {got} vs {want}",
                    Algebra::basis_label(i + 1),
                    Algebra::basis_label(j + 1)
                ));
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "64/64 entries match".to_string()
    } else {
        format!(
            "{}/64 entries differ from the printed table (e.g. {})",
            mismatches.len(),
            mismatches[..3.min(mismatches.len())].join("; ")
        )
    };
    within(
        mismatches.is_empty(),
        detail,
        start.elapsed(),
        Duration::from_secs(1),
    )
}

// ---- 2 ----

fn quadratic_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    let configs = identity_configs();
    for alg in &configs {
        for _ in 0..1000 {
            let z = random_element(alg, &mut rng);
            let tz = alg.trace(&z);
            let nz = alg.norm(&z);
            let lhs = z
                .square()
                .sub(&z.scale(&tz))
                .unwrap()
                .add(&alg.scalar(nz))
                .unwrap();
            if !lhs.is_zero() {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!(
            "{} configurations x 1000 elements, {failures} failures",
            configs.len()
        ),
    )
}

// ---- 3 ----

fn trace_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    let configs = identity_configs();
    for alg in &configs {
        for _ in 0..1000 {
            let x = random_element(alg, &mut rng);
            let y = random_element(alg, &mut rng);
            let z = random_element(alg, &mut rng);
            let xy = x.mul(&y).unwrap();
            let yx = y.mul(&x).unwrap();
            let ok = alg.trace(&xy) == alg.trace(&yx)
                && alg.trace(&xy.mul(&z).unwrap())
                    == alg.trace(&x.mul(&y.mul(&z).unwrap()).unwrap())
                && xy.mul(&x).unwrap() == x.mul(&yx).unwrap();
            if !ok {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!(
            "t(xy)=t(yx), t((xy)z)=t(x(yz)), (xy)x=x(yx): {} configurations x 1000 triples, {failures} failures",
            configs.len()
        ),
    )
}

// ---- 4 ----

fn norm_multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    let configs: Vec<Algebra> = identity_configs()
        .into_iter()
        .filter(|a| a.t() <= 3)
        .collect();
    for alg in &configs {
        let f = alg.field();
        for _ in 0..1000 {
            let x = random_element(alg, &mut rng);
            let y = random_element(alg, &mut rng);
            if alg.norm(&x.mul(&y).unwrap()) != f.mul(&alg.norm(&x), &alg.norm(&y)) {
                failures += 1;
            }
        }
    }
    let sed = Algebra::parse(&f7(), "1,1,1,1").unwrap();
    let f = sed.field();
    let counterexample = (0..10_000u64).find(|&trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        rng.set_stream(trial);
        let x = random_element(&sed, &mut rng);
        let y = random_element(&sed, &mut rng);
        sed.norm(&x.mul(&y).unwrap()) != f.mul(&sed.norm(&x), &sed.norm(&y))
    });
    let detail = format!(
        "t<=3: {} configurations x 1000 pairs, {failures} failures; t=4 (1,1,1,1) mod 7: {}",
        configs.len(),
        match counterexample {
            Some(i) => format!("counterexample at trial {i}"),
            None => "no counterexample in 10^4 trials".into(),
        }
    );
    outcome(failures == 0 && counterexample.is_some(), detail)
}

// ---- 5 ----

fn pfister_identity() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let symbolic = Field::parse_descriptor("ratfunc(q;a1,a2,a3,a4)").unwrap();
    let contexts = [
        (symbolic, "a1,a2,a3,a4"),
        (f7(), "3,5,2,6"),
        (Field::prime(13).unwrap(), "2,5,1,7"),
    ];
    for (f, all) in &contexts {
        let params = f.parse_list(all).unwrap();
        for t in 1..=4 {
            let alg = Algebra::new(f, params[..t].to_vec()).unwrap();
            let gens: Vec<Elem> = alg.alphas().iter().map(|a| f.neg(a)).collect();
            let pf = DiagonalForm::pfister(f, &gens).unwrap();
            checked += 1;
            if DiagonalForm::norm_form(&alg).coeffs() != pf.coeffs() {
                failures.push(format!("{} t={t}", f.descriptor()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} algebras, mismatches: {failures:?}"),
    )
}

// ---- 6 ----

fn chevalley_warning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let budget = SearchBudget::default();
    let mut bad = 0;
    let mut total = 0;
    for p in [3u64, 5, 7, 11, 13] {
        let f = Field::prime(p).unwrap();
        for _ in 0..100 {
            let rank = rng.gen_range(3..=6);
            let coeffs: Vec<Elem> = (0..rank).map(|_| Elem::Fp(rng.gen_range(1..p))).collect();
            let form = DiagonalForm::new(&f, coeffs).unwrap();
            total += 1;
            let ok = match isotropy(&form, &budget) {
                IsotropyResult::Isotropic { witness } => {
                    witness.iter().any(|x| !f.is_zero(x))
                        && f.is_zero(&form.evaluate(&witness).unwrap())
                }
                _ => false,
            };
            if !ok {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("{total} forms, {bad} without a verified zero"),
    )
}

// ---- 7 ----

fn proposition_sweep() -> Outcome {
    let start = Instant::now();
    let report = verify_propositions(
        &[3, 7, 11],
        2,
        AlphaSweep::SquareClasses,
        &SearchBudget::default(),
    )
    .unwrap();
    let violated: Vec<String> = report
        .iter()
        .filter(|c| c.status == CheckStatus::Violated)
        .map(|c| format!("{} p={} alphas={:?}", c.proposition, c.p, c.alphas))
        .collect();
    let holds = report
        .iter()
        .filter(|c| c.status == CheckStatus::Holds)
        .count();
    within(
        violated.is_empty(),
        format!(
            "{} checks, {holds} hold, violations: {violated:?}",
            report.len()
        ),
        start.elapsed(),
        Duration::from_secs(300),
    )
}

// ---- 8 ----

fn residue_level(p: u64) -> usize {
    let squares: Vec<u64> = (0..p).map(|x| x * x % p).collect();
    if squares.contains(&(p - 1)) {
        return 1;
    }
    for &a in &squares {
        if squares.contains(&((2 * p - 1 - a) % p)) {
            return 2;
        }
    }
    unreachable!("every finite field has level at most 2")
}

fn field_levels() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for p in (3u64..100).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)) {
        count += 1;
        let s = field_level(&Field::prime(p).unwrap()).finite();
        let want = if p % 4 == 1 { 1 } else { 2 };
        if s != Some(want) || residue_level(p) != want {
            bad.push(p);
        }
    }
    let q = field_level(&Field::rationals()).is_infinite();
    outcome(
        bad.is_empty() && q,
        format!("{count} odd primes below 100, disagreements {bad:?}; Q infinite: {q}"),
    )
}

// ---- 9 ----

fn square_class_tuples(f: &Field, p: u64, t: usize) -> Vec<Vec<Elem>> {
    let ns = (2..p).find(|&a| !f.is_square(&Elem::Fp(a))).unwrap();
    let mut out = vec![Vec::new()];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Elem>| {
                [1, ns].into_iter().map(move |r| {
                    let mut v = prefix.clone();
                    v.push(Elem::Fp(r));
                    v
                })
            })
            .collect();
    }
    out
}

fn cascade_vs_oracle() -> Outcome {
    let budget = SearchBudget::default();
    let mut cases = 0;
    let mut bad = Vec::new();
    for p in [3u64, 7, 13] {
        let f = Field::prime(p).unwrap();
        for t in 0..=2 {
            for alphas in square_class_tuples(&f, p, t) {
                let alg = Algebra::new(&f, alphas).unwrap();
                let (s, sb) = brute_level_oracle(&alg).unwrap();
                cases += 1;
                let level = algebra_level(&alg, &budget);
                let sublevel = algebra_sublevel(&alg, &budget);
                if level.finite() != s.finite() || sublevel.finite() != sb.finite() {
                    bad.push(format!("{alg:?}"));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{cases} algebras, disagreements: {bad:?}"),
    )
}

// ---- 10 ----

fn brown_towers() -> Outcome {
    let budget = SearchBudget {
        height: 10,
        degree: 2,
        trials: 10_000,
        seed: 0,
    };
    let mut pass = true;
    let mut details = Vec::new();
    for (t, limit) in [(1, 60), (2, 300)] {
        let start = Instant::now();
        let tower = brown_tower(&f7(), t).unwrap();
        let alg = tower.algebra();
        let found = zero_divisor_search(&alg, &budget).found();

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut certified = 0;
        for k in 0..1000 {
            let level = 1 + k % t;
            let amb = tower.lower_over(level);
            let q: Vec<AlgebraElement> = (0..4)
                .map(|_| loop {
                    let x = amb.random(&mut rng, 10, 2, true);
                    if !x.is_zero() {
                        break x;
                    }
                })
                .collect();
            if let Ok(c) = parity_certificate(&tower, level, &q[0], &q[1], &q[2], &q[3]) {
                if c.contradiction && c.leading_checks.iter().all(|l| l.nonzero) {
                    certified += 1;
                }
            }
        }

        let norm = isotropy(&DiagonalForm::norm_form(&alg), &budget);
        let split = norm
            == IsotropyResult::Anisotropic {
                certificate: Certificate::SplitRecursion,
            };
        let elapsed = start.elapsed();
        let ok = !found && certified == 1000 && split && elapsed < Duration::from_secs(limit);
        pass &= ok;
        details.push(format!(
            "t={t}: zero divisor found: {found}, certificates {certified}/1000, norm split-anisotropic: {split}, {elapsed:.1?} (limit {limit}s)"
        ));
    }
    outcome(pass, details.join("; "))
}

// ---- 11 ----

fn prescribed_levels() -> Outcome {
    let budget = SearchBudget::default();
    let mut details = Vec::new();
    let mut pass = true;
    for (p, ts, want) in [(7u64, vec![1, 2], 2), (13, vec![1, 2], 1)] {
        for t in ts {
            let r = prescribed_level_algebra(&Field::prime(p).unwrap(), t, &budget).unwrap();
            let ok = r.level.finite() == Some(want) && r.lower == want && r.upper == want;
            pass &= ok;
            details.push(format!(
                "p={p} t={t}: level {:?} [{}, {}]",
                r.level.finite(),
                r.lower,
                r.upper
            ));
        }
    }
    outcome(pass, details.join("; "))
}

// ---- 12 ----

fn composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut failures = 0;
    let sum_sq =
        |f: &Field, xs: &[Elem]| xs.iter().fold(f.zero(), |acc, x| f.add(&acc, &f.square(x)));
    for f in [Field::rationals(), f7()] {
        for n in [1usize, 2, 4, 8] {
            for _ in 0..1000 {
                let a: Vec<Elem> = (0..n).map(|_| f.random(&mut rng, 10, 0, true)).collect();
                let b: Vec<Elem> = (0..n).map(|_| f.random(&mut rng, 10, 0, true)).collect();
                let (c1, rest) = compose_squares(&f, &a, &b).unwrap();
                let dot = a
                    .iter()
                    .zip(&b)
                    .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)));
                let lhs = f.mul(&sum_sq(&f, &a), &sum_sq(&f, &b));
                let rhs = f.add(&f.square(&c1), &sum_sq(&f, &rest));
                if c1 != dot || lhs != rhs || rest.len() != n - 1 {
                    failures += 1;
                }
            }
        }
    }
    outcome(failures == 0, format!("8000 cases, {failures} failures"))
}

// ---- 13 ----

const CLI_SUITE: &[&[&str]] = &[
    &[
        "table",
        "--field",
        "ratfunc(q;a,b,g)",
        "--alphas",
        "a,b,g",
        "--format",
        "text",
    ],
    &["table", "--field", "ratfunc(q;a,b,g)", "--alphas", "a,b,g"],
    &[
        "forms",
        "norm",
        "--field",
        "ratfunc(q;a1,a2,a3,a4)",
        "--alphas",
        "a1,a2,a3,a4",
    ],
    &[
        "pfister",
        "--field",
        "ratfunc(q;a1,a2,a3,a4)",
        "--gens",
        "-a1,-a2,-a3,-a4",
    ],
    &["forms", "trace", "--field", "fp:7", "--alphas", "3,5,2"],
    &["forms", "pure", "--field", "fp:7", "--alphas", "3,5,2"],
    &["isotropy", "--field", "fp:7", "--coeffs", "1,4"],
    &["isotropy", "--field", "fp:11", "--coeffs", "1,3,5,7"],
    &["isotropy", "--field", "q", "--coeffs", "1,1,-3"],
    &["level", "field", "--field", "fp:13"],
    &["level", "field", "--field", "fp:7"],
    &["level", "field", "--field", "q"],
    &["level", "algebra", "--field", "fp:7", "--alphas", "4"],
    &["sublevel", "algebra", "--field", "fp:3", "--alphas", "1,1"],
    &["verify", "props", "--primes", "3,7,11", "--t-max", "2"],
    &["brown", "build", "--field", "fp:7", "--t", "2"],
    &[
        "brown", "zdsearch", "--field", "fp:7", "--alphas", "1,1,1,1", "--seed", "0",
    ],
    &[
        "brown", "zdsearch", "--field", "fp:7", "--t", "1", "--degree", "2", "--trials", "10000",
        "--seed", "0",
    ],
    &[
        "brown", "parity", "--field", "fp:7", "--t", "2", "--random", "1000", "--seed", "0",
    ],
    &["brown", "prescribed", "--field", "fp:7", "--t", "2"],
    &["brown", "prescribed", "--field", "fp:13", "--t", "1"],
];

fn cli_transcript(jobs: &str) -> String {
    let mut out = String::new();
    for args in CLI_SUITE {
        let o = Command::new(env!("CARGO_BIN_EXE_cdalg"))
            .args(*args)
            .args(["--jobs", jobs])
            .env_remove("CDALG_BUDGET")
            .output()
            .expect("run cdalg");
        out.push_str(&format!(
            "$ cdalg {}\nexit {:?}\n",
            args.join(" "),
            o.status.code()
        ));
        out.push_str(&String::from_utf8_lossy(&o.stdout));
        out.push_str(&String::from_utf8_lossy(&o.stderr));
    }
    out
}

fn cli_determinism() -> Outcome {
    let a = cli_transcript("1");
    let b = cli_transcript("4");
    let errors = a.matches("exit Some(1)").count();
    outcome(
        a == b && errors == 0,
        format!(
            "{} invocations, {} bytes, identical: {}, usage/domain errors: {errors}",
            CLI_SUITE.len(),
            a.len(),
            a == b
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: &[Criterion] = &[
        (1, "golden octonion table", golden_table),
        (2, "quadratic identity", quadratic_identity),
        (3, "trace identities and flexibility", trace_identities),
        (4, "norm multiplicativity", norm_multiplicativity),
        (5, "norm form is the Pfister form", pfister_identity),
        (6, "Chevalley-Warning cross-check", chevalley_warning),
        (7, "proposition sweep", proposition_sweep),
        (8, "field levels", field_levels),
        (9, "cascade agrees with oracle", cascade_vs_oracle),
        (10, "Brown towers over F_7", brown_towers),
        (11, "prescribed level", prescribed_levels),
        (12, "sums-of-squares composition", composition),
        (13, "CLI determinism", cli_determinism),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let r = run();
        let known = KNOWN_FAILURES.contains(id);
        let tag = match (r.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !r.pass && !known {
            unexpected += 1;
        }
        println!(
            "{tag} [{id:>2}] {name}: {} ({:.2?}, tolerance: exact)",
            r.detail,
            start.elapsed()
        );
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
