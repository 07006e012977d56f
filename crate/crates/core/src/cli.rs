//! The `cdalg` command line.
//!
//! Exit codes: 0 when a result was computed, 2 when the verdict is unknown
//! or a search ran out of budget, 1 on usage or domain errors.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{Algebra, AlgebraElement};
use crate::brown::{parity_certificate, prescribed_level_algebra, zero_divisor_search, BrownTower};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::forms::DiagonalForm;
use crate::level::{
    algebra_level, algebra_sublevel, field_level, isotropy, verify_propositions, AlphaSweep,
    CheckStatus, IsotropyResult, LevelValue, SearchBudget,
};

/// Environment variable holding the default search budget, in the form
/// `height=10,degree=2,trials=10000,seed=0`.
pub const BUDGET_ENV: &str = "CDALG_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "cdalg",
    version,
    about = "Exact Cayley-Dickson algebras, quadratic forms and levels"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    height: Option<i64>,
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    /// Field descriptor: `q`, `fp:7`, `ratfunc(q;a,b)`.
    #[arg(long)]
    field: String,
    /// Doubling parameters, comma separated.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    alphas: String,
}

#[derive(Args, Debug)]
struct TowerArgs {
    /// Base field descriptor.
    #[arg(long)]
    field: String,
    /// Tower height.
    #[arg(long)]
    t: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplication table of the basis.
    Table(AlgebraArgs),
    /// Trace, pure trace or norm form of an algebra.
    Forms {
        #[arg(value_enum)]
        kind: FormKind,
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// Expand the Pfister form of the given generators.
    Pfister {
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
    },
    /// Isotropy verdict for a diagonal form.
    Isotropy {
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Level of a field or of an algebra.
    Level {
        #[command(subcommand)]
        target: LevelTarget,
    },
    /// Sublevel of an algebra.
    Sublevel {
        #[command(subcommand)]
        target: SublevelTarget,
    },
    /// Check the level statements against exhaustive search.
    Verify {
        #[command(subcommand)]
        what: VerifyWhat,
    },
    /// Division algebras over rational-function towers.
    Brown {
        #[command(subcommand)]
        action: BrownAction,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormKind {
    Trace,
    Pure,
    Norm,
}

#[derive(Subcommand, Debug)]
enum LevelTarget {
    Field {
        #[arg(long)]
        field: String,
    },
    Algebra(AlgebraArgs),
}

#[derive(Subcommand, Debug)]
enum SublevelTarget {
    Algebra(AlgebraArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyWhat {
    Props {
        /// Odd primes, comma separated.
        #[arg(long, default_value = "3,7,11")]
        primes: String,
        #[arg(long, default_value_t = 2)]
        t_max: usize,
        /// Every tuple of nonzero residues instead of square-class
        /// representatives.
        #[arg(long)]
        all_alphas: bool,
    },
}

#[derive(Subcommand, Debug)]
enum BrownAction {
    /// Describe the tower.
    Build(TowerArgs),
    /// Random search for zero divisors, in a tower (`--t`) or in any
    /// algebra (`--alphas`).
    Zdsearch {
        #[arg(long)]
        field: String,
        #[arg(long, conflicts_with = "alphas")]
        t: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        alphas: Option<String>,
    },
    /// Valuation parity certificate for a quadruple at level `--level`.
    Parity {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        level: Option<usize>,
        /// Quadruple as four coefficient lists separated by `;`.
        #[arg(long, conflicts_with = "random", allow_hyphen_values = true)]
        quad: Option<String>,
        /// Number of random quadruples.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Tower together with its level bounds.
    Prescribed(TowerArgs),
}

struct Output {
    json: Value,
    text: Option<String>,
    unknown: bool,
}

impl Output {
    fn computed(json: Value) -> Output {
        Output {
            json,
            text: None,
            unknown: false,
        }
    }
}

fn budget(cli: &Cli) -> Result<SearchBudget> {
    let mut b = match std::env::var(BUDGET_ENV) {
        Ok(s) => s.parse()?,
        Err(_) => SearchBudget::default(),
    };
    if let Some(h) = cli.height {
        b.height = h;
    }
    if let Some(d) = cli.degree {
        b.degree = d;
    }
    if let Some(t) = cli.trials {
        b.trials = t;
    }
    if let Some(s) = cli.seed {
        b.seed = s;
    }
    b.validate()?;
    Ok(b)
}

fn algebra(args: &AlgebraArgs) -> Result<Algebra> {
    Algebra::parse(&Field::parse_descriptor(&args.field)?, &args.alphas)
}

fn algebra_json(alg: &Algebra) -> Value {
    json!({
        "field": alg.field().descriptor().to_string(),
        "alphas": alg.alphas().iter().map(|a| alg.field().format(a)).collect::<Vec<_>>(),
        "dim": alg.dim(),
    })
}

fn level_output(alg: &Algebra, value: &LevelValue, key: &str) -> Output {
    let mut json = value.to_json(key);
    json["algebra"] = algebra_json(alg);
    Output {
        unknown: value.finite().is_none() && !value.is_infinite(),
        json,
        text: None,
    }
}

fn parse_quad(alg: &Algebra, text: &str) -> Result<Vec<AlgebraElement>> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != 4 {
        return Err(Error::Invalid(format!(
            "--quad needs four coefficient lists separated by `;`, got {}",
            parts.len()
        )));
    }
    parts.iter().map(|p| alg.parse_element(p)).collect()
}

fn random_nonzero(alg: &Algebra, rng: &mut ChaCha8Rng, b: &SearchBudget) -> AlgebraElement {
    loop {
        let x = alg.random(rng, b.height, b.degree, true);
        if !x.is_zero() {
            return x;
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let b = budget(cli)?;
    Ok(match &cli.command {
        Command::Table(args) => {
            let alg = algebra(args)?;
            let table: Vec<Vec<String>> = alg
                .full_table()
                .iter()
                .map(|row| row.iter().map(|bp| alg.format_product(bp)).collect())
                .collect();
            Output {
                json: json!({"algebra": algebra_json(&alg), "table": table}),
                text: Some(alg.table_text()),
                unknown: false,
            }
        }
        Command::Forms { kind, alg } => {
            let alg = algebra(alg)?;
            let form = match kind {
                FormKind::Trace => DiagonalForm::trace_form(&alg),
                FormKind::Pure => DiagonalForm::pure_trace_form(&alg)?,
                FormKind::Norm => DiagonalForm::norm_form(&alg),
            };
            Output::computed(form.to_json())
        }
        Command::Pfister { field, gens } => {
            let f = Field::parse_descriptor(field)?;
            Output::computed(DiagonalForm::pfister(&f, &f.parse_list(gens)?)?.to_json())
        }
        Command::Isotropy { field, coeffs } => {
            let form = DiagonalForm::parse(&Field::parse_descriptor(field)?, coeffs)?;
            let r = isotropy(&form, &b);
            let mut json = r.to_json(&form);
            json["form"] = form.to_json();
            Output {
                unknown: matches!(r, IsotropyResult::Unknown { .. }),
                json,
                text: None,
            }
        }
        Command::Level { target } => match target {
            LevelTarget::Field { field } => {
                let f = Field::parse_descriptor(field)?;
                let k = Algebra::new(&f, vec![])?;
                level_output(&k, &field_level(&f), "level")
            }
            LevelTarget::Algebra(args) => {
                let alg = algebra(args)?;
                level_output(&alg, &algebra_level(&alg, &b), "level")
            }
        },
        Command::Sublevel {
            target: SublevelTarget::Algebra(args),
        } => {
            let alg = algebra(args)?;
            level_output(&alg, &algebra_sublevel(&alg, &b), "sublevel")
        }
        Command::Verify {
            what:
                VerifyWhat::Props {
                    primes,
                    t_max,
                    all_alphas,
                },
        } => {
            let primes: Vec<u64> = primes
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad prime `{p}`")))
                })
                .collect::<Result<_>>()?;
            let sweep = if *all_alphas {
                AlphaSweep::All
            } else {
                AlphaSweep::SquareClasses
            };
            let report = verify_propositions(&primes, *t_max, sweep, &b)?;
            let count = |s: CheckStatus| report.iter().filter(|c| c.status == s).count();
            Output::computed(json!({
                "checks": report.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                "holds": count(CheckStatus::Holds),
                "vacuous": count(CheckStatus::Vacuous),
                "violations": count(CheckStatus::Violated),
            }))
        }
        Command::Brown { action } => brown(action, &b)?,
    })
}

fn tower(args: &TowerArgs) -> Result<BrownTower> {
    BrownTower::new(&Field::parse_descriptor(&args.field)?, args.t)
}

fn brown(action: &BrownAction, b: &SearchBudget) -> Result<Output> {
    Ok(match action {
        BrownAction::Build(args) => Output::computed(tower(args)?.to_json()),
        BrownAction::Zdsearch { field, t, alphas } => {
            let f = Field::parse_descriptor(field)?;
            let alg = match (t, alphas) {
                (Some(t), _) => BrownTower::new(&f, *t)?.algebra(),
                (None, Some(a)) => Algebra::parse(&f, a)?,
                (None, None) => {
                    return Err(Error::Invalid("zdsearch needs --t or --alphas".into()))
                }
            };
            let report = zero_divisor_search(&alg, b);
            let mut json = report.to_json();
            json["algebra"] = algebra_json(&alg);
            Output {
                unknown: !report.found(),
                json,
                text: None,
            }
        }
        BrownAction::Parity {
            tower: args,
            level,
            quad,
            random,
        } => {
            let tw = tower(args)?;
            let level = level.unwrap_or(tw.t());
            if level == 0 || level > tw.t() {
                return Err(Error::Invalid(format!(
                    "level index {level} outside 1..={}",
                    tw.t()
                )));
            }
            let amb = tw.lower_over(level);
            let quads: Vec<Vec<AlgebraElement>> = match (quad, random) {
                (Some(q), _) => vec![parse_quad(&amb, q)?],
                (None, Some(n)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
                    (0..*n)
                        .map(|_| (0..4).map(|_| random_nonzero(&amb, &mut rng, b)).collect())
                        .collect()
                }
                (None, None) => {
                    return Err(Error::Invalid("parity needs --quad or --random".into()))
                }
            };
            let certs = quads
                .iter()
                .map(|q| parity_certificate(&tw, level, &q[0], &q[1], &q[2], &q[3]))
                .collect::<Result<Vec<_>>>()?;
            if quad.is_some() {
                Output::computed(certs[0].to_json())
            } else {
                Output::computed(json!({
                    "count": certs.len(),
                    "all-contradiction": certs.iter().all(|c| c.contradiction),
                    "all-leading-nonzero": certs.iter().all(|c| c.leading_checks.iter().all(|l| l.nonzero)),
                    "certificates": certs.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                }))
            }
        }
        BrownAction::Prescribed(args) => {
            let r = prescribed_level_algebra(&Field::parse_descriptor(&args.field)?, args.t, b)?;
            Output {
                unknown: r.level.finite().is_none(),
                json: r.to_json(),
                text: None,
            }
        }
    })
}

/// `key: value` lines, nested keys joined with `.`.
fn text_lines(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                text_lines(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                text_lines(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            out.push(format!("{prefix}: [{}]", parts.join(", ")));
        }
        _ => out.push(format!("{prefix}: {}", scalar_text(v))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let result = pool.install(|| execute(&cli));
    match result {
        Ok(out) => {
            let rendered = match (cli.format, &out.text) {
                (Format::Text, Some(t)) => t.clone(),
                (Format::Text, None) => {
                    let mut lines = Vec::new();
                    text_lines("", &out.json, &mut lines);
                    lines.join("\n")
                }
                (Format::Json, _) => serde_json::to_string_pretty(&out.json).unwrap(),
            };
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", rendered.trim_end());
            if out.unknown {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
