//! Command-line front end: parses arguments, runs one library operation and
//! renders the result as a pretty-printed JSON document.
//!
//! Factor indices on the command line and in every output document are
//! 1-based. Exact rationals are rendered as `"p/q"` strings (or `"p"` when
//! integral), floating values as JSON numbers.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use cicy::cones::{
    coxeter_pair_eigen_exact, fundamental_extremal_rays, in_fundamental_cone, limit_root_iterate,
    omega_pairing_closed_form,
};
use cicy::lorentz::{block_partition, gram_from_ambient};
use cicy::scalar::parse_rational_list;
use cicy::series::{
    bn16_bundle_volume, bn16_bundle_volume_exact, series_partial_sum, v_closed_form,
};
use cicy::volume::{
    vol, vol_asymptotic_exponent, vol_asymptotic_via_restriction, ExponentClass, SampleGrid,
};
use cicy::weyl::{involution_matrix, pairing_full, reduce_to_nef};
use cicy::{parse_rational, AmbientSpace, DivisorClass, Error, QuadraticNumber, Scalar, Q};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Map, Value};

/// Exit status and the text destined for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(
    name = "cicy",
    version,
    about = "Reflection groups, cones and volumes of Calabi-Yau complete intersections in products of projective spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SpaceArgs {
    /// JSON file {"factors": [...], "degrees": [[...], ...], "strict_cy": bool}.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index set J, b coefficients, Gram matrix, signature and volume polynomial.
    Check {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Matrix of the involution attached to factor J.
    Involution {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_name = "J")]
        index: usize,
    },
    /// Move a class into the nef cone and report the word used.
    Reduce {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
        class: String,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Volume of a class, exact.
    Vol {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
        class: String,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Log-log slope of vol(p + sA) as s -> 0. With --pair I J, p is the
    /// expanding eigenvector of that pair plus --class.
    VolAsymp {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
        class: Option<String>,
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        pair: Option<Vec<usize>>,
        /// Ample direction A; defaults to h_1 + ... + h_l.
        #[arg(long, value_name = "CSV")]
        ample: Option<String>,
        #[arg(long, num_args = 2, value_names = ["MLO", "MHI"], default_values_t = [8u32, 20])]
        grid: Vec<u32>,
        /// Number of smallest-s samples in the fit.
        #[arg(long, default_value_t = 8)]
        fit_last: usize,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Work on the sub-ambient of the minimal factors.
        #[arg(long)]
        restrict: bool,
    },
    /// Expanding eigenvalue and eigenvector of the composition of a pair.
    Eigen {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, num_args = 2, value_names = ["I", "J"], required = true)]
        pair: Vec<usize>,
        /// Report values exactly in the quadratic field.
        #[arg(long)]
        exact: bool,
    },
    /// Normalized iterates of a pair composition applied to a base class.
    LimitRoot {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, num_args = 2, value_names = ["I", "J"], required = true)]
        pair: Vec<usize>,
        /// Base class; defaults to h_1 + ... + h_l.
        #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
        class: Option<String>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Extremal rays of the fundamental cone and their pairings.
    Rays {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Partial sum and closed form of the slice-volume series.
    Series {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value_t = 1_000_000)]
        terms: u64,
    },
    /// Volume of the tautological class on a split projective bundle.
    PeVol {
        #[command(flatten)]
        space: SpaceArgs,
        /// One divisor A_i per occurrence, in order A_0, A_1, ...
        #[arg(long, value_name = "CSV", allow_hyphen_values = true, required = true)]
        class: Vec<String>,
        /// Evaluation budget for the numerical integrator.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Integrate the polynomial exactly (all A_i must be nef).
        #[arg(long)]
        exact: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Involution { .. } => "involution",
            Command::Reduce { .. } => "reduce",
            Command::Vol { .. } => "vol",
            Command::VolAsymp { .. } => "vol-asymp",
            Command::Eigen { .. } => "eigen",
            Command::LimitRoot { .. } => "limit-root",
            Command::Rays { .. } => "rays",
            Command::Series { .. } => "series",
            Command::PeVol { .. } => "pe-vol",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceInput {
    factors: Vec<u32>,
    degrees: Vec<Vec<u32>>,
    #[serde(default = "default_strict")]
    strict_cy: bool,
}

fn default_strict() -> bool {
    true
}

/// A domain failure rendered as `{"error": {code, message, context}}`.
#[derive(Debug)]
struct Failure {
    code: String,
    message: String,
    context: Map<String, Value>,
}

impl Failure {
    fn new(code: &str, message: impl Into<String>) -> Self {
        Failure {
            code: code.to_string(),
            message: message.into(),
            context: Map::new(),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.context.insert(key.to_string(), value);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = e.code();
        // Library indices are 0-based; report them 1-based.
        match e {
            Error::IndexOutOfRange { index, len } => Failure::new(
                code,
                format!("index {} out of range for {len} factors", index + 1),
            )
            .with("index", json!(index + 1))
            .with("factors", json!(len)),
            Error::NotInJ(j) => {
                Failure::new(code, format!("index {} is not a minimal factor (not in J)", j + 1))
                    .with("index", json!(j + 1))
            }
            Error::UnreducedWord(j) => {
                Failure::new(code, format!("word is not reduced: letter {} repeats", j + 1))
                    .with("letter", json!(j + 1))
            }
            Error::NonJNegative(j) => Failure::new(
                code,
                format!(
                    "coordinate {} is negative and not in J; class cannot be moved into the nef cone",
                    j + 1
                ),
            )
            .with("coordinate", json!(j + 1)),
            Error::EllipticPair { i, j, b } => Failure::new(
                code,
                format!("pair ({}, {}) has b = {b} <= 2; no eigenvalue > 1 exists", i + 1, j + 1),
            )
            .with("pair", json!([i + 1, j + 1]))
            .with("b", json!(b)),
            Error::NegativeCoefficient(j) => {
                Failure::new(code, format!("coefficient {} is negative", j + 1))
                    .with("coefficient", json!(j + 1))
            }
            Error::NonTransverse(j) => Failure::new(
                code,
                format!("generator {} does not meet the plane transversally", j + 1),
            )
            .with("generator", json!(j + 1)),
            Error::DimensionMismatch { expected, got } => Failure::new(code, e.to_string())
                .with("expected", json!(expected))
                .with("got", json!(got)),
            Error::IterationLimit(n) => {
                Failure::new(code, e.to_string()).with("max_iter", json!(n))
            }
            Error::PoleAtN(n) => Failure::new(code, e.to_string()).with("n", json!(n)),
            Error::ZeroVolumeSample(s) => Failure::new(code, e.to_string()).with("s", json!(s)),
            other => Failure::new(code, other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let name = cli.command.name();
    match execute(cli.command) {
        Ok(doc) => Outcome {
            code: 0,
            stdout: render(&doc),
            stderr: String::new(),
        },
        Err(f) => {
            let mut context = Map::new();
            context.insert("subcommand".into(), json!(name));
            context.extend(f.context);
            let doc = json!({
                "error": {
                    "code": f.code,
                    "message": f.message,
                    "context": Value::Object(context),
                }
            });
            Outcome {
                code: 2,
                stdout: render(&doc),
                stderr: String::new(),
            }
        }
    }
}

fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn load_space(path: &Path) -> CliResult<AmbientSpace> {
    let ctx = |f: Failure| f.with("input", json!(path.display().to_string()));
    let text = std::fs::read_to_string(path)
        .map_err(|e| ctx(Failure::new("io_error", format!("cannot read input: {e}"))))?;
    let input: SpaceInput = serde_json::from_str(&text).map_err(|e| {
        ctx(Failure::new(
            "invalid_input",
            format!("malformed input document: {e}"),
        ))
    })?;
    AmbientSpace::new(input.factors, input.degrees, input.strict_cy)
        .map_err(|e| ctx(Failure::from(e)))
}

fn parse_class(text: &str, flag: &str) -> CliResult<DivisorClass<Q>> {
    parse_rational_list(text)
        .map(DivisorClass::new)
        .map_err(|e| {
            Failure::from(e)
                .with("flag", json!(flag))
                .with("value", json!(text))
        })
}

fn parse_scalar(text: &str, flag: &str) -> CliResult<Q> {
    parse_rational(text).map_err(|e| {
        Failure::from(e)
            .with("flag", json!(flag))
            .with("value", json!(text))
    })
}

/// Converts a 1-based command-line index.
fn zero_based(index: usize, flag: &str) -> CliResult<usize> {
    index.checked_sub(1).ok_or_else(|| {
        Failure::new(
            "index_out_of_range",
            "indices are 1-based; 0 is not a factor",
        )
        .with("flag", json!(flag))
        .with("index", json!(0))
    })
}

fn pair_indices(pair: &[usize]) -> CliResult<(usize, usize)> {
    Ok((
        zero_based(pair[0], "--pair")?,
        zero_based(pair[1], "--pair")?,
    ))
}

fn strings<T: Display>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|x| json!(x.to_string())).collect())
}

fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json!(x)).collect())
}

fn one_based(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|x| json!(x + 1)).collect())
}

fn exponent_class(c: &ExponentClass) -> Value {
    match *c {
        ExponentClass::HalfMultiple { k, n } => {
            json!({"kind": "half_multiple", "k": k, "n": n, "value": c.value()})
        }
        ExponentClass::Multiple { k, n } => {
            json!({"kind": "multiple", "k": k, "n": n, "value": c.value()})
        }
        ExponentClass::Unmatched => json!({"kind": "unmatched"}),
    }
}

fn execute(command: Command) -> CliResult<Value> {
    match command {
        Command::Check { space } => check(&load_space(&space.input)?),
        Command::Involution { space, index } => {
            let s = load_space(&space.input)?;
            let m = involution_matrix(&s, zero_based(index, "--index")?)?;
            let rows: Vec<Value> = m.to_rows().iter().map(|r| strings(r)).collect();
            Ok(json!({"index": index, "matrix": rows}))
        }
        Command::Reduce {
            space,
            class,
            max_iter,
        } => {
            let s = load_space(&space.input)?;
            let v = parse_class(&class, "--class")?;
            let (word, nef) = reduce_to_nef(&s, &v, max_iter)?;
            Ok(json!({
                "class": strings(v.coords()),
                "word": word.to_string(),
                "letters": one_based(word.letters()),
                "length": word.len(),
                "nef_class": strings(nef.coords()),
            }))
        }
        Command::Vol {
            space,
            class,
            max_iter,
        } => {
            let s = load_space(&space.input)?;
            let v = parse_class(&class, "--class")?;
            let value = vol(&s, &v, max_iter)?;
            Ok(json!({"class": strings(v.coords()), "volume": value.to_string()}))
        }
        Command::VolAsymp {
            space,
            class,
            pair,
            ample,
            grid,
            fit_last,
            max_iter,
            restrict,
        } => {
            let s = load_space(&space.input)?;
            let l = s.num_factors();
            let base = match &class {
                Some(c) => parse_class(c, "--class")?,
                None => DivisorClass::zero(l),
            };
            let mut p = DivisorClass::<QuadraticNumber>::from_rationals(base.coords());
            if let Some(pair) = &pair {
                let (i, j) = pair_indices(pair)?;
                let e = coxeter_pair_eigen_exact(&s, i, j)?;
                if p.len() != l {
                    return Err(Error::DimensionMismatch {
                        expected: l,
                        got: p.len(),
                    }
                    .into());
                }
                p = p.add(&e.vector);
            }
            let a = match &ample {
                Some(c) => parse_class(c, "--ample")?,
                None => DivisorClass::ones(l),
            };
            let grid = SampleGrid {
                m_lo: grid[0],
                m_hi: grid[1],
                fit_last,
                max_iter,
            };
            let report = if restrict {
                vol_asymptotic_via_restriction(&s, &p, &a, grid)?
            } else {
                vol_asymptotic_exponent(&s, &p, &a, grid)?
            };
            let samples: Vec<Value> = report
                .samples
                .iter()
                .map(|&(s, v)| json!({"s": s, "volume": v}))
                .collect();
            Ok(json!({
                "point": strings(p.coords()),
                "ample": strings(a.coords()),
                "slope": report.slope,
                "residual": report.residual,
                "fitted": report.fitted,
                "predicted_class": exponent_class(&report.predicted_class),
                "samples": samples,
            }))
        }
        Command::Eigen { space, pair, exact } => {
            let s = load_space(&space.input)?;
            let (i, j) = pair_indices(&pair)?;
            let e = coxeter_pair_eigen_exact(&s, i, j)?;
            let approx = e.to_f64();
            let mut doc = Map::new();
            doc.insert("pair".into(), json!([i + 1, j + 1]));
            doc.insert("lambda".into(), json!(approx.lambda));
            doc.insert("vector".into(), floats(approx.vector.coords()));
            if exact {
                doc.insert("lambda_exact".into(), json!(e.lambda.to_string()));
                doc.insert("vector_exact".into(), strings(e.vector.coords()));
            }
            if s.is_full_j() {
                let gram = gram_from_ambient(&s)?;
                let iso = pairing_full(&s, &gram, &approx.vector, &approx.vector)?;
                doc.insert("self_pairing".into(), json!(iso));
            }
            Ok(Value::Object(doc))
        }
        Command::LimitRoot {
            space,
            pair,
            class,
            steps,
        } => {
            let s = load_space(&space.input)?;
            let l = s.num_factors();
            let (i, j) = pair_indices(&pair)?;
            let base = match &class {
                Some(c) => parse_class(c, "--class")?.to_f64(),
                None => DivisorClass::new(vec![1.0; l]),
            };
            let iterates = limit_root_iterate(&s, i, j, &base, steps)?;
            let gram = if s.is_full_j() {
                Some(gram_from_ambient(&s)?)
            } else {
                None
            };
            let self_pairings: Option<Vec<f64>> = match &gram {
                Some(g) => Some(
                    iterates
                        .iter()
                        .map(|v| pairing_full(&s, g, v, v))
                        .collect::<cicy::Result<_>>()?,
                ),
                None => None,
            };
            let eigen = coxeter_pair_eigen_exact(&s, i, j)?.to_f64();
            let sum: f64 = eigen.vector.coords().iter().sum();
            let target: Vec<f64> = eigen.vector.coords().iter().map(|x| x / sum).collect();
            let last = iterates
                .last()
                .map(|v| v.coords().to_vec())
                .unwrap_or_default();
            let distance = last
                .iter()
                .zip(&target)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(json!({
                "pair": [i + 1, j + 1],
                "steps": steps,
                "last_iterate": floats(&last),
                "eigenvector_normalized": floats(&target),
                "distance": if last.is_empty() { Value::Null } else { json!(distance) },
                "self_pairings": self_pairings.map(|v| floats(&v)),
            }))
        }
        Command::Rays { space } => {
            let s = load_space(&space.input)?;
            let gram = gram_from_ambient(&s)?;
            let rays = fundamental_extremal_rays(&s, &gram)?;
            let mut listed = Vec::with_capacity(rays.len());
            for r in &rays {
                listed.push(json!({
                    "i": r.i + 1,
                    "j": r.j + 1,
                    "class": strings(r.class.coords()),
                    "in_fundamental_cone": in_fundamental_cone(&s, &gram, &r.class)?,
                }));
            }
            let mut pairings = Vec::with_capacity(rays.len());
            for r in &rays {
                let row: Vec<Q> = rays
                    .iter()
                    .map(|t| omega_pairing_closed_form(&s, (r.i, r.j), (t.i, t.j)))
                    .collect::<cicy::Result<_>>()?;
                pairings.push(strings(&row));
            }
            Ok(json!({"rays": listed, "pairings": pairings}))
        }
        Command::Series { a, b, k, terms } => {
            let (a, b, k) = (
                parse_scalar(&a, "--a")?,
                parse_scalar(&b, "--b")?,
                parse_scalar(&k, "--k")?,
            );
            let partial = series_partial_sum(terms, &a, &b, &k)?;
            let mut doc = Map::new();
            doc.insert("a".into(), json!(a.to_string()));
            doc.insert("b".into(), json!(b.to_string()));
            doc.insert("k".into(), json!(k.to_string()));
            doc.insert("terms".into(), json!(terms));
            doc.insert("partial_sum".into(), json!(partial.partial_sum));
            doc.insert("tail_bound".into(), json!(partial.tail_bound));
            match v_closed_form(&a, &b, &k) {
                Ok(c) => {
                    doc.insert("closed_form".into(), json!(c.closed_form));
                    doc.insert("alpha".into(), json!(c.alpha));
                    doc.insert("beta".into(), json!(c.beta));
                    doc.insert(
                        "digamma_arguments".into(),
                        floats(&c.digamma_arguments.unwrap_or_default()),
                    );
                    doc.insert("digamma_coefficient".into(), json!(c.digamma_coefficient));
                    doc.insert("constant_term".into(), json!(c.constant_term));
                    if let (Some(p), Some(v)) = (partial.partial_sum, c.closed_form) {
                        doc.insert("difference".into(), json!((p - v).abs()));
                    }
                }
                Err(e) => {
                    let f = Failure::from(e);
                    doc.insert("closed_form".into(), Value::Null);
                    doc.insert(
                        "closed_form_error".into(),
                        json!({"code": f.code, "message": f.message}),
                    );
                }
            }
            Ok(Value::Object(doc))
        }
        Command::PeVol {
            space,
            class,
            budget,
            exact,
        } => {
            let s = load_space(&space.input)?;
            let divisors: Vec<DivisorClass<Q>> = class
                .iter()
                .map(|c| parse_class(c, "--class"))
                .collect::<CliResult<_>>()?;
            let listed: Vec<Value> = divisors.iter().map(|d| strings(d.coords())).collect();
            if exact {
                let value = bn16_bundle_volume_exact(&s, &divisors)?;
                return Ok(json!({
                    "divisors": listed,
                    "volume": value.to_string(),
                    "volume_approx": Scalar::to_f64(&value),
                }));
            }
            let est = bn16_bundle_volume(&s, &divisors, budget)?;
            Ok(json!({
                "divisors": listed,
                "volume": est.value,
                "error_estimate": est.error_estimate,
                "evaluations": est.evaluations,
            }))
        }
    }
}

fn check(s: &AmbientSpace) -> CliResult<Value> {
    let j = s.j_set();
    let mut doc = Map::new();
    doc.insert("factors".into(), json!(s.factors()));
    doc.insert("degrees".into(), json!(s.degrees()));
    doc.insert("strict_cy".into(), json!(s.strict_cy()));
    doc.insert("dimension".into(), json!(s.dim()));
    doc.insert("J".into(), one_based(&j));
    if s.below_minimal() {
        doc.insert(
            "notice".into(),
            json!("fewer defining divisors than the smallest factor dimension; J is the set of factors of minimal dimension"),
        );
    }
    let b = if s.num_divisors() == 0 {
        Value::Null
    } else {
        let rows: Vec<Value> = j
            .iter()
            .map(|&a| {
                j.iter()
                    .map(|&c| {
                        if a == c {
                            Ok(Value::Null)
                        } else {
                            s.b_coefficient(a, c).map(|x| json!(x))
                        }
                    })
                    .collect::<cicy::Result<Vec<_>>>()
                    .map(Value::Array)
            })
            .collect::<cicy::Result<_>>()?;
        Value::Array(rows)
    };
    doc.insert("b".into(), b);
    let gram = gram_from_ambient(s)?;
    let rows: Vec<Value> = gram
        .entries()
        .to_rows()
        .iter()
        .map(|r| strings(r))
        .collect();
    doc.insert("gram".into(), Value::Array(rows));
    doc.insert("signature".into(), json!(gram.signature().as_triple()));
    doc.insert("lorentzian".into(), json!(gram.is_lorentzian()));
    doc.insert(
        "block_partition".into(),
        match block_partition(s) {
            Some(parts) => Value::Array(parts.iter().map(|p| one_based(p)).collect()),
            None => Value::Null,
        },
    );
    let poly = s.volume_polynomial();
    let terms: Vec<Value> = poly
        .terms()
        .map(|(e, c)| json!({"exponents": e, "coefficient": c.to_string()}))
        .collect();
    doc.insert(
        "volume_polynomial".into(),
        json!({"text": poly.to_string(), "terms": terms}),
    );
    Ok(Value::Object(doc))
}
