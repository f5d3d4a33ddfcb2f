//! `ppwave`: batch front-end with JSON input and deterministic JSON output.
//!
//! Exit status: 0 on success, 1 on a domain error (a machine-readable
//! `{"error": ...}` document is still emitted), 2 on a usage error.

#![allow(clippy::needless_range_loop)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ppwave::algebra::{
    annihilator, generator_set, so_screen_basis, space_nabla_r, space_p, space_r, HolonomyType,
    LinearSpaceBasis,
};
use ppwave::canonical::{canonicalize, canonicalize_numeric, decide_equivalence, CanonicalDoc, CanonicalForm};
use ppwave::classify::{classify, screen_span};
use ppwave::curvature::{curvature, nabla2_r, nabla_r, ricci, weyl};
use ppwave::linalg::RatMatrix;
use ppwave::metric::{MetricDoc, PpWaveMetric};
use ppwave::scalar::{format_rational, Rational, Scalar};
use ppwave::transform::{AdaptedTransformation, TransformationDoc};
use ppwave::verify::{
    budget_from_env, suite_bianchi, suite_invariance, suite_lemma2, suite_oracle, SuiteOutcome,
    DEFAULT_SEED,
};
use ppwave::Error;

#[derive(Parser)]
#[command(name = "ppwave", version, about = "Exact curvature, classification and canonical forms for pp-wave metrics")]
struct Cli {
    /// Write the JSON output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TensorKind {
    Riemann,
    Ricci,
    Weyl,
    NablaR,
    Nabla2R,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetry order, witness tensor and screen holonomy span of a metric.
    Analyze { metric: PathBuf },
    /// Curvature-type tensors of a metric in the standard frame.
    Curvature {
        metric: PathBuf,
        #[arg(long, value_enum, default_value = "riemann")]
        tensor: TensorKind,
    },
    /// Apply an adapted coordinate transformation to a metric.
    Transform {
        metric: PathBuf,
        transformation: PathBuf,
    },
    /// Reduce a two-symmetric metric to canonical form.
    Canonicalize { metric: PathBuf },
    /// Decide isometry equivalence of two canonical forms.
    Equiv { first: PathBuf, second: PathBuf },
    /// Dimensions and bases of the algebraic curvature spaces.
    Spaces {
        #[arg(long)]
        n: usize,
        /// Screen algebra: "so" for so(n), or a path to a JSON list of
        /// antisymmetric rational generator matrices.
        #[arg(long, default_value = "so")]
        h: String,
        #[arg(long = "g-type", default_value = "II")]
        g_type: String,
        /// Omit the basis vectors from the output.
        #[arg(long)]
        dims_only: bool,
    },
    /// Run randomized verification suites.
    Verify {
        #[arg(long)]
        bianchi: bool,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        invariance: bool,
        #[arg(long)]
        lemma2: bool,
        #[arg(long)]
        all: bool,
        /// Screen dimension for the lemma2 suite.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(value) => {
            emit(&cli.output, &value);
            ExitCode::SUCCESS
        }
        Err(err) => {
            let value = json!({ "error": { "kind": error_kind(&err), "message": err.to_string() } });
            emit(&cli.output, &value);
            ExitCode::FAILURE
        }
    }
}

fn emit(output: &Option<PathBuf>, value: &Value) {
    let text = format!("{}\n", serde_json::to_string_pretty(value).expect("serializable"));
    match output {
        Some(path) => std::fs::write(path, text).expect("writable output path"),
        None => print!("{text}"),
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::VarCountMismatch(..) => "var_count_mismatch",
        Error::VarIndexOutOfRange { .. } => "var_index_out_of_range",
        Error::PointLengthMismatch { .. } => "point_length_mismatch",
        Error::SubstitutionLengthMismatch { .. } => "substitution_length_mismatch",
        Error::PotentialDependsOnV => "potential_depends_on_v",
        Error::BadDimension => "bad_dimension",
        Error::NotOrthogonal(_) => "not_orthogonal",
        Error::NotAFunctionOfU => "not_a_function_of_u",
        Error::DimensionTooSmallForWeyl(_) => "dimension_too_small_for_weyl",
        Error::NotTwoSymmetric => "not_two_symmetric",
        Error::DegenerateEigenproblem => "degenerate_eigenproblem",
        Error::NotCanonical(_) => "not_canonical",
        Error::NotSymmetric => "not_symmetric",
        Error::NotAntisymmetric => "not_antisymmetric",
        Error::ExactnessRequired => "exactness_required",
        Error::Parse(_) => "parse_error",
        Error::InvalidInput(_) => "invalid_input",
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_exact_metric(path: &Path) -> Result<PpWaveMetric<Rational>, Error> {
    let doc: MetricDoc = read_json(path)?;
    PpWaveMetric::from_doc(&doc)
}

fn rat_vec_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

fn rat_mat_json(m: &RatMatrix) -> Value {
    Value::Array(m.iter().map(|r| rat_vec_json(r)).collect())
}

fn space_json(space: &LinearSpaceBasis, dims_only: bool) -> Value {
    let mut obj = Map::new();
    obj.insert("dim".into(), json!(space.dim()));
    obj.insert("ambient_dim".into(), json!(space.ambient_dim));
    obj.insert("shape".into(), serde_json::to_value(space.shape).expect("serializable"));
    if !dims_only {
        obj.insert(
            "basis".into(),
            Value::Array(space.vectors.iter().map(|v| rat_vec_json(v)).collect()),
        );
    }
    Value::Object(obj)
}

fn run(cmd: &Command) -> Result<Value, Error> {
    match cmd {
        Command::Analyze { metric } => {
            let m = read_exact_metric(metric)?;
            let report = classify(&m);
            let span = screen_span(&m);
            Ok(json!({
                "order": report.order,
                "witness": report.witness_name,
                "witness_tensor": report.witness.as_ref().map(|t| t.to_doc()),
                "screen_span": {
                    "dimension": span.dimension,
                    "basis": span.basis.iter().map(rat_mat_json).collect::<Vec<_>>(),
                    "kernel": span.kernel.iter().map(|v| rat_vec_json(v)).collect::<Vec<_>>(),
                    "blocks": span.blocks.iter()
                        .map(|b| Value::Array(b.iter().map(|v| rat_vec_json(v)).collect()))
                        .collect::<Vec<_>>(),
                    "determined": span.determined,
                    "decomposable": span.decomposable,
                }
            }))
        }
        Command::Curvature { metric, tensor } => {
            let m = read_exact_metric(metric)?;
            let t = match tensor {
                TensorKind::Riemann => curvature(&m),
                TensorKind::Ricci => ricci(&m),
                TensorKind::Weyl => weyl(&m)?,
                TensorKind::NablaR => nabla_r(&m),
                TensorKind::Nabla2R => nabla2_r(&m),
            };
            Ok(serde_json::to_value(t.to_doc()).expect("serializable"))
        }
        Command::Transform {
            metric,
            transformation,
        } => {
            let tdoc: TransformationDoc = read_json(transformation)?;
            if tdoc.exact {
                let m = read_exact_metric(metric)?;
                let t = AdaptedTransformation::<Rational>::from_doc(&tdoc)?;
                let out = t.apply(&m)?;
                Ok(serde_json::to_value(out.to_doc()).expect("serializable"))
            } else {
                let mdoc: MetricDoc = read_json(metric)?;
                let m = PpWaveMetric::<f64>::from_doc(&mdoc)?;
                let t = AdaptedTransformation::<f64>::from_doc(&tdoc)?;
                let out = t.apply(&m)?;
                Ok(serde_json::to_value(out.to_doc()).expect("serializable"))
            }
        }
        Command::Canonicalize { metric } => {
            let mdoc: MetricDoc = read_json(metric)?;
            let form = match PpWaveMetric::<Rational>::from_doc(&mdoc) {
                Ok(m) => canonicalize(&m)?,
                Err(Error::ExactnessRequired) => {
                    let m = PpWaveMetric::<f64>::from_doc(&mdoc)?;
                    canonicalize_numeric(&m)?
                }
                Err(e) => return Err(e),
            };
            Ok(serde_json::to_value(form.to_doc()).expect("serializable"))
        }
        Command::Equiv { first, second } => {
            let d1: CanonicalDoc = read_json(first)?;
            let d2: CanonicalDoc = read_json(second)?;
            let c1 = CanonicalForm::from_doc(&d1)?;
            let c2 = CanonicalForm::from_doc(&d2)?;
            let verdict = decide_equivalence(&c1, &c2)?;
            Ok(serde_json::to_value(verdict.to_doc()).expect("serializable"))
        }
        Command::Spaces {
            n,
            h,
            g_type,
            dims_only,
        } => {
            let gtype = match g_type.as_str() {
                "I" => HolonomyType::TypeI,
                "II" => HolonomyType::TypeII,
                "ppwave" => HolonomyType::PpWave,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "g-type must be I, II or ppwave, got {other:?}"
                    )))
                }
            };
            let screen: Vec<RatMatrix> = if h == "so" {
                so_screen_basis(*n)
            } else {
                let raw: Vec<Vec<Vec<Value>>> = read_json(Path::new(h))?;
                raw.iter()
                    .map(|m| {
                        m.iter()
                            .map(|row| row.iter().map(Rational::coef_from_json).collect())
                            .collect()
                    })
                    .collect::<Result<_, _>>()?
            };
            let gens = generator_set(*n, &screen, gtype)?;
            let r = space_r(*n, &gens);
            let p = space_p(*n, &screen)?;
            let nabla = space_nabla_r(*n, &gens);
            let ann = annihilator(&nabla, &gens);
            Ok(json!({
                "n": n,
                "g_type": g_type,
                "r": space_json(&r, *dims_only),
                "p": space_json(&p, *dims_only),
                "nabla_r": space_json(&nabla, *dims_only),
                "nabla_r_annihilator": space_json(&ann, *dims_only),
            }))
        }
        Command::Verify {
            bianchi,
            oracle,
            invariance,
            lemma2,
            all,
            n,
            seed,
        } => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let budget = budget_from_env(40);
            let mut out = Map::new();
            let record = |out: &mut Map<String, Value>, s: &SuiteOutcome| {
                out.insert(s.name.clone(), json!(if s.passed { "pass" } else { "fail" }));
                if let Some(ce) = &s.counterexample {
                    out.insert(format!("{}_counterexample", s.name), json!(ce));
                }
            };
            if *bianchi || *all {
                let (first, second) = suite_bianchi(seed, budget);
                record(&mut out, &first);
                record(&mut out, &second);
            }
            if *oracle || *all {
                record(&mut out, &suite_oracle(seed, budget));
            }
            if *invariance || *all {
                record(&mut out, &suite_invariance(seed, budget));
            }
            if *lemma2 || *all {
                let s = suite_lemma2(*n);
                record(&mut out, &s);
                out.insert("lemma2_dimension".into(), json!(if s.passed { 1 } else { 0 }));
                out.insert("lemma2_n".into(), json!(n));
            }
            Ok(Value::Object(out))
        }
    }
}
