//! Command-line interface: construction, checking, multiplication,
//! canonicalization, decomposition, embedding, fluctuation, sampling and
//! dimension reports, all over JSON on stdin/stdout.
//!
//! Exit codes: 0 success, 1 input/validation error, 2 numerical contract
//! violation (non-membership, broken canonical structure, non-hermitian
//! data).

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use pert_core::{
    action_composition_check, affine_dimension, canonicalize, decomposition_report,
    dimension_table, fluctuate_unchecked, sample_member, split_direct_sum, AlgebraDescriptor,
    CanonicalBlocks, DiracOperator, FieldTag, Matrix, PertError, PertMatrix, TensorElement,
};

mod fmt;
use fmt::to_json_string;

#[derive(Parser)]
#[command(name = "pert", about = "Perturbation semigroups of matrix *-algebras", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Numerical tolerance for membership and structure checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Check normalization, self-adjointness and membership of an element
    /// (or realized matrix) read from FILE or '-' for stdin.
    Check {
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Multiply two elements (or realized matrices).
    Mul { a: String, b: String },
    /// Canonicalize a member: basis change and block extraction.
    Canon {
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Decomposition report (per block for direct sums).
    Decompose {
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Embed a unitary into the semigroup; random unless --unitary given.
    Embed {
        /// Base field of the block: R, C or H.
        #[arg(long)]
        field: String,
        /// Block size n.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON file with an explicit unitary matrix instead of a random one.
        #[arg(long)]
        unitary: Option<String>,
    },
    /// Verify the representation block structure of embedded unitaries.
    RepCheck {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply an element to a hermitian operator and report both spectra.
    Fluctuate {
        input: String,
        /// JSON file with the operator: {"dim": n, "mat": ...}.
        #[arg(long)]
        dirac: String,
        #[command(flatten)]
        common: Common,
        /// Apply the raw formula even when the element is not a member.
        #[arg(long)]
        force: bool,
        /// Emit the spectra as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        /// Also verify the composition law against a second element file.
        #[arg(long)]
        compose_with: Option<String>,
    },
    /// Draw a random member of the semigroup.
    Sample {
        /// Algebra as inline JSON or @file, e.g. '[{"field":"C","n":2}]'.
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Solve the defining constraints and report solution dimensions.
    OracleDims {
        /// Algebras (inline JSON or @file); defaults to the standard table.
        #[arg(long)]
        algebra: Vec<String>,
        #[arg(long)]
        csv: bool,
    },
    /// Closed-form dimension formulas without solving anything.
    SpecTable {
        #[arg(long)]
        algebra: Vec<String>,
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<PertError> for CliError {
    fn from(err: PertError) -> Self {
        let code = match err {
            PertError::NotAMember { .. }
            | PertError::CanonicalStructureViolated { .. }
            | PertError::CrossLinkageViolated { .. }
            | PertError::NotHermitian { .. }
            | PertError::NoConvergence => 2,
            _ => 1,
        };
        CliError { code, message: err.to_string() }
    }
}

fn read_input(path: &str) -> Result<Value, CliError> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::invalid(format!("reading stdin: {e}")))?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("reading {path}: {e}")))?
    };
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{path}: {e}")))?;
    if let Some(v) = value.get("v") {
        if v != &json!(1) {
            return Err(CliError::invalid(format!(
                "{path}: unsupported schema version {v}, expected 1"
            )));
        }
    }
    Ok(value)
}

fn parse<T: serde::de::DeserializeOwned>(value: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::invalid(format!("{what}: {e}")))
}

/// Accepts either an element ({"terms": ...}) or a realized matrix
/// ({"mat": ...}); matrices are converted into term lists.
fn read_element(path: &str, tol: f64) -> Result<TensorElement, CliError> {
    let value = read_input(path)?;
    if value.get("terms").is_some() {
        parse(value, path)
    } else if value.get("mat").is_some() {
        let m: PertMatrix = parse(value, path)?;
        Ok(m.to_element(tol)?)
    } else {
        Err(CliError::invalid(format!(
            "{path}: expected an element with \"terms\" or a matrix with \"mat\""
        )))
    }
}

fn parse_algebra(spec: &str) -> Result<AlgebraDescriptor, CliError> {
    let text = if let Some(path) = spec.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("reading {path}: {e}")))?
    } else {
        spec.to_string()
    };
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("algebra {spec:?}: {e}")))
}

fn parse_field(s: &str) -> Result<FieldTag, CliError> {
    s.parse().map_err(|e: PertError| CliError::invalid(e.to_string()))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", to_json_string(value));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check { input, common } => {
            let value = read_input(&input)?;
            let tol = common.tol;
            let (kind, normalized, self_adjoint, member, residual) =
                if value.get("terms").is_some() {
                    let e: TensorElement = parse(value, &input)?;
                    let m = e.realize();
                    (
                        "element",
                        e.is_normalized(tol),
                        e.is_self_adjoint(tol),
                        m.is_member(tol),
                        m.membership_residual(),
                    )
                } else {
                    let m: PertMatrix = parse(value, &input)?;
                    let sd = pert_core::structure_data(m.algebra());
                    let mv = m.mat().mul_vec(&sd.fixed_vector);
                    let fixed: f64 = mv
                        .iter()
                        .zip(&sd.fixed_vector)
                        .map(|(a, b)| (a - b).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    let swap = &sd.constraints[0].matrix;
                    let comm = swap
                        .matmul(&m.mat().conj())
                        .diff_norm(&m.mat().matmul(swap));
                    (
                        "matrix",
                        fixed <= tol,
                        comm <= tol,
                        m.is_member(tol),
                        m.membership_residual(),
                    )
                };
            print_json(&json!({
                "v": 1,
                "kind": kind,
                "member": member,
                "normalized": normalized,
                "self_adjoint": self_adjoint,
                "residual": residual,
            }));
            Ok(())
        }

        Command::Mul { a, b } => {
            let va = read_input(&a)?;
            let vb = read_input(&b)?;
            let matrix_mode = va.get("mat").is_some() || vb.get("mat").is_some();
            if matrix_mode {
                let to_matrix = |v: Value, path: &str| -> Result<PertMatrix, CliError> {
                    if v.get("mat").is_some() {
                        parse(v, path)
                    } else {
                        let e: TensorElement = parse(v, path)?;
                        Ok(e.realize())
                    }
                };
                let ma = to_matrix(va, &a)?;
                let mb = to_matrix(vb, &b)?;
                let prod = ma.multiply(&mb)?;
                print_json(&json!({
                    "v": 1,
                    "algebra": prod.algebra(),
                    "mat": prod.mat(),
                }));
            } else {
                let ea: TensorElement = parse(va, &a)?;
                let eb: TensorElement = parse(vb, &b)?;
                let prod = ea.multiply(&eb)?;
                print_json(&json!({
                    "v": 1,
                    "algebra": prod.algebra(),
                    "terms": prod.terms().iter()
                        .map(|(x, y)| json!({"a": x, "b": y}))
                        .collect::<Vec<_>>(),
                }));
            }
            Ok(())
        }

        Command::Canon { input, common } => {
            let e = read_element(&input, common.tol)?;
            let m = e.realize();
            let form = canonicalize(&m, common.tol)?;
            let blocks = match form.blocks() {
                CanonicalBlocks::Complex { v, b } => json!({
                    "v": complex_row(v), "B": b,
                }),
                CanonicalBlocks::Real { v1, b1, b2 } => json!({
                    "v1": v1, "B1": b1, "B2": b2,
                }),
                CanonicalBlocks::Quaternionic { v, b, c } => json!({
                    "v": complex_row(v), "B": b, "C": c,
                }),
            };
            print_json(&json!({
                "v": 1,
                "case": form.blocks().case().to_string(),
                "algebra": form.algebra(),
                "a_canonical": form.a_canonical(),
                "blocks": blocks,
                "pattern_residual": form.pattern_residual(),
            }));
            Ok(())
        }

        Command::Decompose { input, common } => {
            let e = read_element(&input, common.tol)?;
            let m = e.realize();
            if m.algebra().is_single_block() {
                let form = canonicalize(&m, common.tol)?;
                let report = decomposition_report(&form);
                print_json(&json!({"v": 1, "report": report}));
            } else {
                let (parts, cross) = split_direct_sum(&m, common.tol)?;
                let mut reports = Vec::new();
                for part in &parts {
                    let form = canonicalize(part, common.tol)?;
                    reports.push(decomposition_report(&form));
                }
                let crosses: Vec<Value> = cross
                    .iter()
                    .map(|cp| {
                        json!({
                            "row_block": cp.row_block,
                            "col_block": cp.col_block,
                            "upper": cp.upper,
                            "linkage_residual": cp.linkage_residual(m.algebra()),
                        })
                    })
                    .collect();
                print_json(&json!({
                    "v": 1,
                    "algebra": m.algebra(),
                    "blocks": reports,
                    "cross": crosses,
                    "total_real_dim": dimension_table(m.algebra()).total,
                }));
            }
            Ok(())
        }

        Command::Embed { field, n, seed, unitary } => {
            let field = parse_field(&field)?;
            let u = match unitary {
                Some(path) => {
                    let value = read_input(&path)?;
                    let mat: Matrix = parse(
                        value
                            .get("mat")
                            .cloned()
                            .ok_or_else(|| CliError::invalid(format!("{path}: missing \"mat\"")))?,
                        &path,
                    )?;
                    pert_core::UnitaryElement::from_matrix(field, n, mat)?
                }
                None => pert_core::random_unitary(field, n, seed),
            };
            let e = pert_core::embed_unitary(&u);
            print_json(&json!({
                "v": 1,
                "algebra": e.algebra(),
                "terms": e.terms().iter()
                    .map(|(x, y)| json!({"a": x, "b": y}))
                    .collect::<Vec<_>>(),
            }));
            Ok(())
        }

        Command::RepCheck { field, n, samples, seed } => {
            let field = parse_field(&field)?;
            let report = pert_core::verify_rep_decomposition(field, n, samples, seed)?;
            print_json(&json!({"v": 1, "report": report}));
            Ok(())
        }

        Command::Fluctuate { input, dirac, common, force, csv, compose_with } => {
            let e = read_element(&input, common.tol)?;
            let d: DiracOperator = parse(read_input(&dirac)?, &dirac)?;
            let m = e.realize();
            let residual = m.membership_residual();
            if residual > common.tol && !force {
                return Err(CliError::numerical(format!(
                    "element is not a member (residual {residual:.3e}); \
                     pass --force to apply the raw formula"
                )));
            }
            let out = fluctuate_unchecked(&e, d.matrix())?;
            let herm = out.hermitian_residual();
            let before = d.spectrum()?;
            let after = if herm <= 1e-8 {
                Some(pert_core::hermitian_eigenvalues(&out)?)
            } else {
                None
            };
            if csv {
                println!("index,before,after");
                for (i, b) in before.iter().enumerate() {
                    match &after {
                        Some(a) => println!("{i},{b:.16e},{:.16e}", a[i]),
                        None => println!("{i},{b:.16e},"),
                    }
                }
            } else {
                print_json(&json!({
                    "v": 1,
                    "d_prime": out,
                    "hermiticity_residual": herm,
                    "spectrum_before": before,
                    "spectrum_after": after,
                }));
            }
            if let Some(other) = compose_with {
                let y = read_element(&other, common.tol)?;
                let ok = action_composition_check(&e, &y, &d, common.tol)?;
                if !ok {
                    return Err(CliError::numerical("composition law violated"));
                }
            }
            Ok(())
        }

        Command::Sample { algebra, seed, scale } => {
            let alg = parse_algebra(&algebra)?;
            let m = sample_member(&alg, seed, scale);
            print_json(&json!({
                "v": 1,
                "algebra": m.algebra(),
                "mat": m.mat(),
                "residual": m.membership_residual(),
            }));
            Ok(())
        }

        Command::OracleDims { algebra, csv } => {
            let algebras = resolve_algebras(&algebra)?;
            let mut rows = Vec::new();
            for alg in &algebras {
                let closed = dimension_table(alg).total;
                let oracle = affine_dimension(alg)?;
                rows.push((alg.to_string(), closed, oracle));
            }
            if csv {
                println!("algebra,closed_form,oracle,match");
                for (name, closed, oracle) in &rows {
                    println!("{name},{closed},{oracle},{}", closed == oracle);
                }
            } else {
                let table: Vec<Value> = rows
                    .iter()
                    .map(|(name, closed, oracle)| {
                        json!({
                            "algebra": name,
                            "closed_form": closed,
                            "oracle": oracle,
                            "match": closed == oracle,
                        })
                    })
                    .collect();
                print_json(&json!({"v": 1, "table": table}));
            }
            Ok(())
        }

        Command::SpecTable { algebra, csv } => {
            let algebras = resolve_algebras(&algebra)?;
            if csv {
                println!("algebra,case,V,S,T,total");
                for alg in &algebras {
                    let t = dimension_table(alg);
                    for b in &t.blocks {
                        println!(
                            "{},{},{},{},{},{}",
                            t.algebra,
                            b.case,
                            b.v,
                            b.s,
                            b.t.map(|x| x.to_string()).unwrap_or_default(),
                            t.total
                        );
                    }
                }
                return Ok(());
            }
            if algebras.len() == 1 && algebras[0].is_single_block() {
                let t = dimension_table(&algebras[0]);
                let b = &t.blocks[0];
                let mut obj = serde_json::Map::new();
                obj.insert("v".into(), json!(1));
                obj.insert("algebra".into(), json!(t.algebra));
                obj.insert("case".into(), json!(b.case));
                obj.insert("V".into(), json!(b.v));
                obj.insert("S".into(), json!(b.s));
                if let Some(tdim) = b.t {
                    obj.insert("T".into(), json!(tdim));
                }
                obj.insert("total".into(), json!(b.total));
                print_json(&Value::Object(obj));
            } else {
                let tables: Vec<_> = algebras.iter().map(dimension_table).collect();
                print_json(&json!({"v": 1, "table": tables}));
            }
            Ok(())
        }
    }
}

fn complex_row(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

/// Default dimension-table algebras when none are given.
fn resolve_algebras(specs: &[String]) -> Result<Vec<AlgebraDescriptor>, CliError> {
    if specs.is_empty() {
        let mut out = vec![
            AlgebraDescriptor::diagonal_complex(2),
            AlgebraDescriptor::diagonal_complex(3),
            AlgebraDescriptor::diagonal_complex(4),
            AlgebraDescriptor::single(FieldTag::C, 2),
            AlgebraDescriptor::single(FieldTag::C, 3),
            AlgebraDescriptor::single(FieldTag::R, 2),
            AlgebraDescriptor::single(FieldTag::R, 3),
            AlgebraDescriptor::single(FieldTag::H, 1),
            AlgebraDescriptor::single(FieldTag::H, 2),
        ];
        out.dedup();
        return Ok(out);
    }
    specs.iter().map(|s| parse_algebra(s)).collect()
}
