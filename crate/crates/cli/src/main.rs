use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affine_lambda::affine::{check_free_and_rigid, AffineAut, AffineGroup, TStarGroup};
use affine_lambda::expsum::DEFAULT_MAX_REFINEMENTS;
use affine_lambda::harness::{parse_n_range, run_suite, Suite, SuiteConfig};
use affine_lambda::hyperbolic::{
    certify_admissible, is_essentially_hyperbolic, lowest_entry_dominates,
};
use affine_lambda::integerize::integerize;
use affine_lambda::lsa::{gamma_bar, AffineRep};
use affine_lambda::matrix::unipotent_log;
use affine_lambda::order::OrderedGroup;
use affine_lambda::tstar::{phi_bar, tstar_essentially_free, TStarElem};
use affine_lambda::wreath::{iterated_wreath, IterElem, IterPoint, IteratedSpec};
use affine_lambda::{Rat, TriMat};
use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

const REFINEMENTS_VAR: &str = "AFFINE_MAX_REFINEMENTS";

/// Exact affine actions of unitriangular groups on linear trees.
#[derive(Parser, Debug)]
#[command(name = "affine-lambda", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed A ∈ UT(n, ℚ) as the affine matrix γ̄(A).
    Embed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: PathBuf,
        /// Also conjugate {γ̄(A), γ̄(A)⁻¹} into integer matrices.
        #[arg(long)]
        integerize: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide essential hyperbolicity of an affine matrix.
    Hyperbolic {
        #[arg(long)]
        input: PathBuf,
        /// Treat the input as A ∈ UT(n) and certify γ̄(A) from log A.
        #[arg(long)]
        certify: bool,
    },
    /// Conjugate an inverse-closed set of unitriangular matrices into integer ones.
    Integerize {
        #[arg(long)]
        input: PathBuf,
        /// Add the missing inverses before conjugating.
        #[arg(long)]
        close: bool,
    },
    /// Extend a T*(n) element to its affine matrix on ℝ^{m+n}.
    ExtendTstar {
        #[arg(long)]
        input: PathBuf,
        /// Sample this many points for the free-and-rigid check.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply g^k to a point.
    Act {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        power: i64,
    },
    /// Act with, or check freeness of, an element of an iterated wreath product.
    Wreath {
        /// {"levels": ["Z", "Q", …]}
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        elem: PathBuf,
        /// Print g^k·p instead of the free-and-rigid report.
        #[arg(long)]
        point: Option<PathBuf>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        power: i64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a property suite and print its verdict.
    Verify {
        #[arg(long)]
        suite: Suite,
        /// A dimension, a range like 2..5, or a list like 2,4.
        #[arg(long, default_value = "4")]
        n: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_refinements: Option<u32>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Input that could not be read or parsed.
#[derive(Debug)]
struct Malformed(String);

impl std::fmt::Display for Malformed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Malformed {}

/// A verification run completed with failing checks.
#[derive(Debug)]
struct ChecksFailed(usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn malformed(msg: impl Into<String>) -> anyhow::Error {
    Malformed(msg.into()).into()
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| malformed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

/// A matrix given either as `{"n", "entries"}` or as a bare list of rows.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Tagged(TriMat<Rat>),
    Rows(Vec<Vec<Rat>>),
}

impl MatrixInput {
    fn into_matrix(self) -> anyhow::Result<TriMat<Rat>> {
        match self {
            MatrixInput::Tagged(m) => Ok(m),
            MatrixInput::Rows(rows) => {
                TriMat::from_rows(rows).map_err(|e| malformed(e.to_string()))
            }
        }
    }
}

fn read_matrix(path: &Path) -> anyhow::Result<TriMat<Rat>> {
    read_json::<MatrixInput>(path)?.into_matrix()
}

/// An affine matrix given as an AffineRep object or as a bare matrix.
#[derive(Deserialize)]
#[serde(untagged)]
enum RepInput {
    Rep(AffineRep<Rat>),
    Matrix(MatrixInput),
}

fn max_refinements(flag: Option<u32>) -> anyhow::Result<u32> {
    if let Some(r) = flag {
        return Ok(r);
    }
    match std::env::var(REFINEMENTS_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            malformed(format!(
                "{REFINEMENTS_VAR} must be a non-negative integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_REFINEMENTS),
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_embed(
    n: usize,
    input: &Path,
    integerize_flag: bool,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    let a = read_matrix(input)?;
    if a.dim() != n {
        bail!(affine_lambda::Error::DimensionMismatch {
            expected: n,
            found: a.dim()
        });
    }
    if !a.is_unitriangular() {
        bail!(affine_lambda::Error::NotUnitriangular);
    }
    let rep = gamma_bar(&a)?;
    let mut out = serde_json::to_value(&rep)?;
    if integerize_flag {
        let inverse = rep.matrix.upper_inverse()?;
        let res = integerize(&[rep.matrix.clone(), inverse])?;
        out["p"] = serde_json::to_value(&res.p)?;
        out["conjugated"] = serde_json::to_value(&res.conjugates[0])?;
    }
    emit(&out, output)
}

fn cmd_hyperbolic(input: &Path, certify: bool) -> anyhow::Result<()> {
    let m = read_matrix(input)?;
    let out = if certify {
        if !m.is_unitriangular() {
            bail!(affine_lambda::Error::NotUnitriangular);
        }
        let report = certify_admissible(&unipotent_log(&m)?)?;
        json!({ "admissible": report })
    } else {
        json!({
            "essentially_hyperbolic": is_essentially_hyperbolic(&m)?,
            "lowest_entry_dominates": lowest_entry_dominates(&m)?,
        })
    };
    emit(&out, None)
}

fn cmd_integerize(input: &Path, close: bool) -> anyhow::Result<()> {
    let mut gens = read_json::<Vec<MatrixInput>>(input)?
        .into_iter()
        .map(MatrixInput::into_matrix)
        .collect::<anyhow::Result<Vec<_>>>()?;
    if close {
        for g in gens.clone() {
            if !g.is_unitriangular() {
                bail!(affine_lambda::Error::NotUnitriangular);
            }
            let inv = g.upper_inverse()?;
            if !gens.contains(&inv) {
                gens.push(inv);
            }
        }
    }
    emit(&integerize(&gens)?, None)
}

fn cmd_extend_tstar(input: &Path, samples: usize, seed: u64) -> anyhow::Result<()> {
    let g: TStarElem = read_json(input)?;
    let g = g.validate()?;
    let matrix = phi_bar(&g)?;
    let mut out = json!({ "n": g.n, "matrix": matrix });
    if !g.is_identity() {
        let group = TStarGroup::new(g.n, max_refinements(None)?);
        out["essentially_free"] = json!(tstar_essentially_free(&g)?);
        out["free_and_rigid"] =
            serde_json::to_value(check_free_and_rigid(&group, &g, samples, seed)?)?;
    }
    emit(&out, None)
}

fn power<G: AffineGroup>(group: &G, g: &G::Elem, k: i64) -> anyhow::Result<G::Elem> {
    let base = if k < 0 { group.inv(g)? } else { g.clone() };
    let mut acc = group.identity();
    for _ in 0..k.unsigned_abs() {
        acc = group.mul(&acc, &base)?;
    }
    Ok(acc)
}

fn cmd_act(rep: &Path, point: &Path, k: i64) -> anyhow::Result<()> {
    let matrix = match read_json::<RepInput>(rep)? {
        RepInput::Rep(r) => r.matrix,
        RepInput::Matrix(m) => m.into_matrix()?,
    };
    let g = AffineAut::from_affine_matrix(&matrix, max_refinements(None)?)?;
    let p: Vec<Rat> = read_json(point)?;
    if p.len() != g.dim() {
        bail!(affine_lambda::Error::DimensionMismatch {
            expected: g.dim(),
            found: p.len()
        });
    }
    let base = if k < 0 { g.invert()? } else { g };
    let mut x = p;
    for _ in 0..k.unsigned_abs() {
        x = base.act(&x)?;
    }
    emit(&x, None)
}

fn cmd_wreath(
    spec: &Path,
    elem: &Path,
    point: Option<&Path>,
    k: i64,
    samples: usize,
    seed: u64,
) -> anyhow::Result<()> {
    let spec: IteratedSpec = read_json(spec)?;
    let group = iterated_wreath(&spec)?;
    let g: IterElem = read_json(elem)?;
    // Multiplying by the identity validates the element against the levels.
    let g = group.mul(&group.identity(), &g)?;
    match point {
        Some(path) => {
            let p: IterPoint = read_json(path)?;
            if !group.space().contains(&p) {
                bail!(affine_lambda::Error::StructureMismatch(
                    "point does not match the levels".into()
                ));
            }
            let gk = power(&group, &g, k)?;
            emit(&group.act(&gk, &p)?, None)
        }
        None => {
            let report = check_free_and_rigid(&group, &g, samples, seed)?;
            emit(&json!({ "depth": group.depth(), "report": report }), None)
        }
    }
}

fn cmd_verify(
    suite: Suite,
    n: &str,
    samples: usize,
    seed: u64,
    refinements: Option<u32>,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    let n_range = parse_n_range(n)?;
    let cfg = SuiteConfig {
        max_refinements: max_refinements(refinements)?,
        ..SuiteConfig::new(suite, n_range, samples, seed)
    };
    let verdict = run_suite(&cfg)?;
    emit(&verdict, output)?;
    let failed = verdict.failures();
    if failed > 0 {
        return Err(ChecksFailed(failed).into());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Embed {
            n,
            input,
            integerize,
            output,
        } => cmd_embed(n, &input, integerize, output.as_deref()),
        Command::Hyperbolic { input, certify } => cmd_hyperbolic(&input, certify),
        Command::Integerize { input, close } => cmd_integerize(&input, close),
        Command::ExtendTstar {
            input,
            samples,
            seed,
        } => cmd_extend_tstar(&input, samples, seed),
        Command::Act { rep, point, power } => cmd_act(&rep, &point, power),
        Command::Wreath {
            spec,
            elem,
            point,
            power,
            samples,
            seed,
        } => cmd_wreath(&spec, &elem, point.as_deref(), power, samples, seed),
        Command::Verify {
            suite,
            n,
            samples,
            seed,
            max_refinements,
            output,
        } => cmd_verify(suite, &n, samples, seed, max_refinements, output.as_deref()),
    }
}

/// 1 for failing checks, 2 for malformed input, 3 for violated preconditions.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ChecksFailed>().is_some() {
        return 1;
    }
    if err.downcast_ref::<Malformed>().is_some() {
        return 2;
    }
    match err.downcast_ref::<affine_lambda::Error>() {
        Some(affine_lambda::Error::Parse(_) | affine_lambda::Error::ConfigInvalid(_)) => 2,
        Some(_) => 3,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
