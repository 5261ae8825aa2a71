//! The `curvtensor` command line.
//!
//! Every successful run prints `{"manifest": .., "report": ..}`. The manifest
//! lists input digests, seed, mode, version and arguments; identical manifests
//! give byte-identical output. Timing goes to the stderr summary only.
//!
//! Exit codes: 0 success, 1 malformed input or IO failure, 2 an unmet theorem
//! hypothesis or premise, 64 usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::campaign::{run_campaign, Campaign};
use crate::chain::{analyze_four_chain, analyze_star, analyze_three_chain, exact_at, is_chain};
use crate::curvature::{adjoint_transfer, correction_term_deviation, is_act, skew_identity_deviation, Build, Sign};
use crate::decompose::{conjecture_campaign, constructive_decomposition, minimal_search, Family};
use crate::dependence::{check_theorem_sll, check_theorem_ssl, dependence, necessary_conditions_ssl, pairwise_exclusions};
use crate::error::{Error, Result};
use crate::io::{parse_context, parse_decomposition, parse_operator, parse_sign, parse_tensor, parse_term_or_tensor};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::reduce::{reduce_by_kernel, reduce_preserving_target};
use crate::scalar::{Rational, Scalar};
use crate::structure_group::{in_g_pm_tau, in_g_r_tau, verify_structure_theorem, FormView};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_CONDITION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "curvtensor", version, about = "Canonical algebraic curvature tensors")]
pub struct Cli {
    /// Arithmetic: exact rationals or IEEE doubles.
    #[arg(long, value_enum, default_value_t = ModeArg::Float64, global = true)]
    pub mode: ModeArg,
    /// Relative tolerance for float comparisons.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// No human summary on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Context file `{"dim", "phi"?, "tolerance"?}`; defaults to the euclidean form.
    #[arg(long, global = true)]
    pub context: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    #[value(alias = "float")]
    Float64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BuildArg {
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "Lambda", alias = "lambda")]
    Lambda,
}

impl From<BuildArg> for Build {
    fn from(b: BuildArg) -> Build {
        match b {
            BuildArg::S => Build::Symmetric,
            BuildArg::Lambda => Build::Antisymmetric,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build R^S or R^Λ of an operator.
    Build(BuildArgs),
    /// Test the curvature-tensor axioms.
    Check(CheckArgs),
    /// Deviations of the build identities for an operator.
    Identity(IdentityArgs),
    /// Structure-group membership or the equivalence campaign for a form.
    Structgroup(StructArgs),
    /// Linear dependence of tensors, or one of the independence theorems.
    Depend(DependArgs),
    /// Chain detection and the chain theorems.
    Chain(ChainArgs),
    /// Kernel reduction of a decomposition.
    Reduce(ReduceArgs),
    /// Constructive or fewest-term decomposition of a tensor.
    Decompose(DecomposeArgs),
    /// Seeded falsification campaigns.
    Fuzz(FuzzArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Build(_) => "build",
            Command::Check(_) => "check",
            Command::Identity(_) => "identity",
            Command::Structgroup(_) => "structgroup",
            Command::Depend(_) => "depend",
            Command::Chain(_) => "chain",
            Command::Reduce(_) => "reduce",
            Command::Decompose(_) => "decompose",
            Command::Fuzz(_) => "fuzz",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct BuildArgs {
    #[arg(long)]
    pub op: PathBuf,
    /// Defaults to the build matching the operator kind.
    #[arg(long, value_enum)]
    pub build: Option<BuildArg>,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    #[arg(long, required_unless_present = "tensor", conflicts_with = "tensor")]
    pub op: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub build: Option<BuildArg>,
    #[arg(long)]
    pub tensor: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct IdentityArgs {
    #[arg(long)]
    pub op: PathBuf,
    /// Basis quadruple `i,j,k,l` (1-based) for the slot-transfer values.
    #[arg(long)]
    pub quadruple: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct StructArgs {
    /// Operator carrying the form `τ(x, y) = φ(Tx, y)`.
    #[arg(long)]
    pub tau: PathBuf,
    /// Samples per pool.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Test one map instead of running the campaign.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremArg {
    Ssl,
    Sll,
    Necessary,
    Exclusion,
}

#[derive(Args, Debug, Serialize)]
pub struct DependArgs {
    /// List of terms, tensors or paths to them; or `{"context"?, "terms": [..]}`.
    #[arg(long, required_unless_present = "theorem")]
    pub terms: Option<PathBuf>,
    #[arg(long, value_enum, requires = "ops")]
    pub theorem: Option<TheoremArg>,
    /// The two operators the theorem is applied to.
    #[arg(long)]
    pub ops: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ChainArgs {
    /// List of operators `[A₁, .., A_m]`, or `{"context"?, "ops": [..]}`.
    #[arg(long)]
    pub ops: PathBuf,
    /// Signs of the premise sum, for operators 2..m or 1..m (the first must be +).
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
    /// Read the operators as a star: the center first, then the legs.
    #[arg(long)]
    pub star: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ReduceArgs {
    #[arg(long)]
    pub decomp: PathBuf,
    /// 1-based position of the pivot term.
    #[arg(long)]
    pub pivot: usize,
    /// Map into the pivot's kernel; defaults to the orthogonal projection.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Operator `C` of a canonical target `R_C` that the map must preserve.
    #[arg(long)]
    pub preserve: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Sym,
    Skew,
    Mixed,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Sym => Family::SymmetricOnly,
            FamilyArg::Skew => Family::SkewOnly,
            FamilyArg::Mixed => Family::Mixed,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub tensor: PathBuf,
    #[arg(long, value_enum, default_value_t = FamilyArg::Sym)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    /// Random starts per sign pattern and term count.
    #[arg(long, default_value_t = 8)]
    pub budget: usize,
    /// Solve in a sampled spanning set instead of searching.
    #[arg(long)]
    pub constructive: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignArg {
    Axioms,
    Identity,
    Precompose,
    Dimension,
    Structure,
    Independence,
    Necessary,
    Exclusions,
    ThreeChain,
    Star,
    FourChain,
    RankPowers,
    Reduce,
    Preserve,
    /// Compare μ̂ with ν̂ on random targets.
    Conjecture,
}

impl CampaignArg {
    fn campaign(self) -> Option<Campaign> {
        use CampaignArg as A;
        Some(match self {
            A::Axioms => Campaign::Axioms,
            A::Identity => Campaign::Identity,
            A::Precompose => Campaign::Precompose,
            A::Dimension => Campaign::Dimension,
            A::Structure => Campaign::Structure,
            A::Independence => Campaign::Independence,
            A::Necessary => Campaign::Necessary,
            A::Exclusions => Campaign::Exclusions,
            A::ThreeChain => Campaign::ThreeChain,
            A::Star => Campaign::Star,
            A::FourChain => Campaign::FourChain,
            A::RankPowers => Campaign::RankPowers,
            A::Reduce => Campaign::Reduce,
            A::Preserve => Campaign::Preserve,
            A::Conjecture => return None,
        })
    }
}

#[derive(Args, Debug, Serialize)]
pub struct FuzzArgs {
    #[arg(long, value_enum)]
    pub campaign: CampaignArg,
    /// Instances (per pool for `structure`, samples per dimension for `dimension`).
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Dimension for the conjecture campaign.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    #[arg(long, default_value_t = 4)]
    pub budget: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything that determines a report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub mode: ModeArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub version: &'static str,
    pub arguments: Value,
}

/// Reads JSON inputs and records their digests.
#[derive(Default)]
struct Inputs {
    digests: Vec<InputDigest>,
}

impl Inputs {
    fn load(&mut self, path: &Path) -> Result<Value> {
        let bytes = if path == Path::new("-") {
            let mut buf = Vec::new();
            std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf).map(|_| buf)
        } else {
            std::fs::read(path)
        }
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        self.digests.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        let v: Value = serde_json::from_slice(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        // Output of an earlier run: take its report.
        Ok(match v {
            Value::Object(mut o) if o.contains_key("manifest") && o.contains_key("report") => o.remove("report").unwrap(),
            v => v,
        })
    }
}

/// Dimension implied by an operator, tensor, term or list of them.
fn infer_dim(v: &Value) -> Option<usize> {
    match v {
        Value::Object(o) => {
            if let Some(d) = o.get("dim").and_then(Value::as_u64) {
                return Some(d as usize);
            }
            if let Some(e) = o.get("entries").and_then(Value::as_array) {
                let n = (e.len() as f64).powf(0.25).round() as usize;
                return (n.pow(4) == e.len()).then_some(n);
            }
            ["matrix", "operator", "terms", "ops", "target"].iter().find_map(|k| o.get(*k).and_then(infer_dim))
        }
        Value::Array(items) => match items.first()? {
            Value::Array(row) if row.iter().all(|x| !x.is_array() && !x.is_object()) => Some(items.len()),
            first => infer_dim(first),
        },
        _ => None,
    }
}

struct Env<'a> {
    cli: &'a Cli,
    inputs: Inputs,
}

impl Env<'_> {
    fn context<S: Scalar>(&mut self, hint: &Value) -> Result<SpaceContext<S>> {
        let ctx = if let Some(path) = &self.cli.context {
            parse_context(&self.inputs.load(path)?)?
        } else if let Some(c) = hint.get("context") {
            parse_context(c)?
        } else {
            let n = infer_dim(hint).ok_or_else(|| Error::Parse("cannot infer the dimension; pass --context".into()))?;
            SpaceContext::euclidean(n)?
        };
        match self.cli.tolerance {
            Some(t) => ctx.with_tolerance(t),
            None => Ok(ctx),
        }
    }

    /// An operator file, with its context.
    fn operator<S: Scalar>(&mut self, path: &Path) -> Result<(SpaceContext<S>, Operator<S>)> {
        let v = self.inputs.load(path)?;
        let ctx = self.context(&v)?;
        let op = parse_operator(&ctx, v.get("operator").unwrap_or(&v))?;
        Ok((ctx, op))
    }

    fn operator_in<S: Scalar>(&mut self, ctx: &SpaceContext<S>, path: &Path) -> Result<Operator<S>> {
        let v = self.inputs.load(path)?;
        parse_operator(ctx, v.get("operator").unwrap_or(&v))
    }

    fn operator_list<S: Scalar>(&mut self, path: &Path) -> Result<(SpaceContext<S>, Vec<Operator<S>>)> {
        let v = self.inputs.load(path)?;
        let ctx = self.context(&v)?;
        let items = list(&v, "ops")?;
        let ops = items.iter().map(|o| parse_operator(&ctx, o)).collect::<Result<_>>()?;
        Ok((ctx, ops))
    }
}

fn list<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    match v {
        Value::Array(items) => Ok(items),
        _ => v.get(key).and_then(Value::as_array).ok_or_else(|| Error::Parse(format!("expected a list or {{\"{key}\": [..]}}"))),
    }
}

/// Signs as `"+,-,+"`, `"+-+"` or `"1 -1 1"`.
pub fn parse_signs(s: &str) -> Result<Vec<Sign>> {
    let s = s.trim();
    let tokens: Vec<String> = if s.contains([',', ' ']) {
        s.split([',', ' ']).filter(|t| !t.is_empty()).map(str::to_string).collect()
    } else if s.chars().all(|c| c == '+' || c == '-') {
        s.chars().map(String::from).collect()
    } else {
        vec![s.to_string()]
    };
    tokens.iter().map(|t| parse_sign(&Value::String(t.clone()))).collect()
}

/// Signs for the operators after the first; a leading `+` for the first is optional.
fn trailing_signs(signs: Vec<Sign>, operators: usize) -> Result<Vec<Sign>> {
    if signs.len() == operators {
        if signs[0] != Sign::Plus {
            return Err(Error::Parse("the first operator's sign must be +".into()));
        }
        return Ok(signs[1..].to_vec());
    }
    if signs.len() + 1 == operators {
        return Ok(signs);
    }
    Err(Error::Parse(format!("{} signs for {operators} operators", signs.len())))
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

/// The report and a one-line summary.
fn execute<S: Scalar>(env: &mut Env) -> Result<(Value, String)> {
    let cli = env.cli;
    match &cli.command {
        Command::Build(a) => {
            let (ctx, op) = env.operator::<S>(&a.op)?;
            let build = a.build.map(Build::from).unwrap_or_else(|| Build::for_kind(op.kind()));
            let tensor = build.tensor(&ctx, &op)?;
            let summary = format!("{build:?} build of a {} operator, n = {}", op.kind(), ctx.dim());
            Ok((to_value(&tensor)?, summary))
        }
        Command::Check(a) => {
            let tensor = match (&a.op, &a.tensor) {
                (Some(p), _) => {
                    let (ctx, op) = env.operator::<S>(p)?;
                    a.build.map(Build::from).unwrap_or_else(|| Build::for_kind(op.kind())).tensor(&ctx, &op)?
                }
                (None, Some(p)) => {
                    let v = env.inputs.load(p)?;
                    let ctx = env.context::<S>(&v)?;
                    parse_tensor(&ctx, &v)?
                }
                (None, None) => return Err(Error::Parse("pass --op or --tensor".into())),
            };
            let report = is_act(&tensor);
            let summary = format!("is_act = {} ({} witnesses)", report.is_act, report.witnesses.len());
            Ok((to_value(&report)?, summary))
        }
        Command::Identity(a) => {
            let (ctx, op) = env.operator::<S>(&a.op)?;
            let correction = correction_term_deviation(&ctx, &op)?;
            let main = if op.kind() == OperatorKind::SkewAdjoint {
                skew_identity_deviation(&ctx, &op)?.to_json()
            } else {
                Value::Null
            };
            let mut report = json!({
                "operator_kind": op.kind(),
                "correction_term_deviation": correction.to_json(),
                "skew_identity_deviation": main,
            });
            if let Some(q) = &a.quadruple {
                let idx: Vec<usize> = q
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().ok().filter(|&i| (1..=ctx.dim()).contains(&i)))
                    .collect::<Option<_>>()
                    .filter(|v: &Vec<usize>| v.len() == 4)
                    .ok_or_else(|| Error::Parse(format!("quadruple must be four indices in 1..={}", ctx.dim())))?;
                let e: Vec<Vec<S>> = idx.iter().map(|&i| ctx.basis_vector(i - 1)).collect();
                let t = adjoint_transfer(&ctx, &op, [&e[0], &e[1], &e[2], &e[3]])?;
                report["transfer"] = json!({
                    "quadruple": idx,
                    "tensor_entry": t.tensor_entry.to_json(),
                    "pushed_forward": t.pushed_forward.to_json(),
                    "pulled_back": t.pulled_back.to_json(),
                    "agrees": t.agrees(ctx.tolerance()),
                });
            }
            let summary = format!("correction-term deviation {}", correction.to_f64());
            Ok((report, summary))
        }
        Command::Structgroup(a) => {
            let (ctx, t) = env.operator::<S>(&a.tau)?;
            let tau = FormView::new(t)?;
            if let Some(m) = &a.map {
                let map = env.operator_in(&ctx, m)?;
                let pm = in_g_pm_tau(&ctx, &map, &tau)?;
                let r = in_g_r_tau(&ctx, &map, &tau)?;
                let summary = format!("in G±τ: {}, in G_R: {r}", pm.is_some());
                return Ok((json!({ "in_g_pm_tau": pm, "in_g_r_tau": r, "agree": pm.is_some() == r }), summary));
            }
            let report = verify_structure_theorem(&ctx, &tau, a.trials, cli.seed)?;
            let summary = format!("rank τ = {}, equivalence holds: {}", report.rank, report.equivalence_holds);
            Ok((to_value(&report)?, summary))
        }
        Command::Depend(a) => match (a.theorem, &a.ops) {
            (Some(th), Some(p)) => {
                let (ctx, ops) = env.operator_list::<S>(p)?;
                let [x, y] = ops.as_slice() else {
                    return Err(Error::Parse(format!("the theorem takes two operators, got {}", ops.len())));
                };
                let (value, summary) = match th {
                    TheoremArg::Ssl => {
                        let r = check_theorem_ssl(&ctx, x, y)?;
                        (to_value(&r)?, format!("{:?}", r.status))
                    }
                    TheoremArg::Sll => {
                        let r = check_theorem_sll(&ctx, x, y)?;
                        (to_value(&r)?, format!("{:?}", r.status))
                    }
                    TheoremArg::Necessary => {
                        let r = necessary_conditions_ssl(&ctx, x, y)?;
                        (to_value(&r)?, format!("passed: {}", r.passed))
                    }
                    TheoremArg::Exclusion => {
                        let r = pairwise_exclusions(&ctx, x, y)?;
                        (to_value(&r)?, format!("{:?} passed: {}", r.case, r.passed))
                    }
                };
                Ok((value, summary))
            }
            _ => {
                let path = a.terms.as_ref().ok_or_else(|| Error::Parse("pass --terms".into()))?;
                let v = env.inputs.load(path)?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                let mut items = Vec::new();
                for item in list(&v, "terms")? {
                    items.push(match item {
                        Value::String(rel) => env.inputs.load(&base.join(rel))?,
                        other => other.clone(),
                    });
                }
                let hint = match v.get("context") {
                    Some(c) => json!({ "context": c }),
                    None => Value::Array(items.clone()),
                };
                let ctx = env.context::<S>(&hint)?;
                let tensors = items.iter().map(|t| parse_term_or_tensor(&ctx, t)).collect::<Result<Vec<_>>>()?;
                let verdict = dependence(&tensors)?;
                let summary = if verdict.independent {
                    format!("independent, rank {}", verdict.rank)
                } else {
                    format!("dependent, rank {}, proper: {:?}", verdict.rank, verdict.proper)
                };
                Ok((to_value(&verdict)?, summary))
            }
        },
        Command::Chain(a) => {
            let (ctx, ops) = env.operator_list::<S>(&a.ops)?;
            if ops.is_empty() {
                return Err(Error::Parse("no operators".into()));
            }
            if !a.star {
                let check = is_chain(&ctx, &ops)?;
                if let Some((i, j)) = check.failing_pair {
                    return Err(Error::NotAChain(format!("A{j}·A{i} ≠ 0")));
                }
            }
            let Some(signs) = &a.signs else {
                let ranks: Vec<usize> = ops.iter().map(|o| ctx.rank(o)).collect();
                let exact: Vec<bool> = ops.windows(2).map(|w| exact_at(&ctx, &w[0], &w[1])).collect();
                let report = json!({ "is_chain": !a.star, "ranks": ranks, "exact": exact });
                return Ok((report, format!("chain of {} operators", ops.len())));
            };
            let eps = trailing_signs(parse_signs(signs)?, ops.len())?;
            let report = if a.star {
                analyze_star(&ctx, &ops[0], &ops[1..], &eps)?
            } else {
                match ops.as_slice() {
                    [x, y, z] => analyze_three_chain(&ctx, x, y, z, eps[0], eps[1])?,
                    [x, y, z, w] => analyze_four_chain(&ctx, x, y, z, w, eps[0], eps[1], eps[2])?,
                    _ => {
                        return Err(Error::Hypothesis(format!(
                            "the chain theorems take 3 or 4 operators, got {}",
                            ops.len()
                        )))
                    }
                }
            };
            let summary = format!("{:?}: passed {}", report.theorem, report.passed);
            Ok((to_value(&report)?, summary))
        }
        Command::Reduce(a) => {
            let v = env.inputs.load(&a.decomp)?;
            let ctx = env.context::<S>(&v)?;
            let decomp = parse_decomposition(&ctx, &v)?;
            let pivot = a
                .pivot
                .checked_sub(1)
                .ok_or_else(|| Error::Domain("pivot positions start at 1".into()))?;
            let map = a.map.as_ref().map(|p| env.operator_in(&ctx, p)).transpose()?;
            let reduction = match &a.preserve {
                Some(p) => {
                    let c = env.operator_in(&ctx, p)?;
                    reduce_preserving_target(&ctx, &decomp, &c, pivot, map.as_ref())?
                }
                None => reduce_by_kernel(&ctx, &decomp, pivot, map.as_ref())?,
            };
            let summary = format!(
                "{} → {} terms, verified {}",
                decomp.len(),
                reduction.decomposition.len(),
                reduction.verified
            );
            Ok((to_value(&reduction)?, summary))
        }
        Command::Decompose(a) => {
            let v = env.inputs.load(&a.tensor)?;
            let ctx = env.context::<S>(&v)?;
            let r = parse_tensor(&ctx, &v)?;
            if a.constructive {
                let d = constructive_decomposition(&ctx, &r, a.family.into(), cli.seed)?;
                let residual = d.residual(&ctx)?;
                let summary = format!("{} terms, residual {residual}", d.len());
                return Ok((json!({ "decomposition": to_value(&d)?, "terms": d.len(), "residual": residual }), summary));
            }
            let report = minimal_search(&ctx, &r, a.family.into(), a.kmax, a.budget, cli.seed)?;
            let summary = match report.k {
                Some(k) => format!("k = {k} ({:?})", report.bound_kind),
                None => format!("no hit within k ≤ {}; constructive fallback with {:?} terms", a.kmax, report.fallback_k),
            };
            Ok((to_value(&report)?, summary))
        }
        Command::Fuzz(a) => match a.campaign.campaign() {
            Some(c) => {
                let s = run_campaign::<S>(c, a.trials, cli.seed)?;
                let summary = format!(
                    "{:?}: {} passed, {} failed, {} hypothesis unmet",
                    c, s.passed, s.failed, s.hypothesis_unmet
                );
                Ok((to_value(&s)?, summary))
            }
            None => {
                let ctx = SpaceContext::<S>::euclidean(a.dim)?;
                let ctx = match cli.tolerance {
                    Some(t) => ctx.with_tolerance(t)?,
                    None => ctx,
                };
                let r = conjecture_campaign(&ctx, a.trials, a.kmax, a.budget, cli.seed)?;
                let summary = format!("{} trials, {} witnesses", r.trials, r.witnesses.len());
                Ok((to_value(&r)?, summary))
            }
        },
    }
}

/// Runs a parsed command: the output envelope and the stderr summary.
pub fn run(cli: &Cli) -> Result<(Value, String)> {
    let mut env = Env { cli, inputs: Inputs::default() };
    let (report, summary) = match cli.mode {
        ModeArg::Exact => execute::<Rational>(&mut env)?,
        ModeArg::Float64 => execute::<f64>(&mut env)?,
    };
    let manifest = RunManifest {
        subcommand: cli.command.name(),
        inputs: env.inputs.digests,
        seed: cli.seed,
        mode: cli.mode,
        tolerance: cli.tolerance,
        version: env!("CARGO_PKG_VERSION"),
        arguments: to_value(&cli.command)?,
    };
    Ok((json!({ "manifest": manifest, "report": report }), summary))
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_condition_unmet() {
        EXIT_CONDITION
    } else {
        EXIT_MALFORMED
    }
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok((out, summary)) => {
            let text = serde_json::to_string_pretty(&out).expect("reports serialize") + "\n";
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("curvtensor: cannot write the report: {e}");
                return EXIT_MALFORMED;
            }
            if !cli.quiet {
                eprintln!("{}: {summary} [{:.2?}]", cli.command.name(), start.elapsed());
            }
            EXIT_OK
        }
        Err(e) => {
            let out = json!({ "error": e.code(), "message": e.to_string() });
            println!("{}", serde_json::to_string_pretty(&out).expect("errors serialize"));
            if !cli.quiet {
                eprintln!("{}: {e}", cli.command.name());
            }
            exit_code(&e)
        }
    }
}
