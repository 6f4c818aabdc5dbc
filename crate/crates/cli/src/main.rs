use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maassp_core::cm::{aj_values, evaluate_maass_at_cm, CmEmbedding, CmPoint};
use maassp_core::coleman::{self, solve_primitive};
use maassp_core::derham::{self, DrSection};
use maassp_core::exec::ExecMode;
use maassp_core::maass::{delta_iter, graded_decompose, graded_decompose_nr};
use maassp_core::matrix::Mat2;
use maassp_core::nearly_rigid::{GradedForm, NrFunction};
use maassp_core::padic::{PadicContext, PadicScalar, UpperHalfPoint};
use maassp_core::poly::UniPoly;
use maassp_core::quaternion::HashimotoAlgebra;
use maassp_core::suites::{run_suite, SuiteConfig, SUITES};
use maassp_core::tree::cocycle::{check_invariant, connecting_eps, harmonic_check, Cochain1};
use maassp_core::tree::residue::{residue_map_i, RationalFunction};
use maassp_core::tree::{BruhatTits, Reduction, TreeEdge};
use maassp_core::Error;
use rand::Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "maassp", version, about = "Exact p-adic Shimura-Maass calculus")]
struct Cli {
    /// Residue characteristic
    #[arg(long, global = true, default_value_t = 5)]
    p: u64,
    /// Absolute p-adic precision
    #[arg(long, global = true, default_value_t = 20)]
    prec: i64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write JSON here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shimura-Maass operators on nearly rigid functions
    #[command(subcommand)]
    Maass(MaassCmd),
    /// Θ = Ψ ∘ KS⁻¹ ∘ ∇ on a de Rham section or a weighted function
    Theta(ThetaArgs),
    /// Write a depth-r form of weight k + 2r as Σ δ^j(h_j); --weight is k
    Decompose(WeightedForm),
    /// Coleman primitives of f(z) dz ⊗ dτ^n
    #[command(subcommand)]
    Coleman(ColemanCmd),
    /// The Bruhat-Tits tree
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Harmonic cocycles, the connecting map and residues
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Quaternion algebra constants and the symplectic checks
    Quat(QuatArgs),
    /// CM points and evaluations there
    #[command(subcommand)]
    Cm(CmCmd),
    /// Run a named verification suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct WeightedForm {
    /// NrFunction JSON (file path or inline)
    #[arg(long)]
    form: String,
    #[arg(long)]
    weight: i64,
}

#[derive(Subcommand)]
enum MaassCmd {
    /// δ_k^j(f), optionally evaluated at a point
    Apply {
        #[command(flatten)]
        form: WeightedForm,
        #[arg(long, default_value_t = 1)]
        iterate: usize,
        /// Scalar JSON {"v", "a", "b"} for the evaluation point
        #[arg(long)]
        at: Option<String>,
    },
}

#[derive(Args)]
struct ThetaArgs {
    /// DrSection JSON, or NrFunction JSON together with --weight
    #[arg(long)]
    form: String,
    #[arg(long)]
    weight: Option<i64>,
    #[arg(long, default_value_t = 1)]
    iterate: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdentitySuite {
    /// Θ(G_j) = j G_(j-1) and Θ^(j+1)(G_j) = j! ω_f
    #[value(alias = "thm61")]
    Theta,
    /// δ^(n-j)(H_n) = (n!/j!) H_j
    #[value(alias = "cor96")]
    Recurrence,
}

#[derive(Subcommand)]
enum ColemanCmd {
    Solve {
        #[arg(long)]
        n: i64,
        /// Coefficient array of f, lowest degree first
        #[arg(long)]
        f: String,
    },
    Verify {
        #[arg(long, value_enum)]
        suite: IdentitySuite,
        #[arg(long)]
        n: i64,
        /// Defaults to a random polynomial drawn from --seed
        #[arg(long)]
        f: Option<String>,
    },
}

#[derive(Subcommand)]
enum TreeCmd {
    Neighbors {
        /// Vertex JSON {"m", "b"}
        #[arg(long)]
        vertex: String,
    },
    Path {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The vertex nearest to a point of the upper half plane
    Reduce {
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand)]
enum CocycleCmd {
    /// Harmonicity, and Γ-invariance when generators are given
    Check {
        #[arg(long)]
        cochain: String,
        #[arg(long)]
        matrix: Vec<String>,
    },
    /// The class of the cochain in H¹(Γ, V_n)
    Eps {
        #[arg(long)]
        cochain: String,
        #[arg(long, required = true)]
        matrix: Vec<String>,
        #[arg(long)]
        base: Option<String>,
    },
    /// The residue cochain I(f) on the edges of a ball
    Residues {
        #[arg(long)]
        function: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        radius: u64,
        #[arg(long)]
        center: Option<String>,
    },
}

#[derive(Args)]
struct QuatArgs {
    #[arg(long, default_value_t = 2)]
    nminus: u64,
    #[arg(long, default_value_t = 1)]
    nplus: u64,
    #[arg(long, default_value_t = 500)]
    bound: u64,
}

#[derive(Subcommand)]
enum CmCmd {
    FixedPoint {
        #[arg(long)]
        matrix: String,
    },
    /// δ_k^j(f) at the CM point of the matrix
    Eval {
        #[command(flatten)]
        form: WeightedForm,
        #[arg(long, default_value_t = 0)]
        iterate: usize,
        #[arg(long)]
        matrix: String,
    },
    /// H_j and δ^(n-j)(H_n) at the CM point
    AjTable {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        f: String,
        #[arg(long)]
        matrix: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or "all"
    #[arg(long)]
    suite: String,
    /// Run assertions on one thread
    #[arg(long)]
    sequential: bool,
}

/// Outcome of a subcommand: the JSON document and whether every check passed.
struct Output {
    doc: Value,
    ok: bool,
}

impl From<Value> for Output {
    fn from(doc: Value) -> Self {
        Output { doc, ok: true }
    }
}

enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. }
            | Error::UnknownSuite(_)
            | Error::InvalidContext(_)
            | Error::InvalidMonomial(_)
            | Error::NotAdjacent(_)
            | Error::OddDegree(_)
            | Error::IndexOutOfRange { .. }
            | Error::PointOnBoundary
            | Error::SingularMatrix
            | Error::NotAnEmbedding(_)
            | Error::RootInQp => Failure::Input(msg),
            _ => Failure::Compute(msg),
        }
    }
}

type CmdResult = Result<Output, Failure>;

/// Inline JSON when the argument looks like JSON, otherwise a file path.
fn read_json(arg: &str, what: &str) -> Result<Value, Failure> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') || t.starts_with('"') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{what}: cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{what}: line {}, column {}: {e}", e.line(), e.column())))
}

fn ctx(cli: &Cli) -> Result<PadicContext, Failure> {
    Ok(PadicContext::new(cli.p, cli.prec)?)
}

fn nr_function(arg: &str) -> Result<NrFunction, Failure> {
    Ok(NrFunction::from_json(&read_json(arg, "form")?, "form")?)
}

fn poly(arg: &str) -> Result<UniPoly, Failure> {
    Ok(UniPoly::from_json(&read_json(arg, "f")?, "f")?)
}

fn cm_point(cli: &Cli, matrix: &str) -> Result<CmPoint, Failure> {
    let c = ctx(cli)?;
    let e = CmEmbedding::new(Mat2::parse(matrix)?, cli.p)?;
    Ok(CmPoint::fixed_point(&e, &c)?)
}

fn maass(cli: &Cli, cmd: &MaassCmd) -> CmdResult {
    let MaassCmd::Apply { form, iterate, at } = cmd;
    let f = nr_function(&form.form)?;
    let g = delta_iter(&f, form.weight, *iterate);
    match at {
        None => Ok(g.to_json().into()),
        Some(z) => {
            let c = ctx(cli)?;
            let z = PadicScalar::from_json(&c, &read_json(z, "at")?, "at")?;
            let z = UpperHalfPoint::new(z)?;
            Ok(g.evaluate(&z, None)?.to_json().into())
        }
    }
}

fn theta(args: &ThetaArgs) -> CmdResult {
    let v = read_json(&args.form, "form")?;
    let s = if v.get("basis").is_some() || v.get("coeffs").is_some() {
        DrSection::from_json(&v, "form")?
    } else {
        let k = args
            .weight
            .ok_or_else(|| Failure::Input("--weight is required for a function input".into()))?;
        DrSection::pure(NrFunction::from_json(&v, "form")?, k)
    };
    Ok(derham::theta_iter(&s, args.iterate)?.to_json().into())
}

fn decompose(args: &WeightedForm) -> CmdResult {
    let v = read_json(&args.form, "form")?;
    let hs = if v.get("parts").is_some() {
        graded_decompose(&GradedForm::from_json(&v, "form")?, args.weight)?
    } else {
        graded_decompose_nr(&NrFunction::from_json(&v, "form")?, args.weight)?
    };
    let r = hs.len().saturating_sub(1) as i64;
    let parts: Vec<Value> = hs
        .iter()
        .enumerate()
        .map(|(j, h)| json!({"j": j, "weight": args.weight + 2 * (r - j as i64), "h": h.to_json()}))
        .collect();
    Ok(json!({"k": args.weight, "weight": args.weight + 2 * r, "parts": parts}).into())
}

fn coleman_cmd(cli: &Cli, cmd: &ColemanCmd) -> CmdResult {
    match cmd {
        ColemanCmd::Solve { n, f } => Ok(solve_primitive(&poly(f)?, *n)?.to_json().into()),
        ColemanCmd::Verify { suite, n, f } => {
            let f = match f {
                Some(f) => poly(f)?,
                None => {
                    let mut rng = maassp_core::sample::rng_for(cli.seed, 0);
                    let deg = rng.gen_range(0..=6);
                    maassp_core::sample::poly(&mut rng, deg)
                }
            };
            let sol = solve_primitive(&f, *n)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for j in n / 2..=*n {
                let row = match suite {
                    IdentitySuite::Theta => {
                        let step = if j >= 1 { coleman::check_theta_step(&sol, j).err() } else { None };
                        let top = coleman::check_theta_top(&sol, j);
                        let passed = step.is_none() && top.is_ok();
                        json!({
                            "j": j,
                            "passed": passed,
                            "tp_exponent": top.as_ref().ok(),
                            "error": step.map(|e| e.to_string()).or(top.err().map(|e| e.to_string())),
                        })
                    }
                    IdentitySuite::Recurrence => match coleman::verify_h_recurrence(&sol, j) {
                        Ok(r) => json!({"j": j, "passed": true, "factor": r.factor.to_string()}),
                        Err(e) => json!({"j": j, "passed": false, "error": e.to_string()}),
                    },
                };
                ok &= row["passed"] == json!(true);
                rows.push(row);
            }
            Ok(Output { doc: json!({"n": n, "f": f.to_json(), "passed": ok, "rows": rows}), ok })
        }
    }
}

fn tree_cmd(cli: &Cli, cmd: &TreeCmd) -> CmdResult {
    let t = BruhatTits::new(cli.p)?;
    let vertex = |arg: &str, what: &str| -> Result<_, Failure> { Ok(t.vertex_from_json(&read_json(arg, what)?, what)?) };
    match cmd {
        TreeCmd::Neighbors { vertex: v } => {
            let v = vertex(v, "vertex")?;
            let nb: Vec<Value> = t.neighbors(&v).iter().map(|w| w.to_json()).collect();
            Ok(json!({"vertex": v.to_json(), "neighbors": nb}).into())
        }
        TreeCmd::Path { from, to } => {
            let (a, b) = (vertex(from, "from")?, vertex(to, "to")?);
            let path: Vec<Value> = t.path(&a, &b).iter().map(|w| w.to_json()).collect();
            Ok(json!({"distance": t.distance(&a, &b), "path": path}).into())
        }
        TreeCmd::Reduce { point } => {
            let c = ctx(cli)?;
            let z = UpperHalfPoint::new(PadicScalar::from_json(&c, &read_json(point, "point")?, "point")?)?;
            Ok(match t.reduce_point(&z)? {
                Reduction::Vertex(v) => json!({"vertex": v.to_json()}),
                Reduction::Edge(e) => json!({"edge": e.to_json()}),
            }
            .into())
        }
    }
}

fn matrices(args: &[String]) -> Result<Vec<Mat2>, Failure> {
    args.iter().map(|m| Mat2::parse(m).map_err(Failure::from)).collect()
}

fn cocycle_cmd(cli: &Cli, cmd: &CocycleCmd) -> CmdResult {
    let t = BruhatTits::new(cli.p)?;
    let cochain = |arg: &str| -> Result<Cochain1, Failure> { Ok(Cochain1::from_json(&t, &read_json(arg, "cochain")?, "cochain")?) };
    match cmd {
        CocycleCmd::Check { cochain: c, matrix } => {
            let c = cochain(c)?;
            let h = harmonic_check(&t, &c);
            let edges = |es: &[TreeEdge]| es.iter().map(TreeEdge::to_json).collect::<Vec<_>>();
            let invariance = if matrix.is_empty() {
                Value::Null
            } else {
                match check_invariant(&t, &c, &matrices(matrix)?) {
                    Ok(n) => json!({"invariant": true, "checked": n}),
                    Err(e) => json!({"invariant": false, "error": e.to_string()}),
                }
            };
            let ok = h.is_harmonic() && invariance.get("invariant").is_none_or(|v| v == &json!(true));
            let doc = json!({
                "harmonic": h.is_harmonic(),
                "interior_vertices": h.interior_vertices,
                "missing_reversals": edges(&h.missing_reversals),
                "non_alternating": edges(&h.non_alternating),
                "bad_vertices": h.bad_vertices.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
                "invariance": invariance,
            });
            Ok(Output { doc, ok })
        }
        CocycleCmd::Eps { cochain: c, matrix, base } => {
            let c = cochain(c)?;
            let base = match base {
                Some(b) => t.vertex_from_json(&read_json(b, "base")?, "base")?,
                None => t.base(),
            };
            Ok(connecting_eps(&t, &c, &matrices(matrix)?, &base)?.to_json().into())
        }
        CocycleCmd::Residues { function, n, radius, center } => {
            let f = RationalFunction::from_json(&read_json(function, "function")?, "function")?;
            let center = match center {
                Some(v) => t.vertex_from_json(&read_json(v, "center")?, "center")?,
                None => t.base(),
            };
            let ball = t.ball(&center, *radius);
            let edges: Vec<TreeEdge> =
                ball.iter().flat_map(|v| t.out_edges(v)).filter(|e| ball.contains(&e.target)).collect();
            Ok(residue_map_i(&t, &f, *n, &edges).to_json().into())
        }
    }
}

fn quat(cli: &Cli, args: &QuatArgs) -> CmdResult {
    let b = HashimotoAlgebra::search(cli.p, args.nminus, args.nplus, args.bound)?;
    Ok(b.report(args.bound as i64).into())
}

fn cm_cmd(cli: &Cli, cmd: &CmCmd) -> CmdResult {
    match cmd {
        CmCmd::FixedPoint { matrix } => Ok(cm_point(cli, matrix)?.to_json().into()),
        CmCmd::Eval { form, iterate, matrix } => {
            let pt = cm_point(cli, matrix)?;
            let f = nr_function(&form.form)?;
            let v = evaluate_maass_at_cm(&f, form.weight, *iterate, &pt, None)?;
            Ok(json!({"point": pt.z0.z().to_json(), "weight": form.weight, "iterate": iterate, "value": v.to_json()}).into())
        }
        CmCmd::AjTable { n, f, matrix } => {
            let pt = cm_point(cli, matrix)?;
            let sol = solve_primitive(&poly(f)?, *n)?;
            let rows = aj_values(&sol, &pt, None)?;
            let ok = rows.iter().all(|r| r.consistent);
            let doc = json!({"point": pt.to_json(), "n": n, "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>()});
            Ok(Output { doc, ok })
        }
    }
}

fn verify(cli: &Cli, args: &VerifyArgs) -> CmdResult {
    let mode = if args.sequential { ExecMode::Sequential } else { ExecMode::default() };
    let cfg = SuiteConfig { p: cli.p, prec: cli.prec, seed: cli.seed, mode };
    if args.suite == "all" {
        let mut reports = Vec::new();
        let mut ok = true;
        for s in SUITES {
            let r = run_suite(s, &cfg)?;
            ok &= r.passed;
            reports.push(r.to_json());
        }
        return Ok(Output { doc: json!({"passed": ok, "suites": reports}), ok });
    }
    let r = run_suite(&args.suite, &cfg)?;
    Ok(Output { ok: r.passed, doc: r.to_json() })
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.cmd {
        Cmd::Maass(c) => maass(cli, c),
        Cmd::Theta(a) => theta(a),
        Cmd::Decompose(a) => decompose(a),
        Cmd::Coleman(c) => coleman_cmd(cli, c),
        Cmd::Tree(c) => tree_cmd(cli, c),
        Cmd::Cocycle(c) => cocycle_cmd(cli, c),
        Cmd::Quat(a) => quat(cli, a),
        Cmd::Cm(c) => cm_cmd(cli, c),
        Cmd::Verify(a) => verify(cli, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MAASSP_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.doc).expect("JSON serializes") + "\n";
            let written = match &cli.out {
                Some(path) => fs::write(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
