//! `tsylv gen | transform | solve | verify`.
//!
//! Reports are `key: value` lines with matrices as `matrix <name> <r> <c>`
//! blocks (the instance file syntax); `--json` emits one JSON document
//! instead. Exit codes: 0 success, 1 verification failure, 2 hypothesis
//! violation or refused route, 3 I/O or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::generate::{generate, GenOptions};
use crate::instance_file::{format_value, read_instance, render_matrix, InstanceFile};
use crate::matrix::DenseMatrix;
use crate::solvers::{assemble_vec_system, solve_direct, solve_transformed, SolveReport, DEFAULT_SOLVE_TOL};
use crate::transforms::{
    g_diagnostic, transform_over_canonical, transform_square_oozawa, transform_square_under, transform_under_canonical,
    EquivalentForm, ProblemInstance, TransformOptions, DEFAULT_HYPOTHESIS_TOL,
};
use crate::verify::verify_batch;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Sizes checked by `verify` when `--size` is absent.
pub const DEFAULT_VERIFY_SIZES: [(usize, usize); 3] = [(4, 3), (3, 4), (3, 3)];

#[derive(Debug, Parser)]
#[command(name = "tsylv", version, about = "Transform, solve and cross-check AX + X^T B = C")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Print the equivalent equation(s) for an instance.
    Transform(TransformArgs),
    /// Solve an instance by the chosen route.
    Solve(SolveArgs),
    /// Check transformed routes against the stacked-system oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Direct,
    Over,
    Under,
    Oozawa,
    CorUnder,
    Auto,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Over => "over",
            Self::Under => "under",
            Self::Oozawa => "oozawa",
            Self::CorUnder => "cor-under",
            Self::Auto => "auto",
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Relative tolerance for residual consistency and route agreement.
    #[arg(long, default_value_t = DEFAULT_SOLVE_TOL)]
    pub tol: f64,
    /// Relative tolerance for the hypotheses B^T = S A and A D = I.
    #[arg(long, default_value_t = DEFAULT_HYPOTHESIS_TOL)]
    pub hyp_tol: f64,
    /// Emit a single JSON document.
    #[arg(long)]
    pub json: bool,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, num_args = 2, value_names = ["M", "N"], required = true)]
    pub size: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Plant a solution: C = A X0 + X0^T B.
    #[arg(long)]
    pub solvable: bool,
    /// Rescale B so an eigenvalue product of S lands within DELTA of 1.
    #[arg(long, value_name = "DELTA")]
    pub near_reciprocal: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Also print the intermediate unknown of the lifted square route.
    #[arg(long)]
    pub verbose: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    pub size: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse { .. } => EXIT_IO,
        _ => EXIT_HYPOTHESIS,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_HYPOTHESIS } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(&a, stdout, stderr),
        Command::Transform(a) => cmd_transform(&a, stdout, stderr),
        Command::Solve(a) => cmd_solve(&a, stdout, stderr),
        Command::Verify(a) => cmd_verify(&a, stdout, stderr),
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let res = match out {
        Some(p) => std::fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_IO
        }
    }
}

fn size_pair(v: &[usize], stderr: &mut dyn Write) -> Option<(usize, usize)> {
    match v {
        [m, n] if *m >= 1 && *n >= 1 => Some((*m, *n)),
        _ => {
            let _ = writeln!(stderr, "error: --size needs two positive integers");
            None
        }
    }
}

fn load(path: &Path, stderr: &mut dyn Write) -> Result<ProblemInstance, i32> {
    read_instance(path).map_err(|e| {
        let _ = writeln!(stderr, "error: {}: {e}", path.display());
        exit_code_for(&e)
    })
}

pub fn cmd_gen(args: &GenArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let Some((m, n)) = size_pair(&args.size, stderr) else {
        return EXIT_HYPOTHESIS;
    };
    let opts = GenOptions::new(m, n, args.seed)
        .solvable(args.solvable)
        .near_reciprocal(args.near_reciprocal);
    let g = match generate(&opts) {
        Ok(g) => g,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code_for(&e);
        }
    };
    let mut file = InstanceFile::from_instance(&g.instance);
    if let Some(x0) = g.x0 {
        file.push("X0", x0);
    }
    let mut text = format!("# tsylv instance m={m} n={n} seed={}", args.seed);
    if args.solvable {
        text.push_str(" solvable");
    }
    if let Some(d) = args.near_reciprocal {
        text.push_str(&format!(" near-reciprocal={}", format_value(d)));
    }
    text.push('\n');
    text.push_str(&file.render());
    emit(&text, args.out.as_deref(), stdout, stderr)
}

fn transform_by(method: Method, inst: &ProblemInstance, opts: &TransformOptions) -> crate::Result<EquivalentForm> {
    match method {
        Method::Over => transform_over_canonical(inst, opts),
        Method::Under => transform_under_canonical(inst, opts),
        Method::Oozawa => transform_square_oozawa(inst, opts),
        Method::CorUnder => transform_square_under(inst, opts),
        Method::Direct | Method::Auto => unreachable!("resolved before dispatch"),
    }
}

/// Routes selected by `auto`: the shape-appropriate generalized Sylvester
/// form, or both Lyapunov forms for square instances.
fn auto_routes(inst: &ProblemInstance) -> Vec<Method> {
    match inst.m().cmp(&inst.n()) {
        std::cmp::Ordering::Greater => vec![Method::Over],
        std::cmp::Ordering::Less => vec![Method::Under],
        std::cmp::Ordering::Equal => vec![Method::Oozawa, Method::CorUnder],
    }
}

struct Section {
    lines: Vec<(String, String)>,
    matrices: Vec<(String, DenseMatrix)>,
    json: Value,
}

impl Section {
    fn new() -> Self {
        Self {
            lines: Vec::new(),
            matrices: Vec::new(),
            json: json!({}),
        }
    }

    fn kv(&mut self, key: &str, value: impl ToString, j: Value) {
        self.lines.push((key.to_owned(), value.to_string()));
        self.json[key] = j;
    }

    fn num(&mut self, key: &str, v: f64) {
        self.kv(key, format_value(v), json!(v));
    }

    fn mat(&mut self, name: &str, m: &DenseMatrix) {
        self.matrices.push((name.to_owned(), m.clone()));
        let rows: Vec<&[f64]> = (0..m.rows()).map(|i| m.row(i)).collect();
        self.json
            .as_object_mut()
            .expect("object")
            .entry("matrices")
            .or_insert_with(|| json!({}))[name] = json!(rows);
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            s.push_str(&format!("{k}: {v}\n"));
        }
        for (n, m) in &self.matrices {
            s.push_str(&render_matrix(n, m));
        }
        s
    }
}

fn refusal(section: &mut Section, e: &Error) {
    section.kv("status", "refused", json!("refused"));
    section.kv("error", e, json!(e.to_string()));
    if let Error::NotReciprocalFree(w) = e {
        section.kv("witness_i", w.i, json!(w.i));
        section.kv("witness_j", w.j, json!(w.j));
        section.kv("witness_lambda_i", w.lambda_i, json!([w.lambda_i.re, w.lambda_i.im]));
        section.kv("witness_lambda_j", w.lambda_j, json!([w.lambda_j.re, w.lambda_j.im]));
        section.num("witness_distance", w.distance);
    }
}

fn render_sections(sections: &[Section], as_json: bool, key: &str) -> String {
    if as_json {
        let arr: Vec<Value> = sections.iter().map(|s| s.json.clone()).collect();
        let mut s = serde_json::to_string_pretty(&json!({ key: arr })).expect("serializable");
        s.push('\n');
        s
    } else {
        sections.iter().map(Section::render).collect::<Vec<_>>().join("\n")
    }
}

pub fn cmd_transform(args: &TransformArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let inst = match load(&args.instance, stderr) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let opts = TransformOptions {
        hypothesis_tol: args.common.hyp_tol,
        reciprocal_tol: None,
    };
    let routes = match args.method {
        Method::Auto => auto_routes(&inst),
        other => vec![other],
    };

    let mut code = EXIT_OK;
    let mut sections = Vec::new();
    for route in routes {
        let mut sec = Section::new();
        sec.kv("route", route.name(), json!(route.name()));
        sec.kv("m", inst.m(), json!(inst.m()));
        sec.kv("n", inst.n(), json!(inst.n()));
        if route == Method::Direct {
            let (mat, _) = assemble_vec_system(&inst);
            let r = crate::matrix::rank(&mat, None);
            sec.kv("status", "ok", json!("ok"));
            sec.kv("kind", "STACKED_VEC", json!("STACKED_VEC"));
            sec.kv("system_rows", mat.rows(), json!(mat.rows()));
            sec.kv("system_cols", mat.cols(), json!(mat.cols()));
            sec.kv("system_rank", r, json!(r));
            sections.push(sec);
            continue;
        }
        match transform_by(route, &inst, &opts) {
            Ok(form) => {
                sec.kv("status", "ok", json!("ok"));
                sec.kv("kind", form.kind, json!(form.kind.as_str()));
                sec.num("margin", form.margin);
                sec.kv("reciprocal_free", true, json!(true));
                sec.kv("recovery", form.recovery.name(), json!(form.recovery.name()));
                match g_diagnostic(&form) {
                    Ok(g) => {
                        sec.kv("g_dim", g.dim, json!(g.dim));
                        sec.kv("g_nonsingular", g.nonsingular, json!(g.nonsingular));
                        sec.num("g_min_pivot", g.min_pivot);
                    }
                    Err(e) => sec.kv("g_error", &e, json!(e.to_string())),
                }
                sec.mat("S", &form.s_matrix);
                if let Some(d) = &form.d_matrix {
                    sec.mat("D", d);
                }
                sec.mat("RHS", &form.rhs);
            }
            Err(e) => {
                refusal(&mut sec, &e);
                code = code.max(exit_code_for(&e));
            }
        }
        sections.push(sec);
    }
    let text = render_sections(&sections, args.common.json, "routes");
    let emitted = emit(&text, args.common.out.as_deref(), stdout, stderr);
    if emitted != EXIT_OK {
        emitted
    } else {
        code
    }
}

fn report_section(r: &SolveReport, verbose: bool) -> Section {
    let mut sec = Section::new();
    sec.kv("method", r.method, json!(r.method.as_str()));
    sec.kv("status", "ok", json!("ok"));
    sec.num("residual", r.residual);
    sec.kv("system_rank", r.system_rank, json!(r.system_rank));
    sec.kv("unknowns", r.unknowns, json!(r.unknowns));
    sec.kv("consistent", r.consistent, json!(r.consistent));
    match r.margin {
        Some(mg) => sec.num("margin", mg),
        None => sec.kv("margin", "none", Value::Null),
    }
    sec.mat("X", &r.x);
    if verbose {
        if let Some(y) = &r.intermediate {
            sec.mat("Y", y);
        }
    }
    sec
}

pub fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let inst = match load(&args.instance, stderr) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let opts = TransformOptions {
        hypothesis_tol: args.common.hyp_tol,
        reciprocal_tol: None,
    };
    let method = match args.method {
        Method::Auto => auto_routes(&inst)[0],
        m => m,
    };
    let tol = args.common.tol;
    let result = if method == Method::Direct {
        Ok(solve_direct(&inst, tol))
    } else {
        transform_by(method, &inst, &opts).and_then(|f| solve_transformed(&f, tol))
    };
    let (sec, code) = match result {
        Ok(r) => (report_section(&r, args.verbose), EXIT_OK),
        Err(e) => {
            let mut sec = Section::new();
            sec.kv("method", method.name(), json!(method.name()));
            refusal(&mut sec, &e);
            (sec, exit_code_for(&e))
        }
    };
    let text = if args.common.json {
        let mut s = serde_json::to_string_pretty(&sec.json).expect("serializable");
        s.push('\n');
        s
    } else {
        sec.render()
    };
    let emitted = emit(&text, args.common.out.as_deref(), stdout, stderr);
    if emitted != EXIT_OK {
        emitted
    } else {
        code
    }
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let sizes = match &args.size {
        Some(v) => match size_pair(v, stderr) {
            Some(p) => vec![p],
            None => return EXIT_HYPOTHESIS,
        },
        None => DEFAULT_VERIFY_SIZES.to_vec(),
    };
    let summary = verify_batch(&sizes, args.count, args.seed, args.common.tol);
    let text = if args.common.json {
        let mut s = serde_json::to_string_pretty(&summary).expect("serializable");
        s.push('\n');
        s
    } else {
        let mut s = format!("seed: {}\ntol: {}\n", summary.seed, format_value(summary.tol));
        for r in &summary.regimes {
            s.push_str(&format!(
                "regime: {} size: {}x{} pass: {}/{} worst_residual: {} min_margin: {}\n",
                r.regime.as_str(),
                r.m,
                r.n,
                r.passed,
                r.count,
                format_value(r.worst_residual),
                format_value(r.min_margin),
            ));
            for f in &r.failures {
                s.push_str(&format!(
                    "  failure: index {} seed {}: {}\n",
                    f.index,
                    f.seed,
                    f.failure.as_deref().unwrap_or("unknown")
                ));
            }
        }
        s.push_str(&format!(
            "result: {}\n",
            if summary.all_passed() { "pass" } else { "fail" }
        ));
        s
    };
    let emitted = emit(&text, args.common.out.as_deref(), stdout, stderr);
    if emitted != EXIT_OK {
        emitted
    } else if summary.all_passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}
