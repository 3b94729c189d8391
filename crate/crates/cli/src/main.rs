use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use motivic_dtpt::dt::{
    compare_strategies, framed_partition_function, points_series, universal_series, verify_theorem, verify_universal_split,
    ChamberSeriesRequest, Geometry, Strategy, VerificationReport, Witness, DEFAULT_L_FLOOR,
};
use motivic_dtpt::roots::{chamber_split, roots_up_to_degree};
use motivic_dtpt::{Error, Partition, Quiver, Series, TruncationPolicy, Zeta};
use serde_json::{json, Value};

const THREADS_VAR: &str = "MOTIVIC_DTPT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "motivic-dtpt", version, about = "Motivic DT/PT generating functions for xy = z^N0 w^N1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a generating function.
    Compute(ComputeArgs),
    /// Check the factorization identities.
    Verify(VerifyArgs),
    /// Describe the quiver of a partition.
    Quiver(QuiverArgs),
    /// List the partitions of the trapezoid.
    Partitions(PartitionsArgs),
}

#[derive(Args, Debug)]
struct Target {
    /// Number of B labels.
    #[arg(long, default_value_t = 1)]
    n0: usize,
    /// Number of T labels.
    #[arg(long, default_value_t = 1)]
    n1: usize,
    /// Label string such as BTBB.
    #[arg(long, conflicts_with = "all_partitions")]
    partition: Option<String>,
    /// Run on every partition.
    #[arg(long)]
    all_partitions: bool,
}

#[derive(Args, Debug)]
struct Truncation {
    /// Framing rank.
    #[arg(short = 'r', default_value_t = 1)]
    r: u32,
    /// Truncation in powers of s.
    #[arg(long, default_value_t = 2)]
    max_s_degree: u32,
    /// Lowest power of L kept in infinite coefficients.
    #[arg(long, allow_hyphen_values = true)]
    l_floor: Option<i64>,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesKind {
    Pt,
    Dt,
    Custom,
    Points,
    Universal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Closed,
    Ratio,
    Both,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Closed => Strategy::Closed,
            StrategyArg::Ratio => Strategy::Ratio,
            StrategyArg::Both => Strategy::Both,
        }
    }
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    truncation: Truncation,
    #[command(flatten)]
    output: Output,
    #[arg(long, value_enum, default_value_t = SeriesKind::Pt)]
    series: SeriesKind,
    /// Stability parameter for `--series custom`, as "q+e*eps,...".
    #[arg(long, allow_hyphen_values = true)]
    custom_zeta: Option<String>,
    /// Specialize L^(1/2) to 1.
    #[arg(long)]
    euler: bool,
    #[arg(long, value_enum, default_value_t = StrategyArg::Closed)]
    strategy: StrategyArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    target: Target,
    #[command(flatten)]
    truncation: Truncation,
    #[command(flatten)]
    output: Output,
    /// Also check the universal split and strategy agreement in this chamber.
    #[arg(long, allow_hyphen_values = true)]
    custom_zeta: Option<String>,
}

#[derive(Args, Debug)]
struct QuiverArgs {
    #[command(flatten)]
    target: Target,
    /// Framing rank.
    #[arg(short = 'r', default_value_t = 1)]
    r: u32,
    /// Emit Graphviz instead of JSON.
    #[arg(long)]
    dot: bool,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args, Debug)]
struct PartitionsArgs {
    #[arg(long, default_value_t = 1)]
    n0: usize,
    #[arg(long, default_value_t = 1)]
    n1: usize,
    #[command(flatten)]
    output: Output,
}

/// Machine-readable failure printed on exit code 2.
#[derive(Debug)]
struct Failure {
    module: &'static str,
    code: &'static str,
    message: String,
}

impl Failure {
    fn config(code: &'static str, message: impl Into<String>) -> Self {
        Self { module: "cli", code, message: message.into() }
    }

    fn to_json(&self) -> Value {
        json!({ "module": self.module, "code": self.code, "message": self.message })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { module: e.module(), code: e.code(), message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Rendered output plus whether every check passed.
struct Outcome {
    body: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Failure::config("Usage", e.render().to_string().trim_end())),
    };
    match configure_threads().and_then(|_| run(&cli.command)) {
        Ok(outcome) => {
            if let Err(f) = emit(&cli.command, &outcome.body) {
                return fail(&f);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => fail(&f),
    }
}

fn fail(f: &Failure) -> ExitCode {
    let _ = writeln!(std::io::stderr(), "{}", f.to_json());
    ExitCode::from(2)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::config("BadThreads", format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::config("BadThreads", e.to_string()))
}

fn emit(command: &Command, body: &str) -> CliResult<()> {
    let path = match command {
        Command::Compute(a) => &a.output.output,
        Command::Verify(a) => &a.output.output,
        Command::Quiver(a) => &a.output,
        Command::Partitions(a) => &a.output.output,
    };
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Failure::config("Io", format!("{p}: {e}"))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| Failure::config("Io", e.to_string())),
    }
}

fn run(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Compute(a) => run_compute(a).map(|body| Outcome { body, pass: true }),
        Command::Verify(a) => run_verify(a),
        Command::Quiver(a) => run_quiver(a).map(|body| Outcome { body, pass: true }),
        Command::Partitions(a) => run_partitions(a).map(|body| Outcome { body, pass: true }),
    }
}

fn partitions(target: &Target) -> CliResult<Vec<Partition>> {
    match &target.partition {
        Some(labels) => Ok(vec![Partition::parse(target.n0, target.n1, labels)?]),
        None => Ok(Partition::enumerate(target.n0, target.n1)?),
    }
}

fn policy(t: &Truncation, n: usize) -> TruncationPolicy {
    let p = TruncationPolicy::new(n as u32 * t.max_s_degree);
    match t.l_floor {
        Some(f) => p.with_l_floor(f),
        None => p,
    }
}

fn parse_zeta(raw: &str, n: usize) -> CliResult<Zeta> {
    let zeta = Zeta::parse(raw)?;
    if zeta.len() != n {
        return Err(Error::ZetaLength { expected: n, found: zeta.len() }.into());
    }
    Ok(zeta)
}

fn require_generic(zeta: &Zeta, n: usize, policy: TruncationPolicy) -> CliResult<()> {
    chamber_split(&roots_up_to_degree(n, policy.max_total_degree), zeta)?.require_generic()?;
    Ok(())
}

fn single_or_list(mut items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Value::Array(items)
    }
}

fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn series_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::Pt => "pt",
        SeriesKind::Dt => "dt",
        SeriesKind::Custom => "custom",
        SeriesKind::Points => "points",
        SeriesKind::Universal => "universal",
    }
}

fn run_compute(a: &ComputeArgs) -> CliResult<String> {
    if a.series == SeriesKind::Custom && a.custom_zeta.is_none() {
        return Err(Failure::config("MissingZeta", "--series custom needs --custom-zeta"));
    }
    if a.series != SeriesKind::Custom && a.custom_zeta.is_some() {
        return Err(Failure::config("ConflictingOptions", "--custom-zeta needs --series custom"));
    }
    let t = &a.truncation;
    let mut header = json!({
        "series": series_name(a.series),
        "r": t.r,
        "maxSDegree": t.max_s_degree,
        "lFloor": t.l_floor,
    });

    if a.series == SeriesKind::Points {
        let n = a.target.n0 + a.target.n1;
        let policy = TruncationPolicy { max_total_degree: t.max_s_degree, l_floor: t.l_floor };
        let series: Series = points_series(Geometry::Resolution(n), t.r, policy);
        header["n0"] = json!(a.target.n0);
        header["n1"] = json!(a.target.n1);
        return render_series(a, vec![(header, series)]);
    }

    let mut results = Vec::new();
    for p in partitions(&a.target)? {
        let n = p.n();
        let policy = policy(t, n);
        let series: Series = match a.series {
            SeriesKind::Pt | SeriesKind::Dt => {
                let req = match a.series {
                    SeriesKind::Pt => ChamberSeriesRequest::<num_rational::BigRational>::pt(&p, t.r, policy),
                    _ => ChamberSeriesRequest::dt(&p, t.r, policy),
                };
                framed_partition_function(&req.with_strategy(a.strategy.into()))?
            }
            SeriesKind::Custom => {
                let zeta = parse_zeta(a.custom_zeta.as_deref().unwrap_or_default(), n)?;
                require_generic(&zeta, n, policy)?;
                let req = ChamberSeriesRequest { partition: p.clone(), r: t.r, zeta, policy, strategy: a.strategy.into() };
                framed_partition_function(&req)?
            }
            SeriesKind::Universal => universal_series(&Quiver::build(&p, t.r), policy)?,
            SeriesKind::Points => unreachable!("handled above"),
        };
        let mut h = header.clone();
        h["partition"] = json!(p.to_string());
        h["strategy"] = json!(format!("{:?}", a.strategy).to_lowercase());
        if let Some(z) = &a.custom_zeta {
            h["zeta"] = json!(z);
        }
        results.push((h, series));
    }
    render_series(a, results)
}

fn render_series(a: &ComputeArgs, results: Vec<(Value, Series)>) -> CliResult<String> {
    match a.output.format {
        Format::Json => {
            let mut items = Vec::new();
            for (mut h, series) in results {
                let st = series.to_st();
                h["result"] = if a.euler { st.euler_json()? } else { st.to_json() };
                items.push(h);
            }
            Ok(to_json_text(&single_or_list(items)))
        }
        Format::Text => {
            let mut out = String::new();
            for (h, series) in results {
                let st = series.to_st();
                out.push_str(&format!("# {h}\n"));
                out.push_str(&if a.euler { st.euler_text()? } else { st.to_text() });
            }
            Ok(out)
        }
    }
}

fn strategy_report(req: &ChamberSeriesRequest<num_rational::BigRational>, chamber: &str) -> CliResult<VerificationReport> {
    let cmp = compare_strategies::<num_bigint::BigInt, _>(req)?;
    let params = json!({
        "partition": req.partition.to_string(),
        "r": req.r,
        "chamber": chamber,
        "maxTotalDegree": req.policy.max_total_degree,
        "lFloor": req.policy.l_floor,
    });
    Ok(VerificationReport {
        identity: "strategy-agreement".into(),
        params,
        pass: cmp.witness.is_none(),
        compared: cmp.compared,
        witness: cmp.witness.map(|(m, closed, ratio)| Witness {
            monomial: m.dims.iter().map(|&d| d as i64).chain([m.framing as i64]).collect(),
            lhs: closed.to_string(),
            rhs: ratio.to_string(),
        }),
    })
}

fn run_verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let t = &a.truncation;
    let parts = partitions(&a.target)?;
    let n = a.target.n0 + a.target.n1;
    let zeta = match &a.custom_zeta {
        Some(raw) => {
            let zeta = parse_zeta(raw, n)?;
            require_generic(&zeta, n, policy(t, n))?;
            Some(zeta)
        }
        None => None,
    };

    let mut reports = Vec::new();
    for p in &parts {
        let exact = policy(t, n);
        let floored = exact.with_l_floor(t.l_floor.unwrap_or(DEFAULT_L_FLOOR));
        reports.extend(verify_theorem::<num_bigint::BigInt>(p, t.r, exact)?);
        let mut chambers = vec![
            ("pt".to_string(), Zeta::pt(n)),
            ("dt".to_string(), Zeta::dt(n)),
        ];
        if let (Some(z), Some(raw)) = (&zeta, &a.custom_zeta) {
            chambers.push((raw.clone(), z.clone()));
            reports.push(verify_universal_split::<num_bigint::BigInt, _>(&Quiver::build(p, t.r), z, floored)?);
        }
        for (name, z) in chambers {
            let req = ChamberSeriesRequest { partition: p.clone(), r: t.r, zeta: z, policy: floored, strategy: Strategy::Both };
            reports.push(strategy_report(&req, &name)?);
        }
    }

    let pass = reports.iter().all(|r| r.pass);
    let body = match a.output.format {
        Format::Json => to_json_text(&Value::Array(reports.iter().map(VerificationReport::to_json).collect())),
        Format::Text => reports.iter().map(report_line).collect(),
    };
    Ok(Outcome { body, pass })
}

fn report_line(r: &VerificationReport) -> String {
    let status = if r.pass { "PASS" } else { "FAIL" };
    let mut line = format!("{status} {} {} compared={}", r.identity, r.params, r.compared);
    if let Some(w) = &r.witness {
        line.push_str(&format!(" witness={:?} lhs={} rhs={}", w.monomial, w.lhs, w.rhs));
    }
    line.push('\n');
    line
}

fn run_quiver(a: &QuiverArgs) -> CliResult<String> {
    let quivers: Vec<Quiver> = partitions(&a.target)?.iter().map(|p| Quiver::build(p, a.r)).collect();
    if a.dot {
        Ok(quivers.iter().map(Quiver::to_dot).collect())
    } else {
        Ok(to_json_text(&single_or_list(quivers.iter().map(Quiver::to_json).collect())))
    }
}

fn run_partitions(a: &PartitionsArgs) -> CliResult<String> {
    let parts = Partition::enumerate(a.n0, a.n1)?;
    Ok(match a.output.format {
        Format::Json => to_json_text(&json!({
            "n0": a.n0,
            "n1": a.n1,
            "partitions": parts.iter().map(Partition::label_string).collect::<Vec<_>>(),
        })),
        Format::Text => parts.iter().map(|p| format!("{}\n", p.label_string())).collect(),
    })
}
