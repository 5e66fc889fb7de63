//! `lightswitch`: command-line front end for `lightswitch-core`.
//!
//! Exit codes: 0 success, 1 I/O, parse or usage failure, 2 unsupported
//! shape or argument, 3 internal guarantee violated, 4 resource cap hit.

mod args;

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::Parser;
use serde_json::json;

use args::{AnySource, BoardSource, Cli, Command, CubeCommand, CubeSource, Format};
use lightswitch_core::cube::{
    self, case_classify, lemma4c_predicate, zprofile_feasible, zprofile_min, ExclusionList,
    SolveStage, ZProfile,
};
use lightswitch_core::io::{
    self, format_switch_script, parse_switch_script, random_switch_script, seeded_rng,
    ResultDocument, Stream, GENERATOR,
};
use lightswitch_core::oracle::rect_min_imbalance_with_cap;
use lightswitch_core::{
    balance, cube_min_imbalance, imbalance_cube, Error, SignCube, SignMatrix, VERSION,
};

/// Usage mistakes the argument parser cannot express.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Parse { .. }) => 1,
        Some(Error::Shape(_) | Error::Unsupported(_) | Error::Domain(_)) => 2,
        Some(Error::Invariant(_)) => 3,
        Some(Error::Resource { .. }) => 4,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Runs one command and returns everything destined for stdout.
fn run(cli: Cli) -> anyhow::Result<String> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let fmt = cli.format;
    match cli.command {
        Command::Balance {
            source,
            oracle,
            cap,
        } => cmd_balance(fmt, source, oracle, cap),
        Command::Oracle { source, cap } => cmd_oracle(fmt, source, cap),
        Command::Gen {
            rows,
            cols,
            side,
            seed,
        } => cmd_gen(fmt, rows.zip(cols), side, seed),
        Command::Cube(c) => match c {
            CubeCommand::Solve { source } => cmd_cube_solve(fmt, source),
            CubeCommand::Min { source } => cmd_cube_min(fmt, source),
            CubeCommand::VerifyP2 => cmd_verify_p2(fmt),
            CubeCommand::Lemma4a => cmd_layer_average(fmt),
            CubeCommand::Zchar => Ok(cmd_zchar(fmt)),
            CubeCommand::Prop3 {
                source,
                script,
                steps,
            } => cmd_prop3(fmt, source, script, steps),
        },
        Command::Bench {
            sizes,
            boards,
            seed,
        } => cmd_bench(fmt, &sizes, boards, seed),
    }
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn generated_board(m: usize, n: usize, seed: u64) -> anyhow::Result<SignMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Shape(format!("cannot generate a {m}x{n} board")).into());
    }
    Ok(io::random_board(m, n, seed))
}

fn generated_cube(side: usize, seed: u64) -> anyhow::Result<SignCube> {
    if side == 0 {
        return Err(Error::Shape("cannot generate a cube of side 0".into()).into());
    }
    Ok(io::random_cube(side, seed))
}

/// The board plus the seed it was generated from, if any.
fn load_board(src: &BoardSource) -> anyhow::Result<(SignMatrix, Option<u64>)> {
    match (&src.input, src.rows.zip(src.cols)) {
        (Some(path), _) => Ok((io::parse_board(&read_input(path)?)?, None)),
        (None, Some((m, n))) => {
            let seed = src.seed.unwrap_or(0);
            Ok((generated_board(m, n, seed)?, Some(seed)))
        }
        (None, None) => Err(usage("give a board with -i/--input or --rows/--cols")),
    }
}

fn load_cube(src: &CubeSource) -> anyhow::Result<(SignCube, Option<u64>)> {
    match &src.input {
        Some(path) => Ok((io::parse_cube(&read_input(path)?)?, None)),
        None => {
            let seed = src.seed.unwrap_or(0);
            Ok((generated_cube(src.side.unwrap_or(4), seed)?, Some(seed)))
        }
    }
}

enum Shape {
    Board(SignMatrix),
    Cube(SignCube),
}

fn load_any(src: &AnySource) -> anyhow::Result<(Shape, Option<u64>)> {
    let seed = src.seed.unwrap_or(0);
    if let Some(path) = &src.input {
        let text = read_input(path)?;
        let header_fields = text
            .lines()
            .next()
            .map_or(0, |l| l.split_whitespace().count());
        let shape = if header_fields == 1 {
            Shape::Cube(io::parse_cube(&text)?)
        } else {
            Shape::Board(io::parse_board(&text)?)
        };
        return Ok((shape, None));
    }
    match (src.rows.zip(src.cols), src.side) {
        (Some((m, n)), _) => Ok((Shape::Board(generated_board(m, n, seed)?), Some(seed))),
        (None, Some(side)) => Ok((Shape::Cube(generated_cube(side, seed)?), Some(seed))),
        (None, None) => Err(usage("give -i/--input, --rows/--cols or --side")),
    }
}

fn signs(v: &[i8]) -> String {
    v.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serializes");
    s.push('\n');
    s
}

fn doc_json(doc: &ResultDocument) -> String {
    let mut s = doc.to_json();
    s.push('\n');
    s
}

fn cmd_balance(fmt: Format, src: BoardSource, oracle: bool, cap: usize) -> anyhow::Result<String> {
    let (a, seed) = load_board(&src)?;
    let outcome = balance(&a)?;
    let oracle_min = if oracle {
        let r = rect_min_imbalance_with_cap(&a, cap)?;
        if r.minimum > outcome.imbalance {
            return Err(Error::Invariant(format!(
                "exhaustive minimum {} exceeds the constructed imbalance {}",
                r.minimum, outcome.imbalance
            ))
            .into());
        }
        Some(r.minimum)
    } else {
        None
    };
    let mut doc = ResultDocument::for_board(&a, &outcome).with_seed(seed);
    doc.oracle_min = oracle_min;
    if fmt == Format::Json {
        return Ok(doc_json(&doc));
    }
    let mut out = String::new();
    writeln!(out, "board      {}x{}", a.rows(), a.cols())?;
    writeln!(out, "x          {}", signs(outcome.switches.x()))?;
    writeln!(out, "y          {}", signs(outcome.switches.y()))?;
    writeln!(out, "signed sum {}", outcome.signed_sum)?;
    writeln!(out, "imbalance  {}", outcome.imbalance)?;
    if let Some(m) = oracle_min {
        writeln!(out, "oracle min {m}")?;
    }
    Ok(out)
}

fn cmd_oracle(fmt: Format, src: AnySource, cap: usize) -> anyhow::Result<String> {
    let (shape, seed) = load_any(&src)?;
    let (doc, states) = match &shape {
        Shape::Board(a) => {
            let r = rect_min_imbalance_with_cap(a, cap)?;
            let signed = lightswitch_core::imbalance_rect(a, &r.witness)?;
            let outcome = lightswitch_core::BalanceOutcome {
                switches: r.witness,
                signed_sum: signed,
                imbalance: r.minimum,
            };
            let mut doc = ResultDocument::for_board(a, &outcome);
            doc.oracle_min = Some(r.minimum);
            (doc, r.states_examined)
        }
        Shape::Cube(c) => {
            let free = 3 * c.side() - 1;
            if free > cap {
                return Err(Error::Resource {
                    what: format!("exhaustive search over a cube of side {}", c.side()),
                    required: free as u64,
                    cap: cap as u64,
                }
                .into());
            }
            let r = cube_min_imbalance(c)?;
            let after = lightswitch_core::apply_plane_switches(c, &r.witness)?;
            let mut doc = ResultDocument::for_cube(c, &r.witness, imbalance_cube(&after).0);
            doc.oracle_min = Some(r.minimum);
            (doc, r.states_examined)
        }
    };
    let doc = doc.with_seed(seed);
    if fmt == Format::Json {
        return Ok(doc_json(&doc));
    }
    let mut out = String::new();
    match &shape {
        Shape::Board(a) => {
            writeln!(out, "board      {}x{}", a.rows(), a.cols())?;
            writeln!(
                out,
                "x          {}",
                signs(doc.x.as_deref().unwrap_or_default())
            )?;
            writeln!(
                out,
                "y          {}",
                signs(doc.y.as_deref().unwrap_or_default())
            )?;
        }
        Shape::Cube(c) => write_cube_switches(&mut out, c.side(), &doc)?,
    }
    writeln!(out, "signed sum {}", doc.signed_sum)?;
    writeln!(out, "minimum    {}", doc.imbalance)?;
    writeln!(out, "states     {states}")?;
    Ok(out)
}

fn write_cube_switches(out: &mut String, side: usize, doc: &ResultDocument) -> std::fmt::Result {
    writeln!(out, "cube       side {side}")?;
    writeln!(
        out,
        "sx         {}",
        signs(doc.sx.as_deref().unwrap_or_default())
    )?;
    writeln!(
        out,
        "sy         {}",
        signs(doc.sy.as_deref().unwrap_or_default())
    )?;
    writeln!(
        out,
        "sz         {}",
        signs(doc.sz.as_deref().unwrap_or_default())
    )
}

fn cmd_gen(
    fmt: Format,
    dims: Option<(usize, usize)>,
    side: Option<usize>,
    seed: u64,
) -> anyhow::Result<String> {
    let (kind, text) = match (dims, side) {
        (Some((m, n)), _) => ("board", io::serialize_board(&generated_board(m, n, seed)?)),
        (None, Some(s)) => ("cube", io::serialize_cube(&generated_cube(s, seed)?)),
        (None, None) => return Err(usage("give --rows/--cols or --side")),
    };
    if fmt == Format::Json {
        return Ok(to_json(&json!({
            "kind": kind,
            "text": text,
            "generator": GENERATOR,
            "seed": seed,
            "version": VERSION,
        })));
    }
    Ok(text)
}

fn cmd_cube_solve(fmt: Format, src: CubeSource) -> anyhow::Result<String> {
    let (c, seed) = load_cube(&src)?;
    let sol = cube::solve_cube4(&c)?;
    let doc = ResultDocument::for_cube(&c, &sol.switches, sol.signed_sum).with_seed(seed);
    if fmt == Format::Json {
        return Ok(doc_json(&doc));
    }
    let mut out = String::new();
    write_cube_switches(&mut out, c.side(), &doc)?;
    writeln!(out, "signed sum {}", sol.signed_sum)?;
    writeln!(out, "imbalance  {}", sol.imbalance)?;
    let stage = match sol.stage {
        SolveStage::Greedy => "greedy",
        SolveStage::Exhaustive => "exhaustive",
    };
    writeln!(
        out,
        "stage      {stage} (sum of |Z| after x/y: {})",
        sol.z_abs_sum
    )?;
    Ok(out)
}

fn cmd_cube_min(fmt: Format, src: CubeSource) -> anyhow::Result<String> {
    let (c, seed) = load_cube(&src)?;
    let r = cube_min_imbalance(&c)?;
    let after = lightswitch_core::apply_plane_switches(&c, &r.witness)?;
    let mut doc = ResultDocument::for_cube(&c, &r.witness, imbalance_cube(&after).0);
    doc.oracle_min = Some(r.minimum);
    let doc = doc.with_seed(seed);
    if fmt == Format::Json {
        return Ok(doc_json(&doc));
    }
    let mut out = String::new();
    write_cube_switches(&mut out, c.side(), &doc)?;
    writeln!(out, "minimum    {}", r.minimum)?;
    writeln!(out, "states     {}", r.states_examined)?;
    Ok(out)
}

fn cmd_verify_p2(fmt: Format) -> anyhow::Result<String> {
    let p2 = cube::verify_p2()?;
    if fmt == Format::Json {
        return Ok(to_json(&json!({
            "p2": p2,
            "states": 256,
            "assignments_per_state": 64,
            "version": VERSION,
        })));
    }
    Ok(format!("{p2}\n"))
}

fn cmd_layer_average(fmt: Format) -> anyhow::Result<String> {
    let avg = cube::max_layer_average();
    if fmt == Format::Json {
        return Ok(to_json(&json!({
            "max_layer_average": avg.to_string(),
            "numer": avg.numer(),
            "denom": avg.denom(),
            "boards": 65536,
            "switch_patterns": 256,
            "version": VERSION,
        })));
    }
    Ok(format!(
        "max layer average {avg} = {}\n",
        *avg.numer() as f64 / *avg.denom() as f64
    ))
}

fn cmd_zchar(fmt: Format) -> String {
    struct Row {
        profile: [i64; 4],
        min: u64,
        feasible: bool,
        full: bool,
        reduced: bool,
        case: Option<u8>,
    }
    let rows: Vec<Row> = ZProfile::all()
        .map(|zp| Row {
            profile: zp.values(),
            min: zprofile_min(zp),
            feasible: zprofile_feasible(zp),
            full: lemma4c_predicate(zp, ExclusionList::Full),
            reduced: lemma4c_predicate(zp, ExclusionList::Reduced),
            case: case_classify(zp),
        })
        .collect();
    let feasible = rows.iter().filter(|r| r.feasible).count();
    let full_sound = rows.iter().all(|r| !r.full || r.feasible);
    let full_count = rows.iter().filter(|r| r.full).count();
    if fmt == Format::Json {
        let table: Vec<_> = rows
            .iter()
            .map(|r| {
                json!({
                    "profile": r.profile,
                    "min": r.min,
                    "feasible": r.feasible,
                    "predicate_full": r.full,
                    "predicate_reduced": r.reduced,
                    "case": r.case,
                })
            })
            .collect();
        return to_json(&json!({
            "profiles": table,
            "feasible": feasible,
            "predicate_full_count": full_count,
            "predicate_full_sound": full_sound,
            "version": VERSION,
        }));
    }
    let mut out = String::from("profile          min  feasible  full  reduced  case\n");
    for r in &rows {
        let [a, b, c, d] = r.profile;
        let case = r.case.map_or_else(|| "-".to_string(), |c| c.to_string());
        let _ = writeln!(
            out,
            "[{a:>2},{b:>2},{c:>2},{d:>2}]  {:>4}  {:>8}  {:>4}  {:>7}  {case:>4}",
            r.min,
            yn(r.feasible),
            yn(r.full),
            yn(r.reduced),
        );
    }
    let _ = writeln!(
        out,
        "{} profiles, {feasible} feasible; predicate holds on {full_count}, all feasible: {}",
        rows.len(),
        yn(full_sound)
    );
    out
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_prop3(
    fmt: Format,
    src: CubeSource,
    script: Option<String>,
    steps: Option<usize>,
) -> anyhow::Result<String> {
    let seed = src.seed.unwrap_or(0);
    let (c, cube_seed) = match (&src.input, src.side) {
        (Some(_), _) => load_cube(&src)?,
        (None, Some(s)) if s != 4 => {
            return Err(Error::Shape(format!("plane-sum analysis needs side 4, got {s}")).into())
        }
        (None, _) => {
            let mut rng = seeded_rng(seed, Stream::PropertyThree);
            (
                cube::random_property_three_cube(&mut rng, 1 << 20)?,
                Some(seed),
            )
        }
    };
    let seq = match (script, steps) {
        (Some(s), _) => parse_switch_script(&s)?,
        (None, Some(n)) => random_switch_script(&mut seeded_rng(seed, Stream::SwitchScript), 4, n),
        (None, None) => Vec::new(),
    };
    let holds = cube::property_three(&c)?;
    let total = imbalance_cube(&c).0;
    let conserved = if holds {
        Some(cube::lemma5_check(&c, &seq)?)
    } else {
        if let Some(s) = seq.iter().find(|s| s.index >= 4) {
            bail!(Error::Domain(format!(
                "plane index {} out of range",
                s.index
            )));
        }
        None
    };
    let sums = cube::plane_sums(&c);
    if fmt == Format::Json {
        let mut doc = json!({
            "n": 4,
            "plane_sums": { "x": sums.x, "y": sums.y, "z": sums.z },
            "divisible_by_4": holds,
            "signed_sum": total,
            "residue_mod_8": total.rem_euclid(8),
            "script": format_switch_script(&seq),
            "conserved": conserved,
            "version": VERSION,
        });
        if let Some(s) = cube_seed {
            doc["seed"] = json!(s);
            doc["generator"] = json!(GENERATOR);
        }
        return Ok(to_json(&doc));
    }
    let mut out = String::new();
    writeln!(out, "plane sums x {:?}", sums.x)?;
    writeln!(out, "plane sums y {:?}", sums.y)?;
    writeln!(out, "plane sums z {:?}", sums.z)?;
    writeln!(out, "all divisible by 4: {}", yn(holds))?;
    writeln!(out, "signed sum {total} (mod 8: {})", total.rem_euclid(8))?;
    match conserved {
        Some(ok) => writeln!(
            out,
            "{} presses: residue and divisibility preserved: {}",
            seq.len(),
            yn(ok)
        )?,
        None => writeln!(
            out,
            "script not checked: plane sums are not all divisible by 4"
        )?,
    }
    Ok(out)
}

/// Least-squares slope of `log t` against `log n`.
fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, t)| *t > 0.0)
        .map(|&(n, t)| ((n as f64).ln(), t.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn cmd_bench(fmt: Format, sizes: &[usize], boards: u64, seed: u64) -> anyhow::Result<String> {
    if boards == 0 {
        return Err(anyhow!(Error::Domain("--boards must be positive".into())));
    }
    let mut points = Vec::new();
    for &n in sizes {
        if n == 0 || n % 2 != 0 {
            return Err(Error::Unsupported(format!("bench sizes must be even, got {n}")).into());
        }
        let inputs: Vec<SignMatrix> = (0..boards)
            .map(|s| io::random_board(n, n, seed + s))
            .collect();
        let start = Instant::now();
        for a in &inputs {
            balance(a)?;
        }
        let ms = start.elapsed().as_secs_f64() * 1e3 / boards as f64;
        points.push((n, ms));
    }
    let slope = loglog_slope(&points);
    if fmt == Format::Json {
        let rows: Vec<_> = points
            .iter()
            .map(|&(n, ms)| json!({ "n": n, "boards": boards, "mean_ms": ms }))
            .collect();
        return Ok(to_json(&json!({
            "sizes": rows,
            "exponent": slope,
            "seed": seed,
            "version": VERSION,
        })));
    }
    let mut out = String::from("    n   mean ms\n");
    for (n, ms) in &points {
        writeln!(out, "{n:>5}  {ms:>8.3}")?;
    }
    match slope {
        Some(s) => writeln!(out, "fitted exponent {s:.2}")?,
        None => writeln!(out, "fitted exponent: needs two sizes")?,
    }
    Ok(out)
}
