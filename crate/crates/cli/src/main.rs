use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jacobi_core::lincomb::{reduce_mod, Q};
use jacobi_core::lmo::{GeneratorTable, TangleValue};
use jacobi_core::lmo_checks::{verify_cor_delta, verify_delta_lemma, verify_ycob, CheckReport};
use jacobi_core::modules::{split_by_sector, ModuleCache, SectorSpec};
use jacobi_core::ops::{self, LegOrder};
use jacobi_core::parse::{parse, parse_bindings, parse_diagram, serialize_diagram, Bindings};
use jacobi_core::sl2::sl2_weight_comb;
use jacobi_verify::{self as verify, group_name, Context};
use jacobi_core::{BigInt, Color, Diagram, LinComb};

#[derive(Parser)]
#[command(name = "jacobi", version, about = "Exact computations with Jacobi diagrams")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Symbol bindings, e.g. `a=1+,b=2-`.
    #[arg(long, global = true, default_value = "")]
    bind: String,
    /// Directory for persisted sector structures.
    #[arg(long, global = true, env = "JACOBI_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Keep sector structures in memory only.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structure of a sector of connected diagrams.
    Module {
        #[arg(long)]
        ideg: usize,
        #[arg(long)]
        loops: usize,
        /// Leg colors as a comma-separated multiset.
        #[arg(long, default_value = "", conflicts_with = "sum_over")]
        colors: String,
        /// Sum over all leg multisets drawn from these colors.
        #[arg(long)]
        sum_over: Option<String>,
        /// Print a representative of each nontrivial summand.
        #[arg(long)]
        basis: bool,
    },
    /// Reduce an expression sector by sector.
    Reduce {
        #[arg(long)]
        input: String,
        /// Tensor with ℚ/mℤ, e.g. `1/2` or `1`.
        #[arg(long)]
        modulus: Option<String>,
    },
    /// Apply one of the maps δ₀, δ₁, δ₂, z̄.
    Op {
        #[arg(long, value_enum)]
        op: OpName,
        #[arg(long)]
        input: String,
        /// Leg positions (0-based, in input order) listed from least to greatest.
        #[arg(long)]
        order: Option<String>,
        /// Keep only terms with this first Betti number.
        #[arg(long)]
        loops: Option<usize>,
    },
    /// z̄ of a diagram, the sum δ₀ + δ₁ + δ₂ with union terms.
    Zbb {
        #[arg(long)]
        input: String,
        /// Use the bracket variant.
        #[arg(long)]
        bracket: bool,
        #[arg(long)]
        loops: Option<usize>,
    },
    /// Tabulated tangle values.
    Lmo {
        #[command(subcommand)]
        cmd: LmoCmd,
    },
    /// sl₂ weight of a closed expression.
    Weight {
        #[arg(long)]
        input: String,
    },
    /// Run verification cases.
    Verify {
        /// Case ids; all registered cases when empty.
        ids: Vec<String>,
        #[arg(long, conflicts_with = "skip_slow")]
        include_slow: bool,
        /// The default; accepted for symmetry with `--include-slow`.
        #[arg(long)]
        skip_slow: bool,
        /// Include wall times.
        #[arg(long)]
        timing: bool,
        /// List registered cases.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum LmoCmd {
    /// Names of the tabulated values.
    List,
    /// LEFT ∘ RIGHT.
    Compose {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        cap: Option<usize>,
    },
    Verify {
        #[arg(value_enum)]
        which: LmoCheck,
        /// Largest m for the coproduct powers, largest r + s for the mixed ones.
        #[arg(long, default_value_t = 3)]
        max: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpName {
    Delta0,
    Delta1,
    Delta2,
    Zbb,
    ZbbBracket,
}

#[derive(Clone, Copy, ValueEnum)]
enum LmoCheck {
    DeltaLemma,
    CorDelta,
    Ycob,
}

/// Input problems are usage errors (exit 2); check failures exit 1.
enum Outcome {
    Done,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let binds = parse_bindings(&cli.bind)?;
    let cache = ModuleCache::new(if cli.no_cache { None } else { cli.cache_dir.clone() });
    match &cli.cmd {
        Cmd::Module { ideg, loops, colors, sum_over, basis } => {
            module_cmd(cli, &cache, &binds, *ideg, *loops, colors, sum_over.as_deref(), *basis)
        }
        Cmd::Reduce { input, modulus } => reduce_cmd(cli, &cache, &parse(input, &binds)?, modulus.as_deref()),
        Cmd::Op { op, input, order, loops } => op_cmd(cli, &binds, *op, input, order.as_deref(), *loops),
        Cmd::Zbb { input, bracket, loops } => {
            let op = if *bracket { OpName::ZbbBracket } else { OpName::Zbb };
            op_cmd(cli, &binds, op, input, None, *loops)
        }
        Cmd::Lmo { cmd } => lmo_cmd(cli, &cache, cmd),
        Cmd::Weight { input } => {
            let w = sl2_weight_comb(&parse(input, &binds)?)?;
            emit(cli, json!({ "weight": w.to_string() }), &w.to_string());
            Ok(Outcome::Done)
        }
        Cmd::Verify { ids, include_slow, timing, list, .. } => verify_cmd(cli, &cache, ids, *include_slow, *timing, *list),
    }
}

fn emit(cli: &Cli, j: Value, text: &str) {
    let out = if cli.json { serde_json::to_string_pretty(&j).unwrap() } else { text.to_string() };
    // a closed pipe (e.g. `| head`) ends the program quietly
    if let Err(e) = writeln!(std::io::stdout().lock(), "{out}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing output: {e}");
    }
}

fn parse_colors(s: &str, binds: &Bindings) -> Result<Vec<Color>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match binds.get(t) {
            Some(c) => Ok(*c),
            None => t.parse::<Color>().map_err(|e| anyhow!("bad color `{t}`: {e}")),
        })
        .collect()
}

fn multisets(palette: &[Color], k: usize) -> Vec<Vec<Color>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &c) in palette.iter().enumerate() {
        for mut rest in multisets(&palette[i..], k - 1) {
            rest.insert(0, c);
            out.push(rest);
        }
    }
    out
}

fn colors_text(cs: &[Color]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

#[allow(clippy::too_many_arguments)]
fn module_cmd(
    cli: &Cli,
    cache: &ModuleCache,
    binds: &Bindings,
    n: usize,
    l: usize,
    colors: &str,
    sum_over: Option<&str>,
    basis: bool,
) -> Result<Outcome> {
    let sets = match sum_over {
        Some(p) => {
            let mut palette = parse_colors(p, binds)?;
            palette.sort();
            palette.dedup();
            let legs = n as i64 + 2 - 2 * l as i64;
            if legs < 0 {
                bail!("i-deg {n} with {l} loops has no legs left");
            }
            multisets(&palette, legs as usize)
        }
        None => vec![parse_colors(colors, binds)?],
    };
    let mut rows = Vec::new();
    let mut text = Vec::new();
    let (mut free, mut torsion) = (0, Vec::new());
    for cs in sets {
        let ms = cache.get(&SectorSpec::new(n, l, cs.clone())?)?;
        free += ms.free_rank();
        torsion.extend(ms.torsion());
        let g = group_name(ms.free_rank(), &ms.torsion());
        let mut row = json!({
            "colors": cs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "generators": ms.generators.len(),
            "free_rank": ms.free_rank(),
            "torsion": ms.torsion().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "group": g,
        });
        text.push(format!("({n},{l}; {}): {g}  [{} generators]", colors_text(&cs), ms.generators.len()));
        if basis {
            let b: Vec<Value> = ms
                .basis()
                .into_iter()
                .map(|(order, x)| {
                    text.push(format!("    order {}: {}", if order == BigInt::from(0) { "∞".into() } else { order.to_string() }, x));
                    json!({ "order": order.to_string(), "element": x.to_string() })
                })
                .collect();
            row["basis"] = Value::Array(b);
        }
        rows.push(row);
    }
    torsion.sort();
    if rows.len() > 1 {
        text.push(format!("sum: {}", group_name(free, &torsion)));
    }
    let j = json!({
        "sectors": rows,
        "free_rank": free,
        "torsion": torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    });
    emit(cli, j, &text.join("\n"));
    Ok(Outcome::Done)
}

fn reduce_cmd(cli: &Cli, cache: &ModuleCache, x: &LinComb<Q>, modulus: Option<&str>) -> Result<Outcome> {
    let m = modulus
        .map(|s| s.trim().parse::<Q>().map_err(|_| anyhow!("bad modulus `{s}`")))
        .transpose()?;
    let mut rows = Vec::new();
    let mut text = Vec::new();
    let mut all_zero = true;
    for (spec, part) in split_by_sector(x) {
        if !part.iter().next().unwrap().0.is_connected() {
            bail!("reduction needs connected diagrams");
        }
        let ms = cache.get(&spec)?;
        let coords = ms.coords(&part)?;
        let zero = match &m {
            Some(m) => ms.is_zero_tensor(&part, m)?,
            None => ms.is_zero(&part)?,
        };
        all_zero &= zero;
        let shown: Vec<String> = coords
            .iter()
            .zip(&ms.factors)
            .filter(|(_, f)| **f != BigInt::from(1))
            .map(|(c, f)| match (&m, *f == BigInt::from(0)) {
                (Some(m), true) => reduce_mod(c, m).to_string(),
                (_, true) => c.to_string(),
                (_, false) => format!("{} mod {f}", c),
            })
            .collect();
        text.push(format!(
            "({},{}; {}) in {}: [{}]{}",
            spec.n,
            spec.l,
            colors_text(&spec.colors),
            group_name(ms.free_rank(), &ms.torsion()),
            shown.join(", "),
            if zero { "  = 0" } else { "" }
        ));
        rows.push(json!({
            "ideg": spec.n, "loops": spec.l,
            "colors": spec.colors.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "coordinates": shown, "zero": zero,
        }));
    }
    text.push(if all_zero { "zero".into() } else { "nonzero".into() });
    emit(cli, json!({ "sectors": rows, "zero": all_zero }), &text.join("\n"));
    Ok(Outcome::Done)
}

fn apply_op(op: OpName, d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, jacobi_core::Error> {
    match op {
        OpName::Delta0 => ops::delta0(d, ord),
        OpName::Delta1 => ops::delta1(d, ord),
        OpName::Delta2 => ops::delta2(d, ord),
        OpName::Zbb => ops::zbb_of_surgery(d, ord),
        OpName::ZbbBracket => ops::zbb_of_bracket(d, ord),
    }
}

fn op_cmd(cli: &Cli, binds: &Bindings, op: OpName, input: &str, order: Option<&str>, loops: Option<usize>) -> Result<Outcome> {
    let mut out = LinComb::new();
    match order {
        Some(o) => {
            let d = parse_diagram(input, binds).context("--order needs a single diagram as input")?;
            let legs: Vec<u32> = d.legs().collect();
            let mut list = Vec::new();
            for t in o.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let i: usize = t.parse().map_err(|_| anyhow!("bad leg position `{t}`"))?;
                list.push(*legs.get(i).ok_or_else(|| anyhow!("leg position {i} out of range"))?);
            }
            out = apply_op(op, &d, &LegOrder::from_list(&d, &list)?)?;
        }
        None => {
            for (k, c) in parse(input, binds)?.iter() {
                let d = k.diagram();
                out.add(&apply_op(op, d, &LegOrder::natural(d))?.scaled(c));
            }
        }
    }
    if let Some(l) = loops {
        out = ops::loop_part(&out, l);
    }
    let terms: Vec<Value> = out
        .iter()
        .map(|(k, c)| json!({ "coefficient": c.to_string(), "diagram": serde_json::from_str::<Value>(&serialize_diagram(k.diagram())).unwrap() }))
        .collect();
    let text = if out.is_zero() { "0".to_string() } else { out.to_string() };
    emit(cli, json!({ "expression": text, "terms": terms }), &text);
    Ok(Outcome::Done)
}

fn checks_outcome(cli: &Cli, checks: &[CheckReport]) -> Outcome {
    let pass = checks.iter().all(|c| c.pass);
    let text: Vec<String> =
        checks.iter().map(|c| format!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)).collect();
    emit(cli, json!({ "pass": pass, "checks": checks }), &text.join("\n"));
    if pass {
        Outcome::Done
    } else {
        Outcome::Failed
    }
}

fn lmo_cmd(cli: &Cli, cache: &ModuleCache, cmd: &LmoCmd) -> Result<Outcome> {
    let t = GeneratorTable::load()?;
    match cmd {
        LmoCmd::List => {
            let mut rows = Vec::new();
            let mut text = Vec::new();
            for name in t.names() {
                let v = t.get(name)?;
                text.push(format!("{name}: {} → {}, i-deg ≤ {}", v.bottom, v.top, v.cap));
                rows.push(json!({ "name": name, "top": v.top, "bottom": v.bottom, "cap": v.cap }));
            }
            emit(cli, Value::Array(rows), &text.join("\n"));
            Ok(Outcome::Done)
        }
        LmoCmd::Compose { left, right, cap } => {
            let (a, b) = (t.get(left)?, t.get(right)?);
            let v: TangleValue<Q> = match cap {
                Some(c) => a.compose_to(&b, *c)?,
                None => a.compose(&b)?,
            };
            let text = format!("top {} bottom {} cap {}\n{}", v.top, v.bottom, v.cap, v.log);
            emit(cli, json!({ "top": v.top, "bottom": v.bottom, "cap": v.cap, "log": v.log.to_string() }), &text);
            Ok(Outcome::Done)
        }
        LmoCmd::Verify { which, max } => {
            let checks = match which {
                LmoCheck::DeltaLemma => {
                    let mut out = Vec::new();
                    for k in 0..=*max {
                        out.extend(verify_delta_lemma(&t, cache, k)?);
                    }
                    out
                }
                LmoCheck::CorDelta => {
                    let mut out = Vec::new();
                    for r in 0..=*max {
                        for s in 0..=*max - r {
                            out.push(verify_cor_delta(&t, cache, r, s)?);
                        }
                    }
                    out
                }
                LmoCheck::Ycob => verify_ycob(&t, cache)?,
            };
            Ok(checks_outcome(cli, &checks))
        }
    }
}

fn verify_cmd(cli: &Cli, cache: &ModuleCache, ids: &[String], include_slow: bool, timing: bool, list: bool) -> Result<Outcome> {
    if list {
        let rows: Vec<Value> = verify::cases()
            .iter()
            .map(|c| json!({ "id": c.id, "criterion": c.criterion, "description": c.description, "expected": c.expected, "slow": c.slow }))
            .collect();
        let text: Vec<String> = verify::cases()
            .iter()
            .map(|c| format!("{:<20} {:>2}{} {}", c.id, c.criterion, if c.slow { " (slow)" } else { "" }, c.description))
            .collect();
        emit(cli, Value::Array(rows), &text.join("\n"));
        return Ok(Outcome::Done);
    }
    let table = GeneratorTable::load()?;
    let cx = Context { cache, table: &table };
    let mut summary = if ids.is_empty() {
        verify::run_all(&cx, include_slow)
    } else {
        let cases = ids.iter().map(|id| verify::find(id)).collect::<Result<Vec<_>, _>>()?;
        let reports: Vec<_> = cases.iter().map(|c| c.run(&cx)).collect();
        verify::Summary { pass: reports.iter().all(|r| r.pass), reports }
    };
    if !timing {
        summary.reports = summary.reports.into_iter().map(|r| r.without_timing()).collect();
    }
    let mut text: Vec<String> = summary.reports.iter().map(|r| r.text()).collect();
    let n_pass = summary.reports.iter().filter(|r| r.pass).count();
    text.push(format!("{n_pass}/{} cases pass", summary.reports.len()));
    emit(cli, serde_json::to_value(&summary)?, &text.join("\n"));
    Ok(if summary.pass { Outcome::Done } else { Outcome::Failed })
}
