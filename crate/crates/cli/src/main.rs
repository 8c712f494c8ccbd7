use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fermatlines::certify::{certify, expected_rank, theorem_applies, Verdict};
use fermatlines::charsum::survey_n;
use fermatlines::efield::{base_curve, construct_point, mu_d_translate, CurvePoint, PointJson, RatFunc, RatFuncField};
use fermatlines::fermat::{inner_product_rows, w_tuples};
use fermatlines::gf::divisor_count;
use fermatlines::{make_field, Error, ExponentTuple, FieldCtx, FqElem, Line};
use serde_json::{json, Value};

/// Largest `q` handled without `--extended` by the sweeping subcommands.
const DEFAULT_Q_LIMIT: u64 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "fermatlines",
    version,
    about = "Character sums, lines on Fermat surfaces and points on E_d"
)]
struct Cli {
    /// Characteristic, a prime at least 5.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Exponent: the base field is F_q with q = p^k.
    #[arg(long, global = true, default_value_t = 1)]
    k: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Allow sweeps with q above the default limit.
    #[arg(long, global = true)]
    extended: bool,
    /// Worker threads; FERMATLINES_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate S_{c,i} = Σ χ_i(x (x+1) (x+c)) for one c and tuple.
    Charsum {
        /// Element of F_q: an integer or coordinates c0,c1,...
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Exponent tuple i0,i1,i2,i3 with sum divisible by d = q + 1.
        #[arg(long)]
        tuple: String,
    },
    /// Sweep c over F_q for a character of the given order and count S_c = 2q.
    Survey {
        #[arg(long)]
        order: u64,
    },
    /// List all lines L_{a,b} with their character sums and inner products.
    Lines,
    /// Construct the point on E_d attached to a line.
    Point {
        #[arg(long, allow_hyphen_values = true, requires = "b", conflicts_with = "thm1")]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "a")]
        b: Option<String>,
        /// Use the line with b a primitive 12th root of unity and a = b^2.
        #[arg(long)]
        thm1: bool,
        /// Translate by the k-th power of the chosen generator of μ_d.
        #[arg(long)]
        translate: Option<u64>,
    },
    /// Check the full-rank criterion with the applicable strategy.
    Certify,
    /// Rank of E_d and the bookkeeping around it.
    Rank,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() || e == Error::NotOnCurve {
            Failure::Math(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(format!("csv output: {e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("output: {e}"))
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(msg)) => {
            let _ = writeln!(std::io::stderr(), "error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(std::io::stderr(), "error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let n = match std::env::var("FERMATLINES_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("FERMATLINES_THREADS={v} is not a number")))?,
        ),
        Err(_) => flag,
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    configure_threads(cli.threads)?;
    let p = cli.p.ok_or_else(|| Failure::Usage("--p is required".into()))?;
    let ctx = make_field(p, cli.k)?;
    let sweeping = matches!(cli.command, Command::Survey { .. } | Command::Lines | Command::Certify);
    if sweeping && ctx.q() > DEFAULT_Q_LIMIT && !cli.extended {
        return Err(Failure::Usage(format!(
            "q = {} is above {DEFAULT_Q_LIMIT}; pass --extended to run this sweep",
            ctx.q()
        )));
    }
    let out = &mut std::io::stdout().lock();
    match &cli.command {
        Command::Charsum { c, tuple } => cmd_charsum(&ctx, cli.format, c, tuple, out),
        Command::Survey { order } => cmd_survey(&ctx, cli.format, *order, out),
        Command::Lines => cmd_lines(&ctx, cli.format, out),
        Command::Point { a, b, thm1, translate } => {
            let line = match (a, b, thm1) {
                (_, _, true) => Line::thm1(&ctx)?,
                (Some(a), Some(b), false) => Line::new(&ctx, parse_elem(&ctx, a)?, parse_elem(&ctx, b)?)?,
                _ => return Err(Failure::Usage("point needs --a and --b, or --thm1".into())),
            };
            cmd_point(&ctx, cli.format, &line, *translate, out)
        }
        Command::Certify => cmd_certify(&ctx, cli.format, out),
        Command::Rank => cmd_rank(&ctx, cli.format, out),
    }
}

/// Parses `n` or `c0,c1,...` into an element of `F_{q^2}`.
fn parse_elem(ctx: &FieldCtx, s: &str) -> Result<FqElem, Failure> {
    let p = ctx.p() as i64;
    let coords = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map(|v| v.rem_euclid(p) as u64))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("cannot parse field element {s:?}")))?;
    Ok(ctx.from_coeffs(&coords)?)
}

fn parse_tuple(ctx: &FieldCtx, s: &str) -> Result<ExponentTuple, Failure> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("cannot parse tuple {s:?}")))?;
    match v[..] {
        [i0, i1, i2, i3] => Ok(ExponentTuple::new(i0, i1, i2, i3, ctx.d())?),
        _ => Err(Failure::Usage(format!("tuple {s:?} needs four entries"))),
    }
}

/// `Σ c_j ζ^j`, with `z` for `ζ_d`.
fn format_cyc(canon: &[i64]) -> String {
    let mut s = String::new();
    for (j, &c) in canon.iter().enumerate().filter(|(_, &c)| c != 0) {
        let mag = c.unsigned_abs();
        let mono = match j {
            0 => mag.to_string(),
            1 if mag == 1 => "z".into(),
            1 => format!("{mag}*z"),
            _ if mag == 1 => format!("z^{j}"),
            _ => format!("{mag}*z^{j}"),
        };
        match (s.is_empty(), c < 0) {
            (true, true) => s.push_str(&format!("-{mono}")),
            (true, false) => s.push_str(&mono),
            (false, true) => s.push_str(&format!(" - {mono}")),
            (false, false) => s.push_str(&format!(" + {mono}")),
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn emit_json(out: &mut impl Write, command: &str, mut body: Value) -> Result<(), Failure> {
    let obj = body.as_object_mut().expect("reports are objects");
    obj.insert("schema".into(), json!(1));
    obj.insert("command".into(), json!(command));
    writeln!(out, "{}", serde_json::to_string_pretty(&body).expect("serializable"))?;
    Ok(())
}

fn csv_writer(out: &mut impl Write) -> csv::Writer<&mut dyn Write> {
    csv::Writer::from_writer(out as &mut dyn Write)
}

fn canon_headers(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|j| format!("{prefix}{j}")).collect()
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn cmd_charsum(ctx: &FieldCtx, format: Format, c: &str, tuple: &str, out: &mut impl Write) -> Outcome {
    let c = parse_elem(ctx, c)?;
    let t = parse_tuple(ctx, tuple)?;
    let rec = fermatlines::charsum::sum_s(ctx, c, &t)?;
    let canon = rec.value.canon().to_vec();
    match format {
        Format::Json => emit_json(
            out,
            "charsum",
            json!({
                "q": ctx.q(),
                "d": ctx.d(),
                "c": ctx.coeffs(c),
                "tuple": t,
                "value": canon,
                "integer": rec.as_integer,
                "is_real": rec.value.is_real(),
                "equals_2q": rec.hits_upper(ctx.q()),
            }),
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            let mut header = strings(&["q", "c", "tuple", "integer", "is_real"]);
            header.extend(canon_headers("v", canon.len()));
            w.write_record(&header)?;
            let mut row = vec![
                ctx.q().to_string(),
                ctx.format_elem(c),
                t.to_string(),
                rec.as_integer.map(|v| v.to_string()).unwrap_or_default(),
                rec.value.is_real().to_string(),
            ];
            row.extend(strings(&canon));
            w.write_record(&row)?;
            w.flush()?;
        }
        Format::Pretty => {
            writeln!(
                out,
                "q = {}, d = {}, c = {}, tuple = {t}",
                ctx.q(),
                ctx.d(),
                ctx.format_elem(c)
            )?;
            writeln!(out, "S = {}", format_cyc(&canon))?;
            writeln!(out, "real: {}", rec.value.is_real())?;
        }
    }
    Ok(true)
}

fn cmd_survey(ctx: &FieldCtx, format: Format, order: u64, out: &mut impl Write) -> Outcome {
    let s = survey_n(ctx, order)?;
    let q = ctx.q();
    let holds = s.bound_holds();
    match format {
        Format::Json => {
            let values: Vec<Value> = s
                .values
                .iter()
                .map(|r| json!({"c": ctx.coeffs(r.c), "value": r.value.canon(), "integer": r.as_integer}))
                .collect();
            let coords = |v: &[FqElem]| v.iter().map(|&c| ctx.coeffs(c)).collect::<Vec<_>>();
            emit_json(
                out,
                "survey",
                json!({
                    "q": q,
                    "order": order,
                    "tuple": s.tuple,
                    "n": s.n(),
                    "bound_times_4": 3 * q as i64 - 9,
                    "bound_holds": holds,
                    "hits": coords(&s.hits),
                    "lows": coords(&s.misses_sign),
                    "values": values,
                }),
            )?;
        }
        Format::Csv => {
            let width = s.values.first().map_or(0, |r| r.value.canon().len());
            let mut w = csv_writer(out);
            let mut header = strings(&["c", "integer"]);
            header.extend(canon_headers("v", width));
            w.write_record(&header)?;
            for r in &s.values {
                let mut row = vec![
                    ctx.format_elem(r.c),
                    r.as_integer.map(|v| v.to_string()).unwrap_or_default(),
                ];
                row.extend(strings(r.value.canon()));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Pretty => {
            let list = |v: &[FqElem]| v.iter().map(|&c| ctx.format_elem(c)).collect::<Vec<_>>().join(", ");
            writeln!(out, "q = {q}, order {order}, tuple {}", s.tuple)?;
            writeln!(out, "N = {} (bound (3q-9)/4 = {}/4)", s.n(), 3 * q as i64 - 9)?;
            writeln!(out, "S = 2q at c in {{{}}}", list(&s.hits))?;
            writeln!(out, "S = -2q at c in {{{}}}", list(&s.misses_sign))?;
            writeln!(out, "bound {}", if holds { "holds" } else { "FAILS" })?;
        }
    }
    Ok(holds)
}

fn cmd_lines(ctx: &FieldCtx, format: Format, out: &mut impl Write) -> Outcome {
    let lines = Line::all(ctx);
    let rows = inner_product_rows(ctx)?;
    match format {
        Format::Json => {
            let ls: Vec<Value> = lines
                .iter()
                .map(|l| json!({"a": ctx.coeffs(l.a()), "b": ctx.coeffs(l.b()), "c": ctx.coeffs(l.c(ctx))}))
                .collect();
            emit_json(out, "lines", json!({"q": ctx.q(), "lines": ls, "rows": rows}))?;
        }
        Format::Csv => {
            let width = rows.first().map_or(0, |r| r.s.len());
            let mut w = csv_writer(out);
            let mut header = strings(&["a", "b", "tuple", "nonzero", "denominator"]);
            header.extend(canon_headers("s", width));
            header.extend(canon_headers("ip", width));
            w.write_record(&header)?;
            let per_line = (rows.len() / lines.len().max(1)).max(1);
            for (line, r) in lines
                .iter()
                .zip(rows.chunks(per_line))
                .flat_map(|(l, ch)| ch.iter().map(move |r| (l, r)))
            {
                let mut row = vec![
                    ctx.format_elem(line.a()),
                    ctx.format_elem(line.b()),
                    r.tuple.to_string(),
                    r.nonzero.to_string(),
                    r.inner_product_den.to_string(),
                ];
                row.extend(strings(&r.s));
                row.extend(strings(&r.inner_product_scaled));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Pretty => {
            let per_line = rows.len() / lines.len().max(1);
            for (line, chunk) in lines.iter().zip(rows.chunks(per_line.max(1))) {
                writeln!(
                    out,
                    "L(a = {}, b = {}), c = b^2 = {}",
                    ctx.format_elem(line.a()),
                    ctx.format_elem(line.b()),
                    ctx.format_elem(line.c(ctx))
                )?;
                for r in chunk {
                    let mark = if r.nonzero { "" } else { "  (zero projection)" };
                    writeln!(out, "  {}  S = {}{mark}", r.tuple, format_cyc(&r.s))?;
                }
            }
            writeln!(out, "{} lines", lines.len())?;
        }
    }
    Ok(true)
}

fn cmd_point(ctx: &FieldCtx, format: Format, line: &Line, translate: Option<u64>, out: &mut impl Write) -> Outcome {
    let built = construct_point(ctx, line)?;
    let mut point = built.point;
    if let Some(k) = translate {
        point = mu_d_translate(ctx, &point, ctx.pow(ctx.mu_d_generator(), k))?;
    }
    let on_curve = base_curve(ctx).contains(&point);
    let r = RatFuncField::new(ctx);
    match format {
        Format::Json => emit_json(
            out,
            "point",
            json!({
                "q": ctx.q(),
                "a": ctx.coeffs(line.a()),
                "b": ctx.coeffs(line.b()),
                "translate": translate.unwrap_or(0),
                "splitting": built.splitting,
                "on_curve": on_curve,
                "point": PointJson::new(ctx, &point),
            }),
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["part", "power", "coefficient"])?;
            if let CurvePoint::Affine { x, y } = &point {
                let parts: [(&str, &RatFunc); 2] = [("x", x), ("y", y)];
                for (name, f) in parts {
                    for (suffix, poly) in [("num", &f.num), ("den", &f.den)] {
                        for (j, &c) in poly.iter().enumerate() {
                            w.write_record([format!("{name}_{suffix}"), j.to_string(), ctx.format_elem(c)])?;
                        }
                    }
                }
            }
            w.flush()?;
        }
        Format::Pretty => {
            writeln!(
                out,
                "line a = {}, b = {}; translate {}",
                ctx.format_elem(line.a()),
                ctx.format_elem(line.b()),
                translate.unwrap_or(0)
            )?;
            match &point {
                CurvePoint::Infinity => writeln!(out, "P = O")?,
                CurvePoint::Affine { x, y } => {
                    writeln!(out, "P_x = {}", r.format(x))?;
                    writeln!(out, "P_y = {}", r.format(y))?;
                }
            }
            writeln!(out, "on curve: {on_curve}")?;
        }
    }
    if on_curve {
        Ok(true)
    } else {
        Err(Failure::Math("constructed point is not on the curve".into()))
    }
}

fn cmd_certify(ctx: &FieldCtx, format: Format, out: &mut impl Write) -> Outcome {
    let cert = certify(ctx)?;
    let predicted = theorem_applies(ctx.q());
    let consistent = !predicted || cert.verdict == Verdict::FullRankCertified;
    match format {
        Format::Json => {
            let coverage: Vec<Value> = cert
                .coverage
                .iter()
                .map(|c| {
                    json!({
                        "tuple": c.tuple,
                        "c": c.c.map(|x| ctx.coeffs(x)),
                        "s": c.s.as_ref().map(|s| s.canon().to_vec()),
                        "nonzero": c.nonzero,
                    })
                })
                .collect();
            emit_json(
                out,
                "certify",
                json!({
                    "q": cert.q,
                    "expected_rank": cert.expected_rank,
                    "method": cert.method,
                    "verdict": cert.verdict,
                    "theorem_applies": predicted,
                    "lines_used": cert.lines_used,
                    "coverage": coverage,
                    "orbits": cert.orbits,
                }),
            )?;
        }
        Format::Csv => {
            let width = cert
                .coverage
                .iter()
                .find_map(|c| c.s.as_ref())
                .map_or(0, |s| s.canon().len());
            let mut w = csv_writer(out);
            let mut header = strings(&["tuple", "c", "nonzero"]);
            header.extend(canon_headers("s", width));
            w.write_record(&header)?;
            for c in &cert.coverage {
                let mut row = vec![
                    c.tuple.to_string(),
                    c.c.map(|x| ctx.format_elem(x)).unwrap_or_default(),
                    c.nonzero.to_string(),
                ];
                match &c.s {
                    Some(s) => row.extend(strings(s.canon())),
                    None => row.extend(std::iter::repeat_n(String::new(), width)),
                }
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Pretty => {
            let verdict = match cert.verdict {
                Verdict::FullRankCertified => "FULL_RANK_CERTIFIED",
                Verdict::NotCertified => "NOT_CERTIFIED",
            };
            writeln!(out, "q = {}: {verdict}", cert.q)?;
            writeln!(
                out,
                "rank {}, method {:?}, lines used {}",
                cert.expected_rank, cert.method, cert.lines_used
            )?;
            for c in cert.uncovered() {
                writeln!(out, "  uncovered: {}", c.tuple)?;
            }
            if !consistent {
                writeln!(out, "contradiction: a theorem predicts full rank for this q")?;
            }
        }
    }
    Ok(consistent)
}

fn cmd_rank(ctx: &FieldCtx, format: Format, out: &mut impl Write) -> Outcome {
    let q = ctx.q();
    let rank = expected_rank(q)?;
    let dim_w = w_tuples(ctx.d()).len();
    let n = divisor_count(ctx.d());
    let applies = theorem_applies(q);
    match format {
        Format::Json => emit_json(
            out,
            "rank",
            json!({"q": q, "d": ctx.d(), "rank": rank, "dim_w": dim_w, "divisors_of_d": n, "theorem_applies": applies}),
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["q", "d", "rank", "dim_w", "divisors_of_d", "theorem_applies"])?;
            w.write_record(
                strings(&[q, ctx.d(), rank, dim_w as u64, n])
                    .into_iter()
                    .chain([applies.to_string()]),
            )?;
            w.flush()?;
        }
        Format::Pretty => {
            writeln!(out, "q = {q}, d = {}", ctx.d())?;
            writeln!(out, "rank of E_d = {rank}")?;
            writeln!(out, "dim W = {dim_w}, divisors of d = {n}")?;
            writeln!(out, "full rank guaranteed by a theorem: {applies}")?;
        }
    }
    Ok(true)
}
