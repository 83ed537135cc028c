//! Subcommand evaluation. `prepare` parses and canonicalises inputs (usage
//! errors surface here, before any cache lookup); `execute` computes.

use std::fmt::Write;

use serde_json::{json, Value};

use cobarforge::cobar::{cobar_cup, cobar_diff_sum, cobar_ext, AInfinityData, CobarSum};
use cobarforge::conventions::ConventionTable;
use cobarforge::homology_ops::{cup_k, e_op, q_op};
use cobarforge::may_model::{page_compute, transfer_diff, Chart, ChartCell, PSWord, Window};
use cobarforge::milnor::{coproduct, KPoly, Mode};

use crate::verify::{self, Verdict};
use crate::{Cli, Command, Format, ModeArg, Target};

/// A usage or parse error; exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

pub struct Outcome {
    pub exit: u8,
    pub body: Vec<u8>,
}

pub struct Prepared {
    pub canonical: Value,
    inputs: Inputs,
}

enum Inputs {
    Poly(KPoly),
    Cup(KPoly, KPoly),
    Cobar(CobarSum),
    CobarPair(CobarSum, CobarSum),
    Word(PSWord),
    None,
}

fn usage<E: std::fmt::Display>(e: E) -> Usage {
    Usage(e.to_string())
}

fn mode(cli: &Cli) -> Mode {
    match cli.mode {
        ModeArg::Stable => Mode::Stable,
        ModeArg::Unstable => Mode::Unstable,
    }
}

fn poly(cli: &Cli, s: &str) -> Result<KPoly, Usage> {
    Ok(KPoly::parse(s).map_err(usage)?.normalized(mode(cli)))
}

pub fn prepare(cli: &Cli, _conv: &ConventionTable) -> Result<Prepared, Usage> {
    if cli.format == Format::Svg && !matches!(cli.command, Command::ExtChart { .. }) {
        return Err(Usage("--format svg is only available for ext-chart".into()));
    }
    let name = serde_json::to_value(&cli.command).expect("serialisable");
    let (inputs, canonical) = match &cli.command {
        Command::Nabla { expr } | Command::Eop { expr, .. } | Command::Qop { expr, .. } => {
            let p = poly(cli, expr)?;
            let c = json!({ "op": name, "input": p.to_string() });
            (Inputs::Poly(p), c)
        }
        Command::Cupk { x, y, .. } => {
            let (x, y) = (poly(cli, x)?, poly(cli, y)?);
            let c = json!({ "op": name, "input": [x.to_string(), y.to_string()] });
            (Inputs::Cup(x, y), c)
        }
        Command::CobarD { word } => {
            let u = CobarSum::parse(word).map_err(usage)?;
            let c = json!({ "op": name, "input": u.to_string() });
            (Inputs::Cobar(u), c)
        }
        Command::CobarCup { u, v, .. } => {
            let (u, v) = (CobarSum::parse(u).map_err(usage)?, CobarSum::parse(v).map_err(usage)?);
            let c = json!({ "op": name, "input": [u.to_string(), v.to_string()] });
            (Inputs::CobarPair(u, v), c)
        }
        Command::MayD { expr, max_jump } => {
            if *max_jump == 0 {
                return Err(Usage("--max-jump must be at least 1".into()));
            }
            let w = PSWord::parse(expr).map_err(usage)?;
            let c = json!({ "op": name, "input": w.to_string() });
            (Inputs::Word(w), c)
        }
        Command::Verify { target, n } => {
            let param = matches!(target, Target::Thm22 | Target::Star | Target::Thm23);
            if n.is_some() && !param {
                return Err(Usage(format!("verify {} takes no --n", target_name(*target))));
            }
            (Inputs::None, name)
        }
        _ => (Inputs::None, name),
    };
    Ok(Prepared { canonical, inputs })
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Thm10 => "thm10",
        Target::Thm11 => "thm11",
        Target::Thm12 => "thm12",
        Target::Thm15 => "thm15",
        Target::Thm22 => "thm22",
        Target::Star => "star",
        Target::Thm23 => "thm23",
    }
}

fn text(s: String) -> Outcome {
    Outcome { exit: 0, body: s.into_bytes() }
}

fn json_out(v: &Value, exit: u8) -> Outcome {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    Outcome { exit, body: s.into_bytes() }
}

fn emit(cli: &Cli, plain: String, v: Value) -> Outcome {
    match cli.format {
        Format::Json => json_out(&v, 0),
        _ => text(plain + "\n"),
    }
}

pub fn execute(cli: &Cli, conv: &ConventionTable, p: Prepared) -> Result<Outcome, Usage> {
    let m = mode(cli);
    let strict = AInfinityData::strict();
    Ok(match (&cli.command, p.inputs) {
        (Command::Nabla { .. }, Inputs::Poly(x)) => {
            let c = coproduct(&x, m);
            let terms: Vec<Vec<String>> = c.terms().map(|t| t.iter().map(|m| m.to_string()).collect()).collect();
            emit(cli, c.to_string(), json!({ "input": x.to_string(), "coproduct": c.to_string(), "terms": terms }))
        }
        (Command::Eop { i, .. }, Inputs::Poly(x)) => {
            let r = e_op(*i, &x).normalized(m);
            emit(cli, r.to_string(), json!({ "op": format!("e{i}"), "input": x.to_string(), "value": r.to_string() }))
        }
        (Command::Qop { j, .. }, Inputs::Poly(x)) => {
            let r = q_op(*j, &x).normalized(m);
            emit(cli, r.to_string(), json!({ "op": format!("Q{j}"), "input": x.to_string(), "value": r.to_string() }))
        }
        (Command::Cupk { i, .. }, Inputs::Cup(x, y)) => match cup_k(*i, &x, &y, conv) {
            Ok(r) => {
                let r = r.normalized(m);
                emit(cli, r.to_string(), json!({ "i": i, "input": [x.to_string(), y.to_string()], "value": r.to_string(), "conventions": conv.hash() }))
            }
            Err(e) => {
                let v = json!({ "i": i, "input": [x.to_string(), y.to_string()], "error": "ConventionGap", "detail": e.to_string(), "conventions": conv.hash() });
                match cli.format {
                    Format::Json => json_out(&v, 1),
                    _ => Outcome { exit: 1, body: format!("ConventionGap: {e}\n").into_bytes() },
                }
            }
        },
        (Command::CobarD { .. }, Inputs::Cobar(u)) => {
            let d = cobar_diff_sum(&u, &strict);
            emit(cli, d.to_string(), json!({ "input": u.to_string(), "value": d.to_string() }))
        }
        (Command::CobarCup { i, .. }, Inputs::CobarPair(u, v)) => {
            let r = cobar_cup(*i, &u, &v);
            emit(cli, r.to_string(), json!({ "i": i, "input": [u.to_string(), v.to_string()], "value": r.to_string() }))
        }
        (Command::ExtChart { may, page }, _) => ext_chart(cli, conv, *may, *page)?,
        (Command::MayD { max_jump, .. }, Inputs::Word(w)) => {
            let split = transfer_diff(&w, *max_jump).map_err(usage)?;
            let mut plain = String::new();
            let mut comps = serde_json::Map::new();
            for (jump, v) in &split.components {
                writeln!(plain, "d{jump}: {v}").unwrap();
                comps.insert(jump.to_string(), json!(v.to_string()));
            }
            writeln!(plain, "total: {}", split.total()).unwrap();
            let v = json!({ "input": w.to_string(), "s": w.s(), "t": w.t(), "components": comps, "total": split.total().to_string() });
            match cli.format {
                Format::Json => json_out(&v, 0),
                _ => text(plain),
            }
        }
        (Command::Verify { target, n }, _) => verify_target(cli, conv, *target, *n)?,
        (Command::Kervaire { n }, _) => {
            if !(3..=6).contains(n) {
                return Err(Usage(format!("kervaire needs 3 ≤ N ≤ 6, got {n}")));
            }
            let window = verify::pipeline_window(*n, stem(cli), filt(cli));
            let report = verify::pipeline(*n, window, conv);
            let verdict = verify::pipeline_verdict(&report);
            let exit = u8::from(!verdict.pass);
            match cli.format {
                Format::Json => json_out(&json!({ "report": report, "pass": verdict.pass }), exit),
                _ => Outcome { exit, body: verdict_text(&verdict, conv, &format!("kervaire {n}")).into_bytes() },
            }
        }
        (Command::FhoVerify, _) => finish(cli, conv, verify::fho_structural(), "fho-verify"),
        _ => unreachable!("inputs prepared for a different command"),
    })
}

fn stem(cli: &Cli) -> Option<i64> {
    cli.max_stem.map(|v| v as i64)
}

fn filt(cli: &Cli) -> Option<i64> {
    cli.max_filt.map(|v| v as i64)
}

fn ext_chart(cli: &Cli, conv: &ConventionTable, may: bool, page: u32) -> Result<Outcome, Usage> {
    let window = Window { max_stem: stem(cli).unwrap_or(12), max_filt: filt(cli).unwrap_or(5) };
    let chart = if may {
        if page < 1 {
            return Err(Usage("--page must be at least 1".into()));
        }
        page_compute(page, window, conv).map_err(usage)?
    } else {
        let strict = AInfinityData::strict();
        let max_t = cli.max_t.unwrap_or(u64::MAX);
        let mut cells = Vec::new();
        for stem in 0..=window.max_stem as u64 {
            for s in 0..=window.max_filt as usize {
                if stem + s as u64 <= max_t {
                    cells.push(cobar_ext(s, stem + s as u64, &strict));
                }
            }
        }
        Chart {
            window,
            page: 2,
            cells: cells
                .into_iter()
                .filter(|c| c.dim > 0)
                .map(|c| ChartCell { stem: c.t as i64 - c.s as i64, filt: c.s as i64, dim: c.dim, gens: c.representatives })
                .collect(),
            differentials: Vec::new(),
            conventions: conv.hash(),
        }
    };
    let json = serde_json::to_string_pretty(&chart).expect("serialisable") + "\n";
    Ok(match cli.format {
        Format::Json => text(json),
        Format::Svg => text(crate::svg::render(&json).map_err(usage)?),
        Format::Text => {
            let mut s = format!("E{} page, stems ≤ {}, filtrations ≤ {}\n", chart.page, window.max_stem, window.max_filt);
            for c in &chart.cells {
                writeln!(s, "({}, {}) dim {}: {}", c.stem, c.filt, c.dim, c.gens.join(", ")).unwrap();
            }
            for d in &chart.differentials {
                writeln!(s, "d{}({}) = {}", d.page, d.source, d.target).unwrap();
            }
            text(s)
        }
    })
}

fn verify_target(cli: &Cli, conv: &ConventionTable, t: Target, n: Option<u32>) -> Result<Outcome, Usage> {
    let label = match n {
        Some(n) => format!("verify {} --n {n}", target_name(t)),
        None => format!("verify {}", target_name(t)),
    };
    let verdict = match t {
        Target::Thm10 => verify::e_relations(),
        Target::Thm11 => verify::e_tables(),
        Target::Thm12 => verify::fho_closed_direct(),
        Target::Thm15 => verify::cobar_cups(),
        Target::Thm22 => verify::d_hn_formula(n.unwrap_or(4), conv).map_err(Usage)?,
        Target::Star => {
            let ns = n.map_or(vec![3, 4, 5], |n| vec![n]);
            verify::star(&ns).map_err(Usage)?
        }
        Target::Thm23 => {
            let n = n.unwrap_or(4);
            if !(3..=6).contains(&n) {
                return Err(Usage(format!("--n must lie in 3..=6, got {n}")));
            }
            let window = verify::pipeline_window(n, stem(cli), filt(cli));
            verify::pipeline_verdict(&verify::pipeline(n, window, conv))
        }
    };
    Ok(finish(cli, conv, verdict, &label))
}

fn ledger(conv: &ConventionTable) -> Value {
    json!({
        "name": conv.name,
        "hash": conv.hash(),
        "mixed_cup": conv.mixed_cup,
        "overrides": conv.overrides,
    })
}

fn verdict_text(v: &Verdict, conv: &ConventionTable, label: &str) -> String {
    let mut s = format!("{label}: {}\n", if v.pass { "PASS" } else { "FAIL" });
    for c in &v.checks {
        writeln!(s, "  [{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
    }
    let mixed = serde_json::to_value(conv.mixed_cup).expect("serialisable");
    writeln!(s, "conventions:").unwrap();
    writeln!(s, "  name: {}", conv.name).unwrap();
    writeln!(s, "  hash: {}", conv.hash()).unwrap();
    writeln!(s, "  mixed_cup: {}", mixed.as_str().unwrap_or_default()).unwrap();
    if conv.overrides.is_empty() {
        writeln!(s, "  overrides: none").unwrap();
    } else {
        writeln!(s, "  overrides:").unwrap();
        for o in &conv.overrides {
            writeln!(s, "    {} ∪{} {} = {}", o.x, o.i, o.y, o.value).unwrap();
        }
    }
    s
}

fn finish(cli: &Cli, conv: &ConventionTable, v: Verdict, label: &str) -> Outcome {
    let exit = u8::from(!v.pass);
    match cli.format {
        Format::Json => json_out(&json!({ "verdict": v, "conventions": ledger(conv) }), exit),
        _ => Outcome { exit, body: verdict_text(&v, conv, label).into_bytes() },
    }
}
