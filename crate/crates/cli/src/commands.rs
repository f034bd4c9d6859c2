use std::fmt;
use std::io::Write;

use anyhow::{Context, Result};
use serde_json::{json, Value as Json};

use dyckmotzkin::krieger::{collapse, reconstruct, PeriodicPoint};
use dyckmotzkin::language::{count_words, entropy_estimate, enumerate_words};
use dyckmotzkin::measures::{
    co_approx_with, measure_from_json, measure_to_json, parse_rational, point_to_json, weakstar_distance, ApproxConfig,
    WeakStarConfig,
};
use dyckmotzkin::optimize::{lambda_periodic_with, maximizer_probe_with, OptimizeConfig};
use dyckmotzkin::paths::{build_path, verify_path, PathConfig, PathReport, PathSpec};
use dyckmotzkin::reduce::periodic_admissible;
use dyckmotzkin::{
    classify, classify_measure, cylinder_prob, entropy, integral, reduce, transport_condition, Ambient,
    CylinderQuery, Error, LocallyConstantFn, MeasureSpec, Value, Word,
};

use crate::{Cli, Command, EmbedAction, Format, MeasureAction, PathArgs, RunConfig};

const MAX_ENTROPY_N: usize = 40;

/// An error with an explicit exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    CliError { code: 2, kind: "usage", message: message.into() }.into()
}

pub fn classify_error(e: &anyhow::Error) -> (u8, &'static str) {
    if let Some(c) = e.downcast_ref::<CliError>() {
        return (c.code, c.kind);
    }
    if let Some(err) = e.downcast_ref::<Error>() {
        return match err {
            Error::InvalidInput(_) | Error::Json(_) => (2, "invalid_input"),
            Error::Precondition(_) => (2, "precondition"),
            Error::NoMatch { .. } => (2, "no_match"),
            Error::TransportCondition { .. } => (4, "transport_condition"),
            Error::Resource(_) => (5, "resource"),
            Error::Budget(_) => (5, "budget"),
            Error::SearchCap { .. } => (5, "search_cap"),
            Error::Numerical(_) => (1, "numerical"),
        };
    }
    if e.downcast_ref::<serde_json::Error>().is_some() || e.downcast_ref::<std::io::Error>().is_some() {
        return (2, "input");
    }
    (1, "internal")
}

/// Reads a JSON argument: inline when it starts with `{`, otherwise a file.
fn load_json(arg: &str) -> Result<Json> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {arg}"))
}

fn print_json(v: &Json) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn value_text(v: &Value, precision: usize) -> String {
    match v {
        Value::Exact(q) => format!("{q},{:.*},0", precision, dyckmotzkin::measures::rational_to_f64(q)),
        Value::Approx { value, error } => format!(",{value:.precision$},{error:e}"),
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    let run = &cli.run;
    let params = run.params()?;
    let format = run.format;
    match &cli.command {
        Command::Reduce { word } => {
            let w = Word::parse_in(word, &params, Ambient::SigmaD)?;
            let r = reduce(&params, &w)?;
            if format == Some(Format::Json) {
                print_json(&json!({
                    "word": w.to_string(),
                    "normal_form": r.to_string(),
                    "zero": r.zero,
                    "rights": r.rights,
                    "lefts": r.lefts,
                }));
            } else {
                println!("{r}");
            }
        }
        Command::Classify { word } => {
            let w = Word::parse_in(word, &params, Ambient::SigmaD)?;
            let class = classify(&params, &w)?;
            let periodic = if periodic_admissible(&params, &w)? {
                Some(PeriodicPoint::new(params, Ambient::SigmaD, w.clone())?.class())
            } else {
                None
            };
            if format == Some(Format::Json) {
                print_json(&json!({
                    "word": w.to_string(),
                    "class": class.to_string(),
                    "periodic_class": periodic.map(|c| c.to_string()),
                }));
            } else {
                match periodic {
                    Some(c) => println!("{class} {c}"),
                    None => println!("{class}"),
                }
            }
        }
        Command::Count { n } => {
            let c = count_words(&params, *n);
            if format == Some(Format::Json) {
                print_json(&json!({"n": n, "count": c.to_string()}));
            } else {
                println!("{c}");
            }
        }
        Command::Enumerate { n, cap } => {
            let words: Vec<String> = enumerate_words(&params, *n, *cap)?.map(|w| w.to_string()).collect();
            if format == Some(Format::Json) {
                print_json(&json!({"n": n, "count": words.len(), "words": words}));
            } else {
                let mut out = std::io::stdout().lock();
                for w in words {
                    match writeln!(out, "{w}") {
                        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => break,
                        other => other?,
                    }
                }
            }
        }
        Command::Entropy { n_max } => entropy_table(run, *n_max)?,
        Command::Embed { action } => embed(run, action)?,
        Command::Measure { action } => measure(run, action)?,
        Command::Approx { spec, n, neutral_side } => {
            let seed = run.seed()?;
            let mu = measure_from_json(&load_json(spec)?, params)?;
            let cfg = ApproxConfig { neutral_side: (*neutral_side).into(), ..ApproxConfig::default() };
            let a = co_approx_with(&mu, *n, seed, &cfg)?;
            let d = weakstar_distance(&a, &mu, &WeakStarConfig::default())?;
            let period = a.as_co().map(|p| p.period()).unwrap_or(0);
            if format == Some(Format::Csv) {
                println!("cycle,period,distance");
                println!("{},{period},{:.*}", a.as_co().expect("periodic").cycle(), run.precision, d.value.to_f64());
            } else {
                print_json(&json!({
                    "approximant": measure_to_json(&a),
                    "period": period,
                    "distance": d.value.to_json(),
                    "truncation": d.truncation,
                }));
            }
        }
        Command::Path(args) => return path(run, args),
        Command::Optimize { function, p, tol, node_cap } => {
            let f = LocallyConstantFn::from_json(&load_json(function)?, params)?;
            let mut cfg = OptimizeConfig::default();
            if let Some(cap) = node_cap {
                cfg.node_cap = *cap;
            }
            let outcome = match tol {
                Some(t) => maximizer_probe_with(&f, *p, &parse_rational(t)?, &cfg).map(|r| r.to_json()),
                None => lambda_periodic_with(&f, *p, &cfg).map(|r| r.to_json()),
            };
            match outcome {
                Ok(mut v) => {
                    v["partial"] = json!(false);
                    print_json(&v);
                }
                Err(Error::SearchCap { message, best_so_far }) => {
                    let best = best_so_far.map(|b| b.to_json());
                    print_json(&json!({"partial": true, "best_so_far": best, "message": message}));
                    return Err(Error::SearchCap { message, best_so_far: None }.into());
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(0)
}

fn entropy_table(run: &RunConfig, n_max: usize) -> Result<()> {
    if n_max > MAX_ENTROPY_N {
        return Err(CliError {
            code: 3,
            kind: "n_max",
            message: format!("--n-max {n_max} exceeds the limit {MAX_ENTROPY_N}"),
        }
        .into());
    }
    let params = run.params()?;
    let limit = params.full_shift_entropy();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        rows.push((n, count_words(&params, n), entropy_estimate(&params, n)?));
    }
    if run.format == Some(Format::Json) {
        print_json(&json!({
            "rows": rows.iter().map(|(n, c, e)| json!({"n": n, "count": c.to_string(), "estimate": e})).collect::<Vec<_>>(),
            "log_alphabet": limit,
        }));
    } else {
        let p = run.precision;
        println!("n,count,estimate");
        for (n, c, e) in rows {
            println!("{n},{c},{e:.p$}");
        }
        println!("log(M+N+1),,{limit:.p$}");
    }
    Ok(())
}

fn embed(run: &RunConfig, action: &EmbedAction) -> Result<()> {
    let params = run.params()?;
    let out = match action {
        EmbedAction::Collapse { gamma, cycle } => {
            let x = PeriodicPoint::parse(params, Ambient::SigmaD, cycle)?;
            collapse(&x, (*gamma).into())?
        }
        EmbedAction::Reconstruct { gamma, cycle } => {
            let g = (*gamma).into();
            let y = PeriodicPoint::parse(params, Ambient::collapsed(g), cycle)?;
            reconstruct(&y, g)?
        }
    };
    if run.format == Some(Format::Json) {
        print_json(&point_to_json(&out));
    } else {
        println!("{}", out.cycle());
    }
    Ok(())
}

fn measure(run: &RunConfig, action: &MeasureAction) -> Result<()> {
    let params = run.params()?;
    let load = |arg: &str| -> Result<MeasureSpec> { Ok(measure_from_json(&load_json(arg)?, params)?) };
    let csv = run.format == Some(Format::Csv);
    let p = run.precision;
    match action {
        MeasureAction::Cylinder { spec, word } => {
            let mu = load(spec)?;
            let w = Word::parse_in(word, &params, mu.ambient())?;
            let v = cylinder_prob(&mu, &CylinderQuery::new(w.clone()))?;
            if csv {
                println!("word,fraction,decimal,error");
                println!("{w},{}", value_text(&v, p));
            } else {
                print_json(&json!({"word": w.to_string(), "value": v.to_json()}));
            }
        }
        MeasureAction::Integral { spec, function } => {
            let mu = load(spec)?;
            let f = LocallyConstantFn::from_json(&load_json(function)?, params)?;
            let v = integral(&mu, &f)?;
            if csv {
                println!("fraction,decimal,error");
                println!("{}", value_text(&v, p));
            } else {
                print_json(&json!({"integral": v.to_json()}));
            }
        }
        MeasureAction::Entropy { spec } => {
            let h = entropy(&load(spec)?)?;
            if csv {
                println!("value,lower,upper");
                println!("{:.p$},{:.p$},{:.p$}", h.value, h.lower, h.upper);
            } else {
                print_json(&json!({"entropy": h.value, "lower": h.lower, "upper": h.upper}));
            }
        }
        MeasureAction::Classify { spec } => {
            let c = classify_measure(&load(spec)?)?;
            if csv {
                println!("{c}");
            } else {
                print_json(&json!({"class": c.to_string()}));
            }
        }
        MeasureAction::Distance { spec, other, max_len } => {
            let d = weakstar_distance(&load(spec)?, &load(other)?, &WeakStarConfig { max_len: *max_len })?;
            if csv {
                println!("fraction,decimal,error,truncation");
                println!("{},{:e}", value_text(&d.value, p), d.truncation);
            } else {
                print_json(&json!({"distance": d.value.to_json(), "truncation": d.truncation, "max_len": max_len}));
            }
        }
        MeasureAction::Transport { spec, gamma } => {
            let inner = load(spec)?;
            let g = (*gamma).into();
            let e = transport_condition(&inner, g)?;
            let pushed = MeasureSpec::pushforward(g, inner)?;
            if csv {
                println!("fraction,decimal,error");
                println!("{}", value_text(&e, p));
            } else {
                print_json(&json!({"measure": measure_to_json(&pushed), "transport_integral": e.to_json()}));
            }
        }
    }
    Ok(())
}

fn path(run: &RunConfig, args: &PathArgs) -> Result<u8> {
    let params = run.params()?;
    if args.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let path = match &args.replay {
        Some(file) => PathSpec::from_json(&load_json(file)?, params)?,
        None => {
            let seed = run.seed()?;
            let plus = measure_from_json(&load_json(args.plus.as_deref().expect("required by clap"))?, params)?;
            let minus = measure_from_json(&load_json(args.minus.as_deref().expect("required by clap"))?, params)?;
            let cfg = PathConfig { levels: args.levels, central_segments: args.central_segments, ..PathConfig::default() };
            build_path(&plus, &minus, args.gamma.into(), &cfg, seed)?
        }
    };
    if let Some(out) = &args.save {
        std::fs::write(out, serde_json::to_string_pretty(&path.to_json())?)
            .with_context(|| format!("cannot write {}", out.display()))?;
    }
    let metric = WeakStarConfig::default();
    let report = verify_path(&path, args.grid, &metric)?;
    let refined = verify_path(&path, 2 * args.grid - 1, &metric)?;
    let refinement_ok = refined.max_gap <= report.max_gap;
    let ok = report.start_exact && report.end_exact && refinement_ok;
    if run.format == Some(Format::Json) {
        print_json(&json!({
            "path": path.to_json(),
            "report": report,
            "refined_max_gap": refined.max_gap,
            "refinement_ok": refinement_ok,
        }));
    } else {
        print!("{}", report.to_csv());
    }
    if !ok {
        eprintln!("dmshift: path check failed: {}", failure_summary(&report, refined.max_gap));
        return Ok(1);
    }
    Ok(0)
}

fn failure_summary(r: &PathReport, refined: f64) -> String {
    let mut parts = Vec::new();
    if !r.start_exact {
        parts.push("path(0) differs from the start measure".to_string());
    }
    if !r.end_exact {
        parts.push("path(1) differs from the end measure".to_string());
    }
    if refined > r.max_gap {
        parts.push(format!("refined grid max gap {refined} exceeds {}", r.max_gap));
    }
    parts.join("; ")
}
