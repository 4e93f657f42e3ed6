//! `itt`: command-line front end for the `itt-core` library.
//!
//! Exit codes: 0 for a positive outcome (sensible, proven, valid, pass),
//! 1 for a negative one (non-sensible, invalid, fail), 2 for unknown or
//! out of budget, 3 for usage, parse and I/O errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use itt_core::assign::{check_derivation, infer_bounded, parse_derivation, render_tree, Basis, InferOutcome};
use itt_core::embed::{parse_map, verify_embedding, ConstantMap, EmbeddingVerdict};
use itt_core::lambda::{head_reduce, head_step, parse_term, HeadOutcome, Term};
use itt_core::polarity::{analyze, PolarityVerdict};
use itt_core::report::Report;
use itt_core::sensibility::{
    builtin_theories, corpus_verdicts, probe_unsolvable_typing, revalidate_verdict, verdict, Budget,
    PipelineContext, SensibilityVerdict, TheoryRegistry, UnsolvableProbe,
};
use itt_core::subtype::{beta_soundness_probe, derive_le, set_condition_probe, CheckResult, SubtypeVerdict};
use itt_core::types::{parse_theory, parse_ty, TheorySpec};

#[derive(Parser)]
#[command(name = "itt", version, about = "Workbench for intersection type theories")]
struct Cli {
    /// Print the JSON report instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    #[arg(long, default_value_t = 10_000)]
    fuel: usize,
    #[arg(long, default_value_t = 2)]
    width: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
}

impl From<BudgetArgs> for Budget {
    fn from(b: BudgetArgs) -> Budget {
        Budget {
            fuel: b.fuel,
            width: b.width,
            depth: b.depth,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Head-reduce a term (inline or from a file).
    Reduce {
        term: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
    },
    /// Decide `A <= B` within a bounded universe.
    Subtype {
        theory: String,
        /// A query of the form `A <= B`.
        query: String,
        #[arg(long, default_value_t = 2)]
        width: usize,
    },
    /// Check a derivation certificate.
    Check { theory: String, derivation: PathBuf },
    /// Search for a derivation of `basis |- term : type`.
    Infer {
        theory: String,
        term: String,
        #[arg(value_name = "TYPE")]
        ty: String,
        /// Comma-separated `x:A` entries.
        #[arg(long, default_value = "")]
        basis: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Positive polarity analysis of a natural theory.
    Polarity { theory: String },
    /// Verify an embedding given by a map file of `c -> TY` lines.
    Embed {
        source: String,
        target: String,
        map: PathBuf,
        #[arg(long, default_value_t = 2)]
        width: usize,
    },
    /// Run the sensibility pipeline.
    Sensibility {
        theory: String,
        /// Extra embedding into another theory.
        #[arg(long = "into", value_name = "THEORY=MAP")]
        into: Vec<String>,
        /// Extra embedding from another theory.
        #[arg(long = "from", value_name = "THEORY=MAP")]
        from: Vec<String>,
        /// File with extra unsolvable terms, one per line.
        #[arg(long)]
        pool: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the pipeline over the built-in theories and compare with the
    /// golden verdicts.
    Corpus {
        /// Theory names; all built-ins when empty.
        names: Vec<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value = "corpus/golden/verdicts.json")]
        golden: PathBuf,
        /// Overwrite the golden file with the computed verdicts.
        #[arg(long)]
        write_golden: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the bounded soundness probes and the unsolvable probe.
    Probe {
        theory: String,
        #[arg(long)]
        pool: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

struct Outcome {
    report: Report,
    text: String,
    code: u8,
}

type CliResult<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// A theory from a file, `file.itt`, or a built-in name.
fn load_theory(arg: &str, registry: &TheoryRegistry) -> CliResult<(TheorySpec, String)> {
    for candidate in [PathBuf::from(arg), PathBuf::from(format!("{arg}.itt"))] {
        if candidate.is_file() {
            let src = read(&candidate)?;
            let spec = parse_theory(&src).map_err(|e| format!("{}: {e}", candidate.display()))?;
            return Ok((spec, src));
        }
    }
    match registry.get(arg) {
        Some(entry) => {
            let src = entry.spec.to_itt();
            Ok((entry.spec, src))
        }
        None => Err(format!("no theory file or built-in theory named `{arg}`")),
    }
}

fn inline_or_file(arg: &str) -> CliResult<String> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(read(p)?.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn load_pool(path: Option<&PathBuf>) -> CliResult<Vec<(String, Term)>> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    read(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| parse_term(l).map(|t| (l.to_string(), t)).map_err(err))
        .collect()
}

fn parse_basis(src: &str) -> CliResult<Basis> {
    let mut g = Basis::new();
    for entry in src.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (x, ty) = entry
            .split_once(':')
            .ok_or_else(|| format!("basis entry `{entry}` is not of the form x:TYPE"))?;
        g.insert(x.trim().to_string(), parse_ty(ty).map_err(err)?);
    }
    Ok(g)
}

const TRACE_LIMIT: usize = 50;

fn cmd_reduce(term: &str, fuel: usize) -> CliResult<Outcome> {
    let src = inline_or_file(term)?;
    let m = parse_term(&src).map_err(err)?;
    let mut trace = vec![m.clone()];
    while trace.len() <= TRACE_LIMIT.min(fuel) {
        match head_step(trace.last().expect("nonempty")) {
            Some(next) => trace.push(next),
            None => break,
        }
    }
    let outcome = head_reduce(&m, fuel);
    let mut text: String = trace.iter().enumerate().map(|(i, t)| format!("{i:>5}  {t}\n")).collect();
    let code = match &outcome {
        HeadOutcome::Reached { hnf, steps } => {
            text.push_str(&format!("head normal form after {steps} step(s): {hnf}\n"));
            0
        }
        HeadOutcome::FuelExhausted { .. } => {
            text.push_str(&format!("fuel exhausted after {fuel} step(s)\n"));
            2
        }
    };
    let report = Report::new("reduce")
        .input("term", src.as_bytes())
        .verdict(json!({ "fuel": fuel, "result": outcome, "trace": trace }));
    Ok(Outcome { report, text, code })
}

fn cmd_subtype(reg: &TheoryRegistry, theory: &str, query: &str, width: usize) -> CliResult<Outcome> {
    let (t, src) = load_theory(theory, reg)?;
    let (a, b) = query
        .split_once("<=")
        .ok_or_else(|| format!("query `{query}` is not of the form A <= B"))?;
    let (a, b) = (parse_ty(a).map_err(err)?, parse_ty(b).map_err(err)?);
    let v = derive_le(&t, &a, &b, width).map_err(err)?;
    let (text, code) = match &v {
        SubtypeVerdict::Proven(p) => (format!("Proven: {a} <= {b}\n{p}\n"), 0),
        SubtypeVerdict::UnknownWithin { universe_size, inter_width } => (
            format!("UnknownWithin: {a} <= {b} not derived in a universe of {universe_size} types (width {inter_width})\n"),
            2,
        ),
    };
    let report = Report::new("subtype")
        .input("theory", src.as_bytes())
        .input("query", query.as_bytes())
        .verdict(json!({ "lhs": a, "rhs": b, "width": width, "result": v }));
    Ok(Outcome { report, text, code })
}

fn cmd_check(reg: &TheoryRegistry, theory: &str, path: &Path) -> CliResult<Outcome> {
    let (t, src) = load_theory(theory, reg)?;
    let dsrc = read(path)?;
    let d = parse_derivation(&dsrc).map_err(|e| format!("{}: {e}", path.display()))?;
    let r = check_derivation(&t, &d);
    let (text, code) = match &r {
        CheckResult::Valid => (format!("Valid: {}\n", d.conclusion), 0),
        CheckResult::Invalid { node_path, reason } => (format!("Invalid at {node_path:?}: {reason}\n"), 1),
    };
    let report = Report::new("check")
        .input("theory", src.as_bytes())
        .input("derivation", dsrc.as_bytes())
        .verdict(json!({ "conclusion": d.conclusion.to_string(), "result": r }));
    Ok(Outcome { report, text, code })
}

fn cmd_infer(reg: &TheoryRegistry, theory: &str, term: &str, ty: &str, basis: &str, b: Budget) -> CliResult<Outcome> {
    let (t, src) = load_theory(theory, reg)?;
    let g = parse_basis(basis)?;
    let m = parse_term(&inline_or_file(term)?).map_err(err)?;
    let target = parse_ty(ty).map_err(err)?;
    let out = infer_bounded(&t, &g, &m, &target, b.fuel, b.width).map_err(err)?;
    let (text, code, result, cert) = match &out {
        InferOutcome::Found(d) => (format!("Found:\n{}", render_tree(d)), 0, "Found", Some(d)),
        InferOutcome::NotFoundWithinFuel => (format!("NotFoundWithinFuel (fuel {})\n", b.fuel), 2, "NotFoundWithinFuel", None),
    };
    let report = Report::new("infer")
        .input("theory", src.as_bytes())
        .input("judgment", format!("{basis} |- {m} : {target}").as_bytes())
        .verdict(json!({ "result": result, "fuel": b.fuel, "width": b.width }))
        .certificates(json!({ "derivation": cert }));
    Ok(Outcome { report, text, code })
}

fn cmd_polarity(reg: &TheoryRegistry, theory: &str) -> CliResult<Outcome> {
    let (t, src) = load_theory(theory, reg)?;
    let r = analyze(&t).map_err(err)?;
    let mut text = String::from("characteristic set:\n");
    for (c, rhs) in &r.complete_set.axioms {
        text.push_str(&format!("  {c} ~ {rhs}\n"));
    }
    text.push_str("classes:\n");
    for (i, cls) in r.classes.iter().enumerate() {
        text.push_str(&format!("  [{i}] {{{}}}\n", cls.join(", ")));
    }
    for (i, j) in r.order.iter().filter(|(i, j)| i != j) {
        text.push_str(&format!("  [{i}] <= [{j}]\n"));
    }
    let code = match &r.verdict {
        PolarityVerdict::Pass => {
            text.push_str("verdict: Pass\n");
            0
        }
        PolarityVerdict::Fail(w) => {
            text.push_str(&format!("verdict: Fail, negative cycle {}\n", w.path.join(" -> ")));
            1
        }
    };
    for c in &r.caveats {
        text.push_str(&format!("caveat: {c}\n"));
    }
    if let Some(stages) = &r.stages {
        for (k, s) in stages.iter().enumerate() {
            let dec: Vec<String> = s
                .decoration
                .assignment
                .iter()
                .filter(|(c, _)| s.class.contains(*c))
                .map(|(c, p)| format!("{c}{p}")).collect();
            text.push_str(&format!("stage {}: {}\n", k + 1, dec.join(" ")));
        }
    }
    let report = Report::new("polarity").input("theory", src.as_bytes()).verdict(&r);
    Ok(Outcome { report, text, code })
}

fn load_map(reg: &TheoryRegistry, source: &str, target: &str, map: &Path) -> CliResult<(ConstantMap, [String; 3])> {
    let (s, ssrc) = load_theory(source, reg)?;
    let (t, tsrc) = load_theory(target, reg)?;
    let msrc = read(map)?;
    let m = parse_map(&msrc).map_err(|e| format!("{}: {e}", map.display()))?;
    Ok((ConstantMap::new(s, t, m).map_err(err)?, [ssrc, tsrc, msrc]))
}

fn cmd_embed(reg: &TheoryRegistry, source: &str, target: &str, map: &Path, width: usize) -> CliResult<Outcome> {
    let (k, [ssrc, tsrc, msrc]) = load_map(reg, source, target, map)?;
    let v = verify_embedding(&k, width).map_err(err)?;
    let (text, code) = match &v {
        EmbeddingVerdict::Verified { checks } => {
            let mut s = format!("Verified: {} -> {}\n", k.source.name, k.target.name);
            for c in checks {
                s.push_str(&format!("  {}\n", c.obligation));
            }
            (s, 0)
        }
        EmbeddingVerdict::Failed { obligation, detail } => (format!("Failed at {obligation}: {detail}\n"), 1),
        EmbeddingVerdict::UnknownWithin { obligation } => (format!("UnknownWithin: {obligation}\n"), 2),
    };
    let report = Report::new("embed")
        .input("source", ssrc.as_bytes())
        .input("target", tsrc.as_bytes())
        .input("map", msrc.as_bytes())
        .verdict(json!({ "source": k.source.name, "target": k.target.name, "map": k.map, "width": width }))
        .certificates(&v);
    Ok(Outcome { report, text, code })
}

fn verdict_code(v: &SensibilityVerdict) -> u8 {
    match v {
        SensibilityVerdict::Sensible(_) => 0,
        SensibilityVerdict::NonSensible(_) => 1,
        SensibilityVerdict::Unknown { .. } => 2,
    }
}

fn cmd_sensibility(
    reg: &TheoryRegistry,
    theory: &str,
    into: &[String],
    from: &[String],
    pool: Option<&PathBuf>,
    b: Budget,
) -> CliResult<Outcome> {
    let (t, src) = load_theory(theory, reg)?;
    let mut report = Report::new("sensibility").input("theory", src.as_bytes());
    let mut maps = Vec::new();
    let mut others = BTreeMap::new();
    for (spec, outward) in into.iter().map(|s| (s, true)).chain(from.iter().map(|s| (s, false))) {
        let (other, path) = spec
            .split_once('=')
            .ok_or_else(|| format!("`{spec}` is not of the form THEORY=MAP"))?;
        let (other_spec, _) = load_theory(other, reg)?;
        others.insert(other_spec.name.clone(), other_spec.clone());
        let msrc = read(Path::new(path))?;
        let m = parse_map(&msrc).map_err(|e| format!("{path}: {e}"))?;
        let k = if outward {
            ConstantMap::new(t.clone(), other_spec, m)
        } else {
            ConstantMap::new(other_spec, t.clone(), m)
        }
        .map_err(err)?;
        report = report.input(spec.clone(), msrc.as_bytes());
        maps.push(k);
    }
    let extra = load_pool(pool)?;
    let ctx = PipelineContext {
        registry: reg,
        maps: &maps,
        extra_pool: &extra,
    };
    let v = verdict(&t, b, &ctx);
    let lookup = |n: &str| others.get(n).cloned().or_else(|| reg.get(n).map(|e| e.spec));
    let revalidated = revalidate_verdict(&t, &v, reg, &lookup);
    let text = format!("{}: {}\n", t.name, v.summary());
    let code = verdict_code(&v);
    let report = report
        .verdict(json!({ "theory": t.name, "summary": v.summary(), "budget": b, "evidence_revalidated": revalidated }))
        .certificates(&v);
    Ok(Outcome { report, text, code })
}

fn cmd_corpus(reg: &TheoryRegistry, names: &[String], golden: &Path, write: bool, b: Budget) -> CliResult<Outcome> {
    let mut results = corpus_verdicts(reg, b);
    if !names.is_empty() {
        results.retain(|(n, _)| names.contains(n));
    }
    let lookup = |n: &str| reg.get(n).map(|e| e.spec);
    let summaries: BTreeMap<String, String> = results.iter().map(|(n, v)| (n.clone(), v.summary())).collect();
    let mut text = String::new();
    let mut ok = true;
    let expected: BTreeMap<String, String> = if write {
        let body = serde_json::to_string_pretty(&summaries).map_err(err)? + "\n";
        fs::write(golden, body).map_err(|e| format!("{}: {e}", golden.display()))?;
        summaries.clone()
    } else {
        serde_json::from_str(&read(golden)?).map_err(|e| format!("{}: {e}", golden.display()))?
    };
    let mut rows = Vec::new();
    for (n, v) in &results {
        let spec = reg.get(n).expect("registered").spec;
        let valid = revalidate_verdict(&spec, v, reg, &lookup);
        let want = expected.get(n).map(String::as_str).unwrap_or("(missing)");
        let matches = want == v.summary();
        ok &= matches && valid;
        text.push_str(&format!(
            "{:<4} {n:<8} {:<28} evidence {}\n",
            if matches { "ok" } else { "DIFF" },
            v.summary(),
            if valid { "re-validated" } else { "REJECTED" }
        ));
        if !matches {
            text.push_str(&format!("     expected {want}\n"));
        }
        rows.push(json!({ "theory": n, "summary": v.summary(), "expected": want, "evidence_revalidated": valid }));
    }
    let report = Report::new("corpus")
        .verdict(json!({ "budget": b, "all_match": ok, "theories": rows }))
        .certificates(results.iter().map(|(n, v)| (n.clone(), v)).collect::<BTreeMap<_, _>>());
    Ok(Outcome {
        report,
        text,
        code: if ok { 0 } else { 1 },
    })
}

fn cmd_probe(reg: &TheoryRegistry, theory: &str, pool: Option<&PathBuf>, b: Budget) -> CliResult<Outcome> {
    let (t, src) = load_theory(theory, reg)?;
    let beta = beta_soundness_probe(&t, b.depth, b.width).map_err(err)?;
    let set = set_condition_probe(&t, b.depth, b.width).map_err(err)?;
    let unsolvable = probe_unsolvable_typing(&t, b.fuel, b.width, &load_pool(pool)?).map_err(err)?;
    let mut text = String::new();
    match beta.counterexample() {
        Some(c) => text.push_str(&format!("beta soundness: counterexample {} <= {}\n", c.lhs, c.rhs)),
        None => text.push_str(&format!("beta soundness: no counterexample up to depth {}\n", b.depth)),
    }
    match set.counterexample() {
        Some(c) => text.push_str(&format!("set condition: counterexample with rhs {}\n", c.rhs)),
        None => text.push_str(&format!("set condition: no counterexample up to depth {}\n", b.depth)),
    }
    match &unsolvable {
        UnsolvableProbe::Witness { name, witness } => {
            text.push_str(&format!("unsolvable probe: {name} : {}\n", witness.ty));
        }
        UnsolvableProbe::NoneFound { pairs_tried } => {
            text.push_str(&format!("unsolvable probe: nothing typed ({pairs_tried} pairs)\n"));
        }
    }
    let report = Report::new("probe")
        .input("theory", src.as_bytes())
        .verdict(json!({ "budget": b, "beta_soundness": beta, "set_condition": set, "unsolvable": unsolvable }));
    Ok(Outcome { report, text, code: 0 })
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let reg = builtin_theories();
    match &cli.cmd {
        Cmd::Reduce { term, fuel } => cmd_reduce(term, *fuel),
        Cmd::Subtype { theory, query, width } => cmd_subtype(&reg, theory, query, *width),
        Cmd::Check { theory, derivation } => cmd_check(&reg, theory, derivation),
        Cmd::Infer {
            theory,
            term,
            ty,
            basis,
            budget,
        } => cmd_infer(&reg, theory, term, ty, basis, (*budget).into()),
        Cmd::Polarity { theory } => cmd_polarity(&reg, theory),
        Cmd::Embed {
            source,
            target,
            map,
            width,
        } => cmd_embed(&reg, source, target, map, *width),
        Cmd::Sensibility {
            theory,
            into,
            from,
            pool,
            budget,
        } => cmd_sensibility(&reg, theory, into, from, pool.as_ref(), (*budget).into()),
        Cmd::Corpus {
            names,
            all,
            golden,
            write_golden,
            budget,
        } => {
            let names: &[String] = if *all { &[] } else { names };
            cmd_corpus(&reg, names, golden, *write_golden, (*budget).into())
        }
        Cmd::Probe { theory, pool, budget } => cmd_probe(&reg, theory, pool.as_ref(), (*budget).into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.sequential {
        itt_core::par::set_parallel(false);
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                print!("{}", out.report.to_json());
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
