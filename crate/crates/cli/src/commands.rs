use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use tcl_core::certificate::{divisible_cycle_certificate, search_certificate, verify_certificate, Certificate};
use tcl_core::intersection::{
    chained_edge_selection, find_common_selection, tripartite_common_element, SelectionInstance, DEFAULT_BUDGET,
};
use tcl_core::opt::{
    self, goal_grid_max, grid_max, maximize, nomin_rescale, objective, proof_chain_check, repair_ineq, sweep_chain,
    sweep_strange, MaximizeConfig, Minimum, OptPoint, Problem, TypeTriple,
};
use tcl_core::palette::{self, host_from_coloring, verify_freeness, FreenessMode, PairColoring, Palette};
use tcl_core::partitioned::{PartitionedHypergraph, DEFAULT_EMBED_BUDGET};
use tcl_core::schedules::{build_schedule, case_hypotheses, verify_case, verify_schedule, EmbeddingTheorem, Hypothesis};
use tcl_core::{Error, Hypergraph3};

use crate::io::{read_json, write_csv, Ctx};
use crate::{CertCmd, Command, MinimumArg, ModeArg, OptCmd, Outcome, PaletteCmd, PhCmd, ScheduleCmd, Target, WitnessCmd};

pub fn dispatch(ctx: &Ctx, command: Command) -> Result<Outcome> {
    match command {
        Command::Palette(c) => palette_cmd(ctx, c),
        Command::Cert(c) => cert_cmd(ctx, c),
        Command::Ph(c) => ph_cmd(ctx, c),
        Command::Witness(c) => witness_cmd(ctx, c),
        Command::Opt(c) => opt_cmd(ctx, c),
        Command::Schedule(c) => schedule_cmd(ctx, c),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Error::InvalidParameter(msg.into()))
}

fn load_palette(path: Option<&Path>) -> Result<Palette> {
    match path {
        Some(p) => read_json(p, &["palette"]),
        None => Ok(Palette::lower_bound()),
    }
}

fn hypergraph(cycle: Option<usize>, file: Option<&Path>, nested: &[&str]) -> Result<Hypergraph3> {
    match (cycle, file) {
        (Some(l), _) => Ok(Hypergraph3::tight_cycle(l)?),
        (None, Some(p)) => read_json(p, nested),
        (None, None) => Err(usage("give a tight cycle length or a hypergraph file")),
    }
}

fn palette_cmd(ctx: &Ctx, cmd: PaletteCmd) -> Result<Outcome> {
    match cmd {
        PaletteCmd::Verify {
            palette,
            target: Target { cycle, forbidden },
            n,
            mode,
            samples,
            budget,
        } => {
            let pal = load_palette(palette.as_deref())?;
            let forbidden = hypergraph(cycle, forbidden.as_deref(), &["hypergraph"])?;
            let mode = match mode {
                ModeArg::Exhaustive => FreenessMode::Exhaustive,
                ModeArg::Sampled => FreenessMode::Sampled {
                    count: samples,
                    seed: ctx.seed,
                },
            };
            let report = verify_freeness(&pal, &forbidden, n, mode, budget.unwrap_or(palette::DEFAULT_BUDGET))?;
            log::info!("{} colourings examined, free = {}", report.colorings, report.free);
            let free = report.free;
            ctx.emit(json!({
                "palette": pal,
                "forbidden": forbidden,
                "n": n,
                "mode": mode,
                "free": report.free,
                "colorings": report.colorings.to_string(),
                "counterexample": report.counterexample,
                "copy": report.copy,
            }))?;
            Ok(Outcome::from_bool(free))
        }
        PaletteCmd::Density { palette } => {
            let pal = load_palette(palette.as_deref())?;
            let d = pal.density();
            ctx.emit(json!({
                "palette": pal,
                "density": d.to_string(),
                "value": *d.numer() as f64 / *d.denom() as f64,
            }))?;
            Ok(Outcome::Affirmative)
        }
        PaletteCmd::Host { palette, coloring } => {
            let pal = load_palette(palette.as_deref())?;
            let c: PairColoring = read_json(&coloring, &["counterexample", "coloring"])?;
            ctx.emit(host_from_coloring(&c, &pal)?)?;
            Ok(Outcome::Affirmative)
        }
    }
}

fn cert_cmd(ctx: &Ctx, cmd: CertCmd) -> Result<Outcome> {
    match cmd {
        CertCmd::Search {
            input,
            cycle,
            max_vertices,
        } => {
            let h = hypergraph(cycle, input.as_deref(), &["hypergraph"])?;
            let cert = search_certificate(&h, max_vertices)?;
            let found = cert.is_some();
            ctx.emit(json!({ "hypergraph": h, "found": found, "certificate": cert }))?;
            Ok(Outcome::from_bool(found))
        }
        CertCmd::Verify { input, cert } => {
            let h: Hypergraph3 = read_json(&input, &["hypergraph"])?;
            let c: Certificate = read_json(&cert, &["certificate"])?;
            let valid = verify_certificate(&h, &c)?;
            ctx.emit(json!({ "valid": valid }))?;
            Ok(Outcome::from_bool(valid))
        }
        CertCmd::Cycle { m } => {
            let (h, c) = divisible_cycle_certificate(m)?;
            let valid = verify_certificate(&h, &c)?;
            ctx.emit(json!({ "hypergraph": h, "certificate": c, "valid": valid }))?;
            Ok(Outcome::from_bool(valid))
        }
    }
}

fn ph_cmd(ctx: &Ctx, cmd: PhCmd) -> Result<Outcome> {
    match cmd {
        PhCmd::Density { input } => {
            let h: PartitionedHypergraph = read_json(&input, &["host"])?;
            let triads = h
                .triad_list()
                .map(|t| {
                    Ok(json!({
                        "triad": t,
                        "edges": h.edge_count(t),
                        "density": h.triad_density(t)?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            ctx.emit(json!({ "n": h.n(), "density": h.density()?, "triads": triads }))?;
            Ok(Outcome::Affirmative)
        }
        PhCmd::Embed {
            host,
            pattern,
            cycle,
            budget,
        } => {
            let h: PartitionedHypergraph = read_json(&host, &["host"])?;
            let pat = hypergraph(cycle, pattern.as_deref(), &["hypergraph"])?;
            let emb = h.find_embedding(&pat, budget.unwrap_or(DEFAULT_EMBED_BUDGET))?;
            let found = emb.is_some();
            ctx.emit(json!({ "found": found, "embedding": emb }))?;
            Ok(Outcome::from_bool(found))
        }
        PhCmd::Reverse { input } => {
            let h: PartitionedHypergraph = read_json(&input, &["host"])?;
            ctx.emit(h.reversed())?;
            Ok(Outcome::Affirmative)
        }
    }
}

fn parse_key(key: &str) -> Result<Vec<usize>> {
    key.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("bad index tuple \"{key}\""))))
        .collect()
}

#[derive(Deserialize)]
struct TripartiteInstance {
    /// Elements are `1..=x`.
    x: usize,
    i: Vec<usize>,
    j: Vec<usize>,
    k: Vec<usize>,
    n: usize,
    /// `"i,j,k"` → elements of `X_ijk`; absent triples are empty.
    #[serde(default)]
    sets: BTreeMap<String, BTreeSet<usize>>,
}

#[derive(Deserialize)]
struct ChainedInstance {
    host: PartitionedHypergraph,
    /// `"i,k"` → top vertex `γ_ik`.
    gamma: BTreeMap<String, usize>,
    n: usize,
    #[serde(default)]
    delta: f64,
}

fn witness_cmd(ctx: &Ctx, cmd: WitnessCmd) -> Result<Outcome> {
    let WitnessCmd::Find { instance, budget } = cmd;
    let text = std::fs::read_to_string(&instance).with_context(|| format!("reading {}", instance.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", instance.display()))?;
    let kind = value.get("kind").and_then(Value::as_str).unwrap_or("selection").to_string();
    let budget = budget.unwrap_or(DEFAULT_BUDGET);
    let (found, report) = match kind.as_str() {
        "selection" => {
            let inst: SelectionInstance = serde_json::from_value(value).context("decoding selection instance")?;
            let sel = find_common_selection(&inst, budget)?;
            if let Some(s) = &sel {
                anyhow::ensure!(inst.verify(s), "internal error: selection fails re-verification");
            }
            (sel.is_some(), json!({ "selection": sel }))
        }
        "tripartite" => {
            let inst: TripartiteInstance = serde_json::from_value(value).context("decoding tripartite instance")?;
            let sets = inst
                .sets
                .iter()
                .map(|(k, v)| match parse_key(k)?.as_slice() {
                    &[i, j, k] => Ok(((i, j, k), v.clone())),
                    _ => Err(usage(format!("\"{k}\" is not an index triple"))),
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            let member = |x, i, j, k| sets.get(&(i, j, k)).is_some_and(|s| s.contains(&x));
            let budget = u64::try_from(budget).unwrap_or(u64::MAX);
            let w = tripartite_common_element(inst.x, &inst.i, &inst.j, &inst.k, member, inst.n, budget)?;
            (w.is_some(), json!({ "witness": w }))
        }
        "chained" => {
            let inst: ChainedInstance = serde_json::from_value(value).context("decoding chained instance")?;
            let gamma = inst
                .gamma
                .iter()
                .map(|(k, v)| match parse_key(k)?.as_slice() {
                    &[i, k] => Ok(((i, k), *v)),
                    _ => Err(usage(format!("\"{k}\" is not an index pair"))),
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            let report = chained_edge_selection(&inst.host, &gamma, inst.n, inst.delta, budget)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            (report.selection.is_some(), serde_json::to_value(&report)?)
        }
        other => return Err(usage(format!("unknown instance kind \"{other}\""))),
    };
    let mut out = json!({ "kind": kind, "found": found });
    if let (Value::Object(o), Value::Object(r)) = (&mut out, report) {
        o.extend(r);
    }
    ctx.emit(out)?;
    Ok(Outcome::from_bool(found))
}

fn load_point(path: Option<&Path>) -> Result<OptPoint> {
    match path {
        Some(p) => read_json(p, &["best_point", "point"]),
        None => Ok(OptPoint::witness()),
    }
}

#[derive(Serialize)]
struct TallyRow<'a> {
    check: &'a str,
    pass: u64,
    fail: u64,
    skipped: u64,
    max_excess: f64,
}

fn opt_cmd(ctx: &Ctx, cmd: OptCmd) -> Result<Outcome> {
    match cmd {
        OptCmd::Solve {
            problem,
            method,
            starts,
            tolerance,
            max_iters,
            witness_start,
            trace,
        } => {
            let config = MaximizeConfig {
                problem: problem.parse()?,
                method: method.parse()?,
                starts,
                seed: ctx.seed,
                tolerance,
                max_iters,
                witness_start,
            };
            let report = maximize(&config)?;
            log::info!(
                "{} {}: best {:.12} from start {}",
                report.problem,
                report.method,
                report.best_value,
                report.best_start
            );
            if let Some(path) = &trace {
                write_csv(path, &report.trace)?;
            }
            let clean = report.anomalies.is_empty();
            let mut value = serde_json::to_value(&report)?;
            if let Value::Object(o) = &mut value {
                o.remove("trace");
                o.insert("four_27".into(), json!(opt::FOUR_27));
            }
            ctx.emit(value)?;
            Ok(Outcome::from_bool(clean))
        }
        OptCmd::Eval { point } => {
            let p = load_point(point.as_deref())?;
            let value = |problem| match objective(&p, problem) {
                Ok(v) => json!(v),
                Err(e) => json!({ "error": e.to_string() }),
            };
            ctx.emit(json!({
                "point": p,
                "quantities": p.derived(),
                "opt": value(Problem::Opt),
                "opt_ineq": value(Problem::OptIneq),
            }))?;
            Ok(Outcome::Affirmative)
        }
        OptCmd::Grid {
            problem,
            denominator,
            tolerance,
        } => {
            let g = grid_max(problem.parse()?, denominator, tolerance)?;
            let clean = g.above_optimum == 0;
            ctx.emit(g)?;
            Ok(Outcome::from_bool(clean))
        }
        OptCmd::CheckChain {
            point: Some(path),
            ..
        } => {
            let p: OptPoint = read_json(&path, &["best_point", "point"])?;
            let report = proof_chain_check(&p)?;
            let passed = report.passed();
            ctx.emit(json!({ "passed": passed, "report": report }))?;
            Ok(Outcome::from_bool(passed))
        }
        OptCmd::CheckChain {
            point: None,
            samples,
            strange_samples,
            grid_step,
            csv,
        } => {
            let chain = sweep_chain(samples, ctx.seed)?;
            let strange = sweep_strange(strange_samples.unwrap_or(samples), ctx.seed)?;
            let grid = goal_grid_max(grid_step)?;
            let grid_ok = grid.value <= opt::FOUR_27 + 1e-9;
            let passed = chain.passed() && strange.passed() && grid_ok;
            if let Some(path) = &csv {
                let rows = chain.tallies.iter().map(|t| TallyRow {
                    check: t.name,
                    pass: t.pass,
                    fail: t.fail,
                    skipped: t.skipped,
                    max_excess: t.max_excess,
                });
                let strange_row = TallyRow {
                    check: "six-term inequality",
                    pass: strange.samples - strange.failures,
                    fail: strange.failures,
                    skipped: 0,
                    max_excess: strange.max_excess,
                };
                write_csv(path, rows.chain(std::iter::once(strange_row)))?;
            }
            ctx.emit(json!({
                "passed": passed,
                "chain": chain,
                "strange": strange,
                "goal_grid": grid,
                "goal_grid_ok": grid_ok,
            }))?;
            Ok(Outcome::from_bool(passed))
        }
        OptCmd::Arrow { count } => {
            let mut out = json!({
                "related_pairs": opt::related_pairs().len(),
                "t_pairs": opt::t_pairs().len(),
                "r_pairs": opt::r_pairs().len(),
                "s_pairs": opt::s_pairs().len(),
            });
            if !count {
                let name = |i| TypeTriple::from_index(i).to_string();
                let list: Vec<_> = opt::related_pairs().iter().map(|&(s, t)| [name(s), name(t)]).collect();
                out["pairs"] = json!(list);
            }
            ctx.emit(out)?;
            Ok(Outcome::Affirmative)
        }
        OptCmd::Rescale { point, which, rounds } => {
            let p: OptPoint = read_json(&point, &["best_point", "point"])?;
            match which {
                MinimumArg::First | MinimumArg::Second => {
                    let which = if matches!(which, MinimumArg::First) {
                        Minimum::First
                    } else {
                        Minimum::Second
                    };
                    ctx.emit(nomin_rescale(&p, which)?)?;
                    Ok(Outcome::Affirmative)
                }
                MinimumArg::Repair => {
                    let fixed = repair_ineq(&p, rounds)?;
                    let ok = fixed.is_some();
                    ctx.emit(json!({ "repaired": ok, "point": fixed }))?;
                    Ok(Outcome::from_bool(ok))
                }
            }
        }
    }
}

fn schedule_cmd(ctx: &Ctx, cmd: ScheduleCmd) -> Result<Outcome> {
    match cmd {
        ScheduleCmd::Verify {
            theorem,
            case,
            m,
            n,
            json,
        } => {
            let mut s = build_schedule(theorem.parse()?, case, m)?;
            if let Some(n) = n {
                s = s.with_n(n);
            }
            let report = verify_schedule(&s, &s.hypotheses()?);
            let valid = report.valid;
            if json {
                ctx.emit(&report)?;
            } else {
                let mut text = format!(
                    "{} case {} m={} n={}: length {}\nindices {:?}\n",
                    report.theorem, report.case, report.m, report.n, report.length, report.indices
                );
                for p in &report.positions {
                    let by = p.certified_by.as_deref().unwrap_or("-");
                    writeln!(text, "{:>3}  {} , {}  {:?}  {}", p.position, p.vertex, p.next, p.indices, by)?;
                }
                for f in &report.failures {
                    writeln!(text, "FAIL {f}")?;
                }
                writeln!(text, "{}", if valid { "valid" } else { "invalid" })?;
                ctx.write_text(&text)?;
            }
            Ok(Outcome::from_bool(valid))
        }
        ScheduleCmd::VerifyAll { m_max } => {
            if m_max < 1 {
                return Err(usage("m-max must be at least 1"));
            }
            let mut results = Vec::new();
            let mut all = true;
            for th in [EmbeddingTheorem::TwoMod, EmbeddingTheorem::OneMod] {
                for case in 1..=4 {
                    let mut failed = Vec::new();
                    for m in 1..=m_max {
                        if !verify_case(th, case, m)?.valid {
                            failed.push(m);
                        }
                    }
                    all &= failed.is_empty();
                    results.push(json!({ "theorem": th, "case": case, "failed_m": failed }));
                }
            }
            ctx.emit(json!({ "m_max": m_max, "valid": all, "families": results }))?;
            Ok(Outcome::from_bool(all))
        }
        ScheduleCmd::Show { theorem, case, m } => {
            ctx.emit(build_schedule(theorem.parse()?, case, m)?)?;
            Ok(Outcome::Affirmative)
        }
        ScheduleCmd::Facts { hypothesis, case } => {
            let h: Hypothesis = hypothesis.parse()?;
            let facts: Vec<_> = case_hypotheses(h, case)?.into_iter().map(|f| f.label).collect();
            ctx.emit(json!({ "hypothesis": h, "case": case, "facts": facts }))?;
            Ok(Outcome::Affirmative)
        }
    }
}
