use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use maxgrowth::acts::{act_growth, build_k_transitive, build_prescribed, TableAct};
use maxgrowth::growth::{
    boundary_measure_bounds, classify, growth_series, validate_series, GrowthSeries,
};
use maxgrowth::linmod::{
    build_extension_example, build_t991, cogrowth, module_growth, nil_step, poly_from_json, poly_to_json, Alpha,
    DRule, ExampleKind, FreeModule, NilStepInput, Poly, TableModule,
};
use maxgrowth::par::Exec;
use maxgrowth::rational::{self, Rational};
use maxgrowth::stallings::CoreAutomaton;
use maxgrowth::surgery::{
    adjoin_power, attach_elementary, basis_change_experiment, link_tuples, tower, ElementaryKind, ElementarySpec,
    TowerRequest,
};
use maxgrowth::words::{
    apply_nielsen, apply_nielsen_inverse, calibrate_l, count_avoiding, letter_frequency_report, parse_letters,
    sample_reduced, sample_rng, stretch_bound, z_membership, Alphabet, AvoidMode, GroupWord, MonoidWord, ZParams,
};

use crate::{ActCmd, AttachKind, Command, CoreCmd, Global, GrowthCmd, Mode, ModuleCmd, Output, SurgeryCmd, WordsCmd};

/// A bad argument combination caught by the front end itself.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "usage: {}", self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: &str) -> anyhow::Error {
    Usage(msg.to_string()).into()
}

/// Library contract violations, malformed input and bad flags exit 2.
pub fn is_contract_violation(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.is::<maxgrowth::Error>() || c.is::<Usage>() || c.is::<serde_json::Error>())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_core(path: &Path) -> Result<CoreAutomaton> {
    Ok(CoreAutomaton::from_json_str(&read(path)?)?)
}

fn rat(s: &str) -> Result<Rational> {
    Ok(rational::parse(s)?)
}

fn list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| usage(&format!("bad list entry {t:?}"))))
        .collect()
}

fn group_word(text: &str, r: u32) -> Result<GroupWord> {
    Ok(GroupWord::parse(text, Alphabet::new(r)?)?)
}

/// A word given as a JSON string or a JSON array of signed integers.
fn group_word_value(v: &Value, r: u32) -> Result<GroupWord> {
    match v {
        Value::String(s) => group_word(s, r),
        other => group_word(&other.to_string(), r),
    }
}

fn core_value(core: &CoreAutomaton) -> Value {
    let mut v = serde_json::to_value(core.to_json()).expect("core serializes");
    v["deficit"] = json!(rational::format(&core.deficit()));
    v
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("value serializes")
}

fn index_text(core: &CoreAutomaton) -> String {
    core.index().map_or("infinite".to_string(), |i| i.to_string())
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn series_output(s: &GrowthSeries) -> Result<Output> {
    if let Some(v) = validate_series(s).violation {
        return Err(maxgrowth::Error::Postcondition(format!("series invalid at n = {}: {}", v.n, v.detail)).into());
    }
    Ok(Output { json: s.to_json(), csv: Some(s.to_csv()), text: format!("g = {}", strings(&s.g).join(" ")) })
}

pub fn run(global: &Global, cmd: Command) -> Result<Output> {
    let exec = Exec::auto();
    match cmd {
        Command::Core(c) => core_cmd(c),
        Command::Growth(c) => growth_cmd(c),
        Command::Surgery(c) => surgery_cmd(c, global.seed),
        Command::Act(c) => act_cmd(c, exec),
        Command::Module(c) => module_cmd(c, global.seed, exec),
        Command::Words(c) => words_cmd(c, global.seed, exec),
    }
}

fn core_cmd(cmd: CoreCmd) -> Result<Output> {
    match cmd {
        CoreCmd::Build { gens, r } => {
            let words = gens.iter().map(|g| group_word(g, r)).collect::<Result<Vec<_>>>()?;
            let core = CoreAutomaton::build(&words, r)?;
            Ok(Output {
                json: pretty(&core_value(&core)),
                csv: None,
                text: format!(
                    "vertices={} rank={} index={} deficit={}",
                    core.num_vertices(),
                    core.subgroup_rank(),
                    index_text(&core),
                    rational::format(&core.deficit())
                ),
            })
        }
        CoreCmd::Info { core } => {
            let core = load_core(&core)?;
            let v = json!({
                "r": core.rank(),
                "vertices": core.num_vertices(),
                "edges": core.edges().len(),
                "subgroup_rank": core.subgroup_rank(),
                "index": core.index(),
                "diameter": core.diameter(),
                "deficit": rational::format(&core.deficit()),
            });
            let text = format!(
                "r={} vertices={} edges={} subgroup_rank={} index={} diameter={} deficit={}",
                core.rank(),
                core.num_vertices(),
                core.edges().len(),
                core.subgroup_rank(),
                index_text(&core),
                core.diameter(),
                rational::format(&core.deficit())
            );
            Ok(Output { json: pretty(&v), csv: None, text })
        }
        CoreCmd::Basis { core } => {
            let core = load_core(&core)?;
            let basis = core.schreier_basis();
            let v = json!({
                "basis": basis.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                "ints": basis.iter().map(|w| w.to_ints()).collect::<Vec<_>>(),
            });
            let text = if basis.is_empty() { "(trivial subgroup)".to_string() } else { strings(&basis).join("\n") };
            Ok(Output { json: pretty(&v), csv: None, text })
        }
        CoreCmd::Deficit { core } => {
            let core = load_core(&core)?;
            let dist = core.distances();
            let per: Vec<Value> = (0..core.num_vertices())
                .filter(|&v| core.vertex_deficit(v) > 0)
                .map(|v| json!({"vertex": v, "missing": core.vertex_deficit(v), "depth": dist[v]}))
                .collect();
            let csv = std::iter::once("vertex,missing,depth".to_string())
                .chain(per.iter().map(|p| format!("{},{},{}", p["vertex"], p["missing"], p["depth"])))
                .collect::<Vec<_>>()
                .join("\n");
            let v = json!({"deficit": rational::format(&core.deficit()), "vertices": per});
            Ok(Output { json: pretty(&v), csv: Some(csv), text: format!("deficit={}", rational::format(&core.deficit())) })
        }
    }
}

fn growth_cmd(cmd: GrowthCmd) -> Result<Output> {
    match cmd {
        GrowthCmd::Series { core, n } => series_output(&growth_series(&load_core(&core)?, n)),
        GrowthCmd::Classify { core, n } => {
            let v = classify(&load_core(&core)?, n)?;
            let text = match &v.certificate {
                Some(c) => format!("maximal=true c={}", rational::format(c)),
                None => "maximal=false".to_string(),
            };
            Ok(Output { json: pretty(&serde_json::to_value(&v)?), csv: None, text })
        }
        GrowthCmd::Measure { core, n } => {
            let m = boundary_measure_bounds(&load_core(&core)?, n)?;
            let csv = std::iter::once("n,upper".to_string())
                .chain(m.upper.iter().enumerate().map(|(i, u)| format!("{i},{}", rational::format(u))))
                .collect::<Vec<_>>()
                .join("\n");
            let text = format!(
                "upper = {}\nlimit = {}",
                m.upper.iter().map(rational::format).collect::<Vec<_>>().join(" "),
                rational::format(&m.limit)
            );
            Ok(Output { json: pretty(&serde_json::to_value(&m)?), csv: Some(csv), text })
        }
    }
}

fn surgery_cmd(cmd: SurgeryCmd, seed: u64) -> Result<Output> {
    match cmd {
        SurgeryCmd::Attach { core, kind, at, label, leg, to } => {
            let core = load_core(&core)?;
            let r = core.rank();
            let kind = match kind {
                AttachKind::Cycle => ElementaryKind::Cycle,
                AttachKind::Leg => ElementaryKind::CycleWithLeg {
                    leg: group_word(&leg.ok_or_else(|| usage("--kind leg needs --leg"))?, r)?,
                },
                AttachKind::Arc => ElementaryKind::Arc { to: to.ok_or_else(|| usage("--kind arc needs --to"))? },
            };
            let a = attach_elementary(&core, &ElementarySpec { kind, at, label: group_word(&label, r)? })?;
            let v = json!({
                "core": core_value(&a.core),
                "delta": rational::format(&a.delta),
                "generator": a.generator.to_string(),
            });
            let text = format!(
                "generator={} delta={} deficit={}",
                a.generator,
                rational::format(&a.delta),
                rational::format(&a.core.deficit())
            );
            Ok(Output { json: pretty(&v), csv: None, text })
        }
        SurgeryCmd::AdjoinPower { core, g, epsilon } => {
            let core = load_core(&core)?;
            let g = group_word(&g, core.rank())?;
            let p = adjoin_power(&core, &g, &rat(&epsilon)?)?;
            let v = json!({
                "core": core_value(&p.core),
                "n": p.n, "i": p.i, "j": p.j, "l": p.l,
                "delta": rational::format(&p.delta),
            });
            Ok(Output { json: pretty(&v), csv: None, text: p.summary() })
        }
        SurgeryCmd::Link { core, from, to, epsilon } => {
            let core = load_core(&core)?;
            let r = core.rank();
            let from = from.iter().map(|w| group_word(w, r)).collect::<Result<Vec<_>>>()?;
            let to = to.iter().map(|w| group_word(w, r)).collect::<Result<Vec<_>>>()?;
            let k = link_tuples(&core, &from, &to, &rat(&epsilon)?, seed)?;
            let v = json!({
                "core": core_value(&k.core),
                "b": k.b.to_string(),
                "m": k.m, "l": k.l, "attempts": k.attempts,
                "delta": rational::format(&k.delta),
            });
            Ok(Output { json: pretty(&v), csv: None, text: k.summary() })
        }
        SurgeryCmd::Tower { core, plan } => {
            let core = load_core(&core)?;
            let r = core.rank();
            let raw: Value = serde_json::from_str(&read(&plan)?)?;
            let items = raw.as_array().ok_or_else(|| usage("the plan must be a JSON array"))?;
            let words = |v: &Value| -> Result<Vec<GroupWord>> {
                v.as_array()
                    .ok_or_else(|| usage("link entries need word arrays"))?
                    .iter()
                    .map(|w| group_word_value(w, r))
                    .collect()
            };
            let mut reqs = Vec::new();
            for item in items {
                if let Some(p) = item.get("power") {
                    reqs.push(TowerRequest::Power(group_word_value(p, r)?));
                } else if let Some(l) = item.get("link") {
                    let from = words(l.get("from").ok_or_else(|| usage("link needs \"from\""))?)?;
                    let to = words(l.get("to").ok_or_else(|| usage("link needs \"to\""))?)?;
                    reqs.push(TowerRequest::Link { from, to });
                } else {
                    return Err(usage("plan entries are {\"power\": w} or {\"link\": {...}}"));
                }
            }
            let t = tower(&core, &reqs, seed)?;
            let last = t.final_core();
            let text = format!(
                "steps={} deficit {} -> {}",
                t.steps.len(),
                rational::format(&core.deficit()),
                rational::format(&last.deficit())
            );
            Ok(Output { json: t.log_lines().join("\n"), csv: None, text })
        }
        SurgeryCmd::BasisChange { r, epsilon, l, depth, cut } => {
            let p = ZParams { epsilon: rat(&epsilon)?, l };
            let b = basis_change_experiment(r, &p, depth, cut.unwrap_or(depth + 2))?;
            let mut csv = String::from("n,series_a,series_b,lower_b,z\n");
            for n in 0..b.series_a.g.len() {
                csv.push_str(&format!(
                    "{n},{},{},{},{}\n",
                    b.series_a.g[n],
                    b.series_b.g.get(n).map_or(String::new(), |x| x.to_string()),
                    b.lower_b.get(n).map_or(String::new(), |x| x.to_string()),
                    b.z_counts.get(n).map_or(String::new(), |x| x.to_string()),
                ));
            }
            let text = format!(
                "vertices={} paired={} exact_a={} exact_b={}\nseries_a = {}\nseries_b = {}",
                b.vertices,
                b.paired,
                b.exact_a,
                b.exact_b,
                strings(&b.series_a.g).join(" "),
                strings(&b.series_b.g).join(" ")
            );
            Ok(Output { json: b.to_json(), csv: Some(csv), text })
        }
    }
}

fn act_cmd(cmd: ActCmd, exec: Exec) -> Result<Output> {
    match cmd {
        ActCmd::Prescribed { d, r } => {
            let d: Vec<u64> = list(&d)?;
            let act = build_prescribed(&d, r)?;
            let text = format!("states={} rank={}", act.num_states(), act.r);
            Ok(Output { json: act.to_json(), csv: None, text })
        }
        ActCmd::Ktrans { r, budget, n, check_k, check_len, plan } => {
            let act = build_k_transitive(r, budget)?;
            let checked = act.verify_witnesses(|t| t.k() <= check_k && t.max_len() <= check_len, exec)?;
            if plan {
                let json = serde_json::to_string(&act.plan())?;
                return Ok(Output { json, csv: None, text: format!("tuples={} witnesses_ok={checked}", act.budget()) });
            }
            let s = act_growth(&act, n, usize::MAX, exec)?;
            let out = series_output(&s)?;
            let v = json!({
                "series": serde_json::from_str::<Value>(&out.json)?,
                "tuples": act.budget(),
                "witnesses_ok": checked,
            });
            Ok(Output { json: pretty(&v), csv: out.csv, text: format!("{}\nwitnesses_ok={checked}", out.text) })
        }
        ActCmd::Growth { act, n, budget } => {
            let act = TableAct::from_json(&read(&act)?)?;
            series_output(&act_growth(&act, n, budget, exec)?)
        }
    }
}

/// A polynomial as JSON `[["coef", "word"], ...]`, or a bare monoid word.
fn poly_arg(text: &str, r: u32) -> Result<Poly> {
    if let Ok(v @ Value::Array(_)) = serde_json::from_str::<Value>(text) {
        if v.as_array().is_some_and(|a| a.iter().all(Value::is_array)) {
            return Ok(poly_from_json(&v, r)?);
        }
    }
    Ok(Poly::unit(MonoidWord::parse(text, Alphabet::new(r)?)?))
}

fn module_cmd(cmd: ModuleCmd, seed: u64, exec: Exec) -> Result<Output> {
    match cmd {
        ModuleCmd::Growth { module, n, budget } => {
            let m = TableModule::from_json(&read(&module)?)?;
            let gens = m.generator_vectors()?;
            series_output(&module_growth(&m, &gens, n, budget, exec)?)
        }
        ModuleCmd::Cogrowth { sub, r, s, n } => {
            let raw: Value = serde_json::from_str(&read(&sub)?)?;
            let free = FreeModule { rank: r, s };
            let mut gens = Vec::new();
            for item in raw.as_array().ok_or_else(|| usage("submodule generators must be a JSON array"))? {
                let (gen, poly) = match item {
                    Value::Object(o) => (
                        o.get("gen").and_then(Value::as_u64).unwrap_or(0) as usize,
                        o.get("poly").ok_or_else(|| usage("generator entries need \"poly\""))?,
                    ),
                    other => (0, other),
                };
                if gen >= s {
                    return Err(maxgrowth::Error::Precondition(format!("generator index {gen} >= s = {s}")).into());
                }
                gens.push(free.embed(gen, &poly_from_json(poly, r)?));
            }
            let rep = cogrowth(&gens, r, s, n, exec)?;
            if !(rep.identity_ok && rep.routes_agree) {
                return Err(maxgrowth::Error::Postcondition("co-growth routes disagree".into()).into());
            }
            let mut csv = String::from("n,g_l,g_m,c\n");
            for i in 0..=n {
                csv.push_str(&format!("{i},{},{},{}\n", rep.g_l[i], rep.g_m[i], rep.c[i]));
            }
            let text = format!(
                "g_L = {}\ng_M = {}\nc   = {}\nidentity_ok={}",
                strings(&rep.g_l).join(" "),
                strings(&rep.g_m).join(" "),
                strings(&rep.c).join(" "),
                rep.identity_ok
            );
            Ok(Output { json: rep.to_json(), csv: Some(csv), text })
        }
        ModuleCmd::Example { kind, r, d, n, n_sub, m, budget } => {
            let kind = ExampleKind::from_str(&kind)?;
            let d: Vec<usize> = list(&d)?;
            let module = build_extension_example(kind, r, &d)?;
            let rep = module.report(n, n_sub, m, budget, exec)?;
            let text = format!(
                "g_M = {}\nalpha_bound_ok={} cyclic={}",
                strings(&rep.g_m).join(" "),
                rep.alpha_bound_ok,
                rep.cyclic
            );
            Ok(Output { json: rep.to_json(), csv: None, text })
        }
        ModuleCmd::NilStep { r, relations, big_c, c, u, vs, n, samples } => {
            let rels = match relations {
                Some(p) => {
                    let v: Value = serde_json::from_str(&read(&p)?)?;
                    v.as_array()
                        .ok_or_else(|| usage("relations must be a JSON array of polynomials"))?
                        .iter()
                        .map(|p| Ok(poly_from_json(p, r)?))
                        .collect::<Result<Vec<_>>>()?
                }
                None => Vec::new(),
            };
            let vs = vs.iter().map(|v| poly_arg(v, r)).collect::<Result<Vec<_>>>()?;
            let rep = nil_step(&NilStepInput {
                r,
                relations: &rels,
                big_c: rat(&big_c)?,
                c: rat(&c)?,
                u: MonoidWord::parse(&u, Alphabet::new(r)?)?,
                vs: &vs,
                n_max: n,
                seed,
                samples,
            })?;
            let mut v = serde_json::to_value(&rep)?;
            v["ok"] = json!(rep.ok());
            v["v"] = json!(vs.iter().map(poly_to_json).collect::<Vec<_>>());
            let text = format!(
                "q={} components={} quotient_ok={} spot_checks={}/{}\ng_quotient = {}",
                rep.q,
                rep.components,
                rep.quotient_ok,
                rep.spot_checks.iter().filter(|&&b| b).count(),
                rep.spot_checks.len(),
                rep.g_quotient.join(" ")
            );
            Ok(Output { json: pretty(&v), csv: None, text })
        }
        ModuleCmd::T991 { r, alpha, d_shift, d_list, n, oracle_max, samples } => {
            let alpha = match alpha {
                Some(a) => Alpha::from_json(&serde_json::from_str(&a)?)?,
                None => Alpha::index(r),
            };
            let d = match d_list {
                Some(l) => DRule::List(list(&l)?),
                None => DRule::Shift(d_shift),
            };
            let (_, rep) = build_t991(r, alpha, d, n, oracle_max, samples, seed)?;
            let text = format!("g = {}\nok={}", rep.g.join(" "), rep.ok());
            Ok(Output { json: rep.to_json(), csv: None, text })
        }
    }
}

fn words_cmd(cmd: WordsCmd, seed: u64, exec: Exec) -> Result<Output> {
    match cmd {
        WordsCmd::Avoid { u, n, r, mode } => {
            let u = parse_letters(&u)?;
            let mode = match mode {
                Mode::Monoid => AvoidMode::Monoid,
                Mode::Group => AvoidMode::Group,
            };
            let c = count_avoiding(&u, n, mode, r)?;
            let violation = c.bound_violation();
            let v = json!({
                "sphere": strings(&c.sphere),
                "ball": strings(&c.ball),
                "bound": c.bound.as_ref().map(|b| json!({"c": b.c.to_string(), "m": b.m, "base": b.base.to_string()})),
                "violation": violation,
            });
            let mut csv = String::from("n,sphere,ball\n");
            for k in 0..c.sphere.len() {
                csv.push_str(&format!("{k},{},{}\n", c.sphere[k], c.ball[k]));
            }
            let text = format!(
                "sphere = {}\nbound_ok={}",
                strings(&c.sphere).join(" "),
                violation.is_none()
            );
            Ok(Output { json: pretty(&v), csv: Some(csv), text })
        }
        WordsCmd::Nielsen { w, r, inverse } => {
            let w = group_word(&w, r)?;
            let img = if inverse { apply_nielsen_inverse(&w) } else { apply_nielsen(&w) };
            let v = json!({"word": w.to_string(), "image": img.to_string(), "ints": img.to_ints(),
                           "length": w.len(), "image_length": img.len()});
            Ok(Output { json: pretty(&v), csv: None, text: img.to_string() })
        }
        WordsCmd::Zcheck { w, r, epsilon, l, samples, length } => {
            let epsilon = rat(&epsilon)?;
            let bound = stretch_bound(r, &epsilon);
            let stretch_ok = |w: &GroupWord| {
                rational::int(apply_nielsen(w).len() as i64) > &bound * rational::int(w.len() as i64)
            };
            let l = match l {
                Some(l) => l,
                None => calibrate_l(r, &epsilon, samples.max(1), seed, 16, length.max(16), exec)?.l,
            };
            let p = ZParams { epsilon: epsilon.clone(), l };
            let words: Vec<GroupWord> = match w {
                Some(w) => vec![group_word(&w, r)?],
                None => (0..samples).map(|i| sample_reduced(length, r, &mut sample_rng(seed, i as u64))).collect(),
            };
            let mut passing = 0usize;
            let mut violations = 0usize;
            for w in &words {
                if z_membership(w, r, &p)? {
                    passing += 1;
                    violations += usize::from(!stretch_ok(w));
                }
            }
            let v = json!({
                "epsilon": rational::format(&epsilon), "l": l, "words": words.len(),
                "in_z": passing, "stretch_bound": rational::format(&bound), "stretch_violations": violations,
            });
            let text = format!(
                "l={l} in_z={passing}/{} stretch_bound={} violations={violations}",
                words.len(),
                rational::format(&bound)
            );
            Ok(Output { json: pretty(&v), csv: None, text })
        }
        WordsCmd::Stats { r, length, samples, tol } => {
            let rep = letter_frequency_report(r, length, samples, &rat(&tol)?, seed, exec)?;
            let text = format!(
                "within={}/{} fraction={:.4} max_deviation={:.5}",
                rep.within, rep.samples, rep.fraction, rep.max_deviation
            );
            Ok(Output { json: pretty(&serde_json::to_value(&rep)?), csv: None, text })
        }
    }
}
