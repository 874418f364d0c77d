use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use spanforge::adversary::{adv_minimax, validate_adversary_matrix, Certificate, MinimaxOptions};
use spanforge::formula::{
    format_bits, formula_to_json, index_to_bits, metrics, normalize, parse_bits, GateSpec,
    Normalized, StandardBounds,
};
use spanforge::numfmt::g12;
use spanforge::span::{full_witness_size, program_to_json, witness_size};
use spanforge::spectra::{
    biadjacency, build_nand_tree, input_graph, query_estimate, spectral_report,
};
use spanforge::sweep::{parse_sizes, sweep, to_csv, Family};
use spanforge::verify::{
    check_balance_lemma, check_canonical_premise, check_compose_lemma, check_directsum_norm,
    check_formula, check_gap_lemma, check_norm_lemma, check_root_bound, check_witness_bounds,
    Lemma, SuiteOptions, VerificationReport,
};
use spanforge::{Formula, Registry, SpanProgram};

use crate::config::{Format, RunConfig};
use crate::failure::{Failure, Outcome};
use crate::input::{self, Loaded};

pub fn emit(text: &str, out: Option<&Path>) -> Outcome<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Input(format!("stdout: {e}")))
        }
    }
}

fn emit_json(value: &Value) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(&text, None)
}

/// Two columns, keys padded to the longest.
fn key_value_table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

fn grid(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn parse(path: &Path) -> Outcome<i32> {
    let formula = input::load_formula(path)?;
    let normalized = match normalize(&formula) {
        Normalized::Formula(f) => json!(f.to_string()),
        Normalized::Constant(b) => json!({ "constant": b }),
        Normalized::NegatedVariable(j) => json!({ "negated_variable": j }),
    };
    emit_json(&json!({
        "formula": formula.to_string(),
        "n": formula.num_vars(),
        "depth": formula.depth(),
        "k_max": formula.max_fan_in(),
        "and_or": formula.is_and_or(),
        "normalized": normalized,
        "tree": formula_to_json(&formula),
    }))?;
    Ok(0)
}

pub fn metrics_cmd(path: &Path, config: &RunConfig) -> Outcome<i32> {
    let formula = input::load_formula(path)?;
    let bounds = StandardBounds {
        minimax: MinimaxOptions {
            seed: config.seed,
            ..MinimaxOptions::default()
        },
    };
    let m = metrics(&formula, &bounds)?;
    let methods: Vec<Value> = m.methods.iter().map(|b| json!(b)).collect();
    let value = json!({
        "formula": formula.to_string(),
        "n": m.n,
        "depth": m.depth,
        "adv": m.root_adv(),
        "sigma_minus": m.root_sigma_minus(),
        "sigma_plus": m.root_sigma_plus(),
        "beta": m.beta,
        "k_max": m.k_max,
        "bound_methods": methods,
    });
    match config.format {
        Format::Json => emit_json(&value)?,
        Format::Table => {
            let rows = [
                ("n", m.n.to_string()),
                ("depth", m.depth.to_string()),
                ("adv", g12(m.root_adv())),
                ("sigma_minus", g12(m.root_sigma_minus())),
                ("sigma_plus", g12(m.root_sigma_plus())),
                ("beta", g12(m.beta)),
                ("k_max", m.k_max.to_string()),
            ]
            .map(|(k, v)| (k.to_string(), v));
            emit(&key_value_table(&rows), None)?;
        }
    }
    Ok(0)
}

pub fn compose(path: &Path, out: Option<&Path>) -> Outcome<i32> {
    let formula = input::load_formula(path)?;
    let (_, composed) = input::compose(&formula)?;
    let mut text =
        serde_json::to_string_pretty(&program_to_json(composed.program())).expect("serializable");
    text.push('\n');
    emit(&text, out)?;
    Ok(0)
}

struct WsizeRow {
    x: String,
    value: bool,
    wsize: f64,
    wsizef: f64,
}

pub fn wsize(path: &Path, input_bits: Option<&str>, config: &RunConfig) -> Outcome<i32> {
    let (program, costs, order, name): (SpanProgram, Vec<f64>, Option<Vec<usize>>, String) =
        match input::load(path)? {
            Loaded::Formula(formula) => {
                if config.costs.is_some() {
                    return Err(Failure::Usage(
                        "--costs applies to span-program files only".into(),
                    ));
                }
                let (_, composed) = input::compose(&formula)?;
                let order = composed.input_vars().to_vec();
                (
                    composed.program().clone(),
                    composed.input_costs().to_vec(),
                    Some(order),
                    formula.to_string(),
                )
            }
            Loaded::Program(program) => {
                let costs = input::program_costs(&program, config.costs.as_deref())?;
                (program, costs, None, path.display().to_string())
            }
        };
    let n = program.n();
    let xs: Vec<Vec<bool>> = match input_bits {
        Some(text) => vec![input::bits(text, order.as_ref().map_or(n, |o| o.len()))?],
        None => (0..1usize << order.as_ref().map_or(n, |o| o.len()))
            .map(|i| index_to_bits(i, order.as_ref().map_or(n, |o| o.len())))
            .collect(),
    };
    let mut rows = Vec::with_capacity(xs.len());
    for x in xs {
        let program_x: Vec<bool> = match &order {
            Some(o) => o.iter().map(|&v| x[v - 1]).collect(),
            None => x.clone(),
        };
        let s = witness_size(&program, &program_x, &costs)?;
        let f = full_witness_size(&program, &program_x, &costs)?;
        rows.push(WsizeRow {
            x: format_bits(&x),
            value: s.value,
            wsize: s.size,
            wsizef: f.full_size,
        });
    }
    let max = |value: bool, pick: fn(&WsizeRow) -> f64| {
        rows.iter()
            .filter(|r| r.value == value)
            .map(pick)
            .reduce(f64::max)
    };
    match config.format {
        Format::Json => emit_json(&json!({
            "instance": name,
            "rows": rows.iter().map(|r| json!({
                "x": r.x, "value": r.value, "wsize": r.wsize, "wsizef": r.wsizef,
            })).collect::<Vec<_>>(),
            "max_wsize": { "true": max(true, |r| r.wsize), "false": max(false, |r| r.wsize) },
            "max_wsizef": { "true": max(true, |r| r.wsizef), "false": max(false, |r| r.wsizef) },
        }))?,
        Format::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.x.clone(),
                        u8::from(r.value).to_string(),
                        g12(r.wsize),
                        g12(r.wsizef),
                    ]
                })
                .collect();
            emit(&grid(&["x", "f", "wsize", "wsizef"], &cells), None)?;
        }
    }
    Ok(0)
}

pub struct GraphArgs<'a> {
    pub dot: bool,
    pub input: Option<&'a str>,
    pub nand_tree: bool,
    pub out: Option<&'a Path>,
}

pub fn graph(path: &Path, args: GraphArgs<'_>) -> Outcome<i32> {
    let loaded = input::load(path)?;
    if args.nand_tree {
        let Loaded::Formula(formula) = loaded else {
            return Err(Failure::Usage("--nand-tree needs a formula file".into()));
        };
        let Some(bits) = args.input else {
            return Err(Failure::Usage("--nand-tree needs --input".into()));
        };
        let binary = spanforge::formula::expand_fanin2(&formula)?;
        let x = input::bits(bits, binary.num_vars())?;
        let tree = build_nand_tree(&binary, &x, None)?;
        if args.dot {
            emit(&tree.to_dot(), args.out)?;
            return Ok(0);
        }
        let report = spectral_report(tree.adjacency(), None);
        let value = json!({
            "formula": binary.to_string(),
            "x": format_bits(&x),
            "n": tree.n(),
            "vertices": tree.vertices(),
            "w_out": tree.w_out(),
            "sigma_minus": tree.sigma_minus(),
            "e_max": tree.e_max(),
            "root_nand": tree.root_nand(),
            "root_zero_mode": tree.root_zero_mode(),
            "spectrum": report,
        });
        let mut text = serde_json::to_string_pretty(&value).expect("serializable");
        text.push('\n');
        emit(&text, args.out)?;
        return Ok(0);
    }
    let (program, estimate, order) = match loaded {
        Loaded::Formula(formula) => {
            let (_, composed) = input::compose(&formula)?;
            let estimate = query_estimate(&composed)?;
            (
                composed.program().clone(),
                Some(estimate),
                Some(composed.input_vars().to_vec()),
            )
        }
        Loaded::Program(p) => (p, None, None),
    };
    let graph = match args.input {
        Some(bits) => {
            let x = input::bits(bits, order.as_ref().map_or(program.n(), |o| o.len()))?;
            let program_x: Vec<bool> = match &order {
                Some(o) => o.iter().map(|&v| x[v - 1]).collect(),
                None => x,
            };
            input_graph(&program, &program_x)?
        }
        None => biadjacency(&program),
    };
    if args.dot {
        emit(&graph.to_dot(), args.out)?;
        return Ok(0);
    }
    let t_est = if args.input.is_none() {
        estimate.map(|e| e.t_est)
    } else {
        None
    };
    let report = spectral_report(&graph.adjacency(), t_est);
    let b = graph.biadjacency();
    let value = json!({
        "rows": b.nrows(),
        "columns": b.ncols(),
        "row_labels": graph.row_labels(),
        "column_labels": graph.column_labels(),
        "norm": graph.norm(),
        "abs_norm": graph.abs_norm(),
        "query_estimate": estimate,
        "spectrum": report,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    emit(&text, args.out)?;
    Ok(0)
}

fn lemmas_for(selector: &str, program: bool) -> Outcome<Vec<Lemma>> {
    if selector == "all" {
        return Ok(if program {
            Lemma::PROGRAM.to_vec()
        } else {
            Lemma::FORMULA.to_vec()
        });
    }
    let lemma: Lemma = selector
        .parse()
        .map_err(|_| Failure::Usage(format!("unknown lemma `{selector}`")))?;
    match (program, Lemma::PROGRAM.contains(&lemma)) {
        (true, false) => Err(Failure::Usage(format!(
            "lemma `{lemma}` needs a formula file, not a span program"
        ))),
        (false, true) => Err(Failure::Usage(format!(
            "lemma `{lemma}` needs a span-program JSON file"
        ))),
        _ => Ok(vec![lemma]),
    }
}

fn formula_checks(
    formula: &Formula,
    lemmas: &[Lemma],
    x: Option<&[bool]>,
    config: &RunConfig,
) -> Outcome<Vec<VerificationReport>> {
    let binary = spanforge::formula::expand_fanin2(formula)?;
    let Some(x) = x else {
        let opts = SuiteOptions {
            exhaustive_limit: config.exhaustive_limit,
            samples: config.samples,
            seed: config.seed,
        };
        return Ok(check_formula(&binary, lemmas, &opts)?);
    };
    let (_, composed) = input::compose(formula)?;
    let program_x: Vec<bool> = composed.input_vars().iter().map(|&v| x[v - 1]).collect();
    let mut out = Vec::new();
    for &lemma in lemmas {
        match lemma {
            Lemma::Compose => out.push(check_compose_lemma(&composed, &program_x)?),
            Lemma::DirectSumNorm => out.push(check_directsum_norm(&composed)),
            Lemma::Witness => {
                out.push(check_witness_bounds(&composed, &program_x)?);
                out.push(check_root_bound(&binary, &composed)?);
            }
            Lemma::Balance => out.push(check_balance_lemma(&binary)?),
            Lemma::Gap => out.push(check_gap_lemma(&binary, x)?),
            Lemma::Canonical | Lemma::Norm => unreachable!("filtered by lemmas_for"),
        }
    }
    Ok(out)
}

pub fn check(
    path: &Path,
    selector: &str,
    input_bits: Option<&str>,
    config: &RunConfig,
) -> Outcome<i32> {
    let reports = match input::load(path)? {
        Loaded::Program(program) => {
            let lemmas = lemmas_for(selector, true)?;
            if input_bits.is_some() {
                return Err(Failure::Usage(
                    "--input applies to formula checks only".into(),
                ));
            }
            let costs = input::program_costs(&program, config.costs.as_deref())?;
            let mut reports = Vec::new();
            for lemma in lemmas {
                reports.push(match lemma {
                    Lemma::Canonical => check_canonical_premise(&program, &costs)?,
                    _ => check_norm_lemma(&program, &costs)?,
                });
            }
            reports
        }
        Loaded::Formula(formula) => {
            let lemmas = lemmas_for(selector, false)?;
            let x = input_bits
                .map(|b| input::bits(b, formula.num_vars()))
                .transpose()?;
            formula_checks(&formula, &lemmas, x.as_deref(), config)?
        }
    };
    let failed = reports.iter().filter(|r| !r.pass).count();
    match config.format {
        Format::Json => emit_json(&serde_json::to_value(&reports).expect("serializable"))?,
        Format::Table => {
            let cells: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.lemma.to_string(),
                        if r.pass { "pass" } else { "FAIL" }.to_string(),
                        g12(r.lhs),
                        g12(r.rhs),
                        r.instance.clone(),
                    ]
                })
                .collect();
            emit(
                &grid(&["lemma", "result", "lhs", "rhs", "instance"], &cells),
                None,
            )?;
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", reports.len());
        return Ok(3);
    }
    Ok(0)
}

pub fn sweep_cmd(config: &RunConfig) -> Outcome<i32> {
    let family: Family = config
        .family
        .as_deref()
        .ok_or_else(|| {
            Failure::Usage("sweep needs --family (or `family` in the config file)".into())
        })?
        .parse()
        .map_err(|e: spanforge::Error| Failure::Usage(e.to_string()))?;
    let sizes = parse_sizes(config.sizes.as_deref().ok_or_else(|| {
        Failure::Usage("sweep needs --sizes (or `sizes` in the config file)".into())
    })?)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| Failure::Numeric(e.to_string()))?;
    let rows = pool.install(|| sweep(family, &sizes, config.seed))?;
    emit(&to_csv(&rows), config.csv.as_deref())?;
    Ok(0)
}

/// A registry gate name or a truth table such as `00010111`.
fn resolve_gate(text: &str, arity: Option<usize>) -> Outcome<GateSpec> {
    if !text.is_empty() && text.chars().all(|c| c == '0' || c == '1') {
        return Ok(GateSpec::from_truth_table(parse_bits(text)?)?);
    }
    let registry = Registry::standard();
    let arity = match arity {
        Some(k) => k,
        None => (0..=spanforge::formula::MAX_ARITY)
            .find(|&k| registry.resolve(text, k).is_ok())
            .ok_or_else(|| Failure::Input(format!("unknown gate `{text}`")))?,
    };
    registry
        .resolve(text, arity)
        .map(|g| (*g).clone())
        .map_err(|e| Failure::Input(e.to_string()))
}

pub fn adversary(gate: &str, certificate: Option<&PathBuf>, config: &RunConfig) -> Outcome<i32> {
    let gate = resolve_gate(gate, config.costs.as_ref().map(Vec::len))?;
    let costs = config
        .costs
        .clone()
        .unwrap_or_else(|| vec![1.0; gate.arity()]);
    let mut value = json!({
        "gate": gate.name(),
        "tt": gate.truth_table_string(),
        "costs": costs,
    });
    if gate.arity() <= spanforge::adversary::MAX_MINIMAX_ARITY {
        let options = MinimaxOptions {
            seed: config.seed,
            ..MinimaxOptions::default()
        };
        let r = adv_minimax(&gate, &costs, &options)?;
        value["adv"] = json!(r.value);
        value["lower"] = json!(r.lower);
        value["restart_value"] = json!(r.restart_value);
        value["relevant"] = json!(r.relevant.iter().map(|j| j + 1).collect::<Vec<_>>());
        value["distributions"] = json!(r.distributions);
    }
    if let Some(path) = certificate {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let cert: Certificate = serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("{}: schema error: {e}", path.display())))?;
        let cert_costs = if config.costs.is_some() {
            costs.clone()
        } else {
            cert.costs.clone()
        };
        let gamma = cert.matrix()?;
        value["certificate"] = json!({
            "costs": cert_costs,
            "lower_bound": validate_adversary_matrix(&gate, &gamma, &cert_costs)?,
        });
    }
    emit_json(&value)?;
    Ok(0)
}
