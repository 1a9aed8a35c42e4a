//! The `mult` command.

use periodic_hall::dhall::{DhAlgebra, DhElement};
use periodic_hall::rep::Quiver;
use periodic_hall::sdh::{SdhAlgebra, SdhElement};
use periodic_hall::table::CategoryTable;
use serde_json::{json, Value};

use crate::parse::{parse_spec, Spec};
use crate::{build_table, output, resolve_quiver, CliError, EngineChoice};

pub struct MultArgs {
    pub quiver: Option<String>,
    pub q: u32,
    pub bound: usize,
    pub t: usize,
    pub engine: Option<EngineChoice>,
    pub json: bool,
    pub lhs: String,
    pub rhs: String,
}

/// A1 when every class name and weight fits it, A2 otherwise.
fn infer_quiver(specs: &[&Spec], q: u32, bound: usize) -> Result<(String, CategoryTable), CliError> {
    let wants_a2 = specs.iter().any(|s| s.weight_len().map_or(false, |n| n != 1));
    if !wants_a2 {
        let a1 = build_table(Quiver::a1(), q, bound)?;
        if specs.iter().all(|s| s.class_name().map_or(true, |n| a1.find_by_name(n).is_ok())) {
            return Ok(("a1".into(), a1));
        }
    }
    Ok(("a2".into(), build_table(Quiver::a2(), q, bound)?))
}

fn sdh_element(table: &CategoryTable, t: usize, spec: &Spec) -> Result<SdhElement, CliError> {
    let check_len = |w: &[i64]| {
        if w.len() != table.n() {
            Err(CliError::Usage(format!("torus weight {:?} needs {} coordinates", w, table.n())))
        } else {
            Ok(())
        }
    };
    Ok(match spec {
        Spec::Unit => SdhElement::one(t, table.n(), table.q),
        Spec::Stalk { class, degree } => SdhElement::stalk(table, t, table.find_by_name(class)?, *degree)?,
        Spec::K { weight, degree } => {
            check_len(weight)?;
            SdhElement::k_generator(t, table.q, weight, *degree)?
        }
        Spec::SqrtK { weight, degree } => {
            check_len(weight)?;
            SdhElement::sqrt_k_generator(t, table.q, weight, *degree)?
        }
        Spec::Z { .. } => return Err(CliError::Usage("Z specs cannot be mixed with U, K or sqrtK".into())),
    })
}

fn dh_element(dh: &DhAlgebra<'_>, spec: &Spec) -> Result<DhElement, CliError> {
    match spec {
        Spec::Unit => Ok(dh.one()),
        Spec::Z { class, degree } => Ok(dh.generator(dh.table().find_by_name(class)?, *degree)?),
        _ => Err(CliError::Usage("Z specs cannot be mixed with U, K or sqrtK".into())),
    }
}

/// The literal right side of the defining relation that covers `Z_X^{[i]} Z_Y^{[j]}`.
fn dh_relation(dh: &DhAlgebra<'_>, x: (usize, usize), y: (usize, usize)) -> Result<Option<(&'static str, DhElement)>, CliError> {
    let t = dh.t();
    let ((a, i), (b, j)) = (x, y);
    if a == 0 || b == 0 {
        let tuple_of = |c: usize, d: usize| {
            let mut k = vec![0; t];
            k[d] = c;
            k
        };
        let k = if a == 0 { tuple_of(b, j) } else { tuple_of(a, i) };
        return Ok(Some(("unit", DhElement::basis(t, dh.q(), k))));
    }
    if t == 1 {
        return Ok(Some(("dh-one-periodic-merge", dh.one_periodic_rhs(a, b)?)));
    }
    if i == j {
        return Ok(Some(("dh-same-degree", dh.same_degree_rhs(a, b, i)?)));
    }
    if j == (i + 1) % t {
        return Ok(Some(("dh-adjacent", dh.adjacent_rhs(b, a, i)?)));
    }
    if i < j && !(i == 0 && j == t - 1) {
        return Ok(Some(("dh-distant", dh.distant_rhs(a, b, i, j)?)));
    }
    if i > j {
        let mut k = vec![0; t];
        k[i] = a;
        k[j] = b;
        return Ok(Some(("normal-order", DhElement::basis(t, dh.q(), k))));
    }
    Ok(None)
}

fn dh_pair(dh: &DhAlgebra<'_>, spec: &Spec) -> Result<(usize, usize), CliError> {
    match spec {
        Spec::Unit => Ok((0, 0)),
        Spec::Z { class, degree } => Ok((dh.table().find_by_name(class)?, *degree)),
        _ => Err(CliError::Usage("Z specs cannot be mixed with U, K or sqrtK".into())),
    }
}

pub fn run(args: &MultArgs) -> Result<u8, CliError> {
    let lhs = parse_spec(&args.lhs).map_err(|e| CliError::Usage(e.to_string()))?;
    let rhs = parse_spec(&args.rhs).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.t == 0 {
        return Err(CliError::Usage("t must be at least 1".into()));
    }
    let (quiver_name, table) = match &args.quiver {
        Some(name) => (name.clone(), build_table(resolve_quiver(name)?, args.q, args.bound)?),
        None => infer_quiver(&[&lhs, &rhs], args.q, args.bound)?,
    };
    let t = args.t;
    let header = json!({"quiver": quiver_name, "q": args.q, "bound": args.bound, "t": t});
    if lhs.is_derived() || rhs.is_derived() {
        run_dh(args, &table, &lhs, &rhs, header)
    } else {
        run_sdh(args, &table, &lhs, &rhs, header)
    }
}

fn emit(args: &MultArgs, header: Value, fields: Value, lines: &[String]) {
    if args.json {
        let mut v = header;
        if let (Value::Object(out), Value::Object(extra)) = (&mut v, fields) {
            out.extend(extra);
        }
        println!("{}", serde_json::to_string_pretty(&v).unwrap_or_default());
    } else {
        for l in lines {
            println!("{}", l);
        }
    }
}

fn run_dh(args: &MultArgs, table: &CategoryTable, lhs: &Spec, rhs: &Spec, header: Value) -> Result<u8, CliError> {
    if args.t % 2 == 0 {
        return Err(CliError::Usage(format!("Z products need an odd period, got t={}", args.t)));
    }
    let dh = DhAlgebra::new(table, args.t)?;
    let (x, y) = (dh_element(&dh, lhs)?, dh_element(&dh, rhs)?);
    let prod = dh.dh_mul(&x, &y)?;
    if args.engine != Some(EngineChoice::Both) {
        let fields = json!({"algebra": "dh", "engine": "dh_mul", "result": output::dh_terms(&prod)});
        emit(args, header, fields, &[prod.render(table)]);
        return Ok(0);
    }
    match dh_relation(&dh, dh_pair(&dh, lhs)?, dh_pair(&dh, rhs)?)? {
        Some((name, lit)) => {
            let equal = lit == prod;
            let verdict = if equal { "equal" } else { "differ" };
            let fields = json!({
                "algebra": "dh",
                "engine": "both",
                "relation": name,
                "result": output::dh_terms(&prod),
                "relation_result": output::dh_terms(&lit),
                "verdict": verdict,
            });
            let lines = [
                format!("dh_mul:   {}", prod.render(table)),
                format!("{}: {}", name, lit.render(table)),
                format!("verdict: {}", verdict),
            ];
            emit(args, header, fields, &lines);
            Ok(if equal { 0 } else { 1 })
        }
        None => {
            let fields = json!({"algebra": "dh", "engine": "both", "result": output::dh_terms(&prod), "verdict": "no relation"});
            let lines = [format!("dh_mul:   {}", prod.render(table)), "verdict: no defining relation covers this pair".to_string()];
            emit(args, header, fields, &lines);
            Ok(0)
        }
    }
}

fn run_sdh(args: &MultArgs, table: &CategoryTable, lhs: &Spec, rhs: &Spec, header: Value) -> Result<u8, CliError> {
    let t = args.t;
    let sdh = SdhAlgebra::new(table, t)?;
    let (x, y) = (sdh_element(table, t, lhs)?, sdh_element(table, t, rhs)?);
    let engine = args.engine.unwrap_or(if t == 2 { EngineChoice::Brute } else { EngineChoice::Rewrite });
    if t == 2 && engine != EngineChoice::Brute {
        return Err(CliError::Usage("the rewrite engine does not support t=2; use --engine brute".into()));
    }
    if !(x.is_plain() && y.is_plain()) {
        if engine == EngineChoice::Both {
            return Err(CliError::Usage("--engine both needs operands without square-root torus factors".into()));
        }
        let prod = sdh.mul_extended(&x, &y)?;
        let fields = json!({"algebra": "sdh-extended", "engine": "extended", "result": output::sdh_terms(&prod)});
        emit(args, header, fields, &[prod.render(table)]);
        return Ok(0);
    }
    match engine {
        EngineChoice::Rewrite | EngineChoice::Brute => {
            let (name, prod) = if engine == EngineChoice::Rewrite {
                ("rewrite", sdh.mul_rewrite(&x, &y)?)
            } else {
                ("brute", sdh.mul_bruteforce(&x, &y)?)
            };
            let fields = json!({"algebra": "sdh", "engine": name, "result": output::sdh_terms(&prod)});
            emit(args, header, fields, &[prod.render(table)]);
            Ok(0)
        }
        EngineChoice::Both => {
            let r = sdh.mul_rewrite(&x, &y)?;
            let b = sdh.mul_bruteforce(&x, &y)?;
            let equal = r == b;
            let verdict = if equal { "equal" } else { "differ" };
            let fields = json!({
                "algebra": "sdh",
                "engine": "both",
                "result": output::sdh_terms(&r),
                "brute_result": output::sdh_terms(&b),
                "verdict": verdict,
            });
            let lines = [
                format!("rewrite: {}", r.render(table)),
                format!("brute:   {}", b.render(table)),
                format!("verdict: {}", verdict),
            ];
            emit(args, header, fields, &lines);
            Ok(if equal { 0 } else { 1 })
        }
    }
}
