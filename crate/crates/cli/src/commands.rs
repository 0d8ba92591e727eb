//! Non-suite subcommands. Each returns a JSON value; text output renders it.

use serde_json::{json, Map, Value};
use zcycles::gcoh::{somekawa_s, symbol_is_admissible, Cohomology, Kummer, WedgeDescent};
use zcycles::points::PointModel;
use zcycles::symbols::{graded_pieces, resolve, ProxyTarget, SymbolExpr, SymbolLayer};

use crate::config::Scenario;
use crate::error::CliError;

fn elem(x: &[num_bigint::BigInt]) -> Value {
    Value::Array(x.iter().map(|c| Value::String(c.to_string())).collect())
}

/// Cokernels `C/F^r`, `C/G^r`, `C/R^r`, `C/B^r` of level-1 cycles.
pub fn filtration(scenario: &Scenario, model: &PointModel) -> Result<Value, CliError> {
    let layer = SymbolLayer::new(model, scenario.r_max)?;
    let cq = layer.quotient();
    let mut rows = Vec::new();
    for r in 0..=scenario.r_max + 1 {
        let mut row = Map::new();
        row.insert("r".into(), r.into());
        row.insert("F".into(), layer.f(r)?.cokernel(cq).to_string().into());
        let g = layer.g(r)?;
        row.insert("G".into(), g.cokernel(cq).to_string().into());
        if r >= 2 {
            let rr = layer.r_group(r - 1)?;
            row.insert("R".into(), rr.cokernel(cq).to_string().into());
            row.insert("R_equals_G".into(), (rr == g).into());
            row.insert(
                "B".into(),
                layer.b_group(r)?.cokernel(cq).to_string().into(),
            );
        }
        rows.push(Value::Object(row));
    }
    let pieces: Vec<String> = graded_pieces(&layer)
        .iter()
        .map(|g| g.to_string())
        .collect();
    Ok(
        json!({ "scenario": scenario.name, "quotient_depth": cq.depth(), "rows": rows, "graded": pieces }),
    )
}

/// Parses a symbol expression and resolves it in `T_r`.
pub fn symbols_eval(model: &PointModel, text: &str) -> Result<Value, CliError> {
    let s = SymbolExpr::parse(model, text)?;
    let target = ProxyTarget::new(model, s.arity());
    let v = resolve(model, &target, &s);
    Ok(json!({
        "expr": s.to_string(),
        "arity": s.arity(),
        "base": s.base(),
        "T_r": target.group().to_string(),
        "coords": elem(&v),
        "zero": target.group().is_zero(&v),
    }))
}

/// Cohomology of `A[n]` and its tensor square, the Kummer map per level,
/// and optionally `s_n` of a symbol.
pub fn cohomology(
    scenario: &Scenario,
    model: &PointModel,
    symbol: Option<&str>,
) -> Result<Value, CliError> {
    let k = Kummer::new(model, scenario.n)?;
    let mut modules = Map::new();
    let square = k.module().tensor_power(2)?;
    for (name, module) in [
        (format!("A[{}]", scenario.n), k.module()),
        (format!("A[{}]^2", scenario.n), &square),
    ] {
        let mut row = Vec::new();
        for i in 0..=2 {
            row.push(Cohomology::new(module, i)?.group().to_string());
        }
        modules.insert(name, row.into());
    }
    let mut delta = Vec::new();
    for level in model.levels() {
        let km = k.level_map(model, level)?;
        let table: Vec<Value> = km
            .classes
            .iter()
            .take(scenario.samples)
            .map(|(a, c)| json!({ "point": format!("P{a}"), "class": elem(c) }))
            .collect();
        delta.push(json!({
            "level": level,
            "H1": km.h1.group().to_string(),
            "kernel_is_nA": km.kernel_is_multiples(),
            "image": km.image_size(),
            "table": table,
        }));
    }
    let mut out =
        json!({ "scenario": scenario.name, "n": scenario.n, "modules": modules, "delta": delta });
    if let Some(text) = symbol {
        let s = SymbolExpr::parse(model, text)?;
        if !symbol_is_admissible(&k, &s) {
            return Err(CliError::Invalid(format!(
                "{s} has a point without an {}-division point",
                scenario.n
            )));
        }
        let x = somekawa_s(model, &k, &s)?;
        let h = Cohomology::new(&x.module, s.arity())?;
        let mut entry = json!({ "expr": s.to_string(), "H^r": h.group().to_string(), "class": elem(&h.coords(&x)?) });
        if s.arity() >= 2 {
            let w = WedgeDescent::new(&k, s.arity(), false)?;
            let y = w.descend(&x)?;
            let hw = Cohomology::new(&y.module, s.arity())?;
            entry["wedge"] =
                json!({ "H^r": hw.group().to_string(), "class": elem(&hw.coords(&y)?) });
        }
        out["symbol"] = entry;
    }
    Ok(out)
}

/// Indented `key: value` rendering of a JSON value.
pub fn render_text(v: &Value) -> String {
    fn go(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    if x.is_object()
                        || (x.is_array() && x.as_array().unwrap().iter().any(|e| e.is_object()))
                    {
                        out.push_str(&format!("{pad}{k}:\n"));
                        go(x, indent + 1, out);
                    } else {
                        out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                    }
                }
            }
            Value::Array(xs) => {
                for x in xs {
                    out.push_str(&format!("{pad}-\n"));
                    go(x, indent + 1, out);
                }
            }
            _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Array(xs) => {
                format!("[{}]", xs.iter().map(scalar).collect::<Vec<_>>().join(", "))
            }
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    go(v, 0, &mut out);
    out
}
