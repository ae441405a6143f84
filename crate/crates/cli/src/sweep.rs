//! Sweep configs are JSON arrays of entries
//! `{"command": "discrepancy", "args": {"n": 200, ...}, "seeds": {"from": 1, "to": 10}}`.
//! Every arg becomes a `--key value` flag (`true` becomes a bare flag, arrays
//! repeat values) and `{seed}` inside a string is replaced by the run's seed.

use serde_json::{json, Map, Value};

use crate::args::SweepArgs;
use crate::io::{read_json, write};
use crate::record::{CliError, Outcome, RunRecord};

struct Entry {
    command: Vec<String>,
    args: Map<String, Value>,
    seeds: Option<Vec<u64>>,
}

fn bad(index: usize, message: impl Into<String>) -> CliError {
    CliError::SweepConfig {
        index: Some(index),
        message: message.into(),
    }
}

fn parse_entry(index: usize, v: &Value) -> Result<Entry, CliError> {
    let obj = v.as_object().ok_or_else(|| bad(index, "entry is not an object"))?;
    if let Some(key) = obj.keys().find(|k| !["command", "args", "seeds"].contains(&k.as_str())) {
        return Err(bad(index, format!("unknown key {key:?}")));
    }
    let command: Vec<String> = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| bad(index, "missing \"command\" string"))?
        .split_whitespace()
        .map(String::from)
        .collect();
    if command.is_empty() || command[0] == "sweep" {
        return Err(bad(index, "command must name a non-sweep subcommand"));
    }
    let args = match obj.get("args") {
        None => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(bad(index, "\"args\" must be an object")),
    };
    for (k, v) in &args {
        let scalar = |x: &Value| matches!(x, Value::String(_) | Value::Number(_) | Value::Bool(_) | Value::Null);
        let ok = scalar(v) || v.as_array().is_some_and(|a| a.iter().all(|x| scalar(x) && !x.is_boolean()));
        if !ok || k == "seed" {
            return Err(bad(index, format!("argument {k:?} must be a scalar or list of scalars, and seeds go in \"seeds\"")));
        }
    }
    let seeds = match obj.get("seeds") {
        None => None,
        Some(Value::Array(xs)) => Some(
            xs.iter()
                .map(|x| x.as_u64().ok_or_else(|| bad(index, "seeds must be non-negative integers")))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(Value::Object(r)) => {
            let from = r.get("from").and_then(Value::as_u64);
            let to = r.get("to").and_then(Value::as_u64);
            match (from, to) {
                (Some(a), Some(b)) if a <= b && r.len() == 2 => Some((a..=b).collect()),
                _ => return Err(bad(index, "seed range must be {\"from\": a, \"to\": b} with a <= b")),
            }
        }
        Some(_) => return Err(bad(index, "\"seeds\" must be a list or a range")),
    };
    Ok(Entry { command, args, seeds })
}

fn text(v: &Value, seed: Option<u64>) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match seed {
        Some(x) => s.replace("{seed}", &x.to_string()),
        None => s,
    }
}

fn argv(entry: &Entry, seed: Option<u64>) -> Vec<String> {
    let mut out = vec!["hypermatch".to_string()];
    out.extend(entry.command.iter().cloned());
    for (k, v) in &entry.args {
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(xs) => {
                out.push(flag);
                out.extend(xs.iter().map(|x| text(x, seed)));
            }
            _ => {
                out.push(flag);
                out.push(text(v, seed));
            }
        }
    }
    if let Some(s) = seed {
        out.push("--seed".into());
        out.push(s.to_string());
    }
    out
}

struct Row {
    index: usize,
    command: String,
    seed: Option<u64>,
    record: Option<RunRecord>,
    error: Option<String>,
    exit_code: i32,
}

fn run_one(index: usize, entry: &Entry, seed: Option<u64>) -> Row {
    let argv = argv(entry, seed);
    let command = entry.command.join(" ");
    match crate::parse(&argv) {
        Ok(cli) => {
            let record = crate::execute(cli, &argv);
            Row {
                index,
                command,
                seed,
                exit_code: record.exit_code,
                error: record.error.clone(),
                record: Some(record),
            }
        }
        Err(e) => Row {
            index,
            command,
            seed,
            record: None,
            error: Some(e.to_string().lines().next().unwrap_or("usage error").to_string()),
            exit_code: 64,
        },
    }
}

fn success(row: &Row) -> bool {
    row.exit_code == 0
        && row
            .record
            .as_ref()
            .is_none_or(|r| r.result.get("success").and_then(Value::as_bool).unwrap_or(true))
}

pub fn run(a: SweepArgs) -> Result<Outcome, CliError> {
    let config: Value = read_json(&a.config).map_err(|e| CliError::SweepConfig {
        index: None,
        message: e.to_string(),
    })?;
    let items = config.as_array().ok_or_else(|| CliError::SweepConfig {
        index: None,
        message: "config must be a JSON array".into(),
    })?;
    let entries = items.iter().enumerate().map(|(i, v)| parse_entry(i, v)).collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, Option<u64>)> = entries
        .iter()
        .enumerate()
        .flat_map(|(i, e)| match &e.seeds {
            None => vec![(i, None)],
            Some(s) => s.iter().map(|&x| (i, Some(x))).collect(),
        })
        .collect();
    let workers = a.threads.max(1);
    let mut rows: Vec<Row> = Vec::with_capacity(jobs.len());
    for batch in jobs.chunks(workers) {
        let done: Vec<Row> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|&(i, seed)| {
                    let entry = &entries[i];
                    scope.spawn(move || run_one(i, entry, seed))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        });
        rows.extend(done);
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "command", "seed", "exit_code", "success", "seeds", "result", "outputs", "error"])
        .unwrap();
    for row in &rows {
        let (seeds, result, outputs) = match &row.record {
            Some(r) => (
                serde_json::to_string(&r.seeds).unwrap(),
                serde_json::to_string(&r.result).unwrap(),
                r.outputs.join(";"),
            ),
            None => ("{}".into(), "null".into(), String::new()),
        };
        w.write_record([
            row.index.to_string(),
            row.command.clone(),
            row.seed.map(|s| s.to_string()).unwrap_or_default(),
            row.exit_code.to_string(),
            success(row).to_string(),
            seeds,
            result,
            outputs,
            row.error.clone().unwrap_or_default(),
        ])
        .unwrap();
    }
    write(&a.out, std::str::from_utf8(&w.into_inner().unwrap()).unwrap())?;
    let successes = rows.iter().filter(|r| success(r)).count();
    let failures = rows.iter().filter(|r| r.exit_code != 0).count();
    Ok(Outcome::new(json!({
        "entries": entries.len(),
        "runs": rows.len(),
        "successes": successes,
        "failures": failures,
        "success_fraction": if rows.is_empty() { 0.0 } else { successes as f64 / rows.len() as f64 },
    }))
    .output(&a.out))
}
