//! Line-oriented netlist text format.
//!
//! ```text
//! circuit <name> inputs=<n> outputs=<m>
//! g<id> = INPUT <k> | CONST <0|1> | NOT g<a> | AND g<a> g<b> | OR g<a> g<b>
//! output <j> = g<id>
//! ```
//!
//! `#` starts a comment. Gates must be listed in topological order.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// A parsed netlist: the circuit plus the name from its header line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    pub name: String,
    pub circuit: Circuit,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
    .trim()
}

fn parse_kv(tok: &str, key: &str, line: usize) -> Result<usize> {
    tok.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| syntax(line, format!("expected {key}=<count>, found {tok:?}")))
}

fn parse_gate_id(tok: &str, line: usize) -> Result<usize> {
    tok.strip_prefix('g')
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| {
            syntax(
                line,
                format!("expected gate reference g<id>, found {tok:?}"),
            )
        })
}

/// Parses a netlist. `first_line` offsets reported line numbers when the
/// netlist is embedded in a larger file.
pub fn parse_netlist_at(text: &str, first_line: usize) -> Result<Netlist> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + first_line, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| syntax(first_line, "empty netlist"))?;
    let htoks: Vec<&str> = header.split_whitespace().collect();
    if htoks.len() != 4 || htoks[0] != "circuit" {
        return Err(syntax(
            hline,
            "expected header `circuit <name> inputs=<n> outputs=<m>`",
        ));
    }
    let name = htoks[1].to_string();
    let n = parse_kv(htoks[2], "inputs", hline)?;
    let m = parse_kv(htoks[3], "outputs", hline)?;

    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut gates = Vec::new();
    let mut outputs: Vec<Option<usize>> = vec![None; m];
    let lookup = |ids: &HashMap<usize, usize>, tok: &str, line: usize| -> Result<usize> {
        let id = parse_gate_id(tok, line)?;
        ids.get(&id)
            .copied()
            .ok_or_else(|| syntax(line, format!("reference to undefined gate g{id}")))
    };

    for (line, text) in lines {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.first() == Some(&"output") {
            if toks.len() != 4 || toks[2] != "=" {
                return Err(syntax(line, "expected `output <j> = g<id>`"));
            }
            let j: usize = toks[1]
                .parse()
                .map_err(|_| syntax(line, format!("bad output index {:?}", toks[1])))?;
            if j >= m {
                return Err(syntax(line, format!("output index {j} out of range")));
            }
            if outputs[j].is_some() {
                return Err(syntax(line, format!("output {j} assigned twice")));
            }
            outputs[j] = Some(lookup(&ids, toks[3], line)?);
            continue;
        }
        if toks.len() < 3 || toks[1] != "=" {
            return Err(syntax(line, format!("unrecognised line {text:?}")));
        }
        let id = parse_gate_id(toks[0], line)?;
        if ids.contains_key(&id) {
            return Err(syntax(line, format!("gate g{id} defined twice")));
        }
        let args = &toks[3..];
        let arity = |want: usize| -> Result<()> {
            if args.len() == want {
                Ok(())
            } else {
                Err(syntax(line, format!("{} takes {want} operand(s)", toks[2])))
            }
        };
        let gate = match toks[2] {
            "INPUT" => {
                arity(1)?;
                let k: usize = args[0]
                    .parse()
                    .map_err(|_| syntax(line, format!("bad input index {:?}", args[0])))?;
                if k >= n {
                    return Err(syntax(line, format!("input index {k} out of range")));
                }
                Gate::Input(k)
            }
            "CONST" => {
                arity(1)?;
                match args[0] {
                    "0" => Gate::Const(false),
                    "1" => Gate::Const(true),
                    other => return Err(syntax(line, format!("bad constant {other:?}"))),
                }
            }
            "NOT" => {
                arity(1)?;
                Gate::Not(lookup(&ids, args[0], line)?)
            }
            "AND" => {
                arity(2)?;
                Gate::And(lookup(&ids, args[0], line)?, lookup(&ids, args[1], line)?)
            }
            "OR" => {
                arity(2)?;
                Gate::Or(lookup(&ids, args[0], line)?, lookup(&ids, args[1], line)?)
            }
            other => return Err(syntax(line, format!("unknown gate kind {other:?}"))),
        };
        ids.insert(id, gates.len());
        gates.push(gate);
    }

    let outputs = outputs
        .into_iter()
        .enumerate()
        .map(|(j, o)| o.ok_or_else(|| syntax(hline, format!("output {j} never assigned"))))
        .collect::<Result<Vec<_>>>()?;
    let circuit = Circuit::new(n, gates, outputs)?;
    Ok(Netlist { name, circuit })
}

pub fn parse_netlist(text: &str) -> Result<Circuit> {
    parse_netlist_at(text, 1).map(|nl| nl.circuit)
}

pub fn emit_netlist(c: &Circuit, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "circuit {name} inputs={} outputs={}", c.n(), c.m()).unwrap();
    for (id, gate) in c.gates().iter().enumerate() {
        match *gate {
            Gate::Input(k) => writeln!(out, "g{id} = INPUT {k}"),
            Gate::Const(b) => writeln!(out, "g{id} = CONST {}", b as u8),
            Gate::Not(a) => writeln!(out, "g{id} = NOT g{a}"),
            Gate::And(a, b) => writeln!(out, "g{id} = AND g{a} g{b}"),
            Gate::Or(a, b) => writeln!(out, "g{id} = OR g{a} g{b}"),
        }
        .unwrap();
    }
    for (j, o) in c.outputs().iter().enumerate() {
        writeln!(out, "output {j} = g{o}").unwrap();
    }
    out
}
