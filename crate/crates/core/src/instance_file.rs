//! Instance files: a `problem <kind>` header, `key=value` fields and
//! embedded netlist blocks.
//!
//! ```text
//! problem sink-of-dag-with-source
//! valuation=2
//! source=010
//! begin successor-valuation
//! circuit sv inputs=3 outputs=5
//! ...
//! end
//! ```
//!
//! Blocks: `successor` for ITER kinds, `successor-valuation` (successor
//! outputs first) for Sink-of-DAG kinds, `successor` and `predecessor` for
//! End-of-Line.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::bits::BitString;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::netlist::{emit_netlist, parse_netlist_at};
use crate::problems::{
    EolInstance, IterInstance, IterWithSourceInstance, ProblemInstance, ProblemKind, SodInstance,
    SodWithSourceInstance,
};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct Parts {
    kind: Option<ProblemKind>,
    fields: HashMap<String, (usize, String)>,
    blocks: HashMap<String, (usize, Circuit)>,
}

impl Parts {
    fn block(&mut self, name: &str) -> Result<Circuit> {
        self.blocks
            .remove(name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::MalformedInstance(format!("missing `begin {name}` block")))
    }

    fn field(&mut self, name: &str) -> Result<(usize, String)> {
        self.fields
            .remove(name)
            .ok_or_else(|| Error::MalformedInstance(format!("missing `{name}=` field")))
    }

    fn bits(&mut self, name: &str) -> Result<BitString> {
        let (line, v) = self.field(name)?;
        v.parse()
            .map_err(|_| syntax(line, format!("`{name}` must be a bit string")))
    }

    fn finish(self) -> Result<()> {
        if let Some((k, (line, _))) = self.fields.iter().min_by_key(|(_, (l, _))| *l) {
            return Err(syntax(*line, format!("unexpected field `{k}`")));
        }
        if let Some((k, (line, _))) = self.blocks.iter().min_by_key(|(_, (l, _))| *l) {
            return Err(syntax(*line, format!("unexpected block `{k}`")));
        }
        Ok(())
    }
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance> {
    let mut parts = Parts::default();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let line_no = i + 1;
        let line = match lines[i].find('#') {
            Some(p) => &lines[i][..p],
            None => lines[i],
        }
        .trim();
        i += 1;
        if line.is_empty() {
            continue;
        }
        if let Some(kind) = line.strip_prefix("problem ") {
            if parts.kind.is_some() {
                return Err(syntax(line_no, "second `problem` line"));
            }
            parts.kind = Some(
                kind.trim()
                    .parse()
                    .map_err(|e: Error| syntax(line_no, e.to_string()))?,
            );
        } else if let Some(name) = line.strip_prefix("begin ") {
            let start = i;
            while i < lines.len() && lines[i].trim() != "end" {
                i += 1;
            }
            if i == lines.len() {
                return Err(syntax(line_no, format!("block `{name}` has no `end`")));
            }
            let body = lines[start..i].join("\n");
            i += 1;
            let nl = parse_netlist_at(&body, start + 1)?;
            if parts
                .blocks
                .insert(name.trim().to_string(), (line_no, nl.circuit))
                .is_some()
            {
                return Err(syntax(line_no, format!("duplicate block `{name}`")));
            }
        } else if let Some((k, v)) = line.split_once('=') {
            if parts
                .fields
                .insert(k.trim().to_string(), (line_no, v.trim().to_string()))
                .is_some()
            {
                return Err(syntax(line_no, format!("duplicate field `{}`", k.trim())));
            }
        } else {
            return Err(syntax(line_no, format!("unrecognized line {line:?}")));
        }
    }
    let kind = parts
        .kind
        .ok_or_else(|| syntax(1, "missing `problem <kind>` line"))?;
    let inst: ProblemInstance = match kind {
        ProblemKind::Iter => IterInstance::new(parts.block("successor")?)?.into(),
        ProblemKind::IterWithSource => {
            let s = parts.bits("source")?;
            IterWithSourceInstance::new(parts.block("successor")?, s)?.into()
        }
        ProblemKind::Sod | ProblemKind::SodWithSource => {
            let (line, v) = parts.field("valuation")?;
            let m: usize = v
                .parse()
                .map_err(|_| syntax(line, "`valuation` must be a count"))?;
            let dag = SodInstance::from_combined(parts.block("successor-valuation")?)?;
            if dag.m() != m {
                return Err(syntax(
                    line,
                    format!(
                        "valuation={m} but the circuit has {} valuation bits",
                        dag.m()
                    ),
                ));
            }
            if kind == ProblemKind::Sod {
                dag.into()
            } else {
                let s = parts.bits("source")?;
                SodWithSourceInstance::new(dag, s)?.into()
            }
        }
        ProblemKind::Eol => {
            let s = parts.block("successor")?;
            EolInstance::new(s, parts.block("predecessor")?)?.into()
        }
    };
    parts.finish()?;
    Ok(inst)
}

fn block(out: &mut String, name: &str, c: &Circuit) {
    writeln!(out, "begin {name}").unwrap();
    out.push_str(&emit_netlist(c, name));
    writeln!(out, "end").unwrap();
}

pub fn emit_instance(inst: &ProblemInstance) -> String {
    let mut out = format!("problem {}\n", inst.kind());
    match inst {
        ProblemInstance::Iter(i) => block(&mut out, "successor", &i.successor),
        ProblemInstance::IterWithSource(i) => {
            writeln!(out, "source={}", i.source).unwrap();
            block(&mut out, "successor", &i.successor);
        }
        ProblemInstance::Sod(d) => {
            writeln!(out, "valuation={}", d.m()).unwrap();
            block(&mut out, "successor-valuation", d.combined());
        }
        ProblemInstance::SodWithSource(i) => {
            writeln!(out, "valuation={}", i.dag.m()).unwrap();
            writeln!(out, "source={}", i.source).unwrap();
            block(&mut out, "successor-valuation", i.dag.combined());
        }
        ProblemInstance::Eol(e) => {
            block(&mut out, "successor", &e.successor);
            block(&mut out, "predecessor", &e.predecessor);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::random_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_every_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in ProblemKind::ALL {
            for n in 1..=3 {
                let inst = random_instance(&mut rng, kind, n, 2).unwrap();
                let text = emit_instance(&inst);
                let back = parse_instance(&text).unwrap();
                assert_eq!(back, inst, "{kind}");
                assert!(back.well_formed());
                assert_eq!(emit_instance(&back), text);
            }
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "problem iter-with-source\nsource=0x\nbegin successor\ncircuit s inputs=1 outputs=1\ng0 = INPUT 0\noutput 0 = g0\nend\n";
        assert!(matches!(
            parse_instance(text),
            Err(Error::Syntax { line: 2, .. })
        ));
        let text =
            "problem iter\nbegin successor\ncircuit s inputs=1 outputs=1\ng0 = XOR g0\nend\n";
        assert!(matches!(
            parse_instance(text),
            Err(Error::Syntax { line: 4, .. })
        ));
        assert!(matches!(
            parse_instance("problem nope\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        let text = "problem iter\nbegin successor\ncircuit s inputs=1 outputs=1\n";
        assert!(matches!(
            parse_instance(text),
            Err(Error::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn stray_fields_are_rejected() {
        let mut text = emit_instance(
            &IterInstance::new(
                crate::synth::circuit_from_table(1, &["1".parse().unwrap(), "1".parse().unwrap()])
                    .unwrap(),
            )
            .unwrap()
            .into(),
        );
        text.push_str("source=1\n");
        assert!(matches!(parse_instance(&text), Err(Error::Syntax { .. })));
    }
}
