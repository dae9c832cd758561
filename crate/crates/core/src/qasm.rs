//! OpenQASM 2.0 export and a reader for the same gate subset.
//!
//! `rz` is written and read as `diag(e^{-iθ/2}, e^{iθ/2})`; the circuit's
//! global phase travels in a `// global_phase` comment.

use std::fmt::Write as _;
use std::path::Path;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

fn angle(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_qasm(circuit: &Circuit) -> String {
    let mut s = String::from(HEADER);
    let _ = writeln!(s, "qreg q[{}];", circuit.width());
    if circuit.global_phase() != 0.0 {
        let _ = writeln!(s, "// global_phase {}", angle(circuit.global_phase()));
    }
    for g in circuit.gates() {
        let _ = match *g {
            Gate::Rz { theta, q } => writeln!(s, "rz({}) q[{q}];", angle(theta)),
            Gate::Cnot { control, target } => writeln!(s, "cx q[{control}],q[{target}];"),
            Gate::H { q } => writeln!(s, "h q[{q}];"),
            Gate::CPhase {
                lambda,
                control,
                target,
            } => {
                writeln!(s, "cu1({}) q[{control}],q[{target}];", angle(lambda))
            }
            Gate::Swap { a, b } => writeln!(s, "swap q[{a}],q[{b}];"),
        };
    }
    s
}

pub fn export_qasm(circuit: &Circuit, path: &Path) -> Result<()> {
    std::fs::write(path, to_qasm(circuit)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn qubit(tok: &str, line: usize) -> Result<u32> {
    tok.trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .and_then(|i| i.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected q[<index>], found {tok:?}")))
}

pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut phase = 0.0;
    let mut saw_version = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if let Some(c) = l.strip_prefix("//") {
            if let Some(v) = c.trim().strip_prefix("global_phase") {
                phase = v
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad global phase {:?}", v.trim())))?;
            }
            continue;
        }
        if l.is_empty() {
            continue;
        }
        let stmt = l
            .strip_suffix(';')
            .ok_or_else(|| parse_err(line, "missing ';'"))?
            .trim();
        if stmt == "OPENQASM 2.0" {
            saw_version = true;
            continue;
        }
        if !saw_version {
            return Err(parse_err(line, "expected OPENQASM 2.0 header"));
        }
        if stmt.starts_with("include") {
            continue;
        }
        if let Some(r) = stmt.strip_prefix("qreg") {
            if circuit.is_some() {
                return Err(parse_err(line, "only one qreg is supported"));
            }
            circuit = Some(Circuit::new(qubit(r, line)?));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| parse_err(line, "gate before qreg declaration"))?;
        let (head, args) = stmt
            .split_once(|ch: char| ch.is_whitespace())
            .ok_or_else(|| parse_err(line, format!("malformed statement {stmt:?}")))?;
        let (name, param) = match head.split_once('(') {
            Some((n, p)) => {
                let p = p
                    .strip_suffix(')')
                    .ok_or_else(|| parse_err(line, "unclosed parameter list"))?;
                let v: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad angle {p:?}")))?;
                (n, Some(v))
            }
            None => (head, None),
        };
        let qs = args.split(',').map(|t| qubit(t, line)).collect::<Result<Vec<u32>>>()?;
        let gate = match (name, param, qs.as_slice()) {
            ("rz", Some(theta), &[q]) => Gate::Rz { theta, q },
            ("cx", None, &[control, target]) => Gate::Cnot { control, target },
            ("h", None, &[q]) => Gate::H { q },
            ("cu1", Some(lambda), &[control, target]) => Gate::CPhase {
                lambda,
                control,
                target,
            },
            ("swap", None, &[a, b]) => Gate::Swap { a, b },
            _ => return Err(parse_err(line, format!("unsupported statement {stmt:?}"))),
        };
        c.push(gate).map_err(|e| parse_err(line, e.to_string()))?;
    }
    let mut c = circuit.ok_or_else(|| parse_err(text.lines().count(), "no qreg declared"))?;
    c.add_global_phase(phase);
    Ok(c)
}

pub fn read_qasm(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_qasm(&text)
}
