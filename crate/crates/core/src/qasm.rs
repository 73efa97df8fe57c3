//! OpenQASM 3 export of Floquet periods, plus a reader for the subset the
//! exporter emits so that exported programs can be re-simulated.
//!
//! Gate conventions follow `stdgates.inc`: `rz(λ) = exp(-iλZ/2)`,
//! `rx(λ) = exp(-iλX/2)`. A bond gate `exp(-i(a XX + b ZZ))` on `(c, t)` is
//! emitted as `cx c,t; rx(2a) c; rz(2b) t; cx c,t;` since conjugation by
//! CNOT maps `X_c → X_c X_t` and `Z_t → Z_c Z_t`.

use std::fmt::Write as _;

use crate::circuit::{FloquetPeriod, GateSpec};
use crate::error::{Error, Result};
use crate::kernel::{Gate, C64};

/// Emits `repetitions` copies of `period` as an OpenQASM 3.0 program.
pub fn export_qasm(period: &FloquetPeriod, repetitions: usize) -> Result<String> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument(
            "repetitions must be at least 1".into(),
        ));
    }
    let specs = period.specs().ok_or_else(|| {
        Error::InvalidArgument("only periods from build_period can be exported".into())
    })?;
    let mut body = String::new();
    for spec in specs {
        match *spec {
            GateSpec::Rotation { site, theta } => {
                writeln!(body, "rz({}) q[{site}];", 2.0 * theta).unwrap();
            }
            GateSpec::Bond { site, t, jz } => {
                let (c, tq) = (site, site + 1);
                writeln!(body, "cx q[{c}], q[{tq}];").unwrap();
                writeln!(body, "rx({}) q[{c}];", 2.0 * t).unwrap();
                writeln!(body, "rz({}) q[{tq}];", 2.0 * jz).unwrap();
                writeln!(body, "cx q[{c}], q[{tq}];").unwrap();
            }
        }
    }
    let mut out = String::new();
    out.push_str("OPENQASM 3.0;\n");
    out.push_str("include \"stdgates.inc\";\n");
    writeln!(out, "qubit[{}] q;", period.num_qubits()).unwrap();
    for rep in 1..=repetitions {
        writeln!(out, "// period {rep}").unwrap();
        out.push_str(&body);
    }
    Ok(out)
}

/// A parsed program: register size and gates in application order.
#[derive(Clone, Debug)]
pub struct QasmProgram {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

fn rz(q: usize, lambda: f64) -> Result<Gate> {
    let z = C64::new(0.0, 0.0);
    Gate::single(
        q,
        [
            C64::from_polar(1.0, -lambda / 2.0),
            z,
            z,
            C64::from_polar(1.0, lambda / 2.0),
        ],
        "rz",
    )
}

fn rx(q: usize, lambda: f64) -> Result<Gate> {
    let (s, c) = (lambda / 2.0).sin_cos();
    let (c, ms) = (C64::new(c, 0.0), C64::new(0.0, -s));
    Gate::single(q, [c, ms, ms, c], "rx")
}

fn cx(control: usize, target: usize) -> Result<Gate> {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    // local index bit(control) + 2 bit(target): swap 1 <-> 3
    #[rustfmt::skip]
    let m = [
        l, o, o, o,
        o, o, o, l,
        o, o, l, o,
        o, l, o, o,
    ];
    Gate::two(control, target, m, "cx")
}

/// Parses the OpenQASM subset produced by [`export_qasm`]: the version
/// header, `include`, one `qubit[N] q;` declaration, and `rz`, `rx`, `cx`
/// statements, one per line. `//` comments and blank lines are ignored.
pub fn parse_qasm(text: &str) -> Result<QasmProgram> {
    let mut num_qubits: Option<usize> = None;
    let mut gates = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| err("statement must end with `;`".into()))?
            .trim();
        if !saw_header {
            if stmt != "OPENQASM 3.0" && stmt != "OPENQASM 3" {
                return Err(err(format!("expected `OPENQASM 3.0;`, found `{line}`")));
            }
            saw_header = true;
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("include") {
            if rest.trim() != "\"stdgates.inc\"" {
                return Err(err(format!("unsupported include `{}`", rest.trim())));
            }
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qubit[") {
            if num_qubits.is_some() {
                return Err(err("duplicate qubit declaration".into()));
            }
            let (size, name) = rest
                .split_once(']')
                .ok_or_else(|| err("malformed qubit declaration".into()))?;
            if name.trim() != "q" {
                return Err(err(format!(
                    "register must be named `q`, found `{}`",
                    name.trim()
                )));
            }
            let n: usize = size
                .trim()
                .parse()
                .map_err(|_| err(format!("bad register size `{size}`")))?;
            if n == 0 || n > 30 {
                return Err(err(format!("register size {n} out of range")));
            }
            num_qubits = Some(n);
            continue;
        }
        let n = num_qubits.ok_or_else(|| err("gate before qubit declaration".into()))?;
        let operand = |s: &str| -> Result<usize> {
            let inner = s
                .trim()
                .strip_prefix("q[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| err(format!("bad operand `{}`", s.trim())))?;
            let q: usize = inner
                .trim()
                .parse()
                .map_err(|_| err(format!("bad qubit index `{inner}`")))?;
            if q >= n {
                return Err(err(format!("qubit {q} out of range for register of {n}")));
            }
            Ok(q)
        };
        let gate = if let Some(rest) = stmt.strip_prefix("cx ") {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| err("cx needs two operands".into()))?;
            let (a, b) = (operand(a)?, operand(b)?);
            if a == b {
                return Err(err("cx operands must differ".into()));
            }
            cx(a, b)?
        } else if stmt.starts_with("rz(") || stmt.starts_with("rx(") {
            let (head, rest) = stmt
                .split_once(')')
                .ok_or_else(|| err("unclosed parameter list".into()))?;
            let angle: f64 = head[3..]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad angle `{}`", &head[3..])))?;
            if !angle.is_finite() {
                return Err(err("angle must be finite".into()));
            }
            let q = operand(rest)?;
            if stmt.starts_with("rz") {
                rz(q, angle)?
            } else {
                rx(q, angle)?
            }
        } else {
            return Err(err(format!("unsupported statement `{stmt}`")));
        };
        gates.push(gate);
    }
    let num_qubits = num_qubits.ok_or(Error::Parse {
        line: 0,
        message: "missing qubit declaration".into(),
    })?;
    Ok(QasmProgram { num_qubits, gates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_period, CircuitConfig};

    #[test]
    fn two_qubit_structure() {
        let period = build_period(&CircuitConfig::modulated(2, 0.3, 0.5)).unwrap();
        let text = export_qasm(&period, 1).unwrap();
        let stmts: Vec<&str> = text.lines().filter(|l| !l.starts_with("//")).collect();
        assert_eq!(stmts[0], "OPENQASM 3.0;");
        assert_eq!(stmts[2], "qubit[2] q;");
        let ops: Vec<&str> = stmts[3..]
            .iter()
            .map(|s| s.split(['(', ' ']).next().unwrap())
            .collect();
        assert_eq!(ops, ["rz", "rz", "cx", "rx", "rz", "cx"]);
    }

    #[test]
    fn repetitions_repeat_body() {
        let period = build_period(&CircuitConfig::modulated(4, 0.3, 0.5)).unwrap();
        let one = export_qasm(&period, 1).unwrap();
        let three = export_qasm(&period, 3).unwrap();
        assert_eq!(three.matches("// period").count(), 3);
        assert_eq!(three.matches("cx").count(), 3 * one.matches("cx").count());
        assert!(export_qasm(&period, 0).is_err());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = "OPENQASM 3.0;\nqubit[2] q;\nrz(0.1) q[5];\n";
        match parse_qasm(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_qasm("qubit[2] q;").is_err());
        assert!(parse_qasm("OPENQASM 3.0;\nrz(0.1) q[0];").is_err());
        assert!(parse_qasm("OPENQASM 3.0;\nqubit[2] q;\ncx q[0], q[0];").is_err());
        assert!(parse_qasm("OPENQASM 3.0;\nqubit[2] q;\nrz(nan) q[0];").is_err());
        assert!(parse_qasm("OPENQASM 3.0;\nqubit[2] q;\nh q[0];").is_err());
    }
}
