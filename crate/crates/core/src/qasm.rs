// SPDX-License-Identifier: Apache-2.0

//! A small OpenQASM 2.0 subset: `qreg`, `creg`, `x`, `h`, `cx`, `ccx`,
//! `mcx` (last operand is the target), `swap`, `measure` and `//` comments.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate, GateKind, QubitId};
use crate::error::{Error, Result};

const DEFAULT_NAME: &str = "circuit";

pub fn parse_qasm(text: &str) -> Result<Circuit> {
    parse_qasm_named(text, DEFAULT_NAME)
}

struct Register {
    offset: usize,
    size: usize,
}

#[derive(Default)]
struct Parser {
    qregs: HashMap<String, Register>,
    cregs: HashMap<String, Register>,
    qubits: usize,
    clbits: usize,
    gates: Vec<(usize, Gate)>,
}

pub fn parse_qasm_named(text: &str, name: &str) -> Result<Circuit> {
    let mut parser = Parser::default();
    for (line, stmt) in statements(text)? {
        parser.statement(line, &stmt)?;
    }
    let mut circuit = Circuit::new(name, parser.qubits);
    for (_, gate) in parser.gates {
        circuit.push(gate)?;
    }
    Ok(circuit)
}

/// Splits source into `;`-terminated statements tagged with the line they
/// start on. Comments are stripped.
fn statements(text: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let code = raw.split("//").next().unwrap_or("");
        for ch in code.chars() {
            if ch == ';' {
                let stmt = current.trim().to_string();
                if stmt.is_empty() {
                    return Err(Error::Syntax {
                        line: line_no,
                        message: "empty statement".into(),
                    });
                }
                out.push((start_line, stmt));
                current.clear();
            } else {
                if current.trim().is_empty() && !ch.is_whitespace() {
                    start_line = line_no;
                }
                current.push(ch);
            }
        }
        current.push(' ');
    }
    if !current.trim().is_empty() {
        return Err(Error::Syntax {
            line: start_line,
            message: format!("missing `;` after `{}`", current.trim()),
        });
    }
    Ok(out)
}

fn parse_indexed(line: usize, token: &str) -> Result<(String, usize)> {
    let token = token.trim();
    let open = token.find('[').ok_or_else(|| Error::Syntax {
        line,
        message: format!("expected `name[index]`, found `{token}`"),
    })?;
    if !token.ends_with(']') {
        return Err(Error::Syntax {
            line,
            message: format!("expected `]` in `{token}`"),
        });
    }
    let name = token[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::Syntax {
            line,
            message: format!("bad register name in `{token}`"),
        });
    }
    let index = token[open + 1..token.len() - 1]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Syntax {
            line,
            message: format!("bad index in `{token}`"),
        })?;
    Ok((name.to_string(), index))
}

impl Parser {
    fn statement(&mut self, line: usize, stmt: &str) -> Result<()> {
        let (head, rest) = match stmt.find(char::is_whitespace) {
            Some(pos) => (&stmt[..pos], stmt[pos..].trim()),
            None => (stmt, ""),
        };
        match head {
            "OPENQASM" => {
                if rest != "2.0" {
                    return Err(Error::Syntax {
                        line,
                        message: format!("unsupported OPENQASM version `{rest}`"),
                    });
                }
                Ok(())
            }
            "include" => Ok(()),
            "qreg" => {
                let (name, size) = parse_indexed(line, rest)?;
                self.declare(line, name, size, true)
            }
            "creg" => {
                let (name, size) = parse_indexed(line, rest)?;
                self.declare(line, name, size, false)
            }
            "measure" => self.measure(line, rest),
            "x" | "h" | "cx" | "ccx" | "mcx" | "swap" => self.gate(line, head, rest),
            other => Err(Error::UnknownGate {
                line,
                name: other.to_string(),
            }),
        }
    }

    fn declare(&mut self, line: usize, name: String, size: usize, quantum: bool) -> Result<()> {
        let (regs, count) = if quantum {
            (&mut self.qregs, &mut self.qubits)
        } else {
            (&mut self.cregs, &mut self.clbits)
        };
        if regs.contains_key(&name) {
            return Err(Error::Syntax {
                line,
                message: format!("register `{name}` declared twice"),
            });
        }
        regs.insert(name, Register { offset: *count, size });
        *count += size;
        Ok(())
    }

    fn resolve(
        &self,
        line: usize,
        token: &str,
        quantum: bool,
    ) -> Result<usize> {
        let (name, index) = parse_indexed(line, token)?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let reg = regs.get(&name).ok_or_else(|| Error::Syntax {
            line,
            message: format!("undeclared register `{name}`"),
        })?;
        if index >= reg.size {
            return Err(Error::QubitOutOfRange {
                index,
                width: reg.size,
            });
        }
        Ok(reg.offset + index)
    }

    fn gate(&mut self, line: usize, name: &str, rest: &str) -> Result<()> {
        let operands: Vec<&str> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',').map(str::trim).collect()
        };
        let expected = match name {
            "x" | "h" => Some(1),
            "cx" | "swap" => Some(2),
            "ccx" => Some(3),
            _ => None,
        };
        match expected {
            Some(n) if operands.len() != n => {
                return Err(Error::Syntax {
                    line,
                    message: format!(
                        "`{name}` expects {n} operand(s), found {}{}",
                        operands.len(),
                        if operands.len() < n { " (missing operand)" } else { "" }
                    ),
                })
            }
            None if operands.len() < 4 => {
                return Err(Error::Syntax {
                    line,
                    message: format!(
                        "`mcx` expects at least 3 controls and a target, found {} operand(s)",
                        operands.len()
                    ),
                })
            }
            _ => {}
        }
        let qubits = operands
            .iter()
            .map(|t| self.resolve(line, t, true).map(QubitId))
            .collect::<Result<Vec<_>>>()?;
        let (target, controls) = qubits.split_last().expect("arity checked");
        let kind = match name {
            "x" => GateKind::X,
            "h" => GateKind::H,
            "cx" => GateKind::Cnot,
            "ccx" => GateKind::Toffoli,
            "swap" => GateKind::Swap,
            _ => GateKind::Mct,
        };
        let gate = Gate::new(kind, controls.to_vec(), *target, None).map_err(|e| Error::Syntax {
            line,
            message: e.to_string(),
        })?;
        self.gates.push((line, gate));
        Ok(())
    }

    fn measure(&mut self, line: usize, rest: &str) -> Result<()> {
        let (lhs, rhs) = rest.split_once("->").ok_or_else(|| Error::Syntax {
            line,
            message: "measure expects `q[i] -> c[j]`".into(),
        })?;
        let qubit = self.resolve(line, lhs, true)?;
        let clbit = self.resolve(line, rhs, false)?;
        self.gates.push((line, Gate::measure(qubit, clbit)));
        Ok(())
    }
}

/// Emits the circuit in the subset accepted by [`parse_qasm`].
pub fn serialize_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let clbits = circuit
        .gates()
        .iter()
        .filter_map(Gate::classical_bit)
        .map(|c| c + 1)
        .max()
        .unwrap_or(0)
        .max(circuit.width());
    let _ = writeln!(out, "qreg q[{}];", circuit.width());
    let _ = writeln!(out, "creg c[{clbits}];");
    for gate in circuit.gates() {
        match gate.kind() {
            GateKind::Measure => {
                let _ = writeln!(
                    out,
                    "measure q[{}] -> c[{}];",
                    gate.target().0,
                    gate.classical_bit().unwrap_or(gate.target().0)
                );
            }
            kind => {
                let operands: Vec<String> =
                    gate.qubits().map(|q| format!("q[{}]", q.0)).collect();
                let _ = writeln!(out, "{} {};", kind.name(), operands.join(","));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_line_program() {
        let c = parse_qasm("qreg q[2]; x q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.width(), 2);
        assert_eq!(c.gates(), &[Gate::x(0), Gate::cnot(0, 1)]);
    }

    #[test]
    fn parses_toffoli() {
        let c = parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];").unwrap();
        assert_eq!(c.width(), 3);
        assert_eq!(c.gates(), &[Gate::toffoli(0, 1, 2)]);
    }

    #[test]
    fn missing_operand_is_a_syntax_error() {
        let err = parse_qasm("qreg q[2];\ncx q[0];").unwrap_err();
        match err {
            Error::Syntax { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("missing operand"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_gate_and_range_errors() {
        assert_eq!(
            parse_qasm("qreg q[1];\nrz(0.1) q[0];").unwrap_err(),
            Error::UnknownGate {
                line: 2,
                name: "rz(0.1)".into()
            }
        );
        assert_eq!(
            parse_qasm("qreg q[2]; x q[2];").unwrap_err(),
            Error::QubitOutOfRange { index: 2, width: 2 }
        );
        assert!(matches!(
            parse_qasm("qreg q[2]; x q[0]"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn multiple_registers_are_concatenated() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg a[2];\nqreg b[1];\ncreg c[3];\n\
                   ccx a[0],a[1],b[0]; // and\nmeasure b[0] -> c[2];\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.width(), 3);
        assert_eq!(c.gates(), &[Gate::toffoli(0, 1, 2), Gate::measure(2, 2)]);
    }

    #[test]
    fn mcx_round_trips() {
        let c = Circuit::from_gates(
            "m",
            5,
            vec![Gate::mct(&[0, 1, 2, 3], 4).unwrap(), Gate::swap(0, 4)],
        )
        .unwrap();
        let text = serialize_qasm(&c);
        assert!(text.contains("mcx q[0],q[1],q[2],q[3],q[4];"));
        assert_eq!(parse_qasm_named(&text, "m").unwrap(), c);
    }

    #[test]
    fn empty_circuit_emits_declarations_only() {
        let text = serialize_qasm(&Circuit::new("e", 3));
        assert_eq!(
            text,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[3];\n"
        );
    }

    #[test]
    fn parse_examples_round_trip() {
        for src in [
            "qreg q[2]; x q[0]; cx q[0],q[1];",
            "qreg q[3]; ccx q[0],q[1],q[2];",
            "qreg q[2]; creg c[2]; h q[0]; measure q[0] -> c[1];",
        ] {
            let c = parse_qasm(src).unwrap();
            assert_eq!(parse_qasm(&serialize_qasm(&c)).unwrap(), c);
        }
    }
}
