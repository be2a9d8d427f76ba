//! ISCAS `.bench` reader and writer.
//!
//! Grammar: `INPUT(x)`, `OUTPUT(x)`, `y = KIND(a, b, ...)`, `#` comments.
//! `q = DFF(d)` is cut into a pseudo primary input `q` and a pseudo primary
//! output `d`, the usual scan-access view of a sequential benchmark.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{BuildNet, GateKind, Netlist, NetlistBuilder, NetlistError};

fn syntax(line: usize, column: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && !s
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '=' | '#'))
}

/// Splits `KIND(args)` into the keyword and the raw argument list.
/// `offset` is the column of `s` within its line.
fn split_call(s: &str, line: usize, offset: usize) -> Result<(&str, Vec<(&str, usize)>), NetlistError> {
    let open = s
        .find('(')
        .ok_or_else(|| syntax(line, offset + s.len(), "expected `(`"))?;
    let close = s
        .rfind(')')
        .ok_or_else(|| syntax(line, offset + s.len(), "expected `)`"))?;
    if close < open {
        return Err(syntax(line, offset + close, "unbalanced parentheses"));
    }
    let trailing = s[close + 1..].trim();
    if !trailing.is_empty() {
        let col = offset + close + 1 + s[close + 1..].find(trailing).unwrap_or(0);
        return Err(syntax(line, col, format!("unexpected `{trailing}`")));
    }
    let keyword = s[..open].trim();
    let inner = &s[open + 1..close];
    let mut args = Vec::new();
    if !inner.trim().is_empty() {
        let mut start = 0;
        for part in inner.split(',') {
            let col = offset + open + 1 + start + (part.len() - part.trim_start().len());
            let name = part.trim();
            if !valid_name(name) {
                return Err(syntax(line, col, format!("invalid net name `{name}`")));
            }
            args.push((name, col));
            start += part.len() + 1;
        }
    }
    Ok((keyword, args))
}

pub fn parse_bench(text: &str) -> Result<Netlist, NetlistError> {
    let mut b = NetlistBuilder::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut flops: Vec<(String, String)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let code = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let indent = code.len() - code.trim_start().len();
        let stmt = code.trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some(eq) = stmt.find('=') {
            let lhs = stmt[..eq].trim();
            if !valid_name(lhs) {
                return Err(syntax(line, indent + 1, format!("invalid net name `{lhs}`")));
            }
            let rhs_off = indent + eq + 1;
            let (kw, args) = split_call(&stmt[eq + 1..], line, rhs_off + 1)?;
            if kw.eq_ignore_ascii_case("DFF") {
                if args.len() != 1 {
                    return Err(syntax(line, rhs_off + 1, "DFF takes exactly one input"));
                }
                flops.push((lhs.to_string(), args[0].0.to_string()));
                continue;
            }
            let kind = GateKind::from_bench_name(kw).ok_or_else(|| NetlistError::UnknownGate {
                line,
                name: kw.to_string(),
            })?;
            let ins: Vec<BuildNet> = args.iter().map(|(n, _)| b.net(n)).collect();
            let out = b.net(lhs);
            b.add_gate(kind, &ins, out)?;
        } else {
            let (kw, args) = split_call(stmt, line, indent + 1)?;
            if args.len() != 1 {
                return Err(syntax(line, indent + 1, format!("{kw} takes exactly one net")));
            }
            let name = args[0].0;
            if kw.eq_ignore_ascii_case("INPUT") {
                b.add_input(name)?;
            } else if kw.eq_ignore_ascii_case("OUTPUT") {
                outputs.push(name.to_string());
            } else {
                return Err(syntax(line, indent + 1, format!("unknown declaration `{kw}`")));
            }
        }
    }

    for (q, _) in &flops {
        b.add_input(q)?;
    }
    for o in &outputs {
        let n = b.net(o);
        b.add_output(n);
    }
    for (_, d) in &flops {
        let n = b.net(d);
        if !b.is_output(n) {
            b.add_output(n);
        }
    }
    b.finish()
}

pub fn emit_bench(nl: &Netlist) -> String {
    let mut s = String::new();
    for i in 0..nl.num_inputs() {
        let _ = writeln!(s, "INPUT({})", nl.name(super::NetId(i as u32)));
    }
    s.push('\n');
    for &o in nl.primary_outputs() {
        let _ = writeln!(s, "OUTPUT({})", nl.name(o));
    }
    if !nl.gates().is_empty() {
        s.push('\n');
    }
    for g in nl.gates() {
        let _ = write!(s, "{} = {}(", nl.name(g.output), g.kind.bench_name());
        for (i, inp) in g.inputs.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(nl.name(*inp));
        }
        s.push_str(")\n");
    }
    s
}
