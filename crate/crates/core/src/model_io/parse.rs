//! Line-oriented Pauli-sum text format.
//!
//! ```text
//! qubits 2
//! # comment
//! 0.5 Z0 Z1
//! -0.25 X0
//! 1.0 I
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::pauli::{Axis, PauliString, PauliSum, PauliTerm, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    BadQubitCount(String),
    MalformedNumber(String),
    UnknownAxis(char),
    MalformedOp(String),
    NegativeIndex(String),
    IndexOutOfRange { index: usize, qubit_count: usize },
    DuplicateQubit(usize),
    MisplacedIdentity,
    InvalidUtf8,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use ParseErrorKind::*;
        match self {
            MissingHeader => write!(f, "missing `qubits <n>` header"),
            BadQubitCount(s) => write!(f, "invalid qubit count `{s}` (expected 1..={MAX_QUBITS})"),
            MalformedNumber(s) => write!(f, "malformed number `{s}`"),
            UnknownAxis(c) => write!(f, "unknown axis '{c}'"),
            MalformedOp(s) => write!(f, "malformed operator `{s}`"),
            NegativeIndex(s) => write!(f, "negative qubit index in `{s}`"),
            IndexOutOfRange { index, qubit_count } => {
                write!(f, "qubit index {index} out of range for {qubit_count} qubits")
            }
            DuplicateQubit(q) => write!(f, "qubit {q} appears twice in one term"),
            MisplacedIdentity => write!(f, "`I` must be the only operator of a term"),
            InvalidUtf8 => write!(f, "input is not valid UTF-8"),
        }
    }
}

/// Parse failure with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

/// Splits on ASCII spaces and tabs, yielding `(1-based column, token)`.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let skip = rest.len() - rest.trim_start_matches([' ', '\t']).len();
        rest = &rest[skip..];
        offset += skip;
        if rest.is_empty() {
            return None;
        }
        let len = rest.find([' ', '\t']).unwrap_or(rest.len());
        let tok = &rest[..len];
        let col = line[..offset].chars().count() + 1;
        rest = &rest[len..];
        offset += len;
        Some((col, tok))
    })
}

fn parse_real(tok: &str) -> Option<f64> {
    let valid = !tok.is_empty()
        && tok
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
        && tok.chars().any(|c| c.is_ascii_digit());
    if !valid {
        return None;
    }
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_op(tok: &str, qubit_count: usize, line: usize, col: usize) -> Result<(usize, Axis), ParseError> {
    let mut chars = tok.chars();
    let first = chars.next().expect("tokens are non-empty");
    let axis = match first {
        'X' => Axis::X,
        'Y' => Axis::Y,
        'Z' => Axis::Z,
        'I' => return Err(err(line, col, ParseErrorKind::MisplacedIdentity)),
        c if c.is_ascii_alphabetic() => return Err(err(line, col, ParseErrorKind::UnknownAxis(c))),
        _ => return Err(err(line, col, ParseErrorKind::MalformedOp(tok.to_string()))),
    };
    let digits = chars.as_str();
    if digits.starts_with('-') && digits.len() > 1 && digits[1..].chars().all(|c| c.is_ascii_digit()) {
        return Err(err(line, col, ParseErrorKind::NegativeIndex(tok.to_string())));
    }
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(err(line, col, ParseErrorKind::MalformedOp(tok.to_string())));
    }
    let index: usize = digits.parse().map_err(|_| {
        err(
            line,
            col,
            ParseErrorKind::IndexOutOfRange {
                index: usize::MAX,
                qubit_count,
            },
        )
    })?;
    if index >= qubit_count {
        return Err(err(line, col, ParseErrorKind::IndexOutOfRange { index, qubit_count }));
    }
    Ok((index, axis))
}

/// Parses bytes, rejecting non-UTF-8 input with a [`ParseError`].
pub fn parse_pauli_sum_bytes(bytes: &[u8]) -> Result<PauliSum, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        err(line, 1, ParseErrorKind::InvalidUtf8)
    })?;
    parse_pauli_sum(text)
}

pub fn parse_pauli_sum(text: &str) -> Result<PauliSum, ParseError> {
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));

    let (_, header) = lines.next().expect("split yields at least one item");
    let mut head = tokens(header);
    let qubit_count = match (head.next(), head.next(), head.next()) {
        (Some((_, "qubits")), Some((col, n)), None) => match n.parse::<usize>() {
            Ok(v) if n.chars().all(|c| c.is_ascii_digit()) && (1..=MAX_QUBITS).contains(&v) => v,
            _ => return Err(err(1, col, ParseErrorKind::BadQubitCount(n.to_string()))),
        },
        _ => return Err(err(1, 1, ParseErrorKind::MissingHeader)),
    };

    let mut terms = Vec::new();
    for (lineno, line) in lines {
        let trimmed = line.trim_start_matches([' ', '\t']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = tokens(line);
        let (col, num) = toks.next().expect("line is non-blank");
        let coefficient =
            parse_real(num).ok_or_else(|| err(lineno, col, ParseErrorKind::MalformedNumber(num.to_string())))?;
        let rest: Vec<_> = toks.collect();
        let string = match rest.as_slice() {
            [] | [(_, "I")] => PauliString::identity(),
            _ => {
                let mut ops = Vec::with_capacity(rest.len());
                for &(col, tok) in &rest {
                    let op = parse_op(tok, qubit_count, lineno, col)?;
                    if ops.iter().any(|&(q, _)| q == op.0) {
                        return Err(err(lineno, col, ParseErrorKind::DuplicateQubit(op.0)));
                    }
                    ops.push(op);
                }
                PauliString::new(ops).expect("duplicates checked above")
            }
        };
        terms.push(PauliTerm::new(coefficient, string));
    }
    // Indices and coefficients were validated term by term above.
    Ok(PauliSum::from_terms(qubit_count, terms).expect("validated terms canonicalize"))
}

/// Writes one term per line with 17 significant digits, so parsing the
/// output reproduces the sum exactly.
pub fn serialize_pauli_sum(sum: &PauliSum) -> String {
    let mut out = format!("qubits {}\n", sum.qubit_count());
    for t in sum.terms() {
        let _ = writeln!(out, "{:.16e} {}", t.coefficient, t.string);
    }
    out
}
