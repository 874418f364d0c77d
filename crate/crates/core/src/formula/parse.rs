use std::collections::HashMap;

use super::registry::{is_gate_line, Registry};
use super::{Expr, Formula};
use crate::error::{Error, ParseError, ParseErrorKind, Position, Result};

/// Parses the formula DSL:
///
/// ```text
/// formula := expr EOF
/// expr    := IDENT '(' [expr (',' expr)*] ')' | VAR
/// VAR     := 'x' [1-9][0-9]*
/// IDENT   := [A-Z][A-Z0-9_]*
/// ```
///
/// The empty argument list only fits nullary gates such as `CONST0()`.
pub fn parse(text: &str, registry: &Registry) -> Result<Formula> {
    let mut parser = Parser {
        text,
        bytes: text.as_bytes(),
        pos: 0,
        registry,
        leaves: HashMap::new(),
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.bytes.len() {
        return Err(parser.error_at(parser.pos, syntax("expected end of input")));
    }
    let max = parser.leaves.keys().copied().max().unwrap_or(0);
    if let Some(missing) = (1..=max).find(|j| !parser.leaves.contains_key(j)) {
        return Err(parser.error_at(
            parser.leaves[&max],
            ParseErrorKind::NonContiguousVariables { missing, max },
        ));
    }
    Formula::new(expr)
}

/// A formula file: optional `gate` definition lines and `#` comments
/// followed by one formula expression.
#[derive(Debug, Clone)]
pub struct ParsedSource {
    pub registry: Registry,
    pub formula: Formula,
}

/// Parses a formula file on top of `base`. Gate lines and comments are
/// blanked before parsing so error positions refer to the original text.
pub fn parse_source(text: &str, base: &Registry) -> Result<ParsedSource> {
    let mut registry = base.clone();
    let mut definitions = String::new();
    let mut body = String::with_capacity(text.len());
    for segment in text.split_inclusive('\n') {
        let (line, newline) = match segment.strip_suffix('\n') {
            Some(line) => (line, "\n"),
            None => (segment, ""),
        };
        if is_gate_line(line) {
            definitions.push_str(line);
            body.extend(std::iter::repeat_n(' ', line.len()));
        } else {
            let kept = line.split_once('#').map_or(line, |(before, _)| before);
            body.push_str(kept);
            body.extend(std::iter::repeat_n(' ', line.len() - kept.len()));
        }
        definitions.push('\n');
        body.push_str(newline);
    }
    registry.load(&definitions)?;
    let formula = parse(&body, &registry)?;
    Ok(ParsedSource { registry, formula })
}

fn syntax(message: &str) -> ParseErrorKind {
    ParseErrorKind::Syntax(message.to_string())
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    registry: &'a Registry,
    /// Variable index to the offset of its leaf.
    leaves: HashMap<usize, usize>,
}

impl Parser<'_> {
    fn error_at(&self, offset: usize, kind: ParseErrorKind) -> Error {
        Error::Parse(ParseError {
            position: Position::locate(self.text, offset),
            kind,
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.describe_here();
            Err(self.error_at(
                self.pos,
                ParseErrorKind::Syntax(format!("expected `{}`, found {found}", byte as char)),
            ))
        }
    }

    fn describe_here(&self) -> String {
        match self.text[self.pos..].chars().next() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.pos < self.bytes.len() && f(self.bytes[self.pos]) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn expr(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let digits = self.take_while(|b| b.is_ascii_digit()).to_string();
                if digits.is_empty() || digits.starts_with('0') {
                    return Err(self.error_at(start, syntax("variables are written x1, x2, ...")));
                }
                if self
                    .peek()
                    .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_')
                {
                    return Err(
                        self.error_at(self.pos, syntax("unexpected character after variable"))
                    );
                }
                let var: usize = digits
                    .parse()
                    .map_err(|_| self.error_at(start, syntax("variable index too large")))?;
                if self.leaves.insert(var, start).is_some() {
                    return Err(self.error_at(start, ParseErrorKind::RepeatedVariable(var)));
                }
                Ok(Expr::Var(var))
            }
            Some(b) if b.is_ascii_uppercase() => {
                let name = self
                    .take_while(|b| b.is_ascii_uppercase() || b.is_ascii_digit() || b == b'_')
                    .to_string();
                self.expect(b'(')?;
                let mut children = Vec::new();
                self.skip_ws();
                if self.peek() == Some(b')') {
                    self.pos += 1;
                } else {
                    loop {
                        children.push(self.expr()?);
                        self.skip_ws();
                        match self.peek() {
                            Some(b',') => self.pos += 1,
                            Some(b')') => {
                                self.pos += 1;
                                break;
                            }
                            _ => {
                                let found = self.describe_here();
                                return Err(self.error_at(
                                    self.pos,
                                    ParseErrorKind::Syntax(format!(
                                        "expected `,` or `)`, found {found}"
                                    )),
                                ));
                            }
                        }
                    }
                }
                let gate = self
                    .registry
                    .resolve(&name, children.len())
                    .map_err(|kind| self.error_at(start, kind))?;
                Ok(Expr::Gate(gate, children))
            }
            _ => {
                let found = self.describe_here();
                Err(self.error_at(
                    start,
                    ParseErrorKind::Syntax(format!("expected a gate or variable, found {found}")),
                ))
            }
        }
    }
}
