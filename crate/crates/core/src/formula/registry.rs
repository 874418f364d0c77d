use std::collections::BTreeMap;
use std::sync::Arc;

use super::gate::{parse_bits, GateSpec, MAX_ARITY};
use crate::error::{Error, ParseErrorKind, Result};

#[derive(Debug, Clone)]
enum Entry {
    /// One instance per arity in `min..=max`.
    Family {
        make: fn(usize) -> GateSpec,
        min: usize,
        max: usize,
    },
    Fixed(Arc<GateSpec>),
}

/// Gate names available to the parser.
#[derive(Debug, Clone)]
pub struct Registry {
    entries: BTreeMap<String, Entry>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::standard()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }

    /// AND, OR, NAND, NOR, XOR (fan-in 2 to 8), NOT, CONST0, CONST1, MAJ3.
    pub fn standard() -> Self {
        let mut r = Registry::empty();
        let families: [(&str, fn(usize) -> GateSpec); 5] = [
            ("AND", GateSpec::and),
            ("OR", GateSpec::or),
            ("NAND", GateSpec::nand),
            ("NOR", GateSpec::nor),
            ("XOR", GateSpec::xor),
        ];
        for (name, make) in families {
            r.entries.insert(
                name.to_string(),
                Entry::Family {
                    make,
                    min: 2,
                    max: MAX_ARITY,
                },
            );
        }
        for gate in [
            GateSpec::not(),
            GateSpec::constant(false),
            GateSpec::constant(true),
            GateSpec::maj3(),
        ] {
            r.insert(gate);
        }
        r
    }

    /// Adds or replaces a fixed-arity gate.
    pub fn insert(&mut self, gate: GateSpec) {
        self.entries
            .insert(gate.name().to_string(), Entry::Fixed(Arc::new(gate)));
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// The gate called `name` taking `arity` inputs.
    pub fn resolve(&self, name: &str, arity: usize) -> Result<Arc<GateSpec>, ParseErrorKind> {
        match self.entries.get(name) {
            None => Err(ParseErrorKind::UnknownGate(name.to_string())),
            Some(Entry::Fixed(gate)) => {
                if gate.arity() == arity {
                    Ok(gate.clone())
                } else {
                    Err(ParseErrorKind::ArityMismatch {
                        gate: name.to_string(),
                        expected: gate.arity(),
                        found: arity,
                    })
                }
            }
            Some(Entry::Family { make, min, max }) => {
                if (*min..=*max).contains(&arity) {
                    Ok(Arc::new(make(arity)))
                } else {
                    Err(ParseErrorKind::ArityMismatch {
                        gate: name.to_string(),
                        expected: if arity < *min { *min } else { *max },
                        found: arity,
                    })
                }
            }
        }
    }

    /// Reads `gate NAME arity=K tt=BITS` lines into the registry. Blank lines
    /// and `#` comments are skipped. A name may be defined once per text.
    pub fn load(&mut self, text: &str) -> Result<()> {
        let mut defined = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let gate = parse_gate_line(line).map_err(|message| Error::Registry {
                line: i + 1,
                message,
            })?;
            if defined.contains(&gate.name().to_string()) {
                return Err(Error::Registry {
                    line: i + 1,
                    message: format!("gate `{}` defined twice", gate.name()),
                });
            }
            defined.push(gate.name().to_string());
            self.insert(gate);
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut r = Registry::standard();
        r.load(text)?;
        Ok(r)
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(before, _)| before)
}

pub(crate) fn is_gate_line(line: &str) -> bool {
    let line = strip_comment(line).trim_start();
    line.strip_prefix("gate")
        .is_some_and(|rest| rest.starts_with(char::is_whitespace))
}

fn parse_gate_line(line: &str) -> std::result::Result<GateSpec, String> {
    let mut words = line.split_whitespace();
    if words.next() != Some("gate") {
        return Err("expected `gate NAME arity=K tt=BITS`".into());
    }
    let name = words.next().ok_or("missing gate name")?;
    if !is_ident(name) {
        return Err(format!("`{name}` is not a valid gate name"));
    }
    let mut arity = None;
    let mut tt = None;
    for word in words {
        match word.split_once('=') {
            Some(("arity", k)) => {
                arity = Some(k.parse::<usize>().map_err(|_| format!("bad arity `{k}`"))?)
            }
            Some(("tt", bits)) => {
                tt = Some(parse_bits(bits).map_err(|_| format!("bad truth table `{bits}`"))?)
            }
            _ => return Err(format!("unexpected field `{word}`")),
        }
    }
    let arity = arity.ok_or("missing arity=K")?;
    let tt = tt.ok_or("missing tt=BITS")?;
    GateSpec::new(name, arity, tt).map_err(|e| e.to_string())
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}
