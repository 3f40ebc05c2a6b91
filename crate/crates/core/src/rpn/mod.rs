//! Reverse-Polish stack machine over elementary stars.
//!
//! Symbols push a star, combine the top two entries by intersection or
//! union, duplicate the top entry, or rotate the stack so the top entry
//! moves to the bottom. Only intersections and unions count as operations.
//!
//! ASCII syntax: whitespace-separated tokens, a decimal integer pushes that
//! star, `&` is intersection, `|` union, `d` duplicate and `r` rotate.

mod enumerate;
mod oracle;
mod walker;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::edgespace::{EdgeSet, GraphUniverse};

pub use enumerate::{collect_programs, enumerate_programs, EdgeMask, EnumOptions, Skeleton, MAX_SEARCH_N};
pub use oracle::{oracle_star_bfs, ORACLE_MAX_N, ORACLE_MAX_OPS};
pub use walker::{find_witness, walk_star_table, FindOutcome, StarEntry, StarTable, WalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RpnSymbol {
    Push(u32),
    And,
    Or,
    Dup,
    Rot,
}

impl RpnSymbol {
    pub fn is_logic(self) -> bool {
        matches!(self, RpnSymbol::And | RpnSymbol::Or)
    }

    pub fn is_increase(self) -> bool {
        matches!(self, RpnSymbol::Push(_) | RpnSymbol::Dup)
    }

    pub fn glyph(self) -> String {
        match self {
            RpnSymbol::Push(i) => i.to_string(),
            RpnSymbol::And => "∩".into(),
            RpnSymbol::Or => "∪".into(),
            RpnSymbol::Dup => "⇓".into(),
            RpnSymbol::Rot => "↕".into(),
        }
    }
}

impl fmt::Display for RpnSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RpnSymbol::Push(i) => write!(f, "{i}"),
            RpnSymbol::And => f.write_str("&"),
            RpnSymbol::Or => f.write_str("|"),
            RpnSymbol::Dup => f.write_str("d"),
            RpnSymbol::Rot => f.write_str("r"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RpnError {
    #[error("unknown token `{token}` at position {position}")]
    Lex { position: usize, token: String },
    #[error("stack underflow at symbol {position}")]
    StackUnderflow { position: usize },
    #[error("program ends with stack depth {depth}, expected 1")]
    Unfinished { depth: usize },
    #[error("star {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("stack search supports 1 <= n <= {max}, got {n}")]
    UnsupportedUniverse { n: usize, max: usize },
    #[error("oracle bounds exceeded: {0}")]
    BoundsExceeded(String),
}

/// First invariant violation found by [`RpnProgram::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    /// 1-based symbol position.
    Underflow {
        position: usize,
    },
    RotNotAfterOp {
        position: usize,
    },
    FinalDepth {
        depth: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => f.write_str("empty program"),
            Violation::Underflow { position } => write!(f, "underflow at symbol {position}"),
            Violation::RotNotAfterOp { position } => {
                write!(f, "rotation at symbol {position} does not follow &, | or d")
            }
            Violation::FinalDepth { depth } => write!(f, "ends with stack depth {depth}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgramStats {
    /// Number of `&` and `|` symbols.
    pub ops: usize,
    /// Number of push and duplicate symbols.
    pub increases: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RpnProgram {
    symbols: Vec<RpnSymbol>,
}

impl RpnProgram {
    pub fn new(symbols: Vec<RpnSymbol>) -> Self {
        RpnProgram { symbols }
    }

    /// The same program with every push `i` replaced by `map[i]`; its value
    /// is the image of the original value under that vertex map.
    pub fn relabeled(&self, map: &[usize]) -> RpnProgram {
        let symbols = self
            .symbols
            .iter()
            .map(|&s| match s {
                RpnSymbol::Push(i) => RpnSymbol::Push(map[i as usize] as u32),
                other => other,
            })
            .collect();
        RpnProgram { symbols }
    }

    pub fn symbols(&self) -> &[RpnSymbol] {
        &self.symbols
    }

    pub fn ops(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_logic()).count()
    }

    pub fn increases(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_increase()).count()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn validate(&self) -> Result<ProgramStats, Violation> {
        if self.symbols.is_empty() {
            return Err(Violation::Empty);
        }
        let mut depth = 0usize;
        let mut prev: Option<RpnSymbol> = None;
        for (k, &sym) in self.symbols.iter().enumerate() {
            let position = k + 1;
            match sym {
                RpnSymbol::Push(_) => depth += 1,
                RpnSymbol::Dup => {
                    if depth < 1 {
                        return Err(Violation::Underflow { position });
                    }
                    depth += 1;
                }
                RpnSymbol::And | RpnSymbol::Or => {
                    if depth < 2 {
                        return Err(Violation::Underflow { position });
                    }
                    depth -= 1;
                }
                RpnSymbol::Rot => {
                    if !matches!(prev, Some(RpnSymbol::And | RpnSymbol::Or | RpnSymbol::Dup)) {
                        return Err(Violation::RotNotAfterOp { position });
                    }
                    if depth < 2 {
                        return Err(Violation::Underflow { position });
                    }
                }
            }
            prev = Some(sym);
        }
        if depth != 1 {
            return Err(Violation::FinalDepth { depth });
        }
        Ok(ProgramStats {
            ops: self.ops(),
            increases: self.increases(),
            length: self.symbols.len(),
        })
    }

    /// Evaluates over edge sets. Rotation on a stack of depth <= 1 is a no-op.
    pub fn eval(&self, universe: &Arc<GraphUniverse>) -> Result<EdgeSet, RpnError> {
        self.eval_counted(universe).map(|(g, _)| g)
    }

    /// As [`RpnProgram::eval`], also returning the number of union and
    /// intersection operations performed.
    pub fn eval_counted(&self, universe: &Arc<GraphUniverse>) -> Result<(EdgeSet, usize), RpnError> {
        let mut stack: Vec<EdgeSet> = Vec::new();
        let mut performed = 0;
        for (k, &sym) in self.symbols.iter().enumerate() {
            let position = k + 1;
            match sym {
                RpnSymbol::Push(i) => {
                    let s = EdgeSet::star(universe, i as usize).map_err(|_| RpnError::VertexOutOfRange {
                        vertex: i,
                        n: universe.n(),
                    })?;
                    stack.push(s);
                }
                RpnSymbol::Dup => {
                    let top = stack.last().ok_or(RpnError::StackUnderflow { position })?.clone();
                    stack.push(top);
                }
                RpnSymbol::And | RpnSymbol::Or => {
                    if stack.len() < 2 {
                        return Err(RpnError::StackUnderflow { position });
                    }
                    let b = stack.pop().unwrap();
                    let a = stack.last_mut().unwrap();
                    if sym == RpnSymbol::And {
                        a.intersect_with(&b);
                    } else {
                        a.union_with(&b);
                    }
                    performed += 1;
                }
                RpnSymbol::Rot => {
                    if stack.len() > 1 {
                        let top = stack.pop().unwrap();
                        stack.insert(0, top);
                    }
                }
            }
        }
        if stack.len() != 1 {
            return Err(RpnError::Unfinished { depth: stack.len() });
        }
        Ok((stack.pop().unwrap(), performed))
    }

    /// Rendering with set-operation glyphs. Tokens are concatenated when
    /// every pushed label is a single digit, as in `01∪⇓23∪`.
    pub fn to_glyphs(&self) -> String {
        let compact = self.symbols.iter().all(|s| !matches!(s, RpnSymbol::Push(i) if *i > 9));
        let parts: Vec<String> = self.symbols.iter().map(|s| s.glyph()).collect();
        parts.join(if compact { "" } else { " " })
    }

    /// Parses the compact glyph form produced by [`RpnProgram::to_glyphs`]
    /// for single-digit labels; whitespace is ignored.
    pub fn parse_glyphs(text: &str) -> Result<RpnProgram, RpnError> {
        let mut symbols = Vec::new();
        for (position, ch) in text.chars().filter(|c| !c.is_whitespace()).enumerate() {
            let sym = match ch {
                '∩' => RpnSymbol::And,
                '∪' => RpnSymbol::Or,
                '⇓' => RpnSymbol::Dup,
                '↕' => RpnSymbol::Rot,
                c if c.is_ascii_digit() => RpnSymbol::Push(c.to_digit(10).unwrap()),
                c => {
                    return Err(RpnError::Lex {
                        position: position + 1,
                        token: c.to_string(),
                    })
                }
            };
            symbols.push(sym);
        }
        Ok(RpnProgram { symbols })
    }
}

impl FromStr for RpnProgram {
    type Err = RpnError;

    fn from_str(text: &str) -> Result<Self, RpnError> {
        let mut symbols = Vec::new();
        for (k, tok) in text.split_whitespace().enumerate() {
            let sym = match tok {
                "&" | "∩" => RpnSymbol::And,
                "|" | "∪" => RpnSymbol::Or,
                "d" | "⇓" => RpnSymbol::Dup,
                "r" | "↕" => RpnSymbol::Rot,
                t => match t.parse::<u32>() {
                    Ok(i) if t.bytes().all(|b| b.is_ascii_digit()) => RpnSymbol::Push(i),
                    _ => {
                        return Err(RpnError::Lex {
                            position: k + 1,
                            token: t.to_string(),
                        })
                    }
                },
            };
            symbols.push(sym);
        }
        Ok(RpnProgram { symbols })
    }
}

impl fmt::Display for RpnProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.symbols.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}
