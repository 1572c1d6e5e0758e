//! Explicit decision trees.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitString, VarSet};
use crate::formula::BooleanFn;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("variable {var} queried twice on a root-to-leaf path")]
    RepeatedQuery { var: usize },
    #[error("unexpected character {found:?} at offset {at}")]
    Parse { found: char, at: usize },
    #[error("unexpected end of input")]
    ParseEof,
}

/// A binary decision tree: inner nodes query a variable, leaves output a bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionTree {
    Leaf(bool),
    Query { var: usize, zero: Box<DecisionTree>, one: Box<DecisionTree> },
}

impl DecisionTree {
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Query { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    /// Checks that no variable repeats along any root-to-leaf path.
    pub fn validate(&self, n: usize) -> Result<(), TreeError> {
        fn walk(t: &DecisionTree, seen: &mut VarSet) -> Result<(), TreeError> {
            if let DecisionTree::Query { var, zero, one } = t {
                if seen.contains(*var) {
                    return Err(TreeError::RepeatedQuery { var: *var });
                }
                seen.insert(*var);
                walk(zero, seen)?;
                walk(one, seen)?;
                seen.remove(*var);
            }
            Ok(())
        }
        walk(self, &mut VarSet::empty(n))
    }

    pub fn eval_bits(&self, x: &BitString) -> bool {
        match self {
            DecisionTree::Leaf(b) => *b,
            DecisionTree::Query { var, zero, one } => {
                if x.get(*var) {
                    one.eval_bits(x)
                } else {
                    zero.eval_bits(x)
                }
            }
        }
    }

    /// Nested text form: leaves are `0`/`1`, inner nodes `(x<var> <zero> <one>)`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_text(&mut s);
        s
    }

    fn write_text(&self, out: &mut String) {
        match self {
            DecisionTree::Leaf(b) => out.push(if *b { '1' } else { '0' }),
            DecisionTree::Query { var, zero, one } => {
                out.push_str(&format!("(x{var} "));
                zero.write_text(out);
                out.push(' ');
                one.write_text(out);
                out.push(')');
            }
        }
    }

    pub fn from_text(s: &str) -> Result<Self, TreeError> {
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0usize;
        let tree = Self::parse_at(&chars, &mut pos)?;
        skip_ws(&chars, &mut pos);
        if pos != chars.len() {
            return Err(TreeError::Parse { found: chars[pos], at: pos });
        }
        Ok(tree)
    }

    fn parse_at(chars: &[char], pos: &mut usize) -> Result<Self, TreeError> {
        skip_ws(chars, pos);
        match chars.get(*pos) {
            Some('0') => {
                *pos += 1;
                Ok(DecisionTree::Leaf(false))
            }
            Some('1') => {
                *pos += 1;
                Ok(DecisionTree::Leaf(true))
            }
            Some('(') => {
                *pos += 1;
                skip_ws(chars, pos);
                if chars.get(*pos) != Some(&'x') {
                    return Err(match chars.get(*pos) {
                        Some(&c) => TreeError::Parse { found: c, at: *pos },
                        None => TreeError::ParseEof,
                    });
                }
                *pos += 1;
                let start = *pos;
                while chars.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                    *pos += 1;
                }
                if start == *pos {
                    return Err(TreeError::ParseEof);
                }
                let var: usize = chars[start..*pos].iter().collect::<String>().parse().unwrap();
                let zero = Self::parse_at(chars, pos)?;
                let one = Self::parse_at(chars, pos)?;
                skip_ws(chars, pos);
                if chars.get(*pos) != Some(&')') {
                    return Err(match chars.get(*pos) {
                        Some(&c) => TreeError::Parse { found: c, at: *pos },
                        None => TreeError::ParseEof,
                    });
                }
                *pos += 1;
                Ok(DecisionTree::Query { var, zero: Box::new(zero), one: Box::new(one) })
            }
            Some(&c) => Err(TreeError::Parse { found: c, at: *pos }),
            None => Err(TreeError::ParseEof),
        }
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
        *pos += 1;
    }
}

impl fmt::Display for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Decision trees are Boolean functions of any ambient dimension that covers
/// their queried variables; `dimension` reports the minimal one.
impl BooleanFn for DecisionTree {
    fn dimension(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Query { var, zero, one } => {
                (var + 1).max(zero.dimension()).max(one.dimension())
            }
        }
    }

    fn eval(&self, x: &BitString) -> bool {
        self.eval_bits(x)
    }
}
