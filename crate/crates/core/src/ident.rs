use std::fmt;

use serde::{Deserialize, Serialize};

/// A region or automaton-state identifier exactly as it appeared in the
/// input document. Integers and strings are both accepted and written back
/// unchanged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ident {
    Int(i64),
    Str(String),
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ident::Int(i) => write!(f, "{i}"),
            Ident::Str(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Ident {
    fn from(v: i64) -> Self {
        Ident::Int(v)
    }
}

impl From<i32> for Ident {
    fn from(v: i32) -> Self {
        Ident::Int(v.into())
    }
}

impl From<usize> for Ident {
    fn from(v: usize) -> Self {
        Ident::Int(v as i64)
    }
}

impl From<&str> for Ident {
    fn from(v: &str) -> Self {
        Ident::Str(v.to_owned())
    }
}

impl From<String> for Ident {
    fn from(v: String) -> Self {
        Ident::Str(v)
    }
}
