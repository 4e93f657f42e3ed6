use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::types::Ty;

/// Right-hand side of a restricted defining axiom `c ~ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rhs {
    /// `c ~ c`.
    SelfC,
    /// `c ~ c' -> c''`.
    ArrowC(String, String),
    /// `c ~ c' & c''`.
    InterC(String, String),
}

impl Rhs {
    pub fn mentions(&self) -> Vec<&str> {
        match self {
            Rhs::SelfC => Vec::new(),
            Rhs::ArrowC(a, b) | Rhs::InterC(a, b) => vec![a, b],
        }
    }
}

/// Defining axioms of a natural theory in restricted form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CharacteristicSet {
    pub axioms: BTreeMap<String, Rhs>,
    /// Constants removed as renamings, with their representative.
    pub renamings: BTreeMap<String, String>,
    /// Auxiliary constants and the subterm each one names.
    pub fresh: BTreeMap<String, Ty>,
}

impl CharacteristicSet {
    pub fn from_axioms(axioms: impl IntoIterator<Item = (String, Rhs)>) -> Self {
        CharacteristicSet {
            axioms: axioms.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn defined(&self) -> BTreeSet<String> {
        self.axioms.keys().cloned().collect()
    }

    /// Constants defined or mentioned on a right-hand side.
    pub fn mentioned(&self) -> BTreeSet<String> {
        let mut out = self.defined();
        for rhs in self.axioms.values() {
            out.extend(rhs.mentions().into_iter().map(str::to_string));
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.mentioned().len() == self.axioms.len()
    }

    /// Adds `c ~ c` for every constant mentioned but not defined.
    pub fn completion(&self) -> CharacteristicSet {
        let mut out = self.clone();
        for c in self.mentioned() {
            out.axioms.entry(c).or_insert(Rhs::SelfC);
        }
        out
    }

    /// The type a constant abbreviates once auxiliary constants are unfolded.
    pub fn expand(&self, c: &str) -> Ty {
        match self.axioms.get(c) {
            Some(Rhs::ArrowC(a, b)) => Ty::arrow(self.leaf(a), self.leaf(b)),
            Some(Rhs::InterC(a, b)) => Ty::inter(self.leaf(a), self.leaf(b)),
            _ => self.atom(c),
        }
    }

    fn leaf(&self, c: &str) -> Ty {
        if self.fresh.contains_key(c) {
            self.expand(c)
        } else {
            self.atom(c)
        }
    }

    fn atom(&self, c: &str) -> Ty {
        if c == crate::types::TOP_NAME {
            Ty::Top
        } else {
            Ty::c(c)
        }
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::SelfC => write!(f, "self"),
            Rhs::ArrowC(a, b) => write!(f, "{a} -> {b}"),
            Rhs::InterC(a, b) => write!(f, "{a} & {b}"),
        }
    }
}

impl Serialize for Rhs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
