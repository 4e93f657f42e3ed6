use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::CharacteristicSet;
use crate::error::{Error, Result};

/// Constants reachable from `c` through right-hand sides, `c` included.
pub fn closure_of(c: &str, a: &CharacteristicSet) -> Result<BTreeSet<String>> {
    if !a.axioms.contains_key(c) {
        return Err(Error::UndefinedConstant(c.to_string()));
    }
    let mut seen = BTreeSet::from([c.to_string()]);
    let mut stack = vec![c.to_string()];
    while let Some(d) = stack.pop() {
        if let Some(rhs) = a.axioms.get(&d) {
            for e in rhs.mentions() {
                if seen.insert(e.to_string()) {
                    stack.push(e.to_string());
                }
            }
        }
    }
    Ok(seen)
}

/// Equivalence classes of constants with equal closures, ordered by
/// dependency: class `i` is below class `j` when a member of `i` lies in the
/// closure of `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassPoset {
    /// Sorted by least member.
    pub classes: Vec<BTreeSet<String>>,
    /// Pairs `(i, j)` with class `i` below class `j`, reflexive pairs included.
    pub order: BTreeSet<(usize, usize)>,
}

impl ClassPoset {
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.order.contains(&(i, j))
    }

    pub fn class_of(&self, c: &str) -> Option<usize> {
        self.classes.iter().position(|cls| cls.contains(c))
    }
}

pub fn equivalence_classes(a: &CharacteristicSet) -> ClassPoset {
    let closures: BTreeMap<&String, BTreeSet<String>> = a
        .axioms
        .keys()
        .map(|c| (c, closure_of(c, a).expect("key is defined")))
        .collect();
    let mut groups: BTreeMap<&BTreeSet<String>, BTreeSet<String>> = BTreeMap::new();
    for (c, cl) in &closures {
        groups.entry(cl).or_default().insert((*c).clone());
    }
    let mut classes: Vec<BTreeSet<String>> = groups.into_values().collect();
    classes.sort_by(|x, y| x.first().cmp(&y.first()));

    let mut order = BTreeSet::new();
    for (i, ci) in classes.iter().enumerate() {
        for (j, cj) in classes.iter().enumerate() {
            let rep = cj.first().expect("classes are nonempty");
            if closures[rep].iter().any(|d| ci.contains(d)) {
                order.insert((i, j));
            }
        }
    }
    ClassPoset { classes, order }
}
