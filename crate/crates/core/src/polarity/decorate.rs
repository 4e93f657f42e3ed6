use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use super::{check_positive_polarity, equivalence_classes, CharacteristicSet, PolarityVerdict, Rhs};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Plus,
    Minus,
    /// Either polarity: already solved, or defined by `c ~ c`.
    Both,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Plus => Polarity::Minus,
            Polarity::Minus => Polarity::Plus,
            Polarity::Both => Polarity::Both,
        }
    }

    fn admits(self, wanted: Polarity) -> bool {
        self == Polarity::Both || wanted == Polarity::Both || self == wanted
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Plus => "+",
            Polarity::Minus => "-",
            Polarity::Both => "±",
        })
    }
}

impl Serialize for Polarity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decoration {
    pub assignment: BTreeMap<String, Polarity>,
}

impl Decoration {
    /// Whether every axiom of a constant in `cls` is respected: arrow domains
    /// carry the opposite polarity, codomains and intersection sides the same.
    pub fn agrees_with(&self, a: &CharacteristicSet, cls: &BTreeSet<String>) -> bool {
        let get = |c: &str| self.assignment.get(c).copied();
        cls.iter().all(|c| {
            let (Some(pc), Some(rhs)) = (get(c), a.axioms.get(c)) else {
                return false;
            };
            let wants: Vec<(&str, Polarity)> = match rhs {
                Rhs::SelfC => vec![],
                Rhs::ArrowC(d, e) => vec![(d, pc.flip()), (e, pc)],
                Rhs::InterC(d, e) => vec![(d, pc), (e, pc)],
            };
            wants
                .into_iter()
                .all(|(d, want)| get(d).is_some_and(|p| p.admits(want)))
        })
    }
}

/// A constraint between two constants of a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub left: String,
    pub right: String,
    pub same: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DecorationResult {
    Decorated(Decoration),
    /// Constraints forming a cycle that no polarity assignment satisfies.
    NoDecoration(Vec<Constraint>),
}

/// Assigns polarities to the constants of `cls` given already `solved`
/// constants, propagating from the least unsolved constant set to `+`.
pub fn decorate_class(
    a: &CharacteristicSet,
    cls: &BTreeSet<String>,
    solved: &BTreeSet<String>,
) -> Result<DecorationResult> {
    let mut assignment: BTreeMap<String, Polarity> =
        solved.iter().map(|c| (c.clone(), Polarity::Both)).collect();
    let mut free: BTreeSet<String> = BTreeSet::new();
    for c in cls {
        match a.axioms.get(c) {
            None => return Err(Error::UndefinedConstant(c.clone())),
            Some(Rhs::SelfC) => {
                assignment.insert(c.clone(), Polarity::Both);
            }
            Some(rhs) => {
                for d in rhs.mentions() {
                    if !cls.contains(d) && !solved.contains(d) {
                        return Err(Error::UndefinedConstant(d.to_string()));
                    }
                }
                if !solved.contains(c) {
                    free.insert(c.clone());
                }
            }
        }
    }

    // undirected constraint graph over the free constants
    let mut adj: BTreeMap<&str, Vec<(&str, bool)>> = BTreeMap::new();
    for c in &free {
        let pairs = match &a.axioms[c] {
            Rhs::ArrowC(d, e) => vec![(d, false), (e, true)],
            Rhs::InterC(d, e) => vec![(d, true), (e, true)],
            Rhs::SelfC => vec![],
        };
        for (d, same) in pairs {
            if free.contains(d) {
                adj.entry(c).or_default().push((d, same));
                adj.entry(d).or_default().push((c, same));
            }
        }
    }
    for v in adj.values_mut() {
        v.sort();
    }

    let mut colour: BTreeMap<&str, (Polarity, Option<(&str, bool)>)> = BTreeMap::new();
    for root in &free {
        if colour.contains_key(root.as_str()) {
            continue;
        }
        colour.insert(root, (Polarity::Plus, None));
        let mut queue = VecDeque::from([root.as_str()]);
        while let Some(u) = queue.pop_front() {
            let pu = colour[u].0;
            for &(v, same) in adj.get(u).into_iter().flatten() {
                let want = if same { pu } else { pu.flip() };
                match colour.get(v) {
                    None => {
                        colour.insert(v, (want, Some((u, same))));
                        queue.push_back(v);
                    }
                    Some(&(pv, _)) if pv != want => {
                        return Ok(DecorationResult::NoDecoration(conflict_cycle(
                            &colour, u, v, same,
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    for (c, (p, _)) in colour {
        assignment.insert(c.to_string(), p);
    }
    for c in &free {
        assignment.entry(c.clone()).or_insert(Polarity::Plus);
    }
    Ok(DecorationResult::Decorated(Decoration { assignment }))
}

type Colouring<'a> = BTreeMap<&'a str, (Polarity, Option<(&'a str, bool)>)>;

fn conflict_cycle<'a>(colour: &Colouring<'a>, u: &'a str, v: &'a str, same: bool) -> Vec<Constraint> {
    let chain = |mut x: &'a str| {
        let mut out = vec![x.to_string()];
        while let Some((p, _)) = colour[x].1 {
            out.push(p.to_string());
            x = p;
        }
        out
    };
    let to_u = chain(u);
    let to_v = chain(v);
    let common = to_u.iter().find(|x| to_v.contains(x)).cloned().expect("same component");
    let mut cycle = Vec::new();
    let edge = |x: &str| {
        let (p, s) = colour[x].1.expect("non-root");
        Constraint {
            left: p.to_string(),
            right: x.to_string(),
            same: s,
        }
    };
    for x in to_u.iter().take_while(|x| **x != common) {
        cycle.push(edge(x));
    }
    cycle.reverse();
    cycle.push(Constraint {
        left: u.to_string(),
        right: v.to_string(),
        same,
    });
    for x in to_v.iter().take_while(|x| **x != common) {
        cycle.push(edge(x));
    }
    cycle
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub class: BTreeSet<String>,
    pub decoration: Decoration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StagePlan {
    Stages(Vec<Stage>),
    StagingFailure(String),
}

/// Orders the classes minimal-first (ties by least member) and decorates
/// each one with everything staged before it as solved.
pub fn stage_plan(a: &CharacteristicSet) -> StagePlan {
    if let PolarityVerdict::Fail(w) = check_positive_polarity(a) {
        return StagePlan::StagingFailure(format!(
            "positive polarity fails along {}",
            w.path.join(" -> ")
        ));
    }
    let poset = equivalence_classes(a);
    let mut remaining: BTreeSet<usize> = (0..poset.classes.len()).collect();
    let mut solved = BTreeSet::new();
    let mut stages = Vec::new();
    while !remaining.is_empty() {
        let next = remaining
            .iter()
            .copied()
            .filter(|&j| remaining.iter().all(|&i| i == j || !poset.le(i, j)))
            .min_by(|&x, &y| poset.classes[x].first().cmp(&poset.classes[y].first()))
            .expect("a finite partial order has minimal elements");
        remaining.remove(&next);
        let class = poset.classes[next].clone();
        match decorate_class(a, &class, &solved) {
            Ok(DecorationResult::Decorated(decoration)) => {
                solved.extend(class.iter().cloned());
                stages.push(Stage { class, decoration });
            }
            Ok(DecorationResult::NoDecoration(cycle)) => {
                return StagePlan::StagingFailure(format!(
                    "class {:?} has conflicting constraints ({} in cycle)",
                    class,
                    cycle.len()
                ));
            }
            Err(e) => return StagePlan::StagingFailure(e.to_string()),
        }
    }
    StagePlan::Stages(stages)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_identity_constant() {
        let a = CharacteristicSet::from_axioms([("c".to_string(), Rhs::SelfC)]);
        let StagePlan::Stages(stages) = stage_plan(&a) else {
            panic!("staging failed");
        };
        assert_eq!(stages.len(), 1);
        assert_eq!(stages[0].decoration.assignment["c"], Polarity::Both);
    }

    #[test]
    fn conflict_cycle_is_inconsistent() {
        let a = CharacteristicSet::from_axioms([
            ("a".to_string(), Rhs::ArrowC("b".into(), "a".into())),
            ("b".to_string(), Rhs::InterC("a".into(), "b".into())),
        ]);
        let cls: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
        let DecorationResult::NoDecoration(cycle) = decorate_class(&a, &cls, &BTreeSet::new()).unwrap()
        else {
            panic!("expected a conflict");
        };
        let flips = cycle.iter().filter(|c| !c.same).count();
        assert_eq!(flips % 2, 1);
        for w in cycle.windows(2) {
            let ends = [&w[1].left, &w[1].right];
            assert!(ends.contains(&&w[0].left) || ends.contains(&&w[0].right));
        }
    }
}
