use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use super::{CharacteristicSet, Rhs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub sign: Sign,
}

/// Occurrences of constants in defining axioms: `-` for arrow domains,
/// `+` for arrow codomains, intersection sides and `c ~ c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<Edge>,
}

impl SignedGraph {
    /// Outgoing edges of `c`, sorted by target then sign.
    pub fn successors(&self, c: &str) -> Vec<(&str, Sign)> {
        self.edges
            .iter()
            .filter(|e| e.from == c)
            .map(|e| (e.to.as_str(), e.sign))
            .collect()
    }

    pub fn has_edge(&self, from: &str, to: &str, sign: Sign) -> bool {
        self.edges.contains(&Edge {
            from: from.to_string(),
            to: to.to_string(),
            sign,
        })
    }
}

pub fn signed_graph(a: &CharacteristicSet) -> SignedGraph {
    let mut edges = BTreeSet::new();
    let mut add = |from: &str, to: &str, sign| {
        edges.insert(Edge {
            from: from.to_string(),
            to: to.to_string(),
            sign,
        });
    };
    for (c, rhs) in &a.axioms {
        match rhs {
            Rhs::SelfC => add(c, c, Sign::Pos),
            Rhs::ArrowC(d, e) => {
                add(c, d, Sign::Neg);
                add(c, e, Sign::Pos);
            }
            Rhs::InterC(d, e) => {
                add(c, d, Sign::Pos);
                add(c, e, Sign::Pos);
            }
        }
    }
    SignedGraph {
        nodes: a.mentioned(),
        edges,
    }
}

/// A closed walk `path[0] -> ... -> path[n] = path[0]`; `signs[i]` labels the
/// edge out of `path[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub path: Vec<String>,
    pub signs: Vec<Sign>,
}

impl Witness {
    pub fn product(&self) -> Sign {
        self.signs.iter().fold(Sign::Pos, |acc, s| acc.times(*s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PolarityVerdict {
    Pass,
    Fail(Witness),
}

/// Fails when some constant reaches itself along a walk whose signs
/// multiply to `-`. The witness starts at the least such constant and is a
/// shortest such walk, lexicographically least among those.
pub fn check_positive_polarity(a: &CharacteristicSet) -> PolarityVerdict {
    let g = signed_graph(a);
    let adj: BTreeMap<&str, Vec<(&str, Sign)>> = g
        .nodes
        .iter()
        .map(|n| (n.as_str(), g.successors(n)))
        .collect();
    for c in &g.nodes {
        if let Some(w) = negative_walk(c, &adj) {
            return PolarityVerdict::Fail(w);
        }
    }
    PolarityVerdict::Pass
}

fn negative_walk(start: &str, adj: &BTreeMap<&str, Vec<(&str, Sign)>>) -> Option<Witness> {
    type State<'a> = (&'a str, Sign);
    let mut parent: BTreeMap<State, (State, Sign)> = BTreeMap::new();
    let origin: State = (start, Sign::Pos);
    let mut queue = VecDeque::from([origin]);
    let mut seen = BTreeSet::from([origin]);
    while let Some(state @ (node, acc)) = queue.pop_front() {
        for &(next, sign) in adj.get(node).into_iter().flatten() {
            let succ: State = (next, acc.times(sign));
            if succ == (start, Sign::Neg) {
                let mut path = vec![start.to_string()];
                let mut signs = vec![sign];
                let mut cur = state;
                while cur != origin {
                    let (prev, s) = parent[&cur];
                    path.push(cur.0.to_string());
                    signs.push(s);
                    cur = prev;
                }
                path.push(start.to_string());
                path.reverse();
                signs.reverse();
                return Some(Witness { path, signs });
            }
            if seen.insert(succ) {
                parent.insert(succ, (state, sign));
                queue.push_back(succ);
            }
        }
    }
    None
}
