use std::collections::BTreeSet;

use itt_core::polarity::{CharacteristicSet, Rhs};
use itt_core::subtype::Universe;
use itt_core::types::{RuleFlag, TheorySpec, Ty};

/// Closes the subtyping rules over the members of `u` by naive repeated
/// passes. Returns the related index pairs.
pub fn brute_force_relation(t: &TheorySpec, u: &Universe) -> Vec<Vec<bool>> {
    let m = u.members();
    let n = m.len();
    let idx = |x: &Ty| u.index_of(x).map(|i| i as usize);
    let top = idx(&Ty::Top).expect("U is a member");
    let arrow = |i: usize| match &m[i] {
        Ty::Arrow(d, c) => Some((idx(d).unwrap(), idx(c).unwrap())),
        _ => None,
    };
    let meet: Vec<Vec<Option<usize>>> = (0..n)
        .map(|j| (0..n).map(|k| idx(&Ty::inter(m[j].clone(), m[k].clone()))).collect())
        .collect();
    let axioms: Vec<(usize, usize)> = t
        .generating_inequalities()
        .iter()
        .filter_map(|(l, r)| Some((idx(l)?, idx(r)?)))
        .collect();

    let mut rel = vec![vec![false; n]; n];
    loop {
        let mut next = rel.clone();
        let mut set = |i: usize, j: usize| next[i][j] = true;
        for i in 0..n {
            set(i, i);
            set(i, top);
            if let Ty::Inter(l, r) = &m[i] {
                set(i, idx(l).unwrap());
                set(i, idx(r).unwrap());
                if t.has(RuleFlag::ArrowCapAxiom) {
                    if let (Ty::Arrow(d1, c1), Ty::Arrow(d2, c2)) = (&**l, &**r) {
                        if d1 == d2 {
                            let joined = Ty::arrow((**d1).clone(), Ty::inter((**c1).clone(), (**c2).clone()));
                            if let Some(j) = idx(&joined) {
                                set(i, j);
                                set(j, i);
                            }
                        }
                    }
                }
            }
            if t.has(RuleFlag::ArrowTopAxiom) {
                if let Ty::Arrow(_, c) = &m[i] {
                    if **c == Ty::Top {
                        set(top, i);
                    }
                }
            }
            if t.has(RuleFlag::TopLeRule) && rel[top][i] {
                if let Some((_, c)) = arrow(i) {
                    set(top, c);
                }
            }
        }
        for &(i, j) in &axioms {
            set(i, j);
        }
        for i in 0..n {
            for j in 0..n {
                if let (Some((di, ci)), Some((dj, cj))) = (arrow(i), arrow(j)) {
                    let dom = rel[dj][di];
                    let cod = rel[ci][cj];
                    if dom && cod && (t.has(RuleFlag::ArrowRule) || (rel[di][dj] && rel[cj][ci])) {
                        set(i, j);
                    }
                }
                if (0..n).any(|k| rel[i][k] && rel[k][j]) {
                    set(i, j);
                }
                if rel[i][j] {
                    for k in 0..n {
                        if rel[i][k] {
                            if let Some(x) = meet[j][k] {
                                set(i, x);
                            }
                        }
                    }
                }
            }
        }
        if next == rel {
            return rel;
        }
        rel = next;
    }
}

/// Whether some constant occurs negatively in its own unfolding, found by
/// enumerating occurrence derivations up to `depth` unfoldings.
pub fn pos_neg_fails(a: &CharacteristicSet, depth: usize) -> bool {
    a.axioms.keys().any(|c| {
        let mut frontier: BTreeSet<(String, bool)> = BTreeSet::from([(c.clone(), true)]);
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for (d, positive) in &frontier {
                match a.axioms.get(d) {
                    Some(Rhs::ArrowC(x, y)) => {
                        next.insert((x.clone(), !positive));
                        next.insert((y.clone(), *positive));
                    }
                    Some(Rhs::InterC(x, y)) => {
                        next.insert((x.clone(), *positive));
                        next.insert((y.clone(), *positive));
                    }
                    Some(Rhs::SelfC) | None => {}
                }
            }
            if next.contains(&(c.clone(), false)) {
                return true;
            }
            frontier = next;
        }
        false
    })
}
