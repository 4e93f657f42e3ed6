use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::types::{canonicalize, TheorySpec, Ty};

pub const DEFAULT_UNIVERSE_CAP: usize = 20_000;
pub const DEFAULT_INTER_WIDTH: usize = 2;

/// Finite set of canonical types that subtyping searches range over.
#[derive(Debug, Clone)]
pub struct Universe {
    members: Vec<Ty>,
    index: HashMap<Ty, u32>,
    pub inter_width: usize,
}

impl Universe {
    pub fn members(&self) -> &[Ty] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: u32) -> &Ty {
        &self.members[i as usize]
    }

    /// Index of the canonical form of `t`.
    pub fn index_of(&self, t: &Ty) -> Option<u32> {
        self.index.get(&canonicalize(t)).copied()
    }

    /// Index of `t`, which must already be canonical.
    pub fn index_of_canonical(&self, t: &Ty) -> Option<u32> {
        self.index.get(t).copied()
    }

    pub fn contains(&self, t: &Ty) -> bool {
        self.index_of(t).is_some()
    }

    fn from_set(set: BTreeSet<Ty>, inter_width: usize) -> Universe {
        let members: Vec<Ty> = set.into_iter().collect();
        let index = members
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Universe {
            members,
            index,
            inter_width,
        }
    }
}

pub fn build_universe(t: &TheorySpec, seeds: &[Ty], inter_width: usize) -> Result<Universe> {
    build_universe_capped(t, seeds, inter_width, DEFAULT_UNIVERSE_CAP)
}

/// Subterm closure of `U`, the seeds and every axiom side, extended with the
/// canonical intersections of up to `inter_width` distinct base members and
/// closed under subterms again.
pub fn build_universe_capped(
    t: &TheorySpec,
    seeds: &[Ty],
    inter_width: usize,
    cap: usize,
) -> Result<Universe> {
    if inter_width == 0 {
        return Err(Error::InvalidInput("intersection width must be at least 1".into()));
    }
    let mut base = BTreeSet::new();
    Ty::Top.subterms(&mut base);
    for s in seeds.iter().chain(t.axiom_sides().iter()) {
        canonicalize(s).subterms(&mut base);
    }
    let too_large = |size: usize| Error::UniverseTooLarge { size, cap };
    if base.len() > cap {
        return Err(too_large(base.len()));
    }
    let parts: Vec<&Ty> = base.iter().filter(|m| **m != Ty::Top).collect();
    let mut all = base.clone();
    let mut chosen: Vec<usize> = Vec::new();
    extend_combinations(&parts, inter_width, 0, &mut chosen, &mut all, cap)
        .map_err(|()| too_large(all.len()))?;
    let mut closed = BTreeSet::new();
    for m in &all {
        m.subterms(&mut closed);
        if closed.len() > cap {
            return Err(too_large(closed.len()));
        }
    }
    Ok(Universe::from_set(closed, inter_width))
}

fn extend_combinations(
    parts: &[&Ty],
    width: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut BTreeSet<Ty>,
    cap: usize,
) -> std::result::Result<(), ()> {
    if chosen.len() >= 2 {
        out.insert(Ty::meet(chosen.iter().map(|&i| parts[i].clone())));
        if out.len() > cap {
            return Err(());
        }
    }
    if chosen.len() == width {
        return Ok(());
    }
    for i in start..parts.len() {
        chosen.push(i);
        extend_combinations(parts, width, i + 1, chosen, out, cap)?;
        chosen.pop();
    }
    Ok(())
}
