use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::lex::{Cursor, Tok};
use crate::types::{canonicalize, parse_ty_prefix, TheorySpec, Ty};

/// Assignment of a target type to every constant of the source theory.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantMap {
    #[serde(serialize_with = "theory_name")]
    pub source: TheorySpec,
    #[serde(serialize_with = "theory_name")]
    pub target: TheorySpec,
    pub map: BTreeMap<String, Ty>,
}

fn theory_name<S: serde::Serializer>(t: &TheorySpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.name)
}

impl ConstantMap {
    /// Checks totality on the source constants and well-formedness of the
    /// images over the target.
    pub fn new(source: TheorySpec, target: TheorySpec, map: BTreeMap<String, Ty>) -> Result<ConstantMap> {
        let k = ConstantMap { source, target, map };
        if let Some(problem) = k.totality_problem() {
            return Err(Error::InvalidInput(problem));
        }
        Ok(k)
    }

    /// Maps each constant to the same-named target constant.
    pub fn identity(source: TheorySpec, target: TheorySpec) -> Result<ConstantMap> {
        let map = source.constants.iter().map(|c| (c.clone(), Ty::c(c.clone()))).collect();
        ConstantMap::new(source, target, map)
    }

    pub(crate) fn totality_problem(&self) -> Option<String> {
        if let Some(c) = self.source.constants.iter().find(|c| !self.map.contains_key(*c)) {
            return Some(format!("constant `{c}` has no image"));
        }
        if let Some(c) = self.map.keys().find(|c| !self.source.constants.contains(*c)) {
            return Some(format!("`{c}` is not a constant of {}", self.source.name));
        }
        self.map
            .values()
            .find_map(|ty| self.target.check_ty(ty).err())
            .map(|e| e.to_string())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ConstantMap) -> Result<ConstantMap> {
        let map = self
            .map
            .iter()
            .map(|(c, ty)| (c.clone(), extend_structurally(next, ty)))
            .collect();
        ConstantMap::new(self.source.clone(), next.target.clone(), map)
    }
}

/// The homomorphic extension: `U` to `U`, constants through the map.
/// Constants without an image are left untouched.
pub fn extend_structurally(k: &ConstantMap, a: &Ty) -> Ty {
    a.map_constants(&mut |c: &str| k.map.get(c).cloned().unwrap_or_else(|| Ty::c(c)))
}

/// Reads `c -> TY` lines; `#` starts a comment.
pub fn parse_map(src: &str) -> std::result::Result<BTreeMap<String, Ty>, ParseError> {
    let mut out = BTreeMap::new();
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        if !body.trim().is_empty() {
            let shift = |e: ParseError| ParseError::new(e.pos + offset, e.message);
            let mut cur = Cursor::new(body).map_err(shift)?;
            let at = cur.pos();
            let c = cur.ident().map_err(shift)?;
            cur.expect(&Tok::Arrow).map_err(shift)?;
            let ty = parse_ty_prefix(&mut cur).map_err(shift)?;
            cur.finish().map_err(shift)?;
            if out.insert(c.clone(), ty).is_some() {
                return Err(ParseError::new(at + offset, format!("`{c}` mapped twice")));
            }
        }
        offset += line.len();
    }
    Ok(out)
}

/// Renders a map in the format read by [`parse_map`].
pub fn render_map(map: &BTreeMap<String, Ty>) -> String {
    map.iter().map(|(c, ty)| format!("{c} -> {ty}\n")).collect()
}

/// Whether `extend_structurally` agrees on `a` and its canonical form after
/// canonicalising the image.
pub fn commutes_with_canonical(k: &ConstantMap, a: &Ty) -> bool {
    canonicalize(&extend_structurally(k, a)) == canonicalize(&extend_structurally(k, &canonicalize(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{parse_theory, parse_ty};

    #[test]
    fn structural_extension() {
        let src = parse_theory("constants c0 c1 c2").unwrap();
        let tgt = parse_theory("constants c3 c4").unwrap();
        let map = parse_map("c0 -> c4\nc1 -> c4 # same image\nc2 -> c3\n").unwrap();
        let k = ConstantMap::new(src, tgt, map).unwrap();
        let a = parse_ty("c0 & (c1 -> c2)").unwrap();
        assert_eq!(extend_structurally(&k, &a), parse_ty("c4 & (c4 -> c3)").unwrap());
        assert_eq!(extend_structurally(&k, &Ty::Top), Ty::Top);
    }

    #[test]
    fn totality_is_enforced() {
        let src = parse_theory("constants a b").unwrap();
        let tgt = parse_theory("constants a").unwrap();
        assert!(ConstantMap::identity(src.clone(), tgt.clone()).is_err());
        let map = BTreeMap::from([("a".to_string(), Ty::c("a")), ("b".to_string(), Ty::c("zz"))]);
        assert!(ConstantMap::new(src, tgt, map).is_err());
    }

    #[test]
    fn map_file_errors() {
        assert!(parse_map("a b\n").is_err());
        let e = parse_map("a -> b\nc -> \n").unwrap_err();
        assert!(e.pos >= 7);
        assert!(parse_map("a -> b\na -> c\n").is_err());
        let m = BTreeMap::from([("a".to_string(), parse_ty("b -> c").unwrap())]);
        assert_eq!(parse_map(&render_map(&m)).unwrap(), m);
    }
}
