//! JSON forms of subgroups.
//!
//! ```json
//! {"context": {"kind": "free", "rank": 2}, "generators": ["aa", "b", "abA"]}
//! {"context": {"kind": "lattice", "dim": 2}, "generators": [[2, 0], [0, 3]]}
//! {"hom": {"target": "Z", "images": [1, 0]}, "accepted": "zero"}
//! ```

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hom::HomSubgroup;
use crate::stallings::StallingsGraph;
use crate::subgroup::{CosetKey, FreeGroup, FreeSubgroup, Subgroup};
use crate::words::{GroupContext, Word};
use crate::zd::HnfSubgroup;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupSpec {
    Free(StallingsGraph),
    Lattice(HnfSubgroup),
    Hom(HomSubgroup),
}

fn field<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::malformed(format!("{what}: missing `{key}`")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Error::malformed(format!("{what} must be a non-negative integer")))
}

impl SubgroupSpec {
    pub fn from_json(v: &Value) -> Result<Self> {
        if v.get("hom").is_some() {
            return Ok(SubgroupSpec::Hom(HomSubgroup::from_json(v)?));
        }
        let Some(context) = v.get("context") else {
            return Err(Error::malformed("a subgroup spec needs a `context` or a `hom`"));
        };
        let generators = v.get("generators").cloned().unwrap_or(json!([]));
        match field(context, "kind", "context")?.as_str() {
            Some("free") => {
                let rank = as_usize(field(context, "rank", "free context")?, "rank")?;
                let gens: Vec<Word> = serde_json::from_value(generators)
                    .map_err(|e| Error::malformed(format!("free subgroup generators: {e}")))?;
                Ok(SubgroupSpec::Free(StallingsGraph::from_generators(GroupContext::free(rank)?, &gens)?))
            }
            Some("lattice") => {
                let dim = as_usize(field(context, "dim", "lattice context")?, "dim")?;
                let gens: Vec<Vec<i64>> = serde_json::from_value(generators)
                    .map_err(|e| Error::malformed(format!("lattice generators: {e}")))?;
                Ok(SubgroupSpec::Lattice(HnfSubgroup::from_generators(dim, &gens)?))
            }
            _ => Err(Error::malformed("context kind must be `free` or `lattice`")),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::malformed(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        match self {
            SubgroupSpec::Free(g) => {
                json!({"context": {"kind": "free", "rank": g.ambient_rank()}, "generators": g.generators()})
            }
            SubgroupSpec::Lattice(h) => {
                json!({"context": {"kind": "lattice", "dim": h.dim()}, "generators": h.basis()})
            }
            SubgroupSpec::Hom(h) => h.to_json(),
        }
    }

    /// The subgroup as a subgroup of a free group, if it is one.
    pub fn into_free(self) -> Result<FreeSub> {
        match self {
            SubgroupSpec::Free(g) => Ok(FreeSub::Graph(g)),
            SubgroupSpec::Hom(h) => Ok(FreeSub::Hom(h)),
            SubgroupSpec::Lattice(_) => Err(Error::mismatch("expected a subgroup of a free group, found a lattice")),
        }
    }
}

/// A subgroup of F_r given either by generators or by a homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FreeSub {
    Graph(StallingsGraph),
    Hom(HomSubgroup),
}

impl Subgroup for FreeSub {
    type Space = FreeGroup;

    fn space(&self) -> FreeGroup {
        match self {
            FreeSub::Graph(g) => g.space(),
            FreeSub::Hom(h) => h.space(),
        }
    }

    fn contains(&self, x: &Word) -> bool {
        match self {
            FreeSub::Graph(g) => g.contains(x),
            FreeSub::Hom(h) => h.contains(x),
        }
    }
}

impl FreeSubgroup for FreeSub {
    fn coset_key(&self, g: &Word) -> CosetKey {
        match self {
            FreeSub::Graph(s) => s.coset_key(g),
            FreeSub::Hom(h) => h.coset_key(g),
        }
    }

    fn finite_generators(&self) -> Option<Vec<Word>> {
        match self {
            FreeSub::Graph(s) => s.finite_generators(),
            FreeSub::Hom(h) => h.finite_generators(),
        }
    }

    fn as_hom(&self) -> Option<&HomSubgroup> {
        match self {
            FreeSub::Graph(_) => None,
            FreeSub::Hom(h) => Some(h),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::Index;
    use crate::words::w;

    #[test]
    fn parses_all_three_forms() {
        let free = SubgroupSpec::parse(r#"{"context": {"kind": "free", "rank": 2}, "generators": ["aa", "b", "abA"]}"#)
            .unwrap();
        let SubgroupSpec::Free(g) = &free else { panic!() };
        assert_eq!(g.index(), Index::Finite(2));
        let lattice =
            SubgroupSpec::parse(r#"{"context": {"kind": "lattice", "dim": 2}, "generators": [[2, 0], [0, 3]]}"#)
                .unwrap();
        let SubgroupSpec::Lattice(l) = &lattice else { panic!() };
        assert_eq!(l.index(), Index::Finite(6));
        let hom = SubgroupSpec::parse(r#"{"hom":{"target":"Z","images":[1,0]},"accepted":"zero"}"#).unwrap();
        for spec in [free, lattice, hom] {
            assert_eq!(SubgroupSpec::from_json(&spec.to_json()).unwrap(), spec);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SubgroupSpec::parse("{}").is_err());
        assert!(SubgroupSpec::parse("not json").is_err());
        assert!(SubgroupSpec::parse(r#"{"context": {"kind": "heisenberg"}}"#).is_err());
        assert!(SubgroupSpec::parse(r#"{"context": {"kind": "free", "rank": 1}, "generators": ["b"]}"#).is_err());
        assert!(SubgroupSpec::parse(r#"{"context": {"kind": "free", "rank": 0}}"#).is_err());
        assert!(SubgroupSpec::parse(r#"{"context": {"kind": "lattice", "dim": 2}, "generators": [[1]]}"#).is_err());
    }

    #[test]
    fn free_sub_dispatch() {
        let h = SubgroupSpec::parse(r#"{"hom":{"target":"Z","images":[1,0]},"accepted":"zero"}"#)
            .unwrap()
            .into_free()
            .unwrap();
        assert!(h.contains(&w("b")) && !h.contains(&w("a")));
        assert!(h.as_hom().is_some());
        let lattice =
            SubgroupSpec::parse(r#"{"context": {"kind": "lattice", "dim": 1}, "generators": [[2]]}"#).unwrap();
        assert!(lattice.into_free().is_err());
    }
}
