//! Subgroups of F_r cut out by a homomorphism to a small target group:
//! `H = φ⁻¹(A)` for `φ : F_r → T` given on generators and `A ≤ T`.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::subgroup::{CosetKey, FreeGroup, FreeSubgroup, Subgroup};
use crate::words::Word;
use crate::zd::HnfSubgroup;

/// The target group of a homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// `Z^k`.
    Lattice(usize),
    /// `Z/m`.
    Cyclic(u64),
    /// The symmetric group on `{0, …, n−1}`; products apply the left factor
    /// first.
    Permutation(usize),
}

impl Target {
    pub fn identity(&self) -> Vec<i64> {
        match *self {
            Target::Lattice(k) => vec![0; k],
            Target::Cyclic(_) => vec![0],
            Target::Permutation(n) => (0..n as i64).collect(),
        }
    }

    pub fn multiply(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        match *self {
            Target::Lattice(_) => x.iter().zip(y).map(|(a, b)| a + b).collect(),
            Target::Cyclic(m) => vec![(x[0] + y[0]).rem_euclid(m as i64)],
            Target::Permutation(_) => x.iter().map(|&i| y[i as usize]).collect(),
        }
    }

    pub fn inverse(&self, x: &[i64]) -> Vec<i64> {
        match *self {
            Target::Lattice(_) => x.iter().map(|a| -a).collect(),
            Target::Cyclic(m) => vec![(-x[0]).rem_euclid(m as i64)],
            Target::Permutation(n) => {
                let mut inv = vec![0; n];
                for (i, &j) in x.iter().enumerate() {
                    inv[j as usize] = i as i64;
                }
                inv
            }
        }
    }

    /// Checks shape and normalizes (cyclic residues into `0..m`).
    pub fn normalize(&self, x: &[i64]) -> Result<Vec<i64>> {
        match *self {
            Target::Lattice(k) if x.len() == k => Ok(x.to_vec()),
            Target::Lattice(k) => Err(Error::malformed(format!("expected a vector of length {k}"))),
            Target::Cyclic(m) if x.len() == 1 => Ok(vec![x[0].rem_euclid(m as i64)]),
            Target::Cyclic(_) => Err(Error::malformed("expected a single residue")),
            Target::Permutation(n) => {
                let mut seen = vec![false; n];
                if x.len() != n
                    || !x.iter().all(|&i| (0..n as i64).contains(&i) && !std::mem::replace(&mut seen[i as usize], true))
                {
                    return Err(Error::malformed(format!("expected a permutation of 0..{n}")));
                }
                Ok(x.to_vec())
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Target::Lattice(_))
    }

    /// All elements of a finite target.
    fn elements(&self) -> Vec<Vec<i64>> {
        match *self {
            Target::Lattice(_) => panic!("lattice targets are infinite"),
            Target::Cyclic(m) => (0..m as i64).map(|x| vec![x]).collect(),
            Target::Permutation(n) => {
                let mut out = Vec::new();
                let mut perm: Vec<i64> = (0..n as i64).collect();
                permutations(&mut perm, 0, &mut out);
                out.sort();
                out
            }
        }
    }

    fn order(&self) -> Option<u64> {
        match *self {
            Target::Lattice(_) => None,
            Target::Cyclic(m) => Some(m),
            Target::Permutation(n) => (1..=n as u64).try_fold(1u64, |a, b| a.checked_mul(b)),
        }
    }

    fn parse(s: &str) -> Result<Target> {
        let bad = || Error::malformed(format!("unknown target `{s}` (expected Z, Z^k, Z/m or S_n)"));
        let s = s.trim();
        if s == "Z" {
            return Ok(Target::Lattice(1));
        }
        if let Some(k) = s.strip_prefix("Z^") {
            let k: usize = k.parse().map_err(|_| bad())?;
            return if k >= 1 { Ok(Target::Lattice(k)) } else { Err(bad()) };
        }
        if let Some(m) = s.strip_prefix("Z/") {
            let m: u64 = m.parse().map_err(|_| bad())?;
            return if m >= 1 { Ok(Target::Cyclic(m)) } else { Err(bad()) };
        }
        if let Some(n) = s.strip_prefix("S_").or_else(|| s.strip_prefix('S')) {
            let n: usize = n.parse().map_err(|_| bad())?;
            return if (1..=8).contains(&n) { Ok(Target::Permutation(n)) } else { Err(bad()) };
        }
        Err(bad())
    }

    /// JSON form of an element: a bare integer for `Z` and `Z/m`, an array
    /// otherwise.
    fn element_json(&self, x: &[i64]) -> Value {
        match self {
            Target::Lattice(1) | Target::Cyclic(_) => json!(x[0]),
            _ => json!(x),
        }
    }

    fn element_from_json(&self, v: &Value) -> Result<Vec<i64>> {
        let raw: Vec<i64> = match v {
            Value::Number(n) => vec![n.as_i64().ok_or_else(|| Error::malformed(format!("not an integer: {n}")))?],
            Value::Array(xs) => xs
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| Error::malformed(format!("not an integer: {x}"))))
                .collect::<Result<_>>()?,
            other => return Err(Error::malformed(format!("not a target element: {other}"))),
        };
        self.normalize(&raw)
    }
}

fn permutations(perm: &mut Vec<i64>, k: usize, out: &mut Vec<Vec<i64>>) {
    if k == perm.len() {
        out.push(perm.clone());
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations(perm, k + 1, out);
        perm.swap(k, i);
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Lattice(1) => write!(f, "Z"),
            Target::Lattice(k) => write!(f, "Z^{k}"),
            Target::Cyclic(m) => write!(f, "Z/{m}"),
            Target::Permutation(n) => write!(f, "S_{n}"),
        }
    }
}

/// The accepted subgroup `A` of the target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Accepted {
    Lattice(HnfSubgroup),
    Finite(BTreeSet<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomSubgroup {
    target: Target,
    images: Vec<Vec<i64>>,
    accepted: Accepted,
}

impl HomSubgroup {
    pub fn new(target: Target, images: Vec<Vec<i64>>, accepted: Accepted) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::malformed("a homomorphism needs at least one generator image"));
        }
        let images = images.iter().map(|x| target.normalize(x)).collect::<Result<Vec<_>>>()?;
        let accepted = match (target, accepted) {
            (Target::Lattice(k), Accepted::Lattice(a)) if a.dim() == k => Accepted::Lattice(a),
            (Target::Lattice(_), _) => {
                return Err(Error::NotASubgroup("accepted set must be a lattice of the target dimension".into()))
            }
            (_, Accepted::Lattice(_)) => {
                return Err(Error::NotASubgroup("a finite target needs an explicit accepted set".into()))
            }
            (t, Accepted::Finite(set)) => {
                let set = set.iter().map(|x| t.normalize(x)).collect::<Result<BTreeSet<_>>>()?;
                check_finite_subgroup(&t, &set)?;
                Accepted::Finite(set)
            }
        };
        Ok(HomSubgroup { target, images, accepted })
    }

    /// `ker(F_r → Z)` with the given generator images.
    pub fn kernel_to_z(images: &[i64]) -> Self {
        HomSubgroup::new(
            Target::Lattice(1),
            images.iter().map(|&x| vec![x]).collect(),
            Accepted::Lattice(HnfSubgroup::zero(1)),
        )
        .expect("valid kernel")
    }

    /// `φ⁻¹(mZ)` for `φ : F_r → Z`.
    pub fn preimage_of_multiples(images: &[i64], m: i64) -> Self {
        let accepted = HnfSubgroup::from_generators(1, &[vec![m]]).expect("one-dimensional lattice");
        HomSubgroup::new(Target::Lattice(1), images.iter().map(|&x| vec![x]).collect(), Accepted::Lattice(accepted))
            .expect("valid preimage")
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn images(&self) -> &[Vec<i64>] {
        &self.images
    }

    pub fn accepted(&self) -> &Accepted {
        &self.accepted
    }

    pub fn ambient_rank(&self) -> usize {
        self.images.len()
    }

    /// `φ(w)`, or `None` if `w` uses a generator outside the domain.
    pub fn image(&self, w: &Word) -> Option<Vec<i64>> {
        let mut acc = self.target.identity();
        for l in w.letters() {
            let g = l.generator() as usize;
            let x = self.images.get(g - 1)?;
            let step = if l.is_inverse() { self.target.inverse(x) } else { x.clone() };
            acc = self.target.multiply(&acc, &step);
        }
        Some(acc)
    }

    pub fn accepts(&self, x: &[i64]) -> bool {
        match &self.accepted {
            Accepted::Lattice(a) => a.membership(x).unwrap_or(false),
            Accepted::Finite(set) => set.contains(x),
        }
    }

    /// Canonical representative of the right coset `A·x`.
    pub fn residue(&self, x: &[i64]) -> Vec<i64> {
        match &self.accepted {
            Accepted::Lattice(a) => a.reduce(x),
            Accepted::Finite(set) => {
                set.iter().map(|a| self.target.multiply(a, x)).min().expect("accepted set contains the identity")
            }
        }
    }

    /// `[F_r : H]` when it is finite and computable: `|φ(F_r)·A / A|`. Lattice
    /// targets report `None` unless the index is visibly infinite or finite
    /// through the HNF of `φ(F_r) + A`.
    pub fn index(&self) -> crate::subgroup::Index {
        use crate::subgroup::Index;
        match (&self.accepted, self.target) {
            (Accepted::Lattice(a), Target::Lattice(k)) => {
                let mut gens: Vec<Vec<i64>> = a.basis().to_vec();
                let image = HnfSubgroup::from_generators(k, &self.images).expect("same dimension");
                gens.extend(image.basis().iter().cloned());
                let total = HnfSubgroup::from_generators(k, &gens).expect("same dimension");
                // [φ(F) + A : A] is finite iff rank(φ(F) + A) = rank(A), and
                // then equals the ratio of covolumes in that common span.
                if total.rank() != a.rank() {
                    return Index::Infinite;
                }
                Index::Finite(lattice_ratio(&total, a))
            }
            _ => {
                let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
                let mut stack = vec![self.residue(&self.target.identity())];
                seen.insert(stack[0].clone());
                while let Some(x) = stack.pop() {
                    for g in &self.images {
                        for y in [self.target.multiply(&x, g), self.target.multiply(&x, &self.target.inverse(g))] {
                            let r = self.residue(&y);
                            if seen.insert(r.clone()) {
                                stack.push(r);
                            }
                        }
                    }
                }
                Index::Finite(seen.len() as u64)
            }
        }
    }

    /// Parses `{"hom": {"target": "Z", "images": [1, 0]}, "accepted": "zero"}`.
    /// `accepted` is `"zero"`, `"all"`, `{"generators": [...]}` (lattice
    /// targets) or `{"elements": [...]}` (finite targets).
    pub fn from_json(v: &Value) -> Result<Self> {
        let hom = v.get("hom").ok_or_else(|| Error::malformed("missing `hom`"))?;
        let target = Target::parse(
            hom.get("target").and_then(Value::as_str).ok_or_else(|| Error::malformed("missing `hom.target`"))?,
        )?;
        let images = hom
            .get("images")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::malformed("missing `hom.images`"))?
            .iter()
            .map(|x| target.element_from_json(x))
            .collect::<Result<Vec<_>>>()?;
        let accepted = match (v.get("accepted").unwrap_or(&json!("zero")), target) {
            (Value::String(s), Target::Lattice(k)) if s == "zero" => Accepted::Lattice(HnfSubgroup::zero(k)),
            (Value::String(s), Target::Lattice(k)) if s == "all" => Accepted::Lattice(HnfSubgroup::full(k)),
            (Value::String(s), t) if s == "zero" => Accepted::Finite([t.identity()].into()),
            (Value::String(s), t) if s == "all" => Accepted::Finite(t.elements().into_iter().collect()),
            (Value::Object(o), Target::Lattice(k)) if o.contains_key("generators") => {
                let gens = o["generators"]
                    .as_array()
                    .ok_or_else(|| Error::malformed("`accepted.generators` must be a list"))?
                    .iter()
                    .map(|x| target.element_from_json(x))
                    .collect::<Result<Vec<_>>>()?;
                Accepted::Lattice(HnfSubgroup::from_generators(k, &gens)?)
            }
            (Value::Object(o), t) if t.is_finite() && o.contains_key("elements") => Accepted::Finite(
                o["elements"]
                    .as_array()
                    .ok_or_else(|| Error::malformed("`accepted.elements` must be a list"))?
                    .iter()
                    .map(|x| t.element_from_json(x))
                    .collect::<Result<_>>()?,
            ),
            (other, _) => return Err(Error::malformed(format!("cannot read accepted set {other}"))),
        };
        HomSubgroup::new(target, images, accepted)
    }

    pub fn to_json(&self) -> Value {
        let accepted = match &self.accepted {
            Accepted::Lattice(a) if a.rank() == 0 => json!("zero"),
            Accepted::Lattice(a) => {
                json!({"generators": a.basis().iter().map(|x| self.target.element_json(x)).collect::<Vec<_>>()})
            }
            Accepted::Finite(set) => {
                json!({"elements": set.iter().map(|x| self.target.element_json(x)).collect::<Vec<_>>()})
            }
        };
        json!({
            "hom": {
                "target": self.target.to_string(),
                "images": self.images.iter().map(|x| self.target.element_json(x)).collect::<Vec<_>>(),
            },
            "accepted": accepted,
        })
    }
}

fn check_finite_subgroup(t: &Target, set: &BTreeSet<Vec<i64>>) -> Result<()> {
    if !set.contains(&t.identity()) {
        return Err(Error::NotASubgroup("accepted set does not contain the identity".into()));
    }
    if let Some(order) = t.order() {
        if set.len() as u64 > order {
            return Err(Error::NotASubgroup("accepted set is larger than the target".into()));
        }
    }
    for x in set {
        if !set.contains(&t.inverse(x)) {
            return Err(Error::NotASubgroup(format!("accepted set is not closed under inverses at {x:?}")));
        }
        for y in set {
            if !set.contains(&t.multiply(x, y)) {
                return Err(Error::NotASubgroup(format!("accepted set is not closed under products at {x:?}, {y:?}")));
            }
        }
    }
    Ok(())
}

/// `[L : A]` for lattices `A ≤ L` of equal rank, via the product of HNF
/// pivots of each expressed in a common basis.
fn lattice_ratio(l: &HnfSubgroup, a: &HnfSubgroup) -> u64 {
    // Both are in row HNF with the same pivot columns (equal rank, A ≤ L
    // spans the same rational space), so the ratio of pivot products is the
    // index.
    let pl: i64 = l.pivots().iter().map(|&(_, p)| p).product();
    let pa: i64 = a.pivots().iter().map(|&(_, p)| p).product();
    (pa / pl).unsigned_abs()
}

impl Subgroup for HomSubgroup {
    type Space = FreeGroup;

    fn space(&self) -> FreeGroup {
        FreeGroup::new(self.images.len())
    }

    fn contains(&self, x: &Word) -> bool {
        self.image(x).is_some_and(|y| self.accepts(&y))
    }
}

impl FreeSubgroup for HomSubgroup {
    fn coset_key(&self, g: &Word) -> CosetKey {
        let x = self.image(g).expect("word lies in the domain of the homomorphism");
        CosetKey::Residue(self.residue(&x))
    }

    fn as_hom(&self) -> Option<&HomSubgroup> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::Index;
    use crate::words::w;

    #[test]
    fn kernel_membership() {
        let h = HomSubgroup::kernel_to_z(&[1, 0]);
        assert!(h.contains(&w("b")));
        assert!(h.contains(&w("abA")));
        assert!(!h.contains(&w("aB")));
        assert!(!h.contains(&w("a")));
        assert_eq!(h.index(), Index::Infinite);
    }

    #[test]
    fn json_round_trip() {
        let v: Value = serde_json::from_str(r#"{"hom":{"target":"Z","images":[1,0]},"accepted":"zero"}"#).unwrap();
        let h = HomSubgroup::from_json(&v).unwrap();
        assert_eq!(h, HomSubgroup::kernel_to_z(&[1, 0]));
        assert_eq!(HomSubgroup::from_json(&h.to_json()).unwrap(), h);
        let even = HomSubgroup::preimage_of_multiples(&[1, 0], 2);
        assert_eq!(HomSubgroup::from_json(&even.to_json()).unwrap(), even);
    }

    #[test]
    fn preimage_index() {
        assert_eq!(HomSubgroup::preimage_of_multiples(&[1, 0], 2).index(), Index::Finite(2));
        assert_eq!(HomSubgroup::preimage_of_multiples(&[2, 4], 3).index(), Index::Finite(3));
        assert_eq!(HomSubgroup::preimage_of_multiples(&[2, 4], 4).index(), Index::Finite(2));
    }

    #[test]
    fn cyclic_target() {
        let v = json!({"hom": {"target": "Z/6", "images": [2, 3]}, "accepted": {"elements": [0, 3]}});
        let h = HomSubgroup::from_json(&v).unwrap();
        assert!(h.contains(&w("b")));
        assert!(h.contains(&w("aaa")));
        assert!(!h.contains(&w("a")));
        assert_eq!(h.index(), Index::Finite(3));
        let bad = json!({"hom": {"target": "Z/6", "images": [2, 3]}, "accepted": {"elements": [0, 1]}});
        assert!(matches!(HomSubgroup::from_json(&bad), Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn permutation_target_applies_left_first() {
        // a = (0 1), b = (1 2); ab sends 0 → 1 → 2.
        let v = json!({"hom": {"target": "S_3", "images": [[1, 0, 2], [0, 2, 1]]}, "accepted": "zero"});
        let h = HomSubgroup::from_json(&v).unwrap();
        assert_eq!(h.image(&w("ab")).unwrap(), vec![2, 0, 1]);
        assert!(h.contains(&w("aa")));
        assert!(h.contains(&w("ababab")));
        assert!(!h.contains(&w("ab")));
        assert_eq!(h.index(), Index::Finite(6));
        assert!(Target::Permutation(3).normalize(&[0, 0, 1]).is_err());
    }

    #[test]
    fn coset_keys_match_membership() {
        let h = HomSubgroup::preimage_of_multiples(&[1, 0], 3);
        for (u, v) in [("a", "aaaa"), ("ab", "Ab"), ("", "bbb"), ("a", "")] {
            let same = h.coset_key(&w(u)) == h.coset_key(&w(v));
            assert_eq!(same, h.contains(&(&w(u) * &w(v).inverse())), "{u} {v}");
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(HomSubgroup::from_json(&json!({"hom": {"target": "Q", "images": [1]}})).is_err());
        assert!(HomSubgroup::from_json(&json!({"hom": {"target": "Z^2", "images": [1]}})).is_err());
        assert!(HomSubgroup::from_json(&json!({"hom": {"target": "Z", "images": []}})).is_err());
    }
}
