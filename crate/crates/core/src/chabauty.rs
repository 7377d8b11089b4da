//! Truncated Chabauty topology: traces on balls, basic clopen sets
//! `𝒱(I, O)`, the first-disagreement ultrametric and convergence
//! certificates. Every answer about limits is tied to the radius at which it
//! was checked.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::subgroup::{Space, Subgroup};
use crate::words::Word;

type Elem<S> = <<S as Subgroup>::Space as Space>::Element;

/// The elements of a subgroup lying in the ball of radius `radius`, in
/// canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgroupTrace<E> {
    pub radius: usize,
    pub members: Vec<E>,
}

impl<E: Ord> SubgroupTrace<E> {
    pub fn contains(&self, x: &E) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl<E: Ord + Clone> SubgroupTrace<E> {
    /// Restriction to a smaller ball, given the length function of the space.
    pub fn restrict(&self, radius: usize, length: impl Fn(&E) -> usize) -> Self {
        assert!(radius <= self.radius, "cannot restrict a trace to a larger ball");
        SubgroupTrace { radius, members: self.members.iter().filter(|m| length(m) <= radius).cloned().collect() }
    }
}

pub fn trace<S: Subgroup>(h: &S, radius: usize, budget: &Budget) -> Result<SubgroupTrace<Elem<S>>> {
    let space = h.space();
    let mut members = Vec::new();
    space.visit_spheres::<()>(radius, budget, |_, sphere| {
        members.extend(sphere.iter().filter(|x| h.contains(x)).cloned());
        ControlFlow::Continue(())
    })?;
    // Spheres are individually sorted; the canonical order of a space sorts
    // by length first.
    members.sort_by(|a, b| space.length(a).cmp(&space.length(b)).then_with(|| a.cmp(b)));
    Ok(SubgroupTrace { radius, members })
}

/// The basic clopen set `𝒱(I, O) = {H : I ⊆ H, H ∩ O = ∅}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClopenSet {
    pub ins: Vec<Word>,
    pub outs: Vec<Word>,
}

impl ClopenSet {
    /// Sorts and deduplicates both sides. Fails when `I ∩ O ≠ ∅` (the set
    /// would be empty) or when `O` contains the identity.
    pub fn new(ins: Vec<Word>, outs: Vec<Word>) -> Result<Self> {
        let ins: BTreeSet<Word> = ins.into_iter().collect();
        let outs: BTreeSet<Word> = outs.into_iter().collect();
        if let Some(both) = ins.intersection(&outs).next() {
            return Err(Error::TaskInvalid(format!("clopen set is empty: `{both}` is required both in and out")));
        }
        if outs.contains(&Word::identity()) {
            return Err(Error::TaskInvalid("clopen set is empty: the identity is excluded".into()));
        }
        Ok(ClopenSet { ins: ins.into_iter().collect(), outs: outs.into_iter().collect() })
    }

    /// Longest word mentioned.
    pub fn radius(&self) -> usize {
        self.ins.iter().chain(&self.outs).map(Word::len).max().unwrap_or(0)
    }
}

pub fn in_clopen<S>(h: &S, set: &ClopenSet) -> bool
where
    S: Subgroup,
    S::Space: Space<Element = Word>,
{
    set.ins.iter().all(|w| h.contains(w)) && !set.outs.iter().any(|w| h.contains(w))
}

/// Same question answered from a trace whose radius covers the set.
pub fn in_clopen_from_trace(trace: &SubgroupTrace<Word>, set: &ClopenSet) -> Result<bool> {
    if set.radius() > trace.radius {
        return Err(Error::precondition("trace radius is smaller than the clopen data"));
    }
    Ok(set.ins.iter().all(|w| trace.contains(w)) && !set.outs.iter().any(|w| trace.contains(w)))
}

/// `2^(−ρ)` where `ρ` is the length of a shortest element of the symmetric
/// difference, known exactly or only bounded at the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum Distance {
    /// Exactly `2^(−exponent)`.
    Exact(usize),
    /// At most `2^(−exponent)`; no disagreement found within radius
    /// `exponent − 1`.
    AtMost(usize),
}

impl Distance {
    pub fn exponent(&self) -> usize {
        match *self {
            Distance::Exact(e) | Distance::AtMost(e) => e,
        }
    }

    pub fn value(&self) -> Ratio<u128> {
        Ratio::new(1, 1u128 << self.exponent().min(127))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(e) => write!(f, "2^-{e}"),
            Distance::AtMost(e) => write!(f, "<= 2^-{e}"),
        }
    }
}

fn common_space<S, T>(h: &S, k: &T) -> Result<S::Space>
where
    S: Subgroup,
    T: Subgroup<Space = S::Space>,
{
    let (a, b) = (h.space(), k.space());
    a.common(&b).ok_or_else(|| Error::mismatch(format!("{a:?} vs {b:?}")))
}

/// A shortest element (canonical-order first) on which `h` and `k` disagree,
/// among elements of length at most `radius`.
pub fn first_disagreement<S, T>(h: &S, k: &T, radius: usize, budget: &Budget) -> Result<Option<Elem<S>>>
where
    S: Subgroup,
    T: Subgroup<Space = S::Space>,
{
    let space = common_space(h, k)?;
    space.visit_spheres(radius, budget, |_, sphere| match sphere.iter().find(|x| h.contains(x) != k.contains(x)) {
        Some(x) => ControlFlow::Break(x.clone()),
        None => ControlFlow::Continue(()),
    })
}

pub fn distance_up_to<S, T>(h: &S, k: &T, radius: usize, budget: &Budget) -> Result<Distance>
where
    S: Subgroup,
    T: Subgroup<Space = S::Space>,
{
    let space = common_space(h, k)?;
    Ok(match first_disagreement(h, k, radius, budget)? {
        Some(x) => Distance::Exact(space.length(&x)),
        None => Distance::AtMost(radius + 1),
    })
}

/// Outcome of checking a finite sequence against a proposed limit on a ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence<E> {
    /// Every term from this (1-based) index on agrees with the limit.
    CertifiedAt(usize),
    /// The last term disagrees; `index` is the first disagreeing term and
    /// `witness` a shortest element telling it apart from the limit.
    Fails { witness: E, index: usize },
}

pub fn certify_convergence<S, T>(seq: &[S], limit: &T, radius: usize, budget: &Budget) -> Result<Convergence<Elem<S>>>
where
    S: Subgroup,
    T: Subgroup<Space = S::Space>,
{
    let mut first_bad: Option<(usize, Elem<S>)> = None;
    let mut n0 = 1;
    for (i, term) in seq.iter().enumerate() {
        if let Some(x) = first_disagreement(term, limit, radius, budget)? {
            if first_bad.is_none() {
                first_bad = Some((i + 1, x));
            }
            n0 = i + 2;
        }
    }
    if n0 <= seq.len() || seq.is_empty() {
        return Ok(Convergence::CertifiedAt(n0.min(seq.len().max(1))));
    }
    let (index, witness) = first_bad.expect("a disagreeing term exists");
    Ok(Convergence::Fails { witness, index })
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// 1-based term index.
    pub n: usize,
    pub distance: Distance,
    pub nontrivial: bool,
}

pub fn convergence_table<S>(seq: &[S], limit: &S, radius: usize, budget: &Budget) -> Result<Vec<ConvergenceRow>>
where
    S: Subgroup + PartialEq,
{
    let flags = nontrivial_flags(seq, limit);
    seq.iter()
        .zip(flags)
        .enumerate()
        .map(|(i, (t, nontrivial))| {
            Ok(ConvergenceRow { n: i + 1, distance: distance_up_to(t, limit, radius, budget)?, nontrivial })
        })
        .collect()
}

/// Columns `n,distance_exponent,exact,nontrivial`; an inexact exponent is an
/// upper bound on the distance at the truncation radius.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,distance_exponent,exact,nontrivial\n");
    for r in rows {
        let exact = matches!(r.distance, Distance::Exact(_));
        out.push_str(&format!("{},{},{},{}\n", r.n, r.distance.exponent(), exact, r.nontrivial));
    }
    out
}

/// Per term: whether it differs from the limit as a subgroup.
pub fn nontrivial_flags<T: PartialEq>(seq: &[T], limit: &T) -> Vec<bool> {
    seq.iter().map(|t| t != limit).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stallings::StallingsGraph;
    use crate::words::{w, GroupContext};

    fn sub(gens: &[&str]) -> StallingsGraph {
        let gens: Vec<Word> = gens.iter().map(|s| w(s)).collect();
        StallingsGraph::from_generators(GroupContext::free(2).unwrap(), &gens).unwrap()
    }

    #[test]
    fn trace_examples() {
        let b = Budget::default();
        assert_eq!(trace(&sub(&[]), 3, &b).unwrap().members, vec![w("")]);
        assert_eq!(trace(&sub(&["a"]), 2, &b).unwrap().members, vec![w(""), w("a"), w("A"), w("aa"), w("AA")]);
        let t = trace(&sub(&["aa", "b", "abA"]), 2, &b).unwrap();
        assert!(t.contains(&w("b")) && t.contains(&w("aa")) && !t.contains(&w("a")));
    }

    #[test]
    fn trace_invariants() {
        let t = trace(&sub(&["ab", "baaB"]), 6, &Budget::default()).unwrap();
        assert!(t.contains(&w("")));
        assert!(t.members.windows(2).all(|p| p[0] < p[1]));
        assert!(t.members.iter().all(|m| t.contains(&m.inverse())));
    }

    #[test]
    fn trace_budget() {
        assert!(trace(&sub(&["a"]), 13, &Budget::default()).unwrap_err().is_budget());
    }

    #[test]
    fn clopen_examples() {
        let a = sub(&["a"]);
        assert!(in_clopen(&a, &ClopenSet::new(vec![w("a")], vec![w("b")]).unwrap()));
        assert!(!in_clopen(&a, &ClopenSet::new(vec![w("b")], vec![]).unwrap()));
        let h = sub(&["a", "baB"]);
        assert!(in_clopen(&h, &ClopenSet::new(vec![w("a"), w("baB")], vec![w("b")]).unwrap()));
        assert!(ClopenSet::new(vec![w("a")], vec![w("a")]).is_err());
    }

    #[test]
    fn clopen_from_trace_agrees() {
        let h = sub(&["a", "baB"]);
        let set = ClopenSet::new(vec![w("a"), w("baB")], vec![w("b"), w("ab")]).unwrap();
        let t = trace(&h, set.radius(), &Budget::default()).unwrap();
        assert_eq!(in_clopen_from_trace(&t, &set).unwrap(), in_clopen(&h, &set));
    }

    #[test]
    fn distance_examples() {
        let b = Budget::default();
        let h = sub(&["a", "baB"]);
        assert_eq!(distance_up_to(&h, &h, 5, &b).unwrap(), Distance::AtMost(6));
        let k = sub(&["a", "bbaBB"]);
        assert_eq!(distance_up_to(&sub(&["a"]), &k, 8, &b).unwrap(), Distance::Exact(5));
        for n in 1..=6 {
            let kn = sub(&["a"]).join_word(&w("b").pow(n));
            assert_eq!(distance_up_to(&sub(&["a"]), &kn, 8, &b).unwrap(), Distance::Exact(n as usize));
        }
    }

    #[test]
    fn convergence_examples() {
        let b = Budget::default();
        let a = sub(&["a"]);
        let seq: Vec<_> = (1..=10).map(|n| a.join_word(&w("b").pow(n))).collect();
        assert_eq!(certify_convergence(&seq, &a, 6, &b).unwrap(), Convergence::CertifiedAt(7));
        assert!(nontrivial_flags(&seq, &a).iter().all(|&f| f));
        let constant = vec![a.clone(); 4];
        assert_eq!(certify_convergence(&constant, &a, 6, &b).unwrap(), Convergence::CertifiedAt(1));
        assert!(nontrivial_flags(&constant, &a).iter().all(|&f| !f));
        let full = vec![StallingsGraph::full(2); 3];
        assert_eq!(certify_convergence(&full, &a, 1, &b).unwrap(), Convergence::Fails { witness: w("b"), index: 1 });
    }

    #[test]
    fn convergence_csv_rows() {
        let a = sub(&["a"]);
        let seq: Vec<_> = (1..=3).map(|n| a.join_word(&w("b").pow(n))).collect();
        let rows = convergence_table(&seq, &a, 2, &Budget::default()).unwrap();
        assert_eq!(
            convergence_csv(&rows),
            "n,distance_exponent,exact,nontrivial\n1,1,true,true\n2,2,true,true\n3,3,false,true\n"
        );
    }

    #[test]
    fn mixed_flags() {
        let a = sub(&["a"]);
        let seq = vec![a.clone(), sub(&["b"]), a.clone()];
        assert_eq!(nontrivial_flags(&seq, &a), vec![false, true, false]);
    }

    #[test]
    fn different_ranks_compare_in_the_larger_group() {
        let a2 = sub(&["a"]);
        let a3 = a2.with_rank(3);
        assert_eq!(distance_up_to(&a2, &a3, 4, &Budget::default()).unwrap(), Distance::AtMost(5));
    }
}
