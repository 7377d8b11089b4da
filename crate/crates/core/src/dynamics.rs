//! Constructive witnesses for the dynamics of conjugation on Sub(F_r):
//! non-isolation sequences, free-product certificates, transitivity moves,
//! sequences tending to a free-variety point, and Følner transfer checks.

use std::collections::{HashSet, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::chabauty::{self, in_clopen, ClopenSet, Convergence, Distance};
use crate::error::{Error, Result};
use crate::hom::HomSubgroup;
use crate::stallings::StallingsGraph;
use crate::subgroup::{FreeGroup, Graded, Index, Space, Subgroup};
use crate::words::{sphere, Letter, Word};

/// Candidates `k_n` tried at one completion radius before enlarging it.
pub const CANDIDATES_PER_RADIUS: usize = 20;
/// Completion radii tried beyond `n` before giving up.
const EXTRA_RADII: usize = 3;
/// Finite indices above this count as "large" for non-isolation steps.
pub const LARGE_INDEX: u64 = 1000;

/// One term `H_n = ⟨H, k_n⟩` of a non-isolation sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonIsolationStep {
    pub n: usize,
    /// Radius passed to the finite-index completion that supplied `k_n`.
    pub completion_radius: usize,
    pub completion_index: Index,
    pub k: Word,
    /// 0-based position of `k` among the candidates tried.
    pub attempt: usize,
    pub subgroup: StallingsGraph,
    pub index: Index,
    /// Distance to `H`, computed on the ball of radius `n + 2`.
    pub distance: Distance,
}

/// The `limit` shortlex-least elements of `k` outside `h` of length at most
/// `max_len`.
fn elements_outside(k: &StallingsGraph, h: &StallingsGraph, limit: usize, max_len: usize) -> Vec<Word> {
    let n = k.vertex_count();
    let rank = k.ambient_rank();
    // Distance back to the basepoint bounds how long a prefix may be.
    let mut home = vec![usize::MAX; n];
    home[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for l in Letter::all(rank) {
            if let Some(t) = k.target(v, l) {
                if home[t] == usize::MAX {
                    home[t] = home[v] + 1;
                    queue.push_back(t);
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    for len in 1..=max_len {
        walk(k, h, &home, 0, len, &mut path, &mut out, limit);
        if out.len() >= limit {
            break;
        }
    }
    out.truncate(limit);
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    k: &StallingsGraph,
    h: &StallingsGraph,
    home: &[usize],
    v: usize,
    remaining: usize,
    path: &mut Vec<Letter>,
    out: &mut Vec<Word>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if remaining == 0 {
        if v == 0 {
            let w = Word::reduce(path);
            if !h.contains(&w) {
                out.push(w);
            }
        }
        return;
    }
    for l in Letter::all(k.ambient_rank()) {
        if path.last() == Some(&l.inverse()) {
            continue;
        }
        if let Some(t) = k.target(v, l) {
            if home[t] < remaining {
                path.push(l);
                walk(k, h, home, t, remaining - 1, path, out, limit);
                path.pop();
            }
        }
    }
}

fn large_enough(index: Index) -> bool {
    match index {
        Index::Infinite => true,
        Index::Finite(i) => i > LARGE_INDEX,
    }
}

/// `H_n := ⟨H, k_n⟩` for `n = 1..=target_radius`, where `k_n` is a
/// shortlex-least element of a finite-index `K_n ⊇ H` agreeing with `H` on
/// `B(n)` but not lying in `H`.
pub fn nonisolation_witness(
    h: &StallingsGraph,
    target_radius: usize,
    budget: &Budget,
) -> Result<Vec<NonIsolationStep>> {
    if h.index().is_finite() {
        return Err(Error::precondition("finite-index subgroups are isolated points"));
    }
    let mut steps = Vec::new();
    for n in 1..=target_radius {
        steps.push(nonisolation_step(h, n, budget)?);
    }
    Ok(steps)
}

fn nonisolation_step(h: &StallingsGraph, n: usize, budget: &Budget) -> Result<NonIsolationStep> {
    for completion_radius in n..=n + EXTRA_RADII {
        let k = h.hall_completion(completion_radius, budget)?;
        let max_len = 2 * completion_radius + 2 + 2 * k.vertex_count().min(8);
        for (attempt, cand) in elements_outside(&k, h, CANDIDATES_PER_RADIUS, max_len).into_iter().enumerate() {
            let hn = h.join_word(&cand);
            let index = hn.index();
            if !large_enough(index) || hn == *h {
                continue;
            }
            if chabauty::first_disagreement(h, &hn, n, budget)?.is_some() {
                continue;
            }
            let distance = chabauty::distance_up_to(h, &hn, n + 2, budget)?;
            return Ok(NonIsolationStep {
                n,
                completion_radius,
                completion_index: k.index(),
                k: cand,
                attempt,
                subgroup: hn,
                index,
                distance,
            });
        }
    }
    Err(Error::Budget { what: "non-isolation candidates", limit: (CANDIDATES_PER_RADIUS * (EXTRA_RADII + 1)) as u128 })
}

/// Why `⟨A, B⟩` is not visibly `A ∗ B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refutation {
    /// A nontrivial element of `A ∩ B`.
    CommonElement(Word),
    /// `rank ⟨A, B⟩ < rank A + rank B`.
    RankDefect { expected: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeProduct {
    Certified,
    Refuted(Refutation),
}

/// `⟨A, B⟩ ≅ A ∗ B` is certified by `A ∩ B = 1` and
/// `rank ⟨A, B⟩ = rank A + rank B`: the natural map `A ∗ B → ⟨A, B⟩` is then
/// a surjection between free groups of equal finite rank.
pub fn free_product_certify(a: &StallingsGraph, b: &StallingsGraph) -> FreeProduct {
    if let Some(x) = a.intersect(b).shortest_nontrivial_element() {
        return FreeProduct::Refuted(Refutation::CommonElement(x));
    }
    let expected = a.rank() + b.rank();
    let actual = a.join(b).rank();
    if actual != expected {
        return FreeProduct::Refuted(Refutation::RankDefect { expected, actual });
    }
    FreeProduct::Certified
}

/// Which part of Sub(F_r) a transitivity task lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskSpace {
    /// Subgroups of infinite index, the perfect kernel.
    #[default]
    Kernel,
    /// All subgroups.
    Full,
}

/// One pair `(V_i, V_{r+i})` with points `Λ_i ∈ V_i`, `Λ_{r+i} ∈ V_{r+i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPair {
    pub source: ClopenSet,
    pub target: ClopenSet,
    pub source_witness: StallingsGraph,
    pub target_witness: StallingsGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitivityTask {
    pub rank: usize,
    #[serde(default)]
    pub space: TaskSpace,
    pub pairs: Vec<TaskPair>,
}

impl TransitivityTask {
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::TaskInvalid(m));
        if self.pairs.is_empty() {
            return invalid("a transitivity task needs at least one pair".into());
        }
        let ctx = FreeGroup::new(self.rank).context();
        for (i, p) in self.pairs.iter().enumerate() {
            for (set, name) in [(&p.source, "source"), (&p.target, "target")] {
                // Re-run the constructor checks on deserialized data.
                ClopenSet::new(set.ins.clone(), set.outs.clone())?;
                for x in set.ins.iter().chain(&set.outs) {
                    ctx.check(x).map_err(|e| Error::TaskInvalid(format!("pair {i} {name}: {e}")))?;
                }
            }
            for (wit, set, name) in [(&p.source_witness, &p.source, "source"), (&p.target_witness, &p.target, "target")]
            {
                if wit.ambient_rank() != self.rank {
                    return invalid(format!("pair {i}: {name} witness lives in F_{}", wit.ambient_rank()));
                }
                if !in_clopen(wit, set) {
                    return invalid(format!("pair {i}: {name} witness is not in its clopen set"));
                }
                if self.space == TaskSpace::Kernel && wit.index().is_finite() {
                    return invalid(format!("pair {i}: {name} witness has finite index"));
                }
            }
        }
        Ok(())
    }
}

/// How `Λ_{r+i}^w` joined `Λ_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JoinKind {
    /// Certified free product.
    FreeProduct,
    /// `Λ_{r+i}^w ≤ Λ_i`, so the join is `Λ_i` itself.
    Absorbed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCertificate {
    /// `Δ_i`.
    pub moved: StallingsGraph,
    pub join: JoinKind,
    /// `Δ_i ∈ V_i`.
    pub in_source: bool,
    /// `gΔ_ig⁻¹ ∈ V_{r+i}`.
    pub in_target: bool,
    pub index: Index,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCertificate {
    /// `g`, with `gΔ_ig⁻¹ ∈ V_{r+i}` for every pair.
    pub conjugator: Word,
    /// `u` and `n` with `g = u^{-n}`.
    pub base: Word,
    pub exponent: u32,
    pub pairs: Vec<PairCertificate>,
}

impl MoveCertificate {
    /// Recomputes every membership from the stored subgroups and `g`.
    pub fn verify(&self, task: &TransitivityTask) -> bool {
        self.pairs.len() == task.pairs.len()
            && self.pairs.iter().zip(&task.pairs).all(|(c, p)| {
                let moved = c.moved.conjugate_subgroup(&self.conjugator);
                let index_ok = task.space == TaskSpace::Full || c.moved.index() == Index::Infinite;
                c.in_source
                    && c.in_target
                    && index_ok
                    && in_clopen(&c.moved, &p.source)
                    && in_clopen(&moved, &p.target)
                    && p.source.ins.iter().all(|x| c.moved.contains(x))
            })
    }
}

/// The normal core of `⟨I_i⟩` lies in every point of `V_i` and in each of
/// its conjugates; together with `I_{r+i}` it already meets `O_{r+i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    /// 0-based pair index.
    pub pair: usize,
    pub normal_core: StallingsGraph,
    pub forced: Word,
}

/// The most checks passed by any candidate conjugator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialProgress {
    pub conjugator: Word,
    pub checks_passed: usize,
    pub checks_total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchExhausted {
    pub max_length: usize,
    pub max_exponent: u32,
    pub candidates: usize,
    pub best: Option<PartialProgress>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveOutcome {
    Certificate(MoveCertificate),
    Obstruction(Obstruction),
    Exhausted(SearchExhausted),
}

impl MoveOutcome {
    /// 0 for a certificate, 4 for a verified obstruction, 3 when the search
    /// budget ran out.
    pub fn exit_code(&self) -> i32 {
        match self {
            MoveOutcome::Certificate(_) => 0,
            MoveOutcome::Obstruction(_) => 4,
            MoveOutcome::Exhausted(_) => 3,
        }
    }
}

fn find_obstruction(task: &TransitivityTask, budget: &Budget) -> Result<Option<Obstruction>> {
    for (i, p) in task.pairs.iter().enumerate() {
        let span = StallingsGraph::from_generators(FreeGroup::new(task.rank).context(), &p.source.ins)?;
        if !span.index().is_finite() {
            continue;
        }
        let core = span.normal_core(budget)?;
        let forced = core.join(&StallingsGraph::from_generators(FreeGroup::new(task.rank).context(), &p.target.ins)?);
        if let Some(o) = p.target.outs.iter().find(|o| forced.contains(o)) {
            return Ok(Some(Obstruction { pair: i, normal_core: core, forced: o.clone() }));
        }
    }
    Ok(None)
}

/// Checks passed by one pair under `w`, with the certificate when all pass.
fn try_pair(p: &TaskPair, w: &Word, space: TaskSpace) -> (usize, Option<PairCertificate>) {
    let conj = p.target_witness.conjugate_subgroup(w);
    let join = if conj.generators().iter().all(|x| p.source_witness.contains(x)) {
        Some(JoinKind::Absorbed)
    } else if free_product_certify(&p.source_witness, &conj) == FreeProduct::Certified {
        Some(JoinKind::FreeProduct)
    } else {
        None
    };
    let moved = p.source_witness.join(&conj);
    let in_source = in_clopen(&moved, &p.source);
    let in_target = in_clopen(&moved.conjugate_subgroup(&w.inverse()), &p.target);
    let index = moved.index();
    let index_ok = space == TaskSpace::Full || index == Index::Infinite;
    let passed = [join.is_some(), in_source, in_target, index_ok].iter().filter(|&&b| b).count();
    let cert = join.filter(|_| passed == 4).map(|join| PairCertificate { moved, join, in_source, in_target, index });
    (passed, cert)
}

/// Common conjugator search: `u` in shortlex order by increasing length,
/// `n = 1..=max_exponent` for each `u`, `w = uⁿ` with `|w|` at most the
/// word-length budget; `Δ_i = ⟨Λ_i, wΛ_{r+i}w⁻¹⟩` and `g = w⁻¹`.
pub fn multi_transitivity_move(task: &TransitivityTask, budget: &Budget) -> Result<MoveOutcome> {
    task.validate()?;
    if let Some(obstruction) = find_obstruction(task, budget)? {
        return Ok(MoveOutcome::Obstruction(obstruction));
    }
    let max_length = budget.max_word_length;
    let max_exponent = budget.max_exponent;
    let checks_total = 4 * task.pairs.len();
    let mut tried: HashSet<Word> = HashSet::new();
    let mut best: Option<PartialProgress> = None;
    for len in 0..=max_length {
        for u in sphere(task.rank, len) {
            let exponents = if u.is_identity() { 1 } else { max_exponent };
            for n in 1..=exponents {
                let w = u.pow(i64::from(n));
                if w.len() > max_length {
                    break;
                }
                if !tried.insert(w.clone()) {
                    continue;
                }
                let mut passed = 0;
                let mut certs = Vec::new();
                for p in &task.pairs {
                    let (k, cert) = try_pair(p, &w, task.space);
                    passed += k;
                    certs.extend(cert);
                }
                if certs.len() == task.pairs.len() {
                    let cert = MoveCertificate { conjugator: w.inverse(), base: u.clone(), exponent: n, pairs: certs };
                    debug_assert!(cert.verify(task));
                    return Ok(MoveOutcome::Certificate(cert));
                }
                if best.as_ref().is_none_or(|b| passed > b.checks_passed) {
                    best = Some(PartialProgress { conjugator: w.inverse(), checks_passed: passed, checks_total });
                }
            }
        }
    }
    Ok(MoveOutcome::Exhausted(SearchExhausted { max_length, max_exponent, candidates: tried.len(), best }))
}

/// The single-pair case of [`multi_transitivity_move`].
pub fn transitivity_move(task: &TransitivityTask, budget: &Budget) -> Result<MoveOutcome> {
    if task.pairs.len() != 1 {
        return Err(Error::precondition(format!("expected one pair, found {}", task.pairs.len())));
    }
    multi_transitivity_move(task, budget)
}

/// One term `L_i = ⟨L, s_i⟩` of a sequence tending to `L` in Sub(F_∞).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyTerm {
    pub generator: u32,
    pub subgroup: StallingsGraph,
    /// Distance to `L` in F_∞ with generator `s_i` of length `i`.
    pub graded_distance: Distance,
    /// Distance to `L` in the word metric of the term's own free group.
    pub context_distance: Distance,
    pub nontrivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietySequence {
    pub radius: usize,
    pub terms: Vec<VarietyTerm>,
    pub convergence: Convergence<Word>,
}

/// `L_i = ⟨L, s_i⟩` for `i` in `new_generators`, where `L` is supported on
/// `generators`. Distances and convergence are measured in the graded F_∞
/// ball of radius `radius`.
pub fn variety_limit_sequence(
    l: &StallingsGraph,
    generators: &[u32],
    new_generators: &[u32],
    radius: usize,
    budget: &Budget,
) -> Result<VarietySequence> {
    if let Some(g) = l.support().into_iter().find(|g| !generators.contains(g)) {
        return Err(Error::precondition(format!("generator {g} of L lies outside the given support")));
    }
    if let Some(i) = new_generators.iter().find(|i| generators.contains(i)) {
        return Err(Error::precondition(format!("generator {i} overlaps the support of L")));
    }
    if new_generators.contains(&0) {
        return Err(Error::malformed("generators are numbered from 1"));
    }
    let limit = Graded(l.clone());
    let mut terms = Vec::new();
    let mut graded = Vec::new();
    for &i in new_generators {
        let li = l.join_word(&Word::generator(i));
        let g = Graded(li.clone());
        let graded_distance = chabauty::distance_up_to(&g, &limit, radius, budget)?;
        let context_distance = chabauty::distance_up_to(&li, l, radius.min(budget.max_word_length), budget)?;
        terms.push(VarietyTerm { generator: i, nontrivial: li != *l, subgroup: li, graded_distance, context_distance });
        graded.push(g);
    }
    let convergence = chabauty::certify_convergence(&graded, &limit, radius, budget)?;
    Ok(VarietySequence { radius, terms, convergence })
}

/// `|γB △ B| / |B|` for one `γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerRatio {
    pub gamma: Word,
    pub moved_out: usize,
    pub ratio: Ratio<u64>,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerReport {
    pub k: Word,
    pub set_size: usize,
    pub tolerance: Ratio<u64>,
    pub ratios: Vec<FolnerRatio>,
    pub all_within: bool,
}

/// With `B = {g_j k H₀}` (left cosets), checks `|γB △ B| ≤ tolerance·|B|`
/// for each `γ` in `test_set`. Equal cosets among the `g_j k` are rejected.
pub fn folner_transfer_check<H: Subgroup<Space = FreeGroup>>(
    h0: &H,
    k: &Word,
    reps: &[Word],
    test_set: &[Word],
    tolerance: Ratio<u64>,
) -> Result<FolnerReport> {
    let points: Vec<Word> = reps.iter().map(|g| g * k).collect();
    let same_coset = |x: &Word, y: &Word| h0.contains(&(&x.inverse() * y));
    for (a, x) in points.iter().enumerate() {
        for (b, y) in points.iter().enumerate().skip(a + 1) {
            if same_coset(x, y) {
                return Err(Error::TaskInvalid(format!(
                    "representatives {a} and {b} give the same coset `{x}` H = `{y}` H"
                )));
            }
        }
    }
    let size = points.len();
    let mut ratios = Vec::new();
    for gamma in test_set {
        let moved_out = points.iter().filter(|x| !points.iter().any(|y| same_coset(&(gamma * *x), y))).count();
        let ratio = if size == 0 { Ratio::from_integer(0) } else { Ratio::new(2 * moved_out as u64, size as u64) };
        ratios.push(FolnerRatio { gamma: gamma.clone(), moved_out, within: ratio <= tolerance, ratio });
    }
    let all_within = ratios.iter().all(|r| r.within);
    Ok(FolnerReport { k: k.clone(), set_size: size, tolerance, ratios, all_within })
}

/// The demo on `F_2 / ker(a ↦ 1, b ↦ 0) ≅ Z`: `B_i` is the interval
/// `{a^j k H₀ : |j| ≤ i}`, `S_i = B(id, 1)` and the tolerance is `1/i`.
/// `k` is the shortlex-least word of length at most 4 passing every check.
pub fn folner_demo(i: u64, budget: &Budget) -> Result<FolnerReport> {
    if i == 0 {
        return Err(Error::precondition("the demo index starts at 1"));
    }
    let h0 = HomSubgroup::kernel_to_z(&[1, 0]);
    let a = Word::generator(1);
    let reps: Vec<Word> = (-(i as i64)..=i as i64).map(|j| a.pow(j)).collect();
    let test_set = FreeGroup::new(2).ball(1, budget)?;
    let tolerance = Ratio::new(1, i);
    let mut last = None;
    for k in FreeGroup::new(2).ball(4, budget)? {
        match folner_transfer_check(&h0, &k, &reps, &test_set, tolerance) {
            Ok(r) if r.all_within => return Ok(r),
            Ok(r) => last = Some(Ok(r)),
            Err(e) => last = last.or(Some(Err(e))),
        }
    }
    last.expect("the ball is nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chabauty::nontrivial_flags;
    use crate::words::{w, GroupContext};

    fn sub(gens: &[&str]) -> StallingsGraph {
        let gens: Vec<Word> = gens.iter().map(|s| w(s)).collect();
        StallingsGraph::from_generators(GroupContext::free(2).unwrap(), &gens).unwrap()
    }

    fn clopen(ins: &[&str], outs: &[&str]) -> ClopenSet {
        ClopenSet::new(ins.iter().map(|s| w(s)).collect(), outs.iter().map(|s| w(s)).collect()).unwrap()
    }

    fn pair(v1: ClopenSet, v2: ClopenSet, l1: &[&str], l2: &[&str]) -> TaskPair {
        TaskPair { source: v1, target: v2, source_witness: sub(l1), target_witness: sub(l2) }
    }

    fn check_nonisolation(h: &StallingsGraph, l: usize) {
        let b = Budget::default();
        let steps = nonisolation_witness(h, l, &b).unwrap();
        assert_eq!(steps.len(), l);
        for s in &steps {
            assert_ne!(s.subgroup, *h);
            assert!(chabauty::first_disagreement(h, &s.subgroup, s.n, &b).unwrap().is_none());
            assert!(s.distance.exponent() > s.n);
            assert!(large_enough(s.index));
            assert!(s.subgroup.contains(&s.k) && !h.contains(&s.k));
        }
        let seq: Vec<_> = steps.iter().map(|s| s.subgroup.clone()).collect();
        assert!(nontrivial_flags(&seq, h).iter().all(|&f| f));
        let half = l / 2;
        match chabauty::certify_convergence(&seq, h, half, &b).unwrap() {
            Convergence::CertifiedAt(n0) => assert!(n0 <= half + 1),
            other => panic!("no convergence: {other:?}"),
        }
    }

    #[test]
    fn nonisolation_examples() {
        check_nonisolation(&sub(&["a"]), 6);
        check_nonisolation(&sub(&["a", "baB"]), 5);
        assert!(matches!(
            nonisolation_witness(&sub(&["aa", "b", "abA"]), 3, &Budget::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn elements_outside_are_shortlex() {
        let h = sub(&["a"]);
        let k = h.hall_completion(2, &Budget::default()).unwrap();
        let xs = elements_outside(&k, &h, 10, 8);
        assert!(!xs.is_empty());
        assert!(xs.windows(2).all(|p| p[0] < p[1]));
        assert!(xs.iter().all(|x| k.contains(x) && !h.contains(x) && x.len() > 2));
    }

    #[test]
    fn free_product_examples() {
        assert_eq!(free_product_certify(&sub(&["a"]), &sub(&["b"])), FreeProduct::Certified);
        assert_eq!(
            free_product_certify(&sub(&["aa"]), &sub(&["aaa"])),
            FreeProduct::Refuted(Refutation::CommonElement(w("aaaaaa")))
        );
        assert_eq!(free_product_certify(&sub(&["a"]), &sub(&["baB"])), FreeProduct::Certified);
        assert_eq!(free_product_certify(&sub(&["ab"]), &sub(&["ba"])), FreeProduct::Certified);
        assert!(matches!(
            free_product_certify(&sub(&["a", "b"]), &sub(&["ab"])),
            FreeProduct::Refuted(Refutation::CommonElement(_))
        ));
    }

    #[test]
    fn single_move_examples() {
        let b = Budget::default();
        let task = TransitivityTask {
            rank: 2,
            space: TaskSpace::Kernel,
            pairs: vec![pair(clopen(&["a"], &["b"]), clopen(&["b"], &["a"]), &["a"], &["b"])],
        };
        let MoveOutcome::Certificate(cert) = transitivity_move(&task, &b).unwrap() else { panic!("no certificate") };
        assert!(cert.verify(&task));
        let same = TransitivityTask {
            rank: 2,
            space: TaskSpace::Kernel,
            pairs: vec![pair(clopen(&["a"], &["b"]), clopen(&["a"], &["b"]), &["a"], &["a"])],
        };
        let MoveOutcome::Certificate(cert) = transitivity_move(&same, &b).unwrap() else { panic!("no certificate") };
        assert_eq!(cert.conjugator, w(""));
        assert_eq!(cert.pairs[0].join, JoinKind::Absorbed);
        let bad = TransitivityTask {
            rank: 2,
            space: TaskSpace::Kernel,
            pairs: vec![pair(clopen(&[], &["a"]), clopen(&["b"], &[]), &["a"], &["b"])],
        };
        assert!(matches!(transitivity_move(&bad, &b), Err(Error::TaskInvalid(_))));
    }

    #[test]
    fn multi_move_examples() {
        let b = Budget::default();
        let task = TransitivityTask {
            rank: 2,
            space: TaskSpace::Kernel,
            pairs: vec![
                pair(clopen(&["a"], &["b"]), clopen(&["ab"], &["a"]), &["a"], &["ab"]),
                pair(clopen(&["b"], &["a"]), clopen(&["ba"], &["b"]), &["b"], &["ba"]),
            ],
        };
        let MoveOutcome::Certificate(cert) = multi_transitivity_move(&task, &b).unwrap() else {
            panic!("no certificate")
        };
        assert!(cert.verify(&task));
        assert_eq!(cert.conjugator, cert.base.pow(-i64::from(cert.exponent)));
        let single = TransitivityTask { pairs: vec![task.pairs[0].clone()], ..task.clone() };
        let twice = TransitivityTask { pairs: vec![task.pairs[0].clone(), task.pairs[0].clone()], ..task.clone() };
        let (MoveOutcome::Certificate(c1), MoveOutcome::Certificate(c2)) =
            (transitivity_move(&single, &b).unwrap(), multi_transitivity_move(&twice, &b).unwrap())
        else {
            panic!("no certificate")
        };
        assert_eq!(c1.conjugator, c2.conjugator);
    }

    #[test]
    fn normal_core_obstruction() {
        let n = ["aa", "b", "abA"];
        let n2 = ["a", "bb", "bAB"];
        let v = clopen(&n, &["a"]);
        let task = TransitivityTask {
            rank: 2,
            space: TaskSpace::Full,
            pairs: vec![pair(v.clone(), v.clone(), &n, &n), pair(v.clone(), clopen(&n2, &["b"]), &n, &n2)],
        };
        let MoveOutcome::Obstruction(o) = multi_transitivity_move(&task, &Budget::default()).unwrap() else {
            panic!("expected an obstruction")
        };
        assert_eq!(o.pair, 1);
        assert_eq!(o.forced, w("b"));
    }

    #[test]
    fn variety_examples() {
        let b = Budget::default();
        let a = StallingsGraph::generated_by(1, &[w("a")]);
        let seq = variety_limit_sequence(&a, &[1], &[2, 3, 4, 5, 6, 7], 5, &b).unwrap();
        for t in &seq.terms {
            let expected = if t.generator <= 5 { Distance::Exact(t.generator as usize) } else { Distance::AtMost(6) };
            assert_eq!(t.graded_distance, expected);
            assert_eq!(t.context_distance, Distance::Exact(1));
            assert!(t.nontrivial);
        }
        assert_eq!(seq.convergence, Convergence::CertifiedAt(5));
        let trivial = variety_limit_sequence(&StallingsGraph::trivial(1), &[1], &[3], 4, &b).unwrap();
        assert_eq!(trivial.terms[0].subgroup.generators(), vec![w("c")]);
        assert!(variety_limit_sequence(&a, &[1], &[], 4, &b).unwrap().terms.is_empty());
        assert!(variety_limit_sequence(&a, &[1], &[1], 4, &b).is_err());
    }

    #[test]
    fn folner_examples() {
        let b = Budget::default();
        for i in 2..=5u64 {
            let r = folner_demo(i, &b).unwrap();
            assert!(r.all_within);
            assert_eq!(r.set_size, 2 * i as usize + 1);
            for x in &r.ratios {
                assert!(x.ratio <= Ratio::new(2, 2 * i + 1));
            }
        }
        let h0 = HomSubgroup::kernel_to_z(&[1, 0]);
        let reps = vec![w(""), w("a")];
        let id = folner_transfer_check(&h0, &w(""), &reps, &[w("")], Ratio::new(1, 2)).unwrap();
        assert!(id.ratios.iter().all(|r| r.ratio == Ratio::from_integer(0)));
        let collide = vec![w("a"), w("ab")];
        assert!(matches!(
            folner_transfer_check(&h0, &w(""), &collide, &[w("")], Ratio::new(1, 2)),
            Err(Error::TaskInvalid(_))
        ));
    }
}
