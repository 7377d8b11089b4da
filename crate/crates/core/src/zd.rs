//! Subgroups of Z^d in row Hermite normal form.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::chabauty::{self, Distance};
use crate::error::{Error, Result};
use crate::subgroup::{Index, Space, Subgroup};
use crate::words::GroupContext;

/// Z^d with the L¹ (standard word) metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub dim: usize,
}

impl Lattice {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "lattice dimension must be at least 1");
        Lattice { dim }
    }

    pub fn context(&self) -> GroupContext {
        GroupContext::lattice(self.dim).expect("dimension positive")
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn push_sphere(prefix: &mut Vec<i64>, left: usize, remaining: i64, out: &mut Vec<Vec<i64>>) {
    if left == 1 {
        for x in [-remaining, remaining] {
            prefix.push(x);
            out.push(prefix.clone());
            prefix.pop();
            if remaining == 0 {
                break;
            }
        }
        return;
    }
    for x in -remaining..=remaining {
        prefix.push(x);
        push_sphere(prefix, left - 1, remaining - x.abs(), out);
        prefix.pop();
    }
}

impl Space for Lattice {
    type Element = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn inverse(&self, x: &Vec<i64>) -> Vec<i64> {
        x.iter().map(|c| -c).collect()
    }

    fn length(&self, x: &Vec<i64>) -> usize {
        x.iter().map(|c| c.unsigned_abs() as usize).sum()
    }

    /// Lattice points of L¹ norm `radius`, lexicographically.
    fn sphere(&self, radius: usize) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        push_sphere(&mut Vec::with_capacity(self.dim), self.dim, radius as i64, &mut out);
        out
    }

    /// `Σ_j 2^j C(d, j) C(radius, j)`.
    fn ball_size(&self, radius: usize) -> Option<u128> {
        (0..=self.dim as u128).try_fold(0u128, |acc, j| {
            let term =
                (1u128 << j).checked_mul(binomial(self.dim as u128, j)?)?.checked_mul(binomial(radius as u128, j)?)?;
            acc.checked_add(term)
        })
    }
}

/// A subgroup of Z^d given by its row Hermite normal form basis.
///
/// Pivot columns strictly increase down the rows, pivots are positive, and
/// entries above a pivot lie in `[0, pivot)`. The basis is unique, so
/// equality of values is equality of subgroups.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HnfSubgroup {
    dim: usize,
    basis: Vec<Vec<i64>>,
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::malformed("lattice entries overflow i64"))
}

impl HnfSubgroup {
    pub fn zero(dim: usize) -> Self {
        HnfSubgroup { dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        let basis = (0..dim).map(|i| (0..dim).map(|j| i64::from(i == j)).collect()).collect();
        HnfSubgroup { dim, basis }
    }

    /// Integer row reduction of the generating vectors.
    pub fn from_generators(dim: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::malformed("lattice dimension must be at least 1"));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::mismatch(format!("vector of length {} in Z^{dim}", v.len())));
        }
        let mut rows: Vec<Vec<i128>> = vectors
            .iter()
            .filter(|v| v.iter().any(|&c| c != 0))
            .map(|v| v.iter().map(|&c| c as i128).collect())
            .collect();
        let mut r = 0;
        for col in 0..dim {
            loop {
                let pick = (r..rows.len()).filter(|&i| rows[i][col] != 0).min_by_key(|&i| rows[i][col].abs());
                let Some(p) = pick else { break };
                rows.swap(r, p);
                let mut done = true;
                for j in r + 1..rows.len() {
                    if rows[j][col] != 0 {
                        let q = rows[j][col] / rows[r][col];
                        for c in col..dim {
                            rows[j][c] -= q * rows[r][c];
                        }
                        if rows[j][col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if r >= rows.len() || rows[r][col] == 0 {
                continue;
            }
            if rows[r][col] < 0 {
                rows[r].iter_mut().for_each(|c| *c = -*c);
            }
            let pivot = rows[r][col];
            for i in 0..r {
                let q = rows[i][col].div_euclid(pivot);
                if q != 0 {
                    for c in col..dim {
                        rows[i][c] -= q * rows[r][c];
                    }
                }
            }
            r += 1;
        }
        rows.truncate(r);
        let basis = rows
            .into_iter()
            .map(|row| row.into_iter().map(to_i64).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(HnfSubgroup { dim, basis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// `(column, value)` of each row's pivot.
    pub fn pivots(&self) -> Vec<(usize, i64)> {
        self.basis
            .iter()
            .map(|row| {
                let c = row.iter().position(|&x| x != 0).expect("basis rows are nonzero");
                (c, row[c])
            })
            .collect()
    }

    /// Canonical representative of `v + H`: each pivot coordinate reduced
    /// into `[0, pivot)`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut out: Vec<i128> = v.iter().map(|&c| c as i128).collect();
        for (row, (c, p)) in self.basis.iter().zip(self.pivots()) {
            let q = out[c].div_euclid(p as i128);
            if q != 0 {
                for (o, &x) in out.iter_mut().zip(row) {
                    *o -= q * x as i128;
                }
            }
        }
        out.into_iter().map(|c| c as i64).collect()
    }

    /// Membership by back-substitution on the pivots.
    pub fn membership(&self, v: &[i64]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::mismatch(format!("vector of length {} in Z^{}", v.len(), self.dim)));
        }
        Ok(self.contains_vec(v))
    }

    fn contains_vec(&self, v: &[i64]) -> bool {
        let mut rest: Vec<i128> = v.iter().map(|&c| c as i128).collect();
        let mut next_col = 0;
        for (row, (c, p)) in self.basis.iter().zip(self.pivots()) {
            if rest[next_col..c].iter().any(|&x| x != 0) {
                return false;
            }
            if rest[c] % p as i128 != 0 {
                return false;
            }
            let q = rest[c] / p as i128;
            for (o, &x) in rest.iter_mut().zip(row) {
                *o -= q * x as i128;
            }
            next_col = c + 1;
        }
        rest.iter().all(|&x| x == 0)
    }

    pub fn index(&self) -> Index {
        if self.rank() == self.dim {
            Index::Finite(self.pivots().iter().map(|&(_, p)| p as u64).product())
        } else {
            Index::Infinite
        }
    }

    /// Cantor–Bendixson erasing rank `d − rk(H) + 1`.
    pub fn cb_erasing_rank(&self) -> usize {
        self.dim - self.rank() + 1
    }

    /// `⟨H, v⟩`.
    pub fn join_vector(&self, v: &[i64]) -> Result<Self> {
        let mut gens = self.basis.clone();
        gens.push(v.to_vec());
        Self::from_generators(self.dim, &gens)
    }

    /// First standard basis vector outside the rational span of `H`.
    pub fn independent_direction(&self) -> Option<Vec<i64>> {
        (0..self.dim).find_map(|j| {
            let mut e = vec![0; self.dim];
            e[j] = 1;
            let grown = self.join_vector(&e).ok()?;
            (grown.rank() > self.rank()).then_some(e)
        })
    }

    /// The sequence `H_m = ⟨H, m·v⟩` converging to `H`.
    pub fn witness_sequence(&self) -> Result<WitnessSequence> {
        let direction = self.independent_direction().ok_or_else(|| {
            Error::NoWitness(format!(
                "rank {} subgroup of Z^{} has finite index and is isolated",
                self.rank(),
                self.dim
            ))
        })?;
        Ok(WitnessSequence { base: self.clone(), direction })
    }

    /// A depth-`depth` tree whose levels are certified witness sequences,
    /// exhibiting `H` in the `depth`-th derived set of Sub(Z^d).
    pub fn witness_chain(&self, depth: usize, max_radius: usize, budget: &Budget) -> Result<WitnessNode> {
        let corank = self.dim - self.rank();
        if depth > corank {
            return Err(Error::precondition(format!("depth {depth} exceeds corank {corank}")));
        }
        self.chain_node(depth, max_radius, budget)
    }

    fn chain_node(&self, depth: usize, max_radius: usize, budget: &Budget) -> Result<WitnessNode> {
        if depth == 0 {
            return Ok(WitnessNode {
                subgroup: self.clone(),
                direction: None,
                children: Vec::new(),
                certified_at: Vec::new(),
            });
        }
        let seq = self.witness_sequence()?;
        let terms = seq.terms_until_stable(max_radius, 3, budget)?;
        // One distance per term at the largest radius determines the
        // certificate at every smaller radius.
        let mut rho = Vec::with_capacity(terms.len());
        for t in &terms {
            rho.push(chabauty::distance_up_to(t, self, max_radius, budget)?);
        }
        let certified_at: Vec<usize> = (0..=max_radius)
            .map(|radius| {
                1 + rho.iter().rposition(|d| matches!(d, Distance::Exact(e) if *e <= radius)).map_or(0, |i| i + 1)
            })
            .collect();
        if let Some(&last) = certified_at.last() {
            if last > terms.len() {
                return Err(Error::NoWitness(format!(
                    "witness sequence for {:?} does not settle at radius {max_radius}",
                    self.basis
                )));
            }
        }
        if chabauty::nontrivial_flags(&terms, self).iter().any(|&f| !f) {
            return Err(Error::NoWitness("witness sequence has a stationary term".into()));
        }
        let children = terms.iter().map(|t| t.chain_node(depth - 1, max_radius, budget)).collect::<Result<Vec<_>>>()?;
        Ok(WitnessNode { subgroup: self.clone(), direction: Some(seq.direction), children, certified_at })
    }
}

impl Subgroup for HnfSubgroup {
    type Space = Lattice;

    fn space(&self) -> Lattice {
        Lattice::new(self.dim)
    }

    fn contains(&self, x: &Vec<i64>) -> bool {
        x.len() == self.dim && self.contains_vec(x)
    }
}

/// `m ↦ ⟨H, m·v⟩` for a direction `v` outside the span of `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSequence {
    pub base: HnfSubgroup,
    pub direction: Vec<i64>,
}

impl WitnessSequence {
    pub fn term(&self, m: i64) -> HnfSubgroup {
        let v: Vec<i64> = self.direction.iter().map(|&c| c * m).collect();
        self.base.join_vector(&v).expect("dimensions agree")
    }

    pub fn terms(&self, count: usize) -> Vec<HnfSubgroup> {
        (1..=count as i64).map(|m| self.term(m)).collect()
    }

    /// Terms `1..=M`, where the last `window` terms all agree with the base on
    /// the ball of radius `radius`.
    pub fn terms_until_stable(&self, radius: usize, window: usize, budget: &Budget) -> Result<Vec<HnfSubgroup>> {
        const MAX_TERMS: usize = 4096;
        let mut terms = Vec::new();
        let mut run = 0;
        while run < window {
            if terms.len() >= MAX_TERMS {
                return Err(Error::Budget { what: "witness sequence terms", limit: MAX_TERMS as u128 });
            }
            let t = self.term(terms.len() as i64 + 1);
            let agrees = chabauty::first_disagreement(&self.base, &t, radius, budget)?.is_none();
            run = if agrees { run + 1 } else { 0 };
            terms.push(t);
        }
        Ok(terms)
    }
}

/// One node of a witness tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessNode {
    pub subgroup: HnfSubgroup,
    pub direction: Option<Vec<i64>>,
    pub children: Vec<WitnessNode>,
    /// `certified_at[L]`: first term index from which the children agree with
    /// this node on the ball of radius `L`.
    pub certified_at: Vec<usize>,
}

impl WitnessNode {
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(WitnessNode::node_count).sum::<usize>()
    }

    pub fn leaves(&self) -> Vec<&WitnessNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    /// Visits every internal node with its depth.
    pub fn visit_internal(
        &self,
        depth: usize,
        f: &mut impl FnMut(usize, &WitnessNode) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if self.children.is_empty() {
            return ControlFlow::Continue(());
        }
        f(depth, self)?;
        for c in &self.children {
            c.visit_internal(depth + 1, f)?;
        }
        ControlFlow::Continue(())
    }
}

/// All subgroups of Z^d of index at most `max_index`, each once, ordered by
/// index then basis.
pub fn enumerate_by_index(dim: usize, max_index: u64) -> Result<Vec<HnfSubgroup>> {
    if dim == 0 {
        return Err(Error::malformed("lattice dimension must be at least 1"));
    }
    if dim > 4 {
        return Err(Error::Budget { what: "enumeration dimension", limit: 4 });
    }
    if max_index > 200 {
        return Err(Error::Budget { what: "enumeration index", limit: 200 });
    }
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(dim);
    enumerate_pivots(dim, max_index, &mut pivots, &mut out);
    out.sort_by(|a: &HnfSubgroup, b| (a.index_value(), &a.basis).cmp(&(b.index_value(), &b.basis)));
    Ok(out)
}

impl HnfSubgroup {
    fn index_value(&self) -> u64 {
        match self.index() {
            Index::Finite(n) => n,
            Index::Infinite => u64::MAX,
        }
    }
}

fn enumerate_pivots(dim: usize, budget: u64, pivots: &mut Vec<i64>, out: &mut Vec<HnfSubgroup>) {
    if pivots.len() == dim {
        let mut rows: Vec<Vec<i64>> =
            (0..dim).map(|i| (0..dim).map(|j| if i == j { pivots[i] } else { 0 }).collect()).collect();
        fill_above(&mut rows, pivots, 0, 1, out, dim);
        return;
    }
    for p in 1..=budget {
        pivots.push(p as i64);
        enumerate_pivots(dim, budget / p, pivots, out);
        pivots.pop();
    }
}

/// Chooses every entry `rows[i][j]`, `i < j`, in `[0, pivots[j])`.
fn fill_above(rows: &mut Vec<Vec<i64>>, pivots: &[i64], i: usize, j: usize, out: &mut Vec<HnfSubgroup>, dim: usize) {
    if i + 1 >= dim {
        out.push(HnfSubgroup { dim, basis: rows.clone() });
        return;
    }
    if j >= dim {
        fill_above(rows, pivots, i + 1, i + 2, out, dim);
        return;
    }
    for x in 0..pivots[j] {
        rows[i][j] = x;
        fill_above(rows, pivots, i, j + 1, out, dim);
    }
    rows[i][j] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hnf(dim: usize, v: &[&[i64]]) -> HnfSubgroup {
        HnfSubgroup::from_generators(dim, &v.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(2, &[&[2, 0], &[0, 3], &[1, 1]]), HnfSubgroup::full(2));
        let z = hnf(2, &[]);
        assert_eq!(z.rank(), 0);
        assert_eq!(z, HnfSubgroup::zero(2));
        assert_eq!(hnf(2, &[&[2, 0], &[0, 2]]).basis(), &[vec![2, 0], vec![0, 2]]);
        assert_eq!(hnf(2, &[&[0, 2], &[2, 0]]).basis(), &[vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn hnf_normal_form_conditions() {
        let h = hnf(3, &[&[3, 5, -7], &[-6, 2, 4], &[9, 1, 1]]);
        let piv = h.pivots();
        assert!(piv.windows(2).all(|p| p[0].0 < p[1].0));
        for (i, &(c, p)) in piv.iter().enumerate() {
            assert!(p > 0);
            for row in &h.basis()[..i] {
                assert!((0..p).contains(&row[c]));
            }
        }
        assert!(h.contains(&vec![3, 5, -7]));
        assert!(h.contains(&vec![-6, 2, 4]));
    }

    #[test]
    fn membership_examples() {
        let h = hnf(2, &[&[2, 0], &[0, 3]]);
        assert!(h.membership(&[4, 3]).unwrap());
        assert!(!h.membership(&[1, 0]).unwrap());
        assert!(HnfSubgroup::zero(2).membership(&[0, 0]).unwrap());
        assert!(h.membership(&[1, 0, 0]).is_err());
    }

    #[test]
    fn index_examples() {
        assert_eq!(hnf(2, &[&[2, 0], &[0, 3]]).index(), Index::Finite(6));
        assert_eq!(hnf(2, &[&[1, 0]]).index(), Index::Infinite);
        assert_eq!(HnfSubgroup::full(4).index(), Index::Finite(1));
    }

    #[test]
    fn erasing_rank_values() {
        assert_eq!(HnfSubgroup::zero(3).cb_erasing_rank(), 4);
        assert_eq!(hnf(2, &[&[1, 0]]).cb_erasing_rank(), 2);
        assert_eq!(hnf(2, &[&[2, 1], &[0, 5]]).cb_erasing_rank(), 1);
    }

    #[test]
    fn witness_sequence_examples() {
        let s = HnfSubgroup::zero(1).witness_sequence().unwrap();
        assert_eq!(s.direction, vec![1]);
        assert_eq!(s.term(4), hnf(1, &[&[4]]));
        let s = hnf(2, &[&[1, 0]]).witness_sequence().unwrap();
        assert_eq!(s.direction, vec![0, 1]);
        assert_eq!(s.term(3), hnf(2, &[&[1, 0], &[0, 3]]));
        assert!(matches!(HnfSubgroup::full(2).witness_sequence(), Err(Error::NoWitness(_))));
    }

    #[test]
    fn independent_direction_ignores_pivot_positions() {
        // (1,0) is outside the span of (1,1) even though column 0 has a pivot.
        assert_eq!(hnf(2, &[&[1, 1]]).independent_direction(), Some(vec![1, 0]));
    }

    #[test]
    fn witness_chain_examples() {
        let budget = Budget::default();
        let t = HnfSubgroup::zero(2).witness_chain(2, 4, &budget).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.children[2].subgroup, hnf(2, &[&[3, 0]]));
        assert_eq!(t.children[2].children[1].subgroup, hnf(2, &[&[3, 0], &[0, 2]]));
        assert!(t.leaves().iter().all(|l| l.subgroup.rank() == 2));
        let t0 = HnfSubgroup::zero(2).witness_chain(0, 4, &budget).unwrap();
        assert_eq!(t0.node_count(), 1);
        let t3 = hnf(3, &[&[1, 0, 0]]).witness_chain(2, 3, &budget).unwrap();
        assert!(t3.leaves().iter().all(|l| l.subgroup.rank() == 3));
        assert!(hnf(3, &[&[1, 0, 0]]).witness_chain(3, 3, &budget).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let two: Vec<_> =
            enumerate_by_index(2, 2).unwrap().into_iter().filter(|h| h.index() == Index::Finite(2)).collect();
        assert_eq!(two.len(), 3);
        let z = enumerate_by_index(1, 5).unwrap();
        assert_eq!(z.iter().map(|h| h.basis()[0][0]).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        assert!(enumerate_by_index(5, 2).unwrap_err().is_budget());
        assert!(enumerate_by_index(2, 201).unwrap_err().is_budget());
    }

    #[test]
    fn enumeration_is_canonical() {
        for h in enumerate_by_index(3, 12).unwrap() {
            assert_eq!(HnfSubgroup::from_generators(3, h.basis()).unwrap(), h);
        }
    }

    #[test]
    fn lattice_spheres() {
        let z2 = Lattice::new(2);
        assert_eq!(z2.sphere(1), vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
        for d in 1..=3 {
            let l = Lattice::new(d);
            for r in 0..=6 {
                assert_eq!(Some(l.ball(r, &Budget::default()).unwrap().len() as u128), l.ball_size(r));
            }
        }
    }

    #[test]
    fn reduce_gives_coset_representatives() {
        let h = hnf(2, &[&[2, 1], &[0, 3]]);
        let a = h.reduce(&[5, 7]);
        let b = h.reduce(&[5 - 2, 7 - 1 + 3]);
        assert_eq!(a, b);
        assert!((0..2).contains(&a[0]) && (0..3).contains(&a[1]));
    }
}
