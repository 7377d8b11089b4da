//! Ambient groups with a word metric, and membership-capable subgroups.

use std::fmt;
use std::hash::Hash;
use std::ops::ControlFlow;

use crate::budget::Budget;
use crate::error::Result;
use crate::words::{free_ball_size, next_sphere, GroupContext, Letter, Word};

/// A countable group with a proper length function, enumerable by spheres.
pub trait Space: Clone + PartialEq + fmt::Debug {
    type Element: Clone + Ord + Hash + fmt::Debug;

    fn identity(&self) -> Self::Element;

    fn inverse(&self, x: &Self::Element) -> Self::Element;

    fn length(&self, x: &Self::Element) -> usize;

    /// Elements of length exactly `radius`, in canonical order.
    fn sphere(&self, radius: usize) -> Vec<Self::Element>;

    /// `|B(id, radius)|`, or `None` when it does not fit in a `u128`.
    fn ball_size(&self, radius: usize) -> Option<u128>;

    /// A space containing both, if the two are comparable.
    fn common(&self, other: &Self) -> Option<Self> {
        (self == other).then(|| self.clone())
    }

    /// Visits spheres `0..=radius` in order, stopping early on `Break`.
    fn visit_spheres<B>(
        &self,
        radius: usize,
        budget: &Budget,
        mut f: impl FnMut(usize, &[Self::Element]) -> ControlFlow<B>,
    ) -> Result<Option<B>> {
        budget.check_ball(self.ball_size(radius))?;
        for k in 0..=radius {
            if let ControlFlow::Break(b) = f(k, &self.sphere(k)) {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }

    /// The whole ball in canonical order.
    fn ball(&self, radius: usize, budget: &Budget) -> Result<Vec<Self::Element>> {
        let mut out = Vec::new();
        self.visit_spheres::<()>(radius, budget, |_, s| {
            out.extend_from_slice(s);
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }
}

/// A subgroup of some [`Space`], known through its membership test.
pub trait Subgroup {
    type Space: Space;

    fn space(&self) -> Self::Space;

    fn contains(&self, x: &<Self::Space as Space>::Element) -> bool;
}

impl<T: Subgroup + ?Sized> Subgroup for &T {
    type Space = T::Space;

    fn space(&self) -> Self::Space {
        (**self).space()
    }

    fn contains(&self, x: &<Self::Space as Space>::Element) -> bool {
        (**self).contains(x)
    }
}

/// F_r with the word metric for the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeGroup {
    pub rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        assert!(rank >= 1, "free group rank must be at least 1");
        FreeGroup { rank }
    }

    pub fn context(&self) -> GroupContext {
        GroupContext::free(self.rank).expect("rank is positive")
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        Letter::all(self.rank)
    }
}

impl Space for FreeGroup {
    type Element = Word;

    fn identity(&self) -> Word {
        Word::identity()
    }

    fn inverse(&self, x: &Word) -> Word {
        x.inverse()
    }

    fn length(&self, x: &Word) -> usize {
        x.len()
    }

    fn sphere(&self, radius: usize) -> Vec<Word> {
        crate::words::sphere(self.rank, radius)
    }

    fn ball_size(&self, radius: usize) -> Option<u128> {
        free_ball_size(self.rank, radius)
    }

    fn common(&self, other: &Self) -> Option<Self> {
        Some(FreeGroup::new(self.rank.max(other.rank)))
    }

    fn visit_spheres<B>(
        &self,
        radius: usize,
        budget: &Budget,
        mut f: impl FnMut(usize, &[Word]) -> ControlFlow<B>,
    ) -> Result<Option<B>> {
        budget.check_ball(self.ball_size(radius))?;
        let mut sphere = vec![Word::identity()];
        for k in 0..=radius {
            if k > 0 {
                sphere = next_sphere(self.rank, &sphere);
            }
            if let ControlFlow::Break(b) = f(k, &sphere) {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }
}

/// F_∞ on generators `1, 2, 3, …` with the graded length in which generator
/// `i` has length `i`. Every ball is finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GradedFreeGroup;

impl GradedFreeGroup {
    fn spheres_upto(radius: usize) -> Vec<Vec<Word>> {
        let mut spheres: Vec<Vec<Word>> = vec![vec![Word::identity()]];
        for k in 1..=radius {
            let mut s = Vec::new();
            for g in 1..=k {
                for u in &spheres[k - g] {
                    for inv in [false, true] {
                        let l = Letter::new(g as u32, inv);
                        if u.last() != Some(l.inverse()) {
                            let mut letters = u.letters().to_vec();
                            letters.push(l);
                            s.push(Word::from_reduced(letters));
                        }
                    }
                }
            }
            s.sort();
            spheres.push(s);
        }
        spheres
    }
}

impl Space for GradedFreeGroup {
    type Element = Word;

    fn identity(&self) -> Word {
        Word::identity()
    }

    fn inverse(&self, x: &Word) -> Word {
        x.inverse()
    }

    fn length(&self, x: &Word) -> usize {
        x.graded_weight()
    }

    fn sphere(&self, radius: usize) -> Vec<Word> {
        Self::spheres_upto(radius).pop().unwrap_or_default()
    }

    fn ball_size(&self, radius: usize) -> Option<u128> {
        // Reduced words of weight k: count by last letter class.
        // ends[k][g] = number of weight-k reduced words ending in a fixed
        // signed letter of generator g.
        let mut total: Vec<u128> = vec![1];
        let mut ends: Vec<Vec<u128>> = vec![vec![0; radius + 1]];
        for k in 1..=radius {
            let mut row = vec![0u128; radius + 1];
            for g in 1..=k {
                let prev_total = total[k - g];
                let forbidden = ends[k - g][g];
                row[g] = prev_total.checked_sub(forbidden)?;
            }
            let sphere: u128 = row.iter().try_fold(0u128, |acc, &x| acc.checked_add(x.checked_mul(2)?))?;
            total.push(sphere);
            ends.push(row);
        }
        total.iter().try_fold(0u128, |acc, &x| acc.checked_add(x))
    }

    fn visit_spheres<B>(
        &self,
        radius: usize,
        budget: &Budget,
        mut f: impl FnMut(usize, &[Word]) -> ControlFlow<B>,
    ) -> Result<Option<B>> {
        budget.check_ball(self.ball_size(radius))?;
        for (k, s) in Self::spheres_upto(radius).iter().enumerate() {
            if let ControlFlow::Break(b) = f(k, s) {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }
}

/// Views a free-group subgroup as a point of Sub(F_∞) with the graded metric.
#[derive(Debug, Clone)]
pub struct Graded<T>(pub T);

impl<T: Subgroup<Space = FreeGroup>> Subgroup for Graded<T> {
    type Space = GradedFreeGroup;

    fn space(&self) -> GradedFreeGroup {
        GradedFreeGroup
    }

    fn contains(&self, x: &Word) -> bool {
        self.0.contains(x)
    }
}

/// Index of a subgroup: finite (with value) or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Index {
    Finite(u64),
    Infinite,
}

impl Index {
    pub fn is_finite(&self) -> bool {
        matches!(self, Index::Finite(_))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "infinite"),
        }
    }
}

/// Canonical label of a right coset `Hg`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CosetKey {
    /// Read `g` from the basepoint of a Stallings graph as far as possible:
    /// the vertex reached and the unread reduced tail.
    Graph { vertex: usize, tail: Word },
    /// Canonical representative of the coset in the target of a homomorphism.
    Residue(Vec<i64>),
}

/// A subgroup of F_r with exact right-coset labels, as needed by Schreier
/// graph construction.
pub trait FreeSubgroup: Subgroup<Space = FreeGroup> {
    /// Labels with `coset_key(u) == coset_key(v)` iff `u·v⁻¹ ∈ H`.
    fn coset_key(&self, g: &Word) -> CosetKey;

    /// A finite generating set, when one is known.
    fn finite_generators(&self) -> Option<Vec<Word>> {
        None
    }

    /// The homomorphism description, for subgroups given that way.
    fn as_hom(&self) -> Option<&crate::hom::HomSubgroup> {
        None
    }
}

impl<T: FreeSubgroup + ?Sized> FreeSubgroup for &T {
    fn coset_key(&self, g: &Word) -> CosetKey {
        (**self).coset_key(g)
    }

    fn finite_generators(&self) -> Option<Vec<Word>> {
        (**self).finite_generators()
    }

    fn as_hom(&self) -> Option<&crate::hom::HomSubgroup> {
        (**self).as_hom()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_ball_counts_match_enumeration() {
        let budget = Budget::default();
        for r in 0..=7 {
            let ball = GradedFreeGroup.ball(r, &budget).unwrap();
            assert_eq!(Some(ball.len() as u128), GradedFreeGroup.ball_size(r), "radius {r}");
            assert!(ball.iter().all(|w| w.graded_weight() <= r));
        }
        // weight 1: a, A; weight 2: aa, AA, b, B
        assert_eq!(GradedFreeGroup.ball_size(2), Some(7));
    }

    #[test]
    fn free_group_spheres_are_shortlex() {
        let ball = FreeGroup::new(2).ball(3, &Budget::default()).unwrap();
        assert_eq!(ball.len(), 53);
        assert!(ball.windows(2).all(|p| p[0] < p[1]));
    }
}
