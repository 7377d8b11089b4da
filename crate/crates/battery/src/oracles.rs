//! Reference computations that share nothing with the library beyond the
//! membership tests under scrutiny. Words here are plain `Vec<i32>` with
//! signed generators.

use std::collections::{BTreeSet, HashSet};

use chabauty_lab::{Letter, Word};
use num_rational::Ratio;

pub type Raw = Vec<i32>;

pub fn raw(w: &Word) -> Raw {
    w.letters().iter().map(|l| if l.is_inverse() { -(l.generator() as i32) } else { l.generator() as i32 }).collect()
}

pub fn word(r: &[i32]) -> Word {
    Word::reduce(&r.iter().map(|&x| Letter::new(x.unsigned_abs(), x < 0)).collect::<Vec<_>>())
}

/// Free reduction of `u · v`.
pub fn mul(u: &[i32], v: &[i32]) -> Raw {
    let mut out = u.to_vec();
    for &x in v {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inv(u: &[i32]) -> Raw {
    u.iter().rev().map(|x| -x).collect()
}

/// All reduced words of length at most `radius`, by length.
pub fn ball(rank: i32, radius: usize) -> Vec<Raw> {
    let letters: Vec<i32> = (1..=rank).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Raw> = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for u in &layer {
            for &x in &letters {
                if u.last() != Some(&-x) {
                    let mut v = u.clone();
                    v.push(x);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Longest word handled by [`closure`].
const MAX_BOUND: usize = 16;

#[derive(Clone, Copy)]
struct Short {
    len: usize,
    letters: [i8; MAX_BOUND],
}

impl Short {
    fn new(u: &[i32]) -> Self {
        let mut letters = [0; MAX_BOUND];
        for (slot, &x) in letters.iter_mut().zip(u) {
            *slot = x as i8;
        }
        Short { len: u.len(), letters }
    }

    fn inverse(&self) -> Self {
        let mut letters = [0; MAX_BOUND];
        for i in 0..self.len {
            letters[i] = -self.letters[self.len - 1 - i];
        }
        Short { len: self.len, letters }
    }

    /// `self · other` if it has length at most `bound`.
    fn mul(&self, other: &Short, bound: usize) -> Option<Short> {
        let mut c = 0;
        while c < self.len && c < other.len && self.letters[self.len - 1 - c] == -other.letters[c] {
            c += 1;
        }
        let len = self.len + other.len - 2 * c;
        if len > bound {
            return None;
        }
        let mut letters = self.letters;
        letters[self.len - c..len].copy_from_slice(&other.letters[c..other.len]);
        Some(Short { len, letters })
    }

    /// Position among all words of length at most `bound` over `2·rank` letters.
    fn key(&self, rank: i32) -> usize {
        let base = 2 * rank as usize;
        let offset: usize = (0..self.len).map(|l| base.pow(l as u32)).sum();
        let value = self.letters[..self.len].iter().fold(0, |acc, &x| {
            let digit = 2 * (x.unsigned_abs() as usize - 1) + usize::from(x < 0);
            acc * base + digit
        });
        offset + value
    }

    fn to_raw(self) -> Raw {
        self.letters[..self.len].iter().map(|&x| i32::from(x)).collect()
    }
}

/// The closure of the generators under products and inverses, keeping only
/// words of length at most `bound`.
pub fn closure(rank: i32, gens: &[Raw], bound: usize) -> HashSet<Raw> {
    assert!(bound <= MAX_BOUND, "closure bound above {MAX_BOUND}");
    let base = 2 * rank as usize;
    let mut seen = vec![false; (0..=bound).map(|l| base.pow(l as u32)).sum()];
    let mut elems: Vec<Short> = Vec::new();
    let mut add = |x: Short, elems: &mut Vec<Short>| {
        for y in [x, x.inverse()] {
            let k = y.key(rank);
            if !seen[k] {
                seen[k] = true;
                elems.push(y);
            }
        }
    };
    add(Short::new(&[]), &mut elems);
    for g in gens.iter().filter(|g| g.len() <= bound) {
        add(Short::new(g), &mut elems);
    }
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i];
        for j in 0..=i {
            let y = elems[j];
            for z in [x.mul(&y, bound), y.mul(&x, bound)].into_iter().flatten() {
                add(z, &mut elems);
            }
        }
        i += 1;
    }
    elems.into_iter().map(Short::to_raw).collect()
}

/// Right cosets `Hg` found by breadth-first search, comparing
/// representatives through `member(u·v⁻¹)`. `None` if more than `cap`.
pub fn coset_count(rank: i32, member: impl Fn(&Word) -> bool, cap: usize) -> Option<usize> {
    let letters: Vec<i32> = (1..=rank).flat_map(|g| [g, -g]).collect();
    let mut reps: Vec<Raw> = vec![Vec::new()];
    let mut i = 0;
    while i < reps.len() {
        for &x in &letters {
            let y = mul(&reps[i], &[x]);
            if !reps.iter().any(|r| member(&word(&mul(&y, &inv(r))))) {
                if reps.len() == cap {
                    return None;
                }
                reps.push(y);
            }
        }
        i += 1;
    }
    Some(reps.len())
}

/// Length of a shortest word of length at most `radius` on which the two
/// membership tests differ.
pub fn first_difference_len(
    rank: i32,
    radius: usize,
    a: impl Fn(&Word) -> bool,
    b: impl Fn(&Word) -> bool,
) -> Option<usize> {
    ball(rank, radius)
        .into_iter()
        .find(|u| {
            let w = word(u);
            a(&w) != b(&w)
        })
        .map(|u| u.len())
}

/// Rank over Q of a list of integer vectors.
pub fn rational_rank(vectors: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<Ratio<i128>>> =
        vectors.iter().map(|v| v.iter().map(|&x| Ratio::from_integer(x as i128)).collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != Ratio::from_integer(0)) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != Ratio::from_integer(0) {
                let f = rows[r][c] / rows[rank][c];
                for k in 0..cols {
                    let sub = f * rows[rank][k];
                    rows[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Subgroups of order `n` in `(Z/n)²`, i.e. index-`n` subgroups of `Z²`
/// (each contains `nZ²`), found by closing every pair of generators.
pub fn index_n_sublattices_of_z2(n: i64) -> usize {
    let mut found: HashSet<BTreeSet<(i64, i64)>> = HashSet::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut set = BTreeSet::new();
                    for i in 0..n {
                        for j in 0..n {
                            set.insert(((i * a + j * c) % n, (i * b + j * d) % n));
                        }
                    }
                    if set.len() as i64 == n {
                        found.insert(set);
                    }
                }
            }
        }
    }
    found.len()
}

pub fn divisor_sum(n: u64) -> u64 {
    (1..=n).filter(|a| n.is_multiple_of(*a)).sum()
}

/// `|γB △ B| / |B|` for `B = {φ(g) : g ∈ points}` in `Z`, where `φ` counts
/// exponents of the first generator.
pub fn line_folner_ratio(points: &[Word], gamma: &Word) -> Ratio<u64> {
    let phi = |w: &Word| raw(w).iter().map(|&x| if x.abs() == 1 { x.signum() as i64 } else { 0 }).sum::<i64>();
    let set: BTreeSet<i64> = points.iter().map(phi).collect();
    let shifted: BTreeSet<i64> = set.iter().map(|x| x + phi(gamma)).collect();
    let sym = set.symmetric_difference(&shifted).count() as u64;
    Ratio::new(sym, set.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(2, 0).len(), 1);
        assert_eq!(ball(2, 1).len(), 5);
        assert_eq!(ball(2, 2).len(), 17);
        assert_eq!(ball(3, 1).len(), 7);
    }

    #[test]
    fn closure_of_a_square() {
        let c = closure(2, &[vec![1, 1]], 6);
        assert!(c.contains(&vec![1, 1, 1, 1]));
        assert!(!c.contains(&vec![1]));
        assert_eq!(c.len(), 7);
        let full = closure(2, &[vec![-2, 1, -2, -2], vec![1, -2, -2]], 8);
        assert!(full.contains(&vec![1; 8]));
        assert_eq!(full.len(), ball(2, 8).len());
    }

    #[test]
    fn small_oracles() {
        assert_eq!(divisor_sum(12), 28);
        assert_eq!(index_n_sublattices_of_z2(2), 3);
        assert_eq!(index_n_sublattices_of_z2(4), 7);
        assert_eq!(rational_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rational_rank(&[vec![1, 2], vec![2, 3]]), 2);
        assert_eq!(coset_count(2, |w| raw(w).iter().filter(|x| x.abs() == 1).count() % 2 == 0, 10), Some(2));
    }
}
