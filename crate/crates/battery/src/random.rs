//! Seeded generators for random words, subgroups and clopen sets.

use chabauty_lab::{ClopenSet, GroupContext, Index, StallingsGraph, Subgroup, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracles::{ball, word};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// A reduced word of exactly `len` letters.
pub fn reduced_word(rng: &mut impl Rng, rank: i32, len: usize) -> Word {
    let mut raw: Vec<i32> = Vec::with_capacity(len);
    while raw.len() < len {
        let g = rng.gen_range(1..=rank);
        let x = if rng.gen_bool(0.5) { g } else { -g };
        if raw.last() != Some(&-x) {
            raw.push(x);
        }
    }
    word(&raw)
}

/// `⟨w_1, …, w_m⟩` with `m ≤ max_gens` and `1 ≤ |w_i| ≤ max_len`.
pub fn subgroup(rng: &mut impl Rng, rank: usize, max_gens: usize, max_len: usize) -> (Vec<Word>, StallingsGraph) {
    let m = rng.gen_range(1..=max_gens);
    let gens: Vec<Word> = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            reduced_word(rng, rank as i32, len)
        })
        .collect();
    let h = StallingsGraph::from_generators(GroupContext::free(rank).expect("rank is positive"), &gens)
        .expect("generators fit the rank");
    (gens, h)
}

/// Rejection sampling of infinite-index subgroups.
pub fn infinite_index_subgroup(
    rng: &mut impl Rng,
    rank: usize,
    max_gens: usize,
    max_len: usize,
) -> (Vec<Word>, StallingsGraph) {
    loop {
        let (gens, h) = subgroup(rng, rank, max_gens, max_len);
        if h.index() == Index::Infinite {
            return (gens, h);
        }
    }
}

/// A clopen set containing `lambda`: up to two nontrivial elements of
/// `lambda` of length at most 4 inside, one to three words of length at most
/// 4 outside.
pub fn clopen_around(rng: &mut impl Rng, rank: usize, lambda: &StallingsGraph) -> ClopenSet {
    let short: Vec<Word> =
        ball(rank as i32, 4).iter().skip(1).map(|u| word(u)).filter(|x| lambda.contains(x)).collect();
    let n_in = rng.gen_range(0..=2.min(short.len()));
    let ins: Vec<Word> = short.choose_multiple(rng, n_in).cloned().collect();
    let n_out = rng.gen_range(1..=3);
    let mut outs = Vec::new();
    while outs.len() < n_out {
        let len = rng.gen_range(1..=4);
        let x = reduced_word(rng, rank as i32, len);
        if !lambda.contains(&x) {
            outs.push(x);
        }
    }
    ClopenSet::new(ins, outs).expect("ins and outs are separated by lambda")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_are_reduced_and_reproducible() {
        let mut a = rng(7, 1);
        let mut b = rng(7, 1);
        for len in 0..10 {
            let x = reduced_word(&mut a, 2, len);
            assert_eq!(x.len(), len);
            assert_eq!(x, reduced_word(&mut b, 2, len));
        }
    }

    #[test]
    fn clopen_sets_contain_their_subgroup() {
        let mut r = rng(3, 0);
        for _ in 0..20 {
            let (_, h) = infinite_index_subgroup(&mut r, 2, 2, 4);
            let v = clopen_around(&mut r, 2, &h);
            assert!(chabauty_lab::chabauty::in_clopen(&h, &v));
        }
    }
}
