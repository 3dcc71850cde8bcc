//! Brute-force maximum one-to-one matching and random tag sets.

use morphtag::analysis::{MatchPredicate, Tag};
use rand::Rng;

/// Size of a largest matching, trying every partner for every reference tag.
pub fn max_matching(a: &[Tag], b: &[Tag], pred: MatchPredicate) -> usize {
    fn go(i: usize, a: &[Tag], b: &[Tag], used: &mut Vec<bool>, pred: MatchPredicate) -> usize {
        if i == a.len() {
            return 0;
        }
        let mut best = go(i + 1, a, b, used, pred);
        for j in 0..b.len() {
            if !used[j] && a[i].label == b[j].label && pred.holds(&a[i], &b[j]) {
                used[j] = true;
                best = best.max(1 + go(i + 1, a, b, used, pred));
                used[j] = false;
            }
        }
        best
    }
    go(0, a, b, &mut vec![false; b.len()], pred)
}

/// Up to `n` tags with labels X/Y inside a 30-character document.
pub fn random_tags<R: Rng>(rng: &mut R, n: usize) -> Vec<Tag> {
    let count = rng.gen_range(0..=n);
    (0..count)
        .map(|_| {
            let index = rng.gen_range(0..28);
            let length = rng.gen_range(1..=(30 - index).min(8));
            Tag::new(index, length, if rng.gen_bool(0.7) { "X" } else { "Y" })
        })
        .collect()
}
