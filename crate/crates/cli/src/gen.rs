//! Seeded random words. Uniform words draw generators i.i.d. with a random
//! sign; identity words hide relators inside `u · u⁻¹`.

use mcg_core::braid::{artin_relators, ArtinGenerator};
use mcg_core::mcg_punctured::{relators, PuncturedGenerator};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_braid<R: Rng>(rng: &mut R, n: usize, len: usize) -> Vec<ArtinGenerator> {
    (0..len).map(|_| ArtinGenerator::new(rng.gen_range(1..n), rng.gen())).collect()
}

pub fn uniform_mcg<R: Rng>(rng: &mut R, g: usize, len: usize) -> Vec<PuncturedGenerator> {
    let all = PuncturedGenerator::all(g);
    (0..len).map(|_| *all.choose(rng).unwrap()).collect()
}

/// A word of length at most `max` that is trivial in the group: `u · u⁻¹`
/// with rotated relators (or their inverses) spliced in at random places.
fn hidden_identity<T: Copy, R: Rng>(
    rng: &mut R,
    max: usize,
    alphabet: &[T],
    rels: &[Vec<T>],
    inv: impl Fn(T) -> T,
) -> Vec<T> {
    let longest = rels.iter().map(Vec::len).max().unwrap_or(0);
    let half = max.saturating_sub(longest) / 2;
    let k = rng.gen_range(0..=half);
    let u: Vec<T> = (0..k).map(|_| *alphabet.choose(rng).unwrap()).collect();
    let mut w: Vec<T> = u.iter().copied().chain(u.iter().rev().map(|&x| inv(x))).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let Some(r) = rels.choose(rng) else { break };
        if w.len() + r.len() > max {
            break;
        }
        let mut r = r.clone();
        let s = rng.gen_range(0..r.len());
        r.rotate_left(s);
        if rng.gen() {
            r = r.iter().rev().map(|&x| inv(x)).collect();
        }
        let at = rng.gen_range(0..=w.len());
        w.splice(at..at, r);
    }
    w
}

pub fn identity_braid<R: Rng>(rng: &mut R, n: usize, max: usize) -> Vec<ArtinGenerator> {
    hidden_identity(rng, max, &ArtinGenerator::all(n), &artin_relators(n), |s| s.inv())
}

pub fn identity_mcg<R: Rng>(rng: &mut R, g: usize, max: usize) -> Vec<PuncturedGenerator> {
    hidden_identity(rng, max, &PuncturedGenerator::all(g), &relators(g), |h| h.inv())
}

/// Test mix: half uniform words of length `1..=max`, half hidden identities.
pub fn mixed_braid<R: Rng>(rng: &mut R, n: usize, max: usize) -> Vec<ArtinGenerator> {
    if rng.gen() {
        let len = rng.gen_range(1..=max);
        uniform_braid(rng, n, len)
    } else {
        identity_braid(rng, n, max)
    }
}

pub fn mixed_mcg<R: Rng>(rng: &mut R, g: usize, max: usize) -> Vec<PuncturedGenerator> {
    if rng.gen() {
        let len = rng.gen_range(1..=max);
        uniform_mcg(rng, g, len)
    } else {
        identity_mcg(rng, g, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcg_core::oracle::{artin_identity_check, punctured_identity_check};

    #[test]
    fn identities_are_identities() {
        let mut r = rng(5);
        for _ in 0..50 {
            let w = identity_braid(&mut r, 5, 30);
            assert!(w.len() <= 30);
            assert!(artin_identity_check(5, &w));
            let w = identity_mcg(&mut r, 3, 20);
            assert!(w.len() <= 20);
            assert!(punctured_identity_check(3, &w));
        }
    }

    #[test]
    fn seeded() {
        assert_eq!(uniform_braid(&mut rng(9), 6, 40), uniform_braid(&mut rng(9), 6, 40));
        assert_ne!(uniform_mcg(&mut rng(9), 3, 40), uniform_mcg(&mut rng(10), 3, 40));
    }
}
