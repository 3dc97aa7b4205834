#![allow(dead_code)]

use std::sync::Arc;

use quiver_poisson::coeff::{self, Coeff};
use quiver_poisson::necklace::{normalize, NecklaceElement};
use quiver_poisson::{FreeElement, Letter, Quiver, Word};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn loops2() -> Arc<Quiver> {
    Arc::new(Quiver::new(1, &[("x", 1, 1), ("y", 1, 1)]).unwrap())
}

pub fn q3() -> Arc<Quiver> {
    Arc::new(Quiver::new(2, &[("x", 1, 2), ("y", 1, 2), ("z", 1, 2)]).unwrap())
}

pub fn kronecker2() -> Arc<Quiver> {
    Arc::new(Quiver::new(2, &[("x", 1, 2), ("y", 1, 2)]).unwrap())
}

pub fn nk(src: &str, q: &Arc<Quiver>) -> NecklaceElement {
    NecklaceElement::parse(src, q).unwrap()
}

/// A random closed word of the given length and grade, if one is found.
pub fn random_closed_word<R: Rng>(q: &Quiver, len: usize, grade: usize, rng: &mut R) -> Option<Vec<Letter>> {
    if grade > len || len == 0 {
        return None;
    }
    let letters: Vec<Letter> = (0..q.num_arrows()).flat_map(|a| [Letter::Arrow(a), Letter::Dual(a)]).collect();
    for _ in 0..200 {
        let mut dual_slots: Vec<bool> = (0..len).map(|i| i < grade).collect();
        dual_slots.shuffle(rng);
        let mut word: Vec<Letter> = Vec::with_capacity(len);
        let mut ok = true;
        for &d in &dual_slots {
            let options: Vec<Letter> = letters
                .iter()
                .copied()
                .filter(|l| l.is_dual() == d)
                .filter(|l| word.last().is_none_or(|prev| q.tail(*prev) == q.head(*l)))
                .collect();
            match options.choose(rng) {
                Some(l) => word.push(*l),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && q.is_closed(&word) {
            return Some(word);
        }
    }
    None
}

/// A random homogeneous necklace element of the given grade with up to
/// `terms` monomials of length at most `max_len`.
pub fn random_necklace<R: Rng>(q: &Arc<Quiver>, grade: usize, max_len: usize, terms: usize, rng: &mut R) -> NecklaceElement {
    let mut f = FreeElement::zero(q.clone());
    for _ in 0..terms {
        let len = rng.gen_range(grade.max(1)..=max_len.max(grade.max(1)));
        if let Some(w) = random_closed_word(q, len, grade, rng) {
            f.add_term(Word::Path(w), small_coeff(rng));
        }
    }
    normalize(&f)
}

pub fn small_coeff<R: Rng>(rng: &mut R) -> Coeff {
    loop {
        let n: i64 = rng.gen_range(-3..=3);
        if n != 0 {
            return coeff::ratio(n, rng.gen_range(1..=2));
        }
    }
}
