//! Permutations of `2^m`, the dump involution and the dyadic odometer.

use std::collections::BTreeSet;

use crate::cantor::Word;
use crate::error::{Error, Result};

use super::tree::TemplateWord;

/// A permutation of the words of length `m`, stored on lexicographic ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPermutation {
    m: usize,
    images: Vec<u32>,
}

impl WordPermutation {
    pub fn identity(m: usize) -> Self {
        WordPermutation { m, images: (0..1u32 << m).collect() }
    }

    pub fn from_images(m: usize, images: Vec<u32>) -> Result<Self> {
        if images.len() != 1usize << m {
            return Err(Error::LengthMismatch { expected: 1 << m, got: images.len() });
        }
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("image {i} out of range")))?;
            if *slot {
                return Err(Error::InvalidArgument(format!("image {i} repeated")));
            }
            *slot = true;
        }
        Ok(WordPermutation { m, images })
    }

    pub fn word_len(&self) -> usize {
        self.m
    }

    pub fn apply_index(&self, i: u32) -> u32 {
        self.images[i as usize]
    }

    pub fn apply(&self, w: &Word) -> Word {
        assert_eq!(w.len(), self.m);
        Word::from_index(self.images[w.index() as usize] as u64, self.m)
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_involution(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| self.images[j as usize] as usize == i)
    }

    pub fn fixed_points(&self) -> Vec<u32> {
        (0..self.images.len() as u32).filter(|&i| self.images[i as usize] == i).collect()
    }

    /// Cycle lengths, one entry per cycle, ordered by smallest member.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize;
                len += 1;
            }
            out.push(len);
        }
        out
    }
}

/// Identity on `p`; pairs the lexicographically ordered complement
/// `(r1 r2)(r3 r4)...`, leaving the last element fixed when it is odd.
pub fn dump_involution(m: usize, p: &BTreeSet<Word>) -> Result<WordPermutation> {
    check_words(m, p)?;
    let mut images: Vec<u32> = (0..1u32 << m).collect();
    let rest: Vec<u32> = (0..1u32 << m)
        .filter(|&i| !p.contains(&Word::from_index(i as u64, m)))
        .collect();
    for pair in rest.chunks_exact(2) {
        images[pair[0] as usize] = pair[1];
        images[pair[1] as usize] = pair[0];
    }
    Ok(WordPermutation { m, images })
}

/// Cyclic successor on `p` in lexicographic order; identity elsewhere.
pub fn cyclic_successor(m: usize, p: &BTreeSet<Word>) -> Result<WordPermutation> {
    check_words(m, p)?;
    let mut images: Vec<u32> = (0..1u32 << m).collect();
    let ranks: Vec<u32> = p.iter().map(|w| w.index() as u32).collect();
    for (j, &r) in ranks.iter().enumerate() {
        images[r as usize] = ranks[(j + 1) % ranks.len()];
    }
    Ok(WordPermutation { m, images })
}

/// The block permutation of the dump version: cycle through `p`, apply the
/// dump involution off `p`.
pub fn dump_block_permutation(m: usize, p: &BTreeSet<Word>) -> Result<WordPermutation> {
    let inv = dump_involution(m, p)?;
    let succ = cyclic_successor(m, p)?;
    let images = (0..1u32 << m)
        .map(|i| if p.contains(&Word::from_index(i as u64, m)) { succ.images[i as usize] } else { inv.images[i as usize] })
        .collect();
    Ok(WordPermutation { m, images })
}

/// Add one with carry along the star coordinates of `u` (first star least
/// significant); non-star coordinates are fixed. A carry out of the last
/// star is dropped, so the star coordinates cycle with period `2^k`.
pub fn dyadic_odometer(m: usize, u: &TemplateWord) -> Result<WordPermutation> {
    if u.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: u.len() });
    }
    let stars = u.star_positions();
    let images = (0..1u32 << m)
        .map(|i| {
            let mut w = Word::from_index(i as u64, m);
            odometer_step(&mut w, &stars);
            w.index() as u32
        })
        .collect();
    Ok(WordPermutation { m, images })
}

pub(crate) fn odometer_step(w: &mut Word, stars: &[usize]) {
    for &pos in stars {
        let b = w.get(pos);
        w.set(pos, !b);
        if !b {
            break;
        }
    }
}

fn check_words(m: usize, p: &BTreeSet<Word>) -> Result<()> {
    if m > 24 {
        return Err(Error::InvalidArgument("block length too large".into()));
    }
    match p.iter().find(|w| w.len() != m) {
        Some(w) => Err(Error::LengthMismatch { expected: m, got: w.len() }),
        None => Ok(()),
    }
}
