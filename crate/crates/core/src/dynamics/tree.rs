//! Finite binary trees, template words over `{0,1,*}` and the
//! star-priority witness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cantor::Word;
use crate::error::{Error, Result};

/// Depth limit for trees built by enumeration.
pub const MAX_TREE_DEPTH: usize = 24;

/// A downward-closed set of words, truncated at `max_depth`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct FiniteTree {
    levels: Vec<BTreeSet<Word>>,
}

#[derive(Serialize, Deserialize)]
struct RawTree {
    max_depth: usize,
    levels: BTreeMap<String, Vec<Word>>,
}

impl TryFrom<RawTree> for FiniteTree {
    type Error = Error;
    fn try_from(raw: RawTree) -> Result<Self> {
        let mut levels = vec![BTreeSet::new(); raw.max_depth + 1];
        for (key, words) in raw.levels {
            let m: usize = key
                .parse()
                .map_err(|_| Error::Parse(format!("level key {key:?} is not an integer")))?;
            if m > raw.max_depth {
                return Err(Error::Parse(format!("level {m} beyond max_depth {}", raw.max_depth)));
            }
            levels[m].extend(words);
        }
        levels[0].insert(Word::empty());
        FiniteTree::from_levels(levels)
    }
}

impl From<FiniteTree> for RawTree {
    fn from(t: FiniteTree) -> RawTree {
        RawTree {
            max_depth: t.max_depth(),
            levels: t
                .levels
                .into_iter()
                .enumerate()
                .map(|(m, l)| (m.to_string(), l.into_iter().collect()))
                .collect(),
        }
    }
}

impl FiniteTree {
    /// Validates word lengths, the root and downward closure.
    pub fn from_levels(levels: Vec<BTreeSet<Word>>) -> Result<Self> {
        if levels.is_empty() || !levels[0].contains(&Word::empty()) {
            return Err(Error::NotDownwardClosed("root missing".into()));
        }
        if levels.len() - 1 > MAX_TREE_DEPTH {
            return Err(Error::InvalidArgument(format!("tree depth above {MAX_TREE_DEPTH}")));
        }
        for (m, level) in levels.iter().enumerate() {
            for w in level {
                if w.len() != m {
                    return Err(Error::Parse(format!("word {w} listed at level {m}")));
                }
                if m > 0 && !levels[m - 1].contains(&w.prefix(m - 1)) {
                    return Err(Error::NotDownwardClosed(format!("{w} present without its parent")));
                }
            }
        }
        Ok(FiniteTree { levels })
    }

    /// The full binary tree `2^{<= max_depth}`.
    pub fn full(max_depth: usize) -> Result<Self> {
        Self::from_levels((0..=max_depth).map(|m| Word::all(m).collect()).collect())
    }

    /// A single branch following `x`.
    pub fn branch(x: &Word) -> Result<Self> {
        Self::from_levels((0..=x.len()).map(|m| BTreeSet::from([x.prefix(m)])).collect())
    }

    pub fn max_depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `S ∩ 2^m`.
    pub fn level(&self, m: usize) -> &BTreeSet<Word> {
        &self.levels[m]
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() <= self.max_depth() && self.levels[w.len()].contains(w)
    }

    /// The same tree cut at a smaller depth.
    pub fn truncate(&self, depth: usize) -> FiniteTree {
        FiniteTree { levels: self.levels[..=depth.min(self.max_depth())].to_vec() }
    }
}

/// The silver tree of `(A, x)`: words agreeing with `x` on positions in `A`.
/// Positions are 0-indexed; `x` must cover `max_depth` positions.
pub fn silver_tree(a: &BTreeSet<usize>, x: &Word, max_depth: usize) -> Result<FiniteTree> {
    if x.len() < max_depth {
        return Err(Error::InvalidArgument(format!(
            "need {max_depth} bits of x, got {}",
            x.len()
        )));
    }
    if max_depth > MAX_TREE_DEPTH {
        return Err(Error::InvalidArgument(format!("tree depth above {MAX_TREE_DEPTH}")));
    }
    let levels = (0..=max_depth)
        .map(|m| {
            Word::all(m)
                .filter(|w| a.range(..m).all(|&i| w.get(i) == x.get(i)))
                .collect()
        })
        .collect();
    FiniteTree::from_levels(levels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateSymbol {
    Star,
    Zero,
    One,
}

impl TemplateSymbol {
    /// Extension order used by the witness: `* < 0 < 1`.
    pub const PRIORITY: [TemplateSymbol; 3] =
        [TemplateSymbol::Star, TemplateSymbol::Zero, TemplateSymbol::One];
}

/// A word over `{0, 1, *}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TemplateWord(Vec<TemplateSymbol>);

impl TemplateWord {
    pub fn empty() -> Self {
        TemplateWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[TemplateSymbol] {
        &self.0
    }

    pub fn extended(&self, s: TemplateSymbol) -> TemplateWord {
        let mut v = self.0.clone();
        v.push(s);
        TemplateWord(v)
    }

    pub fn star_count(&self) -> usize {
        self.0.iter().filter(|s| **s == TemplateSymbol::Star).count()
    }

    /// 0-indexed star positions in increasing order.
    pub fn star_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] == TemplateSymbol::Star).collect()
    }

    pub fn matches(&self, w: &Word) -> bool {
        w.len() == self.len()
            && self.0.iter().zip(w.bits()).all(|(s, &b)| match s {
                TemplateSymbol::Star => true,
                TemplateSymbol::Zero => !b,
                TemplateSymbol::One => b,
            })
    }

    /// All words matching the template, in lexicographic order.
    pub fn sigma(&self) -> Vec<Word> {
        let stars = self.star_positions();
        let k = stars.len();
        assert!(k < 32, "too many stars to enumerate");
        let base: Vec<bool> = self.0.iter().map(|s| *s == TemplateSymbol::One).collect();
        (0..1u64 << k)
            .map(|code| {
                let mut bits = base.clone();
                for (j, &pos) in stars.iter().enumerate() {
                    bits[pos] = (code >> (k - 1 - j)) & 1 == 1;
                }
                Word::new(bits)
            })
            .collect()
    }
}

impl fmt::Display for TemplateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                TemplateSymbol::Star => "*",
                TemplateSymbol::Zero => "0",
                TemplateSymbol::One => "1",
            })?;
        }
        Ok(())
    }
}

impl FromStr for TemplateWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '*' | '∗' => Ok(TemplateSymbol::Star),
                '0' => Ok(TemplateSymbol::Zero),
                '1' => Ok(TemplateSymbol::One),
                _ => Err(Error::Parse(format!("invalid template symbol {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(TemplateWord)
    }
}

impl TryFrom<String> for TemplateWord {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TemplateWord> for String {
    fn from(t: TemplateWord) -> String {
        t.to_string()
    }
}

/// Witnesses `u_0, ..., u_M`; `None` stands for the dead witness.
pub fn star_priority_witnesses(tree: &FiniteTree) -> Vec<Option<TemplateWord>> {
    let mut out = vec![Some(TemplateWord::empty())];
    for m in 1..=tree.max_depth() {
        let next = out[m - 1].as_ref().and_then(|prev| {
            TemplateSymbol::PRIORITY.iter().find_map(|&s| {
                let cand = prev.extended(s);
                cand.sigma().iter().all(|w| tree.level(m).contains(w)).then_some(cand)
            })
        });
        out.push(next);
    }
    out
}

/// The witness `u_m(S)` at a single level.
pub fn star_priority_witness(tree: &FiniteTree, m: usize) -> Result<Option<TemplateWord>> {
    if m > tree.max_depth() {
        return Err(Error::InvalidArgument(format!("level {m} beyond tree depth")));
    }
    Ok(star_priority_witnesses(&tree.truncate(m)).pop().flatten())
}

/// `P_m(S)`, the words covered by the witness (empty when it is dead).
pub fn witness_support(u: &Option<TemplateWord>) -> BTreeSet<Word> {
    u.as_ref().map(|t| t.sigma().into_iter().collect()).unwrap_or_default()
}

/// `k_1, ..., k_M`: star counts of the witnesses, 0 for a dead witness.
pub fn star_counts(tree: &FiniteTree) -> Vec<usize> {
    star_priority_witnesses(tree)
        .into_iter()
        .skip(1)
        .map(|u| u.map_or(0, |t| t.star_count()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn template_sigma() {
        let t: TemplateWord = "*1*".parse().unwrap();
        let sig: Vec<String> = t.sigma().iter().map(|w| w.to_string()).collect();
        assert_eq!(sig, ["010", "011", "110", "111"]);
        assert_eq!(t.star_count(), 2);
        assert!(t.matches(&w("111")));
        assert!(!t.matches(&w("101")));
        assert_eq!("∗0".parse::<TemplateWord>().unwrap().to_string(), "*0");
    }

    #[test]
    fn full_tree_witness_is_all_stars() {
        let t = FiniteTree::full(4).unwrap();
        let u = star_priority_witnesses(&t);
        assert_eq!(u[4].as_ref().unwrap().to_string(), "****");
        assert_eq!(star_counts(&t), vec![1, 2, 3, 4]);
    }

    #[test]
    fn branch_witness_copies_the_branch() {
        let t = FiniteTree::branch(&w("0110")).unwrap();
        let u = star_priority_witnesses(&t);
        assert_eq!(u[4].as_ref().unwrap().to_string(), "0110");
        assert_eq!(star_counts(&t), vec![0; 4]);
    }

    #[test]
    fn witness_dies_and_stays_dead() {
        // Level 2 keeps only 00 and 11, so no extension of "*" fits.
        let levels = vec![
            BTreeSet::from([w("")]),
            BTreeSet::from([w("0"), w("1")]),
            BTreeSet::from([w("00"), w("11")]),
            BTreeSet::from([w("000"), w("110")]),
        ];
        let t = FiniteTree::from_levels(levels).unwrap();
        let u = star_priority_witnesses(&t);
        assert_eq!(u[1].as_ref().unwrap().to_string(), "*");
        assert!(u[2].is_none());
        assert!(u[3].is_none());
        assert_eq!(star_counts(&t), vec![1, 0, 0]);
        assert!(witness_support(&u[2]).is_empty());
    }

    #[test]
    fn silver_tree_levels() {
        let a = BTreeSet::from([1usize]);
        let t = silver_tree(&a, &w("010"), 3).unwrap();
        let lvl: Vec<String> = t.level(2).iter().map(|w| w.to_string()).collect();
        assert_eq!(lvl, ["01", "11"]);
        assert_eq!(star_counts(&t), vec![1, 1, 2]);
        let u = star_priority_witness(&t, 3).unwrap().unwrap();
        assert_eq!(u.to_string(), "*1*");
    }

    #[test]
    fn rejects_malformed_trees() {
        let bad = vec![BTreeSet::from([w("")]), BTreeSet::new(), BTreeSet::from([w("01")])];
        assert!(matches!(FiniteTree::from_levels(bad), Err(Error::NotDownwardClosed(_))));
        let wrong_len = vec![BTreeSet::from([w("")]), BTreeSet::from([w("01")])];
        assert!(FiniteTree::from_levels(wrong_len).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = FiniteTree::branch(&w("01")).unwrap();
        let j = serde_json::to_string(&t).unwrap();
        assert_eq!(j, r#"{"max_depth":2,"levels":{"0":[""],"1":["0"],"2":["01"]}}"#);
        let back: FiniteTree = serde_json::from_str(&j).unwrap();
        assert_eq!(back, t);
        let implicit_root: FiniteTree =
            serde_json::from_str(r#"{"max_depth":1,"levels":{"1":["1"]}}"#).unwrap();
        assert!(implicit_root.contains(&Word::empty()));
    }
}
