//! Base-set permutations acting on antichains, canonical representatives
//! and equivalence-class enumeration.

use std::collections::HashSet;

use serde::Serialize;

use crate::antichain::{Antichain, ElementSet, DOWN};
use crate::error::{check_capability, Error, Result};
use crate::oracle;

/// Exhaustive class enumeration is capped here.
pub const MAX_CLASS_N: usize = 6;

/// A bijection on `{1..n}`; `image[i-1]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u8>,
    /// mask -> permuted mask, for every mask below `2^n`
    table: Vec<u8>,
}

impl Permutation {
    pub fn new(image: Vec<u8>) -> Result<Self> {
        let n = image.len();
        if n > crate::MAX_N {
            return Err(Error::invalid(format!("permutation of {n} elements exceeds the base-set cap")));
        }
        let mut seen = 0u16;
        for &v in &image {
            if v == 0 || v as usize > n || seen >> v & 1 == 1 {
                return Err(Error::invalid(format!("{image:?} is not a permutation of 1..{n}")));
            }
            seen |= 1 << v;
        }
        let table = (0..1u16 << n)
            .map(|mask| {
                let mut out = 0u8;
                for (i, &v) in image.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        out |= 1 << (v - 1);
                    }
                }
                out
            })
            .collect();
        Ok(Permutation { image, table })
    }

    pub fn identity(n: usize) -> Self {
        Permutation::new((1..=n as u8).collect()).expect("identity is a permutation")
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[u8] {
        &self.image
    }

    pub fn apply_set(&self, set: ElementSet) -> ElementSet {
        ElementSet::from_bits_unchecked(self.table[set.bits() as usize], self.n())
    }

    #[inline]
    pub(crate) fn map_mask(&self, mask: u8) -> u8 {
        self.table[mask as usize]
    }

    /// All `n!` permutations in lexicographic order of their images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut current: Vec<u8> = (1..=n as u8).collect();
        let mut out = vec![Permutation::new(current.clone()).expect("valid")];
        while next_permutation(&mut current) {
            out.push(Permutation::new(current.clone()).expect("valid"));
        }
        out
    }
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Relabel every element of every set.
pub fn apply(perm: &Permutation, a: &Antichain) -> Result<Antichain> {
    if perm.n() != a.n() {
        return Err(Error::invalid(format!(
            "permutation of {} elements applied to antichain over n = {}",
            perm.n(),
            a.n()
        )));
    }
    Ok(apply_unchecked(perm, a))
}

fn apply_unchecked(perm: &Permutation, a: &Antichain) -> Antichain {
    let mut down = 0u128;
    for s in a.sets() {
        down |= DOWN[perm.map_mask(s.bits()) as usize];
    }
    Antichain::from_down_unchecked(down, a.n())
}

/// An orbit of antichains under base-set permutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalClass {
    #[serde(serialize_with = "serialize_display")]
    pub representative: Antichain,
    pub orbit_size: u64,
}

fn serialize_display<S: serde::Serializer>(a: &Antichain, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(a)
}

/// Minimum encoding over all `n!` images, and the orbit size.
pub fn canonical_form(a: &Antichain) -> (Antichain, u64) {
    canonical_form_with(a, &Permutation::all(a.n()))
}

/// [`canonical_form`] with a precomputed permutation list for `a.n()`.
pub fn canonical_form_with(a: &Antichain, perms: &[Permutation]) -> (Antichain, u64) {
    let mut best = a.clone();
    let mut seen = HashSet::new();
    for p in perms {
        let img = apply_unchecked(p, a);
        seen.insert(img.down_bits());
        if img < best {
            best = img;
        }
    }
    (best, seen.len() as u64)
}

/// One entry per orbit of `D_n`, sorted by representative.
///
/// All antichains are listed once, then each unvisited one has its orbit
/// generated and marked, so every orbit is produced exactly once.
pub fn enumerate_classes(n: usize) -> Result<Vec<CanonicalClass>> {
    check_capability("class enumeration", n, MAX_CLASS_N)?;
    let mut all = Vec::new();
    oracle::for_each_antichain(n, |down| all.push(down))?;
    all.sort_unstable();
    let perms = Permutation::all(n);
    let mut visited = vec![false; all.len()];
    let mut classes = Vec::new();
    for i in 0..all.len() {
        if visited[i] {
            continue;
        }
        let a = Antichain::from_down_unchecked(all[i], n);
        let mut best = a.clone();
        let mut orbit_size = 0u64;
        for p in &perms {
            let img = apply_unchecked(p, &a);
            let k = all
                .binary_search(&img.down_bits())
                .expect("image of an antichain is an antichain");
            if !visited[k] {
                visited[k] = true;
                orbit_size += 1;
            }
            if img < best {
                best = img;
            }
        }
        classes.push(CanonicalClass {
            representative: best,
            orbit_size,
        });
    }
    classes.sort_by(|x, y| x.representative.cmp(&y.representative));
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ac(text: &str, n: usize) -> Antichain {
        Antichain::parse(text, n, false).unwrap()
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![3, 1]).is_err());
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(0).len(), 1);
    }

    #[test]
    fn apply_examples() {
        let a = ac("{12,3}", 3);
        assert_eq!(apply(&Permutation::identity(3), &a).unwrap(), a);
        let swap = Permutation::new(vec![2, 1]).unwrap();
        assert_eq!(apply(&swap, &ac("{1}", 2)).unwrap(), ac("{2}", 2));
        for p in Permutation::all(3) {
            assert_eq!(apply(&p, &Antichain::bottom(3)).unwrap(), Antichain::bottom(3));
            assert_eq!(apply(&p, &Antichain::top(3)).unwrap(), Antichain::top(3));
        }
        assert!(apply(&swap, &a).is_err());
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(canonical_form(&ac("{2}", 2)), (ac("{1}", 2), 2));
        assert_eq!(canonical_form(&Antichain::top(4)), (Antichain::top(4), 1));
        assert_eq!(canonical_form(&ac("{12,3}", 3)).1, 3);
    }

    #[test]
    fn class_counts_small() {
        let expected = [2usize, 3, 5, 10, 30];
        for (n, &r) in expected.iter().enumerate() {
            let classes = enumerate_classes(n).unwrap();
            assert_eq!(classes.len(), r);
            for c in &classes {
                assert_eq!(canonical_form(&c.representative), (c.representative.clone(), c.orbit_size));
            }
        }
        let total: u64 = enumerate_classes(3).unwrap().iter().map(|c| c.orbit_size).sum();
        assert_eq!(total, 20);
        assert!(matches!(enumerate_classes(7), Err(Error::Capability { .. })));
    }
}
