//! Antichains over a base set `{1..n}` with `n <= 7`, and their downsets.
//!
//! A subset of the base set is an 8-bit mask (bit `i-1` set iff element `i`
//! is present). A downset is a bitset over all `2^n` subsets, indexed by the
//! mask, so it fits in a single `u128`. Every lattice operation reduces to a
//! handful of word operations on these bitsets.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported base-set size.
pub const MAX_N: usize = 7;

const fn build_down() -> [u128; 128] {
    let mut table = [0u128; 128];
    let mut x = 0;
    while x < 128 {
        let mut y = 0;
        while y < 128 {
            if y & x == y {
                table[x] |= 1u128 << y;
            }
            y += 1;
        }
        x += 1;
    }
    table
}

const fn build_up() -> [u128; 128] {
    let mut table = [0u128; 128];
    let mut x = 0;
    while x < 128 {
        let mut y = 0;
        while y < 128 {
            if y & x == x {
                table[x] |= 1u128 << y;
            }
            y += 1;
        }
        x += 1;
    }
    table
}

/// `DOWN[x]`: bitset of all subsets of `x`.
pub(crate) static DOWN: [u128; 128] = build_down();
/// `UP[x]`: bitset of all supersets of `x` among 7-bit masks.
pub(crate) static UP: [u128; 128] = build_up();

/// Bitset with one bit per subset of `{1..n}`.
#[inline]
pub fn universe(n: usize) -> u128 {
    debug_assert!(n <= MAX_N);
    if n == MAX_N {
        u128::MAX
    } else {
        (1u128 << (1usize << n)) - 1
    }
}

/// Iterate the indices of set bits of a `u128`, lowest first.
#[inline]
pub(crate) fn bits_of(mut word: u128) -> impl Iterator<Item = u8> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let i = word.trailing_zeros() as u8;
            word &= word - 1;
            Some(i)
        }
    })
}

/// Maximal elements of a downset bitset, as masks in ascending mask order.
#[inline]
pub(crate) fn maxima(down: u128, n: usize) -> impl Iterator<Item = u8> {
    bits_of(down).filter(move |&x| {
        let mut e = 0;
        while e < n {
            let y = x | (1 << e);
            if y != x && down >> y & 1 == 1 {
                return false;
            }
            e += 1;
        }
        true
    })
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        Err(Error::invalid(format!("base-set size {n} exceeds {MAX_N}")))
    } else {
        Ok(())
    }
}

fn check_same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::invalid(format!("base-set size mismatch: {a} vs {b}")))
    } else {
        Ok(())
    }
}

/// A subset of the base set `{1..n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: u8,
    n: u8,
}

impl ElementSet {
    pub fn new(bits: u8, n: usize) -> Result<Self> {
        check_n(n)?;
        if n < 8 && bits >> n != 0 {
            return Err(Error::invalid(format!(
                "set {bits:#b} has elements outside {{1..{n}}}"
            )));
        }
        Ok(ElementSet { bits, n: n as u8 })
    }

    pub(crate) fn from_bits_unchecked(bits: u8, n: usize) -> Self {
        debug_assert!(bits as u128 >> n == 0 || n >= 8);
        ElementSet { bits, n: n as u8 }
    }

    /// Build from 1-based element labels.
    pub fn from_elements(elements: &[u8], n: usize) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u8;
        for &e in elements {
            if e == 0 || e as usize > n {
                return Err(Error::invalid(format!("element {e} outside {{1..{n}}}")));
            }
            bits |= 1 << (e - 1);
        }
        Ok(ElementSet { bits, n: n as u8 })
    }

    pub fn empty(n: usize) -> Self {
        ElementSet { bits: 0, n: n as u8 }
    }

    pub fn full(n: usize) -> Self {
        ElementSet {
            bits: ((1u16 << n) - 1) as u8,
            n: n as u8,
        }
    }

    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, element: u8) -> bool {
        element >= 1 && element <= 8 && self.bits >> (element - 1) & 1 == 1
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.bits & other.bits == self.bits
    }

    pub fn intersection(self, other: ElementSet) -> ElementSet {
        ElementSet {
            bits: self.bits & other.bits,
            n: self.n,
        }
    }

    pub fn union(self, other: ElementSet) -> ElementSet {
        ElementSet {
            bits: self.bits | other.bits,
            n: self.n,
        }
    }

    pub fn complement(self) -> ElementSet {
        ElementSet {
            bits: !self.bits & ElementSet::full(self.n()).bits,
            n: self.n,
        }
    }

    /// Elements as 1-based labels, ascending.
    pub fn elements(self) -> impl Iterator<Item = u8> {
        (0..8u8).filter(move |i| self.bits >> i & 1 == 1).map(|i| i + 1)
    }
}

impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.bits.count_ones(), self.bits).cmp(&(other.bits.count_ones(), other.bits))
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits == 0 {
            return f.write_str("0");
        }
        for e in self.elements() {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A set of pairwise incomparable subsets of `{1..n}`.
///
/// Sets are kept sorted by `(popcount, bits)`, so two antichains are equal
/// exactly when their encodings are. The downset bitset is carried alongside
/// so order tests are a single mask comparison.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Antichain {
    n: u8,
    sets: Vec<ElementSet>,
    down: u128,
}

impl Antichain {
    /// The empty antichain, written `{}`.
    pub fn bottom(n: usize) -> Self {
        Antichain {
            n: n as u8,
            sets: Vec::new(),
            down: 0,
        }
    }

    /// `{12...n}`.
    pub fn top(n: usize) -> Self {
        Antichain {
            n: n as u8,
            sets: vec![ElementSet::full(n)],
            down: universe(n),
        }
    }

    /// `{0}`, the antichain holding only the empty set.
    pub fn empty_set(n: usize) -> Self {
        Antichain {
            n: n as u8,
            sets: vec![ElementSet::empty(n)],
            down: 1,
        }
    }

    /// `max(raw)`: keep the sets not strictly contained in another one.
    pub fn normalize<I>(raw: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = ElementSet>,
    {
        check_n(n)?;
        let mut down = 0u128;
        for s in raw {
            check_same_n(s.n(), n)?;
            down |= DOWN[s.bits as usize];
        }
        Ok(Antichain::from_down_unchecked(down, n))
    }

    /// Like [`Antichain::normalize`], but rejects input that is not already
    /// an antichain. Duplicates are rejected too.
    pub fn from_sets<I>(raw: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = ElementSet>,
    {
        let raw: Vec<ElementSet> = raw.into_iter().collect();
        let normalized = Antichain::normalize(raw.iter().copied(), n)?;
        if normalized.sets.len() != raw.len() {
            return Err(Error::invalid(format!(
                "sets {raw:?} do not form an antichain"
            )));
        }
        Ok(normalized)
    }

    /// Build from raw bitmasks, normalizing.
    pub fn from_masks(masks: &[u8], n: usize) -> Result<Self> {
        let sets = masks
            .iter()
            .map(|&b| ElementSet::new(b, n))
            .collect::<Result<Vec<_>>>()?;
        Antichain::normalize(sets, n)
    }

    pub(crate) fn from_down_unchecked(down: u128, n: usize) -> Self {
        let mut sets: Vec<ElementSet> = maxima(down, n)
            .map(|b| ElementSet::from_bits_unchecked(b, n))
            .collect();
        sets.sort_unstable();
        Antichain {
            n: n as u8,
            sets,
            down,
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn sets(&self) -> &[ElementSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_bottom(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.down == universe(self.n())
    }

    /// Set membership of `set` in the antichain (not dominance).
    pub fn contains(&self, set: ElementSet) -> bool {
        self.sets.binary_search(&set).is_ok()
    }

    /// Bitset of all sets dominated by this antichain.
    pub fn down_bits(&self) -> u128 {
        self.down
    }

    /// `a <= b`: every set of `a` is contained in some set of `b`.
    pub fn le(&self, other: &Antichain) -> Result<bool> {
        check_same_n(self.n(), other.n())?;
        Ok(self.down & !other.down == 0)
    }

    pub fn join(&self, other: &Antichain) -> Result<Antichain> {
        check_same_n(self.n(), other.n())?;
        Ok(Antichain::from_down_unchecked(self.down | other.down, self.n()))
    }

    /// Maximal pairwise intersections. Note `meet({1},{2}) = {0}`, not `{}`.
    pub fn meet(&self, other: &Antichain) -> Result<Antichain> {
        check_same_n(self.n(), other.n())?;
        let n = self.n();
        let mut down = 0u128;
        for x in &self.sets {
            for y in &other.sets {
                down |= DOWN[(x.bits & y.bits) as usize];
            }
        }
        Ok(Antichain::from_down_unchecked(down, n))
    }

    /// True iff some set of the antichain contains `set`.
    pub fn dominates(&self, set: ElementSet) -> Result<bool> {
        check_same_n(self.n(), set.n())?;
        Ok(self.down >> set.bits & 1 == 1)
    }

    /// Union of all member sets.
    pub fn span(&self) -> ElementSet {
        let bits = self.sets.iter().fold(0u8, |acc, s| acc | s.bits);
        ElementSet::from_bits_unchecked(bits, self.n())
    }

    /// `{X ∪ Y | X in a, Y in b}` for antichains with disjoint spans.
    pub fn direct_product(&self, other: &Antichain) -> Result<Antichain> {
        check_same_n(self.n(), other.n())?;
        if self.span().bits & other.span().bits != 0 {
            return Err(Error::precondition(format!(
                "direct product needs disjoint spans, got {} and {}",
                self.span(),
                other.span()
            )));
        }
        let n = self.n();
        let mut down = 0u128;
        for x in &self.sets {
            for y in &other.sets {
                down |= DOWN[(x.bits | y.bits) as usize];
            }
        }
        Ok(Antichain::from_down_unchecked(down, n))
    }

    /// Antichain of the dual monotone function: the complement of the set of
    /// complements of the downset.
    pub fn dual(&self) -> Antichain {
        let n = self.n();
        Antichain::from_down_unchecked(dual_down(self.down, n), n)
    }

    pub fn to_downset(&self) -> Downset {
        Downset {
            n: self.n,
            member: self.down,
        }
    }

    pub fn from_downset(d: &Downset) -> Antichain {
        Antichain::from_down_unchecked(d.member, d.n())
    }

    /// Parse the text grammar: `{}` is the empty antichain, `{0}` holds the
    /// empty set, otherwise `{12,13}` lists sets as strictly increasing
    /// digit strings. Non-antichains are rejected unless `normalize` is set.
    pub fn parse(text: &str, n: usize, normalize: bool) -> Result<Antichain> {
        check_n(n)?;
        let t = text.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::invalid(format!("antichain must be braced: {text:?}")))?;
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(Antichain::bottom(n));
        }
        let mut sets = Vec::new();
        for token in inner.split(',') {
            sets.push(parse_set(token.trim(), n, text)?);
        }
        if normalize {
            Antichain::normalize(sets, n)
        } else {
            Antichain::from_sets(sets, n)
        }
    }
}

fn parse_set(token: &str, n: usize, text: &str) -> Result<ElementSet> {
    if token.is_empty() {
        return Err(Error::invalid(format!("empty set token in {text:?}")));
    }
    if token == "0" {
        return Ok(ElementSet::empty(n));
    }
    let mut bits = 0u8;
    let mut last = 0u8;
    for c in token.chars() {
        let d = c
            .to_digit(10)
            .ok_or_else(|| Error::invalid(format!("bad character {c:?} in {text:?}")))?
            as u8;
        if d == 0 || d <= last {
            return Err(Error::invalid(format!(
                "set {token:?} in {text:?} is not a strictly increasing string of digits 1-9"
            )));
        }
        if d as usize > n {
            return Err(Error::invalid(format!(
                "element {d} in {text:?} outside {{1..{n}}}"
            )));
        }
        bits |= 1 << (d - 1);
        last = d;
    }
    Ok(ElementSet::from_bits_unchecked(bits, n))
}

/// `S* = {x : complement(x) not in S}` on downset bitsets.
pub(crate) fn dual_down(down: u128, n: usize) -> u128 {
    let full = ((1u16 << n) - 1) as u8;
    let mut out = 0u128;
    for x in 0..(1u16 << n) as u8 {
        if down >> (!x & full) & 1 == 0 {
            out |= 1u128 << x;
        }
    }
    out
}

impl Ord for Antichain {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, &self.sets).cmp(&(other.n, &other.sets))
    }
}

impl PartialOrd for Antichain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/n={}", self.n)
    }
}

/// A family of subsets closed under taking subsets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Downset {
    n: u8,
    member: u128,
}

impl Downset {
    /// Validates range and downward closure.
    pub fn new(member: u128, n: usize) -> Result<Self> {
        check_n(n)?;
        if member & !universe(n) != 0 {
            return Err(Error::invalid(format!(
                "downset bitset has bits beyond 2^{n} subsets"
            )));
        }
        for x in bits_of(member) {
            if DOWN[x as usize] & !member != 0 {
                return Err(Error::invalid(format!(
                    "bitset is not downward closed: {} present without all its subsets",
                    ElementSet::from_bits_unchecked(x, n)
                )));
            }
        }
        Ok(Downset {
            n: n as u8,
            member,
        })
    }

    pub fn empty(n: usize) -> Self {
        Downset {
            n: n as u8,
            member: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        Downset {
            n: n as u8,
            member: universe(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u128 {
        self.member
    }

    pub fn len(&self) -> usize {
        self.member.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.member == 0
    }

    pub fn contains(&self, set: ElementSet) -> bool {
        self.member >> set.bits() & 1 == 1
    }

    pub fn to_antichain(&self) -> Antichain {
        Antichain::from_downset(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ac(text: &str, n: usize) -> Antichain {
        Antichain::parse(text, n, false).unwrap()
    }

    fn set(text: &str, n: usize) -> ElementSet {
        parse_set(text, n, text).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let raw = [set("0", 3), set("1", 3)];
        assert_eq!(Antichain::normalize(raw, 3).unwrap(), ac("{1}", 3));
        assert_eq!(
            Antichain::normalize(Vec::new(), 3).unwrap(),
            Antichain::bottom(3)
        );
        let raw = [set("12", 3), set("1", 3), set("23", 3)];
        assert_eq!(Antichain::normalize(raw, 3).unwrap(), ac("{12,23}", 3));
    }

    #[test]
    fn normalize_rejects_out_of_range() {
        assert!(ElementSet::new(0b100, 2).is_err());
        assert!(ElementSet::from_elements(&[3], 2).is_err());
        assert!(Antichain::normalize([ElementSet::empty(3)], 2).is_err());
    }

    #[test]
    fn order_examples() {
        let n = 3;
        for a in [ac("{}", n), ac("{0}", n), ac("{12,3}", n), ac("{123}", n)] {
            assert!(Antichain::bottom(n).le(&a).unwrap());
        }
        assert!(ac("{1}", n).le(&ac("{12}", n)).unwrap());
        assert!(!ac("{1,2}", n).le(&ac("{1}", n)).unwrap());
        assert!(ac("{1}", 2).le(&ac("{1}", 3)).is_err());
    }

    #[test]
    fn join_examples() {
        let n = 3;
        let a = ac("{12,3}", n);
        assert_eq!(a.join(&Antichain::bottom(n)).unwrap(), a);
        assert_eq!(ac("{1}", n).join(&ac("{2}", n)).unwrap(), ac("{1,2}", n));
        assert_eq!(ac("{1}", n).join(&ac("{12}", n)).unwrap(), ac("{12}", n));
    }

    #[test]
    fn meet_examples() {
        let n = 3;
        let a = ac("{12,3}", n);
        assert_eq!(a.meet(&Antichain::top(n)).unwrap(), a);
        assert_eq!(ac("{12}", n).meet(&ac("{23}", n)).unwrap(), ac("{2}", n));
        let m = ac("{1}", n).meet(&ac("{2}", n)).unwrap();
        assert_eq!(m, ac("{0}", n));
        assert_ne!(m, Antichain::bottom(n));
        assert!(Antichain::bottom(n).meet(&a).unwrap().is_bottom());
    }

    #[test]
    fn dominates_examples() {
        let n = 2;
        assert!(!Antichain::bottom(n).dominates(ElementSet::empty(n)).unwrap());
        assert!(ac("{0}", n).dominates(ElementSet::empty(n)).unwrap());
        assert!(ac("{12}", n).dominates(set("1", n)).unwrap());
    }

    #[test]
    fn span_examples() {
        assert_eq!(Antichain::bottom(3).span(), ElementSet::empty(3));
        assert_eq!(ac("{1,23}", 3).span(), ElementSet::full(3));
        assert_eq!(ac("{0}", 3).span(), ElementSet::empty(3));
    }

    #[test]
    fn direct_product_examples() {
        let n = 3;
        assert_eq!(
            ac("{1}", n).direct_product(&ac("{2}", n)).unwrap(),
            ac("{12}", n)
        );
        let a = ac("{12,3}", n);
        assert_eq!(a.direct_product(&ac("{0}", n)).unwrap(), a);
        assert!(Antichain::bottom(n)
            .direct_product(&ac("{1}", n))
            .unwrap()
            .is_bottom());
        assert!(matches!(
            ac("{12}", n).direct_product(&ac("{2}", n)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dual_examples() {
        for n in 0..=4 {
            assert_eq!(Antichain::bottom(n).dual(), Antichain::top(n));
            assert_eq!(Antichain::top(n).dual(), Antichain::bottom(n));
        }
        assert_eq!(ac("{0}", 1).dual(), ac("{0}", 1));
        assert_eq!(ac("{1}", 2).dual(), ac("{1}", 2));
    }

    #[test]
    fn downset_conversions() {
        assert!(Antichain::bottom(3).to_downset().is_empty());
        let d = ac("{0}", 3).to_downset();
        assert_eq!(d.len(), 1);
        assert!(d.contains(ElementSet::empty(3)));
        assert_eq!(Downset::full(3).to_antichain(), Antichain::top(3));
        assert_eq!(ac("{12,3}", 3).to_downset().len(), 5);
        // {1} without {} is not closed
        assert!(Downset::new(0b10, 1).is_err());
        assert!(Downset::new(1u128 << 4, 2).is_err());
    }

    #[test]
    fn text_grammar() {
        assert_eq!(ac("{}", 2), Antichain::bottom(2));
        assert_eq!(ac(" { 0 } ", 2), Antichain::empty_set(2));
        assert_eq!(ac("{13,12}", 3).to_string(), "{12,13}");
        assert_eq!(ac("{123}", 3), Antichain::top(3));
        assert!(Antichain::parse("{1,12}", 2, false).is_err());
        assert_eq!(
            Antichain::parse("{1,12}", 2, true).unwrap(),
            Antichain::top(2)
        );
        for bad in ["", "{", "12", "{21}", "{11}", "{1,}", "{3}", "{a}", "{10}"] {
            assert!(Antichain::parse(bad, 2, true).is_err(), "{bad}");
        }
        assert!(Antichain::parse("{1,1}", 2, false).is_err());
    }

    #[test]
    fn canonical_order_is_popcount_then_bits() {
        let a = ac("{3,12}", 3);
        let order: Vec<u8> = a.sets().iter().map(|s| s.bits()).collect();
        assert_eq!(order, vec![0b100, 0b011]);
    }
}
