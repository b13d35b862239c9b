//! Brute-force ground truth.
//!
//! Nothing here is clever on purpose: antichains are listed by deciding each
//! subset in turn, and equation systems are solved by trying candidate
//! tuples. Every counting formula in the crate is checked against this.

use serde::Serialize;

use crate::antichain::{bits_of, universe, Antichain, DOWN};
use crate::count::BigCount;
use crate::error::{check_capability, Error, Result};
use crate::pcoef::{pairs, SystemInstance};

/// Enumeration guard for antichain and interval streams.
pub const MAX_ENUM_N: usize = 6;
/// Largest candidate pool (sets of `α ∪ β`) for the restricted solver.
pub const MAX_CANDIDATE_SETS: usize = 20;
/// Guard for the unrestricted solver, which tries all of `D_n`.
pub const MAX_UNRESTRICTED_N: usize = 4;

/// Depth-first stream of the downsets `D` with `lower ⊆ D ⊆ upper`.
///
/// Subsets of `upper − lower` are decided in order of size, so when a
/// subset comes up all its proper subsets are already decided and the
/// downset condition is a local check.
pub struct DownsetStream {
    n: usize,
    order: Vec<u8>,
    stack: Vec<(usize, u128)>,
}

impl DownsetStream {
    fn new(n: usize, lower: u128, upper: u128) -> Self {
        let mut order: Vec<u8> = bits_of(upper & !lower).collect();
        order.sort_by_key(|&x| (x.count_ones(), x));
        let stack = if lower & !upper == 0 {
            vec![(0, lower)]
        } else {
            Vec::new()
        };
        DownsetStream { n, order, stack }
    }

    /// Unchecked stream for callers that already enforce a size cap.
    pub(crate) fn interval(n: usize, lower: u128, upper: u128) -> Self {
        DownsetStream::new(n, lower, upper)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl Iterator for DownsetStream {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        let (mut idx, down) = self.stack.pop()?;
        while idx < self.order.len() {
            let x = self.order[idx];
            let below = DOWN[x as usize] & !(1u128 << x);
            if below & !down == 0 {
                self.stack.push((idx + 1, down | 1u128 << x));
            }
            idx += 1;
        }
        Some(down)
    }
}

/// Visit the downset bitset of every antichain over `{1..n}`.
pub fn for_each_antichain(n: usize, mut visit: impl FnMut(u128)) -> Result<()> {
    check_capability("antichain enumeration", n, MAX_ENUM_N)?;
    for d in DownsetStream::new(n, 0, universe(n)) {
        visit(d);
    }
    Ok(())
}

/// Every antichain over `{1..n}` exactly once.
pub fn enumerate_antichains(n: usize) -> Result<impl Iterator<Item = Antichain>> {
    check_capability("antichain enumeration", n, MAX_ENUM_N)?;
    Ok(DownsetStream::new(n, 0, universe(n)).map(move |d| Antichain::from_down_unchecked(d, n)))
}

/// Every `χ` with `bottom <= χ <= top`; empty when `bottom ≰ top`.
pub fn enumerate_interval(
    bottom: &Antichain,
    top: &Antichain,
) -> Result<impl Iterator<Item = Antichain>> {
    let n = bottom.n();
    if top.n() != n {
        return Err(Error::invalid(format!(
            "base-set size mismatch: {n} vs {}",
            top.n()
        )));
    }
    check_capability("interval enumeration", n, MAX_ENUM_N)?;
    Ok(DownsetStream::new(n, bottom.down_bits(), top.down_bits())
        .map(move |d| Antichain::from_down_unchecked(d, n)))
}

/// Downset bitsets of the interval, for callers working on raw bits.
pub fn interval_downsets(n: usize, bottom: u128, top: u128) -> Result<DownsetStream> {
    check_capability("interval enumeration", n, MAX_ENUM_N)?;
    Ok(DownsetStream::new(n, bottom, top))
}

/// `D(n)` by listing every antichain.
pub fn brute_force_count(n: usize) -> Result<BigCount> {
    let mut count = 0u128;
    for_each_antichain(n, |_| count += 1)?;
    Ok(BigCount::from(count))
}

/// One solution `(χ_1, ..., χ_r)` of a system instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SolutionTuple {
    #[serde(serialize_with = "serialize_antichains")]
    pub chi: Vec<Antichain>,
}

fn serialize_antichains<S: serde::Serializer>(
    v: &[Antichain],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for a in v {
        seq.serialize_element(&a.to_string())?;
    }
    seq.end()
}

/// Which antichains the solver tries for each variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSpace {
    /// Antichains made only of sets of `α ∪ β`.
    Restricted,
    /// All of `D_n`.
    Unrestricted,
}

/// Candidate downsets for the solver.
fn candidates(inst: &SystemInstance, space: CandidateSpace) -> Result<Vec<u128>> {
    let n = inst.n();
    match space {
        CandidateSpace::Unrestricted => {
            check_capability("unrestricted solver", n, MAX_UNRESTRICTED_N)?;
            Ok(DownsetStream::new(n, 0, universe(n)).collect())
        }
        CandidateSpace::Restricted => {
            let mut pool: Vec<u8> = inst
                .alpha()
                .sets()
                .iter()
                .chain(inst.betas().iter().flat_map(|b| b.sets()))
                .map(|s| s.bits())
                .collect();
            pool.sort_unstable();
            pool.dedup();
            if pool.len() > MAX_CANDIDATE_SETS {
                return Err(Error::Capability {
                    what: "restricted solver candidate pool",
                    max: MAX_CANDIDATE_SETS,
                    got: pool.len(),
                });
            }
            let mut out = Vec::new();
            'subsets: for pick in 0u32..1 << pool.len() {
                let chosen: Vec<u8> = (0..pool.len())
                    .filter(|i| pick >> i & 1 == 1)
                    .map(|i| pool[i])
                    .collect();
                for (i, &a) in chosen.iter().enumerate() {
                    for &b in &chosen[i + 1..] {
                        if a & b == a || a & b == b {
                            continue 'subsets;
                        }
                    }
                }
                out.push(chosen.iter().fold(0u128, |d, &s| d | DOWN[s as usize]));
            }
            Ok(out)
        }
    }
}

fn search(
    inst: &SystemInstance,
    space: CandidateSpace,
    mut on_solution: impl FnMut(&[u128]),
) -> Result<()> {
    let r = inst.r();
    let cands = candidates(inst, space)?;
    let alpha = inst.alpha().down_bits();
    let betas: Vec<u128> = inst.betas().iter().map(|b| b.down_bits()).collect();
    let pair_pos: Vec<Vec<usize>> = {
        let mut table = vec![vec![usize::MAX; r]; r];
        for (k, (i, j)) in pairs(r).enumerate() {
            table[i - 1][j - 1] = k;
            table[j - 1][i - 1] = k;
        }
        table
    };

    fn go(
        depth: usize,
        chosen: &mut Vec<u128>,
        cands: &[u128],
        betas: &[u128],
        pair_pos: &[Vec<usize>],
        alpha: u128,
        on_solution: &mut dyn FnMut(&[u128]),
    ) {
        let r = pair_pos.len();
        if depth == r {
            let meet = chosen.iter().fold(u128::MAX, |acc, &d| acc & d);
            if meet == alpha {
                on_solution(chosen);
            }
            return;
        }
        for &c in cands {
            let ok = (0..depth).all(|j| chosen[j] | c == betas[pair_pos[j][depth]]);
            if ok {
                chosen.push(c);
                go(depth + 1, chosen, cands, betas, pair_pos, alpha, on_solution);
                chosen.pop();
            }
        }
    }

    let mut chosen = Vec::with_capacity(r);
    go(0, &mut chosen, &cands, &betas, &pair_pos, alpha, &mut on_solution);
    Ok(())
}

/// Every solution of the instance, in candidate order.
pub fn solve_system(inst: &SystemInstance, space: CandidateSpace) -> Result<Vec<SolutionTuple>> {
    let n = inst.n();
    let mut out = Vec::new();
    search(inst, space, |downs| {
        out.push(SolutionTuple {
            chi: downs
                .iter()
                .map(|&d| Antichain::from_down_unchecked(d, n))
                .collect(),
        })
    })?;
    Ok(out)
}

/// Number of solutions, without materializing them.
pub fn count_solutions(inst: &SystemInstance, space: CandidateSpace) -> Result<u64> {
    let mut count = 0u64;
    search(inst, space, |_| count += 1)?;
    Ok(count)
}

/// Outcome of comparing the closed-form solution count with the solver.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub n: usize,
    pub r: usize,
    pub instances: u64,
    pub nonzero: u64,
    /// Instances where the two counts differ, as `alpha; betas => formula vs solver`.
    pub mismatches: Vec<String>,
}

/// Compare [`crate::pcoef::p_general`] with the unrestricted solver on one
/// instance, recording any disagreement.
pub fn certify_instance(inst: &SystemInstance, cert: &mut Certification) -> Result<()> {
    let formula = crate::pcoef::p_general(inst);
    let solved = count_solutions(inst, CandidateSpace::Unrestricted)?;
    cert.instances += 1;
    if solved != 0 {
        cert.nonzero += 1;
    }
    if formula != BigCount::from(solved) {
        let betas: Vec<String> = inst.betas().iter().map(|b| b.to_string()).collect();
        cert.mismatches.push(format!(
            "{}; {} => {formula} vs {solved}",
            inst.alpha(),
            betas.join(" ")
        ));
    }
    Ok(())
}

/// Every instance with `r` variables over `D_n`: all `α` and all tuples of
/// right-hand sides, each checked against the solver.
pub fn certify_exhaustive(n: usize, r: usize) -> Result<Certification> {
    check_capability("exhaustive certification", n, 2)?;
    if !(2..=4).contains(&r) {
        return Err(Error::invalid(format!("exhaustive certification supports r in 2..=4, got {r}")));
    }
    let all: Vec<Antichain> = enumerate_antichains(n)?.collect();
    let m = r * (r - 1) / 2;
    let mut cert = Certification {
        n,
        r,
        ..Certification::default()
    };
    let mut idx = vec![0usize; m];
    for alpha in &all {
        loop {
            let betas = idx.iter().map(|&i| all[i].clone()).collect();
            certify_instance(&SystemInstance::new(alpha.clone(), betas)?, &mut cert)?;
            let mut k = 0;
            while k < m {
                idx[k] += 1;
                if idx[k] < all.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == m {
                break;
            }
        }
    }
    Ok(cert)
}

fn shifted_complement(a: usize, k: usize, n: usize) -> u8 {
    let full = (1usize << k) - 1;
    ((full & !a) << n) as u8
}

/// Glue parts `η_A` (indexed by subsets `A` of the `k` added elements
/// `n+1..n+k`, as bitmasks) into `η = ∨_A η_A × {added elements not in A}`.
///
/// The parts must satisfy `A ⊆ B ⇒ η_A ≤ η_B`, which makes the result the
/// unique antichain over `n + k` elements with these parts.
pub fn compose_decomposition(parts: &[Antichain], k: usize) -> Result<Antichain> {
    if parts.len() != 1 << k {
        return Err(Error::invalid(format!(
            "{} parts given, {} subsets of {k} added elements",
            parts.len(),
            1usize << k
        )));
    }
    let n = parts[0].n();
    if n + k > crate::MAX_N {
        return Err(Error::invalid(format!(
            "composed base set {} exceeds {}",
            n + k,
            crate::MAX_N
        )));
    }
    for p in parts {
        if p.n() != n {
            return Err(Error::invalid("parts over different base sets"));
        }
    }
    for a in 0..parts.len() {
        for b in 0..parts.len() {
            if a & b == a && !parts[a].le(&parts[b])? {
                return Err(Error::precondition(format!(
                    "monotone indexing violated: part {a:#b} = {} is not <= part {b:#b} = {}",
                    parts[a], parts[b]
                )));
            }
        }
    }
    let mut down = 0u128;
    for (a, part) in parts.iter().enumerate() {
        let tag = shifted_complement(a, k, n);
        for x in bits_of(part.down_bits()) {
            down |= 1u128 << (x | tag);
        }
    }
    Ok(Antichain::from_down_unchecked(down, n + k))
}

/// Inverse of [`compose_decomposition`]: split `eta` over `n + k` elements
/// into its `2^k` parts over the first `n` elements.
pub fn decompose(eta: &Antichain, k: usize) -> Result<Vec<Antichain>> {
    let total = eta.n();
    if k > total {
        return Err(Error::invalid(format!("cannot split {k} elements off n = {total}")));
    }
    let n = total - k;
    let d = eta.down_bits();
    Ok((0..1usize << k)
        .map(|a| {
            let tag = shifted_complement(a, k, n);
            let mut part = 0u128;
            for x in 0..1u16 << n {
                if d >> (x as u8 | tag) & 1 == 1 {
                    part |= 1u128 << x;
                }
            }
            Antichain::from_down_unchecked(part, n)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ac(text: &str, n: usize) -> Antichain {
        Antichain::parse(text, n, false).unwrap()
    }

    #[test]
    fn antichain_counts() {
        let expected = [2u128, 3, 6, 20, 168, 7581];
        for (n, &d) in expected.iter().enumerate() {
            assert_eq!(brute_force_count(n).unwrap(), BigCount::from(d));
        }
        let d0: Vec<Antichain> = enumerate_antichains(0).unwrap().collect();
        assert_eq!(d0.len(), 2);
        assert!(d0.contains(&Antichain::bottom(0)));
        assert!(d0.contains(&Antichain::empty_set(0)));
        assert!(enumerate_antichains(7).is_err());
    }

    #[test]
    fn interval_streams() {
        let a = ac("{1,23}", 3);
        let only: Vec<_> = enumerate_interval(&a, &a).unwrap().collect();
        assert_eq!(only, vec![a.clone()]);
        let mut two: Vec<_> = enumerate_interval(&Antichain::bottom(2), &Antichain::empty_set(2))
            .unwrap()
            .collect();
        two.sort();
        assert_eq!(two, vec![Antichain::bottom(2), Antichain::empty_set(2)]);
        assert_eq!(
            enumerate_interval(&Antichain::bottom(3), &Antichain::top(3))
                .unwrap()
                .count(),
            20
        );
        assert_eq!(
            enumerate_interval(&ac("{1}", 2), &ac("{2}", 2)).unwrap().count(),
            0
        );
    }

    #[test]
    fn solver_examples() {
        let a = ac("{1,2}", 2);
        let i = SystemInstance::new(a.clone(), vec![a.clone()]).unwrap();
        let sols = solve_system(&i, CandidateSpace::Restricted).unwrap();
        assert_eq!(sols, vec![SolutionTuple { chi: vec![a.clone(), a] }]);

        let i = SystemInstance::new(Antichain::bottom(1), vec![Antichain::empty_set(1)]).unwrap();
        let sols = solve_system(&i, CandidateSpace::Unrestricted).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(sols.contains(&SolutionTuple {
            chi: vec![Antichain::empty_set(1), Antichain::bottom(1)]
        }));

        let i = SystemInstance::new(Antichain::bottom(0), vec![Antichain::empty_set(0); 3]).unwrap();
        assert_eq!(count_solutions(&i, CandidateSpace::Restricted).unwrap(), 3);
    }

    #[test]
    fn compose_examples() {
        let parts = vec![Antichain::bottom(0); 4];
        assert!(compose_decomposition(&parts, 2).unwrap().is_bottom());

        let mut parts = vec![Antichain::bottom(0); 4];
        parts[3] = Antichain::empty_set(0);
        assert_eq!(compose_decomposition(&parts, 2).unwrap(), Antichain::empty_set(2));

        let mut bad = vec![Antichain::bottom(0); 4];
        bad[0] = Antichain::empty_set(0);
        assert!(matches!(compose_decomposition(&bad, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn compose_round_trips_on_d2() {
        let mut count = 0;
        for eta in enumerate_antichains(2).unwrap() {
            let parts = decompose(&eta, 2).unwrap();
            assert_eq!(compose_decomposition(&parts, 2).unwrap(), eta);
            count += 1;
        }
        assert_eq!(count, 6);
    }

    #[test]
    fn parts_of_top_are_all_top() {
        let parts = decompose(&Antichain::top(3), 2).unwrap();
        assert!(parts.iter().all(|p| *p == Antichain::top(1)));
        // the part with no added element present in its tag is the largest
        let eta = ac("{3}", 3);
        let parts = decompose(&eta, 2).unwrap();
        assert_eq!(parts[0b01], Antichain::empty_set(1));
        assert_eq!(parts[0b11], Antichain::empty_set(1));
        assert!(parts[0b10].is_bottom() && parts[0b00].is_bottom());
    }
}
