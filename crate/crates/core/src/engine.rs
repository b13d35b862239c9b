//! Dedekind numbers from interval sums over a smaller base set.
//!
//! * `D(n+2) = Σ_{α ≤ β} 2^{C(α,β)} |[⊥,α]| |[β,⊤]|`
//! * `D(n+2) = Σ_{σ,τ} η(σ ∧ τ) η(σ* ∧ τ*)` (cross-check, all pairs)
//! * `D(n+3) = Σ P_3(α; β) |[⊥,α]| Π_{ij} |[β_ij, γ]|` over
//!   `β_ij ∈ [α,⊤]`, `γ ≥ ∨β`
//! * `D(n+4) = Σ P_4(α; β) P_4(ε*; δ*) |[⊥,α]| Π_{ij} |[β_ij, δ_ij]| |[ε,⊤]|`
//!
//! Antichains of `D_n` are addressed by their index in a [`Space`]. Work is
//! split into shards (one per `α`, or per `α` class with symmetry
//! reduction) evaluated on a worker pool; a single coordinator collects
//! shard results, appends checkpoint records, and folds the partial sums in
//! shard order.

use std::path::PathBuf;
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::antichain::{dual_down, maxima, universe, Antichain};
use crate::checkpoint::{self, CheckpointRecord, CheckpointWriter, Resumed};
use crate::count::BigCount;
use crate::error::{check_capability, Error, Result};
use crate::interval::IntervalCounter;
use crate::oracle;
use crate::pcoef::{connector_number_bits, p_general_bits, SystemInstance};
use crate::symmetry;

/// Largest `n` for which a [`Space`] is built.
pub const MAX_SPACE_N: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bruteforce,
    Nplus2,
    Nplus3,
    Nplus4,
    Wiedemann,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Bruteforce,
        Method::Nplus2,
        Method::Wiedemann,
        Method::Nplus3,
        Method::Nplus4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bruteforce => "bruteforce",
            Method::Nplus2 => "nplus2",
            Method::Nplus3 => "nplus3",
            Method::Nplus4 => "nplus4",
            Method::Wiedemann => "wiedemann",
        }
    }

    /// How many elements the method adds to its base set.
    pub fn offset(self) -> usize {
        match self {
            Method::Bruteforce => 0,
            Method::Nplus2 | Method::Wiedemann => 2,
            Method::Nplus3 => 3,
            Method::Nplus4 => 4,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}")))
    }
}

/// Per-method caps on the base size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub bruteforce: usize,
    pub nplus2: usize,
    pub nplus3: usize,
    pub nplus4: usize,
    pub wiedemann: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            bruteforce: 6,
            nplus2: 5,
            nplus3: 3,
            nplus4: 2,
            wiedemann: 4,
        }
    }
}

impl Limits {
    pub fn cap(&self, method: Method) -> usize {
        match method {
            Method::Bruteforce => self.bruteforce,
            Method::Nplus2 => self.nplus2,
            Method::Nplus3 => self.nplus3,
            Method::Nplus4 => self.nplus4,
            Method::Wiedemann => self.wiedemann,
        }
    }
}

/// Hard ceilings no configuration can lift.
fn hard_cap(method: Method) -> usize {
    match method {
        Method::Bruteforce => oracle::MAX_ENUM_N,
        Method::Nplus2 => MAX_SPACE_N,
        Method::Wiedemann => 4,
        Method::Nplus3 => 3,
        Method::Nplus4 => 2,
    }
}

/// How a computation is executed. None of this affects the result.
#[derive(Debug, Clone)]
pub struct ExecOptions {
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Evaluate at most this many outstanding shards, then stop with
    /// [`Error::Interrupted`]. Used to exercise resume.
    pub stop_after_shards: Option<usize>,
    pub limits: Limits,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            checkpoint: None,
            stop_after_shards: None,
            limits: Limits::default(),
        }
    }
}

impl ExecOptions {
    pub fn with_workers(workers: usize) -> Self {
        ExecOptions {
            workers,
            ..ExecOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputationReport {
    pub method: Method,
    pub n: usize,
    pub result: BigCount,
    pub terms: BigCount,
    pub seconds: f64,
    pub shards: usize,
    pub resumed_shards: usize,
    pub digest: String,
}

impl ComputationReport {
    /// The report as a JSON object; counts are decimal strings.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// All antichains over `{1..n}` with the per-antichain data every formula
/// needs.
pub struct Space {
    n: usize,
    downs: Vec<u128>,
    maxima: Vec<Vec<u8>>,
    eta: Vec<u128>,
    up: Vec<u128>,
}

impl Space {
    pub fn new(n: usize) -> Result<Space> {
        check_capability("antichain space", n, MAX_SPACE_N)?;
        let counter = IntervalCounter::global();
        let mut downs: Vec<u128> = oracle::interval_downsets(n, 0, universe(n))?.collect();
        downs.sort_unstable();
        let all = universe(n);
        let small = |c: BigCount| c.as_u128().expect("interval sizes below 2^128 for n <= 5");
        let eta = downs.iter().map(|&d| small(counter.count_region(d))).collect();
        let up = downs
            .iter()
            .map(|&d| small(counter.count_region(all & !d)))
            .collect();
        let maxima = downs.iter().map(|&d| maxima(d, n).collect()).collect();
        Ok(Space {
            n,
            downs,
            maxima,
            eta,
            up,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.downs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.downs.is_empty()
    }

    pub fn down(&self, i: usize) -> u128 {
        self.downs[i]
    }

    pub fn antichain(&self, i: usize) -> Antichain {
        Antichain::from_down_unchecked(self.downs[i], self.n)
    }

    pub fn index_of(&self, down: u128) -> Option<usize> {
        self.downs.binary_search(&down).ok()
    }

    /// `|[⊥, a_i]|`
    pub fn eta(&self, i: usize) -> u128 {
        self.eta[i]
    }

    /// `|[a_i, ⊤]|`
    pub fn up(&self, i: usize) -> u128 {
        self.up[i]
    }

    pub fn maxima(&self, i: usize) -> &[u8] {
        &self.maxima[i]
    }

    /// Indices of `[a_i, ⊤]`.
    pub fn above(&self, i: usize) -> Vec<usize> {
        let d = self.downs[i];
        (0..self.len()).filter(|&j| self.downs[j] & d == d).collect()
    }

    /// Indices of `[⊥, a_i]`.
    pub fn below(&self, i: usize) -> Vec<usize> {
        let d = self.downs[i];
        (0..self.len()).filter(|&j| self.downs[j] & !d == 0).collect()
    }

    /// Index of the downset-bitwise complement dual of `a_i`.
    pub fn dual_index(&self, i: usize) -> usize {
        self.index_of(dual_down(self.downs[i], self.n))
            .expect("dual of an antichain is an antichain")
    }

    /// Full `|[a_i, a_j]|` matrix, row-major. Only sensible for small `n`.
    pub fn interval_table(&self) -> Vec<u128> {
        let counter = IntervalCounter::global();
        let len = self.len();
        let mut t = vec![0u128; len * len];
        for i in 0..len {
            for j in 0..len {
                t[i * len + j] = counter
                    .interval_size_bits(self.downs[i], self.downs[j])
                    .as_u128()
                    .expect("small interval");
            }
        }
        t
    }
}

#[derive(Debug, Clone, Default)]
struct ShardOutput {
    sum: BigCount,
    terms: BigCount,
}

struct ShardRun {
    result: BigCount,
    terms: BigCount,
    resumed: usize,
    digest: String,
}

fn run_shards<F>(
    method: Method,
    n: usize,
    reduce: bool,
    shards: usize,
    opts: &ExecOptions,
    eval: F,
) -> Result<ShardRun>
where
    F: Fn(usize) -> ShardOutput + Sync,
{
    if opts.workers == 0 {
        return Err(Error::invalid("workers must be at least 1"));
    }
    let run = checkpoint::run_digest(method.name(), n, reduce, shards);
    let (resumed, mut writer) = match &opts.checkpoint {
        Some(path) => {
            let r = checkpoint::load(path, &run, shards)?;
            let w = CheckpointWriter::open(path, &r)?;
            (r, Some(w))
        }
        None => (Resumed::default(), None),
    };
    let mut results: Vec<Option<ShardOutput>> = vec![None; shards];
    for (&id, rec) in &resumed.records {
        results[id] = Some(ShardOutput {
            sum: rec.partial_sum.clone(),
            terms: rec.term_count.clone(),
        });
    }
    let resumed_count = resumed.records.len();
    let mut pending: Vec<usize> = (0..shards).filter(|&i| results[i].is_none()).collect();
    let mut interrupted = false;
    if let Some(k) = opts.stop_after_shards {
        if k < pending.len() {
            pending.truncate(k);
            interrupted = true;
        }
    }
    if resumed_count > 0 {
        log::info!(
            "{}: resuming with {resumed_count} of {shards} shards done",
            method.name()
        );
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let (tx, rx) = mpsc::channel::<(usize, ShardOutput)>();
    let mut write_error = None;
    std::thread::scope(|s| {
        let pending = &pending;
        let pool = &pool;
        let eval = &eval;
        s.spawn(move || {
            pool.install(|| {
                pending.par_iter().for_each_with(tx, |tx, &id| {
                    let _ = tx.send((id, eval(id)));
                })
            })
        });
        for (id, out) in rx {
            if let (Some(w), None) = (writer.as_mut(), &write_error) {
                let rec = CheckpointRecord {
                    shard_id: id,
                    partial_sum: out.sum.clone(),
                    term_count: out.terms.clone(),
                    digest: checkpoint::shard_digest(&run, id),
                };
                if let Err(e) = w.append(&rec) {
                    write_error = Some(e);
                }
            }
            results[id] = Some(out);
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }
    if interrupted {
        return Err(Error::Interrupted {
            completed: results.iter().filter(|r| r.is_some()).count(),
            total: shards,
        });
    }
    let mut result = BigCount::ZERO;
    let mut terms = BigCount::ZERO;
    for out in results.into_iter().map(|r| r.expect("every shard evaluated")) {
        result += out.sum;
        terms += out.terms;
    }
    Ok(ShardRun {
        result,
        terms,
        resumed: resumed_count,
        digest: run,
    })
}

fn check_method(method: Method, n: usize, opts: &ExecOptions) -> Result<()> {
    check_capability(method.name(), n, opts.limits.cap(method).min(hard_cap(method)))
}

fn report(method: Method, n: usize, shards: usize, run: ShardRun, start: Instant) -> ComputationReport {
    ComputationReport {
        method,
        n,
        result: run.result,
        terms: run.terms,
        seconds: start.elapsed().as_secs_f64(),
        shards,
        resumed_shards: run.resumed,
        digest: run.digest,
    }
}

/// Dispatch on `method`. `reduce_symmetry` only affects `nplus2`.
pub fn compute(
    method: Method,
    n: usize,
    reduce_symmetry: bool,
    opts: &ExecOptions,
) -> Result<ComputationReport> {
    match method {
        Method::Bruteforce => brute_force_report(n, opts),
        Method::Nplus2 => d_nplus2(n, reduce_symmetry, opts),
        Method::Nplus3 => d_nplus3(n, opts),
        Method::Nplus4 => d_nplus4(n, opts),
        Method::Wiedemann => wiedemann_report(n, opts),
    }
}

/// `D(n)` by enumeration.
pub fn brute_force_d(n: usize) -> Result<BigCount> {
    oracle::brute_force_count(n)
}

fn brute_force_report(n: usize, opts: &ExecOptions) -> Result<ComputationReport> {
    check_method(Method::Bruteforce, n, opts)?;
    let start = Instant::now();
    let run = run_shards(Method::Bruteforce, n, false, 1, opts, |_| {
        let d = oracle::brute_force_count(n).expect("capability checked");
        ShardOutput {
            sum: d.clone(),
            terms: d,
        }
    })?;
    Ok(report(Method::Bruteforce, n, 1, run, start))
}

/// `D(n+2)` as a sum over pairs `α ≤ β`. With `reduce_symmetry` the outer
/// `α` runs over class representatives weighted by orbit size; the summand
/// summed over `β` is invariant under relabelling, so this is exact.
pub fn d_nplus2(n: usize, reduce_symmetry: bool, opts: &ExecOptions) -> Result<ComputationReport> {
    check_method(Method::Nplus2, n, opts)?;
    let start = Instant::now();
    let space = Space::new(n)?;
    let shards: Vec<(usize, u64)> = if reduce_symmetry {
        symmetry::enumerate_classes(n)?
            .into_iter()
            .map(|c| {
                let i = space
                    .index_of(c.representative.down_bits())
                    .expect("representative is in the space");
                (i, c.orbit_size)
            })
            .collect()
    } else {
        (0..space.len()).map(|i| (i, 1)).collect()
    };
    let top = universe(n);
    let run = run_shards(Method::Nplus2, n, reduce_symmetry, shards.len(), opts, |s| {
        let (a, mult) = shards[s];
        let alpha = space.down(a);
        let mut inner = 0u128;
        let mut terms = 0u128;
        for beta in oracle::DownsetStream::interval(n, alpha, top) {
            let b = space.index_of(beta).expect("interval member is in the space");
            let c = connector_number_bits(alpha, space.maxima(b));
            inner += (1u128 << c) * space.up(b);
            terms += 1;
        }
        ShardOutput {
            sum: BigCount::from(inner) * BigCount::from(space.eta(a)) * BigCount::from(mult),
            terms: BigCount::from(terms),
        }
    })?;
    Ok(report(Method::Nplus2, n, shards.len(), run, start))
}

/// Σ over all `(σ, τ)` of `η(σ ∧ τ) η(σ* ∧ τ*)`.
pub fn wiedemann_d_nplus2(n: usize) -> Result<BigCount> {
    Ok(wiedemann_report(n, &ExecOptions::default())?.result)
}

fn wiedemann_report(n: usize, opts: &ExecOptions) -> Result<ComputationReport> {
    check_method(Method::Wiedemann, n, opts)?;
    let start = Instant::now();
    let space = Space::new(n)?;
    let counter = IntervalCounter::global();
    let duals: Vec<u128> = (0..space.len()).map(|i| space.down(space.dual_index(i))).collect();
    let run = run_shards(Method::Wiedemann, n, false, space.len(), opts, |s| {
        let mut sum = BigCount::ZERO;
        for t in 0..space.len() {
            let lower = counter.count_region(space.down(s) & space.down(t));
            let upper = counter.count_region(duals[s] & duals[t]);
            sum += &lower * &upper;
        }
        ShardOutput {
            sum,
            terms: BigCount::from(space.len()),
        }
    })?;
    Ok(report(Method::Wiedemann, n, space.len(), run, start))
}

/// One nonzero `(α, β_12, β_13, β_23)` group of the `D(n+3)` sum, with the
/// inner factor `|[⊥,α]| Σ_γ Π |[β_ij, γ]|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nplus3Term {
    pub alpha: Antichain,
    /// `β_12, β_13, β_23`
    pub betas: [Antichain; 3],
    pub p3: u128,
    pub inner: u128,
    pub gammas: usize,
}

struct Nplus3Ctx {
    space: Space,
    table: Vec<u128>,
}

impl Nplus3Ctx {
    fn new(n: usize) -> Result<Self> {
        let space = Space::new(n)?;
        let table = space.interval_table();
        Ok(Nplus3Ctx { space, table })
    }

    fn iv(&self, i: usize, j: usize) -> u128 {
        self.table[i * self.space.len() + j]
    }

    fn shard(&self, a: usize, mut visit: impl FnMut(usize, [usize; 3], u128, u128, usize)) {
        let sp = &self.space;
        let n = sp.n();
        let alpha = sp.down(a);
        let above = sp.above(a);
        for &b12 in &above {
            for &b13 in &above {
                for &b23 in &above {
                    let downs = [sp.down(b12), sp.down(b13), sp.down(b23)];
                    let p = p_general_bits(n, 3, alpha, &downs);
                    if p == 0 {
                        continue;
                    }
                    let join = downs[0] | downs[1] | downs[2];
                    let mut inner = 0u128;
                    let mut gammas = 0usize;
                    for g in 0..sp.len() {
                        if sp.down(g) & join == join {
                            inner += self.iv(b12, g) * self.iv(b13, g) * self.iv(b23, g);
                            gammas += 1;
                        }
                    }
                    visit(a, [b12, b13, b23], p, inner * sp.eta(a), gammas);
                }
            }
        }
    }
}

/// `D(n+3)` over `α`, three `β_ij ∈ [α,⊤]` and `γ ≥ ∨β`, skipping
/// instances whose solution count is zero.
pub fn d_nplus3(n: usize, opts: &ExecOptions) -> Result<ComputationReport> {
    check_method(Method::Nplus3, n, opts)?;
    let start = Instant::now();
    let ctx = Nplus3Ctx::new(n)?;
    let shards = ctx.space.len();
    let run = run_shards(Method::Nplus3, n, false, shards, opts, |a| {
        let mut sum = 0u128;
        let mut terms = 0u128;
        ctx.shard(a, |_, _, p, inner, gammas| {
            sum += p * inner;
            terms += gammas as u128;
        });
        ShardOutput {
            sum: BigCount::from(sum),
            terms: BigCount::from(terms),
        }
    })?;
    Ok(report(Method::Nplus3, n, shards, run, start))
}

/// Every nonzero `(α, β)` group of the `D(n+3)` sum.
pub fn nplus3_terms(n: usize) -> Result<Vec<Nplus3Term>> {
    check_capability("nplus3 term listing", n, hard_cap(Method::Nplus3))?;
    let ctx = Nplus3Ctx::new(n)?;
    let sp = &ctx.space;
    let mut out = Vec::new();
    for a in 0..sp.len() {
        ctx.shard(a, |a, b, p3, inner, gammas| {
            out.push(Nplus3Term {
                alpha: sp.antichain(a),
                betas: b.map(|i| sp.antichain(i)),
                p3,
                inner,
                gammas,
            })
        });
    }
    Ok(out)
}

/// Position of the complementary pair in [`crate::pcoef::pairs`] order
/// for four variables: `12 ↔ 34`, `13 ↔ 24`, `14 ↔ 23`.
fn complement_pair(k: usize) -> usize {
    5 - k
}

/// The second four-variable system of the `D(n+4)` sum: its variables are
/// the duals of the three-element parts, so its meet is `ε*` and the join
/// of variables `a, b` is `δ*` of the complementary pair.
pub fn upper_instance(epsilon: &Antichain, deltas: &[Antichain]) -> Result<SystemInstance> {
    if deltas.len() != 6 {
        return Err(Error::invalid(format!("expected 6 δ values, got {}", deltas.len())));
    }
    let betas = (0..6).map(|k| deltas[complement_pair(k)].dual()).collect();
    SystemInstance::new(epsilon.dual(), betas)
}

/// Call `f` with every tuple in `choices^len`, first position fastest.
fn for_each_tuple(choices: &[usize], len: usize, mut f: impl FnMut(&[usize])) {
    if choices.is_empty() && len > 0 {
        return;
    }
    let mut pos = vec![0usize; len];
    let mut tuple: Vec<usize> = vec![choices.first().copied().unwrap_or(0); len];
    loop {
        f(&tuple);
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            pos[k] += 1;
            if pos[k] < choices.len() {
                tuple[k] = choices[pos[k]];
                break;
            }
            pos[k] = 0;
            tuple[k] = choices[0];
            k += 1;
        }
    }
}

struct Nplus4Ctx {
    space: Space,
    d: usize,
}

impl Nplus4Ctx {
    fn tuple_index(&self, t: &[usize]) -> usize {
        t.iter().rev().fold(0, |acc, &i| acc * self.d + i)
    }

    fn lower_p(&self, a: usize, betas: &[usize]) -> u128 {
        let downs: Vec<u128> = betas.iter().map(|&b| self.space.down(b)).collect();
        p_general_bits(self.space.n(), 4, self.space.down(a), &downs)
    }

    fn upper_p(&self, e: usize, deltas: &[usize]) -> u128 {
        let sp = &self.space;
        let downs: Vec<u128> = (0..6)
            .map(|k| sp.down(sp.dual_index(deltas[complement_pair(k)])))
            .collect();
        p_general_bits(sp.n(), 4, sp.down(sp.dual_index(e)), &downs)
    }

    /// Contract `tensor` with `matrix[b][g]` along every one of the six axes:
    /// `out[b..] = Σ_g Π_k matrix[b_k][g_k] tensor[g..]`.
    fn contract(&self, mut tensor: Vec<u128>, matrix: &[u128]) -> Vec<u128> {
        let d = self.d;
        let mut stride = 1;
        for _axis in 0..6 {
            let mut next = vec![0u128; tensor.len()];
            for base in 0..tensor.len() {
                if (base / stride) % d != 0 {
                    continue;
                }
                for b in 0..d {
                    let mut acc = 0u128;
                    for g in 0..d {
                        let m = matrix[b * d + g];
                        if m != 0 {
                            acc += m * tensor[base + g * stride];
                        }
                    }
                    next[base + b * stride] = acc;
                }
            }
            tensor = next;
            stride *= d;
        }
        tensor
    }
}

/// `D(n+4)` from two four-variable systems glued by the six intervals
/// `[β_ij, δ_ij]`.
///
/// The upper side `Σ_ε P_4(ε*; δ*) |[ε,⊤]|` is tabulated per `δ` tuple and
/// contracted with the interval matrix along each pair axis; each shard
/// then pairs one `α` with the contracted table.
pub fn d_nplus4(n: usize, opts: &ExecOptions) -> Result<ComputationReport> {
    check_method(Method::Nplus4, n, opts)?;
    let start = Instant::now();
    let space = Space::new(n)?;
    let d = space.len();
    let ctx = Nplus4Ctx { space, d };
    let sp = &ctx.space;
    let size = d.pow(6);
    let mut weight = vec![0u128; size];
    let mut count = vec![0u128; size];
    for e in 0..d {
        let below = sp.below(e);
        for_each_tuple(&below, 6, |deltas| {
            let p = ctx.upper_p(e, deltas);
            if p != 0 {
                let idx = ctx.tuple_index(deltas);
                weight[idx] += p * sp.up(e);
                count[idx] += 1;
            }
        });
    }
    let table = sp.interval_table();
    let le: Vec<u128> = table.iter().map(|&v| u128::from(v != 0)).collect();
    let weight = ctx.contract(weight, &table);
    let count = ctx.contract(count, &le);

    let run = run_shards(Method::Nplus4, n, false, d, opts, |a| {
        let mut sum = 0u128;
        let mut terms = 0u128;
        let above = sp.above(a);
        for_each_tuple(&above, 6, |betas| {
            let p = ctx.lower_p(a, betas);
            if p != 0 {
                let idx = ctx.tuple_index(betas);
                sum += p * weight[idx];
                terms += count[idx];
            }
        });
        ShardOutput {
            sum: BigCount::from(sum * sp.eta(a)),
            terms: BigCount::from(terms),
        }
    })?;
    Ok(report(Method::Nplus4, n, d, run, start))
}

/// One nonzero term of the `D(n+4)` sum, listed explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nplus4Term {
    pub alpha: Antichain,
    /// `β_12, β_13, β_14, β_23, β_24, β_34`
    pub betas: Vec<Antichain>,
    pub epsilon: Antichain,
    pub deltas: Vec<Antichain>,
    pub p_lower: u128,
    pub p_upper: u128,
    /// `|[⊥,α]| Π |[β_ij, δ_ij]| |[ε,⊤]|`
    pub intervals: u128,
}

/// Every nonzero term of the `D(n+4)` sum, by pairing the two lists
/// directly. Only for tiny `n`.
pub fn nplus4_terms(n: usize) -> Result<Vec<Nplus4Term>> {
    check_capability("nplus4 term listing", n, 1)?;
    let space = Space::new(n)?;
    let d = space.len();
    let ctx = Nplus4Ctx { space, d };
    let sp = &ctx.space;
    let table = sp.interval_table();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for a in 0..d {
        for_each_tuple(&sp.above(a), 6, |b| {
            let p = ctx.lower_p(a, b);
            if p != 0 {
                lower.push((a, b.to_vec(), p));
            }
        });
        for_each_tuple(&sp.below(a), 6, |t| {
            let p = ctx.upper_p(a, t);
            if p != 0 {
                upper.push((a, t.to_vec(), p));
            }
        });
    }
    let mut out = Vec::new();
    for (a, b, pl) in &lower {
        for (e, t, pu) in &upper {
            let mut iv = sp.eta(*a) * sp.up(*e);
            for k in 0..6 {
                iv *= table[b[k] * d + t[k]];
            }
            if iv == 0 {
                continue;
            }
            out.push(Nplus4Term {
                alpha: sp.antichain(*a),
                betas: b.iter().map(|&i| sp.antichain(i)).collect(),
                epsilon: sp.antichain(*e),
                deltas: t.iter().map(|&i| sp.antichain(i)).collect(),
                p_lower: *pl,
                p_upper: *pu,
                intervals: iv,
            });
        }
    }
    Ok(out)
}

/// `D(m)` by every method whose cap admits it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub m: usize,
    pub values: Vec<(Method, BigCount)>,
}

/// Compute `D(m)`, `m <= max_m`, by every applicable method and require
/// all of them to agree.
pub fn consistency_matrix(max_m: usize, opts: &ExecOptions) -> Result<Vec<ConsistencyRow>> {
    let opts = ExecOptions {
        checkpoint: None,
        stop_after_shards: None,
        ..opts.clone()
    };
    let mut rows = Vec::new();
    for m in 0..=max_m {
        let mut values = Vec::new();
        for method in Method::ALL {
            let Some(n) = m.checked_sub(method.offset()) else {
                continue;
            };
            if n > opts.limits.cap(method).min(hard_cap(method)) {
                continue;
            }
            values.push((method, compute(method, n, false, &opts)?.result));
        }
        if let Some((_, first)) = values.first() {
            if values.iter().any(|(_, v)| v != first) {
                let detail: Vec<String> = values
                    .iter()
                    .map(|(meth, v)| format!("{}({})={v}", meth.name(), m - meth.offset()))
                    .collect();
                return Err(Error::Consistency(format!(
                    "D({m}) disagrees across methods: {}",
                    detail.join(", ")
                )));
            }
        }
        rows.push(ConsistencyRow { m, values });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_worker() -> ExecOptions {
        ExecOptions::with_workers(1)
    }

    #[test]
    fn small_formulas() {
        let o = one_worker();
        let d: [u128; 7] = [2, 3, 6, 20, 168, 7581, 7828354];
        for n in 0..=3 {
            let r = d_nplus2(n, false, &o).unwrap();
            assert_eq!(r.result, BigCount::from(d[n + 2]));
            assert_eq!(r.terms, BigCount::from(d[n + 1]));
            assert_eq!(d_nplus2(n, true, &o).unwrap().result, r.result);
            assert_eq!(wiedemann_d_nplus2(n).unwrap(), r.result);
        }
        for n in 0..=2 {
            assert_eq!(d_nplus3(n, &o).unwrap().result, BigCount::from(d[n + 3]));
        }
        for n in 0..=1 {
            assert_eq!(d_nplus4(n, &o).unwrap().result, BigCount::from(d[n + 4]));
        }
    }

    #[test]
    fn caps_are_enforced() {
        let o = one_worker();
        assert!(matches!(d_nplus3(4, &o), Err(Error::Capability { .. })));
        let tight = ExecOptions {
            limits: Limits {
                nplus2: 1,
                ..Limits::default()
            },
            ..o
        };
        assert!(matches!(d_nplus2(2, false, &tight), Err(Error::Capability { .. })));
        assert!(matches!(
            d_nplus2(1, false, &ExecOptions::with_workers(0)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn listed_terms_sum_to_the_formulas() {
        let t3: u128 = nplus3_terms(1).unwrap().iter().map(|t| t.p3 * t.inner).sum();
        assert_eq!(t3, 168);
        let t4: u128 = nplus4_terms(0)
            .unwrap()
            .iter()
            .map(|t| t.p_lower * t.p_upper * t.intervals)
            .sum();
        assert_eq!(t4, 168);
        let r = d_nplus4(0, &one_worker()).unwrap();
        assert_eq!(r.terms, BigCount::from(nplus4_terms(0).unwrap().len()));
    }

    #[test]
    fn tuple_odometer() {
        let mut seen = Vec::new();
        for_each_tuple(&[3, 5], 2, |t| seen.push(t.to_vec()));
        assert_eq!(seen, vec![vec![3, 3], vec![5, 3], vec![3, 5], vec![5, 5]]);
        let mut k = 0;
        for_each_tuple(&[], 2, |_| k += 1);
        assert_eq!(k, 0);
    }
}
