//! Connection graphs and solution counts of join/meet systems.
//!
//! The general system in `r` antichain variables is
//!
//! ```text
//! χ_1 ∧ ... ∧ χ_r = α
//! χ_k ∨ χ_l       = β_kl     for every pair k < l
//! ```
//!
//! For `r = 2` the number of solutions is `2^C`, where `C` is the number of
//! connected components of the graph on the sets of `β − α` in which two
//! sets are adjacent when their intersection is not dominated by `α`.
//!
//! For general `r` the count is a product of per-component weights, obtained
//! by reducing the system set by set. The reduction here runs over every
//! subset `x` of the base set, not only over the sets of `β`:
//!
//! * `x` dominated by every `β_kl` but not by `α` is *free*: exactly one
//!   variable omits it, and that choice is shared along comparabilities.
//! * `x` dominated by some but not all `β_kl` is *forced*: the variables
//!   containing it are `S_x = {s : x is dominated by β_si for every i ≠ s}`,
//!   and the pairs `kl` not dominating `x` must be exactly the pairs inside
//!   the complement of `S_x`, otherwise there is no solution.
//! * Free subsets form components whose maximal sets are the sets of
//!   `(β_12 ∧ ... ) − α`; two of them are joined iff their intersection is
//!   not dominated by `α`. A component may not assign its omitted variable
//!   to any index in `S_y` for a forced `y` directly above one of its
//!   subsets, so its weight is `r − |∪ S_y|`.
//!
//! The product of component weights is the exact number of solutions; the
//! oracle module checks this against exhaustive search.

use serde::Serialize;

use crate::antichain::{bits_of, universe, Antichain, ElementSet};
use crate::count::BigCount;
use crate::error::{Error, Result};

/// Largest supported number of variables.
pub const MAX_R: usize = 8;

/// Set of variable indices `{1..r}`, bit `s-1` for index `s`.
pub type IndexSet = u8;

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(len: usize) -> Self {
        DisjointSets {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns true if the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    /// Group `0..len` by representative, groups ordered by smallest member.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let len = self.parent.len();
        let mut slot = vec![usize::MAX; len];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..len {
            let root = self.find(i);
            if slot[root] == usize::MAX {
                slot[root] = out.len();
                out.push(Vec::new());
            }
            out[slot[root]].push(i);
        }
        out
    }
}

/// Pairs `(i, j)`, `1 <= i < j <= r`, in the order `β` tables are stored.
pub fn pairs(r: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=r).flat_map(move |i| (i + 1..=r).map(move |j| (i, j)))
}

/// Position of the unordered pair `{i, j}` in [`pairs`] order.
pub fn pair_index(r: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(1 <= i && i < j && j <= r);
    // pairs starting with 1..i-1 come first
    (i - 1) * (2 * r - i) / 2 + (j - i - 1)
}

/// One instance of the `r`-variable system: `α` and the symmetric table
/// `β_ij`, stored in [`pairs`] order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemInstance {
    r: usize,
    alpha: Antichain,
    betas: Vec<Antichain>,
}

impl SystemInstance {
    pub fn new(alpha: Antichain, betas: Vec<Antichain>) -> Result<Self> {
        let m = betas.len();
        let r = (1..=MAX_R)
            .find(|&r| r * (r - 1) / 2 == m)
            .filter(|&r| r >= 2)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "{m} right-hand sides do not match r(r-1)/2 for 2 <= r <= {MAX_R}"
                ))
            })?;
        for b in &betas {
            if b.n() != alpha.n() {
                return Err(Error::invalid(format!(
                    "base-set size mismatch: alpha has n = {}, beta has n = {}",
                    alpha.n(),
                    b.n()
                )));
            }
        }
        Ok(SystemInstance { r, alpha, betas })
    }

    /// Build from a full `r × r` table; the diagonal is ignored and the
    /// table must be symmetric.
    pub fn from_table(alpha: Antichain, table: &[Vec<Antichain>]) -> Result<Self> {
        let r = table.len();
        if table.iter().any(|row| row.len() != r) {
            return Err(Error::invalid("beta table is not square"));
        }
        let mut betas = Vec::new();
        for (i, j) in pairs(r) {
            if table[i - 1][j - 1] != table[j - 1][i - 1] {
                return Err(Error::invalid(format!("beta table not symmetric at ({i},{j})")));
            }
            betas.push(table[i - 1][j - 1].clone());
        }
        SystemInstance::new(alpha, betas)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    pub fn alpha(&self) -> &Antichain {
        &self.alpha
    }

    pub fn betas(&self) -> &[Antichain] {
        &self.betas
    }

    /// `β_ij` for 1-based `i != j`.
    pub fn beta(&self, i: usize, j: usize) -> &Antichain {
        &self.betas[pair_index(self.r, i, j)]
    }

    /// `β = ∪ β_kl` as a set of sets, sorted canonically.
    pub fn beta_union(&self) -> Vec<ElementSet> {
        let mut all: Vec<ElementSet> = self.betas.iter().flat_map(|b| b.sets()).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// `γ = β − α`.
    pub fn gamma(&self) -> Vec<ElementSet> {
        self.beta_union()
            .into_iter()
            .filter(|s| !self.alpha.contains(*s))
            .collect()
    }

    fn downs(&self) -> Vec<u128> {
        self.betas.iter().map(|b| b.down_bits()).collect()
    }
}

/// `{X ∩ Y} ≰ α`.
pub fn directly_connected(x: ElementSet, y: ElementSet, alpha: &Antichain) -> bool {
    alpha.down_bits() >> (x.bits() & y.bits()) & 1 == 0
}

/// Connected components of the graph on the sets of `beta` not dominated
/// by `alpha` (for `alpha <= beta` these are exactly `beta − alpha`).
pub(crate) fn connection_components(alpha_down: u128, beta: &[ElementSet]) -> Vec<Vec<ElementSet>> {
    let vertices: Vec<ElementSet> = beta
        .iter()
        .copied()
        .filter(|s| alpha_down >> s.bits() & 1 == 0)
        .collect();
    let mut dsu = DisjointSets::new(vertices.len());
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if alpha_down >> (vertices[i].bits() & vertices[j].bits()) & 1 == 0 {
                dsu.union(i, j);
            }
        }
    }
    dsu.groups()
        .into_iter()
        .map(|g| g.into_iter().map(|i| vertices[i]).collect())
        .collect()
}

/// Component count on raw bits; the hot path of the `D(n+2)` sum.
#[inline]
pub(crate) fn connector_number_bits(alpha_down: u128, beta_sets: &[u8]) -> u32 {
    let mut verts = [0u8; 64];
    let mut len = 0;
    for &s in beta_sets {
        if alpha_down >> s & 1 == 0 {
            verts[len] = s;
            len += 1;
        }
    }
    let mut parent = [0u8; 64];
    for (i, p) in parent.iter_mut().enumerate().take(len) {
        *p = i as u8;
    }
    fn find(parent: &mut [u8; 64], mut i: u8) -> u8 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    let mut components = len as u32;
    for i in 0..len {
        for j in i + 1..len {
            if alpha_down >> (verts[i] & verts[j]) & 1 == 0 {
                let (a, b) = (find(&mut parent, i as u8), find(&mut parent, j as u8));
                if a != b {
                    parent[b as usize] = a;
                    components -= 1;
                }
            }
        }
    }
    components
}

/// Number of connected components `C_{α,β}` of the connection graph.
pub fn connector_number(alpha: &Antichain, beta: &Antichain) -> Result<usize> {
    if !alpha.le(beta)? {
        return Err(Error::precondition(format!(
            "connector number needs alpha <= beta, got {alpha} and {beta}"
        )));
    }
    Ok(connection_components(alpha.down_bits(), beta.sets()).len())
}

/// `P(α, β) = 2^{C_{α,β}}`, the number of solutions of `χ ∧ υ = α`,
/// `χ ∨ υ = β`. Zero when `α ≰ β`.
pub fn p2(alpha: &Antichain, beta: &Antichain) -> Result<BigCount> {
    if !alpha.le(beta)? {
        return Ok(BigCount::ZERO);
    }
    let c = connection_components(alpha.down_bits(), beta.sets()).len();
    Ok(BigCount::pow2(c as u32))
}

/// Connection graph of an instance over `γ = β − α`, with the per-set
/// index data used by the component weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectionDecomposition {
    pub r: usize,
    pub vertices: Vec<ElementSet>,
    /// Component index of each vertex.
    pub component_of: Vec<usize>,
    /// Vertex indices per component, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    /// `S_X = {s : X ∈ β_si for every i ≠ s}` for dominating vertices not
    /// in every `β_ij`; empty for all other vertices.
    pub index_sets: Vec<IndexSet>,
    /// `X ∈ β_ij` for every pair.
    pub in_all_beta: Vec<bool>,
    /// No other vertex strictly contains `X`.
    pub dominating: Vec<bool>,
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Vertices, components (union-find over directly connected pairs) and the
/// membership-based `S_X` / all-`β` flags of an instance.
pub fn decompose_connections(inst: &SystemInstance) -> Result<ConnectionDecomposition> {
    for (k, (i, j)) in pairs(inst.r).enumerate() {
        if !inst.alpha.le(&inst.betas[k])? {
            return Err(Error::precondition(format!(
                "alpha {} is not <= beta_{i}{j} = {}",
                inst.alpha, inst.betas[k]
            )));
        }
    }
    let vertices = inst.gamma();
    let alpha_down = inst.alpha.down_bits();
    let mut dsu = DisjointSets::new(vertices.len());
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            if alpha_down >> (vertices[a].bits() & vertices[b].bits()) & 1 == 0 {
                dsu.union(a, b);
            }
        }
    }
    let components = dsu.groups();
    let mut component_of = vec![0; vertices.len()];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }
    let r = inst.r;
    let mut index_sets = Vec::with_capacity(vertices.len());
    let mut in_all_beta = Vec::with_capacity(vertices.len());
    let mut dominating = Vec::with_capacity(vertices.len());
    for &x in &vertices {
        let everywhere = inst.betas.iter().all(|b| b.contains(x));
        let maximal = !vertices.iter().any(|&y| y != x && x.is_subset(y));
        let mut s_x: IndexSet = 0;
        if maximal && !everywhere {
            for s in 1..=r {
                if (1..=r).filter(|&i| i != s).all(|i| inst.beta(s, i).contains(x)) {
                    s_x |= 1 << (s - 1);
                }
            }
        }
        in_all_beta.push(everywhere);
        dominating.push(maximal);
        index_sets.push(s_x);
    }
    Ok(ConnectionDecomposition {
        r,
        vertices,
        component_of,
        components,
        index_sets,
        in_all_beta,
        dominating,
    })
}

/// `w(c)`: with a vertex in every `β_ij`, `r − |∪ S_X|` (floored at 0);
/// otherwise 0 if `∪ S_X` covers `{1..r}` and 1 if not. A dominating
/// vertex outside some `β_ij` with empty `S_X` cannot be placed in any
/// variable, so its component weighs 0.
///
/// This is the per-component rule read directly off the `γ` graph. It is
/// exact when every component is a single dominating set or lies entirely
/// inside every `β_ij`; [`p_general`] uses the full reduction instead.
pub fn component_weight(component: &[usize], decomp: &ConnectionDecomposition) -> u32 {
    let r = decomp.r as u32;
    if component
        .iter()
        .any(|&v| decomp.dominating[v] && !decomp.in_all_beta[v] && decomp.index_sets[v] == 0)
    {
        return 0;
    }
    let union = component
        .iter()
        .fold(0 as IndexSet, |acc, &v| acc | decomp.index_sets[v]);
    let covered = union.count_ones();
    if component.iter().any(|&v| decomp.in_all_beta[v]) {
        r.saturating_sub(covered)
    } else if covered == r {
        0
    } else {
        1
    }
}

/// A subset dominated by some but not all `β_ij`, with the variables that
/// must contain it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcedSet {
    pub set: ElementSet,
    pub index_set: IndexSet,
}

/// A component of the free region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedComponent {
    /// Maximal free sets of the component (sets of `∧β_ij − α`).
    pub maxima: Vec<ElementSet>,
    /// Indices the component cannot leave out.
    pub excluded: IndexSet,
    pub weight: u32,
}

/// Result of the set-by-set reduction of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction {
    /// False when some `β_ij` does not dominate `α`, or a forced set's
    /// missing pairs are not the pairs of a single index group.
    pub consistent: bool,
    pub forced: Vec<ForcedSet>,
    pub components: Vec<WeightedComponent>,
}

impl Reduction {
    pub fn count(&self) -> BigCount {
        if !self.consistent {
            return BigCount::ZERO;
        }
        self.components
            .iter()
            .map(|c| BigCount::from(c.weight))
            .product()
    }
}

struct PairMasks {
    /// Pairs touching each variable, as bitmasks over pair positions.
    touching: [u32; MAX_R],
    all: u32,
}

impl PairMasks {
    fn new(r: usize) -> Self {
        let mut touching = [0u32; MAX_R];
        for (k, (i, j)) in pairs(r).enumerate() {
            touching[i - 1] |= 1 << k;
            touching[j - 1] |= 1 << k;
        }
        let m = r * (r - 1) / 2;
        let all = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        PairMasks { touching, all }
    }
}

/// Variables forced to contain a set dominated by the pairs in `pm`, or
/// `None` when the pairs missing from `pm` are not all pairs of one group.
#[inline]
fn forced_index_set(pm: u32, r: usize, masks: &PairMasks) -> Option<IndexSet> {
    let mut t: IndexSet = 0;
    let mut cover = 0u32;
    for s in 0..r {
        if masks.touching[s] & !pm == 0 {
            t |= 1 << s;
            cover |= masks.touching[s];
        }
    }
    let missing = masks.all & !pm;
    let inside_complement = masks.all & !cover;
    (missing == inside_complement).then_some(t)
}

/// Core of the reduction on raw bitsets. Returns the per-subset data
/// needed by both the fast count and the descriptive [`Reduction`].
struct Reduced {
    free: u128,
    forced: u128,
    index_of: [IndexSet; 128],
    root: [u8; 128],
    excluded: [IndexSet; 128],
}

fn reduce_bits(n: usize, r: usize, alpha_down: u128, beta_downs: &[u128]) -> Option<Reduced> {
    if beta_downs.iter().any(|&b| alpha_down & !b != 0) {
        return None;
    }
    let masks = PairMasks::new(r);
    let all = beta_downs.iter().fold(universe(n), |acc, &b| acc & b);
    let any = beta_downs.iter().fold(0u128, |acc, &b| acc | b);
    let free = all & !alpha_down;
    let forced = any & !all;

    let mut index_of = [0 as IndexSet; 128];
    for x in bits_of(forced) {
        let mut pm = 0u32;
        for (k, &b) in beta_downs.iter().enumerate() {
            pm |= ((b >> x & 1) as u32) << k;
        }
        index_of[x as usize] = forced_index_set(pm, r, &masks)?;
    }

    let mut root = [0u8; 128];
    for x in bits_of(free) {
        root[x as usize] = x;
    }
    fn find(root: &mut [u8; 128], mut x: u8) -> u8 {
        while root[x as usize] != x {
            root[x as usize] = root[root[x as usize] as usize];
            x = root[x as usize];
        }
        x
    }
    // comparability inside the free region is generated by covering pairs
    for x in bits_of(free) {
        for e in 0..n {
            let y = x & !(1 << e);
            if y != x && free >> y & 1 == 1 {
                let (a, b) = (find(&mut root, x), find(&mut root, y));
                if a != b {
                    root[a.max(b) as usize] = a.min(b);
                }
            }
        }
    }
    for x in bits_of(free) {
        root[x as usize] = find(&mut root, x);
    }

    let mut excluded = [0 as IndexSet; 128];
    for x in bits_of(forced) {
        for e in 0..n {
            let y = x & !(1 << e);
            if y != x && free >> y & 1 == 1 {
                excluded[root[y as usize] as usize] |= index_of[x as usize];
            }
        }
    }
    Some(Reduced {
        free,
        forced,
        index_of,
        root,
        excluded,
    })
}

/// Solution count on raw downset bitsets (`beta_downs` in [`pairs`] order).
pub(crate) fn p_general_bits(n: usize, r: usize, alpha_down: u128, beta_downs: &[u128]) -> u128 {
    let Some(red) = reduce_bits(n, r, alpha_down, beta_downs) else {
        return 0;
    };
    let mut product = 1u128;
    for x in bits_of(red.free) {
        if red.root[x as usize] == x {
            let w = r as u32 - red.excluded[x as usize].count_ones();
            if w == 0 {
                return 0;
            }
            product *= w as u128;
        }
    }
    product
}

/// Set-by-set reduction of an instance: forced sets with their index sets,
/// and the weighted components of the free region.
pub fn reduce(inst: &SystemInstance) -> Reduction {
    let n = inst.n();
    let r = inst.r;
    let Some(red) = reduce_bits(n, r, inst.alpha.down_bits(), &inst.downs()) else {
        return Reduction {
            consistent: false,
            forced: Vec::new(),
            components: Vec::new(),
        };
    };
    let mut forced: Vec<ForcedSet> = bits_of(red.forced)
        .map(|x| ForcedSet {
            set: ElementSet::from_bits_unchecked(x, n),
            index_set: red.index_of[x as usize],
        })
        .collect();
    forced.sort_by(|a, b| b.set.cmp(&a.set));

    let free_maxima: Vec<u8> = crate::antichain::maxima(red.free, n).collect();
    let mut components = Vec::new();
    for x in bits_of(red.free) {
        if red.root[x as usize] != x {
            continue;
        }
        let mut maxima: Vec<ElementSet> = free_maxima
            .iter()
            .filter(|&&m| red.root[m as usize] == x)
            .map(|&m| ElementSet::from_bits_unchecked(m, n))
            .collect();
        maxima.sort_unstable();
        let excluded = red.excluded[x as usize];
        components.push(WeightedComponent {
            maxima,
            excluded,
            weight: r as u32 - excluded.count_ones(),
        });
    }
    components.sort_by(|a, b| a.maxima.cmp(&b.maxima));
    Reduction {
        consistent: true,
        forced,
        components,
    }
}

/// `P_r(α, β_ij)`: the exact number of solutions of the `r`-variable
/// system. Zero for unsatisfiable right-hand sides.
pub fn p_general(inst: &SystemInstance) -> BigCount {
    BigCount::from(p_general_bits(
        inst.n(),
        inst.r,
        inst.alpha.down_bits(),
        &inst.downs(),
    ))
}

/// Same count, expressed through the components of `(α, ∧β_ij)`: the free
/// region's maxima are the sets of that meet not in `α`, so its component
/// structure is the two-variable connection graph of that pair.
pub fn free_region_connector(inst: &SystemInstance) -> Result<usize> {
    let meet = inst
        .betas
        .iter()
        .try_fold(Antichain::top(inst.n()), |acc, b| acc.meet(b))?;
    connector_number(&inst.alpha, &meet)
}
