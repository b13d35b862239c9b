//! Regression against the reference worked examples.
//!
//! * `D(3)` and `D(4)` from three-variable systems, with the summands
//!   grouped by relabelling of the variables (two tables).
//! * `D(4)` from two four-variable systems: the lower and upper instance
//!   classes with their solution counts (two tables), and the number of
//!   equivalent combinations per pair of classes (one table).
//!
//! Each reference row is recomputed from scratch and compared field by
//! field.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::antichain::Antichain;
use crate::engine::{self, nplus3_terms, nplus4_terms};
use crate::error::Result;
use crate::pcoef::{pair_index, pairs, p_general_bits, SystemInstance};
use crate::symmetry::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub row: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub table: String,
    pub ok: bool,
    pub rows: Vec<RowCheck>,
}

impl TableReport {
    fn new(table: &str) -> Self {
        TableReport {
            table: table.to_string(),
            ok: true,
            rows: Vec::new(),
        }
    }

    fn check(&mut self, row: impl Into<String>, expected: impl ToString, actual: impl ToString) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let ok = expected == actual;
        self.ok &= ok;
        self.rows.push(RowCheck {
            row: row.into(),
            expected,
            actual,
            ok,
        });
    }
}

fn parse(text: &str, n: usize) -> Antichain {
    Antichain::parse(text, n, false).expect("table entries are well formed")
}

/// Relabel the variables of an `r`-variable tuple `(α, β in pairs order)`:
/// `β'_{π(i)π(j)} = β_ij`.
fn relabel(r: usize, perm: &Permutation, tuple: &[u128]) -> Vec<u128> {
    let mut out = tuple.to_vec();
    for (k, (i, j)) in pairs(r).enumerate() {
        let pi = perm.image()[i - 1] as usize;
        let pj = perm.image()[j - 1] as usize;
        out[1 + pair_index(r, pi, pj)] = tuple[1 + k];
    }
    out
}

fn orbit(r: usize, perms: &[Permutation], tuple: &[u128]) -> Vec<Vec<u128>> {
    let mut o: Vec<Vec<u128>> = perms.iter().map(|p| relabel(r, p, tuple)).collect();
    o.sort();
    o.dedup();
    o
}

fn orbit_key(r: usize, perms: &[Permutation], tuple: &[u128]) -> Vec<u128> {
    orbit(r, perms, tuple).swap_remove(0)
}

struct P3Row {
    alpha: &'static str,
    betas: [&'static str; 3],
    eq: usize,
    p3: u128,
    inner: u128,
    total: u128,
}

const fn row3(
    alpha: &'static str,
    betas: [&'static str; 3],
    eq: usize,
    p3: u128,
    inner: u128,
    total: u128,
) -> P3Row {
    P3Row {
        alpha,
        betas,
        eq,
        p3,
        inner,
        total,
    }
}

const TABLE3: [P3Row; 4] = [
    row3("{}", ["{}", "{}", "{}"], 1, 1, 9, 9),
    row3("{}", ["{0}", "{0}", "{}"], 3, 1, 2, 6),
    row3("{}", ["{0}", "{0}", "{0}"], 1, 3, 1, 3),
    row3("{0}", ["{0}", "{0}", "{0}"], 1, 1, 2, 2),
];

const TABLE4: [P3Row; 10] = [
    row3("{}", ["{}", "{}", "{}"], 1, 1, 36, 36),
    row3("{}", ["{0}", "{0}", "{}"], 3, 1, 14, 42),
    row3("{}", ["{0}", "{0}", "{0}"], 1, 3, 9, 27),
    row3("{}", ["{1}", "{1}", "{}"], 3, 1, 3, 9),
    row3("{}", ["{1}", "{1}", "{0}"], 3, 2, 2, 12),
    row3("{}", ["{1}", "{1}", "{1}"], 1, 3, 1, 3),
    row3("{0}", ["{0}", "{0}", "{0}"], 1, 1, 18, 18),
    row3("{0}", ["{1}", "{1}", "{0}"], 3, 1, 4, 12),
    row3("{0}", ["{1}", "{1}", "{1}"], 1, 3, 2, 6),
    row3("{1}", ["{1}", "{1}", "{1}"], 1, 1, 3, 3),
];

#[derive(Default)]
struct Group3 {
    members: usize,
    p3: Vec<u128>,
    inner: Vec<u128>,
    total: u128,
}

fn p3_table(name: &str, n: usize, rows: &[P3Row], expected_total: u128) -> Result<TableReport> {
    let perms = Permutation::all(3);
    let mut groups: BTreeMap<Vec<u128>, Group3> = BTreeMap::new();
    for t in nplus3_terms(n)? {
        let tuple: Vec<u128> = std::iter::once(&t.alpha)
            .chain(t.betas.iter())
            .map(|a| a.down_bits())
            .collect();
        let g = groups.entry(orbit_key(3, &perms, &tuple)).or_default();
        g.members += 1;
        g.p3.push(t.p3);
        g.inner.push(t.inner);
        g.total += t.p3 * t.inner;
    }
    let mut rep = TableReport::new(name);
    let mut sum = 0u128;
    for (k, row) in rows.iter().enumerate() {
        let label = format!(
            "row {} ({}; {}, {}, {})",
            k + 1,
            row.alpha,
            row.betas[0],
            row.betas[1],
            row.betas[2]
        );
        let tuple: Vec<u128> = std::iter::once(row.alpha)
            .chain(row.betas)
            .map(|s| parse(s, n).down_bits())
            .collect();
        let size = orbit(3, &perms, &tuple).len();
        let actual = match groups.get(&orbit_key(3, &perms, &tuple)) {
            Some(g) if g.members == size => {
                sum += g.total;
                let uniform = |v: &[u128]| {
                    if v.iter().all(|x| *x == v[0]) {
                        v[0].to_string()
                    } else {
                        format!("{v:?}")
                    }
                };
                format!(
                    "eq={} p3={} inner={} total={}",
                    g.members,
                    uniform(&g.p3),
                    uniform(&g.inner),
                    g.total
                )
            }
            Some(g) => format!("only {} of {size} equivalents nonzero", g.members),
            None => "no nonzero term".to_string(),
        };
        rep.check(
            label,
            format!(
                "eq={} p3={} inner={} total={}",
                row.eq, row.p3, row.inner, row.total
            ),
            actual,
        );
    }
    rep.check("nonzero groups", rows.len(), groups.len());
    rep.check("sum", expected_total, sum);
    Ok(rep)
}

/// Grouped summands of `D(3)` from the three-variable system at `n = 0`.
pub fn table3() -> Result<TableReport> {
    p3_table("table3", 0, &TABLE3, 20)
}

/// Grouped summands of `D(4)` from the three-variable system at `n = 1`.
pub fn table4() -> Result<TableReport> {
    p3_table("table4", 1, &TABLE4, 168)
}

struct P4Row {
    label: &'static str,
    /// `α` for lower rows, `ε` for upper rows
    head: &'static str,
    /// entries in pair order `12, 13, 14, 23, 24, 34`
    pairs: [&'static str; 6],
    eq: usize,
    p4: u128,
}

const B: &str = "{}";
const E: &str = "{0}";

const fn row4(label: &'static str, head: &'static str, pairs: [&'static str; 6], eq: usize, p4: u128) -> P4Row {
    P4Row {
        label,
        head,
        pairs,
        eq,
        p4,
    }
}

const TABLE5: [P4Row; 8] = [
    row4("A1", B, [B, B, B, B, B, B], 1, 1),
    row4("A2", B, [E, B, B, B, B, B], 6, 0),
    row4("A3", B, [E, E, B, B, B, B], 15, 0),
    row4("A4", B, [E, E, E, B, B, B], 4, 1),
    row4("A5", B, [E, E, E, E, B, B], 15, 0),
    row4("A6", B, [E, E, E, E, E, B], 6, 1),
    row4("A7", B, [E, E, E, E, E, E], 1, 4),
    row4("A8", E, [E, E, E, E, E, E], 1, 1),
];

const TABLE6: [P4Row; 8] = [
    row4("B1", E, [E, E, E, E, E, E], 1, 1),
    row4("B2", E, [E, E, E, E, E, B], 6, 0),
    row4("B3", E, [E, E, E, E, B, B], 15, 0),
    row4("B4", E, [E, E, E, B, B, B], 4, 1),
    row4("B5", E, [E, E, B, B, B, B], 15, 0),
    row4("B6", E, [E, B, B, B, B, B], 6, 1),
    row4("B7", E, [B, B, B, B, B, B], 1, 4),
    row4("B8", B, [B, B, B, B, B, B], 1, 1),
];

/// Nonzero cells of the combination table, `(A row, B row, count)`.
const TABLE7: [(usize, usize, usize); 10] = [
    (1, 1, 1),
    (1, 4, 4),
    (1, 6, 6),
    (1, 7, 1),
    (1, 8, 1),
    (4, 1, 4),
    (4, 4, 4),
    (6, 1, 6),
    (7, 1, 1),
    (8, 1, 1),
];

/// `D(4) = 2^6 + 8·2^3 + 14·2^1 + 12·2^0`, as exponent → multiplicity.
const EXPANSION: [(u32, u128); 4] = [(6, 1), (3, 8), (1, 14), (0, 12)];

fn p4_tuple(row: &P4Row) -> Vec<u128> {
    std::iter::once(row.head)
        .chain(row.pairs)
        .map(|s| parse(s, 0).down_bits())
        .collect()
}

fn p4_value(upper: bool, tuple: &[u128]) -> Result<u128> {
    let head = Antichain::from_down_unchecked(tuple[0], 0);
    let rest: Vec<Antichain> = tuple[1..]
        .iter()
        .map(|&d| Antichain::from_down_unchecked(d, 0))
        .collect();
    let inst = if upper {
        engine::upper_instance(&head, &rest)?
    } else {
        SystemInstance::new(head, rest)?
    };
    let downs: Vec<u128> = inst.betas().iter().map(|b| b.down_bits()).collect();
    Ok(p_general_bits(0, 4, inst.alpha().down_bits(), &downs))
}

/// Every `(head, six pair entries)` tuple over `D_0`.
fn all_tuples_d0() -> Vec<Vec<u128>> {
    (0u32..1 << 7)
        .map(|m| (0..7).map(|k| u128::from(m >> k & 1 == 1)).collect())
        .collect()
}

fn p4_class_table(name: &str, rows: &[P4Row], upper: bool) -> Result<TableReport> {
    let perms = Permutation::all(4);
    let mut rep = TableReport::new(name);
    let all = all_tuples_d0();
    for row in rows {
        let tuple = p4_tuple(row);
        let p4 = p4_value(upper, &tuple)?;
        // nonzero rows are single classes; zero rows stand for every tuple
        // with the same head and the same number of `{0}` entries
        let eq = if p4 != 0 {
            orbit(4, &perms, &tuple).len()
        } else {
            let weight = tuple[1..].iter().filter(|&&d| d != 0).count();
            let same: Vec<&Vec<u128>> = all
                .iter()
                .filter(|t| t[0] == tuple[0] && t[1..].iter().filter(|&&d| d != 0).count() == weight)
                .collect();
            let mut nonzero = 0;
            for t in &same {
                if p4_value(upper, t)? != 0 {
                    nonzero += 1;
                }
            }
            rep.check(format!("{} zero class", row.label), 0, nonzero);
            same.len()
        };
        rep.check(
            row.label,
            format!("eq={} p4={}", row.eq, row.p4),
            format!("eq={eq} p4={p4}"),
        );
    }
    Ok(rep)
}

/// Lower instance classes of the `D(4)` example.
pub fn table5() -> Result<TableReport> {
    p4_class_table("table5", &TABLE5, false)
}

/// Upper instance classes of the `D(4)` example.
pub fn table6() -> Result<TableReport> {
    p4_class_table("table6", &TABLE6, true)
}

/// Combination counts of the `D(4)` example and its power-of-two expansion.
pub fn table7() -> Result<TableReport> {
    let perms = Permutation::all(4);
    let class_of = |rows: &[P4Row], t: &[u128]| -> Option<usize> {
        let key = orbit_key(4, &perms, t);
        rows.iter()
            .position(|r| r.p4 != 0 && orbit_key(4, &perms, &p4_tuple(r)) == key)
            .map(|i| i + 1)
    };
    let mut cells: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut expansion: BTreeMap<u32, u128> = BTreeMap::new();
    let mut rep = TableReport::new("table7");
    let mut unclassified = 0;
    for term in nplus4_terms(0)? {
        let lower: Vec<u128> = std::iter::once(&term.alpha)
            .chain(&term.betas)
            .map(|a| a.down_bits())
            .collect();
        let upper: Vec<u128> = std::iter::once(&term.epsilon)
            .chain(&term.deltas)
            .map(|a| a.down_bits())
            .collect();
        match (class_of(&TABLE5, &lower), class_of(&TABLE6, &upper)) {
            (Some(a), Some(b)) => *cells.entry((a, b)).or_default() += 1,
            _ => unclassified += 1,
        }
        if term.intervals.is_power_of_two() {
            *expansion.entry(term.intervals.trailing_zeros()).or_default() +=
                term.p_lower * term.p_upper;
        } else {
            unclassified += 1;
        }
    }
    rep.check("terms outside listed classes", 0, unclassified);
    for a in 1..=8 {
        for b in 1..=8 {
            let expected = TABLE7
                .iter()
                .find(|c| c.0 == a && c.1 == b)
                .map_or(0, |c| c.2);
            let actual = cells.get(&(a, b)).copied().unwrap_or(0);
            if expected != 0 || actual != 0 {
                rep.check(format!("A{a}-B{b}"), expected, actual);
            }
        }
    }
    let fmt = |m: &BTreeMap<u32, u128>| {
        m.iter()
            .rev()
            .map(|(e, c)| format!("{c}x2^{e}"))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    let expected: BTreeMap<u32, u128> = EXPANSION.into_iter().collect();
    rep.check("expansion", fmt(&expected), fmt(&expansion));
    let total: u128 = expansion.iter().map(|(e, c)| c << e).sum();
    rep.check("sum", 168, total);
    Ok(rep)
}

/// All five tables.
pub fn reproduce_all() -> Result<Vec<TableReport>> {
    Ok(vec![table3()?, table4()?, table5()?, table6()?, table7()?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_ok(rep: TableReport) {
        let bad: Vec<&RowCheck> = rep.rows.iter().filter(|r| !r.ok).collect();
        assert!(rep.ok, "{}: {bad:#?}", rep.table);
    }

    #[test]
    fn three_variable_tables() {
        assert_ok(table3().unwrap());
        assert_ok(table4().unwrap());
    }

    #[test]
    fn four_variable_tables() {
        assert_ok(table5().unwrap());
        assert_ok(table6().unwrap());
        assert_ok(table7().unwrap());
    }
}
