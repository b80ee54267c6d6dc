//! Cross table, crossing counts and incremental move deltas.
//!
//! `c(u, v)` is the number of crossings between edges of `u` and edges of `v`
//! when `u` is placed left of `v`. The crossing number of an ordering is the sum
//! of `c(π(i), π(j))` over `i < j`, so every move changes it by a sum of
//! differences `c(x, y) - c(y, x)` that can be read straight off the table.

use crate::{BipartiteInstance, Error, Ordering, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossTable {
    n2: usize,
    /// Row-major `c(u, v)`.
    c: Vec<u64>,
    /// Row-major `c(u, v) - c(v, u)`.
    diff: Vec<i64>,
    degrees: Vec<usize>,
    build_ops: u64,
}

impl CrossTable {
    /// Builds the table with one two-pointer merge per unordered pair of free
    /// vertices.
    ///
    /// For `N(u)` and `N(v)` sorted, a single pass yields both the number of
    /// pairs `a > b` (`a ∈ N(u)`, `b ∈ N(v)`) and the number of shared
    /// neighbours; the mirrored entry follows from
    /// `c(u, v) + c(v, u) = deg(u)·deg(v) - |N(u) ∩ N(v)|`.
    pub fn build(inst: &BipartiteInstance) -> Self {
        let n2 = inst.n2();
        let mut c = vec![0u64; n2 * n2];
        let mut diff = vec![0i64; n2 * n2];
        let degrees: Vec<usize> = (0..n2).map(|v| inst.degree(v)).collect();
        let mut ops = 0u64;

        for u in 0..n2 {
            let nu = inst.neighbors(u);
            for v in u + 1..n2 {
                ops += 1;
                let nv = inst.neighbors(v);
                if nu.is_empty() || nv.is_empty() {
                    continue;
                }
                let mut j = 0;
                let mut before = 0u64;
                let mut common = 0u64;
                for &a in nu {
                    while j < nv.len() && nv[j] < a {
                        j += 1;
                        ops += 1;
                    }
                    ops += 1;
                    before += j as u64;
                    if j < nv.len() && nv[j] == a {
                        common += 1;
                    }
                }
                let uv = before;
                let vu = (nu.len() * nv.len()) as u64 - before - common;
                c[u * n2 + v] = uv;
                c[v * n2 + u] = vu;
                diff[u * n2 + v] = uv as i64 - vu as i64;
                diff[v * n2 + u] = vu as i64 - uv as i64;
            }
        }

        Self {
            n2,
            c,
            diff,
            degrees,
            build_ops: ops,
        }
    }

    /// Table from explicit entries, `rows[u][v] = c(u, v)`. Diagonal must be zero.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n2 = rows.len();
        let mut c = Vec::with_capacity(n2 * n2);
        for (u, row) in rows.iter().enumerate() {
            if row.len() != n2 {
                return Err(Error::param(format!("row {u} has {} entries, expected {n2}", row.len())));
            }
            if row[u] != 0 {
                return Err(Error::param(format!("diagonal entry c({u}, {u}) is not zero")));
            }
            c.extend_from_slice(row);
        }
        let diff = (0..n2 * n2)
            .map(|k| {
                let (u, v) = (k / n2, k % n2);
                c[u * n2 + v] as i64 - c[v * n2 + u] as i64
            })
            .collect();
        Ok(Self {
            n2,
            c,
            diff,
            degrees: vec![0; n2],
            build_ops: 0,
        })
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Crossings charged to the pair when `u` is left of `v`.
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.c[u * self.n2 + v]
    }

    /// `c(u, v) - c(v, u)`.
    #[inline]
    pub fn diff(&self, u: usize, v: usize) -> i64 {
        self.diff[u * self.n2 + v]
    }

    #[inline]
    fn diff_row(&self, u: usize) -> &[i64] {
        &self.diff[u * self.n2..(u + 1) * self.n2]
    }

    /// Degree of free vertex `v` in the instance the table was built from
    /// (zero for tables made with [`CrossTable::from_rows`]).
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    /// Elementary merge steps spent in [`CrossTable::build`].
    pub fn build_ops(&self) -> u64 {
        self.build_ops
    }

    fn check(&self, ord: &Ordering) -> Result<()> {
        if ord.len() == self.n2 {
            Ok(())
        } else {
            Err(Error::param(format!(
                "ordering has {} vertices, table has {}",
                ord.len(),
                self.n2
            )))
        }
    }
}

pub fn build_cross_table(inst: &BipartiteInstance) -> CrossTable {
    CrossTable::build(inst)
}

/// `Σ_{i<j} c(π(i), π(j))` in O(n2²).
pub fn crossings_of(table: &CrossTable, ord: &Ordering) -> Result<u64> {
    table.check(ord)?;
    Ok(crossings_unchecked(table, ord))
}

pub(crate) fn crossings_unchecked(table: &CrossTable, ord: &Ordering) -> u64 {
    let perm = ord.perm();
    let n2 = table.n2;
    let mut total = 0;
    for (i, &u) in perm.iter().enumerate() {
        let row = &table.c[u * n2..(u + 1) * n2];
        total += perm[i + 1..].iter().map(|&v| row[v]).sum::<u64>();
    }
    total
}

/// Counts crossings straight from the edge list, without a cross table.
///
/// Edges are listed as `(fixed_id, position of free endpoint)` and sorted; two
/// edges cross exactly when their positions form a strict inversion, which a
/// merge sort counts in O(m log m).
pub fn count_crossings_direct(inst: &BipartiteInstance, ord: &Ordering) -> Result<u64> {
    if ord.len() != inst.n2() {
        return Err(Error::param(format!(
            "ordering has {} vertices, instance has {}",
            ord.len(),
            inst.n2()
        )));
    }
    let mut keyed: Vec<(usize, usize)> = inst.edges().iter().map(|&(v, a)| (a, ord.position(v))).collect();
    keyed.sort_unstable();
    let mut seq: Vec<usize> = keyed.into_iter().map(|(_, p)| p).collect();
    let mut scratch = vec![0; seq.len()];
    Ok(count_inversions(&mut seq, &mut scratch))
}

/// Sorts `seq` and returns the number of pairs `i < j` with `seq[i] > seq[j]`.
fn count_inversions(seq: &mut [usize], scratch: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (left, right) = seq.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        count_inversions(left, sl) + count_inversions(right, sr)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if seq[j] < seq[i] {
            // seq[j] is smaller than everything left in the first half
            count += (mid - i) as u64;
            scratch[k] = seq[j];
            j += 1;
        } else {
            scratch[k] = seq[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - i].copy_from_slice(&seq[i..mid]);
    k += mid - i;
    scratch[k..k + n - j].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(&scratch[..n]);
    count
}

fn check_index(table: &CrossTable, ord: &Ordering, i: usize) -> Result<()> {
    table.check(ord)?;
    if i < ord.len() {
        Ok(())
    } else {
        Err(Error::param(format!("position {i} out of range for {} vertices", ord.len())))
    }
}

/// Change in crossings from swapping positions `i` and `i + 1`.
pub fn delta_adjacent_swap(table: &CrossTable, ord: &Ordering, i: usize) -> Result<i64> {
    check_index(table, ord, i + 1)?;
    Ok(swap_delta(table, ord, i))
}

#[inline]
pub(crate) fn swap_delta(table: &CrossTable, ord: &Ordering, i: usize) -> i64 {
    table.diff(ord.at(i + 1), ord.at(i))
}

/// Change in crossings from exchanging positions `i < j`.
pub fn delta_exchange(table: &CrossTable, ord: &Ordering, i: usize, j: usize) -> Result<i64> {
    check_index(table, ord, j)?;
    if i >= j {
        return Err(Error::param(format!("exchange needs i < j, got i = {i}, j = {j}")));
    }
    Ok(exchange_delta(table, ord, i, j))
}

pub(crate) fn exchange_delta(table: &CrossTable, ord: &Ordering, i: usize, j: usize) -> i64 {
    let (u, v) = (ord.at(i), ord.at(j));
    let (ru, rv) = (table.diff_row(u), table.diff_row(v));
    let mid: i64 = ord.perm()[i + 1..j].iter().map(|&w| rv[w] - ru[w]).sum();
    rv[u] + mid
}

/// Change in crossings from moving the vertex at position `i` to position `j`.
pub fn delta_jump(table: &CrossTable, ord: &Ordering, i: usize, j: usize) -> Result<i64> {
    check_index(table, ord, i)?;
    check_index(table, ord, j)?;
    Ok(jump_delta(table, ord, i, j))
}

pub(crate) fn jump_delta(table: &CrossTable, ord: &Ordering, i: usize, j: usize) -> i64 {
    let row = table.diff_row(ord.at(i));
    let perm = ord.perm();
    if j > i {
        -perm[i + 1..=j].iter().map(|&w| row[w]).sum::<i64>()
    } else {
        perm[j..i].iter().map(|&w| row[w]).sum::<i64>()
    }
}

/// `deltas[j] = delta_jump(table, ord, i, j)` for every target `j`, in O(n2)
/// total via running sums outward from `i`.
pub fn jump_delta_scan(table: &CrossTable, ord: &Ordering, i: usize) -> Result<Vec<i64>> {
    check_index(table, ord, i)?;
    let mut out = vec![0; ord.len()];
    jump_scan_into(table, ord, i, &mut out);
    Ok(out)
}

pub(crate) fn jump_scan_into(table: &CrossTable, ord: &Ordering, i: usize, out: &mut [i64]) {
    let row = table.diff_row(ord.at(i));
    let perm = ord.perm();
    out[i] = 0;
    let mut acc = 0;
    for j in i + 1..perm.len() {
        acc -= row[perm[j]];
        out[j] = acc;
    }
    acc = 0;
    for j in (0..i).rev() {
        acc += row[perm[j]];
        out[j] = acc;
    }
}

/// `Σ_{u<v} min(c(u, v), c(v, u))`, a lower bound on the optimum.
pub fn pairwise_lower_bound(table: &CrossTable) -> u64 {
    let n2 = table.n2;
    let mut total = 0;
    for u in 0..n2 {
        for v in u + 1..n2 {
            total += table.get(u, v).min(table.get(v, u));
        }
    }
    total
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::BipartiteInstance;

    /// n1 = 4; u–{2,3}, v–{1}, w–{0} with u, v, w = 0, 1, 2.
    pub fn e2() -> BipartiteInstance {
        BipartiteInstance::new(4, 3, [(0, 2), (0, 3), (1, 1), (2, 0)]).unwrap()
    }

    pub fn complete(n1: usize, n2: usize) -> BipartiteInstance {
        BipartiteInstance::new(n1, n2, (0..n2).flat_map(|v| (0..n1).map(move |a| (v, a)))).unwrap()
    }
}
