//! Exact optima for small free layers.

use itertools::Itertools;

use crate::crossings::crossings_unchecked;
use crate::{CrossTable, Error, Ordering, Result};

/// Largest free layer accepted by [`exact_dp`]; the DP keeps `2^n2` values.
pub const DP_MAX_N2: usize = 24;
/// Largest free layer accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_N2: usize = 9;

/// Optimum by dynamic programming over subsets of free vertices.
///
/// `f(S)` is the fewest crossings among the vertices of `S` when they occupy
/// the leftmost `|S|` positions. Placing `v` last among `S` adds
/// `Σ_{u ∈ S∖{v}} c(u, v)`, so `f(S) = min_v f(S∖{v}) + cost(v, S)`. Ties pick
/// the lowest `v`. O(2^n2 · n2²) time.
pub fn exact_dp(table: &CrossTable) -> Result<(u64, Ordering)> {
    let n = table.n2();
    if n > DP_MAX_N2 {
        return Err(Error::TooLarge {
            what: "exact dynamic programming",
            n2: n,
            cap: DP_MAX_N2,
        });
    }
    if n <= 1 {
        return Ok((0, Ordering::identity(n)));
    }
    let full = (1usize << n) - 1;
    let mut best = vec![u64::MAX; full + 1];
    let mut last = vec![0u8; full + 1];
    best[0] = 0;
    let mut members = Vec::with_capacity(n);

    for set in 1..=full {
        members.clear();
        members.extend((0..n).filter(|&v| set >> v & 1 == 1));
        let (mut f, mut arg) = (u64::MAX, 0);
        for &v in &members {
            let rest = best[set & !(1 << v)];
            let cost: u64 = members.iter().map(|&u| table.get(u, v)).sum();
            if rest + cost < f {
                f = rest + cost;
                arg = v;
            }
        }
        best[set] = f;
        last[set] = arg as u8;
    }

    let mut perm = Vec::with_capacity(n);
    let mut set = full;
    while set != 0 {
        let v = last[set] as usize;
        perm.push(v);
        set &= !(1 << v);
    }
    perm.reverse();
    let ord = Ordering::from_perm(perm).expect("backtracking visits every vertex once");
    Ok((best[full], ord))
}

/// Optimum by enumerating all `n2!` orderings; returns the lexicographically
/// smallest optimal ordering.
pub fn brute_force(table: &CrossTable) -> Result<(u64, Ordering)> {
    let n = table.n2();
    if n > BRUTE_FORCE_MAX_N2 {
        return Err(Error::TooLarge {
            what: "brute force",
            n2: n,
            cap: BRUTE_FORCE_MAX_N2,
        });
    }
    let mut best = (u64::MAX, Ordering::identity(n));
    for perm in (0..n).permutations(n) {
        let ord = Ordering::from_perm(perm).expect("permutations are valid");
        let k = crossings_unchecked(table, &ord);
        if k < best.0 {
            best = (k, ord);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossings::fixtures::{complete, e2};
    use crate::crossings::{crossings_of, pairwise_lower_bound};
    use crate::instance::generate_random;
    use crate::{BipartiteInstance, Seed};
    use proptest::prelude::*;

    #[test]
    fn e2_optimum() {
        let t = CrossTable::build(&e2());
        let (k, o) = exact_dp(&t).unwrap();
        assert_eq!((k, o.perm()), (0, &[2, 1, 0][..]));
        let (k, o) = brute_force(&t).unwrap();
        assert_eq!((k, o.perm()), (0, &[2, 1, 0][..]));
    }

    #[test]
    fn complete_graphs() {
        let t = CrossTable::build(&complete(3, 3));
        assert_eq!(exact_dp(&t).unwrap().0, 9);
        let t = CrossTable::build(&complete(2, 2));
        let (k, o) = brute_force(&t).unwrap();
        assert_eq!((k, o.perm()), (1, &[0, 1][..]));
    }

    #[test]
    fn trivial_sizes() {
        for n in 0..2 {
            let t = CrossTable::build(&BipartiteInstance::new(3, n, []).unwrap());
            assert_eq!(exact_dp(&t).unwrap(), (0, Ordering::identity(n)));
            assert_eq!(brute_force(&t).unwrap(), (0, Ordering::identity(n)));
        }
        let t = CrossTable::build(&BipartiteInstance::new(3, 5, []).unwrap());
        assert_eq!(brute_force(&t).unwrap(), (0, Ordering::identity(5)));
    }

    #[test]
    fn size_caps() {
        let t = CrossTable::build(&BipartiteInstance::new(1, 25, []).unwrap());
        assert!(matches!(exact_dp(&t), Err(Error::TooLarge { .. })));
        let t = CrossTable::build(&BipartiteInstance::new(1, 10, []).unwrap());
        assert!(matches!(brute_force(&t), Err(Error::TooLarge { .. })));
    }

    /// The pairwise bound is tight when "u before v iff c(u,v) <= c(v,u)" has no
    /// cycle, i.e. sorting by the number of vertices each one beats works.
    fn tournament_order(t: &CrossTable) -> Option<Ordering> {
        let n = t.n2();
        let mut wins: Vec<(usize, usize)> = (0..n)
            .map(|u| ((0..n).filter(|&v| v != u && t.get(u, v) < t.get(v, u)).count(), u))
            .collect();
        wins.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let ord = Ordering::from_perm(wins.into_iter().map(|(_, u)| u).collect()).unwrap();
        let ok = (0..n).all(|i| (i + 1..n).all(|j| t.get(ord.at(i), ord.at(j)) <= t.get(ord.at(j), ord.at(i))));
        ok.then_some(ord)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]
        #[test]
        fn dp_matches_brute_force(n1 in 1usize..12, n2 in 0usize..=8, p in 0.1f64..0.9, s in any::<u64>()) {
            let inst = generate_random(n1, n2, p, Seed(s)).unwrap();
            let t = CrossTable::build(&inst);
            let (k, o) = exact_dp(&t).unwrap();
            prop_assert_eq!(k, brute_force(&t).unwrap().0);
            prop_assert_eq!(crossings_of(&t, &o).unwrap(), k);
            let lb = pairwise_lower_bound(&t);
            prop_assert!(lb <= k);
            if let Some(ord) = tournament_order(&t) {
                prop_assert_eq!(crossings_of(&t, &ord).unwrap(), lb);
                prop_assert_eq!(lb, k);
            }
        }
    }
}
