//! Deterministic baselines: barycenter, median and sifting.
//!
//! Vertices without neighbours get key `-1` and end up leftmost; they never
//! take part in a crossing.

use crate::crossings::{crossings_unchecked, jump_scan_into};
use crate::{BipartiteInstance, CrossTable, Error, Ordering, Result};

/// Maximum number of sifting rounds.
pub const SIFTING_MAX_ROUNDS: usize = 10;

fn barycenter_key(inst: &BipartiteInstance, v: usize) -> f64 {
    let nb = inst.neighbors(v);
    if nb.is_empty() {
        -1.0
    } else {
        nb.iter().sum::<usize>() as f64 / nb.len() as f64
    }
}

fn median_key(inst: &BipartiteInstance, v: usize) -> f64 {
    let nb = inst.neighbors(v);
    if nb.is_empty() {
        -1.0
    } else {
        nb[(nb.len() - 1) / 2] as f64
    }
}

fn sorted_by_keys(n2: usize, key: impl Fn(usize) -> (f64, f64)) -> Ordering {
    let keys: Vec<_> = (0..n2).map(key).collect();
    let mut perm: Vec<usize> = (0..n2).collect();
    // stable, so equal keys keep id order
    perm.sort_by(|&x, &y| {
        keys[x]
            .0
            .total_cmp(&keys[y].0)
            .then(keys[x].1.total_cmp(&keys[y].1))
    });
    Ordering::from_perm(perm).expect("sorted ids form a permutation")
}

/// Orders free vertices by the mean position of their neighbours.
pub fn barycenter(inst: &BipartiteInstance) -> Ordering {
    sorted_by_keys(inst.n2(), |v| (barycenter_key(inst, v), 0.0))
}

/// Orders free vertices by the left median of their neighbour positions,
/// breaking ties by barycenter and then by id.
pub fn median(inst: &BipartiteInstance) -> Ordering {
    sorted_by_keys(inst.n2(), |v| (median_key(inst, v), barycenter_key(inst, v)))
}

/// Sifting from `start`.
///
/// A round visits the vertices by decreasing degree (ties by id) and moves each
/// one to the leftmost position of minimum crossings. Rounds repeat until one
/// gains nothing, at most [`SIFTING_MAX_ROUNDS`] times.
pub fn sifting(table: &CrossTable, start: &Ordering) -> Result<Ordering> {
    if start.len() != table.n2() {
        return Err(Error::param(format!(
            "ordering has {} vertices, table has {}",
            start.len(),
            table.n2()
        )));
    }
    let n2 = table.n2();
    let mut ord = start.clone();
    if n2 < 2 {
        return Ok(ord);
    }
    let mut visit: Vec<usize> = (0..n2).collect();
    visit.sort_by_key(|&v| std::cmp::Reverse(table.degree(v)));

    let mut deltas = vec![0i64; n2];
    for _ in 0..SIFTING_MAX_ROUNDS {
        let mut gained = 0i64;
        for &v in &visit {
            let i = ord.position(v);
            jump_scan_into(table, &ord, i, &mut deltas);
            let (best, &d) = deltas
                .iter()
                .enumerate()
                .min_by_key(|&(j, &d)| (d, j))
                .expect("n2 >= 2");
            if best != i {
                ord.jump(i, best);
            }
            gained -= d;
        }
        if gained == 0 {
            break;
        }
    }
    debug_assert!(crossings_unchecked(table, &ord) <= crossings_unchecked(table, start));
    Ok(ord)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossings::fixtures::{complete, e2};
    use crate::crossings::{crossings_of, jump_delta_scan};
    use crate::instance::{generate_random, random_ordering};
    use crate::Seed;
    use proptest::prelude::*;

    #[test]
    fn barycenter_examples() {
        let inst = BipartiteInstance::new(3, 2, [(0, 0), (0, 2), (1, 1)]).unwrap();
        assert_eq!(barycenter(&inst).perm(), &[0, 1]);
        assert_eq!(barycenter(&complete(3, 1)).perm(), &[0]);
        let e = e2();
        let o = barycenter(&e);
        assert_eq!(o.perm(), &[2, 1, 0]);
        assert_eq!(crossings_of(&CrossTable::build(&e), &o).unwrap(), 0);
    }

    #[test]
    fn median_examples() {
        let inst = BipartiteInstance::new(3, 2, [(0, 0), (0, 2), (1, 1)]).unwrap();
        assert_eq!(median(&inst).perm(), &[0, 1]);
        assert_eq!(median(&e2()).perm(), &[2, 1, 0]);
        let empty = BipartiteInstance::new(3, 4, []).unwrap();
        assert_eq!(median(&empty).perm(), &[0, 1, 2, 3]);
    }

    #[test]
    fn isolated_vertices_go_left() {
        let inst = BipartiteInstance::new(3, 3, [(0, 0), (2, 2)]).unwrap();
        assert_eq!(barycenter(&inst).perm(), &[1, 0, 2]);
        assert_eq!(median(&inst).perm(), &[1, 0, 2]);
    }

    #[test]
    fn median_ties_fall_back_to_barycenter() {
        // both have left median 1; barycenters 1.5 and 1.0
        let inst = BipartiteInstance::new(4, 2, [(0, 1), (0, 2), (1, 1)]).unwrap();
        assert_eq!(median(&inst).perm(), &[1, 0]);
    }

    #[test]
    fn sifting_e2_reaches_zero() {
        let t = CrossTable::build(&e2());
        let start = Ordering::identity(3);
        // first step of the round: u (degree 2) jumps to the end
        assert_eq!(jump_delta_scan(&t, &start, 0).unwrap(), vec![0, -2, -4]);
        let out = sifting(&t, &start).unwrap();
        assert_eq!(out.perm(), &[2, 1, 0]);
        assert_eq!(crossings_of(&t, &out).unwrap(), 0);
    }

    #[test]
    fn sifting_on_plateau_keeps_crossings() {
        let t = CrossTable::build(&complete(3, 3));
        let out = sifting(&t, &Ordering::identity(3)).unwrap();
        assert_eq!(crossings_of(&t, &out).unwrap(), 9);
    }

    #[test]
    fn sifting_single_vertex() {
        let t = CrossTable::build(&complete(2, 1));
        assert_eq!(sifting(&t, &Ordering::identity(1)).unwrap().perm(), &[0]);
        assert!(sifting(&t, &Ordering::identity(2)).is_err());
    }

    proptest! {
        #[test]
        fn sifting_never_worsens(n1 in 1usize..25, n2 in 1usize..25, p in 0.0f64..0.6, s in any::<u64>()) {
            let inst = generate_random(n1, n2, p, Seed(s)).unwrap();
            let t = CrossTable::build(&inst);
            let start = random_ordering(n2, Seed(s ^ 1));
            let out = sifting(&t, &start).unwrap();
            prop_assert!(crossings_of(&t, &out).unwrap() <= crossings_of(&t, &start).unwrap());
        }

        #[test]
        fn barycenter_is_relabeling_invariant(n1 in 1usize..40, n2 in 1usize..12, p in 0.1f64..0.9, s in any::<u64>()) {
            let inst = generate_random(n1, n2, p, Seed(s)).unwrap();
            let relabel = random_ordering(n2, Seed(s ^ 7));
            let renamed = BipartiteInstance::new(
                n1, n2, inst.edges().iter().map(|&(v, a)| (relabel.at(v), a))).unwrap();
            let back = |o: Ordering| -> Vec<usize> { o.perm().iter().map(|&w| relabel.position(w)).collect() };
            let keys: Vec<f64> = (0..n2).map(|v| barycenter_key(&inst, v)).collect();
            let distinct = (0..n2).all(|x| (0..x).all(|y| keys[x] != keys[y]));
            if distinct {
                prop_assert_eq!(back(barycenter(&renamed)), barycenter(&inst).into_perm());
            }
            let mkeys: Vec<(f64, f64)> = (0..n2).map(|v| (median_key(&inst, v), keys[v])).collect();
            let mdistinct = (0..n2).all(|x| (0..x).all(|y| mkeys[x] != mkeys[y]));
            if mdistinct {
                prop_assert_eq!(back(median(&renamed)), median(&inst).into_perm());
            }
        }
    }
}
