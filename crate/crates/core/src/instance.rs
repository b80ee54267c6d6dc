//! Two-layer instances, free-layer orderings, seeds and their text formats.
//!
//! The fixed layer is always ordered by id: fixed vertex `a` sits at position `a`.
//!
//! Instance file (LF line endings):
//!
//! ```text
//! obcm 1
//! <n1> <n2> <m>
//! <free_id> <fixed_id>     (m lines, zero-based)
//! ```
//!
//! Ordering file: `n2` lines, one free-vertex id per line, left to right.

use std::fmt::{self, Write as _};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// The generator behind every random decision in the crate.
///
/// ChaCha8 seeded through `SeedableRng::seed_from_u64`; the stream is portable
/// across platforms and pointer widths.
pub type Rng64 = ChaCha8Rng;

/// A 64-bit seed. Child seeds are derived by hashing, so runs can be recreated
/// from a master seed plus the coordinates of the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seed(pub u64);

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Derives an independent seed for the child identified by `(label, index)`.
    pub fn child(self, label: &str, index: u64) -> Seed {
        let mut h = mix(self.0);
        for b in label.bytes() {
            h = mix(h ^ u64::from(b));
        }
        h = mix(h ^ 0xff);
        Seed(mix(h ^ index))
    }

    pub fn rng(self) -> Rng64 {
        Rng64::seed_from_u64(self.0)
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    n1: usize,
    n2: usize,
    /// `(free_id, fixed_id)`, sorted.
    edges: Vec<(usize, usize)>,
    /// Neighbours of each free vertex, sorted by fixed id.
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteInstance {
    /// Builds an instance from `(free_id, fixed_id)` pairs in any order.
    pub fn new(n1: usize, n2: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<_> = edges.into_iter().collect();
        for &(v, a) in &edges {
            if v >= n2 {
                return Err(Error::param(format!("free id {v} out of range (n2 = {n2})")));
            }
            if a >= n1 {
                return Err(Error::param(format!("fixed id {a} out of range (n1 = {n1})")));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate edge {} {}", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted(n1, n2, edges))
    }

    fn from_sorted(n1: usize, n2: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n2];
        for &(v, a) in &edges {
            adjacency[v].push(a);
        }
        Self {
            n1,
            n2,
            edges,
            adjacency,
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(free_id, fixed_id)` in canonical sorted order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted fixed-layer neighbours of free vertex `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Serialises to the instance text format.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 + self.edges.len() * 8);
        s.push_str("obcm 1\n");
        let _ = writeln!(s, "{} {} {}", self.n1, self.n2, self.edges.len());
        for &(v, a) in &self.edges {
            let _ = writeln!(s, "{v} {a}");
        }
        s
    }

    /// Parses the instance text format. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        parse_instance(text, None)
    }
}

/// Random instance: each of the `n1 * n2` candidate edges is kept independently
/// with probability `p`.
///
/// Candidates are visited fixed-id-major, free-id-minor, one `f64` draw in
/// `[0, 1)` each; the edge is kept iff the draw is `< p`.
pub fn generate_random(n1: usize, n2: usize, p: f64, seed: Seed) -> Result<BipartiteInstance> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    for a in 0..n1 {
        for v in 0..n2 {
            if rng.random::<f64>() < p {
                edges.push((v, a));
            }
        }
    }
    edges.sort_unstable();
    Ok(BipartiteInstance::from_sorted(n1, n2, edges))
}

fn parse_instance(text: &str, path: Option<&Path>) -> Result<BipartiteInstance> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.map(Path::to_path_buf),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    match lines.next() {
        Some((_, "obcm 1")) => {}
        Some((n, l)) => return Err(err(n, format!("expected header `obcm 1`, found `{l}`"))),
        None => return Err(err(1, "empty file".into())),
    }
    let (n, sizes) = lines.next().ok_or_else(|| err(2, "missing size line".into()))?;
    let sizes = parse_numbers::<3>(sizes).ok_or_else(|| err(n, format!("expected `<n1> <n2> <m>`, found `{sizes}`")))?;
    let [n1, n2, m] = sizes;

    let mut edges = Vec::with_capacity(m.min(n1.saturating_mul(n2)));
    let mut seen = std::collections::HashSet::with_capacity(edges.capacity());
    for k in 0..m {
        let (n, line) = lines
            .next()
            .ok_or_else(|| err(3 + k, format!("expected {m} edge lines, found {k}")))?;
        let [v, a] = parse_numbers::<2>(line).ok_or_else(|| err(n, format!("expected `<free_id> <fixed_id>`, found `{line}`")))?;
        if v >= n2 {
            return Err(err(n, format!("free id {v} out of range (n2 = {n2})")));
        }
        if a >= n1 {
            return Err(err(n, format!("fixed id {a} out of range (n1 = {n1})")));
        }
        if !seen.insert((v, a)) {
            return Err(err(n, format!("duplicate edge {v} {a}")));
        }
        edges.push((v, a));
    }
    if let Some((n, l)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(err(n, format!("unexpected trailing content `{l}`")));
    }
    edges.sort_unstable();
    Ok(BipartiteInstance::from_sorted(n1, n2, edges))
}

fn parse_numbers<const N: usize>(line: &str) -> Option<[usize; N]> {
    let mut out = [0; N];
    let mut it = line.split_ascii_whitespace();
    for slot in &mut out {
        *slot = it.next()?.parse().ok()?;
    }
    it.next().is_none().then_some(out)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<BipartiteInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_instance(&text, Some(path))
}

pub fn write_instance(inst: &BipartiteInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, inst.to_text()).map_err(|e| Error::io(path, e))
}

/// A left-to-right order of the free layer together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    perm: Vec<usize>,
    pos: Vec<usize>,
}

impl Ordering {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    /// Fails unless `perm` is a permutation of `0..perm.len()`.
    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in perm.iter().enumerate() {
            if v >= n {
                return Err(Error::param(format!("vertex {v} out of range for ordering of length {n}")));
            }
            if pos[v] != usize::MAX {
                return Err(Error::param(format!("vertex {v} appears twice in ordering")));
            }
            pos[v] = i;
        }
        Ok(Self { perm, pos })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Free vertices, left to right.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Vertex at position `i`.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// Position of vertex `v`.
    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.pos[v]
    }

    pub fn into_perm(self) -> Vec<usize> {
        self.perm
    }

    /// Exchanges the vertices at positions `i` and `j`.
    pub fn exchange(&mut self, i: usize, j: usize) {
        self.perm.swap(i, j);
        self.pos[self.perm[i]] = i;
        self.pos[self.perm[j]] = j;
    }

    /// Moves the vertex at position `from` so that it ends at position `to`;
    /// everything in between shifts by one towards `from`.
    pub fn jump(&mut self, from: usize, to: usize) {
        let (lo, hi) = if from < to {
            self.perm[from..=to].rotate_left(1);
            (from, to)
        } else {
            self.perm[to..=from].rotate_right(1);
            (to, from)
        };
        for k in lo..=hi {
            self.pos[self.perm[k]] = k;
        }
    }

    /// Ordering file text: one id per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.perm.len() * 4);
        for v in &self.perm {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    /// Parses an ordering file. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut perm = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v = line.parse().map_err(|_| Error::Parse {
                path: None,
                line: i + 1,
                msg: format!("expected a vertex id, found `{line}`"),
            })?;
            perm.push(v);
        }
        Self::from_perm(perm)
    }
}

pub fn read_ordering(path: impl AsRef<Path>) -> Result<Ordering> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ordering::parse(&text).map_err(|e| match e {
        Error::Parse { line, msg, .. } => Error::Parse {
            path: Some(path.to_path_buf()),
            line,
            msg,
        },
        other => other,
    })
}

pub fn write_ordering(ord: &Ordering, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, ord.to_text()).map_err(|e| Error::io(path, e))
}

/// Uniformly random permutation of `0..n2` (Fisher-Yates).
pub fn random_ordering(n2: usize, seed: Seed) -> Ordering {
    random_ordering_with(n2, &mut seed.rng())
}

pub fn random_ordering_with<R: Rng + ?Sized>(n2: usize, rng: &mut R) -> Ordering {
    let mut perm: Vec<usize> = (0..n2).collect();
    perm.shuffle(rng);
    let mut pos = vec![0; n2];
    for (i, &v) in perm.iter().enumerate() {
        pos[v] = i;
    }
    Ordering { perm, pos }
}
