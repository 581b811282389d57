//! Farthest-point queries and the algorithms built on them.
//!
//! The `_exact` functions are brute-force scans used as oracles. The
//! `_approx` functions go through coresets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coreset::{build_coreset, Coreset};
use crate::error::{check_epsilon, Error, Result};
use crate::hyperbolic::{dist_h, BallPoint};
use crate::point_set::PointSet;

/// Default size above which the quadratic oracles refuse to run.
pub const ORACLE_CAP: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    Exact,
    /// Within `ε` additively and within a factor `1 - ε` of the exact value.
    AdditiveAndMultiplicative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryAnswer {
    pub index: usize,
    pub distance: f64,
    pub guarantee: Guarantee,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairAnswer {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterAnswer {
    pub index: usize,
    /// Approximate radius. Only this value carries the guarantee; the true
    /// eccentricity of `index` may be larger.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeAnswer {
    pub edges: Vec<(usize, usize, f64)>,
    pub total_weight: f64,
}

impl TreeAnswer {
    fn from_edges(edges: Vec<(usize, usize, f64)>) -> TreeAnswer {
        let total_weight = edges.iter().map(|e| e.2).sum();
        TreeAnswer { edges, total_weight }
    }

    /// Whether the edges form a spanning tree of `n` vertices.
    pub fn is_spanning_tree(&self, n: usize) -> bool {
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        let mut uf = UnionFind::new(n);
        self.edges.iter().all(|&(i, j, _)| i < n && j < n && uf.union(i, j))
    }
}

/// Index of the point of `points` farthest from `q`, lowest index on ties.
pub(crate) fn farthest_index(points: &PointSet, q: &BallPoint) -> usize {
    farthest_among(points, q, 0..points.len()).0
}

fn farthest_among(points: &PointSet, q: &BallPoint, idx: impl Iterator<Item = usize>) -> (usize, f64) {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for i in idx {
        let d = dist_h(q, points.get(i));
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

/// Exact farthest point by a linear scan.
pub fn farthest_exact(points: &PointSet, q: &BallPoint) -> Result<QueryAnswer> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    points.check_point(q)?;
    let (index, distance) = farthest_among(points, q, 0..points.len());
    Ok(QueryAnswer {
        index,
        distance,
        guarantee: Guarantee::Exact,
    })
}

/// Approximate farthest point: a scan of the coreset members.
pub fn farthest_approx(coreset: &Coreset<'_>, q: &BallPoint) -> Result<QueryAnswer> {
    coreset.source().check_point(q)?;
    let (index, distance) = farthest_among(coreset.source(), q, coreset.indices().iter().copied());
    Ok(QueryAnswer {
        index,
        distance,
        guarantee: Guarantee::AdditiveAndMultiplicative(coreset.epsilon()),
    })
}

fn need_two(points: &PointSet) -> Result<()> {
    match points.len() {
        0 => Err(Error::Empty),
        1 => Err(Error::Domain("need at least two points".into())),
        _ => Ok(()),
    }
}

/// Two farthest-point scans: `â = f(p₁)`, `b̂ = f(â)`. In a `δ`-hyperbolic
/// space `d(â, b̂)` is within `2δ` of the diameter.
pub fn approx_diametral_pair(points: &PointSet) -> Result<PairAnswer> {
    need_two(points)?;
    let a = farthest_index(points, points.get(0));
    let (b, distance) = farthest_among(points, points.get(a), 0..points.len());
    if distance == 0.0 {
        // all points coincide
        return Ok(PairAnswer { i: 0, j: 1, distance });
    }
    Ok(PairAnswer { i: a, j: b, distance })
}

/// Best of approximate farthest-point queries from every point.
fn best_query(coreset: &Coreset<'_>, from: &PointSet) -> (usize, QueryAnswer) {
    from.points()
        .par_iter()
        .enumerate()
        .map(|(i, q)| (i, farthest_approx(coreset, q).expect("same dimension")))
        .reduce_with(|x, y| {
            if y.1.distance > x.1.distance || (y.1.distance == x.1.distance && y.0 < x.0) {
                y
            } else {
                x
            }
        })
        .expect("nonempty")
}

/// Approximate diameter: the largest approximate eccentricity.
pub fn diameter_approx(points: &PointSet, epsilon: f64) -> Result<PairAnswer> {
    check_epsilon(epsilon)?;
    need_two(points)?;
    let coreset = build_coreset(points, epsilon)?;
    let (i, ans) = best_query(&coreset, points);
    if ans.distance == 0.0 {
        return Ok(PairAnswer {
            i: 0,
            j: 1,
            distance: 0.0,
        });
    }
    Ok(PairAnswer {
        i,
        j: ans.index,
        distance: ans.distance,
    })
}

/// Approximate center: the point of smallest approximate eccentricity.
pub fn center_approx(points: &PointSet, epsilon: f64) -> Result<CenterAnswer> {
    check_epsilon(epsilon)?;
    if points.is_empty() {
        return Err(Error::Empty);
    }
    let coreset = build_coreset(points, epsilon)?;
    let (index, radius) = points
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, q)| (i, farthest_approx(&coreset, q).expect("same dimension").distance))
        .reduce_with(|x, y| if y.1 < x.1 || (y.1 == x.1 && y.0 < x.0) { y } else { x })
        .expect("nonempty");
    Ok(CenterAnswer { index, radius })
}

fn same_dim(a: &PointSet, b: &PointSet) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Approximate farthest pair with `i` in `red` and `j` in `blue`: a coreset
/// of `blue` queried from every red point.
pub fn bichromatic_farthest_approx(red: &PointSet, blue: &PointSet, epsilon: f64) -> Result<PairAnswer> {
    check_epsilon(epsilon)?;
    if red.is_empty() || blue.is_empty() {
        return Err(Error::Empty);
    }
    same_dim(red, blue)?;
    let coreset = build_coreset(blue, epsilon)?;
    let (i, ans) = best_query(&coreset, red);
    Ok(PairAnswer {
        i,
        j: ans.index,
        distance: ans.distance,
    })
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already one.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Subsets at most this large are scanned in full instead of getting a
/// coreset of their own.
const SCAN_ALL_BELOW: usize = 32;

/// A subset of the input with its farthest-query structure.
struct Block {
    /// Original indices, ascending.
    members: Vec<usize>,
    /// Original indices of the coreset, or `None` to scan all members.
    coreset: Option<Vec<usize>>,
}

impl Block {
    fn new(points: &PointSet, members: Vec<usize>, epsilon: f64) -> Result<Block> {
        if members.len() <= SCAN_ALL_BELOW {
            return Ok(Block { members, coreset: None });
        }
        let sub = PointSet::new(points.dim(), members.iter().map(|&i| points.get(i).clone()).collect())?;
        let c = build_coreset(&sub, epsilon)?;
        let coreset = Some(c.indices().iter().map(|&k| members[k]).collect());
        Ok(Block { members, coreset })
    }

    fn candidates(&self) -> &[usize] {
        self.coreset.as_deref().unwrap_or(&self.members)
    }
}

/// Approximate maximum spanning tree by Borůvka rounds.
///
/// Each round sorts the components, puts a segment tree of coresets over
/// them, and finds for every component an approximately heaviest edge to
/// the rest by querying the `O(log c)` tree nodes covering its complement.
/// Every chosen edge is within a factor `1 - ε` of the heaviest edge leaving
/// its component, and the tree weight is within `1 - ε` of the optimum.
pub fn mst_max_approx(points: &PointSet, epsilon: f64) -> Result<TreeAnswer> {
    check_epsilon(epsilon)?;
    need_two(points)?;
    let n = points.len();
    let mut uf = UnionFind::new(n);
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(n - 1);
    while edges.len() < n - 1 {
        // components in order of their smallest member
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let r = uf.find(i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(i);
        }
        let c = groups.len();
        // segment tree over component positions; node k covers [lo, hi)
        let tree = SegTree::build(points, &groups, epsilon)?;
        let best: Vec<(usize, usize, f64)> = (0..c)
            .into_par_iter()
            .map(|g| {
                let mut best = (usize::MAX, usize::MAX, f64::NEG_INFINITY);
                let mut nodes = Vec::new();
                tree.cover(0, 0, c, 0, g, &mut nodes);
                tree.cover(0, 0, c, g + 1, c, &mut nodes);
                for &r in &groups[g] {
                    let q = points.get(r);
                    for &node in &nodes {
                        let (j, d) = farthest_among(points, q, tree.blocks[node].candidates().iter().copied());
                        let cand = (r.min(j), r.max(j), d);
                        if d > best.2 || (d == best.2 && (cand.0, cand.1) < (best.0, best.1)) {
                            best = cand;
                        }
                    }
                }
                best
            })
            .collect();
        let mut chosen = best;
        chosen.sort_by(|x, y| y.2.total_cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
        chosen.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
        for (i, j, w) in chosen {
            if uf.union(i, j) {
                edges.push((i, j, w));
            }
        }
    }
    Ok(TreeAnswer::from_edges(edges))
}

struct SegTree {
    blocks: Vec<Block>,
}

impl SegTree {
    fn build(points: &PointSet, groups: &[Vec<usize>], epsilon: f64) -> Result<SegTree> {
        let c = groups.len();
        let mut ranges = Vec::new();
        Self::layout(0, 0, c, &mut ranges);
        let blocks = ranges
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut members: Vec<usize> = groups[lo..hi].iter().flatten().copied().collect();
                members.sort_unstable();
                Block::new(points, members, epsilon)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SegTree { blocks })
    }

    /// Ranges of nodes in heap order (node k has children 2k+1, 2k+2).
    fn layout(node: usize, lo: usize, hi: usize, out: &mut Vec<(usize, usize)>) {
        if out.len() <= node {
            out.resize(node + 1, (0, 0));
        }
        out[node] = (lo, hi);
        if hi - lo > 1 {
            let mid = (lo + hi) / 2;
            Self::layout(2 * node + 1, lo, mid, out);
            Self::layout(2 * node + 2, mid, hi, out);
        }
    }

    /// Nodes exactly covering `[a, b)`.
    fn cover(&self, node: usize, lo: usize, hi: usize, a: usize, b: usize, out: &mut Vec<usize>) {
        if a >= b || b <= lo || hi <= a {
            return;
        }
        if a <= lo && hi <= b {
            out.push(node);
            return;
        }
        let mid = (lo + hi) / 2;
        self.cover(2 * node + 1, lo, mid, a, b, out);
        self.cover(2 * node + 2, mid, hi, a, b, out);
    }
}

fn check_cap(points: &PointSet, cap: Option<usize>) -> Result<()> {
    if let Some(cap) = cap {
        if points.len() > cap {
            return Err(Error::TooLarge {
                what: "quadratic oracle",
                size: points.len(),
                cap,
            });
        }
    }
    Ok(())
}

/// Exact diameter by scanning all pairs. Refuses inputs above
/// [`ORACLE_CAP`]; see [`diameter_exact_capped`].
pub fn diameter_exact(points: &PointSet) -> Result<PairAnswer> {
    diameter_exact_capped(points, Some(ORACLE_CAP))
}

/// [`diameter_exact`] with an explicit cap; `None` disables it.
pub fn diameter_exact_capped(points: &PointSet, cap: Option<usize>) -> Result<PairAnswer> {
    need_two(points)?;
    check_cap(points, cap)?;
    let n = points.len();
    let best = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let (j, d) = farthest_among(points, points.get(i), i + 1..n);
            PairAnswer { i, j, distance: d }
        })
        .reduce_with(|x, y| {
            if y.distance > x.distance || (y.distance == x.distance && y.i < x.i) {
                y
            } else {
                x
            }
        })
        .expect("n >= 2");
    Ok(best)
}

/// Exact center: the point of smallest eccentricity, by scanning all pairs.
pub fn center_exact(points: &PointSet) -> Result<CenterAnswer> {
    center_exact_capped(points, Some(ORACLE_CAP))
}

pub fn center_exact_capped(points: &PointSet, cap: Option<usize>) -> Result<CenterAnswer> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    check_cap(points, cap)?;
    let (index, radius) = (0..points.len())
        .into_par_iter()
        .map(|i| (i, farthest_among(points, points.get(i), 0..points.len()).1))
        .reduce_with(|x, y| if y.1 < x.1 || (y.1 == x.1 && y.0 < x.0) { y } else { x })
        .expect("nonempty");
    Ok(CenterAnswer { index, radius })
}

/// Exact farthest pair with `i` in `red` and `j` in `blue`. The cap applies
/// to `|red| * |blue|` as if it were `n²`.
pub fn bichromatic_farthest_exact_capped(red: &PointSet, blue: &PointSet, cap: Option<usize>) -> Result<PairAnswer> {
    if red.is_empty() || blue.is_empty() {
        return Err(Error::Empty);
    }
    same_dim(red, blue)?;
    if let Some(cap) = cap {
        let size = red.len().saturating_mul(blue.len());
        if size > cap.saturating_mul(cap) {
            return Err(Error::TooLarge {
                what: "quadratic oracle",
                size,
                cap: cap.saturating_mul(cap),
            });
        }
    }
    let best = (0..red.len())
        .into_par_iter()
        .map(|i| {
            let (j, d) = farthest_among(blue, red.get(i), 0..blue.len());
            PairAnswer { i, j, distance: d }
        })
        .reduce_with(|x, y| {
            if y.distance > x.distance || (y.distance == x.distance && y.i < x.i) {
                y
            } else {
                x
            }
        })
        .expect("nonempty");
    Ok(best)
}

/// Exact maximum spanning tree (Prim's algorithm on the complete graph,
/// `O(n²)` time and `O(n)` memory). Refuses inputs above [`ORACLE_CAP`].
pub fn mst_max_exact(points: &PointSet) -> Result<TreeAnswer> {
    mst_max_exact_capped(points, Some(ORACLE_CAP))
}

pub fn mst_max_exact_capped(points: &PointSet, cap: Option<usize>) -> Result<TreeAnswer> {
    need_two(points)?;
    check_cap(points, cap)?;
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::NEG_INFINITY; n];
    let mut parent = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let q = points.get(current);
        for v in 0..n {
            if !in_tree[v] {
                let d = dist_h(q, points.get(v));
                if d > key[v] {
                    key[v] = d;
                    parent[v] = current;
                }
            }
        }
        let mut next = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (next == usize::MAX || key[v] > key[next]) {
                next = v;
            }
        }
        in_tree[next] = true;
        let p = parent[next];
        edges.push((p.min(next), p.max(next), key[next]));
        current = next;
    }
    Ok(TreeAnswer::from_edges(edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: &[&[f64]]) -> PointSet {
        PointSet::from_rows(rows[0].len(), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn single_point_is_its_own_farthest() {
        let p = set(&[&[0.1, 0.2]]);
        let q = BallPoint::new(vec![-0.3, 0.0]).unwrap();
        assert_eq!(farthest_exact(&p, &q).unwrap().index, 0);
    }

    #[test]
    fn farthest_is_on_the_other_side() {
        let p = set(&[&[0.5, 0.0], &[-0.5, 0.0]]);
        let q = BallPoint::new(vec![0.4, 0.0]).unwrap();
        assert_eq!(farthest_exact(&p, &q).unwrap().index, 1);
        assert!(farthest_exact(&PointSet::new(2, vec![]).unwrap(), &q).is_err());
    }

    #[test]
    fn two_points_diametral_pair() {
        let p = set(&[&[0.5, 0.0], &[-0.5, 0.0]]);
        let ans = approx_diametral_pair(&p).unwrap();
        assert_eq!((ans.i, ans.j), (1, 0));
        assert!((ans.distance - 2.0 * 3f64.ln()).abs() < 1e-14);
        assert!(approx_diametral_pair(&set(&[&[0.5, 0.0]])).is_err());
    }

    #[test]
    fn antipodal_diameter() {
        let p = set(&[&[0.9, 0.0], &[-0.9, 0.0]]);
        let want = 2.0 * 19f64.ln();
        let exact = diameter_exact(&p).unwrap();
        assert!((exact.distance - want).abs() < 1e-12);
        let est = diameter_approx(&p, 0.1).unwrap();
        assert!((est.distance - want).abs() < 1e-12);
    }

    #[test]
    fn two_point_trees_are_the_edge() {
        let p = set(&[&[0.3, 0.1], &[-0.2, 0.4]]);
        let d = dist_h(p.get(0), p.get(1));
        for t in [mst_max_exact(&p).unwrap(), mst_max_approx(&p, 0.3).unwrap()] {
            assert_eq!(t.edges, vec![(0, 1, d)]);
            assert!(t.is_spanning_tree(2));
        }
    }

    #[test]
    fn oracle_cap_refuses() {
        let p = set(&[&[0.3, 0.1], &[-0.2, 0.4], &[0.0, 0.0]]);
        assert!(matches!(
            diameter_exact_capped(&p, Some(2)),
            Err(Error::TooLarge { .. })
        ));
        assert!(diameter_exact_capped(&p, None).is_ok());
        assert!(matches!(mst_max_exact_capped(&p, Some(2)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn single_center_has_radius_zero() {
        let p = set(&[&[0.3, 0.1]]);
        let c = center_approx(&p, 0.2).unwrap();
        assert_eq!((c.index, c.radius), (0, 0.0));
    }

    #[test]
    fn tree_validity_detects_cycles() {
        let t = TreeAnswer::from_edges(vec![(0, 1, 1.0), (1, 0, 1.0)]);
        assert!(!t.is_spanning_tree(3));
        let t = TreeAnswer::from_edges(vec![(0, 1, 1.0), (1, 2, 1.0)]);
        assert!(t.is_spanning_tree(3));
    }
}
