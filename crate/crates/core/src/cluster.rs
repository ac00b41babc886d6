//! Euclidean distances, agglomerative clustering and flat cuts.
//!
//! Leaves are ordered lexicographically by label. Cluster ids follow the usual
//! dendrogram convention: leaves are `0..n`, the cluster formed by merge `k`
//! is `n + k`. Among pairs at equal linkage distance the pair with the
//! smallest `(min leaf, min leaf)` key merges first.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{sqrt, squared_distance};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub d: Matrix,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }
}

pub fn pairwise_distances(vectors: &BTreeMap<String, Vec<f64>>) -> Result<DistanceMatrix> {
    let dim = vectors.values().next().map_or(0, Vec::len);
    if vectors.values().any(|v| v.len() != dim) {
        let bad = vectors.values().find(|v| v.len() != dim).map_or(0, Vec::len);
        return Err(Error::DimensionMismatch { expected: dim, found: bad });
    }
    if dim == 0 && !vectors.is_empty() {
        return Err(Error::invalid("vectors must be non-empty"));
    }
    let labels: Vec<String> = vectors.keys().cloned().collect();
    let points: Vec<&Vec<f64>> = vectors.values().collect();
    let n = labels.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = sqrt(squared_distance(points[i], points[j]));
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(DistanceMatrix { labels, d })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linkage {
    #[default]
    Average,
    Single,
    Complete,
}

impl Linkage {
    pub fn name(&self) -> &'static str {
        match self {
            Linkage::Average => "average",
            Linkage::Single => "single",
            Linkage::Complete => "complete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Cluster with the smaller minimum leaf.
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    /// Leaves in the merged cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaf_labels: Vec<String>,
    pub merges: Vec<Merge>,
    pub linkage: Linkage,
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.leaf_labels.len()
    }
}

struct Active {
    id: usize,
    size: usize,
    min_leaf: usize,
}

/// Merges the closest pair of clusters until one remains. Linkage values are
/// kept in a cluster-by-cluster table updated after each merge
/// (Lance–Williams), `O(n³)` overall.
pub fn agglomerate(dist: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = dist.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, found: n });
    }
    let mut link = dist.d.clone();
    // slot -> cluster; slots are reused by the merged cluster
    let mut slots: Vec<Option<Active>> =
        (0..n).map(|i| Some(Active { id: i, size: 1, min_leaf: i })).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for p in 0..n {
            let Some(cp) = &slots[p] else { continue };
            for q in p + 1..n {
                let Some(cq) = &slots[q] else { continue };
                let key = ordered(cp.min_leaf, cq.min_leaf);
                let v = link[(p, q)];
                let better = match &best {
                    None => true,
                    Some((bv, bkey, _, _)) => v < *bv || (v == *bv && key < *bkey),
                };
                if better {
                    best = Some((v, key, p, q));
                }
            }
        }
        let (distance, _, p, q) = best.expect("at least two active clusters");
        let (cp, cq) = (slots[p].take().unwrap(), slots[q].take().unwrap());
        let size = cp.size + cq.size;
        for r in 0..n {
            let Some(cr) = &slots[r] else { continue };
            let _ = cr;
            let (dp, dq) = (link[(p, r)], link[(q, r)]);
            let v = match linkage {
                Linkage::Single => dp.min(dq),
                Linkage::Complete => dp.max(dq),
                Linkage::Average => (cp.size as f64 * dp + cq.size as f64 * dq) / size as f64,
            };
            link[(p, r)] = v;
            link[(r, p)] = v;
        }
        let (a, b) = if cp.min_leaf < cq.min_leaf { (cp.id, cq.id) } else { (cq.id, cp.id) };
        merges.push(Merge { a, b, distance, size });
        slots[p] = Some(Active { id: n + step, size, min_leaf: cp.min_leaf.min(cq.min_leaf) });
    }
    Ok(Dendrogram { leaf_labels: dist.labels.clone(), merges, linkage })
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b { (a, b) } else { (b, a) }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub k: usize,
    pub labels: Vec<String>,
    /// Cluster id in `1..=k` for each label.
    pub ids: Vec<usize>,
}

impl ClusterAssignment {
    pub fn cluster_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|i| self.ids[i])
    }

    /// Members of every cluster, by id.
    pub fn clusters(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.k];
        for (label, &id) in self.labels.iter().zip(&self.ids) {
            out[id - 1].push(label.clone());
        }
        out
    }
}

/// Undoes the last `k − 1` merges. Clusters are numbered `1..=k` in order of
/// their smallest member label.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<ClusterAssignment> {
    let n = dendrogram.leaves();
    if k == 0 || k > n {
        return Err(Error::invalid(alloc::format!("cluster count {k} outside 1..={n}")));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // leaf representative for each cluster id
    let mut rep: Vec<usize> = (0..n).collect();
    for m in &dendrogram.merges[..n - k] {
        let (ra, rb) = (find(&mut parent, rep[m.a]), find(&mut parent, rep[m.b]));
        let (lo, hi) = ordered(ra, rb);
        parent[hi] = lo;
        rep.push(lo);
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    // roots are the smallest leaf of each component; leaves are label-sorted
    let mut id_of_root = BTreeMap::new();
    for &r in &roots {
        let next = id_of_root.len() + 1;
        id_of_root.entry(r).or_insert(next);
    }
    let ids = roots.iter().map(|r| id_of_root[r]).collect();
    Ok(ClusterAssignment { k, labels: dendrogram.leaf_labels.clone(), ids })
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must cover the same items");
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut table: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut rows: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cols: BTreeMap<usize, u64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let pairs = |m: u64| (m * m.saturating_sub(1) / 2) as f64;
    let index: f64 = table.values().map(|&m| pairs(m)).sum();
    let sum_a: f64 = rows.values().map(|&m| pairs(m)).sum();
    let sum_b: f64 = cols.values().map(|&m| pairs(m)).sum();
    let expected = sum_a * sum_b / pairs(n as u64);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        // both partitions are all-singletons or a single block
        return 1.0;
    }
    (index - expected) / (max - expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn points(ps: &[(&str, &[f64])]) -> BTreeMap<String, Vec<f64>> {
        ps.iter().map(|(l, v)| (l.to_string(), v.to_vec())).collect()
    }

    #[test]
    fn three_four_five() {
        let d = pairwise_distances(&points(&[("a", &[0.0, 0.0]), ("b", &[3.0, 4.0]), ("c", &[3.0, 4.0])])).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 2), 0.0);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn ragged_vectors_rejected() {
        let err = pairwise_distances(&points(&[("a", &[0.0]), ("b", &[1.0, 2.0])])).unwrap_err();
        assert!(err.is_contract_violation());
    }

    #[test]
    fn two_points_single_merge() {
        let d = pairwise_distances(&points(&[("a", &[0.0]), ("b", &[2.5])])).unwrap();
        let den = agglomerate(&d, Linkage::Average).unwrap();
        assert_eq!(den.merges, vec![Merge { a: 0, b: 1, distance: 2.5, size: 2 }]);
    }

    #[test]
    fn collinear_average_linkage() {
        let d = pairwise_distances(&points(&[("p0", &[0.0]), ("p1", &[1.0]), ("p4", &[4.0]), ("p5", &[5.0])])).unwrap();
        let den = agglomerate(&d, Linkage::Average).unwrap();
        assert_eq!(den.merges[0], Merge { a: 0, b: 1, distance: 1.0, size: 2 });
        assert_eq!(den.merges[1], Merge { a: 2, b: 3, distance: 1.0, size: 2 });
        assert_eq!(den.merges[2], Merge { a: 4, b: 5, distance: 4.0, size: 4 });
    }

    #[test]
    fn cut_extremes_and_example() {
        let d = pairwise_distances(&points(&[("a", &[0.0, 0.0]), ("b", &[0.0, 1.0]), ("c", &[10.0, 10.0])])).unwrap();
        let den = agglomerate(&d, Linkage::Average).unwrap();
        assert_eq!(cut(&den, 1).unwrap().ids, vec![1, 1, 1]);
        assert_eq!(cut(&den, 3).unwrap().ids, vec![1, 2, 3]);
        let two = cut(&den, 2).unwrap();
        assert_eq!(two.ids, vec![1, 1, 2]);
        assert_eq!(two.clusters(), vec![vec!["a".to_string(), "b".to_string()], vec!["c".to_string()]]);
        assert!(cut(&den, 0).is_err());
        assert!(cut(&den, 4).is_err());
    }

    #[test]
    fn needs_two_points() {
        let d = pairwise_distances(&points(&[("a", &[0.0])])).unwrap();
        assert!(agglomerate(&d, Linkage::Single).is_err());
    }

    #[test]
    fn ari_values() {
        assert_eq!(adjusted_rand_index(&[1, 1, 2, 2], &[5, 5, 7, 7]), 1.0);
        let v = adjusted_rand_index(&[1, 1, 2, 2], &[1, 2, 1, 2]);
        assert!(v < 0.0, "{v}");
    }
}
