//! Agglomerative clustering that recomputes every cluster-to-cluster linkage
//! from the point distances at every step.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Average,
    Single,
    Complete,
}

/// One merge: the two clusters as sorted leaf sets and the linkage value.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMerge {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub distance: f64,
}

pub fn linkage(d: &[Vec<f64>], method: Method) -> Vec<OracleMerge> {
    let n = d.len();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for p in 0..clusters.len() {
            for q in p + 1..clusters.len() {
                let pairs = clusters[p]
                    .iter()
                    .flat_map(|&a| clusters[q].iter().map(move |&b| (a, b)))
                    .map(|(a, b)| d[a][b]);
                let v = match method {
                    Method::Single => pairs.fold(f64::INFINITY, f64::min),
                    Method::Complete => pairs.fold(f64::NEG_INFINITY, f64::max),
                    Method::Average => {
                        let cnt = (clusters[p].len() * clusters[q].len()) as f64;
                        pairs.sum::<f64>() / cnt
                    }
                };
                let (ka, kb) = (clusters[p][0], clusters[q][0]);
                let key = (ka.min(kb), ka.max(kb));
                let take = match &best {
                    None => true,
                    Some((bv, bk, _, _)) => v < *bv || (v == *bv && key < *bk),
                };
                if take {
                    best = Some((v, key, p, q));
                }
            }
        }
        let (distance, _, p, q) = best.unwrap();
        let right = clusters.remove(q);
        let left = clusters.remove(p);
        let (left, right) = if left[0] < right[0] { (left, right) } else { (right, left) };
        let mut joined: Vec<usize> = left.iter().chain(&right).copied().collect();
        joined.sort_unstable();
        merges.push(OracleMerge { left, right, distance });
        clusters.push(joined);
    }
    merges
}
