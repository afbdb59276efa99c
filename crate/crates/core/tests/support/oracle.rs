//! Reference implementations used only by tests. Nothing here calls into the
//! engine's filtration, reduction or union-find code.

#![allow(dead_code)]

/// Pairwise Euclidean distances by a plain double loop.
pub fn naive_distances(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut s = 0.0;
                for k in 0..points[i].len() {
                    let t = points[i][k] - points[j][k];
                    s += t * t;
                }
                d[i][j] = s.sqrt();
            }
        }
    }
    d
}

/// (dimension, birth, death) with `f64::INFINITY` for essential classes.
pub type OracleBar = (u8, f64, f64);

/// Persistence of the Rips complex up to dimension two, by building every
/// simplex with diameter `<= threshold` and running the textbook column
/// reduction on the full boundary matrix over Z/2. H0 keeps zero-length bars,
/// H1 drops them. Bars come back sorted.
pub fn naive_persistence(dist: &[Vec<f64>], threshold: f64) -> Vec<OracleBar> {
    let n = dist.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in 0..n {
        simplices.push((0.0, vec![i]));
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] <= threshold {
                simplices.push((dist[i][j], vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let diam = dist[i][j].max(dist[i][k]).max(dist[j][k]);
                if diam <= threshold {
                    simplices.push((diam, vec![i, j, k]));
                }
            }
        }
    }
    // diameter, then dimension, then lexicographic vertices
    simplices.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });

    let index_of = |vs: &[usize]| simplices.iter().position(|(_, s)| s == vs).unwrap();
    let mut columns: Vec<Vec<bool>> = Vec::with_capacity(simplices.len());
    for (_, vs) in &simplices {
        let mut col = vec![false; simplices.len()];
        if vs.len() > 1 {
            for skip in 0..vs.len() {
                let face: Vec<usize> = vs
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != skip)
                    .map(|(_, &v)| v)
                    .collect();
                col[index_of(&face)] = true;
            }
        }
        columns.push(col);
    }

    let low = |col: &Vec<bool>| col.iter().rposition(|&x| x);
    let m = columns.len();
    for j in 0..m {
        loop {
            let Some(l) = low(&columns[j]) else { break };
            let Some(k) = (0..j).find(|&k| low(&columns[k]) == Some(l)) else {
                break;
            };
            let other = columns[k].clone();
            for (a, b) in columns[j].iter_mut().zip(other) {
                *a ^= b;
            }
        }
    }

    let mut paired = vec![false; m];
    let mut bars = Vec::new();
    for j in 0..m {
        if let Some(i) = low(&columns[j]) {
            paired[i] = true;
            paired[j] = true;
            let dim = (simplices[i].1.len() - 1) as u8;
            let (birth, death) = (simplices[i].0, simplices[j].0);
            if dim == 0 || death > birth {
                bars.push((dim, birth, death));
            }
        }
    }
    for j in 0..m {
        let dim = simplices[j].1.len() - 1;
        if !paired[j] && dim < 2 {
            bars.push((dim as u8, simplices[j].0, f64::INFINITY));
        }
    }
    sort_bars(&mut bars);
    bars
}

pub fn sort_bars(bars: &mut [OracleBar]) {
    bars.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
}

/// Kruskal's algorithm with a component-label array; returns the MST weights
/// in ascending order.
pub fn kruskal_weights(dist: &[Vec<f64>]) -> Vec<f64> {
    let n = dist.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((dist[i][j], i, j));
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut label: Vec<usize> = (0..n).collect();
    let mut weights = Vec::new();
    for (w, i, j) in edges {
        let (li, lj) = (label[i], label[j]);
        if li != lj {
            for l in label.iter_mut() {
                if *l == lj {
                    *l = li;
                }
            }
            weights.push(w);
            if weights.len() + 1 == n {
                break;
            }
        }
    }
    weights
}

/// Small deterministic generator so oracle inputs do not depend on the
/// crate's own RNG plumbing.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// `n` points in [-1, 1)^d, with an occasional duplicated row.
    pub fn cloud(&mut self, n: usize, d: usize) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| 2.0 * self.unit() - 1.0).collect())
            .collect();
        if n > 2 && self.below(4) == 0 {
            let src = self.below(n);
            let dst = self.below(n);
            pts[dst] = pts[src].clone();
        }
        pts
    }
}
