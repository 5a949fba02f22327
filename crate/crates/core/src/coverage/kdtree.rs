//! Static k-d tree answering "nearest other point" queries for every point of
//! the cloud it was built on.

use crate::cloud::{sq_dist_bounded, PointCloud};

const LEAF_SIZE: usize = 8;

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

pub(crate) struct KdTree<'a> {
    cloud: &'a PointCloud,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub(crate) fn build(cloud: &'a PointCloud) -> Self {
        let mut tree = Self {
            cloud,
            order: (0..cloud.len()).collect(),
            nodes: Vec::new(),
        };
        if !cloud.is_empty() {
            tree.build_node(0, cloud.len());
        }
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let Some(dim) = self.widest_dim(start, end) else {
            // every point in the range coincides
            self.nodes.push(Node::Leaf { start, end });
            return id;
        };
        let cloud = self.cloud;
        let mid = (end - start) / 2;
        self.order[start..end]
            .select_nth_unstable_by(mid, |&a, &b| cloud.point(a)[dim].total_cmp(&cloud.point(b)[dim]));
        let value = cloud.point(self.order[start + mid])[dim];

        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, start + mid);
        let right = self.build_node(start + mid, end);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }

    fn widest_dim(&self, start: usize, end: usize) -> Option<usize> {
        let k = self.cloud.dim();
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for &i in &self.order[start..end] {
            for (d, &x) in self.cloud.point(i).iter().enumerate() {
                lo[d] = lo[d].min(x);
                hi[d] = hi[d].max(x);
            }
        }
        let (dim, spread) = (0..k)
            .map(|d| (d, hi[d] - lo[d]))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        (spread > 0.0).then_some(dim)
    }

    /// Squared distance from point `query` to its nearest other point.
    pub(crate) fn nearest_other_sq(&self, query: usize) -> f64 {
        let mut best = f64::INFINITY;
        if !self.nodes.is_empty() {
            self.search(0, query, self.cloud.point(query), &mut best);
        }
        best
    }

    fn search(&self, node: usize, qi: usize, q: &[f64], best: &mut f64) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == qi {
                        continue;
                    }
                    let d = sq_dist_bounded(q, self.cloud.point(j), *best);
                    if d < *best {
                        *best = d;
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                // left holds coordinates <= value, right >= value
                let diff = q[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, qi, q, best);
                if diff * diff < *best {
                    self.search(far, qi, q, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_nearest_in_line() {
        let xs: Vec<f64> = (0..50).map(|i| (i * i) as f64).collect();
        let cloud = PointCloud::from_columns(&[xs]).unwrap();
        let tree = KdTree::build(&cloud);
        assert_eq!(tree.nearest_other_sq(0), 1.0);
        assert_eq!(tree.nearest_other_sq(10), 19.0 * 19.0);
    }

    #[test]
    fn coincident_points() {
        let cloud = PointCloud::from_rows(&vec![[0.5, 0.5]; 40]).unwrap();
        let tree = KdTree::build(&cloud);
        assert!((0..40).all(|i| tree.nearest_other_sq(i) == 0.0));
    }
}
