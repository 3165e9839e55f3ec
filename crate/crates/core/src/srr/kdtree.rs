use super::{check_query, passes, SrrBackend, StripeHits};
use crate::error::{usage, Result};
use crate::point::{Dataset, PointId};
use crate::scoring::{ScoringVector, StripeRange};

pub const LEAF_CAPACITY: usize = 16;

const NO_CHILD: u32 = u32::MAX;

/// Arena node. Leaves have both children set to `NO_CHILD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KdNode {
    /// Range into the permutation array covered by this subtree.
    pub start: u32,
    pub end: u32,
    pub left: u32,
    pub right: u32,
}

impl KdNode {
    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.left == NO_CHILD
    }

    #[inline]
    pub fn count(&self) -> usize {
        (self.end - self.start) as usize
    }
}

/// Balanced median-split kd-tree with per-node bounding boxes.
///
/// Stripe queries prune any node whose box score interval misses the
/// stripe. Half-space counts take whole subtrees at once when the box lies
/// fully on one side.
#[derive(Debug, Clone, PartialEq)]
pub struct KdTree {
    dim: usize,
    perm: Vec<PointId>,
    nodes: Vec<KdNode>,
    /// `2 * dim` values per node: lows then highs.
    bounds: Vec<f64>,
}

/// Raw arrays of a [`KdTree`], for persistence.
#[derive(Debug, Clone, PartialEq)]
pub struct KdTreeParts {
    pub dim: usize,
    pub perm: Vec<PointId>,
    pub nodes: Vec<KdNode>,
    pub bounds: Vec<f64>,
}

impl KdTree {
    pub fn build(data: &Dataset) -> Self {
        let dim = data.dim();
        let mut tree = KdTree {
            dim,
            perm: data.ids().collect(),
            nodes: Vec::new(),
            bounds: Vec::new(),
        };
        tree.build_node(data, 0, data.len());
        tree
    }

    fn build_node(&mut self, data: &Dataset, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(KdNode {
            start: start as u32,
            end: end as u32,
            left: NO_CHILD,
            right: NO_CHILD,
        });
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for &p in &self.perm[start..end] {
            for (j, &x) in data.coords(p).iter().enumerate() {
                lo[j] = lo[j].min(x);
                hi[j] = hi[j].max(x);
            }
        }
        let axis = (0..self.dim)
            .max_by(|&a, &b| {
                (hi[a] - lo[a])
                    .partial_cmp(&(hi[b] - lo[b]))
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap_or(0);
        self.bounds.extend_from_slice(&lo);
        self.bounds.extend_from_slice(&hi);

        if end - start > LEAF_CAPACITY {
            let mid = start + (end - start) / 2;
            self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                data.coords(a)[axis]
                    .partial_cmp(&data.coords(b)[axis])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let left = self.build_node(data, start, mid);
            let right = self.build_node(data, mid, end);
            let node = &mut self.nodes[id as usize];
            node.left = left;
            node.right = right;
        }
        id
    }

    pub fn from_parts(parts: KdTreeParts) -> Result<Self> {
        let KdTreeParts {
            dim,
            perm,
            nodes,
            bounds,
        } = parts;
        if dim == 0 || nodes.is_empty() || bounds.len() != nodes.len() * 2 * dim {
            return Err(usage("kd-tree arrays have inconsistent sizes"));
        }
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            match seen.get_mut(p as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(usage("kd-tree permutation is not a permutation")),
            }
        }
        for node in &nodes {
            let bad_range = node.start > node.end || node.end as usize > n;
            let bad_child = |c: u32| c != NO_CHILD && c as usize >= nodes.len();
            if bad_range || bad_child(node.left) || bad_child(node.right) {
                return Err(usage("kd-tree node out of range"));
            }
        }
        Ok(Self {
            dim,
            perm,
            nodes,
            bounds,
        })
    }

    pub fn into_parts(self) -> KdTreeParts {
        KdTreeParts {
            dim: self.dim,
            perm: self.perm,
            nodes: self.nodes,
            bounds: self.bounds,
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[KdNode] {
        &self.nodes
    }

    /// Point ids of the subtree rooted at `node`.
    pub fn subtree_ids(&self, node: usize) -> &[PointId] {
        let n = &self.nodes[node];
        &self.perm[n.start as usize..n.end as usize]
    }

    /// Box of `node` as (lows, highs).
    pub fn node_box(&self, node: usize) -> (&[f64], &[f64]) {
        let base = node * 2 * self.dim;
        (
            &self.bounds[base..base + self.dim],
            &self.bounds[base + self.dim..base + 2 * self.dim],
        )
    }

    pub fn depth(&self) -> usize {
        fn go(t: &KdTree, node: u32) -> usize {
            let n = &t.nodes[node as usize];
            if n.is_leaf() {
                1
            } else {
                1 + go(t, n.left).max(go(t, n.right))
            }
        }
        go(self, 0)
    }

    /// Exact range of `f·x` over the node's box. Each term picks the corner
    /// coordinate by the sign of its weight; rounding is monotone, so every
    /// contained point's computed score lands inside.
    #[inline]
    fn score_interval(&self, node: usize, f: &ScoringVector) -> (f64, f64) {
        let (lo, hi) = self.node_box(node);
        let w = f.weights();
        let min = w
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&wj, (&l, &h))| wj * if wj >= 0.0 { l } else { h })
            .sum::<f64>();
        let max = w
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&wj, (&l, &h))| wj * if wj >= 0.0 { h } else { l })
            .sum::<f64>();
        (min, max)
    }

    /// Stripe traversal; `on_prune` sees every node cut off unvisited below.
    pub(crate) fn traverse(
        &self,
        data: &Dataset,
        stripe: &StripeRange,
        mut on_prune: impl FnMut(usize),
    ) -> StripeHits {
        let mut hits = StripeHits::default();
        let mut stack = vec![0u32];
        while let Some(node) = stack.pop() {
            let node = node as usize;
            hits.stats.nodes_visited += 1;
            let (smin, smax) = self.score_interval(node, &stripe.f);
            if smax < stripe.lower || smin > stripe.upper {
                on_prune(node);
                continue;
            }
            let n = self.nodes[node];
            if n.is_leaf() {
                for &p in self.subtree_ids(node) {
                    hits.stats.points_examined += 1;
                    if stripe.contains(data.coords(p)) {
                        hits.ids.push(p);
                    }
                }
            } else {
                stack.push(n.right);
                stack.push(n.left);
            }
        }
        hits.ids.sort_unstable();
        hits
    }
}

impl SrrBackend for KdTree {
    fn name(&self) -> &'static str {
        "kdtree"
    }

    fn query_stripe(&self, data: &Dataset, stripe: &StripeRange) -> Result<StripeHits> {
        check_query(data, self.dim, self.len(), &stripe.f)?;
        Ok(self.traverse(data, stripe, |_| {}))
    }

    fn count_halfspace(
        &self,
        data: &Dataset,
        f: &ScoringVector,
        threshold: f64,
        strict: bool,
    ) -> Result<usize> {
        check_query(data, self.dim, self.len(), f)?;
        let mut count = 0;
        let mut stack = vec![0u32];
        while let Some(node) = stack.pop() {
            let node = node as usize;
            let (smin, smax) = self.score_interval(node, f);
            if !passes(smax, threshold, strict) {
                continue;
            }
            let n = self.nodes[node];
            if passes(smin, threshold, strict) {
                count += n.count();
            } else if n.is_leaf() {
                count += self
                    .subtree_ids(node)
                    .iter()
                    .filter(|&&p| passes(f.score_coords(data.coords(p)), threshold, strict))
                    .count();
            } else {
                stack.push(n.right);
                stack.push(n.left);
            }
        }
        Ok(count)
    }
}
