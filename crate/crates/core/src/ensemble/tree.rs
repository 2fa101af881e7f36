//! CART induction.
//!
//! Trees are grown breadth-first over feature columns presorted once per
//! training set. Each level scans every column in sorted order, accumulating
//! the statistics of every open node at once, and evaluates a candidate split
//! at the midpoint between consecutive distinct values. Columns are scanned in
//! parallel and reduced in feature order, so the result does not depend on the
//! number of worker threads.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Relative gain a split must exceed to count as an impurity reduction.
const MIN_RELATIVE_GAIN: f64 = 1e-12;

/// One node of a tree stored in preorder. The left child of an internal node
/// is always the next node; `right` is an index into the same arena.
///
/// For classification trees `leaf_value` is the `(Normal, Anomaly)` class
/// distribution. Regression trees (gradient boosting) keep the raw leaf score
/// in slot 0 and 0.0 in slot 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub split_feature: Option<u32>,
    pub split_threshold: f64,
    pub left: u32,
    pub right: u32,
    pub leaf_value: [f64; 2],
    pub n_train: u64,
}

impl TreeNode {
    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.split_feature.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Validates preorder layout: left child follows its parent, children
    /// lie after their parent, and every node is reachable exactly once.
    pub fn from_nodes(nodes: Vec<TreeNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Format("tree without nodes".into()));
        }
        let mut next = 0usize;
        check_preorder(&nodes, 0, &mut next, 0)?;
        if next != nodes.len() {
            return Err(Error::Format(format!(
                "tree has {} unreachable nodes",
                nodes.len() - next
            )));
        }
        Ok(Tree { nodes })
    }

    pub fn leaf(value: [f64; 2], n_train: u64) -> Self {
        Tree {
            nodes: vec![TreeNode {
                split_feature: None,
                split_threshold: 0.0,
                left: 0,
                right: 0,
                leaf_value: value,
                n_train,
            }],
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            let n = &nodes[i];
            if n.is_leaf() {
                0
            } else {
                1 + walk(nodes, n.left as usize).max(walk(nodes, n.right as usize))
            }
        }
        walk(&self.nodes, 0)
    }

    /// Value of the leaf `x` falls into. Values `<= threshold` go left.
    #[inline]
    pub fn leaf_value(&self, x: &[f64]) -> &[f64; 2] {
        let mut i = 0usize;
        loop {
            let n = &self.nodes[i];
            match n.split_feature {
                None => return &n.leaf_value,
                Some(f) => {
                    i = if x[f as usize] <= n.split_threshold {
                        n.left as usize
                    } else {
                        n.right as usize
                    }
                }
            }
        }
    }

    pub(crate) fn leaf_value_mut(&mut self, i: usize) -> &mut [f64; 2] {
        &mut self.nodes[i].leaf_value
    }

    pub(crate) fn max_feature(&self) -> Option<u32> {
        self.nodes.iter().filter_map(|n| n.split_feature).max()
    }
}

fn check_preorder(nodes: &[TreeNode], i: usize, next: &mut usize, depth: usize) -> Result<()> {
    if i != *next || i >= nodes.len() || depth > nodes.len() {
        return Err(Error::Format("tree nodes are not in preorder".into()));
    }
    *next += 1;
    let n = &nodes[i];
    if n.split_feature.is_some() {
        if !n.split_threshold.is_finite() {
            return Err(Error::Format("non-finite split threshold".into()));
        }
        if n.left as usize != i + 1 {
            return Err(Error::Format("left child must follow its parent".into()));
        }
        check_preorder(nodes, n.left as usize, next, depth + 1)?;
        check_preorder(nodes, n.right as usize, next, depth + 1)?;
    }
    Ok(())
}

/// Growth limits for a single tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Fraction of features drawn (without replacement) at every split.
    pub feature_subsample: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            feature_subsample: 1.0,
        }
    }
}

impl TreeParams {
    pub(crate) fn features_per_split(&self, n_features: usize) -> usize {
        ((self.feature_subsample * n_features as f64 + 1e-9).floor() as usize).clamp(1, n_features)
    }
}

/// Fits one weighted Gini classification tree.
///
/// Rows with zero weight take no part in training.
pub fn fit_tree<R: Rng + ?Sized>(
    data: &Dataset,
    weights: &[f64],
    params: &TreeParams,
    rng: &mut R,
) -> Result<Tree> {
    if data.is_empty() {
        return Err(Error::invalid("cannot fit a tree on an empty dataset"));
    }
    if weights.len() != data.n_rows() {
        return Err(Error::invalid(format!(
            "{} weights for {} rows",
            weights.len(),
            data.n_rows()
        )));
    }
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::invalid("weights must be finite and non-negative"));
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::invalid("weights sum to zero"));
    }
    if !(params.feature_subsample > 0.0 && params.feature_subsample <= 1.0) {
        return Err(Error::invalid("feature_subsample must be in (0, 1]"));
    }
    if params.min_samples_leaf == 0 || params.max_depth == Some(0) {
        return Err(Error::invalid("min_samples_leaf and max_depth must be positive"));
    }
    let matrix = TrainMatrix::new(data);
    let crit = GiniCriterion::new(data.labels(), weights);
    Ok(grow(&matrix, &crit, params, rng).tree)
}

/// Column-major features with per-column row order sorted by value.
pub(crate) struct TrainMatrix {
    pub(crate) columns: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
    n_rows: usize,
}

impl TrainMatrix {
    pub(crate) fn new(data: &Dataset) -> Self {
        assert!(data.n_rows() < NONE as usize, "too many rows");
        let columns = data.columns();
        let sorted = columns
            .par_iter()
            .map(|col| {
                let mut order: Vec<u32> = (0..col.len() as u32).collect();
                // stable: equal values stay in row order
                order.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
                order
            })
            .collect();
        TrainMatrix {
            columns,
            sorted,
            n_rows: data.n_rows(),
        }
    }

    pub(crate) fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn n_features(&self) -> usize {
        self.columns.len()
    }
}

/// Node statistics and split scoring for one kind of tree.
pub(crate) trait Criterion: Sync {
    type Stats: Copy + Default + Send + Sync;

    /// Whether the row takes part in training at all.
    fn active(&self, row: usize) -> bool;
    fn add(&self, stats: &mut Self::Stats, row: usize);
    fn remainder(total: &Self::Stats, left: &Self::Stats) -> Self::Stats;
    fn count(stats: &Self::Stats) -> usize;
    /// Split gain is `score(left) + score(right) - score(parent)`.
    fn score(stats: &Self::Stats) -> f64;
    fn is_pure(stats: &Self::Stats) -> bool;
    fn leaf(stats: &Self::Stats) -> [f64; 2];
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ClassStats {
    w: [f64; 2],
    n: usize,
}

/// Weighted Gini impurity.
pub(crate) struct GiniCriterion<'a> {
    labels: &'a [Label],
    weights: &'a [f64],
}

impl<'a> GiniCriterion<'a> {
    pub(crate) fn new(labels: &'a [Label], weights: &'a [f64]) -> Self {
        GiniCriterion { labels, weights }
    }
}

impl Criterion for GiniCriterion<'_> {
    type Stats = ClassStats;

    #[inline]
    fn active(&self, row: usize) -> bool {
        self.weights[row] > 0.0
    }

    #[inline]
    fn add(&self, s: &mut ClassStats, row: usize) {
        s.w[self.labels[row].index()] += self.weights[row];
        s.n += 1;
    }

    #[inline]
    fn remainder(total: &ClassStats, left: &ClassStats) -> ClassStats {
        ClassStats {
            w: [
                (total.w[0] - left.w[0]).max(0.0),
                (total.w[1] - left.w[1]).max(0.0),
            ],
            n: total.n - left.n,
        }
    }

    #[inline]
    fn count(s: &ClassStats) -> usize {
        s.n
    }

    /// Weighted Gini impurity is `W - sum(w_c^2) / W`; maximising the sum of
    /// `sum(w_c^2) / W` over children minimises it.
    #[inline]
    fn score(s: &ClassStats) -> f64 {
        let total = s.w[0] + s.w[1];
        if total > 0.0 {
            (s.w[0] * s.w[0] + s.w[1] * s.w[1]) / total
        } else {
            0.0
        }
    }

    fn is_pure(s: &ClassStats) -> bool {
        s.w[0] == 0.0 || s.w[1] == 0.0
    }

    fn leaf(s: &ClassStats) -> [f64; 2] {
        let total = s.w[0] + s.w[1];
        let p_anomaly = s.w[1] / total;
        [1.0 - p_anomaly, p_anomaly]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct GradStats {
    g: f64,
    g2: f64,
    h: f64,
    n: usize,
}

/// Variance reduction on residuals; leaves take one Newton step.
pub(crate) struct NewtonCriterion<'a> {
    grad: &'a [f64],
    hess: &'a [f64],
}

impl<'a> NewtonCriterion<'a> {
    pub(crate) fn new(grad: &'a [f64], hess: &'a [f64]) -> Self {
        NewtonCriterion { grad, hess }
    }
}

impl Criterion for NewtonCriterion<'_> {
    type Stats = GradStats;

    #[inline]
    fn active(&self, _row: usize) -> bool {
        true
    }

    #[inline]
    fn add(&self, s: &mut GradStats, row: usize) {
        let g = self.grad[row];
        s.g += g;
        s.g2 += g * g;
        s.h += self.hess[row];
        s.n += 1;
    }

    #[inline]
    fn remainder(total: &GradStats, left: &GradStats) -> GradStats {
        GradStats {
            g: total.g - left.g,
            g2: total.g2 - left.g2,
            h: total.h - left.h,
            n: total.n - left.n,
        }
    }

    #[inline]
    fn count(s: &GradStats) -> usize {
        s.n
    }

    #[inline]
    fn score(s: &GradStats) -> f64 {
        if s.n > 0 {
            s.g * s.g / s.n as f64
        } else {
            0.0
        }
    }

    fn is_pure(s: &GradStats) -> bool {
        if s.n < 2 {
            return true;
        }
        let n = s.n as f64;
        let mean = s.g / n;
        s.g2 / n - mean * mean <= 1e-14 * (1.0 + mean * mean)
    }

    fn leaf(s: &GradStats) -> [f64; 2] {
        let value = if s.h.abs() < 1e-150 { 0.0 } else { s.g / s.h };
        [value, 0.0]
    }
}

pub(crate) struct GrownTree {
    pub(crate) tree: Tree,
    /// Preorder index of the leaf each row ended in; `u32::MAX` for inactive
    /// rows.
    pub(crate) leaf_of: Vec<u32>,
}

struct Pending<S> {
    arena: usize,
    depth: usize,
    stats: S,
}

struct ArenaNode {
    split: Option<(u32, f64)>,
    children: (usize, usize),
    leaf: [f64; 2],
    n_train: u64,
}

#[derive(Clone, Copy)]
struct Candidate<S> {
    feature: u32,
    threshold: f64,
    gain: f64,
    _left: S,
}

#[derive(Clone, Copy, Default)]
struct ScanState<S> {
    left: S,
    last: f64,
    seen: bool,
}

pub(crate) fn grow<C: Criterion, R: Rng + ?Sized>(
    m: &TrainMatrix,
    crit: &C,
    params: &TreeParams,
    rng: &mut R,
) -> GrownTree {
    let n_rows = m.n_rows();
    let n_features = m.n_features();
    let k_features = params.features_per_split(n_features);
    let min_leaf = params.min_samples_leaf.max(1);

    let mut node_of = vec![NONE; n_rows];
    let mut root_stats = C::Stats::default();
    for (r, slot) in node_of.iter_mut().enumerate() {
        if crit.active(r) {
            *slot = 0;
            crit.add(&mut root_stats, r);
        }
    }

    let mut arena: Vec<ArenaNode> = vec![ArenaNode {
        split: None,
        children: (0, 0),
        leaf: [0.0; 2],
        n_train: C::count(&root_stats) as u64,
    }];
    let mut leaf_of_arena = vec![NONE; n_rows];
    let mut frontier = vec![Pending {
        arena: 0,
        depth: 0,
        stats: root_stats,
    }];
    let mut owned_order: Option<Vec<Vec<u32>>> = None;
    let mut active_rows = C::count(&root_stats);
    if active_rows < n_rows / 2 {
        owned_order = Some(compact(&m.sorted, &node_of));
    }

    while !frontier.is_empty() {
        // Which open nodes try to split, and on which features.
        let mut search_slot = vec![NONE; frontier.len()];
        let mut n_search = 0usize;
        let mut considers: Vec<bool> = Vec::new();
        for (l, p) in frontier.iter().enumerate() {
            let depth_ok = params.max_depth.is_none_or(|d| p.depth < d);
            let stop = !depth_ok || C::is_pure(&p.stats) || C::count(&p.stats) < 2 * min_leaf;
            if stop {
                continue;
            }
            search_slot[l] = n_search as u32;
            n_search += 1;
            let start = considers.len();
            considers.resize(start + n_features, k_features == n_features);
            if k_features < n_features {
                for f in index::sample(rng, n_features, k_features) {
                    considers[start + f] = true;
                }
            }
        }

        let mut best: Vec<Option<Candidate<C::Stats>>> = vec![None; n_search];
        if n_search > 0 {
            let order = owned_order.as_deref().unwrap_or(&m.sorted);
            let totals: Vec<C::Stats> = frontier
                .iter()
                .enumerate()
                .filter(|(l, _)| search_slot[*l] != NONE)
                .map(|(_, p)| p.stats)
                .collect();
            let per_feature: Vec<Vec<Option<Candidate<C::Stats>>>> = (0..n_features)
                .into_par_iter()
                .map(|f| {
                    scan_feature(
                        f,
                        &order[f],
                        &m.columns[f],
                        &node_of,
                        &search_slot,
                        &considers,
                        n_features,
                        &totals,
                        min_leaf,
                        crit,
                    )
                })
                .collect();
            for cands in per_feature {
                for (slot, c) in cands.into_iter().enumerate() {
                    if let Some(c) = c {
                        if best[slot].is_none_or(|b| c.gain > b.gain) {
                            best[slot] = Some(c);
                        }
                    }
                }
            }
        }

        // Materialise splits and leaves for this level.
        let mut next_local = vec![(NONE, NONE); frontier.len()];
        let mut next_frontier = Vec::new();
        for (l, p) in frontier.iter().enumerate() {
            let split = match search_slot[l] {
                NONE => None,
                s => best[s as usize],
            };
            match split {
                Some(c) => {
                    let left = arena.len();
                    let right = left + 1;
                    for _ in 0..2 {
                        arena.push(ArenaNode {
                            split: None,
                            children: (0, 0),
                            leaf: [0.0; 2],
                            n_train: 0,
                        });
                    }
                    arena[p.arena].split = Some((c.feature, c.threshold));
                    arena[p.arena].children = (left, right);
                    next_local[l] = (next_frontier.len() as u32, next_frontier.len() as u32 + 1);
                    for (a, _) in [(left, 0), (right, 1)] {
                        next_frontier.push(Pending {
                            arena: a,
                            depth: p.depth + 1,
                            stats: C::Stats::default(),
                        });
                    }
                }
                None => {
                    arena[p.arena].leaf = C::leaf(&p.stats);
                }
            }
        }

        active_rows = 0;
        for r in 0..n_rows {
            let l = node_of[r];
            if l == NONE {
                continue;
            }
            let l = l as usize;
            let (nl, nr) = next_local[l];
            if nl == NONE {
                leaf_of_arena[r] = frontier[l].arena as u32;
                node_of[r] = NONE;
                continue;
            }
            let (f, t) = arena[frontier[l].arena].split.expect("split node");
            let child = if m.columns[f as usize][r] <= t { nl } else { nr };
            node_of[r] = child;
            crit.add(&mut next_frontier[child as usize].stats, r);
            active_rows += 1;
        }
        for p in &next_frontier {
            arena[p.arena].n_train = C::count(&p.stats) as u64;
        }

        let listed = owned_order
            .as_ref()
            .map_or(n_rows, |o| o.first().map_or(0, Vec::len));
        if active_rows > 0 && active_rows * 2 < listed {
            let order = owned_order.as_deref().unwrap_or(&m.sorted);
            owned_order = Some(compact(order, &node_of));
        }
        frontier = next_frontier;
    }

    // BFS arena -> preorder
    let mut preorder_of = vec![0u32; arena.len()];
    let mut nodes = Vec::with_capacity(arena.len());
    let mut stack = vec![(0usize, None::<usize>)];
    while let Some((a, parent_right_slot)) = stack.pop() {
        let idx = nodes.len();
        preorder_of[a] = idx as u32;
        if let Some(p) = parent_right_slot {
            let parent: &mut TreeNode = &mut nodes[p];
            parent.right = idx as u32;
        }
        let node = &arena[a];
        nodes.push(TreeNode {
            split_feature: node.split.map(|(f, _)| f),
            split_threshold: node.split.map_or(0.0, |(_, t)| t),
            left: if node.split.is_some() { idx as u32 + 1 } else { 0 },
            right: 0,
            leaf_value: node.leaf,
            n_train: node.n_train,
        });
        if node.split.is_some() {
            let (l, r) = node.children;
            stack.push((r, Some(idx)));
            stack.push((l, None));
        }
    }
    let leaf_of = leaf_of_arena
        .into_iter()
        .map(|a| if a == NONE { NONE } else { preorder_of[a as usize] })
        .collect();
    GrownTree {
        tree: Tree { nodes },
        leaf_of,
    }
}

fn compact(order: &[Vec<u32>], node_of: &[u32]) -> Vec<Vec<u32>> {
    order
        .par_iter()
        .map(|col| {
            col.iter()
                .copied()
                .filter(|&r| node_of[r as usize] != NONE)
                .collect()
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn scan_feature<C: Criterion>(
    f: usize,
    order: &[u32],
    column: &[f64],
    node_of: &[u32],
    search_slot: &[u32],
    considers: &[bool],
    n_features: usize,
    totals: &[C::Stats],
    min_leaf: usize,
    crit: &C,
) -> Vec<Option<Candidate<C::Stats>>> {
    let n_search = totals.len();
    let mut best: Vec<Option<Candidate<C::Stats>>> = vec![None; n_search];
    if !(0..n_search).any(|s| considers[s * n_features + f]) {
        return best;
    }
    let parent_score: Vec<f64> = totals.iter().map(C::score).collect();
    let mut state: Vec<ScanState<C::Stats>> = vec![ScanState::default(); n_search];
    for &r in order {
        let r = r as usize;
        let l = node_of[r];
        if l == NONE {
            continue;
        }
        let s = search_slot[l as usize];
        if s == NONE {
            continue;
        }
        let s = s as usize;
        if !considers[s * n_features + f] {
            continue;
        }
        let v = column[r];
        let st = &mut state[s];
        if st.seen && v > st.last {
            let n_left = C::count(&st.left);
            let n_right = C::count(&totals[s]) - n_left;
            if n_left >= min_leaf && n_right >= min_leaf {
                let right = C::remainder(&totals[s], &st.left);
                let gain = C::score(&st.left) + C::score(&right) - parent_score[s];
                let floor = MIN_RELATIVE_GAIN * parent_score[s].abs().max(f64::MIN_POSITIVE);
                if gain > floor && best[s].is_none_or(|b| gain > b.gain) {
                    let mut threshold = st.last + (v - st.last) / 2.0;
                    if threshold >= v {
                        threshold = st.last;
                    }
                    best[s] = Some(Candidate {
                        feature: f as u32,
                        threshold,
                        gain,
                        _left: st.left,
                    });
                }
            }
        }
        crit.add(&mut st.left, r);
        st.last = v;
        st.seen = true;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic, Provenance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy(values: &[f64], labels: &[Label]) -> Dataset {
        Dataset::new(values.to_vec(), 1, labels.to_vec(), Provenance::Synthetic).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    use Label::{Anomaly as A, Normal as N};

    #[test]
    fn separable_1d_single_split() {
        let d = toy(&[0.0, 1.0, 2.0, 3.0], &[N, N, A, A]);
        let t = fit_tree(&d, &[1.0; 4], &TreeParams::default(), &mut rng()).unwrap();
        assert_eq!(t.node_count(), 3);
        let root = t.root();
        assert_eq!(root.split_feature, Some(0));
        assert_eq!(root.split_threshold, 1.5);
        assert_eq!(t.nodes()[root.left as usize].leaf_value, [1.0, 0.0]);
        assert_eq!(t.nodes()[root.right as usize].leaf_value, [0.0, 1.0]);
        assert_eq!(root.n_train, 4);
        assert_eq!(t.nodes()[1].n_train, 2);
    }

    #[test]
    fn single_class_is_a_leaf() {
        let d = toy(&[0.0, 1.0, 2.0], &[N, N, N]);
        let t = fit_tree(&d, &[1.0; 3], &TreeParams::default(), &mut rng()).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.root().leaf_value, [1.0, 0.0]);
    }

    #[test]
    fn depth_limit_honoured_on_random_data() {
        let d = make_synthetic(200, 4, 0.3, 0.5, 5).unwrap();
        let params = TreeParams {
            max_depth: Some(3),
            ..TreeParams::default()
        };
        let t = fit_tree(&d, &vec![1.0; 200], &params, &mut rng()).unwrap();
        assert!(t.depth() <= 3);
        assert!(t.depth() >= 1);
        for n in t.nodes().iter().filter(|n| n.is_leaf()) {
            assert!(n.leaf_value.iter().all(|p| *p >= 0.0));
            assert!((n.leaf_value[0] + n.leaf_value[1] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn error_paths() {
        let d = toy(&[0.0, 1.0], &[N, A]);
        let p = TreeParams::default();
        assert!(fit_tree(&d, &[0.0, 0.0], &p, &mut rng()).is_err());
        assert!(fit_tree(&d, &[1.0], &p, &mut rng()).is_err());
        let empty = Dataset::new(vec![], 1, vec![], Provenance::Synthetic).unwrap();
        assert!(matches!(
            fit_tree(&empty, &[], &p, &mut rng()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn zero_weight_rows_are_ignored() {
        // the mislabelled row at x=0.5 has no weight
        let d = toy(&[0.0, 0.5, 1.0, 2.0, 3.0], &[N, A, N, A, A]);
        let t = fit_tree(&d, &[1.0, 0.0, 1.0, 1.0, 1.0], &TreeParams::default(), &mut rng())
            .unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.root().split_threshold, 1.5);
        assert_eq!(t.root().n_train, 4);
    }

    #[test]
    fn min_samples_leaf_blocks_small_children() {
        let d = toy(&[0.0, 1.0, 2.0, 3.0], &[N, A, A, A]);
        let params = TreeParams {
            min_samples_leaf: 2,
            ..TreeParams::default()
        };
        let t = fit_tree(&d, &[1.0; 4], &params, &mut rng()).unwrap();
        // the only pure split would leave one row on the left
        assert_eq!(t.root().split_threshold, 1.5);
        assert_eq!(t.nodes()[1].leaf_value, [0.5, 0.5]);
    }

    #[test]
    fn ties_pick_lowest_feature_then_threshold() {
        // both features separate the classes identically
        let feats = vec![0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        let d = Dataset::new(feats, 2, vec![N, N, A, A], Provenance::Synthetic).unwrap();
        let t = fit_tree(&d, &[1.0; 4], &TreeParams::default(), &mut rng()).unwrap();
        assert_eq!(t.root().split_feature, Some(0));
    }

    #[test]
    fn adjacent_floats_still_separate() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let d = toy(&[a, b], &[N, A]);
        let t = fit_tree(&d, &[1.0; 2], &TreeParams::default(), &mut rng()).unwrap();
        assert_eq!(t.leaf_value(&[a]), &[1.0, 0.0]);
        assert_eq!(t.leaf_value(&[b]), &[0.0, 1.0]);
    }

    #[test]
    fn from_nodes_rejects_bad_layout() {
        let leaf = TreeNode {
            split_feature: None,
            split_threshold: 0.0,
            left: 0,
            right: 0,
            leaf_value: [1.0, 0.0],
            n_train: 1,
        };
        let mut root = leaf.clone();
        root.split_feature = Some(0);
        root.left = 1;
        root.right = 1;
        assert!(Tree::from_nodes(vec![root, leaf.clone()]).is_err());
        assert!(Tree::from_nodes(vec![leaf.clone(), leaf]).is_err());
        assert!(Tree::from_nodes(vec![]).is_err());
    }
}
