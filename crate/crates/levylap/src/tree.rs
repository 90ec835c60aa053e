//! Truncated samples of the Poisson weighted infinite tree with loops, and
//! the root resolvent computed two independent ways.
//!
//! A sample is a rooted tree of depth at most `H`: each node at depth `< H`
//! receives children through one point-process draw of the Levy measure
//! (cutoff `delta`, at most `B` kept). Every node `v` also carries a loop
//! weight that mirrors the Laplacian diagonal on the tree,
//!
//! ```text
//! loop(v) = -(edge to parent) - sum of retained child edges,
//! ```
//!
//! with no parent term at the root. The root resolvent
//! `s = ((L_t - z)^{-1})_{root,root}` is computed by
//!
//! * [`tree_resolvent_recursive`]: the bottom-up elimination
//!   `s_v = -(z - sum_k y_k / (s_k y_k - 1))^{-1}`, leaves starting at
//!   `-1/z`. The `(s_k y_k - 1)` denominator carries the child's parent-edge
//!   loop term, and the outer sum carries `v`'s own loop, so the truncated
//!   loop weights are built into the algebra;
//! * [`tree_resolvent_direct`]: assembling the full matrix of the truncated
//!   operator and solving `(L_t - z) x = e_root` by complex Gaussian
//!   elimination with partial pivoting.
//!
//! The two must agree to near machine precision on every sampled tree; that
//! agreement is the oracle for the recursion used everywhere else.

use crate::measure::LevyMeasure;
use crate::point_process::sample_point_process;
use crate::stream::{RandomStream, StreamKind};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Tree truncation: depth `H`, per-node branching cap `B`, weight cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    pub depth: usize,
    pub branching: usize,
    pub delta: f64,
}

impl TruncationParams {
    pub fn new(depth: usize, branching: usize, delta: f64) -> Result<Self> {
        if branching == 0 {
            return Err(Error::InvalidParameter(
                "branching cap must be at least 1".into(),
            ));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weight cutoff must be finite and >= 0, got {delta}"
            )));
        }
        Ok(TruncationParams {
            depth,
            branching,
            delta,
        })
    }
}

/// How a root resolvent value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventMethod {
    Recursive,
    Direct,
}

/// One root-resolvent evaluation.
#[derive(Debug, Clone, Copy)]
pub struct RootResolventSample {
    pub z: Complex64,
    pub value: Complex64,
    pub method: ResolventMethod,
    /// Number of denominator-floor events during evaluation; analytically
    /// impossible for nonzero weights, so anything other than zero flags a
    /// numerical problem worth investigating.
    pub guard_events: usize,
}

/// A sampled truncated tree. Node 0 is the root; parents always precede
/// children in index order.
#[derive(Debug, Clone)]
pub struct TruncatedTree {
    parent: Vec<Option<usize>>,
    /// Edge weight to the parent; 0.0 at the root.
    edge: Vec<f64>,
    loop_weight: Vec<f64>,
    child_index: Vec<usize>,
    child_range: Vec<(usize, usize)>,
}

impl TruncatedTree {
    /// Builds a tree from parent pointers and parent-edge weights, computing
    /// loop weights. `parent[0]` must be `None`, every other node needs a
    /// parent with a smaller index, and `edge[0]` must be zero.
    pub fn from_parts(parent: Vec<Option<usize>>, edge: Vec<f64>) -> Result<Self> {
        if parent.is_empty() || parent.len() != edge.len() {
            return Err(Error::InvalidParameter(
                "tree needs equal-length, nonempty parent and edge lists".into(),
            ));
        }
        if parent[0].is_some() || edge[0] != 0.0 {
            return Err(Error::InvalidParameter(
                "node 0 must be the root with zero parent edge".into(),
            ));
        }
        let n = parent.len();
        for v in 1..n {
            match parent[v] {
                Some(p) if p < v => {}
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "node {v} needs a parent with a smaller index"
                    )))
                }
            }
            if !edge[v].is_finite() {
                return Err(Error::NonFinite(format!("edge weight of node {v}")));
            }
        }

        // counting sort of children by parent keeps each block contiguous
        let mut counts = vec![0usize; n];
        for v in 1..n {
            counts[parent[v].unwrap()] += 1;
        }
        let mut child_range = Vec::with_capacity(n);
        let mut start = 0usize;
        for &c in &counts {
            child_range.push((start, start + c));
            start += c;
        }
        let mut cursor: Vec<usize> = child_range.iter().map(|r| r.0).collect();
        let mut child_index = vec![0usize; n - 1];
        for v in 1..n {
            let p = parent[v].unwrap();
            child_index[cursor[p]] = v;
            cursor[p] += 1;
        }

        let mut loop_weight = vec![0.0; n];
        for v in 0..n {
            let children_sum: f64 = child_index[child_range[v].0..child_range[v].1]
                .iter()
                .map(|&c| edge[c])
                .sum();
            loop_weight[v] = -edge[v] - children_sum;
        }

        Ok(TruncatedTree {
            parent,
            edge,
            loop_weight,
            child_index,
            child_range,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn edge_weight(&self, v: usize) -> f64 {
        self.edge[v]
    }

    pub fn loop_weight(&self, v: usize) -> f64 {
        self.loop_weight[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        let (a, b) = self.child_range[v];
        &self.child_index[a..b]
    }

    /// Parent-pointer text rows `word  parent-word  edge  loop`, one node per
    /// line. Words are dotted child ordinals; the empty root word prints as
    /// `-`.
    pub fn to_text_rows(&self) -> String {
        let n = self.node_count();
        let mut words = vec![String::new(); n];
        let mut out = String::new();
        for v in 0..n {
            let word = match self.parent[v] {
                None => String::new(),
                Some(p) => {
                    let ordinal =
                        self.children(p).iter().position(|&c| c == v).unwrap() + 1;
                    if words[p].is_empty() {
                        format!("{ordinal}")
                    } else {
                        format!("{}.{}", words[p], ordinal)
                    }
                }
            };
            let display = |w: &str| if w.is_empty() { "-".to_string() } else { w.to_string() };
            let parent_word = match self.parent[v] {
                None => "-".to_string(),
                Some(p) => display(&words[p]),
            };
            out.push_str(&format!(
                "{}\t{}\t{:.17e}\t{:.17e}\n",
                display(&word),
                parent_word,
                self.edge[v],
                self.loop_weight[v]
            ));
            words[v] = word;
        }
        out
    }
}

/// Samples one truncated tree: breadth-first, one point-process draw per
/// node above the floor depth.
pub fn sample_tree(
    m: &LevyMeasure,
    params: &TruncationParams,
    rng: &mut RandomStream,
) -> Result<TruncatedTree> {
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut edge: Vec<f64> = vec![0.0];
    let mut level: Vec<usize> = vec![0];
    for _ in 0..params.depth {
        let mut next_level = Vec::new();
        for &v in &level {
            let pp = sample_point_process(m, params.delta, params.branching, rng)?;
            for &y in pp.weights() {
                parent.push(Some(v));
                edge.push(y);
                next_level.push(parent.len() - 1);
            }
        }
        if next_level.is_empty() {
            break;
        }
        level = next_level;
    }
    TruncatedTree::from_parts(parent, edge)
}

const DENOMINATOR_FLOOR: f64 = 1e-14;

fn check_upper_half(z: Complex64) -> Result<()> {
    if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "resolvent needs finite z with Im z > 0, got {z}"
        )));
    }
    Ok(())
}

/// Root resolvent by the bottom-up elimination. Children always carry larger
/// indices than parents, so one descending-index pass evaluates every
/// subtree before its parent.
pub fn tree_resolvent_recursive(tree: &TruncatedTree, z: Complex64) -> Result<RootResolventSample> {
    check_upper_half(z)?;
    let n = tree.node_count();
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    let mut guard_events = 0usize;
    for v in (0..n).rev() {
        let mut child_sum = Complex64::new(0.0, 0.0);
        for &c in tree.children(v) {
            let y = tree.edge_weight(c);
            let mut den = s[c] * y - 1.0;
            if den.norm() < DENOMINATOR_FLOOR {
                guard_events += 1;
                den = if den == Complex64::new(0.0, 0.0) {
                    Complex64::new(DENOMINATOR_FLOOR, 0.0)
                } else {
                    den / den.norm() * DENOMINATOR_FLOOR
                };
            }
            child_sum += y / den;
        }
        s[v] = -((z - child_sum).inv());
        debug_assert!(
            s[v].im > 0.0 && s[v].norm() <= (1.0 + 1e-9) / z.im,
            "node {v}: resolvent {} left the Herglotz region",
            s[v]
        );
    }
    Ok(RootResolventSample {
        z,
        value: s[0],
        method: ResolventMethod::Recursive,
        guard_events,
    })
}

/// Root resolvent by assembling the truncated operator and solving
/// `(L_t - z) x = e_root` with partial-pivot Gaussian elimination.
pub fn tree_resolvent_direct(tree: &TruncatedTree, z: Complex64) -> Result<RootResolventSample> {
    check_upper_half(z)?;
    let n = tree.node_count();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for v in 0..n {
        a[v * n + v] = Complex64::new(tree.loop_weight(v), 0.0) - z;
        if let Some(p) = tree.parent(v) {
            let y = Complex64::new(tree.edge_weight(v), 0.0);
            a[v * n + p] = y;
            a[p * n + v] = y;
        }
    }
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    b[0] = Complex64::new(1.0, 0.0);

    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r * n + col].norm_sqr() > a[piv * n + col].norm_sqr() {
                piv = r;
            }
        }
        let pivot = a[piv * n + col];
        if pivot.norm() == 0.0 {
            // (L_t - z) has definite imaginary part for Im z > 0
            return Err(Error::NonFinite(format!(
                "pivot breakdown at column {col} of the truncated-operator solve"
            )));
        }
        if piv != col {
            for k in col..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        for r in (col + 1)..n {
            let f = a[r * n + col] / pivot;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            a[r * n + col] = Complex64::new(0.0, 0.0);
            for k in (col + 1)..n {
                let upper = a[col * n + k];
                a[r * n + k] -= f * upper;
            }
            let rhs = b[col];
            b[r] -= f * rhs;
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in (r + 1)..n {
            acc -= a[r * n + k] * b[k];
        }
        b[r] = acc / a[r * n + r];
    }

    let value = b[0];
    debug_assert!(
        value.im > 0.0 && value.norm() <= (1.0 + 1e-9) / z.im,
        "direct resolvent {value} left the Herglotz region"
    );
    Ok(RootResolventSample {
        z,
        value,
        method: ResolventMethod::Direct,
        guard_events: 0,
    })
}

/// Independent recursive root resolvents over `count` fresh trees, one
/// derived stream per tree so results do not depend on thread schedule.
pub fn sample_root_resolvent_ensemble(
    m: &LevyMeasure,
    params: &TruncationParams,
    z: Complex64,
    count: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("ensemble needs count >= 1".into()));
    }
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomStream::derive(seed, StreamKind::Tree, i);
            let tree = sample_tree(m, params, &mut rng)?;
            let sample = tree_resolvent_recursive(&tree, z)?;
            debug_assert_eq!(sample.guard_events, 0);
            Ok(sample.value)
        })
        .collect()
}
