//! Parabolic quantum Bruhat graphs and the combinatorics built on them.
//!
//! - [`Qbg`]: the quantum Bruhat graph `QBG(W^J)` — vertices are the minimal
//!   coset representatives `W^J`, edges `u -> floor(u s_beta)` labeled by
//!   `beta` in `Delta^+ \ Delta_J^+`, each either a *Bruhat* edge
//!   (`l(v) = l(u) + 1`) or a *quantum* edge
//!   (`l(v) = l(u) + 1 - 2 <rho - rho_J, beta^vee>`). Shortest-path lengths
//!   `l(u => v)` and weights `wt^J(u => v)` (the projected sum of coroots of
//!   quantum-edge labels, well-defined over shortest paths) are tabulated
//!   for all pairs at build time.
//! - The *tilted Bruhat order* `u <=_w v` and the *semi-infinite order*
//!   comparison on `(W^J)_af` via the weight criterion
//!   `x >= y  iff  [xi_x]^J >= wt^J(cl(y) => cl(x)) + [xi_y]^J`.
//! - *Reflection orders* on the positive roots from reduced words of the
//!   longest element, label-increasing shortest paths, and the sets
//!   `EQB(w)` of final directions, computed by three independent
//!   algorithms (label-increasing paths, a descending recursion, and a
//!   brute-force scan) that the test suite plays against each other.
//! - The cells `K^J_w` whose disjoint union is the semi-infinite upper cone
//!   above `w`: membership, explicit parametrization, the Bruhat-maximal
//!   element below an affine element, and an exhaustive partition checker.

use crate::affine::{self, AffineElt};
use crate::cartan::{Coroot, WeylElt, WeylGroup};
use rayon::prelude::*;
use serde_json::json;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

/// Kind of a quantum-Bruhat-graph edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// `l(v) = l(u) + 1`.
    Bruhat,
    /// `l(v) = l(u) + 1 - 2 <rho - rho_J, beta^vee>`.
    Quantum,
}

/// A directed edge `u -> v` of the graph, labeled by a positive root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QbgEdge {
    /// Source, as an index into [`Qbg::vertices`].
    pub src: usize,
    /// Destination, as an index into [`Qbg::vertices`].
    pub dst: usize,
    /// Label `beta`, as a positive-root index of the root system.
    pub label: usize,
    pub kind: EdgeKind,
}

/// Length and weight of a shortest directed path `u => v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathData {
    /// `l(u => v)`: number of edges of a shortest directed path.
    pub length: usize,
    /// `wt^J(u => v)`: sum of `beta^vee` over the quantum edges of any
    /// shortest path, with the `J`-coordinates projected away.
    pub weight: Coroot,
}

/// The quantum Bruhat graph `QBG(W^J)` with all-pairs shortest-path data.
#[derive(Clone, Debug)]
pub struct Qbg {
    wg: Arc<WeylGroup>,
    j: Vec<usize>,
    vertices: Vec<WeylElt>,
    /// Element index -> vertex position (or `usize::MAX` for non-reps).
    vpos: Vec<usize>,
    edges: Vec<QbgEdge>,
    /// Outgoing edge indices per vertex.
    out: Vec<Vec<usize>>,
    /// Flattened `n x n` shortest-path lengths.
    dist: Vec<u32>,
    /// Flattened `n x n x rank` shortest-path weights (projected).
    wt: Vec<i64>,
}

impl Qbg {
    /// Build `QBG(W^J)`, enumerating all edges and tabulating all-pairs
    /// shortest-path lengths and weights by breadth-first search from each
    /// source.
    ///
    /// Panics if the graph fails one of its structural invariants (strong
    /// connectivity; well-definedness of shortest-path weights).
    pub fn build(wg: Arc<WeylGroup>, j: &[usize]) -> Qbg {
        let rank = wg.rank();
        let rs = wg.root_system();
        let mut j: Vec<usize> = j.to_vec();
        j.sort_unstable();
        j.dedup();
        assert!(j.iter().all(|&i| i < rank), "J must consist of node indices");

        let vertices = wg.min_coset_reps(&j);
        let n = vertices.len();
        let mut vpos = vec![usize::MAX; wg.order()];
        for (p, &v) in vertices.iter().enumerate() {
            vpos[v.index()] = p;
        }

        let j_roots = rs.positive_root_indices_in(&j);
        let num_pos = rs.num_positive_roots();
        let mut in_j = vec![false; num_pos];
        for &k in &j_roots {
            in_j[k] = true;
        }
        // two_rho[k] = 2 <rho - rho_J, beta_k^vee>, computed exactly as
        // 2 * height(beta_k^vee) - sum over gamma in Delta_J^+ of
        // <gamma, beta_k^vee>.
        let two_rho: Vec<i64> = (0..num_pos)
            .map(|k| {
                let bv = &rs.positive_coroots()[k];
                let height: i64 = bv.coords().iter().sum();
                let j_part: i64 = j_roots
                    .iter()
                    .map(|&g| rs.pair_root(&rs.positive_roots()[g], bv))
                    .sum();
                2 * height - j_part
            })
            .collect();

        let mut edges = Vec::new();
        let mut out = vec![Vec::new(); n];
        for (up, &u) in vertices.iter().enumerate() {
            let lu = wg.length(u) as i64;
            for k in 0..num_pos {
                if in_j[k] {
                    continue;
                }
                debug_assert!(two_rho[k] >= 2, "<rho - rho_J, beta^vee> >= 1 off Delta_J");
                let v = wg.min_rep(wg.mul(u, wg.reflection(k)), &j);
                let lv = wg.length(v) as i64;
                let kind = if lv == lu + 1 {
                    EdgeKind::Bruhat
                } else if lv == lu + 1 - two_rho[k] {
                    EdgeKind::Quantum
                } else {
                    continue;
                };
                let e = edges.len();
                edges.push(QbgEdge {
                    src: up,
                    dst: vpos[v.index()],
                    label: k,
                    kind,
                });
                out[up].push(e);
            }
        }

        let mut graph = Qbg {
            wg,
            j,
            vertices,
            vpos,
            edges,
            out,
            dist: vec![u32::MAX; n * n],
            wt: vec![0; n * n * rank],
        };
        graph.fill_tables();
        graph
    }

    /// All-pairs BFS. Asserts that every vertex is reachable from every
    /// other (strong connectivity) and that all shortest paths between a
    /// pair carry the same projected weight.
    fn fill_tables(&mut self) {
        let n = self.vertices.len();
        let rank = self.wg.rank();
        let rs = self.wg.root_system();
        // Projected coroot of each positive root, for quantum-edge weights.
        let proj: Vec<Coroot> = (0..rs.num_positive_roots())
            .map(|k| affine::project_coroot_mod_j(&rs.positive_coroots()[k], &self.j))
            .collect();
        for s in 0..n {
            self.dist[s * n + s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(y) = queue.pop_front() {
                let dy = self.dist[s * n + y];
                let wy: Vec<i64> = self.wt[(s * n + y) * rank..(s * n + y + 1) * rank].to_vec();
                for &ei in &self.out[y] {
                    let e = self.edges[ei];
                    let z = e.dst;
                    let cand = dy + 1;
                    let mut wz = wy.clone();
                    if e.kind == EdgeKind::Quantum {
                        for (a, b) in wz.iter_mut().zip(proj[e.label].coords()) {
                            *a += b;
                        }
                    }
                    let slot = s * n + z;
                    if self.dist[slot] == u32::MAX {
                        self.dist[slot] = cand;
                        self.wt[slot * rank..(slot + 1) * rank].copy_from_slice(&wz);
                        queue.push_back(z);
                    } else if self.dist[slot] == cand {
                        assert_eq!(
                            &self.wt[slot * rank..(slot + 1) * rank],
                            wz.as_slice(),
                            "shortest-path weight must not depend on the path"
                        );
                    }
                }
            }
            assert!(
                (0..n).all(|t| self.dist[s * n + t] != u32::MAX),
                "quantum Bruhat graph must be strongly connected"
            );
        }
    }

    /// The Weyl group the graph is built over.
    pub fn weyl(&self) -> &WeylGroup {
        &self.wg
    }

    /// Shared handle to the Weyl group.
    pub fn weyl_arc(&self) -> Arc<WeylGroup> {
        Arc::clone(&self.wg)
    }

    /// The parabolic subset `J` (sorted node indices).
    pub fn j(&self) -> &[usize] {
        &self.j
    }

    /// Vertices: the minimal coset representatives `W^J` in canonical
    /// order.
    pub fn vertices(&self) -> &[WeylElt] {
        &self.vertices
    }

    /// All edges, grouped by source vertex.
    pub fn edges(&self) -> &[QbgEdge] {
        &self.edges
    }

    /// Vertex position of a minimal coset representative.
    pub fn vertex_pos(&self, w: WeylElt) -> usize {
        let p = self.vpos[w.index()];
        assert!(
            p != usize::MAX,
            "{} is not a minimal coset representative for J = {:?}",
            self.wg.word_string(w),
            self.j
        );
        p
    }

    /// Shortest-path length `l(u => v)`.
    pub fn length_between(&self, u: WeylElt, v: WeylElt) -> usize {
        let n = self.vertices.len();
        self.dist[self.vertex_pos(u) * n + self.vertex_pos(v)] as usize
    }

    /// Shortest-path weight `wt^J(u => v)`.
    pub fn weight_between(&self, u: WeylElt, v: WeylElt) -> Coroot {
        let n = self.vertices.len();
        let rank = self.wg.rank();
        let slot = self.vertex_pos(u) * n + self.vertex_pos(v);
        Coroot(self.wt[slot * rank..(slot + 1) * rank].to_vec())
    }

    /// Shortest-path length and weight together.
    pub fn shortest_data(&self, u: WeylElt, v: WeylElt) -> PathData {
        PathData {
            length: self.length_between(u, v),
            weight: self.weight_between(u, v),
        }
    }

    /// Tilted Bruhat order `u <=_w v`: the concatenation of shortest paths
    /// `w => u => v` is again shortest, i.e.
    /// `l(w => v) = l(w => u) + l(u => v)`. Defined on the full group
    /// (`J` empty).
    pub fn tilted_leq(&self, w: WeylElt, u: WeylElt, v: WeylElt) -> bool {
        assert!(self.j.is_empty(), "tilted order lives on the full group");
        self.length_between(w, v) == self.length_between(w, u) + self.length_between(u, v)
    }

    /// Semi-infinite order comparison on `(W^J)_af`: returns whether
    /// `x >= y`, i.e. `y` lies below `x`. With `x = u pi_J(t_xi)` and
    /// `y = v pi_J(t_zeta)`, this holds iff
    /// `[xi]^J - [zeta]^J - wt^J(v => u)` is a nonnegative coroot vector.
    ///
    /// Restricted to finite elements (zero translations) this is the Bruhat
    /// order on `W^J`. Panics if either argument is not in `(W^J)_af`.
    pub fn si_leq(&self, x: &AffineElt, y: &AffineElt) -> bool {
        assert!(
            affine::is_min_in_coset_af(&self.wg, &self.j, x),
            "x must lie in (W^J)_af"
        );
        assert!(
            affine::is_min_in_coset_af(&self.wg, &self.j, y),
            "y must lie in (W^J)_af"
        );
        let u = self.wg.min_rep(x.fin, &self.j);
        let v = self.wg.min_rep(y.fin, &self.j);
        let dx = affine::project_coroot_mod_j(&x.trans, &self.j);
        let dy = affine::project_coroot_mod_j(&y.trans, &self.j);
        let need = self.weight_between(v, u);
        dx.sub(&dy)
            .sub(&need)
            .coords()
            .iter()
            .all(|&c| c >= 0)
    }

    /// JSON rendering: vertices as reduced words, edges with root
    /// coordinates and kind.
    pub fn to_json(&self) -> serde_json::Value {
        let rs = self.wg.root_system();
        json!({
            "series": rs.series().to_string(),
            "rank": rs.rank(),
            "J": self.j.iter().map(|&i| i + 1).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(|&v| self.wg.word_string(v)).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "src": self.wg.word_string(self.vertices[e.src]),
                "dst": self.wg.word_string(self.vertices[e.dst]),
                "label": rs.positive_roots()[e.label].coords(),
                "kind": match e.kind { EdgeKind::Bruhat => "bruhat", EdgeKind::Quantum => "quantum" },
            })).collect::<Vec<_>>(),
        })
    }

    /// Graphviz DOT rendering; quantum edges are dashed.
    pub fn to_dot(&self) -> String {
        let rs = self.wg.root_system();
        let mut s = String::from("digraph qbg {\n  rankdir=BT;\n");
        for &v in &self.vertices {
            let _ = writeln!(s, "  \"{}\";", self.wg.word_string(v));
        }
        for e in &self.edges {
            let style = match e.kind {
                EdgeKind::Bruhat => "solid",
                EdgeKind::Quantum => "dashed",
            };
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\", style={}];",
                self.wg.word_string(self.vertices[e.src]),
                self.wg.word_string(self.vertices[e.dst]),
                rs.positive_roots()[e.label],
                style
            );
        }
        s.push_str("}\n");
        s
    }
}

/// A reflection order on the positive roots, realized by a reduced word of
/// the longest element that ends in a reduced word of `w`.
///
/// Writing the combined word as `(i_{-q}, ..., i_0, i_1, ..., i_p)` —
/// positions `1..=p` being the reduced word of `w` — the order is
/// `beta_{-q} < ... < beta_0 < beta_1 < ... < beta_p` with
/// `beta_k = s_{i_p} ... s_{i_{k+1}} alpha_{i_k}`.
#[derive(Clone, Debug)]
pub struct ReflectionOrder {
    /// Positive-root indices in increasing order position (`beta_{-q}`
    /// first).
    pub roots: Vec<usize>,
    /// Number of labels with order index `<= 0`; positions `>= split` carry
    /// the indices `1..=p` coming from the reduced word of `w`.
    pub split: usize,
    /// Order position of each positive root (inverse of `roots`).
    pos_of: Vec<usize>,
}

impl ReflectionOrder {
    /// Order position of a positive root (by positive-root index).
    pub fn position(&self, root: usize) -> usize {
        self.pos_of[root]
    }

    /// True when the root's order index is `>= 1`, i.e. it comes from the
    /// reduced word of `w` itself.
    pub fn is_positive_index(&self, root: usize) -> bool {
        self.pos_of[root] >= self.split
    }
}

/// Reflection order induced by the canonical (lexicographically minimal)
/// reduced word of `w`, extended on the left by the canonical reduced word
/// of `w_o w^{-1}`.
pub fn reflection_order(wg: &WeylGroup, w: WeylElt) -> ReflectionOrder {
    let ext = wg.word(wg.mul(wg.longest(), wg.inv(w))).to_vec();
    reflection_order_from_words(wg, &ext, wg.word(w))
}

/// Reflection order from an explicit extension `ext` and reduced word
/// `word` of `w`; `ext ++ word` must be a reduced word for the longest
/// element. Exposed so independence from the chosen words can be tested.
pub fn reflection_order_from_words(
    wg: &WeylGroup,
    ext: &[usize],
    word: &[usize],
) -> ReflectionOrder {
    let rs = wg.root_system();
    let combined: Vec<usize> = ext.iter().chain(word.iter()).copied().collect();
    assert_eq!(
        combined.len(),
        rs.num_positive_roots(),
        "combined word must be reduced for the longest element"
    );
    let mut check = wg.identity();
    for &i in &combined {
        check = wg.right_mul_simple(check, i);
    }
    assert_eq!(check, wg.longest(), "combined word must multiply to w_o");

    // beta at position t is (s_{i_p} ... s_{i_{t+1}}) alpha_{i_t}; build the
    // suffix products right to left.
    let mut roots = vec![0usize; combined.len()];
    let mut acc = wg.identity();
    for t in (0..combined.len()).rev() {
        let beta = wg.act_root(acc, rs.simple_root(combined[t]));
        let k = rs
            .positive_root_index(&beta)
            .expect("reflection-order labels are positive roots");
        roots[t] = k;
        acc = wg.mul(acc, wg.simple(combined[t]));
    }
    let mut pos_of = vec![usize::MAX; rs.num_positive_roots()];
    for (t, &k) in roots.iter().enumerate() {
        assert_eq!(pos_of[k], usize::MAX, "reflection order must be injective");
        pos_of[k] = t;
    }
    ReflectionOrder {
        roots,
        split: ext.len(),
        pos_of,
    }
}

/// The unique shortest directed path `w => u` in the full quantum Bruhat
/// graph whose label positions strictly increase in the given reflection
/// order. Returns edge indices into [`Qbg::edges`].
///
/// Panics when zero or several such paths exist — both would violate a
/// structural property of reflection orders on the graph.
pub fn label_increasing_path(
    qbg: &Qbg,
    order: &ReflectionOrder,
    w: WeylElt,
    u: WeylElt,
) -> Vec<usize> {
    assert!(qbg.j().is_empty(), "label-increasing paths live on the full group");
    let target = qbg.vertex_pos(u);
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut prefix: Vec<usize> = Vec::new();
    search_label_increasing(
        qbg,
        order,
        qbg.vertex_pos(w),
        target,
        i64::MIN,
        &mut prefix,
        &mut found,
    );
    assert_eq!(
        found.len(),
        1,
        "expected exactly one label-increasing shortest path {} => {}",
        qbg.weyl().word_string(w),
        qbg.weyl().word_string(u)
    );
    found.pop().unwrap()
}

fn search_label_increasing(
    qbg: &Qbg,
    order: &ReflectionOrder,
    y: usize,
    target: usize,
    last_pos: i64,
    prefix: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if found.len() >= 2 {
        return;
    }
    if y == target {
        found.push(prefix.clone());
        return;
    }
    let n = qbg.vertices.len();
    let remaining = qbg.dist[y * n + target];
    for &ei in &qbg.out[y] {
        let e = qbg.edges[ei];
        let p = order.position(e.label) as i64;
        if p <= last_pos {
            continue;
        }
        if qbg.dist[e.dst * n + target] + 1 != remaining {
            continue;
        }
        prefix.push(ei);
        search_label_increasing(qbg, order, e.dst, target, p, prefix, found);
        prefix.pop();
    }
}

/// Algorithm selector for [`eqb`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqbMethod {
    /// Filter by the first label index of the label-increasing path.
    LabelIncreasing,
    /// Descending recursion from `EQB(w_o) = W`.
    Recursive,
    /// Scan of the defining condition: no `z > w` with `z <=_w u`.
    BruteForce,
}

impl EqbMethod {
    /// Parse a method name as used on the command line.
    pub fn parse(s: &str) -> Option<EqbMethod> {
        match s {
            "label_increasing" | "li" => Some(EqbMethod::LabelIncreasing),
            "recursive" | "rec" => Some(EqbMethod::Recursive),
            "brute" | "brute_force" => Some(EqbMethod::BruteForce),
            _ => None,
        }
    }
}

/// The set `EQB(w)` of elements whose label-increasing shortest path from
/// `w` starts with a label of positive index — equivalently the final
/// directions reachable above `w` in the semi-infinite order. Requires the
/// full graph (`J` empty); result is sorted in canonical element order.
pub fn eqb(qbg: &Qbg, w: WeylElt, method: EqbMethod) -> Vec<WeylElt> {
    assert!(qbg.j().is_empty(), "EQB is defined on the full group");
    match method {
        EqbMethod::LabelIncreasing => {
            let order = reflection_order(qbg.weyl(), w);
            qbg.vertices()
                .iter()
                .copied()
                .filter(|&u| {
                    let path = label_increasing_path(qbg, &order, w, u);
                    match path.first() {
                        None => true,
                        Some(&ei) => order.is_positive_index(qbg.edges[ei].label),
                    }
                })
                .collect()
        }
        EqbMethod::Recursive => {
            let table = eqb_table(qbg);
            membership_to_elements(qbg, &table[w.index()])
        }
        EqbMethod::BruteForce => {
            let wg = qbg.weyl();
            wg.elements()
                .filter(|&u| {
                    !wg.elements().any(|z| {
                        z != w && wg.bruhat_leq(w, z) && qbg.tilted_leq(w, z, u)
                    })
                })
                .collect()
        }
    }
}

fn membership_to_elements(qbg: &Qbg, mask: &[bool]) -> Vec<WeylElt> {
    qbg.weyl()
        .elements()
        .filter(|w| mask[w.index()])
        .collect()
}

/// `EQB(w)` for every `w` at once, as membership masks indexed by element,
/// via the descending recursion: `EQB(w_o) = W`; for a left ascent `i` of
/// `v` and `w = s_i v`,
///
/// - if `v^{-1} alpha_i` is not simple, `EQB(v) = s_i EQB(w) \ EQB(w)`;
/// - if `v^{-1} alpha_i` is simple, `EQB(v) = { u in EQB(w) : v <=_w u }`.
pub fn eqb_table(qbg: &Qbg) -> Vec<Vec<bool>> {
    assert!(qbg.j().is_empty(), "EQB is defined on the full group");
    let wg = qbg.weyl();
    let order = wg.order();
    let mut table: Vec<Vec<bool>> = vec![Vec::new(); order];
    table[wg.longest().index()] = vec![true; order];
    // Canonical indices are sorted by length, so a reverse scan visits each
    // element after all longer ones.
    for idx in (0..order as u32 - 1).rev() {
        let v = WeylElt(idx);
        let i = (0..wg.rank())
            .find(|&i| wg.length(wg.left_mul_simple(i, v)) > wg.length(v))
            .expect("every non-longest element has a left ascent");
        let w = wg.left_mul_simple(i, v);
        let parent = std::mem::take(&mut table[w.index()]);
        let gamma = wg.act_root(wg.inv(v), wg.root_system().simple_root(i));
        let is_simple = gamma.coords().iter().sum::<i64>() == 1;
        let mut mine = vec![false; order];
        if is_simple {
            for u in wg.elements() {
                mine[u.index()] = parent[u.index()] && qbg.tilted_leq(w, v, u);
            }
        } else {
            for u in wg.elements() {
                if parent[u.index()] {
                    let su = wg.left_mul_simple(i, u);
                    if !parent[su.index()] {
                        mine[su.index()] = true;
                    }
                }
            }
        }
        table[v.index()] = mine;
        table[w.index()] = parent;
    }
    table
}

/// `floor(EQB(ceil(w)))`: project `EQB` of the maximal coset representative
/// of `w` to `W^J`. `w` must lie in `W^J`; `full` must be the `J = empty`
/// graph over the same group. Sorted, deduplicated.
pub fn floor_eqb(full: &Qbg, j: &[usize], w: WeylElt) -> Vec<WeylElt> {
    let wg = full.weyl();
    assert!(wg.is_min_rep(w, j), "w must be a minimal coset representative");
    let ceil = wg.max_rep(w, j);
    let mut out: Vec<WeylElt> = eqb(full, ceil, EqbMethod::Recursive)
        .into_iter()
        .map(|u| wg.min_rep(u, j))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Explicit parametrization of the cell `K^J_w`: the finite parts, the
/// translation offsets, and the free directions. The cell is
/// `{ u pi_J(t_(weight(u) + gamma)) : u in reps, gamma in the nonnegative
/// span of the free coordinates }`, and the parametrization is bijective.
#[derive(Clone, Debug)]
pub struct KParam {
    /// `floor(EQB(ceil(w)))`, sorted.
    pub reps: Vec<WeylElt>,
    /// `wt^J(w => u)` for each rep, aligned with `reps`.
    pub weights: Vec<Coroot>,
    /// Free coordinate set `I_{ceil(w)} \ J`.
    pub free: Vec<usize>,
}

/// Compute the parametrization of `K^J_w` (see [`KParam`]). `par` is the
/// graph over `W^J`, `full` the `J = empty` graph over the same group.
pub fn k_parametrize(par: &Qbg, full: &Qbg, w: WeylElt) -> KParam {
    let wg = par.weyl();
    assert!(full.j().is_empty(), "full graph must have empty J");
    let reps = floor_eqb(full, par.j(), w);
    let weights = reps
        .iter()
        .map(|&u| par.weight_between(w, u))
        .collect();
    let ceil = wg.max_rep(w, par.j());
    let descents = wg.right_descents(ceil);
    debug_assert!(par.j().iter().all(|i| descents.contains(i)));
    let free = descents
        .into_iter()
        .filter(|i| !par.j().contains(i))
        .collect();
    KParam {
        reps,
        weights,
        free,
    }
}

/// Membership of `x` in the cell `K^J_w`: the classical direction of `x`
/// must lie in `floor(EQB(ceil(w)))` and the translation class minus
/// `wt^J(w => cl(x))` must be nonnegative on the free coordinates and zero
/// elsewhere.
pub fn k_membership(par: &Qbg, full: &Qbg, w: WeylElt, x: &AffineElt) -> bool {
    let param = k_parametrize(par, full, w);
    k_membership_with(par, &param, x)
}

/// Membership test against a precomputed parametrization of `K^J_w`.
pub fn k_membership_with(par: &Qbg, param: &KParam, x: &AffineElt) -> bool {
    let wg = par.weyl();
    assert!(
        affine::is_min_in_coset_af(wg, par.j(), x),
        "x must lie in (W^J)_af"
    );
    let u = affine::cl_affine(wg, par.j(), x);
    let Ok(slot) = param.reps.binary_search(&u) else {
        return false;
    };
    let diff = affine::project_coroot_mod_j(&x.trans, par.j()).sub(&param.weights[slot]);
    diff.coords()
        .iter()
        .enumerate()
        .all(|(i, &c)| if param.free.contains(&i) { c >= 0 } else { c == 0 })
}

/// The Bruhat-maximal element of `{ v in W^J : v <= x }` for an affine
/// element `x` in `(W^J)_af` whose translation class is dominant
/// (coordinatewise nonnegative).
///
/// Panics if the set has no unique maximum — its existence is a structural
/// property, so failure signals a bug.
pub fn max_below(par: &Qbg, x: &AffineElt) -> WeylElt {
    let wg = par.weyl();
    let cls = affine::project_coroot_mod_j(&x.trans, par.j());
    assert!(
        cls.coords().iter().all(|&c| c >= 0),
        "translation class must be dominant"
    );
    let rank = wg.rank();
    let below: Vec<WeylElt> = par
        .vertices()
        .iter()
        .copied()
        .filter(|&v| par.si_leq(x, &AffineElt::finite(v, rank)))
        .collect();
    assert!(!below.is_empty(), "the identity always lies below x");
    let &max = below
        .iter()
        .max_by_key(|&&v| wg.length(v))
        .expect("nonempty");
    for &v in &below {
        assert!(
            wg.bruhat_leq(v, max),
            "elements below x must have a unique Bruhat maximum"
        );
    }
    max
}

/// One offending element found by [`check_partition`].
#[derive(Clone, Debug)]
pub struct PartitionViolation {
    pub x: AffineElt,
    /// Whether `x` lies above `w` in the semi-infinite order.
    pub above: bool,
    /// The cells `K^J_v` (v >= w) containing `x`.
    pub cells: Vec<WeylElt>,
}

/// Result of [`check_partition`].
#[derive(Clone, Debug)]
pub struct PartitionReport {
    /// Number of affine elements examined.
    pub checked: usize,
    /// Elements violating the partition property (must be empty).
    pub violations: Vec<PartitionViolation>,
}

/// Exhaustively verify, over all `x = u pi_J(t_xi)` with `u in W^J` and
/// `xi` running over `[0, bound]` on the coordinates outside `J`, that the
/// semi-infinite upper cone above `w` is partitioned by the cells `K^J_v`,
/// `v >= w`: every `x >= w` lies in exactly one cell, and no `x < w` lies
/// in any.
///
/// Work is parallelized over `x`; the report lists violations in
/// lexicographic `(u, xi)` order regardless of thread scheduling.
pub fn check_partition(par: &Qbg, full: &Qbg, w: WeylElt, bound: i64) -> PartitionReport {
    let wg = par.weyl();
    assert!(bound >= 0, "bound must be nonnegative");
    let free_coords: Vec<usize> = (0..wg.rank()).filter(|i| !par.j().contains(i)).collect();

    // Cells K^J_v for every v >= w in W^J, parametrized once.
    let cells: Vec<(WeylElt, KParam)> = par
        .vertices()
        .iter()
        .copied()
        .filter(|&v| wg.bruhat_leq(w, v))
        .map(|v| (v, k_parametrize(par, full, v)))
        .collect();

    // Enumerate candidates in deterministic (u, xi) lexicographic order.
    let mut candidates: Vec<AffineElt> = Vec::new();
    for &u in par.vertices() {
        let mut xi = vec![0i64; free_coords.len()];
        loop {
            let mut trans = Coroot::zero(wg.rank());
            for (slot, &i) in free_coords.iter().enumerate() {
                trans.0[i] = xi[slot];
            }
            let x = affine::mul(
                wg,
                &AffineElt::finite(u, wg.rank()),
                &affine::pi_j(wg, par.j(), &AffineElt::translation(trans)),
            );
            candidates.push(x);
            let mut slot = 0;
            loop {
                if slot == xi.len() {
                    break;
                }
                xi[slot] += 1;
                if xi[slot] <= bound {
                    break;
                }
                xi[slot] = 0;
                slot += 1;
            }
            if slot == xi.len() {
                break;
            }
        }
    }

    let w_aff = AffineElt::finite(w, wg.rank());
    let violations: Vec<PartitionViolation> = candidates
        .par_iter()
        .filter_map(|x| {
            let above = par.si_leq(x, &w_aff);
            let containing: Vec<WeylElt> = cells
                .iter()
                .filter(|(_, param)| k_membership_with(par, param, x))
                .map(|&(v, _)| v)
                .collect();
            let ok = if above {
                containing.len() == 1
            } else {
                containing.is_empty()
            };
            if ok {
                None
            } else {
                Some(PartitionViolation {
                    x: x.clone(),
                    above,
                    cells: containing,
                })
            }
        })
        .collect();

    PartitionReport {
        checked: candidates.len(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{Root, RootSystem, Series, Weight};

    fn group(series: Series, rank: usize) -> Arc<WeylGroup> {
        Arc::new(WeylGroup::new(RootSystem::build(series, rank).unwrap()))
    }

    fn all_j_subsets(rank: usize) -> Vec<Vec<usize>> {
        (0..(1u32 << rank))
            .map(|mask| (0..rank).filter(|i| mask & (1 << i) != 0).collect())
            .collect()
    }

    #[test]
    fn a1_full_graph_edges() {
        let wg = group(Series::A, 1);
        let qbg = Qbg::build(wg.clone(), &[]);
        assert_eq!(qbg.vertices().len(), 2);
        assert_eq!(qbg.edges().len(), 2);
        let e_to_s = qbg
            .edges()
            .iter()
            .find(|e| e.src == qbg.vertex_pos(wg.identity()))
            .unwrap();
        assert_eq!(e_to_s.kind, EdgeKind::Bruhat);
        let s_to_e = qbg
            .edges()
            .iter()
            .find(|e| e.src == qbg.vertex_pos(wg.simple(0)))
            .unwrap();
        assert_eq!(s_to_e.kind, EdgeKind::Quantum);
        assert_eq!(s_to_e.label, 0, "labeled by alpha_1");
    }

    #[test]
    fn a2_parabolic_vertices() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[1]);
        let words: Vec<String> = qbg
            .vertices()
            .iter()
            .map(|&v| wg.word_string(v))
            .collect();
        assert_eq!(words, vec!["e", "s1", "s2 s1"]);
        // Out-degree at least one everywhere, and strong connectivity held
        // during the build.
        for p in 0..qbg.vertices().len() {
            assert!(qbg.edges().iter().any(|e| e.src == p));
        }
    }

    #[test]
    fn shortest_data_examples() {
        let wg = group(Series::A, 1);
        let qbg = Qbg::build(wg.clone(), &[]);
        let e = wg.identity();
        let s = wg.simple(0);
        assert_eq!(
            qbg.shortest_data(e, e),
            PathData {
                length: 0,
                weight: Coroot(vec![0])
            }
        );
        assert_eq!(
            qbg.shortest_data(s, e),
            PathData {
                length: 1,
                weight: Coroot(vec![1])
            },
            "quantum edge contributes alpha_1^vee"
        );

        // The longest element reaches the identity through the single
        // quantum edge labeled by the highest root.
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        let data = qbg.shortest_data(wg.longest(), wg.identity());
        assert_eq!(data.length, 1);
        assert_eq!(
            data.weight,
            wg.root_system().theta_coroot().clone()
        );
    }

    /// Independent all-pairs oracle: Dijkstra-free brute BFS recomputation
    /// with explicit path enumeration of weights on one small case.
    #[test]
    fn weights_match_explicit_path_enumeration_in_a2() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        // Enumerate ALL paths up to length 4 and confirm: minimal length
        // matches, and every minimal path's weight matches.
        let n = qbg.vertices().len();
        for s in 0..n {
            for t in 0..n {
                let mut best: Option<(usize, Vec<i64>)> = None;
                // stack of (vertex, length, weight)
                let mut stack = vec![(s, 0usize, vec![0i64; 2])];
                while let Some((y, len, wt)) = stack.pop() {
                    if y == t && (best.is_none() || len <= best.as_ref().unwrap().0) {
                        if let Some((bl, bw)) = &best {
                            if len == *bl {
                                assert_eq!(&wt, bw, "same-length path weights agree");
                            }
                            if len < *bl {
                                best = Some((len, wt.clone()));
                            }
                        } else {
                            best = Some((len, wt.clone()));
                        }
                    }
                    if len == 4 {
                        continue;
                    }
                    for &ei in &qbg.out[y] {
                        let e = qbg.edges[ei];
                        let mut w2 = wt.clone();
                        if e.kind == EdgeKind::Quantum {
                            for (a, b) in w2
                                .iter_mut()
                                .zip(wg.root_system().positive_coroots()[e.label].coords())
                            {
                                *a += b;
                            }
                        }
                        stack.push((e.dst, len + 1, w2));
                    }
                }
                let (bl, bw) = best.expect("reachable within 4 steps in A2");
                let u = qbg.vertices()[s];
                let v = qbg.vertices()[t];
                assert_eq!(qbg.length_between(u, v), bl);
                assert_eq!(qbg.weight_between(u, v).0, bw);
            }
        }
    }

    #[test]
    fn tilted_order_basics() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        let e = wg.identity();
        let s1 = wg.simple(0);
        let s1s2 = wg.parse_word("s1 s2").unwrap();
        assert!(qbg.tilted_leq(e, s1, s1s2));
        for w in wg.elements() {
            for v in wg.elements() {
                assert!(qbg.tilted_leq(w, w, v), "u = w is minimal");
                assert!(qbg.tilted_leq(w, v, v), "reflexive");
            }
        }
    }

    #[test]
    fn tilted_order_is_a_partial_order() {
        let wg = group(Series::B, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        for w in wg.elements() {
            for u in wg.elements() {
                for v in wg.elements() {
                    if u != v && qbg.tilted_leq(w, u, v) && qbg.tilted_leq(w, v, u) {
                        panic!("antisymmetry violated");
                    }
                    for z in wg.elements() {
                        if qbg.tilted_leq(w, u, v)
                            && qbg.tilted_leq(w, v, z)
                            && !qbg.tilted_leq(w, u, z)
                        {
                            panic!("transitivity violated");
                        }
                    }
                }
            }
        }
    }

    /// Diamond identities for lengths and weights under left multiplication
    /// by a simple reflection.
    #[test]
    fn diamond_identities() {
        for (series, rank) in [(Series::A, 2), (Series::B, 2), (Series::G, 2)] {
            let wg = group(series, rank);
            let qbg = Qbg::build(wg.clone(), &[]);
            let rs = wg.root_system();
            for u in wg.elements() {
                for v in wg.elements() {
                    for i in 0..rank {
                        let ui = wg.act_root(wg.inv(u), rs.simple_root(i));
                        let vi = wg.act_root(wg.inv(v), rs.simple_root(i));
                        let u_pos = ui.coords().iter().all(|&c| c >= 0);
                        let v_pos = vi.coords().iter().all(|&c| c >= 0);
                        let su = wg.left_mul_simple(i, u);
                        let sv = wg.left_mul_simple(i, v);
                        if u_pos && !v_pos {
                            assert_eq!(
                                qbg.length_between(u, v),
                                qbg.length_between(su, v) + 1
                            );
                            assert_eq!(
                                qbg.length_between(u, v),
                                qbg.length_between(u, sv) + 1
                            );
                            assert_eq!(qbg.weight_between(u, v), qbg.weight_between(u, sv));
                            assert_eq!(qbg.weight_between(u, v), qbg.weight_between(su, v));
                        } else if u_pos == v_pos {
                            assert_eq!(qbg.length_between(u, v), qbg.length_between(su, sv));
                            assert_eq!(qbg.weight_between(u, v), qbg.weight_between(su, sv));
                        }
                    }
                }
            }
        }
    }

    /// The parabolic weight equals the projected full-group weight for any
    /// choice of coset representatives.
    #[test]
    fn parabolic_weight_from_representatives() {
        for (series, rank) in [(Series::A, 2), (Series::B, 2)] {
            let wg = group(series, rank);
            let full = Qbg::build(wg.clone(), &[]);
            for j in all_j_subsets(rank) {
                let par = Qbg::build(wg.clone(), &j);
                let wj = wg.subgroup_elements(&j);
                for &u in par.vertices() {
                    for &v in par.vertices() {
                        let expect = par.weight_between(u, v);
                        for &a in &wj {
                            for &b in &wj {
                                let u1 = wg.mul(u, a);
                                let v1 = wg.mul(v, b);
                                let projected = affine::project_coroot_mod_j(
                                    &full.weight_between(u1, v1),
                                    &j,
                                );
                                assert_eq!(projected, expect, "J={j:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn si_order_restricts_to_bruhat_on_finite_elements() {
        for (series, rank) in [(Series::A, 2), (Series::C, 2)] {
            let wg = group(series, rank);
            for j in all_j_subsets(rank) {
                let par = Qbg::build(wg.clone(), &j);
                for &u in par.vertices() {
                    for &v in par.vertices() {
                        let xu = AffineElt::finite(u, rank);
                        let xv = AffineElt::finite(v, rank);
                        assert_eq!(
                            par.si_leq(&xu, &xv),
                            wg.bruhat_leq(v, u),
                            "si order restricted to W^J is Bruhat (J={j:?})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn si_order_hand_example_in_a1() {
        let wg = group(Series::A, 1);
        let qbg = Qbg::build(wg.clone(), &[]);
        let x = AffineElt::translation(Coroot(vec![1]));
        let y = AffineElt::finite(wg.simple(0), 1);
        assert!(qbg.si_leq(&x, &y), "t_(alpha^vee) lies above s_1");
        assert!(!qbg.si_leq(&y, &x));
        assert!(qbg.si_leq(&x, &x), "reflexive");
    }

    #[test]
    fn si_order_axioms_on_a_box() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        let mut sample: Vec<AffineElt> = Vec::new();
        for w in wg.elements() {
            for a in -1..=1i64 {
                for b in -1..=1i64 {
                    sample.push(AffineElt {
                        fin: w,
                        trans: Coroot(vec![a, b]),
                    });
                }
            }
        }
        for x in &sample {
            assert!(qbg.si_leq(x, x));
            for y in &sample {
                if x != y && qbg.si_leq(x, y) && qbg.si_leq(y, x) {
                    panic!("antisymmetry violated");
                }
                for z in &sample {
                    if qbg.si_leq(x, y) && qbg.si_leq(y, z) {
                        assert!(qbg.si_leq(x, z), "transitivity");
                    }
                }
            }
        }
    }

    /// Semi-infinite diamond property: if x >= y and the simple direction
    /// points the right way, multiplying one side preserves comparability.
    #[test]
    fn si_diamond_spot_checks() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        let lambda = Weight(vec![1, 1]);
        let mut sample: Vec<AffineElt> = Vec::new();
        for w in wg.elements() {
            for a in 0..=1i64 {
                for b in 0..=1i64 {
                    sample.push(AffineElt {
                        fin: w,
                        trans: Coroot(vec![a, b]),
                    });
                }
            }
        }
        // x >= y below; lemma phrased for y <= x. For i in I_af, slopes
        // <z lambda, alpha_i^vee> with the 0-node slope -<z_fin lambda, theta^vee>.
        let slope = |z: &AffineElt, i: usize| -> i64 {
            let rs = wg.root_system();
            if i == 0 {
                -rs.pair(&wg.act_weight(z.fin, &lambda), rs.theta_coroot())
            } else {
                rs.pair(
                    &wg.act_weight(z.fin, &lambda),
                    rs.simple_coroot(i - 1),
                )
            }
        };
        for x in &sample {
            for y in &sample {
                if !qbg.si_leq(x, y) {
                    continue;
                }
                for i in 0..=2usize {
                    let sx = affine::mul(&wg, &affine::simple_affine(&wg, i), x);
                    let sy = affine::mul(&wg, &affine::simple_affine(&wg, i), y);
                    // (y, x) plays (x, y) of the lemma: y <= x.
                    if slope(y, i) > 0 && slope(x, i) <= 0 {
                        assert!(qbg.si_leq(x, &sy), "lower side may rise");
                    }
                    if slope(y, i) >= 0 && slope(x, i) < 0 {
                        assert!(qbg.si_leq(&sx, y), "upper side may drop");
                    }
                    if (slope(y, i) > 0 && slope(x, i) > 0)
                        || (slope(y, i) < 0 && slope(x, i) < 0)
                    {
                        assert!(qbg.si_leq(&sx, &sy), "both sides move together");
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_order_structure() {
        for (series, rank) in [(Series::A, 2), (Series::B, 2), (Series::A, 3)] {
            let wg = group(series, rank);
            for w in wg.elements() {
                let order = reflection_order(&wg, w);
                assert_eq!(order.roots.len(), wg.root_system().num_positive_roots());
                assert_eq!(
                    order.split,
                    wg.root_system().num_positive_roots() - wg.length(w)
                );
                // Last p labels: beta_p = alpha_{i_p} when w != e.
                if wg.length(w) > 0 {
                    let last_letter = *wg.word(w).last().unwrap();
                    assert_eq!(*order.roots.last().unwrap(), last_letter);
                }
            }
            // w = w_o: every label has positive index; w = e: none does.
            let order = reflection_order(&wg, wg.longest());
            assert_eq!(order.split, 0);
            let order = reflection_order(&wg, wg.identity());
            assert_eq!(order.split, wg.root_system().num_positive_roots());
        }
    }

    #[test]
    fn reflection_order_a2_hand_example() {
        let wg = group(Series::A, 2);
        let rs = wg.root_system();
        let order = reflection_order(&wg, wg.simple(0));
        // Two labels of nonpositive index, one of positive index; the
        // positive-index label is alpha_1.
        assert_eq!(order.split, 2);
        let a1 = rs.positive_root_index(&Root(vec![1, 0])).unwrap();
        assert!(order.is_positive_index(a1));
        assert_eq!(order.roots[2], a1);
        // Full order: alpha_2 < alpha_1 + alpha_2 < alpha_1.
        let a2 = rs.positive_root_index(&Root(vec![0, 1])).unwrap();
        let a12 = rs.positive_root_index(&Root(vec![1, 1])).unwrap();
        assert_eq!(order.roots, vec![a2, a12, a1]);
    }

    #[test]
    fn label_increasing_path_examples() {
        let wg = group(Series::A, 1);
        let qbg = Qbg::build(wg.clone(), &[]);
        let e = wg.identity();
        let s = wg.simple(0);
        // w = u: empty path.
        let order = reflection_order(&wg, s);
        assert!(label_increasing_path(&qbg, &order, s, s).is_empty());
        // s -> e: the single quantum edge, positive index.
        let p = label_increasing_path(&qbg, &order, s, e);
        assert_eq!(p.len(), 1);
        assert!(order.is_positive_index(qbg.edges()[p[0]].label));
        // e -> s with w = e: single Bruhat edge, nonpositive index.
        let order_e = reflection_order(&wg, e);
        let p = label_increasing_path(&qbg, &order_e, e, s);
        assert_eq!(p.len(), 1);
        assert!(!order_e.is_positive_index(qbg.edges()[p[0]].label));
    }

    #[test]
    fn eqb_three_methods_agree_on_rank_two() {
        for (series, rank) in [(Series::A, 2), (Series::B, 2), (Series::G, 2)] {
            let wg = group(series, rank);
            let qbg = Qbg::build(wg.clone(), &[]);
            for w in wg.elements() {
                let li = eqb(&qbg, w, EqbMethod::LabelIncreasing);
                let rec = eqb(&qbg, w, EqbMethod::Recursive);
                let brute = eqb(&qbg, w, EqbMethod::BruteForce);
                assert_eq!(li, rec, "{} in {series}{rank}", wg.word_string(w));
                assert_eq!(li, brute, "{} in {series}{rank}", wg.word_string(w));
            }
        }
    }

    #[test]
    fn eqb_boundary_values() {
        let wg = group(Series::B, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        let all: Vec<WeylElt> = wg.elements().collect();
        assert_eq!(eqb(&qbg, wg.longest(), EqbMethod::Recursive), all);
        assert_eq!(
            eqb(&qbg, wg.identity(), EqbMethod::Recursive),
            vec![wg.identity()]
        );
    }

    #[test]
    fn eqb_is_union_of_descent_parabolic_cosets() {
        let wg = group(Series::B, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        for w in wg.elements() {
            let set = eqb(&qbg, w, EqbMethod::Recursive);
            let iw = wg.right_descents(w);
            let wj = wg.subgroup_elements(&iw);
            for &u in &set {
                for &a in &wj {
                    assert!(
                        set.contains(&wg.mul(u, a)),
                        "EQB({}) is a union of cosets of W_(I_w)",
                        wg.word_string(w)
                    );
                }
            }
        }
    }

    #[test]
    fn eqb_members_ascend_at_descents() {
        // For s_i w < w, every u in EQB(s_i w) satisfies s_i u > u.
        let wg = group(Series::A, 3);
        let qbg = Qbg::build(wg.clone(), &[]);
        for w in wg.elements() {
            for i in 0..wg.rank() {
                let siw = wg.left_mul_simple(i, w);
                if wg.length(siw) >= wg.length(w) {
                    continue;
                }
                for u in eqb(&qbg, siw, EqbMethod::Recursive) {
                    assert!(
                        wg.length(wg.left_mul_simple(i, u)) > wg.length(u),
                        "u in EQB(s_i w) has s_i u > u"
                    );
                }
            }
        }
    }

    #[test]
    fn eqb_independent_of_reflection_order_choice() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        for w in wg.elements() {
            let expect = eqb(&qbg, w, EqbMethod::Recursive);
            for word in wg.reduced_words(w) {
                let rest = wg.mul(wg.longest(), wg.inv(w));
                for ext in wg.reduced_words(rest) {
                    let order = reflection_order_from_words(&wg, &ext, &word);
                    let got: Vec<WeylElt> = qbg
                        .vertices()
                        .iter()
                        .copied()
                        .filter(|&u| {
                            let path = label_increasing_path(&qbg, &order, w, u);
                            match path.first() {
                                None => true,
                                Some(&ei) => order.is_positive_index(qbg.edges()[ei].label),
                            }
                        })
                        .collect();
                    assert_eq!(got, expect, "w = {}", wg.word_string(w));
                }
            }
        }
    }

    /// Brute-force the cell K_w (J empty) over a translation box and
    /// compare its finite parts with EQB(w).
    #[test]
    fn cell_finite_parts_equal_eqb() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        let full = &qbg;
        for w in wg.elements() {
            let expect = eqb(&qbg, w, EqbMethod::Recursive);
            let mut fins: Vec<WeylElt> = Vec::new();
            for u in wg.elements() {
                'xi: for a in 0..=3i64 {
                    for b in 0..=3i64 {
                        let x = AffineElt {
                            fin: u,
                            trans: Coroot(vec![a, b]),
                        };
                        if k_membership(&qbg, full, w, &x) {
                            fins.push(u);
                            break 'xi;
                        }
                    }
                }
            }
            assert_eq!(fins, expect, "fin(K_w) = EQB(w) at w = {}", wg.word_string(w));
        }
    }

    #[test]
    fn k_membership_hand_examples() {
        let wg = group(Series::A, 1);
        let qbg = Qbg::build(wg.clone(), &[]);
        let s1 = wg.simple(0);
        // x = w with zero translation is always a member of its own cell.
        for w in wg.elements() {
            assert!(k_membership(&qbg, &qbg, w, &AffineElt::finite(w, 1)));
        }
        // x = e t_(alpha^vee) and x = s_1 t_(alpha^vee) both lie in K_(s_1).
        let x = AffineElt::translation(Coroot(vec![1]));
        assert!(k_membership(&qbg, &qbg, s1, &x));
        let x = AffineElt {
            fin: s1,
            trans: Coroot(vec![1]),
        };
        assert!(k_membership(&qbg, &qbg, s1, &x));
        // e itself is not above s_1.
        assert!(!k_membership(&qbg, &qbg, s1, &AffineElt::identity(1)));
    }

    #[test]
    fn k_parametrize_is_bijective_on_boxes() {
        let wg = group(Series::A, 2);
        let full = Qbg::build(wg.clone(), &[]);
        for j in [vec![], vec![0], vec![1]] {
            let par = Qbg::build(wg.clone(), &j);
            for &w in par.vertices() {
                let param = k_parametrize(&par, &full, w);
                // Enumerate cell elements from the parametrization with
                // gamma coordinates in [0, 2]; they must be distinct and
                // each must pass membership.
                let mut seen = std::collections::HashSet::new();
                for (slot, &u) in param.reps.iter().enumerate() {
                    let mut gammas = vec![vec![]];
                    for _ in &param.free {
                        let mut next = Vec::new();
                        for g in gammas {
                            for c in 0..=2i64 {
                                let mut g2: Vec<i64> = g.clone();
                                g2.push(c);
                                next.push(g2);
                            }
                        }
                        gammas = next;
                    }
                    for g in gammas {
                        let mut xi = param.weights[slot].clone();
                        for (pos, &i) in param.free.iter().enumerate() {
                            xi.0[i] += g[pos];
                        }
                        let x = affine::mul(
                            &wg,
                            &AffineElt::finite(u, 2),
                            &affine::pi_j(&wg, &j, &AffineElt::translation(xi)),
                        );
                        assert!(
                            k_membership_with(&par, &param, &x),
                            "parametrized point must be a member"
                        );
                        assert!(seen.insert(x.to_text(&wg)), "parametrization injective");
                    }
                }
            }
        }
    }

    #[test]
    fn max_below_examples() {
        let wg = group(Series::A, 1);
        let qbg = Qbg::build(wg.clone(), &[]);
        // x = w finite: w itself is the maximum below.
        for &w in qbg.vertices() {
            assert_eq!(max_below(&qbg, &AffineElt::finite(w, 1)), w);
        }
        // x = t_(alpha^vee): both e and s_1 lie below; max is s_1.
        let x = AffineElt::translation(Coroot(vec![1]));
        assert_eq!(max_below(&qbg, &x), wg.simple(0));

        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[]);
        let x = AffineElt::translation(Coroot(wg.root_system().theta_coroot().0.clone()));
        assert_eq!(max_below(&qbg, &x), wg.longest());
    }

    #[test]
    fn partition_check_small_cases() {
        let wg = group(Series::A, 1);
        let qbg = Qbg::build(wg.clone(), &[]);
        let report = check_partition(&qbg, &qbg, wg.identity(), 3);
        assert!(report.violations.is_empty());
        assert_eq!(report.checked, 2 * 4);

        let wg = group(Series::A, 2);
        let full = Qbg::build(wg.clone(), &[]);
        let par = Qbg::build(wg.clone(), &[1]);
        let report = check_partition(&par, &full, wg.identity(), 2);
        assert!(report.violations.is_empty());

        // Degenerate box: only zero translation classes.
        let report = check_partition(&full, &full, wg.simple(0), 0);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn exports_are_well_formed() {
        let wg = group(Series::A, 2);
        let qbg = Qbg::build(wg.clone(), &[1]);
        let v = qbg.to_json();
        assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
        assert_eq!(v["J"], json!([2]));
        let dot = qbg.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("style=dashed"), "quantum edges are dashed");
    }
}
