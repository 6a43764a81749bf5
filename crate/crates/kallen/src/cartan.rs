//! Finite root systems and Weyl groups, fully tabulated.
//!
//! - [`RootSystem`]: Cartan matrix, positive roots with their coroots, the
//!   highest root, and exact pairings. Weights live in fundamental-weight
//!   coordinates, roots in simple-root coordinates, coroots in simple-coroot
//!   coordinates; all coordinates are `i64`.
//! - [`WeylGroup`]: every element of the (finite) Weyl group indexed by a
//!   [`WeylElt`], with precomputed action matrices on weights, roots and
//!   coroots, lengths, lexicographically minimal reduced words, a Cayley
//!   table, inverses, reflections `s_beta`, Bruhat order, descent sets and
//!   parabolic coset representatives.
//!
//! Supported types: `A_1..A_4`, `B_2..B_4`, `C_2..C_4`, `D_4`, `G_2` —
//! enough for every desk-scale computation in this crate while keeping all
//! group tables small. Construction is type-generic from the Cartan matrix,
//! so the rank caps are a guard rail, not a structural limit.
//!
//! Conventions (used consistently crate-wide):
//! - `cartan[i][j] = <alpha_j, alpha_i^vee>`, so column `j` of the Cartan
//!   matrix is `alpha_j` written in fundamental-weight coordinates.
//! - Simple reflections act on weights by
//!   `s_i mu = mu - <mu, alpha_i^vee> alpha_i`.
//! - Element order: by length, then lexicographically by minimal reduced
//!   word. `WeylElt(0)` is always the identity.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Errors from constructing root systems or parsing user-supplied data.
#[derive(Debug, Error)]
pub enum CartanError {
    /// The requested series/rank combination is not supported.
    #[error("unsupported root system {series}{rank}: {reason}")]
    Unsupported {
        series: String,
        rank: usize,
        reason: String,
    },
    /// A weight that must be dominant is not.
    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),
    /// A coordinate vector has the wrong length for the ambient rank.
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A textual Weyl-group word could not be parsed or is out of range.
    #[error("invalid Weyl word {word:?}: {reason}")]
    BadWord { word: String, reason: String },
    /// A simple-root index is out of range.
    #[error("simple-root index {index} out of range for rank {rank}")]
    BadIndex { index: usize, rank: usize },
}

/// The series (first letter of the Cartan type). E and F ranks are outside
/// the desk-scale envelope of this crate and are not constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    G,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::G => 'G',
        };
        write!(f, "{c}")
    }
}

impl Series {
    /// Parse a one-letter series name (case-insensitive).
    pub fn parse(s: &str) -> Result<Series, CartanError> {
        match s.trim() {
            "A" | "a" => Ok(Series::A),
            "B" | "b" => Ok(Series::B),
            "C" | "c" => Ok(Series::C),
            "D" | "d" => Ok(Series::D),
            "G" | "g" => Ok(Series::G),
            other => Err(CartanError::Unsupported {
                series: other.to_string(),
                rank: 0,
                reason: "series must be one of A, B, C, D, G".to_string(),
            }),
        }
    }
}

/// A weight in fundamental-weight coordinates: `mu = sum_i mu_i w_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

/// A root (or any element of the root lattice) in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root(pub Vec<i64>);

/// A coroot (or any element of the coroot lattice) in simple-coroot
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coroot(pub Vec<i64>);

macro_rules! coord_newtype_impls {
    ($t:ident) => {
        impl $t {
            /// Coordinate vector.
            pub fn coords(&self) -> &[i64] {
                &self.0
            }

            /// The zero vector of the given rank.
            pub fn zero(rank: usize) -> $t {
                $t(vec![0; rank])
            }

            /// Coordinatewise sum.
            pub fn add(&self, other: &$t) -> $t {
                assert_eq!(self.0.len(), other.0.len(), "rank mismatch");
                $t(self
                    .0
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| a.checked_add(*b).expect("coordinate overflow"))
                    .collect())
            }

            /// Coordinatewise difference.
            pub fn sub(&self, other: &$t) -> $t {
                assert_eq!(self.0.len(), other.0.len(), "rank mismatch");
                $t(self
                    .0
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| a.checked_sub(*b).expect("coordinate overflow"))
                    .collect())
            }

            /// Scalar multiple.
            pub fn scale(&self, c: i64) -> $t {
                $t(self
                    .0
                    .iter()
                    .map(|a| a.checked_mul(c).expect("coordinate overflow"))
                    .collect())
            }

            /// Negation.
            pub fn neg(&self) -> $t {
                self.scale(-1)
            }

            /// True when every coordinate is zero.
            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&a| a == 0)
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "(")?;
                for (k, a) in self.0.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    };
}

coord_newtype_impls!(Weight);
coord_newtype_impls!(Root);
coord_newtype_impls!(Coroot);

impl Weight {
    /// True when `<mu, alpha_i^vee> >= 0` for every `i`, i.e. all
    /// fundamental coordinates are nonnegative.
    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }
}

/// A finite simple root system with all positive roots tabulated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystem {
    series: Series,
    rank: usize,
    /// `cartan[i][j] = <alpha_j, alpha_i^vee>` (row-major, rank x rank).
    cartan: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates; the first `rank` entries
    /// are the simple roots in order.
    positive_roots: Vec<Root>,
    /// `positive_coroots[k]` is the coroot of `positive_roots[k]`.
    positive_coroots: Vec<Coroot>,
    /// Index of each positive root's coordinate vector in `positive_roots`.
    root_index: HashMap<Vec<i64>, usize>,
    /// Index of the highest root `theta` in `positive_roots`.
    theta_index: usize,
}

/// Cartan matrix for the supported series, `cartan[i][j] = <alpha_j, alpha_i^vee>`.
///
/// Numbering: `A_n`, `B_n`, `C_n` are chains `0 - 1 - ... - n-1`, with the
/// short (`B`) resp. long (`C`) root last; `D_n` is a chain `0..n-3` with
/// both `n-2` and `n-1` attached to `n-3`; in `G_2`, `alpha_0` is short.
fn cartan_matrix(series: Series, rank: usize) -> Result<Vec<Vec<i64>>, CartanError> {
    let unsupported = |reason: &str| CartanError::Unsupported {
        series: series.to_string(),
        rank,
        reason: reason.to_string(),
    };
    let chain = |n: usize| -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            m[i][i] = 2;
            if i + 1 < n {
                m[i][i + 1] = -1;
                m[i + 1][i] = -1;
            }
        }
        m
    };
    match series {
        Series::A => {
            if !(1..=4).contains(&rank) {
                return Err(unsupported("rank must be between 1 and 4"));
            }
            Ok(chain(rank))
        }
        Series::B => {
            // alpha_{n-1} short: <alpha_{n-1}, alpha_{n-2}^vee> = -1 and
            // <alpha_{n-2}, alpha_{n-1}^vee> = -2.
            if !(2..=4).contains(&rank) {
                return Err(unsupported("rank must be between 2 and 4"));
            }
            let mut m = chain(rank);
            m[rank - 2][rank - 1] = -1;
            m[rank - 1][rank - 2] = -2;
            Ok(m)
        }
        Series::C => {
            // alpha_{n-1} long: the transpose of the B_n matrix.
            if !(2..=4).contains(&rank) {
                return Err(unsupported("rank must be between 2 and 4"));
            }
            let mut m = chain(rank);
            m[rank - 2][rank - 1] = -2;
            m[rank - 1][rank - 2] = -1;
            Ok(m)
        }
        Series::D => {
            if rank != 4 {
                return Err(unsupported("rank must be 4 (D_2, D_3 are not simple type D)"));
            }
            let mut m = chain(rank - 1);
            for row in &mut m {
                row.push(0);
            }
            m.push(vec![0; rank]);
            m[rank - 1][rank - 1] = 2;
            // Node n-1 attaches to the fork node n-3.
            m[rank - 3][rank - 1] = -1;
            m[rank - 1][rank - 3] = -1;
            // Nodes n-2 and n-1 are not adjacent.
            m[rank - 2][rank - 1] = 0;
            m[rank - 1][rank - 2] = 0;
            Ok(m)
        }
        Series::G => {
            if rank != 2 {
                return Err(unsupported("rank must be 2"));
            }
            // alpha_0 short, alpha_1 long: <alpha_1, alpha_0^vee> = -3.
            Ok(vec![vec![2, -3], vec![-1, 2]])
        }
    }
}

impl RootSystem {
    /// Build the root system of the given series and rank, enumerating all
    /// positive roots (with coroots) by reflection closure from the simple
    /// roots and locating the highest root.
    pub fn build(series: Series, rank: usize) -> Result<RootSystem, CartanError> {
        let cartan = cartan_matrix(series, rank)?;

        // Reflection closure: repeatedly apply the simple reflections
        //   s_i(beta) = beta - <beta, alpha_i^vee> alpha_i   (root coords),
        //   s_i(beta^vee) = beta^vee - <alpha_i, beta^vee> alpha_i^vee
        // to the simple roots, keeping the positive results. The coroot of
        // s_i(beta) is s_i(beta^vee), so the two closures run in lockstep.
        let mut positive_roots: Vec<Root> = Vec::new();
        let mut positive_coroots: Vec<Coroot> = Vec::new();
        let mut root_index: HashMap<Vec<i64>, usize> = HashMap::new();
        for i in 0..rank {
            let mut r = vec![0i64; rank];
            let mut c = vec![0i64; rank];
            r[i] = 1;
            c[i] = 1;
            root_index.insert(r.clone(), i);
            positive_roots.push(Root(r));
            positive_coroots.push(Coroot(c));
        }
        let mut frontier: Vec<usize> = (0..rank).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &k in &frontier {
                for i in 0..rank {
                    let beta = &positive_roots[k];
                    // <beta, alpha_i^vee> = sum_j beta_j <alpha_j, alpha_i^vee>.
                    let pairing: i64 = (0..rank).map(|j| beta.0[j] * cartan[i][j]).sum();
                    let mut r = beta.0.clone();
                    r[i] -= pairing;
                    if r.iter().any(|&a| a < 0) || root_index.contains_key(&r) {
                        continue;
                    }
                    // <alpha_i, beta^vee> = sum_j beta^vee_j <alpha_i, alpha_j^vee>.
                    let co = &positive_coroots[k];
                    let copairing: i64 = (0..rank).map(|j| co.0[j] * cartan[j][i]).sum();
                    let mut c = co.0.clone();
                    c[i] -= copairing;
                    let idx = positive_roots.len();
                    root_index.insert(r.clone(), idx);
                    positive_roots.push(Root(r));
                    positive_coroots.push(Coroot(c));
                    next.push(idx);
                }
            }
            frontier = next;
        }

        let expected = match series {
            Series::A => rank * (rank + 1) / 2,
            Series::B | Series::C => rank * rank,
            Series::D => rank * (rank - 1),
            Series::G => 6,
        };
        assert_eq!(
            positive_roots.len(),
            expected,
            "positive-root count for {series}{rank}"
        );

        // The highest root is the unique positive root of maximal height;
        // it must dominate every positive root coordinatewise.
        let theta_index = (0..positive_roots.len())
            .max_by_key(|&k| positive_roots[k].0.iter().sum::<i64>())
            .expect("nonempty root set");
        let theta = &positive_roots[theta_index];
        for beta in &positive_roots {
            assert!(
                beta.0.iter().zip(&theta.0).all(|(b, t)| b <= t),
                "highest root must dominate all positive roots coordinatewise"
            );
        }

        Ok(RootSystem {
            series,
            rank,
            cartan,
            positive_roots,
            positive_coroots,
            root_index,
            theta_index,
        })
    }

    /// Series of this root system.
    pub fn series(&self) -> Series {
        self.series
    }

    /// Rank (number of simple roots).
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Cartan entry `<alpha_j, alpha_i^vee>`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    /// All positive roots; entries `0..rank` are the simple roots.
    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    /// Coroots of the positive roots, in matching order.
    pub fn positive_coroots(&self) -> &[Coroot] {
        &self.positive_coroots
    }

    /// Number of positive roots.
    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    /// The simple root `alpha_i`.
    pub fn simple_root(&self, i: usize) -> &Root {
        &self.positive_roots[i]
    }

    /// The simple coroot `alpha_i^vee`.
    pub fn simple_coroot(&self, i: usize) -> &Coroot {
        &self.positive_coroots[i]
    }

    /// The fundamental weight `w_i`.
    pub fn fundamental_weight(&self, i: usize) -> Weight {
        let mut v = vec![0i64; self.rank];
        v[i] = 1;
        Weight(v)
    }

    /// Half the sum of positive coroots pairs to 1 with every simple root,
    /// so `rho = sum_i w_i` in fundamental coordinates.
    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank])
    }

    /// Index of a positive root in [`Self::positive_roots`], if it is one.
    pub fn positive_root_index(&self, beta: &Root) -> Option<usize> {
        self.root_index.get(&beta.0).copied()
    }

    /// True when `beta` is a root (positive or negative).
    pub fn is_root(&self, beta: &Root) -> bool {
        self.root_index.contains_key(&beta.0) || self.root_index.contains_key(&beta.neg().0)
    }

    /// The highest root `theta`.
    pub fn theta(&self) -> &Root {
        &self.positive_roots[self.theta_index]
    }

    /// The coroot `theta^vee` of the highest root.
    pub fn theta_coroot(&self) -> &Coroot {
        &self.positive_coroots[self.theta_index]
    }

    /// The Coxeter number `h = height(theta) + 1`.
    pub fn coxeter_number(&self) -> i64 {
        self.theta().0.iter().sum::<i64>() + 1
    }

    /// Coroot of an arbitrary root (positive or negative).
    ///
    /// Panics if `beta` is not a root.
    pub fn coroot_of(&self, beta: &Root) -> Coroot {
        if let Some(k) = self.root_index.get(&beta.0) {
            return self.positive_coroots[*k].clone();
        }
        if let Some(k) = self.root_index.get(&beta.neg().0) {
            return self.positive_coroots[*k].neg();
        }
        panic!("{beta} is not a root of {}{}", self.series, self.rank);
    }

    /// Pairing `<mu, xi>` of a weight (fundamental coordinates) with an
    /// element of the coroot lattice (simple-coroot coordinates); the bases
    /// are dual, so this is the dot product.
    pub fn pair(&self, mu: &Weight, xi: &Coroot) -> i64 {
        assert_eq!(mu.0.len(), self.rank, "weight rank mismatch");
        assert_eq!(xi.0.len(), self.rank, "coroot rank mismatch");
        mu.0.iter()
            .zip(&xi.0)
            .map(|(a, b)| a.checked_mul(*b).expect("pairing overflow"))
            .fold(0i64, |acc, t| acc.checked_add(t).expect("pairing overflow"))
    }

    /// Pairing `<beta, xi>` of a root-lattice element with a coroot-lattice
    /// element: convert `beta` to fundamental coordinates first.
    pub fn pair_root(&self, beta: &Root, xi: &Coroot) -> i64 {
        self.pair(&self.root_to_weight(beta), xi)
    }

    /// Convert root coordinates to fundamental-weight coordinates:
    /// `alpha_j = sum_i <alpha_j, alpha_i^vee> w_i`, i.e. multiply by the
    /// Cartan matrix.
    pub fn root_to_weight(&self, beta: &Root) -> Weight {
        assert_eq!(beta.0.len(), self.rank, "root rank mismatch");
        Weight(
            (0..self.rank)
                .map(|i| (0..self.rank).map(|j| self.cartan[i][j] * beta.0[j]).sum())
                .collect(),
        )
    }

    /// Indices (into [`Self::positive_roots`]) of the positive roots whose
    /// support lies inside `j`: the positive roots of the parabolic
    /// subsystem generated by `{ alpha_i : i in j }`.
    pub fn positive_root_indices_in(&self, j: &[usize]) -> Vec<usize> {
        (0..self.positive_roots.len())
            .filter(|&k| {
                self.positive_roots[k]
                    .0
                    .iter()
                    .enumerate()
                    .all(|(i, &c)| c == 0 || j.contains(&i))
            })
            .collect()
    }

    /// The set `J(lambda) = { i : <lambda, alpha_i^vee> = 0 }` of simple
    /// directions fixing a dominant weight, sorted ascending.
    pub fn j_of(&self, lambda: &Weight) -> Result<Vec<usize>, CartanError> {
        if lambda.0.len() != self.rank {
            return Err(CartanError::DimensionMismatch {
                expected: self.rank,
                got: lambda.0.len(),
            });
        }
        if !lambda.is_dominant() {
            return Err(CartanError::NotDominant(lambda.0.clone()));
        }
        Ok((0..self.rank).filter(|&i| lambda.0[i] == 0).collect())
    }
}

/// An element of a [`WeylGroup`], by index into the group's tables.
///
/// Indices are ordered by `(length, lexicographically minimal reduced word)`,
/// so `WeylElt(0)` is the identity and comparing indices refines the length
/// order. An element index is only meaningful relative to the group that
/// produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElt(pub u32);

impl WeylElt {
    /// Table index of this element.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One Weyl-group element's precomputed data.
#[derive(Clone, Debug)]
struct EltData {
    /// Lexicographically minimal reduced word (simple-reflection indices).
    word: Vec<usize>,
    /// Action on weights in fundamental coordinates, row-major.
    wt_mat: Vec<i64>,
    /// Action on the root lattice in simple-root coordinates, row-major.
    root_mat: Vec<i64>,
    /// Action on the coroot lattice in simple-coroot coordinates, row-major.
    coroot_mat: Vec<i64>,
    /// Right descent set `{ i : l(w s_i) < l(w) }` as a bitmask.
    right_descents: u32,
    inverse: u32,
}

/// A finite Weyl group with every element tabulated; owns its root system.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    rs: RootSystem,
    elts: Vec<EltData>,
    /// `cayley[w.index() * order + i] = w s_i` for simple `i`.
    right_cayley: Vec<u32>,
    /// Reflection `s_beta` for each positive root index.
    reflections: Vec<WeylElt>,
}

fn mat_identity(n: usize) -> Vec<i64> {
    let mut m = vec![0i64; n * n];
    for a in 0..n {
        m[a * n + a] = 1;
    }
    m
}

fn mat_mul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut m = vec![0i64; n * n];
    for r in 0..n {
        for c in 0..n {
            let mut acc = 0i64;
            for k in 0..n {
                acc += a[r * n + k] * b[k * n + c];
            }
            m[r * n + c] = acc;
        }
    }
    m
}

fn mat_apply(n: usize, m: &[i64], v: &[i64]) -> Vec<i64> {
    (0..n)
        .map(|r| (0..n).map(|c| m[r * n + c] * v[c]).sum())
        .collect()
}

impl WeylGroup {
    /// Tabulate the full Weyl group of `rs` by breadth-first closure over
    /// right multiplication by simple reflections.
    ///
    /// Discovery order within each length layer is: parents in index order,
    /// generators ascending. Since parents of equal length are already in
    /// lex order of their minimal words, candidate words appear in lex
    /// order, so the first discovery of an element carries its lex-minimal
    /// reduced word and indices end up sorted by `(length, word)`.
    pub fn new(rs: RootSystem) -> WeylGroup {
        let n = rs.rank();

        // Generator matrices. On weights: s_i(w_b) = w_b - delta_{bi} alpha_i,
        // so column b of S_i is e_b - delta_{bi} * (alpha_i in fundamental
        // coords) => S_i[a][b] = delta_ab - delta_{bi} cartan[a][i].
        // On roots: s_i(alpha_b) = alpha_b - cartan[i][b] alpha_i =>
        // R_i[a][b] = delta_ab - delta_{ai} cartan[i][b].
        // On coroots: s_i(alpha_b^vee) = alpha_b^vee - cartan[b][i] alpha_i^vee
        // => C_i[a][b] = delta_ab - delta_{ai} cartan[b][i].
        let mut gen_wt = Vec::with_capacity(n);
        let mut gen_root = Vec::with_capacity(n);
        let mut gen_coroot = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = mat_identity(n);
            let mut r = mat_identity(n);
            let mut c = mat_identity(n);
            for a in 0..n {
                s[a * n + i] -= rs.cartan(a, i);
                r[i * n + a] -= rs.cartan(i, a);
                c[i * n + a] -= rs.cartan(a, i);
            }
            gen_wt.push(s);
            gen_root.push(r);
            gen_coroot.push(c);
        }

        let mut elts: Vec<EltData> = vec![EltData {
            word: Vec::new(),
            wt_mat: mat_identity(n),
            root_mat: mat_identity(n),
            coroot_mat: mat_identity(n),
            right_descents: 0,
            inverse: 0,
        }];
        let mut by_wt_mat: HashMap<Vec<i64>, u32> = HashMap::new();
        by_wt_mat.insert(elts[0].wt_mat.clone(), 0);

        // right_cayley is filled densely once the order is known; during
        // discovery collect (element, generator) -> product index triples.
        let mut products: Vec<(u32, usize, u32)> = Vec::new();
        let mut layer: Vec<u32> = vec![0];
        while !layer.is_empty() {
            let mut next: Vec<u32> = Vec::new();
            for &p in &layer {
                for i in 0..n {
                    // w s_i has matrix M_w * S_i (composition acts left-to-right
                    // as matrix product on column vectors: (w s_i)(v) = w(s_i v)).
                    let m = mat_mul(n, &elts[p as usize].wt_mat, &gen_wt[i]);
                    let idx = match by_wt_mat.get(&m) {
                        Some(&q) => q,
                        None => {
                            let q = elts.len() as u32;
                            let mut word = elts[p as usize].word.clone();
                            word.push(i);
                            elts.push(EltData {
                                word,
                                wt_mat: m.clone(),
                                root_mat: mat_mul(n, &elts[p as usize].root_mat, &gen_root[i]),
                                coroot_mat: mat_mul(
                                    n,
                                    &elts[p as usize].coroot_mat,
                                    &gen_coroot[i],
                                ),
                                right_descents: 0,
                                inverse: 0,
                            });
                            by_wt_mat.insert(m, q);
                            next.push(q);
                            q
                        }
                    };
                    products.push((p, i, idx));
                }
            }
            layer = next;
        }

        let order = elts.len();
        let mut right_cayley = vec![u32::MAX; order * n];
        for (p, i, q) in products {
            right_cayley[p as usize * n + i] = q;
            // If w s_i = q with l(q) = l(w) + 1 then q s_i = w.
            right_cayley[q as usize * n + i] = p;
        }
        assert!(
            right_cayley.iter().all(|&x| x != u32::MAX),
            "Cayley table complete"
        );

        for w in 0..order {
            let mut mask = 0u32;
            for i in 0..n {
                let ws = right_cayley[w * n + i] as usize;
                if elts[ws].word.len() < elts[w].word.len() {
                    mask |= 1 << i;
                }
            }
            elts[w].right_descents = mask;
        }

        // Inverses: w^{-1} has the reversed word; locate it via its matrix.
        for w in 0..order {
            let mut m = mat_identity(n);
            for &i in elts[w].word.iter().rev() {
                m = mat_mul(n, &m, &gen_wt[i]);
            }
            let inv = *by_wt_mat.get(&m).expect("inverse present");
            elts[w].inverse = inv;
        }

        // Reflections: s_beta acts on weights by
        // mu |-> mu - <mu, beta^vee> beta, i.e. matrix Id - f * c^T where f
        // is beta in fundamental coordinates and c is beta^vee in
        // simple-coroot coordinates.
        let mut reflections = Vec::with_capacity(rs.num_positive_roots());
        for k in 0..rs.num_positive_roots() {
            let f = rs.root_to_weight(&rs.positive_roots()[k]);
            let c = &rs.positive_coroots()[k];
            let mut m = mat_identity(n);
            for a in 0..n {
                for b in 0..n {
                    m[a * n + b] -= f.0[a] * c.0[b];
                }
            }
            let idx = *by_wt_mat.get(&m).expect("reflection is a group element");
            reflections.push(WeylElt(idx));
        }

        let wg = WeylGroup {
            rs,
            elts,
            right_cayley,
            reflections,
        };
        debug_assert!(wg.check_tables());
        wg
    }

    #[cfg(debug_assertions)]
    fn check_tables(&self) -> bool {
        // Words are reduced (length = inversion count) and indices sorted.
        for w in self.elements() {
            assert_eq!(
                self.length(w),
                self.num_inversions(w),
                "word length equals inversion count"
            );
        }
        for pair in self.elts.windows(2) {
            let a = (&pair[0].word.len(), &pair[0].word);
            let b = (&pair[1].word.len(), &pair[1].word);
            assert!(a < b, "elements sorted by (length, word)");
        }
        true
    }

    #[cfg(not(debug_assertions))]
    fn check_tables(&self) -> bool {
        true
    }

    /// The root system this group acts on.
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    /// Rank of the underlying root system.
    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    /// Group order `|W|`.
    pub fn order(&self) -> usize {
        self.elts.len()
    }

    /// The identity element.
    pub fn identity(&self) -> WeylElt {
        WeylElt(0)
    }

    /// The simple reflection `s_i`.
    pub fn simple(&self, i: usize) -> WeylElt {
        assert!(i < self.rank(), "simple-reflection index in range");
        self.reflections[i]
    }

    /// All elements in canonical index order.
    pub fn elements(&self) -> impl Iterator<Item = WeylElt> {
        (0..self.elts.len() as u32).map(WeylElt)
    }

    /// Coxeter length `l(w)`.
    pub fn length(&self, w: WeylElt) -> usize {
        self.elts[w.index()].word.len()
    }

    /// Lexicographically minimal reduced word of `w`.
    pub fn word(&self, w: WeylElt) -> &[usize] {
        &self.elts[w.index()].word
    }

    /// Render a reduced word as `"s1 s2 s1"` (1-based letters); the identity
    /// renders as `"e"`.
    pub fn word_string(&self, w: WeylElt) -> String {
        let word = self.word(w);
        if word.is_empty() {
            "e".to_string()
        } else {
            word.iter()
                .map(|i| format!("s{}", i + 1))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }

    /// Parse `"s1 s2 s1"`, `"s1*s2"`, `"121"`, or `"e"` into the element the
    /// word multiplies out to (the word need not be reduced). Letters are
    /// 1-based.
    pub fn parse_word(&self, s: &str) -> Result<WeylElt, CartanError> {
        let raw = s.trim();
        let bad = |reason: &str| CartanError::BadWord {
            word: s.to_string(),
            reason: reason.to_string(),
        };
        if raw.is_empty() || raw == "e" || raw == "1" && self.rank() == 0 {
            return Ok(self.identity());
        }
        let mut letters: Vec<usize> = Vec::new();
        if raw.contains('s') || raw.contains('S') {
            for tok in raw.split(|c: char| c.is_whitespace() || c == '*' || c == '.') {
                if tok.is_empty() {
                    continue;
                }
                if tok == "e" {
                    continue;
                }
                let digits = tok
                    .strip_prefix('s')
                    .or_else(|| tok.strip_prefix('S'))
                    .ok_or_else(|| bad("expected tokens like s1, s2"))?;
                let k: usize = digits.parse().map_err(|_| bad("bad letter index"))?;
                if k == 0 || k > self.rank() {
                    return Err(bad("letter index out of range"));
                }
                letters.push(k - 1);
            }
        } else {
            for ch in raw.chars() {
                if ch.is_whitespace() {
                    continue;
                }
                let k = ch.to_digit(10).ok_or_else(|| bad("expected digits"))? as usize;
                if k == 0 || k > self.rank() {
                    return Err(bad("letter index out of range"));
                }
                letters.push(k - 1);
            }
        }
        let mut w = self.identity();
        for i in letters {
            w = self.right_mul_simple(w, i);
        }
        Ok(w)
    }

    /// Product `u * v`.
    pub fn mul(&self, u: WeylElt, v: WeylElt) -> WeylElt {
        let mut w = u;
        for &i in &self.elts[v.index()].word {
            w = self.right_mul_simple(w, i);
        }
        w
    }

    /// Product `w * s_i` via the Cayley table.
    pub fn right_mul_simple(&self, w: WeylElt, i: usize) -> WeylElt {
        WeylElt(self.right_cayley[w.index() * self.rank() + i])
    }

    /// Product `s_i * w`.
    pub fn left_mul_simple(&self, i: usize, w: WeylElt) -> WeylElt {
        self.mul(self.simple(i), w)
    }

    /// Inverse `w^{-1}`.
    pub fn inv(&self, w: WeylElt) -> WeylElt {
        WeylElt(self.elts[w.index()].inverse)
    }

    /// The reflection `s_beta` for the `k`-th positive root.
    pub fn reflection(&self, k: usize) -> WeylElt {
        self.reflections[k]
    }

    /// The reflection `s_beta` for an arbitrary root `beta`.
    pub fn reflection_of(&self, beta: &Root) -> WeylElt {
        let k = self
            .rs
            .positive_root_index(beta)
            .or_else(|| self.rs.positive_root_index(&beta.neg()))
            .unwrap_or_else(|| panic!("{beta} is not a root"));
        self.reflections[k]
    }

    /// Action on a weight in fundamental coordinates.
    pub fn act_weight(&self, w: WeylElt, mu: &Weight) -> Weight {
        Weight(mat_apply(self.rank(), &self.elts[w.index()].wt_mat, &mu.0))
    }

    /// Action on a root-lattice element in simple-root coordinates.
    pub fn act_root(&self, w: WeylElt, beta: &Root) -> Root {
        Root(mat_apply(self.rank(), &self.elts[w.index()].root_mat, &beta.0))
    }

    /// Action on a coroot-lattice element in simple-coroot coordinates.
    pub fn act_coroot(&self, w: WeylElt, xi: &Coroot) -> Coroot {
        Coroot(mat_apply(
            self.rank(),
            &self.elts[w.index()].coroot_mat,
            &xi.0,
        ))
    }

    /// Number of positive roots sent to negative roots by `w`; equals
    /// `l(w)`.
    pub fn num_inversions(&self, w: WeylElt) -> usize {
        self.rs
            .positive_roots()
            .iter()
            .filter(|beta| {
                let im = self.act_root(w, beta);
                im.0.iter().any(|&a| a < 0)
            })
            .count()
    }

    /// The inversion set `{ beta > 0 : w(beta) < 0 }` as positive-root
    /// indices.
    pub fn inversions(&self, w: WeylElt) -> Vec<usize> {
        (0..self.rs.num_positive_roots())
            .filter(|&k| {
                let im = self.act_root(w, &self.rs.positive_roots()[k]);
                im.0.iter().any(|&a| a < 0)
            })
            .collect()
    }

    /// Right descent set `{ i : l(w s_i) < l(w) }`, sorted ascending.
    pub fn right_descents(&self, w: WeylElt) -> Vec<usize> {
        let mask = self.elts[w.index()].right_descents;
        (0..self.rank()).filter(|i| mask & (1 << i) != 0).collect()
    }

    /// Left descent set `{ i : l(s_i w) < l(w) }`, sorted ascending.
    pub fn left_descents(&self, w: WeylElt) -> Vec<usize> {
        self.right_descents(self.inv(w))
    }

    /// All reduced words of `w`, in lexicographic order. Exponential in
    /// `l(w)`; intended for small ranks.
    pub fn reduced_words(&self, w: WeylElt) -> Vec<Vec<usize>> {
        if w == self.identity() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for i in self.right_descents(w) {
            for mut word in self.reduced_words(self.right_mul_simple(w, i)) {
                word.push(i);
                out.push(word);
            }
        }
        out.sort();
        out
    }

    /// True when `w s_i > w`.
    pub fn is_right_ascent(&self, w: WeylElt, i: usize) -> bool {
        self.elts[w.index()].right_descents & (1 << i) == 0
    }

    /// The longest element `w_o`.
    pub fn longest(&self) -> WeylElt {
        WeylElt(self.elts.len() as u32 - 1)
    }

    /// All elements of the parabolic subgroup `W_S` generated by
    /// `{ s_i : i in S }`, in canonical index order.
    pub fn subgroup_elements(&self, s: &[usize]) -> Vec<WeylElt> {
        for &i in s {
            assert!(i < self.rank(), "generator index in range");
        }
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![self.identity()];
        let mut frontier = vec![self.identity()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &w in &frontier {
                for &i in s {
                    let ws = self.right_mul_simple(w, i);
                    if !seen[ws.index()] {
                        seen[ws.index()] = true;
                        out.push(ws);
                        next.push(ws);
                    }
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }

    /// Longest element of the parabolic subgroup `W_S`.
    pub fn longest_of(&self, s: &[usize]) -> WeylElt {
        *self
            .subgroup_elements(s)
            .iter()
            .max_by_key(|&&w| self.length(w))
            .expect("subgroup nonempty")
    }

    /// Bruhat order `u <= v`, by the subword criterion: peel the first
    /// letter `i` of a reduced word for `v`; then `u <= v` iff
    /// `min(u, s_i u) <= s_i v` (induction on `l(v)`).
    pub fn bruhat_leq(&self, u: WeylElt, v: WeylElt) -> bool {
        let mut u = u;
        let mut v = v;
        loop {
            if u == self.identity() {
                return true;
            }
            if self.length(u) > self.length(v) {
                return false;
            }
            // v != e here since l(u) <= l(v) and u != e.
            let i = self.elts[v.index()].word[0];
            let siu = self.left_mul_simple(i, u);
            if self.length(siu) < self.length(u) {
                u = siu;
            }
            v = self.left_mul_simple(i, v);
        }
    }

    /// True when `i in J` makes `w s_i` shorter for no `i`, i.e. `w` is the
    /// minimal-length representative of `w W_J`.
    pub fn is_min_rep(&self, w: WeylElt, j: &[usize]) -> bool {
        j.iter().all(|&i| self.is_right_ascent(w, i))
    }

    /// Minimal and maximal length representatives of the coset `w W_J`.
    ///
    /// The minimum is found by stripping right descents in `J`; the maximum
    /// is `min * w_o(J)`.
    pub fn coset_reps(&self, w: WeylElt, j: &[usize]) -> (WeylElt, WeylElt) {
        let min = self.min_rep(w, j);
        let max = self.mul(min, self.longest_of(j));
        debug_assert_eq!(
            self.length(max),
            self.length(min) + self.length(self.longest_of(j)),
            "max rep length is additive over the coset"
        );
        (min, max)
    }

    /// Minimal-length representative of the coset `w W_J`.
    pub fn min_rep(&self, w: WeylElt, j: &[usize]) -> WeylElt {
        let mut w = w;
        'outer: loop {
            for &i in j {
                if !self.is_right_ascent(w, i) {
                    w = self.right_mul_simple(w, i);
                    continue 'outer;
                }
            }
            return w;
        }
    }

    /// Maximal-length representative of the coset `w W_J`.
    pub fn max_rep(&self, w: WeylElt, j: &[usize]) -> WeylElt {
        self.coset_reps(w, j).1
    }

    /// The set `W^J` of minimal coset representatives, in canonical order.
    pub fn min_coset_reps(&self, j: &[usize]) -> Vec<WeylElt> {
        self.elements().filter(|&w| self.is_min_rep(w, j)).collect()
    }
}
