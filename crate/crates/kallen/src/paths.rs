//! Quantum and semi-infinite Lakshmibai--Seshadri paths.
//!
//! - [`QlsPath`]: quantum LS paths of shape `lambda` — sequences of
//!   directions in `W^J` with rational break points, adjacent directions
//!   joined by a directed path in the quantum Bruhat subgraph whose edge
//!   labels `beta` satisfy `a <lambda, beta^vee> in Z`. Complete
//!   enumeration, weights, tail degrees `deg(eta)` and degrees at `w
//!   lambda`, and the final-direction filter by `EQB` membership.
//! - [`SlsPath`]: semi-infinite LS paths — strictly decreasing chains in
//!   `(W^J)_af` with the analogous chain condition inside the semi-infinite
//!   Bruhat graph. Validity checking (with an explicit, honestly reported
//!   search bound), exact piecewise-linear `H`-functions, the crystal root
//!   operators `e_i`/`f_i` for all affine directions including `i = 0`,
//!   the Weyl-group action, and the projection `cl` onto quantum LS paths.
//!
//! All break-point and height arithmetic is exact (`i64` rationals).

use crate::affine::{self, AffineElt};
use crate::cartan::{Series, Weight, WeylElt, WeylGroup};
use crate::qbg::{self, Qbg};
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

/// Exact rational scalar used for break points and `H`-function values.
pub type Rat = Rational64;

fn rat_str(r: &Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A quantum LS path `(w_1, ..., w_s; a_0, ..., a_s)` of some shape
/// `lambda`: directions in `W^J`, adjacent directions distinct, times
/// strictly increasing from 0 to 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QlsPath {
    pub dirs: Vec<WeylElt>,
    pub times: Vec<Rat>,
}

impl QlsPath {
    /// The straight path `(w; 0, 1)`.
    pub fn straight(w: WeylElt) -> QlsPath {
        QlsPath {
            dirs: vec![w],
            times: vec![Rat::zero(), Rat::one()],
        }
    }

    /// Human-readable form `(s1, e; 0, 1/2, 1)`.
    pub fn text(&self, wg: &WeylGroup) -> String {
        let dirs: Vec<String> = self.dirs.iter().map(|&w| wg.word_string(w)).collect();
        let times: Vec<String> = self.times.iter().map(rat_str).collect();
        format!("({}; {})", dirs.join(", "), times.join(", "))
    }

    pub fn to_json(&self, wg: &WeylGroup) -> serde_json::Value {
        json!({
            "dirs": self.dirs.iter().map(|&w| wg.word_string(w)).collect::<Vec<_>>(),
            "times": self.times.iter().map(rat_str).collect::<Vec<_>>(),
        })
    }
}

/// The final direction `kappa(eta) = w_s`.
pub fn kappa(eta: &QlsPath) -> WeylElt {
    *eta.dirs.last().expect("paths have at least one direction")
}

/// A semi-infinite LS path `(x_1, ..., x_s; a_0, ..., a_s)`: a strictly
/// decreasing chain in `(W^J)_af` with rational break points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlsPath {
    pub dirs: Vec<AffineElt>,
    pub times: Vec<Rat>,
}

impl SlsPath {
    /// The straight path `(x; 0, 1)`.
    pub fn straight(x: AffineElt) -> SlsPath {
        SlsPath {
            dirs: vec![x],
            times: vec![Rat::zero(), Rat::one()],
        }
    }

    /// The distinguished initial path `(e; 0, 1)`.
    pub fn initial(rank: usize) -> SlsPath {
        SlsPath::straight(AffineElt::identity(rank))
    }

    pub fn text(&self, wg: &WeylGroup) -> String {
        let dirs: Vec<String> = self.dirs.iter().map(|x| x.to_text(wg)).collect();
        let times: Vec<String> = self.times.iter().map(rat_str).collect();
        format!("({}; {})", dirs.join(", "), times.join(", "))
    }

    pub fn to_json(&self, wg: &WeylGroup) -> serde_json::Value {
        json!({
            "dirs": self.dirs.iter().map(|x| x.to_text(wg)).collect::<Vec<_>>(),
            "times": self.times.iter().map(rat_str).collect::<Vec<_>>(),
        })
    }

    fn assert_well_formed(&self, wg: &WeylGroup) {
        assert!(!self.dirs.is_empty());
        assert_eq!(self.times.len(), self.dirs.len() + 1);
        assert_eq!(self.times[0], Rat::zero());
        assert_eq!(*self.times.last().unwrap(), Rat::one());
        for k in 1..self.times.len() {
            assert!(self.times[k - 1] < self.times[k], "times strictly increase");
        }
        for k in 1..self.dirs.len() {
            assert!(
                self.dirs[k - 1] != self.dirs[k],
                "adjacent directions must differ in {}",
                self.text(wg)
            );
        }
    }
}

/// Slope `<x lambda, alpha_i^vee>` of a level-zero direction against an
/// affine simple coroot; `i = 0` is the affine node, `i >= 1` the finite
/// node `i - 1`. Independent of the translation part of `x`.
fn slope(wg: &WeylGroup, x: &AffineElt, lambda: &Weight, i: usize) -> i64 {
    let rs = wg.root_system();
    let moved = wg.act_weight(x.fin, lambda);
    if i == 0 {
        -rs.pair(&moved, rs.theta_coroot())
    } else {
        rs.pair(&moved, rs.simple_coroot(i - 1))
    }
}

// ---------------------------------------------------------------------
// Quantum LS paths
// ---------------------------------------------------------------------

/// Reachability matrix of the subgraph of `par` keeping only edges whose
/// label `beta` satisfies `q | <lambda, beta^vee>` — the quantum Bruhat
/// graph "at level `a`" for any `a` with reduced denominator `q`.
fn reach_matrix(par: &Qbg, lambda: &Weight, q: i64) -> Vec<bool> {
    let rs = par.weyl().root_system();
    let n = par.vertices().len();
    let mut reach = vec![false; n * n];
    for s in 0..n {
        reach[s * n + s] = true;
        let mut stack = vec![s];
        while let Some(y) = stack.pop() {
            for e in par.edges() {
                if e.src != y {
                    continue;
                }
                if rs.pair(lambda, &rs.positive_coroots()[e.label]) % q != 0 {
                    continue;
                }
                if !reach[s * n + e.dst] {
                    reach[s * n + e.dst] = true;
                    stack.push(e.dst);
                }
            }
        }
    }
    reach
}

/// All quantum LS paths of shape `lambda`, in canonical order: by number
/// of segments, then lexicographically by times, then by directions.
///
/// `par` must be the graph over `W^J` for `J = { i : <lambda, alpha_i^vee>
/// = 0 }`. Break points are complete: any valid break time has reduced
/// denominator dividing one of the values `<lambda, beta^vee>`.
///
/// The result is memoized per `(series, rank, lambda)` — element indices
/// are canonical per type, so the cached set is valid for every group
/// instance of that type. Character computations call this heavily with
/// repeated shapes.
pub fn qls_enumerate(par: &Qbg, lambda: &Weight) -> Vec<QlsPath> {
    type Key = (Series, usize, Vec<i64>);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<QlsPath>>>>> = OnceLock::new();
    let rs = par.weyl().root_system();
    let key = (rs.series(), rs.rank(), lambda.coords().to_vec());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.as_ref().clone();
    }
    let computed = Arc::new(qls_enumerate_uncached(par, lambda));
    let mut guard = cache.lock().unwrap();
    let stored = guard.entry(key).or_insert(computed);
    stored.as_ref().clone()
}

fn qls_enumerate_uncached(par: &Qbg, lambda: &Weight) -> Vec<QlsPath> {
    let wg = par.weyl();
    let rs = wg.root_system();
    let j = rs.j_of(lambda).expect("lambda must be dominant");
    assert_eq!(par.j(), &j[..], "graph parabolic type must match lambda");
    let n = par.vertices().len();

    let in_j: Vec<usize> = rs.positive_root_indices_in(&j);
    let mut breaks: BTreeSet<Rat> = BTreeSet::new();
    let mut dens: BTreeSet<i64> = BTreeSet::new();
    for k in 0..rs.num_positive_roots() {
        if in_j.contains(&k) {
            continue;
        }
        let v = rs.pair(lambda, &rs.positive_coroots()[k]);
        assert!(v > 0, "pairings off Delta_J are positive");
        for q in 2..=v {
            if v % q == 0 {
                for p in 1..q {
                    let r = Rat::new(p, q);
                    dens.insert(*r.denom());
                    breaks.insert(r);
                }
            }
        }
    }
    let breaks: Vec<Rat> = breaks.into_iter().collect();
    let reach: BTreeMap<i64, Vec<bool>> = dens
        .into_iter()
        .map(|q| (q, reach_matrix(par, lambda, q)))
        .collect();

    let mut out: Vec<QlsPath> = Vec::new();
    let mut dirs: Vec<usize> = Vec::new();
    let mut times: Vec<Rat> = Vec::new();
    for start in 0..n {
        dirs.push(start);
        extend_qls(par, &breaks, &reach, &mut dirs, &mut times, &mut out);
        dirs.pop();
    }
    out.sort_by(|a, b| {
        (a.dirs.len(), &a.times, &a.dirs).cmp(&(b.dirs.len(), &b.times, &b.dirs))
    });
    out
}

fn extend_qls(
    par: &Qbg,
    breaks: &[Rat],
    reach: &BTreeMap<i64, Vec<bool>>,
    dirs: &mut Vec<usize>,
    times: &mut Vec<Rat>,
    out: &mut Vec<QlsPath>,
) {
    let n = par.vertices().len();
    // Close the path here.
    let mut full_times = vec![Rat::zero()];
    full_times.extend_from_slice(times);
    full_times.push(Rat::one());
    out.push(QlsPath {
        dirs: dirs.iter().map(|&p| par.vertices()[p]).collect(),
        times: full_times,
    });
    // Or extend by one more (break, direction) pair. Adding direction
    // w_{u+1} after w_u at the break a_u requires a directed path from
    // w_{u+1} to w_u in the subgraph at a_u.
    let first = match times.last() {
        Some(last) => breaks.partition_point(|b| b <= last),
        None => 0,
    };
    let cur = *dirs.last().unwrap();
    for bi in first..breaks.len() {
        let table = &reach[breaks[bi].denom()];
        for next in 0..n {
            if next != cur && table[next * n + cur] {
                dirs.push(next);
                times.push(breaks[bi]);
                extend_qls(par, breaks, reach, dirs, times, out);
                times.pop();
                dirs.pop();
            }
        }
    }
}

/// Check the defining conditions of a quantum LS path of shape `lambda`.
pub fn qls_validate(par: &Qbg, lambda: &Weight, eta: &QlsPath) -> bool {
    let wg = par.weyl();
    let rs = wg.root_system();
    let j = rs.j_of(lambda).expect("lambda must be dominant");
    assert_eq!(par.j(), &j[..], "graph parabolic type must match lambda");
    let s = eta.dirs.len();
    if s == 0 || eta.times.len() != s + 1 {
        return false;
    }
    if eta.times[0] != Rat::zero() || *eta.times.last().unwrap() != Rat::one() {
        return false;
    }
    for k in 1..eta.times.len() {
        if eta.times[k - 1] >= eta.times[k] {
            return false;
        }
    }
    if !eta.dirs.iter().all(|&w| wg.is_min_rep(w, &j)) {
        return false;
    }
    let n = par.vertices().len();
    for k in 1..s {
        if eta.dirs[k - 1] == eta.dirs[k] {
            return false;
        }
        let q = *eta.times[k].denom();
        if q == 1 {
            return false;
        }
        let table = reach_matrix(par, lambda, q);
        let src = par.vertex_pos(eta.dirs[k]);
        let dst = par.vertex_pos(eta.dirs[k - 1]);
        if !table[src * n + dst] {
            return false;
        }
    }
    true
}

/// The endpoint weight `wt(eta) = sum (a_u - a_{u-1}) w_u lambda`, asserted
/// to be integral.
pub fn qls_wt(wg: &WeylGroup, eta: &QlsPath, lambda: &Weight) -> Weight {
    let rank = wg.rank();
    let mut acc = vec![Rat::zero(); rank];
    for (u, &w) in eta.dirs.iter().enumerate() {
        let span = eta.times[u + 1] - eta.times[u];
        let moved = wg.act_weight(w, lambda);
        for (a, &c) in acc.iter_mut().zip(moved.coords()) {
            *a += span * Rat::from_integer(c);
        }
    }
    Weight(
        acc.into_iter()
            .map(|a| {
                assert!(a.is_integer(), "path weight must be integral");
                a.to_integer()
            })
            .collect(),
    )
}

/// Degree of `eta` at `w lambda`:
/// `-sum_{u=1}^{s} a_u <lambda, wt^J(w_{u+1} => w_u)>` with `w_{s+1} := w`.
/// Asserted to be a nonpositive integer. With `w = kappa(eta)` this is the
/// tail degree `deg(eta)`.
pub fn deg_at(par: &Qbg, eta: &QlsPath, w: WeylElt, lambda: &Weight) -> i64 {
    let wg = par.weyl();
    let rs = wg.root_system();
    assert!(wg.is_min_rep(w, par.j()), "w must lie in W^J");
    let s = eta.dirs.len();
    let mut acc = Rat::zero();
    for u in 1..=s {
        let next = if u == s { w } else { eta.dirs[u] };
        let wt = par.weight_between(next, eta.dirs[u - 1]);
        acc += eta.times[u] * Rat::from_integer(rs.pair(lambda, &wt));
    }
    let deg = -acc;
    assert!(deg.is_integer(), "degree must be integral");
    let deg = deg.to_integer();
    assert!(deg <= 0, "degree must be nonpositive");
    deg
}

/// Tail degree `deg(eta) = deg_at(eta, kappa(eta), lambda)`.
pub fn deg(par: &Qbg, eta: &QlsPath, lambda: &Weight) -> i64 {
    deg_at(par, eta, kappa(eta), lambda)
}

/// The paths whose final direction lies in `floor(EQB(ceil(w)))` — the
/// index set of the graded character of the level-zero van der Kallen
/// module attached to `w`.
pub fn qls_filter_winf(par: &Qbg, full: &Qbg, set: &[QlsPath], w: WeylElt) -> Vec<QlsPath> {
    let allowed = qbg::floor_eqb(full, par.j(), w);
    set.iter()
        .filter(|eta| allowed.binary_search(&kappa(eta)).is_ok())
        .cloned()
        .collect()
}

// ---------------------------------------------------------------------
// Semi-infinite LS paths
// ---------------------------------------------------------------------

/// The piecewise-linear height function `H_i(t) = <pibar(t), alpha_i^vee>`
/// of a path: values at the break points and integer slopes per segment.
struct HFunction {
    times: Vec<Rat>,
    values: Vec<Rat>,
    slopes: Vec<i64>,
}

impl HFunction {
    fn build(wg: &WeylGroup, lambda: &Weight, pi: &SlsPath, i: usize) -> HFunction {
        let slopes: Vec<i64> = pi.dirs.iter().map(|x| slope(wg, x, lambda, i)).collect();
        let mut values = vec![Rat::zero()];
        for (u, &sl) in slopes.iter().enumerate() {
            let v = values[u] + (pi.times[u + 1] - pi.times[u]) * Rat::from_integer(sl);
            values.push(v);
        }
        let h = HFunction {
            times: pi.times.clone(),
            values,
            slopes,
        };
        // Interior strict local minima of H must be integers.
        for u in 1..h.slopes.len() {
            if h.slopes[u - 1] < 0 && h.slopes[u] > 0 {
                assert!(
                    h.values[u].is_integer(),
                    "local minima of H must be integral"
                );
            }
        }
        h
    }

    /// Global minimum `m <= 0`, asserted integral.
    fn min_int(&self) -> i64 {
        let m = self.values.iter().min().expect("nonempty");
        assert!(m.is_integer(), "minimum of H must be integral");
        let m = m.to_integer();
        assert!(m <= 0, "H starts at 0");
        m
    }

    fn endpoint(&self) -> &Rat {
        self.values.last().expect("nonempty")
    }
}

/// `eps(pi, i) = -m_i`: how many times `e_i` applies.
pub fn eps(wg: &WeylGroup, lambda: &Weight, pi: &SlsPath, i: usize) -> i64 {
    -HFunction::build(wg, lambda, pi, i).min_int()
}

/// `phi(pi, i) = H_i(1) - m_i`: how many times `f_i` applies.
pub fn phi(wg: &WeylGroup, lambda: &Weight, pi: &SlsPath, i: usize) -> i64 {
    let h = HFunction::build(wg, lambda, pi, i);
    let p = *h.endpoint() - Rat::from_integer(h.min_int());
    assert!(p.is_integer(), "H(1) must be integral");
    p.to_integer()
}

/// Raising root operator `e_i` (`i = 0` is the affine node). Returns
/// `None` when the operator vanishes.
pub fn sls_root_e(
    wg: &WeylGroup,
    lambda: &Weight,
    pi: &SlsPath,
    i: usize,
) -> Option<SlsPath> {
    let h = HFunction::build(wg, lambda, pi, i);
    let s = pi.dirs.len();
    let m = h.min_int();
    if m == 0 {
        return None;
    }
    let mrat = Rat::from_integer(m);
    let target = Rat::from_integer(m + 1);
    // t_1 = a_q: first break point attaining the minimum.
    let q = (0..=s).find(|&u| h.values[u] == mrat).expect("min attained");
    // t_0: last time before t_1 at height m + 1; H decreases strictly on
    // [t_0, t_1]. Scan segments right to left for the crossing.
    let mut p = 0;
    let mut t0 = Rat::zero();
    let mut found = false;
    for u in (1..=q).rev() {
        if h.values[u - 1] >= target {
            t0 = h.times[u - 1]
                + (target - h.values[u - 1]) / Rat::from_integer(h.slopes[u - 1]);
            p = u;
            found = true;
            break;
        }
    }
    assert!(found, "H(0) = 0 >= m + 1 guarantees a crossing");

    let si = affine::simple_affine(wg, i);
    let mut dirs: Vec<AffineElt> = Vec::with_capacity(s + 1);
    dirs.extend(pi.dirs[..p].iter().cloned());
    dirs.extend(pi.dirs[p - 1..q].iter().map(|x| affine::mul(wg, &si, x)));
    dirs.extend(pi.dirs[q..].iter().cloned());
    let mut times: Vec<Rat> = Vec::with_capacity(s + 2);
    times.extend_from_slice(&pi.times[..p]);
    times.push(t0);
    times.extend_from_slice(&pi.times[p..]);
    // Drop rules, higher indices first: if s_i x_q = x_{q+1}, drop that
    // repeated direction and the break a_q; if t_0 = a_{p-1}, drop the
    // now-empty segment of x_p.
    if q < s && affine::mul(wg, &si, &pi.dirs[q - 1]) == pi.dirs[q] {
        dirs.remove(q + 1);
        times.remove(q + 1);
    }
    if t0 == pi.times[p - 1] {
        dirs.remove(p - 1);
        times.remove(p - 1);
    }
    let out = SlsPath { dirs, times };
    out.assert_well_formed(wg);
    Some(out)
}

/// Lowering root operator `f_i` (`i = 0` is the affine node). Returns
/// `None` when the operator vanishes.
pub fn sls_root_f(
    wg: &WeylGroup,
    lambda: &Weight,
    pi: &SlsPath,
    i: usize,
) -> Option<SlsPath> {
    let h = HFunction::build(wg, lambda, pi, i);
    let s = pi.dirs.len();
    let m = h.min_int();
    let mrat = Rat::from_integer(m);
    let target = Rat::from_integer(m + 1);
    if *h.endpoint() == mrat {
        return None;
    }
    // t_0 = a_p: last break point attaining the minimum.
    let p = (0..=s).rev().find(|&u| h.values[u] == mrat).expect("min attained");
    // t_1: first time after t_0 at height m + 1; H increases strictly on
    // [t_0, t_1].
    let mut q = 0;
    let mut t1 = Rat::zero();
    let mut found = false;
    for u in p + 1..=s {
        if h.values[u] >= target {
            t1 = h.times[u - 1]
                + (target - h.values[u - 1]) / Rat::from_integer(h.slopes[u - 1]);
            q = u - 1;
            found = true;
            break;
        }
    }
    assert!(found, "H(1) > m guarantees a crossing");

    let si = affine::simple_affine(wg, i);
    let mut dirs: Vec<AffineElt> = Vec::with_capacity(s + 1);
    dirs.extend(pi.dirs[..p].iter().cloned());
    dirs.extend(pi.dirs[p..q].iter().map(|x| affine::mul(wg, &si, x)));
    dirs.push(affine::mul(wg, &si, &pi.dirs[q]));
    dirs.extend(pi.dirs[q..].iter().cloned());
    let mut times: Vec<Rat> = Vec::with_capacity(s + 2);
    times.extend_from_slice(&pi.times[..=q]);
    times.push(t1);
    times.extend_from_slice(&pi.times[q + 1..]);
    // Drop rules, higher indices first: if t_1 = a_{q+1}, the segment of
    // x_{q+1} is empty; if x_p = s_i x_{p+1}, the first reflected segment
    // merges into the one before it.
    if t1 == pi.times[q + 1] {
        dirs.remove(q + 1);
        times.remove(q + 2);
    }
    if p >= 1 && pi.dirs[p - 1] == affine::mul(wg, &si, &pi.dirs[p]) {
        dirs.remove(p - 1);
        times.remove(p);
    }
    let out = SlsPath { dirs, times };
    out.assert_well_formed(wg);
    Some(out)
}

/// Endpoint weight of a semi-infinite path as (finite part, delta
/// coefficient); both parts are asserted integral.
pub fn sls_wt(wg: &WeylGroup, lambda: &Weight, pi: &SlsPath) -> (Weight, i64) {
    let rank = wg.rank();
    let mut acc = vec![Rat::zero(); rank];
    let mut dacc = Rat::zero();
    for (u, x) in pi.dirs.iter().enumerate() {
        let span = pi.times[u + 1] - pi.times[u];
        let (moved, d) = affine::act_level_zero(wg, x, lambda);
        for (a, &c) in acc.iter_mut().zip(moved.coords()) {
            *a += span * Rat::from_integer(c);
        }
        dacc += span * Rat::from_integer(d);
    }
    let fin = Weight(
        acc.into_iter()
            .map(|a| {
                assert!(a.is_integer(), "path weight must be integral");
                a.to_integer()
            })
            .collect(),
    );
    assert!(dacc.is_integer(), "delta degree must be integral");
    (fin, dacc.to_integer())
}

/// Affine Weyl-group action on paths: `s_i` acts by `f_i^n` when
/// `n = <wt(pi), alpha_i^vee> >= 0` and by `e_i^{-n}` otherwise.
pub fn weyl_act_sls(wg: &WeylGroup, lambda: &Weight, i: usize, pi: &SlsPath) -> SlsPath {
    let rs = wg.root_system();
    let (nu, _) = sls_wt(wg, lambda, pi);
    let n = if i == 0 {
        -rs.pair(&nu, rs.theta_coroot())
    } else {
        rs.pair(&nu, rs.simple_coroot(i - 1))
    };
    let mut cur = pi.clone();
    for _ in 0..n.unsigned_abs() {
        cur = if n >= 0 {
            sls_root_f(wg, lambda, &cur, i)
        } else {
            sls_root_e(wg, lambda, &cur, i)
        }
        .expect("string operator must not vanish before the weight is reflected");
    }
    cur
}

/// Project to a quantum LS path: apply `cl` to every direction, keeping
/// the last direction and the outer break points of each constant run.
/// The result is asserted to satisfy the quantum LS path conditions.
pub fn sls_cl(par: &Qbg, lambda: &Weight, pi: &SlsPath) -> QlsPath {
    let wg = par.weyl();
    let mut dirs: Vec<WeylElt> = Vec::new();
    let mut times: Vec<Rat> = vec![pi.times[0]];
    for (u, x) in pi.dirs.iter().enumerate() {
        let c = affine::cl_affine(wg, par.j(), x);
        if dirs.last() == Some(&c) {
            *times.last_mut().unwrap() = pi.times[u + 1];
        } else {
            dirs.push(c);
            times.push(pi.times[u + 1]);
        }
    }
    let eta = QlsPath { dirs, times };
    assert!(
        qls_validate(par, lambda, &eta),
        "cl must land in the quantum LS paths"
    );
    eta
}

/// Validity of a semi-infinite LS path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlsValidity {
    Valid,
    Invalid,
    /// A chain segment was not confirmed, and at least one candidate edge
    /// was discarded solely because its label exceeded the search bound.
    BoundExceeded,
}

fn default_n_bound(wg: &WeylGroup, pi: &SlsPath) -> i64 {
    let max_trans = pi
        .dirs
        .iter()
        .flat_map(|x| x.trans.coords().iter().map(|c| c.abs()))
        .max()
        .unwrap_or(0);
    2 * (1 + max_trans) + wg.root_system().coxeter_number()
}

/// Check the defining conditions of a semi-infinite LS path of shape
/// `lambda`: strict decrease of the directions, and for each interior
/// break `a_u` a directed path from `x_{u+1}` to `x_u` in the
/// semi-infinite Bruhat graph restricted to labels `beta` with
/// `a_u <x lambda, beta^vee> in Z`. The path search solves, per finite
/// positive root, for the unique translation multiple raising the
/// semi-infinite length by one, prunes to the order interval, and
/// discards labels `alpha + n delta` with `|n| > n_bound` — reporting
/// [`SlsValidity::BoundExceeded`] when such a discard could have mattered.
pub fn sls_validate(
    par: &Qbg,
    lambda: &Weight,
    pi: &SlsPath,
    n_bound: Option<i64>,
) -> SlsValidity {
    let wg = par.weyl();
    let rs = wg.root_system();
    let j = rs.j_of(lambda).expect("lambda must be dominant");
    assert_eq!(par.j(), &j[..], "graph parabolic type must match lambda");

    let s = pi.dirs.len();
    if s == 0
        || pi.times.len() != s + 1
        || pi.times[0] != Rat::zero()
        || *pi.times.last().unwrap() != Rat::one()
        || (1..=s).any(|k| pi.times[k - 1] >= pi.times[k])
    {
        return SlsValidity::Invalid;
    }
    if !pi
        .dirs
        .iter()
        .all(|x| affine::is_min_in_coset_af(wg, &j, x))
    {
        return SlsValidity::Invalid;
    }
    for k in 1..s {
        if pi.dirs[k - 1] == pi.dirs[k] || !par.si_leq(&pi.dirs[k - 1], &pi.dirs[k]) {
            return SlsValidity::Invalid;
        }
    }
    let bound = n_bound.unwrap_or_else(|| default_n_bound(wg, pi));
    let mut exceeded = false;
    for k in 1..s {
        let (found, hit) =
            sb_segment_search(par, lambda, &pi.dirs[k], &pi.dirs[k - 1], pi.times[k], bound);
        if !found {
            if hit {
                exceeded = true;
            } else {
                return SlsValidity::Invalid;
            }
        }
    }
    if exceeded {
        SlsValidity::BoundExceeded
    } else {
        SlsValidity::Valid
    }
}

/// Breadth-first search for a directed path `from -> to` in the
/// semi-infinite Bruhat graph at level `a`. Each step raises the
/// semi-infinite length by exactly one, so the depth is fixed; per finite
/// positive root the translation multiple is solved exactly. Returns
/// `(found, excluded_by_bound)`.
fn sb_segment_search(
    par: &Qbg,
    lambda: &Weight,
    from: &AffineElt,
    to: &AffineElt,
    a: Rat,
    bound: i64,
) -> (bool, bool) {
    let wg = par.weyl();
    let rs = wg.root_system();
    let steps = affine::sil(wg, to) - affine::sil(wg, from);
    if steps <= 0 {
        return (false, false);
    }
    let mut excluded = false;
    let mut seen: HashSet<AffineElt> = HashSet::from([from.clone()]);
    let mut frontier = vec![from.clone()];
    for _ in 0..steps {
        let mut next = Vec::new();
        for y in &frontier {
            let v = y.fin;
            let vinv = wg.inv(v);
            let sil_y = affine::sil(wg, y);
            let vl = wg.act_weight(v, lambda);
            let two_rho_trans: i64 = 2 * y.trans.coords().iter().sum::<i64>();
            for k in 0..rs.num_positive_roots() {
                let pairing = rs.pair(&vl, &rs.positive_coroots()[k]);
                if !(a * Rat::from_integer(pairing)).is_integer() {
                    continue;
                }
                // sil(s_{alpha} t_{m alpha^vee} y) is affine-linear in m
                // with nonzero slope 2 <rho, v^{-1} alpha^vee>.
                let avee = wg.act_coroot(vinv, &rs.positive_coroots()[k]);
                let sl: i64 = 2 * avee.coords().iter().sum::<i64>();
                let base =
                    wg.length(wg.mul(wg.reflection(k), v)) as i64 + two_rho_trans;
                let num = sil_y + 1 - base;
                if num % sl != 0 {
                    continue;
                }
                let m = num / sl;
                let z = affine::mul(
                    wg,
                    &affine::affine_reflection(wg, &rs.positive_roots()[k], m),
                    y,
                );
                debug_assert_eq!(affine::sil(wg, &z), sil_y + 1);
                if !affine::is_min_in_coset_af(wg, par.j(), &z) {
                    continue;
                }
                if !par.si_leq(to, &z) {
                    continue;
                }
                if m.abs() > bound {
                    excluded = true;
                    continue;
                }
                if seen.insert(z.clone()) {
                    next.push(z);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    (seen.contains(to), excluded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{Coroot, RootSystem, Series};
    use std::sync::Arc;

    fn setup(series: Series, rank: usize, lambda: &[i64]) -> (Arc<WeylGroup>, Qbg, Qbg, Weight) {
        let wg = Arc::new(WeylGroup::new(RootSystem::build(series, rank).unwrap()));
        let lambda = Weight(lambda.to_vec());
        let j = wg.root_system().j_of(&lambda).unwrap();
        let par = Qbg::build(wg.clone(), &j);
        let full = Qbg::build(wg.clone(), &[]);
        (wg, par, full, lambda)
    }

    fn rat(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    #[test]
    fn enumerate_a1_fundamental() {
        let (wg, par, _full, lambda) = setup(Series::A, 1, &[1]);
        let set = qls_enumerate(&par, &lambda);
        let texts: Vec<String> = set.iter().map(|p| p.text(&wg)).collect();
        assert_eq!(texts, vec!["(e; 0, 1)", "(s1; 0, 1)"]);
    }

    #[test]
    fn enumerate_a1_doubled() {
        let (wg, par, _full, lambda) = setup(Series::A, 1, &[2]);
        let set = qls_enumerate(&par, &lambda);
        let texts: Vec<String> = set.iter().map(|p| p.text(&wg)).collect();
        assert_eq!(
            texts,
            vec![
                "(e; 0, 1)",
                "(s1; 0, 1)",
                "(e, s1; 0, 1/2, 1)",
                "(s1, e; 0, 1/2, 1)",
            ]
        );
    }

    #[test]
    fn enumeration_is_valid_and_integral() {
        for (series, rank, lam) in [
            (Series::A, 2, vec![1, 1]),
            (Series::A, 2, vec![2, 0]),
            (Series::A, 2, vec![0, 1]),
            (Series::B, 2, vec![1, 1]),
            (Series::G, 2, vec![1, 0]),
        ] {
            let (wg, par, _full, lambda) = setup(series, rank, &lam);
            let set = qls_enumerate(&par, &lambda);
            assert!(!set.is_empty());
            for eta in &set {
                assert!(qls_validate(&par, &lambda, eta), "{}", eta.text(&wg));
                let _ = qls_wt(&wg, eta, &lambda);
                assert!(deg(&par, eta, &lambda) <= 0);
            }
            // The straight path at the identity is always present.
            assert_eq!(set[0], QlsPath::straight(wg.identity()));
            // No duplicates.
            let mut dedup = set.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), set.len());
        }
    }

    #[test]
    fn enumerate_zero_weight() {
        let (wg, par, _full, lambda) = setup(Series::A, 2, &[0, 0]);
        let set = qls_enumerate(&par, &lambda);
        assert_eq!(set, vec![QlsPath::straight(wg.identity())]);
    }

    #[test]
    fn weights_and_degrees_hand_values() {
        let (wg, par, _full, lambda) = setup(Series::A, 1, &[1]);
        let e = QlsPath::straight(wg.identity());
        let s1 = QlsPath::straight(wg.simple(0));
        assert_eq!(qls_wt(&wg, &e, &lambda), Weight(vec![1]));
        assert_eq!(qls_wt(&wg, &s1, &lambda), Weight(vec![-1]));
        assert_eq!(deg_at(&par, &e, wg.identity(), &lambda), 0);
        assert_eq!(deg_at(&par, &e, wg.simple(0), &lambda), -1);
        assert_eq!(deg_at(&par, &s1, wg.simple(0), &lambda), 0);
        assert_eq!(deg_at(&par, &s1, wg.identity(), &lambda), 0);

        let (wg, par, _full, lambda) = setup(Series::A, 1, &[2]);
        // (s1, e): the chain e => s1 walks the Bruhat edge, weight zero.
        let up = QlsPath {
            dirs: vec![wg.simple(0), wg.identity()],
            times: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        };
        assert_eq!(qls_wt(&wg, &up, &lambda), Weight(vec![0]));
        assert_eq!(deg(&par, &up, &lambda), 0);
        // (e, s1): the chain s1 => e walks the quantum edge of weight
        // alpha^vee, contributing a_1 <lambda, alpha^vee> = 1.
        let down = QlsPath {
            dirs: vec![wg.identity(), wg.simple(0)],
            times: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        };
        assert_eq!(qls_wt(&wg, &down, &lambda), Weight(vec![0]));
        assert_eq!(deg(&par, &down, &lambda), -1);
    }

    #[test]
    fn filter_by_final_direction() {
        let (wg, par, full, lambda) = setup(Series::A, 1, &[1]);
        let set = qls_enumerate(&par, &lambda);
        let at_e = qls_filter_winf(&par, &full, &set, wg.identity());
        assert_eq!(at_e, vec![QlsPath::straight(wg.identity())]);
        let at_s = qls_filter_winf(&par, &full, &set, wg.simple(0));
        assert_eq!(at_s.len(), 2, "EQB(s_1) is all of W");

        // The filter at the longest coset representative keeps everything.
        let (_wg, par, full, lambda) = setup(Series::B, 2, &[1, 0]);
        let set = qls_enumerate(&par, &lambda);
        let wj = par.weyl().min_rep(par.weyl().longest(), par.j());
        let all = qls_filter_winf(&par, &full, &set, wj);
        assert_eq!(all.len(), set.len());
        // And it is never empty: w itself is reachable.
        for &w in par.vertices() {
            let sub = qls_filter_winf(&par, &full, &set, w);
            assert!(sub.iter().any(|eta| kappa(eta) == w));
        }
    }

    #[test]
    fn root_operators_on_the_fundamental_string() {
        let (wg, par, _full, lambda) = setup(Series::A, 1, &[1]);
        let pi = SlsPath::initial(1);
        assert_eq!(sls_root_e(&wg, &lambda, &pi, 1), None, "highest weight");
        let f1 = sls_root_f(&wg, &lambda, &pi, 1).unwrap();
        assert_eq!(f1, SlsPath::straight(AffineElt::finite(wg.simple(0), 1)));
        assert_eq!(sls_root_f(&wg, &lambda, &f1, 1), None, "string length 1");
        let back = sls_root_e(&wg, &lambda, &f1, 1).unwrap();
        assert_eq!(back, pi);
        assert_eq!(sls_validate(&par, &lambda, &f1, None), SlsValidity::Valid);

        // f_0 on (s_1; 0, 1): full reflection to the translated direction.
        let f0 = sls_root_f(&wg, &lambda, &f1, 0).unwrap();
        assert_eq!(
            f0,
            SlsPath::straight(AffineElt::translation(Coroot(vec![1])))
        );
        // Weight shift by -alpha_0 = theta - delta.
        assert_eq!(sls_wt(&wg, &lambda, &f1), (Weight(vec![-1]), 0));
        assert_eq!(sls_wt(&wg, &lambda, &f0), (Weight(vec![1]), -1));
    }

    /// Both drop rules fire at once on the middle of the 2-string.
    #[test]
    fn root_operators_drop_rules() {
        let (wg, par, _full, lambda) = setup(Series::A, 1, &[2]);
        let pi = SlsPath::initial(1);
        let f1 = sls_root_f(&wg, &lambda, &pi, 1).unwrap();
        let s1 = AffineElt::finite(wg.simple(0), 1);
        assert_eq!(
            f1,
            SlsPath {
                dirs: vec![s1.clone(), AffineElt::identity(1)],
                times: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            }
        );
        assert_eq!(sls_validate(&par, &lambda, &f1, None), SlsValidity::Valid);
        let f2 = sls_root_f(&wg, &lambda, &f1, 1).unwrap();
        assert_eq!(f2, SlsPath::straight(s1.clone()), "both drops applied");
        assert_eq!(sls_root_f(&wg, &lambda, &f2, 1), None);
        // e_1 walks back up the string.
        let e1 = sls_root_e(&wg, &lambda, &f2, 1).unwrap();
        assert_eq!(e1, f1);
        assert_eq!(sls_root_e(&wg, &lambda, &e1, 1).unwrap(), pi);

        // f_0 after the string: lands on a genuinely affine two-step path,
        // whose projection is a quantum LS path from the enumeration.
        let f0 = sls_root_f(&wg, &lambda, &f2, 0).unwrap();
        assert_eq!(
            f0,
            SlsPath {
                dirs: vec![AffineElt::translation(Coroot(vec![1])), s1],
                times: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            }
        );
        assert_eq!(sls_validate(&par, &lambda, &f0, None), SlsValidity::Valid);
        let eta = sls_cl(&par, &lambda, &f0);
        let set = qls_enumerate(&par, &lambda);
        assert!(set.contains(&eta));
        assert_eq!(eta.text(&wg), "(e, s1; 0, 1/2, 1)");
    }

    #[test]
    fn cl_is_identity_on_finite_directions() {
        let (wg, par, _full, lambda) = setup(Series::A, 2, &[1, 1]);
        let pi = SlsPath::initial(2);
        assert_eq!(
            sls_cl(&par, &lambda, &pi),
            QlsPath::straight(wg.identity())
        );
        // A translated single direction projects to its classical part.
        let xi = Coroot(vec![1, 1]);
        let x = affine::mul(
            &wg,
            &AffineElt::finite(wg.simple(0), 2),
            &affine::pi_j(&wg, par.j(), &AffineElt::translation(xi)),
        );
        let eta = sls_cl(&par, &lambda, &SlsPath::straight(x));
        assert_eq!(eta, QlsPath::straight(wg.simple(0)));
    }

    #[test]
    fn translated_direction_weight() {
        let (wg, par, _full, lambda) = setup(Series::A, 2, &[1, 0]);
        let xi = Coroot(vec![1, 1]);
        let x = affine::pi_j(&wg, par.j(), &AffineElt::translation(xi.clone()));
        let (fin, d) = sls_wt(&wg, &lambda, &SlsPath::straight(x));
        assert_eq!(fin, lambda);
        assert_eq!(d, -wg.root_system().pair(&lambda, &xi));
    }

    #[test]
    fn invalid_paths_are_rejected() {
        let (wg, par, _full, lambda) = setup(Series::A, 1, &[1]);
        // Not a decreasing chain: e is below s_1.
        let bad = SlsPath {
            dirs: vec![AffineElt::identity(1), AffineElt::finite(wg.simple(0), 1)],
            times: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        };
        assert_eq!(sls_validate(&par, &lambda, &bad, None), SlsValidity::Invalid);
        // Decreasing chain, but the break denominator admits no edges:
        // a = 1/3 with <lambda, alpha^vee> = 1.
        let bad = SlsPath {
            dirs: vec![AffineElt::finite(wg.simple(0), 1), AffineElt::identity(1)],
            times: vec![rat(0, 1), rat(1, 3), rat(1, 1)],
        };
        assert_eq!(sls_validate(&par, &lambda, &bad, None), SlsValidity::Invalid);
        // Same chain at a = 1/2 with lambda doubled: valid.
        let (_, par2, _full2, lambda2) = setup(Series::A, 1, &[2]);
        let good = SlsPath {
            dirs: vec![AffineElt::finite(wg.simple(0), 1), AffineElt::identity(1)],
            times: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        };
        assert_eq!(
            sls_validate(&par2, &lambda2, &good, None),
            SlsValidity::Valid
        );
        // Malformed time data.
        let bad = SlsPath {
            dirs: vec![AffineElt::identity(1)],
            times: vec![rat(0, 1), rat(1, 2)],
        };
        assert_eq!(sls_validate(&par, &lambda, &bad, None), SlsValidity::Invalid);
    }

    /// Crystal axioms on a generated patch of the path crystal.
    #[test]
    fn crystal_axioms_on_generated_patch() {
        for (series, rank, lam) in [
            (Series::A, 1, vec![1]),
            (Series::A, 1, vec![2]),
            (Series::A, 2, vec![1, 0]),
            (Series::A, 2, vec![1, 1]),
            (Series::C, 2, vec![0, 1]),
        ] {
            let (wg, par, _full, lambda) = setup(series, rank, &lam);
            let rs = wg.root_system();
            let mut layer = vec![SlsPath::initial(rank)];
            let mut seen: HashSet<SlsPath> = layer.iter().cloned().collect();
            for _depth in 0..4 {
                let mut next = Vec::new();
                for pi in &layer {
                    for i in 0..=rank {
                        // String axiom: phi - eps = <wt, alpha_i^vee>.
                        let (nu, _) = sls_wt(&wg, &lambda, pi);
                        let pairing = if i == 0 {
                            -rs.pair(&nu, rs.theta_coroot())
                        } else {
                            rs.pair(&nu, rs.simple_coroot(i - 1))
                        };
                        assert_eq!(
                            phi(&wg, &lambda, pi, i) - eps(&wg, &lambda, pi, i),
                            pairing
                        );
                        for (op, inv, delta) in [(true, false, 1i64), (false, true, -1i64)] {
                            let image = if op {
                                sls_root_f(&wg, &lambda, pi, i)
                            } else {
                                sls_root_e(&wg, &lambda, pi, i)
                            };
                            let Some(image) = image else { continue };
                            // Inverse property.
                            let back = if inv {
                                sls_root_f(&wg, &lambda, &image, i)
                            } else {
                                sls_root_e(&wg, &lambda, &image, i)
                            };
                            assert_eq!(back.as_ref(), Some(pi), "e/f inverse");
                            // Weight shift by -alpha_i (delta-aware at 0).
                            let (nu2, d2) = sls_wt(&wg, &lambda, &image);
                            let (nu1, d1) = sls_wt(&wg, &lambda, pi);
                            if i == 0 {
                                let theta = rs.root_to_weight(rs.theta());
                                assert_eq!(nu2, nu1.add(&theta.scale(delta)));
                                assert_eq!(d2, d1 - delta);
                            } else {
                                let alpha = rs.root_to_weight(rs.simple_root(i - 1));
                                assert_eq!(nu2, nu1.sub(&alpha.scale(delta)));
                                assert_eq!(d2, d1);
                            }
                            // Closure: images remain valid paths.
                            assert_eq!(
                                sls_validate(&par, &lambda, &image, None),
                                SlsValidity::Valid,
                                "image of {} under {} {}",
                                pi.text(&wg),
                                if op { "f" } else { "e" },
                                i
                            );
                            // Projection lands in the enumerated set.
                            let eta = sls_cl(&par, &lambda, &image);
                            assert!(qls_validate(&par, &lambda, &eta));
                            if seen.insert(image.clone()) {
                                next.push(image);
                            }
                        }
                        // eps counts exactly the raising applications.
                        let n = eps(&wg, &lambda, pi, i);
                        let mut cur = pi.clone();
                        for _ in 0..n {
                            cur = sls_root_e(&wg, &lambda, &cur, i).expect("eps counts e_i");
                        }
                        assert_eq!(sls_root_e(&wg, &lambda, &cur, i), None);
                    }
                }
                layer = next;
            }
        }
    }

    #[test]
    fn weyl_action_on_paths() {
        let (wg, _par, _full, lambda) = setup(Series::A, 1, &[1]);
        let pi = SlsPath::initial(1);
        let moved = weyl_act_sls(&wg, &lambda, 1, &pi);
        assert_eq!(
            moved,
            SlsPath::straight(AffineElt::finite(wg.simple(0), 1))
        );
        assert_eq!(weyl_act_sls(&wg, &lambda, 1, &moved), pi, "involution");

        let (wg, _par, _full, lambda) = setup(Series::A, 2, &[1, 1]);
        let pi = SlsPath::initial(2);
        for i in 0..=2 {
            let once = weyl_act_sls(&wg, &lambda, i, &pi);
            assert_eq!(weyl_act_sls(&wg, &lambda, i, &once), pi, "s_{i} squared");
        }
    }

    #[test]
    fn degree_consistency_across_final_directions() {
        for (series, rank, lam) in [
            (Series::A, 2, vec![1, 1]),
            (Series::A, 2, vec![2, 0]),
            (Series::B, 2, vec![1, 0]),
            (Series::B, 2, vec![1, 1]),
        ] {
            let (_wg, par, _full, lambda) = setup(series, rank, &lam);
            let rs = par.weyl().root_system();
            let set = qls_enumerate(&par, &lambda);
            for eta in &set {
                let base = deg(&par, eta, &lambda);
                for &w in par.vertices() {
                    let shift = rs.pair(&lambda, &par.weight_between(w, kappa(eta)));
                    assert_eq!(deg_at(&par, eta, w, &lambda), base - shift);
                }
            }
        }
    }

    #[test]
    fn qls_weight_is_lambda_modulo_root_lattice() {
        let (wg, par, _full, lambda) = setup(Series::B, 2, &[1, 1]);
        let rs = wg.root_system();
        for eta in qls_enumerate(&par, &lambda) {
            let diff = qls_wt(&wg, &eta, &lambda).sub(&lambda);
            // Solve C x = diff exactly over the rationals.
            let n = rs.rank();
            let mut m: Vec<Vec<Rat>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|k| Rat::from_integer(rs.cartan(i, k)))
                        .chain([Rat::from_integer(diff.coords()[i])])
                        .collect()
                })
                .collect();
            for c in 0..n {
                let pivot = (c..n).find(|&r| !m[r][c].is_zero()).expect("invertible");
                m.swap(c, pivot);
                let inv = m[c][c];
                for k in c..=n {
                    m[c][k] /= inv;
                }
                for r in 0..n {
                    if r != c && !m[r][c].is_zero() {
                        let f = m[r][c];
                        for k in c..=n {
                            let sub = f * m[c][k];
                            m[r][k] -= sub;
                        }
                    }
                }
            }
            for r in 0..n {
                assert!(m[r][n].is_integer(), "wt - lambda lies in Q");
            }
        }
    }

    #[test]
    fn json_rendering() {
        let (wg, _par, _full, _lambda) = setup(Series::A, 1, &[2]);
        let eta = QlsPath {
            dirs: vec![wg.simple(0), wg.identity()],
            times: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        };
        assert_eq!(
            eta.to_json(&wg),
            json!({"dirs": ["s1", "e"], "times": ["0", "1/2", "1"]})
        );
    }
}
