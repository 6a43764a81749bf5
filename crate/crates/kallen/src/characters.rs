//! Graded characters and Demazure-operator recursions.
//!
//! - [`GroupAlgebraElt`]: sparse integer polynomials in `e^mu` (weights in
//!   fundamental coordinates) and `q = e^delta` with integer exponents —
//!   the ring housing `E_{w lambda}(q, infinity)` and graded-character
//!   numerators.
//! - [`GradedChar`]: a numerator together with a denominator multiset
//!   `{r}` meaning `prod 1/(1 - q^{-r})`; equality by cross-multiplication.
//! - Demazure operators `D_i` (idempotent) and `T_i = D_i - 1`.
//! - [`macdonald_E_inf`]: the specialized nonsymmetric Macdonald
//!   polynomial `E_{w lambda}(q, infinity)` by two independent routes —
//!   the quantum LS path sum, and the Demazure recursion descending from
//!   the antidominant chamber with exact division in the simple-root
//!   branch.
//! - Graded characters of the level-zero van der Kallen modules `K_w`,
//!   their quotients, and the Demazure submodules `V_w`, plus a
//!   direct-sum evaluation over partition tuples and an
//!   identity-verification suite.

use crate::cartan::{Root, RootSystem, Weight, WeylElt, WeylGroup};
use crate::paths;
use crate::qbg::Qbg;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

/// A finite integer combination of monomials `e^mu q^k`, stored
/// canonically (no zero coefficients). Weights are fundamental-coordinate
/// vectors of a fixed rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebraElt {
    rank: usize,
    terms: BTreeMap<(i64, Vec<i64>), i64>,
}

impl GroupAlgebraElt {
    pub fn zero(rank: usize) -> GroupAlgebraElt {
        GroupAlgebraElt {
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// The single term `coeff * e^weight q^q_exp`.
    pub fn monomial(weight: &Weight, q_exp: i64, coeff: i64) -> GroupAlgebraElt {
        let mut out = GroupAlgebraElt::zero(weight.coords().len());
        out.add_term(q_exp, weight.coords().to_vec(), coeff);
        out
    }

    /// The multiplicative unit `e^0 q^0`.
    pub fn unit(rank: usize) -> GroupAlgebraElt {
        GroupAlgebraElt::monomial(&Weight(vec![0; rank]), 0, 1)
    }

    fn add_term(&mut self, q_exp: i64, weight: Vec<i64>, coeff: i64) {
        debug_assert_eq!(weight.len(), self.rank);
        if coeff == 0 {
            return;
        }
        match self.terms.entry((q_exp, weight)) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `e^weight q^q_exp`.
    pub fn coeff(&self, weight: &Weight, q_exp: i64) -> i64 {
        *self
            .terms
            .get(&(q_exp, weight.coords().to_vec()))
            .unwrap_or(&0)
    }

    /// Largest q-exponent present.
    pub fn max_q(&self) -> Option<i64> {
        self.terms.keys().next_back().map(|(k, _)| *k)
    }

    pub fn add(&self, other: &GroupAlgebraElt) -> GroupAlgebraElt {
        assert_eq!(self.rank, other.rank);
        let mut out = self.clone();
        for ((k, mu), &c) in &other.terms {
            out.add_term(*k, mu.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> GroupAlgebraElt {
        self.scale(-1)
    }

    pub fn sub(&self, other: &GroupAlgebraElt) -> GroupAlgebraElt {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: i64) -> GroupAlgebraElt {
        let mut out = GroupAlgebraElt::zero(self.rank);
        if c == 0 {
            return out;
        }
        for ((k, mu), &a) in &self.terms {
            out.terms.insert((*k, mu.clone()), a * c);
        }
        out
    }

    pub fn mul(&self, other: &GroupAlgebraElt) -> GroupAlgebraElt {
        assert_eq!(self.rank, other.rank);
        let mut out = GroupAlgebraElt::zero(self.rank);
        for ((k1, mu1), &c1) in &self.terms {
            for ((k2, mu2), &c2) in &other.terms {
                let mu: Vec<i64> = mu1.iter().zip(mu2).map(|(a, b)| a + b).collect();
                out.add_term(k1 + k2, mu, c1 * c2);
            }
        }
        out
    }

    /// Drop all terms with q-exponent below `floor`.
    pub fn truncate_below(&self, floor: i64) -> GroupAlgebraElt {
        let mut out = GroupAlgebraElt::zero(self.rank);
        for ((k, mu), &c) in &self.terms {
            if *k >= floor {
                out.terms.insert((*k, mu.clone()), c);
            }
        }
        out
    }

    /// Terms as `(q_exp, weight coords, coeff)` in canonical display
    /// order: q descending, then weight lexicographic.
    pub fn terms_sorted(&self) -> Vec<(i64, Vec<i64>, i64)> {
        let mut v: Vec<(i64, Vec<i64>, i64)> = self
            .terms
            .iter()
            .map(|((k, mu), &c)| (*k, mu.clone(), c))
            .collect();
        v.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .terms_sorted()
            .iter()
            .map(|(k, mu, c)| json!({"weight": mu, "q": k, "coeff": c}))
            .collect::<Vec<_>>())
    }

    /// Human-readable rendering, e.g. `e[1, 0] - 2 q^-1 e[0, 1]`.
    pub fn text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, (k, mu, c)) in self.terms_sorted().into_iter().enumerate() {
            let mag = c.abs();
            if n == 0 {
                if c < 0 {
                    out.push_str("-");
                }
            } else if c < 0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if mag != 1 {
                out.push_str(&format!("{} ", mag));
            }
            if k != 0 {
                out.push_str(&format!("q^{} ", k));
            }
            out.push_str(&format!("e{:?}", mu));
        }
        out
    }
}

/// Exact division by `1 - q^c` with `c < 0`; panics if the division is
/// inexact. Weight-free factor, so each weight's q-polynomial divides
/// independently (synthetic division from the top exponent).
fn div_one_minus_q(f: &GroupAlgebraElt, c: i64) -> GroupAlgebraElt {
    assert!(c < 0, "divisor must be 1 - q^c with c < 0");
    let d = -c;
    let mut per_weight: BTreeMap<&Vec<i64>, BTreeMap<i64, i64>> = BTreeMap::new();
    for ((k, mu), &a) in &f.terms {
        per_weight.entry(mu).or_default().insert(*k, a);
    }
    let mut out = GroupAlgebraElt::zero(f.rank);
    for (mu, coeffs) in per_weight {
        let hi = *coeffs.keys().next_back().unwrap();
        let lo = *coeffs.keys().next().unwrap();
        let span = hi - lo;
        let mut g: Vec<i64> = Vec::with_capacity(span as usize + 1);
        for t in 0..=span {
            let b = *coeffs.get(&(hi - t)).unwrap_or(&0);
            let carried = if t >= d { g[(t - d) as usize] } else { 0 };
            g.push(b + carried);
        }
        for t in (span - d + 1).max(0)..=span {
            assert_eq!(
                g[t as usize], 0,
                "inexact division of {} by 1 - q^{}",
                f.text(),
                c
            );
        }
        for t in 0..=span - d {
            if g[t as usize] != 0 {
                out.terms.insert((hi - t, mu.clone()), g[t as usize]);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// Demazure operators
// ---------------------------------------------------------------------

/// The idempotent Demazure operator `D_i`, termwise by the pairing
/// `n = <nu, alpha_i^vee>`:
/// `sum_{t=0}^{-n} e^{nu + t alpha_i}` for `n <= 0`; `0` for `n = 1`;
/// `-sum_{t=1}^{n-1} e^{nu - t alpha_i}` for `n >= 2`. The q-exponents
/// pass through untouched.
#[allow(non_snake_case)]
pub fn demazure_D(rs: &RootSystem, i: usize, f: &GroupAlgebraElt) -> GroupAlgebraElt {
    let alpha = rs.root_to_weight(rs.simple_root(i));
    let mut out = GroupAlgebraElt::zero(f.rank);
    for ((k, mu), &c) in &f.terms {
        let nu = Weight(mu.clone());
        let n = rs.pair(&nu, rs.simple_coroot(i));
        if n <= 0 {
            for t in 0..=-n {
                out.add_term(*k, nu.add(&alpha.scale(t)).0, c);
            }
        } else if n >= 2 {
            for t in 1..=n - 1 {
                out.add_term(*k, nu.sub(&alpha.scale(t)).0, -c);
            }
        }
    }
    out
}

/// `T_i = D_i - 1`.
#[allow(non_snake_case)]
pub fn demazure_T(rs: &RootSystem, i: usize, f: &GroupAlgebraElt) -> GroupAlgebraElt {
    demazure_D(rs, i, f).sub(f)
}

// ---------------------------------------------------------------------
// Graded characters
// ---------------------------------------------------------------------

/// A graded character `num * prod_{r in denom} 1/(1 - q^{-r})`. No
/// canonical form; equality is decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct GradedChar {
    pub num: GroupAlgebraElt,
    pub denom: Vec<i64>,
}

/// `prod_{r in denom} (1 - q^{-r})` as a polynomial.
fn denom_poly(rank: usize, denom: &[i64]) -> GroupAlgebraElt {
    let zero_wt = Weight(vec![0; rank]);
    let mut out = GroupAlgebraElt::unit(rank);
    for &r in denom {
        assert!(r > 0, "denominator exponents are positive");
        let factor =
            GroupAlgebraElt::unit(rank).sub(&GroupAlgebraElt::monomial(&zero_wt, -r, 1));
        out = out.mul(&factor);
    }
    out
}

impl GradedChar {
    pub fn new(num: GroupAlgebraElt, mut denom: Vec<i64>) -> GradedChar {
        denom.sort_unstable();
        GradedChar { num, denom }
    }

    pub fn zero(rank: usize) -> GradedChar {
        GradedChar::new(GroupAlgebraElt::zero(rank), vec![])
    }

    pub fn add(&self, other: &GradedChar) -> GradedChar {
        let rank = self.num.rank();
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for &r in &self.denom {
            *counts.entry(r).or_insert(0) += 1;
        }
        for &r in &other.denom {
            let own = self.denom.iter().filter(|&&x| x == r).count();
            let theirs = other.denom.iter().filter(|&&x| x == r).count();
            counts.insert(r, own.max(theirs));
        }
        let union: Vec<i64> = counts
            .iter()
            .flat_map(|(&r, &m)| std::iter::repeat(r).take(m))
            .collect();
        let extra_self = multiset_diff(&union, &self.denom);
        let extra_other = multiset_diff(&union, &other.denom);
        let num = self
            .num
            .mul(&denom_poly(rank, &extra_self))
            .add(&other.num.mul(&denom_poly(rank, &extra_other)));
        GradedChar::new(num, union)
    }

    pub fn sub(&self, other: &GradedChar) -> GradedChar {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> GradedChar {
        GradedChar::new(self.num.scale(c), self.denom.clone())
    }

    /// Apply `T_i` to the numerator; the denominator, being q-only, is
    /// transparent to the operator.
    pub fn apply_t(&self, rs: &RootSystem, i: usize) -> GradedChar {
        GradedChar::new(demazure_T(rs, i, &self.num), self.denom.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"terms": self.num.to_json(), "denom": self.denom})
    }

    pub fn text(&self) -> String {
        if self.denom.is_empty() {
            self.num.text()
        } else {
            let dens: Vec<String> = self
                .denom
                .iter()
                .map(|r| format!("(1 - q^-{})", r))
                .collect();
            format!("({}) / {}", self.num.text(), dens.join(""))
        }
    }
}

fn multiset_diff(big: &[i64], small: &[i64]) -> Vec<i64> {
    let mut out = big.to_vec();
    for &r in small {
        let pos = out.iter().position(|&x| x == r).expect("multiset inclusion");
        out.remove(pos);
    }
    out
}

impl PartialEq for GradedChar {
    fn eq(&self, other: &GradedChar) -> bool {
        let rank = self.num.rank();
        self.num.mul(&denom_poly(rank, &other.denom))
            == other.num.mul(&denom_poly(rank, &self.denom))
    }
}

/// Geometric expansion of the denominator, keeping q-exponents `>= -n`.
pub fn expand_truncated(g: &GradedChar, n: i64) -> GroupAlgebraElt {
    assert!(n >= 0);
    let mut cur = g.num.truncate_below(-n);
    for &r in &g.denom {
        let head = cur.max_q().unwrap_or(0).max(0);
        let zero_wt = Weight(vec![0; cur.rank()]);
        let mut geom = GroupAlgebraElt::zero(cur.rank());
        let mut t = 0;
        while r * t <= n + head {
            geom = geom.add(&GroupAlgebraElt::monomial(&zero_wt, -r * t, 1));
            t += 1;
        }
        cur = cur.mul(&geom).truncate_below(-n);
    }
    cur
}

// ---------------------------------------------------------------------
// Macdonald polynomials at t = infinity and graded characters
// ---------------------------------------------------------------------

/// Algorithm choice for [`macdonald_E_inf`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EMethod {
    /// Sum over quantum LS paths with final direction in `floor(EQB(ceil(w)))`.
    Qls,
    /// Demazure recursion from the antidominant extreme `floor(w_o)`.
    Recursion,
}

impl EMethod {
    pub fn parse(s: &str) -> Option<EMethod> {
        match s {
            "qls" => Some(EMethod::Qls),
            "recursion" | "rec" => Some(EMethod::Recursion),
            _ => None,
        }
    }
}

/// `E_{w lambda}(q, infinity)` for dominant `lambda` and `w in W^J`.
#[allow(non_snake_case)]
pub fn macdonald_E_inf(
    par: &Qbg,
    full: &Qbg,
    lambda: &Weight,
    w: WeylElt,
    method: EMethod,
) -> GroupAlgebraElt {
    match method {
        EMethod::Qls => e_by_qls(par, full, lambda, w),
        EMethod::Recursion => e_by_recursion(par, full, lambda, w, true),
    }
}

fn e_by_qls(par: &Qbg, full: &Qbg, lambda: &Weight, w: WeylElt) -> GroupAlgebraElt {
    let wg = par.weyl();
    let set = paths::qls_enumerate(par, lambda);
    let kept = paths::qls_filter_winf(par, full, &set, w);
    let mut out = GroupAlgebraElt::zero(wg.rank());
    for eta in &kept {
        let wt = paths::qls_wt(wg, eta, lambda);
        let deg = paths::deg_at(par, eta, w, lambda);
        out = out.add(&GroupAlgebraElt::monomial(&wt, deg, 1));
    }
    out
}

/// Ascend from `w` to `floor(w_o)` along simple reflections increasing
/// `w lambda` toward the antidominant chamber, then unwind using
/// `T_i E_{v lambda} = E_{s_i v lambda}` — with an exact division by
/// `1 - q^{<lambda, ceil(v)^{-1} alpha_i^vee>}` when `-ceil(v)^{-1} alpha_i`
/// is a simple root. `smallest` fixes which admissible `i` is taken.
fn e_by_recursion(
    par: &Qbg,
    full: &Qbg,
    lambda: &Weight,
    w: WeylElt,
    smallest: bool,
) -> GroupAlgebraElt {
    let wg = par.weyl();
    let rs = wg.root_system();
    let j = par.j();
    assert!(wg.is_min_rep(w, j), "w must lie in W^J");
    let bottom = wg.min_rep(wg.longest(), j);
    if w == bottom {
        return e_by_qls(par, full, lambda, w);
    }
    let moved = wg.act_weight(w, lambda);
    let candidates: Vec<usize> = (0..wg.rank())
        .filter(|&i| rs.pair(&moved, rs.simple_coroot(i)) > 0)
        .collect();
    let i = if smallest {
        *candidates.first().expect("w below floor(w_o) has an ascent")
    } else {
        *candidates.last().expect("w below floor(w_o) has an ascent")
    };
    let up = wg.left_mul_simple(i, w);
    debug_assert!(wg.is_min_rep(up, j) && wg.length(up) > wg.length(w));
    let e_up = e_by_recursion(par, full, lambda, up, smallest);
    let t_applied = demazure_T(rs, i, &e_up);
    let ceil_inv = wg.inv(wg.max_rep(up, j));
    let gamma = wg.act_root(ceil_inv, rs.simple_root(i));
    let exponent = rs.pair(lambda, &wg.act_coroot(ceil_inv, rs.simple_coroot(i)));
    debug_assert_eq!(
        exponent,
        -rs.pair(&moved, rs.simple_coroot(i)),
        "the division exponent equals <s_i w lambda, alpha_i^vee>"
    );
    if is_negative_of_simple(&gamma) {
        div_one_minus_q(&t_applied, exponent)
    } else {
        t_applied
    }
}

/// Whether `-gamma` is a simple root, for `gamma` a negative root.
fn is_negative_of_simple(gamma: &Root) -> bool {
    gamma.coords().iter().sum::<i64>() == -1
}

/// `eps_i = 1` iff `ceil(w) s_i > ceil(w)`; zero is forced for `i in J`.
pub fn eps_vector(wg: &WeylGroup, j: &[usize], w: WeylElt) -> Vec<i64> {
    assert!(wg.is_min_rep(w, j), "w must lie in W^J");
    let ceil = wg.max_rep(w, j);
    let eps: Vec<i64> = (0..wg.rank())
        .map(|i| i64::from(wg.is_right_ascent(ceil, i)))
        .collect();
    debug_assert!(j.iter().all(|&i| eps[i] == 0));
    eps
}

/// The multiset `{ r : 1 <= r <= <lambda, alpha_i^vee> - eps_i, i in I }`.
pub fn c_denominator(wg: &WeylGroup, j: &[usize], lambda: &Weight, w: WeylElt) -> Vec<i64> {
    let rs = wg.root_system();
    let eps = eps_vector(wg, j, w);
    let mut denom = Vec::new();
    for i in 0..wg.rank() {
        let top = rs.pair(lambda, rs.simple_coroot(i)) - eps[i];
        for r in 1..=top {
            denom.push(r);
        }
    }
    denom.sort_unstable();
    denom
}

/// Graded character of the level-zero van der Kallen module:
/// `(prod_i prod_{r=1}^{<lambda,alpha_i^vee> - eps_i} (1 - q^{-r}))^{-1}
///  E_{w lambda}(q, infinity)`.
#[allow(non_snake_case)]
pub fn gch_K(par: &Qbg, full: &Qbg, lambda: &Weight, w: WeylElt) -> GradedChar {
    let wg = par.weyl();
    GradedChar::new(
        macdonald_E_inf(par, full, lambda, w, EMethod::Qls),
        c_denominator(wg, par.j(), lambda, w),
    )
}

/// Graded character of the quotient module: `E_{w lambda}(q, infinity)`
/// itself.
#[allow(non_snake_case)]
pub fn gch_Kbar(par: &Qbg, full: &Qbg, lambda: &Weight, w: WeylElt) -> GroupAlgebraElt {
    macdonald_E_inf(par, full, lambda, w, EMethod::Qls)
}

/// Graded character of the level-zero Demazure module:
/// `sum over v in W^J with v >= w of gch_K(v)`.
#[allow(non_snake_case)]
pub fn gch_V(par: &Qbg, full: &Qbg, lambda: &Weight, w: WeylElt) -> GradedChar {
    let wg = par.weyl();
    assert!(wg.is_min_rep(w, par.j()), "w must lie in W^J");
    let mut out: Option<GradedChar> = None;
    for &v in par.vertices() {
        if wg.bruhat_leq(w, v) {
            let term = gch_K(par, full, lambda, v);
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term),
            });
        }
    }
    out.expect("w itself contributes")
}

/// All partitions with at most `len_bound` parts and size at most
/// `size_bound`, as weakly decreasing part lists (the empty partition
/// included).
fn partitions_up_to(len_bound: i64, size_bound: i64) -> Vec<Vec<i64>> {
    fn rec(
        cur: &mut Vec<i64>,
        max_part: i64,
        len_left: i64,
        size_left: i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        if len_left == 0 {
            return;
        }
        for part in 1..=max_part.min(size_left) {
            cur.push(part);
            out.push(cur.clone());
            rec(cur, part, len_left - 1, size_left - part, out);
            cur.pop();
        }
    }
    let mut out = vec![vec![]];
    let mut cur = Vec::new();
    rec(&mut cur, size_bound, len_bound, size_bound, &mut out);
    out
}

/// Direct truncated evaluation of `gch K_w(lambda)`: a sum over quantum
/// LS paths with final direction constrained by `w`, times `I`-tuples of
/// partitions with at most `<lambda, alpha_i^vee> - eps_i` parts — the
/// explicit parametrization of the path model fibered over `cl`. Keeps
/// q-exponents `>= -n`.
#[allow(non_snake_case)]
pub fn gch_K_direct(
    par: &Qbg,
    full: &Qbg,
    lambda: &Weight,
    w: WeylElt,
    n: i64,
) -> GroupAlgebraElt {
    assert!(n >= 0);
    let wg = par.weyl();
    let rs = wg.root_system();
    let eps = eps_vector(wg, par.j(), w);
    // Count tuples by total size: literally enumerate the partitions per
    // node, then convolve the size counts across I.
    let mut tuple_counts = vec![0i64; n as usize + 1];
    tuple_counts[0] = 1;
    for i in 0..wg.rank() {
        let bound = rs.pair(lambda, rs.simple_coroot(i)) - eps[i];
        let mut counts = vec![0i64; n as usize + 1];
        for part in partitions_up_to(bound, n) {
            counts[part.iter().sum::<i64>() as usize] += 1;
        }
        let mut next = vec![0i64; n as usize + 1];
        for (s, &a) in tuple_counts.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (t, &b) in counts.iter().enumerate() {
                if s + t <= n as usize {
                    next[s + t] += a * b;
                }
            }
        }
        tuple_counts = next;
    }
    let set = paths::qls_enumerate(par, lambda);
    let kept = paths::qls_filter_winf(par, full, &set, w);
    let mut out = GroupAlgebraElt::zero(wg.rank());
    for eta in &kept {
        let wt = paths::qls_wt(wg, eta, lambda);
        let deg = paths::deg_at(par, eta, w, lambda);
        for (t, &count) in tuple_counts.iter().enumerate() {
            let q_exp = deg - t as i64;
            if count != 0 && q_exp >= -n {
                out = out.add(&GroupAlgebraElt::monomial(&wt, q_exp, count));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------

/// Identities checkable by [`verify_identity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityName {
    /// `T_i gch V_w = gch V_{s_i w} - gch V_w` when `<w lambda, alpha_i^vee> < 0`, else `0`.
    Dem1,
    /// `T_i gch K_w` is `gch K_{s_i w}` / `-gch K_w` / `0` by the sign of the pairing.
    Rec1,
    /// `T_i E_{w lambda} = E_{s_i w lambda}` up to the simple-root factor.
    CoRecursion,
    /// `T_i F_w = F_{s_i w}` for the normalized character `F_w = c_w(q) E_{w lambda}`.
    LemmaF,
    /// Moebius inversion of the sum formula for `gch V_w`.
    Moebius,
    /// `D_i^2 = D_i` on random polynomials.
    DIdempotent,
    /// `T_i^2 = -T_i` and `T_i D_i = D_i T_i = 0` on random polynomials.
    TProperty,
}

impl IdentityName {
    pub fn parse(s: &str) -> Option<IdentityName> {
        match s {
            "dem1" => Some(IdentityName::Dem1),
            "rec1" => Some(IdentityName::Rec1),
            "co_recursion" => Some(IdentityName::CoRecursion),
            "lemma_F" | "lemma_f" => Some(IdentityName::LemmaF),
            "moebius" => Some(IdentityName::Moebius),
            "D_idempotent" | "d_idempotent" => Some(IdentityName::DIdempotent),
            "T_property" | "t_property" => Some(IdentityName::TProperty),
            _ => None,
        }
    }

    pub fn all() -> [IdentityName; 7] {
        [
            IdentityName::Dem1,
            IdentityName::Rec1,
            IdentityName::CoRecursion,
            IdentityName::LemmaF,
            IdentityName::Moebius,
            IdentityName::DIdempotent,
            IdentityName::TProperty,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            IdentityName::Dem1 => "dem1",
            IdentityName::Rec1 => "rec1",
            IdentityName::CoRecursion => "co_recursion",
            IdentityName::LemmaF => "lemma_F",
            IdentityName::Moebius => "moebius",
            IdentityName::DIdempotent => "D_idempotent",
            IdentityName::TProperty => "T_property",
        }
    }
}

/// A single failed comparison in an identity sweep.
#[derive(Clone, Debug)]
pub struct IdentityFailure {
    /// The swept case, e.g. `w=s1 s2 i=2`.
    pub case: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of an identity sweep: every case checked, failures described
/// with both compared values.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_poly(rank: usize, rng: &mut ChaCha8Rng) -> GroupAlgebraElt {
    let mut out = GroupAlgebraElt::zero(rank);
    let nterms = rng.gen_range(1..=5);
    for _ in 0..nterms {
        let k = rng.gen_range(-3..=0);
        let mu = Weight((0..rank).map(|_| rng.gen_range(-3..=3)).collect());
        let c = *[-3, -2, -1, 1, 2, 3]
            .get(rng.gen_range(0..6))
            .unwrap();
        out = out.add(&GroupAlgebraElt::monomial(&mu, k, c));
    }
    out
}

/// Sweep one named identity over all applicable `(w, i)` for the given
/// shape `lambda` (operator laws use `seed`-driven random polynomials
/// instead).
pub fn verify_identity(
    name: IdentityName,
    par: &Qbg,
    full: &Qbg,
    lambda: &Weight,
    seed: u64,
) -> IdentityReport {
    let wg = par.weyl();
    let rs = wg.root_system();
    let mut cases = 0;
    let mut failures = Vec::new();

    // Per-vertex characters, computed once per sweep.
    let k_all = || -> Vec<GradedChar> {
        par.vertices()
            .iter()
            .map(|&v| gch_K(par, full, lambda, v))
            .collect()
    };
    let v_all = |ks: &[GradedChar]| -> Vec<GradedChar> {
        par.vertices()
            .iter()
            .map(|&w| {
                let mut acc: Option<GradedChar> = None;
                for (pos, &v) in par.vertices().iter().enumerate() {
                    if wg.bruhat_leq(w, v) {
                        acc = Some(match acc {
                            None => ks[pos].clone(),
                            Some(a) => a.add(&ks[pos]),
                        });
                    }
                }
                acc.expect("w itself contributes")
            })
            .collect()
    };

    match name {
        IdentityName::Dem1 => {
            let vs = v_all(&k_all());
            for (wpos, &w) in par.vertices().iter().enumerate() {
                let v_w = &vs[wpos];
                for i in 0..wg.rank() {
                    cases += 1;
                    let lhs = v_w.apply_t(rs, i);
                    let pairing = rs.pair(&wg.act_weight(w, lambda), rs.simple_coroot(i));
                    let rhs = if pairing < 0 {
                        vs[par.vertex_pos(wg.left_mul_simple(i, w))].sub(v_w)
                    } else {
                        GradedChar::zero(wg.rank())
                    };
                    if lhs != rhs {
                        failures.push(IdentityFailure {
                            case: format!("w={} i={}", wg.word_string(w), i + 1),
                            lhs: lhs.text(),
                            rhs: rhs.text(),
                        });
                    }
                }
            }
        }
        IdentityName::Rec1 | IdentityName::LemmaF => {
            let ks = k_all();
            for (wpos, &w) in par.vertices().iter().enumerate() {
                let k_w = &ks[wpos];
                for i in 0..wg.rank() {
                    let pairing = rs.pair(&wg.act_weight(w, lambda), rs.simple_coroot(i));
                    if name == IdentityName::LemmaF && pairing >= 0 {
                        continue;
                    }
                    cases += 1;
                    let lhs = k_w.apply_t(rs, i);
                    let rhs = if pairing < 0 {
                        ks[par.vertex_pos(wg.left_mul_simple(i, w))].clone()
                    } else if pairing > 0 {
                        k_w.scale(-1)
                    } else {
                        GradedChar::zero(wg.rank())
                    };
                    if lhs != rhs {
                        failures.push(IdentityFailure {
                            case: format!("w={} i={}", wg.word_string(w), i + 1),
                            lhs: lhs.text(),
                            rhs: rhs.text(),
                        });
                    }
                }
            }
        }
        IdentityName::CoRecursion => {
            let es: Vec<GroupAlgebraElt> = par
                .vertices()
                .iter()
                .map(|&v| macdonald_E_inf(par, full, lambda, v, EMethod::Qls))
                .collect();
            for (wpos, &w) in par.vertices().iter().enumerate() {
                for i in 0..wg.rank() {
                    let pairing = rs.pair(&wg.act_weight(w, lambda), rs.simple_coroot(i));
                    if pairing >= 0 {
                        continue;
                    }
                    cases += 1;
                    let e_w = &es[wpos];
                    let up = wg.left_mul_simple(i, w);
                    let e_up = &es[par.vertex_pos(up)];
                    let lhs = demazure_T(rs, i, e_w);
                    let ceil_inv = wg.inv(wg.max_rep(w, par.j()));
                    let gamma = wg.act_root(ceil_inv, rs.simple_root(i));
                    let rhs = if is_negative_of_simple(&gamma) {
                        let exponent =
                            rs.pair(lambda, &wg.act_coroot(ceil_inv, rs.simple_coroot(i)));
                        let factor = GroupAlgebraElt::unit(wg.rank()).sub(
                            &GroupAlgebraElt::monomial(&Weight(vec![0; wg.rank()]), exponent, 1),
                        );
                        e_up.mul(&factor)
                    } else {
                        e_up.clone()
                    };
                    if lhs != rhs {
                        failures.push(IdentityFailure {
                            case: format!("w={} i={}", wg.word_string(w), i + 1),
                            lhs: lhs.text(),
                            rhs: rhs.text(),
                        });
                    }
                }
            }
        }
        IdentityName::Moebius => {
            let ks = k_all();
            let vs = v_all(&ks);
            for (wpos, &w) in par.vertices().iter().enumerate() {
                cases += 1;
                let lhs = &ks[wpos];
                let mut rhs = GradedChar::zero(wg.rank());
                for (vpos, &v) in par.vertices().iter().enumerate() {
                    if !wg.bruhat_leq(w, v) {
                        continue;
                    }
                    // The full Bruhat interval [w, v] must stay inside W^J.
                    let inside = wg.elements().all(|u| {
                        !(wg.bruhat_leq(w, u) && wg.bruhat_leq(u, v))
                            || wg.is_min_rep(u, par.j())
                    });
                    if !inside {
                        continue;
                    }
                    let sign = if (wg.length(v) - wg.length(w)) % 2 == 0 {
                        1
                    } else {
                        -1
                    };
                    rhs = rhs.add(&vs[vpos].scale(sign));
                }
                if *lhs != rhs {
                    failures.push(IdentityFailure {
                        case: format!("w={}", wg.word_string(w)),
                        lhs: lhs.text(),
                        rhs: rhs.text(),
                    });
                }
            }
        }
        IdentityName::DIdempotent | IdentityName::TProperty => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for trial in 0..50 {
                let f = random_poly(wg.rank(), &mut rng);
                for i in 0..wg.rank() {
                    cases += 1;
                    let case = |law: &str| format!("trial={} i={} law={}", trial, i + 1, law);
                    if name == IdentityName::DIdempotent {
                        let df = demazure_D(rs, i, &f);
                        let ddf = demazure_D(rs, i, &df);
                        if ddf != df {
                            failures.push(IdentityFailure {
                                case: case("D^2 = D"),
                                lhs: ddf.text(),
                                rhs: df.text(),
                            });
                        }
                    } else {
                        let tf = demazure_T(rs, i, &f);
                        let checks = [
                            ("T^2 = -T", demazure_T(rs, i, &tf), tf.neg()),
                            (
                                "T D = 0",
                                demazure_T(rs, i, &demazure_D(rs, i, &f)),
                                GroupAlgebraElt::zero(wg.rank()),
                            ),
                            (
                                "D T = 0",
                                demazure_D(rs, i, &tf),
                                GroupAlgebraElt::zero(wg.rank()),
                            ),
                        ];
                        for (law, lhs, rhs) in checks {
                            if lhs != rhs {
                                failures.push(IdentityFailure {
                                    case: case(law),
                                    lhs: lhs.text(),
                                    rhs: rhs.text(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    IdentityReport {
        name: name.label(),
        cases,
        failures,
    }
}
