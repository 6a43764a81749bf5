//! The affine Weyl group `W_af = W x Q^vee` and its level-zero parabolic
//! coset combinatorics.
//!
//! Elements are written `x = w t_xi` with `w` in the finite Weyl group and
//! `t_xi` the translation by a coroot-lattice element `xi`. Multiplication
//! follows `t_xi v = v t_{v^{-1} xi}`, so
//! `(w t_xi)(v t_zeta) = w v t_{v^{-1} xi + zeta}`.
//!
//! The module provides the semi-infinite length, the finiteness criterion
//! for membership in the set `(W^J)_af` of minimal coset representatives of
//! `W_af / (W_J)_af`, and the projection `pi_J` onto those representatives.

use crate::cartan::{Coroot, Root, Weight, WeylElt, WeylGroup};
use std::fmt::Write as _;

/// An affine Weyl group element `x = fin * t_trans`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElt {
    /// Finite part `w`.
    pub fin: WeylElt,
    /// Translation part `xi` in simple-coroot coordinates.
    pub trans: Coroot,
}

impl AffineElt {
    /// The identity `e t_0`.
    pub fn identity(rank: usize) -> AffineElt {
        AffineElt {
            fin: WeylElt(0),
            trans: Coroot::zero(rank),
        }
    }

    /// Pure translation `t_xi`.
    pub fn translation(xi: Coroot) -> AffineElt {
        AffineElt {
            fin: WeylElt(0),
            trans: xi,
        }
    }

    /// Finite element `w t_0`.
    pub fn finite(w: WeylElt, rank: usize) -> AffineElt {
        AffineElt {
            fin: w,
            trans: Coroot::zero(rank),
        }
    }

    /// Render as `"s1 s2 | (1, 0)"`.
    pub fn to_text(&self, wg: &WeylGroup) -> String {
        let mut s = wg.word_string(self.fin);
        let _ = write!(s, " | {}", self.trans);
        s
    }

    /// Parse `"s1 s2 | (1, 0)"` (the `| (...)` part may be omitted for a
    /// finite element).
    pub fn parse(wg: &WeylGroup, text: &str) -> Result<AffineElt, crate::cartan::CartanError> {
        let bad = |reason: &str| crate::cartan::CartanError::BadWord {
            word: text.to_string(),
            reason: reason.to_string(),
        };
        let (word_part, trans_part) = match text.split_once('|') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (text.trim(), None),
        };
        let fin = wg.parse_word(word_part)?;
        let trans = match trans_part {
            None => Coroot::zero(wg.rank()),
            Some(t) => {
                let inner = t
                    .trim()
                    .strip_prefix('(')
                    .and_then(|u| u.strip_suffix(')'))
                    .ok_or_else(|| bad("translation must look like (a, b)"))?;
                let coords: Result<Vec<i64>, _> =
                    inner.split(',').map(|c| c.trim().parse::<i64>()).collect();
                let coords = coords.map_err(|_| bad("translation coordinates must be integers"))?;
                if coords.len() != wg.rank() {
                    return Err(bad("translation coordinate count must equal the rank"));
                }
                Coroot(coords)
            }
        };
        Ok(AffineElt { fin, trans })
    }
}

/// Product `x * y` of affine elements:
/// `(w t_xi)(v t_zeta) = wv t_{v^{-1} xi + zeta}`.
pub fn mul(wg: &WeylGroup, x: &AffineElt, y: &AffineElt) -> AffineElt {
    AffineElt {
        fin: wg.mul(x.fin, y.fin),
        trans: wg.act_coroot(wg.inv(y.fin), &x.trans).add(&y.trans),
    }
}

/// Inverse `(w t_xi)^{-1} = w^{-1} t_{-w xi}`.
pub fn inv(wg: &WeylGroup, x: &AffineElt) -> AffineElt {
    AffineElt {
        fin: wg.inv(x.fin),
        trans: wg.act_coroot(x.fin, &x.trans).neg(),
    }
}

/// Semi-infinite length `sil(w t_xi) = l(w) + 2 <rho, xi>`.
///
/// Unlike the affine Coxeter length this is a group 1-cocycle in spirit:
/// it changes by exactly 1 under left multiplication by any affine simple
/// reflection and takes negative values (e.g. `sil(s_theta t_{-theta^vee})
/// = -1`).
pub fn sil(wg: &WeylGroup, x: &AffineElt) -> i64 {
    let rho = wg.root_system().rho();
    wg.length(x.fin) as i64 + 2 * wg.root_system().pair(&rho, &x.trans)
}

/// The affine reflection `s_{beta + n delta} = s_beta t_{n beta^vee}` in the
/// real affine root `beta + n delta` (`beta` any finite root).
pub fn affine_reflection(wg: &WeylGroup, beta: &Root, n: i64) -> AffineElt {
    let bv = wg.root_system().coroot_of(beta);
    AffineElt {
        fin: wg.reflection_of(beta),
        trans: bv.scale(n),
    }
}

/// The affine simple reflection with the 0-node convention: index `0` is
/// `s_0 = s_theta t_{-theta^vee}` (reflection in `alpha_0 = -theta + delta`)
/// and index `i >= 1` is the finite simple reflection `s_{alpha_i}`.
pub fn simple_affine(wg: &WeylGroup, i: usize) -> AffineElt {
    if i == 0 {
        affine_reflection(wg, &wg.root_system().theta().clone(), -1)
    } else {
        AffineElt::finite(wg.simple(i - 1), wg.rank())
    }
}

/// Level-zero action of `x = w t_xi` on a weight: `x lambda` has classical
/// part `w lambda` and `delta`-coefficient `-<lambda, xi>`.
pub fn act_level_zero(wg: &WeylGroup, x: &AffineElt, lambda: &Weight) -> (Weight, i64) {
    let cls = wg.act_weight(x.fin, lambda);
    let deg = -wg.root_system().pair(lambda, &x.trans);
    (cls, deg)
}

/// Pairing `<x lambda, (beta + n delta)^vee>` for level-zero `lambda` and
/// `x = v t_zeta`: the central element pairs to zero with level-zero
/// weights, so this equals `<v lambda, beta^vee>`.
pub fn pair_level_zero(wg: &WeylGroup, x: &AffineElt, lambda: &Weight, beta: &Root) -> i64 {
    let v_lambda = wg.act_weight(x.fin, lambda);
    wg.root_system().pair(&v_lambda, &wg.root_system().coroot_of(beta))
}

/// Zero out the `J`-coordinates of a coroot-lattice element: the class of
/// `xi` in `Q^vee / Q_J^vee`, written in the complementary coordinates.
pub fn project_coroot_mod_j(xi: &Coroot, j: &[usize]) -> Coroot {
    Coroot(
        xi.0.iter()
            .enumerate()
            .map(|(i, &c)| if j.contains(&i) { 0 } else { c })
            .collect(),
    )
}

/// Membership of `x = v t_zeta` in `(W^J)_af`, decided by a finite check.
///
/// `x` is the minimal representative of `x (W_J)_af` iff `x` maps every
/// positive affine root of the `J`-subsystem to a positive affine root.
/// Writing `x(gamma + n delta) = v gamma + (n - <gamma, zeta>) delta` and
/// running over the positive affine roots of the subsystem — `gamma + n
/// delta` with `gamma` in `Delta_J^+`, `n >= 0`, and `-gamma + n delta` with
/// `n >= 1` — the binding cases are `n = 0` and `n = 1`. For each `gamma`
/// in `Delta_J^+` with `c = <gamma, zeta>`:
///
/// - the family `gamma + n delta, n >= 0` stays positive iff `c < 0`, or
///   `c = 0` and `v gamma > 0`;
/// - the family `-gamma + n delta, n >= 1` stays positive iff `c >= 0`, or
///   `c = -1` and `v gamma < 0`.
///
/// Jointly: `c` must be `0` (with `v gamma` positive) or `-1` (with
/// `v gamma` negative).
pub fn is_min_in_coset_af(wg: &WeylGroup, j: &[usize], x: &AffineElt) -> bool {
    let rs = wg.root_system();
    for k in rs.positive_root_indices_in(j) {
        let gamma = &rs.positive_roots()[k];
        let c = rs.pair_root(gamma, &x.trans);
        let image_positive = wg.act_root(x.fin, gamma).0.iter().all(|&a| a >= 0);
        let ok = match c {
            0 => image_positive,
            -1 => !image_positive,
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Projection `pi_J : W_af -> (W^J)_af` sending `x` to the minimal
/// representative of the coset `x (W_J)_af`.
///
/// Searches `x u t_{zeta}` over `u` in `W_J` and `zeta` in `Q_J^vee` inside
/// a growing box, using [`is_min_in_coset_af`]; the representative is unique,
/// and the search asserts it finds exactly one candidate in the box.
///
/// Panics if the box grows past a hard cap — that would indicate a bug, not
/// bad input, since every coset has a minimal representative.
pub fn pi_j(wg: &WeylGroup, j: &[usize], x: &AffineElt) -> AffineElt {
    if j.is_empty() {
        return x.clone();
    }
    let rs = wg.root_system();
    let wj = wg.subgroup_elements(j);
    let j_root_indices = rs.positive_root_indices_in(j);
    let mut bound = j_root_indices
        .iter()
        .map(|&k| rs.pair_root(&rs.positive_roots()[k], &x.trans).abs())
        .max()
        .unwrap_or(0)
        .max(2)
        + 1;
    loop {
        let mut found: Vec<AffineElt> = Vec::new();
        let mut zeta_coords = vec![-bound; j.len()];
        'boxes: loop {
            let mut zeta = Coroot::zero(wg.rank());
            for (pos, &i) in j.iter().enumerate() {
                zeta.0[i] = zeta_coords[pos];
            }
            for &u in &wj {
                let y = AffineElt {
                    fin: u,
                    trans: zeta.clone(),
                };
                let candidate = mul(wg, x, &y);
                if is_min_in_coset_af(wg, j, &candidate) {
                    found.push(candidate);
                }
            }
            // Advance the odometer over the box [-bound, bound]^J.
            for pos in 0..j.len() {
                zeta_coords[pos] += 1;
                if zeta_coords[pos] <= bound {
                    continue 'boxes;
                }
                zeta_coords[pos] = -bound;
            }
            break;
        }
        if !found.is_empty() {
            assert_eq!(
                found.len(),
                1,
                "minimal coset representative must be unique (box {bound})"
            );
            return found.pop().unwrap();
        }
        bound *= 2;
        assert!(
            bound <= 64,
            "pi_J search box exhausted for {} with J = {j:?}",
            x.to_text(wg)
        );
    }
}

/// Classical direction of an affine element relative to `J`: the minimal
/// coset representative `floor(w)` in `W^J` of its finite part.
pub fn cl_affine(wg: &WeylGroup, j: &[usize], x: &AffineElt) -> WeylElt {
    wg.min_rep(x.fin, j)
}
