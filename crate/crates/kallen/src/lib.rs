//! Exact algebraic-combinatorics engine for level-zero van der Kallen and
//! Demazure characters.
//!
//! The crate computes, over any finite simple root system of type A-D or G
//! (desk scale, rank <= 4):
//!
//! - finite Weyl groups with Bruhat order and parabolic coset machinery
//!   ([`cartan`]),
//! - affine Weyl group elements, semi-infinite length, and the projection
//!   onto minimal coset representatives ([`affine`]),
//! - the parabolic quantum Bruhat graph with shortest-path length/weight
//!   tables, reflection orders, the sets `EQB(w)` of reachable final
//!   directions, and the cells `K_w` partitioning the semi-infinite order
//!   ([`qbg`]),
//! - quantum and semi-infinite Lakshmibai-Seshadri paths with exact rational
//!   break points and crystal root operators ([`paths`]),
//! - sparse group-algebra polynomials in `e^mu` and `q`, Demazure operators,
//!   the `t = infinity` specialization `E_{w lambda}(q, infinity)` of
//!   nonsymmetric Macdonald polynomials by two independent algorithms, and
//!   graded characters of level-zero van der Kallen and Demazure modules
//!   together with an identity-verification suite ([`characters`]).
//!
//! All arithmetic is exact (integers and rationals); every computed identity
//! is checked by cross-multiplication, never by floating point.

pub mod affine;
pub mod cartan;
pub mod characters;
pub mod paths;
pub mod qbg;

pub use cartan::{CartanError, Coroot, Root, RootSystem, Series, Weight, WeylElt, WeylGroup};
