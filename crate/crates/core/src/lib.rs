//! Exact computation of truncated c-nilpotent multipliers of free products
//! of finite cyclic groups.
//!
//! The engine works inside the free nilpotent group `F/gamma_{k+1}(F)`:
//!
//! * [`magnus`] — integer power series in noncommuting variables truncated
//!   at total degree `k`; the group embeds via `x_i -> 1 + X_i`.
//! * [`hall`] — basic commutators (a basis of each lower-central quotient)
//!   and conversion between homogeneous series slices and integer
//!   coordinate vectors.
//! * [`nilgroup`] — Mal'cev coordinates, echelonized subgroup generating
//!   sequences, membership by sifting, normal closures and per-weight
//!   lattices.
//! * [`intlinalg`] — Hermite/Smith normal forms and finitely generated
//!   abelian group arithmetic (direct sum, tensor, Tor).
//! * [`multiplier`] — the rho-series ladder, truncated c-nilpotent
//!   multipliers, the Burns–Ellis closed form, and verifiers for the
//!   structural identities the engine is built to check.
//!
//! All arithmetic is exact; coefficients are arbitrary-precision integers
//! and every canonical form is deterministic.

pub mod error;
pub mod hall;
pub mod intlinalg;
pub mod magnus;
pub mod multiplier;
pub mod nilgroup;

pub use error::Error;
pub use hall::{witt_rank, BasicCommutator, HallBasis, WeightLayer};
pub use intlinalg::{lattice_quotient, FgAbelianGroup, IntMatrix};
pub use magnus::{Monomial, TruncatedSeries, TruncationContext};
pub use multiplier::{
    burns_ellis_m2, m2_free_product_cyclics, schur_free_product, truncated_multiplier,
    CyclicFactors, GroupData, MultiplierReport, RhoLadder,
};
pub use nilgroup::{Coordinates, Echelon, NilContext};
