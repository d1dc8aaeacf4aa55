//! Construction and verification of Cameron-Liebler line classes in PG(3, q)
//! with parameter x = (q + 1)^2 / 3, for prime powers q = 2 (mod 3).
//!
//! The pipeline runs in three layers:
//! * [`field`]: discrete-log arithmetic in the tower F_p < F_q < F_{q^3};
//! * [`construction`]: the seed set on the trace-zero elements, its norm
//!   profiles and multiset identities, and the Singer-orbit point set on the
//!   Klein quadric;
//! * [`quadric`] and [`verify`]: the quadric model of line geometry, the
//!   Klein correspondence down to PG(3, q), and the checks that the point
//!   set really is a tight set / Cameron-Liebler class of the right
//!   parameter, with [`oracle`] cross-checking the character-sum route
//!   numerically.

pub mod cli;
pub mod construction;
pub mod error;
pub mod export;
pub mod field;
pub mod oracle;
pub mod quadric;
pub mod verify;

pub use error::{Error, Result};
