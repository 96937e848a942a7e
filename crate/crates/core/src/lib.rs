//! Latin square based secret sharing.
//!
//! * [`latin`]: Latin squares, completion search, critical sets.
//! * [`packing`]: order-10 squares packed into 256-bit and 324-bit containers.
//! * [`toy_hash`]: a reduced-width iterative hash with collision search,
//!   diamond structures and prefix herding.
//! * [`schemes`]: critical-set sharing, modular last-share sharing, the
//!   herding threshold scheme and hash commitments.
//! * [`store`]: on-disk formats for public stores, shares and diamonds.

pub mod latin;
pub mod packing;
pub mod schemes;
pub mod store;
pub mod toy_hash;

pub use latin::{LatinError, LatinSquare, PartialLatinSquare, Triple};
pub use packing::{Packed256, Packed324, PackingError};
pub use toy_hash::{Block, ChainState, Diamond, HashError, HashParams, Searcher};
