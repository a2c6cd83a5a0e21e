//! Numerical laboratory for skew products over rotations of the torus:
//! continued fractions, ergodic sums, Fourier spectra, rotation partitions
//! and ergodicity probes.

pub mod diophantine;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod fourier;
pub mod hp;
pub mod partition;
pub mod probes;
pub mod quad;
pub mod sum;
pub mod surd;

pub use error::{Error, ErrorKind, Result};
pub use hp::{HpReal, Turn, DEFAULT_BITS};
pub use surd::{parse_real, Real};
