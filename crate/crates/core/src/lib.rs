//! Exact r-framed motivic DT/PT generating functions for the small crepant
//! resolutions of `xy = z^N0 w^N1`.
//!
//! The engine is built in layers:
//!
//! * [`motive`]: Laurent polynomials in `L^(1/2)` with an optional lower floor,
//! * [`torus`]: truncated series in the motivic quantum torus of a quiver,
//! * [`quiver`]: partitions of the trapezoid, their quivers and curve types,
//! * [`roots`]: affine type A roots, stability parameters and chambers,
//! * [`dt`]: the generating functions and the identities relating them,
//! * [`plethystic`]: plethystic exponentials, Euler products and power structures.
//!
//! Every type is generic over the coefficient scalar; the aliases below fix
//! arbitrary-precision integers and rationals, which is what the CLI uses.

pub mod dt;
pub mod error;
pub mod motive;
pub mod plethystic;
pub mod quiver;
pub mod roots;
pub mod scalar;
pub mod torus;

pub use error::{Error, Result};
pub use motive::MotiveLaurent;
pub use quiver::{CurveProfile, Partition, Quiver};
pub use roots::{InfinitesimalRational, Root, RootKind, StabilityParam};
pub use scalar::{Field, Scalar};
pub use torus::{Monomial, PairingMatrix, SeriesST, TruncationPolicy, TwistedSeries};

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Motive = MotiveLaurent<BigInt>;
pub type Series = TwistedSeries<BigInt>;
pub type SeriesSt = SeriesST<BigInt>;
pub type Zeta = StabilityParam<BigRational>;
