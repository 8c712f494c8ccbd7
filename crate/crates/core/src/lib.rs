//! Exact computations around lines on the Fermat surface `x^d + y^d + z^d + w^d = 0`
//! over `F_{q^2}` (`d = q + 1`), the character sums that control their
//! projections, and explicit points on `y^2 + xy - t^d y = x^3` over `F_{q^2}(t)`.

pub mod certify;
pub mod charsum;
pub mod cyc;
pub mod efield;
pub mod error;
pub mod fermat;
pub mod gf;

pub use charsum::ExponentTuple;
pub use cyc::CycElt;
pub use error::{Error, Result};
pub use fermat::Line;
pub use gf::{make_field, FieldCtx, FqElem};
