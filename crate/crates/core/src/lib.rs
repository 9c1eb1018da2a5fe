//! Secant-and-tangent closures of rational points on cubic surfaces over
//! small finite fields.
//!
//! The crate is layered bottom-up:
//!
//! * [`gf`]: arithmetic in GF(p^k) and embeddings between such fields,
//! * [`proj`]: canonical points, lines and planes of P³,
//! * [`surface`]: the cubic surface itself (tangent geometry, lines, point
//!   classification, the Gauss map on a line, exact smoothness),
//! * [`span`]: the closure `Span(B)` and generator searches,
//! * [`census`]: exhaustive enumerations and sampled property runs.

pub mod census;
pub mod forms;
pub mod gf;
pub mod linalg;
pub mod parallel;
pub mod proj;
pub mod span;
pub mod surface;
pub mod upoly;

pub use census::{CensusReport, Family, Interpretation};
pub use gf::{Embedding, Field, FieldElem, FieldError};
pub use proj::{Line, Plane, Point};
pub use span::{GeneratorReport, SpanContext};
pub use surface::{CubicSurface, GaussOnLine, PointClass, PointKind, SurfaceError};
