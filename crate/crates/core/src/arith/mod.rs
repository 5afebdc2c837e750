//! Exact arithmetic in `Q(x)` and the action of the three operators on it.

pub mod case;
pub mod dispersion;
pub mod linalg;
pub mod poly;
pub mod ramification;
pub mod rat;
pub mod ratfunc;

pub use case::{CaseTag, Point, ShiftPoint};
pub use poly::Poly;
pub use ramification::{deramify, RamificationContext, Ramified};
pub use rat::Q;
pub use ratfunc::RatFunc;
