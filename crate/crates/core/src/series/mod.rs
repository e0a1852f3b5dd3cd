//! Truncated power series in `t`, linear differential operators acting on
//! them, and coefficientwise checks of the series identities tying `u`, `w`
//! and the Pochhammer products together.

mod identities;
mod ode;
mod trunc;

pub use identities::{
    derivation_identity_check, verify, verify_clausen, verify_hg_c0, verify_id3, verify_ode_big_g,
    verify_ode_g, verify_r2, Identity, Mismatch, VerificationRecord,
};
pub use ode::{g_operator, sym_square_operator, OdeOperator};
pub use trunc::TruncSeries;
