//! Portfolio selection strategies.

mod baselines;
mod relp;

pub use baselines::{eg_update, olmar_update, Eg, Olmar, Ubah, Ucrp};
pub use relp::{Decision, RelpFixed, RelpParams, RelpStats};
