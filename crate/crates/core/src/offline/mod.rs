//! Offline release: drive an IDC with queries found by a distinguisher until
//! the hypothesis is accurate on the whole class, then publish it.

mod distinguisher;
mod ic;

pub use distinguisher::{Distinguisher, ExpMechDistinguisher, PrivacyFlag, SvdRank1Distinguisher};
pub use ic::{ic_release, IcConfig, IcOutput, IcRound, PrivacyReport};
