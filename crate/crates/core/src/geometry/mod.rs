//! Reductions of forms, Dwork-regularity, duals and exceptional primes.

pub mod dual;
pub mod elim;
pub mod exceptional;
pub mod ext;
pub mod regularity;
pub mod schwartz_zippel;

pub use dual::{quadric_dual, DualOracle, DualSpec, Membership};
pub use exceptional::{compute_exceptional_primes, ExcEntry, ExcFlag, ExcReport};
pub use ext::{extension_of_degree, Witness};
pub use regularity::{
    is_deligne, is_dwork_regular, is_dwork_regular_ff, projective_smooth, slice_and_check, RegularityStrategy,
    RegularityVerdict, SearchLimits, SliceCheck, Verdict,
};
pub use schwartz_zippel::{schwartz_zippel_audit, SzAudit};
