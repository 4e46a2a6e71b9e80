//! Jump counts, `r`-variations and jump quasi-seminorms of sampled paths,
//! with the dyadic decompositions and exponent bookkeeping built on them.

mod dyadic;
mod exponents;
mod jump;
mod path;
mod rvar;

pub use dyadic::{long_short_split, LongShort};
pub use exponents::{
    bootstrap_envelope, bootstrap_fixed_point, interpolation_exponents, ExponentRecord,
    BOOTSTRAP_MAX_ITER,
};
pub use jump::{jump_breakpoints, jump_count, jump_seminorm, JumpEvents, JumpProfile, JUMP_SLACK};
pub use path::{Atom, FieldOfPaths, SampledPath, Time};
pub use rvar::{lewko_bound, variation};

pub(crate) use jump::profile_of;
