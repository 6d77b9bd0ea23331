//! Shared fixtures for the criterion benches.

use smc_core::generators::{gen_random, RandomFamily};
use smc_core::instance::int;
use smc_core::SmcInstance;

/// A fixed ternary instance of the given size.
pub fn ternary_instance(n: usize) -> SmcInstance {
    gen_random(n, &RandomFamily::Ternary { alpha: int(3) }, 7)
}

/// A fixed binary instance of the given size.
pub fn binary_instance(n: usize) -> SmcInstance {
    gen_random(n, &RandomFamily::Binary, 7)
}

/// A fixed dense-valued instance of the given size.
pub fn general_instance(n: usize) -> SmcInstance {
    gen_random(n, &RandomFamily::General { max: 6 }, 7)
}
