//! Process-wide computation budgets.
//!
//! Defaults can be overridden with the `BREDON_MAX_ORDER`, `BREDON_MAX_RANK`
//! and `BREDON_MAX_CLASSES` environment variables (see [`load_env`]) or set
//! directly.

use std::sync::atomic::{AtomicUsize, Ordering};

pub const DEFAULT_MAX_ORDER: usize = 360;
pub const DEFAULT_MAX_RANK: usize = 20_000;
pub const DEFAULT_MAX_CLASSES: usize = 16;

/// Hard ceiling on group orders: multiplication tables are quadratic.
pub const HARD_MAX_ORDER: usize = 2520;

static MAX_ORDER: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_ORDER);
static MAX_RANK: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_RANK);
static MAX_CLASSES: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_CLASSES);

/// Largest group order for which subgroup lattices are enumerated.
pub fn max_order() -> usize {
    MAX_ORDER.load(Ordering::Relaxed)
}

pub fn set_max_order(n: usize) {
    MAX_ORDER.store(n, Ordering::Relaxed);
}

/// Largest total rank of one free resolution stage.
pub fn max_rank() -> usize {
    MAX_RANK.load(Ordering::Relaxed)
}

pub fn set_max_rank(n: usize) {
    MAX_RANK.store(n, Ordering::Relaxed);
}

/// Largest number of subgroup conjugacy classes for family enumeration.
pub fn max_classes() -> usize {
    MAX_CLASSES.load(Ordering::Relaxed)
}

pub fn set_max_classes(n: usize) {
    MAX_CLASSES.store(n, Ordering::Relaxed);
}

/// Applies the budget environment variables that are set.
pub fn load_env() -> Result<(), String> {
    for (var, set) in [
        ("BREDON_MAX_ORDER", set_max_order as fn(usize)),
        ("BREDON_MAX_RANK", set_max_rank as fn(usize)),
        ("BREDON_MAX_CLASSES", set_max_classes as fn(usize)),
    ] {
        if let Ok(v) = std::env::var(var) {
            let n = v
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("{var} must be a positive integer, got {v:?}"))?;
            set(n);
        }
    }
    Ok(())
}
