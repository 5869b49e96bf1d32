mod common;

use common::invariants as inv;

#[test]
fn energy_bounds() {
    inv::energy_bounds().unwrap();
}

#[test]
fn parity_alternation() {
    inv::parity_alternation().unwrap();
}

#[test]
fn node_count_equals_index() {
    inv::node_count().unwrap();
}

#[test]
fn rescale_base_invariance() {
    inv::rescale_invariance().unwrap();
}

#[test]
fn even_sector_reduction() {
    inv::even_reduction().unwrap();
}

#[test]
fn window_equivalence() {
    inv::window_equivalence().unwrap();
}

#[test]
fn normalize_idempotent() {
    inv::normalize_idempotent().unwrap();
}
