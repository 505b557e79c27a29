//! Exhaustive verification of the parking geometry: the first successful
//! pose appears at search depth 21 and at no shallower depth.

use ttd_core::env::{shortest_success_depth, CarGeometry};

#[test]
fn shortest_parking_sequence_is_21_steps() {
    let geometry = CarGeometry::default();
    let report = shortest_success_depth(&geometry, 21);
    assert_eq!(
        report.success_depth,
        Some(21),
        "expected the first success at depth 21; report: {report:?}"
    );
    assert!(report.successes > 0);
}
