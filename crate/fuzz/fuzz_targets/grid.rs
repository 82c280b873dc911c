#![no_main]

use cavity_core::io::{parse_grid, MAX_GRID_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(points) = parse_grid(text) {
        assert!(!points.is_empty() && points.len() <= MAX_GRID_POINTS + 1);
        assert!(points.iter().all(|x| x.is_finite()));
        assert!(points.windows(2).all(|w| w[0] < w[1]));
    }
});
