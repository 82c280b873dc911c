#![no_main]

use cavity_core::io::{parse_coloring, write_coloring};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // First two bytes pick the node count and q; the rest is the file.
    let [n, q, rest @ ..] = data else { return };
    let (n, q) = (*n as usize, 2 + *q as usize % 15);
    let Ok(text) = std::str::from_utf8(rest) else { return };
    if let Ok(s) = parse_coloring(text, n, q) {
        assert_eq!(s.len(), n);
        assert!(s.colors.iter().all(|&c| (1..=q).contains(&c)));
        assert_eq!(parse_coloring(&write_coloring(&s), n, q).unwrap(), s);
    }
});
