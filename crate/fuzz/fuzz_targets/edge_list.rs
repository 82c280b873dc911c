#![no_main]

use cavity_core::io::{parse_edge_list, write_edge_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_edge_list(text) {
        // Anything accepted must survive a canonical round trip.
        let canonical = write_edge_list(&g);
        let back = parse_edge_list(&canonical).expect("writer output parses");
        assert_eq!(back.sorted_edges(), g.sorted_edges());
        assert_eq!(write_edge_list(&back), canonical);
        for v in 0..g.n_nodes() {
            for &u in g.neighbors(v) {
                assert!(u != v && g.neighbors(u).contains(&v));
            }
        }
    }
});
