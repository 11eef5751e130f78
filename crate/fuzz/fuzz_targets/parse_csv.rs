#![no_main]

use edgechaos::io::parse_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_csv(text) {
        assert!(table.rows.iter().all(|r| r.len() == table.header.len()));
        // the rendered table is a fixed point of parse + render
        let rendered = table.render();
        assert_eq!(parse_csv(&rendered).unwrap().render(), rendered);
    }
});
