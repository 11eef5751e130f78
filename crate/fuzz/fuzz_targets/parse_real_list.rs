#![no_main]

use edgechaos::io::parse_real_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_real_list(text) {
        assert!(!values.is_empty());
        assert!(values.iter().all(|v| v.is_finite()));
        // formatting with full precision parses back to the same list
        let again: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
        assert_eq!(parse_real_list(&again.join(",")).unwrap(), values);
    }
});
