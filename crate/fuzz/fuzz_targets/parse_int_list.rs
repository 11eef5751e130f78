#![no_main]

use edgechaos::io::parse_int_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_int_list(text) {
        assert!(!values.is_empty());
        let again: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        assert_eq!(parse_int_list(&again.join(",")).unwrap(), values);
    }
});
