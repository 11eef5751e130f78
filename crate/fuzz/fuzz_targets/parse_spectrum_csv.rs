#![no_main]

use edgechaos::randmat::{parse_spectrum_csv, Spectrum};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(eigenvalues) = parse_spectrum_csv(text) {
        let sp = Spectrum {
            eigenvalues,
            source: None,
        };
        let back = parse_spectrum_csv(&sp.to_csv().render()).unwrap();
        assert_eq!(back, sp.eigenvalues);
    }
});
