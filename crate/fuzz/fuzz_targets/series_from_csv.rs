#![no_main]

use edgechaos_cli::svg::{render_svg, series_from_csv, AxesSpec, Style};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // first line names the columns to plot: x,y[,group]
    let Some((spec, table)) = text.split_once('\n') else { return };
    let cols: Vec<&str> = spec.split(',').collect();
    if cols.len() < 2 {
        return;
    }
    if let Ok(series) = series_from_csv(table, cols[0], cols[1], cols.get(2).copied(), Style::LineMarkers) {
        let _ = render_svg(&series, &AxesSpec::linear(cols[0], cols[1]));
        let _ = render_svg(&series, &AxesSpec::semilog_x(cols[0], cols[1]));
    }
});
