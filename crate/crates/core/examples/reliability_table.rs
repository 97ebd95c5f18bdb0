//! The reliability arithmetic for redundant independent sensing, with the
//! default inputs and with a pessimistic pair of channels, plus an empirical
//! MTBF estimate from simulated exposure.
//!
//! Run with `cargo run --example reliability_table`.

use rss_core::reliability::{empirical_mtbf, fmt_num, reliability_table, ReliabilityInputs};

fn main() {
    let defaults = ReliabilityInputs::default();
    print!("{}", reliability_table(&defaults).expect("defaults are valid"));

    println!("\nweaker channels (1e-3 failures per hour each)");
    let weak = ReliabilityInputs { p_channel_a: 1e-3, p_channel_b: 1e-3, ..defaults };
    let report = reliability_table(&weak).expect("valid inputs");
    for row in report.rows.iter().filter(|r| r.quantity.contains("channels A and B")) {
        println!("  {:<40} {}", row.quantity, row.value);
    }

    println!("\nempirical MTBF with 95% interval");
    for (failures, hours) in [(0, 1000.0), (1, 1000.0), (10, 1000.0), (100, 1000.0)] {
        let m = empirical_mtbf(failures, hours).expect("valid exposure");
        println!(
            "  {failures:>3} failures in {hours} h: point {}, interval [{} h, {}]",
            m.point_hours.map_or("unbounded".into(), |h| format!("{} h", fmt_num(h))),
            fmt_num(m.lower_hours),
            m.upper
        );
    }
}
