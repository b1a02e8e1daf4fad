//! Regenerates the overall-width calibration table.
//!
//! cargo run --release --example calibrate

use tempus_core::widths::calibrate_overall_constant;

fn main() {
    let alphas = [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99];
    for a in alphas {
        let p = calibrate_overall_constant(a, 8192).expect("calibration");
        println!(
            "{:.2} {:.6} floor98 {:.4}",
            a,
            p.constant,
            0.98 * p.constant
        );
    }
}
