//! Fit the three regressions on a CSV and print the summary statistics.
//!
//! `cargo run --example fit_summary -- path/to/data.csv y x` (defaults to the bundled fixture).

use ovbound::{summarize, Dataset};

fn main() -> ovbound::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/small.csv").to_string();
    let path = args.first().cloned().unwrap_or(fixture);
    let outcome = args.get(1).map_or("y", String::as_str);
    let treatment = args.get(2).map_or("x", String::as_str);

    let data = Dataset::from_csv_path(std::path::Path::new(&path), outcome, treatment, None)?;
    let s = summarize(&data)?;
    println!("{} rows, controls {:?}", data.len(), data.control_names());
    println!(
        "short:        beta = {:.4} (se {:.4}), R2 = {:.4}",
        s.beta_short,
        s.se_short.unwrap_or(f64::NAN),
        s.r2_short
    );
    println!("intermediate: beta = {:.4} (se {:.4}), R2 = {:.4}", s.beta_int, s.se_int.unwrap_or(f64::NAN), s.r2_int);
    println!("var(y) = {:.4}, var(x) = {:.4}, residual var(x | controls) = {:.4}", s.sigma2_y, s.sigma2_x, s.tau_x);
    println!("{}", serde_json::to_string_pretty(&s).expect("summary serializes"));
    Ok(())
}
