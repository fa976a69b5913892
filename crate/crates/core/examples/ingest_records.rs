//! Reads hourly records from CSV, classifies each failure hour and counts
//! contingencies. Uses `data/records/failure_history.csv` unless a path is
//! given.

use std::fs::File;
use std::path::PathBuf;

use credal_cfr::cfr::{classify_record, count_contingencies, read_records, TableContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/records/failure_history.csv")
        });
    let records = read_records(File::open(&path)?)?;
    let states = records
        .iter()
        .map(classify_record)
        .collect::<Result<Vec<_>, _>>()?;
    let counts = count_contingencies(&states);
    println!("{} records, {} failures", records.len(), counts.failures());
    for ctx in TableContext::all() {
        println!("  {:<10} {:?}", ctx.describe(), counts.get(ctx).counts());
    }
    Ok(())
}
