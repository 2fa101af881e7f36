//! Loads a dataset through one of the adapters and prints its class balance.
//!
//! `cargo run --example load_dataset -- ccf path/to/creditcard.csv`
//! Without arguments a synthetic CSV is written and read back.

use std::str::FromStr;

use cascade_forest::data::{write_csv, AdapterKind};
use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let data = match args.as_slice() {
        [adapter, path] => AdapterKind::from_str(adapter)?.load(path.as_ref())?,
        _ => {
            let path = std::env::temp_dir().join("cascade-forest-demo.csv");
            write_csv(&make_synthetic(500, 3, 0.1, 2.0, 0)?, &path)?;
            AdapterKind::Csv.load(&path)?
        }
    };
    let [normal, anomaly] = data.class_counts();
    println!("source    {}", data.source());
    println!("rows      {} x {} features", data.n_rows(), data.n_features());
    println!("normal    {normal}");
    println!("anomaly   {anomaly} ({:.3}%)", 100.0 * data.anomaly_rate());
    if let Some(r) = data.normal_anomaly_ratio() {
        println!("ratio     {r:.1}");
    }
    Ok(())
}
