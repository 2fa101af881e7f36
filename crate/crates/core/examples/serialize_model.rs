//! Writes a model in both formats and reads it back.

use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(1000, 4, 0.1, 2.0, 1)?;
    let model = EnsembleModel::fit(&data, &EnsembleConfig::gradient_boosting(20, 3).with_seed(3))?;

    let dir = std::env::temp_dir().join("cascade-forest-serialize");
    std::fs::create_dir_all(&dir)?;
    let bin = dir.join("model.cfem");
    let json = dir.join("model.json");
    std::fs::write(&bin, model.to_bytes())?;
    std::fs::write(&json, model.to_json()?)?;

    let from_bin = EnsembleModel::from_bytes(&std::fs::read(&bin)?)?;
    let from_json = EnsembleModel::from_json(&std::fs::read_to_string(&json)?)?;
    assert_eq!(from_bin, model);
    assert_eq!(from_json.to_bytes(), model.to_bytes());

    println!("binary {} bytes -> {}", model.to_bytes().len(), bin.display());
    println!("json   {} bytes -> {}", std::fs::metadata(&json)?.len(), json.display());
    println!("p(anomaly | row 0) = {:.6}", from_bin.predict_proba(data.row(0))?.p_anomaly);
    Ok(())
}
