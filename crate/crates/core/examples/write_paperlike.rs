//! Writes the synthetic `paperlike` study as four CSV files.
//!
//! cargo run -p normcite-core --example write_paperlike -- <dir>

use std::fs::{self, File};
use std::path::PathBuf;

use normcite::records::write_dataset;
use normcite::synth::paperlike;
use normcite::Format;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).ok_or("usage: write_paperlike <dir>")?);
    fs::create_dir_all(&dir)?;
    let study = paperlike();
    for (name, ds) in [
        ("focal_a.csv", &study.focal_a),
        ("focal_b.csv", &study.focal_b),
        ("ref_a.csv", &study.ref_a),
        ("ref_b.csv", &study.ref_b),
    ] {
        write_dataset(ds, Format::Csv, File::create(dir.join(name))?)?;
    }
    println!("wrote {}", dir.display());
    Ok(())
}
