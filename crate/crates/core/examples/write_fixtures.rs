//! Regenerates the derived files under `data/`: the two line network
//! documents and the reconstructed failure history.
//!
//! `cargo run --example write_fixtures`

use std::fs;
use std::path::Path;

use credal_cfr::cfr::fixtures;

fn main() -> std::io::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    for (rel, body) in fixtures::generated_files() {
        let path = root.join(rel);
        fs::create_dir_all(path.parent().expect("file has a parent"))?;
        fs::write(&path, body)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
