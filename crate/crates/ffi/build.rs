use std::env;
use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = cbindgen::generate(&crate_dir).unwrap_or_else(|err| panic!("{err}"));
    header.write_to_file(crate_dir.join("include/condent.h"));
}
