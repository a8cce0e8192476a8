fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/bect.h"));
        }
        Err(err) => {
            // keep the checked-in header when generation is unavailable
            println!("cargo:warning=cbindgen failed: {err}");
        }
    }
}
