//! Prints the built-in sampling pattern as a Rust table.
//!
//! `cargo run -p dynplace --example gen_pattern > crates/core/src/features/pattern_table.rs`

include!("../tools/pattern_gen.rs");

fn main() {
    let pairs = generate_pattern();
    println!("// Generated by `examples/gen_pattern.rs` (seed {PATTERN_SEED}). Do not edit.");
    println!();
    println!("/// Point pairs `[x1, y1, x2, y2]` relative to the keypoint.");
    println!("pub(crate) const PATTERN_PAIRS: [[i8; 4]; 256] = [");
    for p in &pairs {
        println!("    [{}, {}, {}, {}],", p[0], p[1], p[2], p[3]);
    }
    println!("];");
}
