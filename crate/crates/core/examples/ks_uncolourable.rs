//! Certify the shipped catalogue entries as KS-uncolourable.
//!
//! Run with `cargo run --release --example ks_uncolourable`.

use ncsim::ks::{builtin, builtin_names, certify, count_colourings_exhaustive, search_colouring, SearchOutcome};

fn main() -> ncsim::Result<()> {
    for name in builtin_names() {
        let set = builtin(name).expect("shipped entry");
        let (structure, cert) = certify(&set, ncsim::DEFAULT_TOL)?;
        println!(
            "{name}: {} vectors in dimension {}, {} orthogonal bases",
            set.len(),
            set.dim(),
            structure.bases().len()
        );
        match search_colouring(&structure) {
            SearchOutcome::Found { colouring, .. } => println!("  colourable, e.g. {:?}", colouring.values()),
            SearchOutcome::Uncolourable(c) => {
                println!("  backtracking: uncolourable after {} nodes", c.explored_nodes)
            }
        }
        if let Ok(n) = count_colourings_exhaustive(&structure) {
            println!("  exhaustive enumeration of 2^{}: {n} valid colourings", set.len());
        }
        println!("  certified uncolourable: {}", cert.is_uncolourable());
    }
    Ok(())
}
