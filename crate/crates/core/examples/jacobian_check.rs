//! Monte-Carlo check of the change to the symmetric polar variables used in
//! the type-I rate integral.

use tospdc::oracle::{jacobian_mc_check, McTestFunction};

fn main() -> tospdc::Result<()> {
    for f in [McTestFunction::Box, McTestFunction::Gaussian] {
        let r = jacobian_mc_check(400_000, f, 2024)?;
        println!(
            "{f:?}: original {:.4} ± {:.4}, polar {:.4} ± {:.4}, z = {:.2}",
            r.original, r.original_se, r.polar, r.polar_se, r.z_score
        );
    }
    Ok(())
}
