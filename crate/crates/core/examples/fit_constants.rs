//! Prints the admissible range of the bound constants over the default grid.

use waistlab::measure::fit::{admissible_constants, FitGrid};

fn main() -> waistlab::Result<()> {
    let fit = admissible_constants(&FitGrid::default())?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    Ok(())
}
