//! Reading, validating and writing the JSON file formats.

use distgeom::io::{instance_to_json, load_instance, load_realization};
use distgeom::model::{eta, validate};

fn main() -> distgeom::error::Result<()> {
    let inst = load_instance(
        r#"{"K":2,"n":3,"edges":[{"u":1,"v":2,"d":1.0},{"u":2,"v":3,"dl":1.0,"du":2.0}]}"#,
    )?;
    let x = load_realization(r#"{"K":2,"n":3,"x":[[0,0],[1,0],[1,2.5]]}"#)?;
    let report = validate(&inst, &x, 1e-8)?;
    println!(
        "max error {}, violated {:?}",
        report.max_abs_error, report.violated_edges
    );
    println!("eta = {:.3}", eta(&inst));
    println!("{}", instance_to_json(&inst));
    Ok(())
}
