//! The quantum relation protocol on the augmented ring, checked against
//! the exact support and the parity conditions.

use qlocal::protocols::{relation_output, relation_protocol, TriangleInput};
use qlocal::verify::{enumerate_support, is_valid, parities};

fn main() -> qlocal::Result<()> {
    let d = 4;
    for b in TriangleInput::all() {
        let support = enumerate_support(d, b)?;
        let runs = relation_protocol(d, b)?.sample(200, b.index() as u64)?;
        let mut valid = 0;
        for outputs in &runs {
            let x = relation_output(d, outputs, 0)?;
            valid += is_valid(d, b, &x)?.in_support as usize;
        }
        let x = relation_output(d, &runs[0], 0)?;
        println!(
            "b={b} |support|={:5} valid {valid}/{} first {x} parities {}",
            support.len(),
            runs.len(),
            parities(d, &x)?
        );
    }
    Ok(())
}
