//! Exhaustive scan of affine parity strategies and a replay of the best
//! one as a classical protocol.

use qlocal::protocols::{affine_protocol, relation_output, TriangleInput};
use qlocal::verify::{best_affine_success, is_valid, lemma2_exhaustive};

fn main() -> qlocal::Result<()> {
    let scan = lemma2_exhaustive();
    println!(
        "{} combinations, {} satisfy all four equalities, at most {} hold together",
        scan.combinations, scan.all_four_satisfied, scan.max_satisfied
    );
    println!("histogram {:?}", scan.histogram);

    let d = 4;
    let best = best_affine_success(d)?;
    println!("best success {}/8 with {}", best.successes, best.witness);
    for b in TriangleInput::all() {
        let exec = affine_protocol(d, best.witness, 2, b)?.run(0)?;
        let x = relation_output(d, &exec.outputs, 0)?;
        println!("  b={b} x={x} valid={}", is_valid(d, b, &x)?.in_support);
    }
    Ok(())
}
