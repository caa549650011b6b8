//! Smallest total variation distance any affine classical sampler in the
//! search family reaches against the quantum sampling law.

use qlocal::analytics::min_tv_affine_adversary;

fn main() -> qlocal::Result<()> {
    let res = min_tv_affine_adversary(4, 1)?;
    println!("scanned {} samplers", res.family_size);
    println!("min TV {:.6} (1/11 = {:.6})", res.tv, 1.0 / 11.0);
    println!("closest: {} biases {:?}", res.witness.strategy, res.witness.bias);
    println!("its invalid mass {:.6}, validity {:.6}", res.witness_invalid_mass, res.witness_validity);
    Ok(())
}
