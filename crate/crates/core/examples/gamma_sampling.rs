//! The sampling law computed centrally, by the distributed sampler, and
//! empirically.

use qlocal::analytics::{empirical_distribution, exact_classical_distribution, exact_gamma, marginal, tv_distance};
use qlocal::protocols::{sample_record, sample_schema, sampling_protocol};
use qlocal::quantum::Bitstring;

fn main() -> qlocal::Result<()> {
    let d = 2;
    let gamma = exact_gamma(d)?;
    let sampler = sampling_protocol(d)?;
    let record = |o: &_| sample_record(d, o);
    let exact = exact_classical_distribution(&sampler, sample_schema(d), record)?;
    let empirical = empirical_distribution(&sampler, 20_000, 1, sample_schema(d), record)?;
    println!("support size {}", gamma.len());
    println!("TV(central, distributed) = {:.3e}", tv_distance(&gamma, &exact)?);
    println!("TV(central, 20000 shots) = {:.4}", tv_distance(&gamma, &empirical)?);
    let one = Bitstring::from_bits(&[true])?;
    for i in 0..3 {
        println!("P(b{i}=1) = {}", marginal(&gamma, i)?.prob(&one));
    }
    let path = std::env::temp_dir().join("gamma-d2.txt");
    std::fs::write(&path, gamma.to_text())?;
    println!("wrote {}", path.display());
    Ok(())
}
