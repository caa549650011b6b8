use super::{check_prop1, is_valid, lemma2_equalities};
use crate::error::{Error, Result};
use crate::net::{build_script_gd, shot_seed, Mode, Protocol};
use crate::protocols::{relation_output, AffineStrategy, TriangleInput};

/// Number of inputs on which the strategy's parities meet the parity
/// conditions.
pub fn strategy_successes(s: &AffineStrategy) -> usize {
    TriangleInput::all().filter(|&b| check_prop1(b, s.parities(b))).count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineSuccess {
    /// Inputs (out of 8) on which the witness succeeds.
    pub successes: usize,
    pub probability: f64,
    pub witness: AffineStrategy,
    pub admissible_scanned: usize,
}

/// Best uniform-input success over admissible affine strategies, with the
/// first maximizer in code order as witness. `d` only needs to be a valid
/// ring parameter.
pub fn best_affine_success(d: usize) -> Result<AffineSuccess> {
    build_script_gd(d)?;
    let mut best: Option<(usize, AffineStrategy)> = None;
    let mut scanned = 0;
    for s in AffineStrategy::all().filter(AffineStrategy::is_admissible) {
        scanned += 1;
        let k = strategy_successes(&s);
        debug_assert_eq!(
            k,
            4 + lemma2_equalities(&s).iter().filter(|&&x| x).count(),
            "admissible strategies satisfy the universal identity on every input"
        );
        if best.is_none_or(|(bk, _)| k > bk) {
            best = Some((k, s));
        }
    }
    let (successes, witness) = best.expect("the zero strategy is admissible");
    Ok(AffineSuccess { successes, probability: successes as f64 / 8.0, witness, admissible_scanned: scanned })
}

/// Monte Carlo validity rates of a classical protocol family.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessReport {
    /// Success rate per input, indexed like [`TriangleInput::from_index`].
    pub per_input: [f64; 8],
    pub min: f64,
    /// Mean over the eight inputs.
    pub overall: f64,
    pub trials: usize,
}

/// Runs `make(b)` for every input `b`, `trials` times each, and checks every
/// ring output against the support of the triangle process.
pub fn classical_success_rate(
    make: impl Fn(TriangleInput) -> Result<Protocol>,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<SuccessReport> {
    if trials == 0 {
        return Err(Error::arg("at least one trial is required"));
    }
    let mut per_input = [0.0; 8];
    for b in TriangleInput::all() {
        let protocol = make(b)?;
        if protocol.mode() != Mode::Classical {
            return Err(Error::arg("success rates are defined for classical protocols"));
        }
        let mut ok = 0usize;
        for outputs in protocol.sample(trials, shot_seed(seed, b.index() as u64))? {
            let x = relation_output(d, &outputs, 0)?;
            ok += is_valid(d, b, &x)?.in_support as usize;
        }
        per_input[b.index()] = ok as f64 / trials as f64;
    }
    let min = per_input.iter().copied().fold(f64::INFINITY, f64::min);
    let overall = per_input.iter().sum::<f64>() / 8.0;
    Ok(SuccessReport { per_input, min, overall, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::affine_protocol;

    #[test]
    fn best_is_seven_eighths() {
        let best = best_affine_success(4).unwrap();
        assert_eq!(best.successes, 7);
        assert_eq!(best.probability, 0.875);
        assert_eq!(best.admissible_scanned, 512);
        assert!(best.witness.is_admissible());
    }

    #[test]
    fn zero_strategy_succeeds_on_five_inputs() {
        assert_eq!(strategy_successes(&AffineStrategy::default()), 5);
    }

    #[test]
    fn zero_trials_is_an_error() {
        let s = AffineStrategy::default();
        assert!(classical_success_rate(|b| affine_protocol(2, s, 0, b), 2, 0, 1).is_err());
    }
}
