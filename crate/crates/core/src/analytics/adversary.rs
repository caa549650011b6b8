//! Classical samplers built from affine parity strategies, and the search
//! for the one closest to the quantum sampling law.

use std::collections::{BTreeMap, HashMap};

use super::{exact_gamma, DistributionKind, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::protocols::{sample_schema, AffineOptions, AffineStrategy, TriangleInput};
use crate::quantum::Bitstring;
use crate::verify::{parities, ParityTuple};

/// One classical sampler: input node `w_i` outputs 1 with probability
/// `bias[i]`, ring parities follow `strategy`, randomized by `options`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdversarySpec {
    pub strategy: AffineStrategy,
    pub options: AffineOptions,
    pub bias: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryResult {
    pub tv: f64,
    pub witness: AdversarySpec,
    /// Strategies, randomizations and bias triples scanned.
    pub family_size: usize,
    /// Mass the witness puts on records outside the quantum support.
    pub witness_invalid_mass: f64,
    /// Mean over inputs of the witness strategy's validity.
    pub witness_validity: f64,
}

/// Bias values `k/22` for `k = 0..=22`; includes `5/11` and `6/11`.
pub fn bias_grid() -> Vec<f64> {
    (0..=22).map(|k| k as f64 / 22.0).collect()
}

fn randomizations() -> Vec<AffineOptions> {
    (0..8)
        .map(|k| AffineOptions { sample_inputs: true, coset_fill: k & 1 != 0, mix_sides: k & 2 != 0, mix_even: k & 4 != 0 })
        .collect()
}

/// Parity offsets added by the mixing bits, each with equal weight.
fn parity_offsets(options: &AffineOptions) -> Vec<ParityTuple> {
    let mut out = vec![ParityTuple::default()];
    if options.mix_sides {
        let alpha = ParityTuple::new(false, true, false, true);
        let beta = ParityTuple::new(false, true, true, false);
        out = out.iter().flat_map(|&p| [p, p.xor(alpha), p.xor(beta), p.xor(alpha).xor(beta)]).collect();
    }
    if options.mix_even {
        let gamma = ParityTuple::new(true, false, false, false);
        out = out.iter().flat_map(|&p| [p, p.xor(gamma)]).collect();
    }
    out
}

/// Ring string of the deterministic affine program on input `b`, with
/// the mixing flips `(alpha, beta, gamma)` applied.
fn point_output(d: usize, s: &AffineStrategy, b: TriangleInput, flips: (bool, bool, bool)) -> Bitstring {
    let known = b.b.map(Some);
    let mut x = Bitstring::zeros(3 * d);
    for i in 0..3 * d {
        let v = s.ring_output(d, i, known).expect("every bit is known");
        x = x.with_bit(i, v);
    }
    let flip = |x: Bitstring, i: usize, on: bool| if on { x.with_bit(i, !x.bit(i)) } else { x };
    let (alpha, beta, gamma) = flips;
    let x = flip(flip(x, 1, alpha), 3 * d - 1, alpha);
    let x = flip(flip(x, d - 1, beta), d + 1, beta);
    flip(x, 0, gamma)
}

fn flip_patterns(options: &AffineOptions) -> Vec<(bool, bool, bool)> {
    let sides: &[(bool, bool)] =
        if options.mix_sides { &[(false, false), (true, false), (false, true), (true, true)] } else { &[(false, false)] };
    let evens: &[bool] = if options.mix_even { &[false, true] } else { &[false] };
    sides.iter().flat_map(|&(a, b)| evens.iter().map(move |&g| (a, b, g))).collect()
}

fn input_weight(bias: &[f64; 3], b: TriangleInput) -> f64 {
    (0..3).map(|i| if b.b[i] { bias[i] } else { 1.0 - bias[i] }).product()
}

/// Exact output law of one sampler, over the same records as
/// [`exact_gamma`].
pub fn adversary_law(d: usize, spec: &AdversarySpec) -> Result<OutcomeDistribution> {
    crate::net::build_gd(d)?;
    let mut entries: BTreeMap<Bitstring, f64> = BTreeMap::new();
    for b in TriangleInput::all() {
        let pb = input_weight(&spec.bias, b);
        if pb == 0.0 {
            continue;
        }
        let prefix = Bitstring::from_bits(&b.b)?;
        if spec.options.coset_fill {
            let offsets = parity_offsets(&spec.options);
            let class = 1u64 << (3 * d - 4);
            let mut weight_of: HashMap<ParityTuple, f64> = HashMap::new();
            for off in &offsets {
                *weight_of.entry(spec.strategy.parities(b).xor(*off)).or_insert(0.0) += 1.0 / offsets.len() as f64;
            }
            for v in 0..1u64 << (3 * d) {
                let x = Bitstring::new(3 * d, v)?;
                if let Some(w) = weight_of.get(&parities(d, &x)?) {
                    *entries.entry(prefix.concat(&x)?).or_insert(0.0) += pb * w / class as f64;
                }
            }
        } else {
            let patterns = flip_patterns(&spec.options);
            for &f in &patterns {
                let x = point_output(d, &spec.strategy, b, f);
                *entries.entry(prefix.concat(&x)?).or_insert(0.0) += pb / patterns.len() as f64;
            }
        }
    }
    OutcomeDistribution::from_entries(sample_schema(d), DistributionKind::Exact, entries)
}

/// Per input: `(adversary mass per record, gamma mass, record count)`
/// groups plus the gamma mass the adversary never reaches. The total
/// variation distance at bias `p` is then
/// `½ Σ_b [Σ count·|P_p(b)·a − g| + uncovered_b]`.
struct Profile {
    groups: [Vec<(f64, f64, f64)>; 8],
    uncovered: [f64; 8],
}

/// Gamma conditional masses grouped by input and parity class; values are
/// bucketed at `2^-40` to merge floating-point copies of one value.
struct GammaIndex {
    d: usize,
    by_class: Vec<[Vec<(f64, f64)>; 16]>,
    point: HashMap<Bitstring, f64>,
    total: [f64; 8],
}

impl GammaIndex {
    fn new(d: usize, gamma: &OutcomeDistribution) -> Result<Self> {
        let mut hist: Vec<[BTreeMap<i64, (f64, f64)>; 16]> = (0..8).map(|_| Default::default()).collect();
        let mut point = HashMap::new();
        let mut total = [0.0; 8];
        let mut nonzero = vec![[0u64; 16]; 8];
        for (rec, g) in gamma.iter() {
            let b = (rec.value() & 7) as usize;
            let bin = TriangleInput::new(b & 1 != 0, b & 2 != 0, b & 4 != 0);
            let x = rec.select(&(3..3 + 3 * d).collect::<Vec<_>>())?;
            let tau = parities(d, &x)?.index();
            let slot = hist[bin.index()][tau].entry((g * (1u64 << 40) as f64).round() as i64).or_insert((0.0, 0.0));
            slot.0 += g;
            slot.1 += 1.0;
            nonzero[bin.index()][tau] += 1;
            total[bin.index()] += g;
            point.insert(*rec, g);
        }
        let class = (1u64 << (3 * d - 4)) as f64;
        let by_class = hist
            .into_iter()
            .enumerate()
            .map(|(bi, classes)| {
                let mut k = 0;
                classes.map(|h| {
                    let mut v: Vec<(f64, f64)> = h.into_values().map(|(sum, n)| (sum / n, n)).collect();
                    v.push((0.0, class - nonzero[bi][k] as f64));
                    k += 1;
                    v
                })
            })
            .collect();
        Ok(GammaIndex { d, by_class, point, total })
    }

    fn profile(&self, s: &AffineStrategy, options: &AffineOptions) -> Result<Profile> {
        let d = self.d;
        let mut groups: [Vec<(f64, f64, f64)>; 8] = Default::default();
        let mut uncovered = [0.0; 8];
        for b in TriangleInput::all() {
            let bi = b.index();
            let mut covered = 0.0;
            if options.coset_fill {
                let offsets = parity_offsets(options);
                let class = (1u64 << (3 * d - 4)) as f64;
                let mut weight_of: BTreeMap<usize, f64> = BTreeMap::new();
                for off in &offsets {
                    *weight_of.entry(s.parities(b).xor(*off).index()).or_insert(0.0) += 1.0 / offsets.len() as f64;
                }
                for (&tau, &w) in &weight_of {
                    for &(g, n) in &self.by_class[bi][tau] {
                        groups[bi].push((w / class, g, n));
                        covered += g * n;
                    }
                }
            } else {
                let prefix = Bitstring::from_bits(&b.b)?;
                let patterns = flip_patterns(options);
                let mut mass: BTreeMap<Bitstring, f64> = BTreeMap::new();
                for &f in &patterns {
                    *mass.entry(point_output(d, s, b, f)).or_insert(0.0) += 1.0 / patterns.len() as f64;
                }
                for (x, a) in mass {
                    let g = self.point.get(&prefix.concat(&x)?).copied().unwrap_or(0.0);
                    groups[bi].push((a, g, 1.0));
                    covered += g;
                }
            }
            uncovered[bi] = (self.total[bi] - covered).max(0.0);
        }
        Ok(Profile { groups, uncovered })
    }
}

impl Profile {
    fn tv(&self, bias: &[f64; 3]) -> f64 {
        let mut sum = 0.0;
        for b in TriangleInput::all() {
            let pb = input_weight(bias, b);
            let bi = b.index();
            sum += self.groups[bi].iter().map(|&(a, g, n)| n * (pb * a - g).abs()).sum::<f64>() + self.uncovered[bi];
        }
        sum / 2.0
    }
}

/// Total variation distance between one sampler and the quantum law.
pub fn adversary_tv(d: usize, spec: &AdversarySpec) -> Result<f64> {
    let gamma = exact_gamma(d)?;
    super::tv_distance(&adversary_law(d, spec)?, &gamma)
}

/// Strategies a `T`-round sampler can realize when each input bit may be
/// known up to distance `2T - 1` from its corner: all admissible
/// strategies for `T >= 1`, constant ones for `T = 0`.
pub fn adversary_strategies(rounds: usize) -> Vec<AffineStrategy> {
    AffineStrategy::all()
        .filter(|s| s.is_admissible() && (rounds >= 1 || s.required_rounds() == 0))
        .collect()
}

/// Smallest total variation distance to the quantum sampling law over the
/// affine sampler family: every realizable admissible strategy, every
/// combination of coset fill, side mixing and `m_E` mixing, and every bias
/// triple on [`bias_grid`].
pub fn min_tv_affine_adversary(d: usize, rounds: usize) -> Result<AdversaryResult> {
    crate::net::build_gd(d)?;
    if 4 * rounds > d {
        return Err(Error::arg(format!("the sampler family needs T <= d/4, got T={rounds}, d={d}")));
    }
    let gamma = exact_gamma(d)?;
    let index = GammaIndex::new(d, &gamma)?;
    let grid = bias_grid();
    let strategies = adversary_strategies(rounds);
    let mixes: Vec<AffineOptions> =
        randomizations().into_iter().filter(|o| rounds >= 1 || !(o.coset_fill || o.mix_sides || o.mix_even)).collect();
    let mut best: Option<(f64, AdversarySpec)> = None;
    let mut family_size = 0;
    for s in &strategies {
        for options in &mixes {
            let profile = index.profile(s, options)?;
            for &p0 in &grid {
                for &p1 in &grid {
                    for &p2 in &grid {
                        let bias = [p0, p1, p2];
                        family_size += 1;
                        let tv = profile.tv(&bias);
                        if best.as_ref().is_none_or(|(b, _)| tv < *b) {
                            best = Some((tv, AdversarySpec { strategy: *s, options: *options, bias }));
                        }
                    }
                }
            }
        }
    }
    let (tv, witness) = best.expect("the family is never empty");
    let law = adversary_law(d, &witness)?;
    let witness_invalid_mass = law.iter().filter(|(r, _)| gamma.prob(r) == 0.0).map(|(_, p)| p).sum();
    let witness_validity = crate::verify::strategy_successes(&witness.strategy) as f64 / 8.0;
    Ok(AdversaryResult { tv, witness, family_size, witness_invalid_mass, witness_validity })
}
