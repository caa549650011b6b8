//! Classical strategies whose four output parities are affine functions
//! of the corner inputs.

use std::fmt;

use super::triangle::{copy_size, triangle_inputs};
use super::TriangleInput;
use crate::error::{Error, Result};
use crate::net::{
    build_script_gd, Inbox, LocalView, Measurements, Message, Mode, NodeContext, NodeId, NodeProgram, Outbox,
    Protocol,
};
use crate::verify::ParityTuple;

/// Coefficients of
/// `q_E = e0 ⊕ e1 b0 ⊕ e2 b1 ⊕ e3 b2`, `q_R = r0 ⊕ r1 b0 ⊕ r2 b1`,
/// `q_B = s0 ⊕ s1 b1 ⊕ s2 b2`, `q_L = l0 ⊕ l1 b0 ⊕ l2 b2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineStrategy {
    pub e: [bool; 4],
    pub r: [bool; 3],
    pub s: [bool; 3],
    pub l: [bool; 3],
}

fn affine(coef: &[bool], vars: &[bool]) -> bool {
    coef[0] ^ coef[1..].iter().zip(vars).fold(false, |acc, (&c, &x)| acc ^ (c & x))
}

fn bits<const N: usize>(code: u16, offset: u32) -> [bool; N] {
    std::array::from_fn(|k| (code >> (offset + k as u32)) & 1 == 1)
}

impl AffineStrategy {
    /// Number of coefficient vectors: 16 for `q_E` times 8³ for the rest.
    pub const COUNT: u16 = 1 << 13;

    pub fn from_code(code: u16) -> Self {
        AffineStrategy { e: bits(code, 0), r: bits(code, 4), s: bits(code, 7), l: bits(code, 10) }
    }

    pub fn code(&self) -> u16 {
        let pack = |c: &[bool], offset: u32| c.iter().enumerate().fold(0u16, |a, (k, &b)| a | (b as u16) << (offset + k as u32));
        pack(&self.e, 0) | pack(&self.r, 4) | pack(&self.s, 7) | pack(&self.l, 10)
    }

    pub fn all() -> impl Iterator<Item = AffineStrategy> {
        (0..Self::COUNT).map(Self::from_code)
    }

    pub fn q_e(&self, b: TriangleInput) -> bool {
        affine(&self.e, &b.b)
    }

    pub fn q_r(&self, b0: bool, b1: bool) -> bool {
        affine(&self.r, &[b0, b1])
    }

    pub fn q_b(&self, b1: bool, b2: bool) -> bool {
        affine(&self.s, &[b1, b2])
    }

    pub fn q_l(&self, b0: bool, b2: bool) -> bool {
        affine(&self.l, &[b0, b2])
    }

    /// Parities the strategy produces on input `b`.
    pub fn parities(&self, b: TriangleInput) -> ParityTuple {
        let [b0, b1, b2] = b.b;
        ParityTuple { m_e: self.q_e(b), m_r: self.q_r(b0, b1), m_b: self.q_b(b1, b2), m_l: self.q_l(b0, b2) }
    }

    /// `q_R ⊕ q_B ⊕ q_L = 0` on all eight inputs.
    pub fn is_admissible(&self) -> bool {
        TriangleInput::all().all(|b| {
            let p = self.parities(b);
            !(p.m_r ^ p.m_b ^ p.m_l)
        })
    }

    /// Fewest rounds after which every node carrying a term sees the
    /// input bits the term depends on.
    pub fn required_rounds(&self) -> usize {
        let corner = self.e[1..].iter().any(|&c| c);
        let side = self.r[1..].iter().chain(&self.s[1..]).chain(&self.l[1..]).any(|&c| c);
        if side {
            2
        } else if corner {
            1
        } else {
            0
        }
    }

    /// Output bit of ring node `v_i` given the input bits it knows.
    /// Returns the index of a needed but unknown bit as the error.
    pub fn ring_output(&self, d: usize, i: usize, known: [Option<bool>; 3]) -> std::result::Result<bool, usize> {
        let var = |k: usize, coef: bool| -> std::result::Result<bool, usize> {
            if !coef {
                return Ok(false);
            }
            known[k].ok_or(k)
        };
        let mut x = false;
        if i == 0 {
            x ^= self.e[0] ^ var(0, self.e[1])?;
        }
        if i == d {
            x ^= var(1, self.e[2])?;
        }
        if i == 2 * d {
            x ^= var(2, self.e[3])?;
        }
        if i == 1 {
            x ^= self.r[0] ^ var(0, self.r[1])?;
        }
        if i == d - 1 {
            x ^= var(1, self.r[2])?;
        }
        if i == d + 1 {
            x ^= self.s[0] ^ var(1, self.s[1])?;
        }
        if i == 2 * d - 1 {
            x ^= var(2, self.s[2])?;
        }
        if i == 2 * d + 1 {
            x ^= self.l[0] ^ var(2, self.l[2])?;
        }
        if i == 3 * d - 1 {
            x ^= var(0, self.l[1])?;
        }
        Ok(x)
    }
}

impl fmt::Display for AffineStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |c: &[bool]| c.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(f, "E={} R={} B={} L={}", s(&self.e), s(&self.r), s(&self.s), s(&self.l))
    }
}

/// Extra randomization layered on an affine strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct AffineOptions {
    /// Input nodes draw their bit uniformly and output it.
    pub sample_inputs: bool,
    /// Output uniformly over all strings with the strategy's parities.
    pub coset_fill: bool,
    /// Offset `(m_R, m_B, m_L)` by a uniform admissible constant triple.
    pub mix_sides: bool,
    /// Flip `m_E` with probability 1/2.
    pub mix_even: bool,
}

impl AffineOptions {
    fn randomized(&self) -> bool {
        self.coset_fill || self.mix_sides || self.mix_even
    }
}

/// Whether ring node `v_i` draws a bit that flips both ring neighbors
/// without changing any parity.
fn fill_generator(d: usize, i: usize) -> bool {
    if i % 2 == 1 {
        i + 3 <= 3 * d
    } else {
        i % d != 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Ring(usize),
    Input(usize),
}

/// Classical node program realizing an [`AffineStrategy`]. Input bits are
/// flooded for the configured number of rounds; each ring node outputs the
/// strategy terms placed on it. Node identifiers are read modulo the copy
/// size, so the program also runs on disjoint copies.
#[derive(Clone, Debug)]
pub struct AffineProgram {
    d: usize,
    strategy: AffineStrategy,
    rounds: usize,
    options: AffineOptions,
    id: NodeId,
    label: Option<Label>,
    known: [Option<bool>; 3],
    flip_out: bool,
    flip_in: bool,
    own_flip: bool,
}

impl AffineProgram {
    pub fn new(d: usize, strategy: AffineStrategy, rounds: usize, options: AffineOptions) -> Self {
        AffineProgram {
            d,
            strategy,
            rounds,
            options,
            id: NodeId(0),
            label: None,
            known: [None; 3],
            flip_out: false,
            flip_in: false,
            own_flip: false,
        }
    }

    /// Checks the round budget and admissibility.
    pub fn validate(d: usize, strategy: &AffineStrategy, rounds: usize, options: AffineOptions) -> Result<()> {
        build_script_gd(d)?;
        if 2 * rounds > d {
            return Err(Error::arg(format!("affine strategies need T <= d/2, got T={rounds}, d={d}")));
        }
        if !strategy.is_admissible() {
            return Err(Error::arg(format!("strategy {strategy} violates q_R ⊕ q_B ⊕ q_L = 0")));
        }
        let need = strategy.required_rounds().max(options.randomized() as usize);
        if rounds < need {
            return Err(Error::arg(format!("strategy {strategy} needs at least {need} rounds, got {rounds}")));
        }
        Ok(())
    }

    fn label_of(&self, u: NodeId) -> Label {
        let local = u.0 as usize % copy_size(self.d);
        if local < 3 * self.d {
            Label::Ring(local)
        } else {
            Label::Input(local - 3 * self.d)
        }
    }

    fn ring_bits(&self, i: usize) -> (bool, bool, bool) {
        let fill = self.options.coset_fill && fill_generator(self.d, i);
        let side = self.options.mix_sides && (i == 0 || i == self.d);
        let even = self.options.mix_even && i == 0;
        (fill, side, even)
    }
}

impl NodeProgram for AffineProgram {
    fn randomness_bits(&self, view: &LocalView) -> usize {
        match self.label_of(view.self_id) {
            Label::Input(_) => self.options.sample_inputs as usize,
            Label::Ring(i) => {
                let (a, b, c) = self.ring_bits(i);
                a as usize + b as usize + c as usize
            }
        }
    }

    fn init(&mut self, view: &LocalView, input: Option<&[u8]>, randomness: Vec<bool>) -> Result<()> {
        let label = self.label_of(view.self_id);
        let mut random = randomness.into_iter();
        match label {
            Label::Input(k) => {
                let b = if self.options.sample_inputs {
                    random.next().expect("one random bit")
                } else {
                    match input {
                        Some([0]) => false,
                        Some([1]) => true,
                        _ => return Err(Error::arg(format!("input node {} needs one input bit", view.self_id))),
                    }
                };
                self.known[k] = Some(b);
            }
            Label::Ring(i) => {
                let (fill, side, even) = self.ring_bits(i);
                let mut take = |used: bool| used && random.next().expect("declared random bit");
                self.flip_out = take(fill) ^ take(side);
                self.own_flip = take(even);
            }
        }
        self.id = view.self_id;
        self.label = Some(label);
        Ok(())
    }

    fn round(&mut self, t: usize, inbox: &Inbox, ctx: &mut NodeContext<'_>) -> Result<Outbox> {
        for (&v, msg) in inbox {
            let [mask, values, flip] = msg.payload[..] else {
                if t == 0 {
                    continue;
                }
                return Err(Error::Protocol { node: ctx.node(), round: t, reason: format!("bad payload from {v}") });
            };
            for k in 0..3 {
                if mask >> k & 1 == 1 {
                    self.known[k] = Some(values >> k & 1 == 1);
                }
            }
            if t == 1 && flip == 1 && matches!(self.label_of(v), Label::Ring(_)) {
                self.flip_in ^= true;
            }
        }
        if t == self.rounds {
            return Ok(Outbox::new());
        }
        let mask = (0..3).filter(|&k| self.known[k].is_some()).fold(0u8, |a, k| a | 1 << k);
        let values = (0..3).filter(|&k| self.known[k] == Some(true)).fold(0u8, |a, k| a | 1 << k);
        let flip = (t == 0 && self.flip_out) as u8;
        Ok(inbox.keys().map(|&v| (v, Message::classical(vec![mask, values, flip]))).collect())
    }

    fn finalize(&self, _m: &mut Measurements<'_>) -> Result<Vec<u8>> {
        match self.label.expect("init runs first") {
            Label::Input(k) => Ok(if self.options.sample_inputs { vec![self.known[k].unwrap() as u8] } else { Vec::new() }),
            Label::Ring(i) => {
                let x = self.strategy.ring_output(self.d, i, self.known).map_err(|k| Error::Protocol {
                    node: self.id,
                    round: self.rounds,
                    reason: format!("ring node v{i} cannot see b{k}"),
                })?;
                Ok(vec![(x ^ self.flip_in ^ self.own_flip) as u8])
            }
        }
    }
}

/// Deterministic classical relation protocol for strategy `s` on input `b`.
pub fn affine_protocol(d: usize, s: AffineStrategy, rounds: usize, b: TriangleInput) -> Result<Protocol> {
    let options = AffineOptions::default();
    AffineProgram::validate(d, &s, rounds, options)?;
    let net = build_script_gd(d)?;
    Ok(Protocol::new(net.topology, rounds, Mode::Classical, move |_| {
        Box::new(AffineProgram::new(d, s, rounds, options)) as Box<dyn NodeProgram>
    })
    .with_inputs(triangle_inputs(d, &[b])))
}

/// Classical sampler: input nodes draw unbiased bits, ring nodes apply
/// strategy `s` with the given randomization.
pub fn affine_sampling_protocol(d: usize, s: AffineStrategy, rounds: usize, options: AffineOptions) -> Result<Protocol> {
    let options = AffineOptions { sample_inputs: true, ..options };
    AffineProgram::validate(d, &s, rounds, options)?;
    let net = build_script_gd(d)?;
    Ok(Protocol::new(net.topology, rounds, Mode::Classical, move |_| {
        Box::new(AffineProgram::new(d, s, rounds, options)) as Box<dyn NodeProgram>
    }))
}
