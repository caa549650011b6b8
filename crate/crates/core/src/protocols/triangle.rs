//! The triangle measurement process and its distributed implementations.

use std::collections::BTreeMap;

use super::affine::{AffineOptions, AffineProgram, AffineStrategy};
use super::subgraph::RegisterExchange;
use super::TriangleInput;
use crate::error::{Error, Result};
use crate::net::{
    build_gd, build_script_gd, role_of, Inbox, Inputs, LocalView, Measurements, Mode, NodeContext, NodeId,
    NodeProgram, Outbox, Outputs, Protocol, Role, Topology,
};
use crate::quantum::{build_graph_state, Bitstring, Gate, QubitId, StateVector};

pub const TRIANGLE_ROUNDS: usize = 2;

/// Nodes per copy of the augmented network.
pub fn copy_size(d: usize) -> usize {
    3 * d + 3
}

/// Centralized reference: graph state of the ring, `S^{b_i}` on corner
/// `v_{d i}`, then `H` on every qubit. Qubit `i` is ring node `v_i`.
pub fn process_pd(d: usize, b: TriangleInput) -> Result<StateVector> {
    let ring = build_gd(d)?;
    let mut state = build_graph_state(&ring.topology)?;
    for (i, &bit) in b.b.iter().enumerate() {
        state.apply(&Gate::SPower(bit, QubitId::from(d * i)))?;
    }
    for k in 0..3 * d {
        state.apply(&Gate::H(QubitId::from(k)))?;
    }
    Ok(state)
}

/// Whether input nodes read their bit from the input or draw it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleMode {
    Relation,
    Sampling,
}

/// Quantum node program for the augmented network. Roles come from the
/// degree only, so the program is independent of identifiers.
#[derive(Clone, Debug)]
pub struct TriangleProgram {
    mode: TriangleMode,
    view: Option<LocalView>,
    role: Option<Role>,
    b: bool,
    corner_b: bool,
    regs: RegisterExchange,
    q: Option<QubitId>,
}

impl TriangleProgram {
    pub fn new(mode: TriangleMode) -> Self {
        TriangleProgram {
            mode,
            view: None,
            role: None,
            b: false,
            corner_b: false,
            regs: RegisterExchange::default(),
            q: None,
        }
    }
}

fn protocol_error(ctx: &NodeContext<'_>, reason: impl Into<String>) -> Error {
    Error::Protocol { node: ctx.node(), round: ctx.round(), reason: reason.into() }
}

fn input_bit(node: NodeId, input: Option<&[u8]>) -> Result<bool> {
    match input {
        Some([0]) => Ok(false),
        Some([1]) => Ok(true),
        _ => Err(Error::arg(format!("input node {node} needs one input bit"))),
    }
}

impl NodeProgram for TriangleProgram {
    fn randomness_bits(&self, view: &LocalView) -> usize {
        match (self.mode, role_of(view)) {
            (TriangleMode::Sampling, Ok(Role::InputNode)) => 1,
            _ => 0,
        }
    }

    fn init(&mut self, view: &LocalView, input: Option<&[u8]>, randomness: Vec<bool>) -> Result<()> {
        let role = role_of(view)?;
        if role == Role::InputNode {
            self.b = match self.mode {
                TriangleMode::Relation => input_bit(view.self_id, input)?,
                TriangleMode::Sampling => randomness[0],
            };
        }
        self.regs = RegisterExchange::new(role != Role::InputNode);
        self.role = Some(role);
        self.view = Some(view.clone());
        Ok(())
    }

    fn round(&mut self, t: usize, inbox: &Inbox, ctx: &mut NodeContext<'_>) -> Result<Outbox> {
        let role = self.role.expect("init runs first");
        match t {
            0 => {
                let extra = if role == Role::InputNode { vec![self.b as u8] } else { Vec::new() };
                self.regs.start(self.view.as_ref().expect("init runs first"), ctx, &extra)
            }
            1 => {
                let (outbox, extras) = self.regs.exchange(inbox, ctx)?;
                if role == Role::Corner {
                    let bits: Vec<u8> = extras.values().filter_map(|e| e.first().copied()).collect();
                    match bits[..] {
                        [b] => self.corner_b = b != 0,
                        _ => return Err(protocol_error(ctx, "corner expects exactly one input neighbor")),
                    }
                }
                Ok(outbox)
            }
            2 => {
                let q = self.regs.finish(inbox, ctx)?;
                if role != Role::InputNode {
                    ctx.apply(Gate::SPower(role == Role::Corner && self.corner_b, q))?;
                    ctx.apply(Gate::H(q))?;
                }
                self.q = Some(q);
                Ok(Outbox::new())
            }
            _ => Err(protocol_error(ctx, "the triangle protocol uses exactly two rounds")),
        }
    }

    fn finalize(&self, m: &mut Measurements<'_>) -> Result<Vec<u8>> {
        match (self.role, self.mode) {
            (Some(Role::InputNode), TriangleMode::Relation) => Ok(Vec::new()),
            (Some(Role::InputNode), TriangleMode::Sampling) => Ok(vec![self.b as u8]),
            _ => {
                let q = self.q.ok_or_else(|| Error::arg("finalize before the last round"))?;
                Ok(vec![m.measure(q)? as u8])
            }
        }
    }
}

fn triangle_factory(mode: TriangleMode) -> impl Fn(NodeId) -> Box<dyn NodeProgram> + Send + Sync {
    move |_| Box::new(TriangleProgram::new(mode)) as Box<dyn NodeProgram>
}

/// Input map giving copy `c` of the network the triple `inputs[c]`.
pub fn triangle_inputs(d: usize, inputs: &[TriangleInput]) -> Inputs {
    let mut out = Inputs::new();
    for (c, b) in inputs.iter().enumerate() {
        for (i, &bit) in b.b.iter().enumerate() {
            out.insert(NodeId((c * copy_size(d) + 3 * d + i) as u32), vec![bit as u8]);
        }
    }
    out
}

/// `k` disjoint copies of the augmented network, copy `c` occupying
/// identifiers `c (3d+3) .. (c+1)(3d+3)`.
pub fn copies_topology(d: usize, k: usize) -> Result<Topology> {
    if k == 0 {
        return Err(Error::arg("at least one copy is required"));
    }
    let one = build_script_gd(d)?.topology;
    let parts = (0..k)
        .map(|c| {
            let shift = (c * copy_size(d)) as u32;
            let map: BTreeMap<NodeId, NodeId> = one.nodes().iter().map(|&u| (u, NodeId(u.0 + shift))).collect();
            one.relabel(&map)
        })
        .collect::<Result<Vec<_>>>()?;
    Topology::disjoint_union(&parts)
}

/// Quantum relation protocol on the augmented network with input `b`.
pub fn relation_protocol(d: usize, b: TriangleInput) -> Result<Protocol> {
    let net = build_script_gd(d)?;
    Ok(Protocol::new(net.topology, TRIANGLE_ROUNDS, Mode::Quantum, triangle_factory(TriangleMode::Relation))
        .with_inputs(triangle_inputs(d, &[b])))
}

/// Quantum sampling protocol: input nodes draw unbiased bits and output
/// them; ring nodes output their measurement bits.
pub fn sampling_protocol(d: usize) -> Result<Protocol> {
    let net = build_script_gd(d)?;
    Ok(Protocol::new(net.topology, TRIANGLE_ROUNDS, Mode::Quantum, triangle_factory(TriangleMode::Sampling)))
}

/// What each copy runs in [`k_copies_protocol`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopyStrategy {
    Quantum,
    /// Classical affine strategy with the given round count.
    Affine(AffineStrategy, usize),
}

/// Independent copies, copy `c` receiving `inputs[c]`.
pub fn k_copies_protocol(d: usize, inputs: &[TriangleInput], strategy: CopyStrategy) -> Result<Protocol> {
    let topology = copies_topology(d, inputs.len())?;
    let protocol = match strategy {
        CopyStrategy::Quantum => {
            Protocol::new(topology, TRIANGLE_ROUNDS, Mode::Quantum, triangle_factory(TriangleMode::Relation))
        }
        CopyStrategy::Affine(s, rounds) => {
            AffineProgram::validate(d, &s, rounds, AffineOptions::default())?;
            Protocol::new(topology, rounds, Mode::Classical, move |_| {
                Box::new(AffineProgram::new(d, s, rounds, AffineOptions::default())) as Box<dyn NodeProgram>
            })
        }
    };
    Ok(protocol.with_inputs(triangle_inputs(d, inputs)).allowing_disconnected())
}

fn output_bit(outputs: &Outputs, u: NodeId) -> Result<bool> {
    match outputs.get(&u).map(Vec::as_slice) {
        Some([0]) => Ok(false),
        Some([1]) => Ok(true),
        other => Err(Error::arg(format!("node {u} output {other:?}, expected one bit"))),
    }
}

/// Ring output `x_0 .. x_{3d-1}` of copy `copy`.
pub fn relation_output(d: usize, outputs: &Outputs, copy: usize) -> Result<Bitstring> {
    let base = copy * copy_size(d);
    let bits = (0..3 * d)
        .map(|i| output_bit(outputs, NodeId((base + i) as u32)))
        .collect::<Result<Vec<_>>>()?;
    Bitstring::from_bits(&bits)
}

/// Record `(b_0, b_1, b_2, x_0, ..., x_{3d-1})` of a sampling run.
pub fn sample_record(d: usize, outputs: &Outputs) -> Result<Bitstring> {
    let b = (0..3)
        .map(|i| output_bit(outputs, NodeId((3 * d + i) as u32)))
        .collect::<Result<Vec<_>>>()?;
    Bitstring::from_bits(&b)?.concat(&relation_output(d, outputs, 0)?)
}

/// Position labels of [`relation_output`].
pub fn relation_schema(d: usize) -> Vec<String> {
    (0..3 * d).map(|i| format!("x{i}")).collect()
}

/// Position labels of [`sample_record`].
pub fn sample_schema(d: usize) -> Vec<String> {
    ["b0", "b1", "b2"].iter().map(|s| s.to_string()).chain(relation_schema(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn process_is_normalized_and_sized() {
        let s = process_pd(2, TriangleInput::from_index(5)).unwrap();
        assert_eq!(s.num_qubits(), 6);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(process_pd(3, TriangleInput::default()).is_err());
    }

    #[test]
    fn relation_protocol_uses_two_rounds() {
        let exec = relation_protocol(2, TriangleInput::from_index(3)).unwrap().run(4).unwrap();
        assert_eq!(exec.trace.num_rounds(), 2);
        assert_eq!(relation_output(2, &exec.outputs, 0).unwrap().len(), 6);
        for i in 0..3 {
            assert_eq!(exec.outputs[&NodeId(6 + i)], Vec::<u8>::new());
        }
    }

    #[test]
    fn missing_input_is_an_argument_error() {
        let p = relation_protocol(2, TriangleInput::default()).unwrap().with_inputs(Inputs::new());
        assert!(matches!(p.run(0), Err(Error::Argument(_))));
    }

    #[test]
    fn copies_layout() {
        let t = copies_topology(2, 3).unwrap();
        assert_eq!(t.num_nodes(), 27);
        assert_eq!(t.components().len(), 3);
        assert!(copies_topology(2, 0).is_err());
    }

    #[test]
    fn sample_records_have_schema_width() {
        let exec = sampling_protocol(2).unwrap().run(9).unwrap();
        let rec = sample_record(2, &exec.outputs).unwrap();
        assert_eq!(rec.len(), sample_schema(2).len());
    }
}
