//! The triangle ring `G_d` and its input-augmented version.
//!
//! Ring node `v_i` has identifier `i` for `0 <= i < 3d`; input node `w_i`
//! has identifier `3d + i`. Corners are `v_0`, `v_d`, `v_{2d}`.

use std::collections::BTreeSet;

use super::{LocalView, NodeId, Topology};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// Degree 1: `w_0`, `w_1`, `w_2`.
    InputNode,
    /// Degree 3: `v_0`, `v_d`, `v_{2d}`.
    Corner,
    /// Degree 2: every other ring node.
    Side,
}

/// Role of a node in an augmented triangle network, from its degree alone.
pub fn role_of(view: &LocalView) -> Result<Role> {
    match view.degree() {
        1 => Ok(Role::InputNode),
        2 => Ok(Role::Side),
        3 => Ok(Role::Corner),
        k => Err(Error::Topology(format!("node {} has degree {k}; not a triangle network", view.self_id))),
    }
}

/// Node sets of the ring used to define parities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub right: BTreeSet<NodeId>,
    pub bottom: BTreeSet<NodeId>,
    pub left: BTreeSet<NodeId>,
    pub even: BTreeSet<NodeId>,
    pub odd: BTreeSet<NodeId>,
}

/// The ring of `3d` nodes, or the ring plus three input nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GdNetwork {
    pub d: usize,
    pub topology: Topology,
    pub partition: Partition,
}

impl GdNetwork {
    pub fn ring_len(&self) -> usize {
        3 * self.d
    }

    pub fn ring_node(&self, i: usize) -> NodeId {
        NodeId(i as u32)
    }

    /// Corner `v_{d i}` for `i` in `0..3`.
    pub fn corner(&self, i: usize) -> NodeId {
        NodeId((self.d * i) as u32)
    }

    /// Input node `w_i`, present only in the augmented network.
    pub fn input_node(&self, i: usize) -> NodeId {
        NodeId((3 * self.d + i) as u32)
    }

    pub fn ring_nodes(&self) -> Vec<NodeId> {
        (0..self.ring_len()).map(|i| self.ring_node(i)).collect()
    }

    pub fn is_augmented(&self) -> bool {
        self.topology.num_nodes() == 3 * self.d + 3
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::arg(format!("d must be even and at least 2, got {d}")));
    }
    Ok(())
}

fn partition(d: usize) -> Partition {
    let range = |lo: usize, hi: usize| (lo..hi).map(|i| NodeId(i as u32)).collect::<BTreeSet<_>>();
    Partition {
        right: range(1, d),
        bottom: range(d + 1, 2 * d),
        left: range(2 * d + 1, 3 * d),
        even: (0..3 * d).step_by(2).map(|i| NodeId(i as u32)).collect(),
        odd: (1..3 * d).step_by(2).map(|i| NodeId(i as u32)).collect(),
    }
}

/// The ring `G_d` on `3d` nodes.
pub fn build_gd(d: usize) -> Result<GdNetwork> {
    check_d(d)?;
    let n = 3 * d as u32;
    let topology = Topology::new(0..n, (0..n).map(|i| (i, (i + 1) % n)))?;
    Ok(GdNetwork { d, topology, partition: partition(d) })
}

/// `G_d` with input node `w_i` attached to corner `v_{d i}`.
pub fn build_script_gd(d: usize) -> Result<GdNetwork> {
    check_d(d)?;
    let n = 3 * d as u32;
    let ring = (0..n).map(|i| (i, (i + 1) % n));
    let spokes = (0..3u32).map(|i| (i * d as u32, n + i));
    let topology = Topology::new(0..n + 3, ring.chain(spokes))?;
    Ok(GdNetwork { d, topology, partition: partition(d) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(degree: usize) -> LocalView {
        LocalView { self_id: NodeId(0), neighbors: (1..=degree as u32).map(NodeId).collect(), num_nodes: 9 }
    }

    #[test]
    fn sizes() {
        let g = build_gd(2).unwrap();
        assert_eq!((g.topology.num_nodes(), g.topology.num_edges()), (6, 6));
        let s = build_script_gd(2).unwrap();
        assert_eq!((s.topology.num_nodes(), s.topology.num_edges()), (9, 9));
        assert!(s.is_augmented() && !g.is_augmented());
    }

    #[test]
    fn sides_at_d4() {
        let g = build_gd(4).unwrap();
        assert_eq!(g.topology.num_nodes(), 12);
        assert_eq!(g.partition.right, [1, 2, 3].map(NodeId).into());
        assert_eq!(g.partition.bottom, [5, 6, 7].map(NodeId).into());
        assert_eq!(g.partition.left, [9, 10, 11].map(NodeId).into());
        assert_eq!(g.partition.even.len(), 6);
    }

    #[test]
    fn bad_d() {
        for d in [0, 1, 3, 5] {
            assert!(matches!(build_gd(d), Err(Error::Argument(_))));
            assert!(matches!(build_script_gd(d), Err(Error::Argument(_))));
        }
    }

    #[test]
    fn roles_follow_degrees() {
        assert_eq!(role_of(&view(1)).unwrap(), Role::InputNode);
        assert_eq!(role_of(&view(2)).unwrap(), Role::Side);
        assert_eq!(role_of(&view(3)).unwrap(), Role::Corner);
        assert!(matches!(role_of(&view(4)), Err(Error::Topology(_))));
        assert!(matches!(role_of(&view(0)), Err(Error::Topology(_))));
    }

    #[test]
    fn neighborhood_of_input_node() {
        let g = build_script_gd(4).unwrap();
        let w0 = g.input_node(0);
        let ball = g.topology.neighborhood(w0, 1).unwrap();
        assert_eq!(ball, [w0, g.corner(0)].into());
        for u in g.topology.nodes() {
            let deg = g.topology.degree(*u).unwrap();
            let expected = if u.0 >= 12 { 1 } else if u.0 % 4 == 0 { 3 } else { 2 };
            assert_eq!(deg, expected);
        }
    }
}
