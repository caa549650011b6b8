use serde::{Deserialize, Serialize};

use super::{NodeId, Outputs};
use crate::quantum::QubitId;

/// One edge direction in one exchange round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub round: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub payload_bytes: usize,
    pub qubits: Vec<QubitId>,
}

/// All edge directions of exchange round `round` (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: usize,
    pub transfers: Vec<TransferRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
struct OutputRecord<'a> {
    node: NodeId,
    output: &'a [u8],
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub rounds: Vec<RoundRecord>,
    pub outputs: Outputs,
}

impl ExecutionTrace {
    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn transfers(&self) -> impl Iterator<Item = &TransferRecord> + '_ {
        self.rounds.iter().flat_map(|r| r.transfers.iter())
    }

    /// One JSON object per line: every (round, edge, direction), then one
    /// line per node output.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for t in self.transfers() {
            out.push_str(&serde_json::to_string(t).expect("transfer record serializes"));
            out.push('\n');
        }
        for (&node, output) in &self.outputs {
            let rec = OutputRecord { node, output };
            out.push_str(&serde_json::to_string(&rec).expect("output record serializes"));
            out.push('\n');
        }
        out
    }
}
