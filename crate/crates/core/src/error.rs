use std::fmt;

/// Identifies one of the six variable blocks of the alternating solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    TaskAllocation,
    CompressionRatio,
    CpuAllocation,
    PowerBandwidth,
    AltitudeBeamwidth,
    Location,
}

impl Block {
    pub const ALL: [Block; 6] = [
        Block::TaskAllocation,
        Block::CompressionRatio,
        Block::CpuAllocation,
        Block::PowerBandwidth,
        Block::AltitudeBeamwidth,
        Block::Location,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Block::TaskAllocation => "task_allocation",
            Block::CompressionRatio => "compression_ratio",
            Block::CpuAllocation => "cpu_allocation",
            Block::PowerBandwidth => "power_bandwidth",
            Block::AltitudeBeamwidth => "altitude_beamwidth",
            Block::Location => "location",
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to parse scenario: {0}")]
    Parse(String),

    #[error("invalid `{field}`: {rule}")]
    Invalid { field: String, rule: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{block} subproblem infeasible: {reason}")]
    Infeasible { block: Block, reason: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("problem too large: {0}")]
    Size(String),

    #[error("no grid point passes the filter")]
    EmptyGrid,

    #[error("unknown formula id `{0}`")]
    UnknownFormula(String),

    #[error("no iteration produced a latency-feasible state")]
    NeverFeasible(Box<crate::algorithm::SolveOutcome>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            rule: rule.into(),
        }
    }

    pub(crate) fn infeasible(block: Block, reason: impl Into<String>) -> Self {
        Error::Infeasible {
            block,
            reason: reason.into(),
        }
    }

    /// True for errors that describe the model rather than the input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::NeverFeasible(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
