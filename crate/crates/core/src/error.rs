use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors reported by graph construction and analysis operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A node id does not exist in the graph it was used with.
    NodeOutOfRange { index: u32, node_count: usize },
    /// An explicit label universe contains the same label twice.
    DuplicateLabel { label: String },
    /// Edge endpoints that could not be resolved against the label universe.
    UnresolvedLabels { labels: Vec<String> },
    /// The operation requires a nonempty graph.
    EmptyGraph,
    /// A parameter violates the operation's preconditions.
    Parameter { message: String },
}

impl Error {
    pub(crate) fn parameter(message: impl Into<String>) -> Self {
        Error::Parameter {
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NodeOutOfRange { index, node_count } => {
                write!(f, "node id {index} out of range for graph with {node_count} nodes")
            }
            Error::DuplicateLabel { label } => write!(f, "duplicate label {label:?}"),
            Error::UnresolvedLabels { labels } => {
                write!(f, "unresolved edge endpoint labels: ")?;
                for (i, l) in labels.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    if i == 8 {
                        return write!(f, "... ({} total)", labels.len());
                    }
                    write!(f, "{l:?}")?;
                }
                Ok(())
            }
            Error::EmptyGraph => write!(f, "operation requires a nonempty graph"),
            Error::Parameter { message } => write!(f, "{message}"),
        }
    }
}

impl core::error::Error for Error {}
