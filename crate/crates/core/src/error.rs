use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// What went wrong while reading Newick text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// A parenthesised group with other than two members.
    NonBinary { arity: usize },
    DuplicateLeaf(String),
    Unbalanced,
    /// Internal node name that is not one of `Spec`, `Dup`, `Creat`.
    UnknownLabel(String),
    UnexpectedChar(char),
    EmptyName,
    BadBranchLength(String),
    MissingTerminator,
    Empty,
}

impl core::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NonBinary { arity } => write!(f, "non-binary vertex with {arity} children"),
            Self::DuplicateLeaf(name) => write!(f, "duplicate leaf name `{name}`"),
            Self::Unbalanced => f.write_str("unbalanced parentheses"),
            Self::UnknownLabel(label) => write!(f, "unknown internal label `{label}`"),
            Self::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            Self::EmptyName => f.write_str("leaf without a name"),
            Self::BadBranchLength(s) => write!(f, "invalid branch length `{s}`"),
            Self::MissingTerminator => f.write_str("missing `;` terminator"),
            Self::Empty => f.write_str("no tree found"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("newick parse error at offset {offset}: {kind}")]
    Parse { offset: usize, kind: ParseErrorKind },

    #[error("duplicate leaf name `{0}`")]
    DuplicateLeaf(String),

    #[error("unknown leaf `{0}`")]
    UnknownLeaf(String),

    #[error("empty leaf set")]
    EmptyLeafSet,

    #[error("node reused while building a tree")]
    MalformedTree,

    #[error("no mapping for leaf `{0}`")]
    MissingMapping(String),

    #[error("leaf `{leaf}` maps to `{target}`, which is not a leaf of the target tree")]
    DanglingTarget { leaf: String, target: String },

    #[error("target leaf `{0}` is not the image of any source leaf")]
    NotSurjective(String),

    #[error("mapping is not a bijection: `{0}` has more than one preimage")]
    NotBijective(String),

    #[error("instance size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("inconsistent subtree family: {0}")]
    InconsistentFamily(String),

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, kind: ParseErrorKind) -> Self {
        Self::Parse { offset, kind }
    }
}
