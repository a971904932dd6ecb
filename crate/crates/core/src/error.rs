use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("newick syntax error at byte {pos}: {msg}")]
    Newick { pos: usize, msg: String },

    #[error("duplicate taxon label `{0}`")]
    DuplicateLabel(String),

    #[error("empty taxon label")]
    EmptyLabel,

    #[error("branch length must be positive, got {value} (byte {pos})")]
    NonPositiveLength { pos: usize, value: String },

    #[error("a tree needs at least 2 taxa, found {0}")]
    TooFewTaxa(usize),

    #[error("table is {rows}x{cols} but {labels} labels were given")]
    Shape {
        rows: usize,
        cols: usize,
        labels: usize,
    },

    #[error("asymmetric entries d({x},{y}) = {xy} and d({y},{x}) = {yx}")]
    Asymmetric {
        x: String,
        y: String,
        xy: String,
        yx: String,
    },

    #[error("negative entry d({x},{y}) = {value}")]
    Negative { x: String, y: String, value: String },

    #[error("nonzero diagonal entry d({x},{x}) = {value}")]
    NonzeroDiagonal { x: String, value: String },

    #[error(
        "triangle inequality violated: d({x},{y}) = {direct} > d({x},{z}) + d({z},{y}) = {detour}"
    )]
    Triangle {
        x: String,
        z: String,
        y: String,
        direct: String,
        detour: String,
    },

    #[error("taxon sets differ")]
    TaxonMismatch,

    #[error("unknown taxon `{0}`")]
    UnknownTaxon(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("edge {0} is not an internal edge between two unlabeled degree-3 vertices")]
    NotInternalEdge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("cycle enumeration limited to {cap} vertices, graph has {vertices}")]
    CycleCapExceeded { cap: usize, vertices: usize },

    #[error("semimetrics disagree on the shared block at ({0}, {1})")]
    AmalgamationMismatch(String, String),

    #[error("matched distances violate the quadrangle inequalities at ({0}, {1})")]
    NotExtendable(String, String),

    #[error("malformed input: {0}")]
    Input(String),

    #[error("internal solver failure: {msg}\n{dump}")]
    Internal { msg: String, dump: String },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
