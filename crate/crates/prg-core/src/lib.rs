//! Combinatorial core for restriction-based pseudorandomness experiments.
//!
//! The building blocks are:
//!
//! - [`bits`]: packed bit strings and index sets over `[n]`.
//! - [`restriction`]: partial assignments over `{0,1,*}^n`, their composition
//!   and set-based merging.
//! - [`formula`]: DNF/CNF formulas with ordered terms, restriction
//!   simplification and bit-parallel evaluation.
//! - [`circuit`]: layered AND/OR circuits with NOT absorbed into literals,
//!   measured in wires.
//! - [`truth`]: truth tables and an exact (memoized minimax) decision-tree
//!   depth oracle.
//! - [`canonical`]: the canonical decision tree procedure, its transcripts and
//!   the canonical-tree depth.
//! - [`partial`]: common partial decision trees for formula families, the
//!   exhaustive existence oracle and the canonical partial decision tree.
//! - [`witness`]: query-transcript witnesses, witness searchers, witness CNF
//!   testers, powerful refutations and witness enumeration.
//! - [`text`]: line-oriented DNF/CNF files, s-expression circuits and
//!   `01*` restriction strings.

pub mod bits;
pub mod canonical;
pub mod circuit;
pub mod formula;
pub mod partial;
pub mod restriction;
pub mod text;
pub mod tree;
pub mod truth;
pub mod witness;

pub use bits::{BitString, BitsError, VarSet};
pub use canonical::{
    canonical_dt_run, canonical_dt_run_limited, cdt_depth, cdt_depth_seq, CanonicalError,
    CanonicalTranscript, FnOracle, ResponseOracle, RunOutcome, TranscriptStep,
};
pub use circuit::{Ac0Circuit, CircuitError, Gate, GateInput, GateKind};
pub use formula::{
    enumeration_columns, BooleanFn, CnfFormula, DnfFormula, FormulaError, Literal, Measures, Term,
    TermStatus,
};
pub use partial::{
    canonical_partial_dt_run, BlockOracle, CertificateError, CommonTree, FamilyDtOracle,
    FnBlockOracle, PartialDtCertificate, PartialDtError, PartialDtRun, PartialRunStage,
};
pub use restriction::{Cell, Restriction, RestrictionError};
pub use tree::{DecisionTree, TreeError};
pub use truth::{count_satisfying, expectation_uniform, DtError, DtOracle, TruthTable};
pub use witness::{
    build_global_witness_cnf, build_witness_cnf, complete_partial_witness,
    enumerate_global_partial_witnesses, enumerate_partial_witnesses,
    enumerate_partial_witnesses_of_size, find_powerful_refutation, global_witness_search,
    is_global_witness, is_witness, replay_refutation, witness_search, witness_search_decoupled,
    GlobalPartialStage, GlobalPartialWitness, GlobalStage, GlobalWitness, PartialWitness,
    Refutation, RefutationError, SearchError, StagePattern, Witness, WitnessCnfError,
    WitnessError, WitnessJson, WitnessJsonStage,
};
