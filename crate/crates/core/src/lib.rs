//! Fine-grained multimodal reasoning pipeline for text-to-image alignment.
//!
//! The crate is organized around a fixed processing chain:
//!
//! 1. [`tuple`] — the tuple grammar: atomic semantic units (entities, parts,
//!    spatial relations, actions, attributes, counts, global style), their
//!    line format, and JSON envelope parsing.
//! 2. [`rewrite`] — deterministic schema normalization of raw decomposer
//!    output (token maps, label repair, de-baking, owner fixes).
//! 3. [`prune`] — summary grounding, trigger checks, closure with auto-add,
//!    subjectivity filtering, and budgeted soft pruning.
//! 4. [`gateway`] — one abstraction over all model calls (text LLM, VQA,
//!    image generation/editing) with an HTTP backend and a deterministic
//!    mock backend.
//! 5. [`reasoning`] — the iterative generate / verify / correct loop.
//! 6. [`data`] — construction of reasoning training samples from edit
//!    records and cross-prompt pairs.
//! 7. [`eval`] — judge FP/FN metrics, per-round category accuracy, and the
//!    feedback-perturbation experiment.

pub mod data;
pub mod eval;
pub mod gateway;
pub mod prune;
pub mod reasoning;
pub mod rewrite;
pub mod text;
pub mod tuple;

pub use tuple::{Tuple, TuplePlan};
