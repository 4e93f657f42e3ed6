//! The sensibility verdict pipeline and the built-in theory corpus.

mod pipeline;
mod probe;
mod registry;

pub use pipeline::{corpus_verdicts, revalidate_verdict, verdict, Attempt, Budget, PipelineContext, SensibilityVerdict};
pub use probe::{default_pool, probe_targets, probe_unsolvable_typing, UnsolvableProbe};
pub use registry::{ainf, builtin_theories, KnownStatus, RegistryEntry, TheoryRegistry, AUTO_MAPS, BUILTIN_SOURCES};
