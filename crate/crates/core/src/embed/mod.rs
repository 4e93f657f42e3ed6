//! Embeddings between theories: homomorphic extension of a constant map,
//! verification of the embedding conditions, and the certificates that move
//! (non-)sensibility along an embedding.

mod certificate;
mod map;
mod verify;

pub use certificate::{
    transfer_nonsensible, transfer_sensible, Conclusion, Evidence, HeadTrace, NonSensibleEvidence,
    SensibleEvidence, TransferCertificate, UnsolvableWitness,
};
pub use map::{commutes_with_canonical, extend_structurally, parse_map, render_map, ConstantMap};
pub use verify::{recheck, verify_embedding, Check, EmbeddingVerdict, Obligation};
