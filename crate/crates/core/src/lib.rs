//! Argument component identification in user-generated web discourse.
//!
//! The crate covers the whole pipeline: a corpus model with validation and
//! majority-vote gold construction ([`corpus`]), the sentence-level BIO
//! approximation ([`encoding`]), agreement and diagnostic metrics
//! ([`agreement`]), sentence features ([`features`]), a linear-chain labeler
//! trained with the averaged structured perceptron ([`labeler`]), a document
//! persuasiveness classifier ([`persuasiveness`]) and the experiment harness
//! ([`evaluation`]).

pub mod agreement;
pub mod corpus;
pub mod encoding;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod labeler;
pub mod par;
pub mod persuasiveness;
pub mod synth;

pub use corpus::{ComponentSpan, ComponentType, Corpus, Document, Register, Topic};
pub use encoding::{BioLabel, SentenceLabeling};
pub use error::{Error, Result};
pub use par::Exec;
