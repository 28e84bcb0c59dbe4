//! Conversation disentanglement for screenplays: parsing, gold annotation
//! ingestion, reply-to link prediction, thread metrics and corpus analytics.

pub mod analytics;
pub mod annotation;
pub mod linkmodel;
pub mod metrics;
pub mod screenplay;
pub mod threading;
