//! Gold annotations: per-sentence reply tags, the post-processing that turns
//! them into reply-to links, and the thread partitions those links induce.

mod links;
mod postprocess;
mod reader;
mod tags;

pub use links::{
    links_to_partition, partition_to_links_previousstyle, read_links, write_links, GoldLinks, LinkRecord,
    ThreadPartition,
};
pub use postprocess::{
    links_to_tags, postprocess, write_annotations, AnnotationWarning, GoldScene, IdMapping, PostProcessed,
};
pub use reader::{
    read_annotations, AnnotatedItem, AnnotatedScene, AnnotatedUtterance, AnnotationTable, ColumnMap, LineReference,
    ReaderConfig,
};
pub use tags::{AnnotationTag, StartFlavor};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnnotationError {
    #[error("row {row}: unknown annotation tag {tag:?}")]
    UnknownTag { row: usize, tag: String },
    #[error("column {0:?} not found in table header")]
    ColumnMissing(String),
    #[error("row {row}: {tags} tags but {sentences} sentences")]
    SentenceCountMismatch { row: usize, tags: usize, sentences: usize },
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("{utt_id} replies to {target}, which does not survive post-processing")]
    DanglingReply { utt_id: String, target: String },
    #[error("{utt_id} replies forward to {target}")]
    ForwardReply { utt_id: String, target: String },
    #[error("links are not a forest at {utt_id}")]
    NotAForest { utt_id: String },
    #[error("{0}")]
    Io(String),
}
