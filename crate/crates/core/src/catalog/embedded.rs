//! Corpus files compiled into the library, keyed by path relative to the corpus root.

include!(concat!(env!("OUT_DIR"), "/corpus_files.rs"));
