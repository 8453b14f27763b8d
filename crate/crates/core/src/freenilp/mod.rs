//! Free nilpotent Lie algebras: Hall bases, exact BCH, and word certificates.

mod elem;
mod hall;
mod series;
mod synth;
mod word;

pub use elem::{bch, bch_many, FreeNilpElem};
pub use hall::{hall_basis, letter_name, witt_count, HallBasis, HallTree};
pub use series::{Series, TruncAlg};
pub use synth::{
    iterate_sum_word, synthesize_bracket_word, synthesize_sum_word, synthesize_with_budget,
    IteratedWord, SynthesisError, Target, WordCertificate, DEFAULT_LETTER_BUDGET,
    MAX_ITERATED_ARITY, MAX_SYNTHESIS_CLASS,
};
pub use word::{free_log_of_tree, free_log_of_word, GroupWord, WordError, WordTree};
