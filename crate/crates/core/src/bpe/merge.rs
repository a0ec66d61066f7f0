use super::{MergeRule, TokenId, Tokenizer};
use crate::error::{Error, Result};

/// Extend `base` with the tokens and merges of `addition`.
///
/// Addition tokens whose bytes are already in the base keep their base id;
/// the rest are appended in addition id order. Addition merges are re-targeted
/// to the merged ids and ranked after every base merge; a merge whose pair the
/// base already ranks is dropped. Specials are matched by name.
pub fn merge_vocab(base: &Tokenizer, addition: &Tokenizer) -> Result<Tokenizer> {
    if base.vocab.byte_ids().is_none() {
        return Err(Error::IncompatibleVocab("base vocabulary lacks the 256 byte tokens".into()));
    }
    let mut vocab = base.vocab.clone();
    let mut remap: Vec<TokenId> = Vec::with_capacity(addition.vocab.len());
    for (_, bytes, special) in addition.vocab.iter() {
        let id = if special {
            vocab.add_special(std::str::from_utf8(bytes).map_err(|_| Error::InvalidUtf8)?)
        } else {
            vocab.add_token(bytes)
        };
        remap.push(id);
    }
    let mut merges = base.merges.clone();
    let mut seen: std::collections::HashSet<(TokenId, TokenId)> = base.ranks.keys().copied().collect();
    for m in &addition.merges {
        let (left, right, result) = (remap[m.left as usize], remap[m.right as usize], remap[m.result as usize]);
        if seen.insert((left, right)) {
            merges.push(MergeRule { rank: merges.len() as u32, left, right, result });
        }
    }
    Tokenizer::new(vocab, merges)
}
