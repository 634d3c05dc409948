use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

/// Bidirectional token ↔ identifier table.
///
/// Identifiers are dense and assigned in insertion order, so two vocabularies
/// built from the same token stream are identical.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the identifier of `token`, inserting it if unseen.
    pub fn get_or_insert(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(String::from(token));
        self.ids.insert(String::from(token), id);
        id
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in identifier order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

impl<S: AsRef<str>> FromIterator<S> for Vocabulary {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut vocab = Vocabulary::new();
        for token in iter {
            vocab.get_or_insert(token.as_ref());
        }
        vocab
    }
}
