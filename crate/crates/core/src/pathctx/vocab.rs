use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::encode::{PAD, UNK};
use super::paths::PathContext;
use super::PathCtxError;

const PAD_TOKEN: &str = "<PAD>";
const UNK_TOKEN: &str = "<UNK>";

/// Terminal and path vocabularies. Index 0 is PAD and index 1 is UNK in both;
/// real tokens follow in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    terminals: Vec<String>,
    paths: Vec<String>,
    terminal_index: HashMap<String, u32>,
    path_index: HashMap<String, u32>,
}

/// Inspection dump: `{"terminals": {...}, "paths": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabDump {
    pub terminals: BTreeMap<String, u32>,
    pub paths: BTreeMap<String, u32>,
}

fn table(tokens: Vec<String>) -> (Vec<String>, HashMap<String, u32>) {
    let mut list = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
    list.extend(tokens);
    let index = list.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
    (list, index)
}

impl Vocab {
    pub fn from_tokens(terminals: Vec<String>, paths: Vec<String>) -> Self {
        let (terminals, terminal_index) = table(terminals);
        let (paths, path_index) = table(paths);
        Vocab { terminals, paths, terminal_index, path_index }
    }

    /// Number of terminal rows, PAD and UNK included.
    pub fn terminal_count(&self) -> usize {
        self.terminals.len()
    }

    /// Number of path rows, PAD and UNK included.
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn terminal(&self, token: &str) -> u32 {
        self.terminal_index.get(token).copied().unwrap_or(UNK)
    }

    pub fn path(&self, key: &str) -> u32 {
        self.path_index.get(key).copied().unwrap_or(UNK)
    }

    pub fn terminal_name(&self, idx: u32) -> Option<&str> {
        self.terminals.get(idx as usize).map(String::as_str)
    }

    pub fn path_name(&self, idx: u32) -> Option<&str> {
        self.paths.get(idx as usize).map(String::as_str)
    }

    /// Real tokens only, in index order.
    pub fn terminal_tokens(&self) -> &[String] {
        &self.terminals[2..]
    }

    pub fn path_tokens(&self) -> &[String] {
        &self.paths[2..]
    }

    pub fn dump(&self) -> VocabDump {
        let map = |list: &[String]| list.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        VocabDump { terminals: map(&self.terminals), paths: map(&self.paths) }
    }

    pub fn from_dump(dump: &VocabDump) -> Option<Self> {
        fn ordered(map: &BTreeMap<String, u32>) -> Option<Vec<String>> {
            let mut list = vec![None; map.len()];
            for (tok, &i) in map {
                *list.get_mut(i as usize)? = Some(tok.clone());
            }
            let list: Vec<String> = list.into_iter().collect::<Option<_>>()?;
            (list.len() >= 2 && list[PAD as usize] == PAD_TOKEN && list[UNK as usize] == UNK_TOKEN)
                .then_some(list)
        }
        let terminals = ordered(&dump.terminals)?;
        let paths = ordered(&dump.paths)?;
        Some(Vocab::from_tokens(terminals[2..].to_vec(), paths[2..].to_vec()))
    }

    /// SHA-256 over both token lists, used to tie checkpoints to their vocab.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for list in [&self.terminals, &self.paths] {
            for t in list {
                h.update(t.as_bytes());
                h.update([0u8]);
            }
            h.update([0xffu8]);
        }
        hex::encode(h.finalize())
    }
}

/// Indexes every terminal and path occurring at least `min_count` times.
pub fn build_vocab<'a, I>(corpus: I, min_count: usize) -> Result<Vocab, PathCtxError>
where
    I: IntoIterator<Item = &'a [PathContext]>,
{
    let mut terminals: BTreeMap<&str, usize> = BTreeMap::new();
    let mut paths: BTreeMap<String, usize> = BTreeMap::new();
    let mut docs = 0usize;
    for contexts in corpus {
        docs += 1;
        for ctx in contexts {
            *terminals.entry(&ctx.start).or_default() += 1;
            *terminals.entry(&ctx.end).or_default() += 1;
            *paths.entry(ctx.path_key()).or_default() += 1;
        }
    }
    if docs == 0 {
        return Err(PathCtxError::EmptyCorpus);
    }
    let keep = |(tok, n): (String, usize)| (n >= min_count).then_some(tok);
    let terminals = terminals.into_iter().map(|(t, n)| (t.to_string(), n)).filter_map(keep).collect();
    let paths = paths.into_iter().filter_map(keep).collect();
    Ok(Vocab::from_tokens(terminals, paths))
}
