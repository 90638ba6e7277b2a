//! Dense indexed set over `0..n` with O(1) insert, remove, and uniform
//! sampling by position — the bookkeeping behind the active-set scheduler.

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct IndexedSet {
    items: Vec<u32>,
    slot: Vec<u32>,
}

impl IndexedSet {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity < ABSENT as usize, "site count too large");
        Self {
            items: Vec::new(),
            slot: vec![ABSENT; capacity],
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn contains(&self, value: usize) -> bool {
        self.slot[value] != ABSENT
    }

    pub fn insert(&mut self, value: usize) {
        if self.slot[value] == ABSENT {
            self.slot[value] = self.items.len() as u32;
            self.items.push(value as u32);
        }
    }

    pub fn remove(&mut self, value: usize) {
        let pos = self.slot[value];
        if pos == ABSENT {
            return;
        }
        let last = self.items.pop().expect("slot map out of sync");
        if last as usize != value {
            self.items[pos as usize] = last;
            self.slot[last as usize] = pos;
        }
        self.slot[value] = ABSENT;
    }

    /// Member at position `pos` (positions shuffle on removal; only uniform
    /// sampling over `0..len()` is meaningful).
    pub fn get(&self, pos: usize) -> usize {
        self.items[pos] as usize
    }
}
