//! Order maintenance: circularly linked lists with integer labels.
//!
//! Order queries are O(1) label comparisons. Labels are 64-bit and
//! globally ascending: each list draws its labels from a fresh range of
//! size M = 2^32 handed out by `allocate_range`, so a list created later
//! sits entirely to the right of one created earlier and `append_right`
//! is a constant-time splice.
//!
//! Inserts take the slot after their anchor when one is free; when the
//! local gap is exhausted, a window of following records is relabeled
//! evenly over its span (amortized O(log n) relabelings per insert). A
//! whole-list relabel fallback can be switched on as a correctness oracle
//! for the windowed scheme.

use crate::instrument::{Counters, Instr};
use std::cell::RefCell;
use std::rc::Rc;
use thiserror::Error;

pub const NONE: usize = usize::MAX;

/// Label range size per sub-order.
pub const RANGE: u64 = 1 << 32;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("anchor item {0} missing")]
    AnchorMissing(usize),
    #[error("item {0} already present")]
    Duplicate(usize),
    #[error("item {0} missing")]
    Missing(usize),
    #[error("appended list's labels do not lie above this list's")]
    RangeOverlap,
    #[error("label universe exhausted")]
    UniverseExhausted,
}

#[derive(Debug, Clone)]
struct Rec {
    item: usize,
    label: u64,
    prev: usize,
    next: usize,
}

#[derive(Debug)]
pub struct OrderArenaInner {
    recs: Vec<Rec>,
    free: Vec<usize>,
    item_rec: Vec<usize>,
    next_base: u64,
    /// Relabel the whole list on overflow instead of a window (oracle mode).
    pub naive_relabel: bool,
    instr: Instr,
}

pub type OrderArena = Rc<RefCell<OrderArenaInner>>;

pub fn new_order_arena(instr: Instr) -> OrderArena {
    Rc::new(RefCell::new(OrderArenaInner {
        recs: Vec::new(),
        free: Vec::new(),
        item_rec: Vec::new(),
        next_base: 0,
        naive_relabel: false,
        instr,
    }))
}

impl OrderArenaInner {
    fn alloc_rec(&mut self, item: usize, label: u64) -> usize {
        let rec = Rec {
            item,
            label,
            prev: NONE,
            next: NONE,
        };
        if let Some(i) = self.free.pop() {
            self.recs[i] = rec;
            i
        } else {
            self.recs.push(rec);
            self.recs.len() - 1
        }
    }

    fn lookup(&self, item: usize) -> Option<usize> {
        self.item_rec.get(item).copied().filter(|&r| r != NONE)
    }
}

/// One sub-order: a circular list anchored at a sentinel record. The
/// sentinel carries the range base label; real labels grow from there.
#[derive(Debug)]
pub struct OrderList {
    arena: OrderArena,
    sentinel: usize,
    /// Exclusive upper bound for labels in this list.
    ceiling: u64,
    len: usize,
}

impl OrderList {
    /// Allocate a fresh label range and an empty list over it.
    pub fn new(arena: OrderArena) -> Result<Self, OrderError> {
        let (sentinel, ceiling) = {
            let mut a = arena.borrow_mut();
            let base = a.next_base;
            let ceiling = base.checked_add(RANGE).ok_or(OrderError::UniverseExhausted)?;
            a.next_base = ceiling;
            let s = a.alloc_rec(usize::MAX, base);
            a.recs[s].prev = s;
            a.recs[s].next = s;
            (s, ceiling)
        };
        Ok(OrderList {
            arena,
            sentinel,
            ceiling,
            len: 0,
        })
    }

    pub fn arena(&self) -> OrderArena {
        Rc::clone(&self.arena)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn base(&self) -> u64 {
        self.arena.borrow().recs[self.sentinel].label
    }

    pub fn contains(&self, item: usize) -> bool {
        self.arena.borrow().lookup(item).is_some()
    }

    /// Insert `item` as the new first element (right after the sentinel).
    pub fn push_front(&mut self, item: usize) -> Result<(), OrderError> {
        self.insert_after_rec(self.sentinel, item)
    }

    /// Insert `item` immediately after `anchor`.
    pub fn insert_after(&mut self, anchor: usize, item: usize) -> Result<(), OrderError> {
        let r = {
            let a = self.arena.borrow();
            a.lookup(anchor).ok_or(OrderError::AnchorMissing(anchor))?
        };
        self.insert_after_rec(r, item)
    }

    /// Insert `item` as the new last element (right before the sentinel).
    pub fn push_back(&mut self, item: usize) -> Result<(), OrderError> {
        let tail = self.arena.borrow().recs[self.sentinel].prev;
        self.insert_after_rec(tail, item)
    }

    fn insert_after_rec(&mut self, at: usize, item: usize) -> Result<(), OrderError> {
        {
            let a = self.arena.borrow();
            if a.lookup(item).is_some() {
                return Err(OrderError::Duplicate(item));
            }
        }
        self.ensure_gap(at)?;
        let mut a = self.arena.borrow_mut();
        Counters::bump(&a.instr.order_inserts, 1);
        let next = a.recs[at].next;
        let lo = a.recs[at].label;
        let hi = if next == self.sentinel {
            self.ceiling
        } else {
            a.recs[next].label
        };
        debug_assert!(hi - lo >= 2, "ensure_gap must leave room");
        let label = lo + 1;
        let _ = hi;
        let r = a.alloc_rec(item, label);
        if item >= a.item_rec.len() {
            a.item_rec.resize(item + 1, NONE);
        }
        a.item_rec[item] = r;
        a.recs[r].prev = at;
        a.recs[r].next = next;
        a.recs[at].next = r;
        a.recs[next].prev = r;
        self.len += 1;
        Ok(())
    }

    /// Make sure there is a free label right after `at`, relabeling a
    /// window of following records when the local gap is exhausted.
    fn ensure_gap(&mut self, at: usize) -> Result<(), OrderError> {
        let needs = {
            let a = self.arena.borrow();
            let next = a.recs[at].next;
            let hi = if next == self.sentinel {
                self.ceiling
            } else {
                a.recs[next].label
            };
            hi - a.recs[at].label < 2
        };
        if !needs {
            return Ok(());
        }
        let naive = self.arena.borrow().naive_relabel;
        if naive {
            return self.relabel_all();
        }
        let mut a = self.arena.borrow_mut();
        // grow a window of following records until its span can host them
        // evenly with room to spare
        let lo = a.recs[at].label;
        let mut window: Vec<usize> = Vec::new();
        let mut r = a.recs[at].next;
        loop {
            if r == self.sentinel {
                break;
            }
            window.push(r);
            r = a.recs[r].next;
            let bound = if r == self.sentinel {
                self.ceiling
            } else {
                a.recs[r].label
            };
            let k = window.len() as u64;
            if bound - lo >= 4 * (k + 1) {
                break;
            }
        }
        let bound = if r == self.sentinel {
            self.ceiling
        } else {
            a.recs[r].label
        };
        let k = window.len() as u64;
        if bound - lo < 2 * (k + 1) {
            return Err(OrderError::UniverseExhausted);
        }
        let step = (bound - lo) / (k + 1);
        let mut label = lo;
        for &w in &window {
            label += step;
            a.recs[w].label = label;
        }
        Counters::bump(&a.instr.order_relabels, k);
        Ok(())
    }

    /// Oracle mode: spread every record evenly across the whole range.
    fn relabel_all(&mut self) -> Result<(), OrderError> {
        let mut a = self.arena.borrow_mut();
        let base = a.recs[self.sentinel].label;
        let span = self.ceiling - base;
        let n = self.len as u64;
        if span < 2 * (n + 2) {
            return Err(OrderError::UniverseExhausted);
        }
        let step = span / (n + 2);
        let mut label = base;
        let mut r = a.recs[self.sentinel].next;
        while r != self.sentinel {
            label += step;
            a.recs[r].label = label;
            r = a.recs[r].next;
        }
        Counters::bump(&a.instr.order_relabels, n);
        Ok(())
    }

    pub fn delete(&mut self, item: usize) -> Result<(), OrderError> {
        let mut a = self.arena.borrow_mut();
        Counters::bump(&a.instr.order_deletes, 1);
        let r = a.lookup(item).ok_or(OrderError::Missing(item))?;
        let (p, n) = (a.recs[r].prev, a.recs[r].next);
        a.recs[p].next = n;
        a.recs[n].prev = p;
        a.item_rec[item] = NONE;
        a.free.push(r);
        self.len -= 1;
        Ok(())
    }

    /// Does `x` precede `y`? O(1) label comparison; irreflexive.
    pub fn precedes(&self, x: usize, y: usize) -> Result<bool, OrderError> {
        let a = self.arena.borrow();
        Counters::bump(&a.instr.order_comparisons, 1);
        let rx = a.lookup(x).ok_or(OrderError::Missing(x))?;
        let ry = a.lookup(y).ok_or(OrderError::Missing(y))?;
        Ok(a.recs[rx].label < a.recs[ry].label)
    }

    pub fn label_of(&self, item: usize) -> Result<u64, OrderError> {
        let a = self.arena.borrow();
        let r = a.lookup(item).ok_or(OrderError::Missing(item))?;
        Ok(a.recs[r].label)
    }

    /// Item before `item`, None when `item` is first.
    pub fn prev_item(&self, item: usize) -> Result<Option<usize>, OrderError> {
        let a = self.arena.borrow();
        let r = a.lookup(item).ok_or(OrderError::Missing(item))?;
        let p = a.recs[r].prev;
        Ok(if p == self.sentinel {
            None
        } else {
            Some(a.recs[p].item)
        })
    }

    /// Anchor handle usable with `insert_after_pos` to insert at the
    /// very front.
    pub fn front_anchor(&self) -> OrderPos {
        OrderPos(self.sentinel)
    }

    /// Position of the record before `item` (possibly the sentinel).
    pub fn prev_pos(&self, item: usize) -> Result<OrderPos, OrderError> {
        let a = self.arena.borrow();
        let r = a.lookup(item).ok_or(OrderError::Missing(item))?;
        Ok(OrderPos(a.recs[r].prev))
    }

    /// Last item of the list, None when empty.
    pub fn back(&self) -> Option<usize> {
        let a = self.arena.borrow();
        let p = a.recs[self.sentinel].prev;
        if p == self.sentinel {
            None
        } else {
            Some(a.recs[p].item)
        }
    }

    pub fn pos_of(&self, item: usize) -> Result<OrderPos, OrderError> {
        let a = self.arena.borrow();
        Ok(OrderPos(a.lookup(item).ok_or(OrderError::Missing(item))?))
    }

    /// Insert after a positional cursor (sentinel allowed); returns the new
    /// item's position.
    pub fn insert_after_pos(&mut self, pos: OrderPos, item: usize) -> Result<OrderPos, OrderError> {
        self.insert_after_rec(pos.0, item)?;
        let a = self.arena.borrow();
        Ok(OrderPos(a.item_rec[item]))
    }

    /// Concatenate: `other`'s elements follow all of ours. O(1) splices;
    /// `other`'s labels must lie strictly above ours.
    pub fn append_right(&mut self, other: OrderList) -> Result<(), OrderError> {
        debug_assert!(Rc::ptr_eq(&self.arena, &other.arena));
        {
            let a = self.arena.borrow();
            Counters::bump(&a.instr.order_appends, 1);
            if other.len > 0 {
                let my_max = if self.len == 0 {
                    a.recs[self.sentinel].label
                } else {
                    a.recs[a.recs[self.sentinel].prev].label
                };
                let their_min = a.recs[a.recs[other.sentinel].next].label;
                if their_min <= my_max {
                    return Err(OrderError::RangeOverlap);
                }
            }
        }
        let mut a = self.arena.borrow_mut();
        if other.len > 0 {
            let o_first = a.recs[other.sentinel].next;
            let o_last = a.recs[other.sentinel].prev;
            let my_last = a.recs[self.sentinel].prev;
            a.recs[my_last].next = o_first;
            a.recs[o_first].prev = my_last;
            a.recs[o_last].next = self.sentinel;
            a.recs[self.sentinel].prev = o_last;
        }
        a.free.push(other.sentinel);
        self.ceiling = self.ceiling.max(other.ceiling);
        self.len += other.len;
        Ok(())
    }

    /// Sort `items` into list order; O(k log k) comparisons.
    pub fn sort_subset(&self, items: &mut [usize]) -> Result<(), OrderError> {
        let labels: Vec<(u64, usize)> = {
            let a = self.arena.borrow();
            items
                .iter()
                .map(|&it| {
                    a.lookup(it)
                        .map(|r| (a.recs[r].label, it))
                        .ok_or(OrderError::Missing(it))
                })
                .collect::<Result<_, _>>()?
        };
        let mut pairs = labels;
        let a = self.arena.borrow();
        let cmp_count = (pairs.len() as f64 * (pairs.len().max(2) as f64).log2()).ceil() as u64;
        Counters::bump(&a.instr.order_comparisons, cmp_count);
        pairs.sort_unstable();
        for (slot, (_, it)) in items.iter_mut().zip(pairs.into_iter()) {
            *slot = it;
        }
        Ok(())
    }

    /// Items in order, sentinel excluded. For audits and tests.
    pub fn to_vec(&self) -> Vec<usize> {
        let a = self.arena.borrow();
        let mut out = Vec::with_capacity(self.len);
        let mut r = a.recs[self.sentinel].next;
        while r != self.sentinel {
            out.push(a.recs[r].item);
            r = a.recs[r].next;
        }
        out
    }

    /// Drop all records, freeing items for reuse elsewhere.
    pub fn clear(&mut self) {
        let mut a = self.arena.borrow_mut();
        let mut r = a.recs[self.sentinel].next;
        while r != self.sentinel {
            let next = a.recs[r].next;
            let item = a.recs[r].item;
            a.item_rec[item] = NONE;
            a.free.push(r);
            r = next;
        }
        let s = self.sentinel;
        a.recs[s].next = s;
        a.recs[s].prev = s;
        self.len = 0;
    }
}

/// Opaque cursor into a list (a record index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderPos(usize);

/// Fresh label base strictly above everything issued so far.
pub fn allocate_range(arena: &OrderArena) -> Result<u64, OrderError> {
    let mut a = arena.borrow_mut();
    let base = a.next_base;
    a.next_base = base.checked_add(RANGE).ok_or(OrderError::UniverseExhausted)?;
    Ok(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::new_counters;

    fn list() -> OrderList {
        OrderList::new(new_order_arena(new_counters())).unwrap()
    }

    #[test]
    fn insert_and_order() {
        let mut l = list();
        l.push_back(1).unwrap();
        l.insert_after(1, 2).unwrap();
        assert!(l.precedes(1, 2).unwrap());
        assert!(!l.precedes(2, 1).unwrap());
        assert!(!l.precedes(1, 1).unwrap());
        assert_eq!(l.to_vec(), vec![1, 2]);
        assert_eq!(l.insert_after(9, 3), Err(OrderError::AnchorMissing(9)));
        assert_eq!(l.insert_after(1, 2), Err(OrderError::Duplicate(2)));
    }

    #[test]
    fn repeated_inserts_after_same_anchor_reverse() {
        let mut l = list();
        l.push_back(0).unwrap();
        for i in 1..=64 {
            l.insert_after(0, i).unwrap();
        }
        let v = l.to_vec();
        assert_eq!(v[0], 0);
        let expect: Vec<usize> = (1..=64).rev().collect();
        assert_eq!(&v[1..], &expect[..]);
    }

    #[test]
    fn delete_cases() {
        let mut l = list();
        l.push_back(5).unwrap();
        l.delete(5).unwrap();
        assert!(l.is_empty());
        for i in 0..3 {
            l.push_back(i).unwrap();
        }
        l.delete(1).unwrap();
        assert!(l.precedes(0, 2).unwrap());
        assert_eq!(l.delete(1), Err(OrderError::Missing(1)));
    }

    #[test]
    fn append_right_behaviour() {
        let arena = new_order_arena(new_counters());
        let mut a = OrderList::new(Rc::clone(&arena)).unwrap();
        let mut b = OrderList::new(Rc::clone(&arena)).unwrap();
        a.push_back(1).unwrap();
        b.push_back(2).unwrap();
        a.append_right(b).unwrap();
        assert_eq!(a.to_vec(), vec![1, 2]);
        assert!(a.precedes(1, 2).unwrap());
        // appending an empty list is identity
        let b2 = OrderList::new(Rc::clone(&arena)).unwrap();
        a.append_right(b2).unwrap();
        assert_eq!(a.to_vec(), vec![1, 2]);
    }

    #[test]
    fn append_rejects_lower_ranges() {
        let arena = new_order_arena(new_counters());
        let mut a = OrderList::new(Rc::clone(&arena)).unwrap();
        let mut b = OrderList::new(Rc::clone(&arena)).unwrap();
        a.push_back(1).unwrap();
        b.push_back(2).unwrap();
        // b's labels are above a's, so appending a to b overlaps
        assert_eq!(b.append_right(a), Err(OrderError::RangeOverlap));
    }

    #[test]
    fn allocate_range_bases() {
        let arena = new_order_arena(new_counters());
        // two lists already consumed two ranges above; a fresh arena:
        let arena2 = new_order_arena(new_counters());
        assert_eq!(allocate_range(&arena2).unwrap(), 0);
        assert_eq!(allocate_range(&arena2).unwrap(), RANGE);
        let _ = arena;
    }

    #[test]
    fn sort_subset_cases() {
        let mut l = list();
        for i in 0..10 {
            l.push_back(i).unwrap();
        }
        let mut s = vec![7];
        l.sort_subset(&mut s).unwrap();
        assert_eq!(s, vec![7]);
        let mut s = vec![9, 2];
        l.sort_subset(&mut s).unwrap();
        assert_eq!(s, vec![2, 9]);
        let mut s = vec![4, 0, 8, 6, 2];
        l.sort_subset(&mut s).unwrap();
        assert_eq!(s, vec![0, 2, 4, 6, 8]);
    }

    #[test]
    fn dense_middle_inserts_trigger_relabeling() {
        let mut l = list();
        l.push_back(100_000).unwrap();
        l.push_back(100_001).unwrap();
        // keep inserting between the same two records
        let mut prev = 100_000;
        for i in 0..5000 {
            l.insert_after(prev, i).unwrap();
            prev = i;
        }
        let v = l.to_vec();
        assert_eq!(v.len(), 5002);
        assert_eq!(v[0], 100_000);
        assert_eq!(*v.last().unwrap(), 100_001);
        for w in v.windows(2) {
            assert!(l.precedes(w[0], w[1]).unwrap());
        }
    }
}
