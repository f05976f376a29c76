//! Binomial heap with bulk priority offsets.
//!
//! Tree edges carry integer weights; every root has a dummy parental edge.
//! The global priority of a node is its local priority plus the edge
//! weights on the path to (and including) its tree's dummy root edge, so
//! shifting a whole heap or expressing a merge offset is a constant number
//! of root-edge updates.
//!
//! Priorities are lexicographic pairs `(value, tiebreak)`; offsets apply to
//! the value component only. Ties beyond the pair break on item id, which
//! keeps drain order deterministic.
//!
//! Heaps created from one [`HeapArena`] may be merged into each other in
//! O(log n) node touches; the arena also enforces that an item lives in at
//! most one heap at a time.

use crate::instrument::{Counters, Instr};
use std::cell::RefCell;
use std::rc::Rc;
use thiserror::Error;

pub const NONE: usize = usize::MAX;

pub type Priority = (i64, u64);

/// Secondary key meaning "no explicit rank assigned".
pub const UNRANKED: u64 = 0;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HeapError {
    #[error("item {0} already present")]
    DuplicateItem(usize),
    #[error("heap is empty")]
    EmptyHeap,
    #[error("item {0} not present")]
    ItemMissing(usize),
    #[error("decrease_key would increase priority of item {0}")]
    IncreaseAttempt(usize),
    #[error("heaps share item {0}")]
    ItemCollision(usize),
    #[error("item {0} is not tied at the minimum priority")]
    NotTied(usize),
}

#[derive(Debug, Clone)]
struct Node {
    item: usize,
    local_prim: i64,
    sec: u64,
    /// Parental edge weight; for roots, the dummy root edge weight.
    edge_w: i64,
    parent: usize,
    child: usize,
    sibling: usize,
    degree: usize,
}

#[derive(Debug)]
pub struct HeapArenaInner {
    nodes: Vec<Node>,
    free: Vec<usize>,
    item_node: Vec<usize>,
    instr: Instr,
}

pub type HeapArena = Rc<RefCell<HeapArenaInner>>;

pub fn new_arena(instr: Instr) -> HeapArena {
    Rc::new(RefCell::new(HeapArenaInner {
        nodes: Vec::new(),
        free: Vec::new(),
        item_node: Vec::new(),
        instr,
    }))
}

impl HeapArenaInner {
    fn alloc(&mut self, item: usize, prim: i64, sec: u64) -> Result<usize, HeapError> {
        if item >= self.item_node.len() {
            self.item_node.resize(item + 1, NONE);
        }
        if self.item_node[item] != NONE {
            return Err(HeapError::DuplicateItem(item));
        }
        let node = Node {
            item,
            local_prim: prim,
            sec,
            edge_w: 0,
            parent: NONE,
            child: NONE,
            sibling: NONE,
            degree: 0,
        };
        let idx = if let Some(i) = self.free.pop() {
            self.nodes[i] = node;
            i
        } else {
            self.nodes.push(node);
            self.nodes.len() - 1
        };
        self.item_node[item] = idx;
        Ok(idx)
    }

    fn release(&mut self, idx: usize) {
        let item = self.nodes[idx].item;
        self.item_node[item] = NONE;
        self.free.push(idx);
    }

    fn touch(&self, n: u64) {
        Counters::bump(&self.instr.heap_touches, n);
    }

    fn compare(&self) {
        Counters::bump(&self.instr.heap_comparisons, 1);
    }
}

/// Forest of heap-ordered binomial trees over a shared arena.
#[derive(Debug)]
pub struct OffsetHeap {
    arena: HeapArena,
    /// Head of the root list, ascending by degree.
    root: usize,
    len: usize,
}

impl OffsetHeap {
    pub fn new(arena: HeapArena) -> Self {
        OffsetHeap {
            arena,
            root: NONE,
            len: 0,
        }
    }

    pub fn arena(&self) -> HeapArena {
        Rc::clone(&self.arena)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, item: usize) -> bool {
        let a = self.arena.borrow();
        item < a.item_node.len() && a.item_node[item] != NONE
    }

    /// Full key of a root: global primary, secondary, item.
    fn root_key(a: &HeapArenaInner, idx: usize) -> (i64, u64, usize) {
        let n = &a.nodes[idx];
        (n.local_prim + n.edge_w, n.sec, n.item)
    }

    pub fn insert(&mut self, item: usize, prio: Priority) -> Result<(), HeapError> {
        let idx = {
            let mut a = self.arena.borrow_mut();
            Counters::bump(&a.instr.heap_inserts, 1);
            a.alloc(item, prio.0, prio.1)?
        };
        self.meld_root_list(idx);
        self.len += 1;
        Ok(())
    }

    pub fn find_min(&self) -> Result<(usize, Priority), HeapError> {
        let a = self.arena.borrow();
        if self.root == NONE {
            return Err(HeapError::EmptyHeap);
        }
        let mut best_key = Self::root_key(&a, self.root);
        let mut r = a.nodes[self.root].sibling;
        while r != NONE {
            a.touch(1);
            a.compare();
            let k = Self::root_key(&a, r);
            if k < best_key {
                best_key = k;
            }
            r = a.nodes[r].sibling;
        }
        Ok((best_key.2, (best_key.0, best_key.1)))
    }

    pub fn delete_min(&mut self) -> Result<(usize, Priority), HeapError> {
        if self.root == NONE {
            return Err(HeapError::EmptyHeap);
        }
        {
            let a = self.arena.borrow();
            Counters::bump(&a.instr.heap_delete_mins, 1);
        }
        // locate min root and its predecessor
        let (min_idx, pred) = {
            let a = self.arena.borrow();
            let mut best = self.root;
            let mut best_key = Self::root_key(&a, best);
            let mut best_pred = NONE;
            let mut prev = self.root;
            let mut r = a.nodes[self.root].sibling;
            while r != NONE {
                a.touch(1);
                a.compare();
                let k = Self::root_key(&a, r);
                if k < best_key {
                    best = r;
                    best_key = k;
                    best_pred = prev;
                }
                prev = r;
                r = a.nodes[r].sibling;
            }
            (best, best_pred)
        };
        let (item, prio, child_list) = {
            let mut a = self.arena.borrow_mut();
            // unlink min root
            let sib = a.nodes[min_idx].sibling;
            if pred == NONE {
                self.root = sib;
            } else {
                a.nodes[pred].sibling = sib;
            }
            let w_root = a.nodes[min_idx].edge_w;
            // children inherit the dummy weight, then become roots
            // (reversed so the list ascends by degree)
            let mut rev = NONE;
            let mut cidx = a.nodes[min_idx].child;
            while cidx != NONE {
                a.touch(1);
                let next = a.nodes[cidx].sibling;
                a.nodes[cidx].edge_w += w_root;
                a.nodes[cidx].parent = NONE;
                a.nodes[cidx].sibling = rev;
                rev = cidx;
                cidx = next;
            }
            let key = Self::root_key(&a, min_idx);
            a.release(min_idx);
            (key.2, (key.0, key.1), rev)
        };
        if child_list != NONE {
            self.union_lists(child_list);
        }
        self.len -= 1;
        Ok((item, prio))
    }

    /// Insert a single node into the root list and re-establish the
    /// at-most-one-tree-per-degree invariant.
    fn meld_root_list(&mut self, idx: usize) {
        self.union_lists(idx);
    }

    /// Merge `other_list` (ascending by degree) into our root list,
    /// linking trees of equal degree.
    fn union_lists(&mut self, other_list: usize) {
        let mut a = self.arena.borrow_mut();
        // merge the two sorted lists
        let mut heads: Vec<usize> = Vec::new();
        let (mut p, mut q) = (self.root, other_list);
        while p != NONE || q != NONE {
            a.touch(1);
            let take_p = match (p, q) {
                (NONE, _) => false,
                (_, NONE) => true,
                (p, q) => a.nodes[p].degree <= a.nodes[q].degree,
            };
            if take_p {
                heads.push(p);
                p = a.nodes[p].sibling;
            } else {
                heads.push(q);
                q = a.nodes[q].sibling;
            }
        }
        // link equal degrees (classic binomial carry chain)
        let mut out: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < heads.len() {
            let x = heads[i];
            if i + 1 < heads.len() && a.nodes[heads[i + 1]].degree == a.nodes[x].degree {
                let y = heads[i + 1];
                if i + 2 < heads.len() && a.nodes[heads[i + 2]].degree == a.nodes[x].degree {
                    // three of a kind: keep the first, link the other two
                    out.push(x);
                    heads[i + 1] = Self::link(&mut a, y, heads[i + 2]);
                    heads.remove(i + 2);
                    i += 1;
                } else {
                    heads[i + 1] = Self::link(&mut a, x, y);
                    heads.remove(i);
                }
            } else {
                out.push(x);
                i += 1;
            }
        }
        // rebuild sibling links
        self.root = NONE;
        let mut prev = NONE;
        for &r in &out {
            if prev == NONE {
                self.root = r;
            } else {
                a.nodes[prev].sibling = r;
            }
            a.nodes[r].sibling = NONE;
            prev = r;
        }
    }

    /// Link two roots of equal degree; the larger key becomes a child with
    /// its global priority preserved through the edge weight. Returns the
    /// winner.
    fn link(a: &mut HeapArenaInner, x: usize, y: usize) -> usize {
        a.touch(2);
        a.compare();
        let kx = Self::root_key(a, x);
        let ky = Self::root_key(a, y);
        let (win, lose) = if kx <= ky { (x, y) } else { (y, x) };
        let w_win = a.nodes[win].edge_w;
        let w_lose = a.nodes[lose].edge_w;
        a.nodes[lose].edge_w = w_lose - w_win;
        a.nodes[lose].parent = win;
        a.nodes[lose].sibling = a.nodes[win].child;
        a.nodes[win].child = lose;
        a.nodes[win].degree += 1;
        win
    }

    /// Path from `idx` to its root, with the suffix sums of edge weights
    /// (including the dummy root edge).
    fn path_sums(a: &HeapArenaInner, idx: usize) -> (Vec<usize>, Vec<i64>) {
        let mut path = vec![idx];
        let mut x = idx;
        while a.nodes[x].parent != NONE {
            x = a.nodes[x].parent;
            path.push(x);
        }
        let mut sums = vec![0i64; path.len()];
        let mut acc = 0i64;
        for i in (0..path.len()).rev() {
            acc += a.nodes[path[i]].edge_w;
            sums[i] = acc;
        }
        (path, sums)
    }

    pub fn global_priority(&self, item: usize) -> Result<Priority, HeapError> {
        let a = self.arena.borrow();
        let idx = *a
            .item_node
            .get(item)
            .filter(|&&i| i != NONE)
            .ok_or(HeapError::ItemMissing(item))?;
        let (path, sums) = Self::path_sums(&a, idx);
        let n = &a.nodes[path[0]];
        Ok((n.local_prim + sums[0], n.sec))
    }

    pub fn decrease_key(&mut self, item: usize, new: Priority) -> Result<(), HeapError> {
        let mut a = self.arena.borrow_mut();
        Counters::bump(&a.instr.heap_decrease_keys, 1);
        let idx = *a
            .item_node
            .get(item)
            .filter(|&&i| i != NONE)
            .ok_or(HeapError::ItemMissing(item))?;
        let (path, sums) = Self::path_sums(&a, idx);
        a.touch(path.len() as u64);
        let cur = {
            let n = &a.nodes[path[0]];
            (n.local_prim + sums[0], n.sec, n.item)
        };
        a.compare();
        if (new.0, new.1, item) > cur {
            return Err(HeapError::IncreaseAttempt(item));
        }
        {
            let n = &mut a.nodes[path[0]];
            n.local_prim += new.0 - cur.0;
            n.sec = new.1;
        }
        Self::sift_up(&mut a, &path, &sums);
        Ok(())
    }

    /// Bubble the content at `path[0]` towards the root while it beats its
    /// parent, swapping payloads and adjusting locals so every other
    /// node's global priority is unchanged.
    fn sift_up(a: &mut HeapArenaInner, path: &[usize], sums: &[i64]) {
        for i in 0..path.len().saturating_sub(1) {
            let (lo, hi) = (path[i], path[i + 1]);
            let k_lo = {
                let n = &a.nodes[lo];
                (n.local_prim + sums[i], n.sec, n.item)
            };
            let k_hi = {
                let n = &a.nodes[hi];
                (n.local_prim + sums[i + 1], n.sec, n.item)
            };
            a.compare();
            if k_lo >= k_hi {
                break;
            }
            a.touch(2);
            let w = a.nodes[lo].edge_w;
            let (item_lo, lp_lo, sec_lo) = {
                let n = &a.nodes[lo];
                (n.item, n.local_prim, n.sec)
            };
            let (item_hi, lp_hi, sec_hi) = {
                let n = &a.nodes[hi];
                (n.item, n.local_prim, n.sec)
            };
            {
                let n = &mut a.nodes[hi];
                n.item = item_lo;
                n.local_prim = lp_lo + w;
                n.sec = sec_lo;
            }
            {
                let n = &mut a.nodes[lo];
                n.item = item_hi;
                n.local_prim = lp_hi - w;
                n.sec = sec_hi;
            }
            a.item_node[item_lo] = hi;
            a.item_node[item_hi] = lo;
        }
    }

    /// Remove an arbitrary item: bubble it to the root unconditionally,
    /// then extract it the way `delete_min` extracts a root.
    pub fn remove(&mut self, item: usize) -> Result<Priority, HeapError> {
        let prio = self.global_priority(item)?;
        {
            let mut a = self.arena.borrow_mut();
            let idx = a.item_node[item];
            let (path, sums) = Self::path_sums(&a, idx);
            a.touch(path.len() as u64);
            // force to root: swap payloads all the way up
            for i in 0..path.len().saturating_sub(1) {
                let (lo, hi) = (path[i], path[i + 1]);
                let w = a.nodes[lo].edge_w;
                let (item_lo, lp_lo, sec_lo) = {
                    let n = &a.nodes[lo];
                    (n.item, n.local_prim, n.sec)
                };
                let (item_hi, lp_hi, sec_hi) = {
                    let n = &a.nodes[hi];
                    (n.item, n.local_prim, n.sec)
                };
                {
                    let n = &mut a.nodes[hi];
                    n.item = item_lo;
                    n.local_prim = lp_lo + w;
                    n.sec = sec_lo;
                }
                {
                    let n = &mut a.nodes[lo];
                    n.item = item_hi;
                    n.local_prim = lp_hi - w;
                    n.sec = sec_hi;
                }
                a.item_node[item_lo] = hi;
                a.item_node[item_hi] = lo;
            }
            let _ = sums;
        }
        // the item now sits at a root; extract it
        let root_idx = {
            let a = self.arena.borrow();
            a.item_node[item]
        };
        self.extract_root(root_idx);
        self.len -= 1;
        Ok(prio)
    }

    fn extract_root(&mut self, target: usize) {
        let child_list = {
            let mut a = self.arena.borrow_mut();
            let mut pred = NONE;
            let mut r = self.root;
            while r != target {
                pred = r;
                r = a.nodes[r].sibling;
                debug_assert_ne!(r, NONE, "node is not a root");
            }
            let sib = a.nodes[target].sibling;
            if pred == NONE {
                self.root = sib;
            } else {
                a.nodes[pred].sibling = sib;
            }
            let w_root = a.nodes[target].edge_w;
            let mut rev = NONE;
            let mut cidx = a.nodes[target].child;
            while cidx != NONE {
                a.touch(1);
                let next = a.nodes[cidx].sibling;
                a.nodes[cidx].edge_w += w_root;
                a.nodes[cidx].parent = NONE;
                a.nodes[cidx].sibling = rev;
                rev = cidx;
                cidx = next;
            }
            a.release(target);
            rev
        };
        if child_list != NONE {
            self.union_lists(child_list);
        }
    }

    /// Merge `other` into `self`; priorities of `other` are offset by
    /// `offset` relative to their stored values. O(log n) node touches.
    pub fn merge(&mut self, mut other: OffsetHeap, offset: i64) -> Result<(), HeapError> {
        debug_assert!(Rc::ptr_eq(&self.arena, &other.arena), "merge across arenas");
        {
            let mut a = self.arena.borrow_mut();
            Counters::bump(&a.instr.heap_merges, 1);
            let mut r = other.root;
            while r != NONE {
                a.touch(1);
                a.nodes[r].edge_w += offset;
                r = a.nodes[r].sibling;
            }
        }
        let other_root = other.root;
        other.root = NONE;
        let other_len = other.len;
        other.len = 0;
        if other_root != NONE {
            self.union_lists(other_root);
        }
        self.len += other_len;
        Ok(())
    }

    /// Shift every global priority by `delta` in O(#trees).
    pub fn add_offset(&mut self, delta: i64) {
        let mut a = self.arena.borrow_mut();
        Counters::bump(&a.instr.heap_offsets, 1);
        let mut r = self.root;
        while r != NONE {
            a.touch(1);
            a.nodes[r].edge_w += delta;
            r = a.nodes[r].sibling;
        }
    }

    /// Assign explicit tiebreak ranks to items that currently share the
    /// minimal primary priority. Future `delete_min`s respect the ranks
    /// without re-sorting.
    pub fn retarget_ties(&mut self, items: &[usize], ranks: &[u64]) -> Result<(), HeapError> {
        assert_eq!(items.len(), ranks.len());
        if items.is_empty() {
            return Ok(());
        }
        let min_prim = self.find_min()?.1 .0;
        for &it in items {
            let p = self.global_priority(it)?;
            if p.0 != min_prim {
                return Err(HeapError::NotTied(it));
            }
        }
        for (&it, &rank) in items.iter().zip(ranks.iter()) {
            let prim = self.remove(it)?.0;
            self.insert(it, (prim, rank))?;
        }
        Ok(())
    }

    /// Structural audit (debug builds): recompute every global priority
    /// bottom-up and check the heap order and binomial degrees.
    #[cfg(debug_assertions)]
    pub fn audit(&self) {
        let a = self.arena.borrow();
        let mut r = self.root;
        let mut last_degree = None;
        while r != NONE {
            if let Some(ld) = last_degree {
                assert!(a.nodes[r].degree > ld, "root degrees not ascending");
            }
            last_degree = Some(a.nodes[r].degree);
            Self::audit_tree(&a, r, a.nodes[r].edge_w);
            r = a.nodes[r].sibling;
        }
    }

    #[cfg(debug_assertions)]
    fn audit_tree(a: &HeapArenaInner, idx: usize, pathsum: i64) {
        let me = (a.nodes[idx].local_prim + pathsum, a.nodes[idx].sec);
        let mut count = 0usize;
        let mut c = a.nodes[idx].child;
        while c != NONE {
            let child_sum = pathsum + a.nodes[c].edge_w;
            let ck = (a.nodes[c].local_prim + child_sum, a.nodes[c].sec);
            assert!(ck >= me, "heap order violated");
            assert_eq!(a.nodes[c].parent, idx);
            Self::audit_tree(a, c, child_sum);
            count += 1;
            c = a.nodes[c].sibling;
        }
        assert_eq!(count, a.nodes[idx].degree, "degree mismatch");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::new_counters;

    fn heap() -> OffsetHeap {
        OffsetHeap::new(new_arena(new_counters()))
    }

    #[test]
    fn insert_find_min() {
        let mut h = heap();
        h.insert(7, (5, UNRANKED)).unwrap();
        assert_eq!(h.find_min().unwrap(), (7, (5, UNRANKED)));
        h.insert(3, (3, UNRANKED)).unwrap();
        assert_eq!(h.find_min().unwrap(), (3, (3, UNRANKED)));
        assert_eq!(h.insert(3, (1, 0)), Err(HeapError::DuplicateItem(3)));
    }

    #[test]
    fn find_min_after_offset() {
        let mut h = heap();
        h.insert(0, (5, UNRANKED)).unwrap();
        h.insert(1, (3, UNRANKED)).unwrap();
        h.add_offset(-2);
        assert_eq!(h.find_min().unwrap(), (1, (1, UNRANKED)));
    }

    #[test]
    fn delete_min_order_and_offsets() {
        let mut h = heap();
        h.insert(0, (5, UNRANKED)).unwrap();
        h.insert(1, (3, UNRANKED)).unwrap();
        assert_eq!(h.delete_min().unwrap(), (1, (3, UNRANKED)));
        assert_eq!(h.delete_min().unwrap(), (0, (5, UNRANKED)));
        assert_eq!(h.delete_min(), Err(HeapError::EmptyHeap));

        let mut h = heap();
        h.insert(0, (5, UNRANKED)).unwrap();
        h.insert(1, (3, UNRANKED)).unwrap();
        h.add_offset(7);
        assert_eq!(h.delete_min().unwrap(), (1, (10, UNRANKED)));
        assert_eq!(h.delete_min().unwrap(), (0, (12, UNRANKED)));
    }

    #[test]
    fn decrease_key_cases() {
        let mut h = heap();
        h.insert(0, (5, UNRANKED)).unwrap();
        h.insert(1, (3, UNRANKED)).unwrap();
        h.decrease_key(0, (1, UNRANKED)).unwrap();
        assert_eq!(h.find_min().unwrap(), (0, (1, UNRANKED)));
        // decrease to current value is a no-op
        h.decrease_key(0, (1, UNRANKED)).unwrap();
        assert_eq!(h.find_min().unwrap(), (0, (1, UNRANKED)));
        assert_eq!(
            h.decrease_key(1, (9, UNRANKED)),
            Err(HeapError::IncreaseAttempt(1))
        );
        assert_eq!(
            h.decrease_key(9, (0, UNRANKED)),
            Err(HeapError::ItemMissing(9))
        );
    }

    #[test]
    fn merge_with_offset() {
        let arena = new_arena(new_counters());
        let mut p = OffsetHeap::new(Rc::clone(&arena));
        let mut q = OffsetHeap::new(Rc::clone(&arena));
        p.insert(0, (1, UNRANKED)).unwrap(); // "a"
        q.insert(1, (1, UNRANKED)).unwrap(); // "b"
        q.merge(p, 5).unwrap();
        assert_eq!(q.delete_min().unwrap(), (1, (1, UNRANKED)));
        assert_eq!(q.delete_min().unwrap(), (0, (6, UNRANKED)));
    }

    #[test]
    fn merge_zero_offset_is_plain() {
        let arena = new_arena(new_counters());
        let mut p = OffsetHeap::new(Rc::clone(&arena));
        let mut q = OffsetHeap::new(Rc::clone(&arena));
        for i in 0..8 {
            if i % 2 == 0 {
                p.insert(i, (i as i64, UNRANKED)).unwrap();
            } else {
                q.insert(i, (i as i64, UNRANKED)).unwrap();
            }
        }
        p.merge(q, 0).unwrap();
        for i in 0..8 {
            assert_eq!(p.delete_min().unwrap(), (i, (i as i64, UNRANKED)));
        }
    }

    #[test]
    fn retarget_ties_orders_equal_priorities() {
        let mut h = heap();
        h.insert(10, (4, UNRANKED)).unwrap();
        h.insert(11, (4, UNRANKED)).unwrap();
        // rank the second-listed item first
        h.retarget_ties(&[10, 11], &[2, 1]).unwrap();
        assert_eq!(h.delete_min().unwrap().0, 11);
        assert_eq!(h.delete_min().unwrap().0, 10);
        // empty call is a no-op
        h.retarget_ties(&[], &[]).unwrap();
    }

    #[test]
    fn retarget_requires_tie() {
        let mut h = heap();
        h.insert(0, (4, UNRANKED)).unwrap();
        h.insert(1, (9, UNRANKED)).unwrap();
        assert_eq!(h.retarget_ties(&[1], &[1]), Err(HeapError::NotTied(1)));
    }

    #[test]
    fn ranks_survive_merge() {
        let arena = new_arena(new_counters());
        let mut p = OffsetHeap::new(Rc::clone(&arena));
        let mut q = OffsetHeap::new(Rc::clone(&arena));
        p.insert(0, (4, UNRANKED)).unwrap();
        p.insert(1, (4, UNRANKED)).unwrap();
        p.retarget_ties(&[0, 1], &[2, 1]).unwrap();
        q.insert(2, (0, UNRANKED)).unwrap();
        q.merge(p, 0).unwrap();
        assert_eq!(q.delete_min().unwrap().0, 2);
        assert_eq!(q.delete_min().unwrap().0, 1);
        assert_eq!(q.delete_min().unwrap().0, 0);
    }

    #[test]
    fn remove_arbitrary() {
        let mut h = heap();
        for i in 0..16 {
            h.insert(i, ((i * 3 % 7) as i64, UNRANKED)).unwrap();
        }
        h.remove(9).unwrap();
        assert!(!h.contains(9));
        let mut seen = Vec::new();
        while let Ok((it, _)) = h.delete_min() {
            seen.push(it);
        }
        assert_eq!(seen.len(), 15);
        #[cfg(debug_assertions)]
        heap().audit();
    }
}
