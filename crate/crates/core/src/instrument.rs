//! Operation counters shared by the heap and order structures.
//!
//! Counters are plain `Cell`s behind an `Rc` so every structure created
//! during one solve can report into the same tally without threading
//! mutable borrows through the algorithm.

use std::cell::Cell;
use std::rc::Rc;

#[derive(Debug, Default)]
pub struct Counters {
    /// Heap nodes touched (links, swaps, root scans).
    pub heap_touches: Cell<u64>,
    /// Priority comparisons performed by the heap.
    pub heap_comparisons: Cell<u64>,
    /// Heap operations by kind.
    pub heap_inserts: Cell<u64>,
    pub heap_delete_mins: Cell<u64>,
    pub heap_decrease_keys: Cell<u64>,
    pub heap_merges: Cell<u64>,
    pub heap_offsets: Cell<u64>,
    /// Order-list record relabelings.
    pub order_relabels: Cell<u64>,
    /// Order comparisons (precedes queries and sort comparator calls).
    pub order_comparisons: Cell<u64>,
    pub order_inserts: Cell<u64>,
    pub order_deletes: Cell<u64>,
    pub order_appends: Cell<u64>,
}

pub type Instr = Rc<Counters>;

pub fn new_counters() -> Instr {
    Rc::new(Counters::default())
}

impl Counters {
    pub fn bump(cell: &Cell<u64>, by: u64) {
        cell.set(cell.get() + by);
    }

    /// Total heap operations: every kind counts once per call.
    pub fn heap_ops(&self) -> u64 {
        self.heap_inserts.get()
            + self.heap_delete_mins.get()
            + self.heap_decrease_keys.get()
            + self.heap_merges.get()
            + self.heap_offsets.get()
    }

    /// Total order-structure operations.
    pub fn order_ops(&self) -> u64 {
        self.order_inserts.get()
            + self.order_deletes.get()
            + self.order_appends.get()
            + self.order_comparisons.get()
    }

    pub fn reset(&self) {
        self.heap_touches.set(0);
        self.heap_comparisons.set(0);
        self.heap_inserts.set(0);
        self.heap_delete_mins.set(0);
        self.heap_decrease_keys.set(0);
        self.heap_merges.set(0);
        self.heap_offsets.set(0);
        self.order_relabels.set(0);
        self.order_comparisons.set(0);
        self.order_inserts.set(0);
        self.order_deletes.set(0);
        self.order_appends.set(0);
    }
}
