//! Maximum flow between sources and sinks on the boundary of a planar
//! graph, computed by iterated biased search in the dual with reusable
//! priority queues and order lists.

pub mod biased_search;
pub mod dual_flow;
pub mod gen;
pub mod instance;
pub mod instrument;
pub mod multiflow;
pub mod offset_heap;
pub mod oracle;
pub mod order_list;
pub mod planar_graph;
