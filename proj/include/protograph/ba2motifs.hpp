#pragma once

#include <cstdint>

#include "protograph/graph.hpp"

namespace protograph {

// Synthetic motif-classification dataset: each graph is a 20-node
// Barabási–Albert base (attachment parameter 1) plus a 5-node motif on nodes
// 20..24 — a house (5-cycle with a roof chord, 6 edges, label 0) or a plain
// 5-cycle (5 edges, label 1) — joined to the base by one random edge. Node
// features are a constant 0.1 vector of width 10. Classes are balanced;
// count must be even.
GraphDataset generate_ba2motifs(int count, std::uint64_t seed);

// Ground-truth motif node indices (identical for every generated graph).
std::vector<int> ba2motifs_motif_nodes();

}  // namespace protograph
