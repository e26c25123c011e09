#pragma once

#include <filesystem>
#include <string>

#include "protograph/graph.hpp"

namespace protograph {

// Reads `{name}_A.txt`, `{name}_graph_indicator.txt`, `{name}_graph_labels.txt`
// and, when present, `{name}_node_labels.txt` from root_path/name/. All files
// are 1-indexed. Node labels become dense one-hot features over the sorted
// distinct observed values; without them every node gets the constant
// feature 1.0. Graph labels are remapped to 0..K-1 preserving sorted
// original order. Reciprocal edge rows collapse to one undirected edge;
// self-loops are dropped.
GraphDataset parse_tu_dataset(const std::filesystem::path& root_path, const std::string& name);

// Emits the same format (1-indexed, "i, j" edge rows, LF endings) into
// out_root/name/. Each undirected edge is written in both directions in
// ascending (u, v) order.
void write_tu_dataset(const GraphDataset& ds, const std::filesystem::path& out_root);

}  // namespace protograph
