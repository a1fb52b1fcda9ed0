#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ell {

// Undirected graph without self-loops or parallel edges, CSR adjacency.
// Vertices are 0..n-1. Rows are sorted after finalize().
class SimpleGraph {
 public:
  SimpleGraph() = default;
  explicit SimpleGraph(int64_t n) { reset(n); }

  void reset(int64_t n) {
    n_ = n;
    offsets_.assign(size_t(n) + 1, 0);
    nbrs_.clear();
    building_ = true;
    pending_.clear();
  }

  int64_t n() const { return n_; }
  int64_t edge_count() const { return int64_t(nbrs_.size()) / 2; }

  void add_edge(int64_t u, int64_t v);
  void finalize();  // builds CSR; deduplicates; rejects self-loops

  int64_t degree(int64_t v) const { return offsets_[v + 1] - offsets_[v]; }
  const uint32_t* row(int64_t v) const { return nbrs_.data() + offsets_[v]; }
  bool adjacent(int64_t u, int64_t v) const;

  // Two-pass bulk construction for very large graphs: call with exact final
  // degrees, then fill edges via add_edge_prepared (both directions written).
  void prepare(int64_t n, const std::vector<int64_t>& degrees);
  void add_edge_prepared(int64_t u, int64_t v);
  void finish_prepared();  // sorts rows, checks invariants

 private:
  int64_t n_ = 0;
  std::vector<int64_t> offsets_;
  std::vector<uint32_t> nbrs_;
  bool building_ = false;
  std::vector<std::pair<uint32_t, uint32_t>> pending_;
  std::vector<int64_t> cursor_;
};

// Text format: "graph <n>" header, one "<u> <v>" line per edge.
void save_graph(std::ostream& os, const SimpleGraph& g);
SimpleGraph load_graph(std::istream& is);
void save_graph_file(const std::string& path, const SimpleGraph& g);
SimpleGraph load_graph_file(const std::string& path);

}  // namespace ell
