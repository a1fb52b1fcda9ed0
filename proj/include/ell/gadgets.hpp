#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ell/simplegraph.hpp"
#include "ell/structures.hpp"

namespace ell {

// P^d_{l,p}: l copies of the clique gadget and one marker gadget at position
// p, chained; u0 and vl have degree d-1, all other vertices degree d.
struct PathGadget {
  SimpleGraph graph;
  int64_t u0 = 0;
  int64_t vl = 0;
};
PathGadget path_gadget(int32_t d, int32_t l, int32_t p);

// Vertex count of P^d_{l,p}.
int64_t path_gadget_size(int32_t d, int32_t l);

struct Arrow {
  int symbol = 0;               // signature index
  int32_t x = 0, y = 0;         // original endpoints (x at the u0 end)
  int64_t base = 0;             // first auxiliary vertex id
  int32_t p = 0;                // marker block position
};

struct Provenance {
  int64_t original_count = 0;
  int64_t aux_per_arrow = 0;
  int32_t d = 0;   // gadget degree parameter 2D^2+D^4+1
  int32_t l = 0;   // arrow length 2*(3D^4+1)
  std::vector<Arrow> arrows;  // ordered by (symbol, tuple lexicographic)
};

struct EncodeResult {
  SimpleGraph graph;
  Provenance provenance;
};

struct EncodeCaps {
  int64_t max_vertices = 40000000;
};

// Arrow encoding of a model of the zig-zag formula: original vertices first
// (same ids as elements), then one disjoint arrow per tuple. The marker
// position encodes the symbol; the tree and rotation-map conjuncts are
// checked as a precondition.
EncodeResult encode(const Structure& a, const EncodeCaps& caps = {});

// Vertices contained in no triangle. On encodings this is exactly the set of
// original vertices.
std::vector<int64_t> original_vertices(const SimpleGraph& g);

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inverse of encode from the graph alone. D may be omitted when the graph
// has at least one arrow (the gadget degree determines it).
Structure decode(const SimpleGraph& g, std::optional<int32_t> D = std::nullopt);

// decode followed by the zig-zag checks; the operational meaning of the
// translated sentence on simple graphs.
struct PipelineResult {
  bool ok = false;
  std::string witness;
};
PipelineResult decode_and_check(const SimpleGraph& g, const RotationGraph& h);

// Boundary edge count across an explicit vertex subset.
int64_t graph_cut(const SimpleGraph& g, const std::vector<int64_t>& s);

}  // namespace ell
