#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lvr {

enum class SlotKind : std::uint8_t { Plain, M, Mdag, J, Jdag };

// Rotation system with cilia. Half-edges are 0..H-1; each belongs to one
// vertex, `next_around` is the cyclic successor at that vertex, and
// `partner` is the edge involution (-1 marks a cilium).
class RibbonMap {
 public:
  RibbonMap() = default;

  // rotations[v] lists half-edge ids of vertex v in cyclic order; every id in
  // 0..H-1 appears exactly once. Half-edges not covered by `edges` must be in
  // `cilia`. Throws InvalidArgument if malformed.
  static RibbonMap from_rotations(const std::vector<std::vector<int>>& rotations,
                                  const std::vector<std::pair<int, int>>& edges,
                                  const std::vector<int>& cilia,
                                  std::vector<SlotKind> kinds = {});

  int num_vertices() const { return static_cast<int>(rotations_.size()); }
  int num_half_edges() const { return static_cast<int>(vertex_of_.size()); }
  int num_edges() const;
  int num_cilia() const;

  int vertex_of(int h) const { return vertex_of_[h]; }
  int next_around(int h) const { return next_[h]; }
  int partner(int h) const { return partner_[h]; }
  bool is_cilium(int h) const { return partner_[h] < 0; }
  SlotKind kind(int h) const { return kinds_[h]; }
  const std::vector<std::vector<int>>& rotations() const { return rotations_; }

  // Edges as (h, partner(h)) with h < partner(h), sorted.
  std::vector<std::pair<int, int>> edges() const;
  // Edge endpoints as vertex pairs, same order as edges().
  std::vector<std::pair<int, int>> edge_vertices() const;
  std::vector<int> cilia() const;

  bool is_connected() const;

  std::string to_text() const;
  static RibbonMap from_text(const std::string& text);

 private:
  std::vector<std::vector<int>> rotations_;
  std::vector<int> vertex_of_, next_, partner_;
  std::vector<SlotKind> kinds_;
};

struct FaceStructure {
  // Each face as its cyclic half-edge sequence under h -> next_around(alpha(h)),
  // alpha(h) = partner(h) or h for a cilium. Isolated vertices give an empty
  // sequence.
  std::vector<std::vector<int>> faces;
  std::vector<int> broken;           // indices into faces
  std::vector<int> cilia_per_face;   // c(f) for every face
  std::vector<int> j_cilia_per_face; // cilia of kind J only
};

struct EulerData {
  int chi = 0;
  int genus = 0;
  int broken = 0;
};

FaceStructure faces(const RibbonMap& map);

// chi = v - e + f - b and chi = 2 - 2g - b. Throws InvalidArgument if the map
// is disconnected or the genus is not a nonnegative integer.
EulerData euler_characteristic(const RibbonMap& map);

// All spanning trees, as sorted lists of indices into map.edges().
std::vector<std::vector<int>> spanning_trees(const RibbonMap& map);

// Kirchhoff count (Laplacian minor determinant), as an independent check.
long long matrix_tree_count(const RibbonMap& map);

// A labeled Feynman map of the model: n interaction vertices with 2p slots
// (even slots M, odd slots Mdag), k J-sources [J cilium, Mdag] and k
// Jdag-sources [M, Jdag cilium]. `pairing[i]` is the Mdag index joined to the
// i-th M half-edge, with M half-edges listed as interaction even slots in
// vertex order followed by the Jdag-source legs, and Mdag half-edges likewise
// with the J-source legs last.
struct FeynmanMap {
  int p = 2;
  int n = 0;
  int k = 0;
  std::vector<int> pairing;

  RibbonMap ribbon() const;
  int num_edges() const { return p * n + k; }
  bool is_connected() const;
};

// Canonical representative under relabeling of interaction vertices, even
// rotations of each interaction vertex, and separate permutations of the J
// and Jdag sources. Returned as the minimal pairing vector.
std::vector<int> canonical_form(const FeynmanMap& m);
long long symmetry_group_order(int p, int n, int k);

struct EnumerationOptions {
  bool connected_only = false;
  long long ceiling = 50'000'000;  // labeled maps examined per order
};

using MapVisitor = std::function<void(const FeynmanMap&)>;

// Every labeled map with exactly k source pairs and 0..max_order interaction
// vertices, in a deterministic order. Throws ResourceLimit past the ceiling.
void enumerate_ciliated_maps(int p, int k, int max_order, const MapVisitor& visit,
                             const EnumerationOptions& opts = {});

// Maps of a single order restricted to one shard: shard s fixes the image of
// the first M half-edge to Mdag half-edge s. Shards are 0..num_shards-1.
int num_shards(int p, int k, int order);
void enumerate_shard(int p, int k, int order, int shard, const MapVisitor& visit,
                     const EnumerationOptions& opts = {});

struct OrbitCensus {
  long long labeled = 0;
  long long orbits = 0;
  long long sum_group_over_aut = 0;  // sum over orbits of |G| / |Aut|
};

OrbitCensus orbit_census(int p, int k, int order, bool connected_only);

struct LvrGraph {
  RibbonMap map;
  std::vector<int> tree;               // indices into map.edges()
  std::vector<int> loop_edges;         // indices into map.edges(), not in tree
  std::vector<int> loop_labels;        // loop_edges[i] carries label loop_labels[i]
};

// All (tree, loop labeling) decorations of a connected map.
std::vector<LvrGraph> lvr_graphs_of(const RibbonMap& map);

using LvrVisitor = std::function<void(const LvrGraph&)>;

// LVR graphs over the connected Feynman maps with k source pairs and
// 0..max_order interaction vertices.
void enumerate_lvr_graphs(int p, int k, int max_order, const LvrVisitor& visit,
                          const EnumerationOptions& opts = {});

}  // namespace lvr
