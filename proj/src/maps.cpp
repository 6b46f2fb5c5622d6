#include "lvr/maps.hpp"

#include "lvr/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lvr {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

long long factorial_ll(int n) {
  long long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// n! if it stays below `cap`, else cap.
long long capped_factorial(int n, long long cap) {
  long long r = 1;
  for (int i = 2; i <= n; ++i) {
    if (r > cap / i) return cap;
    r *= i;
  }
  return r;
}

}  // namespace

RibbonMap RibbonMap::from_rotations(const std::vector<std::vector<int>>& rotations,
                                    const std::vector<std::pair<int, int>>& edges,
                                    const std::vector<int>& cilia,
                                    std::vector<SlotKind> kinds) {
  RibbonMap m;
  m.rotations_ = rotations;
  int H = 0;
  for (const auto& r : rotations) H += static_cast<int>(r.size());
  m.vertex_of_.assign(H, -1);
  m.next_.assign(H, -1);
  m.partner_.assign(H, -2);
  for (int v = 0; v < static_cast<int>(rotations.size()); ++v) {
    const auto& r = rotations[v];
    for (std::size_t i = 0; i < r.size(); ++i) {
      const int h = r[i];
      require(h >= 0 && h < H, "ribbon map: half-edge id out of range");
      require(m.vertex_of_[h] < 0, "ribbon map: half-edge listed twice");
      m.vertex_of_[h] = v;
      m.next_[h] = r[(i + 1) % r.size()];
    }
  }
  for (const auto& [a, b] : edges) {
    require(a >= 0 && a < H && b >= 0 && b < H && a != b, "ribbon map: bad edge");
    require(m.partner_[a] == -2 && m.partner_[b] == -2, "ribbon map: half-edge paired twice");
    m.partner_[a] = b;
    m.partner_[b] = a;
  }
  std::vector<int> cilia_at(rotations.size(), 0);
  for (int c : cilia) {
    require(c >= 0 && c < H, "ribbon map: cilium out of range");
    require(m.partner_[c] == -2, "ribbon map: cilium also paired");
    m.partner_[c] = -1;
    require(++cilia_at[m.vertex_of_[c]] <= 1, "ribbon map: more than one cilium at a vertex");
  }
  for (int h = 0; h < H; ++h) require(m.partner_[h] != -2, "ribbon map: unpaired half-edge");
  if (kinds.empty()) kinds.assign(H, SlotKind::Plain);
  require(static_cast<int>(kinds.size()) == H, "ribbon map: kinds size mismatch");
  m.kinds_ = std::move(kinds);
  return m;
}

int RibbonMap::num_edges() const {
  int c = 0;
  for (int h = 0; h < num_half_edges(); ++h) c += partner_[h] > h;
  return c;
}

int RibbonMap::num_cilia() const {
  return static_cast<int>(std::count(partner_.begin(), partner_.end(), -1));
}

std::vector<std::pair<int, int>> RibbonMap::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int h = 0; h < num_half_edges(); ++h)
    if (partner_[h] > h) out.emplace_back(h, partner_[h]);
  return out;
}

std::vector<std::pair<int, int>> RibbonMap::edge_vertices() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& [a, b] : edges()) out.emplace_back(vertex_of_[a], vertex_of_[b]);
  return out;
}

std::vector<int> RibbonMap::cilia() const {
  std::vector<int> out;
  for (int h = 0; h < num_half_edges(); ++h)
    if (partner_[h] < 0) out.push_back(h);
  return out;
}

bool RibbonMap::is_connected() const {
  if (num_vertices() == 0) return false;
  UnionFind uf(num_vertices());
  int comps = num_vertices();
  for (const auto& [a, b] : edge_vertices()) comps -= uf.unite(a, b);
  return comps == 1;
}

std::string RibbonMap::to_text() const {
  std::ostringstream os;
  for (const auto& r : rotations_) {
    os << 'v';
    for (int h : r) os << ' ' << h;
    os << '\n';
  }
  for (const auto& [a, b] : edges()) os << "e " << a << ' ' << b << '\n';
  os << 'c';
  for (int c : cilia()) os << ' ' << c;
  os << '\n';
  return os.str();
}

RibbonMap RibbonMap::from_text(const std::string& text) {
  std::vector<std::vector<int>> rot;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> cilia;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    std::vector<int> ids;
    int x;
    while (ls >> x) ids.push_back(x);
    require(ls.eof(), "ribbon map text: non-integer token");
    if (tag == "v") {
      rot.push_back(ids);
    } else if (tag == "e") {
      require(ids.size() == 2, "ribbon map text: edge needs two ids");
      edges.emplace_back(ids[0], ids[1]);
    } else if (tag == "c") {
      cilia.insert(cilia.end(), ids.begin(), ids.end());
    } else {
      throw InvalidArgument("ribbon map text: unknown line tag '" + tag + "'");
    }
  }
  return from_rotations(rot, edges, cilia);
}

FaceStructure faces(const RibbonMap& map) {
  FaceStructure fs;
  const int H = map.num_half_edges();
  std::vector<char> seen(H, 0);
  for (int start = 0; start < H; ++start) {
    if (seen[start]) continue;
    std::vector<int> face;
    int h = start;
    do {
      seen[h] = 1;
      face.push_back(h);
      const int a = map.is_cilium(h) ? h : map.partner(h);
      h = map.next_around(a);
    } while (h != start);
    fs.faces.push_back(std::move(face));
  }
  for (const auto& r : map.rotations())
    if (r.empty()) fs.faces.emplace_back();
  for (std::size_t f = 0; f < fs.faces.size(); ++f) {
    int c = 0, cj = 0;
    for (int h : fs.faces[f]) {
      if (!map.is_cilium(h)) continue;
      ++c;
      cj += map.kind(h) == SlotKind::J;
    }
    fs.cilia_per_face.push_back(c);
    fs.j_cilia_per_face.push_back(cj);
    if (c > 0) fs.broken.push_back(static_cast<int>(f));
  }
  return fs;
}

EulerData euler_characteristic(const RibbonMap& map) {
  require(map.is_connected(), "euler_characteristic: map must be connected");
  const FaceStructure fs = faces(map);
  EulerData d;
  d.broken = static_cast<int>(fs.broken.size());
  d.chi = map.num_vertices() - map.num_edges() + static_cast<int>(fs.faces.size()) - d.broken;
  const int twice_g = 2 - d.broken - d.chi;
  if (twice_g < 0 || twice_g % 2 != 0)
    throw InvalidArgument("euler_characteristic: inconsistent face structure");
  d.genus = twice_g / 2;
  return d;
}

std::vector<std::vector<int>> spanning_trees(const RibbonMap& map) {
  require(map.is_connected(), "spanning_trees: map must be connected");
  const auto ev = map.edge_vertices();
  const int V = map.num_vertices();
  const int E = static_cast<int>(ev.size());
  std::vector<std::vector<int>> out;
  std::vector<int> chosen;
  // Include/exclude backtracking; union-find is copied per branch (small maps).
  std::function<void(int, UnionFind)> rec = [&](int i, UnionFind uf) {
    if (static_cast<int>(chosen.size()) == V - 1) {
      out.push_back(chosen);
      return;
    }
    if (E - i < V - 1 - static_cast<int>(chosen.size())) return;
    const auto [a, b] = ev[i];
    UnionFind with = uf;
    if (with.unite(a, b)) {
      chosen.push_back(i);
      rec(i + 1, with);
      chosen.pop_back();
    }
    rec(i + 1, uf);
  };
  rec(0, UnionFind(V));
  return out;
}

long long matrix_tree_count(const RibbonMap& map) {
  const int V = map.num_vertices();
  require(V >= 1, "matrix_tree_count: empty map");
  if (V == 1) return 1;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(V, V);
  for (const auto& [a, b] : map.edge_vertices()) {
    if (a == b) continue;
    L(a, a) += 1;
    L(b, b) += 1;
    L(a, b) -= 1;
    L(b, a) -= 1;
  }
  return std::llround(L.bottomRightCorner(V - 1, V - 1).determinant());
}

RibbonMap FeynmanMap::ribbon() const {
  const int slots = 2 * p;
  const int base_j = slots * n;
  const int base_jd = base_j + 2 * k;
  std::vector<std::vector<int>> rot;
  std::vector<SlotKind> kinds(base_jd + 2 * k, SlotKind::Plain);
  for (int i = 0; i < n; ++i) {
    std::vector<int> r(slots);
    for (int s = 0; s < slots; ++s) {
      r[s] = slots * i + s;
      kinds[r[s]] = (s % 2 == 0) ? SlotKind::M : SlotKind::Mdag;
    }
    rot.push_back(std::move(r));
  }
  std::vector<int> cilia;
  for (int j = 0; j < k; ++j) {
    rot.push_back({base_j + 2 * j, base_j + 2 * j + 1});
    kinds[base_j + 2 * j] = SlotKind::J;
    kinds[base_j + 2 * j + 1] = SlotKind::Mdag;
    cilia.push_back(base_j + 2 * j);
  }
  for (int j = 0; j < k; ++j) {
    rot.push_back({base_jd + 2 * j, base_jd + 2 * j + 1});
    kinds[base_jd + 2 * j] = SlotKind::M;
    kinds[base_jd + 2 * j + 1] = SlotKind::Jdag;
    cilia.push_back(base_jd + 2 * j + 1);
  }
  auto m_id = [&](int i) { return i < p * n ? slots * (i / p) + 2 * (i % p) : base_jd + 2 * (i - p * n); };
  auto md_id = [&](int i) {
    return i < p * n ? slots * (i / p) + 2 * (i % p) + 1 : base_j + 2 * (i - p * n) + 1;
  };
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < num_edges(); ++i) edges.emplace_back(m_id(i), md_id(pairing[i]));
  return RibbonMap::from_rotations(rot, edges, cilia, std::move(kinds));
}

bool FeynmanMap::is_connected() const {
  const int V = n + 2 * k;
  if (V == 0) return false;
  UnionFind uf(V);
  int comps = V;
  auto m_vertex = [&](int i) { return i < p * n ? i / p : n + k + (i - p * n); };
  auto md_vertex = [&](int i) { return i < p * n ? i / p : n + (i - p * n); };
  for (int i = 0; i < num_edges(); ++i) comps -= uf.unite(m_vertex(i), md_vertex(pairing[i]));
  return comps == 1;
}

long long symmetry_group_order(int p, int n, int k) {
  long long r = factorial_ll(n) * factorial_ll(k) * factorial_ll(k);
  for (int i = 0; i < n; ++i) r *= p;
  return r;
}

namespace {

// Calls f(new_pairing) for every element of the relabeling group.
template <class F>
void for_each_relabeling(const FeynmanMap& m, F&& f) {
  const int p = m.p, n = m.n, k = m.k, E = m.num_edges();
  std::vector<int> vperm(n), rot(n, 0), jperm(k), jdperm(k), out(E);
  std::iota(vperm.begin(), vperm.end(), 0);
  do {
    std::fill(rot.begin(), rot.end(), 0);
    while (true) {
      std::iota(jperm.begin(), jperm.end(), 0);
      do {
        std::iota(jdperm.begin(), jdperm.end(), 0);
        do {
          auto fm = [&](int i) {
            return i < p * n ? vperm[i / p] * p + (i % p + rot[i / p]) % p : p * n + jdperm[i - p * n];
          };
          auto fmd = [&](int i) {
            return i < p * n ? vperm[i / p] * p + (i % p + rot[i / p]) % p : p * n + jperm[i - p * n];
          };
          for (int i = 0; i < E; ++i) out[fm(i)] = fmd(m.pairing[i]);
          f(out);
        } while (std::next_permutation(jdperm.begin(), jdperm.end()));
      } while (std::next_permutation(jperm.begin(), jperm.end()));
      int d = 0;
      while (d < n && ++rot[d] == p) rot[d++] = 0;
      if (d == n) break;
    }
  } while (std::next_permutation(vperm.begin(), vperm.end()));
}

}  // namespace

std::vector<int> canonical_form(const FeynmanMap& m) {
  std::vector<int> best = m.pairing;
  for_each_relabeling(m, [&](const std::vector<int>& cand) {
    if (cand < best) best = cand;
  });
  return best;
}

int num_shards(int p, int k, int order) { return std::max(1, p * order + k); }

void enumerate_shard(int p, int k, int order, int shard, const MapVisitor& visit,
                     const EnumerationOptions& opts) {
  require(p >= 2, "enumerate: p must be >= 2");
  require(k >= 0 && order >= 0, "enumerate: k and order must be >= 0");
  const int E = p * order + k;
  require(shard >= 0 && shard < num_shards(p, k, order), "enumerate: shard out of range");
  if (capped_factorial(E, opts.ceiling + 1) > opts.ceiling)
    throw ResourceLimit("enumerate: " + std::to_string(E) + "! labeled maps exceed the ceiling");
  FeynmanMap m{p, order, k, {}};
  if (E == 0) {
    if (!opts.connected_only) visit(m);
    return;
  }
  std::vector<int> rest;
  for (int i = 0; i < E; ++i)
    if (i != shard) rest.push_back(i);
  m.pairing.assign(E, 0);
  m.pairing[0] = shard;
  do {
    std::copy(rest.begin(), rest.end(), m.pairing.begin() + 1);
    if (opts.connected_only && !m.is_connected()) continue;
    visit(m);
  } while (std::next_permutation(rest.begin(), rest.end()));
}

void enumerate_ciliated_maps(int p, int k, int max_order, const MapVisitor& visit,
                             const EnumerationOptions& opts) {
  require(max_order >= 0, "enumerate: max_order must be >= 0");
  for (int order = 0; order <= max_order; ++order)
    for (int s = 0; s < num_shards(p, k, order); ++s) enumerate_shard(p, k, order, s, visit, opts);
}

OrbitCensus orbit_census(int p, int k, int order, bool connected_only) {
  std::map<std::vector<int>, long long> orbit_size;
  OrbitCensus c;
  EnumerationOptions opts;
  opts.connected_only = connected_only;
  for (int s = 0; s < num_shards(p, k, order); ++s)
    enumerate_shard(p, k, order, s, [&](const FeynmanMap& m) {
      ++c.labeled;
      ++orbit_size[canonical_form(m)];
    }, opts);
  c.orbits = static_cast<long long>(orbit_size.size());
  const long long G = symmetry_group_order(p, order, k);
  for (const auto& [rep, size] : orbit_size) {
    FeynmanMap m{p, order, k, rep};
    long long aut = 0;
    for_each_relabeling(m, [&](const std::vector<int>& cand) { aut += cand == rep; });
    c.sum_group_over_aut += G / aut;
  }
  return c;
}

std::vector<LvrGraph> lvr_graphs_of(const RibbonMap& map) {
  std::vector<LvrGraph> out;
  const int E = map.num_edges();
  for (const auto& tree : spanning_trees(map)) {
    std::vector<int> loops;
    for (int e = 0, t = 0; e < E; ++e) {
      if (t < static_cast<int>(tree.size()) && tree[t] == e) {
        ++t;
        continue;
      }
      loops.push_back(e);
    }
    std::vector<int> labels(loops.size());
    std::iota(labels.begin(), labels.end(), 1);
    do {
      out.push_back({map, tree, loops, labels});
    } while (std::next_permutation(labels.begin(), labels.end()));
  }
  return out;
}

void enumerate_lvr_graphs(int p, int k, int max_order, const LvrVisitor& visit,
                          const EnumerationOptions& opts) {
  EnumerationOptions o = opts;
  o.connected_only = true;
  enumerate_ciliated_maps(p, k, max_order, [&](const FeynmanMap& m) {
    for (const auto& g : lvr_graphs_of(m.ribbon())) visit(g);
  }, o);
}

}  // namespace lvr
