// Graph families (complete, circulant, random regular, Erdős–Rényi, lattice),
// their coupling matrices Q (mean-field scaled by average degree, or raw
// indicator), and the degree/spectral statistics the detection thresholds and
// regime conditions consume.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ising {

enum class GraphFamily { Complete, RegularCirculant, RandomRegular, ErdosRenyi, Lattice };

std::string family_name(GraphFamily f);

struct GraphSpec {
  GraphFamily family = GraphFamily::Complete;
  std::int64_t n = 0;
  int d = 0;             // regular families
  double p = 0.0;        // Erdős–Rényi
  int dim = 0, side = 0, range = 1;  // lattice: side^dim vertices, edge iff 0 < ℓ1 ≤ range
  std::uint64_t seed = 0;            // random families

  // Compact identifier used in CSV records (no commas).
  std::string id() const;
};

// Simple undirected graph stored as an edge list plus CSR neighbor index.
struct AdjacencyMatrix {
  std::int64_t n = 0;
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // i < j
  std::vector<std::int64_t> row_start;                        // size n+1
  std::vector<std::int32_t> neighbors;                        // CSR, size 2|E|

  std::int64_t num_edges() const { return static_cast<std::int64_t>(edges.size()); }
  std::int64_t degree(std::int64_t i) const { return row_start[i + 1] - row_start[i]; }
  double avg_degree() const;  // 2|E|/n
  bool has_edge(std::int64_t i, std::int64_t j) const;

  // Rebuilds the CSR index from `edges`; validates no self-loops/duplicates.
  void build_index();
};

enum class Scaling { MeanField, Raw };

// Symmetric nonnegative coupling matrix with zero diagonal, stored sparse.
// `is_complete_uniform` marks Q = c·(J − I); samplers and scan statistics use
// it for an O(1)-per-update path via the total magnetization.
struct CouplingMatrix {
  std::int64_t n = 0;
  Scaling scaling = Scaling::Raw;
  std::vector<std::int64_t> row_start;  // size n+1
  std::vector<std::int32_t> col;
  std::vector<double> val;
  bool is_complete_uniform = false;
  double uniform_value = 0.0;
  double avg_degree = 0.0;  // of the underlying graph (2|E|/n); 0 if synthetic
  double inf_norm = 0.0;    // max row ℓ1 sum, cached at construction

  std::int64_t degree(std::int64_t i) const { return row_start[i + 1] - row_start[i]; }
  double row_sum(std::int64_t i) const;
};

struct GraphStats {
  double avg_degree = 0.0;
  double max_degree = 0.0;
  double degree_irregularity = 0.0;  // max_i |d_i/d̄ − 1|
  double inf_norm = 0.0;             // ‖Q‖∞→∞
  double lambda2 = 0.0;              // second-largest eigenvalue of Q
  double lambda_min = 0.0;           // smallest eigenvalue of Q
  std::int64_t n = 0;

  // α_n = √(log n / d̄) — the local-field fluctuation scale.
  double alpha_n() const;
};

AdjacencyMatrix build_complete(std::int64_t n);
AdjacencyMatrix build_regular_circulant(std::int64_t n, int d);
AdjacencyMatrix build_random_regular(std::int64_t n, int d, std::uint64_t seed);
AdjacencyMatrix build_erdos_renyi(std::int64_t n, double p, std::uint64_t seed);
AdjacencyMatrix build_lattice(int dim, int side, int range);
AdjacencyMatrix build_graph(const GraphSpec& spec);

CouplingMatrix coupling_from_graph(const AdjacencyMatrix& adj, Scaling scaling);

// Dense symmetric constructor for small synthetic instances (inequality
// verification); `dense` is row-major n×n, diagonal ignored.
CouplingMatrix coupling_from_dense(std::int64_t n, const std::vector<double>& dense,
                                   Scaling scaling = Scaling::Raw);

// Eigenvalues dense (n ≤ 2048, 1e−8) or via power iteration with deflation
// (above, 1e−4).  `force_iterative` exists so tests can cross-check the two
// paths on the same matrix.
GraphStats graph_stats(const CouplingMatrix& coupling, bool force_iterative = false);

// Plain-text edge list: first line "n m", then "i j" per edge, 0-based.
void save_edge_list(const AdjacencyMatrix& adj, const std::string& path);
AdjacencyMatrix load_edge_list(const std::string& path);

// Lattice geometry helper: row-major coordinates of vertex v in a dim-cube.
std::vector<int> lattice_coords(std::int64_t v, int dim, int side);
std::int64_t l1_distance(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace ising
