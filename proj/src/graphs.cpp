#include "ising/graphs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ising/rng.hpp"

namespace ising {

std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Complete: return "complete";
    case GraphFamily::RegularCirculant: return "circulant";
    case GraphFamily::RandomRegular: return "random_regular";
    case GraphFamily::ErdosRenyi: return "erdos_renyi";
    case GraphFamily::Lattice: return "lattice";
  }
  return "unknown";
}

std::string GraphSpec::id() const {
  std::ostringstream os;
  os << family_name(family);
  switch (family) {
    case GraphFamily::Complete: os << ":n" << n; break;
    case GraphFamily::RegularCirculant: os << ":n" << n << ":d" << d; break;
    case GraphFamily::RandomRegular: os << ":n" << n << ":d" << d << ":seed" << seed; break;
    case GraphFamily::ErdosRenyi: os << ":n" << n << ":p" << p << ":seed" << seed; break;
    case GraphFamily::Lattice: os << ":dim" << dim << ":side" << side << ":L" << range; break;
  }
  return os.str();
}

double AdjacencyMatrix::avg_degree() const {
  if (n == 0) return 0.0;
  return 2.0 * static_cast<double>(edges.size()) / static_cast<double>(n);
}

bool AdjacencyMatrix::has_edge(std::int64_t i, std::int64_t j) const {
  if (i == j) return false;
  for (std::int64_t k = row_start[i]; k < row_start[i + 1]; ++k)
    if (neighbors[k] == j) return true;
  return false;
}

void AdjacencyMatrix::build_index() {
  row_start.assign(n + 1, 0);
  for (auto [i, j] : edges) {
    if (i == j) throw std::invalid_argument("self-loop in edge list");
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("edge endpoint out of range");
    ++row_start[i + 1];
    ++row_start[j + 1];
  }
  for (std::int64_t i = 0; i < n; ++i) row_start[i + 1] += row_start[i];
  neighbors.assign(row_start[n], 0);
  std::vector<std::int64_t> fill(row_start.begin(), row_start.end() - 1);
  for (auto [i, j] : edges) {
    neighbors[fill[i]++] = j;
    neighbors[fill[j]++] = i;
  }
  for (std::int64_t i = 0; i < n; ++i) {
    auto b = neighbors.begin() + row_start[i], e = neighbors.begin() + row_start[i + 1];
    std::sort(b, e);
    if (std::adjacent_find(b, e) != e) throw std::invalid_argument("duplicate edge");
  }
}

AdjacencyMatrix build_complete(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("build_complete: n must be >= 1");
  AdjacencyMatrix g;
  g.n = n;
  g.edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  g.build_index();
  return g;
}

AdjacencyMatrix build_regular_circulant(std::int64_t n, int d) {
  if (n < 1 || d < 0 || d > n - 1)
    throw std::invalid_argument("build_regular_circulant: need 0 <= d <= n-1");
  if ((n * d) % 2 != 0)
    throw std::invalid_argument("build_regular_circulant: n*d must be even (handshake parity)");
  AdjacencyMatrix g;
  g.n = n;
  // Connect each vertex to its d/2 nearest offsets on each side; for odd d
  // (n even) additionally to the antipode n/2.
  const int half = d / 2;
  for (std::int32_t i = 0; i < n; ++i) {
    for (int k = 1; k <= half; ++k) {
      std::int32_t j = static_cast<std::int32_t>((i + k) % n);
      if (i < j) g.edges.emplace_back(i, j);
      // wrap-around edges are added when visited from the smaller endpoint
      if (i > j) g.edges.emplace_back(j, i);
    }
  }
  if (d % 2 == 1) {
    for (std::int32_t i = 0; i < n / 2; ++i)
      g.edges.emplace_back(i, static_cast<std::int32_t>(i + n / 2));
  }
  // The wrap logic above can duplicate edges when d/2 offsets overlap (small n);
  // dedupe keeps the construction simple and the result exact.
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.build_index();
  return g;
}

AdjacencyMatrix build_random_regular(std::int64_t n, int d, std::uint64_t seed) {
  if (n < 1 || d < 0 || d > n - 1)
    throw std::invalid_argument("build_random_regular: need 0 <= d <= n-1");
  if ((n * d) % 2 != 0)
    throw std::invalid_argument("build_random_regular: n*d must be even (handshake parity)");
  // Configuration model: pair up n·d stubs uniformly; restart from scratch on
  // any self-loop or duplicate edge.  Exact uniformity over simple graphs is
  // not needed, determinism is.
  const int max_restarts = 1000;
  Rng rng = make_rng(seed);
  std::vector<std::int32_t> stubs(static_cast<std::size_t>(n) * d);
  for (std::int64_t i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) stubs[static_cast<std::size_t>(i) * d + k] = static_cast<std::int32_t>(i);
  for (int attempt = 0; attempt < max_restarts; ++attempt) {
    // Fisher–Yates shuffle with our own uniform draws (deterministic given seed).
    for (std::size_t k = stubs.size(); k > 1; --k) {
      std::size_t j = static_cast<std::size_t>(uniform_below(rng, k));
      std::swap(stubs[k - 1], stubs[j]);
    }
    std::set<std::pair<std::int32_t, std::int32_t>> seen;
    bool ok = true;
    for (std::size_t k = 0; ok && k + 1 < stubs.size(); k += 2) {
      std::int32_t a = stubs[k], b = stubs[k + 1];
      if (a == b) { ok = false; break; }
      auto e = std::minmax(a, b);
      if (!seen.emplace(e.first, e.second).second) { ok = false; break; }
    }
    if (ok) {
      AdjacencyMatrix g;
      g.n = n;
      g.edges.assign(seen.begin(), seen.end());
      g.build_index();
      return g;
    }
  }
  throw std::runtime_error("build_random_regular: no simple pairing after 1000 restarts");
}

AdjacencyMatrix build_erdos_renyi(std::int64_t n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_erdos_renyi: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("build_erdos_renyi: p must be in [0,1]");
  AdjacencyMatrix g;
  g.n = n;
  if (p >= 1.0) return build_complete(n);
  if (p > 0.0) {
    Rng rng = make_rng(seed);
    for (std::int32_t i = 0; i < n; ++i)
      for (std::int32_t j = i + 1; j < n; ++j)
        if (uniform01(rng) < p) g.edges.emplace_back(i, j);
  }
  g.build_index();
  return g;
}

std::vector<int> lattice_coords(std::int64_t v, int dim, int side) {
  std::vector<int> c(dim);
  for (int k = dim - 1; k >= 0; --k) {
    c[k] = static_cast<int>(v % side);
    v /= side;
  }
  return c;
}

std::int64_t l1_distance(const std::vector<int>& a, const std::vector<int>& b) {
  std::int64_t d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  return d;
}

AdjacencyMatrix build_lattice(int dim, int side, int range) {
  if (dim < 1 || side < 2 || range < 1)
    throw std::invalid_argument("build_lattice: need dim >= 1, side >= 2, L >= 1");
  double nd = std::pow(static_cast<double>(side), dim);
  if (nd > 1e7) throw std::invalid_argument("build_lattice: side^dim exceeds size limit 1e7");
  std::int64_t n = 1;
  for (int k = 0; k < dim; ++k) n *= side;

  // Offsets with 0 < ℓ1 ≤ range, using only the lexicographically positive
  // half so every unordered pair is generated exactly once.
  std::vector<std::vector<int>> offsets;
  std::vector<int> cur(dim, -range);
  while (true) {
    std::int64_t l1 = 0;
    for (int x : cur) l1 += std::abs(x);
    if (l1 > 0 && l1 <= range) {
      bool positive = false;
      for (int k = 0; k < dim; ++k) {
        if (cur[k] > 0) { positive = true; break; }
        if (cur[k] < 0) break;
      }
      if (positive) offsets.push_back(cur);
    }
    int k = dim - 1;
    while (k >= 0 && cur[k] == range) { cur[k] = -range; --k; }
    if (k < 0) break;
    ++cur[k];
  }

  AdjacencyMatrix g;
  g.n = n;
  std::vector<int> coord(dim), nb(dim);
  for (std::int64_t v = 0; v < n; ++v) {
    std::int64_t tmp = v;
    for (int k = dim - 1; k >= 0; --k) { coord[k] = static_cast<int>(tmp % side); tmp /= side; }
    for (const auto& off : offsets) {
      bool inside = true;
      for (int k = 0; k < dim; ++k) {
        nb[k] = coord[k] + off[k];
        if (nb[k] < 0 || nb[k] >= side) { inside = false; break; }
      }
      if (!inside) continue;  // free boundary
      std::int64_t w = 0;
      for (int k = 0; k < dim; ++k) w = w * side + nb[k];
      auto lo = std::min(v, w), hi = std::max(v, w);
      g.edges.emplace_back(static_cast<std::int32_t>(lo), static_cast<std::int32_t>(hi));
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.build_index();
  return g;
}

AdjacencyMatrix build_graph(const GraphSpec& spec) {
  switch (spec.family) {
    case GraphFamily::Complete: return build_complete(spec.n);
    case GraphFamily::RegularCirculant: return build_regular_circulant(spec.n, spec.d);
    case GraphFamily::RandomRegular: return build_random_regular(spec.n, spec.d, spec.seed);
    case GraphFamily::ErdosRenyi: return build_erdos_renyi(spec.n, spec.p, spec.seed);
    case GraphFamily::Lattice: return build_lattice(spec.dim, spec.side, spec.range);
  }
  throw std::invalid_argument("build_graph: unknown family");
}

double CouplingMatrix::row_sum(std::int64_t i) const {
  double s = 0.0;
  for (std::int64_t k = row_start[i]; k < row_start[i + 1]; ++k) s += val[k];
  return s;
}

static void cache_inf_norm(CouplingMatrix& q) {
  double m = 0.0;
  for (std::int64_t i = 0; i < q.n; ++i) m = std::max(m, q.row_sum(i));
  q.inf_norm = m;
}

CouplingMatrix coupling_from_graph(const AdjacencyMatrix& adj, Scaling scaling) {
  CouplingMatrix q;
  q.n = adj.n;
  q.scaling = scaling;
  q.avg_degree = adj.avg_degree();
  double w = 1.0;
  if (scaling == Scaling::MeanField) {
    if (q.avg_degree <= 0.0)
      throw std::invalid_argument("coupling_from_graph: mean-field scaling of an empty graph");
    w = 1.0 / q.avg_degree;
  }
  q.row_start = adj.row_start;
  q.col = adj.neighbors;
  q.val.assign(q.col.size(), w);
  q.uniform_value = w;
  q.is_complete_uniform =
      (adj.n >= 2 && adj.num_edges() == adj.n * (adj.n - 1) / 2);
  cache_inf_norm(q);
  return q;
}

CouplingMatrix coupling_from_dense(std::int64_t n, const std::vector<double>& dense,
                                   Scaling scaling) {
  if (static_cast<std::int64_t>(dense.size()) != n * n)
    throw std::invalid_argument("coupling_from_dense: size mismatch");
  CouplingMatrix q;
  q.n = n;
  q.scaling = scaling;
  q.row_start.assign(n + 1, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double a = dense[i * n + j], b = dense[j * n + i];
      if (a != b) throw std::invalid_argument("coupling_from_dense: matrix not symmetric");
      if (a < 0.0) throw std::invalid_argument("coupling_from_dense: negative entry");
      if (a != 0.0) ++q.row_start[i + 1];
    }
  }
  for (std::int64_t i = 0; i < n; ++i) q.row_start[i + 1] += q.row_start[i];
  q.col.resize(q.row_start[n]);
  q.val.resize(q.row_start[n]);
  std::vector<std::int64_t> fill(q.row_start.begin(), q.row_start.end() - 1);
  std::int64_t nonzero_pairs = 0;
  bool uniform = true;
  double first = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (i == j || dense[i * n + j] == 0.0) continue;
      q.col[fill[i]] = static_cast<std::int32_t>(j);
      q.val[fill[i]] = dense[i * n + j];
      ++fill[i];
      if (i < j) {
        ++nonzero_pairs;
        if (first == 0.0) first = dense[i * n + j];
        else if (dense[i * n + j] != first) uniform = false;
      }
    }
  }
  q.avg_degree = n > 0 ? 2.0 * static_cast<double>(nonzero_pairs) / static_cast<double>(n) : 0.0;
  q.is_complete_uniform = uniform && first != 0.0 && nonzero_pairs == n * (n - 1) / 2;
  q.uniform_value = q.is_complete_uniform ? first : 0.0;
  cache_inf_norm(q);
  return q;
}

double GraphStats::alpha_n() const {
  if (n <= 1 || avg_degree <= 0.0) return 0.0;
  return std::sqrt(std::log(static_cast<double>(n)) / avg_degree);
}

// Power iteration on B = Q + shift·I (all eigenvalues nonnegative after the
// shift), optionally deflating previously found eigenvectors.
static std::pair<double, Eigen::VectorXd> power_iterate(
    const CouplingMatrix& q, double shift, bool negate,
    const std::vector<Eigen::VectorXd>& deflate, double tol, int max_iter) {
  const std::int64_t n = q.n;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = 1.0 + 0.001 * std::sin(static_cast<double>(i));
  for (const auto& u : deflate) v -= u.dot(v) * u;
  v.normalize();
  double lambda = 0.0;
  Eigen::VectorXd w(n);
  for (int it = 0; it < max_iter; ++it) {
    // w = (±Q + shift I) v
    for (std::int64_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k)
        s += q.val[k] * v[q.col[k]];
      w[i] = (negate ? -s : s) + shift * v[i];
    }
    for (const auto& u : deflate) w -= u.dot(w) * u;
    double nw = w.norm();
    if (nw == 0.0) return {-shift, v};
    // Rayleigh quotient (v unit) and residual-based stopping: the quotient's
    // eigenvalue error is quadratic in the eigenvector error, so this
    // criterion does not plateau the way successive norm estimates do.
    lambda = v.dot(w);
    if ((w - lambda * v).norm() <= tol * std::max(1.0, std::abs(lambda)) && it > 8) break;
    v = w / nw;
  }
  return {lambda - shift, v};
}

GraphStats graph_stats(const CouplingMatrix& q, bool force_iterative) {
  GraphStats st;
  st.n = q.n;
  st.avg_degree = q.avg_degree;
  double dmax = 0.0, irr = 0.0;
  for (std::int64_t i = 0; i < q.n; ++i) {
    double d = static_cast<double>(q.degree(i));
    dmax = std::max(dmax, d);
    if (q.avg_degree > 0.0) irr = std::max(irr, std::abs(d / q.avg_degree - 1.0));
  }
  st.max_degree = dmax;
  st.degree_irregularity = irr;
  st.inf_norm = q.inf_norm;

  if (q.n == 0) return st;
  if (q.n == 1) { st.lambda2 = 0.0; st.lambda_min = 0.0; return st; }

  if (q.n <= 2048 && !force_iterative) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(q.n, q.n);
    for (std::int64_t i = 0; i < q.n; ++i)
      for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k)
        dense(i, q.col[k]) = q.val[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();  // ascending
    st.lambda_min = ev[0];
    st.lambda2 = ev[q.n - 2];
  } else {
    // Iterative path: λ₁ by power iteration on Q + cI, λ₂ after deflating v₁,
    // λ_min from the top eigenvalue of cI − Q.
    const double shift = st.inf_norm + 1.0;
    const double tol = 1e-6;  // iterate tighter than the promised 1e-4
    const int iters = 5000;
    auto [l1, v1] = power_iterate(q, shift, false, {}, tol, iters);
    auto [l2, v2] = power_iterate(q, shift, false, {v1}, tol, iters);
    auto [lm_neg, vm] = power_iterate(q, shift, true, {}, tol, iters);
    st.lambda2 = l2;
    st.lambda_min = -lm_neg;
    (void)l1;
  }
  return st;
}

void save_edge_list(const AdjacencyMatrix& adj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_edge_list: cannot open " + path);
  out << adj.n << ' ' << adj.num_edges() << '\n';
  for (auto [i, j] : adj.edges) out << i << ' ' << j << '\n';
  if (!out) throw std::runtime_error("save_edge_list: write failed on " + path);
}

AdjacencyMatrix load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
  std::int64_t n = 0, m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("load_edge_list: bad header (want `n m`)");
  AdjacencyMatrix g;
  g.n = n;
  g.edges.reserve(static_cast<std::size_t>(m));
  for (std::int64_t k = 0; k < m; ++k) {
    std::int64_t i = 0, j = 0;
    if (!(in >> i >> j)) throw std::runtime_error("load_edge_list: truncated edge list");
    if (i == j) throw std::runtime_error("load_edge_list: self-loop rejected");
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::runtime_error("load_edge_list: endpoint out of range");
    auto lo = std::min(i, j), hi = std::max(i, j);
    g.edges.emplace_back(static_cast<std::int32_t>(lo), static_cast<std::int32_t>(hi));
  }
  std::sort(g.edges.begin(), g.edges.end());
  if (std::adjacent_find(g.edges.begin(), g.edges.end()) != g.edges.end())
    throw std::runtime_error("load_edge_list: duplicate edge rejected");
  g.build_index();
  return g;
}

}  // namespace ising
