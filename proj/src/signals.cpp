#include "ising/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ising/graphs.hpp"
#include "ising/model.hpp"
#include "ising/rng.hpp"

namespace ising {

void SignalClass::validate() const {
  if (n < 1) throw std::invalid_argument("SignalClass: n must be >= 1");
  if (s < 1 || s > n) throw std::invalid_argument("SignalClass: need 1 <= s <= n");
  for (const auto& S : sets) {
    if (static_cast<std::int64_t>(S.size()) != s)
      throw std::invalid_argument("SignalClass: set size != s");
    for (std::size_t k = 0; k < S.size(); ++k) {
      if (S[k] < 0 || S[k] >= n)
        throw std::invalid_argument("SignalClass: index out of range");
      if (k > 0 && S[k] <= S[k - 1])
        throw std::invalid_argument("SignalClass: sets must be sorted, no repeats");
    }
  }
  if (disjoint_flag) {
    std::vector<char> seen(n, 0);
    for (const auto& S : sets)
      for (auto i : S) {
        if (seen[i]) throw std::invalid_argument("SignalClass: disjoint flag but sets overlap");
        seen[i] = 1;
      }
  }
}

SignalClass make_mean_field_class(std::int64_t n, std::int64_t s, std::int64_t count,
                                  bool disjoint, std::uint64_t seed) {
  if (n < 1 || s < 1 || s > n || count < 1)
    throw std::invalid_argument("make_mean_field_class: need n >= 1, 1 <= s <= n, count >= 1");
  SignalClass cls;
  cls.n = n;
  cls.s = s;
  cls.nominal_s = s;
  cls.disjoint_flag = disjoint;
  if (disjoint) {
    if (count * s > n)
      throw std::invalid_argument("make_mean_field_class: count*s > n, disjoint class infeasible");
    for (std::int64_t k = 0; k < count; ++k) {
      std::vector<std::int32_t> S(s);
      for (std::int64_t i = 0; i < s; ++i) S[i] = static_cast<std::int32_t>(k * s + i);
      cls.sets.push_back(std::move(S));
    }
    return cls;
  }
  // Distinct random size-s subsets; partial Fisher-Yates per draw, de-duplicated.
  Rng rng = make_rng(seed);
  std::set<std::vector<std::int32_t>> seen;
  std::vector<std::int32_t> pool(n);
  for (std::int64_t i = 0; i < n; ++i) pool[i] = static_cast<std::int32_t>(i);
  const std::int64_t max_attempts = 1000 * count + 1000;
  std::int64_t attempts = 0;
  while (static_cast<std::int64_t>(cls.sets.size()) < count) {
    if (++attempts > max_attempts)
      throw std::runtime_error("make_mean_field_class: cannot find enough distinct sets");
    for (std::int64_t i = 0; i < s; ++i) {
      std::int64_t j = i + static_cast<std::int64_t>(uniform_below(rng, n - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::int32_t> S(pool.begin(), pool.begin() + s);
    std::sort(S.begin(), S.end());
    if (seen.insert(S).second) cls.sets.push_back(std::move(S));
  }
  return cls;
}

namespace {

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

}  // namespace

SignalClass make_lattice_cube_class(int dim, int side, std::int64_t s) {
  if (dim < 1 || side < 2 || s < 1)
    throw std::invalid_argument("make_lattice_cube_class: need dim >= 1, side >= 2, s >= 1");
  // Smallest integer edge with edge^dim >= s.
  std::int64_t edge = static_cast<std::int64_t>(
      std::ceil(std::pow(static_cast<double>(s), 1.0 / dim)));
  while (edge > 1 && ipow(edge - 1, dim) >= s) --edge;
  while (ipow(edge, dim) < s) ++edge;
  if (edge > side) {
    std::ostringstream msg;
    msg << "make_lattice_cube_class: cube edge " << edge << " exceeds side " << side;
    throw std::invalid_argument(msg.str());
  }

  SignalClass cls;
  cls.dim = dim;
  cls.side = side;
  cls.n = ipow(side, dim);
  cls.nominal_s = s;
  cls.s = ipow(edge, dim);

  const std::int64_t anchors_per_axis = side - edge + 1;
  std::vector<int> anchor(dim, 0);
  while (true) {
    std::vector<std::int32_t> S;
    S.reserve(cls.s);
    std::vector<int> off(dim, 0);
    while (true) {
      std::int64_t v = 0;
      for (int k = 0; k < dim; ++k) v = v * side + (anchor[k] + off[k]);
      S.push_back(static_cast<std::int32_t>(v));
      int k = dim - 1;
      while (k >= 0 && off[k] == edge - 1) off[k--] = 0;
      if (k < 0) break;
      ++off[k];
    }
    std::sort(S.begin(), S.end());
    cls.sets.push_back(std::move(S));
    int k = dim - 1;
    while (k >= 0 && anchor[k] == anchors_per_axis - 1) anchor[k--] = 0;
    if (k < 0) break;
    ++anchor[k];
  }
  return cls;
}

std::int64_t set_separation(const std::vector<std::int32_t>& a,
                            const std::vector<std::int32_t>& b, int dim, int side) {
  std::int64_t best = -1;
  for (auto u : a) {
    auto cu = lattice_coords(u, dim, side);
    for (auto v : b) {
      std::int64_t d = l1_distance(cu, lattice_coords(v, dim, side));
      if (best < 0 || d < best) best = d;
    }
  }
  return best;
}

SignalClass disjoint_subcollection(const SignalClass& cls, std::int64_t min_separation) {
  if (cls.sets.empty()) throw std::invalid_argument("disjoint_subcollection: empty class");
  const bool lattice = cls.dim > 0;

  SignalClass sub = cls;
  sub.sets.clear();
  sub.disjoint_flag = true;
  std::vector<char> used(cls.n, 0);
  for (const auto& S : cls.sets) {
    bool ok = true;
    for (auto i : S)
      if (used[i]) { ok = false; break; }
    if (ok && lattice && min_separation > 0) {
      for (const auto& T : sub.sets) {
        if (set_separation(S, T, cls.dim, cls.side) <= min_separation) { ok = false; break; }
      }
    }
    if (!ok) continue;
    for (auto i : S) used[i] = 1;
    sub.sets.push_back(S);
  }
  if (sub.count() < 2 && cls.count() >= 2)
    throw std::runtime_error(
        "disjoint_subcollection: separation too large, fewer than two sets survive");
  return sub;
}

ClassValidation validate_class(const SignalClass& cls, const SignalClass& subcollection) {
  ClassValidation v;
  const double logn = cls.n >= 2 ? std::log(static_cast<double>(cls.n)) : 0.0;
  v.degenerate = cls.count() <= 1 || cls.n < 2;
  if (logn > 0.0) {
    if (cls.count() >= 1)
      v.log_count_ratio = std::log(static_cast<double>(cls.count())) / logn;
    if (subcollection.count() >= 1)
      v.log_disjoint_ratio = std::log(static_cast<double>(subcollection.count())) / logn;
  }
  if (subcollection.dim > 0 && subcollection.count() >= 2) {
    std::int64_t best = -1;
    for (std::int64_t a = 0; a < subcollection.count(); ++a)
      for (std::int64_t b = a + 1; b < subcollection.count(); ++b) {
        std::int64_t d = set_separation(subcollection.sets[a], subcollection.sets[b],
                                        subcollection.dim, subcollection.side);
        if (best < 0 || d < best) best = d;
      }
    v.min_separation = best;
  }
  return v;
}

std::vector<double> alternative_field(const AlternativeSpec& alt, std::int64_t which_set) {
  if (!(alt.A > 0.0))
    throw std::invalid_argument("alternative_field: signal strength A must be > 0");
  if (which_set < 0 || which_set >= alt.signal_class.count())
    throw std::invalid_argument("alternative_field: set index out of range");
  return field_vector(alt.signal_class.n, alt.signal_class.sets[which_set], alt.A);
}

void save_class(const SignalClass& cls, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_class: cannot open " + path);
  out << cls.n << ' ' << cls.s << ' ' << cls.count() << '\n';
  for (const auto& S : cls.sets) {
    for (std::size_t k = 0; k < S.size(); ++k) out << (k ? " " : "") << S[k];
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_class: write failed on " + path);
}

SignalClass load_class(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_class: cannot open " + path);
  SignalClass cls;
  std::int64_t count = 0;
  if (!(in >> cls.n >> cls.s >> count))
    throw std::runtime_error("load_class: bad header (want `n s count`)");
  cls.nominal_s = cls.s;
  for (std::int64_t k = 0; k < count; ++k) {
    std::vector<std::int32_t> S(cls.s);
    for (std::int64_t i = 0; i < cls.s; ++i)
      if (!(in >> S[i])) throw std::runtime_error("load_class: truncated set list");
    std::sort(S.begin(), S.end());
    cls.sets.push_back(std::move(S));
  }
  // Recover the disjointness flag by inspection.
  std::vector<char> seen(cls.n, 0);
  cls.disjoint_flag = true;
  for (const auto& S : cls.sets)
    for (auto i : S) {
      if (i < 0 || i >= cls.n) throw std::runtime_error("load_class: index out of range");
      if (seen[i]) cls.disjoint_flag = false;
      seen[i] = 1;
    }
  cls.validate();
  return cls;
}

}  // namespace ising
