// Signal classes: collections of candidate support sets for the external
// field, either generic size-s subsets of a mean-field vertex set or
// axis-aligned sub-cubes of a lattice, together with disjoint subcollections,
// diagnostics, and the extremal alternative field vectors built on them.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ising {

struct SignalClass {
  std::int64_t n = 0;          // ambient number of vertices
  std::int64_t s = 0;          // realized common set size (cube volume for lattices)
  std::int64_t nominal_s = 0;  // requested set size before any cube rounding
  std::vector<std::vector<std::int32_t>> sets;  // each sorted ascending, size s
  bool disjoint_flag = false;
  // Lattice geometry when the class was built from a lattice; dim == 0 otherwise.
  int dim = 0;
  int side = 0;
  std::int64_t count() const { return static_cast<std::int64_t>(sets.size()); }
  void validate() const;  // sizes, ranges, sortedness, disjointness when flagged
};

struct AlternativeSpec {
  SignalClass signal_class;
  double A = 0.0;  // minimum signal strength, must be > 0 when used
};

struct ClassValidation {
  double log_count_ratio = 0.0;     // log|C| / log n
  double log_disjoint_ratio = 0.0;  // log|C'| / log n
  std::int64_t min_separation = -1;  // min pairwise set-to-set l1 distance; -1 if n/a
  bool degenerate = false;           // |C| <= 1 (informally the class must grow)
};

// Disjoint mode: the blocks [k*s, (k+1)*s) for k < count (requires count*s <= n).
// Otherwise: `count` distinct size-s subsets sampled without replacement, seeded.
SignalClass make_mean_field_class(std::int64_t n, std::int64_t s, std::int64_t count,
                                  bool disjoint, std::uint64_t seed = 0);

// All axis-aligned sub-cubes of edge ceil(s^(1/dim)) fully inside a dim-cube of
// the given side; realized set size is the cube volume edge^dim.
SignalClass make_lattice_cube_class(int dim, int side, std::int64_t s);

// Greedy scan in class order keeping sets that are pairwise disjoint and, for
// lattice classes, separated by l1 distance strictly greater than
// min_separation (so the kept sets satisfy separation >= min_separation + 1).
// Throws if fewer than two sets survive from a class that had at least two.
SignalClass disjoint_subcollection(const SignalClass& cls, std::int64_t min_separation);

ClassValidation validate_class(const SignalClass& cls, const SignalClass& subcollection);

// Extremal alternative: field A on the chosen set, zero elsewhere.
std::vector<double> alternative_field(const AlternativeSpec& alt, std::int64_t which_set);

// Minimum l1 distance between two vertex sets in lattice coordinates.
std::int64_t set_separation(const std::vector<std::int32_t>& a,
                            const std::vector<std::int32_t>& b, int dim, int side);

// Text format: header `n s count`, then one whitespace-separated set per line.
void save_class(const SignalClass& cls, const std::string& path);
SignalClass load_class(const std::string& path);

}  // namespace ising
