#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nij::jetcount {

/// m * C(m + l - 1, l): fiber rank of the l-jets over (l-1)-jets of vector
/// fields in dimension m. Throws Argument for m < 2 or l < 1.
std::int64_t jet_fiber_rank(int m, int l);

/// 2 n^2 * C(2n + l - 1, l): fiber rank of the structure-bundle jet tower
/// at order l (l = 0 is GL(2n, R) / GL(n, C)). Throws Argument for n < 2 or l < 0.
std::int64_t structure_fiber_rank(int n, int l);

/// One comparison in the dimension count: jets of order `order` of the
/// diffeomorphism group act on the fiber of structure jets of order order - 1.
struct CountRow {
  int order = 0;
  std::int64_t jet_rank = 0;
  std::int64_t structure_rank = 0;
  /// Stabilizer dimension cited for this step, when one is used.
  std::optional<std::int64_t> stabilizer;
  /// jet_rank - structure_rank == stabilizer (or both ranks equal when none is cited).
  bool transitive = false;
};

struct CountTable {
  int n = 0;
  std::vector<CountRow> rows;
  /// Lower bound on the number of differential invariants of `bound_order`.
  std::int64_t invariant_bound = 0;
  int bound_order = 0;
  /// Exact number of first-order invariants when known (n = 3).
  std::optional<std::int64_t> first_order_count;
  /// The arithmetic behind invariant_bound.
  std::string derivation;
};

/// Throws Argument for n < 2.
CountTable invariant_count_bound(int n);

}  // namespace nij::jetcount
