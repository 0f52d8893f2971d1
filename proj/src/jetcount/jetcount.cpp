#include "nij/jetcount/jetcount.hpp"

#include "nij/common/error.hpp"

namespace nij::jetcount {

namespace {

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Cited stabilizer dimensions.
//   n = 2, step 1: "transitive (8-dimensional stabilizer)"
//   n = 2, step 2: "Again ... transitive (8-dimensional stabilizer)"
//   n = 2, step 4: "the action of G^3 has 8+8=16-dimensional stabilizer"
//   n = 3, step 1: "transitive (18-dimensional stabilizer)"
//   n = 3, step 2: 18 plus the 2 from the codimension-2 orbits of first-order data
constexpr std::int64_t kStabN2Step1 = 8;
constexpr std::int64_t kStabN2Step2 = 8;
constexpr std::int64_t kStabN3Step1 = 18;
constexpr std::int64_t kStabN3Extra = 2;
constexpr std::int64_t kOrbitCodimN3 = 2;

CountRow row(int n, int order, std::optional<std::int64_t> stab) {
  CountRow r;
  r.order = order;
  r.jet_rank = jet_fiber_rank(2 * n, order);
  r.structure_rank = structure_fiber_rank(n, order - 1);
  r.stabilizer = stab;
  r.transitive = r.jet_rank - r.structure_rank == stab.value_or(0);
  return r;
}

}  // namespace

std::int64_t jet_fiber_rank(int m, int l) {
  if (m < 2 || l < 1) throw Error(ErrorKind::Argument, "jet_fiber_rank needs m >= 2 and l >= 1");
  return m * binomial(m + l - 1, l);
}

std::int64_t structure_fiber_rank(int n, int l) {
  if (n < 2 || l < 0) throw Error(ErrorKind::Argument, "structure_fiber_rank needs n >= 2 and l >= 0");
  const std::int64_t base = 2LL * n * n;
  return base * binomial(2LL * n + l - 1, l);
}

CountTable invariant_count_bound(int n) {
  if (n < 2) throw Error(ErrorKind::Argument, "invariant_count_bound needs n >= 2");
  CountTable t;
  t.n = n;
  if (n == 2) {
    t.rows = {row(2, 1, kStabN2Step1), row(2, 2, kStabN2Step2), row(2, 3, std::nullopt), row(2, 4, std::nullopt)};
    t.rows[3].stabilizer = kStabN2Step1 + kStabN2Step2;
    t.rows[3].transitive = false;
    const CountRow& last = t.rows[3];
    t.invariant_bound = last.structure_rank - last.jet_rank - *last.stabilizer;
    t.bound_order = 3;
    t.derivation = std::to_string(last.structure_rank) + "-" + std::to_string(last.jet_rank) + "-" +
                   std::to_string(*last.stabilizer) + "=" + std::to_string(t.invariant_bound);
    return t;
  }
  if (n == 3) {
    t.rows = {row(3, 1, kStabN3Step1), row(3, 2, kStabN3Step1), row(3, 3, std::nullopt)};
    t.rows[1].stabilizer = kStabN3Step1 + kStabN3Extra;
    t.rows[1].transitive = false;
    const CountRow& last = t.rows[2];
    t.invariant_bound = last.structure_rank - last.jet_rank - kStabN3Step1 * 2 - kStabN3Extra;
    t.bound_order = 2;
    t.first_order_count = kOrbitCodimN3;
    t.derivation = std::to_string(last.structure_rank) + "-" + std::to_string(last.jet_rank) + "-" +
                   std::to_string(kStabN3Step1) + "*2-" + std::to_string(kStabN3Extra) + "=" +
                   std::to_string(t.invariant_bound);
    return t;
  }
  // Orbits of GL(2n) on antilinear skew tensors: dim = n^2 (n - 1), stabilizer
  // of J0 is GL(n, C) of dim 2 n^2.
  const std::int64_t nn = n;
  const std::int64_t tensors = nn * nn * (nn - 1);
  const std::int64_t group = 2 * nn * nn;
  t.rows = {row(n, 1, std::nullopt)};
  t.invariant_bound = tensors - group;
  t.bound_order = 1;
  t.derivation = std::to_string(tensors) + "-" + std::to_string(group) + "=" + std::to_string(t.invariant_bound);
  return t;
}

}  // namespace nij::jetcount
