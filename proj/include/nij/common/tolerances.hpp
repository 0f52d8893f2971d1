#pragma once

namespace nij {

/// Numerical thresholds shared by all modules.
struct Tolerances {
  /// Algebraic identities (J^2 = -I, antilinearity, invariance residuals).
  double alg = 1e-9;
  /// Relative singular-value cut for rank decisions.
  double rank = 1e-8;
  /// Validation of charted fields and integrability verdicts.
  double field = 1e-9;
  /// Residuals of the dimension-4 canonical frame (two nested difference layers).
  double frame = 1e-4;
  /// Maximum residual of a polynomial refit in pullback.
  double fit = 1e-8;
  /// Absolute floor below which a tensor or matrix counts as zero.
  double zero = 1e-9;
};

}  // namespace nij
