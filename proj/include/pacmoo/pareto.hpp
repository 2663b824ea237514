#pragma once

#include <vector>

#include "pacmoo/core.hpp"

namespace pacmoo {

/// Pareto dominance under maximization: a >= b everywhere and a > b somewhere.
template <typename DerivedA, typename DerivedB>
bool dominates(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw UsageError("dominates: length mismatch");
  bool strict = false;
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return false;
    if (a(i) > b(i)) strict = true;
  }
  return strict;
}

/// Indices (ascending) of rows not dominated by any other row. Duplicate nondominated rows
/// are all kept. Throws UsageError on an empty matrix.
std::vector<Index> pareto_front(const Matrix& points);

/// Exact hypervolume dominated by the rows of `front` and bounded below by `ref`.
/// Rows that do not strictly exceed ref in every component contribute nothing.
/// K == 2 uses a sorted sweep, K >= 3 uses WFG-style recursive slicing.
double hypervolume(const Matrix& front, const Vector& ref);

/// Recursive slicing without the two-objective shortcut; exposed for cross-checking.
double hypervolume_recursive(const Matrix& front, const Vector& ref);

/// Returns the rows of `points` listed in `indices`.
Matrix select_rows(const Matrix& points, const std::vector<Index>& indices);

}  // namespace pacmoo
