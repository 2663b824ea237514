#include "pacmoo/pareto.hpp"

#include <algorithm>
#include <numeric>

namespace pacmoo {

namespace {

bool lexicographically_greater(const Matrix& p, Index a, Index b) {
  for (Index k = 0; k < p.cols(); ++k) {
    if (p(a, k) != p(b, k)) return p(a, k) > p(b, k);
  }
  return false;
}

// Keeps only rows strictly above ref in every component.
Matrix clip_to_reference(const Matrix& front, const Vector& ref) {
  std::vector<Index> keep;
  for (Index i = 0; i < front.rows(); ++i) {
    if ((front.row(i).transpose().array() > ref.array()).all()) keep.push_back(i);
  }
  return select_rows(front, keep);
}

Matrix nondominated(const Matrix& points) {
  if (points.rows() == 0) return points;
  return select_rows(points, pareto_front(points));
}

double sweep_2d(const Matrix& front, const Vector& ref) {
  std::vector<Index> order(front.rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (front(a, 0) != front(b, 0)) return front(a, 0) > front(b, 0);
    return front(a, 1) > front(b, 1);
  });
  double volume = 0.0;
  double covered = ref[1];
  for (Index i : order) {
    if (front(i, 1) > covered) {
      volume += (front(i, 0) - ref[0]) * (front(i, 1) - covered);
      covered = front(i, 1);
    }
  }
  return volume;
}

double wfg(const Matrix& front, const Vector& ref, bool sweep_base);

// Volume dominated exclusively by row i among rows i..n-1.
double exclusive_volume(const Matrix& front, Index i, const Vector& ref, bool sweep_base) {
  const double inclusive = (front.row(i).transpose() - ref).prod();
  const Index rest = front.rows() - i - 1;
  if (rest == 0) return inclusive;
  Matrix limited(rest, front.cols());
  for (Index j = 0; j < rest; ++j) {
    limited.row(j) = front.row(i).cwiseMin(front.row(i + 1 + j));
  }
  return inclusive - wfg(nondominated(limited), ref, sweep_base);
}

double wfg(const Matrix& front, const Vector& ref, bool sweep_base) {
  if (front.rows() == 0) return 0.0;
  if (front.rows() == 1) return (front.row(0).transpose() - ref).prod();
  if (sweep_base && front.cols() == 2) return sweep_2d(front, ref);

  // Slicing along the last objective in descending order keeps limit sets small.
  std::vector<Index> order(front.rows());
  std::iota(order.begin(), order.end(), 0);
  const Index last = front.cols() - 1;
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return front(a, last) > front(b, last); });
  const Matrix sorted = select_rows(front, order);
  double volume = 0.0;
  for (Index i = 0; i < sorted.rows(); ++i) volume += exclusive_volume(sorted, i, ref, sweep_base);
  return volume;
}

double hypervolume_impl(const Matrix& front, const Vector& ref, bool sweep_base) {
  if (front.cols() != ref.size()) throw UsageError("hypervolume: reference point length mismatch");
  if (front.cols() < 2) throw UsageError("hypervolume: at least two objectives required");
  const Matrix clipped = clip_to_reference(front, ref);
  if (clipped.rows() == 0) return 0.0;
  return wfg(nondominated(clipped), ref, sweep_base);
}

}  // namespace

Matrix select_rows(const Matrix& points, const std::vector<Index>& indices) {
  Matrix out(static_cast<Index>(indices.size()), points.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) out.row(i) = points.row(indices[i]);
  return out;
}

std::vector<Index> pareto_front(const Matrix& points) {
  if (points.rows() == 0) throw UsageError("pareto_front: empty point set");
  // A dominating point is lexicographically greater, so after a descending lexicographic
  // sort each point only needs checking against the nondominated points seen before it.
  std::vector<Index> order(points.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return lexicographically_greater(points, a, b); });
  std::vector<Index> front;
  for (Index i : order) {
    bool dominated = false;
    for (Index j : front) {
      if (dominates(points.row(j), points.row(i))) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

double hypervolume(const Matrix& front, const Vector& ref) {
  return hypervolume_impl(front, ref, true);
}

double hypervolume_recursive(const Matrix& front, const Vector& ref) {
  return hypervolume_impl(front, ref, false);
}

}  // namespace pacmoo
