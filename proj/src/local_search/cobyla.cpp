#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "shiwa/local_search.hpp"

namespace shiwa {

namespace {
constexpr double kAcceptRatio = 0.1;
constexpr double kExpandRatio = 0.7;
constexpr double kGeometryFactor = 2.0;
}  // namespace

CobylaLike::CobylaLike(std::size_t d, std::uint64_t, OptimizerOptions options)
    : SequentialSearch(d, std::move(options)) {}

ProbeSequence CobylaLike::search() {
  const std::size_t d = dimension();
  const auto n = static_cast<Eigen::Index>(d);
  rho_ = initial_step();

  std::vector<Vector> pts(d + 1);
  std::vector<double> vals(d + 1, std::numeric_limits<double>::infinity());

  auto best_index = [&] {
    return static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  };

  pts[0] = start();
  vals[0] = co_yield pts[0];
  for (;;) {
    // (Re)build the simplex around the incumbent at the current radius.
    const std::size_t b0 = best_index();
    const Vector centre = pts[b0];
    const double fcentre = vals[b0];
    pts[0] = centre;
    vals[0] = fcentre;
    for (std::size_t i = 1; i <= d; ++i) {
      pts[i] = centre + rho_ * Vector::Unit(n, static_cast<Eigen::Index>(i - 1));
      vals[i] = co_yield pts[i];
    }

    for (;;) {
      const std::size_t b = best_index();
      Matrix edges(n, n);
      Vector rhs(n);
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == b) continue;
        const auto row = static_cast<Eigen::Index>(others.size());
        edges.row(row) = (pts[i] - pts[b]).transpose();
        rhs[row] = vals[i] - vals[b];
        others.push_back(i);
      }
      Eigen::FullPivLU<Matrix> lu(edges);
      if (!lu.isInvertible()) break;  // degenerate simplex: rebuild
      const Vector g = lu.solve(rhs);
      const double gnorm = g.norm();
      if (!(gnorm > 0.0) || !std::isfinite(gnorm)) {
        rho_ *= 0.5;
        break;
      }

      const Vector trial = pts[b] - (rho_ / gnorm) * g;
      const double ft = co_yield trial;
      const double predicted = rho_ * gnorm;
      const double actual = vals[b] - ft;
      const double ratio = actual / predicted;

      if (ratio > kAcceptRatio) {
        // Replace the vertex farthest from the new point.
        std::size_t far = b;
        double far_dist = -1.0;
        for (std::size_t i = 0; i <= d; ++i) {
          const double dist = (pts[i] - trial).norm();
          if (dist > far_dist) {
            far_dist = dist;
            far = i;
          }
        }
        pts[far] = trial;
        vals[far] = ft;
        accepted_.emplace_back(predicted, actual);
        if (ratio > kExpandRatio) {
          rho_ *= 2.0;
          ++expansions_;
        }
        continue;
      }

      // Failed step. Repair geometry if some vertex is too far from the
      // incumbent; otherwise shrink.
      std::size_t far = b;
      double far_dist = 0.0;
      for (std::size_t i = 0; i <= d; ++i) {
        const double dist = (pts[i] - pts[b]).norm();
        if (dist > far_dist) {
          far_dist = dist;
          far = i;
        }
      }
      if (ft < vals[b]) {
        pts[far] = trial;
        vals[far] = ft;
        continue;
      }
      if (far_dist > kGeometryFactor * rho_) {
        // Move the far vertex along the row of the inverse edge matrix, the
        // direction orthogonal to the opposite face.
        const Matrix inv = lu.inverse();
        const auto slot = static_cast<Eigen::Index>(std::find(others.begin(), others.end(), far) - others.begin());
        Vector dir = inv.col(slot);
        dir.normalize();
        pts[far] = pts[b] + rho_ * dir;
        vals[far] = co_yield pts[far];
        continue;
      }
      rho_ *= 0.5;
      if (rho_ < 1e-13 * std::max(1.0, pts[b].norm())) {
        rho_ = initial_step();
        break;
      }
    }
  }
}

std::unique_ptr<CobylaLike> make_cobyla_like(std::size_t d, std::uint64_t seed, std::optional<Vector> start_point,
                                             OptimizerOptions options) {
  if (start_point) options.start = std::move(start_point);
  return std::make_unique<CobylaLike>(d, seed, std::move(options));
}

}  // namespace shiwa
