#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "shiwa/local_search.hpp"

namespace shiwa {

namespace {

constexpr double kGolden = 1.618033988749895;
constexpr double kGoldenSection = 0.3819660112501051;
constexpr int kMaxBracketSteps = 60;
constexpr int kMaxBrentSteps = 100;

}  // namespace

Powell::Powell(std::size_t d, std::uint64_t, OptimizerOptions options)
    : SequentialSearch(d, std::move(options)) {}

bool Powell::degenerate() const {
  const auto d = static_cast<Eigen::Index>(directions_.size());
  Matrix m(d, d);
  for (Eigen::Index j = 0; j < d; ++j) m.col(j) = directions_[static_cast<std::size_t>(j)].normalized();
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector s = svd.singularValues();
  return !(s[d - 1] > 1e-8 * s[0]);
}

// Minimizes t -> f(origin + t * direction) given f(origin) = value.
ProbeSequence Powell::line_search(Vector origin, double value, Vector direction, double scale, LineResult& out) {
  out.point = origin;
  out.value = value;
  out.alpha = 0.0;
  auto track = [&out](const Vector& p, double f, double t) {
    if (f < out.value) {
      out.point = p;
      out.value = f;
      out.alpha = t;
    }
  };
  auto at = [&](double t) -> Vector { return origin + t * direction; };

  // Bracket.
  double a = 0.0, fa = value;
  double b = scale;
  Vector pb = at(b);
  double fb = co_yield pb;
  track(pb, fb, b);
  if (fb > fa) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = b + kGolden * (b - a);
  Vector pc = at(c);
  double fc = co_yield pc;
  track(pc, fc, c);
  for (int i = 0; i < kMaxBracketSteps && fc < fb; ++i) {
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c = b + kGolden * (b - a);
    pc = at(c);
    fc = co_yield pc;
    track(pc, fc, c);
  }
  if (fc < fb) co_return;  // unbounded along this line within the step cap

  // Brent.
  double lo = std::min(a, c), hi = std::max(a, c);
  double x = b, w = b, v = b;
  double fx = fb, fw = fb, fv = fb;
  double step = 0.0, prev = 0.0;
  const double floor = 1e-14 * scale;
  for (int iter = 0; iter < kMaxBrentSteps; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double tol1 = kLineTolerance * std::abs(x) + floor;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (hi - lo)) break;
    bool golden = true;
    if (std::abs(prev) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double older = prev;
      prev = step;
      if (!(std::abs(p) >= std::abs(0.5 * q * older) || p <= q * (lo - x) || p >= q * (hi - x))) {
        step = p / q;
        const double u = x + step;
        if (u - lo < tol2 || hi - u < tol2) step = mid >= x ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      prev = (x >= mid) ? lo - x : hi - x;
      step = kGoldenSection * prev;
    }
    const double u = std::abs(step) >= tol1 ? x + step : x + (step >= 0.0 ? tol1 : -tol1);
    const Vector pu = at(u);
    const double fu = co_yield pu;
    track(pu, fu, u);
    if (fu <= fx) {
      if (u >= x) lo = x; else hi = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) lo = u; else hi = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
}

ProbeSequence Powell::search() {
  const std::size_t d = dimension();
  Vector x = start();
  double fx = co_yield x;

  directions_.clear();
  for (std::size_t i = 0; i < d; ++i) {
    directions_.push_back(Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)));
  }
  scales_.assign(d, initial_step());

  auto rescale = [this](std::size_t i, double alpha) {
    scales_[i] = std::max({std::abs(alpha), 0.1 * scales_[i], 1e-12 * initial_step()});
  };

  LineResult line;
  for (;;) {
    ++iterations_;
    const Vector x0 = x;
    const double f0 = fx;
    std::size_t biggest = 0;
    double delta = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double before = fx;
      {
        ProbeSequence sub = line_search(x, fx, directions_[i], scales_[i], line);
        while (const Vector* p = sub.next()) {
          const double v = co_yield *p;
          sub.answer(v);
        }
      }
      x = line.point;
      fx = line.value;
      rescale(i, line.alpha);
      if (before - fx > delta) {
        delta = before - fx;
        biggest = i;
      }
    }

    if (2.0 * (f0 - fx) <= 1e-14 * (std::abs(f0) + std::abs(fx)) + 1e-300) {
      // No progress over a full sweep: restart the direction set.
      for (std::size_t i = 0; i < d; ++i) {
        directions_[i] = Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i));
      }
      scales_.assign(d, initial_step());
      ++resets_;
      continue;
    }

    const Vector extrapolated = 2.0 * x - x0;
    const double fe = co_yield extrapolated;
    if (fe < f0) {
      const double t = 2.0 * (f0 - 2.0 * fx + fe) * (f0 - fx - delta) * (f0 - fx - delta) -
                       delta * (f0 - fe) * (f0 - fe);
      if (t < 0.0) {
        const Vector dir = x - x0;
        {
          ProbeSequence sub = line_search(x, fx, dir, 1.0, line);
          while (const Vector* p = sub.next()) {
            const double v = co_yield *p;
            sub.answer(v);
          }
        }
        x = line.point;
        fx = line.value;
        directions_[biggest] = directions_.back();
        scales_[biggest] = scales_.back();
        directions_.back() = dir;
        scales_.back() = std::max(std::abs(line.alpha), 0.1);
      }
    }
    if (fe < fx) {
      x = extrapolated;
      fx = fe;
    }

    if (iterations_ % d == 0 && degenerate()) {
      for (std::size_t i = 0; i < d; ++i) {
        directions_[i] = Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i));
      }
      scales_.assign(d, initial_step());
      ++resets_;
    }
  }
}

std::unique_ptr<Powell> make_powell(std::size_t d, std::uint64_t seed, std::optional<Vector> start_point,
                                    OptimizerOptions options) {
  if (start_point) options.start = std::move(start_point);
  return std::make_unique<Powell>(d, seed, std::move(options));
}

}  // namespace shiwa
