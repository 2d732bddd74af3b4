#include <cmath>
#include <numbers>
#include <utility>

#include "shiwa/benchmark.hpp"

namespace shiwa {

namespace {

using std::numbers::pi;

constexpr double kCondition = 1e6;

double weight(Eigen::Index i, Eigen::Index d) {
  if (d == 1) return 1.0;
  return std::pow(kCondition, static_cast<double>(i) / static_cast<double>(d - 1));
}

double rest_squared(const Vector& z, Eigen::Index from) {
  return from < z.size() ? z.tail(z.size() - from).squaredNorm() : 0.0;
}

double sphere(const Vector& z) { return z.squaredNorm(); }

double cigar(const Vector& z) { return z[0] * z[0] + kCondition * rest_squared(z, 1); }

double alt_cigar(const Vector& z) {
  const Eigen::Index d = z.size();
  return z[d - 1] * z[d - 1] + kCondition * z.head(d - 1).squaredNorm();
}

double discus(const Vector& z) { return kCondition * z[0] * z[0] + rest_squared(z, 1); }

double ellipsoid(const Vector& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += weight(i, z.size()) * z[i] * z[i];
  return s;
}

double alt_ellipsoid(const Vector& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += weight(z.size() - 1 - i, z.size()) * z[i] * z[i];
  return s;
}

double step_ellipsoid(const Vector& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double r = std::floor(z[i] + 0.5);
    s += weight(i, z.size()) * r * r;
  }
  return s;
}

double bent_cigar(const Vector& z) {
  Vector y = z;
  const Eigen::Index d = z.size();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (y[i] > 0.0) {
      const double t = d == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(d - 1);
      y[i] = std::pow(y[i], 1.0 + 0.5 * t * std::sqrt(y[i]));
    }
  }
  return cigar(y);
}

double rastrigin(const Vector& z) {
  double s = 10.0 * static_cast<double>(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) s += z[i] * z[i] - 10.0 * std::cos(2.0 * pi * z[i]);
  return s;
}

double buche_rastrigin(const Vector& z) {
  Vector y = z;
  const Eigen::Index d = z.size();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double t = d == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(d - 1);
    y[i] *= std::pow(10.0, 0.5 * t);
    if (i % 2 == 0 && y[i] > 0.0) y[i] *= 10.0;
  }
  return rastrigin(y);
}

double griewank(const Vector& z) {
  double s = 0.0;
  double p = 1.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    s += z[i] * z[i] / 4000.0;
    p *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return 1.0 + s - p;
}

double rosenbrock(const Vector& z) {
  const Vector y = z.array() + 1.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < y.size(); ++i) {
    const double a = y[i + 1] - y[i] * y[i];
    const double b = 1.0 - y[i];
    s += 100.0 * a * a + b * b;
  }
  if (y.size() == 1) s = (1.0 - y[0]) * (1.0 - y[0]);
  return s;
}

double ackley(const Vector& z) {
  const double n = static_cast<double>(z.size());
  double sq = 0.0, cs = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    sq += z[i] * z[i];
    cs += std::cos(2.0 * pi * z[i]);
  }
  const double v = -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
  return std::max(0.0, v);
}

double lunacek(const Vector& z) {
  constexpr double mu0 = 2.5;
  const double n = static_cast<double>(z.size());
  const double s = 1.0 - 1.0 / (2.0 * std::sqrt(n + 20.0) - 8.2);
  const double mu1 = -std::sqrt((mu0 * mu0 - 1.0) / s);
  double first = 0.0, second = 0.0, wave = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double x = z[i] + mu0;
    first += (x - mu0) * (x - mu0);
    second += (x - mu1) * (x - mu1);
    wave += 1.0 - std::cos(2.0 * pi * (x - mu0));
  }
  return std::min(first, n + s * second) + 10.0 * wave;
}

double hm(const Vector& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z[i] != 0.0) s += z[i] * z[i] * (1.1 + std::cos(1.0 / z[i]));
  }
  return s;
}

// Global basin at the origin and a wider, shallower basin centred at
// (2, ..., 2) / sqrt(d) whose floor sits at 1.
double multipeak(const Vector& z) {
  const double c = 2.0 / std::sqrt(static_cast<double>(z.size()));
  const double second = 1.0 + 0.25 * (z.array() - c).matrix().squaredNorm();
  return std::min(z.squaredNorm(), second);
}

double double_linear_slope(const Vector& z) { return std::abs(z.sum()); }

double step_double_linear_slope(const Vector& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += std::floor(z[i] + 0.5);
  return std::abs(s);
}

// The deceptive functions act on the first two coordinates; any further
// coordinates add their squared norm. In dimension 1 they reduce to |z|.
std::pair<double, double> leading_pair(const Vector& z) { return {z[0], z.size() > 1 ? z[1] : 0.0}; }

double deceptive_illcond(const Vector& z) {
  const auto [a, b] = leading_pair(z);
  const double r = std::hypot(a, b);
  const double angle = std::abs(std::atan2(b, a));
  return std::max(angle, r) + rest_squared(z, 2);
}

double deceptive_path(const Vector& z) {
  const auto [a, b] = leading_pair(z);
  const double r = std::hypot(a, b);
  if (r == 0.0) return rest_squared(z, 2);
  const double angle = b != 0.0 ? std::atan(a / b) : pi / 2.0;
  const double ring = std::floor(1.0 / r);
  const double f = std::abs(std::cos(ring) - angle) > 0.1 ? 1.0 : r;
  return f + rest_squared(z, 2);
}

double deceptive_multimodal(const Vector& z) {
  const auto [a, b] = leading_pair(z);
  const double r = std::hypot(a, b);
  if (r == 0.0) return rest_squared(z, 2);
  const double angle = b != 0.0 ? std::atan(a / b) : pi / 2.0;
  const double f = std::abs(std::cos(1.0 / r) - angle) > 0.1 ? 1.0 : r;
  return f + rest_squared(z, 2);
}

struct Entry {
  const char* name;
  TestFunction fn;
};

constexpr Entry kCatalog[] = {
    {"sphere", sphere},
    {"cigar", cigar},
    {"altcigar", alt_cigar},
    {"ellipsoid", ellipsoid},
    {"altellipsoid", alt_ellipsoid},
    {"stepellipsoid", step_ellipsoid},
    {"discus", discus},
    {"bentcigar", bent_cigar},
    {"rastrigin", rastrigin},
    {"bucherastrigin", buche_rastrigin},
    {"griewank", griewank},
    {"rosenbrock", rosenbrock},
    {"ackley", ackley},
    {"lunacek", lunacek},
    {"hm", hm},
    {"multipeak", multipeak},
    {"doublelinearslope", double_linear_slope},
    {"stepdoublelinearslope", step_double_linear_slope},
    {"deceptiveillcond", deceptive_illcond},
    {"deceptivemultimodal", deceptive_multimodal},
    {"deceptivepath", deceptive_path},
};

}  // namespace

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Entry& e : kCatalog) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

TestFunction find_function(std::string_view name) {
  for (const Entry& e : kCatalog) {
    if (name == e.name) return e.fn;
  }
  throw UnknownName("unknown function '" + std::string(name) + "'");
}

}  // namespace shiwa
