#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "shiwa/core.hpp"
#include "shiwa/optimizers.hpp"

using namespace shiwa;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("ask is deterministic under a fixed seed") {
  auto a = make_one_plus_one_es(2, 0);
  auto b = make_one_plus_one_es(2, 0);
  for (int i = 0; i < 20; ++i) {
    const Candidate ca = a->ask();
    const Candidate cb = b->ask();
    CHECK(ca.point.size() == 2);
    CHECK(ca.point == cb.point);
    const double v = ca.point.squaredNorm();
    a->tell(ca, v);
    b->tell(cb, v);
  }
}

TEST_CASE("p asks before any tell are distinct and outstanding") {
  auto opt = make_cma(5, 3);
  std::set<std::vector<double>> seen;
  for (int i = 0; i < 4; ++i) {
    const Candidate c = opt->ask();
    seen.insert(std::vector<double>(c.point.data(), c.point.data() + c.point.size()));
  }
  CHECK(seen.size() == 4);
  CHECK(opt->num_ask() == 4);
  CHECK(opt->num_outstanding() == 4);
}

TEST_CASE("budget-bound optimizer refuses asks past its budget") {
  OptimizerOptions o;
  o.budget = 3;
  auto opt = make_one_plus_one_es(2, 1, o);
  for (int i = 0; i < 3; ++i) {
    const Candidate c = opt->ask();
    opt->tell(c, 1.0);
  }
  CHECK_THROWS_AS(opt->ask(), BudgetExhausted);
}

TEST_CASE("repeated tells accumulate in the archive") {
  auto opt = make_one_plus_one_es(2, 0);
  const Candidate c = opt->ask();
  opt->tell(c, 3.0);
  opt->tell(c, 5.0);
  const Archive::Entry* e = opt->archive().find(c.point);
  REQUIRE(e != nullptr);
  CHECK(e->count() == 2);
  CHECK(e->mean() == 4.0);
}

TEST_CASE("tell of an unasked point is archived") {
  auto opt = make_one_plus_one_es(2, 0);
  opt->tell(Candidate::continuous(vec({7.0, 8.0})), 2.0);
  CHECK(opt->num_tell() == 1);
  CHECK(opt->archive().find(vec({7.0, 8.0})) != nullptr);
}

TEST_CASE("non-finite values are rejected") {
  auto opt = make_one_plus_one_es(2, 0);
  const Candidate c = opt->ask();
  CHECK_THROWS_AS(opt->tell(c, std::numeric_limits<double>::quiet_NaN()), NonFiniteValue);
  CHECK_THROWS_AS(opt->tell(c, std::numeric_limits<double>::infinity()), NonFiniteValue);
}

TEST_CASE("recommend before any tell") {
  auto opt = make_one_plus_one_es(2, 0);
  CHECK_THROWS_AS(opt->recommend(), NothingObserved);
}

TEST_CASE("recommend is the archive argmin for noise-free optimizers") {
  auto opt = make_one_plus_one_es(2, 0);
  const Vector a = vec({1, 0}), b = vec({0, 1}), c = vec({1, 1});
  opt->tell(Candidate::continuous(a), 1.0);
  opt->tell(Candidate::continuous(b), 0.5);
  opt->tell(Candidate::continuous(c), 2.0);
  CHECK(opt->recommend().point == b);
}

TEST_CASE("tell with the wrong dimension") {
  auto opt = make_one_plus_one_es(3, 0);
  CHECK_THROWS_AS(opt->tell(Candidate::continuous(vec({1, 2})), 1.0), DimensionMismatch);
}

TEST_CASE("archive keys are exact bit patterns") {
  Archive archive;
  archive.add(Candidate::continuous(vec({0.1, 0.2})), 1.0);
  archive.add(Candidate::continuous(vec({0.1, std::nextafter(0.2, 1.0)})), 1.0);
  archive.add(Candidate::continuous(vec({0.1, 0.2})), 3.0);
  CHECK(archive.size() == 2);
  CHECK(archive.total_observations() == 3);
  CHECK(PointKey(vec({0.0})) != PointKey(vec({-0.0})));
}

TEST_CASE("archive best breaks ties by insertion order") {
  Archive archive;
  archive.add(Candidate::continuous(vec({1})), 2.0);
  archive.add(Candidate::continuous(vec({2})), 1.0);
  archive.add(Candidate::continuous(vec({3})), 1.0);
  CHECK(archive.best()->candidate.point[0] == 2.0);
  archive.add(Candidate::continuous(vec({2})), 5.0);
  CHECK(archive.best()->candidate.point[0] == 3.0);
}

TEST_CASE("archive confidence bounds") {
  Archive archive;
  for (int i = 0; i < 4; ++i) archive.add(Candidate::continuous(vec({1})), 1.0);
  for (int i = 0; i < 4; ++i) archive.add(Candidate::continuous(vec({2})), 3.0);
  const Archive::Entry& e = archive.entries()[0];
  const double width = std::sqrt(2.0 * std::log(8.0) / 4.0);
  CHECK(archive.confidence_width(e) == doctest::Approx(width));
  CHECK(archive.lower_bound(e) == doctest::Approx(1.0 - width));
  CHECK(archive.upper_bound(e, 2.0) == doctest::Approx(1.0 + 2.0 * width));
  CHECK(archive.confidence_width(e, 0.0) == 0.0);
}

TEST_CASE("property: archive soundness under random tells") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Archive archive;
    const int n = 1 + static_cast<int>(rng() % 200);
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(rng() % 7);
      archive.add(Candidate::continuous(vec({x})), static_cast<double>(rng() % 100));
    }
    std::size_t sum = 0;
    for (const auto& e : archive.entries()) sum += e.count();
    CHECK(sum == static_cast<std::size_t>(n));
    CHECK(archive.total_observations() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("derive_seed separates indices and is stable") {
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
  CHECK(derive_seed(1, 0) != derive_seed(0, 1));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}

TEST_CASE("domain and descriptor") {
  const Domain mixed({Continuous{}, Categorical{3}, Continuous{}});
  CHECK_FALSE(mixed.is_metrizable());
  CHECK(mixed.num_categorical() == 1);
  CHECK(Domain::continuous(4).is_metrizable());

  const auto d = ProblemDescriptor::for_domain(Domain::categorical(5, 3), 100);
  CHECK(d.dimension == 15);
  CHECK_FALSE(d.is_continuous());

  CHECK_THROWS_AS(ProblemDescriptor::continuous(10, 10, 20).validate(), InvalidDescriptor);
  CHECK_THROWS_AS(ProblemDescriptor::continuous(0, 10).validate(), InvalidDescriptor);
  CHECK_NOTHROW(ProblemDescriptor::continuous(10, 10, 10).validate());
}
