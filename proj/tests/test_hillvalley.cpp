#include "doctest.h"

#include "hillvallea/hillvalley.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

using namespace hillvallea;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

double square(const Vector& x) { return x.squaredNorm(); }

double double_well(const Vector& x) {
  const double t = x[0] * x[0] - 1.0;
  return t * t;
}

Solution at(const Objective& f, Vector x) {
  const double fx = f(x);
  return {std::move(x), fx, Origin::sample};
}

// Sum of inverted Gaussian bumps: a cheap random multi-modal landscape.
struct Bumps {
  std::vector<Vector> centers;
  std::vector<double> heights;
  std::vector<double> widths;

  double operator()(const Vector& x) const {
    double f = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      f -= heights[k] * std::exp(-(x - centers[k]).squaredNorm() / (2 * widths[k] * widths[k]));
    }
    return f;
  }
};

Bumps random_bumps(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Bumps b;
  const int k = 2 + static_cast<int>(rng() % 5);
  for (int i = 0; i < k; ++i) {
    Vector c(d);
    for (int j = 0; j < d; ++j) c[j] = u(rng);
    b.centers.push_back(c);
    b.heights.push_back(0.5 + u(rng));
    b.widths.push_back(0.05 + 0.2 * u(rng));
  }
  return b;
}

Vector random_point(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(d);
  for (int j = 0; j < d; ++j) x[j] = u(rng);
  return x;
}

std::vector<Solution> random_selection(const Objective& f, int d, std::size_t n, std::mt19937_64& rng) {
  std::vector<Solution> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(at(f, random_point(d, rng)));
  return s;
}

bool same_clusters(const ClusterSet& a, const ClusterSet& b) {
  if (a.size() != b.size() || a.complete != b.complete || a.edge_length != b.edge_length) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.clusters[i].members != b.clusters[i].members) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("hill-valley test examples") {
  EvaluationCounter counter(100);
  SUBCASE("convex segment") {
    BudgetedObjective f(square, 1, counter, Phase::clustering);
    const auto r = hill_valley_test(at(square, vec({-1.0})), at(square, vec({1.0})), 1, f);
    CHECK(r.same_niche);
    CHECK(r.evaluations == 1);
  }
  SUBCASE("double well, one point") {
    BudgetedObjective f(double_well, 1, counter, Phase::clustering);
    const auto r = hill_valley_test(at(double_well, vec({-1.0})), at(double_well, vec({1.0})), 1, f);
    CHECK_FALSE(r.same_niche);
    CHECK(r.evaluations == 1);
  }
  SUBCASE("double well, early exit") {
    BudgetedObjective f(double_well, 1, counter, Phase::clustering);
    const auto r = hill_valley_test(at(double_well, vec({-1.0})), at(double_well, vec({1.0})), 2, f);
    CHECK_FALSE(r.same_niche);
    CHECK(r.evaluations == 1);
    CHECK(counter.used() == 1);
  }
}

TEST_CASE("hill-valley test places points from right to left") {
  std::vector<double> seen;
  EvaluationCounter counter(100);
  BudgetedObjective f(
      [&](const Vector& x) {
        seen.push_back(x[0]);
        return 0.0;
      },
      1, counter, Phase::clustering);
  hill_valley_test(Solution{vec({0.0}), 1.0}, Solution{vec({4.0}), 1.0}, 3, f);
  REQUIRE(seen.size() == 3);
  CHECK(seen[0] == doctest::Approx(3.0));
  CHECK(seen[1] == doctest::Approx(2.0));
  CHECK(seen[2] == doctest::Approx(1.0));
}

TEST_CASE("hill-valley test budget exhaustion merges") {
  // A plateau with a bump on (-0.5, 0.5): points run 2/3, 1/3, ... so the
  // first passes and the second would be a hill.
  const Objective bump = [](const Vector& x) { return std::abs(x[0]) < 0.5 ? 5.0 : 0.0; };
  EvaluationCounter counter(1);
  BudgetedObjective f(bump, 1, counter, Phase::clustering);
  const auto r = hill_valley_test(at(bump, vec({-1.0})), at(bump, vec({1.0})), 5, f);
  CHECK(r.budget_exhausted);
  CHECK(r.same_niche);
  CHECK(counter.used() == 1);
}

TEST_CASE("hill-valley test rejects bad input") {
  EvaluationCounter counter(10);
  BudgetedObjective f(square, 1, counter, Phase::clustering);
  CHECK_THROWS_AS(hill_valley_test(at(square, vec({0.0})), at(square, vec({1.0, 1.0})), 1, f),
                  std::invalid_argument);
  CHECK_THROWS_AS(hill_valley_test(at(square, vec({0.0})), at(square, vec({1.0})), 0, f), std::invalid_argument);
}

TEST_CASE("expected edge length and test point count") {
  CHECK(expected_edge_length(16, 4, 2) == doctest::Approx(2.0));
  CHECK(expected_edge_length(10, 20, 1) == doctest::Approx(0.5));
  CHECK(expected_edge_length(8, 1, 3) == doctest::Approx(2.0));
  CHECK(test_point_count(1.2, 0.5) == 3);
  CHECK(test_point_count(0.4, 0.5) == 1);
  CHECK(test_point_count(2.0, 2.0) == 2);
  CHECK(test_point_count(0.0, 1.0) == 1);
}

TEST_CASE("double-well clustering") {
  EvaluationCounter counter(1000);
  BudgetedObjective f(double_well, 1, counter, Phase::clustering);
  const std::vector<Solution> sel{at(double_well, vec({-1.0})), at(double_well, vec({1.0})),
                                  at(double_well, vec({-0.9})), at(double_well, vec({0.9}))};
  const auto cs = hill_valley_clustering(sel, 4.0, 1, f);
  REQUIRE(cs.size() == 2);
  CHECK(cs.complete);
  CHECK(cs.edge_length == doctest::Approx(1.0));
  CHECK(cs.clusters[0].members == std::vector<std::size_t>{0, 2});
  CHECK(cs.clusters[1].members == std::vector<std::size_t>{1, 3});
}

TEST_CASE("single solution clusters alone for free") {
  EvaluationCounter counter(10);
  BudgetedObjective f(square, 2, counter, Phase::clustering);
  const std::vector<Solution> sel{at(square, vec({0.3, 0.1}))};
  const auto cs = hill_valley_clustering(sel, 1.0, 2, f);
  REQUIRE(cs.size() == 1);
  CHECK(cs.clusters[0].members == std::vector<std::size_t>{0});
  CHECK(counter.used() == 0);
}

TEST_CASE("fitness order is stable") {
  const std::vector<Solution> s{{vec({0.0}), 2.0}, {vec({1.0}), 1.0}, {vec({2.0}), 2.0}, {vec({3.0}), 1.0}};
  CHECK(fitness_order(s) == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("average edge length") {
  const std::vector<Solution> s{{vec({0.0}), 0.0}, {vec({1.0}), 1.0}, {vec({3.0}), 2.0}};
  CHECK(average_edge_length(s) == doctest::Approx(1.5));
  EvaluationCounter counter(100);
  BudgetedObjective f(square, 1, counter, Phase::clustering);
  const auto cs = hill_valley_clustering(s, 100.0, 1, f, EdgeLengthMode::average);
  CHECK(cs.edge_length == doctest::Approx(1.5));
}

TEST_CASE("property: hill-valley symmetry") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const auto bumps = random_bumps(d, rng);
    const Objective obj = bumps;
    const auto a = at(obj, random_point(d, rng));
    const auto b = at(obj, random_point(d, rng));
    const int n = 1 + static_cast<int>(rng() % 12);
    EvaluationCounter c1(1000), c2(1000);
    BudgetedObjective f1(obj, d, c1, Phase::clustering), f2(obj, d, c2, Phase::clustering);
    CHECK(hill_valley_test(a, b, n, f1).same_niche == hill_valley_test(b, a, n, f2).same_niche);
  }
}

TEST_CASE("property: hill-valley evaluation bound") {
  std::mt19937_64 rng(12);
  int rejected = 0, accepted = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const auto bumps = random_bumps(d, rng);
    std::vector<double> values;
    const Objective obj = [&](const Vector& x) {
      const double v = bumps(x);
      values.push_back(v);
      return v;
    };
    const auto a = at(bumps, random_point(d, rng));
    const auto b = at(bumps, random_point(d, rng));
    const int n = 1 + static_cast<int>(rng() % 12);
    EvaluationCounter counter(1000);
    BudgetedObjective f(obj, d, counter, Phase::clustering);
    const auto r = hill_valley_test(a, b, n, f);
    REQUIRE(r.evaluations == static_cast<int>(values.size()));
    CHECK(r.evaluations >= 1);
    CHECK(r.evaluations <= n);
    const double worst = std::max(a.fitness, b.fitness);
    if (r.same_niche) {
      ++accepted;
      CHECK(r.evaluations == n);
      CHECK(std::all_of(values.begin(), values.end(), [&](double v) { return v <= worst; }));
    } else {
      ++rejected;
      // Early exit: the last evaluated point is the first hill.
      CHECK(values.back() > worst);
      CHECK(std::all_of(values.begin(), values.end() - 1, [&](double v) { return v <= worst; }));
    }
  }
  CHECK(accepted > 100);
  CHECK(rejected > 100);
}

TEST_CASE("property: clustering partitions the selection") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const Objective obj = random_bumps(d, rng);
    const std::size_t n = 1 + rng() % 40;
    const auto sel = random_selection(obj, d, n, rng);
    // Occasionally starve the budget to exercise the incomplete path.
    const std::int64_t budget = trial % 5 == 0 ? static_cast<std::int64_t>(rng() % 20) : 100000;
    EvaluationCounter counter(budget);
    BudgetedObjective f(obj, d, counter, Phase::clustering);
    const auto cs = hill_valley_clustering(sel, 1.0, d, f);

    std::vector<int> seen(n, 0);
    double previous_founder = -std::numeric_limits<double>::infinity();
    for (const auto& c : cs.clusters) {
      REQUIRE(!c.members.empty());
      const double founder = sel[c.founder()].fitness;
      CHECK(founder >= previous_founder);
      previous_founder = founder;
      for (auto m : c.members) {
        ++seen[m];
        CHECK(sel[m].fitness >= founder);
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    CHECK(counter.used() <= budget);
    if (!cs.complete) CHECK(counter.exhausted());
  }
}

TEST_CASE("property: neighbour cap bounds the tests per solution") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const auto bumps = random_bumps(d, rng);
    // Solution i runs at most min(i, d+1) tests of at most N_t(diameter) points.
    const std::size_t n = 2 + rng() % 30;
    const auto sel = random_selection(bumps, d, n, rng);
    EvaluationCounter counter(1'000'000);
    BudgetedObjective f(bumps, d, counter, Phase::clustering);
    const double volume = 1.0;
    const auto cs = hill_valley_clustering(sel, volume, d, f);
    const int max_tests_points = test_point_count(std::sqrt(static_cast<double>(d)), cs.edge_length);
    std::int64_t cap = 0;
    for (std::size_t i = 1; i < n; ++i) cap += static_cast<std::int64_t>(std::min<std::size_t>(i, d + 1));
    CHECK(counter.used() <= cap * max_tests_points);
  }
}

TEST_CASE("property: convex objectives give one cluster") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 4);
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    const Matrix h = a * a.transpose() + 0.1 * Matrix::Identity(d, d);
    const Vector center = random_point(d, rng);
    const Objective obj = [h, center](const Vector& x) {
      const Vector z = x - center;
      return z.dot(h * z);
    };
    const auto sel = random_selection(obj, d, 1 + rng() % 50, rng);
    EvaluationCounter counter(1'000'000);
    BudgetedObjective f(obj, d, counter, Phase::clustering);
    CHECK(hill_valley_clustering(sel, 1.0, d, f).size() == 1);
  }
}

TEST_CASE("property: clustering is deterministic") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const Objective obj = random_bumps(d, rng);
    const auto sel = random_selection(obj, d, 1 + rng() % 30, rng);
    EvaluationCounter c1(100000), c2(100000);
    BudgetedObjective f1(obj, d, c1, Phase::clustering), f2(obj, d, c2, Phase::clustering);
    const auto r1 = hill_valley_clustering(sel, 1.0, d, f1);
    const auto r2 = hill_valley_clustering(sel, 1.0, d, f2);
    CHECK(same_clusters(r1, r2));
    CHECK(c1.used() == c2.used());
  }
}

namespace {

// Straightforward quadratic-time clustering used as the reference.
std::vector<std::vector<std::size_t>> reference_clustering(const std::vector<Solution>& sel, double volume, int d,
                                                           const Objective& f) {
  std::vector<std::size_t> order(sel.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sel[a].fitness < sel[b].fitness; });
  const double eel = std::pow(volume / static_cast<double>(sel.size()), 1.0 / d);
  std::vector<std::vector<std::size_t>> clusters{{order[0]}};
  std::vector<std::size_t> cluster_of{0};
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& x = sel[order[i]];
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t j = 0; j < i; ++j) dist.emplace_back((x.position - sel[order[j]].position).norm(), j);
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> tried;
    std::size_t home = clusters.size();
    for (std::size_t k = 0; k < std::min<std::size_t>(i, d + 1); ++k) {
      const auto c = cluster_of[dist[k].second];
      if (std::find(tried.begin(), tried.end(), c) != tried.end()) continue;
      tried.push_back(c);
      const auto& y = sel[order[dist[k].second]];
      const int n = 1 + static_cast<int>(std::floor(dist[k].first / eel));
      bool hill = false;
      for (int t = 1; t <= n && !hill; ++t) {
        const Vector p = x.position + (double(t) / (n + 1)) * (y.position - x.position);
        hill = f(p) > std::max(x.fitness, y.fitness);
      }
      if (!hill) {
        home = c;
        break;
      }
    }
    if (home == clusters.size()) clusters.emplace_back();
    clusters[home].push_back(order[i]);
    cluster_of.push_back(home);
  }
  return clusters;
}

}  // namespace

TEST_CASE("property: large selections cluster like the quadratic reference") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 5);
    const Objective obj = random_bumps(d, rng);
    const std::size_t n = 200 + rng() % 400;
    std::vector<Solution> sel;
    for (std::size_t i = 0; i < n; ++i) {
      Vector x = random_point(d, rng);
      switch (trial % 4) {
        case 1: x = 0.5 * Vector::Ones(d) + 1e-3 * x; break;                        // one tight blob
        case 2: if (i % 3 == 0 && !sel.empty()) x = sel[rng() % sel.size()].position; break;  // duplicates
        case 3: x = Vector::Constant(d, 0.2) + 0.01 * (Vector(d).unaryExpr([&](double) { return g(rng); })); break;
        default: break;
      }
      sel.push_back(at(obj, x));
    }
    EvaluationCounter counter(100'000'000);
    BudgetedObjective f(obj, d, counter, Phase::clustering);
    const auto got = hill_valley_clustering(sel, 1.0, d, f);
    const auto want = reference_clustering(sel, 1.0, d, obj);
    REQUIRE(got.size() == want.size());
    for (std::size_t c = 0; c < want.size(); ++c) CHECK(got.clusters[c].members == want[c]);
  }
}

TEST_CASE("property: average edge length matches the quadratic scan") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 5);
    std::vector<Solution> sorted;
    const std::size_t n = 1 + rng() % 600;
    for (std::size_t i = 0; i < n; ++i) {
      Vector x = random_point(d, rng);
      if (trial % 3 == 0 && i % 4 == 1) x = sorted.back().position;
      sorted.push_back({x, static_cast<double>(i)});
    }
    double total = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < i; ++j) best = std::min(best, (sorted[i].position - sorted[j].position).norm());
      total += best;
    }
    CHECK(average_edge_length(sorted) == (n < 2 ? 0.0 : total / double(n - 1)));
  }
}
