#include "hillvallea/problems.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hillvallea {

SearchDomain::SearchDomain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw std::invalid_argument("domain bounds must be nonempty and of equal dimension");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw std::invalid_argument("domain requires lower < upper in every coordinate");
    }
  }
}

SearchDomain SearchDomain::cube(int dimension, double lower, double upper) {
  return SearchDomain(Vector::Constant(dimension, lower), Vector::Constant(dimension, upper));
}

double SearchDomain::volume() const { return (upper_ - lower_).prod(); }

double SearchDomain::diagonal() const { return (upper_ - lower_).norm(); }

bool SearchDomain::contains(const Vector& x) const {
  return x.size() == lower_.size() && (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

Vector SearchDomain::clamp(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

BudgetedObjective BenchmarkProblem::budgeted(EvaluationCounter& counter, Phase phase) const {
  return BudgetedObjective(objective, dimension(), counter, phase);
}

UnsupportedProblemError::UnsupportedProblemError(int id)
    : std::invalid_argument("benchmark problem " + std::to_string(id) +
                            " (composition function) is not built in; construct a BenchmarkProblem "
                            "with its objective, domain and optima through the library instead"),
      id_(id) {}

std::optional<double> evaluate(const BenchmarkProblem& problem, const Vector& x, EvaluationCounter& counter,
                               Phase phase) {
  auto objective = problem.budgeted(counter, phase);
  return objective(x);
}

namespace functions {

double five_uneven_peak_trap(const Vector& x) {
  const double v = x[0];
  if (v < 2.5) return 80.0 * (2.5 - v);
  if (v < 5.0) return 64.0 * (v - 2.5);
  if (v < 7.5) return 64.0 * (7.5 - v);
  if (v < 12.5) return 28.0 * (v - 7.5);
  if (v < 17.5) return 28.0 * (17.5 - v);
  if (v < 22.5) return 32.0 * (v - 17.5);
  if (v < 27.5) return 32.0 * (27.5 - v);
  return 80.0 * (v - 27.5);
}

double equal_maxima(const Vector& x) { return std::pow(std::sin(5.0 * std::numbers::pi * x[0]), 6.0); }

double uneven_decreasing_maxima(const Vector& x) {
  const double v = x[0];
  const double envelope = std::exp(-2.0 * std::log(2.0) * std::pow((v - 0.08) / 0.854, 2.0));
  return envelope * std::pow(std::sin(5.0 * std::numbers::pi * (std::pow(v, 0.75) - 0.05)), 6.0);
}

double himmelblau(const Vector& x) {
  const double a = x[0] * x[0] + x[1] - 11.0;
  const double b = x[0] + x[1] * x[1] - 7.0;
  return 200.0 - a * a - b * b;
}

double six_hump_camel_back(const Vector& x) {
  const double x2 = x[0] * x[0];
  const double y2 = x[1] * x[1];
  return -4.0 * ((4.0 - 2.1 * x2 + x2 * x2 / 3.0) * x2 + x[0] * x[1] + (4.0 * y2 - 4.0) * y2);
}

namespace {
double shubert_factor(double v) {
  double sum = 0.0;
  for (int j = 1; j <= 5; ++j) {
    sum += j * std::cos((j + 1) * v + j);
  }
  return sum;
}
}  // namespace

double shubert(const Vector& x) {
  double product = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    product *= shubert_factor(x[i]);
  }
  return -product;
}

double vincent(const Vector& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += std::sin(10.0 * std::log(x[i]));
  }
  return sum / static_cast<double>(x.size());
}

double modified_rastrigin(const Vector& x) {
  static constexpr std::array<double, 2> k{3.0, 4.0};
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += 10.0 + 9.0 * std::cos(2.0 * std::numbers::pi * k[static_cast<std::size_t>(i)] * x[i]);
  }
  return -sum;
}

}  // namespace functions

double default_niche_radius(const std::vector<KnownOptimum>& optima, const SearchDomain& domain) {
  if (optima.size() < 2) {
    return 0.01 * domain.diagonal();
  }
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < optima.size(); ++i) {
    for (std::size_t j = i + 1; j < optima.size(); ++j) {
      closest = std::min(closest, (optima[i].position - optima[j].position).norm());
    }
  }
  return 0.5 * closest;
}

namespace {

constexpr int brent_bits = std::numeric_limits<double>::digits / 2;

Vector point(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v[i++] = value;
  return v;
}

// All global minimizers of a 1-D function on [lower, upper]: scan, then
// refine every discrete local minimum with Brent's method.
template <typename F>
std::vector<double> global_minimizers_1d(F f, double lower, double upper, double value_tol) {
  constexpr int steps = 200000;
  const double h = (upper - lower) / steps;
  std::vector<std::pair<double, double>> refined;
  double prev = f(lower);
  double curr = f(lower + h);
  for (int s = 1; s < steps; ++s) {
    const double next = f(lower + (s + 1) * h);
    if (curr <= prev && curr <= next) {
      const double a = lower + (s - 1) * h;
      const double b = lower + (s + 1) * h;
      refined.push_back(boost::math::tools::brent_find_minima(f, a, b, brent_bits));
    }
    prev = curr;
    curr = next;
  }
  if (const double fl = f(lower); fl < f(lower + h)) refined.emplace_back(lower, fl);
  if (const double fu = f(upper); fu < f(upper - h)) refined.emplace_back(upper, fu);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [x, fx] : refined) best = std::min(best, fx);
  std::vector<double> minimizers;
  for (const auto& [x, fx] : refined) {
    if (fx <= best + value_tol &&
        std::none_of(minimizers.begin(), minimizers.end(), [&](double m) { return std::abs(m - x) < 1e-6; })) {
      minimizers.push_back(x);
    }
  }
  std::sort(minimizers.begin(), minimizers.end());
  return minimizers;
}

std::vector<KnownOptimum> with_fitness(const std::vector<Vector>& positions, const Objective& objective) {
  std::vector<KnownOptimum> optima;
  optima.reserve(positions.size());
  for (const auto& p : positions) optima.push_back({p, objective(p)});
  return optima;
}

// Newton iteration on a 2-D system; used to polish analytically known roots.
template <typename Residual, typename Jacobian>
Vector newton_2d(Vector x, Residual residual, Jacobian jacobian) {
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d r = residual(x);
    const Eigen::Matrix2d jac = jacobian(x);
    const Eigen::Vector2d step = jac.fullPivLu().solve(r);
    x -= step;
    if (step.norm() < 1e-15) break;
  }
  return x;
}

std::vector<Vector> shubert_optima(int d) {
  // The internal objective is the product of d copies of a 1-D factor. Its
  // minimum combines extreme values of the factor, so enumerate every
  // assignment of {argmin, argmax} per coordinate and keep the best products.
  auto factor = [](double v) {
    double sum = 0.0;
    for (int j = 1; j <= 5; ++j) sum += j * std::cos((j + 1) * v + j);
    return sum;
  };
  const auto argmin = global_minimizers_1d(factor, -10.0, 10.0, 1e-9);
  const auto argmax = global_minimizers_1d([&](double v) { return -factor(v); }, -10.0, 10.0, 1e-9);
  const double lo = factor(argmin.front());
  const double hi = factor(argmax.front());

  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    double product = 1.0;
    for (int i = 0; i < d; ++i) product *= (mask >> i & 1u) ? hi : lo;
    best = std::min(best, product);
  }

  std::vector<Vector> positions;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    double product = 1.0;
    for (int i = 0; i < d; ++i) product *= (mask >> i & 1u) ? hi : lo;
    if (product > best + 1e-9 * std::abs(best)) continue;

    std::vector<const std::vector<double>*> sets;
    std::size_t combos = 1;
    for (int i = 0; i < d; ++i) {
      sets.push_back((mask >> i & 1u) ? &argmax : &argmin);
      combos *= sets.back()->size();
    }
    for (std::size_t c = 0; c < combos; ++c) {
      Vector p(d);
      std::size_t rest = c;
      for (int i = 0; i < d; ++i) {
        p[i] = (*sets[static_cast<std::size_t>(i)])[rest % sets[static_cast<std::size_t>(i)]->size()];
        rest /= sets[static_cast<std::size_t>(i)]->size();
      }
      positions.push_back(std::move(p));
    }
  }
  return positions;
}

std::vector<Vector> vincent_optima(int d) {
  std::vector<double> coords;
  for (int k = -10; k <= 10; ++k) {
    const double v = std::exp((std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k) / 10.0);
    if (v >= 0.25 && v <= 10.0) coords.push_back(v);
  }
  std::vector<Vector> positions;
  std::size_t combos = 1;
  for (int i = 0; i < d; ++i) combos *= coords.size();
  for (std::size_t c = 0; c < combos; ++c) {
    Vector p(d);
    std::size_t rest = c;
    for (int i = 0; i < d; ++i) {
      p[i] = coords[rest % coords.size()];
      rest /= coords.size();
    }
    positions.push_back(std::move(p));
  }
  return positions;
}

Objective negated(double (*f)(const Vector&)) {
  return [f](const Vector& x) { return -f(x); };
}

BenchmarkProblem finish(BenchmarkProblem problem, const std::vector<Vector>& positions) {
  problem.maximization = true;
  problem.known_global_optima = with_fitness(positions, problem.objective);
  problem.niche_radius = default_niche_radius(problem.known_global_optima, problem.domain);
  return problem;
}

struct CatalogEntry {
  const char* key;
  const char* name;
};

constexpr std::array<CatalogEntry, builtin_problem_count> catalog{{
    {"five-uneven-peak-trap", "Five-Uneven-Peak Trap"},
    {"equal-maxima", "Equal Maxima"},
    {"uneven-decreasing-maxima", "Uneven Decreasing Maxima"},
    {"himmelblau", "Himmelblau"},
    {"six-hump-camel-back", "Six-Hump Camel Back"},
    {"shubert-2d", "Shubert 2D"},
    {"vincent-2d", "Vincent 2D"},
    {"shubert-3d", "Shubert 3D"},
    {"vincent-3d", "Vincent 3D"},
    {"modified-rastrigin", "Modified Rastrigin"},
}};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

BenchmarkProblem make_problem(int id) {
  if (id >= 11 && id <= 20) {
    throw UnsupportedProblemError(id);
  }
  if (id < 1 || id > builtin_problem_count) {
    throw std::invalid_argument("unknown benchmark problem id " + std::to_string(id));
  }
  const auto& entry = catalog[static_cast<std::size_t>(id - 1)];
  auto base = [&](SearchDomain domain, double (*f)(const Vector&), std::int64_t budget) {
    BenchmarkProblem p{.id = id, .name = entry.name, .key = entry.key, .domain = std::move(domain),
                       .objective = negated(f), .known_global_optima = {}, .budget = budget,
                       .niche_radius = 0.0, .maximization = true};
    return p;
  };

  switch (id) {
    case 1:
      return finish(base(SearchDomain::cube(1, 0.0, 30.0), functions::five_uneven_peak_trap, 50000),
                    {point({0.0}), point({30.0})});
    case 2: {
      std::vector<Vector> positions;
      for (double v : {0.1, 0.3, 0.5, 0.7, 0.9}) positions.push_back(point({v}));
      return finish(base(SearchDomain::cube(1, 0.0, 1.0), functions::equal_maxima, 50000), positions);
    }
    case 3: {
      auto f = [](double v) { return -functions::uneven_decreasing_maxima(point({v})); };
      const auto [x, fx] = boost::math::tools::brent_find_minima(f, 0.05, 0.12, brent_bits);
      (void)fx;
      return finish(base(SearchDomain::cube(1, 0.0, 1.0), functions::uneven_decreasing_maxima, 50000),
                    {point({x})});
    }
    case 4: {
      auto residual = [](const Vector& v) {
        return Eigen::Vector2d(v[0] * v[0] + v[1] - 11.0, v[0] + v[1] * v[1] - 7.0);
      };
      auto jacobian = [](const Vector& v) {
        Eigen::Matrix2d j;
        j << 2.0 * v[0], 1.0, 1.0, 2.0 * v[1];
        return j;
      };
      std::vector<Vector> positions;
      for (const auto& start : {point({3.0, 2.0}), point({-2.8, 3.1}), point({-3.8, -3.3}), point({3.6, -1.8})}) {
        positions.push_back(newton_2d(start, residual, jacobian));
      }
      return finish(base(SearchDomain::cube(2, -6.0, 6.0), functions::himmelblau, 50000), positions);
    }
    case 5: {
      // Stationary points of the camel polynomial; gradient and Hessian are exact.
      auto gradient = [](const Vector& v) {
        const double x = v[0], y = v[1];
        return Eigen::Vector2d(8.0 * x - 8.4 * x * x * x + 2.0 * std::pow(x, 5) + y,
                               x + 16.0 * y * y * y - 8.0 * y);
      };
      auto hessian = [](const Vector& v) {
        const double x = v[0], y = v[1];
        Eigen::Matrix2d h;
        h << 8.0 - 25.2 * x * x + 10.0 * std::pow(x, 4), 1.0, 1.0, 48.0 * y * y - 8.0;
        return h;
      };
      std::vector<Vector> positions;
      for (const auto& start : {point({0.0898, -0.7126}), point({-0.0898, 0.7126})}) {
        positions.push_back(newton_2d(start, gradient, hessian));
      }
      return finish(base(SearchDomain(point({-1.9, -1.1}), point({1.9, 1.1})), functions::six_hump_camel_back,
                         50000),
                    positions);
    }
    case 6:
      return finish(base(SearchDomain::cube(2, -10.0, 10.0), functions::shubert, 200000), shubert_optima(2));
    case 7:
      return finish(base(SearchDomain::cube(2, 0.25, 10.0), functions::vincent, 200000), vincent_optima(2));
    case 8:
      return finish(base(SearchDomain::cube(3, -10.0, 10.0), functions::shubert, 400000), shubert_optima(3));
    case 9:
      return finish(base(SearchDomain::cube(3, 0.25, 10.0), functions::vincent, 400000), vincent_optima(3));
    case 10: {
      std::vector<Vector> positions;
      for (double a : {1.0 / 6.0, 0.5, 5.0 / 6.0}) {
        for (double b : {0.125, 0.375, 0.625, 0.875}) positions.push_back(point({a, b}));
      }
      return finish(base(SearchDomain::cube(2, 0.0, 1.0), functions::modified_rastrigin, 200000), positions);
    }
    default:
      break;
  }
  throw std::invalid_argument("unknown benchmark problem id " + std::to_string(id));
}

std::optional<int> problem_id_from_name(std::string_view name) {
  int id = 0;
  const auto* end = name.data() + name.size();
  if (auto [ptr, ec] = std::from_chars(name.data(), end, id); ec == std::errc() && ptr == end) {
    return id;
  }
  const std::string needle = lowercase(name);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (needle == catalog[i].key || needle == lowercase(catalog[i].name)) {
      return static_cast<int>(i) + 1;
    }
  }
  return std::nullopt;
}

}  // namespace hillvallea
