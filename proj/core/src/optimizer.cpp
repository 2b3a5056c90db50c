#include "dam/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dam/errors.hpp"

namespace dam {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ConfigError(msg);
}

int resolve_threads(int t) {
  if (t > 0) return t;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (!(hi > lo)) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = hi;
  return v;
}

constexpr double kGolden = 0.6180339887498949;

// Minimizes f on [a, b] to interval width tol; returns the best probed point.
// f may return +inf on infeasible spots; the bracket must contain a feasible
// region for the search to be useful.
template <class F>
SearchPoint golden_min(double a, double b, double tol, F&& f) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  SearchPoint p;
  if (fc <= fd) {
    p.lambda = c; // caller reinterprets the coordinate
    p.cost = fc;
  } else {
    p.lambda = d;
    p.cost = fd;
  }
  return p;
}

} // namespace

void SearchSpec::validate() const {
  require(std::isfinite(lambda_min) && std::isfinite(lambda_max),
          "search lambda bounds must be finite");
  require(std::isfinite(tau_min) && std::isfinite(tau_max),
          "search tau bounds must be finite");
  require(lambda_max >= lambda_min, "search needs lambda_max >= lambda_min");
  require(tau_max >= tau_min, "search needs tau_max >= tau_min");
  require(tau_min >= 0.0, "search needs tau_min >= 0");
  require(lambda_max > 0.0, "search needs lambda_max > 0");
  require(lambda_points >= 1 && tau_points >= 1,
          "search grid needs at least one point per axis");
  require(refine_tol > 0.0, "search refine_tol must be > 0");
  require(std::isfinite(M) && M > 0.0, "search M must be finite and > 0");
  require(V > 0.0, "search V must be > 0");
  if (objective == Objective::kTotalDiscounted) {
    require(std::isfinite(x) && x >= 0.0, "search x must be finite and >= 0");
    require(x <= V, "search x must be <= V");
  }
}

SearchResult optimize_policy(ScaleCache& cache, const CostSpec& spec,
                             const SearchSpec& search) {
  search.validate();
  spec.validate();
  if (search.objective == Objective::kLongRunAverage)
    cache.prewarm({0.0}, search.M);
  else {
    require(spec.alpha > 0.0, "discounted search needs alpha > 0");
    cache.prewarm({spec.alpha, 0.0}, search.M);
  }

  std::atomic<long long> evals{0};
  const auto eval = [&](double lambda, double tau) -> double {
    if (!(tau < lambda) || lambda <= 0.0 || lambda >= search.V) return kInf;
    // The discounted evaluator prices starts at or above tau only; points
    // with tau above the start level fall outside the priced family.
    if (search.objective == Objective::kTotalDiscounted && tau > search.x)
      return kInf;
    Policy p;
    p.lambda = lambda;
    p.tau = tau;
    p.M = search.M;
    p.V = search.V;
    evals.fetch_add(1, std::memory_order_relaxed);
    if (search.objective == Objective::kLongRunAverage)
      return longrun_average_cost(cache, p, spec);
    return total_discounted_cost(cache, p, spec, search.x);
  };

  const std::vector<double> ls =
      linspace(search.lambda_min, search.lambda_max, search.lambda_points);
  const std::vector<double> ts =
      linspace(search.tau_min, search.tau_max, search.tau_points);
  const std::size_t nl = ls.size();
  const std::size_t nt = ts.size();

  SearchResult res;
  res.trace.resize(nl * nt);

  {
    const int threads = resolve_threads(search.threads);
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= nl * nt) return;
        SearchPoint& pt = res.trace[i];
        pt.lambda = ls[i / nt];
        pt.tau = ts[i % nt];
        try {
          pt.cost = eval(pt.lambda, pt.tau);
        } catch (...) {
          std::lock_guard<std::mutex> lk(error_mu);
          if (!error) error = std::current_exception();
          pt.cost = kInf;
        }
      }
    };
    if (threads <= 1 || nl * nt < 2) {
      worker();
    } else {
      std::vector<std::thread> pool;
      const int nw = static_cast<int>(
          std::min<std::size_t>(static_cast<std::size_t>(threads), nl * nt));
      pool.reserve(static_cast<std::size_t>(nw));
      for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
  }

  std::size_t best_i = 0;
  std::size_t best_j = 0;
  double best_cost = kInf;
  bool found = false;
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double c = res.trace[i * nt + j].cost;
      if (std::isfinite(c) && c < best_cost) {
        best_cost = c;
        best_i = i;
        best_j = j;
        found = true;
      }
    }
  }
  if (!found)
    throw InfeasibleError("no feasible (lambda, tau) policy in the search box");

  double lam = ls[best_i];
  double tau = ts[best_j];

  // Coordinate refinement inside the neighbouring cells of the grid optimum.
  const double feas_gap = 1e-9;
  for (int sweep = 0; sweep < 3; ++sweep) {
    {
      const double lo0 = best_i > 0 ? ls[best_i - 1] : ls.front();
      const double hi0 = best_i + 1 < nl ? ls[best_i + 1] : ls.back();
      const double lo = std::max(lo0, tau + feas_gap);
      const double hi = std::min(hi0, search.V - feas_gap);
      if (hi - lo > search.refine_tol) {
        const SearchPoint p = golden_min(
            lo, hi, search.refine_tol, [&](double l) { return eval(l, tau); });
        if (std::isfinite(p.cost) && p.cost < best_cost) {
          best_cost = p.cost;
          lam = p.lambda;
        }
      }
    }
    {
      const double lo0 = best_j > 0 ? ts[best_j - 1] : ts.front();
      const double hi0 = best_j + 1 < nt ? ts[best_j + 1] : ts.back();
      const double lo = lo0;
      const double hi = std::min(hi0, lam - feas_gap);
      if (hi - lo > search.refine_tol) {
        const SearchPoint p = golden_min(
            lo, hi, search.refine_tol, [&](double t) { return eval(lam, t); });
        if (std::isfinite(p.cost) && p.cost < best_cost) {
          best_cost = p.cost;
          tau = p.lambda; // golden_min reports the coordinate in .lambda
        }
      }
    }
  }

  res.best.lambda = lam;
  res.best.tau = tau;
  res.best.M = search.M;
  res.best.V = search.V;
  res.cost = best_cost;
  res.evaluations = evals.load();
  return res;
}

} // namespace dam
