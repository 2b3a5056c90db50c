#include "dam/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

#include "dam/errors.hpp"
#include "dam/quadrature.hpp"
#include "dam/rng.hpp"

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

// Runs body(i) for i in [0, n). Work is chunked dynamically, but every output
// must be written to a slot indexed by i, so scheduling cannot leak into the
// results.
template <class F>
void parallel_paths(long long n, int threads, F&& body) {
  const int nt = static_cast<int>(
      std::min<long long>(resolve_threads(threads), std::max<long long>(n, 1)));
  if (nt <= 1) {
    for (long long i = 0; i < n; ++i) body(i);
    return;
  }
  constexpr long long kChunk = 256;
  std::atomic<long long> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const long long b = cursor.fetch_add(kChunk);
        if (b >= n) return;
        const long long e = std::min(n, b + kChunk);
        for (long long i = b; i < e; ++i) body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

RngStream stream_for(const SimConfig& cfg, long long i) {
  if (cfg.antithetic)
    return RngStream::for_path(cfg.seed, static_cast<std::uint64_t>(i / 2),
                               (i % 2) == 1);
  return RngStream::for_path(cfg.seed, static_cast<std::uint64_t>(i), false);
}

// Mean and standard error by pairwise summation; antithetic pairs are
// collapsed first so the error reflects the paired variance.
Estimate make_estimate(const std::vector<double>& v, bool antithetic) {
  std::vector<double> paired;
  const std::vector<double>* s = &v;
  if (antithetic && v.size() >= 2) {
    paired.resize(v.size() / 2);
    for (std::size_t i = 0; i < paired.size(); ++i)
      paired[i] = 0.5 * (v[2 * i] + v[2 * i + 1]);
    s = &paired;
  }
  Estimate e;
  e.n = static_cast<long long>(v.size());
  if (s->empty()) return e;
  const double n = static_cast<double>(s->size());
  e.mean = pairwise_sum(*s) / n;
  if (s->size() > 1) {
    std::vector<double> sq(s->size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
      const double d = (*s)[i] - e.mean;
      sq[i] = d * d;
    }
    e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return e;
}

// int_0^L (A + B s) e^{-alpha (t0 + s)} ds, series form when alpha L is tiny.
double disc_linear(double alpha, double t0, double A, double B, double L) {
  if (L <= 0.0) return 0.0;
  if (alpha == 0.0) return A * L + 0.5 * B * L * L;
  const double al = alpha * L;
  double i1, i2;
  if (al < 1e-4) {
    i1 = L * (1.0 - 0.5 * al + al * al / 6.0 - al * al * al / 24.0);
    i2 = L * L * (0.5 - al / 3.0 + al * al / 8.0 - al * al * al / 30.0);
  } else {
    const double em = std::exp(-al);
    i1 = (1.0 - em) / alpha;
    i2 = (1.0 - (1.0 + al) * em) / (alpha * alpha);
  }
  return std::exp(-alpha * t0) * (A * i1 + B * i2);
}

// Holding cost of a linear decline z(s) = z0 - c s over [0, L], split at the
// knots of g so each piece is exactly linear in time.
void add_linear_segment(const PiecewiseLinear& g, double alpha, double t0,
                        double z0, double c, double L, double* disc,
                        double* undisc) {
  if (L <= 0.0) return;
  if (c == 0.0) {
    const double gv = g(z0);
    *disc += disc_linear(alpha, t0, gv, 0.0, L);
    *undisc += gv * L;
    return;
  }
  std::vector<double> ts;
  ts.push_back(0.0);
  const double z1 = z0 - c * L;
  for (double kx : g.knots()) {
    const double tk = (z0 - kx) / c;
    if (tk > 0.0 && tk < L) ts.push_back(tk);
  }
  ts.push_back(L);
  std::sort(ts.begin(), ts.end());
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double ta = ts[i];
    const double tb = ts[i + 1];
    if (!(tb > ta)) continue;
    const double ga = g(z0 - c * ta);
    const double gb = g(z0 - c * tb);
    const double slope = (gb - ga) / (tb - ta);
    *disc += disc_linear(alpha, t0 + ta, ga, slope, tb - ta);
    *undisc += 0.5 * (ga + gb) * (tb - ta);
  }
  (void)z1;
}

struct PhaseOutcome {
  double duration = 0.0;
  double end_value = 0.0;
  bool completed = false;
};

double sample_jump(const CompoundPoissonJumps& cp, RngStream& rng) {
  if (const auto* e = std::get_if<ExponentialJumps>(&cp.dist))
    return rng.exponential(e->b);
  return std::get<TabulatedJumpDensity>(cp.dist).quantile(rng.uniform());
}

// --- compound Poisson phases: exact event schedules --------------------

PhaseOutcome run_fill_cp(const LevyModel& m, double lambda, double z,
                         double cap, double t_abs, RngStream& rng,
                         const PiecewiseLinear* g, double alpha, double* disc,
                         double* undisc) {
  const auto& cp = std::get<CompoundPoissonJumps>(m.jumps());
  const bool reflected = m.reflected();
  const double c = m.drift();
  PhaseOutcome out;
  double t = 0.0;
  for (;;) {
    const double ej = rng.exponential(cp.rate);
    const double seg = std::min(ej, cap - t);
    if (g) {
      const double hit0 = reflected ? z / c : seg;
      const double lin = std::min(seg, hit0);
      add_linear_segment(*g, alpha, t_abs + t, z, c, lin, disc, undisc);
      if (seg > lin) { // parked on the floor until the next jump
        const double gv = (*g)(0.0);
        *disc += disc_linear(alpha, t_abs + t + lin, gv, 0.0, seg - lin);
        *undisc += gv * (seg - lin);
      }
    }
    z -= c * seg;
    if (reflected && z < 0.0) z = 0.0;
    t += seg;
    if (t >= cap) {
      out.duration = cap;
      out.end_value = z;
      return out;
    }
    z += sample_jump(cp, rng);
    if (z >= lambda) {
      out.duration = t;
      out.end_value = z;
      out.completed = true;
      return out;
    }
  }
}

PhaseOutcome run_release_cp(const LevyModel& m, const Policy& p, double z,
                            double cap, double t_abs, RngStream& rng,
                            const PiecewiseLinear* g, double alpha,
                            double* disc, double* undisc) {
  const auto& cp = std::get<CompoundPoissonJumps>(m.jumps());
  const double c = m.drift() + p.M;
  PhaseOutcome out;
  double t = 0.0;
  for (;;) {
    const double ej = rng.exponential(cp.rate);
    const double hit = (z - p.tau) / c;
    const double rem = cap - t;
    if (hit <= ej && hit <= rem) {
      if (g) add_linear_segment(*g, alpha, t_abs + t, z, c, hit, disc, undisc);
      out.duration = t + hit;
      out.end_value = p.tau;
      out.completed = true;
      return out;
    }
    if (rem <= ej) {
      if (g) add_linear_segment(*g, alpha, t_abs + t, z, c, rem, disc, undisc);
      out.duration = cap;
      out.end_value = z - c * rem;
      return out;
    }
    if (g) add_linear_segment(*g, alpha, t_abs + t, z, c, ej, disc, undisc);
    z -= c * ej;
    t += ej;
    z = std::min(z + sample_jump(cp, rng), p.V);
  }
}

// --- diffusion phases: Euler with bridge crossing and boundary shift ----

// Discrete reflection parks the path on the wrong side of the barrier by
// about 0.5826 sigma sqrt(dt) per step; shifting the barrier by that much
// cancels the leading bias.
constexpr double kBoundaryShift = 0.5826;

PhaseOutcome run_fill_diffusion(const LevyModel& m, double lambda, double z,
                                double cap, double t_abs, double dt,
                                RngStream& rng, const PiecewiseLinear* g,
                                double alpha, double* disc, double* undisc) {
  const double mu = m.mu();
  const double s2 = m.sigma2();
  const bool reflected = m.reflected();
  const double sdt = std::sqrt(s2 * dt);
  const double floor_level = reflected ? kBoundaryShift * sdt : 0.0;
  PhaseOutcome out;
  if (z >= lambda) {
    out.end_value = z;
    out.completed = true;
    return out;
  }
  double t = 0.0;
  double df = std::exp(-alpha * t_abs);
  const double sf = std::exp(-alpha * dt);
  for (;;) {
    if (t >= cap) {
      out.duration = cap;
      out.end_value = z;
      return out;
    }
    const double n = rng.normal();
    double zn = z + mu * dt + sdt * n;
    if (reflected && zn < floor_level) zn = floor_level;
    if (zn >= lambda) {
      const double frac = (lambda - z) / (zn - z);
      const double tc = dt * frac;
      if (g) {
        const double g0 = (*g)(z);
        const double g1 = (*g)(lambda);
        *undisc += 0.5 * (g0 + g1) * tc;
        *disc += 0.5 * tc * (g0 * df + g1 * df * std::exp(-alpha * tc));
      }
      out.duration = t + tc;
      out.end_value = lambda;
      out.completed = true;
      return out;
    }
    const double pb = std::exp(-2.0 * (lambda - z) * (lambda - zn) / (s2 * dt));
    if (rng.uniform() < pb) {
      const double tc = 0.5 * dt;
      if (g) {
        const double g0 = (*g)(z);
        const double g1 = (*g)(lambda);
        *undisc += 0.5 * (g0 + g1) * tc;
        *disc += 0.5 * tc * (g0 * df + g1 * df * std::exp(-alpha * tc));
      }
      out.duration = t + tc;
      out.end_value = lambda;
      out.completed = true;
      return out;
    }
    if (g) {
      const double g0 = (*g)(z);
      const double g1 = (*g)(zn);
      *undisc += 0.5 * (g0 + g1) * dt;
      *disc += 0.5 * dt * (g0 * df + g1 * df * sf);
    }
    z = zn;
    t += dt;
    df *= sf;
  }
}

PhaseOutcome run_release_diffusion(const LevyModel& m, const Policy& p,
                                   double z, double cap, double t_abs,
                                   double dt, RngStream& rng,
                                   const PiecewiseLinear* g, double alpha,
                                   double* disc, double* undisc) {
  const double mu = m.mu() - p.M;
  const double s2 = m.sigma2();
  const double sdt = std::sqrt(s2 * dt);
  const double cap_level =
      p.finite_v() ? p.V - kBoundaryShift * sdt : kInf;
  PhaseOutcome out;
  double t = 0.0;
  double df = std::exp(-alpha * t_abs);
  const double sf = std::exp(-alpha * dt);
  for (;;) {
    if (t >= cap) {
      out.duration = cap;
      out.end_value = z;
      return out;
    }
    const double n = rng.normal();
    double zn = z + mu * dt + sdt * n;
    if (zn > cap_level) zn = cap_level;
    if (zn <= p.tau) {
      const double frac = (z - p.tau) / (z - zn);
      const double tc = dt * frac;
      if (g) {
        const double g0 = (*g)(z);
        const double g1 = (*g)(p.tau);
        *undisc += 0.5 * (g0 + g1) * tc;
        *disc += 0.5 * tc * (g0 * df + g1 * df * std::exp(-alpha * tc));
      }
      out.duration = t + tc;
      out.end_value = p.tau;
      out.completed = true;
      return out;
    }
    const double pb = std::exp(-2.0 * (z - p.tau) * (zn - p.tau) / (s2 * dt));
    if (rng.uniform() < pb) {
      const double tc = 0.5 * dt;
      if (g) {
        const double g0 = (*g)(z);
        const double g1 = (*g)(p.tau);
        *undisc += 0.5 * (g0 + g1) * tc;
        *disc += 0.5 * tc * (g0 * df + g1 * df * std::exp(-alpha * tc));
      }
      out.duration = t + tc;
      out.end_value = p.tau;
      out.completed = true;
      return out;
    }
    if (g) {
      const double g0 = (*g)(z);
      const double g1 = (*g)(zn);
      *undisc += 0.5 * (g0 + g1) * dt;
      *disc += 0.5 * dt * (g0 * df + g1 * df * sf);
    }
    z = zn;
    t += dt;
    df *= sf;
  }
}

// --- subordinator-input phases: increments exact in law per step --------

double subordinator_increment(const LevyModel& m, double dt, RngStream& rng) {
  if (const auto* gj = std::get_if<GammaJumps>(&m.jumps()))
    return rng.gamma(gj->a * dt, gj->b);
  const auto& ig = std::get<InverseGaussianJumps>(m.jumps());
  return rng.inverse_gaussian(dt / ig.c, dt * dt / (ig.sigma * ig.sigma));
}

PhaseOutcome run_fill_subordinator(const LevyModel& m, double lambda, double z,
                                   double cap, double t_abs, double dt,
                                   RngStream& rng, const PiecewiseLinear* g,
                                   double alpha, double* disc, double* undisc) {
  const bool reflected = m.reflected();
  const double c = m.drift();
  PhaseOutcome out;
  double t = 0.0;
  double df = std::exp(-alpha * t_abs);
  const double sf = std::exp(-alpha * dt);
  for (;;) {
    if (t >= cap) {
      out.duration = cap;
      out.end_value = z;
      return out;
    }
    double zn = z + subordinator_increment(m, dt, rng) - c * dt;
    if (reflected && zn < 0.0) zn = 0.0;
    if (g) {
      const double g0 = (*g)(z);
      const double g1 = (*g)(std::min(zn, lambda));
      *undisc += 0.5 * (g0 + g1) * dt;
      *disc += 0.5 * dt * (g0 * df + g1 * df * sf);
    }
    t += dt;
    df *= sf;
    if (zn >= lambda) {
      out.duration = t;
      out.end_value = zn;
      out.completed = true;
      return out;
    }
    z = zn;
  }
}

PhaseOutcome run_release_subordinator(const LevyModel& m, const Policy& p,
                                      double z, double cap, double t_abs,
                                      double dt, RngStream& rng,
                                      const PiecewiseLinear* g, double alpha,
                                      double* disc, double* undisc) {
  const double c = m.drift() + p.M;
  PhaseOutcome out;
  double t = 0.0;
  double df = std::exp(-alpha * t_abs);
  const double sf = std::exp(-alpha * dt);
  for (;;) {
    if (t >= cap) {
      out.duration = cap;
      out.end_value = z;
      return out;
    }
    double zn = std::min(z + subordinator_increment(m, dt, rng) - c * dt, p.V);
    if (zn <= p.tau) {
      const double frac = (z - p.tau) / (z - zn);
      const double tc = dt * frac;
      if (g) {
        const double g0 = (*g)(z);
        const double g1 = (*g)(p.tau);
        *undisc += 0.5 * (g0 + g1) * tc;
        *disc += 0.5 * tc * (g0 * df + g1 * df * std::exp(-alpha * tc));
      }
      out.duration = t + tc;
      out.end_value = p.tau;
      out.completed = true;
      return out;
    }
    if (g) {
      const double g0 = (*g)(z);
      const double g1 = (*g)(zn);
      *undisc += 0.5 * (g0 + g1) * dt;
      *disc += 0.5 * dt * (g0 * df + g1 * df * sf);
    }
    z = zn;
    t += dt;
    df *= sf;
  }
}

// --- dispatch ------------------------------------------------------------

PhaseOutcome run_fill(const LevyModel& m, double lambda, double z, double cap,
                      double t_abs, double dt, RngStream& rng,
                      const PiecewiseLinear* g, double alpha, double* disc,
                      double* undisc) {
  if (m.is_brownian())
    return run_fill_diffusion(m, lambda, z, cap, t_abs, dt, rng, g, alpha,
                              disc, undisc);
  if (std::holds_alternative<CompoundPoissonJumps>(m.jumps()))
    return run_fill_cp(m, lambda, z, cap, t_abs, rng, g, alpha, disc, undisc);
  return run_fill_subordinator(m, lambda, z, cap, t_abs, dt, rng, g, alpha,
                               disc, undisc);
}

PhaseOutcome run_release(const LevyModel& m, const Policy& p, double z,
                         double cap, double t_abs, double dt, RngStream& rng,
                         const PiecewiseLinear* g, double alpha, double* disc,
                         double* undisc) {
  if (m.is_brownian())
    return run_release_diffusion(m, p, z, cap, t_abs, dt, rng, g, alpha, disc,
                                 undisc);
  if (std::holds_alternative<CompoundPoissonJumps>(m.jumps()))
    return run_release_cp(m, p, z, cap, t_abs, rng, g, alpha, disc, undisc);
  return run_release_subordinator(m, p, z, cap, t_abs, dt, rng, g, alpha, disc,
                                  undisc);
}

struct CycleStats {
  double duration = 0.0;
  double disc = 0.0;
  double undisc = 0.0;
  bool completed = false;
};

CycleStats run_cycle(const LevyModel& m, const Policy& p, const CostSpec& spec,
                     double dt, double cap, RngStream& rng) {
  CycleStats cs;
  double disc = p.M * spec.K2; // switch-off charge at the cycle start
  double undisc = p.M * spec.K2;
  const double alpha = spec.alpha;
  const PiecewiseLinear* g = spec.g.empty() ? nullptr : &spec.g;
  const PiecewiseLinear* gs = spec.g_star.empty() ? nullptr : &spec.g_star;

  const PhaseOutcome fill =
      run_fill(m, p.lambda, p.tau, cap, 0.0, dt, rng, g, alpha, &disc, &undisc);
  if (!fill.completed) {
    cs.duration = fill.duration;
    cs.disc = disc;
    cs.undisc = undisc;
    return cs;
  }
  const double t_hat = fill.duration;
  const double df_hat = std::exp(-alpha * t_hat);
  disc += p.M * spec.K1 * df_hat;
  undisc += p.M * spec.K1;

  double zstar = std::max(fill.end_value, p.lambda);
  if (p.finite_v()) zstar = std::min(zstar, p.V);
  const PhaseOutcome rel =
      run_release(m, p, zstar, cap, t_hat, dt, rng, gs, alpha, &disc, &undisc);
  const double t_star = t_hat + rel.duration;
  if (alpha > 0.0)
    disc -= spec.R * p.M * (df_hat - std::exp(-alpha * t_star)) / alpha;
  else
    disc -= spec.R * p.M * rel.duration;
  undisc -= spec.R * p.M * rel.duration;

  cs.duration = t_star;
  cs.disc = disc;
  cs.undisc = undisc;
  cs.completed = rel.completed;
  return cs;
}

void check_sim_config(const SimConfig& cfg) {
  require(cfg.n_paths >= 2, "simulation needs at least 2 paths");
  require(cfg.dt > 0.0, "simulation dt must be > 0");
  require(cfg.horizon_cap > 0.0, "simulation horizon_cap must be > 0");
}

} // namespace

FillSimResult simulate_fill(const LevyModel& model, double lambda, double x,
                            const std::vector<double>& alphas,
                            const SimConfig& cfg) {
  check_sim_config(cfg);
  require(x <= lambda, "simulate_fill: x must be <= lambda");
  if (model.reflected())
    require(x >= 0.0, "simulate_fill: x must be >= 0 for a reflected model");
  for (double a : alphas) require(a >= 0.0, "simulate_fill: alpha must be >= 0");

  const long long n = cfg.n_paths;
  std::vector<double> times(static_cast<std::size_t>(n));
  std::vector<char> crossed(static_cast<std::size_t>(n));
  std::vector<double> over(static_cast<std::size_t>(n));

  parallel_paths(n, cfg.threads, [&](long long i) {
    RngStream rng = stream_for(cfg, i);
    const PhaseOutcome o = run_fill(model, lambda, x, cfg.horizon_cap, 0.0,
                                    cfg.dt, rng, nullptr, 0.0, nullptr, nullptr);
    const auto k = static_cast<std::size_t>(i);
    times[k] = o.duration;
    crossed[k] = o.completed ? 1 : 0;
    over[k] = o.completed ? std::max(o.end_value - lambda, 0.0) : 0.0;
  });

  FillSimResult res;
  res.alphas = alphas;
  std::vector<double> tmp(static_cast<std::size_t>(n));
  for (double a : alphas) {
    for (std::size_t k = 0; k < tmp.size(); ++k)
      tmp[k] = crossed[k] ? std::exp(-a * times[k]) : 0.0;
    res.lt.push_back(make_estimate(tmp, cfg.antithetic));
  }
  res.mean_time = make_estimate(times, cfg.antithetic);
  for (std::size_t k = 0; k < tmp.size(); ++k) tmp[k] = crossed[k] ? 1.0 : 0.0;
  res.crossed_fraction = make_estimate(tmp, cfg.antithetic);
  long long nc = 0;
  for (std::size_t k = 0; k < crossed.size(); ++k) {
    if (crossed[k]) {
      res.overshoots.push_back(over[k]);
      ++nc;
    }
  }
  res.truncated_fraction =
      static_cast<double>(n - nc) / static_cast<double>(n);
  return res;
}

CycleSimResult simulate_cycle(const LevyModel& model, const Policy& policy,
                              const CostSpec& spec, const SimConfig& cfg) {
  check_sim_config(cfg);
  policy.validate();
  spec.validate();

  const long long n = cfg.n_paths;
  std::vector<double> dur(static_cast<std::size_t>(n));
  std::vector<double> disc(static_cast<std::size_t>(n));
  std::vector<double> undisc(static_cast<std::size_t>(n));
  std::vector<char> done(static_cast<std::size_t>(n));

  parallel_paths(n, cfg.threads, [&](long long i) {
    RngStream rng = stream_for(cfg, i);
    const CycleStats cs =
        run_cycle(model, policy, spec, cfg.dt, cfg.horizon_cap, rng);
    const auto k = static_cast<std::size_t>(i);
    dur[k] = cs.duration;
    disc[k] = cs.disc;
    undisc[k] = cs.undisc;
    done[k] = cs.completed ? 1 : 0;
  });

  CycleSimResult res;
  res.alpha = spec.alpha;
  std::vector<double> tmp(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < tmp.size(); ++k)
    tmp[k] = done[k] ? std::exp(-spec.alpha * dur[k]) : 0.0;
  res.lt_cycle = make_estimate(tmp, cfg.antithetic);
  res.mean_cycle = make_estimate(dur, cfg.antithetic);
  res.cost_discounted = make_estimate(disc, cfg.antithetic);
  res.cost_undiscounted = make_estimate(undisc, cfg.antithetic);
  long long nd = 0;
  for (char c : done) nd += c;
  res.truncated_fraction =
      static_cast<double>(n - nd) / static_cast<double>(n);
  return res;
}

LongrunSimResult simulate_longrun(const LevyModel& model, const Policy& policy,
                                  const CostSpec& spec, double horizon,
                                  const SimConfig& cfg) {
  check_sim_config(cfg);
  policy.validate();
  spec.validate();
  require(horizon > 0.0, "simulate_longrun: horizon must be > 0");

  // Cycles are keyed by a global index and consumed in index order, so the
  // cycle count depends only on (seed, horizon), not on thread scheduling.
  CostSpec flat = spec;
  flat.alpha = 0.0;
  constexpr long long kBatch = 4096;
  constexpr long long kMaxCycles = 4'000'000;

  std::vector<double> durs;
  std::vector<double> costs;
  double sum_t = 0.0;
  long long used = 0;
  long long truncated = 0;

  for (long long base = 0; sum_t < horizon; base += kBatch) {
    if (base >= kMaxCycles)
      throw NumericError("simulate_longrun: horizon needs too many cycles");
    std::vector<double> bt(kBatch), bc(kBatch);
    std::vector<char> bd(kBatch);
    parallel_paths(kBatch, cfg.threads, [&](long long j) {
      RngStream rng = stream_for(cfg, base + j);
      const CycleStats cs =
          run_cycle(model, policy, flat, cfg.dt, cfg.horizon_cap, rng);
      bt[static_cast<std::size_t>(j)] = cs.duration;
      bc[static_cast<std::size_t>(j)] = cs.undisc;
      bd[static_cast<std::size_t>(j)] = cs.completed ? 1 : 0;
    });
    for (long long j = 0; j < kBatch && sum_t < horizon; ++j) {
      const auto k = static_cast<std::size_t>(j);
      durs.push_back(bt[k]);
      costs.push_back(bc[k]);
      sum_t += bt[k];
      if (!bd[k]) ++truncated;
      ++used;
    }
  }

  if (used < 30)
    throw NumericError("simulate_longrun: fewer than 30 cycles fit the "
                       "horizon; raise the horizon");

  LongrunSimResult res;
  res.cycles = used;
  const double total_t = pairwise_sum(durs);
  const double total_c = pairwise_sum(costs);
  res.time_total = total_t;
  res.rate = total_c / total_t;
  const double t_mean = total_t / static_cast<double>(used);
  std::vector<double> dev(durs.size());
  for (std::size_t k = 0; k < dev.size(); ++k) {
    const double d = costs[k] - res.rate * durs[k];
    dev[k] = d * d;
  }
  const double sd =
      std::sqrt(pairwise_sum(dev) / static_cast<double>(used - 1));
  res.std_error = sd / (t_mean * std::sqrt(static_cast<double>(used)));
  res.truncated_fraction =
      static_cast<double>(truncated) / static_cast<double>(used);
  return res;
}

Estimate simulate_total_discounted(const LevyModel& model, const Policy& policy,
                                   const CostSpec& spec, double x,
                                   double horizon, const SimConfig& cfg) {
  check_sim_config(cfg);
  policy.validate();
  spec.validate();
  require(spec.alpha > 0.0, "simulate_total_discounted: alpha must be > 0");
  require(horizon > 0.0, "simulate_total_discounted: horizon must be > 0");
  require(x >= policy.tau, "simulate_total_discounted: x must be >= tau");
  require(!policy.finite_v() || x <= policy.V,
          "simulate_total_discounted: x must be <= V");
  if (model.reflected())
    require(x >= 0.0,
            "simulate_total_discounted: x must be >= 0 for a reflected model");

  const PiecewiseLinear* g = spec.g.empty() ? nullptr : &spec.g;
  const PiecewiseLinear* gs = spec.g_star.empty() ? nullptr : &spec.g_star;
  const long long n = cfg.n_paths;
  std::vector<double> vals(static_cast<std::size_t>(n));

  parallel_paths(n, cfg.threads, [&](long long i) {
    RngStream rng = stream_for(cfg, i);
    double t = 0.0;
    double z = x;
    double disc = 0.0;
    double scrap = 0.0; // undiscounted side, not reported here
    bool in_fill = z <= policy.lambda;
    if (!in_fill) disc += policy.M * spec.K1; // entered mid-release
    while (t < horizon) {
      if (in_fill) {
        disc += policy.M * spec.K2 * std::exp(-spec.alpha * t);
        const PhaseOutcome o = run_fill(model, policy.lambda, z, horizon - t, t,
                                        cfg.dt, rng, g, spec.alpha, &disc,
                                        &scrap);
        t += o.duration;
        if (!o.completed) break;
        disc += policy.M * spec.K1 * std::exp(-spec.alpha * t);
        z = std::max(o.end_value, policy.lambda);
        if (policy.finite_v()) z = std::min(z, policy.V);
        in_fill = false;
      } else {
        const double t0 = t;
        const PhaseOutcome o = run_release(model, policy, z, horizon - t, t,
                                           cfg.dt, rng, gs, spec.alpha, &disc,
                                           &scrap);
        t += o.duration;
        disc -= spec.R * policy.M *
                (std::exp(-spec.alpha * t0) - std::exp(-spec.alpha * t)) /
                spec.alpha;
        if (!o.completed) break;
        z = policy.tau;
        in_fill = true;
      }
    }
    vals[static_cast<std::size_t>(i)] = disc;
  });

  return make_estimate(vals, cfg.antithetic);
}

} // namespace dam
