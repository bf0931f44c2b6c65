#include "hra/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "hra/errors.hpp"

namespace hra {

double rhae_level(int H, int A) {
  if (H < 1 || A < 1) throw ValidationError("H and A must be >= 1");
  const double r = std::min(static_cast<double>(H) / A, kRatioCap);
  return r * r;
}

void LevelResult::validate() const {
  if (H < 1) throw ValidationError("level '" + game + "': H must be >= 1");
  if (A && *A < 1) throw ValidationError("level '" + game + "': A must be >= 1");
  if (solved && !A) throw ValidationError("level '" + game + "': solved level needs an action count");
}

double LevelResult::score() const { return solved && !crash_win ? rhae_level(H, *A) : 0.0; }

double rhae_aggregate(const std::vector<LevelResult>& levels) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& l : levels) {
    l.validate();
    if (l.crash_win) continue;
    total += l.score();
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("RHAE is undefined: no levels remain after crash-win exclusion");
  return total / static_cast<double>(n);
}

LevelResult level_result(const EpisodeTrace& trace, int H) {
  LevelResult l;
  l.game = trace.env_id;
  l.H = H;
  l.crash_win = trace.outcome == Outcome::crash_win;
  l.solved = trace.outcome == Outcome::solved;
  if ((l.solved || l.crash_win) && trace.action_count > 0) l.A = trace.action_count;
  return l;
}

FrontierPoint speed_depth(const std::vector<EpisodeSummary>& episodes, int cap, DepthMode mode, std::string policy) {
  if (episodes.empty()) throw ValidationError("speed_depth needs at least one episode");
  if (cap < 1) throw ValidationError("cap must be positive");
  double inv = 0.0, actions = 0.0, depth = 0.0;
  for (const auto& e : episodes) {
    const int A = e.terminated && e.actions > 0 ? e.actions : cap;
    inv += 1.0 / A;
    actions += A;
    if (mode == DepthMode::per_episode) {
      depth += e.entropy_drop;
    } else if (e.explore_actions > 0) {
      depth += e.entropy_drop / e.explore_actions;
    }
  }
  const double n = static_cast<double>(episodes.size());
  FrontierPoint p;
  p.policy = std::move(policy);
  p.per_episode = mode == DepthMode::per_episode;
  p.speed = mode == DepthMode::per_episode ? n / actions : inv / n;
  p.depth = std::max(0.0, depth / n);
  return p;
}

FrontierPoint speed_depth(const std::vector<EpisodeTrace>& traces, int cap, DepthMode mode, std::string policy) {
  std::vector<EpisodeSummary> eps;
  eps.reserve(traces.size());
  for (const auto& t : traces) {
    eps.push_back(EpisodeSummary{t.action_count, t.terminated, t.explore_actions(), t.explore_entropy_drop()});
  }
  return speed_depth(eps, cap, mode, std::move(policy));
}

bool dominates(const FrontierPoint& a, const FrontierPoint& b) {
  return a.speed >= b.speed && a.depth >= b.depth && (a.speed > b.speed || a.depth > b.depth);
}

std::vector<FrontierPoint> pareto_frontier(const std::vector<FrontierPoint>& points) {
  std::vector<FrontierPoint> out;
  for (const auto& p : points) {
    const bool dominated = std::any_of(points.begin(), points.end(), [&](const FrontierPoint& q) { return dominates(q, p); });
    if (!dominated) out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.speed > b.speed; });
  return out;
}

ConvexityCertificate convexity_certificate(const Eigen::ArrayXd& D, const Eigen::ArrayXd& S) {
  const Eigen::Index n = D.size();
  if (n < 3 || S.size() != n) throw ValidationError("need at least 3 paired samples");
  const double h = D(1) - D(0);
  if (!(h > 0)) throw ValidationError("D must be strictly increasing");
  for (Eigen::Index i = 1; i < n; ++i) {
    const double step = D(i) - D(i - 1);
    if (!(step > 0)) throw ValidationError("D must be strictly increasing");
    if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h))) throw ValidationError("D must be uniformly spaced");
  }
  const Eigen::ArrayXd second = S.segment(2, n - 2) - 2.0 * S.segment(1, n - 2) + S.segment(0, n - 2);
  ConvexityCertificate c;
  c.min_second_difference = second.minCoeff();
  c.convex = c.min_second_difference > 0.0;
  return c;
}

TaylorCheck taylor_loss_check(const EstarCurve<double>& curve, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.01)) throw ValidationError("epsilon must lie in [0, 0.01]");
  const double a_star = curve.optimal_actions();
  const double ratio = a_star / curve.A_of_p(1.0 - epsilon);
  TaylorCheck t;
  t.exact_loss = 1.0 - ratio * ratio;
  t.approx_loss = 2.0 * curve.c1 * (epsilon * std::numbers::ln2) / a_star;
  t.relative_error = t.approx_loss > 0.0 ? std::abs(t.exact_loss - t.approx_loss) / t.approx_loss : 0.0;
  return t;
}

namespace {

// Smallest x with P(X <= x) >= q for X ~ Binomial(n, p).
int binomial_quantile(int n, double p, double q) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  double cdf = 0.0;
  for (int x = 0; x <= n; ++x) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) + x * std::log(p) +
                           (n - x) * std::log1p(-p);
    cdf += std::exp(log_pmf);
    if (cdf >= q - 1e-12) return x;
  }
  return n;
}

}  // namespace

Projection binomial_projection(int n_public, int solves, int n_private, double per_solve_score) {
  if (n_public < 1 || solves < 0 || solves > n_public) throw ValidationError("need 0 <= solves <= n_public, n_public >= 1");
  if (n_private < 1) throw ValidationError("n_private must be >= 1");
  if (!(per_solve_score > 0.0 && per_solve_score <= kScoreCap + 1e-12)) {
    throw ValidationError("per-solve score must lie in (0, 1.3225]");
  }
  const double p = static_cast<double>(solves) / n_public;
  const double scale = per_solve_score / n_private;
  Projection r;
  r.expected = p * per_solve_score;
  r.ci95 = {binomial_quantile(n_private, p, 0.025) * scale, binomial_quantile(n_private, p, 0.975) * scale};
  return r;
}

double t_critical(int df) {
  static constexpr std::array<double, 29> table{12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060,
                                                2.2622,  2.2281, 2.2010, 2.1788, 2.1604, 2.1448, 2.1314, 2.1199,
                                                2.1098,  2.1009, 2.0930, 2.0860, 2.0796, 2.0739, 2.0687, 2.0639,
                                                2.0595,  2.0555, 2.0518, 2.0484, 2.0452};
  if (df < 1) throw ValidationError("degrees of freedom must be >= 1");
  if (df <= static_cast<int>(table.size())) return table[static_cast<std::size_t>(df - 1)];
  return 1.959964;
}

RunStatistics multi_run_ci(const std::vector<double>& values) {
  if (values.size() < 2) throw ValidationError("multi_run_ci needs at least 2 values");
  const auto v = Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  const double n = static_cast<double>(v.size());
  RunStatistics s;
  s.mean = v.mean();
  s.std = std::sqrt((v - s.mean).square().sum() / (n - 1.0));
  s.t_critical = t_critical(static_cast<int>(v.size()) - 1);
  const double half = s.t_critical * s.std / std::sqrt(n);
  s.ci95 = {s.mean - half, s.mean + half};
  return s;
}

}  // namespace hra
