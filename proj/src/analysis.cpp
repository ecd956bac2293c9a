#include "pbill/analysis.hpp"

#include <algorithm>
#include <thread>

namespace pbill {

namespace {

constexpr double kZ99 = 2.5758293035489004;
constexpr std::size_t kBatches = 10;

void push_element(CurvatureState& cs, double a) {
  if (cs.keep_elements) cs.cf_elements.push_back(a);
  const double p_next = a * cs.p_cur + cs.p_prev;
  const double q_next = a * cs.q_cur + cs.q_prev;
  cs.p_prev = cs.p_cur / q_next;
  cs.q_prev = cs.q_cur / q_next;
  cs.p_cur = p_next / q_next;
  cs.q_cur = 1.0;
  const double previous = cs.cf_truncation;
  cs.cf_truncation = cs.p_cur;
  ++cs.cf_depth;
  if (cs.cf_converged_depth == 0 && cs.cf_depth >= 2 &&
      std::abs(cs.cf_truncation - previous) < kCfConvergedTol) {
    cs.cf_converged_depth = cs.cf_depth;
  }
}

bool is_excluded(const TrajectoryRecord& rec) {
  return rec.termination == Termination::VertexHit ||
         rec.termination == Termination::GrazingOverflow || rec.grazing_hits > 0;
}

}  // namespace

CurvatureState propagate_curvature(CurvatureState cs, const CollisionEvent& ev) {
  if (ev.grazing) throw Error(ErrorCode::GrazingExcluded, "grazing event in curvature propagation");
  if (!(ev.tau > 0.0)) throw std::invalid_argument("propagate_curvature: tau must be positive");

  const double widen = 1.0 + ev.tau * cs.B;
  cs.log_expansion += std::log(widen);
  cs.B /= widen;
  cs.pending_flight += ev.tau;

  if (ev.kappa > 0.0) {
    const double arc_term = 2.0 * ev.kappa / std::cos(ev.phi);
    cs.B += arc_term;
    cs.ss_partial_sum += cs.pending_flight + arc_term;
    push_element(cs, cs.pending_flight);
    push_element(cs, arc_term);
    cs.pending_flight = 0.0;
  }
  return cs;
}

double continued_fraction_value(std::span<const double> elements, std::size_t n) {
  if (n < 1 || n > elements.size()) {
    throw std::invalid_argument("continued_fraction_value: depth out of range");
  }
  double tail = 0.0;
  for (std::size_t i = n; i-- > 0;) tail = 1.0 / (elements[i] + tail);
  return tail;
}

SeidelSternResult seidel_stern_check(const TrajectoryRecord& rec) {
  SeidelSternResult out;
  double pending = 0.0;
  double sum = 0.0;
  double radius = rec.radius;
  for (const auto& ev : rec.events) {
    pending += ev.tau;
    if (ev.kappa > 0.0 && !ev.grazing) {
      radius = 1.0 / ev.kappa;
      sum += pending + 2.0 * ev.kappa / std::cos(ev.phi);
      out.partial_sums.push_back(sum);
      pending = 0.0;
    }
  }
  if (out.partial_sums.empty()) throw Error(ErrorCode::NoArcHits, "trajectory never hits an arc");
  out.threshold = 1e3 * (2.0 / radius);
  out.diverges_numerically = out.partial_sums.back() > out.threshold;
  return out;
}

LyapunovEstimate lyapunov_estimate(const TrajectoryRecord& rec) {
  if (is_excluded(rec) || rec.events.empty()) {
    throw Error(ErrorCode::ExcludedTrajectory,
                std::string("trajectory excluded (") + to_string(rec.termination) + ")");
  }
  CurvatureState cs;
  cs.keep_elements = false;

  const std::size_t n = rec.events.size();
  const std::size_t batches = std::min(kBatches, n);
  std::vector<double> rates;
  rates.reserve(batches);
  std::size_t next_cut = n / batches;
  double batch_log = 0.0;
  double batch_t0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double before = cs.log_expansion;
    cs = propagate_curvature(std::move(cs), rec.events[i]);
    batch_log += cs.log_expansion - before;
    if (i + 1 == next_cut) {
      const double dt = rec.events[i].t - batch_t0;
      rates.push_back(batch_log / dt);
      batch_log = 0.0;
      batch_t0 = rec.events[i].t;
      next_cut = rates.size() + 1 == batches ? n : next_cut + n / batches;
    }
  }

  LyapunovEstimate est;
  est.total_time = rec.total_time();
  est.log_expansion = cs.log_expansion;
  est.lambda = cs.log_expansion / est.total_time;
  if (rates.size() > 1) {
    double mean = 0.0;
    for (const double r : rates) mean += r;
    mean /= static_cast<double>(rates.size());
    double var = 0.0;
    for (const double r : rates) var += (r - mean) * (r - mean);
    var /= static_cast<double>(rates.size() - 1);
    est.batch_stderr = std::sqrt(var / static_cast<double>(rates.size()));
  }
  return est;
}

const char* to_string(SamplingMode m) {
  return m == SamplingMode::FullMeasure ? "full_measure" : "arc_start";
}

TrajectorySummary summarize(const TrajectoryRecord& rec) {
  TrajectorySummary s;
  s.termination = rec.termination;
  s.bounces = rec.events.size();
  s.arc_hits = rec.arc_hits;
  s.total_time = rec.total_time();
  for (const auto& ev : rec.events) {
    if (ev.kappa > 0.0) {
      s.first_arc_hit = ev.index;
      break;
    }
  }
  s.excluded_vertex = rec.termination == Termination::VertexHit;
  s.excluded_grazing = !s.excluded_vertex && is_excluded(rec);
  if (!s.included() || rec.events.empty()) return s;

  const auto est = lyapunov_estimate(rec);
  s.lambda = est.lambda;
  s.log_expansion = est.log_expansion;
  if (rec.arc_hits > 0) {
    const auto ss = seidel_stern_check(rec);
    s.ss_final = ss.partial_sums.back();
    s.ss_groups = ss.partial_sums.size();
    s.ss_min_increment = ss.partial_sums.front();
    for (std::size_t k = 1; k < ss.partial_sums.size(); ++k) {
      const double inc = ss.partial_sums[k] - ss.partial_sums[k - 1];
      s.ss_min_increment = std::min(s.ss_min_increment, inc);
      s.ss_monotone = s.ss_monotone && inc >= 0.0;
    }
  }
  return s;
}

HyperbolicityReport ensemble_report(const EquivalentTable& t, const EnsembleConfig& cfg,
                                    const TrajectorySink& sink) {
  if (cfg.n_trajectories < 1) throw std::invalid_argument("ensemble_report: n must be >= 1");
  const TrajectoryLimits limits{cfg.max_bounces, cfg.max_time};
  const unsigned workers =
      std::max(1u, cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads);

  const auto run_one = [&](std::size_t index) {
    const PhaseState s0 = cfg.mode == SamplingMode::ArcStart
                              ? sample_on_arcs(t, cfg.seed, index)
                              : sample_initial(t, cfg.seed, index);
    return simulate(t, s0, limits);
  };

  HyperbolicityReport report;
  report.n_total = cfg.n_trajectories;
  report.trajectories.reserve(cfg.n_trajectories);

  // Chunked so records can be streamed to the sink in order without keeping
  // the whole ensemble in memory.
  const std::size_t chunk = 16 * static_cast<std::size_t>(workers);
  std::vector<TrajectoryRecord> records;
  std::vector<TrajectorySummary> summaries;
  for (std::size_t begin = 0; begin < cfg.n_trajectories; begin += chunk) {
    const std::size_t end = std::min(cfg.n_trajectories, begin + chunk);
    records.assign(end - begin, {});
    summaries.assign(end - begin, {});
    const auto work = [&](unsigned w) {
      for (std::size_t i = begin + w; i < end; i += workers) {
        records[i - begin] = run_one(i);
        summaries[i - begin] = summarize(records[i - begin]);
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (std::size_t i = begin; i < end; ++i) {
      if (sink) sink(i, records[i - begin]);
      report.trajectories.push_back(summaries[i - begin]);
    }
  }

  // Reduction in index order.
  std::size_t with_arc = 0;
  double first_hit_sum = 0.0;
  double lambda_sum = 0.0;
  double positive_sum = 0.0;
  std::size_t positive = 0;
  std::size_t revisits = 0;
  double ss_rate_sum = 0.0;
  std::size_t ss_count = 0;
  for (const auto& s : report.trajectories) {
    if (s.arc_hits > 0) {
      ++with_arc;
      first_hit_sum += static_cast<double>(s.first_arc_hit);
    }
    if (s.excluded_vertex) ++report.n_excluded_vertex;
    if (s.excluded_grazing) ++report.n_excluded_grazing;
    if (!s.included()) continue;
    ++report.n_included;
    lambda_sum += s.lambda;
    positive_sum += std::max(s.lambda, 0.0);
    if (s.lambda > 0.0) ++positive;
    if (s.first_arc_hit > 0 && s.first_arc_hit <= cfg.revisit_window) ++revisits;
    if (s.ss_groups > 0) {
      ss_rate_sum += s.ss_final / static_cast<double>(s.ss_groups);
      ++ss_count;
    }
  }

  const double n_all = static_cast<double>(report.n_total);
  report.arc_hit_fraction = static_cast<double>(with_arc) / n_all;
  report.first_arc_hit_mean = with_arc > 0 ? first_hit_sum / static_cast<double>(with_arc) : 0.0;
  report.ss_growth_rate = ss_count > 0 ? ss_rate_sum / static_cast<double>(ss_count) : 0.0;
  if (report.n_included > 0) {
    const double m = static_cast<double>(report.n_included);
    report.lambda_mean = lambda_sum / m;
    report.entropy_hat = positive_sum / m;
    report.positive_lambda_fraction = static_cast<double>(positive) / m;
    report.arc_revisit_fraction = static_cast<double>(revisits) / m;
    if (report.n_included > 1) {
      double var = 0.0;
      for (const auto& s : report.trajectories) {
        if (s.included()) var += (s.lambda - report.lambda_mean) * (s.lambda - report.lambda_mean);
      }
      var /= m - 1.0;
      report.lambda_stderr = std::sqrt(var / m);
    }
  }
  report.lambda_ci99_low = report.lambda_mean - kZ99 * report.lambda_stderr;
  report.lambda_ci99_high = report.lambda_mean + kZ99 * report.lambda_stderr;
  return report;
}

HyperbolicityReport ensemble_report(const EquivalentTable& t, std::size_t n,
                                    std::size_t max_bounces, std::uint64_t seed,
                                    SamplingMode mode) {
  EnsembleConfig cfg;
  cfg.n_trajectories = n;
  cfg.max_bounces = max_bounces;
  cfg.seed = seed;
  cfg.mode = mode;
  return ensemble_report(t, cfg, {});
}

}  // namespace pbill
