#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pbill/dynamics.hpp"

namespace pbill {

/// Hyperbolicity ledger of one trajectory.
///
/// B is the curvature of an infinitesimal wavefront riding along the orbit
/// (positive means divergent). Free flight maps B to B/(1 + tau B) and widens
/// the front by (1 + tau B); a reflection adds 2 kappa / cos(phi). The
/// continued-fraction elements are the grouped flight times between arc hits
/// and the arc terms 2/(r cos phi); walls contribute nothing but flight time.
struct CurvatureState {
  double B = 0.0;
  double log_expansion = 0.0;
  std::vector<double> cf_elements;
  double cf_truncation = 0.0;
  double ss_partial_sum = 0.0;

  /// Flight time accumulated since the last arc hit.
  double pending_flight = 0.0;
  /// Depth at which successive truncations first differed by < 1e-10 (0: not yet).
  std::size_t cf_converged_depth = 0;
  /// Set false to skip storing elements on long runs.
  bool keep_elements = true;

  // Convergent recurrence, rescaled so q_cur == 1.
  double p_prev = 1.0, q_prev = 0.0, p_cur = 0.0, q_cur = 1.0;
  std::size_t cf_depth = 0;
};

inline constexpr double kCfConvergedTol = 1e-10;

/// Applies the flight and reflection of `ev`. Throws GrazingExcluded for
/// grazing events; the caller is expected to drop such trajectories.
CurvatureState propagate_curvature(CurvatureState cs, const CollisionEvent& ev);

/// Depth-n truncation of 1/(a1 + 1/(a2 + ...)), by backward recurrence.
double continued_fraction_value(std::span<const double> elements, std::size_t n);

struct SeidelSternResult {
  std::vector<double> partial_sums;
  bool diverges_numerically = false;
  double threshold = 0.0;
};

/// Partial sums of the grouped element series, one per arc hit.
/// The divergence threshold is 1e3 * (2/r).
SeidelSternResult seidel_stern_check(const TrajectoryRecord& rec);

struct LyapunovEstimate {
  double lambda = 0.0;
  double total_time = 0.0;
  double log_expansion = 0.0;
  /// Standard error of the mean of per-batch rates (10 equal bounce batches).
  double batch_stderr = 0.0;
};

/// Time-averaged log expansion rate, starting from a plane front (B = 0).
/// Throws ExcludedTrajectory for vertex hits, grazing flags or empty records.
LyapunovEstimate lyapunov_estimate(const TrajectoryRecord& rec);

enum class SamplingMode { FullMeasure, ArcStart };
const char* to_string(SamplingMode m);

struct TrajectorySummary {
  Termination termination = Termination::BounceLimit;
  std::size_t bounces = 0;
  std::size_t arc_hits = 0;
  std::size_t first_arc_hit = 0;  // 1-based bounce index, 0 when never
  bool excluded_grazing = false;
  bool excluded_vertex = false;
  double lambda = 0.0;
  double log_expansion = 0.0;
  double total_time = 0.0;
  double ss_final = 0.0;
  std::size_t ss_groups = 0;
  bool ss_monotone = true;
  double ss_min_increment = 0.0;

  bool included() const { return !excluded_grazing && !excluded_vertex; }
};

TrajectorySummary summarize(const TrajectoryRecord& rec);

struct HyperbolicityReport {
  double lambda_mean = 0.0;
  double lambda_stderr = 0.0;
  double lambda_ci99_low = 0.0;
  double lambda_ci99_high = 0.0;
  double arc_hit_fraction = 0.0;
  double first_arc_hit_mean = 0.0;
  double ss_growth_rate = 0.0;
  double entropy_hat = 0.0;
  double positive_lambda_fraction = 0.0;
  double arc_revisit_fraction = 0.0;
  std::size_t n_total = 0;
  std::size_t n_included = 0;
  std::size_t n_excluded_grazing = 0;
  std::size_t n_excluded_vertex = 0;
  std::vector<TrajectorySummary> trajectories;
};

struct EnsembleConfig {
  std::size_t n_trajectories = 1000;
  std::size_t max_bounces = 10000;
  double max_time = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;
  SamplingMode mode = SamplingMode::FullMeasure;
  /// Bounce window for arc_revisit_fraction.
  std::size_t revisit_window = 1000;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

/// Receives every trajectory in index order, from the calling thread.
using TrajectorySink = std::function<void(std::size_t index, const TrajectoryRecord&)>;

HyperbolicityReport ensemble_report(const EquivalentTable& t, const EnsembleConfig& cfg,
                                    const TrajectorySink& sink = {});

/// Convenience overload matching the positional parameter order.
HyperbolicityReport ensemble_report(const EquivalentTable& t, std::size_t n,
                                    std::size_t max_bounces, std::uint64_t seed,
                                    SamplingMode mode);

}  // namespace pbill
