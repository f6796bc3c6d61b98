#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salsum/color_features.hpp"
#include "salsum/error.hpp"

namespace salsum {

enum class FusionOperator { linear, min, max, exponential, logarithmic, complex, harmonic, variance };

inline constexpr FusionOperator kAllFusionOperators[] = {
    FusionOperator::linear,      FusionOperator::min,     FusionOperator::max,      FusionOperator::exponential,
    FusionOperator::logarithmic, FusionOperator::complex, FusionOperator::harmonic, FusionOperator::variance};

inline std::string to_string(FusionOperator op) {
  switch (op) {
    case FusionOperator::linear: return "linear";
    case FusionOperator::min: return "min";
    case FusionOperator::max: return "max";
    case FusionOperator::exponential: return "exponential";
    case FusionOperator::logarithmic: return "logarithmic";
    case FusionOperator::complex: return "complex";
    case FusionOperator::harmonic: return "harmonic";
    case FusionOperator::variance: return "variance";
  }
  return "variance";
}

inline FusionOperator parse_fusion_operator(std::string_view name) {
  for (FusionOperator op : kAllFusionOperators)
    if (to_string(op) == name) return op;
  throw Error(ErrorCode::ConfigError, "fusion", "unknown fusion operator '" + std::string(name) + "'");
}

struct FusionSpec {
  FusionOperator op = FusionOperator::variance;
  std::optional<std::vector<double>> weights;  // linear only
  double epsilon = 1e-8;
  bool normalize_inputs = true;
  int smooth_window = 5;
  bool smooth_before_fusion = false;

  void validate() const {
    if (!(epsilon > 0.0)) throw Error(ErrorCode::ConfigError, "fusion", "epsilon must be > 0");
    if (smooth_window < 1 || smooth_window % 2 == 0)
      throw Error(ErrorCode::EvenWindow, "fusion", "smooth_window must be odd and >= 1");
  }
};

struct FinalScore {
  ScoreSeries values;          // fused and smoothed
  std::vector<double> raw;     // fused, before post-fusion smoothing
  std::vector<std::string> components;
  FusionSpec spec;

  std::size_t size() const noexcept { return values.size(); }
};

/// Min-max scaling to [0,1]; a constant series maps to zeros.
inline ScoreSeries normalize_series(const ScoreSeries& s) {
  ScoreSeries out = s;
  if (s.values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  const double mn = *lo;
  const double range = *hi - mn;
  for (double& v : out.values) v = range > 0.0 ? (v - mn) / range : 0.0;
  return out;
}

inline double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

/// Centered moving average; the window is truncated at the series ends.
inline ScoreSeries smooth(const ScoreSeries& s, int window) {
  if (window < 1 || window % 2 == 0)
    throw Error(ErrorCode::EvenWindow, "fusion", "smoothing window " + std::to_string(window) + " must be odd");
  ScoreSeries out = s;
  const int n = static_cast<int>(s.values.size());
  const int half = window / 2;
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - half);
    const int b = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = a; j <= b; ++j) acc += s.values[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(i)] = acc / (b - a + 1);
  }
  return out;
}

namespace detail {

/// Guarded variance denominator: never below epsilon.
inline double variance_denominator(const std::vector<double>& v, double epsilon) {
  return std::max(population_variance(v), epsilon);
}

}  // namespace detail

/// Pointwise combination of already-prepared inputs, no smoothing.
inline std::vector<double> fuse_pointwise(const std::vector<ScoreSeries>& series, const FusionSpec& spec) {
  if (series.empty()) throw Error(ErrorCode::WrongArity, "fusion", "need at least one series");
  const std::size_t n = series.front().size();
  for (const auto& s : series) {
    if (s.size() != n)
      throw Error(ErrorCode::LengthMismatch, "fusion",
                  s.label + " has length " + std::to_string(s.size()) + ", expected " + std::to_string(n));
  }
  const std::size_t m = series.size();
  std::vector<double> out(n, 0.0);
  auto at = [&](std::size_t i, std::size_t t) { return series[i].values[t]; };

  switch (spec.op) {
    case FusionOperator::linear: {
      if (!spec.weights) throw Error(ErrorCode::MissingWeights, "fusion", "linear fusion requires weights");
      if (spec.weights->size() != m)
        throw Error(ErrorCode::MissingWeights, "fusion",
                    std::to_string(spec.weights->size()) + " weights for " + std::to_string(m) + " series");
      for (std::size_t t = 0; t < n; ++t)
        for (std::size_t i = 0; i < m; ++i) out[t] += (*spec.weights)[i] * at(i, t);
      break;
    }
    case FusionOperator::min:
    case FusionOperator::max: {
      for (std::size_t t = 0; t < n; ++t) {
        double v = at(0, t);
        for (std::size_t i = 1; i < m; ++i)
          v = spec.op == FusionOperator::min ? std::min(v, at(i, t)) : std::max(v, at(i, t));
        out[t] = v;
      }
      break;
    }
    case FusionOperator::exponential: {
      // w_t = d e^(1-d), d = spread of the inputs at t.
      for (std::size_t t = 0; t < n; ++t) {
        double hi = at(0, t), lo = at(0, t), sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          hi = std::max(hi, at(i, t));
          lo = std::min(lo, at(i, t));
          sum += at(i, t);
        }
        const double d = hi - lo;
        const double w = d * std::exp(1.0 - d);
        out[t] = (1.0 - w) * sum;
      }
      break;
    }
    case FusionOperator::logarithmic: {
      // min_i(S_i - w_i) + max_i(w_i), w_i = log(1 / var(S_i)).
      std::vector<double> w(m);
      for (std::size_t i = 0; i < m; ++i)
        w[i] = std::log(1.0 / detail::variance_denominator(series[i].values, spec.epsilon));
      const double w_max = *std::max_element(w.begin(), w.end());
      for (std::size_t t = 0; t < n; ++t) {
        double v = at(0, t) - w[0];
        for (std::size_t i = 1; i < m; ++i) v = std::min(v, at(i, t) - w[i]);
        out[t] = v + w_max;
      }
      break;
    }
    case FusionOperator::complex: {
      if (m != 2)
        throw Error(ErrorCode::WrongArity, "fusion", "complex fusion takes exactly 2 series, got " + std::to_string(m));
      for (std::size_t t = 0; t < n; ++t) out[t] = std::hypot(at(0, t), at(1, t));
      break;
    }
    case FusionOperator::harmonic: {
      for (std::size_t t = 0; t < n; ++t) {
        double prod = 1.0, sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          prod *= at(i, t);
          sum += at(i, t);
        }
        out[t] = sum != 0.0 ? 2.0 * prod / sum : 0.0;
      }
      break;
    }
    case FusionOperator::variance: {
      for (std::size_t i = 0; i < m; ++i) {
        const double scale = 1.0 / detail::variance_denominator(series[i].values, spec.epsilon);
        for (std::size_t t = 0; t < n; ++t) out[t] += at(i, t) * scale;
      }
      break;
    }
  }
  for (double v : out) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidField, "fusion", "non-finite fused value");
  }
  return out;
}

inline FinalScore fuse(const std::vector<ScoreSeries>& series, const FusionSpec& spec) {
  spec.validate();
  if (series.empty()) throw Error(ErrorCode::WrongArity, "fusion", "need at least one series");
  std::vector<ScoreSeries> prepared;
  prepared.reserve(series.size());
  for (const auto& s : series) {
    ScoreSeries p = spec.normalize_inputs ? normalize_series(s) : s;
    if (spec.smooth_before_fusion) p = smooth(p, spec.smooth_window);
    prepared.push_back(std::move(p));
  }
  FinalScore out;
  out.spec = spec;
  for (const auto& s : series) out.components.push_back(s.label);
  out.raw = fuse_pointwise(prepared, spec);
  out.values.values = out.raw;
  out.values.pair_indices = series.front().pair_indices;
  out.values.label = "final_" + to_string(spec.op);
  if (!spec.smooth_before_fusion) out.values = smooth(out.values, spec.smooth_window);
  return out;
}

}  // namespace salsum
