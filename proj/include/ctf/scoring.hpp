#pragma once

// Forecast and reconstruction metrics, the 0-100 score scale, and the
// mapping of the nine submitted matrices onto the twelve scores.
//
// Scale: 100 is an exact match; a prediction of all zeros scores exactly 0;
// negative values mean worse than predicting zeros.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctf/array.hpp"
#include "ctf/error.hpp"
#include "ctf/fft.hpp"
#include "ctf/npy.hpp"
#include "ctf/tasks.hpp"

namespace ctf {

/// Axis along which the log power spectrum is taken. Space suits fields on
/// a grid; Time suits low-dimensional ODE states.
enum class SpectralAxis { Space, Time };

inline constexpr std::string_view kScoringVersion = "ctf-scoring/1";
inline constexpr std::string_view kProfileVersion = "ctf-profile/1";

struct ScoringConfig {
  std::size_t k_short = 1;
  std::size_t k_long = 1;
  std::size_t k_m = 100;
  double epsilon = 1e-12;
  SpectralAxis spectral_axis = SpectralAxis::Space;

  /// Default windows for test matrices with `m_test` columns: the first 10%
  /// for short-time scores and the last 50% for spectra.
  static ScoringConfig for_test_length(std::size_t m_test, SpectralAxis axis, std::size_t k_m = 100) {
    ScoringConfig c;
    c.k_short = std::max<std::size_t>(1, (m_test + 9) / 10);
    c.k_long = std::max<std::size_t>(1, (m_test + 1) / 2);
    c.k_m = k_m;
    c.spectral_axis = axis;
    return c;
  }

  void validate() const {
    if (k_short < 1 || k_long < 1 || k_m < 1 || !(epsilon > 0)) {
      throw Error(Errc::ConfigInvalid, "scoring config needs k_short, k_long, k_m >= 1 and epsilon > 0");
    }
  }
};

inline nlohmann::json to_json(const ScoringConfig& c) {
  return {{"version", kScoringVersion},
          {"k_short", c.k_short},
          {"k_long", c.k_long},
          {"k_m", c.k_m},
          {"epsilon", c.epsilon},
          {"spectral_axis", c.spectral_axis == SpectralAxis::Space ? "space" : "time"}};
}

inline ScoringConfig scoring_config_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<std::string>() != kScoringVersion) {
      throw Error(Errc::SchemaMismatch, "scoring.json version " + j.at("version").dump());
    }
    ScoringConfig c;
    c.k_short = j.at("k_short").get<std::size_t>();
    c.k_long = j.at("k_long").get<std::size_t>();
    c.k_m = j.at("k_m").get<std::size_t>();
    c.epsilon = j.at("epsilon").get<double>();
    const auto axis = j.at("spectral_axis").get<std::string>();
    if (axis != "space" && axis != "time") throw Error(Errc::SchemaMismatch, "spectral_axis " + axis);
    c.spectral_axis = axis == "space" ? SpectralAxis::Space : SpectralAxis::Time;
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaMismatch, std::string("scoring.json: ") + e.what());
  }
}

namespace detail {

inline void check_same_shape(const ArrayF64& truth, const ArrayF64& pred) {
  if (truth.rows() != pred.rows() || truth.cols() != pred.cols()) {
    throw Error(Errc::ShapeMismatch, "truth " + to_string(shape_of(truth)) + " vs prediction " +
                                         to_string(shape_of(pred)));
  }
}

inline void check_window(const ArrayF64& m, ColumnRange w) {
  if (w.begin >= w.end || w.end > m.cols()) {
    throw Error(Errc::WindowTooSmall, "column window [" + std::to_string(w.begin) + ", " + std::to_string(w.end) +
                                          ") invalid for " + std::to_string(m.cols()) + " columns");
  }
}

inline double frobenius_ratio(const ArrayF64& truth, const ArrayF64& pred) {
  double num = 0, den = 0;
  auto t = truth.values(), p = pred.values();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = t[i] - p[i];
    num += d * d;
    den += t[i] * t[i];
  }
  if (den == 0.0) throw Error(Errc::DegenerateTruth, "reference is identically zero over the window");
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace detail

/// ||truth - pred||_F / ||truth||_F over the columns in `window`.
inline double relative_frobenius_error(const ArrayF64& truth, const ArrayF64& pred, ColumnRange window) {
  detail::check_same_shape(truth, pred);
  detail::check_window(truth, window);
  double num = 0, den = 0;
  for (std::size_t r = 0; r < truth.rows(); ++r) {
    for (std::size_t c = window.begin; c < window.end; ++c) {
      const double d = truth(r, c) - pred(r, c);
      num += d * d;
      den += truth(r, c) * truth(r, c);
    }
  }
  if (den == 0.0) throw Error(Errc::DegenerateTruth, "truth is identically zero over the window");
  return std::sqrt(num) / std::sqrt(den);
}

/// ln(|DFT|^2 + epsilon), zero frequency centered, restricted to the central
/// 2*k+1 bins.
///
/// Space: one transform per column of the window along the state dimension;
/// the result is (2*k_m + 1) x window columns and needs rows >= 2*k_m + 1.
/// Time: one transform per state row along the window; the half-width is
/// reduced to min(k_m, window/2 - 1) and the result is (2*k + 1) x rows.
inline ArrayF64 log_power_spectrum(const ArrayF64& m, ColumnRange window, const ScoringConfig& cfg) {
  detail::check_window(m, window);
  const double eps = cfg.epsilon;

  auto fill = [eps](RealFft& fft, std::span<const double> series, std::size_t half_width, ArrayF64& out,
                    std::size_t out_col, std::vector<std::complex<double>>& spec) {
    fft.forward(series, spec);
    const auto n = static_cast<long>(fft.size());
    const auto k = static_cast<long>(half_width);
    for (long f = -k; f <= k; ++f) {
      const long idx = ((f % n) + n) % n;
      // Real input: bin n - j is the conjugate of bin j.
      const auto& z = idx <= n / 2 ? spec[static_cast<std::size_t>(idx)] : spec[static_cast<std::size_t>(n - idx)];
      out(static_cast<std::size_t>(f + k), out_col) = std::log(std::norm(z) + eps);
    }
  };

  if (cfg.spectral_axis == SpectralAxis::Space) {
    const std::size_t n = m.rows();
    if (n < 2 * cfg.k_m + 1) {
      throw Error(Errc::WindowTooSmall, std::to_string(n) + " rows cannot hold " +
                                            std::to_string(2 * cfg.k_m + 1) + " centered wavenumbers");
    }
    RealFft fft(n);
    std::vector<std::complex<double>> spec(fft.spectrum_size());
    std::vector<double> column(n);
    ArrayF64 out(2 * cfg.k_m + 1, window.size());
    for (std::size_t c = window.begin; c < window.end; ++c) {
      for (std::size_t r = 0; r < n; ++r) column[r] = m(r, c);
      fill(fft, column, cfg.k_m, out, c - window.begin, spec);
    }
    return out;
  }

  const std::size_t len = window.size();
  if (len < 4) {
    throw Error(Errc::WindowTooSmall, "time window of " + std::to_string(len) + " samples is too short");
  }
  const std::size_t k = std::min(cfg.k_m, len / 2 - 1);
  RealFft fft(len);
  std::vector<std::complex<double>> spec(fft.spectrum_size());
  ArrayF64 out(2 * k + 1, m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto series = m.row(r).subspan(window.begin, len);
    fill(fft, series, k, out, r, spec);
  }
  return out;
}

/// 100 (1 - E) for the relative error over the first k_short columns.
inline double short_time_score(const ArrayF64& truth, const ArrayF64& pred, const ScoringConfig& cfg) {
  detail::check_same_shape(truth, pred);
  if (cfg.k_short > truth.cols()) {
    throw Error(Errc::WindowTooSmall, "k_short exceeds the test length");
  }
  return 100.0 * (1.0 - relative_frobenius_error(truth, pred, {0, cfg.k_short}));
}

/// 100 (1 - E) for the relative error over every column.
inline double full_window_score(const ArrayF64& truth, const ArrayF64& pred) {
  detail::check_same_shape(truth, pred);
  return 100.0 * (1.0 - relative_frobenius_error(truth, pred, ColumnRange::all(truth)));
}

/// 100 (1 - E) where E compares log power spectra over the last k_long
/// columns. A prediction that is all zeros over that window gets the zero
/// spectrum, so it scores exactly 0.
inline double long_time_score(const ArrayF64& truth, const ArrayF64& pred, const ScoringConfig& cfg) {
  detail::check_same_shape(truth, pred);
  if (cfg.k_long > truth.cols()) {
    throw Error(Errc::WindowTooSmall, "k_long exceeds the test length");
  }
  const ColumnRange window{truth.cols() - cfg.k_long, truth.cols()};
  const ArrayF64 p_truth = log_power_spectrum(truth, window, cfg);

  bool pred_zero = true;
  for (std::size_t r = 0; r < pred.rows() && pred_zero; ++r) {
    for (std::size_t c = window.begin; c < window.end; ++c) {
      if (pred(r, c) != 0.0) {
        pred_zero = false;
        break;
      }
    }
  }
  const ArrayF64 p_pred =
      pred_zero ? ArrayF64(p_truth.rows(), p_truth.cols(), 0.0) : log_power_spectrum(pred, window, cfg);
  return 100.0 * (1.0 - detail::frobenius_ratio(p_truth, p_pred));
}

// ---------------------------------------------------------------------------

inline constexpr std::size_t kScoreCount = 12;

struct ScoreProfile {
  std::array<double, kScoreCount> e{};
  double composite = 0.0;

  static ScoreProfile from_scores(const std::array<double, kScoreCount>& e) {
    ScoreProfile p;
    p.e = e;
    double sum = 0;
    for (double v : e) sum += v;
    p.composite = sum / static_cast<double>(kScoreCount);
    return p;
  }

  friend bool operator==(const ScoreProfile&, const ScoreProfile&) = default;
};

inline std::string axis_label(std::size_t i) { return "E" + std::to_string(i + 1); }

inline nlohmann::json to_json(const ScoreProfile& p) {
  return {{"version", kProfileVersion}, {"scores", p.e}, {"composite", p.composite}};
}

inline ScoreProfile profile_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<std::string>() != kProfileVersion) {
      throw Error(Errc::SchemaMismatch, "profile version " + j.at("version").dump());
    }
    const auto& s = j.at("scores");
    if (!s.is_array() || s.size() != kScoreCount) throw Error(Errc::SchemaMismatch, "profile needs 12 scores");
    ScoreProfile p;
    for (std::size_t i = 0; i < kScoreCount; ++i) p.e[i] = s[i].get<double>();
    p.composite = j.at("composite").get<double>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaMismatch, std::string("profile: ") + e.what());
  }
}

/// Radar payload: raw scores, display values clamped to [0, 100], and the
/// composite of the raw values.
inline nlohmann::json radar_export(const ScoreProfile& p) {
  nlohmann::json axes = nlohmann::json::array(), raw = nlohmann::json::array(), display = nlohmann::json::array();
  for (std::size_t i = 0; i < kScoreCount; ++i) {
    axes.push_back(axis_label(i));
    raw.push_back(p.e[i]);
    display.push_back(std::clamp(p.e[i], 0.0, 100.0));
  }
  return {{"axes", axes}, {"raw", raw}, {"display", display}, {"composite", p.composite}};
}

inline std::string radar_csv(const ScoreProfile& p) {
  auto num = [](double v) {
    return nlohmann::json(v).dump();  // shortest round-trip form
  };
  std::string out = "axis,raw,display\n";
  for (std::size_t i = 0; i < kScoreCount; ++i) {
    out += axis_label(i) + "," + num(p.e[i]) + "," + num(std::clamp(p.e[i], 0.0, 100.0)) + "\n";
  }
  out += "composite," + num(p.composite) + "," + num(std::clamp(p.composite, 0.0, 100.0)) + "\n";
  return out;
}

/// Scores a validated bundle against the sequestered truths X1test..X9test.
///
///   E1, E2   short / long  X1test   forecast
///   E3, E5   full window   X2test, X4test   denoised reconstructions
///   E4, E6   long          X3test, X5test   forecasts from noisy data
///   E7, E8   short / long  X6test   forecast from limited data
///   E9, E10  short / long  X7test   forecast from limited noisy data
///   E11, E12 full window   X8test, X9test   interpolated / extrapolated regimes
///
/// Every metric is attempted; if any fails, ScoringFailed lists all failures.
inline ScoreProfile score_submission(const ArrayArchive& truths, const ArrayArchive& bundle, const ScoringConfig& cfg) {
  cfg.validate();
  enum class Metric { Short, Long, Full };
  struct Slot {
    std::string_view output;
    Metric metric;
  };
  static constexpr std::array<Slot, kScoreCount> kSlots = {{
      {"X1test", Metric::Short},
      {"X1test", Metric::Long},
      {"X2test", Metric::Full},
      {"X3test", Metric::Long},
      {"X4test", Metric::Full},
      {"X5test", Metric::Long},
      {"X6test", Metric::Short},
      {"X6test", Metric::Long},
      {"X7test", Metric::Short},
      {"X7test", Metric::Long},
      {"X8test", Metric::Full},
      {"X9test", Metric::Full},
  }};

  std::array<double, kScoreCount> e{};
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < kScoreCount; ++i) {
    const auto& slot = kSlots[i];
    const auto* truth = truths.find(slot.output);
    const auto* pred = bundle.find(slot.output);
    if (!truth || !pred) {
      failures.push_back(axis_label(i) + ": missing " + std::string(slot.output) + (truth ? "" : " truth"));
      continue;
    }
    try {
      switch (slot.metric) {
        case Metric::Short: e[i] = short_time_score(*truth, *pred, cfg); break;
        case Metric::Long: e[i] = long_time_score(*truth, *pred, cfg); break;
        case Metric::Full: e[i] = full_window_score(*truth, *pred); break;
      }
      if (!std::isfinite(e[i])) failures.push_back(axis_label(i) + ": non-finite score");
    } catch (const Error& err) {
      failures.push_back(axis_label(i) + ": " + err.what());
    }
  }
  if (!failures.empty()) {
    std::string detail;
    for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
    throw Error(Errc::ScoringFailed, detail);
  }
  return ScoreProfile::from_scores(e);
}

}  // namespace ctf
