#pragma once

// Reference submissions built from the public part of a pack only.

#include <string>
#include <string_view>

#include "ctf/challenge.hpp"

namespace ctf {

enum class BaselineKind { Zeros, Persistence, Climatology };

constexpr std::string_view baseline_name(BaselineKind k) noexcept {
  switch (k) {
    case BaselineKind::Zeros: return "zeros";
    case BaselineKind::Persistence: return "persistence";
    case BaselineKind::Climatology: return "climatology";
  }
  return "?";
}

inline BaselineKind parse_baseline(std::string_view s) {
  for (auto k : {BaselineKind::Zeros, BaselineKind::Persistence, BaselineKind::Climatology}) {
    if (baseline_name(k) == s) return k;
  }
  throw Error(Errc::ConfigInvalid, "unknown baseline '" + std::string(s) + "'");
}

namespace detail {

inline ArrayF64 repeat_column(std::span<const double> column, std::size_t cols) {
  ArrayF64 out(column.size(), cols);
  for (std::size_t c = 0; c < cols; ++c) out.set_column(c, column);
  return out;
}

inline std::vector<double> column_mean(const ArrayF64& m) {
  std::vector<double> mean(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0;
    for (double v : m.row(r)) s += v;
    mean[r] = s / static_cast<double>(m.cols());
  }
  return mean;
}

}  // namespace detail

/// Every required output at its manifest shape. Forecasts repeat the last
/// column (Persistence) or the column mean (Climatology) of their source;
/// denoising outputs echo the noisy input.
inline ArrayArchive make_baseline(BaselineKind kind, const PublicPack& pub) {
  auto mismatch = [](const std::string& why) { throw Error(Errc::ManifestMismatch, why); };
  ArrayArchive out;
  for (const auto& spec : pub.manifest.outputs) {
    if (kind == BaselineKind::Zeros) {
      out.insert(spec.name, ArrayF64(spec.shape.rows, spec.shape.cols));
      continue;
    }
    const ArrayF64* source = pub.data.find(spec.source);
    if (!source) mismatch(spec.name + ": source " + spec.source + " missing from public data");
    if (source->rows() != spec.shape.rows || source->cols() == 0) {
      mismatch(spec.name + ": source " + spec.source + " has shape " + to_string(shape_of(*source)) +
               ", output needs " + std::to_string(spec.shape.rows) + " rows");
    }
    if (spec.kind == TaskKind::Denoise) {
      if (shape_of(*source) != spec.shape) mismatch(spec.name + ": denoising source shape differs from output");
      out.insert(spec.name, *source);
    } else if (kind == BaselineKind::Persistence) {
      out.insert(spec.name, detail::repeat_column(source->column(source->cols() - 1), spec.shape.cols));
    } else {
      out.insert(spec.name, detail::repeat_column(detail::column_mean(*source), spec.shape.cols));
    }
  }
  return out;
}

}  // namespace ctf
