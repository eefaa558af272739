#pragma once

// Naming contract for challenge packs: 10 training inputs, 9 required outputs.

#include <array>
#include <optional>
#include <string_view>

namespace ctf {

inline constexpr std::array<std::string_view, 10> kInputNames = {
    "X1train", "X2train", "X3train", "X4train", "X5train",
    "X6train", "X7train", "X8train", "X9train", "X10train"};

inline constexpr std::array<std::string_view, 9> kOutputNames = {
    "X1test", "X2test", "X3test", "X4test", "X5test", "X6test", "X7test", "X8test", "X9test"};

enum class TaskKind { Forecast, Denoise };

/// Which training (or burn-in) matrix each required output is derived from.
struct OutputTask {
  std::string_view output;
  std::string_view source;
  TaskKind kind;
};

inline constexpr std::array<OutputTask, 9> kOutputTasks = {{
    {"X1test", "X1train", TaskKind::Forecast},
    {"X2test", "X2train", TaskKind::Denoise},
    {"X3test", "X2train", TaskKind::Forecast},
    {"X4test", "X3train", TaskKind::Denoise},
    {"X5test", "X3train", TaskKind::Forecast},
    {"X6test", "X4train", TaskKind::Forecast},
    {"X7test", "X5train", TaskKind::Forecast},
    {"X8test", "X9train", TaskKind::Forecast},
    {"X9test", "X10train", TaskKind::Forecast},
}};

inline std::optional<OutputTask> task_for(std::string_view output) {
  for (const auto& t : kOutputTasks) {
    if (t.output == output) return t;
  }
  return std::nullopt;
}

constexpr std::string_view task_kind_name(TaskKind k) noexcept {
  return k == TaskKind::Forecast ? "forecast" : "denoise";
}

}  // namespace ctf
