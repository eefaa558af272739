#pragma once

// Challenge packs: ten public training matrices plus a manifest, and a
// sequestered part holding the nine truth matrices, the clean counterparts
// of the noisy inputs, the scoring configuration, and the generation record.
//
// Layout of one pack, all matrices sharing the state dimension n and the
// test length T (M = limited length, B = burn-in length):
//
//   X1train  n x T  clean            -> X1test  continuation over the next T samples
//   X2train  n x T  medium noise     -> X2test  clean X2 (denoise), X3test continuation
//   X3train  n x T  high noise       -> X4test  clean X3 (denoise), X5test continuation
//   X4train  n x M  clean            -> X6test  continuation
//   X5train  n x M  medium noise     -> X7test  continuation
//   X6/7/8train  n x T  clean at regime parameters p1 < p2 < p3
//   X9train  n x B  burn-in at p_interp  -> X8test continuation
//   X10train n x B  burn-in at p_extrap  -> X9test continuation

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctf/array.hpp"
#include "ctf/crypto.hpp"
#include "ctf/dynamics.hpp"
#include "ctf/error.hpp"
#include "ctf/io.hpp"
#include "ctf/npy.hpp"
#include "ctf/scoring.hpp"
#include "ctf/tasks.hpp"

namespace ctf {

inline constexpr std::string_view kManifestVersion = "ctf-manifest/1";
inline constexpr std::string_view kGenerationVersion = "ctf-generation/1";

// ---------------------------------------------------------------------------
// Noise

enum class NoiseLevel { None, Medium, High };

constexpr double noise_multiplier(NoiseLevel level) noexcept {
  switch (level) {
    case NoiseLevel::None: return 0.0;
    case NoiseLevel::Medium: return 0.1;
    case NoiseLevel::High: return 0.5;
  }
  return 0.0;
}

constexpr std::string_view noise_label(NoiseLevel level) noexcept {
  switch (level) {
    case NoiseLevel::None: return "none";
    case NoiseLevel::Medium: return "medium";
    case NoiseLevel::High: return "high";
  }
  return "none";
}

inline NoiseLevel parse_noise_label(std::string_view s) {
  if (s == "none") return NoiseLevel::None;
  if (s == "medium") return NoiseLevel::Medium;
  if (s == "high") return NoiseLevel::High;
  throw Error(Errc::SchemaMismatch, "unknown noise label '" + std::string(s) + "'");
}

inline double rms(const ArrayF64& m) {
  if (m.empty()) return 0.0;
  double s = 0;
  for (double v : m.values()) s += v * v;
  return std::sqrt(s / static_cast<double>(m.size()));
}

/// I.i.d. N(0, sigma^2) draws with sigma = multiplier * RMS(m).
inline ArrayF64 noise_realization(const ArrayF64& m, NoiseLevel level, std::uint64_t seed) {
  ArrayF64 noise(m.rows(), m.cols());
  const double sigma = noise_multiplier(level) * rms(m);
  if (sigma == 0.0) return noise;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (double& v : noise.values()) v = normal(rng);
  return noise;
}

inline ArrayF64 add_noise(const ArrayF64& m, NoiseLevel level, std::uint64_t seed) {
  if (level == NoiseLevel::None) return m;
  ArrayF64 out = m;
  const ArrayF64 noise = noise_realization(m, level, seed);
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += noise.values()[i];
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

/// Parameter values for the parametric-generalization matrices.
struct RegimeSpec {
  std::string parameter;
  double p1 = 0, p2 = 0, p3 = 0;
  double interp = 0, extrap = 0;
};

inline RegimeSpec default_regimes(SystemId id) {
  switch (id) {
    case SystemId::Lorenz: return {"rho", 24.0, 28.0, 32.0, 30.0, 36.0};
    case SystemId::Rossler: return {"c", 5.0, 5.7, 6.4, 6.0, 7.0};
    case SystemId::DoublePendulum: return {"l2", 0.8, 1.0, 1.2, 1.1, 1.4};
    case SystemId::Lorenz96: return {"F", 6.0, 8.0, 10.0, 9.0, 12.0};
    case SystemId::KuramotoSivashinsky: return {"mu", 0.8, 1.0, 1.2, 1.1, 1.4};
    case SystemId::Burgers: return {"nu", 0.08, 0.1, 0.12, 0.11, 0.14};
  }
  throw Error(Errc::ConfigInvalid, "unknown system");
}

constexpr SpectralAxis spectral_axis_for(SystemId id) noexcept {
  switch (id) {
    case SystemId::Lorenz96:
    case SystemId::KuramotoSivashinsky:
    case SystemId::Burgers: return SpectralAxis::Space;
    default: return SpectralAxis::Time;
  }
}

struct GenerationConfig {
  SystemParams params;
  std::optional<GridSpec> grid;
  IntegratorConfig integrator;   // dt, substeps and method; `steps` is ignored
  std::size_t horizon = 1000;    // T: columns of each full training and test matrix
  std::size_t limited_length = 100;
  std::size_t burn_in = 50;
  RegimeSpec regimes;
  double w_short = 0.1;
  double w_long = 0.5;
  std::size_t k_m = 100;
  double epsilon = 1e-12;
  std::optional<std::string> pack_id;
};

inline GenerationConfig default_generation_config(SystemId id) {
  GenerationConfig c;
  c.params = default_params(id);
  c.grid = default_grid(c.params);
  c.integrator = default_integrator(id);
  const bool spatio_temporal = spectral_axis_for(id) == SpectralAxis::Space;
  c.horizon = spatio_temporal ? 1000 : 2000;
  c.limited_length = c.horizon / 10;
  c.burn_in = 50;
  c.regimes = default_regimes(id);
  return c;
}

inline void validate(const GenerationConfig& c) {
  auto bad = [](const std::string& why) { throw Error(Errc::ConfigInvalid, why); };
  validate_params(c.params);
  if (is_pde(system_of(c.params)) && !c.grid) bad("PDE systems need a grid");
  if (!(c.integrator.dt > 0) || c.integrator.substeps_per_sample == 0) bad("integrator dt/substeps invalid");
  if (c.horizon < 8) bad("horizon must be at least 8 samples");
  if (c.limited_length < 1 || c.limited_length > c.horizon) bad("limited_length must be in [1, horizon]");
  if (c.burn_in < 1) bad("burn_in must be positive");
  if (!(c.w_short > 0 && c.w_short <= 1 && c.w_long > 0 && c.w_long <= 1)) bad("window fractions must be in (0, 1]");
  if (c.k_m < 1 || !(c.epsilon > 0)) bad("k_m and epsilon must be positive");
  const auto& r = c.regimes;
  if (!(r.p1 < r.p2 && r.p2 < r.p3)) bad("regimes need p1 < p2 < p3");
  if (!(r.p1 < r.interp && r.interp < r.p3)) bad("interpolation regime must lie in (p1, p3)");
  if (!(r.extrap > r.p3)) bad("extrapolation regime must exceed p3");
  SystemParams probe = c.params;
  set_param(probe, r.parameter, r.p2);  // throws if the parameter does not exist
}

inline ScoringConfig scoring_config_for(const GenerationConfig& c, std::size_t state_dim) {
  const SystemId id = system_of(c.params);
  const SpectralAxis axis = spectral_axis_for(id);
  std::size_t k_m = c.k_m;
  if (axis == SpectralAxis::Space) k_m = std::min(k_m, state_dim / 2 - 1);
  ScoringConfig s;
  s.k_short = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(c.w_short * static_cast<double>(c.horizon))), 1, c.horizon);
  s.k_long = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(c.w_long * static_cast<double>(c.horizon))), 1, c.horizon);
  s.k_m = k_m;
  s.epsilon = c.epsilon;
  s.spectral_axis = axis;
  return s;
}

// ---------------------------------------------------------------------------
// Manifest

struct InputSpec {
  std::string name;
  Shape shape;
  std::string role;
  NoiseLevel noise = NoiseLevel::None;
  std::string parameter_label;  // empty unless a parametric-regime matrix
};

struct OutputSpec {
  std::string name;
  Shape shape;
  std::string source;
  TaskKind kind = TaskKind::Forecast;
};

struct ChallengeManifest {
  std::string version{kManifestVersion};
  SystemId system = SystemId::Lorenz;
  std::string pack_id;
  std::vector<InputSpec> inputs;
  std::vector<OutputSpec> outputs;
  double w_short = 0.1;
  double w_long = 0.5;
  std::size_t k_m = 100;
  std::size_t limited_length = 0;
  std::size_t burn_in_length = 0;

  std::vector<std::string> required_output_names() const {
    std::vector<std::string> out;
    for (const auto& o : outputs) out.push_back(o.name);
    return out;
  }

  const InputSpec* input(std::string_view name) const {
    for (const auto& i : inputs) {
      if (i.name == name) return &i;
    }
    return nullptr;
  }
};

inline nlohmann::json to_json(const ChallengeManifest& m) {
  nlohmann::json inputs = nlohmann::json::array(), outputs = nlohmann::json::array();
  for (const auto& i : m.inputs) {
    nlohmann::json e = {{"name", i.name}, {"rows", i.shape.rows}, {"cols", i.shape.cols},
                        {"role", i.role}, {"noise", noise_label(i.noise)}};
    e["parameter"] = i.parameter_label.empty() ? nlohmann::json(nullptr) : nlohmann::json(i.parameter_label);
    inputs.push_back(std::move(e));
  }
  for (const auto& o : m.outputs) {
    outputs.push_back({{"name", o.name}, {"rows", o.shape.rows}, {"cols", o.shape.cols},
                       {"source", o.source}, {"task", task_kind_name(o.kind)}});
  }
  return {{"version", m.version},
          {"system", system_name(m.system)},
          {"pack_id", m.pack_id},
          {"inputs", inputs},
          {"outputs", outputs},
          {"required_output_names", m.required_output_names()},
          {"scoring_windows", {{"w_short", m.w_short}, {"w_long", m.w_long}}},
          {"k_m", m.k_m},
          {"limited_length", m.limited_length},
          {"burn_in_length", m.burn_in_length},
          {"parameter_labels", {"p1", "p2", "p3", "p_interp", "p_extrap"}}};
}

inline ChallengeManifest manifest_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& why) { throw Error(Errc::SchemaMismatch, "manifest: " + why); };
  try {
    ChallengeManifest m;
    m.version = j.at("version").get<std::string>();
    if (m.version != kManifestVersion) bad("unknown version '" + m.version + "'");
    m.system = parse_system(j.at("system").get<std::string>());
    m.pack_id = j.at("pack_id").get<std::string>();
    for (const auto& e : j.at("inputs")) {
      InputSpec i;
      i.name = e.at("name").get<std::string>();
      i.shape = {e.at("rows").get<std::size_t>(), e.at("cols").get<std::size_t>()};
      i.role = e.at("role").get<std::string>();
      i.noise = parse_noise_label(e.at("noise").get<std::string>());
      if (!e.at("parameter").is_null()) i.parameter_label = e.at("parameter").get<std::string>();
      m.inputs.push_back(std::move(i));
    }
    for (const auto& e : j.at("outputs")) {
      OutputSpec o;
      o.name = e.at("name").get<std::string>();
      o.shape = {e.at("rows").get<std::size_t>(), e.at("cols").get<std::size_t>()};
      o.source = e.at("source").get<std::string>();
      const auto task = e.at("task").get<std::string>();
      if (task != "forecast" && task != "denoise") bad("unknown task '" + task + "'");
      o.kind = task == "forecast" ? TaskKind::Forecast : TaskKind::Denoise;
      m.outputs.push_back(std::move(o));
    }
    m.w_short = j.at("scoring_windows").at("w_short").get<double>();
    m.w_long = j.at("scoring_windows").at("w_long").get<double>();
    m.k_m = j.at("k_m").get<std::size_t>();
    m.limited_length = j.at("limited_length").get<std::size_t>();
    m.burn_in_length = j.at("burn_in_length").get<std::size_t>();

    if (m.inputs.size() != kInputNames.size() || m.outputs.size() != kOutputNames.size()) {
      bad("expected 10 inputs and 9 outputs");
    }
    for (std::size_t i = 0; i < kInputNames.size(); ++i) {
      if (m.inputs[i].name != kInputNames[i]) bad("input " + std::to_string(i) + " must be " + std::string(kInputNames[i]));
      if (m.inputs[i].shape.rows == 0 || m.inputs[i].shape.cols == 0) bad("empty input shape");
    }
    for (std::size_t i = 0; i < kOutputNames.size(); ++i) {
      if (m.outputs[i].name != kOutputNames[i]) bad("output " + std::to_string(i) + " must be " + std::string(kOutputNames[i]));
      if (m.outputs[i].shape.rows == 0 || m.outputs[i].shape.cols == 0) bad("empty output shape");
    }
    if (!(m.w_short > 0 && m.w_short <= 1 && m.w_long > 0 && m.w_long <= 1)) bad("window fractions out of range");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaMismatch, std::string("manifest: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Generation record (sequestered)

struct GenerationRecord {
  SystemId system = SystemId::Lorenz;
  std::uint64_t seed = 0;
  double dt = 0;
  std::size_t substeps = 1;
  std::vector<std::pair<std::string, double>> params;
  std::optional<GridSpec> grid;
  RegimeSpec regimes;
  std::map<std::string, std::uint64_t> noise_seeds;
  std::map<std::string, std::uint64_t> initial_condition_seeds;
  std::size_t horizon = 0;
  std::size_t limited_length = 0;
  std::size_t burn_in = 0;
};

inline nlohmann::json to_json(const GenerationRecord& g) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : g.params) params[k] = v;
  nlohmann::json j = {
      {"version", kGenerationVersion},
      {"system", system_name(g.system)},
      {"seed", g.seed},
      {"dt", g.dt},
      {"substeps", g.substeps},
      {"sample_interval", g.dt * static_cast<double>(g.substeps)},
      {"params", params},
      {"regimes",
       {{"parameter", g.regimes.parameter},
        {"p1", g.regimes.p1},
        {"p2", g.regimes.p2},
        {"p3", g.regimes.p3},
        {"p_interp", g.regimes.interp},
        {"p_extrap", g.regimes.extrap}}},
      {"noise_multipliers", {{"medium", noise_multiplier(NoiseLevel::Medium)}, {"high", noise_multiplier(NoiseLevel::High)}}},
      {"noise_seeds", g.noise_seeds},
      {"initial_condition_seeds", g.initial_condition_seeds},
      {"horizon", g.horizon},
      {"limited_length", g.limited_length},
      {"burn_in", g.burn_in},
  };
  j["grid"] = g.grid ? nlohmann::json{{"n_points", g.grid->n_points}, {"length", g.grid->length}} : nlohmann::json(nullptr);
  return j;
}

inline GenerationRecord generation_record_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<std::string>() != kGenerationVersion) {
      throw Error(Errc::SchemaMismatch, "generation.json version " + j.at("version").dump());
    }
    GenerationRecord g;
    g.system = parse_system(j.at("system").get<std::string>());
    g.seed = j.at("seed").get<std::uint64_t>();
    g.dt = j.at("dt").get<double>();
    g.substeps = j.at("substeps").get<std::size_t>();
    for (const auto& [k, unused] : param_values(default_params(g.system))) {
      g.params.emplace_back(k, j.at("params").at(k).get<double>());
    }
    if (!j.at("grid").is_null()) g.grid = GridSpec{j["grid"].at("n_points").get<std::size_t>(), j["grid"].at("length").get<double>()};
    const auto& r = j.at("regimes");
    g.regimes = {r.at("parameter").get<std::string>(), r.at("p1").get<double>(), r.at("p2").get<double>(),
                 r.at("p3").get<double>(), r.at("p_interp").get<double>(), r.at("p_extrap").get<double>()};
    g.noise_seeds = j.at("noise_seeds").get<std::map<std::string, std::uint64_t>>();
    g.initial_condition_seeds = j.at("initial_condition_seeds").get<std::map<std::string, std::uint64_t>>();
    g.horizon = j.at("horizon").get<std::size_t>();
    g.limited_length = j.at("limited_length").get<std::size_t>();
    g.burn_in = j.at("burn_in").get<std::size_t>();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaMismatch, std::string("generation.json: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Packs

struct PublicPack {
  ChallengeManifest manifest;
  ArrayArchive data;  // X1train..X10train
};

struct SequesteredPack {
  ArrayArchive data;  // X1test..X9test, X{2,3,5}train_clean, X{2,3,5}train_noise
  ScoringConfig scoring;
  GenerationRecord record;

  ArrayArchive truths() const {
    ArrayArchive t;
    for (auto name : kOutputNames) t.insert(std::string(name), data.at(name));
    return t;
  }

  std::vector<OutputSpec> output_specs() const {
    std::vector<OutputSpec> out;
    for (const auto& task : kOutputTasks) {
      out.push_back({std::string(task.output), shape_of(data.at(task.output)), std::string(task.source), task.kind});
    }
    return out;
  }
};

struct ChallengePack {
  PublicPack public_part;
  SequesteredPack sequestered;
};

/// Independent 64-bit stream seed derived from the pack seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x43544650u};
  std::mt19937_64 gen(seq);
  return gen();
}

/// Pack id that does not reveal the seed.
inline std::string default_pack_id(SystemId id, std::uint64_t seed) {
  const std::string digest = sha256_hex("ctf-pack|" + std::string(system_slug(id)) + "|" + std::to_string(seed));
  return std::string(system_slug(id)) + "-" + digest.substr(0, 8);
}

namespace detail {

inline void check_continuity(const SystemParams& params, const std::optional<GridSpec>& grid,
                             const IntegratorConfig& integ, const ArrayF64& traj, std::size_t split) {
  IntegratorConfig one = integ;
  one.steps = 1;
  const auto start = traj.column(split - 1);
  const auto next = integrate(params, grid, start, one).column(1);
  double scale = 1.0, diff = 0.0;
  for (std::size_t r = 0; r < traj.rows(); ++r) {
    scale = std::max(scale, std::abs(traj(r, split)));
    diff = std::max(diff, std::abs(next[r] - traj(r, split)));
  }
  if (diff > 1e-9 * scale) {
    throw Error(Errc::ConfigInvalid, "continuity check failed at column " + std::to_string(split) +
                                         " (difference " + std::to_string(diff) + ")");
  }
}

}  // namespace detail

inline ChallengePack generate_pack(std::uint64_t seed, const GenerationConfig& cfg) {
  validate(cfg);
  const SystemId id = system_of(cfg.params);
  const std::size_t T = cfg.horizon, M = cfg.limited_length, B = cfg.burn_in;
  const std::size_t n = state_dimension(cfg.params, cfg.grid);
  const auto& reg = cfg.regimes;

  GenerationRecord record;
  record.system = id;
  record.seed = seed;
  record.dt = cfg.integrator.dt;
  record.substeps = cfg.integrator.substeps_per_sample;
  record.params = param_values(cfg.params);
  record.grid = cfg.grid;
  record.regimes = reg;
  record.horizon = T;
  record.limited_length = M;
  record.burn_in = B;

  // One trajectory of `columns` samples at `value` of the regime parameter
  // (nullopt = base parameters), started from a spun-up state.
  auto trajectory = [&](std::string_view label, std::uint64_t stream, std::optional<double> value,
                        std::size_t columns, std::optional<std::size_t> split) {
    SystemParams p = cfg.params;
    if (value) set_param(p, reg.parameter, *value);
    const std::uint64_t ic_seed = derive_seed(seed, stream);
    record.initial_condition_seeds[std::string(label)] = ic_seed;
    auto x0 = spin_up_initial_condition(p, cfg.grid, ic_seed);
    IntegratorConfig integ = cfg.integrator;
    integ.steps = columns - 1;
    ArrayF64 traj = integrate(p, cfg.grid, x0, integ);
    if (split) detail::check_continuity(p, cfg.grid, integ, traj, *split);
    return traj;
  };
  auto noise_seed = [&](std::string_view name, std::uint64_t stream) {
    const std::uint64_t s = derive_seed(seed, stream);
    record.noise_seeds[std::string(name)] = s;
    return s;
  };

  ArrayArchive pub, priv;
  std::map<std::string, ArrayF64> truth;

  {
    auto t1 = trajectory("X1train", 1, std::nullopt, 2 * T, T);
    pub.insert("X1train", t1.columns(0, T));
    truth["X1test"] = t1.columns(T, 2 * T);
  }
  struct NoisyForecast {
    const char* input;
    std::uint64_t stream;
    NoiseLevel level;
    std::size_t length;
    const char* denoise_output;  // nullptr when not scored for reconstruction
    const char* forecast_output;
  };
  for (const NoisyForecast& nf : {NoisyForecast{"X2train", 2, NoiseLevel::Medium, T, "X2test", "X3test"},
                                  NoisyForecast{"X3train", 3, NoiseLevel::High, T, "X4test", "X5test"},
                                  NoisyForecast{"X5train", 5, NoiseLevel::Medium, M, nullptr, "X7test"}}) {
    auto traj = trajectory(nf.input, nf.stream, std::nullopt, nf.length + T, nf.length);
    ArrayF64 clean = traj.columns(0, nf.length);
    ArrayF64 noise = noise_realization(clean, nf.level, noise_seed(nf.input, 100 + nf.stream));
    ArrayF64 noisy = clean;
    for (std::size_t i = 0; i < noisy.size(); ++i) noisy.values()[i] += noise.values()[i];
    pub.insert(nf.input, std::move(noisy));
    if (nf.denoise_output) truth[nf.denoise_output] = clean;
    truth[nf.forecast_output] = traj.columns(nf.length, nf.length + T);
    priv.insert(std::string(nf.input) + "_clean", std::move(clean));
    priv.insert(std::string(nf.input) + "_noise", std::move(noise));
  }
  {
    auto t4 = trajectory("X4train", 4, std::nullopt, M + T, M);
    pub.insert("X4train", t4.columns(0, M));
    truth["X6test"] = t4.columns(M, M + T);
  }
  const std::pair<const char*, double> regimes[] = {{"X6train", reg.p1}, {"X7train", reg.p2}, {"X8train", reg.p3}};
  std::uint64_t stream = 6;
  for (const auto& [name, value] : regimes) pub.insert(name, trajectory(name, stream++, value, T, std::nullopt));
  {
    auto t9 = trajectory("X9train", 9, reg.interp, B + T, B);
    pub.insert("X9train", t9.columns(0, B));
    truth["X8test"] = t9.columns(B, B + T);
    auto t10 = trajectory("X10train", 10, reg.extrap, B + T, B);
    pub.insert("X10train", t10.columns(0, B));
    truth["X9test"] = t10.columns(B, B + T);
  }

  // Canonical member order.
  ArrayArchive public_data, private_data;
  for (auto name : kInputNames) public_data.insert(std::string(name), pub.at(name));
  for (auto name : kOutputNames) private_data.insert(std::string(name), truth.at(std::string(name)));
  for (const auto& [name, m] : priv.entries()) private_data.insert(name, m);

  ChallengeManifest manifest;
  manifest.system = id;
  manifest.pack_id = cfg.pack_id.value_or(default_pack_id(id, seed));
  manifest.w_short = cfg.w_short;
  manifest.w_long = cfg.w_long;
  manifest.limited_length = M;
  manifest.burn_in_length = B;
  const ScoringConfig scoring = scoring_config_for(cfg, n);
  manifest.k_m = scoring.k_m;
  const std::map<std::string_view, std::pair<std::string, std::string>> roles = {
      {"X1train", {"forecast", ""}},         {"X2train", {"noisy", ""}},
      {"X3train", {"noisy", ""}},            {"X4train", {"limited", ""}},
      {"X5train", {"limited-noisy", ""}},    {"X6train", {"parametric", "p1"}},
      {"X7train", {"parametric", "p2"}},     {"X8train", {"parametric", "p3"}},
      {"X9train", {"burn-in", "p_interp"}},  {"X10train", {"burn-in", "p_extrap"}}};
  for (auto name : kInputNames) {
    const auto& [role, label] = roles.at(name);
    NoiseLevel level = NoiseLevel::None;
    if (name == "X2train" || name == "X5train") level = NoiseLevel::Medium;
    if (name == "X3train") level = NoiseLevel::High;
    manifest.inputs.push_back({std::string(name), shape_of(public_data.at(name)), role, level, label});
  }
  for (const auto& task : kOutputTasks) {
    manifest.outputs.push_back(
        {std::string(task.output), shape_of(private_data.at(task.output)), std::string(task.source), task.kind});
  }

  ChallengePack pack;
  pack.public_part = {std::move(manifest), std::move(public_data)};
  pack.sequestered = {std::move(private_data), scoring, std::move(record)};
  return pack;
}

inline ChallengePack generate_pack(SystemId id, std::uint64_t seed) {
  return generate_pack(seed, default_generation_config(id));
}

// ---------------------------------------------------------------------------
// Persistence

inline void write_pack(const ChallengePack& pack, const std::filesystem::path& public_dir,
                       const std::filesystem::path& private_dir) {
  std::error_code ec;
  std::filesystem::create_directories(public_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + public_dir.string() + ": " + ec.message());
  std::filesystem::create_directories(private_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + private_dir.string() + ": " + ec.message());

  write_file_bytes(public_dir / "public.npz", write_archive(pack.public_part.data));
  write_file_text(public_dir / "manifest.json", to_json(pack.public_part.manifest).dump(2) + "\n");
  write_file_bytes(private_dir / "private.npz", write_archive(pack.sequestered.data));
  write_file_bytes(private_dir / "truth.npz", write_archive(pack.sequestered.truths()));  // X1test..X9test only
  write_file_text(private_dir / "scoring.json", to_json(pack.sequestered.scoring).dump(2) + "\n");
  write_file_text(private_dir / "generation.json", to_json(pack.sequestered.record).dump(2) + "\n");
}

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaMismatch, path.string() + ": " + e.what());
  }
}

}  // namespace detail

inline PublicPack load_public(const std::filesystem::path& dir) {
  PublicPack p;
  p.manifest = manifest_from_json(detail::read_json_file(dir / "manifest.json"));
  p.data = read_archive(read_file_bytes(dir / "public.npz"));
  return p;
}

inline SequesteredPack load_private(const std::filesystem::path& dir) {
  SequesteredPack s;
  s.data = read_archive(read_file_bytes(dir / "private.npz"));
  s.scoring = scoring_config_from_json(detail::read_json_file(dir / "scoring.json"));
  s.record = generation_record_from_json(detail::read_json_file(dir / "generation.json"));
  for (auto name : kOutputNames) {
    if (!s.data.contains(name)) throw Error(Errc::SchemaMismatch, "private.npz lacks " + std::string(name));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Submission validation

struct Violation {
  enum class Kind { MissingOutput, ExtraOutput, ShapeMismatch, NonFiniteValue };
  Kind kind;
  std::string name;
  std::string detail;

  friend bool operator==(const Violation& a, const Violation& b) { return a.kind == b.kind && a.name == b.name; }
};

constexpr std::string_view violation_kind_name(Violation::Kind k) noexcept {
  switch (k) {
    case Violation::Kind::MissingOutput: return "MissingOutput";
    case Violation::Kind::ExtraOutput: return "ExtraOutput";
    case Violation::Kind::ShapeMismatch: return "ShapeMismatch";
    case Violation::Kind::NonFiniteValue: return "NonFiniteValue";
  }
  return "?";
}

inline std::string to_string(const Violation& v) {
  std::string s = std::string(violation_kind_name(v.kind)) + "(\"" + v.name + "\")";
  if (!v.detail.empty()) s += ": " + v.detail;
  return s;
}

inline std::vector<Violation> validate_submission(std::span<const OutputSpec> required, const ArrayArchive& bundle) {
  std::vector<Violation> out;
  for (const auto& spec : required) {
    const auto* m = bundle.find(spec.name);
    if (!m) {
      out.push_back({Violation::Kind::MissingOutput, spec.name, ""});
      continue;
    }
    if (shape_of(*m) != spec.shape) {
      out.push_back({Violation::Kind::ShapeMismatch, spec.name,
                     "expected " + to_string(spec.shape) + ", got " + to_string(shape_of(*m))});
      continue;
    }
    if (!m->all_finite()) out.push_back({Violation::Kind::NonFiniteValue, spec.name, ""});
  }
  for (const auto& [name, m] : bundle.entries()) {
    bool known = std::any_of(required.begin(), required.end(), [&](const OutputSpec& s) { return s.name == name; });
    if (!known) out.push_back({Violation::Kind::ExtraOutput, name, ""});
  }
  return out;
}

inline std::vector<Violation> validate_submission(const ChallengeManifest& manifest, const ArrayArchive& bundle) {
  return validate_submission(manifest.outputs, bundle);
}

}  // namespace ctf
