// Release gate: one PASS/FAIL line per primary acceptance criterion, each at
// its stated tolerance and time budget. Exit status is non-zero if any fails.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "httplib.h"

#include "ctf/baselines.hpp"
#include "ctf/challenge.hpp"
#include "ctf/npy.hpp"
#include "ctf/scoring.hpp"
#include "ode_oracle.hpp"
#include "oracles.hpp"

extern char** environ;

namespace ctf {
namespace {

namespace fs = std::filesystem;
using Seconds = std::chrono::duration<double>;

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Accumulates failures; the first one becomes the detail line.
struct Check {
  bool pass = true;
  std::string first_failure;
  void expect(bool ok, const std::string& what) {
    if (!ok && pass) first_failure = what;
    pass = pass && ok;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("ctf_acceptance_" + random_hex(6));
  TempDir() { fs::create_directories(path); }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// ---------------------------------------------------------------------------
// Shared fixture: every system, three seeds, default generation settings.

constexpr std::uint64_t kSeeds[] = {101, 202, 303};

struct PackSet {
  std::vector<ChallengePack> packs;
  double generation_seconds = 0;
};

PackSet& all_packs() {
  static PackSet set = [] {
    PackSet s;
    const auto t0 = std::chrono::steady_clock::now();
    for (SystemId id : kAllSystems) {
      for (auto seed : kSeeds) s.packs.push_back(generate_pack(id, seed));
    }
    s.generation_seconds = Seconds(std::chrono::steady_clock::now() - t0).count();
    return s;
  }();
  return set;
}

std::string pack_label(const ChallengePack& p) {
  return std::string(system_slug(p.public_part.manifest.system)) + "/" + std::to_string(p.sequestered.record.seed);
}

// ---------------------------------------------------------------------------

Outcome zeros_calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  auto& set = all_packs();
  Check c;
  double worst = 0;
  for (const auto& p : set.packs) {
    const auto bundle = make_baseline(BaselineKind::Zeros, p.public_part);
    c.expect(validate_submission(p.public_part.manifest, bundle).empty(), pack_label(p) + " zeros bundle invalid");
    const auto profile = score_submission(p.sequestered.truths(), bundle, p.sequestered.scoring);
    for (std::size_t i = 0; i < kScoreCount; ++i) {
      worst = std::max(worst, std::abs(profile.e[i]));
      c.expect(std::abs(profile.e[i]) < 1e-9, pack_label(p) + " " + axis_label(i) + " = " + fmt(profile.e[i]));
    }
  }
  const double secs = Seconds(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 120.0, "runtime " + fmt(secs) + " s exceeds 120 s");
  return {c.pass, c.pass ? std::to_string(set.packs.size()) + " packs, max |E| = " + fmt(worst) + ", " + fmt(secs) +
                               " s including generation"
                         : c.first_failure};
}

Outcome truth_calibration() {
  Check c;
  double worst = 0;
  for (const auto& p : all_packs().packs) {
    const auto truths = p.sequestered.truths();
    c.expect(validate_submission(p.public_part.manifest, truths).empty(), pack_label(p) + " truth bundle invalid");
    const auto profile = score_submission(truths, truths, p.sequestered.scoring);
    for (std::size_t i = 0; i < kScoreCount; ++i) {
      worst = std::max(worst, std::abs(profile.e[i] - 100.0));
      c.expect(std::abs(profile.e[i] - 100.0) < 1e-9, pack_label(p) + " " + axis_label(i) + " = " + fmt(profile.e[i]));
    }
  }
  return {c.pass, c.pass ? "18 packs, max |E - 100| = " + fmt(worst) : c.first_failure};
}

Outcome scale_law() {
  Check c;
  double worst = 0;
  for (const auto& p : all_packs().packs) {
    const auto truths = p.sequestered.truths();
    for (double alpha : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
      ArrayArchive bundle;
      for (const auto& [name, m] : truths.entries()) {
        ArrayF64 a = m;
        if (name == "X1test") {
          for (double& v : a.values()) v *= alpha;
        }
        bundle.insert(name, std::move(a));
      }
      const double e1 = score_submission(truths, bundle, p.sequestered.scoring).e[0];
      const double expected = 100.0 * (1.0 - std::abs(1.0 - alpha));
      worst = std::max(worst, std::abs(e1 - expected));
      c.expect(std::abs(e1 - expected) < 1e-9, pack_label(p) + " alpha " + fmt(alpha) + ": E1 = " + fmt(e1));
    }
  }
  return {c.pass, c.pass ? "alpha in {-1, 0, 0.5, 1, 2} on 18 packs, max deviation " + fmt(worst) : c.first_failure};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<std::size_t> dim(1, 16);
  Check c;
  double worst = 0;
  auto track = [&](double got, double ref, const std::string& what) {
    const double d = std::abs(got - ref);
    worst = std::max(worst, d);
    c.expect(d <= 1e-10, what + ": |diff| = " + fmt(d));
  };
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t rows = dim(rng), cols = std::max<std::size_t>(4, dim(rng));
    const auto truth = oracle::random_matrix(rng, rows, cols, 1.0 + static_cast<double>(inst % 7));
    const auto pred = oracle::random_matrix(rng, rows, cols);
    const std::size_t c0 = std::uniform_int_distribution<std::size_t>(0, cols - 4)(rng);
    const std::string tag = "instance " + std::to_string(inst);

    // Norms.
    track(relative_frobenius_error(truth, pred, {c0, cols}), oracle::relative_frobenius(truth, pred, c0, cols),
          tag + " frobenius");

    // Time-axis spectra: half-width limited by the window length.
    ScoringConfig tc;
    tc.k_short = 1;
    tc.k_long = cols - c0;
    tc.k_m = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    tc.spectral_axis = SpectralAxis::Time;
    const long kt = static_cast<long>(std::min(tc.k_m, (cols - c0) / 2 - 1));
    const auto ts = log_power_spectrum(truth, {c0, cols}, tc);
    const auto tref = oracle::time_log_spectrum(truth, c0, cols, kt, tc.epsilon);
    c.expect(ts.rows() == tref.size() && ts.cols() == rows, tag + " time spectrum shape");
    for (std::size_t r = 0; r < std::min(ts.rows(), tref.size()); ++r) {
      for (std::size_t k = 0; k < std::min(ts.cols(), rows); ++k) track(ts(r, k), tref[r][k], tag + " time spectrum");
    }

    // Space-axis spectra need 2k+1 <= rows.
    if (rows >= 3) {
      ScoringConfig sc = tc;
      sc.spectral_axis = SpectralAxis::Space;
      sc.k_m = std::uniform_int_distribution<std::size_t>(1, (rows - 1) / 2)(rng);
      const auto ss = log_power_spectrum(truth, {c0, cols}, sc);
      const auto sref = oracle::space_log_spectrum(truth, c0, cols, static_cast<long>(sc.k_m), sc.epsilon);
      c.expect(ss.rows() == sref.size() && ss.cols() == cols - c0, tag + " space spectrum shape");
      for (std::size_t r = 0; r < std::min(ss.rows(), sref.size()); ++r) {
        for (std::size_t k = 0; k < std::min(ss.cols(), cols - c0); ++k) track(ss(r, k), sref[r][k], tag + " space spectrum");
      }
      // Long-time score from oracle spectra.
      const auto pref = oracle::space_log_spectrum(pred, c0, cols, static_cast<long>(sc.k_m), sc.epsilon);
      long double num = 0, den = 0;
      for (std::size_t r = 0; r < sref.size(); ++r) {
        for (std::size_t k = 0; k < sref[r].size(); ++k) {
          num += (static_cast<long double>(sref[r][k]) - pref[r][k]) * (static_cast<long double>(sref[r][k]) - pref[r][k]);
          den += static_cast<long double>(sref[r][k]) * sref[r][k];
        }
      }
      sc.k_long = cols - c0;
      track(long_time_score(truth, pred, sc), 100.0 * (1.0 - static_cast<double>(std::sqrt(num / den))),
            tag + " long-time score");
    }
  }
  return {c.pass, c.pass ? "200 instances up to 16x16, max |diff| = " + fmt(worst) : c.first_failure};
}

Outcome integrator_physics() {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  std::ostringstream d;

  // Spatial mean over the longest pack trajectory (2T samples).
  double worst_mean = 0;
  for (SystemId id : {SystemId::KuramotoSivashinsky, SystemId::Burgers}) {
    const auto gcfg = default_generation_config(id);
    auto x0 = spin_up_initial_condition(gcfg.params, gcfg.grid, 9);
    for (double& v : x0) v += 0.3;
    auto cfg = gcfg.integrator;
    cfg.steps = 2 * gcfg.horizon;
    const auto m = integrate(gcfg.params, gcfg.grid, x0, cfg);
    auto mean = [&](std::size_t col) {
      double s = 0;
      for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, col);
      return s / static_cast<double>(m.rows());
    };
    const double m0 = mean(0);
    for (std::size_t col = 1; col < m.cols(); ++col) worst_mean = std::max(worst_mean, std::abs(mean(col) - m0));
  }
  c.expect(worst_mean < 1e-8, "PDE mean drift " + fmt(worst_mean));
  d << "mean drift " << fmt(worst_mean);

  // Double pendulum: 10^4 steps at the default dt.
  {
    DoublePendulumParams p;
    const std::vector<double> x0{2.0, 1.5, 0.3, -0.2};
    const auto m = integrate(p, x0, {default_integrator(SystemId::DoublePendulum).dt, 10000, 1, Method::RK4});
    auto energy = [&](std::span<const double> s) {
      const double kinetic = 0.5 * (p.m1 + p.m2) * p.l1 * p.l1 * s[2] * s[2] + 0.5 * p.m2 * p.l2 * p.l2 * s[3] * s[3] +
                             p.m2 * p.l1 * p.l2 * s[2] * s[3] * std::cos(s[0] - s[1]);
      return kinetic - (p.m1 + p.m2) * p.g * p.l1 * std::cos(s[0]) - p.m2 * p.g * p.l2 * std::cos(s[1]);
    };
    const double e0 = energy(x0);
    double drift = 0;
    for (std::size_t col = 0; col < m.cols(); ++col) {
      drift = std::max(drift, std::abs(energy(m.column(col)) - e0) / std::abs(e0));
    }
    c.expect(drift < 1e-6, "pendulum energy drift " + fmt(drift));
    d << ", pendulum drift " << fmt(drift);
  }

  // Unforced Lorenz96: E(t) = E(0) exp(-2t).
  {
    SystemParams p = Lorenz96Params{0.0, 40};
    std::vector<double> x0(40);
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = std::sin(0.7 * static_cast<double>(i)) + 0.5;
    const double dt = 0.01;
    const auto m = integrate(p, x0, {dt, 500, 1, Method::RK4});
    auto energy = [&](std::size_t col) {
      double e = 0;
      for (std::size_t r = 0; r < m.rows(); ++r) e += 0.5 * m(r, col) * m(r, col);
      return e;
    };
    double worst = 0;
    for (std::size_t col = 0; col < m.cols(); ++col) {
      const double expected = energy(0) * std::exp(-2.0 * dt * static_cast<double>(col));
      worst = std::max(worst, std::abs(energy(col) - expected) / expected);
    }
    c.expect(worst < 1e-4, "Lorenz96 decay deviation " + fmt(worst));
    d << ", L96 decay " << fmt(worst);
  }

  // RK4 order on Lorenz against an adaptive reference.
  {
    const std::vector<double> x0{1, 1, 1};
    const auto ref = oracle::dopri(LorenzParams{}, x0, 1.0, 1e-13);
    auto err = [&](double h) {
      const auto n = static_cast<std::size_t>(std::llround(1.0 / h));
      return oracle::relative_error(integrate(LorenzParams{}, x0, {h, n, 1, Method::RK4}).column(n), ref);
    };
    const double order = std::log2(err(0.02) / err(0.01));
    c.expect(order >= 3.8, "RK4 order " + fmt(order));
    d << ", RK4 order " << fmt(order);
  }

  // ETDRK4 order on Kuramoto-Sivashinsky.
  {
    SystemParams p = KuramotoSivashinskyParams{};
    const double length = 32 * std::numbers::pi;
    std::vector<double> u0(128);
    for (std::size_t i = 0; i < u0.size(); ++i) {
      const double x = length * static_cast<double>(i) / 128.0;
      u0[i] = std::cos(x / 16) * (1 + std::sin(x / 16));
    }
    const auto ref = oracle::dopri(p, u0, 5.0);
    auto err = [&](double h) {
      const auto n = static_cast<std::size_t>(std::llround(5.0 / h));
      return oracle::relative_error(integrate(p, u0, {h, n, 1, Method::ETDRK4}).column(n), ref);
    };
    const double order = std::log2(err(0.25) / err(0.125));
    c.expect(order >= 3.5, "ETDRK4 order " + fmt(order));
    d << ", ETDRK4 order " << fmt(order);
  }

  const double secs = Seconds(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 300.0, "runtime " + fmt(secs) + " s exceeds 300 s");
  d << ", " << fmt(secs) << " s";
  return {c.pass, c.pass ? d.str() : c.first_failure};
}

Outcome npy_format() {
  Check c;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 1000; ++i) {
    ArrayF64 a(dim(rng), dim(rng));
    for (double& v : a.values()) {
      // Arbitrary bit patterns, including NaN payloads, infinities and subnormals.
      v = std::bit_cast<double>(bits(rng));
    }
    const Bytes bytes = write_array(a);
    const ArrayF64 back = read_array(bytes);
    const bool same = back.rows() == a.rows() && back.cols() == a.cols() &&
                      std::memcmp(back.values().data(), a.values().data(), a.size() * sizeof(double)) == 0;
    c.expect(same, "round trip " + std::to_string(i) + " not bit-exact");
    c.expect((bytes.size() - a.size() * 8) % 64 == 0, "header of array " + std::to_string(i) + " not 64-aligned");
  }
  const Bytes golden = read_file_bytes(fs::path(CTF_TEST_DATA_DIR) / "zeros_1x1.npy");
  const Bytes ours = write_array(ArrayF64(1, 1));
  c.expect(ours == golden, "1x1 zero array differs from the reference file");
  return {c.pass, c.pass ? "1000 bit-exact round trips; 1x1 zero file matches the " + std::to_string(golden.size()) +
                               "-byte reference"
                         : c.first_failure};
}

// ---------------------------------------------------------------------------
// Subprocess helpers for the end-to-end check.

struct Proc {
  pid_t pid = -1;
  int out_fd = -1;
};

Proc spawn(const std::vector<std::string>& args, const fs::path& stderr_path) {
  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&fa, fds[0]);
  posix_spawn_file_actions_addclose(&fa, fds[1]);
  posix_spawn_file_actions_addopen(&fa, STDERR_FILENO, stderr_path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  Proc p;
  const int rc = posix_spawn(&p.pid, argv[0], &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  close(fds[1]);
  if (rc != 0) {
    close(fds[0]);
    throw std::runtime_error("spawn failed: " + args[0]);
  }
  p.out_fd = fds[0];
  return p;
}

std::string read_line(int fd) {
  std::string line;
  char ch;
  while (read(fd, &ch, 1) == 1 && ch != '\n') line.push_back(ch);
  return line;
}

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run_cli_process(std::vector<std::string> args, const fs::path& scratch) {
  args.insert(args.begin(), CTF_CLI_PATH);
  const auto err_path = scratch / ("stderr_" + random_hex(4));
  Proc p = spawn(args, err_path);
  RunResult r;
  char buf[4096];
  for (ssize_t n; (n = read(p.out_fd, buf, sizeof buf)) > 0;) r.out.append(buf, static_cast<std::size_t>(n));
  close(p.out_fd);
  int status = 0;
  waitpid(p.pid, &status, 0);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::error_code ec;
  if (fs::exists(err_path)) r.err = read_file_text(err_path);
  fs::remove(err_path, ec);
  return r;
}

struct Server {
  Proc proc;
  int port = 0;
};

Server start_server(const fs::path& packs, const fs::path& state, std::size_t quota, const std::string& admin,
                    const fs::path& scratch) {
  Server s;
  s.proc = spawn({CTF_CLI_PATH, "serve", "--packs", packs.string(), "--state", state.string(), "--addr", "127.0.0.1:0",
                  "--quota", std::to_string(quota), "--admin-token", admin},
                 scratch / "serve.log");
  const std::string first = read_line(s.proc.out_fd);
  const auto colon = first.rfind(':');
  if (first.rfind("serving", 0) != 0 || colon == std::string::npos) throw std::runtime_error("serve did not start: " + first);
  s.port = std::stoi(first.substr(colon + 1));
  return s;
}

void kill_server(Server& s) {
  kill(s.proc.pid, SIGKILL);
  int status = 0;
  waitpid(s.proc.pid, &status, 0);
  close(s.proc.out_fd);
}

std::string http_get(int port, const std::string& path, const httplib::Headers& headers = {}) {
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get(path, headers);
  if (!res) throw std::runtime_error("GET " + path + " failed");
  return res->body;
}

/// Collected public bytes for the sequestration scan.
std::vector<std::pair<std::string, std::string>>& public_outputs() {
  static std::vector<std::pair<std::string, std::string>> v;
  return v;
}

/// Private directory of the served pack; empty until the end-to-end run.
fs::path& e2e_private_dir() {
  static fs::path p;
  return p;
}

Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  // Outlives this check so the sequestration scan can read the private pack.
  static TempDir tmp;
  Check c;
  const std::string admin = "acceptance-admin";
  const std::size_t quota = 2;
  const fs::path packs = tmp.path / "packs", state = tmp.path / "state";

  auto gen = run_cli_process({"generate", "--system", "lorenz", "--seed", "2024", "--out", (packs / "lorenz").string()}, tmp.path);
  c.expect(gen.code == 0, "generate exit " + std::to_string(gen.code) + ": " + gen.err);
  const auto manifest = manifest_from_json(nlohmann::json::parse(read_file_text(packs / "lorenz/public/manifest.json")));
  const std::string pack_id = manifest.pack_id;
  auto base = run_cli_process({"baseline", "--pack", (packs / "lorenz/public").string(), "--kind", "zeros", "--out",
                               (tmp.path / "zeros.npz").string()},
                              tmp.path);
  c.expect(base.code == 0, "baseline exit " + std::to_string(base.code));

  Server server = start_server(packs, state, quota, admin, tmp.path);
  const std::string url = "http://127.0.0.1:" + std::to_string(server.port);
  auto en = run_cli_process({"enroll", "--url", url, "--admin-token", admin, "--name", "team-zero", "--json"}, tmp.path);
  c.expect(en.code == 0, "enroll exit " + std::to_string(en.code) + ": " + en.err);
  const std::string token = en.code == 0 ? nlohmann::json::parse(en.out)["token"].get<std::string>() : "";

  auto submit = [&](int port) {
    return run_cli_process({"submit", "--url", "http://127.0.0.1:" + std::to_string(port), "--token", token, "--github",
                            "https://github.com/example/zeros", "--pack-id", pack_id, "--file",
                            (tmp.path / "zeros.npz").string(), "--json"},
                           tmp.path);
  };
  std::string submit_out;
  for (std::size_t i = 0; i < quota; ++i) {
    auto s = submit(server.port);
    c.expect(s.code == 0, "submit " + std::to_string(i + 1) + " exit " + std::to_string(s.code) + ": " + s.err);
    if (s.code == 0) {
      c.expect(profile_from_json(nlohmann::json::parse(s.out)).composite == 0.0, "zeros composite not 0");
      submit_out = s.out;
    }
  }
  const std::string board = http_get(server.port, "/api/v1/challenges/" + pack_id + "/leaderboard");
  const auto bj = nlohmann::json::parse(board);
  c.expect(bj["entries"].size() == 1 && bj["entries"][0]["best_composite"] == 0.0 &&
               bj["entries"][0]["display_name"] == "team-zero",
           "leaderboard does not show team-zero at composite 0: " + board.substr(0, 200));
  auto over = submit(server.port);
  c.expect(over.code == 4 && over.err.find("QuotaExceeded") != std::string::npos,
           "submission " + std::to_string(quota + 1) + " not rejected by quota (exit " + std::to_string(over.code) + ")");

  // Sequestration inputs: every public endpoint response.
  const std::string sid = "s000001";
  public_outputs().emplace_back("GET /challenges", http_get(server.port, "/api/v1/challenges"));
  public_outputs().emplace_back("GET /public", http_get(server.port, "/api/v1/challenges/" + pack_id + "/public"));
  public_outputs().emplace_back("GET /manifest", http_get(server.port, "/api/v1/challenges/" + pack_id + "/manifest"));
  public_outputs().emplace_back("GET /leaderboard", board);
  public_outputs().emplace_back("GET /submissions/" + sid,
                                http_get(server.port, "/api/v1/challenges/" + pack_id + "/submissions/" + sid,
                                         {{"Authorization", "Bearer " + token}}));
  public_outputs().emplace_back("POST /submissions", submit_out);
  e2e_private_dir() = packs / "lorenz/private";

  kill_server(server);
  Server restarted = start_server(packs, state, quota, admin, tmp.path);
  const std::string board2 = http_get(restarted.port, "/api/v1/challenges/" + pack_id + "/leaderboard");
  c.expect(board2 == board, "leaderboard JSON changed across kill and restart");
  auto after = submit(restarted.port);
  c.expect(after.code == 4, "quota not enforced after restart (exit " + std::to_string(after.code) + ")");
  kill_server(restarted);

  const double secs = Seconds(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 60.0, "runtime " + fmt(secs) + " s exceeds 60 s");
  return {c.pass, c.pass ? "generate, serve, enroll, submit zeros (composite 0), kill -9 and restart with identical "
                           "leaderboard, quota " + std::to_string(quota) + " enforced; " + fmt(secs) + " s"
                         : c.first_failure};
}

Outcome sequestration() {
  Check c;
  std::size_t scanned = 0;
  auto scan = [&](const std::unordered_set<std::uint64_t>& secret, const std::string& bytes, const std::string& what) {
    for (std::size_t i = 0; i + 8 <= bytes.size(); ++i) {
      std::uint64_t w;
      std::memcpy(&w, bytes.data() + i, 8);
      if (secret.count(w)) {
        c.expect(false, what + " contains a sequestered 8-byte pattern at offset " + std::to_string(i));
        return;
      }
    }
    scanned += bytes.size();
  };
  auto secrets_of = [](const ArrayArchive& priv) {
    std::unordered_set<std::uint64_t> s;
    for (const auto& [name, m] : priv.entries()) {
      for (double v : m.values()) s.insert(std::bit_cast<std::uint64_t>(v));
    }
    return s;
  };
  for (const auto& p : all_packs().packs) {
    const auto secret = secrets_of(p.sequestered.data);
    const Bytes npz = write_archive(p.public_part.data);
    scan(secret, std::string(npz.begin(), npz.end()), pack_label(p) + " public.npz");
    scan(secret, to_json(p.public_part.manifest).dump(2), pack_label(p) + " manifest.json");
  }
  if (!e2e_private_dir().empty()) {
    const auto priv = load_private(e2e_private_dir());
    const auto secret = secrets_of(priv.data);
    for (const auto& [what, body] : public_outputs()) scan(secret, body, "API " + what);
  } else {
    c.expect(false, "no API responses captured (end-to-end check did not run)");
  }
  return {c.pass, c.pass ? "18 packs and " + std::to_string(public_outputs().size()) + " API responses, " +
                               std::to_string(scanned) + " bytes scanned, no truth patterns"
                         : c.first_failure};
}

}  // namespace
}  // namespace ctf

int main() {
  using namespace ctf;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"Zeros calibration", zeros_calibration},
      {"Truth calibration", truth_calibration},
      {"Scale law", scale_law},
      {"Scoring oracle equivalence", oracle_equivalence},
      {"Integrator physics", integrator_physics},
      {"Format", npy_format},
      {"End-to-end", end_to_end},
      {"Sequestration scan", sequestration},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all primary criteria passed" : std::to_string(failures) + " criterion(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
