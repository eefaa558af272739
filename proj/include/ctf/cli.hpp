#pragma once

// Command-line driver. Exit codes: 0 ok, 1 usage, 2 validation, 3 I/O,
// 4 network/auth. Results go to `out`, diagnostics to `err`.

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include "ctf/baselines.hpp"
#include "ctf/challenge.hpp"
#include "ctf/referee_http.hpp"

namespace ctf {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitIo = 3, kExitNetwork = 4 };

constexpr int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::ConfigInvalid: return kExitUsage;
    case Errc::IoError:
    case Errc::SchemaMismatch:
    case Errc::CorruptJournal: return kExitIo;
    case Errc::Unauthorized:
    case Errc::QuotaExceeded:
    case Errc::UnknownPack:
    case Errc::NotFound: return kExitNetwork;
    default: return kExitValidation;
  }
}

namespace cli_detail {

inline void print_profile(std::ostream& out, const ScoreProfile& p, bool json) {
  if (json) {
    out << to_json(p).dump(2) << "\n";
    return;
  }
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < kScoreCount; ++i) out << std::left << std::setw(10) << axis_label(i) << p.e[i] << "\n";
  out << std::left << std::setw(10) << "composite" << p.composite << "\n";
  out.flags(flags);
}

inline void print_violations(std::ostream& err, const std::vector<Violation>& v) {
  for (const auto& x : v) err << "  " << to_string(x) << "\n";
}

inline ArrayArchive read_bundle(const std::string& path) {
  const Bytes bytes = read_file_bytes(path);  // IoError -> exit 3
  return read_archive(bytes);                 // format errors -> exit 2
}

inline std::string trim_slash(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

/// Server error body -> diagnostic and exit code.
inline int report_http_error(std::ostream& err, const httplib::Result& res) {
  if (!res) {
    err << "error: request failed: " << httplib::to_string(res.error()) << "\n";
    return kExitNetwork;
  }
  std::string code = "HTTP " + std::to_string(res->status), detail = res->body;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
    code = j.value("code", code);
    detail = j.value("detail", detail);
  } catch (const nlohmann::json::exception&) {
  }
  err << "error: " << code << ": " << detail << "\n";
  if (j.is_object() && j.contains("violations")) {
    for (const auto& v : j["violations"]) {
      err << "  " << v.value("kind", "") << "(\"" << v.value("name", "") << "\")";
      if (!v.value("detail", "").empty()) err << ": " << v.value("detail", "");
      err << "\n";
    }
  }
  return res->status == 422 || res->status == 413 ? kExitValidation : kExitNetwork;
}

/// Blocks SIGINT/SIGTERM for this and later threads; a helper thread waits
/// for either and calls `on_signal` once.
class SignalWaiter {
 public:
  explicit SignalWaiter(std::function<void()> on_signal) {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    thread_ = std::thread([this, fn = std::move(on_signal)] {
      const timespec tick{0, 100'000'000};
      while (!done_) {
        if (sigtimedwait(&set_, nullptr, &tick) > 0) {
          fn();
          return;
        }
      }
    });
  }
  ~SignalWaiter() {
    done_ = true;
    thread_.join();
  }

 private:
  sigset_t set_{};
  std::atomic<bool> done_{false};
  std::thread thread_;
};

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Dynamical-systems challenge packs, scoring and referee service", "ctf"};
  app.require_subcommand(1, 1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a challenge pack (public/ and private/ directories)");
  std::string gen_system, gen_out;
  std::uint64_t gen_seed = 0;
  std::size_t gen_horizon = 0;
  gen->add_option("--system", gen_system, "lorenz | rossler | double-pendulum | lorenz96 | ks | burgers")->required();
  gen->add_option("--seed", gen_seed, "Pack seed")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--horizon", gen_horizon, "Override the test length T (samples)");

  // baseline
  auto* base = app.add_subcommand("baseline", "Build a reference submission from a public pack");
  std::string base_pack, base_kind, base_out;
  base->add_option("--pack", base_pack, "Public pack directory")->required();
  base->add_option("--kind", base_kind, "zeros | persistence | climatology")->required();
  base->add_option("--out", base_out, "Output .npz")->required();

  // score
  auto* score = app.add_subcommand("score", "Score a submission against a private pack");
  std::string score_private, score_submission_path;
  bool score_json = false;
  score->add_option("--private", score_private, "Private pack directory")->required();
  score->add_option("--submission", score_submission_path, "Submission .npz")->required();
  score->add_flag("--json", score_json, "Print the profile as JSON");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the referee service");
  std::string serve_packs, serve_state, serve_addr, serve_quota, serve_config, serve_admin;
  std::size_t serve_cap = 0;
  serve->add_option("--packs", serve_packs, "Directory of packs");
  serve->add_option("--state", serve_state, "State directory (journal and blobs)");
  serve->add_option("--addr", serve_addr, "Listen address host:port");
  serve->add_option("--quota", serve_quota, "Submissions per team per UTC day, or 'unlimited'");
  serve->add_option("--payload-cap", serve_cap, "Maximum submission size in bytes");
  serve->add_option("--admin-token", serve_admin, "Admin token (default: CTF_ADMIN_TOKEN or generated)");
  serve->add_option("--config", serve_config, "JSON config file");

  // submit
  auto* submit = app.add_subcommand("submit", "Submit a bundle to a referee");
  std::string sub_url, sub_token, sub_github, sub_pack, sub_file;
  bool sub_json = false;
  submit->add_option("--url", sub_url, "Referee base URL")->required();
  submit->add_option("--token", sub_token, "Team token")->required();
  submit->add_option("--github", sub_github, "Repository URL of the method")->required();
  submit->add_option("--pack-id", sub_pack, "Challenge id")->required();
  submit->add_option("--file", sub_file, "Submission .npz")->required();
  submit->add_flag("--json", sub_json, "Print the returned profile as JSON");

  // enroll
  auto* enroll = app.add_subcommand("enroll", "Enroll a team (admin)");
  std::string en_url, en_admin, en_name;
  bool en_json = false;
  enroll->add_option("--url", en_url, "Referee base URL")->required();
  enroll->add_option("--admin-token", en_admin, "Admin token (default: CTF_ADMIN_TOKEN)");
  enroll->add_option("--name", en_name, "Team display name")->required();
  enroll->add_flag("--json", en_json, "Print the result as JSON");

  // radar
  auto* radar = app.add_subcommand("radar", "Export radar data from a profile JSON");
  std::string radar_profile, radar_out;
  radar->add_option("--profile", radar_profile, "Profile JSON (from score --json or submit --json)")->required();
  radar->add_option("--out", radar_out, "Output file; .csv writes CSV, anything else JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  using namespace cli_detail;
  try {
    if (*gen) {
      const SystemId id = parse_system(gen_system);
      auto cfg = default_generation_config(id);
      if (gen_horizon) {
        cfg.horizon = gen_horizon;
        cfg.limited_length = std::max<std::size_t>(1, gen_horizon / 10);
      }
      const auto pack = generate_pack(gen_seed, cfg);
      const std::filesystem::path dir(gen_out);
      write_pack(pack, dir / "public", dir / "private");
      out << "pack " << pack.public_part.manifest.pack_id << " written to " << dir.string() << "\n";
      return kExitOk;
    }

    if (*base) {
      const auto kind = parse_baseline(base_kind);
      const auto bundle = make_baseline(kind, load_public(base_pack));
      write_file_bytes(base_out, write_archive(bundle));
      out << baseline_name(kind) << " baseline written to " << base_out << "\n";
      return kExitOk;
    }

    if (*score) {
      const auto priv = load_private(score_private);
      ArrayArchive bundle;
      try {
        bundle = read_bundle(score_submission_path);
      } catch (const Error& e) {
        if (e.code() == Errc::IoError) throw;
        err << "error: unreadable submission: " << e.what() << "\n";
        return kExitValidation;
      }
      const auto violations = validate_submission(priv.output_specs(), bundle);
      if (!violations.empty()) {
        err << "error: submission failed validation (" << violations.size() << " violation(s))\n";
        print_violations(err, violations);
        return kExitValidation;
      }
      print_profile(out, score_submission(priv.truths(), bundle, priv.scoring), score_json);
      return kExitOk;
    }

    if (*serve) {
      auto cfg = load_referee_config(serve_config.empty() ? std::nullopt : std::optional<std::filesystem::path>(serve_config));
      if (!serve_packs.empty()) cfg.packs_dir = serve_packs;
      if (!serve_state.empty()) cfg.state_dir = serve_state;
      if (!serve_addr.empty()) cfg.listen = serve_addr;
      if (!serve_quota.empty()) {
        cfg.quota = load_referee_config(std::nullopt, [&](const char* k) -> const char* {
                      return std::string_view(k) == "CTF_QUOTA" ? serve_quota.c_str() : nullptr;
                    }).quota;
      }
      if (serve_cap) cfg.payload_cap = serve_cap;
      if (!serve_admin.empty()) cfg.admin_token = serve_admin;
      std::filesystem::create_directories(cfg.state_dir);
      if (cfg.admin_token.empty()) {
        cfg.admin_token = random_hex(24);
        const auto path = cfg.state_dir / "admin_token";
        write_file_text(path, cfg.admin_token + "\n");
        std::filesystem::permissions(path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
        err << "admin token written to " << path.string() << "\n";
      }
      const auto [host, port] = parse_listen_address(cfg.listen);

      Referee referee(cfg);
      RefereeServer server(referee);
      SignalWaiter waiter([&] { server.stop(); });  // before the server spawns worker threads
      const int bound = server.bind(host, port);
      out << "serving " << referee.pack_ids().size() << " challenge(s) on http://" << host << ":" << bound << "\n";
      for (const auto& id : referee.pack_ids()) out << "  " << id << "\n";
      out.flush();
      server.run();
      err << "referee stopped\n";
      return kExitOk;
    }

    if (*submit) {
      const Bytes body = read_file_bytes(sub_file);
      httplib::Client client(trim_slash(sub_url));
      client.set_connection_timeout(10);
      client.set_read_timeout(600);
      client.set_write_timeout(600);
      httplib::Headers headers = {{"Authorization", "Bearer " + sub_token}, {"X-Github-Url", sub_github}};
      auto res = client.Post("/api/v1/challenges/" + sub_pack + "/submissions", headers,
                             std::string(body.begin(), body.end()), "application/octet-stream");
      if (!res || res->status != 200) return report_http_error(err, res);
      const auto j = nlohmann::json::parse(res->body);
      if (!sub_json) out << "submission " << j.value("submission_id", "?") << "\n";
      print_profile(out, profile_from_json(j), sub_json);
      return kExitOk;
    }

    if (*enroll) {
      if (en_admin.empty()) {
        if (const char* v = std::getenv("CTF_ADMIN_TOKEN")) en_admin = v;
      }
      httplib::Client client(trim_slash(en_url));
      client.set_connection_timeout(10);
      auto res = client.Post("/api/v1/teams", {{"Authorization", "Bearer " + en_admin}},
                             nlohmann::json{{"display_name", en_name}}.dump(), "application/json");
      if (!res || res->status != 201) return report_http_error(err, res);
      const auto j = nlohmann::json::parse(res->body);
      if (en_json) {
        out << j.dump(2) << "\n";
      } else {
        out << "team_id " << j.at("team_id").get<std::string>() << "\n"
            << "token " << j.at("token").get<std::string>() << "\n";
      }
      return kExitOk;
    }

    if (*radar) {
      nlohmann::json pj;
      try {
        pj = nlohmann::json::parse(read_file_text(radar_profile));
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::SchemaMismatch, radar_profile + ": " + e.what());
      }
      const auto profile = profile_from_json(pj);
      const bool csv = std::filesystem::path(radar_out).extension() == ".csv";
      write_file_text(radar_out, csv ? radar_csv(profile) : radar_export(profile).dump(2) + "\n");
      out << "radar " << (csv ? "csv" : "json") << " written to " << radar_out << "\n";
      return kExitOk;
    }
  } catch (const SubmissionRejected& e) {
    err << "error: " << e.what() << "\n";
    print_violations(err, e.violations());
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed response: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace ctf
