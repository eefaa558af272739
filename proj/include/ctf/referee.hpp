#pragma once

// Sequestered-test-set referee: enrolled teams, submission scoring, quotas,
// and a leaderboard rebuilt from an append-only journal.
//
// State directory layout:
//   journal.jsonl        one JSON record per line, fsync'd before acknowledging
//   blobs/<sha256>.npz   submitted bundles, content-addressed
//
// Packs directory layout: <packs>/<any>/public/ and <packs>/<any>/private/
// as written by write_pack; the pack id comes from the manifest.

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "ctf/challenge.hpp"
#include "ctf/crypto.hpp"
#include "ctf/error.hpp"
#include "ctf/io.hpp"
#include "ctf/npy.hpp"
#include "ctf/scoring.hpp"

namespace ctf {

// ---------------------------------------------------------------------------
// Time

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

inline std::int64_t utc_day(std::int64_t ms) {
  constexpr std::int64_t kDay = 86'400'000;
  return ms >= 0 ? ms / kDay : (ms - kDay + 1) / kDay;
}

inline std::string iso8601_utc(std::int64_t ms) {
  const std::int64_t day = utc_day(ms);
  const std::int64_t within = ms - day * 86'400'000;
  std::time_t secs = static_cast<std::time_t>(day * 86'400 + within / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(within % 1000));
  return buf;
}

// ---------------------------------------------------------------------------
// Configuration

struct RefereeConfig {
  std::string listen = "127.0.0.1:8080";
  std::filesystem::path state_dir = "state";
  std::filesystem::path packs_dir = "packs";
  std::optional<std::size_t> quota = 5;  // submissions per team per UTC day; nullopt = unlimited
  std::size_t payload_cap = std::size_t{256} << 20;
  std::string admin_token;
  std::size_t scoring_workers = 2;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Optional JSON config file, then CTF_* environment overrides.
inline RefereeConfig load_referee_config(const std::optional<std::filesystem::path>& file,
                                         const EnvLookup& env = [](const char* k) { return std::getenv(k); }) {
  RefereeConfig c;
  auto parse_quota = [](const std::string& s) -> std::optional<std::size_t> {
    if (s == "unlimited" || s == "none") return std::nullopt;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  };
  try {
    if (file) {
      const auto j = nlohmann::json::parse(read_file_text(*file));
      if (j.contains("listen")) c.listen = j["listen"].get<std::string>();
      if (j.contains("state_dir")) c.state_dir = j["state_dir"].get<std::string>();
      if (j.contains("packs_dir")) c.packs_dir = j["packs_dir"].get<std::string>();
      if (j.contains("quota")) c.quota = j["quota"].is_null() ? std::nullopt : std::optional(j["quota"].get<std::size_t>());
      if (j.contains("payload_cap_bytes")) c.payload_cap = j["payload_cap_bytes"].get<std::size_t>();
      if (j.contains("admin_token")) c.admin_token = j["admin_token"].get<std::string>();
      if (j.contains("scoring_workers")) c.scoring_workers = j["scoring_workers"].get<std::size_t>();
    }
    if (const char* v = env("CTF_LISTEN")) c.listen = v;
    if (const char* v = env("CTF_STATE_DIR")) c.state_dir = v;
    if (const char* v = env("CTF_PACKS_DIR")) c.packs_dir = v;
    if (const char* v = env("CTF_QUOTA")) c.quota = parse_quota(v);
    if (const char* v = env("CTF_PAYLOAD_CAP")) c.payload_cap = std::stoull(v);
    if (const char* v = env("CTF_ADMIN_TOKEN")) c.admin_token = v;
    if (const char* v = env("CTF_SCORING_WORKERS")) c.scoring_workers = std::stoull(v);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigInvalid, std::string("referee config: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(Errc::ConfigInvalid, std::string("referee config value: ") + e.what());
  }
  if (c.scoring_workers == 0) throw Error(Errc::ConfigInvalid, "scoring_workers must be positive");
  return c;
}

/// "host:port" with a numeric port; port 0 asks the OS for a free one.
inline std::pair<std::string, int> parse_listen_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) throw Error(Errc::ConfigInvalid, "listen address must be host:port");
  const std::string port = addr.substr(colon + 1);
  if (port.empty() || port.size() > 5 || !std::all_of(port.begin(), port.end(), ::isdigit) || std::stoi(port) > 65535) {
    throw Error(Errc::ConfigInvalid, "bad port in '" + addr + "'");
  }
  return {addr.substr(0, colon), std::stoi(port)};
}

// ---------------------------------------------------------------------------
// Domain records

/// ValidationFailed carrying the individual violations.
class SubmissionRejected : public Error {
 public:
  SubmissionRejected(std::string detail, std::vector<Violation> violations)
      : Error(Errc::ValidationFailed, std::move(detail)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct Team {
  std::string team_id;
  std::string display_name;
  std::string token_salt;
  std::string token_hash;  // sha256(salt + secret)
  std::int64_t enrolled_at = 0;
};

struct EnrollResult {
  std::string team_id;
  std::string display_name;
  std::string token;  // "<team_id>.<secret>", returned once
};

struct SubmissionRecord {
  std::uint64_t seq = 0;
  std::string submission_id;
  std::string team_id;
  std::string pack_id;
  std::string github_url;
  std::int64_t received_at = 0;
  ScoreProfile profile;
  std::string bundle_digest;
};

struct LeaderboardEntry {
  std::string team_id;
  std::string display_name;
  double best_composite = 0;
  ScoreProfile best_profile;
  std::string best_submission_id;
  std::int64_t best_at = 0;
  std::uint64_t best_seq = 0;
  std::size_t submission_count = 0;
  std::int64_t latest_at = 0;
};

inline nlohmann::json to_json(const SubmissionRecord& r) {
  return {{"submission_id", r.submission_id},
          {"team_id", r.team_id},
          {"pack_id", r.pack_id},
          {"github_url", r.github_url},
          {"received_at", iso8601_utc(r.received_at)},
          {"received_at_ms", r.received_at},
          {"profile", to_json(r.profile)},
          {"radar", radar_export(r.profile)},
          {"bundle_digest", r.bundle_digest}};
}

inline nlohmann::json to_json(const LeaderboardEntry& e, std::size_t rank) {
  return {{"rank", rank},
          {"team_id", e.team_id},
          {"display_name", e.display_name},
          {"best_composite", e.best_composite},
          {"best_profile", to_json(e.best_profile)},
          {"best_submission_id", e.best_submission_id},
          {"best_at", iso8601_utc(e.best_at)},
          {"submission_count", e.submission_count},
          {"latest_at", iso8601_utc(e.latest_at)},
          {"radar", radar_export(e.best_profile)}};
}

inline bool is_valid_url(const std::string& url) {
  static const std::regex kUrl(R"(^https?://[A-Za-z0-9]([A-Za-z0-9.\-]*[A-Za-z0-9])?(:[0-9]{1,5})?(/[^\s]*)?$)");
  return !url.empty() && url.size() <= 2048 && std::regex_match(url, kUrl);
}

/// Best composite per team; ties on composite go to the earlier best
/// submission, then to the lower journal sequence number.
inline std::vector<LeaderboardEntry> rank_leaderboard(std::span<const SubmissionRecord> subs,
                                                      const std::map<std::string, Team>& teams,
                                                      std::string_view pack_id) {
  std::map<std::string, LeaderboardEntry> by_team;
  for (const auto& s : subs) {
    if (s.pack_id != pack_id) continue;
    auto [it, fresh] = by_team.try_emplace(s.team_id);
    auto& e = it->second;
    if (fresh || s.profile.composite > e.best_composite) {
      e.team_id = s.team_id;
      e.best_composite = s.profile.composite;
      e.best_profile = s.profile;
      e.best_submission_id = s.submission_id;
      e.best_at = s.received_at;
      e.best_seq = s.seq;
    }
    ++e.submission_count;
    e.latest_at = std::max(e.latest_at, s.received_at);
  }
  std::vector<LeaderboardEntry> out;
  for (auto& [id, e] : by_team) {
    if (auto t = teams.find(id); t != teams.end()) e.display_name = t->second.display_name;
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.best_composite != b.best_composite) return a.best_composite > b.best_composite;
    if (a.best_at != b.best_at) return a.best_at < b.best_at;
    return a.best_seq < b.best_seq;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Packs

struct LoadedPack {
  PublicPack pub;
  SequesteredPack priv;
  ArrayArchive truths;  // X1test..X9test
  Bytes public_npz;
  std::string manifest_text;
};

inline LoadedPack load_pack_dir(const std::filesystem::path& dir) {
  LoadedPack p;
  p.pub = load_public(dir / "public");
  p.priv = load_private(dir / "private");
  p.truths = p.priv.truths();
  p.public_npz = read_file_bytes(dir / "public" / "public.npz");
  p.manifest_text = read_file_text(dir / "public" / "manifest.json");
  return p;
}

/// Every pack under `root` (or `root` itself if it is a pack directory).
inline std::map<std::string, LoadedPack> load_packs(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::map<std::string, LoadedPack> out;
  auto add = [&](const fs::path& dir) {
    LoadedPack p = load_pack_dir(dir);
    const std::string id = p.pub.manifest.pack_id;
    if (!out.emplace(id, std::move(p)).second) throw Error(Errc::ConfigInvalid, "duplicate pack id " + id);
  };
  if (!fs::is_directory(root)) throw Error(Errc::IoError, "packs directory " + root.string() + " not found");
  if (fs::exists(root / "public" / "manifest.json")) {
    add(root);
    return out;
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "public" / "manifest.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) add(d);
  return out;
}

// ---------------------------------------------------------------------------
// Durable files

namespace detail {

inline void write_all_fd(int fd, const void* data, std::size_t n, const std::string& what) {
  const auto* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::IoError, "write failed: " + what);
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

inline void fsync_path(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

/// Content-addressed write; existing blobs are left alone.
inline void write_blob(const std::filesystem::path& dir, const std::string& digest, std::span<const std::uint8_t> data) {
  const auto path = dir / (digest + ".npz");
  if (std::filesystem::exists(path)) return;
  const auto tmp = dir / (digest + ".npz." + random_hex(6) + ".tmp");  // unique per writer; rename is atomic
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw Error(Errc::IoError, "cannot create " + tmp.string());
  try {
    write_all_fd(fd, data.data(), data.size(), tmp.string());
    if (::fsync(fd) != 0) throw Error(Errc::IoError, "fsync failed: " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "rename " + tmp.string() + ": " + ec.message());
  fsync_path(dir);
}

}  // namespace detail

/// Append-only JSON-lines file; every append is flushed to disk before it returns.
class Journal {
 public:
  explicit Journal(std::filesystem::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd_ < 0) throw Error(Errc::IoError, "cannot open journal " + path_.string());
  }
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;
  ~Journal() {
    if (fd_ >= 0) ::close(fd_);
  }

  void append(const nlohmann::json& record) {
    const std::string line = record.dump() + "\n";
    detail::write_all_fd(fd_, line.data(), line.size(), path_.string());
    if (::fsync(fd_) != 0) throw Error(Errc::IoError, "fsync failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

// ---------------------------------------------------------------------------
// Recovery

struct RefereeState {
  std::map<std::string, Team> teams;  // by team_id
  std::vector<SubmissionRecord> submissions;
  std::uint64_t last_seq = 0;
};

namespace detail {

inline nlohmann::json enroll_record(const Team& t, std::uint64_t seq) {
  return {{"type", "enroll"},       {"seq", seq},
          {"team_id", t.team_id},   {"display_name", t.display_name},
          {"salt", t.token_salt},   {"token_hash", t.token_hash},
          {"at", t.enrolled_at}};
}

inline nlohmann::json submission_record(const SubmissionRecord& s) {
  return {{"type", "submission"},          {"seq", s.seq},
          {"submission_id", s.submission_id}, {"team_id", s.team_id},
          {"pack_id", s.pack_id},          {"github_url", s.github_url},
          {"received_at", s.received_at},  {"bundle_digest", s.bundle_digest},
          {"profile", to_json(s.profile)}};
}

inline void apply_record(RefereeState& st, const nlohmann::json& j) {
  const auto seq = j.at("seq").get<std::uint64_t>();
  if (seq != st.last_seq + 1) throw std::runtime_error("sequence " + std::to_string(seq) + " out of order");
  const auto type = j.at("type").get<std::string>();
  if (type == "enroll") {
    Team t{j.at("team_id").get<std::string>(), j.at("display_name").get<std::string>(),
           j.at("salt").get<std::string>(), j.at("token_hash").get<std::string>(), j.at("at").get<std::int64_t>()};
    if (st.teams.count(t.team_id)) throw std::runtime_error("team " + t.team_id + " enrolled twice");
    st.teams.emplace(t.team_id, std::move(t));
  } else if (type == "submission") {
    SubmissionRecord s;
    s.seq = seq;
    s.submission_id = j.at("submission_id").get<std::string>();
    s.team_id = j.at("team_id").get<std::string>();
    s.pack_id = j.at("pack_id").get<std::string>();
    s.github_url = j.at("github_url").get<std::string>();
    s.received_at = j.at("received_at").get<std::int64_t>();
    s.bundle_digest = j.at("bundle_digest").get<std::string>();
    s.profile = profile_from_json(j.at("profile"));
    if (!st.teams.count(s.team_id)) throw std::runtime_error("submission from unknown team " + s.team_id);
    st.submissions.push_back(std::move(s));
  } else {
    throw std::runtime_error("unknown record type '" + type + "'");
  }
  st.last_seq = seq;
}

}  // namespace detail

/// Replays journal.jsonl. A final line without its newline that does not
/// parse is a torn write: it is dropped, the file is truncated to the last
/// complete record, and a warning is returned. Any other damage is
/// CorruptJournal.
inline RefereeState recover(const std::filesystem::path& state_dir, std::vector<std::string>* warnings = nullptr) {
  namespace fs = std::filesystem;
  RefereeState st;
  const auto path = state_dir / "journal.jsonl";
  if (!fs::exists(path)) return st;
  const std::string text = read_file_text(path);
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = text.substr(pos, complete ? nl - pos : std::string::npos);
    try {
      detail::apply_record(st, nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      if (!complete) {
        const std::string msg = "journal line " + std::to_string(line_no) + " is incomplete (" +
                                std::to_string(line.size()) + " bytes); discarded";
        if (warnings) warnings->push_back(msg);
        std::cerr << "warning: " << msg << "\n";
        fs::resize_file(path, pos);
        break;
      }
      throw Error(Errc::CorruptJournal, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!complete) {
      // Parsed record missing only its newline: restore the line boundary.
      std::ofstream(path, std::ios::app | std::ios::binary) << '\n';
      break;
    }
    pos = nl + 1;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Service

class Referee {
 public:
  Referee(RefereeConfig cfg, std::map<std::string, LoadedPack> packs, Clock clock = system_clock_ms)
      : cfg_(std::move(cfg)), packs_(std::move(packs)), clock_(std::move(clock)),
        scoring_slots_(static_cast<std::ptrdiff_t>(std::min<std::size_t>(cfg_.scoring_workers, 64))) {
    std::filesystem::create_directories(cfg_.state_dir / "blobs");
    state_ = recover(cfg_.state_dir, &warnings_);
    journal_ = std::make_unique<Journal>(cfg_.state_dir / "journal.jsonl");
  }

  explicit Referee(RefereeConfig cfg, Clock clock = system_clock_ms)
      : Referee(cfg, load_packs(cfg.packs_dir), std::move(clock)) {}

  const RefereeConfig& config() const noexcept { return cfg_; }
  const std::vector<std::string>& recovery_warnings() const noexcept { return warnings_; }

  const LoadedPack& pack(std::string_view pack_id) const {
    auto it = packs_.find(std::string(pack_id));
    if (it == packs_.end()) throw Error(Errc::UnknownPack, "no challenge '" + std::string(pack_id) + "'");
    return it->second;
  }

  std::vector<std::string> pack_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, p] : packs_) ids.push_back(id);
    return ids;
  }

  nlohmann::json challenges_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [id, p] : packs_) {
      out.push_back({{"pack_id", id}, {"system", system_name(p.pub.manifest.system)}, {"manifest", to_json(p.pub.manifest)}});
    }
    return out;
  }

  EnrollResult enroll(std::string_view admin_token, const std::string& display_name) {
    require_admin(admin_token);
    if (display_name.empty() || display_name.size() > 64) {
      throw Error(Errc::ValidationFailed, "display_name must be 1 to 64 characters");
    }
    std::unique_lock lock(mutex_);
    for (const auto& [id, t] : state_.teams) {
      if (t.display_name == display_name) throw Error(Errc::DuplicateName, "team name '" + display_name + "' is taken");
    }
    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "t%04zu", state_.teams.size() + 1);
    Team t;
    t.team_id = id_buf;
    t.display_name = display_name;
    t.token_salt = random_hex(16);
    const std::string secret = random_hex(24);
    t.token_hash = sha256_hex(t.token_salt + secret);
    t.enrolled_at = clock_();
    journal_->append(detail::enroll_record(t, state_.last_seq + 1));
    ++state_.last_seq;
    state_.teams.emplace(t.team_id, t);
    return {t.team_id, t.display_name, t.team_id + "." + secret};
  }

  /// Authenticates, validates, scores, and journals one submission.
  SubmissionRecord submit(std::string_view pack_id, std::string_view token, const std::string& github_url,
                          std::span<const std::uint8_t> payload) {
    const std::int64_t now = clock_();
    const std::string team_id = authenticate(token);
    const LoadedPack& p = pack(pack_id);
    if (payload.size() > cfg_.payload_cap) {
      throw Error(Errc::PayloadTooLarge, std::to_string(payload.size()) + " bytes exceeds the cap of " +
                                             std::to_string(cfg_.payload_cap));
    }
    if (!is_valid_url(github_url)) {
      throw SubmissionRejected("a repository URL (http or https) is required", {});
    }
    {
      std::shared_lock lock(mutex_);
      check_quota(team_id, now);
    }
    ArrayArchive bundle;
    try {
      bundle = read_archive(payload);
    } catch (const Error& e) {
      throw SubmissionRejected(std::string("unreadable bundle: ") + e.what(), {});
    }
    auto violations = validate_submission(p.pub.manifest, bundle);
    if (!violations.empty()) {
      std::string detail = std::to_string(violations.size()) + " violation(s): ";
      for (std::size_t i = 0; i < violations.size(); ++i) detail += (i ? "; " : "") + to_string(violations[i]);
      throw SubmissionRejected(detail, std::move(violations));
    }
    const ScoreProfile profile = score_bounded(p, bundle);
    const std::string digest = sha256_hex(payload);
    detail::write_blob(cfg_.state_dir / "blobs", digest, payload);

    std::unique_lock lock(mutex_);
    check_quota(team_id, now);  // a concurrent submission may have used the last slot
    SubmissionRecord rec;
    rec.seq = state_.last_seq + 1;
    char id_buf[24];
    std::snprintf(id_buf, sizeof id_buf, "s%06zu", state_.submissions.size() + 1);
    rec.submission_id = id_buf;
    rec.team_id = team_id;
    rec.pack_id = std::string(pack_id);
    rec.github_url = github_url;
    rec.received_at = now;
    rec.profile = profile;
    rec.bundle_digest = digest;
    journal_->append(detail::submission_record(rec));
    state_.last_seq = rec.seq;
    state_.submissions.push_back(rec);
    return rec;
  }

  std::vector<LeaderboardEntry> leaderboard(std::string_view pack_id) const {
    pack(pack_id);
    std::shared_lock lock(mutex_);
    return rank_leaderboard(state_.submissions, state_.teams, pack_id);
  }

  nlohmann::json leaderboard_json(std::string_view pack_id) const {
    const auto entries = leaderboard(pack_id);
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) arr.push_back(to_json(entries[i], i + 1));
    return {{"pack_id", pack_id}, {"entries", arr}};
  }

  /// Own-team token or the admin token.
  SubmissionRecord submission(std::string_view pack_id, std::string_view submission_id, std::string_view token) const {
    pack(pack_id);
    const bool admin = is_admin(token);
    const std::string team_id = admin ? std::string() : authenticate(token);
    std::shared_lock lock(mutex_);
    for (const auto& s : state_.submissions) {
      if (s.submission_id != submission_id || s.pack_id != pack_id) continue;
      if (!admin && s.team_id != team_id) throw Error(Errc::Unauthorized, "submission belongs to another team");
      return s;
    }
    throw Error(Errc::NotFound, "no submission '" + std::string(submission_id) + "'");
  }

  /// Scores the stored bundle of a journaled submission again.
  ScoreProfile rescore(std::string_view submission_id) const {
    SubmissionRecord rec;
    {
      std::shared_lock lock(mutex_);
      auto it = std::find_if(state_.submissions.begin(), state_.submissions.end(),
                             [&](const SubmissionRecord& s) { return s.submission_id == submission_id; });
      if (it == state_.submissions.end()) throw Error(Errc::NotFound, "no submission '" + std::string(submission_id) + "'");
      rec = *it;
    }
    const auto bytes = read_file_bytes(cfg_.state_dir / "blobs" / (rec.bundle_digest + ".npz"));
    if (sha256_hex(bytes) != rec.bundle_digest) throw Error(Errc::CorruptJournal, "blob digest mismatch");
    const auto& p = pack(rec.pack_id);
    return score_submission(p.truths, read_archive(bytes), p.priv.scoring);
  }

  std::vector<SubmissionRecord> submissions() const {
    std::shared_lock lock(mutex_);
    return state_.submissions;
  }

  std::map<std::string, Team> teams() const {
    std::shared_lock lock(mutex_);
    return state_.teams;
  }

 private:
  bool is_admin(std::string_view token) const {
    return !cfg_.admin_token.empty() && constant_time_equal(token, cfg_.admin_token);
  }

  void require_admin(std::string_view token) const {
    if (!is_admin(token)) throw Error(Errc::Unauthorized, "admin token required");
  }

  std::string authenticate(std::string_view token) const {
    const auto dot = token.find('.');
    if (dot == std::string_view::npos) throw Error(Errc::Unauthorized, "malformed token");
    const std::string team_id(token.substr(0, dot));
    std::shared_lock lock(mutex_);
    auto it = state_.teams.find(team_id);
    if (it == state_.teams.end() ||
        !constant_time_equal(sha256_hex(it->second.token_salt + std::string(token.substr(dot + 1))), it->second.token_hash)) {
      throw Error(Errc::Unauthorized, "invalid token");
    }
    return team_id;
  }

  void check_quota(const std::string& team_id, std::int64_t now) const {
    if (!cfg_.quota) return;
    const auto day = utc_day(now);
    const auto used = static_cast<std::size_t>(std::count_if(state_.submissions.begin(), state_.submissions.end(), [&](const SubmissionRecord& s) {
      return s.team_id == team_id && utc_day(s.received_at) == day;
    }));
    if (used >= *cfg_.quota) {
      throw Error(Errc::QuotaExceeded, "daily quota of " + std::to_string(*cfg_.quota) + " submissions reached");
    }
  }

  ScoreProfile score_bounded(const LoadedPack& p, const ArrayArchive& bundle) {
    scoring_slots_.acquire();
    try {
      auto profile = score_submission(p.truths, bundle, p.priv.scoring);
      scoring_slots_.release();
      return profile;
    } catch (...) {
      scoring_slots_.release();
      throw;
    }
  }

  RefereeConfig cfg_;
  std::map<std::string, LoadedPack> packs_;
  Clock clock_;
  std::counting_semaphore<64> scoring_slots_;
  mutable std::shared_mutex mutex_;
  RefereeState state_;
  std::unique_ptr<Journal> journal_;
  std::vector<std::string> warnings_;
};

}  // namespace ctf
