#pragma once

// HTTP front end for the referee.
//
//   GET  /api/v1/challenges                                  [{pack_id, system, manifest}]
//   GET  /api/v1/challenges/{pack_id}/public                 public.npz bytes
//   GET  /api/v1/challenges/{pack_id}/manifest               manifest.json
//   GET  /api/v1/challenges/{pack_id}/leaderboard            {pack_id, entries[]}
//   POST /api/v1/challenges/{pack_id}/submissions            NPZ body; Authorization: Bearer, X-Github-Url
//   GET  /api/v1/challenges/{pack_id}/submissions/{id}       own team or admin
//   POST /api/v1/teams                                       admin; {"display_name"} -> {team_id, token}
//
// Errors are {"code", "detail"} plus "violations" for ValidationFailed.

#include <atomic>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "ctf/referee.hpp"

namespace ctf {

constexpr int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::Unauthorized: return 401;
    case Errc::UnknownPack:
    case Errc::NotFound: return 404;
    case Errc::DuplicateName: return 409;
    case Errc::PayloadTooLarge: return 413;
    case Errc::ValidationFailed: return 422;
    case Errc::QuotaExceeded: return 429;
    case Errc::SchemaMismatch:
    case Errc::ConfigInvalid: return 400;
    default: return 500;
  }
}

inline nlohmann::json error_json(const Error& e) {
  nlohmann::json j = {{"code", errc_name(e.code())}, {"detail", e.detail()}};
  if (const auto* rej = dynamic_cast<const SubmissionRejected*>(&e)) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& x : rej->violations()) {
      v.push_back({{"kind", violation_kind_name(x.kind)}, {"name", x.name}, {"detail", x.detail}});
    }
    j["violations"] = v;
  }
  return j;
}

/// Bearer token from the Authorization header, or empty.
inline std::string bearer_token(const httplib::Request& req) {
  const std::string h = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (h.size() <= kPrefix.size() || h.compare(0, kPrefix.size(), kPrefix) != 0) return {};
  return h.substr(kPrefix.size());
}

class RefereeServer {
 public:
  explicit RefereeServer(Referee& referee) : referee_(referee) {
    server_.set_payload_max_length(referee_.config().payload_cap);
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const Errc code = res.status == 413 ? Errc::PayloadTooLarge : Errc::NotFound;
      const std::string detail = res.status == 413 ? "request body exceeds the payload cap" : "no such endpoint";
      res.set_content(error_json(Error(code, detail)).dump(), "application/json");
    });
    routes();
  }

  RefereeServer(const RefereeServer&) = delete;
  RefereeServer& operator=(const RefereeServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw Error(Errc::IoError, "cannot bind " + host + ":" + std::to_string(port));
    return port_;
  }

  /// Serves until stop(); call after bind().
  void run() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  int port() const noexcept { return port_; }

 private:
  template <class Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      res.status = http_status(e.code());
      res.set_content(error_json(e).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(nlohmann::json{{"code", "InternalError"}, {"detail", e.what()}}.dump(), "application/json");
    }
  }

  static void send_json(httplib::Response& res, const nlohmann::json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  void routes() {
    server_.Get("/api/v1/challenges", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, referee_.challenges_json()); });
    });
    server_.Get(R"(/api/v1/challenges/([^/]+)/public)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto& p = referee_.pack(req.matches[1].str());
        res.set_content(std::string(p.public_npz.begin(), p.public_npz.end()), "application/octet-stream");
        res.set_header("Content-Disposition", "attachment; filename=\"public.npz\"");
      });
    });
    server_.Get(R"(/api/v1/challenges/([^/]+)/manifest)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { res.set_content(referee_.pack(req.matches[1].str()).manifest_text, "application/json"); });
    });
    server_.Get(R"(/api/v1/challenges/([^/]+)/leaderboard)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, referee_.leaderboard_json(req.matches[1].str())); });
    });
    server_.Post(R"(/api/v1/challenges/([^/]+)/submissions)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string token = bearer_token(req);
        if (token.empty()) throw Error(Errc::Unauthorized, "missing bearer token");
        const auto& body = req.body;
        const auto rec = referee_.submit(req.matches[1].str(), token, req.get_header_value("X-Github-Url"),
                                         std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
        nlohmann::json j = to_json(rec.profile);
        j["submission_id"] = rec.submission_id;
        j["received_at"] = iso8601_utc(rec.received_at);
        send_json(res, j);
      });
    });
    server_.Get(R"(/api/v1/challenges/([^/]+)/submissions/([^/]+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    const std::string token = bearer_token(req);
                    if (token.empty()) throw Error(Errc::Unauthorized, "missing bearer token");
                    send_json(res, to_json(referee_.submission(req.matches[1].str(), req.matches[2].str(), token)));
                  });
                });
    server_.Post("/api/v1/teams", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string name;
        try {
          name = nlohmann::json::parse(req.body).at("display_name").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          throw Error(Errc::SchemaMismatch, std::string("expected {\"display_name\": string}: ") + e.what());
        }
        const auto r = referee_.enroll(bearer_token(req), name);
        send_json(res, {{"team_id", r.team_id}, {"display_name", r.display_name}, {"token", r.token}}, 201);
      });
    });
  }

  Referee& referee_;
  httplib::Server server_;
  int port_ = -1;
};

}  // namespace ctf
