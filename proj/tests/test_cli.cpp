#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <thread>

#include "ctf/cli.hpp"

namespace ctf {
namespace {

namespace fs = std::filesystem;

const fs::path kGolden = fs::path(CTF_TEST_DATA_DIR) / "golden";

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ctf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path dir = fs::temp_directory_path() / ("ctf_cli_" + random_hex(6));
  Workspace() {
    fs::create_directories(dir);
    const auto r = run({"generate", "--system", "lorenz", "--seed", "3", "--out", (dir / "pack").string(), "--horizon",
                        "300"});
    EXPECT_EQ(r.code, 0) << r.err;
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string pub() const { return (dir / "pack" / "public").string(); }
  std::string priv() const { return (dir / "pack" / "private").string(); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

const Workspace& ws() {
  static const Workspace w;
  return w;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Cli, ZerosBaselineScoresZero) {
  auto b = run({"baseline", "--pack", ws().pub(), "--kind", "zeros", "--out", ws().file("zeros.npz")});
  ASSERT_EQ(b.code, 0) << b.err;
  auto s = run({"score", "--private", ws().priv(), "--submission", ws().file("zeros.npz")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(count(s.out, " 0.000000\n"), 13u);
  EXPECT_NE(s.out.find("E12       0.000000"), std::string::npos);
}

TEST(Cli, TruthFromPrivateDirScoresHundred) {
  auto s = run({"score", "--private", ws().priv(), "--submission", ws().priv() + "/truth.npz"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(count(s.out, "100.000000\n"), 13u);
}

TEST(Cli, JsonOutputMatchesGoldenFiles) {
  run({"baseline", "--pack", ws().pub(), "--kind", "zeros", "--out", ws().file("zeros.npz")});
  auto z = run({"score", "--private", ws().priv(), "--submission", ws().file("zeros.npz"), "--json"});
  EXPECT_EQ(z.out, read_file_text(kGolden / "score_zeros.json"));
  auto t = run({"score", "--private", ws().priv(), "--submission", ws().priv() + "/truth.npz", "--json"});
  EXPECT_EQ(t.out, read_file_text(kGolden / "score_truth.json"));
}

TEST(Cli, RadarExports) {
  const std::string profile = (kGolden / "score_truth.json").string();
  auto csv = run({"radar", "--profile", profile, "--out", ws().file("radar.csv")});
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(read_file_text(ws().file("radar.csv")), read_file_text(kGolden / "radar_truth.csv"));
  auto json = run({"radar", "--profile", profile, "--out", ws().file("radar.json")});
  ASSERT_EQ(json.code, 0);
  const auto j = nlohmann::json::parse(read_file_text(ws().file("radar.json")));
  EXPECT_EQ(j["axes"].size(), 12u);
  EXPECT_EQ(j["composite"], 100.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"score", "--private", ws().priv()}).code, kExitUsage);
  EXPECT_EQ(run({"generate", "--system", "pendulum3", "--seed", "1", "--out", ws().file("x")}).code, kExitUsage);
  EXPECT_EQ(run({"baseline", "--pack", ws().pub(), "--kind", "dmd", "--out", ws().file("x.npz")}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);

  // Validation: extra members in the full private archive.
  auto extra = run({"score", "--private", ws().priv(), "--submission", ws().priv() + "/private.npz"});
  EXPECT_EQ(extra.code, kExitValidation);
  EXPECT_NE(extra.err.find("ExtraOutput(\"X2train_clean\")"), std::string::npos);
  write_file_text(ws().file("junk.npz"), "not a zip");
  EXPECT_EQ(run({"score", "--private", ws().priv(), "--submission", ws().file("junk.npz")}).code, kExitValidation);

  // I/O.
  EXPECT_EQ(run({"score", "--private", ws().file("missing"), "--submission", ws().file("junk.npz")}).code, kExitIo);
  EXPECT_EQ(run({"score", "--private", ws().priv(), "--submission", ws().file("missing.npz")}).code, kExitIo);
  EXPECT_EQ(run({"baseline", "--pack", ws().file("missing"), "--kind", "zeros", "--out", ws().file("y.npz")}).code, kExitIo);

  // Network.
  EXPECT_EQ(run({"submit", "--url", "http://127.0.0.1:1", "--token", "t.x", "--github", "https://a.b/c", "--pack-id", "p",
                 "--file", ws().priv() + "/truth.npz"})
                .code,
            kExitNetwork);
}

TEST(Cli, RemoteSubmitMatchesLocalScore) {
  // In-process referee over the generated pack.
  RefereeConfig cfg;
  cfg.packs_dir = ws().dir / "pack";
  cfg.state_dir = ws().dir / "state";
  cfg.admin_token = "adm";
  Referee referee(cfg);
  RefereeServer server(referee);
  const int port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.run(); });
  server.wait_until_ready();
  const std::string url = "http://127.0.0.1:" + std::to_string(port);
  const std::string pack_id = referee.pack_ids().at(0);

  auto en = run({"enroll", "--url", url, "--admin-token", "adm", "--name", "team-a", "--json"});
  ASSERT_EQ(en.code, 0) << en.err;
  const std::string token = nlohmann::json::parse(en.out)["token"];
  EXPECT_EQ(run({"enroll", "--url", url, "--admin-token", "wrong", "--name", "team-b"}).code, kExitNetwork);

  run({"baseline", "--pack", ws().pub(), "--kind", "persistence", "--out", ws().file("persist.npz")});
  auto local = run({"score", "--private", ws().priv(), "--submission", ws().file("persist.npz"), "--json"});
  auto remote = run({"submit", "--url", url, "--token", token, "--github", "https://github.com/a/b", "--pack-id", pack_id,
                     "--file", ws().file("persist.npz"), "--json"});
  ASSERT_EQ(remote.code, 0) << remote.err;
  EXPECT_EQ(remote.out, local.out);

  auto bad = run({"submit", "--url", url, "--token", token + "0", "--github", "https://github.com/a/b", "--pack-id",
                  pack_id, "--file", ws().file("persist.npz")});
  EXPECT_EQ(bad.code, kExitNetwork);
  EXPECT_NE(bad.err.find("Unauthorized: invalid token"), std::string::npos);

  auto invalid = run({"submit", "--url", url, "--token", token, "--github", "https://github.com/a/b", "--pack-id", pack_id,
                      "--file", ws().priv() + "/private.npz"});
  EXPECT_EQ(invalid.code, kExitValidation);
  EXPECT_NE(invalid.err.find("ExtraOutput(\"X5train_noise\")"), std::string::npos);

  server.stop();
  t.join();
}

}  // namespace
}  // namespace ctf
