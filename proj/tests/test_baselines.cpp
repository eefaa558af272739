#include <gtest/gtest.h>

#include <cmath>

#include "ctf/baselines.hpp"

namespace ctf {
namespace {

const ChallengePack& lorenz_pack() {
  static const ChallengePack pack = generate_pack(SystemId::Lorenz, 11);
  return pack;
}

ChallengePack short_pack(SystemId id, std::uint64_t seed) {
  auto cfg = default_generation_config(id);
  cfg.horizon = 200;
  cfg.limited_length = 20;
  return generate_pack(seed, cfg);
}

ScoreProfile score(const ChallengePack& pack, const ArrayArchive& bundle) {
  return score_submission(pack.sequestered.truths(), bundle, pack.sequestered.scoring);
}

TEST(Baselines, NamesRoundTrip) {
  for (auto k : {BaselineKind::Zeros, BaselineKind::Persistence, BaselineKind::Climatology}) {
    EXPECT_EQ(parse_baseline(baseline_name(k)), k);
  }
  EXPECT_THROW(parse_baseline("dmd"), Error);
}

TEST(Baselines, ZerosScoreExactlyZeroOnEverySystem) {
  for (SystemId id : kAllSystems) {
    const auto pack = short_pack(id, 2);
    const auto bundle = make_baseline(BaselineKind::Zeros, pack.public_part);
    EXPECT_TRUE(validate_submission(pack.public_part.manifest, bundle).empty());
    const auto p = score(pack, bundle);
    for (double e : p.e) EXPECT_EQ(e, 0.0) << system_name(id);
    EXPECT_EQ(p.composite, 0.0);
  }
}

TEST(Baselines, EveryKindValidates) {
  for (SystemId id : kAllSystems) {
    const auto pack = short_pack(id, 4);
    for (auto k : {BaselineKind::Zeros, BaselineKind::Persistence, BaselineKind::Climatology}) {
      const auto bundle = make_baseline(k, pack.public_part);
      EXPECT_TRUE(validate_submission(pack.public_part.manifest, bundle).empty()) << system_name(id);
      EXPECT_NO_THROW(score(pack, bundle));
    }
  }
}

TEST(Baselines, PersistenceRepeatsLastColumn) {
  const auto& pub = lorenz_pack().public_part;
  const auto bundle = make_baseline(BaselineKind::Persistence, pub);
  const auto last = pub.data.at("X1train").column(1999);
  const auto& x1 = bundle.at("X1test");
  ASSERT_EQ(shape_of(x1), (Shape{3, 2000}));
  for (std::size_t c = 0; c < x1.cols(); ++c) {
    for (std::size_t r = 0; r < 3; ++r) ASSERT_EQ(x1(r, c), last[r]);
  }
  const auto burn_last = pub.data.at("X10train").column(49);
  EXPECT_EQ(bundle.at("X9test").column(1234), burn_last);
  EXPECT_EQ(bundle.at("X2test"), pub.data.at("X2train"));
  EXPECT_EQ(bundle.at("X4test"), pub.data.at("X3train"));
}

TEST(Baselines, ClimatologyRepeatsColumnMean) {
  const auto& pub = lorenz_pack().public_part;
  const auto bundle = make_baseline(BaselineKind::Climatology, pub);
  const auto& src = pub.data.at("X4train");
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < src.cols(); ++c) s += src(r, c);
    EXPECT_NEAR(bundle.at("X6test")(r, 17), s / 200.0, 1e-12);
  }
  EXPECT_EQ(bundle.at("X2test"), pub.data.at("X2train"));
}

TEST(Baselines, ClimatologyBeatsZerosOnShortForecast) {
  const auto p = score(lorenz_pack(), make_baseline(BaselineKind::Climatology, lorenz_pack().public_part));
  EXPECT_GT(p.e[0], 0.0);
}

TEST(Baselines, EchoedNoisyInputBeatsZerosOnDenoising) {
  const auto p = score(lorenz_pack(), make_baseline(BaselineKind::Persistence, lorenz_pack().public_part));
  EXPECT_GT(p.e[2], 0.0);
  EXPECT_NEAR(p.e[2], 90.0, 1.0);  // medium noise: relative error close to 0.1
}

TEST(Baselines, InconsistentPublicPartIsRejected) {
  PublicPack pub = lorenz_pack().public_part;
  ArrayArchive trimmed;
  for (const auto& [name, m] : pub.data.entries()) {
    if (name != "X4train") trimmed.insert(name, m);
  }
  pub.data = trimmed;
  EXPECT_NO_THROW(make_baseline(BaselineKind::Zeros, pub));
  try {
    make_baseline(BaselineKind::Persistence, pub);
    FAIL() << "expected ManifestMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ManifestMismatch);
  }
  PublicPack wrong_rows = lorenz_pack().public_part;
  wrong_rows.manifest.outputs[0].shape.rows = 4;
  EXPECT_THROW(make_baseline(BaselineKind::Climatology, wrong_rows), Error);
}

}  // namespace
}  // namespace ctf
