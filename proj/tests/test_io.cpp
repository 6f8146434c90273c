#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "smoothbl/smoothbl.hpp"

using namespace smoothbl;
using io::Json;

namespace {

std::string demo(const std::string& name) { return std::string(SMOOTHBL_DEMO_DIR) + "/" + name; }

std::string schema_path(const std::string& text) {
  try {
    io::parse_instance_text(text);
  } catch (const io::SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

const char* kGbll = R"({"kind": "discrete-gbll", "mu": [0.5, 0.5],
  "channels": [[[0.9, 0.1], [0.2, 0.8]]], "weights": [1.5]})";

}  // namespace

TEST(Io, EveryDemoRoundTripsAndComputes) {
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SMOOTHBL_DEMO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++files;
    SCOPED_TRACE(entry.path().string());
    const auto a = io::load_instance(entry.path().string());
    EXPECT_TRUE(a.warnings.empty());
    const auto text = io::to_json(a).dump(2);
    const auto b = io::parse_instance_text(text);
    EXPECT_TRUE(io::semantically_equal(a, b));
    // second pass is a fixed point of the writer
    EXPECT_EQ(io::to_json(b).dump(2), text);

    if (const auto* g = std::get_if<io::DiscreteGbllFile>(&a.payload)) {
      EXPECT_TRUE(std::isfinite(gbll_constant(g->instance).constant_d));
    } else if (const auto* gs = std::get_if<io::GaussianFile>(&a.payload)) {
      EXPECT_GE(variance_V(gs->instance), 0.0);
    } else if (const auto* cr = std::get_if<io::CrSchemeFile>(&a.payload)) {
      const auto ev = evaluate_scheme(cr->scheme);
      EXPECT_GE(ev.p_agree, 0.0);
      EXPECT_LE(ev.p_agree, 1.0 + 1e-12);
    } else {
      EXPECT_FALSE(std::get<io::BoundsQueryFile>(a.payload).queries.empty());
    }
  }
  EXPECT_GE(files, 5);
}

TEST(Io, DefaultsFillMarginalsAndCoordinates) {
  const auto f = io::parse_instance_text(kGbll);
  const auto& inst = std::get<io::DiscreteGbllFile>(f.payload).instance;
  EXPECT_NEAR(inst.nus[0][0], 0.55, 1e-15);
  EXPECT_NEAR(inst.nus[0][1], 0.45, 1e-15);

  const auto g = io::parse_instance_text(R"({"kind": "gaussian", "sigma": [[2, 1], [1, 2]], "weights": [0.5, 0.5]})");
  const auto& gi = std::get<io::GaussianFile>(g.payload).instance;
  ASSERT_EQ(gi.m(), 2u);
  EXPECT_EQ(gi.maps[1](0, 1), 1.0);
  EXPECT_EQ(gi.maps[1](0, 0), 0.0);
  EXPECT_EQ(gi.noise[0](0, 0), 0.0);
}

TEST(Io, ProbabilityRowTolerances) {
  // within 1e-9: taken as is
  auto f = io::parse_instance_text(R"({"kind": "discrete-gbll", "mu": [0.5, 0.5000000000005],
    "channels": [[[1, 0], [0, 1]]], "weights": [2]})");
  EXPECT_TRUE(f.warnings.empty());
  // 5e-7 drift: renormalized with a warning naming the row
  f = io::parse_instance_text(R"({"kind": "discrete-gbll", "mu": [0.5, 0.5],
    "channels": [[[1, 0], [0.3, 0.7000005]]], "weights": [2]})");
  ASSERT_EQ(f.warnings.size(), 1u);
  EXPECT_NE(f.warnings[0].find("/channels/0/1"), std::string::npos);
  const auto& k = std::get<io::DiscreteGbllFile>(f.payload).instance.channels[0];
  EXPECT_NEAR(k(1, 0) + k(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(k(1, 0), 0.3 / 1.0000005, 1e-15);
  // beyond 1e-6: rejected
  EXPECT_EQ(schema_path(R"({"kind": "discrete-gbll", "mu": [0.5, 0.5],
    "channels": [[[1, 0], [0.3, 0.71]]], "weights": [2]})"),
            "/channels/0/1");
  EXPECT_EQ(schema_path(R"({"kind": "discrete-gbll", "mu": [0.6, 0.5],
    "channels": [[[1, 0], [0, 1]]], "weights": [2]})"),
            "/mu");
  // unnormalized mu is fine when declared
  f = io::parse_instance_text(R"({"kind": "discrete-gbll", "mu_normalized": false, "mu": [0.6, 0.5],
    "channels": [[[1, 0], [0, 1]]], "weights": [2]})");
  EXPECT_NEAR(std::get<io::DiscreteGbllFile>(f.payload).instance.mu.total(), 1.1, 1e-15);
}

TEST(Io, SchemaDiagnostics) {
  EXPECT_EQ(schema_path(R"({"mu": [1]})"), "/kind");
  EXPECT_EQ(schema_path(R"({"kind": "nonsense"})"), "/kind");
  EXPECT_EQ(schema_path(R"({"kind": "discrete-gbll", "mu": [0.5, 0.5], "weights": [1]})"), "/channels");
  EXPECT_EQ(schema_path(R"({"kind": "discrete-gbll", "mu": [0.5, 0.5],
    "channels": [[[1, 0], [0, 1]]], "weights": [-1]})"),
            "/weights/0");
  EXPECT_EQ(schema_path(R"({"kind": "discrete-gbll", "mu": [0.5, 0.5],
    "channels": [[[1, 0], [0, 1, 0]]], "weights": [1]})"),
            "/channels/0/1");
  EXPECT_EQ(schema_path(R"({"kind": "discrete-gbll", "mu": [0.5, "x"],
    "channels": [[[1, 0], [0, 1]]], "weights": [1]})"),
            "/mu/1");
  EXPECT_EQ(schema_path(R"({"kind": "bounds-query", "queries": [{"bound": "omni", "k_size": 0}]})"),
            "/queries/0/k_size");
  EXPECT_EQ(schema_path(R"({"kind": "gaussian", "sigma": [[1, 2], [0, 1]], "weights": [0.5, 0.5]})"), "");
  try {
    io::parse_instance_text("{\n  \"kind\": \"gaussian\",\n  oops\n}");
    FAIL();
  } catch (const io::SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::load_instance("/nonexistent/file.json"), io::SchemaError);
}

TEST(Io, InfinityStrings) {
  const auto f = io::parse_instance_text(R"({"kind": "bounds-query", "queries": [
    {"bound": "omni", "k_size": 8, "w_sizes": [2], "weights": [1.5], "d": "inf", "delta": 0}]})");
  const auto& q = std::get<io::OmniQuery>(std::get<io::BoundsQueryFile>(f.payload).queries[0].query);
  EXPECT_EQ(q.d, kInf);
  const Json out = io::to_json(f);
  EXPECT_EQ(out["queries"][0]["d"], "inf");
  EXPECT_EQ(io::detail::write_number(-kInf), "-inf");
  EXPECT_EQ(io::detail::read_number(Json("-inf"), ""), -kInf);
  EXPECT_THROW(io::detail::read_number(Json("infinity"), "/x"), io::SchemaError);
}

TEST(Io, CrSchemeForms) {
  // a binning recipe rebuilds exactly the library's scheme
  const auto f = io::parse_instance_text(R"({"kind": "cr-scheme", "n": 2, "source": [0.4, 0.1, 0.1, 0.4],
    "alphabets": [2, 2], "k_size": 3, "w_sizes": [2, 1], "binning": {"seed": 5, "eta": 0.1, "perturb_seed": 2}})");
  const auto& file = std::get<io::CrSchemeFile>(f.payload);
  const auto direct = perturbed_scheme(
      random_binning_scheme(FiniteMeasure({0.4, 0.1, 0.1, 0.4}), {2, 2}, 2, 3, {2, 1}, 5), 0.1, 2);
  EXPECT_EQ(file.scheme.encoder, direct.encoder);
  EXPECT_EQ(file.scheme.decoders[0], direct.decoders[0]);
  EXPECT_EQ(file.weights, std::vector<double>({1.0, 1.0}));

  // the explicit form of the same scheme is semantically equal apart from the recipe
  io::InstanceFile explicit_form = f;
  std::get<io::CrSchemeFile>(explicit_form.payload).binning.reset();
  const auto back = io::parse_instance_text(io::to_json(explicit_form).dump());
  EXPECT_TRUE(io::semantically_equal(explicit_form, back));
  EXPECT_FALSE(io::semantically_equal(f, back));

  EXPECT_EQ(schema_path(R"({"kind": "cr-scheme", "n": 1, "source": [0.4, 0.1, 0.1, 0.4],
    "alphabets": [2, 2], "k_size": 2, "w_sizes": [1, 1], "encoder": [[1, 0], [1, 0], [0, 1], [0, 1]],
    "decoders": [[[1, 0], [0, 1]]]})"),
            "/decoders");
  EXPECT_EQ(schema_path(R"({"kind": "cr-scheme", "n": 1, "source": [0.5, 0.5],
    "alphabets": [2, 2], "k_size": 2, "w_sizes": [1, 1], "binning": {}})"),
            "/source");
  EXPECT_THROW(io::parse_instance_text(R"({"kind": "cr-scheme", "n": 30, "source": [0.4, 0.1, 0.1, 0.4],
    "alphabets": [2, 2], "k_size": 2, "w_sizes": [1, 1], "binning": {}})"),
               ResourceCapError);
}

TEST(Io, MetadataAndLabelsSurvive) {
  const auto f = io::parse_instance_text(R"({"kind": "discrete-gbll", "metadata": {"tag": [1, "a"]},
    "mu": [0.5, 0.5], "channels": [[[1, 0], [0, 1]]], "weights": [2],
    "labels": {"x": ["heads", "tails"], "y": [["H", "T"]]}})");
  const auto back = io::parse_instance_text(io::to_json(f).dump());
  EXPECT_TRUE(io::semantically_equal(f, back));
  EXPECT_EQ(std::get<io::DiscreteGbllFile>(back.payload).labels->x[1], "tails");
  EXPECT_EQ(back.metadata["tag"][1], "a");
  EXPECT_EQ(schema_path(R"({"kind": "discrete-gbll", "mu": [0.5, 0.5], "channels": [[[1, 0], [0, 1]]],
    "weights": [2], "labels": {"x": ["only-one"]}})"),
            "/labels/x");
}
