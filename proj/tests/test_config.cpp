#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "trafficlab/config.h"

using namespace trafficlab;
namespace fs = std::filesystem;

namespace {

fs::path writeTemp(const std::string &name, const std::string &content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("empty file resolves to the all-defaults smoke config") {
    fs::path p = writeTemp("trafficlab_empty.json", "  \n");
    ExperimentConfig cfg = loadConfig(p.string());
    CHECK(cfg.rows == 1);
    CHECK(cfg.cols == 1);
    CHECK(cfg.arrival.mode == ArrivalMode::Bernoulli);
    CHECK(cfg.arrival.p1 == doctest::Approx(0.9));
    CHECK(cfg.arrival.p2 == doctest::Approx(0.3));
    CHECK(cfg.mainPassingRate == 16);
    CHECK(cfg.branchPassingRate == 4);
    CHECK(cfg.influenceMode == InfluenceMode::None);
    CHECK(cfg.selfishIndex == 0.0);
    CHECK(cfg.stepsPerEpisode == 150);
    CHECK(cfg.learner.gamma == doctest::Approx(0.99));
    CHECK(cfg.learner.batchSize == 64);
    CHECK(cfg.learner.hidden == std::vector<int>{64, 64, 32});
    CHECK(cfg.queueNormalizer == doctest::Approx(50.0));
    CHECK(cfg.rewardScale == doctest::Approx(0.001));
    fs::remove(p);
}

TEST_CASE("dash means defaults without touching the filesystem") {
    ExperimentConfig cfg = loadConfig("-");
    CHECK(cfg.rows == 1);
    CHECK(cfg.runName == "defaults");
}

TEST_CASE("validation errors name the offending key") {
    fs::path p = writeTemp("trafficlab_bad.json", R"({"selfish_index": -1})");
    CHECK_THROWS_WITH_AS(loadConfig(p.string()),
                         doctest::Contains("selfish_index"), ConfigError);
    fs::remove(p);

    p = writeTemp("trafficlab_unknown.json", R"({"rowz": 3})");
    CHECK_THROWS_WITH_AS(loadConfig(p.string()), doctest::Contains("rowz"),
                         ConfigError);
    fs::remove(p);

    p = writeTemp("trafficlab_unknown2.json",
                  R"({"learner": {"gama": 0.9}})");
    CHECK_THROWS_WITH_AS(loadConfig(p.string()),
                         doctest::Contains("learner.gama"), ConfigError);
    fs::remove(p);
}

TEST_CASE("parse errors carry position information") {
    fs::path p = writeTemp("trafficlab_syntax.json", "{\n  \"rows\": 3,,\n}");
    CHECK_THROWS_WITH_AS(loadConfig(p.string()), doctest::Contains("line"),
                         ConfigError);
    fs::remove(p);
}

TEST_CASE("paper preset resolves by name") {
    // TRAFFICLAB_PRESET_DIR is set by the test harness
    REQUIRE(std::getenv("TRAFFICLAB_PRESET_DIR") != nullptr);
    ExperimentConfig cfg = loadConfig("grid3x3-paper");
    CHECK(cfg.rows == 3);
    CHECK(cfg.cols == 3);
    CHECK(cfg.learner.batchSize == 64);
    CHECK(cfg.learner.gamma == doctest::Approx(0.99));
    CHECK(cfg.stepsPerEpisode == 150);
    CHECK(cfg.learner.hidden == std::vector<int>{400, 400, 600, 200});
    CHECK(cfg.learner.steepness == doctest::Approx(1000.0));
    CHECK(cfg.mainPassingRate == 16);
    CHECK(cfg.branchPassingRate == 4);
    CHECK(cfg.runName == "grid3x3-paper");
    CHECK_THROWS_AS(loadConfig("no-such-preset"), ConfigError);
}

TEST_CASE("schema validation catches out-of-range fields") {
    auto reject = [](const std::string &body) {
        fs::path p = writeTemp("trafficlab_reject.json", body);
        CHECK_THROWS_AS(loadConfig(p.string()), ConfigError);
        fs::remove(p);
    };
    reject(R"({"arrival": {"p1": 2.0}})");
    reject(R"({"rows": 0})");
    reject(R"({"episodes": 0})");
    reject(R"({"learner": {"batch_size": 0}})");
    reject(R"({"learner": {"update_every": 0}})");
    reject(R"({"learner": {"arch": "desk", "hidden_sizes": [8]}})");
    reject(R"({"learner": {"arch": "huge"}})");
    reject(R"({"learner": {"buffer_capacity": 8, "batch_size": 64}})");
    reject(R"({"roads": {"main_passing_rate": 0}})");
    reject(R"({"queue_normalizer": 0})");
    reject(R"({"reward_scale": 0})");
    reject(R"({"influence_mode": "sideways"})");
    reject(R"({"rows": 2, "cols": 2, "influence_mode": "inward"})");
    reject(R"({"edge_weights": [{"agent": [0,0], "neighbor": [0,2], "weight": 1}],
               "rows": 1, "cols": 3})");
}

TEST_CASE("influence center unlocks even grids") {
    fs::path p = writeTemp("trafficlab_center.json",
                           R"({"rows": 2, "cols": 2,
                               "influence_mode": "inward",
                               "influence_center": [0, 1]})");
    ExperimentConfig cfg = loadConfig(p.string());
    InfluenceGraph g = cfg.influenceGraph();
    CHECK(g.inDegree(1) == 2);
    fs::remove(p);
}

TEST_CASE("resolved config round-trips exactly") {
    REQUIRE(std::getenv("TRAFFICLAB_PRESET_DIR") != nullptr);
    for (const char *preset :
         {"grid1x1-smoke", "grid1x1-desk", "grid3x3-desk", "grid3x3-paper"}) {
        ExperimentConfig cfg = loadConfig(preset);
        nlohmann::json echo = cfg.toJson();
        ExperimentConfig reloaded = configFromJson(echo);
        CHECK(reloaded.toJson().dump() == echo.dump());
    }
}

TEST_CASE("overrides apply dotted paths") {
    nlohmann::json doc = nlohmann::json::object();
    applyOverride(doc, "selfish_index=0.5");
    applyOverride(doc, "learner.arch=paper");
    applyOverride(doc, "arrival.p1=1");
    applyOverride(doc, "run_name=sweep-point");
    ExperimentConfig cfg = configFromJson(doc);
    CHECK(cfg.selfishIndex == doctest::Approx(0.5));
    CHECK(cfg.learner.hidden == std::vector<int>{400, 400, 600, 200});
    CHECK(cfg.arrival.p1 == doctest::Approx(1.0));
    CHECK(cfg.runName == "sweep-point");
    CHECK_THROWS_AS(applyOverride(doc, "no-equals-sign"), ConfigError);
    CHECK_THROWS_AS(applyOverride(doc, "=5"), ConfigError);
}

TEST_CASE("edge weight overrides reach the social weights") {
    fs::path p = writeTemp("trafficlab_edges.json",
                           R"({"rows": 1, "cols": 2, "selfish_index": 0.5,
                               "edge_weights": [{"agent": [0,0],
                                                 "neighbor": [0,1],
                                                 "weight": 0.9}]})");
    ExperimentConfig cfg = loadConfig(p.string());
    SocialWeights w = cfg.socialWeights();
    CHECK(w.weight(0, 1) == doctest::Approx(0.9));   // overridden
    CHECK(w.weight(1, 0) == doctest::Approx(0.5));   // uniform selfish/1
    fs::remove(p);
}

TEST_CASE("environment hash tracks environment-determining fields") {
    ExperimentConfig a = loadConfig("-");
    ExperimentConfig b = loadConfig("-");
    CHECK(a.envHash() == b.envHash());
    b.seed = 99;
    CHECK(a.envHash() != b.envHash());
    ExperimentConfig c = loadConfig("-");
    c.selfishIndex = 1.0;  // learner-side knob: same environment
    CHECK(a.envHash() == c.envHash());
}

TEST_CASE("topology construction follows the road classes") {
    fs::path p = writeTemp("trafficlab_roads.json",
                           R"({"rows": 2, "cols": 2,
                               "roads": {"row_classes": ["main", "branch"],
                                          "col_classes": ["branch", "branch"],
                                          "main_passing_rate": 10,
                                          "branch_passing_rate": 3}})");
    ExperimentConfig cfg = loadConfig(p.string());
    GridTopology topo = cfg.topology();
    CHECK(topo.rowClass[0].passingRate == 10);
    CHECK(topo.rowClass[1].passingRate == 3);
    CHECK(topo.colClass[0].passingRate == 3);
    CHECK(topo.ewPassingRate(topo.index(0, 0)) == 10);
    CHECK(topo.ewPassingRate(topo.index(1, 0)) == 3);
    fs::remove(p);
}
