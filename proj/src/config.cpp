#include "trafficlab/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace trafficlab {

namespace {

using nlohmann::json;

RoadKind roadKindFromString(const std::string &s, const std::string &key) {
    if (s == "main") return RoadKind::Main;
    if (s == "branch") return RoadKind::Branch;
    throw ConfigError(key + ": unknown road kind '" + s +
                      "' (expected main|branch)");
}

std::string roadKindName(RoadKind k) {
    return k == RoadKind::Main ? "main" : "branch";
}

void rejectUnknownKeys(const json &obj, const std::vector<std::string> &known,
                       const std::string &prefix) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("unknown config key '" + prefix + it.key() + "'");
    }
}

template <typename T>
T getNumber(const json &obj, const std::string &key, T fallback,
            const std::string &prefix) {
    if (!obj.contains(key)) return fallback;
    const json &v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("config key '" + prefix + key + "' must be a number");
    return v.get<T>();
}

GridPos parsePos(const json &v, const std::string &key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer())
        throw ConfigError("config key '" + key + "' must be [row, col]");
    return GridPos{v[0].get<int>(), v[1].get<int>()};
}

std::filesystem::path resolveConfigPath(const std::string &arg) {
    namespace fs = std::filesystem;
    if (fs::exists(arg)) return arg;
    // bare preset names resolve against the preset search path
    if (arg.find('/') == std::string::npos &&
        arg.find(".json") == std::string::npos) {
        std::vector<fs::path> roots;
        if (const char *env = std::getenv("TRAFFICLAB_PRESET_DIR"))
            roots.emplace_back(env);
        roots.emplace_back("presets");
        for (const auto &root : roots) {
            fs::path candidate = root / (arg + ".json");
            if (fs::exists(candidate)) return candidate;
        }
        throw ConfigError("no config file or preset named '" + arg + "'");
    }
    throw ConfigError("config file not found: " + arg);
}

}  // namespace

ExperimentConfig configFromJson(const json &doc) {
    if (!doc.is_object())
        throw ConfigError("config root must be a JSON object");
    rejectUnknownKeys(
        doc,
        {"rows", "cols", "arrival", "roads", "travel_delay", "influence_mode",
         "influence_center", "selfish_index", "edge_weights", "queue_normalizer",
         "reward_scale", "episodes", "steps_per_episode", "seed", "output_dir",
         "run_name", "checkpoint_every", "dump_trajectory", "learner"},
        "");

    ExperimentConfig cfg;
    cfg.rows = getNumber<int>(doc, "rows", cfg.rows, "");
    cfg.cols = getNumber<int>(doc, "cols", cfg.cols, "");
    if (cfg.rows < 1 || cfg.cols < 1)
        throw ConfigError("rows and cols must be >= 1");

    if (doc.contains("arrival")) {
        const json &a = doc.at("arrival");
        rejectUnknownKeys(a, {"model", "p1", "p2"}, "arrival.");
        std::string model = a.value("model", "bernoulli");
        if (model == "bernoulli")
            cfg.arrival.mode = ArrivalMode::Bernoulli;
        else if (model == "bounded_uniform")
            cfg.arrival.mode = ArrivalMode::BoundedUniform;
        else
            throw ConfigError(
                "arrival.model must be bernoulli or bounded_uniform");
        cfg.arrival.p1 = getNumber<double>(a, "p1", cfg.arrival.p1, "arrival.");
        cfg.arrival.p2 = getNumber<double>(a, "p2", cfg.arrival.p2, "arrival.");
        if (cfg.arrival.p1 < 0 || cfg.arrival.p1 > 1 || cfg.arrival.p2 < 0 ||
            cfg.arrival.p2 > 1)
            throw ConfigError("arrival probabilities must lie in [0, 1]");
    }

    cfg.rowKinds.assign(cfg.rows, RoadKind::Main);
    cfg.colKinds.assign(cfg.cols, RoadKind::Branch);
    if (doc.contains("roads")) {
        const json &r = doc.at("roads");
        rejectUnknownKeys(r,
                          {"main_passing_rate", "branch_passing_rate",
                           "main_arrival_bound", "branch_arrival_bound",
                           "row_classes", "col_classes"},
                          "roads.");
        cfg.mainPassingRate =
            getNumber<int>(r, "main_passing_rate", cfg.mainPassingRate, "roads.");
        cfg.branchPassingRate = getNumber<int>(r, "branch_passing_rate",
                                               cfg.branchPassingRate, "roads.");
        cfg.mainArrivalBound = getNumber<int>(r, "main_arrival_bound",
                                              cfg.mainArrivalBound, "roads.");
        cfg.branchArrivalBound = getNumber<int>(r, "branch_arrival_bound",
                                                cfg.branchArrivalBound, "roads.");
        if (cfg.mainPassingRate <= 0 || cfg.branchPassingRate <= 0)
            throw ConfigError("passing rates must be > 0");
        if (cfg.mainArrivalBound < 0 || cfg.branchArrivalBound < 0)
            throw ConfigError("arrival bounds must be >= 0");
        if (r.contains("row_classes")) {
            const json &rc = r.at("row_classes");
            if (!rc.is_array() || static_cast<int>(rc.size()) != cfg.rows)
                throw ConfigError("roads.row_classes must list one kind per row");
            for (int i = 0; i < cfg.rows; ++i)
                cfg.rowKinds[i] = roadKindFromString(rc[i].get<std::string>(),
                                                     "roads.row_classes");
        }
        if (r.contains("col_classes")) {
            const json &cc = r.at("col_classes");
            if (!cc.is_array() || static_cast<int>(cc.size()) != cfg.cols)
                throw ConfigError(
                    "roads.col_classes must list one kind per column");
            for (int i = 0; i < cfg.cols; ++i)
                cfg.colKinds[i] = roadKindFromString(cc[i].get<std::string>(),
                                                     "roads.col_classes");
        }
    }

    if (doc.contains("travel_delay")) {
        if (!doc.at("travel_delay").is_boolean())
            throw ConfigError("travel_delay must be a boolean");
        cfg.travelDelay = doc.at("travel_delay").get<bool>();
    }

    if (doc.contains("influence_mode"))
        cfg.influenceMode =
            influenceModeFromString(doc.at("influence_mode").get<std::string>());
    if (doc.contains("influence_center"))
        cfg.influenceCenter = parsePos(doc.at("influence_center"),
                                       "influence_center");

    cfg.selfishIndex = getNumber<double>(doc, "selfish_index", 0.0, "");
    if (cfg.selfishIndex < 0)
        throw ConfigError("selfish_index must be >= 0 (weights must be >= 0)");

    if (doc.contains("edge_weights")) {
        const json &ew = doc.at("edge_weights");
        if (!ew.is_array())
            throw ConfigError("edge_weights must be an array");
        for (const json &e : ew) {
            rejectUnknownKeys(e, {"agent", "neighbor", "weight"},
                              "edge_weights.");
            EdgeWeightOverride o;
            o.agent = parsePos(e.at("agent"), "edge_weights.agent");
            o.neighbor = parsePos(e.at("neighbor"), "edge_weights.neighbor");
            o.weight = e.at("weight").get<double>();
            if (o.weight < 0)
                throw ConfigError("edge_weights.weight must be >= 0");
            cfg.edgeWeights.push_back(o);
        }
    }

    cfg.queueNormalizer = getNumber<double>(doc, "queue_normalizer",
                                            cfg.queueNormalizer, "");
    if (cfg.queueNormalizer <= 0)
        throw ConfigError("queue_normalizer must be > 0");
    cfg.rewardScale = getNumber<double>(doc, "reward_scale", cfg.rewardScale, "");
    if (cfg.rewardScale <= 0) throw ConfigError("reward_scale must be > 0");

    cfg.episodes = getNumber<int>(doc, "episodes", cfg.episodes, "");
    cfg.stepsPerEpisode =
        getNumber<int>(doc, "steps_per_episode", cfg.stepsPerEpisode, "");
    if (cfg.episodes < 1 || cfg.stepsPerEpisode < 1)
        throw ConfigError("episodes and steps_per_episode must be >= 1");
    cfg.seed = getNumber<uint64_t>(doc, "seed", cfg.seed, "");
    if (doc.contains("output_dir"))
        cfg.outputDir = doc.at("output_dir").get<std::string>();
    if (doc.contains("run_name"))
        cfg.runName = doc.at("run_name").get<std::string>();
    cfg.checkpointEvery =
        getNumber<int>(doc, "checkpoint_every", cfg.checkpointEvery, "");
    if (cfg.checkpointEvery < 0)
        throw ConfigError("checkpoint_every must be >= 0");
    if (doc.contains("dump_trajectory")) {
        if (!doc.at("dump_trajectory").is_boolean())
            throw ConfigError("dump_trajectory must be a boolean");
        cfg.dumpTrajectory = doc.at("dump_trajectory").get<bool>();
    }

    if (doc.contains("learner")) {
        const json &l = doc.at("learner");
        rejectUnknownKeys(l,
                          {"gamma", "tau", "actor_lr", "critic_lr", "batch_size",
                           "buffer_capacity", "ou_theta", "ou_sigma", "ou_mu",
                           "noise_decay", "sigmoid_steepness", "arch",
                           "hidden_sizes", "update_every"},
                          "learner.");
        LearnerConfig &lc = cfg.learner;
        lc.gamma = getNumber<double>(l, "gamma", lc.gamma, "learner.");
        lc.tau = getNumber<double>(l, "tau", lc.tau, "learner.");
        lc.actorLr = getNumber<double>(l, "actor_lr", lc.actorLr, "learner.");
        lc.criticLr = getNumber<double>(l, "critic_lr", lc.criticLr, "learner.");
        lc.batchSize = getNumber<int>(l, "batch_size", lc.batchSize, "learner.");
        lc.bufferCapacity = getNumber<uint64_t>(l, "buffer_capacity",
                                                lc.bufferCapacity, "learner.");
        lc.ouTheta = getNumber<double>(l, "ou_theta", lc.ouTheta, "learner.");
        lc.ouSigma = getNumber<double>(l, "ou_sigma", lc.ouSigma, "learner.");
        lc.ouMu = getNumber<double>(l, "ou_mu", lc.ouMu, "learner.");
        lc.noiseDecay =
            getNumber<double>(l, "noise_decay", lc.noiseDecay, "learner.");
        if (lc.noiseDecay <= 0 || lc.noiseDecay > 1)
            throw ConfigError("learner.noise_decay must lie in (0, 1]");
        lc.steepness = getNumber<double>(l, "sigmoid_steepness", lc.steepness,
                                         "learner.");
        if (lc.gamma < 0 || lc.gamma > 1)
            throw ConfigError("learner.gamma must lie in [0, 1]");
        if (lc.tau < 0 || lc.tau > 1)
            throw ConfigError("learner.tau must lie in [0, 1]");
        if (lc.batchSize < 1) throw ConfigError("learner.batch_size must be >= 1");
        if (lc.bufferCapacity < static_cast<size_t>(lc.batchSize))
            throw ConfigError("learner.buffer_capacity must cover one batch");
        if (lc.steepness <= 0)
            throw ConfigError("learner.sigmoid_steepness must be > 0");
        if (l.contains("arch") && l.contains("hidden_sizes"))
            throw ConfigError(
                "learner.arch and learner.hidden_sizes are mutually exclusive");
        if (l.contains("arch")) {
            std::string arch = l.at("arch").get<std::string>();
            if (arch == "desk")
                lc.hidden = {64, 64, 32};
            else if (arch == "paper")
                lc.hidden = {400, 400, 600, 200};
            else
                throw ConfigError("learner.arch must be desk or paper");
            cfg.archName = arch;
        }
        if (l.contains("hidden_sizes")) {
            lc.hidden = l.at("hidden_sizes").get<std::vector<int>>();
            if (lc.hidden.empty())
                throw ConfigError("learner.hidden_sizes must be nonempty");
            for (int h : lc.hidden)
                if (h < 1)
                    throw ConfigError("learner.hidden_sizes must be positive");
            cfg.archName = "custom";
        }
        cfg.updateEvery =
            getNumber<int>(l, "update_every", cfg.updateEvery, "learner.");
        if (cfg.updateEvery < 1)
            throw ConfigError("learner.update_every must be >= 1");
    }

    // cross-field checks that need the finished struct
    try {
        cfg.influenceGraph();  // validates mode/center against the grid
        cfg.socialWeights();   // validates edge weight adjacency
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

GridTopology ExperimentConfig::topology() const {
    GridTopology t;
    t.rows = rows;
    t.cols = cols;
    t.arrival = arrival;
    t.travelDelay = travelDelay;
    auto mk = [&](RoadKind k) {
        RoadClass rc;
        rc.kind = k;
        rc.passingRate =
            k == RoadKind::Main ? mainPassingRate : branchPassingRate;
        rc.arrivalBound =
            k == RoadKind::Main ? mainArrivalBound : branchArrivalBound;
        return rc;
    };
    for (RoadKind k : rowKinds) t.rowClass.push_back(mk(k));
    for (RoadKind k : colKinds) t.colClass.push_back(mk(k));
    return t;
}

SocialWeights ExperimentConfig::socialWeights() const {
    GridTopology topo = topology();
    SocialWeights w = SocialWeights::uniform(topo, selfishIndex);
    for (const auto &o : edgeWeights) {
        if (!topo.inGrid(o.agent.row, o.agent.col) ||
            !topo.inGrid(o.neighbor.row, o.neighbor.col))
            throw ConfigError("edge_weights entry lies outside the grid");
        w.setWeight(topo.index(o.agent.row, o.agent.col),
                    topo.index(o.neighbor.row, o.neighbor.col), o.weight);
    }
    return w;
}

InfluenceGraph ExperimentConfig::influenceGraph() const {
    return buildInfluenceGraph(topology(), influenceMode, influenceCenter);
}

json ExperimentConfig::toJson() const {
    json doc;
    doc["rows"] = rows;
    doc["cols"] = cols;
    doc["arrival"]["model"] =
        arrival.mode == ArrivalMode::Bernoulli ? "bernoulli" : "bounded_uniform";
    doc["arrival"]["p1"] = arrival.p1;
    doc["arrival"]["p2"] = arrival.p2;
    doc["roads"]["main_passing_rate"] = mainPassingRate;
    doc["roads"]["branch_passing_rate"] = branchPassingRate;
    doc["roads"]["main_arrival_bound"] = mainArrivalBound;
    doc["roads"]["branch_arrival_bound"] = branchArrivalBound;
    json rowsJson = json::array(), colsJson = json::array();
    for (RoadKind k : rowKinds) rowsJson.push_back(roadKindName(k));
    for (RoadKind k : colKinds) colsJson.push_back(roadKindName(k));
    doc["roads"]["row_classes"] = std::move(rowsJson);
    doc["roads"]["col_classes"] = std::move(colsJson);
    doc["travel_delay"] = travelDelay;
    doc["influence_mode"] = influenceModeName(influenceMode);
    if (influenceCenter)
        doc["influence_center"] = {influenceCenter->row, influenceCenter->col};
    doc["selfish_index"] = selfishIndex;
    if (!edgeWeights.empty()) {
        json ew = json::array();
        for (const auto &o : edgeWeights)
            ew.push_back({{"agent", {o.agent.row, o.agent.col}},
                          {"neighbor", {o.neighbor.row, o.neighbor.col}},
                          {"weight", o.weight}});
        doc["edge_weights"] = std::move(ew);
    }
    doc["queue_normalizer"] = queueNormalizer;
    doc["reward_scale"] = rewardScale;
    doc["episodes"] = episodes;
    doc["steps_per_episode"] = stepsPerEpisode;
    doc["seed"] = seed;
    doc["output_dir"] = outputDir;
    doc["run_name"] = runName;
    doc["checkpoint_every"] = checkpointEvery;
    doc["dump_trajectory"] = dumpTrajectory;
    json l;
    l["gamma"] = learner.gamma;
    l["tau"] = learner.tau;
    l["actor_lr"] = learner.actorLr;
    l["critic_lr"] = learner.criticLr;
    l["batch_size"] = learner.batchSize;
    l["buffer_capacity"] = learner.bufferCapacity;
    l["ou_theta"] = learner.ouTheta;
    l["ou_sigma"] = learner.ouSigma;
    l["ou_mu"] = learner.ouMu;
    l["noise_decay"] = learner.noiseDecay;
    l["sigmoid_steepness"] = learner.steepness;
    l["hidden_sizes"] = learner.hidden;
    l["update_every"] = updateEvery;
    doc["learner"] = std::move(l);
    return doc;
}

uint64_t ExperimentConfig::envHash() const {
    json env;
    json full = toJson();
    for (const char *key : {"rows", "cols", "arrival", "roads", "travel_delay",
                            "seed", "episodes", "steps_per_episode"})
        env[key] = full.at(key);
    std::string s = env.dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void applyOverride(json &doc, const std::string &assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key.path=value: " +
                          assignment);
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception &) {
        parsed = value;  // bare strings stay strings
    }
    json *node = &doc;
    std::stringstream keys(path);
    std::string key;
    std::vector<std::string> parts;
    while (std::getline(keys, key, '.')) {
        if (key.empty())
            throw ConfigError("bad override key '" + path + "'");
        parts.push_back(key);
    }
    for (size_t i = 0; i + 1 < parts.size(); ++i)
        node = &((*node)[parts[i]]);
    (*node)[parts.back()] = std::move(parsed);
}

ExperimentConfig loadConfig(const std::string &pathOrPreset,
                            const std::vector<std::string> &overrides) {
    json doc = json::object();
    std::string name = "defaults";
    if (pathOrPreset != "-") {
        std::filesystem::path path = resolveConfigPath(pathOrPreset);
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config " + path.string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        std::string text = buffer.str();
        bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
        if (!blank) {
            try {
                doc = json::parse(text);
            } catch (const json::exception &e) {
                // nlohmann reports line and column in the message
                throw ConfigError(path.string() + ": " + e.what());
            }
        }
        name = path.stem().string();
    }
    for (const auto &o : overrides) applyOverride(doc, o);
    ExperimentConfig cfg = configFromJson(doc);
    if (cfg.runName.empty()) cfg.runName = name;
    return cfg;
}

void writeResolvedConfig(const ExperimentConfig &cfg,
                         const std::filesystem::path &runDir) {
    std::ofstream out(runDir / "resolved_config.json");
    if (!out)
        throw IoError("cannot write resolved config into " + runDir.string());
    out << cfg.toJson().dump(2) << "\n";
}

}  // namespace trafficlab
