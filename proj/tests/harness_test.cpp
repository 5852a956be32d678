#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nlpca/baselines.hpp"
#include "nlpca/harness.hpp"

using namespace nlpca;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_config(const std::string& out) {
    ExperimentConfig cfg;
    cfg.dataset = "stripes";
    cfg.methods = {"pca"};
    cfg.k = 1;
    cfg.repeats = 1;
    cfg.base_seed = 3;
    cfg.out_dir = out;
    return cfg;
}

std::filesystem::path temp_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(p);
    return p;
}

// rebuilds records from results.json, mirroring what an external consumer
// would parse
std::vector<RunRecord> reload_records(const std::filesystem::path& json_path) {
    nlohmann::json j;
    std::ifstream in(json_path);
    in >> j;
    std::vector<RunRecord> out;
    for (const auto& jr : j["records"]) {
        RunRecord r;
        r.method = jr["method"];
        r.seed = jr["seed"];
        r.final_k1 = jr["final_k1"];
        r.final_k2 = jr["final_k2"];
        if (jr.contains("kernel")) {
            r.kernel = jr["kernel"];
        }
        if (jr.contains("expressions")) {
            r.expressions = jr["expressions"].get<std::vector<std::string>>();
        }
        for (const auto& h : jr["history"]) {
            GenerationReport g;
            g.generation = h["generation"];
            g.train_objective = h["train_objective"];
            g.validation_proportion = h["validation_proportion"];
            r.history.push_back(g);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

TEST_CASE("run_experiment basics") {
    SUBCASE("single pca repeat on stripes") {
        ExperimentConfig cfg = small_config("");
        const auto records = run_experiment(cfg);
        REQUIRE(records.size() == 1);
        const DataTable t = resolve_dataset(cfg);
        const SplitPair sp = split(t, 0.75, cfg.base_seed);
        CHECK(records[0].final_k1 ==
              doctest::Approx(linear_pca_baseline(t, sp, 1)).epsilon(1e-12));
        CHECK(records[0].final_k1 == doctest::Approx(0.5).epsilon(0.1));
        CHECK(records[0].final_k2 == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("unknown method lists the valid ones") {
        ExperimentConfig cfg = small_config("");
        cfg.methods = {"pca", "magic"};
        CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("es-partial"),
                             ConfigError);
    }
    SUBCASE("empty method list is rejected") {
        ExperimentConfig cfg = small_config("");
        cfg.methods = {};
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    }
    SUBCASE("validation rows do not leak into fitted models") {
        ExperimentConfig cfg = small_config("");
        cfg.methods = {"es-global"};
        cfg.es.generations = 2;
        cfg.es.population = 10;
        cfg.es.batch_size = 64;
        DataTable t = resolve_dataset(cfg);
        const SplitPair sp = split(t, 0.75, cfg.base_seed);
        const TransformStack stack = build_stack(t.schemas, cfg.base_seed);
        es::EsConfig ec = cfg.es;
        ec.seed = cfg.base_seed;
        const es::TrainResult before = es::train(stack, t, sp, ec);
        // poke every validation row; training-side quantities must not move
        DataTable mutated = t;
        for (auto i : sp.validation) {
            mutated.columns[0](i) += 100.0;
            mutated.columns[1](i) -= 3.0;
        }
        const es::TrainResult after = es::train(stack, mutated, sp, ec);
        CHECK(before.theta == after.theta);
        for (std::size_t g = 0; g < before.history.size(); ++g) {
            CHECK(before.history[g].train_objective ==
                  after.history[g].train_objective);
            CHECK(before.history[g].validation_proportion !=
                  after.history[g].validation_proportion);
        }
    }
}

TEST_CASE("aggregate") {
    SUBCASE("single record is its own summary") {
        RunRecord r;
        r.method = "pca";
        r.final_k1 = 0.4;
        const auto s = aggregate({r}, 1);
        REQUIRE(s.size() == 1);
        CHECK(s[0].median == doctest::Approx(0.4));
        CHECK(s[0].mean == doctest::Approx(0.4));
        CHECK(s[0].p20 == doctest::Approx(0.4));
    }
    SUBCASE("median of three") {
        std::vector<RunRecord> rs(3);
        for (int i = 0; i < 3; ++i) {
            rs[i].method = "pca";
            rs[i].final_k1 = 0.1 * (i + 1);
        }
        CHECK(aggregate(rs, 1)[0].median == doctest::Approx(0.2));
    }
    SUBCASE("matches a naive sort oracle on 15 records") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<RunRecord> rs(15);
        std::vector<double> vals;
        for (auto& r : rs) {
            r.method = "kpca";
            r.final_k1 = unif(rng);
            vals.push_back(r.final_k1);
        }
        std::sort(vals.begin(), vals.end());
        const auto s = aggregate(rs, 1);
        // nearest-rank: ceil(q*15) -> indices 8, 3, 12 (1-based)
        CHECK(s[0].median == doctest::Approx(vals[7]));
        CHECK(s[0].p20 == doctest::Approx(vals[2]));
        CHECK(s[0].p80 == doctest::Approx(vals[11]));
    }
    SUBCASE("mixed-length histories truncate with a flag") {
        std::vector<RunRecord> rs(2);
        for (int i = 0; i < 2; ++i) {
            rs[i].method = "es-global";
            for (int g = 0; g < 3 + i; ++g) {
                GenerationReport h;
                h.generation = g;
                h.validation_proportion = 0.1 * g;
                rs[i].history.push_back(h);
            }
        }
        const auto s = aggregate(rs, 1);
        CHECK(s[0].truncated);
        CHECK(s[0].curve.size() == 3);
    }
}

TEST_CASE("relative_difference") {
    CHECK(*relative_difference(0.5, 0.5) == doctest::Approx(0.0));
    CHECK(*relative_difference(0.153, 0.119) == doctest::Approx(22.2).epsilon(0.01));
    CHECK(*relative_difference(0.119, 0.153) < 0.0);
    CHECK(!relative_difference(0.0, 0.1).has_value());
}

TEST_CASE("emit_outputs") {
    SUBCASE("byte-identical outputs for identical configs") {
        const auto d1 = temp_dir("nlpca_det_a");
        const auto d2 = temp_dir("nlpca_det_b");
        ExperimentConfig cfg = small_config(d1.string());
        cfg.dataset = "circles";
        cfg.methods = {"pca", "kpca", "es-global"};
        cfg.es.generations = 2;
        cfg.es.population = 8;
        cfg.es.batch_size = 32;
        auto records = run_experiment(cfg);
        emit_outputs(cfg, records, aggregate(records, cfg.k), d1.string());
        auto records2 = run_experiment(cfg);
        emit_outputs(cfg, records2, aggregate(records2, cfg.k), d2.string());
        CHECK(slurp(d1 / "results.json") == slurp(d2 / "results.json"));
        CHECK(slurp(d1 / "table.csv") == slurp(d2 / "table.csv"));
        CHECK(slurp(d1 / "curves.csv") == slurp(d2 / "curves.csv"));
        std::filesystem::remove_all(d1);
        std::filesystem::remove_all(d2);
    }
    SUBCASE("curves.csv covers generations x methods-with-history") {
        const auto dir = temp_dir("nlpca_curves");
        std::vector<RunRecord> rs(2);
        rs[0].method = "pca";
        rs[0].final_k1 = 0.5;
        rs[1].method = "es-global";
        rs[1].final_k1 = 0.6;
        for (int g = 0; g < 4; ++g) {
            GenerationReport h;
            h.generation = g;
            rs[1].history.push_back(h);
        }
        ExperimentConfig cfg = small_config(dir.string());
        emit_outputs(cfg, rs, aggregate(rs, 1), dir.string());
        const std::string curves = slurp(dir / "curves.csv");
        int lines = 0;
        for (char c : curves) {
            lines += c == '\n';
        }
        CHECK(lines == 1 + 4);  // header + one method with 4 generations
        std::filesystem::remove_all(dir);
    }
    SUBCASE("results.json round-trips into the same table.csv") {
        const auto d1 = temp_dir("nlpca_rt_a");
        const auto d2 = temp_dir("nlpca_rt_b");
        ExperimentConfig cfg = small_config(d1.string());
        cfg.methods = {"pca", "kpca"};
        cfg.repeats = 3;
        auto records = run_experiment(cfg);
        emit_outputs(cfg, records, aggregate(records, cfg.k), d1.string());
        const auto reloaded = reload_records(d1 / "results.json");
        emit_outputs(cfg, reloaded, aggregate(reloaded, cfg.k), d2.string());
        CHECK(slurp(d1 / "table.csv") == slurp(d2 / "table.csv"));
        CHECK(slurp(d1 / "curves.csv") == slurp(d2 / "curves.csv"));
        std::filesystem::remove_all(d1);
        std::filesystem::remove_all(d2);
    }
    SUBCASE("unwritable directory raises an io error") {
        ExperimentConfig cfg = small_config("/proc/definitely/not/writable");
        std::vector<RunRecord> rs(1);
        rs[0].method = "pca";
        rs[0].final_k1 = 0.5;
        CHECK_THROWS_AS(
            emit_outputs(cfg, rs, aggregate(rs, 1), "/proc/definitely/not/writable"),
            IoError);
    }
}
