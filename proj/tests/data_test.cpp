#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "nlpca/baselines.hpp"
#include "nlpca/data.hpp"
#include "nlpca/pca.hpp"

using namespace nlpca;

namespace {

struct TempFile {
    std::filesystem::path path;
    TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("gen_circles") {
    SUBCASE("noiseless radii are exact") {
        const DataTable t = gen_circles(100, 0.1, 0.0, 1);
        for (int i = 0; i < 100; ++i) {
            const double r = std::hypot(t.columns[0](i), t.columns[1](i));
            const double expect = i < 50 ? 1.0 : 0.1;
            CHECK(r == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("outer cluster mean radius under default noise") {
        const DataTable t = gen_circles(1000, 0.1, 0.1, 7);
        double mean = 0.0;
        for (int i = 0; i < 500; ++i) {
            mean += std::hypot(t.columns[0](i), t.columns[1](i));
        }
        mean /= 500;
        CHECK(std::abs(mean - 1.0) < 0.02);
    }
    SUBCASE("seed determinism") {
        const DataTable a = gen_circles(200, 0.1, 0.1, 5);
        const DataTable b = gen_circles(200, 0.1, 0.1, 5);
        CHECK(a.columns[0] == b.columns[0]);
        CHECK(a.columns[1] == b.columns[1]);
    }
}

TEST_CASE("gen_spheres") {
    SUBCASE("noiseless norms equal the sphere radii") {
        const DataTable t = gen_spheres(200, 1.0, 0.1, 0.0, 1);
        for (int i = 0; i < 200; ++i) {
            const double r = std::sqrt(t.columns[0](i) * t.columns[0](i) +
                                       t.columns[1](i) * t.columns[1](i) +
                                       t.columns[2](i) * t.columns[2](i));
            CHECK(r == doctest::Approx(i < 100 ? 1.0 : 0.1).epsilon(1e-9));
        }
    }
    SUBCASE("near-uniform coverage of the unit sphere") {
        const DataTable t = gen_spheres(1000, 1.0, 0.1, 0.0, 1);
        const int m = 500;
        std::vector<double> nn(m, 1e9);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                const double dx = t.columns[0](i) - t.columns[0](j);
                const double dy = t.columns[1](i) - t.columns[1](j);
                const double dz = t.columns[2](i) - t.columns[2](j);
                nn[i] = std::min(nn[i], std::sqrt(dx * dx + dy * dy + dz * dz));
            }
        }
        double mean = 0.0;
        for (double v : nn) mean += v;
        mean /= m;
        double ss = 0.0;
        for (double v : nn) ss += (v - mean) * (v - mean);
        const double cv = std::sqrt(ss / m) / mean;
        CHECK(cv < 0.5);
    }
    SUBCASE("seed determinism") {
        const DataTable a = gen_spheres(100, 1.0, 0.1, 0.1, 9);
        const DataTable b = gen_spheres(100, 1.0, 0.1, 0.1, 9);
        CHECK(a.columns[2] == b.columns[2]);
    }
}

TEST_CASE("gen_stripes") {
    const DataTable t = gen_stripes(1000, 42);
    SUBCASE("x1 hugs multiples of pi") {
        int within = 0;
        for (int i = 0; i < 1000; ++i) {
            const double x = t.columns[0](i);
            const double nearest = std::round(x / std::numbers::pi);
            if (std::abs(x - nearest * std::numbers::pi) < 0.5) {
                ++within;
            }
            CHECK(std::abs(nearest) <= 4);
        }
        CHECK(within >= 995);
    }
    SUBCASE("x2 is centered noise") {
        CHECK(std::abs(t.columns[1].mean()) < 0.02);
    }
    SUBCASE("x2 is the same draw added to the stripe offset") {
        for (int i = 0; i < 1000; ++i) {
            const double n = std::round(t.columns[0](i) / std::numbers::pi);
            CHECK(t.columns[0](i) - n * std::numbers::pi ==
                  doctest::Approx(t.columns[1](i)).epsilon(1e-12));
        }
    }
    SUBCASE("linear PCA splits the variance roughly evenly") {
        const SplitPair sp = split(t, 0.75, 1);
        const Eigen::MatrixXd X = t.as_matrix();
        const PcaModel model = fit_pca(gather_rows(X, sp.train));
        const double prop = model.eigenvalues(0) / model.eigenvalues.sum();
        CHECK(prop > 0.45);
        CHECK(prop < 0.55);
    }
}

TEST_CASE("load_table") {
    const std::string schema = R"([
      {"name": "age", "kind": "numerical"},
      {"name": "color", "kind": "categorical", "levels": ["red", "green", "blue"]},
      {"name": "class", "kind": "categorical", "levels": ["yes", "no"], "is_label": true}
    ])";

    SUBCASE("parses a numeric fixture") {
        TempFile data("t1.csv", "age,color,class\n1.5,red,yes\n2.5,green,no\n-3,red,yes\n");
        TempFile sidecar("t1.json", schema);
        const DataTable t = load_table(data.path.string(), sidecar.path.string());
        CHECK(t.rows() == 3);
        CHECK(t.cols() == 2);
        CHECK(t.columns[0](0) == doctest::Approx(1.5));
        CHECK(t.columns[0](2) == doctest::Approx(-3.0));
        CHECK(t.columns[1](1) == doctest::Approx(1.0));  // green
        CHECK(t.label_name == "class");
        CHECK(t.labels == std::vector<std::string>{"yes", "no", "yes"});
    }
    SUBCASE("bad numeric cell names the row and column") {
        TempFile data("t2.csv", "age,color,class\n1,red,yes\nabc,red,no\n2,blue,yes\n");
        TempFile sidecar("t2.json", schema);
        try {
            load_table(data.path.string(), sidecar.path.string());
            FAIL("expected LoadError");
        } catch (const LoadError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("row 2") != std::string::npos);
            CHECK(msg.find("age") != std::string::npos);
            CHECK(msg.find("abc") != std::string::npos);
        }
    }
    SUBCASE("closed-world levels keep the schema width") {
        TempFile data("t3.csv",
                      "age,color,class\n1,red,yes\n2,green,no\n3,red,yes\n4,green,no\n");
        TempFile sidecar("t3.json", schema);
        const DataTable t = load_table(data.path.string(), sidecar.path.string());
        // blue never appears, one-hot width stays 3
        const Eigen::MatrixXd X = baseline_matrix(t);
        CHECK(X.cols() == 1 + 3);
        CHECK(X.col(3).cwiseAbs().maxCoeff() == 0.0);  // blue indicator all zero
    }
    SUBCASE("unknown level is a load error with position") {
        TempFile data("t4.csv", "age,color,class\n1,purple,yes\n");
        TempFile sidecar("t4.json", schema);
        CHECK_THROWS_WITH_AS(load_table(data.path.string(), sidecar.path.string()),
                             doctest::Contains("purple"), UnknownLevelError);
    }
    SUBCASE("header and schema must agree") {
        TempFile data("t5.csv", "age,colour,class\n1,red,yes\n");
        TempFile sidecar("t5.json", schema);
        CHECK_THROWS_AS(load_table(data.path.string(), sidecar.path.string()),
                        LoadError);
    }
    SUBCASE("missing file") {
        TempFile sidecar("t6.json", schema);
        CHECK_THROWS_AS(load_table("/nonexistent/nope.csv", sidecar.path.string()),
                        IoError);
    }
}

TEST_CASE("split") {
    const DataTable t = gen_stripes(100, 3);
    SUBCASE("75/25 on round sizes") {
        const SplitPair sp = split(t, 0.75, 1);
        CHECK(sp.train.size() == 75);
        CHECK(sp.validation.size() == 25);
    }
    SUBCASE("floor rule on odd sizes") {
        const DataTable t101 = gen_stripes(101, 3);
        const SplitPair sp = split(t101, 0.75, 1);
        CHECK(sp.train.size() == 75);
        CHECK(sp.validation.size() == 26);
    }
    SUBCASE("disjoint cover") {
        const SplitPair sp = split(t, 0.75, 9);
        std::vector<bool> seen(100, false);
        for (auto i : sp.train) seen[i] = true;
        for (auto i : sp.validation) {
            CHECK(!seen[i]);
            seen[i] = true;
        }
        for (bool b : seen) CHECK(b);
    }
    SUBCASE("seed determinism") {
        const SplitPair a = split(t, 0.75, 4);
        const SplitPair b = split(t, 0.75, 4);
        CHECK(a.train == b.train);
        const SplitPair c = split(t, 0.75, 5);
        CHECK(a.train != c.train);
    }
    SUBCASE("too small") {
        const DataTable tiny = gen_stripes(3, 1);
        CHECK_THROWS_AS(split(tiny, 0.75, 1), InsufficientRowsError);
    }
}
