#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "nlpca/data.hpp"
#include "nlpca/error.hpp"
#include "nlpca/gp.hpp"

using namespace nlpca;
using gp::Node;
using gp::Op;
using gp::Tree;

namespace {

Tree var_node() {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Var;
    return n;
}

Tree const_node(double v) {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Const;
    n->value = v;
    return n;
}

Tree func(Op op, Tree left, Tree right = nullptr) {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Func;
    n->op = op;
    n->left = std::move(left);
    n->right = std::move(right);
    return n;
}

std::vector<VariableSchema> numeric_schemas(int p) {
    std::vector<VariableSchema> out;
    for (int i = 0; i < p; ++i) {
        out.push_back({"x" + std::to_string(i + 1), VarKind::Numerical, {}});
    }
    return out;
}

bool only_own_terminals(const Node& n) {
    if (n.kind != Node::Kind::Func) {
        return true;
    }
    bool ok = n.left && only_own_terminals(*n.left);
    if (n.right) {
        ok = ok && only_own_terminals(*n.right);
    }
    return ok;
}

}  // namespace

TEST_CASE("tree basics") {
    SUBCASE("a full depth-2 binary tree has three nodes") {
        const Tree t = func(Op::Add, var_node(), const_node(2.0));
        CHECK(gp::tree_size(*t) == 3);
        CHECK(gp::depth(*t) == 2);
    }
    SUBCASE("pretty printer") {
        // 2 * x + cos(x)
        Tree t = func(Op::Add, func(Op::Mul, const_node(2.0), var_node()),
                      func(Op::Cos, var_node()));
        CHECK(gp::to_string(*t, "x") == "((2 * x) + cos(x))");
    }
}

TEST_CASE("eval_tree") {
    Eigen::VectorXd x(3);
    x << 0.0, 1.0, std::numbers::pi / 2;
    SUBCASE("2*x + cos(x) at zero is one") {
        const Tree t = func(Op::Add, func(Op::Mul, const_node(2.0), var_node()),
                            func(Op::Cos, var_node()));
        const Eigen::VectorXd out = gp::eval_tree(*t, x);
        CHECK(out(0) == doctest::Approx(1.0));
        CHECK(out(1) == doctest::Approx(2.0 + std::cos(1.0)));
    }
    SUBCASE("constant tree gives a constant column") {
        const Tree t = func(Op::Mul, const_node(3.0), const_node(2.0));
        const Eigen::VectorXd out = gp::eval_tree(*t, x);
        for (int i = 0; i < 3; ++i) {
            CHECK(out(i) == doctest::Approx(6.0));
        }
    }
    SUBCASE("sin matches the standard library on a grid") {
        const Tree t = func(Op::Sin, var_node());
        Eigen::VectorXd grid(9);
        for (int i = 0; i < 9; ++i) {
            grid(i) = i * std::numbers::pi / 2;
        }
        const Eigen::VectorXd out = gp::eval_tree(*t, grid);
        for (int i = 0; i < 9; ++i) {
            CHECK(out(i) == doctest::Approx(std::sin(grid(i))).epsilon(1e-12));
        }
    }
    SUBCASE("non-finite values become zero with a count") {
        Tree t = func(Op::Mul, const_node(1e300), const_node(1e300));
        int bad = 0;
        const Eigen::VectorXd out = gp::eval_tree(*t, x, &bad);
        CHECK(bad == 3);
        CHECK(out.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("init_population") {
    gp::GpConfig cfg;
    cfg.population = 1000;
    cfg.seed = 3;
    const auto schemas = numeric_schemas(2);
    SUBCASE("covers the whole depth ramp and stays within bounds") {
        Rng rng(3);
        const auto pop = gp::init_population(cfg, schemas, rng);
        std::set<int> depths;
        for (const auto& ind : pop) {
            for (const auto& t : ind.trees) {
                const int d = gp::depth(*t);
                CHECK(d >= 2);
                CHECK(d <= 7);
                depths.insert(d);
            }
        }
        for (int d = 2; d <= 7; ++d) {
            CHECK(depths.count(d) == 1);
        }
    }
    SUBCASE("seed determinism") {
        Rng a(9), b(9);
        const auto pa = gp::init_population(cfg, schemas, a);
        const auto pb = gp::init_population(cfg, schemas, b);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            CHECK(gp::to_string(*pa[i].trees[0], "x") ==
                  gp::to_string(*pb[i].trees[0], "x"));
        }
    }
    SUBCASE("categorical columns are rejected") {
        std::vector<VariableSchema> bad = schemas;
        bad.push_back({"c", VarKind::Categorical, {"a", "b"}});
        Rng rng(1);
        CHECK_THROWS_AS(gp::init_population(cfg, bad, rng),
                        UnsupportedSchemaError);
    }
}

TEST_CASE("tournament_select") {
    gp::GpConfig cfg;
    cfg.population = 10;
    Rng rng(5);
    std::vector<gp::Individual> pop(10);
    Eigen::MatrixXd fitness(10, 1);
    for (int i = 0; i < 10; ++i) {
        fitness(i, 0) = i * 0.1;
    }
    SUBCASE("dominant individual wins whenever sampled") {
        fitness(3, 0) = 100.0;
        int wins = 0;
        const int draws = 2000;
        for (int i = 0; i < draws; ++i) {
            if (gp::tournament_select(pop, fitness, 0, 7, rng) == 3) {
                ++wins;
            }
        }
        // P(index 3 in a 7-draw sample) = 1 - 0.9^7 ~ 0.522
        CHECK(wins > draws * 0.45);
        CHECK(wins < draws * 0.60);
    }
    SUBCASE("size one degenerates to a uniform pick") {
        std::vector<int> counts(10, 0);
        for (int i = 0; i < 5000; ++i) {
            ++counts[gp::tournament_select(pop, fitness, 0, 1, rng)];
        }
        for (int c : counts) {
            CHECK(c > 350);
            CHECK(c < 650);
        }
    }
    SUBCASE("selection pressure lifts the mean") {
        double selected = 0.0;
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) {
            selected += fitness(gp::tournament_select(pop, fitness, 0, 7, rng), 0);
        }
        selected /= draws;
        CHECK(selected > fitness.col(0).mean());
    }
}

TEST_CASE("crossover and mutate keep the invariants") {
    gp::GpConfig cfg;
    cfg.seed = 7;
    Rng rng(7);
    SUBCASE("depth bounds survive fuzzing") {
        for (int i = 0; i < 10000; ++i) {
            Rng local(i);
            const Tree a = gp::mutate(
                gp::crossover(*func(Op::Add, var_node(),
                                    func(Op::Cos, func(Op::Mul, var_node(),
                                                       const_node(0.5)))),
                              *func(Op::Sin, func(Op::Sub, var_node(),
                                                  const_node(1.0))),
                              cfg, local)
                    .first,
                cfg, local);
            const int d = gp::depth(*a);
            CHECK(d >= 2);
            CHECK(d <= 7);
            CHECK(only_own_terminals(*a));
        }
    }
    SUBCASE("no-op rates give an identity mutation") {
        gp::GpConfig zero = cfg;
        zero.subtree_rate = 0.0;
        zero.operator_rate = 0.0;
        Tree t = func(Op::Add, var_node(), const_node(1.0));
        const std::string before = gp::to_string(*t, "x");
        t = gp::mutate(std::move(t), zero, rng);
        CHECK(gp::to_string(*t, "x") == before);
    }
    SUBCASE("operator mutation flips cos to sin") {
        gp::GpConfig flip = cfg;
        flip.subtree_rate = 0.0;
        flip.operator_rate = 1.0;
        Tree t = func(Op::Cos, var_node());
        t = gp::mutate(std::move(t), flip, rng);
        CHECK(gp::to_string(*t, "x") == "sin(x)");
    }
    SUBCASE("root swaps exchange whole trees") {
        // single-node picks hit the root with probability 1/size; over many
        // seeds both full exchanges must occur
        const Tree a = func(Op::Cos, var_node());
        const Tree b = func(Op::Sin, const_node(2.0));
        bool swapped = false;
        for (int i = 0; i < 200 && !swapped; ++i) {
            Rng local(1000 + i);
            const auto [ca, cb] = gp::crossover(*a, *b, cfg, local);
            swapped = gp::to_string(*ca, "x") == gp::to_string(*b, "x") &&
                      gp::to_string(*cb, "x") == gp::to_string(*a, "x");
        }
        CHECK(swapped);
    }
}

TEST_CASE("evolve") {
    SUBCASE("zero generations return the best random individual") {
        const DataTable t = gen_stripes(200, 5);
        const SplitPair sp = split(t, 0.75, 5);
        gp::GpConfig cfg;
        cfg.population = 50;
        cfg.generations = 0;
        cfg.seed = 5;
        const gp::EvolveResult r = gp::evolve(t, sp, cfg, 1);
        CHECK(r.history.empty());
        CHECK(r.best.global_fitness >= 0.0);
        CHECK(r.expressions.size() == 2);
    }
    SUBCASE("per-variable elitism keeps best fitness non-decreasing") {
        const DataTable t = gen_stripes(300, 6);
        const SplitPair sp = split(t, 0.75, 6);
        gp::GpConfig cfg;
        cfg.population = 80;
        cfg.generations = 8;
        cfg.seed = 6;
        const gp::EvolveResult r = gp::evolve(t, sp, cfg, 1);
        REQUIRE(r.best_partial_history.size() == 8);
        for (std::size_t g = 1; g < r.best_partial_history.size(); ++g) {
            for (int l = 0; l < 2; ++l) {
                CHECK(r.best_partial_history[g](l) >=
                      r.best_partial_history[g - 1](l) - 1e-12);
            }
        }
    }
    SUBCASE("stripes structure is discovered") {
        const DataTable t = gen_stripes(1000, 7);
        const SplitPair sp = split(t, 0.75, 7);
        gp::GpConfig cfg;
        cfg.population = 400;
        cfg.generations = 30;
        cfg.seed = 7;
        const gp::EvolveResult r = gp::evolve(t, sp, cfg, 1);
        CHECK(r.history.back().train_objective / 2.0 >= 0.95);
    }
    SUBCASE("circles beat the linear baseline") {
        const DataTable t = gen_circles(1000, 0.1, 0.1, 8);
        const SplitPair sp = split(t, 0.75, 8);
        gp::GpConfig cfg;
        cfg.population = 400;
        cfg.generations = 30;
        cfg.seed = 8;
        const gp::EvolveResult r = gp::evolve(t, sp, cfg, 1);
        CHECK(r.history.back().validation_proportion > 0.498);
    }
    SUBCASE("determinism") {
        const DataTable t = gen_stripes(200, 9);
        const SplitPair sp = split(t, 0.75, 9);
        gp::GpConfig cfg;
        cfg.population = 40;
        cfg.generations = 3;
        cfg.seed = 9;
        const gp::EvolveResult a = gp::evolve(t, sp, cfg, 1);
        const gp::EvolveResult b = gp::evolve(t, sp, cfg, 1);
        CHECK(a.expressions == b.expressions);
        CHECK(a.best.global_fitness == b.best.global_fitness);
    }
}
