#include "nlpca/gp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nlpca/error.hpp"
#include "nlpca/pca.hpp"

namespace nlpca::gp {

int arity(Op op) {
    return (op == Op::Cos || op == Op::Sin) ? 1 : 2;
}

std::string op_name(Op op) {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Cos: return "cos";
        case Op::Sin: return "sin";
    }
    return "?";
}

Tree clone(const Node& node) {
    auto copy = std::make_unique<Node>();
    copy->kind = node.kind;
    copy->op = node.op;
    copy->value = node.value;
    if (node.left) {
        copy->left = clone(*node.left);
    }
    if (node.right) {
        copy->right = clone(*node.right);
    }
    return copy;
}

int depth(const Node& node) {
    if (node.kind != Node::Kind::Func) {
        return 1;
    }
    int d = node.left ? depth(*node.left) : 0;
    if (node.right) {
        d = std::max(d, depth(*node.right));
    }
    return 1 + d;
}

int tree_size(const Node& node) {
    int n = 1;
    if (node.left) {
        n += tree_size(*node.left);
    }
    if (node.right) {
        n += tree_size(*node.right);
    }
    return n;
}

void validate(const GpConfig& cfg) {
    auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!prob(cfg.crossover_rate) || !prob(cfg.subtree_rate) ||
        !prob(cfg.operator_rate)) {
        throw ConfigError("gp: rates must lie in [0,1]");
    }
    if (cfg.population < 2 || cfg.generations < 0 || cfg.tournament < 1) {
        throw ConfigError("gp: population/generations/tournament out of range");
    }
    if (cfg.depth_min < 1 || cfg.depth_max < cfg.depth_min) {
        throw ConfigError("gp: depth bounds invalid");
    }
}

Individual clone(const Individual& ind) {
    Individual out;
    out.trees.reserve(ind.trees.size());
    for (const auto& t : ind.trees) {
        out.trees.push_back(clone(*t));
    }
    out.fitness = ind.fitness;
    out.global_fitness = ind.global_fitness;
    return out;
}

namespace {

Op random_op(Rng& rng) {
    static constexpr Op kOps[] = {Op::Sub, Op::Add, Op::Mul, Op::Cos, Op::Sin};
    std::uniform_int_distribution<int> pick(0, 4);
    return kOps[pick(rng)];
}

Tree random_terminal(Rng& rng) {
    auto node = std::make_unique<Node>();
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < 0.5) {
        node->kind = Node::Kind::Var;
    } else {
        node->kind = Node::Kind::Const;
        std::normal_distribution<double> gauss(0.0, 1.0);
        node->value = gauss(rng);
    }
    return node;
}

// depth_left counts the levels still available including this node;
// min_left forces function nodes until the minimum depth is reachable.
Tree random_tree(Rng& rng, int depth_left, int min_left, bool full) {
    if (depth_left <= 1) {
        return random_terminal(rng);
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (min_left <= 1 && !full && coin(rng) < 0.3) {
        return random_terminal(rng);
    }
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::Func;
    node->op = random_op(rng);
    node->left = random_tree(rng, depth_left - 1, min_left - 1, full);
    if (arity(node->op) == 2) {
        node->right = random_tree(rng, depth_left - 1, min_left - 1, full);
    }
    return node;
}

void collect(Node& node, std::vector<Node*>& out) {
    out.push_back(&node);
    if (node.left) {
        collect(*node.left, out);
    }
    if (node.right) {
        collect(*node.right, out);
    }
}

void collect_funcs(Node& node, std::vector<Node*>& out) {
    if (node.kind == Node::Kind::Func) {
        out.push_back(&node);
    }
    if (node.left) {
        collect_funcs(*node.left, out);
    }
    if (node.right) {
        collect_funcs(*node.right, out);
    }
}

// Replaces function nodes that have no room left with fresh terminals.
void truncate_depth(Node& node, int depth_left, Rng& rng) {
    if (node.kind != Node::Kind::Func) {
        return;
    }
    if (depth_left <= 1) {
        Tree t = random_terminal(rng);
        node = std::move(*t);
        return;
    }
    truncate_depth(*node.left, depth_left - 1, rng);
    if (node.right) {
        truncate_depth(*node.right, depth_left - 1, rng);
    }
}

}  // namespace

std::vector<Individual> init_population(const GpConfig& cfg,
                                        const std::vector<VariableSchema>& schemas,
                                        Rng& rng) {
    validate(cfg);
    for (const auto& s : schemas) {
        if (s.kind != VarKind::Numerical) {
            throw UnsupportedSchemaError("gp: column '" + s.name +
                                         "' is not numerical; trees only "
                                         "transform numerical variables");
        }
    }
    const int ramp = cfg.depth_max - cfg.depth_min + 1;
    std::vector<Individual> population;
    population.reserve(cfg.population);
    for (int i = 0; i < cfg.population; ++i) {
        const int limit = cfg.depth_min + i % ramp;
        const bool full = (i / ramp) % 2 == 0;
        Individual ind;
        ind.fitness = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(schemas.size()));
        for (std::size_t l = 0; l < schemas.size(); ++l) {
            Tree t = random_tree(rng, limit, cfg.depth_min, full);
            if (t->kind != Node::Kind::Func) {
                // grow can bottom out early; wrap to honor the minimum depth
                auto wrap = std::make_unique<Node>();
                wrap->kind = Node::Kind::Func;
                wrap->op = random_op(rng);
                wrap->left = std::move(t);
                if (arity(wrap->op) == 2) {
                    wrap->right = random_terminal(rng);
                }
                t = std::move(wrap);
            }
            ind.trees.push_back(std::move(t));
        }
        population.push_back(std::move(ind));
    }
    return population;
}

Eigen::VectorXd eval_tree(const Node& node, const Eigen::VectorXd& column,
                          int* nonfinite) {
    Eigen::VectorXd out;
    switch (node.kind) {
        case Node::Kind::Var:
            out = column;
            break;
        case Node::Kind::Const:
            out = Eigen::VectorXd::Constant(column.size(), node.value);
            break;
        case Node::Kind::Func: {
            Eigen::VectorXd a = eval_tree(*node.left, column, nullptr);
            switch (node.op) {
                case Op::Cos: out = a.array().cos(); break;
                case Op::Sin: out = a.array().sin(); break;
                case Op::Add: out = a + eval_tree(*node.right, column, nullptr); break;
                case Op::Sub: out = a - eval_tree(*node.right, column, nullptr); break;
                case Op::Mul:
                    out = a.cwiseProduct(eval_tree(*node.right, column, nullptr));
                    break;
            }
            break;
        }
    }
    if (!out.allFinite()) {
        int bad = 0;
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            if (!std::isfinite(out(i))) {
                out(i) = 0.0;
                ++bad;
            }
        }
        if (nonfinite != nullptr) {
            *nonfinite += bad;
        }
    }
    return out;
}

int tournament_select(const std::vector<Individual>& population,
                      const Eigen::MatrixXd& fitness, int var, int size, Rng& rng) {
    if (population.empty()) {
        throw ConfigError("tournament_select: empty population");
    }
    std::uniform_int_distribution<int> pick(0, static_cast<int>(population.size()) - 1);
    int best = pick(rng);
    for (int i = 1; i < size; ++i) {
        const int c = pick(rng);
        if (fitness(c, var) > fitness(best, var) ||
            (fitness(c, var) == fitness(best, var) && c < best)) {
            best = c;
        }
    }
    return best;
}

std::pair<Tree, Tree> crossover(const Node& a, const Node& b, const GpConfig& cfg,
                                Rng& rng) {
    Tree ca = clone(a);
    Tree cb = clone(b);
    std::vector<Node*> na, nb;
    collect(*ca, na);
    collect(*cb, nb);
    std::uniform_int_distribution<std::size_t> pa(0, na.size() - 1);
    std::uniform_int_distribution<std::size_t> pb(0, nb.size() - 1);
    std::swap(*na[pa(rng)], *nb[pb(rng)]);
    truncate_depth(*ca, cfg.depth_max, rng);
    truncate_depth(*cb, cfg.depth_max, rng);
    if (ca->kind != Node::Kind::Func) {
        ca = clone(a);
    }
    if (cb->kind != Node::Kind::Func) {
        cb = clone(b);
    }
    return {std::move(ca), std::move(cb)};
}

Tree mutate(Tree tree, const GpConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < cfg.subtree_rate) {
        std::vector<Node*> nodes;
        collect(*tree, nodes);
        std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
        Node* target = nodes[pick(rng)];
        Tree sub = random_tree(rng, std::min(4, cfg.depth_max), 1, false);
        *target = std::move(*sub);
        truncate_depth(*tree, cfg.depth_max, rng);
        if (tree->kind != Node::Kind::Func) {
            auto wrap = std::make_unique<Node>();
            wrap->kind = Node::Kind::Func;
            wrap->op = Op::Cos;
            wrap->left = std::move(tree);
            tree = std::move(wrap);
        }
    }
    if (coin(rng) < cfg.operator_rate) {
        std::vector<Node*> funcs;
        collect_funcs(*tree, funcs);
        if (!funcs.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, funcs.size() - 1);
            Node* target = funcs[pick(rng)];
            if (arity(target->op) == 1) {
                target->op = target->op == Op::Cos ? Op::Sin : Op::Cos;
            } else {
                static constexpr Op kBinary[] = {Op::Sub, Op::Add, Op::Mul};
                std::uniform_int_distribution<int> two(0, 1);
                int offset = two(rng);
                for (int i = 0, seen = 0; i < 3; ++i) {
                    if (kBinary[i] != target->op && seen++ == offset) {
                        target->op = kBinary[i];
                        break;
                    }
                }
            }
        }
    }
    return tree;
}

std::string to_string(const Node& node, const std::string& var_name) {
    switch (node.kind) {
        case Node::Kind::Var:
            return var_name;
        case Node::Kind::Const: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", node.value);
            return buf;
        }
        case Node::Kind::Func:
            if (arity(node.op) == 1) {
                return op_name(node.op) + "(" + to_string(*node.left, var_name) + ")";
            }
            return "(" + to_string(*node.left, var_name) + " " + op_name(node.op) +
                   " " + to_string(*node.right, var_name) + ")";
    }
    return "?";
}

namespace {

struct FitnessEval {
    Eigen::VectorXd per_variable;
    double global = 0.0;
};

FitnessEval evaluate_individual(const Individual& ind,
                                const std::vector<Eigen::VectorXd>& columns, int k) {
    const int p = static_cast<int>(columns.size());
    Eigen::MatrixXd transformed(columns[0].size(), p);
    for (int l = 0; l < p; ++l) {
        transformed.col(l) = eval_tree(*ind.trees[l], columns[l]);
    }
    FitnessEval out;
    out.per_variable = Eigen::VectorXd::Zero(p);
    try {
        const Standardizer std_fit = fit_standardizer(transformed);
        const Eigen::MatrixXd S = covariance(std_fit.apply(transformed));
        const EigenSystem es = eig_sym(S);
        const ContributionMatrix c = contributions(es.vectors, S);
        out.global = es.values.head(k).sum();
        for (int l = 0; l < p; ++l) {
            out.per_variable(l) = c.col(l).head(k).sum();
        }
    } catch (const Error&) {
        out.global = 0.0;
        out.per_variable.setZero();
    }
    return out;
}

}  // namespace

EvolveResult evolve(const DataTable& table, const SplitPair& split,
                    const GpConfig& cfg, int k, bool parallel) {
    validate(cfg);
    const int p = table.cols();
    if (k < 1 || k >= p) {
        throw ConfigError("gp: k must satisfy 1 <= k < p");
    }

    std::vector<Eigen::VectorXd> train_cols(p), val_cols(p);
    for (int l = 0; l < p; ++l) {
        train_cols[l] = gather(table.columns[l], split.train);
        val_cols[l] = gather(table.columns[l], split.validation);
    }

    Rng rng(derive_seed(cfg.seed, 2));
    std::vector<Individual> population = init_population(cfg, table.schemas, rng);
    const int pop = cfg.population;

    Eigen::MatrixXd fitness(pop, p);
    Eigen::VectorXd global(pop);
    auto evaluate_all = [&](std::vector<Individual>& pop_ref) {
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (int i = 0; i < pop; ++i) {
            const FitnessEval fe = evaluate_individual(pop_ref[i], train_cols, k);
            fitness.row(i) = fe.per_variable.transpose();
            global(i) = fe.global;
            pop_ref[i].fitness = fe.per_variable;
            pop_ref[i].global_fitness = fe.global;
        }
    };
    evaluate_all(population);

    EvolveResult result;
    for (int g = 0; g < cfg.generations; ++g) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Individual> next;
        next.reserve(pop);
        // Per-variable elites: the whole individual holding the best partial
        // objective for each variable survives unchanged.
        for (int l = 0; l < p && static_cast<int>(next.size()) < pop; ++l) {
            int best = 0;
            for (int i = 1; i < pop; ++i) {
                if (fitness(i, l) > fitness(best, l)) {
                    best = i;
                }
            }
            next.push_back(clone(population[best]));
        }
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        while (static_cast<int>(next.size()) < pop) {
            Individual child;
            child.fitness = Eigen::VectorXd::Zero(p);
            for (int l = 0; l < p; ++l) {
                const int i1 = tournament_select(population, fitness, l,
                                                 cfg.tournament, rng);
                Tree t;
                if (coin(rng) < cfg.crossover_rate) {
                    const int i2 = tournament_select(population, fitness, l,
                                                     cfg.tournament, rng);
                    t = crossover(*population[i1].trees[l],
                                  *population[i2].trees[l], cfg, rng)
                            .first;
                } else {
                    t = clone(*population[i1].trees[l]);
                }
                child.trees.push_back(mutate(std::move(t), cfg, rng));
            }
            next.push_back(std::move(child));
        }
        population = std::move(next);
        evaluate_all(population);

        int best = 0;
        for (int i = 1; i < pop; ++i) {
            if (global(i) > global(best)) {
                best = i;
            }
        }
        // Reporting fit for the incumbent.
        Eigen::MatrixXd transformed_train(train_cols[0].size(), p);
        Eigen::MatrixXd transformed_val(val_cols[0].size(), p);
        for (int l = 0; l < p; ++l) {
            transformed_train.col(l) = eval_tree(*population[best].trees[l], train_cols[l]);
            transformed_val.col(l) = eval_tree(*population[best].trees[l], val_cols[l]);
        }
        GenerationReport report;
        report.generation = g;
        try {
            const PcaModel model = fit_pca(transformed_train);
            report.train_objective = model.eigenvalues.head(k).sum();
            report.validation_proportion =
                explained_variance_validation(model, transformed_val, k);
        } catch (const Error&) {
            report.train_objective = 0.0;
            report.validation_proportion = 0.0;
        }
        report.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        result.history.push_back(report);
        result.best_partial_history.push_back(fitness.colwise().maxCoeff());
    }

    int best = 0;
    for (int i = 1; i < pop; ++i) {
        if (global(i) > global(best)) {
            best = i;
        }
    }
    result.best = clone(population[best]);
    for (int l = 0; l < p; ++l) {
        result.expressions.push_back(
            to_string(*result.best.trees[l], table.schemas[l].name));
    }
    return result;
}

}  // namespace nlpca::gp
