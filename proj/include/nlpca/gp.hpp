#ifndef NLPCA_GP_HPP
#define NLPCA_GP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nlpca/data.hpp"
#include "nlpca/report.hpp"
#include "nlpca/rng.hpp"
#include "nlpca/schema.hpp"

namespace nlpca::gp {

using nlpca::GenerationReport;

enum class Op { Add, Sub, Mul, Cos, Sin };

int arity(Op op);
std::string op_name(Op op);

// Expression tree node. Terminals are either the tree's own variable or a
// constant drawn from N(0,1) at creation time; constants never change after
// that.
struct Node {
    enum class Kind { Func, Var, Const };
    Kind kind = Kind::Var;
    Op op = Op::Add;
    double value = 0.0;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;  // null for unary ops and terminals
};

using Tree = std::unique_ptr<Node>;

Tree clone(const Node& node);
int depth(const Node& node);
int tree_size(const Node& node);

struct GpConfig {
    double crossover_rate = 0.8;
    double subtree_rate = 0.2;
    double operator_rate = 0.2;
    int population = 1000;
    int generations = 100;
    int depth_min = 2;
    int depth_max = 7;
    int tournament = 7;
    std::uint64_t seed = 0;
};

void validate(const GpConfig& cfg);

struct Individual {
    std::vector<Tree> trees;   // aligned with the variables
    Eigen::VectorXd fitness;   // per-variable partial objective
    double global_fitness = 0.0;
};

Individual clone(const Individual& ind);

// Ramped half-and-half over the depth ramp [depth_min, depth_max]; grow
// trees are forced to reach depth_min. Throws UnsupportedSchemaError when a
// non-numerical column is present.
std::vector<Individual> init_population(const GpConfig& cfg,
                                        const std::vector<VariableSchema>& schemas,
                                        Rng& rng);

// Pointwise evaluation; non-finite results are replaced by 0 and counted in
// *nonfinite when given.
Eigen::VectorXd eval_tree(const Node& node, const Eigen::VectorXd& column,
                          int* nonfinite = nullptr);

// Best of `size` uniform draws (with replacement) by fitness of variable
// `var`; ties go to the lower population index.
int tournament_select(const std::vector<Individual>& population,
                      const Eigen::MatrixXd& fitness, int var, int size, Rng& rng);

// Random subtree swap between two trees of the same variable. Offspring
// deeper than depth_max are repaired by replacing the violating subtree
// with a terminal; an offspring reduced to a bare terminal falls back to a
// copy of its parent.
std::pair<Tree, Tree> crossover(const Node& a, const Node& b, const GpConfig& cfg,
                                Rng& rng);

// Subtree mutation with probability subtree_rate, operator mutation with
// probability operator_rate (arity-preserving swap).
Tree mutate(Tree tree, const GpConfig& cfg, Rng& rng);

// Infix pretty-printer, e.g. "(2 * x) + cos(x)".
std::string to_string(const Node& node, const std::string& var_name);

struct EvolveResult {
    Individual best;
    std::vector<GenerationReport> history;
    std::vector<std::string> expressions;  // best individual, one per variable
    std::vector<Eigen::VectorXd> best_partial_history;  // per generation, per variable
};

// Generational evolution with per-variable elitism: for every variable the
// individual holding the best partial objective survives unchanged, so the
// best per-variable fitness never decreases. Fitness is evaluated on the
// full training set.
EvolveResult evolve(const DataTable& table, const SplitPair& split,
                    const GpConfig& cfg, int k, bool parallel = true);

}  // namespace nlpca::gp

#endif
