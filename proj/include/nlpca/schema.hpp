#ifndef NLPCA_SCHEMA_HPP
#define NLPCA_SCHEMA_HPP

#include <string>
#include <vector>

namespace nlpca {

enum class VarKind { Numerical, Categorical, Ordinal };

// Column description. `levels` holds the closed set of categorical labels,
// or the rank labels in increasing order for ordinal columns.
struct VariableSchema {
    std::string name;
    VarKind kind = VarKind::Numerical;
    std::vector<std::string> levels;

    bool operator==(const VariableSchema&) const = default;
};

// Throws ConfigError on duplicate levels or an empty level list for
// categorical/ordinal columns.
void validate_schema(const VariableSchema& schema);

std::string kind_name(VarKind kind);

}  // namespace nlpca

#endif
