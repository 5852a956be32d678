#include "nlpca/schema.hpp"

#include <unordered_set>

#include "nlpca/error.hpp"

namespace nlpca {

void validate_schema(const VariableSchema& schema) {
    if (schema.kind == VarKind::Numerical) {
        return;
    }
    if (schema.levels.empty()) {
        throw ConfigError("schema '" + schema.name + "': " + kind_name(schema.kind) +
                          " column needs a non-empty level list");
    }
    std::unordered_set<std::string> seen;
    for (const auto& level : schema.levels) {
        if (!seen.insert(level).second) {
            throw ConfigError("schema '" + schema.name + "': duplicate level '" +
                              level + "'");
        }
    }
}

std::string kind_name(VarKind kind) {
    switch (kind) {
        case VarKind::Numerical: return "numerical";
        case VarKind::Categorical: return "categorical";
        case VarKind::Ordinal: return "ordinal";
    }
    return "?";
}

}  // namespace nlpca
