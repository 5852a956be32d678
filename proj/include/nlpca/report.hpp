#ifndef NLPCA_REPORT_HPP
#define NLPCA_REPORT_HPP

namespace nlpca {

// One generation of an iterative optimizer, as recorded by the harness.
struct GenerationReport {
    int generation = 0;
    double train_objective = 0.0;        // sum of leading k eigenvalues, full train fit
    double validation_proportion = 0.0;  // explained variance at k on validation
    double seconds = 0.0;                // wall clock; never serialized
};

}  // namespace nlpca

#endif
