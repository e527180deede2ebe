#pragma once

#include <cstdint>
#include <vector>

#include "dual/matrix.hpp"

namespace dual {

// One-vs-rest linear SVM. Row c of weights and intercepts[c] belong to
// class_labels[c]; decision scores are w^T x + b per class.
struct LinearSvmModel {
    Matrix weights;                  // n_classes x d
    std::vector<double> intercepts;  // n_classes
    std::vector<int> class_labels;   // labels present in training, ascending
    double c = 100.0;
    std::size_t iterations = 0;
    double final_objective = 0.0;  // summed best primal objective over the binary problems
    bool degenerate = false;       // single-class training set
};

// Minimizes (1/2)||w||^2 + C sum_i max(0, 1 - y_i (w^T x_i + b)) per binary
// one-vs-rest problem with deterministic full-batch subgradient descent on the
// 1/(lambda t) schedule, lambda = 1/(C n). The best-objective iterate over the
// fixed budget is returned. x holds one sample per column.
LinearSvmModel svm_train(const Matrix& x, const std::vector<int>& y, double c = 100.0,
                         std::size_t iterations = 10000);

// n_classes x n decision values
Matrix decision_scores(const LinearSvmModel& model, const Matrix& x);

// argmax class per column, score ties to the lower class label
std::vector<int> predict(const LinearSvmModel& model, const Matrix& x);

}  // namespace dual
