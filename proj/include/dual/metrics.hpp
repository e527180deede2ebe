#pragma once

#include <vector>

#include "dual/matrix.hpp"
#include "dual/svm.hpp"

namespace dual {

struct Metrics {
    double accuracy = 0.0;
    double auc_macro = 0.0;
    std::vector<double> per_class_auc;   // aligned with classes_evaluated
    std::vector<int> classes_evaluated;  // classes entering the macro average
    std::vector<int> classes_excluded;   // absent from the test labels (or scoreless)
};

// Binary AUC from the rank statistic; tied scores contribute 1/2 per pair.
// positive[i] != 0 marks the positive class.
double binary_auc(const std::vector<double>& scores, const std::vector<char>& positive);

// Accuracy of the argmax decision plus macro one-vs-rest AUC over the classes
// with both positives and negatives in y_test.
Metrics evaluate(const LinearSvmModel& model, const Matrix& x_test,
                 const std::vector<int>& y_test);

}  // namespace dual
