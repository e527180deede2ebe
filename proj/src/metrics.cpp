#include "dual/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "dual/errors.hpp"

namespace dual {

double binary_auc(const std::vector<double>& scores, const std::vector<char>& positive) {
    const std::size_t n = scores.size();
    if (positive.size() != n) throw ContractViolation("binary_auc: length mismatch");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks over tie groups, 1-based
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
        i = j + 1;
    }

    std::size_t n_pos = 0;
    double rank_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (positive[t]) {
            ++n_pos;
            rank_sum += rank[t];
        }
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw ContractViolation("binary_auc: needs both positive and negative samples");

    const double u = rank_sum - static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Metrics evaluate(const LinearSvmModel& model, const Matrix& x_test,
                 const std::vector<int>& y_test) {
    const std::size_t n = x_test.cols();
    if (n == 0) throw ContractViolation("evaluate: empty test set");
    if (y_test.size() != n) throw ContractViolation("evaluate: label count mismatch");

    Metrics metrics;
    const std::vector<int> predicted = predict(model, x_test);
    std::size_t correct = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (predicted[j] == y_test[j]) ++correct;
    metrics.accuracy = static_cast<double>(correct) / static_cast<double>(n);

    const Matrix scores = decision_scores(model, x_test);
    std::set<int> all_classes(model.class_labels.begin(), model.class_labels.end());
    all_classes.insert(y_test.begin(), y_test.end());

    for (int cls : all_classes) {
        const auto it =
            std::find(model.class_labels.begin(), model.class_labels.end(), cls);
        std::size_t n_pos = 0;
        for (int y : y_test)
            if (y == cls) ++n_pos;
        // needs decision scores plus both outcomes in the test labels
        if (it == model.class_labels.end() || n_pos == 0 || n_pos == n) {
            metrics.classes_excluded.push_back(cls);
            continue;
        }
        const std::size_t row = static_cast<std::size_t>(it - model.class_labels.begin());
        std::vector<double> cls_scores(n);
        std::vector<char> positive(n);
        for (std::size_t j = 0; j < n; ++j) {
            cls_scores[j] = scores(row, j);
            positive[j] = y_test[j] == cls ? 1 : 0;
        }
        metrics.classes_evaluated.push_back(cls);
        metrics.per_class_auc.push_back(binary_auc(cls_scores, positive));
    }

    if (!metrics.per_class_auc.empty()) {
        double sum = 0.0;
        for (double a : metrics.per_class_auc) sum += a;
        metrics.auc_macro = sum / static_cast<double>(metrics.per_class_auc.size());
    }
    return metrics;
}

}  // namespace dual
