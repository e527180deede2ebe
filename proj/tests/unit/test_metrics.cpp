#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "dual/errors.hpp"
#include "dual/matrix.hpp"
#include "dual/metrics.hpp"
#include "dual/rng.hpp"
#include "dual/svm.hpp"

using namespace dual;

namespace {

// O(n^2) pair counting: ties contribute one half
double brute_force_auc(const std::vector<double>& scores, const std::vector<char>& positive) {
    double numerator = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!positive[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (positive[j]) continue;
            ++pairs;
            if (scores[i] > scores[j])
                numerator += 1.0;
            else if (scores[i] == scores[j])
                numerator += 0.5;
        }
    }
    return numerator / static_cast<double>(pairs);
}

LinearSvmModel manual_model(Matrix weights, std::vector<double> intercepts,
                            std::vector<int> labels) {
    LinearSvmModel model;
    model.weights = std::move(weights);
    model.intercepts = std::move(intercepts);
    model.class_labels = std::move(labels);
    return model;
}

}  // namespace

TEST_CASE("binary_auc: hand-counted mixed ordering gives 0.75") {
    const std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
    const std::vector<char> positive{0, 0, 1, 1};
    CHECK(binary_auc(scores, positive) == 0.75);
}

TEST_CASE("binary_auc: perfect separation gives 1, constant scores give one half") {
    CHECK(binary_auc({0.0, 0.1, 0.9, 1.0}, {0, 0, 1, 1}) == 1.0);
    CHECK(binary_auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);
}

TEST_CASE("binary_auc: single-class input is rejected") {
    CHECK_THROWS_AS(binary_auc({0.1, 0.2}, {1, 1}), ContractViolation);
    CHECK_THROWS_AS(binary_auc({0.1, 0.2}, {0, 0}), ContractViolation);
}

TEST_CASE("binary_auc: equals the quadratic pair-counting oracle exactly") {
    RandomEngine rng(91);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.next_index(199);
        std::vector<double> scores(n);
        std::vector<char> positive(n, 0);
        const bool quantize = trial % 2 == 0;  // force heavy ties on half the trials
        for (std::size_t i = 0; i < n; ++i) {
            const double raw = rng.next_double();
            scores[i] = quantize ? std::floor(raw * 8.0) / 8.0 : raw;
            positive[i] = rng.next_index(2) == 1 ? 1 : 0;
        }
        // need both classes present
        positive[0] = 1;
        positive[n - 1] = 0;
        CHECK(binary_auc(scores, positive) == brute_force_auc(scores, positive));
    }
}

TEST_CASE("binary_auc: invariant under strictly increasing transforms") {
    RandomEngine rng(97);
    std::vector<double> scores(60);
    std::vector<char> positive(60, 0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = static_cast<double>(rng.next_index(64)) / 64.0;  // ties likely, transforms safe
        positive[i] = rng.next_index(2) == 1 ? 1 : 0;
    }
    positive[0] = 1;
    positive[1] = 0;
    const double base = binary_auc(scores, positive);

    std::vector<double> affine(scores.size());
    std::vector<double> exponential(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        affine[i] = 2.0 * scores[i] + 1.0;
        exponential[i] = std::exp(scores[i]);
    }
    CHECK(binary_auc(affine, positive) == base);
    CHECK(binary_auc(exponential, positive) == base);
}

TEST_CASE("evaluate: indicator scores give perfect accuracy and AUC") {
    // features are one-hot class indicators, weights the identity: the score
    // of the true class is 1, every other 0
    const LinearSvmModel model = manual_model(Matrix::identity(3), {0.0, 0.0, 0.0}, {0, 1, 2});
    Matrix x_test = Matrix::zeros(3, 6);
    std::vector<int> y_test{0, 1, 2, 2, 1, 0};
    for (std::size_t j = 0; j < y_test.size(); ++j)
        x_test(static_cast<std::size_t>(y_test[j]), j) = 1.0;
    const Metrics metrics = evaluate(model, x_test, y_test);
    CHECK(metrics.accuracy == 1.0);
    CHECK(metrics.auc_macro == 1.0);
    CHECK(metrics.classes_evaluated == std::vector<int>{0, 1, 2});
    CHECK(metrics.classes_excluded.empty());
}

TEST_CASE("evaluate: constant scores give one-half AUC for every class") {
    const LinearSvmModel model = manual_model(Matrix::zeros(2, 3), {0.0, 0.0}, {0, 1});
    RandomEngine rng(101);
    const Matrix x_test = Matrix::random_uniform(3, 10, -1.0, 1.0, rng);
    const std::vector<int> y_test{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const Metrics metrics = evaluate(model, x_test, y_test);
    CHECK(metrics.auc_macro == 0.5);
    for (double auc : metrics.per_class_auc) CHECK(auc == 0.5);
    // argmax ties resolve to the lower class label
    CHECK(metrics.accuracy == 0.5);
}

TEST_CASE("evaluate: a class absent from the test labels is excluded and recorded") {
    const LinearSvmModel model = manual_model(Matrix::identity(3), {0.0, 0.0, 0.0}, {0, 1, 2});
    Matrix x_test = Matrix::zeros(3, 4);
    std::vector<int> y_test{0, 1, 0, 1};  // class 2 never appears
    for (std::size_t j = 0; j < y_test.size(); ++j)
        x_test(static_cast<std::size_t>(y_test[j]), j) = 1.0;
    const Metrics metrics = evaluate(model, x_test, y_test);
    CHECK(metrics.classes_evaluated == std::vector<int>{0, 1});
    CHECK(metrics.classes_excluded == std::vector<int>{2});
    CHECK(metrics.per_class_auc.size() == 2);
}

TEST_CASE("evaluate: invariant to permuting the test set") {
    RandomEngine rng(103);
    const Matrix weights = Matrix::random_uniform(3, 4, -1.0, 1.0, rng);
    const LinearSvmModel model = manual_model(weights, {0.1, -0.2, 0.05}, {0, 1, 2});
    const std::size_t n = 40;
    Matrix x_test = Matrix::random_uniform(4, n, -2.0, 2.0, rng);
    std::vector<int> y_test(n);
    for (std::size_t i = 0; i < n; ++i) y_test[i] = static_cast<int>(rng.next_index(3));

    const Metrics base = evaluate(model, x_test, y_test);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    RandomEngine shuffler(105);
    shuffler.shuffle(perm);
    Matrix x_perm(4, n);
    std::vector<int> y_perm(n);
    for (std::size_t i = 0; i < n; ++i) {
        x_perm.set_column(i, x_test.column(perm[i]));
        y_perm[i] = y_test[perm[i]];
    }
    const Metrics shuffled = evaluate(model, x_perm, y_perm);
    CHECK(shuffled.accuracy == base.accuracy);
    CHECK(shuffled.auc_macro == base.auc_macro);
}

TEST_CASE("evaluate: macro AUC equals the mean of brute-force per-class AUCs") {
    RandomEngine rng(107);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 20 + rng.next_index(180);
        const Matrix weights = Matrix::random_uniform(3, 5, -1.0, 1.0, rng);
        const LinearSvmModel model = manual_model(weights, {0.0, 0.1, -0.1}, {0, 1, 2});
        const Matrix x_test = Matrix::random_uniform(5, n, -1.0, 1.0, rng);
        std::vector<int> y_test(n);
        for (std::size_t i = 0; i < n; ++i) y_test[i] = static_cast<int>(rng.next_index(3));
        y_test[0] = 0;
        y_test[1] = 1;
        y_test[2] = 2;  // all classes present

        const Metrics metrics = evaluate(model, x_test, y_test);
        const Matrix scores = decision_scores(model, x_test);
        double sum = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            std::vector<double> class_scores(n);
            std::vector<char> positive(n, 0);
            for (std::size_t j = 0; j < n; ++j) {
                class_scores[j] = scores(c, j);
                positive[j] = y_test[j] == static_cast<int>(c) ? 1 : 0;
            }
            sum += brute_force_auc(class_scores, positive);
        }
        CHECK(metrics.auc_macro == sum / 3.0);
    }
}
