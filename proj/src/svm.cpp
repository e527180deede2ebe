#include "dual/svm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dual/errors.hpp"

namespace dual {

namespace {

// Unnormalized primal objective (1/2)||w||^2 + C sum hinge.
double objective(const std::vector<double>& w, double b, const Matrix& x,
                 const std::vector<double>& sign, double c) {
    const std::size_t d = x.rows(), n = x.cols();
    double obj = 0.0;
    for (double wi : w) obj += 0.5 * wi * wi;
    for (std::size_t j = 0; j < n; ++j) {
        double score = b;
        for (std::size_t i = 0; i < d; ++i) score += w[i] * x(i, j);
        obj += c * std::max(0.0, 1.0 - sign[j] * score);
    }
    return obj;
}

// One binary problem, Pegasos-style: subgradient steps 1/(lambda t) on the
// scaled objective (lambda/2)||w||^2 + (1/n) sum hinge with lambda = 1/(C n),
// w projected onto the ||w|| <= 1/sqrt(lambda) ball. The bias follows the
// same schedule without regularization. Returns the best iterate seen.
void train_binary(const Matrix& x, const std::vector<double>& sign, double c,
                  std::size_t iterations, std::vector<double>& best_w, double& best_b,
                  double& best_obj) {
    const std::size_t d = x.rows(), n = x.cols();
    const double lambda = 1.0 / (c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    best_w.assign(d, 0.0);
    best_b = 0.0;
    best_obj = objective(best_w, best_b, x, sign, c);

    std::vector<double> grad(d);
    for (std::size_t t = 1; t <= iterations; ++t) {
        for (std::size_t i = 0; i < d; ++i) grad[i] = lambda * w[i];
        double grad_b = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double score = b;
            for (std::size_t i = 0; i < d; ++i) score += w[i] * x(i, j);
            if (sign[j] * score < 1.0) {
                const double scale = sign[j] / static_cast<double>(n);
                for (std::size_t i = 0; i < d; ++i) grad[i] -= scale * x(i, j);
                grad_b -= scale;
            }
        }
        const double step = 1.0 / (lambda * static_cast<double>(t));
        for (std::size_t i = 0; i < d; ++i) w[i] -= step * grad[i];
        b -= step * grad_b;

        double norm_sq = 0.0;
        for (double wi : w) norm_sq += wi * wi;
        if (norm_sq > radius * radius) {
            const double shrink = radius / std::sqrt(norm_sq);
            for (double& wi : w) wi *= shrink;
        }

        const double obj = objective(w, b, x, sign, c);
        if (obj < best_obj) {
            best_obj = obj;
            best_w = w;
            best_b = b;
        }
    }
}

}  // namespace

LinearSvmModel svm_train(const Matrix& x, const std::vector<int>& y, double c,
                         std::size_t iterations) {
    const std::size_t d = x.rows(), n = x.cols();
    if (n == 0) throw ContractViolation("svm_train: empty training set");
    if (y.size() != n) throw ContractViolation("svm_train: label count mismatch");
    if (c <= 0) throw ContractViolation("svm_train: C must be positive");

    const std::set<int> label_set(y.begin(), y.end());
    LinearSvmModel model;
    model.class_labels.assign(label_set.begin(), label_set.end());
    model.c = c;
    model.iterations = iterations;

    if (model.class_labels.size() < 2) {
        // constant predictor for the single observed class
        model.degenerate = true;
        model.weights = Matrix(1, d);
        model.intercepts = {0.0};
        return model;
    }

    model.weights = Matrix(model.class_labels.size(), d);
    model.intercepts.resize(model.class_labels.size());
    for (std::size_t cls = 0; cls < model.class_labels.size(); ++cls) {
        std::vector<double> sign(n);
        for (std::size_t j = 0; j < n; ++j)
            sign[j] = y[j] == model.class_labels[cls] ? 1.0 : -1.0;
        std::vector<double> w;
        double b = 0.0, obj = 0.0;
        train_binary(x, sign, c, iterations, w, b, obj);
        for (std::size_t i = 0; i < d; ++i) model.weights(cls, i) = w[i];
        model.intercepts[cls] = b;
        model.final_objective += obj;
    }
    return model;
}

Matrix decision_scores(const LinearSvmModel& model, const Matrix& x) {
    if (x.rows() != model.weights.cols())
        throw ContractViolation("decision_scores: feature width mismatch");
    Matrix scores = matmul(model.weights, x);
    for (std::size_t cls = 0; cls < scores.rows(); ++cls)
        for (std::size_t j = 0; j < scores.cols(); ++j)
            scores(cls, j) += model.intercepts[cls];
    return scores;
}

std::vector<int> predict(const LinearSvmModel& model, const Matrix& x) {
    const Matrix scores = decision_scores(model, x);
    std::vector<int> labels(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        std::size_t best = 0;
        for (std::size_t cls = 1; cls < scores.rows(); ++cls)
            if (scores(cls, j) > scores(best, j)) best = cls;
        labels[j] = model.class_labels[best];
    }
    return labels;
}

}  // namespace dual
