#pragma once

#include <cstdint>
#include <vector>

#include "dual/matrix.hpp"
#include "dual/nn.hpp"

namespace dual {

struct AdamParams {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Moment accumulators, one pair per entry of DualNetwork::params(), in that
// order. step_count advances by one per adam_step.
struct AdamState {
    AdamParams hyper;
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    std::uint64_t step_count = 0;

    static AdamState init(const DualNetwork& net, const AdamParams& hyper);
};

enum class UpdateScope {
    all,
    encoder_decoder_only,  // pretraining: selection layers completely frozen
};

// Bias-corrected Adam update of a single tensor; t is the 1-based step count.
void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, std::uint64_t t,
                 const AdamParams& hyper);

// One full-network step. Frozen parameters keep both value and moments
// untouched. After the update the q diagonal is re-zeroed.
void adam_step(DualNetwork& net, const GradientSet& grads, AdamState& state,
               UpdateScope scope = UpdateScope::all);

}  // namespace dual
