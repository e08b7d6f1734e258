#include "selzip/throughput.hpp"

#include <cmath>

#include "selzip/error.hpp"

namespace selzip {

void EstimatorParams::validate() const {
    if (!(decay > 0.0 && decay <= 1.0)) throw InvalidArgumentError("estimator decay must be in (0, 1]");
    if (!std::isfinite(prior) || prior <= 0.0) throw InvalidArgumentError("estimator prior must be positive");
}

EstimatorState add_sample(EstimatorState state, const ThroughputSample& sample) {
    if (!sample.valid()) throw InvalidArgumentError("throughput sample needs positive bytes and elapsed time");
    double r = sample.rate();
    if (!state.ewma) {
        state.ewma = r;
    } else {
        state.ewma = (1.0 - state.params.decay) * *state.ewma + state.params.decay * r;
    }
    ++state.sample_count;
    return state;
}

double current_estimate(const EstimatorState& state) noexcept {
    if (state.ewma && state.sample_count >= state.params.warmup) return *state.ewma;
    return state.params.prior;
}

EstimatorState reset(EstimatorState state) noexcept {
    state.ewma.reset();
    state.sample_count = 0;
    return state;
}

ThroughputEstimator::ThroughputEstimator(EstimatorParams params) {
    params.validate();
    state_.params = params;
}

void ThroughputEstimator::add_sample(const ThroughputSample& sample) {
    std::lock_guard lock(mu_);
    state_ = selzip::add_sample(state_, sample);
}

double ThroughputEstimator::current_estimate() const {
    std::lock_guard lock(mu_);
    return selzip::current_estimate(state_);
}

void ThroughputEstimator::reset() {
    std::lock_guard lock(mu_);
    state_ = selzip::reset(state_);
}

EstimatorState ThroughputEstimator::snapshot() const {
    std::lock_guard lock(mu_);
    return state_;
}

}  // namespace selzip
