#include "shiwa/local_search.hpp"

namespace shiwa {

SequentialSearch::SequentialSearch(std::size_t d, OptimizerOptions options)
    : Optimizer(d, options.budget),
      start_(options.start.value_or(Vector::Zero(static_cast<Eigen::Index>(d)))),
      initial_step_(options.sigma) {
  if (static_cast<std::size_t>(start_.size()) != d) {
    throw DimensionMismatch("start point has the wrong dimension");
  }
  if (!(initial_step_ > 0.0)) throw InvalidDescriptor("initial step must be positive");
}

Candidate SequentialSearch::next_candidate() {
  if (!answered_) {
    throw Error(name() + " is sequential: tell the pending candidate before asking again");
  }
  if (!started_) {
    search_ = search();
    started_ = true;
  }
  const Vector* probe = search_.next();
  if (probe == nullptr) throw Error(name() + ": search terminated unexpectedly");
  pending_ = *probe;
  answered_ = false;
  return Candidate::continuous(*probe);
}

void SequentialSearch::observe(const Candidate& c, double value, bool requested) {
  if (!requested || !pending_ || c.point != *pending_) return;
  search_.answer(value);
  pending_.reset();
  answered_ = true;
}

}  // namespace shiwa
