#include "rbq/rate_schedule.hpp"

#include <cmath>
#include <string>

#include "rbq/error.hpp"

namespace rbq {
namespace {

void check_rate(double r) {
  if (!std::isfinite(r) || r <= 0.0) throw DomainError("rate schedule entries must be positive, got " + std::to_string(r));
}

}  // namespace

RateSchedule::RateSchedule(double tail) : RateSchedule({}, tail) {}

RateSchedule::RateSchedule(std::vector<double> head, double tail) : head_(std::move(head)), tail_(tail) {
  for (double r : head_) check_rate(r);
  check_rate(tail_);
}

RateSchedule RateSchedule::shifted(std::size_t k) const {
  if (k >= head_.size()) return RateSchedule(tail_);
  return RateSchedule(std::vector<double>(head_.begin() + static_cast<std::ptrdiff_t>(k), head_.end()), tail_);
}

}  // namespace rbq
