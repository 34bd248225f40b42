#include "qnet/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qnet {

RateFunction RateFunction::constant(double mu) {
  RateFunction r;
  r.kind_ = Kind::constant;
  r.a_ = mu;
  return r;
}

RateFunction RateFunction::table_with_tail(std::vector<double> values, double tail_value) {
  RateFunction r;
  r.kind_ = Kind::table_with_tail;
  r.table_ = std::move(values);
  r.tail_ = tail_value;
  return r;
}

RateFunction RateFunction::geometric_approach(double a, double b, double ratio) {
  RateFunction r;
  r.kind_ = Kind::geometric_approach;
  r.a_ = a;
  r.b_ = b;
  r.ratio_ = ratio;
  return r;
}

double RateFunction::operator()(std::int64_t n) const {
  if (n <= 0) return 0.0;
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::table_with_tail:
      if (n <= static_cast<std::int64_t>(table_.size())) return table_[n - 1];
      return tail_;
    case Kind::geometric_approach:
      return a_ - b_ * std::pow(ratio_, static_cast<double>(n));
  }
  return 0.0;
}

double RateFunction::inf() const {
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::table_with_tail: {
      double lo = tail_;
      for (double v : table_) lo = std::min(lo, v);
      return lo;
    }
    case Kind::geometric_approach:
      // monotone: first value when increasing, the limit when decreasing
      return b_ >= 0.0 ? a_ - b_ * ratio_ : a_;
  }
  return 0.0;
}

double RateFunction::sup() const {
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::table_with_tail: {
      double hi = tail_;
      for (double v : table_) hi = std::max(hi, v);
      return hi;
    }
    case Kind::geometric_approach:
      return b_ >= 0.0 ? a_ : a_ - b_ * ratio_;
  }
  return 0.0;
}

double RateFunction::tail_limit() const {
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::table_with_tail:
      return tail_;
    case Kind::geometric_approach:
      return a_;
  }
  return 0.0;
}

double RateFunction::tail_inf_after(std::int64_t n) const {
  switch (kind_) {
    case Kind::constant:
      return a_;
    case Kind::table_with_tail: {
      double lo = tail_;
      for (std::int64_t k = std::max<std::int64_t>(n + 1, 1);
           k <= static_cast<std::int64_t>(table_.size()); ++k) {
        lo = std::min(lo, table_[k - 1]);
      }
      return lo;
    }
    case Kind::geometric_approach:
      return b_ >= 0.0 ? (*this)(std::max<std::int64_t>(n + 1, 1)) : a_;
  }
  return 0.0;
}

bool RateFunction::nondecreasing() const {
  switch (kind_) {
    case Kind::constant:
      return true;
    case Kind::table_with_tail: {
      for (std::size_t i = 1; i < table_.size(); ++i) {
        if (table_[i] < table_[i - 1]) return false;
      }
      return table_.empty() || tail_ >= table_.back();
    }
    case Kind::geometric_approach:
      return b_ >= 0.0;
  }
  return false;
}

bool RateFunction::nonincreasing() const {
  switch (kind_) {
    case Kind::constant:
      return true;
    case Kind::table_with_tail: {
      for (std::size_t i = 1; i < table_.size(); ++i) {
        if (table_[i] > table_[i - 1]) return false;
      }
      return table_.empty() || tail_ <= table_.back();
    }
    case Kind::geometric_approach:
      return b_ <= 0.0;
  }
  return false;
}

std::int64_t RateFunction::exactly_constant_after() const {
  switch (kind_) {
    case Kind::constant:
      return 0;
    case Kind::table_with_tail:
      return static_cast<std::int64_t>(table_.size());
    case Kind::geometric_approach:
      return b_ == 0.0 ? 0 : -1;
  }
  return -1;
}

void RateFunction::append_violations(std::vector<std::string>& out,
                                     std::string_view where) const {
  auto bad = [&](const std::string& what) {
    out.push_back(std::string(where) + ": " + what);
  };
  switch (kind_) {
    case Kind::constant:
      if (!(a_ > 0.0) || !std::isfinite(a_)) bad("constant rate must be positive and finite");
      break;
    case Kind::table_with_tail: {
      if (!(tail_ > 0.0) || !std::isfinite(tail_)) bad("table tail value must be positive and finite");
      for (std::size_t i = 0; i < table_.size(); ++i) {
        if (!(table_[i] > 0.0) || !std::isfinite(table_[i])) {
          bad("table value " + std::to_string(i + 1) + " must be positive and finite");
          break;
        }
      }
      break;
    }
    case Kind::geometric_approach: {
      if (!(ratio_ > 0.0 && ratio_ < 1.0)) bad("geometric ratio must lie in (0,1)");
      if (!(a_ - b_ * ratio_ > 0.0)) bad("geometric rate must satisfy a - b*ratio > 0");
      if (!(inf() > 0.0)) bad("geometric rate infimum must be positive");
      if (!std::isfinite(a_) || !std::isfinite(b_)) bad("geometric parameters must be finite");
      break;
    }
  }
}

std::string_view to_string(RateFunction::Kind kind) {
  switch (kind) {
    case RateFunction::Kind::constant: return "constant";
    case RateFunction::Kind::table_with_tail: return "table_with_tail";
    case RateFunction::Kind::geometric_approach: return "geometric_approach";
  }
  return "unknown";
}

}  // namespace qnet
