#pragma once

#include <string>

#include "ksl/qexp.hpp"

namespace ksl {

struct CheckResult {
  enum class Status { pass, fail, inconclusive };
  Status status = Status::inconclusive;
  std::string detail;

  bool ok() const { return status == Status::pass; }
  static CheckResult pass(std::string d = "") { return {Status::pass, std::move(d)}; }
  static CheckResult fail(std::string d = "") { return {Status::fail, std::move(d)}; }
  static CheckResult inconclusive(std::string d = "") { return {Status::inconclusive, std::move(d)}; }

  static CheckResult from_eq(const EqResult& e, const std::string& label = "") {
    switch (e.v) {
      case EqResult::V::equal: return pass(label);
      case EqResult::V::unequal:
        return fail(label + (label.empty() ? "" : ": ") + "differs at q^" + q_str(e.witness));
      default: {
        std::string t = e.common_trunc ? q_str(*e.common_trunc) : "inf";
        return inconclusive(label + (label.empty() ? "" : ": ") + "precision only " + t);
      }
    }
  }

  CheckResult& merge(const CheckResult& other) {
    if (other.status == Status::fail && status != Status::fail) {
      status = Status::fail;
      detail = other.detail;
    } else if (other.status == Status::inconclusive && status == Status::pass) {
      status = Status::inconclusive;
      detail = other.detail;
    }
    return *this;
  }
};

}  // namespace ksl
