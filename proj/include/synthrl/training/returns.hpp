#pragma once

#include "synthrl/minilang/outcome.hpp"

namespace synthrl::training {

// Terminal scalar return of a finished program, by aggregated test outcome.
inline double return_of(const minilang::OutcomeReport& report) {
  switch (report.category) {
    case minilang::Outcome::CompileError: return -1.0;
    case minilang::Outcome::RuntimeError: return -0.6;
    case minilang::Outcome::FailedTest: return -0.3;
    case minilang::Outcome::PassedTest: return 1.0;
  }
  return 0.0;
}

}  // namespace synthrl::training
