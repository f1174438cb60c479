#include "cfprm/fixtures.hpp"

#include <array>
#include <utility>

namespace cfprm {

Trajectory redundant_steps_example() {
  using enum StepLabel;
  const std::array<std::pair<std::string, StepLabel>, 7> steps = {{
      {"We need the remainder of 2^10 when divided by 7.", kPositive},
      {"So we are looking for 2^10 mod 7.", kPositive},
      {"In other words, compute 2^10 modulo 7.", kPositive},
      {"2^10 = 1000, and 1000 = 7*142 + 6.", kNegative},
      {"Wait, 2^10 is actually 1024.", kPositive},
      {"1024 = 7*146 + 2, so 1024 leaves 2.", kPositive},
      {"Therefore the remainder is 6.", kNegative},
  }};
  return make_trajectory("What is the remainder when 2^10 is divided by 7?", steps, false);
}

}  // namespace cfprm
