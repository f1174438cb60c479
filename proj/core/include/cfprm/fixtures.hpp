#pragma once

#include "cfprm/types.hpp"

namespace cfprm {

/// Seven-step worked example with redundant opening steps: steps 1-3, 5 and
/// 6 are correct, step 4 is wrong and then repaired, step 7 reaches a wrong
/// answer.
Trajectory redundant_steps_example();

}  // namespace cfprm
