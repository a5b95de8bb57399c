#pragma once

#include <string>

namespace bnb {

// Evaluator judgment of a page reached by an action.
struct Evaluation {
    double score = 0.0;           // in [0, 1]
    bool subtask_done = false;
    bool task_done_hint = false;
    std::string rationale;

    bool operator==(const Evaluation&) const = default;
};

// Clamps the score into [0, 1]; NaN becomes 0.
Evaluation clamped(Evaluation eval);

} // namespace bnb
