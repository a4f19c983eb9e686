#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_set>
#include <vector>

namespace episync::detail {

// Layered search over a time-expanded graph of opaque u64 nodes. Finds the
// trajectory that first collects all class bits as early as possible, honors
// the per-step admissibility filter at every step, and extends at least to
// min_end_step. Ties are broken by the lexicographically smallest node
// sequence (numeric node order, which callers arrange to match their fixed
// state ordering).
struct TemporalSearchProblem {
    std::uint64_t start = 0;
    int start_step = 0;
    int max_steps = 0;  // layer budget beyond the start
    int num_classes = 0;
    int min_end_step = 0;
    // Fills `out` with successors sorted ascending.
    std::function<void(std::uint64_t, std::vector<std::uint64_t>&)> successors;
    std::function<std::uint32_t(std::uint64_t)> class_bits;       // may be empty when num_classes == 0
    std::function<bool(int step, std::uint64_t)> admissible;      // may be empty (always true)
};

struct TemporalSearchResult {
    std::vector<std::uint64_t> path;  // states for start_step .. end_step
    int completion_step = 0;          // step at which the last class bit was collected
    int end_step = 0;
};

std::optional<TemporalSearchResult> temporal_search(const TemporalSearchProblem& p);

}  // namespace episync::detail
