#include "temporal_search.hpp"

#include <algorithm>
#include <stdexcept>

namespace episync::detail {

namespace {

using NodeSet = std::unordered_set<std::uint64_t>;

}  // namespace

std::optional<TemporalSearchResult> temporal_search(const TemporalSearchProblem& p) {
    if (p.num_classes < 0 || p.num_classes > 20) {
        throw std::invalid_argument("temporal search supports at most 20 classes");
    }
    const std::uint32_t full = p.num_classes == 0 ? 0u : ((1u << p.num_classes) - 1u);
    const std::uint64_t mask_span = static_cast<std::uint64_t>(full) + 1;

    auto ok = [&](int step, std::uint64_t node) { return !p.admissible || p.admissible(step, node); };
    auto bits = [&](std::uint64_t node) -> std::uint32_t {
        return p.num_classes == 0 ? 0u : (p.class_bits(node) & full);
    };
    auto pack = [&](std::uint64_t node, std::uint32_t mask) { return node * mask_span + mask; };
    auto node_of = [&](std::uint64_t packed) { return packed / mask_span; };
    auto mask_of = [&](std::uint64_t packed) { return static_cast<std::uint32_t>(packed % mask_span); };

    if (!ok(p.start_step, p.start)) return std::nullopt;

    // Forward pass: layers of (node, collected-mask) pairs.
    std::vector<NodeSet> layers;
    layers.emplace_back();
    layers[0].insert(pack(p.start, bits(p.start)));

    std::vector<std::uint64_t> succ_buf;
    int tc = -1;                    // completion layer
    std::vector<NodeSet> suffix;    // constraint-only layers tc .. end (node ids, no mask)

    auto full_nodes_at = [&](int t) {
        NodeSet nodes;
        for (std::uint64_t packed : layers[static_cast<std::size_t>(t)]) {
            if (mask_of(packed) == full) nodes.insert(node_of(packed));
        }
        return nodes;
    };

    // Constraint-only reachability from `from` at absolute step `from_step`
    // up to min_end_step; returns the layer chain when feasible.
    auto trace_suffix = [&](NodeSet from, int from_step) -> std::optional<std::vector<NodeSet>> {
        std::vector<NodeSet> chain{std::move(from)};
        for (int step = from_step + 1; step <= p.min_end_step; ++step) {
            NodeSet next;
            for (std::uint64_t n : chain.back()) {
                p.successors(n, succ_buf);
                for (std::uint64_t s : succ_buf) {
                    if (ok(step, s)) next.insert(s);
                }
            }
            if (next.empty()) return std::nullopt;
            chain.push_back(std::move(next));
        }
        return chain;
    };

    for (int t = 0; t <= p.max_steps; ++t) {
        if (t > 0) {
            NodeSet next;
            const int step = p.start_step + t;
            for (std::uint64_t packed : layers[static_cast<std::size_t>(t - 1)]) {
                const std::uint64_t n = node_of(packed);
                const std::uint32_t m = mask_of(packed);
                p.successors(n, succ_buf);
                for (std::uint64_t s : succ_buf) {
                    if (ok(step, s)) next.insert(pack(s, m | bits(s)));
                }
            }
            if (next.empty()) return std::nullopt;
            layers.push_back(std::move(next));
        }
        NodeSet done = full_nodes_at(t);
        if (done.empty()) continue;
        if (p.start_step + t >= p.min_end_step) {
            tc = t;
            suffix.clear();
            suffix.push_back(std::move(done));
            break;
        }
        if (auto chain = trace_suffix(std::move(done), p.start_step + t)) {
            tc = t;
            suffix = std::move(*chain);
            break;
        }
    }
    if (tc < 0) return std::nullopt;

    const int end_step = std::max(p.start_step + tc, p.min_end_step);

    // Backward prune of the suffix (constraint-only part after completion).
    for (int j = static_cast<int>(suffix.size()) - 2; j >= 0; --j) {
        NodeSet pruned;
        const int step = p.start_step + tc + j + 1;
        for (std::uint64_t n : suffix[static_cast<std::size_t>(j)]) {
            p.successors(n, succ_buf);
            for (std::uint64_t s : succ_buf) {
                if (ok(step, s) && suffix[static_cast<std::size_t>(j + 1)].count(s)) {
                    pruned.insert(n);
                    break;
                }
            }
        }
        suffix[static_cast<std::size_t>(j)] = std::move(pruned);
    }

    // Backward prune of the mask-tracking part.
    std::vector<NodeSet> good(static_cast<std::size_t>(tc) + 1);
    for (std::uint64_t packed : layers[static_cast<std::size_t>(tc)]) {
        if (mask_of(packed) == full && suffix[0].count(node_of(packed))) {
            good[static_cast<std::size_t>(tc)].insert(packed);
        }
    }
    for (int j = tc - 1; j >= 0; --j) {
        const int step = p.start_step + j + 1;
        for (std::uint64_t packed : layers[static_cast<std::size_t>(j)]) {
            const std::uint64_t n = node_of(packed);
            const std::uint32_t m = mask_of(packed);
            p.successors(n, succ_buf);
            for (std::uint64_t s : succ_buf) {
                if (ok(step, s) && good[static_cast<std::size_t>(j + 1)].count(pack(s, m | bits(s)))) {
                    good[static_cast<std::size_t>(j)].insert(packed);
                    break;
                }
            }
        }
    }
    if (!good[0].count(pack(p.start, bits(p.start)))) {
        throw std::logic_error("temporal search backward prune lost the start node");
    }

    // Greedy lexicographic reconstruction.
    TemporalSearchResult res;
    res.end_step = end_step;
    res.path.reserve(static_cast<std::size_t>(end_step - p.start_step) + 1);
    res.path.push_back(p.start);
    std::uint64_t cur = p.start;
    std::uint32_t mask = bits(p.start);
    res.completion_step = p.start_step + tc;  // tc is minimal, so the mask fills exactly here
    for (int j = 1; j <= end_step - p.start_step; ++j) {
        const int step = p.start_step + j;
        p.successors(cur, succ_buf);
        bool found = false;
        for (std::uint64_t s : succ_buf) {
            if (!ok(step, s)) continue;
            if (j <= tc) {
                if (!good[static_cast<std::size_t>(j)].count(pack(s, mask | bits(s)))) continue;
            } else {
                if (!suffix[static_cast<std::size_t>(j - tc)].count(s)) continue;
            }
            res.path.push_back(s);
            mask |= bits(s);
            cur = s;
            found = true;
            break;
        }
        if (!found) throw std::logic_error("temporal search reconstruction dead end");
    }
    return res;
}

}  // namespace episync::detail
