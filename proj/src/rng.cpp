#include "farmlens/rng.hpp"

#include <unordered_set>

namespace farmlens {

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    k = std::min(k, n);
    std::vector<std::size_t> out;
    out.reserve(k);
    if (k * 4 >= n) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(all[i], all[i + below(n - i)]);
            out.push_back(all[i]);
        }
        return out;
    }
    std::unordered_set<std::size_t> seen;
    seen.reserve(k * 2);
    while (out.size() < k) {
        const std::size_t x = below(n);
        if (seen.insert(x).second) out.push_back(x);
    }
    return out;
}

} // namespace farmlens
