#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's feasible-set or divergence code.

#include <array>
#include <cmath>
#include <vector>

namespace est_ref {

struct RefPanel {
    std::vector<int> objects;
    bool on;
};

/// Binary entropy in bits.
inline double h2(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p) / std::log(2.0);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p) / std::log(2.0);
    return h;
}

/// JSD(Bern(p), Bern(q)) = H(mixture) - mean of the two entropies.
inline double jsd_entropy_form(double p, double q) { return h2(0.5 * (p + q)) - 0.5 * (h2(p) + h2(q)); }

/// Every subset of {0..8}, kept iff each panel's outcome matches a
/// member-by-member scan.
inline std::vector<bool> enumerate_feasible(const std::vector<RefPanel>& panels) {
    std::vector<bool> keep(512, true);
    for (int h = 0; h < 512; ++h) {
        for (const auto& p : panels) {
            bool fires = false;
            for (int o : p.objects)
                if (h & (1 << o)) fires = true;
            if (fires != p.on) {
                keep[h] = false;
                break;
            }
        }
    }
    return keep;
}

inline std::array<double, 9> membership_frequency(const std::vector<bool>& keep) {
    std::array<double, 9> f{};
    int total = 0;
    for (int h = 0; h < 512; ++h) {
        if (!keep[h]) continue;
        ++total;
        for (int i = 0; i < 9; ++i)
            if (h & (1 << i)) f[i] += 1.0;
    }
    for (auto& x : f) x /= total;
    return f;
}

}  // namespace est_ref
