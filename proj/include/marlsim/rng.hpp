#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string_view>

namespace marlsim {

// Stable 64-bit FNV-1a, used to derive stream ids from names.
inline constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// One independent generator per stream id. std::seed_seq and mt19937_64 are
// fully specified by the standard, so samples are portable across toolchains;
// distributions are computed by hand for the same reason.
class SeededRngState {
public:
    explicit SeededRngState(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    // Uniform double in [0, 1).
    double uniform01(std::uint64_t stream) { return static_cast<double>(engine(stream)() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1), safe for log().
    double uniform_open01(std::uint64_t stream) {
        return (static_cast<double>(engine(stream)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double standard_normal(std::uint64_t stream) {
        // Box-Muller, one value per pair of draws.
        const double u1 = uniform_open01(stream);
        const double u2 = uniform01(stream);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t draws(std::uint64_t stream) const {
        auto it = draws_.find(stream);
        return it == draws_.end() ? 0 : it->second;
    }

private:
    std::mt19937_64& engine(std::uint64_t stream) {
        auto it = engines_.find(stream);
        if (it == engines_.end()) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                              static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
            it = engines_.emplace(stream, std::mt19937_64(seq)).first;
        }
        ++draws_[stream];
        return it->second;
    }

    std::uint64_t seed_;
    std::map<std::uint64_t, std::mt19937_64> engines_;
    std::map<std::uint64_t, std::uint64_t> draws_;
};

}  // namespace marlsim
