#pragma once

#include <cmath>
#include <cstdint>

namespace svtail {

// Identifies one independent random stream. The master seed names the whole
// experiment; the stream index is typically the trial number.
struct RandomSeed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

// Counter-based generator (Philox-4x32-10). The state is (key, counter) with
// key = master seed and counter = (stream, block); distinct streams never
// share state, so trials can be generated in any order or thread layout and
// still produce identical values.
class CounterRng {
public:
    explicit CounterRng(RandomSeed seed) : master_(seed.master), stream_(seed.stream) {}
    CounterRng(std::uint64_t master, std::uint64_t stream) : master_(master), stream_(stream) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            fill_block();
            pos_ = 0;
        }
        return block_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as the argument of a logarithm.
    double next_double_open() { return 1.0 - next_double(); }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller (pairs cached).
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = next_double_open();
        double v = next_double();
        double r = std::sqrt(-2.0 * std::log(u));
        double theta = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Standard exponential, rate 1.
    double next_exponential() { return -std::log(next_double_open()); }

    // Fair random sign, +1 or -1.
    double next_sign() { return (next_u32() & 1u) ? 1.0 : -1.0; }

private:
    static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b, std::uint32_t& lo) {
        std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        lo = static_cast<std::uint32_t>(p);
        return static_cast<std::uint32_t>(p >> 32);
    }

    void fill_block() {
        std::uint32_t c0 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c1 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(counter_);
        std::uint32_t c3 = static_cast<std::uint32_t>(counter_ >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(master_);
        std::uint32_t k1 = static_cast<std::uint32_t>(master_ >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint32_t lo0, lo1;
            std::uint32_t hi0 = mulhi(0xD2511F53u, c0, lo0);
            std::uint32_t hi1 = mulhi(0xCD9E8D57u, c2, lo1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n1 = lo1;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        block_[0] = c0;
        block_[1] = c1;
        block_[2] = c2;
        block_[3] = c3;
        ++counter_;
    }

    std::uint64_t master_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace svtail
