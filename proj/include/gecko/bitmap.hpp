#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace gecko {

// Fixed-size bit vector. Bit semantics follow the validity-map convention used
// throughout: 1 = invalid, 0 = presumed valid.
class Bitmap {
public:
    Bitmap() = default;
    explicit Bitmap(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    std::size_t size() const { return bits_; }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    // Returns true if the bit changed.
    bool set(std::size_t i) {
        uint64_t mask = uint64_t{1} << (i & 63);
        bool was = words_[i >> 6] & mask;
        words_[i >> 6] |= mask;
        return !was;
    }
    bool reset(std::size_t i) {
        uint64_t mask = uint64_t{1} << (i & 63);
        bool was = words_[i >> 6] & mask;
        words_[i >> 6] &= ~mask;
        return was;
    }

    void clear() {
        for (auto& w : words_) w = 0;
    }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    void or_with(const Bitmap& other) {
        for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i)
            words_[i] |= other.words_[i];
    }

    bool operator==(const Bitmap&) const = default;

    std::vector<uint16_t> set_offsets() const {
        std::vector<uint16_t> out;
        for (std::size_t i = 0; i < bits_; ++i)
            if (test(i)) out.push_back(static_cast<uint16_t>(i));
        return out;
    }

private:
    std::size_t bits_ = 0;
    std::vector<uint64_t> words_;
};

} // namespace gecko
