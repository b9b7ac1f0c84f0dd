#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace morphoseg {

/// Hierarchical FIFO queue keyed by 8-bit level.
///
/// Elements of equal level come out in insertion order.
class BucketQueue {
public:
    void push(std::uint8_t level, std::uint32_t item) {
        buckets_[level].items.push_back(item);
        ++size_;
        if (level < current_) current_ = level;
    }

    bool empty() const noexcept { return size_ == 0; }
    std::size_t size() const noexcept { return size_; }

    /// Pops the oldest element of the lowest non-empty level.
    std::pair<std::uint8_t, std::uint32_t> pop() {
        while (buckets_[current_].head == buckets_[current_].items.size()) {
            buckets_[current_].items.clear();
            buckets_[current_].head = 0;
            ++current_;
        }
        auto& bucket = buckets_[current_];
        const std::uint32_t item = bucket.items[bucket.head++];
        --size_;
        return {static_cast<std::uint8_t>(current_), item};
    }

private:
    struct Bucket {
        std::vector<std::uint32_t> items;
        std::size_t head = 0;
    };
    std::array<Bucket, 256> buckets_{};
    std::size_t current_ = 0;
    std::size_t size_ = 0;
};

} // namespace morphoseg
