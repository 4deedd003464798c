#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>

namespace urllc::la {

/// Maximum over the last `capacity` pushed values.
///
/// Monotonic deque: entries are kept in push order with strictly decreasing
/// values, so the front is always the window maximum. Each value enters and
/// leaves the deque at most once, giving O(1) amortized push.
template <typename T>
class SlidingWindowMax {
public:
    explicit SlidingWindowMax(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("sliding window capacity must be >= 1");
    }

    void push(T value) {
        const std::uint64_t seq = pushed_++;
        while (!deque_.empty() && deque_.back().value <= value) deque_.pop_back();
        deque_.push_back({seq, value});
        while (deque_.front().seq + capacity_ <= seq) deque_.pop_front();
    }

    std::optional<T> max() const {
        if (deque_.empty()) return std::nullopt;
        return deque_.front().value;
    }

    bool empty() const { return pushed_ == 0; }
    std::size_t capacity() const { return capacity_; }
    /// Number of values currently inside the window.
    std::size_t size() const { return pushed_ < capacity_ ? pushed_ : capacity_; }
    std::uint64_t total_pushed() const { return pushed_; }

private:
    struct Slot {
        std::uint64_t seq;
        T value;
    };

    std::size_t capacity_;
    std::uint64_t pushed_ = 0;
    std::deque<Slot> deque_;
};

}  // namespace urllc::la
