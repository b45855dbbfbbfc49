#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "stancekde/types.hpp"

namespace stancekde {

/// Fixed-capacity FIFO over six-axis measurement vectors, oldest first.
/// One window per foot; all six axes share the structure so they stay
/// aligned in time.
class SampleWindow {
public:
    explicit SampleWindow(std::size_t capacity) : buf_(capacity) {
        if (capacity == 0) throw ValidationError("SampleWindow: capacity must be >= 1");
    }

    std::size_t capacity() const noexcept { return buf_.size(); }
    std::size_t fill() const noexcept { return fill_; }
    bool full() const noexcept { return fill_ == buf_.size(); }

    /// Inserts v as the newest element, evicting the oldest when full.
    /// Rejects non-finite components, naming the offending axis.
    void push(const Axes6& v) {
        for (std::size_t k = 0; k < kAxisCount; ++k)
            if (!std::isfinite(v[k]))
                throw ValidationError("SampleWindow: non-finite value on axis " +
                                      std::string(kAxisNames[k]) + " (index " +
                                      std::to_string(k) + ")");
        buf_[next_] = v;
        next_ = (next_ + 1) % buf_.size();
        if (fill_ < buf_.size()) ++fill_;
    }

    /// i-th buffered vector, oldest first (0 <= i < fill()).
    const Axes6& at(std::size_t i) const {
        if (i >= fill_) throw std::out_of_range("SampleWindow: index past fill");
        return buf_[(oldest() + i) % buf_.size()];
    }

    /// Copies the axis values, oldest to newest, into out (sized >= fill()).
    /// Returns the number of values written.
    std::size_t copy_axis(std::size_t axis, std::span<double> out) const {
        check_axis(axis);
        if (out.size() < fill_)
            throw std::out_of_range("SampleWindow: output span smaller than fill");
        const std::size_t start = oldest();
        for (std::size_t i = 0; i < fill_; ++i) out[i] = buf_[(start + i) % buf_.size()][axis];
        return fill_;
    }

    std::vector<double> axis(std::size_t axis) const {
        check_axis(axis);
        std::vector<double> values(fill_);
        copy_axis(axis, values);
        return values;
    }

private:
    static void check_axis(std::size_t axis) {
        if (axis >= kAxisCount)
            throw std::out_of_range("SampleWindow: axis index " + std::to_string(axis) +
                                    " out of range 0..5");
    }

    std::size_t oldest() const noexcept { return full() ? next_ : 0; }

    std::vector<Axes6> buf_;
    std::size_t next_ = 0;  // slot the next push writes
    std::size_t fill_ = 0;
};

}  // namespace stancekde
