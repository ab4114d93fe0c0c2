#pragma once
// Probability-vector algebra shared by every channel: validated K-class
// distributions, normalized binary self-entropy, label smoothing and the
// entropy-gated decision rule that produces the "unverified" label.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rumor/core/labels.hpp"

namespace rumor {

inline constexpr double kProbSumTolerance = 1e-9;
inline constexpr double kDefaultEntropyEpsilon = 1e-3;

// A K-class distribution. Values are non-negative, each in [0,1], and sum to
// 1 within kProbSumTolerance; construction enforces this.
template <std::size_t K>
class ProbVector {
    static_assert(K >= 2, "a distribution needs at least two classes");

public:
    static constexpr std::size_t size() noexcept { return K; }

    ProbVector() { values_.fill(1.0 / static_cast<double>(K)); }

    explicit ProbVector(const std::array<double, K>& values) : values_(values) { validate(); }

    ProbVector(std::initializer_list<double> values) {
        if (values.size() != K)
            throw std::invalid_argument("ProbVector: expected " + std::to_string(K) + " values");
        std::copy(values.begin(), values.end(), values_.begin());
        validate();
    }

    // Checked conversion from a dynamically sized distribution.
    static ProbVector from(std::span<const double> values) {
        if (values.size() != K)
            throw std::invalid_argument("ProbVector: expected " + std::to_string(K) +
                                        " values, got " + std::to_string(values.size()));
        std::array<double, K> a{};
        std::copy(values.begin(), values.end(), a.begin());
        return ProbVector(a);
    }

    // Rescales non-negative mass to sum to one.
    static ProbVector normalized(const std::array<double, K>& mass) {
        double total = 0.0;
        for (double m : mass) {
            if (!(m >= 0.0) || !std::isfinite(m))
                throw std::invalid_argument("ProbVector: mass must be finite and non-negative");
            total += m;
        }
        if (total <= 0.0) throw std::invalid_argument("ProbVector: zero total mass");
        std::array<double, K> a{};
        for (std::size_t i = 0; i < K; ++i) a[i] = mass[i] / total;
        return ProbVector(a);
    }

    static ProbVector one_hot(std::size_t index) {
        if (index >= K) throw std::out_of_range("ProbVector::one_hot index");
        std::array<double, K> a{};
        a[index] = 1.0;
        return ProbVector(a);
    }

    double operator[](std::size_t i) const { return values_[i]; }
    const std::array<double, K>& values() const noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }

    // First index of the maximum.
    std::size_t argmax() const noexcept {
        return static_cast<std::size_t>(
            std::distance(values_.begin(), std::max_element(values_.begin(), values_.end())));
    }

    bool is_one_hot() const noexcept {
        return std::count(values_.begin(), values_.end(), 1.0) == 1 &&
               std::count(values_.begin(), values_.end(), 0.0) == static_cast<long>(K - 1);
    }

    friend bool operator==(const ProbVector&, const ProbVector&) = default;

private:
    void validate() const {
        double total = 0.0;
        for (double v : values_) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("ProbVector: value outside [0,1]");
            total += v;
        }
        if (std::abs(total - 1.0) > kProbSumTolerance)
            throw std::invalid_argument("ProbVector: values do not sum to 1");
    }

    std::array<double, K> values_{};
};

using BinaryProbs = ProbVector<2>;
using TernaryProbs = ProbVector<3>;

// -(1/ln 2) * sum p ln p with 0 ln 0 = 0, clamped to [0,1].
inline double self_entropy(const BinaryProbs& p) {
    double h = 0.0;
    for (double v : p.values())
        if (v > 0.0) h -= v * std::log(v);
    h /= std::numbers::ln2;
    return std::clamp(h, 0.0, 1.0);
}

// (1 - rate) * target + rate / K.
template <std::size_t K>
ProbVector<K> smooth_labels(const ProbVector<K>& target, double rate) {
    if (!(rate >= 0.0 && rate < 1.0))
        throw std::invalid_argument("smooth_labels: rate must lie in [0,1)");
    std::array<double, K> out{};
    const double floor = rate / static_cast<double>(K);
    for (std::size_t i = 0; i < K; ++i) out[i] = (1.0 - rate) * target[i] + floor;
    return ProbVector<K>(out);
}

// Dynamic-width variant used by backends, which see K only at runtime.
inline std::vector<double> smooth_labels(std::span<const double> target, double rate) {
    if (!(rate >= 0.0 && rate < 1.0))
        throw std::invalid_argument("smooth_labels: rate must lie in [0,1)");
    std::vector<double> out(target.size());
    const double floor = rate / static_cast<double>(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) out[i] = (1.0 - rate) * target[i] + floor;
    return out;
}

// Unverified iff H(p) >= 1 - epsilon, otherwise the label at argmax(p).
inline Veracity decide(const BinaryProbs& p, std::pair<Veracity, Veracity> labels, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("decide: epsilon must be >= 0");
    if (self_entropy(p) >= 1.0 - epsilon) return Veracity::Unverified;
    return p[0] > p[1] ? labels.first : labels.second;
}

inline constexpr std::pair<Veracity, Veracity> kTrueFalse{Veracity::True, Veracity::False};

}  // namespace rumor
