#pragma once
// Deterministic reference classifier: multinomial logistic regression over a
// hashed bag of words, trained with seeded minibatch SGD on smoothed
// cross-entropy. Pair inputs hash the two sides into separate namespaces.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rumor/classifier/backend.hpp"
#include "rumor/core/random.hpp"

namespace rumor::classifier {

struct ReferenceOptions {
    std::size_t dims = std::size_t{1} << 14;  // hashing buckets
    std::uint64_t seed = 0;
    // The recipe's learning rate is transformer-scale; AdaGrad on sparse
    // hashed features wants ~0.25. Effective step = recipe.learning_rate * lr_scale.
    double lr_scale = 5e3;
    double init_scale = 0.01;

    friend bool operator==(const ReferenceOptions&, const ReferenceOptions&) = default;
};

using SparseFeatures = std::vector<std::pair<std::uint32_t, double>>;

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Lowercased runs of ASCII alphanumerics, apostrophes and non-ASCII bytes.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        const bool word = c >= 0x80 || std::isalnum(c) || c == '\'';
        if (word) {
            cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// log(1 + count) per bucket, L2-normalized; sorted by bucket.
inline SparseFeatures hash_features(const ClassifierInput& input, std::size_t dims) {
    std::vector<std::pair<std::uint32_t, double>> raw;
    auto add = [&](std::string_view text, std::string_view ns) {
        const std::uint64_t salt = fnv1a64(ns);
        for (const auto& tok : tokenize(text))
            raw.emplace_back(static_cast<std::uint32_t>(fnv1a64(tok, salt) % dims), 1.0);
    };
    add(input.text, input.pair_text ? "a:" : "s:");
    if (input.pair_text) add(*input.pair_text, "b:");

    std::sort(raw.begin(), raw.end());
    SparseFeatures out;
    for (const auto& [idx, v] : raw) {
        if (!out.empty() && out.back().first == idx) out.back().second += v;
        else out.emplace_back(idx, v);
    }
    double norm = 0.0;
    for (auto& [idx, v] : out) {
        v = std::log1p(v);
        norm += v * v;
    }
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (auto& [idx, v] : out) v /= norm;
    }
    return out;
}

class ReferenceBackend final : public ClassifierBackend {
public:
    static constexpr std::string_view kKind = "reference";

    ReferenceBackend(std::size_t classes, InputKind input, ReferenceOptions options = {})
        : classes_(classes), input_(input), options_(options) {
        if (classes_ < 2) throw UsageError("reference backend needs at least two classes");
        if (options_.dims == 0 || options_.dims > (std::size_t{1} << 31))
            throw UsageError("reference backend: dims out of range");
        if (!(options_.lr_scale > 0.0)) throw UsageError("reference backend: lr_scale must be positive");
        weights_.assign(classes_ * (options_.dims + 1), 0.0);
        Rng rng(options_.seed);
        for (std::size_t k = 0; k < classes_; ++k)
            for (std::size_t d = 0; d < options_.dims; ++d)
                weights_[row(k) + d] = options_.init_scale * (2.0 * unit_draw(rng) - 1.0);
    }

    std::string_view kind() const override { return kKind; }
    std::size_t num_classes() const override { return classes_; }
    InputKind input_kind() const override { return input_; }
    bool trained() const override { return trained_; }
    const ReferenceOptions& options() const { return options_; }
    std::uint64_t fit_count() const { return fit_count_; }

    void fit(std::span<const TrainingExample> examples, const TrainingRecipe& recipe) override {
        recipe.validate();
        check_targets(examples, classes_);
        ++fit_count_;
        trained_ = true;
        if (examples.empty()) return;

        std::vector<SparseFeatures> features;
        std::vector<std::vector<double>> targets;
        features.reserve(examples.size());
        for (const auto& ex : examples) {
            check_input(ex.input);
            features.push_back(hash_features(ex.input, options_.dims));
            targets.push_back(smooth_labels(ex.target, recipe.label_smoothing));
        }

        const double step = recipe.learning_rate * options_.lr_scale;
        const std::size_t batch = static_cast<std::size_t>(recipe.batch_size);
        Rng rng(options_.seed ^ (0x9E3779B97F4A7C15ull * fit_count_));
        std::vector<std::size_t> order(examples.size());
        std::vector<double> grad(weights_.size());
        std::vector<double> accum(weights_.size());  // AdaGrad state, fresh per fit
        std::vector<std::size_t> touched;

        for (int epoch = 0; epoch < recipe.epochs; ++epoch) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            shuffle_in_place(order, rng);
            for (std::size_t start = 0; start < order.size(); start += batch) {
                const std::size_t end = std::min(order.size(), start + batch);
                const double n = static_cast<double>(end - start);
                touched.clear();
                for (std::size_t i = start; i < end; ++i) {
                    const std::size_t e = order[i];
                    const auto probs = softmax(features[e]);
                    for (std::size_t k = 0; k < classes_; ++k) {
                        const double err = probs[k] - targets[e][k];
                        for (const auto& [idx, v] : features[e]) grad[row(k) + idx] += err * v;
                        grad[row(k) + options_.dims] += err;
                    }
                    for (const auto& [idx, v] : features[e]) touched.push_back(idx);
                }
                touched.push_back(static_cast<std::uint32_t>(options_.dims));
                std::sort(touched.begin(), touched.end());
                touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
                for (std::size_t k = 0; k < classes_; ++k)
                    for (std::size_t idx : touched) {
                        double& g = grad[row(k) + idx];
                        const double mean = g / n;
                        double& acc = accum[row(k) + idx];
                        acc += mean * mean;
                        weights_[row(k) + idx] -= step * mean / (std::sqrt(acc) + 1e-12);
                        g = 0.0;
                    }
            }
        }
    }

    std::vector<double> predict(const ClassifierInput& input) const override {
        if (!trained_) throw UntrainedBackend("reference backend has not been trained");
        check_input(input);
        return softmax(hash_features(input, options_.dims));
    }

    // Raw linear scores before the softmax; tests use these as an oracle.
    std::vector<double> logits(const ClassifierInput& input) const {
        return scores(hash_features(input, options_.dims));
    }

    std::string serialize_payload(const std::filesystem::path&) const override {
        std::string out;
        out.append("RBOW", 4);
        put_u64(out, 1);  // payload version
        put_u64(out, classes_);
        put_u64(out, input_ == InputKind::Pair ? 1 : 0);
        put_u64(out, options_.dims);
        put_u64(out, options_.seed);
        put_f64(out, options_.lr_scale);
        put_f64(out, options_.init_scale);
        put_u64(out, fit_count_);
        put_u64(out, trained_ ? 1 : 0);
        for (double w : weights_) put_f64(out, w);
        return out;
    }

    static ReferenceBackend deserialize(std::string_view payload) {
        std::size_t pos = 0;
        auto need = [&](std::size_t n) {
            if (pos + n > payload.size()) throw ModelFormatError("reference payload truncated");
        };
        need(4);
        if (payload.substr(0, 4) != "RBOW") throw ModelFormatError("reference payload: bad magic");
        pos = 4;
        auto u64 = [&] {
            need(8);
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(payload[pos + i])) << (8 * i);
            pos += 8;
            return v;
        };
        auto f64 = [&] { return std::bit_cast<double>(u64()); };
        if (u64() != 1) throw ModelFormatError("reference payload: unsupported version");
        const auto classes = u64();
        const auto input = u64() == 1 ? InputKind::Pair : InputKind::Single;
        ReferenceOptions opts;
        opts.dims = u64();
        opts.seed = u64();
        opts.lr_scale = f64();
        opts.init_scale = f64();
        if (classes < 2 || classes > 16 || opts.dims == 0 || opts.dims > (std::size_t{1} << 31))
            throw ModelFormatError("reference payload: bad shape");
        ReferenceBackend b(classes, input, opts);
        b.fit_count_ = u64();
        b.trained_ = u64() == 1;
        if (payload.size() - pos != b.weights_.size() * 8)
            throw ModelFormatError("reference payload: weight block has wrong size");
        for (double& w : b.weights_) w = f64();
        return b;
    }

private:
    std::size_t row(std::size_t k) const { return k * (options_.dims + 1); }

    void check_input(const ClassifierInput& input) const {
        const bool is_pair = input.pair_text.has_value();
        if (is_pair != (input_ == InputKind::Pair))
            throw UsageError(std::string("reference backend expects ") + std::string(to_string(input_)) +
                             " inputs");
    }

    std::vector<double> scores(const SparseFeatures& x) const {
        std::vector<double> z(classes_);
        for (std::size_t k = 0; k < classes_; ++k) {
            double s = weights_[row(k) + options_.dims];
            for (const auto& [idx, v] : x) s += weights_[row(k) + idx] * v;
            z[k] = s;
        }
        return z;
    }

    std::vector<double> softmax(const SparseFeatures& x) const {
        auto z = scores(x);
        const double m = *std::max_element(z.begin(), z.end());
        double total = 0.0;
        for (double& v : z) {
            v = std::exp(v - m);
            total += v;
        }
        for (double& v : z) v /= total;
        return z;
    }

    static void put_u64(std::string& out, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    static void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

    std::size_t classes_;
    InputKind input_;
    ReferenceOptions options_;
    std::vector<double> weights_;  // classes x (dims + bias), row-major
    std::uint64_t fit_count_ = 0;
    bool trained_ = false;
};

}  // namespace rumor::classifier
