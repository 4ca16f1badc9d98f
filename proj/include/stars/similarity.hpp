#pragma once

// Similarity measures over dense vectors and weighted sets, plus the
// comparison counter used for cost accounting.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "stars/core.hpp"

namespace stars {

inline double dot_product(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

inline double squared_norm(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

inline double cosine_similarity(std::span<const double> x, std::span<const double> y) {
    const double nx = squared_norm(x), ny = squared_norm(y);
    if (nx == 0.0 || ny == 0.0) throw std::invalid_argument("cosine of zero vector");
    return dot_product(x, y) / std::sqrt(nx * ny);
}

// 1 - theta/pi, mapped into [0, 1]: 1 for parallel, 1/2 for orthogonal,
// 0 for opposite.
inline double angular_similarity(std::span<const double> x, std::span<const double> y) {
    double c = cosine_similarity(x, y);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    constexpr double pi = 3.14159265358979323846264338328;
    return 1.0 - std::acos(c) / pi;
}

// |A ∩ B| / |A ∪ B| over supports; weights ignored. Two empty sets count
// as identical.
inline double jaccard_similarity(std::span<const TokenWeight> a, std::span<const TokenWeight> b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t i = 0, j = 0, inter = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].token == b[j].token) { ++inter; ++i; ++j; }
        else if (a[i].token < b[j].token) ++i;
        else ++j;
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// sum(min) / sum(max) over the union of supports; absent tokens weigh 0.
inline double weighted_jaccard_similarity(std::span<const TokenWeight> a,
                                          std::span<const TokenWeight> b) {
    if (a.empty() && b.empty()) return 1.0;
    double num = 0.0, den = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j >= b.size() || (i < a.size() && a[i].token < b[j].token)) {
            den += a[i].weight; ++i;
        } else if (i >= a.size() || b[j].token < a[i].token) {
            den += b[j].weight; ++j;
        } else {
            num += std::min(a[i].weight, b[j].weight);
            den += std::max(a[i].weight, b[j].weight);
            ++i; ++j;
        }
    }
    return den == 0.0 ? 1.0 : num / den;
}

// Convex blend of angular similarity on the dense payload and Jaccard on
// the set payload.
inline double mixture_similarity(std::span<const double> x, std::span<const double> y,
                                 std::span<const TokenWeight> a, std::span<const TokenWeight> b,
                                 double weight) {
    if (weight < 0.0 || weight > 1.0)
        throw std::invalid_argument("mixture weight outside [0, 1]");
    return weight * angular_similarity(x, y) + (1.0 - weight) * jaccard_similarity(a, b);
}

// Exact tally of similarity evaluations; shared across threads.
class ComparisonCounter {
  public:
    void add(std::uint64_t k = 1) { count_.fetch_add(k, std::memory_order_relaxed); }
    std::uint64_t value() const { return count_.load(std::memory_order_relaxed); }
    void reset() { count_.store(0, std::memory_order_relaxed); }

  private:
    std::atomic<std::uint64_t> count_{0};
};

enum class MeasureKind { DotProduct, Cosine, Angular, Jaccard, WeightedJaccard, Mixture };

inline MeasureKind measure_from_name(const std::string& name) {
    if (name == "dot") return MeasureKind::DotProduct;
    if (name == "cosine") return MeasureKind::Cosine;
    if (name == "angular") return MeasureKind::Angular;
    if (name == "jaccard") return MeasureKind::Jaccard;
    if (name == "wjaccard") return MeasureKind::WeightedJaccard;
    if (name == "mixture") return MeasureKind::Mixture;
    throw std::invalid_argument("unknown measure: " + name);
}

inline const char* measure_name(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::DotProduct: return "dot";
        case MeasureKind::Cosine: return "cosine";
        case MeasureKind::Angular: return "angular";
        case MeasureKind::Jaccard: return "jaccard";
        case MeasureKind::WeightedJaccard: return "wjaccard";
        case MeasureKind::Mixture: return "mixture";
    }
    return "?";
}

// A measure bound to a data view; callable on point ids. Counting is
// optional and exact when enabled.
class Measure {
  public:
    Measure(MeasureKind kind, DataView view, double mixture_weight = 0.5)
        : kind_(kind), view_(view), mixture_weight_(mixture_weight) {
        validate();
        const bool uses_sets = kind_ == MeasureKind::Jaccard ||
                               kind_ == MeasureKind::WeightedJaccard ||
                               kind_ == MeasureKind::Mixture;
        if (uses_sets) {
            digests_.resize(view_.sets->size());
            for (PointId p = 0; p < digests_.size(); ++p)
                digests_[p] = view_.sets->set_digests(p);
        }
    }

    MeasureKind kind() const { return kind_; }
    const DataView& view() const { return view_; }
    double mixture_weight() const { return mixture_weight_; }
    std::size_t size() const { return view_.size(); }

    // Uncounted evaluation.
    double operator()(PointId p, PointId q) const {
        switch (kind_) {
            case MeasureKind::DotProduct:
                return dot_product(view_.dense->row(p), view_.dense->row(q));
            case MeasureKind::Cosine:
                return cosine_similarity(view_.dense->row(p), view_.dense->row(q));
            case MeasureKind::Angular:
                return angular_similarity(view_.dense->row(p), view_.dense->row(q));
            case MeasureKind::Jaccard:
                return jaccard_similarity(digests_[p], digests_[q]);
            case MeasureKind::WeightedJaccard:
                return weighted_jaccard_similarity(digests_[p], digests_[q]);
            case MeasureKind::Mixture:
                return mixture_similarity(view_.dense->row(p), view_.dense->row(q),
                                          digests_[p], digests_[q], mixture_weight_);
        }
        throw std::logic_error("unreachable");
    }

    double counted(PointId p, PointId q, ComparisonCounter& counter) const {
        counter.add();
        return (*this)(p, q);
    }

    std::span<const TokenWeight> digests(PointId p) const { return digests_[p]; }

  private:
    void validate() const {
        const bool needs_dense = kind_ == MeasureKind::DotProduct ||
                                 kind_ == MeasureKind::Cosine ||
                                 kind_ == MeasureKind::Angular ||
                                 kind_ == MeasureKind::Mixture;
        const bool needs_sets = kind_ == MeasureKind::Jaccard ||
                                kind_ == MeasureKind::WeightedJaccard ||
                                kind_ == MeasureKind::Mixture;
        if (needs_dense && (!view_.dense || !view_.dense->has_dense()))
            throw std::invalid_argument("measure requires a dense payload");
        if (needs_sets && (!view_.sets || !view_.sets->has_sets()))
            throw std::invalid_argument("measure requires a weighted-set payload");
        if (kind_ == MeasureKind::Mixture &&
            (mixture_weight_ < 0.0 || mixture_weight_ > 1.0))
            throw std::invalid_argument("mixture weight outside [0, 1]");
        view_.size();  // validates pairing
    }

    MeasureKind kind_;
    DataView view_;
    double mixture_weight_;
    std::vector<std::vector<TokenWeight>> digests_;
};

}  // namespace stars
