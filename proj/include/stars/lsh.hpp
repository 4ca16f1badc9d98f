#pragma once

// Locality-sensitive hash families. A hash function is addressed by
// (master_seed, index) where index packs (repetition, position); the
// function is defined by arithmetic on that key alone, so adding
// repetitions or extending sketches never disturbs earlier values.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stars/core.hpp"
#include "stars/rng.hpp"
#include "stars/similarity.hpp"

namespace stars {

inline std::uint64_t hash_index(std::uint64_t repetition, std::uint32_t position) {
    return (repetition << 32) | position;
}

inline std::uint64_t fn_key(std::uint64_t master_seed, std::uint64_t index) {
    return key_combine(key_combine(master_seed, tag::hash_fn), index);
}

// Coordinate j of the random direction behind one SimHash function.
inline double simhash_direction_coord(std::uint64_t master_seed, std::uint64_t index,
                                      std::size_t j) {
    const std::uint64_t dir = key_combine(fn_key(master_seed, index), tag::direction);
    return normal_from_key(key_combine(dir, j));
}

// Sign bit of <x, z> for a seeded normal direction z. Zero dot counts as
// positive; zero vectors are rejected.
inline std::uint64_t simhash_eval(std::uint64_t master_seed, std::uint64_t index,
                                  std::span<const double> x) {
    if (squared_norm(x) == 0.0) throw std::invalid_argument("simhash of zero vector");
    double dot = 0.0;
    const std::uint64_t dir = key_combine(fn_key(master_seed, index), tag::direction);
    for (std::size_t j = 0; j < x.size(); ++j)
        dot += x[j] * normal_from_key(key_combine(dir, j));
    return dot >= 0.0 ? 1u : 0u;
}

inline double minhash_score(std::uint64_t master_seed, std::uint64_t index,
                            std::uint64_t token) {
    const std::uint64_t base = key_combine(fn_key(master_seed, index), tag::min_score);
    return to_unit(mix64(key_combine(base, token)));
}

// Digest of the support element with the smallest seeded score. Ties (a
// 2^-53 event) go to the smaller token so results stay total-ordered.
inline std::uint64_t minhash_eval(std::uint64_t master_seed, std::uint64_t index,
                                  std::span<const TokenWeight> set) {
    if (set.empty()) throw std::invalid_argument("minhash of empty support");
    std::uint64_t best = 0;
    double best_score = 2.0;
    for (const TokenWeight& tw : set) {
        const double s = minhash_score(master_seed, index, tw.token);
        if (s < best_score || (s == best_score && tw.token < best)) {
            best_score = s;
            best = tw.token;
        }
    }
    return best;
}

// Identity of the r-th virtual copy of a token. Copy 1 is the token itself,
// so unit weights at granularity 1 degenerate to plain MinHash.
inline std::uint64_t replica_token(std::uint64_t token, std::uint64_t r) {
    if (r == 1) return token;
    return mix64(key_combine(key_combine(token, tag::replica), r));
}

// MinHash over the virtually duplicated multiset: token t with weight w
// contributes copies (t, 1..ceil(w/g)).
inline std::uint64_t weighted_minhash_eval(std::uint64_t master_seed, std::uint64_t index,
                                           std::span<const TokenWeight> set,
                                           double granularity) {
    if (set.empty()) throw std::invalid_argument("weighted minhash of empty support");
    if (!(granularity > 0.0)) throw std::invalid_argument("granularity must be positive");
    std::uint64_t best = 0;
    double best_score = 2.0;
    bool any = false;
    for (const TokenWeight& tw : set) {
        if (!(tw.weight > 0.0)) throw std::invalid_argument("weights must be positive");
        const auto copies = static_cast<std::uint64_t>(std::ceil(tw.weight / granularity));
        for (std::uint64_t r = 1; r <= copies; ++r) {
            const std::uint64_t t = replica_token(tw.token, r);
            const double s = minhash_score(master_seed, index, t);
            if (!any || s < best_score || (s == best_score && t < best)) {
                any = true;
                best_score = s;
                best = t;
            }
        }
    }
    if (!any) throw std::invalid_argument("weighted minhash of empty support");
    return best;
}

// Seeded per-index coin: heads hashes the vector, tails hashes the set.
inline bool mixed_uses_dense(std::uint64_t master_seed, std::uint64_t index) {
    return (mix64(key_combine(fn_key(master_seed, index), tag::coin)) & 1u) != 0;
}

inline std::uint64_t mixed_eval(std::uint64_t master_seed, std::uint64_t index,
                                std::span<const double> x,
                                std::span<const TokenWeight> set) {
    return mixed_uses_dense(master_seed, index) ? simhash_eval(master_seed, index, x)
                                                : minhash_eval(master_seed, index, set);
}

enum class FamilyKind { SimHash, MinHash, WeightedMinHash, Mixed };

inline FamilyKind family_from_name(const std::string& name) {
    if (name == "simhash") return FamilyKind::SimHash;
    if (name == "minhash") return FamilyKind::MinHash;
    if (name == "wminhash") return FamilyKind::WeightedMinHash;
    if (name == "mixed") return FamilyKind::Mixed;
    throw std::invalid_argument("unknown hash family: " + name);
}

inline const char* family_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::SimHash: return "simhash";
        case FamilyKind::MinHash: return "minhash";
        case FamilyKind::WeightedMinHash: return "wminhash";
        case FamilyKind::Mixed: return "mixed";
    }
    return "?";
}

struct HashFamily {
    FamilyKind kind = FamilyKind::SimHash;
    std::uint64_t master_seed = 0;
    double granularity = 1.0;  // weighted MinHash quantization step
};

// The family a measure is normally paired with. Mismatches are legal (the
// builders just warn); collision laws then say nothing useful.
inline bool family_matches_measure(FamilyKind family, MeasureKind measure) {
    switch (family) {
        case FamilyKind::SimHash:
            return measure == MeasureKind::Angular || measure == MeasureKind::Cosine ||
                   measure == MeasureKind::DotProduct;
        case FamilyKind::MinHash: return measure == MeasureKind::Jaccard;
        case FamilyKind::WeightedMinHash: return measure == MeasureKind::WeightedJaccard;
        case FamilyKind::Mixed: return measure == MeasureKind::Mixture;
    }
    return false;
}

inline void warn_on_mismatch(FamilyKind family, MeasureKind measure) {
    if (!family_matches_measure(family, measure))
        std::cerr << "warning: hash family '" << family_name(family)
                  << "' is not calibrated for measure '" << measure_name(measure)
                  << "'; proceeding anyway\n";
}

// Digest of a whole sketch; equal sketches collide, unequal ones split
// except with negligible digest-collision probability.
inline std::uint64_t bucket_key(std::span<const std::uint64_t> sketch) {
    std::uint64_t h = tag::bucket;
    for (std::uint64_t v : sketch) h = key_combine(h, v);
    return key_combine(h, sketch.size());
}

// One point's sketch for a given repetition: positions 0..ell-1. Increasing
// ell extends the sketch; earlier positions are unchanged.
inline std::vector<std::uint64_t> sketch_point(const HashFamily& family, const DataView& view,
                                               PointId p, std::uint32_t ell,
                                               std::uint64_t repetition) {
    std::vector<std::uint64_t> out(ell);
    std::vector<TokenWeight> digests;
    if (view.sets && (family.kind == FamilyKind::MinHash ||
                      family.kind == FamilyKind::WeightedMinHash ||
                      family.kind == FamilyKind::Mixed))
        digests = view.sets->set_digests(p);
    for (std::uint32_t pos = 0; pos < ell; ++pos) {
        const std::uint64_t index = hash_index(repetition, pos);
        switch (family.kind) {
            case FamilyKind::SimHash:
                out[pos] = simhash_eval(family.master_seed, index, view.dense->row(p));
                break;
            case FamilyKind::MinHash:
                out[pos] = minhash_eval(family.master_seed, index, digests);
                break;
            case FamilyKind::WeightedMinHash:
                out[pos] = weighted_minhash_eval(family.master_seed, index, digests,
                                                 family.granularity);
                break;
            case FamilyKind::Mixed:
                out[pos] = mixed_eval(family.master_seed, index, view.dense->row(p), digests);
                break;
        }
    }
    return out;
}

// Per-repetition evaluation bank. Materializes SimHash directions once so
// sketching a dataset does not regenerate seeded normals per point, and
// caches per-position score keys for the min-hash families. Produces
// bit-identical digests to the raw eval functions.
class SketchPlan {
  public:
    SketchPlan(const HashFamily& family, const DataView& view, std::uint32_t ell,
               std::uint64_t repetition)
        : family_(family), view_(view), ell_(ell) {
        const std::size_t dim = view.dense ? view.dense->dim : 0;
        dense_pos_.assign(ell, false);
        score_base_.assign(ell, 0);
        for (std::uint32_t pos = 0; pos < ell; ++pos) {
            const std::uint64_t index = hash_index(repetition, pos);
            bool uses_dense = family.kind == FamilyKind::SimHash;
            if (family.kind == FamilyKind::Mixed)
                uses_dense = mixed_uses_dense(family.master_seed, index);
            dense_pos_[pos] = uses_dense;
            if (uses_dense) {
                const std::uint64_t dir =
                    key_combine(fn_key(family.master_seed, index), tag::direction);
                const std::size_t base = directions_.size();
                directions_.resize(base + dim);
                for (std::size_t j = 0; j < dim; ++j)
                    directions_[base + j] = normal_from_key(key_combine(dir, j));
                direction_row_.push_back(base);
            } else {
                direction_row_.push_back(~std::size_t{0});
                score_base_[pos] =
                    key_combine(fn_key(family.master_seed, index), tag::min_score);
            }
        }
        if (view.sets && (family.kind == FamilyKind::MinHash ||
                          family.kind == FamilyKind::WeightedMinHash ||
                          family.kind == FamilyKind::Mixed)) {
            digests_.resize(view.sets->size());
            for (PointId p = 0; p < view.sets->size(); ++p)
                digests_[p] = view.sets->set_digests(p);
        }
    }

    std::uint32_t ell() const { return ell_; }

    // Writes ell digests for point p; returns hash evaluations performed.
    std::uint64_t eval_point(PointId p, std::uint64_t* out) const {
        for (std::uint32_t pos = 0; pos < ell_; ++pos) {
            if (dense_pos_[pos]) {
                const std::span<const double> x = view_.dense->row(p);
                const double* z = directions_.data() + direction_row_[pos];
                double dot = 0.0;
                for (std::size_t j = 0; j < x.size(); ++j) dot += x[j] * z[j];
                out[pos] = dot >= 0.0 ? 1u : 0u;
            } else if (family_.kind == FamilyKind::WeightedMinHash) {
                out[pos] = weighted_min_digest(pos, digests_[p]);
            } else {
                out[pos] = min_digest(pos, digests_[p]);
            }
        }
        return ell_;
    }

  private:
    std::uint64_t min_digest(std::uint32_t pos, std::span<const TokenWeight> set) const {
        std::uint64_t best = 0;
        double best_score = 2.0;
        for (const TokenWeight& tw : set) {
            const double s = to_unit(mix64(key_combine(score_base_[pos], tw.token)));
            if (s < best_score || (s == best_score && tw.token < best)) {
                best_score = s;
                best = tw.token;
            }
        }
        return best;
    }

    std::uint64_t weighted_min_digest(std::uint32_t pos,
                                      std::span<const TokenWeight> set) const {
        std::uint64_t best = 0;
        double best_score = 2.0;
        bool any = false;
        for (const TokenWeight& tw : set) {
            const auto copies =
                static_cast<std::uint64_t>(std::ceil(tw.weight / family_.granularity));
            for (std::uint64_t r = 1; r <= copies; ++r) {
                const std::uint64_t t = replica_token(tw.token, r);
                const double s = to_unit(mix64(key_combine(score_base_[pos], t)));
                if (!any || s < best_score || (s == best_score && t < best)) {
                    any = true;
                    best_score = s;
                    best = t;
                }
            }
        }
        return best;
    }

    HashFamily family_;
    DataView view_;
    std::uint32_t ell_;
    std::vector<bool> dense_pos_;
    std::vector<std::size_t> direction_row_;
    std::vector<double> directions_;
    std::vector<std::uint64_t> score_base_;
    std::vector<std::vector<TokenWeight>> digests_;
};

// Payload validation shared by the builders.
inline void validate_for_family(const DataView& view, const HashFamily& family) {
    const std::size_t n = view.size();
    const bool wants_dense =
        family.kind == FamilyKind::SimHash || family.kind == FamilyKind::Mixed;
    const bool wants_sets = family.kind == FamilyKind::MinHash ||
                            family.kind == FamilyKind::WeightedMinHash ||
                            family.kind == FamilyKind::Mixed;
    if (wants_dense) {
        if (!view.dense || !view.dense->has_dense())
            throw std::invalid_argument("hash family requires a dense payload");
        for (PointId p = 0; p < n; ++p)
            if (squared_norm(view.dense->row(p)) == 0.0)
                throw std::invalid_argument("zero vector at point " + std::to_string(p));
    }
    if (wants_sets) {
        if (!view.sets || !view.sets->has_sets())
            throw std::invalid_argument("hash family requires a weighted-set payload");
        for (PointId p = 0; p < n; ++p) {
            if (view.sets->sets[p].empty())
                throw std::invalid_argument("empty support at point " + std::to_string(p));
            if (family.kind == FamilyKind::WeightedMinHash)
                for (const auto& [vid, w] : view.sets->sets[p])
                    if (!(w > 0.0))
                        throw std::invalid_argument("nonpositive weight at point " +
                                                    std::to_string(p));
        }
    }
    if (family.kind == FamilyKind::WeightedMinHash && !(family.granularity > 0.0))
        throw std::invalid_argument("granularity must be positive");
}

}  // namespace stars
