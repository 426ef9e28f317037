#pragma once

#include "twufp/core.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace twufp {

struct ProfileSegment {
    EdgeIndex lo;
    EdgeIndex hi;
    Int value;

    bool operator==(const ProfileSegment&) const = default;
};

// Piecewise-constant integer function over an inclusive edge range.
// Canonical form: segments partition the span in ascending order and no two
// adjacent segments carry the same value, so equal functions have identical
// segment lists. This is the only representation of capacities in the code
// base; reduction gadgets have millions of edges and are never expanded.
class CapacityProfile {
public:
    CapacityProfile() : span_lo_(1), span_hi_(0) {}  // empty span

    static CapacityProfile uniform(EdgeIndex lo, EdgeIndex hi, Int value) {
        CapacityProfile p;
        p.span_lo_ = lo;
        p.span_hi_ = hi;
        if (lo > hi) throw std::invalid_argument("profile span is empty");
        p.segments_.push_back({lo, hi, std::move(value)});
        return p;
    }

    static CapacityProfile from_segments(EdgeIndex span_lo, EdgeIndex span_hi,
                                         std::vector<ProfileSegment> segments) {
        if (span_lo > span_hi) throw std::invalid_argument("profile span is empty");
        std::sort(segments.begin(), segments.end(),
                  [](const ProfileSegment& a, const ProfileSegment& b) { return a.lo < b.lo; });
        EdgeIndex expect = span_lo;
        for (const auto& s : segments) {
            if (s.lo != expect || s.hi < s.lo)
                throw std::invalid_argument("profile segments must partition the span");
            expect = s.hi + 1;
        }
        if (expect != span_hi + 1)
            throw std::invalid_argument("profile segments must partition the span");
        CapacityProfile p;
        p.span_lo_ = span_lo;
        p.span_hi_ = span_hi;
        p.segments_ = std::move(segments);
        p.canonicalize();
        return p;
    }

    EdgeIndex span_lo() const { return span_lo_; }
    EdgeIndex span_hi() const { return span_hi_; }
    EdgeIndex span_size() const { return span_hi_ - span_lo_ + 1; }
    const std::vector<ProfileSegment>& segments() const { return segments_; }

    bool operator==(const CapacityProfile&) const = default;

    const Int& value_at(EdgeIndex e) const {
        return segments_[segment_index(e)].value;
    }

    Int min_over(EdgeIndex lo, EdgeIndex hi) const {
        check_range(lo, hi);
        std::size_t i = segment_index(lo);
        Int best = segments_[i].value;
        for (; i < segments_.size() && segments_[i].lo <= hi; ++i)
            best = std::min(best, segments_[i].value);
        return best;
    }

    Int max_value() const {
        Int best = 0;
        for (const auto& s : segments_) best = std::max(best, s.value);
        return best;
    }

    CapacityProfile restricted(EdgeIndex lo, EdgeIndex hi) const {
        check_range(lo, hi);
        CapacityProfile p;
        p.span_lo_ = lo;
        p.span_hi_ = hi;
        for (const auto& s : segments_) {
            if (s.hi < lo || s.lo > hi) continue;
            p.segments_.push_back({std::max(s.lo, lo), std::min(s.hi, hi), s.value});
        }
        p.canonicalize();
        return p;
    }

    // Pointwise sum over a common span.
    CapacityProfile plus(const CapacityProfile& other) const {
        require_same_span(other);
        CapacityProfile p;
        p.span_lo_ = span_lo_;
        p.span_hi_ = span_hi_;
        merge_walk(other, [&](EdgeIndex lo, EdgeIndex hi, const Int& a, const Int& b) {
            p.segments_.push_back({lo, hi, a + b});
        });
        p.canonicalize();
        return p;
    }

    // Pointwise difference; nullopt if the result would be negative anywhere.
    std::optional<CapacityProfile> try_minus(const CapacityProfile& other) const {
        require_same_span(other);
        CapacityProfile p;
        p.span_lo_ = span_lo_;
        p.span_hi_ = span_hi_;
        bool negative = false;
        merge_walk(other, [&](EdgeIndex lo, EdgeIndex hi, const Int& a, const Int& b) {
            if (a < b) negative = true;
            if (!negative) p.segments_.push_back({lo, hi, a - b});
        });
        if (negative) return std::nullopt;
        p.canonicalize();
        return p;
    }

    // True iff this(e) <= other(e) on every edge of the common span.
    bool dominated_by(const CapacityProfile& other) const {
        require_same_span(other);
        bool ok = true;
        merge_walk(other, [&](EdgeIndex, EdgeIndex, const Int& a, const Int& b) {
            if (a > b) ok = false;
        });
        return ok;
    }

    // Walks the merged breakpoints of two same-span profiles.
    template <typename Fn>
    void merge_walk(const CapacityProfile& other, Fn&& fn) const {
        require_same_span(other);
        std::size_t i = 0, j = 0;
        EdgeIndex pos = span_lo_;
        while (pos <= span_hi_) {
            while (segments_[i].hi < pos) ++i;
            while (other.segments_[j].hi < pos) ++j;
            EdgeIndex hi = std::min(segments_[i].hi, other.segments_[j].hi);
            fn(pos, hi, segments_[i].value, other.segments_[j].value);
            pos = hi + 1;
        }
    }

private:
    void canonicalize() {
        std::vector<ProfileSegment> merged;
        for (auto& s : segments_) {
            if (!merged.empty() && merged.back().value == s.value && merged.back().hi + 1 == s.lo)
                merged.back().hi = s.hi;
            else
                merged.push_back(std::move(s));
        }
        segments_ = std::move(merged);
    }

    std::size_t segment_index(EdgeIndex e) const {
        check_range(e, e);
        std::size_t lo = 0, hi = segments_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (segments_[mid].hi < e)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    void check_range(EdgeIndex lo, EdgeIndex hi) const {
        if (lo > hi || lo < span_lo_ || hi > span_hi_)
            throw std::invalid_argument("edge range outside profile span");
    }

    void require_same_span(const CapacityProfile& other) const {
        if (span_lo_ != other.span_lo_ || span_hi_ != other.span_hi_)
            throw std::invalid_argument("profile span mismatch");
    }

    EdgeIndex span_lo_;
    EdgeIndex span_hi_;
    std::vector<ProfileSegment> segments_;
};

// Builds the piecewise-constant sum of (range, amount) contributions over a
// span via an event sweep; O(k log k) in the number of contributions.
inline CapacityProfile accumulate_profile(EdgeIndex span_lo, EdgeIndex span_hi,
                                          const std::vector<std::pair<std::pair<EdgeIndex, EdgeIndex>, Int>>& loads) {
    if (span_lo > span_hi) throw std::invalid_argument("profile span is empty");
    std::map<EdgeIndex, Int> delta;
    for (const auto& [range, amount] : loads) {
        auto [lo, hi] = range;
        if (lo > hi || lo < span_lo || hi > span_hi)
            throw std::invalid_argument("load range outside span");
        delta[lo] += amount;
        delta[hi + 1] -= amount;
    }
    std::vector<ProfileSegment> segs;
    EdgeIndex pos = span_lo;
    Int value = 0;
    for (const auto& [at, change] : delta) {
        if (at > span_hi) break;
        if (at > pos) segs.push_back({pos, at - 1, value});
        pos = std::max(pos, at);
        value += change;
    }
    if (pos <= span_hi) segs.push_back({pos, span_hi, value});
    return CapacityProfile::from_segments(span_lo, span_hi, std::move(segs));
}

// Total demand profile of placed tasks, canonical form.
inline CapacityProfile demand_profile(const std::vector<Placement>& placed,
                                      EdgeIndex span_lo, EdgeIndex span_hi) {
    std::vector<std::pair<std::pair<EdgeIndex, EdgeIndex>, Int>> loads;
    loads.reserve(placed.size());
    for (const auto& pl : placed)
        loads.push_back({{pl.start, pl.end()}, pl.task.demand});
    return accumulate_profile(span_lo, span_hi, loads);
}

// How many placed tasks cover each edge (all contributions weight 1).
inline CapacityProfile coverage_profile(const std::vector<Placement>& placed,
                                        EdgeIndex span_lo, EdgeIndex span_hi) {
    std::vector<std::pair<std::pair<EdgeIndex, EdgeIndex>, Int>> loads;
    loads.reserve(placed.size());
    for (const auto& pl : placed)
        loads.push_back({{pl.start, pl.end()}, Int(1)});
    return accumulate_profile(span_lo, span_hi, loads);
}

inline CapacityProfile reservation_profile(const std::vector<Box>& boxes,
                                           EdgeIndex span_lo, EdgeIndex span_hi) {
    std::vector<std::pair<std::pair<EdgeIndex, EdgeIndex>, Int>> loads;
    loads.reserve(boxes.size());
    for (const auto& b : boxes)
        loads.push_back({{b.path_lo, b.path_hi}, b.height});
    return accumulate_profile(span_lo, span_hi, loads);
}

// Pointwise u(e) minus the total height of the boxes covering e.
// Throws std::domain_error if any edge would go negative: that signals an
// inconsistent box guess and the caller must discard the guess, never clamp.
inline CapacityProfile subtract_boxes(const CapacityProfile& profile, const std::vector<Box>& boxes) {
    for (const auto& b : boxes)
        if (b.path_lo < profile.span_lo() || b.path_hi > profile.span_hi() || b.path_lo > b.path_hi)
            throw std::invalid_argument("box path outside profile span");
    auto result = profile.try_minus(reservation_profile(boxes, profile.span_lo(), profile.span_hi()));
    if (!result) throw std::domain_error("box reservation exceeds capacity on some edge");
    return *result;
}

inline std::optional<CapacityProfile> try_subtract_boxes(const CapacityProfile& profile,
                                                         const std::vector<Box>& boxes) {
    for (const auto& b : boxes)
        if (b.path_lo < profile.span_lo() || b.path_hi > profile.span_hi() || b.path_lo > b.path_hi)
            return std::nullopt;
    return profile.try_minus(reservation_profile(boxes, profile.span_lo(), profile.span_hi()));
}

// p1(e) <= p2(e) for every edge of the common span.
inline bool dominates(const CapacityProfile& p1, const CapacityProfile& p2) {
    return p1.dominated_by(p2);
}

}  // namespace twufp
