#ifndef KTG_SERIES_HPP
#define KTG_SERIES_HPP

#include "ktg/combo.hpp"
#include "ktg/relations.hpp"

namespace ktg {

// Degree-truncated series of diagram combinations on one skeleton.
class Series {
public:
    Series() = default;
    Series(SkeletonPtr skel, int truncation);

    static Series unit(SkeletonPtr skel, int truncation, const Rat& head = Rat(1));

    const SkeletonPtr& skeleton() const { return skel_; }
    int truncation() const { return n_; }
    const Combo& at(int d) const;
    Combo& at(int d);

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(const Rat& c);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(const Rat& c, Series a) { return a *= c; }

    bool is_zero() const;
    bool operator==(const Series& o) const;

    std::string text() const;

private:
    SkeletonPtr skel_;
    int n_ = 0;
    std::vector<Combo> comps_;
};

// Vertical composition: `lower` stacked under `upper`; boundaries must match
// in count and orientation. Chords land along the glued strands in flow
// order, so the upper factor's chords follow the lower's on upward strands
// and precede them on downward ones.
Series mul_compose(const Series& lower, const Series& upper);

// Side-by-side placement, no chords between the factors.
Series tensor(const Series& a, const Series& b);

// Power-series functions. They require a skeleton that composes with itself
// to itself (vertical strand skeletons of any orientation pattern qualify).
Series exp_series(const Series& x);
Series log_series(const Series& s);
Series invert(const Series& s);
Series pow_rat(const Series& s, const Rat& q);

// True when compose(s,s) is defined and reproduces s with identical labels.
bool self_composable(const Skeleton& s);

// Strand helpers. A strand skeleton has edge i joining bottom point i and
// top point i (either direction) and no vertices.
bool is_strand_skeleton(const Skeleton& s);
std::vector<bool> strand_orients(const Skeleton& s); // true = upward
int strand_count(const Skeleton& s);

// Signed one-chord generator between strands i < j.
Combo t_gen(const SkeletonPtr& strands, int i, int j);
Series t_gen_series(const SkeletonPtr& strands, int i, int j, int truncation);

// Replace strand i by sizes[i] parallel copies (0 deletes the strand); a
// diagram with k endpoints on a doubled strand becomes the 2^k assignments,
// order preserved within each copy.
Series cable(const Series& s, const std::vector<int>& sizes);
Combo cable(const Combo& c, const std::vector<int>& sizes);
Series double_strand(const Series& s, int i);
Series delete_strand(const Series& s, int i);

// Relabel strands: target position t holds source strand perm[t-1].
Series permute_strands(const Series& s, const std::vector<int>& perm);

// Left-right mirror on strand skeletons: strand i -> k+1-i and the degree
// sign (-1)^n that the integral's mirror rule dictates.
Series mirror_series(const Series& s);

// Quotient-reduced equality of series (degreewise normal forms).
Series series_normal_form(const Series& s, const QuotientFlags& flags = {});
bool series_zero_in_quotient(const Series& s, const QuotientFlags& flags = {});

// Text format: "series skeleton=<name-or-file> N=<n>" then one line per term.
std::string serialize_series(const Series& s, const std::string& skeleton_ref);
Series parse_series(const std::string& text, const SkeletonPtr& skel_override = nullptr);

} // namespace ktg

#endif
