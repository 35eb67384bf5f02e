#ifndef KTG_COMBO_HPP
#define KTG_COMBO_HPP

#include "ktg/diagram.hpp"

#include <map>

namespace ktg {

// Homogeneous rational combination of diagrams on one skeleton.
class Combo {
public:
    Combo() = default;
    Combo(SkeletonPtr skel, int degree) : skel_(std::move(skel)), degree_(degree) {}

    static Combo single(SkeletonPtr skel, ChordShape shape, const Rat& coeff = Rat(1));

    const SkeletonPtr& skeleton() const { return skel_; }
    int degree() const { return degree_; }
    const std::map<ChordShape, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add_term(const ChordShape& shape, const Rat& coeff);
    Combo& operator+=(const Combo& o);
    Combo& operator-=(const Combo& o);
    Combo& operator*=(const Rat& c);
    friend Combo operator+(Combo a, const Combo& b) { return a += b; }
    friend Combo operator-(Combo a, const Combo& b) { return a -= b; }
    friend Combo operator*(const Rat& c, Combo a) { return a *= c; }

    bool operator==(const Combo& o) const;

    // coefficient lookup, zero when absent
    Rat coeff(const ChordShape& shape) const;

    std::string text() const;

private:
    SkeletonPtr skel_;
    int degree_ = 0;
    std::map<ChordShape, Rat> terms_;
};

} // namespace ktg

#endif
