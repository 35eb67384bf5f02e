#include "ktg/combo.hpp"

#include <sstream>

namespace ktg {

Combo Combo::single(SkeletonPtr skel, ChordShape shape, const Rat& coeff) {
    Combo c(std::move(skel), static_cast<int>(shape.size()));
    c.add_term(normalize_shape(std::move(shape)), coeff);
    return c;
}

void Combo::add_term(const ChordShape& shape, const Rat& coeff) {
    if (coeff == 0) return;
    require(static_cast<int>(shape.size()) == degree_, "mixed degrees in combo");
    auto [it, inserted] = terms_.emplace(shape, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

Combo& Combo::operator+=(const Combo& o) {
    if (o.is_zero()) return *this;
    if (terms_.empty() && skel_ == nullptr) {
        *this = o;
        return *this;
    }
    require(degree_ == o.degree_, "degree mismatch in combo addition");
    require(skel_ && o.skel_ && *skel_ == *o.skel_, "skeleton mismatch in combo addition");
    for (const auto& [sh, c] : o.terms_) add_term(sh, c);
    return *this;
}

Combo& Combo::operator-=(const Combo& o) {
    Combo neg = o;
    neg *= Rat(-1);
    return *this += neg;
}

Combo& Combo::operator*=(const Rat& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [sh, v] : terms_) v *= c;
    return *this;
}

bool Combo::operator==(const Combo& o) const {
    if (is_zero() && o.is_zero()) return true;
    return degree_ == o.degree_ && skel_ && o.skel_ && *skel_ == *o.skel_ && terms_ == o.terms_;
}

Rat Combo::coeff(const ChordShape& shape) const {
    auto it = terms_.find(shape);
    return it == terms_.end() ? Rat(0) : it->second;
}

std::string Combo::text() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [sh, c] : terms_) {
        if (!first) os << "  +  ";
        first = false;
        os << format_rat(c) << " * [" << shape_text(sh) << "]";
    }
    return os.str();
}

} // namespace ktg
