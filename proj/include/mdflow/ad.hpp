#ifndef MDFLOW_AD_HPP
#define MDFLOW_AD_HPP

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace mdflow {

//! Forward-mode scalar with a sparse gradient keyed by global unknown index.
//!
//! Expressions built from Dual leaves carry exact partial derivatives with a
//! sparsity pattern equal to the stencil of the expression. Gradients are kept
//! sorted by index so merges are linear in the number of entries.
class Dual {
public:
    using Grad = std::vector<std::pair<std::int32_t, double>>;

    Dual() = default;
    explicit Dual(double v) : val_(v) {}

    static Dual leaf(double v, std::int32_t index) {
        Dual d(v);
        d.grad_.emplace_back(index, 1.0);
        return d;
    }
    static Dual constant(double v) { return Dual(v); }

    double value() const { return val_; }
    const Grad& gradient() const { return grad_; }

    double derivative(std::int32_t index) const {
        for (const auto& [i, g] : grad_)
            if (i == index) return g;
        return 0.0;
    }

    Dual& operator+=(const Dual& o) {
        val_ += o.val_;
        mergeInto(grad_, o.grad_, 1.0);
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        val_ -= o.val_;
        mergeInto(grad_, o.grad_, -1.0);
        return *this;
    }
    Dual& operator+=(double c) { val_ += c; return *this; }
    Dual& operator-=(double c) { val_ -= c; return *this; }
    Dual& operator*=(double c) {
        val_ *= c;
        for (auto& [i, g] : grad_) g *= c;
        return *this;
    }
    Dual& operator/=(double c) { return (*this) *= (1.0 / c); }

    friend Dual operator+(Dual a, const Dual& b) { a += b; return a; }
    friend Dual operator-(Dual a, const Dual& b) { a -= b; return a; }
    friend Dual operator+(Dual a, double b) { a += b; return a; }
    friend Dual operator+(double a, Dual b) { b += a; return b; }
    friend Dual operator-(Dual a, double b) { a -= b; return a; }
    friend Dual operator-(double a, const Dual& b) { Dual r = -b; r += a; return r; }
    friend Dual operator*(const Dual& a, double b) { Dual r = a; r *= b; return r; }
    friend Dual operator*(double a, const Dual& b) { Dual r = b; r *= a; return r; }
    friend Dual operator/(Dual a, double b) { a /= b; return a; }

    friend Dual operator-(const Dual& a) {
        Dual r = a;
        r.val_ = -r.val_;
        for (auto& [i, g] : r.grad_) g = -g;
        return r;
    }

    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r(a.val_ * b.val_);
        r.grad_ = combine(a.grad_, b.val_, b.grad_, a.val_);
        return r;
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        // divide directly: the quotient stays representable even when the
        // denominator is denormal and its reciprocal would overflow
        const double q = a.val_ / b.val_;
        Dual r(q);
        r.grad_ = combine(a.grad_, 1.0 / b.val_, b.grad_, -q / b.val_);
        return r;
    }
    friend Dual operator/(double a, const Dual& b) {
        const double q = a / b.val_;
        Dual r(q);
        r.grad_ = b.grad_;
        for (auto& [i, g] : r.grad_) g *= -q / b.val_;
        return r;
    }

    friend Dual exp(const Dual& a) {
        const double e = std::exp(a.val_);
        Dual r(e);
        r.grad_ = a.grad_;
        for (auto& [i, g] : r.grad_) g *= e;
        return r;
    }
    friend Dual atan(const Dual& a) {
        Dual r(std::atan(a.val_));
        const double d = 1.0 / (1.0 + a.val_ * a.val_);
        r.grad_ = a.grad_;
        for (auto& [i, g] : r.grad_) g *= d;
        return r;
    }
    friend Dual sqrt(const Dual& a) {
        const double s = std::sqrt(a.val_);
        Dual r(s);
        r.grad_ = a.grad_;
        for (auto& [i, g] : r.grad_) g *= 0.5 / s;
        return r;
    }

    //! min with a constant; derivative follows the active branch (left on ties).
    friend Dual min(const Dual& a, double cap) {
        return a.val_ <= cap ? a : Dual(cap);
    }
    friend Dual max(const Dual& a, double floor) {
        return a.val_ >= floor ? a : Dual(floor);
    }

private:
    // dst += s * src, both sorted by index.
    static void mergeInto(Grad& dst, const Grad& src, double s) {
        if (src.empty()) return;
        if (dst.empty()) {
            dst = src;
            for (auto& [i, g] : dst) g *= s;
            return;
        }
        Grad out;
        out.reserve(dst.size() + src.size());
        std::size_t ia = 0, ib = 0;
        while (ia < dst.size() && ib < src.size()) {
            if (dst[ia].first < src[ib].first) out.push_back(dst[ia++]);
            else if (src[ib].first < dst[ia].first) {
                out.emplace_back(src[ib].first, s * src[ib].second);
                ++ib;
            } else {
                out.emplace_back(dst[ia].first, dst[ia].second + s * src[ib].second);
                ++ia; ++ib;
            }
        }
        for (; ia < dst.size(); ++ia) out.push_back(dst[ia]);
        for (; ib < src.size(); ++ib) out.emplace_back(src[ib].first, s * src[ib].second);
        dst = std::move(out);
    }

    static Grad combine(const Grad& a, double sa, const Grad& b, double sb) {
        Grad out = a;
        for (auto& [i, g] : out) g *= sa;
        mergeInto(out, b, sb);
        return out;
    }

    double val_ = 0.0;
    Grad grad_;
};

inline double value(const Dual& d) { return d.value(); }
inline double value(double d) { return d; }

} // namespace mdflow

#endif
