#include "gelfand/nonlinearity.hpp"

#include <cmath>
#include <cstring>

namespace gelfand {

namespace {

double checked_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string(what) + ": non-finite result");
    return v;
}

}  // namespace

Nonlinearity Nonlinearity::exponential() {
    Nonlinearity g;
    g.kind_ = NonlinearityKind::Exponential;
    g.id_ = "exponential";
    return g;
}

Nonlinearity Nonlinearity::power(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("Nonlinearity::power: requires p > 1");
    Nonlinearity g;
    g.kind_ = NonlinearityKind::Power;
    g.p_ = p;
    g.dom_min_ = -1.0;
    g.id_ = "power(p=" + format_double(p) + ")";
    return g;
}

Nonlinearity Nonlinearity::affine(double a, double b) {
    Nonlinearity g;
    g.kind_ = NonlinearityKind::Affine;
    g.a_ = a;
    g.b_ = b;
    g.id_ = "affine(a=" + format_double(a) + ",b=" + format_double(b) + ")";
    return g;
}

Nonlinearity Nonlinearity::constant(double c) {
    Nonlinearity g;
    g.kind_ = NonlinearityKind::Constant;
    g.c_ = c;
    g.id_ = "constant(c=" + format_double(c) + ")";
    return g;
}

Nonlinearity Nonlinearity::tabulated(std::vector<double> s, std::vector<double> gv) {
    if (s.size() < 4 || s.size() != gv.size())
        throw std::invalid_argument("Nonlinearity::tabulated: need >= 4 matching samples");
    for (double v : gv)
        if (!std::isfinite(v)) throw std::invalid_argument("Nonlinearity::tabulated: non-finite sample");
    Nonlinearity g;
    g.kind_ = NonlinearityKind::Tabulated;
    g.dom_min_ = s.front();
    g.dom_max_ = s.back();
    std::string bytes(reinterpret_cast<const char*>(s.data()), s.size() * sizeof(double));
    bytes.append(reinterpret_cast<const char*>(gv.data()), gv.size() * sizeof(double));
    g.id_ = "tabulated(" + fnv1a64_hex(bytes) + ")";
    auto slopes = pchip_slopes(s, gv);
    g.table_ = HermiteSpline(std::move(s), std::move(gv), std::move(slopes));
    return g;
}

void Nonlinearity::require_domain(double s) const {
    if (!std::isfinite(s)) throw EvalError(id_ + ": non-finite argument");
    if (dom_min_ && s < *dom_min_)
        throw EvalError(id_ + ": argument " + format_double(s) + " below domain minimum " +
                        format_double(*dom_min_));
    if (dom_max_ && s > *dom_max_)
        throw EvalError(id_ + ": argument " + format_double(s) + " above domain maximum " +
                        format_double(*dom_max_));
    if (kind_ == NonlinearityKind::Exponential && s > kExpSaturation)
        throw EvalError("exponential: saturation at s = " + format_double(s) +
                        " (limit 700); refusing to produce infinity");
}

double Nonlinearity::eval(double s) const {
    require_domain(s);
    switch (kind_) {
        case NonlinearityKind::Exponential:
            return std::exp(s);
        case NonlinearityKind::Power:
            return checked_finite(std::pow(1.0 + s, p_), "power eval");
        case NonlinearityKind::Affine:
            return a_ * s + b_;
        case NonlinearityKind::Constant:
            return c_;
        case NonlinearityKind::Tabulated:
            return checked_finite(table_.value(s), "tabulated eval");
    }
    throw EvalError("unknown nonlinearity kind");
}

double Nonlinearity::deriv(double s) const {
    require_domain(s);
    switch (kind_) {
        case NonlinearityKind::Exponential:
            return std::exp(s);
        case NonlinearityKind::Power:
            return checked_finite(p_ * std::pow(1.0 + s, p_ - 1.0), "power deriv");
        case NonlinearityKind::Affine:
            return a_;
        case NonlinearityKind::Constant:
            return 0.0;
        case NonlinearityKind::Tabulated:
            return checked_finite(table_.slope(s), "tabulated deriv");
    }
    throw EvalError("unknown nonlinearity kind");
}

double Nonlinearity::primitive(double s) const {
    require_domain(s);
    switch (kind_) {
        case NonlinearityKind::Exponential:
            return std::expm1(s);
        case NonlinearityKind::Power:
            return checked_finite((std::pow(1.0 + s, p_ + 1.0) - 1.0) / (p_ + 1.0), "power primitive");
        case NonlinearityKind::Affine:
            return 0.5 * a_ * s * s + b_ * s;
        case NonlinearityKind::Constant:
            return c_ * s;
        case NonlinearityKind::Tabulated:
            if (*dom_min_ > 0.0 || *dom_max_ < 0.0)
                throw EvalError(id_ + ": primitive requires the table domain to contain 0");
            return table_.integral(0.0, s);
    }
    throw EvalError("unknown nonlinearity kind");
}

Triplet eval_triplet(const Nonlinearity& g, double s) {
    return Triplet{g.eval(s), g.deriv(s), g.primitive(s)};
}

namespace {

// Index where the trailing nondecreasing run of q starts; q.size() - 1 when
// the last step already descends (no usable tail).
std::size_t increasing_tail_start(const std::vector<double>& q) {
    if (q.empty()) return 0;
    std::size_t start = q.size() - 1;
    for (std::size_t j = q.size() - 1; j > 0; --j) {
        double tol = 1e-12 * std::max(1.0, std::abs(q[j - 1]));
        if (q[j] >= q[j - 1] - tol)
            start = j - 1;
        else
            break;
    }
    return start;
}

void compute_flags(const ConditionReport& r, bool& nondecreasing, bool& positive_at_zero,
                   bool& superlinear) {
    nondecreasing = true;
    for (std::size_t i = 0; i + 1 < r.g_samples.size(); ++i) {
        double tol = 1e-12 * std::max(1.0, std::abs(r.g_samples[i]));
        if (r.g_samples[i + 1] < r.g_samples[i] - tol) {
            nondecreasing = false;
            break;
        }
    }
    positive_at_zero = !r.g_samples.empty() && r.g_samples.front() > 0.0;
    superlinear = false;
    if (r.q_samples.size() >= 2) {
        std::size_t tail = increasing_tail_start(r.q_samples);
        bool has_tail = tail + 1 < r.q_samples.size();
        bool exceeds = r.q_samples.back() > r.growth_factor * r.g_at_one;
        superlinear = has_tail && exceeds;
    }
}

}  // namespace

ConditionReport check_conditions(const Nonlinearity& g, double s_max, int samples) {
    if (!(s_max > 0.0)) throw std::invalid_argument("check_conditions: s_max must be > 0");
    if (samples < 16) throw std::invalid_argument("check_conditions: need samples >= 16");

    ConditionReport r;
    r.s_samples.reserve(samples);
    r.g_samples.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        double s = s_max * static_cast<double>(i) / (samples - 1);
        r.s_samples.push_back(s);
        r.g_samples.push_back(g.eval(s));
    }
    if (s_max > 1.0) {
        r.g_at_one = g.eval(1.0);
        r.q_abscissae.reserve(samples);
        r.q_samples.reserve(samples);
        for (int i = 0; i < samples; ++i) {
            double s = 1.0 + (s_max - 1.0) * static_cast<double>(i) / (samples - 1);
            r.q_abscissae.push_back(s);
            r.q_samples.push_back(g.eval(s) / s);
        }
        r.q_threshold = increasing_tail_start(r.q_samples);
    }
    compute_flags(r, r.nondecreasing, r.positive_at_zero, r.superlinear);
    return r;
}

void flags_from_witnesses(const ConditionReport& report, bool& nondecreasing,
                          bool& positive_at_zero, bool& superlinear) {
    compute_flags(report, nondecreasing, positive_at_zero, superlinear);
}

}  // namespace gelfand
