#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gelfand/common.hpp"

namespace gelfand {

enum class NonlinearityKind { Exponential, Power, Affine, Constant, Tabulated };

// Right-hand side g of -\Delta u = \lambda g(u), with derivative and primitive
// F (F(0) = 0). Immutable after construction; concurrent reads are safe.
class Nonlinearity {
  public:
    static Nonlinearity exponential();
    static Nonlinearity power(double p);          // (1+s)^p, p > 1
    static Nonlinearity affine(double a, double b);  // a*s + b
    static Nonlinearity constant(double c);
    // Tabulated from strictly increasing sample abscissae; monotone cubic
    // (PCHIP) interpolation. The declared domain is [s.front(), s.back()].
    static Nonlinearity tabulated(std::vector<double> s, std::vector<double> g);

    double eval(double s) const;
    double deriv(double s) const;
    double primitive(double s) const;

    NonlinearityKind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    // Declared evaluation domain; unbounded ends are absent.
    std::optional<double> domain_min() const { return dom_min_; }
    std::optional<double> domain_max() const { return dom_max_; }

    // Exponential arguments above this saturate with an explicit error.
    static constexpr double kExpSaturation = 700.0;

  private:
    Nonlinearity() = default;
    void require_domain(double s) const;

    NonlinearityKind kind_ = NonlinearityKind::Constant;
    double p_ = 0.0, a_ = 0.0, b_ = 0.0, c_ = 0.0;
    HermiteSpline table_;  // monotone cubic through the samples (Tabulated)
    std::optional<double> dom_min_, dom_max_;
    std::string id_;
};

struct Triplet {
    double g;
    double dg;
    double F;
};

// (g(s), g'(s), F(s)) with consistency guaranteed by construction.
Triplet eval_triplet(const Nonlinearity& g, double s);

// Sampled evidence behind each ConditionReport flag, kept so the flags can be
// recomputed from the report alone.
struct ConditionReport {
    bool nondecreasing = false;
    bool positive_at_zero = false;
    bool superlinear = false;
    std::vector<double> s_samples;      // [0, s_max], used for monotonicity
    std::vector<double> g_samples;      // g at s_samples
    std::vector<double> q_samples;      // g(s)/s on [1, s_max]
    std::vector<double> q_abscissae;
    double g_at_one = 0.0;
    double growth_factor = 10.0;        // q(s_max) must exceed growth_factor * g(1)
    std::size_t q_threshold = 0;        // first index of the increasing tail of q
};

// Checks the structural conditions (nondecreasing, g(0) > 0, superlinear
// growth) by monotone sampling of g on [0, s_max] and of g(s)/s on [1, s_max].
// The superlinear flag is a finite-sample surrogate: g(s)/s must increase
// beyond a detected threshold and exceed growth_factor * g(1) at s_max.
ConditionReport check_conditions(const Nonlinearity& g, double s_max, int samples);

// Recomputes the three flags from the witnesses stored in the report.
void flags_from_witnesses(const ConditionReport& report, bool& nondecreasing,
                          bool& positive_at_zero, bool& superlinear);

}  // namespace gelfand
