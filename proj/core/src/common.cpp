#include "gelfand/common.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <exception>
#include <numbers>
#include <thread>

namespace gelfand {

namespace {

// Gamma(m/2) for integer m >= 1 by the recursion Gamma(z+1) = z Gamma(z).
double gamma_half_integer(int m) {
    if (m == 1) return std::sqrt(std::numbers::pi);
    if (m == 2) return 1.0;
    return (0.5 * (m - 2)) * gamma_half_integer(m - 2);
}

}  // namespace

double unit_sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("unit_sphere_area: dimension must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma_half_integer(n);
}

double unit_ball_volume(int n) {
    return unit_sphere_area(n) / n;
}

HermiteSpline::HermiteSpline(std::vector<double> x, std::vector<double> f, std::vector<double> df)
    : x_(std::move(x)), f_(std::move(f)), df_(std::move(df)) {
    if (x_.size() < 2 || x_.size() != f_.size() || x_.size() != df_.size())
        throw std::invalid_argument("HermiteSpline: need >= 2 nodes with matching values/slopes");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("HermiteSpline: nodes must be strictly increasing");
}

std::size_t HermiteSpline::locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double HermiteSpline::value(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * f_[i] + h10 * h * df_[i] + h01 * f_[i + 1] + h11 * h * df_[i + 1];
}

double HermiteSpline::slope(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t;
    double d00 = (6 * t2 - 6 * t) / h;
    double d10 = 3 * t2 - 4 * t + 1;
    double d01 = (-6 * t2 + 6 * t) / h;
    double d11 = 3 * t2 - 2 * t;
    return d00 * f_[i] + d10 * df_[i] + d01 * f_[i + 1] + d11 * df_[i + 1];
}

double HermiteSpline::integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    // Antiderivatives of the four Hermite basis functions in local coordinate t.
    auto H00 = [](double t) { return 0.5 * t * t * t * t - t * t * t + t; };
    auto H10 = [](double t) { return 0.25 * t * t * t * t - (2.0 / 3.0) * t * t * t + 0.5 * t * t; };
    auto H01 = [](double t) { return -0.5 * t * t * t * t + t * t * t; };
    auto H11 = [](double t) { return 0.25 * t * t * t * t - t * t * t / 3.0; };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        double lo = std::max(a, x_[i]);
        double hi = std::min(b, x_[i + 1]);
        if (hi <= lo) continue;
        double h = x_[i + 1] - x_[i];
        double t0 = (lo - x_[i]) / h;
        double t1 = (hi - x_[i]) / h;
        total += h * (f_[i] * (H00(t1) - H00(t0)) + h * df_[i] * (H10(t1) - H10(t0)) +
                      f_[i + 1] * (H01(t1) - H01(t0)) + h * df_[i + 1] * (H11(t1) - H11(t0)));
    }
    return total;
}

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& f) {
    std::size_t n = x.size();
    if (n < 2 || f.size() != n)
        throw std::invalid_argument("pchip_slopes: need >= 2 matching nodes");
    std::vector<double> d(n, 0.0);
    if (n == 2) {
        d[0] = d[1] = (f[1] - f[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (f[i + 1] - f[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            double w1 = 2 * h[i] + h[i - 1];
            double w2 = h[i] + 2 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // One-sided endpoint formula, clipped to preserve monotonicity.
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0)
            d = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0))
            d = 3.0 * d0;
        return d;
    };
    d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("trapezoid: need >= 2 matching samples");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    int nt = std::min<std::size_t>(std::max(threads, 1), count);
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(const void* data, std::size_t size) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data, size);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string fnv1a64_hex(const std::string& s) {
    return fnv1a64_hex(s.data(), s.size());
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace gelfand
