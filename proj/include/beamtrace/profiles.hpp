#ifndef BEAMTRACE_PROFILES_HPP
#define BEAMTRACE_PROFILES_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beamtrace {

// Launch amplitude distribution R(xi, zeta=0).
// Gaussian:  R = exp(-eps^2 xi^2)
// Algebraic: R = 1 / (1 + (eps xi)^(2N))
// DualBeam:  R = base(xi - offset) + base(xi + offset)
// Tabulated: monotone cubic through (xi, R) knots
struct LaunchProfile {
    enum class Kind { Gaussian, Algebraic, DualBeam, Tabulated };

    Kind kind = Kind::Gaussian;
    double epsilon = 0.1;  // lambda0 / w0, 0 < eps <= 1
    int n_exp = 1;         // algebraic exponent N >= 1
    double offset = 0.0;   // dual-beam half separation, >= 0
    std::shared_ptr<LaunchProfile> base;  // dual-beam component
    std::vector<std::pair<double, double>> knots;

    static LaunchProfile gaussian(double eps) {
        LaunchProfile p;
        p.kind = Kind::Gaussian;
        p.epsilon = eps;
        p.validate();
        return p;
    }
    static LaunchProfile algebraic(double eps, int n) {
        LaunchProfile p;
        p.kind = Kind::Algebraic;
        p.epsilon = eps;
        p.n_exp = n;
        p.validate();
        return p;
    }
    static LaunchProfile dual_beam(double off, LaunchProfile b) {
        LaunchProfile p;
        p.kind = Kind::DualBeam;
        p.offset = off;
        p.epsilon = b.epsilon;
        p.base = std::make_shared<LaunchProfile>(std::move(b));
        p.validate();
        return p;
    }
    static LaunchProfile tabulated(std::vector<std::pair<double, double>> k) {
        LaunchProfile p;
        p.kind = Kind::Tabulated;
        p.knots = std::move(k);
        p.validate();
        return p;
    }

    void validate() const {
        switch (kind) {
            case Kind::Gaussian:
                if (!(epsilon > 0.0 && epsilon <= 1.0))
                    throw std::invalid_argument("profile: epsilon must be in (0, 1]");
                break;
            case Kind::Algebraic:
                if (!(epsilon > 0.0 && epsilon <= 1.0))
                    throw std::invalid_argument("profile: epsilon must be in (0, 1]");
                if (n_exp < 1) throw std::invalid_argument("profile: N must be >= 1");
                break;
            case Kind::DualBeam:
                if (!(offset >= 0.0)) throw std::invalid_argument("profile: offset must be >= 0");
                if (!base || base->kind == Kind::DualBeam)
                    throw std::invalid_argument("profile: dual beam needs a non-dual base");
                base->validate();
                break;
            case Kind::Tabulated:
                if (knots.size() < 4) throw std::invalid_argument("profile: need >= 4 knots");
                for (std::size_t i = 0; i < knots.size(); ++i) {
                    if (!(knots[i].second > 0.0))
                        throw std::invalid_argument("profile: knot amplitudes must be positive");
                    if (i > 0 && !(knots[i].first > knots[i - 1].first))
                        throw std::invalid_argument("profile: knots must be strictly increasing");
                }
                break;
        }
    }

    bool analytic() const {
        if (kind == Kind::Tabulated) return false;
        if (kind == Kind::DualBeam) return base->analytic();
        return true;
    }
};

namespace detail {

inline double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

// Fritsch-Carlson monotone cubic slopes.
inline std::vector<double> monotone_slopes(const std::vector<std::pair<double, double>>& k) {
    const std::size_t n = k.size();
    std::vector<double> d(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (k[i + 1].second - k[i].second) / (k[i + 1].first - k[i].first);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
            continue;
        }
        const double a = m[i] / d[i], b = m[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            m[i] = t * a * d[i];
            m[i + 1] = t * b * d[i];
        }
    }
    return m;
}

inline double eval_monotone_cubic(const std::vector<std::pair<double, double>>& k,
                                  const std::vector<double>& m, double x) {
    if (x < k.front().first || x > k.back().first)
        throw std::domain_error("tabulated profile: query outside knot range");
    auto it = std::upper_bound(k.begin(), k.end(), x,
                               [](double v, const auto& p) { return v < p.first; });
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - k.begin() - 1, 0));
    if (i + 1 >= k.size()) i = k.size() - 2;
    const double h = k[i + 1].first - k[i].first;
    const double t = (x - k[i].first) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * k[i].second + h10 * h * m[i] + h01 * k[i + 1].second + h11 * h * m[i + 1];
}

}  // namespace detail

inline double eval_R(const LaunchProfile& p, double xi) {
    switch (p.kind) {
        case LaunchProfile::Kind::Gaussian:
            return std::exp(-p.epsilon * p.epsilon * (xi * xi));
        case LaunchProfile::Kind::Algebraic: {
            const double u2 = (p.epsilon * xi) * (p.epsilon * xi);
            return 1.0 / (1.0 + detail::ipow(u2, p.n_exp));
        }
        case LaunchProfile::Kind::DualBeam:
            return eval_R(*p.base, xi - p.offset) + eval_R(*p.base, xi + p.offset);
        case LaunchProfile::Kind::Tabulated: {
            const auto m = detail::monotone_slopes(p.knots);
            return detail::eval_monotone_cubic(p.knots, m, xi);
        }
    }
    throw std::logic_error("eval_R: bad profile kind");
}

// Launch value of G = R''/R from the closed forms.
inline double eval_G0(const LaunchProfile& p, double xi) {
    const double e = p.epsilon;
    switch (p.kind) {
        case LaunchProfile::Kind::Gaussian: {
            const double e2 = e * e;
            return 4.0 * e2 * e2 * (xi * xi) - 2.0 * e2;
        }
        case LaunchProfile::Kind::Algebraic: {
            // R = 1/(1+u^{2N}), u = eps*xi. In u:
            //   R''/R = [-2N(2N-1) u^{2N-2} + 2N(2N+1) u^{4N-2}] / (1+u^{2N})^2
            const int N = p.n_exp;
            const double u = e * xi;
            const double uN2 = detail::ipow(u * u, N - 1);  // u^{2N-2}
            const double u2N = uN2 * (u * u);               // u^{2N}
            const double num = -2.0 * N * (2 * N - 1) * uN2 + 2.0 * N * (2 * N + 1) * uN2 * u2N;
            const double den = (1.0 + u2N) * (1.0 + u2N);
            return e * e * num / den;
        }
        case LaunchProfile::Kind::DualBeam: {
            const double rm = eval_R(*p.base, xi - p.offset);
            const double rp = eval_R(*p.base, xi + p.offset);
            const double gm = eval_G0(*p.base, xi - p.offset);
            const double gp = eval_G0(*p.base, xi + p.offset);
            return (gm * rm + gp * rp) / (rm + rp);
        }
        case LaunchProfile::Kind::Tabulated:
            throw std::invalid_argument("eval_G0: tabulated profiles use the front stencil");
    }
    throw std::logic_error("eval_G0: bad profile kind");
}

// d/dxi of eval_G0, used by the frozen-launch-G integration mode.
inline double eval_dG0(const LaunchProfile& p, double xi) {
    const double e = p.epsilon;
    switch (p.kind) {
        case LaunchProfile::Kind::Gaussian: {
            const double e2 = e * e;
            return 8.0 * e2 * e2 * xi;
        }
        case LaunchProfile::Kind::Algebraic: {
            // G0 = e^2 P(u)/(1+u^{2N})^2 with
            //   P(u)  = -2N(2N-1) u^{2N-2} + 2N(2N+1) u^{4N-2}
            //   P'(u) = -2N(2N-1)(2N-2) u^{2N-3} + 2N(2N+1)(4N-2) u^{4N-3}
            // dG0/dxi = e^3 [P'(1+u^{2N}) - 4N u^{2N-1} P] / (1+u^{2N})^3
            const int N = p.n_exp;
            const double u = e * xi;
            const double u2N = detail::ipow(u, 2 * N);
            const double P = -2.0 * N * (2 * N - 1) * detail::ipow(u, 2 * N - 2) +
                             2.0 * N * (2 * N + 1) * detail::ipow(u, 4 * N - 2);
            double Pp = 2.0 * N * (2 * N + 1) * (4 * N - 2) * detail::ipow(u, 4 * N - 3);
            if (N >= 2)
                Pp -= 2.0 * N * (2 * N - 1) * (2 * N - 2) * detail::ipow(u, 2 * N - 3);
            const double den = 1.0 + u2N;
            return e * e * e *
                   (Pp * den - 4.0 * N * detail::ipow(u, 2 * N - 1) * P) / (den * den * den);
        }
        case LaunchProfile::Kind::DualBeam:
        case LaunchProfile::Kind::Tabulated: {
            const double h = 1e-4;
            return (eval_G0(p, xi + h) - eval_G0(p, xi - h)) / (2.0 * h);
        }
    }
    throw std::logic_error("eval_dG0: bad profile kind");
}

}  // namespace beamtrace

#endif
