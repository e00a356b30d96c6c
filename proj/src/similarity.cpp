#include "dlss/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include "dlss/error.hpp"
#include "dlss/linalg.hpp"

namespace dlss {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Real = long double;

Real d1_stencil(Real fm2, Real fm1, Real fp1, Real fp2, Real h) { return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h); }

Real d2_stencil(Real fm2, Real fm1, Real f0, Real fp1, Real fp2, Real h) {
    return (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
}

}  // namespace

TravelingWave TravelingWave::make(double alpha, double kappa) {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) fail(ErrorCode::InvalidArgument, "traveling wave: need alpha > 1");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) fail(ErrorCode::InvalidArgument, "traveling wave: need kappa > 0");
    TravelingWave w;
    w.alpha = alpha;
    w.kappa = kappa;
    w.delta = 3.0 / (alpha - 1.0);
    w.speed = std::pow(kappa, alpha - 1.0) * 3.0 * (alpha + 2.0) / ((alpha - 1.0) * (alpha - 1.0));
    return w;
}

double TravelingWave::operator()(double t, double x) const {
    const double s = speed * t - x;
    return s > 0.0 ? kappa * std::pow(s, delta) : 0.0;
}

std::vector<WaveResidualRow> wave_residual(const TravelingWave& wave, const WaveResidualOptions& options) {
    if (options.points == 0 || !(options.margin > 0.0) || !(options.width >= 0.0))
        fail(ErrorCode::InvalidArgument, "wave_residual: bad sampling window");
    const Real a = wave.alpha, kappa = wave.kappa, delta = wave.delta, c = wave.speed;
    auto rho = [&](Real t, Real x) {
        const Real s = c * t - x;
        return s > 0 ? kappa * std::pow(s, delta) : Real(0);
    };
    const Real t = options.t;
    std::vector<WaveResidualRow> rows;
    for (double hd : options.h_ladder) {
        if (!(hd > 0.0) || 4.0 * hd >= options.margin)
            fail(ErrorCode::InvalidArgument, "wave_residual: each h must satisfy 0 < 4h < margin");
        const Real h = hd;
        auto g = [&](Real x) {
            const Real f0 = rho(t, x), fm1 = rho(t, x - h), fp1 = rho(t, x + h), fm2 = rho(t, x - 2 * h),
                       fp2 = rho(t, x + 2 * h);
            const Real r1 = d1_stencil(fm2, fm1, fp1, fp2, h);
            const Real r2 = d2_stencil(fm2, fm1, f0, fp1, fp2, h);
            return std::pow(f0, a - 2) * (f0 * r2 - r1 * r1);
        };
        WaveResidualRow row;
        row.h = hd;
        Real worst = 0, scale = 0;
        const Real ht = h / c;
        for (std::size_t i = 0; i < options.points; ++i) {
            const Real frac = options.points == 1 ? Real(0) : Real(i) / Real(options.points - 1);
            const Real s = options.margin + frac * options.width;
            const Real x = c * t - s;
            const Real dt = d1_stencil(rho(t - 2 * ht, x), rho(t - ht, x), rho(t + ht, x), rho(t + 2 * ht, x), ht);
            const Real flux = d2_stencil(g(x - 2 * h), g(x - h), g(x), g(x + h), g(x + 2 * h), h);
            worst = std::max(worst, std::abs(dt + flux));
            scale = std::max(scale, std::abs(dt));
        }
        row.residual = static_cast<double>(worst);
        row.relative = scale > 0 ? static_cast<double>(worst / scale) : static_cast<double>(worst);
        row.order = rows.empty() ? kNaN : std::log2(rows.back().residual / row.residual) / std::log2(rows.back().h / row.h);
        rows.push_back(row);
    }
    return rows;
}

double similarity_gamma(double alpha) { return 1.0 / (3.0 + alpha); }

std::array<double, 3> profile_ode_rhs(double alpha, double y, const std::array<double, 3>& s) {
    const double p = s[0], p1 = s[1], p2 = s[2];
    if (!(p > 0.0)) fail(ErrorCode::Domain, "profile ODE: Phi must be positive");
    return {p1, p2,
            similarity_gamma(alpha) * y * std::pow(p, 2.0 - alpha) - (alpha - 3.0) * p1 * p2 / p +
                (alpha - 2.0) * p1 * p1 * p1 / (p * p)};
}

double profile_residual(double alpha, double y, double phi, double d1, double d2, double d3) {
    if (!(phi > 0.0)) fail(ErrorCode::Domain, "profile residual: Phi must be positive");
    const double flux_derivative = std::pow(phi, alpha - 1.0) * d3 + (alpha - 3.0) * std::pow(phi, alpha - 2.0) * d1 * d2 -
                                   (alpha - 2.0) * std::pow(phi, alpha - 3.0) * d1 * d1 * d1;
    return flux_derivative - similarity_gamma(alpha) * y * phi;
}

const char* tail_kind_name(TailKind kind) {
    switch (kind) {
        case TailKind::None: return "none";
        case TailKind::Algebraic: return "algebraic";
        case TailKind::Support: return "support";
    }
    return "?";
}

namespace {

namespace odeint = boost::numeric::odeint;

// Integration runs in (log Phi, Phi', Phi'') so that no trial stage can leave Phi > 0.
using State = std::array<double, 3>;

struct LogSystem {
    double alpha, gamma;
    void operator()(const State& s, State& ds, double y) const {
        const double inv = std::exp(-s[0]);
        const double p1 = s[1], p2 = s[2];
        ds[0] = p1 * inv;
        ds[1] = p2;
        ds[2] = gamma * y * std::exp((2.0 - alpha) * s[0]) - (alpha - 3.0) * p1 * p2 * inv +
                (alpha - 2.0) * p1 * p1 * p1 * inv * inv;
    }
};

enum class Outcome { Up, Cross, End };

struct Shot {
    Outcome outcome = Outcome::End;
    double y_end = 0.0;
};

bool finite_state(const State& s) { return std::isfinite(s[0]) && std::isfinite(s[1]) && std::isfinite(s[2]); }

// Integrates one trajectory; when grid is non-empty, Phi is sampled at those abscissae up to the end.
Shot shoot(double alpha, double b, const ShootingOptions& o, std::span<const double> grid = {},
           std::vector<double>* samples = nullptr) {
    const LogSystem sys{alpha, similarity_gamma(alpha)};
    auto stepper = odeint::make_dense_output(o.ode_tol, o.ode_tol, odeint::runge_kutta_dopri5<State>());
    stepper.initialize(State{0.0, 0.0, b}, 0.0, 1e-4);
    const double log_thr = std::log(o.event_threshold);
    std::size_t next = 0;
    State tmp{};
    auto locate = [&](auto&& below, double lo, double hi) {
        for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            stepper.calc_state(mid, tmp);
            (below(tmp) ? hi : lo) = mid;
        }
        return hi;
    };
    auto sample_to = [&](double y_stop) {
        if (!samples) return;
        while (next < grid.size() && grid[next] <= y_stop) {
            stepper.calc_state(grid[next], tmp);
            samples->push_back(std::exp(tmp[0]));
            ++next;
        }
    };
    while (stepper.current_time() < o.y_max) {
        const auto [y0, y1] = stepper.do_step(sys);
        const State& s = stepper.current_state();
        if (!finite_state(s)) fail(ErrorCode::Shooting, "shooting: integrator produced a non-finite state");
        if (y1 - y0 < 1e-14 * std::max(1.0, y1)) {
            // Phi dropping to zero faster than the step control can follow is a steep crossing
            if (s[1] < 0.0) {
                sample_to(y1);
                return Shot{Outcome::Cross, y1};
            }
            fail(ErrorCode::Shooting, "shooting: step size underflow at y = " + std::to_string(y1));
        }
        const bool up = s[1] > 0.0;
        const bool cross = s[0] < log_thr;
        if (up || cross) {
            const double y_up = up ? locate([](const State& z) { return z[1] > 0.0; }, y0, y1) : y1 + 1.0;
            const double y_cross = cross ? locate([&](const State& z) { return z[0] < log_thr; }, y0, y1) : y1 + 1.0;
            Shot shot;
            shot.outcome = y_up < y_cross ? Outcome::Up : Outcome::Cross;
            shot.y_end = std::min(y_up, y_cross);
            sample_to(shot.y_end);
            return shot;
        }
        sample_to(y1);
    }
    return Shot{Outcome::End, stepper.current_time()};
}

struct LineFit {
    double slope = 0.0, intercept = 0.0, ssr = 0.0, stderr_ = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        f.ssr += r * r;
    }
    f.stderr_ = n > 2 ? std::sqrt(f.ssr / static_cast<double>(n - 2) / sxx) : kNaN;
    return f;
}

double quadratic_coefficient(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0;
    for (double v : x) mx += v;
    mx /= static_cast<double>(n);
    std::vector<double> a(9, 0.0), rhs(3, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x[i] - mx;
        const double p[3] = {1.0, t, t * t};
        for (int r = 0; r < 3; ++r) {
            rhs[r] += p[r] * y[i];
            for (int c = 0; c < 3; ++c) a[3 * r + c] += p[r] * p[c];
        }
    }
    return linalg::solve_dense(std::move(a), std::move(rhs))[2];
}

void window(std::span<const double> y, std::span<const double> phi, double lo, double hi, std::vector<double>& wy,
            std::vector<double>& wp) {
    if (y.size() != phi.size()) fail(ErrorCode::InvalidArgument, "tail fit: size mismatch");
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] > 0.0 && phi[i] >= lo && phi[i] <= hi) {
            wy.push_back(y[i]);
            wp.push_back(std::log(phi[i]));
        }
    if (wy.size() < 8) fail(ErrorCode::Shooting, "tail fit: fewer than 8 samples in the fit window");
}

}  // namespace

PowerFit fit_algebraic_tail(std::span<const double> y, std::span<const double> phi, double phi_lo, double phi_hi) {
    std::vector<double> wy, wp;
    window(y, phi, phi_lo, phi_hi, wy, wp);
    for (double& v : wy) v = std::log(v);
    const LineFit f = fit_line(wy, wp);
    return {-f.slope, f.stderr_, quadratic_coefficient(wy, wp), wy.size()};
}

PowerFit fit_support_tail(std::span<const double> y, std::span<const double> phi, double phi_lo, double phi_hi,
                          double& support_radius) {
    std::vector<double> wy, wp;
    window(y, phi, phi_lo, phi_hi, wy, wp);
    const double last = std::max(*std::max_element(wy.begin(), wy.end()), y.empty() ? 0.0 : y.back());
    std::vector<double> lx(wy.size());
    auto fit_at = [&](double ya) {
        for (std::size_t i = 0; i < wy.size(); ++i) lx[i] = std::log(ya - wy[i]);
        return fit_line(lx, wp);
    };
    const double lo = last + 1e-12 * std::max(1.0, last);
    const auto best = boost::math::tools::brent_find_minima([&](double ya) { return fit_at(ya).ssr; }, lo, last + 0.5,
                                                            std::numeric_limits<double>::digits / 2);
    support_radius = best.first;
    const LineFit f = fit_at(best.first);
    return {f.slope, f.stderr_, quadratic_coefficient(lx, wp), wy.size()};
}

ProfileSolution shoot_profile(double alpha, const ShootingOptions& o) {
    // alpha <= 0 is outside the analysed range; the ODE still makes sense while gamma > 0.
    if (!(alpha > -3.0) || !std::isfinite(alpha)) fail(ErrorCode::InvalidArgument, "shooting: need alpha > -3");
    if (!(o.b_lo < o.b_hi)) fail(ErrorCode::InvalidArgument, "shooting: need b_lo < b_hi");
    if (!(o.ode_tol > 0.0) || !(o.event_threshold > 0.0 && o.event_threshold < 1e-3) || !(o.y_max > 0.0) ||
        o.samples < 2)
        fail(ErrorCode::InvalidArgument, "shooting: bad options");

    double lo = o.b_lo, hi = o.b_hi;
    if (shoot(alpha, lo, o).outcome == Outcome::Up || shoot(alpha, hi, o).outcome != Outcome::Up)
        fail(ErrorCode::Shooting, "shooting: bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                      "] has no sign change of the shooting criterion");
    ProfileSolution out;
    out.alpha = alpha;
    out.gamma = similarity_gamma(alpha);
    while (hi - lo > o.b_tol && out.bisections < o.max_bisections) {
        const double mid = 0.5 * (lo + hi);
        (shoot(alpha, mid, o).outcome == Outcome::Up ? hi : lo) = mid;
        ++out.bisections;
    }
    out.b_star = lo;
    out.b_uncertainty = hi - lo;

    out.y_end = shoot(alpha, lo, o).y_end;
    out.y.resize(o.samples);
    for (std::size_t i = 0; i < o.samples; ++i)
        out.y[i] = out.y_end * static_cast<double>(i) / static_cast<double>(o.samples - 1);
    out.y.back() = out.y_end;
    // steep support tails (large alpha) reach the fit window within 1e-4 of the end
    for (int i = 0; i < 400; ++i) out.y.push_back(out.y_end * (1.0 - std::pow(10.0, -2.0 - 10.0 * i / 399.0)));
    std::sort(out.y.begin(), out.y.end());
    out.y.erase(std::unique(out.y.begin(), out.y.end()), out.y.end());
    shoot(alpha, lo, o, out.y, &out.phi);
    out.y.resize(out.phi.size());

    out.fit_phi_lo = 10.0 * o.event_threshold;
    out.fit_phi_hi = 1e-3;
    out.tail_exponent = out.tail_stderr = out.tail_curvature = out.support_radius = kNaN;
    if (alpha == 1.0) return out;
    PowerFit fit;
    if (alpha < 1.0) {
        out.tail = TailKind::Algebraic;
        fit = fit_algebraic_tail(out.y, out.phi, out.fit_phi_lo, out.fit_phi_hi);
    } else {
        out.tail = TailKind::Support;
        fit = fit_support_tail(out.y, out.phi, out.fit_phi_lo, out.fit_phi_hi, out.support_radius);
    }
    out.tail_exponent = fit.exponent;
    out.tail_stderr = fit.stderr_;
    out.tail_curvature = fit.curvature;
    out.fit_points = fit.points;
    return out;
}

}  // namespace dlss
