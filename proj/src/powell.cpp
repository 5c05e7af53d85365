#include "qkr/powell.hpp"

#include <cmath>
#include <stdexcept>

namespace qkr {

namespace {

constexpr double kGolden = 1.618033988749894848;
constexpr double kBrentShrink = 0.3819660112501051;  // 2 - golden ratio
constexpr double kTiny = 1e-20;

// Objective restricted to a line, with the trial-point buffer reused across
// evaluations.
class LineFunction {
public:
    LineFunction(const Objective& f, const Eigen::VectorXd& origin, const Eigen::VectorXd& dir)
        : f_(f), origin_(origin), dir_(dir), trial_(origin.size()) {}

    double operator()(double t) {
        trial_ = origin_ + t * dir_;
        ++evals_;
        return f_(trial_);
    }

    long evals() const { return evals_; }

private:
    const Objective& f_;
    const Eigen::VectorXd& origin_;
    const Eigen::VectorXd& dir_;
    Eigen::VectorXd trial_;
    long evals_ = 0;
};

struct Bracket {
    double a, b, c;
    double fa, fb, fc;
    bool ok;
};

// Golden-ratio downhill expansion from (0, step) until f(b) sits below both
// ends, with a parabolic shortcut. ok=false flags runaway descent.
Bracket bracket_minimum(LineFunction& g, double f0, double step) {
    double a = 0.0, fa = f0;
    double b = step, fb = g(b);
    if (fb > fa) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = b + kGolden * (b - a);
    double fc = g(c);
    int guard = 0;
    while (fb > fc) {
        if (++guard > 60) return {a, b, c, fa, fb, fc, false};
        const double r = (b - a) * (fb - fc);
        const double q = (b - c) * (fb - fa);
        const double denom = 2.0 * std::copysign(std::max(std::fabs(q - r), kTiny), q - r);
        double u = b - ((b - c) * q - (b - a) * r) / denom;
        const double ulim = b + 100.0 * (c - b);
        double fu;
        if ((b - u) * (u - c) > 0.0) {  // parabolic point between b and c
            fu = g(u);
            if (fu < fc) return {b, u, c, fb, fu, fc, true};
            if (fu > fb) return {a, b, u, fa, fb, fu, true};
            u = c + kGolden * (c - b);
            fu = g(u);
        } else if ((c - u) * (u - ulim) > 0.0) {  // beyond c, within the cap
            fu = g(u);
            if (fu < fc) {
                b = c;
                c = u;
                fb = fc;
                fc = fu;
                u = c + kGolden * (c - b);
                fu = g(u);
            }
        } else if ((u - ulim) * (ulim - c) >= 0.0) {  // cap the step
            u = ulim;
            fu = g(u);
        } else {  // parabolic step was useless
            u = c + kGolden * (c - b);
            fu = g(u);
        }
        a = b;
        b = c;
        c = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    return {a, b, c, fa, fb, fc, true};
}

struct LineMinimum {
    double t;
    double f;
};

// Brent's parabolic-interpolation minimizer on a bracketing triple.
LineMinimum brent_minimize(LineFunction& g, const Bracket& br, double tol) {
    double a = std::min(br.a, br.c);
    double b = std::max(br.a, br.c);
    double x = br.b, w = br.b, v = br.b;
    double fx = br.fb, fw = br.fb, fv = br.fb;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol + 1e-12 * std::fabs(x);
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool take_golden = true;
        if (std::fabs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            const double e_prev = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
                take_golden = false;
            }
        }
        if (take_golden) {
            e = (x >= xm ? a : b) - x;
            d = kBrentShrink * e;
        }
        const double u = std::fabs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
        const double fu = g(u);
        if (fu <= fx) {
            if (u >= x)
                a = x;
            else
                b = x;
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return {x, fx};
}

}  // namespace

PowellResult powell_minimize(const Objective& f, const Eigen::VectorXd& x0,
                             const PowellOptions& options) {
    const int n = static_cast<int>(x0.size());
    if (n < 1) throw std::invalid_argument("powell_minimize: empty parameter vector");
    if (options.max_cycles < 1)
        throw std::invalid_argument("powell_minimize: need at least one cycle");
    if (options.bracket_step <= 0.0 || options.line_tol <= 0.0)
        throw std::invalid_argument("powell_minimize: step and tolerance must be positive");

    Eigen::MatrixXd dirs = Eigen::MatrixXd::Identity(n, n);
    PowellResult result;
    result.x = x0;
    result.f = f(result.x);
    result.evaluations = 1;
    result.trace.push_back({0, result.f});

    Eigen::VectorXd x_start(n), x_ext(n), net_dir(n);
    for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
        const double f_start = result.f;
        x_start = result.x;
        double biggest_drop = 0.0;
        int biggest_index = 0;
        bool any_improvement = false;

        auto minimize_along = [&](const Eigen::VectorXd& dir) -> double {
            LineFunction g(f, result.x, dir);
            const Bracket br = bracket_minimum(g, result.f, options.bracket_step);
            double t_best, f_best;
            if (br.ok) {
                const LineMinimum lm = brent_minimize(g, br, options.line_tol);
                t_best = lm.t;
                f_best = lm.f;
            } else {
                // Runaway downhill expansion: take the furthest sample.
                t_best = br.c;
                f_best = br.fc;
                result.note = "unbounded descent capped during bracketing";
            }
            result.evaluations += g.evals();
            if (f_best < result.f) {
                result.x += t_best * dir;
                const double drop = result.f - f_best;
                result.f = f_best;
                any_improvement = true;
                return drop;
            }
            return 0.0;
        };

        for (int i = 0; i < n; ++i) {
            const double drop = minimize_along(dirs.col(i));
            if (drop > biggest_drop) {
                biggest_drop = drop;
                biggest_index = i;
            }
        }

        result.cycles = cycle;
        result.trace.push_back({cycle, result.f});

        const double df = f_start - result.f;
        const double dx = (result.x - x_start).cwiseAbs().maxCoeff();
        if (2.0 * df <= options.f_tol * (std::fabs(f_start) + std::fabs(result.f)) + 1e-25 ||
            dx <= options.x_tol) {
            result.converged = true;
            if (!any_improvement && result.note.empty())
                result.note = "no descent direction found in final cycle";
            break;
        }

        // Powell's direction-replacement test: try the extrapolated point and
        // swap the dominant direction for the net displacement when that
        // keeps the set usefully non-degenerate.
        x_ext = 2.0 * result.x - x_start;
        const double f_ext = f(x_ext);
        ++result.evaluations;
        if (f_ext < f_start) {
            const double term1 = f_start - result.f - biggest_drop;
            const double term2 = f_start - f_ext;
            const double crit =
                2.0 * (f_start - 2.0 * result.f + f_ext) * term1 * term1 - biggest_drop * term2 * term2;
            if (crit < 0.0) {
                net_dir = result.x - x_start;
                const double len = net_dir.norm();
                if (len > 0.0) {
                    net_dir /= len;
                    minimize_along(net_dir);
                    dirs.col(biggest_index) = dirs.col(n - 1);
                    dirs.col(n - 1) = net_dir;
                }
            }
        }
    }

    if (!result.converged && result.note.empty())
        result.note = "cycle limit reached before tolerances were met";
    return result;
}

}  // namespace qkr
