#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double dot(const Vec& a, const double* b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double ystar(long long y, double c) { return std::max(static_cast<double>(y), c); }

}  // namespace

Vec eta_path(const Toy& toy, const Vec& nu) {
    const std::size_t n = toy.y.size();
    const int k = toy.k();
    const double* beta = nu.data();
    const double* phi = nu.data() + k;
    const double* theta = nu.data() + k + toy.p;
    Vec eta(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double e = dot(toy.x[t], beta);
        for (int j = 1; j <= toy.p; ++j) {
            if (t < static_cast<std::size_t>(j)) continue;
            const std::size_t s = t - static_cast<std::size_t>(j);
            e += phi[j - 1] * (std::log(ystar(toy.y[s], toy.c)) - dot(toy.x[s], beta));
        }
        for (int j = 1; j <= toy.q; ++j) {
            if (t < static_cast<std::size_t>(j)) continue;
            const std::size_t s = t - static_cast<std::size_t>(j);
            e += theta[j - 1] * (std::log(ystar(toy.y[s], toy.c)) - eta[s]);
        }
        eta[t] = e;
    }
    return eta;
}

double loglik(const Toy& toy, const Vec& nu) {
    const Vec eta = eta_path(toy, nu);
    double ll = 0.0;
    for (std::size_t t = 0; t < eta.size(); ++t) {
        if (!std::isfinite(eta[t]) || eta[t] > 50.0) return kNegInf;
        const double y = static_cast<double>(toy.y[t]);
        ll += -std::exp(eta[t]) + y * eta[t] - std::lgamma(y + 1.0);
    }
    return ll;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x[i]));
        Vec up = x, down = x;
        up[i] += step;
        down[i] -= step;
        g[i] = (f(up) - f(down)) / (2.0 * step);
    }
    return g;
}

Rows fd_information(const Toy& toy, const Vec& nu, double h) {
    const std::size_t d = nu.size();
    const std::size_t n = toy.y.size();
    Rows deta(d, Vec(n));
    for (std::size_t i = 0; i < d; ++i) {
        Vec up = nu, down = nu;
        up[i] += h;
        down[i] -= h;
        const Vec a = eta_path(toy, up), b = eta_path(toy, down);
        for (std::size_t t = 0; t < n; ++t) deta[i][t] = (a[t] - b[t]) / (2.0 * h);
    }
    const Vec eta = eta_path(toy, nu);
    Rows G(d, Vec(d, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
        const double lam = std::exp(eta[t]);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) G[i][j] += lam * deta[i][t] * deta[j][t];
        }
    }
    return G;
}

Maximum bfgs_maximize(const std::function<double(const Vec&)>& f, Vec x, double grad_tol,
                      int max_iter) {
    const std::size_t d = x.size();
    auto neg = [&](const Vec& v) { return -f(v); };
    Rows H(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) H[i][i] = 1.0;

    Maximum out;
    double fx = neg(x);
    Vec g = fd_gradient(neg, x);
    double gmax = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it;
        gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < grad_tol) {
            out.converged = true;
            break;
        }
        Vec dir(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) dir[i] -= H[i][j] * g[j];
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < d; ++i) slope += dir[i] * g[i];
        if (slope >= 0.0) {  // lost descent, restart from steepest descent
            for (std::size_t i = 0; i < d; ++i) {
                std::fill(H[i].begin(), H[i].end(), 0.0);
                H[i][i] = 1.0;
                dir[i] = -g[i];
            }
            slope = 0.0;
            for (std::size_t i = 0; i < d; ++i) slope -= g[i] * g[i];
        }
        double step = 1.0;
        Vec xn(d);
        double fn = 0.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            for (std::size_t i = 0; i < d; ++i) xn[i] = x[i] + step * dir[i];
            fn = neg(xn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // roundoff floor reached; converged when the gradient is already small
            out.converged = gmax < 1e-4;
            break;
        }
        const Vec gn = fd_gradient(neg, xn);
        Vec s(d), yv(d);
        double sy = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            s[i] = xn[i] - x[i];
            yv[i] = gn[i] - g[i];
            sy += s[i] * yv[i];
        }
        if (sy > 1e-14) {
            Vec Hy(d, 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) Hy[i] += H[i][j] * yv[j];
            }
            double yHy = 0.0;
            for (std::size_t i = 0; i < d; ++i) yHy += yv[i] * Hy[i];
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    H[i][j] += (sy + yHy) * s[i] * s[j] / (sy * sy) -
                               (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
                }
            }
        }
        x = xn;
        fx = fn;
        g = gn;
    }
    // budget spent while creeping along a flat valley
    if (out.iterations == max_iter - 1 && gmax < 1e-5) out.converged = true;
    out.nu = x;
    out.value = -fx;
    return out;
}

Vec cold_start(const Toy& toy) {
    Vec nu(static_cast<std::size_t>(toy.dim()), 0.0);
    double mean = 0.0;
    for (long long v : toy.y) mean += static_cast<double>(v);
    mean /= static_cast<double>(toy.y.size());
    for (int j = 0; j < toy.k(); ++j) {
        bool ones = true;
        for (const auto& row : toy.x) ones = ones && row[static_cast<std::size_t>(j)] == 1.0;
        if (ones) {
            nu[static_cast<std::size_t>(j)] = std::log(std::max(mean, toy.c));
            break;
        }
    }
    return nu;
}

Maximum profile(const Toy& toy) {
    return bfgs_maximize([&](const Vec& nu) { return loglik(toy, nu); }, cold_start(toy));
}

namespace {
Vec normalize_logs(const Vec& lls) {
    const double top = *std::max_element(lls.begin(), lls.end());
    Vec p(lls.size());
    double total = 0.0;
    for (std::size_t i = 0; i < lls.size(); ++i) {
        p[i] = std::exp(lls[i] - top);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}
}  // namespace

Vec brute_one_step(const Toy& toy, const Vec& x_next, int cap) {
    Vec lls;
    for (int y = 0; y < cap; ++y) {
        Toy ext = toy;
        ext.x.push_back(x_next);
        ext.y.push_back(y);
        lls.push_back(profile(ext).value);
    }
    return normalize_logs(lls);
}

Vec brute_two_step(const Toy& toy, const Vec& x1, const Vec& x2, int cap) {
    Vec joint;
    for (int a = 0; a < cap; ++a) {
        for (int b = 0; b < cap; ++b) {
            Toy ext = toy;
            ext.x.push_back(x1);
            ext.x.push_back(x2);
            ext.y.push_back(a);
            ext.y.push_back(b);
            joint.push_back(profile(ext).value);
        }
    }
    const Vec pj = normalize_logs(joint);
    Vec marginal(static_cast<std::size_t>(cap), 0.0);
    for (int a = 0; a < cap; ++a) {
        for (int b = 0; b < cap; ++b) {
            marginal[static_cast<std::size_t>(b)] += pj[static_cast<std::size_t>(a * cap + b)];
        }
    }
    return marginal;
}

Toy random_toy(std::uint64_t seed, int max_n) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Toy toy;
    const int kind = static_cast<int>(seed % 3);
    toy.p = kind == 1 ? 1 : 0;
    toy.q = kind == 2 ? 1 : 0;
    const int n = 15 + static_cast<int>(u(gen) * (max_n - 15 + 1));
    toy.truth = {0.3 + 0.6 * u(gen), -0.4 + 0.8 * u(gen)};
    if (toy.p) toy.truth.push_back(-0.4 + 0.8 * u(gen));
    if (toy.q) toy.truth.push_back(-0.4 + 0.8 * u(gen));

    for (int t = 1; t <= n; ++t) {
        toy.x.push_back({1.0, std::cos(2.0 * std::numbers::pi * t / 6.0)});
        toy.y.push_back(0);
        const Vec eta = eta_path(toy, toy.truth);
        std::poisson_distribution<long long> pois(std::exp(eta.back()));
        toy.y.back() = pois(gen);
    }
    return toy;
}

Vec poisson_pmf(double lambda, int cap) {
    Vec p(static_cast<std::size_t>(cap));
    for (int y = 0; y < cap; ++y) {
        p[static_cast<std::size_t>(y)] = std::exp(-lambda + y * std::log(lambda) - std::lgamma(y + 1.0));
    }
    return p;
}

}  // namespace oracle
