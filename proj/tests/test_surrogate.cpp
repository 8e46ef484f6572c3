#include "pfnet/surrogate.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

namespace {

using namespace pfnet;

ClosedNetwork two_cycle(ServiceCurve a, ServiceCurve b, long m) {
    ClosedNetwork net;
    net.curves = {std::move(a), std::move(b)};
    net.routing = {{0.0, 1.0}, {1.0, 0.0}};
    net.population = m;
    return net;
}

double poisson_pmf(double a, long q) { return std::exp(-a + q * std::log(a) - std::lgamma(q + 1.0)); }

}  // namespace

TEST_CASE("geometric queue: pmf and closed-form moments") {
    auto q = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.5);
    REQUIRE(q.pmf.size() >= 10);
    for (long x = 0; x < 10; ++x)
        CHECK(q.pmf[x] == doctest::Approx(std::pow(0.5, x + 1)).epsilon(1e-12));
    CHECK(q.mom.mean == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.mom.variance == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(q.mom.beta3_signed == doctest::Approx(6.0).epsilon(1e-9));  // third cumulant
    CHECK(q.mom.beta3 == doctest::Approx(7.0).epsilon(1e-9));         // E|X-1|^3
    CHECK(q.mom.gamma_sq == doctest::Approx(2.0 / 9.0).epsilon(1e-10));
    double total = 0.0;
    for (double p : q.pmf) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("infinite server queue is Poisson") {
    auto q = queue_pmf(ServiceCurve::infinite_server(2.0), 1, 3.0);  // Poisson(1.5)
    for (long x = 0; x < 12; ++x)
        CHECK(q.pmf[x] == doctest::Approx(poisson_pmf(1.5, x)).epsilon(1e-10));
    CHECK(q.mom.mean == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(q.mom.variance == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("two-server queue: pinned head probabilities") {
    // mu = 1, c = 2, a = 1: Z = 3, p0 = p1 = 1/3, p2 = 1/6, mean = 4/3.
    auto q = queue_pmf(ServiceCurve::multi_server(1.0, 2), 0, 1.0);
    CHECK(q.pmf[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(q.pmf[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(q.pmf[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(q.mom.mean == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("tabulated queue: pinned head probabilities") {
    // table (1, 3), a = 1: weights 1, 1, 1/3, 1/9, ... so Z = 5/2.
    auto q = queue_pmf(ServiceCurve::tabulated({1.0, 3.0}), 0, 1.0);
    CHECK(q.pmf[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(q.pmf[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(q.pmf[2] == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("queue pmf boundary and error cases") {
    auto idle = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.0);
    REQUIRE(idle.pmf.size() == 1);
    CHECK(idle.pmf[0] == doctest::Approx(1.0));
    CHECK(idle.mom.mean == doctest::Approx(0.0));

    CHECK_THROWS_AS(queue_pmf(ServiceCurve::single_server(1.0), 0, 1.0), model_error);
    CHECK_THROWS_AS(queue_pmf(ServiceCurve::single_server(1.0), 0, 1.5), model_error);
    CHECK_THROWS_AS(queue_pmf(ServiceCurve::multi_server(1.0, 2), 0, 2.0), model_error);
    CHECK_NOTHROW(queue_pmf(ServiceCurve::infinite_server(1.0), 0, 50.0));
}

TEST_CASE("closed-form mean/var agrees with pmf moments for every kind") {
    std::vector<std::pair<ServiceCurve, std::vector<double>>> cases = {
        {ServiceCurve::single_server(1.0), {0.1, 0.5, 0.9}},
        {ServiceCurve::multi_server(1.3, 3), {0.5, 2.0, 3.5}},
        {ServiceCurve::infinite_server(0.7), {0.3, 2.0, 11.0}},
        {ServiceCurve::algebraic(2.0, 2.5), {0.4, 1.2, 1.8}},
        {ServiceCurve::tabulated({1.0, 2.0, 2.0, 4.0}), {0.5, 1.9, 3.3}},
    };
    for (const auto& [curve, arrivals] : cases)
        for (double a : arrivals) {
            auto q = queue_pmf(curve, 0, a);
            auto mv = open_queue_mean_var(curve, a);
            CHECK(mv.mean == doctest::Approx(q.mom.mean).epsilon(1e-8));
            CHECK(mv.var == doctest::Approx(q.mom.variance).epsilon(1e-8));
        }
}

TEST_CASE("absolute central moments by direct summation") {
    auto q = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.5);
    CHECK(abs_central_moment(q.pmf, 2.0) == doctest::Approx(q.mom.variance).epsilon(1e-10));
    CHECK(abs_central_moment(q.pmf, 3.0) == doctest::Approx(q.mom.beta3).epsilon(1e-10));
    CHECK(abs_central_moment(q.pmf, 4.0) == doctest::Approx(q.mom.beta4).epsilon(1e-10));
    CHECK(abs_central_moment(q.pmf, 1.0) == doctest::Approx(1.0).epsilon(1e-9));  // E|X-1| = 1
    CHECK_THROWS_AS(abs_central_moment(q.pmf, 0.0), model_error);

    // Lyapounov ordering sigma^2 <= beta_r^(2/r) for r = 2.5, 3.
    for (double r : {2.5, 3.0}) {
        double br = abs_central_moment(q.pmf, r);
        CHECK(q.mom.variance <= std::pow(br, 2.0 / r) + 1e-12);
    }
}

TEST_CASE("moment aggregation sums per-queue contributions") {
    auto q1 = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.5);
    auto q2 = queue_pmf(ServiceCurve::infinite_server(1.0), 1, 2.0);
    auto agg = aggregate_moments({q1, q2});
    CHECK(agg.mean_total == doctest::Approx(q1.mom.mean + q2.mom.mean).epsilon(1e-12));
    CHECK(agg.var_total == doctest::Approx(q1.mom.variance + q2.mom.variance).epsilon(1e-12));
    CHECK(agg.sigma() == doctest::Approx(std::sqrt(agg.var_total)));
    CHECK(agg.gamma_sq_total ==
          doctest::Approx(q1.mom.gamma_sq + q2.mom.gamma_sq).epsilon(1e-12));
    // gamma^2_k <= min(sigma^2_k, 1/4).
    for (const auto& mom : agg.per_queue) {
        CHECK(mom.gamma_sq <= mom.variance + 1e-12);
        CHECK(mom.gamma_sq <= 0.25 + 1e-12);
    }
}

TEST_CASE("lambda solve on the two identical M/M/1 cycle") {
    auto net = two_cycle(ServiceCurve::single_server(1.0), ServiceCurve::single_server(1.0), 1);
    auto s = solve_lambda(net, 1);
    CHECK(s.lambda == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(s.m == 1);
    CHECK(s.rho0 == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(s.alpha == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::abs(s.mom.mean_total - 1.0) <= 1e-9);
}

TEST_CASE("lambda solve with a mixed F/I network has a closed form") {
    // single(1) + infinite(1), pi = 1/2 each, m = 10: lambda = 12 - 2 sqrt(26).
    auto net = two_cycle(ServiceCurve::single_server(1.0), ServiceCurve::infinite_server(1.0), 10);
    auto s = solve_lambda(net, 10);
    CHECK(s.lambda == doctest::Approx(12.0 - 2.0 * std::sqrt(26.0)).epsilon(1e-8));
    CHECK(std::abs(s.mom.mean_total - 10.0) <= 1e-8);
}

TEST_CASE("lambda solve degenerate and unattainable cases") {
    auto net = two_cycle(ServiceCurve::single_server(1.0), ServiceCurve::single_server(1.0), 0);
    auto s = solve_lambda(net, 0);
    CHECK(s.lambda == doctest::Approx(0.0));
    CHECK(s.mom.mean_total == doctest::Approx(0.0));

    long huge = 1000000000000000000L;  // beyond the floating bracket
    CHECK_THROWS_AS(solve_lambda(net, huge), model_error);
    try {
        solve_lambda(net, huge);
    } catch (const model_error& e) {
        CHECK(std::string(e.what()).find("population exceeds representable load") !=
              std::string::npos);
    }
}

TEST_CASE("lambda solve is independent of the initial guess") {
    auto net = two_cycle(ServiceCurve::single_server(1.0), ServiceCurve::multi_server(0.6, 2), 25);
    auto a = solve_lambda(net, 25, 0.01);
    auto b = solve_lambda(net, 25, 1.9);
    CHECK(a.lambda == doctest::Approx(b.lambda).epsilon(1e-10));
}

TEST_CASE("m(lambda) is increasing with derivative sigma^2 / lambda") {
    auto net = two_cycle(ServiceCurve::single_server(1.0), ServiceCurve::infinite_server(0.8), 0);
    auto total_mean = [&](double lam) {
        auto part = partition(net, lam);
        double m = 0.0;
        for (int k = 0; k < net.size(); ++k)
            m += open_queue_mean_var(net.curves[k], lam * part.pi[k]).mean;
        return m;
    };
    double prev = 0.0;
    for (double lam : {0.2, 0.5, 0.9, 1.3, 1.7}) {
        double cur = total_mean(lam);
        CHECK(cur > prev);
        prev = cur;
        // Finite-difference derivative vs sigma^2/lambda.
        auto part = partition(net, lam);
        double var = 0.0;
        for (int k = 0; k < net.size(); ++k)
            var += open_queue_mean_var(net.curves[k], lam * part.pi[k]).var;
        double h = 1e-6 * lam;
        double fd = (total_mean(lam + h) - total_mean(lam - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(var / lam).epsilon(1e-5));
    }
}

TEST_CASE("characteristic functions: pinned values and symmetry") {
    auto q = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.5);
    CHECK(std::abs(char_fn(q, 0.0) - 1.0) <= 1e-12);
    for (double theta : {0.3, 0.7, 1.5, 3.0}) {
        auto v = char_fn(q, theta);
        CHECK(std::abs(v) <= 1.0 + 1e-12);
        // Geometric closed form (1-rho) e^{-i m theta} / (1 - rho e^{i theta}).
        std::complex<double> eit(std::cos(theta), std::sin(theta));
        auto closed = 0.5 * std::exp(std::complex<double>(0.0, -q.mom.mean * theta)) /
                      (1.0 - 0.5 * eit);
        CHECK(std::abs(v - closed) <= 1e-10);
        // Conjugate symmetry.
        CHECK(std::abs(char_fn(q, -theta) - std::conj(v)) <= 1e-12);
    }

    // Poisson closed form exp(a(e^{i theta} - 1)) times the centering phase.
    auto p = queue_pmf(ServiceCurve::infinite_server(1.0), 1, 1.5);
    double theta = 0.7;
    std::complex<double> eit(std::cos(theta), std::sin(theta));
    auto closed = std::exp(1.5 * (eit - 1.0)) * std::exp(std::complex<double>(0.0, -1.5 * theta));
    CHECK(std::abs(char_fn(p, theta) - closed) <= 1e-10);
}

TEST_CASE("characteristic function derivatives at zero match the moments") {
    auto q = queue_pmf(ServiceCurve::multi_server(1.0, 2), 0, 1.2);
    double h = 1e-4;
    auto f = [&](double t) { return char_fn(q, t); };
    auto d1 = (f(h) - f(-h)) / (2.0 * h);
    CHECK(std::abs(d1) <= 1e-6);  // centered variable: phi'(0) = 0
    auto d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    CHECK(-d2.real() == doctest::Approx(q.mom.variance).epsilon(1e-6));
}

TEST_CASE("total and hat characteristic functions factorize") {
    auto net = two_cycle(ServiceCurve::single_server(1.0), ServiceCurve::single_server(2.0), 4);
    auto s = solve_lambda(net, 4);
    for (double theta : {0.4, 1.1, 2.8}) {
        auto total = char_fn_total(s, theta);
        auto prod = char_fn(s.queues[0], theta) * char_fn(s.queues[1], theta);
        CHECK(std::abs(total - prod) <= 1e-12);
        auto hat = char_fn_hat(s, {0}, theta);
        CHECK(std::abs(hat - char_fn(s.queues[1], theta)) <= 1e-12);
    }
}

TEST_CASE("size-biased laws") {
    // Poisson(a): X~ = 1 + Poisson(a).
    auto p = queue_pmf(ServiceCurve::infinite_server(1.0), 0, 1.3);
    auto sb = size_biased(p);
    CHECK(sb[0] == doctest::Approx(0.0));
    for (long x = 1; x < 12; ++x)
        CHECK(sb[x] == doctest::Approx(poisson_pmf(1.3, x - 1)).epsilon(1e-9));

    // Geometric(1/2): P(X~ = x) = x / 2^{x+1}.
    auto g = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.5);
    auto sg = size_biased(g);
    for (long x = 1; x < 15; ++x)
        CHECK(sg[x] == doctest::Approx(x * std::pow(0.5, x + 1)).epsilon(1e-10));
    double total = 0.0;
    for (double v : sg) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    auto idle = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.0);
    CHECK_THROWS_AS(size_biased(idle), model_error);
}
