#include "pfnet/asymptotics.hpp"

#include "pfnet/oracle.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace pfnet;

ClosedNetwork ring(std::vector<ServiceCurve> curves, long m) {
    ClosedNetwork net;
    int n = static_cast<int>(curves.size());
    net.curves = std::move(curves);
    net.routing.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) net.routing[i][(i + 1) % n] = 1.0;
    net.population = m;
    return net;
}

// Balanced cycle of n unit-rate M/M/1 queues with population m; at m = n the
// solved intensity gives rho = 1/2 per queue exactly.
ClosedNetwork balanced_cycle(int n, long m) {
    return ring(std::vector<ServiceCurve>(n, ServiceCurve::single_server(1.0)), m);
}

void check_budget_sane(const ApproxResult& res) {
    CHECK(res.value == doctest::Approx(res.leading_term + res.correction_term));
    for (const auto& item : res.budget) {
        CHECK(item.value >= 0.0);
        CHECK(std::isfinite(item.value));
    }
}

bool has_note(const ApproxResult& res, const std::string& needle) {
    for (const auto& n : res.notes)
        if (n.find(needle) != std::string::npos) return true;
    return false;
}

double sup_scaled_error(const SnPmf& sn, long m, double scale,
                        const std::function<double(double)>& approx_at) {
    double sup = 0.0;
    for (long j = 0; j < static_cast<long>(sn.p.size()); ++j) {
        double err = scale * std::abs(sn.p[j] - approx_at(static_cast<double>(j - m)));
        if (err > sup) sup = err;
    }
    return sup;
}

}  // namespace

TEST_CASE("gamma_sq pinned values") {
    CHECK(gamma_sq({0.5, 0.5}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(gamma_sq({1.0}) == doctest::Approx(0.0));
    CHECK(gamma_sq({0.5, 0.0, 0.5}) == doctest::Approx(0.0));  // span 2

    auto geo = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.5);
    CHECK(gamma_sq(geo.pmf) == doctest::Approx(2.0 / 9.0).epsilon(1e-10));
}

TEST_CASE("characteristic bound holds on pinned pmfs") {
    auto geo = queue_pmf(ServiceCurve::single_server(1.0), 0, 0.5);
    auto rep = char_bound_check(geo.pmf, 1001);
    CHECK(rep.ok);
    CHECK(rep.worst_margin <= 1e-12);

    CHECK(char_bound_check({0.5, 0.5}, 1001).ok);
    CHECK(char_bound_check({0.5, 0.0, 0.5}, 1001).ok);  // vacuous bound, still valid
    CHECK_THROWS_AS(char_bound_check({1.0}, 2), model_error);
}

TEST_CASE("characteristic bound holds for random pmfs") {
    std::mt19937 rng(406020);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        size_t support = 1 + rng() % 30;
        std::vector<double> pmf(support);
        double total = 0.0;
        for (auto& p : pmf) {
            p = unif(rng);
            total += p;
        }
        for (auto& p : pmf) p /= total;
        auto rep = char_bound_check(pmf);
        CHECK(rep.ok);
        double var = abs_central_moment(pmf, 2.0);
        double g2 = gamma_sq(pmf);
        CHECK(g2 <= var + 1e-12);
        CHECK(g2 <= 0.25 + 1e-12);
    }
}

TEST_CASE("normal llt: shape, symmetry and notes") {
    auto net = balanced_cycle(100, 100);
    auto s = solve_lambda(net, 100);
    double sigma = s.mom.sigma();
    CHECK(sigma == doctest::Approx(std::sqrt(200.0)).epsilon(1e-6));  // 100 geometric(1/2)

    auto at0 = normal_llt(s, 0.0);
    CHECK(at0.value == doctest::Approx(1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma)));
    CHECK(at0.correction_term == doctest::Approx(0.0));
    check_budget_sane(at0);
    REQUIRE(at0.budget.size() == 2);
    CHECK(at0.budget[0].name == "lyapunov");
    CHECK(at0.budget[1].name == "char_tail");

    auto plus = normal_llt(s, 7.0);
    auto minus = normal_llt(s, -7.0);
    CHECK(plus.value == doctest::Approx(minus.value).epsilon(1e-14));

    // Small network: gamma*delta < 1, the Berry-Esseen warning fires.
    auto tiny = balanced_cycle(2, 1);
    auto st = solve_lambda(tiny, 1);
    CHECK(has_note(normal_llt(st, 0.0), "Berry-Esseen"));

    CHECK_THROWS_AS(normal_llt(s, 0.0, 0.0), model_error);
    CHECK_THROWS_AS(normal_llt(s, 0.0, 1.5), model_error);
}

TEST_CASE("normal llt error within budget against the convolution oracle") {
    auto net = balanced_cycle(100, 100);
    auto s = solve_lambda(net, 100);
    auto sn = exact_sn_pmf(s.queues);
    double sigma = s.mom.sigma();
    double budget = normal_llt(s, 0.0).budget_total();
    double sup = sup_scaled_error(sn, 100, sigma,
                                  [&](double x) { return normal_llt(s, x).value; });
    CHECK(sup <= budget);
}

TEST_CASE("edgeworth llt: bracket structure") {
    // Skewed ring: rho alternates between 0.2 and 0.7 at lambda = 20.
    std::vector<ServiceCurve> curves;
    for (int k = 0; k < 100; ++k)
        curves.push_back(ServiceCurve::single_server(k % 2 == 0 ? 1.0 : 2.0 / 7.0));
    auto net = ring(std::move(curves), 129);
    auto s = solve_lambda(net, 129);

    auto at0 = edgeworth_llt(s, 0.0);
    auto n0 = normal_llt(s, 0.0);
    CHECK(at0.correction_term == doctest::Approx(0.0));  // odd bracket vanishes at x = 0
    CHECK(at0.value == doctest::Approx(n0.value).epsilon(1e-12));
    check_budget_sane(at0);

    // The correction is an odd function of x.
    auto up = edgeworth_llt(s, 9.0);
    auto dn = edgeworth_llt(s, -9.0);
    CHECK(up.correction_term == doctest::Approx(-dn.correction_term).epsilon(1e-10));
    CHECK(up.regime == Regime::Edgeworth);
}

TEST_CASE("edgeworth beats normal on the skewed family") {
    std::vector<ServiceCurve> curves;
    for (int k = 0; k < 100; ++k)
        curves.push_back(ServiceCurve::single_server(k % 2 == 0 ? 1.0 : 2.0 / 7.0));
    auto net = ring(std::move(curves), 129);
    auto s = solve_lambda(net, 129);
    auto sn = exact_sn_pmf(s.queues);
    double sigma = s.mom.sigma();
    double sup_norm = sup_scaled_error(sn, 129, sigma,
                                       [&](double x) { return normal_llt(s, x).value; });
    double sup_edge = sup_scaled_error(sn, 129, sigma,
                                       [&](double x) { return edgeworth_llt(s, x).value; });
    CHECK(sup_edge <= sup_norm);
    CHECK(sup_norm <= 10.0 * normal_llt(s, 0.0).budget_total());
    CHECK(sup_edge <= 10.0 * edgeworth_llt(s, 0.0).budget_total());
}

TEST_CASE("gamma llt: pinned exponential case and support edge") {
    // Bottleneck last so the off-bottleneck queues can host marginals too.
    auto net = ring({ServiceCurve::infinite_server(0.0905), ServiceCurve::infinite_server(0.0905),
                     ServiceCurve::single_server(1.0)},
                    40);
    auto s = solve_lambda(net, 40);
    auto part = partition(net, s.lambda);
    REQUIRE(part.bottleneck == std::vector<int>{2});

    auto at0 = gamma_llt(net, s, part, 0.0);
    // xi = 1: density e^{-y}/alpha at y = 1.
    CHECK(at0.value == doctest::Approx(std::exp(-1.0) / s.alpha).epsilon(1e-12));
    check_budget_sane(at0);
    REQUIRE(at0.budget.size() == 5);
    CHECK(at0.budget[0].name == "hat_var_ratio");
    CHECK(at0.budget[1].name == "inv_alpha");
    CHECK(at0.budget[2].name == "lyapunov_2r");
    CHECK(at0.budget[3].name == "lyapunov_xi");
    CHECK(at0.budget[4].name == "char_tail");

    auto atx = gamma_llt(net, s, part, 3.5);
    CHECK(atx.value == doctest::Approx(std::exp(-(1.0 + 3.5 / s.alpha)) / s.alpha).epsilon(1e-12));

    auto left = gamma_llt(net, s, part, -s.alpha - 1.0);  // y < 0
    CHECK(left.value == doctest::Approx(0.0));
    CHECK(has_note(left, "outside gamma support"));
}

TEST_CASE("gamma llt error within budget against the convolution oracle") {
    // One single-server bottleneck among 50 infinite servers, rho0 ~ 0.95.
    std::vector<ServiceCurve> curves = {ServiceCurve::single_server(1.0)};
    for (int k = 0; k < 50; ++k) curves.push_back(ServiceCurve::infinite_server(1.0));
    auto net = ring(std::move(curves), 66);
    auto s = solve_lambda(net, 66);
    CHECK(s.rho0 > 0.94);
    auto part = partition(net, s.lambda);
    REQUIRE(part.bottleneck == std::vector<int>{0});

    auto sn = exact_sn_pmf(s.queues);
    double budget = gamma_llt(net, s, part, 0.0).budget_total();
    double sup = sup_scaled_error(sn, 66, s.alpha,
                                  [&](double x) { return gamma_llt(net, s, part, x).value; });
    CHECK(sup <= budget);
}

TEST_CASE("gamma llt normalizes to 1 for alpha >= 20") {
    std::vector<ServiceCurve> curves = {ServiceCurve::single_server(1.0)};
    for (int k = 0; k < 50; ++k) curves.push_back(ServiceCurve::infinite_server(1.0));
    auto net = ring(std::move(curves), 69);
    auto s = solve_lambda(net, 69);
    CHECK(s.alpha >= 20.0);
    auto part = partition(net, s.lambda);
    double total = 0.0;
    for (long x = -69; x <= static_cast<long>(45.0 * s.alpha); ++x)
        total += gamma_llt(net, s, part, static_cast<double>(x)).value;
    CHECK(total == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("xi estimation by curve kind") {
    auto single = estimate_xi(ServiceCurve::single_server(2.0));
    CHECK(single.kind == XiEstimate::Kind::OrderOne);
    CHECK(single.xi == doctest::Approx(1.0));
    CHECK(single.q_const == 1);

    auto multi = estimate_xi(ServiceCurve::multi_server(1.0, 4));
    CHECK(multi.kind == XiEstimate::Kind::OrderOne);
    CHECK(multi.xi == doctest::Approx(1.0));
    CHECK(multi.q_const == 4);

    auto tab = estimate_xi(ServiceCurve::tabulated({1.0, 2.0, 2.0, 2.0}));
    CHECK(tab.kind == XiEstimate::Kind::OrderOne);
    CHECK(tab.q_const == 2);

    auto flat = estimate_xi(ServiceCurve::tabulated({3.0, 3.0}));
    CHECK(flat.q_const == 1);

    // mu(q) = mu e^{-1/q} is the xi = 2 curve.
    auto alg2 = estimate_xi(ServiceCurve::algebraic(1.0, 2.0));
    CHECK(alg2.kind == XiEstimate::Kind::Algebraic);
    CHECK(alg2.xi == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(alg2.residual <= 0.1);

    auto alg35 = estimate_xi(ServiceCurve::algebraic(2.0, 3.5));
    CHECK(alg35.xi == doctest::Approx(3.5).epsilon(1e-3));

    CHECK_THROWS_AS(estimate_xi(ServiceCurve::infinite_server(1.0)), model_error);
}

TEST_CASE("xi_total sums bottleneck orders") {
    auto net = ring({ServiceCurve::algebraic(1.0, 2.5), ServiceCurve::algebraic(1.0, 2.5)}, 4);
    auto part = partition(net);
    REQUIRE(part.bottleneck == std::vector<int>{0, 1});
    CHECK(xi_total(net, part.bottleneck) == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("normal-regime joint approximation within 5x budget on full enumeration") {
    // n = 3, m = 4 with rho0 = 0.3: single(1) bottleneck plus two infinite
    // servers tuned so that m(0.9) = 4.
    auto net = ring({ServiceCurve::single_server(1.0), ServiceCurve::infinite_server(0.168),
                     ServiceCurve::infinite_server(0.168)},
                    4);
    auto s = solve_lambda(net, 4);
    CHECK(s.rho0 == doctest::Approx(0.3).epsilon(0.01));
    double tol = 5.0 * approx_joint(s, {4, 0, 0}).budget_total();
    for (long q0 = 0; q0 <= 4; ++q0)
        for (long q1 = 0; q1 + q0 <= 4; ++q1) {
            long q2 = 4 - q0 - q1;
            double exact = std::exp(exact_log_joint(net, {q0, q1, q2}));
            auto approx = approx_joint(s, {q0, q1, q2});
            check_budget_sane(approx);
            CHECK(std::abs(approx.value - exact) / exact <= tol);
        }
    CHECK_THROWS_AS(approx_joint(s, {1, 1}), model_error);
}

TEST_CASE("normal-regime marginal and mean against the oracle") {
    auto net = balanced_cycle(100, 100);
    auto s = solve_lambda(net, 100);
    auto sol = solve_exact(net);

    long q0 = std::lround(s.queues[0].mom.mean);
    auto marg = approx_marginal(s, {q0});
    check_budget_sane(marg);
    double exact = sol.marginal[0][q0];
    CHECK(std::abs(marg.value - exact) / exact <= 10.0 * marg.budget_total());

    auto mean0 = approx_mean(s, 0);
    check_budget_sane(mean0);
    CHECK(std::abs(mean0.value - sol.mean[0]) / sol.mean[0] <= 10.0 * mean0.budget_total());

    CHECK_THROWS_AS(approx_marginal(s, {}), model_error);
    CHECK_THROWS_AS(approx_mean(s, 100), model_error);
}

TEST_CASE("infinite-server mean matches the Poisson value in a balanced ring") {
    std::vector<ServiceCurve> curves(99, ServiceCurve::single_server(1.0));
    curves.push_back(ServiceCurve::infinite_server(1.0));
    auto net = ring(std::move(curves), 100);
    auto s = solve_lambda(net, 100);
    auto mean_inf = approx_mean(s, 99);
    CHECK(mean_inf.value == doctest::Approx(s.lambda / 100.0).epsilon(1e-10));
    auto sol = solve_exact(net);
    CHECK(std::abs(mean_inf.value - sol.mean[99]) / sol.mean[99] <=
          10.0 * mean_inf.budget_total());
}

TEST_CASE("gamma-regime approximations against the oracle") {
    auto net = ring({ServiceCurve::infinite_server(0.0905), ServiceCurve::infinite_server(0.0905),
                     ServiceCurve::single_server(1.0)},
                    40);
    auto s = solve_lambda(net, 40);
    CHECK(s.rho0 > 0.94);
    auto part = partition(net, s.lambda);
    REQUIRE(part.bottleneck == std::vector<int>{2});
    auto sol = solve_exact(net);

    // Non-bottleneck marginal at its mode.
    long q0 = std::lround(s.queues[0].mom.mean);
    auto marg = approx_marginal_gamma(net, s, part, {q0});
    double exact = sol.marginal[0][q0];
    CHECK(std::abs(marg.value - exact) / exact <= 10.0 * marg.budget_total());

    // Covering the bottleneck queue is unsupported.
    CHECK_THROWS_WITH_AS(approx_marginal_gamma(net, s, part, {q0, q0, 20}),
                         "unsupported case: saturated marginal must avoid the bottleneck set",
                         model_error);

    // Bottleneck mean ~ xi alpha; off-bottleneck mean gets the mean_shift term.
    auto mb = approx_mean_gamma(net, s, part, 2);
    CHECK(std::abs(mb.value - sol.mean[2]) / sol.mean[2] <= 10.0 * mb.budget_total());
    auto m0 = approx_mean_gamma(net, s, part, 0);
    CHECK(m0.budget.back().name == "mean_shift");
    CHECK(std::abs(m0.value - sol.mean[0]) / sol.mean[0] <= 10.0 * m0.budget_total());

    // Joint with the xi = 1 prefactor alpha * e.
    std::vector<long> state = {10, 10, 20};
    auto joint = approx_joint_gamma(net, s, part, state);
    double prod = 1.0;
    for (int k = 0; k < 3; ++k) prod *= s.queues[k].pmf[state[k]];
    CHECK(joint.value == doctest::Approx(s.alpha * std::exp(1.0) * prod).epsilon(1e-10));
    double exact_joint = std::exp(exact_log_joint(net, state));
    CHECK(std::abs(joint.value - exact_joint) / exact_joint <= 10.0 * joint.budget_total());
}
