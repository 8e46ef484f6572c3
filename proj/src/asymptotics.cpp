#include "pfnet/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

namespace pfnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kXiFitResidualCap = 0.1;
constexpr long kXiProbeLimit = 4096;

[[noreturn]] void fail(const std::string& msg) { throw model_error(msg); }

double gauss_density(double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
}

// Sum of E|X_k - m_k|^order, precomputed aggregates when order is integral.
double abs_moment_sum(const SolvedSurrogate& s, double order) {
    if (order == 3.0) return s.mom.beta3_total;
    if (order == 4.0) return s.mom.beta4_total;
    double acc = 0.0;
    for (const auto& q : s.queues) acc += abs_central_moment(q.pmf, order);
    return acc;
}

struct HatMoments {
    double var = 0.0, beta = 0.0, gamma_sq = 0.0;  // beta at order 2+r
};

HatMoments hat_moments(const SolvedSurrogate& s, const std::vector<int>& f0, double r) {
    std::vector<char> skip(s.queues.size(), 0);
    for (int k : f0) skip.at(k) = 1;
    HatMoments h;
    for (size_t k = 0; k < s.queues.size(); ++k) {
        if (skip[k]) continue;
        h.var += s.queues[k].mom.variance;
        h.gamma_sq += s.queues[k].mom.gamma_sq;
        h.beta += (r == 1.0) ? s.queues[k].mom.beta3
                             : abs_central_moment(s.queues[k].pmf, 2.0 + r);
    }
    return h;
}

void require_llt_order(double r) {
    if (!(r > 0.0) || r > 1.0) fail("fractional order r must lie in (0, 1]");
}

void require_stab_order(double r) {
    if (!(r > 0.0) || r > 2.0) fail("fractional order r must lie in (0, 2]");
}

double queue_prob(const OpenQueue& q, long x) {
    if (x < 0) return 0.0;
    return x < static_cast<long>(q.pmf.size()) ? q.pmf[x] : 0.0;
}

// Common skeleton of the two normal-regime local limits.
void add_char_tail(ApproxResult& res, double sigma, double gamma2, double delta) {
    if (gamma2 <= 0.0 || delta <= 0.0) {
        res.budget.push_back({"char_tail", kInf});
        res.notes.push_back("lattice bound vacuous (gamma^2 = 0)");
        return;
    }
    res.budget.push_back(
        {"char_tail", sigma / (gamma2 * delta) * std::exp(-gamma2 * delta * delta / 5.0)});
    if (std::sqrt(gamma2) * delta < 1.0)
        res.notes.push_back("Berry-Esseen regime not reached (gamma*delta < 1)");
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Normal: return "normal";
        case Regime::Edgeworth: return "edgeworth";
        case Regime::Gamma: return "gamma";
    }
    return "?";
}

double ApproxResult::budget_total() const {
    double acc = 0.0;
    for (const auto& item : budget) acc += item.value;
    return acc;
}

ApproxResult normal_llt(const SolvedSurrogate& s, double x, double r) {
    require_llt_order(r);
    const double sigma2 = s.mom.var_total;
    if (!(sigma2 > 0.0)) fail("normal limit needs a positive total variance");
    const double sigma = std::sqrt(sigma2);
    ApproxResult res;
    res.regime = Regime::Normal;
    res.leading_term = gauss_density(x / sigma) / sigma;
    res.value = res.leading_term;
    const double beta = abs_moment_sum(s, 2.0 + r);
    res.budget.push_back({"lyapunov", beta / std::pow(sigma, 2.0 + r)});
    const double delta = std::pow(sigma2 / (2.0 * beta), 1.0 / r);
    add_char_tail(res, sigma, s.mom.gamma_sq_total, delta);
    return res;
}

ApproxResult edgeworth_llt(const SolvedSurrogate& s, double x, double r) {
    require_llt_order(r);
    const double sigma2 = s.mom.var_total;
    if (!(sigma2 > 0.0)) fail("normal limit needs a positive total variance");
    const double sigma = std::sqrt(sigma2);
    const double t = x / sigma;
    ApproxResult res;
    res.regime = Regime::Edgeworth;
    res.leading_term = gauss_density(t) / sigma;
    const double skew = s.mom.beta3_signed_total / (6.0 * sigma2 * sigma);
    res.correction_term = res.leading_term * skew * (t * t * t - 3.0 * t);
    res.value = res.leading_term + res.correction_term;
    const double beta3r = abs_moment_sum(s, 3.0 + r);
    res.budget.push_back({"lyapunov", beta3r / std::pow(sigma, 3.0 + r)});
    const double delta = sigma2 / (2.0 * s.mom.beta3_total);
    add_char_tail(res, sigma, s.mom.gamma_sq_total, delta);
    return res;
}

ApproxResult gamma_llt(const ClosedNetwork& net, const SolvedSurrogate& s,
                       const QueuePartition& part, double x, double r) {
    require_llt_order(r);
    if (part.bottleneck.empty()) fail("gamma limit needs a nonempty bottleneck set");
    if (!(s.alpha > 0.0)) fail("gamma limit needs rho0 > 0");
    const double xi = xi_total(net, part.bottleneck);
    const double alpha = s.alpha;
    const HatMoments h = hat_moments(s, part.bottleneck, r);
    const double sigma_hat = std::sqrt(h.var);

    ApproxResult res;
    res.regime = Regime::Gamma;
    const double y = xi + x / alpha;
    if (y <= 0.0) {
        res.notes.push_back("outside gamma support (y <= 0)");
        res.value = res.leading_term = 0.0;
    } else {
        res.leading_term =
            std::exp((xi - 1.0) * std::log(y) - y - std::lgamma(xi)) / alpha;
        res.value = res.leading_term;
    }

    res.budget.push_back({"hat_var_ratio", h.var / (alpha * alpha)});
    res.budget.push_back({"inv_alpha", 1.0 / alpha});
    if (h.var > 0.0) {
        const double lyap = h.beta / std::pow(sigma_hat, 2.0 + r);
        res.budget.push_back({"lyapunov_2r", lyap * std::pow(sigma_hat / alpha, 2.0 + r)});
        res.budget.push_back({"lyapunov_xi", lyap * std::pow(sigma_hat / alpha, xi - 1.0)});
        const double delta = std::pow(h.var / (2.0 * h.beta), 1.0 / r);
        if (h.gamma_sq > 0.0 && delta > 0.0) {
            res.budget.push_back(
                {"char_tail", std::exp(-h.gamma_sq * delta * delta / 5.0) /
                                  (h.gamma_sq * std::pow(delta, xi + 1.0) *
                                   std::pow(alpha, xi - 1.0))});
        } else {
            res.budget.push_back({"char_tail", kInf});
            res.notes.push_back("lattice bound vacuous (hat gamma^2 = 0)");
        }
    } else {
        res.budget.push_back({"lyapunov_2r", 0.0});
        res.budget.push_back({"lyapunov_xi", 0.0});
        res.budget.push_back({"char_tail", kInf});
        res.notes.push_back("no off-bottleneck queues; gamma budget degenerate");
    }
    return res;
}

double gamma_sq(const std::vector<double>& pmf) {
    double acc = 0.0;
    for (size_t k = 0; 2 * k + 1 < pmf.size(); ++k) {
        const double p0 = pmf[2 * k], p1 = pmf[2 * k + 1];
        if (p0 > 0.0 && p1 > 0.0) acc += p0 * p1 / (p0 + p1);
    }
    return acc;
}

CharBoundReport char_bound_check(const std::vector<double>& pmf, int grid) {
    if (grid < 3) fail("char bound grid too small");
    const double g2 = gamma_sq(pmf);
    CharBoundReport rep;
    rep.worst_margin = -kInf;
    for (int i = 0; i < grid; ++i) {
        const double theta = -std::numbers::pi +
                             2.0 * std::numbers::pi * static_cast<double>(i) / (grid - 1);
        std::complex<double> phi{0.0, 0.0};
        for (size_t x = 0; x < pmf.size(); ++x)
            phi += pmf[x] * std::polar(1.0, static_cast<double>(x) * theta);
        const double margin = std::abs(phi) - std::exp(-g2 * theta * theta / 5.0);
        if (margin > rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_theta = theta;
        }
    }
    rep.ok = rep.worst_margin <= 1e-12;
    return rep;
}

double xi_total(const ClosedNetwork& net, const std::vector<int>& bottleneck) {
    double acc = 0.0;
    for (int k : bottleneck) acc += estimate_xi(net.curves.at(k)).xi;
    return acc;
}

XiEstimate estimate_xi(const ServiceCurve& curve) {
    XiEstimate est;
    switch (curve.kind()) {
        case CurveKind::InfiniteServer:
            fail("xi is undefined for an infinite-server queue");
        case CurveKind::SingleServer:
            est.q_const = 1;
            return est;
        case CurveKind::MultiServer:
            est.q_const = curve.servers();
            return est;
        case CurveKind::Tabulated: {
            const auto& t = curve.table();
            long qc = 1;
            for (size_t i = 0; i + 1 < t.size(); ++i)
                if (t[i] != t.back()) qc = static_cast<long>(i) + 2;
            est.q_const = qc;
            return est;
        }
        case CurveKind::Algebraic:
            break;
    }
    // Fit q * log(mu_eff / mu(q)) ~ xi - 1 on a geometric q-grid; a constant
    // fit is exact when the curve is honestly algebraic of some order.
    const double mu_eff = curve.effective_rate();
    double sum = 0.0;
    std::vector<double> ys;
    for (long q = 64; q <= kXiProbeLimit; q = q * 5 / 4 + 1) {
        const double y = static_cast<double>(q) * std::log(mu_eff / curve.rate(q));
        ys.push_back(y);
        sum += y;
    }
    const double fit = sum / static_cast<double>(ys.size());
    double resid = 0.0;
    for (double y : ys) resid = std::max(resid, std::abs(y - fit));
    if (resid > kXiFitResidualCap) {
        std::ostringstream os;
        os << "unclassified singularity: algebraic fit residual " << resid << " exceeds 0.1";
        fail(os.str());
    }
    est.kind = XiEstimate::Kind::Algebraic;
    est.xi = 1.0 + fit;
    est.residual = resid;
    est.q_const = 0;
    return est;
}

ApproxResult approx_joint(const SolvedSurrogate& s, const std::vector<long>& state, double r) {
    require_stab_order(r);
    if (state.size() != s.queues.size()) fail("state size mismatch");
    const double sigma = s.mom.sigma();
    if (!(sigma > 0.0)) fail("normal approximation needs a positive total variance");
    ApproxResult res;
    res.regime = Regime::Normal;
    double prod = std::sqrt(2.0 * std::numbers::pi) * sigma;
    for (size_t k = 0; k < state.size(); ++k) prod *= queue_prob(s.queues[k], state[k]);
    res.value = res.leading_term = prod;
    res.budget.push_back(
        {"lyapunov", abs_moment_sum(s, 2.0 + r) / std::pow(sigma, 2.0 + r)});
    return res;
}

ApproxResult approx_marginal(const SolvedSurrogate& s, const std::vector<long>& values,
                             double r) {
    require_stab_order(r);
    if (values.empty() || values.size() > s.queues.size()) fail("marginal size out of range");
    const double sigma2 = s.mom.var_total;
    const double sigma = std::sqrt(sigma2);
    if (!(sigma > 0.0)) fail("normal approximation needs a positive total variance");
    ApproxResult res;
    res.regime = Regime::Normal;
    double prod = 1.0, var_head = 0.0, shift = 0.0;
    for (size_t k = 0; k < values.size(); ++k) {
        prod *= queue_prob(s.queues[k], values[k]);
        var_head += s.queues[k].mom.variance;
        shift += s.queues[k].mom.mean - static_cast<double>(values[k]);
    }
    res.value = res.leading_term = prod;
    res.budget.push_back(
        {"lyapunov", abs_moment_sum(s, 2.0 + r) / std::pow(sigma, 2.0 + r)});
    res.budget.push_back({"mass_shift", (var_head + shift * shift) / sigma2});
    if (r > 1.0)
        res.budget.push_back({"skew_shift", std::abs(shift) *
                                                std::abs(s.mom.beta3_signed_total) /
                                                (sigma2 * sigma2)});
    return res;
}

ApproxResult approx_mean(const SolvedSurrogate& s, int j, double r) {
    require_stab_order(r);
    if (j < 0 || j >= static_cast<int>(s.queues.size())) fail("queue index out of range");
    const double sigma2 = s.mom.var_total;
    const double sigma = std::sqrt(sigma2);
    if (!(sigma > 0.0)) fail("normal approximation needs a positive total variance");
    const QueueMoments& qm = s.queues[j].mom;
    if (!(qm.mean > 0.0)) fail("mean approximation needs a positive surrogate mean");
    ApproxResult res;
    res.regime = Regime::Normal;
    res.value = res.leading_term = qm.mean;
    res.budget.push_back(
        {"lyapunov", abs_moment_sum(s, 2.0 + r) / std::pow(sigma, 2.0 + r)});
    res.budget.push_back({"var_ratio", qm.variance / sigma2});
    const double beta_j = (r == 1.0) ? qm.beta3 : abs_central_moment(s.queues[j].pmf, 2.0 + r);
    res.budget.push_back({"local", beta_j / (qm.mean * std::pow(sigma, 1.0 + r))});
    if (r > 1.0) {
        const double sj = std::sqrt(qm.variance);
        res.budget.push_back({"skew_shift", std::abs(s.mom.beta3_signed_total) /
                                                (sigma2 * sigma2) * sj *
                                                (1.0 + sj / qm.mean)});
    }
    return res;
}

namespace {

// Budget of the gamma local limit reused by the saturated approximations.
std::vector<BudgetItem> gamma_budget(const ClosedNetwork& net, const SolvedSurrogate& s,
                                     const QueuePartition& part, double r,
                                     std::vector<std::string>& notes, double* xi_out) {
    ApproxResult llt = gamma_llt(net, s, part, 0.0, std::min(r, 1.0));
    for (auto& n : llt.notes)
        if (n != "outside gamma support (y <= 0)") notes.push_back(n);
    *xi_out = xi_total(net, part.bottleneck);
    return llt.budget;
}

}  // namespace

ApproxResult approx_joint_gamma(const ClosedNetwork& net, const SolvedSurrogate& s,
                                const QueuePartition& part,
                                const std::vector<long>& state, double r) {
    require_stab_order(r);
    if (state.size() != s.queues.size()) fail("state size mismatch");
    ApproxResult res;
    res.regime = Regime::Gamma;
    double xi = 0.0;
    res.budget = gamma_budget(net, s, part, r, res.notes, &xi);
    // alpha * Gamma(xi) / (e^-xi xi^(xi-1))
    const double prefactor =
        s.alpha * std::exp(std::lgamma(xi) + xi - (xi - 1.0) * std::log(xi));
    double prod = prefactor;
    for (size_t k = 0; k < state.size(); ++k) prod *= queue_prob(s.queues[k], state[k]);
    res.value = res.leading_term = prod;
    return res;
}

ApproxResult approx_marginal_gamma(const ClosedNetwork& net, const SolvedSurrogate& s,
                                   const QueuePartition& part,
                                   const std::vector<long>& values, double r) {
    require_stab_order(r);
    if (values.empty() || values.size() > s.queues.size()) fail("marginal size out of range");
    for (int k : part.bottleneck)
        if (k < static_cast<int>(values.size()))
            fail("unsupported case: saturated marginal must avoid the bottleneck set");
    ApproxResult res;
    res.regime = Regime::Gamma;
    double xi = 0.0;
    res.budget = gamma_budget(net, s, part, r, res.notes, &xi);
    double prod = 1.0, shift = 0.0;
    for (size_t k = 0; k < values.size(); ++k) {
        prod *= queue_prob(s.queues[k], values[k]);
        shift += s.queues[k].mom.mean - static_cast<double>(values[k]);
    }
    res.value = res.leading_term = prod;
    res.budget.push_back({"mass_shift", std::abs(shift) / s.alpha});
    return res;
}

ApproxResult approx_mean_gamma(const ClosedNetwork& net, const SolvedSurrogate& s,
                               const QueuePartition& part, int j, double r) {
    require_stab_order(r);
    if (j < 0 || j >= static_cast<int>(s.queues.size())) fail("queue index out of range");
    ApproxResult res;
    res.regime = Regime::Gamma;
    double xi = 0.0;
    res.budget = gamma_budget(net, s, part, r, res.notes, &xi);
    const QueueMoments& qm = s.queues[j].mom;
    res.value = res.leading_term = qm.mean;
    const bool in_f0 =
        std::find(part.bottleneck.begin(), part.bottleneck.end(), j) != part.bottleneck.end();
    if (!in_f0) {
        if (!(qm.mean > 0.0)) fail("mean approximation needs a positive surrogate mean");
        res.budget.push_back(
            {"mean_shift", (qm.variance + qm.mean * qm.mean) / (qm.mean * s.alpha)});
    }
    return res;
}

}  // namespace pfnet
