#pragma once

#include "pfnet/surrogate.hpp"

namespace pfnet {

enum class Regime { Normal, Edgeworth, Gamma };

std::string to_string(Regime r);

struct BudgetItem {
    std::string name;
    double value = 0.0;
};

// value = leading_term + correction_term approximates P(S_n - m_n = x) (or a
// joint/marginal/mean, depending on the operation).  budget lists the named
// error contributions of the matching expansion theorem, with all absolute
// constants pinned to 1; budgets are comparative instruments, not certified
// bounds.  For the *_llt operations the budget bounds the error of the
// standardized quantity (sigma_n resp. alpha_n times the pmf).
struct ApproxResult {
    double value = 0.0;
    double leading_term = 0.0;
    double correction_term = 0.0;
    Regime regime = Regime::Normal;
    std::vector<BudgetItem> budget;
    std::vector<std::string> notes;
    double budget_total() const;
};

// Normal local limit: value = exp(-x^2 / (2 sigma^2)) / (sqrt(2 pi) sigma).
// r in (0, 1] selects the fractional moment order 2+r of the budget.
ApproxResult normal_llt(const SolvedSurrogate& s, double x, double r = 1.0);

// One-term Edgeworth refinement (third-cumulant bracket).
ApproxResult edgeworth_llt(const SolvedSurrogate& s, double x, double r = 1.0);

// Near-saturation gamma local limit at y = xi_n + x / alpha_n:
// value = y^(xi_n - 1) e^{-y} / (Gamma(xi_n) alpha_n); zero (with a note) when
// y <= 0.  Hat moments aggregate the non-bottleneck queues; xi_n comes from
// estimate_xi over part.bottleneck, hence the network parameter.
ApproxResult gamma_llt(const ClosedNetwork& net, const SolvedSurrogate& s,
                       const QueuePartition& part, double x, double r = 1.0);

// Lattice-span constant gamma^2 = sum_k p_{2k} p_{2k+1} / (p_{2k} + p_{2k+1});
// 0 when the support has span > 1, and <= min(variance, 1/4) always.
double gamma_sq(const std::vector<double>& pmf);

// Verifies |E e^{i theta X}| <= exp(-gamma^2 theta^2 / 5) on a uniform grid
// over [-pi, pi] (float-noise tolerance 1e-12).
struct CharBoundReport {
    bool ok = true;
    double worst_margin = 0.0;  // max over grid of |phi| - bound
    double worst_theta = 0.0;
};
CharBoundReport char_bound_check(const std::vector<double>& pmf, int grid = 1001);

// Saturated-regime shape: sum of estimate_xi over the bottleneck set.
double xi_total(const ClosedNetwork& net, const std::vector<int>& bottleneck);

// Product-form approximations in the normal regime (independent surrogate
// queues; state/values are queue occupancies).
ApproxResult approx_joint(const SolvedSurrogate& s, const std::vector<long>& state,
                          double r = 1.0);
// First values.size() queues.
ApproxResult approx_marginal(const SolvedSurrogate& s, const std::vector<long>& values,
                             double r = 1.0);
ApproxResult approx_mean(const SolvedSurrogate& s, int j, double r = 1.0);

// Saturated (gamma) counterparts.  approx_marginal_gamma requires the
// marginal queues to avoid the bottleneck set.
ApproxResult approx_joint_gamma(const ClosedNetwork& net, const SolvedSurrogate& s,
                                const QueuePartition& part,
                                const std::vector<long>& state, double r = 1.0);
ApproxResult approx_marginal_gamma(const ClosedNetwork& net, const SolvedSurrogate& s,
                                   const QueuePartition& part,
                                   const std::vector<long>& values, double r = 1.0);
ApproxResult approx_mean_gamma(const ClosedNetwork& net, const SolvedSurrogate& s,
                               const QueuePartition& part, int j, double r = 1.0);

// Classification of the service curve's generating-function singularity.
struct XiEstimate {
    enum class Kind { OrderOne, Algebraic };
    Kind kind = Kind::OrderOne;
    double xi = 1.0;
    double residual = 0.0;  // max deviation of q*log(mu_eff/mu(q)) from xi-1
    long q_const = 1;       // rate constant from here on (OrderOne only)
};
// Throws model_error for infinite-server curves and when the algebraic fit
// residual exceeds 0.1 ("unclassified singularity").
XiEstimate estimate_xi(const ServiceCurve& curve);

}  // namespace pfnet
