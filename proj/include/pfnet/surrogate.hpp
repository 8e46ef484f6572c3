#pragma once

#include <complex>
#include <vector>

#include "pfnet/model.hpp"

namespace pfnet {

struct QueueMoments {
    double mean = 0.0;
    double variance = 0.0;
    double beta3 = 0.0;         // E|X - m|^3
    double beta4 = 0.0;         // E|X - m|^4
    double beta3_signed = 0.0;  // E(X - m)^3
    double gamma_sq = 0.0;      // lattice constant, see asymptotics.hpp
};

// One station of the open surrogate: arrivals Poisson(arrival), service curve
// as in the closed model, queue length X with P(X = x) proportional to
// arrival^x / (mu(1)...mu(x)).
struct OpenQueue {
    int index = 0;
    double arrival = 0.0;       // lambda * pi_k
    std::vector<double> pmf;    // adaptively truncated, normalized
    double log_norm = 0.0;      // log f_k(arrival), f_k = generating function
    QueueMoments mom;

    // f_k(z) for |z| <= arrival, evaluated stably through the pmf.
    std::complex<double> gen_fn(std::complex<double> z) const;
};

// Aggregates over a family of independent queues (suffix _total = sums, the
// sigma-like entries are sums of the per-queue quantities, not roots).
struct MomentSet {
    std::vector<QueueMoments> per_queue;
    double mean_total = 0.0;
    double var_total = 0.0;
    double beta3_total = 0.0;
    double beta4_total = 0.0;
    double beta3_signed_total = 0.0;
    double gamma_sq_total = 0.0;
    double sigma() const;  // sqrt(var_total)
};

// pmf of one open queue with arrival intensity a; truncation extends until
// the geometric tail bound is below 1e-12 of the mass and the order-4 moment
// tail is below 1e-10 relative.
OpenQueue queue_pmf(const ServiceCurve& curve, int index, double a);

QueueMoments moments(const std::vector<double>& pmf);
MomentSet aggregate_moments(const std::vector<OpenQueue>& queues);

// E|X - mean|^r for arbitrary real order r > 0 by direct summation.
double abs_central_moment(const std::vector<double>& pmf, double order);

// Mean / variance of one open queue at arrival a without building the pmf
// (closed forms; numeric fallback for the algebraic kind).
struct MeanVar { double mean = 0.0; double var = 0.0; };
MeanVar open_queue_mean_var(const ServiceCurve& curve, double a);

struct SolvedSurrogate {
    double lambda = 0.0;            // lambda_n: sum of means equals m
    long m = 0;
    double lambda0 = 0.0;
    double rho0 = 0.0;              // lambda / lambda0
    double alpha = 0.0;             // rho0 / (1 - rho0)
    std::vector<double> pi;
    std::vector<OpenQueue> queues;  // built at lambda
    MomentSet mom;
};

// Monotone (bracketed Newton) solve of sum_k E X_k(lambda) = m on
// (0, lambda0); residual tolerance 1e-9 * max(1, m).  Throws model_error
// "population exceeds representable load" when m is not attainable within
// the floating bracket.  initial_guess is only a starting point; the result
// is independent of it to ~1e-10 relative.
SolvedSurrogate solve_lambda(const ClosedNetwork& net, long m,
                             std::optional<double> initial_guess = std::nullopt);

// Characteristic function of the centered queue length, E exp(i*theta*(X-m)).
std::complex<double> char_fn(const OpenQueue& q, double theta);
// Product over all queues resp. over the complement of the index set f0.
std::complex<double> char_fn_total(const SolvedSurrogate& s, double theta);
std::complex<double> char_fn_hat(const SolvedSurrogate& s,
                                 const std::vector<int>& f0, double theta);

// Size-biased pmf P(Xt = x) = x P(X = x) / E X; requires E X > 0.
std::vector<double> size_biased(const OpenQueue& q);

}  // namespace pfnet
