#pragma once

#include "pfnet/surrogate.hpp"

namespace pfnet {

// log x_k(q) for q = 0..maxq where x_k(q) = a^q / (mu(1)...mu(q)) and
// log_a = log(a); x_k(0) = 1.  With a = pi_k these are the Z-weights, with
// a = lambda*pi_k the unnormalized surrogate pmf.
std::vector<double> log_weights(const ServiceCurve& curve, double log_a, long maxq);

// c[j] = logsumexp_q (a[q] + b[j-q]), j = 0..maxq.
std::vector<double> log_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b, long maxq);

// log Z_{j,n} for j = 0..m by sequential convolution of the queue weights.
std::vector<double> normalizing_constants(const ClosedNetwork& net, long m);

struct ExactSolution {
    std::vector<double> log_z;                  // j = 0..m
    std::vector<std::vector<double>> marginal;  // [k][q] = P(Q_k = q), q = 0..m
    std::vector<double> mean;                   // E Q_k; sums to m within 1e-8
};

// Convolution oracle for the closed network at population net.population.
// Marginals by leave-one-out convolution (prefix/suffix products, no
// deconvolution).  Refused when n * m exceeds the 1e6 state-space budget.
ExactSolution solve_exact(const ClosedNetwork& net);

// log P(Q = state); requires sum(state) == net.population.
double exact_log_joint(const ClosedNetwork& net, const std::vector<long>& state);

// Distribution of S_n = sum of the independent surrogate queue lengths
// (plain convolution in probability space).  truncated_mass = 1 - sum(p);
// warning set when it exceeds 1e-10.
struct SnPmf {
    std::vector<double> p;
    double truncated_mass = 0.0;
    bool warning = false;
};
SnPmf exact_sn_pmf(const std::vector<OpenQueue>& queues);

}  // namespace pfnet
