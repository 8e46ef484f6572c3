#include "pfnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pfnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long kStateBudget = 1'000'000;  // n * m cap for the oracle

[[noreturn]] void fail(const std::string& msg) { throw model_error(msg); }

void check_budget(long n, long m) {
    if (n * std::max<long>(m, 1) > kStateBudget)
        fail("oracle refused: state-space budget n*m > 1e6 (use the asymptotic route)");
}

}  // namespace

std::vector<double> log_weights(const ServiceCurve& curve, double log_a, long maxq) {
    std::vector<double> lw(maxq + 1);
    lw[0] = 0.0;
    for (long q = 1; q <= maxq; ++q) lw[q] = lw[q - 1] + log_a - std::log(curve.rate(q));
    return lw;
}

std::vector<double> log_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b, long maxq) {
    const long na = static_cast<long>(a.size()), nb = static_cast<long>(b.size());
    std::vector<double> c(maxq + 1, kNegInf);
    for (long j = 0; j <= maxq; ++j) {
        const long qlo = std::max<long>(0, j - (nb - 1));
        const long qhi = std::min<long>(j, na - 1);
        if (qlo > qhi) continue;
        double hi = kNegInf;
        for (long q = qlo; q <= qhi; ++q) hi = std::max(hi, a[q] + b[j - q]);
        if (hi == kNegInf) continue;
        long double acc = 0.0L;
        for (long q = qlo; q <= qhi; ++q)
            acc += std::exp(static_cast<long double>(a[q] + b[j - q] - hi));
        c[j] = hi + static_cast<double>(std::log(acc));
    }
    return c;
}

std::vector<double> normalizing_constants(const ClosedNetwork& net, long m) {
    net.validate();
    if (m < 0) fail("population must be nonnegative");
    check_budget(net.size(), m);
    const std::vector<double> pi = invariant_measure(net.routing);
    std::vector<double> z{0.0};  // empty product: Z_{j,0} = [j == 0]
    z.resize(m + 1, kNegInf);
    z[0] = 0.0;
    for (int k = 0; k < net.size(); ++k)
        z = log_convolve(z, log_weights(net.curves[k], std::log(pi[k]), m), m);
    return z;
}

ExactSolution solve_exact(const ClosedNetwork& net) {
    net.validate();
    const long m = net.population;
    const int n = net.size();
    check_budget(n, m);
    const std::vector<double> pi = invariant_measure(net.routing);

    std::vector<std::vector<double>> w(n);
    for (int k = 0; k < n; ++k) w[k] = log_weights(net.curves[k], std::log(pi[k]), m);

    // Leave-one-out convolutions assembled from prefix/suffix products; never
    // divides convolutions out (deconvolution is numerically treacherous).
    std::vector<double> delta(m + 1, kNegInf);
    delta[0] = 0.0;
    std::vector<std::vector<double>> prefix(n + 1), suffix(n + 1);
    prefix[0] = delta;
    for (int k = 0; k < n; ++k) prefix[k + 1] = log_convolve(prefix[k], w[k], m);
    suffix[n] = delta;
    for (int k = n - 1; k >= 0; --k) suffix[k] = log_convolve(w[k], suffix[k + 1], m);

    ExactSolution sol;
    sol.log_z = prefix[n];
    const double log_zm = sol.log_z[m];
    if (!std::isfinite(log_zm)) fail("normalizing constant vanished; model is degenerate");
    sol.marginal.assign(n, std::vector<double>(m + 1, 0.0));
    sol.mean.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        const std::vector<double> rest = log_convolve(prefix[k], suffix[k + 1], m);
        long double mean = 0.0L;
        for (long q = 0; q <= m; ++q) {
            const double lp = w[k][q] + rest[m - q] - log_zm;
            const double p = std::isfinite(lp) ? std::exp(lp) : 0.0;
            sol.marginal[k][q] = p;
            mean += static_cast<long double>(q) * p;
        }
        sol.mean[k] = static_cast<double>(mean);
    }
    return sol;
}

double exact_log_joint(const ClosedNetwork& net, const std::vector<long>& state) {
    net.validate();
    if (static_cast<int>(state.size()) != net.size()) fail("state size mismatch");
    long total = 0;
    for (long q : state) {
        if (q < 0) fail("state entries must be nonnegative");
        total += q;
    }
    if (total != net.population) fail("state does not carry the full population");
    const std::vector<double> pi = invariant_measure(net.routing);
    const std::vector<double> log_z = normalizing_constants(net, net.population);
    double acc = -log_z[net.population];
    for (int k = 0; k < net.size(); ++k) {
        const auto lw = log_weights(net.curves[k], std::log(pi[k]), state[k]);
        acc += lw[state[k]];
    }
    return acc;
}

SnPmf exact_sn_pmf(const std::vector<OpenQueue>& queues) {
    SnPmf out;
    out.p = {1.0};
    for (const auto& q : queues) {
        std::vector<double> next(out.p.size() + q.pmf.size() - 1, 0.0);
        for (size_t i = 0; i < out.p.size(); ++i) {
            const double pi_ = out.p[i];
            if (pi_ == 0.0) continue;
            for (size_t j = 0; j < q.pmf.size(); ++j) next[i + j] += pi_ * q.pmf[j];
        }
        out.p.swap(next);
    }
    long double mass = 0.0L;
    for (double v : out.p) mass += v;
    out.truncated_mass = std::max(0.0, 1.0 - static_cast<double>(mass));
    out.warning = out.truncated_mass > 1e-10;
    return out;
}

}  // namespace pfnet
