#include "pfnet/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pfnet/asymptotics.hpp"  // gamma_sq

namespace pfnet {

namespace {

constexpr double kTailMassRel = 1e-12;   // pmf mass beyond truncation
constexpr double kTailMomentRel = 1e-10; // order-4 moment beyond truncation
constexpr long kSupportCap = 5'000'000;
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& msg) { throw model_error(msg); }

// Geometric series sums: A[i] = sum_{j>=1} j^i r^j, i = 0..4.
struct GeomSums {
    double a0, a1, a2, a3, a4;
};
GeomSums geom_sums(double r) {
    const double d = 1.0 - r;
    return {r / d, r / (d * d), r * (1.0 + r) / (d * d * d),
            r * (1.0 + 4.0 * r + r * r) / (d * d * d * d),
            r * (1.0 + 11.0 * r + 11.0 * r * r + r * r * r) / (d * d * d * d * d)};
}

// Index from which the rate curve is nondecreasing for sure (the geometric
// tail majorant is valid beyond it).
long tail_start(const ServiceCurve& c) {
    return c.kind() == CurveKind::Tabulated ? static_cast<long>(c.table().size()) : 1;
}

}  // namespace

double MomentSet::sigma() const { return std::sqrt(var_total); }

std::complex<double> OpenQueue::gen_fn(std::complex<double> z) const {
    if (arrival == 0.0) {
        if (std::abs(z) != 0.0) fail("gen_fn defined only at z = 0 for an idle queue");
        return {1.0, 0.0};
    }
    const std::complex<double> ratio = z / arrival;
    std::complex<double> acc{0.0, 0.0};
    for (size_t q = pmf.size(); q-- > 0;) acc = acc * ratio + pmf[q];
    return std::exp(log_norm) * acc;
}

QueueMoments moments(const std::vector<double>& pmf) {
    QueueMoments m;
    long double mean = 0.0L;
    for (size_t q = 0; q < pmf.size(); ++q) mean += static_cast<long double>(q) * pmf[q];
    m.mean = static_cast<double>(mean);
    long double v = 0.0L, b3 = 0.0L, b4 = 0.0L, b3s = 0.0L;
    for (size_t q = 0; q < pmf.size(); ++q) {
        const long double d = static_cast<long double>(q) - mean;
        const long double p = pmf[q];
        const long double d2 = d * d;
        v += p * d2;
        b3 += p * d2 * std::abs(static_cast<double>(d));
        b4 += p * d2 * d2;
        b3s += p * d2 * d;
    }
    m.variance = static_cast<double>(v);
    m.beta3 = static_cast<double>(b3);
    m.beta4 = static_cast<double>(b4);
    m.beta3_signed = static_cast<double>(b3s);
    m.gamma_sq = gamma_sq(pmf);
    return m;
}

double abs_central_moment(const std::vector<double>& pmf, double order) {
    if (!(order > 0.0)) fail("absolute moment order must be positive");
    long double mean = 0.0L;
    for (size_t q = 0; q < pmf.size(); ++q) mean += static_cast<long double>(q) * pmf[q];
    long double acc = 0.0L;
    for (size_t q = 0; q < pmf.size(); ++q) {
        const double d = std::abs(static_cast<double>(q) - static_cast<double>(mean));
        if (d > 0.0) acc += static_cast<long double>(pmf[q]) * std::pow(d, order);
    }
    return static_cast<double>(acc);
}

MomentSet aggregate_moments(const std::vector<OpenQueue>& queues) {
    MomentSet s;
    s.per_queue.reserve(queues.size());
    long double mean = 0, var = 0, b3 = 0, b4 = 0, b3s = 0, g2 = 0;
    for (const auto& q : queues) {
        s.per_queue.push_back(q.mom);
        mean += q.mom.mean;
        var += q.mom.variance;
        b3 += q.mom.beta3;
        b4 += q.mom.beta4;
        b3s += q.mom.beta3_signed;
        g2 += q.mom.gamma_sq;
    }
    s.mean_total = static_cast<double>(mean);
    s.var_total = static_cast<double>(var);
    s.beta3_total = static_cast<double>(b3);
    s.beta4_total = static_cast<double>(b4);
    s.beta3_signed_total = static_cast<double>(b3s);
    s.gamma_sq_total = static_cast<double>(g2);
    return s;
}

OpenQueue queue_pmf(const ServiceCurve& curve, int index, double a) {
    if (!(a >= 0.0)) fail("arrival intensity must be nonnegative");
    OpenQueue q;
    q.index = index;
    q.arrival = a;
    if (a == 0.0) {
        q.pmf = {1.0};
        q.log_norm = 0.0;
        q.mom = moments(q.pmf);
        return q;
    }
    if (curve.finite_effective_rate() && a >= curve.effective_rate())
        fail("open queue is not ergodic (arrival >= effective rate)");

    const double log_a = std::log(a);
    const long t0 = tail_start(curve);
    std::vector<double> lw{0.0};  // log weights, lw[0] = 0
    double lw_max = 0.0;
    // Running sums (relative to exp(lw_max)) drive the stopping rule only;
    // exact moments are recomputed from the normalized pmf afterwards.
    long double s0 = 1.0L, s1 = 0.0L, s4 = 0.0L;
    long q_cur = 0;
    while (true) {
        if (q_cur >= kSupportCap) fail("queue pmf truncation exceeded the support cap");
        const long next = q_cur + 1;
        const double lw_next = lw.back() + log_a - std::log(curve.rate(next));
        lw.push_back(lw_next);
        if (lw_next > lw_max) {
            const long double down = std::exp(static_cast<long double>(lw_max - lw_next));
            s0 *= down; s1 *= down; s4 *= down;
            lw_max = lw_next;
        }
        q_cur = next;
        const long double wq = std::exp(static_cast<long double>(lw_next - lw_max));
        s0 += wq;
        s1 += wq * next;
        const double mean_est = static_cast<double>(s1 / s0);
        const long double dq = next - mean_est;
        s4 += wq * dq * dq * dq * dq;
        if (q_cur < t0 || static_cast<double>(q_cur) < mean_est + 2.0) continue;
        const double r = a / curve.rate(q_cur + 1);
        if (r >= 1.0) continue;
        const GeomSums g = geom_sums(r);
        if (wq * g.a0 > kTailMassRel * s0) continue;
        const double d = std::max(0.0, static_cast<double>(q_cur) - mean_est);
        const long double tail_m4 =
            wq * (d * d * d * d * g.a0 + 4 * d * d * d * g.a1 + 6 * d * d * g.a2 +
                  4 * d * g.a3 + g.a4);
        if (s4 > 0.0L && tail_m4 > kTailMomentRel * s4) continue;
        break;
    }
    // logsumexp normalization.
    long double total = 0.0L;
    for (double v : lw) total += std::exp(static_cast<long double>(v - lw_max));
    q.log_norm = lw_max + static_cast<double>(std::log(total));
    q.pmf.resize(lw.size());
    for (size_t i = 0; i < lw.size(); ++i)
        q.pmf[i] = static_cast<double>(std::exp(static_cast<long double>(lw[i] - q.log_norm)));
    q.mom = moments(q.pmf);
    return q;
}

MeanVar open_queue_mean_var(const ServiceCurve& curve, double a) {
    if (!(a >= 0.0)) fail("arrival intensity must be nonnegative");
    if (a == 0.0) return {0.0, 0.0};
    if (curve.finite_effective_rate() && a >= curve.effective_rate())
        fail("open queue is not ergodic (arrival >= effective rate)");
    switch (curve.kind()) {
        case CurveKind::SingleServer: {
            const double rho = a / curve.base_mu();
            const double om = 1.0 - rho;
            return {rho / om, rho / (om * om)};
        }
        case CurveKind::InfiniteServer: {
            const double mean = a / curve.base_mu();
            return {mean, mean};
        }
        case CurveKind::MultiServer:
        case CurveKind::Tabulated: {
            // Explicit head, closed-form geometric tail from where the curve
            // goes constant.
            const long t = curve.kind() == CurveKind::MultiServer
                               ? curve.servers()
                               : static_cast<long>(curve.table().size());
            const double log_a = std::log(a);
            std::vector<double> lw{0.0};
            double lw_max = 0.0;
            for (long qq = 1; qq <= t; ++qq) {
                lw.push_back(lw.back() + log_a - std::log(curve.rate(qq)));
                lw_max = std::max(lw_max, lw.back());
            }
            long double s0 = 0.0L, s1 = 0.0L, s2 = 0.0L;
            for (long qq = 0; qq <= t; ++qq) {
                const long double w = std::exp(static_cast<long double>(lw[qq] - lw_max));
                s0 += w;
                s1 += w * qq;
                s2 += w * static_cast<long double>(qq) * qq;
            }
            const double r = a / curve.effective_rate();
            const GeomSums g = geom_sums(r);
            const long double wt = std::exp(static_cast<long double>(lw[t] - lw_max));
            s0 += wt * g.a0;
            s1 += wt * (t * g.a0 + g.a1);
            s2 += wt * (static_cast<double>(t) * t * g.a0 + 2.0 * t * g.a1 + g.a2);
            const double mean = static_cast<double>(s1 / s0);
            const double ex2 = static_cast<double>(s2 / s0);
            return {mean, ex2 - mean * mean};
        }
        case CurveKind::Algebraic: {
            // No closed form; shifted numeric sums with a geometric stopping
            // bound (the rate curve increases toward the limit rate).
            const double log_a = std::log(a);
            double lw_cur = 0.0, lw_max = 0.0;
            long double s0 = 1.0L, s1 = 0.0L, s2 = 0.0L;
            for (long qq = 1;; ++qq) {
                if (qq >= kSupportCap) fail("algebraic-curve moment sum exceeded the support cap");
                lw_cur += log_a - std::log(curve.rate(qq));
                if (lw_cur > lw_max) {
                    const long double down = std::exp(static_cast<long double>(lw_max - lw_cur));
                    s0 *= down; s1 *= down; s2 *= down;
                    lw_max = lw_cur;
                }
                const long double w = std::exp(static_cast<long double>(lw_cur - lw_max));
                s0 += w;
                s1 += w * qq;
                s2 += w * static_cast<long double>(qq) * qq;
                const double r = a / curve.rate(qq + 1);
                if (r < 1.0) {
                    const GeomSums g = geom_sums(r);
                    const long double tail2 =
                        w * (static_cast<double>(qq) * qq * g.a0 + 2.0 * qq * g.a1 + g.a2);
                    if (tail2 <= 1e-14L * s2 + 1e-14L * s0) break;
                }
            }
            const double mean = static_cast<double>(s1 / s0);
            const double ex2 = static_cast<double>(s2 / s0);
            return {mean, ex2 - mean * mean};
        }
    }
    fail("unreachable curve kind");
}

SolvedSurrogate solve_lambda(const ClosedNetwork& net, long m,
                             std::optional<double> initial_guess) {
    net.validate();
    if (m < 0) fail("population must be nonnegative");
    QueuePartition part = partition(net);
    const int n = net.size();

    SolvedSurrogate s;
    s.m = m;
    s.pi = part.pi;
    s.lambda0 = part.lambda0;

    auto mean_var_at = [&](double lambda) {
        MeanVar acc;
        for (int k = 0; k < n; ++k) {
            MeanVar mv = open_queue_mean_var(net.curves[k], lambda * part.pi[k]);
            acc.mean += mv.mean;
            acc.var += mv.var;
        }
        return acc;
    };

    double lambda = 0.0;
    if (m > 0) {
        const double tol = 1e-9 * std::max(1.0, static_cast<double>(m));
        double lo = 0.0;
        double hi = part.lambda0 * (1.0 - 1e-14);
        if (std::isinf(hi)) fail("saturation intensity is not finite");
        lambda = initial_guess ? std::clamp(*initial_guess, hi * 1e-12, hi * (1.0 - 1e-12))
                               : 0.5 * hi;
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            const MeanVar mv = mean_var_at(lambda);
            const double g = mv.mean - static_cast<double>(m);
            if (std::abs(g) <= tol) {
                converged = true;
                break;
            }
            if (g > 0.0) hi = lambda; else lo = lambda;
            // Newton step with the exact derivative m'(lambda) = var/lambda.
            double next = lambda - g * lambda / mv.var;
            if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
            if (hi - lo <= 1e-15 * part.lambda0) {
                std::ostringstream os;
                os << "population exceeds representable load (reached m(lambda)=" << mv.mean
                   << " of target " << m << ")";
                fail(os.str());
            }
            lambda = next;
        }
        if (!converged) fail("lambda solve did not converge");
    }
    s.lambda = lambda;
    s.rho0 = lambda / part.lambda0;
    s.alpha = s.rho0 / (1.0 - s.rho0);
    s.queues.reserve(n);
    for (int k = 0; k < n; ++k) s.queues.push_back(queue_pmf(net.curves[k], k, lambda * part.pi[k]));
    s.mom = aggregate_moments(s.queues);
    return s;
}

std::complex<double> char_fn(const OpenQueue& q, double theta) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t x = 0; x < q.pmf.size(); ++x)
        acc += q.pmf[x] * std::polar(1.0, static_cast<double>(x) * theta);
    return acc * std::polar(1.0, -q.mom.mean * theta);
}

std::complex<double> char_fn_total(const SolvedSurrogate& s, double theta) {
    std::complex<double> acc{1.0, 0.0};
    for (const auto& q : s.queues) acc *= char_fn(q, theta);
    return acc;
}

std::complex<double> char_fn_hat(const SolvedSurrogate& s, const std::vector<int>& f0,
                                 double theta) {
    std::vector<char> skip(s.queues.size(), 0);
    for (int k : f0) {
        if (k < 0 || k >= static_cast<int>(s.queues.size())) fail("bottleneck index out of range");
        skip[k] = 1;
    }
    std::complex<double> acc{1.0, 0.0};
    for (size_t k = 0; k < s.queues.size(); ++k)
        if (!skip[k]) acc *= char_fn(s.queues[k], theta);
    return acc;
}

std::vector<double> size_biased(const OpenQueue& q) {
    if (!(q.mom.mean > 0.0)) fail("size-biased law needs a positive mean");
    std::vector<double> out(q.pmf.size(), 0.0);
    for (size_t x = 1; x < q.pmf.size(); ++x)
        out[x] = static_cast<double>(x) * q.pmf[x] / q.mom.mean;
    return out;
}

}  // namespace pfnet
