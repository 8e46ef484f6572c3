#include "pfnet/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pfnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGGrowth = 1.05;      // "growing by > 5%"
constexpr double kThresholdFine = 10;  // theta^2 m resp. theta mhat0 cutoffs
constexpr double kXiCut = 20.0;
constexpr double kNearCriticalBand = 0.05;

[[noreturn]] void fail(const std::string& msg) { throw model_error(msg); }

std::vector<std::vector<double>> cycle_routing(int n) {
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    for (int k = 0; k < n; ++k) p[k][(k + 1) % n] = 1.0;
    if (n == 1) p[0][0] = 1.0;
    return p;
}

// Sum of surrogate means at intensity lambda, optionally skipping F0.
double mean_sum(const ClosedNetwork& net, const QueuePartition& part, double lambda,
                bool skip_f0) {
    std::vector<char> skip(net.size(), 0);
    if (skip_f0)
        for (int k : part.bottleneck) skip[k] = 1;
    double acc = 0.0;
    for (int k = 0; k < net.size(); ++k) {
        if (skip[k]) continue;
        acc += open_queue_mean_var(net.curves[k], lambda * part.pi[k]).mean;
    }
    return acc;
}

}  // namespace

long PopulationRule::apply(int n, double m0) const {
    double v = 0.0;
    switch (base) {
        case Base::M0: v = coeff * m0; break;
        case Base::Index: v = coeff * n; break;
        case Base::Const: v = coeff; break;
    }
    const long m = std::lround(v);
    if (m < 0) fail("population rule produced a negative population");
    return m;
}

NetworkFamily build_replicate(std::vector<ServiceCurve> fixed,
                              std::vector<ServiceCurve> repeated,
                              std::vector<int> indices, PopulationRule rule) {
    if (repeated.empty()) fail("replicate family needs a nonempty repeated block");
    NetworkFamily fam;
    fam.name = "replicate";
    fam.indices = std::move(indices);
    fam.network = [fixed, repeated](int n) {
        if (n < static_cast<int>(fixed.size()) + 1) fail("family index too small");
        ClosedNetwork net;
        net.curves = fixed;
        for (int k = 0; net.size() < n; ++k)
            net.curves.push_back(repeated[k % repeated.size()]);
        net.routing = cycle_routing(n);
        return net;
    };
    fam.population = [rule](int n, double m0) { return rule.apply(n, m0); };
    return fam;
}

double m_of_t(const ClosedNetwork& net, double t) {
    if (!(t > 0.0) || t >= 1.0) fail("t must lie in (0, 1)");
    const QueuePartition part = partition(net);
    return mean_sum(net, part, t * part.lambda0, false);
}

CriticalSequence critical_sequence(const NetworkFamily& fam, double u,
                                   std::vector<double> t_grid) {
    if (!(u > 0.0) || u >= 1.0) fail("u must lie in (0, 1)");
    if (fam.indices.empty()) fail("family has no indices");
    if (t_grid.empty())
        for (int j = 3; j <= 12; ++j) t_grid.push_back(1.0 - std::pow(2.0, -j));
    for (double t : t_grid)
        if (!(t > 0.0) || t >= 1.0) fail("t grid entries must lie in (0, 1)");
    std::sort(t_grid.begin(), t_grid.end());

    CriticalSequence cs;
    cs.u = u;

    std::vector<int> order = fam.indices;
    std::sort(order.begin(), order.end());
    const int n_top = order.back();
    const int n_prev = order.size() > 1 ? order[order.size() - 2] : n_top;

    // Bottleneck share of m(u lambda0): if vanishing across indices, F0 drops
    // out of the g-limit (limsup over n is taken before t -> 1).
    auto share_at = [&](int n) {
        ClosedNetwork net = fam.network(n);
        const QueuePartition part = partition(net);
        const double full = mean_sum(net, part, u * part.lambda0, false);
        const double rest = mean_sum(net, part, u * part.lambda0, true);
        return full > 0.0 ? (full - rest) / full : 0.0;
    };
    const double share_top = share_at(n_top);
    const double share_prev = n_prev == n_top ? share_top : share_at(n_prev);
    const bool f0_vanishing =
        share_top < 0.02 || (n_prev != n_top && share_top <= 0.6 * share_prev);

    ClosedNetwork net_top = fam.network(n_top);
    const QueuePartition part_top = partition(net_top);
    const double denom = mean_sum(net_top, part_top, u * part_top.lambda0, f0_vanishing);
    if (!(denom > 0.0)) fail("m_n(u lambda0) vanished; family degenerate");
    for (double t : t_grid)
        cs.g_profile.emplace_back(
            t, mean_sum(net_top, part_top, t * part_top.lambda0, f0_vanishing) / denom);
    for (size_t i = 1; i < cs.g_profile.size(); ++i)
        if (cs.g_profile[i].second < cs.g_profile[i - 1].second * (1.0 - 1e-9))
            fail("numerical inconsistency: ghat_u samples decrease along the t grid");

    // Growth heuristic on the last three steps.
    bool growing = cs.g_profile.size() >= 4;
    const size_t gp = cs.g_profile.size();
    for (size_t i = gp >= 4 ? gp - 3 : 1; growing && i < gp; ++i)
        growing = cs.g_profile[i].second > kGGrowth * cs.g_profile[i - 1].second;
    if (growing) {
        cs.g_class = CriticalSequence::GLimit::Infinite;
        cs.g_limit = kInf;
        cs.h_u = 1.0;
    } else {
        cs.g_class = CriticalSequence::GLimit::FiniteOne;
        // Error decays like (1 - t), halving along the grid: one Richardson
        // step on the last two samples.
        const double g1 = cs.g_profile[gp - 2].second, g2 = cs.g_profile[gp - 1].second;
        cs.g_limit = 2.0 * g2 - g1;
        cs.h_u = cs.g_limit;
    }

    for (int n : fam.indices) {
        ClosedNetwork net = fam.network(n);
        const QueuePartition part = partition(net);
        cs.m0.push_back(cs.h_u * mean_sum(net, part, u * part.lambda0, false));
        cs.m0_strong.push_back(mean_sum(net, part, part.lambda0, true));
    }
    return cs;
}

std::vector<AssumptionCheck> check_assumptions(const ClosedNetwork& net,
                                               const QueuePartition& part,
                                               const AssumptionOptions& opt) {
    std::vector<AssumptionCheck> out;
    const int n = net.size();

    {  // A-uan: no single queue dominates the relative load profile.
        double total = 0.0, top = 0.0;
        int top_k = 0;
        for (int k = 0; k < n; ++k) {
            const double w = net.curves[k].finite_effective_rate()
                                 ? part.pi[k] / part.effective_rates[k]
                                 : 0.0;
            total += w;
            if (w > top) { top = w; top_k = k; }
        }
        AssumptionCheck c{"A-uan", true, 0.0, ""};
        c.statistic = total > 0.0 ? top / total : 1.0;
        c.pass = c.statistic <= opt.uan_cap;
        std::ostringstream os;
        os << "max share at queue " << top_k << " (trend checked per family)";
        c.witness = os.str();
        out.push_back(c);
    }
    {  // A-service: R/T envelopes exist per kind; B-bound on I queues.
        AssumptionCheck c{"A-service", true, 0.0, "R(q)/T(q) envelopes hold for all kinds"};
        double worst_b = 0.0;
        for (int k : part.infinite)
            worst_b = std::max(worst_b, part.lambda0 * part.pi[k] / net.curves[k].rate(1));
        c.statistic = worst_b;
        if (worst_b > opt.service_B) {
            c.pass = false;
            c.witness = "B-bound exceeded on an infinite-server queue";
        }
        out.push_back(c);
    }
    {  // A-nonsat: off-bottleneck saturation loads stay below A.
        std::vector<char> in_f0(n, 0);
        for (int k : part.bottleneck) in_f0[k] = 1;
        double worst = 0.0;
        int worst_k = -1;
        for (int k : part.finite) {
            if (in_f0[k]) continue;
            const double load = part.lambda0 * part.pi[k] / part.effective_rates[k];
            if (load > worst) { worst = load; worst_k = k; }
        }
        AssumptionCheck c{"A-nonsat", worst <= opt.nonsat_A, worst, ""};
        std::ostringstream os;
        if (worst_k >= 0) os << "max off-bottleneck load at queue " << worst_k;
        else os << "no off-bottleneck finite queues";
        c.witness = os.str();
        out.push_back(c);
    }
    {  // A-pole: every bottleneck curve classifies cleanly.
        AssumptionCheck c{"A-pole", true, 0.0, ""};
        std::ostringstream os;
        try {
            double xi_sum = 0.0;
            for (int k : part.bottleneck) {
                const XiEstimate est = estimate_xi(net.curves[k]);
                xi_sum += est.xi;
            }
            c.statistic = xi_sum;
            os << "xi_n = " << xi_sum << " over " << part.bottleneck.size() << " bottleneck(s)";
        } catch (const model_error& e) {
            c.pass = false;
            os << e.what();
        }
        c.witness = os.str();
        out.push_back(c);
    }
    return out;
}

std::vector<RegimeReport> classify(const NetworkFamily& fam, double u,
                                   const AssumptionOptions& opt) {
    const CriticalSequence cs = critical_sequence(fam, u);
    std::vector<RegimeReport> reports;
    double prev_xi = -kInf;
    for (size_t i = 0; i < fam.indices.size(); ++i) {
        const int n = fam.indices[i];
        ClosedNetwork net = fam.network(n);
        RegimeReport rep;
        rep.index = n;
        rep.m = fam.population(n, cs.m0[i]);
        net.population = rep.m;
        const SolvedSurrogate s = solve_lambda(net, rep.m);
        const QueuePartition part = partition(net, s.lambda);
        rep.lambda = s.lambda;
        rep.rho0 = s.rho0;
        rep.m0_weak = cs.m0[i];
        rep.m0_strong = cs.m0_strong[i];
        rep.assumptions = check_assumptions(net, part, opt);
        const double m = static_cast<double>(rep.m);
        rep.ratio_weak = rep.m0_weak > 0.0 ? m / rep.m0_weak : kInf;
        rep.ratio_strong = rep.m0_strong > 1e-12 ? m / rep.m0_strong : kInf;
        rep.theta = std::abs(rep.ratio_strong - 1.0);

        bool pole_ok = true, nonsat_ok = true;
        for (const auto& c : rep.assumptions) {
            if (c.name == "A-pole") pole_ok = c.pass;
            if (c.name == "A-nonsat") nonsat_ok = c.pass;
            if (!c.pass) rep.note += (rep.note.empty() ? "" : "; ") + c.name + " failed";
        }
        rep.xi = std::numeric_limits<double>::quiet_NaN();
        if (pole_ok) rep.xi = xi_total(net, part.bottleneck);
        rep.xi_growing = pole_ok && rep.xi >= kXiCut && rep.xi > prev_xi && i > 0;
        if (pole_ok) prev_xi = rep.xi;

        const bool strong_usable = rep.m0_strong > 1e-12 && nonsat_ok && pole_ok;
        auto note_add = [&](const std::string& s_) {
            rep.note += (rep.note.empty() ? "" : "; ") + s_;
        };

        if (strong_usable && rep.ratio_strong < 1.0 && rep.theta * rep.theta * m >= kThresholdFine) {
            rep.cls = RegimeClass::NonSaturated;
            rep.epsilon = 1.0 / m + 1.0 / (m * m * std::pow(rep.theta, 4.0));
        } else if (strong_usable && rep.ratio_strong > 1.0 && rep.xi_growing) {
            // Unbounded-xi saturation keeps the normal limit; fourth-moment
            // growth condition checked with constant 10.
            bool beta4_ok = true;
            const double scale = s.rho0 / std::pow(1.0 - s.rho0, 4.0);
            for (int k : part.bottleneck) {
                const double xi_k = estimate_xi(net.curves[k]).xi;
                if (s.queues[k].mom.beta4 > 10.0 * xi_k * scale) beta4_ok = false;
            }
            if (beta4_ok) {
                rep.cls = RegimeClass::SaturatedNormal;
                rep.epsilon = 1.0 / ((1.0 - s.rho0) * m);
            } else {
                rep.cls = RegimeClass::NearCritical;
                rep.epsilon = kInf;
                note_add("fourth-moment growth condition failed; no theorem applies");
            }
        } else if (strong_usable && rep.ratio_strong > 1.0 && std::isfinite(rep.xi) &&
                   rep.theta * rep.m0_strong >= kThresholdFine) {
            rep.cls = RegimeClass::SaturatedGamma;
            const double mh = rep.m0_strong, th = rep.theta;
            rep.epsilon = 1.0 / (th * th * mh) + 1.0 / (th * mh) +
                          std::pow(1.0 / (mh * th * th), (rep.xi - 1.0) / 2.0) / std::sqrt(mh);
        } else if (std::abs(rep.ratio_weak - 1.0) <= kNearCriticalBand) {
            rep.cls = RegimeClass::NearCritical;
            rep.epsilon = kInf;
            note_add("near-critical, no theorem applies");
        } else if (rep.ratio_weak < 1.0) {
            rep.cls = RegimeClass::NonSaturated;
            rep.epsilon = 1.0 / m;
            note_add("coarse threshold classification");
        } else if (cs.g_class == CriticalSequence::GLimit::FiniteOne) {
            rep.cls = RegimeClass::SaturatedUnbounded;
            rep.epsilon = kInf;
            note_add("coarse threshold classification: bottleneck means diverge");
        } else {
            // Divergent-g family: any finite ratio keeps the means bounded.
            rep.cls = RegimeClass::NonSaturated;
            rep.epsilon = 1.0 / m;
            note_add("coarse threshold classification (divergent g-limit)");
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

ClosedNetwork split_saturated_infinite_server(const ClosedNetwork& net, double cap) {
    if (!(cap > 0.0)) fail("split cap must be positive");
    net.validate();
    const SolvedSurrogate s = solve_lambda(net, net.population);
    const int n = net.size();
    std::vector<long> clones(n, 1);
    bool any = false;
    for (int k = 0; k < n; ++k) {
        if (net.curves[k].finite_effective_rate()) continue;
        const double mean = s.queues[k].mom.mean;
        if (mean > cap) {
            clones[k] = static_cast<long>(std::ceil(mean));
            any = any || clones[k] > 1;
        }
    }
    if (!any) return net;

    ClosedNetwork out;
    out.population = net.population;
    std::vector<int> first(n, 0);
    int total = 0;
    for (int k = 0; k < n; ++k) {
        first[k] = total;
        total += static_cast<int>(clones[k]);
        for (long c = 0; c < clones[k]; ++c) out.curves.push_back(net.curves[k]);
    }
    // Rows are duplicated; columns are split evenly across the target's
    // clones, which divides the invariant measure the same way.
    out.routing.assign(total, std::vector<double>(total, 0.0));
    for (int i = 0; i < n; ++i)
        for (long ci = 0; ci < clones[i]; ++ci)
            for (int j = 0; j < n; ++j)
                for (long cj = 0; cj < clones[j]; ++cj)
                    out.routing[first[i] + ci][first[j] + cj] =
                        net.routing[i][j] / static_cast<double>(clones[j]);
    return out;
}

std::string to_string(RegimeClass c) {
    switch (c) {
        case RegimeClass::NonSaturated: return "non-saturated";
        case RegimeClass::SaturatedGamma: return "saturated-gamma";
        case RegimeClass::SaturatedNormal: return "saturated-normal";
        case RegimeClass::SaturatedUnbounded: return "saturated-unbounded";
        case RegimeClass::NearCritical: return "near-critical";
    }
    return "?";
}

}  // namespace pfnet
