#include "pfnet/apps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pfnet/oracle.hpp"

namespace pfnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWeightSumTol = 1e-12;
constexpr double kEdgeAtOne = 1e-12;

[[noreturn]] void fail(const std::string& msg) { throw model_error(msg); }

}  // namespace

// ---- Jackson ----------------------------------------------------------------

void LoadMeasure::validate() const {
    if (atoms.empty()) fail("load measure has no atoms");
    double total = 0.0;
    for (const auto& [r, w] : atoms) {
        if (!(r > 0.0) || r > 1.0) fail("load measure atom outside (0, 1]");
        if (!(w > 0.0)) fail("load measure weight must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTol) fail("load measure weights must sum to 1");
}

double lambda_cr(const LoadMeasure& measure) {
    measure.validate();
    for (const auto& [r, w] : measure.atoms)
        if (r >= 1.0 - kEdgeAtOne) return kInf;
    auto sample = [&](double t) {
        double acc = 0.0;
        for (const auto& [r, w] : measure.atoms) acc += w * t * r / (1.0 - t * r);
        return acc;
    };
    // Error decays like (1 - t); halving grid, one Richardson step.
    double prev = 0.0, last = 0.0;
    for (int j = 3; j <= 12; ++j) {
        prev = last;
        last = sample(1.0 - std::pow(2.0, -j));
    }
    return 2.0 * last - prev;
}

ClosedNetwork build_jackson_network(const LoadMeasure& measure, int n) {
    measure.validate();
    if (n < 2) fail("jackson network needs at least 2 queues");
    const int seats = n - 1;
    const size_t na = measure.atoms.size();

    // Largest-remainder apportionment of the measure onto n - 1 queues.
    std::vector<long> count(na, 0);
    std::vector<std::pair<double, size_t>> rema(na);
    long assigned = 0;
    for (size_t j = 0; j < na; ++j) {
        const double quota = measure.atoms[j].second * seats;
        count[j] = static_cast<long>(std::floor(quota));
        assigned += count[j];
        rema[j] = {quota - std::floor(quota), j};
    }
    std::stable_sort(rema.begin(), rema.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (long s = seats - assigned, i = 0; s > 0; --s, ++i) ++count[rema[i % na].second];

    ClosedNetwork net;
    // Queue 0 carries the r = 1 support edge at vanishing (1/n) weight; it
    // pins lambda0 = n so the remaining loads are exactly the atom values.
    net.curves.push_back(ServiceCurve::single_server(1.0));
    for (size_t j = 0; j < na; ++j)
        for (long c = 0; c < count[j]; ++c)
            net.curves.push_back(ServiceCurve::single_server(1.0 / measure.atoms[j].first));
    net.routing.assign(n, std::vector<double>(n, 1.0 / n));
    return net;
}

NetworkFamily build_jackson(const LoadMeasure& measure, std::vector<int> indices,
                            PopulationRule rule) {
    measure.validate();
    NetworkFamily fam;
    fam.name = "jackson";
    fam.indices = std::move(indices);
    fam.network = [measure](int n) { return build_jackson_network(measure, n); };
    fam.population = [rule](int n, double m0) { return rule.apply(n, m0); };
    return fam;
}

// ---- tandem -----------------------------------------------------------------

ClosedNetwork build_tandem(int s, int l, double f) {
    if (s < 1 || l < 1) fail("tandem needs s >= 1 subnets of l >= 1 queues");
    if (!(f > 0.0) || !(f < 1.0)) fail("failure probability must lie in (0, 1)");
    const int n = s * l;
    ClosedNetwork net;
    net.curves.assign(n, ServiceCurve::single_server(1.0));
    net.routing.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < s; ++i) {
        const int entry = i * l;
        for (int k = 0; k < l; ++k) {
            const int q = entry + k;
            const int next = k + 1 < l ? q + 1 : ((i + 1) % s) * l;
            net.routing[q][entry] += f;
            net.routing[q][next] += 1.0 - f;
        }
    }
    return net;
}

NetworkFamily build_tandem_family(double f, std::vector<std::pair<int, int>> sl,
                                  PopulationRule rule) {
    if (sl.empty()) fail("tandem family needs at least one (s, l) pair");
    NetworkFamily fam;
    fam.name = "tandem";
    for (const auto& [s, l] : sl) fam.indices.push_back(s * l);
    fam.network = [f, sl](int n) {
        for (const auto& [s, l] : sl)
            if (s * l == n) return build_tandem(s, l, f);
        fail("no (s, l) pair with s * l matching the requested index");
    };
    fam.population = [rule](int n, double m0) { return rule.apply(n, m0); };
    return fam;
}

double tandem_l_profile(double f, double t) {
    if (!(f > 0.0) || !(f < 1.0)) fail("failure probability must lie in (0, 1)");
    if (!(t > 0.0) || t >= 1.0) fail("t must lie in (0, 1)");
    double acc = 0.0, pw = 1.0;
    for (int k = 0; k < 100000; ++k) {
        const double term = t * pw / (1.0 - t * pw);
        acc += term;
        if (term < 1e-16 * acc) break;
        pw *= 1.0 - f;
    }
    return acc;
}

// ---- vehicle fleet ----------------------------------------------------------

void VehicleNetwork::validate() const {
    const int n = stations();
    if (n == 0) fail("vehicle network has no stations");
    for (double mu : station_mu)
        if (!(mu > 0.0)) fail("station rates must be positive");
    if (static_cast<int>(route.size()) != n || static_cast<int>(travel_mu.size()) != n)
        fail("route and travel_mu must be n x n");
    for (int k = 0; k < n; ++k) {
        if (static_cast<int>(route[k].size()) != n || static_cast<int>(travel_mu[k].size()) != n)
            fail("route and travel_mu must be n x n");
        double sum = 0.0;
        for (int l = 0; l < n; ++l) {
            if (route[k][l] < 0.0) fail("route probabilities must be nonnegative");
            if (route[k][l] > 0.0 && !(travel_mu[k][l] > 0.0))
                fail("travel rates must be positive on used edges");
            sum += route[k][l];
        }
        if (std::abs(sum - 1.0) > kWeightSumTol) fail("route rows must sum to 1");
    }
    if (fleet < 0) fail("fleet size must be nonnegative");
}

ClosedNetwork build_vehicle(const VehicleNetwork& v) {
    v.validate();
    const int n = v.stations();
    ClosedNetwork net;
    for (int k = 0; k < n; ++k) net.curves.push_back(ServiceCurve::single_server(v.station_mu[k]));
    std::vector<std::pair<int, int>> edges;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            if (v.route[k][l] > 0.0) {
                edges.emplace_back(k, l);
                net.curves.push_back(ServiceCurve::infinite_server(v.travel_mu[k][l]));
            }
    const int total = n + static_cast<int>(edges.size());
    net.routing.assign(total, std::vector<double>(total, 0.0));
    for (size_t e = 0; e < edges.size(); ++e) {
        const auto [k, l] = edges[e];
        net.routing[k][n + e] = v.route[k][l];   // station -> outgoing edge
        net.routing[n + e][l] = 1.0;             // edge -> destination station
    }
    net.population = v.fleet;
    return net;
}

VehicleLoss vehicle_loss(const VehicleNetwork& v, bool exact_oracle) {
    VehicleLoss loss;
    const double mu_total = std::accumulate(v.station_mu.begin(), v.station_mu.end(), 0.0);
    if (v.fleet == 0) {
        loss.exact = 1.0;
        loss.asymptotic = 1.0;
        return loss;
    }
    ClosedNetwork net = build_vehicle(v);
    const SolvedSurrogate s = solve_lambda(net, v.fleet);
    loss.lambda = s.lambda;
    loss.asymptotic = 1.0 - s.lambda / (2.0 * mu_total);
    if (exact_oracle) {
        const ExactSolution ex = solve_exact(net);
        double acc = 0.0;
        for (int k = 0; k < v.stations(); ++k) acc += v.station_mu[k] * ex.marginal[k][0];
        loss.exact = acc / mu_total;
    }
    return loss;
}

double vehicle_loss_asymptotic_at(const VehicleNetwork& v, double lambda) {
    const double mu_total = std::accumulate(v.station_mu.begin(), v.station_mu.end(), 0.0);
    return 1.0 - lambda / (2.0 * mu_total);
}

FleetRecommendation recommend_fleet(const VehicleNetwork& v) {
    ClosedNetwork net = build_vehicle(v);
    const QueuePartition part = partition(net);
    FleetRecommendation rec;
    rec.lambda0 = part.lambda0;
    std::vector<char> in_f0(net.size(), 0);
    for (int k : part.bottleneck) {
        in_f0[k] = 1;
        if (k < v.stations()) rec.bottleneck_stations.push_back(k);
    }
    for (int k = 0; k < net.size(); ++k) {
        if (in_f0[k]) continue;
        rec.m_hat0 += open_queue_mean_var(net.curves[k], part.lambda0 * part.pi[k]).mean;
    }
    rec.fleet = std::lround(rec.m_hat0);
    return rec;
}

}  // namespace pfnet
