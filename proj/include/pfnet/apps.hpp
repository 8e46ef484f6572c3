#pragma once

#include "pfnet/scaling.hpp"

namespace pfnet {

// ---- star-like (Jackson) family ------------------------------------------

// Discrete load measure: atoms (r, weight) with r in (0, 1], weights > 0
// summing to 1.  r is the relative utilization at saturation.
struct LoadMeasure {
    std::vector<std::pair<double, double>> atoms;
    void validate() const;
};

// Critical intensity integral lim_{t->1-} sum_j w_j t r_j / (1 - t r_j),
// sampled on t_j = 1 - 2^-j and extrapolated; +inf when an atom sits at
// r = 1 (reported symbolically by the caller).
double lambda_cr(const LoadMeasure& measure);

// Single network of n single-server queues with uniform routing whose load
// profile follows the measure (largest-remainder apportionment of atoms).
ClosedNetwork build_jackson_network(const LoadMeasure& measure, int n);
NetworkFamily build_jackson(const LoadMeasure& measure, std::vector<int> indices,
                            PopulationRule rule);

// ---- tandem chain with failures -------------------------------------------

// s subnets of l unit-rate single-server queues in a ring; each completion
// fails back to its subnet entry with probability f, else moves on.
ClosedNetwork build_tandem(int s, int l, double f);
NetworkFamily build_tandem_family(double f, std::vector<std::pair<int, int>> sl,
                                  PopulationRule rule);
// L_f(t) = sum_{k>=1} t (1-f)^{k-1} / (1 - t (1-f)^{k-1}), t in (0, 1).
double tandem_l_profile(double f, double t);

// ---- vehicle fleet ---------------------------------------------------------

// n stations (single-server, rate station_mu[k]); a served request at k picks
// destination l with probability route[k][l] and travels on an infinite-server
// edge of per-vehicle rate travel_mu[k][l].  Edges with route[k][l] = 0 are
// omitted from the closed model.
struct VehicleNetwork {
    std::vector<double> station_mu;
    std::vector<std::vector<double>> route;
    std::vector<std::vector<double>> travel_mu;
    long fleet = 0;
    int stations() const { return static_cast<int>(station_mu.size()); }
    void validate() const;
};

// Closed model: queues [0, n) are the stations, then one queue per edge in
// row-major (k, l) order.
ClosedNetwork build_vehicle(const VehicleNetwork& v);

struct VehicleLoss {
    double lambda = 0.0;       // lambda_n at the given fleet
    double exact = -1.0;       // sum_k mu_k P(Q_k = 0) / sum_k mu_k; -1 if skipped
    double asymptotic = 0.0;   // 1 - lambda_n / (2 sum_k mu_k)
};
// exact_oracle additionally runs the convolution oracle (refused over the
// 1e6 state-space budget).
VehicleLoss vehicle_loss(const VehicleNetwork& v, bool exact_oracle = true);
double vehicle_loss_asymptotic_at(const VehicleNetwork& v, double lambda);

struct FleetRecommendation {
    double m_hat0 = 0.0;            // sum of off-bottleneck means at lambda0
    long fleet = 0;                 // round(m_hat0)
    std::vector<int> bottleneck_stations;
    double lambda0 = 0.0;
};
FleetRecommendation recommend_fleet(const VehicleNetwork& v);

}  // namespace pfnet
