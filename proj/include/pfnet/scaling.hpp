#pragma once

#include <functional>

#include "pfnet/asymptotics.hpp"

namespace pfnet {

// A sequence of closed networks indexed by size, plus the population rule.
// network(n) leaves .population = 0; population(n, m0_n) supplies it.
struct NetworkFamily {
    std::string name;
    std::vector<int> indices;
    std::function<ClosedNetwork(int)> network;
    std::function<long(int, double)> population;
};

// Population rules for family builders: m_n = round(coeff * base), base one
// of m0_n (weakly critical), the index n, or the constant 1.
struct PopulationRule {
    enum class Base { M0, Index, Const };
    double coeff = 1.0;
    Base base = Base::M0;
    long apply(int n, double m0) const;
};

// Cycle family: `fixed` queues followed by copies of the `repeated` block
// until the network holds n queues; single-cycle routing, uniform pi.
NetworkFamily build_replicate(std::vector<ServiceCurve> fixed,
                              std::vector<ServiceCurve> repeated,
                              std::vector<int> indices, PopulationRule rule);

// m_n(t * lambda0): expected total surrogate population at a fraction t of
// the saturation intensity.  Strictly increasing in t on (0, 1).
double m_of_t(const ClosedNetwork& net, double t);

// Critical sequences m0_n(u) = h_u * m_n(u * lambda0_n) (weak) and
// mhat0_n = sum_{k not in F0} m_k(lambda0_n) (strong).  The g-limit is a
// limit in n before t -> 1: when the bottleneck share of m_n(u lambda0) is
// vanishing across indices, the F0 queues are excluded from the samples
// (they contribute nothing in the n-limit but would swamp any fixed index).
// Class heuristic on t_j = 1 - 2^-j, j = 3..12: last three samples each
// growing by > 5% => Infinite (h_u = 1); otherwise Richardson extrapolation
// gives the finite limit and h_u.
struct CriticalSequence {
    double u = 0.5;
    enum class GLimit { FiniteOne, Infinite };
    GLimit g_class = GLimit::Infinite;
    double g_limit = 0.0;  // +inf for Infinite
    double h_u = 1.0;
    std::vector<std::pair<double, double>> g_profile;  // (t, ghat_u(t))
    std::vector<double> m0;         // per index, weak
    std::vector<double> m0_strong;  // per index, mhat0
};
CriticalSequence critical_sequence(const NetworkFamily& fam, double u = 0.5,
                                   std::vector<double> t_grid = {});

enum class RegimeClass {
    NonSaturated,
    SaturatedGamma,
    SaturatedNormal,
    SaturatedUnbounded,
    NearCritical,  // thresholds not met; no theorem applies
};

std::string to_string(RegimeClass c);

struct AssumptionCheck {
    std::string name;  // "A-uan", "A-service", "A-nonsat", "A-pole"
    bool pass = true;
    double statistic = 0.0;
    std::string witness;
};

struct AssumptionOptions {
    double nonsat_A = 0.95;  // off-bottleneck load ceiling
    double service_B = 100.0;  // B-bound ceiling for infinite-server queues
    double uan_cap = 0.5;    // single-network A-uan ceiling
};

std::vector<AssumptionCheck> check_assumptions(const ClosedNetwork& net,
                                               const QueuePartition& part,
                                               const AssumptionOptions& opt = {});

struct RegimeReport {
    int index = 0;
    long m = 0;
    double lambda = 0.0;
    double rho0 = 0.0;
    double m0_weak = 0.0;
    double m0_strong = 0.0;
    double ratio_weak = 0.0;    // m / m0_weak
    double ratio_strong = 0.0;  // m / m0_strong (inf when m0_strong = 0)
    double theta = 0.0;         // |ratio_strong - 1|
    double xi = 0.0;            // xi_n over F0
    bool xi_growing = false;    // xi >= 20 and growing across indices
    RegimeClass cls = RegimeClass::NearCritical;
    double epsilon = 0.0;       // error scale of the applicable theorem
    std::string note;
    std::vector<AssumptionCheck> assumptions;
};

// Per-index saturation classification.  Thresholds: theta^2 m >= 10
// (non-saturated side), theta * mhat0 >= 10 (saturated side), xi cut at 20.
// Assumption failures flag the report but never suppress it.
std::vector<RegimeReport> classify(const NetworkFamily& fam, double u = 0.5,
                                   const AssumptionOptions& opt = {});

// Rewrites the network, replacing every infinite-server queue whose surrogate
// mean at lambda_n(population) exceeds cap by ceil(mean) clones that split
// its Poisson parameter (and invariant measure) equally.  The S_n law and all
// untouched marginals are unchanged.
ClosedNetwork split_saturated_infinite_server(const ClosedNetwork& net, double cap = 1.0);

}  // namespace pfnet
