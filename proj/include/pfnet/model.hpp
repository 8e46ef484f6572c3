#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfnet {

// Anything a caller handed us that cannot describe a valid computation:
// malformed routing, non-ergodic load, unsupported case, exceeded budget.
// The CLI maps these to exit code 1.
class model_error : public std::runtime_error {
public:
    explicit model_error(const std::string& what) : std::runtime_error(what) {}
};

enum class CurveKind { SingleServer, MultiServer, InfiniteServer, Algebraic, Tabulated };

std::string to_string(CurveKind k);

// State-dependent service rate curve mu(q) = completion rate with q clients
// present.  mu is nondecreasing for every supported kind, mu(0) = 0 implied.
class ServiceCurve {
public:
    static ServiceCurve single_server(double mu);
    static ServiceCurve multi_server(double mu, int servers);
    static ServiceCurve infinite_server(double mu);
    // mu(q) = mu * exp(-(xi-1)/q); approaches the limit rate algebraically
    // with order xi > 1.
    static ServiceCurve algebraic(double mu, double xi);
    // mu(q) = table[q-1] for q <= table.size(), constant afterwards.
    static ServiceCurve tabulated(std::vector<double> rates);

    CurveKind kind() const { return kind_; }
    double rate(long q) const;

    // liminf_q (mu(1)...mu(q))^(1/q); +inf marks an infinite-server station.
    double effective_rate() const;
    bool finite_effective_rate() const { return kind_ != CurveKind::InfiniteServer; }

    double base_mu() const { return mu_; }
    int servers() const { return servers_; }
    double xi() const { return xi_; }
    const std::vector<double>& table() const { return table_; }

private:
    ServiceCurve() = default;
    CurveKind kind_ = CurveKind::SingleServer;
    double mu_ = 1.0;
    int servers_ = 1;
    double xi_ = 2.0;
    std::vector<double> table_;
};

struct ClosedNetwork {
    std::vector<ServiceCurve> curves;
    std::vector<std::vector<double>> routing;  // row-stochastic, irreducible
    long population = 0;

    int size() const { return static_cast<int>(curves.size()); }
    // Throws model_error on structural defects (shape, row sums off by more
    // than 1e-12, negative entries, reducible graph, empty F class).
    void validate() const;
};

// Stationary distribution of an irreducible row-stochastic matrix.  Dense LU
// for n <= 2000, power iteration (tol 1e-12) beyond.
std::vector<double> invariant_measure(const std::vector<std::vector<double>>& routing);

struct QueuePartition {
    std::vector<int> finite;        // F: finite effective rate
    std::vector<int> infinite;      // I
    std::vector<int> bottleneck;    // F0: argmax_k lambda0 * pi_k / mu_k over F
    std::vector<double> pi;         // invariant measure of the routing chain
    std::vector<double> effective_rates;  // +inf on I
    double lambda0 = 0.0;           // min_{k in F} mu_k / pi_k
    std::vector<double> rho;        // per-queue utilization, only if lambda given
    double rho0 = -1.0;             // lambda / lambda0, only if lambda given
    bool has_rho() const { return rho0 >= 0.0; }
};

// Splits queues into F/I, computes effective rates, lambda0 and the
// bottleneck set (ties within relative 1e-9 all belong to F0).  When lambda
// is supplied, per-queue utilizations and rho0 are filled in; lambda must
// satisfy ergodicity (lambda < lambda0).
QueuePartition partition(const ClosedNetwork& net, std::optional<double> lambda = std::nullopt);

}  // namespace pfnet
