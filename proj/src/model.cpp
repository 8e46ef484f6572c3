#include "pfnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

namespace pfnet {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kPiResidualTol = 1e-10;
constexpr double kBottleneckTieTol = 1e-9;
constexpr int kDenseSolveLimit = 2000;
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& msg) { throw model_error(msg); }

// Forward/backward reachability from node 0; irreducible iff both cover all.
bool strongly_connected(const std::vector<std::vector<double>>& p) {
    const int n = static_cast<int>(p.size());
    auto sweep = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < n; ++w) {
                double edge = forward ? p[v][w] : p[w][v];
                if (edge > 0.0 && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return sweep(true) && sweep(false);
}

void check_routing(const std::vector<std::vector<double>>& p) {
    const size_t n = p.size();
    if (n == 0) fail("routing matrix is empty");
    for (size_t i = 0; i < n; ++i) {
        if (p[i].size() != n) fail("routing matrix is not square");
        double sum = 0.0;
        for (double v : p[i]) {
            if (!(v >= 0.0)) fail("routing entry negative or NaN");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            std::ostringstream os;
            os << "routing row " << i << " sums to " << sum << " (tolerance 1e-12)";
            fail(os.str());
        }
    }
    if (!strongly_connected(p)) fail("routing chain is not irreducible");
}

std::vector<double> dense_stationary(const std::vector<std::vector<double>>& p) {
    const int n = static_cast<int>(p.size());
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = p[j][i] - (i == j ? 1.0 : 0.0);
    // Replace one balance equation by the normalization sum(pi) = 1.
    for (int j = 0; j < n; ++j) a(n - 1, j) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = a.partialPivLu().solve(b);
    return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> power_stationary(const std::vector<std::vector<double>>& p) {
    // Lazy chain (P + I)/2 keeps the fixed point and kills periodicity.
    const int n = static_cast<int>(p.size());
    std::vector<double> x(n, 1.0 / n), y(n);
    for (long it = 0; it < 100000000L; ++it) {
        std::fill(y.begin(), y.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            const auto& row = p[i];
            for (int j = 0; j < n; ++j) y[j] += xi * row[j];
        }
        double diff = 0.0, total = 0.0;
        for (int j = 0; j < n; ++j) {
            y[j] = 0.5 * (y[j] + x[j]);
            total += y[j];
        }
        for (int j = 0; j < n; ++j) {
            y[j] /= total;
            diff = std::max(diff, std::abs(y[j] - x[j]));
        }
        x.swap(y);
        if (diff <= 1e-12) return x;
    }
    fail("power iteration did not reach 1e-12");
}

}  // namespace

std::string to_string(CurveKind k) {
    switch (k) {
        case CurveKind::SingleServer: return "single";
        case CurveKind::MultiServer: return "multi";
        case CurveKind::InfiniteServer: return "infinite";
        case CurveKind::Algebraic: return "algebraic";
        case CurveKind::Tabulated: return "table";
    }
    return "?";
}

ServiceCurve ServiceCurve::single_server(double mu) {
    if (!(mu > 0.0)) fail("single-server rate must be positive");
    ServiceCurve c;
    c.kind_ = CurveKind::SingleServer;
    c.mu_ = mu;
    return c;
}

ServiceCurve ServiceCurve::multi_server(double mu, int servers) {
    if (!(mu > 0.0)) fail("multi-server rate must be positive");
    if (servers < 1) fail("multi-server needs at least one server");
    ServiceCurve c;
    c.kind_ = CurveKind::MultiServer;
    c.mu_ = mu;
    c.servers_ = servers;
    return c;
}

ServiceCurve ServiceCurve::infinite_server(double mu) {
    if (!(mu > 0.0)) fail("infinite-server rate must be positive");
    ServiceCurve c;
    c.kind_ = CurveKind::InfiniteServer;
    c.mu_ = mu;
    return c;
}

ServiceCurve ServiceCurve::algebraic(double mu, double xi) {
    if (!(mu > 0.0)) fail("algebraic limit rate must be positive");
    if (!(xi > 1.0)) fail("algebraic order must exceed 1");
    ServiceCurve c;
    c.kind_ = CurveKind::Algebraic;
    c.mu_ = mu;
    c.xi_ = xi;
    return c;
}

ServiceCurve ServiceCurve::tabulated(std::vector<double> rates) {
    if (rates.empty()) fail("tabulated curve needs at least one rate");
    for (double r : rates)
        if (!(r > 0.0)) fail("tabulated rates must be positive");
    ServiceCurve c;
    c.kind_ = CurveKind::Tabulated;
    c.table_ = std::move(rates);
    c.mu_ = c.table_.back();
    return c;
}

double ServiceCurve::rate(long q) const {
    if (q < 1) fail("service rate queried at q < 1");
    switch (kind_) {
        case CurveKind::SingleServer: return mu_;
        case CurveKind::MultiServer: return mu_ * static_cast<double>(std::min<long>(q, servers_));
        case CurveKind::InfiniteServer: return mu_ * static_cast<double>(q);
        case CurveKind::Algebraic: return mu_ * std::exp(-(xi_ - 1.0) / static_cast<double>(q));
        case CurveKind::Tabulated:
            return q <= static_cast<long>(table_.size()) ? table_[q - 1] : table_.back();
    }
    fail("unreachable curve kind");
}

double ServiceCurve::effective_rate() const {
    // The geometric mean of mu(1..q) converges for every supported kind, so
    // the liminf has a closed form.
    switch (kind_) {
        case CurveKind::SingleServer: return mu_;
        case CurveKind::MultiServer: return mu_ * servers_;
        case CurveKind::InfiniteServer: return kInf;
        case CurveKind::Algebraic: return mu_;
        case CurveKind::Tabulated: return table_.back();
    }
    fail("unreachable curve kind");
}

void ClosedNetwork::validate() const {
    if (curves.empty()) fail("network has no queues");
    if (routing.size() != curves.size()) fail("routing size does not match queue count");
    check_routing(routing);
    if (population < 0) fail("population must be nonnegative");
    bool any_finite = std::any_of(curves.begin(), curves.end(),
                                  [](const ServiceCurve& c) { return c.finite_effective_rate(); });
    if (!any_finite) fail("network needs at least one queue with finite effective rate");
}

std::vector<double> invariant_measure(const std::vector<std::vector<double>>& routing) {
    check_routing(routing);
    std::vector<double> pi = routing.size() <= kDenseSolveLimit
                                 ? dense_stationary(routing)
                                 : power_stationary(routing);
    double total = 0.0;
    for (double& v : pi) {
        if (v < 0.0 && v > -1e-12) v = 0.0;
        if (v < 0.0) fail("stationary solve produced a negative component");
        total += v;
    }
    for (double& v : pi) v /= total;
    // pi P = pi residual check; the solve must honor the fixed point.
    const int n = static_cast<int>(routing.size());
    double resid = 0.0;
    for (int j = 0; j < n; ++j) {
        double col = 0.0;
        for (int i = 0; i < n; ++i) col += pi[i] * routing[i][j];
        resid = std::max(resid, std::abs(col - pi[j]));
    }
    if (resid > kPiResidualTol) fail("stationary residual above 1e-10");
    return pi;
}

QueuePartition partition(const ClosedNetwork& net, std::optional<double> lambda) {
    net.validate();
    QueuePartition part;
    part.pi = invariant_measure(net.routing);
    const int n = net.size();
    part.effective_rates.resize(n);
    for (int k = 0; k < n; ++k) {
        part.effective_rates[k] = net.curves[k].effective_rate();
        (net.curves[k].finite_effective_rate() ? part.finite : part.infinite).push_back(k);
    }
    part.lambda0 = kInf;
    for (int k : part.finite)
        part.lambda0 = std::min(part.lambda0, part.effective_rates[k] / part.pi[k]);
    // F0: queues attaining the saturation load, ties within relative 1e-9.
    for (int k : part.finite) {
        double rho_at_sat = part.lambda0 * part.pi[k] / part.effective_rates[k];
        if (rho_at_sat >= 1.0 - kBottleneckTieTol) part.bottleneck.push_back(k);
    }
    if (lambda) {
        if (*lambda < 0.0) fail("lambda must be nonnegative");
        if (*lambda >= part.lambda0) fail("lambda breaks ergodicity (lambda >= lambda0)");
        part.rho0 = *lambda / part.lambda0;
        part.rho.resize(n);
        for (int k = 0; k < n; ++k) {
            // Infinite-server utilization is measured against mu(1).
            double denom = net.curves[k].finite_effective_rate() ? part.effective_rates[k]
                                                                 : net.curves[k].rate(1);
            part.rho[k] = *lambda * part.pi[k] / denom;
        }
    }
    return part;
}

}  // namespace pfnet
