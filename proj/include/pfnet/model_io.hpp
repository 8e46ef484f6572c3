#pragma once

#include <string>

#include "pfnet/apps.hpp"

namespace pfnet {

// Network schema:
// {"n": int, "population": int, "routing": [[...]],
//  "queues": [{"kind": "single|multi|infinite|algebraic|table",
//              "mu": num, "c": int?, "xi": num?, "table": [num]?}]}
ClosedNetwork network_from_json_text(const std::string& text);
ClosedNetwork load_network(const std::string& path);
std::string network_to_json_text(const ClosedNetwork& net);
void dump_network(const ClosedNetwork& net, const std::string& path);

// Family schema:
// {"family": "replicate", "fixed": [queue...], "repeated": [queue...],
//  "indices": [...], "population": {"coeff": num, "base": "m0"|"n"|"const"}}
// {"family": "tandem", "f": num, "sizes": [[s, l], ...], "population": {...}}
// {"family": "jackson", "load_measure": [[r, w], ...], "indices": [...],
//  "population": {...}}
NetworkFamily family_from_json_text(const std::string& text);
NetworkFamily load_family(const std::string& path);

// Application preset schema:
// {"preset": "jackson", "jackson": {"load_measure": [[r, w], ...], "n": int},
//  "population": int}
// {"preset": "tandem", "tandem": {"s": int, "l": int, "f": num},
//  "population": int}
// {"preset": "vehicle", "vehicle": {"station_mu": [...], "route": [[...]],
//  "travel_mu": [[...]], "fleet": int}}
struct AppSpec {
    enum class Kind { Jackson, Tandem, Vehicle };
    Kind kind = Kind::Jackson;
    long population = 0;
    LoadMeasure measure;  // jackson
    int jackson_n = 0;
    int tandem_s = 0, tandem_l = 0;
    double tandem_f = 0.0;
    VehicleNetwork vehicle;
};
AppSpec app_spec_from_json_text(const std::string& text);
AppSpec load_app_spec(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace pfnet
