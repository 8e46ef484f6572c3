#include "pfnet/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pfnet {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw model_error(msg); }

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail("malformed JSON input");
    return j;
}

ServiceCurve curve_from_json(const json& q) {
    if (!q.is_object() || !q.contains("kind")) fail("queue entry needs a \"kind\"");
    const std::string kind = q.at("kind").get<std::string>();
    const double mu = q.value("mu", 0.0);
    if (kind == "single") return ServiceCurve::single_server(mu);
    if (kind == "multi") return ServiceCurve::multi_server(mu, q.value("c", 0L));
    if (kind == "infinite") return ServiceCurve::infinite_server(mu);
    if (kind == "algebraic") return ServiceCurve::algebraic(mu, q.value("xi", 0.0));
    if (kind == "table") {
        if (!q.contains("table")) fail("table queue needs a \"table\"");
        return ServiceCurve::tabulated(q.at("table").get<std::vector<double>>());
    }
    fail("unknown queue kind \"" + kind + "\"");
}

json curve_to_json(const ServiceCurve& c) {
    json q;
    switch (c.kind()) {
        case CurveKind::SingleServer:
            q = {{"kind", "single"}, {"mu", c.base_mu()}};
            break;
        case CurveKind::MultiServer:
            q = {{"kind", "multi"}, {"mu", c.base_mu()}, {"c", c.servers()}};
            break;
        case CurveKind::InfiniteServer:
            q = {{"kind", "infinite"}, {"mu", c.base_mu()}};
            break;
        case CurveKind::Algebraic:
            q = {{"kind", "algebraic"}, {"mu", c.base_mu()}, {"xi", c.xi()}};
            break;
        case CurveKind::Tabulated:
            q = {{"kind", "table"}, {"table", c.table()}};
            break;
    }
    return q;
}

PopulationRule rule_from_json(const json& j) {
    if (!j.is_object() || !j.contains("coeff") || !j.contains("base"))
        fail("population rule needs \"coeff\" and \"base\"");
    PopulationRule rule;
    rule.coeff = j.at("coeff").get<double>();
    const std::string base = j.at("base").get<std::string>();
    if (base == "m0") rule.base = PopulationRule::Base::M0;
    else if (base == "n") rule.base = PopulationRule::Base::Index;
    else if (base == "const") rule.base = PopulationRule::Base::Const;
    else fail("population rule base must be \"m0\", \"n\", or \"const\"");
    return rule;
}

LoadMeasure measure_from_json(const json& j) {
    if (!j.is_array()) fail("load_measure must be an array of [r, w] pairs");
    LoadMeasure m;
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 2) fail("load_measure atoms are [r, w] pairs");
        m.atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    m.validate();
    return m;
}

}  // namespace

ClosedNetwork network_from_json_text(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) fail("model file must hold a JSON object");
    ClosedNetwork net;
    if (!j.contains("queues") || !j.at("queues").is_array()) fail("model needs a \"queues\" array");
    for (const auto& q : j.at("queues")) net.curves.push_back(curve_from_json(q));
    if (!j.contains("routing")) fail("model needs a \"routing\" matrix");
    net.routing = j.at("routing").get<std::vector<std::vector<double>>>();
    net.population = j.value("population", 0L);
    if (j.contains("n") && j.at("n").get<int>() != net.size())
        fail("\"n\" disagrees with the number of queues");
    net.validate();
    return net;
}

ClosedNetwork load_network(const std::string& path) {
    return network_from_json_text(read_file(path));
}

std::string network_to_json_text(const ClosedNetwork& net) {
    json j;
    j["n"] = net.size();
    j["population"] = net.population;
    j["routing"] = net.routing;
    j["queues"] = json::array();
    for (const auto& c : net.curves) j["queues"].push_back(curve_to_json(c));
    return j.dump(2) + "\n";
}

void dump_network(const ClosedNetwork& net, const std::string& path) {
    write_file(path, network_to_json_text(net));
}

NetworkFamily family_from_json_text(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("family")) fail("family file needs a \"family\" field");
    const std::string family = j.at("family").get<std::string>();
    if (!j.contains("population")) fail("family file needs a \"population\" rule");
    const PopulationRule rule = rule_from_json(j.at("population"));
    if (family == "replicate") {
        std::vector<ServiceCurve> fixed, repeated;
        if (j.contains("fixed"))
            for (const auto& q : j.at("fixed")) fixed.push_back(curve_from_json(q));
        if (!j.contains("repeated")) fail("replicate family needs a \"repeated\" block");
        for (const auto& q : j.at("repeated")) repeated.push_back(curve_from_json(q));
        return build_replicate(std::move(fixed), std::move(repeated),
                               j.value("indices", std::vector<int>{}), rule);
    }
    if (family == "tandem") {
        if (!j.contains("sizes")) fail("tandem family needs \"sizes\"");
        std::vector<std::pair<int, int>> sl;
        for (const auto& p : j.at("sizes")) {
            if (!p.is_array() || p.size() != 2) fail("tandem sizes are [s, l] pairs");
            sl.emplace_back(p[0].get<int>(), p[1].get<int>());
        }
        return build_tandem_family(j.value("f", 0.0), std::move(sl), rule);
    }
    if (family == "jackson") {
        if (!j.contains("load_measure")) fail("jackson family needs a \"load_measure\"");
        return build_jackson(measure_from_json(j.at("load_measure")),
                             j.value("indices", std::vector<int>{}), rule);
    }
    fail("unknown family \"" + family + "\"");
}

NetworkFamily load_family(const std::string& path) {
    return family_from_json_text(read_file(path));
}

AppSpec app_spec_from_json_text(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("preset")) fail("app file needs a \"preset\" field");
    const std::string preset = j.at("preset").get<std::string>();
    AppSpec spec;
    spec.population = j.value("population", 0L);
    if (preset == "jackson") {
        spec.kind = AppSpec::Kind::Jackson;
        const json& b = j.at("jackson");
        spec.measure = measure_from_json(b.at("load_measure"));
        spec.jackson_n = b.value("n", 0);
        return spec;
    }
    if (preset == "tandem") {
        spec.kind = AppSpec::Kind::Tandem;
        const json& b = j.at("tandem");
        spec.tandem_s = b.value("s", 0);
        spec.tandem_l = b.value("l", 0);
        spec.tandem_f = b.value("f", 0.0);
        return spec;
    }
    if (preset == "vehicle") {
        spec.kind = AppSpec::Kind::Vehicle;
        const json& b = j.at("vehicle");
        spec.vehicle.station_mu = b.at("station_mu").get<std::vector<double>>();
        spec.vehicle.route = b.at("route").get<std::vector<std::vector<double>>>();
        spec.vehicle.travel_mu = b.at("travel_mu").get<std::vector<std::vector<double>>>();
        spec.vehicle.fleet = b.value("fleet", 0L);
        spec.vehicle.validate();
        return spec;
    }
    fail("unknown preset \"" + preset + "\"");
}

AppSpec load_app_spec(const std::string& path) {
    return app_spec_from_json_text(read_file(path));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open \"" + path + "\"");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write \"" + path + "\"");
    out << content;
}

}  // namespace pfnet
