#include <fstream>
#include <sstream>

#include "hodn/cbc.hpp"
#include "json.hpp"

namespace hodn {

using nlohmann::ordered_json;

std::string result_to_json(const ConstructionResult& r, bool provenance, int indent) {
    ordered_json j;
    j["b"] = r.b;
    j["m"] = r.m;
    j["s"] = r.s;
    j["alpha"] = r.alpha;
    j["d"] = r.d;
    j["p"] = r.p.encoding();
    j["p_text"] = r.p.to_string();
    ordered_json q = ordered_json::array();
    for (const auto& g : r.q) q.push_back(g.encoding());
    j["q"] = q;
    j["weights"] = {{"spec", r.weights}, {"values", r.weight_values}};
    j["B_trace"] = r.B_trace;
    j["B_final"] = r.B_final;
    j["bound"] = {{"lambda", r.lambda}, {"value", r.bound}, {"trace", r.bound_trace}};
    j["mode"] = r.mode;
    if (provenance) {
        j["provenance"] = {{"tool", "hodn"},
                           {"version", "1.0.0"},
                           {"compiler", __VERSION__}};
#if defined(__SIZEOF_FLOAT128__) && !defined(HODN_NO_FLOAT128)
        j["provenance"]["extended_precision_bits"] = 113;
#else
        j["provenance"]["extended_precision_bits"] = std::numeric_limits<long double>::digits;
#endif
    }
    return j.dump(indent);
}

ConstructionResult result_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw malformed_input(std::string("construction file is not valid JSON: ") + e.what());
    }
    try {
        ConstructionResult r;
        r.b = j.at("b").get<int>();
        r.m = j.at("m").get<int>();
        r.s = j.at("s").get<int>();
        r.alpha = j.at("alpha").get<int>();
        r.d = j.at("d").get<int>();
        r.p = GFPoly::from_encoding(r.b, j.at("p").get<std::uint64_t>());
        for (auto& v : j.at("q")) r.q.push_back(GFPoly::from_encoding(r.b, v.get<std::uint64_t>()));
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            if (w.is_object()) {
                r.weights = w.value("spec", std::string{});
                if (w.contains("values")) r.weight_values = w.at("values").get<std::vector<double>>();
            } else if (w.is_string()) {
                r.weights = w.get<std::string>();
            }
        }
        if (j.contains("B_trace")) r.B_trace = j.at("B_trace").get<std::vector<double>>();
        if (j.contains("B_final")) r.B_final = j.at("B_final").get<double>();
        if (j.contains("bound")) {
            r.lambda = j.at("bound").value("lambda", 1.0);
            r.bound = j.at("bound").value("value", 0.0);
            if (j.at("bound").contains("trace")) r.bound_trace = j.at("bound").at("trace").get<std::vector<double>>();
        }
        r.mode = j.value("mode", std::string{});
        if (int(r.q.size()) != r.d * r.s) throw malformed_input("construction file lists " + std::to_string(r.q.size()) + " generators, expected d*s");
        if (r.p.degree() != r.m) throw malformed_input("construction file modulus degree differs from m");
        for (const auto& g : r.q)
            if (g.degree() >= r.m) throw malformed_input("construction file generator of degree >= m");
        return r;
    } catch (const malformed_input&) {
        throw;
    } catch (const std::exception& e) {
        throw malformed_input(std::string("bad construction file: ") + e.what());
    }
}

ConstructionResult load_result(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw malformed_input("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return result_from_json(ss.str());
}

}  // namespace hodn
