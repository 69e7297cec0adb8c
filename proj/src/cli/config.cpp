#include <cmath>
#include <fstream>
#include <sstream>

#include "cph/cli.hpp"
#include "cph/error.hpp"
#include "json.hpp"

namespace cph::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::ConfigError, what); }

Eigen::MatrixXd matrix_from(const json& j, const char* name) {
    if (!j.contains(name)) bad(std::string("missing field '") + name + "'");
    const json& a = j.at(name);
    if (!a.is_array() || a.empty()) bad(std::string("'") + name + "' must be a non-empty array of rows");
    const size_t n = a.size();
    Eigen::MatrixXd m(n, n);
    for (size_t i = 0; i < n; ++i) {
        if (!a[i].is_array() || a[i].size() != n) bad(std::string("'") + name + "' must be square");
        for (size_t k = 0; k < n; ++k) {
            if (!a[i][k].is_number()) bad(std::string("'") + name + "' has a non-numeric entry");
            m(static_cast<int>(i), static_cast<int>(k)) = a[i][k].get<double>();
        }
    }
    return m;
}

Poly poly_from(const json& j, const char* name, const char* where) {
    if (!j.contains(name) || !j.at(name).is_array() || j.at(name).empty())
        bad(std::string(where) + " needs a coefficient array '" + name + "'");
    std::vector<double> c;
    for (const auto& v : j.at(name)) {
        if (!v.is_number()) bad(std::string(where) + "." + name + " has a non-numeric entry");
        c.push_back(v.get<double>());
    }
    return Poly::from_real(c);
}

}  // namespace

ModelConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) bad("top level must be an object");
    const Eigen::MatrixXd d1 = matrix_from(j, "d1"), d2 = matrix_from(j, "d2");
    if (d1.rows() != d2.rows()) bad("'d1' and 'd2' must have the same size");
    if (!j.contains("service") || !j.at("service").is_object()) bad("missing object 'service'");
    const json& s = j.at("service");
    if (!s.contains("phase") || !s.at("phase").is_object()) bad("missing object 'service.phase'");
    const RationalLst phase(poly_from(s.at("phase"), "q", "service.phase"), poly_from(s.at("phase"), "p", "service.phase"));

    HeavyTailFamily heavy = HeavyTailFamily::rational(phase);
    if (s.contains("heavy")) {
        const json& h = s.at("heavy");
        if (!h.is_object() || !h.contains("family") || !h.at("family").is_string())
            bad("'service.heavy' needs a string 'family'");
        const std::string fam = h.at("family").get<std::string>();
        if (fam == "phase") {
            heavy = HeavyTailFamily::rational(
                RationalLst(poly_from(h, "q", "service.heavy"), poly_from(h, "p", "service.heavy")));
        } else {
            if (!h.contains("kappa") || !h.at("kappa").is_number()) bad("'service.heavy' needs a numeric 'kappa'");
            heavy = heavy_family(fam, h.at("kappa").get<double>());
        }
    }
    double eps = 0.0;
    if (s.contains("epsilon")) {
        if (!s.at("epsilon").is_number()) bad("'service.epsilon' must be a number");
        eps = s.at("epsilon").get<double>();
    }
    if (!(eps >= 0.0 && eps < 1.0)) bad("'service.epsilon' must lie in [0, 1)");
    return {build_map(d1, d2), ServiceMixture{phase, heavy, eps}};
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open model file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ModelConfig figure_config(double kappa, double epsilon) {
    Eigen::VectorXd lambda(2);
    lambda << 7.0, 0.5;
    Eigen::MatrixXd p(2, 2);
    p << 8.0 / 9.0, 1.0 / 9.0, 0.97, 0.03;
    return {build_mmpp(lambda, p),
            ServiceMixture{RationalLst::exponential(3.0), HeavyTailFamily::abate_whitt(kappa), epsilon}};
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() < 3 || parts.size() > 4) bad("grid must look like MIN:MAX:N[:log|:lin]");
    double lo = 0.0, hi = 0.0;
    long count = 0;
    try {
        size_t used = 0;
        lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("min");
        hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("max");
        count = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("count");
    } catch (const std::exception&) {
        bad("grid '" + text + "' has a non-numeric field");
    }
    const bool log = parts.size() == 4 && parts[3] == "log";
    if (parts.size() == 4 && parts[3] != "log" && parts[3] != "lin") bad("grid scale must be 'log' or 'lin'");
    if (count < 1) bad("grid needs at least one point");
    if (lo < 0.0 || (count > 1 && !(hi > lo)) || (log && !(lo > 0.0))) bad("grid bounds are invalid");
    std::vector<double> g;
    for (long k = 0; k < count; ++k) {
        const double f = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        g.push_back(log ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
    }
    if (count > 1) g.back() = hi;
    return g;
}

std::vector<double> figure_grid() { return parse_grid("0.01:50:200:log"); }

}  // namespace cph::cli
