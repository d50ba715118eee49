#include "gtfdi/config.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gtfdi/util.hpp"

namespace gtfdi {

namespace {

std::map<std::string, std::function<double&(EngineParams&)>> field_map() {
    return {
        {"R", [](EngineParams& p) -> double& { return p.R; }},
        {"V1", [](EngineParams& p) -> double& { return p.V1; }},
        {"V2", [](EngineParams& p) -> double& { return p.V2; }},
        {"I", [](EngineParams& p) -> double& { return p.I; }},
        {"gamma", [](EngineParams& p) -> double& { return p.gamma; }},
        {"cp", [](EngineParams& p) -> double& { return p.cp; }},
        {"LHV", [](EngineParams& p) -> double& { return p.LHV; }},
        {"sigma_cc", [](EngineParams& p) -> double& { return p.sigma_cc; }},
        {"m_ref", [](EngineParams& p) -> double& { return p.m_ref; }},
        {"P1", [](EngineParams& p) -> double& { return p.P1; }},
        {"T1", [](EngineParams& p) -> double& { return p.T1; }},
        {"eta_c", [](EngineParams& p) -> double& { return p.eta_c; }},
        {"eta_t", [](EngineParams& p) -> double& { return p.eta_t; }},
        {"eta_cc", [](EngineParams& p) -> double& { return p.eta_cc; }},
        {"N_ref", [](EngineParams& p) -> double& { return p.N_ref; }},
        {"flow_droop", [](EngineParams& p) -> double& { return p.flow_droop; }},
        {"turbine_flow_k", [](EngineParams& p) -> double& { return p.turbine_flow_k; }},
        {"nozzle_area", [](EngineParams& p) -> double& { return p.nozzle_area; }},
        {"fuel_density", [](EngineParams& p) -> double& { return p.fuel_density; }},
    };
}

}  // namespace

EngineParams params_from_kv(const std::string& text) {
    EngineParams params;
    auto fields = field_map();
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("params line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(s.substr(0, eq));
        const auto it = fields.find(key);
        if (it == fields.end())
            throw std::invalid_argument("params line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        it->second(params) = parse_double(s.substr(eq + 1));
    }
    params.validate();
    return params;
}

std::string params_to_kv(const EngineParams& params) {
    std::ostringstream os;
    EngineParams copy = params;
    for (auto& [key, get] : field_map()) os << key << "=" << get(copy) << "\n";
    return os.str();
}

EngineParams load_params(const std::string& path) { return params_from_kv(read_file(path)); }

}  // namespace gtfdi
