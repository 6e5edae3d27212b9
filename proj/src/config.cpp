#include "alefv/config.hpp"

#include <fstream>

#include <fmt/format.h>

namespace alefv {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> splitKv(const std::string& line,
                                            const std::string& where) {
    auto eq = line.find('=');
    if (eq == std::string::npos)
        throw SolverError(SolverError::Kind::Config,
                          fmt::format("{}: expected key=value, got '{}'", where, line));
    std::string k = trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));
    if (k.empty())
        throw SolverError(SolverError::Kind::Config,
                          fmt::format("{}: empty key in '{}'", where, line));
    return {k, v};
}

}  // namespace

std::map<std::string, std::string> parseConfigFile(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw SolverError(SolverError::Kind::Config,
                          fmt::format("cannot open config '{}'", path));
    std::map<std::string, std::string> kv;
    std::string line;
    int lineNo = 0;
    while (std::getline(f, line)) {
        ++lineNo;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto [k, v] = splitKv(line, fmt::format("{}:{}", path, lineNo));
        kv[k] = v;
    }
    return kv;
}

void applyOverrides(std::map<std::string, std::string>& kv,
                    const std::vector<std::string>& overrides) {
    for (const std::string& o : overrides) {
        auto [k, v] = splitKv(o, "--override");
        kv[k] = v;
    }
}

RunConfig toRunConfig(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    auto asInt = [](const std::string& k, const std::string& v) {
        try {
            return std::stoi(v);
        } catch (const std::exception&) {
            throw SolverError(SolverError::Kind::Config,
                              fmt::format("key '{}': '{}' is not an integer", k, v));
        }
    };
    auto asDouble = [](const std::string& k, const std::string& v) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw SolverError(SolverError::Kind::Config,
                              fmt::format("key '{}': '{}' is not a number", k, v));
        }
    };
    auto asBool = [](const std::string& k, const std::string& v) {
        if (v == "on" || v == "true" || v == "1") return 1;
        if (v == "off" || v == "false" || v == "0") return 0;
        throw SolverError(SolverError::Kind::Config,
                          fmt::format("key '{}': '{}' is not a boolean", k, v));
    };
    for (const auto& [k, v] : kv) {
        if (k == "case")
            cfg.caseName = v;
        else if (k == "order")
            cfg.order = asInt(k, v);
        else if (k == "flux")
            cfg.fluxMode = v;
        else if (k == "cfl")
            cfg.cfl = asDouble(k, v);
        else if (k == "mesh")
            cfg.meshRes = asInt(k, v);
        else if (k == "tfinal")
            cfg.tFinal = asDouble(k, v);
        else if (k == "rezone")
            cfg.rezone = asBool(k, v);
        else if (k == "motion")
            cfg.motion = v;
        else if (k == "outdir")
            cfg.outDir = v;
        else if (k == "snapshot_every")
            cfg.snapshotEvery = asInt(k, v);
        else if (k == "max_steps")
            cfg.maxSteps = asInt(k, v);
        else
            throw SolverError(SolverError::Kind::Config,
                              fmt::format("unknown config key '{}'", k));
    }
    if (cfg.caseName.empty())
        throw SolverError(SolverError::Kind::Config, "missing required key 'case'");
    return cfg;
}

}  // namespace alefv
