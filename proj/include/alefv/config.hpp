#ifndef ALEFV_CONFIG_HPP
#define ALEFV_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "alefv/cases.hpp"

namespace alefv {

// Flat key=value configuration ('#' comments, blank lines ignored).
std::map<std::string, std::string> parseConfigFile(const std::string& path);

// Applies "key=value" override strings on top of the file values.
void applyOverrides(std::map<std::string, std::string>& kv,
                    const std::vector<std::string>& overrides);

// Validates keys and converts to a RunConfig.  Throws SolverError{Config}
// for unknown keys or malformed values.
RunConfig toRunConfig(const std::map<std::string, std::string>& kv);

}  // namespace alefv

#endif
