#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "soliton/error.hpp"
#include "soliton/soliton.hpp"

namespace soliton {

struct ConfigIssue {
    std::string field;
    std::string message;
};

class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct RunConfig {
    u64 p = 11;
    int precision = 24;
    nlohmann::json curve;
    int level = 1;
    std::optional<int> weight_cap;
    int window_depth = 6;
    int window_precision = 3;
    int window_rows = 8;
    int log_terms = 2;
    std::vector<int> components{0}; // zero-based
    bool full_torsion = false;
    std::vector<std::string> checks;
};

inline const std::vector<std::string>& check_names()
{
    static const std::vector<std::string> names{"gaps", "hasse-witt", "formal-log", "torsion", "theta"};
    return names;
}

// Precision used when a config omits it; SOLITON_PRECISION overrides the built-in 24.
int default_precision();

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
CurveModel build_curve(const PadicField& K, const nlohmann::json& spec);

nlohmann::json run(const RunConfig& c);
int exit_code(const nlohmann::json& report);
std::string emit(const nlohmann::json& report, const std::string& format);
nlohmann::json strip_timings(nlohmann::json report);
nlohmann::json config_error_report(const ConfigInvalid& e);

} // namespace soliton
