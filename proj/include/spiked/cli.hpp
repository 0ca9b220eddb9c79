#ifndef SPIKED_CLI_HPP
#define SPIKED_CLI_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spiked/models.hpp"
#include "spiked/statistic.hpp"

namespace spiked::cli {

using nlohmann::json;

/// Invalid or inconsistent configuration: exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Failure inside the numerical engine: exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "3.0:2,1.5:1" -> spike list.
std::vector<Spike> parse_spikes(const std::string& text);

/// "x" | "x2" | "log" | "exp:t" | "poly:c0,c1,..."
LinearStatistic parse_statistic(const std::string& text);

SpikedModel model_from_config(const json& cfg);
LinearStatistic statistic_from_config(const json& cfg);

/// Schema validation: known keys only, types checked.  Throws ConfigError.
void validate_config(const json& cfg, const std::string& command);

/// Serialization with every floating-point number at 17 significant digits.
std::string dump_json17(const json& doc);
/// Flat "field,value" CSV carrying the same numbers as the JSON emission.
std::string dump_csv17(const json& doc);

json cmd_clt(const json& cfg);
json cmd_simulate(const json& cfg);
json cmd_hypgeom(const json& cfg);
json cmd_density_check(const json& cfg);
json cmd_selftest();

/// Full command-line entry point; returns the process exit code
/// (0 success, 2 config error, 3 numerical failure).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spiked::cli

#endif
