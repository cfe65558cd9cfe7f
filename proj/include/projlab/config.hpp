#pragma once

// Scenario files: one JSON document per scenario. Parsing validates the whole
// document up front and reports problems as "source:line: message".

#include "projlab/operators.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace projlab {

using json = nlohmann::json;

/// Line of every value in a JSON text, keyed by JSON pointer ("" is the root).
class LineIndex {
public:
    LineIndex() = default;
    explicit LineIndex(const std::string& text);

    /// Line of the value at ptr, or of its closest indexed ancestor.
    int line(const std::string& ptr) const;

private:
    std::map<std::string, int> lines_;
};

struct OperatorConfig {
    std::string type; ///< "relaxed", "semi-intrepid" or "generalized-dr"
    int set = -1;     ///< relaxed, semi-intrepid
    int a = -1;       ///< generalized-dr
    int b = -1;
    double lambda = 1.0;
    double mu = 1.0;
    double alpha = 1.0;
    double tau = 0.0;
};

struct ScenarioConfig {
    std::string name;
    int dimension = 0;
    std::uint64_t seed = 0;
    std::vector<SetPtr<double>> sets;
    std::optional<SetPtr<double>> intersection; ///< empty means "oracle"
    Vec anchor;
    double delta = 1.0;
    std::vector<OperatorConfig> operators;
    std::optional<Vec> x0;
    int max_cycles = 10000;
    double tol = 1e-10;
    json analyses = json::object(); ///< normalized: every default filled in
    json expect = json::object();   ///< normalized
    std::string source;

    bool runs() const noexcept { return x0.has_value() && !operators.empty(); }
};

/// Throws Error(Config) with a line-precise message.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

json to_json(const ScenarioConfig& c);
json set_to_json(const SetDescriptor<double>& s);
json vec_to_json(const Vec& v);

CyclicTuple<double> build_cycle(const ScenarioConfig& c);

} // namespace projlab
