// scenario.hpp - strict JSON scenario description for the command-line driver

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tclk/bath.hpp"
#include "tclk/operators.hpp"

namespace tclk::cli {

/// Parse or validation failure; `location` is a JSON path such as "bath.modes[0].omega".
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string location, const std::string& message);
    const std::string& location() const { return location_; }

private:
    std::string location_;
};

inline const std::vector<std::string>& known_runs()
{
    static const std::vector<std::string> runs{"unitary", "tcl2", "lindblad", "kraus", "dephasing", "oracle"};
    return runs;
}

struct TimeGrid {
    double t_max{0.0};
    int n_points{0};
};

struct Gate {
    std::string metric;
    double max{0.0};
};

struct ScenarioTolerances {
    double integrator{1e-10};
    double quadrature_rel{1e-10};
    double quadrature_abs{1e-14};
    std::optional<double> cp;
};

struct Scenario {
    std::string name;
    Matrix hamiltonian;
    std::vector<Matrix> generators;
    bath::BathCorrelation bath;
    std::optional<bath::Discrete> modes;   // discrete spectrum shared by every generator
    std::optional<Matrix> lindblad_rates;  // explicit rates for non-markovian baths
    std::optional<int> oracle_n_max;
    TimeGrid grid;
    Matrix initial_state;
    std::vector<std::string> runs;
    ScenarioTolerances tolerances;
    std::vector<Gate> gates;
    std::string output_dir;
};

/// Named matrices: "qubit_sigmaz(e0)", "sigma_x", "sigma_y", "sigma_z", "identity(d)".
Matrix operator_preset(const std::string& name);
/// Named states: "plus", "minus", "zero", "one", "maximally_mixed".
Matrix state_preset(const std::string& name);

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace tclk::cli
