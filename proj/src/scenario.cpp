// scenario.cpp - strict JSON scenario parsing

#include "tclk/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>

#include "tclk/serialization.hpp"

namespace tclk::cli {

using nlohmann::json;

ScenarioError::ScenarioError(std::string location, const std::string& message)
    : std::runtime_error(location.empty() ? message : location + ": " + message),
      location_(std::move(location))
{
}

namespace {

std::string join(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ScenarioError(where, "expected an object");
    for (const auto& item : j.items()) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                    [&](const char* a) { return item.key() == a; });
        if (!ok) throw ScenarioError(join(where, item.key()), "unknown field");
    }
}

const json& require(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) throw ScenarioError(join(where, key), "missing required field");
    return j.at(key);
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw ScenarioError(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ScenarioError(where, "expected a finite number");
    return v;
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) throw ScenarioError(where, "expected an integer");
    return j.get<int>();
}

std::string text(const json& j, const std::string& where)
{
    if (!j.is_string()) throw ScenarioError(where, "expected a string");
    return j.get<std::string>();
}

Complex complex_value(const json& j, const std::string& where)
{
    if (j.is_number()) return {number(j, where), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], index(where, 0)), number(j[1], index(where, 1))};
    throw ScenarioError(where, "expected a number or [re, im]");
}

Matrix matrix_value(const json& j, const std::string& where, bool state)
{
    if (j.is_string()) {
        try {
            return state ? state_preset(j.get<std::string>()) : operator_preset(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(where, e.what());
        }
    }
    try {
        return matrix_from_json(j);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(where, e.what());
    }
}

void check_hermitian(const Matrix& m, const std::string& where)
{
    if (m.rows() != m.cols() || m.rows() == 0) throw ScenarioError(where, "matrix must be square");
    if (!ops::all_finite(m)) throw ScenarioError(where, "matrix has non-finite entries");
    if (ops::hermiticity_deviation(m) > 1e-12 * std::max(1.0, ops::max_abs(m))) {
        throw ScenarioError(where, "matrix must be Hermitian");
    }
}

double temperature_of(const json& j, const std::string& where)
{
    if (!j.contains("temperature")) return 0.0;
    const double t = number(j.at("temperature"), join(where, "temperature"));
    if (t < 0.0) throw ScenarioError(join(where, "temperature"), "must be >= 0");
    return t;
}

void parse_bath(const json& j, const std::string& where, Scenario& s)
{
    const std::string model = text(require(j, "model", where), join(where, "model"));
    const int n_gen = static_cast<int>(s.generators.size());
    try {
        if (model == "discrete") {
            reject_unknown(j, where, {"model", "temperature", "modes"});
            bath::Discrete spectrum;
            spectrum.temperature = temperature_of(j, where);
            const json& modes = require(j, "modes", where);
            const std::string mw = join(where, "modes");
            if (!modes.is_array() || modes.empty()) throw ScenarioError(mw, "expected a non-empty array");
            for (std::size_t i = 0; i < modes.size(); ++i) {
                const std::string w = index(mw, i);
                reject_unknown(modes[i], w, {"omega", "g"});
                bath::BosonMode m;
                m.omega = number(require(modes[i], "omega", w), join(w, "omega"));
                if (!(m.omega > 0.0)) throw ScenarioError(join(w, "omega"), "must be > 0");
                m.g = complex_value(require(modes[i], "g", w), join(w, "g"));
                spectrum.modes.push_back(m);
            }
            s.bath = bath::BathCorrelation::discrete(spectrum, n_gen);
            s.modes = spectrum;
        } else if (model == "ohmic") {
            reject_unknown(j, where, {"model", "temperature", "eta", "cutoff"});
            bath::Ohmic o;
            o.eta = number(require(j, "eta", where), join(where, "eta"));
            o.cutoff = number(require(j, "cutoff", where), join(where, "cutoff"));
            o.temperature = temperature_of(j, where);
            s.bath = bath::BathCorrelation::ohmic(o, n_gen);
        } else if (model == "markovian") {
            reject_unknown(j, where, {"model", "gamma"});
            const json& g = require(j, "gamma", where);
            Matrix gamma;
            if (g.is_number()) {
                gamma = number(g, join(where, "gamma")) * Matrix::Identity(n_gen, n_gen);
            } else {
                gamma = matrix_value(g, join(where, "gamma"), false);
            }
            if (gamma.rows() != n_gen || gamma.cols() != n_gen) {
                throw ScenarioError(join(where, "gamma"), "rate matrix must match the generator count");
            }
            s.bath = bath::BathCorrelation::markovian(gamma);
        } else {
            throw ScenarioError(join(where, "model"), "unknown model '" + model + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(where, e.what());
    }
}

} // namespace

Matrix operator_preset(const std::string& name)
{
    static const std::regex qubit(R"(qubit_sigmaz\(\s*([-+0-9.eE]+)\s*\))");
    static const std::regex ident(R"(identity\(\s*([0-9]+)\s*\))");
    std::smatch m;
    if (std::regex_match(name, m, qubit)) {
        std::size_t used = 0;
        const double e0 = std::stod(m[1].str(), &used);
        if (used != m[1].str().size() || !std::isfinite(e0)) {
            throw std::invalid_argument("malformed splitting in '" + name + "'");
        }
        return 0.5 * e0 * ops::pauli_z();
    }
    if (std::regex_match(name, m, ident)) {
        const int d = std::stoi(m[1].str());
        if (d < 1) throw std::invalid_argument("identity dimension must be >= 1");
        return Matrix::Identity(d, d);
    }
    if (name == "sigma_x") return ops::pauli_x();
    if (name == "sigma_y") return ops::pauli_y();
    if (name == "sigma_z") return ops::pauli_z();
    throw std::invalid_argument("unknown operator preset '" + name + "'");
}

Matrix state_preset(const std::string& name)
{
    Matrix out = Matrix::Zero(2, 2);
    if (name == "zero") {
        out(0, 0) = 1.0;
    } else if (name == "one") {
        out(1, 1) = 1.0;
    } else if (name == "plus" || name == "minus") {
        out.setConstant(0.5);
        if (name == "minus") out(0, 1) = out(1, 0) = -0.5;
    } else if (name == "maximally_mixed") {
        out(0, 0) = out(1, 1) = 0.5;
    } else {
        throw std::invalid_argument("unknown state preset '" + name + "'");
    }
    return out;
}

Scenario parse_scenario(const json& j)
{
    reject_unknown(j, "", {"name", "system", "generators", "bath", "lindblad_rates", "oracle", "time",
                          "initial_state", "runs", "tolerances", "gates", "output_dir"});
    Scenario s;
    s.name = j.contains("name") ? text(j.at("name"), "name") : std::string("scenario");

    const json& sys = require(j, "system", "");
    reject_unknown(sys, "system", {"dim", "hamiltonian"});
    s.hamiltonian = matrix_value(require(sys, "hamiltonian", "system"), "system.hamiltonian", false);
    check_hermitian(s.hamiltonian, "system.hamiltonian");
    const int d = static_cast<int>(s.hamiltonian.rows());
    if (sys.contains("dim") && integer(sys.at("dim"), "system.dim") != d) {
        throw ScenarioError("system.dim", "does not match the Hamiltonian");
    }

    const json& gens = require(j, "generators", "");
    if (!gens.is_array() || gens.empty()) throw ScenarioError("generators", "expected a non-empty array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        Matrix g = matrix_value(gens[i], index("generators", i), false);
        check_hermitian(g, index("generators", i));
        if (g.rows() != d) throw ScenarioError(index("generators", i), "dimension does not match H_s");
        s.generators.push_back(std::move(g));
    }

    parse_bath(require(j, "bath", ""), "bath", s);

    if (j.contains("lindblad_rates")) {
        const json& r = j.at("lindblad_rates");
        const int n = static_cast<int>(s.generators.size());
        s.lindblad_rates = r.is_number() ? Matrix(number(r, "lindblad_rates") * Matrix::Identity(n, n))
                                         : matrix_value(r, "lindblad_rates", false);
        if (s.lindblad_rates->rows() != n || s.lindblad_rates->cols() != n) {
            throw ScenarioError("lindblad_rates", "rate matrix must match the generator count");
        }
    }

    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        reject_unknown(o, "oracle", {"n_max"});
        s.oracle_n_max = integer(require(o, "n_max", "oracle"), "oracle.n_max");
        if (*s.oracle_n_max < 1) throw ScenarioError("oracle.n_max", "must be >= 1");
    }

    const json& time = require(j, "time", "");
    reject_unknown(time, "time", {"t_max", "n_points"});
    s.grid.t_max = number(require(time, "t_max", "time"), "time.t_max");
    s.grid.n_points = integer(require(time, "n_points", "time"), "time.n_points");
    if (!(s.grid.t_max > 0.0)) throw ScenarioError("time.t_max", "must be > 0");
    if (s.grid.n_points < 2) throw ScenarioError("time.n_points", "must be >= 2");

    s.initial_state = matrix_value(require(j, "initial_state", ""), "initial_state", true);
    if (s.initial_state.rows() != d || s.initial_state.cols() != d) {
        throw ScenarioError("initial_state", "dimension does not match H_s");
    }
    try {
        DensityOperator check(s.initial_state);
    } catch (const std::exception& e) {
        throw ScenarioError("initial_state", e.what());
    }

    const json& runs = require(j, "runs", "");
    if (!runs.is_array() || runs.empty()) throw ScenarioError("runs", "expected a non-empty array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string r = text(runs[i], index("runs", i));
        const auto& known = known_runs();
        if (std::find(known.begin(), known.end(), r) == known.end()) {
            throw ScenarioError(index("runs", i), "unknown run '" + r + "'");
        }
        if (!seen.insert(r).second) throw ScenarioError(index("runs", i), "duplicate run '" + r + "'");
    }
    // Keep a fixed order so artifacts do not depend on how the list was written.
    for (const std::string& r : known_runs()) {
        if (seen.count(r)) s.runs.push_back(r);
    }
    if (seen.count("lindblad") && !s.bath.is_markovian() && !s.lindblad_rates) {
        throw ScenarioError("lindblad_rates", "required for a lindblad run on a non-markovian bath");
    }
    if (seen.count("oracle")) {
        if (!s.modes) throw ScenarioError("bath.model", "the oracle run needs a discrete bath");
        if (!s.oracle_n_max) throw ScenarioError("oracle.n_max", "required for the oracle run");
    }
    if (seen.count("dephasing")) {
        const bool qubit = d == 2 && s.generators.size() == 1 &&
                           ops::max_abs(s.generators[0] - ops::pauli_z()) == 0.0 &&
                           s.hamiltonian(0, 1) == Complex{} && s.hamiltonian(1, 0) == Complex{};
        if (!qubit) {
            throw ScenarioError("runs", "the dephasing run needs a qubit with diagonal H_s and v = sigma_z");
        }
    }

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        reject_unknown(t, "tolerances", {"integrator", "quadrature_rel", "quadrature_abs", "cp"});
        auto positive = [&](const char* key, double& dst) {
            if (!t.contains(key)) return;
            const std::string w = join("tolerances", key);
            dst = number(t.at(key), w);
            if (!(dst > 0.0)) throw ScenarioError(w, "must be > 0");
        };
        positive("integrator", s.tolerances.integrator);
        positive("quadrature_rel", s.tolerances.quadrature_rel);
        positive("quadrature_abs", s.tolerances.quadrature_abs);
        if (t.contains("cp")) {
            double cp = 0.0;
            positive("cp", cp);
            s.tolerances.cp = cp;
        }
    }

    if (j.contains("gates")) {
        const json& g = j.at("gates");
        if (!g.is_array()) throw ScenarioError("gates", "expected an array");
        for (std::size_t i = 0; i < g.size(); ++i) {
            const std::string w = index("gates", i);
            reject_unknown(g[i], w, {"metric", "max"});
            Gate gate;
            gate.metric = text(require(g[i], "metric", w), join(w, "metric"));
            gate.max = number(require(g[i], "max", w), join(w, "max"));
            s.gates.push_back(std::move(gate));
        }
    }

    s.output_dir = j.contains("output_dir") ? text(j.at("output_dir"), "output_dir") : "out/" + s.name;
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError("", "cannot open scenario file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("byte " + std::to_string(e.byte), e.what());
    }
    return parse_scenario(j);
}

} // namespace tclk::cli
