// runner.cpp - scenario execution, comparison report and artifacts

#include "tclk/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tclk/dephasing.hpp"
#include "tclk/kraus.hpp"
#include "tclk/oracle.hpp"
#include "tclk/tcl.hpp"

namespace tclk::cli {

using nlohmann::json;

double trace_distance(const Matrix& rho1, const Matrix& rho2)
{
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols() || rho1.rows() != rho1.cols()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const double scale = std::max({1.0, ops::max_abs(rho1), ops::max_abs(rho2)});
    if (ops::hermiticity_deviation(rho1) > 1e-8 * scale || ops::hermiticity_deviation(rho2) > 1e-8 * scale) {
        throw std::invalid_argument("trace_distance: inputs must be Hermitian");
    }
    const Matrix diff = rho1 - rho2;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

namespace {

struct MethodResult {
    std::vector<Matrix> states; // Schrodinger picture, one per grid point
    json invariants = json::object();
    double seconds{0.0};
};

std::vector<std::string> pair_names(const std::vector<std::string>& runs)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) out.push_back(runs[i] + "_vs_" + runs[j]);
    }
    return out;
}

json trajectory_invariants(const tcl::Trajectory& tr)
{
    return json{{"max_trace_dev", tr.max_trace_deviation()},
                {"max_herm_dev", tr.max_hermiticity_deviation()},
                {"min_eig", tr.min_eigenvalue()}};
}

json state_invariants(const std::vector<Matrix>& states)
{
    double tr = 0.0;
    double herm = 0.0;
    double min_eig = 1.0;
    for (const Matrix& s : states) {
        tr = std::max(tr, std::abs(s.trace() - 1.0));
        herm = std::max(herm, ops::hermiticity_deviation(s));
        min_eig = std::min(min_eig, ops::min_eigenvalue(s));
    }
    return json{{"max_trace_dev", tr}, {"max_herm_dev", herm}, {"min_eig", min_eig}};
}

std::vector<Matrix> states_of(const tcl::Trajectory& tr)
{
    std::vector<Matrix> out;
    for (const DensityOperator& s : tr.states) out.push_back(s.matrix());
    return out;
}

tcl::Trajectory as_trajectory(const std::vector<double>& grid, const std::vector<Matrix>& states)
{
    tcl::Trajectory out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        DensityOperator rho = DensityOperator::unchecked(states[i]);
        tcl::StepDiagnostics sd{rho.trace_deviation(), ops::hermiticity_deviation(states[i]), rho.min_eigenvalue()};
        out.times.push_back(grid[i]);
        out.states.push_back(std::move(rho));
        out.diagnostics.push_back(sd);
    }
    return out;
}

std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// Runs a metric name depends on: "a_vs_b" -> {a, b}, "a.x" -> {a}.
bool all_runs_selected(const std::string& metric, const std::vector<std::string>& runs)
{
    std::vector<std::string> needed;
    const std::size_t vs = metric.find("_vs_");
    if (vs != std::string::npos) {
        needed = {metric.substr(0, vs), metric.substr(vs + 4)};
    } else {
        needed = {metric.substr(0, metric.find('.'))};
    }
    return std::all_of(needed.begin(), needed.end(), [&](const std::string& r) {
        return std::find(runs.begin(), runs.end(), r) != runs.end();
    });
}

} // namespace

std::vector<std::string> gate_metrics(const std::vector<std::string>& runs)
{
    std::vector<std::string> out = pair_names(runs);
    for (const std::string& r : runs) {
        out.push_back(r + ".max_trace_dev");
        out.push_back(r + ".max_herm_dev");
        out.push_back(r + ".neg_min_eig");
    }
    if (std::find(runs.begin(), runs.end(), "kraus") != runs.end()) {
        out.push_back("kraus.completeness_dev");
        out.push_back("kraus.max_clipped");
        out.push_back("kraus.cp_ratio");
    }
    if (std::find(runs.begin(), runs.end(), "oracle") != runs.end()) {
        out.push_back("oracle.convergence_delta");
    }
    return out;
}

RunResult run_scenario(const Scenario& scenario, const RunFlags& flags, std::ostream& log)
{
    std::vector<std::string> runs = scenario.runs;
    if (flags.only) {
        for (const std::string& r : *flags.only) {
            if (std::find(scenario.runs.begin(), scenario.runs.end(), r) == scenario.runs.end()) {
                throw ScenarioError("--only", "run '" + r + "' is not declared by the scenario");
            }
        }
        runs.erase(std::remove_if(runs.begin(), runs.end(),
                                  [&](const std::string& r) {
                                      return std::find(flags.only->begin(), flags.only->end(), r) ==
                                             flags.only->end();
                                  }),
                   runs.end());
    }
    const std::vector<std::string> all_metrics = gate_metrics(scenario.runs);
    for (std::size_t i = 0; i < scenario.gates.size(); ++i) {
        const std::string& m = scenario.gates[i].metric;
        if (std::find(all_metrics.begin(), all_metrics.end(), m) == all_metrics.end()) {
            throw ScenarioError("gates[" + std::to_string(i) + "].metric", "unknown metric '" + m + "'");
        }
    }

    const std::vector<double> grid = tcl::uniform_grid(scenario.grid.t_max, scenario.grid.n_points);
    const SystemHamiltonian h(scenario.hamiltonian);
    const ErrorGeneratorSet gens(scenario.generators);
    const DensityOperator rho0(scenario.initial_state);
    quad::Settings qs;
    qs.rel_tol = scenario.tolerances.quadrature_rel;
    qs.abs_tol = scenario.tolerances.quadrature_abs;
    const bath::BathCorrelation bath = scenario.bath.with_quadrature(qs);
    tcl::IntegratorSettings is;
    is.tolerance = scenario.tolerances.integrator;

    RunResult result;
    std::map<std::string, MethodResult> methods;
    std::map<std::string, double> metrics;
    json kraus_json = json::array();
    json kraus_report = json::object();
    json errors = json::object();
    std::map<std::string, std::string> csv;

    for (const std::string& name : runs) {
        if (!flags.quiet) log << "running " << name << "\n";
        const auto start = std::chrono::steady_clock::now();
        MethodResult mr;
        try {
            if (name == "unitary") {
                for (double t : grid) mr.states.push_back(h.evolve(rho0.matrix(), t));
                mr.invariants = state_invariants(mr.states);
            } else if (name == "tcl2") {
                const tcl::Tcl2Generator gen(h, gens, bath, qs);
                const tcl::Trajectory tr = tcl::integrate(gen, rho0, grid, {}, is);
                mr.states = states_of(tr);
                mr.invariants = trajectory_invariants(tr);
                mr.invariants["steps_accepted"] = tr.steps_accepted;
                mr.invariants["steps_rejected"] = tr.steps_rejected;
            } else if (name == "lindblad") {
                const Matrix gamma = scenario.lindblad_rates
                                         ? *scenario.lindblad_rates
                                         : tcl::reduce_to_lindblad(tcl::Tcl2Generator(h, gens, bath, qs)).rates();
                const tcl::LindbladGenerator gen(h, gens, gamma);
                const tcl::Trajectory tr = tcl::integrate(gen, rho0, grid, {}, is);
                mr.states = states_of(tr);
                mr.invariants = trajectory_invariants(tr);
            } else if (name == "kraus") {
                double completeness = 0.0;
                double max_clipped = 0.0;
                double max_b = 0.0;
                json clipped_log = json::array();
                for (double t : grid) {
                    const kraus::BIntegral b = kraus::compute_B(t, h, gens, bath, qs);
                    const kraus::AIntegral a = kraus::compute_A(t, h, gens, bath, qs);
                    const kraus::ChannelMatrix m = kraus::assemble_channel(b, a);
                    kraus::KrausOptions ko;
                    ko.cp_tolerance = scenario.tolerances.cp;
                    const kraus::KrausSet k = kraus::canonical_kraus(m, ko);
                    max_b = std::max(max_b, m.b_norm);
                    completeness = std::max(completeness, k.completeness_deviation);
                    for (double c : k.clipped) {
                        max_clipped = std::max(max_clipped, std::abs(c));
                        clipped_log.push_back(json{{"t", t}, {"eigenvalue", c}});
                    }
                    kraus_json.push_back(kraus::to_json(k));
                    const kraus::KrausSet ks = kraus::to_schrodinger(k, h, t);
                    mr.states.push_back(kraus::apply_channel(ks, rho0).matrix());
                }
                mr.invariants = state_invariants(mr.states);
                const double budget = 10.0 * max_b * max_b;
                metrics["kraus.completeness_dev"] = completeness;
                metrics["kraus.max_clipped"] = max_clipped;
                metrics["kraus.cp_ratio"] = budget > 0.0 ? max_clipped / budget : (max_clipped > 0.0 ? 1e300 : 0.0);
                kraus_report = json{{"max_completeness_dev", completeness},
                                    {"max_b_norm", max_b},
                                    {"max_clipped", max_clipped},
                                    {"clipping_budget", budget},
                                    {"clipped", clipped_log}};
            } else if (name == "dephasing") {
                const double e0 = (scenario.hamiltonian(0, 0) - scenario.hamiltonian(1, 1)).real();
                const dephasing::DephasingModel model(e0, bath);
                for (double t : grid) {
                    const Matrix rho_i = dephasing::dephasing_apply(model, t, rho0).matrix();
                    const Matrix u = h.propagator(t);
                    mr.states.push_back(u * rho_i * u.adjoint());
                }
                mr.invariants = state_invariants(mr.states);
                std::ostringstream os;
                dephasing::write_dephasing_csv(os, model, grid);
                csv["dephasing_f.csv"] = os.str();
            } else if (name == "oracle") {
                std::vector<oracle::OracleMode> modes;
                const std::size_t n_gen = scenario.generators.size();
                for (std::size_t a = 0; a < n_gen; ++a) {
                    for (const bath::BosonMode& m : scenario.modes->modes) {
                        oracle::OracleMode om{m.omega, std::vector<Complex>(n_gen)};
                        om.g[a] = m.g;
                        modes.push_back(std::move(om));
                    }
                }
                const oracle::TruncatedBath tb(std::move(modes), *scenario.oracle_n_max,
                                               scenario.modes->temperature);
                const oracle::TotalSystem total(scenario.hamiltonian, gens, tb);
                oracle::ExactDiagnostics diag;
                const tcl::Trajectory tr = oracle::evolve_exact(total, rho0, grid, {}, &diag);
                mr.states = states_of(tr);
                mr.invariants = trajectory_invariants(tr);
                mr.invariants["purity_drift"] = diag.max_purity_drift;
                mr.invariants["convergence_delta"] = diag.convergence_delta;
                mr.invariants["check_n_max"] = diag.check_n_max;
                mr.invariants["dim"] = total.dim();
                metrics["oracle.convergence_delta"] = diag.convergence_delta;
            }
        } catch (const ScenarioError&) {
            throw;
        } catch (const std::exception& e) {
            errors[name] = e.what();
            result.failures.push_back(name + ": " + e.what());
            continue;
        }
        mr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        metrics[name + ".max_trace_dev"] = mr.invariants["max_trace_dev"].get<double>();
        metrics[name + ".max_herm_dev"] = mr.invariants["max_herm_dev"].get<double>();
        metrics[name + ".neg_min_eig"] = std::max(0.0, -mr.invariants["min_eig"].get<double>());
        methods.emplace(name, std::move(mr));
    }

    json pairs = json::object();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            const std::string key = runs[i] + "_vs_" + runs[j];
            const auto a = methods.find(runs[i]);
            const auto b = methods.find(runs[j]);
            if (a == methods.end() || b == methods.end()) {
                pairs[key] = json{{"status", "missing"}};
                continue;
            }
            double worst = 0.0;
            double at = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double td = trace_distance(a->second.states[k], b->second.states[k]);
                if (td > worst) {
                    worst = td;
                    at = grid[k];
                }
            }
            pairs[key] = json{{"max_trace_distance", worst}, {"t_at_max", at}};
            metrics[key] = worst;
        }
    }

    json gates = json::array();
    for (const Gate& g : scenario.gates) {
        json entry{{"metric", g.metric}, {"max", g.max}};
        const auto it = metrics.find(g.metric);
        if (it == metrics.end()) {
            const bool skipped = flags.only.has_value() && !all_runs_selected(g.metric, runs);
            if (skipped) {
                entry["status"] = "skipped";
            } else {
                entry["status"] = "unavailable";
                result.failures.push_back(g.metric + ": not available");
            }
        } else {
            const bool pass = it->second <= g.max;
            entry["value"] = it->second;
            entry["status"] = pass ? "pass" : "fail";
            if (!pass) {
                result.failures.push_back(g.metric + " = " + format_number(it->second) + " exceeds " +
                                          format_number(g.max));
            }
        }
        gates.push_back(std::move(entry));
    }

    json invariants = json::object();
    for (const std::string& r : runs) {
        const auto it = methods.find(r);
        if (it != methods.end()) invariants[r] = it->second.invariants;
    }
    result.exit_code = result.failures.empty() ? 0 : 1;
    result.report = json{{"report_version", 1},
                         {"scenario", scenario.name},
                         {"runs", runs},
                         {"grid", json{{"t_max", scenario.grid.t_max}, {"n_points", scenario.grid.n_points}}},
                         {"pairs", pairs},
                         {"invariants", invariants},
                         {"gates", gates},
                         {"errors", errors},
                         {"pass", result.exit_code == 0}};
    if (!kraus_report.empty()) result.report["kraus"] = kraus_report;

    std::ostringstream txt;
    txt << "scenario: " << scenario.name << "\n";
    for (const std::string& r : runs) {
        const auto it = methods.find(r);
        if (it == methods.end()) {
            txt << "  " << r << ": error: " << errors[r].get<std::string>() << "\n";
        } else {
            txt << "  " << r << ": " << format_number(it->second.seconds) << " s\n";
        }
    }
    txt << "pairs (max trace distance):\n";
    for (const auto& [key, value] : pairs.items()) {
        if (value.contains("max_trace_distance")) {
            txt << "  " << key << ": " << format_number(value["max_trace_distance"].get<double>()) << "\n";
        } else {
            txt << "  " << key << ": missing\n";
        }
    }
    if (!kraus_report.empty()) {
        txt << "kraus: completeness_dev " << format_number(kraus_report["max_completeness_dev"].get<double>())
            << ", clipped " << kraus_report["clipped"].size() << ", max clipped "
            << format_number(kraus_report["max_clipped"].get<double>()) << "\n";
    }
    txt << "gates:\n";
    for (const json& g : gates) {
        txt << "  " << g["metric"].get<std::string>() << " <= " << format_number(g["max"].get<double>()) << ": "
            << g["status"].get<std::string>();
        if (g.contains("value")) txt << " (" << format_number(g["value"].get<double>()) << ")";
        txt << "\n";
    }
    txt << (result.exit_code == 0 ? "PASS\n" : "FAIL\n");
    result.text_report = txt.str();

    if (flags.write_artifacts) {
        const std::filesystem::path dir = flags.out_dir ? *flags.out_dir : scenario.output_dir;
        std::filesystem::create_directories(dir);
        for (const auto& [name, mr] : methods) {
            std::ofstream os(dir / (name + ".csv"));
            tcl::write_trajectory_csv(os, as_trajectory(grid, mr.states));
        }
        for (const auto& [file, body] : csv) std::ofstream(dir / file) << body;
        if (!kraus_json.empty()) std::ofstream(dir / "kraus.json") << kraus_json.dump(2) << "\n";
        std::ofstream(dir / "report.json") << result.report.dump(2) << "\n";
        std::ofstream(dir / "report.txt") << result.text_report;
    }
    return result;
}

int run(const std::string& scenario_path, const RunFlags& flags, std::ostream& out, std::ostream& err)
{
    Scenario scenario;
    try {
        scenario = load_scenario(scenario_path);
    } catch (const ScenarioError& e) {
        err << "error: " << scenario_path << ": " << e.what() << "\n";
        return 2;
    }
    RunResult result;
    try {
        result = run_scenario(scenario, flags, flags.quiet ? err : out);
    } catch (const ScenarioError& e) {
        err << "error: " << scenario_path << ": " << e.what() << "\n";
        return 2;
    }
    if (!flags.quiet) out << result.text_report;
    for (const std::string& f : result.failures) err << "failed: " << f << "\n";
    return result.exit_code;
}

} // namespace tclk::cli
