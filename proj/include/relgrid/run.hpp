#pragma once

// Configuration ingestion, run orchestration, and result assembly behind
// the command-line front end: single evaluations, variational runs, and
// convergence sweeps. Configs and results are JSON documents; sweeps also
// produce a flat CSV. Result payloads contain no volatile data (no
// timestamps, no host info), so identical config + seed reproduces
// byte-identical files.

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "relgrid/coefficients.hpp"
#include "relgrid/errors.hpp"
#include "relgrid/estimators.hpp"
#include "relgrid/grid.hpp"
#include "relgrid/operators.hpp"
#include "relgrid/oracle.hpp"
#include "relgrid/rng.hpp"
#include "relgrid/version.hpp"
#include "relgrid/vqe.hpp"

namespace relgrid {

constexpr int kSchemaVersion = 1;

enum class Task { Evaluate, Vqe, Sweep };
enum class PotentialKind { None, Uniform, Well, Harmonic, CustomWeights };
enum class StateKind { Uniform, Basis, Sine, PlaneWave, Gaussian };
enum class SweepAxis { Qubits, Order, Shots, ComptonRatio };

inline const char* to_string(Task t) {
    switch (t) {
        case Task::Evaluate: return "evaluate";
        case Task::Vqe: return "vqe";
        case Task::Sweep: return "sweep";
    }
    return "?";
}

inline const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::None: return "none";
        case PotentialKind::Uniform: return "uniform";
        case PotentialKind::Well: return "well";
        case PotentialKind::Harmonic: return "harmonic";
        case PotentialKind::CustomWeights: return "custom_weights";
    }
    return "?";
}

inline const char* to_string(StateKind k) {
    switch (k) {
        case StateKind::Uniform: return "uniform";
        case StateKind::Basis: return "basis";
        case StateKind::Sine: return "sine";
        case StateKind::PlaneWave: return "plane_wave";
        case StateKind::Gaussian: return "gaussian";
    }
    return "?";
}

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::Qubits: return "qubits";
        case SweepAxis::Order: return "order";
        case SweepAxis::Shots: return "shots";
        case SweepAxis::ComptonRatio: return "compton_ratio";
    }
    return "?";
}

inline const char* to_string(ShotMode m) {
    return m == ShotMode::Exact ? "exact" : "shots";
}

inline const char* to_string(InitStrategy s) {
    switch (s) {
        case InitStrategy::RandomUniform: return "random_uniform";
        case InitStrategy::Zero: return "zero";
        case InitStrategy::Provided: return "provided";
    }
    return "?";
}

inline const char* to_string(OptimizerKind k) {
    return k == OptimizerKind::NelderMead ? "nelder_mead" : "spsa";
}

struct PotentialConfig {
    PotentialKind kind = PotentialKind::None;
    double scale = 1.0;
    double offset = 0.0;
    double center = 0.5;  // well, harmonic
    double width = 0.5;   // well
    std::vector<double> weights;  // custom_weights
};

struct StateConfig {
    StateKind kind = StateKind::Uniform;
    long long index = 0;  // basis
    int k = 1;            // sine, plane_wave
    double center = 0.5;  // gaussian
    double width = 0.15;  // gaussian
};

struct AnsatzConfig {
    AnsatzKind kind = AnsatzKind::GridDirect;
    int layers = 1;
    InitStrategy init = InitStrategy::RandomUniform;
    std::vector<double> initial_params;
};

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::NelderMead;
    long long max_evals = 60000;
    double tol = 1e-9;
    int restarts = 8;
};

struct SweepConfig {
    SweepAxis axis = SweepAxis::Qubits;
    std::vector<double> values;
};

struct RunConfig {
    Task task = Task::Evaluate;
    PhysicsConfig physics;
    BoundaryCondition boundary = BoundaryCondition::PBC;
    int order = 1;
    DbcVariant dbc_variant = DbcVariant::Full;
    ShotMode mode = ShotMode::Exact;
    long long shots = 100000;
    std::uint64_t seed = 0;
    bool allow_complex = false;
    StateConfig state;
    PotentialConfig potential;
    AnsatzConfig ansatz;
    OptimizerConfig optimizer;
    SweepConfig sweep;
    int workers = 0;
    bool oracle_check = false;
    double oracle_tolerance = 1e-8;
    std::string output;
};

// ---------------------------------------------------------------------------
// Fixture resolution: named potentials and states become concrete vectors.

inline PotentialSpec resolve_potential(const PotentialConfig& pc, const PhysicsConfig& physics) {
    const std::size_t n = physics.grid_points();
    switch (pc.kind) {
        case PotentialKind::None:
            return free_potential(n);
        case PotentialKind::Uniform:
            return PotentialSpec{std::vector<double>(n, 1.0 / double(n)), pc.scale, pc.offset};
        case PotentialKind::Well: {
            if (!(pc.width > 0.0)) throw ConfigError("well width must be positive");
            std::vector<double> w(n, 0.0);
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(physics.grid_point(j) - pc.center) <= pc.width / 2.0) {
                    w[j] = 1.0;
                    sum += 1.0;
                }
            }
            if (sum == 0.0) throw ConfigError("well interval contains no grid points");
            for (auto& x : w) x /= sum;
            return PotentialSpec{std::move(w), pc.scale, pc.offset};
        }
        case PotentialKind::Harmonic: {
            std::vector<double> w(n);
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double d = physics.grid_point(j) - pc.center;
                w[j] = d * d;
                sum += w[j];
            }
            if (sum == 0.0) throw ConfigError("harmonic weights vanish on this grid");
            for (auto& x : w) x /= sum;
            return PotentialSpec{std::move(w), pc.scale, pc.offset};
        }
        case PotentialKind::CustomWeights: {
            PotentialSpec spec{pc.weights, pc.scale, pc.offset};
            spec.validate(n);
            return spec;
        }
    }
    throw ConfigError("unknown potential kind");
}

inline WaveFunction resolve_state(const StateConfig& sc, const PhysicsConfig& physics) {
    const std::size_t n = physics.grid_points();
    switch (sc.kind) {
        case StateKind::Uniform:
            return uniform_state(physics.qubits);
        case StateKind::Basis:
            if (sc.index < 0 || std::size_t(sc.index) >= n) {
                throw ConfigError("basis state index out of range for this grid");
            }
            return basis_state(physics.qubits, std::size_t(sc.index));
        case StateKind::Sine: {
            if (sc.k < 1 || std::size_t(sc.k) > n) {
                throw ConfigError("sine mode number must lie in [1, grid points]");
            }
            std::vector<Complex> raw(n);
            for (std::size_t j = 0; j < n; ++j) {
                raw[j] = std::sin(std::numbers::pi * double(sc.k) * double(j + 1) /
                                  double(n + 1));
            }
            return make_state(raw);
        }
        case StateKind::PlaneWave: {
            if (sc.k < 0 || std::size_t(sc.k) >= n) {
                throw ConfigError("plane wave mode number must lie in [0, grid points)");
            }
            std::vector<Complex> raw(n);
            for (std::size_t j = 0; j < n; ++j) {
                raw[j] = std::exp(Complex{
                    0.0, 2.0 * std::numbers::pi * double(sc.k) * double(j) / double(n)});
            }
            return make_state(raw);
        }
        case StateKind::Gaussian: {
            if (!(sc.width > 0.0)) throw ConfigError("gaussian state width must be positive");
            std::vector<Complex> raw(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double d = physics.grid_point(j) - sc.center;
                raw[j] = std::exp(-d * d / (4.0 * sc.width * sc.width));
            }
            return make_state(raw);
        }
    }
    throw ConfigError("unknown state kind");
}

// ---------------------------------------------------------------------------
// JSON parsing with strict key and type checking.

namespace detail {

using nlohmann::json;

[[noreturn]] inline void config_fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

inline void check_keys(const json& j, const char* where,
                       std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) config_fail(where, "expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto a : allowed) {
            if (it.key() == a) {
                known = true;
                break;
            }
        }
        if (!known) config_fail(where, "unknown key '" + it.key() + "'");
    }
}

inline const json& require(const json& j, const char* where, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) config_fail(where, std::string("missing required key '") + key + "'");
    return *it;
}

inline double as_number(const json& v, const char* where, const char* key) {
    if (!v.is_number()) config_fail(where, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

inline long long as_integer(const json& v, const char* where, const char* key) {
    if (v.is_number_integer()) return v.get<long long>();
    // Accept integral-valued floats (2.0) so re-serialised configs parse.
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (x == std::trunc(x) && std::abs(x) <= 9.0e18) return static_cast<long long>(x);
    }
    config_fail(where, std::string("'") + key + "' must be an integer");
}

inline bool as_boolean(const json& v, const char* where, const char* key) {
    if (!v.is_boolean()) config_fail(where, std::string("'") + key + "' must be a boolean");
    return v.get<bool>();
}

inline std::string as_string(const json& v, const char* where, const char* key) {
    if (!v.is_string()) config_fail(where, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

inline double number_or(const json& j, const char* where, const char* key, double def) {
    const auto it = j.find(key);
    return it == j.end() ? def : as_number(*it, where, key);
}

inline long long integer_or(const json& j, const char* where, const char* key, long long def) {
    const auto it = j.find(key);
    return it == j.end() ? def : as_integer(*it, where, key);
}

inline bool boolean_or(const json& j, const char* where, const char* key, bool def) {
    const auto it = j.find(key);
    return it == j.end() ? def : as_boolean(*it, where, key);
}

template <typename Enum>
Enum parse_enum(const json& v, const char* where, const char* key,
                std::initializer_list<std::pair<std::string_view, Enum>> table) {
    const std::string s = as_string(v, where, key);
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    std::string allowed;
    for (const auto& [name, value] : table) {
        if (!allowed.empty()) allowed += ", ";
        allowed += name;
    }
    config_fail(where, std::string("'") + key + "' must be one of {" + allowed + "}, got '" +
                           s + "'");
}

inline std::vector<double> as_number_array(const json& v, const char* where, const char* key) {
    if (!v.is_array()) config_fail(where, std::string("'") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_number(e, where, key));
    return out;
}

inline PhysicsConfig parse_physics(const json& doc) {
    const json& p = require(doc, "config", "physics");
    check_keys(p, "physics", {"mass", "c", "hbar", "compton_ratio", "qubits"});
    const double mass = as_number(require(p, "physics", "mass"), "physics", "mass");
    const double c = as_number(require(p, "physics", "c"), "physics", "c");
    const long long qubits = as_integer(require(p, "physics", "qubits"), "physics", "qubits");
    if (qubits < 2 || qubits > 30) config_fail("physics", "'qubits' must lie in [2, 30]");
    const bool has_hbar = p.contains("hbar");
    const bool has_ratio = p.contains("compton_ratio");
    if (has_hbar == has_ratio) {
        config_fail("physics", "exactly one of 'hbar' and 'compton_ratio' is required");
    }
    if (has_hbar) {
        return PhysicsConfig(mass, c, as_number(p["hbar"], "physics", "hbar"), int(qubits));
    }
    return PhysicsConfig::from_compton_ratio(
        mass, c, int(qubits), as_number(p["compton_ratio"], "physics", "compton_ratio"));
}

inline StateConfig parse_state(const json& doc) {
    StateConfig sc;
    const auto it = doc.find("state");
    if (it == doc.end()) return sc;
    const json& s = *it;
    check_keys(s, "state", {"kind", "index", "k", "center", "width"});
    if (s.contains("kind")) {
        sc.kind = parse_enum<StateKind>(s["kind"], "state", "kind",
                                        {{"uniform", StateKind::Uniform},
                                         {"basis", StateKind::Basis},
                                         {"sine", StateKind::Sine},
                                         {"plane_wave", StateKind::PlaneWave},
                                         {"gaussian", StateKind::Gaussian}});
    }
    sc.index = integer_or(s, "state", "index", sc.index);
    sc.k = int(integer_or(s, "state", "k", sc.k));
    sc.center = number_or(s, "state", "center", sc.center);
    sc.width = number_or(s, "state", "width", sc.width);
    return sc;
}

inline PotentialConfig parse_potential(const json& doc) {
    PotentialConfig pc;
    const auto it = doc.find("potential");
    if (it == doc.end()) return pc;
    const json& p = *it;
    check_keys(p, "potential", {"kind", "scale", "offset", "center", "width", "weights"});
    if (p.contains("kind")) {
        pc.kind = parse_enum<PotentialKind>(p["kind"], "potential", "kind",
                                            {{"none", PotentialKind::None},
                                             {"uniform", PotentialKind::Uniform},
                                             {"well", PotentialKind::Well},
                                             {"harmonic", PotentialKind::Harmonic},
                                             {"custom_weights", PotentialKind::CustomWeights}});
    }
    pc.scale = number_or(p, "potential", "scale", pc.scale);
    pc.offset = number_or(p, "potential", "offset", pc.offset);
    pc.center = number_or(p, "potential", "center", pc.center);
    pc.width = number_or(p, "potential", "width", pc.width);
    if (pc.kind == PotentialKind::CustomWeights) {
        pc.weights = as_number_array(require(p, "potential", "weights"), "potential", "weights");
    } else if (p.contains("weights")) {
        config_fail("potential", "'weights' is only valid for kind custom_weights");
    }
    return pc;
}

inline AnsatzConfig parse_ansatz(const json& doc) {
    AnsatzConfig ac;
    const auto it = doc.find("ansatz");
    if (it == doc.end()) return ac;
    const json& a = *it;
    check_keys(a, "ansatz", {"kind", "layers", "init", "initial_params"});
    if (a.contains("kind")) {
        ac.kind = parse_enum<AnsatzKind>(a["kind"], "ansatz", "kind",
                                         {{"grid_direct", AnsatzKind::GridDirect},
                                          {"layered_rotation", AnsatzKind::LayeredRotation},
                                          {"gaussian", AnsatzKind::Gaussian}});
    }
    ac.layers = int(integer_or(a, "ansatz", "layers", ac.layers));
    if (ac.layers < 1) config_fail("ansatz", "'layers' must be >= 1");
    if (a.contains("init")) {
        ac.init = parse_enum<InitStrategy>(a["init"], "ansatz", "init",
                                           {{"random_uniform", InitStrategy::RandomUniform},
                                            {"zero", InitStrategy::Zero},
                                            {"provided", InitStrategy::Provided}});
    }
    if (ac.init == InitStrategy::Provided) {
        ac.initial_params =
            as_number_array(require(a, "ansatz", "initial_params"), "ansatz", "initial_params");
    } else if (a.contains("initial_params")) {
        config_fail("ansatz", "'initial_params' is only valid with init provided");
    }
    return ac;
}

inline OptimizerConfig parse_optimizer(const json& doc, ShotMode mode) {
    OptimizerConfig oc;
    oc.kind = mode == ShotMode::Exact ? OptimizerKind::NelderMead : OptimizerKind::Spsa;
    const auto it = doc.find("optimizer");
    if (it == doc.end()) return oc;
    const json& o = *it;
    check_keys(o, "optimizer", {"kind", "max_evals", "tol", "restarts"});
    if (o.contains("kind")) {
        oc.kind = parse_enum<OptimizerKind>(o["kind"], "optimizer", "kind",
                                            {{"nelder_mead", OptimizerKind::NelderMead},
                                             {"spsa", OptimizerKind::Spsa}});
    }
    oc.max_evals = integer_or(o, "optimizer", "max_evals", oc.max_evals);
    if (oc.max_evals < 1) config_fail("optimizer", "'max_evals' must be >= 1");
    oc.tol = number_or(o, "optimizer", "tol", oc.tol);
    if (!(oc.tol >= 0.0)) config_fail("optimizer", "'tol' must be >= 0");
    oc.restarts = int(integer_or(o, "optimizer", "restarts", oc.restarts));
    if (oc.restarts < 1) config_fail("optimizer", "'restarts' must be >= 1");
    return oc;
}

inline SweepConfig parse_sweep(const json& doc) {
    const json& s = require(doc, "config", "sweep");
    check_keys(s, "sweep", {"axis", "values"});
    SweepConfig sc;
    sc.axis = parse_enum<SweepAxis>(require(s, "sweep", "axis"), "sweep", "axis",
                                    {{"qubits", SweepAxis::Qubits},
                                     {"order", SweepAxis::Order},
                                     {"shots", SweepAxis::Shots},
                                     {"compton_ratio", SweepAxis::ComptonRatio}});
    const json& values = require(s, "sweep", "values");
    if (!values.is_array() || values.empty()) {
        config_fail("sweep", "'values' must be a non-empty array");
    }
    for (const auto& v : values) {
        if (sc.axis == SweepAxis::ComptonRatio) {
            const double x = as_number(v, "sweep", "values");
            if (!(x > 0.0)) config_fail("sweep", "compton_ratio values must be positive");
            sc.values.push_back(x);
        } else {
            const long long x = as_integer(v, "sweep", "values");
            if (sc.axis == SweepAxis::Qubits && (x < 2 || x > 30)) {
                config_fail("sweep", "qubits values must lie in [2, 30]");
            }
            if (sc.axis == SweepAxis::Order && (x < 1 || x > 2)) {
                config_fail("sweep", "order values must be 1 or 2");
            }
            if (sc.axis == SweepAxis::Shots && x < 1) {
                config_fail("sweep", "shots values must be >= 1");
            }
            sc.values.push_back(double(x));
        }
    }
    return sc;
}

}  // namespace detail

// Parses and validates a config document. When `forced_task` is given (from
// the CLI subcommand) it must agree with any task field in the document.
inline RunConfig parse_run_config(const nlohmann::json& doc,
                                  std::optional<Task> forced_task = std::nullopt) {
    using detail::config_fail;
    detail::check_keys(doc, "config",
                       {"schema_version", "task", "physics", "boundary", "order", "dbc_variant",
                        "mode", "shots", "seed", "allow_complex", "state", "potential", "ansatz",
                        "optimizer", "sweep", "workers", "oracle_check", "oracle_tolerance",
                        "output"});

    const long long schema =
        detail::as_integer(detail::require(doc, "config", "schema_version"), "config",
                           "schema_version");
    if (schema != kSchemaVersion) {
        config_fail("config", "unsupported schema_version " + std::to_string(schema) +
                                  " (expected " + std::to_string(kSchemaVersion) + ")");
    }

    RunConfig rc;
    std::optional<Task> doc_task;
    if (doc.contains("task")) {
        doc_task = detail::parse_enum<Task>(doc["task"], "config", "task",
                                            {{"evaluate", Task::Evaluate},
                                             {"vqe", Task::Vqe},
                                             {"sweep", Task::Sweep}});
    }
    if (forced_task && doc_task && *forced_task != *doc_task) {
        config_fail("config", std::string("task '") + to_string(*doc_task) +
                                  "' does not match the requested subcommand '" +
                                  to_string(*forced_task) + "'");
    }
    if (!forced_task && !doc_task) config_fail("config", "missing required key 'task'");
    rc.task = forced_task ? *forced_task : *doc_task;

    rc.physics = detail::parse_physics(doc);

    if (doc.contains("boundary")) {
        rc.boundary = detail::parse_enum<BoundaryCondition>(
            doc["boundary"], "config", "boundary",
            {{"pbc", BoundaryCondition::PBC}, {"dbc", BoundaryCondition::DBC}});
    }
    rc.order = int(detail::integer_or(doc, "config", "order", rc.order));
    if (rc.order < 1 || rc.order > 2) config_fail("config", "'order' must be 1 or 2");
    if (doc.contains("dbc_variant")) {
        rc.dbc_variant = detail::parse_enum<DbcVariant>(
            doc["dbc_variant"], "config", "dbc_variant",
            {{"full", DbcVariant::Full}, {"paper_literal", DbcVariant::PaperLiteral}});
    }
    if (doc.contains("mode")) {
        rc.mode = detail::parse_enum<ShotMode>(
            doc["mode"], "config", "mode",
            {{"exact", ShotMode::Exact}, {"shots", ShotMode::Shots}});
    }
    rc.shots = detail::integer_or(doc, "config", "shots", rc.shots);
    if (rc.mode == ShotMode::Shots && rc.shots < 1) {
        config_fail("config", "'shots' must be >= 1 in shots mode");
    }
    const long long seed = detail::integer_or(doc, "config", "seed", 0);
    if (seed < 0) config_fail("config", "'seed' must be >= 0");
    rc.seed = std::uint64_t(seed);
    rc.allow_complex = detail::boolean_or(doc, "config", "allow_complex", false);
    rc.workers = int(detail::integer_or(doc, "config", "workers", 0));
    if (rc.workers < 0) config_fail("config", "'workers' must be >= 0");
    rc.oracle_check = detail::boolean_or(doc, "config", "oracle_check", false);
    rc.oracle_tolerance = detail::number_or(doc, "config", "oracle_tolerance",
                                            rc.task == Task::Vqe ? 1e-6 : 1e-8);
    if (!(rc.oracle_tolerance > 0.0)) config_fail("config", "'oracle_tolerance' must be > 0");
    if (doc.contains("output")) {
        rc.output = detail::as_string(doc["output"], "config", "output");
    }

    rc.potential = detail::parse_potential(doc);
    if (rc.potential.kind == PotentialKind::CustomWeights &&
        rc.potential.weights.size() != rc.physics.grid_points()) {
        config_fail("potential", "custom weights need one entry per grid point (" +
                                     std::to_string(rc.physics.grid_points()) + ")");
    }

    if (rc.task == Task::Vqe) {
        if (doc.contains("state")) {
            config_fail("config", "'state' is only valid for evaluate and sweep tasks");
        }
        rc.ansatz = detail::parse_ansatz(doc);
        rc.optimizer = detail::parse_optimizer(doc, rc.mode);
        if (rc.ansatz.init == InitStrategy::Provided) {
            AnsatzSpec probe;
            probe.kind = rc.ansatz.kind;
            probe.qubits = rc.physics.qubits;
            probe.layers = rc.ansatz.layers;
            if (static_cast<int>(rc.ansatz.initial_params.size()) != probe.parameter_count()) {
                config_fail("ansatz", "'initial_params' needs " +
                                          std::to_string(probe.parameter_count()) +
                                          " entries for this ansatz");
            }
        }
    } else {
        if (doc.contains("ansatz") || doc.contains("optimizer")) {
            config_fail("config", "'ansatz'/'optimizer' are only valid for the vqe task");
        }
        rc.state = detail::parse_state(doc);
        // Fail early on fixture parameters that cannot fit this grid.
        resolve_state(rc.state, rc.physics);
    }

    if (rc.task == Task::Sweep) {
        rc.sweep = detail::parse_sweep(doc);
        if (rc.sweep.axis == SweepAxis::Shots && rc.mode != ShotMode::Shots) {
            config_fail("sweep", "sweeping shots requires mode shots");
        }
        if (rc.sweep.axis == SweepAxis::Qubits &&
            rc.potential.kind == PotentialKind::CustomWeights) {
            config_fail("sweep", "custom weights cannot be swept over qubit counts");
        }
    } else if (doc.contains("sweep")) {
        config_fail("config", "'sweep' is only valid for the sweep task");
    }
    return rc;
}

// Serialises the fully resolved config (defaults materialised) so every
// result file states exactly what produced it. The output parses back to
// the same RunConfig.
inline nlohmann::json config_to_json(const RunConfig& rc) {
    nlohmann::json doc{
        {"schema_version", kSchemaVersion},
        {"task", to_string(rc.task)},
        {"physics",
         {{"mass", rc.physics.mass},
          {"c", rc.physics.light_speed},
          {"hbar", rc.physics.planck},
          {"qubits", rc.physics.qubits}}},
        {"boundary", to_string(rc.boundary)},
        {"order", rc.order},
        {"dbc_variant", to_string(rc.dbc_variant)},
        {"mode", to_string(rc.mode)},
        {"shots", rc.shots},
        {"seed", rc.seed},
        {"allow_complex", rc.allow_complex},
        {"workers", rc.workers},
        {"oracle_check", rc.oracle_check},
        {"oracle_tolerance", rc.oracle_tolerance},
    };

    nlohmann::json potential{{"kind", to_string(rc.potential.kind)},
                             {"scale", rc.potential.scale},
                             {"offset", rc.potential.offset},
                             {"center", rc.potential.center},
                             {"width", rc.potential.width}};
    if (rc.potential.kind == PotentialKind::CustomWeights) {
        potential["weights"] = rc.potential.weights;
    }
    doc["potential"] = std::move(potential);

    if (rc.task == Task::Vqe) {
        nlohmann::json ansatz{{"kind", to_string(rc.ansatz.kind)},
                              {"layers", rc.ansatz.layers},
                              {"init", to_string(rc.ansatz.init)}};
        if (rc.ansatz.init == InitStrategy::Provided) {
            ansatz["initial_params"] = rc.ansatz.initial_params;
        }
        doc["ansatz"] = std::move(ansatz);
        doc["optimizer"] = {{"kind", to_string(rc.optimizer.kind)},
                            {"max_evals", rc.optimizer.max_evals},
                            {"tol", rc.optimizer.tol},
                            {"restarts", rc.optimizer.restarts}};
    } else {
        doc["state"] = {{"kind", to_string(rc.state.kind)},
                        {"index", rc.state.index},
                        {"k", rc.state.k},
                        {"center", rc.state.center},
                        {"width", rc.state.width}};
    }
    if (rc.task == Task::Sweep) {
        doc["sweep"] = {{"axis", to_string(rc.sweep.axis)}, {"values", rc.sweep.values}};
    }
    if (!rc.output.empty()) doc["output"] = rc.output;
    return doc;
}

// ---------------------------------------------------------------------------
// Result assembly.

struct RunOutcome {
    nlohmann::json result;
    std::string csv;      // sweep runs only
    std::string summary;  // one human-readable line
};

namespace detail {

inline std::string format_double(double v) {
    std::array<char, 40> buf;
    const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

inline json coefficients_to_json(const PhysicsConfig& physics, int order) {
    const CoefficientSet cs = make_coefficients(physics, order);
    json j{{"order", cs.order},
           {"compton_ratio", physics.compton_ratio()},
           {"alpha", cs.alpha_values},
           {"beta", cs.beta_values},
           {"validity_threshold", kValidityWarnThreshold}};
    j["gamma"] = cs.gamma_values.empty() ? json(nullptr) : json(cs.gamma_values);
    return j;
}

inline json energy_to_json(const EnergyBreakdown& b) {
    json per_order = json::object();
    for (const auto& [order, value] : b.per_order_terms) {
        per_order[std::to_string(order)] = value;
    }
    json boundary = json::object();
    for (const auto& [label, value] : b.boundary_terms) boundary[label] = value;
    return json{{"kinetic", b.kinetic},
                {"potential", b.potential},
                {"total", b.total},
                {"std_error", b.std_error},
                {"kinetic_std_error", b.kinetic_std_error},
                {"potential_std_error", b.potential_std_error},
                {"per_order_terms", std::move(per_order)},
                {"boundary_terms", std::move(boundary)},
                {"validity_ratio", b.validity_ratio},
                {"mode", to_string(b.mode)},
                {"shots", b.shot_count},
                {"seed", b.seed},
                {"boundary", to_string(b.bc)},
                {"order", b.order},
                {"dbc_variant", to_string(b.variant)}};
}

inline void collect_warnings(const RunConfig& rc, const EnergyBreakdown& b,
                             const WaveFunction& state, std::vector<std::string>& warnings,
                             const std::string& prefix = "") {
    if (b.validity_ratio > kValidityWarnThreshold) {
        warnings.push_back(prefix + "validity_ratio " + format_double(b.validity_ratio) +
                           " exceeds " + format_double(kValidityWarnThreshold) +
                           "; the truncated series may be unreliable");
    }
    if (rc.boundary == BoundaryCondition::DBC && rc.allow_complex && !state.is_real()) {
        warnings.push_back(prefix +
                           "hard-wall energy estimated from complex amplitudes; the edge "
                           "measurement protocol assumes real states");
    }
}

// Dense-matrix expectation of the same truncated Hamiltonian, computed
// entirely through the matrix path (no measurement-circuit code).
inline double dense_total_expectation(const RunConfig& rc, const WaveFunction& state,
                                      const PotentialSpec& pot) {
    const double kinetic =
        expectation(build_kinetic_matrix(rc.physics, rc.boundary, rc.order), state);
    double potential = pot.offset;
    for (std::size_t j = 0; j < state.size(); ++j) {
        potential += pot.scale * pot.weights[j] * probability(state, j);
    }
    return kinetic + potential;
}

inline json truncation_block(const RunConfig& rc, const PotentialSpec& pot,
                             double series_ground) {
    const double sqrt_ground =
        exact_sqrt_kinetic_ground(rc.physics, rc.boundary, pot).ground_energy;
    const double bound = truncation_bound(rc.physics, rc.boundary, rc.order);
    const double gap = std::abs(series_ground - sqrt_ground);
    return json{{"sqrt_ground", sqrt_ground},
                {"series_ground", series_ground},
                {"gap", gap},
                {"bound", bound},
                {"within_bound", gap <= bound}};
}

inline json variant_residual_block(const RunConfig& rc, const WaveFunction& state) {
    const auto plan = ShotPlan::exact();
    const double full =
        kinetic_dbc(state, rc.physics, rc.order, plan, DbcVariant::Full, rc.allow_complex)
            .value;
    const double wrap_only = kinetic_dbc(state, rc.physics, rc.order, plan,
                                         DbcVariant::PaperLiteral, rc.allow_complex)
                                 .value;
    const double residual = full - wrap_only;
    const std::vector<double> g = gamma(rc.physics);
    const double predicted =
        2.0 * g[1] *
        (probability(state, 0) + probability(state, state.size() - 1));
    return json{{"full", full},
                {"paper_literal", wrap_only},
                {"residual", residual},
                {"predicted", predicted},
                {"tolerance", 1e-12},
                {"within_tolerance", std::abs(residual - predicted) <= 1e-12}};
}

// Side-by-side estimator vs dense-matrix report for a single state.
inline json oracle_block_state(const RunConfig& rc, const WaveFunction& state,
                               const PotentialSpec& pot, const EnergyBreakdown& b) {
    const double dense = dense_total_expectation(rc, state, pot);
    const double abs_gap = std::abs(b.total - dense);
    const double rel_gap = abs_gap / std::max(std::abs(dense), 1e-15);
    const double tolerance = rc.mode == ShotMode::Exact
                                 ? rc.oracle_tolerance
                                 : std::max(5.0 * b.std_error, 1e-12);
    const SpectralResult ground = exact_ground(rc.physics, rc.boundary, rc.order, pot);
    json j{{"ground_energy", ground.ground_energy},
           {"state_expectation",
            {{"dense", dense},
             {"estimate", b.total},
             {"abs_gap", abs_gap},
             {"rel_gap", rel_gap},
             {"tolerance", tolerance},
             {"within_tolerance", abs_gap <= tolerance}}},
           {"truncation", truncation_block(rc, pot, ground.ground_energy)}};
    if (rc.boundary == BoundaryCondition::DBC && rc.order >= 2) {
        j["variant_residual"] = variant_residual_block(rc, state);
    }
    return j;
}

inline json oracle_block_vqe(const RunConfig& rc, const PotentialSpec& pot,
                             const VqeResult& vr) {
    const SpectralResult ground = exact_ground(rc.physics, rc.boundary, rc.order, pot);
    const double abs_gap = std::abs(vr.best_energy - ground.ground_energy);
    const double rel_gap = abs_gap / std::max(std::abs(ground.ground_energy), 1e-15);
    json j{{"ground_energy", ground.ground_energy},
           {"vqe",
            {{"best_energy", vr.best_energy},
             {"abs_gap", abs_gap},
             {"rel_gap", rel_gap},
             {"tolerance", rc.oracle_tolerance},
             {"within_tolerance", rel_gap <= rc.oracle_tolerance}}},
           {"truncation", truncation_block(rc, pot, ground.ground_energy)}};
    if (rc.boundary == BoundaryCondition::DBC && rc.order >= 2) {
        const WaveFunction best =
            build_ansatz(AnsatzSpec{rc.ansatz.kind, rc.physics.qubits, rc.ansatz.layers,
                                    InitStrategy::Provided, vr.best_params},
                         vr.best_params, rc.physics);
        j["variant_residual"] = variant_residual_block(rc, best);
    }
    return j;
}

inline ShotPlan plan_for(const RunConfig& rc) {
    return rc.mode == ShotMode::Exact ? ShotPlan::exact() : ShotPlan::shots(rc.shots, rc.seed);
}

inline std::string summary_warning_suffix(const std::vector<std::string>& warnings) {
    std::string s;
    for (const auto& w : warnings) s += "; warning: " + w;
    return s;
}

inline RunOutcome run_evaluate(const RunConfig& rc) {
    const WaveFunction state = resolve_state(rc.state, rc.physics);
    const PotentialSpec pot = resolve_potential(rc.potential, rc.physics);
    const EnergyBreakdown b =
        total_energy(state, rc.physics, rc.boundary, rc.order, pot, plan_for(rc),
                     rc.dbc_variant, rc.allow_complex);

    std::vector<std::string> warnings;
    collect_warnings(rc, b, state, warnings);

    RunOutcome out;
    out.result = json{{"config", config_to_json(rc)},
                      {"coefficients", coefficients_to_json(rc.physics, rc.order)},
                      {"energy", energy_to_json(b)},
                      {"warnings", warnings},
                      {"meta", {{"version", kVersion}, {"task", to_string(rc.task)}}}};
    if (rc.oracle_check) out.result["oracle"] = oracle_block_state(rc, state, pot, b);

    out.summary = std::string("evaluate boundary=") + to_string(rc.boundary) +
                  " order=" + std::to_string(rc.order) + " mode=" + to_string(rc.mode) +
                  " total=" + format_double(b.total) + " kinetic=" + format_double(b.kinetic) +
                  " potential=" + format_double(b.potential) +
                  " validity_ratio=" + format_double(b.validity_ratio) +
                  summary_warning_suffix(warnings);
    return out;
}

inline RunOutcome run_vqe(const RunConfig& rc) {
    const PotentialSpec pot = resolve_potential(rc.potential, rc.physics);

    AnsatzSpec spec;
    spec.kind = rc.ansatz.kind;
    spec.qubits = rc.physics.qubits;
    spec.layers = rc.ansatz.layers;
    spec.init = rc.ansatz.init;
    spec.initial_params = rc.ansatz.initial_params;

    ObjectiveSpec objective;
    objective.physics = rc.physics;
    objective.bc = rc.boundary;
    objective.order = rc.order;
    objective.pot = pot;
    objective.plan = plan_for(rc);
    objective.variant = rc.dbc_variant;

    VqeOptions options;
    options.optimizer = rc.optimizer.kind;
    options.max_evals = rc.optimizer.max_evals;
    options.tol = rc.optimizer.tol;
    options.restarts = rc.optimizer.restarts;
    options.workers = rc.workers;
    options.seed = rc.seed;

    const VqeResult vr = minimize(spec, objective, options);
    const WaveFunction best = build_ansatz(spec, vr.best_params, rc.physics);

    std::vector<std::string> warnings;
    collect_warnings(rc, vr.breakdown, best, warnings);
    if (!vr.converged) {
        warnings.push_back("optimiser budget exhausted before convergence");
    }

    json energy = energy_to_json(vr.breakdown);
    energy["vqe"] = json{{"best_energy", vr.best_energy},
                         {"best_params", vr.best_params},
                         {"evaluations", vr.evaluations},
                         {"iterations", vr.iterations},
                         {"converged", vr.converged},
                         {"restarts", rc.optimizer.restarts},
                         {"best_restart", vr.best_restart},
                         {"restart_energies", vr.restart_energies},
                         {"optimizer", to_string(rc.optimizer.kind)}};

    RunOutcome out;
    out.result = json{{"config", config_to_json(rc)},
                      {"coefficients", coefficients_to_json(rc.physics, rc.order)},
                      {"energy", std::move(energy)},
                      {"warnings", warnings},
                      {"meta", {{"version", kVersion}, {"task", to_string(rc.task)}}}};
    if (rc.oracle_check) out.result["oracle"] = oracle_block_vqe(rc, pot, vr);

    out.summary = std::string("vqe boundary=") + to_string(rc.boundary) +
                  " order=" + std::to_string(rc.order) + " mode=" + to_string(rc.mode) +
                  " best_energy=" + format_double(vr.best_energy) +
                  " converged=" + (vr.converged ? "true" : "false") +
                  " restarts=" + std::to_string(rc.optimizer.restarts) +
                  " validity_ratio=" + format_double(vr.breakdown.validity_ratio) +
                  summary_warning_suffix(warnings);
    return out;
}

struct SweepPoint {
    double axis_value = 0.0;
    RunConfig config;
    WaveFunction state;
    PotentialSpec pot;
    EnergyBreakdown breakdown;
    std::optional<double> oracle_gap;
};

inline RunConfig apply_axis(const RunConfig& base, SweepAxis axis, double value, int index) {
    RunConfig point = base;
    switch (axis) {
        case SweepAxis::Qubits:
            point.physics =
                PhysicsConfig(base.physics.mass, base.physics.light_speed,
                              base.physics.planck, int(value));
            break;
        case SweepAxis::Order:
            point.order = int(value);
            break;
        case SweepAxis::Shots:
            point.shots = static_cast<long long>(value);
            break;
        case SweepAxis::ComptonRatio:
            point.physics = PhysicsConfig::from_compton_ratio(
                base.physics.mass, base.physics.light_speed, base.physics.qubits, value);
            break;
    }
    // Independent noise per point, still fully determined by the base seed.
    point.seed = derive_stream_seed(base.seed, 0x5E00ULL + std::uint64_t(index));
    return point;
}

inline RunOutcome run_sweep(const RunConfig& rc) {
    const std::size_t count = rc.sweep.values.size();
    std::vector<SweepPoint> points(count);

    // Resolve every fixture first so configuration problems surface before
    // any computation starts.
    for (std::size_t i = 0; i < count; ++i) {
        points[i].axis_value = rc.sweep.values[i];
        points[i].config = apply_axis(rc, rc.sweep.axis, rc.sweep.values[i], int(i));
        points[i].state = resolve_state(points[i].config.state, points[i].config.physics);
        points[i].pot =
            resolve_potential(points[i].config.potential, points[i].config.physics);
    }

    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                SweepPoint& p = points[i];
                p.breakdown = total_energy(p.state, p.config.physics, p.config.boundary,
                                           p.config.order, p.pot, plan_for(p.config),
                                           p.config.dbc_variant, p.config.allow_complex);
                if (p.config.physics.qubits <= kMaxDenseQubits) {
                    p.oracle_gap = std::abs(
                        p.breakdown.total - dense_total_expectation(p.config, p.state, p.pot));
                }
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t thread_count = std::min<std::size_t>(
        rc.workers > 0 ? std::size_t(rc.workers) : std::size_t(hw), count);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(thread_count);
        for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (failures[i]) std::rethrow_exception(failures[i]);
    }

    std::vector<std::string> warnings;
    json rows = json::array();
    std::string csv = "axis_value,kinetic,potential,total,std_error,oracle_gap\n";
    for (std::size_t i = 0; i < count; ++i) {
        const SweepPoint& p = points[i];
        collect_warnings(p.config, p.breakdown, p.state, warnings,
                         "point " + std::to_string(i) + " (" + to_string(rc.sweep.axis) + "=" +
                             format_double(p.axis_value) + "): ");
        json row{{"axis_value", p.axis_value},
                 {"kinetic", p.breakdown.kinetic},
                 {"potential", p.breakdown.potential},
                 {"total", p.breakdown.total},
                 {"std_error", p.breakdown.std_error},
                 {"validity_ratio", p.breakdown.validity_ratio},
                 {"seed", p.config.seed}};
        row["oracle_gap"] = p.oracle_gap ? json(*p.oracle_gap) : json(nullptr);
        rows.push_back(std::move(row));

        csv += format_double(p.axis_value) + "," + format_double(p.breakdown.kinetic) + "," +
               format_double(p.breakdown.potential) + "," + format_double(p.breakdown.total) +
               "," + format_double(p.breakdown.std_error) + "," +
               (p.oracle_gap ? format_double(*p.oracle_gap) : std::string{}) + "\n";
    }

    RunOutcome out;
    out.result = json{{"config", config_to_json(rc)},
                      {"coefficients", coefficients_to_json(rc.physics, rc.order)},
                      {"energy", {{"axis", to_string(rc.sweep.axis)}, {"rows", std::move(rows)}}},
                      {"warnings", warnings},
                      {"meta",
                       {{"version", kVersion},
                        {"task", to_string(rc.task)},
                        {"points", count}}}};
    out.csv = std::move(csv);
    out.summary = std::string("sweep axis=") + to_string(rc.sweep.axis) +
                  " points=" + std::to_string(count) + " mode=" + to_string(rc.mode) +
                  " boundary=" + to_string(rc.boundary) +
                  " order=" + std::to_string(rc.order) + summary_warning_suffix(warnings);
    return out;
}

}  // namespace detail

inline RunOutcome run(const RunConfig& rc) {
    switch (rc.task) {
        case Task::Evaluate: return detail::run_evaluate(rc);
        case Task::Vqe: return detail::run_vqe(rc);
        case Task::Sweep: return detail::run_sweep(rc);
    }
    throw ConfigError("unknown task");
}

// ---------------------------------------------------------------------------
// File I/O.

inline std::string csv_sibling_path(const std::string& json_path) {
    const std::string suffix = ".json";
    if (json_path.size() > suffix.size() &&
        json_path.compare(json_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return json_path.substr(0, json_path.size() - suffix.size()) + ".csv";
    }
    return json_path + ".csv";
}

inline nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("error while reading config file: " + path);
    try {
        return nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("error while writing output file: " + path);
}

// Writes the JSON result (and, for sweeps, the CSV next to it).
inline void write_outcome(const RunOutcome& outcome, const std::string& json_path) {
    write_text_file(json_path, outcome.result.dump(2) + "\n");
    if (!outcome.csv.empty()) write_text_file(csv_sibling_path(json_path), outcome.csv);
}

}  // namespace relgrid
