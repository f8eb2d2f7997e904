#include "qdirac/config.hpp"

#include <fstream>
#include <sstream>

#include "qdirac/errors.hpp"
#include "qdirac/io.hpp"

namespace qdirac {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean: '" + v + "'");
}

int parse_int(const std::string& v) {
    std::size_t pos = 0;
    int r = 0;
    try {
        r = std::stoi(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("invalid integer: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("invalid integer: '" + v + "'");
    return r;
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key,
                       const std::string& value) {
    if (key == "q") cfg.q = parse_double(value);
    else if (key == "a") cfg.a = parse_double(value);
    else if (key == "depth") cfg.depth = parse_int(value);
    else if (key == "k11") cfg.boundary.k11 = parse_double(value);
    else if (key == "k12") cfg.boundary.k12 = parse_double(value);
    else if (key == "k21") cfg.boundary.k21 = parse_double(value);
    else if (key == "k22") cfg.boundary.k22 = parse_double(value);
    else if (key == "potential_p") cfg.potential_p = value;
    else if (key == "potential_r") cfg.potential_r = value;
    else if (key == "count") cfg.count = parse_int(value);
    else if (key == "precision_bits") cfg.precision_bits = parse_int(value);
    else if (key == "extended_bits") cfg.extended_bits = parse_int(value);
    else if (key == "refine_tol") cfg.refine_tol = parse_double(value);
    else if (key == "solver_tol") cfg.solver_tol = parse_double(value);
    else if (key == "both_signs") cfg.both_signs = parse_bool(value);
    else if (key == "scan_points_per_octave")
        cfg.scan_points_per_octave = parse_int(value);
    else if (key == "output") cfg.output = value;
    else if (key == "format") cfg.format = value;
    else throw ConfigError("unknown config key: '" + key + "'");
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        apply_config_line(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

void validate_config(const RunConfig& cfg) {
    if (!(cfg.q > 0.0) || !(cfg.q < 1.0)) throw ConfigError("q must lie in (0,1)");
    if (!(cfg.a > 0.0)) throw ConfigError("a must be positive");
    if (cfg.depth < 1) throw ConfigError("depth must be >= 1");
    if (cfg.count < 1) throw ConfigError("count must be >= 1");
    if (cfg.precision_bits < 53) throw ConfigError("precision_bits must be >= 53");
    if (cfg.extended_bits < cfg.precision_bits)
        throw ConfigError("extended_bits must be >= precision_bits");
    if (!(cfg.refine_tol > 0.0)) throw ConfigError("refine_tol must be positive");
    if (!(cfg.solver_tol > 0.0)) throw ConfigError("solver_tol must be positive");
    if (cfg.scan_points_per_octave < 2)
        throw ConfigError("scan_points_per_octave must be >= 2");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be csv or json");
    try {
        validate_boundary(cfg.boundary);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

LatticeFn make_potential(const std::string& descriptor, QLatticePtr lattice) {
    if (descriptor == "zero")
        return sample(std::move(lattice), [](double) { return 0.0; }, 0.0);
    if (descriptor.rfind("constant:", 0) == 0) {
        const double c = parse_double(descriptor.substr(9));
        return sample(std::move(lattice), [c](double) { return c; }, c);
    }
    if (descriptor.rfind("linear:", 0) == 0) {
        const double c = parse_double(descriptor.substr(7));
        return sample(std::move(lattice), [c](double x) { return c * x; }, 0.0);
    }
    if (descriptor.rfind("csv:", 0) == 0) {
        const std::string path = descriptor.substr(4);
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open potential CSV: " + path);
        return read_lattice_fn_csv(in, std::move(lattice));
    }
    throw ConfigError("unknown potential descriptor: '" + descriptor + "'");
}

Problem make_problem(const RunConfig& cfg) {
    validate_config(cfg);
    QLatticePtr lattice = make_lattice(cfg.q, cfg.a, cfg.depth);
    LatticeFn p = make_potential(cfg.potential_p, lattice);
    LatticeFn r = make_potential(cfg.potential_r, lattice);
    return Problem(lattice, std::move(p), std::move(r), cfg.boundary);
}

QTrigContext make_context(const RunConfig& cfg) {
    return QTrigContext(cfg.q, cfg.precision_bits, cfg.extended_bits);
}

}  // namespace qdirac
