#include "qdirac/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "qdirac/errors.hpp"

namespace qdirac {

std::string fmt_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError("invalid number: '" + s + "'");
    return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

bool next_data_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        return true;
    }
    return false;
}

}  // namespace

void write_lattice_fn_csv(std::ostream& os, const LatticeFn& f) {
    os << "n,t,value\n";
    const QLattice& lat = f.lattice();
    for (int n = 0; n <= lat.depth; ++n)
        os << n << ',' << fmt_double(lat.node(n)) << ',' << fmt_double(f.value(n))
           << '\n';
    if (f.ext_value())
        os << "-1," << fmt_double(lat.ext_node) << ',' << fmt_double(*f.ext_value())
           << '\n';
}

std::string lattice_fn_csv(const LatticeFn& f) {
    std::ostringstream ss;
    write_lattice_fn_csv(ss, f);
    return ss.str();
}

LatticeFn read_lattice_fn_csv(std::istream& is, QLatticePtr lattice) {
    std::string line;
    if (!next_data_line(is, line) || line != "n,t,value")
        throw ConfigError("lattice-function CSV: missing 'n,t,value' header");

    std::vector<double> values(lattice->nodes.size(),
                               std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> seen(lattice->nodes.size(), false);
    std::optional<double> ext;

    while (next_data_line(is, line)) {
        auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw ConfigError("lattice-function CSV: expected 3 fields: " + line);
        const int n = static_cast<int>(parse_double(fields[0]));
        const double t = parse_double(fields[1]);
        const double v = parse_double(fields[2]);
        if (n == -1) {
            ext = v;
            continue;
        }
        if (n < 0 || n > lattice->depth)
            throw ConfigError("lattice-function CSV: node index out of range");
        const double tn = lattice->node(n);
        if (std::fabs(t - tn) > 1e-9 * std::max(std::fabs(tn), 1e-300))
            throw ConfigError("lattice-function CSV: node " + std::to_string(n) +
                              " position mismatch");
        values[static_cast<std::size_t>(n)] = v;
        seen[static_cast<std::size_t>(n)] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw ConfigError("lattice-function CSV: missing node " +
                              std::to_string(i));
    return LatticeFn(std::move(lattice), std::move(values), ext);
}

void write_zero_table_csv(std::ostream& os, const ZeroTable& table) {
    os << "m,zero,residual\n";
    for (std::size_t i = 0; i < table.zeros.size(); ++i)
        os << (i + 1) << ',' << fmt_double(table.zeros[i]) << ','
           << fmt_double(table.residuals[i]) << '\n';
}

ZeroTable read_zero_table_csv(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line) || line != "m,zero,residual")
        throw ConfigError("zero-table CSV: missing 'm,zero,residual' header");
    ZeroTable t;
    while (next_data_line(is, line)) {
        auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw ConfigError("zero-table CSV: expected 3 fields: " + line);
        t.zeros.push_back(parse_double(fields[1]));
        t.residuals.push_back(parse_double(fields[2]));
    }
    return t;
}

void write_spectrum_csv(std::ostream& os, const SpectrumReport& report) {
    os << "m,lambda,q_norm_sq,delta_prime,residual,asymptotic_ratio\n";
    for (const auto& e : report.eigenvalues)
        os << e.index << ',' << fmt_double(e.lambda) << ','
           << fmt_double(e.q_norm_sq) << ',' << fmt_double(e.delta_prime) << ','
           << fmt_double(e.residual) << ',' << fmt_double(e.asymptotic_ratio)
           << '\n';
}

void write_orthogonality_csv(std::ostream& os, const SpectrumReport& report) {
    os << "m";
    for (const auto& e : report.eigenvalues) os << ',' << e.index;
    os << '\n';
    for (std::size_t i = 0; i < report.orthogonality_matrix.size(); ++i) {
        os << report.eigenvalues[i].index;
        for (double v : report.orthogonality_matrix[i]) os << ',' << fmt_double(v);
        os << '\n';
    }
}

std::string spectrum_json(const SpectrumReport& report) {
    nlohmann::json j;
    j["eigenvalues"] = nlohmann::json::array();
    for (const auto& e : report.eigenvalues) {
        nlohmann::json je;
        je["m"] = e.index;
        je["lambda"] = e.lambda;
        je["q_norm_sq"] = e.q_norm_sq;
        je["delta_prime"] = e.delta_prime;
        je["residual"] = e.residual;
        if (std::isfinite(e.asymptotic_ratio))
            je["asymptotic_ratio"] = e.asymptotic_ratio;
        else
            je["asymptotic_ratio"] = nullptr;
        je["bracket"] = {e.bracket.first, e.bracket.second};
        j["eigenvalues"].push_back(je);
    }
    j["orthogonality_matrix"] = report.orthogonality_matrix;
    j["verification_flags"] = {
        {"reality_ok", report.flags.reality_ok},
        {"orthogonality_ok", report.flags.orthogonality_ok},
        {"simplicity_ok", report.flags.simplicity_ok},
        {"asymptotics_ok", report.flags.asymptotics_ok},
        {"orthogonality_max", report.flags.orthogonality_max},
        {"simplicity_max_defect", report.flags.simplicity_max_defect},
        {"asymptotic_max_dev", report.flags.asymptotic_max_dev},
        {"missed_eigenvalue_warning", report.flags.missed_eigenvalue_warning},
        {"precision_loss", report.flags.precision_loss},
    };
    return j.dump(2) + "\n";
}

std::string error_json(int code, const std::string& message,
                       const std::string& context) {
    nlohmann::json j = {{"code", code}, {"message", message}, {"context", context}};
    return j.dump() + "\n";
}

}  // namespace qdirac
