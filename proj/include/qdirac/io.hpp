#pragma once

// CSV / JSON emission and ingestion for the exchange formats:
//   LatticeFn        n,t,value            (optional trailing ext row, n = -1)
//   ZeroTable        m,zero,residual
//   SpectrumReport   m,lambda,q_norm_sq,delta_prime,residual,asymptotic_ratio
// Values are printed in shortest round-trip decimal form, so re-ingestion is
// bit-identical.

#include <iosfwd>
#include <string>

#include "qdirac/qcore.hpp"
#include "qdirac/qtrig.hpp"
#include "qdirac/spectrum.hpp"

namespace qdirac {

// Shortest decimal string that parses back to exactly x.
std::string fmt_double(double x);
double parse_double(const std::string& s);

void write_lattice_fn_csv(std::ostream& os, const LatticeFn& f);
std::string lattice_fn_csv(const LatticeFn& f);

// Values must sit on `lattice` (node count and positions are validated).
LatticeFn read_lattice_fn_csv(std::istream& is, QLatticePtr lattice);

void write_zero_table_csv(std::ostream& os, const ZeroTable& table);
ZeroTable read_zero_table_csv(std::istream& is);

void write_spectrum_csv(std::ostream& os, const SpectrumReport& report);
void write_orthogonality_csv(std::ostream& os, const SpectrumReport& report);
std::string spectrum_json(const SpectrumReport& report);

// Machine-readable error object for the CLI's standard error stream.
std::string error_json(int code, const std::string& message,
                       const std::string& context);

}  // namespace qdirac
