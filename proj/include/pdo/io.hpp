#pragma once

#include <string>

#include "pdo/analysis.hpp"
#include "pdo/sim.hpp"

namespace pdo {

/// Shortest decimal string that parses back to exactly the same double
/// (std::to_chars). Keeps repeated runs byte-identical, which the output
/// contract depends on.
std::string format_double(double value);

/// CSV renderings. Headers are part of the public contract:
///   sweep    -> r,fd_est,fd_linear,deviation
///   trace    -> n,x,v,bit,level
///   spectrum -> freq_norm,freq_hz,magnitude
///   compare  -> r,fd_single,fd_double,dev_single,dev_double,
///               injected_single,injected_double
/// Cells for estimates a diverged run never produced are left empty.
std::string sweep_csv(const SweepResult& result);
std::string trace_csv(const SimTrace& trace);
std::string spectrum_csv(const SpectrumResult& spectrum);
std::string comparison_csv(const TopologyComparison& comparison);

/// JSON renderings of the same results, carrying the aggregates that the
/// CSV rows alone do not (mean deviations, injected totals, estimator name).
std::string sweep_json(const SweepResult& result);
std::string comparison_json(const TopologyComparison& comparison);
std::string spectrum_json(const SpectrumResult& spectrum);

/// Writes `content` to `path`, throwing IoError when the file cannot be
/// created or fully written.
void write_file(const std::string& path, const std::string& content);

}  // namespace pdo
