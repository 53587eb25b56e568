#include "pdo/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "json.hpp"
#include "pdo/error.hpp"

namespace pdo {

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) {
        throw Error("failed to format a double");
    }
    return std::string(buf, end);
}

namespace {

void append_cell(std::string& out, const std::optional<double>& value) {
    if (value) {
        out += format_double(*value);
    }
}

nlohmann::ordered_json point_json(const SweepPoint& p) {
    nlohmann::ordered_json row;
    row["r"] = p.ratio;
    if (p.fd_estimated) {
        row["fd_est"] = *p.fd_estimated;
    } else {
        row["fd_est"] = nullptr;
    }
    row["fd_linear"] = p.fd_linear;
    if (p.deviation) {
        row["deviation"] = *p.deviation;
    } else {
        row["deviation"] = nullptr;
    }
    return row;
}

const char* estimator_name(Estimator estimator) {
    return estimator == Estimator::Spectrum ? "spectrum" : "transitions";
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
    std::string out = "r,fd_est,fd_linear,deviation\n";
    for (const SweepPoint& p : result.points) {
        out += format_double(p.ratio);
        out += ',';
        append_cell(out, p.fd_estimated);
        out += ',';
        out += format_double(p.fd_linear);
        out += ',';
        append_cell(out, p.deviation);
        out += '\n';
    }
    return out;
}

std::string trace_csv(const SimTrace& trace) {
    std::string out = "n,x,v,bit,level\n";
    const std::size_t n = trace.positions.size();
    for (std::size_t i = 0; i < n; ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(trace.positions[i]);
        out += ',';
        out += format_double(trace.velocities[i]);
        out += ',';
        out += static_cast<char>('0' + trace.bits.bits[i]);
        out += ',';
        out += std::to_string(trace.pulse_levels[i]);
        out += '\n';
    }
    return out;
}

std::string spectrum_csv(const SpectrumResult& spectrum) {
    std::string out = "freq_norm,freq_hz,magnitude\n";
    const std::size_t n = spectrum.bin_frequencies.size();
    out.reserve(out.size() + n * 48);
    for (std::size_t i = 0; i < n; ++i) {
        out += format_double(spectrum.bin_frequencies[i]);
        out += ',';
        out += format_double(spectrum.bin_frequencies_hz[i]);
        out += ',';
        out += format_double(spectrum.magnitudes[i]);
        out += '\n';
    }
    return out;
}

std::string comparison_csv(const TopologyComparison& comparison) {
    std::string out =
        "r,fd_single,fd_double,dev_single,dev_double,"
        "injected_single,injected_double\n";
    for (const ComparisonPoint& p : comparison.points) {
        out += format_double(p.ratio);
        out += ',';
        append_cell(out, p.fd_single);
        out += ',';
        append_cell(out, p.fd_double);
        out += ',';
        append_cell(out, p.dev_single);
        out += ',';
        append_cell(out, p.dev_double);
        out += ',';
        out += format_double(p.injected_single);
        out += ',';
        out += format_double(p.injected_double);
        out += '\n';
    }
    return out;
}

std::string sweep_json(const SweepResult& result) {
    nlohmann::ordered_json doc;
    doc["estimator"] = estimator_name(result.estimator);
    doc["rho"] = result.base_config.resonator.rho();
    doc["f0"] = result.base_config.resonator.f0();
    doc["points"] = nlohmann::ordered_json::array();
    for (const SweepPoint& p : result.points) {
        doc["points"].push_back(point_json(p));
    }
    return doc.dump(2) + "\n";
}

std::string comparison_json(const TopologyComparison& comparison) {
    nlohmann::ordered_json doc;
    doc["taps_single"] = comparison.taps_single;
    doc["taps_double"] = {comparison.taps_double_1, comparison.taps_double_2};
    doc["mean_dev_single"] = comparison.mean_dev_single;
    doc["mean_dev_double"] = comparison.mean_dev_double;
    doc["injected_total_single"] = comparison.injected_total_single;
    doc["injected_total_double"] = comparison.injected_total_double;
    doc["points"] = nlohmann::ordered_json::array();
    for (const ComparisonPoint& p : comparison.points) {
        nlohmann::ordered_json row;
        row["r"] = p.ratio;
        row["fd_single"] = p.fd_single ? nlohmann::ordered_json(*p.fd_single)
                                       : nlohmann::ordered_json(nullptr);
        row["fd_double"] = p.fd_double ? nlohmann::ordered_json(*p.fd_double)
                                       : nlohmann::ordered_json(nullptr);
        row["dev_single"] = p.dev_single
                                ? nlohmann::ordered_json(*p.dev_single)
                                : nlohmann::ordered_json(nullptr);
        row["dev_double"] = p.dev_double
                                ? nlohmann::ordered_json(*p.dev_double)
                                : nlohmann::ordered_json(nullptr);
        row["injected_single"] = p.injected_single;
        row["injected_double"] = p.injected_double;
        doc["points"].push_back(row);
    }
    return doc.dump(2) + "\n";
}

std::string spectrum_json(const SpectrumResult& spectrum) {
    nlohmann::ordered_json doc;
    doc["peak_freq_norm"] = spectrum.peak_frequency;
    doc["peak_freq_hz"] = spectrum.peak_frequency_hz;
    doc["peak_magnitude"] = spectrum.peak_magnitude;
    doc["bins"] = nlohmann::ordered_json::array();
    const std::size_t n = spectrum.bin_frequencies.size();
    for (std::size_t i = 0; i < n; ++i) {
        doc["bins"].push_back({{"freq_norm", spectrum.bin_frequencies[i]},
                               {"freq_hz", spectrum.bin_frequencies_hz[i]},
                               {"magnitude", spectrum.magnitudes[i]}});
    }
    return doc.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw IoError("short write to '" + path + "'");
    }
}

}  // namespace pdo
