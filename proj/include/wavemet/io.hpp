#pragma once

// Text waveform files. Header lines are `# key=value`; required keys are
// kind (real | complex | spectrum) plus fs_hz/t0_s for time records or
// df_hz/f0_hz/sided/n_time for spectra. Rates are exact integer-ratio
// strings ("num/den" or a bare integer); floats are rejected. Data rows are
// time_s,value / time_s,re,im / freq_hz,re,im with an axis that must agree
// with the declared rate to 1e-12 relative. UTF-8, LF, decimal point.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wavemet/modulation.hpp"
#include "wavemet/rational.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

enum class FileKind { real, complex_, spectrum };

struct ParsedWaveformFile {
    FileKind kind = FileKind::real;
    RealWaveform real;
    ComplexWaveform complex_wf;
    Spectrum spectrum;
    Rational rate;           // fs_hz or df_hz as declared
    std::string mod_name;    // optional `mod=` header key, empty if absent
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<double> split_row(const std::string& line, const std::string& path, int lineno) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(cell, &pos);
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size()) throw std::invalid_argument(cell);
            out.push_back(v);
        } catch (const std::exception&) {
            throw validation_error(path + ":" + std::to_string(lineno) +
                                   ": cannot parse numeric cell '" + cell + "'");
        }
    }
    return out;
}

inline void check_axis(double actual, double expected, const std::string& path, int lineno) {
    const double scale = std::max({std::abs(actual), std::abs(expected), 1e-300});
    if (std::abs(actual - expected) > 1e-12 * scale)
        throw validation_error(path + ":" + std::to_string(lineno) +
                               ": axis value " + fmt_double(actual) +
                               " inconsistent with declared rate (expected " +
                               fmt_double(expected) + ")");
}

}  // namespace detail

inline ParsedWaveformFile parse_waveform_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");

    std::map<std::string, std::string> keys;
    std::vector<std::pair<int, std::string>> rows;
    std::string line;
    int lineno = 0;
    bool column_header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            while (!body.empty() && body.front() == ' ') body.erase(body.begin());
            const auto eq = body.find('=');
            if (eq != std::string::npos) keys[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        if (!column_header_seen) {
            column_header_seen = true;
            bool alpha = false;
            for (char c : line)
                if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E') alpha = true;
            if (alpha) continue;  // column-name row
        }
        rows.emplace_back(lineno, line);
    }

    auto require = [&](const std::string& key) -> const std::string& {
        const auto it = keys.find(key);
        if (it == keys.end())
            throw validation_error(path + ": missing required header key '" + key + "'");
        return it->second;
    };
    const std::string& kind = require("kind");
    if (rows.empty()) throw validation_error(path + ": no data rows");

    ParsedWaveformFile out;
    if (auto it = keys.find("mod"); it != keys.end()) out.mod_name = it->second;

    const std::size_t n = rows.size();
    if (kind == "real" || kind == "complex") {
        out.rate = parse_rational(require("fs_hz"));
        if (out.rate.num == 0) throw validation_error(path + ": fs_hz must be positive");
        const double t0 = keys.count("t0_s") ? std::stod(keys.at("t0_s")) : 0.0;
        const double dt = out.rate.inverse().value();
        const std::size_t ncols = (kind == "real") ? 2 : 3;
        std::vector<cplx> samples(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto cells = detail::split_row(rows[i].second, path, rows[i].first);
            if (cells.size() != ncols)
                throw validation_error(path + ":" + std::to_string(rows[i].first) +
                                       ": expected " + std::to_string(ncols) + " columns, got " +
                                       std::to_string(cells.size()));
            detail::check_axis(cells[0], t0 + static_cast<double>(i) * dt, path, rows[i].first);
            samples[i] = (ncols == 2) ? cplx(cells[1], 0.0) : cplx(cells[1], cells[2]);
        }
        if (kind == "real") {
            out.kind = FileKind::real;
            out.real.dt = dt;
            out.real.t0 = t0;
            out.real.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) out.real.samples[i] = samples[i].real();
            validate(out.real, path.c_str());
        } else {
            out.kind = FileKind::complex_;
            out.complex_wf.dt = dt;
            out.complex_wf.t0 = t0;
            out.complex_wf.samples = std::move(samples);
            validate(out.complex_wf, path.c_str());
        }
    } else if (kind == "spectrum") {
        out.rate = parse_rational(require("df_hz"));
        if (out.rate.num == 0) throw validation_error(path + ": df_hz must be positive");
        const double f0 = keys.count("f0_hz") ? std::stod(keys.at("f0_hz")) : 0.0;
        const std::string& sided = require("sided");
        if (sided != "single" && sided != "double")
            throw validation_error(path + ": sided must be 'single' or 'double'");
        out.kind = FileKind::spectrum;
        out.spectrum.df = out.rate.value();
        out.spectrum.f0 = f0;
        out.spectrum.sided = (sided == "single") ? Sidedness::single_sided : Sidedness::double_sided;
        out.spectrum.length_meta = static_cast<std::size_t>(std::stoull(require("n_time")));
        out.spectrum.t0 = keys.count("t0_s") ? std::stod(keys.at("t0_s")) : 0.0;
        out.spectrum.bins.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto cells = detail::split_row(rows[i].second, path, rows[i].first);
            if (cells.size() != 3)
                throw validation_error(path + ":" + std::to_string(rows[i].first) +
                                       ": expected 3 columns, got " + std::to_string(cells.size()));
            detail::check_axis(cells[0], f0 + static_cast<double>(i) * out.spectrum.df,
                               path, rows[i].first);
            out.spectrum.bins[i] = cplx(cells[1], cells[2]);
        }
        validate(out.spectrum, path.c_str());
    } else {
        throw validation_error(path + ": unknown kind '" + kind + "'");
    }
    return out;
}

inline void write_real_waveform(const std::string& path, const RealWaveform& w,
                                const Rational& fs_hz) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "# kind=real\n# fs_hz=" << fs_hz.str() << "\n# t0_s=" << detail::fmt_double(w.t0)
        << "\ntime_s,volts\n";
    const double dt = fs_hz.inverse().value();
    for (std::size_t i = 0; i < w.size(); ++i)
        out << detail::fmt_double(w.t0 + static_cast<double>(i) * dt) << ','
            << detail::fmt_double(w.samples[i]) << '\n';
    if (!out) throw io_error("write failed for '" + path + "'");
}

inline void write_complex_waveform(const std::string& path, const ComplexWaveform& w,
                                   const Rational& fs_hz, const std::string& mod_name = "") {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "# kind=complex\n# fs_hz=" << fs_hz.str() << "\n# t0_s=" << detail::fmt_double(w.t0)
        << "\n";
    if (!mod_name.empty()) out << "# mod=" << mod_name << "\n";
    out << "time_s,re,im\n";
    const double dt = fs_hz.inverse().value();
    for (std::size_t i = 0; i < w.size(); ++i)
        out << detail::fmt_double(w.t0 + static_cast<double>(i) * dt) << ','
            << detail::fmt_double(w.samples[i].real()) << ','
            << detail::fmt_double(w.samples[i].imag()) << '\n';
    if (!out) throw io_error("write failed for '" + path + "'");
}

inline void write_spectrum(const std::string& path, const Spectrum& s, const Rational& df_hz) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "# kind=spectrum\n# df_hz=" << df_hz.str() << "\n# f0_hz=" << detail::fmt_double(s.f0)
        << "\n# sided=" << (s.sided == Sidedness::single_sided ? "single" : "double")
        << "\n# n_time=" << s.length_meta << "\n# t0_s=" << detail::fmt_double(s.t0)
        << "\nfreq_hz,re,im\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << detail::fmt_double(s.frequency(i)) << ',' << detail::fmt_double(s.bins[i].real())
            << ',' << detail::fmt_double(s.bins[i].imag()) << '\n';
    if (!out) throw io_error("write failed for '" + path + "'");
}

inline std::vector<std::uint8_t> read_bits_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::vector<std::uint8_t> bits;
    char c;
    int lineno = 1;
    while (in.get(c)) {
        if (c == '\n') { ++lineno; continue; }
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '0' || c == '1') {
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        } else {
            throw validation_error(path + ":" + std::to_string(lineno) +
                                   ": bit stream may contain only 0 and 1");
        }
    }
    if (bits.empty()) throw validation_error(path + ": empty bit stream");
    return bits;
}

inline void write_bits_file(const std::string& path, const std::vector<std::uint8_t>& bits) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out << static_cast<char>('0' + (bits[i] & 1));
        if ((i + 1) % 80 == 0) out << '\n';
    }
    if (bits.size() % 80 != 0) out << '\n';
    if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace wavemet
