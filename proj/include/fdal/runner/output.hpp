#pragma once

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fdal/runner/scenarios.hpp"

namespace fdal::runner {

namespace fs = std::filesystem;

inline constexpr const char* output_dir_env = "FDAL_OUTPUT_DIR";

/// Output directory: explicit value, then $FDAL_OUTPUT_DIR, then the working directory.
inline fs::path output_dir(const std::optional<std::string>& explicit_dir)
{
    if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
    if (const char* env = std::getenv(output_dir_env); env && *env) return env;
    return fs::current_path();
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Long-format CSV: [prefix columns,]t,x,u_real[,u_imag]
class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::vector<std::string> prefix, bool complex)
        : out_(path, std::ios::binary), complex_(complex)
    {
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        for (const auto& p : prefix) out_ << p << ',';
        out_ << "t,x,u_real" << (complex ? ",u_imag" : "") << '\n';
    }

    void write(const ScenarioResult& r, const std::vector<std::string>& prefix = {})
    {
        std::string pre;
        for (const auto& p : prefix) pre += p + ',';
        for (const auto& f : r.frames) {
            const std::string ts = format_double(f.t);
            for (std::size_t i = 0; i < f.x.size(); ++i) {
                out_ << pre << ts << ',' << format_double(f.x[i]) << ',' << format_double(f.u[i].real());
                if (complex_) out_ << ',' << format_double(f.u[i].imag());
                out_ << '\n';
            }
        }
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    bool complex_;
};

inline void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

/// Report for a single solve.
inline json solve_report(const ExperimentConfig& c, const ScenarioResult& r)
{
    json j;
    j["schema"] = report_schema;
    j["kind"] = "solve";
    j["scenario"] = c.scenario;
    j["config"] = c.source;
    j["metrics"] = r.metrics;
    j["tolerances"] = json::object();
    j["verdicts"] = {{"finite", true}};
    j["pass"] = true;
    return j;
}

} // namespace fdal::runner
