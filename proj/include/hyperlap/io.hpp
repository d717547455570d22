#ifndef HYPERLAP_IO_HPP
#define HYPERLAP_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "exponents.hpp"
#include "identities.hpp"
#include "radial_ode.hpp"
#include "residual.hpp"
#include "shooting.hpp"

namespace hyperlap::io {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

// Rounded to 15 significant digits; non-finite values become null.
inline Json num(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return std::stod(fmt(x));
}

inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex(std::uint64_t h)
{
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

inline Json params_json(const ProblemParams& P)
{
    return Json{{"n", P.n}, {"p", num(P.p)}, {"q", num(P.q)}, {"lambda", num(P.lambda)}};
}

// Provenance block: inputs plus a content hash of their canonical dump.
inline Json provenance(const std::string& command, const Json& inputs)
{
    return Json{{"tool", "hyperlap"}, {"command", command}, {"inputs", inputs},
                {"input_hash", hex(fnv1a(command + "\n" + inputs.dump()))}};
}

inline void ensure_parent(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << text;
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline Json read_json(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot read " + path.string());
    return Json::parse(f);
}

inline std::string profile_csv(const RadialProfile& pr)
{
    std::string s = "t,u,du,flux\n";
    for (std::size_t i = 0; i < pr.size(); ++i)
        s += fmt(pr.t[i]) + "," + fmt(pr.u[i]) + "," + fmt(pr.du[i]) + "," + fmt(pr.flux[i]) + "\n";
    return s;
}

inline void write_profile_csv(const std::filesystem::path& path, const RadialProfile& pr) { write_text(path, profile_csv(pr)); }

inline std::vector<std::string> split(const std::string& line, char sep = ',')
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep))
        out.push_back(cell);
    return out;
}

inline RadialProfile read_profile_csv(const std::filesystem::path& path, const ProblemParams& P)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(f, line) || line != "t,u,du,flux")
        throw IoError(path.string() + ": expected header t,u,du,flux");
    RadialProfile pr;
    pr.params = P;
    std::size_t row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty())
            continue;
        auto c = split(line);
        if (c.size() != 4)
            throw IoError(path.string() + ": row " + std::to_string(row) + " needs 4 columns");
        try {
            pr.push(std::stod(c[0]), std::stod(c[1]), std::stod(c[2]), std::stod(c[3]));
        } catch (const std::exception&) {
            throw IoError(path.string() + ": row " + std::to_string(row) + " is not numeric");
        }
    }
    pr.validate(1e-8);
    return pr;
}

inline std::string scan_csv(const ScanReport& r)
{
    std::string s = "alpha,classification,cross_time,logderiv_tail\n";
    for (const auto& row : r.rows)
        s += fmt(row.alpha) + "," + to_string(row.classification) + ","
             + (row.cross_time ? fmt(*row.cross_time) : std::string()) + "," + fmt(row.logderiv_tail) + "\n";
    return s;
}

inline std::string residual_csv(const ResidualReport& r, const std::vector<bool>& sign_ok)
{
    std::string s = "t,residual,claimed_sign_ok\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i)
        s += fmt(r.grid[i]) + "," + fmt(r.pointwise[i]) + "," + (sign_ok[i] ? "1" : "0") + "\n";
    return s;
}

inline Json pohozaev_json(const PohozaevReport& r)
{
    return Json{{"R", num(r.R)},
                {"res1", num(r.res1)},
                {"res2", num(r.res2)},
                {"rel1", num(r.rel1())},
                {"rel2", num(r.rel2())},
                {"contradiction_term", num(r.contradiction_term)},
                {"boundary_remainder", num(r.boundary_remainder)},
                {"combined_gap", num(r.combined_gap)},
                {"contradiction_scale", num(r.contradiction_scale)}};
}

inline Json suite_json(const SuiteReport& rep)
{
    Json rows = Json::array();
    for (const auto& r : rep.rows)
        rows.push_back(Json{{"suite", r.suite},
                            {"subject", r.subject},
                            {"metric", r.metric},
                            {"value", num(r.value)},
                            {"threshold", num(r.threshold)},
                            {"passed", r.passed},
                            {"note", r.note}});
    return rows;
}

// Fixed-width plain-text table, one row per check.
inline std::string table(const std::vector<std::vector<std::string>>& cells)
{
    std::vector<std::size_t> w;
    for (const auto& row : cells)
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (w.size() <= j)
                w.push_back(0);
            w[j] = std::max(w[j], row[j].size());
        }
    std::string out;
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            line += row[j];
            if (j + 1 < row.size())
                line += std::string(w[j] - row[j].size() + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out += line + "\n";
    }
    return out;
}

inline std::vector<std::vector<std::string>> suite_cells(const Json& rows)
{
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        auto show = [](const Json& v) { return v.is_null() ? std::string("null") : fmt(v.get<double>()); };
        cells.push_back({r.at("passed").get<bool>() ? "PASS" : "FAIL", r.at("suite").get<std::string>(),
                         r.at("subject").get<std::string>(), r.at("metric").get<std::string>(), show(r.at("value")),
                         show(r.at("threshold")), r.at("note").get<std::string>()});
    }
    return cells;
}

} // namespace hyperlap::io

#endif
