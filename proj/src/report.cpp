#include "obslab/report.hpp"

#include "obslab/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>

namespace obslab {

void Report::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw Error("report row width differs from header");
    rows.push_back(std::move(row));
}

std::string cell(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}
std::string cell(long long x) { return fmt::format("{}", x); }
std::string cell(std::size_t x) { return fmt::format("{}", x); }
std::string cell(int x) { return fmt::format("{}", x); }
std::string cell(bool x) { return x ? "1" : "0"; }
std::string cell(const std::string& s) { return s; }

ordered_json num(double x) {
    if (std::isfinite(x)) return x;
    return cell(x);
}

ordered_json lognum_json(const LogNum& x) {
    ordered_json j;
    j["ln"] = num(x.is_zero() ? -INFINITY : x.ln_mag);
    j["sign"] = x.sign;
    double v = x.to_real();
    j["value"] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
    return j;
}

ordered_json tower_json(const Tower& t) {
    ordered_json j;
    j["tower"] = t.str();
    j["height"] = t.height;
    double v = t.to_double();
    j["value"] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
    return j;
}

namespace {
std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += quote(fields[i]);
    }
    out += "\r\n";
}
}  // namespace

std::string csv_text(const Report& r) {
    std::string out;
    append_line(out, r.header);
    for (const auto& row : r.rows) append_line(out, row);
    return out;
}

std::string json_text(const ordered_json& config, const Report& r) {
    ordered_json j;
    j["experiment"] = config.at("experiment");
    j["seed"] = config.at("seed");
    j["config"] = config;
    j["summary"] = r.summary;
    j["violations"] = r.violations;
    return j.dump(2) + "\n";
}

void write_report(const std::string& prefix, const ordered_json& config, const Report& r) {
    std::filesystem::path base(prefix);
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    auto put = [](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open " + path + " for writing");
        f << text;
        if (!f) throw Error("write to " + path + " failed");
    };
    put(prefix + ".csv", csv_text(r));
    put(prefix + ".json", json_text(config, r));
}

}  // namespace obslab
