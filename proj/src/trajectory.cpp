#include "superrad/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "superrad/error.hpp"
#include "superrad/ode.hpp"

namespace superrad {

void Trajectory::add_column(std::string name, std::vector<double> values) {
    if (values.size() != times.size())
        throw std::invalid_argument("Trajectory: column '" + name + "' length differs from times");
    if (has_column(name)) throw std::invalid_argument("Trajectory: duplicate column '" + name + "'");
    columns.emplace_back(std::move(name), std::move(values));
}

bool Trajectory::has_column(std::string_view name) const {
    for (const auto& c : columns)
        if (c.first == name) return true;
    return false;
}

const std::vector<double>& Trajectory::column(std::string_view name) const {
    for (const auto& c : columns)
        if (c.first == name) return c.second;
    throw std::out_of_range("Trajectory: no column '" + std::string(name) + "'");
}

std::vector<std::string> Trajectory::column_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns) out.push_back(c.first);
    return out;
}

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const Trajectory& traj, const std::filesystem::path& path,
               std::span<const std::string> names) {
    std::vector<const std::vector<double>*> cols;
    std::vector<std::string> header;
    if (names.empty()) {
        for (const auto& c : traj.columns) {
            header.push_back(c.first);
            cols.push_back(&c.second);
        }
    } else {
        for (const auto& n : names) {
            header.push_back(n);
            cols.push_back(&traj.column(n));
        }
    }

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << "time";
    for (const auto& h : header) os << ',' << h;
    os << '\n';
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_real(traj.times[i]);
        for (const auto* c : cols) os << ',' << format_real((*c)[i]);
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_real(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        // from_chars rejects "nan"/"inf" spellings produced by printf on some libcs
        char* end = nullptr;
        v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size()) throw std::runtime_error("bad number in CSV: '" + s + "'");
    }
    return v;
}

}  // namespace

Trajectory read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty CSV: " + path.string());
    auto header = split(line, ',');
    if (header.empty() || header[0] != "time") throw std::runtime_error("CSV must start with 'time'");

    Trajectory traj;
    std::vector<std::vector<double>> cols(header.size() - 1);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) throw std::runtime_error("ragged CSV row in " + path.string());
        traj.times.push_back(parse_real(cells[0]));
        for (std::size_t j = 1; j < cells.size(); ++j) cols[j - 1].push_back(parse_real(cells[j]));
    }
    for (std::size_t j = 1; j < header.size(); ++j) traj.add_column(header[j], std::move(cols[j - 1]));

    auto meta = path;
    meta.replace_extension(".json");
    if (std::filesystem::exists(meta)) traj.metadata = read_metadata(meta);
    return traj;
}

void write_metadata(const Trajectory& traj, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << traj.metadata.dump(2) << '\n';
}

nlohmann::json read_metadata(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return nlohmann::json::parse(is);
}

namespace {

std::string threshold_key(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);  // shortest round-trip form
    return std::string(buf, res.ptr);
}

}  // namespace

void record_crossing(Trajectory& traj, std::string_view column, double threshold, double time) {
    auto& slot = traj.metadata["crossings"][std::string(column)][threshold_key(threshold)];
    slot = std::isnan(time) ? nlohmann::json(nullptr) : nlohmann::json(time);
}

double crossing_time(const Trajectory& traj, std::string_view value_column,
                     std::string_view rate_column, double threshold) {
    if (traj.size() == 0) throw EmptyTrajectory("crossing_time: empty trajectory");
    const auto recorded = nlohmann::json::json_pointer("/crossings/" + std::string(value_column) + "/" +
                                                       threshold_key(threshold));
    if (traj.metadata.contains(recorded)) {
        const auto& t = traj.metadata.at(recorded);
        if (t.is_null()) throw NoCrossing("crossing_time: " + std::string(value_column) + " never reached threshold");
        return t.get<double>();
    }
    const auto& v = traj.column(value_column);
    const auto& r = traj.column(rate_column);
    ode::SolutionGrid grid;
    grid.times = traj.times;
    grid.t0 = traj.times.front();
    grid.t_end = traj.times.back();
    grid.states.reserve(v.size());
    grid.derivatives.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        grid.states.push_back({v[i]});
        grid.derivatives.push_back({r[i]});
    }
    return ode::find_crossing(grid, 0, threshold);
}

}  // namespace superrad
