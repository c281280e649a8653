#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace superrad {

inline constexpr const char* kToolVersion = "0.3.0";

// Sampled time series with named columns and free-form run metadata.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::pair<std::string, std::vector<double>>> columns;
    nlohmann::json metadata = nlohmann::json::object();

    void add_column(std::string name, std::vector<double> values);
    bool has_column(std::string_view name) const;
    const std::vector<double>& column(std::string_view name) const;
    std::vector<std::string> column_names() const;
    std::size_t size() const noexcept { return times.size(); }
};

// 17-significant-digit decimal text; reads back to the identical double.
std::string format_real(double x);

// CSV: header "time,<names...>", comma separated, LF line endings. An empty
// `names` list writes every column.
void write_csv(const Trajectory& traj, const std::filesystem::path& path,
               std::span<const std::string> names = {});
Trajectory read_csv(const std::filesystem::path& path);

void write_metadata(const Trajectory& traj, const std::filesystem::path& path);
nlohmann::json read_metadata(const std::filesystem::path& path);

// Fractions whose crossing times the model simulators record while integrating.
inline constexpr double kCrossingFractions[] = {0.1, 0.5, 0.9};

// Stores metadata["crossings"][column]["<threshold>"] = time, or null when the
// threshold was never reached (time is NaN).
void record_crossing(Trajectory& traj, std::string_view column, double threshold, double time);

// Earliest time at which `value_column` crosses `threshold`. A crossing
// recorded during integration is returned as is; otherwise the samples are
// interpolated with `rate_column` as the time derivative (see ode::find_crossing).
double crossing_time(const Trajectory& traj, std::string_view value_column,
                     std::string_view rate_column, double threshold);

}  // namespace superrad
