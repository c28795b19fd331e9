#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gridsched {

struct Bus {
    int id = 0;
    double peak_load_mw = 0.0;
    int load_profile_id = 0;
};

struct Line {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance_pu = 0.0;
    double flow_limit_mw = 0.0;
};

/// One block of a convex piecewise-linear energy cost. Blocks are stacked
/// from 0 MW upward; `up_to_mw` is the cumulative breakpoint.
struct CostSegment {
    double up_to_mw = 0.0;
    double price = 0.0;  // $/MWh
};

/// Start-up cost once the unit has been off for at least `off_hours` hours.
struct StartupStep {
    int off_hours = 0;
    double cost = 0.0;
};

struct DispatchableGenerator {
    int id = 0;
    int bus = 0;
    double p_min_mw = 0.0;
    double p_max_mw = 0.0;
    double ramp_up_mw_per_h = 0.0;
    double ramp_down_mw_per_h = 0.0;
    int min_up_h = 1;
    int min_down_h = 1;
    double no_load_cost = 0.0;  // $/h while committed
    std::vector<CostSegment> cost_curve;
    std::vector<StartupStep> startup_cost_fn;

    /// Width of block k in MW.
    double segment_width(std::size_t k) const;
    /// Energy cost f_P(p) for 0 <= p <= p_max, filling cheap blocks first.
    double energy_cost(double p_mw) const;
    /// Cost of a start after `hours_off` hours offline.
    double startup_cost(int hours_off) const;
    double hot_start_cost() const;
};

struct WindGenerator {
    int id = 0;
    int bus = 0;
    double capacity_mw = 0.0;
};

/// Static network description. Vectors are indexed by position; the `id`
/// fields are the external numbering used in files and schedules.
struct GridCase {
    std::string name;
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<DispatchableGenerator> dispatchable_generators;
    std::vector<WindGenerator> wind_generators;
    std::vector<int> reference_buses;  // bus ids
    double voll = 1000.0;
    double wind_curtail_price = 100.0;

    std::size_t n_buses() const { return buses.size(); }
    std::size_t n_lines() const { return lines.size(); }
    std::size_t n_gens() const { return dispatchable_generators.size(); }
    std::size_t n_wind() const { return wind_generators.size(); }

    /// Position of a bus id; throws ValidationError if absent.
    std::size_t bus_index(int bus_id) const;
    /// Position of a line id; throws ValidationError if absent.
    std::size_t line_index(int line_id) const;
    bool has_bus(int bus_id) const;
    bool is_reference_index(std::size_t bus_pos) const;

    double total_peak_load() const;
    double total_wind_capacity() const;
};

/// Checks every GridCase invariant, throwing ValidationError with a field path.
void validate(const GridCase& grid);

struct Topology {
    std::vector<bool> line_status;  // true = in service

    static Topology all_in_service(const GridCase& grid);
    std::size_t size() const { return line_status.size(); }
    bool in_service(std::size_t line) const { return line_status[line]; }
    std::size_t count_in_service() const;
    bool operator==(const Topology&) const = default;
};

/// Linear DC power-flow coefficients in per unit on `GridCase::base_mva`.
/// Nodal injection in MW = base_mva * (b_bus * theta) + p_bus_shift + g_sh.
struct DcMatrices {
    Eigen::MatrixXd b_bus;
    Eigen::MatrixXd b_f;
    Eigen::VectorXd p_bus_shift;
    Eigen::VectorXd p_f_shift;
    Eigen::VectorXd g_sh;
};

enum class IslandPolicy {
    /// Throw SingularTopologyError when a load bus loses every reference.
    Reject,
    /// Build the matrices anyway; islands must then self-balance.
    Allow,
};

DcMatrices dc_matrices(const GridCase& grid, const Topology& topology,
                       IslandPolicy policy = IslandPolicy::Reject);

/// Connected-component label per bus position over in-service lines.
std::vector<int> connected_components(const GridCase& grid, const Topology& topology);

/// One angle to pin per electrical island: the reference bus if the island
/// holds one, otherwise its lowest-position bus.
std::vector<bool> angle_anchor_buses(const GridCase& grid, const Topology& topology);

struct Modification {
    enum class Kind { RemoveLine, MoveLoad, ScaleLoad };
    Kind kind = Kind::RemoveLine;
    int line = 0;
    int from_bus = 0;
    int to_bus = 0;
    int bus = 0;
    double factor = 1.0;
};

using ModificationList = std::vector<Modification>;

GridCase apply_modifications(const GridCase& grid, const ModificationList& mods);

// Case and modification files (JSON with comments allowed).
GridCase load_case(const std::filesystem::path& path);
GridCase parse_case(const std::string& text, const std::string& origin = "<string>");
std::string write_case(const GridCase& grid);
ModificationList load_modifications(const std::filesystem::path& path);
ModificationList parse_modifications(const std::string& text,
                                     const std::string& origin = "<string>");

/// Stable 64-bit content hash of a case, hex encoded.
std::string case_hash(const GridCase& grid);

}  // namespace gridsched
