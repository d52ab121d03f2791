#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gsr {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kTwoPi = 6.283185307179586476925286766559005768;

enum class Protocol { tree, rgs };
enum class Scheme { ancilla, feedback };

// How per-photon feedback round trips are folded into the loss model.
enum class LossMode { worst_case, per_level };

std::string to_string(Protocol p);
std::string to_string(Scheme s);
std::string to_string(LossMode m);
Protocol parse_protocol(std::string_view text);
Scheme parse_scheme(std::string_view text);
LossMode parse_loss_mode(std::string_view text);

// Invalid input. field() names the offending parameter.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct EmitterParams {
    double gamma = 0.0;  // angular optical linewidth, rad/s
    double t_coh = 0.0;  // spin coherence time, s (may be infinite)

    static EmitterParams from_ghz(double gamma_over_2pi_ghz, double t_coh_s);
    double gamma_ghz() const { return gamma / (kTwoPi * 1e9); }
    void validate() const;
    friend bool operator==(const EmitterParams&, const EmitterParams&) = default;
};

struct ChannelParams {
    double L = 1000e3;     // m
    double L_att = 20e3;   // m
    double mu_coup = 0.05;
    double eps_depol = 5e-5;
    double v_feedback = 2e8;  // m/s
    double v_delay = 2e8;     // m/s

    void validate() const;
    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

// Inputs to derive_gate_times that are not emitter properties.
struct GateSettings {
    double beta = 500.0;
    double t_H = 100e-12;
    double t_cz_ancilla = 100e-9;

    void validate() const;
    friend bool operator==(const GateSettings&, const GateSettings&) = default;
};

struct GateTimes {
    double t_P = 0.0;
    double t_E = 0.0;
    double t_CZ = 0.0;
    double t_H = 0.0;
    double t_M = 0.0;
    double beta = 1.0;
};

GateTimes derive_gate_times(const EmitterParams& emitter, Scheme scheme,
                            const GateSettings& settings = {});

class TreeGeometry {
public:
    TreeGeometry() = default;
    explicit TreeGeometry(std::vector<int> branchings);

    const std::vector<int>& branchings() const { return b_; }
    int depth() const { return static_cast<int>(b_.size()); }
    // b_i with the convention b_i = 0 beyond the last level.
    int b(int i) const { return i >= 0 && i < depth() ? b_[i] : 0; }
    // Node count of level l: product of b_0..b_{l-1}; level 0 is the root.
    long long level_count(int l) const;
    // Photons in levels 1..d.
    long long photon_count() const;
    std::string to_string() const;

    friend bool operator==(const TreeGeometry&, const TreeGeometry&) = default;

private:
    std::vector<int> b_;
};

struct RgsGeometry {
    int N = 0;
    TreeGeometry encoding;

    RgsGeometry() = default;
    RgsGeometry(int n, TreeGeometry enc);

    long long photon_count() const;
    std::string to_string() const;

    friend bool operator==(const RgsGeometry&, const RgsGeometry&) = default;
};

using Geometry = std::variant<TreeGeometry, RgsGeometry>;

Protocol protocol_of(const Geometry& g);
// The tree that is actually emitted per logical qubit.
const TreeGeometry& encoding_tree(const Geometry& g);
long long photon_count(const Geometry& g);
std::string to_string(const Geometry& g);
// "4-16-5" for trees, "32:24-7" for repeater graph states.
Geometry parse_geometry(std::string_view text);

struct RunConfig {
    Protocol protocol = Protocol::tree;
    Scheme scheme = Scheme::ancilla;
    EmitterParams emitter = EmitterParams::from_ghz(10.0, 1e-3);
    ChannelParams channel{};
    GateSettings gates{};
    Geometry geometry = TreeGeometry({4, 15, 5});
    int m = 499;
    std::optional<int> matter_qubits;
    LossMode loss_mode = LossMode::worst_case;
    bool include_cz_error = false;

    void validate() const;
    int resolved_matter_qubits() const;
    double spacing() const { return channel.L / (m + 1); }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Matter qubits charged per repeater node when no override is given.
int default_matter_qubits(Protocol protocol, Scheme scheme, const Geometry& geometry);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace gsr
