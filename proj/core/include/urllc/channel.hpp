#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace urllc::channel {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class ProfileKind { Flat, Epa, Eva };

std::string_view to_string(ProfileKind kind);
/// Accepts "flat", "epa", "eva" (case-insensitive). Throws std::invalid_argument.
ProfileKind parse_profile_kind(std::string_view name);

struct Tap {
    double delay_s = 0.0;
    double mean_power = 0.0;  // linear
};

/// Tapped-delay-line power-delay profile. Powers sum to one, delays strictly
/// increase from zero.
struct FadingProfile {
    ProfileKind kind = ProfileKind::Flat;
    std::vector<Tap> taps;
};

/// Parses the tap file format: one "delay_ns relative_power_db" pair per line,
/// '#' starts a comment. Powers are normalized to unit sum.
/// Throws std::invalid_argument on malformed input, an empty tap list, or
/// delays that are not strictly increasing from zero.
FadingProfile parse_taps(std::string_view text, ProfileKind kind);
FadingProfile load_taps_file(const std::string& path, ProfileKind kind);
/// The EPA/EVA/flat tables shipped with the library.
const FadingProfile& bundled_profile(ProfileKind kind);
std::string_view bundled_taps_text(ProfileKind kind);

struct GridConfig {
    double carrier_hz = 2e9;
    double bandwidth_hz = 20e6;
    double subcarrier_hz = 15e3;
    int rb_subcarriers = 12;
    int num_rbs = 100;
    double symbol_s = 71.4e-6;
    int minislot_symbols = 2;

    double minislot_s() const { return minislot_symbols * symbol_s; }
    /// Offset of an RB's center subcarrier from the carrier, in Hz.
    double rb_center_offset_hz(int rb) const;
    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;

    bool operator==(const GridConfig&) const = default;
};

double doppler_hz(double speed_kmph, double carrier_hz);

/// Sum-of-sinusoids Rayleigh fading per tap. Arrival angles are stratified
/// (one random angle per 2*pi/N sector) and phases uniform, both drawn from a
/// seed-derived stream, so the gain at any t is a pure function of
/// (profile, doppler, seed) and can be evaluated in O(taps * N) without state.
class FadingProcess {
public:
    const FadingProfile& profile() const { return profile_; }
    double doppler_hz() const { return doppler_hz_; }
    int num_sinusoids() const { return num_sinusoids_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t num_taps() const { return profile_.taps.size(); }

    std::complex<double> tap_gain(std::size_t tap, double t) const;
    void tap_gains(double t, std::span<std::complex<double>> out) const;
    std::vector<std::complex<double>> tap_gains(double t) const;

private:
    friend FadingProcess make_process(const FadingProfile&, double, std::uint64_t, int);
    FadingProcess() = default;

    FadingProfile profile_;
    double doppler_hz_ = 0.0;
    int num_sinusoids_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> amplitude_;  // per tap: sqrt(mean_power / N)
    std::vector<double> omega_;      // taps * N, rad/s
    std::vector<double> phase_;      // taps * N, rad
};

inline constexpr int kDefaultSinusoids = 64;

/// Throws std::invalid_argument for an empty profile, negative Doppler, or
/// fewer than one sinusoid.
FadingProcess make_process(const FadingProfile& profile, double doppler_hz, std::uint64_t seed,
                           int num_sinusoids = kDefaultSinusoids);

/// Per-RB SNR sampler. Precomputes the per-(RB, tap) delay rotations so each
/// sample costs one tap-gain evaluation plus num_rbs * taps complex MACs.
class RbSnrMap {
public:
    RbSnrMap(const FadingProcess& process, const GridConfig& grid);

    int num_rbs() const { return num_rbs_; }
    /// Linear |H(f_rb, t)|^2 per RB.
    void power(double t, std::span<double> out) const;
    /// geometry_db + 10 log10 |H(f_rb, t)|^2 per RB.
    void snr_db(double t, double geometry_db, std::span<double> out) const;

private:
    const FadingProcess* process_;
    int num_rbs_;
    std::vector<std::complex<double>> rotation_;  // rb-major, num_rbs * taps
};

std::vector<double> snr_per_rb(const FadingProcess& process, const GridConfig& grid, double t,
                               double geometry_db);

}  // namespace urllc::channel
