#include "urllc/channel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bundled_data.hpp"
#include "urllc/random.hpp"

namespace urllc::channel {

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Flat: return "flat";
        case ProfileKind::Epa: return "epa";
        case ProfileKind::Eva: return "eva";
    }
    return "?";
}

ProfileKind parse_profile_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "flat") return ProfileKind::Flat;
    if (lower == "epa") return ProfileKind::Epa;
    if (lower == "eva") return ProfileKind::Eva;
    throw std::invalid_argument("unknown fading profile '" + std::string(name) +
                                "' (expected flat, epa or eva)");
}

FadingProfile parse_taps(std::string_view text, ProfileKind kind) {
    FadingProfile profile{kind, {}};
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        double delay_ns = 0.0;
        double power_db = 0.0;
        if (!(fields >> delay_ns)) continue;  // blank line
        std::string extra;
        if (!(fields >> power_db) || (fields >> extra)) {
            throw std::invalid_argument("tap line " + std::to_string(line_no) +
                                        ": expected 'delay_ns relative_power_db'");
        }
        profile.taps.push_back({delay_ns * 1e-9, std::pow(10.0, power_db / 10.0)});
    }
    if (profile.taps.empty()) throw std::invalid_argument("tap profile has no taps");
    if (profile.taps.front().delay_s != 0.0) {
        throw std::invalid_argument("first tap delay must be 0");
    }
    for (std::size_t i = 1; i < profile.taps.size(); ++i) {
        if (!(profile.taps[i].delay_s > profile.taps[i - 1].delay_s)) {
            throw std::invalid_argument("tap delays must be strictly increasing");
        }
    }
    double total = 0.0;
    for (const Tap& tap : profile.taps) total += tap.mean_power;
    for (Tap& tap : profile.taps) tap.mean_power /= total;
    return profile;
}

FadingProfile load_taps_file(const std::string& path, ProfileKind kind) {
    std::ifstream file(path);
    if (!file) throw std::invalid_argument("cannot open tap file '" + path + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_taps(buffer.str(), kind);
}

std::string_view bundled_taps_text(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Flat: return data::kFlatTaps;
        case ProfileKind::Epa: return data::kEpaTaps;
        case ProfileKind::Eva: return data::kEvaTaps;
    }
    throw std::invalid_argument("unknown profile kind");
}

const FadingProfile& bundled_profile(ProfileKind kind) {
    static const FadingProfile flat = parse_taps(data::kFlatTaps, ProfileKind::Flat);
    static const FadingProfile epa = parse_taps(data::kEpaTaps, ProfileKind::Epa);
    static const FadingProfile eva = parse_taps(data::kEvaTaps, ProfileKind::Eva);
    switch (kind) {
        case ProfileKind::Flat: return flat;
        case ProfileKind::Epa: return epa;
        case ProfileKind::Eva: return eva;
    }
    throw std::invalid_argument("unknown profile kind");
}

double GridConfig::rb_center_offset_hz(int rb) const {
    const double used_subcarriers = static_cast<double>(num_rbs) * rb_subcarriers;
    return ((rb + 0.5) * rb_subcarriers - used_subcarriers / 2.0) * subcarrier_hz;
}

void GridConfig::validate() const {
    if (!(carrier_hz > 0)) throw std::invalid_argument("carrier_hz must be > 0");
    if (!(subcarrier_hz > 0)) throw std::invalid_argument("subcarrier_hz must be > 0");
    if (rb_subcarriers < 1) throw std::invalid_argument("rb_subcarriers must be >= 1");
    if (num_rbs < 1) throw std::invalid_argument("num_rbs must be >= 1");
    if (!(symbol_s > 0)) throw std::invalid_argument("symbol_us must be > 0");
    if (minislot_symbols < 1) throw std::invalid_argument("minislot_symbols must be >= 1");
    // Small slack: 100 * 12 * 15 kHz = 18 MHz is well inside 20 MHz, but a
    // user grid that fills the band exactly should not trip on rounding.
    if (num_rbs * rb_subcarriers * subcarrier_hz > bandwidth_hz * (1.0 + 1e-12)) {
        throw std::invalid_argument("num_rbs * rb_subcarriers * subcarrier_hz exceeds bandwidth_hz");
    }
}

double doppler_hz(double speed_kmph, double carrier_hz) {
    return speed_kmph / 3.6 * carrier_hz / kSpeedOfLight;
}

FadingProcess make_process(const FadingProfile& profile, double doppler, std::uint64_t seed,
                           int num_sinusoids) {
    if (profile.taps.empty()) throw std::invalid_argument("fading profile has no taps");
    if (!(doppler >= 0)) throw std::invalid_argument("doppler must be >= 0");
    if (num_sinusoids < 1) throw std::invalid_argument("num_sinusoids must be >= 1");

    FadingProcess p;
    p.profile_ = profile;
    p.doppler_hz_ = doppler;
    p.num_sinusoids_ = num_sinusoids;
    p.seed_ = seed;

    const auto taps = profile.taps.size();
    const auto n = static_cast<std::size_t>(num_sinusoids);
    p.amplitude_.resize(taps);
    p.omega_.resize(taps * n);
    p.phase_.resize(taps * n);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < taps; ++k) {
        Rng rng(substream_seed(seed, {0xfad1, k}));
        p.amplitude_[k] = std::sqrt(profile.taps[k].mean_power / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double theta = two_pi * uniform01(rng) - std::numbers::pi;
            const double alpha = (two_pi * static_cast<double>(i) + theta) / static_cast<double>(n);
            p.omega_[k * n + i] = two_pi * doppler * std::cos(alpha);
            p.phase_[k * n + i] = two_pi * uniform01(rng);
        }
    }
    return p;
}

std::complex<double> FadingProcess::tap_gain(std::size_t tap, double t) const {
    const auto n = static_cast<std::size_t>(num_sinusoids_);
    const double* omega = &omega_[tap * n];
    const double* phase = &phase_[tap * n];
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double arg = omega[i] * t + phase[i];
        re += std::cos(arg);
        im += std::sin(arg);
    }
    return {amplitude_[tap] * re, amplitude_[tap] * im};
}

void FadingProcess::tap_gains(double t, std::span<std::complex<double>> out) const {
    for (std::size_t k = 0; k < num_taps(); ++k) out[k] = tap_gain(k, t);
}

std::vector<std::complex<double>> FadingProcess::tap_gains(double t) const {
    std::vector<std::complex<double>> out(num_taps());
    tap_gains(t, out);
    return out;
}

RbSnrMap::RbSnrMap(const FadingProcess& process, const GridConfig& grid)
    : process_(&process), num_rbs_(grid.num_rbs) {
    const auto& taps = process.profile().taps;
    rotation_.resize(static_cast<std::size_t>(num_rbs_) * taps.size());
    for (int rb = 0; rb < num_rbs_; ++rb) {
        const double f = grid.rb_center_offset_hz(rb);
        for (std::size_t k = 0; k < taps.size(); ++k) {
            rotation_[rb * taps.size() + k] =
                std::polar(1.0, -2.0 * std::numbers::pi * f * taps[k].delay_s);
        }
    }
}

void RbSnrMap::power(double t, std::span<double> out) const {
    const std::size_t taps = process_->num_taps();
    std::vector<std::complex<double>> gains(taps);
    process_->tap_gains(t, gains);
    for (int rb = 0; rb < num_rbs_; ++rb) {
        const std::complex<double>* rot = &rotation_[rb * taps];
        std::complex<double> h{0.0, 0.0};
        for (std::size_t k = 0; k < taps; ++k) h += gains[k] * rot[k];
        out[rb] = std::norm(h);
    }
}

void RbSnrMap::snr_db(double t, double geometry_db, std::span<double> out) const {
    power(t, out);
    for (int rb = 0; rb < num_rbs_; ++rb) out[rb] = geometry_db + 10.0 * std::log10(out[rb]);
}

std::vector<double> snr_per_rb(const FadingProcess& process, const GridConfig& grid, double t,
                               double geometry_db) {
    RbSnrMap map(process, grid);
    std::vector<double> out(static_cast<std::size_t>(grid.num_rbs));
    map.snr_db(t, geometry_db, out);
    return out;
}

}  // namespace urllc::channel
