#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urllc/random.hpp"

namespace urllc::phy {

inline constexpr double kDefaultBlerSlope = 1.5;   // per dB
inline constexpr double kDefaultSnrGapDb = 2.0;    // implementation loss vs Shannon
inline constexpr double kDefaultTargetBler = 0.1;
inline constexpr int kDataResPerRb = 18;           // 12 subcarriers * 2 symbols * 75 % data
inline constexpr int kNumCqi = 16;

/// Relative slack on BLER-target comparisons. SNRs that sit exactly on an
/// MCS threshold (the CQI->SNR map produces them) must pass regardless of
/// rounding in the exp/log round trip.
inline constexpr double kBlerSlack = 1e-9;

struct McsEntry {
    int index = 0;
    int mod_order = 2;          // bits per symbol
    double code_rate = 0.0;
    double spectral_eff = 0.0;  // mod_order * code_rate
    double snr50_db = 0.0;      // 50 % BLER point
    double beta = 1.0;          // EESM parameter, linear
};

struct BlerModel {
    double slope_per_db = kDefaultBlerSlope;
    double gap_db = kDefaultSnrGapDb;
};

/// Logistic BLER curve centered on the entry's 50 % point.
double bler(const McsEntry& mcs, double snr_db, double slope_per_db = kDefaultBlerSlope);

/// SNR at which the logistic curve equals target_bler.
double required_snr_db(const McsEntry& mcs, double target_bler, double slope_per_db = kDefaultBlerSlope);

/// EESM effective SNR in dB. Throws std::invalid_argument on empty input or
/// beta <= 0.
double effective_snr(std::span<const double> snrs_db, double beta);

/// Ordered MCS ladder. snr50 and beta are derived from the spectral
/// efficiency at load time so the calibration rule lives in one place.
class McsTable {
public:
    /// Parses "index mod_order code_rate" lines; '#' comments.
    /// Throws std::invalid_argument on malformed lines, non-contiguous
    /// indices, or non-increasing efficiency.
    static McsTable parse(std::string_view text, BlerModel model = {});
    static McsTable load_file(const std::string& path, BlerModel model = {});
    static McsTable bundled(BlerModel model = {});
    static std::string_view bundled_text();

    int size() const { return static_cast<int>(entries_.size()); }
    int top() const { return size() - 1; }
    const McsEntry& operator[](int index) const { return entries_.at(static_cast<std::size_t>(index)); }
    const std::vector<McsEntry>& entries() const { return entries_; }
    const BlerModel& model() const { return model_; }

    double bler(int index, double snr_db) const;
    bool meets_target(int index, double snr_db, double target_bler) const;
    double required_snr_db(int index, double target_bler) const;

private:
    std::vector<McsEntry> entries_;
    BlerModel model_;
};

/// snr50 = 10 log10(2^eff - 1) + gap; beta = max(1, 2^eff / 2).
McsEntry calibrate_entry(int index, int mod_order, double code_rate, const BlerModel& model);

/// CQI level -> reference MCS index. Level 0 is "out of range" and maps to -1.
struct CqiMap {
    std::array<int, kNumCqi> ref_mcs{};

    /// Every other MCS starting at 0, capped at the table top.
    static CqiMap every_other(const McsTable& table);
};

/// Highest CQI c >= 1 whose reference MCS meets target_bler at snr_db; 0 if none.
int snr_to_cqi(double snr_db, const CqiMap& map, const McsTable& table, double target_bler);

/// Most conservative SNR consistent with a CQI level: the point where the
/// level's reference MCS exactly meets target_bler. Level 0 maps to the
/// level-1 point minus 3 dB.
double cqi_to_snr_db(int cqi, const CqiMap& map, const McsTable& table, double target_bler);

/// Highest MCS index meeting target_bler on the EESM effective SNR computed
/// with that MCS's beta; nullopt when even MCS 0 fails.
std::optional<int> select_mcs(std::span<const double> snrs_db, double target_bler, const McsTable& table);

/// floor(n_rbs * data_res * mod_order * code_rate).
int tb_bits(const McsEntry& mcs, int n_rbs, int data_res_per_rb = kDataResPerRb);

/// Bernoulli(1 - p_error) draw; true on success.
bool draw_outcome(Rng& rng, double p_error);

struct PhyTables {
    McsTable mcs;
    CqiMap cqi;

    static PhyTables bundled(BlerModel model = {});
    static PhyTables from_table(McsTable table);
};

}  // namespace urllc::phy
