#include "urllc/phy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bundled_data.hpp"

namespace urllc::phy {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double bler(const McsEntry& mcs, double snr_db, double slope_per_db) {
    return 1.0 / (1.0 + std::exp(slope_per_db * (snr_db - mcs.snr50_db)));
}

double required_snr_db(const McsEntry& mcs, double target_bler, double slope_per_db) {
    return mcs.snr50_db + std::log((1.0 - target_bler) / target_bler) / slope_per_db;
}

double effective_snr(std::span<const double> snrs_db, double beta) {
    if (snrs_db.empty()) throw std::invalid_argument("effective_snr: empty SNR list");
    if (!(beta > 0)) throw std::invalid_argument("effective_snr: beta must be > 0");
    // Shift by the minimum so exp() cannot underflow on strong RBs.
    double min_lin = db_to_linear(snrs_db[0]);
    for (double s : snrs_db) min_lin = std::min(min_lin, db_to_linear(s));
    double sum = 0.0;
    for (double s : snrs_db) sum += std::exp(-(db_to_linear(s) - min_lin) / beta);
    const double eff_lin = min_lin - beta * std::log(sum / static_cast<double>(snrs_db.size()));
    return 10.0 * std::log10(eff_lin);
}

McsEntry calibrate_entry(int index, int mod_order, double code_rate, const BlerModel& model) {
    McsEntry e;
    e.index = index;
    e.mod_order = mod_order;
    e.code_rate = code_rate;
    e.spectral_eff = mod_order * code_rate;
    e.snr50_db = 10.0 * std::log10(std::exp2(e.spectral_eff) - 1.0) + model.gap_db;
    e.beta = std::max(1.0, std::exp2(e.spectral_eff) / 2.0);
    return e;
}

McsTable McsTable::parse(std::string_view text, BlerModel model) {
    McsTable table;
    table.model_ = model;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        int index = 0;
        if (!(fields >> index)) continue;
        int mod_order = 0;
        double rate = 0.0;
        std::string extra;
        if (!(fields >> mod_order >> rate) || (fields >> extra)) {
            throw std::invalid_argument("MCS table line " + std::to_string(line_no) +
                                        ": expected 'index mod_order code_rate'");
        }
        if (index != table.size()) {
            throw std::invalid_argument("MCS table line " + std::to_string(line_no) +
                                        ": indices must be contiguous from 0");
        }
        if (mod_order != 2 && mod_order != 4 && mod_order != 6) {
            throw std::invalid_argument("MCS table line " + std::to_string(line_no) +
                                        ": mod_order must be 2, 4 or 6");
        }
        if (!(rate > 0.0 && rate < 1.0)) {
            throw std::invalid_argument("MCS table line " + std::to_string(line_no) +
                                        ": code_rate must be in (0, 1)");
        }
        McsEntry e = calibrate_entry(index, mod_order, rate, model);
        if (!table.entries_.empty() && !(e.spectral_eff > table.entries_.back().spectral_eff)) {
            throw std::invalid_argument("MCS table line " + std::to_string(line_no) +
                                        ": spectral efficiency must strictly increase");
        }
        table.entries_.push_back(e);
    }
    if (table.entries_.empty()) throw std::invalid_argument("MCS table is empty");
    return table;
}

McsTable McsTable::load_file(const std::string& path, BlerModel model) {
    std::ifstream file(path);
    if (!file) throw std::invalid_argument("cannot open MCS table '" + path + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse(buffer.str(), model);
}

std::string_view McsTable::bundled_text() { return data::kMcsTable; }

McsTable McsTable::bundled(BlerModel model) { return parse(data::kMcsTable, model); }

double McsTable::bler(int index, double snr_db) const {
    return phy::bler((*this)[index], snr_db, model_.slope_per_db);
}

bool McsTable::meets_target(int index, double snr_db, double target_bler) const {
    return bler(index, snr_db) <= target_bler * (1.0 + kBlerSlack);
}

double McsTable::required_snr_db(int index, double target_bler) const {
    return phy::required_snr_db((*this)[index], target_bler, model_.slope_per_db);
}

CqiMap CqiMap::every_other(const McsTable& table) {
    CqiMap map;
    map.ref_mcs[0] = -1;
    for (int c = 1; c < kNumCqi; ++c) map.ref_mcs[c] = std::min(2 * (c - 1), table.top());
    for (int c = 2; c < kNumCqi; ++c) {
        if (map.ref_mcs[c] <= map.ref_mcs[c - 1]) {
            throw std::invalid_argument("MCS table too short for a 15-level CQI map");
        }
    }
    return map;
}

int snr_to_cqi(double snr_db, const CqiMap& map, const McsTable& table, double target_bler) {
    for (int c = kNumCqi - 1; c >= 1; --c) {
        if (table.meets_target(map.ref_mcs[c], snr_db, target_bler)) return c;
    }
    return 0;
}

double cqi_to_snr_db(int cqi, const CqiMap& map, const McsTable& table, double target_bler) {
    if (cqi <= 0) return table.required_snr_db(map.ref_mcs[1], target_bler) - 3.0;
    return table.required_snr_db(map.ref_mcs[std::min(cqi, kNumCqi - 1)], target_bler);
}

std::optional<int> select_mcs(std::span<const double> snrs_db, double target_bler, const McsTable& table) {
    for (int m = table.top(); m >= 0; --m) {
        if (table.meets_target(m, effective_snr(snrs_db, table[m].beta), target_bler)) return m;
    }
    return std::nullopt;
}

int tb_bits(const McsEntry& mcs, int n_rbs, int data_res_per_rb) {
    if (n_rbs <= 0) return 0;
    // The epsilon keeps products like 10 * 18 * 2 * 0.30 from flooring to 107.
    const double bits = static_cast<double>(n_rbs) * data_res_per_rb * mcs.mod_order * mcs.code_rate;
    return static_cast<int>(std::floor(bits + 1e-9));
}

bool draw_outcome(Rng& rng, double p_error) { return uniform01(rng) >= p_error; }

PhyTables PhyTables::from_table(McsTable table) {
    CqiMap cqi = CqiMap::every_other(table);
    return PhyTables{std::move(table), cqi};
}

PhyTables PhyTables::bundled(BlerModel model) { return from_table(McsTable::bundled(model)); }

}  // namespace urllc::phy
