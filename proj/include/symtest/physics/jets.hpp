#ifndef SYMTEST_PHYSICS_JETS_HPP
#define SYMTEST_PHYSICS_JETS_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "symtest/common.hpp"
#include "symtest/groups/lorentz.hpp"
#include "symtest/rng.hpp"

namespace symtest {

inline constexpr double kLightlikeFloor = kMinkowskiFloor;

struct JetConstituentRecord {
    std::int64_t event_id = 0;
    int jet_index = 0;
    double pt = 0.0;   // transverse momentum (GeV)
    double eta = 0.0;  // pseudorapidity
    double phi = 0.0;  // polar angle (radians)
    bool has_four_momentum = false;
    Eigen::Vector4d four_momentum = Eigen::Vector4d::Zero();  // (E, p1, p2, p3)
};

// Column-name map for the CSV schema. Four-momentum columns are optional as a
// group: either all four are mapped or none.
struct JetCsvSchema {
    std::string event_id = "event_id";
    std::string jet_index = "jet_index";
    std::string pt = "pt";
    std::string eta = "eta";
    std::string phi = "phi";
    std::string energy;  // empty: no four-momentum columns
    std::string p1, p2, p3;

    bool wants_four_momentum() const { return !energy.empty(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_cell(const std::string& cell, const std::string& column, std::size_t row) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("row " + std::to_string(row) + ": non-numeric value '" +
                                    cell + "' in column '" + column + "'");
    }
}

}  // namespace detail

// Parses a headered CSV of jet constituents. Malformed rows and invariant
// violations are reported with their row number.
inline std::vector<JetConstituentRecord> load_constituents(const std::string& path,
                                                           const JetCsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constituent file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error(path + ": missing header row");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto names = detail::split_csv_line(header);
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);

    auto column = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end())
            throw std::runtime_error(path + ": missing column '" + name + "'");
        return it->second;
    };

    const int c_event = column(schema.event_id);
    const int c_jet = column(schema.jet_index);
    const int c_pt = column(schema.pt);
    const int c_eta = column(schema.eta);
    const int c_phi = column(schema.phi);
    int c_e = -1, c_p1 = -1, c_p2 = -1, c_p3 = -1;
    if (schema.wants_four_momentum()) {
        c_e = column(schema.energy);
        c_p1 = column(schema.p1);
        c_p2 = column(schema.p2);
        c_p3 = column(schema.p3);
    }

    std::vector<JetConstituentRecord> records;
    std::string line;
    std::size_t row = 1;
    const double pi = std::acos(-1.0);
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != names.size())
            throw std::invalid_argument("row " + std::to_string(row) + ": expected " +
                                        std::to_string(names.size()) + " cells, got " +
                                        std::to_string(cells.size()));
        JetConstituentRecord rec;
        rec.event_id = static_cast<std::int64_t>(detail::parse_cell(cells[c_event], schema.event_id, row));
        rec.jet_index = static_cast<int>(detail::parse_cell(cells[c_jet], schema.jet_index, row));
        rec.pt = detail::parse_cell(cells[c_pt], schema.pt, row);
        rec.eta = detail::parse_cell(cells[c_eta], schema.eta, row);
        rec.phi = detail::parse_cell(cells[c_phi], schema.phi, row);
        if (rec.pt < 0.0)
            throw std::invalid_argument("row " + std::to_string(row) +
                                        ": transverse momentum must be nonnegative");
        if (rec.phi < -pi - 1e-9 || rec.phi > pi + 1e-9)
            throw std::invalid_argument("row " + std::to_string(row) +
                                        ": polar angle must lie in [-pi, pi]");
        if (schema.wants_four_momentum()) {
            rec.has_four_momentum = true;
            rec.four_momentum = {detail::parse_cell(cells[c_e], schema.energy, row),
                                 detail::parse_cell(cells[c_p1], schema.p1, row),
                                 detail::parse_cell(cells[c_p2], schema.p2, row),
                                 detail::parse_cell(cells[c_p3], schema.p3, row)};
        }
        records.push_back(rec);
    }
    return records;
}

inline void write_constituents(const std::string& path,
                               const std::vector<JetConstituentRecord>& records,
                               const JetCsvSchema& schema) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write constituent file: " + path);
    out.precision(17);
    out << schema.event_id << ',' << schema.jet_index << ',' << schema.pt << ',' << schema.eta
        << ',' << schema.phi;
    if (schema.wants_four_momentum())
        out << ',' << schema.energy << ',' << schema.p1 << ',' << schema.p2 << ',' << schema.p3;
    out << '\n';
    for (const auto& r : records) {
        out << r.event_id << ',' << r.jet_index << ',' << r.pt << ',' << r.eta << ',' << r.phi;
        if (schema.wants_four_momentum())
            out << ',' << r.four_momentum(0) << ',' << r.four_momentum(1) << ','
                << r.four_momentum(2) << ',' << r.four_momentum(3);
        out << '\n';
    }
}

// Cartesian momentum in the transverse plane.
inline Vector transverse_pair(double pt, double phi) {
    require(pt >= 0.0, "transverse momentum must be nonnegative");
    Vector v(2);
    v << pt * std::cos(phi), pt * std::sin(phi);
    return v;
}

enum class JetFeatureMode { transverse_2d, four_momentum };

struct LeadingPairDataset {
    Matrix x;  // leading-constituent feature per event
    Matrix y;  // second-leading-constituent feature per event
    JetFeatureMode mode = JetFeatureMode::transverse_2d;
    int skipped_events = 0;  // fewer than two constituents
    int dropped_events = 0;  // four-momentum invariant failures
};

// Per event, the two constituents with the largest transverse momenta (ties
// broken by input order) become the (X, Y) pair.
inline LeadingPairDataset leading_pairs(const std::vector<JetConstituentRecord>& records,
                                        JetFeatureMode mode) {
    std::map<std::int64_t, std::vector<const JetConstituentRecord*>> events;
    for (const auto& r : records) events[r.event_id].push_back(&r);

    std::vector<Vector> xs, ys;
    LeadingPairDataset out;
    out.mode = mode;
    for (auto& [event, rows] : events) {
        if (rows.size() < 2) {
            ++out.skipped_events;
            continue;
        }
        std::stable_sort(rows.begin(), rows.end(),
                         [](const auto* a, const auto* b) { return a->pt > b->pt; });
        const JetConstituentRecord& lead = *rows[0];
        const JetConstituentRecord& second = *rows[1];
        if (mode == JetFeatureMode::four_momentum) {
            require(lead.has_four_momentum && second.has_four_momentum,
                    "four-momentum mode needs four-momentum columns");
            if (minkowski_invariant(lead.four_momentum) < kLightlikeFloor ||
                minkowski_invariant(second.four_momentum) < kLightlikeFloor) {
                ++out.dropped_events;
                continue;
            }
            xs.emplace_back(lead.four_momentum);
            ys.emplace_back(second.four_momentum);
        } else {
            xs.push_back(transverse_pair(lead.pt, lead.phi));
            ys.push_back(transverse_pair(second.pt, second.phi));
        }
    }
    const int dim = mode == JetFeatureMode::four_momentum ? 4 : 2;
    out.x.resize(static_cast<int>(xs.size()), dim);
    out.y.resize(static_cast<int>(ys.size()), dim);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.x.row(static_cast<int>(i)) = xs[i];
        out.y.row(static_cast<int>(i)) = ys[i];
    }
    return out;
}

// Permutes the responses uniformly, breaking the within-event dependence.
// A single-row dataset is returned unchanged (flagged via the return count).
inline int shuffle_responses(LeadingPairDataset& ds, Rng& rng) {
    const int n = static_cast<int>(ds.y.rows());
    if (n < 2) return 0;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix shuffled(n, ds.y.cols());
    for (int i = 0; i < n; ++i) shuffled.row(i) = ds.y.row(perm[i]);
    ds.y = std::move(shuffled);
    return n;
}

}  // namespace symtest

#endif
