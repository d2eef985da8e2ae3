#pragma once

// Propeller thrust and power from tabulated coefficients:
//
//     J = V / (n D),   T = C_T(J, n) rho n^2 D^4,   P = C_P(J, n) rho n^3 D^5
//
// Coefficients are interpolated linearly in J within an RPM sheet and
// linearly in n between sheets. Nothing is extrapolated.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dart/error.hpp"

namespace dart::propulsion {

struct CoefficientRow {
    double j;
    double ct;
    double cp;
};

struct RpmSheet {
    double speed = 0.0;  // rev/s the sheet was measured at (0 for a single sheet)
    std::vector<CoefficientRow> rows;

    double j_min() const { return rows.front().j; }
    double j_max() const { return rows.back().j; }
};

struct Coefficients {
    double ct;
    double cp;
};

class PropellerTable {
public:
    PropellerTable() = default;
    PropellerTable(std::string name, double diameter, std::vector<RpmSheet> sheets)
        : name_(std::move(name)), diameter_(diameter), sheets_(std::move(sheets)) {
        validate();
    }

    // Single-sheet table (coefficients independent of n).
    static PropellerTable single(std::string name, double diameter, std::vector<CoefficientRow> rows) {
        return PropellerTable(std::move(name), diameter, {RpmSheet{0.0, std::move(rows)}});
    }

    const std::string& name() const { return name_; }
    double diameter() const { return diameter_; }
    const std::vector<RpmSheet>& sheets() const { return sheets_; }
    bool multi_sheet() const { return sheets_.size() > 1; }
    double speed_min() const { return sheets_.front().speed; }
    double speed_max() const { return sheets_.back().speed; }

    // Common J range over all sheets.
    double j_min() const {
        double v = sheets_.front().j_min();
        for (const auto& s : sheets_) v = std::max(v, s.j_min());
        return v;
    }
    double j_max() const {
        double v = sheets_.front().j_max();
        for (const auto& s : sheets_) v = std::min(v, s.j_max());
        return v;
    }

    Coefficients coefficients(double j, double n) const {
        if (!multi_sheet()) return interpolate(sheets_.front(), j);
        const double tol = 1e-12 * std::max(1.0, speed_max());
        if (n < speed_min() - tol || n > speed_max() + tol) {
            throw ExtrapolationError(name_ + ": speed " + std::to_string(n * 60.0) +
                                     " rpm outside the tabulated sheets");
        }
        const double nc = std::clamp(n, speed_min(), speed_max());
        auto hi = std::lower_bound(sheets_.begin(), sheets_.end(), nc,
                                   [](const RpmSheet& s, double v) { return s.speed < v; });
        if (hi == sheets_.begin()) return interpolate(*hi, j);
        const auto lo = hi - 1;
        const Coefficients a = interpolate(*lo, j);
        const Coefficients b = interpolate(*hi, j);
        const double f = (nc - lo->speed) / (hi->speed - lo->speed);
        return {a.ct + f * (b.ct - a.ct), a.cp + f * (b.cp - a.cp)};
    }

private:
    void validate() const {
        if (!(diameter_ > 0.0)) throw ConfigError(name_ + ": diameter must be > 0");
        if (sheets_.empty()) throw ConfigError(name_ + ": no coefficient sheets");
        for (std::size_t s = 0; s < sheets_.size(); ++s) {
            const auto& sheet = sheets_[s];
            if (sheet.rows.empty()) throw ConfigError(name_ + ": empty coefficient sheet");
            if (s > 0 && !(sheet.speed > sheets_[s - 1].speed)) {
                throw ConfigError(name_ + ": sheet speeds must be strictly increasing");
            }
            for (std::size_t i = 0; i < sheet.rows.size(); ++i) {
                if (i > 0 && !(sheet.rows[i].j > sheet.rows[i - 1].j)) {
                    throw ConfigError(name_ + ": J must be strictly increasing within a sheet");
                }
                if (!(sheet.rows[i].cp > 0.0)) throw ConfigError(name_ + ": C_P must be > 0");
                if (!std::isfinite(sheet.rows[i].ct)) throw ConfigError(name_ + ": non-finite C_T");
            }
        }
        if (multi_sheet() && !(sheets_.front().speed > 0.0)) {
            throw ConfigError(name_ + ": sheet speeds must be > 0");
        }
    }

    Coefficients interpolate(const RpmSheet& sheet, double j) const {
        const double tol = 1e-12 * std::max(1.0, std::abs(sheet.j_max()));
        if (j < sheet.j_min() - tol || j > sheet.j_max() + tol) {
            throw ExtrapolationError(name_ + ": advance ratio " + std::to_string(j) + " outside table range [" +
                                     std::to_string(sheet.j_min()) + ", " + std::to_string(sheet.j_max()) + "]");
        }
        const double jc = std::clamp(j, sheet.j_min(), sheet.j_max());
        if (sheet.rows.size() == 1) return {sheet.rows[0].ct, sheet.rows[0].cp};
        auto hi = std::lower_bound(sheet.rows.begin(), sheet.rows.end(), jc,
                                   [](const CoefficientRow& r, double v) { return r.j < v; });
        if (hi == sheet.rows.begin()) return {hi->ct, hi->cp};
        const auto lo = hi - 1;
        const double f = (jc - lo->j) / (hi->j - lo->j);
        return {lo->ct + f * (hi->ct - lo->ct), lo->cp + f * (hi->cp - lo->cp)};
    }

    std::string name_;
    double diameter_ = 0.0;
    std::vector<RpmSheet> sheets_;
};

inline double advance_ratio(double v, double n, double d) {
    if (!(n > 0.0)) throw DomainError("advance ratio undefined for n <= 0");
    if (!(d > 0.0)) throw DomainError("propeller diameter must be > 0");
    if (!(v >= 0.0)) throw DomainError("airflow speed must be >= 0");
    return v / (n * d);
}

struct ThrustPower {
    double thrust;  // N
    double power;   // W
};

inline ThrustPower thrust_power(const PropellerTable& table, double rho, double v, double n) {
    const double d = table.diameter();
    const double j = advance_ratio(v, n, d);
    const Coefficients c = table.coefficients(j, n);
    const double d2 = d * d;
    const double d4 = d2 * d2;
    return {c.ct * rho * n * n * d4, c.cp * rho * n * n * n * d4 * d};
}

struct RpmSearch {
    double n_max = 1000.0;  // rev/s, cap for single-sheet tables
    int scan_points = 400;
};

// Lowest rotation speed (rev/s) that delivers T_req at inflow speed v.
inline double solve_rpm_for_thrust(const PropellerTable& table, double rho, double v, double t_req,
                                   const RpmSearch& search = {}) {
    if (!(v >= 0.0)) throw DomainError("airflow speed must be >= 0");
    const double d = table.diameter();
    double lo = 0.0;
    double hi = search.n_max;
    if (v > 0.0) {
        lo = v / (d * table.j_max());
        if (table.j_min() > 0.0) hi = std::min(hi, v / (d * table.j_min()));
    }
    if (table.multi_sheet()) {
        lo = std::max(lo, table.speed_min());
        hi = std::min(hi, table.speed_max());
    }
    if (!(hi >= lo)) throw InfeasibleError(table.name() + ": no rotation speed keeps J inside the table");

    const auto thrust_at = [&](double n) {
        if (n <= 0.0) return 0.0;
        return thrust_power(table, rho, v, n).thrust;
    };
    constexpr double tol = 1e-6;
    if (thrust_at(lo) >= t_req - tol) return lo;

    double prev = lo;
    double bracket_hi = -1.0;
    for (int i = 1; i <= search.scan_points; ++i) {
        const double n = lo + (hi - lo) * static_cast<double>(i) / search.scan_points;
        if (thrust_at(n) >= t_req) {
            bracket_hi = n;
            break;
        }
        prev = n;
    }
    if (bracket_hi < 0.0) {
        throw InfeasibleError(table.name() + ": thrust " + std::to_string(t_req) + " N not achievable at " +
                              std::to_string(v) + " m/s within the table range");
    }
    double a = prev;
    double b = bracket_hi;
    for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
        const double m = 0.5 * (a + b);
        if (thrust_at(m) >= t_req) {
            b = m;
        } else {
            a = m;
        }
    }
    if (std::abs(thrust_at(b) - t_req) >= tol) {
        throw InfeasibleError(table.name() + ": thrust curve jumps across the requested value");
    }
    return b;
}

// Linear analytic coefficients, handy for fixtures:
// C_T = ct0 + ct1 J, C_P = cp0 + cp1 J sampled on [0, j_max].
inline PropellerTable synthetic_table(std::string name, double diameter, double ct0, double ct1, double cp0,
                                      double cp1, double j_max = 1.5, int rows = 16) {
    std::vector<CoefficientRow> r;
    for (int i = 0; i < rows; ++i) {
        const double j = j_max * static_cast<double>(i) / (rows - 1);
        r.push_back({j, ct0 + ct1 * j, cp0 + cp1 * j});
    }
    return PropellerTable::single(std::move(name), diameter, std::move(r));
}

}  // namespace dart::propulsion
