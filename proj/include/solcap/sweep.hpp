#pragma once

// rho grid sweeps producing plot-ready rows (closed-form curves, optionally with
// the numerically integrated points alongside).

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "solcap/capacity.hpp"
#include "solcap/errors.hpp"

namespace solcap::sweep {

using capacity::Units;

struct SweepRow {
    double rho_db = 0.0;
    double rho = 0.0;
    double h_y = 0.0;
    double h_y_given_x = 0.0;
    double mi = 0.0;
    double i_as = 0.0;
    double ratio = 0.0;
    std::optional<double> h_y_numeric;
    std::optional<double> h_y_given_x_numeric;
    Units units = Units::bits;
};

/// Evenly spaced grid in dB, both ends included.
inline std::vector<double> db_grid(double start_db, double end_db, std::size_t steps) {
    if (!(start_db < end_db) || !std::isfinite(start_db) || !std::isfinite(end_db)) {
        throw DomainError("db_grid: need start < end");
    }
    if (steps < 2) {
        throw DomainError("db_grid: need at least 2 steps");
    }
    std::vector<double> out(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        out[i] = start_db + (end_db - start_db) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    return out;
}

/// Thrown when a grid point fails numerically; carries the offending rho.
class PointFailure : public ConvergenceError {
public:
    PointFailure(double rho_db, const std::string& what)
        : ConvergenceError(what), rho_db_(rho_db) {}
    double rho_db() const { return rho_db_; }

private:
    double rho_db_;
};

inline SweepRow compute_row(double rho_db, double sigma_s_sq, Units units, bool with_numeric) {
    const capacity::InputDist input(sigma_s_sq);
    const capacity::Rho rho = capacity::Rho::from_db(rho_db);
    SweepRow row;
    row.rho_db = rho_db;
    row.rho = rho.value();
    row.units = units;
    try {
        const auto rep = capacity::report(input, rho, units);
        row.h_y = rep.h_y;
        row.h_y_given_x = rep.h_y_given_x;
        row.mi = rep.mi;
        row.i_as = rep.i_as;
        row.ratio = rep.ratio;
        if (with_numeric) {
            const auto num = capacity::numeric_entropies(input, rho.channel_for(input));
            row.h_y_numeric = capacity::convert(num.h_y, units);
            row.h_y_given_x_numeric = capacity::convert(num.h_y_given_x, units);
        }
    } catch (const ConvergenceError& e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g dB", rho_db);
        throw PointFailure(rho_db, std::string("numerical failure at rho = ") + buf + ": " + e.what());
    }
    return row;
}

/// Rows in grid order; points are distributed over `threads` workers.
inline std::vector<SweepRow> run(const std::vector<double>& grid_db, double sigma_s_sq, Units units,
                                 bool with_numeric, std::size_t threads = 1) {
    std::vector<SweepRow> rows(grid_db.size());
    std::vector<std::exception_ptr> errors(grid_db.size());
    auto worker = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < grid_db.size(); i += stride) {
            try {
                rows[i] = compute_row(grid_db[i], sigma_s_sq, units, with_numeric);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, grid_db.size()));
    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker, t, threads);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return rows;
}

/// Shortest-round-trip-safe, locale-independent rendering (17 significant digits).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, double sigma_s_sq,
                      bool with_numeric) {
    const Units units = rows.empty() ? Units::bits : rows.front().units;
    os << "# units=" << capacity::to_string(units) << " sigma_s_sq=" << fmt17(sigma_s_sq)
       << " (entropies are relative to sigma_s_sq: they shift by 0.5*ln(sigma_s_sq); mi, i_as, ratio do not)\n";
    os << "rho_db,rho,h_y,h_y_given_x,mi,i_as,ratio";
    if (with_numeric) {
        os << ",h_y_num,h_ygx_num";
    }
    os << '\n';
    for (const auto& r : rows) {
        os << fmt17(r.rho_db) << ',' << fmt17(r.rho) << ',' << fmt17(r.h_y) << ','
           << fmt17(r.h_y_given_x) << ',' << fmt17(r.mi) << ',' << fmt17(r.i_as) << ','
           << fmt17(r.ratio);
        if (with_numeric) {
            os << ',' << fmt17(r.h_y_numeric.value_or(std::nan(""))) << ','
               << fmt17(r.h_y_given_x_numeric.value_or(std::nan("")));
        }
        os << '\n';
    }
}

} // namespace solcap::sweep
