#pragma once

// Subcommand implementations for the solcap command-line tool. Kept apart from
// argument parsing so the test suite can drive them in-process.
//
// Exit codes: 0 success, 1 validation failure, 2 argument error,
// 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "solcap/capacity.hpp"
#include "solcap/channel.hpp"
#include "solcap/errors.hpp"
#include "solcap/mc.hpp"
#include "solcap/soliton.hpp"
#include "solcap/sweep.hpp"

namespace solcap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr int kSchemaVersion = 1;

enum class Format { csv, json };

using capacity::Units;
using sweep::fmt17;

struct Io {
    std::ostream& out;
    std::ostream& err;
};

namespace detail {

// Writes `body` to `path` (or to io.out when path is empty or "-").
template <class Body>
int emit(const std::string& path, Io io, Body&& body) {
    if (path.empty() || path == "-") {
        body(io.out);
        return kExitOk;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        io.err << "error: cannot open " << path << " for writing\n";
        return kExitUsage;
    }
    body(file);
    return file ? kExitOk : kExitNumerical;
}

// Runs a command body, mapping library exceptions to exit codes.
template <class Body>
int guarded(Io io, Body&& body) {
    try {
        return body();
    } catch (const DomainError& e) {
        io.err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConvergenceError& e) {
        io.err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        io.err << "internal error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

inline nlohmann::json row_json(const sweep::SweepRow& r) {
    nlohmann::json j = {{"rho_db", r.rho_db}, {"rho", r.rho},   {"h_y", r.h_y},
                        {"h_y_given_x", r.h_y_given_x},          {"mi", r.mi},
                        {"i_as", r.i_as},     {"ratio", r.ratio}};
    if (r.h_y_numeric) {
        j["h_y_num"] = *r.h_y_numeric;
    }
    if (r.h_y_given_x_numeric) {
        j["h_ygx_num"] = *r.h_y_given_x_numeric;
    }
    return j;
}

inline nlohmann::json report_json(const mc::McReport& r) {
    nlohmann::json j = {{"estimate", r.estimate},
                        {"std_error", r.std_error},
                        {"n_samples", r.n_samples},
                        {"seed", r.seed}};
    if (r.gof_pvalue) {
        j["gof_pvalue"] = *r.gof_pvalue;
    }
    return j;
}

} // namespace detail

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
    double start_db = -10.0;
    double end_db = 30.0;
    std::size_t steps = 41;
    Units units = Units::bits;
    bool with_numeric = false;
    std::string out;
    Format format = Format::csv;
    std::size_t threads = 1;
    double sigma_s_sq = 1.0;
};

inline int cmd_sweep(const SweepArgs& args, Io io) {
    if (!(args.start_db < args.end_db) || args.steps < 2) {
        io.err << "error: sweep needs start < end and steps >= 2\n";
        return kExitUsage;
    }
    if (!(args.sigma_s_sq > 0.0) || args.threads == 0) {
        io.err << "error: sigma_s_sq must be > 0 and threads >= 1\n";
        return kExitUsage;
    }
    if (std::pow(10.0, args.end_db / 10.0) > capacity::kMaxRho) {
        io.err << "error: sweep end exceeds the supported range (50 dB)\n";
        return kExitUsage;
    }
    return detail::guarded(io, [&] {
        const auto grid = sweep::db_grid(args.start_db, args.end_db, args.steps);
        std::vector<sweep::SweepRow> rows;
        try {
            rows = sweep::run(grid, args.sigma_s_sq, args.units, args.with_numeric, args.threads);
        } catch (const sweep::PointFailure& e) {
            io.err << "numerical failure: " << e.what() << '\n';
            return kExitNumerical;
        }
        return detail::emit(args.out, io, [&](std::ostream& os) {
            if (args.format == Format::csv) {
                sweep::write_csv(os, rows, args.sigma_s_sq, args.with_numeric);
            } else {
                nlohmann::json j = {{"schema_version", kSchemaVersion},
                                    {"command", "sweep"},
                                    {"units", std::string(capacity::to_string(args.units))},
                                    {"sigma_s_sq", args.sigma_s_sq},
                                    {"rows", nlohmann::json::array()}};
                for (const auto& r : rows) {
                    j["rows"].push_back(detail::row_json(r));
                }
                os << j.dump(2) << '\n';
            }
        });
    });
}

// --- validate --------------------------------------------------------------

/// Default validation grid: 15 points, log-spaced over [-10, 30] dB.
inline std::vector<double> default_validation_grid() { return sweep::db_grid(-10.0, 30.0, 15); }

struct ValidateArgs {
    std::vector<double> rho_db = default_validation_grid();
    double tol_nats = 1e-6;
    double sigma_s_sq = 1.0;
    Format format = Format::csv;
};

struct ValidationPoint {
    double rho_db;
    double h_y_closed, h_y_numeric;
    double h_ygx_closed, h_ygx_numeric;
    double mi_closed, mi_numeric;
    double worst_excess;  // max over quantities of |diff| / allowed; > 1 fails
};

/// Compares closed forms with direct quadrature at one point. The MI bound is
/// 2 * tol since it is the difference of two quantities each held to tol.
inline ValidationPoint validate_point(double rho_db, double sigma_s_sq, double tol_nats) {
    const capacity::InputDist input(sigma_s_sq);
    const auto rho = capacity::Rho::from_db(rho_db);
    const double f = capacity::f_integral(rho);
    ValidationPoint p{};
    p.rho_db = rho_db;
    p.h_y_closed = capacity::h_y_closed(input, rho);
    p.h_ygx_closed = capacity::h_y_given_x_closed(input, rho, f);
    p.mi_closed = capacity::mi_closed(rho, f);
    const auto num = capacity::numeric_entropies(input, rho.channel_for(input));
    p.h_y_numeric = num.h_y;
    p.h_ygx_numeric = num.h_y_given_x;
    p.mi_numeric = num.mi;
    p.worst_excess = std::max({std::fabs(p.h_y_closed - p.h_y_numeric) / tol_nats,
                               std::fabs(p.h_ygx_closed - p.h_ygx_numeric) / tol_nats,
                               std::fabs(p.mi_closed - p.mi_numeric) / (2.0 * tol_nats)});
    return p;
}

inline int cmd_validate(const ValidateArgs& args, Io io) {
    if (!(args.tol_nats > 0.0) || args.rho_db.empty() || !(args.sigma_s_sq > 0.0)) {
        io.err << "error: validate needs tol > 0, sigma_s_sq > 0 and at least one rho\n";
        return kExitUsage;
    }
    return detail::guarded(io, [&] {
        std::vector<ValidationPoint> points;
        for (const double db : args.rho_db) {
            points.push_back(validate_point(db, args.sigma_s_sq, args.tol_nats));
        }
        const auto worst = std::max_element(points.begin(), points.end(), [](auto& a, auto& b) {
            return a.worst_excess < b.worst_excess;
        });
        const bool pass = worst->worst_excess <= 1.0;
        if (args.format == Format::json) {
            nlohmann::json j = {{"schema_version", kSchemaVersion}, {"command", "validate"},
                                {"tol_nats", args.tol_nats},    {"pass", pass},
                                {"points", nlohmann::json::array()}};
            for (const auto& p : points) {
                j["points"].push_back({{"rho_db", p.rho_db},
                                       {"h_y", p.h_y_closed},
                                       {"h_y_num", p.h_y_numeric},
                                       {"h_y_given_x", p.h_ygx_closed},
                                       {"h_ygx_num", p.h_ygx_numeric},
                                       {"mi", p.mi_closed},
                                       {"mi_num", p.mi_numeric},
                                       {"pass", p.worst_excess <= 1.0}});
            }
            io.out << j.dump(2) << '\n';
        } else {
            io.out << "rho_db,h_y,h_y_num,h_y_given_x,h_ygx_num,mi,mi_num,status\n";
            for (const auto& p : points) {
                io.out << fmt17(p.rho_db) << ',' << fmt17(p.h_y_closed) << ',' << fmt17(p.h_y_numeric)
                       << ',' << fmt17(p.h_ygx_closed) << ',' << fmt17(p.h_ygx_numeric) << ','
                       << fmt17(p.mi_closed) << ',' << fmt17(p.mi_numeric) << ','
                       << (p.worst_excess <= 1.0 ? "pass" : "FAIL") << '\n';
            }
        }
        if (!pass) {
            io.err << "validation failed; worst point rho = " << worst->rho_db
                   << " dB (error " << worst->worst_excess << "x tolerance)\n";
            return kExitValidation;
        }
        return kExitOk;
    });
}

// --- sample ----------------------------------------------------------------

struct SampleArgs {
    double x = 1.0;
    double sigma_n_sq = 0.1;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::string out;
};

inline int cmd_sample(const SampleArgs& args, Io io) {
    if (args.n == 0 || !(args.x > 0.0) || !(args.sigma_n_sq > 0.0) || !std::isfinite(args.x)
        || !std::isfinite(args.sigma_n_sq)) {
        io.err << "error: sample needs x > 0, sigma_n_sq > 0 and n >= 1\n";
        return kExitUsage;
    }
    return detail::guarded(io, [&] {
        const channel::ChannelParams params(args.sigma_n_sq);
        channel::RngStream rng(args.seed);
        return detail::emit(args.out, io, [&](std::ostream& os) {
            os << "# x=" << fmt17(args.x) << " sigma_n_sq=" << fmt17(args.sigma_n_sq)
               << " seed=" << args.seed << '\n';
            for (std::size_t i = 0; i < args.n; ++i) {
                os << fmt17(channel::sample_y(args.x, params, rng)) << '\n';
            }
        });
    });
}

// --- physical --------------------------------------------------------------

struct PhysicalArgs {
    soliton::PhysicalLink link{};
    double sigma_s_sq = 1.0;
    /// Separation policy: the overlap e^{-a0} at a0 = sigma_s_sq must not exceed this.
    double max_overlap = 0.01;
    Format format = Format::json;
};

inline int cmd_physical(const PhysicalArgs& args, Io io) {
    if (!(args.sigma_s_sq > 0.0)) {
        io.err << "error: sigma_s_sq must be > 0\n";
        return kExitUsage;
    }
    return detail::guarded(io, [&] {
        const auto n = soliton::normalize(args.link);
        const double rho_max = args.sigma_s_sq / n.sigma_n_sq;
        const auto margin = soliton::separation_margin(args.sigma_s_sq);
        nlohmann::json j = {{"schema_version", kSchemaVersion},
                            {"command", "physical"},
                            {"l_s", n.l_s},
                            {"noise_d", n.noise_d},
                            {"sigma0_sq", n.sigma0_sq},
                            {"sigma_n_sq", n.sigma_n_sq},
                            {"power_scale", n.power_scale},
                            {"z_end", n.z_end},
                            {"sigma_s_sq", args.sigma_s_sq},
                            {"rho_max", rho_max},
                            {"rho_max_db", 10.0 * std::log10(rho_max)},
                            {"separation_overlap", margin.overlap},
                            {"soliton_width", margin.width},
                            {"separation_ok", margin.overlap <= args.max_overlap && margin.width < 1.0},
                            {"note", "separation check ignores Gordon-Haus timing jitter"}};
        if (args.format == Format::json) {
            io.out << j.dump(2) << '\n';
        } else {
            io.out << "key,value\n";
            for (const auto& [k, v] : j.items()) {
                io.out << k << ',' << (v.is_number_float() ? fmt17(v.get<double>()) : v.dump()) << '\n';
            }
        }
        return kExitOk;
    });
}

// --- mc --------------------------------------------------------------------

struct McArgs {
    double rho_db = 10.0;
    std::size_t n = 100000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t substreams = 16;
    double sigma_s_sq = 1.0;
    double n_sigma = 4.0;
    Format format = Format::csv;
};

inline int cmd_mc(const McArgs& args, Io io) {
    if (args.n < mc::kMinEntropySamples || args.threads == 0 || args.substreams == 0
        || !(args.sigma_s_sq > 0.0)) {
        io.err << "error: mc needs n >= " << mc::kMinEntropySamples
               << ", threads >= 1, substreams >= 1, sigma_s_sq > 0\n";
        return kExitUsage;
    }
    return detail::guarded(io, [&] {
        const capacity::InputDist input(args.sigma_s_sq);
        const auto rho = capacity::Rho::from_db(args.rho_db);
        const auto params = rho.channel_for(input);
        const mc::McOptions opt{args.substreams, args.threads};

        const double f = capacity::f_integral(rho);
        struct Line {
            const char* name;
            mc::McReport report;
            double reference;
        };
        const std::vector<Line> lines = {
            {"h_y", mc::mc_entropy_y(input, params, args.n, args.seed, opt),
             capacity::h_y_closed(input, rho)},
            {"h_y_given_x", mc::mc_entropy_y_given_x(input, params, args.n, args.seed, opt),
             capacity::h_y_given_x_closed(input, rho, f)},
            {"mi", mc::mc_mutual_information(input, params, args.n, args.seed, opt),
             capacity::mi_closed(rho, f)},
        };
        bool pass = true;
        auto ok = [&](const Line& l) {
            return std::fabs(l.report.estimate - l.reference) <= args.n_sigma * l.report.std_error;
        };
        for (const auto& l : lines) {
            pass = pass && ok(l);
        }
        if (args.format == Format::json) {
            nlohmann::json j = {{"schema_version", kSchemaVersion}, {"command", "mc"},
                                {"rho_db", args.rho_db},          {"units", "nats"},
                                {"pass", pass},                   {"results", nlohmann::json::object()}};
            for (const auto& l : lines) {
                auto r = detail::report_json(l.report);
                r["closed_form"] = l.reference;
                r["pass"] = ok(l);
                j["results"][l.name] = r;
            }
            io.out << j.dump(2) << '\n';
        } else {
            io.out << "# rho_db=" << fmt17(args.rho_db) << " units=nats n_sigma=" << fmt17(args.n_sigma) << '\n';
            io.out << "quantity,estimate,std_error,n_samples,seed,closed_form,status\n";
            for (const auto& l : lines) {
                io.out << l.name << ',' << fmt17(l.report.estimate) << ',' << fmt17(l.report.std_error)
                       << ',' << l.report.n_samples << ',' << l.report.seed << ','
                       << fmt17(l.reference) << ',' << (ok(l) ? "pass" : "FAIL") << '\n';
            }
        }
        return pass ? kExitOk : kExitValidation;
    });
}

// --- gof -------------------------------------------------------------------

struct GofArgs {
    double x = 1.0;
    double sigma_n_sq = 0.1;
    std::size_t n = 100000;
    std::size_t bins = 50;
    std::uint64_t seed = 1;
    double alpha = 1e-3;
    Format format = Format::csv;
};

inline int cmd_gof(const GofArgs& args, Io io) {
    if (args.n < mc::kMinGofSamples || args.bins < mc::kMinGofBins || !(args.x > 0.0)
        || !(args.sigma_n_sq > 0.0)) {
        io.err << "error: gof needs x > 0, sigma_n_sq > 0, n >= " << mc::kMinGofSamples
               << ", bins >= " << mc::kMinGofBins << '\n';
        return kExitUsage;
    }
    return detail::guarded(io, [&] {
        const auto r = mc::gof_binned(args.x, channel::ChannelParams(args.sigma_n_sq), args.n, args.bins,
                                      args.seed);
        const bool pass = *r.gof_pvalue > args.alpha;
        if (args.format == Format::json) {
            auto j = detail::report_json(r);
            j["schema_version"] = kSchemaVersion;
            j["command"] = "gof";
            j["statistic"] = r.estimate;
            j["bins"] = args.bins;
            j["pass"] = pass;
            io.out << j.dump(2) << '\n';
        } else {
            io.out << "statistic,dof,p_value,n_samples,seed,status\n"
                   << fmt17(r.estimate) << ',' << (args.bins - 1) << ',' << fmt17(*r.gof_pvalue) << ','
                   << r.n_samples << ',' << r.seed << ',' << (pass ? "pass" : "FAIL") << '\n';
        }
        return pass ? kExitOk : kExitValidation;
    });
}

} // namespace solcap::cli
