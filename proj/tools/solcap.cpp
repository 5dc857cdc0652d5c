// solcap: capacity lower bound of the soliton-amplitude channel.
//
//   solcap sweep -10 30 41 --units bits --with-numeric --out fig.csv
//   solcap validate --tol 1e-6
//   solcap sample --x 1 --sigma-n-sq 0.04 --n 1000 --seed 7
//   solcap physical --beta2 -2.1e-26 --gamma 1.3e-3 ...
//   solcap mc 10 --n 100000 --seed 1 --threads 8
//   solcap gof --x 1 --sigma-n-sq 0.1

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

namespace {

using solcap::cli::Format;
using solcap::capacity::Units;

const std::map<std::string, Units> kUnits = {{"bits", Units::bits}, {"nats", Units::nats}};
const std::map<std::string, Format> kFormats = {{"csv", Format::csv}, {"json", Format::json}};

// Enumerated options are parsed as text and mapped once parsing succeeded.
struct Choices {
    std::string units;
    std::string format;
};

void add_format(CLI::App* cmd, std::string& target) {
    cmd->add_option("--format", target, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

template <class T>
void apply(const std::map<std::string, T>& table, const std::string& text, T& target) {
    if (!text.empty()) {
        target = table.at(text);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soliton-amplitude channel: entropies, mutual information and Monte Carlo checks"};
    app.require_subcommand(1);

    solcap::cli::SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Closed-form h_Y, h_Y|X, I_XY, I_as over a rho grid in dB");
    sweep_cmd->add_option("start", sweep.start_db, "First grid point [dB]")->required();
    sweep_cmd->add_option("end", sweep.end_db, "Last grid point [dB]")->required();
    sweep_cmd->add_option("steps", sweep.steps, "Number of grid points (>= 2)")->required();
    Choices sweep_choice;
    sweep_cmd->add_option("--units", sweep_choice.units, "bits or nats (default bits)")
        ->check(CLI::IsMember({"bits", "nats"}));
    sweep_cmd->add_flag("--with-numeric", sweep.with_numeric, "Add quadrature values of h_Y and h_Y|X");
    sweep_cmd->add_option("--out", sweep.out, "Output path (default stdout)");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads");
    sweep_cmd->add_option("--sigma-s-sq", sweep.sigma_s_sq, "Rayleigh input scale");
    add_format(sweep_cmd, sweep_choice.format);

    solcap::cli::ValidateArgs validate;
    auto* validate_cmd = app.add_subcommand("validate", "Compare closed forms with numerical integration");
    validate_cmd->add_option("rho_db", validate.rho_db, "Grid points [dB] (default: 15 points over [-10, 30])");
    validate_cmd->add_option("--tol", validate.tol_nats, "Tolerance in nats");
    validate_cmd->add_option("--sigma-s-sq", validate.sigma_s_sq, "Rayleigh input scale");
    Choices validate_choice;
    add_format(validate_cmd, validate_choice.format);

    solcap::cli::SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Draw channel outputs Y given X = x");
    sample_cmd->add_option("--x", sample.x, "Channel input x > 0");
    sample_cmd->add_option("--sigma-n-sq", sample.sigma_n_sq, "Noise variance");
    sample_cmd->add_option("--n", sample.n, "Number of samples");
    sample_cmd->add_option("--seed", sample.seed, "RNG seed");
    sample_cmd->add_option("--out", sample.out, "Output path (default stdout)");

    solcap::cli::PhysicalArgs physical;
    auto& link = physical.link;
    link = {-2.0e-26, 1.3e-3, 4.6e-5, 1.13, 1.28e-19, 50e-12, 2.0e6};
    auto* physical_cmd = app.add_subcommand("physical", "Map physical link parameters to normalized units");
    physical_cmd->add_option("--beta2", link.beta2, "GVD [s^2/m], negative");
    physical_cmd->add_option("--gamma", link.gamma_nl, "Nonlinearity [1/(W m)]");
    physical_cmd->add_option("--alpha", link.alpha, "Attenuation [1/m]");
    physical_cmd->add_option("--kt", link.k_t, "Raman pump factor K_T");
    physical_cmd->add_option("--photon-energy", link.photon_energy, "h nu [J]");
    physical_cmd->add_option("--ts", link.t_s, "Symbol interval [s]");
    physical_cmd->add_option("--length", link.length, "Link length [m]");
    physical_cmd->add_option("--sigma-s-sq", physical.sigma_s_sq, "Mean normalized soliton amplitude");
    physical_cmd->add_option("--max-overlap", physical.max_overlap, "Separation policy for exp(-a0)");
    Choices physical_choice;
    add_format(physical_cmd, physical_choice.format);

    solcap::cli::McArgs mc;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo entropy estimates against the closed forms");
    mc_cmd->alias("mc-entropy");
    mc_cmd->add_option("rho_db", mc.rho_db, "rho [dB]")->required();
    mc_cmd->add_option("--n", mc.n, "Samples (>= 1000)");
    mc_cmd->add_option("--seed", mc.seed, "RNG seed");
    mc_cmd->add_option("--threads", mc.threads, "Worker threads");
    mc_cmd->add_option("--substreams", mc.substreams, "Independent RNG substreams");
    mc_cmd->add_option("--sigma-s-sq", mc.sigma_s_sq, "Rayleigh input scale");
    Choices mc_choice;
    add_format(mc_cmd, mc_choice.format);

    solcap::cli::GofArgs gof;
    auto* gof_cmd = app.add_subcommand("gof", "Binned chi-square test of the sampler against p(y|x)");
    gof_cmd->add_option("--x", gof.x, "Channel input x > 0");
    gof_cmd->add_option("--sigma-n-sq", gof.sigma_n_sq, "Noise variance");
    gof_cmd->add_option("--n", gof.n, "Samples (>= 10000)");
    gof_cmd->add_option("--bins", gof.bins, "Equal-probability bins (>= 10)");
    gof_cmd->add_option("--seed", gof.seed, "RNG seed");
    Choices gof_choice;
    add_format(gof_cmd, gof_choice.format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return solcap::cli::kExitUsage;
    }

    apply(kUnits, sweep_choice.units, sweep.units);
    apply(kFormats, sweep_choice.format, sweep.format);
    apply(kFormats, validate_choice.format, validate.format);
    apply(kFormats, physical_choice.format, physical.format);
    apply(kFormats, mc_choice.format, mc.format);
    apply(kFormats, gof_choice.format, gof.format);

    const solcap::cli::Io io{std::cout, std::cerr};
    if (*sweep_cmd) return solcap::cli::cmd_sweep(sweep, io);
    if (*validate_cmd) return solcap::cli::cmd_validate(validate, io);
    if (*sample_cmd) return solcap::cli::cmd_sample(sample, io);
    if (*physical_cmd) return solcap::cli::cmd_physical(physical, io);
    if (*mc_cmd) return solcap::cli::cmd_mc(mc, io);
    if (*gof_cmd) return solcap::cli::cmd_gof(gof, io);
    return solcap::cli::kExitUsage;
}
